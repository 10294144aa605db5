//! Verdict lookup with caching and retries, and the two-step alignment filter.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{parse_verdict, render_prompt, Answer, CacheKey, ChatProvider, LlmVerdict, PromptTemplate, ProviderConfig, VerdictCache};
use crate::error::{Error, Result};
use crate::model::{Alignment, OntologyDoc};
use crate::ontology::{display_text, LabelPolicy};
use crate::textprep::{Pipeline, PipelineConfig, Step};

/// Cached verdict when available, otherwise one request (plus retries).
pub fn classify_pair(
    provider: &dyn ChatProvider,
    config: &ProviderConfig,
    template: PromptTemplate,
    entity1: &str,
    entity2: &str,
    cache: &VerdictCache,
) -> Result<LlmVerdict> {
    let prompt = render_prompt(template, entity1, entity2)?;
    let key = CacheKey {
        model: provider.model().to_owned(),
        template,
        e1: entity1.to_owned(),
        e2: entity2.to_owned(),
    };
    if let Some(hit) = cache.get(&key) {
        return Ok(LlmVerdict {
            answer: hit.answer,
            raw_text: hit.raw_text,
            model: hit.model,
            template,
            cached: true,
        });
    }
    let raw = complete_with_retries(provider, config, &prompt)?;
    let answer = parse_verdict(&raw);
    cache.insert(key, answer, &raw)?;
    Ok(LlmVerdict { answer, raw_text: raw, model: provider.model().to_owned(), template, cached: false })
}

fn complete_with_retries(
    provider: &dyn ChatProvider,
    config: &ProviderConfig,
    prompt: &str,
) -> Result<String> {
    let mut attempt = 0;
    loop {
        attempt += 1;
        match provider.complete(prompt) {
            Err(Error::ProviderUnavailable { message, .. }) => {
                if attempt > config.retry_limit {
                    return Err(Error::ProviderUnavailable { attempts: attempt, message });
                }
                thread::sleep(Duration::from_millis(config.retry_backoff_ms * attempt as u64));
            }
            other => return other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellDecision {
    /// Tokenised and normalised texts agree; no request made.
    KeptByKeys,
    KeptYes,
    /// Kept because the answer could not be read.
    KeptUnparseable,
    RemovedNo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellAudit {
    pub entity1: String,
    pub entity2: String,
    pub text1: String,
    pub text2: String,
    pub decision: CellDecision,
    pub verdict: Option<LlmVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairOutcome {
    pub alignment: Alignment,
    /// One record per input cell, in cell order.
    pub audits: Vec<CellAudit>,
    /// Requests sent to the provider during this call, retries included.
    pub requests: usize,
    pub unparseable: usize,
}

impl RepairOutcome {
    pub fn verdicts(&self) -> impl Iterator<Item = &LlmVerdict> + '_ {
        self.audits.iter().filter_map(|a| a.verdict.as_ref())
    }

    pub fn count(&self, decision: CellDecision) -> usize {
        self.audits.iter().filter(|a| a.decision == decision).count()
    }
}

/// Keeps cells whose tokenised and normalised display texts agree, asks the
/// provider about the rest and drops those answered "no".
#[allow(clippy::too_many_arguments)]
pub fn repair_alignment(
    alignment: &Alignment,
    source: &OntologyDoc,
    target: &OntologyDoc,
    provider: &dyn ChatProvider,
    config: &ProviderConfig,
    template: PromptTemplate,
    cache: &VerdictCache,
    policy: LabelPolicy,
) -> Result<RepairOutcome> {
    config.validate()?;
    let tn = Pipeline::new(PipelineConfig::new(vec![Step::Tokenise, Step::Normalise])?, None)?;

    let mut texts = Vec::with_capacity(alignment.len());
    for cell in alignment.cells() {
        let e1 = source
            .get(&cell.entity1)
            .ok_or_else(|| Error::UnknownEntity(cell.entity1.clone()))?;
        let e2 = target
            .get(&cell.entity2)
            .ok_or_else(|| Error::UnknownEntity(cell.entity2.clone()))?;
        let (t1, t2) = (display_text(e1, policy), display_text(e2, policy));
        let confirmed = tn.apply(t1, None) == tn.apply(t2, None);
        texts.push((t1.to_owned(), t2.to_owned(), confirmed));
    }

    let pending: Vec<(String, String)> = texts
        .iter()
        .filter(|(_, _, confirmed)| !confirmed)
        .map(|(t1, t2, _)| (t1.clone(), t2.clone()))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();

    let before = provider.requests();
    let verdicts = classify_all(&pending, provider, config, template, cache)?;
    let requests = provider.requests() - before;

    let mut repaired = Alignment::new(&alignment.source_ontology, &alignment.target_ontology)
        .with_provenance(format!(
            "{} | llm-repair model={} template={}",
            alignment.provenance,
            provider.model(),
            template
        ));
    let mut audits = Vec::with_capacity(alignment.len());
    let mut unparseable = 0;
    for (cell, (t1, t2, confirmed)) in alignment.cells().zip(texts) {
        let verdict = (!confirmed).then(|| verdicts[&(t1.clone(), t2.clone())].clone());
        let decision = match verdict.as_ref().map(|v| v.answer) {
            None => CellDecision::KeptByKeys,
            Some(Answer::Yes) => CellDecision::KeptYes,
            Some(Answer::No) => CellDecision::RemovedNo,
            Some(Answer::Unparseable) => {
                unparseable += 1;
                CellDecision::KeptUnparseable
            }
        };
        if decision != CellDecision::RemovedNo {
            repaired.insert(cell.clone());
        }
        audits.push(CellAudit {
            entity1: cell.entity1.clone(),
            entity2: cell.entity2.clone(),
            text1: t1,
            text2: t2,
            decision,
            verdict,
        });
    }
    Ok(RepairOutcome { alignment: repaired, audits, requests, unparseable })
}

type Verdicts = BTreeMap<(String, String), LlmVerdict>;

/// Classifies every pair with at most `max_in_flight` requests outstanding.
/// Workers stop taking new pairs after the first error, which is returned.
fn classify_all(
    pending: &[(String, String)],
    provider: &dyn ChatProvider,
    config: &ProviderConfig,
    template: PromptTemplate,
    cache: &VerdictCache,
) -> Result<Verdicts> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Verdicts> = Mutex::new(BTreeMap::new());
    let failure: Mutex<Option<Error>> = Mutex::new(None);
    let workers = config.max_in_flight.min(pending.len());
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if failure.lock().expect("lock").is_some() {
                    return;
                }
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some((t1, t2)) = pending.get(i) else {
                    return;
                };
                match classify_pair(provider, config, template, t1, t2, cache) {
                    Ok(verdict) => {
                        results.lock().expect("lock").insert((t1.clone(), t2.clone()), verdict);
                    }
                    Err(e) => {
                        failure.lock().expect("lock").get_or_insert(e);
                        return;
                    }
                }
            });
        }
    });
    match failure.into_inner().expect("lock") {
        Some(e) => Err(e),
        None => Ok(results.into_inner().expect("lock")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::StubProvider;
    use crate::model::{Correspondence, EntityKind, EntityRef};

    fn doc(names: &[&str]) -> OntologyDoc {
        OntologyDoc::from_entities(
            "mem",
            names.iter().map(|n| EntityRef::new(format!("http://x#{n}"), EntityKind::ObjectProperty)),
        )
        .unwrap()
    }

    fn cells(pairs: &[(&str, &str)]) -> Alignment {
        let mut a = Alignment::new("s", "t");
        a.extend(pairs.iter().map(|(x, y)| {
            Correspondence::exact(format!("http://x#{x}"), format!("http://x#{y}"))
        }));
        a
    }

    struct Flaky {
        failures: AtomicUsize,
        requests: AtomicUsize,
    }

    impl ChatProvider for Flaky {
        fn model(&self) -> &str {
            "flaky"
        }
        fn complete(&self, _prompt: &str) -> Result<String> {
            self.requests.fetch_add(1, Ordering::SeqCst);
            if self.failures.load(Ordering::SeqCst) > 0 {
                self.failures.fetch_sub(1, Ordering::SeqCst);
                return Err(Error::ProviderUnavailable { attempts: 1, message: "reset".into() });
            }
            Ok("yes".into())
        }
        fn requests(&self) -> usize {
            self.requests.load(Ordering::SeqCst)
        }
    }

    fn fast() -> ProviderConfig {
        ProviderConfig { retry_backoff_ms: 0, retry_limit: 2, ..ProviderConfig::stub() }
    }

    #[test]
    fn two_steps() {
        let s = doc(&["Hair_root", "isReviewing"]);
        let t = doc(&["Hair_Root", "isReviewedBy"]);
        let a = cells(&[("Hair_root", "Hair_Root"), ("isReviewing", "isReviewedBy")]);
        let stub = StubProvider::new("stub");
        let cache = VerdictCache::in_memory();
        let out = repair_alignment(&a, &s, &t, &stub, &fast(), PromptTemplate::PT1, &cache, LabelPolicy::NameThenLabel)
            .unwrap();
        assert_eq!(out.alignment.len(), 1);
        assert!(out.alignment.contains_pair("http://x#Hair_root", "http://x#Hair_Root"));
        assert_eq!(out.requests, 1);
        assert_eq!(out.count(CellDecision::KeptByKeys), 1);
        assert_eq!(out.count(CellDecision::RemovedNo), 1);

        let again = repair_alignment(&a, &s, &t, &stub, &fast(), PromptTemplate::PT1, &cache, LabelPolicy::NameThenLabel)
            .unwrap();
        assert_eq!(again.requests, 0);
        assert_eq!(again.alignment, out.alignment);
        assert!(again.verdicts().all(|v| v.cached));
    }

    #[test]
    fn empty_alignment() {
        let stub = StubProvider::new("stub");
        let out = repair_alignment(
            &Alignment::new("s", "t"),
            &doc(&[]),
            &doc(&[]),
            &stub,
            &fast(),
            PromptTemplate::PT1,
            &VerdictCache::in_memory(),
            LabelPolicy::NameThenLabel,
        )
        .unwrap();
        assert!(out.alignment.is_empty());
        assert_eq!(out.requests, 0);
    }

    #[test]
    fn unknown_entity() {
        let stub = StubProvider::new("stub");
        let result = repair_alignment(
            &cells(&[("A", "B")]),
            &doc(&["A"]),
            &doc(&["C"]),
            &stub,
            &fast(),
            PromptTemplate::PT1,
            &VerdictCache::in_memory(),
            LabelPolicy::NameThenLabel,
        );
        assert!(matches!(result, Err(Error::UnknownEntity(iri)) if iri == "http://x#B"));
    }

    #[test]
    fn retries_then_succeeds() {
        let flaky = Flaky { failures: AtomicUsize::new(2), requests: AtomicUsize::new(0) };
        let cache = VerdictCache::in_memory();
        let v = classify_pair(&flaky, &fast(), PromptTemplate::PT1, "a", "b", &cache).unwrap();
        assert_eq!(v.answer, Answer::Yes);
        assert_eq!(flaky.requests(), 3);
    }

    #[test]
    fn retries_exhausted() {
        let flaky = Flaky { failures: AtomicUsize::new(10), requests: AtomicUsize::new(0) };
        let cache = VerdictCache::in_memory();
        let err = classify_pair(&flaky, &fast(), PromptTemplate::PT1, "a", "b", &cache).unwrap_err();
        assert!(matches!(err, Error::ProviderUnavailable { attempts: 3, .. }));
        assert!(cache.is_empty());
    }
}
