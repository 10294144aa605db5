//! The Paice/Husk (Lancaster) stemmer with its standard rule table.

use std::collections::HashMap;
use std::sync::OnceLock;

/// Each rule: reversed ending, optional `*` (word must be intact), number of
/// characters to remove, optional append string, then `>` (continue) or `.`
/// (stop).
const RULES: [&str; 115] = [
    "ai*2.", "a*1.", "bb1.", "city3s.", "ci2>", "cn1t>", "dd1.", "dei3y>", "deec2ss.", "dee1.",
    "de2>", "dooh4>", "e1>", "feil1v.", "fi2>", "gni3>", "gai3y.", "ga2>", "gg1.", "ht*2.",
    "hsiug5ct.", "hsi3>", "i*1.", "i1y>", "ji1d.", "juf1s.", "ju1d.", "jo1d.", "jeh1r.",
    "jrev1t.", "jsim2t.", "jn1d.", "j1s.", "lbaifi6.", "lbai4y.", "lba3>", "lbi3.", "lib2l>",
    "lc1.", "lufi4y.", "luf3>", "lu2.", "lai3>", "lau3>", "la2>", "ll1.", "mui3.", "mu*2.",
    "msi3>", "mm1.", "nois4j>", "noix4ct.", "noi3>", "nai3>", "na2>", "nee0.", "ne2>", "nn1.",
    "pihs4>", "pp1.", "re2>", "rae0.", "ra2.", "ro2>", "ru2>", "rr1.", "rt1>", "rei3y>",
    "sei3y>", "sis2.", "si2>", "ssen4>", "ss0.", "suo3>", "su*2.", "s*1>", "s0.", "tacilp4y.",
    "ta2>", "tnem4>", "tne3>", "tna3>", "tpir2b.", "tpro2b.", "tcud1.", "tpmus2.", "tpec2iv.",
    "tulo2v.", "tsis0.", "tsi3>", "tt1.", "uqi3.", "ugo1.", "vis3j>", "vie0.", "vi2>", "ylb1>",
    "yli3y>", "ylp0.", "yl2>", "ygo1.", "yhp1.", "ymo1.", "ypo1.", "yti3>", "yte3>", "ytl2.",
    "yrtsi5.", "yra3>", "yro3>", "yfi3.", "ycn2t>", "yca3>", "zi2>", "zy1s.",
];

struct Rule {
    ending: String,
    intact: bool,
    remove: usize,
    append: String,
    cont: bool,
}

fn parse(raw: &str) -> Rule {
    let letters_end = raw.find(|c: char| !c.is_ascii_lowercase()).expect("rule has a count");
    let ending: String = raw[..letters_end].chars().rev().collect();
    let mut rest = &raw[letters_end..];
    let intact = rest.starts_with('*');
    if intact {
        rest = &rest[1..];
    }
    let remove = (rest.as_bytes()[0] - b'0') as usize;
    let append = rest[1..rest.len() - 1].to_owned();
    let cont = rest.ends_with('>');
    Rule { ending, intact, remove, append, cont }
}

fn rules_by_last_letter() -> &'static HashMap<u8, Vec<Rule>> {
    static TABLE: OnceLock<HashMap<u8, Vec<Rule>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table: HashMap<u8, Vec<Rule>> = HashMap::new();
        for raw in RULES {
            table.entry(raw.as_bytes()[0]).or_default().push(parse(raw));
        }
        table
    })
}

fn is_vowel(b: u8) -> bool {
    matches!(b, b'a' | b'e' | b'i' | b'o' | b'u' | b'y')
}

fn acceptable(word: &str, remove: usize) -> bool {
    let w = word.as_bytes();
    let Some(remaining) = w.len().checked_sub(remove) else {
        return false;
    };
    if is_vowel(w[0]) {
        remaining >= 2
    } else {
        remaining >= 3 && (is_vowel(w[1]) || is_vowel(w[2]))
    }
}

pub fn stem(word: &str) -> String {
    if word.is_empty() || !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return word.to_owned();
    }
    let table = rules_by_last_letter();
    let mut w = word.to_owned();
    loop {
        let Some(&last) = w.as_bytes().last() else {
            return w;
        };
        let Some(rules) = table.get(&last) else {
            return w;
        };
        let applicable = rules.iter().find(|rule| {
            w.ends_with(&rule.ending)
                && (!rule.intact || w == word)
                && acceptable(&w, rule.remove)
        });
        let Some(rule) = applicable else {
            return w;
        };
        w.truncate(w.len() - rule.remove);
        w.push_str(&rule.append);
        if !rule.cont {
            return w;
        }
    }
}
