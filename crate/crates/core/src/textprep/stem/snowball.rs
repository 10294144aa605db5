//! The Snowball English ("Porter2") stemmer, current revision.

pub fn stem(word: &str) -> String {
    if let Some(fixed) = exceptional_form(word) {
        return fixed.to_owned();
    }
    if word.len() < 3 || !word.bytes().all(|b| b.is_ascii_lowercase() || b == b'\'') {
        return word.to_owned();
    }
    let mut w = Word::new(word);
    if w.chars.is_empty() {
        return String::new();
    }
    w.step1a();
    w.step1b();
    w.step1c();
    w.step2();
    w.step3();
    w.step4();
    w.step5();
    w.chars.iter().map(|&b| if b == b'Y' { 'y' } else { b as char }).collect()
}

fn exceptional_form(word: &str) -> Option<&str> {
    Some(match word {
        "skis" => "ski",
        "skies" => "sky",
        "idly" => "idl",
        "gently" => "gentl",
        "ugly" => "ugli",
        "early" => "earli",
        "only" => "onli",
        "singly" => "singl",
        "sky" | "news" | "howe" | "atlas" | "cosmos" | "bias" | "andes" => word,
        _ => return None,
    })
}

fn is_vowel(b: u8) -> bool {
    matches!(b, b'a' | b'e' | b'i' | b'o' | b'u' | b'y')
}

fn is_double(pair: &[u8]) -> bool {
    pair[0] == pair[1] && matches!(pair[0], b'b' | b'd' | b'f' | b'g' | b'm' | b'n' | b'p' | b'r' | b't')
}

fn is_valid_li(b: u8) -> bool {
    matches!(b, b'c' | b'd' | b'e' | b'g' | b'h' | b'k' | b'm' | b'n' | b'r' | b't')
}

const R1_PREFIXES: [&str; 9] =
    ["arsen", "commun", "emerg", "gener", "inter", "later", "organ", "past", "univers"];

struct Word {
    chars: Vec<u8>,
    p1: usize,
    p2: usize,
}

impl Word {
    fn new(word: &str) -> Self {
        let mut chars: Vec<u8> = word.bytes().collect();
        if chars.first() == Some(&b'\'') {
            chars.remove(0);
        }
        if chars.first() == Some(&b'y') {
            chars[0] = b'Y';
        }
        for i in 1..chars.len() {
            if chars[i] == b'y' && is_vowel(chars[i - 1]) {
                chars[i] = b'Y';
            }
        }
        let mut w = Word { p1: chars.len(), p2: chars.len(), chars };
        w.mark_regions();
        w
    }

    /// Position after the first non-vowel that follows a vowel, searching from `from`.
    fn region_after(&self, from: usize) -> Option<usize> {
        let c = &self.chars;
        let vowel = (from..c.len()).find(|&i| is_vowel(c[i]))?;
        let consonant = (vowel + 1..c.len()).find(|&i| !is_vowel(c[i]))?;
        Some(consonant + 1)
    }

    fn mark_regions(&mut self) {
        let len = self.chars.len();
        let prefix = R1_PREFIXES.iter().find(|p| self.chars.starts_with(p.as_bytes()));
        let p1 = match prefix {
            Some(p) => p.len(),
            None => match self.region_after(0) {
                Some(p) => p,
                None => return,
            },
        };
        self.p1 = p1;
        self.p2 = self.region_after(p1).unwrap_or(len);
    }

    fn len(&self) -> usize {
        self.chars.len()
    }

    fn ends_with(&self, suffix: &str) -> bool {
        self.chars.ends_with(suffix.as_bytes())
    }

    /// Longest suffix from `suffixes` that the word ends with.
    fn longest<'a>(&self, suffixes: &[&'a str]) -> Option<&'a str> {
        suffixes.iter().copied().filter(|s| self.ends_with(s)).max_by_key(|s| s.len())
    }

    fn replace(&mut self, suffix_len: usize, with: &str) {
        let n = self.len() - suffix_len;
        self.chars.truncate(n);
        self.chars.extend_from_slice(with.as_bytes());
    }

    /// Short syllable ending at `end`.
    fn short_syllable(&self, end: usize) -> bool {
        let c = &self.chars[..end];
        if c.ends_with(b"past") {
            return true;
        }
        match end {
            0 | 1 => false,
            2 => is_vowel(c[0]) && !is_vowel(c[1]),
            _ => {
                !is_vowel(c[end - 1])
                    && !matches!(c[end - 1], b'w' | b'x' | b'Y')
                    && is_vowel(c[end - 2])
                    && !is_vowel(c[end - 3])
            }
        }
    }

    fn step1a(&mut self) {
        if let Some(s) = self.longest(&["'s'", "'s", "'"]) {
            self.replace(s.len(), "");
        }
        let Some(suffix) = self.longest(&["sses", "ied", "ies", "ss", "us", "s"]) else {
            return;
        };
        match suffix {
            "sses" => self.replace(4, "ss"),
            "ied" | "ies" => {
                let with = if self.len() > 4 { "i" } else { "ie" };
                self.replace(3, with);
            }
            "s" => {
                let n = self.len();
                if n >= 3 && self.chars[..n - 2].iter().any(|&b| is_vowel(b)) {
                    self.replace(1, "");
                }
            }
            _ => {}
        }
    }

    fn step1b(&mut self) {
        let Some(suffix) = self.longest(&["eedly", "ingly", "edly", "eed", "ing", "ed"]) else {
            return;
        };
        let start = self.len() - suffix.len();
        if suffix == "eed" || suffix == "eedly" {
            if start >= self.p1 && !matches!(&self.chars[..start], b"succ" | b"proc" | b"exc") {
                self.replace(suffix.len(), "ee");
            }
            return;
        }
        if suffix == "ing" {
            let stem = &self.chars[..start];
            if stem.ends_with(b"y") {
                if stem.len() == 2 && !is_vowel(stem[0]) {
                    self.replace(4, "ie");
                    return;
                }
            } else if matches!(stem, b"even" | b"cann" | b"inn" | b"earr" | b"herr" | b"out") {
                return;
            }
        }
        if !self.chars[..start].iter().any(|&b| is_vowel(b)) {
            return;
        }
        self.replace(suffix.len(), "");
        let n = self.len();
        if self.ends_with("at") || self.ends_with("bl") || self.ends_with("iz") {
            self.chars.push(b'e');
        } else if n >= 2 && is_double(&self.chars[n - 2..]) {
            if !(n == 3 && matches!(self.chars[0], b'a' | b'e' | b'o')) {
                self.chars.pop();
            }
        } else if n == self.p1 && self.short_syllable(n) {
            self.chars.push(b'e');
        }
    }

    fn step1c(&mut self) {
        let n = self.len();
        if n >= 3 && matches!(self.chars[n - 1], b'y' | b'Y') && !is_vowel(self.chars[n - 2]) {
            self.chars[n - 1] = b'i';
        }
    }

    fn step2(&mut self) {
        const SUFFIXES: [&str; 25] = [
            "anci", "enci", "ogi", "li", "bli", "abli", "alli", "fulli", "lessli", "ousli",
            "entli", "aliti", "biliti", "iviti", "tional", "ational", "alism", "ation",
            "ization", "izer", "ator", "iveness", "fulness", "ousness", "ogist",
        ];
        let Some(suffix) = self.longest(&SUFFIXES) else {
            return;
        };
        let start = self.len() - suffix.len();
        if start < self.p1 {
            return;
        }
        let with = match suffix {
            "tional" => "tion",
            "enci" => "ence",
            "anci" => "ance",
            "abli" => "able",
            "entli" => "ent",
            "izer" | "ization" => "ize",
            "ational" | "ation" | "ator" => "ate",
            "alli" | "aliti" | "alism" => "al",
            "fulli" | "fulness" => "ful",
            "ousli" | "ousness" => "ous",
            "iveness" | "iviti" => "ive",
            "biliti" | "bli" => "ble",
            "ogist" => "og",
            "ogi" => {
                if start == 0 || self.chars[start - 1] != b'l' {
                    return;
                }
                "og"
            }
            "lessli" => "less",
            "li" => {
                if start == 0 || !is_valid_li(self.chars[start - 1]) {
                    return;
                }
                ""
            }
            _ => unreachable!(),
        };
        self.replace(suffix.len(), with);
    }

    fn step3(&mut self) {
        const SUFFIXES: [&str; 9] =
            ["icate", "ative", "alize", "iciti", "ical", "tional", "ational", "ful", "ness"];
        let Some(suffix) = self.longest(&SUFFIXES) else {
            return;
        };
        let start = self.len() - suffix.len();
        if start < self.p1 {
            return;
        }
        let with = match suffix {
            "tional" => "tion",
            "ational" => "ate",
            "alize" => "al",
            "icate" | "iciti" | "ical" => "ic",
            "ful" | "ness" => "",
            "ative" => {
                if start < self.p2 {
                    return;
                }
                ""
            }
            _ => unreachable!(),
        };
        self.replace(suffix.len(), with);
    }

    fn step4(&mut self) {
        const SUFFIXES: [&str; 18] = [
            "ic", "ance", "ence", "able", "ible", "ate", "ive", "ize", "iti", "al", "ism", "ion",
            "er", "ous", "ant", "ent", "ment", "ement",
        ];
        let Some(suffix) = self.longest(&SUFFIXES) else {
            return;
        };
        let start = self.len() - suffix.len();
        if start < self.p2 {
            return;
        }
        if suffix == "ion" && (start == 0 || !matches!(self.chars[start - 1], b's' | b't')) {
            return;
        }
        self.replace(suffix.len(), "");
    }

    fn step5(&mut self) {
        let n = self.len();
        match self.chars.last() {
            Some(b'e') => {
                let start = n - 1;
                if start >= self.p2 || (start >= self.p1 && !self.short_syllable(start)) {
                    self.chars.pop();
                }
            }
            Some(b'l') if n > self.p2 && n >= 2 && self.chars[n - 2] == b'l' => {
                self.chars.pop();
            }
            _ => {}
        }
    }
}
