//! Suffix-stripping stemmers. Each stemmer only rewrites tokens made of
//! ASCII lowercase letters; anything else passes through unchanged.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub mod lancaster;
pub mod porter;
pub mod snowball;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StemAlgorithm {
    Porter,
    Snowball,
    Lancaster,
}

impl StemAlgorithm {
    pub const ALL: [StemAlgorithm; 3] =
        [StemAlgorithm::Porter, StemAlgorithm::Snowball, StemAlgorithm::Lancaster];

    pub fn stem(self, word: &str) -> String {
        match self {
            StemAlgorithm::Porter => porter::stem(word),
            StemAlgorithm::Snowball => snowball::stem(word),
            StemAlgorithm::Lancaster => lancaster::stem(word),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StemAlgorithm::Porter => "porter",
            StemAlgorithm::Snowball => "snowball",
            StemAlgorithm::Lancaster => "lancaster",
        }
    }
}

impl fmt::Display for StemAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StemAlgorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "porter" => Ok(StemAlgorithm::Porter),
            "snowball" | "porter2" | "english" => Ok(StemAlgorithm::Snowball),
            "lancaster" | "paice" | "paice-husk" => Ok(StemAlgorithm::Lancaster),
            other => Err(format!("unknown stemmer `{other}`")),
        }
    }
}
