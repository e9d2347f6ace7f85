use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifies the language and domain a resource belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LangDomainTag {
    language: String,
    domain: String,
}

impl LangDomainTag {
    /// Language must be 2-3 lowercase ASCII letters, optionally followed by a
    /// `-`/`_` suffix (e.g. `eng`, `de`, `cmn_hans`).
    pub fn new(language: &str, domain: &str) -> Result<Self> {
        let (code, suffix) = match language.find(['-', '_']) {
            Some(idx) => (&language[..idx], Some(&language[idx + 1..])),
            None => (language, None),
        };
        let code_ok = (2..=3).contains(&code.len()) && code.bytes().all(|b| b.is_ascii_lowercase());
        let suffix_ok = suffix.is_none_or(|s| {
            !s.is_empty()
                && s.bytes()
                    .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit())
        });
        if !code_ok || !suffix_ok {
            return Err(Error::InvalidParameter(format!(
                "language code {language:?} is not a 2-3 letter lowercase code"
            )));
        }
        if domain.is_empty() {
            return Err(Error::InvalidParameter("domain must be non-empty".into()));
        }
        Ok(Self {
            language: language.to_string(),
            domain: domain.to_string(),
        })
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn domain(&self) -> &str {
        &self.domain
    }
}

impl fmt::Display for LangDomainTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.language, self.domain)
    }
}

/// Parses `lang:domain`.
impl FromStr for LangDomainTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (lang, domain) = s.split_once(':').ok_or_else(|| {
            Error::InvalidParameter(format!("tag {s:?} is not of the form lang:domain"))
        })?;
        LangDomainTag::new(lang, domain)
    }
}
