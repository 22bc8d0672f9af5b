//! Exact rationals in documents: `"p/q"` strings or integer literals.

use std::fmt;

use ddfa_core::Ratio;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational `{text}`: {reason}")]
pub struct RationalError {
    pub text: String,
    pub reason: &'static str,
}

pub fn parse_rational(text: &str) -> Result<Ratio, RationalError> {
    let err = |reason| RationalError { text: text.to_string(), reason };
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(err("empty"));
    }
    if let Some((_, d)) = trimmed.split_once('/') {
        if d.trim().chars().all(|c| c == '0') && !d.trim().is_empty() {
            return Err(err("zero denominator"));
        }
    }
    trimmed.parse::<Ratio>().map_err(|_| err("expected an integer or p/q"))
}

/// Lowest terms, `p` for integers.
pub fn format_rational(value: &Ratio) -> String {
    value.to_string()
}

/// A rational as it appears in JSON before it is checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalLiteral {
    Integer(i64),
    Text(String),
}

impl RationalLiteral {
    pub fn value(&self) -> Result<Ratio, RationalError> {
        match self {
            RationalLiteral::Integer(i) => Ok(Ratio::from_integer((*i).into())),
            RationalLiteral::Text(t) => parse_rational(t),
        }
    }
}

impl From<&Ratio> for RationalLiteral {
    fn from(value: &Ratio) -> Self {
        RationalLiteral::Text(format_rational(value))
    }
}

impl fmt::Display for RationalLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RationalLiteral::Integer(i) => write!(f, "{i}"),
            RationalLiteral::Text(t) => f.write_str(t),
        }
    }
}
