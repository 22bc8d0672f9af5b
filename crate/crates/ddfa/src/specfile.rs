//! JSON form of a quasi-k-regularity spec.
//!
//! ```json
//! { "base": 2, "exponentBound": 0, "start": 0,
//!   "menus": [ { "level": [1, 0],
//!                "options": [ { "constant": 0, "terms": [[0, 0, 1]] },
//!                             { "constant": 1, "terms": [[0, 0, -1]] } ] } ] }
//! ```
//!
//! A term `[f, b, c]` stands for `c · s(k^f n + b)`.

use ddfa_core::regularity::{
    AffineCombination, Level, QuasiRegularitySpec, RegularityError, RelationMenu, RelationTerm,
};
use serde::{Deserialize, Serialize};

use crate::document::DocumentError;

#[derive(Debug, thiserror::Error)]
pub enum SpecFileError {
    #[error(transparent)]
    Parse(#[from] DocumentError),
    #[error("menu for level ({0}, {1}) given twice")]
    DuplicateLevel(u32, u64),
    #[error("invalid spec: {0}")]
    Invalid(#[from] RegularityError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionFile {
    #[serde(default)]
    pub constant: i64,
    #[serde(default)]
    pub terms: Vec<(u32, u64, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MenuFile {
    pub level: (u32, u64),
    pub options: Vec<OptionFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct SpecFile {
    pub base: u64,
    pub exponent_bound: u32,
    pub start: u64,
    pub menus: Vec<MenuFile>,
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self, SpecFileError> {
        serde_json::from_str(text).map_err(|e| SpecFileError::Parse(e.into()))
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("specs always serialize");
        text.push('\n');
        text
    }

    pub fn to_spec(&self) -> Result<QuasiRegularitySpec, SpecFileError> {
        let mut spec = QuasiRegularitySpec::new(self.base, self.exponent_bound, self.start);
        for menu in &self.menus {
            let level = Level::new(menu.level.0, menu.level.1);
            if spec.menus.contains_key(&level) {
                return Err(SpecFileError::DuplicateLevel(level.exponent, level.residue));
            }
            let options = menu
                .options
                .iter()
                .map(|o| {
                    AffineCombination::new(
                        o.constant,
                        o.terms.iter().map(|&(f, b, c)| RelationTerm::new(f, b, c)).collect(),
                    )
                })
                .collect();
            spec = spec.with_menu(RelationMenu::new(level, options));
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_spec(spec: &QuasiRegularitySpec) -> Self {
        SpecFile {
            base: spec.base,
            exponent_bound: spec.exponent_bound,
            start: spec.start,
            menus: spec
                .menus
                .values()
                .map(|m| MenuFile {
                    level: (m.level.exponent, m.level.residue),
                    options: m
                        .options
                        .iter()
                        .map(|o| OptionFile {
                            constant: o.constant,
                            terms: o.terms.iter().map(|t| (t.exponent, t.offset, t.coeff)).collect(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

pub fn load_spec(text: &str) -> Result<QuasiRegularitySpec, SpecFileError> {
    SpecFile::parse(text)?.to_spec()
}
