//! JSON documents describing one automaton.
//!
//! ```json
//! {
//!   "kind": "ddfa",
//!   "states": ["q0", "q1"],
//!   "alphabet": ["0", "1"],
//!   "start": "q0",
//!   "accepting": ["q0"],
//!   "transitions": [{ "from": "q0", "symbol": "0", "to": "q0" }, ...],
//!   "discharge": [
//!     { "state": "q0", "current": { "0": "1/2", "1": "1/2" },
//!       "notCurrent": { "0": { "1": "1/2" }, "1": { "0": "1/2" } } }, ...
//!   ]
//! }
//! ```
//!
//! `notCurrent` is keyed by the symbol being read and then by the symbol whose
//! edge receives the weight. `output` (for `dfao`/`ddfao`) and the optional
//! `valuation` map state names to rationals.

use std::fmt;

use ddfa_core::automaton::{Automaton, AutomatonBuilder, Dfa, Dfao, Machine, StateId};
use ddfa_core::discharge::{Ddfa, Ddfao, DischargeRuleSet, Discharging, StateValuation};
use ddfa_core::{Ratio, ValidationReport};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::rational::{RationalError, RationalLiteral};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DocumentError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("malformed document at line {line}, column {column}: {message}")]
    Schema { line: usize, column: usize, message: String },
    #[error("{context}: {source}")]
    Rational { context: String, source: RationalError },
    #[error("field `{field}` is not allowed for kind `{kind}`")]
    UnexpectedField { field: &'static str, kind: Kind },
    #[error("field `{field}` is required for kind `{kind}`")]
    MissingField { field: &'static str, kind: Kind },
    #[error("{what} `{name}` is not declared")]
    UnknownName { what: &'static str, name: String },
    #[error("discharge rules for state `{0}` given twice")]
    DuplicateRules(String),
    #[error("not-current weight from symbol `{0}` to itself; use `current` instead")]
    SelfNotCurrent(String),
    #[error("{0}")]
    Invalid(ValidationReport),
}

impl From<serde_json::Error> for DocumentError {
    fn from(e: serde_json::Error) -> Self {
        use serde_json::error::Category;
        let (line, column) = (e.line(), e.column());
        let mut message = e.to_string();
        // serde_json appends its own position; ours is in the variant
        if let Some(i) = message.rfind(" at line ") {
            message.truncate(i);
        }
        match e.classify() {
            Category::Data => DocumentError::Schema { line, column, message },
            _ => DocumentError::Syntax { line, column, message },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Dfa,
    Dfao,
    Ddfa,
    Ddfao,
}

impl Kind {
    fn has_output(self) -> bool {
        matches!(self, Kind::Dfao | Kind::Ddfao)
    }

    fn discharges(self) -> bool {
        matches!(self, Kind::Ddfa | Kind::Ddfao)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Dfa => "dfa",
            Kind::Dfao => "dfao",
            Kind::Ddfa => "ddfa",
            Kind::Ddfao => "ddfao",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transition {
    pub from: String,
    pub symbol: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct DischargeEntry {
    pub state: String,
    pub current: IndexMap<String, RationalLiteral>,
    #[serde(default)]
    pub not_current: IndexMap<String, IndexMap<String, RationalLiteral>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonDocument {
    pub kind: Kind,
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub start: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepting: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<IndexMap<String, RationalLiteral>>,
    pub transitions: Vec<Transition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discharge: Option<Vec<DischargeEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valuation: Option<IndexMap<String, RationalLiteral>>,
}

/// A validated automaton of any of the four kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadedAutomaton {
    Dfa(Dfa),
    Dfao(Dfao),
    Ddfa(Ddfa),
    Ddfao(Ddfao),
}

/// A built document: the automaton and its optional state valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Loaded {
    pub automaton: LoadedAutomaton,
    pub valuation: Option<StateValuation>,
}

impl Loaded {
    pub fn kind(&self) -> Kind {
        match self.automaton {
            LoadedAutomaton::Dfa(_) => Kind::Dfa,
            LoadedAutomaton::Dfao(_) => Kind::Dfao,
            LoadedAutomaton::Ddfa(_) => Kind::Ddfa,
            LoadedAutomaton::Ddfao(_) => Kind::Ddfao,
        }
    }

    pub fn as_automaton(&self) -> &dyn Automaton {
        match &self.automaton {
            LoadedAutomaton::Dfa(a) => a,
            LoadedAutomaton::Dfao(a) => a,
            LoadedAutomaton::Ddfa(a) => a,
            LoadedAutomaton::Ddfao(a) => a,
        }
    }

    pub fn machine(&self) -> &Machine {
        self.as_automaton().machine()
    }

    pub fn discharging(&self) -> Option<&dyn Discharging> {
        match &self.automaton {
            LoadedAutomaton::Ddfa(a) => Some(a),
            LoadedAutomaton::Ddfao(a) => Some(a),
            _ => None,
        }
    }

    /// The document valuation, or the state where every state has no value.
    pub fn valuation_or_none(&self) -> StateValuation {
        self.valuation.clone().unwrap_or_else(|| StateValuation::none(self.machine().num_states()))
    }

    pub fn to_document(&self) -> AutomatonDocument {
        AutomatonDocument::from_automaton(self.as_automaton(), self.valuation.as_ref())
    }
}

/// Strict parse: unknown fields and malformed JSON are rejected with a position.
pub fn parse_document(text: &str) -> Result<AutomatonDocument, DocumentError> {
    Ok(serde_json::from_str(text)?)
}

/// Parses and builds in one go.
pub fn load_document(text: &str) -> Result<Loaded, DocumentError> {
    parse_document(text)?.build()
}

fn rational(literal: &RationalLiteral, context: impl FnOnce() -> String) -> Result<Ratio, DocumentError> {
    literal.value().map_err(|source| DocumentError::Rational { context: context(), source })
}

impl AutomatonDocument {
    /// Canonical pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("documents always serialize");
        text.push('\n');
        text
    }

    fn check_fields(&self) -> Result<(), DocumentError> {
        let kind = self.kind;
        let rules = [
            ("accepting", self.accepting.is_some(), !kind.has_output()),
            ("output", self.output.is_some(), kind.has_output()),
            ("discharge", self.discharge.is_some(), kind.discharges()),
        ];
        for (field, present, expected) in rules {
            if present && !expected {
                return Err(DocumentError::UnexpectedField { field, kind });
            }
            // accepting may be left out (no accepting states); the rest may not
            if !present && expected && field != "accepting" {
                return Err(DocumentError::MissingField { field, kind });
            }
        }
        Ok(())
    }

    fn builder(&self) -> Result<AutomatonBuilder, DocumentError> {
        let mut b = AutomatonBuilder::new()
            .states(self.states.iter().cloned())
            .alphabet(self.alphabet.iter().cloned())
            .start(self.start.clone());
        for t in &self.transitions {
            b = b.transition(t.from.clone(), t.symbol.clone(), t.to.clone());
        }
        if let Some(accepting) = &self.accepting {
            b = b.accepting(accepting.iter().cloned());
        }
        if let Some(output) = &self.output {
            for (state, value) in output {
                let value = rational(value, || format!("output of state `{state}`"))?;
                b = b.output(state.clone(), value);
            }
        }
        Ok(b)
    }

    fn rules(&self, machine: &Machine) -> Result<DischargeRuleSet, DocumentError> {
        let mut rules = DischargeRuleSet::zeros(machine.num_states(), machine.num_symbols());
        let mut seen = vec![false; machine.num_states()];
        let state = |name: &str| {
            machine.state(name).map_err(|_| DocumentError::UnknownName { what: "state", name: name.to_string() })
        };
        let symbol = |name: &str| {
            machine
                .alphabet()
                .iter()
                .position(|s| s.as_str() == name)
                .ok_or_else(|| DocumentError::UnknownName { what: "symbol", name: name.to_string() })
        };
        for entry in self.discharge.iter().flatten() {
            let q = state(&entry.state)?;
            if std::mem::replace(&mut seen[q.0], true) {
                return Err(DocumentError::DuplicateRules(entry.state.clone()));
            }
            for (s_name, w) in &entry.current {
                let s = symbol(s_name)?;
                let w = rational(w, || format!("current weight of `{}` on `{s_name}`", entry.state))?;
                rules.set_current(q, s, w).expect("indices checked");
            }
            for (s_name, targets) in &entry.not_current {
                let s = symbol(s_name)?;
                for (t_name, w) in targets {
                    let t = symbol(t_name)?;
                    if s == t {
                        return Err(DocumentError::SelfNotCurrent(s_name.clone()));
                    }
                    let w = rational(w, || {
                        format!("not-current weight of `{}` on `{s_name}` towards `{t_name}`", entry.state)
                    })?;
                    rules.set_not_current(q, s, t, w).expect("indices checked");
                }
            }
        }
        Ok(rules)
    }

    fn valuation_for(&self, machine: &Machine) -> Result<Option<StateValuation>, DocumentError> {
        let Some(map) = &self.valuation else { return Ok(None) };
        let mut valuation = StateValuation::none(machine.num_states());
        for (name, value) in map {
            let q = machine
                .state(name)
                .map_err(|_| DocumentError::UnknownName { what: "valuation state", name: name.clone() })?;
            valuation.set(q, rational(value, || format!("valuation of state `{name}`"))?);
        }
        Ok(Some(valuation))
    }

    /// Checks the document against its declared kind and builds the automaton.
    pub fn build(&self) -> Result<Loaded, DocumentError> {
        self.check_fields()?;
        let builder = self.builder()?;
        let automaton = if self.kind.has_output() {
            let dfao = builder.build_dfao().map_err(DocumentError::Invalid)?;
            if self.kind.discharges() {
                let rules = self.rules(dfao.machine())?;
                LoadedAutomaton::Ddfao(Ddfao::new(dfao, rules).map_err(DocumentError::Invalid)?)
            } else {
                LoadedAutomaton::Dfao(dfao)
            }
        } else {
            let dfa = builder.build_dfa().map_err(DocumentError::Invalid)?;
            if self.kind.discharges() {
                let rules = self.rules(dfa.machine())?;
                LoadedAutomaton::Ddfa(Ddfa::new(dfa, rules).map_err(DocumentError::Invalid)?)
            } else {
                LoadedAutomaton::Dfa(dfa)
            }
        };
        let valuation = match &automaton {
            LoadedAutomaton::Dfa(a) => self.valuation_for(a.machine())?,
            LoadedAutomaton::Dfao(a) => self.valuation_for(a.machine())?,
            LoadedAutomaton::Ddfa(a) => self.valuation_for(a.machine())?,
            LoadedAutomaton::Ddfao(a) => self.valuation_for(a.machine())?,
        };
        Ok(Loaded { automaton, valuation })
    }

    /// Describes an automaton in canonical order: states, then alphabet.
    pub fn from_automaton<A: Automaton + ?Sized>(automaton: &A, valuation: Option<&StateValuation>) -> Self {
        let m = automaton.machine();
        let name = |q: StateId| m.state_name(q).to_string();
        let sym = |s: usize| m.alphabet()[s].as_str().to_string();
        let states: Vec<StateId> = (0..m.num_states()).map(StateId).collect();
        let kind = match (automaton.outputs().is_some(), automaton.discharge_rules().is_some()) {
            (false, false) => Kind::Dfa,
            (true, false) => Kind::Dfao,
            (false, true) => Kind::Ddfa,
            (true, true) => Kind::Ddfao,
        };
        let transitions = states
            .iter()
            .flat_map(|&q| (0..m.num_symbols()).map(move |s| (q, s)))
            .map(|(q, s)| Transition { from: name(q), symbol: sym(s), to: name(m.step(q, s)) })
            .collect();
        let discharge = automaton.discharge_rules().map(|rules| {
            states
                .iter()
                .map(|&q| DischargeEntry {
                    state: name(q),
                    current: (0..m.num_symbols()).map(|s| (sym(s), rules.current(q, s).into())).collect(),
                    not_current: (0..m.num_symbols())
                        .map(|s| {
                            let targets = (0..m.num_symbols())
                                .filter(|&t| t != s)
                                .map(|t| (sym(t), rules.not_current(q, s, t).into()))
                                .collect();
                            (sym(s), targets)
                        })
                        .collect(),
                })
                .collect()
        });
        AutomatonDocument {
            kind,
            states: states.iter().map(|&q| name(q)).collect(),
            alphabet: (0..m.num_symbols()).map(sym).collect(),
            start: name(m.start()),
            accepting: automaton.accepting().map(|f| f.iter().map(|&q| name(q)).collect()),
            output: automaton
                .outputs()
                .map(|out| states.iter().map(|&q| (name(q), (&out[q.0]).into())).collect()),
            transitions,
            discharge,
            valuation: valuation.map(|v| {
                states.iter().filter_map(|&q| v.get(q).map(|value| (name(q), value.into()))).collect()
            }),
        }
    }
}
