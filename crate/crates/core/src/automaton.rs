//! Classical automata: DFA and DFA with output.
//!
//! States and symbols are addressed by position. The order in which states are
//! declared fixes their index, and the index is what every other module uses
//! to address charge entries.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use num_traits::{One, Zero};

use crate::discharge::DischargeRuleSet;
use crate::Ratio;

/// Errors raised while running an automaton or encoding a number.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AutomatonError {
    #[error("symbol `{0}` is not in the alphabet")]
    UnknownSymbol(String),
    #[error("state `{0}` is not a state of the automaton")]
    UnknownState(String),
    #[error("state index {0} is out of range")]
    StateOutOfRange(usize),
    #[error("base must be at least 2, got {0}")]
    InvalidBase(u64),
    #[error("symbol `{symbol}` is not a digit in base {base}")]
    NotADigit { symbol: String, base: u64 },
    #[error("value does not fit in 64 bits")]
    Overflow,
}

/// One letter of an input alphabet. Labels are text so that digits of bases
/// above ten stay representable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(label: impl Into<String>) -> Self {
        Symbol(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(label: &str) -> Self {
        Symbol::new(label)
    }
}

/// Position of a state in the declared state list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A finite word, read left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    /// Parses a word from text.
    ///
    /// Text containing whitespace or commas is split into tokens; otherwise
    /// every character is one symbol. The empty string and `ε` denote the
    /// empty word.
    pub fn parse(text: &str) -> Self {
        let text = text.trim();
        if text.is_empty() || text == "ε" {
            return Word::empty();
        }
        if text.contains(|c: char| c.is_whitespace() || c == ',') {
            Word(
                text.split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|t| !t.is_empty())
                    .map(Symbol::new)
                    .collect(),
            )
        } else {
            Word(text.chars().map(|c| Symbol::new(c.to_string())).collect())
        }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The first `len` symbols.
    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut symbols = self.0.clone();
        symbols.extend(other.0.iter().cloned());
        Word(symbols)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let sep = if self.0.iter().all(|s| s.0.chars().count() == 1) { "" } else { " " };
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            f.write_str(&s.0)?;
        }
        Ok(())
    }
}

/// Most-significant-digit-first expansion of `n` in base `k`.
///
/// Digit `d` is the symbol labelled by the decimal text of `d`, and zero is
/// the one-symbol word `0`.
pub fn base_k_word(n: u64, k: u64) -> Result<Word, AutomatonError> {
    if k < 2 {
        return Err(AutomatonError::InvalidBase(k));
    }
    if n == 0 {
        return Ok(Word(vec![Symbol::new("0")]));
    }
    let mut digits = Vec::new();
    let mut rest = n;
    while rest > 0 {
        digits.push(rest % k);
        rest /= k;
    }
    Ok(Word(digits.iter().rev().map(|d| Symbol::new(d.to_string())).collect()))
}

/// Reads a word of digit symbols as a base-`k` number.
pub fn digits_value(word: &Word, k: u64) -> Result<u64, AutomatonError> {
    if k < 2 {
        return Err(AutomatonError::InvalidBase(k));
    }
    word.symbols().iter().try_fold(0u64, |acc, s| {
        let digit = s
            .as_str()
            .parse::<u64>()
            .ok()
            .filter(|d| *d < k)
            .ok_or_else(|| AutomatonError::NotADigit { symbol: s.0.clone(), base: k })?;
        acc.checked_mul(k)
            .and_then(|v| v.checked_add(digit))
            .ok_or(AutomatonError::Overflow)
    })
}

/// State set, alphabet, total transition table and start state shared by
/// every automaton kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Machine {
    states: Vec<String>,
    alphabet: Vec<Symbol>,
    // row-major: table[q * |Σ| + a]
    table: Vec<StateId>,
    start: StateId,
}

impl Machine {
    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.alphabet.len()
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.0]
    }

    pub fn state(&self, name: &str) -> Result<StateId, AutomatonError> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(StateId)
            .ok_or_else(|| AutomatonError::UnknownState(name.into()))
    }

    pub fn symbol_index(&self, symbol: &Symbol) -> Result<usize, AutomatonError> {
        self.alphabet
            .iter()
            .position(|s| s == symbol)
            .ok_or_else(|| AutomatonError::UnknownSymbol(symbol.0.clone()))
    }

    /// Resolves every symbol of `word` to its alphabet index.
    pub fn encode(&self, word: &Word) -> Result<Vec<usize>, AutomatonError> {
        word.symbols().iter().map(|s| self.symbol_index(s)).collect()
    }

    pub(crate) fn check_state(&self, q: StateId) -> Result<(), AutomatonError> {
        if q.0 < self.states.len() {
            Ok(())
        } else {
            Err(AutomatonError::StateOutOfRange(q.0))
        }
    }

    /// One transition, by symbol index.
    pub fn step(&self, q: StateId, symbol: usize) -> StateId {
        self.table[q.0 * self.alphabet.len() + symbol]
    }

    /// `δ(q, w)` extended to words; the empty word leaves `q` unchanged.
    pub fn delta_star(&self, q: StateId, word: &Word) -> Result<StateId, AutomatonError> {
        self.check_state(q)?;
        let encoded = self.encode(word)?;
        Ok(self.run_encoded(q, &encoded))
    }

    pub fn run_encoded(&self, q: StateId, word: &[usize]) -> StateId {
        word.iter().fold(q, |state, &a| self.step(state, a))
    }

    /// The subset of states reachable from `q` in one step, with the symbol
    /// indices leading there.
    pub fn successors(&self, q: StateId) -> impl Iterator<Item = (usize, StateId)> + '_ {
        (0..self.alphabet.len()).map(move |a| (a, self.step(q, a)))
    }
}

/// Common surface of the four automaton kinds.
pub trait Automaton {
    fn machine(&self) -> &Machine;

    fn accepting(&self) -> Option<&[StateId]> {
        None
    }

    fn outputs(&self) -> Option<&[Ratio]> {
        None
    }

    fn discharge_rules(&self) -> Option<&DischargeRuleSet> {
        None
    }

    fn delta_star(&self, q: StateId, word: &Word) -> Result<StateId, AutomatonError> {
        self.machine().delta_star(q, word)
    }
}

/// Deterministic finite automaton `(Q, Σ, δ, q0, F)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    machine: Machine,
    accepting: Vec<StateId>,
}

impl Dfa {
    pub fn accepting_states(&self) -> &[StateId] {
        &self.accepting
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting.contains(&q)
    }

    pub fn accepts(&self, word: &Word) -> Result<bool, AutomatonError> {
        let end = self.machine.delta_star(self.machine.start, word)?;
        Ok(self.is_accepting(end))
    }

    /// A DFA is valid by construction; the report is always empty.
    pub fn validate(&self) -> ValidationReport {
        ValidationReport::default()
    }
}

impl Automaton for Dfa {
    fn machine(&self) -> &Machine {
        &self.machine
    }

    fn accepting(&self) -> Option<&[StateId]> {
        Some(&self.accepting)
    }
}

/// Deterministic finite automaton with output `(Q, Σ, δ, q0, Δ, τ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfao {
    machine: Machine,
    output: Vec<Ratio>,
}

impl Dfao {
    /// `τ(q)`.
    pub fn output_of(&self, q: StateId) -> &Ratio {
        &self.output[q.0]
    }

    /// The output alphabet `Δ`: the distinct values of `τ`, ascending.
    pub fn output_alphabet(&self) -> Vec<Ratio> {
        self.output.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// `τ(δ(q0, w))`.
    pub fn output(&self, word: &Word) -> Result<Ratio, AutomatonError> {
        let end = self.machine.delta_star(self.machine.start, word)?;
        Ok(self.output[end.0].clone())
    }

    pub fn validate(&self) -> ValidationReport {
        ValidationReport::default()
    }

    /// Same automaton with every output replaced by `value`.
    pub fn with_constant_output(&self, value: Ratio) -> Dfao {
        Dfao { machine: self.machine.clone(), output: vec![value; self.machine.num_states()] }
    }
}

impl Automaton for Dfao {
    fn machine(&self) -> &Machine {
        &self.machine
    }

    fn outputs(&self) -> Option<&[Ratio]> {
        Some(&self.output)
    }
}

/// A single failed well-formedness condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoStates,
    EmptyAlphabet,
    DuplicateState(String),
    EmptySymbol,
    DuplicateSymbol(String),
    UnknownStart(String),
    UnknownState(String),
    UnknownSymbol(String),
    MissingTransition { state: String, symbol: String },
    ConflictingTransition { state: String, symbol: String },
    UnknownAccepting(String),
    MissingOutput(String),
    DuplicateOutput(String),
    UnknownOutputState(String),
    NegativeWeight { state: String, current: String, symbol: String, weight: Ratio },
    WeightSum { state: String, symbol: String, sum: Ratio },
    RuleShape { expected_states: usize, expected_symbols: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NoStates => f.write_str("state set is empty"),
            EmptyAlphabet => f.write_str("alphabet is empty"),
            DuplicateState(q) => write!(f, "duplicate state `{q}`"),
            EmptySymbol => f.write_str("empty symbol label"),
            DuplicateSymbol(s) => write!(f, "duplicate symbol `{s}`"),
            UnknownStart(q) => write!(f, "start state `{q}` is not a state"),
            UnknownState(q) => write!(f, "transition mentions unknown state `{q}`"),
            UnknownSymbol(s) => write!(f, "transition mentions unknown symbol `{s}`"),
            MissingTransition { state, symbol } => {
                write!(f, "missing transition from `{state}` on `{symbol}`")
            }
            ConflictingTransition { state, symbol } => {
                write!(f, "conflicting transitions from `{state}` on `{symbol}`")
            }
            UnknownAccepting(q) => write!(f, "accepting state `{q}` is not a state"),
            MissingOutput(q) => write!(f, "missing output for state `{q}`"),
            DuplicateOutput(q) => write!(f, "output for state `{q}` given twice"),
            UnknownOutputState(q) => write!(f, "output given for unknown state `{q}`"),
            NegativeWeight { state, current, symbol, weight } => write!(
                f,
                "negative weight {weight} at state `{state}` (current `{current}`, symbol `{symbol}`)"
            ),
            WeightSum { state, symbol, sum } => write!(
                f,
                "weights at state `{state}` for current symbol `{symbol}` sum to {sum}, \
                 but current and not-current weights must sum to 1"
            ),
            RuleShape { expected_states, expected_symbols } => write!(
                f,
                "rule set does not cover {expected_states} states x {expected_symbols} symbols"
            ),
        }
    }
}

/// Outcome of a validation pass. Valid iff no violation was recorded.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub(crate) fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return f.write_str("valid");
        }
        write!(f, "invalid ({} violation", self.violations.len())?;
        if self.violations.len() != 1 {
            f.write_str("s")?;
        }
        f.write_str(")")?;
        for v in &self.violations {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

/// Collects an automaton description by name and checks it before building.
#[derive(Debug, Clone, Default)]
pub struct AutomatonBuilder {
    states: Vec<String>,
    alphabet: Vec<String>,
    start: Option<String>,
    transitions: Vec<(String, String, String)>,
    accepting: Vec<String>,
    output: Vec<(String, Ratio)>,
}

impl AutomatonBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn states<I, S>(mut self, states: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.states = states.into_iter().map(Into::into).collect();
        self
    }

    pub fn alphabet<I, S>(mut self, alphabet: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.alphabet = alphabet.into_iter().map(Into::into).collect();
        self
    }

    pub fn start(mut self, state: impl Into<String>) -> Self {
        self.start = Some(state.into());
        self
    }

    pub fn transition(
        mut self,
        from: impl Into<String>,
        symbol: impl Into<String>,
        to: impl Into<String>,
    ) -> Self {
        self.transitions.push((from.into(), symbol.into(), to.into()));
        self
    }

    pub fn accepting<I, S>(mut self, states: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.accepting = states.into_iter().map(Into::into).collect();
        self
    }

    pub fn output(mut self, state: impl Into<String>, value: Ratio) -> Self {
        self.output.push((state.into(), value));
        self
    }

    /// Checks the shared part: states, alphabet, start state and totality of
    /// the transition table.
    fn check_machine(&self) -> (ValidationReport, Option<Machine>) {
        let mut report = ValidationReport::default();
        if self.states.is_empty() {
            report.push(Violation::NoStates);
        }
        if self.alphabet.is_empty() {
            report.push(Violation::EmptyAlphabet);
        }
        let mut seen = BTreeSet::new();
        for q in &self.states {
            if !seen.insert(q.as_str()) {
                report.push(Violation::DuplicateState(q.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for s in &self.alphabet {
            if s.is_empty() {
                report.push(Violation::EmptySymbol);
            } else if !seen.insert(s.as_str()) {
                report.push(Violation::DuplicateSymbol(s.clone()));
            }
        }
        let state_of = |name: &str| self.states.iter().position(|q| q == name);
        let symbol_of = |name: &str| self.alphabet.iter().position(|s| s == name);
        let start = match &self.start {
            Some(name) => {
                let idx = state_of(name);
                if idx.is_none() {
                    report.push(Violation::UnknownStart(name.clone()));
                }
                idx
            }
            None => {
                report.push(Violation::UnknownStart(String::new()));
                None
            }
        };

        let width = self.alphabet.len();
        let mut table: Vec<Option<usize>> = vec![None; self.states.len() * width];
        for (from, symbol, to) in &self.transitions {
            let (f, s, t) = (state_of(from), symbol_of(symbol), state_of(to));
            if f.is_none() {
                report.push(Violation::UnknownState(from.clone()));
            }
            if t.is_none() {
                report.push(Violation::UnknownState(to.clone()));
            }
            if s.is_none() {
                report.push(Violation::UnknownSymbol(symbol.clone()));
            }
            if let (Some(f), Some(s), Some(t)) = (f, s, t) {
                let slot = &mut table[f * width + s];
                match slot {
                    Some(existing) if *existing != t => {
                        report.push(Violation::ConflictingTransition {
                            state: from.clone(),
                            symbol: symbol.clone(),
                        });
                    }
                    _ => *slot = Some(t),
                }
            }
        }
        for (q, name) in self.states.iter().enumerate() {
            for (a, symbol) in self.alphabet.iter().enumerate() {
                if table[q * width + a].is_none() {
                    report.push(Violation::MissingTransition {
                        state: name.clone(),
                        symbol: symbol.clone(),
                    });
                }
            }
        }

        let machine = match (report.is_valid(), start) {
            (true, Some(start)) => Some(Machine {
                states: self.states.clone(),
                alphabet: self.alphabet.iter().map(|s| Symbol::new(s.as_str())).collect(),
                table: table.into_iter().map(|t| StateId(t.unwrap_or(0))).collect(),
                start: StateId(start),
            }),
            _ => None,
        };
        (report, machine)
    }

    pub fn validate_dfa(&self) -> ValidationReport {
        self.check_dfa().0
    }

    pub fn validate_dfao(&self) -> ValidationReport {
        self.check_dfao().0
    }

    fn check_dfa(&self) -> (ValidationReport, Option<Dfa>) {
        let (mut report, machine) = self.check_machine();
        let mut accepting = Vec::new();
        for name in &self.accepting {
            match self.states.iter().position(|q| q == name) {
                Some(i) => {
                    if !accepting.contains(&StateId(i)) {
                        accepting.push(StateId(i));
                    }
                }
                None => report.push(Violation::UnknownAccepting(name.clone())),
            }
        }
        accepting.sort();
        let dfa = match (report.is_valid(), machine) {
            (true, Some(machine)) => Some(Dfa { machine, accepting }),
            _ => None,
        };
        (report, dfa)
    }

    fn check_dfao(&self) -> (ValidationReport, Option<Dfao>) {
        let (mut report, machine) = self.check_machine();
        let mut output: Vec<Option<Ratio>> = vec![None; self.states.len()];
        for (name, value) in &self.output {
            match self.states.iter().position(|q| q == name) {
                Some(i) if output[i].is_some() => {
                    report.push(Violation::DuplicateOutput(name.clone()))
                }
                Some(i) => output[i] = Some(value.clone()),
                None => report.push(Violation::UnknownOutputState(name.clone())),
            }
        }
        for (name, value) in self.states.iter().zip(&output) {
            if value.is_none() {
                report.push(Violation::MissingOutput(name.clone()));
            }
        }
        let dfao = match (report.is_valid(), machine) {
            (true, Some(machine)) => Some(Dfao {
                machine,
                output: output.into_iter().map(|o| o.unwrap_or_else(Ratio::zero)).collect(),
            }),
            _ => None,
        };
        (report, dfao)
    }

    pub fn build_dfa(&self) -> Result<Dfa, ValidationReport> {
        match self.check_dfa() {
            (_, Some(dfa)) => Ok(dfa),
            (report, None) => Err(report),
        }
    }

    pub fn build_dfao(&self) -> Result<Dfao, ValidationReport> {
        match self.check_dfao() {
            (_, Some(dfao)) => Ok(dfao),
            (report, None) => Err(report),
        }
    }
}

fn thue_morse_builder() -> AutomatonBuilder {
    AutomatonBuilder::new()
        .states(["q0", "q1"])
        .alphabet(["0", "1"])
        .start("q0")
        .transition("q0", "0", "q0")
        .transition("q0", "1", "q1")
        .transition("q1", "0", "q1")
        .transition("q1", "1", "q0")
}

/// Two-state parity automaton whose final state on the binary expansion of
/// `n` is the Thue–Morse bit `t(n)`. Accepting set `{q0}`.
pub fn thue_morse_dfa() -> Dfa {
    thue_morse_builder().accepting(["q0"]).build_dfa().expect("builtin automaton is valid")
}

/// The Thue–Morse automaton with `τ(q0) = 0` and `τ(q1) = 1`.
pub fn thue_morse_dfao() -> Dfao {
    thue_morse_builder()
        .output("q0", Ratio::zero())
        .output("q1", Ratio::one())
        .build_dfao()
        .expect("builtin automaton is valid")
}

fn dot_escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders any automaton kind as a Graphviz digraph.
///
/// Accepting states are double circles, the start state gets an arrow from
/// an invisible point node, DFAO outputs appear in node labels and current
/// discharge weights are written on the edges as `symbol: weight`. Edges are
/// emitted in (state index, symbol index) order so the text is stable.
pub fn to_dot<A: Automaton + ?Sized>(automaton: &A, name: &str) -> String {
    let machine = automaton.machine();
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", dot_escape(name));
    out.push_str("    rankdir=LR;\n");
    out.push_str("    __start [shape=point];\n");
    let _ = writeln!(
        out,
        "    __start -> \"{}\";",
        dot_escape(machine.state_name(machine.start()))
    );
    for (q, state) in machine.states().iter().enumerate() {
        let accepting = automaton.accepting().is_some_and(|f| f.contains(&StateId(q)));
        let shape = if accepting { "doublecircle" } else { "circle" };
        let label = match automaton.outputs() {
            Some(out) => format!("{} / {}", state, out[q]),
            None => state.clone(),
        };
        let _ = writeln!(
            out,
            "    \"{}\" [shape={}, label=\"{}\"];",
            dot_escape(state),
            shape,
            dot_escape(&label)
        );
    }
    for q in 0..machine.num_states() {
        for (a, target) in machine.successors(StateId(q)) {
            let symbol = machine.alphabet()[a].as_str();
            let label = match automaton.discharge_rules() {
                Some(rules) => format!("{}: {}", symbol, rules.current(StateId(q), a)),
                None => symbol.to_string(),
            };
            let _ = writeln!(
                out,
                "    \"{}\" -> \"{}\" [label=\"{}\"];",
                dot_escape(machine.state_name(StateId(q))),
                dot_escape(machine.state_name(target)),
                dot_escape(&label)
            );
        }
    }
    out.push_str("}\n");
    out
}
