//! Discharge rules and the charge-extended transition function.
//!
//! A run starts with a unit charge on the start state. On every symbol `s`
//! read from the current state `q`, the charge held by `q` is split: the
//! fraction `current(q, s)` follows the edge labelled `s`, and for every other
//! symbol `t` the fraction `not_current(q, s, t)` follows the edge labelled
//! `t`. Only the current state ever gives charge away, so the total stays 1.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::automaton::{
    Automaton, AutomatonBuilder, AutomatonError, Dfa, Dfao, Machine, StateId, Symbol,
    ValidationReport, Violation, Word,
};
use crate::Ratio;

/// Errors raised while editing a rule set or running a discharging automaton.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DischargeError {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("not-current weight needs a symbol different from the current one")]
    SameSymbol,
    #[error("rule index out of range")]
    OutOfRange,
    #[error("charge vector has {found} entries, automaton has {expected} states")]
    VectorLength { expected: usize, found: usize },
}

/// Per `(state, current symbol)` the weight kept on the current edge and the
/// weights sent along the edges of every other symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DischargeRuleSet {
    states: usize,
    symbols: usize,
    // [q * symbols + s]
    current: Vec<Ratio>,
    // [(q * symbols + s) * symbols + t], diagonal t == s unused and zero
    not_current: Vec<Ratio>,
}

impl DischargeRuleSet {
    /// All weights zero. Not valid until filled in.
    pub fn zeros(states: usize, symbols: usize) -> Self {
        DischargeRuleSet {
            states,
            symbols,
            current: vec![Ratio::zero(); states * symbols],
            not_current: vec![Ratio::zero(); states * symbols * symbols],
        }
    }

    /// Every edge out of a state receives `1/|Σ|`, whichever symbol is read.
    pub fn uniform(states: usize, symbols: usize) -> Self {
        let share = Ratio::new(1.into(), (symbols as i64).into());
        let mut rules = Self::zeros(states, symbols);
        for q in 0..states {
            for s in 0..symbols {
                rules.current[q * symbols + s] = share.clone();
                for t in (0..symbols).filter(|&t| t != s) {
                    rules.not_current[(q * symbols + s) * symbols + t] = share.clone();
                }
            }
        }
        rules
    }

    /// Current weight 1, not-current weights 0: the whole charge travels with
    /// the state, which reproduces the plain automaton.
    pub fn degenerate(states: usize, symbols: usize) -> Self {
        let mut rules = Self::zeros(states, symbols);
        rules.current.iter_mut().for_each(|w| *w = Ratio::one());
        rules
    }

    pub fn num_states(&self) -> usize {
        self.states
    }

    pub fn num_symbols(&self) -> usize {
        self.symbols
    }

    pub fn current(&self, q: StateId, s: usize) -> &Ratio {
        &self.current[q.0 * self.symbols + s]
    }

    /// Weight sent along the edge of `t` while `s` is the symbol being read.
    /// Zero when `t == s`.
    pub fn not_current(&self, q: StateId, s: usize, t: usize) -> &Ratio {
        &self.not_current[(q.0 * self.symbols + s) * self.symbols + t]
    }

    pub fn set_current(&mut self, q: StateId, s: usize, weight: Ratio) -> Result<(), DischargeError> {
        if q.0 >= self.states || s >= self.symbols {
            return Err(DischargeError::OutOfRange);
        }
        self.current[q.0 * self.symbols + s] = weight;
        Ok(())
    }

    pub fn set_not_current(
        &mut self,
        q: StateId,
        s: usize,
        t: usize,
        weight: Ratio,
    ) -> Result<(), DischargeError> {
        if q.0 >= self.states || s >= self.symbols || t >= self.symbols {
            return Err(DischargeError::OutOfRange);
        }
        if s == t {
            return Err(DischargeError::SameSymbol);
        }
        self.not_current[(q.0 * self.symbols + s) * self.symbols + t] = weight;
        Ok(())
    }

    /// Sum of the current weight and every not-current weight for `(q, s)`.
    pub fn total(&self, q: StateId, s: usize) -> Ratio {
        (0..self.symbols)
            .filter(|&t| t != s)
            .fold(self.current(q, s).clone(), |acc, t| acc + self.not_current(q, s, t))
    }

    /// Checks nonnegativity and that every `(q, s)` sums to exactly 1.
    pub fn validate(&self, machine: &Machine) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.states != machine.num_states() || self.symbols != machine.num_symbols() {
            report.push(Violation::RuleShape {
                expected_states: machine.num_states(),
                expected_symbols: machine.num_symbols(),
            });
            return report;
        }
        let symbol = |a: usize| machine.alphabet()[a].as_str().to_string();
        for q in (0..self.states).map(StateId) {
            let state = machine.state_name(q).to_string();
            for s in 0..self.symbols {
                let mut weights = vec![(s, self.current(q, s))];
                weights.extend((0..self.symbols).filter(|&t| t != s).map(|t| (t, self.not_current(q, s, t))));
                for (t, w) in weights {
                    if w.is_negative() {
                        report.push(Violation::NegativeWeight {
                            state: state.clone(),
                            current: symbol(s),
                            symbol: symbol(t),
                            weight: w.clone(),
                        });
                    }
                }
                let sum = self.total(q, s);
                if !sum.is_one() {
                    report.push(Violation::WeightSum { state: state.clone(), symbol: symbol(s), sum });
                }
            }
        }
        report
    }
}

/// Distribution of charge over the states, indexed by state position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChargeVector(Vec<Ratio>);

impl ChargeVector {
    /// Unit charge on `q`, zero elsewhere.
    pub fn unit(states: usize, q: StateId) -> Self {
        let mut v = vec![Ratio::zero(); states];
        v[q.0] = Ratio::one();
        ChargeVector(v)
    }

    pub fn from_entries(entries: Vec<Ratio>) -> Self {
        ChargeVector(entries)
    }

    pub fn get(&self, q: StateId) -> &Ratio {
        &self.0[q.0]
    }

    pub fn entries(&self) -> &[Ratio] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> Ratio {
        self.0.iter().fold(Ratio::zero(), |acc, c| acc + c)
    }

    /// Sums to 1 with every entry in `[0, 1]`.
    pub fn is_valid(&self) -> bool {
        self.total().is_one() && self.0.iter().all(|c| !c.is_negative() && *c <= Ratio::one())
    }
}

/// `δ^c(q, w)`: the final state and the charge it holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChargeResult {
    pub state: StateId,
    pub charge: Ratio,
}

/// Optional numeric values attached to states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateValuation(Vec<Option<Ratio>>);

impl StateValuation {
    /// No state valued.
    pub fn none(states: usize) -> Self {
        StateValuation(vec![None; states])
    }

    /// Every state valued `value`.
    pub fn constant(states: usize, value: Ratio) -> Self {
        StateValuation(vec![Some(value); states])
    }

    pub fn set(&mut self, q: StateId, value: Ratio) {
        self.0[q.0] = Some(value);
    }

    pub fn get(&self, q: StateId) -> Option<&Ratio> {
        self.0.get(q.0).and_then(Option::as_ref)
    }

    pub fn values(&self) -> &[Option<Ratio>] {
        &self.0
    }
}

/// Product of the final state and its final charge: a number when the state
/// carries a value, a formal `coefficient · state` otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReducedResult {
    Numeric(Ratio),
    Formal { state: StateId, coefficient: Ratio },
}

impl ReducedResult {
    /// Formal products follow `q · 1 = q` and `q · 0 = 0`.
    pub fn formal(state: StateId, coefficient: Ratio) -> Self {
        if coefficient.is_zero() {
            ReducedResult::Numeric(coefficient)
        } else {
            ReducedResult::Formal { state, coefficient }
        }
    }

    pub fn numeric(&self) -> Option<&Ratio> {
        match self {
            ReducedResult::Numeric(v) => Some(v),
            ReducedResult::Formal { .. } => None,
        }
    }

    /// Text form using state names, e.g. `7/8*q2`, `q2` or `3/4`.
    pub fn render(&self, machine: &Machine) -> String {
        match self {
            ReducedResult::Numeric(v) => v.to_string(),
            ReducedResult::Formal { state, coefficient } if coefficient.is_one() => {
                machine.state_name(*state).to_string()
            }
            ReducedResult::Formal { state, coefficient } => {
                alloc::format!("{}*{}", coefficient, machine.state_name(*state))
            }
        }
    }
}

/// Automata carrying a discharge rule set.
pub trait Discharging: Automaton {
    fn rules(&self) -> &DischargeRuleSet;

    /// One step of the charge recursion, reading the symbol with index `s`.
    ///
    /// Returns the new current state and the new charge vector. Only the
    /// entry of `current` gives charge away; every other entry changes only by
    /// what it receives from `current`.
    fn charge_step_index(&self, current: StateId, vector: &ChargeVector, s: usize) -> (StateId, ChargeVector) {
        let machine = self.machine();
        let rules = self.rules();
        let held = vector.get(current);
        let next = machine.step(current, s);

        // Σ_{t ≠ s, pred(δ(current, t))} n^not-current
        let routed = |pred: &dyn Fn(StateId) -> bool| -> Ratio {
            (0..machine.num_symbols())
                .filter(|&t| t != s && pred(machine.step(current, t)))
                .fold(Ratio::zero(), |acc, t| acc + rules.not_current(current, s, t))
        };
        let leaving = routed(&|target| target != current);

        let mut out = vector.0.clone();
        if next != current {
            out[current.0] = held * (Ratio::one() - rules.current(current, s) - &leaving);
            out[next.0] = vector.get(next)
                + held * (rules.current(current, s) + routed(&|target| target == next));
        } else {
            // the receiving state is the current state: its entry is the
            // retained charge
            out[current.0] = held * (Ratio::one() - &leaving);
        }
        for j in (0..machine.num_states()).map(StateId) {
            if j != current && j != next {
                out[j.0] = vector.get(j) + held * routed(&|target| target == j);
            }
        }
        (next, ChargeVector(out))
    }

    /// [`Discharging::charge_step_index`] addressed by symbol.
    fn charge_step(
        &self,
        current: StateId,
        vector: &ChargeVector,
        symbol: &Symbol,
    ) -> Result<(StateId, ChargeVector), DischargeError> {
        let machine = self.machine();
        machine.check_state(current)?;
        if vector.len() != machine.num_states() {
            return Err(DischargeError::VectorLength { expected: machine.num_states(), found: vector.len() });
        }
        let s = machine.symbol_index(symbol)?;
        Ok(self.charge_step_index(current, vector, s))
    }

    /// `δ^c` on an already encoded word.
    fn delta_c_encoded(&self, q: StateId, word: &[usize]) -> ChargeResult {
        let mut state = q;
        let mut vector = ChargeVector::unit(self.machine().num_states(), q);
        for &s in word {
            let (next, v) = self.charge_step_index(state, &vector, s);
            state = next;
            vector = v;
        }
        let charge = vector.get(state).clone();
        ChargeResult { state, charge }
    }

    /// `δ^c(q, w)`; the empty word gives `(q, 1)`.
    fn delta_c(&self, q: StateId, word: &Word) -> Result<ChargeResult, DischargeError> {
        self.machine().check_state(q)?;
        let encoded = self.machine().encode(word)?;
        Ok(self.delta_c_encoded(q, &encoded))
    }

    /// The state and charge vector after every prefix of `word`, starting
    /// with the unit charge on `q`.
    fn charge_trajectory(&self, q: StateId, word: &Word) -> Result<Vec<(StateId, ChargeVector)>, DischargeError> {
        self.machine().check_state(q)?;
        let encoded = self.machine().encode(word)?;
        let mut snapshots = Vec::with_capacity(encoded.len() + 1);
        snapshots.push((q, ChargeVector::unit(self.machine().num_states(), q)));
        for &s in &encoded {
            let (state, vector) = &snapshots[snapshots.len() - 1];
            let step = self.charge_step_index(*state, vector, s);
            snapshots.push(step);
        }
        Ok(snapshots)
    }

    /// Reduced charge-extended transition function: final state value times
    /// final charge, or the formal product when the state has no value.
    fn reduced_delta_c(
        &self,
        valuation: &StateValuation,
        q: StateId,
        word: &Word,
    ) -> Result<ReducedResult, DischargeError> {
        let result = self.delta_c(q, word)?;
        Ok(reduce(valuation, result))
    }
}

pub(crate) fn reduce(valuation: &StateValuation, result: ChargeResult) -> ReducedResult {
    match valuation.get(result.state) {
        Some(value) => ReducedResult::Numeric(value * result.charge),
        None => ReducedResult::formal(result.state, result.charge),
    }
}

/// Discharging DFA `(Q, Σ, δ, q0, F, P)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ddfa {
    dfa: Dfa,
    rules: DischargeRuleSet,
}

impl Ddfa {
    pub fn new(dfa: Dfa, rules: DischargeRuleSet) -> Result<Self, ValidationReport> {
        let report = rules.validate(dfa.machine());
        if report.is_valid() {
            Ok(Ddfa { dfa, rules })
        } else {
            Err(report)
        }
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn validate_rules(&self) -> ValidationReport {
        self.rules.validate(self.dfa.machine())
    }

    /// Full validation of the underlying automaton and the rules.
    pub fn validate(&self) -> ValidationReport {
        let mut report = self.dfa.validate();
        report.extend(self.validate_rules());
        report
    }
}

impl Automaton for Ddfa {
    fn machine(&self) -> &Machine {
        self.dfa.machine()
    }

    fn accepting(&self) -> Option<&[StateId]> {
        Some(self.dfa.accepting_states())
    }

    fn discharge_rules(&self) -> Option<&DischargeRuleSet> {
        Some(&self.rules)
    }
}

impl Discharging for Ddfa {
    fn rules(&self) -> &DischargeRuleSet {
        &self.rules
    }
}

/// Discharging DFA with output `(Q, Σ, δ, q0, P, Δ, τ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ddfao {
    dfao: Dfao,
    rules: DischargeRuleSet,
}

impl Ddfao {
    pub fn new(dfao: Dfao, rules: DischargeRuleSet) -> Result<Self, ValidationReport> {
        let report = rules.validate(dfao.machine());
        if report.is_valid() {
            Ok(Ddfao { dfao, rules })
        } else {
            Err(report)
        }
    }

    pub fn dfao(&self) -> &Dfao {
        &self.dfao
    }

    pub fn validate_rules(&self) -> ValidationReport {
        self.rules.validate(self.dfao.machine())
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = self.dfao.validate();
        report.extend(self.validate_rules());
        report
    }

    /// Reduced output: `τ(final state) · final charge`.
    pub fn reduced_output(&self, q: StateId, word: &Word) -> Result<Ratio, DischargeError> {
        let result = self.delta_c(q, word)?;
        Ok(self.dfao.output_of(result.state) * result.charge)
    }

    /// The outputs `τ` as a valuation.
    pub fn output_valuation(&self) -> StateValuation {
        StateValuation(self.dfao.outputs().unwrap_or(&[]).iter().cloned().map(Some).collect())
    }
}

impl Automaton for Ddfao {
    fn machine(&self) -> &Machine {
        self.dfao.machine()
    }

    fn outputs(&self) -> Option<&[Ratio]> {
        self.dfao.outputs()
    }

    fn discharge_rules(&self) -> Option<&DischargeRuleSet> {
        Some(&self.rules)
    }
}

impl Discharging for Ddfao {
    fn rules(&self) -> &DischargeRuleSet {
        &self.rules
    }
}

/// Attaches the degenerate rule set (current weight 1) to a DFA.
pub fn degenerate_ddfa(dfa: &Dfa) -> Ddfa {
    let m = dfa.machine();
    Ddfa::new(dfa.clone(), DischargeRuleSet::degenerate(m.num_states(), m.num_symbols()))
        .expect("degenerate rules sum to 1")
}

/// Attaches the degenerate rule set (current weight 1) to a DFAO.
pub fn degenerate_ddfao(dfao: &Dfao) -> Ddfao {
    let m = dfao.machine();
    Ddfao::new(dfao.clone(), DischargeRuleSet::degenerate(m.num_states(), m.num_symbols()))
        .expect("degenerate rules sum to 1")
}

/// Thue–Morse automaton discharging equally along both edges.
pub fn build_tm_ddfa() -> Ddfa {
    let dfa = crate::automaton::thue_morse_dfa();
    Ddfa::new(dfa, DischargeRuleSet::uniform(2, 2)).expect("uniform rules sum to 1")
}

/// Thue–Morse DFAO (outputs the parity of ones) with the same uniform rules.
pub fn build_tm_ddfao() -> Ddfao {
    let dfao = crate::automaton::thue_morse_dfao();
    Ddfao::new(dfao, DischargeRuleSet::uniform(2, 2)).expect("uniform rules sum to 1")
}

fn fr_builder() -> AutomatonBuilder {
    AutomatonBuilder::new()
        .states(["q0", "q1", "q2", "q3"])
        .alphabet(["0", "1"])
        .start("q0")
        .transition("q0", "0", "q2")
        .transition("q0", "1", "q1")
        .transition("q1", "0", "q3")
        .transition("q1", "1", "q2")
        .transition("q2", "0", "q2")
        .transition("q2", "1", "q2")
        .transition("q3", "0", "q3")
        .transition("q3", "1", "q2")
}

/// Four-state automaton whose final state on the binary expansion of `n` is
/// `q1` or `q3` exactly when `n` is a power of two, with every weight 1/2.
/// `τ` is the indicator of powers of two.
pub fn build_fr_ddfao() -> Ddfao {
    let dfao = fr_builder()
        .output("q0", Ratio::zero())
        .output("q1", Ratio::one())
        .output("q2", Ratio::zero())
        .output("q3", Ratio::one())
        .build_dfao()
        .expect("builtin automaton is valid");
    Ddfao::new(dfao, DischargeRuleSet::uniform(4, 2)).expect("uniform rules sum to 1")
}

impl fmt::Display for ChargeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::thue_morse_dfa;
    use crate::ratio;

    fn w(text: &str) -> Word {
        Word::parse(text)
    }

    fn cv(entries: &[(i64, i64)]) -> ChargeVector {
        ChargeVector::from_entries(entries.iter().map(|&(n, d)| ratio(n, d)).collect())
    }

    #[test]
    fn tm_rules_are_valid() {
        assert!(build_tm_ddfa().validate().is_valid());
        assert!(build_fr_ddfao().validate().is_valid());
    }

    #[test]
    fn oversubscribed_and_negative_weights_are_rejected() {
        let dfa = thue_morse_dfa();
        let mut rules = DischargeRuleSet::uniform(2, 2);
        rules.set_current(StateId(0), 0, ratio(3, 4)).unwrap();
        rules.set_not_current(StateId(0), 0, 1, ratio(3, 4)).unwrap();
        let report = rules.validate(dfa.machine());
        assert_eq!(
            report.violations,
            vec![Violation::WeightSum { state: "q0".into(), symbol: "0".into(), sum: ratio(3, 2) }]
        );

        let mut rules = DischargeRuleSet::uniform(2, 2);
        rules.set_current(StateId(1), 1, ratio(-1, 2)).unwrap();
        rules.set_not_current(StateId(1), 1, 0, ratio(3, 2)).unwrap();
        let report = rules.validate(dfa.machine());
        assert!(matches!(report.violations[..], [Violation::NegativeWeight { .. }]));
        assert!(Ddfa::new(dfa, rules).is_err());
    }

    #[test]
    fn rule_set_shape_mismatch() {
        let report = DischargeRuleSet::uniform(3, 2).validate(thue_morse_dfa().machine());
        assert!(matches!(report.violations[..], [Violation::RuleShape { .. }]));
        let mut rules = DischargeRuleSet::zeros(1, 2);
        assert_eq!(rules.set_not_current(StateId(0), 1, 1, ratio(1, 2)), Err(DischargeError::SameSymbol));
        assert_eq!(rules.set_current(StateId(4), 0, ratio(1, 2)), Err(DischargeError::OutOfRange));
    }

    #[test]
    fn charge_steps_of_the_thue_morse_example() {
        let tm = build_tm_ddfa();
        let (q, v) = tm.charge_step(StateId(0), &cv(&[(1, 1), (0, 1)]), &"1".into()).unwrap();
        assert_eq!((q, v), (StateId(1), cv(&[(1, 2), (1, 2)])));
        let (q, v) = tm.charge_step(StateId(1), &cv(&[(1, 2), (1, 2)]), &"0".into()).unwrap();
        assert_eq!((q, v), (StateId(1), cv(&[(3, 4), (1, 4)])));
        assert!(tm.charge_step(StateId(1), &cv(&[(1, 1), (0, 1)]), &"2".into()).is_err());
    }

    #[test]
    fn degenerate_step_moves_everything() {
        let d = degenerate_ddfa(&thue_morse_dfa());
        let (q, v) = d.charge_step(StateId(0), &cv(&[(1, 1), (0, 1)]), &"1".into()).unwrap();
        assert_eq!((q, v), (StateId(1), cv(&[(0, 1), (1, 1)])));
        let (q, v) = d.charge_step(StateId(1), &cv(&[(0, 1), (1, 1)]), &"0".into()).unwrap();
        assert_eq!((q, v), (StateId(1), cv(&[(0, 1), (1, 1)])));
    }

    #[test]
    fn delta_c_examples() {
        let tm = build_tm_ddfa();
        let fr = build_fr_ddfao();
        assert_eq!(
            tm.delta_c(StateId(0), &w("1010")).unwrap(),
            ChargeResult { state: StateId(0), charge: ratio(7, 16) }
        );
        assert_eq!(
            fr.delta_c(StateId(0), &w("1010")).unwrap(),
            ChargeResult { state: StateId(2), charge: ratio(7, 8) }
        );
        assert_eq!(
            fr.delta_c(StateId(0), &w("11")).unwrap(),
            ChargeResult { state: StateId(2), charge: ratio(3, 4) }
        );
        assert_eq!(
            tm.delta_c(StateId(1), &Word::empty()).unwrap(),
            ChargeResult { state: StateId(1), charge: ratio(1, 1) }
        );
        assert_eq!(
            tm.delta_c(StateId(0), &w("1")).unwrap(),
            ChargeResult { state: StateId(1), charge: ratio(1, 2) }
        );
    }

    #[test]
    fn trajectories() {
        let tm = build_tm_ddfa();
        let traj = tm.charge_trajectory(StateId(0), &w("1010")).unwrap();
        let at_q0: Vec<_> = traj.iter().map(|(_, v)| v.get(StateId(0)).clone()).collect();
        assert_eq!(at_q0, vec![ratio(1, 1), ratio(1, 2), ratio(3, 4), ratio(7, 8), ratio(7, 16)]);

        let fr = build_fr_ddfao();
        let traj = fr.charge_trajectory(StateId(0), &w("10")).unwrap();
        assert_eq!(traj.last().unwrap().1, cv(&[(0, 1), (0, 1), (3, 4), (1, 4)]));

        let traj = tm.charge_trajectory(StateId(1), &Word::empty()).unwrap();
        assert_eq!(traj, vec![(StateId(1), cv(&[(0, 1), (1, 1)]))]);
    }

    #[test]
    fn reduced_forms() {
        let fr = build_fr_ddfao();
        let none = StateValuation::none(4);
        assert_eq!(
            fr.reduced_delta_c(&none, StateId(0), &w("1010")).unwrap(),
            ReducedResult::Formal { state: StateId(2), coefficient: ratio(7, 8) }
        );
        assert_eq!(
            fr.reduced_delta_c(&none, StateId(0), &w("1010")).unwrap().render(fr.machine()),
            "7/8*q2"
        );
        let ones = StateValuation::constant(4, ratio(1, 1));
        assert_eq!(
            fr.reduced_delta_c(&ones, StateId(0), &w("1010")).unwrap(),
            ReducedResult::Numeric(ratio(7, 8))
        );
        let mut zero_at_q2 = StateValuation::none(4);
        zero_at_q2.set(StateId(2), ratio(0, 1));
        assert_eq!(
            fr.reduced_delta_c(&zero_at_q2, StateId(0), &w("1010")).unwrap(),
            ReducedResult::Numeric(ratio(0, 1))
        );
        assert_eq!(ReducedResult::formal(StateId(1), ratio(0, 1)), ReducedResult::Numeric(ratio(0, 1)));
    }

    #[test]
    fn reduced_output_cases() {
        let fr = build_fr_ddfao();
        let ones = Ddfao::new(fr.dfao().with_constant_output(ratio(1, 1)), fr.rules().clone()).unwrap();
        assert_eq!(ones.reduced_output(StateId(0), &w("1010")).unwrap(), ratio(7, 8));
        // 1010 ends in q2 where τ = 0
        assert_eq!(fr.reduced_output(StateId(0), &w("1010")).unwrap(), ratio(0, 1));
        let degenerate = degenerate_ddfao(fr.dfao());
        for text in ["", "0", "1", "10", "100", "1011", "11010"] {
            assert_eq!(
                degenerate.reduced_output(StateId(0), &w(text)).unwrap(),
                fr.dfao().output(&w(text)).unwrap()
            );
        }
    }

    #[test]
    fn fr_transitions() {
        let fr = build_fr_ddfao();
        let m = fr.machine();
        let expected = [(0, 1, 1), (1, 0, 3), (3, 1, 2), (2, 0, 2), (2, 1, 2), (3, 0, 3), (0, 0, 2), (1, 1, 2)];
        for (from, s, to) in expected {
            assert_eq!(m.step(StateId(from), s), StateId(to));
        }
    }

    #[test]
    fn degenerate_construction() {
        let d = degenerate_ddfa(&thue_morse_dfa());
        assert!(d.validate_rules().is_valid());
        assert_eq!(
            d.delta_c(StateId(0), &Word::empty()).unwrap(),
            ChargeResult { state: StateId(0), charge: ratio(1, 1) }
        );
        assert_eq!(d.delta_c(StateId(0), &w("110101")).unwrap().charge, ratio(1, 1));
    }

    #[test]
    fn dot_shows_weights() {
        let dot = crate::automaton::to_dot(&build_fr_ddfao(), "fr");
        assert_eq!(dot.matches("[shape=").count(), 1 + 4);
        assert_eq!(dot.matches("[label=\"").count(), 8);
        assert!(dot.contains("[label=\"1: 1/2\"]"));
    }
}
