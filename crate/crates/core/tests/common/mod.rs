#![allow(dead_code)]

use ddfa_core::automaton::{AutomatonBuilder, Dfa, Dfao, Machine, StateId, Symbol, Word};
use ddfa_core::discharge::{Ddfa, DischargeRuleSet};
use ddfa_core::Ratio;
use num_traits::Zero;
use proptest::collection::vec;
use proptest::prelude::*;

pub const SYMBOLS: [&str; 4] = ["a", "b", "c", "d"];

/// Raw material for a random automaton: transition targets, discharge
/// weights before normalisation, a word and a start state for the run.
#[derive(Debug, Clone)]
pub struct RandomCase {
    pub states: usize,
    pub symbols: usize,
    pub table: Vec<usize>,
    pub raw_weights: Vec<Vec<u32>>,
    pub accepting: Vec<bool>,
    pub word: Vec<usize>,
    pub from: usize,
}

pub fn random_case(max_states: usize, max_symbols: usize, max_len: usize) -> impl Strategy<Value = RandomCase> {
    (1..=max_states, 1..=max_symbols).prop_flat_map(move |(states, symbols)| {
        (
            vec(0..states, states * symbols),
            vec(vec(0u32..6, symbols), states * symbols),
            vec(any::<bool>(), states),
            vec(0..symbols, 0..=max_len),
            0..states,
        )
            .prop_map(move |(table, raw_weights, accepting, word, from)| RandomCase {
                states,
                symbols,
                table,
                raw_weights,
                accepting,
                word,
                from,
            })
    })
}

impl RandomCase {
    fn builder(&self) -> AutomatonBuilder {
        let names: Vec<String> = (0..self.states).map(|i| format!("q{i}")).collect();
        let mut b = AutomatonBuilder::new()
            .states(names.clone())
            .alphabet(SYMBOLS[..self.symbols].iter().copied())
            .start("q0");
        for q in 0..self.states {
            for s in 0..self.symbols {
                b = b.transition(names[q].clone(), SYMBOLS[s], names[self.table[q * self.symbols + s]].clone());
            }
        }
        b
    }

    pub fn dfa(&self) -> Dfa {
        let accepting: Vec<String> =
            (0..self.states).filter(|&q| self.accepting[q]).map(|q| format!("q{q}")).collect();
        self.builder().accepting(accepting).build_dfa().expect("random dfa is valid")
    }

    pub fn dfao(&self) -> Dfao {
        let mut b = self.builder();
        for q in 0..self.states {
            b = b.output(format!("q{q}"), Ratio::from_integer((q as i64 % 3).into()));
        }
        b.build_dfao().expect("random dfao is valid")
    }

    /// Weights `raw[t] / Σ raw` for every edge; an all-zero row keeps
    /// everything on the current edge.
    pub fn rules(&self) -> DischargeRuleSet {
        let mut rules = DischargeRuleSet::zeros(self.states, self.symbols);
        for q in 0..self.states {
            for s in 0..self.symbols {
                let mut raw = self.raw_weights[q * self.symbols + s].clone();
                if raw.iter().all(|&w| w == 0) {
                    raw[s] = 1;
                }
                let sum: u32 = raw.iter().sum();
                let w = |x: u32| Ratio::new(x.into(), sum.into());
                rules.set_current(StateId(q), s, w(raw[s])).unwrap();
                for t in (0..self.symbols).filter(|&t| t != s) {
                    rules.set_not_current(StateId(q), s, t, w(raw[t])).unwrap();
                }
            }
        }
        rules
    }

    pub fn ddfa(&self) -> Ddfa {
        Ddfa::new(self.dfa(), self.rules()).expect("normalised rules are valid")
    }

    pub fn word(&self) -> Word {
        Word::new(self.word.iter().map(|&s| Symbol::new(SYMBOLS[s])).collect())
    }
}

/// Charge step written as mass transfer: take the whole charge off the
/// current state, then hand the current-edge share to the successor on the
/// symbol read and each not-current share to the successor on its symbol.
pub fn mass_transfer_step(
    machine: &Machine,
    rules: &DischargeRuleSet,
    cur: StateId,
    charges: &[Ratio],
    s: usize,
) -> (StateId, Vec<Ratio>) {
    let mut out = charges.to_vec();
    let c = charges[cur.0].clone();
    out[cur.0] -= &c;
    let next = machine.step(cur, s);
    out[next.0] += &c * rules.current(cur, s);
    for t in (0..machine.num_symbols()).filter(|&t| t != s) {
        out[machine.step(cur, t).0] += &c * rules.not_current(cur, s, t);
    }
    (next, out)
}

/// Final `(state, charge)` of an automaton over `{0, 1}` whose every weight
/// is 1/2, using integer numerators over `2^len` instead of rationals.
pub fn dyadic_run(table: &[[usize; 2]], start: usize, digits: &[usize]) -> (usize, Ratio) {
    let len = digits.len() as u32;
    let mut charge = vec![0i128; table.len()];
    charge[start] = 1i128 << len;
    let mut cur = start;
    for &d in digits {
        let c = charge[cur];
        assert!(c % 2 == 0);
        charge[cur] -= c;
        charge[table[cur][d]] += c / 2;
        charge[table[cur][1 - d]] += c / 2;
        cur = table[cur][d];
    }
    let value = Ratio::new(charge[cur].into(), (1i128 << len).into());
    (cur, value)
}

pub fn binary_digits(n: u64) -> Vec<usize> {
    if n == 0 {
        return vec![0];
    }
    let len = 64 - n.leading_zeros();
    (0..len).rev().map(|i| ((n >> i) & 1) as usize).collect()
}

pub fn is_zero(r: &Ratio) -> bool {
    r.is_zero()
}
