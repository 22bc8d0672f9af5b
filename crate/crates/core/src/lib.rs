//! Discharging deterministic finite automata.
//!
//! A discharging automaton is an ordinary DFA (or DFA with output) whose
//! states carry a rational "charge". Reading a symbol moves the current state
//! along its edge as usual, and the charge held by the current state is split
//! over its outgoing edges according to a fixed rule set. The final state
//! together with the charge it holds after the run is the result of the
//! charge-extended transition function.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised as:
//!
//! - [`automaton`]: DFA / DFAO representation, validation, extended
//!   transition function, base-k words and Graphviz export.
//! - [`discharge`]: discharge rule sets, charge vectors and the
//!   charge-extended transition function with its reduced forms.
//! - [`sequences`]: the rational and integer sequences produced by the two
//!   builtin automata, together with their closed forms and recursions.
//! - [`regularity`]: relation menus for quasi-k-regular sequences, their
//!   verification, brute-force menu search and k-kernel statistics.
//!
//! All arithmetic on charges is exact ([`Ratio`] is an arbitrary precision
//! rational kept in lowest terms).
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod automaton;
pub mod discharge;
pub mod regularity;
pub mod sequences;

/// Exact rational number used for charges, weights and outputs.
pub type Ratio = num_rational::BigRational;

pub use automaton::{
    base_k_word, digits_value, Automaton, AutomatonBuilder, Dfa, Dfao, Machine, StateId, Symbol,
    ValidationReport, Violation, Word,
};
pub use discharge::{
    ChargeResult, ChargeVector, Ddfa, Ddfao, DischargeRuleSet, Discharging, ReducedResult,
    StateValuation,
};

/// Builds a rational from a numerator and a nonzero denominator.
pub fn ratio(numer: i64, denom: i64) -> Ratio {
    Ratio::new(numer.into(), denom.into())
}
