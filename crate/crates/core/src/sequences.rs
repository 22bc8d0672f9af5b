//! Sequences read off discharging automata, and the recursions and closed
//! forms that describe them.
//!
//! Producers are pure: `term(n)` is recomputed on every call. Where a whole
//! prefix is needed, the `*_table` functions fill it in linear time from the
//! `n / 2` recursion, and [`Tabulated`] freezes any producer into a slice.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::automaton::{thue_morse_dfao, AutomatonError, Dfao, StateId, Automaton};
use crate::discharge::{reduce, Discharging, ReducedResult, StateValuation};
use crate::{ratio, Ratio};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SequenceError {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("alphabet does not consist of the {0} digit symbols of the base")]
    AlphabetMismatch(u64),
    #[error("index {0} is outside the domain of the sequence")]
    InvalidIndex(u64),
    #[error("numerator b({0}) is even")]
    EvenNumerator(u64),
    #[error("binary word of {0} matches none of the shapes 11s, 10^l, 10^l1s")]
    Unclassifiable(u64),
    #[error("scaled term at {0} is not an integer")]
    NotAnInteger(u64),
    #[error("term at {0} does not fit in 64 bits")]
    Overflow(u64),
}

/// Rational sequence indexed from 0.
pub trait RationalSequence {
    fn term(&self, n: u64) -> Ratio;

    fn prefix(&self, count: usize) -> Vec<Ratio> {
        (0..count as u64).map(|n| self.term(n)).collect()
    }
}

/// Integer sequence indexed from 0.
pub trait IntegerSequence {
    fn term(&self, n: u64) -> i64;

    fn prefix(&self, count: usize) -> Vec<i64> {
        (0..count as u64).map(|n| self.term(n)).collect()
    }
}

impl<F: Fn(u64) -> i64> IntegerSequence for F {
    fn term(&self, n: u64) -> i64 {
        self(n)
    }
}

/// A finite table of terms. Indexing past the end panics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tabulated(Vec<i64>);

impl Tabulated {
    pub fn new(terms: Vec<i64>) -> Self {
        Tabulated(terms)
    }

    pub fn of<S: IntegerSequence + ?Sized>(seq: &S, len: usize) -> Self {
        Tabulated((0..len as u64).map(|n| seq.term(n)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> &[i64] {
        &self.0
    }
}

impl IntegerSequence for Tabulated {
    fn term(&self, n: u64) -> i64 {
        self.0[n as usize]
    }
}

/// Final charges `δ^c(q0, (n)_k).charge` over consecutive integers.
pub struct FinalChargeSequence<'a, D: Discharging + ?Sized> {
    automaton: &'a D,
    base: u64,
    // alphabet index of each digit
    digit_index: Vec<usize>,
}

impl<'a, D: Discharging + ?Sized> FinalChargeSequence<'a, D> {
    /// The alphabet must consist of exactly the digit labels `0..k`.
    pub fn new(automaton: &'a D, base: u64) -> Result<Self, SequenceError> {
        if base < 2 {
            return Err(AutomatonError::InvalidBase(base).into());
        }
        let machine = automaton.machine();
        if machine.num_symbols() as u64 != base {
            return Err(SequenceError::AlphabetMismatch(base));
        }
        let digit_index = (0..base)
            .map(|d| {
                machine
                    .alphabet()
                    .iter()
                    .position(|s| s.as_str().parse::<u64>().ok() == Some(d))
                    .ok_or(SequenceError::AlphabetMismatch(base))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FinalChargeSequence { automaton, base, digit_index })
    }

    fn encode(&self, n: u64) -> Vec<usize> {
        let mut digits = Vec::new();
        let mut rest = n;
        loop {
            digits.push(self.digit_index[(rest % self.base) as usize]);
            rest /= self.base;
            if rest == 0 {
                break;
            }
        }
        digits.reverse();
        digits
    }

    pub fn charge_result(&self, n: u64) -> crate::ChargeResult {
        let start = self.automaton.machine().start();
        self.automaton.delta_c_encoded(start, &self.encode(n))
    }

    /// Reduced form of term `n` under `valuation`.
    pub fn reduced(&self, valuation: &StateValuation, n: u64) -> ReducedResult {
        reduce(valuation, self.charge_result(n))
    }

    pub fn final_state(&self, n: u64) -> StateId {
        self.charge_result(n).state
    }
}

impl<D: Discharging + ?Sized> RationalSequence for FinalChargeSequence<'_, D> {
    fn term(&self, n: u64) -> Ratio {
        self.charge_result(n).charge
    }
}

/// The first `count` final charges of `automaton` on base-`k` expansions.
pub fn final_charge_sequence<D: Discharging + ?Sized>(
    automaton: &D,
    base: u64,
    count: usize,
) -> Result<Vec<Ratio>, SequenceError> {
    Ok(FinalChargeSequence::new(automaton, base)?.prefix(count))
}

/// Numerators of a rational sequence in lowest terms.
pub struct Numerators<S>(pub S);

impl<S: RationalSequence> IntegerSequence for Numerators<S> {
    fn term(&self, n: u64) -> i64 {
        self.0.term(n).numer().to_i64().expect("numerator fits in 64 bits")
    }
}

pub fn numerator(value: &Ratio) -> BigInt {
    value.numer().clone()
}

/// Smallest `k^j · value` that is an integer, if any.
pub fn scale_to_integer(value: &Ratio, base: u64) -> Option<BigInt> {
    let base = BigInt::from(base);
    let mut scaled = value.clone();
    let mut rest = value.denom().clone();
    while !rest.is_one() {
        let g = rest.gcd(&base);
        if g.is_one() {
            return None;
        }
        scaled *= Ratio::from_integer(base.clone());
        rest = scaled.denom().clone();
    }
    Some(scaled.to_integer())
}

/// `a(0) = a(1) = 1/2`, `a(2m) = a(m)/2`, `a(2m+1) = 1 − a(m)/2`.
pub fn a_recursion(n: u64) -> Ratio {
    let mut chain = Vec::new();
    let mut m = n;
    while m > 1 {
        chain.push(m);
        m /= 2;
    }
    let half = ratio(1, 2);
    chain.iter().rev().fold(half.clone(), |prev, &m| {
        if m % 2 == 0 {
            prev * &half
        } else {
            Ratio::one() - prev * &half
        }
    })
}

/// `a(0..count)` computed from the recursion in one pass.
pub fn a_table(count: usize) -> Vec<Ratio> {
    let half = ratio(1, 2);
    let mut table: Vec<Ratio> = Vec::with_capacity(count);
    for n in 0..count {
        let value = if n <= 1 {
            half.clone()
        } else if n % 2 == 0 {
            &table[n / 2] * &half
        } else {
            Ratio::one() - &table[n / 2] * &half
        };
        table.push(value);
    }
    table
}

/// `b(n)`: numerator of `a(n)` in lowest terms.
pub fn b_term(n: u64) -> i64 {
    a_recursion(n).numer().to_i64().expect("numerator fits in 64 bits")
}

/// `(b(n) + 1) / 2` for `n ≥ 1`.
pub fn modified_b(n: u64) -> Result<i64, SequenceError> {
    if n == 0 {
        return Err(SequenceError::InvalidIndex(0));
    }
    let b = b_term(n);
    if b % 2 == 0 {
        return Err(SequenceError::EvenNumerator(n));
    }
    Ok((b + 1) / 2)
}

/// `(b(n) + 1) / 2` for `n = 1..=count`.
pub fn modified_b_sequence(count: usize) -> Result<Vec<i64>, SequenceError> {
    let a = a_table(count + 1);
    (1..=count)
        .map(|n| {
            let b = a[n].numer().to_i64().ok_or(SequenceError::Overflow(n as u64))?;
            if b % 2 == 0 {
                Err(SequenceError::EvenNumerator(n as u64))
            } else {
                Ok((b + 1) / 2)
            }
        })
        .collect()
}

/// Triangle with `T(0,1) = 1`, `T(n,2k−1) = T(n−1,k)` and
/// `T(n,2k) = 2^n + 1 − T(n−1,k)`; row `n` holds `2^n` entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleA131271 {
    rows: Vec<Vec<u64>>,
}

impl TriangleA131271 {
    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn row(&self, n: usize) -> &[u64] {
        &self.rows[n]
    }

    /// Rows concatenated in order.
    pub fn flatten(&self) -> Vec<u64> {
        self.rows.iter().flatten().copied().collect()
    }
}

/// Rows `0..=depth` of the A131271 triangle.
pub fn a131271_triangle(depth: usize) -> TriangleA131271 {
    let mut rows = vec![vec![1u64]];
    for n in 1..=depth {
        let prev = &rows[n - 1];
        let top = (1u64 << n) + 1;
        let row = prev.iter().flat_map(|&t| [t, top - t]).collect();
        rows.push(row);
    }
    TriangleA131271 { rows }
}

/// Shape of a binary expansion, as used by the closed form of the
/// four-state example.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryShape {
    /// `n = 0`.
    Zero,
    /// `11s`.
    DoubleOne,
    /// `1 0^ℓ` with `ℓ ≥ 0`.
    PowerOfTwo(u32),
    /// `1 0^ℓ 1 s` with `ℓ ≥ 1`.
    SeparatedOne(u32),
}

/// Classifies the binary expansion of `n`.
pub fn classify_binary(n: u64) -> Result<BinaryShape, SequenceError> {
    if n == 0 {
        return Ok(BinaryShape::Zero);
    }
    let len = 64 - n.leading_zeros();
    if len == 1 {
        return Ok(BinaryShape::PowerOfTwo(0));
    }
    // bits after the leading one, most significant first
    let tail = n ^ (1u64 << (len - 1));
    let tail_len = len - 1;
    if tail == 0 {
        return Ok(BinaryShape::PowerOfTwo(tail_len));
    }
    let zeros = tail_len - (64 - tail.leading_zeros());
    match zeros {
        0 => Ok(BinaryShape::DoubleOne),
        l if l < tail_len => Ok(BinaryShape::SeparatedOne(l)),
        _ => Err(SequenceError::Unclassifiable(n)),
    }
}

fn pow2(exp: u32) -> Ratio {
    Ratio::from_integer(BigInt::one() << exp as usize)
}

/// Closed form of the reduced final charges of the four-state example with
/// every state valued 1: `d(0) = 1/2`, `d(11s) = 3/4`,
/// `d(1 0^ℓ) = 2^{−(ℓ+1)}`, `d(1 0^ℓ 1 s) = 1 − 2^{−(ℓ+2)}`.
pub fn d_shape_closed_form(n: u64) -> Result<Ratio, SequenceError> {
    Ok(match classify_binary(n)? {
        BinaryShape::Zero => ratio(1, 2),
        BinaryShape::DoubleOne => ratio(3, 4),
        BinaryShape::PowerOfTwo(l) => pow2(l + 1).recip(),
        BinaryShape::SeparatedOne(l) => Ratio::one() - pow2(l + 2).recip(),
    })
}

/// The shape-dependent power of two that clears the denominator of `d(n)`:
/// `e(0) = 1`, `e(11s) = 4 d`, `e(1 0^ℓ) = 2^{ℓ+1} d`, `e(1 0^ℓ 1 s) = 2^{ℓ+2} d`.
pub fn e_shape_scaled(n: u64) -> Result<i64, SequenceError> {
    let (factor, d) = match classify_binary(n)? {
        BinaryShape::Zero => return Ok(1),
        BinaryShape::DoubleOne => (pow2(2), ratio(3, 4)),
        BinaryShape::PowerOfTwo(l) => (pow2(l + 1), d_shape_closed_form(n)?),
        BinaryShape::SeparatedOne(l) => (pow2(l + 2), d_shape_closed_form(n)?),
    };
    let scaled = factor * d;
    if !scaled.is_integer() {
        return Err(SequenceError::NotAnInteger(n));
    }
    scaled.to_integer().to_i64().ok_or(SequenceError::Overflow(n))
}

/// `e(n)`: numerator of `d(n)` in lowest terms (`e(0) = 1`).
pub fn e_sequence(n: u64) -> Result<i64, SequenceError> {
    d_shape_closed_form(n)?.numer().to_i64().ok_or(SequenceError::Overflow(n))
}

/// Outcome of checking `e(2n) = e(n)`, `e(4n+1) ∈ {e(2n), 2e(2n+1)+1}` and
/// `e(4n+3) ∈ {e(2n), e(2n+1)}` up to a bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ERelationReport {
    pub max_n: u64,
    pub doubling_failures: Vec<u64>,
    pub four_n_plus_one_failures: Vec<u64>,
    pub four_n_plus_three_failures: Vec<u64>,
    /// How often `e(2n)` resp. `2e(2n+1)+1` equals `e(4n+1)`, `0 ≤ n ≤ max_n`.
    pub four_n_plus_one_hits: [u64; 2],
    /// How often `e(2n)` resp. `e(2n+1)` equals `e(4n+3)`, `1 ≤ n ≤ max_n`.
    pub four_n_plus_three_hits: [u64; 2],
}

impl ERelationReport {
    pub const MIN_BRANCH_HITS: u64 = 5;

    pub fn memberships_hold(&self) -> bool {
        self.doubling_failures.is_empty()
            && self.four_n_plus_one_failures.is_empty()
            && self.four_n_plus_three_failures.is_empty()
    }

    /// Memberships hold and every branch is taken at least
    /// [`Self::MIN_BRANCH_HITS`] times.
    pub fn passed(&self) -> bool {
        self.memberships_hold()
            && self
                .four_n_plus_one_hits
                .iter()
                .chain(&self.four_n_plus_three_hits)
                .all(|&h| h >= Self::MIN_BRANCH_HITS)
    }
}

/// Checks the three e-sequence relations for every `n ≤ max_n`.
pub fn e_relation_check(max_n: u64) -> Result<ERelationReport, SequenceError> {
    let len = 4 * max_n as usize + 4;
    let e = (0..len as u64).map(e_sequence).collect::<Result<Vec<_>, _>>()?;
    let mut report = ERelationReport {
        max_n,
        doubling_failures: Vec::new(),
        four_n_plus_one_failures: Vec::new(),
        four_n_plus_three_failures: Vec::new(),
        four_n_plus_one_hits: [0; 2],
        four_n_plus_three_hits: [0; 2],
    };
    for n in 0..=max_n as usize {
        if e[2 * n] != e[n] {
            report.doubling_failures.push(n as u64);
        }
        let target = e[4 * n + 1];
        let branches = [e[2 * n], 2 * e[2 * n + 1] + 1];
        tally(&mut report.four_n_plus_one_hits, &mut report.four_n_plus_one_failures, n, target, branches);
        if n >= 1 {
            let target = e[4 * n + 3];
            let branches = [e[2 * n], e[2 * n + 1]];
            tally(&mut report.four_n_plus_three_hits, &mut report.four_n_plus_three_failures, n, target, branches);
        }
    }
    Ok(report)
}

fn tally(hits: &mut [u64; 2], failures: &mut Vec<u64>, n: usize, target: i64, branches: [i64; 2]) {
    let mut any = false;
    for (hit, value) in hits.iter_mut().zip(branches) {
        if value == target {
            *hit += 1;
            any = true;
        }
    }
    if !any {
        failures.push(n as u64);
    }
}

/// Trial division up to `√n`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// `𝒯(0) = 0`, `𝒯(2n) = 1 − 𝒯(n)` if `n` is prime and `𝒯(n)` otherwise,
/// `𝒯(2n+1) = 1 − 𝒯(n)`.
pub fn t_sequence(n: u64) -> i64 {
    let mut chain = Vec::new();
    let mut m = n;
    while m > 0 {
        chain.push(m);
        m /= 2;
    }
    chain.iter().rev().fold(0, |prev, &m| {
        let flip = m % 2 == 1 || is_prime(m / 2);
        if flip {
            1 - prev
        } else {
            prev
        }
    })
}

/// `𝒯(0..count)` in one pass.
pub fn t_table(count: usize) -> Vec<i64> {
    let mut table: Vec<i64> = Vec::with_capacity(count);
    for n in 0..count {
        let value = if n == 0 {
            0
        } else if n % 2 == 1 || is_prime((n / 2) as u64) {
            1 - table[n / 2]
        } else {
            table[n / 2]
        };
        table.push(value);
    }
    table
}

/// Thue–Morse sequence computed by running the parity automaton on binary
/// expansions.
pub struct ThueMorse {
    dfao: Dfao,
    zero: usize,
    one: usize,
}

impl ThueMorse {
    pub fn new() -> Self {
        let dfao = thue_morse_dfao();
        let m = dfao.machine();
        let zero = m.symbol_index(&"0".into()).expect("binary alphabet");
        let one = m.symbol_index(&"1".into()).expect("binary alphabet");
        ThueMorse { dfao, zero, one }
    }
}

impl Default for ThueMorse {
    fn default() -> Self {
        Self::new()
    }
}

impl IntegerSequence for ThueMorse {
    fn term(&self, n: u64) -> i64 {
        let bits: Vec<usize> = if n == 0 {
            vec![self.zero]
        } else {
            let len = 64 - n.leading_zeros();
            (0..len).rev().map(|i| if (n >> i) & 1 == 1 { self.one } else { self.zero }).collect()
        };
        let m = self.dfao.machine();
        let end = m.run_encoded(m.start(), &bits);
        self.dfao.output_of(end).to_integer().to_i64().expect("output is 0 or 1")
    }
}

/// `t(n)`, the Thue–Morse bit of `n`.
pub fn thue_morse(n: u64) -> i64 {
    ThueMorse::new().term(n)
}

/// Whether `value` is `±p/2^j` in lowest terms.
pub fn has_power_of_two_denominator(value: &Ratio) -> bool {
    let d = value.denom().abs();
    !d.is_zero() && (&d & (&d - BigInt::one())).is_zero()
}
