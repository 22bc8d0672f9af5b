//! Relation menus for quasi-k-regular sequences.
//!
//! A menu for the level `(e, r)` lists affine combinations of lower
//! subsequences `s(k^f n + b)` with `f ≤ E`; the sequence satisfies the menu
//! when, for every `n ≥ m`, at least one option evaluates to `s(k^e n + r)`.
//! The option may differ from one `n` to the next. With a single option per
//! level and `m = 0` this is ordinary k-regularity.
//!
//! Only finitely many levels can be checked. Menus are supplied for the
//! lowest level `E + 1`; deeper levels are derived by substituting the
//! lowest-level menus into themselves (see [`QuasiRegularitySpec::options_at`]).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::discharge::{Discharging, ReducedResult, StateValuation};
use crate::sequences::{scale_to_integer, FinalChargeSequence, IntegerSequence, SequenceError, Tabulated};
use crate::Ratio;

/// Derived menus larger than this are rejected.
pub const MAX_DERIVED_OPTIONS: usize = 1 << 12;
/// Largest number of coefficient vectors a menu search will enumerate.
pub const MAX_SEARCH_VECTORS: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegularityError {
    #[error("base must be at least 2, got {0}")]
    InvalidBase(u64),
    #[error("menu level ({}, {}) must have exponent above {bound}", level.exponent, level.residue)]
    LevelNotAboveBound { level: Level, bound: u32 },
    #[error("residue {} out of range for exponent {}", level.residue, level.exponent)]
    ResidueOutOfRange { level: Level },
    #[error("menu ({}, {}) has no options", level.exponent, level.residue)]
    EmptyMenu { level: Level },
    #[error("menu stored under ({}, {}) is labelled ({}, {})", key.exponent, key.residue, label.exponent, label.residue)]
    MislabelledMenu { key: Level, label: Level },
    #[error("term s({base}^{} n + {}) is not allowed: exponent must be at most {bound} and offset below {base}^exponent", term.exponent, term.offset)]
    InvalidTerm { term: RelationTerm, base: u64, bound: u32 },
    #[error("missing menu for level ({}, {})", level.exponent, level.residue)]
    MissingMenu { level: Level },
    #[error("derived menu for level ({}, {}) exceeds {MAX_DERIVED_OPTIONS} options", level.exponent, level.residue)]
    TooManyOptions { level: Level },
    #[error("index arithmetic overflows 64 bits")]
    Overflow,
    #[error("coefficient bound must be at least 1")]
    InvalidCoefficientBound,
    #[error("search would enumerate {0} coefficient vectors")]
    SearchTooLarge(u64),
    #[error("depth must be at least 1")]
    InvalidDepth,
    #[error("window must be at least 1")]
    InvalidWindow,
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// Subsequence selector `(e, r)`, standing for `n ↦ s(k^e n + r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Level {
    pub exponent: u32,
    pub residue: u64,
}

impl Level {
    pub fn new(exponent: u32, residue: u64) -> Self {
        Level { exponent, residue }
    }
}

fn power(base: u64, exponent: u32) -> Result<u64, RegularityError> {
    base.checked_pow(exponent).ok_or(RegularityError::Overflow)
}

/// `coeff · s(k^exponent · n + offset)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationTerm {
    pub exponent: u32,
    pub offset: u64,
    pub coeff: i64,
}

impl RelationTerm {
    pub fn new(exponent: u32, offset: u64, coeff: i64) -> Self {
        RelationTerm { exponent, offset, coeff }
    }
}

/// `constant + Σ coeff · s(k^f n + b)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AffineCombination {
    pub constant: i64,
    pub terms: Vec<RelationTerm>,
}

impl AffineCombination {
    pub fn new(constant: i64, terms: Vec<RelationTerm>) -> Self {
        AffineCombination { constant, terms }
    }

    pub fn constant(value: i64) -> Self {
        AffineCombination { constant: value, terms: Vec::new() }
    }

    /// `s(n)`.
    pub fn identity() -> Self {
        AffineCombination { constant: 0, terms: vec![RelationTerm::new(0, 0, 1)] }
    }

    /// Merges repeated subsequences, drops zero coefficients and sorts terms.
    pub fn normalized(&self) -> Self {
        let mut merged: BTreeMap<(u32, u64), i64> = BTreeMap::new();
        for t in &self.terms {
            *merged.entry((t.exponent, t.offset)).or_insert(0) += t.coeff;
        }
        AffineCombination {
            constant: self.constant,
            terms: merged
                .into_iter()
                .filter(|&(_, c)| c != 0)
                .map(|((exponent, offset), coeff)| RelationTerm { exponent, offset, coeff })
                .collect(),
        }
    }

    /// Every coefficient (and the constant) multiplied by `factor`.
    pub fn scaled(&self, factor: i64) -> Self {
        AffineCombination {
            constant: self.constant * factor,
            terms: self.terms.iter().map(|t| RelationTerm { coeff: t.coeff * factor, ..*t }).collect(),
        }
    }

    /// Value at `n` for base `k`.
    pub fn eval<S: IntegerSequence + ?Sized>(&self, seq: &S, base: u64, n: u64) -> i128 {
        self.terms.iter().fold(self.constant as i128, |acc, t| {
            let index = base.pow(t.exponent) * n + t.offset;
            acc + t.coeff as i128 * seq.term(index) as i128
        })
    }

    fn nonzero_terms(&self) -> usize {
        self.terms.iter().filter(|t| t.coeff != 0).count()
    }

    /// Human readable form such as `2*s(2n+1) + 1` or `1 - s(n)`.
    pub fn render(&self, base: u64) -> String {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for t in self.terms.iter().filter(|t| t.coeff != 0) {
            let scale = base.pow(t.exponent);
            let arg = match (scale, t.offset) {
                (1, 0) => String::from("n"),
                (1, b) => format!("n+{b}"),
                (s, 0) => format!("{s}n"),
                (s, b) => format!("{s}n+{b}"),
            };
            let magnitude = t.coeff.unsigned_abs();
            let body = if magnitude == 1 { format!("s({arg})") } else { format!("{magnitude}*s({arg})") };
            parts.push((t.coeff < 0, body));
        }
        if self.constant != 0 || parts.is_empty() {
            let c = self.constant;
            if parts.is_empty() {
                return format!("{c}");
            }
            // constant first when it is positive and the first term negative
            parts.push((c < 0, format!("{}", c.unsigned_abs())));
        }
        if parts[0].0 && self.constant > 0 {
            let constant = parts.pop().expect("constant present");
            parts.insert(0, constant);
        }
        let mut out = String::new();
        for (i, (negative, body)) in parts.iter().enumerate() {
            match (i, negative) {
                (0, true) => {
                    out.push('-');
                    out.push_str(body);
                }
                (0, false) => out.push_str(body),
                (_, true) => {
                    out.push_str(" - ");
                    out.push_str(body);
                }
                (_, false) => {
                    out.push_str(" + ");
                    out.push_str(body);
                }
            }
        }
        out
    }
}

/// Finite list of admissible decompositions for one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationMenu {
    pub level: Level,
    pub options: Vec<AffineCombination>,
}

impl RelationMenu {
    pub fn new(level: Level, options: Vec<AffineCombination>) -> Self {
        RelationMenu { level, options }
    }
}

/// Base `k`, exponent bound `E`, starting index `m` and the supplied menus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiRegularitySpec {
    pub base: u64,
    pub exponent_bound: u32,
    pub start: u64,
    pub menus: BTreeMap<Level, RelationMenu>,
}

impl QuasiRegularitySpec {
    pub fn new(base: u64, exponent_bound: u32, start: u64) -> Self {
        QuasiRegularitySpec { base, exponent_bound, start, menus: BTreeMap::new() }
    }

    pub fn with_menu(mut self, menu: RelationMenu) -> Self {
        self.menus.insert(menu.level, menu);
        self
    }

    pub fn validate(&self) -> Result<(), RegularityError> {
        if self.base < 2 {
            return Err(RegularityError::InvalidBase(self.base));
        }
        for (key, menu) in &self.menus {
            if *key != menu.level {
                return Err(RegularityError::MislabelledMenu { key: *key, label: menu.level });
            }
            let level = menu.level;
            if level.exponent <= self.exponent_bound {
                return Err(RegularityError::LevelNotAboveBound { level, bound: self.exponent_bound });
            }
            if level.residue >= power(self.base, level.exponent)? {
                return Err(RegularityError::ResidueOutOfRange { level });
            }
            if menu.options.is_empty() {
                return Err(RegularityError::EmptyMenu { level });
            }
            for term in menu.options.iter().flat_map(|o| &o.terms) {
                if term.exponent > self.exponent_bound || term.offset >= power(self.base, term.exponent)? {
                    return Err(RegularityError::InvalidTerm {
                        term: *term,
                        base: self.base,
                        bound: self.exponent_bound,
                    });
                }
            }
        }
        Ok(())
    }

    /// Options for `level`: the supplied menu if there is one, otherwise a
    /// menu derived from the level-`E+1` menus.
    ///
    /// Writing `k^e n + r = k^{E+1} n' + r0` with `n' = k^{e−E−1} n + r'`,
    /// every option of menu `(E+1, r0)` evaluated at `n'` turns each term
    /// `s(k^f n' + b)` into `s(k^{f+e−E−1} n + k^f r' + b)`; terms whose new
    /// exponent still exceeds `E` are expanded recursively. Since `n' ≥ n`,
    /// the derived menu holds for `n ≥ m` whenever the supplied ones do.
    pub fn options_at(&self, level: Level) -> Result<Vec<AffineCombination>, RegularityError> {
        let mut memo = BTreeMap::new();
        self.resolve(level, &mut memo)
    }

    fn resolve(
        &self,
        level: Level,
        memo: &mut BTreeMap<Level, Vec<AffineCombination>>,
    ) -> Result<Vec<AffineCombination>, RegularityError> {
        if let Some(menu) = self.menus.get(&level) {
            return Ok(menu.options.clone());
        }
        if let Some(found) = memo.get(&level) {
            return Ok(found.clone());
        }
        let step = self.exponent_bound + 1;
        if level.exponent <= step {
            return Err(RegularityError::MissingMenu { level });
        }
        let k = self.base;
        let block = power(k, step)?;
        let shift = level.exponent - step;
        let (low, high) = (level.residue % block, level.residue / block);
        let lowest = self.resolve(Level::new(step, low), memo)?;

        let mut derived: BTreeSet<AffineCombination> = BTreeSet::new();
        for option in &lowest {
            let mut partial = vec![AffineCombination::constant(option.constant)];
            for term in &option.terms {
                let exponent = term.exponent + shift;
                let offset = power(k, term.exponent)?
                    .checked_mul(high)
                    .and_then(|v| v.checked_add(term.offset))
                    .ok_or(RegularityError::Overflow)?;
                if exponent <= self.exponent_bound {
                    for p in &mut partial {
                        p.terms.push(RelationTerm::new(exponent, offset, term.coeff));
                    }
                } else {
                    let inner = self.resolve(Level::new(exponent, offset), memo)?;
                    let mut next = Vec::with_capacity(partial.len() * inner.len());
                    for p in &partial {
                        for sub in &inner {
                            let sub = sub.scaled(term.coeff);
                            let mut combined = p.clone();
                            combined.constant += sub.constant;
                            combined.terms.extend(sub.terms);
                            next.push(combined.normalized());
                        }
                    }
                    partial = next;
                }
                if partial.len() > MAX_DERIVED_OPTIONS {
                    return Err(RegularityError::TooManyOptions { level });
                }
            }
            derived.extend(partial.into_iter().map(|p| p.normalized()));
            if derived.len() > MAX_DERIVED_OPTIONS {
                return Err(RegularityError::TooManyOptions { level });
            }
        }
        let derived: Vec<_> = derived.into_iter().collect();
        memo.insert(level, derived.clone());
        Ok(derived)
    }
}

/// Result of checking one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelReport {
    pub level: Level,
    /// Whether the menu was derived rather than supplied.
    pub derived: bool,
    pub options: Vec<AffineCombination>,
    /// Number of `n` checked.
    pub checked: u64,
    /// Per option, how many `n` it matched.
    pub hits: Vec<u64>,
    pub failures: u64,
    pub first_failure: Option<u64>,
}

/// Result of [`verify_quasi_k_regular`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub verified: bool,
    pub depth: u32,
    pub max_n: u64,
    pub levels: Vec<LevelReport>,
}

impl VerificationReport {
    pub fn level(&self, level: Level) -> Option<&LevelReport> {
        self.levels.iter().find(|l| l.level == level)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.verified {
            write!(f, "verified to depth {} (n <= {})", self.depth, self.max_n)
        } else {
            let failing: Vec<_> = self.levels.iter().filter(|l| l.failures > 0).collect();
            write!(f, "not verified: {} failing level(s)", failing.len())?;
            if let Some(first) = failing.first() {
                write!(
                    f,
                    ", first at ({}, {}) n = {}",
                    first.level.exponent,
                    first.level.residue,
                    first.first_failure.unwrap_or_default()
                )?;
            }
            Ok(())
        }
    }
}

/// Checks every level `E < e ≤ E + depth` for `start ≤ n ≤ max_n`.
pub fn verify_quasi_k_regular<S: IntegerSequence + ?Sized>(
    seq: &S,
    spec: &QuasiRegularitySpec,
    max_n: u64,
    depth: u32,
) -> Result<VerificationReport, RegularityError> {
    spec.validate()?;
    if depth == 0 {
        return Err(RegularityError::InvalidDepth);
    }
    let k = spec.base;
    let mut memo = BTreeMap::new();
    let mut levels = Vec::new();
    for exponent in spec.exponent_bound + 1..=spec.exponent_bound + depth {
        let block = power(k, exponent)?;
        block.checked_mul(max_n.saturating_add(1)).ok_or(RegularityError::Overflow)?;
        for residue in 0..block {
            let level = Level::new(exponent, residue);
            let options = spec.resolve(level, &mut memo)?;
            let mut report = LevelReport {
                level,
                derived: !spec.menus.contains_key(&level),
                hits: vec![0; options.len()],
                options,
                checked: 0,
                failures: 0,
                first_failure: None,
            };
            for n in spec.start..=max_n {
                let target = seq.term(block * n + residue) as i128;
                let mut matched = false;
                for (hit, option) in report.hits.iter_mut().zip(&report.options) {
                    if option.eval(seq, k, n) == target {
                        *hit += 1;
                        matched = true;
                    }
                }
                report.checked += 1;
                if !matched {
                    report.failures += 1;
                    report.first_failure.get_or_insert(n);
                }
            }
            levels.push(report);
        }
    }
    let verified = levels.iter().all(|l| l.failures == 0);
    Ok(VerificationReport { verified, depth, max_n, levels })
}

/// A fixed relation per level: the data of an ordinary k-regularity proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KRegularCertificate {
    pub base: u64,
    pub exponent_bound: u32,
    pub relations: Vec<(Level, AffineCombination)>,
}

impl KRegularCertificate {
    /// The certificate as a spec with singleton menus and `m = 0`.
    pub fn to_spec(&self) -> QuasiRegularitySpec {
        let mut spec = QuasiRegularitySpec::new(self.base, self.exponent_bound, 0);
        for (level, relation) in &self.relations {
            spec = spec.with_menu(RelationMenu::new(*level, vec![relation.clone()]));
        }
        spec
    }
}

/// Why a spec does not reduce to a k-regularity certificate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Refusal {
    #[error("verification did not pass")]
    NotVerified,
    #[error("starting index is {0}, not 0")]
    NonzeroStart(u64),
    #[error("menu ({}, {}) has {options} options", level.exponent, level.residue)]
    NonSingletonMenu { level: Level, options: usize },
}

/// Turns a verified spec with `m = 0` and one option per menu into the
/// corresponding list of fixed relations.
pub fn singleton_reduction(
    spec: &QuasiRegularitySpec,
    report: &VerificationReport,
) -> Result<KRegularCertificate, Refusal> {
    if !report.verified {
        return Err(Refusal::NotVerified);
    }
    if spec.start != 0 {
        return Err(Refusal::NonzeroStart(spec.start));
    }
    let supplied = spec.menus.values().map(|m| (m.level, m.options.len()));
    let checked = report.levels.iter().map(|l| (l.level, l.options.len()));
    if let Some((level, options)) = supplied.chain(checked).find(|&(_, n)| n != 1) {
        return Err(Refusal::NonSingletonMenu { level, options });
    }
    Ok(KRegularCertificate {
        base: spec.base,
        exponent_bound: spec.exponent_bound,
        relations: spec.menus.values().map(|m| (m.level, m.options[0].clone())).collect(),
    })
}

/// Parameters of [`search_relation_menus`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchParams {
    pub base: u64,
    pub exponent_bound: u32,
    pub start: u64,
    /// Exponent `e` of the level searched; must exceed the bound.
    pub level: u32,
    /// Coefficients and constant range over `[-C, C]`.
    pub coeff_bound: i64,
    pub max_n: u64,
}

/// Residue for which no cover exists within the bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchFailure {
    pub level: Level,
    pub uncovered: u64,
    pub first_uncovered: u64,
}

/// Menus found by [`search_relation_menus`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MenuSearch {
    pub params: SearchParams,
    pub menus: BTreeMap<Level, RelationMenu>,
    pub failures: Vec<SearchFailure>,
}

impl MenuSearch {
    pub fn covered(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_spec(&self) -> QuasiRegularitySpec {
        QuasiRegularitySpec {
            base: self.params.base,
            exponent_bound: self.params.exponent_bound,
            start: self.params.start,
            menus: self.menus.clone(),
        }
    }
}

struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn count_and(&self, other: &Bits) -> u32 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a & b).count_ones()).sum()
    }

    fn clear_from(&mut self, other: &Bits) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a &= !b);
    }

    fn first(&self) -> Option<usize> {
        self.0.iter().enumerate().find(|(_, w)| **w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
}

struct Candidate {
    combination: AffineCombination,
    hits: Bits,
    // smaller is simpler
    rank: (usize, u64, u32, usize),
}

/// Brute-force search for a menu at every residue of one level.
///
/// Every combination `c + Σ c_i s(k^f n + b)` over the basis `f ≤ E` with all
/// coefficients in `[-C, C]` is tried against `s(k^e n + r)` for
/// `m ≤ n ≤ N`. The menu is then built greedily: repeatedly take the option
/// matching the most still-uncovered `n`, preferring simpler options on ties,
/// until every `n` is covered. Residues that cannot be covered are reported in
/// [`MenuSearch::failures`] together with the partial menu.
pub fn search_relation_menus<S: IntegerSequence + ?Sized>(
    seq: &S,
    params: SearchParams,
) -> Result<MenuSearch, RegularityError> {
    let SearchParams { base: k, exponent_bound, start, level: exponent, coeff_bound: c, max_n } = params;
    if k < 2 {
        return Err(RegularityError::InvalidBase(k));
    }
    if c < 1 {
        return Err(RegularityError::InvalidCoefficientBound);
    }
    if exponent <= exponent_bound {
        return Err(RegularityError::LevelNotAboveBound { level: Level::new(exponent, 0), bound: exponent_bound });
    }
    let mut basis = Vec::new();
    for f in 0..=exponent_bound {
        for b in 0..power(k, f)? {
            basis.push((f, b));
        }
    }
    let width = (2 * c + 1) as u64;
    let vectors = width
        .checked_pow(basis.len() as u32)
        .filter(|&v| v <= MAX_SEARCH_VECTORS)
        .ok_or(RegularityError::SearchTooLarge(width.saturating_pow(basis.len() as u32)))?;
    let block = power(k, exponent)?;
    block.checked_mul(max_n.saturating_add(1)).ok_or(RegularityError::Overflow)?;

    let ns: Vec<u64> = (start..=max_n).collect();
    let values: Vec<Vec<i128>> = ns
        .iter()
        .map(|&n| basis.iter().map(|&(f, b)| seq.term(k.pow(f) * n + b) as i128).collect())
        .collect();

    let mut menus = BTreeMap::new();
    let mut failures = Vec::new();
    for residue in 0..block {
        let level = Level::new(exponent, residue);
        let targets: Vec<i128> = ns.iter().map(|&n| seq.term(block * n + residue) as i128).collect();

        let mut candidates: Vec<Candidate> = Vec::new();
        let mut coeffs = vec![-c; basis.len()];
        for index in 0..vectors as usize {
            if index > 0 {
                // odometer over [-C, C]^B
                for slot in coeffs.iter_mut() {
                    if *slot < c {
                        *slot += 1;
                        break;
                    }
                    *slot = -c;
                }
            }
            let mut by_constant: Vec<Option<Bits>> = (0..width).map(|_| None).collect();
            for (i, (row, target)) in values.iter().zip(&targets).enumerate() {
                let partial: i128 = row.iter().zip(&coeffs).map(|(v, &ci)| v * ci as i128).sum();
                let needed = target - partial;
                if needed.abs() <= c as i128 {
                    by_constant[(needed + c as i128) as usize].get_or_insert_with(|| Bits::new(ns.len())).set(i);
                }
            }
            for (slot, hits) in by_constant.into_iter().enumerate() {
                let Some(hits) = hits else { continue };
                let constant = slot as i64 - c;
                let terms: Vec<RelationTerm> = basis
                    .iter()
                    .zip(&coeffs)
                    .filter(|(_, &ci)| ci != 0)
                    .map(|(&(f, b), &ci)| RelationTerm::new(f, b, ci))
                    .collect();
                let combination = AffineCombination::new(constant, terms);
                let weight = combination.terms.iter().map(|t| t.coeff.unsigned_abs()).sum::<u64>()
                    + constant.unsigned_abs();
                let deepest = combination.terms.iter().map(|t| t.exponent).max().unwrap_or(0);
                let rank = (combination.nonzero_terms(), weight, deepest, candidates.len());
                candidates.push(Candidate { combination, hits, rank });
            }
        }

        let mut uncovered = Bits::new(ns.len());
        (0..ns.len()).for_each(|i| uncovered.set(i));
        let mut chosen = Vec::new();
        while uncovered.count() > 0 {
            let best = candidates
                .iter()
                .enumerate()
                .map(|(i, cand)| (cand.hits.count_and(&uncovered), i))
                .filter(|&(gain, _)| gain > 0)
                .max_by(|a, b| a.0.cmp(&b.0).then_with(|| candidates[b.1].rank.cmp(&candidates[a.1].rank)));
            let Some((_, i)) = best else { break };
            uncovered.clear_from(&candidates[i].hits);
            chosen.push(candidates[i].combination.clone());
        }
        if let Some(first) = uncovered.first() {
            failures.push(SearchFailure { level, uncovered: uncovered.count() as u64, first_uncovered: ns[first] });
        }
        if !chosen.is_empty() {
            menus.insert(level, RelationMenu::new(level, chosen));
        }
    }
    Ok(MenuSearch { params, menus, failures })
}

/// Kernel statistics up to one depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelDepth {
    pub depth: u32,
    /// Distinct truncated vectors among all `s(k^e n + r)` with `e ≤ depth`.
    pub distinct: usize,
    /// Rank over the rationals of those vectors.
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelReport {
    pub base: u64,
    pub window: usize,
    pub depths: Vec<KernelDepth>,
}

impl KernelReport {
    pub fn at(&self, depth: u32) -> Option<&KernelDepth> {
        self.depths.iter().find(|d| d.depth == depth)
    }
}

/// Row-echelon basis over the rationals, grown one vector at a time.
struct Echelon {
    rows: Vec<(usize, Vec<Ratio>)>,
}

impl Echelon {
    fn insert(&mut self, v: &[i64]) {
        let mut v: Vec<Ratio> = v.iter().map(|&x| Ratio::from_integer(x.into())).collect();
        for (pivot, row) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let factor = v[*pivot].clone();
            for (x, r) in v.iter_mut().zip(row) {
                *x -= &factor * r;
            }
        }
        if let Some(pivot) = v.iter().position(|x| !x.is_zero()) {
            let inv = Ratio::one() / &v[pivot];
            v.iter_mut().for_each(|x| *x *= &inv);
            self.rows.push((pivot, v));
        }
    }
}

/// Distinct-vector counts and ranks of the truncated k-kernel for depths
/// `0..=depth`.
pub fn k_kernel<S: IntegerSequence + ?Sized>(
    seq: &S,
    base: u64,
    depth: u32,
    window: usize,
) -> Result<KernelReport, RegularityError> {
    if base < 2 {
        return Err(RegularityError::InvalidBase(base));
    }
    if window == 0 {
        return Err(RegularityError::InvalidWindow);
    }
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut echelon = Echelon { rows: Vec::new() };
    let mut depths = Vec::new();
    for e in 0..=depth {
        let block = power(base, e)?;
        block.checked_mul(window as u64).ok_or(RegularityError::Overflow)?;
        for r in 0..block {
            let v: Vec<i64> = (0..window as u64).map(|n| seq.term(block * n + r)).collect();
            if seen.insert(v.clone()) {
                echelon.insert(&v);
            }
        }
        depths.push(KernelDepth { depth: e, distinct: seen.len(), rank: echelon.rows.len() });
    }
    Ok(KernelReport { base, window, depths })
}

/// Settings for [`scaled_charge_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConjectureParams {
    pub exponent_bound: u32,
    pub start: u64,
    pub coeff_bound: i64,
    pub max_n: u64,
    pub depth: u32,
}

impl Default for ConjectureParams {
    fn default() -> Self {
        ConjectureParams { exponent_bound: 1, start: 1, coeff_bound: 2, max_n: 2048, depth: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConjectureOutcome {
    /// Menus were found at the lowest level and verified to `depth`.
    Verified { depth: u32 },
    /// Some term is not a power of the base away from an integer, or has
    /// no numeric reduced value.
    NotScalable { n: u64 },
    /// The search found no cover within the coefficient bound.
    NoCover,
    /// Menus were found but deeper levels failed verification.
    VerificationFailed,
}

/// What the scaled-charge experiment found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjectureFinding {
    pub params: ConjectureParams,
    pub base: u64,
    /// The integer sequence obtained by scaling, over the range checked.
    pub scaled: Tabulated,
    pub search: Option<MenuSearch>,
    pub verification: Option<VerificationReport>,
    pub outcome: ConjectureOutcome,
}

impl ConjectureFinding {
    pub fn succeeded(&self) -> bool {
        matches!(self.outcome, ConjectureOutcome::Verified { .. })
    }
}

/// Multiplies each reduced final charge by the least power of the base that
/// makes it an integer, then searches menus at level `E + 1` and verifies the
/// result to the requested depth. This is an experiment on finite data, not a
/// proof.
pub fn scaled_charge_check<D: Discharging + ?Sized>(
    automaton: &D,
    base: u64,
    valuation: &StateValuation,
    params: ConjectureParams,
) -> Result<ConjectureFinding, RegularityError> {
    if params.depth == 0 {
        return Err(RegularityError::InvalidDepth);
    }
    let sequence = FinalChargeSequence::new(automaton, base)?;
    let block = power(base, params.exponent_bound + params.depth)?;
    let len = block
        .checked_mul(params.max_n + 1)
        .and_then(|v| usize::try_from(v).ok())
        .ok_or(RegularityError::Overflow)?;

    let mut terms = Vec::with_capacity(len);
    for n in 0..len as u64 {
        let scaled = match sequence.reduced(valuation, n) {
            ReducedResult::Numeric(value) => scale_to_integer(&value, base).and_then(|v| i64::try_from(v).ok()),
            ReducedResult::Formal { .. } => None,
        };
        match scaled {
            Some(v) => terms.push(v),
            None => {
                return Ok(ConjectureFinding {
                    params,
                    base,
                    scaled: Tabulated::new(terms),
                    search: None,
                    verification: None,
                    outcome: ConjectureOutcome::NotScalable { n },
                })
            }
        }
    }
    let scaled = Tabulated::new(terms);
    let search = search_relation_menus(
        &scaled,
        SearchParams {
            base,
            exponent_bound: params.exponent_bound,
            start: params.start,
            level: params.exponent_bound + 1,
            coeff_bound: params.coeff_bound,
            max_n: params.max_n,
        },
    )?;
    if !search.covered() {
        return Ok(ConjectureFinding {
            params,
            base,
            scaled,
            search: Some(search),
            verification: None,
            outcome: ConjectureOutcome::NoCover,
        });
    }
    let verification = verify_quasi_k_regular(&scaled, &search.to_spec(), params.max_n, params.depth)?;
    let outcome = if verification.verified {
        ConjectureOutcome::Verified { depth: params.depth }
    } else {
        ConjectureOutcome::VerificationFailed
    };
    Ok(ConjectureFinding { params, base, scaled, search: Some(search), verification: Some(verification), outcome })
}
