//! Named sequences available without an input file.

use std::fmt;
use std::str::FromStr;

use ddfa_core::sequences::{
    a131271_triangle, a_table, d_shape_closed_form, e_sequence, t_table, Tabulated, ThueMorse,
};
use num_traits::ToPrimitive;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    /// Final charges of the Thue–Morse discharging automaton.
    A,
    /// Numerators of `a`.
    B,
    /// Reduced final charges of the four-state example, every state valued 1.
    D,
    /// Numerators of `d`.
    E,
    /// Thue–Morse.
    T,
    /// The prime-twisted Thue–Morse variant.
    Tcal,
    /// The triangle read by rows.
    A131271,
}

pub const NAMES: &str = "a, b, d, e, t (thue-morse), tcal, a131271";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuiltinError {
    #[error("unknown builtin sequence `{0}` (known: {NAMES})")]
    Unknown(String),
    #[error("builtin `{0}` is rational; use its numerators instead")]
    NotInteger(Builtin),
}

impl FromStr for Builtin {
    type Err = BuiltinError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "a" => Builtin::A,
            "b" => Builtin::B,
            "d" => Builtin::D,
            "e" => Builtin::E,
            "t" | "thue-morse" => Builtin::T,
            "tcal" => Builtin::Tcal,
            "a131271" => Builtin::A131271,
            other => return Err(BuiltinError::Unknown(other.to_string())),
        })
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Builtin::A => "a",
            Builtin::B => "b",
            Builtin::D => "d",
            Builtin::E => "e",
            Builtin::T => "t",
            Builtin::Tcal => "tcal",
            Builtin::A131271 => "a131271",
        })
    }
}

impl Builtin {
    /// First `count` terms as text.
    pub fn render(self, count: usize) -> Vec<String> {
        match self {
            Builtin::A => a_table(count).iter().map(|r| r.to_string()).collect(),
            Builtin::D => (0..count as u64).map(|n| d_shape_closed_form(n).expect("total").to_string()).collect(),
            _ => self.integers(count).expect("integer builtin").terms().iter().map(|v| v.to_string()).collect(),
        }
    }

    /// First `count` terms of an integer builtin.
    pub fn integers(self, count: usize) -> Result<Tabulated, BuiltinError> {
        Ok(match self {
            Builtin::A | Builtin::D => return Err(BuiltinError::NotInteger(self)),
            Builtin::B => Tabulated::new(a_table(count).iter().map(|r| r.numer().to_i64().expect("fits")).collect()),
            Builtin::E => Tabulated::new((0..count as u64).map(|n| e_sequence(n).expect("total")).collect()),
            Builtin::T => Tabulated::of(&ThueMorse::new(), count),
            Builtin::Tcal => Tabulated::new(t_table(count)),
            Builtin::A131271 => {
                let mut depth = 0;
                while (1usize << (depth + 1)) - 1 < count {
                    depth += 1;
                }
                let flat = a131271_triangle(depth).flatten();
                Tabulated::new(flat[..count].iter().map(|&v| v as i64).collect())
            }
        })
    }
}
