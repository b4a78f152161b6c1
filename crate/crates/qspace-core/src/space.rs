//! The two quantum spaces handled by the kernel.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Which quantum space an object lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    /// Extended braided line: time `X⁰` and one coordinate `X¹`.
    Line,
    /// Extended three-dimensional q-deformed Euclidean space: `X⁰, X⁺, X³, X⁻`.
    Euclid3,
}

impl Space {
    /// Number of coordinates including time.
    pub fn dim(self) -> usize {
        match self {
            Space::Line => 2,
            Space::Euclid3 => 4,
        }
    }
    /// Index labels in the internal generator order.
    pub fn labels(self) -> &'static [&'static str] {
        match self {
            Space::Line => &["0", "1"],
            Space::Euclid3 => &["0", "+", "3", "-"],
        }
    }
    /// Name used in reports and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Space::Line => "line",
            Space::Euclid3 => "euclid3",
        }
    }
    pub fn parse(s: &str) -> Option<Space> {
        match s {
            "line" => Some(Space::Line),
            "euclid3" => Some(Space::Euclid3),
            _ => None,
        }
    }
    /// Power `s` with `∂̂ = q^s ∂` for spatial derivatives.
    pub fn hat_power(self) -> i32 {
        match self {
            Space::Line => 1,
            Space::Euclid3 => 6,
        }
    }
    /// Power `w` with `Λ X = q^w X Λ` for spatial coordinates.
    pub fn lambda_weight(self) -> i32 {
        match self {
            Space::Line => 1,
            Space::Euclid3 => 4,
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
