//! Exact computer-algebra kernel for q-deformed quantum spaces: the extended
//! braided line and the extended three-dimensional q-deformed Euclidean space.
//!
//! Modules are layered bottom-up: [`qscalar`] (coefficient field),
//! [`rmatrix`] (R-matrices, projectors, relations, metric), [`ncalgebra`]
//! (normal ordering, products, conjugation, actions), [`qfunc`] (commutative
//! functions and Jackson calculus), [`starcalc`] (star products), [`hopf`]
//! (translations, antipodes, Taylor rules), [`pairexp`] (pairings and
//! q-exponentials), [`evolution`] (time evolution), [`grassmann`]
//! (superanalysis on the braided line) and [`report`] (verification reports).

pub mod error;
pub mod qscalar;
pub mod space;
pub mod matrix;
pub mod rmatrix;
pub mod ncalgebra;
pub mod qfunc;
pub mod starcalc;
pub mod hopf;
pub mod pairexp;
pub mod evolution;
pub mod grassmann;
pub mod report;

pub use error::{QError, QResult};
pub use qscalar::{qfact, qnum, FactKind, GaussRat, QScalar};
pub use space::Space;
