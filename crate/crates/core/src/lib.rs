//! Symbolic graded-nilpotent algebra and the entanglement measures built on it:
//! η-qubits, (2|1) superqubits and squbits.

pub mod algebra;
pub mod error;
pub mod eta;
pub mod expr;
pub mod report;
pub mod squbit;
pub mod superqubit;

pub use algebra::{Monomial, Multivector, Parity, Universe};
pub use error::{Error, Result};
pub use num_complex::Complex64;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/algebra.md")]
    mod algebra {}
    #[doc = include_str!("../../../book/src/eta-qubits.md")]
    mod eta_qubits {}
    #[doc = include_str!("../../../book/src/superqubits.md")]
    mod superqubits {}
    #[doc = include_str!("../../../book/src/squbits.md")]
    mod squbits {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
