//! Graded algebra generated by commuting nilpotents (η) and anticommuting
//! Grassmann generators (ξ, optionally paired with conjugates ξ̄).

mod json;
mod multivector;
mod universe;

pub use json::{
    terms_from_json, terms_to_json, universe_from_json, universe_to_json, GeneratorJson, MultivectorJson, TermJson,
};
pub use multivector::{Monomial, Multivector, Parity};
pub use universe::{GenParity, Generator, PairLink, Universe, UniverseBuilder, DEFAULT_TOLERANCE, MAX_GENERATORS};
