//! Text front end: a small expression language for states.
//!
//! ```
//! use qnil_core::expr::{evaluate, parse};
//!
//! let e = parse("(|10> + |01>)/sqrt(2)  # Werner state").unwrap();
//! let psi = evaluate(&e, 1e-12).unwrap().to_eta_state().unwrap();
//! assert!((psi.two_tangle().unwrap() - 1.0).abs() < 1e-12);
//! ```

mod ast;
mod eval;
mod parser;

pub use ast::{AddOp, GenSym, KetLabel, MulOp, Number, StateExpr};
pub use eval::{evaluate, expr_universe, Value};
pub use parser::{parse, MAX_DEPTH};
