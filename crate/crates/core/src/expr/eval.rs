//! Evaluation of parsed expressions into the library's state types.
//!
//! Generators are laid out as `e1..eN`, then one `(x_k, xb_k)` pair for each
//! index that appears, then `t1..tM`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{Generator, Monomial, Multivector, Universe};
use crate::error::{Error, Result};
use crate::eta::{EtaState, MAX_QUBITS};
use crate::squbit::SqubitState;
use crate::superqubit::{Level, SuperQubitState, TwoSuperQubitState};

use super::ast::{AddOp, GenSym, KetLabel, MulOp, StateExpr};

/// Builds the universe holding every generator symbol used in `e`.
pub fn expr_universe(e: &StateExpr, tolerance: f64) -> Result<Arc<Universe>> {
    let mut syms = BTreeSet::new();
    e.visit(&mut |node| {
        if let StateExpr::Gen(g) = node {
            syms.insert(*g);
        }
    });
    let max_of = |f: fn(&GenSym) -> Option<u32>| syms.iter().filter_map(f).max().unwrap_or(0);
    let etas = max_of(|g| if let GenSym::Eta(k) = g { Some(*k) } else { None });
    let thetas = max_of(|g| if let GenSym::Theta(k) = g { Some(*k) } else { None });
    let pairs: BTreeSet<u32> = syms
        .iter()
        .filter_map(|g| match g {
            GenSym::Xi(k) | GenSym::XiBar(k) => Some(*k),
            _ => None,
        })
        .collect();
    let total = etas as usize + 2 * pairs.len() + thetas as usize;
    if total > crate::algebra::MAX_GENERATORS {
        return Err(Error::Universe(format!(
            "expression needs {total} generators, more than {}",
            crate::algebra::MAX_GENERATORS
        )));
    }

    let mut gens = Vec::with_capacity(total);
    for k in 1..=etas {
        gens.push(Generator::even(format!("e{k}")));
    }
    for k in pairs {
        let i = gens.len();
        gens.push(Generator::odd(format!("x{k}")).with_pair(i + 1, false));
        gens.push(Generator::odd(format!("xb{k}")).with_pair(i, true));
    }
    for k in 1..=thetas {
        gens.push(Generator::odd(format!("t{k}")));
    }
    Universe::new(gens, tolerance)
}

/// An evaluated expression: one algebra-valued coefficient per ket, with
/// `None` collecting terms that carry no ket.
#[derive(Debug, Clone, PartialEq)]
pub struct Value {
    universe: Arc<Universe>,
    parts: BTreeMap<Option<KetLabel>, Multivector>,
}

pub fn evaluate(e: &StateExpr, tolerance: f64) -> Result<Value> {
    let universe = expr_universe(e, tolerance)?;
    eval(e, &universe)
}

fn eval(e: &StateExpr, u: &Arc<Universe>) -> Result<Value> {
    match e {
        StateExpr::Num(n) => Ok(Value::scalar(u, Multivector::scalar(u, n.value()))),
        StateExpr::Gen(g) => Ok(Value::scalar(u, Multivector::named(u, &g.name())?)),
        StateExpr::Ket(k) => {
            let mut parts = BTreeMap::new();
            parts.insert(Some(k.clone()), Multivector::one(u));
            Ok(Value {
                universe: u.clone(),
                parts,
            })
        }
        StateExpr::Neg(a) => Ok(eval(a, u)?.scale(Complex64::new(-1.0, 0.0))),
        StateExpr::Sum(first, rest) => {
            let mut acc = eval(first, u)?;
            for (op, term) in rest {
                let v = eval(term, u)?;
                let v = if *op == AddOp::Sub {
                    v.scale(Complex64::new(-1.0, 0.0))
                } else {
                    v
                };
                acc = acc.add(&v)?;
            }
            Ok(acc)
        }
        StateExpr::Product(first, rest) => {
            let mut acc = eval(first, u)?;
            for op in rest {
                acc = match op {
                    MulOp::Mul(f) => acc.mul(&eval(f, u)?)?,
                    MulOp::Div(n) => {
                        let d = n.value();
                        if d == Complex64::default() {
                            return Err(Error::Domain(format!("division by {n}")));
                        }
                        acc.scale(d.inv())
                    }
                };
            }
            Ok(acc)
        }
    }
}

impl Value {
    fn scalar(u: &Arc<Universe>, mv: Multivector) -> Self {
        let mut parts = BTreeMap::new();
        if !mv.is_zero() {
            parts.insert(None, mv);
        }
        Value {
            universe: u.clone(),
            parts,
        }
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn parts(&self) -> &BTreeMap<Option<KetLabel>, Multivector> {
        &self.parts
    }

    pub fn has_kets(&self) -> bool {
        self.parts.keys().any(Option::is_some)
    }

    fn scale(&self, c: Complex64) -> Self {
        let parts = self
            .parts
            .iter()
            .map(|(k, v)| (k.clone(), v.scale(c)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Value {
            universe: self.universe.clone(),
            parts,
        }
    }

    fn add(&self, other: &Value) -> Result<Value> {
        let mut parts = self.parts.clone();
        for (k, v) in &other.parts {
            let sum = match parts.get(k) {
                Some(w) => w.try_add(v)?,
                None => v.clone(),
            };
            if sum.is_zero() {
                parts.remove(k);
            } else {
                parts.insert(k.clone(), sum);
            }
        }
        Ok(Value {
            universe: self.universe.clone(),
            parts,
        })
    }

    fn mul(&self, other: &Value) -> Result<Value> {
        if self.has_kets() && other.has_kets() {
            return Err(Error::Arity("cannot multiply two ket expressions".into()));
        }
        let mut out = Value {
            universe: self.universe.clone(),
            parts: BTreeMap::new(),
        };
        for (ka, a) in &self.parts {
            for (kb, b) in &other.parts {
                let key = ka.clone().or_else(|| kb.clone());
                let term = Value {
                    universe: self.universe.clone(),
                    parts: BTreeMap::from([(key, a.mul(b)?)]),
                };
                out = out.add(&term)?;
            }
        }
        Ok(out)
    }

    /// The ket-free part, or an error if kets are present.
    pub fn as_multivector(&self) -> Result<Multivector> {
        if self.has_kets() {
            return Err(Error::Shape("expected a plain algebra element, found kets".into()));
        }
        Ok(self
            .parts
            .get(&None)
            .cloned()
            .unwrap_or_else(|| Multivector::zero(&self.universe)))
    }

    fn level_parts(&self, arity: usize) -> Result<BTreeMap<Vec<Level>, &Multivector>> {
        let mut out = BTreeMap::new();
        for (k, v) in &self.parts {
            match k {
                None => return Err(Error::Shape("a term carries no ket".into())),
                Some(KetLabel::Levels(l)) if l.len() == arity => {
                    out.insert(l.clone(), v);
                }
                Some(k) => {
                    return Err(Error::Shape(format!(
                        "ket {k} does not describe {arity} (super)qubit(s)"
                    )))
                }
            }
        }
        Ok(out)
    }

    fn level_arity(&self) -> Option<usize> {
        self.parts.keys().find_map(|k| match k {
            Some(KetLabel::Levels(l)) => Some(l.len()),
            _ => None,
        })
    }

    /// True if the expression can only be read as a superqubit state.
    pub fn is_super(&self) -> bool {
        self.universe.odd_mask() != 0 || self.parts.keys().flatten().any(KetLabel::has_bullet)
    }

    /// Reads the value as an η-qubit state: either a bare η-function or a
    /// sum of numeric amplitudes on `|0⟩/|1⟩` kets.
    pub fn to_eta_state(&self) -> Result<EtaState> {
        let tol = self.universe.tolerance();
        let Some(n) = self.level_arity() else {
            let f = self.as_multivector()?;
            let u = &self.universe;
            if u.odd_mask() != 0 {
                return Err(Error::Sector("η-functions admit even generators only".into()));
            }
            if u.len() > MAX_QUBITS {
                return Err(Error::Range(format!("at most {MAX_QUBITS} qubits are supported")));
            }
            let eta = crate::eta::eta_universe(u.len(), tol)?;
            return EtaState::from_multivector(Multivector::from_monomials(&eta, f.terms()));
        };
        if n > MAX_QUBITS {
            return Err(Error::Range(format!("{n} qubits exceed the limit of {MAX_QUBITS}")));
        }
        let mut amps = vec![Complex64::default(); 1 << n];
        for (levels, v) in self.level_parts(n)? {
            if !v.is_scalar() {
                return Err(Error::Shape("η-qubit ket amplitudes must be numbers".into()));
            }
            let mut index = 0;
            for (i, l) in levels.iter().enumerate() {
                match l {
                    Level::Zero => {}
                    Level::One => index |= 1 << i,
                    Level::Bullet => return Err(Error::Shape("the odd level has no η-qubit meaning".into())),
                }
            }
            amps[index] = v.body();
        }
        EtaState::from_amplitudes_with_tolerance(&amps, n, tol)
    }

    pub fn to_superqubit(&self) -> Result<SuperQubitState> {
        let parts = self.level_parts(1)?;
        let get = |l: Level| {
            parts
                .get(&vec![l])
                .map_or_else(|| Multivector::zero(&self.universe), |v| (*v).clone())
        };
        SuperQubitState::new(get(Level::Zero), get(Level::One), get(Level::Bullet))
    }

    pub fn to_superqubit2(&self) -> Result<TwoSuperQubitState> {
        let parts = self.level_parts(2)?;
        let m = std::array::from_fn(|x| {
            std::array::from_fn(|y| {
                parts
                    .get(&vec![Level::ALL[x], Level::ALL[y]])
                    .map_or_else(|| Multivector::zero(&self.universe), |v| (*v).clone())
            })
        });
        TwoSuperQubitState::new(m)
    }

    /// Reads the value as a squbit: `|B⟩` kets take even θ-monomials,
    /// `|F⟩` kets odd ones.
    pub fn to_squbit(&self) -> Result<SqubitState> {
        let u = &self.universe;
        let first_theta = u.generators().iter().position(|g| g.name().starts_with('t'));
        let theta_mask = first_theta.map_or(0, |i| u.full_mask() & !((1u64 << i) - 1));
        let n = first_theta.map_or(1, |i| u.len() - i);
        let mut s = SqubitState::new(n)?;
        for (k, v) in &self.parts {
            let (fermionic, label) = match k {
                Some(KetLabel::Sector { fermionic, label }) => (*fermionic, *label),
                None => return Err(Error::Shape("a squbit term carries no |B> or |F> ket".into())),
                Some(k) => return Err(Error::Shape(format!("ket {k} is not a squbit ket"))),
            };
            for (m, c) in v.terms() {
                if m.0 & !theta_mask != 0 {
                    return Err(Error::Shape(
                        "squbit coefficients may only involve t<k> generators".into(),
                    ));
                }
                if (m.grade() % 2 == 1) != fermionic {
                    return Err(Error::Sector(format!(
                        "{} θ-monomial attached to {}",
                        if m.grade() % 2 == 1 { "odd" } else { "even" },
                        k.as_ref().unwrap()
                    )));
                }
                let offset = first_theta.unwrap_or(0);
                let indices: Vec<usize> = Monomial(m.0).indices().map(|i| i - offset + 1).collect();
                let prev = s.coefficient(&indices, label);
                s.set(&indices, label, prev + c)?;
            }
        }
        Ok(s)
    }
}
