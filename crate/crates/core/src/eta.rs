//! Multiqubit pure states as functions of commuting nilpotent variables.
//!
//! A ket with qubits `S` set to 1 maps to the monomial `Π_{i∈S} η_i`, so a
//! two-qubit state reads `ψ₀ + η₁ψ₁ + η₂ψ₂ + η₁η₂ψ₁₂`. Amplitude vectors are
//! indexed so that bit `i−1` of the index is the value of qubit `i` (qubit 1
//! is the leftmost ket digit): the order is `|00⟩, |10⟩, |01⟩, |11⟩`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{Monomial, Multivector, Universe, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};

/// Largest qubit count accepted; amplitude vectors have `2ⁿ` entries.
pub const MAX_QUBITS: usize = 20;

/// Universe `η₁ … ηₙ` with generators named `e1 … en`.
pub fn eta_universe(n: usize, tolerance: f64) -> Result<Arc<Universe>> {
    if n > MAX_QUBITS {
        return Err(Error::Shape(format!("{n} qubits exceed the limit of {MAX_QUBITS}")));
    }
    (1..=n)
        .fold(Universe::builder(), |b, i| b.even(format!("e{i}")))
        .tolerance(tolerance)
        .build()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaState {
    n: usize,
    f: Multivector,
}

/// Pairwise η-Wronskian. For two qubits the value is a plain number; for
/// more it is a function of the remaining variables.
#[derive(Debug, Clone, PartialEq)]
pub struct WronskianResult {
    pub value: Multivector,
    pub pair: (usize, usize),
}

/// Split of the qubits `1..=n` into two nonempty blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bipartition {
    n: usize,
    left: u64,
}

impl Bipartition {
    /// `left` holds 1-based qubit indices; the right block is the complement.
    pub fn new(n: usize, left: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &q in left {
            if q == 0 || q > n {
                return Err(Error::Split(format!("qubit {q} outside 1..={n}")));
            }
            if mask >> (q - 1) & 1 == 1 {
                return Err(Error::Split(format!("qubit {q} listed twice")));
            }
            mask |= 1 << (q - 1);
        }
        let full = (1u64 << n) - 1;
        if mask == 0 || mask == full {
            return Err(Error::Split("both blocks of a bipartition must be nonempty".into()));
        }
        Ok(Bipartition { n, left: mask })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn left_mask(&self) -> u64 {
        self.left
    }

    pub fn right_mask(&self) -> u64 {
        ((1u64 << self.n) - 1) & !self.left
    }

    pub fn left(&self) -> Vec<usize> {
        Monomial(self.left).indices().map(|i| i + 1).collect()
    }

    pub fn right(&self) -> Vec<usize> {
        Monomial(self.right_mask()).indices().map(|i| i + 1).collect()
    }
}

/// All submasks of `mask` in increasing numeric order.
fn submasks(mask: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(1 << mask.count_ones());
    let mut s = 0u64;
    loop {
        out.push(s);
        if s == mask {
            break;
        }
        s = (s.wrapping_sub(mask)) & mask;
    }
    out
}

impl EtaState {
    pub fn from_amplitudes(amps: &[Complex64], n: usize) -> Result<Self> {
        Self::from_amplitudes_with_tolerance(amps, n, DEFAULT_TOLERANCE)
    }

    pub fn from_amplitudes_with_tolerance(amps: &[Complex64], n: usize, tolerance: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Shape("a state needs at least one qubit".into()));
        }
        let u = eta_universe(n, tolerance)?;
        if amps.len() != 1 << n {
            return Err(Error::Shape(format!(
                "{} amplitudes given for {n} qubits (need {})",
                amps.len(),
                1usize << n
            )));
        }
        let f = Multivector::from_monomials(&u, amps.iter().enumerate().map(|(k, &c)| (Monomial(k as u64), c)));
        Ok(EtaState { n, f })
    }

    /// Wraps an element over a purely even universe.
    pub fn from_multivector(f: Multivector) -> Result<Self> {
        let u = f.universe();
        if u.odd_mask() != 0 {
            return Err(Error::Sector("η-functions admit even generators only".into()));
        }
        if u.is_empty() {
            return Err(Error::Shape("a state needs at least one qubit".into()));
        }
        Ok(EtaState { n: u.len(), f })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn function(&self) -> &Multivector {
        &self.f
    }

    pub fn universe(&self) -> &Arc<Universe> {
        self.f.universe()
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.f.coefficient(Monomial(index as u64))
    }

    pub fn to_amplitudes(&self) -> Vec<Complex64> {
        (0..1usize << self.n).map(|k| self.amplitude(k)).collect()
    }

    /// `Σ_I F*_I G_I`.
    pub fn scalar_product(&self, other: &EtaState) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::Shape(format!(
                "scalar product of {}-qubit and {}-qubit states",
                self.n, other.n
            )));
        }
        Ok(self.f.terms().map(|(m, c)| c.conj() * other.f.coefficient(m)).sum())
    }

    pub fn norm_squared(&self) -> f64 {
        self.f.terms().map(|(_, c)| c.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_squared();
        if n2 == 0.0 {
            return Err(Error::Domain("cannot normalize the zero state".into()));
        }
        Ok(EtaState {
            n: self.n,
            f: self.f.scale_real(1.0 / n2.sqrt()),
        })
    }

    pub fn mul(&self, other: &EtaState) -> Result<Self> {
        Ok(EtaState {
            n: self.n,
            f: self.f.mul(&other.f)?,
        })
    }

    /// `w_ij = F ∂_i∂_j F − ∂_i F ∂_j F`, with 1-based qubit indices.
    pub fn wronskian(&self, i: usize, j: usize) -> Result<WronskianResult> {
        for q in [i, j] {
            if q == 0 || q > self.n {
                return Err(Error::Index(format!("qubit {q} outside 1..={}", self.n)));
            }
        }
        if i == j {
            return Err(Error::Index(format!(
                "Wronskian needs two distinct qubits, got {i} twice"
            )));
        }
        let di = self.f.derive(i - 1)?;
        let dj = self.f.derive(j - 1)?;
        let dij = di.derive(j - 1)?;
        let value = &(&self.f * &dij) - &(&di * &dj);
        Ok(WronskianResult { value, pair: (i, j) })
    }

    /// Two-tangle `τ = 4|w₁₂|²` of a two-qubit state; lies in `[0, 1]` for
    /// normalized states and equals 1 on the Bell states.
    pub fn two_tangle(&self) -> Result<f64> {
        if self.n != 2 {
            return Err(Error::Shape(format!("two-tangle needs 2 qubits, got {}", self.n)));
        }
        Ok(4.0 * self.wronskian(1, 2)?.value.body().norm_sqr())
    }

    /// Row masks, column masks and the reshaped coefficients.
    fn coefficient_matrix(&self, split: &Bipartition) -> Result<CoefficientMatrix> {
        if split.n != self.n {
            return Err(Error::Split(format!(
                "bipartition of {} qubits applied to a {}-qubit state",
                split.n, self.n
            )));
        }
        let rows = submasks(split.left_mask());
        let cols = submasks(split.right_mask());
        let m = rows
            .iter()
            .map(|&r| cols.iter().map(|&c| self.f.coefficient(Monomial(r | c))).collect())
            .collect();
        Ok((rows, cols, m))
    }

    /// Largest 2×2 minor through the pivot (largest entry) of the reshaped
    /// coefficient matrix. Zero exactly when the matrix has rank ≤ 1.
    pub fn rank_one_residual(&self, split: &Bipartition) -> Result<f64> {
        let (_, _, m) = self.coefficient_matrix(split)?;
        Ok(rank_one_residual(&m).0)
    }

    /// Whether `F = G·G̃` across `split`, judged by `|minor| ≤ tol·‖F‖²`.
    /// For the two-qubit split the minor is the Wronskian `w₁₂`.
    pub fn is_factorable(&self, split: &Bipartition, tol: f64) -> Result<bool> {
        let scale = self.norm_squared();
        if scale == 0.0 {
            return Ok(true);
        }
        let residual = if self.n == 2 {
            if split.n != 2 {
                return Err(Error::Split("bipartition size does not match the state".into()));
            }
            self.wronskian(1, 2)?.value.body().norm()
        } else {
            self.rank_one_residual(split)?
        };
        Ok(residual <= tol * scale)
    }

    /// Factors `F = G·G̃` with `G` over the left block, normalized to unit
    /// norm with its first nonzero coefficient real positive.
    pub fn factor(&self, split: &Bipartition, tol: f64) -> Result<Option<(EtaState, EtaState)>> {
        if !self.is_factorable(split, tol)? {
            return Ok(None);
        }
        let u = self.universe();
        if self.f.is_zero() {
            return Ok(Some((
                EtaState {
                    n: self.n,
                    f: Multivector::zero(u),
                },
                EtaState {
                    n: self.n,
                    f: Multivector::one(u),
                },
            )));
        }
        let (rows, cols, m) = self.coefficient_matrix(split)?;
        let (_, (pr, pc)) = rank_one_residual(&m);
        let pivot = m[pr][pc];
        let g = Multivector::from_monomials(
            u,
            rows.iter()
                .enumerate()
                .map(|(r, &mask)| (Monomial(mask), m[r][pc] / pivot)),
        );
        let h = Multivector::from_monomials(u, cols.iter().enumerate().map(|(c, &mask)| (Monomial(mask), m[pr][c])));
        let lead = g.terms().next().map(|(_, c)| c).unwrap_or(Complex64::new(1.0, 0.0));
        let gnorm = g.terms().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt();
        let phase = lead / lead.norm();
        let fix = phase * gnorm;
        Ok(Some((
            EtaState {
                n: self.n,
                f: g.scale(fix.inv()),
            },
            EtaState {
                n: self.n,
                f: h.scale(fix),
            },
        )))
    }
}

type CoefficientMatrix = (Vec<u64>, Vec<u64>, Vec<Vec<Complex64>>);

/// Returns the residual and the pivot position.
fn rank_one_residual(m: &[Vec<Complex64>]) -> (f64, (usize, usize)) {
    let mut pivot = (0, 0);
    let mut best = -1.0;
    for (r, row) in m.iter().enumerate() {
        for (c, x) in row.iter().enumerate() {
            if x.norm() > best {
                best = x.norm();
                pivot = (r, c);
            }
        }
    }
    let (pr, pc) = pivot;
    let mut worst = 0.0f64;
    for (r, row) in m.iter().enumerate() {
        for (c, x) in row.iter().enumerate() {
            let minor = *x * m[pr][pc] - m[r][pc] * m[pr][c];
            worst = worst.max(minor.norm());
        }
    }
    (worst, pivot)
}
