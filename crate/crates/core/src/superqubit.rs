//! (2|1) superqubits: two even levels `|0⟩, |1⟩` with even amplitudes and one
//! odd level `|•⟩` with an odd amplitude, all valued in the graded algebra.
//!
//! Two-superqubit states are stored as a 3×3 supermatrix `ψ_XY` with the
//! odd level last, so the blocks are `[[ψ_jk, ψ_j•], [ψ_•k, ψ_••]]`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{Multivector, MultivectorJson, Universe};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Zero,
    One,
    Bullet,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Zero, Level::One, Level::Bullet];

    pub fn index(self) -> usize {
        match self {
            Level::Zero => 0,
            Level::One => 1,
            Level::Bullet => 2,
        }
    }

    pub fn is_odd(self) -> bool {
        self == Level::Bullet
    }

    /// ASCII label: `0`, `1` or `.` for the odd level.
    pub fn symbol(self) -> char {
        match self {
            Level::Zero => '0',
            Level::One => '1',
            Level::Bullet => '.',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            '0' => Some(Level::Zero),
            '1' => Some(Level::One),
            '.' | '•' => Some(Level::Bullet),
            _ => None,
        }
    }
}

fn expect_parity(mv: &Multivector, odd: bool, what: &str) -> Result<()> {
    let ok = if odd { mv.is_odd() } else { mv.is_even() };
    if ok {
        Ok(())
    } else {
        Err(Error::Parity(format!(
            "{what} must be {} but is {:?}",
            if odd { "odd" } else { "even" },
            mv.parity()
        )))
    }
}

fn expect_universe(entries: &[&Multivector]) -> Result<()> {
    let first = entries[0];
    if entries.iter().all(|e| e.same_universe(first)) {
        Ok(())
    } else {
        Err(Error::Universe(
            "superstate amplitudes live over different universes".into(),
        ))
    }
}

/// One superqubit `|0⟩ψ₀ + |1⟩ψ₁ + |•⟩ψ_•`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperQubitState {
    psi0: Multivector,
    psi1: Multivector,
    psi_dot: Multivector,
}

impl SuperQubitState {
    pub fn new(psi0: Multivector, psi1: Multivector, psi_dot: Multivector) -> Result<Self> {
        expect_universe(&[&psi0, &psi1, &psi_dot])?;
        expect_parity(&psi0, false, "ψ₀")?;
        expect_parity(&psi1, false, "ψ₁")?;
        expect_parity(&psi_dot, true, "ψ_•")?;
        Ok(SuperQubitState { psi0, psi1, psi_dot })
    }

    /// A state with plain complex even amplitudes and no odd part.
    pub fn from_complex(universe: &Arc<Universe>, a0: Complex64, a1: Complex64) -> Self {
        SuperQubitState {
            psi0: Multivector::scalar(universe, a0),
            psi1: Multivector::scalar(universe, a1),
            psi_dot: Multivector::zero(universe),
        }
    }

    pub fn amplitude(&self, level: Level) -> &Multivector {
        match level {
            Level::Zero => &self.psi0,
            Level::One => &self.psi1,
            Level::Bullet => &self.psi_dot,
        }
    }

    pub fn universe(&self) -> &Arc<Universe> {
        self.psi0.universe()
    }

    /// `⟨ψ,φ⟩ = ψ_i^# φ_i − ψ_•^# φ_•`.
    pub fn q_inner(&self, other: &SuperQubitState) -> Result<Multivector> {
        let even = &(&self.psi0.sharp()? * &other.psi0) + &(&self.psi1.sharp()? * &other.psi1);
        let odd = self.psi_dot.sharp()?.mul(&other.psi_dot)?;
        even.try_sub(&odd)
    }

    /// `⟨ψ,ψ⟩`; in general carries a soul.
    pub fn q_scalar_square(&self) -> Result<Multivector> {
        self.q_inner(self)
    }

    /// `δ^{ij} ψ_i^# ψ_j`, the even-level part of the scalar square.
    pub fn even_weight(&self) -> Result<Multivector> {
        Ok(&(&self.psi0.sharp()? * &self.psi0) + &(&self.psi1.sharp()? * &self.psi1))
    }

    /// Rescales to unit scalar square:
    /// `n^{-1/2} (|k⟩ (1 + ½ n⁻¹ ψ_•^#ψ_•) ψ_k + |•⟩ ψ_•)` with `n = δ^{ij}ψ_i^#ψ_j`.
    ///
    /// The result has scalar square `1 + ¼ n⁻² (ψ_•^#ψ_•)²`, exactly one
    /// whenever `(ψ_•^#ψ_•)² = 0`.
    pub fn normalize(&self) -> Result<Self> {
        let n = self.even_weight()?;
        if n.body().re <= n.universe().tolerance() {
            return Err(Error::NotInvertible(
                "even amplitudes have no body; the state cannot be normalized".into(),
            ));
        }
        let scale = n.powf(-0.5)?;
        let odd_weight = &self.psi_dot.sharp()? * &self.psi_dot;
        let correction = &Multivector::one(n.universe()) + &(&n.invert()? * &odd_weight).scale_real(0.5);
        let even_factor = &scale * &correction;
        Ok(SuperQubitState {
            psi0: &even_factor * &self.psi0,
            psi1: &even_factor * &self.psi1,
            psi_dot: &scale * &self.psi_dot,
        })
    }

    /// Graded tensor product. `m[X][Y] = (−1)^{|a_X||Y|} a_X b_Y`: moving the
    /// ket `|Y⟩` past an odd coefficient `a_X` costs a sign when `|Y⟩` is odd.
    pub fn tensor(&self, other: &SuperQubitState) -> Result<TwoSuperQubitState> {
        expect_universe(&[&self.psi0, &other.psi0])?;
        let mut m = empty_entries(self.universe());
        for x in Level::ALL {
            for y in Level::ALL {
                let prod = self.amplitude(x) * other.amplitude(y);
                m[x.index()][y.index()] = if x.is_odd() && y.is_odd() { -&prod } else { prod };
            }
        }
        TwoSuperQubitState::new(m)
    }
}

fn empty_entries(u: &Arc<Universe>) -> [[Multivector; 3]; 3] {
    std::array::from_fn(|_| std::array::from_fn(|_| Multivector::zero(u)))
}

/// 3×3 matrix over the algebra, with block structure `(2|1) × (2|1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperMatrix {
    m: [[Multivector; 3]; 3],
}

impl SuperMatrix {
    pub fn new(m: [[Multivector; 3]; 3]) -> Result<Self> {
        let flat: Vec<&Multivector> = m.iter().flatten().collect();
        expect_universe(&flat)?;
        Ok(SuperMatrix { m })
    }

    pub fn from_numeric(universe: &Arc<Universe>, m: &[[Complex64; 3]; 3]) -> Self {
        SuperMatrix {
            m: std::array::from_fn(|r| std::array::from_fn(|c| Multivector::scalar(universe, m[r][c]))),
        }
    }

    pub fn entry(&self, r: usize, c: usize) -> &Multivector {
        &self.m[r][c]
    }

    pub fn entries(&self) -> &[[Multivector; 3]; 3] {
        &self.m
    }

    /// Ordered matrix product (entries need not commute).
    pub fn mul(&self, other: &SuperMatrix) -> Result<SuperMatrix> {
        let u = self.m[0][0].universe();
        let mut out = empty_entries(u);
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                let mut acc = Multivector::zero(u);
                for k in 0..3 {
                    acc = acc.try_add(&self.m[r][k].mul(&other.m[k][c])?)?;
                }
                *cell = acc;
            }
        }
        Ok(SuperMatrix { m: out })
    }

    /// `[[A, B], [C, D]]^{ST} = [[Aᵀ, Cᵀ], [−Bᵀ, Dᵀ]]`.
    pub fn supertranspose(&self) -> SuperMatrix {
        let m = &self.m;
        SuperMatrix {
            m: std::array::from_fn(|r| {
                std::array::from_fn(|c| {
                    // the new odd row holds −Bᵀ
                    if r == 2 && c < 2 {
                        -&m[c][r]
                    } else {
                        m[c][r].clone()
                    }
                })
            }),
        }
    }

    /// `str M = tr A − tr D`.
    pub fn supertrace(&self) -> Multivector {
        &(&self.m[0][0] + &self.m[1][1]) - &self.m[2][2]
    }
}

/// Numeric orthosymplectic metric `E = [[ε, 0], [0, 1]]`, `ε` the 2×2 unit antisymmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OspMetric {
    e: [[Complex64; 3]; 3],
}

impl OspMetric {
    pub fn new(e: [[Complex64; 3]; 3]) -> Result<Self> {
        let tol = 1e-14;
        if [e[0][2], e[1][2], e[2][0], e[2][1]].iter().any(|x| x.norm() > tol) {
            return Err(Error::Shape("metric must have vanishing even-odd blocks".into()));
        }
        let det = (e[0][0] * e[1][1] - e[0][1] * e[1][0]) * e[2][2];
        if det.norm() <= tol {
            return Err(Error::NotInvertible("metric is singular".into()));
        }
        Ok(OspMetric { e })
    }

    pub fn standard() -> Self {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        OspMetric {
            e: [[z, one, z], [-one, z, z], [z, z, one]],
        }
    }

    pub fn matrix(&self) -> &[[Complex64; 3]; 3] {
        &self.e
    }
}

impl Default for OspMetric {
    fn default() -> Self {
        Self::standard()
    }
}

/// Two superqubits `Σ_{XY} |XY⟩ ψ_XY`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSuperQubitState {
    psi: SuperMatrix,
}

impl TwoSuperQubitState {
    pub fn new(m: [[Multivector; 3]; 3]) -> Result<Self> {
        let psi = SuperMatrix::new(m)?;
        for x in Level::ALL {
            for y in Level::ALL {
                let odd = x.is_odd() != y.is_odd();
                let label = format!("ψ_{}{}", x.symbol(), y.symbol());
                expect_parity(psi.entry(x.index(), y.index()), odd, &label)?;
            }
        }
        Ok(TwoSuperQubitState { psi })
    }

    /// Plain complex amplitudes; the odd blocks must be zero.
    pub fn from_complex(universe: &Arc<Universe>, m: &[[Complex64; 3]; 3]) -> Self {
        TwoSuperQubitState::new(SuperMatrix::from_numeric(universe, m).m)
            .expect("numeric entries in the odd blocks must be zero")
    }

    pub fn get(&self, x: Level, y: Level) -> &Multivector {
        self.psi.entry(x.index(), y.index())
    }

    pub fn matrix(&self) -> &SuperMatrix {
        &self.psi
    }

    pub fn universe(&self) -> &Arc<Universe> {
        self.psi.entry(0, 0).universe()
    }

    /// `Ber ψ = det(ψ_jk − ψ_j• ψ_••⁻¹ ψ_•k) ψ_••⁻¹`; needs an invertible `ψ_••`.
    pub fn berezinian(&self) -> Result<Multivector> {
        use Level::*;
        let dinv = self.get(Bullet, Bullet).invert().map_err(|_| {
            Error::NotInvertible(format!(
                "ψ_•• = {} has no body, so the Berezinian is undefined",
                self.get(Bullet, Bullet)
            ))
        })?;
        let schur = |j: Level, k: Level| -> Multivector {
            self.get(j, k) - &(&(self.get(j, Bullet) * &dinv) * self.get(Bullet, k))
        };
        let det = &(&schur(Zero, Zero) * &schur(One, One)) - &(&schur(Zero, One) * &schur(One, Zero));
        Ok(&det * &dinv)
    }

    /// `ψ₀₀ψ₁₁ − ψ₀₁ψ₁₀ + ψ₀•ψ₁• + ψ•₀ψ•₁ − ½ψ••²`.
    pub fn sdet_closed(&self) -> Multivector {
        use Level::*;
        let p = |a: Multivector, b: &Multivector| -> Multivector { &a + b };
        let det = &(self.get(Zero, Zero) * self.get(One, One)) - &(self.get(Zero, One) * self.get(One, Zero));
        let odd_cols = self.get(Zero, Bullet) * self.get(One, Bullet);
        let odd_rows = self.get(Bullet, Zero) * self.get(Bullet, One);
        let dd = self.get(Bullet, Bullet) * self.get(Bullet, Bullet);
        &p(p(det, &odd_cols), &odd_rows) - &dd.scale_real(0.5)
    }

    /// `½ str((ψE)^{ST} E ψ)`.
    pub fn sdet_via_str(&self, metric: &OspMetric) -> Result<Multivector> {
        let e = SuperMatrix::from_numeric(self.universe(), metric.matrix());
        let left = self.psi.mul(&e)?.supertranspose();
        let product = left.mul(&e)?.mul(&self.psi)?;
        Ok(product.supertrace().scale_real(0.5))
    }

    /// `sτ = 4 sdet (sdet)^#`.
    pub fn super_two_tangle(&self) -> Result<Multivector> {
        let s = self.sdet_closed();
        Ok((&s * &s.sharp()?).scale_real(4.0))
    }

    pub fn to_json(&self) -> SuperQubit2Json {
        let mut entries = BTreeMap::new();
        for x in Level::ALL {
            for y in Level::ALL {
                entries.insert(format!("{}{}", x.symbol(), y.symbol()), self.get(x, y).to_json());
            }
        }
        SuperQubit2Json {
            kind: "superqubit2".into(),
            entries,
        }
    }

    pub fn from_json(json: &SuperQubit2Json) -> Result<Self> {
        if json.kind != "superqubit2" {
            return Err(Error::Serde(format!("expected type superqubit2, got {}", json.kind)));
        }
        let mut parsed = BTreeMap::new();
        for (key, mv) in &json.entries {
            let chars: Vec<char> = key.chars().collect();
            let levels = match chars.as_slice() {
                [a, b] => Level::from_symbol(*a).zip(Level::from_symbol(*b)),
                _ => None,
            };
            let (x, y) = levels.ok_or_else(|| Error::Serde(format!("bad entry key {key:?}")))?;
            parsed.insert((x, y), Multivector::from_json(mv)?);
        }
        let universe = match parsed.values().next() {
            Some(mv) => mv.universe().clone(),
            None => Universe::empty(),
        };
        let mut m = empty_entries(&universe);
        for ((x, y), mv) in parsed {
            m[x.index()][y.index()] = mv.rehome(&universe)?;
        }
        Self::new(m)
    }
}

impl fmt::Display for TwoSuperQubitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for x in Level::ALL {
            for y in Level::ALL {
                let v = self.get(x, y);
                if v.is_zero() {
                    continue;
                }
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "|{}{}>({v})", x.symbol(), y.symbol())?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `{"type":"superqubit2","entries":{"00":mv, …, "..":mv}}`, `.` standing for `•`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperQubit2Json {
    #[serde(rename = "type")]
    pub kind: String,
    pub entries: BTreeMap<String, MultivectorJson>,
}
