//! Squbits: states `b|0⟩⊗|B⟩ + f_i θ_i|0⟩⊗|F_i⟩ + b_ij θ_iθ_j|0⟩⊗|B_ij⟩ + …`
//! with complex coefficients. Auxiliary θ's soak up the odd character of the
//! fermionic kets, so the Berezin-integrated norm is a plain sum of squares.
//!
//! A coefficient is keyed by its θ index set (strictly increasing) and a
//! label distinguishing internal kets within the same sector. Even index
//! sets belong to bosonic kets, odd ones to fermionic kets.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{Monomial, Multivector, Universe, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::superqubit::{Level, SuperQubitState};

/// Largest auxiliary θ count.
pub const MAX_THETAS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    Bosonic,
    Fermionic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SqubitKey {
    /// θ indices as a bitmask, bit `i−1` for `θ_i`.
    pub thetas: Monomial,
    pub label: u32,
}

impl SqubitKey {
    pub fn sector(&self) -> Sector {
        if self.thetas.grade().is_multiple_of(2) {
            Sector::Bosonic
        } else {
            Sector::Fermionic
        }
    }

    /// 1-based, strictly increasing.
    pub fn indices(&self) -> Vec<usize> {
        self.thetas.indices().map(|i| i + 1).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqubitState {
    n: usize,
    coeffs: BTreeMap<SqubitKey, Complex64>,
}

/// Action of `θ_i` or `θ̄^i` on the Fock-like θ part of a squbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliffordOp {
    Theta(usize),
    ThetaBar(usize),
}

impl CliffordOp {
    pub fn apply(self, psi: &SqubitState) -> Result<SqubitState> {
        match self {
            CliffordOp::Theta(i) => psi.apply_theta(i),
            CliffordOp::ThetaBar(i) => psi.apply_thetabar(i),
        }
    }

    /// `{a, b} ψ = a(bψ) + b(aψ)`.
    pub fn anticommutator(a: CliffordOp, b: CliffordOp, psi: &SqubitState) -> Result<SqubitState> {
        let ab = a.apply(&b.apply(psi)?)?;
        let ba = b.apply(&a.apply(psi)?)?;
        Ok(ab.add(&ba))
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_THETAS {
        Err(Error::Range(format!("θ count {n} outside 1..={MAX_THETAS}")))
    } else {
        Ok(())
    }
}

impl SqubitState {
    /// The zero state with `n` auxiliary θ's.
    pub fn new(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(SqubitState {
            n,
            coeffs: BTreeMap::new(),
        })
    }

    /// `b|0⟩⊗|B⟩ + f θ|0⟩⊗|F⟩`.
    pub fn simplest(b: Complex64, f: Complex64) -> Self {
        let mut s = Self::new(1).expect("one θ is in range");
        s.set(&[], 0, b).expect("valid key");
        s.set(&[1], 0, f).expect("valid key");
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn key(&self, indices: &[usize], label: u32) -> Result<SqubitKey> {
        let mut mask = 0u64;
        let mut prev = 0;
        for &i in indices {
            if i == 0 || i > self.n {
                return Err(Error::Index(format!("θ index {i} outside 1..={}", self.n)));
            }
            if i <= prev {
                return Err(Error::Index(format!(
                    "θ indices {indices:?} are not strictly increasing"
                )));
            }
            prev = i;
            mask |= 1 << (i - 1);
        }
        Ok(SqubitKey {
            thetas: Monomial(mask),
            label,
        })
    }

    /// Sets the coefficient of `θ_{i₁}…θ_{iₖ}|0⟩ ⊗ |K_label⟩`.
    pub fn set(&mut self, indices: &[usize], label: u32, c: Complex64) -> Result<()> {
        let key = self.key(indices, label)?;
        if c == Complex64::default() {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, c);
        }
        Ok(())
    }

    pub fn coefficient(&self, indices: &[usize], label: u32) -> Complex64 {
        let mask = indices.iter().fold(0u64, |m, &i| m | (1 << (i - 1)));
        self.coeffs
            .get(&SqubitKey {
                thetas: Monomial(mask),
                label,
            })
            .copied()
            .unwrap_or_default()
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (SqubitKey, Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    fn insert_add(&mut self, key: SqubitKey, c: Complex64) {
        let e = self.coeffs.entry(key).or_default();
        *e += c;
        if *e == Complex64::default() {
            self.coeffs.remove(&key);
        }
    }

    pub fn add(&self, other: &SqubitState) -> SqubitState {
        let mut out = SqubitState {
            n: self.n.max(other.n),
            coeffs: self.coeffs.clone(),
        };
        for (&k, &c) in &other.coeffs {
            out.insert_add(k, c);
        }
        out
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n {
            Err(Error::Index(format!("θ index {i} outside 1..={}", self.n)))
        } else {
            Ok(())
        }
    }

    /// `θ_i`: occupies slot `i`, sign `(−1)^{#occupied below i}`.
    pub fn apply_theta(&self, i: usize) -> Result<SqubitState> {
        self.check_index(i)?;
        let bit = 1u64 << (i - 1);
        let mut out = SqubitState {
            n: self.n,
            coeffs: BTreeMap::new(),
        };
        for (k, &c) in &self.coeffs {
            if k.thetas.0 & bit != 0 {
                continue;
            }
            let sign = if (k.thetas.0 & (bit - 1)).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            out.insert_add(
                SqubitKey {
                    thetas: Monomial(k.thetas.0 | bit),
                    label: k.label,
                },
                c * sign,
            );
        }
        Ok(out)
    }

    /// `θ̄^i`: empties slot `i` with the same sign rule.
    pub fn apply_thetabar(&self, i: usize) -> Result<SqubitState> {
        self.check_index(i)?;
        let bit = 1u64 << (i - 1);
        let mut out = SqubitState {
            n: self.n,
            coeffs: BTreeMap::new(),
        };
        for (k, &c) in &self.coeffs {
            if k.thetas.0 & bit == 0 {
                continue;
            }
            let sign = if (k.thetas.0 & (bit - 1)).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            out.insert_add(
                SqubitKey {
                    thetas: Monomial(k.thetas.0 ^ bit),
                    label: k.label,
                },
                c * sign,
            );
        }
        Ok(out)
    }

    /// `⟨⟨ψ|ψ⟩⟩ = |b|² + Σ|f_i|² + Σ|b_ij|² + …`.
    pub fn bracket_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    /// The same norm obtained by carrying out `∫ e^{Σθ̄θ} ⟨ψ|ψ⟩` symbolically.
    ///
    /// Bras conjugate coefficients and reverse θ words into θ̄ words; the
    /// internal kets are orthonormal. The measure pairs each `θ̄_i` with
    /// `θ_i` so that `∫ θ̄_iθ_i = +1`.
    pub fn bracket_norm_by_integration(&self) -> Result<f64> {
        let u = theta_universe(self.n)?;
        let theta = |i: usize| 2 * i;
        let thetabar = |i: usize| 2 * i + 1;

        let mut exponent = Multivector::zero(&u);
        for i in 0..self.n {
            exponent = &exponent + &Multivector::word(&u, &[thetabar(i), theta(i)], Complex64::new(1.0, 0.0))?;
        }
        let measure = exponent.exp_nilpotent()?;

        let mut bra_ket = Multivector::zero(&u);
        for (k, &c) in &self.coeffs {
            let idx: Vec<usize> = k.thetas.indices().collect();
            let mut word: Vec<usize> = idx.iter().rev().map(|&i| thetabar(i)).collect();
            word.extend(idx.iter().map(|&i| theta(i)));
            bra_ket = &bra_ket + &Multivector::word(&u, &word, Complex64::new(c.norm_sqr(), 0.0))?;
        }

        let order: Vec<usize> = (0..self.n).flat_map(|i| [thetabar(i), theta(i)]).collect();
        let value = (&measure * &bra_ket).berezin(&order)?;
        if !value.is_scalar() || value.body().im.abs() > u.tolerance() {
            return Err(Error::Domain(format!("Berezin norm is not a real number: {value}")));
        }
        Ok(value.body().re)
    }

    pub fn to_json(&self) -> SqubitJson {
        SqubitJson {
            kind: "squbit".into(),
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| SqubitTermJson {
                    idx: k.indices(),
                    label: k.label,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    pub fn from_json(json: &SqubitJson) -> Result<Self> {
        if json.kind != "squbit" {
            return Err(Error::Serde(format!("expected type squbit, got {}", json.kind)));
        }
        let mut s = Self::new(json.n)?;
        for t in &json.coeffs {
            let key = s.key(&t.idx, t.label)?;
            s.insert_add(key, Complex64::new(t.re, t.im));
        }
        Ok(s)
    }
}

/// Universe `θ₁, θ̄₁, …, θ_N, θ̄_N` of Grassmann variables used in the integral.
pub fn theta_universe(n: usize) -> Result<Arc<Universe>> {
    check_n(n)?;
    (1..=n)
        .fold(Universe::builder(), |b, i| {
            b.odd_pair(format!("th{i}"), format!("thb{i}"))
        })
        .tolerance(DEFAULT_TOLERANCE)
        .build()
}

/// `(bosonic, fermionic) = (2^{N−1}, 2^{N−1})` basis states.
pub fn sector_dimensions(n: usize) -> Result<(u64, u64)> {
    if n == 0 || n > 63 {
        return Err(Error::Range(format!("θ count {n} outside 1..=63")));
    }
    let half = 1u64 << (n - 1);
    Ok((half, half))
}

/// Maps `|0⟩ψ₀ + |1⟩ψ₁ + |•⟩cξ` to a squbit with one θ: `ψ₀, ψ₁` become
/// bosonic coefficients (labels 0 and 1) and `c` the fermionic one.
pub fn embed_superqubit(psi: &SuperQubitState) -> Result<SqubitState> {
    let scalar = |mv: &Multivector, what: &str| -> Result<Complex64> {
        if mv.is_scalar() {
            Ok(mv.body())
        } else {
            Err(Error::Shape(format!("{what} = {mv} is not a plain complex number")))
        }
    };
    let b0 = scalar(psi.amplitude(Level::Zero), "ψ₀")?;
    let b1 = scalar(psi.amplitude(Level::One), "ψ₁")?;
    let dot = psi.amplitude(Level::Bullet);
    let f = match dot.terms().collect::<Vec<_>>().as_slice() {
        [] => Complex64::default(),
        [(m, c)] if m.grade() == 1 => *c,
        _ => {
            return Err(Error::Shape(format!(
                "ψ_• = {dot} is not a multiple of a single odd generator"
            )))
        }
    };
    let mut s = SqubitState::new(1)?;
    s.set(&[], 0, b0)?;
    s.set(&[], 1, b1)?;
    s.set(&[1], 0, f)?;
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqubitTermJson {
    pub idx: Vec<usize>,
    #[serde(default, skip_serializing_if = "is_zero_label")]
    pub label: u32,
    pub re: f64,
    pub im: f64,
}

fn is_zero_label(l: &u32) -> bool {
    *l == 0
}

/// `{"type":"squbit","N":n,"coeffs":[{"idx":[i,j,…],"re":x,"im":y}…]}`;
/// `label` is optional and defaults to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqubitJson {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub coeffs: Vec<SqubitTermJson>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn simplest_norm() {
        let s = SqubitState::simplest(c(0.6, 0.), c(0., 0.8));
        assert!((s.bracket_norm() - 1.0).abs() < 1e-15);
        assert!((s.bracket_norm_by_integration().unwrap() - 1.0).abs() < 1e-12);
        let vac = SqubitState::simplest(c(1., 0.), c(0., 0.));
        assert_eq!(vac.bracket_norm(), 1.0);
    }

    #[test]
    fn two_theta_example() {
        let mut s = SqubitState::new(2).unwrap();
        for idx in [&[][..], &[1], &[2], &[1, 2]] {
            s.set(idx, 0, c(0.5, 0.)).unwrap();
        }
        assert!((s.bracket_norm() - 1.0).abs() < 1e-15);
        assert!((s.bracket_norm_by_integration().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn theta_action() {
        let mut vac = SqubitState::new(2).unwrap();
        vac.set(&[], 0, c(1., 0.)).unwrap();
        let t1 = vac.apply_theta(1).unwrap();
        assert_eq!(t1.coefficient(&[1], 0), c(1., 0.));
        assert!(t1.apply_theta(1).unwrap().coefficients().next().is_none());
        // θ₁θ₂|0⟩ vs θ₂θ₁|0⟩
        let t21 = t1.apply_theta(2).unwrap();
        let t12 = vac.apply_theta(2).unwrap().apply_theta(1).unwrap();
        assert_eq!(t21.coefficient(&[1, 2], 0), c(-1., 0.));
        assert_eq!(t12.coefficient(&[1, 2], 0), c(1., 0.));
        assert!(matches!(vac.apply_theta(3), Err(Error::Index(_))));
        assert!(matches!(vac.apply_thetabar(0), Err(Error::Index(_))));
    }

    #[test]
    fn sectors() {
        assert_eq!(sector_dimensions(1).unwrap(), (1, 1));
        assert_eq!(sector_dimensions(2).unwrap(), (2, 2));
        assert_eq!(sector_dimensions(3).unwrap(), (4, 4));
        assert!(matches!(sector_dimensions(0), Err(Error::Range(_))));
    }

    #[test]
    fn key_validation() {
        let mut s = SqubitState::new(3).unwrap();
        assert!(s.set(&[2, 1], 0, c(1., 0.)).is_err());
        assert!(s.set(&[1, 1], 0, c(1., 0.)).is_err());
        assert!(s.set(&[4], 0, c(1., 0.)).is_err());
        assert!(matches!(SqubitState::new(0), Err(Error::Range(_))));
        assert!(matches!(SqubitState::new(13), Err(Error::Range(_))));
    }

    #[test]
    fn embedding() {
        let u = Universe::builder().odd_pair("x1", "xb1").build().unwrap();
        let z = Multivector::zero(&u);
        let s = SuperQubitState::new(Multivector::one(&u), z.clone(), z.clone()).unwrap();
        let e = embed_superqubit(&s).unwrap();
        assert_eq!(e.coefficient(&[], 0), c(1., 0.));
        assert_eq!(e.coefficient(&[], 1), c(0., 0.));
        assert_eq!(e.coefficient(&[1], 0), c(0., 0.));

        let cc = c(0.3, 0.4);
        let odd = SuperQubitState::new(z.clone(), z.clone(), Multivector::named(&u, "x1").unwrap().scale(cc)).unwrap();
        let e = embed_superqubit(&odd).unwrap();
        assert_eq!(e.coefficient(&[1], 0), cc);
        assert!((e.bracket_norm() - cc.norm_sqr()).abs() < 1e-15);

        let r = std::f64::consts::FRAC_1_SQRT_2;
        let half = SuperQubitState::new(
            Multivector::real(&u, r),
            z.clone(),
            Multivector::named(&u, "x1").unwrap().scale_real(r),
        )
        .unwrap();
        let e = embed_superqubit(&half).unwrap();
        assert!((e.bracket_norm() - 1.0).abs() < 1e-15);
        assert!((e.bracket_norm_by_integration().unwrap() - 1.0).abs() < 1e-12);

        let two = Multivector::word(&u, &[0, 1], c(1., 0.)).unwrap();
        let bad = SuperQubitState::new(&Multivector::one(&u) + &two, z.clone(), z).unwrap();
        assert!(matches!(embed_superqubit(&bad), Err(Error::Shape(_))));
    }

    #[test]
    fn json_shape() {
        let s = SqubitState::simplest(c(1., 0.), c(0., 2.));
        let text = serde_json::to_string(&s.to_json()).unwrap();
        assert_eq!(
            text,
            r#"{"type":"squbit","N":1,"coeffs":[{"idx":[],"re":1.0,"im":0.0},{"idx":[1],"re":0.0,"im":2.0}]}"#
        );
        let back = SqubitState::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, s);
        let bad: SqubitJson =
            serde_json::from_str(r#"{"type":"squbit","N":1,"coeffs":[{"idx":[2],"re":1,"im":0}]}"#).unwrap();
        assert!(SqubitState::from_json(&bad).is_err());
    }

    fn arb_state(n: usize) -> impl Strategy<Value = SqubitState> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0, 0u32..2), 1usize << n).prop_map(move |v| {
            let mut s = SqubitState::new(n).unwrap();
            for (mask, (re, im, label)) in v.into_iter().enumerate() {
                let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
                s.set(&idx, label, c(re, im)).unwrap();
            }
            s
        })
    }

    proptest! {
        #[test]
        fn closed_norm_matches_integration(s in arb_state(3)) {
            let a = s.bracket_norm();
            let b = s.bracket_norm_by_integration().unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn clifford_relations(s in arb_state(3), i in 1usize..=3, j in 1usize..=3) {
            use CliffordOp::*;
            let mixed = CliffordOp::anticommutator(ThetaBar(i), Theta(j), &s).unwrap();
            if i == j {
                prop_assert_eq!(mixed.coefficients().count(), s.coefficients().count());
                for (k, x) in s.coefficients() {
                    prop_assert!((mixed.coefficient(&k.indices(), k.label) - x).norm() < 1e-15);
                }
            } else {
                prop_assert!(mixed.coefficients().next().is_none());
            }
            prop_assert!(CliffordOp::anticommutator(Theta(i), Theta(j), &s).unwrap().coefficients().next().is_none());
            prop_assert!(CliffordOp::anticommutator(ThetaBar(i), ThetaBar(j), &s).unwrap().coefficients().next().is_none());
        }
    }
}
