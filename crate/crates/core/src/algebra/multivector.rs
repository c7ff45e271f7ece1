use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::universe::Universe;
use crate::error::{Error, Result};

/// A product of distinct generators, stored as a bitmask over declaration
/// indices. Ordered by grade, then lexicographically by index list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial(pub u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn grade(self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 >> index & 1 == 1
    }

    /// Generator indices in ascending (canonical) order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.grade().cmp(&other.grade()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & (diff & diff.wrapping_neg()) != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Inhomogeneous,
}

/// Sign of `a · b` for disjoint monomials, from moving odd generators of `b`
/// past the higher-indexed odd generators of `a`.
fn product_sign(a: u64, b: u64, odd: u64) -> f64 {
    let oa = a & odd;
    let mut ob = b & odd;
    let mut swaps = 0u32;
    while ob != 0 {
        let i = ob.trailing_zeros();
        ob &= ob - 1;
        swaps += (oa >> i >> 1).count_ones();
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Canonicalizes a generator word. `None` if a generator repeats (the word vanishes).
pub fn canonicalize(word: &[usize], odd: u64) -> Option<(f64, u64)> {
    let mut mask = 0u64;
    let mut sign = 1.0;
    for &g in word {
        let bit = 1u64 << g;
        if mask & bit != 0 {
            return None;
        }
        sign *= product_sign(mask, bit, odd);
        mask |= bit;
    }
    Some((sign, mask))
}

/// Element of the graded algebra over a [`Universe`].
///
/// Terms map monomials to complex coefficients; coefficients at or below the
/// universe tolerance are never stored.
#[derive(Debug, Clone)]
pub struct Multivector {
    universe: Arc<Universe>,
    terms: BTreeMap<Monomial, Complex64>,
}

impl PartialEq for Multivector {
    fn eq(&self, other: &Self) -> bool {
        self.same_universe(other) && self.terms == other.terms
    }
}

impl Multivector {
    pub fn zero(universe: &Arc<Universe>) -> Self {
        Multivector {
            universe: universe.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(universe: &Arc<Universe>) -> Self {
        Self::scalar(universe, Complex64::new(1.0, 0.0))
    }

    pub fn scalar(universe: &Arc<Universe>, c: Complex64) -> Self {
        let mut mv = Self::zero(universe);
        mv.accumulate(Monomial::ONE, c);
        mv
    }

    pub fn real(universe: &Arc<Universe>, x: f64) -> Self {
        Self::scalar(universe, Complex64::new(x, 0.0))
    }

    /// The generator with the given declaration index.
    pub fn generator(universe: &Arc<Universe>, index: usize) -> Result<Self> {
        universe.check_index(index)?;
        let mut mv = Self::zero(universe);
        mv.terms.insert(Monomial(1 << index), Complex64::new(1.0, 0.0));
        Ok(mv)
    }

    pub fn named(universe: &Arc<Universe>, name: &str) -> Result<Self> {
        let i = universe
            .index_of(name)
            .ok_or_else(|| Error::Universe(format!("no generator named {name}")))?;
        Self::generator(universe, i)
    }

    /// `c · g₁ g₂ … gₖ` for a word in any order; repeated generators give zero.
    pub fn word(universe: &Arc<Universe>, word: &[usize], c: Complex64) -> Result<Self> {
        for &g in word {
            universe.check_index(g)?;
        }
        let mut mv = Self::zero(universe);
        if let Some((sign, mask)) = canonicalize(word, universe.odd_mask()) {
            mv.accumulate(Monomial(mask), c * sign);
        }
        Ok(mv)
    }

    /// Builds from `(word, coefficient)` pairs, normalizing each word.
    pub fn from_terms<I>(universe: &Arc<Universe>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Complex64)>,
    {
        let mut mv = Self::zero(universe);
        for (word, c) in terms {
            for &g in &word {
                universe.check_index(g)?;
            }
            if let Some((sign, mask)) = canonicalize(&word, universe.odd_mask()) {
                mv.accumulate(Monomial(mask), c * sign);
            }
        }
        Ok(mv)
    }

    /// Builds from already-canonical monomials.
    pub fn from_monomials<I>(universe: &Arc<Universe>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Complex64)>,
    {
        let full = universe.full_mask();
        let mut mv = Self::zero(universe);
        for (m, c) in terms {
            assert_eq!(m.0 & !full, 0, "monomial outside universe");
            mv.accumulate(m, c);
        }
        mv
    }

    fn accumulate(&mut self, m: Monomial, c: Complex64) {
        let tol = self.universe.tolerance();
        let entry = self.terms.entry(m).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if entry.norm() <= tol {
            self.terms.remove(&m);
        }
    }

    fn map_terms(&self, f: impl Fn(Monomial, Complex64) -> Option<(Monomial, Complex64)>) -> Self {
        let mut out = Self::zero(&self.universe);
        for (&m, &c) in &self.terms {
            if let Some((m2, c2)) = f(m, c) {
                out.accumulate(m2, c2);
            }
        }
        out
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn same_universe(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.universe, &other.universe) || *self.universe == *other.universe
    }

    fn check_universe(&self, other: &Self) -> Result<()> {
        if self.same_universe(other) {
            Ok(())
        } else {
            Err(Error::Universe(format!(
                "operands live over different universes {} and {}",
                self.universe, other.universe
            )))
        }
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (Monomial, Complex64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: Monomial) -> Complex64 {
        self.terms.get(&m).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn body(&self) -> Complex64 {
        self.coefficient(Monomial::ONE)
    }

    pub fn soul(&self) -> Self {
        self.map_terms(|m, c| (m != Monomial::ONE).then_some((m, c)))
    }

    /// True if the element has no soul.
    pub fn is_scalar(&self) -> bool {
        self.terms.keys().all(|&m| m == Monomial::ONE)
    }

    /// Parity of the element; zero counts as even.
    pub fn parity(&self) -> Parity {
        let odd = self.universe.odd_mask();
        let mut seen_even = false;
        let mut seen_odd = false;
        for m in self.terms.keys() {
            if (m.0 & odd).count_ones().is_multiple_of(2) {
                seen_even = true;
            } else {
                seen_odd = true;
            }
        }
        match (seen_even, seen_odd) {
            (_, false) => Parity::Even,
            (false, true) => Parity::Odd,
            (true, true) => Parity::Inhomogeneous,
        }
    }

    /// Zero is both even and odd.
    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    pub fn is_odd(&self) -> bool {
        self.is_zero() || self.parity() == Parity::Odd
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_terms(|m, x| Some((m, x * c)))
    }

    pub fn scale_real(&self, x: f64) -> Self {
        self.scale(Complex64::new(x, 0.0))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_universe(other)?;
        let mut out = self.clone();
        for (&m, &c) in &other.terms {
            out.accumulate(m, c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_universe(other)?;
        let mut out = self.clone();
        for (&m, &c) in &other.terms {
            out.accumulate(m, -c);
        }
        Ok(out)
    }

    /// Graded product: generators square to zero, odd generators anticommute,
    /// even generators are central.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_universe(other)?;
        let odd = self.universe.odd_mask();
        let mut out = Self::zero(&self.universe);
        for (&a, &ca) in &self.terms {
            for (&b, &cb) in &other.terms {
                if a.0 & b.0 != 0 {
                    continue;
                }
                let sign = product_sign(a.0, b.0, odd);
                out.accumulate(Monomial(a.0 | b.0), ca * cb * sign);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.universe);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Complex conjugation of coefficients on the η sector.
    pub fn star(&self) -> Result<Self> {
        if self.terms.keys().any(|m| m.0 & self.universe.odd_mask() != 0) {
            return Err(Error::Sector(
                "star acts on the even-nilpotent sector only; odd generators present".into(),
            ));
        }
        Ok(self.map_terms(|m, c| Some((m, c.conj()))))
    }

    /// Graded superstar: antilinear on scalars, multiplicative
    /// (`(ab)^# = a^# b^#`), with `ξ^# = ξ̄`, `ξ̄^# = −ξ`, `η^# = η`.
    /// Applying it twice gives `(−1)^{|q|} q`.
    pub fn sharp(&self) -> Result<Self> {
        if self.parity() == Parity::Inhomogeneous {
            return Err(Error::Parity("sharp requires a homogeneous element".into()));
        }
        let u = &self.universe;
        let odd = u.odd_mask();
        let mut out = Self::zero(u);
        for (&m, &c) in &self.terms {
            let mut sign = 1.0;
            let mut image = Vec::with_capacity(m.grade() as usize);
            for g in m.indices() {
                let gen = &u.generators()[g];
                if !gen.is_odd() {
                    image.push(g);
                    continue;
                }
                let link = gen.pair().ok_or_else(|| {
                    Error::Sector(format!(
                        "odd generator {} has no conjugate partner for sharp",
                        gen.name()
                    ))
                })?;
                if link.barred {
                    sign = -sign;
                }
                image.push(link.partner);
            }
            if let Some((s, mask)) = canonicalize(&image, odd) {
                out.accumulate(Monomial(mask), c.conj() * (sign * s));
            }
        }
        Ok(out)
    }

    /// Left derivative with respect to the generator at `index`.
    pub fn derive(&self, index: usize) -> Result<Self> {
        self.universe.check_index(index)?;
        let bit = 1u64 << index;
        let odd_gen = self.universe.odd_mask() & bit != 0;
        let below_odd = self.universe.odd_mask() & (bit - 1);
        Ok(self.map_terms(|m, c| {
            if m.0 & bit == 0 {
                return None;
            }
            let sign = if odd_gen && (m.0 & below_odd).count_ones() % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            Some((Monomial(m.0 ^ bit), c * sign))
        }))
    }

    pub fn derive_by_name(&self, name: &str) -> Result<Self> {
        let i = self
            .universe
            .index_of(name)
            .ok_or_else(|| Error::Universe(format!("no generator named {name}")))?;
        self.derive(i)
    }

    /// Iterated Berezin integral. `gens[0]` is the innermost measure factor
    /// and is integrated first; each step is a left derivative. With this
    /// orientation `∫ ξ̄ξ` over `[ξ̄, ξ]` is `+1`.
    pub fn berezin(&self, gens: &[usize]) -> Result<Self> {
        for &g in gens {
            self.universe.check_index(g)?;
            if !self.universe.generators()[g].is_odd() {
                return Err(Error::Sector(format!(
                    "Berezin integration over even generator {}",
                    self.universe.generators()[g].name()
                )));
            }
        }
        let mut acc = self.clone();
        for &g in gens {
            acc = acc.derive(g)?;
        }
        Ok(acc)
    }

    /// `Σ aᵏ/k!` for a bodyless element; the series terminates.
    pub fn exp_nilpotent(&self) -> Result<Self> {
        let b = self.body();
        if b.norm() > self.universe.tolerance() {
            return Err(Error::Body(format!("{b}")));
        }
        let mut sum = Self::one(&self.universe);
        let mut term = Self::one(&self.universe);
        for k in 1..=self.universe.len() + 1 {
            term = (&term * self).scale_real(1.0 / k as f64);
            if term.is_zero() {
                break;
            }
            sum = &sum + &term;
        }
        Ok(sum)
    }

    /// Inverse via the terminating Neumann series on the soul.
    pub fn invert(&self) -> Result<Self> {
        self.powf(-1.0)
            .map_err(|_| Error::NotInvertible(format!("element {self} has no body and is nilpotent")))
    }

    /// Principal power `a^p = b^p Σ C(p,k) (s/b)^k` for an element with body `b ≠ 0`.
    pub fn powf(&self, p: f64) -> Result<Self> {
        let b = self.body();
        if b.norm() <= self.universe.tolerance() {
            return Err(Error::NotInvertible(format!("power {p} of an element without body")));
        }
        let x = self.soul().scale(b.inv());
        let mut sum = Self::one(&self.universe);
        let mut xk = Self::one(&self.universe);
        let mut binom = 1.0;
        for k in 1..=self.universe.len() + 1 {
            xk = &xk * &x;
            if xk.is_zero() {
                break;
            }
            binom *= (p - (k as f64 - 1.0)) / k as f64;
            sum = &sum + &xk.scale_real(binom);
        }
        let bp = if p == -1.0 { b.inv() } else { b.powf(p) };
        Ok(sum.scale(bp))
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.powf(0.5)
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        match self.try_sub(other) {
            Ok(d) => d.max_abs() <= tol,
            Err(_) => false,
        }
    }

    /// Moves the element to an equal universe, e.g. one with another tolerance.
    pub fn rehome(&self, universe: &Arc<Universe>) -> Result<Self> {
        if **universe != *self.universe {
            return Err(Error::Universe("rehome into an unequal universe".into()));
        }
        Ok(Self::from_monomials(universe, self.terms()))
    }
}

fn fmt_complex(c: Complex64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.im == 0.0 {
        write!(f, "{}", c.re)
    } else if c.re == 0.0 {
        write!(f, "{}i", c.im)
    } else if c.im < 0.0 {
        write!(f, "({}-{}i)", c.re, -c.im)
    } else {
        write!(f, "({}+{}i)", c.re, c.im)
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            fmt_complex(c, f)?;
            for g in m.indices() {
                write!(f, "*{}", self.universe.generators()[g].name())?;
            }
        }
        Ok(())
    }
}

impl<'a> Add for &'a Multivector {
    type Output = Multivector;
    /// Panics on universe mismatch; use [`Multivector::try_add`] to recover.
    fn add(self, rhs: &'a Multivector) -> Multivector {
        self.try_add(rhs).expect("universe mismatch in +")
    }
}

impl<'a> Sub for &'a Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &'a Multivector) -> Multivector {
        self.try_sub(rhs).expect("universe mismatch in -")
    }
}

impl<'a> Mul for &'a Multivector {
    type Output = Multivector;
    fn mul(self, rhs: &'a Multivector) -> Multivector {
        Multivector::mul(self, rhs).expect("universe mismatch in *")
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale_real(-1.0)
    }
}
