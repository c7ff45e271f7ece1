use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default magnitude below which coefficients are pruned.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Hard cap on generator count: monomials are stored as `u64` bitmasks.
pub const MAX_GENERATORS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenParity {
    /// Commuting nilpotent (η-type).
    Even,
    /// Anticommuting (Grassmann, ξ-type).
    Odd,
}

/// Link between the two members of a conjugate pair `(ξ, ξ̄)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairLink {
    pub partner: usize,
    /// True on the conjugate member `ξ̄`.
    pub barred: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    name: String,
    parity: GenParity,
    pair: Option<PairLink>,
}

impl Generator {
    pub fn even(name: impl Into<String>) -> Self {
        Generator {
            name: name.into(),
            parity: GenParity::Even,
            pair: None,
        }
    }

    pub fn odd(name: impl Into<String>) -> Self {
        Generator {
            name: name.into(),
            parity: GenParity::Odd,
            pair: None,
        }
    }

    pub fn with_pair(mut self, partner: usize, barred: bool) -> Self {
        self.pair = Some(PairLink { partner, barred });
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn parity(&self) -> GenParity {
        self.parity
    }

    pub fn pair(&self) -> Option<PairLink> {
        self.pair
    }

    pub fn is_odd(&self) -> bool {
        self.parity == GenParity::Odd
    }
}

/// The ordered list of generators an element lives over.
///
/// Declaration order is the canonical order: monomials are stored with
/// generators sorted by declaration index, and reordering odd generators
/// into that order contributes the permutation sign.
#[derive(Debug, Clone)]
pub struct Universe {
    generators: Vec<Generator>,
    odd_mask: u64,
    tolerance: f64,
}

impl PartialEq for Universe {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators
    }
}

impl Universe {
    pub fn new(generators: Vec<Generator>, tolerance: f64) -> Result<Arc<Self>> {
        if generators.len() > MAX_GENERATORS {
            return Err(Error::Universe(format!(
                "{} generators exceed the limit of {MAX_GENERATORS}",
                generators.len()
            )));
        }
        if !(tolerance >= 0.0 && tolerance.is_finite()) {
            return Err(Error::Universe(format!("invalid tolerance {tolerance}")));
        }
        let mut seen = HashSet::new();
        for g in &generators {
            if g.name.is_empty() {
                return Err(Error::Universe("empty generator name".into()));
            }
            if !seen.insert(g.name.as_str()) {
                return Err(Error::Universe(format!("duplicate generator {}", g.name)));
            }
        }
        for (i, g) in generators.iter().enumerate() {
            let Some(link) = g.pair else { continue };
            let partner = generators
                .get(link.partner)
                .ok_or_else(|| Error::Universe(format!("{} is paired with a missing generator", g.name)))?;
            let back = partner
                .pair
                .ok_or_else(|| Error::Universe(format!("pair link {} -> {} is one-sided", g.name, partner.name)))?;
            if link.partner == i || back.partner != i || back.barred == link.barred || !g.is_odd() || !partner.is_odd()
            {
                return Err(Error::Universe(format!(
                    "{} and {} do not form a conjugate pair of distinct odd generators",
                    g.name, partner.name
                )));
            }
        }
        let odd_mask = generators
            .iter()
            .enumerate()
            .filter(|(_, g)| g.is_odd())
            .fold(0u64, |m, (i, _)| m | (1 << i));
        Ok(Arc::new(Universe {
            generators,
            odd_mask,
            tolerance,
        }))
    }

    /// A universe with no generators; elements over it are plain complex numbers.
    pub fn empty() -> Arc<Self> {
        Self::builder().build().expect("empty universe is valid")
    }

    pub fn builder() -> UniverseBuilder {
        UniverseBuilder {
            generators: Vec::new(),
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, index: usize) -> Option<&Generator> {
        self.generators.get(index)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn odd_mask(&self) -> u64 {
        self.odd_mask
    }

    pub fn even_mask(&self) -> u64 {
        self.full_mask() & !self.odd_mask
    }

    pub fn full_mask(&self) -> u64 {
        if self.generators.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.generators.len()) - 1
        }
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Same generators, different pruning tolerance.
    pub fn with_tolerance(&self, tolerance: f64) -> Result<Arc<Self>> {
        Universe::new(self.generators.clone(), tolerance)
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index < self.generators.len() {
            Ok(())
        } else {
            Err(Error::Universe(format!(
                "generator index {index} outside a universe of {}",
                self.generators.len()
            )))
        }
    }
}

impl fmt::Display for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let p = if g.is_odd() { "odd" } else { "even" };
            write!(f, "{}:{p}", g.name)?;
        }
        write!(f, "]")
    }
}

pub struct UniverseBuilder {
    generators: Vec<Generator>,
    tolerance: f64,
}

impl UniverseBuilder {
    pub fn even(mut self, name: impl Into<String>) -> Self {
        self.generators.push(Generator::even(name));
        self
    }

    pub fn odd(mut self, name: impl Into<String>) -> Self {
        self.generators.push(Generator::odd(name));
        self
    }

    /// Declares `ξ` then `ξ̄`, linked as a conjugate pair.
    pub fn odd_pair(mut self, name: impl Into<String>, conjugate: impl Into<String>) -> Self {
        let i = self.generators.len();
        self.generators.push(Generator::odd(name).with_pair(i + 1, false));
        self.generators.push(Generator::odd(conjugate).with_pair(i, true));
        self
    }

    pub fn tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn build(self) -> Result<Arc<Universe>> {
        Universe::new(self.generators, self.tolerance)
    }
}
