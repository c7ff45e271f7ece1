//! JSON form of a [`Multivector`]:
//!
//! ```json
//! {"universe":[{"name":"x1","parity":"odd","pair":"xb1"},
//!              {"name":"xb1","parity":"odd","pair":"x1","bar":true}],
//!  "terms":[{"gens":["x1","xb1"],"re":1.0,"im":0.0}]}
//! ```

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::multivector::Multivector;
use super::universe::{Generator, Universe, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub name: String,
    pub parity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub bar: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub gens: Vec<String>,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultivectorJson {
    pub universe: Vec<GeneratorJson>,
    pub terms: Vec<TermJson>,
}

pub fn universe_to_json(u: &Universe) -> Vec<GeneratorJson> {
    u.generators()
        .iter()
        .map(|g| GeneratorJson {
            name: g.name().to_string(),
            parity: if g.is_odd() { "odd" } else { "even" }.to_string(),
            pair: g.pair().map(|p| u.generators()[p.partner].name().to_string()),
            bar: g.pair().is_some_and(|p| p.barred),
        })
        .collect()
}

pub fn universe_from_json(gens: &[GeneratorJson], tolerance: f64) -> Result<Arc<Universe>> {
    let index = |name: &str| {
        gens.iter()
            .position(|g| g.name == name)
            .ok_or_else(|| Error::Serde(format!("pair partner {name} is not declared")))
    };
    let mut out = Vec::with_capacity(gens.len());
    for g in gens {
        let mut gen = match g.parity.as_str() {
            "even" => Generator::even(&g.name),
            "odd" => Generator::odd(&g.name),
            other => return Err(Error::Serde(format!("unknown parity {other:?}"))),
        };
        if let Some(p) = &g.pair {
            gen = gen.with_pair(index(p)?, g.bar);
        }
        out.push(gen);
    }
    Universe::new(out, tolerance)
}

/// Terms with generator names in canonical order.
pub fn terms_to_json(mv: &Multivector) -> Vec<TermJson> {
    let u = mv.universe();
    mv.terms()
        .map(|(m, c)| TermJson {
            gens: m.indices().map(|i| u.generators()[i].name().to_string()).collect(),
            re: c.re,
            im: c.im,
        })
        .collect()
}

pub fn terms_from_json(u: &Arc<Universe>, terms: &[TermJson]) -> Result<Multivector> {
    let mut words = Vec::with_capacity(terms.len());
    for t in terms {
        let word = t
            .gens
            .iter()
            .map(|n| {
                u.index_of(n)
                    .ok_or_else(|| Error::Serde(format!("term uses undeclared generator {n}")))
            })
            .collect::<Result<Vec<_>>>()?;
        words.push((word, Complex64::new(t.re, t.im)));
    }
    Multivector::from_terms(u, words)
}

impl Multivector {
    pub fn to_json(&self) -> MultivectorJson {
        MultivectorJson {
            universe: universe_to_json(self.universe()),
            terms: terms_to_json(self),
        }
    }

    pub fn from_json(json: &MultivectorJson) -> Result<Self> {
        let u = universe_from_json(&json.universe, DEFAULT_TOLERANCE)?;
        terms_from_json(&u, &json.terms)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("multivector JSON is always serializable")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let json: MultivectorJson = serde_json::from_str(text).map_err(|e| Error::Serde(e.to_string()))?;
        Self::from_json(&json)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn universe() -> Arc<Universe> {
        Universe::builder()
            .even("e1")
            .odd_pair("x1", "xb1")
            .odd("t1")
            .build()
            .unwrap()
    }

    #[test]
    fn documented_shape() {
        let u = universe();
        let mv = Multivector::word(&u, &[2, 1], Complex64::new(-1.0, 0.0)).unwrap();
        assert_eq!(
            mv.to_json_string(),
            r#"{"universe":[{"name":"e1","parity":"even"},{"name":"x1","parity":"odd","pair":"xb1"},{"name":"xb1","parity":"odd","pair":"x1","bar":true},{"name":"t1","parity":"odd"}],"terms":[{"gens":["x1","xb1"],"re":1.0,"im":0.0}]}"#
        );
    }

    #[test]
    fn unordered_input_is_normalized() {
        let text = r#"{"universe":[{"name":"a","parity":"odd"},{"name":"b","parity":"odd"}],
                       "terms":[{"gens":["b","a"],"re":2.0,"im":0.5}]}"#;
        let mv = Multivector::from_json_str(text).unwrap();
        assert_eq!(mv.to_json().terms[0].gens, vec!["a", "b"]);
        assert_eq!(mv.to_json().terms[0].re, -2.0);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(Multivector::from_json_str(r#"{"universe":[{"name":"a","parity":"weird"}],"terms":[]}"#).is_err());
        assert!(Multivector::from_json_str(r#"{"universe":[],"terms":[{"gens":["q"],"re":1,"im":0}]}"#).is_err());
        assert!(Multivector::from_json_str("[1,2]").is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            coeffs in proptest::collection::vec((0u64..16, -1e6f64..1e6, -1e6f64..1e6), 0..12)
        ) {
            let u = universe();
            let terms = coeffs.into_iter().map(|(mask, re, im)| (
                    (0..4).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>(),
                    Complex64::new(re, im),
                ));
            let mv = Multivector::from_terms(&u, terms).unwrap();
            let text = mv.to_json_string();
            let back = Multivector::from_json_str(&text).unwrap();
            prop_assert_eq!(&back, &mv);
            prop_assert_eq!(back.to_json_string(), text);
        }
    }
}
