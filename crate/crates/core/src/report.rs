//! Command evaluation behind the `qnil` binary.
//!
//! A state source is either an expression in the text grammar or a JSON
//! document (`superqubit2`, `squbit` or a bare multivector). [`run`] turns one
//! command and one source into a [`RunReport`].

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::algebra::{Multivector, MultivectorJson, Universe};
use crate::error::{Error, Result};
use crate::eta::{Bipartition, EtaState};
use crate::expr::{evaluate, parse, Value};
use crate::squbit::{sector_dimensions, SqubitJson, SqubitState};
use crate::superqubit::{OspMetric, SuperQubit2Json, TwoSuperQubitState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Tangle2,
    Wronskian,
    Factor,
    Sdet,
    Stau,
    Ber,
    Norm,
    SqubitNorm,
    Sectors,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Tangle2,
        Command::Wronskian,
        Command::Factor,
        Command::Sdet,
        Command::Stau,
        Command::Ber,
        Command::Norm,
        Command::SqubitNorm,
        Command::Sectors,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Tangle2 => "tangle2",
            Command::Wronskian => "wronskian",
            Command::Factor => "factor",
            Command::Sdet => "sdet",
            Command::Stau => "stau",
            Command::Ber => "ber",
            Command::Norm => "norm",
            Command::SqubitNorm => "squbit-norm",
            Command::Sectors => "sectors",
        }
    }

    /// Name of the reported quantity.
    pub fn measure(self) -> &'static str {
        match self {
            Command::Tangle2 => "two_tangle",
            Command::Wronskian => "wronskian",
            Command::Factor => "rank_one_residual",
            Command::Sdet => "superdeterminant",
            Command::Stau => "super_two_tangle",
            Command::Ber => "berezinian",
            Command::Norm => "scalar_square",
            Command::SqubitNorm => "bracket_norm",
            Command::Sectors => "bosonic_dimension",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub tolerance: f64,
    /// Qubit pair for `wronskian`, 1-based.
    pub pair: (usize, usize),
    /// Left block for `factor`, 1-based; defaults to `{1}`.
    pub split: Option<Vec<usize>>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            tolerance: crate::algebra::DEFAULT_TOLERANCE,
            pair: (1, 2),
            split: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(c: Complex64) -> Self {
        ComplexJson { re: c.re, im: c.im }
    }
}

impl From<ComplexJson> for Complex64 {
    fn from(c: ComplexJson) -> Self {
        Complex64::new(c.re, c.im)
    }
}

/// Result of one command. `body` plus `soul_terms` is the full value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub measure: String,
    pub body: ComplexJson,
    pub soul_terms: MultivectorJson,
    pub input_digest: String,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub detail: serde_json::Value,
}

impl RunReport {
    /// Reassembles the full result as a multivector.
    pub fn value(&self) -> Result<Multivector> {
        let soul = Multivector::from_json(&self.soul_terms)?;
        soul.try_add(&Multivector::scalar(soul.universe(), self.body.into()))
    }
}

/// A loaded state source.
#[derive(Debug, Clone)]
pub enum Source {
    Expr(Value),
    Multivector(Multivector),
    SuperQubit2(Box<TwoSuperQubitState>),
    Squbit(SqubitState),
}

impl Source {
    pub fn load(text: &str, tolerance: f64) -> Result<Source> {
        if !(tolerance >= 0.0 && tolerance.is_finite()) {
            return Err(Error::Range(format!(
                "tolerance must be a finite non-negative number, got {tolerance}"
            )));
        }
        if text.trim_start().starts_with('{') {
            return Self::load_json(text, tolerance);
        }
        Ok(Source::Expr(evaluate(&parse(text)?, tolerance)?))
    }

    fn load_json(text: &str, tolerance: f64) -> Result<Source> {
        let serde = |e: serde_json::Error| Error::Serde(e.to_string());
        let doc: serde_json::Value = serde_json::from_str(text).map_err(serde)?;
        let retol = |mv: &Multivector| -> Result<Multivector> { mv.rehome(&mv.universe().with_tolerance(tolerance)?) };
        match doc.get("type").and_then(|t| t.as_str()) {
            Some("superqubit2") => {
                let json: SuperQubit2Json = serde_json::from_value(doc).map_err(serde)?;
                let s = TwoSuperQubitState::from_json(&json)?;
                let u = s.universe().with_tolerance(tolerance)?;
                let mut m = s.matrix().entries().clone();
                for e in m.iter_mut().flatten() {
                    *e = e.rehome(&u)?;
                }
                Ok(Source::SuperQubit2(Box::new(TwoSuperQubitState::new(m)?)))
            }
            Some("squbit") => {
                let json: SqubitJson = serde_json::from_value(doc).map_err(serde)?;
                Ok(Source::Squbit(SqubitState::from_json(&json)?))
            }
            Some(other) => Err(Error::Serde(format!("unknown state type {other:?}"))),
            None => {
                let json: MultivectorJson = serde_json::from_value(doc).map_err(serde)?;
                Ok(Source::Multivector(retol(&Multivector::from_json(&json)?)?))
            }
        }
    }

    pub fn eta_state(&self) -> Result<EtaState> {
        match self {
            Source::Expr(v) => v.to_eta_state(),
            Source::Multivector(mv) => EtaState::from_multivector(mv.clone()),
            _ => Err(Error::Shape("expected an η-qubit state".into())),
        }
    }

    pub fn superqubit2(&self) -> Result<TwoSuperQubitState> {
        match self {
            Source::Expr(v) => v.to_superqubit2(),
            Source::SuperQubit2(s) => Ok((**s).clone()),
            _ => Err(Error::Shape("expected a two-superqubit state".into())),
        }
    }

    pub fn squbit(&self) -> Result<SqubitState> {
        match self {
            Source::Expr(v) => v.to_squbit(),
            Source::Squbit(s) => Ok(s.clone()),
            _ => Err(Error::Shape("expected a squbit state".into())),
        }
    }
}

pub fn digest(text: &str) -> String {
    let hash = Sha256::digest(text.as_bytes());
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

fn number(value: f64) -> Multivector {
    Multivector::real(&Universe::empty(), value)
}

/// Evaluates `command` on the state described by `text`.
pub fn run(command: Command, text: &str, opts: &RunOptions) -> Result<RunReport> {
    let source = Source::load(text, opts.tolerance)?;
    let (value, detail) = measure(command, &source, opts)?;
    Ok(RunReport {
        command: command.name().to_string(),
        measure: command.measure().to_string(),
        body: value.body().into(),
        soul_terms: value.soul().to_json(),
        input_digest: digest(text),
        tolerance: opts.tolerance,
        detail,
    })
}

fn measure(command: Command, source: &Source, opts: &RunOptions) -> Result<(Multivector, serde_json::Value)> {
    let none = serde_json::Value::Null;
    match command {
        Command::Tangle2 => {
            let psi = source.eta_state()?;
            let tau = psi.two_tangle()?;
            let w = psi.wronskian(1, 2)?.value;
            Ok((number(tau), json!({ "wronskian": ComplexJson::from(w.body()) })))
        }
        Command::Wronskian => {
            let psi = source.eta_state()?;
            let (i, j) = opts.pair;
            let w = psi.wronskian(i, j)?;
            Ok((w.value, json!({ "pair": [i, j] })))
        }
        Command::Factor => {
            let psi = source.eta_state()?;
            let left = opts.split.clone().unwrap_or_else(|| vec![1]);
            let split = Bipartition::new(psi.n(), &left)?;
            let residual = psi.rank_one_residual(&split)?;
            let factors = psi.factor(&split, opts.tolerance.max(1e-12))?;
            let detail = json!({
                "left": split.left(),
                "right": split.right(),
                "factorable": factors.is_some(),
                "factors": factors.map(|(g, h)| [g.function().to_json(), h.function().to_json()]),
            });
            Ok((number(residual), detail))
        }
        Command::Sdet => {
            let s = source.superqubit2()?;
            let closed = s.sdet_closed();
            let via = s.sdet_via_str(&OspMetric::standard())?;
            let detail = json!({
                "via_supertrace": { "body": ComplexJson::from(via.body()), "soul_terms": via.soul().to_json() },
            });
            Ok((closed, detail))
        }
        Command::Stau => Ok((source.superqubit2()?.super_two_tangle()?, none)),
        Command::Ber => Ok((source.superqubit2()?.berezinian()?, none)),
        Command::Norm => norm(source),
        Command::SqubitNorm => {
            let s = source.squbit()?;
            let closed = s.bracket_norm();
            let integrated = s.bracket_norm_by_integration()?;
            if (closed - integrated).abs() > 1e-9 * closed.max(1.0) {
                return Err(Error::Domain(format!(
                    "closed norm {closed} and Berezin integral {integrated} disagree"
                )));
            }
            Ok((number(closed), json!({ "N": s.n(), "berezin_integral": integrated })))
        }
        Command::Sectors => {
            let n = match source {
                Source::Expr(v) if !v.has_kets() => integer(&v.as_multivector()?)?,
                Source::Multivector(mv) => integer(mv)?,
                _ => source.squbit()?.n(),
            };
            let (b, f) = sector_dimensions(n)?;
            Ok((number(b as f64), json!({ "N": n, "bosonic": b, "fermionic": f })))
        }
    }
}

fn norm(source: &Source) -> Result<(Multivector, serde_json::Value)> {
    if let Source::Expr(v) = source {
        if v.is_super() {
            let psi = v.to_superqubit()?;
            let q = psi.q_scalar_square()?;
            return Ok((q, json!({ "kind": "superqubit" })));
        }
    }
    let psi = source.eta_state()?;
    let n2 = psi.scalar_product(&psi)?;
    Ok((
        Multivector::scalar(&Universe::empty(), n2),
        json!({ "kind": "eta", "qubits": psi.n() }),
    ))
}

fn integer(mv: &Multivector) -> Result<usize> {
    let b = mv.body();
    if !mv.is_scalar() || b.im != 0.0 || b.re.fract() != 0.0 || b.re < 1.0 || b.re > 63.0 {
        return Err(Error::Range(format!("expected an integer θ count in 1..=63, got {mv}")));
    }
    Ok(b.re as usize)
}
