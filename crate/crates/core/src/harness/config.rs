//! Flat `key = value` experiment configuration files.
//!
//! ```text
//! # PAC run on a rare-clique
//! scenario = rare-clique
//! aleph = 10000
//! n = 2000
//! u = 40
//! k = 2
//! gamma = 0.05
//! mask = positive-only
//! trials = 2000
//! delta = 0.05
//! seed = 1
//! output = out/rare
//! ```
//!
//! Recognized keys: `scenario`, `aleph` (size of the global example),
//! `density`, `n`, `u`, `k`, `a` (checked against the target arity), `gamma`,
//! `mask` (`identity`, `positive-only` or `random-drop:<keep>`), `trials`,
//! `delta`, `seed`, `output`, `positive_only`, `target` (`name/arity`),
//! `hypothesis` (repeatable; formulas of one theory separated by `;`),
//! `outer` and `inner` (sizes of the expected-error protocol, 0 to skip).

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::example::Example;
use crate::harness::generators::Scenario;
use crate::harness::pac::{MaskKind, PacConfig};
use crate::logic::{parse_theory, Predicate, Theory};
use crate::reasoner::parse_gamma;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub aleph: usize,
    pub density: f64,
    /// Theory sources; the scenario's defaults when none are given.
    pub hypotheses: Vec<String>,
    pub pac: PacConfig,
    pub output: Option<PathBuf>,
    pub outer: u64,
    pub inner: u64,
}

const KEYS: [&str; 18] = [
    "scenario",
    "aleph",
    "density",
    "n",
    "u",
    "k",
    "a",
    "gamma",
    "mask",
    "trials",
    "delta",
    "seed",
    "output",
    "positive_only",
    "target",
    "hypothesis",
    "outer",
    "inner",
];

fn bad(key: &str, value: &str) -> Error {
    Error::InvalidParameter(format!("bad value `{value}` for `{key}`"))
}

fn num<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str, default: Option<T>) -> Result<T> {
    match map.get(key) {
        Some(v) => v.parse().map_err(|_| bad(key, v)),
        None => default.ok_or_else(|| Error::InvalidParameter(format!("missing key `{key}`"))),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut hypotheses = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Syntax {
                    line: i + 1,
                    column: 1,
                    message: "expected `key = value`".into(),
                })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(Error::InvalidParameter(format!("unknown key `{key}` on line {}", i + 1)));
            }
            if key == "hypothesis" {
                hypotheses.push(value.replace(';', "\n"));
            } else if map.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::InvalidParameter(format!("key `{key}` given twice")));
            }
        }

        let scenario_name = map
            .get("scenario")
            .ok_or_else(|| Error::InvalidParameter("missing key `scenario`".into()))?
            .clone();
        let scenario = Scenario::parse(&scenario_name)?;
        let target = match map.get("target") {
            Some(t) => Predicate::parse(t)?,
            None => scenario.target(),
        };
        if let Some(a) = map.get("a") {
            if a.parse::<usize>().ok() != Some(target.arity) {
                return Err(Error::InvalidParameter(format!(
                    "a = {a} does not match target {target}"
                )));
            }
        }
        let gamma = map.get("gamma").map(|g| parse_gamma(g)).transpose()?;
        let mask = MaskKind::parse(map.get("mask").map_or("positive-only", String::as_str))?;
        let positive_only = match map.get("positive_only").map(String::as_str) {
            None | Some("false") => false,
            Some("true") => true,
            Some(v) => return Err(bad("positive_only", v)),
        };
        let pac = PacConfig {
            k: num(&map, "k", None)?,
            n: num(&map, "n", None)?,
            u: num(&map, "u", None)?,
            gamma,
            mask,
            target,
            positive_only,
            trials: num(&map, "trials", None)?,
            delta: num(&map, "delta", Some(0.05))?,
            seed: num(&map, "seed", Some(0))?,
        };
        Ok(ExperimentConfig {
            scenario: scenario_name,
            aleph: num(&map, "aleph", None)?,
            density: num(&map, "density", Some(0.1))?,
            hypotheses,
            pac,
            output: map.get("output").map(PathBuf::from),
            outer: num(&map, "outer", Some(0))?,
            inner: num(&map, "inner", Some(0))?,
        })
    }

    /// The global example and hypothesis class described by the configuration.
    pub fn build(&self) -> Result<(Example, Vec<Theory>)> {
        let scenario = Scenario::parse(&self.scenario)?;
        let aleph = scenario.generate(self.aleph, self.density, self.pac.seed)?;
        let hypotheses = if self.hypotheses.is_empty() {
            scenario.hypotheses()
        } else {
            self.hypotheses.iter().map(|h| parse_theory(h)).collect::<Result<_>>()?
        };
        Ok((aleph, hypotheses))
    }
}
