//! Run configuration: a JSON file, overridden field by field by flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use dunkl_core::scalar::int;
use dunkl_core::{Family, Rational, Scalar};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Verify,
    Simulate,
    Freeze,
    Roots,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Lemma1,
    Lemma2,
    Similarity,
    Theorem1,
    Corollary1,
    GroundState,
    TransformedHamiltonian,
    Unconfined,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Lemma2 => "lemma2",
            Suite::Similarity => "similarity",
            Suite::Theorem1 => "theorem1",
            Suite::Corollary1 => "corollary1",
            Suite::GroundState => "ground-state",
            Suite::TransformedHamiltonian => "transformed-hamiltonian",
            Suite::Unconfined => "unconfined",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Process {
    /// Continuous part only; stays in the starting chamber.
    #[default]
    Radial,
    /// With reflection jumps.
    Dunkl,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeArg {
    #[default]
    EulerAdaptive,
    EulerFixed,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryArg {
    #[default]
    Fail,
    Fold,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RootsKind {
    Hermite,
    Laguerre,
}

/// A multiplicity written as a JSON number or as a string such as `"1/2"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(untagged)]
pub enum Multiplicity {
    Number(f64),
    Text(String),
}

impl Multiplicity {
    pub fn to_rational(&self) -> Result<Rational, CliError> {
        match self {
            // Display gives the shortest decimal that round-trips.
            Multiplicity::Number(v) if v.is_finite() => parse_rational(&v.to_string()),
            Multiplicity::Number(v) => Err(CliError::Config(format!("multiplicity {v} is not finite"))),
            Multiplicity::Text(s) => parse_rational(s),
        }
    }
}

/// Every field is optional; commands fill in their own defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    /// `A`, `B`, `D` or `I2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    /// `N - 1` for A, `N` for B and D, `m` for I2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    /// One value per root orbit: one for A and D, two for B and I2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<Multiplicity>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<usize>,
    /// Time horizon.
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Rational arithmetic (verify lemma1 and lemma2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Output directory; standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Polynomial part of the test function, e.g. `x1^2 - 1/2 x2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<String>,
    /// Eigenvalue of the test function in the transformed time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub process: Option<Process>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundaryArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observe: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_steps: Option<bool>,
    /// Number of particles or roots.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ode: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub laguerre_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<RootsKind>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f; } )*
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(mut self, top: RunConfig) -> Self {
        overlay!(self, top; command, suite, family, rank, multiplicities, omega, k_scale, seed,
            ensemble, t, dt, exact, tol, out, format, points, poly, lambda, x0, process, scheme,
            boundary, observe, record_steps, n, k_list, ode, laguerre_a, roots);
        self
    }

    pub fn expect_command(&self, c: Command) -> Result<(), CliError> {
        match self.command {
            Some(other) if other != c => Err(CliError::Config(format!(
                "config is for command {other:?}, not {c:?}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn family(&self) -> Result<Family, CliError> {
        let s = self.family.as_deref().unwrap_or("A");
        Family::from_str(s).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn rational_multiplicities(&self, family: Family) -> Result<Vec<Rational>, CliError> {
        match &self.multiplicities {
            None => Ok(vec![int(1); family.multiplicity_count()]),
            Some(ms) => ms.iter().map(Multiplicity::to_rational).collect(),
        }
    }

    pub fn float_multiplicities(&self, family: Family) -> Result<Vec<f64>, CliError> {
        Ok(self.rational_multiplicities(family)?.iter().map(Scalar::to_f64).collect())
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    /// The config as embedded in outputs; the output location is left out
    /// so that runs into different directories produce identical files.
    pub fn to_json(&self) -> serde_json::Value {
        let mut c = self.clone();
        c.out = None;
        serde_json::to_value(c).expect("config serializes")
    }
}

pub fn schema() -> serde_json::Value {
    serde_json::to_value(schemars::schema_for!(RunConfig)).expect("schema serializes")
}

/// `3`, `-1/2`, `0.35` and `2.5e-1` are all read exactly.
pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    let bad = || CliError::Config(format!("cannot read '{s}' as a number"));
    let t = s.trim();
    if t.is_empty() {
        return Err(bad());
    }
    if t.contains('/') {
        let r = Rational::from_str(t).map_err(|_| bad())?;
        return Ok(r);
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let scale = exp - frac_part.len() as i32;
    let num = format!("{}{int_part}{frac_part}", if neg { "-" } else { "" });
    let num = num.trim_start_matches('+');
    let mut r = Rational::from_str(if num == "-" || num.is_empty() { "0" } else { num }).map_err(|_| bad())?;
    let ten = int(10);
    for _ in 0..scale.unsigned_abs() {
        r = if scale > 0 { r * &ten } else { r / &ten };
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dunkl_core::scalar::rat;

    #[test]
    fn rationals_are_exact() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-3/4").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("0.35").unwrap(), rat(7, 20));
        assert_eq!(parse_rational("-.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("2.5e-1").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("3E2").unwrap(), rat(300, 1));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        for bad in ["", "x", "1/0x", "1.2.3", "-", "."] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
        assert_eq!(Multiplicity::Number(0.1).to_rational().unwrap(), rat(1, 10));
    }

    #[test]
    fn unknown_keys_rejected() {
        let e = serde_json::from_str::<RunConfig>(r#"{"family": "A", "colour": 1}"#).unwrap_err();
        assert!(e.to_string().contains("colour"));
        let c: RunConfig = serde_json::from_str(r#"{"T": 0.5, "multiplicities": [1, "1/2"]}"#).unwrap();
        assert_eq!(c.t, Some(0.5));
    }

    #[test]
    fn flags_override_file() {
        let file = RunConfig { rank: Some(3), seed: Some(1), ..Default::default() };
        let flags = RunConfig { seed: Some(9), ..Default::default() };
        let c = file.overlay(flags);
        assert_eq!((c.rank, c.seed), (Some(3), Some(9)));
    }
}
