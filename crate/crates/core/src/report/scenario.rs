//! Scenario files: TOML with a `[target.<kind>]` table and an optional `[expect]` table.
//!
//! ```toml
//! name = "cone-cover-closure"
//! seed = 7
//!
//! [target.cone]
//! slope = 0.5
//! folds = [2, 3]
//!
//! [expect]
//! "universal.causal_relation_closed" = "false"
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub target: Target,
    /// Claim name to expected value.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub expect: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Target {
    Cone(ConeParams),
    Punctured(PuncturedParams),
    Sphere(SphereParams),
    Criterion(CriterionParams),
    OracleCone(OracleConeParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConeParams {
    /// Cone slope `A`.
    pub slope: f64,
    pub r_a: f64,
    pub r_b: f64,
    /// Folds of the cyclic covers to check.
    pub folds: Vec<u32>,
    /// Reflectivity samples per geometry.
    pub samples: u64,
}

impl Default for ConeParams {
    fn default() -> Self {
        ConeParams { slope: 0.5, r_a: 1.0, r_b: 1.0, folds: vec![2, 3], samples: 2000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PuncturedParams {
    /// `(t, x)` as exact decimals or fractions.
    pub p: [String; 2],
    pub q: [String; 2],
    pub k_max: u64,
    /// Random crossing pairs for the base-chronology check.
    pub base_samples: u64,
    /// Cross-check every sheet with the grid oracle at this resolution.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_resolution: Option<f64>,
}

impl Default for PuncturedParams {
    fn default() -> Self {
        PuncturedParams {
            p: ["-1".into(), "1".into()],
            q: ["1".into(), "-1".into()],
            k_max: 1000,
            base_samples: 10_000,
            oracle_resolution: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SphereParams {
    /// Ambient spacetime dimension.
    pub n: usize,
    pub radius: f64,
    /// Replace the sphere by an ellipsoid with these semi-axes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axes: Option<Vec<f64>>,
    /// Grid points per parameter direction.
    pub grid: usize,
    pub step: f64,
    /// Exchange `N+` and `N-`.
    pub swap: bool,
}

impl Default for SphereParams {
    fn default() -> Self {
        SphereParams { n: 4, radius: 1.0, axes: None, grid: 6, step: 1e-4, swap: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacetime {
    Minkowski,
    Cone,
    /// Minkowski space with vertical lines removed.
    Lines,
    PuncturedPlane,
    Conformastationary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Field {
    /// `d_t`.
    Time,
    /// `t d_t`.
    ScaledTime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CriterionParams {
    pub spacetime: Spacetime,
    pub field: Field,
    /// Dimension for `minkowski` and `lines`.
    pub dim: usize,
    /// Spatial positions of removed lines for `lines`.
    pub lines: Vec<Vec<f64>>,
    pub grid: usize,
    pub extent: f64,
    /// Probe start points; defaults to the sample grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub starts: Option<Vec<Vec<f64>>>,
    pub budget: f64,
    pub h: f64,
    pub tol: f64,
}

impl Default for CriterionParams {
    fn default() -> Self {
        CriterionParams {
            spacetime: Spacetime::Lines,
            field: Field::Time,
            dim: 3,
            lines: vec![vec![0.0, 0.0], vec![1.0, 0.0]],
            grid: 3,
            extent: 2.0,
            starts: None,
            budget: 1e3,
            h: crate::criterion::DEFAULT_H,
            tol: crate::criterion::DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConeParams {
    pub slope: f64,
    pub resolution: f64,
    /// Random pairs per geometry.
    pub pairs: u64,
    pub folds: Vec<u32>,
    /// Extra base cones given by total angle, e.g. one with angle in `(pi, 2pi)`.
    pub extra_angles: Vec<f64>,
}

impl Default for OracleConeParams {
    fn default() -> Self {
        OracleConeParams { slope: 0.5, resolution: 0.05, pairs: 100, folds: vec![3], extra_angles: vec![4.5] }
    }
}

impl Target {
    pub fn kind(&self) -> &'static str {
        match self {
            Target::Cone(_) => "cone",
            Target::Punctured(_) => "punctured",
            Target::Sphere(_) => "sphere",
            Target::Criterion(_) => "criterion",
            Target::OracleCone(_) => "oracle-cone",
        }
    }

    /// Whether running the target draws random samples.
    pub fn sampled(&self) -> bool {
        match self {
            Target::Cone(c) => c.samples > 0,
            Target::Punctured(p) => p.base_samples > 0,
            Target::OracleCone(o) => o.pairs > 0,
            Target::Sphere(_) | Target::Criterion(_) => false,
        }
    }
}

/// Names accepted by [`Scenario::builtin`].
pub const BUILTINS: &[&str] = &[
    "cone-cover-closure",
    "punctured-reflectivity",
    "sphere-trapped",
    "criterion-lines",
    "criterion-punctured-plane",
    "oracle-cone",
    "oracle-punctured",
];

pub const DEFAULT_SEED: u64 = 20_240_611;

impl Scenario {
    pub fn new(name: impl Into<String>, target: Target) -> Self {
        let seed = target.sampled().then_some(DEFAULT_SEED);
        Scenario { name: name.into(), seed, target, expect: BTreeMap::new() }
    }

    /// Named reproductions with their expected outcomes.
    pub fn builtin(name: &str) -> Result<Scenario> {
        let exp = |pairs: &[(&str, Value)]| pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect::<BTreeMap<_, _>>();
        let mut s = match name {
            "cone-cover-closure" => {
                let mut s = Scenario::new(name, Target::Cone(ConeParams::default()));
                s.expect = exp(&[
                    ("base.causal_relation_closed", "true".into()),
                    ("universal.causal_relation_closed", "false".into()),
                    ("universal.witness_relation", "closure_only".into()),
                    ("universal.reflecting_but_not_closed", true.into()),
                    ("l0", 2.0.into()),
                ]);
                s
            }
            "punctured-reflectivity" => {
                let mut s = Scenario::new(name, Target::Punctured(PuncturedParams::default()));
                s.expect = exp(&[
                    ("future_closure_sheets", serde_json::json!(["right"])),
                    ("past_closure_sheets", serde_json::json!([])),
                    ("past_reflectivity_violated", true.into()),
                    ("base.reflectivity_violated", false.into()),
                    ("base.chronology_disagreements", 0.into()),
                ]);
                s
            }
            "sphere-trapped" => {
                let mut s = Scenario::new(name, Target::Sphere(SphereParams::default()));
                s.expect = exp(&[("k_plus_negative", true.into()), ("inner_trapped", true.into())]);
                s
            }
            "criterion-lines" => {
                let mut s = Scenario::new(name, Target::Criterion(CriterionParams::default()));
                s.expect = exp(&[("certificate", "certified_past_reflecting".into())]);
                s
            }
            "criterion-punctured-plane" => {
                let params = CriterionParams {
                    spacetime: Spacetime::PuncturedPlane,
                    dim: 2,
                    lines: vec![],
                    extent: 0.9,
                    starts: Some(vec![vec![1.0, 0.0]]),
                    budget: 2.0,
                    ..CriterionParams::default()
                };
                let mut s = Scenario::new(name, Target::Criterion(params));
                s.expect = exp(&[("certificate", "failed".into()), ("failure_reason", "incomplete flow".into())]);
                s
            }
            "oracle-cone" => {
                let mut s = Scenario::new(name, Target::OracleCone(OracleConeParams::default()));
                s.expect = exp(&[("within_calibrated_bound", true.into()), ("oracle_never_below_exact", true.into())]);
                s
            }
            "oracle-punctured" => {
                let params = PuncturedParams { base_samples: 0, oracle_resolution: Some(1e-3), ..PuncturedParams::default() };
                let mut s = Scenario::new(name, Target::Punctured(params));
                s.expect = exp(&[("oracle.disagreements", 0.into())]);
                s
            }
            other => return Err(Error::Scenario(format!("unknown scenario `{other}` (known: {})", BUILTINS.join(", ")))),
        };
        s.name = name.into();
        Ok(s)
    }

    pub fn from_toml(text: &str) -> Result<Scenario> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Scenario(format!("invalid scenario: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Scenario(format!("cannot read {}: {e}", path.display())))?;
        Scenario::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Scenario(format!("cannot serialize scenario: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Scenario(m));
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return bad(format!("scenario name must be nonempty [A-Za-z0-9_-], got `{}`", self.name));
        }
        if self.target.sampled() && self.seed.is_none() {
            return bad(format!("scenario `{}` draws samples and needs a seed", self.name));
        }
        let positive = |x: f64| x.is_finite() && x > 0.0;
        match &self.target {
            Target::Cone(c) => {
                if !(positive(c.slope) && positive(c.r_a) && positive(c.r_b)) {
                    return bad("cone slope and radii must be positive".into());
                }
                if c.folds.contains(&0) {
                    return bad("cover folds must be at least 1".into());
                }
            }
            Target::Punctured(p) => {
                if let Some(r) = p.oracle_resolution {
                    if !(positive(r) && r <= 1.0) {
                        return bad(format!("oracle resolution must lie in (0, 1], got {r}"));
                    }
                }
            }
            Target::Sphere(s) => {
                if s.n < 3 || !positive(s.radius) || s.grid == 0 || !positive(s.step) {
                    return bad("sphere needs n >= 3, positive radius and step, nonempty grid".into());
                }
                if let Some(a) = &s.axes {
                    if a.len() != s.n - 1 {
                        return bad(format!("ellipsoid needs {} semi-axes", s.n - 1));
                    }
                }
            }
            Target::Criterion(c) => {
                if c.grid == 0 || !positive(c.h) || !positive(c.tol) || !(c.budget >= 0.0) || !positive(c.extent) {
                    return bad("criterion needs a nonempty grid, positive h, tol, extent and a nonnegative budget".into());
                }
                if matches!(c.spacetime, Spacetime::Minkowski | Spacetime::Lines) && c.dim < 2 {
                    return bad("dimension must be at least 2".into());
                }
                if c.spacetime == Spacetime::Lines && c.lines.iter().any(|z| z.len() + 1 != c.dim) {
                    return bad(format!("line positions need {} coordinates", c.dim.saturating_sub(1)));
                }
            }
            Target::OracleCone(o) => {
                if !(positive(o.slope) && positive(o.resolution)) || o.resolution > 0.5 {
                    return bad("oracle slope must be positive and resolution in (0, 0.5]".into());
                }
                if o.folds.contains(&0) || o.extra_angles.iter().any(|&a| !positive(a)) {
                    return bad("folds must be at least 1 and extra angles positive".into());
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate_and_round_trip() {
        for name in BUILTINS {
            let s = Scenario::builtin(name).unwrap();
            s.validate().unwrap();
            let text = s.to_toml().unwrap();
            assert_eq!(Scenario::from_toml(&text).unwrap(), s, "{text}");
        }
        assert!(Scenario::builtin("nope").is_err());
    }

    #[test]
    fn parses_files_with_defaults() {
        let s = Scenario::from_toml("name = \"c\"\nseed = 3\n[target.cone]\nslope = 0.25\n").unwrap();
        match s.target {
            Target::Cone(c) => assert_eq!((c.slope, c.folds), (0.25, vec![2, 3])),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_fields_and_missing_seed() {
        assert!(Scenario::from_toml("name = \"c\"\nseed = 3\n[target.cone]\nslop = 0.25\n").is_err());
        assert!(Scenario::from_toml("name = \"c\"\nseed = 3\ncolour = 1\n[target.cone]\n").is_err());
        assert!(Scenario::from_toml("name = \"c\"\n[target.cone]\n").is_err());
        assert!(Scenario::from_toml("name = \"c\"\n[target.sphere]\n").is_ok());
        assert!(Scenario::from_toml("name = \"c\"\n[target.warp]\n").is_err());
    }
}
