//! JSON run configuration.

use std::path::PathBuf;

use finsler_robin::fem::SolverOptions;
use finsler_robin::verify::{DEFAULT_REFINEMENTS, DEFAULT_TOLERANCE};
use finsler_robin::{AnnulusSpec, ConvexPolygon, FinslerNorm, HarnessConfig, NormSpec};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// Sides of the polygon standing in for a Wulff shape in mesh-based commands.
pub const DEFAULT_WULFF_SIDES: usize = 128;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub norm: NormSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AlphaSpec>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub checks: CheckConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Worker threads; the rayon default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Seed for randomized suites; required by commands that sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum DomainSpec {
    Wulff { wulff: WulffDomain },
    Annulus { annulus: AnnulusSpec },
    Polygon(ConvexPolygon),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WulffDomain {
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sides: Option<usize>,
}

impl<'de> Deserialize<'de> for DomainSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        let obj = v
            .as_object()
            .ok_or_else(|| D::Error::custom("expected an object"))?;
        let sub = |key: &str| {
            let mut other = obj.clone();
            other.remove(key);
            if !other.is_empty() {
                return Err(D::Error::custom(format!("unexpected keys next to `{key}`")));
            }
            Ok(obj[key].clone())
        };
        if obj.contains_key("wulff") {
            let wulff = serde_json::from_value(sub("wulff")?)
                .map_err(|e| D::Error::custom(format!("wulff: {e}")))?;
            Ok(DomainSpec::Wulff { wulff })
        } else if obj.contains_key("annulus") {
            let annulus = serde_json::from_value(sub("annulus")?)
                .map_err(|e| D::Error::custom(format!("annulus: {e}")))?;
            Ok(DomainSpec::Annulus { annulus })
        } else if obj.contains_key("vertices") {
            serde_json::from_value(v)
                .map(DomainSpec::Polygon)
                .map_err(|e| D::Error::custom(format!("polygon: {e}")))
        } else {
            Err(D::Error::custom(
                "expected `vertices`, `wulff` or `annulus`",
            ))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Scalar(f64),
    Sweep { sweep: Sweep },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub from: f64,
    pub to: f64,
    pub n: usize,
}

impl<'de> Deserialize<'de> for AlphaSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Wrapped {
            sweep: Sweep,
        }
        match Value::deserialize(d)? {
            Value::Number(n) => n
                .as_f64()
                .map(AlphaSpec::Scalar)
                .ok_or_else(|| D::Error::custom("alpha is not representable")),
            v @ Value::Object(_) => serde_json::from_value::<Wrapped>(v)
                .map(|w| AlphaSpec::Sweep { sweep: w.sweep })
                .map_err(|e| D::Error::custom(format!("sweep: {e}"))),
            _ => Err(D::Error::custom("expected a number or {\"sweep\": {...}}")),
        }
    }
}

impl AlphaSpec {
    /// The sampled values, endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        match *self {
            AlphaSpec::Scalar(a) => vec![a],
            AlphaSpec::Sweep {
                sweep: Sweep { from, to, n },
            } => {
                if n == 1 {
                    return vec![from];
                }
                (0..n)
                    .map(|i| {
                        if i + 1 == n {
                            to
                        } else {
                            from + (to - from) * i as f64 / (n - 1) as f64
                        }
                    })
                    .collect()
            }
        }
    }

    pub fn is_sweep(&self) -> bool {
        matches!(self, AlphaSpec::Sweep { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Uniform refinements of the polygon mesh.
    pub refinements: usize,
    /// Nodes of the radial finite-difference grids.
    pub n_nodes: usize,
    pub max_iters: usize,
    /// Verification tolerance on eigenvalue margins.
    pub tolerance: f64,
    pub stall_tol: f64,
    pub residual_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let s = SolverOptions::default();
        Self {
            refinements: DEFAULT_REFINEMENTS,
            n_nodes: 20_000,
            max_iters: s.max_iters,
            tolerance: DEFAULT_TOLERANCE,
            stall_tol: s.stall_tol,
            residual_tol: s.residual_tol,
        }
    }
}

impl SolverConfig {
    pub fn harness(&self) -> HarnessConfig {
        HarnessConfig {
            refinements: self.refinements,
            tolerance: self.tolerance,
            solver: SolverOptions {
                max_iters: self.max_iters,
                stall_tol: self.stall_tol,
                residual_tol: self.residual_tol,
                ..SolverOptions::default()
            },
        }
    }
}

/// Parameters of checks that do not act on the configured domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckConfig {
    /// Radius of the reference Wulff shape for asymptotics and curves.
    pub r3: f64,
    /// Width offset of the equal-area annulus, `r2 = r3 + epsilon`.
    pub epsilon: f64,
    /// Total anisotropic perimeter of holes for the chain check.
    pub hole_perimeter: f64,
    /// Sample count for identity suites and parallel-set profiles.
    pub samples: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            r3: 1.0,
            epsilon: 0.5,
            hole_perimeter: 0.0,
            samples: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Also write eigenfunction CSV files from `eig`.
    pub eigenfunction: bool,
    /// Also write an SVG plot from `curves`.
    pub svg: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("finsler-robin-out"),
            eigenfunction: false,
            svg: true,
        }
    }
}

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.into(),
        message: message.into(),
    }
}

impl RunConfig {
    /// Parses and validates a configuration document.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." || path == "?" {
                "<root>".to_string()
            } else {
                path
            };
            invalid(&field, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.finsler_norm()?;
        match &self.domain {
            Some(DomainSpec::Wulff { wulff }) => {
                if !(wulff.radius > 0.0 && wulff.radius.is_finite()) {
                    return Err(invalid(
                        "domain.wulff.radius",
                        format!("must be positive, got {}", wulff.radius),
                    ));
                }
                if matches!(wulff.sides, Some(s) if s < 3) {
                    return Err(invalid("domain.wulff.sides", "need at least 3 sides"));
                }
            }
            Some(DomainSpec::Annulus { annulus }) => {
                AnnulusSpec::new(annulus.r1, annulus.r2)
                    .map_err(|e| invalid("domain.annulus", e.to_string()))?;
            }
            Some(DomainSpec::Polygon(_)) | None => {}
        }
        match self.alpha {
            Some(AlphaSpec::Scalar(a)) if !(a <= 0.0 && a.is_finite()) => {
                return Err(invalid(
                    "alpha",
                    format!("must be finite and non-positive, got {a}"),
                ));
            }
            Some(AlphaSpec::Sweep { sweep }) => {
                for (name, v) in [("from", sweep.from), ("to", sweep.to)] {
                    if !(v <= 0.0 && v.is_finite()) {
                        return Err(invalid(
                            &format!("alpha.sweep.{name}"),
                            format!("must be finite and non-positive, got {v}"),
                        ));
                    }
                }
                if sweep.n == 0 {
                    return Err(invalid("alpha.sweep.n", "must be positive"));
                }
            }
            _ => {}
        }
        let s = &self.solver;
        for (name, v) in [
            ("refinements", s.refinements),
            ("n_nodes", s.n_nodes),
            ("max_iters", s.max_iters),
        ] {
            if v == 0 {
                return Err(invalid(&format!("solver.{name}"), "must be positive"));
            }
        }
        if s.n_nodes < 3 {
            return Err(invalid("solver.n_nodes", "need at least 3 nodes"));
        }
        for (name, v) in [
            ("tolerance", s.tolerance),
            ("stall_tol", s.stall_tol),
            ("residual_tol", s.residual_tol),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(
                    &format!("solver.{name}"),
                    format!("must be finite and non-negative, got {v}"),
                ));
            }
        }
        let c = &self.checks;
        for (name, v) in [("r3", c.r3), ("epsilon", c.epsilon)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(
                    &format!("checks.{name}"),
                    format!("must be positive, got {v}"),
                ));
            }
        }
        if !(c.hole_perimeter >= 0.0 && c.hole_perimeter.is_finite()) {
            return Err(invalid(
                "checks.hole_perimeter",
                format!("must be non-negative, got {}", c.hole_perimeter),
            ));
        }
        if c.samples < 2 {
            return Err(invalid("checks.samples", "need at least 2 samples"));
        }
        if self.workers == Some(0) {
            return Err(invalid("workers", "must be positive"));
        }
        Ok(())
    }

    pub fn finsler_norm(&self) -> Result<FinslerNorm, CliError> {
        FinslerNorm::new(self.norm.clone()).map_err(|e| invalid("norm", e.to_string()))
    }

    pub fn alphas(&self) -> Result<Vec<f64>, CliError> {
        self.alpha
            .map(|a| a.values())
            .ok_or_else(|| invalid("alpha", "missing"))
    }

    pub fn domain(&self) -> Result<&DomainSpec, CliError> {
        self.domain
            .as_ref()
            .ok_or_else(|| invalid("domain", "missing"))
    }

    /// The domain as a polygon; Wulff shapes are replaced by inscribed
    /// polygons with vertices on their boundary.
    pub fn polygon(&self, norm: &FinslerNorm) -> Result<ConvexPolygon, CliError> {
        match self.domain()? {
            DomainSpec::Polygon(p) => Ok(p.clone()),
            DomainSpec::Wulff { wulff } => {
                let sides = wulff.sides.unwrap_or(DEFAULT_WULFF_SIDES);
                let approx = norm
                    .wulff_boundary(wulff.radius, sides)
                    .map_err(|e| invalid("domain.wulff", e.to_string()))?;
                ConvexPolygon::from_wulff(&approx)
                    .map_err(|e| invalid("domain.wulff", e.to_string()))
            }
            DomainSpec::Annulus { .. } => Err(invalid(
                "domain",
                "this command needs a polygon or Wulff domain",
            )),
        }
    }
}
