//! JSON domain specifications.
//!
//! ```json
//! { "curves": [ { "coeffs": [[re, im], ...], "n_samples": 256 } ],
//!   "hole_points": [[re, im], ...] }
//! ```
//!
//! Coefficients run from frequency `-K` to `+K`; coefficient `k` multiplies
//! `e^{ikt}`.

use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::geometry::{Curve, Domain};
use crate::{Complex, QdError, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub coeffs: Vec<[f64; 2]>,
    pub n_samples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub curves: Vec<CurveSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hole_points: Option<Vec<[f64; 2]>>,
}

fn to_complex(v: &[[f64; 2]]) -> Vec<Complex> {
    v.iter().map(|p| Complex::new(p[0], p[1])).collect()
}

fn to_pairs(v: &[Complex]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

impl DomainSpec {
    pub fn from_domain(domain: &Domain) -> Self {
        Self {
            curves: domain
                .curves()
                .iter()
                .map(|c| CurveSpec {
                    coeffs: to_pairs(c.coeffs()),
                    n_samples: c.len(),
                })
                .collect(),
            hole_points: if domain.is_simply_connected() {
                None
            } else {
                Some(to_pairs(domain.hole_points()))
            },
        }
    }

    /// Schema checks, then curve construction and domain validation.
    pub fn to_domain(&self) -> Result<Domain> {
        if self.curves.is_empty() {
            return Err(QdError::InvalidInput("schema: \"curves\" must be non-empty".into()));
        }
        let holes = match (&self.hole_points, self.curves.len()) {
            (None, 1) => Vec::new(),
            (None, n) => {
                return Err(QdError::InvalidInput(format!(
                    "schema: \"hole_points\" is required for {n} curves ({} points expected)",
                    n - 1
                )))
            }
            (Some(h), _) => to_complex(h),
        };
        let mut curves = Vec::with_capacity(self.curves.len());
        for (k, c) in self.curves.iter().enumerate() {
            let curve = Curve::new(to_complex(&c.coeffs), c.n_samples).map_err(|e| match e {
                QdError::SelfIntersection { seg_a, seg_b, .. } => QdError::SelfIntersection { curve: k, seg_a, seg_b },
                QdError::InvalidInput(m) => QdError::InvalidInput(format!("curve {k}: {m}")),
                other => other,
            })?;
            curves.push(curve);
        }
        Domain::new(curves, holes)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| QdError::InvalidInput(format!("schema: {e}")))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Read and validate a domain file.
pub fn load_domain(path: &FsPath) -> Result<Domain> {
    let text = std::fs::read_to_string(path)?;
    DomainSpec::from_json(&text)?.to_domain()
}

/// Write a domain as a spec file.
pub fn save_domain(domain: &Domain, path: &FsPath) -> Result<()> {
    std::fs::write(path, DomainSpec::from_domain(domain).to_json()?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn round_trip_annulus() {
        let d = Domain::annulus(c64(0., 0.), 0.4, 1.0, 64).unwrap();
        let spec = DomainSpec::from_domain(&d);
        let back = DomainSpec::from_json(&spec.to_json().unwrap())
            .unwrap()
            .to_domain()
            .unwrap();
        assert_eq!(back.points(), d.points());
        assert_eq!(back.hole_points(), d.hole_points());
    }

    #[test]
    fn missing_hole_points_is_schema_error() {
        let text = r#"{"curves":[{"coeffs":[[0,0],[0,0],[1,0]],"n_samples":64},
                                 {"coeffs":[[0.4,0],[0,0],[0,0]],"n_samples":64}]}"#;
        let err = DomainSpec::from_json(text).unwrap().to_domain().unwrap_err();
        assert!(matches!(err, QdError::InvalidInput(m) if m.contains("hole_points")));
    }

    #[test]
    fn malformed_json_is_input_error() {
        assert!(matches!(
            DomainSpec::from_json("{\"curves\": 3}"),
            Err(QdError::InvalidInput(_))
        ));
    }
}
