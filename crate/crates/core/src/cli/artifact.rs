use serde::{Deserialize, Serialize};

use crate::builder::{BuildMode, ConformalMap, DoubleDiagnostics, SolveSummary, UnivalenceCertificate};
use crate::geometry::spec_file::DomainSpec;
use crate::{Complex, Real, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Layout {
    pub nodes: Vec<Complex>,
    pub orders: Vec<usize>,
}

/// Everything `qd verify` needs from a build, plus the boundary samples of
/// `f` for inspection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapArtifact {
    pub mode: BuildMode,
    pub seed: u64,
    pub base_point: Complex,
    pub order: usize,
    pub bases: Vec<(Complex, usize)>,
    pub sigma_coefficients: Vec<Complex>,
    pub sigma_jets: Vec<Complex>,
    pub f_jets: Vec<Complex>,
    pub jet_radius: Real,
    pub periods: Vec<Complex>,
    pub increments: Vec<Complex>,
    pub period_residual: Real,
    pub identity_distance: Real,
    pub certificate: UnivalenceCertificate,
    pub solve: Option<SolveSummary>,
    pub double: Option<DoubleDiagnostics>,
    pub arc_length: Layout,
    pub area: Option<Layout>,
    pub domain: DomainSpec,
    pub image: DomainSpec,
    /// `f` on the boundary grid, one list per curve.
    pub f_boundary: Vec<Vec<Complex>>,
    pub notes: Vec<String>,
}

impl MapArtifact {
    pub fn new(map: &ConformalMap, seed: u64, notes: Vec<String>) -> Result<Self> {
        let d = map.domain();
        let image = map.image_domain()?;
        let (nodes, orders) = map.arc_length_layout();
        Ok(Self {
            mode: map.mode,
            seed,
            base_point: map.base_point,
            order: map.order,
            bases: map.bases().to_vec(),
            sigma_coefficients: map.sigma.coeffs().to_vec(),
            sigma_jets: map.sigma_jets.clone(),
            f_jets: map.f_jets.clone(),
            jet_radius: map.jet_radius,
            periods: map.periods.clone(),
            increments: map.increments.clone(),
            period_residual: map.period_residual(),
            identity_distance: map.identity_distance,
            certificate: map.certificate.clone(),
            solve: map.solve.clone(),
            double: map.double.clone(),
            arc_length: Layout { nodes, orders },
            area: map.area_layout().map(|(nodes, orders)| Layout { nodes, orders }),
            domain: DomainSpec::from_domain(d),
            image: DomainSpec::from_domain(&image),
            f_boundary: (0..d.connectivity())
                .map(|k| map.f_boundary.curve(k).to_vec())
                .collect(),
            notes,
        })
    }
}
