use serde::Serialize;

use crate::geometry::Domain;
use crate::verify::functions::{check_holdouts, TestFunction};
use crate::verify::quadrature::{moment, Measure, QuadratureData};
use crate::{Complex, Real, Result};

#[derive(Debug, Clone, Serialize)]
pub struct HoldoutRow {
    pub function: TestFunction,
    pub label: String,
    pub moment: Complex,
    pub functional: Complex,
    /// `|moment − functional| / (1 + |moment|)`.
    pub residual: Real,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub measure: Measure,
    pub nodes: Vec<Complex>,
    pub orders: Vec<usize>,
    pub coefficients: Vec<Vec<Complex>>,
    pub fit_residual: Real,
    pub holdout_residual: Real,
    pub tolerance: Real,
    pub passed: bool,
    pub seed: Option<u64>,
    pub rows: Vec<HoldoutRow>,
}

impl VerificationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `function,re_moment,im_moment,re_functional,im_functional,residual`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("function,re_moment,im_moment,re_functional,im_functional,residual\n");
        for r in &self.rows {
            s.push_str(&format!(
                "\"{}\",{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.label, r.moment.re, r.moment.im, r.functional.re, r.functional.im, r.residual
            ));
        }
        s
    }
}

/// Compare the functional with directly computed moments on the holdout
/// functions; PASS iff the largest relative residual is at most `tolerance`.
pub fn verify_quadrature(
    domain: &Domain,
    qd: &QuadratureData,
    holdouts: &[TestFunction],
    tolerance: Real,
    seed: Option<u64>,
) -> Result<VerificationReport> {
    check_holdouts(domain, holdouts)?;
    let mut rows = Vec::with_capacity(holdouts.len());
    for h in holdouts {
        let m = moment(domain, h, qd.measure)?;
        let f = qd.functional(h);
        rows.push(HoldoutRow {
            function: *h,
            label: h.label(),
            moment: m,
            functional: f,
            residual: (m - f).norm() / (1.0 + m.norm()),
        });
    }
    let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(VerificationReport {
        measure: qd.measure,
        nodes: qd.nodes.clone(),
        orders: qd.orders.clone(),
        coefficients: qd.coefficients.clone(),
        fit_residual: qd.fit_residual,
        holdout_residual: worst,
        tolerance,
        passed: worst <= tolerance,
        seed,
        rows,
    })
}
