use nalgebra::{DMatrix, DVector};

use crate::{Complex, QdError, Result};

/// Least-squares solution from a truncated SVD.
#[derive(Debug, Clone)]
pub struct LeastSquaresSolution {
    pub x: Vec<Complex>,
    /// Number of singular values kept.
    pub rank: usize,
    pub singular_values: Vec<f64>,
    /// `‖A x − b‖₂`.
    pub residual_norm: f64,
}

/// Complex least squares `min ‖A x − b‖₂` regularized by discarding singular
/// values below `rel_cutoff · σ_max`.
#[derive(Debug, Clone)]
pub struct TruncatedSvd {
    u: DMatrix<Complex>,
    v_t: DMatrix<Complex>,
    s: Vec<f64>,
    rank: usize,
    threshold: f64,
    a: DMatrix<Complex>,
}

impl TruncatedSvd {
    pub fn new(a: DMatrix<Complex>, rel_cutoff: f64) -> Result<Self> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(QdError::InvalidInput("empty least-squares matrix".into()));
        }
        if a.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(QdError::InvalidInput(
                "least-squares matrix has non-finite entries".into(),
            ));
        }
        let svd = a.clone().svd(true, true);
        let u = svd.u.ok_or_else(|| QdError::SingularSystem("SVD without U".into()))?;
        let v_t = svd
            .v_t
            .ok_or_else(|| QdError::SingularSystem("SVD without Vᵀ".into()))?;
        let s: Vec<f64> = svd.singular_values.iter().copied().collect();
        let smax = s.iter().cloned().fold(0.0, f64::max);
        let threshold = rel_cutoff * smax;
        let rank = s.iter().filter(|&&v| v > threshold).count();
        Ok(Self {
            u,
            v_t,
            s,
            rank,
            threshold,
            a,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.s
    }

    pub fn condition(&self) -> f64 {
        if self.rank == 0 {
            return f64::INFINITY;
        }
        let smax = self.s.iter().cloned().fold(0.0, f64::max);
        let smin = self
            .s
            .iter()
            .cloned()
            .filter(|&v| v > self.threshold)
            .fold(f64::INFINITY, f64::min);
        smax / smin
    }

    /// The kept right singular vectors as columns, with their singular values.
    pub fn range(&self) -> (DMatrix<Complex>, Vec<f64>) {
        let keep: Vec<usize> = (0..self.s.len()).filter(|&i| self.s[i] > self.threshold).collect();
        let v = DMatrix::from_fn(self.v_t.ncols(), keep.len(), |r, c| self.v_t[(keep[c], r)].conj());
        (v, keep.iter().map(|&i| self.s[i]).collect())
    }

    pub fn solve(&self, b: &[Complex]) -> LeastSquaresSolution {
        assert_eq!(b.len(), self.a.nrows());
        let bv = DVector::from_column_slice(b);
        let mut x = DVector::<Complex>::zeros(self.a.ncols());
        for (i, &si) in self.s.iter().enumerate() {
            if si <= self.threshold {
                continue;
            }
            let ui = self.u.column(i);
            let coef = ui.dotc(&bv) / si;
            for (j, v) in self.v_t.row(i).iter().enumerate() {
                x[j] += v.conj() * coef;
            }
        }
        let r = &self.a * &x - &bv;
        LeastSquaresSolution {
            x: x.iter().copied().collect(),
            rank: self.rank,
            singular_values: self.s.clone(),
            residual_norm: r.norm(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn solves_consistent_overdetermined_system() {
        let a = DMatrix::from_fn(6, 3, |i, j| c64((i + 1) as f64, j as f64).powu(j as u32));
        let x_true = [c64(1.0, -1.0), c64(0.5, 2.0), c64(-0.25, 0.0)];
        let b: Vec<Complex> = (0..6).map(|i| (0..3).map(|j| a[(i, j)] * x_true[j]).sum()).collect();
        let svd = TruncatedSvd::new(a, 1e-12).unwrap();
        let sol = svd.solve(&b);
        assert_eq!(sol.rank, 3);
        for (x, t) in sol.x.iter().zip(x_true) {
            assert!((x - t).norm() < 1e-12);
        }
        assert!(sol.residual_norm < 1e-12);
    }

    #[test]
    fn truncation_drops_duplicate_column() {
        let a = DMatrix::from_fn(5, 2, |i, _| c64(i as f64 + 1.0, 0.0));
        let svd = TruncatedSvd::new(a, 1e-12).unwrap();
        assert_eq!(svd.rank(), 1);
        let b = vec![
            c64(2.0, 0.0),
            c64(4.0, 0.0),
            c64(6.0, 0.0),
            c64(8.0, 0.0),
            c64(10.0, 0.0),
        ];
        let sol = svd.solve(&b);
        // Minimum-norm split of the coefficient 2 across two equal columns.
        assert!((sol.x[0] - c64(1.0, 0.0)).norm() < 1e-12);
        assert!((sol.x[1] - c64(1.0, 0.0)).norm() < 1e-12);
    }
}
