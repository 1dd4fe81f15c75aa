//! Half-order differentials `(h₁, h₂)` sampled on the boundary and the cuts,
//! and the period pairings between them.

use std::f64::consts::PI;

use crate::builder::rational::{hole_period, RationalBasis};
use crate::geometry::{BoundaryFunction, CutSystem, Domain};
use crate::numerics::spectral;
use crate::spanfit::SpanElement;
use crate::{Complex, QdError, Real, Result};

/// Which object of the double construction a frame realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameTag {
    /// The reference differential `g^m`.
    Reference(usize),
    /// Its span approximation `h^m`.
    Approximation(usize),
    /// A combination such as `h = h⁰ + Σ t_m h^m`.
    Combined,
}

/// A half-order differential: `h₁` on the boundary and on the cuts, `h₂` on
/// the cuts.
#[derive(Debug, Clone)]
pub struct HalfOrderFrame {
    pub h1: BoundaryFunction,
    /// `h₁` at the nodes of each cut.
    pub h1_cut: Vec<Vec<Complex>>,
    /// `h₂` at the nodes of each cut.
    pub h2_cut: Vec<Vec<Complex>>,
    /// `h₂` on the loops of a [`ResidueLoops`], if any.
    pub h2_loops: Vec<Vec<Complex>>,
    pub tag: FrameTag,
}

impl HalfOrderFrame {
    pub fn from_element(el: &SpanElement, tag: FrameTag) -> Self {
        Self {
            h1: el.sigma().clone(),
            h1_cut: el.cut_sigma().to_vec(),
            h2_cut: el.cut_lambda().to_vec(),
            h2_loops: Vec::new(),
            tag,
        }
    }

    /// As [`from_element`](Self::from_element), with `λ` also sampled on
    /// the residue loops.
    pub fn from_element_with_loops(el: &SpanElement, tag: FrameTag, loops: &ResidueLoops) -> Result<Self> {
        let mut f = Self::from_element(el, tag);
        f.h2_loops = loops.split(&el.eval_lambda(&loops.flat_nodes())?);
        Ok(f)
    }

    /// `self + s·other`, summing both components.
    pub fn combine(&self, s: Complex, other: &HalfOrderFrame) -> Result<HalfOrderFrame> {
        let mut out = self.clone();
        out.h1.axpy(s, &other.h1)?;
        let add = |a: &mut Vec<Vec<Complex>>, b: &[Vec<Complex>]| {
            a.iter_mut()
                .zip(b)
                .for_each(|(x, y)| x.iter_mut().zip(y).for_each(|(p, q)| *p += s * q));
        };
        add(&mut out.h1_cut, &other.h1_cut);
        add(&mut out.h2_cut, &other.h2_cut);
        add(&mut out.h2_loops, &other.h2_loops);
        out.tag = FrameTag::Combined;
        Ok(out)
    }

    /// Max over cut endpoints of `|h₁(w)T(w) − conj(h₂(w))|`, with `h₁`
    /// interpolated spectrally on the boundary and `h₂` extrapolated from
    /// the cut nodes.
    pub fn endpoint_compatibility(&self, domain: &Domain, cuts: &CutSystem) -> Real {
        let mut worst: Real = 0.0;
        for (j, c) in cuts.cuts().iter().enumerate() {
            for (curve, param, s) in [(c.hole(), c.start_param(), 0.0), (0, c.end_param(), 1.0)] {
                let bins = spectral::fourier_bins(self.h1.curve(curve));
                let h1 = spectral::interpolate_at(&bins, param);
                let cv = domain.curve(curve);
                let d = cv.eval_derivative(param, 1);
                let t = d / d.norm();
                let h2 = extrapolate(c.params(), &self.h2_cut[j], s);
                worst = worst.max((h1 * t - h2.conj()).norm());
            }
        }
        worst
    }
}

/// Polynomial extrapolation to `s` from the nodes nearest to it.
fn extrapolate(params: &[Real], values: &[Complex], s: Real) -> Complex {
    let mut idx: Vec<usize> = (0..params.len()).collect();
    idx.sort_by(|&a, &b| (params[a] - s).abs().total_cmp(&(params[b] - s).abs()));
    idx.truncate(8.min(params.len()));
    let mut acc = Complex::new(0.0, 0.0);
    for &i in &idx {
        let mut w = 1.0;
        for &k in &idx {
            if k != i {
                w *= (s - params[k]) / (params[i] - params[k]);
            }
        }
        acc += values[i] * w;
    }
    acc
}

/// Circles about the poles of `λ` other than the main base point. On the
/// double, `h² dz` has a pole at the reflection of each base point, and its
/// residue there must vanish when there is more than one.
#[derive(Debug, Clone)]
pub struct ResidueLoops {
    centers: Vec<Complex>,
    nodes: Vec<Vec<Complex>>,
    dz: Vec<Vec<Complex>>,
}

impl ResidueLoops {
    /// Nodes per loop.
    pub const NODES: usize = 64;

    /// One loop per center, of radius half the distance to the boundary,
    /// to the other centers, and to `others`.
    pub fn new(domain: &Domain, centers: &[Complex], others: &[Complex]) -> Result<Self> {
        let mut nodes = Vec::with_capacity(centers.len());
        let mut dz = Vec::with_capacity(centers.len());
        for (i, &c) in centers.iter().enumerate() {
            let near = centers
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &q)| q)
                .chain(others.iter().copied())
                .map(|q| (q - c).norm())
                .fold(domain.distance_to_boundary(c), f64::min);
            if !(near > 0.0) {
                return Err(QdError::CoincidentNodes(format!(
                    "residue loop center {c} coincides with a pole"
                )));
            }
            let r = 0.5 * near;
            let n = Self::NODES;
            let e: Vec<Complex> = (0..n)
                .map(|k| Complex::from_polar(1.0, 2.0 * PI * k as Real / n as Real))
                .collect();
            nodes.push(e.iter().map(|u| c + r * u).collect());
            dz.push(
                e.iter()
                    .map(|u| Complex::new(0.0, r * 2.0 * PI / n as Real) * u)
                    .collect(),
            );
        }
        Ok(Self {
            centers: centers.to_vec(),
            nodes,
            dz,
        })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[Complex] {
        &self.centers
    }

    /// All loop nodes, loop by loop.
    pub fn flat_nodes(&self) -> Vec<Complex> {
        self.nodes.iter().flatten().copied().collect()
    }

    /// Split values at [`flat_nodes`](Self::flat_nodes) into loops.
    /// `|dz|` at the flat nodes.
    pub fn arc_weights(&self) -> Vec<Real> {
        self.dz.iter().flatten().map(|w| w.norm()).collect()
    }

    pub fn split(&self, values: &[Complex]) -> Vec<Vec<Complex>> {
        values.chunks(Self::NODES).map(|c| c.to_vec()).collect()
    }

    /// `(1/2πi)∮ u dz` around loop `i` from samples of `u`.
    pub fn residue(&self, i: usize, u: &[Complex]) -> Complex {
        let s: Complex = u.iter().zip(&self.dz[i]).map(|(a, w)| a * w).sum();
        s / Complex::new(0.0, 2.0 * PI)
    }
}

/// The period conditions of a build: `p` hole pairings, then `p` handle
/// pairings when cuts are present, then one residue pairing per loop.
#[derive(Debug, Clone, Copy)]
pub struct PeriodSystem<'a> {
    domain: &'a Domain,
    cuts: Option<&'a CutSystem>,
    loops: Option<&'a ResidueLoops>,
}

impl<'a> PeriodSystem<'a> {
    pub fn new(domain: &'a Domain, cuts: Option<&'a CutSystem>, loops: Option<&'a ResidueLoops>) -> Result<Self> {
        if loops.is_some_and(|l| !l.is_empty()) && cuts.is_none() {
            return Err(QdError::InvalidInput("residue pairings need a cut system".into()));
        }
        Ok(Self { domain, cuts, loops })
    }

    pub fn len(&self) -> usize {
        let p = self.domain.genus();
        let handles = if self.cuts.is_some() { p } else { 0 };
        p + handles + self.loops.map_or(0, |l| l.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `B_k(x, y)`, `k = 1..=len()`. Hole pairings are `∮_{γ_k} x₁y₁ dz`,
    /// handle pairings `∫_{Γ_j} x₁y₁ dz − conj(∫_{Γ_j} x₂y₂ dz)`, and
    /// residue pairings `conj((1/2πi)∮ x₂y₂ dz)` around each loop.
    pub fn pairing(&self, x: &HalfOrderFrame, y: &HalfOrderFrame, k: usize) -> Result<Complex> {
        let p = self.domain.genus();
        if k == 0 || k > self.len() {
            return Err(QdError::InvalidInput(format!(
                "pairing index {k} outside 1..={}",
                self.len()
            )));
        }
        if k <= p {
            return hole_period(self.domain, &x.h1.mul(&y.h1)?, k);
        }
        let cuts = self.cuts.expect("handle pairings exist only with cuts");
        if k <= 2 * p {
            let j = k - p - 1;
            if x.h2_cut.len() <= j || y.h2_cut.len() <= j {
                return Err(QdError::InvalidInput("frame has no samples on the cuts".into()));
            }
            let c = &cuts.cuts()[j];
            let a: Complex = x.h1_cut[j]
                .iter()
                .zip(&y.h1_cut[j])
                .zip(c.dz())
                .map(|((u, v), w)| u * v * w)
                .sum();
            let b: Complex = x.h2_cut[j]
                .iter()
                .zip(&y.h2_cut[j])
                .zip(c.dz())
                .map(|((u, v), w)| u * v * w)
                .sum();
            return Ok(a - b.conj());
        }
        let i = k - 2 * p - 1;
        let loops = self.loops.expect("residue pairings exist only with loops");
        if x.h2_loops.len() <= i || y.h2_loops.len() <= i {
            return Err(QdError::InvalidInput(
                "frame has no samples on the residue loops".into(),
            ));
        }
        let prod: Vec<Complex> = x.h2_loops[i].iter().zip(&y.h2_loops[i]).map(|(u, v)| u * v).collect();
        Ok(loops.residue(i, &prod).conj())
    }

    /// `B_k(h, h)` for every `k`.
    pub fn periods(&self, h: &HalfOrderFrame) -> Result<Vec<Complex>> {
        (1..=self.len()).map(|k| self.pairing(h, h, k)).collect()
    }

    /// `G[k−1][i][j] = B_k(e_i, e_j)`.
    pub fn gram(&self, frames: &[HalfOrderFrame]) -> Result<Vec<Vec<Vec<Complex>>>> {
        let m = frames.len();
        let mut g = vec![vec![vec![Complex::new(0.0, 0.0); m]; m]; self.len()];
        for (k, gk) in g.iter_mut().enumerate() {
            for i in 0..m {
                for j in i..m {
                    let v = self.pairing(&frames[i], &frames[j], k + 1)?;
                    gk[i][j] = v;
                    gk[j][i] = v;
                }
            }
        }
        Ok(g)
    }
}

/// `B_k(x, y)` for `k = 1..=2p`: hole pairings for `k ≤ p`, handle
/// pairings for `k = p + j`.
pub fn pairing(
    domain: &Domain,
    cuts: Option<&CutSystem>,
    x: &HalfOrderFrame,
    y: &HalfOrderFrame,
    k: usize,
) -> Result<Complex> {
    let p = domain.genus();
    if k > p && cuts.is_none() && k <= 2 * p {
        return Err(QdError::InvalidInput("handle pairings need a cut system".into()));
    }
    PeriodSystem::new(domain, cuts, None)?.pairing(x, y, k)
}

/// The periods of `h² dz`: `p` hole periods, followed by the `p` handle
/// periods when `cuts` is given.
pub fn periods(domain: &Domain, h: &HalfOrderFrame, cuts: Option<&CutSystem>) -> Result<Vec<Complex>> {
    PeriodSystem::new(domain, cuts, None)?.periods(h)
}

/// Periods of the differential `σ² dz` of a span element with its companion.
pub fn element_periods(el: &SpanElement, cuts: Option<&CutSystem>) -> Result<Vec<Complex>> {
    if cuts.is_some() && !el.has_cuts() {
        return Err(QdError::InvalidInput("span element carries no cut samples".into()));
    }
    periods(el.domain(), &HalfOrderFrame::from_element(el, FrameTag::Combined), cuts)
}

/// `G[k−1][i][j] = B_k(e_i, e_j)` for the hole (and, with cuts, handle)
/// pairings.
pub fn gram(
    domain: &Domain,
    cuts: Option<&CutSystem>,
    frames: &[HalfOrderFrame],
    n_periods: usize,
) -> Result<Vec<Vec<Vec<Complex>>>> {
    let mut g = PeriodSystem::new(domain, cuts, None)?.gram(frames)?;
    if n_periods > g.len() {
        return Err(QdError::InvalidInput(format!(
            "{n_periods} periods requested, {} available",
            g.len()
        )));
    }
    g.truncate(n_periods);
    Ok(g)
}

/// Interior bump on a cut, vanishing to third order at both ends so that
/// adding it keeps `g₂` smooth against its anchor.
fn bubble(s: Real) -> Real {
    (s * (1.0 - s)).powi(3)
}

fn unit_tangent(domain: &Domain, curve: usize, param: Real) -> Complex {
    let d = domain.curve(curve).eval_derivative(param, 1);
    d / d.norm()
}

/// Anchors for `g₂^m`, `m = 0..=p`, on each cut: the linear interpolants in
/// the cut parameter of the compatibility values `conj(g₁^m T)` at the two
/// ends.
pub fn linear_anchors(domain: &Domain, cuts: &CutSystem, rational: &RationalBasis) -> Vec<Vec<Vec<Complex>>> {
    let g1 = |m: usize, z: Complex| {
        if m == 0 {
            Complex::new(1.0, 0.0)
        } else {
            rational.eval(m, z)
        }
    };
    (0..=rational.len())
        .map(|m| {
            cuts.cuts()
                .iter()
                .map(|c| {
                    let v0 = (g1(m, c.start()) * unit_tangent(domain, c.hole(), c.start_param())).conj();
                    let v1 = (g1(m, c.end()) * unit_tangent(domain, 0, c.end_param())).conj();
                    c.params().iter().map(|&s| v0 * (1.0 - s) + v1 * s).collect()
                })
                .collect()
        })
        .collect()
}

/// The reference frames `g⁰, …, g^{2p}`.
///
/// `g₁⁰ = 1`, `g₁^m = R_m` for `m ≤ p` and `g₁^m = 0` for `m > p`. On each
/// cut, `g₂^m` for `m ≤ p` is `anchors[m]` plus a multiple of a bump
/// vanishing at both ends, chosen so that `B_k(g⁰,g⁰) = 0` and
/// `B_k(g⁰,g^m) = δ_{km}`; for `m > p` it is the bump alone on one cut.
/// The anchors must meet the compatibility values `conj(g₁T)` at the cut
/// ends, as [`linear_anchors`] do.
pub fn reference_frames(
    domain: &Domain,
    cuts: &CutSystem,
    rational: &RationalBasis,
    anchors: &[Vec<Vec<Complex>>],
) -> Result<Vec<HalfOrderFrame>> {
    let p = domain.genus();
    if cuts.len() != p || rational.len() != p {
        return Err(QdError::InvalidInput(
            "one cut and one hole point per hole required".into(),
        ));
    }
    if anchors.len() != p + 1
        || anchors
            .iter()
            .any(|a| a.len() != p || a.iter().zip(cuts.cuts()).any(|(v, c)| v.len() != c.len()))
    {
        return Err(QdError::InvalidInput(
            "one anchor per frame and cut node required".into(),
        ));
    }
    let zero_cuts: Vec<Vec<Complex>> = cuts
        .cuts()
        .iter()
        .map(|c| vec![Complex::new(0.0, 0.0); c.len()])
        .collect();
    let one = Complex::new(1.0, 0.0);
    let integrate = |j: usize, f: &dyn Fn(usize) -> Complex| -> Complex {
        cuts.cuts()[j].dz().iter().enumerate().map(|(i, w)| f(i) * w).sum()
    };

    // g⁰: solve A + 2αB + α²C = conj(∫_Γ dz) for the bump weight α.
    let mut g0_2 = Vec::with_capacity(p);
    for (j, c) in cuts.cuts().iter().enumerate() {
        let lin = &anchors[0][j];
        let phi: Vec<Real> = c.params().iter().map(|&s| bubble(s)).collect();
        let a = integrate(j, &|i| lin[i] * lin[i]);
        let b = integrate(j, &|i| lin[i] * phi[i]);
        let cc = integrate(j, &|i| Complex::new(phi[i] * phi[i], 0.0));
        let rhs = (c.end() - c.start()).conj();
        let disc = (b * b - cc * (a - rhs)).sqrt();
        let alpha = [(-b + disc) / cc, (-b - disc) / cc]
            .into_iter()
            .min_by(|x, y| x.norm().total_cmp(&y.norm()))
            .expect("two roots");
        g0_2.push(lin.iter().zip(&phi).map(|(l, f)| l + alpha * f).collect::<Vec<_>>());
    }
    let g0 = HalfOrderFrame {
        h1: BoundaryFunction::constant(domain.grid(), one),
        h1_cut: cuts.cuts().iter().map(|c| vec![one; c.len()]).collect(),
        h2_cut: g0_2.clone(),
        h2_loops: Vec::new(),
        tag: FrameTag::Reference(0),
    };
    let mut frames = vec![g0];

    for m in 1..=p {
        let h1_cut: Vec<Vec<Complex>> = cuts
            .cuts()
            .iter()
            .map(|c| c.nodes().iter().map(|&z| rational.eval(m, z)).collect())
            .collect();
        let mut h2_cut = Vec::with_capacity(p);
        for (j, c) in cuts.cuts().iter().enumerate() {
            let lin = &anchors[m][j];
            let target = integrate(j, &|i| h1_cut[j][i]).conj();
            let gl = integrate(j, &|i| g0_2[j][i] * lin[i]);
            let gp = integrate(j, &|i| g0_2[j][i] * bubble(c.params()[i]));
            let beta = (target - gl) / gp;
            h2_cut.push(lin.iter().zip(c.params()).map(|(l, &s)| l + beta * bubble(s)).collect());
        }
        frames.push(HalfOrderFrame {
            h1: domain.trace(|z| rational.eval(m, z)),
            h1_cut,
            h2_cut,
            h2_loops: Vec::new(),
            tag: FrameTag::Reference(m),
        });
    }

    for i in 0..p {
        let c = &cuts.cuts()[i];
        let gp = integrate(i, &|n| g0_2[i][n] * bubble(c.params()[n]));
        let beta = -1.0 / gp;
        let mut h2_cut = zero_cuts.clone();
        h2_cut[i] = c.params().iter().map(|&s| beta * bubble(s)).collect();
        frames.push(HalfOrderFrame {
            h1: BoundaryFunction::constant(domain.grid(), Complex::new(0.0, 0.0)),
            h1_cut: zero_cuts.clone(),
            h2_cut,
            h2_loops: Vec::new(),
            tag: FrameTag::Reference(p + 1 + i),
        });
    }
    Ok(frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::geometry::{make_cuts, CutOptions};

    #[test]
    fn reference_frames_satisfy_the_frame_conditions() {
        let d = Domain::annulus(c64(0., 0.), 0.4, 1.0, 128).unwrap();
        let cuts = make_cuts(&d, &CutOptions::default()).unwrap();
        let rb = RationalBasis::new(d.hole_points()).unwrap();
        let g = reference_frames(&d, &cuts, &rb, &linear_anchors(&d, &cuts, &rb)).unwrap();
        assert_eq!(g.len(), 3);
        for k in 1..=2 {
            assert!(pairing(&d, Some(&cuts), &g[0], &g[0], k).unwrap().norm() < 1e-12);
            for m in 1..=2 {
                let e = if k == m { 1.0 } else { 0.0 };
                let v = pairing(&d, Some(&cuts), &g[0], &g[m], k).unwrap();
                assert!((v - e).norm() < 1e-12, "B_{k}(g0,g{m}) = {v}");
            }
        }
        for f in &g {
            assert!(f.endpoint_compatibility(&d, &cuts) < 1e-10);
        }
    }

    #[test]
    fn disc_has_no_periods() {
        let d = Domain::disc(c64(0., 0.), 1.0, 64).unwrap();
        let f = HalfOrderFrame {
            h1: d.trace(|_| c64(1., 0.)),
            h1_cut: vec![],
            h2_cut: vec![],
            h2_loops: vec![],
            tag: FrameTag::Combined,
        };
        assert!(periods(&d, &f, None).unwrap().is_empty());
    }

    #[test]
    fn annulus_hole_period_matches_residue() {
        // F = 1 + 0.3 R₁ with R₁ = 1/(2πiz): F² has residue 2·0.3/(2πi) at 0,
        // so the counterclockwise period is 0.6.
        let d = Domain::annulus(c64(0., 0.), 0.4, 1.0, 128).unwrap();
        let rb = RationalBasis::new(d.hole_points()).unwrap();
        let f = HalfOrderFrame {
            h1: d.trace(|z| 1.0 + 0.3 * rb.eval(1, z)),
            h1_cut: vec![],
            h2_cut: vec![],
            h2_loops: vec![],
            tag: FrameTag::Combined,
        };
        let p = periods(&d, &f, None).unwrap();
        assert!((p[0] - c64(0.6, 0.)).norm() < 1e-12);
        let one = HalfOrderFrame {
            h1: d.trace(|_| c64(1., 0.)),
            ..f
        };
        assert!(periods(&d, &one, None).unwrap()[0].norm() < 1e-13);
    }
}
