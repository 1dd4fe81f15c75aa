use std::f64::consts::PI;

use crate::geometry::domain::Domain;
use crate::geometry::polygon;
use crate::numerics::GaussLegendre;
use crate::{Complex, QdError, Real, Result};

/// Geometry of a cut arc `Γ(s)`, `s ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum CutPath {
    Segment {
        from: Complex,
        to: Complex,
    },
    /// `Γ(s) = Σ_{k=-K}^{K} c_k e^{iπks}` (coefficients lowest frequency
    /// first).
    Trig {
        coeffs: Vec<Complex>,
    },
}

impl CutPath {
    pub fn eval(&self, s: Real) -> Complex {
        match self {
            CutPath::Segment { from, to } => from + (to - from) * s,
            CutPath::Trig { coeffs } => {
                let k0 = (coeffs.len() / 2) as i64;
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * Complex::new(0.0, PI * (i as i64 - k0) as f64 * s).exp())
                    .sum()
            }
        }
    }

    /// `dΓ/ds`.
    pub fn derivative(&self, s: Real) -> Complex {
        match self {
            CutPath::Segment { from, to } => to - from,
            CutPath::Trig { coeffs } => {
                let k0 = (coeffs.len() / 2) as i64;
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let w = PI * (i as i64 - k0) as f64;
                        c * Complex::new(0.0, w) * Complex::new(0.0, w * s).exp()
                    })
                    .sum()
            }
        }
    }
}

/// Placement hint for the cut leaving one hole.
#[derive(Debug, Clone, PartialEq)]
pub enum Anchor {
    /// Leave the hole in this direction (radians) as seen from its hole point.
    Angle(Real),
    /// A user-supplied arc from the hole curve to the outer curve.
    Arc(Vec<Complex>),
}

#[derive(Debug, Clone)]
pub struct CutOptions {
    /// One optional hint per hole.
    pub anchors: Vec<Option<Anchor>>,
    /// Points the cuts must stay away from (base points of kernel fits).
    pub avoid: Vec<Complex>,
    /// Minimum distance from a cut to avoided points and to the holes it
    /// does not end on, as a fraction of the domain diameter.
    pub clearance: Real,
    pub panels: usize,
    pub nodes_per_panel: usize,
}

impl Default for CutOptions {
    fn default() -> Self {
        Self {
            anchors: Vec::new(),
            avoid: Vec::new(),
            clearance: 0.05,
            panels: 8,
            nodes_per_panel: 16,
        }
    }
}

/// An arc from a point on hole curve `γ_j` to a point on the outer curve,
/// sampled at composite Gauss–Legendre nodes.
#[derive(Debug, Clone)]
pub struct Cut {
    hole: usize,
    path: CutPath,
    /// Boundary parameter of the start point on `γ_j` and the end point on `γ₀`.
    start_param: Real,
    end_param: Real,
    params: Vec<Real>,
    nodes: Vec<Complex>,
    dz: Vec<Complex>,
    ds: Vec<Real>,
}

impl Cut {
    fn new(domain: &Domain, hole: usize, path: CutPath, rule: &GaussLegendre<Real>) -> Self {
        let start_param = nearest_param(domain, hole, path.eval(0.0));
        let end_param = nearest_param(domain, 0, path.eval(1.0));
        let mut nodes = Vec::with_capacity(rule.nodes.len());
        let mut dz = Vec::with_capacity(rule.nodes.len());
        let mut ds = Vec::with_capacity(rule.nodes.len());
        for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
            let d = path.derivative(s);
            nodes.push(path.eval(s));
            dz.push(d * w);
            ds.push(d.norm() * w);
        }
        Self {
            hole,
            path,
            start_param,
            end_param,
            params: rule.nodes.clone(),
            nodes,
            dz,
            ds,
        }
    }

    /// Index of the hole curve the cut starts on (`1..=p`).
    pub fn hole(&self) -> usize {
        self.hole
    }

    pub fn path(&self) -> &CutPath {
        &self.path
    }

    pub fn start(&self) -> Complex {
        self.path.eval(0.0)
    }

    pub fn end(&self) -> Complex {
        self.path.eval(1.0)
    }

    pub fn start_param(&self) -> Real {
        self.start_param
    }

    pub fn end_param(&self) -> Real {
        self.end_param
    }

    /// Quadrature parameters in `(0, 1)`.
    pub fn params(&self) -> &[Real] {
        &self.params
    }

    pub fn nodes(&self) -> &[Complex] {
        &self.nodes
    }

    /// Gauss–Legendre `dz` weights.
    pub fn dz(&self) -> &[Complex] {
        &self.dz
    }

    pub fn ds(&self) -> &[Real] {
        &self.ds
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn length(&self) -> Real {
        self.ds.iter().sum()
    }

    /// `∫_Γ u dz` for samples `u` at the nodes.
    pub fn integrate_dz(&self, u: &[Complex]) -> Result<Complex> {
        self.check_len(u)?;
        Ok(u.iter().zip(&self.dz).map(|(a, b)| a * b).sum())
    }

    /// `∫_Γ u ds` for samples `u` at the nodes.
    pub fn integrate_ds(&self, u: &[Complex]) -> Result<Complex> {
        self.check_len(u)?;
        Ok(u.iter().zip(&self.ds).map(|(a, b)| a * b).sum())
    }

    /// Weighted `L²(Γ)` norm of samples.
    pub fn l2_norm(&self, u: &[Complex]) -> Result<Real> {
        self.check_len(u)?;
        Ok(u.iter()
            .zip(&self.ds)
            .map(|(a, w)| a.norm_sqr() * w)
            .sum::<f64>()
            .sqrt())
    }

    fn check_len(&self, u: &[Complex]) -> Result<()> {
        if u.len() != self.nodes.len() {
            return Err(QdError::GridMismatch(format!(
                "{} samples for a cut with {} nodes",
                u.len(),
                self.nodes.len()
            )));
        }
        Ok(())
    }

    /// Endpoints plus interior nodes as a polyline.
    pub fn polyline(&self) -> Vec<Complex> {
        let mut v = Vec::with_capacity(self.nodes.len() + 2);
        v.push(self.start());
        v.extend_from_slice(&self.nodes);
        v.push(self.end());
        v
    }

    /// Distance from `p` to the polyline.
    pub fn distance_to(&self, p: Complex) -> Real {
        self.polyline()
            .windows(2)
            .map(|w| polygon::point_segment_distance(p, w[0], w[1]))
            .fold(f64::INFINITY, f64::min)
    }
}

fn nearest_param(domain: &Domain, curve: usize, p: Complex) -> Real {
    let c = domain.curve(curve);
    let mut t = c.nearest_sample(p) as f64 * c.step();
    // Newton on d/dt |z(t) - p|² = 2 Re(conj(z - p) z') = 0.
    for _ in 0..20 {
        let z = c.eval(t) - p;
        let d1 = c.eval_derivative(t, 1);
        let d2 = c.eval_derivative(t, 2);
        let g = (z.conj() * d1).re;
        let dg = d1.norm_sqr() + (z.conj() * d2).re;
        if dg <= 0.0 {
            break;
        }
        let step = g / dg;
        t -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    t.rem_euclid(2.0 * PI)
}

/// The `p` cuts of a multiply connected domain, one per hole.
#[derive(Debug, Clone)]
pub struct CutSystem {
    cuts: Vec<Cut>,
    clearance: Real,
}

impl CutSystem {
    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    /// The cut leaving hole `j` (`1..=p`).
    pub fn cut(&self, hole: usize) -> &Cut {
        &self.cuts[hole - 1]
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    /// Absolute clearance distance used during construction.
    pub fn clearance(&self) -> Real {
        self.clearance
    }

    /// Ensure `p` keeps the clearance distance from every cut.
    pub fn check_point(&self, p: Complex) -> Result<()> {
        for c in &self.cuts {
            let d = c.distance_to(p);
            if d < self.clearance {
                return Err(QdError::Cut(format!(
                    "point {p} is {d:.3e} from the cut of hole {}, clearance {:.3e}",
                    c.hole, self.clearance
                )));
            }
        }
        Ok(())
    }
}

/// Check one candidate cut against the domain, the avoided points, and the
/// cuts already placed. Returns a reason on failure.
fn admissible(domain: &Domain, cut: &Cut, placed: &[Cut], avoid: &[Complex], clearance: Real) -> Option<String> {
    let line = cut.polyline();
    let len = cut.length();
    let scale = domain.diameter();
    let tol = 1e-8 * scale;
    let start_gap = domain.curve(cut.hole).distance_to(cut.start());
    let end_gap = domain.curve(0).distance_to(cut.end());
    let grid_tol = |k: usize| {
        let c = domain.curve(k);
        c.length() / c.len() as f64
    };
    if start_gap > grid_tol(cut.hole).max(tol) || end_gap > grid_tol(0).max(tol) {
        return Some("endpoints are not on the boundary".into());
    }
    // Interior of the cut: trim a sliver off each end so the endpoint
    // contacts do not register as crossings.
    let trim = 1e-6 * len;
    let mut inner = line.clone();
    let n = inner.len();
    let shift = |from: Complex, toward: Complex| from + (toward - from) * (trim / (toward - from).norm().max(trim));
    inner[0] = shift(line[0], line[1]);
    inner[n - 1] = shift(line[n - 1], line[n - 2]);
    for (k, c) in domain.curves().iter().enumerate() {
        let s = c.samples();
        let m = s.len();
        for i in 0..m {
            for w in inner.windows(2) {
                if polygon::segments_intersect(w[0], w[1], s[i], s[(i + 1) % m]) {
                    return Some(format!("crosses boundary curve {k}"));
                }
            }
        }
        if k != 0 && k != cut.hole {
            let d = s.iter().map(|&z| cut.distance_to(z)).fold(f64::INFINITY, f64::min);
            if d < clearance {
                return Some(format!("passes within {d:.3e} of hole {k}"));
            }
        }
    }
    if !cut.nodes.iter().all(|&z| domain.contains(z)) {
        return Some("leaves the domain".into());
    }
    for &p in avoid {
        let d = cut.distance_to(p);
        if d < clearance {
            return Some(format!("passes within {d:.3e} of base point {p}"));
        }
    }
    for other in placed {
        if polygon_paths_intersect(&line, &other.polyline()) {
            return Some(format!("intersects the cut of hole {}", other.hole));
        }
    }
    None
}

fn polygon_paths_intersect(u: &[Complex], v: &[Complex]) -> bool {
    u.windows(2).any(|a| {
        v.windows(2)
            .any(|b| polygon::segments_intersect(a[0], a[1], b[0], b[1]))
    })
}

/// Build one cut per hole: straight segments between nearest boundary points
/// by default, steered by the optional anchors.
pub fn make_cuts(domain: &Domain, opts: &CutOptions) -> Result<CutSystem> {
    let p = domain.genus();
    if p == 0 {
        return Err(QdError::Cut("a simply connected domain has no cuts".into()));
    }
    if !opts.anchors.is_empty() && opts.anchors.len() != p {
        return Err(QdError::InvalidInput(format!(
            "{} anchors given for {p} holes",
            opts.anchors.len()
        )));
    }
    let rule = GaussLegendre::<Real>::composite_unit(opts.panels, opts.nodes_per_panel);
    let clearance = opts.clearance * domain.diameter();
    let outer = domain.curve(0).samples();
    let nearest_outer = |z: Complex| -> Complex {
        *outer
            .iter()
            .min_by(|a, b| (*a - z).norm().total_cmp(&(*b - z).norm()))
            .expect("outer curve has samples")
    };
    let mut placed: Vec<Cut> = Vec::with_capacity(p);
    for j in 1..=p {
        let anchor = opts.anchors.get(j - 1).cloned().flatten();
        let hole = domain.curve(j).samples();
        let zj = domain.hole_points()[j - 1];
        let candidates: Vec<CutPath> = match anchor {
            Some(Anchor::Arc(coeffs)) => vec![CutPath::Trig { coeffs }],
            Some(Anchor::Angle(theta)) => {
                let dir = Complex::from_polar(1.0, theta);
                let from = *hole
                    .iter()
                    .max_by(|a, b| {
                        let ca = ((*a - zj) * dir.conj()).arg().abs();
                        let cb = ((*b - zj) * dir.conj()).arg().abs();
                        cb.total_cmp(&ca)
                    })
                    .expect("hole curve has samples");
                vec![CutPath::Segment {
                    from,
                    to: nearest_outer(from),
                }]
            }
            None => {
                let quantum = 1e-9 * domain.diameter();
                let mut c: Vec<(i64, usize, Complex, Complex)> = hole
                    .iter()
                    .enumerate()
                    .map(|(i, &from)| {
                        let to = nearest_outer(from);
                        (((to - from).norm() / quantum).round() as i64, i, from, to)
                    })
                    .collect();
                c.sort_by_key(|&(l, i, _, _)| (l, i));
                c.into_iter()
                    .map(|(_, _, from, to)| CutPath::Segment { from, to })
                    .collect()
            }
        };
        let explicit = candidates.len() == 1;
        let mut last_reason = String::new();
        let mut chosen = None;
        for path in candidates {
            let cut = Cut::new(domain, j, path, &rule);
            match admissible(domain, &cut, &placed, &opts.avoid, clearance) {
                None => {
                    chosen = Some(cut);
                    break;
                }
                Some(reason) => last_reason = reason,
            }
        }
        match chosen {
            Some(c) => placed.push(c),
            None if explicit => return Err(QdError::Cut(format!("cut for hole {j} rejected: {last_reason}"))),
            None => {
                return Err(QdError::Cut(format!(
                    "no admissible straight cut for hole {j} (last candidate: {last_reason})"
                )))
            }
        }
    }
    Ok(CutSystem {
        cuts: placed,
        clearance,
    })
}
