use nalgebra::DMatrix;

use crate::builder::frames::{
    element_periods, gram, pairing, reference_frames, FrameTag, HalfOrderFrame, PeriodSystem, ResidueLoops,
};
use crate::builder::map::{certify, integrate_map, jets_at, BuildMode, ConformalMap, DoubleDiagnostics, SolveSummary};
use crate::builder::rational::RationalBasis;
use crate::geometry::{make_cuts, BoundaryFunction, CutOptions, CutSystem, Domain};
use crate::kernels::{CauchyEvaluator, SzegoSolver, DEFAULT_CLEARANCE};
use crate::numerics::newton::{newton_holomorphic, NewtonOptions, NewtonReport};
use crate::spanfit::{FitReport, SpanBasis, SpanElement};
use crate::{Complex, QdError, Real, Result};

#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// Fixed span order `N`; when `None` the smallest order meeting `eps`
    /// is searched for.
    pub order: Option<usize>,
    /// Target fit residual.
    pub eps: Real,
    /// Largest order tried by the search.
    pub max_order: usize,
    /// Largest admissible period after the solve.
    pub period_tolerance: Real,
    pub newton: NewtonOptions,
    pub cut_options: CutOptions,
    /// Base points used besides `a`. `None` places [`auxiliary_points`]
    /// on multiply connected domains and none on simply connected ones.
    pub auxiliary: Option<Vec<Complex>>,
    /// Points per hole in the automatic layout.
    pub ring_size: usize,
    /// Points on each side of each cut in the automatic layout of the
    /// double build.
    pub flank_size: usize,
    /// Highest kernel order at each auxiliary point.
    pub auxiliary_order: usize,
    /// Relative singular-value cutoff of the span fits. Cutting at a
    /// moderate level discards coefficient combinations that are invisible
    /// on the boundary but make the companion `λ` large inside.
    pub span_cutoff: Real,
    /// Weight of the penalty on `λ` near the auxiliary points in the double
    /// build.
    pub damping: Real,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            order: None,
            eps: 1e-4,
            max_order: 40,
            period_tolerance: 1e-9,
            newton: NewtonOptions::default(),
            cut_options: CutOptions::default(),
            auxiliary: None,
            ring_size: 24,
            flank_size: 6,
            auxiliary_order: 1,
            span_cutoff: 1e-7,
            damping: 1e-7,
        }
    }
}

/// Automatic auxiliary base points. For each hole, `per_hole` points
/// halfway between the hole curve and the nearest point of another curve;
/// with cuts, also `per_cut` points on each side of every cut, just
/// outside its clearance. Points too close to the boundary, to a cut, to
/// `a`, or to each other are dropped.
pub fn auxiliary_points(
    domain: &Domain,
    a: Complex,
    cuts: Option<&CutSystem>,
    per_hole: usize,
    per_cut: usize,
) -> Vec<Complex> {
    let mut out: Vec<Complex> = Vec::new();
    for k in 1..domain.connectivity() {
        if per_hole == 0 {
            break;
        }
        let hole = domain.curve(k);
        let n = hole.len();
        let mut ring = Vec::with_capacity(per_hole);
        for i in 0..per_hole {
            let z = hole.samples()[i * n / per_hole];
            let q = (0..domain.connectivity())
                .filter(|&m| m != k)
                .flat_map(|m| domain.curve(m).samples().iter().copied())
                .min_by(|x, y| (x - z).norm().total_cmp(&(y - z).norm()))
                .expect("another curve");
            ring.push(0.5 * (z + q));
        }
        let spacing = (0..ring.len())
            .map(|i| (ring[i] - ring[(i + 1) % ring.len()]).norm())
            .fold(f64::INFINITY, f64::min);
        for b in ring {
            let keep = domain.check_clearance(b, DEFAULT_CLEARANCE).is_ok()
                && cuts.is_none_or(|c| c.check_point(b).is_ok())
                && (b - a).norm() >= 0.5 * spacing
                && out.iter().all(|q| (q - b).norm() >= 0.5 * spacing);
            if keep {
                out.push(b);
            }
        }
    }
    let Some(cs) = cuts else { return out };
    for c in cs.cuts() {
        if per_cut == 0 {
            break;
        }
        let gap = c.length() / per_cut as Real;
        for i in 0..per_cut {
            let s = (i as Real + 0.5) / per_cut as Real;
            let t = c.path().derivative(s);
            let n = Complex::new(0.0, 1.0) * t / t.norm();
            for side in [1.0, -1.0] {
                let b = c.path().eval(s) + n * (side * 1.2 * cs.clearance());
                let keep = domain.check_clearance(b, DEFAULT_CLEARANCE).is_ok()
                    && cs.check_point(b).is_ok()
                    && (b - a).norm() >= 0.3 * gap
                    && out.iter().all(|q| (q - b).norm() >= 0.3 * gap);
                if keep {
                    out.push(b);
                }
            }
        }
    }
    out
}

fn auxiliary_for(
    domain: &Domain,
    a: Complex,
    cuts: Option<&CutSystem>,
    per_cut: usize,
    opts: &BuildOptions,
) -> Vec<Complex> {
    match &opts.auxiliary {
        Some(v) => v.clone(),
        None if domain.is_simply_connected() => Vec::new(),
        None => auxiliary_points(domain, a, cuts, opts.ring_size, per_cut),
    }
}

/// Largest order at `a` that fits next to the auxiliary columns.
fn max_order(domain: &Domain, opts: &BuildOptions, auxiliary: usize) -> Result<usize> {
    let aux_cols = auxiliary * (opts.auxiliary_order + 1);
    let cap = (domain.len() / 4).checked_sub(aux_cols + 1).ok_or_else(|| {
        QdError::InvalidInput(format!(
            "{auxiliary} auxiliary points leave no room in a grid of {}",
            domain.len()
        ))
    })?;
    Ok(opts.order.unwrap_or(opts.max_order).min(cap))
}

/// The span basis at `a` (order `max`) and the auxiliary points.
fn span_basis(
    domain: &Domain,
    a: Complex,
    aux: &[Complex],
    max: usize,
    cuts: Option<&CutSystem>,
    opts: &BuildOptions,
) -> Result<SpanBasis> {
    let solver = SzegoSolver::new(domain)?.with_order_cap(max.max(opts.auxiliary_order));
    let mut bases = vec![(a, max)];
    bases.extend(aux.iter().map(|&b| (b, opts.auxiliary_order)));
    Ok(SpanBasis::new(&solver, &bases, cuts)?.with_cutoff(opts.span_cutoff))
}

fn orders(n: usize, aux: usize, opts: &BuildOptions) -> Vec<usize> {
    let mut o = vec![n];
    o.extend(std::iter::repeat_n(opts.auxiliary_order, aux));
    o
}

/// Fit at the requested order, or at the first order whose residual is at
/// most `eps`.
fn select_order<T>(
    opts: &BuildOptions,
    max: usize,
    mut fit: impl FnMut(usize) -> Result<(T, Real)>,
) -> Result<(usize, T)> {
    if let Some(n) = opts.order {
        if n > max {
            return Err(QdError::OrderCap { order: n, cap: max });
        }
        let (t, r) = fit(n)?;
        if r > opts.eps {
            return Err(QdError::FitInfeasible {
                residual: r,
                target: opts.eps,
            });
        }
        return Ok((n, t));
    }
    let mut best = f64::INFINITY;
    for n in 0..=max {
        let (t, r) = fit(n)?;
        if r <= opts.eps {
            return Ok((n, t));
        }
        best = best.min(r);
    }
    Err(QdError::FitInfeasible {
        residual: best,
        target: opts.eps,
    })
}

fn cuts_for(domain: &Domain, a: Complex, opts: &BuildOptions) -> Result<CutSystem> {
    let mut co = opts.cut_options.clone();
    co.avoid.push(a);
    make_cuts(domain, &co)
}

/// Newton on `P_k(t) = Σ_{i,j} τ_i τ_j G_k[i][j] = 0` with `τ = (1, t)`.
fn solve_periods(g: &[Vec<Vec<Complex>>], opts: NewtonOptions) -> Result<(Vec<Complex>, NewtonReport)> {
    let d = g.len();
    let (t, rep) = newton_holomorphic(vec![Complex::new(0.0, 0.0); d], opts, |t| {
        let mut tau = vec![Complex::new(1.0, 0.0)];
        tau.extend_from_slice(t);
        let mut val = vec![Complex::new(0.0, 0.0); d];
        let mut jac = DMatrix::<Complex>::zeros(d, d);
        for k in 0..d {
            for i in 0..=d {
                let row: Complex = (0..=d).map(|j| g[k][i][j] * tau[j]).sum();
                val[k] += tau[i] * row;
                if i > 0 {
                    jac[(k, i - 1)] = row * 2.0;
                }
            }
        }
        (val, jac)
    })?;
    if !rep.converged {
        return Err(QdError::NewtonFailed {
            iterations: rep.iterations,
            residual: rep.residual,
            detail: "period system did not converge".into(),
        });
    }
    Ok((t, rep))
}

fn summary(t: Vec<Complex>, rep: &NewtonReport) -> SolveSummary {
    SolveSummary {
        unknowns: t,
        iterations: rep.iterations,
        residual: rep.residual,
        converged: rep.converged,
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    mode: BuildMode,
    sigma: SpanElement,
    a: Complex,
    order: usize,
    cuts: Option<CutSystem>,
    periods: Vec<Complex>,
    fits: Vec<FitReport>,
    solve: Option<SolveSummary>,
    double: Option<DoubleDiagnostics>,
    period_tolerance: Real,
) -> Result<ConformalMap> {
    let (f, constants, increments) = integrate_map(&sigma, cuts.as_ref(), a)?;
    let worst = periods.iter().chain(&increments).map(|p| p.norm()).fold(0.0, f64::max);
    if worst > period_tolerance {
        return Err(QdError::Periods {
            residual: worst,
            tolerance: period_tolerance,
        });
    }
    let (sigma_jets, f_jets, jet_radius) = jets_at(&sigma, a, order)?;
    let certificate = certify(&sigma, &f, f_jets[0])?;
    if !certificate.passed {
        return Err(QdError::Univalence(format!(
            "simple image: {}, zeros of f': {:.3}, degree: {}",
            certificate.image_simple, certificate.derivative_zeros, certificate.degree
        )));
    }
    let d = sigma.domain();
    let bases: Vec<Complex> = sigma.bases().iter().map(|b| b.0).collect();
    let mut nodes = vec![f_jets[0]];
    if bases.len() > 1 {
        let images = CauchyEvaluator::new(d).evaluate(&[&f], &bases[1..])?;
        nodes.extend(images.into_iter().flatten());
    }
    let identity_distance = f
        .values()
        .iter()
        .zip(d.points())
        .map(|(w, z)| (w - z).norm())
        .fold(0.0, f64::max);
    Ok(ConformalMap {
        mode,
        f_boundary: f,
        base_point: a,
        order,
        constants,
        sigma_jets,
        f_jets,
        jet_radius,
        periods,
        increments,
        fits,
        solve,
        double,
        certificate,
        identity_distance,
        cuts,
        nodes,
        sigma,
    })
}

impl ConformalMap {
    /// The map with `f' = σ²` for a given span element, normalized by
    /// `f(a) = a`. Multiply connected domains need `σ` sampled on `cuts`;
    /// the periods are checked against `period_tolerance`.
    pub fn from_element(
        sigma: SpanElement,
        a: Complex,
        cuts: Option<CutSystem>,
        period_tolerance: Real,
    ) -> Result<ConformalMap> {
        if sigma.bases()[0].0 != a {
            return Err(QdError::InvalidInput(format!(
                "the first base point of σ is {}, not {a}",
                sigma.bases()[0].0
            )));
        }
        let mode = if sigma.domain().is_simply_connected() {
            BuildMode::SimplyConnected
        } else {
            BuildMode::ArcLength
        };
        let periods = element_periods(&sigma, None)?;
        let order = sigma.bases()[0].1;
        finish(
            mode,
            sigma,
            a,
            order,
            cuts,
            periods,
            Vec::new(),
            None,
            None,
            period_tolerance,
        )
    }
}

/// Simply connected build: `σ ≈ 1` in the span at `a`, `f' = σ²`,
/// `f(a) = a`.
pub fn build_sc(domain: &Domain, a: Complex, opts: &BuildOptions) -> Result<ConformalMap> {
    if !domain.is_simply_connected() {
        return Err(QdError::InvalidInput("build_sc needs a simply connected domain".into()));
    }
    let aux = auxiliary_for(domain, a, None, 0, opts);
    let max = max_order(domain, opts, aux.len())?;
    let basis = span_basis(domain, a, &aux, max, None, opts)?;
    let one = BoundaryFunction::constant(domain.grid(), Complex::new(1.0, 0.0));
    let (n, (el, rep)) = select_order(opts, max, |n| {
        let (el, rep) = basis.truncated(&orders(n, aux.len(), opts))?.fit(&one, None, None)?;
        let r = rep.boundary_residual;
        Ok(((el, rep), r))
    })?;
    finish(
        BuildMode::SimplyConnected,
        el,
        a,
        n,
        None,
        Vec::new(),
        vec![rep],
        None,
        None,
        opts.period_tolerance,
    )
}

/// Multiply connected arc-length build: `h ≈ 1` and `r_j ≈ R_j` in the
/// span, then `F = h − Σ A_j r_j` with `A` solving the hole-period system,
/// and `f' = F²`.
pub fn build_mc_arclength(domain: &Domain, a: Complex, opts: &BuildOptions) -> Result<ConformalMap> {
    if domain.is_simply_connected() {
        return Err(QdError::InvalidInput(
            "build_mc_arclength needs a multiply connected domain".into(),
        ));
    }
    let p = domain.genus();
    let cuts = cuts_for(domain, a, opts)?;
    let aux = auxiliary_for(domain, a, Some(&cuts), 0, opts);
    let max = max_order(domain, opts, aux.len())?;
    let basis = span_basis(domain, a, &aux, max, Some(&cuts), opts)?;
    let rational = RationalBasis::new(domain.hole_points())?;
    let mut targets = vec![(BoundaryFunction::constant(domain.grid(), Complex::new(1.0, 0.0)), None)];
    targets.extend(rational.traces(domain).into_iter().map(|r| (r, None)));
    let (n, fits) = select_order(opts, max, |n| {
        let fits = basis.truncated(&orders(n, aux.len(), opts))?.fit_many(&targets, None)?;
        let r = fits.iter().map(|f| f.1.boundary_residual).fold(0.0, f64::max);
        Ok((fits, r))
    })?;
    let frames: Vec<HalfOrderFrame> = fits
        .iter()
        .enumerate()
        .map(|(i, (el, _))| HalfOrderFrame::from_element(el, FrameTag::Approximation(i)))
        .collect();
    let g = gram(domain, None, &frames, p)?;
    let (s, rep) = solve_periods(&g, opts.newton)?;
    let mut sigma = fits[0].0.clone();
    for (j, sj) in s.iter().enumerate() {
        sigma = sigma.add_scaled(*sj, &fits[j + 1].0)?;
    }
    let periods = element_periods(&sigma, None)?;
    // The unknowns are s = −A.
    let a_coeffs: Vec<Complex> = s.iter().map(|v| -v).collect();
    let reports = fits.into_iter().map(|f| f.1).collect();
    finish(
        BuildMode::ArcLength,
        sigma,
        a,
        n,
        Some(cuts),
        periods,
        reports,
        Some(summary(a_coeffs, &rep)),
        None,
        opts.period_tolerance,
    )
}

/// Span elements `e_i` of least fit norm with `B_k(h⁰, e_i) = δ_{k,q_i}`
/// for every pairing `k`, where `q_i` is the `i`-th residue pairing.
fn residue_frames(
    basis: &SpanBasis,
    system: &PeriodSystem,
    loops: &ResidueLoops,
    h0: &HalfOrderFrame,
    first_residue: usize,
) -> Result<Vec<SpanElement>> {
    let rows = system.len();
    let cols = basis.columns();
    let mut k = DMatrix::<Complex>::zeros(rows, cols);
    let mut unit = vec![Complex::new(0.0, 0.0); cols];
    for m in 0..cols {
        unit[m] = Complex::new(1.0, 0.0);
        let col = HalfOrderFrame::from_element_with_loops(&basis.element(&unit)?, FrameTag::Combined, loops)?;
        unit[m] = Complex::new(0.0, 0.0);
        for r in 0..rows {
            k[(r, m)] = system.pairing(h0, &col, r + 1)?;
        }
    }
    let rhs: Vec<Vec<Complex>> = (0..loops.len())
        .map(|i| {
            (0..rows)
                .map(|r| Complex::new(if r == first_residue + i { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();
    basis.min_norm_elements(&k, &rhs, None)
}

/// Double build: span approximations `h^m` of the reference frames `g^m`
/// (boundary and cut targets), then `h = h⁰ + Σ t_m h^m` with all `2p`
/// periods of `h² dz` on the double killed by Newton, and `f' = h₁²`.
///
/// With auxiliary base points, `h² dz` also has poles at their reflections;
/// their residues are added to the system, with one extra frame each.
///
/// On a simply connected domain this is [`build_sc`].
pub fn build_double(domain: &Domain, a0: Complex, opts: &BuildOptions) -> Result<ConformalMap> {
    if domain.is_simply_connected() {
        return build_sc(domain, a0, opts);
    }
    let p = domain.genus();
    let cuts = cuts_for(domain, a0, opts)?;
    let aux = auxiliary_for(domain, a0, Some(&cuts), opts.flank_size, opts);
    let max = max_order(domain, opts, aux.len())?;
    let loops = ResidueLoops::new(domain, &aux, &[a0])?;
    let weights: Vec<Real> = loops.arc_weights().iter().map(|w| w * opts.damping).collect();
    let basis = span_basis(domain, a0, &aux, max, Some(&cuts), opts)?.with_damping(&loops.flat_nodes(), &weights)?;
    let rational = RationalBasis::new(domain.hole_points())?;
    let mut plain = vec![(BoundaryFunction::constant(domain.grid(), Complex::new(1.0, 0.0)), None)];
    plain.extend(rational.traces(domain).into_iter().map(|r| (r, None)));
    // The order is chosen on the boundary-only fits; the joint fits carry
    // the cut targets as well and are only as good as the damping allows.
    let (n, chosen) = select_order(opts, max, |n| {
        let trunc = basis.truncated(&orders(n, aux.len(), opts))?;
        let natural = trunc.fit_many(&plain, None)?;
        let r = natural.iter().map(|f| f.1.boundary_residual).fold(0.0, f64::max);
        if r > opts.eps {
            return Ok((None, r));
        }
        // Anchor g₂ on the companions of the boundary-only fits, which are
        // compatible with g₁ to all orders at the cut ends.
        let anchors: Vec<Vec<Vec<Complex>>> = natural.into_iter().map(|f| f.0.cut_lambda().to_vec()).collect();
        let refs = reference_frames(domain, &cuts, &rational, &anchors)?;
        let targets: Vec<(BoundaryFunction, Option<Vec<Vec<Complex>>>)> =
            refs.iter().map(|g| (g.h1.clone(), Some(g.h2_cut.clone()))).collect();
        let fits = trunc.fit_many(&targets, None)?;
        Ok((Some((refs, fits)), r))
    })?;
    let (refs, fits) = chosen.ok_or(QdError::FitInfeasible {
        residual: Real::NAN,
        target: opts.eps,
    })?;
    let system = PeriodSystem::new(domain, Some(&cuts), Some(&loops))?;
    let mut elements: Vec<SpanElement> = fits.iter().map(|f| f.0.clone()).collect();
    let mut frames: Vec<HalfOrderFrame> = elements
        .iter()
        .enumerate()
        .map(|(i, el)| HalfOrderFrame::from_element_with_loops(el, FrameTag::Approximation(i), &loops))
        .collect::<Result<_>>()?;
    let diagnostics = double_diagnostics(domain, &cuts, &refs, &frames, &fits)?;
    if !loops.is_empty() {
        let trunc = basis.truncated(&orders(n, aux.len(), opts))?;
        for (i, e) in residue_frames(&trunc, &system, &loops, &frames[0], 2 * p)?
            .into_iter()
            .enumerate()
        {
            frames.push(HalfOrderFrame::from_element_with_loops(
                &e,
                FrameTag::Approximation(2 * p + 1 + i),
                &loops,
            )?);
            elements.push(e);
        }
    }
    let g = system.gram(&frames)?;
    let (t, rep) = solve_periods(&g, opts.newton).map_err(|e| match e {
        QdError::NewtonFailed {
            iterations,
            residual,
            detail,
        } => QdError::NewtonFailed {
            iterations,
            residual,
            detail: format!(
                "{detail}; |c| ≤ {:.2e}, |b| ≤ {:.2e}, |a| ≤ {:.2e}",
                diagnostics.c_max, diagnostics.b_max, diagnostics.a_max
            ),
        },
        e => e,
    })?;
    let mut sigma = elements[0].clone();
    for (m, tm) in t.iter().enumerate() {
        sigma = sigma.add_scaled(*tm, &elements[m + 1])?;
    }
    let periods = system.periods(&HalfOrderFrame::from_element_with_loops(
        &sigma,
        FrameTag::Combined,
        &loops,
    )?)?;
    let sq = sigma.sigma().mul(sigma.sigma())?;
    let residue = domain.integrate_dz(&sq)? / Complex::new(0.0, 2.0 * std::f64::consts::PI);
    let diagnostics = DoubleDiagnostics { residue, ..diagnostics };
    let reports = fits.into_iter().map(|f| f.1).collect();
    finish(
        BuildMode::Double,
        sigma,
        a0,
        n,
        Some(cuts),
        periods,
        reports,
        Some(summary(t, &rep)),
        Some(diagnostics),
        opts.period_tolerance,
    )
}

fn double_diagnostics(
    domain: &Domain,
    cuts: &CutSystem,
    g: &[HalfOrderFrame],
    h: &[HalfOrderFrame],
    fits: &[(SpanElement, FitReport)],
) -> Result<DoubleDiagnostics> {
    let np = g.len() - 1;
    let minus_one = Complex::new(-1.0, 0.0);
    let one = Complex::new(1.0, 0.0);
    let diff: Vec<HalfOrderFrame> = h
        .iter()
        .zip(g)
        .map(|(h, g)| h.combine(minus_one, g))
        .collect::<Result<_>>()?;
    let sum: Vec<HalfOrderFrame> = h.iter().zip(g).map(|(h, g)| h.combine(one, g)).collect::<Result<_>>()?;
    let b = |x: &HalfOrderFrame, y: &HalfOrderFrame, k: usize| pairing(domain, Some(cuts), x, y, k);
    let (mut c_max, mut b_max, mut a_max, mut fixed): (Real, Real, Real, Real) = (0.0, 0.0, 0.0, 0.0);
    for k in 1..=np {
        c_max = c_max.max(b(&sum[0], &diff[0], k)?.norm());
        for j in 1..=np {
            let v = (b(&g[j], &diff[0], k)? + b(&h[0], &diff[j], k)?) * 2.0;
            b_max = b_max.max(v.norm());
            for i in 1..=np {
                a_max = a_max.max(b(&sum[i], &diff[j], k)?.norm());
                fixed = fixed.max(b(&g[i], &g[j], k)?.norm());
            }
        }
    }
    Ok(DoubleDiagnostics {
        c_max,
        b_max,
        a_max,
        fixed_quadratic_max: fixed,
        joint_fit_residuals: fits.iter().map(|f| f.1.worst()).collect(),
        residue: Complex::new(0.0, 0.0),
    })
}

/// Dispatch on the build mode.
pub fn build(domain: &Domain, a: Complex, mode: BuildMode, opts: &BuildOptions) -> Result<ConformalMap> {
    match mode {
        BuildMode::SimplyConnected => build_sc(domain, a, opts),
        BuildMode::ArcLength => build_mc_arclength(domain, a, opts),
        BuildMode::Double => build_double(domain, a, opts),
    }
}
