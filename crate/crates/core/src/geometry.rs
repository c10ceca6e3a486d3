//! Invariant manifolds of the interior equilibrium, heteroclinic probes,
//! homoclinic proximity, the eigenvalue condition and return maps.

use alloc::vec::Vec;

use crate::cube::CubeState;
use crate::equilibria::{self, EigenData, EquilibriumName};
use crate::flow::{self, CubeFlow, FlowOptions, Section, Trajectory};
use crate::linalg::{self, Vec3};
use crate::ode::Dopri5;
use crate::{Error, Result};

pub const SEED_RADIUS: f64 = 1e-5;
pub const TOL_HIT: f64 = 1e-3;
/// Distance at which a traced branch counts as having reached an equilibrium.
pub const NEIGHBORHOOD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShilnikovReport {
    pub mu: f64,
    pub lambda_u: f64,
    pub omega: f64,
    pub lambda_s: f64,
    /// λᵤ, ω and λₛ are all positive.
    pub positive: bool,
    /// λᵤ < λₛ.
    pub ordering_ok: bool,
    /// 2λᵤ < λₛ.
    pub ratio_ok: bool,
    /// Central difference of λᵤ/λₛ in μ.
    pub ratio_derivative: f64,
}

/// `(λu, ω, λs)` when O is a saddle-focus with a 2D unstable focus.
fn saddle_focus_rates(mu: f64) -> Result<(f64, f64, f64)> {
    let e = equilibria::eigen_of(EquilibriumName::O, mu)?;
    let [a, _, c] = e.eigenvalues;
    if a.im == 0.0 || !(a.re > 0.0) || c.im != 0.0 || !(c.re < 0.0) {
        return Err(Error::NotSaddleFocus { mu });
    }
    Ok((a.re, a.im.abs(), -c.re))
}

pub fn shilnikov_condition(mu: f64) -> Result<ShilnikovReport> {
    let (lambda_u, omega, lambda_s) = saddle_focus_rates(mu)?;
    let h = 1e-5;
    let ratio = |m: f64| saddle_focus_rates(m).map(|(u, _, s)| u / s);
    let r0 = lambda_u / lambda_s;
    let ratio_derivative = match (ratio(mu - h), ratio(mu + h)) {
        (Ok(a), Ok(b)) => (b - a) / (2.0 * h),
        (Err(_), Ok(b)) => (b - r0) / h,
        (Ok(a), Err(_)) => (r0 - a) / h,
        (Err(e), Err(_)) => return Err(e),
    };
    Ok(ShilnikovReport {
        mu,
        lambda_u,
        omega,
        lambda_s,
        positive: lambda_u > 0.0 && omega > 0.0 && lambda_s > 0.0,
        ordering_ok: lambda_u < lambda_s,
        ratio_ok: 2.0 * lambda_u < lambda_s,
        ratio_derivative,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceVerdict {
    Equilibrium(EquilibriumName),
    Cycle {
        period: f64,
        amplitude: f64,
    },
    /// Not settled within the horizon.
    Wandering,
}

impl TraceVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            TraceVerdict::Equilibrium(_) => "equilibrium",
            TraceVerdict::Cycle { .. } => "cycle",
            TraceVerdict::Wandering => "wandering",
        }
    }

    pub fn equilibrium(&self) -> Option<EquilibriumName> {
        match self {
            TraceVerdict::Equilibrium(n) => Some(*n),
            _ => None,
        }
    }
}

/// One branch of a traced invariant manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldTrace {
    pub branch: usize,
    pub seed_offset: Vec3,
    pub trajectory: Trajectory,
    pub verdict: TraceVerdict,
    /// Crossings of the default section in either direction.
    pub winding: usize,
}

fn real_unit(v: &linalg::CVec3) -> Vec3 {
    let r = [v[0].re, v[1].re, v[2].re];
    linalg::scale(&r, 1.0 / linalg::norm(&r))
}

/// Orthonormal basis of the plane spanned by the real and imaginary parts.
fn plane_basis(v: &linalg::CVec3) -> [Vec3; 2] {
    let mut f = [[v[0].re, v[1].re, v[2].re], [v[0].im, v[1].im, v[2].im], [0.0; 3]];
    linalg::gram_schmidt(&mut f);
    [f[0], f[1]]
}

fn circle(basis: &[Vec3; 2], n: usize, radius: f64) -> Vec<Vec3> {
    (0..n)
        .map(|k| {
            let th = core::f64::consts::TAU * k as f64 / n as f64;
            let d = linalg::add(&linalg::scale(&basis[0], libm::cos(th)), &linalg::scale(&basis[1], libm::sin(th)));
            linalg::scale(&d, radius)
        })
        .collect()
}

/// Offsets into the unstable eigenspace that keep the seed in the cube.
/// A focus plane gets a circle of `n` points; real directions get a
/// lattice of directions covering every sign pattern.
fn unstable_offsets(p: CubeState, e: &EigenData, n: usize, radius: f64) -> Vec<Vec3> {
    let mut basis: Vec<Vec3> = Vec::new();
    let mut focus = false;
    for (l, v) in e.eigenvalues.iter().zip(&e.eigenvectors) {
        if !(l.re > 0.0) || l.im < 0.0 {
            continue;
        }
        if l.im > 0.0 {
            basis.extend(plane_basis(v));
            focus = true;
        } else {
            basis.push(real_unit(v));
        }
    }
    let d = basis.len();
    let mut g = [[0.0; 3]; 3];
    g[..d].copy_from_slice(&basis);
    linalg::gram_schmidt(&mut g);
    let inside = |d: &Vec3| CubeState::from(linalg::add(&p.to_array(), d)).in_cube(0.0);
    let mut out: Vec<Vec3> = match d {
        0 => Vec::new(),
        1 => alloc::vec![linalg::scale(&g[0], radius), linalg::scale(&g[0], -radius)],
        2 if focus => circle(&[g[0], g[1]], n.max(1), radius),
        _ => {
            let k = 2i32;
            let mut dirs: Vec<Vec3> = Vec::new();
            let range = |i: usize| if i < d { -k..=k } else { 0..=0 };
            for a in range(0) {
                for b in range(1) {
                    for c in range(2) {
                        if a == 0 && b == 0 && c == 0 {
                            continue;
                        }
                        let mut v = [0.0; 3];
                        for (coef, base) in [a, b, c].iter().zip(&g) {
                            v = linalg::add(&v, &linalg::scale(base, f64::from(*coef)));
                        }
                        let v = linalg::scale(&v, radius / linalg::norm(&v));
                        if dirs.iter().all(|w| linalg::distance(w, &v) > 1e-9 * radius) {
                            dirs.push(v);
                        }
                    }
                }
            }
            dirs
        }
    };
    out.retain(|d| inside(d));
    out
}

/// Real eigenvector of the most contracting real eigenvalue of O.
fn stable_direction(e: &EigenData) -> Result<Vec3> {
    e.eigenvalues
        .iter()
        .zip(&e.eigenvectors)
        .filter(|(l, _)| l.im == 0.0 && l.re < 0.0)
        .min_by(|a, b| a.0.re.total_cmp(&b.0.re))
        .map(|(_, v)| real_unit(v))
        .ok_or(Error::Undetermined("no real stable direction"))
}

fn winding(mu: f64, tr: &Trajectory) -> Result<usize> {
    let section = Section::default_for(mu)?;
    let s: Vec<bool> = tr.states.iter().map(|p| section.signed_distance(&p.to_array()) >= 0.0).collect();
    Ok(s.windows(2).filter(|w| w[0] != w[1]).count())
}

fn settled(mu: f64, p: CubeState) -> Option<EquilibriumName> {
    flow::nearest_equilibrium(mu, p).filter(|(_, d)| *d < NEIGHBORHOOD).map(|(n, _)| n)
}

fn forward_trace(mu: f64, branch: usize, origin: CubeState, d: Vec3, t_end: f64) -> Result<ManifoldTrace> {
    let p0 = CubeState::from(linalg::add(&origin.to_array(), &d));
    let opts = FlowOptions::default();
    let trajectory = flow::integrate(mu, p0, t_end, &opts)?;
    let report = flow::classify_omega_limit_with(mu, p0, t_end, &opts)?;
    let verdict = match report.verdict {
        flow::OmegaVerdict::Equilibrium(n) => TraceVerdict::Equilibrium(n),
        flow::OmegaVerdict::Periodic { period, amplitude } => TraceVerdict::Cycle { period, amplitude },
        flow::OmegaVerdict::Undetermined => {
            settled(mu, trajectory.last()).map_or(TraceVerdict::Wandering, TraceVerdict::Equilibrium)
        }
    };
    let winding = winding(mu, &trajectory)?;
    Ok(ManifoldTrace { branch, seed_offset: d, trajectory, verdict, winding })
}

/// Forward traces of the unstable manifold of O. Empty when O is attracting.
pub fn trace_unstable(mu: f64, n_seeds: usize, t_end: f64) -> Result<Vec<ManifoldTrace>> {
    trace_unstable_with(mu, n_seeds, t_end, SEED_RADIUS)
}

pub fn trace_unstable_with(mu: f64, n_seeds: usize, t_end: f64, radius: f64) -> Result<Vec<ManifoldTrace>> {
    unstable_seed_offsets(mu, n_seeds, radius)?
        .into_iter()
        .enumerate()
        .map(|(k, d)| trace_unstable_branch(mu, k, d, t_end))
        .collect()
}

/// Seed offsets from O used by [`trace_unstable`].
pub fn unstable_seed_offsets(mu: f64, n_seeds: usize, radius: f64) -> Result<Vec<Vec3>> {
    let o = equilibria::location(EquilibriumName::O, mu)?;
    let e = equilibria::eigen_analysis(mu, o)?;
    Ok(unstable_offsets(o, &e, n_seeds, radius))
}

/// Forward trace from `O + offset`.
pub fn trace_unstable_branch(mu: f64, branch: usize, offset: Vec3, t_end: f64) -> Result<ManifoldTrace> {
    let o = equilibria::location(EquilibriumName::O, mu)?;
    forward_trace(mu, branch, o, offset, t_end)
}

/// Backward traces of the two branches of the stable manifold of O along its
/// real stable eigenvector.
pub fn trace_stable(mu: f64, t_end: f64) -> Result<[ManifoldTrace; 2]> {
    trace_stable_with(mu, t_end, SEED_RADIUS)
}

pub fn trace_stable_with(mu: f64, t_end: f64, radius: f64) -> Result<[ManifoldTrace; 2]> {
    let o = equilibria::location(EquilibriumName::O, mu)?;
    let e = equilibria::eigen_analysis(mu, o)?;
    let v = stable_direction(&e)?;
    let branch = |k: usize, s: f64| -> Result<ManifoldTrace> {
        let d = linalg::scale(&v, s * radius);
        let p0 = CubeState::from(linalg::add(&o.to_array(), &d));
        let trajectory = flow::integrate(mu, p0, -t_end.abs(), &FlowOptions::default())?;
        let verdict = settled(mu, trajectory.last()).map_or(TraceVerdict::Wandering, TraceVerdict::Equilibrium);
        let winding = winding(mu, &trajectory)?;
        Ok(ManifoldTrace { branch: k, seed_offset: d, trajectory, verdict, winding })
    };
    Ok([branch(0, 1.0)?, branch(1, -1.0)?])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeteroclinicProbe {
    pub source: EquilibriumName,
    pub target: EquilibriumName,
    pub min_distance: f64,
    /// Time of closest approach along the best seed.
    pub t_min: f64,
    pub seeds: usize,
    pub hit: bool,
}

/// Integrates forward from seeds on the unstable directions of `source` and
/// records the closest approach to `target`.
pub fn heteroclinic_probe(mu: f64, source: &str, target: &str, tol_hit: f64, t_end: f64) -> Result<HeteroclinicProbe> {
    heteroclinic_probe_with(mu, source.parse()?, target.parse()?, tol_hit, t_end, 16, SEED_RADIUS)
}

pub fn heteroclinic_probe_with(
    mu: f64,
    source: EquilibriumName,
    target: EquilibriumName,
    tol_hit: f64,
    t_end: f64,
    n_seeds: usize,
    radius: f64,
) -> Result<HeteroclinicProbe> {
    let src = equilibria::location(source, mu)?;
    let tgt = equilibria::location(target, mu)?.to_array();
    let e = equilibria::eigen_analysis(mu, src)?;
    let offsets = unstable_offsets(src, &e, n_seeds, radius);
    if offsets.is_empty() {
        return Err(Error::InvalidArgument("source has no unstable direction into the cube"));
    }
    let opts = FlowOptions::default();
    let (mut best, mut t_min) = (f64::INFINITY, 0.0);
    for d in &offsets {
        let p0 = linalg::add(&src.to_array(), d);
        let mut s = Dopri5::new(CubeFlow { mu }, 0.0, p0, opts.ode_options())?;
        s.advance_to(t_end, |s| {
            let r = linalg::distance(s.y(), &tgt);
            if r < best {
                best = r;
                t_min = s.t();
            }
            true
        })?;
    }
    Ok(HeteroclinicProbe { source, target, min_distance: best, t_min, seeds: offsets.len(), hit: best < tol_hit })
}

/// Basin boundary found next to an edge of the cube and how close its orbit
/// comes to a target equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeProbe {
    pub edge: (EquilibriumName, EquilibriumName),
    pub target: EquilibriumName,
    /// Start point on the boundary, at `radius` from the edge midpoint.
    pub point: CubeState,
    /// Angle of the boundary measured from the first adjacent face.
    pub theta: f64,
    /// Fates on either side of the boundary; `None` for a non-equilibrium limit.
    pub fates: (Option<EquilibriumName>, Option<EquilibriumName>),
    pub min_distance: f64,
    pub hit: bool,
}

fn fate_and_approach(mu: f64, p0: CubeState, target: &CubeState, t_end: f64) -> Result<(Option<EquilibriumName>, f64)> {
    let mut s = Dopri5::new(CubeFlow { mu }, 0.0, p0.to_array(), FlowOptions::default().ode_options())?;
    let mut best = f64::INFINITY;
    s.advance_to(t_end, |s| {
        best = best.min(CubeState::from(*s.y()).distance(target));
        true
    })?;
    Ok((settled(mu, CubeState::from(*s.y())), best))
}

/// Sweeps the open quarter circle of radius `radius` around the midpoint of the
/// edge `[a, b]`, locates the first change of fate and bisects it. An orbit
/// on the boundary that passes within `tol_hit` of `target` is evidence that
/// the edge lies in the closure of the target's stable set.
pub fn edge_closure_probe(
    mu: f64,
    a: &str,
    b: &str,
    target: &str,
    radius: f64,
    tol_hit: f64,
    t_end: f64,
) -> Result<EdgeProbe> {
    let (a, b, target): (EquilibriumName, EquilibriumName, EquilibriumName) = (a.parse()?, b.parse()?, target.parse()?);
    let (Some(pa), Some(pb)) = (a.vertex(), b.vertex()) else {
        return Err(Error::InvalidArgument("edge endpoints must be vertices"));
    };
    let (pa, pb) = (pa.to_array(), pb.to_array());
    let along: Vec<usize> = (0..3).filter(|&i| pa[i] != pb[i]).collect();
    if along.len() != 1 || !(radius > 0.0 && radius < 0.5) {
        return Err(Error::InvalidArgument("need adjacent vertices and 0 < radius < 0.5"));
    }
    let fixed: Vec<usize> = (0..3).filter(|&i| i != along[0]).collect();
    let mid = linalg::scale(&linalg::add(&pa, &pb), 0.5);
    let inward = |i: usize| if mid[i] == 0.0 { 1.0 } else { -1.0 };
    let point = |th: f64| {
        let mut p = mid;
        p[fixed[0]] += inward(fixed[0]) * radius * libm::cos(th);
        p[fixed[1]] += inward(fixed[1]) * radius * libm::sin(th);
        CubeState::from(p)
    };
    let tgt = equilibria::location(target, mu)?;

    // open quarter circle, refined geometrically towards both faces
    let mut fr: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
    for e in 2..=8 {
        let t = libm::pow(10.0, -f64::from(e));
        fr.push(t);
        fr.push(1.0 - t);
    }
    fr.sort_by(f64::total_cmp);
    let thetas: Vec<f64> = fr.iter().map(|f| core::f64::consts::FRAC_PI_2 * f).collect();
    let mut best = f64::INFINITY;
    let mut prev = fate_and_approach(mu, point(thetas[0]), &tgt, t_end)?;
    best = best.min(prev.1);
    let mut bracket = None;
    for w in thetas.windows(2) {
        let cur = fate_and_approach(mu, point(w[1]), &tgt, t_end)?;
        best = best.min(cur.1);
        if cur.0 != prev.0 {
            bracket = Some((w[0], w[1], prev.0, cur.0));
            break;
        }
        prev = cur;
    }
    let Some((mut lo, mut hi, f_lo, f_hi)) = bracket else {
        return Err(Error::Undetermined("no change of fate around the edge"));
    };
    for _ in 0..80 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        let (f, d) = fate_and_approach(mu, point(m), &tgt, t_end)?;
        best = best.min(d);
        if f == f_lo {
            lo = m;
        } else {
            hi = m;
        }
    }
    let theta = 0.5 * (lo + hi);
    Ok(EdgeProbe {
        edge: (a, b),
        target,
        point: point(theta),
        theta,
        fates: (f_lo, f_hi),
        min_distance: best,
        hit: best < tol_hit,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomoclinicOptions {
    pub n_seeds: usize,
    pub seed_radius: f64,
    pub unstable_horizon: f64,
    pub stable_horizon: f64,
}

impl Default for HomoclinicOptions {
    fn default() -> Self {
        Self { n_seeds: 64, seed_radius: SEED_RADIUS, unstable_horizon: 200.0, stable_horizon: 300.0 }
    }
}

/// A section crossing with its forward-time direction (+1 or -1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectedCrossing {
    pub t: f64,
    pub point: CubeState,
    pub direction: i8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomoclinicReport {
    pub mu: f64,
    /// Infinite when neither stable branch meets the section away from O.
    pub distance: f64,
    pub stable_crossings: Vec<DirectedCrossing>,
    pub unstable_crossings: usize,
    /// Closest pair as (unstable point, stable point).
    pub closest: Option<(CubeState, CubeState)>,
}

/// Crossings of `section` in both directions, stopping early once the
/// orbit sits on an equilibrium. Returns whether it did.
fn directed_crossings(mu: f64, p0: Vec3, t_end: f64, section: &Section) -> Result<(Vec<DirectedCrossing>, bool)> {
    let mut s = Dopri5::new(CubeFlow { mu }, 0.0, p0, FlowOptions::default().ode_options())?;
    let backward = t_end < 0.0;
    let mut out = Vec::new();
    let mut prev = section.signed_distance(&p0);
    let mut settled_at = false;
    let mut steps = 0usize;
    s.advance_to(t_end, |s| {
        let cur = section.signed_distance(s.y());
        if (prev < 0.0) != (cur < 0.0) {
            let c = flow::refine_crossing(s, section);
            let up = cur >= 0.0;
            out.push(DirectedCrossing { t: c.t, point: c.point, direction: if up != backward { 1 } else { -1 } });
        }
        prev = cur;
        steps += 1;
        if steps % 32 == 0 {
            let p = CubeState::from(*s.y());
            settled_at = flow::nearest_equilibrium(mu, p).is_some_and(|(_, d)| d < flow::EQUILIBRIUM_HIT);
        }
        !settled_at
    })?;
    Ok((out, settled_at))
}

/// Distance on `section` between the crossings of W^u(O) and those of the
/// two backward W^s(O) branches, O itself excluded.
pub fn homoclinic_proximity(mu: f64, section: &Section) -> Result<HomoclinicReport> {
    homoclinic_proximity_with(mu, section, &HomoclinicOptions::default())
}

pub fn homoclinic_proximity_with(mu: f64, section: &Section, opts: &HomoclinicOptions) -> Result<HomoclinicReport> {
    saddle_focus_rates(mu)?;
    let o = equilibria::location(EquilibriumName::O, mu)?;
    let e = equilibria::eigen_analysis(mu, o)?;
    let vs = stable_direction(&e)?;

    let mut stable = Vec::new();
    for s in [1.0, -1.0] {
        let p0 = linalg::add(&o.to_array(), &linalg::scale(&vs, s * opts.seed_radius));
        let (c, done) = directed_crossings(mu, p0, -opts.stable_horizon.abs(), section)?;
        if c.is_empty() && !done {
            return Err(Error::Undetermined("stable branch neither crossed the section nor settled"));
        }
        stable.extend(c);
    }

    let mut unstable_crossings = 0;
    let mut best = f64::INFINITY;
    let mut closest = None;
    for d in unstable_offsets(o, &e, opts.n_seeds, opts.seed_radius) {
        let p0 = linalg::add(&o.to_array(), &d);
        let (c, _) = directed_crossings(mu, p0, opts.unstable_horizon, section)?;
        unstable_crossings += c.len();
        for u in &c {
            for q in stable.iter().filter(|q| q.direction == u.direction) {
                let r = u.point.distance(&q.point);
                if r < best {
                    best = r;
                    closest = Some((u.point, q.point));
                }
            }
        }
    }
    if unstable_crossings == 0 {
        return Err(Error::Undetermined("unstable manifold did not reach the section"));
    }
    Ok(HomoclinicReport { mu, distance: best, stable_crossings: stable, unstable_crossings, closest })
}

/// Ordered corners of the section plane clipped to the cube.
pub fn section_polygon(section: &Section) -> Vec<Vec3> {
    let mut pts: Vec<Vec3> = Vec::new();
    for a in 0..8u8 {
        for bit in [1u8, 2, 4] {
            if a & bit != 0 {
                continue;
            }
            let corner = |k: u8| [f64::from(k >> 2 & 1), f64::from(k >> 1 & 1), f64::from(k & 1)];
            let (pa, pb) = (corner(a), corner(a | bit));
            let (da, db) = (section.signed_distance(&pa), section.signed_distance(&pb));
            if da == db || da * db > 0.0 {
                continue;
            }
            let s = da / (da - db);
            let p = linalg::add(&pa, &linalg::scale(&linalg::sub(&pb, &pa), s));
            if pts.iter().all(|q| linalg::distance(q, &p) > 1e-12) {
                pts.push(p);
            }
        }
    }
    if pts.len() < 3 {
        return pts;
    }
    let c = linalg::scale(&pts.iter().fold([0.0; 3], |acc, p| linalg::add(&acc, p)), 1.0 / pts.len() as f64);
    let mut f = [section.normal, linalg::sub(&pts[0], &c), [0.0; 3]];
    linalg::gram_schmidt(&mut f);
    let e2 = linalg::cross(&f[0], &f[1]);
    let angle = |p: &Vec3| {
        let d = linalg::sub(p, &c);
        libm::atan2(linalg::dot(&d, &e2), linalg::dot(&d, &f[1]))
    };
    pts.sort_by(|a, b| angle(a).total_cmp(&angle(b)));
    pts
}

/// Successive positive crossings of a section.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionMap {
    pub section: Section,
    pub polygon: Vec<Vec3>,
    pub points: Vec<CubeState>,
    pub times: Vec<f64>,
}

impl SectionMap {
    pub fn return_times(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Largest distance of a return point to the plane.
    pub fn max_plane_residual(&self) -> f64 {
        self.points.iter().map(|p| self.section.signed_distance(&p.to_array()).abs()).fold(0.0, f64::max)
    }
}

/// First `n_returns` positive crossings of `section` after `transient`,
/// searched up to `t_max`.
pub fn poincare_map(
    mu: f64,
    section: &Section,
    p0: CubeState,
    n_returns: usize,
    transient: f64,
    t_max: f64,
) -> Result<SectionMap> {
    let (c, _) = flow::section_crossings(mu, p0, section, t_max, transient, n_returns, &FlowOptions::default())?;
    if c.len() < n_returns {
        return Err(Error::InsufficientReturns { found: c.len(), wanted: n_returns });
    }
    Ok(SectionMap {
        section: *section,
        polygon: section_polygon(section),
        points: c.iter().map(|c| c.point).collect(),
        times: c.iter().map(|c| c.t).collect(),
    })
}

/// Number of groups of points linked by chains of steps shorter than `tol`.
pub fn count_clusters(points: &[CubeState], tol: f64) -> usize {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if points[i].distance(&points[j]) < tol {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    (0..n).filter(|&i| root(&mut parent, i) == i).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shilnikov_at_zero_and_error_when_stable() {
        let r = shilnikov_condition(0.0).unwrap();
        assert!(r.positive && r.ratio_ok && r.ordering_ok);
        assert!(r.ratio_derivative != 0.0);
        assert!(matches!(shilnikov_condition(-25.0), Err(Error::NotSaddleFocus { .. })));
    }

    #[test]
    fn no_unstable_traces_when_o_attracts() {
        assert!(trace_unstable(-20.0, 8, 10.0).unwrap().is_empty());
    }

    #[test]
    fn stable_branches_at_minus_twenty() {
        let [a, b] = trace_stable(-20.0, 200.0).unwrap();
        let mut got = [a.verdict.equilibrium(), b.verdict.equilibrium()];
        got.sort();
        assert_eq!(got, [Some(EquilibriumName::V3), Some(EquilibriumName::V6)]);
        assert!(a.seed_offset.iter().map(|c| c * c).sum::<f64>().sqrt() <= SEED_RADIUS * (1.0 + 1e-12));
    }

    #[test]
    fn polygon_lies_on_plane_and_cube() {
        let s = Section::default_for(3.6).unwrap();
        let poly = section_polygon(&s);
        assert!(poly.len() >= 3);
        for p in &poly {
            assert!(s.signed_distance(p).abs() < 1e-12);
            assert!(CubeState::from(*p).in_cube(1e-12));
        }
    }

    #[test]
    fn clusters() {
        let pts = [CubeState::new(0.1, 0.1, 0.1), CubeState::new(0.1, 0.1, 0.1 + 1e-6), CubeState::new(0.5, 0.5, 0.5)];
        assert_eq!(count_clusters(&pts, 1e-4), 2);
        assert_eq!(count_clusters(&[], 1e-4), 0);
    }
}
