//! Integration of the cube flow, its variational equation, section crossings
//! and a coarse classification of ω-limit sets.

use alloc::vec::Vec;

use crate::cube::{self, CubeState};
use crate::equilibria::{self, EquilibriumName};
use crate::linalg::{self, Vec3};
use crate::ode::{Dopri5, OdeSystem, Options, Stats};
use crate::{Error, Result};

/// Slack allowed around the cube for stored states.
pub const TOL_BOX: f64 = 1e-9;

/// Default relative and absolute tolerances.
pub const DEFAULT_RTOL: f64 = 1e-9;
pub const DEFAULT_ATOL: f64 = 1e-12;

fn cube_overshoot(p: &[f64]) -> f64 {
    p[..3].iter().map(|c| (-c).max(c - 1.0).max(0.0)).fold(0.0, f64::max)
}

/// Magnitudes below this are flushed to zero, keeping arithmetic out of the
/// subnormal range when an orbit sinks into a face.
pub const FLUSH_TO_ZERO: f64 = 1e-250;

fn cube_clamp(p: &mut [f64], n: usize) -> bool {
    let mut changed = false;
    for (i, c) in p[..n].iter_mut().enumerate() {
        let mut v = if i < 3 { c.clamp(0.0, 1.0) } else { *c };
        if v != 0.0 && v.abs() < FLUSH_TO_ZERO {
            v = 0.0;
        }
        if v != *c {
            *c = v;
            changed = true;
        }
    }
    changed
}

/// The reduced field as an [`OdeSystem`].
#[derive(Debug, Clone, Copy)]
pub struct CubeFlow {
    pub mu: f64,
}

impl OdeSystem<3> for CubeFlow {
    fn rhs(&self, _t: f64, y: &[f64; 3], dy: &mut [f64; 3]) {
        *dy = cube::field(self.mu, *y);
    }

    fn overshoot(&self, y: &[f64; 3]) -> f64 {
        cube_overshoot(y)
    }

    fn project(&self, y: &mut [f64; 3]) -> bool {
        cube_clamp(y, 3)
    }
}

/// Base flow, three tangent vectors and the integral of the divergence.
/// Layout: `[x, y, z, v1, v2, v3, ∫div]`.
#[derive(Debug, Clone, Copy)]
pub struct TangentFlow {
    pub mu: f64,
}

impl OdeSystem<13> for TangentFlow {
    fn rhs(&self, _t: f64, y: &[f64; 13], dy: &mut [f64; 13]) {
        let p = [y[0], y[1], y[2]];
        let f = cube::field(self.mu, p);
        let j = cube::jacobian_at(self.mu, p);
        dy[..3].copy_from_slice(&f);
        for k in 0..3 {
            let v = [y[3 + 3 * k], y[4 + 3 * k], y[5 + 3 * k]];
            let jv = linalg::mat_vec(&j, &v);
            dy[3 + 3 * k..6 + 3 * k].copy_from_slice(&jv);
        }
        dy[12] = j[0][0] + j[1][1] + j[2][2];
    }

    fn overshoot(&self, y: &[f64; 13]) -> f64 {
        cube_overshoot(y)
    }

    fn project(&self, y: &mut [f64; 13]) -> bool {
        cube_clamp(y, 12)
    }
}

/// Integrator tolerances for the cube flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { rtol: DEFAULT_RTOL, atol: DEFAULT_ATOL, max_steps: 50_000_000 }
    }
}

impl FlowOptions {
    pub fn ode_options(&self) -> Options {
        Options {
            rtol: self.rtol,
            atol: self.atol,
            max_steps: self.max_steps,
            overshoot_tol: TOL_BOX,
            ..Options::default()
        }
    }
}

/// A computed orbit. Times run forward for `t_end > 0` and backward otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub mu: f64,
    pub times: Vec<f64>,
    pub states: Vec<CubeState>,
    pub stats: Stats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> CubeState {
        *self.states.last().expect("trajectory holds at least the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds at least the initial state")
    }

    /// Largest distance by which a stored state leaves the cube.
    pub fn max_overshoot(&self) -> f64 {
        self.states.iter().map(CubeState::overshoot).fold(0.0, f64::max)
    }

    /// Keeps every `stride`-th sample plus the final one.
    pub fn downsample(&self, stride: usize) -> Trajectory {
        let stride = stride.max(1);
        let n = self.len();
        let keep = |i: usize| i % stride == 0 || i + 1 == n;
        Trajectory {
            mu: self.mu,
            times: (0..n).filter(|&i| keep(i)).map(|i| self.times[i]).collect(),
            states: (0..n).filter(|&i| keep(i)).map(|i| self.states[i]).collect(),
            stats: self.stats,
        }
    }
}

fn check_start(p0: CubeState) -> Result<()> {
    if !p0.in_cube(TOL_BOX) || !p0.to_array().iter().all(|c| c.is_finite()) {
        return Err(Error::OutsideCube);
    }
    Ok(())
}

/// Integrates from `p0` over `[0, t_end]` storing every accepted step.
pub fn integrate(mu: f64, p0: CubeState, t_end: f64, opts: &FlowOptions) -> Result<Trajectory> {
    check_start(p0)?;
    let mut solver = Dopri5::new(CubeFlow { mu }, 0.0, p0.to_array(), opts.ode_options())?;
    let mut times = alloc::vec![0.0];
    let mut states = alloc::vec![p0];
    solver.advance_to(t_end, |s| {
        times.push(s.t());
        states.push(CubeState::from(*s.y()));
        true
    })?;
    Ok(Trajectory { mu, times, states, stats: solver.stats() })
}

/// Integrates from `p0` and samples the dense output every `dt`.
pub fn integrate_sampled(mu: f64, p0: CubeState, t_end: f64, dt: f64, opts: &FlowOptions) -> Result<Trajectory> {
    check_start(p0)?;
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument("sample interval must be positive"));
    }
    let dir = if t_end >= 0.0 { 1.0 } else { -1.0 };
    let mut solver = Dopri5::new(CubeFlow { mu }, 0.0, p0.to_array(), opts.ode_options())?;
    let mut times = alloc::vec![0.0];
    let mut states = alloc::vec![p0];
    let mut k = 1usize;
    solver.advance_to(t_end, |s| {
        loop {
            let tk = dir * k as f64 * dt;
            if dir * (tk - s.t()) > 0.0 {
                break;
            }
            times.push(tk);
            states.push(CubeState::from(s.dense(tk)));
            k += 1;
        }
        true
    })?;
    if *times.last().unwrap_or(&0.0) != t_end {
        times.push(t_end);
        states.push(CubeState::from(*solver.y()));
    }
    Ok(Trajectory { mu, times, states, stats: solver.stats() })
}

/// Result of [`integrate_with_tangents`].
#[derive(Debug, Clone, PartialEq)]
pub struct TangentRun {
    pub trajectory: Trajectory,
    /// Times at which the frame was re-orthonormalised.
    pub renorm_times: Vec<f64>,
    /// Gram–Schmidt norms of the three tangent vectors before each renormalisation.
    pub growth: Vec<[f64; 3]>,
    /// Orthonormal frame after the last renormalisation.
    pub frame: [Vec3; 3],
    /// Integral of the divergence along the orbit.
    pub divergence_integral: f64,
}

impl TangentRun {
    /// `ln` of the growth factors.
    pub fn log_growth(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        self.growth.iter().map(|g| g.map(libm::log))
    }
}

fn check_frame(frame: &[Vec3; 3]) -> Result<()> {
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 1.0 } else { 0.0 };
            if (linalg::dot(&frame[i], &frame[j]) - want).abs() > 1e-10 {
                return Err(Error::InvalidArgument("tangent frame must be orthonormal"));
            }
        }
    }
    Ok(())
}

pub(crate) fn pack(p: Vec3, frame: &[Vec3; 3], div: f64) -> [f64; 13] {
    let mut y = [0.0; 13];
    y[..3].copy_from_slice(&p);
    for k in 0..3 {
        y[3 + 3 * k..6 + 3 * k].copy_from_slice(&frame[k]);
    }
    y[12] = div;
    y
}

pub(crate) fn unpack_frame(y: &[f64; 13]) -> [Vec3; 3] {
    core::array::from_fn(|k| [y[3 + 3 * k], y[4 + 3 * k], y[5 + 3 * k]])
}

/// Drives the tangent flow to `t_end`, re-orthonormalising every `renorm_dt`.
/// `on_renorm(t, growth, state, ∫div)` sees each renormalisation; `on_step` each accepted step.
pub(crate) fn run_tangents<R, P>(
    mu: f64,
    p0: CubeState,
    frame0: [Vec3; 3],
    t_end: f64,
    renorm_dt: f64,
    opts: &FlowOptions,
    mut on_renorm: R,
    mut on_step: P,
) -> Result<([f64; 13], [Vec3; 3], Stats)>
where
    R: FnMut(f64, [f64; 3], Vec3, f64),
    P: FnMut(f64, Vec3),
{
    check_start(p0)?;
    check_frame(&frame0)?;
    if !(renorm_dt > 0.0) || !(t_end > 0.0) {
        return Err(Error::InvalidArgument("t_end and renorm_dt must be positive"));
    }
    let mut solver = Dopri5::new(TangentFlow { mu }, 0.0, pack(p0.to_array(), &frame0, 0.0), opts.ode_options())?;
    let mut frame;
    let mut k = 1usize;
    loop {
        let target = (k as f64 * renorm_dt).min(t_end);
        solver.advance_to(target, |s| {
            let y = s.y();
            on_step(s.t(), [y[0], y[1], y[2]]);
            true
        })?;
        let y = *solver.y();
        frame = unpack_frame(&y);
        let r = linalg::gram_schmidt(&mut frame);
        let p = [y[0], y[1], y[2]];
        on_renorm(target, r, p, y[12]);
        solver.set_state(target, pack(p, &frame, y[12]));
        if target >= t_end {
            break;
        }
        k += 1;
    }
    Ok((*solver.y(), frame, solver.stats()))
}

/// Integrates the variational equation alongside the flow.
pub fn integrate_with_tangents(
    mu: f64,
    p0: CubeState,
    frame0: [Vec3; 3],
    t_end: f64,
    renorm_dt: f64,
    opts: &FlowOptions,
) -> Result<TangentRun> {
    let mut times = alloc::vec![0.0];
    let mut states = alloc::vec![p0];
    let mut renorm_times = Vec::new();
    let mut growth = Vec::new();
    let (y, frame, stats) = run_tangents(
        mu,
        p0,
        frame0,
        t_end,
        renorm_dt,
        opts,
        |t, r, _, _| {
            renorm_times.push(t);
            growth.push(r);
        },
        |t, p| {
            if t > *times.last().unwrap_or(&0.0) {
                times.push(t);
                states.push(CubeState::from(p));
            }
        },
    )?;
    Ok(TangentRun {
        trajectory: Trajectory { mu, times, states, stats },
        renorm_times,
        growth,
        frame,
        divergence_integral: y[12],
    })
}

/// An oriented plane `n · (p - point) = 0` with unit normal `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section {
    pub point: Vec3,
    pub normal: Vec3,
}

impl Section {
    pub fn new(point: Vec3, normal: Vec3) -> Result<Self> {
        let n = linalg::norm(&normal);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidArgument("section normal must be non-zero"));
        }
        Ok(Self { point, normal: linalg::scale(&normal, 1.0 / n) })
    }

    /// The plane through the edge, face and interior equilibria, oriented by
    /// increasing `(14-μ)x + 20y + 4z`.
    pub fn default_for(mu: f64) -> Result<Self> {
        let o = equilibria::location(EquilibriumName::O, mu)?;
        Self::new(o.to_array(), cube::plane_normal(mu))
    }

    /// Signed distance to the plane.
    pub fn signed_distance(&self, p: &Vec3) -> f64 {
        linalg::dot(&self.normal, &linalg::sub(p, &self.point))
    }
}

/// A refined crossing of a section in the positive direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub t: f64,
    pub point: CubeState,
}

/// Locates a sign change of the signed distance inside the last step by bisection.
pub(crate) fn refine_crossing<S: OdeSystem<N>, const N: usize>(solver: &Dopri5<S, N>, section: &Section) -> Crossing {
    let (mut a, mut b) = solver.last_step();
    let eval = |t: f64| {
        let y = solver.dense(t);
        section.signed_distance(&[y[0], y[1], y[2]])
    };
    let mut fa = eval(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = eval(m);
        if (fm >= 0.0) == (fa >= 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let y = solver.dense(b);
    Crossing { t: b, point: CubeState::new(y[0], y[1], y[2]) }
}

/// Integrates up to `t_end` and collects positive crossings of `section`
/// after time `skip`, stopping once `max_crossings` have been found.
pub fn section_crossings(
    mu: f64,
    p0: CubeState,
    section: &Section,
    t_end: f64,
    skip: f64,
    max_crossings: usize,
    opts: &FlowOptions,
) -> Result<(Vec<Crossing>, CubeState)> {
    check_start(p0)?;
    let mut solver = Dopri5::new(CubeFlow { mu }, 0.0, p0.to_array(), opts.ode_options())?;
    let mut out = Vec::new();
    let mut prev = section.signed_distance(&p0.to_array());
    solver.advance_to(t_end, |s| {
        let cur = section.signed_distance(s.y());
        if prev < 0.0 && cur >= 0.0 && s.t() > skip {
            out.push(refine_crossing(s, section));
        }
        prev = cur;
        out.len() < max_crossings
    })?;
    Ok((out, CubeState::from(*solver.y())))
}

/// What a forward orbit appears to settle on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaVerdict {
    Equilibrium(EquilibriumName),
    Periodic { period: f64, amplitude: f64 },
    Undetermined,
}

impl OmegaVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            OmegaVerdict::Equilibrium(_) => "equilibrium",
            OmegaVerdict::Periodic { .. } => "periodic",
            OmegaVerdict::Undetermined => "undetermined",
        }
    }
}

/// Verdict plus the final-window evidence it rests on.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaLimitReport {
    pub verdict: OmegaVerdict,
    pub final_state: CubeState,
    /// Closest in-cube named equilibrium at the end and its distance.
    pub nearest: Option<(EquilibriumName, f64)>,
    /// Last return times to the default section.
    pub return_times: Vec<f64>,
    /// Last return points to the default section.
    pub return_points: Vec<CubeState>,
}

/// Distance below which the final state counts as converged to an equilibrium.
pub const EQUILIBRIUM_HIT: f64 = 1e-6;
/// Number of return times inspected for periodicity.
pub const PERIODIC_WINDOW: usize = 5;

/// Nearest in-cube named equilibrium to `p`.
pub fn nearest_equilibrium(mu: f64, p: CubeState) -> Option<(EquilibriumName, f64)> {
    equilibria::closed_form_equilibria(mu)
        .into_iter()
        .filter(|e| e.in_cube)
        .map(|e| (e.name, e.location.distance(&p)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// Classifies the ω-limit of `p0` from an orbit of length `horizon`.
pub fn classify_omega_limit(mu: f64, p0: CubeState, horizon: f64) -> Result<OmegaLimitReport> {
    classify_omega_limit_with(mu, p0, horizon, &FlowOptions::default())
}

pub fn classify_omega_limit_with(mu: f64, p0: CubeState, horizon: f64, opts: &FlowOptions) -> Result<OmegaLimitReport> {
    if !(horizon > 0.0) {
        return Err(Error::InvalidArgument("horizon must be positive"));
    }
    check_start(p0)?;
    let section = Section::default_for(mu)?;
    let o = equilibria::location(EquilibriumName::O, mu)?;
    let keep = 4 * PERIODIC_WINDOW;
    let mut crossings: Vec<Crossing> = Vec::new();
    // distance to O over the orbit since the second-to-last crossing
    let mut amp_since = [0.0f64; 2];

    let mut solver = Dopri5::new(CubeFlow { mu }, 0.0, p0.to_array(), opts.ode_options())?;
    let mut prev = section.signed_distance(&p0.to_array());
    solver.advance_to(horizon, |s| {
        let y = *s.y();
        let cur = section.signed_distance(&y);
        let r = linalg::distance(&y, &o.to_array());
        amp_since[0] = amp_since[0].max(r);
        amp_since[1] = amp_since[1].max(r);
        if prev < 0.0 && cur >= 0.0 {
            crossings.push(refine_crossing(s, &section));
            if crossings.len() > keep {
                crossings.remove(0);
            }
            amp_since = [amp_since[1], r];
        }
        prev = cur;
        true
    })?;
    let final_state = CubeState::from(*solver.y());
    let nearest = nearest_equilibrium(mu, final_state);

    let return_points: Vec<CubeState> = crossings.iter().map(|c| c.point).collect();
    let return_times: Vec<f64> = crossings.windows(2).map(|w| w[1].t - w[0].t).collect();

    let verdict = match nearest {
        Some((name, d)) if d < EQUILIBRIUM_HIT => OmegaVerdict::Equilibrium(name),
        _ => periodic_verdict(&return_times, &return_points, amp_since[0]),
    };
    Ok(OmegaLimitReport { verdict, final_state, nearest, return_times, return_points })
}

/// Periodic when the last return times have small variance and the last
/// return points coincide.
pub fn periodic_verdict(return_times: &[f64], points: &[CubeState], amplitude: f64) -> OmegaVerdict {
    if return_times.len() < PERIODIC_WINDOW || points.len() < PERIODIC_WINDOW {
        return OmegaVerdict::Undetermined;
    }
    let last = &return_times[return_times.len() - PERIODIC_WINDOW..];
    let mean = last.iter().sum::<f64>() / last.len() as f64;
    let var = last.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / last.len() as f64;
    let pts = &points[points.len() - PERIODIC_WINDOW..];
    let spread = pts.iter().flat_map(|a| pts.iter().map(move |b| a.distance(b))).fold(0.0, f64::max);
    if var < 1e-4 * mean && spread < 1e-3 {
        OmegaVerdict::Periodic { period: mean, amplitude }
    } else {
        OmegaVerdict::Undetermined
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converges_to_interior_point_at_minus_twenty() {
        let o = equilibria::location(EquilibriumName::O, -20.0).unwrap();
        let tr = integrate(-20.0, CubeState::new(0.05, 0.05, 0.05), 200.0, &FlowOptions::default()).unwrap();
        assert!(tr.last().distance(&o) < 1e-4);
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
        assert!(tr.max_overshoot() <= TOL_BOX);
    }

    #[test]
    fn face_coordinate_is_pinned() {
        let tr = integrate(-3.0, CubeState::new(0.0, 0.4, 0.6), 50.0, &FlowOptions::default()).unwrap();
        assert!(tr.states.iter().all(|p| p.x == 0.0));
        let tr = integrate(2.0, CubeState::new(0.3, 1.0, 0.2), 50.0, &FlowOptions::default()).unwrap();
        assert!(tr.states.iter().all(|p| p.y == 1.0));
    }

    #[test]
    fn forward_then_backward_returns() {
        let mu = -20.0;
        let o = equilibria::location(EquilibriumName::O, mu).unwrap();
        let p0 = CubeState::new(o.x + 0.01, o.y, o.z - 0.01);
        let opts = FlowOptions::default();
        // backward time expands the strongly stable direction at this rate
        let contraction = -equilibria::eigen_of(EquilibriumName::O, mu).unwrap().eigenvalues[2].re;
        for t in [0.25, 0.5, 1.0] {
            let fw = integrate(mu, p0, t, &opts).unwrap();
            let bw = integrate(mu, fw.last(), -t, &opts).unwrap();
            let bound = 10.0 * opts.rtol * linalg::norm(&p0.to_array()) * libm::exp(contraction * t);
            assert!(bw.last().distance(&p0) < bound, "t = {t}");
            assert!(bw.times.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn equilibria_stay_fixed() {
        for mu in [-20.0, 3.6] {
            for e in equilibria::closed_form_equilibria(mu).into_iter().filter(|e| e.in_cube) {
                // round-off in an unstable location grows like exp(λu t)
                let lambda_u =
                    equilibria::eigen_of(e.name, mu).unwrap().eigenvalues.iter().map(|l| l.re).fold(0.0, f64::max);
                let t = if e.location.to_array().iter().all(|c| *c == 0.0 || *c == 1.0) {
                    100.0
                } else {
                    (8.0 / lambda_u.max(1e-9)).min(100.0)
                };
                let tr = integrate(mu, e.location, t, &FlowOptions::default()).unwrap();
                assert!(tr.last().distance(&e.location) < 1e-8, "{} at {mu}", e.name);
            }
        }
    }

    #[test]
    fn sampled_grid_is_uniform() {
        let tr = integrate_sampled(0.0, CubeState::new(0.2, 0.2, 0.2), 2.0, 0.25, &FlowOptions::default()).unwrap();
        assert_eq!(tr.len(), 9);
        assert_eq!(tr.times[4], 1.0);
        let full = integrate(0.0, CubeState::new(0.2, 0.2, 0.2), 1.0, &FlowOptions::default()).unwrap();
        assert!(tr.states[4].distance(&full.last()) < 1e-8);
    }

    #[test]
    fn rejects_points_outside() {
        let r = integrate(0.0, CubeState::new(1.5, 0.0, 0.0), 1.0, &FlowOptions::default());
        assert_eq!(r, Err(Error::OutsideCube));
    }

    #[test]
    fn tangent_growth_at_stable_node() {
        // three real eigenvalues below the node-focus transition
        let mu = -30.7;
        let o = equilibria::location(EquilibriumName::O, mu).unwrap();
        let eig = equilibria::eigen_analysis(mu, o).unwrap();
        let frame = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let dt = 0.5;
        let run = integrate_with_tangents(mu, o, frame, 60.0, dt, &FlowOptions::default()).unwrap();
        let last: Vec<[f64; 3]> = run.log_growth().collect();
        let g = last[last.len() - 1];
        for k in 0..3 {
            assert!((g[k] / dt - eig.eigenvalues[k].re).abs() < 1e-6, "{g:?}");
        }
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((linalg::dot(&run.frame[i], &run.frame[j]) - want).abs() < 1e-10);
            }
        }
        let bad = [[1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(integrate_with_tangents(mu, o, bad, 1.0, dt, &FlowOptions::default()).is_err());
    }

    #[test]
    fn omega_limit_at_minus_twenty_is_interior_point() {
        let r = classify_omega_limit(-20.0, CubeState::new(0.3, 0.3, 0.3), 400.0).unwrap();
        assert_eq!(r.verdict, OmegaVerdict::Equilibrium(EquilibriumName::O));
    }

    #[test]
    fn periodic_verdict_needs_enough_returns() {
        assert_eq!(periodic_verdict(&[1.0, 1.0], &[], 0.1), OmegaVerdict::Undetermined);
        let pts = [CubeState::new(0.1, 0.1, 0.1); 5];
        assert!(matches!(
            periodic_verdict(&[2.0; 5], &pts, 0.1),
            OmegaVerdict::Periodic { period, .. } if period == 2.0
        ));
    }
}
