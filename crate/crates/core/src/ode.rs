//! Dormand–Prince 5(4) integrator with PI step control and 4th-order dense output.

use libm::{pow, sqrt};

use crate::{Error, Result};

/// Right-hand side of an autonomous or non-autonomous ODE in `N` dimensions.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N], dy: &mut [f64; N]);

    /// How far `y` lies outside the admissible region; zero when admissible.
    fn overshoot(&self, _y: &[f64; N]) -> f64 {
        0.0
    }

    /// Called on every accepted state; pulls a slightly inadmissible `y` back
    /// into the region. Returns true when anything changed.
    fn project(&self, _y: &mut [f64; N]) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    /// Largest admissible step magnitude.
    pub h_max: f64,
    /// Initial step magnitude; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub max_steps: usize,
    /// Overshoot that is silently projected away; larger ones reject the step.
    pub overshoot_tol: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12, h_max: f64::INFINITY, h_init: None, max_steps: 50_000_000, overshoot_tol: 1e-9 }
    }
}

impl Options {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive"));
        }
        if !(self.h_max > 0.0) {
            return Err(Error::InvalidArgument("maximum step must be positive"));
        }
        Ok(())
    }
}

/// Counters collected during integration.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// Largest overshoot that was projected back into the region.
    pub max_projected: f64,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const BETA: f64 = 0.04;
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[inline]
fn sq(v: f64) -> f64 {
    v * v
}

/// Adaptive integrator state for the system `S`.
#[derive(Debug, Clone)]
pub struct Dopri5<S, const N: usize> {
    sys: S,
    opts: Options,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    fsal: bool,
    h: f64,
    err_old: f64,
    last_rejected: bool,
    stats: Stats,
    // dense output of the last accepted step
    t_old: f64,
    h_last: f64,
    cont: [[f64; N]; 5],
}

impl<S: OdeSystem<N>, const N: usize> Dopri5<S, N> {
    pub fn new(sys: S, t0: f64, y0: [f64; N], opts: Options) -> Result<Self> {
        opts.validate()?;
        if !t0.is_finite() || y0.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("initial data must be finite"));
        }
        Ok(Self {
            sys,
            opts,
            t: t0,
            y: y0,
            k1: [0.0; N],
            fsal: false,
            h: 0.0,
            err_old: 1e-4,
            last_rejected: false,
            stats: Stats::default(),
            t_old: t0,
            h_last: 0.0,
            cont: [y0, [0.0; N], [0.0; N], [0.0; N], [0.0; N]],
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    pub fn system(&self) -> &S {
        &self.sys
    }

    /// Start and end time of the last accepted step.
    pub fn last_step(&self) -> (f64, f64) {
        (self.t_old, self.t)
    }

    /// Replaces the current state, e.g. after renormalising tangent vectors.
    /// The step size estimate is kept.
    pub fn set_state(&mut self, t: f64, y: [f64; N]) {
        self.t = t;
        self.y = y;
        self.fsal = false;
        self.t_old = t;
        self.h_last = 0.0;
        self.cont = [y, [0.0; N], [0.0; N], [0.0; N], [0.0; N]];
    }

    fn eval(&mut self, t: f64, y: &[f64; N], out: &mut [f64; N]) {
        self.stats.evaluations += 1;
        self.sys.rhs(t, y, out);
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.opts.atol + self.opts.rtol * a.abs().max(b.abs())
    }

    fn initial_step(&mut self, dir: f64) -> f64 {
        let mut sum_f = 0.0;
        let mut sum_y = 0.0;
        for i in 0..N {
            let sk = self.scale(self.y[i], self.y[i]);
            sum_f += sq(self.k1[i] / sk);
            sum_y += sq(self.y[i] / sk);
        }
        let mut h = if sum_f <= 1e-10 || sum_y <= 1e-10 { 1e-6 } else { sqrt(sum_y / sum_f) * 0.01 };
        h = h.min(self.opts.h_max);
        let mut y1 = [0.0; N];
        for i in 0..N {
            y1[i] = self.y[i] + dir * h * self.k1[i];
        }
        let mut f1 = [0.0; N];
        let t = self.t;
        self.eval(t + dir * h, &y1, &mut f1);
        let mut der2 = 0.0;
        for i in 0..N {
            let sk = self.scale(self.y[i], self.y[i]);
            der2 += sq((f1[i] - self.k1[i]) / sk);
        }
        let der2 = sqrt(der2) / h;
        let der12 = der2.abs().max(sqrt(sum_f));
        let h1 = if der12 <= 1e-15 { (h * 1e-3).max(1e-6) } else { pow(0.01 / der12, 0.2) };
        (100.0 * h).min(h1).min(self.opts.h_max)
    }

    /// Takes one accepted step towards `t_bound` without passing it.
    pub fn step(&mut self, t_bound: f64) -> Result<()> {
        let dir = if t_bound >= self.t { 1.0 } else { -1.0 };
        if !self.fsal {
            let (t, y) = (self.t, self.y);
            let mut k1 = [0.0; N];
            self.eval(t, &y, &mut k1);
            self.k1 = k1;
            self.fsal = true;
        }
        if self.h == 0.0 {
            self.h = match self.opts.h_init {
                Some(h) => h.abs().min(self.opts.h_max),
                None => self.initial_step(dir),
            };
        }
        let mut projection_rejects = 0usize;
        let mut worst_overshoot = 0.0f64;
        loop {
            if self.stats.accepted + self.stats.rejected >= self.opts.max_steps {
                return Err(Error::MaxStepsExceeded { t: self.t });
            }
            let remaining = (t_bound - self.t).abs();
            let mut h = self.h.abs().min(self.opts.h_max);
            if h >= remaining || 1.01 * h >= remaining {
                h = remaining;
            }
            if h < 1e-14 * self.t.abs().max(1.0) && h < remaining {
                return Err(if projection_rejects > 0 {
                    Error::InvarianceViolation { t: self.t, overshoot: worst_overshoot }
                } else {
                    Error::StepSizeUnderflow { t: self.t }
                });
            }
            let hs = dir * h;
            let (t, y, k1) = (self.t, self.y, self.k1);
            let mut k2 = [0.0; N];
            let mut k3 = [0.0; N];
            let mut k4 = [0.0; N];
            let mut k5 = [0.0; N];
            let mut k6 = [0.0; N];
            let mut k7 = [0.0; N];
            let mut tmp = [0.0; N];

            for i in 0..N {
                tmp[i] = y[i] + hs * A21 * k1[i];
            }
            self.eval(t + C2 * hs, &tmp, &mut k2);
            for i in 0..N {
                tmp[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i]);
            }
            self.eval(t + C3 * hs, &tmp, &mut k3);
            for i in 0..N {
                tmp[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            self.eval(t + C4 * hs, &tmp, &mut k4);
            for i in 0..N {
                tmp[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            self.eval(t + C5 * hs, &tmp, &mut k5);
            for i in 0..N {
                tmp[i] = y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            self.eval(t + hs, &tmp, &mut k6);
            let mut y_new = [0.0; N];
            for i in 0..N {
                y_new[i] = y[i] + hs * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
            }
            self.eval(t + hs, &y_new, &mut k7);

            let mut err = 0.0;
            for i in 0..N {
                let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sk = self.scale(y[i], y_new[i]);
                err += sq(e / sk);
            }
            let err = sqrt(err / N as f64);
            if !err.is_finite() {
                self.stats.rejected += 1;
                self.h = h * FAC_MIN;
                self.last_rejected = true;
                continue;
            }

            let fac11 = pow(err, 0.2 - BETA * 0.75);
            if err <= 1.0 {
                let overshoot = self.sys.overshoot(&y_new);
                if overshoot > self.opts.overshoot_tol {
                    worst_overshoot = worst_overshoot.max(overshoot);
                    projection_rejects += 1;
                    self.stats.rejected += 1;
                    self.h = h * 0.5;
                    self.last_rejected = true;
                    continue;
                }
                if self.sys.project(&mut y_new) {
                    self.stats.max_projected = self.stats.max_projected.max(overshoot);
                    self.eval(t + hs, &y_new, &mut k7);
                }
                let fac = (fac11 / pow(self.err_old, BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                let mut h_new = h / fac;
                if self.last_rejected {
                    h_new = h_new.min(h);
                }
                self.err_old = err.max(1e-4);
                self.last_rejected = false;
                self.stats.accepted += 1;

                for i in 0..N {
                    let ydiff = y_new[i] - y[i];
                    let bspl = hs * k1[i] - ydiff;
                    self.cont[0][i] = y[i];
                    self.cont[1][i] = ydiff;
                    self.cont[2][i] = bspl;
                    self.cont[3][i] = ydiff - hs * k7[i] - bspl;
                    self.cont[4][i] =
                        hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                self.t_old = t;
                self.h_last = hs;
                self.t = if h == remaining { t_bound } else { t + hs };
                self.y = y_new;
                self.k1 = k7;
                // a truncated final step should not shrink the next estimate
                self.h = if h == remaining { h_new.max(self.h.abs()) } else { h_new };
                return Ok(());
            }
            self.stats.rejected += 1;
            self.h = h / (1.0 / FAC_MIN).min(fac11 / SAFETY);
            self.last_rejected = true;
        }
    }

    /// Dense output inside the last accepted step.
    pub fn dense(&self, t: f64) -> [f64; N] {
        if self.h_last == 0.0 {
            return self.y;
        }
        let s = (t - self.t_old) / self.h_last;
        let s1 = 1.0 - s;
        let c = &self.cont;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * c[4][i])));
        }
        out
    }

    /// Integrates to `t_end`. `on_step` runs after every accepted step and may
    /// stop the integration early by returning `false`.
    pub fn advance_to<F>(&mut self, t_end: f64, mut on_step: F) -> Result<()>
    where
        F: FnMut(&Self) -> bool,
    {
        if !t_end.is_finite() {
            return Err(Error::InvalidArgument("end time must be finite"));
        }
        while self.t != t_end {
            self.step(t_end)?;
            if !on_step(self) {
                break;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::{cos, exp, sin};

    struct Decay;
    impl OdeSystem<1> for Decay {
        fn rhs(&self, _t: f64, y: &[f64; 1], dy: &mut [f64; 1]) {
            dy[0] = -y[0];
        }
    }

    struct Oscillator;
    impl OdeSystem<2> for Oscillator {
        fn rhs(&self, _t: f64, y: &[f64; 2], dy: &mut [f64; 2]) {
            dy[0] = y[1];
            dy[1] = -y[0];
        }
    }

    #[test]
    fn exponential_decay_forward_and_backward() {
        let mut s = Dopri5::new(Decay, 0.0, [1.0], Options::default()).unwrap();
        s.advance_to(5.0, |_| true).unwrap();
        assert_eq!(s.t(), 5.0);
        assert!((s.y()[0] - exp(-5.0)).abs() < 1e-10);
        s.advance_to(0.0, |_| true).unwrap();
        assert!((s.y()[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn oscillator_dense_output() {
        let opts = Options::with_tolerances(1e-10, 1e-12);
        let mut s = Dopri5::new(Oscillator, 0.0, [0.0, 1.0], opts).unwrap();
        let mut worst = 0.0f64;
        s.advance_to(20.0, |st| {
            let (a, b) = st.last_step();
            for k in 0..=4 {
                let t = a + (b - a) * k as f64 / 4.0;
                let y = st.dense(t);
                worst = worst.max((y[0] - sin(t)).abs()).max((y[1] - cos(t)).abs());
            }
            true
        })
        .unwrap();
        assert!(worst < 1e-8, "dense error {worst}");
        assert!(s.stats().accepted > 10);
    }

    #[test]
    fn callback_can_stop() {
        let mut s = Dopri5::new(Decay, 0.0, [1.0], Options::default()).unwrap();
        let mut n = 0;
        s.advance_to(100.0, |_| {
            n += 1;
            n < 3
        })
        .unwrap();
        assert_eq!(n, 3);
        assert!(s.t() < 100.0);
    }

    #[test]
    fn bad_options_are_rejected() {
        let opts = Options { rtol: 0.0, ..Options::default() };
        assert!(Dopri5::new(Decay, 0.0, [1.0], opts).is_err());
        assert!(Dopri5::new(Decay, 0.0, [f64::NAN], Options::default()).is_err());
    }

    #[test]
    fn step_budget_is_enforced() {
        let opts = Options { max_steps: 5, ..Options::default() };
        let mut s = Dopri5::new(Oscillator, 0.0, [0.0, 1.0], opts).unwrap();
        assert!(matches!(s.advance_to(1e3, |_| true), Err(Error::MaxStepsExceeded { .. })));
    }

    #[test]
    fn convergence_order() {
        let run = |tol: f64| {
            let opts = Options::with_tolerances(tol, tol * 1e-3);
            let mut s = Dopri5::new(Oscillator, 0.0, [0.0, 1.0], opts).unwrap();
            s.advance_to(10.0, |_| true).unwrap();
            (s.y()[0] - sin(10.0)).abs()
        };
        let coarse = run(1e-6);
        let fine = run(1e-9);
        assert!(fine < coarse);
    }
}
