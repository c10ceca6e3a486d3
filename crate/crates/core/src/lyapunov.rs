//! Lyapunov spectra by QR re-orthonormalisation of the tangent flow.

use alloc::vec::Vec;
use core::fmt;

use libm::log;

use crate::cube::{CubeState, MU_MAX, MU_MIN};
use crate::equilibria::{self, EquilibriumName};
use crate::flow::{self, FlowOptions};
use crate::{Error, Result};

/// Exponents above this count as positive; `|λ| ≤` this counts as zero.
pub const POSITIVE_THRESHOLD: f64 = 5e-3;
pub const DEFAULT_EPS: f64 = 1e-3;
pub const DEFAULT_T: f64 = 2e4;
pub const DEFAULT_DISCARD: f64 = 1e3;
pub const DEFAULT_RENORM_DT: f64 = 0.5;

/// Starting point near the interior equilibrium.
pub fn initial_condition(mu: f64, eps: f64) -> Result<CubeState> {
    if !(MU_MIN..=MU_MAX).contains(&mu) {
        return Err(Error::ParameterOutOfRange { mu, lo: MU_MIN, hi: MU_MAX });
    }
    let o = equilibria::location(EquilibriumName::O, mu)?;
    let offset = if mu < -30.0 {
        [eps, 0.0, -eps]
    } else if mu <= 9.0 {
        [0.0, 0.0, eps]
    } else {
        [eps, eps, 0.0]
    };
    let p = CubeState::new(o.x + offset[0], o.y + offset[1], o.z + offset[2]);
    if !p.is_interior() {
        return Err(Error::OutsideCube);
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(v: f64) -> Self {
        if v > POSITIVE_THRESHOLD {
            Sign::Positive
        } else if v < -POSITIVE_THRESHOLD {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Negative => '-',
            Sign::Zero => '0',
            Sign::Positive => '+',
        }
    }
}

/// Signs of the exponents listed from smallest to largest, e.g. `(-,-,0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature(pub [Sign; 3]);

impl Signature {
    pub const SINK: Signature = Signature([Sign::Negative; 3]);
    pub const CYCLE: Signature = Signature([Sign::Negative, Sign::Negative, Sign::Zero]);
    pub const CHAOTIC: Signature = Signature([Sign::Negative, Sign::Zero, Sign::Positive]);

    /// From exponents sorted in descending order.
    pub fn from_exponents(e: &[f64; 3]) -> Self {
        Signature([Sign::of(e[2]), Sign::of(e[1]), Sign::of(e[0])])
    }

    /// True for one of the three regimes that appear in the family.
    pub fn is_standard(&self) -> bool {
        *self == Self::SINK || *self == Self::CYCLE || *self == Self::CHAOTIC
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.0;
        write!(f, "({},{},{})", a.symbol(), b.symbol(), c.symbol())
    }
}

/// Horizon and renormalisation settings for [`spectrum`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovParams {
    pub t: f64,
    pub discard: f64,
    pub renorm_dt: f64,
    pub flow: FlowOptions,
}

impl Default for LyapunovParams {
    fn default() -> Self {
        Self { t: DEFAULT_T, discard: DEFAULT_DISCARD, renorm_dt: DEFAULT_RENORM_DT, flow: FlowOptions::default() }
    }
}

impl LyapunovParams {
    pub fn with_horizon(t: f64) -> Self {
        Self { t, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.t > self.discard && self.discard >= 0.0) {
            return Err(Error::InvalidArgument("need T > discard >= 0"));
        }
        if !(self.renorm_dt > 0.0) {
            return Err(Error::InvalidArgument("renormalisation interval must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovSpectrum {
    pub mu: f64,
    /// Exponents in descending order.
    pub exponents: [f64; 3],
    pub horizon: f64,
    pub discard: f64,
    /// Time average of the divergence over the averaging window.
    pub mean_divergence: f64,
    pub signature: Signature,
}

impl LyapunovSpectrum {
    pub fn top(&self) -> f64 {
        self.exponents[0]
    }

    pub fn sum(&self) -> f64 {
        self.exponents.iter().sum()
    }
}

/// Time-averaged logarithmic growth rates along the orbit of `p0`.
pub fn spectrum(mu: f64, p0: CubeState, params: &LyapunovParams) -> Result<LyapunovSpectrum> {
    params.validate()?;
    let frame = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut sums = [0.0f64; 3];
    let mut div_at_discard = 0.0;
    let mut div_end = 0.0;
    let eps = 1e-9 * params.renorm_dt;
    flow::run_tangents(
        mu,
        p0,
        frame,
        params.t,
        params.renorm_dt,
        &params.flow,
        |t, r, _, div| {
            if t <= params.discard + eps {
                div_at_discard = div;
            } else {
                for k in 0..3 {
                    sums[k] += log(r[k]);
                }
            }
            div_end = div;
        },
        |_, _| {},
    )?;
    let window = params.t - averaging_start(params);
    let mut exponents = sums.map(|s| s / window);
    exponents.sort_by(|a, b| b.total_cmp(a));
    Ok(LyapunovSpectrum {
        mu,
        exponents,
        horizon: params.t,
        discard: params.discard,
        mean_divergence: (div_end - div_at_discard) / window,
        signature: Signature::from_exponents(&exponents),
    })
}

/// Last renormalisation time not after the discard time.
fn averaging_start(params: &LyapunovParams) -> f64 {
    let n = libm::floor(params.discard / params.renorm_dt + 1e-9);
    (n * params.renorm_dt).min(params.t)
}

/// Spectrum from the standard initial condition.
pub fn spectrum_at(mu: f64, params: &LyapunovParams) -> Result<LyapunovSpectrum> {
    spectrum(mu, initial_condition(mu, DEFAULT_EPS)?, params)
}

/// Evenly spaced parameter grid including both ends.
pub fn grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument("a sweep needs at least two points"));
    }
    if !(lo < hi) {
        return Err(Error::InvalidArgument("sweep range must satisfy lo < hi"));
    }
    Ok((0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub mu: f64,
    pub result: Result<LyapunovSpectrum>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Maximal runs of consecutive grid points with a positive top exponent,
    /// as `(first μ, last μ)`.
    pub positive_intervals: Vec<(f64, f64)>,
}

impl SweepTable {
    pub fn from_rows(rows: Vec<SweepRow>) -> Self {
        let positive_intervals = positive_intervals(&rows);
        Self { rows, positive_intervals }
    }
}

/// Groups consecutive rows with a positive top exponent.
pub fn positive_intervals(rows: &[SweepRow]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    for row in rows {
        let positive = matches!(&row.result, Ok(s) if s.top() > POSITIVE_THRESHOLD);
        open = match (open, positive) {
            (None, true) => Some((row.mu, row.mu)),
            (Some((a, _)), true) => Some((a, row.mu)),
            (Some(iv), false) => {
                out.push(iv);
                None
            }
            (None, false) => None,
        };
    }
    out.extend(open);
    out
}

/// Sequential sweep; failures are recorded per row.
pub fn sweep(lo: f64, hi: f64, n: usize, params: &LyapunovParams) -> Result<SweepTable> {
    let rows = grid(lo, hi, n)?.into_iter().map(|mu| SweepRow { mu, result: spectrum_at(mu, params) }).collect();
    Ok(SweepTable::from_rows(rows))
}

/// Where the top exponent first exceeds the threshold inside `[lo, hi]`.
///
/// The bracket is scanned upward with spacing `scan_step` until the first
/// positive sample, then the last sub-interval is bisected down to `tol`.
pub fn estimate_mu_sa(lo: f64, hi: f64, tol: f64, scan_step: f64, params: &LyapunovParams) -> Result<f64> {
    if !(lo < hi) || !(tol > 0.0) || !(scan_step > 0.0) {
        return Err(Error::InvalidArgument("need lo < hi and positive tol and scan step"));
    }
    let positive = |mu: f64| -> Result<bool> { Ok(spectrum_at(mu, params)?.top() > POSITIVE_THRESHOLD) };
    if positive(lo)? {
        return Err(Error::NoSignChange { lo, hi });
    }
    let n = libm::ceil((hi - lo) / scan_step - 1e-9) as usize;
    let mut prev = lo;
    let mut found = None;
    for k in 1..=n {
        let mu = if k == n { hi } else { lo + k as f64 * scan_step };
        if positive(mu)? {
            found = Some((prev, mu));
            break;
        }
        prev = mu;
    }
    let (mut a, mut b) = found.ok_or(Error::NoSignChange { lo, hi })?;
    while b - a > tol {
        let m = 0.5 * (a + b);
        if positive(m)? {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn initial_condition_branches() {
        let eps = 1e-3;
        let o = equilibria::location(EquilibriumName::O, -31.0 + 0.5).unwrap();
        let p = initial_condition(-30.5, eps).unwrap();
        assert_eq!(p, CubeState::new(o.x + eps, o.y, o.z - eps));
        let o = equilibria::location(EquilibriumName::O, 0.0).unwrap();
        assert_eq!(initial_condition(0.0, eps).unwrap(), CubeState::new(o.x, o.y, o.z + eps));
        let o = equilibria::location(EquilibriumName::O, 9.8).unwrap();
        assert_eq!(initial_condition(9.8, eps).unwrap(), CubeState::new(o.x + eps, o.y + eps, o.z));
        assert!(initial_condition(11.0, eps).is_err());
    }

    #[test]
    fn signature_buckets() {
        assert_eq!(Signature::from_exponents(&[-0.1, -0.2, -3.0]), Signature::SINK);
        assert_eq!(Signature::from_exponents(&[0.004, -0.2, -3.0]), Signature::CYCLE);
        assert_eq!(Signature::from_exponents(&[0.2, -0.001, -3.0]), Signature::CHAOTIC);
        assert_eq!(Signature::CHAOTIC.to_string(), "(-,0,+)");
        assert!(!Signature::from_exponents(&[0.2, 0.1, -3.0]).is_standard());
    }

    #[test]
    fn sink_spectrum_matches_eigenvalues() {
        let mu = -20.0;
        let params = LyapunovParams { t: 400.0, discard: 100.0, ..Default::default() };
        let s = spectrum_at(mu, &params).unwrap();
        assert_eq!(s.signature, Signature::SINK);
        let eig = equilibria::eigen_of(EquilibriumName::O, mu).unwrap();
        let pair = 0.5 * (s.exponents[0] + s.exponents[1]);
        assert!((pair - eig.eigenvalues[0].re).abs() < 1e-3, "{:?}", s.exponents);
        for k in 0..3 {
            assert!((s.exponents[k] - eig.eigenvalues[k].re).abs() < 1e-2, "{:?}", s.exponents);
        }
        assert!((s.exponents[2] - eig.eigenvalues[2].re).abs() < 1e-3);
        assert!((s.sum() - s.mean_divergence).abs() < 1e-2);
    }

    #[test]
    fn intervals_group_consecutive_positive_rows() {
        let mk = |mu: f64, top: f64| SweepRow {
            mu,
            result: Ok(LyapunovSpectrum {
                mu,
                exponents: [top, -0.1, -1.0],
                horizon: 1.0,
                discard: 0.0,
                mean_divergence: 0.0,
                signature: Signature::from_exponents(&[top, -0.1, -1.0]),
            }),
        };
        let rows = [mk(0.0, 0.0), mk(1.0, 0.1), mk(2.0, 0.2), mk(3.0, 0.0), mk(4.0, 0.3)];
        assert_eq!(positive_intervals(&rows), [(1.0, 2.0), (4.0, 4.0)]);
    }

    #[test]
    fn bad_arguments() {
        assert!(grid(0.0, 1.0, 1).is_err());
        let params = LyapunovParams { t: 10.0, discard: 20.0, ..Default::default() };
        assert!(spectrum_at(0.0, &params).is_err());
        assert!(estimate_mu_sa(1.0, 0.0, 0.1, 0.1, &LyapunovParams::default()).is_err());
    }
}
