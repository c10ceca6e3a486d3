//! Codimension-one events along the parameter: detection on a grid,
//! refinement by bisection, and the case partition of the parameter range.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::cube::{self, CubeState, MU_MAX, MU_MIN};
use crate::equilibria::{self, EquilibriumName, Stratum};
use crate::flow::{self, FlowOptions, Section};
use crate::linalg;
use crate::ode::Dopri5;
use crate::{Error, Result};

pub const DEFAULT_STEP: f64 = 1e-2;
pub const DEFAULT_TOL: f64 = 1e-8;
/// Two equilibria closer than this at a transcritical root count as colliding.
pub const COLLISION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EventKind {
    Transcritical,
    Hopf,
    Belyakov,
    EntryExit,
}

impl EventKind {
    pub const ALL: [EventKind; 4] =
        [EventKind::Transcritical, EventKind::Hopf, EventKind::Belyakov, EventKind::EntryExit];

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Transcritical => "transcritical",
            EventKind::Hopf => "hopf",
            EventKind::Belyakov => "belyakov",
            EventKind::EntryExit => "cube-entry-exit",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A sign change of an event test function, bracketed and refined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BifurcationEvent {
    pub kind: EventKind,
    pub equilibrium: EquilibriumName,
    /// The other equilibrium of a collision.
    pub partner: Option<EquilibriumName>,
    pub mu_star: f64,
    pub bracket: (f64, f64),
    pub test_value_left: f64,
    pub test_value_right: f64,
    pub tol: f64,
}

fn product(v: &[Complex64; 3]) -> f64 {
    (v[0] * v[1] * v[2]).re
}

fn discriminant(v: &[Complex64; 3]) -> f64 {
    let d = (v[0] - v[1]) * (v[0] - v[2]) * (v[1] - v[2]);
    (d * d).re
}

fn complex_pair_re(v: &[Complex64; 3]) -> f64 {
    v.iter().find(|l| l.im != 0.0).map_or(f64::NAN, |l| l.re)
}

/// Event test function of `kind` for `name` at `mu`; NaN where undefined.
pub fn test_function(kind: EventKind, name: EquilibriumName, mu: f64) -> f64 {
    let Ok(p) = equilibria::location(name, mu) else {
        return f64::NAN;
    };
    if kind == EventKind::EntryExit {
        return cube_margin(name, p);
    }
    if name == EquilibriumName::O {
        let j = cube::jacobian(mu, p);
        return match kind {
            EventKind::Transcritical => linalg::det(&j),
            EventKind::Belyakov => linalg::cubic_discriminant(linalg::char_poly(&j)),
            _ => complex_pair_re(&linalg::cubic_roots(linalg::char_poly(&j))),
        };
    }
    if kind == EventKind::Belyakov && name.stratum() == Stratum::Face {
        return equilibria::face_radicand(name, mu).unwrap_or(f64::NAN);
    }
    match equilibria::closed_form_eigenvalues(name, mu) {
        Ok(v) => match kind {
            EventKind::Transcritical => product(&v),
            EventKind::Belyakov => discriminant(&v),
            _ => complex_pair_re(&v),
        },
        Err(_) => f64::NAN,
    }
}

/// Signed distance of the free coordinates to the cube boundary; negative
/// outside. Vertices have no free coordinate and return NaN.
fn cube_margin(name: EquilibriumName, p: CubeState) -> f64 {
    use EquilibriumName::*;
    let free: &[usize] = match name {
        A1 | A2 | A3 | A4 => &[0],
        B1 | B3 => &[0, 2 - usize::from(name == B3)],
        B2 => &[0, 1],
        O => &[0, 1, 2],
        _ => return f64::NAN,
    };
    let a = p.to_array();
    free.iter().map(|&i| a[i].min(1.0 - a[i])).fold(f64::INFINITY, f64::min)
}

fn in_cube_near(name: EquilibriumName, mu: f64) -> bool {
    equilibria::location(name, mu).is_ok_and(|p| p.in_cube(COLLISION_TOL))
}

fn in_cube_strict(name: EquilibriumName, mu: f64) -> bool {
    equilibria::location(name, mu).is_ok_and(|p| p.in_cube(equilibria::IN_CUBE_TOL))
}

/// Bisects the event's test function down to a bracket of width `tol` and
/// returns its midpoint.
pub fn refine(event: &BifurcationEvent, tol: f64) -> Result<f64> {
    let (mu, _) = bisect(event.kind, event.equilibrium, event.bracket.0, event.bracket.1, tol)?;
    Ok(mu)
}

fn bisect(kind: EventKind, name: EquilibriumName, lo: f64, hi: f64, tol: f64) -> Result<(f64, (f64, f64))> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive"));
    }
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut fa = test_function(kind, name, a);
    let fb = test_function(kind, name, b);
    if fa == 0.0 || fb == 0.0 {
        let m = if fa == 0.0 { a } else { b };
        return Ok((m, (a, b)));
    }
    if !(fa * fb < 0.0) {
        return Err(Error::NoSignChange { lo: a, hi: b });
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = test_function(kind, name, m);
        if fm.is_nan() {
            return Err(Error::NoSignChange { lo: a, hi: b });
        }
        if fm == 0.0 {
            return Ok((m, (a, b)));
        }
        if (fm > 0.0) == (fa > 0.0) && fm != 0.0 {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok((0.5 * (a + b), (a, b)))
}

/// A diagnostic emitted by [`scan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanWarning {
    /// The number of unstable eigenvalues changed inside `bracket` without a
    /// detected event; events may have merged.
    UnexplainedStabilityChange { equilibrium: EquilibriumName, bracket: (f64, f64) },
    /// A zero eigenvalue without a colliding partner.
    ZeroEigenvalueWithoutCollision { equilibrium: EquilibriumName, mu: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub events: Vec<BifurcationEvent>,
    pub warnings: Vec<ScanWarning>,
}

impl ScanReport {
    pub fn of_kind(&self, kind: EventKind) -> impl Iterator<Item = &BifurcationEvent> {
        self.events.iter().filter(move |e| e.kind == kind)
    }
}

fn unstable_dim(name: EquilibriumName, mu: f64) -> Option<usize> {
    let v = match equilibria::closed_form_eigenvalues(name, mu) {
        Ok(v) => v,
        Err(_) => {
            let p = equilibria::location(name, mu).ok()?;
            linalg::cubic_roots(linalg::char_poly(&cube::jacobian(mu, p)))
        }
    };
    let scale = v.iter().map(|l| linalg::cabs(*l)).fold(1.0, f64::max);
    if v.iter().any(|l| l.re.abs() <= 1e-9 * scale) {
        return None;
    }
    Some(v.iter().filter(|l| l.re > 0.0).count())
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = libm::ceil((hi - lo) / step - 1e-9).max(1.0) as usize;
    (0..=n).map(|k| if k == n { hi } else { lo + k as f64 * step }).collect()
}

/// Detects and refines all events of the tracked equilibria in `[lo, hi]`.
pub fn scan(lo: f64, hi: f64, step: f64, tol: f64) -> Result<ScanReport> {
    if !(step > 0.0) || !(lo < hi) {
        return Err(Error::InvalidArgument("need step > 0 and lo < hi"));
    }
    let mus = grid(lo, hi, step);
    let mut raw: Vec<BifurcationEvent> = Vec::new();
    let mut warnings = Vec::new();

    for name in EquilibriumName::ALL {
        for kind in EventKind::ALL {
            let values: Vec<f64> = mus.iter().map(|&m| test_function(kind, name, m)).collect();
            // last nonzero sample; exact zeros are bracketed by their neighbours
            let mut last: Option<usize> = None;
            for k in 0..mus.len() {
                let fb = values[k];
                if fb.is_nan() {
                    last = None;
                    continue;
                }
                if fb == 0.0 {
                    continue;
                }
                let Some(j) = last.replace(k) else { continue };
                if !(values[j] * fb < 0.0) {
                    continue;
                }
                let (a, b) = (mus[j], mus[k]);
                if !(in_cube_near(name, a) || in_cube_near(name, b)) {
                    continue;
                }
                let (mu_star, bracket) = bisect(kind, name, a, b, tol)?;
                if !(in_cube_near(name, mu_star) || in_cube_strict(name, a) || in_cube_strict(name, b)) {
                    continue;
                }
                raw.push(BifurcationEvent {
                    kind,
                    equilibrium: name,
                    partner: None,
                    mu_star,
                    bracket,
                    test_value_left: test_function(kind, name, bracket.0),
                    test_value_right: test_function(kind, name, bracket.1),
                    tol,
                });
            }
        }
    }

    let mut events = Vec::new();
    let transcritical: Vec<BifurcationEvent> =
        raw.iter().copied().filter(|e| e.kind == EventKind::Transcritical).collect();
    let mut consumed = alloc::vec![false; transcritical.len()];
    for i in 0..transcritical.len() {
        if consumed[i] {
            continue;
        }
        let e = transcritical[i];
        let here = equilibria::location(e.equilibrium, e.mu_star)?;
        let partner = EquilibriumName::ALL
            .iter()
            .copied()
            .filter(|n| *n != e.equilibrium)
            .filter_map(|n| Some((n, equilibria::location(n, e.mu_star).ok()?.distance(&here))))
            .filter(|(_, d)| *d < COLLISION_TOL)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(n, _)| n);
        let Some(partner) = partner else {
            warnings.push(ScanWarning::ZeroEigenvalueWithoutCollision { equilibrium: e.equilibrium, mu: e.mu_star });
            continue;
        };
        // the partner's own sign change is the same event
        if let Some(j) = (0..transcritical.len()).find(|&j| {
            !consumed[j]
                && j != i
                && transcritical[j].equilibrium == partner
                && (transcritical[j].mu_star - e.mu_star).abs() < 10.0 * tol.max(1e-12)
        }) {
            consumed[j] = true;
        }
        consumed[i] = true;
        // primary: the equilibrium that stays in the cube on both sides
        let stays = |n: EquilibriumName| {
            in_cube_strict(n, e.bracket.0 - 10.0 * tol) && in_cube_strict(n, e.bracket.1 + 10.0 * tol)
        };
        let (primary, other) =
            if stays(e.equilibrium) || !stays(partner) { (e.equilibrium, partner) } else { (partner, e.equilibrium) };
        let (tl, tr) = if primary == e.equilibrium {
            (e.test_value_left, e.test_value_right)
        } else {
            (
                test_function(EventKind::Transcritical, primary, e.bracket.0),
                test_function(EventKind::Transcritical, primary, e.bracket.1),
            )
        };
        events.push(BifurcationEvent {
            equilibrium: primary,
            partner: Some(other),
            test_value_left: tl,
            test_value_right: tr,
            ..e
        });
    }
    events.extend(raw.iter().copied().filter(|e| e.kind != EventKind::Transcritical));
    events.sort_by(|a, b| {
        a.mu_star.total_cmp(&b.mu_star).then(a.kind.cmp(&b.kind)).then(a.equilibrium.cmp(&b.equilibrium))
    });

    // stability changes not covered by an event
    for name in EquilibriumName::ALL {
        for k in 0..mus.len() - 1 {
            let (a, b) = (mus[k], mus[k + 1]);
            if !(in_cube_strict(name, a) && in_cube_strict(name, b)) {
                continue;
            }
            let (Some(da), Some(db)) = (unstable_dim(name, a), unstable_dim(name, b)) else {
                continue;
            };
            if da == db {
                continue;
            }
            let explained = events.iter().any(|e| {
                (e.equilibrium == name || e.partner == Some(name))
                    && matches!(e.kind, EventKind::Transcritical | EventKind::Hopf)
                    && e.mu_star >= a
                    && e.mu_star <= b
            });
            if !explained {
                warnings.push(ScanWarning::UnexplainedStabilityChange { equilibrium: name, bracket: (a, b) });
            }
        }
    }
    Ok(ScanReport { events, warnings })
}

/// Node-focus transition and the two Hopf values of the interior equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorThresholds {
    pub belyakov: f64,
    pub hopf1: f64,
    pub hopf2: f64,
}

/// Refines the interior thresholds from fixed brackets.
pub fn interior_thresholds(tol: f64) -> Result<InteriorThresholds> {
    let o = EquilibriumName::O;
    Ok(InteriorThresholds {
        belyakov: bisect(EventKind::Belyakov, o, -31.0, -30.0, tol)?.0,
        hopf1: bisect(EventKind::Hopf, o, -19.0, -17.0, tol)?.0,
        hopf2: bisect(EventKind::Hopf, o, 9.0, 9.9, tol)?.0,
    })
}

/// Sub-intervals of the parameter range with a fixed qualitative picture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CaseLabel {
    I1,
    I2,
    I3,
    II,
    III,
    IV,
    V,
    VI,
    VII1,
    VII2,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 10] = [
        CaseLabel::I1,
        CaseLabel::I2,
        CaseLabel::I3,
        CaseLabel::II,
        CaseLabel::III,
        CaseLabel::IV,
        CaseLabel::V,
        CaseLabel::VI,
        CaseLabel::VII1,
        CaseLabel::VII2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::I1 => "I.1",
            CaseLabel::I2 => "I.2",
            CaseLabel::I3 => "I.3",
            CaseLabel::II => "II",
            CaseLabel::III => "III",
            CaseLabel::IV => "IV",
            CaseLabel::V => "V",
            CaseLabel::VI => "VI",
            CaseLabel::VII1 => "VII.1",
            CaseLabel::VII2 => "VII.2",
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ordered inner boundaries of the case partition with the event at each.
pub fn case_boundaries(t: &InteriorThresholds) -> [(f64, &'static str); 9] {
    [
        (t.belyakov, "belyakov of O"),
        (t.hopf1, "first hopf of O"),
        (-122.0 / 7.0, "transcritical B3=A4"),
        (-12.0, "transcritical A1=v4"),
        (-8.0, "transcritical A4=v3"),
        (-6.0, "transcritical B2=A2"),
        (110.0 / 31.0, "transcritical B1=A2"),
        (8.0, "transcritical A2=v2"),
        (t.hopf2, "second hopf of O"),
    ]
}

/// Distance under which `mu` is treated as sitting on a case boundary.
pub const CASE_BOUNDARY_TOL: f64 = 1e-9;

/// Case label of `mu`, using refined interior thresholds.
pub fn classify_case(mu: f64) -> Result<CaseLabel> {
    classify_case_with(mu, &interior_thresholds(1e-12)?)
}

pub fn classify_case_with(mu: f64, t: &InteriorThresholds) -> Result<CaseLabel> {
    if !(mu > MU_MIN && mu < MU_MAX) {
        return Err(Error::ParameterOutOfRange { mu, lo: MU_MIN, hi: MU_MAX });
    }
    let bounds = case_boundaries(t);
    for (b, event) in bounds {
        if (mu - b).abs() <= CASE_BOUNDARY_TOL {
            return Err(Error::CaseBoundary { mu, event });
        }
    }
    let idx = bounds.iter().filter(|(b, _)| mu > *b).count();
    Ok(CaseLabel::ALL[idx])
}

/// Outcome of integrating near the interior equilibrium close to a Hopf value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CycleVerdict {
    /// Converged periodic orbit; amplitude is the largest distance to O.
    Cycle {
        amplitude: f64,
        period: f64,
    },
    None,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HopfCycleReport {
    pub mu: f64,
    pub verdict: CycleVerdict,
    /// Largest distance to O per revolution.
    pub amplitudes: Vec<f64>,
    pub return_times: Vec<f64>,
}

/// Integrates from O plus a small offset at `mu_hopf + offset` and checks
/// whether the orbit settles on a cycle.
pub fn hopf_cycle_check(mu_hopf: f64, offset: f64, horizon: f64) -> Result<HopfCycleReport> {
    if !(horizon > 0.0) {
        return Err(Error::InvalidArgument("horizon must be positive"));
    }
    let mu = mu_hopf + offset;
    let o = equilibria::location(EquilibriumName::O, mu)?;
    let section = Section::default_for(mu)?;
    let start = CubeState::new(o.x, o.y, o.z + 1e-4);
    let opts = FlowOptions::default();
    let mut solver = Dopri5::new(flow::CubeFlow { mu }, 0.0, start.to_array(), opts.ode_options())?;
    let mut prev = section.signed_distance(&start.to_array());
    let mut amplitudes = Vec::new();
    let mut crossing_times = Vec::new();
    let mut amp = 0.0f64;
    solver.advance_to(horizon, |s| {
        let y = *s.y();
        amp = amp.max(linalg::distance(&y, &o.to_array()));
        let cur = section.signed_distance(&y);
        if prev < 0.0 && cur >= 0.0 {
            let c = flow::refine_crossing(s, &section);
            if !crossing_times.is_empty() {
                amplitudes.push(amp);
            }
            crossing_times.push(c.t);
            amp = 0.0;
        }
        prev = cur;
        true
    })?;
    let return_times: Vec<f64> = crossing_times.windows(2).map(|w| w[1] - w[0]).collect();

    let verdict = if amplitudes.len() < 3 {
        CycleVerdict::Undetermined
    } else {
        let n = amplitudes.len();
        let last = amplitudes[n - 1];
        let ratio = last / amplitudes[n - 2];
        let decaying = amplitudes.windows(2).all(|w| w[1] < w[0]);
        if last < 1e-7 || decaying {
            CycleVerdict::None
        } else if (ratio - 1.0).abs() < 1e-3 {
            let k = return_times.len().min(5);
            let period = return_times[return_times.len() - k..].iter().sum::<f64>() / k as f64;
            CycleVerdict::Cycle { amplitude: last, period }
        } else {
            CycleVerdict::Undetermined
        }
    };
    Ok(HopfCycleReport { mu, verdict, amplitudes, return_times })
}
