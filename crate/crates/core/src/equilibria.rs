//! Named equilibria of the family, their existence intervals and eigen data.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use libm::sqrt;
use num_complex::Complex64;

use crate::cube::{self, CubeState, MU_MAX, MU_MIN};
use crate::linalg::{self, CVec3};
use crate::{Error, Result};

/// Tolerance used for the coordinate-based in-cube flag.
pub const IN_CUBE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EquilibriumName {
    V1,
    V2,
    V3,
    V4,
    V5,
    V6,
    V7,
    V8,
    A1,
    A2,
    A3,
    A4,
    B1,
    B2,
    B3,
    O,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stratum {
    Vertex,
    Edge,
    Face,
    Interior,
}

impl Stratum {
    pub fn as_str(self) -> &'static str {
        match self {
            Stratum::Vertex => "vertex",
            Stratum::Edge => "edge",
            Stratum::Face => "face",
            Stratum::Interior => "interior",
        }
    }
}

impl EquilibriumName {
    pub const ALL: [EquilibriumName; 16] = {
        use EquilibriumName::*;
        [V1, V2, V3, V4, V5, V6, V7, V8, A1, A2, A3, A4, B1, B2, B3, O]
    };

    pub const VERTICES: [EquilibriumName; 8] = {
        use EquilibriumName::*;
        [V1, V2, V3, V4, V5, V6, V7, V8]
    };

    pub fn as_str(self) -> &'static str {
        use EquilibriumName::*;
        match self {
            V1 => "v1",
            V2 => "v2",
            V3 => "v3",
            V4 => "v4",
            V5 => "v5",
            V6 => "v6",
            V7 => "v7",
            V8 => "v8",
            A1 => "A1",
            A2 => "A2",
            A3 => "A3",
            A4 => "A4",
            B1 => "B1",
            B2 => "B2",
            B3 => "B3",
            O => "O",
        }
    }

    pub fn stratum(self) -> Stratum {
        use EquilibriumName::*;
        match self {
            V1 | V2 | V3 | V4 | V5 | V6 | V7 | V8 => Stratum::Vertex,
            A1 | A2 | A3 | A4 => Stratum::Edge,
            B1 | B2 | B3 => Stratum::Face,
            O => Stratum::Interior,
        }
    }

    /// Vertex coordinates, if this is a vertex.
    pub fn vertex(self) -> Option<CubeState> {
        let k = Self::VERTICES.iter().position(|v| *v == self)?;
        Some(CubeState::new((k >> 2 & 1) as f64, (k >> 1 & 1) as f64, (k & 1) as f64))
    }
}

impl fmt::Display for EquilibriumName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EquilibriumName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|n| n.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownEquilibrium(s.into()))
    }
}

/// A named rest point evaluated at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub name: EquilibriumName,
    pub mu: f64,
    pub location: CubeState,
    /// False for formal equilibria lying outside the cube.
    pub in_cube: bool,
    pub stratum: Stratum,
}

impl Equilibrium {
    pub fn new(name: EquilibriumName, mu: f64) -> Result<Self> {
        let location = location(name, mu)?;
        Ok(Self { name, mu, location, in_cube: location.in_cube(IN_CUBE_TOL), stratum: name.stratum() })
    }

    /// Euclidean norm of the field at the location.
    pub fn residual(&self) -> f64 {
        linalg::norm(&cube::field(self.mu, self.location.to_array()))
    }
}

fn pole(name: EquilibriumName, mu: f64, denom: f64) -> Result<f64> {
    if denom == 0.0 || !denom.is_finite() {
        Err(Error::Domain { name, mu })
    } else {
        Ok(denom)
    }
}

/// Closed-form location of a named equilibrium.
pub fn location(name: EquilibriumName, mu: f64) -> Result<CubeState> {
    use EquilibriumName::*;
    if let Some(v) = name.vertex() {
        return Ok(v);
    }
    let p = match name {
        A1 => CubeState::new((mu + 12.0) / pole(name, mu, mu - 14.0)?, 1.0, 1.0),
        A2 => CubeState::new((8.0 - mu) / pole(name, mu, 14.0 - mu)?, 0.0, 1.0),
        A3 => CubeState::new((12.0 - mu) / pole(name, mu, 14.0 - mu)?, 0.0, 0.0),
        A4 => CubeState::new((8.0 + mu) / pole(name, mu, mu - 14.0)?, 1.0, 0.0),
        B1 => {
            let d = pole(name, mu, 40.0 + mu)?;
            CubeState::new((15.0 + mu) / d, 0.0, 27.0 * (10.0 - mu) / (4.0 * d))
        }
        B2 => {
            let d = pole(name, mu, 86.0 + mu)?;
            CubeState::new((62.0 + mu) / d, -3.0 * (6.0 + mu) / (2.0 * d), 1.0)
        }
        B3 => {
            let d = pole(name, mu, 86.0 + mu)?;
            CubeState::new((38.0 + mu) / d, 5.0 * (10.0 - mu) / (2.0 * d), 0.0)
        }
        O => {
            let d = pole(name, mu, 7.0 * mu - 2014.0)?;
            CubeState::new((7.0 * mu - 1042.0) / d, 37.0 * (mu - 10.0) / d, 109.0 * (mu - 10.0) / (2.0 * d))
        }
        _ => unreachable!("vertices handled above"),
    };
    Ok(p)
}

/// All sixteen named equilibria at `mu`, formal ones flagged by `in_cube = false`.
/// Names whose closed form has a pole at `mu` are skipped.
pub fn closed_form_equilibria(mu: f64) -> Vec<Equilibrium> {
    EquilibriumName::ALL.iter().filter_map(|&n| Equilibrium::new(n, mu).ok()).collect()
}

/// Result of the multistart Newton search.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericEquilibria {
    pub points: Vec<CubeState>,
    /// Seeds that did not converge to an in-cube zero.
    pub dropped_seeds: usize,
}

/// Newton iterations from a uniform `density³` grid of seeds over the cube.
pub fn numeric_equilibria(mu: f64, density: usize) -> Result<NumericEquilibria> {
    if density < 2 {
        return Err(Error::InvalidArgument("grid density must be at least 2"));
    }
    let mut points: Vec<CubeState> = Vec::new();
    let mut dropped = 0;
    let step = 1.0 / (density - 1) as f64;
    for i in 0..density {
        for j in 0..density {
            for k in 0..density {
                let seed = [i as f64 * step, j as f64 * step, k as f64 * step];
                match newton(mu, seed) {
                    Some(p) => {
                        let p = CubeState::from(p);
                        if !points.iter().any(|q| q.distance(&p) < 1e-6) {
                            points.push(p);
                        }
                    }
                    None => dropped += 1,
                }
            }
        }
    }
    points.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)).then(a.z.total_cmp(&b.z)));
    Ok(NumericEquilibria { points, dropped_seeds: dropped })
}

fn newton(mu: f64, seed: [f64; 3]) -> Option<[f64; 3]> {
    let mut p = seed;
    for _ in 0..60 {
        let f = cube::field(mu, p);
        if linalg::norm(&f) < 1e-13 {
            break;
        }
        let j = cube::jacobian_at(mu, p);
        let dx = linalg::solve(&j, &f)?;
        p = linalg::sub(&p, &dx);
        if !p.iter().all(|c| c.is_finite() && c.abs() < 1e3) {
            return None;
        }
    }
    let res = linalg::norm(&cube::field(mu, p));
    let in_cube = p.iter().all(|c| *c >= -1e-9 && *c <= 1.0 + 1e-9);
    if res < 1e-10 && in_cube {
        Some(p.map(|c| c.clamp(0.0, 1.0)))
    } else {
        None
    }
}

/// Radicand of the in-face eigenvalue pair of a face equilibrium; the pair
/// is real when it is non-negative.
pub fn face_radicand(name: EquilibriumName, mu: f64) -> Result<f64> {
    let m2 = mu * mu;
    let m3 = m2 * mu;
    let m4 = m3 * mu;
    match name {
        EquilibriumName::B1 => {
            Ok(-7_052_310_000.0 + 1_872_624_000.0 * mu + 179_361_400.0 * m2 - 34_941_760.0 * m3 + 543_169.0 * m4)
        }
        EquilibriumName::B2 => Ok(259_862_416.0 + 40_284_768.0 * mu + 1_909_912.0 * m2 + 31_704.0 * m3 + 169.0 * m4),
        EquilibriumName::B3 => {
            Ok(-3_449_723_504.0 - 16_764_064.0 * mu + 27_270_168.0 * m2 + 906_392.0 * m3 + 6_889.0 * m4)
        }
        other => Err(Error::NoClosedForm(other)),
    }
}

/// `(a ± √r) · scale`, complex conjugate when `r < 0`.
fn radical_pair(a: f64, r: f64, scale: f64) -> [Complex64; 2] {
    if r >= 0.0 {
        let s = sqrt(r);
        [Complex64::new((a + s) * scale, 0.0), Complex64::new((a - s) * scale, 0.0)]
    } else {
        let s = sqrt(-r);
        [Complex64::new(a * scale, s * scale), Complex64::new(a * scale, -s * scale)]
    }
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Closed-form eigenvalues of a boundary equilibrium, sorted by descending
/// real part.
pub fn closed_form_eigenvalues(name: EquilibriumName, mu: f64) -> Result<[Complex64; 3]> {
    use EquilibriumName::*;
    let mut out = match name {
        V1 => [real(-10.0), real(27.0), real(12.0 - mu)],
        V2 => [real(-23.0), real(-14.0), real(8.0 - mu)],
        V3 => [real(6.0), real(38.0), real(-8.0 - mu)],
        V4 => [real(-34.0), real(10.0), real(-12.0 - mu)],
        V5 => [real(-27.0), real(2.0), real(10.0)],
        V6 => [real(6.0), real(6.0), real(31.0)],
        V7 => [real(-14.0), real(-16.0), real(22.0)],
        V8 => [real(-10.0), real(20.0), real(26.0)],
        A1 | A2 | A3 | A4 => {
            let d = pole(name, mu, mu - 14.0)?;
            let d2 = d * d;
            match name {
                A1 => [
                    real(-10.0 * (mu + 38.0) / d),
                    real(4.0 * (5.0 * mu + 281.0) / d),
                    real(-26.0 * (mu * mu - 2.0 * mu - 168.0) / d2),
                ],
                A2 => [
                    real(6.0 * (mu + 6.0) / d),
                    real((31.0 * mu - 110.0) / d),
                    real(-6.0 * (mu * mu - 22.0 * mu + 112.0) / d2),
                ],
                A3 => [
                    real(-27.0 * (mu - 10.0) / d),
                    real(10.0 * (mu - 10.0) / d),
                    real(-2.0 * (mu * mu - 26.0 * mu + 168.0) / d2),
                ],
                _ => [
                    real(-4.0 * (4.0 * mu + 241.0) / d),
                    real(-2.0 * (7.0 * mu + 122.0) / d),
                    real(-22.0 * (mu * mu - 6.0 * mu - 112.0) / d2),
                ],
            }
        }
        B1 => {
            let d = pole(name, mu, mu + 40.0)?;
            let r = face_radicand(name, mu)?;
            let [z, zb] = radical_pair(8700.0 - 11240.0 * mu + 937.0 * mu * mu, r, 1.0 / (8.0 * d * d));
            [real(37.0 * (mu - 10.0) / d), z, zb]
        }
        B2 => {
            let d = pole(name, mu, mu + 86.0)?;
            let r = face_radicand(name, mu)?;
            let [z, zb] = radical_pair(-8084.0 + 164.0 * mu + 3.0 * mu * mu, r, 3.0 / (2.0 * d * d));
            [real((95.0 * mu + 2938.0) / (2.0 * d)), z, zb]
        }
        B3 => {
            let d = pole(name, mu, mu + 86.0)?;
            let r = face_radicand(name, mu)?;
            let [z, zb] = radical_pair(-19436.0 + 892.0 * mu + 13.0 * mu * mu, r, 1.0 / (2.0 * d * d));
            [real(109.0 * (10.0 - mu) / (2.0 * d)), z, zb]
        }
        O => return Err(Error::NoClosedForm(O)),
    };
    out.sort_by(linalg::eigen_order);
    Ok(out)
}

/// Qualitative type of a rest point from its spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    StableNode,
    StableFocusNode,
    Saddle,
    SaddleFocus,
    UnstableNode,
    UnstableFocus,
    Nonhyperbolic,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::StableNode => "stable node",
            Stability::StableFocusNode => "stable focus-node",
            Stability::Saddle => "saddle",
            Stability::SaddleFocus => "saddle-focus",
            Stability::UnstableNode => "unstable node",
            Stability::UnstableFocus => "unstable focus",
            Stability::Nonhyperbolic => "nonhyperbolic",
        }
    }
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Eigenvalues, unit eigenvectors and classification at a rest point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenData {
    pub eigenvalues: [Complex64; 3],
    pub eigenvectors: [CVec3; 3],
    pub classification: Stability,
}

impl EigenData {
    /// Number of eigenvalues with positive real part.
    pub fn unstable_dimension(&self) -> usize {
        self.eigenvalues.iter().filter(|l| l.re > 0.0).count()
    }

    pub fn has_complex_pair(&self) -> bool {
        self.eigenvalues.iter().any(|l| l.im != 0.0)
    }
}

/// Squared separation below which a pair of eigenvalues counts as degenerate.
pub const DEGENERATE_PAIR_TOL: f64 = 1e-10;

/// Classifies a sorted spectrum with its eigenvectors.
pub fn classify(values: &[Complex64; 3], vectors: &[CVec3; 3]) -> Stability {
    let scale = values.iter().map(|v| linalg::cabs(*v)).fold(1.0, f64::max);
    if values.iter().any(|v| v.re.abs() <= 1e-12 * scale) {
        return Stability::Nonhyperbolic;
    }
    for i in 0..3 {
        for j in i + 1..3 {
            let gap = (values[i] - values[j]).norm_sqr();
            if gap < DEGENERATE_PAIR_TOL * scale * scale {
                let overlap: Complex64 = vectors[i].iter().zip(vectors[j].iter()).map(|(a, b)| a.conj() * b).sum();
                // a repeated eigenvalue with a full eigenspace stays a node
                if linalg::cabs(overlap) > 1e-6 {
                    return Stability::Nonhyperbolic;
                }
            }
        }
    }
    let positive = values.iter().filter(|v| v.re > 0.0).count();
    let complex = values.iter().any(|v| v.im != 0.0);
    match (positive, complex) {
        (0, false) => Stability::StableNode,
        (0, true) => Stability::StableFocusNode,
        (3, false) => Stability::UnstableNode,
        (3, true) => Stability::UnstableFocus,
        (_, false) => Stability::Saddle,
        (_, true) => Stability::SaddleFocus,
    }
}

/// Residual threshold accepted by [`eigen_analysis`].
pub const EQUILIBRIUM_RESIDUAL_TOL: f64 = 1e-8;

/// Numeric eigen data of the Jacobian at a rest point.
pub fn eigen_analysis(mu: f64, p: CubeState) -> Result<EigenData> {
    let residual = linalg::norm(&cube::field(mu, p.to_array()));
    if !(residual < EQUILIBRIUM_RESIDUAL_TOL) {
        return Err(Error::NotAnEquilibrium { residual });
    }
    let j = cube::jacobian(mu, p);
    let (eigenvalues, eigenvectors) = linalg::eigen_decomposition(&j);
    Ok(EigenData { eigenvalues, eigenvectors, classification: classify(&eigenvalues, &eigenvectors) })
}

/// Eigen data of a named equilibrium.
pub fn eigen_of(name: EquilibriumName, mu: f64) -> Result<EigenData> {
    eigen_analysis(mu, location(name, mu)?)
}

/// Parameter interval on which an equilibrium lies in the cube, with the
/// equilibrium it collides with at each finite endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExistenceInterval {
    pub lo: f64,
    pub lo_closed: bool,
    pub lo_partner: Option<EquilibriumName>,
    pub hi: f64,
    pub hi_closed: bool,
    pub hi_partner: Option<EquilibriumName>,
}

impl ExistenceInterval {
    pub fn contains(&self, mu: f64) -> bool {
        let above = if self.lo_closed { mu >= self.lo } else { mu > self.lo };
        let below = if self.hi_closed { mu <= self.hi } else { mu < self.hi };
        above && below
    }
}

impl fmt::Display for ExistenceInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { ']' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { '[' }
        )
    }
}

/// Existence interval of a named equilibrium within `[MU_MIN, MU_MAX]`.
pub fn existence_interval(name: EquilibriumName) -> ExistenceInterval {
    use EquilibriumName::*;
    let whole = ExistenceInterval {
        lo: MU_MIN,
        lo_closed: true,
        lo_partner: None,
        hi: MU_MAX,
        hi_closed: true,
        hi_partner: None,
    };
    match name {
        A1 => ExistenceInterval { hi: -12.0, hi_closed: false, hi_partner: Some(V4), ..whole },
        A2 => ExistenceInterval { hi: 8.0, hi_closed: false, hi_partner: Some(V2), ..whole },
        A4 => ExistenceInterval { hi: -8.0, hi_closed: false, hi_partner: Some(V3), ..whole },
        B1 => ExistenceInterval { lo: 110.0 / 31.0, lo_closed: false, lo_partner: Some(A2), ..whole },
        B2 => ExistenceInterval { lo_partner: Some(O), hi: -6.0, hi_closed: false, hi_partner: Some(A2), ..whole },
        B3 => ExistenceInterval { lo: -122.0 / 7.0, lo_closed: false, lo_partner: Some(A4), ..whole },
        O => ExistenceInterval {
            lo_closed: false,
            lo_partner: Some(B2),
            hi_closed: false,
            hi_partner: Some(A3),
            ..whole
        },
        _ => whole,
    }
}

/// Existence interval looked up by name.
pub fn existence_interval_by_name(name: &str) -> Result<ExistenceInterval> {
    Ok(existence_interval(name.parse()?))
}
