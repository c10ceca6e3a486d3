//! General polymatrix replicator games and the coordinate maps between the
//! prism `Δ¹ × Δ¹ × Δ¹` and the cube.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::cube::CubeState;
use crate::{Error, Result};

/// Tolerance for simplex membership checks.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Group sizes plus a square, row-major block payoff matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PolymatrixGame {
    group_sizes: Vec<usize>,
    payoff: Vec<f64>,
}

impl PolymatrixGame {
    pub fn new(group_sizes: Vec<usize>, payoff: Vec<f64>) -> Result<Self> {
        if group_sizes.is_empty() {
            return Err(Error::InvalidGame("at least one group is required".into()));
        }
        if group_sizes.contains(&0) {
            return Err(Error::InvalidGame("group sizes must be positive".into()));
        }
        let n: usize = group_sizes.iter().sum();
        if payoff.len() != n * n {
            return Err(Error::InvalidGame(format!(
                "payoff has {} entries, expected {}x{} = {}",
                payoff.len(),
                n,
                n,
                n * n
            )));
        }
        if payoff.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGame("payoff entries must be finite".into()));
        }
        Ok(Self { group_sizes, payoff })
    }

    pub fn group_sizes(&self) -> &[usize] {
        &self.group_sizes
    }

    /// Total number of strategies, the side of the payoff matrix.
    pub fn dim(&self) -> usize {
        self.group_sizes.iter().sum()
    }

    pub fn payoff(&self) -> &[f64] {
        &self.payoff
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.payoff[row * self.dim() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let n = self.dim();
        &self.payoff[row * n..(row + 1) * n]
    }

    /// Index ranges of the groups.
    pub fn groups(&self) -> impl Iterator<Item = core::ops::Range<usize>> + '_ {
        self.group_sizes.iter().scan(0, |start, &n| {
            let r = *start..*start + n;
            *start += n;
            Some(r)
        })
    }

    /// The block `P^{α,β}` as a row-major vector.
    pub fn block(&self, alpha: usize, beta: usize) -> Option<Vec<f64>> {
        let ranges: Vec<_> = self.groups().collect();
        let (ra, rb) = (ranges.get(alpha)?, ranges.get(beta)?);
        Some(ra.clone().flat_map(|i| rb.clone().map(move |j| (i, j))).map(|(i, j)| self.entry(i, j)).collect())
    }

    fn is_prism_222(&self) -> bool {
        self.group_sizes == [2, 2, 2]
    }
}

/// A point of a product of simplices.
#[derive(Debug, Clone, PartialEq)]
pub struct PrismState {
    pub coords: Vec<f64>,
}

impl PrismState {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    /// Checks non-negativity and unit mass of every group.
    pub fn validate(&self, group_sizes: &[usize]) -> Result<()> {
        let n: usize = group_sizes.iter().sum();
        if self.coords.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.coords.len() });
        }
        let mut start = 0;
        for (g, &size) in group_sizes.iter().enumerate() {
            let part = &self.coords[start..start + size];
            let sum: f64 = part.iter().sum();
            let min = part.iter().copied().fold(f64::INFINITY, f64::min);
            if (sum - 1.0).abs() > SIMPLEX_TOL || min < -SIMPLEX_TOL {
                return Err(Error::SimplexViolation { group: g, sum, min });
            }
            start += size;
        }
        Ok(())
    }
}

/// Payoff matrix of the one-parameter family.
pub fn family_matrix(mu: f64) -> PolymatrixGame {
    #[rustfmt::skip]
    let payoff = vec![
        mu,    14.0, -10.0,  10.0, -2.0, 2.0,
        0.0,    0.0,   0.0,   0.0,  0.0, 0.0,
        10.0, -10.0,   2.0,  -2.0, -2.0, 2.0,
        0.0,    0.0,   0.0,   0.0,  0.0, 0.0,
        -25.0, 29.0,   0.0, -11.0, -2.0, 2.0,
        0.0,    0.0,   0.0,   0.0,  0.0, 0.0,
    ];
    PolymatrixGame { group_sizes: vec![2, 2, 2], payoff }
}

/// Polymatrix replicator field `ẋ_i = x_i((Px)_i − Σ_{j∈α} x_j (Px)_j)` where
/// `α` is the group of `i`.
pub fn general_vector_field(game: &PolymatrixGame, s: &PrismState) -> Result<Vec<f64>> {
    let n = game.dim();
    if s.coords.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: s.coords.len() });
    }
    s.validate(game.group_sizes())?;
    let x = &s.coords;
    let px: Vec<f64> = (0..n).map(|i| game.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect();
    let mut out = vec![0.0; n];
    for range in game.groups() {
        let mean: f64 = range.clone().map(|j| x[j] * px[j]).sum();
        for i in range {
            out[i] = x[i] * (px[i] - mean);
        }
    }
    Ok(out)
}

/// Maps `(x, y, z)` to `(1-x, x, 1-y, y, 1-z, z)`.
pub fn embed(p: CubeState) -> PrismState {
    PrismState::new(vec![1.0 - p.x, p.x, 1.0 - p.y, p.y, 1.0 - p.z, p.z])
}

/// Inverse of [`embed`] on the `(2,2,2)` prism.
pub fn project(s: &PrismState) -> Result<CubeState> {
    s.validate(&[2, 2, 2])?;
    Ok(CubeState::new(s.coords[1], s.coords[3], s.coords[5]))
}

/// Reads the cube velocity off a prism velocity (second strategy of each group).
pub fn project_velocity(game: &PolymatrixGame, v: &[f64]) -> Result<CubeState> {
    if !game.is_prism_222() {
        return Err(Error::UnsupportedShape);
    }
    if v.len() != 6 {
        return Err(Error::DimensionMismatch { expected: 6, found: v.len() });
    }
    Ok(CubeState::new(v[1], v[3], v[5]))
}

/// Projects a prism state of `game` to the cube; only `(2,2,2)` games reduce.
pub fn project_for(game: &PolymatrixGame, s: &PrismState) -> Result<CubeState> {
    if !game.is_prism_222() {
        return Err(Error::UnsupportedShape);
    }
    project(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube;

    #[test]
    fn family_rows() {
        let g = family_matrix(0.0);
        assert_eq!(g.row(0), &[0.0, 14.0, -10.0, 10.0, -2.0, 2.0]);
        let g = family_matrix(10.0);
        assert_eq!(g.entry(0, 0), 10.0);
        for mu in [-30.0, 0.0, 7.0] {
            let g = family_matrix(mu);
            for r in [1, 3, 5] {
                assert!(g.row(r).iter().all(|v| *v == 0.0));
            }
        }
    }

    #[test]
    fn embed_vertices() {
        assert_eq!(embed(CubeState::new(0.0, 0.0, 0.0)).coords, vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        assert_eq!(embed(CubeState::new(1.0, 1.0, 1.0)).coords, vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0]);
        let p = CubeState::new(0.2, 0.7, 0.9);
        let back = project(&embed(p)).unwrap();
        assert!(back.distance(&p) < 1e-15);
    }

    #[test]
    fn project_rejects_bad_states() {
        let s = PrismState::new(vec![0.5, 0.6, 1.0, 0.0, 1.0, 0.0]);
        assert!(matches!(project(&s), Err(Error::SimplexViolation { group: 0, .. })));
        let s = PrismState::new(vec![1.0, 0.0, 1.0, 0.0]);
        assert!(matches!(project(&s), Err(Error::DimensionMismatch { .. })));
        let g = PolymatrixGame::new(vec![3, 2], vec![0.0; 25]).unwrap();
        let s = PrismState::new(vec![0.2, 0.3, 0.5, 0.5, 0.5]);
        assert_eq!(project_for(&g, &s), Err(Error::UnsupportedShape));
    }

    #[test]
    fn game_validation() {
        assert!(PolymatrixGame::new(vec![2, 2], vec![0.0; 15]).is_err());
        assert!(PolymatrixGame::new(vec![2, 0], vec![0.0; 4]).is_err());
        assert!(PolymatrixGame::new(vec![], vec![]).is_err());
        let g = PolymatrixGame::new(vec![1, 2], (0..9).map(f64::from).collect()).unwrap();
        assert_eq!(g.block(1, 0).unwrap(), vec![3.0, 6.0]);
        assert_eq!(g.block(0, 1).unwrap(), vec![1.0, 2.0]);
        assert!(g.block(2, 0).is_none());
    }

    #[test]
    fn vertices_are_rest_points() {
        let g = family_matrix(-4.0);
        for k in 0..8 {
            let p = CubeState::new((k >> 2 & 1) as f64, (k >> 1 & 1) as f64, (k & 1) as f64);
            let v = general_vector_field(&g, &embed(p)).unwrap();
            assert!(v.iter().all(|c| *c == 0.0));
        }
    }

    #[test]
    fn dimension_mismatch() {
        let g = family_matrix(0.0);
        let s = PrismState::new(vec![1.0, 0.0]);
        assert!(matches!(general_vector_field(&g, &s), Err(Error::DimensionMismatch { expected: 6, found: 2 })));
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn reduction_matches_cube_field(
            mu in cube::MU_MIN..cube::MU_MAX, x in 0.0..1.0f64, y in 0.0..1.0f64, z in 0.0..1.0f64
        ) {
            let g = family_matrix(mu);
            let p = CubeState::new(x, y, z);
            let v = general_vector_field(&g, &embed(p)).unwrap();
            let reduced = project_velocity(&g, &v).unwrap();
            let direct = cube::vector_field(mu, p);
            prop_assert!(reduced.distance(&direct) < 1e-12);
        }

        #[test]
        fn group_mass_is_conserved(
            a in proptest::collection::vec(0.0..1.0f64, 5), m in -5.0..5.0f64
        ) {
            let payoff: Vec<f64> = (0..25).map(|k| m * ((k * 7 % 11) as f64 - 5.0)).collect();
            let g = PolymatrixGame::new(vec![3, 2], payoff).unwrap();
            let s1 = a[0] + a[1] + a[2] + 1e-3;
            let s2 = a[3] + a[4] + 1e-3;
            let coords = vec![
                (a[0] + 1e-3) / s1, a[1] / s1, a[2] / s1,
                (a[3] + 1e-3) / s2, a[4] / s2,
            ];
            let mut s = PrismState::new(coords);
            // exact unit mass in the last slot of each group
            s.coords[2] = 1.0 - s.coords[0] - s.coords[1];
            s.coords[4] = 1.0 - s.coords[3];
            prop_assume!(s.coords.iter().all(|c| *c >= 0.0));
            let v = general_vector_field(&g, &s).unwrap();
            prop_assert!((v[0] + v[1] + v[2]).abs() < 1e-12);
            prop_assert!((v[3] + v[4]).abs() < 1e-12);
        }
    }
}
