use polyrep_core::cube::{self, CubeState, MU_MAX, MU_MIN};
use polyrep_core::flow::{self, FlowOptions};
use polyrep_core::game::{self, PolymatrixGame, PrismState};
use proptest::prelude::*;

fn unit() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

fn mu() -> impl Strategy<Value = f64> {
    MU_MIN..=MU_MAX
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn general_field_conserves_group_mass(mu in mu(), x in unit(), y in unit(), z in unit()) {
        let g = game::family_matrix(mu);
        let s = game::embed(CubeState::new(x, y, z));
        let v = game::general_vector_field(&g, &s).unwrap();
        for r in g.groups() {
            prop_assert!(v[r].iter().sum::<f64>().abs() <= 1e-12);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences(mu in mu(), x in unit(), y in unit(), z in unit()) {
        let p = [x, y, z];
        let j = cube::jacobian_at(mu, p);
        let h = 1e-6;
        for c in 0..3 {
            let (mut a, mut b) = (p, p);
            a[c] += h;
            b[c] -= h;
            let (fa, fb) = (cube::field(mu, a), cube::field(mu, b));
            for r in 0..3 {
                let fd = (fa[r] - fb[r]) / (2.0 * h);
                prop_assert!((fd - j[r][c]).abs() <= 1e-6, "d{r}/d{c}: {fd} vs {}", j[r][c]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orbits_stay_in_cube(mu in mu(), x in unit(), y in unit(), z in unit()) {
        let tr = flow::integrate(mu, CubeState::new(x, y, z), 200.0, &FlowOptions::default()).unwrap();
        prop_assert!(tr.max_overshoot() <= flow::TOL_BOX);
        prop_assert!(tr.states.iter().all(|p| p.in_cube(flow::TOL_BOX)));
    }

    #[test]
    fn random_game_conserves_mass(
        payoff in proptest::collection::vec(-10.0..10.0f64, 25),
        raw in proptest::collection::vec(0.01..1.0f64, 5),
    ) {
        let g = PolymatrixGame::new(vec![2, 3], payoff).unwrap();
        let (a, b) = raw.split_at(2);
        let sa: f64 = a.iter().sum();
        let sb: f64 = b.iter().sum();
        let coords: Vec<f64> = a.iter().map(|c| c / sa).chain(b.iter().map(|c| c / sb)).collect();
        let v = game::general_vector_field(&g, &PrismState::new(coords)).unwrap();
        prop_assert!(v[..2].iter().sum::<f64>().abs() <= 1e-12);
        prop_assert!(v[2..].iter().sum::<f64>().abs() <= 1e-12);
    }
}

#[test]
fn embedded_field_projects_to_cube_field() {
    for mu in [-25.0, -3.0, 3.6, 9.0] {
        let g = game::family_matrix(mu);
        for p in [[0.2, 0.3, 0.4], [0.9, 0.1, 0.5], [0.5, 0.5, 0.5]] {
            let v = game::general_vector_field(&g, &game::embed(CubeState::from(p))).unwrap();
            let c = game::project_velocity(&g, &v).unwrap().to_array();
            let f = cube::field(mu, p);
            for i in 0..3 {
                assert!((c[i] - f[i]).abs() < 1e-12);
            }
        }
    }
}
