use polyrep_core::cube::{self, MU_MAX, MU_MIN};
use polyrep_core::equilibria::{self, EquilibriumName, Stratum};
use polyrep_core::{linalg, Complex64};

fn multiset_error(a: &[Complex64; 3], b: &[Complex64; 3]) -> f64 {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    PERMS.iter().map(|p| (0..3).map(|i| (a[i] - b[p[i]]).norm()).fold(0.0, f64::max)).fold(f64::INFINITY, f64::min)
}

#[test]
fn boundary_eigenvalues_match_numeric_jacobian() {
    let n = 200;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for k in 0..n {
        let mu = MU_MIN + (MU_MAX - MU_MIN) * k as f64 / (n - 1) as f64;
        for name in EquilibriumName::ALL {
            if name.stratum() == Stratum::Interior {
                continue;
            }
            let (Ok(p), Ok(cf)) = (equilibria::location(name, mu), equilibria::closed_form_eigenvalues(name, mu))
            else {
                continue;
            };
            let num = linalg::eigenvalues(&cube::jacobian(mu, p));
            let err = multiset_error(&num, &cf);
            assert!(err <= 1e-8, "{name} at {mu}: {num:?} vs {cf:?}");
            worst = worst.max(err);
            checked += 1;
        }
    }
    assert!(checked > 15 * n / 2, "only {checked} checks");
    assert!(worst < 1e-8);
}

#[test]
fn closed_form_locations_are_zeros() {
    for k in 0..50 {
        let mu = MU_MIN + 0.1 + (MU_MAX - MU_MIN - 0.2) * k as f64 / 49.0;
        for e in equilibria::closed_form_equilibria(mu) {
            let size = e.location.to_array().iter().fold(1.0f64, |m, c| m.max(c.abs()));
            assert!(e.residual() < 1e-12 * size * size * size, "{} at {mu}", e.name);
        }
    }
}

#[test]
fn numeric_finder_recovers_in_cube_equilibria() {
    for mu in [-25.0, -20.0, -14.0, -7.0, 0.0, 3.6, 6.5, 9.8] {
        let found = equilibria::numeric_equilibria(mu, 10).unwrap();
        let known: Vec<_> = equilibria::closed_form_equilibria(mu).into_iter().filter(|e| e.in_cube).collect();
        assert_eq!(found.points.len(), known.len(), "count at {mu}");
        for e in &known {
            assert!(found.points.iter().any(|p| p.distance(&e.location) < 1e-8), "{} at {mu}", e.name);
        }
    }
}

#[test]
fn in_cube_count_at_minus_twenty() {
    let inside: Vec<_> =
        equilibria::closed_form_equilibria(-20.0).into_iter().filter(|e| e.in_cube).map(|e| e.name).collect();
    assert_eq!(inside.len(), 14);
    assert!(inside.contains(&EquilibriumName::B2));
    assert!(!inside.contains(&EquilibriumName::B1) && !inside.contains(&EquilibriumName::B3));
}
