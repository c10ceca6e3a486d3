use polyrep_core::bifurcation::{self, CaseLabel, EventKind};
use polyrep_core::cube::{CubeState, MU_MAX, MU_MIN};
use polyrep_core::equilibria::EquilibriumName;
use polyrep_core::flow::{self, OmegaVerdict, Section};
use polyrep_core::geometry;

#[test]
fn transcritical_and_hopf_values() {
    let r = bifurcation::scan(MU_MIN, MU_MAX, 0.01, 1e-10).unwrap();
    let tc: Vec<f64> = r.of_kind(EventKind::Transcritical).map(|e| e.mu_star).collect();
    let expected = [-122.0 / 7.0, -12.0, -8.0, -6.0, 110.0 / 31.0, 8.0];
    assert_eq!(tc.len(), expected.len());
    for (a, b) in tc.iter().zip(expected) {
        assert!((a - b).abs() < 1e-6);
    }
    let hopf: Vec<f64> = r.of_kind(EventKind::Hopf).map(|e| e.mu_star).collect();
    assert!((hopf[0] + 18.1623).abs() < 5e-4 && (hopf[1] - 9.5055).abs() < 5e-4);
    let bel = r.of_kind(EventKind::Belyakov).find(|e| e.equilibrium == EquilibriumName::O).unwrap();
    assert!((bel.mu_star + 30.5550).abs() < 5e-4);
}

#[test]
fn case_table() {
    let t = bifurcation::interior_thresholds(1e-12).unwrap();
    let reps = [
        (-30.8, CaseLabel::I1),
        (-25.0, CaseLabel::I2),
        (-17.5, CaseLabel::I3),
        (-14.0, CaseLabel::II),
        (-10.0, CaseLabel::III),
        (-7.0, CaseLabel::IV),
        (0.0, CaseLabel::V),
        (5.0, CaseLabel::VI),
        (9.0, CaseLabel::VII1),
        (9.8, CaseLabel::VII2),
    ];
    for (mu, label) in reps {
        assert_eq!(bifurcation::classify_case_with(mu, &t).unwrap(), label, "{mu}");
    }
    for (b, _) in bifurcation::case_boundaries(&t) {
        assert!(bifurcation::classify_case_with(b, &t).is_err());
    }
}

#[test]
fn cycle_at_minus_fourteen_matches_return_map() {
    let mu = -14.0;
    let o = polyrep_core::equilibria::location(EquilibriumName::O, mu).unwrap();
    let start = CubeState::new(o.x, o.y, o.z + 1e-3);
    let report = flow::classify_omega_limit(mu, start, 2000.0).unwrap();
    let OmegaVerdict::Periodic { period, .. } = report.verdict else { panic!("{:?}", report.verdict) };
    let map = geometry::poincare_map(mu, &Section::default_for(mu).unwrap(), start, 20, 500.0, 5000.0).unwrap();
    assert!(map.max_plane_residual() < 1e-8);
    assert_eq!(geometry::count_clusters(&map.points[10..], 1e-6), 1);
    let rt = map.return_times();
    let last = &rt[rt.len() - 5..];
    let mean = last.iter().sum::<f64>() / 5.0;
    let var = last.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / 5.0;
    assert!(var / (mean * mean) < 1e-3);
    let t = bifurcation::interior_thresholds(1e-12).unwrap();
    let h = bifurcation::hopf_cycle_check(t.hopf1, mu - t.hopf1, 3000.0).unwrap();
    let bifurcation::CycleVerdict::Cycle { period: hp, .. } = h.verdict else { panic!("{:?}", h.verdict) };
    assert!((hp - mean).abs() < 0.01 * mean && (period - mean).abs() < 0.01 * mean);
}

#[test]
fn stable_branch_sources() {
    let pattern = |mu: f64| {
        let [a, b] = geometry::trace_stable(mu, 300.0).unwrap();
        let mut v = [a.verdict.equilibrium(), b.verdict.equilibrium()];
        v.sort();
        v
    };
    use EquilibriumName::{V3, V6};
    assert_eq!(pattern(-20.0), [Some(V3), Some(V6)]);
    assert_eq!(pattern(-10.0), [Some(V3), Some(V6)]);
    assert_eq!(pattern(0.0), [Some(V6), Some(V6)]);
    assert_eq!(pattern(9.8), [Some(V6), Some(V6)]);
}

#[test]
fn seed_radius_halving_keeps_verdicts() {
    for mu in [-20.0, 0.0] {
        let a = geometry::trace_stable_with(mu, 300.0, geometry::SEED_RADIUS).unwrap();
        let b = geometry::trace_stable_with(mu, 300.0, geometry::SEED_RADIUS / 2.0).unwrap();
        for k in 0..2 {
            assert_eq!(a[k].verdict.equilibrium(), b[k].verdict.equilibrium());
        }
    }
    let h1 = geometry::heteroclinic_probe_with(-20.0, EquilibriumName::V3, EquilibriumName::O, 1e-3, 200.0, 16, 1e-5)
        .unwrap();
    let h2 = geometry::heteroclinic_probe_with(-20.0, EquilibriumName::V3, EquilibriumName::O, 1e-3, 200.0, 16, 5e-6)
        .unwrap();
    assert!(h1.hit && h2.hit);
}

#[test]
fn unstable_traces_reach_cycle_in_first_window() {
    let traces = geometry::trace_unstable(-17.5, 8, 500.0).unwrap();
    assert_eq!(traces.len(), 8);
    assert!(traces.iter().all(|t| t.verdict.label() == "cycle"));
    assert!(traces.iter().all(|t| t.seed_offset.iter().map(|c| c * c).sum::<f64>().sqrt() <= 1.0000001e-5));
}

#[test]
fn heteroclinic_hits_and_misses() {
    assert!(geometry::heteroclinic_probe(-20.0, "v3", "O", 1e-3, 200.0).unwrap().hit);
    assert!(!geometry::heteroclinic_probe(-20.0, "v3", "v8", 1e-3, 200.0).unwrap().hit);
    assert!(geometry::heteroclinic_probe(-20.0, "v9", "O", 1e-3, 200.0).is_err());
    let e = geometry::edge_closure_probe(5.0, "v5", "v6", "B1", 1e-4, 1e-3, 200.0).unwrap();
    assert!(e.hit, "{e:?}");
}

#[test]
fn proximity_is_smaller_in_chaotic_regime() {
    let near = geometry::homoclinic_proximity(3.6, &Section::default_for(3.6).unwrap()).unwrap();
    let far = geometry::homoclinic_proximity(-17.0, &Section::default_for(-17.0).unwrap()).unwrap();
    assert!(near.distance > 0.0 && near.distance.is_finite());
    assert!(near.distance * 10.0 <= far.distance);
}
