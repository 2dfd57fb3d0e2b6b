use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use egn_bounds::enip::standard_egn_spec;
use egn_bounds::geometry::{height, robustness, tetra_sign, trace_distance_measure, triple_of};
use egn_bounds::optimize::{rotated_triple, rotated_triple_heisenberg, Objective};
use egn_bounds::oracles::{
    random_physical_triples, robustness_feasible, robustness_lp_oracle, robustness_witness, OracleConfig,
};
use egn_bounds::state::{apply_local_unitary, ghz, random_state};
use egn_bounds::{optimize, EgnTriple, LocalUnitaryParams, OptimizeConfig};

fn pauli(k: u8) -> Matrix2<Complex64> {
    let (o, z, i) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0));
    match k {
        1 => Matrix2::new(z, o, o, z),
        2 => Matrix2::new(z, -i, i, z),
        _ => Matrix2::new(o, z, z, -o),
    }
}

fn random_angles(rng: &mut ChaCha8Rng) -> [f64; 3] {
    use std::f64::consts::PI;
    [rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI)]
}

#[test]
fn state_and_operator_rotations_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..100 {
        let n = 2 + case % 4;
        let rho = random_state(n, 500 + case as u64).unwrap();
        let params = if case % 2 == 0 {
            LocalUnitaryParams::symmetric(n, random_angles(&mut rng))
        } else {
            LocalUnitaryParams::per_qubit((0..n).map(|_| random_angles(&mut rng)).collect()).unwrap()
        };
        let a = rotated_triple(&rho, &params).unwrap().as_array();
        let b = rotated_triple_heisenberg(&rho, &params).unwrap().as_array();
        for k in 0..3 {
            assert!((a[k] - b[k]).abs() < 1e-12, "case {case}: {a:?} vs {b:?}");
        }
    }
}

#[test]
fn optimizer_absorbs_uniform_pauli_frames() {
    let config = OptimizeConfig::default();
    for n in [3, 4, 5] {
        for seed in 0..2 {
            let base = ghz(n).unwrap().mix(&random_state(n, seed).unwrap(), 0.8).unwrap();
            let reference = optimize(&base, &config).unwrap().abs_sum;
            for k in 1..=3 {
                let flipped = apply_local_unitary(&base, &vec![pauli(k); n]).unwrap();
                let got = optimize(&flipped, &config).unwrap().abs_sum;
                assert!((got - reference).abs() < 1e-6, "N={n} seed={seed} σ{k}: {got} vs {reference}");
            }
        }
    }
}

#[test]
fn reports_never_inflate_and_per_qubit_dominates() {
    for n in [3, 4] {
        let rho = ghz(n).unwrap().mix(&random_state(n, 9).unwrap(), 0.7).unwrap();
        let sym = optimize(&rho, &OptimizeConfig { grid: 12, ..OptimizeConfig::default() }).unwrap();
        let per = optimize(&rho, &OptimizeConfig { grid: 12, per_qubit: true, ..OptimizeConfig::default() }).unwrap();
        assert!(per.abs_sum >= sym.abs_sum - 1e-12, "{} < {}", per.abs_sum, sym.abs_sum);
        for report in [&sym, &per] {
            assert!((report.abs_sum - (2.0 * report.height + 1.0)).abs() < 1e-12);
            let again = rotated_triple(&rho, &report.best_params).unwrap();
            assert!((again.abs_sum() - report.abs_sum).abs() < 1e-10);
            for (&m, b) in &report.per_m {
                assert_eq!(b.robustness, robustness(&report.best_triple, m).unwrap());
                assert_eq!(b.trace_distance, trace_distance_measure(&report.best_triple, m).unwrap());
            }
        }
    }
}

#[test]
fn even_distance_objective_is_reported() {
    let rho = ghz(4).unwrap();
    let report =
        optimize(&rho, &OptimizeConfig { objective: Objective::EvenDistance, ..OptimizeConfig::default() }).unwrap();
    assert_eq!(report.objective, Objective::EvenDistance);
    assert!(report.per_m[&4].robustness > 0.0);
}

/// Random frames never beat the optimizer's bound on GHZ states.
#[test]
fn bound_is_a_maximum_over_frames() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [3, 5] {
        let rho = ghz(n).unwrap();
        let best = optimize(&rho, &OptimizeConfig::default()).unwrap().per_m[&n].robustness;
        let projection = standard_egn_spec(n).unwrap();
        let mut values = Vec::new();
        for _ in 0..20 {
            let params = LocalUnitaryParams::per_qubit((0..n).map(|_| random_angles(&mut rng)).collect()).unwrap();
            let rotated = apply_local_unitary(&rho, &params.unitaries()).unwrap();
            let t = triple_of(&projection.group_average(&rotated).unwrap()).unwrap();
            let r = robustness(&t, n).unwrap();
            assert!(r <= best + 1e-9, "{r} > {best}");
            values.push(r);
        }
        assert!(values.iter().any(|&v| (v - values[0]).abs() > 1e-6), "values do not vary");
    }
}

#[test]
fn lp_witness_sits_on_the_opposite_face() {
    let config = OracleConfig::default();
    for n in [3, 5, 7] {
        let s = tetra_sign(n);
        let mut checked = 0;
        for t in random_physical_triples(n, 77 + n as u64, 60) {
            let pulled = t.as_array().map(|v| 0.8 * s + 0.2 * v);
            let t = EgnTriple::from_array(pulled, n);
            if height(&t) <= 0.05 {
                continue;
            }
            let e = robustness_witness(&t, &config).unwrap().expect("positive robustness has a witness");
            let sum: f64 = e.iter().sum();
            assert!((sum + s).abs() < 1e-4, "N={n} {t:?}: e = {e:?}");
            checked += 1;
        }
        assert!(checked >= 30);
    }
}

#[test]
fn lp_feasibility_is_monotone_and_matches_closed_form() {
    let config = OracleConfig::default();
    for n in [3, 4, 5, 6] {
        for t in random_physical_triples(n, 31, 40) {
            let r = robustness_lp_oracle(&t, n, &config).unwrap();
            assert!((r - robustness(&t, n).unwrap()).abs() < 1e-6);
            for s in [0.0, 0.2, 0.5, 1.0, 1.7] {
                if robustness_feasible(&t, s, &config) {
                    assert!(robustness_feasible(&t, s + 0.01, &config), "N={n} s={s} {t:?}");
                }
            }
        }
    }
}
