//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS line with its measured numbers (run with `--nocapture` to see
//! them). Tolerances are pinned in the asserts.

use std::time::Instant;

use iacount::{estimate_parallel, EstimatorKind};
use iacount_core::exact::{count_single_beam, derangement_count, two_regular_count};
use iacount_core::linalg::{
    commutation_matrix, kron, log_abs_det_sq, singular_values, ComplexMatrix,
};
use iacount_core::mc::{log_constant_square, McConfig};
use iacount_core::psi::{assemble_psi, Feasibility};
use iacount_core::sampling::{
    gaussian_matrix, sample_gaussian_point, sample_sphere_point, sample_stiefel_point, RngStream,
};
use iacount_core::scenario::parse_scenario;
use iacount_core::{feasibility_test, Scenario};
use num_traits::ToPrimitive;

fn exact_count(text: &str) -> u64 {
    count_single_beam(&parse_scenario(text).unwrap())
        .unwrap()
        .value
        .to_u64()
        .unwrap()
}

/// Criterion 1: exact single-beam counts reproduce the known table, fast.
#[test]
fn criterion_1_exact_single_beam_table() {
    let started = Instant::now();
    let m2: Vec<u64> = (3..=8)
        .map(|k| exact_count(&format!("(2x{},1)^{}", k - 1, k)))
        .collect();
    assert_eq!(m2, vec![2, 9, 44, 265, 1854, 14833], "M = 2 column");
    let m3: Vec<u64> = (3..=7)
        .map(|k| exact_count(&format!("(3x{},1)^{}", k - 2, k)))
        .collect();
    assert_eq!(m3, vec![1, 9, 216, 7570, 357_435], "M = 3 column");
    let m4: Vec<u64> = (4..=7)
        .map(|k| exact_count(&format!("(4x{},1)^{}", k - 3, k)))
        .collect();
    assert_eq!(m4, vec![1, 44, 7570, 1_975_560], "M = 4 column");
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 600, "took {elapsed:?}");
    println!(
        "acceptance criterion 1: PASS (15 exact table entries in {:.2}s)",
        elapsed.as_secs_f64()
    );
}

/// Criterion 1 stretch: the K = 8 entries of the M = 3 and M = 4 columns.
#[test]
#[ignore = "stretch target, minutes of runtime; run explicitly"]
fn criterion_1_stretch_k8() {
    let started = Instant::now();
    assert_eq!(exact_count("(3x6,1)^8"), 22_040_361);
    assert_eq!(exact_count("(4x5,1)^8"), 749_649_145);
    assert!(started.elapsed().as_secs() < 7200);
    println!(
        "acceptance criterion 1 (stretch): PASS (K=8 entries in {:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

/// Criterion 2: closed forms agree exactly with backtracking.
#[test]
fn criterion_2_closed_form_cross_checks() {
    for k in 3..=8usize {
        let table = count_single_beam(&parse_scenario(&format!("(2x{},1)^{}", k - 1, k)).unwrap())
            .unwrap()
            .value;
        let formula = derangement_count(k).unwrap().value;
        assert_eq!(table, formula, "derangements K = {k}");
    }
    for k in 5..=7usize {
        let table = count_single_beam(&parse_scenario(&format!("(3x{},1)^{}", k - 2, k)).unwrap())
            .unwrap()
            .value;
        let formula = two_regular_count(k).unwrap().value;
        assert_eq!(table, formula, "2-regular digraphs K = {k}");
    }
    println!("acceptance criterion 2: PASS (derangements K=3..8, 2-regular K=5..7, exact equality)");
}

/// Criterion 3: the square symmetric estimator reaches the known counts
/// within 10% at epsilon = 0.05 in at most 1e6 samples and 5 minutes.
#[test]
fn criterion_3_square_estimator_counts() {
    let cases = [("(2x2,1)^3", 2.0), ("(4x4,2)^3", 6.0), ("(6x6,3)^3", 20.0)];
    for (text, truth) in cases {
        let started = Instant::now();
        let sc = parse_scenario(text).unwrap();
        let cfg = McConfig {
            seed: 7,
            epsilon: 0.05,
            max_samples: 1_000_000,
            ..McConfig::default()
        };
        let est = estimate_parallel(&sc, &cfg, EstimatorKind::Square, 0, |_| {}).unwrap();
        let elapsed = started.elapsed();
        let rel = (est.mean - truth).abs() / truth;
        assert!(est.converged, "{text} did not converge");
        assert!(est.n <= 1_000_000, "{text} used {} samples", est.n);
        assert!(elapsed.as_secs() < 300, "{text} took {elapsed:?}");
        assert!(rel <= 0.10, "{text}: mean {} vs {truth} ({:.1}%)", est.mean, rel * 100.0);
        println!(
            "acceptance criterion 3: PASS {text} -> {:.3} (truth {truth}, err {:.2}%, n = {}, {:.2}s)",
            est.mean,
            rel * 100.0,
            est.n,
            elapsed.as_secs_f64()
        );
    }
}

/// Criterion 4: the general estimator reaches the known counts within 15%
/// at epsilon = 0.05 in at most 1e7 samples.
#[test]
fn criterion_4_general_estimator_counts() {
    let cases = [("(2x2,1)^3", 2.0), ("(3x3,1)^5", 216.0)];
    for (text, truth) in cases {
        let sc = parse_scenario(text).unwrap();
        let cfg = McConfig {
            seed: 42,
            epsilon: 0.05,
            max_samples: 10_000_000,
            ..McConfig::default()
        };
        let est = estimate_parallel(&sc, &cfg, EstimatorKind::General, 0, |_| {}).unwrap();
        let rel = (est.mean - truth).abs() / truth;
        assert!(est.converged, "{text} did not converge");
        assert!(est.n <= 10_000_000);
        assert!(rel <= 0.15, "{text}: mean {} vs {truth} ({:.1}%)", est.mean, rel * 100.0);
        println!(
            "acceptance criterion 4: PASS {text} -> {:.3} (truth {truth}, err {:.2}%, n = {})",
            est.mean,
            rel * 100.0,
            est.n
        );
    }
}

/// Criterion 5: the square-estimator constant is exactly 1 when N = 2d.
#[test]
fn criterion_5_unit_constant() {
    for text in ["(2x2,1)^3", "(4x4,2)^3"] {
        let sc = parse_scenario(text).unwrap();
        let log_c = log_constant_square(&sc).unwrap().log_value;
        assert!(log_c.abs() <= 1e-12, "{text}: log C = {log_c}");
        println!("acceptance criterion 5: PASS {text} (|log C| = {:.2e})", log_c.abs());
    }
}

/// Criterion 6: feasibility verdicts are stable over 50 seeds.
#[test]
fn criterion_6_feasibility_over_seeds() {
    let cases = [
        ("(3x3,2)^2", Feasibility::Infeasible),
        ("(2x2,1)^3", Feasibility::Feasible),
        ("(5x5,2)^4", Feasibility::Feasible),
    ];
    for (text, expected) in cases {
        let sc = parse_scenario(text).unwrap();
        for seed in 0..50 {
            let report = feasibility_test(&sc, seed);
            assert_eq!(report.verdict, expected, "{text} seed {seed}");
        }
        println!("acceptance criterion 6: PASS {text} -> {expected} on all 50 seeds");
    }
}

/// Criterion 7: the property suite at its stated tolerances.
#[test]
fn criterion_7_property_suite() {
    // vec/Kronecker identity on random triples.
    for seed in 0..20u64 {
        let mut rng = RngStream::new(800 + seed, 0).rng();
        let a = gaussian_matrix(3, 4, &mut rng);
        let x = gaussian_matrix(4, 2, &mut rng);
        let b = gaussian_matrix(2, 5, &mut rng);
        let left = a.mul(&x).mul(&b).vec_columns();
        let right = kron(&b.transpose(), &a).mul_vec(&x.vec_columns());
        let scale: f64 = left.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let err: f64 = left
            .iter()
            .zip(&right)
            .map(|(l, r)| (l - r).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-12 * scale, "vec identity seed {seed}");
    }

    // Commutation identity K vec(X) = vec(X^T) and orthogonality.
    for (m, n) in [(2usize, 2usize), (3, 5), (1, 4)] {
        let k_mn = commutation_matrix(m, n);
        let mut rng = RngStream::new(900, (m * 10 + n) as u64).rng();
        let x = gaussian_matrix(m, n, &mut rng);
        let lhs = k_mn.mul_vec(&x.vec_columns());
        let rhs = x.transpose().vec_columns();
        assert_eq!(lhs, rhs, "commutation ({m},{n})");
        let prod = commutation_matrix(n, m).mul(&k_mn);
        assert_eq!(prod, ComplexMatrix::identity(m * n));
    }

    // Jacobian linear-map oracle: 100 random point/direction pairs per
    // scenario, relative error <= 1e-10.
    for text in ["(2x2,1)^3", "(2x3,1)(3x2,1)(2x4,1)(2x2,1)", "(5x5,2)^4", "(3x3,1)^5"] {
        let sc = parse_scenario(text).unwrap();
        for trial in 0..100u64 {
            let point = sample_gaussian_point(&sc, RngStream::new(7000 + trial, trial));
            let psi = assemble_psi(&sc, &point).unwrap();
            let mut rng = RngStream::new(7500, trial).rng();
            let udots: Vec<ComplexMatrix> = sc
                .users()
                .iter()
                .map(|u| gaussian_matrix(u.rx - u.streams, u.streams, &mut rng))
                .collect();
            let vdots: Vec<ComplexMatrix> = sc
                .users()
                .iter()
                .map(|u| gaussian_matrix(u.tx - u.streams, u.streams, &mut rng))
                .collect();
            let mut x = Vec::new();
            for u in &udots {
                x.extend(u.vec_columns());
            }
            for v in &vdots {
                x.extend(v.vec_columns());
            }
            let via_psi = psi.matrix.mul_vec(&x);
            let direct = direct_map(&sc, &point, &udots, &vdots);
            let scale: f64 = direct.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let err: f64 = via_psi
                .iter()
                .zip(&direct)
                .map(|(p, d)| (p - d).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err <= 1e-10 * scale, "{text} trial {trial}");
        }
    }

    // Orthonormal frames to 1e-12, sphere norms to 1e-14.
    let sc = parse_scenario("(5x5,2)^4").unwrap();
    for seed in 0..20u64 {
        let point = sample_stiefel_point(&sc, RngStream::new(60, seed)).unwrap();
        for link in &point.blocks {
            let id = ComplexMatrix::identity(2);
            assert!(link.a.mul(&link.a.conj_transpose()).sub(&id).frobenius_norm() <= 1e-12);
            assert!(link.b.conj_transpose().mul(&link.b).sub(&id).frobenius_norm() <= 1e-12);
        }
        let point = sample_sphere_point(&sc, RngStream::new(61, seed));
        for idx in 0..sc.links().len() {
            let h = point.channel_matrix(&sc, idx);
            assert!((h.frobenius_norm() - 1.0).abs() <= 1e-14);
        }
    }

    // Deterministic replay, bitwise.
    let cfg = McConfig {
        seed: 31,
        epsilon: 0.05,
        max_samples: 50_000,
        ..McConfig::default()
    };
    let sc = parse_scenario("(2x2,1)^3").unwrap();
    let a = estimate_parallel(&sc, &cfg, EstimatorKind::Square, 1, |_| {}).unwrap();
    let b = estimate_parallel(&sc, &cfg, EstimatorKind::Square, 2, |_| {}).unwrap();
    assert_eq!(a.n, b.n);
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.state.sum.to_bits(), b.state.sum.to_bits());

    // log-determinant against the singular-value oracle.
    for seed in 0..20u64 {
        let mut rng = RngStream::new(62, seed).rng();
        let m = gaussian_matrix(6, 6, &mut rng);
        let ld = log_abs_det_sq(&m).unwrap().log_abs_det_sq;
        let via_svd: f64 = singular_values(&m).iter().map(|s| 2.0 * s.ln()).sum();
        assert!((ld - via_svd).abs() <= 1e-10 * ld.abs().max(1.0), "seed {seed}");
    }

    println!("acceptance criterion 7: PASS (vec/kron, commutation, jacobian oracle, frames, spheres, replay, log-det)");
}

fn direct_map(
    sc: &Scenario,
    point: &iacount_core::psi::ChannelPoint,
    udots: &[ComplexMatrix],
    vdots: &[ComplexMatrix],
) -> Vec<iacount_core::Complex64> {
    let mut out = Vec::new();
    for (&(k, l), blocks) in sc.links().iter().zip(&point.blocks) {
        let term = udots[k].transpose().mul(&blocks.b);
        let term2 = blocks.a.mul(&vdots[l]);
        let sum = ComplexMatrix::from_fn(term.rows(), term.cols(), |r, c| {
            term[(r, c)] + term2[(r, c)]
        });
        out.extend(sum.vec_columns());
    }
    out
}

/// Criterion 8: scenarios whose counts are beyond desk-scale accuracy
/// must still run cleanly in the log domain for 1e5 samples, produce a
/// positive finite estimate, and improve their relative standard error
/// over the run. One monster sample can bump the running error of these
/// heavy-tailed integrands upward for a while, so the requirement is that
/// the final decade beats every earlier decade checkpoint, not
/// sample-by-sample monotonicity (which no random sequence satisfies).
#[test]
fn criterion_8_large_scale_stability() {
    let cases = [
        ("(10x10,4)^4", EstimatorKind::Square),
        ("(3x9,2)^5", EstimatorKind::General),
        ("(4x8,2)^5", EstimatorKind::General),
        ("(5x7,2)^5", EstimatorKind::General),
        ("(6x6,2)^5", EstimatorKind::Square),
    ];
    for (text, kind) in cases {
        let sc = parse_scenario(text).unwrap();
        let cfg = McConfig {
            seed: 2,
            epsilon: 0.0,
            max_samples: 100_000,
            checkpoint_interval: 1_000,
            ..McConfig::default()
        };
        let mut decades = Vec::new();
        let est = estimate_parallel(&sc, &cfg, kind, 0, |t| {
            if t.n == 1_000 || t.n == 10_000 {
                decades.push(t.std_error_rel);
            }
        })
        .unwrap();
        assert_eq!(est.n, 100_000);
        assert!(
            est.mean.is_finite() && est.mean > 0.0,
            "{text}: mean {}",
            est.mean
        );
        assert!(est.log_mean.is_finite(), "{text}: log mean overflowed");
        assert!(est.state.sum.is_finite() && est.state.sum_sq.is_finite());
        let final_rel = est.std_error_rel;
        assert!(final_rel.is_finite());
        for (i, earlier) in decades.iter().enumerate() {
            assert!(
                final_rel < *earlier,
                "{text}: std error {final_rel} did not improve on decade {i} ({earlier})"
            );
        }
        println!(
            "acceptance criterion 8: PASS {text} (mean {:.4e}, std err {:.3} -> {:.3} -> {:.3} over 1e5 samples)",
            est.mean, decades[0], decades[1], final_rel
        );
    }
}
