//! Acceptance gate: the ten headline guarantees of the crate, each as one
//! test emitting a single pass line. Tolerances and runtime budgets are
//! asserted, not just printed; a red test here means the guarantee is not
//! met.

use std::time::Instant;

use frobenius_forge::catalog::{get_unfolding, LieType};
use frobenius_forge::esk::{self, fixtures};
use frobenius_forge::jacobi::{element_from_x_poly, JacobiRing};
use frobenius_forge::poly::{rat, rat_to_f64, MultiPoly};
use frobenius_forge::report::Verdict;
use frobenius_forge::saito::FrobeniusData;
use frobenius_forge::toda::{
    self, duality_constant, residue_gen_wdvv_residual, residue_tensor, sample_base_point,
    tensor_asymmetry, TodaModel,
};
use frobenius_forge::Error;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0xF40B;

fn build(n: usize) -> FrobeniusData {
    FrobeniusData::build(&get_unfolding(LieType::A, n).unwrap()).unwrap()
}

fn pass(line: &str) {
    println!("[PASS] {line}");
}

/// Flat coordinates have the triangular shape t_k = b_k + P_k(b_{>k}),
/// the metric is constant with the unit axiom holding exactly, and the
/// frozen rank-2/3 constants are reproduced. Budget: 10 s for ranks 1-5.
#[test]
fn criterion_01_polynomial_structure_is_exact() {
    let t0 = Instant::now();
    for n in 1..=5usize {
        let d = build(n);
        // Triangular flat-coordinate shape, exactly.
        for k in 0..n {
            let vars: Vec<&str> = d.flat.t_of_b[k]
                .variables()
                .iter()
                .map(|s| s.as_str())
                .collect();
            let mut exps = vec![0u32; n];
            exps[k] = 1;
            let bk = MultiPoly::monomial(&vars, &exps, rat(1, 1)).unwrap();
            let tail = d.flat.t_of_b[k].add(&bk.scale(&rat(-1, 1))).unwrap();
            for (mono, _) in tail.terms() {
                assert!(
                    mono.0[..=k].iter().all(|&e| e == 0),
                    "rank {n}: t_{} tail must only involve later base coordinates",
                    k + 1
                );
            }
        }
        // Unit axiom: contracting the c-tensor with the first flat field
        // returns the constant metric, as polynomials.
        let t_vars: Vec<String> = (1..=n).map(|i| format!("t{i}")).collect();
        let t_refs: Vec<&str> = t_vars.iter().map(|s| s.as_str()).collect();
        for i in 0..n {
            for j in 0..n {
                let expected = MultiPoly::constant(&t_refs, d.eta[(i, j)].clone());
                assert_eq!(d.c[0][i][j], expected, "rank {n}: c[1][{i}][{j}]");
            }
        }
    }
    // Frozen rank-2 constants: metric and prepotential.
    let d2 = build(2);
    assert_eq!(d2.eta[(0, 0)], rat(0, 1));
    assert_eq!(d2.eta[(0, 1)], rat(1, 3));
    assert_eq!(d2.eta[(1, 0)], rat(1, 3));
    assert_eq!(d2.eta[(1, 1)], rat(0, 1));
    let refs2 = ["t1", "t2"];
    let f2 = MultiPoly::monomial(&refs2, &[2, 1], rat(1, 6))
        .unwrap()
        .add(&MultiPoly::monomial(&refs2, &[0, 4], rat(-1, 216)).unwrap())
        .unwrap();
    assert_eq!(d2.prepotential, f2);
    // Frozen rank-3 constant: the first flat coordinate.
    let d3 = build(3);
    let refs3 = ["b1", "b2", "b3"];
    let t1 = MultiPoly::monomial(&refs3, &[1, 0, 0], rat(1, 1))
        .unwrap()
        .add(&MultiPoly::monomial(&refs3, &[0, 0, 2], rat(-1, 8)).unwrap())
        .unwrap();
    assert_eq!(d3.flat.t_of_b[0], t1);
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "budget exceeded: {elapsed:?}");
    pass(&format!(
        "criterion 1: exact flat structure, unit axiom, frozen rank-2/3 constants (ranks 1-5 in {:.2?})",
        elapsed
    ));
}

/// Associativity in exact rational arithmetic: zero residual at 20 random
/// rational points for ranks 2-5. Budget: 30 s.
#[test]
fn criterion_02_associativity_is_exactly_zero() {
    let t0 = Instant::now();
    for n in 2..=5usize {
        let d = build(n);
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let report = d.wdvv_check(20, &mut rng).unwrap();
        assert!(report.is_pass(), "rank {n}: {report:?}");
        assert_eq!(report.max_residual, Some(0.0), "rank {n}: must be exact");
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "budget exceeded: {elapsed:?}");
    pass(&format!(
        "criterion 2: associativity residual exactly 0 at 20 rational points, ranks 2-5 ({:.2?})",
        elapsed
    ));
}

/// Scaling symmetry as an exact polynomial identity, with the frozen
/// exponent sequence 6, 8, 10, 12, 14.
#[test]
fn criterion_03_scaling_identity_is_exact() {
    for n in 1..=5usize {
        let d = build(n);
        let report = d.euler_check().unwrap();
        assert!(report.is_pass(), "rank {n}: {report:?}");
        assert_eq!(report.max_residual, Some(0.0), "rank {n}: must be exact");
        assert_eq!(d.lambda, rat(2 * n as i64 + 4, 1), "rank {n}: exponent");
    }
    pass("criterion 3: scaling identity exact with exponents 6,8,10,12,14 (ranks 1-5)");
}

/// Generalized associativity of the chain prepotential: 100 seeded samples
/// per size, residual below 1e-9, sizes 2-6. Budget: 5 s.
#[test]
fn criterion_04_chain_generalized_associativity() {
    let t0 = Instant::now();
    for n in 2..=6usize {
        let model = TodaModel::new(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let report = model.gen_wdvv_check(100, 1e-9, &mut rng).unwrap();
        assert!(report.is_pass(), "n={n}: {report:?}");
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "budget exceeded: {elapsed:?}");
    pass(&format!(
        "criterion 4: chain generalized associativity < 1e-9, 100 samples each for n=2..6 ({:.2?})",
        elapsed
    ));
}

/// The special-coordinate metric is the constant (n+1)I - AllOnes within
/// 1e-10, and the weak Frobenius identity holds below 1e-6 at 10 points
/// for n <= 4 (with the rescaling vector treated as the position field).
#[test]
fn criterion_05_constant_metric_and_weak_frobenius_identity() {
    for n in 1..=4usize {
        let model = TodaModel::new(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let report = model.euler_metric_check(50, 1e-10, &mut rng).unwrap();
        assert!(report.is_pass(), "n={n}: {report:?}");

        let points: Vec<Vec<Complex64>> = (0..10).map(|_| model.sample_point(&mut rng)).collect();
        let field = |z: &[Complex64]| z.to_vec();
        let report =
            esk::fmanifold_identity_field_check(&model, &points, &field, 1e-4, 1e-6).unwrap();
        assert!(report.is_pass(), "n={n}: {report:?}");
    }
    pass("criterion 5: constant special metric < 1e-10 and weak Frobenius identity < 1e-6, n=1..4");
}

/// The spectral-curve residue tensor is symmetric (< 1e-10) and satisfies
/// generalized associativity (< 1e-8) at 20 generic base points, ranks 2-4.
#[test]
fn criterion_06_residue_tensor_symmetry_and_associativity() {
    for n in 2..=4usize {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for point in 0..20 {
            let (_, curve) = sample_base_point(n, &mut rng).unwrap();
            let tensor = residue_tensor(&curve).unwrap();
            let asym = tensor_asymmetry(&tensor);
            assert!(asym < 1e-10, "rank {n} point {point}: asymmetry {asym:e}");
            let res = residue_gen_wdvv_residual(&curve).unwrap();
            assert!(res < 1e-8, "rank {n} point {point}: residual {res:e}");
        }
    }
    pass("criterion 6: residue tensor symmetric < 1e-10 and associative < 1e-8, 20 points, ranks 2-4");
}

/// The fitted proportionality constant between the intersection form and
/// the chain metric is identical across 10 random base points within 1e-4
/// relative, for ranks 2 and 3.
#[test]
fn criterion_07_duality_constant_is_point_independent() {
    for n in 2..=3usize {
        let frob = build(n);
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let constants: Vec<Complex64> = (0..10)
            .map(|_| {
                let (b, _) = sample_base_point(n, &mut rng).unwrap();
                duality_constant(&frob, &b).unwrap()
            })
            .collect();
        let c0 = constants[0];
        for (i, c) in constants.iter().enumerate() {
            let rel = (c - c0).norm() / c0.norm();
            assert!(
                rel < 1e-4,
                "rank {n} point {i}: constant {c} vs {c0}, rel {rel:e}"
            );
        }
    }
    pass("criterion 7: duality constant stable across 10 base points within 1e-4 relative, ranks 2-3");
}

/// Every member of the metric pencil is flat: curvature below 1e-6 for
/// pencil parameters {0, 1, 2+i} at 5 admissible points, ranks 2-3.
#[test]
fn criterion_08_metric_pencil_is_flat() {
    let lambdas = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(2.0, 1.0),
    ];
    for n in 2..=3usize {
        let frob = build(n);
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let report = frob.flat_pencil_check(&lambdas, 5, 1e-6, &mut rng).unwrap();
        assert!(report.is_pass(), "rank {n}: {report:?}");
    }
    pass("criterion 8: pencil curvature < 1e-6 for parameters {0, 1, 2+i}, 5 points, ranks 2-3");
}

/// Closed forms agree with their independent oracles: chain third
/// derivatives vs finite differences (< 1e-5 relative, 50 samples) and the
/// exact residue pairing vs the numeric critical-point sum (< 1e-9
/// relative, 50 samples).
#[test]
fn criterion_09_closed_forms_match_oracles() {
    // Chain side.
    for n in 2..=3usize {
        let model = TodaModel::new(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let report = model.fd_oracle_check(50, 1e-5, 1e-5, &mut rng).unwrap();
        assert!(report.is_pass(), "n={n}: {report:?}");
    }
    // Ring side: exact coefficient-rule residue vs critical-point sum.
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut compared = 0usize;
    while compared < 50 {
        let n = 2 + (compared % 3); // ranks 2, 3, 4 round-robin
        let ring = JacobiRing::new(&get_unfolding(LieType::A, n).unwrap()).unwrap();
        let base = ring.sample_rational_base(&mut rng).unwrap();
        let draw = |rng: &mut ChaCha8Rng| -> Vec<BigRational> {
            (0..n)
                .map(|_| rat(rng.gen_range(-6i64..=6), rng.gen_range(1i64..=4)))
                .collect()
        };
        let u = element_from_x_poly(&ring, &draw(&mut rng)).unwrap();
        let v = element_from_x_poly(&ring, &draw(&mut rng)).unwrap();
        let exact = rat_to_f64(
            &ring
                .residue_pairing(&u, &v)
                .unwrap()
                .eval_exact(&base)
                .unwrap(),
        );
        let base_c: Vec<Complex64> = base
            .iter()
            .map(|r| Complex64::new(rat_to_f64(r), 0.0))
            .collect();
        let numeric = ring.pairing_by_critical_sum(&u, &v, &base_c).unwrap();
        // Conditioning-aware scale: the sum of magnitudes of the terms the
        // oracle adds up, so cancellation-heavy samples are judged fairly.
        let mut scale: f64 = 0.0;
        for &xc in &ring.critical_points(&base_c).unwrap() {
            let hess = ring.second_derivative_at(xc, &base_c).unwrap();
            scale += (u.eval(xc, &base_c).unwrap() * v.eval(xc, &base_c).unwrap() / hess).norm();
        }
        let rel = (numeric - Complex64::new(exact, 0.0)).norm() / scale.max(f64::MIN_POSITIVE);
        assert!(
            rel < 1e-9,
            "rank {n} sample {compared}: exact {exact}, numeric {numeric}, rel {rel:e}"
        );
        compared += 1;
    }
    pass("criterion 9: third-derivative oracle < 1e-5 (50 samples) and residue oracle < 1e-9 (50 samples)");
}

/// Negative controls: broken couplings fail the associativity and weak
/// Frobenius checks; degenerate rescaling vectors and degenerate families
/// surface as degenerate, never as a pass.
#[test]
fn criterion_10_negative_controls_fail_loudly() {
    let pts = vec![
        vec![
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.4, 0.2),
            Complex64::new(0.5, -0.3),
        ],
        vec![
            Complex64::new(1.1, -0.2),
            Complex64::new(0.7, 0.4),
            Complex64::new(-0.6, 0.1),
        ],
    ];
    let ones = vec![Complex64::new(1.0, 0.0); 3];

    // A symmetric but non-associative coupling must fail associativity.
    let coupled = fixtures::CoupledCubic { eps: 0.5 };
    let report = esk::associativity_check(&coupled, &pts, &ones, 1e-9).unwrap();
    assert_eq!(report.verdict, Verdict::Fail);
    assert!(report.max_residual.unwrap() > 1e-2);

    // A point-dependent coupling must fail the weak Frobenius identity.
    let quartic = fixtures::QuarticCoupling { delta: 0.4 };
    let report = esk::fmanifold_identity_check(&quartic, &pts, &ones, 1e-4, 1e-6).unwrap();
    assert_eq!(report.verdict, Verdict::Fail);
    assert!(report.max_residual.unwrap() > 1e-3);

    // A perturbed chain third-derivative tensor must fail generalized
    // associativity.
    let model = TodaModel::new(2).unwrap();
    let z = vec![Complex64::new(1.9, 0.1), Complex64::new(0.6, -0.2)];
    let mut mats = model.third_derivative_mats(&z).unwrap();
    let bump = Complex64::new(0.1, 0.0);
    mats[0][(0, 1)] += bump;
    mats[0][(1, 0)] += bump;
    mats[1][(0, 0)] += bump;
    let fe = model.f_e_matrix(&z).unwrap();
    let residual = toda::gen_wdvv_residual(&mats, &fe).unwrap();
    assert!(
        residual > 1e-3,
        "perturbation must be visible: {residual:e}"
    );

    // The zero rescaling vector gives a singular metric: degenerate error,
    // not a pass.
    let diagonal = fixtures::DiagonalCubic { n: 3 };
    let zero_v = vec![Complex64::new(0.0, 0.0); 3];
    match esk::associativity_check(&diagonal, &pts, &zero_v, 1e-9) {
        Err(Error::Degenerate(_)) => {}
        other => panic!("zero rescaling vector must be degenerate, got {other:?}"),
    }

    // A quadratic family has no invertible rescaling metric at all: the
    // detection probe must say so.
    let quadratic = fixtures::Quadratic { n: 3 };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let found = esk::find_nondegenerate_v(&quadratic, &pts[0], &mut rng, 10).unwrap();
    assert!(found.is_none(), "quadratic family must stay degenerate");

    pass("criterion 10: broken couplings fail, degenerate inputs report degenerate, never a false pass");
}
