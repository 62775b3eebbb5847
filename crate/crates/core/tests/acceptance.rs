//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line with
//! the measured quantities, then asserts.
//!
//! Run with `cargo test --release -p btq-core --test acceptance -- --nocapture`.

mod common;

use std::time::{Duration, Instant};

use btq::geometry::{make_rule, C1Ordering};
use btq::hilbert::{basis_eval_grid, coherent_state, dimension, kernel_density};
use btq::lab::{
    calibrate, coherent_run, default_window, cross_check, fit_rate, thm1_run, thm2_defect, thm2_run, thm3_run_with, tuynman_defect,
    ConvergenceRow, LabSettings,
};
use btq::operators::{commutator, prequantum, toeplitz, toeplitz_auto, toeplitz_exact, toeplitz_with};
use btq::symbol::{c1, parse, poisson_bracket, sup_norm, sup_norm_point, Symbol};
use btq::{Complex64, Execution, SpherePoint};
use common::{random_integer_symbol, random_point, random_real_symbol};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_611;

fn verdict(n: u32, pass: bool, detail: String) {
    println!("criterion {n}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} failed: {detail}");
}

fn sequential() -> LabSettings {
    LabSettings::default().with_execution(Execution::Sequential)
}

fn in_band(x: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&x)
}

#[test]
fn criterion_01_oracle_equivalence() {
    let start = Instant::now();
    let settings = sequential();
    let mut worst = 0.0f64;
    for f in ["x1", "x2", "x3", "x3^2", "x1*x2", "x1^2"] {
        let f = parse(f).unwrap();
        for m in [1, 2, 4, 8, 16, 32, 64] {
            worst = worst.max(cross_check(&f, m, &settings).unwrap());
        }
    }
    let elapsed = start.elapsed();
    verdict(
        1,
        worst <= 1e-10 && elapsed < Duration::from_secs(60),
        format!("max entry defect {worst:.3e}, {:.2} s sequential", elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_02_norm_limit_exact_family() {
    let mut worst = 0.0f64;
    for m in 1..=128u32 {
        let n = toeplitz_auto(&Symbol::x3(), m).unwrap().operator_norm();
        let mf = m as f64;
        worst = worst.max((n - mf / (mf + 2.0)).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut violations = 0;
    let mut tightest = f64::INFINITY;
    for _ in 0..20 {
        let f = random_real_symbol(&mut rng, 3);
        let sup = sup_norm(&f, 256).unwrap();
        for m in [8, 32] {
            let n = toeplitz_auto(&f, m).unwrap().operator_norm();
            tightest = tightest.min(sup + 1e-9 - n);
            if n > sup + 1e-9 {
                violations += 1;
            }
        }
    }
    verdict(
        2,
        worst <= 1e-10 && violations == 0,
        format!("‖T_x3‖ vs m/(m+2) worst {worst:.3e} (m ≤ 128); bound violations {violations}/40, min slack {tightest:.3e}"),
    );
}

#[test]
fn criterion_03_norm_limit_generic_rate() {
    let start = Instant::now();
    let f = parse("0.3 + x1 + 0.5*x2*x3").unwrap();
    let levels = [16, 32, 64, 128, 256];
    let out = thm1_run(&f, &levels, &sequential().with_window(&levels)).unwrap();
    let slope = out.report.fit.as_ref().unwrap().slope;
    let elapsed = start.elapsed();
    verdict(
        3,
        out.passed() && in_band(slope, 0.9, 1.1) && elapsed < Duration::from_secs(300),
        format!("slope {slope:.4} over {levels:?}, {:.2} s", elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_04_commutator_limit() {
    // the closed form is first confirmed on Beta-integral matrices
    let conv = btq::KahlerConventions::default();
    let mut oracle_worst = 0.0f64;
    for m in 1..=3u32 {
        let t1 = toeplitz_exact(&Symbol::x1(), m);
        let t2 = toeplitz_exact(&Symbol::x2(), m);
        let tb = toeplitz_exact(&poisson_bracket(&Symbol::x1(), &Symbol::x2(), &conv), m);
        let d = commutator(&t1, &t2)
            .unwrap()
            .scale(Complex64::new(0.0, m as f64))
            .sub(&tb)
            .unwrap()
            .operator_norm();
        let mf = m as f64;
        oracle_worst = oracle_worst.max((d - 4.0 * mf / (mf + 2.0).powi(2)).abs());
    }
    let settings = sequential();
    let mut worst = 0.0f64;
    for m in [2, 8, 32] {
        let d = thm2_defect(&Symbol::x1(), &Symbol::x2(), m, &settings).unwrap();
        let mf = m as f64;
        worst = worst.max((d - 4.0 * mf / (mf + 2.0).powi(2)).abs());
    }
    let levels = [16, 32, 64, 128, 256];
    let out = thm2_run(&Symbol::x1(), &Symbol::x2(), &levels, &settings.with_window(&levels)).unwrap();
    let slope = out.report.fit.as_ref().unwrap().slope;
    verdict(
        4,
        oracle_worst <= 1e-12 && worst <= 1e-9 && in_band(slope, 0.9, 1.1),
        format!("Beta-oracle check {oracle_worst:.3e}; defect vs 4m/(m+2)² {worst:.3e}; slope {slope:.4} over {levels:?}"),
    );
}

#[test]
fn criterion_05_star_product_expansion() {
    let conv = btq::KahlerConventions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut symbolic_failures = 0;
    for _ in 0..50 {
        let (f, g, h) = (
            random_integer_symbol(&mut rng, 3),
            random_integer_symbol(&mut rng, 3),
            random_integer_symbol(&mut rng, 3),
        );
        let anti = &c1(&f, &g, &conv) - &c1(&g, &f, &conv);
        if anti != poisson_bracket(&f, &g, &conv).scale(Complex64::new(0.0, -1.0)) {
            symbolic_failures += 1;
        }
        let cocycle = &(&(&f * &c1(&g, &h, &conv)) - &c1(&(&f * &g), &h, &conv))
            + &(&c1(&f, &(&g * &h), &conv) - &(&c1(&f, &g, &conv) * &h));
        if !cocycle.is_zero() {
            symbolic_failures += 1;
        }
    }

    let levels = [16, 32, 64, 128];
    let settings = sequential().with_window(&levels);
    let selected = conv.c1_ordering;
    let rejected = selected.other();
    let mut slopes = Vec::new();
    let mut ok = symbolic_failures == 0;
    for (f, g) in [(Symbol::x3(), Symbol::x3()), (Symbol::x1(), Symbol::x2())] {
        let good = thm3_run_with(&f, &g, &levels, 2, selected, &settings).unwrap().report.fit.unwrap().slope;
        let bad = thm3_run_with(&f, &g, &levels, 2, rejected, &settings).unwrap().report.fit.unwrap().slope;
        ok &= in_band(good, 1.8, 2.2) && !in_band(bad, 1.8, 2.2);
        slopes.push(format!("({f},{g}) {selected} {good:.4} / {rejected} {bad:.4}"));
    }
    verdict(
        5,
        ok,
        format!("symbolic failures {symbolic_failures}/100; N=2 slopes {}", slopes.join("; ")),
    );
}

#[test]
fn criterion_06_tuynman() {
    let cal = calibrate().unwrap();
    let settings = sequential().with_conventions(cal.conventions);
    let mut worst_ratio = 0.0f64;
    for f in ["x1", "x3", "x3^2"] {
        let f = parse(f).unwrap();
        for m in [4, 8, 16, 32] {
            let (d, qn) = tuynman_defect(&f, m, &settings).unwrap();
            worst_ratio = worst_ratio.max(d / (1.0 + qn));
        }
    }
    let mut diag_worst = 0.0f64;
    for m in [4u32, 8, 16, 32] {
        let q = prequantum(&Symbol::x3(), m, &make_rule(m, 3).unwrap()).unwrap();
        let rhs = btq::operators::tuynman_rhs(&Symbol::x3(), m, &cal.conventions).unwrap();
        for j in 0..q.dim() {
            for k in 0..q.dim() {
                let want = if j == k {
                    Complex64::new(0.0, (m as f64 - 2.0 * k as f64) / m as f64)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                diag_worst = diag_worst.max((q.entry(j, k) - want).norm()).max((rhs.entry(j, k) - want).norm());
            }
        }
    }
    verdict(
        6,
        worst_ratio <= 1e-8 && diag_worst <= 1e-10,
        format!(
            "max defect/(1+‖Q‖) {worst_ratio:.3e}; x3 against i·diag((m−2k)/m) {diag_worst:.3e}; calibrated {:?}",
            cal.conventions
        ),
    );
}

#[test]
fn criterion_07_coherent_states() {
    let levels = [8, 16, 32, 64, 128];
    let settings = sequential();
    let north = coherent_run(&Symbol::x3(), &SpherePoint::north(), &levels, &settings).unwrap();
    let north_worst = north
        .report
        .rows
        .iter()
        .map(|r| (r.measured - r.m as f64 / (r.m as f64 + 2.0)).abs())
        .fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let mut sandwich_failures = 0;
    let mut min_slope = f64::INFINITY;
    for _ in 0..10 {
        let f = random_real_symbol(&mut rng, 3);
        let (sup, x0) = sup_norm_point(&f, 256).unwrap();
        let out = coherent_run(&f, &x0, &levels, &settings).unwrap();
        sandwich_failures += out.failures.len();
        let rows: Vec<ConvergenceRow> = out
            .report
            .rows
            .iter()
            .map(|r| ConvergenceRow::with_gap(r.m, r.measured, sup, sup - r.measured))
            .collect();
        // no window is prescribed, so the default upper half applies
        min_slope = min_slope.min(fit_rate(&rows, &default_window(&levels)).unwrap().slope);
    }
    verdict(
        7,
        north_worst <= 1e-10 && north.passed() && sandwich_failures == 0 && min_slope >= 0.9,
        format!("north pole ℓ_m vs m/(m+2) {north_worst:.3e}; sandwich failures {sandwich_failures}; min gap slope {min_slope:.4}"),
    );
}

#[test]
fn criterion_08_hilbert_identities() {
    let mut dims_ok = true;
    let mut gram_worst = 0.0f64;
    for m in [0u32, 1, 8, 64, 128] {
        dims_ok &= dimension(m) == m as usize + 1;
        let grid = basis_eval_grid(m, &make_rule(m, 0).unwrap()).unwrap();
        gram_worst = gram_worst.max(grid.gram_defect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let mut density_worst = 0.0f64;
    for m in [1u32, 8, 64] {
        let expected = (m as f64 + 1.0) / (2.0 * std::f64::consts::PI);
        for _ in 0..50 {
            let p = random_point(&mut rng);
            density_worst = density_worst.max((kernel_density(m, &p) - expected).abs());
        }
    }
    let mut coherent_worst = 0.0f64;
    for m in [3u32, 16] {
        for _ in 0..50 {
            let (a, b) = (random_point(&mut rng), random_point(&mut rng));
            let Some(z0) = a.z() else { continue };
            let cs = coherent_state(m, z0);
            let direct = cs.section.pointwise_norm(&b);
            let predicted = cs.density_from_diastasis(&b);
            // measured against the peak value (1+|z0|²)^m attained at z0
            let peak = (1.0 + z0.norm_sqr()).powi(m as i32);
            coherent_worst = coherent_worst.max((direct - predicted).abs() / peak);
        }
    }
    verdict(
        8,
        dims_ok && gram_worst <= 1e-12 && density_worst <= 1e-12 && coherent_worst <= 1e-10,
        format!(
            "dim ok {dims_ok}; Gram {gram_worst:.3e}; kernel density {density_worst:.3e}; coherent density (relative to peak) {coherent_worst:.3e}"
        ),
    );
}

#[test]
fn criterion_09_structure_invariants() {
    let conv = btq::KahlerConventions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let mut flags_ok = true;
    let mut min_eig = f64::INFINITY;
    for _ in 0..10 {
        let f = random_real_symbol(&mut rng, 3);
        let m = 12;
        let t = toeplitz_auto(&f, m).unwrap();
        let q = prequantum(&f, m, &make_rule(m, 5).unwrap()).unwrap();
        flags_ok &= t.is_hermitian() && t.hermiticity_defect() < 1e-13 && q.anti_hermiticity_defect() < 1e-12;
        let g = random_real_symbol(&mut rng, 2);
        min_eig = min_eig.min(toeplitz_auto(&(&g * &g), m).unwrap().min_eigenvalue());
    }
    for f in ["1 - x3^2", "1 + x1", "(x1 + x2)^2"] {
        min_eig = min_eig.min(toeplitz_auto(&parse(f).unwrap(), 20).unwrap().min_eigenvalue());
    }
    let mut su2 = 0.0f64;
    for m in [1u32, 2, 5, 16, 64, 128] {
        let n1 = toeplitz_auto(&Symbol::x1(), m).unwrap().operator_norm();
        let n3 = toeplitz_auto(&Symbol::x3(), m).unwrap().operator_norm();
        su2 = su2.max((n1 - n3).abs());
    }
    let mut algebra_failures = 0;
    for _ in 0..30 {
        let (f, g, h) = (
            random_integer_symbol(&mut rng, 2),
            random_integer_symbol(&mut rng, 2),
            random_integer_symbol(&mut rng, 2),
        );
        let pb = |a: &Symbol, b: &Symbol| poisson_bracket(a, b, &conv);
        let leibniz = &pb(&f, &(&g * &h)) - &(&(&pb(&f, &g) * &h) + &(&g * &pb(&f, &h)));
        let jacobi = &(&pb(&f, &pb(&g, &h)) + &pb(&g, &pb(&h, &f))) + &pb(&h, &pb(&f, &g));
        algebra_failures += usize::from(!leibniz.is_zero()) + usize::from(!jacobi.is_zero());
    }
    verdict(
        9,
        flags_ok && min_eig > -1e-12 && su2 <= 1e-10 && algebra_failures == 0,
        format!("flags ok {flags_ok}; min eigenvalue of T_(f≥0) {min_eig:.3e}; ‖T_x1‖−‖T_x3‖ {su2:.3e}; Leibniz/Jacobi failures {algebra_failures}/60"),
    );
}

#[test]
fn criterion_10_performance() {
    let f = parse("0.3 + x1^2*x2*x3 - x2^4 + x1*x3").unwrap();
    let m = 200;
    let rule = make_rule(m, f.degree()).unwrap();

    let start = Instant::now();
    let seq = toeplitz_with(&f, m, &rule, Execution::Sequential).unwrap();
    let t_seq = start.elapsed();

    let mut identical = true;
    #[cfg(feature = "parallel")]
    let t_par = {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let a = one.install(|| toeplitz_with(&f, m, &rule, Execution::Parallel).unwrap());
        let eight = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
        let start = Instant::now();
        let b = eight.install(|| toeplitz_with(&f, m, &rule, Execution::Parallel).unwrap());
        let t = start.elapsed();
        identical &= a.entries() == seq.entries() && b.entries() == seq.entries();
        t
    };
    #[cfg(not(feature = "parallel"))]
    let t_par = t_seq;
    let quad = toeplitz(&f, m, &rule).unwrap();
    identical &= quad.entries() == seq.entries();

    verdict(
        10,
        t_seq < Duration::from_secs(60) && t_par < Duration::from_secs(15) && identical,
        format!(
            "m = {m}, degree 4: sequential {:.3} s, 8-thread pool {:.3} s ({} logical CPUs), bit-identical {identical}",
            t_seq.as_secs_f64(),
            t_par.as_secs_f64(),
            std::thread::available_parallelism().map_or(1, |n| n.get())
        ),
    );
}

#[test]
fn rejected_ordering_keeps_a_first_order_residual() {
    // regression fixture: with the other ordering the second-order residual
    // decays only like the first-order one
    let levels = [16, 32, 64, 128];
    let settings = sequential().with_window(&levels);
    let rejected = btq::KahlerConventions::default().c1_ordering.other();
    assert_eq!(rejected, C1Ordering::AntiholomorphicFirst);
    let n1 = thm3_run_with(&Symbol::x1(), &Symbol::x2(), &levels, 1, rejected, &settings).unwrap();
    let n2 = thm3_run_with(&Symbol::x1(), &Symbol::x2(), &levels, 2, rejected, &settings).unwrap();
    let s1 = n1.report.fit.unwrap().slope;
    let s2 = n2.report.fit.unwrap().slope;
    assert!(s2 < s1 + 0.2, "N=1 slope {s1}, N=2 slope {s2}");
}
