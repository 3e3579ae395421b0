//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero when any criterion fails.

mod oracles;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use extremal::characters::{is_fundamental, KroneckerChar};
use extremal::eigenforms::{eigenforms, sieve, HeckeEigenform};
use extremal::exactseries::{delta, dim_cusp_forms};
use extremal::kohnenplus::{
    petersson_norm_sq, plus_space_basis, shimura_match, waldspurger_norm_check, waldspurger_ratio_check,
};
use extremal::lcentral::{
    central_value, central_value_with, moment_sum_from, omega_star_series, required_nmax, CentralValue,
    HarmonicWeight, KernelTable,
};
use extremal::petersson::trace_check_with;
use extremal::resonance::{
    count_extreme_from, diagonal_classification_check, euler_products, extreme_threshold, fourth_moment_check,
    rankin_tail_check, ratio_exponent_trend, sigma_identity_check, ResonatorSpec,
};
use extremal::specialfn::{bessel_j, v_kernel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Float, Rational};

const PREC: u32 = 128;

struct Outcome {
    id: u32,
    pass: bool,
}

fn report(id: u32, pass: bool, summary: String) -> Outcome {
    println!("{} criterion {id}: {summary}", if pass { "PASS" } else { "FAIL" });
    Outcome { id, pass }
}

fn weights_for(forms: &[HeckeEigenform]) -> Vec<HarmonicWeight> {
    forms.iter().map(|f| omega_star_series(f).unwrap()).collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut worst_at = (0, 0, 0);
    let mut corridor_points = 0;
    let mut corridor_ok = true;
    for k in [12u32, 16, 20, 24, 30, 40] {
        let forms = eigenforms(k, required_nmax(k, 1, 0.0).max(36), PREC).unwrap();
        let weights = weights_for(&forms);
        for (m, n) in [(1u64, 1u64), (2, 3), (4, 9), (2, 2)] {
            let r = trace_check_with(&forms, &weights, k, m, n, 100, PREC).unwrap();
            if r.discrepancy > worst {
                worst = r.discrepancy;
                worst_at = (k, m, n);
            }
            if let Some(dev) = r.small_regime {
                corridor_points += 1;
                corridor_ok &= dev <= 10.0 * (-(k as f64)).exp() + r.lhs.err;
            }
        }
    }
    // J_11(4 pi) enters (k, m, n, c) = (12, 1, 1, 1)
    let pi = Rational::from(Float::with_val(400, rug::float::Constant::Pi).to_rational().unwrap());
    let x = Rational::from(&pi * 4u32);
    let exact = Float::with_val(256, &oracles::bessel_series(11, &x, 120));
    let ours = bessel_j(11, &Float::with_val(PREC, &x), PREC).unwrap();
    let bessel_dev = Float::with_val(PREC, &ours.value - &exact).to_f64().abs();
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-4 && secs <= 120.0 && corridor_ok && bessel_dev <= 1e-20;
    report(
        1,
        pass,
        format!(
            "Petersson trace: max |lhs - rhs| = {worst:.2e} at (k,m,n) = {worst_at:?} (tol 1e-4), {secs:.1}s (limit 120s); \
             corridor points {corridor_points} (regime sqrt(mn) <= k/(40 pi) is empty for k < 126); \
             |J_11(4 pi) - rational series| = {bessel_dev:.1e} (tol 1e-20)"
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for k in [12u32, 20] {
        for x in [0.1, 1.0, 10.0] {
            let closed = v_kernel(&Float::with_val(PREC, x), k, PREC).unwrap().to_f64();
            let contour = oracles::v_contour(k, x, 1.0);
            worst = worst.max((closed - contour).abs());
        }
    }
    let mut zero_dev = 0.0f64;
    for k in [12u32, 20] {
        zero_dev = zero_dev.max((v_kernel(&Float::with_val(PREC, 1e-30), k, PREC).unwrap().to_f64() - 1.0).abs());
    }
    let mut bound_ok = true;
    for k in [12u32, 20] {
        for i in 0..20 {
            let x = 10f64.powf(-2.0 + 4.0 * i as f64 / 19.0);
            let v = v_kernel(&Float::with_val(PREC, x), k, PREC).unwrap();
            let bound = (k as f64 / (2.0 * PI * x)).powf(k as f64 / 2.0);
            bound_ok &= v.lower() <= bound;
        }
    }
    report(
        2,
        worst <= 1e-10 && zero_dev <= 1e-12 && bound_ok,
        format!(
            "V kernel: max |closed form - contour| = {worst:.1e} (tol 1e-10); |V(0+) - 1| = {zero_dev:.1e} (tol 1e-12); \
             bound V(x) <= (k/2 pi x)^(k/2) on 20-point grid: {bound_ok}"
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    let mut negative = 0;
    let mut count = 0;
    for k in (12..=40u32).step_by(2).filter(|&k| dim_cusp_forms(k) > 0) {
        let ds: Vec<i64> = [1i64, 5, 13, -3, -7]
            .into_iter()
            .filter(|&d| KroneckerChar::new(d).unwrap().parity_matches(k).unwrap())
            .collect();
        let nmax = ds.iter().map(|&d| required_nmax(k, d, 4.0)).max().unwrap();
        let forms = eigenforms(k, nmax, PREC).unwrap();
        for &d in &ds {
            for f in &forms {
                let a = central_value(f, d, 2.0).unwrap();
                let b = central_value(f, d, 4.0).unwrap();
                worst = worst.max(a.value.sub(&b.value).to_f64().abs());
                if a.value.to_f64() < -a.value.err {
                    negative += 1;
                }
                count += 1;
            }
        }
    }
    report(
        3,
        worst <= 1e-10 && negative == 0,
        format!(
            "AFE stability over {count} (f, D) pairs with k <= 40: max |L(cutoff 2) - L(cutoff 4)| = {worst:.1e} (tol 1e-10); \
             values below -err: {negative}"
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut residual = 0.0f64;
    for k in (12..=40u32).step_by(2).filter(|&k| dim_cusp_forms(k) > 0) {
        for f in eigenforms(k, 100, PREC).unwrap() {
            residual = residual.max(f.hecke_residual());
        }
    }
    let mut deligne = 0.0f64;
    let primes = sieve(200);
    for k in (12..=60u32).step_by(2).filter(|&k| dim_cusp_forms(k) > 0) {
        for f in eigenforms(k, 200, PREC).unwrap() {
            for &p in &primes {
                deligne = deligne.max(f.lambda(p).unwrap().to_f64().abs());
            }
        }
    }
    let tau = oracles::naive_delta(100);
    let lambda = &eigenforms(12, 100, PREC).unwrap()[0];
    let mut tau_dev = 0.0f64;
    for n in 1..=100usize {
        let want = Float::with_val(PREC, &tau[n]) / Float::with_val(PREC, rug::ops::Pow::pow(Float::with_val(PREC, n), 5.5f64));
        tau_dev = tau_dev.max(Float::with_val(PREC, &lambda.lambda(n).unwrap().value - &want).to_f64().abs());
    }
    let ring = delta(100).unwrap().coeffs().iter().zip(&tau).all(|(a, b)| *a == *b);
    let limit = 2f64.powi(-64);
    report(
        4,
        residual <= limit && deligne <= 2.0 + limit && ring && tau_dev <= limit,
        format!(
            "Hecke residual max {residual:.1e} (k <= 40, mn <= 100; tol 2^-64 = {limit:.1e}); max |lambda(p)| = {deligne:.6} \
             (p <= 200, k <= 60; limit 2 + 2^-64); Delta vs naive product: exact q-series {ring}, lambda dev {tau_dev:.1e}"
        ),
    )
}

fn random_prime_values(rng: &mut ChaCha8Rng, n: u64, d: i64) -> BTreeMap<u64, f64> {
    let chi = KroneckerChar::new(d).unwrap();
    let mut out = BTreeMap::new();
    for p in sieve(n as usize) {
        if rng.gen_bool(0.6) {
            let v = if chi.eval(p as i64) == 0 { 0.0 } else { rng.gen_range(-1.0..1.0) };
            out.insert(p as u64, v);
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for i in 0..200 {
        let d = [1i64, 5, -3][i % 3];
        let n = rng.gen_range(1..=200u64);
        let r = random_prime_values(&mut rng, n, d);
        let rep = sigma_identity_check(n, &r, d).unwrap();
        worst = worst.max(rep.residual);
        failures += (!rep.pass) as u32;
    }
    let diag = diagonal_classification_check(100, 100).unwrap();
    let mut specs = Vec::new();
    for d in [1i64, 5, -3] {
        for e in 9..=12 {
            specs.push(ResonatorSpec::standard(10u64.pow(e), d).unwrap());
        }
        specs.push(ResonatorSpec::with_window(10_000, 3.0, 2.0, 30.0, d).unwrap());
        specs.push(ResonatorSpec::with_window(1_000_000, 5.0, 10.0, 60.0, d).unwrap());
    }
    let rankin_fail = specs.iter().filter(|s| !rankin_tail_check(s, None).unwrap().holds).count();
    let secs = start.elapsed().as_secs_f64();
    report(
        5,
        failures == 0 && diag.pass && rankin_fail == 0 && secs <= 300.0,
        format!(
            "resonator identities: 200 random sigma-identity instances, max relative residual {worst:.1e} (tol 1e-10), {failures} failures; \
             diagonal classification N = 100: {} quadruples, {} diagonal, {} counterexamples; Rankin tail on {} specs: {rankin_fail} failures; {secs:.1}s (limit 300s)",
            diag.quadruples,
            diag.diagonal,
            diag.counterexamples.len(),
            specs.len()
        ),
    )
}

fn fourth_moment_regression() -> Outcome {
    let mut worst = 0.0f64;
    let windows = [
        ResonatorSpec::with_window(6, 1.0, 2.0, 3.0, 1).unwrap(),
        ResonatorSpec::with_window(30, 1.0, 2.0, 5.0, 1).unwrap(),
        ResonatorSpec::with_window(200, 1.5, 2.0, 11.0, 1).unwrap(),
    ];
    let small_r = [
        ResonatorSpec::with_window(6, 0.5, 2.0, 3.0, 1).unwrap(),
        ResonatorSpec::with_window(200, 0.5, 2.0, 11.0, 1).unwrap(),
    ];
    let mut worst_small = 0.0f64;
    for k in [12u32, 16, 20, 24, 28, 32] {
        let forms = eigenforms(k, 220, PREC).unwrap();
        let w = weights_for(&forms);
        for s in &windows {
            worst = worst.max(fourth_moment_check(&forms, &w, s).unwrap().ratio);
        }
        for s in &small_r {
            worst_small = worst_small.max(fourth_moment_check(&forms, &w, s).unwrap().ratio);
        }
    }
    println!("    fourth-moment ratio with r(p) <= 0.51 (windows {{2,3}} and 2..=11, L = 0.5): max {worst_small:.3}");
    println!(
        "{} criterion 5 (fourth-moment regression): max (12/(k-1)) sum R^4/omega* / prod (1+r^2)(1+2r^2) = {worst:.3} \
         (regression bound 10, not a theorem)",
        if worst <= 10.0 { "PASS" } else { "FAIL" }
    );
    Outcome { id: 5, pass: worst <= 10.0 }
}

fn criterion_6() -> Outcome {
    let rows = ratio_exponent_trend(&[1_000_000_000, 10_000_000_000, 100_000_000_000, 1_000_000_000_000], 1).unwrap();
    for r in &rows {
        println!(
            "    N = {:e}: window [{:.1}, {:.1}], primes {:?}, prime sum {:.4}, target {:.4}, deviation {:.4}, log Euler ratio {:.4}",
            r.n as f64, r.p_lo, r.p_hi, r.primes, r.prime_sum, r.target, r.deviation, r.log_ratio
        );
    }
    let last = rows.last().unwrap();
    let monotone = rows.windows(2).all(|w| w[1].deviation <= w[0].deviation);
    let euler = euler_products(&ResonatorSpec::standard(1_000_000_000_000, 1).unwrap());
    let euler_dev = (euler.ratio.ln() - last.target).abs() / last.target;
    report(
        6,
        last.deviation <= 0.35 && monotone,
        format!(
            "Euler-product trend: deviation at N = 1e12 is {:.3} (limit 0.35), non-increasing: {monotone}; \
             log Euler ratio at 1e12 deviates {euler_dev:.3} from the target (30% example)",
            last.deviation
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0f64;
    for k in [12u32, 16, 20] {
        let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
        let ds: Vec<i64> = [5i64, 13, 17, 21].iter().map(|d| d * sign).collect();
        for (i, &d1) in ds.iter().enumerate() {
            for &d2 in &ds[i + 1..] {
                worst = worst.max(waldspurger_ratio_check(k, d1, d2, PREC).unwrap().residual);
            }
        }
    }
    let dims_ok = (2..=40u32).step_by(2).all(|k| plus_space_basis(k, 0).map(|b| b.len() == dim_cusp_forms(k)).unwrap_or(false));
    let g = &shimura_match(12, 20, PREC).unwrap()[0];
    let (p, mu) = g.hecke.clone().unwrap();
    let t9 = p == 3 && mu == 252;
    report(
        7,
        worst <= 1e-6 && dims_ok && t9,
        format!(
            "Waldspurger ratio: max residual {worst:.1e} over k in {{12,16,20}}, D pairs from {{5,13,17,21}} (tol 1e-6); \
             plus-space dimension = dim S_k for all even k <= 40: {dims_ok}; T(9) eigenvalue at k = 12 is {} (want 252)",
            mu.to_f64()
        ),
    )
}

fn criterion_8() -> Outcome {
    let r = &waldspurger_norm_check(12, 5, 24, PREC).unwrap()[0];
    let g = &shimura_match(12, 20, PREC).unwrap()[0];
    let a = petersson_norm_sq(g, 24);
    let b = petersson_norm_sq(&g.rescaled(&Rational::from((7, 3))), 24);
    let homog = (b / a / (49.0 / 9.0) - 1.0).abs();
    report(
        8,
        r.rel_err <= 1e-3 && homog <= 1e-12,
        format!(
            "Waldspurger absolute form at k = 12, D = 5: c^2/||g||^2 = {:.6e} vs Gamma(k/2)/pi^(k/2) |D|^((k-1)/2) L = {:.6e}, \
             relative error {:.3e} (tol 1e-3); with the index-6 norm and 1/<f,f> (<f,f> = {:.6e}) the relative error is {:.1e}; \
             quadrature change on doubling {:.1e}; homogeneity under 7/3: {homog:.1e}",
            r.c_sq_normalized, r.rhs, r.rel_err, r.petersson_f, r.rel_err_index_normalized, r.quadrature_change
        ),
    )
}

struct SweepRow {
    k: u32,
    values: Vec<CentralValue>,
    weights: Vec<HarmonicWeight>,
}

fn sweep_row(k: u32) -> SweepRow {
    let forms = eigenforms(k, required_nmax(k, 1, 2.0), PREC).unwrap();
    let table = KernelTable::new(k, 1, 2.0, PREC).unwrap();
    let values = forms.iter().map(|f| central_value_with(f, &table).unwrap()).collect();
    SweepRow { k, values, weights: weights_for(&forms) }
}

fn criterion_9(sweep: &[SweepRow], secs: f64) -> Outcome {
    let threshold = extreme_threshold(100, 1, 1.41);
    let mut total = 0;
    let mut bounded = true;
    let mut max_l = (0.0f64, 0u32);
    for row in sweep {
        let rep = count_extreme_from(&row.values, row.k, 1, 1.41);
        bounded &= rep.count <= dim_cusp_forms(row.k);
        total += rep.count;
        for v in &row.values {
            if v.value.to_f64() > max_l.0 {
                max_l = (v.value.to_f64(), row.k);
            }
        }
    }
    report(
        9,
        (threshold - 11.57).abs() <= 1e-2 && bounded && secs <= 600.0,
        format!(
            "extreme counts for {} weights k <= 300 (D = 1): threshold(100) = {threshold:.4} (want 11.57 +- 0.01); \
             count <= dim always: {bounded}; total members {total}; largest L(1/2, f) = {:.4} at k = {}; sweep {secs:.1}s (limit 600s)",
            sweep.len(),
            max_l.0,
            max_l.1
        ),
    )
}

fn criterion_10(sweep: &[SweepRow]) -> Outcome {
    println!("    k, dim, sum L^3/omega*, err, k log^(9/2) k, ratio");
    let mut ok = true;
    let mut moments = BTreeMap::new();
    for row in sweep {
        let m = moment_sum_from(&row.values, Some(&row.weights), 3).unwrap();
        let kf = row.k as f64;
        let reference = kf * kf.ln().powf(4.5);
        println!(
            "    {}, {}, {:.10e}, {:.1e}, {:.6e}, {:.4e}",
            row.k,
            row.values.len(),
            m.to_f64(),
            m.err,
            reference,
            m.to_f64() / reference
        );
        ok &= m.to_f64().is_finite() && m.to_f64() > 0.0 && m.err.is_finite();
        moments.insert(row.k, m);
    }
    let deterministic = [12u32, 24, 36].iter().all(|&k| {
        let again = sweep_row(k);
        let m = moment_sum_from(&again.values, Some(&again.weights), 3).unwrap();
        m.value == moments[&k].value && m.err == moments[&k].err
    });
    report(
        10,
        ok && deterministic,
        format!(
            "third-moment table for {} weights k in 12..=300 (k = 2 mod 4 vanish identically at D = 1): \
             positive and finite: {ok}; bitwise deterministic on recomputation: {deterministic}",
            sweep.len()
        ),
    )
}

fn main() {
    assert!(is_fundamental(5).unwrap());
    let mut outcomes = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        fourth_moment_regression(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ];
    let start = Instant::now();
    let sweep: Vec<SweepRow> = (12..=300u32).step_by(4).map(sweep_row).collect();
    let secs = start.elapsed().as_secs_f64();
    outcomes.push(criterion_9(&sweep, secs));
    outcomes.push(criterion_10(&sweep));
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    println!("acceptance: {} checks, failing criteria: {failed:?}", outcomes.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
