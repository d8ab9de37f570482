//! End-to-end acceptance criteria, one PASS/FAIL line each.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use polya_zeros::classify::{check_membership_with, jensen_zero_counts_detailed};
use polya_zeros::convergence::{validate_theorem, ConvergenceError};
use polya_zeros::powersums::{check_growth_bound, estimate_factor_constant, sector_sum_inequalities, GridSpec};
use polya_zeros::regions::{count_in, covering_exponents, find_even_power, DEFAULT_AMBIGUITY_BAND, DEFAULT_REGION_TOL};
use polya_zeros::rootfind::{Root, RootSet};
use polya_zeros::{
    appell, builtin_sequence, find_roots_default, hermite_poulain, jensen, jensen_sequence_member,
    power_sums_from_coeffs, power_sums_from_roots, ClassId, Complex, GenParams, Polynomial, PowerSeries, Region,
    TheoremId, TheoremParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xACCE_0000 + criterion)
}

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn annulus_roots(rng: &mut ChaCha8Rng, count: usize) -> Vec<Complex> {
    (0..count)
        .map(|_| Complex::from_polar(rng.random_range(0.2..=5.0), rng.random_range(0.0..TAU)))
        .collect()
}

fn random_real_poly(rng: &mut ChaCha8Rng, max_degree: usize) -> Polynomial {
    let degree = rng.random_range(1..=max_degree);
    let mut coeffs: Vec<f64> = (0..=degree).map(|_| rng.random_range(-3.0..3.0)).collect();
    while coeffs[degree].abs() < 0.1 {
        coeffs[degree] = rng.random_range(-3.0..3.0);
    }
    Polynomial::from_real(&coeffs).unwrap()
}

fn series_of(p: &Polynomial) -> PowerSeries {
    PowerSeries::new(p.coeffs().to_vec()).unwrap()
}

fn nonreal() -> Region {
    Region::RealLine.complement()
}

fn non_s0() -> Region {
    Region::NonNegativeRay.complement()
}

/// `N(p; X)`, or `None` when some zero lies in the boundary band.
fn clean_count(p: &Polynomial, region: &Region) -> Option<usize> {
    if p.degree().unwrap_or(0) == 0 {
        return Some(0);
    }
    let rs = find_roots_default(p).ok()?;
    if rs
        .roots
        .iter()
        .any(|r| region.is_ambiguous(r.z, DEFAULT_REGION_TOL, DEFAULT_AMBIGUITY_BAND))
    {
        return None;
    }
    Some(count_in(&rs, region, DEFAULT_REGION_TOL))
}

fn criterion_1() -> Outcome {
    let mut rng = rng(1);
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for i in 0..1000 {
        let degree = rng.random_range(1..=12);
        let p = Polynomial::from_roots(&annulus_roots(&mut rng, degree), c(1.0, 0.0)).unwrap();
        let from_coeffs = power_sums_from_coeffs(&p, 8).map_err(|e| e.to_string())?;
        let roots = find_roots_default(&p).map_err(|e| format!("poly {i}: {e}"))?;
        let from_roots = power_sums_from_roots(&roots, 8, &Region::Plane).map_err(|e| e.to_string())?;
        for k in 1..=8 {
            let (a, b) = (from_coeffs.s(k), from_roots.s(k));
            let rel = (a - b).norm() / a.norm().max(1.0);
            worst = worst.max(rel);
            if rel > 1e-8 {
                return Err(format!("poly {i}, k = {k}: {a} vs {b}"));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 10.0 {
        return Err(format!("took {elapsed:.2}s"));
    }
    Ok(format!("worst relative gap {worst:.2e}, {elapsed:.2}s"))
}

/// Reciprocal-root Newton identities over the rationals.
fn exact_power_sums(a: &[i64], order: usize) -> Vec<BigRational> {
    let a0 = BigRational::from_integer(BigInt::from(a[0]));
    let b = |i: usize| {
        a.get(i).map_or_else(
            || BigRational::from_integer(BigInt::from(0)),
            |&x| BigRational::from_integer(BigInt::from(x)) / a0.clone(),
        )
    };
    let mut s: Vec<BigRational> = Vec::with_capacity(order);
    for k in 1..=order {
        let mut acc = b(k) * BigRational::from_integer(BigInt::from(k as i64));
        for i in 1..k {
            acc += b(i) * s[k - i - 1].clone();
        }
        s.push(-acc);
    }
    s
}

fn criterion_2() -> Outcome {
    let mut rng = rng(2);
    let mut worst = 0.0_f64;
    for i in 0..100 {
        let degree = rng.random_range(1..=6);
        let mut a: Vec<i64> = (0..=degree).map(|_| rng.random_range(-9..=9)).collect();
        while a[0] == 0 {
            a[0] = rng.random_range(-9..=9);
        }
        while a[degree] == 0 {
            a[degree] = rng.random_range(-9..=9);
        }
        let p = Polynomial::from_real(&a.iter().map(|&x| x as f64).collect::<Vec<_>>()).unwrap();
        let got = power_sums_from_coeffs(&p, 8).map_err(|e| e.to_string())?;
        for (k, e) in exact_power_sums(&a, 8).iter().enumerate() {
            let e = e.to_f64().unwrap();
            let g = got.s(k + 1);
            let err = (g - c(e, 0.0)).norm();
            // an exact zero leaves no scale; demand the absolute error instead
            let rel = if e == 0.0 { err } else { err / e.abs() };
            worst = worst.max(rel);
            if rel > 1e-10 {
                return Err(format!("poly {i} {a:?}, k = {}: {g} vs {e}", k + 1));
            }
        }
    }
    Ok(format!("worst relative error {worst:.2e}"))
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn sup_error_exp(n: usize) -> Result<f64, String> {
    let f = PowerSeries::exp(n);
    let member = jensen_sequence_member(&f, n).map_err(|e| e.to_string())?;
    // maximum modulus: the sup over the disk is attained on |z| = 2
    Ok((0..512)
        .map(|j| {
            let z = Complex::from_polar(2.0, TAU * j as f64 / 512.0);
            (member.evaluate(z) - z.exp()).norm()
        })
        .fold(0.0, f64::max))
}

fn criterion_3() -> Outcome {
    for n in 0..=30usize {
        let j = jensen(&PowerSeries::exp(30), n).map_err(|e| e.to_string())?;
        for k in 0..=n {
            let expected = binomial(n as u64, k as u64);
            let got = j.coeff(k);
            if (got - c(expected, 0.0)).norm() > 1e-12 * expected {
                return Err(format!("J(exp, {n}) coefficient {k}: {got} vs {expected}"));
            }
        }
    }
    let (e128, e256) = (sup_error_exp(128)?, sup_error_exp(256)?);
    let ratio = e256 / e128;
    if ratio >= 0.55 {
        return Err(format!("sup error ratio {ratio:.4} ({e256:.3e} / {e128:.3e})"));
    }
    Ok(format!(
        "binomials exact to 1e-12 for n <= 30; sup error ratio {ratio:.4}"
    ))
}

fn criterion_4() -> Outcome {
    let mut rng = rng(4);
    let mut zeros_checked = 0usize;
    for i in 0..500 {
        let degree = rng.random_range(1..=10);
        let roots: Vec<Complex> = (0..degree)
            .map(|_| c(rng.random_range(-3.0..=3.0), rng.random_range(0.0..=3.0)))
            .collect();
        let f = series_of(&Polynomial::from_roots(&roots, c(1.0, 0.0)).unwrap());
        for n in 1..=10 {
            let j = jensen(&f, n).map_err(|e| e.to_string())?;
            if j.degree().unwrap_or(0) == 0 {
                continue;
            }
            for z in find_roots_default(&j).map_err(|e| e.to_string())?.expanded() {
                zeros_checked += 1;
                if z.im < -1e-7 * (1.0 + z.norm()) {
                    return Err(format!("case {i}, n = {n}: zero {z}"));
                }
            }
        }
    }
    Ok(format!("{zeros_checked} zeros checked, no violations"))
}

fn criterion_5() -> Outcome {
    let mut rng = rng(5);
    let (mut instances, mut excluded) = (0usize, 0usize);
    for i in 0..500 {
        let p = random_real_poly(&mut rng, 10);
        let f = series_of(&p);
        let source = clean_count(&p, &nonreal());
        for n in 0..=12 {
            instances += 1;
            let j = jensen(&f, n).map_err(|e| e.to_string())?;
            let (Some(bound), Some(count)) = (source, clean_count(&j, &nonreal())) else {
                excluded += 1;
                continue;
            };
            if count > bound {
                return Err(format!("case {i}, n = {n}: N(J) = {count} > N(f) = {bound}"));
            }
        }
    }
    let fraction = excluded as f64 / instances as f64;
    if fraction >= 0.05 {
        return Err(format!("{excluded}/{instances} instances excluded"));
    }
    Ok(format!(
        "{excluded}/{instances} instances excluded ({:.2}%)",
        100.0 * fraction
    ))
}

fn criterion_6() -> Outcome {
    let mut rng = rng(6);
    let mut excluded = 0usize;
    for i in 0..200 {
        let coeffs: Vec<f64> = (0..=15).map(|_| rng.random_range(-2.0..2.0)).collect();
        let f = PowerSeries::from_real(&coeffs).unwrap();
        let counts = jensen_zero_counts_detailed(&f, 15, &nonreal(), DEFAULT_REGION_TOL).map_err(|e| e.to_string())?;
        for w in counts.windows(2).skip(1) {
            if w[0].ambiguous || w[1].ambiguous || appell(&f, w[1].n).map_err(|e| e.to_string())?.is_zero() {
                excluded += 1;
                continue;
            }
            if w[0].count > w[1].count {
                let profile: Vec<usize> = counts.iter().map(|z| z.count).collect();
                return Err(format!("case {i}: N_{} > N_{} in {profile:?}", w[0].n, w[1].n));
            }
        }
    }
    Ok(format!("no violations, {excluded} of {} steps excluded", 200 * 14))
}

fn criterion_7() -> Outcome {
    let f = PowerSeries::exp(30).mul_truncated(&PowerSeries::from_real(&[1.0, 0.0, 1.0]).unwrap());
    let v = check_membership_with(&f, ClassId::LPstar, 30, DEFAULT_REGION_TOL, 5).map_err(|e| e.to_string())?;
    let profile: Vec<usize> = v.counts.clone();
    match (v.stabilized_at, v.stabilized_value) {
        (Some(at), Some(2)) if profile.len() - at >= 5 => Ok(format!("N_n = 2 for n >= {at}")),
        _ => Err(format!("no plateau at 2: {profile:?}")),
    }
}

fn criterion_8() -> Outcome {
    let mut rng = rng(8);
    let mut excluded = [0usize; 2];
    for (suite, region) in [nonreal(), non_s0()].iter().enumerate() {
        for i in 0..500 {
            let h = random_real_poly(&mut rng, 10);
            let b = if suite == 0 {
                rng.random_range(-3.0..3.0)
            } else {
                rng.random_range(0.0..3.0)
            };
            let out = hermite_poulain(&h, c(b, 0.0));
            let (Some(after), Some(before)) = (clean_count(&out, region), clean_count(&h, region)) else {
                excluded[suite] += 1;
                continue;
            };
            if after > before {
                return Err(format!("suite {}, case {i}, b = {b}: {after} > {before}", suite + 1));
            }
        }
    }
    Ok(format!(
        "no violations; excluded {} and {} of 500",
        excluded[0], excluded[1]
    ))
}

fn criterion_9() -> Outcome {
    let params = TheoremParams {
        radii: vec![1.0, 2.0],
        pairs: vec![(16, 32), (32, 64), (64, 128)],
        ..TheoremParams::default()
    };
    let mut passed = Vec::new();
    let cases = [
        ("jensen-of-exp", 0u64),
        ("h-random", 0),
        ("h-random", 1),
        ("h-random", 2),
    ];
    for (id, seed) in cases {
        let seq = builtin_sequence(
            id,
            GenParams {
                seed,
                ..GenParams::default()
            },
        )
        .map_err(|e| e.to_string())?;
        let report = validate_theorem(&seq, TheoremId::T1_1, &params).map_err(|e| format!("{id}/{seed}: {e}"))?;
        if !report.failed_hypotheses().is_empty() {
            return Err(format!("{id}/{seed}: failed {:?}", report.failed_hypotheses()));
        }
        for d in &report.decay {
            if !d.monotone {
                return Err(format!("{id}/{seed}, r = {}: ratios {:?}", d.radius, d.ratios));
            }
        }
        passed.push(format!("{id}/{seed}"));
    }
    let seq = builtin_sequence("monomial", GenParams::default()).map_err(|e| e.to_string())?;
    match validate_theorem(&seq, TheoremId::T1_1, &params) {
        Err(ConvergenceError::HypothesisViolated { hypothesis, report, .. })
            if hypothesis == "nonzero limit coefficient"
                && report.failed_hypotheses() == ["nonzero limit coefficient"] => {}
        Err(e) => return Err(format!("monomial: {e}")),
        Ok(_) => return Err("monomial passed every hypothesis".into()),
    }
    Ok(format!(
        "{} decay; monomial fails only the limit hypothesis",
        passed.join(", ")
    ))
}

fn criterion_10() -> Outcome {
    let mut rng = rng(10);
    let mut splits = [0usize; 2];
    for p in [1u32, 2] {
        let half = FRAC_PI_2 / p as f64;
        for i in 0..500 {
            let count = rng.random_range(1..=10);
            let roots: Vec<Root> = (0..count)
                .map(|_| Root {
                    z: Complex::from_polar(rng.random_range(0.2..=5.0), rng.random_range(-half..half)),
                    multiplicity: 1,
                })
                .collect();
            let set = RootSet {
                residuals: vec![0.0; roots.len()],
                backward_errors: vec![0.0; roots.len()],
                roots,
                converged: true,
            };
            let report = sector_sum_inequalities(&set, 2.0, p).map_err(|e| e.to_string())?;
            if !report.violations.is_empty() {
                return Err(format!("p = {p}, case {i}: {:?}", report.violations));
            }
            if report.outer_count > 0 {
                splits[p as usize - 1] += 1;
            }
        }
    }
    Ok(format!(
        "no violations; sets with zeros outside S_2^(1/p): {} (p = 1), {} (p = 2)",
        splits[0], splits[1]
    ))
}

fn criterion_11() -> Outcome {
    let grid = GridSpec::default();
    let coarse = estimate_factor_constant(2, &grid).map_err(|e| e.to_string())?;
    let fine = estimate_factor_constant(2, &grid.refined()).map_err(|e| e.to_string())?;
    let drift = (fine.value - coarse.value).abs() / coarse.value.abs();
    if drift > 0.05 {
        return Err(format!("c_2 moved {:.2}% under refinement", 100.0 * drift));
    }
    let mut rng = rng(11);
    let mut tightest = [f64::INFINITY; 2];
    for i in 0..100 {
        let degree = rng.random_range(1..=10);
        let roots = annulus_roots(&mut rng, degree);
        let p = Polynomial::from_roots(&roots, c(1.0, 0.0)).unwrap();
        let p = p.scale(p.coeff(0).inv());
        for (slot, (p_idx, c_p)) in [(2u32, coarse.value), (1, 0.0)].into_iter().enumerate() {
            let report = check_growth_bound(&p, p_idx, c_p, 10_000, i).map_err(|e| format!("poly {i}: {e}"))?;
            if let Some(v) = report.violations.first() {
                return Err(format!(
                    "poly {i}, p = {p_idx}: {} violations, first {v:?}",
                    report.violations.len()
                ));
            }
            tightest[slot] = tightest[slot].min(report.min_slack);
        }
    }
    Ok(format!(
        "c_2 = {:.6} (refined {:.6}); min slack {:.3e} (p = 2), {:.3e} (p = 1)",
        coarse.value, fine.value, tightest[0], tightest[1]
    ))
}

fn criterion_12() -> Outcome {
    let q_i = find_even_power(&[c(0.0, 1.0)], 256).map_err(|e| e.to_string())?;
    let q_w = find_even_power(&[Complex::from_polar(1.0, PI / 3.0)], 256).map_err(|e| e.to_string())?;
    if (q_i, q_w) != (4, 6) {
        return Err(format!("find_even_power gave {q_i} and {q_w}"));
    }
    let cover = covering_exponents(2, 256, 10_000, 12).map_err(|e| e.to_string())?;
    if cover.verified_coverage < 0.999 {
        return Err(format!("coverage {}", cover.verified_coverage));
    }
    Ok(format!(
        "q = 4 and 6; {} exponents cover {:.4} of 10^4 pairs",
        cover.exponents.len(),
        cover.verified_coverage
    ))
}

fn run_cli(args: &[&str], out: &Path) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_polya-zeros"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&status.stdout)));
    }
    std::fs::read(out).map_err(|e| e.to_string())
}

fn criterion_13() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let poly = dir.path().join("p.json");
    std::fs::write(&poly, r#"{"coeffs": [[1,0],[-0.5,0.25],[0.3,0],[0,0.1],[0.02,0]]}"#).map_err(|e| e.to_string())?;
    let poly = poly.to_str().unwrap();
    let runs: [&[&str]; 5] = [
        &["converge", "--gen", "h-random", "--seed", "7", "--theorem", "T1.1"],
        &["converge", "--gen", "sector-random", "--seed", "3", "--p", "2"],
        &["cover", "--n", "3", "--trials", "500", "--seed", "9"],
        &[
            "cp",
            "-p",
            "2",
            "--radial",
            "201",
            "--angular",
            "240",
            "--check",
            poly,
            "--samples",
            "2000",
            "--seed",
            "5",
        ],
        &["roots", poly],
    ];
    for (i, args) in runs.iter().enumerate() {
        let a = run_cli(args, &dir.path().join(format!("a{i}.json")))?;
        let b = run_cli(args, &dir.path().join(format!("b{i}.json")))?;
        if a != b {
            return Err(format!("{args:?} differs between runs"));
        }
    }
    Ok(format!("{} commands byte-identical across runs", runs.len()))
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("power sums: coefficients vs computed roots", criterion_1),
        ("power sums: exact rational oracle", criterion_2),
        ("Jensen of exp: binomials and 1/n decay", criterion_3),
        ("Jensen polynomials keep zeros in the upper half plane", criterion_4),
        ("Jensen polynomials do not add non-real zeros", criterion_5),
        ("Appell non-real counts are monotone", criterion_6),
        ("Appell counts of e^z(1+z^2) stabilize at 2", criterion_7),
        ("Hermite-Poulain operator counts", criterion_8),
        ("upper half plane convergence harness", criterion_9),
        ("sector power-sum inequalities", criterion_10),
        ("factor constant and growth bounds", criterion_11),
        ("even powers into the right half plane", criterion_12),
        ("CLI determinism", criterion_13),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
