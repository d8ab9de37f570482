use std::cmp::Ordering;
use std::path::{Path, PathBuf};

use polya_zeros::classify::check_membership_with;
use polya_zeros::convergence::{plot_svg, ConvergenceError};
use polya_zeros::io::{read_polynomial, read_series, CoeffFile};
use polya_zeros::powersums::{check_growth_bound, estimate_factor_constant, sector_sum_inequalities, GridSpec};
use polya_zeros::regions::{covering_exponents, find_even_power};
use polya_zeros::{
    appell as appell_poly, builtin_sequence, find_roots, jensen as jensen_poly, power_sums_from_coeffs,
    power_sums_from_roots, strong_convergence_probe, validate_theorem, weak_convergence_probe, ClassId, Complex,
    GenParams, PolySequence, Region, RootOptions, TheoremId, TheoremParams,
};
use serde::Serialize;
use serde_json::json;

use crate::error::CliError;
use crate::ConvergeArgs;

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::internal(e.to_string()))?;
    text.push('\n');
    match out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::precondition("write", format!("{}: {e}", path.display())))
}

pub fn roots(input: &Path, tol: f64, max_iter: usize, cluster_eps: f64, out: Option<&Path>) -> Result<(), CliError> {
    let p = read_polynomial(input)?;
    let opts = RootOptions {
        tol,
        max_iter,
        cluster_eps,
        ..RootOptions::default()
    };
    let set = find_roots(&p, &opts)?;
    emit(&set, out)
}

pub fn sums(
    input: &Path,
    k: usize,
    region: Option<&str>,
    sector_c: Option<f64>,
    p_idx: u32,
    csv: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let p = read_polynomial(input)?;
    let region: Option<Region> = region.map(str::parse).transpose()?;
    let roots = if region.is_some() || sector_c.is_some() {
        Some(find_roots(&p, &RootOptions::default())?)
    } else {
        None
    };
    let table = match (&region, &roots) {
        (Some(r), Some(set)) => power_sums_from_roots(set, k, r)?,
        _ => power_sums_from_coeffs(&p, k)?,
    };
    let sector = match (sector_c, &roots) {
        (Some(c), Some(set)) => Some(sector_sum_inequalities(set, c, p_idx)?),
        _ => None,
    };
    if let Some(path) = csv {
        write_file(path, &table.to_csv())?;
    }
    emit(&json!({ "table": table, "sector": sector }), out)
}

pub fn jensen(input: &Path, n: usize, scale_by_n: bool, out: Option<&Path>) -> Result<(), CliError> {
    let f = read_series(input)?;
    let mut poly = jensen_poly(&f, n)?;
    if scale_by_n {
        if n == 0 {
            return Err(CliError::precondition("invalid_argument", "--scale-by-n needs n >= 1"));
        }
        poly = poly.scale_argument(Complex::new(1.0 / n as f64, 0.0));
    }
    emit(&CoeffFile::from(poly), out)
}

pub fn appell(input: &Path, n: usize, out: Option<&Path>) -> Result<(), CliError> {
    let f = read_series(input)?;
    emit(&CoeffFile::from(appell_poly(&f, n)?), out)
}

pub fn classify(
    input: &Path,
    class: &str,
    nmax: usize,
    tol: f64,
    plateau: usize,
    csv: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let f = read_series(input)?;
    let class: ClassId = class.parse()?;
    let verdict = check_membership_with(&f, class, nmax, tol, plateau)?;
    if let Some(path) = csv {
        write_file(path, &verdict.counts_csv())?;
    }
    emit(&verdict, out)
}

/// Orders names so that `f2` precedes `f10`.
fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..i]));
                start = i;
            }
        }
        out
    }
    let (ca, cb) = (chunks(a), chunks(b));
    for (x, y) in ca.iter().zip(&cb) {
        let ord = match (x, y) {
            ((true, dx), (true, dy)) => {
                let (tx, ty) = (dx.trim_start_matches('0'), dy.trim_start_matches('0'));
                tx.len()
                    .cmp(&ty.len())
                    .then_with(|| tx.cmp(ty))
                    .then_with(|| dx.len().cmp(&dy.len()))
            }
            ((_, sx), (_, sy)) => sx.cmp(sy),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    ca.len().cmp(&cb.len())
}

fn glob_files(pattern: &str) -> Result<Vec<PathBuf>, CliError> {
    let entries = glob::glob(pattern).map_err(|e| CliError::precondition("glob", e.to_string()))?;
    let mut paths = Vec::new();
    for entry in entries {
        paths.push(entry.map_err(|e| CliError::precondition("glob", e.to_string()))?);
    }
    if paths.is_empty() {
        return Err(CliError::precondition("glob", format!("no files match '{pattern}'")));
    }
    paths.sort_by(|a, b| natural_cmp(&a.to_string_lossy(), &b.to_string_lossy()));
    Ok(paths)
}

fn parse_pairs(items: &[String]) -> Result<Vec<(usize, usize)>, CliError> {
    items
        .iter()
        .map(|item| {
            let bad = || CliError::precondition("invalid_argument", format!("pair '{item}' is not n:m"));
            let (n, m) = item.split_once(':').ok_or_else(bad)?;
            Ok((
                n.trim().parse().map_err(|_| bad())?,
                m.trim().parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

pub fn converge(args: ConvergeArgs) -> Result<(), CliError> {
    let seq: PolySequence = match (&args.gen, &args.files) {
        (Some(id), _) => builtin_sequence(
            id,
            GenParams {
                seed: args.seed,
                k: args.k,
                c: args.c,
                p: args.p,
            },
        )?,
        (None, Some(pattern)) => PolySequence::from_files(glob_files(pattern)?)?,
        (None, None) => return Err(CliError::precondition("invalid_argument", "need --gen or --files")),
    };
    let pairs = match &args.pairs {
        Some(items) => parse_pairs(items)?,
        None => seq.dyadic_pairs(),
    };
    let report = match &args.theorem {
        Some(id) => {
            let theorem: TheoremId = id.parse()?;
            let params = TheoremParams {
                p: args.p,
                m_bound: args.m_bound,
                nonreal_bound: args.nonreal_bound,
                radii: args.radii.clone(),
                pairs,
                samples: args.samples,
                k_max: args.k_max,
                eps: args.eps,
                ..TheoremParams::default()
            };
            validate_theorem(&seq, theorem, &params)?
        }
        None => {
            let window = seq.default_window();
            let mut report = weak_convergence_probe(&seq, args.k_max, &window, args.eps)?;
            report.strong = strong_convergence_probe(&seq, &args.radii, args.samples, &pairs)?.strong;
            report
        }
    };
    if let Some(path) = &args.plot {
        match plot_svg(&report) {
            Some(svg) => write_file(path, &svg)?,
            None => return Err(ConvergenceError::InvalidArgument("nothing to plot".into()).into()),
        }
    }
    emit(&report, args.output.out.as_deref())
}

fn parse_points(text: &str) -> Result<Vec<Complex>, CliError> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let bad = || CliError::precondition("invalid_argument", format!("point '{item}' is not re,im"));
            let (re, im) = item.split_once(',').ok_or_else(bad)?;
            Ok(Complex::new(
                re.trim().parse().map_err(|_| bad())?,
                im.trim().parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

pub fn cover(
    points: Option<&str>,
    n: usize,
    q_max: u32,
    trials: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    match points {
        Some(text) => {
            let pts = parse_points(text)?;
            let q = find_even_power(&pts, q_max)?;
            emit(
                &json!({ "points": pts.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(), "exponent": q }),
                out,
            )
        }
        None => emit(&covering_exponents(n, q_max, trials, seed)?, out),
    }
}

pub fn cp(
    p: u32,
    grid: GridSpec,
    refine: bool,
    check: Option<&Path>,
    samples: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    if p == 0 {
        return Err(CliError::precondition("invalid_argument", "p must be positive"));
    }
    // p = 1 has the closed-form bound s~_1 |z| and no constant to estimate
    let estimate = if p >= 2 {
        Some(estimate_factor_constant(p, &grid)?)
    } else {
        None
    };
    let refined = match (refine, p >= 2) {
        (true, true) => Some(estimate_factor_constant(p, &grid.refined())?),
        _ => None,
    };
    let growth = match check {
        Some(path) => {
            let poly = read_polynomial(path)?;
            let c_p = estimate.as_ref().map_or(1.0, |e| e.value);
            Some(check_growth_bound(&poly, p, c_p, samples, seed)?)
        }
        None => None,
    };
    emit(
        &json!({ "p": p, "estimate": estimate, "refined": refined, "growth": growth }),
        out,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_order() {
        let mut names = vec!["f10.json", "f2.json", "f1.json", "g.json", "f02.json"];
        names.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(names, ["f1.json", "f2.json", "f02.json", "f10.json", "g.json"]);
    }

    #[test]
    fn pair_and_point_parsing() {
        assert_eq!(
            parse_pairs(&["16:32".into(), "32 : 64".into()]).unwrap(),
            [(16, 32), (32, 64)]
        );
        assert!(parse_pairs(&["16".into()]).is_err());
        let pts = parse_points("0,1; -1.5,2").unwrap();
        assert_eq!(pts, [Complex::new(0.0, 1.0), Complex::new(-1.5, 2.0)]);
    }
}
