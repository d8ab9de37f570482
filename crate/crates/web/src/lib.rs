//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! Results cross the boundary as flat `Float64Array`s so the page needs no
//! glue beyond the generated module.

use polya_zeros::classify::jensen_zero_counts_detailed;
use polya_zeros::regions::DEFAULT_REGION_TOL;
use polya_zeros::{
    builtin_sequence, find_roots_default, jensen, strong_convergence_probe, GenParams, PowerSeries, Region,
};
use wasm_bindgen::prelude::*;

/// Largest index the convergence curve goes up to.
pub const CURVE_MAX_INDEX: usize = 1024;

fn series(coeffs: &[f64]) -> Result<PowerSeries, String> {
    if coeffs.is_empty() {
        return Err("no coefficients".into());
    }
    PowerSeries::from_real(coeffs).map_err(|e| e.to_string())
}

/// Zeros of `J(f,n)` as `[re, im, multiplicity, ...]`.
pub fn jensen_zeros_flat(coeffs: &[f64], n: usize) -> Result<Vec<f64>, String> {
    let j = jensen(&series(coeffs)?, n).map_err(|e| e.to_string())?;
    if j.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let roots = find_roots_default(&j).map_err(|e| e.to_string())?;
    Ok(roots
        .roots
        .iter()
        .flat_map(|r| [r.z.re, r.z.im, r.multiplicity as f64])
        .collect())
}

/// `N_n` for `n = 0..=n_max`, with `-1` where a zero sits on the region boundary.
pub fn count_profile(coeffs: &[f64], n_max: usize, region: &str) -> Result<Vec<f64>, String> {
    let region: Region = region.parse().map_err(|e: polya_zeros::RegionError| e.to_string())?;
    let counts =
        jensen_zero_counts_detailed(&series(coeffs)?, n_max, &region, DEFAULT_REGION_TOL).map_err(|e| e.to_string())?;
    Ok(counts
        .iter()
        .map(|z| if z.ambiguous { -1.0 } else { z.count as f64 })
        .collect())
}

/// `[n, sup_{|z|=radius} |f_n - f_2n|, ...]` over dyadic pairs up to
/// [`CURVE_MAX_INDEX`].
pub fn curve(generator: &str, seed: u64, radius: f64) -> Result<Vec<f64>, String> {
    let seq = builtin_sequence(
        generator,
        GenParams {
            seed,
            ..GenParams::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let pairs: Vec<(usize, usize)> = seq
        .dyadic_pairs()
        .into_iter()
        .filter(|&(_, m)| m <= CURVE_MAX_INDEX)
        .collect();
    let report = strong_convergence_probe(&seq, &[radius], 256, &pairs).map_err(|e| e.to_string())?;
    let strong = report.strong.ok_or("no strong report")?;
    Ok(strong.entries.iter().flat_map(|e| [e.n as f64, e.sup]).collect())
}

#[wasm_bindgen]
pub fn jensen_zeros(coeffs: &[f64], n: usize) -> Result<Vec<f64>, JsError> {
    jensen_zeros_flat(coeffs, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn appell_counts(coeffs: &[f64], n_max: usize, region: &str) -> Result<Vec<f64>, JsError> {
    count_profile(coeffs, n_max, region).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn convergence_curve(generator: &str, seed: u64, radius: f64) -> Result<Vec<f64>, JsError> {
    curve(generator, seed, radius).map_err(|e| JsError::new(&e))
}
