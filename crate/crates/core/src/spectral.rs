//! Periodogram and low-frequency spectral exponent.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::dfa::{linear_fit, LineFit};
use crate::error::{invalid, Result};

/// One-sided periodogram `|X(f_k)|² / N` at `f_k = k/N`, `k = 1..=N/2`.
/// The mean is removed first.
pub fn periodogram(x: &[f64]) -> Result<Vec<(f64, f64)>> {
    let n = x.len();
    if n < 4 {
        return Err(invalid("periodogram needs at least 4 samples"));
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    Ok((1..=n / 2)
        .map(|k| (k as f64 / n as f64, buf[k].norm_sqr() / n as f64))
        .collect())
}

/// Estimates `β` in `S(f) ~ f^-β` by a log-log fit over the lowest `fraction`
/// of the positive frequencies, after averaging the periodogram in
/// logarithmically spaced bins.
pub fn spectral_exponent(x: &[f64], fraction: f64) -> Result<LineFit> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(invalid(format!("frequency fraction {fraction} must lie in (0, 1]")));
    }
    let p = periodogram(x)?;
    let keep = ((p.len() as f64 * fraction) as usize).max(2);
    let p = &p[..keep.min(p.len())];

    let bins = 30usize;
    let f0 = p[0].0.ln();
    let width = (p[p.len() - 1].0.ln() - f0) / bins as f64 + f64::EPSILON;
    let mut acc = vec![(0.0f64, 0.0f64, 0usize); bins + 1];
    for &(f, s) in p {
        let b = ((f.ln() - f0) / width) as usize;
        let slot = &mut acc[b.min(bins)];
        slot.0 += f.ln();
        slot.1 += s;
        slot.2 += 1;
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = acc
        .iter()
        .filter(|a| a.2 > 0 && a.1 > 0.0)
        .map(|a| (a.0 / a.2 as f64, (a.1 / a.2 as f64).ln()))
        .unzip();
    let mut fit = linear_fit(&xs, &ys)?;
    fit.slope = -fit.slope;
    Ok(fit)
}
