//! Fractional Gaussian noise by circulant embedding (Davies–Harte).
//!
//! The autocovariance of unit-variance FGN with Hurst exponent `H`,
//!
//! ```text
//! γ(k) = ½ (|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H})
//! ```
//!
//! is embedded in a circulant of size `2M` (`M ≥ n`, 5-smooth so the FFT stays
//! fast). Its eigenvalues are the DFT of the first row. Scaling Hermitian
//! white noise by their square roots and transforming once yields a real
//! series with exactly the FGN covariance on its first `n` entries. Both
//! transforms act on real data and run at half length.
//!
//! For FGN this embedding is non-negative definite, so the method is exact.
//! Should rounding or an unusual size produce clearly negative eigenvalues,
//! they are clamped to zero, which turns the synthesis into an approximate
//! spectral filter; [`FgnOutput::exact`] records which path ran.

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::{seeded, Stream};
use crate::seqmodel::NumericSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FgnConfig {
    pub n: usize,
    /// Hurst exponent, which is also the DFA exponent of the output.
    pub alpha0: f64,
    pub seed: u64,
}

impl FgnConfig {
    pub fn new(n: usize, alpha0: f64, seed: u64) -> Self {
        FgnConfig { n, alpha0, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0 > 0.0 && self.alpha0 < 1.0) {
            return Err(invalid(format!("alpha0 = {} must lie in (0, 1)", self.alpha0)));
        }
        if self.n < 2 {
            return Err(invalid(format!("FGN length {} must be at least 2", self.n)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FgnOutput {
    pub series: NumericSeries,
    /// `false` when negative embedding eigenvalues had to be clamped.
    pub exact: bool,
}

/// Generates FGN normalised to sample mean 0 and variance 1.
/// Output is a pure function of `cfg`.
pub fn generate_fgn(cfg: &FgnConfig) -> Result<NumericSeries> {
    generate_fgn_detailed(cfg).map(|o| o.series)
}

pub fn generate_fgn_detailed(cfg: &FgnConfig) -> Result<FgnOutput> {
    cfg.validate()?;
    let n = cfg.n;
    let m = 2 * smooth_at_least(n);
    let mut planner = FftPlanner::<f64>::new();

    let (eigen, exact) = embedding_eigenvalues(m, cfg.alpha0, &mut planner);
    if !exact {
        log::warn!(
            "circulant embedding not non-negative for n = {n}, H = {}; falling back to approximate spectral synthesis",
            cfg.alpha0
        );
    }

    // Hermitian spectrum: w_k for k <= m/2 drawn here, w_{m-k} = conj(w_k)
    let half = m / 2;
    let mut rng = seeded(cfg.seed, Stream::Fgn);
    let mf = m as f64;
    let w: Vec<Complex64> = (0..=half)
        .map(|k| {
            let a: f64 = rng.sample(StandardNormal);
            if k == 0 || k == half {
                Complex64::new(a * (eigen[k] / mf).sqrt(), 0.0)
            } else {
                let b: f64 = rng.sample(StandardNormal);
                Complex64::new(a, b) * (eigen[k] / (2.0 * mf)).sqrt()
            }
        })
        .collect();
    drop(eigen);

    let mut values = hermitian_transform(&w, &mut planner);
    values.truncate(n);
    standardize(&mut values);
    Ok(FgnOutput {
        series: NumericSeries::new(values)?,
        exact,
    })
}

/// Real sequence `x_j = sum_k w_k e^{-2 pi i jk/m}`, `j < m`, for the
/// Hermitian spectrum given by its first `m/2 + 1` entries. `x_{2p} + i x_{2p+1}`
/// is the half-length transform of `(w_k + w_{k+h}) + i e^{-2 pi i k/m} (w_k - w_{k+h})`.
fn hermitian_transform(w: &[Complex64], planner: &mut FftPlanner<f64>) -> Vec<f64> {
    let half = w.len() - 1;
    let mf = (2 * half) as f64;
    let mut buf: Vec<Complex64> = (0..half)
        .map(|k| {
            let upper = if k == 0 { w[half] } else { w[half - k].conj() };
            let (sin, cos) = (std::f64::consts::TAU * k as f64 / mf).sin_cos();
            let twiddle = Complex64::new(sin, cos); // i e^{-i theta}
            (w[k] + upper) + twiddle * (w[k] - upper)
        })
        .collect();
    planner.plan_fft_forward(half).process(&mut buf);
    buf.iter().flat_map(|c| [c.re, c.im]).collect()
}

/// FGN autocovariance at lag `k` for Hurst exponent `h`, unit variance.
///
/// The textbook second difference cancels catastrophically at large `k`, so
/// beyond a few lags it is evaluated as the even binomial series
/// `k^{2H} Σ_{j≥1} C(2H, 2j) k^{-2j}`.
pub fn autocovariance(k: usize, h: f64) -> f64 {
    let a = 2.0 * h;
    if k < 8 {
        let kf = k as f64;
        return 0.5 * ((kf + 1.0).powf(a) - 2.0 * kf.powf(a) + (kf - 1.0).abs().powf(a));
    }
    let kf = k as f64;
    let x2 = 1.0 / (kf * kf);
    let mut binom = 1.0; // C(a, i)
    let mut power = 1.0; // k^{-i}, even i only
    let mut sum = 0.0;
    let mut i = 0.0;
    loop {
        binom *= (a - i) / (i + 1.0);
        binom *= (a - i - 1.0) / (i + 2.0);
        i += 2.0;
        power *= x2;
        let term = binom * power;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() || i > 60.0 {
            break;
        }
    }
    kf.powf(a) * sum
}

fn embedding_eigenvalues(m: usize, h: f64, planner: &mut FftPlanner<f64>) -> (Vec<f64>, bool) {
    let half = m / 2;
    let acov: Vec<f64> = (0..=half).map(|k| autocovariance(k, h)).collect();
    // the circulant row is real and even; pack even and odd entries into one
    // complex sequence of half the length and split the transform afterwards
    let row = |j: usize| acov[j.min(m - j)];
    let mut z: Vec<Complex64> = (0..half).map(|j| Complex64::new(row(2 * j), row(2 * j + 1))).collect();
    drop(acov);
    planner.plan_fft_forward(half).process(&mut z);

    let mut eigen = vec![0.0; half + 1];
    for k in 0..=half {
        let zk = z[k % half];
        let zc = z[(half - k) % half].conj();
        let even = (zk + zc) * 0.5;
        let odd = (zk - zc) * Complex64::new(0.0, -0.5);
        let (sin, cos) = (std::f64::consts::TAU * k as f64 / m as f64).sin_cos();
        let lambda = (even + Complex64::new(cos, -sin) * odd).re;
        eigen[k] = lambda;
    }
    drop(z);

    let max = eigen.iter().copied().fold(0.0f64, f64::max);
    let tolerance = 1e-9 * max.max(1.0);
    let mut exact = true;
    for lambda in eigen.iter_mut() {
        if *lambda < -tolerance {
            exact = false;
        }
        *lambda = lambda.max(0.0);
    }
    (eigen, exact)
}

/// Smallest 5-smooth integer (2^a 3^b 5^c) that is `>= n`.
fn smooth_at_least(n: usize) -> usize {
    let mut best = n.next_power_of_two();
    let mut p5 = 1usize;
    while p5 < best {
        let mut p35 = p5;
        while p35 < best {
            let mut v = p35;
            while v < n {
                v *= 2;
            }
            best = best.min(v);
            p35 *= 3;
        }
        p5 *= 5;
    }
    best
}

fn standardize(values: &mut [f64]) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let inv_sd = if var > 0.0 { var.sqrt().recip() } else { 1.0 };
    for v in values.iter_mut() {
        *v = (*v - mean) * inv_sd;
    }
}
