//! Detrended fluctuation analysis.
//!
//! The series is integrated into its mean-free profile, the profile is cut
//! into non-overlapping windows of length `L`, an order-`m` polynomial is
//! least-squares fitted in each window, and `F(L)` is the RMS of the
//! residuals over every covered point. The DFA exponent is the slope of
//! `log10 F` against `log10 L`.
//!
//! Window fits project onto a discrete orthonormal polynomial basis built on
//! the window-local index, so conditioning does not degrade with the position
//! of the window or its length.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::seqmodel::NumericSeries;

/// How windows cover a profile whose length is not a multiple of `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Segmentation {
    /// `⌊N/L⌋` windows from the start; the tail remainder is ignored.
    ForwardOnly,
    /// `⌊N/L⌋` windows from the start plus `⌊N/L⌋` anchored at the end.
    #[default]
    BothEnds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowSpec {
    /// `count` log-spaced integers from `2(m+2)` to `N/4`, deduplicated.
    Auto { count: usize },
    Explicit(Vec<usize>),
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec::Auto { count: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfaConfig {
    /// Detrending polynomial order (1 = linear).
    pub order: usize,
    pub windows: WindowSpec,
    /// Inclusive `[lo, hi]` window range used for the exponent fit; `None`
    /// fits every window up to `N/4`.
    pub fit_range: Option<(usize, usize)>,
    pub segmentation: Segmentation,
}

impl Default for DfaConfig {
    fn default() -> Self {
        DfaConfig {
            order: 1,
            windows: WindowSpec::default(),
            fit_range: None,
            segmentation: Segmentation::BothEnds,
        }
    }
}

impl DfaConfig {
    pub fn min_window(&self) -> usize {
        self.order + 2
    }

    /// The concrete window list for a series of length `n`.
    pub fn resolve_windows(&self, n: usize) -> Result<Vec<usize>> {
        if self.order == 0 {
            return Err(invalid("detrending order must be at least 1"));
        }
        let min = self.min_window();
        match &self.windows {
            WindowSpec::Auto { count } => {
                if *count < 2 {
                    return Err(invalid("at least two windows are needed for a fit"));
                }
                let lo = 2 * min;
                let hi = n / 4;
                if hi <= lo {
                    return Err(invalid(format!(
                        "series of length {n} is too short for order-{} DFA (need N/4 > {lo})",
                        self.order
                    )));
                }
                let ratio = (hi as f64 / lo as f64).ln();
                let mut windows: Vec<usize> = (0..*count)
                    .map(|i| {
                        let t = i as f64 / (*count - 1) as f64;
                        ((lo as f64) * (ratio * t).exp()).round() as usize
                    })
                    .map(|w| w.clamp(lo, hi))
                    .collect();
                windows.dedup();
                Ok(windows)
            }
            WindowSpec::Explicit(windows) => {
                if windows.is_empty() {
                    return Err(invalid("window list is empty"));
                }
                if windows.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid("window sizes must be strictly increasing"));
                }
                if windows[0] < min {
                    return Err(invalid(format!("window {} is below the minimum {min}", windows[0])));
                }
                if *windows.last().unwrap() > n {
                    return Err(invalid(format!(
                        "window {} exceeds the series length {n}",
                        windows.last().unwrap()
                    )));
                }
                Ok(windows.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfaResult {
    pub window_sizes: Vec<usize>,
    pub fluctuations: Vec<f64>,
    pub alpha: f64,
    pub intercept: f64,
    pub fit_stderr: f64,
    pub r_squared: f64,
    /// Smallest and largest window that entered the fit.
    pub fit_range: (usize, usize),
    pub series_len: usize,
    pub order: usize,
    pub segmentation: Segmentation,
}

impl DfaResult {
    /// Re-fits the stored curve over another inclusive window range.
    pub fn refit(&self, lo: usize, hi: usize) -> Result<DfaResult> {
        let (fit, range) = fit_curve(&self.window_sizes, &self.fluctuations, lo, hi)?;
        Ok(DfaResult {
            alpha: fit.slope,
            intercept: fit.intercept,
            fit_stderr: fit.stderr,
            r_squared: fit.r_squared,
            fit_range: range,
            ..self.clone()
        })
    }
}

/// Mean-free cumulative sum `Y(t) = Σ_{i≤t} (x(i) − x̄)`, accumulated with
/// Neumaier compensation.
pub fn profile(x: &[f64]) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mean = compensated_sum(x.iter().copied()) / x.len() as f64;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    Ok(x.iter()
        .map(|&v| {
            let d = v - mean;
            let t = sum + d;
            if sum.abs() >= d.abs() {
                comp += (sum - t) + d;
            } else {
                comp += (d - t) + sum;
            }
            sum = t;
            sum + comp
        })
        .collect())
}

fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `F(L)` with order-`order` detrending and both-ends segmentation.
pub fn fluctuation(x: &NumericSeries, window: usize, order: usize) -> Result<f64> {
    fluctuation_with(x.values(), window, order, Segmentation::BothEnds)
}

pub fn fluctuation_with(x: &[f64], window: usize, order: usize, segmentation: Segmentation) -> Result<f64> {
    if order == 0 {
        return Err(invalid("detrending order must be at least 1"));
    }
    let y = profile(x)?;
    if window < order + 2 || window > y.len() {
        return Err(invalid(format!(
            "window {window} outside [{}, {}]",
            order + 2,
            y.len()
        )));
    }
    Ok(profile_fluctuation(&y, window, order, segmentation))
}

/// `F(L)` for every window in `windows`, sharing one profile. Windows are
/// evaluated in parallel; the output follows the input order.
pub fn fluctuations(x: &[f64], windows: &[usize], order: usize, segmentation: Segmentation) -> Result<Vec<f64>> {
    if order == 0 {
        return Err(invalid("detrending order must be at least 1"));
    }
    let y = profile(x)?;
    if let Some(&w) = windows.iter().find(|&&w| w < order + 2 || w > y.len()) {
        return Err(invalid(format!("window {w} outside [{}, {}]", order + 2, y.len())));
    }
    Ok(windows
        .par_iter()
        .map(|&w| profile_fluctuation(&y, w, order, segmentation))
        .collect())
}

/// Residual energies below this fraction of the shifted window energy are
/// recomputed explicitly; above it the subtraction loses at most a few
/// thousand ulps.
const CANCELLATION_GUARD: f64 = 1e-3;

/// Orthonormal polynomial basis on `0..len`. The constant row `1/sqrt(len)`
/// is implicit; rows of degree `1..=order` are stored row-major in `q`.
struct PolyBasis {
    len: usize,
    order: usize,
    q: Vec<f64>,
}

impl PolyBasis {
    /// Discrete Chebyshev (Gram) polynomials on the centred index, from the
    /// orthonormal form of their three-term recurrence.
    fn new(len: usize, order: usize) -> Self {
        let n = len as f64;
        let centre = (n - 1.0) / 2.0;
        // sqrt of the monic recurrence coefficient linking degrees k and k-1
        let b = |k: usize| {
            let k = k as f64;
            (k * k * (n * n - k * k) / (4.0 * (4.0 * k * k - 1.0))).sqrt()
        };
        let mut q = vec![0.0; len * order];
        let scale = (n.sqrt() * b(1)).recip();
        for (j, v) in q[..len].iter_mut().enumerate() {
            *v = (j as f64 - centre) * scale;
        }
        for k in 2..=order {
            let (done, rest) = q.split_at_mut((k - 1) * len);
            let cur = &done[(k - 2) * len..];
            let inv = b(k).recip();
            let back = b(k - 1);
            let row = &mut rest[..len];
            if k == 2 {
                let q0 = n.sqrt().recip();
                for (j, v) in row.iter_mut().enumerate() {
                    *v = ((j as f64 - centre) * cur[j] - back * q0) * inv;
                }
            } else {
                let prev = &done[(k - 3) * len..(k - 2) * len];
                for (j, v) in row.iter_mut().enumerate() {
                    *v = ((j as f64 - centre) * cur[j] - back * prev[j]) * inv;
                }
            }
        }
        PolyBasis { len, order, q }
    }

    /// Value of the degree-`k` row at point `j`.
    #[cfg(test)]
    fn value(&self, j: usize, k: usize) -> f64 {
        if k == 0 {
            (self.len as f64).sqrt().recip()
        } else {
            self.q[(k - 1) * self.len + j]
        }
    }

    /// Residual sum of squares of `y` after projecting out the basis.
    fn residual_ss(&self, y: &[f64]) -> f64 {
        match self.order {
            1 => self.residual_fixed::<1>(y),
            2 => self.residual_fixed::<2>(y),
            3 => self.residual_fixed::<3>(y),
            _ => self.residual_any(y),
        }
    }

    /// One pass for the projection coefficients of `y - y[0]`; the residual
    /// energy follows from Pythagoras unless that cancels badly, in which case
    /// a second pass sums the explicit residuals.
    #[inline(always)]
    fn residual_fixed<const R: usize>(&self, y: &[f64]) -> f64 {
        let len = self.len;
        let y = &y[..len];
        let main = len - len % 4;
        let shift = y[0];
        let rows: [&[f64]; R] = std::array::from_fn(|k| &self.q[k * len..(k + 1) * len]);
        let mut sd = [0.0f64; 4];
        let mut sdd = [0.0f64; 4];
        let mut c = [[0.0f64; 4]; R];
        for j in (0..main).step_by(4) {
            for i in 0..4 {
                let d = y[j + i] - shift;
                sd[i] += d;
                sdd[i] += d * d;
                for k in 0..R {
                    c[k][i] += rows[k][j + i] * d;
                }
            }
        }
        let mut sum_d = lanes(sd);
        let mut sum_dd = lanes(sdd);
        let mut coeff: [f64; R] = std::array::from_fn(|k| lanes(c[k]));
        for j in main..len {
            let d = y[j] - shift;
            sum_d += d;
            sum_dd += d * d;
            for k in 0..R {
                coeff[k] += rows[k][j] * d;
            }
        }
        let mean = sum_d / len as f64;
        let rss = sum_dd - sum_d * mean - coeff.iter().map(|c| c * c).sum::<f64>();
        if rss > CANCELLATION_GUARD * sum_dd {
            return rss;
        }
        let base = shift + mean;
        let mut acc = [0.0f64; 4];
        for j in (0..main).step_by(4) {
            for i in 0..4 {
                let mut r = y[j + i] - base;
                for k in 0..R {
                    r -= coeff[k] * rows[k][j + i];
                }
                acc[i] += r * r;
            }
        }
        let mut total = lanes(acc);
        for j in main..len {
            let mut r = y[j] - base;
            for k in 0..R {
                r -= coeff[k] * rows[k][j];
            }
            total += r * r;
        }
        total
    }

    /// Any order, always with explicit residuals.
    fn residual_any(&self, y: &[f64]) -> f64 {
        let len = self.len;
        let mean = y.iter().sum::<f64>() / len as f64;
        let coeff: Vec<f64> = self
            .q
            .chunks_exact(len)
            .map(|row| row.iter().zip(y).map(|(q, v)| q * (v - mean)).sum())
            .collect();
        (0..len)
            .map(|j| {
                let fit: f64 = coeff.iter().enumerate().map(|(k, c)| c * self.q[k * len + j]).sum();
                let e = y[j] - mean - fit;
                e * e
            })
            .sum()
    }
}

fn lanes(a: [f64; 4]) -> f64 {
    (a[0] + a[1]) + (a[2] + a[3])
}

fn profile_fluctuation(y: &[f64], window: usize, order: usize, segmentation: Segmentation) -> f64 {
    let n = y.len();
    let segments = n / window;
    let basis = PolyBasis::new(window, order);
    let mut total = 0.0;
    for v in 0..segments {
        total += basis.residual_ss(&y[v * window..(v + 1) * window]);
    }
    let mut covered = segments * window;
    if segmentation == Segmentation::BothEnds {
        let offset = n - segments * window;
        for v in 0..segments {
            let start = offset + v * window;
            total += basis.residual_ss(&y[start..start + window]);
        }
        covered *= 2;
    }
    (total / covered as f64).sqrt()
}

/// Ordinary least-squares line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (0 with only two points).
    pub stderr: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    let n = xs.len();
    if n < 2 {
        return Err(invalid("a line fit needs at least two points"));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(invalid("line fit abscissae are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let stderr = if n > 2 { (ssr / (nf - 2.0) / sxx).sqrt() } else { 0.0 };
    let r_squared = if syy > 0.0 { 1.0 - ssr / syy } else { 1.0 };
    Ok(LineFit {
        slope,
        intercept,
        stderr,
        r_squared,
    })
}

fn fit_curve(windows: &[usize], fluct: &[f64], lo: usize, hi: usize) -> Result<(LineFit, (usize, usize))> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut used = (usize::MAX, 0);
    for (&w, &f) in windows.iter().zip(fluct) {
        if w < lo || w > hi {
            continue;
        }
        if f <= 0.0 {
            return Err(Error::DegenerateFluctuation { window: w });
        }
        xs.push((w as f64).log10());
        ys.push(f.log10());
        used = (used.0.min(w), used.1.max(w));
    }
    if xs.len() < 2 {
        return Err(invalid(format!(
            "fit range [{lo}, {hi}] contains {} window(s); at least two are needed",
            xs.len()
        )));
    }
    Ok((linear_fit(&xs, &ys)?, used))
}

/// Full DFA: fluctuation curve over the configured windows plus the log-log
/// exponent fit.
pub fn dfa_exponent(x: &NumericSeries, cfg: &DfaConfig) -> Result<DfaResult> {
    let n = x.len();
    let windows = cfg.resolve_windows(n)?;
    let (lo, hi) = match cfg.fit_range {
        Some((lo, hi)) => {
            if lo > hi {
                return Err(invalid(format!("fit range [{lo}, {hi}] is reversed")));
            }
            if hi > n / 4 {
                return Err(invalid(format!("fit range upper bound {hi} exceeds N/4 = {}", n / 4)));
            }
            (lo, hi)
        }
        None => (0, n / 4),
    };
    let fluctuations = fluctuations(x.values(), &windows, cfg.order, cfg.segmentation)?;
    let (fit, range) = fit_curve(&windows, &fluctuations, lo, hi)?;
    Ok(DfaResult {
        window_sizes: windows,
        fluctuations,
        alpha: fit.slope,
        intercept: fit.intercept,
        fit_stderr: fit.stderr,
        r_squared: fit.r_squared,
        fit_range: range,
        series_len: n,
        order: cfg.order,
        segmentation: cfg.segmentation,
    })
}

/// DFA exponent of a stationary signal with autocorrelation `C(s) ~ s^-ζ`.
/// `ζ = 1` is accepted as the white-noise limit.
pub fn alpha_from_zeta(zeta: f64) -> Result<f64> {
    if !(zeta > 0.0 && zeta <= 1.0) {
        return Err(invalid(format!("zeta = {zeta} must lie in (0, 1]")));
    }
    Ok(1.0 - zeta / 2.0)
}

/// Spectral exponent `β` of `S(f) ~ f^-β` matching DFA exponent `alpha`.
pub fn beta_from_alpha(alpha: f64) -> f64 {
    2.0 * alpha - 1.0
}
