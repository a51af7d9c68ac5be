//! Heat traces over the Plancherel measure, Laplace-integral asymptotics,
//! and power-law decay fits for Novikov–Shubin exponents.

use crate::catalog::binomial;
use crate::dgroup;
use crate::error::{Error, Result};
use crate::heisenberg::{gamma_shell, HeisenbergContext};
use crate::linalg::{self, CMatrix};
use crate::basis::MultiIndex;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) on [a, b]: bisects the interval
/// with the largest error until the total error is within
/// max(abs_tol, rel_tol·|I|).
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<(f64, f64)> {
    let (v, e) = gk15(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v, err: e });
    let (mut total, mut err) = (v, e);
    for _ in 0..4000 {
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok((total, err));
        }
        let p = heap.pop().expect("nonempty");
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15(f, p.a, m);
        let (v2, e2) = gk15(f, m, p.b);
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.err;
        heap.push(Piece { a: p.a, b: m, value: v1, err: e1 });
        heap.push(Piece { a: m, b: p.b, value: v2, err: e2 });
    }
    if err <= abs_tol.max(rel_tol * total.abs()) * 10.0 {
        return Ok((total, err));
    }
    Err(Error::Quadrature(format!("[{a}, {b}]: error {err:e} after 4000 subdivisions (value {total:e})")))
}

/// ∫₀^∞ f for a non-negative integrand whose mass sits near `scale`:
/// geometric panels [0,h], [h,2h], [2h,4h], … with h = scale/8.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: &F, scale: f64, rel_tol: f64) -> Result<f64> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Quadrature(format!("invalid scale {scale}")));
    }
    let mut a = 0.0;
    let mut b = scale / 8.0;
    let mut total = 0.0;
    for _ in 0..400 {
        let (v, _) = integrate(f, a, b, 1e-300_f64.max(1e-3 * rel_tol * total), rel_tol)?;
        total += v;
        if b > 64.0 * scale && v <= 1e-3 * rel_tol * total {
            return Ok(total);
        }
        a = b;
        b *= 2.0;
    }
    Err(Error::Quadrature(format!("half-line integral did not settle (scale {scale:e})")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HeatMode {
    FullTrace,
    LowestBand,
}

impl std::str::FromStr for HeatMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full_trace" | "full" => Ok(HeatMode::FullTrace),
            "lowest_band" | "lowest" => Ok(HeatMode::LowestBand),
            _ => Err(Error::Input(format!("unknown heat mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HeatConfig {
    pub t_grid: Vec<f64>,
    /// Relative tolerance of each k-integral.
    pub quad_tol: f64,
    /// Relative shell-tail tolerance.
    pub tail_tol: f64,
    pub mode: HeatMode,
    /// Hard cap on the number of |γ|-shells in full-trace mode.
    pub max_shells: usize,
}

impl Default for HeatConfig {
    fn default() -> Self {
        HeatConfig {
            t_grid: log_grid(1e2, 1e5, 25),
            quad_tol: 1e-10,
            tail_tol: 1e-7,
            mode: HeatMode::LowestBand,
            max_shells: 600,
        }
    }
}

impl HeatConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t_grid.is_empty() || self.t_grid.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::Input("t grid must be non-empty and positive".into()));
        }
        if self.t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Input("t grid must be strictly increasing".into()));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol <= 1e-6) {
            return Err(Error::Input(format!("tail tolerance must be in (0, 1e-6], got {}", self.tail_tol)));
        }
        if !(self.quad_tol > 0.0 && self.quad_tol < 1e-3) {
            return Err(Error::Input(format!("quadrature tolerance must be in (0, 1e-3), got {}", self.quad_tol)));
        }
        Ok(())
    }
}

/// `points` log-spaced values from lo to hi inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()).collect();
    grid[0] = lo;
    grid[points - 1] = hi;
    grid
}

fn reflect(n: usize, p: usize) -> Result<usize> {
    if n == 0 || p > 2 * n + 1 {
        return Err(Error::Precondition(format!("need n >= 1 and p <= 2n+1 (n={n}, p={p})")));
    }
    Ok(if p <= n { p } else { 2 * n + 1 - p })
}

fn powi(x: f64, n: usize) -> f64 {
    x.powi(n as i32)
}

/// 2∫₀^∞ C(n,q) e^{−t(k² + (n−q)k)} kⁿ dk with q the Hodge-reflected degree.
pub fn lowest_band_trace(n: usize, p: usize, t: f64, quad_tol: f64) -> Result<f64> {
    let q = reflect(n, p)?;
    let c = (n - q) as f64;
    let mult = binomial(n as u64, q as u64) as f64;
    let f = |k: f64| powi(k, n) * (-t * (k * k + c * k)).exp();
    let scale = (n as f64 + 1.0) / (t * c + t.sqrt());
    Ok(2.0 * mult * integrate_half_line(&f, scale, quad_tol)?)
}

type BlockParts = Arc<[CMatrix; 3]>;

/// Block matrices of [P₁, P½, P₀] keyed by (n, p, γ); k-independent, so one
/// entry serves every quadrature node and every t.
#[derive(Default)]
pub struct BlockCache {
    map: RwLock<HashMap<(usize, usize, MultiIndex), BlockParts>>,
}

impl BlockCache {
    pub fn new() -> Self {
        BlockCache::default()
    }

    fn get(&self, n: usize, p: usize, gamma: &[i32]) -> Result<BlockParts> {
        let key = (n, p, gamma.to_vec());
        if let Some(v) = self.map.read().expect("cache lock").get(&key) {
            return Ok(v.clone());
        }
        let ctx = HeisenbergContext::new(n, 1.0, p)?;
        let block = ctx.block(gamma)?;
        let [p1, ph, p0] = ctx.laplacian_parts();
        let parts = Arc::new([
            linalg::matrix_of(&p1, &block.basis, &block.basis)?,
            linalg::matrix_of(&ph, &block.basis, &block.basis)?,
            linalg::matrix_of(&p0, &block.basis, &block.basis)?,
        ]);
        self.map.write().expect("cache lock").entry(key).or_insert(parts.clone());
        Ok(parts)
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn block_heat(parts: &[CMatrix; 3], k: f64, t: f64) -> f64 {
    let dim = parts[0].nrows();
    let m = &parts[0] * Complex64::new(k, 0.0)
        + &parts[1] * Complex64::new(k.sqrt(), 0.0)
        + &parts[2]
        + CMatrix::identity(dim, dim) * Complex64::new(k * k, 0.0);
    let eigs = if dim == 1 {
        vec![m[(0, 0)].re]
    } else {
        m.symmetric_eigenvalues().iter().copied().collect()
    };
    eigs.iter().map(|&l| (-t * l).exp()).sum()
}

/// Hurwitz zeta ζ(s, a) for s ≥ 2, a ≥ 1 (Euler–Maclaurin).
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    const N: usize = 12;
    let mut sum: f64 = (0..N).map(|j| (a + j as f64).powf(-s)).sum();
    let x = a + N as f64;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // Bernoulli B2, B4, B6, B8 divided by (2k)!.
    let coeffs = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0];
    let mut rising = s;
    let mut pw = x.powf(-s - 1.0);
    for (i, c) in coeffs.iter().enumerate() {
        sum += c * rising * pw;
        let j = 2.0 * i as f64;
        rising *= (s + j + 1.0) * (s + j + 2.0);
        pw /= x * x;
    }
    sum
}

#[derive(Clone, Debug, Serialize)]
pub struct FullTraceDetail {
    pub theta: f64,
    pub shells: usize,
    pub tail: f64,
}

/// Full trace: every block integrated over k separately, blocks summed
/// shell by shell in |γ|. The remaining shells are estimated from a fit
/// c₂/σ² + c₃/σ³ + c₄/σ⁴ (σ = |γ| + n + 1) to the last three shells; the
/// sum stops once two extra shells move the corrected total by less than
/// the tail tolerance.
pub fn full_trace(n: usize, p: usize, t: f64, config: &HeatConfig, cache: &BlockCache) -> Result<FullTraceDetail> {
    reflect(n, p)?;
    let s_min = -(p.min(n) as i32);
    let mut shells: Vec<(f64, f64)> = Vec::new();
    let mut partial = 0.0;
    let mut corrected: Vec<f64> = Vec::new();
    for (count, s) in (s_min..).enumerate() {
        if count >= config.max_shells {
            return Err(Error::Quadrature(format!("shell sum did not converge within {} shells at t={t}", config.max_shells)));
        }
        let mut shell = 0.0;
        for gamma in gamma_shell(n, p, s) {
            let parts = cache.get(n, p, &gamma)?;
            let f = |k: f64| powi(k, n) * block_heat(&parts, k, t);
            let scale = (n as f64 + 1.0) / (t * (2.0 * s.max(0) as f64 + 1.0) + t.sqrt());
            shell += 2.0 * integrate_half_line(&f, scale, config.quad_tol)?;
        }
        partial += shell;
        let sigma = s as f64 + n as f64 + 1.0;
        shells.push((sigma, shell));
        if count < 8 {
            corrected.push(partial);
            continue;
        }
        let tail = fitted_tail(&shells[shells.len() - 3..]);
        corrected.push(partial + tail);
        let c = corrected.len();
        let moved = (corrected[c - 1] - corrected[c - 3]).abs();
        if moved <= config.tail_tol * corrected[c - 1] && (corrected[c - 2] - corrected[c - 4]).abs() <= config.tail_tol * corrected[c - 2] {
            return Ok(FullTraceDetail {
                theta: corrected[c - 1],
                shells: count + 1,
                tail,
            });
        }
    }
    unreachable!()
}

fn fitted_tail(last: &[(f64, f64)]) -> f64 {
    let a = nalgebra::Matrix3::from_fn(|i, j| last[i].0.powi(-(j as i32) - 2));
    let b = nalgebra::Vector3::new(last[0].1, last[1].1, last[2].1);
    let Some(c) = a.lu().solve(&b) else { return 0.0 };
    let from = last[2].0 + 1.0;
    let tail = c[0] * hurwitz_zeta(2.0, from) + c[1] * hurwitz_zeta(3.0, from) + c[2] * hurwitz_zeta(4.0, from);
    tail.max(0.0)
}

/// θ_p(t) for the Heisenberg group in the configured mode.
pub fn trace_at(n: usize, p: usize, t: f64, config: &HeatConfig, cache: &BlockCache) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Precondition(format!("t must be positive, got {t}")));
    }
    match config.mode {
        HeatMode::LowestBand => lowest_band_trace(n, p, t, config.quad_tol),
        HeatMode::FullTrace => Ok(full_trace(n, p, t, config, cache)?.theta),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketEnd {
    Lower,
    Upper,
    Midpoint,
}

impl std::str::FromStr for BracketEnd {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lower" => Ok(BracketEnd::Lower),
            "upper" => Ok(BracketEnd::Upper),
            "midpoint" | "mid" => Ok(BracketEnd::Midpoint),
            _ => Err(Error::Input(format!("unknown bracket end {s:?}"))),
        }
    }
}

/// Linear coefficient a of the lowest D-group band a|λ| + |λ|².
pub fn dgroup_coefficient(n: usize, end: BracketEnd) -> f64 {
    let (lo, hi) = dgroup::lowest_bracket(n, 1.0);
    let (lo, hi) = (lo - 1.0, hi - 1.0);
    match end {
        BracketEnd::Lower => lo,
        BracketEnd::Upper => hi,
        BracketEnd::Midpoint => 0.5 * (lo + hi),
    }
}

/// 2π∫₀^∞ e^{−t(a r + r²)} r^{2n+1} dr: rotation invariance reduces the
/// integral over λ ∈ ℝ² to polar form, with Pfaffian weight r^{2n} and
/// Jacobian r; multiplicity 1.
pub fn dgroup_trace_at(n: usize, t: f64, end: BracketEnd, quad_tol: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Precondition("n must be >= 1".into()));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Precondition(format!("t must be positive, got {t}")));
    }
    let a = dgroup_coefficient(n, end);
    let f = |r: f64| powi(r, 2 * n + 1) * (-t * (a * r + r * r)).exp();
    let scale = (2.0 * n as f64 + 2.0) / (t * a + t.sqrt());
    Ok(2.0 * std::f64::consts::PI * integrate_half_line(&f, scale, quad_tol)?)
}

fn factorial(m: u32) -> f64 {
    (1..=m).map(|i| i as f64).product()
}

#[derive(Clone, Debug, Serialize)]
pub struct LaplaceRow {
    pub m: u32,
    pub a: f64,
    pub t: f64,
    pub integral: f64,
    /// m!/(aT)^{m+1}.
    pub leading: f64,
    pub ratio: f64,
    /// Ratio predicted with the first correction, 1 − (m+1)(m+2)/(a²T).
    pub corrected_prediction: f64,
    pub within_2pct: bool,
}

/// ∫₀^∞ k^m e^{−T(ak + k²)} dk against its leading Laplace asymptotic.
pub fn laplace_asymptotics_check(m: u32, a: f64, t_list: &[f64]) -> Result<Vec<LaplaceRow>> {
    if !(a > 0.0) {
        return Err(Error::Precondition(format!("a must be positive, got {a}")));
    }
    t_list
        .iter()
        .map(|&t| {
            let f = |k: f64| k.powi(m as i32) * (-t * (a * k + k * k)).exp();
            let integral = integrate_half_line(&f, (m as f64 + 1.0) / (a * t + t.sqrt()), 1e-12)?;
            let leading = factorial(m) / (a * t).powi(m as i32 + 1);
            let ratio = integral / leading;
            Ok(LaplaceRow {
                m,
                a,
                t,
                integral,
                leading,
                ratio,
                corrected_prediction: 1.0 - ((m + 1) * (m + 2)) as f64 / (a * a * t),
                within_2pct: (0.98..=1.0).contains(&ratio),
            })
        })
        .collect()
}

/// Fitted log-log slope of ∫₀^∞ k^m e^{−Tk²} dk over `t_list`.
pub fn quadratic_slope(m: u32, t_list: &[f64]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = t_list
        .iter()
        .map(|&t| {
            let f = |k: f64| k.powi(m as i32) * (-t * k * k).exp();
            integrate_half_line(&f, (m as f64 + 1.0) / t.sqrt(), 1e-12).map(|v| (t.ln(), v.ln()))
        })
        .collect::<Result<_>>()?;
    Ok(linear_fit(&pts)?.1)
}

/// Least-squares line y = c0 + c1 x; returns (c0, c1, stderr of c0, rms residual).
fn linear_fit_full(pts: &[(f64, f64)]) -> Result<(f64, f64, f64, f64)> {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return Err(Error::Fit("need at least two points".into()));
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("degenerate abscissae".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let c1 = sxy / sxx;
    let c0 = my - c1 * mx;
    let ss: f64 = pts.iter().map(|p| (p.1 - c0 - c1 * p.0).powi(2)).sum();
    let rms = (ss / n).sqrt();
    let dof = (pts.len() as f64 - 2.0).max(1.0);
    let s2 = ss / dof;
    let se0 = (s2 * (1.0 / n + mx * mx / sxx)).sqrt();
    Ok((c0, c1, se0, rms))
}

fn linear_fit(pts: &[(f64, f64)]) -> Result<(f64, f64)> {
    linear_fit_full(pts).map(|(a, b, _, _)| (a, b))
}

#[derive(Clone, Debug, Serialize)]
pub struct HeatSample {
    pub t: f64,
    pub theta: f64,
    /// −d log θ / d log t by central differences (absent at the ends).
    pub local_slope: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NSEstimate {
    pub alpha_hat: f64,
    pub stderr: f64,
    pub residual_rms: f64,
    pub alpha_closed: Option<f64>,
    pub alpha_closed_label: Option<String>,
    pub relative_error: Option<f64>,
    pub window_t_min: f64,
    pub window_t_max: f64,
    pub window_points: usize,
}

/// Local slopes by central differences in log t.
pub fn local_slopes(samples: &[(f64, f64)]) -> Vec<HeatSample> {
    (0..samples.len())
        .map(|i| {
            let local_slope = (i > 0 && i + 1 < samples.len()).then(|| {
                let (t0, y0) = samples[i - 1];
                let (t1, y1) = samples[i + 1];
                -(y1.ln() - y0.ln()) / (t1.ln() - t0.ln())
            });
            HeatSample { t: samples[i].0, theta: samples[i].1, local_slope }
        })
        .collect()
}

/// Decay exponent from (t, θ) samples. The asymptotic window is the longest
/// run of interior points, ending at the largest t, in which the local slope
/// changes by less than 2% per octave; at least `min_window` points are
/// required. The slope is then extrapolated to t → ∞ by a linear fit in 1/t.
pub fn fit_alpha(samples: &[(f64, f64)], min_window: usize) -> Result<NSEstimate> {
    if samples.len() < min_window + 2 {
        return Err(Error::Fit(format!("need at least {} samples, got {}", min_window + 2, samples.len())));
    }
    for w in samples.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::Fit("t values must be strictly increasing".into()));
        }
        if !(w[1].1 < w[0].1) || !(w[1].1 > 0.0) {
            return Err(Error::Fit(format!("theta is not positive and strictly decreasing near t={}", w[1].0)));
        }
    }
    let slopes = local_slopes(samples);
    let interior: Vec<(f64, f64)> = slopes.iter().filter_map(|s| s.local_slope.map(|v| (s.t, v))).collect();
    let mut start = interior.len() - 1;
    while start > 0 {
        let (t0, s0) = interior[start - 1];
        let (t1, s1) = interior[start];
        let octaves = (t1 / t0).log2();
        if ((s1 - s0) / s1).abs() / octaves >= 0.02 {
            break;
        }
        start -= 1;
    }
    let window = &interior[start..];
    if window.len() < min_window {
        return Err(Error::Fit(format!(
            "asymptotic window has {} points (need {min_window}); slope still drifting",
            window.len()
        )));
    }
    let pts: Vec<(f64, f64)> = window.iter().map(|&(t, s)| (1.0 / t, s)).collect();
    let (alpha_hat, _, stderr, residual_rms) = linear_fit_full(&pts)?;
    Ok(NSEstimate {
        alpha_hat,
        stderr,
        residual_rms,
        alpha_closed: None,
        alpha_closed_label: None,
        relative_error: None,
        window_t_min: window[0].0,
        window_t_max: window[window.len() - 1].0,
        window_points: window.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "n", rename_all = "snake_case")]
pub enum Group {
    Heisenberg(usize),
    DGroup(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Rational {
    pub num: u64,
    pub den: u64,
}

impl Rational {
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Closed-form Novikov–Shubin exponent: n+1 off the middle degrees and
/// (n+1)/2 at p ∈ {n, n+1} for H^{2n+1}; 2n+2 in degrees 0 and 1 for D^{4n+2}.
pub fn alpha_closed_form(group: Group, p: usize) -> Result<Rational> {
    match group {
        Group::Heisenberg(n) => {
            let q = reflect(n, p)?;
            let n = n as u64;
            Ok(if q == n as usize {
                if (n + 1).is_multiple_of(2) {
                    Rational { num: n.div_ceil(2), den: 1 }
                } else {
                    Rational { num: n + 1, den: 2 }
                }
            } else {
                Rational { num: n + 1, den: 1 }
            })
        }
        Group::DGroup(n) => {
            if n == 0 || p > 1 {
                return Err(Error::Precondition(format!("D group exponent available for p in {{0, 1}} only (p={p})")));
            }
            Ok(Rational { num: 2 * n as u64 + 2, den: 1 })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NSReport {
    pub group: Group,
    pub p: usize,
    pub mode: HeatMode,
    pub bracket_end: Option<BracketEnd>,
    pub estimate: NSEstimate,
    pub samples: Vec<HeatSample>,
}

fn finish(mut estimate: NSEstimate, closed: Rational) -> NSEstimate {
    estimate.alpha_closed = Some(closed.value());
    estimate.alpha_closed_label = Some(closed.to_string());
    estimate.relative_error = Some((estimate.alpha_hat - closed.value()).abs() / closed.value());
    estimate
}

/// Heat trace on the t grid and the fitted exponent for H^{2n+1}.
pub fn ns_heisenberg(n: usize, p: usize, config: &HeatConfig, cache: &BlockCache) -> Result<NSReport> {
    config.validate()?;
    let closed = alpha_closed_form(Group::Heisenberg(n), p)?;
    let thetas: Vec<(f64, f64)> = config
        .t_grid
        .par_iter()
        .map(|&t| trace_at(n, p, t, config, cache).map(|v| (t, v)))
        .collect::<Result<_>>()?;
    let estimate = finish(fit_alpha(&thetas, 8)?, closed);
    Ok(NSReport {
        group: Group::Heisenberg(n),
        p,
        mode: config.mode,
        bracket_end: None,
        estimate,
        samples: local_slopes(&thetas),
    })
}

/// Lowest-band heat trace and fitted exponent for D^{4n+2} in degree p ∈ {0,1}.
/// Degree 0 uses the exact band |λ|(2n) + |λ|²... with multiplicity 1.
pub fn ns_dgroup(n: usize, p: usize, end: BracketEnd, config: &HeatConfig) -> Result<NSReport> {
    config.validate()?;
    let closed = alpha_closed_form(Group::DGroup(n), p)?;
    let thetas: Vec<(f64, f64)> = config
        .t_grid
        .par_iter()
        .map(|&t| {
            let v = if p == 0 { dgroup_zero_form_trace(n, t, config.quad_tol) } else { dgroup_trace_at(n, t, end, config.quad_tol) };
            v.map(|v| (t, v))
        })
        .collect::<Result<_>>()?;
    let estimate = finish(fit_alpha(&thetas, 8)?, closed);
    Ok(NSReport {
        group: Group::DGroup(n),
        p,
        mode: HeatMode::LowestBand,
        bracket_end: (p == 1).then_some(end),
        estimate,
        samples: local_slopes(&thetas),
    })
}

/// Lowest 0-form band 2n|λ| + |λ|² (ψ_0) over the Plancherel measure.
pub fn dgroup_zero_form_trace(n: usize, t: f64, quad_tol: f64) -> Result<f64> {
    let a = 2.0 * n as f64;
    let f = |r: f64| powi(r, 2 * n + 1) * (-t * (a * r + r * r)).exp();
    let scale = (2.0 * n as f64 + 2.0) / (t * a + t.sqrt());
    Ok(2.0 * std::f64::consts::PI * integrate_half_line(&f, scale, quad_tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_exact_moments() {
        for m in 0..5u32 {
            for &(a, t) in &[(1.0, 10.0), (0.5, 1e4), (2.0, 1e-2)] {
                let f = |k: f64| k.powi(m as i32) * (-a * t * k).exp();
                let v = integrate_half_line(&f, (m as f64 + 1.0) / (a * t), 1e-12).unwrap();
                let exact = factorial(m) / (a * t).powi(m as i32 + 1);
                assert!(((v - exact) / exact).abs() < 1e-10, "m={m} a={a} t={t}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn hurwitz_values() {
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((hurwitz_zeta(2.0, 1.0) - z2).abs() < 1e-13);
        assert!((hurwitz_zeta(2.0, 3.0) - (z2 - 1.0 - 0.25)).abs() < 1e-13);
        assert!((hurwitz_zeta(4.0, 1.0) - std::f64::consts::PI.powi(4) / 90.0).abs() < 1e-13);
    }

    #[test]
    fn synthetic_fits() {
        let grid = log_grid(1e2, 1e4, 25);
        let exact: Vec<(f64, f64)> = grid.iter().map(|&t| (t, t.powi(-3))).collect();
        assert!((fit_alpha(&exact, 8).unwrap().alpha_hat - 3.0).abs() < 1e-6);
        let corr: Vec<(f64, f64)> = grid.iter().map(|&t| (t, t.powi(-2) * (1.0 + 5.0 / t))).collect();
        assert!((fit_alpha(&corr, 8).unwrap().alpha_hat - 2.0).abs() < 0.02);
        let mut bad = exact.clone();
        bad[5].1 = bad[4].1 * 2.0;
        assert!(matches!(fit_alpha(&bad, 8), Err(Error::Fit(_))));
    }

    #[test]
    fn closed_forms() {
        assert_eq!(alpha_closed_form(Group::Heisenberg(2), 1).unwrap().to_string(), "3");
        assert_eq!(alpha_closed_form(Group::Heisenberg(2), 2).unwrap().to_string(), "3/2");
        assert_eq!(alpha_closed_form(Group::Heisenberg(2), 3).unwrap().to_string(), "3/2");
        assert_eq!(alpha_closed_form(Group::Heisenberg(1), 1).unwrap().to_string(), "1");
        assert_eq!(alpha_closed_form(Group::DGroup(1), 1).unwrap().to_string(), "4");
        assert!(alpha_closed_form(Group::DGroup(1), 2).is_err());
    }

    #[test]
    fn lowest_band_large_t() {
        let t = 1e4;
        let v = lowest_band_trace(1, 0, t, 1e-12).unwrap();
        let lead = 2.0 / (t * t);
        assert!((v / lead - 1.0).abs() < 1e-3);
        let d = dgroup_trace_at(1, 1e5, BracketEnd::Lower, 1e-12).unwrap();
        let a = 3.0 - 7f64.sqrt();
        let lead = 2.0 * std::f64::consts::PI * factorial(3) / (a * 1e5).powi(4);
        assert!((d / lead - 1.0).abs() < 0.01, "{}", d / lead);
    }

    #[test]
    fn full_trace_one_dimensional() {
        // Δ₀ on H³: Σ_β e^{−t(2kβ + k + k²)} ⇒ θ ≈ (π²/4)/t² at large t.
        let cfg = HeatConfig { mode: HeatMode::FullTrace, ..HeatConfig::default() };
        let cache = BlockCache::new();
        let t = 1e4;
        let d = full_trace(1, 0, t, &cfg, &cache).unwrap();
        let lead = std::f64::consts::PI.powi(2) / 4.0 / (t * t);
        assert!((d.theta / lead - 1.0).abs() < 2e-3, "{d:?} {}", d.theta / lead);
        assert!(d.theta >= lowest_band_trace(1, 0, t, 1e-10).unwrap());
    }
}
