//! Matuszewska indices, orders and growth indices, estimated from log
//! profiles through the inf-over-λ / sup-over-λ representations.

mod battery;

pub use battery::{battery, BatteryReport, Subject, TheoremId};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fn_model::WeightFunction;
use crate::numeric::{geometric_windows, linspace};
use crate::profile::LogProfile;
use crate::seq_model::{QuotientSequence, WeightSequence};

/// A real number or `±∞`. Serializes as a JSON number, or `"inf"`/`"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ExtReal(pub f64);

impl ExtReal {
    pub const INF: ExtReal = ExtReal(f64::INFINITY);
    pub const ZERO: ExtReal = ExtReal(0.0);

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_inf(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// `1/x` with `1/0 = ∞` and `1/∞ = 0` (for nonnegative values).
    pub fn recip(self) -> ExtReal {
        let v = self.0;
        if v.is_nan() {
            ExtReal(f64::NAN)
        } else if v <= 0.0 {
            ExtReal::INF
        } else if v == f64::INFINITY {
            ExtReal::ZERO
        } else {
            ExtReal(1.0 / v)
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal(v)
    }
}

impl std::fmt::Display for ExtReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0 == f64::INFINITY {
            write!(f, "inf")
        } else if self.0 == f64::NEG_INFINITY {
            write!(f, "-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() {
            s.serialize_f64(v)
        } else if v == f64::INFINITY {
            s.serialize_str("inf")
        } else if v == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_str("nan")
        }
    }
}

/// Estimation range: `u = ln x` in `[log_x_min, log_x_max]`, λ up to
/// `lambda_max`, and the trend windows (in `u`).
#[derive(Debug, Clone, Serialize)]
pub struct IndexWindow {
    pub log_x_min: f64,
    pub log_x_max: f64,
    pub lambda_max: f64,
    pub trend_windows: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Residual {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub rho: f64,
    /// γ from a direct search over `(P_{σ,γ})`.
    pub gamma_check: ExtReal,
    /// Per-window statistics, earliest window first.
    pub trend: Trend,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trend {
    pub alpha: Vec<ExtReal>,
    pub beta: Vec<ExtReal>,
    pub mu: Vec<ExtReal>,
    pub rho: Vec<ExtReal>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexReport {
    pub alpha: ExtReal,
    pub beta: ExtReal,
    pub mu: ExtReal,
    pub rho: ExtReal,
    pub gamma: ExtReal,
    pub gamma_bar: ExtReal,
    pub method: String,
    pub window: IndexWindow,
    pub residual: Residual,
}

#[derive(Debug, Clone, Copy)]
pub struct EstimatorConfig {
    pub tol: f64,
    /// The estimation range is `[u_max / span, u_max]`.
    pub span: f64,
    pub points: usize,
    pub max_lambda_exp: u32,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            tol: 0.05,
            span: 4.0,
            points: 4096,
            max_lambda_exp: 20,
        }
    }
}

const LN2: f64 = std::f64::consts::LN_2;
const WINDOW_POINTS: usize = 512;

/// Sup and inf of `(L(u+ℓ) - L(u)) / ℓ` over sample points with `u+ℓ ≤ top`.
fn slope_extremes(p: &LogProfile, us: &[f64], fs: &[f64], ell: f64, top: f64) -> (f64, f64) {
    let mut sup = f64::NEG_INFINITY;
    let mut inf = f64::INFINITY;
    for (&u, &f) in us.iter().zip(fs) {
        if u + ell > top + 1e-12 {
            break;
        }
        let d = (p.at(u + ell) - f) / ell;
        if d.is_nan() {
            continue;
        }
        sup = sup.max(d);
        inf = inf.min(d);
    }
    (sup, inf)
}

fn lambda_count(len: f64, per: f64, cap: u32) -> u32 {
    ((len / LN2 / per).floor() as i64).clamp(1, cap as i64) as u32
}

/// α- and β-statistics: `min_k sup` and `max_k inf`, with the per-`k` values.
fn alpha_beta(p: &LogProfile, us: &[f64], fs: &[f64], top: f64, k_max: u32) -> (f64, f64, Vec<f64>, Vec<f64>) {
    let mut ups = Vec::with_capacity(k_max as usize);
    let mut lows = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let (s, i) = slope_extremes(p, us, fs, k as f64 * LN2, top);
        ups.push(s);
        lows.push(i);
    }
    let a = ups.iter().copied().filter(|v| v.is_finite() || *v == f64::INFINITY).fold(f64::INFINITY, f64::min);
    let b = lows.iter().copied().filter(|v| !v.is_nan()).fold(f64::NEG_INFINITY, f64::max);
    (a, b, ups, lows)
}

fn spread_last3(v: &[f64]) -> f64 {
    let n = v.len();
    let tail = &v[n.saturating_sub(3)..];
    let mx = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mn = tail.iter().copied().fold(f64::INFINITY, f64::min);
    if mx.is_finite() && mn.is_finite() {
        mx - mn
    } else {
        f64::NAN
    }
}

fn vanishing(s: &[f64]) -> bool {
    let n = s.len();
    n >= 3
        && s[n - 3..].iter().all(|&v| v > 0.0 && v.is_finite())
        && s[n - 1] <= 0.7 * s[n - 2]
        && s[n - 2] <= 0.7 * s[n - 3]
}

fn diverging(s: &[f64]) -> bool {
    let n = s.len();
    n >= 3
        && s[n - 3..].iter().all(|&v| v > 0.0)
        && (s[n - 1] == f64::INFINITY || (s[n - 1] >= 1.4 * s[n - 2] && s[n - 2] >= 1.4 * s[n - 3]))
}

/// Finite estimate plus per-window trend → extended real.
fn classify(est: f64, trend: &[f64], tol: f64) -> ExtReal {
    if est.is_nan() {
        return ExtReal(f64::NAN);
    }
    if est > 1e6 {
        return ExtReal::INF;
    }
    if est < -1e6 {
        return ExtReal(f64::NEG_INFINITY);
    }
    if est.abs() < 1e-6 {
        return ExtReal::ZERO;
    }
    if est > 0.0 && vanishing(trend) && trend[trend.len() - 1] < tol {
        return ExtReal::ZERO;
    }
    if est > 1.0 / tol && diverging(trend) {
        return ExtReal::INF;
    }
    ExtReal(est)
}

/// Largest `γ = 2^{j/8}` on the grid for which some `K = 2^k` gives
/// `sup σ(K^γ t)/σ(t) < K` on the sample points.
fn gamma_direct(p: &LogProfile, us: &[f64], fs: &[f64], top: f64, span: f64) -> ExtReal {
    let step = (us.len() / WINDOW_POINTS).max(1);
    let su: Vec<f64> = us.iter().step_by(step).copied().collect();
    let sf: Vec<f64> = fs.iter().step_by(step).copied().collect();
    let passes = |g: f64| -> bool {
        let mut k = 1u32;
        while (k as f64) * g * LN2 <= 0.5 * span {
            let ell = k as f64 * g * LN2;
            let (sup, _) = slope_extremes(p, &su, &sf, ell, top);
            if sup * ell < k as f64 * LN2 - 1e-9 {
                return true;
            }
            k *= 2;
        }
        false
    };
    let (jmin, jmax) = (-320i32, 384i32);
    if !passes(2f64.powf(jmin as f64 / 64.0)) {
        return ExtReal::ZERO;
    }
    if passes(2f64.powf(jmax as f64 / 64.0)) {
        return ExtReal::INF;
    }
    let (mut lo, mut hi) = (jmin, jmax);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if passes(2f64.powf(mid as f64 / 64.0)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ExtReal(2f64.powf(lo as f64 / 64.0))
}

/// Full index report of a log profile.
pub fn estimate(p: &LogProfile, cfg: &EstimatorConfig) -> IndexReport {
    let ub = p.hi;
    let ua = (ub / cfg.span).max(p.lo);
    let us = linspace(ua, ub, cfg.points);
    let fs: Vec<f64> = us.iter().map(|&u| p.at(u)).collect();
    let k_max = lambda_count(ub - ua, 4.0, cfg.max_lambda_exp);
    let (a_est, b_est, ups, lows) = alpha_beta(p, &us, &fs, ub, k_max);

    let mut mu_est = f64::INFINITY;
    let mut rho_est = f64::NEG_INFINITY;
    for (&u, &f) in us.iter().zip(&fs) {
        if u > 0.0 {
            mu_est = mu_est.min(f / u);
            rho_est = rho_est.max(f / u);
        }
    }

    let wlo = (ub / 16.0).max(p.lo).max(1e-3);
    let wins = if ub > wlo { geometric_windows(wlo, ub, 4) } else { vec![] };
    let mut tr = Trend {
        alpha: vec![],
        beta: vec![],
        mu: vec![],
        rho: vec![],
    };
    let (mut ta, mut tb, mut tm, mut trh) = (vec![], vec![], vec![], vec![]);
    for &(a, b) in &wins {
        let wu = linspace(a, b, WINDOW_POINTS);
        let wf: Vec<f64> = wu.iter().map(|&u| p.at(u)).collect();
        let kw = lambda_count(b - a, 2.0, cfg.max_lambda_exp);
        let (wa, wb, _, _) = alpha_beta(p, &wu, &wf, ub, kw);
        let wm = wu.iter().zip(&wf).map(|(u, f)| f / u).fold(f64::INFINITY, f64::min);
        let wr = wu.iter().zip(&wf).map(|(u, f)| f / u).fold(f64::NEG_INFINITY, f64::max);
        ta.push(wa);
        tb.push(wb);
        tm.push(wm);
        trh.push(wr);
    }
    for (dst, src) in [(&mut tr.alpha, &ta), (&mut tr.beta, &tb), (&mut tr.mu, &tm), (&mut tr.rho, &trh)] {
        *dst = src.iter().map(|&v| ExtReal(v)).collect();
    }

    let alpha = classify(a_est, &ta, cfg.tol);
    let beta = classify(b_est, &tb, cfg.tol);
    let mu = classify(mu_est, &tm, cfg.tol);
    let rho = classify(rho_est, &trh, cfg.tol);
    let gamma_check = gamma_direct(p, &us, &fs, ub, ub - ua);

    IndexReport {
        alpha,
        beta,
        mu,
        rho,
        gamma: alpha.recip(),
        gamma_bar: beta.recip(),
        method: "inf_over_lambda".into(),
        window: IndexWindow {
            log_x_min: ua,
            log_x_max: ub,
            lambda_max: 2f64.powi(k_max as i32),
            trend_windows: wins.iter().map(|&(a, b)| [a, b]).collect(),
        },
        residual: Residual {
            alpha: spread_last3(&ups),
            beta: spread_last3(&lows),
            mu: spread_last3(&tm),
            rho: spread_last3(&trh),
            gamma_check,
            trend: tr,
        },
    }
}

/// Index report of a weight function with the default estimator.
pub fn report(sigma: &WeightFunction) -> IndexReport {
    estimate(sigma.profile(), &EstimatorConfig::default())
}

fn ratio_window(sigma: &WeightFunction, lambda: f64) -> Result<Vec<f64>> {
    if !(lambda >= 1.0) {
        return Err(Error::Domain(format!("λ must be at least 1, got {lambda}")));
    }
    let p = sigma.profile();
    let top = p.hi - lambda.ln();
    let lo = (top - 4.0 * LN2).max(p.lo);
    if !(top > lo) {
        return Err(Error::Horizon(format!("λ={lambda} leaves no room below the ceiling")));
    }
    Ok(linspace(lo, top, 1024))
}

/// `sup σ(λx)/σ(x)` over the last four doubling windows below `X_max/λ`.
pub fn up_ratio(sigma: &WeightFunction, lambda: f64) -> Result<f64> {
    let p = sigma.profile();
    let l = lambda.ln();
    let us = ratio_window(sigma, lambda)?;
    Ok(us.iter().map(|&u| p.at(u + l) - p.at(u)).fold(f64::NEG_INFINITY, f64::max).exp())
}

/// `inf σ(λx)/σ(x)` over the same windows as [`up_ratio`].
pub fn low_ratio(sigma: &WeightFunction, lambda: f64) -> Result<f64> {
    let p = sigma.profile();
    let l = lambda.ln();
    let us = ratio_window(sigma, lambda)?;
    Ok(us.iter().map(|&u| p.at(u + l) - p.at(u)).fold(f64::INFINITY, f64::min).exp())
}

pub fn alpha(sigma: &WeightFunction) -> ExtReal {
    report(sigma).alpha
}

pub fn beta(sigma: &WeightFunction) -> ExtReal {
    report(sigma).beta
}

/// `(μ, ρ)`.
pub fn orders(sigma: &WeightFunction) -> (ExtReal, ExtReal) {
    let r = report(sigma);
    (r.mu, r.rho)
}

pub fn gamma(sigma: &WeightFunction) -> ExtReal {
    report(sigma).gamma
}

pub fn gamma_bar(sigma: &WeightFunction) -> ExtReal {
    report(sigma).gamma_bar
}

/// Indices of a positive sequence through its step embedding.
pub fn seq_indices(a: &QuotientSequence) -> IndexReport {
    estimate(&a.step_profile(false), &EstimatorConfig::default())
}

/// `γ(M) = β(m)`, clamped to `[0, ω(M)]` for (lc) inputs.
pub fn gamma_m(m: &WeightSequence) -> ExtReal {
    let q = m.quotients();
    let r = seq_indices(&q);
    if q.is_nondecreasing() {
        ExtReal(r.beta.0.max(0.0).min(r.mu.0))
    } else {
        r.beta
    }
}

/// `ω(M) = μ(m)`.
pub fn omega_m_index(m: &WeightSequence) -> ExtReal {
    seq_indices(&m.quotients()).mu
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(s: f64) -> WeightFunction {
        WeightFunction::from_log(format!("t^{s}"), 0.0, 460.0, move |u| s * u, None).unwrap()
    }

    #[test]
    fn ext_real_serialization() {
        assert_eq!(serde_json::to_string(&ExtReal::INF).unwrap(), "\"inf\"");
        assert_eq!(serde_json::to_string(&ExtReal(0.5)).unwrap(), "0.5");
        assert_eq!(ExtReal(0.0).recip(), ExtReal::INF);
        assert_eq!(ExtReal::INF.recip(), ExtReal::ZERO);
    }

    #[test]
    fn ratios_of_powers() {
        let sq = power(2.0);
        assert!((up_ratio(&sq, 3.0).unwrap() - 9.0).abs() < 1e-9);
        let rt = power(0.5);
        assert!((up_ratio(&rt, 4.0).unwrap() - 2.0).abs() < 1e-9);
        assert!((low_ratio(&rt, 4.0).unwrap() - 2.0).abs() < 1e-9);
        assert!(up_ratio(&rt, 0.5).is_err());
    }

    #[test]
    fn power_indices() {
        let r = report(&power(0.5));
        for v in [r.alpha, r.beta, r.mu, r.rho] {
            assert!((v.0 - 0.5).abs() < 1e-9, "{v}");
        }
        assert!((r.gamma.0 - 2.0).abs() < 1e-9);
        assert!((r.residual.gamma_check.0 - 2.0).abs() <= 0.2);
    }
}
