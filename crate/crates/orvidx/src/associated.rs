//! The associated function `ω_M`, the counting function `ν_m`, the conjugate
//! `φ*_ω` with its weight matrix, and the sequence/function duality checks.

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::fn_model::{check_omega, OmegaCondition, WeightFunction};
use crate::indices::{estimate, gamma_m, seq_indices, EstimatorConfig, ExtReal, IndexReport};
use crate::numeric::{geometric_windows, golden_min, linspace, log_integral, rel_gap};
use crate::profile::{interp, LogProfile};
use crate::seq_model::{check_condition, SeqCondition, WeightSequence};
use crate::verdict::{bounded_trend, num, nums, vanishing_trend, Status, Verdict};

/// Extra terms beyond the table are summed one by one up to this count.
const DIRECT_TERMS: f64 = 4096.0;
/// Samples of the extended part of `ln ω_M`.
const EXT_SAMPLES: usize = 2048;
/// Largest count represented exactly.
const EXACT_COUNT: f64 = 4_503_599_627_370_496.0;

/// `M` together with its sorted crossover table `ln m_p`.
#[derive(Clone)]
pub struct AssociatedPair {
    seq: WeightSequence,
    lc: bool,
    sorted: Vec<f64>,
    smooth_ext: bool,
    v_max: f64,
}

impl std::fmt::Debug for AssociatedPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "AssociatedPair({}, lc={})", self.seq.label(), self.lc)
    }
}

impl AssociatedPair {
    pub fn new(m: &WeightSequence) -> AssociatedPair {
        let lc = m.quotients().is_nondecreasing();
        let mut sorted = m.log_m_table().to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let smooth_ext = lc && m.closed().is_some_and(|c| c.smooth && c.x_max > n);
        let v_max = match m.closed() {
            Some(c) if smooth_ext => (c.log_m)(c.x_max),
            _ => *sorted.last().unwrap(),
        };
        AssociatedPair {
            seq: m.clone(),
            lc,
            sorted,
            smooth_ext,
            v_max,
        }
    }

    pub fn sequence(&self) -> &WeightSequence {
        &self.seq
    }

    pub fn is_lc(&self) -> bool {
        self.lc
    }

    /// Supremum of the `ln t` at which `ν_m` and `ω_M` are available.
    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    fn table_len(&self) -> usize {
        self.sorted.len()
    }

    fn horizon(&self, v: f64) -> Error {
        Error::Horizon(format!(
            "t = e^{v} needs quotients beyond the trusted range of {} (ln m ≤ {})",
            self.seq.label(),
            self.v_max
        ))
    }

    /// `ν_m(e^v) = #{j : ln m_j ≤ v}` (as `f64`; exact below `2^52`).
    pub fn nu_v(&self, v: f64) -> Result<f64> {
        if v.is_nan() {
            return Err(Error::Domain("ν_m at NaN".into()));
        }
        let count = self.sorted.partition_point(|&x| x <= v);
        if count < self.table_len() {
            return Ok(count as f64);
        }
        if !self.smooth_ext || v >= self.v_max {
            return Err(self.horizon(v));
        }
        Ok(self.last_below(v) + 1.0)
    }

    /// Largest index `n` with `ln m(n) ≤ v`, beyond the table.
    fn last_below(&self, v: f64) -> f64 {
        let c = self.seq.closed().expect("extension needs an evaluator");
        let lm = |x: f64| (c.log_m)(x);
        let mut lo = (self.table_len() as f64 - 1.0).ln();
        let mut hi = c.x_max.ln();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if !(mid > lo && mid < hi) {
                break;
            }
            if lm(mid.exp()) <= v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = lo.exp();
        if x >= EXACT_COUNT {
            return x;
        }
        let mut n = x.floor();
        while lm(n + 1.0) <= v {
            n += 1.0;
        }
        while n > 0.0 && lm(n) > v {
            n -= 1.0;
        }
        n
    }

    /// `ν_m(t)`; zero for `t ≤ 0`.
    pub fn nu(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        self.nu_v(t.ln())
    }

    /// `ω_M(e^v)`. For (lc) `M` this is the partial sum
    /// `Σ_{j<ν} (v - ln m_j) = ν v - ln M_ν`, extended past the table by
    /// Euler–Maclaurin on the evaluator; otherwise the direct supremum.
    pub fn omega_v(&self, v: f64) -> Result<f64> {
        if !self.lc {
            return self.omega_direct_v(v);
        }
        let n = self.nu_v(v)?;
        let big = self.seq.log_big_m_table();
        let p = self.table_len();
        if n <= p as f64 {
            let k = n as usize;
            return Ok((k as f64 * v - big[k]).max(0.0));
        }
        let base = p as f64 * v - big[p];
        Ok(base + self.extension_sum(v, p as f64, n - 1.0))
    }

    /// `Σ_{j=a}^{b} (v - ln m(j))` for the evaluator.
    fn extension_sum(&self, v: f64, a: f64, b: f64) -> f64 {
        let c = self.seq.closed().expect("extension needs an evaluator");
        let g = |x: f64| v - (c.log_m)(x);
        if b - a <= DIRECT_TERMS {
            let mut s = 0.0;
            let mut j = a;
            while j <= b {
                s += g(j);
                j += 1.0;
            }
            return s;
        }
        let lint = log_integral(
            |w| {
                let gx = g(w.exp());
                if gx > 0.0 {
                    gx.ln() + w
                } else {
                    f64::NEG_INFINITY
                }
            },
            a.ln(),
            b.ln(),
            1e-12,
        );
        let dg = |x: f64| {
            let h = (1e-6 * x).max(1e-3);
            (g(x + h) - g(x - h)) / (2.0 * h)
        };
        lint.exp() + 0.5 * (g(a) + g(b)) + (dg(b) - dg(a)) / 12.0
    }

    /// `sup_{p ≤ P} (p v - ln M_p)` over the table only.
    pub fn omega_direct_v(&self, v: f64) -> Result<f64> {
        let big = self.seq.log_big_m_table();
        let (mut best, mut arg) = (0.0, 0);
        for (p, &b) in big.iter().enumerate() {
            let x = p as f64 * v - b;
            if x > best {
                best = x;
                arg = p;
            }
        }
        if arg + 1 == big.len() {
            return Err(self.horizon(v));
        }
        Ok(best)
    }

    /// `ω_M(t)`; zero for `t ≤ 0`.
    pub fn omega(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        self.omega_v(t.ln())
    }

    /// `∫_0^t ν_m(r)/r dr` summed piece by piece over the steps of `ν_m`
    /// (table range only).
    pub fn nu_integral_v(&self, v: f64) -> Result<f64> {
        let n = self.nu_v(v)?;
        if n > self.table_len() as f64 || !self.lc {
            return Err(Error::Horizon(format!("piecewise integral at e^{v} leaves the table")));
        }
        let l = &self.sorted;
        let n = n as usize;
        if n == 0 {
            return Ok(0.0);
        }
        let mut s = 0.0;
        for j in 1..n {
            s += j as f64 * (l[j] - l[j - 1]);
        }
        Ok(s + n as f64 * (v - l[n - 1]))
    }

    /// `d_M(t) = ln ω_M(t) / ln t`, defined where `ω_M(t) ≥ 1` and `t > 1`.
    pub fn d_m(&self, t: f64) -> Result<Option<f64>> {
        let w = self.omega(t)?;
        Ok(if w >= 1.0 && t > 1.0 { Some(w.ln() / t.ln()) } else { None })
    }

    fn top(&self) -> f64 {
        let v = if self.lc {
            self.v_max
        } else {
            // the direct sup stays inside the table while v < ln m_{P-1}
            *self.seq.log_m_table().last().unwrap()
        };
        v - 1e-9 * (1.0 + v.abs())
    }

    fn base(&self) -> f64 {
        self.sorted[0].max(0.0)
    }

    /// `ω_M` as a weight function on `[e^{max(ln m_0, 0) + 1}, e^{v_max})`.
    pub fn omega_fn(&self) -> Result<WeightFunction> {
        let lo = self.base() + 1.0;
        let hi = self.top();
        if !(hi > lo + 1.0) {
            return Err(self.horizon(hi));
        }
        let table_top = if self.lc {
            *self.sorted.last().unwrap() - 1e-9 * (1.0 + self.sorted.last().unwrap().abs())
        } else {
            hi
        };
        let me = self.clone();
        let exact = move |v: f64| me.omega_v(v).map(f64::ln).unwrap_or(f64::NAN);
        let f: Box<dyn Fn(f64) -> f64 + Send + Sync> = if hi > table_top {
            let vs = linspace(table_top, hi, EXT_SAMPLES);
            let ys: Vec<f64> = vs.iter().map(|&v| exact(v)).collect();
            Box::new(move |v| if v <= table_top { exact(v) } else { interp(&vs, &ys, v) })
        } else {
            Box::new(exact)
        };
        WeightFunction::from_profile(format!("omega_M({})", self.seq.label()), lo.exp(), LogProfile::new(lo, hi, f), false)
    }

    /// `ν_m` as a (step) weight function on `[max(m_0, 1), e^{v_max})`.
    pub fn nu_fn(&self) -> Result<WeightFunction> {
        let lo = self.base();
        let hi = self.top();
        if !(hi > lo + 1.0) {
            return Err(self.horizon(hi));
        }
        let me = self.clone();
        let f = move |v: f64| me.nu_v(v).map(f64::ln).unwrap_or(f64::NAN);
        WeightFunction::from_profile(format!("nu_m({})", self.seq.label()), lo.exp(), LogProfile::new(lo, hi, f), true)
    }
}

/// `ω_M(t) = sup_p ln(t^p / M_p)`.
pub fn omega_m(m: &WeightSequence, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("ω_M needs t ≥ 0, got {t}")));
    }
    AssociatedPair::new(m).omega(t)
}

/// `ν_m(t) = #{j : m_j ≤ t}`.
pub fn nu_m(m: &WeightSequence, t: f64) -> Result<f64> {
    AssociatedPair::new(m).nu(t)
}

/// `n` points spaced geometrically from `m_0/e` to just below `m_{P-1}`.
pub fn table_grid(m: &WeightSequence, n: usize) -> Vec<f64> {
    let tab = m.log_m_table();
    let lo = tab.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
    let hi = tab[tab.len() - 1];
    linspace(lo, hi - 1e-6 * (1.0 + hi.abs()), n).into_iter().map(f64::exp).collect()
}

/// Compares `ω_M(t)` with `∫_0^t ν_m(r)/r dr` on `t_grid`; holds when the
/// largest relative gap is at most `1e-9`.
pub fn integral_relation_check(m: &WeightSequence, t_grid: &[f64]) -> Verdict {
    let pair = AssociatedPair::new(m);
    if !pair.is_lc() {
        return Verdict::new("integral_relation", Status::Inconclusive, json!({"reason": "M is not log-convex"}));
    }
    let mut worst: f64 = 0.0;
    let mut at = f64::NAN;
    for &t in t_grid {
        let pair_vals = if t <= 0.0 {
            Ok((0.0, 0.0))
        } else {
            let v = t.ln();
            pair.omega_v(v).and_then(|w| pair.nu_integral_v(v).map(|i| (w, i)))
        };
        match pair_vals {
            Ok((w, i)) => {
                let g = rel_gap(w, i, 1e-300);
                if g > worst || at.is_nan() {
                    worst = g;
                    at = t;
                }
            }
            Err(e) => {
                return Verdict::new(
                    "integral_relation",
                    Status::Inconclusive,
                    json!({"reason": e.to_string(), "t": num(t)}),
                )
            }
        }
    }
    Verdict::new(
        "integral_relation",
        Status::from_bool(worst <= 1e-9),
        json!({"max_rel_gap": num(worst), "at": num(at), "points": t_grid.len()}),
    )
}

/// Value of `φ*_ω(x)` with its maximizer `y`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhiStar {
    pub value: f64,
    pub argmax: f64,
    /// The maximizer sits within 1% of `ln X_max`.
    pub censored: bool,
}

/// `φ*_ω(x) = sup_{y ≥ 0} (xy - ω(e^y))` over `y ∈ [0, ln X_max]`.
pub fn phi_star(omega: &WeightFunction, x: f64) -> Result<PhiStar> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("φ* needs x ≥ 0, got {x}")));
    }
    let p = omega.profile();
    let top = p.hi;
    let obj = |y: f64| {
        let w = if y >= p.lo { p.at(y).exp() } else { omega.eval(y.exp()) };
        x * y - w
    };
    let ys = linspace(0.0, top, 2049);
    let (mut bi, mut bv) = (0, f64::NEG_INFINITY);
    for (i, &y) in ys.iter().enumerate() {
        let v = obj(y);
        if v > bv {
            bi = i;
            bv = v;
        }
    }
    let a = ys[bi.saturating_sub(1)];
    let b = ys[(bi + 1).min(ys.len() - 1)];
    let (y, m) = golden_min(|y| -obj(y), a, b, 1e-12 * (1.0 + top));
    let (argmax, value) = if -m > bv { (y, -m) } else { (ys[bi], bv) };
    Ok(PhiStar {
        value,
        argmax,
        censored: argmax >= 0.99 * top,
    })
}

/// `ln W^ℓ_j = φ*_ω(ℓj)/ℓ`; a censored maximum is a horizon error.
pub fn weight_matrix(omega: &WeightFunction, l: f64, j: usize) -> Result<f64> {
    if !(l > 0.0) {
        return Err(Error::Domain(format!("ℓ must be positive, got {l}")));
    }
    let ps = phi_star(omega, l * j as f64)?;
    if ps.censored {
        return Err(Error::Horizon(format!(
            "φ* maximizer at the ceiling for ℓ={l}, j={j}"
        )));
    }
    Ok(ps.value / l)
}

/// `ln W^ℓ_j` for `j = 0..=n` together with a log-convexity verdict.
pub fn weight_matrix_row(omega: &WeightFunction, l: f64, n: usize) -> Result<(Vec<f64>, Verdict)> {
    let row = (0..=n).map(|j| weight_matrix(omega, l, j)).collect::<Result<Vec<f64>>>()?;
    let bad = row
        .windows(3)
        .position(|w| w[2] - w[1] < w[1] - w[0] - 1e-9 * (1.0 + w[1].abs()));
    let v = Verdict::new(
        "lc",
        Status::from_bool(bad.is_none()),
        json!({"first_violation": bad.map(|i| i + 1), "l": num(l)}),
    );
    Ok((row, v))
}

/// `W^ℓ` normalized to `W_0 = 1`, as a weight sequence.
pub fn weight_matrix_sequence(omega: &WeightFunction, l: f64, n: usize) -> Result<WeightSequence> {
    let (row, _) = weight_matrix_row(omega, l, n)?;
    let w0 = row[0];
    WeightSequence::from_log_big_m(row.iter().map(|x| x - w0).collect()).map(|s| s.with_label(format!("W^{l}")))
}

/// Index-level duality between `m`, `ν_m` and `ω_M`.
#[derive(Debug, Clone, Serialize)]
pub struct DualityReport {
    pub beta_m: ExtReal,
    pub alpha_m: ExtReal,
    pub alpha_nu: ExtReal,
    pub beta_nu: ExtReal,
    pub alpha_om: ExtReal,
    pub beta_om: ExtReal,
    pub mu_om: ExtReal,
    pub rho_om: ExtReal,
    pub mu_m: ExtReal,
    pub gamma_m: ExtReal,
    pub gamma_om: ExtReal,
    pub ratio_liminf: ExtReal,
    pub ratio_limsup: ExtReal,
    pub mg: Status,
    pub srs: Verdict,
    pub checks: Vec<Verdict>,
}

impl DualityReport {
    /// No check fails.
    pub fn consistent(&self) -> bool {
        self.checks.iter().all(|c| !c.fails())
    }
}

/// `a·b = 1` within `tol`; `0·∞` counts as a match.
fn reciprocal(id: &str, a: ExtReal, b: ExtReal, tol: f64) -> Verdict {
    let w = json!({"a": a, "b": b});
    let st = if a.is_finite() && b.is_finite() && a.0 > 0.0 && b.0 > 0.0 {
        Status::from_bool((a.0 * b.0 - 1.0).abs() <= tol)
    } else if (a.0 == 0.0 && b.is_inf()) || (a.is_inf() && b.0 == 0.0) {
        Status::Holds
    } else {
        Status::Inconclusive
    };
    Verdict::new(id, st, w)
}

/// `a = b` within `tol` on the direct or the reciprocal scale (large finite
/// estimates of an infinite index agree through their reciprocals).
fn close(id: &str, a: ExtReal, b: ExtReal, tol: f64) -> Verdict {
    let st = if a.is_finite() && b.is_finite() {
        Status::from_bool((a.0 - b.0).abs() <= tol || (a.recip().0 - b.recip().0).abs() <= tol)
    } else if a.is_inf() && b.is_inf() {
        Status::Holds
    } else {
        Status::Inconclusive
    };
    Verdict::new(id, st, json!({"a": a, "b": b}))
}

/// Window minima and maxima of `ln(ν_m/ω_M)` over the last quarter range.
fn ratio_bounds(nu: &WeightFunction, om: &WeightFunction) -> (ExtReal, ExtReal, serde_json::Value) {
    let (pn, po) = (nu.profile(), om.profile());
    let hi = pn.hi.min(po.hi);
    let lo = (0.25 * hi).max(pn.lo).max(po.lo);
    let (mut mins, mut maxs) = (vec![], vec![]);
    for (a, b) in geometric_windows(lo, hi, 4) {
        let r: Vec<f64> = linspace(a, b, 128).iter().map(|&v| pn.at(v) - po.at(v)).collect();
        mins.push(r.iter().copied().fold(f64::INFINITY, f64::min));
        maxs.push(r.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    }
    let inf = if vanishing_trend(&mins) == Status::Holds {
        ExtReal::ZERO
    } else {
        ExtReal(mins.last().unwrap().exp())
    };
    let sup = if bounded_trend(&maxs) == Status::Fails {
        ExtReal::INF
    } else {
        ExtReal(maxs.last().unwrap().exp())
    };
    (inf, sup, json!({"log_min": nums(&mins), "log_max": nums(&maxs)}))
}

/// Duality report with the default tolerance `0.1`.
pub fn duality_report(m: &WeightSequence) -> Result<DualityReport> {
    duality_report_with(m, 0.1)
}

pub fn duality_report_with(m: &WeightSequence, tol: f64) -> Result<DualityReport> {
    let pair = AssociatedPair::new(m);
    let nu = pair.nu_fn()?;
    let om = pair.omega_fn()?;
    let cfg = EstimatorConfig::default();
    let rm = seq_indices(&m.quotients());
    let rn = estimate(nu.profile(), &cfg);
    let ro = estimate(om.profile(), &cfg);
    let (ratio_liminf, ratio_limsup, ratio_w) = ratio_bounds(&nu, &om);
    let mg = check_condition(m, SeqCondition::Mg)?.status;
    let g_m = gamma_m(m);

    let srs_idx = rm.alpha.is_finite() && rm.beta.0 > cfg.tol;
    let srs_ratio = ratio_liminf.0 > 0.0 && ratio_limsup.is_finite();
    let srs_om = ro.alpha.is_finite() && ro.beta.0 > cfg.tol;
    let srs = Verdict::new(
        "srs",
        Status::from_bool(srs_idx),
        json!({
            "alpha_m_finite_beta_m_positive": srs_idx,
            "ratio_bounded_away": srs_ratio,
            "alpha_om_finite_beta_om_positive": srs_om,
            "agree": srs_idx == srs_ratio && srs_idx == srs_om,
            "ratio": ratio_w,
        }),
    );

    let mut checks = vec![
        reciprocal("beta_m_alpha_nu", rm.beta, rn.alpha, tol),
        reciprocal("alpha_m_beta_nu", rm.alpha, rn.beta, tol),
        reciprocal("rho_om_mu_m", ro.rho, rm.mu, tol),
        close("beta_nu_beta_om", rn.beta, ro.beta, tol),
    ];
    let ge = if rn.alpha.is_inf() || (rn.alpha.is_finite() && ro.alpha.is_finite()) {
        Status::from_bool(rn.alpha.0 >= ro.alpha.0 - tol)
    } else {
        Status::Inconclusive
    };
    checks.push(Verdict::new("alpha_nu_ge_alpha_om", ge, json!({"alpha_nu": rn.alpha, "alpha_om": ro.alpha})));
    if srs_idx {
        checks.push(reciprocal("alpha_om_beta_m", ro.alpha, rm.beta, tol));
        checks.push(reciprocal("beta_om_alpha_m", ro.beta, rm.alpha, tol));
    }
    if mg == Status::Holds {
        checks.push(close("mg_gamma", g_m, ro.gamma, tol));
    }
    checks.push(omega_dominates_nu(&pair));

    Ok(DualityReport {
        beta_m: rm.beta,
        alpha_m: rm.alpha,
        alpha_nu: rn.alpha,
        beta_nu: rn.beta,
        alpha_om: ro.alpha,
        beta_om: ro.beta,
        mu_om: ro.mu,
        rho_om: ro.rho,
        mu_m: rm.mu,
        gamma_m: g_m,
        gamma_om: ro.gamma,
        ratio_liminf,
        ratio_limsup,
        mg,
        srs,
        checks,
    })
}

/// `ω_M(et) ≥ ν_m(t)` on a grid in `ln t`.
fn omega_dominates_nu(pair: &AssociatedPair) -> Verdict {
    let lo = pair.base();
    let hi = pair.top() - 1.0;
    let mut worst = f64::INFINITY;
    let mut n = 0;
    for v in linspace(lo, hi.max(lo), 256) {
        if let (Ok(w), Ok(c)) = (pair.omega_v(v + 1.0), pair.nu_v(v)) {
            worst = worst.min(w - c);
            n += 1;
        }
    }
    let st = if n == 0 { Status::Inconclusive } else { Status::from_bool(worst >= -1e-9) };
    Verdict::new("omega_et_ge_nu", st, json!({"min_gap": num(worst), "points": n}))
}

/// `ω*_M̂(x) = sup_p (p ln(p/x) - p - ln M̂_p)` exactly from the table of `M̂`;
/// `None` when the maximizer is the last tabulated index.
fn hat_conjugate(big_hat: &[f64], x: f64) -> Option<f64> {
    let (mut best, mut arg) = (0.0, 0);
    for (p, &b) in big_hat.iter().enumerate().skip(1) {
        let pf = p as f64;
        let v = pf * (pf / x).ln() - pf - b;
        if v > best {
            best = v;
            arg = p;
        }
    }
    (arg + 1 < big_hat.len()).then_some(best)
}

/// Sandwich `ω*_M̂(1/s) ≤ ω_M(s) ≤ ω*_M̂(1/(es))` on `s = e^{k/8}` and the
/// shift `γ(ω_M̂) = γ(ω_M) + 1` within `2·tol`.
pub fn hat_relation_check(m: &WeightSequence, tol: f64) -> Verdict {
    let hat = m.hat();
    let pair = AssociatedPair::new(m);
    let pair_h = AssociatedPair::new(&hat);
    let cfg = EstimatorConfig::default();
    let gammas = pair
        .omega_fn()
        .and_then(|a| pair_h.omega_fn().map(|b| (a, b)))
        .map(|(a, b)| (estimate(a.profile(), &cfg).gamma, estimate(b.profile(), &cfg).gamma));
    let (g, gh) = match gammas {
        Ok(x) => x,
        Err(e) => return Verdict::new("hat_relation", Status::Inconclusive, json!({"reason": e.to_string()})),
    };
    if !(gh.0 > 1.0) {
        return Verdict::new(
            "hat_relation",
            Status::Inconclusive,
            json!({"reason": "gamma(omega_M_hat) is not above 1", "gamma_hat": gh}),
        );
    }
    let big_h = hat.log_big_m_table();
    let mut pts = 0;
    let mut violations = vec![];
    for k in -16..=400 {
        let v = k as f64 / 8.0;
        let (lower, upper) = match (hat_conjugate(big_h, (-v).exp()), hat_conjugate(big_h, (-v - 1.0).exp())) {
            (Some(a), Some(b)) => (a, b),
            _ => break,
        };
        let w = match pair.omega_v(v) {
            Ok(w) => w,
            Err(_) => break,
        };
        let slack = 1e-9 * (1.0 + w.abs());
        if lower > w + slack || w > upper + slack {
            violations.push(v.exp());
        }
        pts += 1;
    }
    let shift_ok = g.is_finite() && gh.is_finite() && (gh.0 - g.0 - 1.0).abs() <= 2.0 * tol;
    let st = if pts < 16 {
        Status::Inconclusive
    } else {
        Status::from_bool(violations.is_empty() && shift_ok)
    };
    Verdict::new(
        "hat_relation",
        st,
        json!({
            "grid_points": pts,
            "sandwich_violations": nums(&violations),
            "gamma": g,
            "gamma_hat": gh,
            "shift": num(gh.0 - g.0),
        }),
    )
}

/// Checks that `ϱ` (with derivative `dϱ`) is a proximate order admitted by
/// `σ`, and when its limit is positive that all four indices of `σ` equal it
/// and (ω₁), (ω₆) hold.
pub fn proximate_order_check(
    rho: impl Fn(f64) -> f64,
    drho: impl Fn(f64) -> f64,
    sigma: &WeightFunction,
    tol: f64,
) -> Verdict {
    let p = sigma.profile();
    let lo = (p.hi / 16.0).max(p.lo + 1.0);
    let windows: Vec<Vec<f64>> = geometric_windows(lo, p.hi, 4).into_iter().map(|(a, b)| linspace(a, b, 64)).collect();
    let stat = |f: &dyn Fn(f64) -> f64| -> (Vec<f64>, Vec<f64>) {
        let mut mins = vec![];
        let mut maxs = vec![];
        for w in &windows {
            let vals: Vec<f64> = w.iter().map(|&u| f(u)).collect();
            mins.push(vals.iter().copied().fold(f64::INFINITY, f64::min));
            maxs.push(vals.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        }
        (mins, maxs)
    };

    let nonneg = linspace(p.lo, p.hi, 1024).iter().all(|&u| rho(u.exp()) >= 0.0);
    let (rmin, rmax) = stat(&|u: f64| rho(u.exp()));
    let spread: Vec<f64> = rmin.iter().zip(&rmax).map(|(a, b)| (b - a).max(1e-300).ln()).collect();
    let limit_ok = *spread.last().unwrap() < (1e-9f64).ln() || vanishing_trend(&spread) == Status::Holds;
    let (_, dmax) = stat(&|u: f64| {
        let t = u.exp();
        (t * drho(t) * u).abs().max(1e-300).ln()
    });
    let d_ok = *dmax.last().unwrap() < (1e-9f64).ln() || vanishing_trend(&dmax) == Status::Holds;
    let (amin, amax) = stat(&|u: f64| p.at(u) - u * rho(u.exp()));
    let neg_min: Vec<f64> = amin.iter().map(|x| -x).collect();
    let admits = bounded_trend(&amax) == Status::Holds && bounded_trend(&neg_min) == Status::Holds;
    let limit = rho(p.hi.exp());

    let is_order = nonneg && limit_ok && d_ok;
    let mut w = json!({
        "nonnegative": nonneg,
        "limit_exists": limit_ok,
        "derivative_condition": d_ok,
        "admits": admits,
        "limit": num(limit),
        "log_ratio_max": nums(&amax),
        "log_ratio_min": nums(&amin),
    });
    if !(is_order && admits) {
        return Verdict::new("proximate_order", Status::Fails, w);
    }
    if limit <= tol {
        w["indices_asserted"] = json!(false);
        return Verdict::new("proximate_order", Status::Holds, w);
    }
    let rep: IndexReport = estimate(p, &EstimatorConfig::default());
    let idx_ok = [rep.alpha, rep.beta, rep.mu, rep.rho]
        .iter()
        .all(|x| x.is_finite() && (x.0 - limit).abs() <= tol);
    let om1 = check_omega(sigma, OmegaCondition::Om1).status;
    let om6 = check_omega(sigma, OmegaCondition::Om6).status;
    w["indices_asserted"] = json!(true);
    w["indices"] = json!({"alpha": rep.alpha, "beta": rep.beta, "mu": rep.mu, "rho": rep.rho});
    w["om1"] = json!(om1);
    w["om6"] = json!(om6);
    let st = Status::from_bool(idx_ok && om1 == Status::Holds && om6 == Status::Holds);
    Verdict::new("proximate_order", st, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{counterexample_sequence, gevrey_seq, proximate_family, COUNTEREXAMPLE_PMAX};

    fn brute_sup(alpha: f64, t: f64, pmax: usize) -> f64 {
        let mut lf = 0.0;
        let mut best: f64 = 0.0;
        for p in 1..=pmax {
            lf += (p as f64).ln();
            best = best.max(p as f64 * t.ln() - alpha * lf);
        }
        best
    }

    #[test]
    fn omega_of_factorials() {
        let g1 = gevrey_seq(1.0, 4096).unwrap();
        assert!((omega_m(&g1, 3.0).unwrap() - 4.5f64.ln()).abs() < 1e-12);
        let g2 = gevrey_seq(2.0, 4096).unwrap();
        assert!((omega_m(&g2, 4.0).unwrap() - brute_sup(2.0, 4.0, 64)).abs() < 1e-12);
        assert_eq!(omega_m(&g1, 0.5).unwrap(), 0.0);
        assert_eq!(omega_m(&g1, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn counting_function() {
        let g1 = gevrey_seq(1.0, 4096).unwrap();
        assert_eq!(nu_m(&g1, 2.5).unwrap(), 2.0);
        assert_eq!(nu_m(&g1, 0.5).unwrap(), 0.0);
        // ties count
        assert_eq!(nu_m(&g1, 3.0).unwrap(), 3.0);
        // past the table via the evaluator: m_j = j+1 ≤ 1e6 for j < 1e6
        assert_eq!(nu_m(&g1, 1e6).unwrap(), 1e6);
    }

    #[test]
    fn counting_matches_linear_scan_on_blocks() {
        let m = counterexample_sequence(COUNTEREXAMPLE_PMAX).unwrap();
        let pair = AssociatedPair::new(&m);
        let tab = m.log_m_table();
        for &p in &[1usize, 2, 3, 7, 8, 63, 64, 65, 127, 128, 5000, 16384, 16385, 30000] {
            let v = tab[p];
            let scan = tab.iter().filter(|&&x| x <= v).count() as f64;
            assert_eq!(pair.nu_v(v).unwrap(), scan, "p={p}");
        }
        assert!(pair.nu_v(tab[tab.len() - 1] + 1.0).is_err());
    }

    #[test]
    fn extended_sum_matches_direct_sup() {
        // beyond the table the Euler–Maclaurin value must match Stirling-based sup
        let g1 = gevrey_seq(1.0, 4096).unwrap();
        let pair = AssociatedPair::new(&g1);
        for v in [9.0f64, 12.0, 20.0] {
            let t = v.exp();
            let n = t.floor();
            let direct = n * v - statrs::function::gamma::ln_gamma(n + 1.0);
            let got = pair.omega_v(v).unwrap();
            assert!(rel_gap(got, direct, 1.0) < 1e-9, "v={v}: {got} vs {direct}");
        }
    }

    #[test]
    fn integral_relation_on_gevrey() {
        for a in [0.5, 1.5, 2.0] {
            let m = gevrey_seq(a, 4096).unwrap();
            let v = integral_relation_check(&m, &table_grid(&m, 64));
            assert!(v.holds(), "{a}: {}", v.witness);
        }
    }

    #[test]
    fn conjugate_of_identity() {
        let id = WeightFunction::from_log("t", 0.0, 460.0, |u| u, None).unwrap();
        let ps = phi_star(&id, std::f64::consts::E).unwrap();
        assert!(ps.value.abs() < 1e-12 && (ps.argmax - 1.0).abs() < 1e-6);
        assert!((phi_star(&id, 0.0).unwrap().value + 1.0).abs() < 1e-12);
        for j in [3usize, 10, 100] {
            let jf = j as f64;
            assert!((weight_matrix(&id, 1.0, j).unwrap() - (jf * jf.ln() - jf)).abs() < 1e-9);
        }
        assert!(weight_matrix_row(&id, 2.0, 40).unwrap().1.holds());
    }

    #[test]
    fn conjugate_of_square_against_dense_grid() {
        let sq = WeightFunction::from_log("t^2", 0.0, 100.0, |u| 2.0 * u, None).unwrap();
        let dense = (0..=200_000)
            .map(|i| {
                let y = i as f64 * 1e-5;
                2.0 * y - (2.0 * y).exp()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((phi_star(&sq, 2.0).unwrap().value - dense).abs() < 1e-8);
    }

    #[test]
    fn hat_shifts_gamma() {
        for a in [0.5, 1.0] {
            let v = hat_relation_check(&gevrey_seq(a, 4096).unwrap(), 0.05);
            assert!(v.holds(), "{a}: {}", v.witness);
        }
    }

    #[test]
    fn duality_for_factorial_squares() {
        let r = duality_report(&gevrey_seq(2.0, 4096).unwrap()).unwrap();
        assert!((r.beta_m.0 - 2.0).abs() < 0.05);
        assert!((r.alpha_nu.0 - 0.5).abs() < 0.05);
        assert!((r.gamma_om.0 - 2.0).abs() < 0.1);
        assert!(r.srs.holds());
        assert!(r.consistent());
    }

    #[test]
    fn proximate_orders() {
        let (po, v) = proximate_family(0.5, 1.0).unwrap();
        assert!(proximate_order_check(|t| po.value(t), |t| po.derivative(t), &v, 0.1).holds());
        let (_, v0) = proximate_family(0.5, 0.0).unwrap();
        assert!(proximate_order_check(|_| 0.5, |_| 0.0, &v0, 0.1).holds());
        // a constant order that the function does not admit
        assert!(proximate_order_check(|_| 0.25, |_| 0.0, &v0, 0.1).fails());
    }
}
