//! Evaluable weight functions, elementary transforms, and the checkers for
//! (ω_1)–(ω_7), (ω_nq), (ω_snq) and the equivalence `∼`.

use std::sync::Arc;

use serde_json::json;

use crate::error::{Error, Result};
use crate::numeric::{extrapolate_tail, geometric_windows, linspace, log_integral, lse};
use crate::profile::LogProfile;
use crate::seq_model::QuotientSequence;
use crate::verdict::{bounded_trend, num, nums, vanishing_trend, Status, Verdict};

/// Default evaluation ceiling for user-supplied functions.
pub const DEFAULT_X_MAX: f64 = 1e12;
pub const TREND_WINDOWS: usize = 4;
const PER_WINDOW: usize = 64;
/// Constants `K, H = 2^k` are searched for `k ≤ MAX_K_EXP`.
pub const MAX_K_EXP: u32 = 40;

type ValueFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Nondecreasing `σ: [0,∞) → [0,∞)` with `σ(t) → ∞`, carried through its
/// profile `u ↦ ln σ(e^u)` on `[ln max(a,1), ln X_max]`.
#[derive(Clone)]
pub struct WeightFunction {
    profile: LogProfile,
    value: ValueFn,
    /// `σ(t) > 0` for `t ≥ a`.
    pub threshold: f64,
    /// `σ ≡ 0` on `[0, 1]`.
    pub normalized: bool,
    /// Piecewise constant (step embedding of a sequence).
    pub step: bool,
    pub label: String,
}

impl std::fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "WeightFunction({}, hi={})", self.label, self.profile.hi)
    }
}

impl WeightFunction {
    /// From an ordinary evaluator `t ↦ σ(t)`, trusted up to `x_max`.
    pub fn from_fn(
        label: impl Into<String>,
        threshold: f64,
        x_max: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let f: ValueFn = Arc::new(f);
        let g = f.clone();
        let lo = threshold.max(1.0).ln();
        let profile = LogProfile::new(lo, x_max.ln(), move |u| g(u.exp()).ln());
        let normalized = f(1.0) == 0.0 && f(0.5) == 0.0;
        WeightFunction {
            profile,
            value: f,
            threshold,
            normalized,
            step: false,
            label: label.into(),
        }
        .validated()
    }

    /// From a log profile `u ↦ ln σ(e^u)` trusted up to `u_max`, with an
    /// optional ordinary evaluator (defaults to `exp` of the profile).
    pub fn from_log(
        label: impl Into<String>,
        threshold: f64,
        u_max: f64,
        log_f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        value: Option<ValueFn>,
    ) -> Result<Self> {
        let lo = threshold.max(1.0).ln();
        let profile = LogProfile::new(lo, u_max, log_f);
        let value = value.unwrap_or_else(|| {
            let p = profile.clone();
            Arc::new(move |t: f64| if t <= 0.0 { p.at(f64::NEG_INFINITY).exp() } else { p.at(t.ln()).exp() })
        });
        let normalized = value(1.0) == 0.0 && value(0.5) == 0.0;
        WeightFunction {
            profile,
            value,
            threshold,
            normalized,
            step: false,
            label: label.into(),
        }
        .validated()
    }

    /// Wraps an existing profile (no copy of the closure).
    pub fn from_profile(label: impl Into<String>, threshold: f64, profile: LogProfile, step: bool) -> Result<Self> {
        let p = profile.clone();
        let lo = p.lo;
        let value: ValueFn = Arc::new(move |t: f64| {
            if t <= 0.0 {
                p.at(lo.min(-700.0)).exp()
            } else {
                p.at(t.ln()).exp()
            }
        });
        WeightFunction {
            profile,
            value,
            threshold,
            normalized: false,
            step,
            label: label.into(),
        }
        .validated()
    }

    fn validated(self) -> Result<Self> {
        let p = &self.profile;
        if !(p.hi > p.lo) {
            return Err(Error::Construction(format!(
                "{}: empty trusted range [{}, {}]",
                self.label, p.lo, p.hi
            )));
        }
        let us = linspace(p.lo, p.hi, 256);
        let mut prev = f64::NEG_INFINITY;
        for &u in &us {
            let v = p.at(u);
            if v.is_nan() {
                return Err(Error::Construction(format!("{}: NaN at t=e^{u}", self.label)));
            }
            if v < prev - 1e-12 * prev.abs().max(1.0) {
                return Err(Error::Construction(format!(
                    "{}: not nondecreasing near t=e^{u}",
                    self.label
                )));
            }
            prev = v;
        }
        let mid = (0.5 * p.hi).max(p.lo);
        if !(p.at(p.hi) > p.at(mid)) {
            return Err(Error::Construction(format!(
                "{}: no growth between X_max^(1/2) and X_max",
                self.label
            )));
        }
        Ok(self)
    }

    pub fn profile(&self) -> &LogProfile {
        &self.profile
    }

    /// `σ(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    /// `ln σ(e^u)`.
    pub fn log_at(&self, u: f64) -> f64 {
        self.profile.at(u)
    }

    pub fn x_max(&self) -> f64 {
        self.profile.hi.exp()
    }

    pub fn value_fn(&self) -> ValueFn {
        self.value.clone()
    }

    /// Same function trusted only up to `x_max`.
    pub fn restricted(&self, x_max: f64) -> Result<Self> {
        let mut f = self.clone();
        f.profile = self.profile.restrict(self.profile.lo, x_max.ln());
        f.validated()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn check(&self, cond: OmegaCondition) -> Verdict {
        check_omega(self, cond)
    }
}

/// A general evaluable function on `(0, ∞)` (e.g. the ι-transform of a
/// weight function, which is nonincreasing).
#[derive(Clone)]
pub struct GeneralFn {
    value: ValueFn,
    pub label: String,
}

impl GeneralFn {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        GeneralFn {
            value: Arc::new(f),
            label: label.into(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    pub fn value_fn(&self) -> ValueFn {
        self.value.clone()
    }
}

/// Step embedding `f(x) = m_{⌊x⌋-1}` (`x ≥ 1`), `m_0` on `[0,1]`; the shifted
/// variant is `m_{⌊x⌋}`.
pub fn step_function(a: &QuotientSequence, shifted: bool) -> Result<WeightFunction> {
    if !a.is_nondecreasing() {
        return Err(Error::Construction(format!(
            "step embedding needs a nondecreasing sequence ({})",
            a.label()
        )));
    }
    let label = format!("step({})", a.label());
    WeightFunction::from_profile(label, 0.0, a.step_profile(shifted), true)
}

/// Elementary transforms of a weight function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    /// `σ(t^s)`
    PowerArg(f64),
    /// `σ(t)^s`
    PowerVal(f64),
    /// `t^r σ(t)`
    MulMonomial(f64),
    /// `σ(1/t)`
    Iota,
}

pub enum Transformed {
    Weight(WeightFunction),
    General(GeneralFn),
}

impl Transformed {
    pub fn weight(self) -> Option<WeightFunction> {
        match self {
            Transformed::Weight(w) => Some(w),
            Transformed::General(_) => None,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Transformed::Weight(w) => w.eval(t),
            Transformed::General(g) => g.eval(t),
        }
    }
}

pub fn transform(sigma: &WeightFunction, kind: Transform) -> Result<Transformed> {
    let p = sigma.profile.clone();
    let v = sigma.value.clone();
    match kind {
        Transform::PowerArg(s) | Transform::PowerVal(s) if !(s > 0.0) => {
            Err(Error::Domain(format!("transform exponent must be positive, got {s}")))
        }
        Transform::PowerArg(s) => {
            let prof = LogProfile::new(p.lo / s, p.hi / s, move |u| p.at(s * u));
            let w = WeightFunction {
                profile: prof,
                value: Arc::new(move |t: f64| v(t.powf(s))),
                threshold: sigma.threshold.powf(1.0 / s),
                normalized: sigma.normalized,
                step: sigma.step,
                label: format!("{}(t^{s})", sigma.label),
            };
            Ok(Transformed::Weight(w.validated()?))
        }
        Transform::PowerVal(s) => {
            let prof = LogProfile::new(p.lo, p.hi, move |u| s * p.at(u));
            let w = WeightFunction {
                profile: prof,
                value: Arc::new(move |t: f64| v(t).powf(s)),
                threshold: sigma.threshold,
                normalized: sigma.normalized,
                step: sigma.step,
                label: format!("{}^{s}", sigma.label),
            };
            Ok(Transformed::Weight(w.validated()?))
        }
        Transform::MulMonomial(r) => {
            let label = format!("t^{r}·{}", sigma.label);
            let prof = LogProfile::new(p.lo, p.hi, move |u| r * u + p.at(u));
            let vv = v.clone();
            let w = WeightFunction {
                profile: prof,
                value: Arc::new(move |t: f64| t.powf(r) * vv(t)),
                threshold: sigma.threshold,
                normalized: sigma.normalized,
                step: sigma.step,
                label: label.clone(),
            };
            match w.validated() {
                Ok(w) => Ok(Transformed::Weight(w)),
                Err(_) => Ok(Transformed::General(GeneralFn {
                    value: Arc::new(move |t: f64| t.powf(r) * v(t)),
                    label,
                })),
            }
        }
        Transform::Iota => Ok(Transformed::General(GeneralFn {
            value: Arc::new(move |t: f64| v(1.0 / t)),
            label: format!("{}^ι", sigma.label),
        })),
    }
}

/// The weight-function conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OmegaCondition {
    Om1,
    Om2,
    Om3,
    Om4,
    Om5,
    Om6,
    Om7,
    OmNq,
    OmSnq,
}

impl OmegaCondition {
    pub const ALL: [OmegaCondition; 9] = [
        OmegaCondition::Om1,
        OmegaCondition::Om2,
        OmegaCondition::Om3,
        OmegaCondition::Om4,
        OmegaCondition::Om5,
        OmegaCondition::Om6,
        OmegaCondition::Om7,
        OmegaCondition::OmNq,
        OmegaCondition::OmSnq,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            OmegaCondition::Om1 => "om1",
            OmegaCondition::Om2 => "om2",
            OmegaCondition::Om3 => "om3",
            OmegaCondition::Om4 => "om4",
            OmegaCondition::Om5 => "om5",
            OmegaCondition::Om6 => "om6",
            OmegaCondition::Om7 => "om7",
            OmegaCondition::OmNq => "om_nq",
            OmegaCondition::OmSnq => "om_snq",
        }
    }

    pub fn parse(s: &str) -> Option<OmegaCondition> {
        OmegaCondition::ALL.iter().copied().find(|c| c.id() == s)
    }
}

/// Trend windows in `u` over `[max(lo, hi·from), hi·to]`, sampled uniformly.
pub(crate) fn u_windows(p: &LogProfile, from: f64, to: f64) -> Vec<Vec<f64>> {
    let top = p.hi * to;
    let lo = (p.hi * from).max(p.lo).max(1e-3);
    if !(top > lo) {
        return vec![];
    }
    geometric_windows(lo, top, TREND_WINDOWS)
        .into_iter()
        .map(|(a, b)| linspace(a, b, PER_WINDOW))
        .collect()
}

fn per_window_max(windows: &[Vec<f64>], stat: impl Fn(f64) -> f64) -> (Vec<f64>, Vec<f64>) {
    let mut maxes = Vec::with_capacity(windows.len());
    let mut args = Vec::with_capacity(windows.len());
    for w in windows {
        let mut best = f64::NEG_INFINITY;
        let mut arg = f64::NAN;
        for &u in w {
            let v = stat(u);
            if v.is_nan() {
                continue;
            }
            if v > best {
                best = v;
                arg = u;
            }
        }
        maxes.push(best);
        args.push(arg);
    }
    (maxes, args)
}

/// Smallest `k ≤ MAX_K_EXP` such that `ok(u, k)` holds for every `u` in the
/// window that `usable(u, k)` admits; `+∞` when none does.
fn needed_exponent(w: &[f64], usable: impl Fn(f64, u32) -> bool, ok: impl Fn(f64, u32) -> bool) -> f64 {
    for k in 0..=MAX_K_EXP {
        let pts: Vec<f64> = w.iter().copied().filter(|&u| usable(u, k)).collect();
        if pts.is_empty() {
            continue;
        }
        if pts.iter().all(|&u| ok(u, k)) {
            return k as f64;
        }
    }
    f64::INFINITY
}

fn t_of(us: &[f64]) -> Vec<f64> {
    us.iter().map(|u| u.exp()).collect()
}

/// `ln ∫_0^∞ e^{L(v+w) - c·w} dw` with the part beyond the ceiling
/// extrapolated from the local slope of `L`. `c` is the weight exponent
/// (`1` for `dt/t²`).
pub(crate) fn log_shift_integral(p: &LogProfile, v: f64, c: f64) -> f64 {
    let hi = p.hi;
    let span = hi - v;
    if !(span > 0.0) {
        return f64::NAN;
    }
    let body = log_integral(|w| p.at(v + w) - c * w, 0.0, span, 1e-9);
    let tail = extrapolate_tail(|u| p.at(u) - c * (u - v), hi).log_value;
    lse(body, tail)
}

/// Checks one ω-condition on geometric windows up to the trusted ceiling.
pub fn check_omega(sigma: &WeightFunction, cond: OmegaCondition) -> Verdict {
    let p = &sigma.profile;
    let id = cond.id();
    let ln2 = 2f64.ln();
    match cond {
        OmegaCondition::Om1 => {
            let ws = u_windows(p, 1.0 / 16.0, 1.0);
            let (m, a) = per_window_max(&ws, |u| {
                if u + ln2 > p.hi {
                    f64::NAN
                } else {
                    p.at(u + ln2) - p.at(u)
                }
            });
            let c = m.iter().copied().fold(f64::NEG_INFINITY, f64::max).exp();
            Verdict::new(id, bounded_trend(&m), json!({"C": num(c), "log_ratio_per_window": nums(&m), "t": nums(&t_of(&a))}))
        }
        OmegaCondition::Om2 | OmegaCondition::Om5 => {
            let ws = u_windows(p, 1.0 / 16.0, 1.0);
            let (m, a) = per_window_max(&ws, |u| p.at(u) - u);
            let status = if cond == OmegaCondition::Om2 {
                bounded_trend(&m)
            } else {
                vanishing_trend(&m)
            };
            Verdict::new(id, status, json!({"log_ratio_per_window": nums(&m), "t": nums(&t_of(&a))}))
        }
        OmegaCondition::Om3 => {
            let ws = u_windows(p, 1.0 / 16.0, 1.0);
            let (m, a) = per_window_max(&ws, |u| u.ln() - p.at(u));
            let status = if sigma.step && m.windows(2).any(|w| w[1] > w[0]) {
                Status::Inconclusive
            } else {
                vanishing_trend(&m)
            };
            Verdict::new(id, status, json!({"log_ratio_per_window": nums(&m), "t": nums(&t_of(&a))}))
        }
        OmegaCondition::Om4 => {
            if sigma.step {
                return Verdict::new(id, Status::Inconclusive, json!({"reason": "step function"}));
            }
            let ys = linspace(p.lo - 2.0, p.hi, 1024);
            let h = ys[1] - ys[0];
            let mut worst = f64::NEG_INFINITY;
            let mut at = f64::NAN;
            for &y in &ys[1..ys.len() - 1] {
                let c = p.at(y);
                if c == f64::NEG_INFINITY {
                    continue;
                }
                let chord = lse(p.at(y - h), p.at(y + h)) - ln2;
                let excess = c - chord;
                if excess > worst {
                    worst = excess;
                    at = y;
                }
            }
            let status = Status::from_bool(worst <= 1e-9);
            Verdict::new(id, status, json!({"max_log_excess": num(worst), "y": num(at)}))
        }
        OmegaCondition::Om6 => {
            let ws = u_windows(p, 1.0 / 16.0, 1.0);
            let need: Vec<f64> = ws
                .iter()
                .map(|w| {
                    needed_exponent(
                        w,
                        |u, k| u + k as f64 * ln2 <= p.hi,
                        |u, k| {
                            let lh = k as f64 * ln2;
                            ln2 + p.at(u) <= lse(p.at(u + lh), lh) + 1e-12
                        },
                    )
                })
                .collect();
            let h = need.iter().copied().fold(0.0, f64::max);
            Verdict::new(id, bounded_trend(&need), json!({"log2_H_per_window": nums(&need), "H": num(2f64.powf(h))}))
        }
        OmegaCondition::Om7 => {
            let ws = u_windows(p, 1.0 / 32.0, 0.5);
            let need: Vec<f64> = ws
                .iter()
                .map(|w| {
                    needed_exponent(
                        w,
                        |u, k| u + k as f64 * ln2 <= p.hi && 2.0 * u <= p.hi,
                        |u, k| {
                            let lc = k as f64 * ln2;
                            p.at(2.0 * u) <= lse(lc + p.at(u + lc), lc) + 1e-12
                        },
                    )
                })
                .collect();
            let c = need.iter().copied().fold(0.0, f64::max);
            Verdict::new(id, bounded_trend(&need), json!({"log2_C_per_window": nums(&need), "C": num(2f64.powf(c)), "H": num(2f64.powf(c))}))
        }
        OmegaCondition::OmNq => {
            let ws = u_windows(p, 1.0 / 16.0, 1.0);
            let parts: Vec<f64> = ws
                .iter()
                .map(|w| log_integral(|u| p.at(u) - u, w[0], w[w.len() - 1], 1e-9))
                .collect();
            let total = lse(log_integral(|u| p.at(u) - u, p.lo.max(0.0), p.hi, 1e-9), tail_nq(p));
            Verdict::new(id, vanishing_trend(&parts), json!({"log_integral": num(total), "log_window_integrals": nums(&parts)}))
        }
        OmegaCondition::OmSnq => {
            let ws = u_windows(p, 1.0 / 16.0, 1.0);
            let ws: Vec<Vec<f64>> = ws
                .into_iter()
                .map(|w| w.into_iter().filter(|&v| v < p.hi - 1e-6).collect())
                .collect();
            let (m, a) = per_window_max(&ws, |v| log_shift_integral(p, v, 1.0) - lse(p.at(v), 0.0));
            Verdict::new(id, bounded_trend(&m), json!({"log_C_per_window": nums(&m), "y": nums(&t_of(&a))}))
        }
    }
}

fn tail_nq(p: &LogProfile) -> f64 {
    extrapolate_tail(|u| p.at(u) - u, p.hi).log_value
}

/// Decides `σ ∼ τ` (`C^{-1}τ - C ≤ σ ≤ Cτ + C`) on the common trusted range.
pub fn equivalent(sigma: &WeightFunction, tau: &WeightFunction) -> Verdict {
    let hi = sigma.profile.hi.min(tau.profile.hi);
    let lo = sigma.profile.lo.max(tau.profile.lo).max(0.0);
    let (ps, pt) = (&sigma.profile, &tau.profile);
    // ln of the smallest C ≥ 1 that works at u
    let need = |u: f64| -> f64 {
        let ls = ps.at(u);
        let lt = pt.at(u);
        let c1 = ls - lse(lt, 0.0);
        // τ ≤ Cσ + C²  ⇔  C ≥ 2τ / (σ + sqrt(σ² + 4τ))
        let root = 0.5 * lse(2.0 * ls, 4f64.ln() + lt);
        let c2 = 2f64.ln() + lt - lse(ls, root);
        c1.max(c2).max(0.0)
    };
    let grid = linspace(lo, hi, 2048);
    let mut worst = 0.0;
    let mut at = lo;
    for &u in &grid {
        let v = need(u);
        if v > worst {
            worst = v;
            at = u;
        }
    }
    let probe = LogProfile::new(lo, hi, |_| 0.0);
    let ws = u_windows(&probe, 1.0 / 16.0, 1.0);
    let (m, _) = per_window_max(&ws, need);
    Verdict::new(
        "equiv_sim",
        bounded_trend(&m),
        json!({"C": num(worst.exp()), "t": num(at.exp()), "log_C_per_window": nums(&m)}),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(s: f64) -> WeightFunction {
        WeightFunction::from_log(format!("t^{s}"), 0.0, 460.0, move |u| s * u, None).unwrap()
    }

    fn linlog(a: f64) -> WeightFunction {
        WeightFunction::from_log(
            "linlog",
            0.0,
            460.0,
            move |u| u - a * (u + (1.0 - u).exp().ln_1p()).ln(),
            None,
        )
        .unwrap()
    }

    fn logsq() -> WeightFunction {
        WeightFunction::from_log(
            "log2",
            std::f64::consts::E,
            460.0,
            |u| if u > 0.0 { 2.0 * u.ln() } else { f64::NEG_INFINITY },
            None,
        )
        .unwrap()
    }

    #[test]
    fn step_function_floor_evaluation() {
        let m = QuotientSequence::from_log_m((0..32).map(|p| (p as f64 + 1.0).ln()).collect()).unwrap();
        let f = step_function(&m, false).unwrap();
        assert!((f.eval(3.5) - 3.0).abs() < 1e-12);
        let g = step_function(&m, true).unwrap();
        assert!((g.eval(3.5) - 4.0).abs() < 1e-12);
        assert!((f.eval(0.5) - 1.0).abs() < 1e-12);
        let bad = QuotientSequence::from_log_m((0..32).map(|p| -(p as f64)).collect()).unwrap();
        assert!(step_function(&bad, false).is_err());
    }

    #[test]
    fn transforms_pointwise() {
        let sq = power(2.0);
        let id = transform(&sq, Transform::PowerArg(1.0)).unwrap();
        assert!((id.eval(3.0) - 9.0).abs() < 1e-9);
        let half = transform(&sq, Transform::PowerArg(0.5)).unwrap();
        assert!((half.eval(7.0) - 7.0).abs() < 1e-9);
        let iota = transform(&power(1.0), Transform::Iota).unwrap();
        assert!((iota.eval(2.0) - 0.5).abs() < 1e-12);
        assert!(transform(&sq, Transform::PowerVal(0.0)).is_err());
    }

    #[test]
    fn construction_rejects_decreasing() {
        assert!(WeightFunction::from_fn("dec", 0.0, 1e6, |t| 1.0 / (1.0 + t)).is_err());
    }

    #[test]
    fn sqrt_conditions() {
        let s = power(0.5);
        assert!(s.check(OmegaCondition::OmSnq).holds());
        assert!(s.check(OmegaCondition::Om1).holds());
        assert!(s.check(OmegaCondition::Om5).holds());
        assert!(s.check(OmegaCondition::OmNq).holds());
        assert!(s.check(OmegaCondition::Om6).holds());
        assert!(s.check(OmegaCondition::Om7).fails());
    }

    #[test]
    fn linear_conditions() {
        let s = power(1.0);
        assert!(s.check(OmegaCondition::OmSnq).fails());
        assert!(s.check(OmegaCondition::Om6).holds());
        assert!(s.check(OmegaCondition::Om2).holds());
        assert!(s.check(OmegaCondition::Om5).fails());
        assert!(s.check(OmegaCondition::Om4).holds());
    }

    #[test]
    fn log_square_conditions() {
        let s = logsq();
        assert!(s.check(OmegaCondition::Om6).fails());
        assert!(s.check(OmegaCondition::Om7).holds());
        assert!(s.check(OmegaCondition::Om3).holds());
        assert!(s.check(OmegaCondition::Om1).holds());
    }

    #[test]
    fn linlog_boundary() {
        let s = linlog(1.0);
        assert!(s.check(OmegaCondition::OmSnq).fails());
        assert!(s.check(OmegaCondition::OmNq).fails());
        assert!(s.check(OmegaCondition::Om5).holds());
        let s2 = linlog(2.0);
        assert!(s2.check(OmegaCondition::OmNq).holds());
    }

    #[test]
    fn equivalence() {
        let t = power(1.0);
        let r = equivalent(&t, &t);
        assert!(r.holds());
        assert_eq!(r.witness["C"], json!(1.0));
        let t7 = WeightFunction::from_fn("t+7", 0.0, 1e12, |t| t + 7.0).unwrap();
        let r = equivalent(&t, &t7);
        assert!(r.holds());
        assert!(r.witness["C"].as_f64().unwrap() <= 8.0);
        let t2 = power(2.0);
        assert!(equivalent(&t, &t2).fails());
    }
}
