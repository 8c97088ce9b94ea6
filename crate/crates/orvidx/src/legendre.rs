//! Upper and lower Legendre conjugates, concave majorants and convex
//! minorants, Peetre-type equivalences and the γ-shift relations.

use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::fn_model::{check_omega, OmegaCondition, WeightFunction};
use crate::indices::{estimate, EstimatorConfig, ExtReal};
use crate::numeric::{geometric_windows, golden_min, linspace, rel_gap};
use crate::profile::{interp, LogProfile};
use crate::verdict::{bounded_trend, num, nums, Status, Verdict};

/// Scan points for the outer extremization before golden refinement.
const SCAN: usize = 1025;
/// Half-width in `ln x` of the grids used for hulls and Peetre checks.
const HULL_SPAN: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Interp {
    Step,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    AtZero,
    AtInfinity,
}

/// Samples `(x_i, y_i)` on a strictly increasing grid.
#[derive(Debug, Clone, Serialize)]
pub struct SampledGraph {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub interp: Interp,
    pub domain: Domain,
    /// Extremizer touched the search boundary at this sample.
    pub censored: Vec<bool>,
}

impl SampledGraph {
    pub fn new(x: Vec<f64>, y: Vec<f64>, interp: Interp, domain: Domain) -> Result<SampledGraph> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::Input("graph needs at least two (x, y) pairs of equal length".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Input("graph abscissae must be strictly increasing".into()));
        }
        let n = x.len();
        Ok(SampledGraph {
            x,
            y,
            interp,
            domain,
            censored: vec![false; n],
        })
    }

    /// `f` on `n` points spaced geometrically over `[e^a, e^b]`.
    pub fn sample(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize, domain: Domain) -> SampledGraph {
        let x: Vec<f64> = linspace(a, b, n).into_iter().map(f64::exp).collect();
        let y = x.iter().map(|&t| f(t)).collect();
        SampledGraph {
            censored: vec![false; n],
            x,
            y,
            interp: Interp::Linear,
            domain,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self.interp {
            Interp::Linear => interp(&self.x, &self.y, t),
            Interp::Step => {
                let i = self.x.partition_point(|&x| x <= t);
                self.y[i.saturating_sub(1)]
            }
        }
    }

    /// Indices of uncensored samples.
    pub fn trusted(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.x.len()).filter(|&i| !self.censored[i])
    }

    /// Two-column CSV `x,y` (censored rows dropped).
    pub fn to_csv(&self, header: (&str, &str)) -> String {
        let mut s = format!("{},{}\n", header.0, header.1);
        for i in self.trusted() {
            s.push_str(&format!("{:e},{:e}\n", self.x[i], self.y[i]));
        }
        s
    }
}

/// `σ(e^w)`, switching to the plain evaluator below the profile range.
fn value_at_log(s: &WeightFunction, w: f64) -> f64 {
    let p = s.profile();
    if w >= p.lo {
        p.at(w.min(p.hi)).exp()
    } else {
        s.eval(w.exp())
    }
}

/// Maximizes `f` over `[a, b]` by a scan and golden refinement; returns
/// `(argmax, max, censored)` with censoring when the argmax is within 1% of
/// the range length from either end.
fn maximize(f: impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64, bool) {
    let ws = linspace(a, b, SCAN);
    let (mut bi, mut bv) = (0, f64::NEG_INFINITY);
    for (i, &w) in ws.iter().enumerate() {
        let v = f(w);
        if v > bv {
            bi = i;
            bv = v;
        }
    }
    let lo = ws[bi.saturating_sub(1)];
    let hi = ws[(bi + 1).min(ws.len() - 1)];
    let (w, m) = golden_min(|w| -f(w), lo, hi, 1e-13 * (1.0 + a.abs().max(b.abs())));
    let (arg, val) = if -m >= bv { (w, -m) } else { (ws[bi], bv) };
    let edge = 0.01 * (b - a);
    (arg, val, arg <= a + edge || arg >= b - edge)
}

/// Value of a conjugate with the log of its extremizer.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConjValue {
    pub value: f64,
    pub log_arg: f64,
    pub censored: bool,
}

/// `σ*(s) = sup_{t ≥ 0} (σ(t) - st)`, extremized over `ln t ∈ [-U, U]` with
/// `U = ln X_max` of `σ`.
#[derive(Clone)]
pub struct UpperConjugate {
    sigma: WeightFunction,
    span: f64,
}

impl std::fmt::Debug for UpperConjugate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "UpperConjugate({})", self.sigma.label)
    }
}

/// Upper conjugate of `σ`; a domain error when (ω₅) fails, since then
/// `σ* ≡ ∞`.
pub fn upper_conjugate(sigma: &WeightFunction) -> Result<UpperConjugate> {
    let v = check_omega(sigma, OmegaCondition::Om5);
    if v.fails() {
        return Err(Error::Domain(format!("{}: (ω5) fails, the upper conjugate is infinite", sigma.label)));
    }
    Ok(UpperConjugate {
        sigma: sigma.clone(),
        span: sigma.profile().hi,
    })
}

impl UpperConjugate {
    pub fn at(&self, s: f64) -> ConjValue {
        let sg = &self.sigma;
        let (w, v, c) = maximize(|w| value_at_log(sg, w) - s * w.exp(), -self.span, self.span);
        // t = 0 is admissible as well
        let v0 = sg.eval(0.0);
        if v0 > v {
            return ConjValue { value: v0, log_arg: f64::NEG_INFINITY, censored: false };
        }
        ConjValue { value: v, log_arg: w, censored: c }
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.at(s).value
    }

    /// On the reciprocal image `s_i = 1/t_i` of a geometric `t` grid over
    /// `ln t ∈ [-h, h]`.
    pub fn graph(&self, h: f64, n: usize) -> SampledGraph {
        let s: Vec<f64> = linspace(-h, h, n).into_iter().map(f64::exp).collect();
        let vals: Vec<ConjValue> = s.iter().map(|&x| self.at(x)).collect();
        SampledGraph {
            y: vals.iter().map(|c| c.value).collect(),
            censored: vals.iter().map(|c| c.censored).collect(),
            x: s,
            interp: Interp::Linear,
            domain: Domain::AtZero,
        }
    }

    /// `(σ*)^ι(t) = σ*(1/t)` as a weight function on the range of `ln t ≥ 0`
    /// where the maximizer stays inside the search interval.
    pub fn iota(&self) -> Result<WeightFunction> {
        let us = linspace(0.0, self.span, 2048);
        let mut pts = vec![];
        for &u in &us {
            let c = self.at((-u).exp());
            if c.censored {
                if pts.len() > 16 {
                    break;
                }
                continue;
            }
            if c.value > 0.0 {
                pts.push((u, c.value.ln()));
            }
        }
        if pts.len() < 64 {
            return Err(Error::Horizon(format!("{}: too few uncensored conjugate values", self.sigma.label)));
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        let lo = xs[0];
        let p = LogProfile::from_samples(xs, ys);
        WeightFunction::from_profile(format!("(({})*)^iota", self.sigma.label), lo.exp(), p, false)
    }
}

/// `h_*(t) = inf_{s > 0} (h(s) + ts)`, extremized over `ln s ∈ [a, b]`.
#[derive(Clone)]
pub struct LowerConjugate {
    h: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    a: f64,
    b: f64,
    label: String,
}

impl std::fmt::Debug for LowerConjugate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LowerConjugate({}, ln s in [{}, {}])", self.label, self.a, self.b)
    }
}

/// Lower conjugate of a nonincreasing `h` given through `w ↦ h(e^w)` on
/// `w ∈ [a, b]`.
pub fn lower_conjugate(
    label: impl Into<String>,
    h_log_arg: impl Fn(f64) -> f64 + Send + Sync + 'static,
    a: f64,
    b: f64,
) -> LowerConjugate {
    LowerConjugate {
        h: Arc::new(h_log_arg),
        a,
        b,
        label: label.into(),
    }
}

impl LowerConjugate {
    pub fn at(&self, t: f64) -> ConjValue {
        let h = &self.h;
        let (w, v, c) = maximize(|w| -(h(w) + t * w.exp()), self.a, self.b);
        // the infimum at s → 0 is approached from the left edge
        ConjValue {
            value: -v,
            log_arg: w,
            censored: c,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.at(t).value
    }

    pub fn graph(&self, h: f64, n: usize) -> SampledGraph {
        let t: Vec<f64> = linspace(-h, h, n).into_iter().map(f64::exp).collect();
        let vals: Vec<ConjValue> = t.iter().map(|&x| self.at(x)).collect();
        SampledGraph {
            y: vals.iter().map(|c| c.value).collect(),
            censored: vals.iter().map(|c| c.censored).collect(),
            x: t,
            interp: Interp::Linear,
            domain: Domain::AtInfinity,
        }
    }

    /// `h_*` as a weight function over `ln t ∈ [0, top]`, trusted up to the
    /// first censored value.
    pub fn weight_function(&self, top: f64) -> Result<WeightFunction> {
        let mut pts = vec![];
        for u in linspace(0.0, top, 2048) {
            let c = self.at(u.exp());
            if c.censored {
                if pts.len() > 16 {
                    break;
                }
                continue;
            }
            if c.value > 0.0 {
                pts.push((u, c.value.ln()));
            }
        }
        if pts.len() < 64 {
            return Err(Error::Horizon(format!("{}: too few uncensored conjugate values", self.label)));
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        let lo = xs[0];
        WeightFunction::from_profile(format!("({})_*", self.label), lo.exp(), LogProfile::from_samples(xs, ys), false)
    }
}

/// Minimum of a quasiconvex `f` on `[a, b]` that may be flat near the ends:
/// a coarse scan brackets the minimum before golden refinement.
fn scan_min(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let ws = linspace(a, b, 129);
    let (mut bi, mut bv) = (0, f64::INFINITY);
    for (i, &w) in ws.iter().enumerate() {
        let v = f(w);
        if v < bv {
            bi = i;
            bv = v;
        }
    }
    let lo = ws[bi.saturating_sub(1)];
    let hi = ws[(bi + 1).min(ws.len() - 1)];
    golden_min(&f, lo, hi, 1e-13 * (b - a)).1.min(bv)
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Monotone-chain hull vertices of points sorted by `x`; `upper` selects the
/// concave (upper) chain.
fn hull_vertices(x: &[f64], y: &[f64], upper: bool) -> Vec<usize> {
    let mut h: Vec<usize> = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        while h.len() >= 2 {
            let (o, a) = (h[h.len() - 2], h[h.len() - 1]);
            let c = cross((x[o], y[o]), (x[a], y[a]), (x[i], y[i]));
            if (upper && c >= 0.0) || (!upper && c <= 0.0) {
                h.pop();
            } else {
                break;
            }
        }
        h.push(i);
    }
    h
}

/// Hull values at every sample.
fn hull_values(x: &[f64], y: &[f64], upper: bool) -> Vec<f64> {
    let v = hull_vertices(x, y, upper);
    let (hx, hy): (Vec<f64>, Vec<f64>) = v.iter().map(|&i| (x[i], y[i])).unzip();
    x.iter().map(|&t| interp(&hx, &hy, t)).collect()
}

/// Concave majorant of a sampled graph, computed twice.
#[derive(Debug, Clone, Serialize)]
pub struct Majorant {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Upper hull of the samples.
    pub hull: Vec<f64>,
    /// Discrete double conjugate of the samples.
    pub conj: Vec<f64>,
    pub max_rel_gap: f64,
    /// Hull is at least the function everywhere.
    pub bounds: bool,
}

impl Majorant {
    pub fn graph(&self) -> SampledGraph {
        SampledGraph {
            x: self.x.clone(),
            y: self.hull.clone(),
            interp: Interp::Linear,
            domain: Domain::AtInfinity,
            censored: vec![false; self.x.len()],
        }
    }

    pub fn verdict(&self) -> Verdict {
        Verdict::new(
            "concave_majorant",
            Status::from_bool(self.max_rel_gap <= 1e-6 && self.bounds),
            json!({"max_rel_gap": num(self.max_rel_gap), "bounds": self.bounds}),
        )
    }
}

fn scale_floor(y: &[f64]) -> f64 {
    1e-12 * y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300)
}

/// Concave majorant of samples `(x_i, y_i)` (`x` increasing, `x_0 ≥ 0`).
pub fn concave_majorant_of(x: Vec<f64>, y: Vec<f64>) -> Majorant {
    let hull = hull_values(&x, &y, true);
    // S*(s) + ts evaluated as max_i (y_i + s (t - x_i)) to avoid cancellation
    let shifted = |s: f64, t: f64| x.iter().zip(&y).map(|(&xi, &v)| v + s * (t - xi)).fold(f64::NEG_INFINITY, f64::max);
    let ymax = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = 3.0 * (x[x.len() - 1].ln().abs() + x.iter().find(|&&t| t > 0.0).unwrap().ln().abs()) + 10.0;
    let conj: Vec<f64> = x
        .iter()
        .map(|&t| {
            scan_min(|w| shifted(w.exp(), t), -span, span).min(ymax)
        })
        .collect();
    let fl = scale_floor(&y);
    let max_rel_gap = hull.iter().zip(&conj).map(|(&a, &b)| rel_gap(a, b, fl)).fold(0.0, f64::max);
    let bounds = hull.iter().zip(&y).all(|(&h, &v)| h >= v - fl);
    Majorant { x, y, hull, conj, max_rel_gap, bounds }
}

/// `(σ*)_*`, the least concave majorant of `σ`, on `{0} ∪ [e^{-40}, e^{min(40, ln X_max)}]`.
pub fn least_concave_majorant(sigma: &WeightFunction) -> Result<Majorant> {
    if check_omega(sigma, OmegaCondition::Om5).fails() {
        return Err(Error::Domain(format!("{}: (ω5) fails, no finite concave majorant", sigma.label)));
    }
    let top = sigma.profile().hi.min(HULL_SPAN);
    let mut x = vec![0.0];
    x.extend(linspace(-HULL_SPAN, top, SCAN).into_iter().map(f64::exp));
    let y: Vec<f64> = x
        .iter()
        .map(|&t| if t == 0.0 { sigma.eval(0.0) } else { value_at_log(sigma, t.ln()) })
        .collect();
    Ok(concave_majorant_of(x, y))
}

/// Convex minorant of a sampled nonincreasing graph, computed twice.
#[derive(Debug, Clone, Serialize)]
pub struct Minorant {
    pub s: Vec<f64>,
    pub h: Vec<f64>,
    pub hull: Vec<f64>,
    pub conj: Vec<f64>,
    pub max_rel_gap: f64,
    /// Hull is at most the function everywhere.
    pub bounds: bool,
}

impl Minorant {
    pub fn verdict(&self) -> Verdict {
        Verdict::new(
            "convex_minorant",
            Status::from_bool(self.max_rel_gap <= 1e-6 && self.bounds),
            json!({"max_rel_gap": num(self.max_rel_gap), "bounds": self.bounds}),
        )
    }
}

/// `(h_*)*`, the largest convex minorant of `h`, from samples of
/// `w ↦ h(e^w)` on `w ∈ [a, b]`.
pub fn largest_convex_minorant(h_log_arg: impl Fn(f64) -> f64, a: f64, b: f64) -> Minorant {
    let s: Vec<f64> = linspace(a, b, SCAN).into_iter().map(f64::exp).collect();
    let h: Vec<f64> = linspace(a, b, SCAN).into_iter().map(&h_log_arg).collect();
    let hull = hull_values(&s, &h, false);
    let shifted = |t: f64, x: f64| s.iter().zip(&h).map(|(&sj, &v)| v + t * (sj - x)).fold(f64::INFINITY, f64::min);
    let hmin = h.iter().copied().fold(f64::INFINITY, f64::min);
    let span = 3.0 * (a.abs() + b.abs()) + 10.0;
    let conj: Vec<f64> = s
        .iter()
        .map(|&x| {
            (-scan_min(|w| -shifted(w.exp(), x), -span, span)).max(hmin)
        })
        .collect();
    let fl = scale_floor(&h);
    let max_rel_gap = hull.iter().zip(&conj).map(|(&p, &q)| rel_gap(p, q, fl)).fold(0.0, f64::max);
    let bounds = hull.iter().zip(&h).all(|(&p, &v)| p <= v + fl);
    Minorant { s, h, hull, conj, max_rel_gap, bounds }
}

/// Cumulative window maxima of `vals` where windows end at the geometric
/// boundaries `ends` of the key.
fn cumulative_max(keys: &[f64], vals: &[f64], ends: &[f64]) -> Vec<f64> {
    ends.iter()
        .map(|&e| {
            keys.iter()
                .zip(vals)
                .filter(|(&k, _)| k <= e)
                .map(|(_, &v)| v)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// `f(s) ≤ C f(t)` and `f(t) s/t ≤ C (f(s) + 1)` for `s < t`, with the
/// conclusion `A F - A ≤ f ≤ F` for the concave majorant `F`.
pub fn peetre_check(f: &WeightFunction) -> Verdict {
    let top = f.profile().hi.min(100.0);
    let us = linspace(-10.0, top, 1024);
    let x: Vec<f64> = us.iter().map(|&u| u.exp()).collect();
    let y: Vec<f64> = us.iter().map(|&u| value_at_log(f, u)).collect();
    let mut pref = f64::NEG_INFINITY;
    let mut need = Vec::with_capacity(us.len());
    let mut fmax_before = f64::NEG_INFINITY;
    for i in 0..us.len() {
        let mut c = f64::NEG_INFINITY;
        if i > 0 {
            let r1 = if y[i] > 0.0 { fmax_before / y[i] } else if fmax_before > 0.0 { f64::INFINITY } else { 0.0 };
            c = r1.max(y[i] / x[i] * pref);
        }
        need.push(c.max(1e-300).ln());
        pref = pref.max(x[i] / (y[i] + 1.0));
        fmax_before = fmax_before.max(y[i]);
    }
    let ends: Vec<f64> = geometric_windows(top / 16.0, top, 4).into_iter().map(|w| w.1).collect();
    let lc = cumulative_max(&us, &need, &ends);
    let st = bounded_trend(&lc);
    let c = lc.last().unwrap().exp();
    let mut w = json!({"log_C_per_window": nums(&lc)});
    if st != Status::Holds {
        return Verdict::new("peetre", st, w);
    }
    let k = c.log2().ceil().max(0.0);
    let mut xs = vec![0.0];
    xs.extend(&x);
    let mut ys = vec![f.eval(0.0)];
    ys.extend(&y);
    let maj = concave_majorant_of(xs, ys);
    let a_need: Vec<f64> = maj.hull[1..]
        .iter()
        .zip(&y)
        .map(|(&big, &v)| if big > 1.0 { -(v / (big - 1.0)).max(1e-300).ln() } else { f64::NEG_INFINITY })
        .collect();
    let la = cumulative_max(&us, &a_need, &ends);
    let concl = bounded_trend(&la);
    w["C"] = json!(2f64.powf(k));
    w["A"] = num((-la.last().unwrap()).exp());
    w["conclusion"] = json!(concl);
    Verdict::new("peetre", concl, w)
}

/// `K_β = (1+β)^{-(β+1)/β}`.
pub fn k_beta(beta: f64) -> f64 {
    (1.0 + beta).powf(-(beta + 1.0) / beta)
}

/// `h(s) + C ≥ (1/C) min(1, (t/s)^β) h(t)` for all `s, t`, with the
/// conclusion `H ≤ h ≤ A H + A` for the convex minorant `H`; `h` is given as
/// `w ↦ h(e^w)` on `w ∈ [a, b]` with `a < 0`.
pub fn convex_peetre_check(h_log_arg: impl Fn(f64) -> f64, a: f64, b: f64, beta: f64) -> Result<Verdict> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("β must be positive, got {beta}")));
    }
    if !(a < 0.0 && b > a) {
        return Err(Error::Domain(format!("need ln s range [a, b] with a < 0, got [{a}, {b}]")));
    }
    let ws = linspace(a, b, 512);
    let h: Vec<f64> = ws.iter().map(|&w| h_log_arg(w)).collect();
    let n = ws.len();
    // depth of a pair = -min(ln s, ln t); windows grow toward zero
    let mut need = vec![f64::NEG_INFINITY; n];
    for i in 0..n {
        for j in 0..n {
            let r = (beta * (ws[j] - ws[i])).min(0.0).exp() * h[j];
            let hs = h[i];
            let c = if !r.is_finite() || hs == f64::NEG_INFINITY {
                f64::INFINITY
            } else if r <= 0.0 {
                0.0
            } else if hs == f64::INFINITY {
                0.0
            } else {
                2.0 * r / (hs + (hs * hs + 4.0 * r).sqrt())
            };
            let k = i.min(j);
            need[k] = need[k].max(c.max(1e-300).ln());
        }
    }
    let depth: Vec<f64> = ws.iter().map(|w| -w).collect();
    let ends: Vec<f64> = geometric_windows(-a / 16.0, -a, 4).into_iter().map(|w| w.1).collect();
    let lc = cumulative_max(&depth, &need, &ends);
    let st = bounded_trend(&lc);
    let mut w = json!({"log_C_per_window": nums(&lc), "K_beta": num(k_beta(beta))});
    if st != Status::Holds {
        return Ok(Verdict::new("convex_peetre", st, w));
    }
    let hull = hull_values(&ws.iter().map(|w| w.exp()).collect::<Vec<_>>(), &h, false);
    let a_need: Vec<f64> = h
        .iter()
        .zip(&hull)
        .map(|(&v, &big)| if big + 1.0 > 0.0 { (v / (big + 1.0)).max(1e-300).ln() } else { f64::INFINITY })
        .collect();
    let la = cumulative_max(&depth, &a_need, &ends);
    let concl = bounded_trend(&la);
    w["C"] = num(2f64.powf(lc.last().unwrap().exp().log2().ceil().max(0.0)));
    w["A"] = num(la.last().unwrap().exp());
    w["conclusion"] = json!(concl);
    Ok(Verdict::new("convex_peetre", concl, w))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftDirection {
    Upper,
    Lower,
}

impl ShiftDirection {
    pub fn parse(s: &str) -> Option<ShiftDirection> {
        match s {
            "upper" => Some(ShiftDirection::Upper),
            "lower" => Some(ShiftDirection::Lower),
            _ => None,
        }
    }
}

/// Upper: `γ(σ) = γ((σ*)^ι) + 1` (needs `γ(σ) > 1` and `σ ∼ (σ*)_*`).
/// Lower: `γ(σ) + 1 = γ((σ^ι)_*)` (needs `γ(σ) > 0`).
pub fn gamma_shift_check(sigma: &WeightFunction, dir: ShiftDirection, tol: f64) -> Verdict {
    let id = match dir {
        ShiftDirection::Upper => "gamma_shift_upper",
        ShiftDirection::Lower => "gamma_shift_lower",
    };
    let cfg = EstimatorConfig::default();
    let rep = estimate(sigma.profile(), &cfg);
    let g = rep.gamma;
    let inconclusive = |why: String| Verdict::new(id, Status::Inconclusive, json!({"reason": why, "gamma": g}));
    match dir {
        ShiftDirection::Upper => {
            if !(g.0 > 1.0) {
                return inconclusive("gamma(sigma) is not above 1".into());
            }
            let conj = match upper_conjugate(sigma) {
                Ok(c) => c,
                Err(e) => return inconclusive(e.to_string()),
            };
            if let Ok(maj) = least_concave_majorant(sigma) {
                let us: Vec<f64> = maj.x.iter().map(|t| t.ln()).collect();
                let ratio: Vec<f64> = maj.hull.iter().zip(&maj.y).map(|(&a, &b)| (a / b).ln()).collect();
                let top = us[us.len() - 1];
                let ends: Vec<f64> = geometric_windows(top / 16.0, top, 4).into_iter().map(|w| w.1).collect();
                let r = cumulative_max(&us, &ratio, &ends);
                if bounded_trend(&r) == Status::Fails {
                    return inconclusive("sigma is not equivalent to its concave majorant".into());
                }
            }
            let iota = match conj.iota() {
                Ok(f) => f,
                Err(e) => return inconclusive(e.to_string()),
            };
            let ri = estimate(iota.profile(), &cfg);
            if g.is_inf() {
                let st = if ri.gamma.is_inf() { Status::Holds } else { Status::Inconclusive };
                return Verdict::new(id, st, json!({"gamma": g, "gamma_conj_iota": ri.gamma}));
            }
            let shift = g.0 - ri.gamma.0;
            let mut ok = ri.gamma.is_finite() && g.is_finite() && (shift - 1.0).abs() <= 2.0 * tol;
            let mut w = json!({"gamma": g, "gamma_conj_iota": ri.gamma, "shift": num(shift)});
            if rep.beta.0 > tol {
                let sb = rep.gamma_bar.0 - ri.gamma_bar.0;
                w["gamma_bar"] = json!(rep.gamma_bar);
                w["gamma_bar_conj_iota"] = json!(ri.gamma_bar);
                ok &= rep.gamma_bar.is_finite() && (sb - 1.0).abs() <= 2.0 * tol;
            }
            Verdict::new(id, Status::from_bool(ok), w)
        }
        ShiftDirection::Lower => {
            if !(g.0 > 0.0) {
                return inconclusive("gamma(sigma) is not positive".into());
            }
            let hi = sigma.profile().hi;
            let s2 = sigma.clone();
            let lc = lower_conjugate(format!("({})^iota", sigma.label), move |w| value_at_log(&s2, -w), -hi, hi);
            let wf = match lc.weight_function(hi) {
                Ok(f) => f,
                Err(e) => return inconclusive(e.to_string()),
            };
            let rl = estimate(wf.profile(), &cfg);
            if g.is_inf() {
                let st = if rl.gamma.is_inf() { Status::Holds } else { Status::Inconclusive };
                return Verdict::new(id, st, json!({"gamma": g, "gamma_lower_conj": rl.gamma}));
            }
            let shift = rl.gamma.0 - g.0;
            let ok = rl.gamma.is_finite() && g.is_finite() && (shift - 1.0).abs() <= 2.0 * tol;
            Verdict::new(
                id,
                Status::from_bool(ok),
                json!({"gamma": g, "gamma_lower_conj": rl.gamma, "shift": num(shift)}),
            )
        }
    }
}

/// Matuszewska indices at zero of `w ↦ ln f(e^w)` sampled on `w ∈ [a, b]`:
/// `(α⁰, β⁰)` from `inf_λ ln sup ratio / ln λ` and `sup_λ ln inf ratio / ln λ`.
pub fn indices_at_zero(log_f: impl Fn(f64) -> f64, a: f64, b: f64) -> (ExtReal, ExtReal) {
    let n = 1024;
    let ws = linspace(a, b, n);
    let ys: Vec<f64> = ws.iter().map(|&w| log_f(w)).collect();
    let dw = (b - a) / (n - 1) as f64;
    let (mut alpha, mut beta) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut k = 1.0;
    while k * std::f64::consts::LN_2 <= 0.5 * (b - a) {
        let l = k * std::f64::consts::LN_2;
        let shift = (l / dw).round() as usize;
        let l = shift as f64 * dw;
        let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..n - shift {
            let d = ys[i + shift] - ys[i];
            hi = hi.max(d);
            lo = lo.min(d);
        }
        alpha = alpha.min(hi / l);
        beta = beta.max(lo / l);
        k += 1.0;
    }
    (ExtReal(alpha), ExtReal(beta))
}

/// `α⁰(σ*) = -β((σ*)^ι)`, `β⁰(σ*) = -α((σ*)^ι)` and
/// `1/α(σ) + 1/β⁰(σ*) = 1`.
pub fn index_bridge_check(sigma: &WeightFunction, tol: f64) -> Verdict {
    let cfg = EstimatorConfig::default();
    let fail = |why: String| Verdict::new("index_bridge", Status::Inconclusive, json!({"reason": why}));
    let conj = match upper_conjugate(sigma) {
        Ok(c) => c,
        Err(e) => return fail(e.to_string()),
    };
    let iota = match conj.iota() {
        Ok(f) => f,
        Err(e) => return fail(e.to_string()),
    };
    let u = iota.profile().hi;
    let (a0, b0) = indices_at_zero(|w| conj.eval(w.exp()).ln(), -u, -0.25 * u);
    let ri = estimate(iota.profile(), &cfg);
    let rs = estimate(sigma.profile(), &cfg);
    let ok1 = (a0.0 + ri.beta.0).abs() <= tol;
    let ok2 = (b0.0 + ri.alpha.0).abs() <= tol;
    let mut w = json!({
        "alpha0_conj": a0, "beta0_conj": b0,
        "alpha_conj_iota": ri.alpha, "beta_conj_iota": ri.beta,
        "alpha_sigma": rs.alpha,
    });
    let mut ok = ok1 && ok2;
    if rs.alpha.is_finite() && rs.alpha.0 > 0.0 && b0.0 != 0.0 && b0.is_finite() {
        let s = 1.0 / rs.alpha.0 + 1.0 / b0.0;
        w["conjugate_identity"] = num(s);
        ok &= (s - 1.0).abs() <= 0.05;
    }
    Verdict::new("index_bridge", Status::from_bool(ok), w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gevrey_fn;

    fn two_sqrt() -> WeightFunction {
        WeightFunction::from_log(
            "2sqrt",
            0.0,
            460.0,
            |u| std::f64::consts::LN_2 + 0.5 * u,
            Some(Arc::new(|t: f64| 2.0 * t.sqrt())),
        )
        .unwrap()
    }

    #[test]
    fn conjugate_of_two_sqrt_is_reciprocal() {
        let c = upper_conjugate(&two_sqrt()).unwrap();
        let g = c.graph(3.0 * std::f64::consts::LN_10, 61);
        let mut n = 0;
        for i in g.trusted() {
            let s = g.x[i];
            assert!(rel_gap(g.y[i], 1.0 / s, 1e-300) <= 1e-6, "s={s} got {} want {}", g.y[i], 1.0 / s);
            n += 1;
        }
        assert!(n > 50);
    }

    #[test]
    fn lower_conjugate_of_reciprocal_is_two_sqrt() {
        let lc = lower_conjugate("1/s", |w| (-w).exp(), -60.0, 60.0);
        for &t in &[1e-3, 0.1, 1.0, 7.0, 1e3] {
            let v = lc.at(t);
            assert!(!v.censored);
            assert!(rel_gap(v.value, 2.0 * f64::sqrt(t), 1e-300) <= 1e-6, "t={t}");
        }
    }

    #[test]
    fn majorant_of_concave_is_itself() {
        let m = least_concave_majorant(&two_sqrt()).unwrap();
        assert_eq!(m.verdict().status, Status::Holds, "{:?}", m.verdict());
        let worst = m.x.iter().zip(&m.hull).map(|(&t, &h)| rel_gap(h, 2.0 * t.sqrt(), 1e-12)).fold(0.0, f64::max);
        assert!(worst <= 1e-9, "{worst}");
    }

    #[test]
    fn majorant_fills_a_dip() {
        let x = vec![0.0, 1.0, 2.0, 3.0];
        let y = vec![0.0, 2.0, 1.0, 3.0];
        let m = concave_majorant_of(x, y);
        assert!((m.hull[2] - 2.5).abs() < 1e-12);
        assert!((m.conj[2] - 2.5).abs() < 1e-9);
    }

    #[test]
    fn minorant_of_convex_is_itself() {
        let m = largest_convex_minorant(|w| (-w).exp(), -10.0, 10.0);
        assert_eq!(m.verdict().status, Status::Holds, "{:?}", m.verdict());
    }

    #[test]
    fn k_beta_values() {
        assert!((k_beta(1.0) - 0.25).abs() < 1e-15);
        assert!((k_beta(2.0) - 3f64.powf(-1.5)).abs() < 1e-15);
    }

    #[test]
    fn gamma_shift_for_powers() {
        for &(s, tol) in &[(0.5, 0.05), (1.0 / 3.0, 0.05)] {
            let f = gevrey_fn(s).unwrap();
            for dir in [ShiftDirection::Lower, ShiftDirection::Upper] {
                let v = gamma_shift_check(&f, dir, tol);
                assert_eq!(v.status, Status::Holds, "{v:?}");
            }
        }
        let f = WeightFunction::from_log("t^2", 0.0, 460.0, |u| 2.0 * u, Some(Arc::new(|t: f64| t * t))).unwrap();
        let v = gamma_shift_check(&f, ShiftDirection::Upper, 0.05);
        assert_eq!(v.status, Status::Inconclusive, "{v:?}");
    }

    #[test]
    fn peetre_for_concave_like() {
        let f = crate::generators::linlog_fn(1.0).unwrap();
        assert_eq!(peetre_check(&f).status, Status::Holds);
        let sq = gevrey_fn(2.0).unwrap();
        assert_eq!(peetre_check(&sq).status, Status::Fails);
    }

    #[test]
    fn convex_peetre_on_reciprocal_power() {
        let v = convex_peetre_check(|w| (-0.5 * w).exp(), -40.0, 40.0, 0.5).unwrap();
        assert_eq!(v.status, Status::Holds, "{v:?}");
        let v = convex_peetre_check(|w| (-w).exp().exp(), -12.0, 12.0, 1.0).unwrap();
        assert_eq!(v.status, Status::Fails, "{v:?}");
    }

    #[test]
    fn bridge_for_sqrt() {
        let v = index_bridge_check(&two_sqrt(), 0.05);
        assert_eq!(v.status, Status::Holds, "{v:?}");
    }
}
