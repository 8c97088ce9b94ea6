//! Equivalence batteries: every numerically checkable condition of the four
//! characterization theorems (α/β for functions, β/α for quotient sequences),
//! each decided on its own and then compared.

use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use super::{estimate, gamma_m, seq_indices, EstimatorConfig, ExtReal};
use crate::error::{Error, Result};
use crate::fn_model::{log_shift_integral, WeightFunction};
use crate::numeric::{extrapolate_tail, geometric_windows, linspace, log_integral, lse};
use crate::profile::LogProfile;
use crate::seq_model::{index_windows, QuotientSequence, WeightSequence};
use crate::verdict::{bounded_trend, num, nums, Status, Verdict};

const LN2: f64 = std::f64::consts::LN_2;
const TOL: f64 = 0.05;
/// `θ` of the "for every θ" conditions.
const THETA: f64 = 0.5;
/// `k = 2^j` with `j ≤ K_EXP_MAX` for the `k`-searches.
const K_EXP_MAX: u32 = 16;
/// `ε = 2^{-k}`, `1 ≤ k ≤ EPS_EXP_MAX`.
const EPS_EXP_MAX: i32 = 12;
/// Integer conditions are summed exactly up to this index.
const EXACT_SUM_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    AlphaFn,
    BetaFn,
    BetaSeq,
    AlphaSeq,
}

impl TheoremId {
    pub fn parse(s: &str) -> Option<TheoremId> {
        match s {
            "alpha_fn" => Some(TheoremId::AlphaFn),
            "beta_fn" => Some(TheoremId::BetaFn),
            "beta_seq" => Some(TheoremId::BetaSeq),
            "alpha_seq" => Some(TheoremId::AlphaSeq),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::AlphaFn => "alpha_fn",
            TheoremId::BetaFn => "beta_fn",
            TheoremId::BetaSeq => "beta_seq",
            TheoremId::AlphaSeq => "alpha_seq",
        }
    }
}

#[derive(Clone, Copy)]
pub enum Subject<'a> {
    Fn(&'a WeightFunction),
    Seq(&'a QuotientSequence),
}

#[derive(Debug, Clone, Serialize)]
pub struct BatteryReport {
    pub theorem_id: TheoremId,
    pub parameter: f64,
    pub conditions: Vec<Verdict>,
    pub consistent: bool,
}

impl BatteryReport {
    /// The common definite verdict, if all definite verdicts agree.
    pub fn verdict(&self) -> Status {
        let mut it = self.conditions.iter().map(|c| c.status).filter(|s| s.is_definite());
        match it.next() {
            None => Status::Inconclusive,
            Some(first) => {
                if it.all(|s| s == first) {
                    first
                } else {
                    Status::Inconclusive
                }
            }
        }
    }

    /// Definite verdicts that disagree with the majority of definite ones.
    pub fn contradictions(&self) -> Vec<(String, Status)> {
        let holds = self.conditions.iter().filter(|c| c.status == Status::Holds).count();
        let fails = self.conditions.iter().filter(|c| c.status == Status::Fails).count();
        if holds == 0 || fails == 0 {
            return vec![];
        }
        let minority = if holds < fails { Status::Holds } else { Status::Fails };
        self.conditions
            .iter()
            .filter(|c| c.status == minority)
            .map(|c| (c.id.clone(), c.status))
            .collect()
    }
}

/// Runs the named battery at the given parameter.
pub fn battery(subject: Subject<'_>, theorem: TheoremId, parameter: f64) -> Result<BatteryReport> {
    let conditions = match (theorem, subject) {
        (TheoremId::AlphaFn, Subject::Fn(s)) => {
            positive(parameter)?;
            alpha_fn(s, parameter)
        }
        (TheoremId::BetaFn, Subject::Fn(s)) => {
            nonnegative(parameter)?;
            beta_fn(s, parameter)
        }
        (TheoremId::BetaSeq, Subject::Seq(m)) => {
            nonnegative(parameter)?;
            beta_seq(m, parameter)
        }
        (TheoremId::AlphaSeq, Subject::Seq(m)) => {
            positive(parameter)?;
            alpha_seq(m, parameter)
        }
        _ => {
            return Err(Error::Input(format!(
                "battery {} does not apply to this subject",
                theorem.as_str()
            )))
        }
    };
    let has = |st: Status| conditions.iter().any(|c| c.status == st);
    let consistent = !(has(Status::Holds) && has(Status::Fails));
    Ok(BatteryReport {
        theorem_id: theorem,
        parameter,
        conditions,
        consistent,
    })
}

fn positive(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("battery parameter must be positive, got {a}")))
    }
}

fn nonnegative(b: f64) -> Result<()> {
    if b >= 0.0 && b.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("battery parameter must be nonnegative, got {b}")))
    }
}

// ---------------------------------------------------------------------------
// Probes: a uniform view of functions and quotient sequences.

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `x ↦ ln f(x)` with the range where it is trusted.
struct Probe {
    lf: RealFn,
    profile: LogProfile,
    x_max: f64,
    /// Piecewise constant between integers.
    step: bool,
}

impl Probe {
    fn of_fn(s: &WeightFunction) -> Probe {
        let p = s.profile().clone();
        let q = p.clone();
        Probe {
            lf: Arc::new(move |x: f64| if x > 0.0 { q.at(x.ln()) } else { f64::NEG_INFINITY }),
            x_max: p.hi.exp(),
            profile: p,
            step: s.step,
        }
    }

    fn of_seq(m: &QuotientSequence) -> Probe {
        let q = m.clone();
        let smooth = m.closed().map(|c| c.smooth).unwrap_or(false);
        Probe {
            lf: Arc::new(move |x: f64| q.log_m_at(x)),
            x_max: m.x_max(),
            profile: m.step_profile(false),
            step: !smooth,
        }
    }

    fn at(&self, x: f64) -> f64 {
        (self.lf)(x)
    }

    fn hi(&self) -> f64 {
        self.x_max.ln()
    }
}

/// Rounded to an integer where that is representable.
fn int_like(x: f64) -> f64 {
    if x < 9.0e15 {
        x.round()
    } else {
        x
    }
}

/// Integers `p0..=min(limit, top)` followed by a geometric grid up to `top`.
fn p_grid(p0: f64, top: f64, extra: usize) -> Vec<f64> {
    let mut v: Vec<f64> = Vec::new();
    let first = p0.max(1.0).ceil();
    let exact_top = top.min(EXACT_SUM_LIMIT as f64).floor();
    let mut p = first;
    while p <= exact_top {
        v.push(p);
        p += 1.0;
    }
    let start = v.last().copied().unwrap_or(first - 1.0) + 1.0;
    if top > start {
        for u in linspace(start.ln(), top.ln(), extra) {
            let x = int_like(u.exp()).min(top);
            if v.last().is_none_or(|&l| x > l) {
                v.push(x);
            }
        }
    }
    v
}

/// Points `p` with `ln p ∈ [hi/4, hi - ln k]`, the limsup/liminf proxy range.
fn tail_points(hi: f64, ln_k: f64, integer: bool) -> Vec<f64> {
    let (a, b) = (0.25 * hi, hi - ln_k);
    if !(b > a) {
        return vec![];
    }
    linspace(a, b, 1024)
        .into_iter()
        .map(|u| if integer { int_like(u.exp()) } else { u.exp() })
        .collect()
}

fn k_exp_limit(hi: f64) -> u32 {
    ((0.75 * hi / LN2 / 2.0).floor() as i64).clamp(1, K_EXP_MAX as i64) as u32
}

/// Extremes of `ln f(kp) - ln f(p)` over `ps` (`kp ≤ x_max`).
fn shift_extremes(pr: &Probe, ps: &[f64], k: f64) -> (f64, f64) {
    let mut sup = f64::NEG_INFINITY;
    let mut inf = f64::INFINITY;
    for &p in ps {
        let kp = k * p;
        if kp > pr.x_max {
            continue;
        }
        let d = pr.at(kp) - pr.at(p);
        if d.is_nan() {
            continue;
        }
        sup = sup.max(d);
        inf = inf.min(d);
    }
    (sup, inf)
}

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

// ---------------------------------------------------------------------------
// Reusable condition shapes.

/// `lim_{k→∞} lim(sup|inf)_p [ln f(kp) - ln f(p)] - c ln k` is `-∞`
/// (`to_minus = true`) or `+∞`: decided from the slope in `log2 k`.
fn k_limit(id: &str, pr: &Probe, c: f64, upper: bool, integer: bool) -> Verdict {
    let hi = pr.hi();
    let jmax = k_exp_limit(hi);
    let mut js = vec![];
    let mut gs = vec![];
    for j in 1..=jmax {
        let lk = j as f64 * LN2;
        let ps = tail_points(hi, lk, integer);
        if ps.is_empty() {
            break;
        }
        let (sup, inf) = shift_extremes(pr, &ps, lk.exp());
        let g = if upper { sup } else { inf } - c * lk;
        if !g.is_finite() {
            continue;
        }
        js.push(j as f64);
        gs.push(g);
    }
    if js.len() < 3 {
        return Verdict::new(id, Status::Inconclusive, json!({"reason": "range too short"}));
    }
    let h = js.len() / 2;
    let s = slope(&js[h..], &gs[h..]);
    let margin = TOL * LN2;
    // upper: the ratio must vanish; lower: it must blow up
    let status = if upper {
        if s < -margin {
            Status::Holds
        } else if s > margin {
            Status::Fails
        } else {
            Status::Inconclusive
        }
    } else if s > margin {
        Status::Holds
    } else if s < -margin {
        Status::Fails
    } else {
        Status::Inconclusive
    };
    Verdict::new(id, status, json!({"log2_k": nums(&js), "log_ratio": nums(&gs), "slope": num(s)}))
}

/// `∃k: lim(sup|inf) f(kp)/f(p) (<|>) k^c`, with `k = 2^j`.
fn exists_k_limit(id: &str, pr: &Probe, c: f64, upper: bool, integer: bool, real_k: bool) -> Verdict {
    let hi = pr.hi();
    let jmax = k_exp_limit(hi);
    let mut best = if upper { f64::INFINITY } else { f64::NEG_INFINITY };
    let mut best_k = f64::NAN;
    let steps: Vec<f64> = if real_k {
        (1..=4 * jmax).map(|i| i as f64 * 0.25).collect()
    } else {
        (1..=jmax).map(|j| j as f64).collect()
    };
    for j in steps {
        let lk = j * LN2;
        let ps = tail_points(hi, lk, integer);
        if ps.is_empty() {
            break;
        }
        let (sup, inf) = shift_extremes(pr, &ps, lk.exp());
        let e = if upper { sup } else { inf } / lk;
        if e.is_nan() {
            continue;
        }
        if (upper && e < best) || (!upper && e > best) {
            best = e;
            best_k = lk.exp();
        }
    }
    let status = if best.is_nan() || best_k.is_nan() {
        Status::Inconclusive
    } else if upper {
        if best < c - TOL {
            Status::Holds
        } else if best > c + TOL {
            Status::Fails
        } else {
            Status::Inconclusive
        }
    } else if best > c + TOL {
        Status::Holds
    } else if best < c - TOL {
        Status::Fails
    } else {
        Status::Inconclusive
    };
    Verdict::new(id, status, json!({"k": num(best_k), "exponent": num(best)}))
}

/// `∀θ ∃k ≥ 2 ∀p ≥ p0: ln f(kp) - ln f(p) (≤ ln θ + c ln k | ≥ -ln θ + c ln k)`,
/// at `θ = 1/2`, `k = 2^j ≤ 2^16`. When no `k` qualifies the verdict is
/// `Fails` only if the excess is not shrinking as `k` grows.
fn theta_k(id: &str, pr: &Probe, c: f64, upper: bool, p0: f64) -> Verdict {
    let lt = THETA.ln();
    let mut js = vec![];
    let mut excess = vec![];
    for j in 1..=K_EXP_MAX {
        let k = 2f64.powi(j as i32);
        let top = pr.x_max / k;
        if top < p0 {
            break;
        }
        let ps = p_grid(p0, top, 2048);
        let (sup, inf) = shift_extremes(pr, &ps, k);
        let e = if upper {
            sup - (lt + c * k.ln())
        } else {
            (-lt + c * k.ln()) - inf
        };
        if e <= 0.0 {
            return Verdict::new(id, Status::Holds, json!({"theta": THETA, "k": k}));
        }
        js.push(j as f64);
        excess.push(e);
    }
    let status = if js.len() < 3 {
        Status::Inconclusive
    } else {
        let h = js.len() / 2;
        if slope(&js[h..], &excess[h..]) >= 0.0 {
            Status::Fails
        } else {
            Status::Inconclusive
        }
    };
    Verdict::new(
        id,
        status,
        json!({"theta": THETA, "log2_k": nums(&js), "log_excess": nums(&excess)}),
    )
}

/// Index-based condition: `value (<|>) c` with the estimator tolerance.
fn index_vs(id: &str, value: ExtReal, c: f64, less: bool) -> Verdict {
    let v = value.0;
    let status = if v.is_nan() {
        Status::Inconclusive
    } else if less {
        if v < c - TOL {
            Status::Holds
        } else if v > c + TOL {
            Status::Fails
        } else {
            Status::Inconclusive
        }
    } else if v > c + TOL {
        Status::Holds
    } else if v < c - TOL {
        Status::Fails
    } else {
        Status::Inconclusive
    };
    Verdict::new(id, status, json!({"estimate": value, "bound": c}))
}

/// Window ends (in the variable `x`) for nested-range statistics.
fn nested_ends(lo: f64, hi: f64) -> Vec<f64> {
    if !(hi > lo && lo > 0.0) {
        return vec![];
    }
    geometric_windows(lo, hi, 4).into_iter().map(|(_, b)| b).collect()
}

/// A log-quantity kept as `big + small`. Sequences like the counter-example
/// have `ln m_p` far beyond `2^53`, so `ln m_p - γ ln p` would lose the
/// `γ ln p` part entirely; differences are taken part by part instead.
#[derive(Debug, Clone, Copy)]
struct Split {
    big: f64,
    small: f64,
}

impl Split {
    fn new(big: f64, small: f64) -> Split {
        Split { big, small }
    }

    fn minus(self, o: Split) -> f64 {
        let d = if self.big == o.big { 0.0 } else { self.big - o.big };
        d + (self.small - o.small)
    }
}

/// `max_{x_i ≤ x_j ≤ end} (g_j - g_i)` for each end: the log-constant needed
/// for `e^g` to be almost decreasing on the growing range.
fn nested_rise(xs: &[f64], gs: &[Split], ends: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(ends.len());
    let mut run_min: Option<Split> = None;
    let mut best = 0.0f64;
    let mut e = 0;
    for (&x, &g) in xs.iter().zip(gs) {
        while e < ends.len() && x > ends[e] {
            out.push(best);
            e += 1;
        }
        if g.big.is_nan() || g.small.is_nan() {
            continue;
        }
        let m = match run_min {
            Some(m) if g.minus(m) >= 0.0 => m,
            _ => g,
        };
        run_min = Some(m);
        let d = g.minus(m);
        if !d.is_nan() {
            best = best.max(d);
        }
    }
    while out.len() < ends.len() {
        out.push(best);
    }
    out
}

/// Almost-monotone condition with an exponent search over `ε = 2^{-k}`:
/// `decreasing`: `e^{L(x)} / x^{c-ε}` almost decreasing for some `ε`;
/// otherwise `e^{L(x)} / x^{c+ε}` almost increasing.
fn almost_monotone(id: &str, xs: &[f64], ls: &[f64], logx: &[f64], ends: &[f64], c: f64, decreasing: bool) -> Verdict {
    let mut any_holds = None;
    let mut all_fail = true;
    let mut first_trend = vec![];
    for k in 1..=EPS_EXP_MAX {
        let eps = 2f64.powi(-k);
        if decreasing && c - eps <= 0.0 {
            continue;
        }
        let g: Vec<Split> = if decreasing {
            ls.iter().zip(logx).map(|(&l, &u)| Split::new(l, -(c - eps) * u)).collect()
        } else {
            ls.iter().zip(logx).map(|(&l, &u)| Split::new(-l, (c + eps) * u)).collect()
        };
        let trend = nested_rise(xs, &g, ends);
        let st = bounded_trend(&trend);
        if first_trend.is_empty() {
            first_trend = trend.clone();
        }
        if st == Status::Holds {
            any_holds = Some((eps, trend));
            break;
        }
        if st != Status::Fails {
            all_fail = false;
        }
    }
    match any_holds {
        Some((eps, trend)) => Verdict::new(
            id,
            Status::Holds,
            json!({"epsilon": eps, "log_C_per_window": nums(&trend), "C": num(trend.iter().copied().fold(0.0, f64::max).exp())}),
        ),
        None => Verdict::new(
            id,
            if all_fail && !first_trend.is_empty() { Status::Fails } else { Status::Inconclusive },
            json!({"log_C_per_window_largest_eps": nums(&first_trend)}),
        ),
    }
}

/// A constant whose logarithm exceeds this is not a usable witness.
const LOG_C_CEILING: f64 = 709.0;

fn constant_verdict(id: &str, maxes: Vec<f64>, args: Vec<f64>) -> Verdict {
    let c = maxes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let status = if c > LOG_C_CEILING { Status::Fails } else { bounded_trend(&maxes) };
    Verdict::new(
        id,
        status,
        json!({"C": num(c.exp()), "log_C_per_window": nums(&maxes), "at": nums(&args)}),
    )
}

// ---------------------------------------------------------------------------
// Sums over integers and integrals of profiles. Everything is accumulated
// relative to the value of the dominant term at the evaluation point, so the
// log-constants come out without cancellation.

fn finite_or_zero(r: f64) -> f64 {
    if r.is_finite() {
        r
    } else {
        0.0
    }
}

/// Log-accumulator stored relative to a movable reference level.
struct Rel {
    acc: f64,
    r: f64,
}

impl Rel {
    fn new(r: f64) -> Rel {
        Rel {
            acc: f64::NEG_INFINITY,
            r: finite_or_zero(r),
        }
    }

    fn rebase(&mut self, r: f64) {
        let r = finite_or_zero(r);
        if self.acc > f64::NEG_INFINITY && self.r != r {
            self.acc += self.r - r;
        }
        self.r = r;
    }

    fn add(&mut self, v: f64) {
        self.acc = lse(self.acc, v);
    }

    /// `ln(total) - level`.
    fn relative_to(&self, level: f64) -> f64 {
        if level.is_finite() {
            let d = if self.r == level { 0.0 } else { self.r - level };
            self.acc + d
        } else {
            self.acc + self.r - level
        }
    }
}

/// `ln ∫_{start}^{v} e^{big + rest} - big(v)` for increasing `vs`.
fn rel_cumulative(big: impl Fn(f64) -> f64, rest: impl Fn(f64) -> f64, start: f64, vs: &[f64]) -> Vec<f64> {
    let mut st = Rel::new(big(start));
    let mut at = start;
    vs.iter()
        .map(|&v| {
            let bv = big(v);
            if v > at {
                st.rebase(bv);
                let r = st.r;
                st.add(log_integral(|u| (big(u) - r) + rest(u), at, v, 1e-9));
                at = v;
            }
            st.relative_to(bv)
        })
        .collect()
}

/// `ln ∫_v^{top} e^{big + rest} - big(v)` for increasing `vs`; with
/// `top ≥ hi` the part beyond `hi` is extrapolated.
fn rel_tail(big: impl Fn(f64) -> f64, rest: impl Fn(f64) -> f64, hi: f64, top: f64, vs: &[f64]) -> Vec<f64> {
    let at0 = top.min(hi);
    let mut st = Rel::new(big(at0));
    if top >= hi {
        let r = st.r;
        st.add(extrapolate_tail(|u| (big(u) - r) + rest(u), hi).log_value);
    }
    let mut at = at0;
    let mut out = vec![f64::NEG_INFINITY; vs.len()];
    for i in (0..vs.len()).rev() {
        let v = vs[i];
        let bv = big(v);
        if v < at {
            st.rebase(bv);
            let r = st.r;
            st.add(log_integral(|u| (big(u) - r) + rest(u), v, at, 1e-9));
            at = v;
        }
        out[i] = st.relative_to(bv);
    }
    out
}

/// Suffix-type conditions on growing horizons: window `[a, b]` (in `ln p`)
/// sums up to `ln p = 2b`, so a divergent sum shows up as growth across
/// windows instead of a constant set by the ceiling.
fn horizon(b: f64, hi: f64) -> f64 {
    if 2.0 * b >= hi * (1.0 - 1e-9) {
        f64::INFINITY
    } else {
        2.0 * b
    }
}

/// Runs a suffix computation window by window with the matching horizon
/// (in log scale, `INFINITY` for the full range plus tail).
fn per_window(ws: &[Vec<f64>], to_log: impl Fn(f64) -> f64, hi: f64, mut f: impl FnMut(&[f64], f64) -> Vec<f64>) -> Vec<f64> {
    let mut out = Vec::new();
    for w in ws {
        let end = w.last().map_or(0.0, |&x| to_log(x));
        out.extend(f(w, horizon(end, hi)));
    }
    out
}

/// Sums over integers `k ≥ k0` of `e^{sign·ln f(k) + rest(k)}`: exact up to
/// [`EXACT_SUM_LIMIT`], then by quadrature of the continuous extension, and
/// a fitted tail beyond the ceiling. Results are relative to `sign·ln f(p)`.
struct IntSums<'a> {
    pr: &'a Probe,
    sign: f64,
    rest: Box<dyn Fn(f64) -> f64 + 'a>,
    k0: usize,
    n0: usize,
}

impl<'a> IntSums<'a> {
    fn new(pr: &'a Probe, sign: f64, rest: impl Fn(f64) -> f64 + 'a, k0: usize) -> IntSums<'a> {
        let n0 = (pr.x_max.floor() as usize).min(EXACT_SUM_LIMIT).max(k0 + 1);
        IntSums {
            pr,
            sign,
            rest: Box::new(rest),
            k0,
            n0,
        }
    }

    fn big(&self, x: f64) -> f64 {
        self.sign * self.pr.at(x)
    }

    fn lower(&self, k: f64) -> f64 {
        if self.pr.step {
            k
        } else {
            k - 0.5
        }
    }

    fn arg(&self, w: f64) -> f64 {
        let x = w.exp().min(self.pr.x_max);
        if self.pr.step {
            x.floor()
        } else {
            x
        }
    }

    /// `ln ∫_a^b` of the continuous extension, relative to `r`.
    fn seg(&self, a: f64, b: f64, r: f64) -> f64 {
        if !(b > a) {
            return f64::NEG_INFINITY;
        }
        log_integral(
            |w| {
                let x = self.arg(w);
                (self.big(x) - r) + (self.rest)(x) + w
            },
            a.ln(),
            b.ln(),
            1e-9,
        )
    }

    fn add_int(&self, st: &mut Rel, k: usize) {
        let b = self.big(k as f64);
        st.rebase(b);
        let d = if b == st.r { 0.0 } else { b - st.r };
        st.add(d + (self.rest)(k as f64));
    }

    /// `ln Σ_{k0 ≤ k ≤ p} - sign·ln f(p)` for increasing integer `ps`.
    fn prefix_rel(&self, ps: &[f64]) -> Vec<f64> {
        let n0 = self.n0 as f64;
        let mut st = Rel::new(self.big(self.k0 as f64));
        let mut next = self.k0;
        let mut at = self.lower(n0);
        let mut out = Vec::with_capacity(ps.len());
        for &p in ps {
            let bp = self.big(p);
            if p < self.k0 as f64 {
                out.push(f64::NEG_INFINITY);
                continue;
            }
            let last = if p < n0 { p as usize } else { self.n0 - 1 };
            while next <= last {
                self.add_int(&mut st, next);
                next += 1;
            }
            if p >= n0 {
                let upto = if self.pr.step { p + 1.0 } else { p + 0.5 };
                if upto > at {
                    st.rebase(bp);
                    let s = self.seg(at, upto, st.r);
                    st.add(s);
                    at = upto;
                }
            }
            out.push(st.relative_to(bp));
        }
        out
    }

    /// `ln Σ_{p ≤ k ≤ top} - sign·ln f(p)` for increasing integer `ps`; with
    /// `top ≥ x_max` the sum runs to infinity.
    fn suffix_rel(&self, ps: &[f64], top: f64) -> Vec<f64> {
        let full = top >= self.pr.x_max;
        let x_max = self.pr.x_max.min(top);
        let n0 = self.n0 as f64;
        let mut st = Rel::new(self.big(x_max));
        let mut at = x_max;
        if full && x_max > n0 {
            let r = st.r;
            let tail = extrapolate_tail(
                |w| {
                    let x = self.arg(w);
                    (self.big(x) - r) + (self.rest)(x) + w
                },
                x_max.ln(),
            );
            st.add(tail.log_value);
        } else if x_max <= n0 {
            at = n0;
        }
        let mut next = (self.n0 as i64 - 1).min(x_max.floor() as i64);
        let mut out = vec![f64::NEG_INFINITY; ps.len()];
        for i in (0..ps.len()).rev() {
            let p = ps[i].max(self.k0 as f64);
            let bp = self.big(p);
            let low = self.lower(p.max(n0));
            if low < at {
                st.rebase(bp);
                let s = self.seg(low, at, st.r);
                st.add(s);
                at = low;
            }
            while p < n0 && next >= p as i64 {
                self.add_int(&mut st, next as usize);
                next -= 1;
            }
            out[i] = st.relative_to(bp);
        }
        out
    }
}

fn flat(ws: &[Vec<f64>]) -> Vec<f64> {
    ws.iter().flatten().copied().collect()
}

/// Splits a flat vector back into window-shaped pieces and takes maxima.
fn regroup_max(ws: &[Vec<f64>], vals: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut i = 0;
    let mut maxes = vec![];
    let mut args = vec![];
    for w in ws {
        let mut best = f64::NEG_INFINITY;
        let mut arg = f64::NAN;
        for &x in w {
            let v = vals[i];
            i += 1;
            if v > best {
                best = v;
                arg = x;
            }
        }
        maxes.push(best);
        args.push(arg);
    }
    (maxes, args)
}

/// Windowed constant check: `vals(points)` are log-constants.
fn windowed(id: &str, ws: &[Vec<f64>], vals: &[f64], to_x: impl Fn(f64) -> f64) -> Verdict {
    let (m, x) = regroup_max(ws, vals);
    constant_verdict(id, m, x.into_iter().map(to_x).collect())
}

/// Trend windows in `u` ending at `top`. Conditions that look past the
/// evaluation point use `top = hi/2` so the extrapolated tail stays minor.
fn u_windows_below(p: &LogProfile, top: f64) -> Vec<Vec<f64>> {
    let lo = (top / 16.0).max(p.lo).max(1e-3);
    geometric_windows(lo, top, 4)
        .into_iter()
        .map(|(a, b)| linspace(a, b.min(p.hi - 1e-6), 48))
        .collect()
}

/// Sampled `(x, ln x, L)` for nested almost-monotone statistics of a function.
fn fn_samples(p: &LogProfile) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let lo = p.lo.max(0.0);
    let us = linspace(lo, p.hi, 8192);
    let ls: Vec<f64> = us.iter().map(|&u| p.at(u)).collect();
    let ends = nested_ends((p.hi / 16.0).max(lo + 1e-9), p.hi);
    (us.clone(), us, ls, ends)
}

fn ident(x: f64) -> f64 {
    x
}

// ---------------------------------------------------------------------------
// The four batteries.

fn alpha_fn(s: &WeightFunction, a: f64) -> Vec<Verdict> {
    let pr = Probe::of_fn(s);
    let p = &pr.profile;
    let rep = estimate(p, &EstimatorConfig::default());
    let mut out = vec![];
    let ws = u_windows_below(p, p.hi);
    let ws_half = u_windows_below(p, 0.5 * p.hi);

    // (i) ∫_1^∞ σ(yt)/t^{1+a} dt ≤ Cσ(y) + C
    let vs = flat(&ws_half);
    let vals: Vec<f64> = vs.iter().map(|&v| log_shift_integral(p, v, a) - lse(p.at(v), 0.0)).collect();
    out.push(windowed("i", &ws_half, &vals, f64::exp));

    // (iii) lim_ε limsup ε^a σ(t)/σ(εt) = 0, with t ↦ t/ε = kt
    out.push(k_limit("iii", &pr, a, true, false));

    // (iv) ∃K>1: limsup σ(Kt)/σ(t) < K^a
    out.push(exists_k_limit("iv", &pr, a, true, false, true));

    // (v) γ(σ) > 1/a, from the direct (P_{σ,γ}) search
    out.push(index_vs("v", ExtReal(rep.residual.gamma_check.0 * a), 1.0, false));

    // (vi) α(σ) < a
    out.push(index_vs("vi", rep.alpha, a, true));

    // (vii) σ(t)/t^γ almost decreasing for some γ < a
    let (xs, logx, ls, ends) = fn_samples(p);
    out.push(almost_monotone("vii", &xs, &ls, &logx, &ends, a, true));

    // (viii) ∫_a^y t^a/σ(t) dt/t ≤ C y^a/σ(y)
    let vs = flat(&ws);
    let rel = rel_cumulative(|u| -p.at(u), |u| a * u, p.lo.max(0.0), &vs);
    let vals: Vec<f64> = vs.iter().zip(&rel).map(|(&v, &r)| r - a * v).collect();
    out.push(windowed("viii", &ws, &vals, f64::exp));

    let k_a = s.threshold.ceil() as usize;
    let x_max = pr.x_max;

    // (ix) Σ_{k=⌈a⌉+1}^p k^{a-1}/σ(k) ≤ C p^a/σ(p)
    let sums = IntSums::new(&pr, -1.0, move |k: f64| (a - 1.0) * k.ln(), k_a + 1);
    let iw = index_windows(x_max, ((k_a + 1) as f64).ln());
    let ps = flat(&iw);
    let vals: Vec<f64> = ps.iter().zip(sums.prefix_rel(&ps)).map(|(&q, r)| r - a * q.ln()).collect();
    out.push(windowed("ix", &iw, &vals, ident));

    // (x) ∀θ ∃k: σ(kp) ≤ θ k^a σ(p) for p ≥ ⌈a⌉+1
    out.push(theta_k("x", &pr, a, true, (k_a + 1) as f64));

    // (xi) ∃k ∈ ℕ: limsup_p σ(kp)/σ(p) < k^a
    out.push(exists_k_limit("xi", &pr, a, true, true, false));

    // (xii) Σ_{k≥p} σ(k)/k^{1+a} ≤ C σ(p)/p^a
    let k0 = k_a.max(1);
    let sums = IntSums::new(&pr, 1.0, move |k: f64| -(1.0 + a) * k.ln(), k0);
    let iw = index_windows(x_max.sqrt(), (k0 as f64).ln());
    let ps = flat(&iw);
    let rel = per_window(&iw, f64::ln, x_max.ln(), |w, h| sums.suffix_rel(w, h.exp()));
    let vals: Vec<f64> = ps.iter().zip(rel).map(|(&q, r)| r + a * q.ln()).collect();
    out.push(windowed("xii", &iw, &vals, ident));
    out
}

fn beta_fn(s: &WeightFunction, b: f64) -> Vec<Verdict> {
    let pr = Probe::of_fn(s);
    let p = &pr.profile;
    let rep = estimate(p, &EstimatorConfig::default());
    let mut out = vec![];
    let ws = u_windows_below(p, p.hi);
    let ws_half = u_windows_below(p, 0.5 * p.hi);

    // (i) ∫_1^y σ(t)/t^{b+1} dt ≤ C σ(y)/y^b
    let vs = flat(&ws);
    let rel = rel_cumulative(|u| p.at(u), |u| -b * u, 0.0, &vs);
    let vals: Vec<f64> = vs.iter().zip(&rel).map(|(&v, &r)| r + b * v).collect();
    out.push(windowed("i", &ws, &vals, f64::exp));

    // (ii) lim_k liminf σ(kt)/(k^b σ(t)) = ∞
    out.push(k_limit("ii", &pr, b, false, false));

    // (iii) ∃K>1: liminf σ(Kt)/σ(t) > K^b
    out.push(exists_k_limit("iii", &pr, b, false, false, true));

    // (iv) β(σ) > b
    out.push(index_vs("iv", rep.beta, b, false));

    // (v) σ(t)/t^γ almost increasing for some γ > b
    let (xs, logx, ls, ends) = fn_samples(p);
    out.push(almost_monotone("v", &xs, &ls, &logx, &ends, b, false));

    // (vi) y^{-b} ∫_y^∞ t^{b-1}/σ(t) dt ≤ C/σ(y)
    let vs = flat(&ws_half);
    let rel = per_window(&ws_half, |u| u, p.hi, |w, h| rel_tail(|u| -p.at(u), |u| b * u, p.hi, h, w));
    let vals: Vec<f64> = vs.iter().zip(&rel).map(|(&v, &r)| r - b * v).collect();
    out.push(windowed("vi", &ws_half, &vals, f64::exp));

    let x_max = pr.x_max;
    let k_pos = (1..64)
        .find(|&k| pr.at(k as f64) > f64::NEG_INFINITY)
        .unwrap_or(64)
        .max(s.threshold.ceil() as usize);

    // (vii) Σ_{k≥p} k^{b-1}/σ(k) ≤ C p^b/σ(p)
    let sums = IntSums::new(&pr, -1.0, move |k: f64| (b - 1.0) * k.ln(), k_pos);
    let iw = index_windows(x_max.sqrt(), (k_pos as f64).ln());
    let ps = flat(&iw);
    let rel = per_window(&iw, f64::ln, x_max.ln(), |w, h| sums.suffix_rel(w, h.exp()));
    let vals: Vec<f64> = ps.iter().zip(rel).map(|(&q, r)| r - b * q.ln()).collect();
    out.push(windowed("vii", &iw, &vals, ident));

    // (viii) ∀θ ∃k: σ(p) ≤ θ k^{-b} σ(kp) for every p ∈ ℕ
    out.push(theta_k("viii", &pr, b, false, k_pos as f64));

    // (ix) ∃k ∈ ℕ: liminf_p σ(kp)/σ(p) > k^b
    out.push(exists_k_limit("ix", &pr, b, false, true, false));

    // (x) Σ_{k=1}^p σ(k)/k^{1+b} ≤ C σ(p)/p^b
    let sums = IntSums::new(&pr, 1.0, move |k: f64| -(1.0 + b) * k.ln(), 1);
    let iw = index_windows(x_max, (k_pos as f64).ln());
    let ps = flat(&iw);
    let vals: Vec<f64> = ps.iter().zip(sums.prefix_rel(&ps)).map(|(&q, r)| r + b * q.ln()).collect();
    out.push(windowed("x", &iw, &vals, ident));
    out
}

/// Samples `p`, `ln p`, `ln m_p` on integers and a geometric grid beyond.
fn seq_samples(pr: &Probe) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let ps = p_grid(1.0, pr.x_max, 4096);
    let logp: Vec<f64> = ps.iter().map(|p| p.ln()).collect();
    let ls: Vec<f64> = ps.iter().map(|&p| pr.at(p)).collect();
    let hi = pr.hi();
    let ends: Vec<f64> = nested_ends(hi / 16.0, hi).into_iter().map(|u| u.exp()).collect();
    (ps, logp, ls, ends)
}

/// Companion `h` of the almost-monotone condition, built on the sample grid
/// with the extremum restricted to `q ≤ end`. Returns per-window
/// `max ln(m/h)` (β case) or `max ln(h/m)` (α case), and whether
/// `(p+1)^{-c} h_p` is monotone and the doubling ratio of `h` is on the right
/// side of `2^c`.
fn companion(ps: &[f64], logp: &[f64], ls: &[f64], ends: &[f64], c: f64, eps: f64, beta_case: bool) -> (Vec<f64>, bool, bool) {
    let e = if beta_case { c + eps } else { c - eps };
    let g: Vec<Split> = ls.iter().zip(logp).map(|(&l, &u)| Split::new(l, -e * u)).collect();
    let mut trend = vec![];
    let mut mono = true;
    let mut ratio_ok = true;
    for (wi, &end) in ends.iter().enumerate() {
        let n = ps.partition_point(|&p| p <= end);
        // index of the suffix extremum of g on [i, n)
        let mut arg = vec![0usize; n];
        let mut best: Option<usize> = None;
        for i in (0..n).rev() {
            let better = match best {
                None => true,
                Some(j) => {
                    let d = g[i].minus(g[j]);
                    if beta_case {
                        d < 0.0
                    } else {
                        d > 0.0
                    }
                }
            };
            if better {
                best = Some(i);
            }
            arg[i] = best.unwrap_or(i);
        }
        // ln h_p as a split value
        let lh = |i: usize| {
            let q = arg[i];
            let scale = if beta_case { logp[i] } else { (ps[i] + 1.0).ln() };
            Split::new(g[q].big, g[q].small + e * scale)
        };
        let mut worst = f64::NEG_INFINITY;
        for i in 0..n {
            let m = Split::new(ls[i], 0.0);
            let d = if beta_case { m.minus(lh(i)) } else { lh(i).minus(m) };
            if !d.is_nan() {
                worst = worst.max(d);
            }
        }
        trend.push(worst);
        if wi + 1 == ends.len() {
            for i in 1..n {
                let step = lh(i).minus(lh(i - 1)) - c * ((ps[i] + 1.0).ln() - (ps[i - 1] + 1.0).ln());
                if (beta_case && step < -1e-9) || (!beta_case && step > 1e-9) {
                    mono = false;
                }
            }
            let exact = ps.iter().take_while(|&&p| p <= EXACT_SUM_LIMIT as f64).count().min(n);
            for i in 0..exact {
                let j = 2 * i + 1; // ps[i] = i + 1, ps[j] = 2(i + 1)
                if j >= exact {
                    break;
                }
                let r = lh(j).minus(lh(i));
                if (beta_case && r <= c * LN2) || (!beta_case && r >= c * LN2) {
                    ratio_ok = false;
                }
            }
        }
    }
    (trend, mono, ratio_ok)
}

fn companion_verdict(id: &str, pr: &Probe, c: f64, beta_case: bool) -> Verdict {
    let (ps, logp, ls, ends) = seq_samples(pr);
    let mut all_fail = true;
    let mut first = vec![];
    for k in 1..=EPS_EXP_MAX {
        let eps = 2f64.powi(-k);
        if !beta_case && c - eps <= 0.0 {
            continue;
        }
        let (trend, mono, ratio_ok) = companion(&ps, &logp, &ls, &ends, c, eps, beta_case);
        let st = bounded_trend(&trend);
        if first.is_empty() {
            first = trend.clone();
        }
        if st == Status::Holds && mono && ratio_ok {
            return Verdict::new(
                id,
                Status::Holds,
                json!({"epsilon": eps, "log_c_per_window": nums(&trend), "c": num(trend.iter().copied().fold(0.0, f64::max).exp())}),
            );
        }
        if st != Status::Fails && mono && ratio_ok {
            all_fail = false;
        }
    }
    Verdict::new(
        id,
        if all_fail && !first.is_empty() { Status::Fails } else { Status::Inconclusive },
        json!({"log_c_per_window_largest_eps": nums(&first)}),
    )
}

fn beta_seq(m: &QuotientSequence, b: f64) -> Vec<Verdict> {
    let pr = Probe::of_seq(m);
    let rep = seq_indices(m);
    let x_max = pr.x_max;
    let mut out = vec![];
    let iw = index_windows(x_max, 0.0);
    let iw_half = index_windows(x_max.sqrt(), 0.0);

    // (i) Σ_{k≥p} (k+1)^{b-1}/m_k ≤ C (p+1)^b/m_p
    let sums = IntSums::new(&pr, -1.0, move |k: f64| (b - 1.0) * (k + 1.0).ln(), 0);
    let ps = flat(&iw_half);
    let rel = per_window(&iw_half, |q| (q + 1.0).ln(), x_max.ln(), |w, h| sums.suffix_rel(w, h.exp()));
    let vals: Vec<f64> = ps.iter().zip(rel).map(|(&q, r)| r - b * (q + 1.0).ln()).collect();
    out.push(windowed("i", &iw_half, &vals, ident));

    // (ii) (m_p/p^{b+ε}) almost increasing
    let (sp, logp, ls, ends) = seq_samples(&pr);
    out.push(almost_monotone("ii", &sp, &ls, &logp, &ends, b, false));

    // (iii) h_p = p^{b+ε} inf_{q≥p} q^{-(b+ε)} m_q is ≃ m
    out.push(companion_verdict("iii", &pr, b, true));

    // (iv) lim_k liminf m_{kp}/(k^b m_p) = ∞
    out.push(k_limit("iv", &pr, b, false, true));

    // (v) ∃k: liminf m_{kp}/m_p > k^b
    out.push(exists_k_limit("v", &pr, b, false, true, false));

    // (vi) ∀θ ∃k: m_p ≤ θ k^{-b} m_{kp}
    out.push(theta_k("vi", &pr, b, false, 1.0));

    // (vii) β(m) > b
    out.push(index_vs("vii", rep.beta, b, false));

    // (viii) γ(M) > b
    out.push(index_vs("viii", gamma_m(&WeightSequence::from_quotients(m)), b, false));

    // (ix) Σ_{k=0}^p m_k/(k+1)^{1+b} ≤ C m_p/(p+1)^b
    let sums = IntSums::new(&pr, 1.0, move |k: f64| -(1.0 + b) * (k + 1.0).ln(), 0);
    let ps = flat(&iw);
    let vals: Vec<f64> = ps.iter().zip(sums.prefix_rel(&ps)).map(|(&q, r)| r + b * (q + 1.0).ln()).collect();
    out.push(windowed("ix", &iw, &vals, ident));
    out
}

fn alpha_seq(m: &QuotientSequence, a: f64) -> Vec<Verdict> {
    let pr = Probe::of_seq(m);
    let rep = seq_indices(m);
    let x_max = pr.x_max;
    let mut out = vec![];
    let iw = index_windows(x_max, 0.0);
    let iw_half = index_windows(x_max.sqrt(), 0.0);

    // (i) Σ_{k=0}^p (k+1)^{a-1}/m_k ≤ C (p+1)^a/m_p
    let sums = IntSums::new(&pr, -1.0, move |k: f64| (a - 1.0) * (k + 1.0).ln(), 0);
    let ps = flat(&iw);
    let vals: Vec<f64> = ps.iter().zip(sums.prefix_rel(&ps)).map(|(&q, r)| r - a * (q + 1.0).ln()).collect();
    out.push(windowed("i", &iw, &vals, ident));

    // (ii) (m_p/p^{a-ε}) almost decreasing
    let (sp, logp, ls, ends) = seq_samples(&pr);
    out.push(almost_monotone("ii", &sp, &ls, &logp, &ends, a, true));

    // (iii) h_p = (p+1)^{a-ε} sup_{q≥p} m_q q^{-(a-ε)} is ≃ m
    out.push(companion_verdict("iii", &pr, a, false));

    // (iv) lim_k limsup m_{kp}/(k^a m_p) = 0
    out.push(k_limit("iv", &pr, a, true, true));

    // (v) ∃k: limsup m_{kp}/m_p < k^a
    out.push(exists_k_limit("v", &pr, a, true, true, false));

    // (vi) ∀θ ∃k: m_{kp} ≤ θ k^a m_p
    out.push(theta_k("vi", &pr, a, true, 1.0));

    // (vii) α(m) < a
    out.push(index_vs("vii", rep.alpha, a, true));

    // (viii) Σ_{k≥p+1} m_k/(k+1)^{1+a} ≤ C m_p/(p+1)^a
    let sums = IntSums::new(&pr, 1.0, move |k: f64| -(1.0 + a) * (k + 1.0).ln(), 0);
    let ps = flat(&iw_half);
    let rel = per_window(&iw_half, |q| (q + 1.0).ln(), x_max.ln(), |w, h| {
        let next: Vec<f64> = w.iter().map(|q| q + 1.0).collect();
        sums.suffix_rel(&next, h.exp())
    });
    let vals: Vec<f64> = ps
        .iter()
        .zip(rel)
        .map(|(&q, r)| {
            let (l1, l0) = (pr.at(q + 1.0), pr.at(q));
            let jump = if l1 == l0 { 0.0 } else { l1 - l0 };
            r + jump + a * (q + 1.0).ln()
        })
        .collect();
    out.push(windowed("viii", &iw_half, &vals, ident));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gevrey_fn, gevrey_seq};

    #[test]
    fn nested_rise_counts_later_gains() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let g: Vec<Split> = [0.0, -1.0, 0.5, 0.0].iter().map(|&v| Split::new(v, 0.0)).collect();
        assert_eq!(nested_rise(&xs, &g, &[2.0, 4.0]), vec![0.0, 1.5]);
    }

    #[test]
    fn split_keeps_small_parts() {
        let big = 1.0e28;
        let g = [Split::new(big, 0.0), Split::new(big, -3.0)];
        assert_eq!(nested_rise(&[1.0, 2.0], &[g[1], g[0]], &[2.0]), vec![3.0]);
    }

    #[test]
    fn int_sums_match_direct() {
        // m_k = (k+1)^2: Σ_{k≥p} m_k/(k+1)^4 = Σ_{j>p} 1/j^2
        let m = gevrey_seq(2.0, 4096).unwrap().quotients();
        let pr = Probe::of_seq(&m);
        let sums = IntSums::new(&pr, 1.0, |k: f64| -4.0 * (k + 1.0).ln(), 0);
        let head: f64 = (1..=100).map(|j| 1.0 / (j * j) as f64).sum();
        let tail = std::f64::consts::PI.powi(2) / 6.0 - head;
        let got = sums.suffix_rel(&[100.0], f64::INFINITY)[0] + pr.at(100.0);
        assert!((got.exp() - tail).abs() / tail < 1e-6, "{} {}", got.exp(), tail);
        let pre = sums.prefix_rel(&[100.0, 5000.0]);
        let head1 = head + 1.0 / (101.0f64 * 101.0);
        assert!(((pre[0] + pr.at(100.0)).exp() - head1).abs() < 1e-12);
        let head2: f64 = (1..=5001).map(|j| 1.0 / (j as f64).powi(2)).sum();
        assert!(((pre[1] + pr.at(5000.0)).exp() - head2).abs() < 1e-8);
    }

    #[test]
    fn sqrt_alpha_battery_at_one() {
        let s = gevrey_fn(0.5).unwrap();
        let r = battery(Subject::Fn(&s), TheoremId::AlphaFn, 1.0).unwrap();
        for c in &r.conditions {
            assert_eq!(c.status, Status::Holds, "{} {}", c.id, c.witness);
        }
        assert!(r.consistent);
    }

    #[test]
    fn square_gevrey_beta_seq_at_one() {
        let m = gevrey_seq(2.0, 4096).unwrap().quotients();
        let r = battery(Subject::Seq(&m), TheoremId::BetaSeq, 1.0).unwrap();
        for c in &r.conditions {
            assert_eq!(c.status, Status::Holds, "{} {}", c.id, c.witness);
        }
    }

    #[test]
    fn mismatched_subject() {
        let s = gevrey_fn(0.5).unwrap();
        assert!(battery(Subject::Fn(&s), TheoremId::BetaSeq, 1.0).is_err());
        assert!(battery(Subject::Fn(&s), TheoremId::AlphaFn, 0.0).is_err());
    }
}
