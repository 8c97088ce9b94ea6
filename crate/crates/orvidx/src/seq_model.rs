//! Weight sequences and quotient sequences in the natural-log domain, their
//! transforms, and the classical sequence conditions.

use std::sync::Arc;

use serde_json::json;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::numeric::{geometric_windows, lse};
use crate::profile::{LogFn, LogProfile};
use crate::verdict::{bounded_trend, num, nums, Status, Verdict};

/// Number of trend windows used by limit-type sequence conditions.
pub const TREND_WINDOWS: usize = 4;
/// Sample points per trend window.
const PER_WINDOW: usize = 48;
/// Sums are extended by quadrature at least up to this index.
pub const TAIL_EXTENT: f64 = 1e9;

/// Closed-form evaluator attached to a tabulated sequence.
#[derive(Clone)]
pub struct ClosedForm {
    /// `x ↦ ln m(x)`; at integers this is `ln m_p`.
    pub log_m: LogFn,
    /// Optional `x ↦ ln M(x)`.
    pub log_big_m: Option<LogFn>,
    /// Largest argument the evaluator is trusted at.
    pub x_max: f64,
    /// `true` when `log_m` is a smooth interpolation between integers, `false`
    /// when it is only meaningful through `floor(x)`.
    pub smooth: bool,
}

impl ClosedForm {
    pub fn new(x_max: f64, smooth: bool, log_m: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ClosedForm {
            log_m: Arc::new(log_m),
            log_big_m: None,
            x_max,
            smooth,
        }
    }

    pub fn with_log_big_m(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.log_big_m = Some(Arc::new(f));
        self
    }
}

#[derive(Clone)]
struct SeqData {
    log_big_m: Arc<Vec<f64>>,
    log_m: Arc<Vec<f64>>,
    closed: Option<ClosedForm>,
    label: String,
}

impl SeqData {
    fn from_big_m(v: Vec<f64>) -> Result<SeqData> {
        if v.len() < 17 {
            return Err(Error::Construction(format!(
                "horizon {} is below the minimum of 16",
                v.len().saturating_sub(1)
            )));
        }
        if v[0] != 0.0 {
            return Err(Error::Construction(format!("log M_0 must be 0, got {}", v[0])));
        }
        if let Some(p) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::Construction(format!("log M_{p} is not finite")));
        }
        let m: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(SeqData {
            log_big_m: Arc::new(v),
            log_m: Arc::new(m),
            closed: None,
            label: String::new(),
        })
    }

    fn from_m(m: Vec<f64>) -> Result<SeqData> {
        if m.len() < 16 {
            return Err(Error::Construction(format!(
                "horizon {} is below the minimum of 16",
                m.len()
            )));
        }
        if let Some(p) = m.iter().position(|x| !x.is_finite()) {
            return Err(Error::Construction(format!("log m_{p} is not finite")));
        }
        let mut big = Vec::with_capacity(m.len() + 1);
        let mut acc = 0.0;
        big.push(0.0);
        for &x in &m {
            acc += x;
            big.push(acc);
        }
        Ok(SeqData {
            log_big_m: Arc::new(big),
            log_m: Arc::new(m),
            closed: None,
            label: String::new(),
        })
    }

    fn attach(mut self, c: ClosedForm) -> Result<SeqData> {
        for (p, &v) in self.log_m.iter().enumerate() {
            let e = (c.log_m)(p as f64);
            if (e - v).abs() > 1e-9 * v.abs().max(1.0) {
                return Err(Error::Construction(format!(
                    "evaluator disagrees with table at p={p}: {e} vs {v}"
                )));
            }
        }
        if let Some(f) = &c.log_big_m {
            for (p, &v) in self.log_big_m.iter().enumerate() {
                let e = f(p as f64);
                if (e - v).abs() > 1e-9 * v.abs().max(1.0) {
                    return Err(Error::Construction(format!(
                        "log M evaluator disagrees with table at p={p}: {e} vs {v}"
                    )));
                }
            }
        }
        self.closed = Some(c);
        Ok(self)
    }

    fn n_m(&self) -> usize {
        self.log_m.len()
    }

    fn log_m_at(&self, p: f64) -> f64 {
        let p = p.max(0.0);
        if p < self.n_m() as f64 {
            let i = p.floor() as usize;
            if let Some(c) = &self.closed {
                if c.smooth && p != p.floor() {
                    return (c.log_m)(p);
                }
            }
            return self.log_m[i];
        }
        match &self.closed {
            Some(c) if p <= c.x_max => (c.log_m)(p),
            _ => f64::NAN,
        }
    }

    fn x_max(&self) -> f64 {
        match &self.closed {
            Some(c) => c.x_max.max(self.n_m() as f64),
            None => self.n_m() as f64,
        }
    }
}

/// `M = (M_p)` with `M_0 = 1`, stored as `ln M_p` for `0 ≤ p ≤ P_max`.
#[derive(Clone)]
pub struct WeightSequence {
    data: SeqData,
}

/// `m_p = M_{p+1}/M_p`, stored as `ln m_p` for `0 ≤ p < P_max`. Also used for
/// plain positive sequences.
#[derive(Clone)]
pub struct QuotientSequence {
    data: SeqData,
}

impl std::fmt::Debug for WeightSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "WeightSequence({}, P={})", self.data.label, self.horizon())
    }
}

impl std::fmt::Debug for QuotientSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "QuotientSequence({}, P={})", self.data.label, self.horizon())
    }
}

impl WeightSequence {
    /// From `ln M_0, …, ln M_P`.
    pub fn from_log_big_m(v: Vec<f64>) -> Result<Self> {
        Ok(WeightSequence {
            data: SeqData::from_big_m(v)?,
        })
    }

    /// Tabulates `p ↦ ln m_p` for `p < horizon` and keeps the closed form.
    pub fn from_closed(horizon: usize, closed: ClosedForm) -> Result<Self> {
        let m: Vec<f64> = (0..horizon).map(|p| (closed.log_m)(p as f64)).collect();
        let data = SeqData::from_m(m)?.attach(closed)?;
        Ok(WeightSequence { data })
    }

    pub fn with_closed(self, c: ClosedForm) -> Result<Self> {
        Ok(WeightSequence {
            data: self.data.attach(c)?,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.data.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.data.label
    }

    /// Largest tabulated index `P_max`.
    pub fn horizon(&self) -> usize {
        self.data.n_m()
    }

    pub fn log_big_m(&self, p: usize) -> f64 {
        self.data.log_big_m[p]
    }

    pub fn log_big_m_table(&self) -> &[f64] {
        &self.data.log_big_m
    }

    pub fn log_m_table(&self) -> &[f64] {
        &self.data.log_m
    }

    pub fn closed(&self) -> Option<&ClosedForm> {
        self.data.closed.as_ref()
    }

    /// `ln m` at an index, using the evaluator beyond the table; NaN past it.
    pub fn log_m_at(&self, p: f64) -> f64 {
        self.data.log_m_at(p)
    }

    /// Largest index the sequence can be evaluated at.
    pub fn x_max(&self) -> f64 {
        self.data.x_max()
    }

    pub fn quotients(&self) -> QuotientSequence {
        QuotientSequence {
            data: self.data.clone(),
        }
    }

    pub fn from_quotients(m: &QuotientSequence) -> WeightSequence {
        WeightSequence {
            data: m.data.clone(),
        }
    }

    /// `M^s = (M_p^s)`.
    pub fn pow_seq(&self, s: f64) -> Result<WeightSequence> {
        if !(s > 0.0) {
            return Err(Error::Domain(format!("power must be positive, got {s}")));
        }
        let d = &self.data;
        let big: Vec<f64> = d.log_big_m.iter().map(|x| s * x).collect();
        let m: Vec<f64> = d.log_m.iter().map(|x| s * x).collect();
        let closed = d.closed.as_ref().map(|c| {
            let f = c.log_m.clone();
            let g = c.log_big_m.clone();
            ClosedForm {
                log_m: Arc::new(move |x| s * f(x)),
                log_big_m: g.map(|g| Arc::new(move |x: f64| s * g(x)) as LogFn),
                x_max: c.x_max,
                smooth: c.smooth,
            }
        });
        Ok(WeightSequence {
            data: SeqData {
                log_big_m: Arc::new(big),
                log_m: Arc::new(m),
                closed,
                label: format!("({})^{s}", d.label),
            },
        })
    }

    /// `𝔾_r M = (p!^r M_p)`.
    pub fn gevrey_multiply(&self, r: f64) -> WeightSequence {
        let d = &self.data;
        let big: Vec<f64> = d
            .log_big_m
            .iter()
            .enumerate()
            .map(|(p, x)| r * ln_gamma(p as f64 + 1.0) + x)
            .collect();
        let m: Vec<f64> = d
            .log_m
            .iter()
            .enumerate()
            .map(|(p, x)| r * (p as f64 + 1.0).ln() + x)
            .collect();
        let closed = d.closed.as_ref().map(|c| {
            let f = c.log_m.clone();
            let g = c.log_big_m.clone();
            let smooth = c.smooth;
            ClosedForm {
                log_m: Arc::new(move |x| {
                    let k = if smooth { x } else { x.floor() };
                    r * (k + 1.0).ln() + f(x)
                }),
                log_big_m: g.map(|g| Arc::new(move |x: f64| r * ln_gamma(x + 1.0) + g(x)) as LogFn),
                x_max: c.x_max,
                smooth,
            }
        });
        WeightSequence {
            data: SeqData {
                log_big_m: Arc::new(big),
                log_m: Arc::new(m),
                closed,
                label: format!("G_{r}({})", d.label),
            },
        }
    }

    /// `M̂ = (p! M_p)`.
    pub fn hat(&self) -> WeightSequence {
        self.gevrey_multiply(1.0)
    }

    pub fn check(&self, cond: SeqCondition) -> Result<Verdict> {
        check_condition(self, cond)
    }
}

impl QuotientSequence {
    /// From `ln m_0, …, ln m_{P-1}` (any positive sequence).
    pub fn from_log_m(m: Vec<f64>) -> Result<Self> {
        Ok(QuotientSequence {
            data: SeqData::from_m(m)?,
        })
    }

    pub fn from_closed(horizon: usize, closed: ClosedForm) -> Result<Self> {
        Ok(WeightSequence::from_closed(horizon, closed)?.quotients())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.data.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.data.label
    }

    pub fn horizon(&self) -> usize {
        self.data.n_m()
    }

    pub fn log_m(&self, p: usize) -> f64 {
        self.data.log_m[p]
    }

    pub fn table(&self) -> &[f64] {
        &self.data.log_m
    }

    pub fn closed(&self) -> Option<&ClosedForm> {
        self.data.closed.as_ref()
    }

    pub fn log_m_at(&self, p: f64) -> f64 {
        self.data.log_m_at(p)
    }

    pub fn x_max(&self) -> f64 {
        self.data.x_max()
    }

    pub fn is_nondecreasing(&self) -> bool {
        first_descent(&self.data.log_m).is_none()
    }

    /// `s_m = (m_{p+1})`.
    pub fn shifted(&self) -> QuotientSequence {
        let d = &self.data;
        let m: Vec<f64> = d.log_m[1..].to_vec();
        let mut big = Vec::with_capacity(m.len() + 1);
        let mut acc = 0.0;
        big.push(0.0);
        for &x in &m {
            acc += x;
            big.push(acc);
        }
        let closed = d.closed.as_ref().map(|c| {
            let f = c.log_m.clone();
            ClosedForm {
                log_m: Arc::new(move |x| f(x + 1.0)),
                log_big_m: None,
                x_max: c.x_max - 1.0,
                smooth: c.smooth,
            }
        });
        QuotientSequence {
            data: SeqData {
                log_big_m: Arc::new(big),
                log_m: Arc::new(m),
                closed,
                label: format!("s({})", d.label),
            },
        }
    }

    /// `a^s` at quotient level.
    pub fn pow(&self, s: f64) -> QuotientSequence {
        let d = &self.data;
        let m: Vec<f64> = d.log_m.iter().map(|x| s * x).collect();
        let big: Vec<f64> = d.log_big_m.iter().map(|x| s * x).collect();
        let closed = d.closed.as_ref().map(|c| {
            let f = c.log_m.clone();
            ClosedForm {
                log_m: Arc::new(move |x| s * f(x)),
                log_big_m: None,
                x_max: c.x_max,
                smooth: c.smooth,
            }
        });
        QuotientSequence {
            data: SeqData {
                log_big_m: Arc::new(big),
                log_m: Arc::new(m),
                closed,
                label: format!("({})^{s}", d.label),
            },
        }
    }

    /// Profile of the step embedding: `f(x) = m_{⌊x⌋-1}` for `x ≥ 1` and `m_0`
    /// on `[0, 1]`; with `shifted`, `f(x) = m_{⌊x⌋}`.
    pub fn step_profile(&self, shifted: bool) -> LogProfile {
        let d = self.data.clone();
        let off = if shifted { 0.0 } else { 1.0 };
        let top = d.x_max() + off - 1.0;
        LogProfile::new(0.0, top.max(2.0).ln(), move |u| {
            let x = u.exp();
            if x < 1.0 {
                return d.log_m[0];
            }
            d.log_m_at((x.floor() - off).max(0.0))
        })
    }
}

fn first_descent(v: &[f64]) -> Option<usize> {
    v.windows(2)
        .position(|w| w[1] < w[0] - 1e-12 * w[0].abs().max(1.0))
        .map(|i| i + 1)
}

/// Sequence conditions understood by [`check_condition`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeqCondition {
    Lc,
    Mg,
    Snq,
    Nq,
    GammaR(f64),
}

impl SeqCondition {
    pub fn id(&self) -> String {
        match self {
            SeqCondition::Lc => "lc".into(),
            SeqCondition::Mg => "mg".into(),
            SeqCondition::Snq => "snq".into(),
            SeqCondition::Nq => "nq".into(),
            SeqCondition::GammaR(r) => format!("gamma_r({r})"),
        }
    }
}

/// Trend windows of indices `p` (as integer-valued floats), in `u = ln p`.
pub(crate) fn index_windows(x_top: f64, lo_u: f64) -> Vec<Vec<f64>> {
    let hi = x_top.ln();
    let lo = (hi / 16.0).max(lo_u).max(1e-3);
    geometric_windows(lo, hi, TREND_WINDOWS)
        .into_iter()
        .map(|(a, b)| {
            let mut v: Vec<f64> = (0..PER_WINDOW)
                .map(|i| {
                    let u = a + (b - a) * i as f64 / (PER_WINDOW - 1) as f64;
                    let x = u.exp();
                    if x < 9.0e15 {
                        x.round()
                    } else {
                        x
                    }
                })
                .filter(|&p| p >= 1.0 && p <= x_top)
                .collect();
            v.dedup();
            v
        })
        .collect()
}

/// `ln Σ` over integer indices of `exp(term(q, ln m_q))`, exact on the table
/// and extended by quadrature over the evaluator, with a local-power
/// extrapolation of the remaining tail.
pub(crate) struct SeqSums<'a, T: Fn(f64, f64) -> f64> {
    seq: &'a SeqData,
    term: T,
    /// suffix[p] = ln Σ_{q=p}^{P-1}
    suffix: Vec<f64>,
    /// prefix[p] = ln Σ_{q=0}^{p}
    prefix: Vec<f64>,
}

pub use crate::numeric::Tail;

impl<'a, T: Fn(f64, f64) -> f64> SeqSums<'a, T> {
    fn new(seq: &'a SeqData, term: T) -> Self {
        let n = seq.n_m();
        let terms: Vec<f64> = (0..n).map(|q| term(q as f64, seq.log_m[q])).collect();
        let mut suffix = vec![f64::NEG_INFINITY; n + 1];
        for q in (0..n).rev() {
            suffix[q] = lse(suffix[q + 1], terms[q]);
        }
        let mut prefix = vec![f64::NEG_INFINITY; n];
        let mut acc = f64::NEG_INFINITY;
        for q in 0..n {
            acc = lse(acc, terms[q]);
            prefix[q] = acc;
        }
        SeqSums {
            seq,
            term,
            suffix,
            prefix,
        }
    }

    fn smooth(&self) -> bool {
        self.seq.closed.as_ref().map(|c| c.smooth).unwrap_or(false)
    }

    /// Integrand in `w = ln x` for the continuous extension.
    fn phi(&self, w: f64) -> f64 {
        let x = w.exp().min(self.seq.x_max());
        let q = if self.smooth() { x } else { x.floor() };
        (self.term)(q, self.seq.log_m_at(q)) + w
    }

    /// `ln ∫_a^b` of the extension (indices as reals), `a ≥ P`-ish.
    fn ext(&self, a: f64, b: f64) -> f64 {
        if !(b > a) {
            return f64::NEG_INFINITY;
        }
        crate::numeric::log_integral(|w| self.phi(w), a.ln(), b.ln(), 1e-9)
    }

    /// Extrapolated `ln ∫_{x_max}^∞`.
    fn beyond(&self) -> Tail {
        crate::numeric::extrapolate_tail(|w| self.phi(w), self.seq.x_max().ln())
    }

    /// `ln Σ_{q ≥ p} term(q)`, including the extrapolated tail.
    fn tail(&self, p: f64) -> (f64, Tail) {
        let n = self.seq.n_m() as f64;
        let xm = self.seq.x_max();
        let beyond = if self.seq.closed.is_some() {
            self.beyond()
        } else {
            // no evaluator: the table is all there is
            Tail {
                log_value: f64::NEG_INFINITY,
                kappa: f64::NAN,
            }
        };
        let start_ext = if self.smooth() { n - 0.5 } else { n };
        let body = if p < n {
            let tab = self.suffix[p as usize];
            if self.seq.closed.is_some() {
                lse(tab, self.ext(start_ext, xm))
            } else {
                tab
            }
        } else {
            let a = if self.smooth() { p - 0.5 } else { p };
            self.ext(a, xm)
        };
        (lse(body, beyond.log_value), beyond)
    }

    /// `ln Σ_{q ≤ p} term(q)`.
    fn head(&self, p: f64) -> f64 {
        let n = self.seq.n_m();
        if p < n as f64 {
            return self.prefix[p as usize];
        }
        let tab = self.prefix[n - 1];
        if self.smooth() {
            lse(tab, self.ext(n as f64 - 0.5, p + 0.5))
        } else {
            lse(tab, self.ext(n as f64, p + 1.0))
        }
    }
}

/// Per-window maxima of `stat(p)` with the arg-max of the last window.
fn window_max(windows: &[Vec<f64>], stat: impl Fn(f64) -> f64) -> (Vec<f64>, Vec<f64>) {
    let mut maxes = Vec::new();
    let mut args = Vec::new();
    for w in windows {
        let mut best = f64::NEG_INFINITY;
        let mut arg = f64::NAN;
        for &p in w {
            let v = stat(p);
            if v.is_nan() {
                continue;
            }
            if v > best {
                best = v;
                arg = p;
            }
        }
        maxes.push(best);
        args.push(arg);
    }
    (maxes, args)
}

/// Checks (lc), (mg), (snq), (nq) or (γ_r) with a three-valued verdict.
pub fn check_condition(m: &WeightSequence, cond: SeqCondition) -> Result<Verdict> {
    let d = &m.data;
    let id = cond.id();
    match cond {
        SeqCondition::Lc => {
            let v = match first_descent(&d.log_m) {
                Some(p) => Verdict::new(
                    id,
                    Status::Fails,
                    json!({"p": p, "log_m_prev": num(d.log_m[p - 1]), "log_m_p": num(d.log_m[p])}),
                ),
                None => Verdict::new(id, Status::Holds, json!({"checked_up_to": d.n_m()})),
            };
            Ok(v)
        }
        SeqCondition::Mg => Ok(check_mg(d)),
        SeqCondition::Snq => {
            if d.n_m() < 64 {
                return Ok(short(id));
            }
            let sums = SeqSums::new(d, |q, g| -(q + 1.0).ln() - g);
            let windows = index_windows(d.x_max(), 0.0);
            let (maxes, args) = window_max(&windows, |p| sums.tail(p).0 + d.log_m_at(p));
            let status = bounded_trend(&maxes);
            Ok(Verdict::new(
                id,
                status,
                json!({"log_B_per_window": nums(&maxes), "p": nums(&args), "B": num(maxes.last().copied().unwrap_or(f64::NAN).exp())}),
            ))
        }
        SeqCondition::Nq => {
            if d.n_m() < 64 {
                return Ok(short(id));
            }
            let sums = SeqSums::new(d, |q, g| -(q + 1.0).ln() - g);
            let (total, tail) = sums.tail(0.0);
            let status = if d.closed.is_none() {
                // table only: judge the partial sums over the windows
                let windows = index_windows(d.x_max(), 0.0);
                let parts: Vec<f64> = windows
                    .iter()
                    .filter_map(|w| w.last().copied())
                    .map(|p| sums.head(p - 1.0))
                    .collect();
                bounded_trend(&parts)
            } else if !total.is_finite() {
                Status::Fails
            } else if tail.kappa > 1.1 {
                Status::Holds
            } else {
                Status::Inconclusive
            };
            Ok(Verdict::new(
                id,
                status,
                json!({"log_sum": num(total), "tail_exponent": num(tail.kappa)}),
            ))
        }
        SeqCondition::GammaR(r) => {
            if !(r > 0.0) {
                return Err(Error::Domain(format!("gamma_r needs r > 0, got {r}")));
            }
            if d.n_m() < 64 {
                return Ok(short(id));
            }
            let sums = SeqSums::new(d, move |_, g| -g / r);
            let windows = index_windows(d.x_max(), 0.0);
            let (maxes, args) = window_max(&windows, |p| {
                sums.tail(p).0 - (p + 1.0).ln() + d.log_m_at(p) / r
            });
            Ok(Verdict::new(
                id,
                bounded_trend(&maxes),
                json!({"log_C_per_window": nums(&maxes), "p": nums(&args)}),
            ))
        }
    }
}

fn short(id: String) -> Verdict {
    Verdict::new(
        id,
        Status::Inconclusive,
        json!({"reason": "horizon below 64"}),
    )
}

fn check_mg(d: &SeqData) -> Verdict {
    // iii.c: sup m_{2p}/m_p, the deciding criterion
    let top = (d.x_max() / 2.0).floor();
    let windows = index_windows(top.max(2.0), 0.0);
    let (c_max, c_arg) = window_max(&windows, |p| d.log_m_at(2.0 * p) - d.log_m_at(p));
    let c_status = bounded_trend(&c_max);

    // iii.a: M_{p+q} ≤ A^{p+q} M_p M_q on the table
    let big = &d.log_big_m;
    let n = big.len() - 1;
    let tab_windows = index_windows(n as f64, 0.0);
    let mut a_max = Vec::new();
    for w in &tab_windows {
        let mut best = f64::NEG_INFINITY;
        for &s in w {
            let s = s as usize;
            if s < 2 || s > n {
                continue;
            }
            for p in 1..=s / 2 {
                let q = s - p;
                let v = (big[s] - big[p] - big[q]) / s as f64;
                best = best.max(v);
            }
        }
        a_max.push(best);
    }
    let a_status = bounded_trend(&a_max);

    // iii.b: sup m_p / M_p^{1/p}
    let (b_max, _) = window_max(&tab_windows, |p| {
        let i = p as usize;
        if i < 1 || i >= d.n_m() {
            f64::NAN
        } else {
            d.log_m[i] - big[i] / p
        }
    });
    let b_status = bounded_trend(&b_max);

    let witness = json!({
        "log_ratio_2p_per_window": nums(&c_max),
        "p": nums(&c_arg),
        "A_log_per_window": nums(&a_max),
        "criterion_a": a_status.as_str(),
        "criterion_b": b_status.as_str(),
        "criterion_c": c_status.as_str(),
    });
    Verdict::new("mg", c_status, witness)
}

/// Kind of equivalence tested by [`relation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationKind {
    /// `C^{-p} L_p ≤ M_p ≤ C^p L_p`
    Approx,
    /// `c^{-1} ℓ_p ≤ m_p ≤ c ℓ_p`
    Simeq,
}

/// Decides `M ≈ L` or `m ≃ ℓ` on the common horizon.
pub fn relation(m: &WeightSequence, l: &WeightSequence, kind: RelationKind) -> Result<Verdict> {
    let n = m.horizon().min(l.horizon());
    if n < 16 {
        return Err(Error::Domain("common horizon below 16".into()));
    }
    let gap: Box<dyn Fn(usize) -> f64> = match kind {
        RelationKind::Approx => Box::new(|p: usize| {
            (m.log_big_m(p) - l.log_big_m(p)).abs() / (p.max(1) as f64)
        }),
        RelationKind::Simeq => {
            Box::new(|p: usize| (m.data.log_m[p] - l.data.log_m[p]).abs())
        }
    };
    let top = match kind {
        RelationKind::Approx => n,
        RelationKind::Simeq => n - 1,
    };
    let all = (0..=top).map(&gap).fold(0.0, f64::max);
    let windows = index_windows(top as f64, 0.0);
    let (maxes, args) = window_max(&windows, |p| gap(p as usize));
    let status = bounded_trend(&maxes);
    let (id, key) = match kind {
        RelationKind::Approx => ("approx_equiv", "C"),
        RelationKind::Simeq => ("simeq_equiv", "c"),
    };
    Ok(Verdict::new(
        id,
        status,
        json!({key: num(all.exp()), "gap_per_window": nums(&maxes), "p": nums(&args)}),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial_power(a: f64, n: usize) -> WeightSequence {
        WeightSequence::from_closed(
            n,
            ClosedForm::new(1e200, true, move |x| a * (x + 1.0).ln())
                .with_log_big_m(move |x| a * ln_gamma(x + 1.0)),
        )
        .unwrap()
    }

    #[test]
    fn quotients_of_factorial() {
        let m = factorial_power(1.0, 64).quotients();
        for p in 0..64 {
            assert!((m.log_m(p) - (p as f64 + 1.0).ln()).abs() < 1e-12);
        }
        let m2 = factorial_power(2.0, 64).quotients();
        assert!((m2.log_m(9) - 2.0 * 10f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn from_quotients_sums() {
        let m = QuotientSequence::from_log_m((0..32).map(|p| 2.0 * (p as f64 + 1.0).ln()).collect())
            .unwrap();
        let big = WeightSequence::from_quotients(&m);
        // direct summation oracle: 2·(ln1+ln2+ln3+ln4+ln5)
        let oracle: f64 = (1..=5).map(|k| 2.0 * (k as f64).ln()).sum();
        assert!((big.log_big_m(5) - oracle).abs() < 1e-12);
        assert!((big.log_big_m(5) - 9.574_983_485_564_092).abs() < 1e-9);
        let ones = QuotientSequence::from_log_m(vec![0.0; 20]).unwrap();
        let one = WeightSequence::from_quotients(&ones);
        assert!(one.log_big_m_table().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn round_trips_are_bitwise() {
        let big: Vec<f64> = (0..40).map(|p| ln_gamma(p as f64 + 1.0) * 1.3).collect();
        let mut big = big;
        big[0] = 0.0;
        let m = WeightSequence::from_log_big_m(big.clone()).unwrap();
        let back = WeightSequence::from_quotients(&m.quotients());
        assert_eq!(back.log_big_m_table(), &big[..]);
        let q = QuotientSequence::from_log_m((0..30).map(|p| (p as f64).sqrt()).collect()).unwrap();
        let q2 = WeightSequence::from_quotients(&q).quotients();
        assert_eq!(q.table(), q2.table());
    }

    #[test]
    fn pow_and_gevrey() {
        let g1 = factorial_power(1.0, 64);
        let g2 = g1.pow_seq(2.0).unwrap();
        assert!((g2.log_big_m(7) - 2.0 * ln_gamma(8.0)).abs() < 1e-9);
        assert!(g1.pow_seq(0.0).is_err());
        let ones = WeightSequence::from_log_big_m(vec![0.0; 20]).unwrap();
        let fact = ones.gevrey_multiply(1.0);
        assert!((fact.log_big_m(6) - 720f64.ln()).abs() < 1e-12);
        let same = g1.gevrey_multiply(0.0);
        assert_eq!(same.log_m_table(), g1.log_m_table());
    }

    #[test]
    fn evaluator_must_agree() {
        let bad = WeightSequence::from_closed(32, ClosedForm::new(1e9, true, |x| x)).unwrap();
        let r = WeightSequence::from_log_big_m(bad.log_big_m_table().to_vec())
            .unwrap()
            .with_closed(ClosedForm::new(1e9, true, |x| x + 1e-3));
        assert!(r.is_err());
    }

    #[test]
    fn gevrey_square_is_strongly_regular() {
        let m = factorial_power(2.0, 4096);
        assert!(m.check(SeqCondition::Lc).unwrap().holds());
        assert!(m.check(SeqCondition::Mg).unwrap().holds());
        assert!(m.check(SeqCondition::Snq).unwrap().holds());
        assert!(m.check(SeqCondition::Nq).unwrap().holds());
        assert!(m.check(SeqCondition::GammaR(1.0)).unwrap().holds());
        assert!(m.check(SeqCondition::GammaR(-1.0)).is_err());
    }

    #[test]
    fn lc_failure_names_index() {
        let mut v: Vec<f64> = (0..20).map(|p| p as f64).collect();
        v[7] = 0.5;
        let q = QuotientSequence::from_log_m(v).unwrap();
        let w = WeightSequence::from_quotients(&q);
        let r = w.check(SeqCondition::Lc).unwrap();
        assert!(r.fails());
        assert_eq!(r.witness["p"], json!(7));
    }

    #[test]
    fn relations() {
        let a = factorial_power(1.0, 256);
        let same = relation(&a, &a, RelationKind::Approx).unwrap();
        assert!(same.holds());
        assert_eq!(same.witness["C"], json!(1.0));
        let twice = WeightSequence::from_quotients(
            &QuotientSequence::from_log_m(a.log_m_table().iter().map(|x| x + 2f64.ln()).collect())
                .unwrap(),
        );
        assert!(relation(&a, &twice, RelationKind::Simeq).unwrap().holds());
        assert!(relation(&a, &twice, RelationKind::Approx).unwrap().holds());
        let far = WeightSequence::from_log_big_m(
            (0..=256)
                .map(|p| if p == 0 { 0.0 } else { ln_gamma(p as f64 + 1.0) + (p * p) as f64 * 2f64.ln() })
                .collect(),
        )
        .unwrap();
        assert!(relation(&a, &far, RelationKind::Approx).unwrap().fails());
    }
}
