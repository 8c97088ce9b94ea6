//! Example and counter-example families: Gevrey-type sequences, `q^{p²}`,
//! power/log weight functions, sequences from the representation formula,
//! the four-index construction, the doubly exponential block sequence and
//! proximate orders.

use std::collections::BTreeMap;
use std::sync::Arc;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::fn_model::{WeightFunction, DEFAULT_X_MAX};
use crate::seq_model::{ClosedForm, QuotientSequence, WeightSequence};

/// `ln X_max` for smooth closed forms (`X_max ≈ 1e200`).
pub const SMOOTH_LN_CEILING: f64 = 460.0;
pub const DEFAULT_PMAX: usize = 4096;
pub const COUNTEREXAMPLE_PMAX: usize = 1 << 15;
/// Ceiling of the block evaluator (`2^500`); block `j = 8` is the last one
/// that starts below it.
pub const COUNTEREXAMPLE_X_MAX: f64 = 3.273_390_607_896_142e150;

fn smooth_x_max() -> f64 {
    SMOOTH_LN_CEILING.exp()
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    GevreySeq { alpha: f64 },
    MAlphaBeta { alpha: f64, beta: f64 },
    M0Beta { beta: f64 },
    Mq { q: f64 },
    GevreyFn { s: f64 },
    LinlogFn { alpha: f64 },
    LogpowFn { s: f64 },
    /// Constant `d_p ≡ d`, `ξ_p ≡ xi`.
    OrvRep { d: f64, xi: f64 },
    FourIndex { beta: f64, mu: f64, rho: f64, alpha: f64 },
    Counterexample,
    Proximate { rho: f64, b: f64 },
}

pub enum Family {
    Seq(WeightSequence),
    Fn(WeightFunction),
}

impl FamilySpec {
    /// Parses `name` or `name:key=value,key=value`.
    pub fn parse(s: &str) -> Result<FamilySpec> {
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n.trim(), r.trim()),
            None => (s.trim(), ""),
        };
        let mut kv = BTreeMap::new();
        for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Input(format!("expected key=value in family spec, got '{part}'")))?;
            let v: f64 = eval_number(v.trim())
                .ok_or_else(|| Error::Input(format!("bad number '{}' for '{}'", v.trim(), k.trim())))?;
            kv.insert(k.trim().to_string(), v);
        }
        let get = |k: &str| -> Result<f64> {
            kv.get(k)
                .copied()
                .ok_or_else(|| Error::Input(format!("family '{name}' needs parameter '{k}'")))
        };
        let get_or = |k: &str, d: f64| kv.get(k).copied().unwrap_or(d);
        let spec = match name {
            "gevrey" | "gevrey_seq" => FamilySpec::GevreySeq { alpha: get("alpha")? },
            "m_alpha_beta" => FamilySpec::MAlphaBeta {
                alpha: get("alpha")?,
                beta: get("beta")?,
            },
            "m0_beta" => FamilySpec::M0Beta { beta: get("beta")? },
            "mq" => FamilySpec::Mq { q: get("q")? },
            "gevrey_fn" => FamilySpec::GevreyFn { s: get("s")? },
            "linlog" | "linlog_fn" => FamilySpec::LinlogFn { alpha: get("alpha")? },
            "logpow" | "logpow_fn" => FamilySpec::LogpowFn { s: get("s")? },
            "orv_rep" => FamilySpec::OrvRep {
                d: get_or("d", 0.0),
                xi: get_or("xi", 1.0),
            },
            "four_index" => FamilySpec::FourIndex {
                beta: get("beta")?,
                mu: get("mu")?,
                rho: get("rho")?,
                alpha: get("alpha")?,
            },
            "counterexample" => FamilySpec::Counterexample,
            "proximate" => FamilySpec::Proximate {
                rho: get("rho")?,
                b: get_or("b", 0.0),
            },
            _ => return Err(Error::Input(format!("unknown family '{name}'"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Domain(m.to_string()));
        match *self {
            FamilySpec::GevreySeq { alpha } if !(alpha > 0.0) => bad("gevrey needs alpha > 0"),
            FamilySpec::MAlphaBeta { alpha, beta } if !(alpha > 0.0) || !beta.is_finite() => {
                bad("m_alpha_beta needs alpha > 0 and finite beta")
            }
            FamilySpec::M0Beta { beta } if !(beta > 0.0) => bad("m0_beta needs beta > 0"),
            FamilySpec::Mq { q } if !(q > 1.0) => bad("mq needs q > 1"),
            FamilySpec::GevreyFn { s } if !(s > 0.0 && s <= 1.0) => bad("gevrey_fn needs 0 < s <= 1"),
            FamilySpec::LinlogFn { alpha } if !alpha.is_finite() => bad("linlog needs finite alpha"),
            FamilySpec::LogpowFn { s } if !(s > 1.0) => bad("logpow needs s > 1"),
            FamilySpec::OrvRep { d, xi } if !d.is_finite() || !xi.is_finite() => bad("orv_rep needs finite d, xi"),
            FamilySpec::FourIndex { beta, mu, rho, alpha } if !(0.0 < beta && beta < mu && mu < rho && rho < alpha && alpha.is_finite()) => {
                bad("four_index needs 0 < beta < mu < rho < alpha < inf")
            }
            FamilySpec::Proximate { rho, b } if !(rho >= 0.0) || !b.is_finite() => bad("proximate needs rho >= 0"),
            _ => Ok(()),
        }
    }

    pub fn is_sequence(&self) -> bool {
        !matches!(
            self,
            FamilySpec::GevreyFn { .. } | FamilySpec::LinlogFn { .. } | FamilySpec::LogpowFn { .. } | FamilySpec::Proximate { .. }
        )
    }

    /// Canonical spelling, e.g. `gevrey:alpha=2`.
    pub fn id(&self) -> String {
        match *self {
            FamilySpec::GevreySeq { alpha } => format!("gevrey:alpha={alpha}"),
            FamilySpec::MAlphaBeta { alpha, beta } => format!("m_alpha_beta:alpha={alpha},beta={beta}"),
            FamilySpec::M0Beta { beta } => format!("m0_beta:beta={beta}"),
            FamilySpec::Mq { q } => format!("mq:q={q}"),
            FamilySpec::GevreyFn { s } => format!("gevrey_fn:s={s}"),
            FamilySpec::LinlogFn { alpha } => format!("linlog:alpha={alpha}"),
            FamilySpec::LogpowFn { s } => format!("logpow:s={s}"),
            FamilySpec::OrvRep { d, xi } => format!("orv_rep:d={d},xi={xi}"),
            FamilySpec::FourIndex { beta, mu, rho, alpha } => {
                format!("four_index:beta={beta},mu={mu},rho={rho},alpha={alpha}")
            }
            FamilySpec::Counterexample => "counterexample".into(),
            FamilySpec::Proximate { rho, b } => format!("proximate:rho={rho},b={b}"),
        }
    }
}

/// Accepts decimals and simple fractions such as `1/2`.
fn eval_number(s: &str) -> Option<f64> {
    if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a.trim().parse().ok()?;
        let b: f64 = b.trim().parse().ok()?;
        return Some(a / b);
    }
    s.parse().ok()
}

/// Builds a family; `pmax` is the tabulation horizon for sequences.
pub fn make(spec: &FamilySpec, pmax: Option<usize>) -> Result<Family> {
    spec.validate()?;
    let p = pmax.unwrap_or(match spec {
        FamilySpec::Counterexample => COUNTEREXAMPLE_PMAX,
        _ => DEFAULT_PMAX,
    });
    let label = spec.id();
    Ok(match *spec {
        FamilySpec::GevreySeq { alpha } => Family::Seq(gevrey_seq(alpha, p)?),
        FamilySpec::MAlphaBeta { alpha, beta } => Family::Seq(m_alpha_beta(alpha, beta, p)?),
        FamilySpec::M0Beta { beta } => Family::Seq(m_alpha_beta(0.0, beta, p)?.with_label(label)),
        FamilySpec::Mq { q } => Family::Seq(mq(q, p)?),
        FamilySpec::GevreyFn { s } => Family::Fn(gevrey_fn(s)?),
        FamilySpec::LinlogFn { alpha } => Family::Fn(linlog_fn(alpha)?),
        FamilySpec::LogpowFn { s } => Family::Fn(logpow_fn(s)?),
        FamilySpec::OrvRep { d, xi } => {
            let q = orv_from_representation(&vec![d; p + 1], &vec![xi; p + 1], p)?;
            Family::Seq(WeightSequence::from_quotients(&q).with_label(label))
        }
        FamilySpec::FourIndex { beta, mu, rho, alpha } => Family::Seq(four_index_sequence(beta, mu, rho, alpha, p)?),
        FamilySpec::Counterexample => Family::Seq(counterexample_sequence(p)?),
        FamilySpec::Proximate { rho, b } => Family::Fn(proximate_family(rho, b)?.1),
    })
}

/// `M_p = p!^α`.
pub fn gevrey_seq(alpha: f64, pmax: usize) -> Result<WeightSequence> {
    let c = ClosedForm::new(smooth_x_max(), true, move |x| alpha * (x + 1.0).ln())
        .with_log_big_m(move |x| alpha * ln_gamma(x + 1.0));
    Ok(WeightSequence::from_closed(pmax, c)?.with_label(format!("gevrey:alpha={alpha}")))
}

/// `M_p = p!^α ∏_{m=0}^{p} log^β(e+m)`. For `β < 0` the leading quotients
/// are raised to the minimum of `m`, which restores (lc).
pub fn m_alpha_beta(alpha: f64, beta: f64, pmax: usize) -> Result<WeightSequence> {
    let raw = move |x: f64| alpha * (x + 1.0).ln() + beta * (std::f64::consts::E + x + 1.0).ln().ln();
    // raw is decreasing then increasing; its minimizer on [0, ∞)
    let x_star = if beta < 0.0 {
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        let d = |x: f64| raw(x + 1e-6) - raw(x);
        while d(hi) < 0.0 && hi < 1e300 {
            hi *= 2.0;
        }
        if d(0.0) >= 0.0 {
            0.0
        } else {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if d(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            hi
        }
    } else {
        0.0
    };
    let floor_val = raw(x_star);
    let f = move |x: f64| if x < x_star { floor_val } else { raw(x) };
    let label = if x_star > 0.0 {
        format!("m_alpha_beta:alpha={alpha},beta={beta} (quotients below p={x_star:.3} raised to {floor_val:.6})")
    } else if alpha == 0.0 {
        format!("m0_beta:beta={beta}")
    } else {
        format!("m_alpha_beta:alpha={alpha},beta={beta}")
    };
    let c = ClosedForm::new(smooth_x_max(), true, f);
    Ok(WeightSequence::from_closed(pmax, c)?.with_label(label))
}

pub fn m0_beta(beta: f64, pmax: usize) -> Result<WeightSequence> {
    FamilySpec::M0Beta { beta }.validate()?;
    m_alpha_beta(0.0, beta, pmax)
}

/// `M_p = q^{p²}`.
pub fn mq(q: f64, pmax: usize) -> Result<WeightSequence> {
    let lq = q.ln();
    let c = ClosedForm::new(DEFAULT_X_MAX, true, move |x| (2.0 * x + 1.0) * lq).with_log_big_m(move |x| x * x * lq);
    Ok(WeightSequence::from_closed(pmax, c)?.with_label(format!("mq:q={q}")))
}

/// `σ(t) = t^s`.
pub fn gevrey_fn(s: f64) -> Result<WeightFunction> {
    WeightFunction::from_log(
        format!("gevrey_fn:s={s}"),
        0.0,
        SMOOTH_LN_CEILING,
        move |u| s * u,
        Some(Arc::new(move |t: f64| t.powf(s))),
    )
}

/// `σ(t) = t / log(e+t)^α`.
pub fn linlog_fn(alpha: f64) -> Result<WeightFunction> {
    WeightFunction::from_log(
        format!("linlog:alpha={alpha}"),
        0.0,
        SMOOTH_LN_CEILING,
        move |u| u - alpha * ln_log_e_plus(u),
        Some(Arc::new(move |t: f64| t / (std::f64::consts::E + t).ln().powf(alpha))),
    )
}

/// `ln ln(e + e^u)`, accurate for large `u`.
fn ln_log_e_plus(u: f64) -> f64 {
    let l = if u > 1.0 {
        u + (1.0 - u).exp().ln_1p()
    } else {
        (std::f64::consts::E + u.exp()).ln()
    };
    l.ln()
}

/// `σ(t) = max{0, log t}^s`.
pub fn logpow_fn(s: f64) -> Result<WeightFunction> {
    WeightFunction::from_log(
        format!("logpow:s={s}"),
        std::f64::consts::E,
        SMOOTH_LN_CEILING,
        move |u| if u > 0.0 { s * u.ln() } else { f64::NEG_INFINITY },
        Some(Arc::new(move |t: f64| if t > 1.0 { t.ln().powf(s) } else { 0.0 })),
    )
}

/// `a_p = exp(d_p + Σ_{j=1}^p ξ_j / j)` for `0 ≤ p < pmax`.
pub fn orv_from_representation(d: &[f64], xi: &[f64], pmax: usize) -> Result<QuotientSequence> {
    if d.len() < pmax || xi.len() < pmax {
        return Err(Error::Input(format!(
            "representation needs {pmax} entries of d and xi, got {} and {}",
            d.len(),
            xi.len()
        )));
    }
    if let Some(i) = d[..pmax].iter().chain(&xi[..pmax]).position(|v| !v.is_finite()) {
        return Err(Error::Input(format!("representation entry {i} is not finite")));
    }
    let mut out = Vec::with_capacity(pmax);
    let mut h = 0.0;
    for p in 0..pmax {
        if p >= 1 {
            h += xi[p] / p as f64;
        }
        out.push(d[p] + h);
    }
    Ok(QuotientSequence::from_log_m(out)?.with_label("orv_rep"))
}

/// Block profile `v ↦ ln ω(e^v) = ∫_0^v ξ` of the four-index construction.
#[derive(Debug, Clone, Copy)]
pub struct FourIndex {
    pub beta: f64,
    pub mu: f64,
    pub rho: f64,
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
}

impl FourIndex {
    pub fn new(beta: f64, mu: f64, rho: f64, alpha: f64) -> Result<FourIndex> {
        FamilySpec::FourIndex { beta, mu, rho, alpha }.validate()?;
        let b = (alpha - mu) / (alpha - rho);
        let a = b * (rho - beta) / (mu - beta);
        if !(a > b && b > 1.0) {
            return Err(Error::Domain(format!("four_index needs a > b > 1, got a={a}, b={b}")));
        }
        Ok(FourIndex { beta, mu, rho, alpha, a, b })
    }

    /// `ξ(e^v)`.
    pub fn xi(&self, v: f64) -> f64 {
        let ln2 = std::f64::consts::LN_2;
        if v < ln2 {
            return self.mu;
        }
        let n = self.block(v);
        if v < self.b * self.a.powi(n) * ln2 {
            self.alpha
        } else {
            self.beta
        }
    }

    fn block(&self, v: f64) -> i32 {
        let ln2 = std::f64::consts::LN_2;
        let mut n = ((v / ln2).ln() / self.a.ln()).floor() as i32;
        while n > 0 && self.a.powi(n) * ln2 > v {
            n -= 1;
        }
        while self.a.powi(n + 1) * ln2 <= v {
            n += 1;
        }
        n
    }

    /// `ln ω(e^v)`.
    pub fn log_omega(&self, v: f64) -> f64 {
        let ln2 = std::f64::consts::LN_2;
        if v < ln2 {
            return self.mu * v;
        }
        let (a, b) = (self.a, self.b);
        let n = self.block(v);
        let an = a.powi(n);
        let per = self.alpha * (b - 1.0) + self.beta * (a - b);
        let start = ln2 * (self.mu + per * (an - 1.0) / (a - 1.0));
        let v0 = an * ln2;
        let v1 = b * an * ln2;
        if v < v1 {
            start + self.alpha * (v - v0)
        } else {
            start + self.alpha * (v1 - v0) + self.beta * (v - v1)
        }
    }
}

/// `m_p = ω(p)` for `p ≥ 2`, `m_0 = m_1 = ω(2)`.
pub fn four_index_sequence(beta: f64, mu: f64, rho: f64, alpha: f64, pmax: usize) -> Result<WeightSequence> {
    four_index_sequence_to(beta, mu, rho, alpha, pmax, DEFAULT_X_MAX)
}

/// As [`four_index_sequence`], trusted up to `x_max` instead of `10^12`. The
/// blocks grow geometrically in `ln p`, so limit conditions need a high ceiling.
pub fn four_index_sequence_to(beta: f64, mu: f64, rho: f64, alpha: f64, pmax: usize, x_max: f64) -> Result<WeightSequence> {
    let fi = FourIndex::new(beta, mu, rho, alpha)?;
    let c = ClosedForm::new(x_max, true, move |x| fi.log_omega(x.max(2.0).ln()));
    Ok(WeightSequence::from_closed(pmax, c)?.with_label(format!(
        "four_index:beta={beta},mu={mu},rho={rho},alpha={alpha}"
    )))
}

/// Block boundaries of the counter-example: `a_j = 2^{2(2^{j-1}-1)}`,
/// `b_j = 2^{2^j - 1}`, `c_j = 2^{2^{j+1}}` (as `f64`, exact powers of two).
pub fn counterexample_block(j: u32) -> (f64, f64, f64) {
    let a = 2f64.powi(2 * ((1i32 << (j - 1)) - 1));
    let b = 2f64.powi((1i32 << j) - 1);
    let c = 2f64.powi(1i32 << (j + 1));
    (a, b, c)
}

/// `δ_k`: `c_j` on `a_j < k ≤ b_j`, zero elsewhere (including `k = 1`).
pub fn counterexample_delta(k: u64) -> f64 {
    for j in 1..=9 {
        let (a, b, c) = counterexample_block(j);
        if (k as f64) > a && (k as f64) <= b {
            return c;
        }
    }
    0.0
}

/// `ln m_p = Σ_{k=1}^{p} δ_k` for real `p` (through `⌊p⌋`).
pub fn counterexample_log_m(p: f64) -> f64 {
    let p = p.floor();
    let mut s = 0.0;
    for j in 1..=9 {
        let (a, b, c) = counterexample_block(j);
        if p <= a {
            break;
        }
        s += c * (p.min(b) - a);
    }
    s
}

pub fn counterexample_sequence(pmax: usize) -> Result<WeightSequence> {
    let c = ClosedForm::new(COUNTEREXAMPLE_X_MAX, false, counterexample_log_m);
    Ok(WeightSequence::from_closed(pmax, c)?.with_label("counterexample"))
}

/// `L_p = ln(m_p) / p` for `1 ≤ p ≤ P` (index 0 holds NaN).
pub fn counterexample_l(m: &WeightSequence) -> Vec<f64> {
    m.log_m_table()
        .iter()
        .enumerate()
        .map(|(p, &v)| if p == 0 { f64::NAN } else { v / p as f64 })
        .collect()
}

/// Proximate order `ϱ(t) = ρ + b·ln ln t / ln t` (frozen below `e²`) with its
/// derivative.
#[derive(Debug, Clone, Copy)]
pub struct ProximateOrder {
    pub rho: f64,
    pub b: f64,
}

impl ProximateOrder {
    const T0: f64 = 7.38905609893065;

    pub fn value(&self, t: f64) -> f64 {
        let l = t.max(Self::T0).ln();
        self.rho + self.b * l.ln() / l
    }

    pub fn derivative(&self, t: f64) -> f64 {
        if t < Self::T0 {
            return 0.0;
        }
        let l = t.ln();
        self.b * (1.0 - l.ln()) / (t * l * l)
    }

    pub fn limit(&self) -> f64 {
        self.rho
    }
}

/// `(ϱ, V)` with `V(t) = t^ρ (log t)^b` for `t ≥ e²`.
pub fn proximate_family(rho: f64, b: f64) -> Result<(ProximateOrder, WeightFunction)> {
    FamilySpec::Proximate { rho, b }.validate()?;
    let po = ProximateOrder { rho, b };
    let w = WeightFunction::from_log(
        format!("proximate:rho={rho},b={b}"),
        ProximateOrder::T0,
        SMOOTH_LN_CEILING,
        move |u| {
            let u0 = u.max(2.0);
            rho * u0 + b * u0.ln()
        },
        None,
    )?;
    Ok((po, w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_specs() {
        assert_eq!(FamilySpec::parse("gevrey:alpha=2").unwrap(), FamilySpec::GevreySeq { alpha: 2.0 });
        assert_eq!(
            FamilySpec::parse("four_index:beta=1,mu=2,rho=3,alpha=4").unwrap(),
            FamilySpec::FourIndex { beta: 1.0, mu: 2.0, rho: 3.0, alpha: 4.0 }
        );
        assert_eq!(FamilySpec::parse("counterexample").unwrap(), FamilySpec::Counterexample);
        assert_eq!(FamilySpec::parse("gevrey_fn:s=1/4").unwrap(), FamilySpec::GevreyFn { s: 0.25 });
        assert!(FamilySpec::parse("mq:q=1").is_err());
        assert!(FamilySpec::parse("nope").is_err());
        assert!(FamilySpec::parse("four_index:beta=1,mu=3,rho=2,alpha=4").is_err());
    }

    #[test]
    fn small_values() {
        let g = gevrey_seq(2.0, 64).unwrap();
        assert!((g.log_big_m(4) - 2.0 * 24f64.ln()).abs() < 1e-12);
        let q = mq(2.0, 64).unwrap();
        assert!((q.log_big_m(3) - 9.0 * 2f64.ln()).abs() < 1e-12);
        let mab = m_alpha_beta(1.0, 1.0, 64).unwrap();
        for p in 0..10 {
            let x = p as f64 + 1.0;
            let want = (x * (std::f64::consts::E + x).ln()).ln();
            assert!((mab.log_m_table()[p] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_beta_restores_lc() {
        let m = m_alpha_beta(0.1, -1.0, 256).unwrap();
        assert!(m.quotients().is_nondecreasing());
    }

    #[test]
    fn four_index_blocks() {
        let f = FourIndex::new(1.0, 2.0, 3.0, 4.0).unwrap();
        assert_eq!((f.b, f.a), (2.0, 4.0));
        let ln2 = std::f64::consts::LN_2;
        for n in 0..5 {
            let v = 4f64.powi(n) * ln2;
            assert!((f.log_omega(v) / v - 2.0).abs() < 1e-12);
            assert!((f.log_omega(2.0 * v) / (2.0 * v) - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn counterexample_blocks() {
        assert_eq!(counterexample_block(2), (4.0, 8.0, 256.0));
        assert_eq!(counterexample_block(1).2, 16.0);
        assert_eq!(counterexample_log_m(8.0), 1040.0);
        assert_eq!(counterexample_delta(1), 0.0);
    }

    #[test]
    fn proximate_derivative() {
        let po = ProximateOrder { rho: 0.5, b: 1.0 };
        let t = 10f64.exp();
        let d = t * po.derivative(t) * t.ln();
        assert!((d - (1.0 - 10f64.ln()) / 10.0).abs() < 1e-12);
    }
}
