//! Verification suites over the family matrix. Every suite returns a flat
//! list of `(family, condition, status)` entries plus the definite
//! contradictions among them.

use serde::Serialize;
use serde_json::{json, Value};

use crate::associated::{
    duality_report_with, hat_relation_check, integral_relation_check, table_grid, AssociatedPair,
};
use crate::error::Result;
use crate::fn_model::{check_omega, OmegaCondition, WeightFunction};
use crate::generators::{
    counterexample_block, counterexample_sequence, four_index_sequence_to, gevrey_fn, gevrey_seq, linlog_fn,
    logpow_fn, m0_beta, m_alpha_beta, mq, proximate_family, COUNTEREXAMPLE_PMAX, DEFAULT_PMAX, SMOOTH_LN_CEILING,
};
use crate::indices::{battery, gamma_m, omega_m_index, report, seq_indices, ExtReal, Subject, TheoremId};
use crate::legendre::{
    convex_peetre_check, gamma_shift_check, index_bridge_check, largest_convex_minorant, least_concave_majorant,
    lower_conjugate, peetre_check, upper_conjugate, ShiftDirection,
};
use crate::seq_model::{check_condition, SeqCondition, WeightSequence};
use crate::verdict::{num, Status, Verdict};

pub const SUITES: [&str; 9] = [
    "alpha_fn",
    "beta_fn",
    "alpha_seq",
    "beta_seq",
    "duality",
    "legendre",
    "counterexample",
    "implications",
    "all",
];

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    /// Tabulation horizon; `None` uses each family's default.
    pub pmax: Option<usize>,
    pub tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { pmax: None, tol: 0.05 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub family: String,
    pub condition: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<f64>,
    pub status: Status,
    /// Status the theory predicts, when the suite knows it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<Status>,
    pub witness: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct Contradiction {
    pub family: String,
    pub parameter: Option<f64>,
    pub what: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub entries: Vec<Entry>,
    pub contradictions: Vec<Contradiction>,
    pub holds: usize,
    pub fails: usize,
    pub inconclusive: usize,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport {
            suite: suite.into(),
            entries: vec![],
            contradictions: vec![],
            holds: 0,
            fails: 0,
            inconclusive: 0,
        }
    }

    fn push(&mut self, family: &str, parameter: Option<f64>, v: Verdict, expected: Option<Status>) {
        if let Some(e) = expected {
            if v.status.is_definite() && v.status != e {
                self.contradictions.push(Contradiction {
                    family: family.into(),
                    parameter,
                    what: format!("{} is {} but {} was expected", v.id, v.status.as_str(), e.as_str()),
                });
            }
        }
        match v.status {
            Status::Holds => self.holds += 1,
            Status::Fails => self.fails += 1,
            Status::Inconclusive => self.inconclusive += 1,
        }
        self.entries.push(Entry {
            family: family.into(),
            condition: v.id,
            parameter,
            status: v.status,
            expected,
            witness: v.witness,
        });
    }

    fn error(&mut self, family: &str, what: &str, e: impl std::fmt::Display) {
        self.push(
            family,
            None,
            Verdict::new(what, Status::Inconclusive, json!({"error": e.to_string()})),
            None,
        );
    }

    fn absorb(&mut self, other: SuiteReport) {
        self.entries.extend(other.entries);
        self.contradictions.extend(other.contradictions);
        self.holds += other.holds;
        self.fails += other.fails;
        self.inconclusive += other.inconclusive;
    }

    pub fn ok(&self) -> bool {
        self.contradictions.is_empty()
    }
}

fn pmax_or(cfg: &SuiteConfig, d: usize) -> usize {
    cfg.pmax.unwrap_or(d)
}

pub fn function_matrix() -> Vec<WeightFunction> {
    let mut v = vec![];
    for s in [0.25, 0.5, 1.0] {
        v.push(gevrey_fn(s).unwrap());
    }
    v.push(logpow_fn(2.0).unwrap());
    v.push(linlog_fn(1.0).unwrap());
    v.push(linlog_fn(2.0).unwrap());
    v.push(proximate_family(0.5, 1.0).unwrap().1);
    v
}

/// `(label, sequence)`; `full` adds the slow counterexample.
pub fn sequence_matrix(cfg: &SuiteConfig, full: bool) -> Result<Vec<WeightSequence>> {
    let p = pmax_or(cfg, DEFAULT_PMAX);
    let mut v = vec![
        gevrey_seq(0.5, p)?,
        gevrey_seq(1.0, p)?,
        gevrey_seq(2.0, p)?,
        m_alpha_beta(1.0, 1.0, p)?,
        m0_beta(1.0, p)?,
        mq(2.0, p)?,
        four_index_sequence_to(1.0, 2.0, 3.0, 4.0, p, SMOOTH_LN_CEILING.exp())?,
        four_index_sequence_to(2.0, 2.5, 3.0, 3.5, p, SMOOTH_LN_CEILING.exp())?,
    ];
    if full {
        v.push(counterexample_sequence(pmax_or(cfg, COUNTEREXAMPLE_PMAX))?);
    }
    Ok(v)
}

const FN_PARAMS: [f64; 8] = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0];
const SEQ_PARAMS: [f64; 8] = [0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.5];
/// The block counterexample has indices 0 and ∞; two parameters suffice.
const CEX_PARAMS: [f64; 2] = [0.5, 2.0];

fn battery_entries(rep: &mut SuiteReport, family: &str, subject: Subject<'_>, th: TheoremId, p: f64) {
    match battery(subject, th, p) {
        Ok(b) => {
            let bad = b.contradictions();
            if !bad.is_empty() {
                let ids: Vec<String> = bad.iter().map(|(id, st)| format!("{id}={}", st.as_str())).collect();
                rep.contradictions.push(Contradiction {
                    family: family.into(),
                    parameter: Some(p),
                    what: format!("{} battery disagrees: {}", th.as_str(), ids.join(", ")),
                });
            }
            for c in b.conditions {
                rep.push(family, Some(p), c, None);
            }
        }
        Err(e) => rep.error(family, th.as_str(), e),
    }
}

/// Function batteries at parameters at least 0.25 away from the index.
pub fn fn_battery_suite(th: TheoremId) -> SuiteReport {
    let mut rep = SuiteReport::new(th.as_str());
    for f in function_matrix() {
        let r = report(&f);
        let idx = if th == TheoremId::AlphaFn { r.alpha.0 } else { r.beta.0 };
        for p in FN_PARAMS {
            if (p - idx).abs() >= 0.25 {
                battery_entries(&mut rep, &f.label, Subject::Fn(&f), th, p);
            }
        }
    }
    rep
}

pub fn seq_battery_suite(th: TheoremId, cfg: &SuiteConfig) -> SuiteReport {
    let mut rep = SuiteReport::new(th.as_str());
    let seqs = match sequence_matrix(cfg, true) {
        Ok(s) => s,
        Err(e) => {
            rep.error("matrix", th.as_str(), e);
            return rep;
        }
    };
    for m in seqs {
        let q = m.quotients();
        let r = seq_indices(&q);
        let idx = if th == TheoremId::AlphaSeq { r.alpha.0 } else { r.beta.0 };
        let params: &[f64] = if m.label().starts_with("counterexample") { &CEX_PARAMS } else { &SEQ_PARAMS };
        for &p in params {
            if (p - idx).abs() >= 0.25 {
                battery_entries(&mut rep, m.label(), Subject::Seq(&q), th, p);
            }
        }
    }
    rep
}

/// Reciprocal identities and the integral relation on the lc families.
pub fn duality_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("duality");
    let p = pmax_or(cfg, DEFAULT_PMAX);
    let fams = (|| -> Result<Vec<WeightSequence>> {
        Ok(vec![
            gevrey_seq(0.5, p)?,
            gevrey_seq(1.0, p)?,
            gevrey_seq(2.0, p)?,
            m_alpha_beta(1.0, 1.0, p)?,
            four_index_sequence_to(1.0, 2.0, 3.0, 4.0, p, SMOOTH_LN_CEILING.exp())?,
            four_index_sequence_to(2.0, 2.5, 3.0, 3.5, p, SMOOTH_LN_CEILING.exp())?,
        ])
    })();
    let fams = match fams {
        Ok(f) => f,
        Err(e) => {
            rep.error("matrix", "duality", e);
            return rep;
        }
    };
    for m in fams {
        let label = m.label().to_string();
        match duality_report_with(&m, 2.0 * cfg.tol) {
            Ok(d) => {
                for c in d.checks {
                    rep.push(&label, None, c, Some(Status::Holds));
                }
                rep.push(&label, None, d.srs, Some(Status::Holds));
            }
            Err(e) => rep.error(&label, "duality", e),
        }
        let grid = table_grid(&m, 64);
        rep.push(&label, None, integral_relation_check(&m, &grid), Some(Status::Holds));
    }
    for a in [0.5, 1.0] {
        match gevrey_seq(a, p) {
            Ok(m) => rep.push(m.label(), None, hat_relation_check(&m, cfg.tol), Some(Status::Holds)),
            Err(e) => rep.error("gevrey", "hat_relation", e),
        }
    }
    rep
}

fn oracle(id: &str, worst: f64, n: usize, limit: f64) -> Verdict {
    Verdict::new(
        id,
        if n == 0 { Status::Inconclusive } else { Status::from_bool(worst <= limit) },
        json!({"max_rel_gap": num(worst), "points": n}),
    )
}

fn two_sqrt() -> WeightFunction {
    WeightFunction::from_log(
        "2sqrt",
        0.0,
        SMOOTH_LN_CEILING,
        |u| std::f64::consts::LN_2 + 0.5 * u,
        Some(std::sync::Arc::new(|t: f64| 2.0 * t.sqrt())),
    )
    .expect("2 sqrt(t) is a valid weight")
}

/// Closed-form conjugate pairs, hulls, Peetre checks and the γ-shift.
pub fn legendre_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("legendre");
    let tol = cfg.tol;
    let sq = two_sqrt();
    let h = 3.0 * std::f64::consts::LN_10;
    match upper_conjugate(&sq) {
        Ok(c) => {
            let g = c.graph(h, 121);
            let (mut worst, mut n) = (0.0f64, 0);
            for i in g.trusted() {
                worst = worst.max(crate::numeric::rel_gap(g.y[i], 1.0 / g.x[i], 1e-300));
                n += 1;
            }
            rep.push("2sqrt", None, oracle("upper_conjugate_oracle", worst, n, 1e-6), Some(Status::Holds));
        }
        Err(e) => rep.error("2sqrt", "upper_conjugate_oracle", e),
    }
    let lc = lower_conjugate("1/s", |w| (-w).exp(), -60.0, 60.0);
    let g = lc.graph(h, 121);
    let (mut worst, mut n) = (0.0f64, 0);
    for i in g.trusted() {
        worst = worst.max(crate::numeric::rel_gap(g.y[i], 2.0 * g.x[i].sqrt(), 1e-300));
        n += 1;
    }
    rep.push("1/s", None, oracle("lower_conjugate_oracle", worst, n, 1e-6), Some(Status::Holds));

    match least_concave_majorant(&sq) {
        Ok(m) => rep.push("2sqrt", None, m.verdict(), Some(Status::Holds)),
        Err(e) => rep.error("2sqrt", "concave_majorant", e),
    }
    rep.push(
        "1/s",
        None,
        largest_convex_minorant(|w| (-w).exp(), -20.0, 20.0).verdict(),
        Some(Status::Holds),
    );

    for s in [0.5, 1.0 / 3.0] {
        let f = gevrey_fn(s).expect("power weight");
        for dir in [ShiftDirection::Upper, ShiftDirection::Lower] {
            rep.push(&f.label, None, gamma_shift_check(&f, dir, tol), Some(Status::Holds));
        }
        rep.push(&f.label, None, index_bridge_check(&f, 2.0 * tol), Some(Status::Holds));
    }

    let ll = linlog_fn(1.0).expect("linlog weight");
    rep.push(&ll.label, None, peetre_check(&ll), Some(Status::Holds));
    let t2 = WeightFunction::from_log("t^2", 0.0, SMOOTH_LN_CEILING, |u| 2.0 * u, None).expect("t^2");
    rep.push("t^2", None, peetre_check(&t2), Some(Status::Fails));
    match convex_peetre_check(|w| (-0.5 * w).exp(), -40.0, 40.0, 0.5) {
        Ok(v) => rep.push("s^-1/2", Some(0.5), v, Some(Status::Holds)),
        Err(e) => rep.error("s^-1/2", "convex_peetre", e),
    }
    match convex_peetre_check(|w| (-w).exp().exp(), -12.0, 12.0, 1.0) {
        Ok(v) => rep.push("exp(1/s)", Some(1.0), v, Some(Status::Fails)),
        Err(e) => rep.error("exp(1/s)", "convex_peetre", e),
    }
    rep
}

fn index_verdict(id: &str, ok: bool, w: Value) -> Verdict {
    Verdict::new(id, Status::from_bool(ok), w)
}

/// Index targets of the doubly exponential block sequence.
pub fn counterexample_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("counterexample");
    let tol = cfg.tol;
    let blocks = (counterexample_block(2), counterexample_block(1).2, counterexample_block(2).2);
    let exact = (blocks.0 .0, blocks.0 .1, blocks.1, blocks.2) == (4.0, 8.0, 16.0, 256.0);
    rep.push(
        "counterexample",
        None,
        index_verdict(
            "block_boundaries",
            exact,
            json!({"a2": blocks.0 .0, "b2": blocks.0 .1, "c1": blocks.1, "c2": blocks.2}),
        ),
        Some(Status::Holds),
    );
    let m = match counterexample_sequence(pmax_or(cfg, COUNTEREXAMPLE_PMAX)) {
        Ok(m) => m,
        Err(e) => {
            rep.error("counterexample", "construction", e);
            return rep;
        }
    };
    let label = m.label().to_string();
    let g = gamma_m(&m);
    rep.push(
        &label,
        None,
        index_verdict("gamma_M_zero", g.0.abs() <= tol, json!({"gamma_M": g})),
        Some(Status::Holds),
    );
    let om = omega_m_index(&m);
    rep.push(
        &label,
        None,
        index_verdict("omega_M_infinite", om.is_inf(), json!({"omega_M": om})),
        Some(Status::Holds),
    );
    let pair = AssociatedPair::new(&m);
    match pair.omega_fn() {
        Ok(w) => {
            let r = report(&w);
            rep.push(
                &label,
                None,
                index_verdict("gamma_omega_infinite", r.alpha.0 <= tol, json!({"alpha_omega_M": r.alpha, "gamma_omega_M": r.gamma})),
                Some(Status::Holds),
            );
            let strict = g.0 < r.gamma.0;
            rep.push(
                &label,
                None,
                index_verdict("gamma_M_below_gamma_omega", strict, json!({"gamma_M": g, "gamma_omega_M": r.gamma})),
                Some(Status::Holds),
            );
        }
        Err(e) => rep.error(&label, "gamma_omega_infinite", e),
    }
    let hat = m.hat();
    match AssociatedPair::new(&hat).omega_fn() {
        Ok(w) => {
            let gh = report(&w).gamma;
            rep.push(
                &label,
                None,
                index_verdict("gamma_omega_hat_large", gh.0 >= 20.0, json!({"gamma_omega_hat": gh})),
                Some(Status::Holds),
            );
        }
        Err(e) => rep.error(&label, "gamma_omega_hat_large", e),
    }
    if let Ok(v) = check_condition(&m, SeqCondition::Snq) {
        rep.push(&label, None, v, Some(Status::Fails));
    }
    rep
}

/// Three-valued comparison `x > c` with an indifference band of `band`.
fn above(x: ExtReal, c: f64, band: f64) -> Status {
    if x.0.is_nan() {
        Status::Inconclusive
    } else if x.0 > c + band {
        Status::Holds
    } else if x.0 < c - band {
        Status::Fails
    } else {
        Status::Inconclusive
    }
}

fn negate(s: Status) -> Status {
    match s {
        Status::Holds => Status::Fails,
        Status::Fails => Status::Holds,
        Status::Inconclusive => Status::Inconclusive,
    }
}

fn chain_check(id: &str, links: &[(&str, Status)]) -> Verdict {
    let mut broken = vec![];
    for i in 0..links.len() {
        for j in i + 1..links.len() {
            if links[i].1 == Status::Holds && links[j].1 == Status::Fails {
                broken.push(format!("{} => {}", links[i].0, links[j].0));
            }
        }
    }
    let w: Vec<Value> = links.iter().map(|(n, s)| json!([n, s])).collect();
    Verdict::new(id, Status::from_bool(broken.is_empty()), json!({"links": w, "broken": broken}))
}

fn equivalence(id: &str, a: (&str, Status), b: (&str, Status)) -> Verdict {
    let st = if a.1.is_definite() && b.1.is_definite() {
        Status::from_bool(a.1 == b.1)
    } else {
        Status::Inconclusive
    };
    Verdict::new(id, st, json!({a.0: a.1, b.0: b.1}))
}

/// Implication chain and index characterizations on every family.
pub fn implications_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("implications");
    let tol = cfg.tol;
    let mut fns = function_matrix();
    fns.push(two_sqrt());
    fns.push(WeightFunction::from_log("t^2", 0.0, SMOOTH_LN_CEILING, |u| 2.0 * u, None).expect("t^2"));
    for f in &fns {
        let r = report(f);
        let c = |k: OmegaCondition| check_omega(f, k).status;
        let links = [
            ("alpha<1", negate(above(r.alpha, 1.0, tol))),
            ("rho<1", negate(above(r.rho, 1.0, tol))),
            ("om_nq", c(OmegaCondition::OmNq)),
            ("om5", c(OmegaCondition::Om5)),
            ("om2", c(OmegaCondition::Om2)),
            ("rho<=1", negate(above(r.rho, 1.0 + tol, tol))),
        ];
        rep.push(&f.label, None, chain_check("chain", &links), Some(Status::Holds));
        rep.push(
            &f.label,
            None,
            equivalence("om_snq_iff_gamma_gt_1", ("om_snq", c(OmegaCondition::OmSnq)), ("gamma>1", above(r.gamma, 1.0, tol))),
            Some(Status::Holds),
        );
        let finite = if r.alpha.is_finite() { Status::Holds } else { Status::Fails };
        rep.push(
            &f.label,
            None,
            equivalence("om1_iff_alpha_finite", ("om1", c(OmegaCondition::Om1)), ("alpha<inf", finite)),
            Some(Status::Holds),
        );
        rep.push(
            &f.label,
            None,
            equivalence("om6_iff_beta_positive", ("om6", c(OmegaCondition::Om6)), ("beta>0", above(r.beta, tol, tol))),
            Some(Status::Holds),
        );
        let om7 = c(OmegaCondition::Om7);
        let ok = om7 != Status::Holds || r.alpha.0 <= tol;
        rep.push(
            &f.label,
            None,
            Verdict::new("om7_gives_alpha_zero", Status::from_bool(ok), json!({"om7": om7, "alpha": r.alpha})),
            Some(Status::Holds),
        );
    }
    let seqs = match sequence_matrix(cfg, true) {
        Ok(s) => s,
        Err(e) => {
            rep.error("matrix", "implications", e);
            return rep;
        }
    };
    for m in &seqs {
        let label = m.label().to_string();
        let g = gamma_m(m);
        let a = seq_indices(&m.quotients()).alpha;
        let c = |k: SeqCondition| check_condition(m, k).map(|v| v.status).unwrap_or(Status::Inconclusive);
        rep.push(
            &label,
            None,
            equivalence("snq_iff_gamma_M_positive", ("snq", c(SeqCondition::Snq)), ("gamma_M>0", above(g, tol, tol))),
            Some(Status::Holds),
        );
        rep.push(
            &label,
            None,
            equivalence("gamma_1_iff_gamma_M_gt_1", ("gamma_r(1)", c(SeqCondition::GammaR(1.0))), ("gamma_M>1", above(g, 1.0, tol))),
            Some(Status::Holds),
        );
        let finite = if a.is_finite() { Status::Holds } else { Status::Fails };
        rep.push(
            &label,
            None,
            equivalence("mg_iff_alpha_m_finite", ("mg", c(SeqCondition::Mg)), ("alpha_m<inf", finite)),
            Some(Status::Holds),
        );
    }
    rep
}

/// Runs a suite by name; `None` for an unknown name.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Option<SuiteReport> {
    Some(match name {
        "alpha_fn" => fn_battery_suite(TheoremId::AlphaFn),
        "beta_fn" => fn_battery_suite(TheoremId::BetaFn),
        "alpha_seq" => seq_battery_suite(TheoremId::AlphaSeq, cfg),
        "beta_seq" => seq_battery_suite(TheoremId::BetaSeq, cfg),
        "duality" => duality_suite(cfg),
        "legendre" => legendre_suite(cfg),
        "counterexample" => counterexample_suite(cfg),
        "implications" => implications_suite(cfg),
        "all" => {
            let mut all = SuiteReport::new("all");
            for s in ["alpha_fn", "beta_fn", "alpha_seq", "beta_seq", "duality", "legendre", "counterexample", "implications"] {
                all.absorb(run_suite(s, cfg)?);
            }
            all
        }
        _ => return None,
    })
}

/// Battery triples in a report (entries with a parameter).
pub fn battery_triples(r: &SuiteReport) -> usize {
    r.entries.iter().filter(|e| e.parameter.is_some()).count()
}

pub fn summary(r: &SuiteReport) -> Value {
    json!({
        "suite": r.suite,
        "holds": r.holds,
        "fails": r.fails,
        "inconclusive": r.inconclusive,
        "contradictions": r.contradictions.len(),
    })
}
