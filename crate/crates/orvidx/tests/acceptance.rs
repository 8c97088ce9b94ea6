//! Acceptance criteria 1-12. Prints one pass/fail line per criterion and
//! exits nonzero if any fails.

use std::time::{Duration, Instant};

use orvidx::associated::{duality_report_with, hat_relation_check, integral_relation_check, table_grid, AssociatedPair};
use orvidx::cli::{cmd_analyze_fn, cmd_analyze_seq, cmd_verify, RunConfig, Source};
use orvidx::generators::{
    counterexample_block, counterexample_sequence, four_index_sequence, four_index_sequence_to, gevrey_fn, gevrey_seq,
    m0_beta, m_alpha_beta, mq, COUNTEREXAMPLE_PMAX, SMOOTH_LN_CEILING,
};
use orvidx::indices::{gamma_m, omega_m_index, report, seq_indices, ExtReal};
use orvidx::legendre::{gamma_shift_check, lower_conjugate, upper_conjugate, ShiftDirection};
use orvidx::numeric::rel_gap;
use orvidx::seq_model::{check_condition, SeqCondition};
use orvidx::suites::{battery_triples, run_suite, SuiteConfig};
use orvidx::verdict::Status;
use orvidx::WeightFunction;
use serde_json::Value;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn near(x: f64, want: f64, tol: f64) -> bool {
    (x - want).abs() <= tol
}

fn ext(v: &Value) -> f64 {
    match v {
        Value::Number(n) => n.as_f64().unwrap(),
        Value::String(s) if s == "inf" => f64::INFINITY,
        Value::String(s) if s == "-inf" => f64::NEG_INFINITY,
        _ => f64::NAN,
    }
}

fn condition(rep: &Value, id: &str) -> String {
    rep["conditions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == id)
        .map(|c| c["status"].as_str().unwrap().to_string())
        .unwrap_or_default()
}

fn analyze(command: &str, family: &str) -> Value {
    let cfg = RunConfig {
        command: command.into(),
        source: Some(Source::Family(family.into())),
        pmax: None,
        x_max: None,
        tol: 0.05,
        out: None,
        plot: None,
        suite: None,
    };
    let r = if command == "analyze-fn" { cmd_analyze_fn(&cfg) } else { cmd_analyze_seq(&cfg) };
    r.unwrap_or_else(|e| panic!("{command} {family}: {e}")).0
}

fn c1() -> Outcome {
    let mut notes = vec![];
    for (s, name) in [(0.25, "1/4"), (0.5, "1/2"), (1.0, "1")] {
        let t = Instant::now();
        let rep = analyze("analyze-fn", &format!("gevrey_fn:s={name}"));
        let dt = t.elapsed();
        let idx = &rep["indices"];
        for k in ["alpha", "beta", "mu", "rho"] {
            let v = ext(&idx[k]);
            ensure(near(v, s, 0.05), || format!("s={s}: {k}={v}"))?;
        }
        let g = ext(&rep["gamma"]);
        ensure(near(g, 1.0 / s, 0.1), || format!("s={s}: gamma={g}"))?;
        ensure(dt < Duration::from_secs(5), || format!("s={s}: took {dt:?}"))?;
        notes.push(format!("s={s} gamma={g:.4} {:.2}s", dt.as_secs_f64()));
    }
    Ok(notes.join(", "))
}

fn c2() -> Outcome {
    let rep = analyze("analyze-fn", "logpow:s=2");
    for k in ["alpha", "beta", "mu", "rho"] {
        let v = ext(&rep["indices"][k]);
        ensure(near(v, 0.0, 0.05), || format!("{k}={v}"))?;
    }
    let g = ext(&rep["gamma"]);
    ensure(g.is_infinite(), || format!("gamma={g}"))?;
    ensure(condition(&rep, "om6") == "fails", || "om6 does not fail".into())?;
    ensure(condition(&rep, "om7") == "holds", || "om7 does not hold".into())?;
    Ok("indices 0, gamma inf, om6 fails, om7 holds".into())
}

fn c3() -> Outcome {
    let mut notes = vec![];
    for a in [0.5, 1.0, 2.0] {
        let m = gevrey_seq(a, 4096).map_err(|e| e.to_string())?;
        let (g, o) = (gamma_m(&m).0, omega_m_index(&m).0);
        ensure(near(g, a, 0.05) && near(o, a, 0.05), || format!("gevrey {a}: gamma={g} omega={o}"))?;
        notes.push(format!("gevrey {a}: {g:.3}/{o:.3}"));
    }
    let q = mq(2.0, 4096).map_err(|e| e.to_string())?;
    let (g, o) = (gamma_m(&q), omega_m_index(&q));
    ensure(g.is_inf() && o.is_inf(), || format!("mq: gamma={g} omega={o}"))?;
    let mg = check_condition(&q, SeqCondition::Mg).map_err(|e| e.to_string())?;
    ensure(mg.fails(), || format!("mq: mg is {:?}", mg.status))?;
    let z = m0_beta(1.0, 4096).map_err(|e| e.to_string())?;
    let (g, o) = (gamma_m(&z).0, omega_m_index(&z).0);
    ensure(near(g, 0.0, 0.05) && near(o, 0.0, 0.05), || format!("m0: gamma={g} omega={o}"))?;
    let snq = check_condition(&z, SeqCondition::Snq).map_err(|e| e.to_string())?;
    ensure(snq.fails(), || format!("m0: snq is {:?}", snq.status))?;
    notes.push("mq inf/inf mg fails, m0 0/0 snq fails".into());
    Ok(notes.join(", "))
}

fn c4() -> Outcome {
    let mut notes = vec![];
    for (b, mu, r, a) in [(1.0, 2.0, 3.0, 4.0), (2.0, 2.5, 3.0, 3.5)] {
        let m = four_index_sequence(b, mu, r, a, 4096).map_err(|e| e.to_string())?;
        ensure(m.x_max() >= 1e12, || format!("probe range {}", m.x_max()))?;
        let i = seq_indices(&m.quotients());
        for (k, got, want) in [("beta", i.beta, b), ("mu", i.mu, mu), ("rho", i.rho, r), ("alpha", i.alpha, a)] {
            ensure(near(got.0, want, 0.1), || format!("({b},{mu},{r},{a}): {k}={got}"))?;
        }
        let d = duality_report_with(&m, 0.1).map_err(|e| e.to_string())?;
        ensure(d.srs.holds(), || format!("({b},{mu},{r},{a}): srs is {:?}", d.srs.status))?;
        notes.push(format!("({b},{mu},{r},{a}) ok"));
    }
    Ok(notes.join(", "))
}

fn c5() -> Outcome {
    let blocks = (counterexample_block(2), counterexample_block(1).2, counterexample_block(2).2);
    let exact = (blocks.0 .0, blocks.0 .1, blocks.1, blocks.2);
    ensure(exact == (4.0, 8.0, 16.0, 256.0), || format!("(a2,b2,c1,c2)={exact:?}"))?;
    let m = counterexample_sequence(COUNTEREXAMPLE_PMAX).map_err(|e| e.to_string())?;
    let g = gamma_m(&m);
    ensure(near(g.0, 0.0, 0.05), || format!("gamma(M)={g}"))?;
    let o = omega_m_index(&m);
    ensure(o.is_inf(), || format!("omega(M)={o}"))?;
    let om = AssociatedPair::new(&m).omega_fn().map_err(|e| e.to_string())?;
    let r = report(&om);
    ensure(r.alpha.0 <= 0.05, || format!("alpha(omega_M)={}", r.alpha))?;
    let strict = g.0 < r.gamma.0;
    ensure(strict, || format!("gamma(M)={g} not below gamma(omega_M)={}", r.gamma))?;
    let hat = AssociatedPair::new(&m.hat()).omega_fn().map_err(|e| e.to_string())?;
    let gh = report(&hat).gamma;
    ensure(gh.0 >= 20.0, || format!("gamma(omega_hat)={gh}"))?;
    Ok(format!("gamma(M)={g}, omega(M)={o}, alpha(omega_M)={}, gamma(omega_hat)={gh}", r.alpha))
}

fn c6() -> Outcome {
    let fams = vec![
        gevrey_seq(0.5, 4096),
        gevrey_seq(1.0, 4096),
        gevrey_seq(2.0, 4096),
        m_alpha_beta(1.0, 1.0, 4096),
        four_index_sequence_to(1.0, 2.0, 3.0, 4.0, 4096, SMOOTH_LN_CEILING.exp()),
    ];
    let prod_ok = |a: ExtReal, b: ExtReal| {
        (a.is_finite() && b.is_finite() && (a.0 * b.0 - 1.0).abs() <= 0.1)
            || (a.0 == 0.0 && b.is_inf())
            || (a.is_inf() && b.0 == 0.0)
    };
    for m in fams {
        let m = m.map_err(|e| e.to_string())?;
        let d = duality_report_with(&m, 0.1).map_err(|e| e.to_string())?;
        let l = m.label().to_string();
        ensure(prod_ok(d.beta_m, d.alpha_nu), || format!("{l}: beta(m)={} alpha(nu)={}", d.beta_m, d.alpha_nu))?;
        ensure(prod_ok(d.alpha_m, d.beta_nu), || format!("{l}: alpha(m)={} beta(nu)={}", d.alpha_m, d.beta_nu))?;
        ensure(prod_ok(d.rho_om, d.mu_m), || format!("{l}: rho(om)={} mu(m)={}", d.rho_om, d.mu_m))?;
        if d.mg == Status::Holds {
            ensure(near(d.gamma_m.0, d.gamma_om.0, 0.1), || {
                format!("{l}: gamma(M)={} gamma(om)={}", d.gamma_m, d.gamma_om)
            })?;
        }
    }
    Ok("5 families".into())
}

fn c7() -> Outcome {
    let mut worst = 0.0f64;
    for a in [0.5, 1.5, 2.0] {
        let m = gevrey_seq(a, 4096).map_err(|e| e.to_string())?;
        let grid = table_grid(&m, 64);
        let v = integral_relation_check(&m, &grid);
        let gap = v.witness["max_rel_gap"].as_f64().unwrap_or(f64::NAN);
        worst = worst.max(gap);
        ensure(v.holds(), || format!("gevrey {a}: {}", v.witness))?;
    }
    Ok(format!("max relative gap {worst:.2e}"))
}

fn two_sqrt() -> WeightFunction {
    WeightFunction::from_log(
        "2sqrt",
        0.0,
        SMOOTH_LN_CEILING,
        |u| std::f64::consts::LN_2 + 0.5 * u,
        Some(std::sync::Arc::new(|t: f64| 2.0 * t.sqrt())),
    )
    .unwrap()
}

fn c8() -> Outcome {
    let h = 3.0 * std::f64::consts::LN_10;
    let up = upper_conjugate(&two_sqrt()).map_err(|e| e.to_string())?.graph(h, 121);
    let mut worst_up = 0.0f64;
    for i in up.trusted() {
        worst_up = worst_up.max(rel_gap(up.y[i], 1.0 / up.x[i], 1e-300));
    }
    ensure(up.trusted().count() > 100 && worst_up <= 1e-6, || format!("sigma*: gap {worst_up:e}"))?;
    let low = lower_conjugate("1/s", |w| (-w).exp(), -60.0, 60.0).graph(h, 121);
    let mut worst_low = 0.0f64;
    for i in low.trusted() {
        worst_low = worst_low.max(rel_gap(low.y[i], 2.0 * low.x[i].sqrt(), 1e-300));
    }
    ensure(low.trusted().count() > 100 && worst_low <= 1e-6, || format!("h_*: gap {worst_low:e}"))?;
    for s in [0.5, 1.0 / 3.0] {
        let f = gevrey_fn(s).map_err(|e| e.to_string())?;
        let v = gamma_shift_check(&f, ShiftDirection::Upper, 0.05);
        let shift = v.witness["shift"].as_f64().unwrap_or(f64::NAN);
        ensure((shift - 1.0).abs() <= 0.1, || format!("t^{s}: {}", v.witness))?;
    }
    Ok(format!("gaps {worst_up:.1e} / {worst_low:.1e}"))
}

fn c9() -> Outcome {
    for a in [0.5, 1.0] {
        let m = gevrey_seq(a, 4096).map_err(|e| e.to_string())?;
        let v = hat_relation_check(&m, 0.05);
        ensure(v.holds(), || format!("p!^{a}: {}", v.witness))?;
    }
    Ok("p!^(1/2), p!".into())
}

fn c10() -> Outcome {
    let cfg = SuiteConfig::default();
    let mut triples = 0;
    for s in ["alpha_fn", "beta_fn", "alpha_seq", "beta_seq"] {
        let r = run_suite(s, &cfg).unwrap();
        ensure(r.ok(), || format!("{s}: {:?}", r.contradictions))?;
        triples += battery_triples(&r);
    }
    ensure(triples >= 200, || format!("only {triples} triples"))?;
    Ok(format!("{triples} triples, 0 contradictions"))
}

fn c11() -> Outcome {
    let r = run_suite("implications", &SuiteConfig::default()).unwrap();
    ensure(r.ok(), || format!("{:?}", r.contradictions))?;
    Ok(format!("{} checks, {} inconclusive", r.entries.len(), r.inconclusive))
}

fn c12() -> Outcome {
    let cfg = RunConfig {
        command: "verify".into(),
        source: None,
        pmax: None,
        x_max: None,
        tol: 0.05,
        out: None,
        plot: None,
        suite: Some("all".into()),
    };
    let run = || serde_json::to_string_pretty(&cmd_verify(&cfg).unwrap()).unwrap();
    let (a, b) = std::thread::scope(|s| {
        let h = s.spawn(run);
        let b = run();
        (h.join().unwrap(), b)
    });
    ensure(a == b, || "reports differ".into())?;
    Ok(format!("{} bytes identical", a.len()))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("gevrey functions", c1),
        ("slow variation", c2),
        ("gevrey sequences", c3),
        ("four-index construction", c4),
        ("block counterexample", c5),
        ("duality", c6),
        ("integral relation", c7),
        ("legendre oracles", c8),
        ("hat relation", c9),
        ("battery consistency", c10),
        ("implication chain", c11),
        ("determinism", c12),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let dt = t.elapsed().as_secs_f64();
        match out {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg} ({dt:.1}s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg} ({dt:.1}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
