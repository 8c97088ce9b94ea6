//! Three-valued verdicts and the finite-horizon trend rules behind them.

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

impl Status {
    pub fn is_definite(self) -> bool {
        self != Status::Inconclusive
    }

    pub fn from_bool(b: bool) -> Status {
        if b {
            Status::Holds
        } else {
            Status::Fails
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::Fails => "fails",
            Status::Inconclusive => "inconclusive",
        }
    }
}

/// Named condition with its status and a structured numerical witness.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub id: String,
    pub status: Status,
    pub witness: Value,
}

impl Verdict {
    pub fn new(id: impl Into<String>, status: Status, witness: Value) -> Self {
        Verdict {
            id: id.into(),
            status,
            witness,
        }
    }

    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn fails(&self) -> bool {
        self.status == Status::Fails
    }
}

/// JSON number for finite values, `"inf"`/`"-inf"`/`"nan"` otherwise.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn slack(x: f64) -> f64 {
    1e-2 + 1e-3 * x.abs()
}

/// Classifies per-window values of a monitored log-constant (earliest window
/// first): `Holds` when the tail stays bounded, `Fails` when it keeps growing
/// without slowing down, `Inconclusive` otherwise.
pub fn bounded_trend(s: &[f64]) -> Status {
    let n = s.len();
    if n == 0 || s.iter().any(|x| x.is_nan()) {
        return Status::Inconclusive;
    }
    let last = s[n - 1];
    if last == f64::INFINITY {
        return Status::Fails;
    }
    if n == 1 {
        return Status::Inconclusive;
    }
    let prev = s[..n - 1].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // a late jump well above the early windows is not evidence of a bound
    let early = s[..n / 2].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let late = s[n / 2..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let jumped = n >= 4 && late > early + 1.0_f64.max(0.25 * early.abs());
    if last <= prev + slack(last) && !jumped {
        return Status::Holds;
    }
    if n < 3 {
        return Status::Inconclusive;
    }
    let d1 = s[n - 2] - s[n - 3];
    let d2 = last - s[n - 2];
    if d1 > slack(s[n - 2]) && d2 > slack(last) && d2 >= 0.75 * d1 {
        return Status::Fails;
    }
    let decelerating = s.windows(3).all(|w| {
        let (a, b) = (w[1] - w[0], w[2] - w[1]);
        b <= slack(w[2]) || (a > 0.0 && b <= 0.6 * a)
    });
    if d1 > 0.0 && d2 > 0.0 && d2 <= 0.6 * d1 && decelerating {
        return Status::Holds;
    }
    Status::Inconclusive
}

/// Classifies per-window values of `ln(ratio)` for an `o(·)` statement:
/// `Holds` when the ratio keeps shrinking at an undiminished pace, `Fails` when
/// it stalls or settles to a positive limit.
pub fn vanishing_trend(s: &[f64]) -> Status {
    let n = s.len();
    if n == 0 || s.iter().any(|x| x.is_nan()) {
        return Status::Inconclusive;
    }
    let last = s[n - 1];
    if last == f64::NEG_INFINITY || last < (1e-12f64).ln() {
        return Status::Holds;
    }
    if n < 3 {
        return Status::Inconclusive;
    }
    let d1 = s[n - 2] - s[n - 3];
    let d2 = last - s[n - 2];
    if d2 >= -slack(last) {
        return Status::Fails;
    }
    if d1 < -slack(s[n - 2]) && d2 <= 0.75 * d1 {
        return Status::Holds;
    }
    if d1 < 0.0 && d2 >= 0.6 * d1 {
        return Status::Fails;
    }
    Status::Inconclusive
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_rules() {
        assert_eq!(bounded_trend(&[1.0, 1.2, 1.1, 1.15]), Status::Holds);
        assert_eq!(bounded_trend(&[1.0, 2.0, 3.0, 4.0]), Status::Fails);
        // converging increments: c - a/u
        assert_eq!(bounded_trend(&[1.0, 1.5, 1.75, 1.875]), Status::Holds);
        assert_eq!(bounded_trend(&[1.0, 2.0, 3.0, f64::INFINITY]), Status::Fails);
        assert_eq!(bounded_trend(&[11.9, 8.7, 44.9, 32.1]), Status::Inconclusive);
    }

    #[test]
    fn vanishing_rules() {
        let ln2 = 2f64.ln();
        assert_eq!(vanishing_trend(&[0.0, -ln2, -2.0 * ln2, -3.0 * ln2]), Status::Holds);
        assert_eq!(vanishing_trend(&[0.0, 0.0, 0.0, 0.0]), Status::Fails);
        assert_eq!(vanishing_trend(&[-1.0, -1.5, -1.75, -1.875]), Status::Fails);
    }

    #[test]
    fn non_finite_numbers_serialize_as_strings() {
        assert_eq!(num(f64::INFINITY), json!("inf"));
        assert_eq!(num(1.5), json!(1.5));
    }
}
