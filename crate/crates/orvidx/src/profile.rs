//! Log-log profiles `u ↦ ln f(e^u)`: the common carrier for weight functions,
//! step embeddings of sequences, counting functions and conjugates.

use std::sync::Arc;

pub type LogFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A positive function seen through `u = ln x`, trusted on `[lo, hi]`.
#[derive(Clone)]
pub struct LogProfile {
    f: LogFn,
    /// Smallest trusted `u` (the function is positive from here on).
    pub lo: f64,
    /// Largest trusted `u` (the log of the evaluation ceiling).
    pub hi: f64,
}

impl std::fmt::Debug for LogProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LogProfile")
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .finish()
    }
}

impl LogProfile {
    pub fn new(lo: f64, hi: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        LogProfile {
            f: Arc::new(f),
            lo,
            hi,
        }
    }

    pub fn from_arc(lo: f64, hi: f64, f: LogFn) -> Self {
        LogProfile { f, lo, hi }
    }

    #[inline]
    pub fn at(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    pub fn func(&self) -> LogFn {
        self.f.clone()
    }

    /// Same function on a narrower trusted range.
    pub fn restrict(&self, lo: f64, hi: f64) -> Self {
        LogProfile {
            f: self.f.clone(),
            lo: lo.max(self.lo),
            hi: hi.min(self.hi),
        }
    }

    /// Profile of a tabulated graph, linear interpolation in `(u, ln y)`.
    pub fn from_samples(us: Vec<f64>, ys: Vec<f64>) -> Self {
        let lo = us[0];
        let hi = us[us.len() - 1];
        let us = Arc::new(us);
        let ys = Arc::new(ys);
        LogProfile::new(lo, hi, move |u| interp(&us, &ys, u))
    }
}

/// Piecewise-linear interpolation on sorted abscissae, clamped at the ends.
pub fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let k = xs.partition_point(|&v| v <= x);
    let (x0, x1) = (xs[k - 1], xs[k]);
    let (y0, y1) = (ys[k - 1], ys[k]);
    if y0 == y1 {
        return y0;
    }
    if !y0.is_finite() || !y1.is_finite() {
        return if x - x0 < x1 - x { y0 } else { y1 };
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_is_exact_on_lines() {
        let xs = vec![0.0, 1.0, 3.0];
        let ys = vec![0.0, 2.0, 6.0];
        assert_eq!(interp(&xs, &ys, 2.0), 4.0);
        assert_eq!(interp(&xs, &ys, -1.0), 0.0);
        assert_eq!(interp(&xs, &ys, 5.0), 6.0);
    }

    #[test]
    fn restrict_narrows() {
        let p = LogProfile::new(0.0, 10.0, |u| 2.0 * u);
        let q = p.restrict(1.0, 20.0);
        assert_eq!((q.lo, q.hi), (1.0, 10.0));
        assert_eq!(q.at(3.0), 6.0);
    }
}
