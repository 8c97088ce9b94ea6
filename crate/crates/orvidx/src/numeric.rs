//! Small numerical kernels shared by the modules: log-sum-exp arithmetic,
//! log-domain quadrature, golden-section search and grid helpers.

/// `ln(e^a + e^b)` without overflow.
pub fn lse(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ e^{x_i}`.
pub fn lse_slice(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `ln(e^a - e^b)` for `a >= b`; `-inf` when equal.
pub fn lde(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        return a;
    }
    if b >= a {
        return f64::NEG_INFINITY;
    }
    a + (-(b - a).exp()).ln_1p()
}

const GL_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_W: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// 8-point Gauss-Legendre estimate of `ln ∫_a^b e^{f(w)} dw`.
fn gl_log<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut v = [0.0; 8];
    for i in 0..4 {
        v[2 * i] = f(c - h * GL_X[i]) + GL_W[i].ln();
        v[2 * i + 1] = f(c + h * GL_X[i]) + GL_W[i].ln();
    }
    lse_slice(&v) + h.ln()
}

/// `floor`: pieces below this log-level are negligible and not refined.
/// Bisection depth per unit panel. Deeper splits only chase the integer
/// jumps of step integrands, which no finite depth resolves far out.
const MAX_DEPTH: u32 = 12;

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, rtol: f64, floor: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = gl_log(f, a, m);
    let right = gl_log(f, m, b);
    let both = lse(left, right);
    let close = if both == f64::NEG_INFINITY && whole == f64::NEG_INFINITY {
        true
    } else {
        (both - whole).abs() <= rtol || both.max(whole) < floor
    };
    if close || depth == 0 {
        both
    } else {
        lse(
            adapt(f, a, m, left, rtol, floor, depth - 1),
            adapt(f, m, b, right, rtol, floor, depth - 1),
        )
    }
}

/// Adaptive `ln ∫_a^b e^{f(w)} dw` with relative tolerance `rtol`.
///
/// The range is first cut into unit panels so that sharp features are not
/// skipped by the coarse estimate.
pub fn log_integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rtol: f64) -> f64 {
    if !(b > a) {
        return f64::NEG_INFINITY;
    }
    let panels = ((b - a).ceil() as usize).clamp(1, 4096);
    let h = (b - a) / panels as f64;
    let edges: Vec<(f64, f64)> = (0..panels)
        .map(|k| {
            let x0 = a + h * k as f64;
            (x0, if k + 1 == panels { b } else { x0 + h })
        })
        .collect();
    let coarse: Vec<f64> = edges.iter().map(|&(x0, x1)| gl_log(&f, x0, x1)).collect();
    let top = coarse.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = top + rtol.ln() - 20.0;
    let mut acc = f64::NEG_INFINITY;
    for (&(x0, x1), &whole) in edges.iter().zip(&coarse) {
        acc = lse(acc, adapt(&f, x0, x1, whole, rtol, floor, MAX_DEPTH));
    }
    acc
}

/// Plain adaptive `∫_a^b f` for moderate, finite integrands.
pub fn integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rtol: f64) -> f64 {
    fn gl<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for i in 0..4 {
            s += GL_W[i] * (f(c - h * GL_X[i]) + f(c + h * GL_X[i]));
        }
        s * h
    }
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, rtol: f64, d: u32) -> f64 {
        let m = 0.5 * (a + b);
        let l = gl(f, a, m);
        let r = gl(f, m, b);
        if d == 0 || (l + r - whole).abs() <= rtol * (l + r).abs().max(1e-300) {
            l + r
        } else {
            rec(f, a, m, l, rtol, d - 1) + rec(f, m, b, r, rtol, d - 1)
        }
    }
    if !(b > a) {
        return 0.0;
    }
    let whole = gl(&f, a, b);
    rec(&f, a, b, whole, rtol, 30)
}

/// Extrapolated tail `∫_W^∞ e^{φ(z)} dz` together with the local decay
/// exponent `κ = -φ'(W)·W`.
#[derive(Debug, Clone, Copy)]
pub struct Tail {
    pub log_value: f64,
    pub kappa: f64,
}

/// Fits `-φ'(z) = c + k/z` from slopes near `W` and `W/2` and integrates the
/// model: `e^{φ(W)} / (c + (k-1)^+/W)`. Infinite when `c` is negligible on the
/// scale `W` and `k ≤ 1`.
pub fn extrapolate_tail<F: Fn(f64) -> f64>(phi: F, w: f64) -> Tail {
    let h = (0.02 * w).clamp(1e-4, 1.0);
    let slope = |z: f64| -(phi(z) - phi(z - h)) / h;
    let (z1, z0) = (w - 0.5 * h, 0.5 * w - 0.5 * h);
    let (s1, s0) = (slope(w), slope(0.5 * w));
    let kappa = s1 * w;
    let mut k = (s0 - s1) / (1.0 / z0 - 1.0 / z1);
    let mut c = s1 - k / z1;
    if !(k.is_finite() && c.is_finite()) || k < 0.0 {
        k = 0.0;
        c = s1;
    }
    if c < 0.0 {
        c = 0.0;
        k = s1 * z1;
    }
    let log_value = if c * w < 0.05 && k <= 1.0 + 1e-3 {
        f64::INFINITY
    } else {
        let denom = c + (k - 1.0).max(0.0) / w;
        if denom > 0.0 {
            phi(w) - denom.ln()
        } else {
            f64::INFINITY
        }
    };
    Tail { log_value, kappa }
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
/// Returns `(argmin, min)`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= xtol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `n` points evenly spaced on `[a, b]`, endpoints included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Boundaries of `w` windows growing geometrically from `lo` to `hi` (`lo > 0`).
pub fn geometric_windows(lo: f64, hi: f64, w: usize) -> Vec<(f64, f64)> {
    let r = (hi / lo).powf(1.0 / w as f64);
    (0..w)
        .map(|k| {
            let a = lo * r.powi(k as i32);
            let b = if k + 1 == w { hi } else { lo * r.powi(k as i32 + 1) };
            (a, b)
        })
        .collect()
}

/// Relative gap `|a-b| / max(|a|,|b|,floor)`.
pub fn rel_gap(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lse_matches_direct() {
        let v = lse(1.0_f64.ln(), 2.0_f64.ln());
        assert!((v - 3.0_f64.ln()).abs() < 1e-15);
        assert_eq!(lse(f64::NEG_INFINITY, 2.0), 2.0);
        assert!((lde(3.0_f64.ln(), 1.0_f64.ln()) - 2.0_f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn log_integral_of_exponential() {
        // ∫_0^10 e^{-w} dw = 1 - e^{-10}
        let v = log_integral(|w| -w, 0.0, 10.0, 1e-10);
        assert!((v.exp() - (1.0 - (-10f64).exp())).abs() < 1e-12);
        // huge exponent stays finite in log form
        let v = log_integral(|w| 800.0 * w, 0.0, 1.0, 1e-10);
        assert!((v - (800.0 - (800.0f64).ln())).abs() < 1e-9);
    }

    #[test]
    fn tails() {
        // e^{-2z}: 1/2 e^{-2W}
        let t = extrapolate_tail(|z| -2.0 * z, 50.0);
        assert!((t.log_value - (-100.0 - 2f64.ln())).abs() < 1e-6);
        // z^{-3}: W^{-2}/2
        let t = extrapolate_tail(|z: f64| -3.0 * z.ln(), 50.0);
        assert!((t.log_value - (-2.0 * 50f64.ln() - 2f64.ln())).abs() < 1e-2);
        // 1/z diverges
        assert_eq!(extrapolate_tail(|z: f64| -z.ln(), 50.0).log_value, f64::INFINITY);
    }

    #[test]
    fn plain_integral() {
        let v = integral(|x| x * x, 0.0, 3.0, 1e-12);
        assert!((v - 9.0).abs() < 1e-12);
    }

    #[test]
    fn golden_finds_parabola_min() {
        let (x, fx) = golden_min(|x| (x - 1.3) * (x - 1.3) + 2.0, -5.0, 5.0, 1e-10);
        assert!((x - 1.3).abs() < 1e-6);
        assert!((fx - 2.0).abs() < 1e-12);
    }

    #[test]
    fn windows_cover_range() {
        let w = geometric_windows(1.0, 16.0, 4);
        assert_eq!(w.len(), 4);
        assert!((w[0].1 - 2.0).abs() < 1e-12);
        assert_eq!(w[3].1, 16.0);
    }
}
