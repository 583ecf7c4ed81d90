//! Small scalar routines: bracketed root finding, 1D minimisation, log-factorials.

/// Root of `f` in `[lo, hi]`, assuming a sign change. Illinois-modified
/// regula falsi, which keeps the bracket and converges superlinearly.
pub(crate) fn find_root<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
    max_iter: usize,
) -> Option<f64> {
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    let mut side = 0i8;
    for _ in 0..max_iter {
        let mut x = (lo * fhi - hi * flo) / (fhi - flo);
        if !x.is_finite() || x <= lo.min(hi) || x >= lo.max(hi) {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x);
        if fx == 0.0 || (hi - lo).abs() < xtol {
            return Some(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
        if (hi - lo).abs() < xtol {
            return Some(0.5 * (lo + hi));
        }
    }
    Some(0.5 * (lo + hi))
}

/// Plain bisection on a boolean predicate that is `false` at `lo` and `true`
/// at `hi`. Returns the final bracket.
pub(crate) fn bisect_predicate<P: FnMut(f64) -> bool>(
    mut pred: P,
    mut lo: f64,
    mut hi: f64,
    max_iter: usize,
) -> (f64, f64) {
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimisation of a unimodal function on `[a, b]`.
pub(crate) fn golden_min<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    xtol: f64,
    max_iter: usize,
) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if (b - a).abs() < xtol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Scan `f` on `points` grid points over `[a, b]`, then refine the best
/// interior bracket by golden section.
pub(crate) fn scan_then_refine<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    points: usize,
    xtol: f64,
) -> (f64, f64) {
    let points = points.max(3);
    let step = (b - a) / (points - 1) as f64;
    let mut best = (0usize, f64::INFINITY);
    for i in 0..points {
        let v = f(a + step * i as f64);
        if v < best.1 {
            best = (i, v);
        }
    }
    let lo = a + step * best.0.saturating_sub(1) as f64;
    let hi = a + step * (best.0 + 1).min(points - 1) as f64;
    let (x, fx) = golden_min(&mut f, lo, hi, xtol, 200);
    if fx <= best.1 {
        (x, fx)
    } else {
        (a + step * best.0 as f64, best.1)
    }
}

/// `ln k!` for `k = 0..=n`, accumulated as a running sum of logarithms.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0f64;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_of_cubic() {
        let r = find_root(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14, 200).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn no_bracket_is_none() {
        assert!(find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 50).is_none());
    }

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, fx) = golden_min(|x| (x - 0.3).powi(2) + 1.0, -2.0, 2.0, 1e-10, 200);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ln_factorial_small_values() {
        let lf = ln_factorials(5);
        assert!((lf[5] - 120f64.ln()).abs() < 1e-14);
        assert_eq!(lf[0], 0.0);
    }
}
