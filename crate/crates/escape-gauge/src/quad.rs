//! Adaptive Simpson quadrature, in direct space and in log space.
//!
//! The log-space variant integrates a positive function supplied through its
//! natural log and returns the log of the integral, so integrands like
//! `q'(s)^2 s` can be accumulated long after they have left double range.

const MAX_DEPTH: u32 = 60;

fn logsumexp3(a: f64, b: f64, c: f64) -> f64 {
    let m = a.max(b).max(c);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + ((a - m).exp() + (b - m).exp() + (c - m).exp()).ln()
}

fn logsumexp2(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln |e^a - e^b|`; `NEG_INFINITY` when the operands coincide.
fn logabsdiff(a: f64, b: f64) -> f64 {
    if a == b {
        return f64::NEG_INFINITY;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    // ln(1 - e^{lo-hi}) stays accurate down to 1-ulp separations.
    hi + (-(lo - hi).exp()).ln_1p()
}

/// Adaptive Simpson with Richardson extrapolation; `rel_tol` is applied
/// relative to the magnitude of the whole-interval estimate.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let tol = rel_tol * whole.abs().max(f64::MIN_POSITIVE);
    simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // The midpoint test also stops once the interval can no longer be
    // split in floating point.
    if depth == 0 || delta.abs() <= 15.0 * tol || !(a < lm && rm < b) {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + simpson_rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
}

/// Adaptive Simpson for a positive integrand given as `ln f`; returns
/// `ln ∫ f`. The tolerance is relative to the integral itself.
pub fn adaptive_simpson_log(lf: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    assert!(b > a, "log-space quadrature expects a forward interval");
    let la = lf(a);
    let lb = lf(b);
    let m = 0.5 * (a + b);
    let lm = lf(m);
    let lwhole = ((b - a) / 6.0).ln() + logsumexp3(la, 4f64.ln() + lm, lb);
    let ltol = (15.0 * rel_tol).ln() + lwhole;
    simpson_log_rec(lf, a, la, b, lb, m, lm, lwhole, ltol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_log_rec(
    lf: &dyn Fn(f64) -> f64,
    a: f64,
    la: f64,
    b: f64,
    lb: f64,
    m: f64,
    lm: f64,
    lwhole: f64,
    ltol: f64,
    depth: u32,
) -> f64 {
    let xl = 0.5 * (a + m);
    let xr = 0.5 * (m + b);
    let ll = lf(xl);
    let lr = lf(xr);
    let lleft = ((m - a) / 6.0).ln() + logsumexp3(la, 4f64.ln() + ll, lm);
    let lright = ((b - m) / 6.0).ln() + logsumexp3(lm, 4f64.ln() + lr, lb);
    let lsum = logsumexp2(lleft, lright);
    if depth == 0 || logabsdiff(lsum, lwhole) <= ltol || !(a < xl && xr < b) {
        lsum
    } else {
        let li = simpson_log_rec(lf, a, la, m, lm, xl, ll, lleft, ltol - 2f64.ln(), depth - 1);
        let ri = simpson_log_rec(lf, m, lm, b, lb, xr, lr, lright, ltol - 2f64.ln(), depth - 1);
        logsumexp2(li, ri)
    }
}
