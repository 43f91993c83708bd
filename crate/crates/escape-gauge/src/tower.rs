//! Extended-range positive arithmetic for towers of exponentials.
//!
//! Quantities of the form exp(exp(...exp(x))) outgrow IEEE-754 doubles after
//! two or three levels, but every routine in this crate only ever needs such
//! values through their iterated logarithms. [`LogDepthMagnitude`] stores a
//! value as `exp^depth(mantissa)` with the depth kept minimal: a finite
//! double has depth 0, and the depth only grows once the mantissa's image
//! under `exp` would leave the comfortable double range.
//!
//! The representation is exact under `exp` and `log` (they just move the
//! depth counter), totally ordered by represented value, and supports the
//! saturating additions needed to accumulate sums whose terms straddle many
//! orders of a tower.

use serde::Serialize;
use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Mantissas above this are not exponentiated down during canonicalization;
/// `exp(700)` is still finite but close enough to the double ceiling that one
/// more level is stored as a depth increment instead.
const DEPTH_THRESHOLD: f64 = 700.0;

/// A real number represented as `exp^depth(mantissa)`.
///
/// Canonical form keeps the depth minimal: `depth > 0` implies
/// `mantissa > 700`, so the plain value would overflow (or crowd) the double
/// range. Negative and zero values are representable at depth 0 only.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LogDepthMagnitude {
    depth: u32,
    mantissa: f64,
}

impl LogDepthMagnitude {
    /// Builds `exp^depth(mantissa)` and canonicalizes the depth downward.
    pub fn new(depth: u32, mantissa: f64) -> Self {
        assert!(mantissa.is_finite(), "tower mantissa must be finite");
        let mut v = Self { depth, mantissa };
        while v.depth > 0 && v.mantissa <= DEPTH_THRESHOLD {
            v.mantissa = v.mantissa.exp();
            v.depth -= 1;
        }
        v
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "tower mantissa must be finite");
        Self { depth: 0, mantissa: x }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    /// The represented value as a double, saturating to `+inf` once the
    /// tower exceeds double range.
    pub fn to_f64(&self) -> f64 {
        match self.depth {
            0 => self.mantissa,
            1 => self.mantissa.exp(),
            _ => f64::INFINITY,
        }
    }

    /// `exp` of the represented value. Exact in the representation: at
    /// positive depth this only bumps the counter.
    pub fn exp(&self) -> Self {
        if self.depth == 0 {
            if self.mantissa <= DEPTH_THRESHOLD {
                Self { depth: 0, mantissa: self.mantissa.exp() }
            } else {
                Self { depth: 1, mantissa: self.mantissa }
            }
        } else {
            Self { depth: self.depth + 1, mantissa: self.mantissa }
        }
    }

    /// Natural log of the represented value; exact at positive depth.
    pub fn ln(&self) -> Result<Self> {
        if self.depth > 0 {
            Ok(Self { depth: self.depth - 1, mantissa: self.mantissa })
        } else if self.mantissa > 0.0 {
            Ok(Self { depth: 0, mantissa: self.mantissa.ln() })
        } else {
            Err(Error::domain(format!(
                "log of non-positive value {}",
                self.mantissa
            )))
        }
    }

    fn ln_f64_checked(&self) -> Option<f64> {
        if self.depth > 0 {
            Some(Self { depth: self.depth - 1, mantissa: self.mantissa }.to_f64())
        } else if self.mantissa > 0.0 {
            Some(self.mantissa.ln())
        } else {
            None
        }
    }

    /// Sum of two represented values. Exact whenever the result fits in a
    /// double; beyond that the smaller operand is folded in through log
    /// space, and at depth 2 or more its relative contribution falls below
    /// the mantissa's resolution, so the larger operand is returned as is.
    pub fn add(&self, rhs: &Self) -> Self {
        let fa = self.to_f64();
        let fb = rhs.to_f64();
        if fa.is_finite() && fb.is_finite() {
            let s = fa + fb;
            if s.is_finite() {
                return Self::from_f64(s);
            }
        }
        let (hi, lo) = if self.value_cmp(rhs) == Ordering::Less {
            (rhs, self)
        } else {
            (self, rhs)
        };
        if hi.depth >= 2 {
            return *hi;
        }
        // hi is depth 1 (or a near-ceiling double): combine through logs.
        let log_hi = match hi.ln_f64_checked() {
            Some(l) => l,
            None => return *hi,
        };
        let log_lo = match lo.ln_f64_checked() {
            Some(l) => l,
            // lo ≤ 0 with |lo| at most double range: negligible against hi.
            None => return *hi,
        };
        let bumped = log_hi + (log_lo - log_hi).exp().ln_1p();
        Self::from_f64(bumped).exp()
    }

    /// Product of two positive represented values.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        Ok(self.ln()?.add(&rhs.ln()?).exp())
    }

    /// `ln(self / rhs)` as a double, for positive values whose single logs
    /// are comparable; errors when even log space cannot resolve the ratio.
    pub fn log_ratio(&self, rhs: &Self) -> Result<f64> {
        let la = self.ln()?;
        let lb = rhs.ln()?;
        if la.depth == lb.depth && la.mantissa == lb.mantissa {
            return Ok(0.0);
        }
        let d = la.to_f64() - lb.to_f64();
        if d.is_nan() {
            return Err(Error::domain(
                "log ratio: both logs overflow double range; ratio unresolvable",
            ));
        }
        Ok(d)
    }

    /// Total order by represented value, comparing across depths by lifting
    /// the shallower operand into the deeper one's log scale.
    pub fn value_cmp(&self, other: &Self) -> Ordering {
        if self.depth == other.depth {
            return self
                .mantissa
                .partial_cmp(&other.mantissa)
                .expect("tower mantissa is never NaN");
        }
        let flip = self.depth > other.depth;
        let (mut lo, hi) = if flip { (*other, *self) } else { (*self, *other) };
        // hi has positive depth, hence represents a value ≥ exp(700) > 0.
        while lo.depth < hi.depth {
            if lo.mantissa <= 0.0 {
                return if flip { Ordering::Greater } else { Ordering::Less };
            }
            lo = Self { depth: lo.depth + 1, mantissa: lo.mantissa.ln() };
        }
        let ord = lo
            .mantissa
            .partial_cmp(&hi.mantissa)
            .expect("tower mantissa is never NaN");
        if flip {
            ord.reverse()
        } else {
            ord
        }
    }
}

impl PartialEq for LogDepthMagnitude {
    fn eq(&self, other: &Self) -> bool {
        self.value_cmp(other) == Ordering::Equal
    }
}

impl Eq for LogDepthMagnitude {}

impl PartialOrd for LogDepthMagnitude {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.value_cmp(other))
    }
}

impl Ord for LogDepthMagnitude {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value_cmp(other)
    }
}

impl fmt::Display for LogDepthMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.depth {
            0 => write!(f, "{}", self.mantissa),
            d => write!(f, "exp^{}({})", d, self.mantissa),
        }
    }
}

/// Applies `exp` to `x`, `n` times.
pub fn iter_exp(n: u32, x: f64) -> LogDepthMagnitude {
    let mut v = LogDepthMagnitude::from_f64(x);
    for _ in 0..n {
        v = v.exp();
    }
    v
}

/// Applies `log` to `v`, `n` times, returning a plain double. Errors if any
/// intermediate value is non-positive; saturates to `+inf` if even after the
/// `n` logs the value exceeds double range.
pub fn iter_log(n: u32, v: &LogDepthMagnitude) -> Result<f64> {
    let mut t = *v;
    for _ in 0..n {
        t = t.ln()?;
    }
    Ok(t.to_f64())
}

/// `log` applied `n` times to a plain positive double, erroring on domain
/// violations along the way.
pub fn iter_log_f64(n: u32, x: f64) -> Result<f64> {
    let mut t = x;
    for i in 0..n {
        if t <= 0.0 {
            return Err(Error::domain(format!(
                "iterated log: level {i} input {t} is non-positive"
            )));
        }
        t = t.ln();
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_at_depth_zero() {
        assert_eq!(iter_exp(0, 1.5).to_f64(), 1.5);
        assert_eq!(iter_exp(0, -5.0).to_f64(), -5.0);
    }

    #[test]
    fn small_towers_match_direct_exponentials() {
        assert_eq!(iter_exp(1, 0.0).to_f64(), 1.0);
        let e = std::f64::consts::E;
        assert!((iter_exp(2, 0.0).to_f64() - e).abs() < 1e-15);
        // exp(exp(2)) computed directly as the oracle.
        let oracle = (2.0f64.exp()).exp();
        assert!((iter_exp(2, 2.0).to_f64() - oracle).abs() / oracle < 1e-15);
    }

    #[test]
    fn third_level_switches_to_depth_one() {
        // exp^3(2) overflows doubles; its single log is exp^2(2).
        let v = iter_exp(3, 2.0);
        assert_eq!(v.depth(), 1);
        let expected_mantissa = (2.0f64.exp()).exp(); // 1618.177991...
        assert!((v.mantissa() - expected_mantissa).abs() < 1e-9);
        assert_eq!(v.to_f64(), f64::INFINITY);
    }

    #[test]
    fn exp_and_ln_are_inverse_in_the_representation() {
        let v = iter_exp(3, 2.0);
        let down = v.ln().unwrap();
        let up = down.exp();
        assert_eq!(up.depth(), v.depth());
        assert_eq!(up.mantissa(), v.mantissa());
        assert_eq!(down.depth(), iter_exp(2, 2.0).depth());
        assert_eq!(down.mantissa(), iter_exp(2, 2.0).mantissa());
    }

    #[test]
    fn iter_log_strips_towers() {
        assert!((iter_log(3, &iter_exp(3, 2.0)).unwrap() - 2.0).abs() < 1e-9);
        assert!((iter_log(2, &iter_exp(2, 0.5)).unwrap() - 0.5).abs() < 1e-12);
        // One log of a depth-4 tower is still beyond double range.
        assert_eq!(iter_log(1, &iter_exp(4, 2.0)).unwrap(), f64::INFINITY);
    }

    #[test]
    fn iter_log_domain_errors() {
        assert!(iter_log(1, &LogDepthMagnitude::from_f64(-3.0)).is_err());
        assert!(iter_log(1, &LogDepthMagnitude::from_f64(0.0)).is_err());
        // ln(1) = 0, so the second log is undefined.
        assert!(iter_log(2, &LogDepthMagnitude::from_f64(1.0)).is_err());
        assert!(iter_log_f64(2, 1.0).is_err());
    }

    #[test]
    fn canonicalization_reduces_depth() {
        let v = LogDepthMagnitude::new(3, 0.5);
        assert_eq!(v.depth(), 0);
        let oracle = ((0.5f64.exp()).exp()).exp();
        assert!((v.to_f64() - oracle).abs() / oracle < 1e-15);
        // A mantissa above the threshold stays put.
        let w = LogDepthMagnitude::new(1, 800.0);
        assert_eq!(w.depth(), 1);
        assert_eq!(w.mantissa(), 800.0);
    }

    #[test]
    fn ordering_crosses_depths() {
        let a = iter_exp(2, 3.0); // exp(exp(3)) ≈ 5.3e8, depth 0
        let b = iter_exp(1, 500.0); // e^500, depth 0
        assert!(a < b);
        let c = LogDepthMagnitude::new(1, 705.0); // e^705 ≈ 8.9e305
        let d = LogDepthMagnitude::from_f64(1e300);
        assert!(c > d);
        assert!(LogDepthMagnitude::from_f64(-1.0) < c);
        let huge = iter_exp(4, 2.0);
        assert!(huge > c);
    }

    #[test]
    fn addition_exact_in_double_range() {
        let a = LogDepthMagnitude::from_f64(2.0);
        let b = LogDepthMagnitude::from_f64(3.0);
        assert_eq!(a.add(&b).to_f64(), 5.0);
        let big = iter_exp(2, 2.0); // 1618.17...
        let small = iter_exp(1, 2.0); // 7.389...
        let s = big.add(&small).to_f64();
        let oracle = (2.0f64.exp()).exp() + 2.0f64.exp();
        assert!((s - oracle).abs() / oracle < 1e-15);
    }

    #[test]
    fn addition_beyond_double_range_tracks_log() {
        let a = LogDepthMagnitude::new(1, 800.0);
        let s = a.add(&a);
        assert_eq!(s.depth(), 1);
        assert!((s.mantissa() - (800.0 + std::f64::consts::LN_2)).abs() < 1e-12);
        // A double-range operand cannot move a depth-1 mantissa.
        let tiny = LogDepthMagnitude::from_f64(1e300);
        let t = a.add(&tiny);
        assert_eq!(t.depth(), 1);
        assert_eq!(t.mantissa(), 800.0);
    }

    #[test]
    fn mul_and_log_ratio() {
        let a = LogDepthMagnitude::new(1, 800.0);
        let b = LogDepthMagnitude::new(1, 900.0);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.depth(), 1);
        assert!((p.mantissa() - 1700.0).abs() < 1e-9);
        assert!((b.log_ratio(&a).unwrap() - 100.0).abs() < 1e-9);
        assert_eq!(a.log_ratio(&a).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn roundtrip_iter_log_of_iter_exp(x in 0.1f64..100.0, n in 0u32..=4) {
            let v = iter_exp(n, x);
            let back = iter_log(n, &v).unwrap();
            prop_assert!((back - x).abs() <= 1e-9 * x.abs().max(1.0));
        }

        #[test]
        fn order_agrees_with_doubles(x in -1e6f64..1e6, y in -1e6f64..1e6, n in 0u32..=2) {
            // Compare representable pairs against plain double ordering.
            let a = iter_exp(n, x / 1e4); // keeps exp^n within double range
            let b = iter_exp(n, y / 1e4);
            let fa = a.to_f64();
            let fb = b.to_f64();
            prop_assume!(fa.is_finite() && fb.is_finite() && fa != fb);
            prop_assert_eq!(a > b, fa > fb);
        }
    }
}
