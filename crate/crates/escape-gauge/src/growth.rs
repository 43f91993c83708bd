//! Radius scaffolding for tower growth.
//!
//! The scaffolding places circles at radii `p(k) = (log^n k)^{1/rho}` for
//! integer `k` past a depth-dependent threshold `k0`, assigns each circle a
//! multiplicity `n_k ~ p(k)/p'(k)`, and inverts the picture through
//! `q = p^{-1}`, whose derivative grows like a tower of `n` exponentials.
//! These are the raw materials for the explicit function (`meromap`), the
//! covering estimates (`cover`), and the pole statistics (`counting`).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad;
use crate::tower::{self, LogDepthMagnitude};

/// Scaffolding with `n` iterated logs and order parameter `rho`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GrowthModel {
    n: u32,
    rho: f64,
    /// First index with `log^n k` comfortably above 1: `floor(exp^n(2)) + 1`.
    k0: u64,
}

impl GrowthModel {
    pub fn new(n: u32, rho: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("log depth n must be at least 1"));
        }
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::domain(format!(
                "order parameter must be positive and finite, got {rho}"
            )));
        }
        let thr = tower::iter_exp(n, 2.0).to_f64();
        if !thr.is_finite() || thr >= 9.0e18 {
            return Err(Error::InsufficientRange(format!(
                "starting index floor(exp^{n}(2)) + 1 exceeds 64-bit range; \
                 ring indices at this depth cannot be enumerated"
            )));
        }
        Ok(GrowthModel {
            n,
            rho,
            k0: thr.floor() as u64 + 1,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Smallest admissible ring index.
    pub fn k0(&self) -> u64 {
        self.k0
    }

    fn require_index(&self, k: u64) -> Result<()> {
        if k < self.k0 {
            return Err(Error::domain(format!(
                "ring index {k} is below the scaffolding threshold {}",
                self.k0
            )));
        }
        Ok(())
    }

    /// `p(x) = (log^n x)^{1/rho}` at a real abscissa `x >= k0`.
    pub fn p_real(&self, x: f64) -> Result<f64> {
        if !(x >= self.k0 as f64) {
            return Err(Error::domain(format!(
                "radius abscissa {x} is below the scaffolding threshold {}",
                self.k0
            )));
        }
        Ok(tower::iter_log_f64(self.n, x)?.powf(1.0 / self.rho))
    }

    /// Ring radius `p(k)`.
    pub fn p(&self, k: u64) -> Result<f64> {
        self.require_index(k)?;
        self.p_real(k as f64)
    }

    /// `p'(x)`, via the exact identity `p/p' = rho * x * prod_{i=1}^n log^i x`.
    pub fn p_prime(&self, x: f64) -> Result<f64> {
        let p = self.p_real(x)?;
        let mut denom = self.rho * x;
        let mut t = x;
        for _ in 0..self.n {
            t = t.ln();
            denom *= t;
        }
        Ok(p / denom)
    }

    /// Ring multiplicity `n_k = floor(rho * k * prod_{i=1}^n log^i k)`
    /// (the integer part of `p(k)/p'(k)`).
    pub fn n_index(&self, k: u64) -> Result<u64> {
        self.require_index(k)?;
        let x = k as f64;
        let mut v = self.rho * x;
        let mut t = x;
        for _ in 0..self.n {
            t = t.ln();
            v *= t;
        }
        if !(v.is_finite() && v < 9.0e18) {
            return Err(Error::InsufficientRange(format!(
                "multiplicity at ring {k} exceeds 64-bit range"
            )));
        }
        Ok(v.floor() as u64)
    }

    /// `q(r) = exp^n(r^rho)`, the inverse of `p`, as a tower.
    pub fn q(&self, r: f64) -> Result<LogDepthMagnitude> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::domain(format!("radius must be positive, got {r}")));
        }
        Ok(tower::iter_exp(self.n, r.powf(self.rho)))
    }

    /// Index of the outermost ring with `p(k) <= r`, i.e. `floor(q(r))`.
    /// Errors when that count cannot be held exactly in 64 bits.
    pub fn ring_count(&self, r: f64) -> Result<u64> {
        let q = self.q(r)?.to_f64();
        if !(q.is_finite() && q < 9.0e15) {
            return Err(Error::InsufficientRange(format!(
                "ring count at radius {r} exceeds exact integer range"
            )));
        }
        Ok(q.floor() as u64)
    }

    /// `log q'(r) = sum_{i=0}^{n-1} exp^i(r^rho) + ln rho + (rho-1) ln r`,
    /// accumulated in tower arithmetic so deep growth does not overflow.
    pub fn log_q_prime(&self, r: f64) -> Result<LogDepthMagnitude> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::domain(format!("radius must be positive, got {r}")));
        }
        self.log_q_prime_from_log(r.ln())
    }

    /// As [`log_q_prime`](Self::log_q_prime) but taking `ln r`, for radii
    /// far beyond double range (doubling cascades reach `ln r ~ 2^l`).
    pub fn log_q_prime_from_log(&self, ln_r: f64) -> Result<LogDepthMagnitude> {
        if !ln_r.is_finite() {
            return Err(Error::domain(format!("log-radius must be finite, got {ln_r}")));
        }
        // term starts at r^rho and climbs the exponential ladder.
        let mut term = LogDepthMagnitude::from_f64(self.rho * ln_r).exp();
        let mut acc = LogDepthMagnitude::from_f64(self.rho.ln() + (self.rho - 1.0) * ln_r);
        for _ in 0..self.n {
            acc = acc.add(&term);
            term = term.exp();
        }
        Ok(acc)
    }

    /// Constant in the separation estimates: `(ln 2)^{n+1} / 2`.
    pub fn separation_constant(&self) -> f64 {
        2f64.ln().powi(self.n as i32 + 1) / 2.0
    }

    /// Margin of the two-scale separation estimate between rings `k` and `l`
    /// (`k != l`, both admissible):
    ///
    /// * `l > k`: `n_k ln(p(l)/p(k)) - c * min(k, l - k)`,
    /// * `l < k`: `n_k ln(p(k)/p(l)) - c * (k - l)`,
    ///
    /// with `c = separation_constant()`. Nonnegative margins certify that
    /// multiplicities grow fast enough to separate consecutive scales.
    pub fn separation_margin(&self, k: u64, l: u64) -> Result<f64> {
        self.require_index(k)?;
        self.require_index(l)?;
        if k == l {
            return Err(Error::domain("separation margin needs two distinct rings"));
        }
        let nk = self.n_index(k)? as f64;
        let gap = (self.p(k.max(l))? / self.p(k.min(l))?).ln();
        let c = self.separation_constant();
        let budget = if l > k {
            c * (k.min(l - k)) as f64
        } else {
            c * (k - l) as f64
        };
        Ok(nk * gap - budget)
    }

    /// Exact partial sum `sum_{k=k0}^{K} n_k`.
    pub fn n_index_sum(&self, k_hi: u64) -> Result<u128> {
        self.require_index(k_hi)?;
        let mut s: u128 = 0;
        for k in self.k0..=k_hi {
            s += self.n_index(k)? as u128;
        }
        Ok(s)
    }

    /// Integral proxy for the same partial sum,
    /// `∫_{k0}^{K+1} rho t prod_{i=1}^n log^i t dt`, computed by adaptive
    /// Simpson on the log abscissa `t = e^s`.
    pub fn n_index_sum_integral(&self, k_hi: u64) -> Result<f64> {
        self.require_index(k_hi)?;
        let n = self.n;
        let rho = self.rho;
        let f = move |s: f64| {
            let mut v = rho * (2.0 * s).exp();
            let mut t = s;
            for _ in 0..n {
                v *= t;
                t = t.ln();
            }
            v
        };
        let a = (self.k0 as f64).ln();
        let b = ((k_hi + 1) as f64).ln();
        Ok(quad::adaptive_simpson(&f, a, b, 1e-10))
    }

    /// Sampling radius halfway between rings `k` and `k+1`: `p(k + 1/2)`.
    pub fn half_step_radius(&self, k: u64) -> Result<f64> {
        self.require_index(k)?;
        self.p_real(k as f64 + 0.5)
    }
}
