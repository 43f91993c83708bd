//! The gauge family `h(t) = t^2 (log^n(1/t))^gamma` and its calculus.
//!
//! Everything numerically delicate runs on `ell = log(1/t)` instead of `t`
//! itself: the gauge is only defined on `(0, delta_n]` with
//! `delta_n = 1/exp^n(gamma)`, and for `n >= 3` that interval lies entirely
//! below the smallest positive double. In `ell`-space,
//!
//! ```text
//! log h = -2 ell + gamma * ln(log^{n-1} ell),
//! ```
//!
//! and the three comparison lemmas reduce to differences of iterated logs
//! that can be cancelled algebraically instead of numerically.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tower::{self, LogDepthMagnitude};

/// Which space a lemma check was evaluated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MarginSpace {
    /// Plain double arithmetic on `h` itself.
    Direct,
    /// Arithmetic on `log h`; immune to underflow of `h`.
    LogOfGauge,
}

/// One inequality check: `lhs <= rhs` with `margin = rhs - lhs`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LemmaCheck {
    pub space: MarginSpace,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// Margins for the three comparison lemmas on a common set of inputs.
#[derive(Debug, Clone, Serialize)]
pub struct MarginReport {
    /// Worst case over the inputs of `c^2 h(t) - h(c t)` (in log space:
    /// `log(c^2 h(t)) - log h(c t)`).
    pub scaling: LemmaCheck,
    /// `prod_j log^n(1/t_j) - log^n(1/prod_j t_j)`, evaluated directly.
    pub superadditivity: LemmaCheck,
    /// `sum_j log h(t_j) - log h(prod_j t_j)`.
    pub product: LemmaCheck,
}

/// Concavity diagnostics for `G(t) = h(sqrt t)` at one point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConcavityReport {
    /// The bracket `1 - (gamma/2)/prod_{i<n} log^i(ell/2)`; `G` is increasing
    /// where this is positive, and it tends to 1 as `t -> 0`.
    pub margin: f64,
    /// Sign of `G'(t)` (the bracket times a positive factor).
    pub derivative_positive: bool,
}

/// A gauge `t^2 (log^n(1/t))^gamma` with `n >= 1` iterated logs.
#[derive(Debug, Clone)]
pub struct GaugeSpec {
    n: u32,
    gamma: f64,
    /// `log(1/delta_n) = exp^{n-1}(gamma)` kept exactly as a tower.
    log_recip_delta: LogDepthMagnitude,
}

impl GaugeSpec {
    pub fn new(n: u32, gamma: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain(
                "gauge needs at least one iterated log (n >= 1): without it the \
                 comparison lemmas are vacuous",
            ));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::domain(format!(
                "gauge exponent must be positive and finite, got {gamma}"
            )));
        }
        Ok(GaugeSpec {
            n,
            gamma,
            log_recip_delta: tower::iter_exp(n - 1, gamma),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Right endpoint of the domain, `1/exp^n(gamma)`. Underflows to zero for
    /// deep towers; the `*_log_recip` entry points remain usable there.
    pub fn delta_n(&self) -> f64 {
        let l = self.log_recip_delta.to_f64();
        if l.is_infinite() {
            0.0
        } else {
            (-l).exp()
        }
    }

    /// `log(1/delta_n)` as a tower; the domain is `ell >=` this value.
    pub fn log_recip_delta(&self) -> LogDepthMagnitude {
        self.log_recip_delta
    }

    fn require_in_domain(&self, ell: f64) -> Result<()> {
        let bound = self.log_recip_delta.to_f64();
        if bound.is_infinite() {
            return Err(Error::domain(format!(
                "domain boundary log(1/delta) = {} exceeds double range; \
                 no double log-reciprocal can reach it",
                self.log_recip_delta
            )));
        }
        if !(ell >= bound) {
            return Err(Error::domain(format!(
                "log(1/t) = {ell} is below the domain boundary {bound} \
                 (t must not exceed delta_n)"
            )));
        }
        Ok(())
    }

    /// `log h(t)` from `ell = log(1/t)`.
    pub fn log_h_from_log_recip(&self, ell: f64) -> Result<f64> {
        self.require_in_domain(ell)?;
        let inner = tower::iter_log_f64(self.n - 1, ell)?;
        Ok(-2.0 * ell + self.gamma * inner.ln())
    }

    /// `h(t)` for a representable `t` in `(0, delta_n]`.
    pub fn h(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain(format!("gauge argument must be positive, got {t}")));
        }
        let ell = -t.ln();
        self.require_in_domain(ell)?;
        let inner = tower::iter_log_f64(self.n - 1, ell)?;
        Ok(t * t * inner.powf(self.gamma))
    }

    /// `G(t) = h(sqrt t)`, the concave majorant used for averaging; domain
    /// `(0, delta_n^2]`.
    pub fn h_sqrt(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain(format!(
                "averaged gauge argument must be positive, got {t}"
            )));
        }
        self.h(t.sqrt())
    }

    /// `ln((log^n(1/t))^gamma)` with `log(1/t)` supplied as a tower. Used by
    /// the measure ledgers, where `1/t` is astronomically large.
    pub fn log_poly_factor_tower(&self, log_recip: &LogDepthMagnitude) -> Result<f64> {
        if log_recip.value_cmp(&self.log_recip_delta) == std::cmp::Ordering::Less {
            return Err(Error::domain(format!(
                "log(1/t) = {log_recip} is below the domain boundary {}",
                self.log_recip_delta
            )));
        }
        let log_inner = tower::iter_log(self.n, log_recip)?;
        if !log_inner.is_finite() {
            return Err(Error::domain(
                "iterated log of the tower still exceeds double range",
            ));
        }
        Ok(self.gamma * log_inner)
    }

    /// Scaling comparison `h(c t) <= c^2 h(t)` at `ell = log(1/t)`, reported
    /// as log-space lhs/rhs. The margin is computed in cancelled form
    /// `gamma (ln log^{n-1} ell - ln log^{n-1}(ell - ln c))`, which is exact
    /// up to rounding even when lhs and rhs are huge and nearly equal.
    pub fn scaling_margin_log(&self, ell: f64, c: f64) -> Result<LemmaCheck> {
        if !(c > 1.0 && c.is_finite()) {
            return Err(Error::domain(format!("scaling factor must exceed 1, got {c}")));
        }
        // c t must stay inside the domain, i.e. ell - ln c >= log(1/delta).
        self.require_in_domain(ell - c.ln())?;
        let lhs = self.log_h_from_log_recip(ell - c.ln())?; // log h(c t)
        let rhs = 2.0 * c.ln() + self.log_h_from_log_recip(ell)?; // log(c^2 h(t))
        let inner_t = tower::iter_log_f64(self.n - 1, ell)?;
        let inner_ct = tower::iter_log_f64(self.n - 1, ell - c.ln())?;
        let margin = self.gamma * (inner_t.ln() - inner_ct.ln());
        Ok(LemmaCheck {
            space: MarginSpace::LogOfGauge,
            lhs,
            rhs,
            margin,
        })
    }

    /// Superadditivity of the iterated log:
    /// `log^n(1/prod t_j) <= prod_j log^n(1/t_j)` whenever every
    /// `t_j <= 1/exp^n(2)`. Inputs are `ell_j = log(1/t_j)`.
    pub fn superadditivity_margin(&self, ells: &[f64]) -> Result<LemmaCheck> {
        if ells.is_empty() {
            return Err(Error::domain("superadditivity check needs at least one input"));
        }
        let bound = tower::iter_exp(self.n - 1, 2.0).to_f64();
        if bound.is_infinite() {
            return Err(Error::domain(
                "superadditivity hypothesis boundary exceeds double range at this depth",
            ));
        }
        let mut sum = 0.0;
        let mut rhs = 1.0;
        for &ell in ells {
            if !(ell >= bound) {
                return Err(Error::domain(format!(
                    "input log(1/t) = {ell} violates the hypothesis t <= 1/exp^n(2) \
                     (needs ell >= {bound})"
                )));
            }
            sum += ell;
            rhs *= tower::iter_log_f64(self.n - 1, ell)?;
        }
        let lhs = tower::iter_log_f64(self.n - 1, sum)?;
        Ok(LemmaCheck {
            space: MarginSpace::Direct,
            lhs,
            rhs,
            margin: rhs - lhs,
        })
    }

    /// Product comparison `h(prod t_j) <= prod h(t_j)` under the combined
    /// hypothesis `t_j <= min(delta_n, 1/exp^n(2))`. Log-space, with the
    /// margin in cancelled form.
    pub fn product_margin_log(&self, ells: &[f64]) -> Result<LemmaCheck> {
        if ells.len() < 2 {
            return Err(Error::domain("product comparison needs at least two inputs"));
        }
        let hyp = tower::iter_exp(self.n - 1, 2.0).to_f64();
        let dom = self.log_recip_delta.to_f64();
        if hyp.is_infinite() || dom.is_infinite() {
            return Err(Error::domain(
                "hypothesis boundary exceeds double range at this depth",
            ));
        }
        let bound = hyp.max(dom);
        let mut sum = 0.0;
        let mut rhs = 0.0;
        let mut margin = 0.0;
        for &ell in ells {
            if !(ell >= bound) {
                return Err(Error::domain(format!(
                    "input log(1/t) = {ell} violates the combined hypothesis \
                     (needs ell >= {bound})"
                )));
            }
            sum += ell;
            rhs += self.log_h_from_log_recip(ell)?;
            margin += self.gamma * tower::iter_log_f64(self.n - 1, ell)?.ln();
        }
        let lhs = self.log_h_from_log_recip(sum)?;
        margin -= self.gamma * tower::iter_log_f64(self.n - 1, sum)?.ln();
        Ok(LemmaCheck {
            space: MarginSpace::LogOfGauge,
            lhs,
            rhs,
            margin,
        })
    }

    /// All three lemmas on a shared list of points, supplied as
    /// `ell_j = log(1/t_j)`, with scaling factor `c`. The scaling check is
    /// evaluated at every point and the worst margin is reported.
    pub fn inequality_margins(&self, ells: &[f64], c: f64) -> Result<MarginReport> {
        let mut scaling: Option<LemmaCheck> = None;
        for &ell in ells {
            // Check the scaling lemma at t_j / c so that c * (t_j / c) = t_j
            // stays inside the domain regardless of how close t_j is to it.
            let check = self.scaling_margin_log(ell + c.ln(), c)?;
            if scaling.map_or(true, |s| check.margin < s.margin) {
                scaling = Some(check);
            }
        }
        Ok(MarginReport {
            scaling: scaling
                .ok_or_else(|| Error::domain("margin report needs at least one input"))?,
            superadditivity: self.superadditivity_margin(ells)?,
            product: self.product_margin_log(ells)?,
        })
    }

    /// Concavity diagnostics for `G(t) = h(sqrt t)` at `ell = log(1/t)`,
    /// valid on `t <= delta_n^2`, i.e. `ell >= 2 exp^{n-1}(gamma)`.
    pub fn concavity_margin_log_recip(&self, ell: f64) -> Result<ConcavityReport> {
        let dom = self.log_recip_delta.to_f64();
        if dom.is_infinite() {
            return Err(Error::domain(
                "domain boundary exceeds double range at this depth",
            ));
        }
        if !(ell >= 2.0 * dom) {
            return Err(Error::domain(format!(
                "log(1/t) = {ell} is below 2 log(1/delta) = {}; the averaged gauge \
                 is only concave on (0, delta^2]",
                2.0 * dom
            )));
        }
        let half = 0.5 * ell; // log(1/sqrt t)
        let mut prod = 1.0;
        let mut x = half;
        for _ in 0..self.n {
            prod *= x;
            x = x.ln();
        }
        let margin = 1.0 - (self.gamma / 2.0) / prod;
        Ok(ConcavityReport {
            margin,
            derivative_positive: margin > 0.0,
        })
    }

    /// Concavity diagnostics at a representable `t`.
    pub fn concavity_margin(&self, t: f64) -> Result<ConcavityReport> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain(format!(
                "concavity argument must be positive, got {t}"
            )));
        }
        self.concavity_margin_log_recip(-t.ln())
    }
}
