//! Inverse branches of `f = g^M` near poles, diameter bounds for chains of
//! branch images, the key series over annulus bins, mass-distribution
//! ledgers, and pole-disk densities.
//!
//! Throughout, `a_j` is a pole location and `b_j` the residue of `g` there.
//! The preimage component `U_j = g_j({|z| > R})` is never constructed as a
//! curve; it is represented by its disk sandwich
//! `D(a_j, |b_j|/(4R^{1/M})) ⊂ U_j ⊂ D(a_j, 2|b_j|/R^{1/M})`, with inner
//! disks used for lower bounds and outer disks for upper bounds, so every
//! reported inequality stays one-sided-sound.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauge::GaugeSpec;
use crate::growth::GrowthModel;
use crate::meromap::{Meromap, PoleDatum};
use crate::tower::{self, LogDepthMagnitude};

/// Chordal distance on the Riemann sphere (radius-1/2 convention):
/// `χ(z, w) = |z - w| / sqrt((1 + |z|²)(1 + |w|²))`. Dominated by the
/// Euclidean distance everywhere.
pub fn chordal(z: Complex64, w: Complex64) -> f64 {
    (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
}

/// Largest pairwise chordal distance over a point set.
pub fn chordal_diameter(points: &[Complex64]) -> f64 {
    let mut d = 0.0f64;
    for (i, &z) in points.iter().enumerate() {
        for &w in &points[i + 1..] {
            d = d.max(chordal(z, w));
        }
    }
    d
}

fn euclidean_diameter(points: &[Complex64]) -> f64 {
    let mut d = 0.0f64;
    for (i, &z) in points.iter().enumerate() {
        for &w in &points[i + 1..] {
            d = d.max((z - w).norm());
        }
    }
    d
}

/// One inverse branch of `f = g^M` near a pole: the solution `w` of
/// `f(w) = z` with `w` close to the pole, on the sheet selected by
/// `root_branch`. Seeded by first-order Laurent inversion and refined by
/// damped Newton iteration.
#[derive(Debug, Clone)]
pub struct InverseBranch {
    pub pole: PoleDatum,
    /// Which `M`-th root sheet: `0..M-1`.
    pub root_branch: u32,
    /// Domain threshold: `apply` refuses `|z|` below this radius.
    pub domain_radius_hint: f64,
}

const NEWTON_MAX_STEPS: u32 = 50;
const NEWTON_MAX_HALVINGS: u32 = 8;
const NEWTON_REL_RESIDUAL: f64 = 1e-9;

impl InverseBranch {
    pub fn new(pole: PoleDatum, root_branch: u32, domain_radius_hint: f64) -> Result<Self> {
        if root_branch >= pole.multiplicity_f {
            return Err(Error::domain(format!(
                "root branch {root_branch} out of range for multiplicity {}",
                pole.multiplicity_f
            )));
        }
        if !(domain_radius_hint > 0.0 && domain_radius_hint.is_finite()) {
            return Err(Error::domain("branch domain radius must be positive"));
        }
        Ok(InverseBranch {
            pole,
            root_branch,
            domain_radius_hint,
        })
    }

    fn m_power(&self) -> u32 {
        self.pole.multiplicity_f
    }

    /// First-order Laurent seed `w0 = u + b_j / (z^{1/M} ζ)` where `ζ` is
    /// the `root_branch`-th `M`-th root of unity. The principal `M`-th root
    /// has its cut along the negative real axis.
    fn seed(&self, z: Complex64) -> Complex64 {
        let m = self.m_power();
        let root = if m == 1 {
            z
        } else {
            z.powf(1.0 / m as f64)
                * Complex64::from_polar(
                    1.0,
                    2.0 * std::f64::consts::PI * self.root_branch as f64 / m as f64,
                )
        };
        self.pole.location + self.pole.residue / root
    }

    /// Evaluates the branch: returns `w` near the pole with
    /// `|f(w) - z| ≤ 1e-9 |z|`. Newton steps are halved (up to 8 times)
    /// until the residual decreases; poles crowd at large `k`, and an
    /// undamped step can jump rings.
    pub fn apply(&self, map: &Meromap, z: Complex64) -> Result<Complex64> {
        if map.m_power() != self.m_power() {
            return Err(Error::domain(
                "branch multiplicity disagrees with the map's outer power",
            ));
        }
        if z.norm() < self.domain_radius_hint {
            return Err(Error::domain(format!(
                "|z| = {} is below the branch domain radius {}",
                z.norm(),
                self.domain_radius_hint
            )));
        }
        let tol = NEWTON_REL_RESIDUAL * z.norm();
        let mut w = self.seed(z);
        let mut fw = map.eval_f(w)?;
        let mut res = (fw - z).norm();
        for _step in 0..NEWTON_MAX_STEPS {
            if res <= tol {
                return Ok(w);
            }
            let fp = map.eval_f_prime(w)?;
            let full = (fw - z) / fp;
            let mut scale = 1.0;
            let mut improved = false;
            for _ in 0..=NEWTON_MAX_HALVINGS {
                let cand = w - scale * full;
                if let Ok(fc) = map.eval_f(cand) {
                    let rc = (fc - z).norm();
                    if rc < res {
                        w = cand;
                        fw = fc;
                        res = rc;
                        improved = true;
                        break;
                    }
                }
                scale /= 2.0;
            }
            if !improved {
                break;
            }
        }
        if res <= tol {
            Ok(w)
        } else {
            Err(Error::NoConvergence {
                steps: NEWTON_MAX_STEPS,
                residual: res,
            })
        }
    }

    /// Branch derivative `g_j'(z) = 1 / f'(g_j(z))`.
    pub fn derivative(&self, map: &Meromap, z: Complex64) -> Result<Complex64> {
        let w = self.apply(map, z)?;
        let fp = map.eval_f_prime(w)?;
        if fp.norm() == 0.0 {
            return Err(Error::domain("branch derivative hit a critical point"));
        }
        Ok(fp.inv())
    }

    /// Koebe-type derivative ceiling `12 |b_j| / (M |z|^{1+1/M})`.
    pub fn derivative_bound(&self, z_abs: f64) -> f64 {
        let m = self.m_power() as f64;
        12.0 * self.pole.residue.norm() / (m * z_abs.powf(1.0 + 1.0 / m))
    }

    /// Relative slack of the derivative ceiling at `z`:
    /// `(bound - |g_j'|) / bound`; nonnegative when the ceiling holds.
    pub fn koebe_margin(&self, map: &Meromap, z: Complex64) -> Result<f64> {
        let d = self.derivative(map, z)?.norm();
        let bound = self.derivative_bound(z.norm());
        Ok((bound - d) / bound)
    }

    /// Outer sandwich radius `2 |b_j| / R^{1/M}`: images of `|z| ≥ R` stay
    /// inside this disk around the pole.
    pub fn outer_radius(&self, r: f64) -> f64 {
        2.0 * self.pole.residue.norm() / r.powf(1.0 / self.m_power() as f64)
    }

    /// Inner sandwich radius `|b_j| / (4 R^{1/M})`: this disk around the
    /// pole is covered by the branch image.
    pub fn inner_radius(&self, r: f64) -> f64 {
        self.pole.residue.norm() / (4.0 * r.powf(1.0 / self.m_power() as f64))
    }
}

/// A backward chain of branch images: level `i`'s branch is applied to
/// points near level `i+1`'s pole, with `radii_schedule[i]` governing the
/// domain of level `i`. Admissibility: each pole modulus must reach its
/// schedule radius, so the composition is defined on the whole terminal
/// disk.
#[derive(Debug, Clone)]
pub struct CoverChain {
    pub levels: Vec<InverseBranch>,
    pub radii_schedule: Vec<f64>,
}

impl CoverChain {
    pub fn new(mut levels: Vec<InverseBranch>, radii_schedule: Vec<f64>) -> Result<Self> {
        if levels.is_empty() || levels.len() != radii_schedule.len() {
            return Err(Error::domain(
                "chain needs one schedule radius per level and at least one level",
            ));
        }
        if levels.len() > 6 {
            return Err(Error::domain("chains beyond length 6 are not supported"));
        }
        for (i, (level, &r)) in levels.iter_mut().zip(&radii_schedule).enumerate() {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::domain("schedule radii must be positive"));
            }
            let a = level.pole.location.norm();
            if a < r {
                return Err(Error::domain(format!(
                    "chain not admissible: level {i} pole modulus {a} is below its schedule radius {r}"
                )));
            }
            level.domain_radius_hint = r;
        }
        Ok(CoverChain {
            levels,
            radii_schedule,
        })
    }

    /// Schedule radius governing the terminal level.
    pub fn terminal_radius(&self) -> f64 {
        *self.radii_schedule.last().expect("nonempty")
    }
}

/// Measured vs certified chain diameter.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChainDiameter {
    /// Chordal diameter of the sampled image of the terminal disk under the
    /// composed branches.
    pub measured: f64,
    /// `(2^{1+1/M} 12)^{l-1} · (32 / R^{1/M}) · Π |b_{j_k}| / |a_{j_k}|^{1+1/M}`
    /// with `R` the terminal schedule radius.
    pub bound: f64,
    /// Euclidean diameter of the same samples (dominates `measured`).
    pub euclidean: f64,
    pub samples: u32,
}

/// Samples the boundary of the terminal outer disk and pushes the samples
/// through the upper `l-1` branches (innermost applied first); reports the
/// chordal diameter of the image against the certified product bound.
pub fn chain_diameter(
    map: &Meromap,
    chain: &CoverChain,
    boundary_samples: u32,
) -> Result<ChainDiameter> {
    if boundary_samples < 16 {
        return Err(Error::domain("chain diameter needs at least 16 samples"));
    }
    let l = chain.levels.len();
    let r_term = chain.terminal_radius();
    let terminal = chain.levels.last().expect("nonempty");
    let center = terminal.pole.location;
    let radius = terminal.outer_radius(r_term);
    let mut pts: Vec<Complex64> = (0..boundary_samples)
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / boundary_samples as f64;
            center + Complex64::from_polar(radius, theta)
        })
        .collect();
    for branch in chain.levels[..l - 1].iter().rev() {
        for p in pts.iter_mut() {
            *p = branch.apply(map, *p)?;
        }
    }
    let m = map.m_power() as f64;
    let koebe = (2f64.powf(1.0 + 1.0 / m) * 12.0).powi(l as i32 - 1);
    let mut product = 32.0 / r_term.powf(1.0 / m);
    for level in &chain.levels {
        let a = level.pole.location.norm();
        let b = level.pole.residue.norm();
        product *= b / a.powf(1.0 + 1.0 / m);
    }
    Ok(ChainDiameter {
        measured: chordal_diameter(&pts),
        bound: koebe * product,
        euclidean: euclidean_diameter(&pts),
        samples: boundary_samples,
    })
}

/// Constants of the mass-distribution construction. `schedule(l)` doubles
/// in the exponent: `R_l = R0 · exp(2^l)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MassParams {
    pub r0: f64,
    /// Pole-to-web-boundary clearance factor (existential in the source
    /// material; configurable here, reported rather than asserted).
    pub lambda: f64,
    pub delta: f64,
    /// `τ = 1/2 + π/2`.
    pub tau: f64,
    /// `α = 1 / (16 (1+δ) · 324² · τ²)`.
    pub alpha: f64,
    /// `B = α / (9² · 256)`, the per-level density constant.
    pub b_const: f64,
    /// `A`, the chain-diameter prefactor of the level products; defaults to
    /// `32 · (2^{1+1/M} · 12)` but stays configurable — the asymptotic
    /// conclusions do not depend on it.
    pub a_const: f64,
}

impl MassParams {
    pub fn new(r0: f64, lambda: f64, delta: f64, m_power: u32) -> Result<Self> {
        if !(r0 > 0.0 && r0.is_finite()) || !(lambda > 0.0) || !(delta > 0.0) {
            return Err(Error::domain(
                "mass parameters R0, lambda, delta must all be positive",
            ));
        }
        if m_power == 0 {
            return Err(Error::domain("outer power must be at least 1"));
        }
        let tau = 0.5 + std::f64::consts::FRAC_PI_2;
        let alpha = 1.0 / (16.0 * (1.0 + delta) * 324.0f64.powi(2) * tau * tau);
        let b_const = alpha / (81.0 * 256.0);
        let a_const = 32.0 * (2f64.powf(1.0 + 1.0 / m_power as f64) * 12.0);
        Ok(MassParams {
            r0,
            lambda,
            delta,
            tau,
            alpha,
            b_const,
            a_const,
        })
    }

    pub fn with_prefactor(mut self, a_const: f64) -> Self {
        self.a_const = a_const;
        self
    }

    /// `R_l = R0 · exp(2^l)`. Overflows doubles near `l = 9`; use
    /// [`log_schedule`](Self::log_schedule) past that.
    pub fn schedule(&self, l: u32) -> f64 {
        self.r0 * 2f64.powi(l as i32).exp()
    }

    /// `ln R_l = ln R0 + 2^l`, exact at every level.
    pub fn log_schedule(&self, l: u32) -> f64 {
        self.r0.ln() + 2f64.powi(l as i32)
    }
}

/// One modulus bin `[2^l, 2^{l+1})` of the key series.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KeyBin {
    pub l: u32,
    pub ring_lo: u64,
    pub ring_hi: u64,
    /// Number of poles in the bin.
    pub card: u128,
    /// `S_l = Σ_{j ∈ bin} h(|b_j|/|a_j|^{1+1/M})`.
    pub s_l: f64,
    /// Jensen ceiling `card · G(Σ c_j / card)` with `G(t) = h(√t)`.
    pub jensen_bound: f64,
    /// `Σ_{j ∈ bin} c_j`, `c_j = (|b_j|/|a_j|^{1+1/M})²`.
    pub c_sum: f64,
    /// `144 R² · 2^{-2l/M}` for the configured `R = R0`.
    pub c_bound: f64,
    pub cum_sum: f64,
}

/// Ledger of the key series `Σ h(|b_j|/|a_j|^{1+1/M})`.
#[derive(Debug, Clone, Serialize)]
pub struct KeySeriesLedger {
    pub gamma: f64,
    /// The series converges for `gamma` below `2/(Mρ)`.
    pub convergence_threshold: f64,
    /// Leading poles whose summand exceeds the gauge domain bound `δ_n`
    /// (skipped and reported: the underlying statement is about tails).
    pub skipped_poles: u128,
    pub skipped_rings: Vec<u64>,
    /// Complete bins only, in increasing `l`.
    pub bins: Vec<KeyBin>,
    /// Geometric mean of successive `S_{l+1}/S_l` ratios.
    pub decay_ratio: Option<f64>,
    /// `-log2` of the decay ratio.
    pub decay_exponent: Option<f64>,
    /// Plain cumulative sum over the first `j_max` poles by modulus.
    pub direct_cum_sum: f64,
    pub direct_pole_count: u128,
}

/// Per-level mass-distribution entry, kept in log space throughout: the
/// diameters `d_l` underflow any float format almost immediately.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MassLevel {
    pub l: u32,
    /// `ln R_l`.
    pub log_radius: f64,
    /// `log(1/d_l)` as an iterated-exponential magnitude.
    pub log_inv_d_depth: u32,
    pub log_inv_d_mantissa: f64,
    /// `ln Δ_l = ln B - (2/M) ln R_l`.
    pub log_delta: f64,
    /// `ln( poly(d_l) · Π_{k ≤ l} Δ_k )` where `poly(t) = (logⁿ(1/t))^γ`
    /// is the polynomial factor of the gauge.
    pub log_product: f64,
    /// `ln logⁿ(1/d_l) / (ρ ln R_{l-1})`; tends to 1 as the levels deepen.
    pub asymptotic_ratio: f64,
}

/// The mass-distribution table with its divergence diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct MassTable {
    pub gamma: f64,
    /// The products diverge for `gamma` above `8/(Mρ)`.
    pub divergence_threshold: f64,
    /// `ργ - 8/M`: the sign that decides the tail behaviour.
    pub drift: f64,
    pub levels: Vec<MassLevel>,
    /// Whether the last computed increment of `log_product` agrees in sign
    /// with `drift`.
    pub tail_sign_consistent: bool,
    /// First level from which the increments keep the final sign.
    pub monotone_from: Option<u32>,
}

/// Density of the inner pole disks in the annulus `A(S) = {S < |z| < 2S}`.
#[derive(Debug, Clone, Serialize)]
pub struct AnnulusDensity {
    pub s: f64,
    pub eps: f64,
    /// Area ratio `|A(S)| / |A_ε(S)| = 3 / (4(1-ε)² - (1+ε)²)`.
    pub one_plus_delta: f64,
    pub ring_lo: u64,
    pub ring_hi: u64,
    pub disk_count: u128,
    /// Euclidean density: inner-disk area within `A(S)` over `|A(S)|`.
    pub euclidean: f64,
    /// `1 / (16 (1+δ) τ² R^{2/M})` for the configured `R = R0`.
    pub lower_bound: f64,
    /// Chordal density floor: `euclidean · ((1+S²)/(1+4S²))²`, the area
    /// conversion at the annulus radii.
    pub chordal_lower_bound: f64,
    /// `Σ_{|a_j| ≤ 2S} |b_j|²` against its ceiling `36 R² (2S)²`.
    pub b_sq_sum: f64,
    pub b_sq_bound: f64,
}

/// Scaffolding-level computations for the measure construction: everything
/// here needs only pole locations/residues (through the growth model), not
/// function evaluation.
#[derive(Debug, Clone)]
pub struct CoverModel<'a> {
    growth: &'a GrowthModel,
    params: MassParams,
    m_power: u32,
}

impl<'a> CoverModel<'a> {
    pub fn new(growth: &'a GrowthModel, params: MassParams, m_power: u32) -> Result<Self> {
        if m_power == 0 {
            return Err(Error::domain("outer power must be at least 1"));
        }
        Ok(CoverModel {
            growth,
            params,
            m_power,
        })
    }

    pub fn params(&self) -> &MassParams {
        &self.params
    }

    /// Ring summand `t_k = |b_j|/|a_j|^{1+1/M} = 1/(n_k p(k)^{1/M})`,
    /// identical for every pole on ring `k`.
    pub fn ring_summand(&self, k: u64) -> Result<f64> {
        let p = self.growth.p(k)?;
        let nk = self.growth.n_index(k)? as f64;
        Ok(1.0 / (nk * p.powf(1.0 / self.m_power as f64)))
    }

    /// Sums the key series `Σ h(t_j)` ring-wise over the modulus bins
    /// `[2^l, 2^{l+1})`, `l ≤ l_max`, keeping only bins whose ring ranges
    /// close within `ring_budget` rings. `j_max` caps the plain cumulative
    /// cross-check sum.
    pub fn key_series(
        &self,
        gauge: &GaugeSpec,
        j_max: u64,
        l_max: u32,
        ring_budget: u64,
    ) -> Result<KeySeriesLedger> {
        if gauge.n() != self.growth.n() {
            return Err(Error::domain(
                "gauge depth disagrees with the growth model depth",
            ));
        }
        let delta_n = gauge.delta_n();
        if delta_n == 0.0 {
            return Err(Error::domain(
                "gauge domain underflows doubles; summands cannot be classified",
            ));
        }
        let k_first = self.growth.k0() + 1;
        let mut bins: Vec<KeyBin> = Vec::new();
        let mut skipped_poles: u128 = 0;
        let mut skipped_rings: Vec<u64> = Vec::new();
        let mut direct_cum = 0.0f64;
        let mut direct_count: u128 = 0;
        let mut current: Option<KeyBin> = None;
        let mut cum = 0.0f64;
        let mut budget_exhausted = false;
        let mut k = k_first;
        loop {
            if k - k_first >= ring_budget {
                budget_exhausted = true;
                break;
            }
            let p = self.growth.p(k)?;
            let l = p.log2().floor();
            if l < 0.0 {
                return Err(Error::domain(
                    "scaffolding starts below modulus 1; binning undefined",
                ));
            }
            let l = l as u32;
            if l > l_max {
                break;
            }
            let nk = self.growth.n_index(k)?;
            let count = 2 * nk as u128;
            let t = self.ring_summand(k)?;
            if t > delta_n {
                skipped_poles += count;
                skipped_rings.push(k);
                k += 1;
                continue;
            }
            let h = gauge.h(t)?;
            let c = t * t;
            let same_bin = matches!(current.as_ref(), Some(bin) if bin.l == l);
            if same_bin {
                let bin = current.as_mut().expect("same_bin checked");
                bin.ring_hi = k;
                bin.card += count;
                bin.s_l += count as f64 * h;
                bin.c_sum += count as f64 * c;
            } else {
                if let Some(done) = current.take() {
                    cum += done.s_l;
                    bins.push(KeyBin {
                        cum_sum: cum,
                        ..done
                    });
                }
                current = Some(KeyBin {
                    l,
                    ring_lo: k,
                    ring_hi: k,
                    card: count,
                    s_l: count as f64 * h,
                    jensen_bound: 0.0,
                    c_sum: count as f64 * c,
                    c_bound: 0.0,
                    cum_sum: 0.0,
                });
            }
            if direct_count < j_max as u128 {
                let take = count.min(j_max as u128 - direct_count);
                direct_cum += take as f64 * h;
                direct_count += take;
            }
            k += 1;
        }
        // The bin in progress is complete only if the scan moved past it.
        if let Some(done) = current.take() {
            if !budget_exhausted {
                cum += done.s_l;
                bins.push(KeyBin {
                    cum_sum: cum,
                    ..done
                });
            }
        }
        let r = self.params.r0;
        for bin in bins.iter_mut() {
            let mean = bin.c_sum / bin.card as f64;
            bin.jensen_bound = bin.card as f64 * gauge.h_sqrt(mean)?;
            bin.c_bound =
                144.0 * r * r * 2f64.powf(-2.0 * bin.l as f64 / self.m_power as f64);
        }
        let ratios: Vec<f64> = bins
            .windows(2)
            .filter(|w| w[0].s_l > 0.0 && w[1].s_l > 0.0)
            .map(|w| w[1].s_l / w[0].s_l)
            .collect();
        let decay_ratio = if ratios.is_empty() {
            None
        } else {
            Some((ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64).exp())
        };
        Ok(KeySeriesLedger {
            gamma: gauge.gamma(),
            convergence_threshold: 2.0 / (self.m_power as f64 * self.growth.rho()),
            skipped_poles,
            skipped_rings,
            bins,
            decay_ratio,
            decay_exponent: decay_ratio.map(|r| -r.log2()),
            direct_cum_sum: direct_cum,
            direct_pole_count: direct_count,
        })
    }

    /// Smallest admissible `R0` for the given gauge: the level-1 diameter
    /// must already sit inside the gauge domain.
    fn required_r0(&self, gauge: &GaugeSpec) -> f64 {
        let target = gauge.log_recip_delta();
        let mut lo = -10.0f64;
        let mut hi = 690.0f64;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            match self.log_inv_d1(mid) {
                Ok(t) if t.value_cmp(&target).is_ge() => hi = mid,
                _ => lo = mid,
            }
        }
        hi.exp()
    }

    fn log_inv_d1(&self, ln_r0: f64) -> Result<LogDepthMagnitude> {
        let ln_r = ln_r0 + 1.0; // ln schedule(0)
        let lqp = self.growth.log_q_prime_from_log(ln_r)?;
        let rest = (1.0 + 1.0 / self.m_power as f64) * ln_r - self.params.a_const.ln();
        Ok(lqp.add(&LogDepthMagnitude::from_f64(rest)))
    }

    /// Builds the per-level table `(d_l, Δ_l, product_l)` in log space:
    ///
    /// * `log(1/d_l) = Σ_{k=1}^{l} [ -ln A + ln q'(R_{k-1}) + (1+1/M) ln R_{k-1} ]`,
    /// * `ln Δ_l = ln B - (2/M) ln R_l`,
    /// * `log_product = ln poly(d_l) + Σ_{k=1}^{l} ln Δ_k`.
    ///
    /// No value with a doubled exponent is ever materialised.
    pub fn mass_sequence(&self, gauge: &GaugeSpec, l_max: u32) -> Result<MassTable> {
        if gauge.n() != self.growth.n() {
            return Err(Error::domain(
                "gauge depth disagrees with the growth model depth",
            ));
        }
        if !(1..=40).contains(&l_max) {
            return Err(Error::domain("mass levels supported for 1 <= l_max <= 40"));
        }
        let m = self.m_power as f64;
        let ln_a = self.params.a_const.ln();
        let ln_b = self.params.b_const.ln();
        let mut t = LogDepthMagnitude::from_f64(0.0);
        let mut sum_log_delta = 0.0f64;
        let mut levels = Vec::with_capacity(l_max as usize);
        let mut prev_product: Option<f64> = None;
        let mut increments = Vec::new();
        for l in 1..=l_max {
            let ln_r_prev = self.params.log_schedule(l - 1);
            let lqp = self.growth.log_q_prime_from_log(ln_r_prev)?;
            let term = lqp.add(&LogDepthMagnitude::from_f64(
                (1.0 + 1.0 / m) * ln_r_prev - ln_a,
            ));
            t = t.add(&term);
            if l == 1 && t.value_cmp(&gauge.log_recip_delta()).is_lt() {
                return Err(Error::domain(format!(
                    "level-1 diameter exceeds the gauge domain bound; the schedule base \
                     R0 = {} is too small, it needs to be at least {:.6}",
                    self.params.r0,
                    self.required_r0(gauge)
                )));
            }
            let ln_r_l = self.params.log_schedule(l);
            let log_delta = ln_b - (2.0 / m) * ln_r_l;
            sum_log_delta += log_delta;
            let log_product = gauge.log_poly_factor_tower(&t)? + sum_log_delta;
            if let Some(prev) = prev_product {
                increments.push(log_product - prev);
            }
            prev_product = Some(log_product);
            let asym = tower::iter_log(self.growth.n(), &t)?
                / (self.growth.rho() * ln_r_prev);
            levels.push(MassLevel {
                l,
                log_radius: ln_r_l,
                log_inv_d_depth: t.depth(),
                log_inv_d_mantissa: t.mantissa(),
                log_delta,
                log_product,
                asymptotic_ratio: asym,
            });
        }
        let drift = self.growth.rho() * gauge.gamma() - 8.0 / m;
        let tail_sign_consistent = increments
            .last()
            .map(|inc| (*inc > 0.0) == (drift > 0.0))
            .unwrap_or(true);
        let final_sign = increments.last().map(|inc| *inc > 0.0);
        let monotone_from = final_sign.and_then(|sign| {
            let mut from = None;
            for (i, inc) in increments.iter().enumerate() {
                if (*inc > 0.0) == sign {
                    if from.is_none() {
                        from = Some(i as u32 + 2); // increment i is level i+1 -> i+2
                    }
                } else {
                    from = None;
                }
            }
            from
        });
        Ok(MassTable {
            gamma: gauge.gamma(),
            divergence_threshold: 8.0 / (m * self.growth.rho()),
            drift,
            levels,
            tail_sign_consistent,
            monotone_from,
        })
    }

    /// Euclidean density of the inner pole disks `D(a_j, |b_j|/(4R^{1/M}))`
    /// inside `A(S) = {S < |z| < 2S}`, with poles drawn from the shrunken
    /// annulus `A_ε(S) = {(1+ε)S < |z| < 2(1-ε)S}` so every counted disk
    /// lies wholly inside `A(S)`.
    pub fn annulus_density(&self, s: f64, eps: f64) -> Result<AnnulusDensity> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::domain("annulus scale must be positive"));
        }
        if !(eps > 0.0 && eps < 0.25) {
            return Err(Error::domain("eps must lie in (0, 1/4)"));
        }
        let denom = 4.0 * (1.0 - eps).powi(2) - (1.0 + eps).powi(2);
        let one_plus_delta = 3.0 / denom;
        let k_first = self.growth.k0() + 1;
        let lo = self.growth.ring_count((1.0 + eps) * s)?.max(k_first - 1) + 1;
        let hi = self.growth.ring_count(2.0 * (1.0 - eps) * s)?;
        if hi < lo {
            return Err(Error::domain(format!(
                "no pole ring intersects the shrunken annulus at S = {s}"
            )));
        }
        let m = self.m_power as f64;
        let r = self.params.r0;
        let r_root = r.powf(1.0 / m);
        let mut disk_area = 0.0f64;
        let mut disk_count: u128 = 0;
        for k in lo..=hi {
            let p = self.growth.p(k)?;
            let nk = self.growth.n_index(k)?;
            let radius = p / (nk as f64 * 4.0 * r_root);
            if p - radius <= s || p + radius >= 2.0 * s {
                return Err(Error::domain(format!(
                    "inner disk of ring {k} leaks out of the annulus; eps too small"
                )));
            }
            disk_area += 2.0 * nk as f64 * radius * radius; // pi cancels
            disk_count += 2 * nk as u128;
        }
        let euclidean = disk_area / (3.0 * s * s);
        let lower_bound =
            1.0 / (16.0 * one_plus_delta * self.params.tau.powi(2) * r.powf(2.0 / m));
        let conv = ((1.0 + s * s) / (1.0 + 4.0 * s * s)).powi(2);
        // Residue-square ceiling over every ring up to the outer radius.
        let b_hi = self.growth.ring_count(2.0 * s)?;
        let mut b_sq_sum = 0.0f64;
        for k in k_first..=b_hi {
            let p = self.growth.p(k)?;
            let nk = self.growth.n_index(k)? as f64;
            b_sq_sum += 2.0 * p * p / nk;
        }
        Ok(AnnulusDensity {
            s,
            eps,
            one_plus_delta,
            ring_lo: lo,
            ring_hi: hi,
            disk_count,
            euclidean,
            lower_bound,
            chordal_lower_bound: euclidean * conv,
            b_sq_sum,
            b_sq_bound: 36.0 * r * r * (2.0 * s) * (2.0 * s),
        })
    }
}
