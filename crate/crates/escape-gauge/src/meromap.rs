//! An explicit meromorphic function with tower growth.
//!
//! The function is a lacunary sum over the ring scaffolding of
//! [`GrowthModel`]: with `w = z / p(k)` and ring multiplicity `n_k`,
//!
//! ```text
//! g(z) = 2 * sum_{k >= k0+1} w^{n_k} / (w^{2 n_k} - 1),
//! ```
//!
//! which has `2 n_k` simple poles on each circle `|z| = p(k)` and nothing
//! else. The iterated map is `f = g^M`. Because `n_k` increases strictly,
//! truncating the sum at ring `k_max` is accurate to `2^(3 - n_{k_max+1})`
//! for `|z| <= p(k_max)/2`; the constructor refuses truncations whose bound
//! exceeds a quarter of the configured tail tolerance, and evaluation
//! refuses points outside the certified disc.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::growth::GrowthModel;

/// One pole `u = p(k) e^{i pi l / n_k}` with its residue (for the inner sum
/// `g`; as a pole of `f = g^M` it has multiplicity `M`).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PoleDatum {
    pub k: u64,
    pub l: u64,
    pub location: Complex64,
    /// Residue of `g`: `(p(k)/n_k) e^{i pi l (1 - n_k)/n_k}`, evaluated in
    /// the reduced form `(-1)^l (p(k)/n_k) e^{i pi l/n_k}` which avoids
    /// large-angle trigonometry.
    pub residue: Complex64,
    /// Multiplicity as a pole of `f = g^M`.
    pub multiplicity_f: u32,
    /// Ring multiplicity `n_k` (half the number of poles on the ring).
    pub n_k: u64,
}

/// Agreement between the closed-form residue and a shrinking-circle average
/// of `(z - u) g(z)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResidueProbe {
    pub k: u64,
    pub l: u64,
    pub analytic: Complex64,
    pub numeric: Complex64,
    pub abs_err: f64,
}

/// Endpoint classification of one orbit under `z -> g(z)^M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OrbitStatus {
    /// Modulus exceeded the last schedule radius at this step;
    /// `radius_index` is the schedule position the orbit had reached.
    Escaped { step: u32, radius_index: u32 },
    /// Still below the final radius after the full budget.
    BoundedAfter { max_iter: u32 },
    /// Iterate `step` is within collision tolerance of a pole (step 0 means
    /// the starting point). Poles are prepoles of infinity, so downstream
    /// consumers treat this as escape at `step + 1`.
    HitPole { step: u32 },
    /// The truncation tail could flip a comparison, or the iterate left the
    /// certified disc while still below the final radius.
    TruncationUnsafe { step: u32 },
}

/// One orbit: starting point, the visited iterates, and how it ended.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitRecord {
    pub start: Complex64,
    pub iterates: Vec<Complex64>,
    pub status: OrbitStatus,
}

/// Sampling plan for the spider's-web skeleton.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WebSpec {
    /// Rings `m` to visit; each contributes the circle `|z| = p(m + 1/2)`
    /// and rays between consecutive poles of ring `m`.
    pub m_lo: u64,
    pub m_hi: u64,
    pub samples_per_circle: u32,
    pub samples_per_segment: u32,
    /// Ray angles per ring: one fixed at `eta = 1`, the rest seeded.
    pub rays_per_ring: u32,
    pub seed: u64,
}

/// Modulus statistics over the sampled web.
#[derive(Debug, Clone, Serialize)]
pub struct WebReport {
    pub separation_c: f64,
    /// `C = sum_{k>=1} 1/(e^{ck}-1) + sum_{j>=0} 1/(e^{c(j+1/2)}-1)`.
    pub constant: f64,
    /// `4C + 4` plus the truncation tail allowance.
    pub theoretical_bound: f64,
    pub tail_allowance: f64,
    pub sup_sampled: f64,
    pub sup_radius: f64,
    pub sup_angle: f64,
    /// Largest modulus of ring `m`'s own term over that ring's ray samples;
    /// on the rays the term is `2x/(x^2+1)`-shaped and stays below 2 (the
    /// "+2" slot of the certified bound).
    pub mid_term_sup: f64,
    pub circle_sups: Vec<CircleSup>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CircleSup {
    pub m: u64,
    pub radius: f64,
    pub sup: f64,
}

#[derive(Debug, Clone, Copy)]
struct Ring {
    k: u64,
    radius: f64,
    nk: u32,
    /// `p'(k)`; the pole spacing on the ring is ~ `pi * p'(k)`.
    dp: f64,
}

/// Truncated evaluator for `g`, `g'`, `f = g^M`, and orbit iteration.
#[derive(Debug, Clone)]
pub struct Meromap {
    growth: GrowthModel,
    m_power: u32,
    k_max: u64,
    tail_tolerance: f64,
    rings: Vec<Ring>,
    /// `log2` of the certified truncation error of the `g`-sum.
    tail_log2: f64,
    /// `p(k_max)/2`: the disc on which the truncation bound holds.
    certified_radius: f64,
}

/// Pole-collision tolerance: points closer to a pole than
/// `1e-9 * pi * p'(k)` (a billionth of the local pole spacing) are hits.
const POLE_TOL_FACTOR: f64 = 1e-9 * std::f64::consts::PI;

impl Meromap {
    /// Builds the truncated evaluator. Fails when the certified tail bound
    /// `2^(3 - n_{k_max+1})` is not below a quarter of `tail_tolerance`,
    /// or when the multiplicities fail to increase strictly (which would
    /// invalidate the geometric tail majorization).
    pub fn new(
        growth: GrowthModel,
        m_power: u32,
        k_max: u64,
        tail_tolerance: f64,
    ) -> Result<Self> {
        if m_power == 0 {
            return Err(Error::domain("outer power must be at least 1"));
        }
        if !(tail_tolerance > 0.0) {
            return Err(Error::domain("tail tolerance must be positive"));
        }
        let k_first = growth.k0() + 1;
        if k_max < k_first + 1 {
            return Err(Error::domain(format!(
                "truncation ring {k_max} leaves no usable scaffolding (first ring {k_first})"
            )));
        }
        let mut rings = Vec::with_capacity((k_max - k_first + 1) as usize);
        let mut prev_nk = 0u64;
        for k in k_first..=k_max + 1 {
            let nk = growth.n_index(k)?;
            if k > k_first && nk <= prev_nk {
                return Err(Error::TruncationUnsafe(format!(
                    "ring multiplicities stall at k={k} (n_k={nk} after {prev_nk}); \
                     the geometric tail bound needs them strictly increasing"
                )));
            }
            prev_nk = nk;
            if nk > u32::MAX as u64 / 2 {
                return Err(Error::InsufficientRange(format!(
                    "ring multiplicity {nk} at k={k} exceeds the integer-power range"
                )));
            }
            if k <= k_max {
                rings.push(Ring {
                    k,
                    radius: growth.p(k)?,
                    nk: nk as u32,
                    dp: growth.p_prime(k as f64)?,
                });
            }
        }
        let tail_log2 = 3.0 - prev_nk as f64; // prev_nk = n_{k_max+1}
        if tail_log2.exp2() >= tail_tolerance / 4.0 {
            return Err(Error::TruncationUnsafe(format!(
                "truncation at ring {k_max} certifies only 2^{tail_log2}, \
                 not under a quarter of the tolerance {tail_tolerance}"
            )));
        }
        let certified_radius = rings.last().expect("nonempty").radius / 2.0;
        Ok(Meromap {
            growth,
            m_power,
            k_max,
            tail_tolerance,
            rings,
            tail_log2,
            certified_radius,
        })
    }

    pub fn growth(&self) -> &GrowthModel {
        &self.growth
    }

    pub fn m_power(&self) -> u32 {
        self.m_power
    }

    pub fn k_max(&self) -> u64 {
        self.k_max
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    /// Radius of the disc on which the truncation bound is certified.
    pub fn certified_radius(&self) -> f64 {
        self.certified_radius
    }

    /// `log2` of the certified truncation error of the `g`-sum.
    pub fn tail_log2(&self) -> f64 {
        self.tail_log2
    }

    /// Certified truncation error of the `g`-sum (underflows to zero for
    /// deep truncations, where it is genuinely below double resolution).
    pub fn g_tail_bound(&self) -> f64 {
        self.tail_log2.exp2()
    }

    /// Truncation error transported through the outer power:
    /// `(|g| + tau)^M - |g|^M`.
    pub fn f_tail_bound(&self, g_abs: f64) -> f64 {
        let tau = self.g_tail_bound();
        (g_abs + tau).powi(self.m_power as i32) - g_abs.powi(self.m_power as i32)
    }

    fn require_inside(&self, z: Complex64) -> Result<()> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::domain("evaluation point must be finite"));
        }
        if z.norm() > self.certified_radius {
            return Err(Error::TruncationUnsafe(format!(
                "|z| = {} exceeds the certified truncation radius {}",
                z.norm(),
                self.certified_radius
            )));
        }
        Ok(())
    }

    /// Distance check against the nearest pole; errors within tolerance.
    fn check_pole_proximity(&self, z: Complex64) -> Result<()> {
        let r = z.norm();
        // Rings are sorted by radius; the tolerance bands are microscopic,
        // so only neighbours of the insertion point can contain z.
        let idx = self
            .rings
            .partition_point(|ring| ring.radius < r)
            .min(self.rings.len() - 1);
        for ring in self.rings[idx.saturating_sub(1)..(idx + 2).min(self.rings.len())].iter() {
            let tol = POLE_TOL_FACTOR * ring.dp;
            if (r - ring.radius).abs() >= tol {
                continue;
            }
            let theta = z.im.atan2(z.re);
            let sector = std::f64::consts::PI / ring.nk as f64;
            let l = (theta / sector).round();
            let pole = Complex64::from_polar(ring.radius, l * sector);
            let dist = (z - pole).norm();
            if dist < tol {
                let l_norm = (l as i64).rem_euclid(2 * ring.nk as i64) as u64;
                return Err(Error::PoleProximity {
                    k: ring.k,
                    l: l_norm,
                    dist,
                    tol,
                });
            }
        }
        Ok(())
    }

    /// One ring's contribution to `g` (without the overall factor 2).
    #[inline]
    fn ring_term(ring: &Ring, z: Complex64) -> Complex64 {
        let w = z / ring.radius;
        if w.norm_sqr() <= 1.0 {
            let wn = w.powu(ring.nk);
            let w2n = wn * wn;
            wn / (w2n - 1.0)
        } else {
            // v = 1/w, |v| < 1: the same term rewritten to avoid overflow.
            let v = w.inv();
            let vn = v.powu(ring.nk);
            let v2n = vn * vn;
            vn / (1.0 - v2n)
        }
    }

    /// One ring's contribution to `g'` (without the overall factor 2).
    #[inline]
    fn ring_term_prime(ring: &Ring, z: Complex64) -> Complex64 {
        let w = z / ring.radius;
        let nk = ring.nk as f64;
        if w.norm_sqr() <= 1.0 {
            let wn1 = w.powu(ring.nk - 1);
            let wn = wn1 * w;
            let w2n = wn * wn;
            let d = w2n - 1.0;
            -(nk / ring.radius) * wn1 * (w2n + 1.0) / (d * d)
        } else {
            let v = w.inv();
            let vn1 = v.powu(ring.nk + 1);
            let v2n = v.powu(2 * ring.nk);
            let d = 1.0 - v2n;
            -(nk / ring.radius) * vn1 * (1.0 + v2n) / (d * d)
        }
    }

    pub fn eval_g(&self, z: Complex64) -> Result<Complex64> {
        self.require_inside(z)?;
        self.check_pole_proximity(z)?;
        let mut s = Complex64::new(0.0, 0.0);
        for ring in &self.rings {
            s += Self::ring_term(ring, z);
        }
        Ok(2.0 * s)
    }

    pub fn eval_g_prime(&self, z: Complex64) -> Result<Complex64> {
        self.require_inside(z)?;
        self.check_pole_proximity(z)?;
        let mut s = Complex64::new(0.0, 0.0);
        for ring in &self.rings {
            s += Self::ring_term_prime(ring, z);
        }
        Ok(2.0 * s)
    }

    /// `f(z) = g(z)^M`.
    pub fn eval_f(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_g(z)?.powu(self.m_power))
    }

    /// `f'(z) = M g(z)^{M-1} g'(z)`.
    pub fn eval_f_prime(&self, z: Complex64) -> Result<Complex64> {
        let g = self.eval_g(z)?;
        let gp = self.eval_g_prime(z)?;
        Ok(self.m_power as f64 * g.powu(self.m_power - 1) * gp)
    }

    fn ring_by_k(&self, k: u64) -> Result<&Ring> {
        self.rings.iter().find(|r| r.k == k).ok_or_else(|| {
            Error::domain(format!(
                "ring {k} is outside the materialised range {}..={}",
                self.growth.k0() + 1,
                self.k_max
            ))
        })
    }

    /// The pole `u_{k,l} = p(k) e^{i pi l / n_k}` with its residue.
    pub fn pole(&self, k: u64, l: u64) -> Result<PoleDatum> {
        let ring = self.ring_by_k(k)?;
        let two_nk = 2 * ring.nk as u64;
        if l >= two_nk {
            return Err(Error::domain(format!(
                "pole index {l} out of range; ring {k} carries {two_nk} poles"
            )));
        }
        let angle = std::f64::consts::PI * l as f64 / ring.nk as f64;
        let location = Complex64::from_polar(ring.radius, angle);
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        let residue = sign * ring.radius / ring.nk as f64 * Complex64::from_polar(1.0, angle);
        Ok(PoleDatum {
            k,
            l,
            location,
            residue,
            multiplicity_f: self.m_power,
            n_k: ring.nk as u64,
        })
    }

    /// All `2 n_k` poles of ring `k`, ordered by angle.
    pub fn poles_on_ring(&self, k: u64) -> Result<Vec<PoleDatum>> {
        let ring = self.ring_by_k(k)?;
        (0..2 * ring.nk as u64).map(|l| self.pole(k, l)).collect()
    }

    /// All poles with `k0+1 <= k <= k_hi`, sorted by modulus then angle.
    pub fn poles_up_to(&self, k_hi: u64) -> Result<Vec<PoleDatum>> {
        if k_hi > self.k_max {
            return Err(Error::domain(format!(
                "pole listing up to ring {k_hi} exceeds the truncation ring {}",
                self.k_max
            )));
        }
        let mut out = Vec::new();
        for k in self.growth.k0() + 1..=k_hi {
            out.extend(self.poles_on_ring(k)?);
        }
        Ok(out)
    }

    /// Averages `(z - u) g(z)` over `n_points` uniform angles on the circle
    /// of radius `1e-6 p'(k)` around the pole and compares with the closed
    /// form; analytic contributions cancel to `O(radius^n_points)`.
    pub fn residue_probe(&self, k: u64, l: u64, n_points: u32) -> Result<ResidueProbe> {
        if n_points < 4 {
            return Err(Error::domain("contour probe needs at least 4 points"));
        }
        let datum = self.pole(k, l)?;
        let ring = self.ring_by_k(k)?;
        let eps = 1e-6 * ring.dp;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n_points {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n_points as f64;
            let offset = Complex64::from_polar(eps, theta);
            acc += self.eval_g(datum.location + offset)? * offset;
        }
        let numeric = acc / n_points as f64;
        Ok(ResidueProbe {
            k,
            l,
            analytic: datum.residue,
            numeric,
            abs_err: (numeric - datum.residue).norm(),
        })
    }

    /// `C = sum_{k>=1} 1/(e^{ck}-1) + sum_{j>=0} 1/(e^{c(j+1/2)}-1)`, summed
    /// to an absolute tail below 1e-10 (the iteration stops three orders of
    /// magnitude later than that).
    pub fn web_constant(&self) -> f64 {
        let c = self.growth.separation_constant();
        let mut total = 0.0;
        for k in 1..1_000_000u64 {
            let t = 1.0 / ((c * k as f64).exp() - 1.0);
            total += t;
            if t < 1e-14 {
                break;
            }
        }
        for j in 0..1_000_000u64 {
            let t = 1.0 / ((c * (j as f64 + 0.5)).exp() - 1.0);
            total += t;
            if t < 1e-14 {
                break;
            }
        }
        total
    }

    /// Samples `|g|` over the web skeleton: circles `|z| = p(m + 1/2)` and,
    /// per ring, rays at angles `pi (2 eta - 1) / (2 n_m)` spanning radii
    /// `[p(m - 1/2), p(m + 1/2)]`. The sampled sup can only under-estimate
    /// the true sup, so `sup_sampled <= theoretical_bound` is a one-sided
    /// check.
    pub fn web_sup(&self, spec: &WebSpec) -> Result<WebReport> {
        if spec.m_lo <= self.growth.k0() || spec.m_hi < spec.m_lo || spec.m_hi >= self.k_max {
            return Err(Error::domain(format!(
                "web rings must satisfy {} < m_lo <= m_hi < k_max = {}",
                self.growth.k0(),
                self.k_max
            )));
        }
        if spec.samples_per_circle < 8 || spec.samples_per_segment < 2 {
            return Err(Error::domain("web sampling grid too coarse"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let mut sup = f64::NEG_INFINITY;
        let mut sup_at = (0.0f64, 0.0f64);
        let mut mid_term_sup = f64::NEG_INFINITY;
        let mut circle_sups = Vec::new();
        for m in spec.m_lo..=spec.m_hi {
            let ring = *self.ring_by_k(m)?;
            let r_mid = self.growth.half_step_radius(m)?;
            let mut circle_sup = f64::NEG_INFINITY;
            for j in 0..spec.samples_per_circle {
                let theta =
                    2.0 * std::f64::consts::PI * j as f64 / spec.samples_per_circle as f64;
                let z = Complex64::from_polar(r_mid, theta);
                let v = self.eval_g(z)?.norm();
                circle_sup = circle_sup.max(v);
                if v > sup {
                    sup = v;
                    sup_at = (r_mid, theta);
                }
            }
            circle_sups.push(CircleSup {
                m,
                radius: r_mid,
                sup: circle_sup,
            });
            // Rays between consecutive poles of ring m, crossing the ring.
            let two_nm = 2 * ring.nk as u64;
            let r_in = self.growth.half_step_radius(m - 1)?;
            let mut etas = vec![1u64];
            for _ in 1..spec.rays_per_ring.max(1) {
                etas.push(1 + rng.gen_range(0..two_nm));
            }
            for eta in etas {
                let theta =
                    std::f64::consts::PI * (2 * eta - 1) as f64 / (2.0 * ring.nk as f64);
                for j in 0..=spec.samples_per_segment {
                    let t = j as f64 / spec.samples_per_segment as f64;
                    let r = r_in + t * (r_mid - r_in);
                    let z = Complex64::from_polar(r, theta);
                    let v = self.eval_g(z)?.norm();
                    if v > sup {
                        sup = v;
                        sup_at = (r, theta);
                    }
                    mid_term_sup = mid_term_sup.max(2.0 * Self::ring_term(&ring, z).norm());
                }
            }
        }
        let constant = self.web_constant();
        let tail_allowance = self.g_tail_bound();
        Ok(WebReport {
            separation_c: self.growth.separation_constant(),
            constant,
            theoretical_bound: 4.0 * constant + 4.0 + tail_allowance,
            tail_allowance,
            sup_sampled: sup,
            sup_radius: sup_at.0,
            sup_angle: sup_at.1,
            mid_term_sup,
            circle_sups,
        })
    }

    /// Iterates `z -> g(z)^M` against a nondecreasing radius schedule.
    /// Escape means exceeding the final radius; `radius_index` records how
    /// far along the schedule the orbit was. A comparison that the certified
    /// tail could flip yields `TruncationUnsafe` instead of a verdict.
    pub fn orbit(&self, z0: Complex64, radii: &[f64], max_iter: u32) -> OrbitRecord {
        self.orbit_impl(z0, radii, max_iter, false)
    }

    /// As [`orbit`](Self::orbit), recording the visited iterates.
    pub fn orbit_recorded(&self, z0: Complex64, radii: &[f64], max_iter: u32) -> OrbitRecord {
        self.orbit_impl(z0, radii, max_iter, true)
    }

    fn orbit_impl(
        &self,
        z0: Complex64,
        radii: &[f64],
        max_iter: u32,
        record: bool,
    ) -> OrbitRecord {
        assert!(
            !radii.is_empty() && radii.windows(2).all(|w| w[0] <= w[1]) && max_iter >= 1,
            "orbit needs a nondecreasing, nonempty radius schedule and max_iter >= 1"
        );
        let final_radius = *radii.last().expect("nonempty");
        let mut iterates = Vec::new();
        let mut z = z0;
        let mut status = OrbitStatus::BoundedAfter { max_iter };
        for step in 0..=max_iter {
            if record {
                iterates.push(z);
            }
            let r = z.norm();
            let radius_index = (step as usize).min(radii.len() - 1) as u32;
            if !r.is_finite() || r > final_radius {
                status = OrbitStatus::Escaped { step, radius_index };
                break;
            }
            if step == max_iter {
                break;
            }
            z = match self.eval_f(z) {
                Ok(v) => {
                    // Refuse the escape comparison if the certified tail
                    // could flip it.
                    let g_abs = v.norm().powf(1.0 / self.m_power as f64);
                    let slack = self.f_tail_bound(g_abs);
                    if (v.norm() - final_radius).abs() <= slack {
                        status = OrbitStatus::TruncationUnsafe { step: step + 1 };
                        break;
                    }
                    v
                }
                Err(Error::PoleProximity { .. }) => {
                    status = OrbitStatus::HitPole { step };
                    break;
                }
                Err(_) => {
                    status = OrbitStatus::TruncationUnsafe { step };
                    break;
                }
            };
        }
        OrbitRecord {
            start: z0,
            iterates,
            status,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::GrowthModel;

    fn map(k_max: u64) -> Meromap {
        let growth = GrowthModel::new(1, 1.0).unwrap();
        Meromap::new(growth, 1, k_max, 1e-9).unwrap()
    }

    #[test]
    fn construction_guards() {
        let growth = GrowthModel::new(1, 1.0).unwrap();
        assert!(Meromap::new(growth, 0, 50, 1e-9).is_err());
        assert!(Meromap::new(growth, 1, 9, 1e-9).is_err());
        // k_max = 10 certifies 2^-24, too coarse for a 1e-9 tolerance…
        assert!(matches!(
            Meromap::new(growth, 1, 10, 1e-9),
            Err(Error::TruncationUnsafe(_))
        ));
        // …but fine for a 1e-4 one.
        assert!(Meromap::new(growth, 1, 10, 1e-4).is_ok());
        // Multiplicities stall for very small rho: floor(0.25 k ln k) repeats.
        let slow = GrowthModel::new(1, 0.25).unwrap();
        assert!(matches!(
            Meromap::new(slow, 1, 50, 1e-1),
            Err(Error::TruncationUnsafe(_))
        ));
    }

    #[test]
    fn value_oracle_and_truncation_stability() {
        let z = Complex64::new(1.0, 0.5);
        let v50 = map(50).eval_g(z).unwrap();
        // Independently computed with 40-digit arithmetic.
        let oracle = Complex64::new(4.3804981828301645e-6, -2.9554268741328322e-6);
        assert!((v50 - oracle).norm() < 1e-19);
        // Adding 250 more rings moves nothing: the tail is below 2^-197.
        let v300 = map(300).eval_g(z).unwrap();
        assert!((v50 - v300).norm() < 1e-19);
    }

    #[test]
    fn origin_vanishes_and_real_axis_value() {
        let m = map(300);
        assert_eq!(m.eval_g(Complex64::new(0.0, 0.0)).unwrap().norm(), 0.0);
        let v = m.eval_g(Complex64::new(2.0, 0.0)).unwrap();
        assert!((v.re - -0.44525289563983147).abs() < 1e-14);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn tail_bound_is_sound_between_truncations() {
        // k_max = 9 certifies 2^-20; adding rings 10..14 must stay within it.
        let growth = GrowthModel::new(1, 1.0).unwrap();
        let short = Meromap::new(growth, 1, 10, 1e-4).unwrap();
        let longer = Meromap::new(growth, 1, 15, 1e-4).unwrap();
        let z = Complex64::new(1.0, 0.3);
        let d = (short.eval_g(z).unwrap() - longer.eval_g(z).unwrap()).norm();
        assert!(d <= short.g_tail_bound(), "diff {d} above {}", short.g_tail_bound());
    }

    #[test]
    fn conjugation_symmetry() {
        let m = map(300);
        for z in [
            Complex64::new(1.2, 0.7),
            Complex64::new(-0.8, 1.9),
            Complex64::new(0.3, -1.4),
        ] {
            let a = m.eval_g(z.conj()).unwrap();
            let b = m.eval_g(z).unwrap().conj();
            assert!((a - b).norm() < 1e-15);
            let ap = m.eval_g_prime(z.conj()).unwrap();
            let bp = m.eval_g_prime(z).unwrap().conj();
            assert!((ap - bp).norm() < 1e-12);
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let m = map(300);
        for z in [Complex64::new(1.0, 0.5), Complex64::new(2.2, -1.1)] {
            let h = 1e-6;
            let fd = (m.eval_g(z + h).unwrap() - m.eval_g(z - h).unwrap()) / (2.0 * h);
            let an = m.eval_g_prime(z).unwrap();
            assert!(
                (fd - an).norm() <= 1e-6 * an.norm().max(1e-9),
                "derivative mismatch at {z}: fd={fd}, analytic={an}"
            );
        }
    }

    #[test]
    fn pole_positions_and_residues() {
        let m = map(420);
        let poles = m.poles_on_ring(9).unwrap();
        assert_eq!(poles.len(), 38); // 2 * n_9 = 2 * 19
        let p0 = &poles[0];
        assert!((p0.location.re - 9f64.ln()).abs() < 1e-15);
        assert_eq!(p0.location.im, 0.0);
        assert!((p0.residue.re - 0.11564339880716944).abs() < 1e-15);
        // u_{k, n_k} = -p(k).
        let mid = &poles[19];
        assert!((mid.location.re + 9f64.ln()).abs() < 1e-12);
        assert!(mid.location.im.abs() < 1e-12);
        // Odd l flips the residue sign relative to the ray direction.
        assert!((poles[1].residue + poles[1].location / 19.0).norm() < 1e-15);
        // Global listing: sorted by modulus then angle, correct cardinality.
        let up_to_11 = m.poles_up_to(11).unwrap();
        let expected: u64 = [9u64, 10, 11]
            .iter()
            .map(|&k| 2 * m.growth().n_index(k).unwrap())
            .sum();
        assert_eq!(up_to_11.len() as u64, expected);
        assert!(up_to_11
            .windows(2)
            .all(|w| w[0].location.norm() <= w[1].location.norm() + 1e-12));
    }

    #[test]
    fn residue_circle_average_agrees() {
        let m = map(420);
        for (k, l) in [(9u64, 0u64), (9, 7), (12, 3), (20, 30)] {
            let probe = m.residue_probe(k, l, 16).unwrap();
            assert!(
                probe.abs_err < 1e-6 * probe.analytic.norm(),
                "contour probe off at ({k},{l}): rel err {}",
                probe.abs_err / probe.analytic.norm()
            );
        }
    }

    #[test]
    fn pole_proximity_is_detected() {
        let m = map(420);
        let u = m.pole(9, 0).unwrap().location;
        let hit = m.eval_g(u + Complex64::new(1e-13, 0.0));
        assert!(matches!(hit, Err(Error::PoleProximity { k: 9, l: 0, .. })));
        assert!(m.eval_g(u + Complex64::new(0.01, 0.01)).is_ok());
    }

    #[test]
    fn evaluation_outside_certified_disc_is_refused() {
        let m = map(50); // certified radius p(50)/2 = 1.956
        assert!(matches!(
            m.eval_g(Complex64::new(2.5, 0.0)),
            Err(Error::TruncationUnsafe(_))
        ));
    }

    #[test]
    fn outer_power_composes() {
        let growth = GrowthModel::new(1, 1.0).unwrap();
        let m2 = Meromap::new(growth, 2, 50, 1e-9).unwrap();
        let z = Complex64::new(1.0, 0.5);
        let g = m2.eval_g(z).unwrap();
        assert!((m2.eval_f(z).unwrap() - g * g).norm() < 1e-18);
        let fp = m2.eval_f_prime(z).unwrap();
        let expected = 2.0 * g * m2.eval_g_prime(z).unwrap();
        assert!((fp - expected).norm() < 1e-18);
        // f >= 0 on the real axis for even M (g is real there).
        let fr = m2.eval_f(Complex64::new(1.7, 0.0)).unwrap();
        assert!(fr.re >= 0.0 && fr.im == 0.0);
        // Tail through the square: (x + t)^2 - x^2 = 2xt + t^2, at the
        // shortest truncation so the tail (2^-23) is visible in doubles.
        let tiny = Meromap::new(growth, 2, 10, 1e-4).unwrap();
        let t = tiny.g_tail_bound();
        assert!((t - (-23f64).exp2()).abs() < 1e-300);
        let x = 1.5;
        let expected_tail = 2.0 * x * t + t * t;
        assert!((tiny.f_tail_bound(x) - expected_tail).abs() < 1e-12 * expected_tail);
    }

    #[test]
    fn web_constant_and_bound() {
        let m = map(300);
        let c = m.web_constant();
        assert!((c - 22.6991103006).abs() < 1e-6);
        let spec = WebSpec {
            m_lo: 10,
            m_hi: 13,
            samples_per_circle: 64,
            samples_per_segment: 16,
            rays_per_ring: 3,
            seed: 7,
        };
        let report = m.web_sup(&spec).unwrap();
        assert!((report.theoretical_bound - 94.7964412025).abs() < 1e-6);
        assert!(report.sup_sampled < report.theoretical_bound);
        // The certified bound is far from tight on these rings.
        assert!(report.sup_sampled < report.theoretical_bound / 4.0);
        assert!(report.mid_term_sup <= 2.0);
        assert_eq!(report.circle_sups.len(), 4);
    }

    #[test]
    fn orbits_are_classified() {
        let m = map(300); // certified radius p(300)/2 = 2.851
        let radii = [2.0f64, 2.8];
        // The origin is a fixed point: g(0) = 0.
        assert_eq!(
            m.orbit(Complex64::new(0.0, 0.0), &radii, 40).status,
            OrbitStatus::BoundedAfter { max_iter: 40 }
        );
        // Starting outside the final radius counts as escaped at step 0.
        assert_eq!(
            m.orbit(Complex64::new(5.0, 0.0), &radii, 40).status,
            OrbitStatus::Escaped { step: 0, radius_index: 0 }
        );
        // A start within collision tolerance of a pole is a hit at step 0.
        let u = m.pole(9, 0).unwrap().location;
        assert_eq!(
            m.orbit(u + Complex64::new(1e-13, 0.0), &radii, 40).status,
            OrbitStatus::HitPole { step: 0 }
        );
        // Near (but not numerically at) a pole, the Laurent term launches
        // the orbit beyond any reasonable radius in one step.
        let rec = m.orbit(u + Complex64::new(1e-8, 0.0), &radii, 40);
        assert_eq!(rec.status, OrbitStatus::Escaped { step: 1, radius_index: 1 });
        // Determinism, and the iterate log length contract.
        let z = Complex64::new(1.7, 0.9);
        let a = m.orbit_recorded(z, &radii, 60);
        let b = m.orbit_recorded(z, &radii, 60);
        assert_eq!(a.status, b.status);
        assert_eq!(a.iterates, b.iterates);
        assert!(a.iterates.len() <= 61);
    }
}
