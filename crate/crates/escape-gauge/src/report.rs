//! Report builders behind the command-line front end: every artifact is a
//! deterministic function of (scenario, seed), rendered as JSON, CSV, or a
//! plain-text PGM raster, and every one embeds the scenario, the two gauge
//! thresholds, and the input content hash.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::counting;
use crate::cover::CoverModel;
use crate::error::{Error, Result};
use crate::meromap::{OrbitStatus, WebSpec};
use crate::scenario::{GammaRegime, Scenario};

/// Common preamble of every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct ReportHeader {
    pub schema: u32,
    pub scenario: Scenario,
    /// `2/(M rho)`.
    pub zero_threshold: f64,
    /// `8/(M rho)`.
    pub infinity_threshold: f64,
    pub regime: GammaRegime,
    pub input_hash: String,
}

impl ReportHeader {
    pub fn new(s: &Scenario) -> Self {
        ReportHeader {
            schema: 1,
            scenario: s.clone(),
            zero_threshold: s.zero_threshold(),
            infinity_threshold: s.infinity_threshold(),
            regime: s.regime(),
            input_hash: s.content_hash(),
        }
    }

    /// The same preamble as `#` comment lines for CSV and PGM artifacts.
    pub fn comment_lines(&self) -> Vec<String> {
        let s = &self.scenario;
        vec![
            format!("# schema: {}", self.schema),
            format!(
                "# scenario: n={} rho={} M={} gamma={} k_max={} tail_policy={} R0={} lambda={} delta={} seed={}",
                s.n, s.rho, s.m, s.gamma, s.k_max, s.tail_policy, s.r0, s.lambda, s.delta, s.seed
            ),
            format!("# zero_threshold: {}", self.zero_threshold),
            format!("# infinity_threshold: {}", self.infinity_threshold),
            format!("# regime: {}", regime_name(self.regime)),
            format!("# input_hash: {}", self.input_hash),
        ]
    }
}

fn regime_name(r: GammaRegime) -> &'static str {
    match r {
        GammaRegime::ZeroMeasure => "zero_measure",
        GammaRegime::Undecided => "undecided",
        GammaRegime::InfiniteMeasure => "infinite_measure",
    }
}

/// Serializes any report as pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Thread cap from `ESCAPE_GAUGE_THREADS` (0 or unset = automatic).
pub fn thread_cap() -> usize {
    std::env::var("ESCAPE_GAUGE_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0)
}

// ---------------------------------------------------------------------------
// verify-lemmas

/// Worst margin of one inequality family over a sampled suite.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaSuite {
    pub name: &'static str,
    pub samples: u64,
    pub worst_margin: f64,
    /// Margins at least this value count as holding (roundoff allowance).
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub header: ReportHeader,
    pub suites: Vec<LemmaSuite>,
    pub failures: Vec<&'static str>,
    pub pass: bool,
}

const MARGIN_TOL: f64 = -1e-12;

/// Runs the gauge comparison-lemma suites (scaling, superadditivity,
/// product, concavity) on seeded random inputs and the ring separation
/// margins on a pair grid.
pub fn verify_lemmas(s: &Scenario, samples: u64, ring_span: u64) -> Result<LemmaReport> {
    let gauge = s.gauge()?;
    let growth = s.growth()?;
    let bound = gauge.log_recip_delta().to_f64();
    if !bound.is_finite() {
        return Err(Error::domain(
            "gauge domain boundary exceeds double range; lower n or gamma for \
             the sampled suites",
        ));
    }
    // The superadditivity/product hypotheses ask for t <= 1/exp^n(2), which
    // can sit above the gauge's own domain boundary (it does for gamma < 2).
    let base = bound.max(crate::tower::iter_exp(s.n - 1, 2.0).to_f64());
    if !base.is_finite() {
        return Err(Error::domain(
            "lemma hypothesis boundary exceeds double range at this depth",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let (mut w_scal, mut w_super, mut w_prod, mut w_conc) =
        (f64::INFINITY, f64::INFINITY, f64::INFINITY, f64::INFINITY);
    for _ in 0..samples {
        let c = 1.0 + 9.0 * rng.gen::<f64>(); // scaling factor in (1, 10]
        // Keep c t inside the gauge domain: ell - ln c must clear the bound.
        let ell = bound + c.ln() + 60.0 * rng.gen::<f64>();
        w_scal = w_scal.min(gauge.scaling_margin_log(ell, c)?.margin);

        let parts = 2 + (rng.gen::<u64>() % 3) as usize;
        let ells: Vec<f64> = (0..parts)
            .map(|_| base + 60.0 * rng.gen::<f64>())
            .collect();
        let report = gauge.inequality_margins(&ells, c)?;
        w_super = w_super.min(report.superadditivity.margin);
        w_prod = w_prod.min(report.product.margin);

        // Concavity of h(sqrt t) is claimed on (0, delta_n^2], i.e. for
        // log(1/t) at least twice the boundary.
        let ell2 = 2.0 * bound + 60.0 * rng.gen::<f64>();
        w_conc = w_conc.min(gauge.concavity_margin_log_recip(ell2)?.margin);
    }

    let k_first = growth.k0() + 1;
    let mut w_sep = f64::INFINITY;
    let mut pairs = 0u64;
    for k in k_first..=k_first + ring_span {
        for l in k_first..=k_first + ring_span {
            if k != l {
                w_sep = w_sep.min(growth.separation_margin(k, l)?);
                pairs += 1;
            }
        }
    }

    let suites = vec![
        suite("gauge_scaling", samples, w_scal, MARGIN_TOL),
        suite("gauge_superadditivity", samples, w_super, MARGIN_TOL),
        suite("gauge_product", samples, w_prod, MARGIN_TOL),
        suite("gauge_concavity", samples, w_conc, 0.0),
        suite("ring_separation", pairs, w_sep, MARGIN_TOL),
    ];
    let failures: Vec<_> = suites.iter().filter(|s| !s.pass).map(|s| s.name).collect();
    Ok(LemmaReport {
        header: ReportHeader::new(s),
        pass: failures.is_empty(),
        suites,
        failures,
    })
}

fn suite(name: &'static str, samples: u64, worst: f64, tol: f64) -> LemmaSuite {
    LemmaSuite {
        name,
        samples,
        worst_margin: worst,
        tolerance: tol,
        pass: worst >= tol,
    }
}

// ---------------------------------------------------------------------------
// poles

/// CSV pole/residue table over all rings of the configured map.
pub fn poles_csv(s: &Scenario) -> Result<String> {
    let map = s.map()?;
    let poles = map.poles_up_to(map.k_max())?;
    let mut out = String::new();
    for line in ReportHeader::new(s).comment_lines() {
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str("k,l,re_location,im_location,re_residue,im_residue,n_k\n");
    for p in poles {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.k, p.l, p.location.re, p.location.im, p.residue.re, p.residue.im, p.n_k
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// web

#[derive(Debug, Clone, Serialize)]
pub struct WebSummary {
    pub header: ReportHeader,
    pub m_lo: u64,
    pub m_hi: u64,
    pub separation_c: f64,
    pub constant: f64,
    pub four_c_plus_four: f64,
    pub tail_allowance: f64,
    pub theoretical_bound: f64,
    pub sup_sampled: f64,
    pub sup_radius: f64,
    pub sup_angle: f64,
    pub mid_term_sup: f64,
    pub pass: bool,
}

/// Samples the spider's web over rings `k0+2 .. k0+8` and compares the
/// sampled sup of `|g|` with the certified bound.
pub fn web_summary(s: &Scenario) -> Result<WebSummary> {
    let growth = s.growth()?;
    let m_lo = growth.k0() + 2;
    let m_hi = growth.k0() + 8;
    let outermost = growth.p_real(m_hi as f64 + 0.5)?;
    let map = s.map_certified_to(outermost)?;
    let spec = WebSpec {
        m_lo,
        m_hi,
        samples_per_circle: 96,
        samples_per_segment: 24,
        rays_per_ring: 3,
        seed: s.seed,
    };
    let web = map.web_sup(&spec)?;
    let pass = web.sup_sampled <= web.theoretical_bound && web.mid_term_sup <= 2.0;
    Ok(WebSummary {
        header: ReportHeader::new(s),
        m_lo,
        m_hi,
        separation_c: web.separation_c,
        constant: web.constant,
        four_c_plus_four: 4.0 * web.constant + 4.0,
        tail_allowance: web.tail_allowance,
        theoretical_bound: web.theoretical_bound,
        sup_sampled: web.sup_sampled,
        sup_radius: web.sup_radius,
        sup_angle: web.sup_angle,
        mid_term_sup: web.mid_term_sup,
        pass,
    })
}

// ---------------------------------------------------------------------------
// grid

#[derive(Debug, Clone, Copy)]
pub struct GridWindow {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub px: u32,
}

impl GridWindow {
    pub fn validate(&self) -> Result<()> {
        if !(self.re_min < self.re_max && self.im_min < self.im_max) {
            return Err(Error::domain("grid window must have positive extent"));
        }
        if self.px < 2 || self.px > 4096 {
            return Err(Error::domain("px must be in 2..=4096"));
        }
        Ok(())
    }

    fn corner_radius(&self) -> f64 {
        let re = self.re_min.abs().max(self.re_max.abs());
        let im = self.im_min.abs().max(self.im_max.abs());
        (re * re + im * im).sqrt()
    }
}

pub struct GridArtifacts {
    pub pgm: String,
    pub csv: String,
    /// Escape radius actually used (certified radius of the grown map).
    pub escape_radius: f64,
}

/// Escape-step raster over a rectangular window. Cell values: steps until
/// the orbit left the escape radius (pole hits count as immediate escapes),
/// clipped to 254; 255 means the orbit stayed bounded (or the truncation
/// became unsafe) within `max_iter`.
pub fn escape_grid(s: &Scenario, w: &GridWindow, max_iter: u32) -> Result<GridArtifacts> {
    w.validate()?;
    if max_iter == 0 {
        return Err(Error::domain("max_iter must be at least 1"));
    }
    let map = s.map_certified_to(w.corner_radius())?;
    let radius = map.certified_radius();
    let px = w.px as usize;
    let dx = (w.re_max - w.re_min) / w.px as f64;
    let dy = (w.im_max - w.im_min) / w.px as f64;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_cap())
        .build()
        .map_err(|e| Error::domain(format!("thread pool: {e}")))?;
    let rows: Vec<Vec<(u8, &'static str, u32)>> = pool.install(|| {
        (0..px)
            .into_par_iter()
            .map(|iy| {
                // Row 0 is the top of the image.
                let im = w.im_max - (iy as f64 + 0.5) * dy;
                (0..px)
                    .map(|ix| {
                        let re = w.re_min + (ix as f64 + 0.5) * dx;
                        let rec = map.orbit(Complex64::new(re, im), &[radius], max_iter);
                        match rec.status {
                            OrbitStatus::Escaped { step, .. } => {
                                (step.min(254) as u8, "escaped", step)
                            }
                            OrbitStatus::HitPole { step } => {
                                (step.min(254) as u8, "hit_pole", step)
                            }
                            OrbitStatus::BoundedAfter { max_iter } => {
                                (255u8, "bounded", max_iter)
                            }
                            OrbitStatus::TruncationUnsafe { step } => {
                                (255u8, "truncation_unsafe", step)
                            }
                        }
                    })
                    .collect()
            })
            .collect()
    });

    let header = ReportHeader::new(s);
    let mut pgm = String::from("P2\n");
    for line in header.comment_lines() {
        pgm.push_str(&line);
        pgm.push('\n');
    }
    pgm.push_str(&format!(
        "# window: re [{}, {}] im [{}, {}] escape_radius {} max_iter {}\n",
        w.re_min, w.re_max, w.im_min, w.im_max, radius, max_iter
    ));
    pgm.push_str(&format!("{} {}\n255\n", w.px, w.px));
    let mut csv = String::new();
    for line in header.comment_lines() {
        csv.push_str(&line);
        csv.push('\n');
    }
    csv.push_str(&format!("# escape_radius: {radius}\n"));
    csv.push_str("ix,iy,re,im,status,step,value\n");
    for (iy, row) in rows.iter().enumerate() {
        let mut first = true;
        for (ix, (value, status, step)) in row.iter().enumerate() {
            if !first {
                pgm.push(' ');
            }
            first = false;
            pgm.push_str(&format!("{value}"));
            let re = w.re_min + (ix as f64 + 0.5) * dx;
            let im = w.im_max - (iy as f64 + 0.5) * dy;
            csv.push_str(&format!("{ix},{iy},{re},{im},{status},{step},{value}\n"));
        }
        pgm.push('\n');
    }
    Ok(GridArtifacts {
        pgm,
        csv,
        escape_radius: radius,
    })
}

// ---------------------------------------------------------------------------
// sums

#[derive(Debug, Clone, Serialize)]
pub struct SumsReport {
    pub header: ReportHeader,
    pub key_series: crate::cover::KeySeriesLedger,
    pub mass_sequence: crate::cover::MassTable,
}

/// Key-series ledger and mass-sequence table for the configured gauge and
/// cover parameters.
pub fn sums_report(
    s: &Scenario,
    j_max: u64,
    l_bins: u32,
    ring_budget: u64,
    mass_levels: u32,
) -> Result<SumsReport> {
    let growth = s.growth()?;
    let gauge = s.gauge()?;
    let model = CoverModel::new(&growth, s.mass_params()?, s.m)?;
    let key_series = model.key_series(&gauge, j_max, l_bins, ring_budget)?;
    let mass_sequence = model.mass_sequence(&gauge, mass_levels)?;
    Ok(SumsReport {
        header: ReportHeader::new(s),
        key_series,
        mass_sequence,
    })
}

// ---------------------------------------------------------------------------
// count

/// Count table plus order estimate, as CSV with `#` footer lines.
pub fn count_csv(s: &Scenario, radii: &[f64], order_k: (u64, u64, u64)) -> Result<String> {
    let growth = s.growth()?;
    let mut out = String::new();
    for line in ReportHeader::new(s).comment_lines() {
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str("r,exact,asymptote_log,ratio\n");
    for &r in radii {
        let row = counting::count_report(&growth, r)?;
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.r, row.exact, row.asymptote_log, row.ratio
        ));
    }
    let (k_lo, k_hi, step) = order_k;
    if step == 0 || k_lo > k_hi {
        return Err(Error::domain("order window needs k_lo <= k_hi and step > 0"));
    }
    let samples: Vec<f64> = (k_lo..=k_hi)
        .step_by(step as usize)
        .map(|k| growth.half_step_radius(k))
        .collect::<Result<_>>()?;
    let est = counting::order_estimate(&growth, &samples)?;
    out.push_str(&format!("# order_slope: {}\n", est.slope));
    out.push_str(&format!("# order_samples: {}\n", est.samples_used));
    out.push_str(&format!(
        "# order_window_rings: {k_lo}..{k_hi} step {step}\n"
    ));
    out.push_str(&format!("# rho_configured: {}\n", s.rho));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_suites_all_pass_on_default_scenario() {
        let s = Scenario::default();
        let report = verify_lemmas(&s, 400, 40).unwrap();
        assert!(report.pass, "failures: {:?}", report.failures);
        assert_eq!(report.suites.len(), 5);
        assert!(report.failures.is_empty());
        assert_eq!(report.header.schema, 1);
        // Determinism: same scenario, same bytes.
        let again = verify_lemmas(&s, 400, 40).unwrap();
        assert_eq!(to_json(&report), to_json(&again));
        // Different seed, different sampled margins (same verdict).
        let other = verify_lemmas(
            &Scenario {
                seed: 8,
                ..Scenario::default()
            },
            400,
            40,
        )
        .unwrap();
        assert!(other.pass);
        assert_ne!(
            report.suites[0].worst_margin,
            other.suites[0].worst_margin
        );
    }

    #[test]
    fn poles_table_has_all_rows_and_header() {
        let s = Scenario::default();
        let csv = poles_csv(&s).unwrap();
        let growth = s.growth().unwrap();
        let expected: u128 = (growth.k0() + 1..=60)
            .map(|k| 2 * growth.n_index(k).unwrap() as u128)
            .sum();
        let data_rows = csv
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with('k'))
            .count();
        assert_eq!(data_rows as u128, expected);
        assert!(csv.contains("# input_hash:"));
        assert!(csv.contains("# zero_threshold: 2"));
        // First ring's real-axis pole leads the table.
        let first = csv
            .lines()
            .find(|l| !l.starts_with('#') && !l.starts_with('k'))
            .unwrap();
        assert!(first.starts_with("9,0,"));
    }

    #[test]
    fn grid_marks_pole_neighborhoods() {
        // Window centered on the real-axis pole of ring k0+2 with radius
        // 3 pi p'(k0+2): escape-step minima must sit within 2 px of the
        // pole positions inside the window.
        let s = Scenario::default();
        let growth = s.growth().unwrap();
        let k = growth.k0() + 2;
        let center = growth.p(k).unwrap();
        let half = 3.0 * std::f64::consts::PI * growth.p_prime(k as f64).unwrap();
        let px = 61u32;
        let w = GridWindow {
            re_min: center - half,
            re_max: center + half,
            im_min: -half,
            im_max: half,
            px,
        };
        let g = escape_grid(&s, &w, 12).unwrap();
        assert!(g.escape_radius >= w.corner_radius());

        // Parse the raster back.
        let mut lines = g.pgm.lines();
        assert_eq!(lines.next(), Some("P2"));
        let mut rows: Vec<Vec<u32>> = Vec::new();
        let mut dims = None;
        for line in lines {
            if line.starts_with('#') {
                continue;
            }
            if dims.is_none() {
                dims = Some(line.to_string());
                continue;
            }
            if line == "255" && rows.is_empty() {
                continue;
            }
            rows.push(
                line.split_whitespace()
                    .map(|v| v.parse().unwrap())
                    .collect(),
            );
        }
        assert_eq!(dims.as_deref(), Some("61 61"));
        assert_eq!(rows.len(), 61);
        assert!(rows.iter().all(|r| r.len() == 61));

        let min_val = rows.iter().flatten().copied().min().unwrap();
        let dx = (w.re_max - w.re_min) / px as f64;
        let dy = (w.im_max - w.im_min) / px as f64;
        // Every pole inside the window, whatever its ring: the window also
        // clips neighbouring rings.
        let map = s.map_certified_to(w.corner_radius()).unwrap();
        let k_hi = growth.ring_count(w.corner_radius()).unwrap();
        let poles: Vec<(f64, f64)> = map
            .poles_up_to(k_hi)
            .unwrap()
            .iter()
            .map(|p| (p.location.re, p.location.im))
            .filter(|(re, im)| {
                *re >= w.re_min && *re <= w.re_max && *im >= w.im_min && *im <= w.im_max
            })
            .collect();
        assert!(!poles.is_empty());
        for (iy, row) in rows.iter().enumerate() {
            for (ix, &v) in row.iter().enumerate() {
                if v == min_val {
                    let re = w.re_min + (ix as f64 + 0.5) * dx;
                    let im = w.im_max - (iy as f64 + 0.5) * dy;
                    let near = poles.iter().any(|(pr, pi)| {
                        ((re - pr) / dx).hypot((im - pi) / dy) <= 2.0 + 1e-9
                    });
                    assert!(
                        near,
                        "minimum {v} at ({re}, {im}) not within 2 px of a pole"
                    );
                }
            }
        }
    }

    #[test]
    fn sums_flags_flip_at_the_infinity_threshold() {
        // gamma below 8/(M rho) drifts down, above drifts up.
        let mut drifts = Vec::new();
        for gamma in [1.0, 2.0, 7.0, 9.0] {
            let s = Scenario {
                gamma,
                r0: 6.0,
                ..Scenario::default()
            };
            let rep = sums_report(&s, 2_000, 2, 400_000, 8).unwrap();
            drifts.push(rep.mass_sequence.drift.signum());
        }
        assert_eq!(drifts, vec![-1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn count_table_runs_and_embeds_order() {
        let s = Scenario::default();
        let csv = count_csv(&s, &[3.0, 4.0], (10_000, 40_000, 1800)).unwrap();
        assert!(csv.contains("r,exact,asymptote_log,ratio"));
        assert!(csv.lines().any(|l| l.starts_with("3,928,")));
        assert!(csv.contains("# order_slope: 1.0"));
    }
}
