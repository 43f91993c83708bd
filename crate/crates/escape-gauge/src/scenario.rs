//! Run configuration: one struct tying together the growth model, the map,
//! the gauge, and the cover parameters, plus the derived thresholds that
//! every report echoes.
//!
//! The two thresholds `2/(M rho)` and `8/(M rho)` split the gauge exponent
//! axis into the zero-measure regime, the undecided middle band, and the
//! infinite-measure regime; `regime()` reports which side the configured
//! `gamma` falls on. A scenario can be loaded from TOML or JSON and carries
//! a SHA-256 content hash so identical inputs are recognizable in archived
//! reports.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cover::MassParams;
use crate::error::{Error, Result};
use crate::gauge::GaugeSpec;
use crate::growth::GrowthModel;
use crate::meromap::Meromap;

/// Where the gauge exponent sits relative to the two thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaRegime {
    /// `gamma < 2/(M rho)`: the measure of the escaping set vanishes.
    ZeroMeasure,
    /// `2/(M rho) <= gamma <= 8/(M rho)`: between the certified regimes.
    Undecided,
    /// `gamma > 8/(M rho)`: the measure is infinite.
    InfiniteMeasure,
}

/// Full run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    /// Iterated-log depth of the growth scale and the gauge.
    pub n: u32,
    /// Growth parameter of the ring scaffolding.
    pub rho: f64,
    /// Outer power: the iterated map is the base map raised to `M`.
    #[serde(rename = "M")]
    pub m: u32,
    /// Gauge exponent.
    pub gamma: f64,
    /// Truncation ring of the partial-fraction series.
    pub k_max: u64,
    /// Ceiling accepted for the series tail (the constructor insists the
    /// actual tail is at most a quarter of this).
    pub tail_policy: f64,
    /// Base radius of the cover schedule.
    #[serde(rename = "R0")]
    pub r0: f64,
    /// Density constant of the cover estimates.
    pub lambda: f64,
    /// Annulus slack constant of the cover estimates.
    pub delta: f64,
    /// Seed for every sampled suite in this run.
    pub seed: u64,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            n: 1,
            rho: 1.0,
            m: 1,
            gamma: 1.0,
            k_max: 60,
            tail_policy: 1e-9,
            r0: 6.0,
            lambda: 0.5,
            delta: 1.0,
            seed: 7,
        }
    }
}

impl Scenario {
    /// Loads TOML (`.toml`) or JSON (anything else) and validates.
    pub fn from_path(path: &Path) -> Result<Self> {
        let raw = fs::read_to_string(path)
            .map_err(|e| Error::domain(format!("cannot read {}: {e}", path.display())))?;
        let scenario: Scenario = if path.extension().is_some_and(|x| x == "toml") {
            toml::from_str(&raw).map_err(|e| Error::domain(format!("bad TOML scenario: {e}")))?
        } else {
            serde_json::from_str(&raw)
                .map_err(|e| Error::domain(format!("bad JSON scenario: {e}")))?
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::domain("n must be at least 1"));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::domain(format!("rho must be positive, got {}", self.rho)));
        }
        if self.m == 0 {
            return Err(Error::domain("M must be at least 1"));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::domain(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.tail_policy > 0.0) {
            return Err(Error::domain("tail_policy must be positive"));
        }
        if !(self.r0 > 0.0 && self.lambda > 0.0 && self.delta > 0.0) {
            return Err(Error::domain("R0, lambda, delta must all be positive"));
        }
        Ok(())
    }

    /// `2/(M rho)`: below this gauge exponent the escaping set is null.
    pub fn zero_threshold(&self) -> f64 {
        2.0 / (self.m as f64 * self.rho)
    }

    /// `8/(M rho)`: above this gauge exponent the measure is infinite.
    pub fn infinity_threshold(&self) -> f64 {
        8.0 / (self.m as f64 * self.rho)
    }

    pub fn regime(&self) -> GammaRegime {
        if self.gamma < self.zero_threshold() {
            GammaRegime::ZeroMeasure
        } else if self.gamma > self.infinity_threshold() {
            GammaRegime::InfiniteMeasure
        } else {
            GammaRegime::Undecided
        }
    }

    /// SHA-256 of the canonical JSON encoding (fields in declaration order),
    /// hex-encoded. Identical scenarios hash identically.
    pub fn content_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("scenario serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let digest = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for byte in digest {
            use std::fmt::Write;
            let _ = write!(hex, "{byte:02x}");
        }
        hex
    }

    pub fn growth(&self) -> Result<GrowthModel> {
        GrowthModel::new(self.n, self.rho)
    }

    pub fn gauge(&self) -> Result<GaugeSpec> {
        GaugeSpec::new(self.n, self.gamma)
    }

    pub fn map(&self) -> Result<Meromap> {
        Meromap::new(self.growth()?, self.m, self.k_max, self.tail_policy)
    }

    /// Map truncated at `k_max` or deeper, so that the certified disc
    /// `|z| <= p(k_max)/2` contains `|z| <= radius`.
    pub fn map_certified_to(&self, radius: f64) -> Result<Meromap> {
        let growth = self.growth()?;
        let needed = growth.ring_count(2.0 * radius)? + 1;
        Meromap::new(growth, self.m, self.k_max.max(needed), self.tail_policy)
    }

    pub fn mass_params(&self) -> Result<MassParams> {
        MassParams::new(self.r0, self.lambda, self.delta, self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn thresholds_and_regime() {
        let mut s = Scenario::default();
        assert_eq!(s.zero_threshold(), 2.0);
        assert_eq!(s.infinity_threshold(), 8.0);
        // Default gamma = 1 sits below 2/(M rho).
        assert_eq!(s.regime(), GammaRegime::ZeroMeasure);
        s.gamma = 3.0;
        assert_eq!(s.regime(), GammaRegime::Undecided);
        s.gamma = 1.9;
        assert_eq!(s.regime(), GammaRegime::ZeroMeasure);
        s.gamma = 9.0;
        assert_eq!(s.regime(), GammaRegime::InfiniteMeasure);
        s.m = 2;
        s.rho = 2.0;
        // Thresholds scale with 1/(M rho).
        assert_eq!(s.zero_threshold(), 0.5);
        assert_eq!(s.infinity_threshold(), 2.0);
        assert_eq!(s.regime(), GammaRegime::InfiniteMeasure);
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = Scenario::default();
        let b = Scenario::default();
        assert_eq!(a.content_hash(), b.content_hash());
        assert_eq!(a.content_hash().len(), 64);
        let changed = Scenario {
            seed: 8,
            ..Scenario::default()
        };
        assert_ne!(a.content_hash(), changed.content_hash());
    }

    #[test]
    fn loads_toml_and_json() {
        let dir = tempfile::tempdir().unwrap();
        let toml_path = dir.path().join("s.toml");
        let mut f = fs::File::create(&toml_path).unwrap();
        writeln!(f, "n = 1\nrho = 1.0\nM = 1\ngamma = 2.5\nseed = 11").unwrap();
        let s = Scenario::from_path(&toml_path).unwrap();
        assert_eq!(s.gamma, 2.5);
        assert_eq!(s.seed, 11);
        // Unspecified fields take defaults.
        assert_eq!(s.k_max, 60);

        let json_path = dir.path().join("s.json");
        fs::write(&json_path, r#"{"gamma": 9.0, "R0": 5.0}"#).unwrap();
        let s2 = Scenario::from_path(&json_path).unwrap();
        assert_eq!(s2.gamma, 9.0);
        assert_eq!(s2.r0, 5.0);

        // Unknown fields are rejected, not silently dropped.
        let bad = dir.path().join("bad.json");
        fs::write(&bad, r#"{"gamme": 1.0}"#).unwrap();
        assert!(Scenario::from_path(&bad).is_err());
    }

    #[test]
    fn builders_agree_with_fields() {
        let s = Scenario::default();
        let g = s.growth().unwrap();
        assert_eq!(g.n(), 1);
        let map = s.map().unwrap();
        assert_eq!(map.k_max(), 60);
        // Growing the truncation to certify a disc of radius 3.
        let grown = s.map_certified_to(3.0).unwrap();
        assert!(grown.certified_radius() >= 3.0);
        assert!(grown.k_max() > 60);
    }
}
