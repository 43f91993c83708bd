//! Numerical laboratory for a family of meromorphic functions whose maximum
//! modulus grows like a tower of exponentials, together with the gauge
//! calculus needed to measure how their escaping sets fill the plane.
//!
//! The crate is organised around six capabilities:
//!
//! * [`tower`] — exact arithmetic on magnitudes of the form `exp^k(m)` far
//!   beyond double range, plus iterated exp/log helpers.
//! * [`gauge`] — the gauge family `t^2 (log^n(1/t))^gamma`, its domain, and
//!   the scaling/superadditivity/product/concavity lemmas with certified
//!   margins.
//! * [`growth`] — the radius scaffolding `p`, the tower-growth target `q`,
//!   multiplicity ladders, and separation estimates between scales.
//! * [`meromap`] — an explicit meromorphic function with poles on circles
//!   `|z| = p(k)`, its derivative, residues, escape orbits, and a spider's-web
//!   bound for the modulus on a grid.
//! * [`cover`] — inverse branches around poles, distortion-controlled
//!   diameters of branch chains, the key gauge series over pole preimages,
//!   and the mass ledgers behind the measure estimates.
//! * [`counting`] — exact pole counting in discs, its integral asymptote, and
//!   an order-of-growth estimator from the pole-counting function.
//!
//! Everything is deterministic: random sampling is seeded, parallel reductions
//! are ordered, and the CLI reports carry a content hash of the scenario that
//! produced them.

pub mod counting;
pub mod cover;
pub mod error;
pub mod gauge;
pub mod growth;
pub mod meromap;
pub mod quad;
pub mod report;
pub mod scenario;
pub mod tower;

pub use error::{Error, Result};
pub use gauge::GaugeSpec;
pub use tower::LogDepthMagnitude;
