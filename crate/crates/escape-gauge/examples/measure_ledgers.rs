//! The two sums that decide the measure: the key series (converges for small
//! gamma, giving zero measure) and the mass-ratio products (diverge for large
//! gamma, giving infinite measure). Run both ledgers for a gamma on each side
//! of the 8/(M rho) threshold.

use escape_gauge::cover::{CoverModel, MassParams};
use escape_gauge::gauge::GaugeSpec;
use escape_gauge::growth::GrowthModel;

fn main() {
    let growth = GrowthModel::new(1, 1.0).unwrap();
    let m_power = 1;
    let params = MassParams::new(6.0, 0.5, 1.0, m_power).unwrap();
    let model = CoverModel::new(&growth, params, m_power).unwrap();

    // Key series, gamma = 1 < 2/(M rho): ring-wise bins should decay
    // geometrically and stay under the Jensen ceiling.
    let gauge = GaugeSpec::new(1, 1.0).unwrap();
    let ledger = model.key_series(&gauge, 2_000, 3, 2_000_000).unwrap();
    println!(
        "key series, gamma = {} (threshold {}):",
        ledger.gamma, ledger.convergence_threshold
    );
    for bin in &ledger.bins {
        println!(
            "  bin l={} rings [{}, {}]  card {}  S_l {:.3e}  ceiling {:.3e}",
            bin.l, bin.ring_lo, bin.ring_hi, bin.card, bin.s_l, bin.jensen_bound
        );
    }
    if let (Some(r), Some(e)) = (ledger.decay_ratio, ledger.decay_exponent) {
        println!("  decay ratio {r:.4} = 2^-{e:.4}");
    }

    // Mass products on both sides of the divergence threshold. The drift
    // rho*gamma - 8/M fixes the sign of the eventual increments of
    // ln(poly(d_l) * prod Delta_k): negative drift sends the products to
    // zero, positive drift blows them up.
    for gamma in [7.0, 9.0] {
        let gauge = GaugeSpec::new(1, gamma).unwrap();
        let table = model.mass_sequence(&gauge, 10).unwrap();
        println!(
            "\nmass products, gamma = {gamma} (threshold {}, drift {:+.1}):",
            table.divergence_threshold, table.drift
        );
        for lvl in table.levels.iter().skip(3) {
            println!(
                "  l={:2}  ln R_l {:>10.3e}  ln product {:>12.4}  asym ratio {:.4}",
                lvl.l, lvl.log_radius, lvl.log_product, lvl.asymptotic_ratio
            );
        }
        println!(
            "  tail sign consistent: {}  monotone from: {:?}",
            table.tail_sign_consistent, table.monotone_from
        );
    }

    // Geometry behind the products: how much of an annulus A(S) the inner
    // pole disks can occupy. Keep S modest: the ring count blows past exact
    // integer range within a few more units of radius.
    let s = growth.p(12).unwrap();
    let density = model.annulus_density(s, 0.05).unwrap();
    println!(
        "\ninner-disk density in A({s:.3}): {:.3e} (rings {}..{})",
        density.euclidean, density.ring_lo, density.ring_hi
    );
}
