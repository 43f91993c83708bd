//! The spider's web: mid-ring circles and connecting rays on which |g|
//! stays uniformly bounded. Samples the web and compares with the
//! certified constant.

use escape_gauge::growth::GrowthModel;
use escape_gauge::meromap::{Meromap, WebSpec};

fn main() {
    let growth = GrowthModel::new(1, 1.0).unwrap();
    // Truncation deep enough that the certified disc covers the sampled rings.
    let map = Meromap::new(growth, 1, 300, 1e-9).unwrap();

    let c = map.growth().separation_constant();
    let big_c = map.web_constant();
    println!("separation c = {c}");
    println!("C            = {big_c}");
    println!("4C + 4       = {}", 4.0 * big_c + 4.0);

    let spec = WebSpec {
        m_lo: map.growth().k0() + 2,
        m_hi: map.growth().k0() + 7,
        samples_per_circle: 128,
        samples_per_segment: 32,
        rays_per_ring: 3,
        seed: 7,
    };
    let web = map.web_sup(&spec).unwrap();

    println!("\nsampled sup |g| over the web: {:.6}", web.sup_sampled);
    println!(
        "  attained at |z| = {:.5}, arg = {:.5}",
        web.sup_radius, web.sup_angle
    );
    println!(
        "certified bound (4C+4 plus tail): {:.6}",
        web.theoretical_bound
    );
    println!("own-ring ray term sup: {:.6} (<= 2)", web.mid_term_sup);

    println!("\nper-circle sups:");
    for c in &web.circle_sups {
        println!("  ring {:>2}: sup |g| = {:.6}", c.m, c.sup);
    }
}
