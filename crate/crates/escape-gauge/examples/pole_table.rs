//! Poles and residues of the partial-fraction map on its first ring, with a
//! numeric cross-check of each residue by a small circle integral.

use escape_gauge::growth::GrowthModel;
use escape_gauge::meromap::Meromap;

fn main() {
    let growth = GrowthModel::new(1, 1.0).unwrap();
    // Truncation deep enough that the certified disc reaches past the rings
    // probed below (the ring radii crawl: p(60)/2 would fall short of p(9)).
    let map = Meromap::new(growth, 1, 300, 1e-9).unwrap();
    let k = map.growth().k0() + 1;

    let poles = map.poles_on_ring(k).unwrap();
    println!(
        "ring k = {k}: {} poles on |z| = {:.5}",
        poles.len(),
        map.growth().p(k).unwrap()
    );
    println!("certified disc radius: {:.5}\n", map.certified_radius());

    println!("   l   location                      residue");
    for p in poles.iter().take(6) {
        println!(
            "{:>4}   {:>12.8} {:>+12.8}i   {:>12.8} {:>+12.8}i",
            p.l, p.location.re, p.location.im, p.residue.re, p.residue.im
        );
    }
    println!("   ... ({} more)\n", poles.len() - 6);

    // Residue probe: numerically integrate around each pole and compare.
    let mut worst = 0.0f64;
    for l in 0..poles.len() as u64 {
        let probe = map.residue_probe(k, l, 64).unwrap();
        worst = worst.max(probe.abs_err);
    }
    println!("worst |numeric - analytic| over the ring: {worst:.3e}");

    // Residues shrink like p/n_k as the rings move out.
    for kk in [k, k + 3, k + 6] {
        let p = map.pole(kk, 0).unwrap();
        println!(
            "ring {kk}: |residue at l=0| = {:.6}",
            p.residue.re.hypot(p.residue.im)
        );
    }
}
