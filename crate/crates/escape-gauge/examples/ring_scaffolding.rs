//! The radius/multiplicity scaffolding: rings at p(k) carrying 2 n_k poles,
//! the inverse growth function q, and the separation margins between scales.

use escape_gauge::growth::GrowthModel;

fn main() {
    let g = GrowthModel::new(1, 1.0).unwrap();
    println!("k0 = {} (first populated ring is k0+1)", g.k0());
    println!("separation constant c = {}", g.separation_constant());

    println!("\n  k     p(k)      n_k   2n_k poles");
    for k in g.k0() + 1..=g.k0() + 8 {
        println!(
            "{:>3}  {:>8.5}  {:>5}  {:>5}",
            k,
            g.p(k).unwrap(),
            g.n_index(k).unwrap(),
            2 * g.n_index(k).unwrap()
        );
    }

    // q inverts p: q(p(k)) = k, and ring_count floors it.
    let r = 3.0;
    println!("\nq({r}) = {}", g.q(r).unwrap().to_f64());
    println!("rings inside |z| <= {r}: {}", g.ring_count(r).unwrap());

    // Worst separation margin over a small grid (nonnegative: the
    // multiplicities outpace the ring spacing).
    let lo = g.k0() + 1;
    let mut worst = f64::INFINITY;
    for k in lo..lo + 40 {
        for l in lo..lo + 40 {
            if k != l {
                worst = worst.min(g.separation_margin(k, l).unwrap());
            }
        }
    }
    println!("\nworst separation margin over 40x40 rings: {worst:+.6}");

    // Deeper growth: the same scaffolding two exponentials up.
    let g2 = GrowthModel::new(2, 1.0).unwrap();
    println!(
        "\nn = 2: k0 = {}, first ring at p = {:.5}",
        g2.k0(),
        g2.p(g2.k0() + 1).unwrap()
    );
}
