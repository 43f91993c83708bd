//! Evaluating the truncated partial-fraction series: values, derivatives,
//! and the certified truncation tail.

use num_complex::Complex64;

use escape_gauge::growth::GrowthModel;
use escape_gauge::meromap::Meromap;

fn main() {
    let growth = GrowthModel::new(1, 1.0).unwrap();

    // Two truncations of the same map.
    let coarse = Meromap::new(growth.clone(), 1, 10, 1e-6).unwrap();
    let fine = Meromap::new(growth.clone(), 1, 15, 1e-6).unwrap();
    println!(
        "tail bound at k_max = 10: 2^{} = {:.3e}",
        coarse.tail_log2(),
        coarse.g_tail_bound()
    );

    let z = Complex64::new(1.0, 0.3);
    let a = coarse.eval_g(z).unwrap();
    let b = fine.eval_g(z).unwrap();
    println!("g(z) truncated at 10: {a}");
    println!("g(z) truncated at 15: {b}");
    println!(
        "difference {:.3e} <= bound {:.3e}",
        (a - b).norm(),
        coarse.g_tail_bound()
    );

    // Between the rings the map is tiny; near a pole it blows up.
    let map = Meromap::new(growth, 1, 120, 1e-9).unwrap();
    let quiet = Complex64::new(0.5, 0.5);
    println!("\n|g| at an off-ring point: {:.3e}", map.eval_g(quiet).unwrap().norm());

    let pole = map.pole(9, 0).unwrap().location;
    let near = pole + Complex64::new(1e-4, 0.0);
    println!("|g| at 1e-4 from a pole: {:.3e}", map.eval_g(near).unwrap().norm());

    // Asking for the pole itself is a reported error, not a NaN.
    match map.eval_g(pole) {
        Err(e) => println!("at the pole: {e}"),
        Ok(v) => println!("unexpected value {v}"),
    }

    // The iterate is the M-th power; its derivative follows the chain rule.
    let m3 = Meromap::new(GrowthModel::new(1, 1.0).unwrap(), 3, 120, 1e-9).unwrap();
    let w = Complex64::new(2.25, 0.1);
    println!(
        "\nM = 3: f(w) = g(w)^3 = {}, f'(w) = {}",
        m3.eval_f(w).unwrap(),
        m3.eval_f_prime(w).unwrap()
    );
}
