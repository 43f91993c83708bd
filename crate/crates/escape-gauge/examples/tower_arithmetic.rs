//! Arithmetic far beyond double range: magnitudes are kept as
//! exp-towers `exp^depth(mantissa)` and compared without ever
//! materializing the value.

use escape_gauge::tower::{self, LogDepthMagnitude};

fn main() {
    // exp(exp(exp(2))) is hopeless as an f64 but exact as a tower.
    let t = tower::iter_exp(3, 2.0);
    println!("exp^3(2)            = {t}");
    println!("as f64              = {}", t.to_f64());

    // ln walks back down one level at a time.
    let back = t.ln().unwrap().ln().unwrap().ln().unwrap();
    println!("ln ln ln exp^3(2)   = {}", back.to_f64());

    // Addition folds the smaller operand in; at equal depth the fold is
    // exact in log space, across depths the larger magnitude wins.
    let a = tower::iter_exp(2, 3.0);
    let b = tower::iter_exp(2, 3.0);
    let sum = a.add(&b);
    println!("exp^2(3) + exp^2(3) = {sum}  (mantissa grew by ln 2 inside)");

    let tiny = LogDepthMagnitude::from_f64(1e300);
    let huge = tower::iter_exp(1, 800.0);
    println!(
        "1e300 + e^800       = {}  (the e^800 absorbs it)",
        tiny.add(&huge)
    );

    // Comparisons stay exact at any height.
    let x = tower::iter_exp(4, 2.0);
    let y = tower::iter_exp(3, 700.0);
    println!("exp^4(2) vs exp^3(700): {:?}", x.value_cmp(&y));

    // Iterated log of a plain double, the bridge used by the estimators.
    println!("log^2(e^(e^3))      = {}", tower::iter_log_f64(2, (3f64).exp().exp()).unwrap());
}
