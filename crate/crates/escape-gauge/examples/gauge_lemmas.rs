//! The comparison lemmas of the gauge t^2 (log^n(1/t))^gamma, checked on a
//! few concrete inputs. Margins are printed as (rhs - lhs) in whichever
//! space the check ran; nonnegative means the inequality holds.

use escape_gauge::gauge::GaugeSpec;
use escape_gauge::tower;

fn main() {
    for (n, gamma) in [(1u32, 1.0f64), (2, 0.5), (3, 2.0)] {
        let gauge = GaugeSpec::new(n, gamma).unwrap();
        println!(
            "n = {n}, gamma = {gamma}: domain (0, delta_n], delta_n = {:.3e}",
            gauge.delta_n()
        );

        // log(1/t) well inside the domain; the superadditivity and product
        // laws additionally ask for t <= 1/exp^n(2).
        let bound = gauge.log_recip_delta().to_f64();
        let base = bound.max(tower::iter_exp(n - 1, 2.0).to_f64());
        let ells = [base + 3.0, base + 11.0, base + 27.0];
        let report = gauge.inequality_margins(&ells, 2.7).unwrap();
        println!("  scaling         margin {:+.3e}", report.scaling.margin);
        println!("  superadditivity margin {:+.3e}", report.superadditivity.margin);
        println!("  product         margin {:+.3e}", report.product.margin);

        let conc = gauge.concavity_margin_log_recip(2.0 * bound + 5.0).unwrap();
        println!(
            "  concavity bracket {:+.3e} (G' positive: {})",
            conc.margin, conc.derivative_positive
        );
    }

    // The gauge value itself underflows long before the lemmas stop being
    // checkable: h is evaluated through log h.
    let gauge = GaugeSpec::new(1, 1.0).unwrap();
    let ell = 500.0; // t = e^-500
    println!(
        "\nlog h(e^-500) = {}",
        gauge.log_h_from_log_recip(ell).unwrap()
    );
}
