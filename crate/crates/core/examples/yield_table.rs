//! Prints the closed-form yield series next to the enumeration oracle.

use railconc::analytics::compare_yield;
use railconc::C64;

fn main() {
    for alpha_sq in [0.5, 0.6, 0.7, 0.8, 0.9] {
        let alpha = C64::new(f64::sqrt(alpha_sq), 0.0);
        let beta = C64::new(f64::sqrt(1.0 - alpha_sq), 0.0);
        let report = compare_yield(alpha, beta, 5, 0, 0).expect("valid coefficients");
        println!("|alpha|^2 = {alpha_sq}");
        for t in &report.terms {
            println!("  n={} formula={:.15e} oracle={:.15e} diff={:.3e}{}",
                t.n, t.value, t.oracle_value, t.discrepancy,
                if t.documented_discrepancy { "  (discrepancy)" } else { "" });
        }
        println!("  cumulative formula={:.15} oracle={:.15}", report.cumulative, report.cumulative_oracle);
    }
}
