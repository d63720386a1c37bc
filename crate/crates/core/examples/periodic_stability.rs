//! Periodically Sturmian competitors against the Sturmian ground state.

use sturmlab::quad::QuadraticIrrational;
use sturmlab::stability::{stability_scan_periodic, PeriodicScanConfig};

fn main() -> sturmlab::Result<()> {
    let phi = QuadraticIrrational::from_i64(3, -1, 1, 5)?;
    for alpha in [1.4, 3.5] {
        let cfg = PeriodicScanConfig { alpha, k_max: 120, samples_per_k: 6, ..Default::default() };
        let scan = stability_scan_periodic(&phi, &cfg)?;
        let negative = scan.records.iter().filter(|r| r.margin < 0.0).count();
        let fit = scan.fit.as_ref().expect("enough points");
        println!(
            "alpha {alpha}: {} competitors, {negative} negative margins, k* = {:?}, lambda* = {:.3e}",
            scan.records.len(),
            scan.k_star,
            scan.lambda_star
        );
        println!("  density ~ k^{:.3} (lower bound exponent {:.1}, r2 {:.2})", fit.exponent, fit.predicted_exponent, fit.r_squared);
    }
    Ok(())
}
