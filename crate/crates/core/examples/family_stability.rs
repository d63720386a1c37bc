//! The Sturmian words S_n for phi - 1/n: pair density against the reward
//! lambda / n for their extra 1's.

use sturmlab::quad::QuadraticIrrational;
use sturmlab::stability::{stability_scan_family, FamilyCoding, FamilyScanConfig};

fn main() -> sturmlab::Result<()> {
    let phi = QuadraticIrrational::from_i64(3, -1, 1, 5)?;
    for coding in [FamilyCoding::Rotation, FamilyCoding::PhiOrbit] {
        let cfg = FamilyScanConfig {
            ns: (10..=200).step_by(10).collect(),
            coding,
            horizon: 1 << 14,
            m_max: 1 << 17,
            ..Default::default()
        };
        let scan = stability_scan_family(&phi, &cfg)?;
        let fit = scan.fit.as_ref().expect("enough points");
        println!("{coding:?}: n* = {:?}, density ~ n^{:.3} (bound {:.1})", scan.n_star, fit.exponent, fit.predicted_exponent);
        for r in scan.records.iter().step_by(5) {
            println!("  n = {:>3}: density {:.6e}, reward {:.1e}, margin {:.6e}", r.parameter, r.base_density, r.perturbation_gain, r.margin);
        }
    }
    Ok(())
}
