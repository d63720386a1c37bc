//! Hitting counts of x_i = x0 + i k phi in [1 - phi, phi] against k d / 6.

use sturmlab::ergodicity::{case3_window_check, hitting_scan, lemma_bound_check, FrameMode};
use sturmlab::quad::{Arc, QuadraticIrrational};

fn main() -> sturmlab::Result<()> {
    let phi = QuadraticIrrational::from_i64(3, -1, 1, 5)?;
    let p = Arc::closed(QuadraticIrrational::one() - phi.clone(), phi.clone())?;
    let lemma = lemma_bound_check(&phi, 10_000)?;
    let d = lemma.d;
    println!("c = {:.6}, d = {d}", lemma.c_est_f64);

    for x0 in [QuadraticIrrational::zero(), QuadraticIrrational::from_i64(1, 1, 9, 5)?.frac()] {
        let scan = hitting_scan(&phi, &x0, &p, 1..=500, d)?;
        let worst = scan.results.iter().min_by(|a, b| (a.hits * b.k).cmp(&(b.hits * a.k))).expect("nonempty");
        println!(
            "x0 = {x0}: k* = {:?}, min hits/k = {:.3} at k = {} (case {})",
            scan.threshold_k, scan.empirical_r, worst.k, worst.case_id
        );
    }

    let case3: Vec<u64> = (1..200)
        .filter(|&k| matches!(case3_window_check(&phi, &QuadraticIrrational::zero(), k, d, &p, FrameMode::Proof), Ok(Some(true))))
        .collect();
    println!("case 3 four-point windows hit for k in {case3:?}");
    Ok(())
}
