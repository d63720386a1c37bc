//! Forbidden distances, the zero-run bound, and a check of the absence
//! characterization on a long window and on a corrupted copy.

use sturmlab::forbidden::ForbiddenModel;
use sturmlab::quad::QuadraticIrrational;

fn main() -> sturmlab::Result<()> {
    let phi = QuadraticIrrational::from_i64(3, -1, 1, 5)?;
    let model = ForbiddenModel::new(&phi)?;

    println!("forbidden distances <= 40: {:?}", model.forbidden_set(40)?);
    let scan = model.zero_run_bound(1 << 20)?;
    println!("m = {} (longest run {}, gaps between 1's {:?})", scan.m, scan.max_run, scan.gaps);

    let report = model.verify_sturmian(1_000_000, 300)?;
    println!(
        "sturmian window: {} violations, {} allowed distances without a witness",
        report.violation_count,
        report.unrealized.len()
    );

    let x = sturmlab::word::SturmianWord::sturmian(&phi, &QuadraticIrrational::zero(), Default::default())?;
    let mut bits = sturmlab::word::Word::fill(&x, 0, 10_000);
    bits[5000] ^= 1;
    let bad = model.verify_characterization(&bits, 0, 300);
    println!("one flipped symbol: {} violations, first {:?}", bad.violation_count, bad.violations.first());
    Ok(())
}
