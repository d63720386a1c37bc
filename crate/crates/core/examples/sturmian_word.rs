//! Sturmian words for phi = 3 - sqrt 5: the two endpoint conventions, factor
//! complexity and the frequency of 1's.
//!
//! cargo run --example sturmian_word

use sturmlab::quad::QuadraticIrrational;
use sturmlab::word::{cylinder_measure, factor_complexity, frequency_estimate, Convention, SturmianWord, Word};

fn show(bits: &[u8]) -> String {
    bits.iter().map(|b| char::from(b'0' + b)).collect()
}

fn main() -> sturmlab::Result<()> {
    let phi = QuadraticIrrational::from_i64(3, -1, 1, 5)?;
    let zero = QuadraticIrrational::zero();
    let left = SturmianWord::sturmian(&phi, &zero, Convention::LeftClosed)?;
    let right = SturmianWord::sturmian(&phi, &zero, Convention::RightClosed)?;

    println!("phi = {phi} ~ {:.12}", phi.to_f64());
    println!("[0, phi)  : {}", show(&left.fill(-10, 40)));
    println!("(0, phi]  : {}", show(&right.fill(-10, 40)));

    for l in [1, 2, 5, 10, 20] {
        println!("factors of length {l:>2}: {}", factor_complexity(&left, l, 100_000));
    }

    let one = "1".parse()?;
    let est = frequency_estimate(&left, &one, 1_000_000)?;
    let exact = cylinder_measure(&phi, &one)?;
    println!("freq of 1: window {:.8}, exact {exact} ~ {:.8}", *est.numer() as f64 / *est.denom() as f64, exact.to_f64());
    Ok(())
}
