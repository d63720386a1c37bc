//! Window energies and energy densities under H_alpha.
//!
//! The Sturmian word costs nothing; a periodic word pays for its forbidden
//! pairs. The periodic density is computed from residue sums, then compared
//! with the streaming estimator using stride k and stride 1 windows.

use std::sync::Arc;

use sturmlab::forbidden::ForbiddenModel;
use sturmlab::hamiltonian::HamiltonianSpec;
use sturmlab::quad::QuadraticIrrational;
use sturmlab::word::{periodic_sturmian, Convention, SturmianWord, Word};

fn main() -> sturmlab::Result<()> {
    let phi = QuadraticIrrational::from_i64(3, -1, 1, 5)?;
    let model = Arc::new(ForbiddenModel::new(&phi)?);
    let h = HamiltonianSpec::new(2.5, model)?;

    let x = SturmianWord::sturmian(&phi, &QuadraticIrrational::zero(), Convention::LeftClosed)?;
    let w = x.window(-100_000, 100_000)?;
    println!("sturmian window of {}: {:?}", w.len(), h.window_energy_breakdown(&w));

    let y = periodic_sturmian(&phi, 7, &QuadraticIrrational::zero())?;
    let exact = h.density_periodic_exact(&y, 1e-10)?;
    let by_k = h.density_estimate_stream(&y, 7, 4096, 1 << 13)?;
    let by_1 = h.density_estimate_stream(&y, 1, 1 << 15, 1 << 13)?;
    println!("period {}: residue sum {:.10} (bound {:.1e})", y.period(), exact.value, exact.tail_bound);
    println!("  stride 7 {:.10}, stride 1 {:.10}, tail bound {:.1e}", by_k.value, by_1.value, by_k.tail_bound);
    print!("{}", exact.to_csv());
    Ok(())
}
