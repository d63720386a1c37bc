//! Continued fraction, convergents and the badly-approximable constant.

use sturmlab::cf::{badly_constant_scan, cf_expand, convergents};
use sturmlab::quad::QuadraticIrrational;

fn main() -> sturmlab::Result<()> {
    for (name, x) in [
        ("3 - sqrt 5", QuadraticIrrational::from_i64(3, -1, 1, 5)?),
        ("(sqrt 5 - 1)/2", QuadraticIrrational::from_i64(-1, 1, 2, 5)?),
        ("sqrt 7 - 2", QuadraticIrrational::from_i64(-2, 1, 1, 7)?),
    ] {
        let cf = cf_expand(&x, 64)?;
        let terms: Vec<String> = (0..10).filter_map(|i| cf.term(i)).map(|a| a.to_string()).collect();
        let tail = cf.periodic_tail.map(|t| format!("period {} from index {}", t.len, t.start)).unwrap_or_default();
        println!("{name}: [{}; ...] {tail}", terms.join(", "));
        let q: Vec<String> = convergents(&cf, 9)?.into_iter().map(|(_, q)| q.to_string()).collect();
        println!("  denominators {}", q.join(" "));
        let c = badly_constant_scan(&x, 100_000)?;
        println!("  min k||kx|| over k <= 1e5 = {:.9} at k = {}, d = {}", c.c_est_f64(), c.argmin_k, c.d);
    }
    Ok(())
}
