//! Power sums `sum n^-s` by Euler-Maclaurin.

/// `B_2j / (2j)!` for `j = 1..=6`.
const BERNOULLI_OVER_FACTORIAL: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
];

/// Below this start index the first terms are summed directly.
const DIRECT: u64 = 16;

/// `sum_{n > t} n^-s` for `s > 1`.
pub fn hurwitz_tail(s: f64, t: u64) -> f64 {
    assert!(s > 1.0, "power sum diverges for s = {s}");
    let start = t + 1;
    let n0 = start.max(DIRECT);
    let mut direct = 0.0;
    for n in (start..n0).rev() {
        direct += (n as f64).powf(-s);
    }
    direct + em_tail(s, n0 as f64)
}

/// `sum_{n >= a} n^-s` from the Euler-Maclaurin formula at `a`.
fn em_tail(s: f64, a: f64) -> f64 {
    let mut sum = a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // rising factorial s (s+1) ... (s+2j-2) and power a^(-s-2j+1)
    let mut rising = s;
    let mut pow = a.powf(-s - 1.0);
    for (j, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        sum += c * rising * pow;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        pow /= a * a;
    }
    sum
}

/// Riemann zeta for real `s > 1`.
pub fn zeta(s: f64) -> f64 {
    hurwitz_tail(s, 0)
}

/// The integral bound `t^(1-s) / (s-1)` on `sum_{n > t} n^-s`.
pub fn integral_tail_bound(s: f64, t: u64) -> f64 {
    (t as f64).powf(1.0 - s) / (s - 1.0)
}
