//! FFT correlation helpers.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// For `i` in `0..n_out`, evaluates `map(i, sum_{t=1}^{T} kernel[t] * signal[T + i - t])`
/// where `T = kernel.len() - 1`; signal entries past the end read as zero.
///
/// Overlap-save with blocks processed in parallel; the result does not depend
/// on the number of threads.
pub fn causal_correlate<F>(signal: &[u8], kernel: &[Complex64], n_out: usize, map: F) -> Vec<f64>
where
    F: Fn(usize, Complex64) -> f64 + Sync,
{
    let t = kernel.len().saturating_sub(1);
    if n_out == 0 {
        return Vec::new();
    }
    if t == 0 {
        return (0..n_out).map(|i| map(i, Complex64::new(0.0, 0.0))).collect();
    }
    let size = (2 * (t + 1)).next_power_of_two().max(1 << 12);
    let block = size - t;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);

    let mut h = vec![Complex64::new(0.0, 0.0); size];
    h[1..=t].copy_from_slice(&kernel[1..=t]);
    fwd.process(&mut h);
    let scale = 1.0 / size as f64;

    let starts: Vec<usize> = (0..n_out).step_by(block).collect();
    let parts: Vec<Vec<f64>> = starts
        .par_iter()
        .map(|&b| {
            let mut buf: Vec<Complex64> = (0..size)
                .map(|j| {
                    let v = signal.get(b + j).copied().unwrap_or(0);
                    Complex64::new(f64::from(v), 0.0)
                })
                .collect();
            fwd.process(&mut buf);
            for (x, y) in buf.iter_mut().zip(&h) {
                *x *= y;
            }
            inv.process(&mut buf);
            let n = block.min(n_out - b);
            (0..n).map(|i| map(b + i, buf[t + i] * scale)).collect()
        })
        .collect();
    parts.concat()
}

/// `A[t] = #{i : w[i] = w[i + t] = 1}` for `t = 0..len`, exact.
pub fn autocorrelation_counts(bits: &[u8]) -> Vec<u64> {
    let n = bits.len();
    if n == 0 {
        return Vec::new();
    }
    let size = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut buf: Vec<Complex64> = (0..size)
        .map(|j| Complex64::new(f64::from(bits.get(j).copied().unwrap_or(0)), 0.0))
        .collect();
    fwd.process(&mut buf);
    for x in buf.iter_mut() {
        *x = Complex64::new(x.norm_sqr(), 0.0);
    }
    inv.process(&mut buf);
    let scale = 1.0 / size as f64;
    (0..n).map(|t| (buf[t].re * scale).round().max(0.0) as u64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn correlate_matches_direct() {
        let signal: Vec<u8> = (0..20_000u64).map(|i| ((i * 2_654_435_761) >> 7 & 1) as u8).collect();
        let kernel: Vec<Complex64> = (0..=300).map(|t| Complex64::new(1.0 / (1.0 + t as f64), (t % 3) as f64)).collect();
        let n_out = signal.len() - 300;
        let re = causal_correlate(&signal, &kernel, n_out, |_, z| z.re);
        let im = causal_correlate(&signal, &kernel, n_out, |_, z| z.im);
        for i in (0..n_out).step_by(131) {
            let mut want = Complex64::new(0.0, 0.0);
            for t in 1..=300 {
                want += kernel[t] * f64::from(signal[300 + i - t]);
            }
            assert!((re[i] - want.re).abs() < 1e-9 && (im[i] - want.im).abs() < 1e-9);
        }
    }

    #[test]
    fn autocorrelation_small() {
        assert_eq!(autocorrelation_counts(&[1, 0, 1, 1]), vec![3, 1, 1, 1]);
    }
}
