//! Independent fixed-point oracle for `phi = 3 - sqrt 5`: 60 decimal digits
//! carried, 50 trusted. Nothing here goes through the library's exact field
//! arithmetic.
#![allow(dead_code)]

use num_bigint::BigInt;

pub const DIGITS: u32 = 60;
pub const TRUSTED: u32 = 50;

pub struct Fixed {
    pub one: BigInt,
    pub phi: BigInt,
}

impl Fixed {
    pub fn new() -> Self {
        let one = BigInt::from(10u32).pow(DIGITS);
        let sqrt5 = (BigInt::from(5u32) * &one * &one).sqrt();
        let phi = BigInt::from(3u32) * &one - sqrt5;
        Fixed { one, phi }
    }

    fn eps(&self) -> BigInt {
        BigInt::from(10u32).pow(DIGITS - TRUSTED)
    }

    /// `{k phi}` in fixed point.
    pub fn frac_k_phi(&self, k: u64) -> BigInt {
        let v = &self.phi * BigInt::from(k);
        ((v % &self.one) + &self.one) % &self.one
    }

    /// `{k phi} in [1 - phi, phi]`, panicking if the oracle cannot decide.
    pub fn is_forbidden(&self, k: u64) -> bool {
        let f = self.frac_k_phi(k);
        let lo = &self.one - &self.phi;
        if k == 1 {
            // {phi} = phi is the closed right end, the only exact endpoint hit
            return true;
        }
        let eps = self.eps();
        for end in [&lo, &self.phi] {
            let gap: BigInt = &f - end;
            assert!(gap.magnitude() > eps.magnitude(), "oracle cannot decide k = {k}");
        }
        f >= lo && f <= self.phi
    }

    /// `ceil(1 / (1 - phi))`.
    pub fn zero_run_m(&self) -> u64 {
        let den = &self.one - &self.phi;
        let num = self.one.clone();
        let q = &num / &den;
        let exact = (&q * &den) == num;
        let q: u64 = q.try_into().expect("small");
        if exact { q } else { q + 1 }
    }

    /// Symbols `X(n)` for `n in start..start + len`, `X(n) = 0` iff `{n phi} in [0, phi)`.
    /// Positions within `10^-TRUSTED` of an endpoint panic.
    pub fn symbols(&self, start: u64, len: usize) -> Vec<u8> {
        let mut x = self.frac_k_phi(start);
        let eps = self.eps();
        (0..len)
            .map(|_| {
                let s = if x < self.phi { 0 } else { 1 };
                let near = (&x - &self.phi).magnitude() < eps.magnitude() || x.magnitude() < eps.magnitude();
                assert!(!near, "oracle cannot decide a symbol");
                x += &self.phi;
                if x >= self.one {
                    x -= &self.one;
                }
                s
            })
            .collect()
    }

    /// `phi` as a `u128` with `frac_bits` fractional bits, rounded down.
    pub fn phi_binary(&self, frac_bits: u32) -> u128 {
        let v: BigInt = (&self.phi << frac_bits as usize) / &self.one;
        v.try_into().expect("fits")
    }
}

/// `X(n)` for `n in start..start + len` from binary fixed point with 120
/// fractional bits; the accumulated error stays below `len * 2^-120`.
pub fn fast_symbols(fx: &Fixed, start: u64, len: usize) -> Vec<u8> {
    const BITS: u32 = 120;
    let one: u128 = 1 << BITS;
    let phi = fx.phi_binary(BITS);
    let mut x: u128 = ((fx.frac_k_phi(start) << BITS as usize) / &fx.one).try_into().expect("fits");
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(u8::from(x >= phi));
        x += phi;
        if x >= one {
            x -= one;
        }
    }
    out
}

/// Pack 0/1 symbols into 64-bit words, least significant bit first.
pub fn pack(bits: &[u8]) -> Vec<u64> {
    let mut out = vec![0u64; bits.len().div_ceil(64)];
    for (i, &b) in bits.iter().enumerate() {
        if b == 1 {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

/// Whether some `i` has `w[i] = w[i + k] = 1`.
pub fn pair_occurs(packed: &[u64], len: usize, k: usize) -> bool {
    let (q, r) = (k / 64, k % 64);
    let words = len.div_ceil(64);
    for i in 0..words.saturating_sub(q) {
        let lo = packed[i + q] >> r;
        let hi = if r == 0 { 0 } else { packed.get(i + q + 1).map_or(0, |w| w << (64 - r)) };
        let mut shifted = lo | hi;
        // drop bits whose partner lies past the end
        let base = i * 64;
        if base + 64 + k > len {
            let valid = len.saturating_sub(base + k).min(64);
            shifted &= if valid == 64 { u64::MAX } else { (1u64 << valid) - 1 };
        }
        if packed[i] & shifted != 0 {
            return true;
        }
    }
    false
}

/// Oracle density of the 1's for quick sanity use.
pub fn ones_density(bits: &[u8]) -> f64 {
    bits.iter().map(|&b| f64::from(b)).sum::<f64>() / bits.len() as f64
}
