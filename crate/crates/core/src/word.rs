//! Rotation codings, finite and periodic words, and pattern statistics.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Frame, FrameArc, Pt};
use crate::quad::{Arc, QuadraticIrrational};

const FILL_CHUNK: usize = 1 << 16;

/// Which endpoint of `P` belongs to the zero interval.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `P = [0, phi)`
    #[default]
    LeftClosed,
    /// `P = (0, phi]`
    RightClosed,
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left_closed" => Ok(Convention::LeftClosed),
            "right_closed" => Ok(Convention::RightClosed),
            other => Err(Error::InvalidArgument(format!(
                "unknown convention {other:?}, expected left_closed or right_closed"
            ))),
        }
    }
}

/// A bi-infinite 0/1 sequence with random access.
pub trait Word: Sync {
    fn symbol_at(&self, n: i64) -> u8;

    /// Symbols `start, start + 1, ..., start + len - 1`.
    fn fill(&self, start: i64, len: usize) -> Vec<u8> {
        (0..len).map(|i| self.symbol_at(start + i as i64)).collect()
    }

    /// The finite word `w(a..=b)`.
    fn window(&self, a: i64, b: i64) -> Result<FiniteWord> {
        if a > b {
            return Err(Error::InvalidArgument(format!("empty window [{a}, {b}]")));
        }
        Ok(FiniteWord::with_origin(self.fill(a, (b - a + 1) as usize), a))
    }
}

/// Coding of the rotation `n -> x0 + n*step` against a zero arc:
/// the symbol is `0` exactly when `{x0 + n*step}` lies in the arc.
#[derive(Clone, Debug)]
pub struct RotationWord {
    step: QuadraticIrrational,
    x0: QuadraticIrrational,
    zero_arc: Arc,
    frame: Frame,
    fstep: Pt,
    fx0: Pt,
    farc: FrameArc,
}

/// A Sturmian word is the rotation coding by `phi` against `P`.
pub type SturmianWord = RotationWord;

impl RotationWord {
    pub fn new(step: QuadraticIrrational, x0: QuadraticIrrational, zero_arc: Arc) -> Result<Self> {
        if step.is_rational() {
            return Err(Error::RationalInput);
        }
        let x0 = x0.frac();
        let step = step.frac();
        let frame = Frame::for_values([&step, &x0, zero_arc.lo(), zero_arc.hi()])?;
        let fstep = frame.embed(&step);
        let fx0 = frame.embed(&x0);
        let farc = frame.arc(&zero_arc);
        Ok(Self { step, x0, zero_arc, frame, fstep, fx0, farc })
    }

    /// The Sturmian word with `X(n) = 0` iff `{x0 + n*phi}` lies in `P`.
    pub fn sturmian(phi: &QuadraticIrrational, x0: &QuadraticIrrational, convention: Convention) -> Result<Self> {
        check_unit_irrational(phi)?;
        let zero = QuadraticIrrational::zero();
        let arc = match convention {
            Convention::LeftClosed => Arc::new(zero, phi.clone(), true, false)?,
            Convention::RightClosed => Arc::new(zero, phi.clone(), false, true)?,
        };
        Self::new(phi.clone(), x0.clone(), arc)
    }

    pub fn step(&self) -> &QuadraticIrrational {
        &self.step
    }

    pub fn x0(&self) -> &QuadraticIrrational {
        &self.x0
    }

    pub fn zero_arc(&self) -> &Arc {
        &self.zero_arc
    }

    fn point(&self, n: i64) -> Pt {
        self.frame.reduce(&self.fx0.add(&self.fstep.scale(n)))
    }

    /// The exact circle point `{x0 + n*step}`.
    pub fn circle_point(&self, n: i64) -> QuadraticIrrational {
        self.frame.lift(&self.point(n))
    }

    fn fill_serial(&self, start: i64, len: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(len);
        let mut orbit = self.frame.orbit(self.point(start), self.fstep.clone());
        for _ in 0..len {
            out.push(u8::from(!self.frame.contains(&self.farc, orbit.pos())));
            orbit.advance();
        }
        out
    }
}

impl Word for RotationWord {
    fn symbol_at(&self, n: i64) -> u8 {
        u8::from(!self.frame.contains(&self.farc, &self.point(n)))
    }

    fn fill(&self, start: i64, len: usize) -> Vec<u8> {
        if len <= FILL_CHUNK {
            return self.fill_serial(start, len);
        }
        let chunks: Vec<usize> = (0..len).step_by(FILL_CHUNK).collect();
        let parts: Vec<Vec<u8>> = chunks
            .par_iter()
            .map(|&off| self.fill_serial(start + off as i64, FILL_CHUNK.min(len - off)))
            .collect();
        parts.concat()
    }
}

pub(crate) fn check_unit_irrational(phi: &QuadraticIrrational) -> Result<()> {
    if phi.is_rational() {
        return Err(Error::RationalInput);
    }
    if *phi <= QuadraticIrrational::zero() || *phi >= QuadraticIrrational::one() {
        return Err(Error::InvalidArgument(format!("phi = {phi} must lie in (0, 1)")));
    }
    Ok(())
}

/// A finite 0/1 word placed at `origin` in `Z`. One byte per symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteWord {
    bits: Vec<u8>,
    origin: i64,
}

impl FiniteWord {
    /// Panics if any entry is not 0 or 1.
    pub fn new(bits: Vec<u8>) -> Self {
        Self::with_origin(bits, 0)
    }

    pub fn with_origin(bits: Vec<u8>, origin: i64) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "symbols must be 0 or 1");
        Self { bits, origin }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Swaps the roles of 0 and 1.
    pub fn complement(&self) -> Self {
        Self { bits: self.bits.iter().map(|b| 1 - b).collect(), origin: self.origin }
    }

    /// All words of length `1..=max_len`, shortest first, lexicographic within a length.
    pub fn all_up_to(max_len: usize) -> Vec<FiniteWord> {
        let mut out = Vec::new();
        for len in 1..=max_len {
            for code in 0u64..(1 << len) {
                let bits = (0..len).map(|i| ((code >> (len - 1 - i)) & 1) as u8).collect();
                out.push(FiniteWord::new(bits));
            }
        }
        out
    }
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl FromStr for FiniteWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidWord(format!("unexpected symbol {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self::new(bits))
    }
}

impl Serialize for FiniteWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FiniteWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Word for FiniteWord {
    /// Symbols outside the stored range read as 0.
    fn symbol_at(&self, n: i64) -> u8 {
        let i = n - self.origin;
        if i < 0 || i >= self.bits.len() as i64 {
            0
        } else {
            self.bits[i as usize]
        }
    }
}

/// `Y(n) = period[(n - phase) mod k]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicWord {
    period: FiniteWord,
    phase: i64,
    #[serde(skip)]
    sturmian: bool,
}

impl PeriodicWord {
    pub fn new(period: FiniteWord, phase: i64) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidWord("period must be nonempty".into()));
        }
        let period = FiniteWord::new(period.bits);
        Ok(Self { period, phase, sturmian: false })
    }

    /// Builds a periodic word and checks that its period is a factor of a
    /// Sturmian word for `phi`.
    pub fn new_sturmian(phi: &QuadraticIrrational, period: FiniteWord, phase: i64, convention: Convention) -> Result<Self> {
        let factors = sturmian_factors(phi, period.len(), convention)?;
        if !factors.iter().any(|(w, _)| w.bits == period.bits) {
            return Err(Error::InvalidWord(format!("{period} is not a factor of a Sturmian word for phi = {phi}")));
        }
        let mut w = Self::new(period, phase)?;
        w.sturmian = true;
        Ok(w)
    }

    pub fn period(&self) -> &FiniteWord {
        &self.period
    }

    pub fn k(&self) -> usize {
        self.period.len()
    }

    pub fn phase(&self) -> i64 {
        self.phase
    }

    pub fn is_periodically_sturmian(&self) -> bool {
        self.sturmian
    }

    /// Frequency of 1's, `ones / k`.
    pub fn ones_frequency(&self) -> f64 {
        self.period.ones() as f64 / self.k() as f64
    }

    /// Occurrences of `p` starting in one period, i.e. counted cyclically.
    pub fn cyclic_count(&self, p: &FiniteWord) -> usize {
        let k = self.k();
        let bits = self.period.bits();
        (0..k).filter(|&s| p.bits().iter().enumerate().all(|(j, &b)| bits[(s + j) % k] == b)).count()
    }

    /// `c[r] = #{y in period : Y(y) = Y(y + r) = 1}` for `r = 0..k`.
    pub fn cyclic_autocorrelation(&self) -> Vec<u64> {
        let k = self.k();
        let bits = self.period.bits();
        let ones: Vec<usize> = (0..k).filter(|&i| bits[i] == 1).collect();
        (0..k).map(|r| ones.iter().filter(|&&y| bits[(y + r) % k] == 1).count() as u64).collect()
    }
}

impl Word for PeriodicWord {
    fn symbol_at(&self, n: i64) -> u8 {
        let k = self.k() as i64;
        self.period.bits[(n - self.phase).rem_euclid(k) as usize]
    }

    fn fill(&self, start: i64, len: usize) -> Vec<u8> {
        let k = self.k();
        let mut idx = (start - self.phase).rem_euclid(k as i64) as usize;
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(self.period.bits[idx]);
            idx += 1;
            if idx == k {
                idx = 0;
            }
        }
        out
    }
}

/// The periodic word tiling `X(0..k)` of the Sturmian word `X = (phi, x0)`, phase 0.
pub fn periodic_sturmian(phi: &QuadraticIrrational, k: usize, x0: &QuadraticIrrational) -> Result<PeriodicWord> {
    if k == 0 {
        return Err(Error::InvalidArgument("period length k must be at least 1".into()));
    }
    let x = SturmianWord::sturmian(phi, x0, Convention::LeftClosed)?;
    let mut w = PeriodicWord::new(FiniteWord::new(x.fill(0, k)), 0)?;
    w.sturmian = true;
    Ok(w)
}

/// Occurrences of `p` fully inside `w`, overlapping ones included.
pub fn pattern_count(w: &FiniteWord, p: &FiniteWord) -> usize {
    count_in(w.bits(), p.bits())
}

pub(crate) fn count_in(w: &[u8], p: &[u8]) -> usize {
    if p.is_empty() || p.len() > w.len() {
        return 0;
    }
    w.windows(p.len()).filter(|s| *s == p).count()
}

/// Distinct length-`l` factors of `w(0..n)`.
pub fn factor_complexity(w: &dyn Word, l: usize, n: usize) -> usize {
    if l == 0 {
        return 1;
    }
    let bits = w.fill(0, n);
    if l > bits.len() {
        return 0;
    }
    bits.windows(l).collect::<HashSet<_>>().len()
}

/// `count(p in w(0..n)) / (n - |p| + 1)`.
pub fn frequency_estimate(w: &dyn Word, p: &FiniteWord, n: usize) -> Result<Ratio<u64>> {
    if p.is_empty() || n < p.len() {
        return Err(Error::InvalidArgument(format!("need n >= |p| >= 1, got n = {n}, |p| = {}", p.len())));
    }
    let bits = w.fill(0, n);
    let c = count_in(&bits, p.bits()) as u64;
    Ok(Ratio::new(c, (n - p.len() + 1) as u64))
}

/// Per-segment deviation of pattern counts between two words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FluctuationStats {
    pub pattern: FiniteWord,
    pub per_segment_deviation: Vec<i64>,
    pub max_deviation: i64,
    /// Symbols per segment, `k + 1` for the closed segment `[sk, (s+1)k]`.
    pub segment_length: usize,
}

/// Compares `n_p(x[sk, (s+1)k])` with `n_p(y[sk, (s+1)k])` for `s` in `segments`.
pub fn fluctuation_stats(
    x: &dyn Word,
    y: &dyn Word,
    p: &FiniteWord,
    k: usize,
    segments: std::ops::Range<i64>,
) -> Result<FluctuationStats> {
    if k == 0 {
        return Err(Error::InvalidArgument("segment length k must be at least 1".into()));
    }
    let per: Vec<i64> = segments
        .map(|s| {
            let a = s * k as i64;
            let xs = x.fill(a, k + 1);
            let ys = y.fill(a, k + 1);
            count_in(&xs, p.bits()) as i64 - count_in(&ys, p.bits()) as i64
        })
        .collect();
    let max_deviation = per.iter().map(|d| d.abs()).max().unwrap_or(0);
    Ok(FluctuationStats { pattern: p.clone(), per_segment_deviation: per, max_deviation, segment_length: k + 1 })
}

/// `C = 2 max_i (D_i + 2|p_i|)` over a family of fluctuation measurements.
pub fn boundary_constant(stats: &[FluctuationStats]) -> i64 {
    2 * stats.iter().map(|s| s.max_deviation + 2 * s.pattern.len() as i64).max().unwrap_or(0)
}

/// Every length-`l` factor of the Sturmian words for `phi`, with the exact
/// Lebesgue measure of the set of `x0` producing it (its frequency).
///
/// The cylinder of a factor is an interval between consecutive points of
/// `{-j phi}` and `{phi - j phi}`, `0 <= j < l`; each interval is coded at its
/// midpoint, which is never a breakpoint.
pub fn sturmian_factors(
    phi: &QuadraticIrrational,
    l: usize,
    convention: Convention,
) -> Result<Vec<(FiniteWord, QuadraticIrrational)>> {
    check_unit_irrational(phi)?;
    let frame = Frame::for_values([phi])?;
    let fphi = frame.embed(phi);
    let mut cuts: Vec<Pt> = Vec::with_capacity(2 * l + 1);
    for j in 0..l as i64 {
        cuts.push(frame.reduce(&fphi.scale(-j)));
        cuts.push(frame.reduce(&fphi.scale(1 - j)));
    }
    if l == 0 {
        cuts.push(Pt::Small(0, 0));
    }
    cuts.sort_by(|a, b| frame.cmp(a, b));
    cuts.dedup_by(|a, b| frame.cmp(a, b) == Ordering::Equal);
    let n = cuts.len();
    let mut measures: Vec<(FiniteWord, QuadraticIrrational)> = Vec::new();
    for i in 0..n {
        let lo = &cuts[i];
        let hi = if i + 1 < n { cuts[i + 1].clone() } else { cuts[0].add(frame.one()) };
        let len_pt = hi.sub(lo);
        let mid2 = lo.add(&hi);
        let mid = frame.lift(&mid2).div_int(&BigInt::from(2))?.frac();
        let word = SturmianWord::sturmian(phi, &mid, convention)?;
        let f = FiniteWord::new(word.fill(0, l));
        let len = frame.lift(&len_pt);
        match measures.iter_mut().find(|(w, _)| *w == f) {
            Some((_, m)) => *m = &*m + &len,
            None => measures.push((f, len)),
        }
    }
    measures.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(measures)
}

/// Exact frequency of `p` in any Sturmian word for `phi`.
pub fn cylinder_measure(phi: &QuadraticIrrational, p: &FiniteWord) -> Result<QuadraticIrrational> {
    Ok(sturmian_factors(phi, p.len(), Convention::LeftClosed)?
        .into_iter()
        .find(|(w, _)| w.bits == p.bits)
        .map(|(_, m)| m)
        .unwrap_or_else(QuadraticIrrational::zero))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi() -> QuadraticIrrational {
        QuadraticIrrational::from_i64(3, -1, 1, 5).unwrap()
    }

    fn zero() -> QuadraticIrrational {
        QuadraticIrrational::zero()
    }

    #[test]
    fn first_symbols() {
        let x = SturmianWord::sturmian(&phi(), &zero(), Convention::LeftClosed).unwrap();
        assert_eq!(x.window(0, 9).unwrap().to_string(), "0100010001");
        assert_eq!(x.symbol_at(1), 1);
        let y = SturmianWord::sturmian(&phi(), &zero(), Convention::RightClosed).unwrap();
        // n = 0 hits the endpoint 0 and n = 1 hits the endpoint phi
        assert_eq!((y.symbol_at(0), y.symbol_at(1)), (1, 0));
        assert_eq!(x.fill(2, 500), y.fill(2, 500));
        assert_eq!(x.fill(-500, 500), y.fill(-500, 500));
    }

    #[test]
    fn parallel_fill_matches_symbol_at() {
        let x = SturmianWord::sturmian(&phi(), &zero(), Convention::LeftClosed).unwrap();
        let big = x.fill(-70_000, 200_000);
        for i in (0..200_000).step_by(997) {
            assert_eq!(big[i], x.symbol_at(-70_000 + i as i64));
        }
    }

    #[test]
    fn counting() {
        let w: FiniteWord = "0100010001".parse().unwrap();
        assert_eq!(pattern_count(&w, &"1".parse().unwrap()), 3);
        let w: FiniteWord = "0001000".parse().unwrap();
        assert_eq!(pattern_count(&w, &"00".parse().unwrap()), 4);
        assert_eq!(pattern_count(&w, &"000100000".parse().unwrap()), 0);
    }

    #[test]
    fn periodic_words() {
        let y = periodic_sturmian(&phi(), 5, &zero()).unwrap();
        assert_eq!(y.period().to_string(), "01000");
        assert!(y.is_periodically_sturmian());
        assert_eq!(y.window(-5, 4).unwrap().to_string(), "0100001000");
        assert_eq!(serde_json::to_string(&y).unwrap(), r#"{"period":"01000","phase":0}"#);
        let one = periodic_sturmian(&phi(), 1, &zero()).unwrap();
        assert_eq!(one.period().to_string(), "0");
        assert_eq!(y.cyclic_autocorrelation(), vec![1, 0, 0, 0, 0]);
        assert!(PeriodicWord::new_sturmian(&phi(), "0110".parse().unwrap(), 0, Convention::LeftClosed).is_err());
        assert!(PeriodicWord::new_sturmian(&phi(), "00010".parse().unwrap(), 0, Convention::LeftClosed).is_ok());
    }

    #[test]
    fn factors_have_complexity_l_plus_one() {
        for l in 1..=8 {
            let f = sturmian_factors(&phi(), l, Convention::LeftClosed).unwrap();
            assert_eq!(f.len(), l + 1, "l = {l}");
            let total = f.iter().fold(zero(), |acc, (_, m)| &acc + m);
            assert_eq!(total, QuadraticIrrational::one());
        }
        let one = cylinder_measure(&phi(), &"1".parse().unwrap()).unwrap();
        assert_eq!(one, QuadraticIrrational::from_i64(-2, 1, 1, 5).unwrap());
    }

    #[test]
    fn finite_word_roundtrip() {
        let w: FiniteWord = "0110".parse().unwrap();
        assert_eq!(serde_json::to_string(&w).unwrap(), "\"0110\"");
        assert!("01x".parse::<FiniteWord>().is_err());
        assert_eq!(w.complement().to_string(), "1001");
        assert_eq!(FiniteWord::all_up_to(3).len(), 14);
    }
}
