use std::cmp::Ordering;
use std::sync::Arc as Shared;

use num_bigint::BigInt;
use proptest::prelude::*;

use sturmlab::cf::{cf_expand, convergents};
use sturmlab::ergodicity::{hitting_count_in, FrameMode};
use sturmlab::forbidden::ForbiddenModel;
use sturmlab::hamiltonian::HamiltonianSpec;
use sturmlab::quad::{Arc, QuadraticIrrational as Quad};
use sturmlab::word::{
    factor_complexity, fluctuation_stats, periodic_sturmian, pattern_count, Convention, FiniteWord, SturmianWord, Word,
};

fn phi() -> Quad {
    Quad::from_i64(3, -1, 1, 5).unwrap()
}

/// `x * 10^40`, truncated, through integer square roots only.
fn scaled(p: i64, q: i64, r: i64, d: u64) -> BigInt {
    let s = BigInt::from(10u32).pow(40);
    let root = (BigInt::from(d) * &s * &s).sqrt();
    let num = BigInt::from(p) * &s + BigInt::from(q) * root;
    num / BigInt::from(r)
}

fn x0_strategy() -> impl Strategy<Value = Quad> {
    (0i64..200, 1i64..200, 1i64..97).prop_map(|(a, b, r)| Quad::from_i64(a, b, r, 5).unwrap().frac())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn comparison_matches_fixed_point(p1 in -50i64..50, q1 in -20i64..20, r1 in 1i64..30,
                                      p2 in -50i64..50, q2 in -20i64..20, r2 in 1i64..30,
                                      d in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let x = Quad::from_i64(p1, q1, r1, d).unwrap();
        let y = Quad::from_i64(p2, q2, r2, d).unwrap();
        let (fx, fy) = (scaled(p1, q1, r1, d), scaled(p2, q2, r2, d));
        let gap: BigInt = &fx - &fy;
        prop_assume!(gap.magnitude() > &num_bigint::BigUint::from(10u32));
        prop_assert_eq!(x.try_cmp(&y).unwrap(), fx.cmp(&fy));
    }

    #[test]
    fn floor_and_fraction_reconstruct(p in -500i64..500, q in -100i64..100, r in 1i64..60) {
        let x = Quad::from_i64(p, q, r, 5).unwrap();
        let (n, f) = x.floor_frac();
        prop_assert!(f >= Quad::zero() && f < Quad::one());
        prop_assert_eq!(Quad::integer(n) + f, x);
    }

    #[test]
    fn sturmian_words_are_balanced(x0 in x0_strategy(), len in 1usize..40) {
        let w = SturmianWord::sturmian(&phi(), &x0, Convention::LeftClosed).unwrap();
        let bits = w.fill(-300, 900);
        let ones: Vec<usize> = bits.windows(len).map(|s| s.iter().filter(|&&b| b == 1).count()).collect();
        let lo = *ones.iter().min().unwrap();
        let hi = *ones.iter().max().unwrap();
        prop_assert!(hi - lo <= 1);
    }

    #[test]
    fn factor_complexity_is_n_plus_one(x0 in x0_strategy(), l in 1usize..16) {
        let w = SturmianWord::sturmian(&phi(), &x0, Convention::LeftClosed).unwrap();
        prop_assert_eq!(factor_complexity(&w, l, 20_000), l + 1);
    }

    #[test]
    fn parallel_fill_matches_pointwise(x0 in x0_strategy(), start in -100_000i64..100_000) {
        let w = SturmianWord::sturmian(&phi(), &x0, Convention::RightClosed).unwrap();
        let bulk = w.fill(start, 70_000);
        for i in (0..70_000).step_by(977) {
            prop_assert_eq!(bulk[i], w.symbol_at(start + i as i64));
        }
    }

    #[test]
    fn sturmian_windows_satisfy_the_characterization(x0 in x0_strategy(), start in -1_000_000i64..1_000_000) {
        let m = ForbiddenModel::new(&phi()).unwrap();
        let w = SturmianWord::sturmian(&phi(), &x0, Convention::LeftClosed).unwrap();
        let bits = w.fill(start, 20_000);
        let r = m.verify_characterization(&bits, start, 200);
        prop_assert!(r.absence_holds());
    }

    #[test]
    fn sturmian_energy_vanishes_and_scales(x0 in x0_strategy(), alpha in 1.05f64..4.0, scale in 0.1f64..10.0) {
        let h = HamiltonianSpec::new(alpha, Shared::new(ForbiddenModel::new(&phi()).unwrap())).unwrap();
        let x = SturmianWord::sturmian(&phi(), &x0, Convention::LeftClosed).unwrap();
        prop_assert_eq!(h.window_energy(&x.window(0, 4095).unwrap()), 0.0);
        let y = periodic_sturmian(&phi(), 13, &x0).unwrap();
        let w = y.window(0, 2000).unwrap();
        let base = h.window_energy_breakdown(&w);
        let scaled = h.clone().with_pair_scale(scale).unwrap().window_energy_breakdown(&w);
        prop_assert!((scaled.pair - scale * base.pair).abs() <= 1e-9 * (1.0 + scaled.pair.abs()));
        prop_assert_eq!(scaled.zero_run, base.zero_run);
    }

    #[test]
    fn proof_frame_preserves_hit_counts(x0 in x0_strategy(), k in 1u64..400, d in 1u64..8) {
        let p = Arc::closed(Quad::one() - phi(), phi()).unwrap();
        let a = hitting_count_in(&phi(), &x0, k, d, &p, FrameMode::Original).unwrap();
        let b = hitting_count_in(&phi(), &x0, k, d, &p, FrameMode::Proof).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn window_counts_respect_the_boundary_bound(x0 in x0_strategy(), k in 2usize..80, m in 1i64..4,
                                                pat in prop::sample::select(FiniteWord::all_up_to(3))) {
        let x = SturmianWord::sturmian(&phi(), &x0, Convention::LeftClosed).unwrap();
        let y = periodic_sturmian(&phi(), k, &x0).unwrap();
        let stats = fluctuation_stats(&x, &y, &pat, k, -m..m).unwrap();
        let a = -m * k as i64;
        let b = m * k as i64;
        let nx = pattern_count(&x.window(a, b).unwrap(), &pat) as i64;
        let ny = pattern_count(&y.window(a, b).unwrap(), &pat) as i64;
        let bound = 2 * m * (stats.max_deviation + 2 * pat.len() as i64);
        prop_assert!((nx - ny).abs() <= bound);
    }

    #[test]
    fn finite_words_round_trip(bits in prop::collection::vec(0u8..2, 0..64)) {
        let w = FiniteWord::new(bits);
        let back: FiniteWord = w.to_string().parse().unwrap();
        prop_assert_eq!(back, w);
    }
}

#[test]
fn convergents_approximate_to_second_order() {
    for x in [phi(), Quad::from_i64(-1, 1, 2, 5).unwrap(), Quad::from_i64(0, 1, 1, 2).unwrap().frac()] {
        let cf = cf_expand(&x, 64).unwrap();
        for (p, q) in convergents(&cf, 20).unwrap().into_iter().skip(1) {
            let err = &x.mul_int(&q) - &Quad::integer(p);
            let lhs = err.mul_int(&q);
            let abs = if lhs.signum() == Ordering::Less { -lhs } else { lhs };
            assert!(abs < Quad::one(), "|q (q x - p)| must be below 1");
        }
    }
}
