//! Property tests: ring laws, Frobenius, constants, and length identities on
//! random small modules checked against the oracle.

use bk_core::conjectures::derive_constants;
use bk_core::lengths::{in_fast_window, ValuationTable};
use bk_core::oracle;
use bk_core::ring::required_u_prec;
use bk_core::{BKModule, CyclicSummand, EisensteinPoly, RingParams, TruncatedSeries};
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7])
}

/// `(params, a, b, c)` for a random cell with `p^m` small enough to stay exact.
fn triple() -> impl Strategy<Value = (RingParams, TruncatedSeries, TruncatedSeries, TruncatedSeries)> {
    (prime(), 1u32..5, 1usize..24).prop_flat_map(|(p, m, big_m)| {
        let params = RingParams::new(p, m, big_m).unwrap();
        let series = prop::collection::vec(-50i64..50, 0..=big_m)
            .prop_map(move |c| TruncatedSeries::from_coeffs(params, &c));
        (Just(params), series.clone(), series.clone(), series)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_laws((_, a, b, c) in triple()) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn frobenius_is_a_ring_map((params, a, b, _) in triple(), n in 0u32..3) {
        prop_assert_eq!(a.add(&b).unwrap().frobenius(n), a.frobenius(n).add(&b.frobenius(n)).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().frobenius(n), a.frobenius(n).mul(&b.frobenius(n)).unwrap());
        prop_assert_eq!(TruncatedSeries::one(params).frobenius(n), TruncatedSeries::one(params));
    }

    #[test]
    fn units_invert((_, a, _, _) in triple()) {
        if a.is_unit() {
            let inv = a.inverse().unwrap();
            prop_assert_eq!(a.mul(&inv).unwrap(), TruncatedSeries::one(a.params()));
        } else {
            prop_assert!(a.inverse().is_err());
        }
    }

    #[test]
    fn eisenstein_is_u_to_the_e_mod_p(p in prime(), e in 1usize..12, seed in prop::collection::vec(-20i64..20, 12), unit in 1i64..7) {
        let mut coeffs: Vec<i64> = seed[..e].iter().map(|c| c * p as i64).collect();
        coeffs[0] = p as i64 * (unit % p as i64).max(1);
        let poly = EisensteinPoly::new(p, coeffs).unwrap();
        let params = RingParams::new(p, 3, 2 * e + 2).unwrap();
        let mut expected = vec![0u64; 2 * e + 2];
        expected[e] = 1;
        prop_assert_eq!(poly.to_series(params).unwrap().mod_p(), expected);
    }

    #[test]
    fn constants_are_minimal(p in prime(), e in 1u64..400) {
        let c = derive_constants(p, e).unwrap();
        prop_assert!(p.pow(c.a) * (p - 1) >= e);
        if c.a > 0 {
            prop_assert!(p.pow(c.a - 1) * (p - 1) < e);
        }
        prop_assert_eq!(c.a == 0, e < p);
        prop_assert!(c.e_tilde * (p - 1) >= e && (c.e_tilde - 1) * (p - 1) < e);
    }

    #[test]
    fn valuation_tables_are_well_shaped(
        (p, e, alpha) in prime().prop_flat_map(|p| (Just(p), 1..p * (p - 1), 1..p)),
    ) {
        prop_assume!(in_fast_window(p, e, alpha));
        prop_assert!(ValuationTable::new(p, e, alpha, 4).unwrap().is_well_shaped());
    }
}

fn summand() -> impl Strategy<Value = (u64, u64, u64)> {
    // (kind, a-or-alpha, r): kind 0 is PUr(a, r), kind 1 is FUr(alpha, 1, r)
    (0u64..2, 1u64..3, 1u64..4)
}

fn small_module(p: u64, e: u64, n: u32, spec: &[(u64, u64, u64)]) -> Option<BKModule> {
    let r_max = spec.iter().map(|s| s.2).max().unwrap_or(1);
    let params = RingParams::new(p, 4, required_u_prec(r_max, e, n, p).ok()?).ok()?;
    let summands = spec
        .iter()
        .map(|&(kind, x, r)| match kind {
            0 => CyclicSummand::pur(x, r),
            _ => CyclicSummand::fur_one(params, x, r),
        })
        .collect::<bk_core::Result<Vec<_>>>()
        .ok()?;
    BKModule::from_summands(params, summands).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Closed forms agree with the oracle on direct sums, and `M[E]` and `M/E`
    /// have equal length because `M` is finite.
    #[test]
    fn sums_match_oracle(
        p in prop::sample::select(vec![2u64, 3]),
        e in 1u64..5,
        n in 0u32..3,
        spec in prop::collection::vec(summand(), 1..3),
    ) {
        let spec: Vec<_> = spec.into_iter().filter(|s| s.0 == 0 || s.1 <= e.div_ceil(p - 1)).collect();
        prop_assume!(!spec.is_empty());
        let Some(m) = small_module(p, e, n, &spec) else { return Ok(()); };
        let poly = EisensteinPoly::default_for(p, e as usize).unwrap();
        let (Ok(fast_tor), Ok(fast_mod)) = (m.e_torsion_length(&poly, n), m.mod_e_length(&poly, n, false)) else {
            return Ok(());
        };
        let oracle_tor = oracle::e_torsion_length(&m, &poly, n, oracle::DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(fast_tor, oracle_tor);
        prop_assert_eq!(fast_tor, fast_mod);
        let parts: u64 = spec
            .iter()
            .map(|s| small_module(p, e, n, &[*s]).unwrap().e_torsion_length(&poly, n).unwrap())
            .sum();
        prop_assert_eq!(fast_tor, parts);
    }
}
