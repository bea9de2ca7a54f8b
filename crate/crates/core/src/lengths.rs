//! Closed-form lengths of twisted cyclic summands modulo and killed by `E`.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};

use crate::error::{Error, Result};
use crate::module::{CyclicSummand, FiltrationPieces};
use crate::ring::{checked_pow, dvr_valuation, DvrValuation, EisensteinPoly, RingParams, TruncatedSeries};

static FAULT: AtomicBool = AtomicBool::new(false);

/// Makes the `p`-torsion fast path off by one. Used to check that the oracle
/// cross-checks in `verify` catch a wrong formula.
#[doc(hidden)]
pub fn inject_fault(on: bool) {
    FAULT.store(on, Ordering::SeqCst);
}

fn twisted(p: u64, n: u32, x: u64) -> Result<u64> {
    checked_pow(p, n)
        .and_then(|q| q.checked_mul(x))
        .ok_or_else(|| Error::Overflow(format!("{p}^{n} * {x}")))
}

/// Whether `(p, e, alpha)` lies where `min(e, p^n alpha)` is the valuation of `E`:
/// `1 <= alpha <= floor(e/(p-1)) < p`, together with `alpha < e` and `p alpha != e`
/// so that no two leading terms can cancel.
pub fn in_fast_window(p: u64, e: u64, alpha: u64) -> bool {
    let bound = e / (p - 1);
    alpha >= 1 && alpha <= bound && bound < p && alpha < e && p * alpha != e
}

/// Valuation of `E` in `S / (u^{p^n alpha} + p phi^n(unit))`, computed by digit
/// substitution at increasing `p`-adic precision.
pub fn true_upsilon(e: &EisensteinPoly, alpha: u64, unit: &TruncatedSeries, n: u32) -> Result<u64> {
    let p = e.p();
    let a_n = twisted(p, n, alpha)?;
    let deg = e.degree() as u64;
    let mut last_err = None;
    for m in 2u32.. {
        let u_prec = (m as u64 * a_n + 1).max(deg + 1);
        let u_prec = usize::try_from(u_prec).map_err(|_| Error::Overflow("valuation precision".into()))?;
        let params = match RingParams::new(p, m, u_prec) {
            Ok(r) => r,
            Err(_) => break,
        };
        let x = TruncatedSeries::from_coeffs(params, &unit.signed_coeffs());
        if let Some(needed) = x.frobenius_loss(n) {
            return Err(Error::precision("twisting unit", needed, u_prec as u64));
        }
        match dvr_valuation(&e.to_series(params)?, a_n, &x.frobenius(n)) {
            Ok(DvrValuation::Finite(v)) => return Ok(v),
            Ok(DvrValuation::Infinite) => unreachable!("E is nonzero"),
            Err(err) if err.is_precision() => last_err = Some(err),
            Err(err) => return Err(err),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Overflow("valuation precision".into())))
}

/// `upsilon_n(E)` for `E = u^e - p` and `f = u^alpha + p`.
pub fn upsilon_n_e(p: u64, e: u64, alpha: u64, n: u32) -> Result<u64> {
    if in_fast_window(p, e, alpha) {
        return Ok(e.min(twisted(p, n, alpha)?));
    }
    let poly = EisensteinPoly::default_for(p, e as usize)?;
    let one = TruncatedSeries::one(RingParams::new(p, 1, 1)?);
    true_upsilon(&poly, alpha, &one, n)
}

/// `upsilon_n(E)` for an arbitrary Eisenstein `E` and unit.
fn upsilon_general(e: &EisensteinPoly, alpha: u64, unit: &TruncatedSeries, n: u32) -> Result<u64> {
    if in_fast_window(e.p(), e.degree() as u64, alpha) {
        return Ok((e.degree() as u64).min(twisted(e.p(), n, alpha)?));
    }
    true_upsilon(e, alpha, unit, n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationTable {
    pub p: u64,
    pub e: u64,
    pub alpha: u64,
    pub values: BTreeMap<u32, u64>,
}

impl ValuationTable {
    pub fn new(p: u64, e: u64, alpha: u64, n_max: u32) -> Result<Self> {
        let values = (0..=n_max)
            .map(|n| upsilon_n_e(p, e, alpha, n).map(|v| (n, v)))
            .collect::<Result<_>>()?;
        Ok(ValuationTable { p, e, alpha, values })
    }

    /// Monotone, capped by `e` and constant from `n = 2` on.
    pub fn is_well_shaped(&self) -> bool {
        let v: Vec<u64> = self.values.values().copied().collect();
        v.windows(2).all(|w| w[0] <= w[1])
            && v.iter().all(|&x| x <= self.e)
            && v.iter().skip(2).all(|&x| x == self.e)
    }
}

fn p_torsion_term(e: u64, r_n: u64) -> u64 {
    let v = e.min(r_n);
    if FAULT.load(Ordering::Relaxed) && r_n < e {
        v + 1
    } else {
        v
    }
}

/// `sum_j min(upsilon_n(E), p^n r_j)` over `u`-power torsion summands, with
/// `upsilon_n(E) = e` for `p`-torsion summands.
pub fn len_u_torsion_sum(summands: &[CyclicSummand], e: &EisensteinPoly, n: u32) -> Result<u64> {
    let p = e.p();
    let deg = e.degree() as u64;
    let mut total = 0;
    for s in summands {
        total += match s {
            CyclicSummand::PUr { a: 1, r } => p_torsion_term(deg, twisted(p, n, *r)?),
            CyclicSummand::PUr { .. } => return Err(Error::MixedPPower(s.to_string())),
            CyclicSummand::FUr { alpha, unit, r } => {
                upsilon_general(e, *alpha, unit, n)?.min(twisted(p, n, *r)?)
            }
            _ => {
                return Err(Error::InvalidSummand(format!("{s} is not u-power torsion")));
            }
        };
    }
    Ok(total)
}

/// Length of `S / (p^a, u^R, E) = O_K / (p^a, pi^R)`, summed over the layers
/// `p^j X / p^{j+1} X`, each a quotient of `O_K / p` of length at most `e`.
fn p_adic_devissage(e: u64, a: u64, r_n: u64) -> u64 {
    (0..a).map(|j| r_n.saturating_sub(e * j).min(e)).sum()
}

/// E-torsion (equivalently mod-`E`) length of a `u`-power torsion module in summand form.
pub fn len_u_torsion_general(summands: &[CyclicSummand], e: &EisensteinPoly, n: u32) -> Result<u64> {
    let p = e.p();
    let deg = e.degree() as u64;
    let mut total = 0;
    for s in summands {
        total += match s {
            CyclicSummand::PUr { a: 1, .. } | CyclicSummand::FUr { .. } => {
                len_u_torsion_sum(std::slice::from_ref(s), e, n)?
            }
            CyclicSummand::PUr { a, r } => p_adic_devissage(deg, *a, twisted(p, n, *r)?),
            _ => {
                return Err(Error::InvalidSummand(format!("{s} is not u-power torsion")));
            }
        };
    }
    Ok(total)
}

fn check_params(params: RingParams, e: &EisensteinPoly) -> Result<()> {
    if params.p() != e.p() {
        return Err(Error::ParamsMismatch);
    }
    Ok(())
}

pub(crate) fn e_torsion_of_summands(
    summands: &[CyclicSummand],
    params: RingParams,
    e: &EisensteinPoly,
    n: u32,
) -> Result<u64> {
    check_params(params, e)?;
    let torsion: Vec<CyclicSummand> = summands
        .iter()
        .filter(|s| s.is_u_infty_torsion())
        .cloned()
        .collect();
    len_u_torsion_general(&torsion, e, n)
}

pub(crate) fn mod_e_of_summands(
    summands: &[CyclicSummand],
    params: RingParams,
    e: &EisensteinPoly,
    n: u32,
    p_infty_only: bool,
) -> Result<u64> {
    check_params(params, e)?;
    let deg = e.degree() as u64;
    let mut total = 0;
    for s in summands {
        total += match s {
            CyclicSummand::Free if p_infty_only => 0,
            CyclicSummand::Free => {
                return Err(Error::InfiniteModule("S/E is a free O_K-module".into()));
            }
            CyclicSummand::Ppow { a } => deg * a,
            _ => len_u_torsion_general(std::slice::from_ref(s), e, n)?,
        };
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenBKTotal {
    pub etor: u64,
    pub mod_e_pinfty: u64,
}

pub fn len_genbk_total(pieces: &FiltrationPieces, e: &EisensteinPoly, n: u32) -> Result<GenBKTotal> {
    let c = pieces.length_contributions(e, n)?;
    Ok(GenBKTotal {
        etor: pieces.u_infty.e_torsion_length(e, n)?,
        mod_e_pinfty: c.total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::BKModule;

    fn eis(p: u64, e: usize) -> EisensteinPoly {
        EisensteinPoly::default_for(p, e).unwrap()
    }

    #[test]
    fn upsilon_case_table() {
        assert_eq!(upsilon_n_e(3, 7, 3, 0).unwrap(), 3);
        assert_eq!(upsilon_n_e(3, 7, 3, 1).unwrap(), 7);
        assert_eq!(upsilon_n_e(3, 7, 3, 2).unwrap(), 7);
        let t = ValuationTable::new(3, 7, 3, 4).unwrap();
        assert!(t.is_well_shaped());
    }

    #[test]
    fn upsilon_outside_window_uses_true_valuation() {
        // p alpha = e: u^2 - 2 = -4 in S/(u^2 + 2), valuation 2 * 2 = 4 > e
        assert_eq!(upsilon_n_e(2, 2, 1, 1).unwrap(), 4);
        // alpha = e: u - 2 = -4 in S/(u + 2)
        assert_eq!(upsilon_n_e(2, 1, 1, 0).unwrap(), 2);
    }

    #[test]
    fn u_torsion_sum_examples() {
        let s = vec![
            CyclicSummand::pur(1, 2).unwrap(),
            CyclicSummand::pur(1, 5).unwrap(),
        ];
        assert_eq!(len_u_torsion_sum(&s, &eis(3, 4), 1).unwrap(), 8);
        assert_eq!(len_u_torsion_sum(&[], &eis(3, 4), 1).unwrap(), 0);
        let r = RingParams::new(2, 4, 16).unwrap();
        let f = vec![CyclicSummand::fur_one(r, 1, 3).unwrap()];
        assert_eq!(len_u_torsion_sum(&f, &eis(2, 3), 2).unwrap(), 3);
        let mixed = vec![CyclicSummand::pur(2, 1).unwrap()];
        assert!(matches!(
            len_u_torsion_sum(&mixed, &eis(2, 2), 0),
            Err(Error::MixedPPower(_))
        ));
    }

    #[test]
    fn devissage_matches_direct_count() {
        // Z/4 with E acting as -2: kernel {0, 2}
        let s = vec![CyclicSummand::pur(2, 1).unwrap()];
        assert_eq!(len_u_torsion_general(&s, &eis(2, 2), 0).unwrap(), 1);
        let s = vec![CyclicSummand::pur(2, 2).unwrap()];
        assert_eq!(len_u_torsion_general(&s, &eis(2, 3), 1).unwrap(), 4);
    }

    #[test]
    fn gen_bk_total_examples() {
        let r = RingParams::new(2, 4, 16).unwrap();
        let e3 = eis(2, 3);
        let zero = FiltrationPieces::zero(r);
        assert_eq!(
            len_genbk_total(&zero, &e3, 0).unwrap(),
            GenBKTotal {
                etor: 0,
                mod_e_pinfty: 0
            }
        );

        let m = BKModule::from_summands(r, vec![CyclicSummand::pur(1, 1).unwrap()]).unwrap();
        let pieces = m.filtration().unwrap();
        assert_eq!(
            len_genbk_total(&pieces, &e3, 1).unwrap(),
            GenBKTotal {
                etor: 2,
                mod_e_pinfty: 2
            }
        );

        let m =
            BKModule::from_summands(r, vec![CyclicSummand::ppow(1).unwrap(), CyclicSummand::Free]).unwrap();
        let mbar = BKModule::from_summands(r, vec![CyclicSummand::pur(1, 2).unwrap()]).unwrap();
        let pieces = m.filtration().unwrap().with_mbar(mbar);
        assert_eq!(
            len_genbk_total(&pieces, &eis(2, 2), 0).unwrap(),
            GenBKTotal {
                etor: 0,
                mod_e_pinfty: 4
            }
        );
    }
}
