//! Generalized Breuil-Kisin modules in two forms: a sorted list of cyclic
//! summands, and an explicit presentation `S^g / (relations)`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::lengths;
use crate::oracle;
use crate::ring::{checked_pow, EisensteinPoly, RingParams, TruncatedSeries};

/// One cyclic summand of a module in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CyclicSummand {
    /// `S`
    Free,
    /// `S / p^a`
    Ppow { a: u64 },
    /// `S / (p^a, u^r)`
    PUr { a: u64, r: u64 },
    /// `S / (u^alpha + p*unit, u^r)` with `unit` a unit.
    FUr {
        alpha: u64,
        unit: TruncatedSeries,
        r: u64,
    },
}

impl CyclicSummand {
    pub fn ppow(a: u64) -> Result<Self> {
        if a == 0 {
            return Err(Error::InvalidSummand("Ppow exponent must be positive".into()));
        }
        Ok(CyclicSummand::Ppow { a })
    }

    pub fn pur(a: u64, r: u64) -> Result<Self> {
        if a == 0 || r == 0 {
            return Err(Error::InvalidSummand("PUr exponents must be positive".into()));
        }
        Ok(CyclicSummand::PUr { a, r })
    }

    pub fn fur(alpha: u64, unit: TruncatedSeries, r: u64) -> Result<Self> {
        if alpha == 0 || r == 0 {
            return Err(Error::InvalidSummand("FUr exponents must be positive".into()));
        }
        if !unit.is_unit() {
            return Err(Error::InvalidSummand(format!("FUr unit {unit} is not a unit")));
        }
        Ok(CyclicSummand::FUr { alpha, unit, r })
    }

    /// `FUr(alpha, 1, r)`.
    pub fn fur_one(params: RingParams, alpha: u64, r: u64) -> Result<Self> {
        Self::fur(alpha, TruncatedSeries::one(params), r)
    }

    fn rank(&self) -> u8 {
        match self {
            CyclicSummand::Free => 0,
            CyclicSummand::Ppow { .. } => 1,
            CyclicSummand::PUr { .. } => 2,
            CyclicSummand::FUr { .. } => 3,
        }
    }

    pub fn is_u_infty_torsion(&self) -> bool {
        matches!(self, CyclicSummand::PUr { .. } | CyclicSummand::FUr { .. })
    }

    /// Exponent `t` with `p^t` killing the summand, if it is `p`-power torsion.
    pub fn p_exponent(&self) -> Option<u64> {
        match self {
            CyclicSummand::Free => None,
            CyclicSummand::Ppow { a } | CyclicSummand::PUr { a, .. } => Some(*a),
            CyclicSummand::FUr { alpha, r, .. } => Some(r.div_ceil(*alpha)),
        }
    }

    pub fn twist(&self, n: u32, p: u64) -> Result<Self> {
        let scale = |x: u64| {
            checked_pow(p, n)
                .and_then(|q| q.checked_mul(x))
                .ok_or_else(|| Error::Overflow(format!("{p}^{n} * {x}")))
        };
        Ok(match self {
            CyclicSummand::Free | CyclicSummand::Ppow { .. } => self.clone(),
            CyclicSummand::PUr { a, r } => CyclicSummand::PUr { a: *a, r: scale(*r)? },
            CyclicSummand::FUr { alpha, unit, r } => {
                if let Some(needed) = unit.frobenius_loss(n) {
                    return Err(Error::precision(
                        "twisting FUr unit",
                        needed,
                        unit.params().u_prec() as u64,
                    ));
                }
                CyclicSummand::FUr {
                    alpha: scale(*alpha)?,
                    unit: unit.frobenius(n),
                    r: scale(*r)?,
                }
            }
        })
    }
}

impl Ord for CyclicSummand {
    fn cmp(&self, other: &Self) -> Ordering {
        use CyclicSummand::*;
        self.rank().cmp(&other.rank()).then_with(|| match (self, other) {
            (Ppow { a }, Ppow { a: b }) => a.cmp(b),
            (PUr { a, r }, PUr { a: b, r: s }) => a.cmp(b).then(r.cmp(s)),
            (
                FUr { alpha, unit, r },
                FUr {
                    alpha: beta,
                    unit: v,
                    r: s,
                },
            ) => alpha
                .cmp(beta)
                .then(r.cmp(s))
                .then_with(|| unit.coeffs().cmp(v.coeffs())),
            _ => Ordering::Equal,
        })
    }
}

impl PartialOrd for CyclicSummand {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CyclicSummand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CyclicSummand::Free => write!(f, "Free"),
            CyclicSummand::Ppow { a } => write!(f, "Ppow({a})"),
            CyclicSummand::PUr { a, r } => write!(f, "PUr({a},{r})"),
            CyclicSummand::FUr { alpha, unit, r } => {
                let c = unit.signed_coeffs();
                let last = c.iter().rposition(|&x| x != 0).unwrap_or(0);
                let unit: Vec<String> = c[..=last].iter().map(|x| x.to_string()).collect();
                write!(f, "FUr({alpha},[{}],{r})", unit.join(" "))
            }
        }
    }
}

/// A presentation `S^generators / (rows)`; each relation row has one entry per generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    generators: usize,
    relations: Vec<Vec<TruncatedSeries>>,
}

impl Presentation {
    pub fn new(params: RingParams, generators: usize, relations: Vec<Vec<TruncatedSeries>>) -> Result<Self> {
        for (i, row) in relations.iter().enumerate() {
            if row.len() != generators {
                return Err(Error::DimensionMismatch(format!(
                    "relation {i} has {} entries for {generators} generators",
                    row.len()
                )));
            }
            if row.iter().any(|s| s.params() != params) {
                return Err(Error::ParamsMismatch);
            }
        }
        Ok(Presentation {
            generators,
            relations,
        })
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &[Vec<TruncatedSeries>] {
        &self.relations
    }

    pub fn twist(&self, n: u32) -> Result<Self> {
        let mut relations = Vec::with_capacity(self.relations.len());
        for row in &self.relations {
            let mut out = Vec::with_capacity(row.len());
            for s in row {
                if let Some(needed) = s.frobenius_loss(n) {
                    return Err(Error::precision(
                        "twisting presentation",
                        needed,
                        s.params().u_prec() as u64,
                    ));
                }
                out.push(s.frobenius(n));
            }
            relations.push(out);
        }
        Ok(Presentation {
            generators: self.generators,
            relations,
        })
    }

    pub fn reembed(&self, params: RingParams) -> Result<Self> {
        let relations = self
            .relations
            .iter()
            .map(|row| row.iter().map(|s| s.reembed(params)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Presentation {
            generators: self.generators,
            relations,
        })
    }

    /// Block-diagonal presentation of the direct sum.
    pub fn direct_sum(&self, other: &Presentation, params: RingParams) -> Presentation {
        let zero = TruncatedSeries::zero(params);
        let generators = self.generators + other.generators;
        let mut relations = Vec::with_capacity(self.relations.len() + other.relations.len());
        for row in &self.relations {
            let mut r = row.clone();
            r.resize(generators, zero.clone());
            relations.push(r);
        }
        for row in &other.relations {
            let mut r = vec![zero.clone(); self.generators];
            r.extend(row.iter().cloned());
            relations.push(r);
        }
        Presentation {
            generators,
            relations,
        }
    }

    /// Adds the relations `s * e_i` for every generator.
    pub fn with_scalar_relation(&self, s: &TruncatedSeries) -> Self {
        let mut relations = self.relations.clone();
        let zero = TruncatedSeries::zero(s.params());
        for i in 0..self.generators {
            let mut row = vec![zero.clone(); self.generators];
            row[i] = s.clone();
            relations.push(row);
        }
        Presentation {
            generators: self.generators,
            relations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BKModule {
    params: RingParams,
    summands: Option<Vec<CyclicSummand>>,
    presentation: Option<Presentation>,
}

impl BKModule {
    pub fn zero(params: RingParams) -> Self {
        BKModule {
            params,
            summands: Some(Vec::new()),
            presentation: None,
        }
    }

    pub fn from_summands(params: RingParams, mut summands: Vec<CyclicSummand>) -> Result<Self> {
        for s in &summands {
            if let CyclicSummand::FUr { unit, .. } = s {
                if unit.params() != params {
                    return Err(Error::ParamsMismatch);
                }
            }
        }
        summands.sort();
        Ok(BKModule {
            params,
            summands: Some(summands),
            presentation: None,
        })
    }

    pub fn from_presentation(params: RingParams, presentation: Presentation) -> Self {
        BKModule {
            params,
            summands: None,
            presentation: Some(presentation),
        }
    }

    /// Attaches a presentation to a summand-form module. The two forms are
    /// assumed isomorphic; `oracle::forms_agree` checks it at desk scale.
    pub fn with_presentation(mut self, presentation: Presentation) -> Self {
        self.presentation = Some(presentation);
        self
    }

    pub fn params(&self) -> RingParams {
        self.params
    }

    pub fn summands(&self) -> Option<&[CyclicSummand]> {
        self.summands.as_deref()
    }

    pub fn presentation(&self) -> Option<&Presentation> {
        self.presentation.as_ref()
    }

    pub fn is_zero_syntactically(&self) -> bool {
        self.summands.as_ref().is_some_and(|s| s.is_empty())
    }

    pub fn is_u_infty_torsion(&self) -> Option<bool> {
        self.summands
            .as_ref()
            .map(|s| s.iter().all(CyclicSummand::is_u_infty_torsion))
    }

    /// Presentation built from summands when none was supplied.
    pub fn to_presentation(&self) -> Result<Presentation> {
        if let Some(p) = &self.presentation {
            return Ok(p.clone());
        }
        let summands = self.summands.as_ref().expect("one form is always present");
        let params = self.params;
        let g = summands.len();
        let zero = TruncatedSeries::zero(params);
        let p_pow = |a: u64| -> Result<TruncatedSeries> {
            if a >= params.p_prec() as u64 {
                return Err(Error::precision("relation p^a", a + 1, params.p_prec() as u64));
            }
            Ok(TruncatedSeries::constant(params, params.p().pow(a as u32) as i64))
        };
        let u_pow = |r: u64| -> Result<TruncatedSeries> {
            if r >= params.u_prec() as u64 {
                return Err(Error::precision("relation u^r", r + 1, params.u_prec() as u64));
            }
            Ok(TruncatedSeries::monomial(params, 1, r as usize))
        };
        let mut relations = Vec::new();
        for (i, s) in summands.iter().enumerate() {
            let mut rels = Vec::new();
            match s {
                CyclicSummand::Free => {}
                CyclicSummand::Ppow { a } => rels.push(p_pow(*a)?),
                CyclicSummand::PUr { a, r } => {
                    rels.push(p_pow(*a)?);
                    rels.push(u_pow(*r)?);
                }
                CyclicSummand::FUr { alpha, unit, r } => {
                    rels.push(binomial(params, *alpha, unit)?);
                    rels.push(u_pow(*r)?);
                }
            }
            for rel in rels {
                let mut row = vec![zero.clone(); g];
                row[i] = rel;
                relations.push(row);
            }
        }
        Presentation::new(params, g, relations)
    }

    /// Same module with relations read at a different precision.
    pub fn with_params(&self, params: RingParams) -> Result<Self> {
        let summands = match &self.summands {
            Some(s) => Some(
                s.iter()
                    .map(|x| match x {
                        CyclicSummand::FUr { alpha, unit, r } => Ok(CyclicSummand::FUr {
                            alpha: *alpha,
                            unit: unit.reembed(params)?,
                            r: *r,
                        }),
                        other => Ok(other.clone()),
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        let presentation = self
            .presentation
            .as_ref()
            .map(|p| p.reembed(params))
            .transpose()?;
        Ok(BKModule {
            params,
            summands,
            presentation,
        })
    }

    pub fn direct_sum(&self, other: &BKModule) -> Result<BKModule> {
        if self.params != other.params {
            return Err(Error::ParamsMismatch);
        }
        match (&self.summands, &other.summands) {
            (Some(a), Some(b)) => BKModule::from_summands(self.params, a.iter().chain(b).cloned().collect()),
            _ => {
                let pres = self
                    .to_presentation()?
                    .direct_sum(&other.to_presentation()?, self.params);
                Ok(BKModule::from_presentation(self.params, pres))
            }
        }
    }

    /// Base change along the `n`-th power of Frobenius.
    pub fn twist(&self, n: u32) -> Result<BKModule> {
        let p = self.params.p();
        let summands = match &self.summands {
            Some(s) => {
                let mut t = s.iter().map(|x| x.twist(n, p)).collect::<Result<Vec<_>>>()?;
                t.sort();
                Some(t)
            }
            None => None,
        };
        let presentation = self.presentation.as_ref().map(|pr| pr.twist(n)).transpose()?;
        Ok(BKModule {
            params: self.params,
            summands,
            presentation,
        })
    }

    /// `O_K`-length of `M^(n)[E]`.
    pub fn e_torsion_length(&self, e: &EisensteinPoly, n: u32) -> Result<u64> {
        match &self.summands {
            Some(s) => lengths::e_torsion_of_summands(s, self.params, e, n),
            None => oracle::e_torsion_length(self, e, n, oracle::DEFAULT_BUDGET),
        }
    }

    /// `O_K`-length of `M^(n)/E`, or of its `p`-power torsion when `p_infty_only` is set.
    pub fn mod_e_length(&self, e: &EisensteinPoly, n: u32, p_infty_only: bool) -> Result<u64> {
        match &self.summands {
            Some(s) => lengths::mod_e_of_summands(s, self.params, e, n, p_infty_only),
            None => oracle::mod_e_length(self, e, n, p_infty_only),
        }
    }

    /// Canonical pieces of the summand form; `mbar` is zero until supplied.
    pub fn filtration(&self) -> Result<FiltrationPieces> {
        let summands = self.summands.as_ref().ok_or_else(|| {
            Error::UnsupportedSummand(
                "filtration needs summand form; use oracle::brute_force_filtration".into(),
            )
        })?;
        let mut u_infty = Vec::new();
        let mut tor = Vec::new();
        let mut free_rank = 0;
        for s in summands {
            match s {
                CyclicSummand::Free => free_rank += 1,
                CyclicSummand::Ppow { .. } => tor.push(s.clone()),
                _ => u_infty.push(s.clone()),
            }
        }
        Ok(FiltrationPieces {
            u_infty: BKModule::from_summands(self.params, u_infty)?,
            tor_u_tf: BKModule::from_summands(self.params, tor)?,
            free_rank,
            mbar: BKModule::zero(self.params),
        })
    }
}

impl fmt::Display for BKModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.summands, &self.presentation) {
            (Some(s), _) if s.is_empty() => write!(f, "0"),
            (Some(s), _) => {
                let parts: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", parts.join(" + "))
            }
            (None, Some(p)) => write!(
                f,
                "<{} generators, {} relations>",
                p.generators(),
                p.relations().len()
            ),
            (None, None) => unreachable!("a module always has one form"),
        }
    }
}

/// `u^alpha + p * unit`.
pub fn binomial(params: RingParams, alpha: u64, unit: &TruncatedSeries) -> Result<TruncatedSeries> {
    if alpha >= params.u_prec() as u64 {
        return Err(Error::precision("u^alpha", alpha + 1, params.u_prec() as u64));
    }
    TruncatedSeries::monomial(params, 1, alpha as usize).add(&unit.scale(params.p() as i64))
}

/// The four canonical pieces of a generalized Breuil-Kisin module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationPieces {
    pub u_infty: BKModule,
    pub tor_u_tf: BKModule,
    pub free_rank: u64,
    pub mbar: BKModule,
}

impl FiltrationPieces {
    pub fn zero(params: RingParams) -> Self {
        FiltrationPieces {
            u_infty: BKModule::zero(params),
            tor_u_tf: BKModule::zero(params),
            free_rank: 0,
            mbar: BKModule::zero(params),
        }
    }

    pub fn with_mbar(mut self, mbar: BKModule) -> Self {
        self.mbar = mbar;
        self
    }

    /// Shape checks on summand-form pieces.
    pub fn check_shapes(&self) -> Result<()> {
        let bad =
            |what: &str, m: &BKModule| Error::InvalidSummand(format!("{what} piece {m} has the wrong shape"));
        if self.u_infty.is_u_infty_torsion() == Some(false) {
            return Err(bad("u_infty", &self.u_infty));
        }
        if self.mbar.is_u_infty_torsion() == Some(false) {
            return Err(bad("mbar", &self.mbar));
        }
        if let Some(s) = self.tor_u_tf.summands() {
            if s.iter().any(|x| !matches!(x, CyclicSummand::Ppow { .. })) {
                return Err(bad("tor_u_tf", &self.tor_u_tf));
            }
        }
        Ok(())
    }

    /// The three-term decomposition of the length of `(M^(n)/E)[p^inf]`.
    pub fn length_contributions(&self, e: &EisensteinPoly, n: u32) -> Result<LengthContributions> {
        self.check_shapes()?;
        let tor_u_tf_mod_e = self.tor_u_tf.mod_e_length(e, n, false)?;
        let u_infty_mod_e = self.u_infty.mod_e_length(e, n, false)?;
        let mbar_e_torsion = self.mbar.e_torsion_length(e, n)?;
        Ok(LengthContributions {
            tor_u_tf_mod_e,
            u_infty_mod_e,
            mbar_e_torsion,
            total: tor_u_tf_mod_e + u_infty_mod_e + mbar_e_torsion,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LengthContributions {
    pub tor_u_tf_mod_e: u64,
    pub u_infty_mod_e: u64,
    pub mbar_e_torsion: u64,
    pub total: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: u64) -> RingParams {
        RingParams::new(p, 6, 64).unwrap()
    }

    #[test]
    fn twist_examples() {
        let r = params(3);
        let m = BKModule::from_summands(r, vec![CyclicSummand::pur(1, 2).unwrap()]).unwrap();
        let t = m.twist(1).unwrap();
        assert_eq!(t.summands().unwrap(), &[CyclicSummand::PUr { a: 1, r: 6 }]);
        assert_eq!(m.twist(0).unwrap(), m);

        let r2 = params(2);
        let f = BKModule::from_summands(r2, vec![CyclicSummand::fur_one(r2, 1, 2).unwrap()]).unwrap();
        let expected = CyclicSummand::fur_one(r2, 2, 4).unwrap();
        assert_eq!(f.twist(1).unwrap().summands().unwrap(), &[expected]);
    }

    #[test]
    fn twist_composes() {
        let r = params(2);
        let unit = TruncatedSeries::from_coeffs(r, &[1, 3]);
        let m = BKModule::from_summands(
            r,
            vec![
                CyclicSummand::pur(2, 3).unwrap(),
                CyclicSummand::fur(1, unit, 2).unwrap(),
                CyclicSummand::ppow(1).unwrap(),
                CyclicSummand::Free,
            ],
        )
        .unwrap();
        assert_eq!(m.twist(1).unwrap().twist(2).unwrap(), m.twist(3).unwrap());
    }

    #[test]
    fn canonical_order() {
        let r = params(3);
        let a = BKModule::from_summands(
            r,
            vec![
                CyclicSummand::pur(1, 3).unwrap(),
                CyclicSummand::Free,
                CyclicSummand::pur(1, 1).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(a.to_string(), "Free + PUr(1,1) + PUr(1,3)");
    }

    #[test]
    fn invalid_summands() {
        let r = params(3);
        assert!(CyclicSummand::pur(0, 1).is_err());
        assert!(CyclicSummand::fur(1, TruncatedSeries::constant(r, 3), 2).is_err());
        assert!(CyclicSummand::ppow(0).is_err());
    }

    #[test]
    fn filtration_examples() {
        let r = params(3);
        let m = BKModule::from_summands(
            r,
            vec![
                CyclicSummand::pur(1, 3).unwrap(),
                CyclicSummand::ppow(2).unwrap(),
                CyclicSummand::Free,
            ],
        )
        .unwrap();
        let f = m.filtration().unwrap();
        assert_eq!(
            f.u_infty.summands().unwrap(),
            &[CyclicSummand::PUr { a: 1, r: 3 }]
        );
        assert_eq!(f.tor_u_tf.summands().unwrap(), &[CyclicSummand::Ppow { a: 2 }]);
        assert_eq!(f.free_rank, 1);
        assert!(f.mbar.is_zero_syntactically());

        assert_eq!(BKModule::zero(r).filtration().unwrap(), FiltrationPieces::zero(r));

        let fu = BKModule::from_summands(r, vec![CyclicSummand::fur_one(r, 1, 2).unwrap()]).unwrap();
        assert_eq!(fu.filtration().unwrap().u_infty, fu);
    }

    #[test]
    fn presentation_from_summands() {
        let r = RingParams::new(2, 3, 8).unwrap();
        let m =
            BKModule::from_summands(r, vec![CyclicSummand::pur(1, 2).unwrap(), CyclicSummand::Free]).unwrap();
        let pres = m.to_presentation().unwrap();
        assert_eq!(pres.generators(), 2);
        assert_eq!(pres.relations().len(), 2);
        let too_big = BKModule::from_summands(r, vec![CyclicSummand::pur(1, 8).unwrap()]).unwrap();
        assert!(too_big.to_presentation().unwrap_err().is_precision());
    }
}
