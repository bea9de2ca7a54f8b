//! Quasi-filtered modules of height `i`: a module `M` with an auxiliary `N` and
//! maps `f: M^(1) -> N`, `g: N -> M^(1)`, `h: N -> M`, `h': M -> N` satisfying
//! `g f = E^{i-1}`, `f g = E^{i-1}`, `h' h = E`, `h h' = E` with `h` injective.
//!
//! Maps are matrices over [`TruncatedSeries`]; row `j` is the image of source
//! generator `j`, so the composite "first `F` then `G`" has matrix `F * G`.

use std::fmt;

use crate::error::{Error, Result};
use crate::module::{BKModule, CyclicSummand};
use crate::oracle;
use crate::ring::{ceil_div, EisensteinPoly, RingParams, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleMap {
    rows: Vec<Vec<TruncatedSeries>>,
    target_gens: usize,
}

impl ModuleMap {
    pub fn new(rows: Vec<Vec<TruncatedSeries>>, target_gens: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != target_gens) {
            return Err(Error::DimensionMismatch(format!(
                "row of length {} in a map to {} generators",
                bad.len(),
                target_gens
            )));
        }
        Ok(ModuleMap { rows, target_gens })
    }

    pub fn scalar(s: &TruncatedSeries, n: usize) -> Self {
        let zero = TruncatedSeries::zero(s.params());
        let rows = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| if j == k { s.clone() } else { zero.clone() })
                    .collect()
            })
            .collect();
        ModuleMap { rows, target_gens: n }
    }

    pub fn identity(params: RingParams, n: usize) -> Self {
        Self::scalar(&TruncatedSeries::one(params), n)
    }

    pub fn zero(params: RingParams, source_gens: usize, target_gens: usize) -> Self {
        let rows = vec![vec![TruncatedSeries::zero(params); target_gens]; source_gens];
        ModuleMap { rows, target_gens }
    }

    /// Diagonal map with the given entries.
    pub fn diagonal(entries: &[TruncatedSeries]) -> Self {
        let n = entries.len();
        let rows = entries
            .iter()
            .enumerate()
            .map(|(j, s)| {
                (0..n)
                    .map(|k| {
                        if j == k {
                            s.clone()
                        } else {
                            TruncatedSeries::zero(s.params())
                        }
                    })
                    .collect()
            })
            .collect();
        ModuleMap { rows, target_gens: n }
    }

    pub fn rows(&self) -> &[Vec<TruncatedSeries>] {
        &self.rows
    }

    pub fn source_gens(&self) -> usize {
        self.rows.len()
    }

    pub fn target_gens(&self) -> usize {
        self.target_gens
    }

    /// `other . self`: apply `self` first.
    pub fn then(&self, other: &ModuleMap) -> Result<ModuleMap> {
        if self.target_gens != other.source_gens() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose a map into {} generators with a map from {}",
                self.target_gens,
                other.source_gens()
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                (0..other.target_gens)
                    .map(|k| {
                        row.iter()
                            .zip(&other.rows)
                            .try_fold(TruncatedSeries::zero(row_params(row, other)), |acc, (a, orow)| {
                                acc.add(&a.mul(&orow[k])?)
                            })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ModuleMap {
            rows,
            target_gens: other.target_gens,
        })
    }

    pub fn add(&self, other: &ModuleMap) -> Result<ModuleMap> {
        if self.source_gens() != other.source_gens() || self.target_gens != other.target_gens {
            return Err(Error::DimensionMismatch(
                "summands of a map sum differ in shape".into(),
            ));
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.add(y)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(ModuleMap {
            rows,
            target_gens: self.target_gens,
        })
    }

    pub fn sub(&self, other: &ModuleMap) -> Result<ModuleMap> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ModuleMap {
        ModuleMap {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|x| x.neg()).collect())
                .collect(),
            target_gens: self.target_gens,
        }
    }

    /// `s` times the map.
    pub fn scaled(&self, s: &TruncatedSeries) -> Result<ModuleMap> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| x.mul(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(ModuleMap {
            rows,
            target_gens: self.target_gens,
        })
    }
}

fn row_params(row: &[TruncatedSeries], other: &ModuleMap) -> RingParams {
    row.first()
        .or_else(|| other.rows.iter().flatten().next())
        .map(|s| s.params())
        .expect("composite of maps with an empty side has no entries to build")
}

impl fmt::Display for ModuleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (j, row) in self.rows.iter().enumerate() {
            if j > 0 {
                write!(f, "; ")?;
            }
            let cells: Vec<String> = row.iter().map(|s| format!("{:?}", s.signed_coeffs())).collect();
            write!(f, "{}", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    HInjective,
    GF,
    FG,
    HpH,
    HHp,
}

impl Condition {
    pub const ALL: [Condition; 5] = [
        Condition::HInjective,
        Condition::GF,
        Condition::FG,
        Condition::HpH,
        Condition::HHp,
    ];
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::HInjective => "h injective",
            Condition::GF => "g∘f = E^(i-1) on M^(1)",
            Condition::FG => "f∘g = E^(i-1) on N",
            Condition::HpH => "h'∘h = E on N",
            Condition::HHp => "h∘h' = E on M",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Condition>,
    /// Maps that do not respect the relations of their source.
    pub ill_defined: Vec<&'static str>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty() && self.ill_defined.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct QuasiFilteredBK {
    pub height: u32,
    pub e: EisensteinPoly,
    pub m: BKModule,
    pub n: BKModule,
    pub f: ModuleMap,
    pub g: ModuleMap,
    pub h: ModuleMap,
    pub h_prime: ModuleMap,
}

fn generator_count(m: &BKModule) -> Result<usize> {
    Ok(m.to_presentation()?.generators())
}

fn expect_shape(name: &str, map: &ModuleMap, src: usize, tgt: usize) -> Result<()> {
    if map.source_gens() != src || map.target_gens() != tgt {
        return Err(Error::DimensionMismatch(format!(
            "{name} is {}x{}, expected {src}x{tgt}",
            map.source_gens(),
            map.target_gens()
        )));
    }
    Ok(())
}

impl QuasiFilteredBK {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        height: u32,
        e: EisensteinPoly,
        m: BKModule,
        n: BKModule,
        f: ModuleMap,
        g: ModuleMap,
        h: ModuleMap,
        h_prime: ModuleMap,
    ) -> Result<Self> {
        if height == 0 {
            return Err(Error::InvalidParams("height must be at least 1".into()));
        }
        if e.p() != m.params().p() || m.params() != n.params() {
            return Err(Error::ParamsMismatch);
        }
        let (gm, gn) = (generator_count(&m)?, generator_count(&n)?);
        expect_shape("f", &f, gm, gn)?;
        expect_shape("g", &g, gn, gm)?;
        expect_shape("h", &h, gn, gm)?;
        expect_shape("h'", &h_prime, gm, gn)?;
        Ok(QuasiFilteredBK {
            height,
            e,
            m,
            n,
            f,
            g,
            h,
            h_prime,
        })
    }

    /// Height one with `M = N`, `f = g = h = id` and `h' = E`. Needs `M^(1)`
    /// presented on the same generators as `M`, as for free modules and `S/p^a`.
    pub fn identity_example(m: BKModule, e: EisensteinPoly) -> Result<Self> {
        let params = m.params();
        let k = generator_count(&m)?;
        let id = ModuleMap::identity(params, k);
        let e_map = ModuleMap::scalar(&e.to_series(params)?, k);
        Self::new(1, e, m.clone(), m, id.clone(), id.clone(), id, e_map)
    }

    /// Height-`i` structure on `M = N = (+)_j k[u]/u^{r_j}` with `h = id`,
    /// `h' = E`, `g = u^{(p-1) r_j}` and `f = u^{e(i-1) - (p-1) r_j}` on each summand.
    /// Exists when `(p-1) r_j <= e(i-1)` for every `j`.
    pub fn p_torsion_instance(
        params: RingParams,
        e: EisensteinPoly,
        height: u32,
        rs: &[u64],
    ) -> Result<Self> {
        let p = params.p();
        let budget = e.degree() as u64 * (height as u64).saturating_sub(1);
        let mut summands = Vec::with_capacity(rs.len());
        let (mut fd, mut gd) = (Vec::new(), Vec::new());
        for &r in rs {
            let gexp = (p - 1)
                .checked_mul(r)
                .ok_or_else(|| Error::Overflow("(p-1) r".into()))?;
            if gexp > budget {
                return Err(Error::HypothesisUnmet(format!(
                    "(p-1)·{r} exceeds e(i-1) = {budget}"
                )));
            }
            summands.push(CyclicSummand::pur(1, r)?);
            fd.push(TruncatedSeries::monomial(params, 1, (budget - gexp) as usize));
            gd.push(TruncatedSeries::monomial(params, 1, gexp as usize));
        }
        let m = BKModule::from_summands(params, summands)?;
        let k = generator_count(&m)?;
        let h_prime = ModuleMap::scalar(&e.to_series(params)?, k);
        Self::new(
            height,
            e,
            m.clone(),
            m,
            ModuleMap::diagonal(&fd),
            ModuleMap::diagonal(&gd),
            ModuleMap::identity(params, k),
            h_prime,
        )
    }

    fn params(&self) -> RingParams {
        self.m.params()
    }

    fn e_power(&self, k: u32) -> Result<TruncatedSeries> {
        Ok(self.e.to_series(self.params())?.pow(k as u64))
    }

    /// The structure with one condition broken: `h` zeroed for injectivity,
    /// otherwise the map feeding the named composite multiplied by `1 + E`.
    pub fn mutant(&self, target: Condition) -> Result<Self> {
        let one_plus_e = TruncatedSeries::one(self.params()).add(&self.e_power(1)?)?;
        let mut out = self.clone();
        match target {
            Condition::HInjective => {
                out.h = ModuleMap::zero(self.params(), self.h.source_gens(), self.h.target_gens())
            }
            Condition::GF => out.f = self.f.scaled(&one_plus_e)?,
            Condition::FG => out.g = self.g.scaled(&one_plus_e)?,
            Condition::HpH => out.h_prime = self.h_prime.scaled(&one_plus_e)?,
            Condition::HHp => out.h = self.h.scaled(&one_plus_e)?,
        }
        Ok(out)
    }
}

/// Whether `map - s·id` vanishes on every generator of `module`.
fn equals_scalar(module: &BKModule, map: &ModuleMap, s: &TruncatedSeries) -> Result<bool> {
    let diff = map.sub(&ModuleMap::scalar(s, map.source_gens()))?;
    Ok(oracle::vanishes(module, diff.rows())?.into_iter().all(|b| b))
}

pub fn validate(qf: &QuasiFilteredBK) -> Result<ValidationReport> {
    validate_with_budget(qf, oracle::budget_from_env())
}

pub fn validate_with_budget(qf: &QuasiFilteredBK, budget: u64) -> Result<ValidationReport> {
    let m1 = qf.m.twist(1)?;
    let mut ill_defined = Vec::new();
    for (name, map, src, tgt) in [
        ("f", &qf.f, &m1, &qf.n),
        ("g", &qf.g, &qf.n, &m1),
        ("h", &qf.h, &qf.n, &qf.m),
        ("h'", &qf.h_prime, &qf.m, &qf.n),
    ] {
        if !oracle::map_well_defined(src, tgt, map.rows())? {
            ill_defined.push(name);
        }
    }
    let e_prev = qf.e_power(qf.height - 1)?;
    let e1 = qf.e_power(1)?;
    let mut violations = Vec::new();
    if !oracle::map_is_injective(&qf.n, &qf.m, qf.h.rows(), budget)? {
        violations.push(Condition::HInjective);
    }
    if !equals_scalar(&m1, &qf.f.then(&qf.g)?, &e_prev)? {
        violations.push(Condition::GF);
    }
    if !equals_scalar(&qf.n, &qf.g.then(&qf.f)?, &e_prev)? {
        violations.push(Condition::FG);
    }
    if !equals_scalar(&qf.n, &qf.h.then(&qf.h_prime)?, &e1)? {
        violations.push(Condition::HpH);
    }
    if !equals_scalar(&qf.m, &qf.h_prime.then(&qf.h)?, &e1)? {
        violations.push(Condition::HHp);
    }
    Ok(ValidationReport {
        violations,
        ill_defined,
    })
}

/// `(phi, psi)` with `phi = h∘f: M^(1) -> M` and `psi = g∘h': M -> M^(1)`.
pub fn derived_frobenius(qf: &QuasiFilteredBK) -> Result<(ModuleMap, ModuleMap)> {
    Ok((qf.f.then(&qf.h)?, qf.h_prime.then(&qf.g)?))
}

/// Whether `psi∘phi = E^i` on `M^(1)` and `phi∘psi = E^i` on `M`.
pub fn check_height_relations(qf: &QuasiFilteredBK) -> Result<(bool, bool)> {
    let (phi, psi) = derived_frobenius(qf)?;
    let ei = qf.e_power(qf.height)?;
    let m1 = qf.m.twist(1)?;
    Ok((
        equals_scalar(&m1, &phi.then(&psi)?, &ei)?,
        equals_scalar(&qf.m, &psi.then(&phi)?, &ei)?,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaReport {
    /// `None` for the zero module.
    pub alpha: Option<u64>,
    pub bound: u64,
    pub pass: bool,
    /// Whether `E^{i-1} c` kills `M^(1)` for every scanned annihilator `c`.
    pub ann_inclusion: bool,
    pub scanned: usize,
}

pub fn alpha_bound(e: u64, p: u64, height: u32) -> u64 {
    e * (height as u64).saturating_sub(1) / (p - 1)
}

pub fn check_alpha_bound(qf: &QuasiFilteredBK) -> Result<AlphaReport> {
    alpha_report(&qf.m, qf.height, &qf.e)
}

/// The bound check for a bare module, as used by sweeps over generated structures.
pub fn alpha_report(m: &BKModule, height: u32, e: &EisensteinPoly) -> Result<AlphaReport> {
    let params = m.params();
    let p = params.p();
    let shape = oracle::annihilator_shape_of(m)?;
    let bound = alpha_bound(e.degree() as u64, p, height);
    let pass = shape.alpha.is_none_or(|a| a <= bound);

    let candidates = annihilator_candidates(m, &shape)?;
    let m1 = m.twist(1)?;
    let e_prev = e.to_series(params)?.pow(height as u64 - 1);
    let mut ann_inclusion = true;
    for c in &candidates {
        if !oracle::kills(&m1, &e_prev.mul(c)?)? {
            ann_inclusion = false;
            break;
        }
    }
    Ok(AlphaReport {
        alpha: shape.alpha,
        bound,
        pass,
        ann_inclusion,
        scanned: candidates.len(),
    })
}

/// Annihilators `p^s u^t` with `t` least for each `s` below the least killing
/// power of `p`, plus the simple element when one was found.
fn annihilator_candidates(m: &BKModule, shape: &oracle::AnnihilatorShape) -> Result<Vec<TruncatedSeries>> {
    let params = m.params();
    let mut out = Vec::new();
    for s in 0..=params.p_prec() {
        let ps =
            TruncatedSeries::constant(params, 1).scale(crate::ring::saturating_pow(params.p(), s) as i64);
        if ps.is_zero() {
            break;
        }
        if oracle::kills(m, &ps)? {
            out.push(ps);
            break;
        }
        if let Some(t) = (0..params.u_prec()).find_map(|t| {
            let c = ps.shift(t);
            match oracle::kills(m, &c) {
                Ok(true) => Some(Ok(t)),
                Ok(false) => None,
                Err(e) => Some(Err(e)),
            }
        }) {
            out.push(ps.shift(t?));
        }
    }
    if let Some((alpha, unit)) = &shape.simple_element {
        let u_alpha = TruncatedSeries::monomial(params, 1, *alpha as usize);
        out.push(u_alpha.add(&unit.scale(params.p() as i64))?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseVerdict {
    pub case: u8,
    pub hypothesis: bool,
    /// `None` when the hypothesis fails and nothing is asserted.
    pub conclusion: Option<bool>,
}

impl CaseVerdict {
    pub fn holds(&self) -> bool {
        self.conclusion != Some(false)
    }
}

/// Checks the four annihilator statements for a finite module that is assumed
/// to carry a quasi-filtered structure of height `i`. A failed conclusion means
/// no such structure exists on `m`.
pub fn theorem_cases(m: &BKModule, height: u32, e: &EisensteinPoly) -> Result<Vec<CaseVerdict>> {
    let params = m.params();
    let p = params.p();
    let ei = e.degree() as u64 * (height as u64).saturating_sub(1);
    let one = TruncatedSeries::one(params);
    let u = TruncatedSeries::u(params);
    let p_ser = TruncatedSeries::constant(params, p as i64);
    // finiteness doubles as the u^infty-torsion check
    oracle::annihilator_shape_of(m)?;
    let zero = oracle::kills(m, &one)?;

    let mut out = Vec::with_capacity(4);
    let c1 = ei < p - 1;
    out.push(CaseVerdict {
        case: 1,
        hypothesis: c1,
        conclusion: c1.then_some(zero),
    });

    let c2 = ei == p - 1;
    let conclusion = if c2 {
        Some(zero || (oracle::kills(m, &p_ser)? && oracle::kills(m, &u)?))
    } else {
        None
    };
    out.push(CaseVerdict {
        case: 2,
        hypothesis: c2,
        conclusion,
    });

    let c3 = ei < 2 * (p - 1);
    let conclusion = if c3 {
        let target = p_ser.pow(height as u64 - 1);
        Some(oracle::in_annihilator_plus(m, &target, &u)?)
    } else {
        None
    };
    out.push(CaseVerdict {
        case: 3,
        hypothesis: c3,
        conclusion,
    });

    let c4 = height <= 2 && (e.degree() as u64) < p * (p - 1);
    let conclusion = if c4 {
        Some(zero || oracle::in_annihilator_plus(m, &p_ser, &u)?)
    } else {
        None
    };
    out.push(CaseVerdict {
        case: 4,
        hypothesis: c4,
        conclusion,
    });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimpleAnnihilator {
    PTorsion,
    /// `u^alpha + p·unit` kills the module.
    Binomial {
        alpha: u64,
        unit: TruncatedSeries,
    },
}

/// One of the two annihilator shapes available for height `i <= 2` and
/// `e < p(p-1)`, with `1 <= alpha <= ceil(e/(p-1)) < p` enforced.
pub fn simple_annihilator(m: &BKModule, height: u32, e: &EisensteinPoly) -> Result<SimpleAnnihilator> {
    let p = m.params().p();
    let deg = e.degree() as u64;
    if height > 2 || deg >= p * (p - 1) {
        return Err(Error::HypothesisUnmet(format!(
            "needs i <= 2 and e < p(p-1), got i = {height}, e = {deg}, p = {p}"
        )));
    }
    let shape = oracle::annihilator_shape_of(m)?;
    if shape.p_kills {
        return Ok(SimpleAnnihilator::PTorsion);
    }
    let Some((alpha, unit)) = shape.simple_element else {
        return Err(Error::SearchInconclusive(format!(
            "no annihilator u^a + p·x with x a unit up to u^{}",
            m.params().u_prec()
        )));
    };
    let cap = ceil_div(deg, p - 1);
    if alpha == 0 || alpha > cap || cap >= p {
        return Err(Error::HypothesisUnmet(format!(
            "alpha = {alpha} outside 1..={cap} (< p = {p}); the module carries no height-{height} structure"
        )));
    }
    Ok(SimpleAnnihilator::Binomial { alpha, unit })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: u64) -> RingParams {
        RingParams::new(p, 4, 24).unwrap()
    }

    #[test]
    fn identity_example_is_valid_and_mutants_fail() {
        let p = 3;
        let e = EisensteinPoly::default_for(p, 2).unwrap();
        let m = BKModule::from_summands(params(p), vec![CyclicSummand::ppow(1).unwrap()]).unwrap();
        let qf = QuasiFilteredBK::identity_example(m, e).unwrap();
        assert!(validate(&qf).unwrap().is_valid());
        for c in Condition::ALL {
            let report = validate(&qf.mutant(c).unwrap()).unwrap();
            assert!(report.violations.contains(&c), "{c}: {report:?}");
        }
    }

    #[test]
    fn derived_frobenius_of_identity_example() {
        let e = EisensteinPoly::default_for(2, 3).unwrap();
        let m = BKModule::from_summands(params(2), vec![CyclicSummand::Free]).unwrap();
        let qf = QuasiFilteredBK::identity_example(m, e.clone()).unwrap();
        let (phi, psi) = derived_frobenius(&qf).unwrap();
        assert_eq!(phi, ModuleMap::identity(params(2), 1));
        assert_eq!(psi, ModuleMap::scalar(&e.to_series(params(2)).unwrap(), 1));
        assert_eq!(check_height_relations(&qf).unwrap(), (true, true));
    }

    #[test]
    fn residue_field_at_height_two() {
        // M = N = S/(p,u), f = E, g = h = id, h' = E
        let p = 3;
        let pr = params(p);
        let e = EisensteinPoly::default_for(p, 2).unwrap();
        let m = BKModule::from_summands(pr, vec![CyclicSummand::pur(1, 1).unwrap()]).unwrap();
        let es = e.to_series(pr).unwrap();
        let id = ModuleMap::identity(pr, 1);
        let qf = QuasiFilteredBK::new(
            2,
            e,
            m.clone(),
            m,
            ModuleMap::scalar(&es, 1),
            id.clone(),
            id,
            ModuleMap::scalar(&es, 1),
        )
        .unwrap();
        // M^(1) = k[u]/u^3, and 1 -> 1 does not respect u^1 = 0 in N
        let report = validate(&qf).unwrap();
        assert_eq!(report.ill_defined, vec!["g"]);
        assert!(report.violations.is_empty(), "{report:?}");
        assert_eq!(check_height_relations(&qf).unwrap(), (true, true));
    }

    #[test]
    fn generated_p_torsion_instances_validate() {
        let p = 3;
        let e = EisensteinPoly::default_for(p, 4).unwrap();
        let qf = QuasiFilteredBK::p_torsion_instance(params(p), e.clone(), 2, &[1, 2]).unwrap();
        assert!(validate(&qf).unwrap().is_valid());
        let r = check_alpha_bound(&qf).unwrap();
        assert_eq!(
            (r.alpha, r.bound, r.pass, r.ann_inclusion),
            (Some(2), 2, true, true)
        );
        assert!(QuasiFilteredBK::p_torsion_instance(params(p), e, 2, &[3]).is_err());
    }

    #[test]
    fn zeroed_h_on_small_module_breaks_only_injectivity() {
        let p = 3;
        let e = EisensteinPoly::default_for(p, 4).unwrap();
        let qf = QuasiFilteredBK::p_torsion_instance(params(p), e, 2, &[2]).unwrap();
        let report = validate(&qf.mutant(Condition::HInjective).unwrap()).unwrap();
        assert_eq!(report.violations, vec![Condition::HInjective]);
    }

    #[test]
    fn alpha_bound_fails_for_long_residue_module() {
        let p = 3;
        let e = EisensteinPoly::default_for(p, 4).unwrap();
        let m = BKModule::from_summands(params(p), vec![CyclicSummand::pur(1, 3).unwrap()]).unwrap();
        let r = alpha_report(&m, 2, &e).unwrap();
        assert_eq!((r.alpha, r.bound, r.pass), (Some(3), 2, false));
    }

    #[test]
    fn theorem_cases_examples() {
        let p = 3;
        let pr = params(p);
        let k = BKModule::from_summands(pr, vec![CyclicSummand::pur(1, 1).unwrap()]).unwrap();
        let e2 = EisensteinPoly::default_for(p, 2).unwrap();
        // height one: a nonzero module cannot be quasi-filtered
        let v = theorem_cases(&k, 1, &e2).unwrap();
        assert_eq!(v[0].conclusion, Some(false));
        assert_eq!(
            theorem_cases(&BKModule::zero(pr), 1, &e2).unwrap()[0].conclusion,
            Some(true)
        );
        // e(i-1) = p-1
        let v = theorem_cases(&k, 2, &e2).unwrap();
        assert!(v[1].hypothesis && v[1].conclusion == Some(true));
        let m = BKModule::from_summands(pr, vec![CyclicSummand::pur(1, 2).unwrap()]).unwrap();
        let v = theorem_cases(&m, 2, &EisensteinPoly::default_for(p, 4).unwrap()).unwrap();
        assert_eq!(v[3].conclusion, Some(true));
        assert!(v.iter().all(CaseVerdict::holds));
    }

    #[test]
    fn simple_annihilator_shapes() {
        let pr = params(3);
        let e = EisensteinPoly::default_for(3, 2).unwrap();
        let m = BKModule::from_summands(pr, vec![CyclicSummand::pur(1, 3).unwrap()]).unwrap();
        assert_eq!(
            simple_annihilator(&m, 2, &e).unwrap(),
            SimpleAnnihilator::PTorsion
        );
        assert_eq!(
            simple_annihilator(&BKModule::zero(pr), 2, &e).unwrap(),
            SimpleAnnihilator::PTorsion
        );
        let m = BKModule::from_summands(pr, vec![CyclicSummand::fur_one(pr, 1, 2).unwrap()]).unwrap();
        match simple_annihilator(&m, 2, &e).unwrap() {
            SimpleAnnihilator::Binomial { alpha, unit } => {
                assert_eq!(alpha, 1);
                assert!(unit.is_unit());
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            simple_annihilator(&m, 3, &e),
            Err(Error::HypothesisUnmet(_))
        ));
    }
}
