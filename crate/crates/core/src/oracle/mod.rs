//! Brute-force ground truth. Modules are realised as explicit finite quotients
//! of `(Z/p^a)[u]/u^B`-blocks and measured by exact linear algebra over `Z/p^a`
//! or by listing their elements. Nothing here consults a length formula.

mod lattice;
mod quotient;

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::module::{BKModule, CyclicSummand, Presentation};
use crate::ring::{ceil_div, checked_pow, EisensteinPoly, RingParams, TruncatedSeries};

pub(crate) use quotient::{Ambient, Quotient};

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Enumeration budget, overridden by `BKCTL_BUDGET`.
pub fn budget_from_env() -> u64 {
    std::env::var("BKCTL_BUDGET")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// A presentation together with, for generators spanning a finite summand of a
/// diagonal presentation, exact bounds `B_i` with `u^{B_i} e_i = 0`; `p^fixed_a`
/// kills all of those generators. `tor_bound`, when known, bounds the exponent of
/// `p` on the `p`-power torsion of the module.
#[derive(Debug, Clone)]
pub(crate) struct Presented {
    params: RingParams,
    gens: usize,
    rels: Vec<Vec<TruncatedSeries>>,
    fixed: Vec<Option<usize>>,
    fixed_a: u32,
    tor_bound: Option<u32>,
}

fn exact_bounds(summands: &[CyclicSummand], params: RingParams) -> Result<(u32, Vec<Option<usize>>)> {
    let mut a = 1u64;
    let mut bounds = Vec::with_capacity(summands.len());
    for s in summands {
        let (sa, sb) = match s {
            CyclicSummand::PUr { a, r } => (*a, *r),
            CyclicSummand::FUr { alpha, r, .. } => (ceil_div(*r, *alpha), *r),
            _ => {
                bounds.push(None);
                continue;
            }
        };
        a = a.max(sa);
        bounds.push(Some(sb as usize));
    }
    if a > params.p_prec() as u64 {
        return Err(Error::precision(
            "oracle coefficient ring",
            a,
            params.p_prec() as u64,
        ));
    }
    Ok((a as u32, bounds))
}

impl Presented {
    pub fn of(m: &BKModule) -> Result<Self> {
        let params = m.params();
        let pres = m.to_presentation()?;
        let (fixed_a, fixed, tor_bound) = match (m.summands(), m.presentation()) {
            (Some(s), None) => {
                let (a, bounds) = exact_bounds(s, params)?;
                let ppow = s.iter().filter_map(|x| match x {
                    CyclicSummand::Ppow { a: k } => Some(*k as u32),
                    _ => None,
                });
                (a, bounds, Some(ppow.fold(a, u32::max)))
            }
            _ => (1, vec![None; pres.generators()], None),
        };
        Ok(Presented {
            params,
            gens: pres.generators(),
            rels: pres.relations().to_vec(),
            fixed,
            fixed_a,
            tor_bound,
        })
    }

    pub fn from_presentation(params: RingParams, pres: &Presentation) -> Self {
        Presented {
            params,
            gens: pres.generators(),
            rels: pres.relations().to_vec(),
            fixed: vec![None; pres.generators()],
            fixed_a: 1,
            tor_bound: None,
        }
    }

    pub fn gens(&self) -> usize {
        self.gens
    }

    /// Adds `s e_i` for every generator.
    pub fn with_scalar(&self, s: &TruncatedSeries) -> Self {
        let mut rels = self.rels.clone();
        let zero = TruncatedSeries::zero(self.params);
        for i in 0..self.gens {
            let mut row = vec![zero.clone(); self.gens];
            row[i] = s.clone();
            rels.push(row);
        }
        Presented {
            params: self.params,
            gens: self.gens,
            rels,
            fixed: self.fixed.clone(),
            fixed_a: self.fixed_a,
            tor_bound: self.tor_bound,
        }
    }

    pub fn with_p_power(&self, k: u32) -> Result<Self> {
        if k >= self.params.p_prec() {
            return Err(Error::precision(
                "relation p^N",
                k as u64 + 1,
                self.params.p_prec() as u64,
            ));
        }
        let c = self.params.p().pow(k) as i64;
        Ok(self.with_scalar(&TruncatedSeries::constant(self.params, c)))
    }

    pub fn quotient(&self, a: u32, bounds: Vec<usize>) -> Result<Quotient> {
        if a > self.params.p_prec() {
            return Err(Error::precision(
                "oracle coefficient ring",
                a as u64,
                self.params.p_prec() as u64,
            ));
        }
        if let Some(&b) = bounds.iter().max() {
            if b > self.params.u_prec() {
                return Err(Error::precision(
                    "oracle truncation",
                    b as u64,
                    self.params.u_prec() as u64,
                ));
            }
        }
        let amb = Ambient::new(self.params.p(), a, bounds);
        let rows: Vec<Vec<u64>> = self
            .rels
            .iter()
            .map(|row| {
                let blocks: Vec<&[u64]> = row.iter().map(|s| s.coeffs()).collect();
                amb.embed(&blocks)
            })
            .collect();
        Ok(Quotient::new(amb, rows))
    }

    /// Doubling sequence of truncation levels up to the working precision.
    fn levels(&self) -> Vec<(u32, usize)> {
        let (m, big_m) = (self.params.p_prec(), self.params.u_prec());
        let mut out = Vec::new();
        let mut k = 1usize;
        loop {
            let lv = ((k as u32).min(m), k.min(big_m));
            if out.last() != Some(&lv) {
                out.push(lv);
            }
            if lv == (m, big_m) {
                return out;
            }
            k *= 2;
        }
    }

    /// Truncation at level `(p^a, u^b)` that keeps generators with exact bounds whole.
    fn at_level(&self, a: u32, b: usize) -> Result<Quotient> {
        let bounds = self.fixed.iter().map(|f| f.unwrap_or(b)).collect();
        self.quotient(a.max(self.fixed_a), bounds)
    }

    /// `M / u^b` at coefficient level `p^a`, with exact blocks cut to `u^b` as well.
    fn capped_level(&self, a: u32, b: usize) -> Result<Quotient> {
        let bounds = self.fixed.iter().map(|f| f.map_or(b, |r| r.min(b))).collect();
        self.quotient(a.max(self.fixed_a), bounds)
    }

    fn certified(&self, q: &Quotient) -> bool {
        let amb = q.ambient();
        let pa = self.params.p().pow(amb.exponent() - 1);
        (0..self.gens).filter(|&i| self.fixed[i].is_none()).all(|i| {
            q.is_zero(&amb.scale(pa, &amb.basis_vector(i, 0)))
                && q.is_zero(&amb.basis_vector(i, amb.bounds()[i] - 1))
        })
    }

    /// The module itself as a finite quotient. Without exact bounds, finiteness is
    /// certified by checking `p^{a-1} e_i = u^{B-1} e_i = 0` in the truncation at
    /// `(p^a, u^B)`, which by Nakayama forces the truncation to be the module.
    pub fn finite(&self) -> Result<Quotient> {
        if self.fixed.iter().all(Option::is_some) {
            return self.at_level(1, 0);
        }
        for (a, b) in self.levels() {
            let q = self.at_level(a, b)?;
            if self.certified(&q) {
                return Ok(q);
            }
        }
        Err(Error::InfiniteModule(format!(
            "no finite truncation certified within p^{} and u^{}",
            self.params.p_prec(),
            self.params.u_prec()
        )))
    }

    fn is_certifiably_finite(&self) -> Option<Quotient> {
        if self.visibly_infinite() {
            return None;
        }
        self.finite().ok()
    }

    /// A generator whose column vanishes mod `p` spans a free summand of `M/p`.
    fn visibly_infinite(&self) -> bool {
        (0..self.gens)
            .filter(|&i| self.fixed[i].is_none())
            .any(|i| self.rels.iter().all(|row| row[i].mod_p().iter().all(|&c| c == 0)))
    }

    /// Length of the kernel of `s`, which must be finite. For infinite modules the
    /// kernel at full p-precision and u-level `2B` is projected to a lower p-level
    /// and u-level `B`; `B` doubles until two consecutive values agree.
    pub fn kernel_length(&self, s: &TruncatedSeries) -> Result<u64> {
        if let Some(q) = self.is_certifiably_finite() {
            return Ok(q.kernel(s.coeffs()).log_size());
        }
        let p_top = self.params.p_prec();
        let a_c = self
            .tor_bound
            .unwrap_or(0)
            .max(self.fixed_a)
            .max(p_top.div_ceil(3));
        if a_c > p_top {
            return Err(Error::precision("stable kernel", a_c as u64, p_top as u64));
        }
        // spurious solutions of s x = 0 mod (p^A, u^2B) look like truncated inverses
        // of s and carry p^k u^{d(K-1-k)} for K = max(A, 2B/d), d the spread of s;
        // they vanish at (p^a_c, u^B) once A > a_c + B/d or B >= d (a_c + 1).
        // Shallow levels also see relations of high degree as missing.
        let deg = self
            .rels
            .iter()
            .flat_map(|row| {
                row.iter()
                    .zip(&self.fixed)
                    .filter(|(_, f)| f.is_none())
                    .map(|(x, _)| x)
            })
            .chain(std::iter::once(s))
            .filter_map(|x| x.degree())
            .max()
            .unwrap_or(0);
        let spread = s.degree().unwrap_or(0) - s.u_order().unwrap_or(0);
        let clean = |b: usize| {
            spread == 0 || (p_top as usize) > a_c as usize + b / spread || b >= spread * (a_c as usize + 1)
        };
        let u_prec = self.params.u_prec();
        let mut b = (2 * (deg + 1)).next_power_of_two();
        let mut prev = None;
        while 2 * b <= u_prec {
            if !clean(b) {
                b *= 2;
                continue;
            }
            let coarse = self.at_level(a_c, b)?;
            let fine = self.at_level(p_top, 2 * b)?;
            let v = fine.kernel(s.coeffs()).projected_log_size(&coarse);
            if prev == Some(v) {
                return Ok(v);
            }
            prev = Some(v);
            b *= 2;
        }
        Err(Error::precision("stable kernel", 2 * b as u64, u_prec as u64))
    }

    /// For a module `Q` over a DVR with uniformiser `pi` whose truncation
    /// `Q / pi^B` is `trunc(B)`, returns `(rank, length of torsion)`.
    ///
    /// `t(j) = l(Q_B[pi^j]) - l(pi^{B-j} Q_B)` with `B = 2j + 2` counts torsion
    /// summands of exponent `c <= j` fully and free summands not at all;
    /// `t(j) = t(j+1)` holds exactly when no summand has `j < c <= 2j + 2`.
    fn dvr_split(
        &self,
        max_level: usize,
        min_j: usize,
        trunc: impl Fn(usize) -> Result<Quotient>,
        pi_pow: impl Fn(&Quotient, usize) -> Vec<u64>,
    ) -> Result<(u64, u64)> {
        let t = |j: usize| -> Result<(u64, u64, usize)> {
            let b = 2 * j + 2;
            let q = trunc(b)?;
            let ker = q.kernel(&pi_pow(&q, j)).log_size();
            let img = q.image(&pi_pow(&q, b - j)).log_size();
            Ok((ker - img, q.log_size(), b))
        };
        // torsion deeper than every window tried would look free, so the answer is
        // taken only past `min_j`, a bound on the torsion exponent
        let mut j = 2usize;
        let mut found = None;
        while 2 * (j + 1) + 2 <= max_level {
            let (t0, total, b) = t(j)?;
            let (t1, _, _) = t(j + 1)?;
            found = (t0 == t1).then_some((t0, total, b));
            if found.is_some() && j >= min_j {
                break;
            }
            j *= 2;
        }
        if j < min_j {
            found = None;
        }
        let (tor, total, b) =
            found.ok_or_else(|| Error::precision("torsion split", (2 * j + 4) as u64, max_level as u64))?;
        let free = total - tor;
        if free % b as u64 != 0 {
            return Err(Error::SearchInconclusive(format!(
                "truncation length {total} does not split as rank * {b} + {tor}"
            )));
        }
        Ok((free / b as u64, tor))
    }

    /// `(O_K-rank, length of p-power torsion)` of `M / E`.
    pub fn mod_e_split(&self, e: &EisensteinPoly) -> Result<(u64, u64)> {
        let params = self.params;
        let deg = e.degree();
        let es = e.to_series(params)?;
        let with_e = self.with_scalar(&es);
        let max_level = params.u_prec().min(deg * params.p_prec() as usize);
        // without a known bound the deepest window with room to spare decides
        let min_j = self.tor_bound.map_or(max_level / 4, |a| deg * a as usize);
        with_e.dvr_split(
            max_level,
            min_j,
            |b| with_e.capped_level(ceil_div(b as u64, deg as u64).max(1) as u32, b),
            |q, k| {
                let mut v = vec![0u64; k + 1];
                v[k] = 1 % q.ambient().modulus();
                v
            },
        )
    }
}

/// Images of generators under an `S`-linear map: row `j` is the image of source generator `j`.
pub type MapRows = [Vec<TruncatedSeries>];

fn apply_map(src: &Ambient, tgt: &Ambient, rows: &MapRows, x: &[u64]) -> Vec<u64> {
    let m = tgt.modulus();
    let mut out = vec![0u64; tgt.dim()];
    for (i, row) in rows.iter().enumerate() {
        let xi = src.block(x, i);
        if xi.iter().all(|&c| c == 0) {
            continue;
        }
        let blocks: Vec<&[u64]> = row.iter().map(|s| s.coeffs()).collect();
        let img = tgt.mul(xi, &tgt.embed(&blocks));
        for (o, v) in out.iter_mut().zip(img) {
            *o = (*o + v) % m;
        }
    }
    out
}

/// Source submodule killed by the map, as a sublattice of the source ambient.
fn map_kernel(src: &Quotient, tgt: &Quotient, rows: &MapRows) -> Quotient {
    let (ds, dt) = (src.ambient().dim(), tgt.ambient().dim());
    let mut joint = Vec::new();
    for b in src.generators() {
        let mut row = apply_map(src.ambient(), tgt.ambient(), rows, b);
        row.extend_from_slice(b);
        joint.push(row);
    }
    for l in tgt.rel().basis() {
        let mut row = l.clone();
        row.extend(std::iter::repeat_n(0, ds));
        joint.push(row);
    }
    let amb = src.ambient();
    let k = lattice::Lattice::split_off_kernel(amb.p(), amb.exponent(), dt, ds, joint);
    src.with_sub(k.basis().cloned())
}

fn check_map_shape(source: &Presented, target: &Presented, rows: &MapRows) -> Result<()> {
    if rows.len() != source.gens() || rows.iter().any(|r| r.len() != target.gens()) {
        return Err(Error::DimensionMismatch(format!(
            "map needs {} rows of {} entries",
            source.gens(),
            target.gens()
        )));
    }
    Ok(())
}

impl Presented {
    /// `finite()` with at least `p^a` room in the coefficients.
    fn finite_at_least(&self, a: u32) -> Result<Quotient> {
        let q = self.finite()?;
        if q.ambient().exponent() >= a {
            return Ok(q);
        }
        self.quotient(a, q.ambient().bounds().to_vec())
    }

    /// The finite module when certified, else its finest truncation.
    fn finest(&self) -> Result<Quotient> {
        match self.finite() {
            Ok(q) => Ok(q),
            Err(Error::InfiniteModule(_)) => self.at_level(self.params.p_prec(), self.params.u_prec()),
            Err(e) => Err(e),
        }
    }
}

/// Whether each vector (one series per generator) is zero in `m`. For infinite
/// modules this is decided in the truncation at the working precision.
pub fn vanishes(m: &BKModule, vectors: &[Vec<TruncatedSeries>]) -> Result<Vec<bool>> {
    let pres = Presented::of(m)?;
    let q = pres.finest()?;
    vectors
        .iter()
        .map(|v| {
            if v.len() != pres.gens() {
                return Err(Error::DimensionMismatch(format!(
                    "vector of length {} in a module with {} generators",
                    v.len(),
                    pres.gens()
                )));
            }
            let blocks: Vec<&[u64]> = v.iter().map(|s| s.coeffs()).collect();
            Ok(q.is_zero(&q.ambient().embed(&blocks)))
        })
        .collect()
}

/// Whether the map sends every relation of `source` to zero in `target`.
pub fn map_well_defined(source: &BKModule, target: &BKModule, rows: &MapRows) -> Result<bool> {
    let ps = Presented::of(source)?;
    let pt = Presented::of(target)?;
    check_map_shape(&ps, &pt, rows)?;
    let params = target.params();
    let images = ps
        .rels
        .iter()
        .map(|rel| {
            let mut img = vec![TruncatedSeries::zero(params); pt.gens()];
            for (c, row) in rel.iter().zip(rows) {
                for (slot, r) in img.iter_mut().zip(row) {
                    *slot = slot.add(&c.mul(r)?)?;
                }
            }
            Ok(img)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(vanishes(target, &images)?.into_iter().all(|b| b))
}

/// Whether the map is injective. Finite sources are decided exactly; otherwise
/// the kernel at each truncation level is projected one level down and the map
/// counts as injective when the last two projections vanish.
pub fn map_is_injective(source: &BKModule, target: &BKModule, rows: &MapRows, budget: u64) -> Result<bool> {
    let ps = Presented::of(source)?;
    let pt = Presented::of(target)?;
    check_map_shape(&ps, &pt, rows)?;
    if let (Ok(qs), Ok(qt)) = (ps.finite(), pt.finite()) {
        let size = checked_pow(source.params().p(), qs.log_size() as u32);
        if size.is_none_or(|s| s > budget) {
            return Err(Error::BudgetExceeded {
                size: (source.params().p() as u128)
                    .checked_pow(qs.log_size() as u32)
                    .unwrap_or(u128::MAX),
                budget,
            });
        }
        let a = qs.ambient().exponent().max(qt.ambient().exponent());
        let qs = ps.finite_at_least(a)?;
        let qt = pt.finite_at_least(a)?;
        return Ok(map_kernel(&qs, &qt, rows).log_size() == 0);
    }
    let levels: Vec<(u32, usize)> = ps
        .levels()
        .into_iter()
        .filter(|&(_, b)| b.is_power_of_two())
        .collect();
    if levels.len() < 3 {
        return Err(Error::precision(
            "injectivity levels",
            4,
            source.params().u_prec() as u64,
        ));
    }
    let mut coarse = ps.at_level(levels[0].0, levels[0].1)?;
    let mut recent = Vec::new();
    for &(a, b) in &levels[1..] {
        let a = a.max(ps.fixed_a).max(pt.fixed_a);
        let fine_s = ps.at_level(a, b)?;
        let fine_t = pt.at_level(a, b)?;
        recent.push(map_kernel(&fine_s, &fine_t, rows).projected_log_size(&coarse));
        coarse = fine_s;
    }
    Ok(recent.iter().rev().take(2).all(|&v| v == 0))
}

/// Finite module with every element listed.
#[derive(Debug, Clone)]
pub struct EnumeratedModule {
    params: RingParams,
    quotient: Quotient,
    elements: Vec<Vec<u64>>,
}

impl EnumeratedModule {
    pub fn params(&self) -> RingParams {
        self.params
    }

    pub fn cardinality(&self) -> u128 {
        self.elements.len() as u128
    }

    /// Canonical coordinate vectors of the elements.
    pub fn elements(&self) -> &[Vec<u64>] {
        &self.elements
    }

    pub fn act(&self, s: &TruncatedSeries, x: &[u64]) -> Vec<u64> {
        self.quotient.reduce(&self.quotient.ambient().mul(s.coeffs(), x))
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let m = self.quotient.ambient().modulus();
        let sum: Vec<u64> = x.iter().zip(y).map(|(a, b)| (a + b) % m).collect();
        self.quotient.reduce(&sum)
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        self.elements.binary_search(&self.quotient.reduce(x)).is_ok()
    }

    pub fn is_killed_by(&self, s: &TruncatedSeries) -> bool {
        self.quotient.kills(s.coeffs())
    }
}

fn enumerate_quotient(params: RingParams, quotient: Quotient, budget: u64) -> Result<EnumeratedModule> {
    let log = quotient.log_size();
    let size = checked_pow(params.p(), log as u32)
        .filter(|&s| s <= budget)
        .ok_or(Error::BudgetExceeded {
            size: (params.p() as u128).checked_pow(log as u32).unwrap_or(u128::MAX),
            budget,
        })?;
    let zero = vec![0u64; quotient.ambient().dim()];
    let gens: Vec<Vec<u64>> = quotient.generators().cloned().collect();
    let m = quotient.ambient().modulus();
    let mut seen: HashSet<Vec<u64>> = HashSet::with_capacity(size as usize);
    let mut queue = VecDeque::new();
    seen.insert(zero.clone());
    queue.push_back(zero);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y: Vec<u64> = x.iter().zip(g).map(|(a, b)| (a + b) % m).collect();
            let y = quotient.reduce(&y);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    let mut elements: Vec<Vec<u64>> = seen.into_iter().collect();
    elements.sort();
    Ok(EnumeratedModule {
        params,
        quotient,
        elements,
    })
}

/// Lists every element of a finite module.
pub fn enumerate(m: &BKModule, budget: u64) -> Result<EnumeratedModule> {
    if m.summands()
        .is_some_and(|s| s.iter().any(|x| !x.is_u_infty_torsion()))
    {
        return Err(Error::InfiniteModule(format!("{m} has a Free or Ppow summand")));
    }
    let q = Presented::of(m)?.finite()?;
    enumerate_quotient(m.params(), q, budget)
}

/// `log_p` of the number of listed elements.
pub fn length_via_cardinality(n: &EnumeratedModule) -> Result<u64> {
    let p = n.params.p() as u128;
    let mut size = n.cardinality();
    let mut log = 0;
    while size > 1 {
        if !size.is_multiple_of(p) {
            return Err(Error::NotPPower(n.cardinality()));
        }
        size /= p;
        log += 1;
    }
    Ok(log)
}

/// The elements killed by `s`, found by testing each one.
pub fn kernel_of_scalar(n: &EnumeratedModule, s: &TruncatedSeries) -> EnumeratedModule {
    let amb = n.quotient.ambient();
    let elements: Vec<Vec<u64>> = n
        .elements
        .iter()
        .filter(|x| n.quotient.is_zero(&amb.mul(s.coeffs(), x)))
        .cloned()
        .collect();
    let quotient = n.quotient.with_sub(elements.iter().cloned());
    EnumeratedModule {
        params: n.params,
        quotient,
        elements,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnihilatorShape {
    pub p_kills: bool,
    /// Least `alpha` with `Ann + (p) = (p, u^alpha)`; `None` for the zero module.
    pub alpha: Option<u64>,
    /// `(alpha, x)` with `u^alpha + p x` a certified annihilator and `x` a unit.
    pub simple_element: Option<(u64, TruncatedSeries)>,
}

/// Minimal list of module generators, picked greedily from group generators.
fn module_generators(q: &Quotient) -> Vec<Vec<u64>> {
    let amb = q.ambient();
    let mut gens: Vec<Vec<u64>> = Vec::new();
    let mut span = q.rel().clone();
    for b in q.generators() {
        if span.contains(b) {
            continue;
        }
        gens.push(b.clone());
        span = amb.module_span(gens.iter().cloned().chain(q.rel().basis().cloned()));
    }
    gens
}

/// Solves `(target + sum_j x_j basis_j) g = 0` for every module generator `g`.
/// Returns a particular solution and the Howell rows spanning the homogeneous
/// solutions, both as coefficient vectors `x`.
fn annihilator_solve(
    q: &Quotient,
    target: &[u64],
    basis: &[Vec<u64>],
) -> Option<(Vec<u64>, Vec<lattice::Row>)> {
    let amb = q.ambient();
    let (p, a, m) = (amb.p(), amb.exponent(), amb.modulus());
    let gens = module_generators(q);
    let d = amb.dim();
    let k = gens.len();
    let unknowns = basis.len();
    let width = k * d + unknowns;
    let mut rows = Vec::new();
    for (j, b) in basis.iter().enumerate() {
        let mut row = vec![0u64; width];
        for (slot, g) in gens.iter().enumerate() {
            row[slot * d..(slot + 1) * d].copy_from_slice(&amb.mul(b, g));
        }
        row[k * d + j] = 1;
        rows.push(row);
    }
    for slot in 0..k {
        for l in q.rel().basis() {
            let mut row = vec![0u64; width];
            row[slot * d..(slot + 1) * d].copy_from_slice(l);
            rows.push(row);
        }
    }
    let joint = lattice::Lattice::span(p, a, width, rows);
    let mut rhs = vec![0u64; width];
    for (slot, g) in gens.iter().enumerate() {
        let v = amb.mul(target, g);
        for (t, x) in rhs[slot * d..(slot + 1) * d].iter_mut().zip(v) {
            *t = (m - x) % m;
        }
    }
    let reduced = joint.reduce(&rhs);
    if reduced[..k * d].iter().any(|&x| x != 0) {
        return None;
    }
    let x = reduced[k * d..].iter().map(|&c| (m - c) % m).collect();
    let homogeneous = joint
        .rows()
        .iter()
        .filter(|r| r.pivot >= k * d)
        .map(|r| lattice::Row {
            pivot: r.pivot - k * d,
            val: r.val,
            v: r.v[k * d..].to_vec(),
        })
        .collect();
    Some((x, homogeneous))
}

fn add_series(x: &[u64], y: &[u64], m: u64) -> Vec<u64> {
    let len = x.len().max(y.len());
    (0..len)
        .map(|i| {
            let a = x.get(i).copied().unwrap_or(0) as u128;
            let b = y.get(i).copied().unwrap_or(0) as u128;
            ((a + b) % m as u128) as u64
        })
        .collect()
}

/// Searches for a unit `x` (a polynomial of degree below the largest truncation)
/// with `(u^alpha + p x) N = 0`.
fn simple_annihilator(q: &Quotient, params: RingParams, alpha: u64) -> Result<Option<TruncatedSeries>> {
    let amb = q.ambient();
    let (p, m) = (amb.p(), amb.modulus());
    let unknowns = amb.max_bound();
    let basis: Vec<Vec<u64>> = (0..unknowns)
        .map(|j| {
            let mut v = vec![0u64; j + 1];
            v[j] = p % m;
            v
        })
        .collect();
    let mut target = vec![0u64; alpha as usize + 1];
    target[alpha as usize] = 1 % m;
    let Some((mut x, homogeneous)) = annihilator_solve(q, &target, &basis) else {
        return Ok(None);
    };
    if x.first().is_none_or(|&c| c % p == 0) {
        match homogeneous.iter().find(|r| r.pivot == 0 && r.val == 0) {
            Some(r) => x = add_series(&x, &r.v, m),
            None => return Ok(None),
        }
    }
    let px: Vec<u64> = x
        .iter()
        .map(|&c| ((c as u128 * p as u128) % m as u128) as u64)
        .collect();
    if !q.kills(&add_series(&target, &px, m)) {
        return Err(Error::SearchInconclusive(format!(
            "solution for u^{alpha} + p x failed the action check"
        )));
    }
    Ok(Some(TruncatedSeries::from_residues(params, x)))
}

/// Whether `target` lies in `Ann(M) + (g)`, searching `g`-multiples of degree
/// below the truncation of `M`.
pub fn in_annihilator_plus(m: &BKModule, target: &TruncatedSeries, g: &TruncatedSeries) -> Result<bool> {
    let q = Presented::of(m)?.finite()?;
    let amb = q.ambient();
    let basis: Vec<Vec<u64>> = (0..amb.max_bound().max(1))
        .map(|j| {
            let mut v = vec![0u64; j];
            v.extend_from_slice(g.coeffs());
            v
        })
        .collect();
    Ok(annihilator_solve(&q, target.coeffs(), &basis).is_some())
}

/// Whether `s` kills `M`.
pub fn kills(m: &BKModule, s: &TruncatedSeries) -> Result<bool> {
    Ok(Presented::of(m)?.finite()?.kills(s.coeffs()))
}

fn shape_of(q: &Quotient, params: RingParams) -> Result<AnnihilatorShape> {
    let amb = q.ambient();
    let p = amb.p();
    if q.log_size() == 0 {
        return Ok(AnnihilatorShape {
            p_kills: true,
            alpha: None,
            simple_element: None,
        });
    }
    let p_kills = q.kills(&[p]);
    let pn = q.image(&[p]);
    let alpha = (1..=amb.max_bound())
        .find(|&j| q.generators().all(|b| pn.sub().contains(&amb.shift(b, j))))
        .map(|j| j as u64)
        .ok_or_else(|| Error::SearchInconclusive("u is not nilpotent on the module".into()))?;
    let simple_element = if p_kills {
        None
    } else {
        match simple_annihilator(q, params, alpha)? {
            Some(x) => Some((alpha, x)),
            None => {
                return Err(Error::SearchInconclusive(format!(
                    "no annihilator u^{alpha} + p x with x a unit of degree below {}",
                    amb.max_bound()
                )))
            }
        }
    };
    Ok(AnnihilatorShape {
        p_kills,
        alpha: Some(alpha),
        simple_element,
    })
}

pub fn annihilator_shape(n: &EnumeratedModule) -> Result<AnnihilatorShape> {
    shape_of(&n.quotient, n.params)
}

/// Annihilator shape straight from the module, without listing elements.
pub fn annihilator_shape_of(m: &BKModule) -> Result<AnnihilatorShape> {
    let q = Presented::of(m)?.finite()?;
    shape_of(&q, m.params())
}

/// Twisted module as a presentation; `E` is read at the module's precision.
fn twisted(m: &BKModule, n: u32) -> Result<Presented> {
    Presented::of(&m.twist(n)?)
}

/// `l(M^(n)[E])`.
pub fn e_torsion_length(m: &BKModule, e: &EisensteinPoly, n: u32, _budget: u64) -> Result<u64> {
    let pres = twisted(m, n)?;
    pres.kernel_length(&e.to_series(m.params())?)
}

/// `l(M^(n)/E)`, or of its `p`-power torsion.
pub fn mod_e_length(m: &BKModule, e: &EisensteinPoly, n: u32, p_infty_only: bool) -> Result<u64> {
    let pres = twisted(m, n)?;
    let es = e.to_series(m.params())?;
    if pres.fixed.iter().all(Option::is_some) {
        return Ok(pres.with_scalar(&es).finite()?.log_size());
    }
    let (rank, tor) = pres.mod_e_split(e)?;
    if rank > 0 && !p_infty_only {
        return Err(Error::InfiniteModule(format!("M^({n})/E has O_K-rank {rank}")));
    }
    Ok(tor)
}

/// Lengths attached to the canonical pieces of a presented module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationLengths {
    /// `l(M[u^inf])`.
    pub u_infty: u64,
    /// Length of `M_tor` at the prime `(p)`; `M_{tor,u-tf}/E` has length `e` times this.
    pub tor_generic_length: u64,
    pub free_rank: u64,
    /// `l((M/p^N)[u^inf]) - l(M[u^inf])`.
    pub mbar: u64,
    /// The `N` used for the previous entry.
    pub truncation: u32,
}

/// Length of `M[u^inf]`, doubling the power of `u` until the kernel stops growing.
fn u_infty_length(pres: &Presented) -> Result<u64> {
    let params = pres.params;
    let mut prev = None;
    let mut j = 1usize;
    while j < params.u_prec() {
        let v = pres.kernel_length(&TruncatedSeries::monomial(params, 1, j))?;
        if prev == Some(v) {
            return Ok(v);
        }
        prev = Some(v);
        j *= 2;
    }
    Err(Error::precision(
        "u-power torsion",
        j as u64,
        params.u_prec() as u64,
    ))
}

/// Brute-force filtration data of a module given by a presentation.
pub fn brute_force_filtration(m: &BKModule) -> Result<FiltrationLengths> {
    let params = m.params();
    let pres = match m.presentation() {
        Some(p) => Presented::from_presentation(params, p),
        None => Presented::of(m)?,
    };
    let u_infty = u_infty_length(&pres)?;
    // rank over O_K of M/E is the rank of M; u^e - p is Eisenstein for every p, and
    // e is chosen so the split can use the whole u-adic precision
    let deg = params
        .u_prec()
        .div_ceil(params.p_prec() as usize)
        .clamp(1, params.u_prec() - 1);
    let e = EisensteinPoly::default_for(params.p(), deg)?;
    let (free_rank, _) = pres.mod_e_split(&e)?;
    // l_(p)(M/p^N) = tor + rank * min(N, .) grows by exactly `rank` once N passes the p-exponent
    let generic = |n: u32| -> Result<u64> {
        let q = pres.with_p_power(n)?;
        let slope = |b: usize| -> Result<u64> {
            let lo = q.quotient(n, vec![b; pres.gens()])?.log_size();
            let hi = q.quotient(n, vec![b + 1; pres.gens()])?.log_size();
            Ok(hi - lo)
        };
        let mut b = 2usize;
        let mut prev = slope(b)?;
        loop {
            let nb = 2 * b;
            if nb + 1 > params.u_prec() {
                return Err(Error::precision(
                    "generic length",
                    nb as u64 + 1,
                    params.u_prec() as u64,
                ));
            }
            let cur = slope(nb)?;
            if cur == prev {
                return Ok(cur);
            }
            prev = cur;
            b = nb;
        }
    };
    let mut n = 1u32;
    let mut g_n = generic(n)?;
    let tor_exp = loop {
        if n + 1 >= params.p_prec() {
            return Err(Error::HypothesisUnmet(format!(
                "p-power torsion exponent not reached below p^{}",
                params.p_prec()
            )));
        }
        let g_next = generic(n + 1)?;
        if g_next - g_n == free_rank {
            break n;
        }
        g_n = g_next;
        n += 1;
    };
    let tor_generic_length = g_n - free_rank * tor_exp as u64;
    let truncation = 2 * tor_exp;
    if truncation >= params.p_prec() {
        return Err(Error::HypothesisUnmet(format!(
            "need M/p^{truncation} but coefficients are known mod p^{}",
            params.p_prec()
        )));
    }
    let mod_pn = pres.with_p_power(truncation)?;
    let total = u_infty_length(&mod_pn)?;
    Ok(FiltrationLengths {
        u_infty,
        tor_generic_length,
        free_rank,
        mbar: total.checked_sub(u_infty).ok_or_else(|| {
            Error::SearchInconclusive(format!("(M/p^{truncation})[u^inf] smaller than M[u^inf]"))
        })?,
        truncation,
    })
}

/// Compares the summand and presentation forms of `m` through the lengths of
/// `M / (p^i, u^j)` for small `i, j`.
pub fn forms_agree(m: &BKModule) -> Result<bool> {
    let (Some(summands), Some(pres)) = (m.summands(), m.presentation()) else {
        return Ok(true);
    };
    let params = m.params();
    let a = Presented::of(&BKModule::from_summands(params, summands.to_vec())?)?;
    let b = Presented::from_presentation(params, pres);
    if a.gens() != b.gens() {
        return Ok(false);
    }
    let max_i = params.p_prec().min(4);
    let max_j = params.u_prec().min(8);
    for i in 1..=max_i {
        for j in 1..=max_j {
            let la = a.quotient(i, vec![j; a.gens()])?.log_size();
            let lb = b.quotient(i, vec![j; b.gens()])?.log_size();
            if la != lb {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: u64) -> RingParams {
        RingParams::new(p, 6, 32).unwrap()
    }

    fn module(p: u64, s: Vec<CyclicSummand>) -> BKModule {
        BKModule::from_summands(params(p), s).unwrap()
    }

    #[test]
    fn enumerate_examples() {
        let m = module(2, vec![CyclicSummand::pur(1, 2).unwrap()]);
        assert_eq!(enumerate(&m, DEFAULT_BUDGET).unwrap().cardinality(), 4);
        let m = module(3, vec![CyclicSummand::pur(2, 1).unwrap()]);
        assert_eq!(enumerate(&m, DEFAULT_BUDGET).unwrap().cardinality(), 9);
        let r = params(2);
        let m = module(2, vec![CyclicSummand::fur_one(r, 1, 2).unwrap()]);
        let n = enumerate(&m, DEFAULT_BUDGET).unwrap();
        assert_eq!(n.cardinality(), 4);
        assert_eq!(length_via_cardinality(&n).unwrap(), 2);
    }

    #[test]
    fn enumerate_refuses_infinite_and_large() {
        let m = module(2, vec![CyclicSummand::Free]);
        assert!(matches!(
            enumerate(&m, DEFAULT_BUDGET),
            Err(Error::InfiniteModule(_))
        ));
        let m = module(2, vec![CyclicSummand::pur(1, 30).unwrap()]);
        assert!(matches!(enumerate(&m, 1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn kernel_examples() {
        let r = params(3);
        let m = module(3, vec![CyclicSummand::pur(1, 5).unwrap()]);
        let n = enumerate(&m, DEFAULT_BUDGET).unwrap();
        let k = kernel_of_scalar(&n, &TruncatedSeries::monomial(r, 1, 3));
        assert_eq!(k.cardinality(), 27);
        assert_eq!(kernel_of_scalar(&n, &TruncatedSeries::one(r)).cardinality(), 1);
        assert_eq!(kernel_of_scalar(&n, &TruncatedSeries::zero(r)).cardinality(), 243);
    }

    #[test]
    fn annihilator_examples() {
        let m = module(3, vec![CyclicSummand::pur(1, 3).unwrap()]);
        let s = annihilator_shape(&enumerate(&m, DEFAULT_BUDGET).unwrap()).unwrap();
        assert_eq!((s.p_kills, s.alpha), (true, Some(3)));

        let r = params(2);
        let m = module(2, vec![CyclicSummand::fur_one(r, 1, 2).unwrap()]);
        let s = annihilator_shape(&enumerate(&m, DEFAULT_BUDGET).unwrap()).unwrap();
        assert!(!s.p_kills);
        assert_eq!(s.alpha, Some(1));
        let (alpha, x) = s.simple_element.unwrap();
        assert_eq!(alpha, 1);
        assert!(x.is_unit());

        let z = BKModule::zero(r);
        let s = annihilator_shape(&enumerate(&z, DEFAULT_BUDGET).unwrap()).unwrap();
        assert_eq!((s.p_kills, s.alpha), (true, None));
    }

    #[test]
    fn oracle_lengths_of_infinite_summands() {
        let r = params(2);
        let e = EisensteinPoly::default_for(2, 2).unwrap();
        let free = module(2, vec![CyclicSummand::Free]);
        assert_eq!(e_torsion_length(&free, &e, 0, DEFAULT_BUDGET).unwrap(), 0);
        assert_eq!(mod_e_length(&free, &e, 1, true).unwrap(), 0);
        assert!(matches!(
            mod_e_length(&free, &e, 0, false),
            Err(Error::InfiniteModule(_))
        ));
        let k_u = module(2, vec![CyclicSummand::ppow(1).unwrap()]);
        assert_eq!(mod_e_length(&k_u, &e, 0, false).unwrap(), 2);
        assert_eq!(e_torsion_length(&k_u, &e, 1, DEFAULT_BUDGET).unwrap(), 0);
        let _ = r;
    }

    #[test]
    fn filtration_of_presented_modules() {
        let r = RingParams::new(2, 12, 64).unwrap();
        let zero = TruncatedSeries::zero(r);
        let p = TruncatedSeries::constant(r, 2);
        let u = TruncatedSeries::u(r);

        let pres = Presentation::new(r, 1, vec![vec![p.clone()], vec![u.pow(2)]]).unwrap();
        let f = brute_force_filtration(&BKModule::from_presentation(r, pres)).unwrap();
        assert_eq!(
            (f.u_infty, f.tor_generic_length, f.free_rank, f.mbar),
            (2, 0, 0, 0)
        );

        let pres = Presentation::new(r, 1, vec![]).unwrap();
        let f = brute_force_filtration(&BKModule::from_presentation(r, pres)).unwrap();
        assert_eq!(
            (f.u_infty, f.tor_generic_length, f.free_rank, f.mbar),
            (0, 0, 1, 0)
        );

        // e_1, e_2 with p e_1 = 0, p e_2 = u e_1, u e_1 killed by u: an extension of
        // S/p by S/(p, u)
        let pres = Presentation::new(
            r,
            2,
            vec![
                vec![p.clone(), zero.clone()],
                vec![u.neg(), p.clone()],
                vec![u.pow(2), zero.clone()],
            ],
        )
        .unwrap();
        let f = brute_force_filtration(&BKModule::from_presentation(r, pres)).unwrap();
        assert_eq!(f.free_rank, 0);
        assert_eq!(f.u_infty, 2);
        assert_eq!(f.tor_generic_length, 1);

        // the ideal (p, u): generators x = p, y = u with u x = p y
        let pres = Presentation::new(r, 2, vec![vec![u.clone(), p.neg()]]).unwrap();
        let f = brute_force_filtration(&BKModule::from_presentation(r, pres)).unwrap();
        assert_eq!(
            (f.u_infty, f.tor_generic_length, f.free_rank, f.mbar),
            (0, 0, 1, 1)
        );
    }
}
