//! Self-checks: closed forms against the oracle, ring identities, constants,
//! worked examples, quasi-filtered validation and the β sweep.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::conjectures::{self, SweepConfig, SweepReport};
use crate::error::{Error, Result};
use crate::lengths::{in_fast_window, true_upsilon, upsilon_n_e, ValuationTable};
use crate::module::{BKModule, CyclicSummand, FiltrationPieces, Presentation};
use crate::oracle;
use crate::quasi_filtered::{self, Condition, QuasiFilteredBK};
use crate::ring::{ceil_div, is_prime, required_u_prec, EisensteinPoly, RingParams, TruncatedSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

/// Cells `(p, e, r, n)` with `e <= e_max`, `r <= r_max`, `n <= n_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    pub primes: Vec<u64>,
    pub e_max: u64,
    pub r_max: u64,
    pub n_max: u32,
}

impl Grid {
    pub fn for_level(level: Level) -> Self {
        match level {
            Level::Fast => Grid {
                primes: vec![2, 3],
                e_max: 4,
                r_max: 3,
                n_max: 2,
            },
            Level::Full => Grid {
                primes: vec![2, 3, 5],
                e_max: 8,
                r_max: 6,
                n_max: 3,
            },
        }
    }

    /// `PUr(1,r)` and `FUr(alpha,1,r)` with `alpha <= ceil(e/(p-1))` in every cell.
    fn cells(&self) -> Vec<GridCell> {
        let mut out = Vec::new();
        for &p in &self.primes {
            for e in 1..=self.e_max {
                for r in 1..=self.r_max {
                    for n in 0..=self.n_max {
                        out.push(GridCell {
                            p,
                            e,
                            r,
                            n,
                            alpha: None,
                        });
                        for alpha in 1..=ceil_div(e, p - 1) {
                            out.push(GridCell {
                                p,
                                e,
                                r,
                                n,
                                alpha: Some(alpha),
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct GridCell {
    p: u64,
    e: u64,
    r: u64,
    n: u32,
    /// `None` for `PUr(1,r)`.
    alpha: Option<u64>,
}

impl GridCell {
    fn params(&self) -> Result<RingParams> {
        let a = ceil_div(self.r, self.alpha.unwrap_or(self.r));
        let u_prec = required_u_prec(self.r, self.e, self.n, self.p)?;
        RingParams::new(self.p, (a as u32 + 2).max(3), u_prec)
    }

    fn exponent(&self) -> u64 {
        ceil_div(self.r, self.alpha.unwrap_or(self.r))
    }

    /// The stable kernel of `E` on an infinite module wants generous p-precision,
    /// so shallow u-levels are already clean.
    fn kernel_params(&self) -> Result<RingParams> {
        let base = self.params()?;
        let room = 8 * (2 * (self.e as usize + 1)).next_power_of_two();
        RingParams::new(self.p, max_p_prec(self.p), base.u_prec().max(room))
    }
}

/// Largest `m` with `p^m <= 2^32`, where lattice arithmetic stays in 64 bits.
fn max_p_prec(p: u64) -> u32 {
    let mut m = 1;
    while p.checked_pow(m + 1).is_some_and(|x| x <= 1 << 32) {
        m += 1;
    }
    m
}

/// Precision for splitting `M/E` over `O_K` when its torsion has `pi`-exponent at
/// most `c`: one window past that exponent, with the p-level matched to the
/// u-level through `p = u^e` mod `E`.
fn split_params(base: RingParams, e: u64, c: u64) -> Result<RingParams> {
    let j = (c as usize + 1).next_power_of_two().max(2);
    let level = 2 * j + 4;
    let p_prec = base.p_prec().max(ceil_div(level as u64, e) as u32);
    RingParams::new(base.p(), p_prec, base.u_prec().max(level))
}

impl GridCell {
    fn summand(&self, params: RingParams) -> Result<CyclicSummand> {
        match self.alpha {
            None => CyclicSummand::pur(1, self.r),
            Some(alpha) => CyclicSummand::fur_one(params, alpha, self.r),
        }
    }

    fn eisenstein(&self) -> Result<EisensteinPoly> {
        EisensteinPoly::default_for(self.p, self.e as usize)
    }
}

impl fmt::Display for GridCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.alpha {
            None => format!("PUr(1,{})", self.r),
            Some(a) => format!("FUr({a},[1],{})", self.r),
        };
        write!(f, "p={} e={} n={} {s}", self.p, self.e, self.n)
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

impl CheckOutcome {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass() { "pass" } else { "FAIL" };
        write!(
            f,
            "{verdict:4}  {:<28} {:>6} cases  {:>7.2}s",
            self.name,
            self.cases,
            self.elapsed.as_secs_f64()
        )?;
        for msg in self.failures.iter().take(5) {
            write!(f, "\n      {msg}")?;
        }
        if self.failures.len() > 5 {
            write!(f, "\n      ... {} more", self.failures.len() - 5)?;
        }
        Ok(())
    }
}

/// Runs `case` over `items` in parallel and collects failure messages; errors count as failures.
fn run_cases<T: Sync + fmt::Display>(
    name: &'static str,
    items: &[T],
    case: impl Fn(&T) -> Result<Vec<String>> + Sync,
) -> CheckOutcome {
    let start = Instant::now();
    let failures: Vec<String> = items
        .par_iter()
        .flat_map_iter(|it| match case(it) {
            Ok(msgs) => msgs.into_iter().map(|m| format!("{it}: {m}")).collect::<Vec<_>>(),
            Err(err) => vec![format!("{it}: {err}")],
        })
        .collect();
    CheckOutcome {
        name,
        cases: items.len(),
        failures,
        elapsed: start.elapsed(),
    }
}

fn expect_eq(out: &mut Vec<String>, what: &str, left: u64, right: u64) {
    if left != right {
        out.push(format!("{what}: {left} != {right}"));
    }
}

/// Every closed-form `E`-torsion and mod-`E` length equals the oracle length.
pub fn formula_vs_oracle(grid: &Grid) -> CheckOutcome {
    run_cases("formula vs oracle", &grid.cells(), |c| {
        let params = c.params()?;
        let e = c.eisenstein()?;
        let m = BKModule::from_summands(params, vec![c.summand(params)?])?;
        let mut out = Vec::new();
        expect_eq(
            &mut out,
            "E-torsion formula vs oracle",
            m.e_torsion_length(&e, c.n)?,
            oracle::e_torsion_length(&m, &e, c.n, oracle::budget_from_env())?,
        );
        expect_eq(
            &mut out,
            "mod-E formula vs oracle",
            m.mod_e_length(&e, c.n, false)?,
            oracle::mod_e_length(&m, &e, c.n, false)?,
        );
        Ok(out)
    })
}

/// The ideal `(p, u)` of `S`: generators `p, u` with the syzygy `u·p - p·u`.
pub fn ideal_p_u(params: RingParams) -> Result<BKModule> {
    let rel = vec![
        TruncatedSeries::u(params),
        TruncatedSeries::constant(params, -(params.p() as i64)),
    ];
    Ok(BKModule::from_presentation(
        params,
        Presentation::new(params, 2, vec![rel])?,
    ))
}

/// Length identities of the filtration, all sides computed by the oracle except
/// the three-term sum, which uses the closed forms on the pieces.
pub fn lemma_identities(grid: &Grid) -> CheckOutcome {
    let mut outcome = run_cases("filtration identities", &grid.cells(), |c| {
        let e = c.eisenstein()?;
        let params = c.kernel_params()?;
        let s = BKModule::from_summands(params, vec![c.summand(params)?])?;
        let extra = BKModule::from_summands(params, vec![CyclicSummand::ppow(1)?, CyclicSummand::Free])?;
        let whole = s.direct_sum(&extra)?;
        let s_tor = oracle::e_torsion_length(&s, &e, c.n, oracle::DEFAULT_BUDGET)?;
        let mut out = Vec::new();
        expect_eq(
            &mut out,
            "l(M[E]) vs l(M[u^inf][E])",
            oracle::e_torsion_length(&whole, &e, c.n, oracle::DEFAULT_BUDGET)?,
            s_tor,
        );
        expect_eq(
            &mut out,
            "l(M[u^inf][E]) vs l(M[u^inf]/E)",
            s_tor,
            oracle::mod_e_length(&s, &e, c.n, false)?,
        );

        // u^{r p^n} kills the twisted summand; S/p and the ideal (p, u) add exponent e
        let killed_by = c.r * c.p.pow(c.n);
        let params = split_params(c.params()?, c.e, killed_by.min(c.e * c.exponent()).max(c.e))?;
        let s = BKModule::from_summands(params, vec![c.summand(params)?])?;
        let pieces = FiltrationPieces {
            u_infty: s.clone(),
            tor_u_tf: BKModule::from_summands(params, vec![CyclicSummand::ppow(1)?])?,
            free_rank: 1,
            mbar: BKModule::from_summands(params, vec![CyclicSummand::pur(1, 1)?])?,
        };
        let assembled = s
            .direct_sum(&BKModule::from_summands(params, vec![CyclicSummand::ppow(1)?])?)?
            .direct_sum(&ideal_p_u(params)?)?;
        expect_eq(
            &mut out,
            "three-term sum vs l((M/E)[p^inf])",
            pieces.length_contributions(&e, c.n)?.total,
            oracle::mod_e_length(&assembled, &e, c.n, true)?,
        );
        Ok(out)
    });

    let mut tor_cells = Vec::new();
    for &p in &grid.primes {
        for e in 1..=grid.e_max {
            for a in 1..=2u64 {
                tor_cells.push((p, e, a));
            }
        }
    }
    let tor = run_cases("", &tor_cells.iter().map(TorCell).collect::<Vec<_>>(), |t| {
        let (p, e, a) = *t.0;
        let base = RingParams::new(p, a as u32 + 1, required_u_prec(1, e, grid.n_max, p)?)?;
        let params = split_params(base, e, e * a)?;
        let poly = EisensteinPoly::default_for(p, e as usize)?;
        let m = BKModule::from_summands(params, vec![CyclicSummand::ppow(a)?])?;
        let mut out = Vec::new();
        for n in 0..=grid.n_max {
            expect_eq(
                &mut out,
                &format!("l(S/p^{a} twisted {n} mod E) vs e·a"),
                oracle::mod_e_length(&m, &poly, n, false)?,
                e * a,
            );
        }
        Ok(out)
    });
    outcome.cases += tor.cases;
    outcome.failures.extend(tor.failures);
    outcome.elapsed += tor.elapsed;
    outcome
}

struct TorCell<'a>(&'a (u64, u64, u64));

impl fmt::Display for TorCell<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, e, a) = self.0;
        write!(f, "p={p} e={e} Ppow({a})")
    }
}

#[derive(Debug, Clone, Copy)]
struct ValCell {
    p: u64,
    e: u64,
    alpha: u64,
}

impl fmt::Display for ValCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} e={} alpha={}", self.p, self.e, self.alpha)
    }
}

/// `upsilon_n(E)` is `alpha`, `min(e, p alpha)`, then `e`, and matches the valuation computed directly.
pub fn valuation_table(p_max: u64, n_max: u32) -> CheckOutcome {
    let mut cells = Vec::new();
    for p in (2..=p_max).filter(|&p| is_prime(p)) {
        for e in 1..p * p {
            for alpha in 1..=e {
                if in_fast_window(p, e, alpha) {
                    cells.push(ValCell { p, e, alpha });
                }
            }
        }
    }
    run_cases("valuation table", &cells, |c| {
        let poly = EisensteinPoly::default_for(c.p, c.e as usize)?;
        let one = TruncatedSeries::one(RingParams::new(c.p, 1, 1)?);
        let mut out = Vec::new();
        let table = ValuationTable::new(c.p, c.e, c.alpha, n_max)?;
        if !table.is_well_shaped() {
            out.push(format!(
                "table {:?} is not alpha, min(e, p alpha), e, ...",
                table.values
            ));
        }
        for n in 0..=n_max {
            let expected = match n {
                0 => c.alpha,
                1 => c.e.min(c.p * c.alpha),
                _ => c.e,
            };
            expect_eq(
                &mut out,
                &format!("n={n} fast path vs case table"),
                upsilon_n_e(c.p, c.e, c.alpha, n)?,
                expected,
            );
            expect_eq(
                &mut out,
                &format!("n={n} case table vs valuation"),
                expected,
                true_upsilon(&poly, c.alpha, &one, n)?,
            );
        }
        Ok(out)
    })
}

fn random_series(rng: &mut impl Rng, params: RingParams) -> TruncatedSeries {
    let m = params.modulus();
    let coeffs = (0..params.u_prec()).map(|_| rng.gen_range(0..m)).collect();
    TruncatedSeries::from_residues(params, coeffs)
}

fn random_eisenstein(rng: &mut impl Rng, p: u64, max_deg: usize) -> Result<EisensteinPoly> {
    let e = rng.gen_range(1..=max_deg);
    let pi = p as i64;
    let mut coeffs: Vec<i64> = (0..e).map(|_| pi * rng.gen_range(-(pi * pi)..=pi * pi)).collect();
    let unit = loop {
        let c = rng.gen_range(-(pi * pi)..=pi * pi);
        if c % pi != 0 {
            break c;
        }
    };
    coeffs[0] = pi * unit;
    EisensteinPoly::new(p, coeffs)
}

#[derive(Debug, Clone, Copy)]
struct RingCell {
    p: u64,
    m: u32,
    u_prec: usize,
}

impl fmt::Display for RingCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}^{}[u]/u^{}", self.p, self.m, self.u_prec)
    }
}

/// Frobenius is a ring map, `phi(E) = E^p` and `E = u^e` modulo `p`, on random data.
pub fn ring_identities(pairs: usize, polys: usize, seed: u64) -> CheckOutcome {
    let mut cells = Vec::new();
    for p in [2, 3, 5] {
        for m in [1, 2, 4] {
            for u_prec in [8, 24] {
                cells.push(RingCell { p, m, u_prec });
            }
        }
    }
    run_cases("ring identities", &cells, |c| {
        let params = RingParams::new(c.p, c.m, c.u_prec)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (c.p << 32) ^ ((c.m as u64) << 16) ^ c.u_prec as u64);
        let mut out = Vec::new();
        let one = TruncatedSeries::one(params);
        if one.frobenius(1) != one {
            out.push("phi(1) != 1".into());
        }
        for _ in 0..pairs {
            let (x, y) = (random_series(&mut rng, params), random_series(&mut rng, params));
            if x.add(&y)?.frobenius(1) != x.frobenius(1).add(&y.frobenius(1))? {
                out.push(format!(
                    "phi not additive on {:?}, {:?}",
                    x.signed_coeffs(),
                    y.signed_coeffs()
                ));
            }
            if x.mul(&y)?.frobenius(1) != x.frobenius(1).mul(&y.frobenius(1))? {
                out.push(format!(
                    "phi not multiplicative on {:?}, {:?}",
                    x.signed_coeffs(),
                    y.signed_coeffs()
                ));
            }
        }
        for _ in 0..polys {
            let e = random_eisenstein(&mut rng, c.p, c.u_prec - 1)?;
            let es = e.to_series(params)?;
            if es.frobenius(1).mod_p() != es.pow(c.p).mod_p() {
                out.push(format!("phi(E) != E^p mod p for {e}"));
            }
            let ue = TruncatedSeries::monomial(params, 1, e.degree());
            if es.mod_p() != ue.mod_p() {
                out.push(format!("E != u^e mod p for {e}"));
            }
        }
        Ok(out)
    })
}

struct ConstCell(u64);

impl fmt::Display for ConstCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={}", self.0)
    }
}

/// `a` and `e_tilde` are minimal, and `a = 0` exactly when `e <= p - 1`.
pub fn constants(p_max: u64, e_max: u64) -> CheckOutcome {
    let cells: Vec<ConstCell> = (2..=p_max).filter(|&p| is_prime(p)).map(ConstCell).collect();
    let mut outcome = run_cases("constants", &cells, |c| {
        let p = c.0;
        let mut out = Vec::new();
        for e in 1..=e_max {
            let k = conjectures::derive_constants(p, e)?;
            if !k.is_minimal() {
                out.push(format!("e={e}: a={} e_tilde={} not minimal", k.a, k.e_tilde));
            }
            if (k.a == 0) != (e < p) {
                out.push(format!("e={e}: a={} but e <= p-1 is {}", k.a, e < p));
            }
        }
        Ok(out)
    });
    outcome.cases *= e_max as usize;
    outcome
}

struct Prime(u64);

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={}", self.0)
    }
}

/// Integer identities of the worked example with `e = p^4 - p^2`.
pub fn li_petrov(primes: &[u64]) -> CheckOutcome {
    let cells: Vec<Prime> = primes.iter().copied().map(Prime).collect();
    run_cases("worked example lengths", &cells, |c| {
        let p = c.0;
        let r = conjectures::example_li_petrov(p)?;
        let mut out = Vec::new();
        let (p3, p4) = (p.pow(3), p.pow(4));
        expect_eq(&mut out, "e", r.e, p4 - p * p);
        expect_eq(&mut out, "l2_dR vs 2e", r.l2_dr, 2 * r.e);
        expect_eq(&mut out, "l2_dR vs e l2_crys", r.l2_dr, r.e * r.l2_crys);
        expect_eq(&mut out, "l3_crys", r.l3_crys, 1);
        expect_eq(&mut out, "l3_dR", r.l3_dr, p3 - p * p);
        expect_eq(&mut out, "e l3_crys", r.e * r.l3_crys, p4 - p * p);
        if !(r.l3_crys < r.l3_dr && r.l3_dr < r.e * r.l3_crys) {
            out.push("degree 3 inequalities are not strict".into());
        }
        if !(r.identities_hold && r.degree2.pass() && r.degree3.pass()) {
            out.push("report flags a failed inequality".into());
        }
        Ok(out)
    })
}

/// The exhaustive β sweep in the small-ramification window.
pub fn beta_sweep(config: &SweepConfig) -> Result<(CheckOutcome, SweepReport)> {
    let start = Instant::now();
    let report = conjectures::sweep_beta(config)?;
    let failures = report
        .rows
        .iter()
        .filter(|r| r.verdict == conjectures::Verdict::Fail)
        .map(|r| format!("p={} e={} {} {}: {}", r.p, r.e, r.module, r.check, r.values))
        .collect();
    Ok((
        CheckOutcome {
            name: "beta sweep",
            cases: report.rows.len(),
            failures,
            elapsed: start.elapsed(),
        },
        report,
    ))
}

/// Identity structures validate, mutants are caught with the right condition,
/// and generated structures respect the `alpha` bound.
pub fn quasi_filtered_checks(sweep: &SweepReport) -> CheckOutcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut cases = 0;
    let mut run = |label: String, f: &dyn Fn() -> Result<Vec<String>>| {
        cases += 1;
        match f() {
            Ok(msgs) => failures.extend(msgs.into_iter().map(|m| format!("{label}: {m}"))),
            Err(err) => failures.push(format!("{label}: {err}")),
        }
    };
    for (p, e) in [(2u64, 1usize), (3, 2), (5, 3)] {
        for kind in [CyclicSummand::Free, CyclicSummand::Ppow { a: 1 }] {
            let label = format!("identity p={p} e={e} {kind}");
            run(label, &|| {
                let params = RingParams::new(p, 3, 4 * e + 8)?;
                let poly = EisensteinPoly::default_for(p, e)?;
                let m = BKModule::from_summands(params, vec![kind.clone()])?;
                let qf = QuasiFilteredBK::identity_example(m, poly)?;
                let mut out = Vec::new();
                let report = quasi_filtered::validate(&qf)?;
                if !report.is_valid() {
                    out.push(format!("identity example rejected: {report:?}"));
                }
                if quasi_filtered::check_height_relations(&qf)? != (true, true) {
                    out.push("derived Frobenius breaks the height relations".into());
                }
                for c in Condition::ALL {
                    let report = quasi_filtered::validate(&qf.mutant(c)?)?;
                    if !report.violations.contains(&c) {
                        out.push(format!("mutant for '{c}' not caught: {report:?}"));
                    }
                }
                Ok(out)
            });
        }
    }
    cases += sweep.qf_validated;
    if sweep.qf_validated == 0 {
        failures.push("sweep produced no validated structures".into());
    }
    for r in sweep
        .rows
        .iter()
        .filter(|r| r.check == "qf-alpha" && r.verdict == conjectures::Verdict::Fail)
    {
        failures.push(format!("p={} e={} {}: {}", r.p, r.e, r.module, r.values));
    }
    CheckOutcome {
        name: "quasi-filtered",
        cases,
        failures,
        elapsed: start.elapsed(),
    }
}

#[derive(Debug, Clone)]
pub struct Summary {
    pub level: Level,
    pub checks: Vec<CheckOutcome>,
}

impl Summary {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(CheckOutcome::pass)
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.pass()).count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

/// Every suite at the given level.
pub fn run(level: Level) -> Result<Summary> {
    let grid = Grid::for_level(level);
    let (pairs, polys) = match level {
        Level::Fast => (100, 10),
        Level::Full => (1000, 50),
    };
    let sweep_config = match level {
        Level::Fast => SweepConfig {
            max_summands: 2,
            ..SweepConfig::default()
        },
        Level::Full => SweepConfig::default(),
    };
    let mut checks = vec![
        formula_vs_oracle(&grid),
        lemma_identities(&grid),
        valuation_table(if level == Level::Full { 7 } else { 5 }, 3),
        ring_identities(pairs, polys, 0x5eed),
        constants(13, 200),
        li_petrov(&[2, 3, 5]),
    ];
    let (sweep_check, sweep) = beta_sweep(&sweep_config)?;
    checks.push(sweep_check);
    checks.push(quasi_filtered_checks(&sweep));
    for c in &checks {
        log::info!("{} finished in {:.2}s", c.name, c.elapsed.as_secs_f64());
    }
    Ok(Summary { level, checks })
}

/// Maps suite errors to a failed check instead of aborting the run.
pub fn guard(name: &'static str, r: Result<CheckOutcome>) -> CheckOutcome {
    r.unwrap_or_else(|err: Error| CheckOutcome {
        name,
        cases: 0,
        failures: vec![err.to_string()],
        elapsed: Duration::ZERO,
    })
}
