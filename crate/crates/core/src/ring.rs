//! Arithmetic in the truncated Breuil-Kisin ring `Z_p[[u]] / (p^m, u^M)`.
//!
//! Residue field is `F_p`, so Witt vectors are `Z_p` and the Frobenius lift
//! acts as `u -> u^p` with trivial action on coefficients.

use std::fmt;

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

/// `base^exp`, saturating at `u64::MAX`. Used where the value only feeds a `min`.
pub(crate) fn saturating_pow(base: u64, exp: u32) -> u64 {
    base.checked_pow(exp).unwrap_or(u64::MAX)
}

pub(crate) fn mod_inverse(a: u64, modulus: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % modulus as i128, modulus as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(modulus as i128) as u64)
}

/// Ceiling of `num / den` for positive integers.
pub fn ceil_div(num: u64, den: u64) -> u64 {
    num.div_ceil(den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingParams {
    p: u64,
    p_prec: u32,
    u_prec: usize,
    modulus: u64,
}

impl RingParams {
    pub fn new(p: u64, p_prec: u32, u_prec: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p_prec == 0 || u_prec == 0 {
            return Err(Error::InvalidParams("p_prec and u_prec must be positive".into()));
        }
        let modulus = checked_pow(p, p_prec)
            .filter(|m| *m <= (1u64 << 62))
            .ok_or_else(|| Error::Overflow(format!("{p}^{p_prec} does not fit in 62 bits")))?;
        Ok(RingParams {
            p,
            p_prec,
            u_prec,
            modulus,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn p_prec(&self) -> u32 {
        self.p_prec
    }

    pub fn u_prec(&self) -> usize {
        self.u_prec
    }

    /// `p^p_prec`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn with_u_prec(&self, u_prec: usize) -> Result<Self> {
        RingParams::new(self.p, self.p_prec, u_prec)
    }

    pub fn with_p_prec(&self, p_prec: u32) -> Result<Self> {
        RingParams::new(self.p, p_prec, self.u_prec)
    }

    pub(crate) fn reduce(&self, c: i128) -> u64 {
        c.rem_euclid(self.modulus as i128) as u64
    }
}

/// Smallest `u`-precision at which every twist up to `n_max` of summands with
/// exponents up to `max_r`, and every twisted Eisenstein polynomial of degree `e`,
/// is represented exactly.
pub fn required_u_prec(max_r: u64, e: u64, n_max: u32, p: u64) -> Result<usize> {
    if max_r == 0 || e == 0 || p < 2 {
        return Err(Error::InvalidParams(
            "required_u_prec inputs must be positive".into(),
        ));
    }
    let alpha_bound = ceil_div(e, p - 1);
    let base = max_r.max(e).max(alpha_bound);
    let overflow = || Error::Overflow(format!("{p}^{n_max} * {base} + 1"));
    let scaled = checked_pow(p, n_max)
        .and_then(|q| q.checked_mul(base))
        .and_then(|v| v.checked_add(1))
        .ok_or_else(overflow)?;
    usize::try_from(scaled).map_err(|_| overflow())
}

/// An element of `Z_p[[u]] / (p^m, u^M)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    params: RingParams,
    coeffs: Vec<u64>,
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{c}")?,
                1 if c == 1 => write!(f, "u")?,
                1 => write!(f, "{c}*u")?,
                _ if c == 1 => write!(f, "u^{j}")?,
                _ => write!(f, "{c}*u^{j}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(
            f,
            " (mod {}^{}, u^{})",
            self.params.p, self.params.p_prec, self.params.u_prec
        )
    }
}

impl TruncatedSeries {
    pub fn zero(params: RingParams) -> Self {
        TruncatedSeries {
            params,
            coeffs: vec![0; params.u_prec],
        }
    }

    pub fn one(params: RingParams) -> Self {
        Self::constant(params, 1)
    }

    pub fn constant(params: RingParams, c: i64) -> Self {
        let mut s = Self::zero(params);
        s.coeffs[0] = params.reduce(c as i128);
        s
    }

    /// `c * u^j`; zero when `j >= u_prec`.
    pub fn monomial(params: RingParams, c: i64, j: usize) -> Self {
        let mut s = Self::zero(params);
        if j < params.u_prec {
            s.coeffs[j] = params.reduce(c as i128);
        }
        s
    }

    pub fn u(params: RingParams) -> Self {
        Self::monomial(params, 1, 1)
    }

    /// Builds a series from integer coefficients; terms of degree `>= u_prec` are dropped.
    pub fn from_coeffs(params: RingParams, coeffs: &[i64]) -> Self {
        let mut s = Self::zero(params);
        for (j, &c) in coeffs.iter().enumerate().take(params.u_prec) {
            s.coeffs[j] = params.reduce(c as i128);
        }
        s
    }

    pub(crate) fn from_residues(params: RingParams, mut coeffs: Vec<u64>) -> Self {
        coeffs.resize(params.u_prec, 0);
        for c in coeffs.iter_mut() {
            *c %= params.modulus;
        }
        TruncatedSeries { params, coeffs }
    }

    pub fn params(&self) -> RingParams {
        self.params
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> u64 {
        self.coeffs.get(j).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Units are exactly the series whose constant term is prime to `p`.
    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].is_multiple_of(self.params.p)
    }

    /// Degree of the highest nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0)
    }

    /// Index of the lowest nonzero coefficient.
    pub fn u_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.params != other.params {
            return Err(Error::ParamsMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let m = self.params.modulus;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a + b) % m)
            .collect();
        Ok(TruncatedSeries {
            params: self.params,
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        let m = self.params.modulus;
        let coeffs = self.coeffs.iter().map(|&a| (m - a) % m).collect();
        TruncatedSeries {
            params: self.params,
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.params.u_prec;
        let m = self.params.modulus as u128;
        let mut out = vec![0u128; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs[..n - i].iter().enumerate() {
                if b != 0 {
                    out[i + j] = (out[i + j] + a as u128 * b as u128) % m;
                }
            }
        }
        Ok(TruncatedSeries {
            params: self.params,
            coeffs: out.into_iter().map(|c| c as u64).collect(),
        })
    }

    pub fn scale(&self, c: i64) -> Self {
        let m = self.params.modulus as u128;
        let c = self.params.reduce(c as i128) as u128;
        TruncatedSeries {
            params: self.params,
            coeffs: self.coeffs.iter().map(|&a| (a as u128 * c % m) as u64).collect(),
        }
    }

    /// Multiplication by `u^k`.
    pub fn shift(&self, k: usize) -> Self {
        let mut s = Self::zero(self.params);
        for j in 0..self.params.u_prec.saturating_sub(k) {
            s.coeffs[j + k] = self.coeffs[j];
        }
        s
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut acc = Self::one(self.params);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base).expect("same params");
            }
            base = base.mul(&base).expect("same params");
            k >>= 1;
        }
        acc
    }

    pub fn inverse(&self) -> Result<Self> {
        let m = self.params.modulus as u128;
        let c0_inv = mod_inverse(self.coeffs[0], self.params.modulus)
            .ok_or_else(|| Error::InvalidParams(format!("{self} is not a unit")))?
            as u128;
        let n = self.params.u_prec;
        let mut b = vec![0u64; n];
        b[0] = c0_inv as u64;
        for k in 1..n {
            let mut acc = 0u128;
            for j in 1..=k {
                acc = (acc + self.coeffs[j] as u128 * b[k - j] as u128) % m;
            }
            b[k] = ((m - acc) % m * c0_inv % m) as u64;
        }
        Ok(TruncatedSeries {
            params: self.params,
            coeffs: b,
        })
    }

    /// Coefficients reduced mod `p`.
    pub fn mod_p(&self) -> Vec<u64> {
        self.coeffs.iter().map(|c| c % self.params.p).collect()
    }

    /// The same integer polynomial read in another precision. Fails if a nonzero
    /// term would be dropped.
    pub fn reembed(&self, params: RingParams) -> Result<Self> {
        if params.p != self.params.p {
            return Err(Error::ParamsMismatch);
        }
        if let Some(d) = self.degree() {
            if d >= params.u_prec {
                return Err(Error::precision(
                    "re-embedding series",
                    d as u64 + 1,
                    params.u_prec as u64,
                ));
            }
        }
        let coeffs: Vec<i64> = self.signed_coeffs();
        Ok(Self::from_coeffs(params, &coeffs))
    }

    /// Coefficients lifted to the symmetric range around zero.
    pub fn signed_coeffs(&self) -> Vec<i64> {
        let m = self.params.modulus;
        self.coeffs
            .iter()
            .map(|&c| if c > m / 2 { c as i64 - m as i64 } else { c as i64 })
            .collect()
    }

    /// Frobenius lift `u -> u^{p^n}`, truncated at `u^M`.
    pub fn frobenius(&self, n: u32) -> Self {
        let step = saturating_pow(self.params.p, n);
        let mut s = Self::zero(self.params);
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            match (j as u64).checked_mul(step) {
                Some(k) if k < self.params.u_prec as u64 => s.coeffs[k as usize] = c,
                _ => {}
            }
        }
        s
    }

    /// Lowest degree at which `frobenius(n)` would drop a nonzero term, if any.
    pub fn frobenius_loss(&self, n: u32) -> Option<u64> {
        let step = saturating_pow(self.params.p, n);
        let d = self.degree()? as u64;
        let needed = d.saturating_mul(step).saturating_add(1);
        (needed > self.params.u_prec as u64).then_some(needed)
    }
}

/// A monic Eisenstein polynomial `u^e + c_{e-1} u^{e-1} + ... + c_0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EisensteinPoly {
    p: u64,
    coeffs: Vec<i64>,
}

impl EisensteinPoly {
    /// `coeffs` are `c_0, ..., c_{e-1}`.
    pub fn new(p: u64, coeffs: Vec<i64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidEisenstein("degree must be at least 1".into()));
        }
        let pi = p as i64;
        if let Some(j) = coeffs.iter().position(|c| c % pi != 0) {
            return Err(Error::InvalidEisenstein(format!(
                "coefficient c_{j} = {} is not divisible by {p}",
                coeffs[j]
            )));
        }
        if coeffs[0] % (pi * pi) == 0 {
            return Err(Error::InvalidEisenstein(format!(
                "constant term {} is divisible by {p}^2",
                coeffs[0]
            )));
        }
        Ok(EisensteinPoly { p, coeffs })
    }

    /// `u^e - p`.
    pub fn default_for(p: u64, e: usize) -> Result<Self> {
        if e == 0 {
            return Err(Error::InvalidEisenstein("degree must be at least 1".into()));
        }
        let mut coeffs = vec![0i64; e];
        coeffs[0] = -(p as i64);
        Self::new(p, coeffs)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Full coefficient list including the leading 1.
    pub fn monic_coeffs(&self) -> Vec<i64> {
        let mut c = self.coeffs.clone();
        c.push(1);
        c
    }

    pub fn to_series(&self, params: RingParams) -> Result<TruncatedSeries> {
        if params.p() != self.p {
            return Err(Error::ParamsMismatch);
        }
        if params.u_prec() <= self.degree() {
            return Err(Error::precision(
                "Eisenstein polynomial",
                self.degree() as u64 + 1,
                params.u_prec() as u64,
            ));
        }
        Ok(TruncatedSeries::from_coeffs(params, &self.monic_coeffs()))
    }
}

impl fmt::Display for EisensteinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u^{}", self.degree())?;
        for (j, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { '-' } else { '+' };
            match j {
                0 => write!(f, " {sign} {}", c.abs())?,
                1 => write!(f, " {sign} {}*u", c.abs())?,
                _ => write!(f, " {sign} {}*u^{j}", c.abs())?,
            }
        }
        Ok(())
    }
}

/// `E(u^{p^n})`, the `n`-th Frobenius twist of `E`.
pub fn twist_eisenstein(e: &EisensteinPoly, n: u32, params: RingParams) -> Result<TruncatedSeries> {
    let needed = checked_pow(params.p(), n)
        .and_then(|q| q.checked_mul(e.degree() as u64))
        .and_then(|v| v.checked_add(1))
        .ok_or_else(|| Error::Overflow(format!("{}^{n} * {}", params.p(), e.degree())))?;
    if (params.u_prec() as u64) < needed {
        return Err(Error::precision(
            "twisted Eisenstein polynomial",
            needed,
            params.u_prec() as u64,
        ));
    }
    Ok(e.to_series(params)?.frobenius(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DvrValuation {
    Finite(u64),
    Infinite,
}

impl DvrValuation {
    pub fn finite(self) -> Option<u64> {
        match self {
            DvrValuation::Finite(v) => Some(v),
            DvrValuation::Infinite => None,
        }
    }
}

impl fmt::Display for DvrValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DvrValuation::Finite(v) => write!(f, "{v}"),
            DvrValuation::Infinite => write!(f, "inf"),
        }
    }
}

/// `u`-adic valuation of the image of `x` in the DVR `Z_p[[u]] / (u^alpha + p*unit)`.
///
/// Every `p` is rewritten as `-unit^{-1} u^alpha`, degree by degree, until each
/// coefficient is a digit in `[0, p)`; the first nonzero digit is the valuation.
/// Only valuations below `min(p_prec * alpha, u_prec)` are certified.
pub fn dvr_valuation(x: &TruncatedSeries, alpha: u64, unit: &TruncatedSeries) -> Result<DvrValuation> {
    let params = x.params();
    if unit.params() != params {
        return Err(Error::ParamsMismatch);
    }
    if alpha == 0 {
        return Err(Error::InvalidParams("alpha must be positive".into()));
    }
    if !unit.is_unit() {
        return Err(Error::InvalidParams(format!("{unit} is not a unit")));
    }
    let p = params.p();
    let m = params.modulus() as u128;
    let horizon = (params.p_prec() as u64)
        .saturating_mul(alpha)
        .min(params.u_prec() as u64) as usize;
    let w = unit.inverse()?;
    let mut c: Vec<u64> = x.coeffs()[..horizon].to_vec();
    let alpha = alpha as usize;
    for j in 0..horizon {
        let digit = c[j] % p;
        let carry = (c[j] / p) as u128;
        c[j] = digit;
        if carry == 0 {
            continue;
        }
        for t in 0..horizon.saturating_sub(j + alpha) {
            let wt = w.coeff(t) as u128;
            if wt == 0 {
                continue;
            }
            let k = j + alpha + t;
            let sub = carry * wt % m;
            c[k] = ((c[k] as u128 + m - sub) % m) as u64;
        }
    }
    match c.iter().position(|&d| d != 0) {
        Some(v) => Ok(DvrValuation::Finite(v as u64)),
        None if x.is_zero() => Ok(DvrValuation::Infinite),
        None => Err(Error::precision(
            "dvr valuation horizon",
            horizon as u64 + 1,
            horizon as u64,
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: u64, m: u32, n: usize) -> RingParams {
        RingParams::new(p, m, n).unwrap()
    }

    #[test]
    fn rejects_composite_and_zero_precision() {
        assert_eq!(RingParams::new(4, 2, 3), Err(Error::NotPrime(4)));
        assert!(RingParams::new(3, 0, 3).is_err());
        assert!(RingParams::new(3, 2, 0).is_err());
    }

    #[test]
    fn add_examples() {
        let r = params(5, 3, 4);
        let x = TruncatedSeries::from_coeffs(r, &[1, 1]);
        let y = TruncatedSeries::from_coeffs(r, &[5, -1]);
        assert_eq!(x.add(&y).unwrap(), TruncatedSeries::constant(r, 6));
        assert_eq!(x.add(&TruncatedSeries::zero(r)).unwrap(), x);
        let r2 = params(2, 1, 3);
        let z = TruncatedSeries::monomial(r2, 1, 1);
        assert!(z.add(&z).unwrap().is_zero());
    }

    #[test]
    fn mixed_params_refused() {
        let a = TruncatedSeries::one(params(3, 2, 4));
        let b = TruncatedSeries::one(params(3, 2, 5));
        assert_eq!(a.add(&b), Err(Error::ParamsMismatch));
        assert_eq!(a.mul(&b), Err(Error::ParamsMismatch));
    }

    #[test]
    fn mul_examples() {
        let r = params(3, 2, 5);
        let u = TruncatedSeries::u(r);
        assert_eq!(u.mul(&u).unwrap(), TruncatedSeries::monomial(r, 1, 2));
        let x = TruncatedSeries::from_coeffs(r, &[2, 0, 7, 1]);
        assert_eq!(x.mul(&TruncatedSeries::one(r)).unwrap(), x);
        let top = TruncatedSeries::monomial(r, 1, 4);
        assert!(top.mul(&u).unwrap().is_zero());
    }

    #[test]
    fn frobenius_examples() {
        let r = params(3, 3, 10);
        let u = TruncatedSeries::u(r);
        assert_eq!(u.frobenius(1), TruncatedSeries::monomial(r, 1, 3));
        let x = TruncatedSeries::from_coeffs(r, &[4, 1, 2]);
        assert_eq!(x.frobenius(0), x);
        let e = EisensteinPoly::default_for(3, 2).unwrap().to_series(r).unwrap();
        let twisted = e.frobenius(1);
        assert_eq!(twisted, TruncatedSeries::from_coeffs(r, &[-3, 0, 0, 0, 0, 0, 1]));
        let cube = e.pow(3);
        assert_eq!(twisted.mod_p(), cube.mod_p());
    }

    #[test]
    fn twist_eisenstein_examples() {
        let r = params(2, 4, 9);
        let e = EisensteinPoly::default_for(2, 2).unwrap();
        let mut expected = vec![0i64; 9];
        expected[0] = -2;
        expected[8] = 1;
        assert_eq!(
            twist_eisenstein(&e, 2, r).unwrap(),
            TruncatedSeries::from_coeffs(r, &expected)
        );
        assert_eq!(twist_eisenstein(&e, 0, r).unwrap(), e.to_series(r).unwrap());

        let e3 = EisensteinPoly::new(2, vec![2, 2, 0]).unwrap();
        let r7 = params(2, 4, 7);
        assert_eq!(
            twist_eisenstein(&e3, 1, r7).unwrap(),
            TruncatedSeries::from_coeffs(r7, &[2, 0, 2, 0, 0, 0, 1])
        );
        assert!(twist_eisenstein(&e, 2, params(2, 4, 8))
            .unwrap_err()
            .is_precision());
    }

    #[test]
    fn eisenstein_validation() {
        assert!(EisensteinPoly::new(3, vec![9, 3]).is_err());
        assert!(EisensteinPoly::new(3, vec![3, 1]).is_err());
        assert!(EisensteinPoly::new(3, vec![]).is_err());
        assert!(EisensteinPoly::new(3, vec![-3, 6]).is_ok());
        assert_eq!(EisensteinPoly::default_for(5, 3).unwrap().to_string(), "u^3 - 5");
    }

    #[test]
    fn dvr_valuation_examples() {
        let r = params(3, 6, 12);
        let one = TruncatedSeries::one(r);
        let p = TruncatedSeries::constant(r, 3);
        assert_eq!(dvr_valuation(&p, 2, &one).unwrap(), DvrValuation::Finite(2));
        assert_eq!(
            dvr_valuation(&TruncatedSeries::u(r), 2, &one).unwrap(),
            DvrValuation::Finite(1)
        );
        let e = EisensteinPoly::default_for(3, 5).unwrap().to_series(r).unwrap();
        assert_eq!(dvr_valuation(&e, 2, &one).unwrap(), DvrValuation::Finite(2));
        assert_eq!(
            dvr_valuation(&TruncatedSeries::zero(r), 2, &one).unwrap(),
            DvrValuation::Infinite
        );
        // p^6 lies past the horizon min(6*2, 12)
        let deep = TruncatedSeries::monomial(r, 1, 11).shift(0);
        assert_eq!(dvr_valuation(&deep, 2, &one).unwrap(), DvrValuation::Finite(11));
        let lost = TruncatedSeries::constant(params(3, 1, 12), 0)
            .add(&TruncatedSeries::monomial(params(3, 1, 12), 1, 5))
            .unwrap();
        assert!(dvr_valuation(&lost, 2, &TruncatedSeries::one(params(3, 1, 12)))
            .unwrap_err()
            .is_precision());
    }

    #[test]
    fn dvr_valuation_rejects_non_unit() {
        let r = params(3, 4, 8);
        let u = TruncatedSeries::u(r);
        assert!(dvr_valuation(&u, 1, &u).is_err());
    }

    #[test]
    fn required_u_prec_examples() {
        assert_eq!(required_u_prec(2, 3, 1, 3).unwrap(), 10);
        assert_eq!(required_u_prec(1, 1, 0, 2).unwrap(), 2);
        assert_eq!(required_u_prec(6, 8, 3, 5).unwrap(), 1001);
        assert!(matches!(required_u_prec(1, 1, 80, 3), Err(Error::Overflow(_))));
    }

    #[test]
    fn inverse_of_unit() {
        let r = params(5, 3, 6);
        let x = TruncatedSeries::from_coeffs(r, &[2, 5, 1, 0, 3]);
        let y = x.inverse().unwrap();
        assert_eq!(x.mul(&y).unwrap(), TruncatedSeries::one(r));
        assert!(TruncatedSeries::constant(r, 5).inverse().is_err());
    }
}
