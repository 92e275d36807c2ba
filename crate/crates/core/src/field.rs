//! Exact arithmetic in cyclotomic fields.
//!
//! An element of `Q(zeta_N)` is stored in the power basis `1, X, ..., X^(phi(N)-1)`
//! of `Q[X]/(Phi_N)` with integer numerators over one positive common
//! denominator. The representation is kept fully reduced, so two elements of
//! the same conductor are equal exactly when their stored data are equal.
//! Elements of different conductors are lifted to the lcm before comparison
//! or arithmetic.
//!
//! Inversion uses relative norms along the prime-power decomposition of the
//! Galois group `(Z/N)^*`, which keeps the cost at a few dozen field
//! multiplications even for conductors in the thousands.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cached data for one conductor.
#[derive(Debug)]
struct Context {
    n: u32,
    phi: usize,
    /// Nonzero low-order coefficients of the monic `Phi_N` (leading 1 omitted).
    phi_terms: Vec<(usize, i64)>,
    /// Prime-power factors `q` of `N`, each with the units `u != 1` of
    /// `(Z/N)^*` satisfying `u = 1 (mod N/q)`.
    galois_blocks: Vec<Vec<u32>>,
}

fn context(n: u32) -> Arc<Context> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Context>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(ctx) = cache.lock().unwrap().get(&n) {
        return ctx.clone();
    }
    let ctx = Arc::new(Context::new(n));
    cache.lock().unwrap().entry(n).or_insert(ctx).clone()
}

impl Context {
    fn new(n: u32) -> Self {
        let poly = cyclotomic_polynomial(n);
        let phi = poly.len() - 1;
        let phi_terms = poly[..phi]
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(i, c)| (i, *c))
            .collect();
        let galois_blocks = prime_power_factors(n)
            .into_iter()
            .map(|q| {
                let rest = n / q;
                (1..q)
                    .filter(|r| r.gcd(&q) == 1)
                    .map(|r| {
                        // CRT: u = r mod q, u = 1 mod rest
                        (0..q)
                            .map(|t| 1 + rest * t)
                            .find(|u| u % q == r % q)
                            .expect("crt solution")
                            % n.max(1)
                    })
                    .filter(|u| *u != 1 % n.max(1))
                    .collect()
            })
            .collect();
        Context { n, phi, phi_terms, galois_blocks }
    }

    /// Reduce an arbitrary-length coefficient vector modulo `X^N - 1` and then `Phi_N`.
    fn reduce(&self, mut poly: Vec<BigInt>) -> Vec<BigInt> {
        let n = self.n as usize;
        if poly.len() > n {
            for k in n..poly.len() {
                if !poly[k].is_zero() {
                    let c = std::mem::take(&mut poly[k]);
                    poly[k % n] += c;
                }
            }
            poly.truncate(n);
        }
        let phi = self.phi;
        for k in (phi..poly.len()).rev() {
            if poly[k].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut poly[k]);
            let shift = k - phi;
            for &(j, p) in &self.phi_terms {
                poly[shift + j] -= &c * p;
            }
        }
        poly.resize(phi, BigInt::zero());
        poly
    }
}

/// Integer coefficients of the `n`-th cyclotomic polynomial, low degree first.
///
/// Computed as `prod_{d | n} (X^d - 1)^{mu(n/d)}`: the numerator factors are
/// multiplied out and the denominator factors removed by exact division.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    assert!(n >= 1, "conductor must be positive");
    let divisors: Vec<u32> = (1..=n).filter(|d| n % d == 0).collect();
    let mut poly: Vec<i128> = vec![1];
    for &d in &divisors {
        if mobius(n / d) == 1 {
            let d = d as usize;
            let mut next = vec![0i128; poly.len() + d];
            for (i, c) in poly.iter().enumerate() {
                next[i + d] += c;
                next[i] -= c;
            }
            poly = next;
        }
    }
    for &d in &divisors {
        if mobius(n / d) == -1 {
            let d = d as usize;
            let deg = poly.len() - 1;
            let mut q = vec![0i128; deg + 1 - d];
            for i in (d..=deg).rev() {
                let above = if i < q.len() { q[i] } else { 0 };
                q[i - d] = poly[i] + above;
            }
            // remainder check: low coefficients must match -q
            for i in 0..d {
                let above = if i < q.len() { q[i] } else { 0 };
                debug_assert_eq!(poly[i] + above, 0, "inexact division by X^{d} - 1");
            }
            poly = q;
        }
    }
    poly.into_iter()
        .map(|c| i64::try_from(c).expect("cyclotomic coefficient overflow"))
        .collect()
}

fn mobius(mut n: u32) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

fn prime_power_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut q = 1;
            while n % p == 0 {
                n /= p;
                q *= p;
            }
            out.push(q);
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Euler's totient.
pub fn totient(n: u32) -> usize {
    context(n).phi
}

/// An element of the cyclotomic field `Q(zeta_N)`.
#[derive(Clone)]
pub struct CycNum {
    conductor: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycNum {
    fn from_parts(conductor: u32, num: Vec<BigInt>, den: BigInt) -> Self {
        let mut x = CycNum { conductor, num, den };
        x.normalize();
        x
    }

    fn normalize(&mut self) {
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_negative() {
            self.den = -std::mem::take(&mut self.den);
            for c in &mut self.num {
                *c = -std::mem::take(c);
            }
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if !g.is_one() {
            self.den /= &g;
            for c in &mut self.num {
                *c /= &g;
            }
        }
    }

    pub fn zero(conductor: u32) -> Self {
        let phi = totient(conductor);
        CycNum { conductor, num: vec![BigInt::zero(); phi], den: BigInt::one() }
    }

    pub fn one(conductor: u32) -> Self {
        Self::from_integer(conductor, 1)
    }

    pub fn from_integer(conductor: u32, k: i64) -> Self {
        Self::from_rational(conductor, &BigRational::from_integer(k.into()))
    }

    pub fn from_rational(conductor: u32, q: &BigRational) -> Self {
        let mut num = vec![BigInt::zero(); totient(conductor)];
        num[0] = q.numer().clone();
        Self::from_parts(conductor, num, q.denom().clone())
    }

    /// `zeta_N^power` with `zeta_N = exp(2 pi i / N)`.
    pub fn root_of_unity(conductor: u32, power: i64) -> Self {
        assert!(conductor >= 1, "conductor must be positive");
        let ctx = context(conductor);
        let e = power.rem_euclid(conductor as i64) as usize;
        let mut poly = vec![BigInt::zero(); e + 1];
        poly[e] = BigInt::one();
        CycNum { conductor, num: ctx.reduce(poly), den: BigInt::one() }
    }

    /// Build from power-basis coordinates (length at most `phi(N)`).
    pub fn from_coeffs(conductor: u32, coeffs: &[BigRational]) -> Result<Self> {
        let phi = totient(conductor);
        if coeffs.len() > phi {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a field of degree {phi}",
                coeffs.len()
            )));
        }
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut num: Vec<BigInt> = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        num.resize(phi, BigInt::zero());
        Ok(Self::from_parts(conductor, num, den))
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// Power-basis coordinates.
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num.iter().map(|c| BigRational::new(c.clone(), self.den.clone())).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }

    /// Number of nonzero power-basis coordinates.
    pub fn support(&self) -> usize {
        self.num.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(Zero::is_zero) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().filter(|q| q.is_integer()).map(|q| q.to_integer())
    }

    /// Re-express in `Q(zeta_M)` for a multiple `M` of the conductor.
    pub fn lift(&self, target: u32) -> Self {
        assert!(
            target % self.conductor == 0,
            "cannot lift conductor {} to {target}",
            self.conductor
        );
        if target == self.conductor {
            return self.clone();
        }
        let step = (target / self.conductor) as usize;
        let ctx = context(target);
        let mut poly = vec![BigInt::zero(); self.num.len() * step + 1];
        for (j, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                poly[j * step] = c.clone();
            }
        }
        CycNum { conductor: target, num: ctx.reduce(poly), den: self.den.clone() }
    }

    fn aligned<'a>(&'a self, other: &'a CycNum) -> (std::borrow::Cow<'a, CycNum>, std::borrow::Cow<'a, CycNum>) {
        use std::borrow::Cow;
        if self.conductor == other.conductor {
            (Cow::Borrowed(self), Cow::Borrowed(other))
        } else {
            let m = self.conductor.lcm(&other.conductor);
            (Cow::Owned(self.lift(m)), Cow::Owned(other.lift(m)))
        }
    }

    /// Apply the automorphism `zeta_N -> zeta_N^u` (`u` coprime to `N`).
    pub fn galois(&self, u: u32) -> Self {
        let n = self.conductor as usize;
        let ctx = context(self.conductor);
        let mut poly = vec![BigInt::zero(); n.max(1)];
        for (j, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                poly[(j * u as usize) % n.max(1)] += c;
            }
        }
        CycNum { conductor: self.conductor, num: ctx.reduce(poly), den: self.den.clone() }
    }

    /// The involution inverting every root of unity; complex conjugation under
    /// the standard embedding.
    pub fn involution(&self) -> Self {
        if self.conductor <= 2 {
            return self.clone();
        }
        self.galois(self.conductor - 1)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero { conductor: self.conductor });
        }
        if let Some(q) = self.as_rational() {
            return Ok(Self::from_rational(self.conductor, &q.recip()));
        }
        let ctx = context(self.conductor);
        let mut acc = CycNum::one(self.conductor);
        let mut x = self.clone();
        for block in &ctx.galois_blocks {
            if block.is_empty() {
                continue;
            }
            let mut y = x.galois(block[0]);
            for &u in &block[1..] {
                y = &y * &x.galois(u);
            }
            acc = &acc * &y;
            x = &x * &y;
        }
        let norm = x.as_rational().expect("full norm is rational");
        Ok(&acc * &CycNum::from_rational(self.conductor, &norm.recip()))
    }

    /// The exponent `k` in `0..N` with `self = zeta_N^k`, if `self` is an `N`-th root of unity.
    pub fn root_exponent(&self) -> Option<u32> {
        if !self.den.is_one() {
            return None;
        }
        let n = self.conductor;
        let z = self.to_complex();
        if (z.norm() - 1.0).abs() > 1e-6 {
            return None;
        }
        let k = (z.arg() / std::f64::consts::TAU * n as f64).round().rem_euclid(n as f64) as u32;
        (CycNum::root_of_unity(n, k as i64) == *self).then_some(k)
    }

    /// `1 / (1 - zeta_N^k)` from `sum_{j<m} j w^j = m / (w - 1)` for `w` of order `m`.
    pub fn inv_one_minus_root(conductor: u32, power: i64) -> Result<Self> {
        let e = power.rem_euclid(conductor as i64) as u32;
        if e == 0 {
            return Err(Error::DivisionByZero { conductor });
        }
        let order = conductor / conductor.gcd(&e);
        let ctx = context(conductor);
        let mut poly = vec![BigInt::zero(); conductor as usize];
        for j in 1..order {
            poly[(j as usize * e as usize) % conductor as usize] -= BigInt::from(j);
        }
        Ok(CycNum::from_parts(conductor, ctx.reduce(poly), BigInt::from(order)))
    }

    /// `1 / (x - y)`, using the closed form when both are roots of unity.
    pub fn inv_difference(x: &CycNum, y: &CycNum) -> Result<Self> {
        let (x, y) = x.aligned(y);
        if let (Some(kx), Some(ky)) = (x.root_exponent(), y.root_exponent()) {
            let n = x.conductor as i64;
            // 1/(x - y) = x^{-1} / (1 - y/x)
            let base = CycNum::inv_one_minus_root(x.conductor, ky as i64 - kx as i64)?;
            return Ok(&base * &CycNum::root_of_unity(x.conductor, n - kx as i64));
        }
        (&*x - &*y).inv()
    }

    pub fn div(&self, other: &CycNum) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, exp: i64) -> Result<Self> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut result = CycNum::one(self.conductor);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(result)
    }

    /// Evaluate under `zeta_N -> exp(2 pi i / N)`.
    pub fn to_complex(&self) -> num_complex::Complex64 {
        let n = self.conductor as f64;
        let den = self.den.to_f64().unwrap_or(f64::INFINITY);
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for (j, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                let angle = 2.0 * std::f64::consts::PI * j as f64 / n;
                let c = c.to_f64().unwrap_or(f64::NAN) / den;
                acc += num_complex::Complex64::from_polar(c, angle);
            }
        }
        acc
    }

    /// A byte key that identifies the value among elements of the same conductor.
    pub fn key(&self) -> Vec<u8> {
        let mut out = self.conductor.to_le_bytes().to_vec();
        let mut push = |b: &BigInt| {
            let bytes = b.to_signed_bytes_le();
            out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
            out.extend_from_slice(&bytes);
        };
        push(&self.den);
        for c in &self.num {
            push(c);
        }
        out
    }
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.den == b.den && a.num == b.num
    }
}

impl Eq for CycNum {}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum({self})")
    }
}

impl fmt::Display for CycNum {
    /// Human-readable form such as `(1/2) - (3)z^2` with `z = zeta_N`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z{}", self.conductor)?,
                _ => write!(f, "({c})z{}^{j}", self.conductor)?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn add(self, other: &CycNum) -> CycNum {
        let (a, b) = self.aligned(other);
        if a.den == b.den {
            let num = a.num.iter().zip(&b.num).map(|(x, y)| x + y).collect();
            return CycNum::from_parts(a.conductor, num, a.den.clone());
        }
        let num = a.num.iter().zip(&b.num).map(|(x, y)| x * &b.den + y * &a.den).collect();
        CycNum::from_parts(a.conductor, num, &a.den * &b.den)
    }
}

impl<'a> Sub<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn sub(self, other: &CycNum) -> CycNum {
        self + &(-other)
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            conductor: self.conductor,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl<'a> Mul<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn mul(self, other: &CycNum) -> CycNum {
        let (a, b) = self.aligned(other);
        let conductor = a.conductor;
        if a.is_zero() || b.is_zero() {
            return CycNum::zero(conductor);
        }
        if let Some(num) = mul_small(&a.num, &b.num, &context(conductor)) {
            return CycNum::from_parts(conductor, num, &a.den * &b.den);
        }
        let phi = a.num.len();
        let nz_a: Vec<(usize, &BigInt)> = a.num.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        let nz_b: Vec<(usize, &BigInt)> = b.num.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        let mut poly = vec![BigInt::zero(); 2 * phi - 1];
        for &(i, x) in &nz_a {
            for &(j, y) in &nz_b {
                poly[i + j] += x * y;
            }
        }
        let num = context(conductor).reduce(poly);
        CycNum::from_parts(conductor, num, &a.den * &b.den)
    }
}

/// Product of two reduced numerators through `i128` arithmetic, or `None` if
/// an input coefficient exceeds 40 bits or an intermediate value overflows.
fn mul_small(a: &[BigInt], b: &[BigInt], ctx: &Context) -> Option<Vec<BigInt>> {
    const LIMIT: i64 = 1 << 40;
    let small = |v: &[BigInt]| -> Option<Vec<(usize, i128)>> {
        let mut out = Vec::new();
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                let x = c.to_i64().filter(|x| x.abs() < LIMIT)?;
                out.push((i, x as i128));
            }
        }
        Some(out)
    };
    let (nz_a, nz_b) = (small(a)?, small(b)?);
    let n = ctx.n as usize;
    let len = (2 * ctx.phi - 1).min(n.max(1));
    let mut poly = vec![0i128; len];
    for &(i, x) in &nz_a {
        for &(j, y) in &nz_b {
            let k = (i + j) % len.max(n);
            poly[k] = poly[k].checked_add(x * y)?;
        }
    }
    let phi = ctx.phi;
    for k in (phi..poly.len()).rev() {
        let c = poly[k];
        if c == 0 {
            continue;
        }
        poly[k] = 0;
        let shift = k - phi;
        for &(j, p) in &ctx.phi_terms {
            poly[shift + j] = poly[shift + j].checked_sub(c.checked_mul(p as i128)?)?;
        }
    }
    poly.truncate(phi);
    poly.resize(phi, 0);
    Some(poly.into_iter().map(BigInt::from).collect())
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr<CycNum> for CycNum {
            type Output = CycNum;
            fn $m(self, other: CycNum) -> CycNum { (&self).$m(&other) }
        }
        impl<'a> $tr<&'a CycNum> for CycNum {
            type Output = CycNum;
            fn $m(self, other: &CycNum) -> CycNum { (&self).$m(other) }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

/// Parse a rational written as `p/q`, `p`, or a terminating decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let p = BigInt::from_str(&digits).map_err(|_| bad())?;
        let q = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(p, q));
    }
    BigInt::from_str(s).map(BigRational::from_integer).map_err(|_| bad())
}

/// Format a rational as `p/q` (the denominator is always written).
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

#[derive(Serialize, Deserialize)]
struct CycNumRepr {
    #[serde(rename = "N")]
    n: u32,
    coeffs: Vec<String>,
}

impl Serialize for CycNum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycNumRepr { n: self.conductor, coeffs: self.coeffs().iter().map(format_rational).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = CycNumRepr::deserialize(d)?;
        if repr.n == 0 {
            return Err(D::Error::custom("conductor must be positive"));
        }
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        CycNum::from_coeffs(repr.n, &coeffs).map_err(D::Error::custom)
    }
}

/// Rational exponents `(a, b, c_1, ..., c_n)` of the system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParameterSet {
    pub a: BigRational,
    pub b: BigRational,
    pub c: Vec<BigRational>,
}

impl ParameterSet {
    pub fn new(a: BigRational, b: BigRational, c: Vec<BigRational>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::InvalidParameter("at least one c_k is required".into()));
        }
        Ok(ParameterSet { a, b, c })
    }

    /// Parse from strings such as `"1/2"`, `"1/2"`, `["1", "1/3"]`.
    pub fn parse<S: AsRef<str>>(a: &str, b: &str, c: &[S]) -> Result<Self> {
        Self::new(
            parse_rational(a)?,
            parse_rational(b)?,
            c.iter().map(|s| parse_rational(s.as_ref())).collect::<Result<_>>()?,
        )
    }

    /// Parse a comma-separated list for `c`.
    pub fn parse_list(a: &str, b: &str, c: &str) -> Result<Self> {
        let parts: Vec<&str> = c.split(',').filter(|s| !s.trim().is_empty()).collect();
        Self::parse(a, b, &parts)
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    /// Least common multiple of all denominators.
    pub fn conductor(&self) -> u32 {
        std::iter::once(&self.a)
            .chain(std::iter::once(&self.b))
            .chain(&self.c)
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
            .to_u32()
            .expect("conductor exceeds u32")
    }

    pub fn c_sum(&self) -> BigRational {
        self.c.iter().fold(BigRational::zero(), |acc, c| acc + c)
    }
}

impl fmt::Display for ParameterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.c.iter().map(|x| x.to_string()).collect();
        write!(f, "a={}, b={}, c=({})", self.a, self.b, c.join(","))
    }
}

/// `exp(2 pi i q)` as an element of `Q(zeta_N)`; `N` must be a multiple of the denominator of `q`.
pub fn exp_2pi_i(q: &BigRational, conductor: u32) -> CycNum {
    let den = q.denom().to_u32().expect("denominator exceeds u32");
    assert!(conductor % den == 0, "conductor {conductor} not a multiple of {den}");
    let scale = BigInt::from(conductor / den);
    let power = (q.numer() * scale).mod_floor(&BigInt::from(conductor));
    CycNum::root_of_unity(conductor, power.to_i64().expect("small exponent"))
}

/// The roots of unity `alpha = e(a)`, `beta = e(b)`, `gamma_k = e(c_k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitRoots {
    pub alpha: CycNum,
    pub beta: CycNum,
    pub gamma: Vec<CycNum>,
    pub conductor: u32,
}

pub fn unit_roots(params: &ParameterSet) -> UnitRoots {
    let conductor = params.conductor();
    UnitRoots {
        alpha: exp_2pi_i(&params.a, conductor),
        beta: exp_2pi_i(&params.b, conductor),
        gamma: params.c.iter().map(|c| exp_2pi_i(c, conductor)).collect(),
        conductor,
    }
}

impl UnitRoots {
    /// `prod_k gamma_k^{i_k}` for a 0/1 word packed as a bit mask (bit k-1 = i_k).
    pub fn gamma_product(&self, mask: usize) -> CycNum {
        self.gamma
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .fold(CycNum::one(self.conductor), |acc, (_, g)| &acc * g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn cyclotomic_polynomials_small() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        // Phi_105 is the first with a coefficient of absolute value 2
        assert!(cyclotomic_polynomial(105).iter().any(|c| c.abs() == 2));
        assert_eq!(cyclotomic_polynomial(1155).len() - 1, 480);
    }

    #[test]
    fn root_constructor() {
        assert!(CycNum::root_of_unity(1, 0).is_one());
        assert_eq!(CycNum::root_of_unity(2, 1), CycNum::from_integer(2, -1));
        let z = CycNum::root_of_unity(12, 4);
        assert!(z.pow(3).unwrap().is_one());
        assert!(!z.is_one());
        assert_eq!(z, CycNum::root_of_unity(3, 1));
    }

    #[test]
    fn basic_identities() {
        let i = CycNum::root_of_unity(4, 1);
        assert_eq!(&i * &i, CycNum::from_integer(4, -1));
        let w = CycNum::root_of_unity(3, 1);
        let s = &(&CycNum::one(3) + &w) + &(&w * &w);
        assert!(s.is_zero());
        let one = CycNum::one(5);
        let x = &one - &CycNum::root_of_unity(5, 1);
        let y = x.inv().unwrap();
        assert!((&y * &x).is_one());
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(CycNum::zero(7).inv(), Err(Error::DivisionByZero { conductor: 7 }));
    }

    #[test]
    fn involution_examples() {
        let r = CycNum::from_rational(9, &q("7/3"));
        assert_eq!(r.involution(), r);
        assert_eq!(CycNum::root_of_unity(8, 1).involution(), CycNum::root_of_unity(8, 7));
    }

    #[test]
    fn mixed_conductors_lift() {
        let a = CycNum::root_of_unity(3, 1);
        let b = CycNum::root_of_unity(4, 1);
        let c = &a * &b;
        assert_eq!(c.conductor(), 12);
        assert_eq!(c, CycNum::root_of_unity(12, 7));
    }

    #[test]
    fn inverse_large_conductor() {
        let n = 1155;
        let x = &(&CycNum::root_of_unity(n, 385) - &CycNum::root_of_unity(n, 165))
            + &CycNum::from_rational(n, &q("1/3"));
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
    }

    #[test]
    fn unit_roots_examples() {
        let p = ParameterSet::parse("1/2", "1/2", &["1", "1"]).unwrap();
        let r = unit_roots(&p);
        assert_eq!(r.conductor, 2);
        assert_eq!(r.alpha, CycNum::from_integer(2, -1));
        assert_eq!(r.beta, CycNum::from_integer(2, -1));
        assert!(r.gamma.iter().all(CycNum::is_one));

        let p = ParameterSet::parse("0", "1/3", &["1/5"]).unwrap();
        assert!(unit_roots(&p).alpha.is_one());

        let p = ParameterSet::parse("1/3", "1/4", &["1/2"]).unwrap();
        let r = unit_roots(&p);
        assert_eq!(r.conductor, 12);
        assert!(r.alpha.pow(3).unwrap().is_one());
        assert!(r.beta.pow(4).unwrap().is_one());
        assert!(r.gamma[0].pow(2).unwrap().is_one());
        assert_eq!(r.alpha.involution(), r.alpha.inv().unwrap());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(q("3/6"), BigRational::new(1.into(), 2.into()));
        assert_eq!(q("-2"), BigRational::from_integer((-2).into()));
        assert_eq!(q("0.25"), BigRational::new(1.into(), 4.into()));
        assert_eq!(q("1/-3"), BigRational::new((-1).into(), 3.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(format_rational(&q("4")), "4/1");
    }

    #[test]
    fn json_round_trip() {
        let x = &CycNum::root_of_unity(7, 3) + &CycNum::from_rational(7, &q("-5/2"));
        let s = serde_json::to_string(&x).unwrap();
        assert!(s.starts_with("{\"N\":7,\"coeffs\":[\"-5/2\""));
        let y: CycNum = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }
}
