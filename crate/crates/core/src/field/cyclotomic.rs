use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::upoly::{int_divrem_monic, int_mul, rat_inverse_mod, trim};
use super::{FieldError, Rational};

/// Largest conductor with a cached arithmetic context.
pub const MAX_CONDUCTOR: u32 = 128;

/// Euler's totient.
pub fn euler_phi(m: u32) -> u32 {
    let mut n = m;
    let mut out = m;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

fn cyclo_memo(m: u32, memo: &mut HashMap<u32, Vec<BigInt>>) -> Vec<BigInt> {
    if let Some(p) = memo.get(&m) {
        return p.clone();
    }
    // x^m - 1
    let mut num = vec![BigInt::zero(); m as usize + 1];
    num[0] = BigInt::from(-1);
    num[m as usize] = BigInt::one();
    let mut den = vec![BigInt::one()];
    for d in 1..m {
        if m % d == 0 {
            let pd = cyclo_memo(d, memo);
            den = int_mul(&den, &pd);
        }
    }
    let (q, r) = int_divrem_monic(&num, &den);
    assert!(r.is_empty(), "x^{m} - 1 not divisible by lower cyclotomic factors");
    memo.insert(m, q.clone());
    q
}

/// The `m`-th cyclotomic polynomial, ascending integer coefficients.
///
/// # Panics
/// If `m == 0`.
pub fn cyclotomic_polynomial(m: u32) -> Vec<BigInt> {
    assert!(m >= 1, "conductor must be positive");
    cyclo_memo(m, &mut HashMap::new())
}

struct Ctx {
    phi: usize,
    modulus: Vec<Rational>,
    /// `reduce[k]` is `x^(phi + k)` reduced modulo `Φ_m`, for `k < phi - 1`.
    reduce: Vec<Vec<Rational>>,
}

impl Ctx {
    fn build(m: u32) -> Ctx {
        let poly = cyclotomic_polynomial(m);
        let phi = poly.len() - 1;
        let modulus: Vec<Rational> = poly.iter().map(|c| Rational::from(c.clone())).collect();
        let mut reduce = Vec::with_capacity(phi.saturating_sub(1));
        // x^phi = -(c_0 + ... + c_{phi-1} x^{phi-1})
        let mut cur: Vec<Rational> = modulus[..phi].iter().map(|c| -c).collect();
        for _ in 0..phi.saturating_sub(1) {
            reduce.push(cur.clone());
            let top = cur[phi - 1].clone();
            let mut next = vec![Rational::zero(); phi];
            for i in (1..phi).rev() {
                next[i] = cur[i - 1].clone();
            }
            if !top.is_zero() {
                for i in 0..phi {
                    next[i] -= &top * &modulus[i];
                }
            }
            cur = next;
        }
        Ctx {
            phi,
            modulus,
            reduce,
        }
    }
}

fn ctx(m: u32) -> &'static Ctx {
    static CTXS: OnceLock<Vec<OnceLock<Ctx>>> = OnceLock::new();
    assert!(
        (1..=MAX_CONDUCTOR).contains(&m),
        "unsupported conductor {m} (supported: 1..={MAX_CONDUCTOR})"
    );
    let all = CTXS.get_or_init(|| (0..=MAX_CONDUCTOR).map(|_| OnceLock::new()).collect());
    all[m as usize].get_or_init(|| Ctx::build(m))
}

/// An element of `Q(ζ_m)` in the power basis `1, ζ, …, ζ^(φ(m)-1)`.
#[derive(Clone, Debug)]
pub struct CycloNum {
    m: u32,
    coeffs: Vec<Rational>,
}

/// The primitive root `ζ_m`, i.e. the class of `x` in `Q[x]/Φ_m`.
pub fn zeta(m: u32) -> CycloNum {
    CycloNum::zeta_pow(m, 1)
}

impl CycloNum {
    fn check_conductor(m: u32) -> Result<(), FieldError> {
        if (1..=MAX_CONDUCTOR).contains(&m) {
            Ok(())
        } else {
            Err(FieldError::UnsupportedConductor(m))
        }
    }

    /// Builds an element from power-basis coefficients; longer inputs are
    /// reduced modulo `Φ_m`.
    pub fn from_coeffs(m: u32, coeffs: Vec<Rational>) -> Result<CycloNum, FieldError> {
        Self::check_conductor(m)?;
        Ok(Self::reduce_vec(m, coeffs))
    }

    fn reduce_vec(m: u32, mut coeffs: Vec<Rational>) -> CycloNum {
        let c = ctx(m);
        // Φ_m is monic, so plain long division gives the remainder.
        for i in (c.phi..coeffs.len()).rev() {
            let t = std::mem::take(&mut coeffs[i]);
            if t.is_zero() {
                continue;
            }
            for j in 0..c.phi {
                let d = &t * &c.modulus[j];
                coeffs[i - c.phi + j] -= d;
            }
        }
        coeffs.resize(c.phi, Rational::zero());
        CycloNum { m, coeffs }
    }

    /// A rational viewed in `Q(ζ_m)`.
    pub fn from_rational(q: Rational, m: u32) -> CycloNum {
        let phi = ctx(m).phi;
        let mut coeffs = vec![Rational::zero(); phi];
        coeffs[0] = q;
        CycloNum { m, coeffs }
    }

    pub fn from_int(n: i64) -> CycloNum {
        CycloNum::from_rational(Rational::from_integer(BigInt::from(n)), 1)
    }

    pub fn zero_in(m: u32) -> CycloNum {
        CycloNum::from_rational(Rational::zero(), m)
    }

    pub fn one_in(m: u32) -> CycloNum {
        CycloNum::from_rational(Rational::one(), m)
    }

    /// `ζ_m^k` for any integer `k`.
    pub fn zeta_pow(m: u32, k: i64) -> CycloNum {
        let e = k.rem_euclid(m as i64) as usize;
        let mut v = vec![Rational::zero(); e + 1];
        v[e] = Rational::one();
        CycloNum::reduce_vec(m, v)
    }

    pub fn conductor(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `Some(q)` when the value lies in `Q`.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    /// Conductor shared by two operands, allowing a rational value to move
    /// into the other operand's field.
    fn common(&self, other: &CycloNum) -> Result<u32, FieldError> {
        if self.m == other.m {
            return Ok(self.m);
        }
        match (self.is_rational(), other.is_rational()) {
            (true, true) => Ok(self.m.max(other.m)),
            (true, false) => Ok(other.m),
            (false, true) => Ok(self.m),
            (false, false) => Err(FieldError::ConductorMismatch(self.m, other.m)),
        }
    }

    fn lifted(&self, m: u32) -> std::borrow::Cow<'_, CycloNum> {
        if self.m == m {
            std::borrow::Cow::Borrowed(self)
        } else {
            std::borrow::Cow::Owned(CycloNum::from_rational(self.coeffs[0].clone(), m))
        }
    }

    pub fn checked_add(&self, other: &CycloNum) -> Result<CycloNum, FieldError> {
        let m = self.common(other)?;
        let (a, b) = (self.lifted(m), other.lifted(m));
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        Ok(CycloNum { m, coeffs })
    }

    pub fn checked_sub(&self, other: &CycloNum) -> Result<CycloNum, FieldError> {
        let m = self.common(other)?;
        let (a, b) = (self.lifted(m), other.lifted(m));
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
        Ok(CycloNum { m, coeffs })
    }

    pub fn checked_mul(&self, other: &CycloNum) -> Result<CycloNum, FieldError> {
        let m = self.common(other)?;
        if let Some(q) = other.as_rational() {
            return Ok(self.lifted(m).scale(q));
        }
        if let Some(q) = self.as_rational() {
            return Ok(other.lifted(m).scale(q));
        }
        let phi = self.coeffs.len();
        let mut prod = vec![Rational::zero(); 2 * phi - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        let c = ctx(m);
        let tail = prod.split_off(phi);
        for (k, t) in tail.into_iter().enumerate() {
            if t.is_zero() {
                continue;
            }
            for (a, r) in prod.iter_mut().zip(&c.reduce[k]) {
                *a += &t * r;
            }
        }
        Ok(CycloNum { m, coeffs: prod })
    }

    pub fn checked_div(&self, other: &CycloNum) -> Result<CycloNum, FieldError> {
        let inv = other.inv()?;
        self.checked_mul(&inv)
    }

    /// Multiplicative inverse via extended Euclid against `Φ_m`.
    pub fn inv(&self) -> Result<CycloNum, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(CycloNum::from_rational(q.recip(), self.m));
        }
        let c = ctx(self.m);
        let mut a = self.coeffs.clone();
        trim(&mut a);
        let inv = rat_inverse_mod(&a, &c.modulus).ok_or(FieldError::DivisionByZero)?;
        Ok(CycloNum::reduce_vec(self.m, inv))
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<CycloNum, FieldError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = CycloNum::one_in(self.m);
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            k >>= 1;
            if k > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, q: &Rational) -> CycloNum {
        CycloNum {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Image under `Q(ζ_m) → Q(ζ_n)`, `ζ_m ↦ ζ_n^(n/m)`.
    pub fn embed(&self, n: u32) -> Result<CycloNum, FieldError> {
        Self::check_conductor(n)?;
        if self.m == n {
            return Ok(self.clone());
        }
        if let Some(q) = self.as_rational() {
            return Ok(CycloNum::from_rational(q.clone(), n));
        }
        if n % self.m != 0 {
            return Err(FieldError::NotASubfield {
                from: self.m,
                to: n,
            });
        }
        let step = (n / self.m) as usize;
        let mut v = vec![Rational::zero(); step * (self.coeffs.len() - 1) + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * step] = c.clone();
        }
        Ok(CycloNum::reduce_vec(n, v))
    }

    /// Parses the textual form produced by `Display`, e.g. `1/2 + -3*z^2`,
    /// optionally wrapped in parentheses. `z` denotes `ζ_m`.
    pub fn parse(text: &str, m: u32) -> Result<CycloNum, FieldError> {
        Self::check_conductor(m)?;
        let bad = || FieldError::Parse(text.to_string());
        let mut s = text.trim();
        if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            s = inner.trim();
        }
        if s.is_empty() {
            return Err(bad());
        }
        let mut acc = CycloNum::zero_in(m);
        for term in s.split(" + ") {
            let term = term.trim();
            let (coef, power) = match term.find('z') {
                None => (term, 0i64),
                Some(pos) => {
                    let head = term[..pos].trim_end_matches('*').trim();
                    let tail = &term[pos + 1..];
                    let power = if tail.is_empty() {
                        1
                    } else {
                        tail.strip_prefix('^')
                            .and_then(|p| p.parse::<i64>().ok())
                            .ok_or_else(bad)?
                    };
                    let head = match head {
                        "" => "1",
                        "-" => "-1",
                        h => h,
                    };
                    (head, power)
                }
            };
            let q: Rational = coef.parse().map_err(|_| bad())?;
            acc = &acc + &CycloNum::zeta_pow(m, power).scale(&q);
        }
        Ok(acc)
    }
}

impl Zero for CycloNum {
    fn zero() -> Self {
        CycloNum::zero_in(1)
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl One for CycloNum {
    fn one() -> Self {
        CycloNum::one_in(1)
    }
}

impl PartialEq for CycloNum {
    fn eq(&self, other: &Self) -> bool {
        if self.m == other.m {
            return self.coeffs == other.coeffs;
        }
        match (self.as_rational(), other.as_rational()) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for CycloNum {}

impl From<Rational> for CycloNum {
    fn from(q: Rational) -> Self {
        CycloNum::from_rational(q, 1)
    }
}

impl From<i64> for CycloNum {
    fn from(n: i64) -> Self {
        CycloNum::from_int(n)
    }
}

impl Neg for CycloNum {
    type Output = CycloNum;
    fn neg(mut self) -> CycloNum {
        for c in self.coeffs.iter_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Neg for &CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        -(self.clone())
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&CycloNum> for &CycloNum {
            type Output = CycloNum;
            fn $method(self, rhs: &CycloNum) -> CycloNum {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<CycloNum> for CycloNum {
            type Output = CycloNum;
            fn $method(self, rhs: CycloNum) -> CycloNum {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&CycloNum> for CycloNum {
            type Output = CycloNum;
            fn $method(self, rhs: &CycloNum) -> CycloNum {
                (&self).$method(rhs)
            }
        }
        impl $tr<CycloNum> for &CycloNum {
            type Output = CycloNum;
            fn $method(self, rhs: CycloNum) -> CycloNum {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl AddAssign<&CycloNum> for CycloNum {
    fn add_assign(&mut self, rhs: &CycloNum) {
        if self.m == rhs.m {
            for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
                *a += b;
            }
        } else {
            *self = &*self + rhs;
        }
    }
}

impl AddAssign for CycloNum {
    fn add_assign(&mut self, rhs: CycloNum) {
        *self += &rhs;
    }
}

impl SubAssign<&CycloNum> for CycloNum {
    fn sub_assign(&mut self, rhs: &CycloNum) {
        if self.m == rhs.m {
            for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
                *a -= b;
            }
        } else {
            *self = &*self - rhs;
        }
    }
}

impl SubAssign for CycloNum {
    fn sub_assign(&mut self, rhs: CycloNum) {
        *self -= &rhs;
    }
}

impl MulAssign<&CycloNum> for CycloNum {
    fn mul_assign(&mut self, rhs: &CycloNum) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*z")?,
                _ => write!(f, "{c}*z^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl CycloNum {
    /// True when the value is a rational with negative sign; used by
    /// renderers that prefer `a - b` over `a + -b`.
    pub fn is_negative_rational(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_negative())
    }
}
