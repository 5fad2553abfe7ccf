use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::PoissonError;
use crate::field::CycloNum;

/// Exponent vector with its total degree cached. The derived order compares
/// the degree first and then the exponents lexicographically, which is the
/// graded-lex order with `x1 > x2 > …`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    deg: u32,
    exps: Box<[u16]>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial {
            deg: 0,
            exps: vec![0; nvars].into_boxed_slice(),
        }
    }

    pub fn var(nvars: usize, i: usize) -> Monomial {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Monomial {
            deg: 1,
            exps: exps.into_boxed_slice(),
        }
    }

    pub fn from_exps(exps: Vec<u16>) -> Monomial {
        let deg = exps.iter().map(|&e| e as u32).sum();
        Monomial {
            deg,
            exps: exps.into_boxed_slice(),
        }
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let exps: Box<[u16]> = self
            .exps
            .iter()
            .zip(other.exps.iter())
            .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
            .collect();
        Monomial {
            deg: self.deg + other.deg,
            exps,
        }
    }

    /// `self · x_i`.
    pub fn times_var(&self, i: usize) -> Monomial {
        let mut exps = self.exps.clone();
        exps[i] += 1;
        Monomial {
            deg: self.deg + 1,
            exps,
        }
    }

    /// `self / x_i` together with the exponent of `x_i`, if it is positive.
    pub fn div_var(&self, i: usize) -> Option<(u16, Monomial)> {
        let e = self.exps[i];
        if e == 0 {
            return None;
        }
        let mut exps = self.exps.clone();
        exps[i] -= 1;
        Some((
            e,
            Monomial {
                deg: self.deg - 1,
                exps,
            },
        ))
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        let exps: Box<[u16]> = other
            .exps
            .iter()
            .zip(self.exps.iter())
            .map(|(a, b)| a - b)
            .collect();
        Monomial {
            deg: other.deg - self.deg,
            exps,
        }
    }

    /// `Σ w_i e_i`.
    pub fn weight(&self, weights: &[i64]) -> i64 {
        self.exps
            .iter()
            .zip(weights)
            .map(|(&e, &w)| e as i64 * w)
            .sum()
    }
}

/// Sparse polynomial in `nvars` variables over `Q(ζ_m)`; no stored
/// coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, CycloNum>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> MultiPoly {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: CycloNum) -> MultiPoly {
        let mut p = MultiPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> MultiPoly {
        MultiPoly::constant(nvars, CycloNum::one())
    }

    /// The coordinate function `x_i` (0-based index).
    pub fn var(nvars: usize, i: usize) -> MultiPoly {
        let mut p = MultiPoly::zero(nvars);
        p.terms.insert(Monomial::var(nvars, i), CycloNum::one());
        p
    }

    /// `Σ c_k x_k`.
    pub fn linear(nvars: usize, coeffs: &[CycloNum]) -> MultiPoly {
        MultiPoly::from_terms(
            nvars,
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| (Monomial::var(nvars, k), c.clone())),
        )
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, CycloNum)>) -> MultiPoly {
        let mut acc: HashMap<Monomial, CycloNum> = HashMap::new();
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial arity mismatch");
            if c.is_zero() {
                continue;
            }
            match acc.get_mut(&m) {
                Some(v) => *v += &c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
        MultiPoly::from_map(nvars, acc)
    }

    pub(crate) fn from_map(nvars: usize, acc: HashMap<Monomial, CycloNum>) -> MultiPoly {
        MultiPoly {
            nvars,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &CycloNum)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.deg == 0)
    }

    /// The constant term.
    pub fn constant_term(&self) -> CycloNum {
        self.terms
            .get(&Monomial::one(self.nvars))
            .cloned()
            .unwrap_or_else(CycloNum::zero)
    }

    pub fn coeff(&self, m: &Monomial) -> CycloNum {
        self.terms.get(m).cloned().unwrap_or_else(CycloNum::zero)
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.deg)
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &CycloNum)> {
        self.terms.iter().next_back()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.deg);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn degree_in(&self, var: usize) -> Option<u16> {
        self.terms.keys().map(|m| m.exps[var]).max()
    }

    pub fn scale(&self, c: &CycloNum) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, mono: &Monomial, c: &CycloNum) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.mul(mono), v * c))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    pub fn add_assign_scaled(&mut self, other: &MultiPoly, c: &CycloNum) {
        assert_eq!(self.nvars, other.nvars, "arity mismatch");
        for (m, v) in &other.terms {
            let add = v * c;
            match self.terms.get_mut(m) {
                Some(x) => {
                    *x += &add;
                    if x.is_zero() {
                        self.terms.remove(m);
                    }
                }
                None => {
                    if !add.is_zero() {
                        self.terms.insert(m.clone(), add);
                    }
                }
            }
        }
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `∂F/∂x_i`.
    pub fn derivative(&self, i: usize) -> MultiPoly {
        let mut acc: HashMap<Monomial, CycloNum> = HashMap::new();
        for (m, c) in &self.terms {
            if let Some((e, q)) = m.div_var(i) {
                acc.insert(q, c * &CycloNum::from(e as i64));
            }
        }
        MultiPoly::from_map(self.nvars, acc)
    }

    pub fn eval(&self, point: &[CycloNum]) -> CycloNum {
        assert_eq!(point.len(), self.nvars, "point has wrong arity");
        let mut cache: HashMap<(usize, u16), CycloNum> = HashMap::new();
        let mut acc = CycloNum::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = cache
                    .entry((i, e))
                    .or_insert_with(|| point[i].pow(e as i64).expect("nonnegative power"));
                t = &t * &*p;
            }
            acc += &t;
        }
        acc
    }

    /// `F(images_1, …, images_n)`; all images share one arity.
    pub fn substitute(&self, images: &[MultiPoly]) -> MultiPoly {
        assert_eq!(images.len(), self.nvars, "one image per variable");
        let target = images.first().map_or(0, |p| p.nvars);
        let mut cache: HashMap<(usize, u16), MultiPoly> = HashMap::new();
        let mut acc: HashMap<Monomial, CycloNum> = HashMap::new();
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(target, c.clone());
            for (i, &e) in m.exps.iter().enumerate() {
                if e == 0 || t.is_zero() {
                    continue;
                }
                let p = cache
                    .entry((i, e))
                    .or_insert_with(|| images[i].pow(e as u32));
                t = &t * &*p;
            }
            for (mm, cc) in t.terms {
                match acc.get_mut(&mm) {
                    Some(v) => *v += &cc,
                    None => {
                        acc.insert(mm, cc);
                    }
                }
            }
        }
        MultiPoly::from_map(target, acc)
    }

    /// Substitution of linear forms, `x_i ↦ Σ_k map[i][k] y_k`.
    pub fn substitute_linear(&self, map: &[Vec<CycloNum>]) -> MultiPoly {
        let target = map.first().map_or(0, Vec::len);
        let images: Vec<MultiPoly> = map.iter().map(|row| MultiPoly::linear(target, row)).collect();
        self.substitute(&images)
    }

    /// Re-embeds into `nvars` variables, sending `x_i` to `x_{offset + i}`.
    pub fn shift_vars(&self, nvars: usize, offset: usize) -> MultiPoly {
        assert!(offset + self.nvars <= nvars);
        MultiPoly {
            nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut exps = vec![0u16; nvars];
                    exps[offset..offset + self.nvars].copy_from_slice(&m.exps);
                    (Monomial::from_exps(exps), c.clone())
                })
                .collect(),
        }
    }

    /// Applies `f` to every coefficient, dropping zeros.
    pub fn map_coeffs(&self, mut f: impl FnMut(&CycloNum) -> CycloNum) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Splits by `Σ w_i e_i`, keyed by weight.
    pub fn weight_components(&self, weights: &[i64]) -> BTreeMap<i64, MultiPoly> {
        assert_eq!(weights.len(), self.nvars);
        let mut out: BTreeMap<i64, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.weight(weights))
                .or_insert_with(|| MultiPoly::zero(self.nvars))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// Splits into homogeneous pieces keyed by total degree.
    pub fn homogeneous_components(&self) -> BTreeMap<u32, MultiPoly> {
        self.weight_components(&vec![1; self.nvars])
            .into_iter()
            .map(|(k, p)| (k as u32, p))
            .collect()
    }

    /// Largest conductor among the coefficients.
    pub fn conductor(&self) -> u32 {
        self.terms
            .values()
            .map(|c| if c.is_rational() { 1 } else { c.conductor() })
            .max()
            .unwrap_or(1)
    }

    /// Coefficient vector with respect to an ordered list of monomials;
    /// `None` if the polynomial has a term outside the list.
    pub fn coeff_vector(&self, monomials: &[Monomial]) -> Option<Vec<CycloNum>> {
        let index: HashMap<&Monomial, usize> =
            monomials.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut v = vec![CycloNum::zero(); monomials.len()];
        for (m, c) in &self.terms {
            v[*index.get(m)?] = c.clone();
        }
        Some(v)
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> MultiPoly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
        }
    }
}

/// Sorted union of the monomial supports.
pub fn monomial_support<'a>(polys: impl IntoIterator<Item = &'a MultiPoly>) -> Vec<Monomial> {
    let mut all: std::collections::BTreeSet<Monomial> = std::collections::BTreeSet::new();
    for p in polys {
        all.extend(p.terms.keys().cloned());
    }
    all.into_iter().collect()
}

impl Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &CycloNum::one());
        out
    }
}

impl Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &CycloNum::from(-1));
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&CycloNum::from(-1))
    }
}

impl Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "arity mismatch");
        let mut acc: HashMap<Monomial, CycloNum> =
            HashMap::with_capacity(self.terms.len() * rhs.terms.len());
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                let m = a.mul(b);
                let v = x * y;
                match acc.get_mut(&m) {
                    Some(e) => *e += &v,
                    None => {
                        acc.insert(m, v);
                    }
                }
            }
        }
        MultiPoly::from_map(self.nvars, acc)
    }
}

macro_rules! owned_ops {
    ($tr:ident, $method:ident) => {
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$method(rhs)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -(&self)
    }
}

impl fmt::Display for MultiPoly {
    /// Canonical text: terms in descending graded-lex order, each rendered as
    /// `(coeff) * x1^a x3`, joined by ` + `; zero prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            let mut first = true;
            for (i, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                f.write_str(if first { " * " } else { " " })?;
                first = false;
                if e == 1 {
                    write!(f, "x{}", i + 1)?;
                } else {
                    write!(f, "x{}^{e}", i + 1)?;
                }
            }
        }
        Ok(())
    }
}

impl MultiPoly {
    /// Inverse of `Display`.
    pub fn parse(text: &str, nvars: usize, conductor: u32) -> Result<MultiPoly, PoissonError> {
        let text = text.trim();
        let bad = |why: &str| PoissonError::Parse(format!("{why} in `{text}`"));
        if text == "0" {
            return Ok(MultiPoly::zero(nvars));
        }
        let mut terms = Vec::new();
        let mut rest = text;
        loop {
            rest = rest.trim_start();
            if !rest.starts_with('(') {
                return Err(bad("expected `(`"));
            }
            let close = rest.find(')').ok_or_else(|| bad("unbalanced parenthesis"))?;
            let coeff = CycloNum::parse(&rest[1..close], conductor)
                .map_err(|e| PoissonError::Parse(e.to_string()))?;
            rest = &rest[close + 1..];
            let end = rest.find(" + (").unwrap_or(rest.len());
            let mono_text = rest[..end].trim();
            rest = &rest[end..];
            let mut exps = vec![0u16; nvars];
            if let Some(vars) = mono_text.strip_prefix('*') {
                for tok in vars.split_whitespace() {
                    let tok = tok.strip_prefix('x').ok_or_else(|| bad("expected variable"))?;
                    let (idx, e) = match tok.split_once('^') {
                        Some((i, e)) => (i, e.parse::<u16>().map_err(|_| bad("bad exponent"))?),
                        None => (tok, 1),
                    };
                    let idx: usize = idx.parse().map_err(|_| bad("bad variable index"))?;
                    if idx == 0 || idx > nvars {
                        return Err(bad("variable index out of range"));
                    }
                    exps[idx - 1] += e;
                }
            } else if !mono_text.is_empty() {
                return Err(bad("unexpected text after coefficient"));
            }
            terms.push((Monomial::from_exps(exps), coeff));
            match rest.strip_prefix(" + ") {
                Some(r) => rest = r,
                None if rest.trim().is_empty() => break,
                None => return Err(bad("expected ` + `")),
            }
        }
        Ok(MultiPoly::from_terms(nvars, terms))
    }
}
