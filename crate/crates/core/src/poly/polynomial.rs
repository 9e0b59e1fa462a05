use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::rational::{format_rational, parse_rational, Rational};
use crate::error::{PflError, Result};

/// Sparse multivariate polynomial over the rationals in a fixed number of variables.
///
/// Terms are kept in a map keyed by graded-lex monomials; zero coefficients are never stored,
/// so structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, Rational::from_integer(BigInt::from(c)))
    }

    /// The coordinate function `x_{i+1}` (zero-based index `i`). Panics when out of range.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable {i} out of range for {nvars} variables");
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial::var(nvars, i), Rational::one());
        p
    }

    pub fn try_var(nvars: usize, i: usize) -> Result<Self> {
        if i >= nvars {
            return Err(PflError::VariableOutOfRange { index: i, dim: nvars });
        }
        Ok(Self::var(nvars, i))
    }

    pub fn monomial(c: Rational, exps: Vec<u32>) -> Self {
        let nvars = exps.len();
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::new(exps), c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: Vec<(Rational, Vec<u32>)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (c, e) in terms {
            if e.len() != nvars {
                return Err(PflError::ChartMismatch { expected: nvars, found: e.len() });
            }
            p.add_term(Monomial::new(e), c);
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; zero for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().next_back().map_or(0, |m| m.degree())
    }

    pub fn is_constant(&self) -> bool {
        self.total_degree() == 0
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_zero() {
            Some(Rational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&Monomial::one(self.nvars)).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms from the leading one down.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    fn check_same(&self, other: &Polynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(PflError::ChartMismatch { expected: self.nvars, found: other.nvars });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same(other)?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same(other)?;
        Ok(self * other)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Derivative with respect to the zero-based variable `i`.
    pub fn partial_derivative(&self, i: usize) -> Result<Polynomial> {
        if i >= self.nvars {
            return Err(PflError::VariableOutOfRange { index: i, dim: self.nvars });
        }
        Ok(self.deriv(i))
    }

    pub(crate) fn deriv(&self, i: usize) -> Polynomial {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            if let Some((e, low)) = m.lower(i) {
                out.add_term(low, c * Rational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    pub fn depends_on(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.exp(i) > 0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(i)).max().unwrap_or(0)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.nvars {
            return Err(PflError::PointDimension { expected: self.nvars, found: point.len() });
        }
        Ok(self.eval(point))
    }

    pub(crate) fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let x = &point[i];
                if x.is_zero() {
                    t = Rational::zero();
                    break;
                }
                t *= num_traits::pow(x.clone(), e as usize);
            }
            acc += t;
        }
        acc
    }

    /// Substitute `x_i -> images[i]`. The images all live in the same target ring.
    pub fn compose(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.nvars {
            return Err(PflError::ChartMismatch { expected: self.nvars, found: images.len() });
        }
        let target = match images.first() {
            Some(g) => g.nvars,
            None => 0,
        };
        if let Some(g) = images.iter().find(|g| g.nvars != target) {
            return Err(PflError::ChartMismatch { expected: target, found: g.nvars });
        }
        Ok(self.compose_unchecked(images, target))
    }

    pub(crate) fn compose_unchecked(&self, images: &[Polynomial], target: usize) -> Polynomial {
        let mut powers: Vec<Vec<Polynomial>> = vec![vec![Polynomial::one(target)]; self.nvars];
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
                if t.is_zero() {
                    break;
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Fix some variables to constants, keeping the variable count.
    pub fn substitute_values(&self, values: &[(usize, Rational)]) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut exps = m.exps().to_vec();
            let mut coef = c.clone();
            for (i, v) in values {
                let e = exps[*i];
                if e > 0 {
                    coef *= num_traits::pow(v.clone(), e as usize);
                    exps[*i] = 0;
                }
            }
            out.add_term(Monomial::new(exps), coef);
        }
        out
    }

    /// Re-embed in `nvars` variables. Growing appends unused variables; shrinking fails if a
    /// dropped variable occurs.
    pub fn with_nvars(&self, nvars: usize) -> Result<Polynomial> {
        if nvars < self.nvars {
            for i in nvars..self.nvars {
                if self.depends_on(i) {
                    return Err(PflError::ChartMismatch { expected: nvars, found: self.nvars });
                }
            }
        }
        Ok(Polynomial {
            nvars,
            terms: self.terms.iter().map(|(m, c)| (m.with_nvars(nvars), c.clone())).collect(),
        })
    }

    /// Rename variables: variable `i` becomes variable `perm[i]`.
    pub fn permute_vars(&self, perm: &[usize]) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut exps = vec![0; self.nvars];
            for (i, &e) in m.exps().iter().enumerate() {
                exps[perm[i]] = e;
            }
            out.add_term(Monomial::new(exps), c.clone());
        }
        out
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        if d.is_zero() || d.nvars != self.nvars {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        if d.terms.len() == 1 {
            let (dm, dc) = d.terms.iter().next().unwrap();
            let inv = dc.recip();
            let mut out = Polynomial::zero(self.nvars);
            for (m, c) in &self.terms {
                if !dm.divides(m) {
                    return None;
                }
                out.terms.insert(dm.quotient_of(m), c * &inv);
            }
            return Some(out);
        }
        let (dm, dc) = d.leading_term().unwrap();
        let (dm, dc) = (dm.clone(), dc.clone());
        if self.total_degree() < d.total_degree() {
            return None;
        }
        let mut r = self.clone();
        let mut q = Polynomial::zero(self.nvars);
        while let Some((rm, rc)) = r.leading_term() {
            if !dm.divides(rm) {
                return None;
            }
            let tm = dm.quotient_of(rm);
            let tc = rc / &dc;
            r = &r - &d.mul_monomial(&tm, &tc);
            q.add_term(tm, tc);
        }
        Some(q)
    }

    /// Rational content with the sign of the leading coefficient: `self = content * primitive`
    /// where `primitive` has coprime integer coefficients and a positive leading coefficient.
    pub fn content(&self) -> Rational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Rational::one();
        }
        let mut g = Rational::new(num, den);
        if self.leading_term().is_some_and(|(_, c)| c.is_negative()) {
            g = -g;
        }
        g
    }

    pub fn primitive(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.content().recip())
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(self.nvars),
            Some(first) => it.fold(first.clone(), |g, m| g.gcd(m)),
        }
    }

    /// Split by the total degree in the listed variables: returns `[(d, part)]`.
    pub fn split_degree_in(&self, vars: &[usize]) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let d: u32 = vars.iter().map(|&i| m.exp(i)).sum();
            out.entry(d).or_insert_with(|| Polynomial::zero(self.nvars)).add_term(m.clone(), c.clone());
        }
        out
    }

    /// Parse the text form, e.g. `3/2*x1^2*x3 - x2 + 5`.
    pub fn parse(s: &str, nvars: usize) -> Result<Polynomial> {
        parse_poly(s, nvars)
    }

    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let vars: Vec<String> = m
                .exps()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, e) })
                .collect();
            if vars.is_empty() {
                out.push_str(&format_rational(&a));
            } else {
                if !a.is_one() {
                    out.push_str(&format_rational(&a));
                    out.push('*');
                }
                out.push_str(&vars.join("*"));
            }
        }
        out
    }

    /// Cheap size heuristic used for pivot choice.
    pub(crate) fn weight(&self) -> (u32, usize) {
        (self.total_degree(), self.terms.len())
    }
}

fn parse_poly(s: &str, nvars: usize) -> Result<Polynomial> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(PflError::Parse("empty polynomial".into()));
    }
    let mut out = Polynomial::zero(nvars);
    let bytes = cleaned.as_bytes();
    let mut start = 0;
    let mut pieces = Vec::new();
    for i in 1..=bytes.len() {
        if i == bytes.len() || ((bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^') {
            pieces.push(&cleaned[start..i]);
            start = i;
        }
    }
    for piece in pieces {
        let (sign, body) = match piece.as_bytes()[0] {
            b'+' => (Rational::one(), &piece[1..]),
            b'-' => (-Rational::one(), &piece[1..]),
            _ => (Rational::one(), piece),
        };
        if body.is_empty() {
            return Err(PflError::Parse(format!("dangling sign in `{s}`")));
        }
        let mut coef = sign;
        let mut exps = vec![0u32; nvars];
        for factor in body.split('*') {
            if let Some(rest) = factor.strip_prefix('x') {
                let (idx, e) = match rest.split_once('^') {
                    Some((a, b)) => (a, b.parse::<u32>().map_err(|_| PflError::Parse(format!("bad exponent in `{factor}`")))?),
                    None => (rest, 1),
                };
                let idx: usize = idx.parse().map_err(|_| PflError::Parse(format!("bad variable `{factor}`")))?;
                if idx == 0 || idx > nvars {
                    return Err(PflError::VariableOutOfRange { index: idx, dim: nvars });
                }
                exps[idx - 1] += e;
            } else {
                coef *= parse_rational(factor)?;
            }
        }
        out.add_term(Monomial::new(exps), coef);
    }
    Ok(out)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.nvars, self.to_text())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "polynomial ring mismatch");
        let (mut out, other) = if self.terms.len() >= rhs.terms.len() { (self.clone(), rhs) } else { (rhs.clone(), self) };
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "polynomial ring mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "polynomial ring mismatch");
        let mut out = Polynomial::zero(self.nvars);
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let exps: Vec<u32> = ma.exps().iter().zip(mb.exps()).map(|(a, b)| a + b).collect();
                out.add_term(Monomial::from_parts(ma.degree() + mb.degree(), exps), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}
