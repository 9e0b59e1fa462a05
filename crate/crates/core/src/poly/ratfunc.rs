use std::fmt;

use num_traits::{One, Zero};

use super::polynomial::Polynomial;
use super::rational::Rational;
use crate::error::{PflError, Result};

/// Quotient of two polynomials. Only light normalization is attempted; equality is tested by
/// cross-multiplication.
#[derive(Clone)]
pub struct RatFunc {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl RatFunc {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(PflError::DivisionByZero);
        }
        if num.nvars() != den.nvars() {
            return Err(PflError::ChartMismatch { expected: num.nvars(), found: den.nvars() });
        }
        Ok(RatFunc { num, den }.normalized())
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let n = p.nvars();
        RatFunc { num: p, den: Polynomial::one(n) }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::from_poly(Polynomial::constant(nvars, c))
    }

    pub fn zero(nvars: usize) -> Self {
        Self::from_poly(Polynomial::zero(nvars))
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The polynomial value if the denominator is constant.
    pub fn as_polynomial(&self) -> Option<Polynomial> {
        self.den.as_constant().map(|c| self.num.scale(&c.recip()))
    }

    fn normalized(mut self) -> Self {
        let n = self.num.nvars();
        if self.num.is_zero() {
            return RatFunc::zero(n);
        }
        let c = self.den.content();
        if !c.is_one() {
            let inv = c.recip();
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
        if self.den.is_constant() {
            return self;
        }
        let g = self.num.monomial_content().gcd(&self.den.monomial_content());
        if !g.is_one() {
            let m = Polynomial::monomial(Rational::one(), g.exps().to_vec());
            self.num = self.num.div_exact(&m).expect("monomial content");
            self.den = self.den.div_exact(&m).expect("monomial content");
        }
        if let Some(q) = self.num.div_exact(&self.den) {
            return RatFunc::from_poly(q);
        }
        self
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if self.den == other.den {
            return RatFunc { num: &self.num + &other.num, den: self.den.clone() }.normalized();
        }
        if other.den.is_constant() {
            let k = other.den.as_constant().unwrap().recip();
            return RatFunc { num: &self.num + &(&other.num.scale(&k) * &self.den), den: self.den.clone() }.normalized();
        }
        if self.den.is_constant() {
            return other.add(self);
        }
        if let Some(q) = other.den.div_exact(&self.den) {
            return RatFunc { num: &(&self.num * &q) + &other.num, den: other.den.clone() }.normalized();
        }
        if let Some(q) = self.den.div_exact(&other.den) {
            return RatFunc { num: &self.num + &(&other.num * &q), den: self.den.clone() }.normalized();
        }
        RatFunc {
            num: &(&self.num * &other.den) + &(&other.num * &self.den),
            den: &self.den * &other.den,
        }
        .normalized()
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero(self.nvars());
        }
        let (mut a, mut bd) = (self.num.clone(), other.den.clone());
        if !bd.is_constant() {
            if let Some(q) = a.div_exact(&bd) {
                a = q;
                bd = Polynomial::one(a.nvars());
            }
        }
        let (mut b, mut ad) = (other.num.clone(), self.den.clone());
        if !ad.is_constant() {
            if let Some(q) = b.div_exact(&ad) {
                b = q;
                ad = Polynomial::one(b.nvars());
            }
        }
        RatFunc { num: &a * &b, den: &ad * &bd }.normalized()
    }

    pub fn mul_poly(&self, p: &Polynomial) -> RatFunc {
        self.mul(&RatFunc::from_poly(p.clone()))
    }

    pub fn scale(&self, c: &Rational) -> RatFunc {
        RatFunc { num: self.num.scale(c), den: self.den.clone() }.normalized()
    }

    pub fn recip(&self) -> Result<RatFunc> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn partial_derivative(&self, i: usize) -> Result<RatFunc> {
        if i >= self.nvars() {
            return Err(PflError::VariableOutOfRange { index: i, dim: self.nvars() });
        }
        Ok(self.deriv(i))
    }

    pub(crate) fn deriv(&self, i: usize) -> RatFunc {
        if self.den.is_constant() {
            return RatFunc { num: self.num.deriv(i), den: self.den.clone() };
        }
        let dn = self.num.deriv(i);
        let dd = self.den.deriv(i);
        if dd.is_zero() {
            return RatFunc { num: dn, den: self.den.clone() }.normalized();
        }
        RatFunc { num: &(&dn * &self.den) - &(&self.num * &dd), den: &self.den * &self.den }.normalized()
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        let d = self.den.evaluate(point)?;
        if d.is_zero() {
            return Err(PflError::PoleAtPoint);
        }
        Ok(self.num.evaluate(point)? / d)
    }

    pub fn equals(&self, other: &RatFunc) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        &self.num * &other.den == &other.num * &self.den
    }

    /// Re-embed in more variables.
    pub fn with_nvars(&self, nvars: usize) -> Result<RatFunc> {
        Ok(RatFunc { num: self.num.with_nvars(nvars)?, den: self.den.with_nvars(nvars)? })
    }

    pub fn permute_vars(&self, perm: &[usize]) -> RatFunc {
        RatFunc { num: self.num.permute_vars(perm), den: self.den.permute_vars(perm) }
    }
}

/// Substitute rational functions into a polynomial, sharing one denominator per variable.
pub fn compose_rational(p: &Polynomial, images: &[RatFunc]) -> Result<RatFunc> {
    if images.len() != p.nvars() {
        return Err(PflError::ChartMismatch { expected: p.nvars(), found: images.len() });
    }
    let target = images.first().map_or(0, |g| g.nvars());
    let n = p.nvars();
    let mut max_e = vec![0u32; n];
    for (m, _) in p.terms() {
        for (i, &e) in m.exps().iter().enumerate() {
            max_e[i] = max_e[i].max(e);
        }
    }
    let mut num_pows: Vec<Vec<Polynomial>> = vec![vec![Polynomial::one(target)]; n];
    let mut den_pows: Vec<Vec<Polynomial>> = vec![vec![Polynomial::one(target)]; n];
    for i in 0..n {
        for _ in 0..max_e[i] {
            let a = num_pows[i].last().unwrap() * &images[i].num;
            num_pows[i].push(a);
            let b = den_pows[i].last().unwrap() * &images[i].den;
            den_pows[i].push(b);
        }
    }
    let mut num = Polynomial::zero(target);
    for (m, c) in p.terms() {
        let mut t = Polynomial::constant(target, c.clone());
        for i in 0..n {
            let e = m.exp(i) as usize;
            let top = max_e[i] as usize;
            if e > 0 {
                t = &t * &num_pows[i][e];
            }
            if top > e {
                t = &t * &den_pows[i][top - e];
            }
        }
        num = &num + &t;
    }
    let mut den = Polynomial::one(target);
    for i in 0..n {
        if max_e[i] > 0 {
            den = &den * &den_pows[i][max_e[i] as usize];
        }
    }
    RatFunc::new(num, den)
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.as_polynomial() {
            write!(f, "{p}")
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}
