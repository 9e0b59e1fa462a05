//! Linear fractional maps `x ↦ (Ax + b) / (cx + d)`.

use num_traits::Zero;

use crate::error::{PflError, Result};
use crate::poly::linalg::{determinant, RatMatrix};
use crate::poly::{Polynomial, RatFunc, Rational};

/// Block split of an `n × n` matrix `[[A, b], [c, d]]` with `d ≠ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct MobiusMap {
    pub a: RatMatrix,
    pub b: Vec<Rational>,
    pub c: Vec<Rational>,
    pub d: Rational,
}

impl MobiusMap {
    pub fn new(m: &RatMatrix) -> Result<Self> {
        let n = m.len();
        if n < 2 || m.iter().any(|r| r.len() != n) {
            return Err(PflError::Shape(format!("expected a square matrix of size at least 2, got {n} rows")));
        }
        let k = n - 1;
        let d = m[k][k].clone();
        if d.is_zero() {
            return Err(PflError::Precondition("the corner entry d must be nonzero".into()));
        }
        Ok(MobiusMap {
            a: m[..k].iter().map(|r| r[..k].to_vec()).collect(),
            b: m[..k].iter().map(|r| r[k].clone()).collect(),
            c: m[k][..k].to_vec(),
            d,
        })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn matrix(&self) -> RatMatrix {
        let mut m: RatMatrix = self.a.iter().zip(&self.b).map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        }).collect();
        let mut last = self.c.clone();
        last.push(self.d.clone());
        m.push(last);
        m
    }

    /// Components of the map as rational functions of `dim` variables.
    pub fn components(&self) -> Vec<RatFunc> {
        let k = self.dim();
        let lin = |row: &[Rational], c0: &Rational| {
            let mut p = Polynomial::constant(k, c0.clone());
            for (i, a) in row.iter().enumerate() {
                if !a.is_zero() {
                    p = &p + &Polynomial::var(k, i).scale(a);
                }
            }
            p
        };
        let den = lin(&self.c, &self.d);
        (0..k).map(|i| RatFunc::new(lin(&self.a[i], &self.b[i]), den.clone()).expect("d is nonzero")).collect()
    }

    /// Jacobian at the origin, obtained by differentiating the components.
    pub fn jacobian_at_zero(&self) -> Result<RatMatrix> {
        let k = self.dim();
        let zero = vec![Rational::zero(); k];
        self.components()
            .iter()
            .map(|f| (0..k).map(|j| f.partial_derivative(j)?.evaluate(&zero)).collect())
            .collect()
    }

    /// `Ad − bc`.
    pub fn ad_minus_bc(&self) -> RatMatrix {
        let k = self.dim();
        (0..k).map(|i| (0..k).map(|j| &self.a[i][j] * &self.d - &self.b[i] * &self.c[j]).collect()).collect()
    }
}

/// The map `(Ax + b)/(cx + d)` is a local diffeomorphism at 0 exactly when `M` is invertible.
pub fn mobius_is_diffeo(m: &RatMatrix) -> Result<bool> {
    MobiusMap::new(m)?;
    Ok(!determinant(m).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational::rat;

    fn mat(v: &[&[i64]]) -> RatMatrix {
        v.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    #[test]
    fn identity_is_identity() {
        let m = mat(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert!(mobius_is_diffeo(&m).unwrap());
        let comps = MobiusMap::new(&m).unwrap().components();
        for (i, f) in comps.iter().enumerate() {
            assert_eq!(f.as_polynomial().unwrap(), Polynomial::var(2, i));
        }
    }

    #[test]
    fn equal_rows_singular() {
        assert!(!mobius_is_diffeo(&mat(&[&[1, 2, 3], &[1, 2, 3], &[0, 1, 4]])).unwrap());
    }

    #[test]
    fn zero_corner_rejected() {
        assert!(mobius_is_diffeo(&mat(&[&[1, 0], &[0, 0]])).is_err());
    }

    #[test]
    fn jacobian_matches_closed_form() {
        let mm = MobiusMap::new(&mat(&[&[2, -1, 3], &[4, 1, -2], &[5, 7, 3]])).unwrap();
        let j = mm.jacobian_at_zero().unwrap();
        let d2 = &mm.d * &mm.d;
        let adbc = mm.ad_minus_bc();
        for i in 0..2 {
            for k in 0..2 {
                assert_eq!(&j[i][k] * &d2, adbc[i][k]);
            }
        }
        assert_eq!(mm.matrix(), mat(&[&[2, -1, 3], &[4, 1, -2], &[5, 7, 3]]));
    }
}
