use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::linalg::{self, RatMatrix};
use super::polynomial::Polynomial;
use super::rational::{rat, Rational};
use crate::error::{PflError, Result};

const GUIDE_SEED: u64 = 0x005e_ed0f_f1a6;

/// Deterministic pseudo-random point used to steer pivot choices. It never decides a zero test.
pub fn guide_point(nvars: usize) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(GUIDE_SEED ^ nvars as u64);
    (0..nvars)
        .map(|_| {
            let v: i64 = rng.gen_range(2..=61);
            if rng.gen_bool(0.5) {
                rat(v)
            } else {
                rat(-v)
            }
        })
        .collect()
}

/// Dense matrix of polynomials in a common ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    nvars: usize,
    cols: usize,
    rows: Vec<Vec<Polynomial>>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        PolyMatrix { nvars, cols, rows: vec![vec![Polynomial::zero(nvars); cols]; rows] }
    }

    pub fn from_rows(nvars: usize, rows: Vec<Vec<Polynomial>>) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        for r in &rows {
            if r.len() != cols {
                return Err(PflError::Shape("ragged matrix rows".into()));
            }
            if let Some(p) = r.iter().find(|p| p.nvars() != nvars) {
                return Err(PflError::ChartMismatch { expected: nvars, found: p.nvars() });
            }
        }
        Ok(PolyMatrix { nvars, cols, rows })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(nvars: usize, height: usize, columns: &[&[Polynomial]]) -> Result<Self> {
        let mut m = Self::zeros(height, columns.len(), nvars);
        for (j, col) in columns.iter().enumerate() {
            if col.len() != height {
                return Err(PflError::Shape("column length mismatch".into()));
            }
            for (i, p) in col.iter().enumerate() {
                if p.nvars() != nvars {
                    return Err(PflError::ChartMismatch { expected: nvars, found: p.nvars() });
                }
                m.rows[i][j] = p.clone();
            }
        }
        Ok(m)
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        self.rows[i][j] = p;
    }

    pub fn row(&self, i: usize) -> &[Polynomial] {
        &self.rows[i]
    }

    pub fn push_row(&mut self, row: Vec<Polynomial>) {
        assert_eq!(row.len(), self.cols);
        self.rows.push(row);
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut t = Self::zeros(self.cols, self.nrows(), self.nvars);
        for (i, r) in self.rows.iter().enumerate() {
            for (j, p) in r.iter().enumerate() {
                t.rows[j][i] = p.clone();
            }
        }
        t
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<RatMatrix> {
        if point.len() != self.nvars {
            return Err(PflError::PointDimension { expected: self.nvars, found: point.len() });
        }
        Ok(self.rows.iter().map(|r| r.iter().map(|p| p.eval(point)).collect()).collect())
    }

    pub fn rank_at_point(&self, point: &[Rational]) -> Result<usize> {
        Ok(linalg::rank(&self.evaluate(point)?))
    }

    /// Rank over the field of rational functions.
    pub fn generic_rank(&self) -> usize {
        if self.rows.is_empty() || self.cols == 0 {
            return 0;
        }
        let guide = guide_point(self.nvars);
        let at_guide = linalg::rank(&self.evaluate(&guide).expect("guide has chart dimension"));
        if at_guide == self.nrows().min(self.cols) {
            return at_guide;
        }
        eliminate(self.clone(), &EliminationOptions { guide: Some(guide), jordan: false, pivot_cols: None }).pivots.len()
    }

    /// Whether every minor of the given order is the zero polynomial.
    pub fn minors_vanish_identically(&self, order: usize) -> Result<bool> {
        if order == 0 || order > self.nrows().min(self.cols) {
            return Err(PflError::Shape(format!(
                "minor order {order} outside 1..={}",
                self.nrows().min(self.cols)
            )));
        }
        Ok(self.generic_rank() < order)
    }

    /// Fraction-free Gauss-Jordan elimination steered by `guide` (or the pseudo-random point).
    pub fn echelon(&self, guide: Option<&[Rational]>, pivot_cols: Option<&[bool]>) -> Echelon {
        let guide = guide.map(|g| g.to_vec()).unwrap_or_else(|| guide_point(self.nvars));
        eliminate(
            self.clone(),
            &EliminationOptions { guide: Some(guide), jordan: true, pivot_cols: pivot_cols.map(|c| c.to_vec()) },
        )
    }

    /// Generators of the right kernel over the polynomial ring, valid where `locus` is nonzero.
    pub fn kernel(&self, guide: Option<&[Rational]>) -> Kernel {
        let ech = self.echelon(guide, None);
        ech.kernel()
    }

    pub fn determinant(&self) -> Result<Polynomial> {
        if self.nrows() != self.cols {
            return Err(PflError::Shape("determinant of a non-square matrix".into()));
        }
        if self.cols == 0 {
            return Ok(Polynomial::one(self.nvars));
        }
        let ech = eliminate(self.clone(), &EliminationOptions { guide: None, jordan: false, pivot_cols: None });
        if ech.pivots.len() < self.cols {
            return Ok(Polynomial::zero(self.nvars));
        }
        let rows: Vec<usize> = ech.pivots.iter().map(|p| p.0).collect();
        let cols: Vec<usize> = ech.pivots.iter().map(|p| p.1).collect();
        let sign = permutation_sign(&rows) * permutation_sign(&cols);
        let d = ech.determinant;
        Ok(if sign < 0 { -&d } else { d })
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.nrows());
        let mut out = Self::zeros(self.nrows(), other.cols, self.nvars);
        for i in 0..self.nrows() {
            for j in 0..other.cols {
                let mut s = Polynomial::zero(self.nvars);
                for k in 0..self.cols {
                    if !self.rows[i][k].is_zero() && !other.rows[k][j].is_zero() {
                        s = &s + &(&self.rows[i][k] * &other.rows[k][j]);
                    }
                }
                out.rows[i][j] = s;
            }
        }
        out
    }
}

fn permutation_sign(p: &[usize]) -> i32 {
    let mut sign = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

#[derive(Clone, Debug)]
pub(crate) struct EliminationOptions {
    pub guide: Option<Vec<Rational>>,
    pub jordan: bool,
    pub pivot_cols: Option<Vec<bool>>,
}

/// Result of fraction-free elimination.
///
/// After Gauss-Jordan mode every pivot entry equals `determinant`, the last pivot value, and
/// all other entries of pivot columns are zero.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub matrix: PolyMatrix,
    /// `(row, column)` in the order chosen.
    pub pivots: Vec<(usize, usize)>,
    pub pivot_values: Vec<Polynomial>,
    pub determinant: Polynomial,
}

/// Kernel generators together with the locus where they are valid.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub vectors: Vec<Vec<Polynomial>>,
    /// The generators span the kernel wherever this is nonzero.
    pub locus: Polynomial,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_row_of_col(&self, col: usize) -> Option<usize> {
        self.pivots.iter().find(|p| p.1 == col).map(|p| p.0)
    }

    pub fn kernel(&self) -> Kernel {
        let nvars = self.matrix.nvars;
        let cols = self.matrix.cols;
        let d = self.determinant.clone();
        let mut vectors = Vec::new();
        for f in 0..cols {
            if self.pivot_row_of_col(f).is_some() {
                continue;
            }
            let mut v = vec![Polynomial::zero(nvars); cols];
            v[f] = d.clone();
            for &(r, c) in &self.pivots {
                v[c] = -self.matrix.get(r, f);
            }
            vectors.push(simplify_vector(v, &self.pivot_values));
        }
        Kernel { vectors, locus: d }
    }
}

/// Strip common factors from a polynomial vector: known pivot values, rational content and
/// monomial content. The sign is fixed by the first nonzero entry.
pub fn simplify_vector(mut v: Vec<Polynomial>, hints: &[Polynomial]) -> Vec<Polynomial> {
    if v.iter().all(|p| p.is_zero()) {
        return v;
    }
    let mut tried: Vec<&Polynomial> = Vec::new();
    for h in hints.iter().rev() {
        if h.is_constant() || tried.contains(&h) {
            continue;
        }
        tried.push(h);
        loop {
            let q: Option<Vec<Polynomial>> = v.iter().map(|p| p.div_exact(h)).collect();
            match q {
                Some(q) => v = q,
                None => break,
            }
        }
    }
    let mut mono = None;
    for p in v.iter().filter(|p| !p.is_zero()) {
        let m = p.monomial_content();
        mono = Some(match mono {
            None => m,
            Some(g) => super::monomial::Monomial::gcd(&g, &m),
        });
    }
    if let Some(m) = mono {
        if !m.is_one() {
            let d = Polynomial::monomial(num_traits::One::one(), m.exps().to_vec());
            v = v.iter().map(|p| p.div_exact(&d).expect("monomial content divides")).collect();
        }
    }
    let mut num = num_bigint::BigInt::zero();
    let mut den = num_bigint::BigInt::from(1);
    for p in &v {
        for (_, c) in p.terms() {
            num = num_integer::Integer::gcd(&num, c.numer());
            den = num_integer::Integer::lcm(&den, c.denom());
        }
    }
    let mut scale = Rational::new(den, num);
    let first = v.iter().find(|p| !p.is_zero()).unwrap();
    if first.leading_term().is_some_and(|(_, c)| num_traits::Signed::is_negative(c)) {
        scale = -scale;
    }
    v.iter().map(|p| p.scale(&scale)).collect()
}

fn pivot_key(p: &Polynomial, guide: Option<&[Rational]>, r: usize, c: usize) -> (bool, u32, usize, usize, usize) {
    let off_guide = match guide {
        Some(g) => p.eval(g).is_zero(),
        None => false,
    };
    let (deg, nt) = p.weight();
    (off_guide, deg, nt, r, c)
}

pub(crate) fn eliminate(mut m: PolyMatrix, opts: &EliminationOptions) -> Echelon {
    let nrows = m.nrows();
    let ncols = m.cols;
    let nvars = m.nvars;
    let guide = opts.guide.as_deref();
    let mut prev = Polynomial::one(nvars);
    let mut row_used = vec![false; nrows];
    let mut col_used = vec![false; ncols];
    let mut pivots = Vec::new();
    let mut pivot_values = Vec::new();
    loop {
        let mut best: Option<((bool, u32, usize, usize, usize), usize, usize)> = None;
        for r in (0..nrows).filter(|&r| !row_used[r]) {
            for c in 0..ncols {
                if col_used[c] || m.rows[r][c].is_zero() {
                    continue;
                }
                if let Some(pc) = &opts.pivot_cols {
                    if !pc[c] {
                        continue;
                    }
                }
                let key = pivot_key(&m.rows[r][c], guide, r, c);
                if best.as_ref().is_none_or(|b| key < b.0) {
                    best = Some((key, r, c));
                }
            }
        }
        let Some((_, pr, pc)) = best else { break };
        let p = m.rows[pr][pc].clone();
        let pivot_row = m.rows[pr].clone();
        let targets: Vec<usize> = (0..nrows).filter(|&r| r != pr && (opts.jordan || !row_used[r])).collect();
        let update = |row: &mut Vec<Polynomial>| {
            let factor = row[pc].clone();
            for c in 0..ncols {
                let a = &row[c];
                let b = &pivot_row[c];
                let zero_cross = factor.is_zero() || b.is_zero();
                if a.is_zero() && zero_cross {
                    continue;
                }
                let num = if zero_cross { &p * a } else if a.is_zero() { -&(&factor * b) } else { &(&p * a) - &(&factor * b) };
                row[c] = if prev.is_constant() {
                    let k = prev.as_constant().unwrap();
                    if k == num_traits::One::one() {
                        num
                    } else {
                        num.scale(&k.recip())
                    }
                } else {
                    num.div_exact(&prev).expect("fraction-free step divides exactly")
                };
            }
        };
        update_rows(&mut m.rows, &targets, update);
        row_used[pr] = true;
        col_used[pc] = true;
        pivots.push((pr, pc));
        pivot_values.push(p.clone());
        prev = p;
    }
    Echelon { matrix: m, pivots, pivot_values, determinant: prev }
}

#[cfg(feature = "parallel")]
fn update_rows<F>(rows: &mut [Vec<Polynomial>], targets: &[usize], f: F)
where
    F: Fn(&mut Vec<Polynomial>) + Sync,
{
    use rayon::prelude::*;
    rows.par_iter_mut().enumerate().filter(|(i, _)| targets.contains(i)).for_each(|(_, r)| f(r));
}

#[cfg(not(feature = "parallel"))]
fn update_rows<F>(rows: &mut [Vec<Polynomial>], targets: &[usize], f: F)
where
    F: Fn(&mut Vec<Polynomial>),
{
    for (i, r) in rows.iter_mut().enumerate() {
        if targets.contains(&i) {
            f(r);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(rows: &[&[&str]], nvars: usize) -> PolyMatrix {
        PolyMatrix::from_rows(
            nvars,
            rows.iter().map(|r| r.iter().map(|s| Polynomial::parse(s, nvars).unwrap()).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn generic_versus_pointwise_rank() {
        let m = pm(&[&["x1", "x2"], &["x2", "x1"]], 2);
        assert_eq!(m.generic_rank(), 2);
        assert_eq!(m.rank_at_point(&[rat(1), rat(1)]).unwrap(), 1);
        assert_eq!(m.rank_at_point(&[rat(0), rat(0)]).unwrap(), 0);
    }

    #[test]
    fn rank_deficient_symbolic() {
        let m = pm(&[&["x1", "x1*x2", "1"], &["x1^2", "x1^2*x2", "x1"], &["x2", "x2^2", "x3"]], 3);
        assert_eq!(m.generic_rank(), 2);
        assert!(m.minors_vanish_identically(3).unwrap());
        assert!(!m.minors_vanish_identically(2).unwrap());
        assert!(m.minors_vanish_identically(4).is_err());
    }

    #[test]
    fn determinant_matches_expansion() {
        let m = pm(&[&["x1", "1", "0"], &["x2", "x1", "1"], &["0", "x2", "x1"]], 2);
        let expected = Polynomial::parse("x1^3 - 2*x1*x2", 2).unwrap();
        assert_eq!(m.determinant().unwrap(), expected);
        let swapped = pm(&[&["1", "x1"], &["0", "x2"]], 2);
        assert_eq!(swapped.determinant().unwrap(), Polynomial::parse("x2", 2).unwrap());
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let m = pm(&[&["x1", "x2", "x1 + x2"], &["1", "x1", "1 + x1"]], 2);
        let k = m.kernel(None);
        assert_eq!(k.vectors.len(), 1);
        let v = &k.vectors[0];
        for r in 0..2 {
            let mut s = Polynomial::zero(2);
            for c in 0..3 {
                s = &s + &(m.get(r, c) * &v[c]);
            }
            assert!(s.is_zero());
        }
        assert_eq!(v[0], Polynomial::parse("1", 2).unwrap());
    }
}
