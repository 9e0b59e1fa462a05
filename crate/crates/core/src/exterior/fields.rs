use std::collections::BTreeMap;

use super::chart::{same_chart, ChartRef};
use crate::error::{PflError, Result};
use crate::poly::{Polynomial, Rational};

fn check_components(chart: &ChartRef, comps: &[Polynomial]) -> Result<()> {
    let n = chart.dim();
    if comps.len() != n {
        return Err(PflError::ChartMismatch { expected: n, found: comps.len() });
    }
    if let Some(p) = comps.iter().find(|p| p.nvars() != n) {
        return Err(PflError::ChartMismatch { expected: n, found: p.nvars() });
    }
    Ok(())
}

/// Polynomial vector field `Σ f^k ∂_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    chart: ChartRef,
    comps: Vec<Polynomial>,
}

impl VectorField {
    pub fn new(chart: ChartRef, comps: Vec<Polynomial>) -> Result<Self> {
        check_components(&chart, &comps)?;
        Ok(VectorField { chart, comps })
    }

    pub fn zero(chart: ChartRef) -> Self {
        let n = chart.dim();
        VectorField { chart, comps: vec![Polynomial::zero(n); n] }
    }

    /// `∂_i`.
    pub fn coordinate(chart: ChartRef, i: usize) -> Self {
        let n = chart.dim();
        let mut comps = vec![Polynomial::zero(n); n];
        comps[i] = Polynomial::one(n);
        VectorField { chart, comps }
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &Polynomial {
        &self.comps[i]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|p| p.is_zero())
    }

    /// Directional derivative `f(p) = Σ f^k ∂_k p`.
    pub fn apply(&self, p: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.dim());
        for (k, fk) in self.comps.iter().enumerate() {
            if fk.is_zero() || !p.depends_on(k) {
                continue;
            }
            out = &out + &(fk * &p.deriv(k));
        }
        out
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField { chart: self.chart.clone(), comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        VectorField { chart: self.chart.clone(), comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Rational) -> VectorField {
        VectorField { chart: self.chart.clone(), comps: self.comps.iter().map(|p| p.scale(c)).collect() }
    }

    pub fn mul_poly(&self, g: &Polynomial) -> VectorField {
        VectorField { chart: self.chart.clone(), comps: self.comps.iter().map(|p| p * g).collect() }
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Vec<Rational>> {
        self.comps.iter().map(|p| p.evaluate(point)).collect()
    }

    /// Re-express on a chart with extra trailing coordinates; the new components vanish.
    pub fn lift_to(&self, chart: ChartRef) -> Result<VectorField> {
        let n = chart.dim();
        if n < self.dim() {
            return Err(PflError::ChartMismatch { expected: self.dim(), found: n });
        }
        let mut comps: Vec<Polynomial> = self.comps.iter().map(|p| p.with_nvars(n)).collect::<Result<_>>()?;
        comps.resize(n, Polynomial::zero(n));
        Ok(VectorField { chart, comps })
    }

    /// Restrict to a chart that drops trailing coordinates. Fails if the field involves them.
    pub fn restrict_to(&self, chart: ChartRef) -> Result<VectorField> {
        let n = chart.dim();
        if self.comps[n..].iter().any(|p| !p.is_zero()) {
            return Err(PflError::ChartMismatch { expected: n, found: self.dim() });
        }
        let comps = self.comps[..n].iter().map(|p| p.with_nvars(n)).collect::<Result<_>>()?;
        Ok(VectorField { chart, comps })
    }

    pub(crate) fn from_parts(chart: ChartRef, comps: Vec<Polynomial>) -> Self {
        debug_assert_eq!(chart.dim(), comps.len());
        VectorField { chart, comps }
    }
}

/// `[f, g]^j = Σ_k (f^k ∂_k g^j - g^k ∂_k f^j)`.
pub fn lie_bracket(f: &VectorField, g: &VectorField) -> Result<VectorField> {
    same_chart(&f.chart, &g.chart)?;
    Ok(bracket(f, g))
}

pub(crate) fn bracket(f: &VectorField, g: &VectorField) -> VectorField {
    let comps = (0..f.dim()).map(|j| &f.apply(&g.comps[j]) - &g.apply(&f.comps[j])).collect();
    VectorField { chart: f.chart.clone(), comps }
}

/// Polynomial one-form `Σ ω_k dx_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneForm {
    chart: ChartRef,
    comps: Vec<Polynomial>,
}

impl OneForm {
    pub fn new(chart: ChartRef, comps: Vec<Polynomial>) -> Result<Self> {
        check_components(&chart, &comps)?;
        Ok(OneForm { chart, comps })
    }

    pub fn coordinate(chart: ChartRef, i: usize) -> Self {
        let n = chart.dim();
        let mut comps = vec![Polynomial::zero(n); n];
        comps[i] = Polynomial::one(n);
        OneForm { chart, comps }
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|p| p.is_zero())
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Vec<Rational>> {
        self.comps.iter().map(|p| p.evaluate(point)).collect()
    }

    pub fn add(&self, other: &OneForm) -> OneForm {
        OneForm { chart: self.chart.clone(), comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect() }
    }

    pub fn mul_poly(&self, g: &Polynomial) -> OneForm {
        OneForm { chart: self.chart.clone(), comps: self.comps.iter().map(|p| p * g).collect() }
    }

    pub(crate) fn from_parts(chart: ChartRef, comps: Vec<Polynomial>) -> Self {
        OneForm { chart, comps }
    }
}

/// `ω(f) = Σ ω_k f^k`.
pub fn pairing(omega: &OneForm, f: &VectorField) -> Result<Polynomial> {
    same_chart(&omega.chart, &f.chart)?;
    Ok(pair(omega, f))
}

pub(crate) fn pair(omega: &OneForm, f: &VectorField) -> Polynomial {
    let mut out = Polynomial::zero(f.dim());
    for (w, c) in omega.comps.iter().zip(&f.comps) {
        if !w.is_zero() && !c.is_zero() {
            out = &out + &(w * c);
        }
    }
    out
}

/// Two-form `Σ_{i<j} ω_ij dx_i ∧ dx_j`, sparse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoForm {
    chart: ChartRef,
    comps: BTreeMap<(usize, usize), Polynomial>,
}

impl TwoForm {
    pub fn zero(chart: ChartRef) -> Self {
        TwoForm { chart, comps: BTreeMap::new() }
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    /// Coefficient of `dx_i ∧ dx_j` with antisymmetry applied.
    pub fn component(&self, i: usize, j: usize) -> Polynomial {
        let n = self.chart.dim();
        if i == j {
            return Polynomial::zero(n);
        }
        let (a, b, neg) = if i < j { (i, j, false) } else { (j, i, true) };
        match self.comps.get(&(a, b)) {
            Some(p) if neg => -p,
            Some(p) => p.clone(),
            None => Polynomial::zero(n),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        assert!(i < j);
        if p.is_zero() {
            self.comps.remove(&(i, j));
        } else {
            self.comps.insert((i, j), p);
        }
    }

    pub fn components(&self) -> &BTreeMap<(usize, usize), Polynomial> {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// `ω(f, g)`.
    pub fn evaluate(&self, f: &VectorField, g: &VectorField) -> Polynomial {
        let mut out = Polynomial::zero(f.dim());
        for (&(i, j), w) in &self.comps {
            let a = &f.comps[i] * &g.comps[j];
            let b = &f.comps[j] * &g.comps[i];
            let t = &a - &b;
            if !t.is_zero() {
                out = &out + &(w * &t);
            }
        }
        out
    }
}

/// `(dω)_ij = ∂_i ω_j - ∂_j ω_i`.
pub fn exterior_derivative(omega: &OneForm) -> TwoForm {
    let n = omega.dim();
    let mut out = TwoForm::zero(omega.chart.clone());
    let derivs: Vec<Vec<Polynomial>> = omega.comps.iter().map(|w| (0..n).map(|i| w.deriv(i)).collect()).collect();
    for i in 0..n {
        for j in i + 1..n {
            out.set(i, j, &derivs[j][i] - &derivs[i][j]);
        }
    }
    out
}

/// `ι_f ω = ω(f, ·)`.
pub fn interior_product(f: &VectorField, omega: &TwoForm) -> Result<OneForm> {
    same_chart(&f.chart, &omega.chart)?;
    let n = f.dim();
    let mut comps = vec![Polynomial::zero(n); n];
    for (&(i, j), w) in &omega.comps {
        if !f.comps[i].is_zero() {
            comps[j] = &comps[j] + &(&f.comps[i] * w);
        }
        if !f.comps[j].is_zero() {
            comps[i] = &comps[i] - &(&f.comps[j] * w);
        }
    }
    Ok(OneForm { chart: f.chart.clone(), comps })
}

/// Four-form with sorted index quadruples, sparse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourForm {
    chart: ChartRef,
    comps: BTreeMap<[usize; 4], Polynomial>,
}

impl FourForm {
    pub fn components(&self) -> &BTreeMap<[usize; 4], Polynomial> {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Value on four vector fields: `Σ Ω_abcd det[v_k^{a,b,c,d}]`.
    pub fn evaluate(&self, v: [&VectorField; 4]) -> Polynomial {
        let n = self.chart.dim();
        let mut out = Polynomial::zero(n);
        for (idx, w) in &self.comps {
            let m: Vec<Vec<&Polynomial>> = v.iter().map(|f| idx.iter().map(|&a| &f.comps[a]).collect()).collect();
            let d = det4(&m, n);
            if !d.is_zero() {
                out = &out + &(w * &d);
            }
        }
        out
    }

    /// Restrict to a frame: the residue modulo the forms annihilating the frame.
    pub fn restrict(&self, frame: &[VectorField]) -> FourFormResidue {
        let mut comps = BTreeMap::new();
        for_each_quad(frame.len(), |q| {
            let p = self.evaluate([&frame[q[0]], &frame[q[1]], &frame[q[2]], &frame[q[3]]]);
            if !p.is_zero() {
                comps.insert(q, p);
            }
        });
        FourFormResidue { frame_len: frame.len(), comps }
    }
}

fn det4(m: &[Vec<&Polynomial>], n: usize) -> Polynomial {
    let mut out = Polynomial::zero(n);
    let perms = permutations4();
    for (p, sign) in perms {
        let mut t = Polynomial::one(n);
        for (r, &c) in p.iter().enumerate() {
            let e = m[r][c];
            if e.is_zero() {
                t = Polynomial::zero(n);
                break;
            }
            t = &t * e;
        }
        if t.is_zero() {
            continue;
        }
        out = if sign > 0 { &out + &t } else { &out - &t };
    }
    out
}

fn permutations4() -> Vec<([usize; 4], i32)> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    if p.iter().any(|&x| std::mem::replace(&mut seen[x], true)) {
                        continue;
                    }
                    let mut sign = 1;
                    for i in 0..4 {
                        for j in i + 1..4 {
                            if p[i] > p[j] {
                                sign = -sign;
                            }
                        }
                    }
                    out.push((p, sign));
                }
            }
        }
    }
    out
}

pub(crate) fn for_each_quad(n: usize, mut f: impl FnMut([usize; 4])) {
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    f([a, b, c, d]);
                }
            }
        }
    }
}

/// `α ∧ β` for two-forms.
pub fn wedge_two_forms(alpha: &TwoForm, beta: &TwoForm) -> Result<FourForm> {
    same_chart(&alpha.chart, &beta.chart)?;
    let n = alpha.chart.dim();
    let mut comps = BTreeMap::new();
    if alpha.is_zero() || beta.is_zero() {
        return Ok(FourForm { chart: alpha.chart.clone(), comps });
    }
    let mut touched = std::collections::BTreeSet::new();
    for &(i, j) in alpha.comps.keys() {
        for &(k, l) in beta.comps.keys() {
            let mut q = [i, j, k, l];
            q.sort_unstable();
            if q[0] < q[1] && q[1] < q[2] && q[2] < q[3] {
                touched.insert(q);
            }
        }
    }
    for [a, b, c, d] in touched {
        let terms = [
            (alpha.component(a, b), beta.component(c, d), false),
            (alpha.component(a, c), beta.component(b, d), true),
            (alpha.component(a, d), beta.component(b, c), false),
            (alpha.component(b, c), beta.component(a, d), false),
            (alpha.component(b, d), beta.component(a, c), true),
            (alpha.component(c, d), beta.component(a, b), false),
        ];
        let mut s = Polynomial::zero(n);
        for (x, y, neg) in terms {
            if x.is_zero() || y.is_zero() {
                continue;
            }
            let t = &x * &y;
            s = if neg { &s - &t } else { &s + &t };
        }
        if !s.is_zero() {
            comps.insert([a, b, c, d], s);
        }
    }
    Ok(FourForm { chart: alpha.chart.clone(), comps })
}

/// A four-form evaluated on the quadruples of a fixed frame; vanishing means the form lies in
/// the ideal generated by the frame's annihilator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourFormResidue {
    pub frame_len: usize,
    pub comps: BTreeMap<[usize; 4], Polynomial>,
}

impl FourFormResidue {
    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }
}

/// `(α ∧ β)` restricted to a frame, computed from the restricted two-forms.
pub fn wedge_restricted(alpha: &[Vec<Polynomial>], beta: &[Vec<Polynomial>], nvars: usize) -> FourFormResidue {
    let k = alpha.len();
    let mut comps = BTreeMap::new();
    for_each_quad(k, |[a, b, c, d]| {
        let terms = [
            (&alpha[a][b], &beta[c][d], false),
            (&alpha[a][c], &beta[b][d], true),
            (&alpha[a][d], &beta[b][c], false),
            (&alpha[b][c], &beta[a][d], false),
            (&alpha[b][d], &beta[a][c], true),
            (&alpha[c][d], &beta[a][b], false),
        ];
        let mut s = Polynomial::zero(nvars);
        for (x, y, neg) in terms {
            if x.is_zero() || y.is_zero() {
                continue;
            }
            let t = x * y;
            s = if neg { &s - &t } else { &s + &t };
        }
        if !s.is_zero() {
            comps.insert([a, b, c, d], s);
        }
    });
    FourFormResidue { frame_len: k, comps }
}

/// Matrix `[ω(f_a, f_b)]` of a two-form on a frame.
pub fn restrict_two_form(omega: &TwoForm, frame: &[VectorField]) -> Vec<Vec<Polynomial>> {
    let k = frame.len();
    let n = omega.chart.dim();
    let mut m = vec![vec![Polynomial::zero(n); k]; k];
    for a in 0..k {
        for b in a + 1..k {
            let v = omega.evaluate(&frame[a], &frame[b]);
            m[b][a] = -&v;
            m[a][b] = v;
        }
    }
    m
}
