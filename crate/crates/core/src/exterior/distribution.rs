use std::sync::{Arc, OnceLock};

use num_traits::Zero;

use super::chart::{same_chart, ChartRef};
use super::fields::{bracket, pair, OneForm, VectorField};
use crate::error::{PflError, Result};
use crate::poly::linalg::RowSpace;
use crate::poly::matrix::{guide_point, PolyMatrix};
use crate::poly::{Polynomial, Rational, RationalPoint};

/// Columns are the given polynomial vectors.
fn column_matrix(nvars: usize, height: usize, vectors: &[&[Polynomial]]) -> PolyMatrix {
    PolyMatrix::from_columns(nvars, height, vectors).expect("vectors share the chart")
}

/// Indices of a maximal subset independent at `point`, chosen greedily in order.
pub(crate) fn independent_at(vectors: &[Vec<Rational>]) -> Vec<usize> {
    let mut space = RowSpace::new();
    vectors.iter().enumerate().filter(|(_, v)| space.insert(v)).map(|(i, _)| i).collect()
}

/// Indices of a subset that is a basis over rational functions, chosen greedily in order.
pub(crate) fn generic_basis(vectors: &[&[Polynomial]], nvars: usize, height: usize) -> Vec<usize> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let g = guide_point(nvars);
    let at: Vec<Vec<Rational>> = vectors.iter().map(|v| v.iter().map(|p| p.eval(&g)).collect()).collect();
    let picked = independent_at(&at);
    let m = column_matrix(nvars, height, vectors);
    let rank = m.generic_rank();
    if picked.len() == rank {
        return picked;
    }
    let ech = m.echelon(Some(&g), None);
    let mut cols: Vec<usize> = ech.pivots.iter().map(|p| p.1).collect();
    cols.sort_unstable();
    cols
}

/// Span of polynomial vector fields.
#[derive(Clone, Debug)]
pub struct Distribution {
    chart: ChartRef,
    generators: Vec<VectorField>,
    generic_rank: usize,
    annihilator_cache: Arc<OnceLock<Vec<OneForm>>>,
}

impl PartialEq for Distribution {
    fn eq(&self, other: &Self) -> bool {
        self.chart == other.chart && self.generators == other.generators
    }
}

impl Distribution {
    pub fn new(chart: ChartRef, generators: Vec<VectorField>) -> Result<Self> {
        for g in &generators {
            same_chart(&chart, g.chart())?;
        }
        let generic_rank = Self::rank_of(&chart, &generators);
        Ok(Distribution { chart, generators, generic_rank, annihilator_cache: Arc::new(OnceLock::new()) })
    }

    fn rank_of(chart: &ChartRef, generators: &[VectorField]) -> usize {
        if generators.is_empty() {
            return 0;
        }
        let cols: Vec<&[Polynomial]> = generators.iter().map(|g| g.components()).collect();
        column_matrix(chart.dim(), chart.dim(), &cols).generic_rank()
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn generators(&self) -> &[VectorField] {
        &self.generators
    }

    pub fn generic_rank(&self) -> usize {
        self.generic_rank
    }

    pub fn matrix(&self) -> PolyMatrix {
        let cols: Vec<&[Polynomial]> = self.generators.iter().map(|g| g.components()).collect();
        column_matrix(self.dim(), self.dim(), &cols)
    }

    pub fn rank_at(&self, point: &RationalPoint) -> Result<usize> {
        point.check_dim(self.dim())?;
        if self.generators.is_empty() {
            return Ok(0);
        }
        self.matrix().rank_at_point(point.coords())
    }

    pub fn is_regular_at(&self, point: &RationalPoint) -> Result<bool> {
        Ok(self.rank_at(point)? == self.generic_rank)
    }

    /// Generators independent at `point`, chosen greedily in order.
    pub fn frame_at(&self, point: &RationalPoint) -> Result<Vec<usize>> {
        point.check_dim(self.dim())?;
        let at: Vec<Vec<Rational>> = self.generators.iter().map(|g| g.evaluate(point.coords())).collect::<Result<_>>()?;
        Ok(independent_at(&at))
    }

    /// Generators forming a basis over rational functions.
    pub fn generic_frame(&self) -> Vec<VectorField> {
        let cols: Vec<&[Polynomial]> = self.generators.iter().map(|g| g.components()).collect();
        generic_basis(&cols, self.dim(), self.dim()).into_iter().map(|i| self.generators[i].clone()).collect()
    }

    /// Frame independent at `base`; requires a regular base point.
    pub fn regular_frame(&self, base: &RationalPoint) -> Result<Vec<VectorField>> {
        let idx = self.frame_at(base)?;
        if idx.len() != self.generic_rank {
            return Err(PflError::NonRegularPoint(format!(
                "rank {} at base, {} generically",
                idx.len(),
                self.generic_rank
            )));
        }
        Ok(idx.into_iter().map(|i| self.generators[i].clone()).collect())
    }

    /// Forms spanning the annihilator over rational functions. Cached.
    pub(crate) fn span_equations(&self) -> &[OneForm] {
        self.annihilator_cache.get_or_init(|| {
            let n = self.dim();
            if self.generic_rank == n {
                return Vec::new();
            }
            let frame = self.generic_frame();
            annihilator_forms(&self.chart, &frame, None).0
        })
    }

    /// Membership over rational functions.
    pub fn contains(&self, v: &VectorField) -> bool {
        if v.is_zero() {
            return true;
        }
        let eqs = self.span_equations();
        if eqs.is_empty() {
            return self.generic_rank == self.dim();
        }
        let g = guide_point(self.dim());
        let vg: Vec<Rational> = v.components().iter().map(|p| p.eval(&g)).collect();
        for w in eqs {
            let s: Rational = w.components().iter().zip(&vg).filter(|(_, x)| !x.is_zero()).map(|(p, x)| p.eval(&g) * x).sum();
            if !s.is_zero() {
                return false;
            }
        }
        eqs.iter().all(|w| pair(w, v).is_zero())
    }

    /// `other ⊂ self` over rational functions.
    pub fn includes(&self, other: &Distribution) -> bool {
        other.generators.iter().all(|g| self.contains(g))
    }

    pub fn same_span(&self, other: &Distribution) -> bool {
        self.generic_rank == other.generic_rank && self.includes(other)
    }

    pub fn is_involutive(&self) -> bool {
        let frame = self.generic_frame();
        for i in 0..frame.len() {
            for j in i + 1..frame.len() {
                if !self.contains(&bracket(&frame[i], &frame[j])) {
                    return false;
                }
            }
        }
        true
    }

    /// Sum of two distributions on the same chart.
    pub fn sum(&self, other: &Distribution) -> Result<Distribution> {
        same_chart(&self.chart, &other.chart)?;
        let mut g = self.generators.clone();
        g.extend(other.generators.iter().cloned());
        Distribution::new(self.chart.clone(), g)
    }

    pub fn lift_to(&self, chart: ChartRef) -> Result<Distribution> {
        let g = self.generators.iter().map(|f| f.lift_to(chart.clone())).collect::<Result<_>>()?;
        Distribution::new(chart, g)
    }
}

/// Span of polynomial one-forms.
#[derive(Clone, Debug, PartialEq)]
pub struct PfaffianSystem {
    chart: ChartRef,
    forms: Vec<OneForm>,
    generic_rank: usize,
}

impl PfaffianSystem {
    pub fn new(chart: ChartRef, forms: Vec<OneForm>) -> Result<Self> {
        for w in &forms {
            same_chart(&chart, w.chart())?;
        }
        let generic_rank = if forms.is_empty() {
            0
        } else {
            let cols: Vec<&[Polynomial]> = forms.iter().map(|w| w.components()).collect();
            column_matrix(chart.dim(), chart.dim(), &cols).generic_rank()
        };
        Ok(PfaffianSystem { chart, forms, generic_rank })
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn forms(&self) -> &[OneForm] {
        &self.forms
    }

    pub fn generic_rank(&self) -> usize {
        self.generic_rank
    }

    pub fn rank_at(&self, point: &RationalPoint) -> Result<usize> {
        point.check_dim(self.dim())?;
        if self.forms.is_empty() {
            return Ok(0);
        }
        let cols: Vec<&[Polynomial]> = self.forms.iter().map(|w| w.components()).collect();
        column_matrix(self.dim(), self.dim(), &cols).rank_at_point(point.coords())
    }

    pub fn generic_frame(&self) -> Vec<OneForm> {
        let cols: Vec<&[Polynomial]> = self.forms.iter().map(|w| w.components()).collect();
        generic_basis(&cols, self.dim(), self.dim()).into_iter().map(|i| self.forms[i].clone()).collect()
    }

    /// Forms independent at `base`; requires a regular base point.
    pub fn regular_frame(&self, base: &RationalPoint) -> Result<Vec<OneForm>> {
        base.check_dim(self.dim())?;
        let at: Vec<Vec<Rational>> = self.forms.iter().map(|w| w.evaluate(base.coords())).collect::<Result<_>>()?;
        let idx = independent_at(&at);
        if idx.len() != self.generic_rank {
            return Err(PflError::NonRegularPoint(format!(
                "form rank {} at base, {} generically",
                idx.len(),
                self.generic_rank
            )));
        }
        Ok(idx.into_iter().map(|i| self.forms[i].clone()).collect())
    }

    /// Vector fields annihilated by every form, as a distribution.
    pub fn kernel(&self, base: Option<&RationalPoint>) -> Result<Distribution> {
        let n = self.dim();
        if self.generic_rank == 0 {
            let gens = (0..n).map(|i| VectorField::coordinate(self.chart.clone(), i)).collect();
            return Distribution::new(self.chart.clone(), gens);
        }
        let frame = self.generic_frame();
        let rows: Vec<Vec<Polynomial>> = frame.iter().map(|w| w.components().to_vec()).collect();
        let m = PolyMatrix::from_rows(n, rows)?;
        let k = m.kernel(base.map(|b| b.coords()));
        let gens = k.vectors.into_iter().map(|v| VectorField::from_parts(self.chart.clone(), v)).collect();
        Distribution::new(self.chart.clone(), gens)
    }
}

/// Annihilator of a frame: forms whose kernel is the frame's span, plus the locus off which
/// they are valid.
pub(crate) fn annihilator_forms(chart: &ChartRef, frame: &[VectorField], base: Option<&[Rational]>) -> (Vec<OneForm>, Polynomial) {
    let n = chart.dim();
    if frame.is_empty() {
        return ((0..n).map(|i| OneForm::coordinate(chart.clone(), i)).collect(), Polynomial::one(n));
    }
    let rows: Vec<Vec<Polynomial>> = frame.iter().map(|f| f.components().to_vec()).collect();
    let m = PolyMatrix::from_rows(n, rows).expect("frame shares the chart");
    let k = m.kernel(base);
    (k.vectors.into_iter().map(|v| OneForm::from_parts(chart.clone(), v)).collect(), k.locus)
}

/// The annihilating Pfaffian system of `d` near `base`.
#[derive(Clone, Debug)]
pub struct Annihilator {
    pub system: PfaffianSystem,
    /// The forms are valid wherever this polynomial is nonzero; it is nonzero at the base.
    pub locus: Polynomial,
}

pub fn annihilator(d: &Distribution, base: &RationalPoint) -> Result<Annihilator> {
    base.check_dim(d.dim())?;
    let frame = d.regular_frame(base)?;
    let (forms, locus) = annihilator_forms(d.chart(), &frame, Some(base.coords()));
    let system = PfaffianSystem::new(d.chart().clone(), forms)?;
    if system.rank_at(base)? != d.dim() - d.generic_rank() {
        return Err(PflError::Internal("annihilator lost rank at the base point".into()));
    }
    Ok(Annihilator { system, locus })
}
