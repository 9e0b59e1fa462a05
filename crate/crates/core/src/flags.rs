//! Derived and Lie flags of distributions, and the derived flag of a Pfaffian system.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exterior::distribution::generic_basis;
use crate::exterior::fields::{bracket, exterior_derivative, restrict_two_form, OneForm, VectorField};
use crate::exterior::{Distribution, PfaffianSystem};
use crate::poly::linalg::RowSpace;
use crate::poly::matrix::guide_point;
use crate::poly::{PolyMatrix, Polynomial, Rational, RationalPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagKind {
    Derived,
    Lie,
    DerivedForms,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagLevel {
    pub generator_count: usize,
    pub generic_rank: usize,
    pub rank_at_base: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagReport {
    pub kind: FlagKind,
    pub levels: Vec<FlagLevel>,
    pub base_point: RationalPoint,
    /// Every level has its generic rank at the base point.
    pub regular: bool,
    /// The last two levels agree in generic and pointwise rank.
    pub stabilized: bool,
}

impl FlagReport {
    pub fn generic_ranks(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.generic_rank).collect()
    }

    pub fn ranks_at_base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.rank_at_base).collect()
    }

    fn finish(kind: FlagKind, levels: Vec<FlagLevel>, base: &RationalPoint) -> Self {
        let regular = levels.iter().all(|l| l.generic_rank == l.rank_at_base);
        let stabilized = levels.len() >= 2 && {
            let (a, b) = (&levels[levels.len() - 2], &levels[levels.len() - 1]);
            a.generic_rank == b.generic_rank && a.rank_at_base == b.rank_at_base
        };
        FlagReport { kind, levels, base_point: base.clone(), regular, stabilized }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityVerdict {
    pub is_regular: bool,
    pub first_defective_level: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Flag {
    pub report: FlagReport,
    pub levels: Vec<Distribution>,
}

#[derive(Clone, Debug)]
pub struct FormFlag {
    pub report: FlagReport,
    pub levels: Vec<PfaffianSystem>,
}

fn level_of(d: &Distribution, base: &RationalPoint) -> Result<FlagLevel> {
    Ok(FlagLevel { generator_count: d.generators().len(), generic_rank: d.generic_rank(), rank_at_base: d.rank_at(base)? })
}

fn eval(v: &VectorField, at: &[Rational]) -> Vec<Rational> {
    v.components().iter().map(|p| p.eval(at)).collect()
}

/// Append candidates that raise the generic rank or the rank at `base`.
///
/// A pass at a pseudo-random point decides which candidates are kept; the dropped ones are then
/// certified to lie in the span of the result over rational functions. A candidate that fails
/// certification is appended and the certification repeated.
fn extend_level(current: &[VectorField], candidates: Vec<VectorField>, base: &RationalPoint) -> Result<(Distribution, bool)> {
    let chart = current[0].chart().clone();
    let n = chart.dim();
    let g = guide_point(n);
    let mut at_guide = RowSpace::new();
    let mut at_base = RowSpace::new();
    for v in current {
        at_guide.insert(&eval(v, &g));
        at_base.insert(&eval(v, base.coords()));
    }
    let mut gens = current.to_vec();
    let mut dropped = Vec::new();
    for c in candidates {
        if c.is_zero() {
            continue;
        }
        if at_guide.dim() == n && at_base.dim() == n {
            break;
        }
        let raises_generic = at_guide.insert(&eval(&c, &g));
        let raises_base = at_base.insert(&eval(&c, base.coords()));
        if raises_generic || raises_base {
            gens.push(c);
        } else {
            dropped.push(c);
        }
    }
    loop {
        let d = Distribution::new(chart.clone(), gens.clone())?;
        if d.generic_rank() == n {
            let grew = gens.len() > current.len();
            return Ok((d, grew));
        }
        let missing: Vec<usize> = (0..dropped.len()).filter(|&i| !d.contains(&dropped[i])).collect();
        if missing.is_empty() {
            let grew = gens.len() > current.len();
            return Ok((d, grew));
        }
        let i = missing[0];
        gens.push(dropped.remove(i));
    }
}

#[cfg(feature = "parallel")]
fn brackets(pairs: &[(&VectorField, &VectorField)]) -> Vec<VectorField> {
    use rayon::prelude::*;
    pairs.par_iter().map(|(a, b)| bracket(a, b)).collect()
}

#[cfg(not(feature = "parallel"))]
fn brackets(pairs: &[(&VectorField, &VectorField)]) -> Vec<VectorField> {
    pairs.iter().map(|(a, b)| bracket(a, b)).collect()
}

fn build_flag(
    d: &Distribution,
    base: &RationalPoint,
    max_level: Option<usize>,
    kind: FlagKind,
) -> Result<Flag> {
    base.check_dim(d.dim())?;
    let max_level = max_level.unwrap_or(d.dim());
    let mut levels = vec![d.clone()];
    let mut report_levels = vec![level_of(d, base)?];
    while levels.len() <= max_level {
        let last = levels.last().unwrap();
        let n = d.dim();
        let full = last.generic_rank() == n && report_levels.last().unwrap().rank_at_base == n;
        if full || last.generators().is_empty() {
            break;
        }
        let lg = last.generators();
        let pairs: Vec<(&VectorField, &VectorField)> = match kind {
            FlagKind::Derived => {
                let mut p = Vec::new();
                for i in 0..lg.len() {
                    for j in i + 1..lg.len() {
                        p.push((&lg[i], &lg[j]));
                    }
                }
                p
            }
            _ => {
                let mut p = Vec::new();
                for a in d.generators() {
                    for b in lg {
                        p.push((a, b));
                    }
                }
                p
            }
        };
        let (next, grew) = extend_level(lg, brackets(&pairs), base)?;
        report_levels.push(level_of(&next, base)?);
        levels.push(next);
        if !grew {
            break;
        }
    }
    Ok(Flag { report: FlagReport::finish(kind, report_levels, base), levels })
}

/// `D^(0) = D`, `D^(i+1) = D^(i) + [D^(i), D^(i)]`, up to `max_level` (default: chart dimension).
pub fn derived_flag(d: &Distribution, base: &RationalPoint, max_level: Option<usize>) -> Result<Flag> {
    build_flag(d, base, max_level, FlagKind::Derived)
}

/// `L^(0) = D`, `L^(i+1) = L^(i) + [D, L^(i)]`.
pub fn lie_flag(d: &Distribution, base: &RationalPoint, max_level: Option<usize>) -> Result<Flag> {
    build_flag(d, base, max_level, FlagKind::Lie)
}

/// A point is regular when every Lie flag level has its generic rank there.
pub fn is_regular_point(d: &Distribution, base: &RationalPoint) -> Result<RegularityVerdict> {
    let flag = lie_flag(d, base, None)?;
    let first_defective_level = flag.report.levels.iter().position(|l| l.generic_rank != l.rank_at_base);
    Ok(RegularityVerdict { is_regular: first_defective_level.is_none(), first_defective_level })
}

fn form_level(i: &PfaffianSystem, base: &RationalPoint) -> Result<FlagLevel> {
    Ok(FlagLevel { generator_count: i.forms().len(), generic_rank: i.generic_rank(), rank_at_base: i.rank_at(base)? })
}

/// One step: forms `Σ a_k ω_k` of `I` whose differential vanishes on `ker I`.
pub(crate) fn derived_system(i: &PfaffianSystem, base: &RationalPoint) -> Result<PfaffianSystem> {
    let chart = i.chart().clone();
    let n = chart.dim();
    if i.generic_rank() == 0 {
        return Ok(i.clone());
    }
    let omegas: Vec<OneForm> = match i.regular_frame(base) {
        Ok(f) => f,
        Err(_) => i.generic_frame(),
    };
    let kernel = i.kernel(Some(base))?;
    let frame = kernel.generic_frame();
    let restricted: Vec<Vec<Vec<Polynomial>>> = omegas.iter().map(|w| restrict_two_form(&exterior_derivative(w), &frame)).collect();
    let s = omegas.len();
    let mut rows = Vec::new();
    for a in 0..frame.len() {
        for b in a + 1..frame.len() {
            let row: Vec<Polynomial> = (0..s).map(|k| restricted[k][a][b].clone()).collect();
            if row.iter().any(|p| !p.is_zero()) {
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return PfaffianSystem::new(chart, omegas);
    }
    let m = PolyMatrix::from_rows(n, rows)?;
    let k = m.kernel(Some(base.coords()));
    let mut forms = Vec::new();
    for a in &k.vectors {
        let mut comps = vec![Polynomial::zero(n); n];
        for (coef, w) in a.iter().zip(&omegas) {
            if coef.is_zero() {
                continue;
            }
            for (c, p) in comps.iter_mut().zip(w.components()) {
                if !p.is_zero() {
                    *c = &*c + &(coef * p);
                }
            }
        }
        forms.push(OneForm::new(chart.clone(), comps)?);
    }
    let comps: Vec<&[Polynomial]> = forms.iter().map(|w| w.components()).collect();
    let keep = generic_basis(&comps, n, n);
    PfaffianSystem::new(chart, keep.into_iter().map(|j| forms[j].clone()).collect())
}

/// `I^(0) = I ⊃ I^(1) ⊃ ...` until the rank stops dropping.
pub fn derived_flag_forms(i: &PfaffianSystem, base: &RationalPoint, max_level: Option<usize>) -> Result<FormFlag> {
    base.check_dim(i.dim())?;
    let max_level = max_level.unwrap_or(i.dim());
    let mut levels = vec![i.clone()];
    let mut report_levels = vec![form_level(i, base)?];
    while levels.len() <= max_level {
        let last = levels.last().unwrap();
        if last.generic_rank() == 0 {
            break;
        }
        let next = derived_system(last, base)?;
        let same = next.generic_rank() == last.generic_rank();
        report_levels.push(form_level(&next, base)?);
        levels.push(next);
        if same {
            break;
        }
    }
    Ok(FormFlag { report: FlagReport::finish(FlagKind::DerivedForms, report_levels, base), levels })
}
