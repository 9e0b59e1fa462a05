//! Engel rank tests, characteristic distributions, structure functions and corank-one
//! involutive subdistributions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{PflError, Result};
use crate::exterior::fields::{bracket, restrict_two_form, wedge_restricted};
use crate::exterior::{
    annihilator, exterior_derivative, interior_product, pairing, Distribution, OneForm, PfaffianSystem, VectorField,
};
use crate::flags::derived_flag;
use crate::poly::linalg::RowSpace;
use crate::poly::{PolyMatrix, Polynomial, RatFunc, Rational, RationalPoint};

/// `D^(1)`, the first derived level.
pub fn first_derived(d: &Distribution, base: &RationalPoint) -> Result<Distribution> {
    let flag = derived_flag(d, base, Some(1))?;
    Ok(flag.levels.last().cloned().unwrap_or_else(|| d.clone()))
}

fn require_regular(d: &Distribution, base: &RationalPoint, what: &str) -> Result<()> {
    let r = d.rank_at(base)?;
    if r != d.generic_rank() {
        return Err(PflError::NonRegularPoint(format!("{what} has rank {r} at base, {} generically", d.generic_rank())));
    }
    Ok(())
}

fn combine(frame: &[VectorField], coeffs: &[Polynomial]) -> VectorField {
    let mut v = VectorField::zero(frame[0].chart().clone());
    for (f, a) in frame.iter().zip(coeffs) {
        if !a.is_zero() {
            v = v.add(&f.mul_poly(a));
        }
    }
    v
}

/// Fields `Σ a_i f_i` for each kernel vector of the stacked rows.
fn solve_on_frame(d: &Distribution, frame: &[VectorField], rows: Vec<Vec<Polynomial>>, base: &RationalPoint) -> Result<Distribution> {
    let n = d.dim();
    let rows: Vec<Vec<Polynomial>> = rows.into_iter().filter(|r| r.iter().any(|p| !p.is_zero())).collect();
    if rows.is_empty() {
        return Distribution::new(d.chart().clone(), frame.to_vec());
    }
    let m = PolyMatrix::from_rows(n, rows)?;
    let k = m.kernel(Some(base.coords()));
    let gens = k.vectors.iter().map(|a| combine(frame, a)).collect();
    Distribution::new(d.chart().clone(), gens)
}

/// `W(ω) = { f ∈ D : ι_f dω ≡ 0 mod D^⊥ }`.
pub fn w_subspace(d: &Distribution, omega: &OneForm, base: &RationalPoint) -> Result<Distribution> {
    let frame = d.regular_frame(base)?;
    let rows = w_rows(omega, &frame)?;
    solve_on_frame(d, &frame, rows, base)
}

/// Rows `b` of `[dω(f_a, f_b)]_a`.
fn w_rows(omega: &OneForm, frame: &[VectorField]) -> Result<Vec<Vec<Polynomial>>> {
    let dw = exterior_derivative(omega);
    let contracted: Vec<OneForm> = frame.iter().map(|f| interior_product(f, &dw)).collect::<Result<_>>()?;
    frame.iter().map(|fb| contracted.iter().map(|c| pairing(c, fb)).collect::<Result<Vec<_>>>()).collect()
}

/// Characteristic distribution from the annihilator: the common kernel of all `W(ω)` systems.
pub fn characteristic_by_forms(d: &Distribution, base: &RationalPoint) -> Result<Distribution> {
    let frame = d.regular_frame(base)?;
    if d.generic_rank() == d.dim() {
        return Distribution::new(d.chart().clone(), frame);
    }
    let ann = annihilator(d, base)?;
    let mut rows = Vec::new();
    for w in ann.system.forms() {
        rows.extend(w_rows(w, &frame)?);
    }
    solve_on_frame(d, &frame, rows, base)
}

/// Characteristic distribution from its definition: combinations `Σ a_i f_i` with
/// `Σ a_i [f_i, f_l] ∈ D` for every `l`, using residuals of brackets modulo `D`.
pub fn characteristic_by_brackets(d: &Distribution, base: &RationalPoint) -> Result<Distribution> {
    let frame = d.regular_frame(base)?;
    let n = d.dim();
    let k = frame.len();
    if k == n {
        return Distribution::new(d.chart().clone(), frame);
    }
    let mut cols: Vec<Vec<Polynomial>> = frame.iter().map(|f| f.components().to_vec()).collect();
    for f in &frame {
        for g in &frame {
            cols.push(bracket(f, g).components().to_vec());
        }
    }
    let refs: Vec<&[Polynomial]> = cols.iter().map(|c| c.as_slice()).collect();
    let m = PolyMatrix::from_columns(n, n, &refs)?;
    let mask: Vec<bool> = (0..cols.len()).map(|c| c < k).collect();
    let ech = m.echelon(Some(base.coords()), Some(&mask));
    if ech.rank() != k {
        return Err(PflError::Internal("frame lost rank during bracket projection".into()));
    }
    let pivot_rows: Vec<usize> = ech.pivots.iter().map(|p| p.0).collect();
    let mut rows = Vec::new();
    for r in (0..n).filter(|r| !pivot_rows.contains(r)) {
        for l in 0..k {
            rows.push((0..k).map(|i| ech.matrix.get(r, k + i * k + l).clone()).collect());
        }
    }
    solve_on_frame(d, &frame, rows, base)
}

/// The characteristic distribution, computed from the annihilator and checked against the
/// bracket definition.
pub fn characteristic_distribution(d: &Distribution, base: &RationalPoint) -> Result<Distribution> {
    require_regular(d, base, "D")?;
    let d1 = first_derived(d, base)?;
    require_regular(&d1, base, "D^(1)")?;
    let c = characteristic_by_forms(d, base)?;
    let by_brackets = characteristic_by_brackets(d, base)?;
    if !c.same_span(&by_brackets) {
        return Err(PflError::Internal("characteristic distribution routes disagree".into()));
    }
    let frame = d.regular_frame(base)?;
    for h in c.generators() {
        if !d.contains(h) || frame.iter().any(|f| !d.contains(&bracket(h, f))) {
            return Err(PflError::Internal("characteristic generator fails [h, D] ⊂ D".into()));
        }
    }
    Ok(c)
}

/// `[f_i, f_j] ≡ Σ_k c_ij^k g_k mod D`, stored as numerators over one common denominator.
#[derive(Clone, Debug)]
pub struct StructureFunctions {
    pub frame: Vec<VectorField>,
    pub complement: Vec<VectorField>,
    numerators: BTreeMap<(usize, usize), Vec<Polynomial>>,
    pub denominator: Polynomial,
    pub residual_check: bool,
}

impl StructureFunctions {
    pub fn d0(&self) -> usize {
        self.frame.len()
    }

    pub fn r0(&self) -> usize {
        self.complement.len()
    }

    /// Numerator of `c_ij^k` (zero-based), antisymmetric in `i, j`.
    pub fn numerator(&self, i: usize, j: usize, k: usize) -> Polynomial {
        let nv = self.denominator.nvars();
        if i == j {
            return Polynomial::zero(nv);
        }
        if i < j {
            self.numerators[&(i, j)][k].clone()
        } else {
            -&self.numerators[&(j, i)][k]
        }
    }

    pub fn coefficient(&self, i: usize, j: usize, k: usize) -> RatFunc {
        RatFunc::new(self.numerator(i, j, k), self.denominator.clone()).expect("denominator is nonzero")
    }
}

pub fn structure_functions(d0: &Distribution, d1: &Distribution, base: &RationalPoint) -> Result<StructureFunctions> {
    if !d1.includes(d0) {
        return Err(PflError::Precondition("D0 is not contained in D1".into()));
    }
    let r0 = d1.generic_rank().saturating_sub(d0.generic_rank());
    if r0 == 0 {
        return Err(PflError::Precondition("r0 = d1 - d0 must be at least 1".into()));
    }
    require_regular(d1, base, "D1")?;
    let frame = d0.regular_frame(base)?;
    let n = d0.dim();
    let k = frame.len();
    let at = |v: &VectorField| v.evaluate(base.coords());
    let mut space = RowSpace::new();
    for f in &frame {
        space.insert(&at(f)?);
    }
    let mut pairs = Vec::new();
    let mut brs = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            pairs.push((i, j));
            brs.push(bracket(&frame[i], &frame[j]));
        }
    }
    let mut complement = Vec::new();
    for b in brs.iter().chain(d1.generators()) {
        if complement.len() == r0 {
            break;
        }
        if space.insert(&at(b)?) {
            complement.push(b.clone());
        }
    }
    if complement.len() != r0 {
        return Err(PflError::NonRegularPoint("cannot complete D0 to D1 at the base point".into()));
    }
    let mut cols: Vec<&[Polynomial]> = frame.iter().map(|f| f.components()).collect();
    cols.extend(complement.iter().map(|g| g.components()));
    cols.extend(brs.iter().map(|b| b.components()));
    let m = PolyMatrix::from_columns(n, n, &cols)?;
    let piv = k + r0;
    let mask: Vec<bool> = (0..cols.len()).map(|c| c < piv).collect();
    let ech = m.echelon(Some(base.coords()), Some(&mask));
    if ech.rank() != piv {
        return Err(PflError::Internal("frame and complement are dependent".into()));
    }
    let denominator = ech.determinant.clone();
    if denominator.eval(base.coords()) == Rational::from_integer(0.into()) {
        return Err(PflError::NonRegularPoint("structure function denominator vanishes at base".into()));
    }
    let pivot_rows: Vec<usize> = ech.pivots.iter().map(|p| p.0).collect();
    let rows_g: Vec<usize> = (k..piv).map(|c| ech.pivot_row_of_col(c).unwrap()).collect();
    let mut numerators = BTreeMap::new();
    for (t, &(i, j)) in pairs.iter().enumerate() {
        let col = piv + t;
        for r in (0..n).filter(|r| !pivot_rows.contains(r)) {
            if !ech.matrix.get(r, col).is_zero() {
                return Err(PflError::Precondition(format!("bracket [f{}, f{}] is not in D1", i + 1, j + 1)));
            }
        }
        numerators.insert((i, j), rows_g.iter().map(|&r| ech.matrix.get(r, col).clone()).collect::<Vec<_>>());
    }
    let mut s = StructureFunctions { frame, complement, numerators, denominator, residual_check: false };
    s.residual_check = verify_residuals(&s, d0, &brs, &pairs);
    if !s.residual_check {
        return Err(PflError::Internal("structure function residual is not in D0".into()));
    }
    Ok(s)
}

fn verify_residuals(s: &StructureFunctions, d0: &Distribution, brs: &[VectorField], pairs: &[(usize, usize)]) -> bool {
    pairs.iter().zip(brs).all(|(&(i, j), b)| {
        let mut v = b.mul_poly(&s.denominator);
        for (k, g) in s.complement.iter().enumerate() {
            let c = s.numerator(i, j, k);
            if !c.is_zero() {
                v = v.sub(&g.mul_poly(&c));
            }
        }
        d0.contains(&v)
    })
}

/// The sextuple identities among structure functions; vacuous when `d0 < 4`.
pub fn engel_relations_check(s: &StructureFunctions) -> bool {
    let d0 = s.d0();
    if d0 < 4 {
        return true;
    }
    let r0 = s.r0();
    let c = |i: usize, j: usize, p: usize| s.numerator(i, j, p);
    for i in 0..d0 {
        for j in i + 1..d0 {
            for k in j + 1..d0 {
                for l in k + 1..d0 {
                    for p in 0..r0 {
                        for q in p..r0 {
                            let terms = [
                                (&c(i, j, p) * &c(k, l, q), false),
                                (&c(i, k, p) * &c(j, l, q), true),
                                (&c(i, l, p) * &c(j, k, q), false),
                                (&c(j, k, p) * &c(i, l, q), false),
                                (&c(j, l, p) * &c(i, k, q), true),
                                (&c(k, l, p) * &c(i, j, q), false),
                            ];
                            let mut sum = Polynomial::zero(s.denominator.nvars());
                            for (t, neg) in terms {
                                sum = if neg { &sum - &t } else { &sum + &t };
                            }
                            if !sum.is_zero() {
                                return false;
                            }
                        }
                    }
                }
            }
        }
    }
    true
}

/// `dω_i ∧ dω_j ≡ 0 mod I` for all pairs of forms, tested on a frame of `ker I`.
pub(crate) fn engel_test(forms: &[OneForm], frame: &[VectorField]) -> bool {
    if frame.len() < 4 || forms.is_empty() {
        return true;
    }
    let nv = frame[0].dim();
    let restricted: Vec<Vec<Vec<Polynomial>>> = forms.iter().map(|w| restrict_two_form(&exterior_derivative(w), frame)).collect();
    for i in 0..forms.len() {
        for j in i..forms.len() {
            if !wedge_restricted(&restricted[i], &restricted[j], nv).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Engel rank at most one: every `dω_i ∧ dω_j` vanishes modulo `I`.
pub fn engel_rank_le_one(i: &PfaffianSystem) -> Result<bool> {
    let forms = i.generic_frame();
    let kernel = i.kernel(None)?;
    Ok(engel_test(&forms, &kernel.generic_frame()))
}

/// Lexicographic comparison key for coefficient vectors in graded-lex order.
fn form_key(w: &OneForm) -> Vec<(u32, Vec<u32>)> {
    w.components()
        .iter()
        .map(|p| p.leading_term().map_or((0, Vec::new()), |(m, _)| (m.degree() + 1, m.exps().to_vec())))
        .collect()
}

/// The `W(ω)` pieces and their sum `B`.
#[derive(Clone, Debug)]
pub struct CorankOneB {
    pub b: Distribution,
    pub omegas: Vec<OneForm>,
    pub pieces: Vec<Distribution>,
}

impl CorankOneB {
    /// `W(ω_i) + W(ω_j)`.
    pub fn pair_sum(&self, i: usize, j: usize) -> Result<Distribution> {
        self.pieces[i].sum(&self.pieces[j])
    }
}

fn build_b(d: &Distribution, d1: &Distribution, base: &RationalPoint) -> Result<CorankOneB> {
    let d0 = d.generic_rank();
    let r0 = d1.generic_rank() - d0;
    let ann0 = annihilator(d, base)?.system;
    let mut space = RowSpace::new();
    if d1.generic_rank() < d.dim() {
        for w in annihilator(d1, base)?.system.forms() {
            space.insert(&w.evaluate(base.coords())?);
        }
    }
    let mut cands: Vec<&OneForm> = ann0.forms().iter().collect();
    cands.sort_by_key(|w| form_key(w));
    let mut omegas = Vec::new();
    for w in cands {
        if omegas.len() == r0 {
            break;
        }
        if space.insert(&w.evaluate(base.coords())?) {
            omegas.push(w.clone());
        }
    }
    if omegas.len() != r0 {
        return Err(PflError::NonRegularPoint("cannot split the annihilator at the base point".into()));
    }
    let pieces: Vec<Distribution> = omegas.iter().map(|w| w_subspace(d, w, base)).collect::<Result<_>>()?;
    let mut gens = Vec::new();
    for p in &pieces {
        gens.extend(p.generators().iter().cloned());
    }
    let b = Distribution::new(d.chart().clone(), gens)?;
    if b.generic_rank() != d0 - 1 || b.rank_at(base)? != d0 - 1 {
        return Err(PflError::Precondition(format!(
            "B has rank {} (generic) / {} (base), expected corank one in D; input is outside the theory's hypotheses",
            b.generic_rank(),
            b.rank_at(base)?
        )));
    }
    let bf = b.generic_frame();
    for i in 0..bf.len() {
        for j in i + 1..bf.len() {
            if !d.contains(&bracket(&bf[i], &bf[j])) {
                return Err(PflError::Precondition("[B, B] is not contained in D".into()));
            }
        }
    }
    Ok(CorankOneB { b, omegas, pieces })
}

/// The unique corank-one `B ⊂ D` with `[B, B] ⊂ D` (requires `r0 ≥ 2`).
pub fn corank_one_b(d: &Distribution, base: &RationalPoint) -> Result<CorankOneB> {
    require_regular(d, base, "D")?;
    let d1 = first_derived(d, base)?;
    require_regular(&d1, base, "D^(1)")?;
    let d0 = d.generic_rank();
    let r0 = d1.generic_rank() - d0;
    if r0 < 2 {
        return Err(PflError::Precondition(format!("r0 = {r0}, B needs r0 >= 2")));
    }
    let c = characteristic_distribution(d, base)?;
    if c.generic_rank() + r0 + 1 != d0 {
        return Err(PflError::Precondition(format!("characteristic rank {} differs from d0 - r0 - 1", c.generic_rank())));
    }
    let frame = d.regular_frame(base)?;
    let ann = annihilator(d, base)?.system;
    if !engel_test(ann.forms(), &frame) {
        return Err(PflError::Precondition("Engel rank exceeds one".into()));
    }
    build_b(d, &d1, base)
}

#[derive(Clone, Debug)]
pub struct CorankOneVerdict {
    pub exists: bool,
    pub r0: usize,
    pub char_rank_ok: bool,
    pub engel_rank_one: bool,
    pub characteristic: Distribution,
    pub b: Option<Distribution>,
    pub b_involutive: Option<bool>,
    pub l_witness: Option<Distribution>,
}

/// Summary of a [`CorankOneVerdict`] without polynomial payloads.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorankOneSummary {
    pub exists: bool,
    pub r0: usize,
    pub char_rank_ok: bool,
    pub characteristic_rank: usize,
    pub engel_rank_one: bool,
    pub b_rank: Option<usize>,
    pub b_involutive: Option<bool>,
    pub has_witness: bool,
}

impl CorankOneVerdict {
    pub fn summary(&self) -> CorankOneSummary {
        CorankOneSummary {
            exists: self.exists,
            r0: self.r0,
            char_rank_ok: self.char_rank_ok,
            characteristic_rank: self.characteristic.generic_rank(),
            engel_rank_one: self.engel_rank_one,
            b_rank: self.b.as_ref().map(|b| b.generic_rank()),
            b_involutive: self.b_involutive,
            has_witness: self.l_witness.is_some(),
        }
    }
}

/// Whether `D` contains an involutive subdistribution of corank one.
pub fn decide_corank_one_involutive(d: &Distribution, base: &RationalPoint) -> Result<CorankOneVerdict> {
    require_regular(d, base, "D")?;
    let d1 = first_derived(d, base)?;
    require_regular(&d1, base, "D^(1)")?;
    let d0 = d.generic_rank();
    let r0 = d1.generic_rank() - d0;
    if r0 == 0 {
        return Err(PflError::Precondition("D is involutive (r0 = 0)".into()));
    }
    let characteristic = characteristic_distribution(d, base)?;
    let expected = d0 as i64 - r0 as i64 - 1;
    let char_rank_ok = characteristic.generic_rank() as i64 == expected && characteristic.rank_at(base)? as i64 == expected;
    let frame = d.regular_frame(base)?;
    let ann = annihilator(d, base)?.system;
    let engel_rank_one = engel_test(ann.forms(), &frame);
    let mut v = CorankOneVerdict {
        exists: false,
        r0,
        char_rank_ok,
        engel_rank_one,
        characteristic,
        b: None,
        b_involutive: None,
        l_witness: None,
    };
    if !(char_rank_ok && engel_rank_one) {
        return Ok(v);
    }
    if r0 == 1 {
        v.exists = true;
        return Ok(v);
    }
    let b = build_b(d, &d1, base)?.b;
    let inv = b.is_involutive();
    v.exists = r0 >= 3 || inv;
    v.b_involutive = Some(inv);
    if v.exists {
        v.l_witness = Some(b.clone());
    }
    v.b = Some(b);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::jet::canonical_contact_system;
    use crate::exterior::{Chart, JetSpec};
    use num_traits::Signed;

    fn field(d: usize, comps: &[&str]) -> VectorField {
        VectorField::new(Chart::generic(d), comps.iter().map(|s| Polynomial::parse(s, d).unwrap()).collect()).unwrap()
    }

    fn dist(fs: Vec<VectorField>) -> Distribution {
        Distribution::new(fs[0].chart().clone(), fs).unwrap()
    }

    #[test]
    fn characteristic_of_involutive_is_itself() {
        let d = dist(vec![field(3, &["1", "0", "0"]), field(3, &["0", "1", "x2"])]);
        let o = RationalPoint::origin(3);
        let c = characteristic_distribution(&d, &o).unwrap();
        assert!(c.same_span(&d));
    }

    #[test]
    fn canonical_characteristic_ranks() {
        let o = |s: JetSpec| RationalPoint::origin(s.dim());
        for m in 1..=3 {
            let s = JetSpec::new(1, m).unwrap();
            let d = canonical_contact_system(s).unwrap();
            assert_eq!(characteristic_distribution(&d, &o(s)).unwrap().generic_rank(), 0);
        }
        for m in 2..=3 {
            let s = JetSpec::new(2, m).unwrap();
            let d = canonical_contact_system(s).unwrap();
            let d1 = first_derived(&d, &o(s)).unwrap();
            assert_eq!(d1.generic_rank(), 2 * m + 1);
            assert_eq!(characteristic_distribution(&d1, &o(s)).unwrap().generic_rank(), m);
        }
    }

    #[test]
    fn structure_table_first_order_two_curves() {
        let s = JetSpec::new(1, 2).unwrap();
        let d = canonical_contact_system(s).unwrap();
        let o = RationalPoint::origin(s.dim());
        let d1 = first_derived(&d, &o).unwrap();
        let sf = structure_functions(&d, &d1, &o).unwrap();
        assert!(sf.residual_check);
        let mut nonzero = 0;
        for i in 0..3 {
            for j in i + 1..3 {
                for k in 0..2 {
                    let c = sf.coefficient(i, j, k);
                    if !c.is_zero() {
                        nonzero += 1;
                        assert!(c.is_polynomial());
                        assert_eq!(c.as_polynomial().unwrap().as_constant().map(|q| q.abs()), Some(Rational::from_integer(1.into())));
                    }
                    assert!(sf.coefficient(j, i, k).equals(&sf.coefficient(i, j, k).neg()));
                }
            }
        }
        assert_eq!(nonzero, 2);
        assert!(structure_functions(&d, &d, &o).is_err());
    }

    #[test]
    fn darboux_engel_rank() {
        let c = Chart::generic(5);
        let w = OneForm::new(c.clone(), ["-x2", "0", "-x4", "0", "1"].iter().map(|s| Polynomial::parse(s, 5).unwrap()).collect()).unwrap();
        let i = PfaffianSystem::new(c.clone(), vec![w]).unwrap();
        assert!(!engel_rank_le_one(&i).unwrap());
        let w = OneForm::new(c.clone(), ["-x2", "0", "-x4*x1", "0", "1"].iter().map(|s| Polynomial::parse(s, 5).unwrap()).collect()).unwrap();
        let w2 = OneForm::coordinate(c.clone(), 2);
        let i = PfaffianSystem::new(c, vec![w, w2]).unwrap();
        assert!(engel_rank_le_one(&i).unwrap());
    }

    #[test]
    fn first_order_three_curves_b_is_top_fields() {
        let s = JetSpec::new(1, 3).unwrap();
        let d = canonical_contact_system(s).unwrap();
        let o = RationalPoint::origin(s.dim());
        let d1 = first_derived(&d, &o).unwrap();
        let sf = structure_functions(&d, &d1, &o).unwrap();
        assert!(engel_relations_check(&sf));
        let b = corank_one_b(&d, &o).unwrap();
        let top = dist((1..=3).map(|j| VectorField::coordinate(d.chart().clone(), s.index(1, j))).collect());
        assert!(b.b.same_span(&top));
        assert!(b.b.is_involutive());
        assert!(b.pair_sum(0, 1).unwrap().same_span(&b.b));
        let v = decide_corank_one_involutive(&d, &o).unwrap();
        assert!(v.exists && v.l_witness.is_some());
    }

    #[test]
    fn non_involutive_b_on_r6() {
        let f1 = field(6, &["1", "0", "0", "0", "0", "0"]);
        let f2 = field(6, &["0", "1", "0", "x1", "1/2*x1^2", "x1*x2"]);
        let f3 = field(6, &["0", "0", "1", "0", "0", "0"]);
        let f4 = field(6, &["0", "0", "0", "1", "x1", "x2"]);
        let d = dist(vec![f1, f2, f3, f4]);
        let o = RationalPoint::origin(6);
        let v = decide_corank_one_involutive(&d, &o).unwrap();
        assert_eq!(v.r0, 2);
        assert!(v.char_rank_ok && v.engel_rank_one);
        assert_eq!(v.b_involutive, Some(false));
        assert!(!v.exists && v.l_witness.is_none());
    }

    #[test]
    fn involutive_input_is_rejected() {
        let d = dist(vec![field(3, &["1", "0", "0"]), field(3, &["0", "1", "0"])]);
        assert!(decide_corank_one_involutive(&d, &RationalPoint::origin(3)).is_err());
    }
}
