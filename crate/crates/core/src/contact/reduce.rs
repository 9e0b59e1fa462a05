//! Recovering the prolongation word of a family given in iterated Weber form.
//!
//! Families are handled drift-first internally: index 0 is the drift, index `j` the
//! `j`-th top-order field. The public entry point takes `(ζ_1, ..., ζ_m, ζ_0)`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::jet::{prolong, KrFamily, LetterKind, ProlongationLetter, ProlongationWord};
use crate::error::{PflError, Result};
use crate::exterior::{JetSpec, VectorField};
use crate::poly::linalg::{determinant, identity, mat_mul, RatMatrix};
use crate::poly::ratfunc::compose_rational;
use crate::poly::{Polynomial, RatFunc, Rational, RationalPoint};

/// Frame-change matrix `μ^k` between an extracted family and the normal form at level `k`.
#[derive(Clone, Debug)]
pub struct MuMatrix {
    pub level: usize,
    pub entries: Vec<Vec<RatFunc>>,
    pub base_point: RationalPoint,
}

impl MuMatrix {
    /// Values at the (centred) base point.
    pub fn at_base(&self) -> Result<RatMatrix> {
        let nv = self.entries[0][0].nvars();
        let zero = vec![Rational::zero(); nv];
        self.entries.iter().map(|r| r.iter().map(|f| f.evaluate(&zero)).collect()).collect()
    }

    pub fn is_constant(&self) -> bool {
        self.entries.iter().flatten().all(|f| f.num.is_constant() && f.den.is_constant())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub level: usize,
    pub letter: ProlongationLetter,
    /// One-based pair of columns exchanged to make `μ_0m(0)` nonzero.
    pub swap: Option<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct KrReduction {
    pub word: ProlongationWord,
    pub steps: Vec<ReductionStep>,
    /// `μ^0, ..., μ^n`.
    pub mu_chain: Vec<MuMatrix>,
    /// Components of `φ^n` in coordinates centred at the base point.
    pub phi: Vec<RatFunc>,
}

type Family = Vec<Vec<Polynomial>>;

struct WeberLevel {
    fields: Family,
    nu: Vec<Vec<RatFunc>>,
    drift: Vec<Polynomial>,
}

fn spec_for(family: &[VectorField]) -> Result<JetSpec> {
    if family.len() < 2 {
        return Err(PflError::Precondition("a family needs at least two fields".into()));
    }
    let m = family.len() - 1;
    let dim = family[0].dim();
    if dim < 1 || !(dim - 1).is_multiple_of(m) || (dim - 1) / m < 2 {
        return Err(PflError::Precondition(format!("dimension {dim} is not (n+1)m+1 with m = {m}, n >= 1")));
    }
    JetSpec::new((dim - 1) / m - 1, m)
}

fn level_spec(m: usize, k: usize) -> JetSpec {
    JetSpec { n: k, m }
}

fn nonzero_at_origin(p: &Polynomial) -> bool {
    !p.constant_term().is_zero()
}

/// Split `F^k = ν · (w, ∂/∂y_1^k, ..., ∂/∂y_m^k)` and read off the next family from `w`.
fn weber_split(m: usize, k: usize, fields: &Family) -> Result<(WeberLevel, Family)> {
    let spec = level_spec(m, k);
    let nv = spec.dim();
    let tops: Vec<usize> = (1..=m).map(|j| spec.index(k, j)).collect();
    let lower: Family = fields
        .iter()
        .map(|f| f.iter().enumerate().map(|(s, p)| if tops.contains(&s) { Polynomial::zero(nv) } else { p.clone() }).collect())
        .collect();
    let bad = |reason: String| PflError::NotWeberForm { level: k, reason };
    let p = (0..=m)
        .find(|&i| lower[i].iter().any(nonzero_at_origin))
        .ok_or_else(|| bad("no generator has a lower-order component at the base point".into()))?;
    let w = lower[p].clone();
    let t = w.iter().position(nonzero_at_origin).unwrap();
    let mut nu = Vec::with_capacity(m + 1);
    for (i, l) in lower.iter().enumerate() {
        for s in 0..nv {
            if &l[s] * &w[t] != &w[s] * &l[t] {
                return Err(bad(format!("lower-order parts of generators {p} and {i} are not proportional")));
            }
        }
        let mut row = vec![RatFunc::new(l[t].clone(), w[t].clone())?];
        row.extend(tops.iter().map(|&s| RatFunc::from_poly(fields[i][s].clone())));
        nu.push(row);
    }
    let zero = vec![Rational::zero(); nv];
    let nu0: RatMatrix = nu.iter().map(|r| r.iter().map(|f| f.evaluate(&zero)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
    if determinant(&nu0).is_zero() {
        return Err(bad("the generators do not span the top-order directions at the base point".into()));
    }
    let low_dim = level_spec(m, k - 1).dim();
    let mut next: Family = vec![Vec::with_capacity(low_dim); m + 1];
    for (s, ws) in w.iter().enumerate().take(low_dim) {
        let parts = ws.split_degree_in(&tops);
        if parts.keys().any(|&d| d > 1) {
            return Err(bad(format!("drift component {s} is not affine in the top-order variables")));
        }
        let constant = parts.get(&0).cloned().unwrap_or_else(|| Polynomial::zero(nv));
        let linear = parts.get(&1).cloned().unwrap_or_else(|| Polynomial::zero(nv));
        let lowered = |q: &Polynomial| q.with_nvars(low_dim).map_err(|_| bad(format!("drift component {s} has coefficients depending on top-order variables")));
        next[0].push(lowered(&constant)?);
        for (j, &y) in tops.iter().enumerate() {
            next[j + 1].push(lowered(&linear.deriv(y))?);
        }
    }
    Ok((WeberLevel { fields: fields.clone(), nu, drift: w }, next))
}

fn lie_rat(field: &[Polynomial], f: &RatFunc) -> RatFunc {
    let nv = f.nvars();
    let mut out = RatFunc::zero(nv);
    for (s, a) in field.iter().enumerate() {
        if a.is_zero() || (!f.num.depends_on(s) && !f.den.depends_on(s)) {
            continue;
        }
        out = out.add(&f.deriv(s).mul_poly(a));
    }
    out
}

fn lift_rat(f: &RatFunc, nv: usize) -> RatFunc {
    f.with_nvars(nv).expect("growing the variable count")
}

fn mat_mul_rat(a: &[Vec<RatFunc>], b: &[Vec<RatFunc>]) -> Vec<Vec<RatFunc>> {
    let nv = a[0][0].nvars();
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| {
                    let mut s = RatFunc::zero(nv);
                    for (l, x) in row.iter().enumerate() {
                        if !x.is_zero() && !b[l][j].is_zero() {
                            s = s.add(&x.mul(&b[l][j]));
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Check `Dφ · F_i = Σ_j μ_ij (κ_j ∘ φ)` componentwise.
fn verify(level: usize, fields: &Family, mu: &[Vec<RatFunc>], kappa: &Family, phi: &[RatFunc]) -> Result<()> {
    let nv = phi.len();
    let composed: Vec<Vec<RatFunc>> =
        kappa.iter().map(|k| k.iter().map(|p| compose_rational(p, phi)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
    for (i, f) in fields.iter().enumerate() {
        for t in 0..nv {
            let lhs = lie_rat(f, &phi[t]);
            let mut rhs = RatFunc::zero(nv);
            for (j, kj) in composed.iter().enumerate() {
                if !mu[i][j].is_zero() && !kj[t].is_zero() {
                    rhs = rhs.add(&mu[i][j].mul(&kj[t]));
                }
            }
            if !lhs.equals(&rhs) {
                return Err(PflError::Internal(format!("frame relation fails at level {level}, generator {i}, coordinate {t}")));
            }
        }
    }
    Ok(())
}

fn family_comps(f: &KrFamily) -> Family {
    f.fields.iter().map(|v| v.components().to_vec()).collect()
}

/// Recover the prolongation word of a family `(ζ_1, ..., ζ_m, ζ_0)` in iterated Weber form.
pub fn kr_reduce(family: &[VectorField], base: &RationalPoint) -> Result<KrReduction> {
    let spec = spec_for(family)?;
    let (n, m) = (spec.n, spec.m);
    let dim = spec.dim();
    base.check_dim(dim)?;
    let shift: Vec<Polynomial> =
        (0..dim).map(|i| &Polynomial::var(dim, i) + &Polynomial::constant(dim, base.coords()[i].clone())).collect();
    let centre = |p: &Polynomial| if base.is_origin() { p.clone() } else { p.compose_unchecked(&shift, dim) };
    let mut top: Family = vec![family[m].components().iter().map(centre).collect()];
    for f in &family[..m] {
        top.push(f.components().iter().map(centre).collect());
    }

    let mut levels: Vec<WeberLevel> = Vec::with_capacity(n);
    let mut cur = top;
    for k in (1..=n).rev() {
        let (lvl, next) = weber_split(m, k, &cur)?;
        levels.push(lvl);
        cur = next;
    }
    levels.reverse();

    // Level 0: a shear `x_j^0 = y_j^0 - a_j y_0^0` killing the drift's other directions at 0,
    // after exchanging `y_0^0` with another coordinate if the drift has no `y_0^0` part.
    let z: Vec<Vec<Polynomial>> = cur;
    let z0: RatMatrix = z.iter().map(|r| r.iter().map(|p| p.constant_term()).collect()).collect();
    if determinant(&z0).is_zero() {
        return Err(PflError::Precondition("μ^0 is singular at the base point".into()));
    }
    let mut pt = identity(m + 1);
    if z0[0][0].is_zero() {
        let j = (1..=m).find(|&j| !z0[0][j].is_zero()).unwrap();
        pt.swap(0, j);
    }
    let z1 = mat_mul(&z0, &pt);
    let mut shear = identity(m + 1);
    for j in 1..=m {
        shear[0][j] = -(&z1[0][j] / &z1[0][0]);
    }
    let pt = mat_mul(&pt, &shear);
    let n0 = m + 1;
    let phi0: Vec<RatFunc> = (0..n0)
        .map(|t| {
            let mut p = Polynomial::zero(n0);
            for s in 0..n0 {
                if !pt[s][t].is_zero() {
                    p = &p + &Polynomial::var(n0, s).scale(&pt[s][t]);
                }
            }
            RatFunc::from_poly(p)
        })
        .collect();
    let mu0: Vec<Vec<RatFunc>> = z
        .iter()
        .map(|row| {
            (0..n0)
                .map(|j| {
                    let mut p = Polynomial::zero(n0);
                    for s in 0..n0 {
                        if !pt[s][j].is_zero() {
                            p = &p + &row[s].scale(&pt[s][j]);
                        }
                    }
                    RatFunc::from_poly(p)
                })
                .collect()
        })
        .collect();
    let kappa0: Family = (0..n0).map(|j| (0..n0).map(|s| if s == j { Polynomial::one(n0) } else { Polynomial::zero(n0) }).collect()).collect();
    verify(0, &z, &mu0, &kappa0, &phi0)?;

    let mut mu_chain = vec![MuMatrix { level: 0, entries: mu0, base_point: base.clone() }];
    let mut phi = phi0;
    let mut kappa: Option<KrFamily> = None;
    let mut steps = Vec::new();
    let mut letters = Vec::new();

    for k in 1..=n {
        let lspec = level_spec(m, k);
        let nv = lspec.dim();
        let y = |i: usize| Polynomial::var(nv, lspec.index(k, i));
        let mut mu: Vec<Vec<RatFunc>> = mu_chain.last().unwrap().entries.iter().map(|r| r.iter().map(|f| lift_rat(f, nv)).collect()).collect();
        let mu_at = mu_chain.last().unwrap().at_base()?;
        let mut swap = None;
        let regular = !mu_at[0][0].is_zero();
        // Column used as the denominator of the completion.
        let pivot_col = if regular {
            0
        } else {
            let i = (1..=m).rev().find(|&i| !mu_at[0][i].is_zero()).ok_or_else(|| PflError::Precondition(format!("μ^{} is singular at the base point", k - 1)))?;
            if i != m {
                for row in mu.iter_mut() {
                    row.swap(i, m);
                }
                swap = Some((i, m));
            }
            m
        };
        let mu_at: RatMatrix = {
            let zero = vec![Rational::zero(); nv];
            mu.iter().map(|r| r.iter().map(|f| f.evaluate(&zero)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?
        };
        let column = |j: usize| {
            let mut s = mu[0][j].clone();
            for i in 1..=m {
                if !mu[i][j].is_zero() {
                    s = s.add(&mu[i][j].mul_poly(&y(i)));
                }
            }
            s
        };
        let den = column(pivot_col);
        let c: Vec<Rational> = (1..=m)
            .map(|j| if !regular && j == m { Rational::zero() } else { &mu_at[0][j] / &mu_at[0][pivot_col] })
            .collect();
        let mut new_phi = Vec::with_capacity(m);
        for j in 1..=m {
            let num_col = if !regular && j == m { 0 } else { j };
            let mut f = column(num_col).div(&den)?;
            if regular || j < m {
                f = f.sub(&RatFunc::constant(nv, c[j - 1].clone()));
            }
            new_phi.push(f);
        }
        let letter = ProlongationLetter::new(if regular { LetterKind::R } else { LetterKind::S }, c)?;
        let next_kappa = match &kappa {
            None => {
                if !regular || letter.c.iter().any(|x| !x.is_zero()) {
                    return Err(PflError::Internal("level-one step did not reach the first-order frame".into()));
                }
                KrFamily::first_order(m)?
            }
            Some(prev) => {
                let mut prev = prev.clone();
                if let Some((i, j)) = swap {
                    prev.fields.swap(i, j);
                }
                steps.push(ReductionStep { level: k, letter: letter.clone(), swap });
                letters.push(letter);
                prolong(&prev, letters.last().unwrap())?
            }
        };
        let mut full_phi: Vec<RatFunc> = phi.iter().map(|f| lift_rat(f, nv)).collect();
        full_phi.extend(new_phi);

        let lvl = &levels[k - 1];
        let mut tilde = vec![vec![RatFunc::zero(nv); m + 1]; m + 1];
        tilde[0][0] = den;
        for j in 1..=m {
            let pj = &full_phi[lspec.index(k, j)];
            tilde[0][j] = lie_rat(&lvl.drift, pj);
            for i in 1..=m {
                tilde[i][j] = pj.deriv(lspec.index(k, i));
            }
        }
        let mu_k = mat_mul_rat(&lvl.nu, &tilde);
        verify(k, &lvl.fields, &mu_k, &family_comps(&next_kappa), &full_phi)?;
        let entry = MuMatrix { level: k, entries: mu_k, base_point: base.clone() };
        if determinant(&entry.at_base()?).is_zero() {
            return Err(PflError::Precondition(format!("μ^{k} is singular at the base point")));
        }
        mu_chain.push(entry);
        phi = full_phi;
        kappa = Some(next_kappa);
    }

    Ok(KrReduction { word: ProlongationWord::new(spec, letters)?, steps, mu_chain, phi })
}

/// Combine generators `(κ_1, ..., κ_m, κ_0)` with a constant matrix indexed drift-first
/// (row and column 0 refer to the drift); returns the new family in the same order.
pub fn remix(ordered: &[VectorField], lambda: &RatMatrix) -> Result<Vec<VectorField>> {
    let m = ordered.len() - 1;
    if lambda.len() != m + 1 || lambda.iter().any(|r| r.len() != m + 1) {
        return Err(PflError::Shape("remix matrix must be (m+1)x(m+1)".into()));
    }
    let drift_first = |j: usize| if j == 0 { &ordered[m] } else { &ordered[j - 1] };
    let row = |i: usize| {
        let mut v = VectorField::zero(ordered[0].chart().clone());
        for (j, a) in lambda[i].iter().enumerate() {
            if !a.is_zero() {
                v = v.add(&drift_first(j).scale(a));
            }
        }
        v
    };
    let mut out: Vec<VectorField> = (1..=m).map(row).collect();
    out.push(row(0));
    Ok(out)
}

/// A remix is admissible when it is invertible and keeps the top-order fields among themselves.
pub fn is_admissible_remix(lambda: &RatMatrix) -> bool {
    lambda.iter().skip(1).all(|r| r[0].is_zero()) && !determinant(lambda).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::jet::{canonical_family, kr_family};
    use crate::poly::rational::{rat, ratio};

    fn word(s: &str, n: usize, m: usize) -> ProlongationWord {
        let w = ProlongationWord::parse(s, m).unwrap();
        assert_eq!(w.spec.n, n);
        w
    }

    #[test]
    fn canonical_is_fixed_point() {
        let spec = JetSpec::new(3, 2).unwrap();
        let fam = canonical_family(spec).unwrap();
        let r = kr_reduce(&fam.ordered(), &RationalPoint::origin(spec.dim())).unwrap();
        assert_eq!(r.word, ProlongationWord::canonical(spec));
        for mu in &r.mu_chain {
            let v = mu.at_base().unwrap();
            for (i, row) in v.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    assert_eq!(*x, if i == j { rat(1) } else { rat(0) });
                }
            }
        }
    }

    #[test]
    fn singular_letter_detected() {
        let w = word("S(0,0)", 2, 2);
        let fam = kr_family(&w).unwrap();
        let r = kr_reduce(&fam.ordered(), &RationalPoint::origin(7)).unwrap();
        assert_eq!(r.word, w);
        assert_eq!(r.steps[0].swap, None);
    }

    #[test]
    fn remixed_round_trip() {
        let w = word("R(1,2),S(3,0)", 3, 2);
        let fam = kr_family(&w).unwrap();
        let lambda = vec![vec![rat(2), rat(-1), rat(3)], vec![rat(0), rat(1), rat(1)], vec![rat(0), ratio(1, 2), rat(-1)]];
        assert!(is_admissible_remix(&lambda));
        let mixed = remix(&fam.ordered(), &lambda).unwrap();
        let r = kr_reduce(&mixed, &RationalPoint::origin(fam.spec.dim())).unwrap();
        assert_eq!(r.word, w);
        assert!(r.mu_chain.iter().all(|mu| mu.is_constant()));
    }

    #[test]
    fn non_weber_rejected() {
        let spec = JetSpec::new(2, 1).unwrap();
        let fam = canonical_family(spec).unwrap();
        let mut gens = fam.ordered();
        let nv = spec.dim();
        let bad = gens[1].add(&VectorField::coordinate(gens[1].chart().clone(), 0).mul_poly(&Polynomial::var(nv, spec.index(2, 1)).pow(2)));
        gens[1] = bad;
        match kr_reduce(&gens, &RationalPoint::origin(nv)) {
            Err(PflError::NotWeberForm { level: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
