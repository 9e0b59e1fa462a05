//! Seeded random instances: triangular automorphisms, words, remixes and small non-holonomic
//! distributions with prescribed first-derived growth.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::contact::jet::{LetterKind, ProlongationLetter, ProlongationWord};
use crate::error::Result;
use crate::exterior::{pushforward, Chart, ChartRef, DiffeoPair, Distribution, JetSpec, VectorField};
use crate::flags::derived_flag;
use crate::poly::linalg::{determinant, RatMatrix};
use crate::poly::rational::{rat, ratio};
use crate::poly::{Polynomial, Rational, RationalPoint};

fn nonzero_int<R: Rng>(rng: &mut R, bound: i64) -> i64 {
    let v = rng.gen_range(1..=bound);
    if rng.gen_bool(0.5) {
        -v
    } else {
        v
    }
}

/// `p/q` with `|p|, |q| ≤ bound`.
pub fn random_rational<R: Rng>(rng: &mut R, bound: i64) -> Rational {
    ratio(rng.gen_range(-bound..=bound), rng.gen_range(1..=bound))
}

fn random_monomial<R: Rng>(rng: &mut R, n: usize, vars: &[usize], max_deg: u32) -> Vec<u32> {
    let mut e = vec![0u32; n];
    let deg = rng.gen_range(1..=max_deg);
    for _ in 0..deg {
        e[*vars.choose(rng).expect("nonempty variable set")] += 1;
    }
    e
}

/// `x_k ↦ x_k + c·x^α` with `α` supported on coordinates before `k`.
fn elementary<R: Rng>(rng: &mut R, chart: &ChartRef, k: usize, max_deg: u32) -> Result<DiffeoPair> {
    let n = chart.dim();
    let lower: Vec<usize> = (0..k).collect();
    let c = rat(nonzero_int(rng, 3));
    let bump = Polynomial::monomial(c, random_monomial(rng, n, &lower, max_deg));
    let mut fwd: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(n, i)).collect();
    let mut bwd = fwd.clone();
    fwd[k] = &fwd[k] + &bump;
    bwd[k] = &bwd[k] - &bump;
    DiffeoPair::new(chart.clone(), fwd, bwd)
}

/// A composition of elementary triangular maps, a diagonal scaling and a translation.
pub fn random_triangular_diffeo<R: Rng>(rng: &mut R, chart: &ChartRef, steps: usize, max_deg: u32) -> Result<DiffeoPair> {
    let n = chart.dim();
    let mut phi = DiffeoPair::identity(chart.clone());
    for _ in 0..steps {
        if n < 2 {
            break;
        }
        let k = rng.gen_range(1..n);
        phi = elementary(rng, chart, k, max_deg)?.compose(&phi)?;
    }
    let mut fwd = Vec::with_capacity(n);
    let mut bwd = Vec::with_capacity(n);
    for i in 0..n {
        let s = rat(nonzero_int(rng, 2));
        let t = rat(rng.gen_range(-2..=2));
        let x = Polynomial::var(n, i);
        fwd.push(&x.scale(&s) + &Polynomial::constant(n, t.clone()));
        bwd.push((&x - &Polynomial::constant(n, t)).scale(&(rat(1) / s)));
    }
    DiffeoPair::new(chart.clone(), fwd, bwd)?.compose(&phi)
}

pub fn random_letter<R: Rng>(rng: &mut R, m: usize, bound: i64) -> ProlongationLetter {
    let singular = rng.gen_bool(0.4);
    let mut c: Vec<Rational> = (0..m).map(|_| random_rational(rng, bound)).collect();
    if singular {
        c[m - 1] = Rational::zero();
    }
    let kind = if singular { LetterKind::S } else { LetterKind::R };
    ProlongationLetter::new(kind, c).expect("c_m is zero for singular letters")
}

/// A word of `n − 1` random letters with parameters `p/q`, `|p|, |q| ≤ bound`.
pub fn random_word<R: Rng>(rng: &mut R, spec: JetSpec, bound: i64) -> ProlongationWord {
    let letters = (1..spec.n).map(|_| random_letter(rng, spec.m, bound)).collect();
    ProlongationWord::new(spec, letters).expect("one letter per level above the first")
}

/// An invertible `(m+1) × (m+1)` matrix with `Λ_i0 = 0` for `i ≥ 1`.
pub fn random_admissible_remix<R: Rng>(rng: &mut R, m: usize, bound: i64) -> RatMatrix {
    loop {
        let mut l: RatMatrix = (0..=m).map(|_| (0..=m).map(|_| random_rational(rng, bound)).collect()).collect();
        for row in l.iter_mut().skip(1) {
            row[0] = Rational::zero();
        }
        if !determinant(&l).is_zero() {
            return l;
        }
    }
}

/// An invertible constant matrix of the given size with small integer entries.
pub fn random_invertible<R: Rng>(rng: &mut R, size: usize, bound: i64) -> RatMatrix {
    loop {
        let l: RatMatrix = (0..size).map(|_| (0..size).map(|_| rat(rng.gen_range(-bound..=bound))).collect()).collect();
        if !determinant(&l).is_zero() {
            return l;
        }
    }
}

/// Generators `Σ_j Λ_ij f_j`.
pub fn remix_generators(fields: &[VectorField], lambda: &RatMatrix) -> Vec<VectorField> {
    lambda
        .iter()
        .map(|row| {
            let mut v = VectorField::zero(fields[0].chart().clone());
            for (c, f) in row.iter().zip(fields) {
                if !c.is_zero() {
                    v = v.add(&f.scale(c));
                }
            }
            v
        })
        .collect()
}

/// One member of the randomized corpus of small distributions.
#[derive(Clone, Debug)]
pub struct CorpusInstance {
    pub distribution: Distribution,
    pub base: RationalPoint,
    pub d0: usize,
    pub r0: usize,
    /// Built with a common factor in all brackets, so the Engel rank is expected to be one.
    pub structured: bool,
}

/// Fields `∂_{x_i} + Σ_k a_ik ∂_{y_k} + Σ_l b_il(x_i) ∂_{z_l}` on `R^{d0 + r0 + extra}`.
///
/// In the structured variant every nonzero `a_ik` is a multiple of the same coordinate `x_p`,
/// so each `dω` shares the factor `dx_p`.
fn corpus_candidate<R: Rng>(rng: &mut R, d0: usize, r0: usize, extra: usize, structured: bool) -> Result<Distribution> {
    let n = d0 + r0 + extra;
    let chart = Chart::generic(n);
    let xs: Vec<usize> = (0..d0).collect();
    let mut comps: Vec<Vec<Polynomial>> = (0..d0)
        .map(|i| {
            let mut c = vec![Polynomial::zero(n); n];
            c[i] = Polynomial::one(n);
            c
        })
        .collect();
    if structured {
        let p = rng.gen_range(0..d0);
        let mut others: Vec<usize> = (0..d0).filter(|&i| i != p).collect();
        others.shuffle(rng);
        for (k, &i) in others.iter().take(r0).enumerate() {
            let c = rat(nonzero_int(rng, 3));
            comps[i][d0 + k] = Polynomial::var(n, p).scale(&c);
        }
        // Lower-order noise that does not change the bracket pattern.
        for _ in 0..rng.gen_range(0..=2) {
            let i = rng.gen_range(0..d0);
            let k = rng.gen_range(0..r0);
            let c = rat(nonzero_int(rng, 3));
            comps[i][d0 + k] = &comps[i][d0 + k] + &Polynomial::var(n, i).pow(2).scale(&c);
        }
    } else {
        for _ in 0..rng.gen_range(r0..=2 * r0 + 2) {
            let i = rng.gen_range(0..d0);
            let k = rng.gen_range(0..r0);
            let c = rat(nonzero_int(rng, 3));
            let mono = Polynomial::monomial(c, random_monomial(rng, n, &xs, 2));
            comps[i][d0 + k] = &comps[i][d0 + k] + &mono;
        }
    }
    for l in 0..extra {
        let i = rng.gen_range(0..d0);
        let c = rat(nonzero_int(rng, 2));
        let e = rng.gen_range(1..=2);
        comps[i][d0 + r0 + l] = &comps[i][d0 + r0 + l] + &Polynomial::var(n, i).pow(e).scale(&c);
    }
    let gens = comps.into_iter().map(|c| VectorField::new(chart.clone(), c)).collect::<Result<Vec<_>>>()?;
    Distribution::new(chart, gens)
}

/// Constant-rank instances with `d0 ∈ 4..=6`, `r0 ∈ 1..=3` and dimension at most 9.
///
/// Candidates whose first derived system has the wrong growth or drops rank at the base are
/// discarded. About half the instances are pushed forward by a random triangular automorphism.
pub fn engel_corpus<R: Rng>(rng: &mut R, count: usize) -> Result<Vec<CorpusInstance>> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let d0 = rng.gen_range(4..=6);
        let r0 = rng.gen_range(1..=3);
        let room = 9 - d0 - r0;
        let extra = if room > 0 { rng.gen_range(0..=room.min(2)) } else { 0 };
        let structured = rng.gen_bool(0.5);
        let d = corpus_candidate(rng, d0, r0, extra, structured)?;
        let origin = RationalPoint::origin(d.dim());
        let flag = derived_flag(&d, &origin, Some(1))?;
        let ranks = flag.report.generic_ranks();
        if ranks.len() < 2 || ranks[1] != d0 + r0 || !flag.report.regular {
            continue;
        }
        let (distribution, base) = if rng.gen_bool(0.5) {
            let phi = random_triangular_diffeo(rng, d.chart(), 2, 2)?;
            (pushforward(&d, &phi)?, phi.map_point(&origin)?)
        } else {
            (d, origin)
        };
        out.push(CorpusInstance { distribution, base, d0, r0, structured });
    }
    Ok(out)
}
