//! Recognition of contact systems for curves and their extended Kumpera-Ruiz models.

use serde::{Deserialize, Serialize};

use crate::bryant::{characteristic_distribution, decide_corank_one_involutive, engel_rank_le_one, CorankOneSummary};
use crate::contact::jet::{generate_kumpera_ruiz, ProlongationWord};
use crate::contact::reduce::kr_reduce;
use crate::error::{PflError, Result};
use crate::exterior::{Distribution, PfaffianSystem};
use crate::flags::{derived_flag, derived_flag_forms, lie_flag};
use crate::poly::RationalPoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassificationStatus {
    CanonicalEquivalent,
    ExtendedKr,
    Rejected,
}

/// First failing level and the condition that failed there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureReason {
    pub level: Option<usize>,
    pub condition: String,
    pub detail: String,
}

impl FailureReason {
    fn at(level: usize, condition: &str, detail: String) -> Self {
        FailureReason { level: Some(level), condition: condition.into(), detail }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationVerdict {
    pub status: ClassificationStatus,
    pub n: usize,
    pub m: usize,
    pub derived_ranks: Vec<usize>,
    pub derived_ranks_at_base: Vec<usize>,
    pub lie_ranks_at_base: Vec<usize>,
    pub corank_one_witness_per_level: Vec<bool>,
    /// Ranks of the Cartan systems `C(I^(i))`, Pfaffian entry point only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cartan_ranks: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_reason: Option<FailureReason>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<ProlongationWord>,
}

impl ClassificationVerdict {
    pub fn is_regular(&self) -> bool {
        self.lie_ranks_at_base.len() == self.n + 1
            && self.lie_ranks_at_base.iter().enumerate().all(|(i, &r)| r == (i + 1) * self.m + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessMethod {
    /// `L_i = C(D^(i+1))`.
    CharacteristicOfNext,
    /// The corank-one decision procedure on `D^(i)`.
    CorankOneDecision,
    /// `D^(i)` is the whole tangent bundle.
    Automatic,
    /// Pfaffian side: Engel rank one and the Cartan rank of `I^(i)`.
    EngelAndCartan,
}

/// What was computed at one level of the flag.
#[derive(Clone, Debug)]
pub struct LevelEvidence {
    pub level: usize,
    pub method: WitnessMethod,
    pub holds: bool,
    pub witness: Option<Distribution>,
    pub characteristic: Option<Distribution>,
    pub b: Option<Distribution>,
    pub corank_one: Option<CorankOneSummary>,
    pub note: Option<String>,
}

impl LevelEvidence {
    fn new(level: usize, method: WitnessMethod) -> Self {
        LevelEvidence { level, method, holds: false, witness: None, characteristic: None, b: None, corank_one: None, note: None }
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub verdict: ClassificationVerdict,
    pub evidence: Vec<LevelEvidence>,
}

/// `(n, m)` from the rank `m + 1` and the dimension `(n + 1) m + 1`.
fn infer_contact_spec(rank: usize, dim: usize) -> Result<(usize, usize)> {
    if rank < 2 || dim < 1 {
        return Err(PflError::Precondition(format!("rank {rank} on dimension {dim} is not m + 1 with m >= 1")));
    }
    let m = rank - 1;
    if !(dim - 1).is_multiple_of(m) || (dim - 1) / m < 2 {
        return Err(PflError::Precondition(format!("dimension {dim} is not (n + 1) m + 1 for m = {m}, n >= 1")));
    }
    Ok(((dim - 1) / m - 1, m))
}

/// Errors that mean "the condition does not hold here" rather than "the computation broke".
fn soft(e: &PflError) -> bool {
    matches!(e, PflError::NonRegularPoint(_) | PflError::Precondition(_))
}

fn level_witness(flag: &[Distribution], i: usize, n: usize, m: usize, base: &RationalPoint) -> Result<LevelEvidence> {
    if i == n {
        let mut ev = LevelEvidence::new(i, WitnessMethod::Automatic);
        ev.holds = true;
        return Ok(ev);
    }
    if i + 1 == n {
        let mut ev = LevelEvidence::new(i, WitnessMethod::CorankOneDecision);
        match decide_corank_one_involutive(&flag[i], base) {
            Ok(v) => {
                ev.holds = v.exists;
                ev.corank_one = Some(v.summary());
                ev.witness = v.l_witness.clone();
                ev.b = v.b.clone();
                ev.characteristic = Some(v.characteristic);
                if v.r0 == 1 && v.exists {
                    ev.note = Some("r0 = 1: existence only, no witness constructed".into());
                }
            }
            Err(e) if soft(&e) => ev.note = Some(e.to_string()),
            Err(e) => return Err(e),
        }
        return Ok(ev);
    }
    let mut ev = LevelEvidence::new(i, WitnessMethod::CharacteristicOfNext);
    match characteristic_distribution(&flag[i + 1], base) {
        Ok(l) => {
            let want = (i + 1) * m;
            let rank_ok = l.generic_rank() == want && l.rank_at(base)? == want;
            let inside = flag[i].includes(&l);
            let inv = l.is_involutive();
            ev.holds = rank_ok && inside && inv;
            if !ev.holds {
                ev.note = Some(format!(
                    "C(D^({})) has rank {} (want {want}), contained in D^({i}): {inside}, involutive: {inv}",
                    i + 1,
                    l.generic_rank()
                ));
            }
            ev.witness = Some(l.clone());
            ev.characteristic = Some(l);
        }
        Err(e) if soft(&e) => ev.note = Some(e.to_string()),
        Err(e) => return Err(e),
    }
    Ok(ev)
}

#[cfg(feature = "parallel")]
fn all_witnesses(flag: &[Distribution], n: usize, m: usize, base: &RationalPoint) -> Result<Vec<LevelEvidence>> {
    use rayon::prelude::*;
    (0..=n).into_par_iter().map(|i| level_witness(flag, i, n, m, base)).collect()
}

#[cfg(not(feature = "parallel"))]
fn all_witnesses(flag: &[Distribution], n: usize, m: usize, base: &RationalPoint) -> Result<Vec<LevelEvidence>> {
    (0..=n).map(|i| level_witness(flag, i, n, m, base)).collect()
}

/// Classification of a rank `m + 1` distribution on a manifold of dimension `(n + 1) m + 1`.
pub fn classify_contact(d: &Distribution, base: &RationalPoint) -> Result<ClassificationVerdict> {
    Ok(classify_contact_detailed(d, base)?.verdict)
}

pub fn classify_contact_detailed(d: &Distribution, base: &RationalPoint) -> Result<Classification> {
    base.check_dim(d.dim())?;
    let (n, m) = infer_contact_spec(d.generic_rank(), d.dim())?;
    let expected = |i: usize| (i + 1) * m + 1;
    let derived = derived_flag(d, base, Some(n))?;
    let lie = lie_flag(d, base, Some(n))?;
    let mut verdict = ClassificationVerdict {
        status: ClassificationStatus::Rejected,
        n,
        m,
        derived_ranks: derived.report.generic_ranks(),
        derived_ranks_at_base: derived.report.ranks_at_base(),
        lie_ranks_at_base: lie.report.ranks_at_base(),
        corank_one_witness_per_level: Vec::new(),
        cartan_ranks: None,
        failure_reason: None,
        word: None,
    };
    for i in 0..=n {
        let (g, b) = match derived.report.levels.get(i) {
            Some(l) => (l.generic_rank, l.rank_at_base),
            None => {
                let last = derived.report.levels.last().map_or(0, |l| l.generic_rank);
                verdict.failure_reason =
                    Some(FailureReason::at(i, "derived_rank", format!("derived flag stops at rank {last} before level {i}")));
                return Ok(Classification { verdict, evidence: Vec::new() });
            }
        };
        if g != expected(i) {
            verdict.failure_reason =
                Some(FailureReason::at(i, "derived_rank", format!("generic rank {g}, expected {}", expected(i))));
            return Ok(Classification { verdict, evidence: Vec::new() });
        }
        if b != g {
            verdict.failure_reason =
                Some(FailureReason::at(i, "derived_rank_not_constant", format!("rank {b} at base, {g} generically")));
            return Ok(Classification { verdict, evidence: Vec::new() });
        }
    }
    let evidence = all_witnesses(&derived.levels, n, m, base)?;
    verdict.corank_one_witness_per_level = evidence.iter().map(|e| e.holds).collect();
    if let Some(e) = evidence.iter().find(|e| !e.holds) {
        let detail = e.note.clone().unwrap_or_else(|| "no corank-one involutive subdistribution".into());
        verdict.failure_reason = Some(FailureReason::at(e.level, "corank_one_involutive", detail));
        return Ok(Classification { verdict, evidence });
    }
    verdict.status =
        if verdict.is_regular() { ClassificationStatus::CanonicalEquivalent } else { ClassificationStatus::ExtendedKr };
    if d.generators().len() == m + 1 {
        verdict.word = kr_reduce(d.generators(), base).ok().map(|r| r.word);
    }
    Ok(Classification { verdict, evidence })
}

/// Classification of a Pfaffian system of rank `nm` on a manifold of dimension `(n + 1) m + 1`, `m ≠ 2`.
pub fn classify_pfaffian(i: &PfaffianSystem, base: &RationalPoint) -> Result<ClassificationVerdict> {
    Ok(classify_pfaffian_detailed(i, base)?.verdict)
}

pub fn classify_pfaffian_detailed(sys: &PfaffianSystem, base: &RationalPoint) -> Result<Classification> {
    base.check_dim(sys.dim())?;
    let dim = sys.dim();
    let s = sys.generic_rank();
    if s == 0 || s + 1 >= dim || !s.is_multiple_of(dim - 1 - s) {
        return Err(PflError::Precondition(format!("rank {s} on dimension {dim} is not nm with dimension (n + 1) m + 1")));
    }
    let m = dim - 1 - s;
    let n = s / m;
    if m == 2 {
        return Err(PflError::Precondition(
            "m = 2 needs the extra involutivity check; classify the kernel distribution with classify_contact".into(),
        ));
    }
    let forms = derived_flag_forms(sys, base, Some(n))?;
    let d0 = sys.kernel(Some(base))?;
    let lie = lie_flag(&d0, base, Some(n))?;
    let mut verdict = ClassificationVerdict {
        status: ClassificationStatus::Rejected,
        n,
        m,
        derived_ranks: forms.report.generic_ranks(),
        derived_ranks_at_base: forms.report.ranks_at_base(),
        lie_ranks_at_base: lie.report.ranks_at_base(),
        corank_one_witness_per_level: Vec::new(),
        cartan_ranks: None,
        failure_reason: None,
        word: None,
    };
    let reject = |mut v: ClassificationVerdict, r: FailureReason, ev: Vec<LevelEvidence>| {
        v.failure_reason = Some(r);
        Ok(Classification { verdict: v, evidence: ev })
    };
    for k in 0..=n {
        let want = (n - k) * m;
        match forms.report.levels.get(k) {
            Some(l) if l.generic_rank == want && l.rank_at_base == want => {}
            Some(l) => {
                let r = FailureReason::at(
                    k,
                    "derived_rank",
                    format!("rank {} generically, {} at base, expected {want}", l.generic_rank, l.rank_at_base),
                );
                return reject(verdict, r, Vec::new());
            }
            None => return reject(verdict, FailureReason::at(k, "derived_rank", "derived flag stopped early".into()), Vec::new()),
        }
    }
    let mut evidence = Vec::new();
    let mut cartan = Vec::new();
    let mut first_fail: Option<FailureReason> = None;
    for k in 0..n {
        let level = &forms.levels[k];
        let mut ev = LevelEvidence::new(k, WitnessMethod::EngelAndCartan);
        let engel = engel_rank_le_one(level)?;
        let kernel = level.kernel(Some(base))?;
        let want = (n + 1 - k) * m + 1;
        let (cartan_rank, cartan_ok) = match characteristic_distribution(&kernel, base) {
            Ok(c) => {
                let r = dim - c.generic_rank();
                let ok = r == want && dim - c.rank_at(base)? == want;
                ev.characteristic = Some(c);
                (r, ok)
            }
            Err(e) if soft(&e) => {
                ev.note = Some(e.to_string());
                (0, false)
            }
            Err(e) => return Err(e),
        };
        cartan.push(cartan_rank);
        ev.holds = engel && cartan_ok;
        if first_fail.is_none() {
            if !engel {
                first_fail = Some(FailureReason::at(k, "engel_rank", "Engel rank exceeds one".into()));
            } else if !cartan_ok {
                let detail = ev.note.clone().unwrap_or_else(|| format!("Cartan rank {cartan_rank}, expected {want}"));
                first_fail = Some(FailureReason::at(k, "cartan_rank", detail));
            }
        }
        evidence.push(ev);
    }
    verdict.corank_one_witness_per_level = evidence.iter().map(|e| e.holds).collect();
    verdict.cartan_ranks = Some(cartan);
    if let Some(r) = first_fail {
        return reject(verdict, r, evidence);
    }
    verdict.status =
        if verdict.is_regular() { ClassificationStatus::CanonicalEquivalent } else { ClassificationStatus::ExtendedKr };
    Ok(Classification { verdict, evidence })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KrSignature {
    Regular,
    Singular,
}

/// Whether the Lie flag of the generated system has ranks `(i + 1) m + 1` at `base`.
pub fn kr_signature_at_point(word: &ProlongationWord, base: &RationalPoint) -> Result<KrSignature> {
    let d = generate_kumpera_ruiz(word)?;
    let (n, m) = (word.spec.n, word.spec.m);
    let lie = lie_flag(&d, base, Some(n))?;
    let ranks = lie.report.ranks_at_base();
    let full = ranks.len() == n + 1 && ranks.iter().enumerate().all(|(i, &r)| r == (i + 1) * m + 1);
    Ok(if full { KrSignature::Regular } else { KrSignature::Singular })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::jet::{canonical_contact_system, ProlongationLetter};
    use crate::exterior::{annihilator, JetSpec};

    fn origin(s: JetSpec) -> RationalPoint {
        RationalPoint::origin(s.dim())
    }

    #[test]
    fn canonical_small_cases() {
        for (n, m) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
            let s = JetSpec::new(n, m).unwrap();
            let v = classify_contact(&canonical_contact_system(s).unwrap(), &origin(s)).unwrap();
            assert_eq!(v.status, ClassificationStatus::CanonicalEquivalent, "({n},{m})");
            let want: Vec<usize> = (0..=n).map(|i| (i + 1) * m + 1).collect();
            assert_eq!(v.derived_ranks, want);
            assert_eq!(v.lie_ranks_at_base, want);
            assert_eq!(v.word, Some(ProlongationWord::canonical(s)));
        }
    }

    #[test]
    fn singular_word_is_extended() {
        let s = JetSpec::new(2, 2).unwrap();
        let w = ProlongationWord::new(s, vec![ProlongationLetter::parse("S(0,0)").unwrap()]).unwrap();
        let d = generate_kumpera_ruiz(&w).unwrap();
        let v = classify_contact(&d, &origin(s)).unwrap();
        assert_eq!(v.status, ClassificationStatus::ExtendedKr);
        assert_eq!(v.lie_ranks_at_base[2], 6);
        assert_eq!(v.word, Some(w.clone()));
        assert_eq!(kr_signature_at_point(&w, &origin(s)).unwrap(), KrSignature::Singular);
    }

    #[test]
    fn signature_cases() {
        let o = |w: &ProlongationWord| RationalPoint::origin(w.spec.dim());
        let engel = ProlongationWord::parse("S(0)", 1).unwrap();
        assert_eq!(kr_signature_at_point(&engel, &o(&engel)).unwrap(), KrSignature::Regular);
        let all_r = ProlongationWord::parse("R(0,0),R(1,-1)", 2).unwrap();
        assert_eq!(kr_signature_at_point(&all_r, &o(&all_r)).unwrap(), KrSignature::Regular);
        for text in ["R(0),S(0)", "S(0),S(0)"] {
            let w = ProlongationWord::parse(text, 1).unwrap();
            assert_eq!(kr_signature_at_point(&w, &o(&w)).unwrap(), KrSignature::Singular, "{text}");
            let v = classify_contact(&generate_kumpera_ruiz(&w).unwrap(), &o(&w)).unwrap();
            assert_eq!(v.status, ClassificationStatus::ExtendedKr, "{text}");
        }
    }

    #[test]
    fn bad_dimension_is_an_error() {
        let s = JetSpec::new(1, 2).unwrap();
        let d = canonical_contact_system(s).unwrap();
        let mut gens = d.generators().to_vec();
        gens.push(crate::exterior::VectorField::coordinate(d.chart().clone(), 1));
        let extra = Distribution::new(d.chart().clone(), gens).unwrap();
        assert_eq!(extra.generic_rank(), 4);
        assert!(matches!(classify_contact(&extra, &origin(s)), Err(PflError::Precondition(_))));
    }

    #[test]
    fn pfaffian_canonical_and_m2_guard() {
        let s = JetSpec::new(3, 1).unwrap();
        let o = origin(s);
        let i = annihilator(&canonical_contact_system(s).unwrap(), &o).unwrap().system;
        let v = classify_pfaffian(&i, &o).unwrap();
        assert_eq!(v.status, ClassificationStatus::CanonicalEquivalent);
        assert_eq!(v.derived_ranks, vec![3, 2, 1, 0]);
        assert_eq!(v.cartan_ranks, Some(vec![5, 4, 3]));
        let s2 = JetSpec::new(1, 2).unwrap();
        let i2 = annihilator(&canonical_contact_system(s2).unwrap(), &origin(s2)).unwrap().system;
        assert!(classify_pfaffian(&i2, &origin(s2)).is_err());
    }

    #[test]
    fn involutive_rank_two_is_rejected() {
        let s = JetSpec::new(1, 1).unwrap();
        let c = canonical_contact_system(s).unwrap();
        let flat = Distribution::new(
            c.chart().clone(),
            vec![
                crate::exterior::VectorField::coordinate(c.chart().clone(), 0),
                crate::exterior::VectorField::coordinate(c.chart().clone(), 1),
            ],
        )
        .unwrap();
        let v = classify_contact(&flat, &origin(s)).unwrap();
        assert_eq!(v.status, ClassificationStatus::Rejected);
        assert_eq!(v.failure_reason.unwrap().condition, "derived_rank");
    }
}
