use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{PflError, Result};
use crate::exterior::{Chart, ChartRef, Distribution, JetSpec, VectorField};
use crate::poly::rational::{format_rational, parse_rational};
use crate::poly::{Polynomial, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LetterKind {
    R,
    S,
}

/// One prolongation step with its constants `c_1..c_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProlongationLetter {
    pub kind: LetterKind,
    pub c: Vec<Rational>,
}

impl ProlongationLetter {
    pub fn new(kind: LetterKind, c: Vec<Rational>) -> Result<Self> {
        if c.is_empty() {
            return Err(PflError::Parse("a letter needs at least one constant".into()));
        }
        if kind == LetterKind::S && !c.last().unwrap().is_zero() {
            return Err(PflError::Precondition("a singular letter must have c_m = 0".into()));
        }
        Ok(ProlongationLetter { kind, c })
    }

    pub fn regular_zero(m: usize) -> Self {
        ProlongationLetter { kind: LetterKind::R, c: vec![Rational::zero(); m] }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let (kind, rest) = match t.chars().next() {
            Some('R') => (LetterKind::R, &t[1..]),
            Some('S') => (LetterKind::S, &t[1..]),
            _ => return Err(PflError::Parse(format!("letter must start with R or S: `{t}`"))),
        };
        let inner = rest
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| PflError::Parse(format!("expected parenthesised constants in `{t}`")))?;
        let c = inner.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
        ProlongationLetter::new(kind, c)
    }
}

impl fmt::Display for ProlongationLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            LetterKind::R => "R",
            LetterKind::S => "S",
        };
        let c: Vec<String> = self.c.iter().map(format_rational).collect();
        write!(f, "{k}({})", c.join(","))
    }
}

impl Serialize for ProlongationLetter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ProlongationLetter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ProlongationLetter::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// `σ_2, ..., σ_n` applied to the first-order frame.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ProlongationWord {
    pub spec: JetSpec,
    pub letters: Vec<ProlongationLetter>,
}

impl ProlongationWord {
    pub fn new(spec: JetSpec, letters: Vec<ProlongationLetter>) -> Result<Self> {
        if spec.n == 0 {
            return Err(PflError::Precondition("jet order must be at least 1".into()));
        }
        if letters.len() != spec.n - 1 {
            return Err(PflError::Precondition(format!(
                "order {} needs {} letters, got {}",
                spec.n,
                spec.n - 1,
                letters.len()
            )));
        }
        if let Some(l) = letters.iter().find(|l| l.c.len() != spec.m) {
            return Err(PflError::Precondition(format!("letter {l} does not have {} constants", spec.m)));
        }
        Ok(ProlongationWord { spec, letters })
    }

    pub fn canonical(spec: JetSpec) -> Self {
        ProlongationWord { spec, letters: vec![ProlongationLetter::regular_zero(spec.m); spec.n.saturating_sub(1)] }
    }

    /// Comma separated letters, e.g. `R(1,2),S(3,0)`; the order is inferred from the length.
    pub fn parse(s: &str, m: usize) -> Result<Self> {
        let mut letters = Vec::new();
        let mut depth = 0i32;
        let mut start = 0;
        let t = s.trim();
        for (i, ch) in t.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    letters.push(ProlongationLetter::parse(&t[start..i])?);
                    start = i + 1;
                }
                _ => {}
            }
        }
        if !t[start..].trim().is_empty() {
            letters.push(ProlongationLetter::parse(&t[start..])?);
        }
        ProlongationWord::new(JetSpec::new(letters.len() + 1, m)?, letters)
    }

    pub fn has_singular(&self) -> bool {
        self.letters.iter().any(|l| l.kind == LetterKind::S)
    }
}

impl<'de> Deserialize<'de> for ProlongationWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            spec: JetSpec,
            letters: Vec<ProlongationLetter>,
        }
        let r = Raw::deserialize(d)?;
        ProlongationWord::new(r.spec, r.letters).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for ProlongationWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", v.join(","))
    }
}

/// An extended Kumpera-Ruiz family on `J^n`: `fields[0]` is the drift `κ_0`, `fields[j]` is `κ_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrFamily {
    pub spec: JetSpec,
    pub fields: Vec<VectorField>,
}

impl KrFamily {
    pub fn chart(&self) -> &ChartRef {
        self.fields[0].chart()
    }

    /// Generators in the order `(κ_1, ..., κ_m, κ_0)`.
    pub fn ordered(&self) -> Vec<VectorField> {
        let mut v: Vec<VectorField> = self.fields[1..].to_vec();
        v.push(self.fields[0].clone());
        v
    }

    pub fn distribution(&self) -> Distribution {
        Distribution::new(self.chart().clone(), self.ordered()).expect("fields share the chart")
    }

    /// The first-order frame `κ_j = ∂/∂x_j^1`, `κ_0 = ∂/∂x_0 + Σ x_j^1 ∂/∂x_j^0`.
    pub fn first_order(m: usize) -> Result<Self> {
        let spec = JetSpec::new(1, m)?;
        let chart = Chart::jet(spec);
        let n = chart.dim();
        let mut drift = vec![Polynomial::zero(n); n];
        drift[0] = Polynomial::one(n);
        for j in 1..=m {
            drift[spec.index(0, j)] = Polynomial::var(n, spec.index(1, j));
        }
        let mut fields = vec![VectorField::from_parts(chart.clone(), drift)];
        for j in 1..=m {
            fields.push(VectorField::coordinate(chart.clone(), spec.index(1, j)));
        }
        Ok(KrFamily { spec, fields })
    }
}

/// The contact distribution on `J^n(R, R^m)`, generators `(∂/∂x_1^n, ..., ∂/∂x_m^n, κ_0)`.
pub fn canonical_contact_system(spec: JetSpec) -> Result<Distribution> {
    Ok(canonical_family(spec)?.distribution())
}

pub fn canonical_family(spec: JetSpec) -> Result<KrFamily> {
    if spec.n == 0 {
        return Err(PflError::Precondition("jet order must be at least 1".into()));
    }
    let chart = Chart::jet(spec);
    let n = chart.dim();
    let mut drift = vec![Polynomial::zero(n); n];
    drift[0] = Polynomial::one(n);
    for i in 0..spec.n {
        for j in 1..=spec.m {
            drift[spec.index(i, j)] = Polynomial::var(n, spec.index(i + 1, j));
        }
    }
    let mut fields = vec![VectorField::from_parts(chart.clone(), drift)];
    for j in 1..=spec.m {
        fields.push(VectorField::coordinate(chart.clone(), spec.index(spec.n, j)));
    }
    Ok(KrFamily { spec, fields })
}

/// Extend a field on `J^{n-1}` to `J^n` with zero top-order components.
pub fn lift_vector_field(f: &VectorField, spec: JetSpec) -> Result<VectorField> {
    let lower = spec.lower().ok_or_else(|| PflError::Precondition("cannot lift into J^0".into()))?;
    if f.chart().as_ref() != Chart::jet(lower).as_ref() {
        return Err(PflError::ChartMismatch { expected: lower.dim(), found: f.dim() });
    }
    f.lift_to(Chart::jet(spec))
}

/// One regular or singular prolongation of a family on `J^{k-1}`.
pub fn prolong(family: &KrFamily, letter: &ProlongationLetter) -> Result<KrFamily> {
    let m = family.spec.m;
    if letter.c.len() != m {
        return Err(PflError::Precondition(format!("letter {letter} does not have {m} constants")));
    }
    if letter.kind == LetterKind::S && !letter.c[m - 1].is_zero() {
        return Err(PflError::Precondition("a singular letter must have c_m = 0".into()));
    }
    let spec = JetSpec { n: family.spec.n + 1, m };
    let chart = Chart::jet(spec);
    let n = chart.dim();
    let lifted: Vec<VectorField> = family.fields.iter().map(|f| f.lift_to(chart.clone())).collect::<Result<_>>()?;
    let top = |j: usize| Polynomial::var(n, spec.index(spec.n, j));
    let shifted = |j: usize| &top(j) + &Polynomial::constant(n, letter.c[j - 1].clone());
    let mut drift = VectorField::zero(chart.clone());
    match letter.kind {
        LetterKind::R => {
            for j in 1..=m {
                drift = drift.add(&lifted[j].mul_poly(&shifted(j)));
            }
            drift = drift.add(&lifted[0]);
        }
        LetterKind::S => {
            for j in 1..m {
                drift = drift.add(&lifted[j].mul_poly(&shifted(j)));
            }
            drift = drift.add(&lifted[m]);
            drift = drift.add(&lifted[0].mul_poly(&top(m)));
        }
    }
    let mut fields = vec![drift];
    for j in 1..=m {
        fields.push(VectorField::coordinate(chart.clone(), spec.index(spec.n, j)));
    }
    Ok(KrFamily { spec, fields })
}

pub fn kr_family(word: &ProlongationWord) -> Result<KrFamily> {
    let mut fam = KrFamily::first_order(word.spec.m)?;
    for l in &word.letters {
        fam = prolong(&fam, l)?;
    }
    Ok(fam)
}

/// The distribution spanned by `σ_n ∘ ... ∘ σ_2(κ^1)`.
pub fn generate_kumpera_ruiz(word: &ProlongationWord) -> Result<Distribution> {
    Ok(kr_family(word)?.distribution())
}
