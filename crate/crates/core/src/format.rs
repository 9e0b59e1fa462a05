//! Versioned JSON documents.
//!
//! Rationals are strings `"p/q"`; a polynomial is an array of `[coefficient, exponents]` pairs in
//! decreasing graded-lex order.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bryant::{CorankOneSummary, CorankOneVerdict};
use crate::contact::{
    Classification, ClassificationVerdict, KrReduction, LetterKind, ProlongationLetter, ProlongationWord, WitnessMethod,
};
use crate::error::{PflError, Result};
use crate::exterior::{Chart, ChartRef, JetSpec, DiffeoPair, Distribution, OneForm, PfaffianSystem, VectorField};
use crate::flags::FlagReport;
use crate::poly::rational::{format_rational, parse_rational};
use crate::poly::Polynomial;

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayloadKind {
    Distribution,
    Pfaffian,
    DiffeoPair,
    Word,
    Verdict,
    FlagReport,
    CorankOne,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Envelope {
    format_version: String,
    chart: Chart,
    payload_kind: PayloadKind,
    payload: Value,
}

pub type PolyDoc = Vec<(String, Vec<u32>)>;

pub fn poly_to_doc(p: &Polynomial) -> PolyDoc {
    p.terms().map(|(m, c)| (format_rational(c), m.exps().to_vec())).collect()
}

pub fn poly_from_doc(doc: &PolyDoc, nvars: usize) -> Result<Polynomial> {
    let terms = doc
        .iter()
        .map(|(c, e)| {
            if e.len() != nvars {
                return Err(PflError::ChartMismatch { expected: nvars, found: e.len() });
            }
            Ok((parse_rational(c)?, e.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    Polynomial::from_terms(nvars, terms)
}

fn polys_from_doc(docs: &[PolyDoc], nvars: usize) -> Result<Vec<Polynomial>> {
    if docs.len() != nvars {
        return Err(PflError::ChartMismatch { expected: nvars, found: docs.len() });
    }
    docs.iter().map(|d| poly_from_doc(d, nvars)).collect()
}

pub fn field_to_doc(f: &VectorField) -> Vec<PolyDoc> {
    f.components().iter().map(poly_to_doc).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct DistributionBody {
    generators: Vec<Vec<PolyDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    word: Option<ProlongationWord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct PfaffianBody {
    forms: Vec<Vec<PolyDoc>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct DiffeoBody {
    forward: Vec<PolyDoc>,
    backward: Vec<PolyDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct WordBody {
    spec: JetSpec,
    letters: Vec<ProlongationLetter>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<TraceStep>>,
}

/// One level of a reduction: the frame change at the base and the letter read off there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub level: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub letter: Option<ProlongationLetter>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub swap: Option<(usize, usize)>,
    pub mu_at_base: Vec<Vec<String>>,
    pub mu_constant: bool,
}

pub fn reduction_trace(r: &KrReduction) -> Result<Vec<TraceStep>> {
    r.mu_chain
        .iter()
        .map(|mu| {
            let step = r.steps.iter().find(|s| s.level == mu.level);
            let branch = step.map(|s| match s.letter.kind {
                LetterKind::R => "regular".to_string(),
                LetterKind::S => "singular".to_string(),
            });
            Ok(TraceStep {
                level: mu.level,
                branch,
                letter: step.map(|s| s.letter.clone()),
                swap: step.and_then(|s| s.swap),
                mu_at_base: mu.at_base()?.iter().map(|row| row.iter().map(format_rational).collect()).collect(),
                mu_constant: mu.is_constant(),
            })
        })
        .collect()
}

/// Result of the corank-one decision on a single distribution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorankOneReport {
    pub summary: CorankOneSummary,
    pub witnesses: Vec<WitnessDoc>,
}

impl CorankOneReport {
    pub fn from_verdict(v: &CorankOneVerdict, full: bool) -> Self {
        let mut witnesses = Vec::new();
        let roles = [("characteristic", Some(&v.characteristic)), ("b", v.b.as_ref()), ("l", v.l_witness.as_ref())];
        for (role, d) in roles {
            if let Some(d) = d {
                witnesses.push(WitnessDoc {
                    level: 0,
                    role: role.into(),
                    rank: d.generic_rank(),
                    generators: full.then(|| d.generators().iter().map(field_to_doc).collect()),
                });
            }
        }
        CorankOneReport { summary: v.summary(), witnesses }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct FlagBody {
    reports: Vec<FlagReport>,
}

/// A serialized distribution restricted to one level's witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub level: usize,
    /// `characteristic`, `b` or `l`.
    pub role: String,
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<PolyDoc>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: usize,
    pub method: WitnessMethod,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corank_one: Option<CorankOneSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub elapsed_ms: u64,
    pub generators: usize,
    pub max_terms: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub verdict: ClassificationVerdict,
    pub levels: Vec<LevelReport>,
    pub witnesses: Vec<WitnessDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<Stats>,
}

impl VerdictReport {
    /// Witnesses are listed for the levels whose condition holds; polynomials only on request.
    pub fn from_classification(c: &Classification, full: bool) -> Self {
        let mut witnesses = Vec::new();
        for e in c.evidence.iter().filter(|e| e.holds) {
            let roles = [("characteristic", &e.characteristic), ("b", &e.b), ("l", &e.witness)];
            for (role, d) in roles {
                if let Some(d) = d {
                    witnesses.push(WitnessDoc {
                        level: e.level,
                        role: role.into(),
                        rank: d.generic_rank(),
                        generators: full.then(|| d.generators().iter().map(field_to_doc).collect()),
                    });
                }
            }
        }
        let levels = c
            .evidence
            .iter()
            .map(|e| LevelReport { level: e.level, method: e.method, holds: e.holds, corank_one: e.corank_one.clone(), note: e.note.clone() })
            .collect();
        VerdictReport { verdict: c.verdict.clone(), levels, witnesses, stats: None }
    }
}

const INLINE_WIDTH: usize = 100;

/// Pretty printing that keeps short object-free arrays (terms, exponents, letters) on one line.
fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            if let Some(line) = inline(v).filter(|l| l.len() <= INLINE_WIDTH) {
                out.push_str(&line);
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, item, depth + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, depth + 1);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

fn inline(v: &Value) -> Option<String> {
    match v {
        Value::Object(_) => None,
        Value::Array(items) => {
            let parts = items.iter().map(inline).collect::<Option<Vec<_>>>()?;
            Some(format!("[{}]", parts.join(", ")))
        }
        scalar => Some(scalar.to_string()),
    }
}

/// Every document kind the tools read or write.
#[derive(Clone, Debug)]
pub enum Document {
    Distribution { distribution: Distribution, word: Option<ProlongationWord> },
    Pfaffian(PfaffianSystem),
    DiffeoPair(DiffeoPair),
    Word { word: ProlongationWord, trace: Option<Vec<TraceStep>> },
    Verdict { chart: ChartRef, report: VerdictReport },
    FlagReport { chart: ChartRef, reports: Vec<FlagReport> },
    CorankOne { chart: ChartRef, report: CorankOneReport },
}

impl Document {
    pub fn kind(&self) -> PayloadKind {
        match self {
            Document::Distribution { .. } => PayloadKind::Distribution,
            Document::Pfaffian(_) => PayloadKind::Pfaffian,
            Document::DiffeoPair(_) => PayloadKind::DiffeoPair,
            Document::Word { .. } => PayloadKind::Word,
            Document::Verdict { .. } => PayloadKind::Verdict,
            Document::FlagReport { .. } => PayloadKind::FlagReport,
            Document::CorankOne { .. } => PayloadKind::CorankOne,
        }
    }

    pub fn chart(&self) -> ChartRef {
        match self {
            Document::Distribution { distribution, .. } => distribution.chart().clone(),
            Document::Pfaffian(i) => i.chart().clone(),
            Document::DiffeoPair(p) => p.chart().clone(),
            Document::Word { word, .. } => Chart::jet(word.spec),
            Document::Verdict { chart, .. } | Document::FlagReport { chart, .. } | Document::CorankOne { chart, .. } => {
                chart.clone()
            }
        }
    }

    fn payload(&self) -> Result<Value> {
        let v = match self {
            Document::Distribution { distribution, word } => serde_json::to_value(DistributionBody {
                generators: distribution.generators().iter().map(field_to_doc).collect(),
                word: word.clone(),
            }),
            Document::Pfaffian(i) => serde_json::to_value(PfaffianBody {
                forms: i.forms().iter().map(|w| w.components().iter().map(poly_to_doc).collect()).collect(),
            }),
            Document::DiffeoPair(p) => serde_json::to_value(DiffeoBody {
                forward: p.forward().iter().map(poly_to_doc).collect(),
                backward: p.backward().iter().map(poly_to_doc).collect(),
            }),
            Document::Word { word, trace } => {
                serde_json::to_value(WordBody { spec: word.spec, letters: word.letters.clone(), trace: trace.clone() })
            }
            Document::Verdict { report, .. } => serde_json::to_value(report),
            Document::FlagReport { reports, .. } => serde_json::to_value(FlagBody { reports: reports.clone() }),
            Document::CorankOne { report, .. } => serde_json::to_value(report),
        };
        v.map_err(|e| PflError::Internal(e.to_string()))
    }

    /// Pretty JSON with a trailing newline; identical documents give identical bytes.
    pub fn to_json(&self) -> Result<String> {
        let env = Envelope {
            format_version: FORMAT_VERSION.into(),
            chart: (*self.chart()).clone(),
            payload_kind: self.kind(),
            payload: self.payload()?,
        };
        let value = serde_json::to_value(&env).map_err(|e| PflError::Internal(e.to_string()))?;
        let mut s = String::new();
        write_value(&mut s, &value, 0);
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Document> {
        let env: Envelope = serde_json::from_str(text).map_err(|e| PflError::Parse(e.to_string()))?;
        if env.format_version != FORMAT_VERSION {
            return Err(PflError::Parse(format!("unsupported format_version {:?}", env.format_version)));
        }
        if let Some(spec) = env.chart.jet {
            if spec.dim() != env.chart.dim() {
                return Err(PflError::ChartMismatch { expected: spec.dim(), found: env.chart.dim() });
            }
        }
        let chart: ChartRef = Arc::new(env.chart);
        let n = chart.dim();
        let de = |e: serde_json::Error| PflError::Parse(e.to_string());
        let payload = env.payload;
        Ok(match env.payload_kind {
            PayloadKind::Distribution => {
                let b: DistributionBody = serde_json::from_value(payload).map_err(de)?;
                let gens = b
                    .generators
                    .iter()
                    .map(|g| VectorField::new(chart.clone(), polys_from_doc(g, n)?))
                    .collect::<Result<Vec<_>>>()?;
                if gens.is_empty() {
                    return Err(PflError::Parse("a distribution needs at least one generator".into()));
                }
                Document::Distribution { distribution: Distribution::new(chart, gens)?, word: b.word }
            }
            PayloadKind::Pfaffian => {
                let b: PfaffianBody = serde_json::from_value(payload).map_err(de)?;
                let forms = b
                    .forms
                    .iter()
                    .map(|g| OneForm::new(chart.clone(), polys_from_doc(g, n)?))
                    .collect::<Result<Vec<_>>>()?;
                Document::Pfaffian(PfaffianSystem::new(chart, forms)?)
            }
            PayloadKind::DiffeoPair => {
                let b: DiffeoBody = serde_json::from_value(payload).map_err(de)?;
                Document::DiffeoPair(DiffeoPair::new(chart, polys_from_doc(&b.forward, n)?, polys_from_doc(&b.backward, n)?)?)
            }
            PayloadKind::Word => {
                let b: WordBody = serde_json::from_value(payload).map_err(de)?;
                if b.spec.dim() != n {
                    return Err(PflError::ChartMismatch { expected: b.spec.dim(), found: n });
                }
                Document::Word { word: ProlongationWord::new(b.spec, b.letters)?, trace: b.trace }
            }
            PayloadKind::Verdict => Document::Verdict { chart, report: serde_json::from_value(payload).map_err(de)? },
            PayloadKind::FlagReport => {
                let b: FlagBody = serde_json::from_value(payload).map_err(de)?;
                Document::FlagReport { chart, reports: b.reports }
            }
            PayloadKind::CorankOne => Document::CorankOne { chart, report: serde_json::from_value(payload).map_err(de)? },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::{canonical_contact_system, classify_contact_detailed, generate_kumpera_ruiz};
    use crate::exterior::JetSpec;
    use crate::poly::RationalPoint;

    #[test]
    fn distribution_round_trip() {
        let w = ProlongationWord::parse("S(0,0)", 2).unwrap();
        let d = generate_kumpera_ruiz(&w).unwrap();
        let doc = Document::Distribution { distribution: d.clone(), word: Some(w.clone()) };
        let text = doc.to_json().unwrap();
        match Document::from_json(&text).unwrap() {
            Document::Distribution { distribution, word } => {
                assert_eq!(distribution.generators(), d.generators());
                assert_eq!(word, Some(w));
            }
            other => panic!("wrong kind {:?}", other.kind()),
        }
        assert_eq!(Document::from_json(&text).unwrap().to_json().unwrap(), text);
    }

    #[test]
    fn polynomial_doc_is_grlex() {
        let p = Polynomial::parse("x2 + 3/2*x1^2 - 4", 2).unwrap();
        let doc = poly_to_doc(&p);
        assert_eq!(doc[0], ("3/2".to_string(), vec![2, 0]));
        assert_eq!(doc.last().unwrap(), &("-4".to_string(), vec![0, 0]));
        assert_eq!(poly_from_doc(&doc, 2).unwrap(), p);
    }

    #[test]
    fn version_and_shape_checked() {
        let s = JetSpec::new(1, 1).unwrap();
        let d = canonical_contact_system(s).unwrap();
        let text = Document::Distribution { distribution: d, word: None }.to_json().unwrap();
        assert!(Document::from_json(&text.replace("\"format_version\": \"1\"", "\"format_version\": \"9\"")).is_err());
        let mut v: Value = serde_json::from_str(&text).unwrap();
        v["payload"]["generators"][0][0] = serde_json::json!([["1", [0, 0, 0, 0]]]);
        assert!(matches!(Document::from_json(&v.to_string()), Err(PflError::ChartMismatch { .. })));
    }

    #[test]
    fn word_with_trace_round_trip() {
        let w = ProlongationWord::parse("R(1,2),S(3,0)", 2).unwrap();
        let fam = crate::contact::kr_family(&w).unwrap();
        let r = crate::contact::kr_reduce(&fam.ordered(), &RationalPoint::origin(w.spec.dim())).unwrap();
        let trace = reduction_trace(&r).unwrap();
        assert_eq!(trace.len(), 4);
        assert_eq!(trace[3].branch.as_deref(), Some("singular"));
        let doc = Document::Word { word: w.clone(), trace: Some(trace.clone()) };
        match Document::from_json(&doc.to_json().unwrap()).unwrap() {
            Document::Word { word, trace: t } => {
                assert_eq!(word, w);
                assert_eq!(t, Some(trace));
            }
            other => panic!("wrong kind {:?}", other.kind()),
        }
    }

    #[test]
    fn verdict_report_round_trip() {
        let s = JetSpec::new(2, 2).unwrap();
        let d = canonical_contact_system(s).unwrap();
        let c = classify_contact_detailed(&d, &RationalPoint::origin(s.dim())).unwrap();
        let report = VerdictReport::from_classification(&c, true);
        assert!(report.witnesses.iter().all(|w| w.generators.is_some()));
        let doc = Document::Verdict { chart: d.chart().clone(), report: report.clone() };
        match Document::from_json(&doc.to_json().unwrap()).unwrap() {
            Document::Verdict { report: r, .. } => assert_eq!(r, report),
            other => panic!("wrong kind {:?}", other.kind()),
        }
    }
}
