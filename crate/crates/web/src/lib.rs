use serde::Serialize;
use wasm_bindgen::prelude::*;

use pfl_core::contact::{classify_contact, generate_kumpera_ruiz, kr_signature_at_point, mobius_is_diffeo, MobiusMap, ProlongationWord};
use pfl_core::flags::lie_flag;
use pfl_core::poly::linalg::{determinant, RatMatrix};
use pfl_core::poly::rational::{format_rational, parse_rational};
use pfl_core::poly::{Rational, RationalPoint};

#[derive(Serialize)]
struct Explored {
    dim: usize,
    variables: Vec<String>,
    status: String,
    signature: String,
    derived_ranks: Vec<usize>,
    lie_ranks_at_base: Vec<usize>,
    expected_ranks: Vec<usize>,
    witness_per_level: Vec<bool>,
    recovered_word: Option<String>,
}

#[derive(Serialize)]
struct ScanRow {
    value: String,
    status: String,
    lie_ranks_at_base: Vec<usize>,
}

#[derive(Serialize)]
struct MobiusReport {
    size: usize,
    is_diffeo: bool,
    determinant: String,
    jacobian_at_zero: Vec<Vec<String>>,
    ad_minus_bc: Vec<Vec<String>>,
    det_ad_minus_bc: String,
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn word_from(text: &str, m: usize) -> Result<ProlongationWord, String> {
    ProlongationWord::parse(text, m).map_err(err)
}

/// Empty text means the origin; otherwise a comma separated list of rationals.
fn point_from(text: &str, dim: usize) -> Result<RationalPoint, String> {
    if text.trim().is_empty() {
        return Ok(RationalPoint::origin(dim));
    }
    let p = RationalPoint::parse(text).map_err(err)?;
    p.check_dim(dim).map_err(err)?;
    Ok(p)
}

fn status_name<T: Serialize>(s: &T) -> String {
    serde_json::to_value(s).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn strings(m: &RatMatrix) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(format_rational).collect()).collect()
}

pub fn explore_json(word: &str, m: usize, at: &str) -> Result<String, String> {
    let w = word_from(word, m)?;
    let d = generate_kumpera_ruiz(&w).map_err(err)?;
    let base = point_from(at, w.spec.dim())?;
    let v = classify_contact(&d, &base).map_err(err)?;
    let out = Explored {
        dim: w.spec.dim(),
        variables: d.chart().variables.clone(),
        status: status_name(&v.status),
        signature: status_name(&kr_signature_at_point(&w, &base).map_err(err)?),
        derived_ranks: v.derived_ranks.clone(),
        lie_ranks_at_base: v.lie_ranks_at_base.clone(),
        expected_ranks: (0..=w.spec.n).map(|i| (i + 1) * m + 1).collect(),
        witness_per_level: v.corank_one_witness_per_level.clone(),
        recovered_word: v.word.as_ref().map(|w| w.to_string()),
    };
    serde_json::to_string(&out).map_err(err)
}

/// Moves one coordinate of the base point through `values` and records the Lie ranks there.
pub fn scan_json(word: &str, m: usize, at: &str, coord: usize, values: &str) -> Result<String, String> {
    let w = word_from(word, m)?;
    let d = generate_kumpera_ruiz(&w).map_err(err)?;
    let base = point_from(at, w.spec.dim())?;
    if coord >= base.dim() {
        return Err(format!("coordinate {coord} is outside a chart of dimension {}", base.dim()));
    }
    let mut rows = Vec::new();
    for text in values.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let mut p = base.clone();
        p.0[coord] = parse_rational(text).map_err(err)?;
        let v = classify_contact(&d, &p).map_err(err)?;
        let lie = lie_flag(&d, &p, Some(w.spec.n)).map_err(err)?.report.ranks_at_base();
        rows.push(ScanRow { value: format_rational(&p.0[coord]), status: status_name(&v.status), lie_ranks_at_base: lie });
    }
    serde_json::to_string(&rows).map_err(err)
}

/// Rows separated by `;`, entries by spaces or commas.
pub fn mobius_json(matrix: &str) -> Result<String, String> {
    let rows: Vec<Vec<Rational>> = matrix
        .split(';')
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .map(|r| r.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(parse_rational).collect())
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let map = MobiusMap::new(&rows).map_err(err)?;
    let det = determinant(&rows);
    let adbc = map.ad_minus_bc();
    let out = MobiusReport {
        size: rows.len(),
        is_diffeo: mobius_is_diffeo(&rows).map_err(err)?,
        determinant: format_rational(&det),
        jacobian_at_zero: strings(&map.jacobian_at_zero().map_err(err)?),
        det_ad_minus_bc: format_rational(&determinant(&adbc)),
        ad_minus_bc: strings(&adbc),
    };
    serde_json::to_string(&out).map_err(err)
}

fn to_js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

/// Classification and flag ranks of a prolongation word at a base point.
#[wasm_bindgen]
pub fn explore(word: &str, m: usize, at: &str) -> Result<String, JsValue> {
    to_js(explore_json(word, m, at))
}

#[wasm_bindgen]
pub fn scan(word: &str, m: usize, at: &str, coord: usize, values: &str) -> Result<String, JsValue> {
    to_js(scan_json(word, m, at, coord, values))
}

#[wasm_bindgen]
pub fn mobius(matrix: &str) -> Result<String, JsValue> {
    to_js(mobius_json(matrix))
}
