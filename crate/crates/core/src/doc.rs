//! JSON wire formats. Every scalar is an exact string; indices are 0-based.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::derivations::{Derivation, DerivationSpace};
use crate::isoclinism::{CommutatorPairing, Fingerprint, IsoclinismWitness};
use crate::linalg::{Matrix, Subspace};
use crate::xmod::XModMorphism;
use crate::{CrossedModule, Error, FieldSpec, LieAlgebra, Result, Scalar};

/// Rows of scalar strings. A matrix with no rows is `[]`; its column count
/// comes from context.
pub type RawMatrix = Vec<Vec<String>>;

/// `[i, j, [coefficients]]`.
pub type RawEntry = (usize, usize, Vec<String>);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LieDoc {
    pub dim: usize,
    pub field: String,
    #[serde(default)]
    pub brackets: Vec<RawEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XModDoc {
    pub field: String,
    #[serde(rename = "L1")]
    pub l1: LieDoc,
    #[serde(rename = "L0")]
    pub l0: LieDoc,
    /// `n0` rows of `n1` entries.
    pub d: RawMatrix,
    /// Nonzero `[e_i, f_j]`.
    #[serde(default)]
    pub action: Vec<RawEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub eta1: RawMatrix,
    pub eta0: RawMatrix,
    pub xi1: RawMatrix,
    pub xi0: RawMatrix,
    #[serde(default)]
    pub verified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Verified,
    Violated,
    NotIsoclinic,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictDoc {
    pub status: Status,
    pub detail: String,
}

impl VerdictDoc {
    pub fn new(status: Status, detail: impl Into<String>) -> Self {
        VerdictDoc {
            status,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DerivationDoc {
    Pair { alpha: RawMatrix, beta: RawMatrix },
    Matrix(RawMatrix),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationSpaceDoc {
    pub kind: String,
    pub dim: usize,
    pub basis: Vec<DerivationDoc>,
    pub structure: LieDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceDoc {
    pub ambient: usize,
    pub dim: usize,
    /// Reduced row echelon basis, one vector per row.
    pub basis: RawMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubXModDoc {
    #[serde(rename = "L1")]
    pub l1: SubspaceDoc,
    #[serde(rename = "L0")]
    pub l0: SubspaceDoc,
}

// ---------------------------------------------------------------- encoding

pub fn matrix_to_raw(m: &Matrix) -> RawMatrix {
    (0..m.rows())
        .map(|r| m.row(r).iter().map(Scalar::to_string).collect())
        .collect()
}

fn vector_to_raw(v: &[Scalar]) -> Vec<String> {
    v.iter().map(Scalar::to_string).collect()
}

pub fn lie_to_doc(g: &LieAlgebra) -> LieDoc {
    let n = g.dim();
    let mut brackets = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let c = g.structure_constants(i, j);
            if c.iter().any(|s| !s.is_zero()) {
                brackets.push((i, j, vector_to_raw(c)));
            }
        }
    }
    LieDoc {
        dim: n,
        field: g.field().to_string(),
        brackets,
    }
}

pub fn xmod_to_doc(x: &CrossedModule) -> XModDoc {
    let (n1, n0) = x.dims();
    let mut action = Vec::new();
    for i in 0..n0 {
        for j in 0..n1 {
            let c = x.action_constants(i, j);
            if c.iter().any(|s| !s.is_zero()) {
                action.push((i, j, vector_to_raw(c)));
            }
        }
    }
    XModDoc {
        field: x.field().to_string(),
        l1: lie_to_doc(x.l1()),
        l0: lie_to_doc(x.l0()),
        d: matrix_to_raw(x.boundary()),
        action,
    }
}

pub fn witness_to_doc(w: &IsoclinismWitness, verified: bool) -> WitnessDoc {
    WitnessDoc {
        eta1: matrix_to_raw(&w.eta.alpha),
        eta0: matrix_to_raw(&w.eta.beta),
        xi1: matrix_to_raw(&w.xi.alpha),
        xi0: matrix_to_raw(&w.xi.beta),
        verified,
    }
}

pub fn subspace_to_doc(s: &Subspace) -> SubspaceDoc {
    SubspaceDoc {
        ambient: s.ambient_dim(),
        dim: s.dim(),
        basis: matrix_to_raw(s.basis()),
    }
}

pub fn subxmod_to_doc(s1: &Subspace, s0: &Subspace) -> SubXModDoc {
    SubXModDoc {
        l1: subspace_to_doc(s1),
        l0: subspace_to_doc(s0),
    }
}

pub fn derivation_to_doc(d: &Derivation) -> DerivationDoc {
    match d {
        Derivation::Whitehead(m) => DerivationDoc::Matrix(matrix_to_raw(m)),
        Derivation::XMod { alpha, beta } => DerivationDoc::Pair {
            alpha: matrix_to_raw(alpha),
            beta: matrix_to_raw(beta),
        },
    }
}

pub fn derivation_space_to_doc(d: &DerivationSpace) -> DerivationSpaceDoc {
    DerivationSpaceDoc {
        kind: d.kind.name().to_string(),
        dim: d.dim(),
        basis: d.basis().iter().map(derivation_to_doc).collect(),
        structure: lie_to_doc(&d.algebra),
    }
}

pub fn morphism_to_value(m: &XModMorphism) -> Value {
    serde_json::json!({ "alpha": matrix_to_raw(&m.alpha), "beta": matrix_to_raw(&m.beta) })
}

pub fn fingerprint_to_value(f: &Fingerprint) -> Value {
    serde_json::json!({
        "central_quotient": [f.central_quotient.0, f.central_quotient.1],
        "commutator": [f.commutator.0, f.commutator.1],
        "commutator_center": [f.commutator_center.0, f.commutator_center.1],
        "quotient_boundary_rank": f.quotient_boundary_rank,
        "commutator_boundary_rank": f.commutator_boundary_rank,
        "lower_central": f.lower_central.iter().map(|(a, b)| [*a, *b]).collect::<Vec<_>>(),
        "derived": f.derived.iter().map(|(a, b)| [*a, *b]).collect::<Vec<_>>(),
        "vector": f.to_vec(),
    })
}

// ---------------------------------------------------------------- decoding

fn at(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("at {path}: {msg}"))
}

pub fn parse_field(s: &str, path: &str) -> Result<FieldSpec> {
    s.parse::<FieldSpec>().map_err(|e| at(path, e))
}

fn parse_vector(field: FieldSpec, raw: &[String], len: usize, path: &str) -> Result<Vec<Scalar>> {
    if raw.len() != len {
        return Err(at(
            path,
            format!("expected {len} entries, found {}", raw.len()),
        ));
    }
    raw.iter()
        .enumerate()
        .map(|(k, s)| field.parse(s).map_err(|e| at(&format!("{path}[{k}]"), e)))
        .collect()
}

/// Reads a `rows x cols` matrix. `[]` is accepted for any shape with no entries.
pub fn matrix_from_raw(
    field: FieldSpec,
    raw: &RawMatrix,
    rows: usize,
    cols: usize,
    path: &str,
) -> Result<Matrix> {
    if raw.is_empty() && rows * cols == 0 {
        return Ok(Matrix::zeros(field, rows, cols));
    }
    if raw.len() != rows {
        return Err(at(
            path,
            format!("expected {rows} rows of {cols}, found {} rows", raw.len()),
        ));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (r, row) in raw.iter().enumerate() {
        data.extend(parse_vector(field, row, cols, &format!("{path}[{r}]"))?);
    }
    Ok(Matrix::from_vec(field, rows, cols, data))
}

/// Structure tensor from `[i, j, c]` entries with both indices checked.
fn tensor_from_entries(
    field: FieldSpec,
    entries: &[RawEntry],
    rows: usize,
    cols: usize,
    len: usize,
    strict_upper: bool,
    path: &str,
) -> Result<Vec<(usize, usize, Vec<Scalar>)>> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(entries.len());
    for (k, (i, j, c)) in entries.iter().enumerate() {
        let p = format!("{path}[{k}]");
        if *i >= rows || *j >= cols {
            return Err(at(
                &p,
                format!("index ({i}, {j}) out of range {rows}x{cols}"),
            ));
        }
        if strict_upper && i >= j {
            return Err(at(
                &p,
                format!("bracket indices must satisfy i < j, found ({i}, {j})"),
            ));
        }
        if !seen.insert((*i, *j)) {
            return Err(at(&p, format!("duplicate entry ({i}, {j})")));
        }
        out.push((*i, *j, parse_vector(field, c, len, &format!("{p}[2]"))?));
    }
    Ok(out)
}

/// Builds the algebra without checking the Lie axioms.
pub fn lie_from_doc(doc: &LieDoc, path: &str) -> Result<LieAlgebra> {
    let field = parse_field(&doc.field, &format!("{path}field"))?;
    let n = doc.dim;
    let entries = tensor_from_entries(
        field,
        &doc.brackets,
        n,
        n,
        n,
        true,
        &format!("{path}brackets"),
    )?;
    let mut t = vec![field.zero(); n * n * n];
    for (i, j, c) in entries {
        for (k, v) in c.into_iter().enumerate() {
            t[(j * n + i) * n + k] = -v.clone();
            t[(i * n + j) * n + k] = v;
        }
    }
    Ok(LieAlgebra::from_tensor_unchecked(field, n, t))
}

/// Builds the crossed module after shape checks only; call `validate` for the axioms.
pub fn xmod_from_doc(doc: &XModDoc) -> Result<CrossedModule> {
    let field = parse_field(&doc.field, "field")?;
    let l1 = lie_from_doc(&doc.l1, "L1.")?;
    let l0 = lie_from_doc(&doc.l0, "L0.")?;
    for (name, g) in [("L1", &l1), ("L0", &l0)] {
        if g.field() != field {
            return Err(at(
                &format!("{name}.field"),
                format!("{} differs from the module field {field}", g.field()),
            ));
        }
    }
    let (n1, n0) = (l1.dim(), l0.dim());
    let d = matrix_from_raw(field, &doc.d, n0, n1, "d")?;
    let entries = tensor_from_entries(field, &doc.action, n0, n1, n1, false, "action")?;
    let mut a = vec![field.zero(); n0 * n1 * n1];
    for (i, j, c) in entries {
        for (k, v) in c.into_iter().enumerate() {
            a[(i * n1 + j) * n1 + k] = v;
        }
    }
    CrossedModule::from_parts_unchecked(l1, l0, d, a)
}

/// Reads a witness for `x ~ y` given both pairings.
pub fn witness_from_doc(
    doc: &WitnessDoc,
    px: &CommutatorPairing,
    py: &CommutatorPairing,
) -> Result<IsoclinismWitness> {
    let f = px.field();
    let (m1, m0) = px.quotient_dims();
    let (n1, n0) = py.quotient_dims();
    let (k1, k0) = px.commutator_dims();
    let (j1, j0) = py.commutator_dims();
    Ok(IsoclinismWitness {
        eta: XModMorphism {
            alpha: matrix_from_raw(f, &doc.eta1, n1, m1, "eta1")?,
            beta: matrix_from_raw(f, &doc.eta0, n0, m0, "eta0")?,
        },
        xi: XModMorphism {
            alpha: matrix_from_raw(f, &doc.xi1, j1, k1, "xi1")?,
            beta: matrix_from_raw(f, &doc.xi0, j0, k0, "xi0")?,
        },
    })
}

/// Parses `text` as `T`. If the top level is not a `T` but a report that
/// carries one, the object is taken from the first of `nests` that leads to
/// a value with key `marker`.
pub fn parse_document<T: DeserializeOwned>(text: &str, marker: &str, nests: &[&str]) -> Result<T> {
    let direct = serde_json::from_str::<T>(text);
    let err = match direct {
        Ok(t) => return Ok(t),
        Err(e) => e,
    };
    let positioned = || Error::Parse(err.to_string());
    if err.is_syntax() || err.is_eof() {
        return Err(positioned());
    }
    let value: Value = serde_json::from_str(text).map_err(|_| positioned())?;
    if value.get(marker).is_some() {
        return Err(positioned());
    }
    match find_nested(&value, marker, nests, String::new()) {
        Some((path, v)) => serde_json::from_value(v.clone()).map_err(|e| at(&path, e)),
        None => Err(positioned()),
    }
}

fn find_nested<'a>(
    v: &'a Value,
    marker: &str,
    nests: &[&str],
    path: String,
) -> Option<(String, &'a Value)> {
    if v.get(marker).is_some() {
        return Some((path, v));
    }
    for key in nests {
        if let Some(inner) = v.get(*key) {
            let p = if path.is_empty() {
                key.to_string()
            } else {
                format!("{path}.{key}")
            };
            if let Some(found) = find_nested(inner, marker, nests, p) {
                return Some(found);
            }
        }
    }
    None
}

pub fn parse_xmod_doc(text: &str) -> Result<XModDoc> {
    parse_document(text, "L1", &["result", "module", "document"])
}

pub fn parse_witness_doc(text: &str) -> Result<WitnessDoc> {
    parse_document(text, "eta1", &["result", "witness"])
}

pub fn parse_xmod(text: &str) -> Result<CrossedModule> {
    xmod_from_doc(&parse_xmod_doc(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::isoclinism::isoclinism_identity;

    #[test]
    fn xmod_round_trip() {
        for f in [FieldSpec::Rational, FieldSpec::Prime(3)] {
            for (name, x) in catalog::all_xmods(f) {
                let text = serde_json::to_string(&xmod_to_doc(&x)).unwrap();
                let back = parse_xmod(&text).unwrap();
                assert_eq!(back, x, "{name}");
            }
        }
    }

    #[test]
    fn rationals_are_strings_with_denominators() {
        let x = catalog::build_xmod("id-h3", FieldSpec::Rational).unwrap();
        let text = serde_json::to_string(&xmod_to_doc(&x)).unwrap();
        assert!(text.contains("\"1/1\""));
        assert!(!text.contains("1.0"));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_xmod("{\n  \"field\": \"Q\",\n  oops }").unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
    }

    #[test]
    fn semantic_errors_carry_paths() {
        let x = catalog::build_xmod("id-h3", FieldSpec::Rational).unwrap();
        let mut doc = xmod_to_doc(&x);
        doc.l1.brackets[0].2[2] = "1/0".into();
        let e = xmod_from_doc(&doc).unwrap_err();
        assert!(e.to_string().contains("L1.brackets[0][2][2]"), "{e}");

        let mut doc = xmod_to_doc(&x);
        doc.l0.brackets[0].0 = 2;
        doc.l0.brackets[0].1 = 1;
        let e = xmod_from_doc(&doc).unwrap_err();
        assert!(e.to_string().contains("i < j"), "{e}");

        let mut doc = xmod_to_doc(&x);
        doc.d.pop();
        let e = xmod_from_doc(&doc).unwrap_err();
        assert!(e.to_string().contains("at d"), "{e}");

        let mut doc = xmod_to_doc(&x);
        doc.l1.field = "F_2".into();
        assert!(xmod_from_doc(&doc).is_err());
    }

    #[test]
    fn nested_documents_are_found() {
        let x = catalog::build_xmod("id-n2", FieldSpec::Prime(2)).unwrap();
        let doc = xmod_to_doc(&x);
        let report = serde_json::json!({ "schema_version": 1, "result": { "module": doc } });
        assert_eq!(parse_xmod(&report.to_string()).unwrap(), x);
        let e = parse_xmod("{\"result\": {}}").unwrap_err();
        assert!(e.to_string().contains("line"), "{e}");
    }

    #[test]
    fn witness_round_trip_with_empty_matrices() {
        let x = catalog::build_xmod("id-a3", FieldSpec::Prime(2)).unwrap();
        let w = isoclinism_identity(&x).unwrap();
        let doc = witness_to_doc(&w, true);
        assert!(doc.eta1.is_empty() && doc.xi0.is_empty());
        let p = CommutatorPairing::new(&x).unwrap();
        let text = serde_json::to_string(&doc).unwrap();
        let back = witness_from_doc(&parse_witness_doc(&text).unwrap(), &p, &p).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn zero_row_matrix_with_columns() {
        let m = matrix_from_raw(FieldSpec::Rational, &vec![], 0, 3, "m").unwrap();
        assert_eq!((m.rows(), m.cols()), (0, 3));
        let raw = vec![vec![], vec![]];
        let m = matrix_from_raw(FieldSpec::Rational, &raw, 2, 0, "m").unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 0));
    }
}
