//! Finite-dimensional Lie algebras given by structure constants.
//!
//! The structure tensor stores, for each ordered pair of basis vectors
//! `(e_i, e_j)`, the coordinate vector of `[e_i, e_j]`. Validity means the
//! tensor is alternating (`[e_i, e_i] = 0`, which also covers characteristic
//! 2), antisymmetric and satisfies the Jacobi identity.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::linalg::{
    axpy, is_zero_vector, kernel, quotient_coords, sub_vectors, zero_vector, Matrix,
    QuotientCoords, Subspace, Vector,
};
use crate::verdict::Verdict;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LieAlgebra {
    field: FieldSpec,
    dim: usize,
    structure: Vec<Scalar>,
}

impl fmt::Debug for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LieAlgebra<{}>(dim {}", self.field, self.dim)?;
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let c = self.structure_constants(i, j);
                if !is_zero_vector(c) {
                    let s: Vec<String> = c.iter().map(ToString::to_string).collect();
                    write!(f, ", [{i},{j}]=({})", s.join(","))?;
                }
            }
        }
        write!(f, ")")
    }
}

/// A single failed identity, with the basis indices that witness it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LieViolation {
    Shape(String),
    NotAlternating { i: usize },
    NotAntisymmetric { i: usize, j: usize },
    Jacobi { i: usize, j: usize, k: usize },
}

impl fmt::Display for LieViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieViolation::Shape(s) => write!(f, "shape: {s}"),
            LieViolation::NotAlternating { i } => write!(f, "[e{i},e{i}] != 0"),
            LieViolation::NotAntisymmetric { i, j } => {
                write!(f, "[e{i},e{j}] != -[e{j},e{i}]")
            }
            LieViolation::Jacobi { i, j, k } => write!(f, "Jacobi fails on (e{i},e{j},e{k})"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LieReport {
    pub violations: Vec<LieViolation>,
}

impl LieReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a candidate structure tensor (`dim^3` entries, `c[(i*dim + j)*dim + k]`).
/// Never fails; every violated identity is listed.
pub fn validate_lie(field: FieldSpec, dim: usize, tensor: &[Scalar]) -> LieReport {
    let mut report = LieReport::default();
    if tensor.len() != dim * dim * dim {
        report.violations.push(LieViolation::Shape(format!(
            "tensor has {} entries, expected {}",
            tensor.len(),
            dim * dim * dim
        )));
        return report;
    }
    if let Some(x) = tensor.iter().find(|x| x.field() != field) {
        report.violations.push(LieViolation::Shape(format!(
            "entry over {} in a {field} tensor",
            x.field()
        )));
        return report;
    }
    let g = LieAlgebra {
        field,
        dim,
        structure: tensor.to_vec(),
    };
    for i in 0..dim {
        if !is_zero_vector(g.structure_constants(i, i)) {
            report.violations.push(LieViolation::NotAlternating { i });
        }
    }
    for i in 0..dim {
        for j in i + 1..dim {
            let a = g.structure_constants(i, j);
            let b = g.structure_constants(j, i);
            if a.iter().zip(b).any(|(x, y)| !(x + y).is_zero()) {
                report
                    .violations
                    .push(LieViolation::NotAntisymmetric { i, j });
            }
        }
    }
    for i in 0..dim {
        for j in i + 1..dim {
            for k in j + 1..dim {
                if !is_zero_vector(&g.jacobiator(i, j, k)) {
                    report.violations.push(LieViolation::Jacobi { i, j, k });
                }
            }
        }
    }
    report
}

impl LieAlgebra {
    /// Wraps a tensor without checking the axioms. Use [`validate_lie`] or
    /// [`LieAlgebra::new`] for checked construction.
    pub fn from_tensor_unchecked(field: FieldSpec, dim: usize, structure: Vec<Scalar>) -> Self {
        assert_eq!(structure.len(), dim * dim * dim, "structure tensor size");
        LieAlgebra {
            field,
            dim,
            structure,
        }
    }

    pub fn new(field: FieldSpec, dim: usize, structure: Vec<Scalar>) -> Result<Self> {
        let report = validate_lie(field, dim, &structure);
        if !report.is_valid() {
            return Err(Error::InvalidLie(
                report
                    .violations
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; "),
            ));
        }
        Ok(LieAlgebra {
            field,
            dim,
            structure,
        })
    }

    /// Builds from brackets `[e_i, e_j]` with `i < j`; the rest is filled in
    /// by antisymmetry. Unlisted pairs are zero.
    pub fn from_brackets(
        field: FieldSpec,
        dim: usize,
        brackets: &[(usize, usize, Vector)],
    ) -> Result<Self> {
        Self::new(
            field,
            dim,
            Self::tensor_from_brackets(field, dim, brackets)?,
        )
    }

    /// Tensor from an `i < j` bracket list, without checking Jacobi.
    pub fn tensor_from_brackets(
        field: FieldSpec,
        dim: usize,
        brackets: &[(usize, usize, Vector)],
    ) -> Result<Vec<Scalar>> {
        let mut t = vec![field.zero(); dim * dim * dim];
        for (i, j, v) in brackets {
            let (i, j) = (*i, *j);
            if i >= dim || j >= dim || v.len() != dim {
                return Err(Error::Shape(format!(
                    "bracket [{i},{j}] out of range for dim {dim}"
                )));
            }
            if i >= j {
                return Err(Error::Shape(format!("bracket [{i},{j}] must have i < j")));
            }
            for (k, x) in v.iter().enumerate() {
                t[(i * dim + j) * dim + k] = x.clone();
                t[(j * dim + i) * dim + k] = -x;
            }
        }
        Ok(t)
    }

    /// Integer convenience wrapper over [`LieAlgebra::from_brackets`].
    pub fn from_integer_brackets(
        field: FieldSpec,
        dim: usize,
        brackets: &[(usize, usize, &[i64])],
    ) -> Result<Self> {
        let b: Vec<(usize, usize, Vector)> = brackets
            .iter()
            .map(|(i, j, v)| (*i, *j, v.iter().map(|&x| field.from_i64(x)).collect()))
            .collect();
        Self::from_brackets(field, dim, &b)
    }

    pub fn abelian(field: FieldSpec, dim: usize) -> Self {
        LieAlgebra {
            field,
            dim,
            structure: vec![field.zero(); dim * dim * dim],
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tensor(&self) -> &[Scalar] {
        &self.structure
    }

    pub fn validate(&self) -> LieReport {
        validate_lie(self.field, self.dim, &self.structure)
    }

    /// Coordinates of `[e_i, e_j]`.
    pub fn structure_constants(&self, i: usize, j: usize) -> &[Scalar] {
        let n = self.dim;
        &self.structure[(i * n + j) * n..(i * n + j + 1) * n]
    }

    /// `[e_i, e_j]` as an owned vector.
    pub fn basis_bracket(&self, i: usize, j: usize) -> Vector {
        self.structure_constants(i, j).to_vec()
    }

    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        let mut out = zero_vector(self.field, self.dim);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                axpy(&mut out, &(xi * yj), self.structure_constants(i, j));
            }
        }
        out
    }

    fn jacobiator(&self, i: usize, j: usize, k: usize) -> Vector {
        let e = |a: usize| crate::linalg::unit_vector(self.field, self.dim, a);
        let mut s = self.bracket(&e(i), &self.basis_bracket(j, k));
        let t = self.bracket(&e(j), &self.basis_bracket(k, i));
        let u = self.bracket(&e(k), &self.basis_bracket(i, j));
        axpy(&mut s, &self.field.one(), &t);
        axpy(&mut s, &self.field.one(), &u);
        s
    }

    /// Matrix of `ad_{e_i}`; column `j` is `[e_i, e_j]`.
    pub fn ad(&self, i: usize) -> Matrix {
        let cols: Vec<Vector> = (0..self.dim).map(|j| self.basis_bracket(i, j)).collect();
        Matrix::from_columns(self.field, self.dim, &cols)
    }

    pub fn ad_of(&self, x: &[Scalar]) -> Matrix {
        let cols: Vec<Vector> = (0..self.dim)
            .map(|j| self.bracket(x, &crate::linalg::unit_vector(self.field, self.dim, j)))
            .collect();
        Matrix::from_columns(self.field, self.dim, &cols)
    }

    /// `{v : [v, e_j] = 0 for all j}`, the kernel of the stacked adjoint maps.
    pub fn center(&self) -> Subspace {
        let n = self.dim;
        let mut m = Matrix::zeros(self.field, n * n, n);
        for i in 0..n {
            for j in 0..n {
                for (k, x) in self.structure_constants(i, j).iter().enumerate() {
                    m.set(j * n + k, i, x.clone());
                }
            }
        }
        kernel(&m)
    }

    pub fn derived_subalgebra(&self) -> Subspace {
        let all = Subspace::full(self.field, self.dim);
        self.bracket_span(&all, &all)
    }

    /// `[A, B]`, the span of brackets of basis vectors of `A` and `B`.
    pub fn bracket_span(&self, a: &Subspace, b: &Subspace) -> Subspace {
        let mut vs = Vec::new();
        for x in a.basis_vectors() {
            for y in b.basis_vectors() {
                let v = self.bracket(&x, &y);
                if !is_zero_vector(&v) {
                    vs.push(v);
                }
            }
        }
        Subspace::span(self.field, self.dim, &vs)
    }

    pub fn is_subalgebra(&self, s: &Subspace) -> bool {
        self.bracket_span(s, s).is_subspace_of(s)
    }

    pub fn is_ideal(&self, s: &Subspace) -> bool {
        self.bracket_span(&Subspace::full(self.field, self.dim), s)
            .is_subspace_of(s)
    }

    pub fn is_abelian(&self) -> bool {
        self.structure.iter().all(Scalar::is_zero)
    }

    /// The subalgebra `s` as a Lie algebra in its canonical basis.
    pub fn restrict(&self, s: &Subspace) -> Result<LieAlgebra> {
        if s.ambient_dim() != self.dim {
            return Err(Error::Shape("subspace ambient dimension".into()));
        }
        let basis = s.basis_vectors();
        let m = s.dim();
        let mut t = Vec::with_capacity(m * m * m);
        for a in &basis {
            for b in &basis {
                let v = self.bracket(a, b);
                let c = s
                    .coordinates(&v)
                    .ok_or_else(|| Error::Precondition("subspace is not a subalgebra".into()))?;
                t.extend(c);
            }
        }
        Ok(LieAlgebra {
            field: self.field,
            dim: m,
            structure: t,
        })
    }

    /// `g / s` for an ideal `s`, in the deterministic quotient coordinates.
    pub fn quotient(&self, s: &Subspace) -> Result<(LieAlgebra, QuotientCoords)> {
        if !self.is_ideal(s) {
            return Err(Error::Precondition("quotient by a non-ideal".into()));
        }
        let q = quotient_coords(self.dim, s)?;
        let lifts: Vec<Vector> = (0..q.dim()).map(|a| q.lift.column(a)).collect();
        let mut t = Vec::with_capacity(q.dim().pow(3));
        for a in &lifts {
            for b in &lifts {
                t.extend(q.project_vector(&self.bracket(a, b)));
            }
        }
        Ok((
            LieAlgebra {
                field: self.field,
                dim: q.dim(),
                structure: t,
            },
            q,
        ))
    }

    pub fn direct_sum(&self, other: &LieAlgebra) -> Result<LieAlgebra> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field, other.field));
        }
        let (n, m) = (self.dim, other.dim);
        let d = n + m;
        let mut t = vec![self.field.zero(); d * d * d];
        for i in 0..n {
            for j in 0..n {
                for (k, x) in self.structure_constants(i, j).iter().enumerate() {
                    t[(i * d + j) * d + k] = x.clone();
                }
            }
        }
        for i in 0..m {
            for j in 0..m {
                for (k, x) in other.structure_constants(i, j).iter().enumerate() {
                    t[((n + i) * d + n + j) * d + n + k] = x.clone();
                }
            }
        }
        Ok(LieAlgebra {
            field: self.field,
            dim: d,
            structure: t,
        })
    }

    /// First basis pair on which `m` (target_dim x self.dim) fails to preserve brackets.
    pub fn hom_violation(&self, target: &LieAlgebra, m: &Matrix) -> Option<(usize, usize)> {
        assert_eq!(
            (m.rows(), m.cols()),
            (target.dim, self.dim),
            "homomorphism shape"
        );
        let images: Vec<Vector> = (0..self.dim).map(|j| m.column(j)).collect();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let lhs = m.apply(self.structure_constants(i, j));
                let rhs = target.bracket(&images[i], &images[j]);
                if lhs != rhs {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn series(&self, kind: SeriesKind) -> LieSeries {
        let full = Subspace::full(self.field, self.dim);
        let mut terms = vec![full.clone()];
        for _ in 0..=self.dim {
            let last = terms.last().expect("nonempty");
            let next = match kind {
                SeriesKind::LowerCentral => self.bracket_span(&full, last),
                SeriesKind::Derived => self.bracket_span(last, last),
            };
            let stable = &next == last;
            terms.push(next);
            if stable {
                break;
            }
        }
        LieSeries::from_terms(kind, terms)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    LowerCentral,
    Derived,
}

/// A descending chain `terms[0] = g ⊇ terms[1] ⊇ ...`, computed until it
/// stabilizes. `index` is the least `k >= 1` with `terms[k] = 0` (the
/// nilpotency class or derived length), `None` if the chain stalls above 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieSeries {
    pub kind: SeriesKind,
    pub terms: Vec<Subspace>,
    pub index: Option<usize>,
}

impl LieSeries {
    fn from_terms(kind: SeriesKind, terms: Vec<Subspace>) -> Self {
        let index = (1..terms.len()).find(|&k| terms[k].is_zero());
        LieSeries { kind, terms, index }
    }

    pub fn terminates(&self) -> bool {
        self.index.is_some()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.terms.iter().map(Subspace::dim).collect()
    }
}

/// Der(g) realized as matrices, together with its abstract structure constants.
#[derive(Clone, Debug)]
pub struct DerivationAlgebra {
    /// Canonical basis of the solution space inside `K^{n*n}` (row-major matrices).
    pub space: Subspace,
    pub basis: Vec<Matrix>,
    pub algebra: LieAlgebra,
}

impl DerivationAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a matrix in the derivation basis, if it is a derivation.
    pub fn coordinates(&self, m: &Matrix) -> Option<Vector> {
        self.space.coordinates(&m.flatten())
    }
}

impl LieAlgebra {
    /// Solves `D[e_i,e_j] = [D e_i, e_j] + [e_i, D e_j]` for all `n x n` matrices `D`.
    pub fn derivation_algebra(&self) -> DerivationAlgebra {
        let n = self.dim;
        let var = |a: usize, b: usize| a * n + b;
        let mut rows: Vec<Vector> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let mut row = zero_vector(self.field, n * n);
                    for (m, c) in self.structure_constants(i, j).iter().enumerate() {
                        row[var(k, m)] = &row[var(k, m)] + c;
                    }
                    for m in 0..n {
                        let c = &self.structure_constants(m, j)[k];
                        row[var(m, i)] = &row[var(m, i)] - c;
                        let c = &self.structure_constants(i, m)[k];
                        row[var(m, j)] = &row[var(m, j)] - c;
                    }
                    if !is_zero_vector(&row) {
                        rows.push(row);
                    }
                }
            }
        }
        let system = Matrix::from_rows(self.field, n * n, &rows).expect("row lengths");
        let space = kernel(&system);
        let basis: Vec<Matrix> = space
            .basis_vectors()
            .into_iter()
            .map(|v| Matrix::from_vec(self.field, n, n, v))
            .collect();
        let algebra = algebra_from_bracket(&space, |a, b| {
            let ma = Matrix::from_vec(self.field, n, n, a.to_vec());
            let mb = Matrix::from_vec(self.field, n, n, b.to_vec());
            ma.commutator(&mb).flatten()
        })
        .expect("derivations are closed under commutators");
        DerivationAlgebra {
            space,
            basis,
            algebra,
        }
    }

    /// Span of `ad_{e_i}` in the coordinates of [`LieAlgebra::derivation_algebra`].
    pub fn inner_derivations(&self, der: &DerivationAlgebra) -> Subspace {
        let coords: Vec<Vector> = (0..self.dim)
            .map(|i| der.coordinates(&self.ad(i)).expect("ad is a derivation"))
            .collect();
        Subspace::span(self.field, der.dim(), &coords)
    }

    /// Does `d` satisfy the Leibniz rule on every basis pair?
    pub fn is_derivation(&self, d: &Matrix) -> bool {
        let n = self.dim;
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                let lhs = d.apply(self.structure_constants(i, j));
                let mut rhs =
                    self.bracket(&d.column(i), &crate::linalg::unit_vector(self.field, n, j));
                axpy(
                    &mut rhs,
                    &self.field.one(),
                    &self.bracket(&crate::linalg::unit_vector(self.field, n, i), &d.column(j)),
                );
                lhs == rhs
            })
        })
    }
}

/// Structure constants of a bracket-closed subspace, in its canonical basis.
/// Fails if some bracket of basis vectors leaves the subspace or the result
/// is not a Lie algebra.
pub(crate) fn algebra_from_bracket<F>(space: &Subspace, bracket: F) -> Result<LieAlgebra>
where
    F: Fn(&[Scalar], &[Scalar]) -> Vector,
{
    let basis = space.basis_vectors();
    let m = basis.len();
    let mut t = Vec::with_capacity(m * m * m);
    for (a, x) in basis.iter().enumerate() {
        for (b, y) in basis.iter().enumerate() {
            let v = bracket(x, y);
            let c = space.coordinates(&v).ok_or_else(|| {
                Error::Internal(format!(
                    "bracket of basis elements {a},{b} leaves the space"
                ))
            })?;
            t.extend(c);
        }
    }
    LieAlgebra::new(space.field(), m, t)
}

/// A candidate Lie-algebra isoclinism `g ~ h`: `eta` acts on central-quotient
/// coordinates, `xi` on canonical coordinates of the derived subalgebras.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieIsoclinismWitness {
    pub eta: Matrix,
    pub xi: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LieIsoclinismViolation {
    EtaNotBijective,
    XiNotBijective,
    EtaNotHomomorphism {
        i: usize,
        j: usize,
    },
    XiNotHomomorphism {
        i: usize,
        j: usize,
    },
    /// `xi(c_g(a, b)) != c_h(eta a, eta b)` on quotient basis vectors `a, b`.
    SquareFails {
        a: usize,
        b: usize,
    },
}

impl fmt::Display for LieIsoclinismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EtaNotBijective => write!(f, "eta is not bijective"),
            Self::XiNotBijective => write!(f, "xi is not bijective"),
            Self::EtaNotHomomorphism { i, j } => write!(f, "eta fails to preserve [{i},{j}]"),
            Self::XiNotHomomorphism { i, j } => write!(f, "xi fails to preserve [{i},{j}]"),
            Self::SquareFails { a, b } => write!(f, "commutator square fails on ({a},{b})"),
        }
    }
}

/// The data every Lie isoclinism check needs about one side.
#[derive(Clone, Debug)]
pub struct LieCommutatorData {
    pub quotient: LieAlgebra,
    pub coords: QuotientCoords,
    pub derived: Subspace,
    pub derived_algebra: LieAlgebra,
}

impl LieCommutatorData {
    pub fn new(g: &LieAlgebra) -> Result<Self> {
        let (quotient, coords) = g.quotient(&g.center())?;
        let derived = g.derived_subalgebra();
        let derived_algebra = g.restrict(&derived)?;
        Ok(LieCommutatorData {
            quotient,
            coords,
            derived,
            derived_algebra,
        })
    }

    /// `c(x̄, ȳ) = [x, y]` in derived-subalgebra coordinates, for quotient vectors.
    pub fn commutator(&self, g: &LieAlgebra, x: &[Scalar], y: &[Scalar]) -> Vector {
        let v = g.bracket(&self.coords.lift_vector(x), &self.coords.lift_vector(y));
        self.derived
            .coordinates(&v)
            .expect("brackets lie in the derived subalgebra")
    }
}

/// Checks that `(eta, xi)` is an isoclinism `g ~ h`.
pub fn lie_isoclinism_verify(
    g: &LieAlgebra,
    h: &LieAlgebra,
    eta: &Matrix,
    xi: &Matrix,
) -> Result<Verdict<LieIsoclinismWitness, LieIsoclinismViolation>> {
    if g.field != h.field {
        return Err(Error::FieldMismatch(g.field, h.field));
    }
    let dg = LieCommutatorData::new(g)?;
    let dh = LieCommutatorData::new(h)?;
    let shape = |m: &Matrix, r: usize, c: usize, name: &str| -> Result<()> {
        if (m.rows(), m.cols()) != (r, c) {
            return Err(Error::Shape(format!(
                "{name} is {}x{}, expected {r}x{c}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(())
    };
    shape(eta, dh.coords.dim(), dg.coords.dim(), "eta")?;
    shape(xi, dh.derived.dim(), dg.derived.dim(), "xi")?;
    use LieIsoclinismViolation as V;
    if !eta.is_square() || eta.inverse().is_none() {
        return Ok(Verdict::Violated(V::EtaNotBijective));
    }
    if !xi.is_square() || xi.inverse().is_none() {
        return Ok(Verdict::Violated(V::XiNotBijective));
    }
    if let Some((i, j)) = dg.quotient.hom_violation(&dh.quotient, eta) {
        return Ok(Verdict::Violated(V::EtaNotHomomorphism { i, j }));
    }
    if let Some((i, j)) = dg.derived_algebra.hom_violation(&dh.derived_algebra, xi) {
        return Ok(Verdict::Violated(V::XiNotHomomorphism { i, j }));
    }
    let q = dg.coords.dim();
    let f = g.field;
    for a in 0..q {
        for b in 0..q {
            let ea = crate::linalg::unit_vector(f, q, a);
            let eb = crate::linalg::unit_vector(f, q, b);
            let lhs = xi.apply(&dg.commutator(g, &ea, &eb));
            let rhs = dh.commutator(h, &eta.apply(&ea), &eta.apply(&eb));
            if !is_zero_vector(&sub_vectors(&lhs, &rhs)) {
                return Ok(Verdict::Violated(V::SquareFails { a, b }));
            }
        }
    }
    Ok(Verdict::Verified(LieIsoclinismWitness {
        eta: eta.clone(),
        xi: xi.clone(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{abelian, h3, n2, sl2};
    use proptest::prelude::*;

    const Q: FieldSpec = FieldSpec::Rational;

    fn v(xs: &[i64]) -> Vector {
        xs.iter().map(|&x| Q.from_i64(x)).collect()
    }

    #[test]
    fn abelian_is_valid() {
        assert!(abelian(Q, 3).validate().is_valid());
    }

    #[test]
    fn alternating_violation_detected() {
        let mut t = vec![Q.zero(); 27];
        t[(1 * 3 + 1) * 3 + 2] = Q.one();
        let r = validate_lie(Q, 3, &t);
        assert!(r
            .violations
            .contains(&LieViolation::NotAlternating { i: 1 }));
    }

    /// Independent expansion of the cyclic Jacobi sum for a 3-dimensional
    /// antisymmetric bracket given on the pairs (0,1), (0,2), (1,2).
    fn jacobi_oracle(b01: [i64; 3], b02: [i64; 3], b12: [i64; 3]) -> [i64; 3] {
        let br = |i: usize, j: usize| -> [i64; 3] {
            match (i, j) {
                (0, 1) => b01,
                (0, 2) => b02,
                (1, 2) => b12,
                (1, 0) => b01.map(|x| -x),
                (2, 0) => b02.map(|x| -x),
                (2, 1) => b12.map(|x| -x),
                _ => [0; 3],
            }
        };
        let br_vec = |i: usize, y: [i64; 3]| -> [i64; 3] {
            let mut out = [0; 3];
            for (m, &ym) in y.iter().enumerate() {
                let c = br(i, m);
                for k in 0..3 {
                    out[k] += ym * c[k];
                }
            }
            out
        };
        let a = br_vec(0, br(1, 2));
        let b = br_vec(1, br(2, 0));
        let c = br_vec(2, br(0, 1));
        [a[0] + b[0] + c[0], a[1] + b[1] + c[1], a[2] + b[2] + c[2]]
    }

    #[test]
    fn cyclic_triple_bracket_satisfies_jacobi() {
        // [e1,e2]=e3, [e1,e3]=e2, [e2,e3]=e1: the cyclic sum vanishes.
        assert_eq!(jacobi_oracle([0, 0, 1], [0, 1, 0], [1, 0, 0]), [0, 0, 0]);
        let g = LieAlgebra::from_integer_brackets(
            Q,
            3,
            &[(0, 1, &[0, 0, 1]), (0, 2, &[0, 1, 0]), (1, 2, &[1, 0, 0])],
        );
        assert!(g.is_ok());
    }

    #[test]
    fn jacobi_violation_detected() {
        // [e1,e2]=e3, [e2,e3]=e2
        assert_eq!(jacobi_oracle([0, 0, 1], [0, 0, 0], [0, 1, 0]), [0, 0, 1]);
        let t =
            LieAlgebra::tensor_from_brackets(Q, 3, &[(0, 1, v(&[0, 0, 1])), (1, 2, v(&[0, 1, 0]))])
                .unwrap();
        let r = validate_lie(Q, 3, &t);
        assert_eq!(
            r.violations,
            vec![LieViolation::Jacobi { i: 0, j: 1, k: 2 }]
        );
    }

    #[test]
    fn brackets_of_named_algebras() {
        let h = h3(Q);
        assert_eq!(h.bracket(&v(&[1, 0, 0]), &v(&[0, 1, 0])), v(&[0, 0, 1]));
        let s = sl2(Q).unwrap();
        // basis (h, e, f)
        assert_eq!(s.bracket(&v(&[0, 1, 0]), &v(&[0, 0, 1])), v(&[1, 0, 0]));
        let x = v(&[3, -1, 2]);
        assert!(is_zero_vector(&s.bracket(&x, &x)));
    }

    #[test]
    fn centers() {
        assert!(abelian(Q, 2).center().is_full());
        assert_eq!(h3(Q).center(), Subspace::span(Q, 3, &[v(&[0, 0, 1])]));
        assert!(sl2(Q).unwrap().center().is_zero());
    }

    #[test]
    fn derived_subalgebras() {
        assert!(abelian(Q, 3).derived_subalgebra().is_zero());
        assert_eq!(
            h3(Q).derived_subalgebra(),
            Subspace::span(Q, 3, &[v(&[0, 0, 1])])
        );
        assert!(sl2(Q).unwrap().derived_subalgebra().is_full());
        assert_eq!(n2(Q).derived_subalgebra().dim(), 1);
    }

    #[test]
    fn series_examples() {
        let lc = h3(Q).series(SeriesKind::LowerCentral);
        assert_eq!(lc.dims()[..3], [3, 1, 0]);
        assert_eq!(lc.index, Some(2));
        let a = abelian(Q, 4);
        assert_eq!(a.series(SeriesKind::LowerCentral).index, Some(1));
        assert_eq!(a.series(SeriesKind::Derived).index, Some(1));
        let s = sl2(Q).unwrap();
        assert_eq!(s.series(SeriesKind::LowerCentral).index, None);
        assert_eq!(s.series(SeriesKind::Derived).index, None);
        // n2 is solvable of length 2 but not nilpotent
        assert_eq!(n2(Q).series(SeriesKind::Derived).index, Some(2));
        assert_eq!(n2(Q).series(SeriesKind::LowerCentral).index, None);
    }

    #[test]
    fn derivation_algebra_dims() {
        let d1 = abelian(Q, 1).derivation_algebra();
        assert_eq!(d1.dim(), 1);
        assert!(d1.algebra.is_abelian());
        assert_eq!(sl2(Q).unwrap().derivation_algebra().dim(), 3);
        assert_eq!(h3(Q).derivation_algebra().dim(), 6);
    }

    /// Rank oracle: dim Der(g) = n^2 - rank of the Leibniz system, with the
    /// system assembled from scratch with `i, j` over all ordered pairs.
    fn der_dim_oracle(g: &LieAlgebra) -> usize {
        let n = g.dim();
        let f = g.field();
        let mut rows = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut row = zero_vector(f, n * n);
                    for m in 0..n {
                        // D[k][m] * c_ij^m
                        row[k * n + m] = &row[k * n + m] + &g.structure_constants(i, j)[m];
                        // - D[m][i] * c_mj^k
                        row[m * n + i] = &row[m * n + i] - &g.structure_constants(m, j)[k];
                        // - D[m][j] * c_im^k
                        row[m * n + j] = &row[m * n + j] - &g.structure_constants(i, m)[k];
                    }
                    rows.push(row);
                }
            }
        }
        n * n - Matrix::from_rows(f, n * n, &rows).unwrap().rank()
    }

    #[test]
    fn derivation_dims_match_rank_oracle() {
        for g in [
            abelian(Q, 2),
            h3(Q),
            sl2(Q).unwrap(),
            n2(Q),
            h3(Q).direct_sum(&abelian(Q, 1)).unwrap(),
        ] {
            let d = g.derivation_algebra();
            assert_eq!(d.dim(), der_dim_oracle(&g));
            for m in &d.basis {
                assert!(g.is_derivation(m));
            }
            assert!(d.algebra.validate().is_valid());
        }
    }

    #[test]
    fn inner_derivations_examples() {
        let a = abelian(Q, 2);
        assert!(a.inner_derivations(&a.derivation_algebra()).is_zero());
        let s = sl2(Q).unwrap();
        let ds = s.derivation_algebra();
        assert!(s.inner_derivations(&ds).is_full());
        let h = h3(Q);
        assert_eq!(h.inner_derivations(&h.derivation_algebra()).dim(), 2);
    }

    #[test]
    fn inner_derivations_form_an_ideal() {
        for g in [h3(Q), sl2(Q).unwrap(), n2(Q)] {
            let der = g.derivation_algebra();
            let inner = g.inner_derivations(&der);
            for d in &der.basis {
                for i in 0..g.dim() {
                    // [D, ad_x] = ad_{D x}
                    let lhs = d.commutator(&g.ad(i));
                    let rhs = g.ad_of(&d.column(i));
                    assert_eq!(lhs, rhs);
                    assert!(inner.contains(&der.coordinates(&lhs).unwrap()));
                }
            }
        }
    }

    #[test]
    fn lower_central_terms_are_ideals() {
        for g in [h3(Q), n2(Q), sl2(Q).unwrap()] {
            let s = g.series(SeriesKind::LowerCentral);
            for w in s.terms.windows(2) {
                assert!(w[1].is_subspace_of(&w[0]));
                assert!(g.is_ideal(&w[1]));
            }
        }
    }

    #[test]
    fn isoclinism_reflexive() {
        for g in [h3(Q), sl2(Q).unwrap(), n2(Q), abelian(Q, 2)] {
            let d = LieCommutatorData::new(&g).unwrap();
            let eta = Matrix::identity(Q, d.coords.dim());
            let xi = Matrix::identity(Q, d.derived.dim());
            assert!(lie_isoclinism_verify(&g, &g, &eta, &xi)
                .unwrap()
                .is_verified());
        }
    }

    #[test]
    fn abelian_algebras_are_isoclinic() {
        let eta = Matrix::zeros(Q, 0, 0);
        let r = lie_isoclinism_verify(&abelian(Q, 1), &abelian(Q, 4), &eta, &eta).unwrap();
        assert!(r.is_verified());
    }

    #[test]
    fn h3_not_isoclinic_to_abelian() {
        // h3/Z is 2-dimensional and a3/Z is 0-dimensional, so no eta is bijective.
        let eta = Matrix::zeros(Q, 0, 2);
        let xi = Matrix::zeros(Q, 0, 1);
        let r = lie_isoclinism_verify(&h3(Q), &abelian(Q, 3), &eta, &xi).unwrap();
        assert_eq!(
            r,
            Verdict::Violated(LieIsoclinismViolation::EtaNotBijective)
        );
        assert!(matches!(
            lie_isoclinism_verify(&h3(Q), &abelian(Q, 3), &Matrix::zeros(Q, 2, 2), &xi),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn quotient_and_restrict() {
        let h = h3(Q);
        let (q, coords) = h.quotient(&h.center()).unwrap();
        assert_eq!(q.dim(), 2);
        assert!(q.is_abelian());
        assert_eq!(coords.dim(), 2);
        let z = h.restrict(&h.center()).unwrap();
        assert_eq!(z.dim(), 1);
        assert!(h.quotient(&Subspace::span(Q, 3, &[v(&[1, 0, 0])])).is_err());
    }

    proptest! {
        #[test]
        fn jacobi_on_random_triples(x in prop::collection::vec(-3i64..4, 3), y in prop::collection::vec(-3i64..4, 3), z in prop::collection::vec(-3i64..4, 3)) {
            for g in [h3(Q), sl2(Q).unwrap(), n2(Q).direct_sum(&abelian(Q, 1)).unwrap()] {
                let (x, y, z) = (v(&x), v(&y), v(&z));
                let mut s = g.bracket(&x, &g.bracket(&y, &z));
                axpy(&mut s, &Q.one(), &g.bracket(&y, &g.bracket(&z, &x)));
                axpy(&mut s, &Q.one(), &g.bracket(&z, &g.bracket(&x, &y)));
                prop_assert!(is_zero_vector(&s));
            }
        }
    }
}
