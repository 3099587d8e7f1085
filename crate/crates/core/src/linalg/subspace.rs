use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};

use super::matrix::{axpy, is_zero_vector, rref, unit_vector, zero_vector, Matrix, Vector};

/// A linear subspace of `K^n`, stored by its canonical basis: the nonzero
/// rows of a reduced row echelon form. Equality is entrywise basis equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: FieldSpec, ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Matrix::zeros(field, 0, ambient_dim),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: FieldSpec, ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Matrix::identity(field, ambient_dim),
            pivots: (0..ambient_dim).collect(),
        }
    }

    /// Span of arbitrary vectors of length `ambient_dim`.
    pub fn span(field: FieldSpec, ambient_dim: usize, vectors: &[Vector]) -> Self {
        let m = Matrix::from_rows(field, ambient_dim, vectors).expect("span: vector lengths");
        Self::row_space(&m)
    }

    pub fn row_space(m: &Matrix) -> Self {
        let r = rref(m);
        let rows: Vec<Vector> = (0..r.rank).map(|i| r.matrix.row(i).to_vec()).collect();
        Subspace {
            ambient_dim: m.cols(),
            basis: Matrix::from_rows(m.field(), m.cols(), &rows).expect("rref rows"),
            pivots: r.pivots,
        }
    }

    /// Span of the columns of `m`.
    pub fn column_space(m: &Matrix) -> Self {
        Self::row_space(&m.transpose())
    }

    pub fn field(&self) -> FieldSpec {
        self.basis.field()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    /// Canonical basis, one vector per row.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        self.basis.row(i).to_vec()
    }

    pub fn basis_vectors(&self) -> Vec<Vector> {
        self.basis.row_vectors()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// `v` minus its component along the canonical basis; zero iff `v` is in the space.
    pub fn reduce(&self, v: &[Scalar]) -> Vector {
        assert_eq!(
            v.len(),
            self.ambient_dim,
            "vector length vs ambient dimension"
        );
        let mut r = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            let c = -&r[p];
            axpy(&mut r, &c, self.basis.row(i));
        }
        r
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        is_zero_vector(&self.reduce(v))
    }

    /// Coordinates of `v` in the canonical basis, `None` if `v` is outside.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vector> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    /// The vector with the given canonical-basis coordinates.
    pub fn from_coordinates(&self, coords: &[Scalar]) -> Vector {
        assert_eq!(coords.len(), self.dim());
        let mut v = zero_vector(self.field(), self.ambient_dim);
        for (i, c) in coords.iter().enumerate() {
            axpy(&mut v, c, self.basis.row(i));
        }
        v
    }

    /// `ambient_dim x dim` matrix whose columns are the basis vectors.
    pub fn inclusion(&self) -> Matrix {
        self.basis.transpose()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient_dim == other.ambient_dim
            && (0..self.dim()).all(|i| other.contains(self.basis.row(i)))
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::Shape(format!(
                "ambient dimensions {} and {} differ",
                self.ambient_dim, other.ambient_dim
            )));
        }
        if self.field() != other.field() {
            return Err(Error::FieldMismatch(self.field(), other.field()));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        Ok(Subspace::row_space(&self.basis.vstack(&other.basis)))
    }

    /// Intersection via the kernel of `[U^T | V^T]`: a kernel vector `(a, b)`
    /// gives the common element `U^T a = -V^T b`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let stacked = self.inclusion().hstack(&other.inclusion());
        let k = kernel(&stacked);
        let u = self.inclusion();
        let elements: Vec<Vector> = k
            .basis_vectors()
            .iter()
            .map(|kv| u.apply(&kv[..self.dim()]))
            .collect();
        Ok(Subspace::span(self.field(), self.ambient_dim, &elements))
    }

    /// Image under a linear map given as a matrix acting on column vectors.
    pub fn image(&self, map: &Matrix) -> Subspace {
        assert_eq!(map.cols(), self.ambient_dim);
        let imgs: Vec<Vector> = self.basis_vectors().iter().map(|v| map.apply(v)).collect();
        Subspace::span(self.field(), map.rows(), &imgs)
    }

    /// Preimage under `map` of this subspace of its codomain.
    pub fn preimage(&self, map: &Matrix) -> Subspace {
        assert_eq!(map.rows(), self.ambient_dim);
        // v in preimage iff project(map v) = 0
        let q = quotient_coords(self.ambient_dim, self).expect("own ambient");
        kernel(&q.project.mul(map))
    }
}

/// `{v : m v = 0}` as a canonical subspace.
pub fn kernel(m: &Matrix) -> Subspace {
    let field = m.field();
    let n = m.cols();
    let r = rref(m);
    let mut is_pivot = vec![false; n];
    for &p in &r.pivots {
        is_pivot[p] = true;
    }
    let mut vectors = Vec::new();
    for free in (0..n).filter(|&c| !is_pivot[c]) {
        let mut v = unit_vector(field, n, free);
        for (i, &p) in r.pivots.iter().enumerate() {
            v[p] = -r.matrix.get(i, free);
        }
        vectors.push(v);
    }
    Subspace::span(field, n, &vectors)
}

/// Coordinates on `K^n / S`. The complement is spanned by the standard basis
/// vectors at the non-pivot positions of `S`'s canonical basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientCoords {
    pub ambient_dim: usize,
    pub subspace: Subspace,
    /// Non-pivot coordinates, in increasing order; quotient coordinate `k`
    /// corresponds to ambient coordinate `section_indices[k]`.
    pub section_indices: Vec<usize>,
    /// Rows are the chosen complement basis vectors.
    pub section: Matrix,
    /// `quotient_dim x ambient_dim`.
    pub project: Matrix,
    /// `ambient_dim x quotient_dim`, a right inverse of `project`.
    pub lift: Matrix,
}

impl QuotientCoords {
    pub fn dim(&self) -> usize {
        self.section_indices.len()
    }

    pub fn project_vector(&self, v: &[Scalar]) -> Vector {
        self.project.apply(v)
    }

    pub fn lift_vector(&self, q: &[Scalar]) -> Vector {
        self.lift.apply(q)
    }
}

pub fn quotient_coords(ambient_dim: usize, s: &Subspace) -> Result<QuotientCoords> {
    if s.ambient_dim() != ambient_dim {
        return Err(Error::Shape(format!(
            "subspace of K^{} used as a subspace of K^{ambient_dim}",
            s.ambient_dim()
        )));
    }
    let field = s.field();
    let mut is_pivot = vec![false; ambient_dim];
    for &p in s.pivots() {
        is_pivot[p] = true;
    }
    let section_indices: Vec<usize> = (0..ambient_dim).filter(|&c| !is_pivot[c]).collect();
    let q = section_indices.len();
    let mut project = Matrix::zeros(field, q, ambient_dim);
    let mut lift = Matrix::zeros(field, ambient_dim, q);
    for (k, &j) in section_indices.iter().enumerate() {
        // (v - sum_i v[p_i] b_i)[j]
        project.set(k, j, field.one());
        for (i, &p) in s.pivots().iter().enumerate() {
            project.set(k, p, -s.basis().get(i, j));
        }
        lift.set(j, k, field.one());
    }
    let section = lift.transpose();
    Ok(QuotientCoords {
        ambient_dim,
        subspace: s.clone(),
        section_indices,
        section,
        project,
        lift,
    })
}
