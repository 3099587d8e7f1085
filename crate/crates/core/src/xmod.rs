//! Crossed modules of Lie algebras `d: L1 -> L0` with an action of `L0` on `L1`.
//!
//! The action tensor stores the coordinates of `[e_i, f_j]` for basis vectors
//! `e_i` of `L0` and `f_j` of `L1` at `action[(i * n1 + j) * n1 ..]`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::lie::{LieAlgebra, LieViolation, SeriesKind};
use crate::linalg::{
    add_vectors, axpy, is_zero_vector, kernel, sub_vectors, unit_vector, zero_vector, Matrix,
    QuotientCoords, Subspace, Vector,
};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CrossedModule {
    l1: LieAlgebra,
    l0: LieAlgebra,
    boundary: Matrix,
    action: Vec<Scalar>,
}

impl fmt::Debug for CrossedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CrossedModule")
            .field("l1", &self.l1)
            .field("l0", &self.l0)
            .field("boundary", &self.boundary)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum XModViolation {
    Shape(String),
    L1(LieViolation),
    L0(LieViolation),
    BoundaryNotHomomorphism {
        i: usize,
        j: usize,
    },
    /// `[[e_i,e_j], f_k] != [e_i,[e_j,f_k]] - [e_j,[e_i,f_k]]`
    ActionNotRepresentation {
        i: usize,
        j: usize,
        k: usize,
    },
    /// `[e_i,[f_j,f_k]] != [[e_i,f_j],f_k] + [f_j,[e_i,f_k]]`
    ActionNotByDerivations {
        i: usize,
        j: usize,
        k: usize,
    },
    /// CM1: `d([e_i,f_j]) != [e_i, d(f_j)]`
    Equivariance {
        i: usize,
        j: usize,
    },
    /// CM2: `[d(f_i), f_j] != [f_i, f_j]`
    Peiffer {
        i: usize,
        j: usize,
    },
}

impl fmt::Display for XModViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use XModViolation::*;
        match self {
            Shape(s) => write!(f, "shape: {s}"),
            L1(v) => write!(f, "L1: {v}"),
            L0(v) => write!(f, "L0: {v}"),
            BoundaryNotHomomorphism { i, j } => write!(f, "d fails to preserve [f{i},f{j}]"),
            ActionNotRepresentation { i, j, k } => {
                write!(f, "action is not a representation on (e{i},e{j},f{k})")
            }
            ActionNotByDerivations { i, j, k } => {
                write!(f, "e{i} does not act by a derivation on (f{j},f{k})")
            }
            Equivariance { i, j } => write!(f, "CM1 fails: d([e{i},f{j}]) != [e{i},d(f{j})]"),
            Peiffer { i, j } => write!(f, "CM2 fails: [d(f{i}),f{j}] != [f{i},f{j}]"),
        }
    }
}

impl XModViolation {
    /// Short axiom name, for reports.
    pub fn axiom(&self) -> &'static str {
        use XModViolation::*;
        match self {
            Shape(_) => "shape",
            L1(_) => "lie_l1",
            L0(_) => "lie_l0",
            BoundaryNotHomomorphism { .. } => "boundary_homomorphism",
            ActionNotRepresentation { .. } => "action_representation",
            ActionNotByDerivations { .. } => "action_derivation",
            Equivariance { .. } => "cm1_equivariance",
            Peiffer { .. } => "cm2_peiffer",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct XModReport {
    pub violations: Vec<XModViolation>,
}

impl XModReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn summary(&self) -> String {
        self.violations
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Exhaustive basis-level check of every crossed-module axiom.
pub fn validate_xmod(x: &CrossedModule) -> XModReport {
    let mut report = XModReport::default();
    let v = &mut report.violations;
    v.extend(
        x.l1.validate()
            .violations
            .into_iter()
            .map(XModViolation::L1),
    );
    v.extend(
        x.l0.validate()
            .violations
            .into_iter()
            .map(XModViolation::L0),
    );
    let (n1, n0) = (x.l1.dim(), x.l0.dim());
    let f = x.field();
    if !v.is_empty() {
        return report;
    }
    if let Some((i, j)) = x.l1.hom_violation(&x.l0, &x.boundary) {
        v.push(XModViolation::BoundaryNotHomomorphism { i, j });
    }
    let e = |i: usize| unit_vector(f, n0, i);
    let fv = |j: usize| unit_vector(f, n1, j);
    for i in 0..n0 {
        for j in 0..n0 {
            for k in 0..n1 {
                let lhs = x.act(x.l0.structure_constants(i, j), &fv(k));
                let rhs = sub_vectors(
                    &x.act(&e(i), x.action_constants(j, k)),
                    &x.act(&e(j), x.action_constants(i, k)),
                );
                if lhs != rhs {
                    v.push(XModViolation::ActionNotRepresentation { i, j, k });
                }
            }
        }
    }
    for i in 0..n0 {
        for j in 0..n1 {
            for k in 0..n1 {
                let lhs = x.act(&e(i), x.l1.structure_constants(j, k));
                let rhs = add_vectors(
                    &x.l1.bracket(x.action_constants(i, j), &fv(k)),
                    &x.l1.bracket(&fv(j), x.action_constants(i, k)),
                );
                if lhs != rhs {
                    v.push(XModViolation::ActionNotByDerivations { i, j, k });
                }
            }
        }
    }
    for i in 0..n0 {
        for j in 0..n1 {
            let lhs = x.boundary.apply(x.action_constants(i, j));
            let rhs = x.l0.bracket(&e(i), &x.boundary.column(j));
            if lhs != rhs {
                v.push(XModViolation::Equivariance { i, j });
            }
        }
    }
    for i in 0..n1 {
        for j in 0..n1 {
            let lhs = x.act(&x.boundary.column(i), &fv(j));
            if lhs != x.l1.structure_constants(i, j) {
                v.push(XModViolation::Peiffer { i, j });
            }
        }
    }
    report
}

impl CrossedModule {
    /// Assembles a candidate without checking the axioms (shapes are checked).
    pub fn from_parts_unchecked(
        l1: LieAlgebra,
        l0: LieAlgebra,
        boundary: Matrix,
        action: Vec<Scalar>,
    ) -> Result<Self> {
        let (n1, n0) = (l1.dim(), l0.dim());
        let f = l1.field();
        if l0.field() != f {
            return Err(Error::FieldMismatch(f, l0.field()));
        }
        if boundary.field() != f {
            return Err(Error::FieldMismatch(f, boundary.field()));
        }
        if (boundary.rows(), boundary.cols()) != (n0, n1) {
            return Err(Error::Shape(format!(
                "boundary is {}x{}, expected {n0}x{n1}",
                boundary.rows(),
                boundary.cols()
            )));
        }
        if action.len() != n0 * n1 * n1 {
            return Err(Error::Shape(format!(
                "action tensor has {} entries, expected {}",
                action.len(),
                n0 * n1 * n1
            )));
        }
        if action.iter().any(|a| a.field() != f) {
            return Err(Error::Shape("action tensor mixes fields".into()));
        }
        Ok(CrossedModule {
            l1,
            l0,
            boundary,
            action,
        })
    }

    /// Checked construction.
    pub fn new(
        l1: LieAlgebra,
        l0: LieAlgebra,
        boundary: Matrix,
        action: Vec<Scalar>,
    ) -> Result<Self> {
        let x = Self::from_parts_unchecked(l1, l0, boundary, action)?;
        let report = validate_xmod(&x);
        if !report.is_valid() {
            return Err(Error::InvalidXMod(report.summary()));
        }
        Ok(x)
    }

    /// Action given as matrices: `action_maps[i]` is the `n1 x n1` matrix of `[e_i, -]`.
    pub fn from_action_matrices(
        l1: LieAlgebra,
        l0: LieAlgebra,
        boundary: Matrix,
        action_maps: &[Matrix],
    ) -> Result<Self> {
        let n1 = l1.dim();
        if action_maps.len() != l0.dim() {
            return Err(Error::Shape(
                "one action matrix per basis vector of L0".into(),
            ));
        }
        let mut t = Vec::with_capacity(l0.dim() * n1 * n1);
        for m in action_maps {
            if (m.rows(), m.cols()) != (n1, n1) {
                return Err(Error::Shape("action matrix shape".into()));
            }
            for j in 0..n1 {
                t.extend(m.column(j));
            }
        }
        Self::new(l1, l0, boundary, t)
    }

    /// The zero crossed module `0 -> 0`.
    pub fn zero(field: FieldSpec) -> Self {
        CrossedModule {
            l1: LieAlgebra::abelian(field, 0),
            l0: LieAlgebra::abelian(field, 0),
            boundary: Matrix::zeros(field, 0, 0),
            action: Vec::new(),
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.l1.field()
    }

    pub fn l1(&self) -> &LieAlgebra {
        &self.l1
    }

    pub fn l0(&self) -> &LieAlgebra {
        &self.l0
    }

    pub fn boundary(&self) -> &Matrix {
        &self.boundary
    }

    pub fn action_tensor(&self) -> &[Scalar] {
        &self.action
    }

    /// `(dim L1, dim L0)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.l1.dim(), self.l0.dim())
    }

    pub fn total_dim(&self) -> usize {
        self.l1.dim() + self.l0.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn validate(&self) -> XModReport {
        validate_xmod(self)
    }

    /// Coordinates of `[e_i, f_j]`.
    pub fn action_constants(&self, i: usize, j: usize) -> &[Scalar] {
        let n1 = self.l1.dim();
        &self.action[(i * n1 + j) * n1..(i * n1 + j + 1) * n1]
    }

    /// `[x, y]` for `x` in `L0`, `y` in `L1`.
    pub fn act(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        let (n1, n0) = self.dims();
        assert_eq!(x.len(), n0);
        assert_eq!(y.len(), n1);
        let mut out = zero_vector(self.field(), n1);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() {
                    axpy(&mut out, &(xi * yj), self.action_constants(i, j));
                }
            }
        }
        out
    }

    /// The `n1 x n1` matrix of `[x, -]`.
    pub fn action_matrix(&self, x: &[Scalar]) -> Matrix {
        let n1 = self.l1.dim();
        let f = self.field();
        let cols: Vec<Vector> = (0..n1)
            .map(|j| self.act(x, &unit_vector(f, n1, j)))
            .collect();
        Matrix::from_columns(f, n1, &cols)
    }

    /// The `n1 x n0` matrix of `[-, y]`.
    pub fn coaction_matrix(&self, y: &[Scalar]) -> Matrix {
        let (n1, n0) = self.dims();
        let f = self.field();
        let cols: Vec<Vector> = (0..n0)
            .map(|i| self.act(&unit_vector(f, n0, i), y))
            .collect();
        Matrix::from_columns(f, n1, &cols)
    }

    pub fn apply_boundary(&self, y: &[Scalar]) -> Vector {
        self.boundary.apply(y)
    }

    /// `span{[a, b] : a in A, b in B}` inside `L1`.
    pub fn action_span(&self, a: &Subspace, b: &Subspace) -> Subspace {
        let mut vs = Vec::new();
        for x in a.basis_vectors() {
            for y in b.basis_vectors() {
                let v = self.act(&x, &y);
                if !is_zero_vector(&v) {
                    vs.push(v);
                }
            }
        }
        Subspace::span(self.field(), self.l1.dim(), &vs)
    }

    fn full1(&self) -> Subspace {
        Subspace::full(self.field(), self.l1.dim())
    }

    fn full0(&self) -> Subspace {
        Subspace::full(self.field(), self.l0.dim())
    }

    /// `L1^{L0}`, elements of `L1` fixed by the whole action.
    pub fn fixed_points(&self) -> Subspace {
        let (n1, n0) = self.dims();
        let mut m = Matrix::zeros(self.field(), n0 * n1, n1);
        for i in 0..n0 {
            for j in 0..n1 {
                for (k, a) in self.action_constants(i, j).iter().enumerate() {
                    m.set(i * n1 + k, j, a.clone());
                }
            }
        }
        kernel(&m)
    }

    /// `St_{L0}(L1)`, elements of `L0` acting trivially.
    pub fn stabilizer(&self) -> Subspace {
        let (n1, n0) = self.dims();
        let mut m = Matrix::zeros(self.field(), n1 * n1, n0);
        for i in 0..n0 {
            for j in 0..n1 {
                for (k, a) in self.action_constants(i, j).iter().enumerate() {
                    m.set(j * n1 + k, i, a.clone());
                }
            }
        }
        kernel(&m)
    }

    /// `St_{L0}(L1) ∩ Z(L0)`, the degree-0 part of the center.
    pub fn central_stabilizer(&self) -> Subspace {
        self.stabilizer()
            .intersect(&self.l0.center())
            .expect("same ambient")
    }

    /// `Z(L) = (L1^{L0} -> St_{L0}(L1) ∩ Z(L0))`, checked to be an ideal.
    pub fn center(&self) -> Result<SubXMod> {
        SubXMod::ideal(self, self.fixed_points(), self.central_stabilizer())
            .map_err(|e| Error::Internal(format!("center is not an ideal: {e}")))
    }

    /// `D_{L0}(L1)`, the span of all `[l0, l1]`.
    pub fn displacement(&self) -> Subspace {
        self.action_span(&self.full0(), &self.full1())
    }

    /// `[L,L] = (D_{L0}(L1) -> [L0,L0])`.
    pub fn commutator(&self) -> Result<SubXMod> {
        SubXMod::ideal(self, self.displacement(), self.l0.derived_subalgebra())
            .map_err(|e| Error::Internal(format!("commutator is not an ideal: {e}")))
    }

    /// `[M, N] = (span{[m0,n1], [n0,m1]} -> [M0,N0])` for ideals `M`, `N`.
    pub fn commutator_of_ideals(&self, m: &SubXMod, n: &SubXMod) -> Result<SubXMod> {
        for (name, s) in [("first", m), ("second", n)] {
            if let Some(why) = self.ideal_violation(&s.s1, &s.s0) {
                return Err(Error::Precondition(format!(
                    "{name} argument is not an ideal: {why}"
                )));
            }
        }
        let a = self.action_span(&m.s0, &n.s1);
        let b = self.action_span(&n.s0, &m.s1);
        let s1 = a.sum(&b)?;
        let s0 = self.l0.bracket_span(&m.s0, &n.s0);
        SubXMod::ideal(self, s1, s0)
            .map_err(|e| Error::Internal(format!("commutator of ideals is not an ideal: {e}")))
    }

    /// Why `(s1, s0)` fails to be a subcrossed module, if it does.
    pub fn subxmod_violation(&self, s1: &Subspace, s0: &Subspace) -> Option<String> {
        if s1.ambient_dim() != self.l1.dim() || s0.ambient_dim() != self.l0.dim() {
            return Some("ambient dimensions do not match".into());
        }
        if !self.l1.is_subalgebra(s1) {
            return Some("degree-1 part is not a subalgebra".into());
        }
        if !self.l0.is_subalgebra(s0) {
            return Some("degree-0 part is not a subalgebra".into());
        }
        if !s1.image(&self.boundary).is_subspace_of(s0) {
            return Some("boundary does not map M1 into M0".into());
        }
        if !self.action_span(s0, s1).is_subspace_of(s1) {
            return Some("M0 does not act on M1".into());
        }
        None
    }

    /// Why `(s1, s0)` fails to be an ideal, if it does.
    pub fn ideal_violation(&self, s1: &Subspace, s0: &Subspace) -> Option<String> {
        if let Some(v) = self.subxmod_violation(s1, s0) {
            return Some(v);
        }
        if !self.l1.is_ideal(s1) {
            return Some("M1 is not an ideal of L1".into());
        }
        if !self.l0.is_ideal(s0) {
            return Some("M0 is not an ideal of L0".into());
        }
        if !self.action_span(&self.full0(), s1).is_subspace_of(s1) {
            return Some("[L0, M1] is not contained in M1".into());
        }
        if !self.action_span(s0, &self.full1()).is_subspace_of(s1) {
            return Some("[M0, L1] is not contained in M1".into());
        }
        None
    }

    /// A subcrossed module as a crossed module in its own canonical bases.
    pub fn restrict(&self, m: &SubXMod) -> Result<CrossedModule> {
        if let Some(why) = self.subxmod_violation(&m.s1, &m.s0) {
            return Err(Error::Precondition(why));
        }
        let l1 = self.l1.restrict(&m.s1)?;
        let l0 = self.l0.restrict(&m.s0)?;
        let b1 = m.s1.basis_vectors();
        let b0 = m.s0.basis_vectors();
        let f = self.field();
        let cols: Vec<Vector> = b1
            .iter()
            .map(|y| {
                m.s0.coordinates(&self.boundary.apply(y))
                    .expect("d(M1) in M0")
            })
            .collect();
        let boundary = Matrix::from_columns(f, m.s0.dim(), &cols);
        let mut action = Vec::new();
        for x in &b0 {
            for y in &b1 {
                action.extend(m.s1.coordinates(&self.act(x, y)).expect("M0 acts on M1"));
            }
        }
        let r = CrossedModule::from_parts_unchecked(l1, l0, boundary, action)?;
        check_valid(&r, "restriction")?;
        Ok(r)
    }

    pub fn quotient(&self, n: &SubXMod) -> Result<Quotient> {
        if let Some(why) = self.ideal_violation(&n.s1, &n.s0) {
            return Err(Error::Precondition(format!(
                "quotient by a non-ideal: {why}"
            )));
        }
        let (l1, q1) = self.l1.quotient(&n.s1)?;
        let (l0, q0) = self.l0.quotient(&n.s0)?;
        let boundary = q0.project.mul(&self.boundary).mul(&q1.lift);
        let mut action = Vec::with_capacity(q0.dim() * q1.dim() * q1.dim());
        for a in 0..q0.dim() {
            let x = q0.lift.column(a);
            for b in 0..q1.dim() {
                let y = q1.lift.column(b);
                action.extend(q1.project_vector(&self.act(&x, &y)));
            }
        }
        let module = CrossedModule::from_parts_unchecked(l1, l0, boundary, action)?;
        check_valid(&module, "quotient")?;
        let projection = XModMorphism {
            alpha: q1.project.clone(),
            beta: q0.project.clone(),
        };
        if let Some(v) = projection.violation(self, &module) {
            return Err(Error::Internal(format!(
                "quotient projection is not a morphism: {v}"
            )));
        }
        Ok(Quotient {
            module,
            projection,
            q1,
            q0,
        })
    }

    /// `L / Z(L)`.
    pub fn central_quotient(&self) -> Result<Quotient> {
        self.quotient(&self.center()?)
    }

    pub fn predicates(&self) -> Result<Predicates> {
        let rank = self.boundary.rank();
        let z = self.center()?;
        Ok(Predicates {
            aspherical: rank == self.l1.dim(),
            simply_connected: rank == self.l0.dim(),
            abelian: z.s1.is_full() && z.s0.is_full(),
            finite_dimensional: true,
        })
    }

    /// Lower central or derived series of ideals, computed until it stabilizes
    /// (at most `dim + 1` steps).
    pub fn series(&self, kind: SeriesKind) -> Result<XModSeries> {
        let whole = SubXMod::whole(self);
        let mut terms = vec![whole.clone()];
        for _ in 0..=self.total_dim() {
            let last = terms.last().expect("nonempty");
            let next = match kind {
                SeriesKind::LowerCentral => self.commutator_of_ideals(&whole, last)?,
                SeriesKind::Derived => self.commutator_of_ideals(last, last)?,
            };
            let stable = next.s1 == last.s1 && next.s0 == last.s0;
            terms.push(next);
            if stable {
                break;
            }
        }
        let index = (1..terms.len()).find(|&k| terms[k].is_zero());
        Ok(XModSeries { kind, terms, index })
    }

    pub fn direct_sum(&self, other: &CrossedModule) -> Result<CrossedModule> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch(self.field(), other.field()));
        }
        let f = self.field();
        let (a1, a0) = self.dims();
        let (b1, b0) = other.dims();
        let l1 = self.l1.direct_sum(&other.l1)?;
        let l0 = self.l0.direct_sum(&other.l0)?;
        let mut boundary = Matrix::zeros(f, a0 + b0, a1 + b1);
        for r in 0..a0 {
            for c in 0..a1 {
                boundary.set(r, c, self.boundary.get(r, c).clone());
            }
        }
        for r in 0..b0 {
            for c in 0..b1 {
                boundary.set(a0 + r, a1 + c, other.boundary.get(r, c).clone());
            }
        }
        let n1 = a1 + b1;
        let mut action = vec![f.zero(); (a0 + b0) * n1 * n1];
        for i in 0..a0 {
            for j in 0..a1 {
                for (k, x) in self.action_constants(i, j).iter().enumerate() {
                    action[(i * n1 + j) * n1 + k] = x.clone();
                }
            }
        }
        for i in 0..b0 {
            for j in 0..b1 {
                for (k, x) in other.action_constants(i, j).iter().enumerate() {
                    action[((a0 + i) * n1 + a1 + j) * n1 + a1 + k] = x.clone();
                }
            }
        }
        let x = CrossedModule::from_parts_unchecked(l1, l0, boundary, action)?;
        check_valid(&x, "direct sum")?;
        Ok(x)
    }

    /// `M/(M∩N) ≅ (M+N)/N` for a subcrossed module `M` and an ideal `N`, with
    /// the canonical map (inclusion followed by projection) checked to be an
    /// isomorphism.
    pub fn second_isomorphism(&self, m: &SubXMod, n: &SubXMod) -> Result<SecondIsomorphism> {
        if let Some(why) = self.subxmod_violation(&m.s1, &m.s0) {
            return Err(Error::Precondition(format!(
                "M is not a subcrossed module: {why}"
            )));
        }
        if let Some(why) = self.ideal_violation(&n.s1, &n.s0) {
            return Err(Error::Precondition(format!("N is not an ideal: {why}")));
        }
        let f = self.field();
        let meet = SubXMod::new(self, m.s1.intersect(&n.s1)?, m.s0.intersect(&n.s0)?)?;
        let join = SubXMod::new(self, m.s1.sum(&n.s1)?, m.s0.sum(&n.s0)?)?;
        let m_mod = self.restrict(m)?;
        let j_mod = self.restrict(&join)?;
        let in_coords = |outer: &Subspace, inner: &Subspace| -> Subspace {
            let cs: Vec<Vector> = inner
                .basis_vectors()
                .iter()
                .map(|v| {
                    outer
                        .coordinates(v)
                        .expect("inner space contained in outer")
                })
                .collect();
            Subspace::span(f, outer.dim(), &cs)
        };
        let meet_in_m = SubXMod::ideal(
            &m_mod,
            in_coords(&m.s1, &meet.s1),
            in_coords(&m.s0, &meet.s0),
        )?;
        let n_in_join = SubXMod::ideal(
            &j_mod,
            in_coords(&join.s1, &n.s1),
            in_coords(&join.s0, &n.s0),
        )?;
        let left = m_mod.quotient(&meet_in_m)?;
        let right = j_mod.quotient(&n_in_join)?;
        let canonical =
            |lq: &QuotientCoords, rq: &QuotientCoords, ms: &Subspace, js: &Subspace| -> Matrix {
                let cols: Vec<Vector> = (0..lq.dim())
                    .map(|a| {
                        let ambient = ms.from_coordinates(&lq.lift.column(a));
                        rq.project_vector(&js.coordinates(&ambient).expect("M inside M+N"))
                    })
                    .collect();
                Matrix::from_columns(f, rq.dim(), &cols)
            };
        let iso = XModMorphism {
            alpha: canonical(&left.q1, &right.q1, &m.s1, &join.s1),
            beta: canonical(&left.q0, &right.q0, &m.s0, &join.s0),
        };
        if let Some(v) = iso.violation(&left.module, &right.module) {
            return Err(Error::Internal(format!(
                "canonical map is not a morphism: {v}"
            )));
        }
        if !iso.is_bijective() {
            return Err(Error::Internal("canonical map is not bijective".into()));
        }
        Ok(SecondIsomorphism { left, right, iso })
    }

    /// Checks the two subspace identities that hold for simply connected and
    /// aspherical crossed modules.
    pub fn simply_connected_aspherical_check(&self) -> Result<ComponentIdentities> {
        let p = self.predicates()?;
        let mut report = ComponentIdentities {
            simply_connected: p.simply_connected,
            aspherical: p.aspherical,
            ..Default::default()
        };
        if p.simply_connected {
            report.fixed_points_equal_center = Some(self.fixed_points() == self.l1.center());
            report.displacement_equals_derived =
                Some(self.displacement() == self.l1.derived_subalgebra());
        }
        if p.aspherical {
            let z = self.l0.center();
            report.center_meets_stabilizer_in_center = Some(self.stabilizer().intersect(&z)? == z);
        }
        Ok(report)
    }
}

fn check_valid(x: &CrossedModule, what: &str) -> Result<()> {
    let r = validate_xmod(x);
    if r.is_valid() {
        Ok(())
    } else {
        Err(Error::Internal(format!(
            "{what} is not a crossed module: {}",
            r.summary()
        )))
    }
}

/// A pair of subspaces `(M1, M0)` that has been checked to be a subcrossed
/// module (and, if `ideal`, an ideal) of some parent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubXMod {
    pub s1: Subspace,
    pub s0: Subspace,
    pub ideal: bool,
}

impl SubXMod {
    pub fn new(parent: &CrossedModule, s1: Subspace, s0: Subspace) -> Result<Self> {
        if let Some(why) = parent.subxmod_violation(&s1, &s0) {
            return Err(Error::Precondition(why));
        }
        let ideal = parent.ideal_violation(&s1, &s0).is_none();
        Ok(SubXMod { s1, s0, ideal })
    }

    pub fn ideal(parent: &CrossedModule, s1: Subspace, s0: Subspace) -> Result<Self> {
        if let Some(why) = parent.ideal_violation(&s1, &s0) {
            return Err(Error::Precondition(why));
        }
        Ok(SubXMod {
            s1,
            s0,
            ideal: true,
        })
    }

    pub fn whole(parent: &CrossedModule) -> Self {
        SubXMod {
            s1: parent.full1(),
            s0: parent.full0(),
            ideal: true,
        }
    }

    pub fn zero(parent: &CrossedModule) -> Self {
        let f = parent.field();
        SubXMod {
            s1: Subspace::zero(f, parent.l1.dim()),
            s0: Subspace::zero(f, parent.l0.dim()),
            ideal: true,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.s1.is_zero() && self.s0.is_zero()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.s1.dim(), self.s0.dim())
    }

    pub fn is_contained_in(&self, other: &SubXMod) -> bool {
        self.s1.is_subspace_of(&other.s1) && self.s0.is_subspace_of(&other.s0)
    }

    pub fn same_spaces(&self, other: &SubXMod) -> bool {
        self.s1 == other.s1 && self.s0 == other.s0
    }
}

/// A pair `(alpha: L1 -> L1', beta: L0 -> L0')` of linear maps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct XModMorphism {
    pub alpha: Matrix,
    pub beta: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismViolation {
    Shape(String),
    AlphaNotHomomorphism {
        i: usize,
        j: usize,
    },
    BetaNotHomomorphism {
        i: usize,
        j: usize,
    },
    /// `beta d != d' alpha` on basis vector `f_j`.
    BoundaryNotCompatible {
        j: usize,
    },
    /// `alpha([e_i, f_j]) != [beta e_i, alpha f_j]`.
    ActionNotCompatible {
        i: usize,
        j: usize,
    },
}

impl fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use MorphismViolation::*;
        match self {
            Shape(s) => write!(f, "shape: {s}"),
            AlphaNotHomomorphism { i, j } => write!(f, "alpha fails to preserve [f{i},f{j}]"),
            BetaNotHomomorphism { i, j } => write!(f, "beta fails to preserve [e{i},e{j}]"),
            BoundaryNotCompatible { j } => write!(f, "beta d != d' alpha on f{j}"),
            ActionNotCompatible { i, j } => {
                write!(f, "alpha([e{i},f{j}]) != [beta e{i}, alpha f{j}]")
            }
        }
    }
}

impl XModMorphism {
    pub fn identity(x: &CrossedModule) -> Self {
        let (n1, n0) = x.dims();
        XModMorphism {
            alpha: Matrix::identity(x.field(), n1),
            beta: Matrix::identity(x.field(), n0),
        }
    }

    /// First failed morphism axiom from `source` to `target`, if any.
    pub fn violation(
        &self,
        source: &CrossedModule,
        target: &CrossedModule,
    ) -> Option<MorphismViolation> {
        let (s1, s0) = source.dims();
        let (t1, t0) = target.dims();
        if (self.alpha.rows(), self.alpha.cols()) != (t1, s1)
            || (self.beta.rows(), self.beta.cols()) != (t0, s0)
        {
            return Some(MorphismViolation::Shape(format!(
                "alpha {}x{}, beta {}x{} for dims ({s1},{s0}) -> ({t1},{t0})",
                self.alpha.rows(),
                self.alpha.cols(),
                self.beta.rows(),
                self.beta.cols()
            )));
        }
        if let Some((i, j)) = source.l1.hom_violation(&target.l1, &self.alpha) {
            return Some(MorphismViolation::AlphaNotHomomorphism { i, j });
        }
        if let Some((i, j)) = source.l0.hom_violation(&target.l0, &self.beta) {
            return Some(MorphismViolation::BetaNotHomomorphism { i, j });
        }
        let lhs = self.beta.mul(&source.boundary);
        let rhs = target.boundary.mul(&self.alpha);
        if let Some(j) = (0..s1).find(|&j| lhs.column(j) != rhs.column(j)) {
            return Some(MorphismViolation::BoundaryNotCompatible { j });
        }
        for i in 0..s0 {
            let bi = self.beta.column(i);
            for j in 0..s1 {
                let l = self.alpha.apply(source.action_constants(i, j));
                let r = target.act(&bi, &self.alpha.column(j));
                if l != r {
                    return Some(MorphismViolation::ActionNotCompatible { i, j });
                }
            }
        }
        None
    }

    pub fn is_bijective(&self) -> bool {
        self.alpha.is_square()
            && self.beta.is_square()
            && self.alpha.inverse().is_some()
            && self.beta.inverse().is_some()
    }

    pub fn is_isomorphism(&self, source: &CrossedModule, target: &CrossedModule) -> bool {
        self.violation(source, target).is_none() && self.is_bijective()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &XModMorphism) -> XModMorphism {
        XModMorphism {
            alpha: other.alpha.mul(&self.alpha),
            beta: other.beta.mul(&self.beta),
        }
    }

    pub fn inverse(&self) -> Option<XModMorphism> {
        Some(XModMorphism {
            alpha: self.alpha.inverse()?,
            beta: self.beta.inverse()?,
        })
    }

    /// The kernel `(ker alpha, ker beta)` as a pair of subspaces.
    pub fn kernel(&self) -> (Subspace, Subspace) {
        (kernel(&self.alpha), kernel(&self.beta))
    }
}

/// `L/N` together with its projection and quotient coordinates.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub module: CrossedModule,
    pub projection: XModMorphism,
    pub q1: QuotientCoords,
    pub q0: QuotientCoords,
}

#[derive(Clone, Debug)]
pub struct SecondIsomorphism {
    /// `M/(M∩N)`.
    pub left: Quotient,
    /// `(M+N)/N`.
    pub right: Quotient,
    pub iso: XModMorphism,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Predicates {
    pub aspherical: bool,
    pub simply_connected: bool,
    pub abelian: bool,
    pub finite_dimensional: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XModSeries {
    pub kind: SeriesKind,
    pub terms: Vec<SubXMod>,
    /// Least `k >= 1` with `terms[k] = 0`: nilpotency class or derived length.
    pub index: Option<usize>,
}

impl XModSeries {
    pub fn terminates(&self) -> bool {
        self.index.is_some()
    }

    pub fn dims(&self) -> Vec<(usize, usize)> {
        self.terms.iter().map(SubXMod::dims).collect()
    }
}

/// Results of the simply-connected / aspherical subspace identities; `None`
/// where the hypothesis does not hold.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComponentIdentities {
    pub simply_connected: bool,
    pub aspherical: bool,
    /// `L1^{L0} = Z(L1)`.
    pub fixed_points_equal_center: Option<bool>,
    /// `D_{L0}(L1) = [L1, L1]`.
    pub displacement_equals_derived: Option<bool>,
    /// `St_{L0}(L1) ∩ Z(L0) = Z(L0)`.
    pub center_meets_stabilizer_in_center: Option<bool>,
}

impl ComponentIdentities {
    pub fn holds(&self) -> bool {
        [
            self.fixed_points_equal_center,
            self.displacement_equals_derived,
            self.center_meets_stabilizer_in_center,
        ]
        .iter()
        .all(|c| c.unwrap_or(true))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, h3, identity_xmod, n2, sl2};

    fn q() -> FieldSpec {
        FieldSpec::Rational
    }

    fn span(f: FieldSpec, n: usize, idx: &[usize]) -> Subspace {
        let vs: Vec<Vector> = idx.iter().map(|&i| unit_vector(f, n, i)).collect();
        Subspace::span(f, n, &vs)
    }

    // Independent check of CM2 from the raw tensors.
    fn peiffer_oracle(x: &CrossedModule) -> bool {
        let (n1, _) = x.dims();
        let f = x.field();
        (0..n1).all(|i| {
            (0..n1).all(|j| {
                let d = x.boundary().column(i);
                let mut lhs = zero_vector(f, n1);
                for (a, c) in d.iter().enumerate() {
                    for k in 0..n1 {
                        lhs[k] = &lhs[k] + &(c * &x.action_tensor()[(a * n1 + j) * n1 + k]);
                    }
                }
                lhs == x.l1().tensor()[(i * n1 + j) * n1..(i * n1 + j + 1) * n1]
            })
        })
    }

    #[test]
    fn identity_on_h3_valid() {
        let x = identity_xmod(&h3(q()));
        assert!(x.validate().is_valid());
        assert!(peiffer_oracle(&x));
    }

    #[test]
    fn nonabelian_module_with_zero_boundary_breaks_peiffer() {
        let x = CrossedModule::from_parts_unchecked(
            n2(q()),
            LieAlgebra::abelian(q(), 1),
            Matrix::zeros(q(), 1, 2),
            vec![q().zero(); 4],
        )
        .unwrap();
        let r = x.validate();
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, XModViolation::Peiffer { i: 0, j: 1 })));
        assert!(!peiffer_oracle(&x));
        assert!(matches!(
            CrossedModule::new(
                n2(q()),
                LieAlgebra::abelian(q(), 1),
                Matrix::zeros(q(), 1, 2),
                vec![q().zero(); 4]
            ),
            Err(Error::InvalidXMod(_))
        ));
    }

    #[test]
    fn actor_of_h3_valid() {
        let x = catalog::adjoint_actor_xmod(&h3(q()));
        assert!(x.validate().is_valid());
        assert!(peiffer_oracle(&x));
    }

    #[test]
    fn fixed_points_and_stabilizer() {
        let f = q();
        let zero_action = catalog::build_xmod("mod-trivial-a1", f).unwrap();
        assert!(zero_action.fixed_points().is_full());
        assert!(zero_action.stabilizer().is_full());
        let x = identity_xmod(&h3(f));
        assert_eq!(x.fixed_points(), span(f, 3, &[2]));
        assert_eq!(x.stabilizer(), span(f, 3, &[2]));
        let s = identity_xmod(&sl2(f).unwrap());
        assert!(s.fixed_points().is_zero());
        assert!(s.stabilizer().is_zero());
    }

    #[test]
    fn centers() {
        let f = q();
        let ab = catalog::build_xmod("id-a3", f).unwrap();
        assert!(SubXMod::whole(&ab).same_spaces(&ab.center().unwrap()));
        assert!(ab.predicates().unwrap().abelian);
        let z = identity_xmod(&h3(f)).center().unwrap();
        assert_eq!(
            (z.s1.clone(), z.s0.clone()),
            (span(f, 3, &[2]), span(f, 3, &[2]))
        );
        let inc = catalog::build_xmod("inc-0-h3", f).unwrap();
        let z = inc.center().unwrap();
        assert_eq!(z.dims(), (0, 1));
        assert_eq!(z.s0, h3(f).center());
    }

    #[test]
    fn displacement_and_commutator() {
        let f = q();
        assert!(catalog::build_xmod("mod-trivial-a1", f)
            .unwrap()
            .displacement()
            .is_zero());
        let x = identity_xmod(&h3(f));
        assert_eq!(x.displacement(), span(f, 3, &[2]));
        let c = x.commutator().unwrap();
        assert_eq!(c.dims(), (1, 1));
        assert!(identity_xmod(&sl2(f).unwrap()).displacement().is_full());
        assert!(catalog::build_xmod("id-a3", f)
            .unwrap()
            .commutator()
            .unwrap()
            .is_zero());
        let actor = catalog::adjoint_actor_xmod(&h3(f));
        let c = actor.commutator().unwrap();
        assert_eq!(c.s1, actor.displacement());
        assert_eq!(c.s0, actor.l0().derived_subalgebra());
    }

    #[test]
    fn commutator_ideal_identities() {
        let f = FieldSpec::prime(3).unwrap();
        for (name, x) in catalog::all_xmods(f) {
            let l = SubXMod::whole(&x);
            assert!(
                x.commutator_of_ideals(&l, &l)
                    .unwrap()
                    .same_spaces(&x.commutator().unwrap()),
                "{name}"
            );
            assert!(
                x.commutator_of_ideals(&l, &x.center().unwrap())
                    .unwrap()
                    .is_zero(),
                "{name}"
            );
        }
        let x = identity_xmod(&h3(q()));
        let l = SubXMod::whole(&x);
        let c = x.commutator().unwrap();
        assert!(x.commutator_of_ideals(&l, &c).unwrap().is_zero());
        let not_ideal = SubXMod::new(&x, span(q(), 3, &[0]), span(q(), 3, &[0])).unwrap();
        assert!(matches!(
            x.commutator_of_ideals(&l, &not_ideal),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn quotients() {
        let f = q();
        let x = identity_xmod(&h3(f));
        let q0 = x.quotient(&SubXMod::zero(&x)).unwrap();
        assert_eq!(q0.projection, XModMorphism::identity(&x));
        let qz = x.central_quotient().unwrap();
        assert_eq!(qz.module.dims(), (2, 2));
        assert!(qz.module.l1().is_abelian() && qz.module.l0().is_abelian());
        assert!(qz.module.action_tensor().iter().all(Scalar::is_zero));
        assert!(qz.module.boundary().inverse().is_some());
        assert_eq!(qz.projection.kernel(), (span(f, 3, &[2]), span(f, 3, &[2])));
        let all = x.quotient(&SubXMod::whole(&x)).unwrap();
        assert!(all.module.is_zero());
        let bad = SubXMod::new(&x, span(f, 3, &[0]), span(f, 3, &[0])).unwrap();
        assert!(matches!(x.quotient(&bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn second_isomorphism_examples() {
        let f = q();
        let x = catalog::build_xmod("id-h3+a1", f).unwrap();
        let m = SubXMod::new(&x, span(f, 4, &[0, 1, 2]), span(f, 4, &[0, 1, 2])).unwrap();
        let n = x.center().unwrap();
        let s = x.second_isomorphism(&m, &n).unwrap();
        // dim M - dim(M∩N) = dim(M+N) - dim N in both degrees.
        assert_eq!(s.left.module.dims(), (2, 2));
        assert_eq!(s.right.module.dims(), (2, 2));
        let zero = SubXMod::zero(&x);
        let s = x.second_isomorphism(&m, &zero).unwrap();
        assert_eq!(s.left.module.dims(), (3, 3));
        assert!(s.iso.is_bijective());
        let z = x.center().unwrap();
        let s = x.second_isomorphism(&z, &z).unwrap();
        assert!(s.left.module.is_zero() && s.right.module.is_zero());
    }

    #[test]
    fn predicates_examples() {
        let f = q();
        let p = identity_xmod(&h3(f)).predicates().unwrap();
        assert!(p.aspherical && p.simply_connected && p.finite_dimensional);
        let p = catalog::build_xmod("inc-0-h3", f)
            .unwrap()
            .predicates()
            .unwrap();
        assert!(p.aspherical && !p.simply_connected);
        let p = catalog::build_xmod("mod-natural-n2", f)
            .unwrap()
            .predicates()
            .unwrap();
        assert!(!p.aspherical);
    }

    #[test]
    fn series_examples() {
        let f = q();
        for name in ["id-a3", "mod-trivial-a1", "zero"] {
            let x = catalog::build_xmod(name, f).unwrap();
            assert_eq!(
                x.series(SeriesKind::LowerCentral).unwrap().index,
                Some(1),
                "{name}"
            );
            assert_eq!(
                x.series(SeriesKind::Derived).unwrap().index,
                Some(1),
                "{name}"
            );
        }
        let x = identity_xmod(&h3(f));
        let lc = x.series(SeriesKind::LowerCentral).unwrap();
        assert_eq!(lc.index, Some(2));
        assert_eq!(lc.dims()[..3], [(3, 3), (1, 1), (0, 0)]);
        let s = identity_xmod(&sl2(f).unwrap());
        assert!(!s.series(SeriesKind::LowerCentral).unwrap().terminates());
        assert!(!s.series(SeriesKind::Derived).unwrap().terminates());
        for (name, x) in catalog::all_xmods(f) {
            for kind in [SeriesKind::LowerCentral, SeriesKind::Derived] {
                let s = x.series(kind).unwrap();
                for w in s.terms.windows(2) {
                    assert!(w[1].is_contained_in(&w[0]), "{name}");
                }
            }
        }
    }

    #[test]
    fn direct_sums() {
        let f = q();
        let x = identity_xmod(&h3(f));
        assert_eq!(x.direct_sum(&CrossedModule::zero(f)).unwrap(), x);
        let a1 = LieAlgebra::abelian(f, 1);
        let lhs = x.direct_sum(&identity_xmod(&a1)).unwrap();
        assert_eq!(lhs, identity_xmod(&h3(f).direct_sum(&a1).unwrap()));
        let y = catalog::build_xmod("mod-natural-n2", f).unwrap();
        assert_eq!(x.direct_sum(&y).unwrap().dims(), (5, 5));
        assert!(matches!(
            x.direct_sum(&CrossedModule::zero(FieldSpec::prime(2).unwrap())),
            Err(Error::FieldMismatch(..))
        ));
    }

    #[test]
    fn simply_connected_aspherical_identities() {
        let f = q();
        let r = identity_xmod(&h3(f))
            .simply_connected_aspherical_check()
            .unwrap();
        assert_eq!(r.fixed_points_equal_center, Some(true));
        assert_eq!(r.displacement_equals_derived, Some(true));
        assert!(r.holds());
        let r = identity_xmod(&sl2(f).unwrap())
            .simply_connected_aspherical_check()
            .unwrap();
        assert_eq!(r.center_meets_stabilizer_in_center, Some(true));
        let r = catalog::build_xmod("inc-0-n2", f)
            .unwrap()
            .simply_connected_aspherical_check()
            .unwrap();
        assert!(!r.simply_connected && r.aspherical && r.holds());
        for (name, x) in catalog::all_xmods(f) {
            assert!(
                x.simply_connected_aspherical_check().unwrap().holds(),
                "{name}"
            );
        }
    }

    #[test]
    fn restriction_and_quotients_revalidate() {
        let f = FieldSpec::prime(2).unwrap();
        for (name, x) in catalog::all_xmods(f) {
            let c = x.commutator().unwrap();
            assert!(x.restrict(&c).unwrap().validate().is_valid(), "{name}");
            let z = x.center().unwrap();
            let qz = x.quotient(&z).unwrap();
            assert!(qz.module.validate().is_valid(), "{name}");
            assert_eq!(
                qz.projection.kernel(),
                (z.s1.clone(), z.s0.clone()),
                "{name}"
            );
        }
    }

    #[test]
    fn morphism_checks() {
        let f = q();
        let x = identity_xmod(&h3(f));
        assert!(XModMorphism::identity(&x).is_isomorphism(&x, &x));
        let swap = Matrix::from_i64(f, &[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]);
        let m = XModMorphism {
            alpha: swap.clone(),
            beta: swap,
        };
        assert!(matches!(
            m.violation(&x, &x),
            Some(MorphismViolation::AlphaNotHomomorphism { .. })
        ));
        let id = Matrix::identity(f, 3);
        let m = XModMorphism {
            alpha: id.scale(&f.from_i64(2)),
            beta: id,
        };
        assert!(matches!(
            m.violation(&x, &x),
            Some(MorphismViolation::AlphaNotHomomorphism { .. })
        ));
    }
}
