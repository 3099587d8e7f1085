//! Whitehead derivations `Der(L0, L1)`, crossed-module derivations `Der(L)`,
//! the actor, and the class-preserving subobjects.
//!
//! Whitehead derivations `∂: L0 -> L1` are stored as row-major `n1 x n0`
//! matrices flattened into `K^{n1*n0}`. A crossed-module derivation `(α, β)`
//! is stored as `vec(α) ++ vec(β)` in `K^{n1*n1 + n0*n0}`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::lie::{algebra_from_bracket, LieAlgebra};
use crate::linalg::{kernel, unit_vector, zero_vector, Matrix, Subspace, Vector};
use crate::xmod::{CrossedModule, SubXMod};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DerivationKind {
    Whitehead,
    XMod,
    WhiteheadClass,
    XModClass,
}

impl DerivationKind {
    pub fn name(self) -> &'static str {
        match self {
            DerivationKind::Whitehead => "whitehead",
            DerivationKind::XMod => "xmod",
            DerivationKind::WhiteheadClass => "whitehead-class",
            DerivationKind::XModClass => "xmod-class",
        }
    }

    pub fn is_whitehead(self) -> bool {
        matches!(
            self,
            DerivationKind::Whitehead | DerivationKind::WhiteheadClass
        )
    }
}

impl fmt::Display for DerivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Derivation {
    Whitehead(Matrix),
    XMod { alpha: Matrix, beta: Matrix },
}

/// A space of derivations with the abstract Lie algebra of its bracket in
/// the canonical basis of `space`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationSpace {
    pub kind: DerivationKind,
    pub space: Subspace,
    pub algebra: LieAlgebra,
    n1: usize,
    n0: usize,
}

impl DerivationSpace {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn field(&self) -> FieldSpec {
        self.space.field()
    }

    pub fn decode(&self, v: &[Scalar]) -> Derivation {
        decode(self.kind, self.field(), self.n1, self.n0, v)
    }

    pub fn encode(&self, d: &Derivation) -> Vector {
        encode(d)
    }

    pub fn element(&self, i: usize) -> Derivation {
        self.decode(&self.space.basis_vector(i))
    }

    pub fn basis(&self) -> Vec<Derivation> {
        (0..self.dim()).map(|i| self.element(i)).collect()
    }

    /// Coordinates of a derivation in the canonical basis, if it lies in the space.
    pub fn coordinates(&self, d: &Derivation) -> Option<Vector> {
        self.space.coordinates(&encode(d))
    }

    /// This space in the canonical coordinates of a larger space of the same
    /// shape.
    pub fn coordinates_in(&self, outer: &DerivationSpace) -> Result<Subspace> {
        let cs = self
            .space
            .basis_vectors()
            .iter()
            .map(|v| {
                outer.space.coordinates(v).ok_or_else(|| {
                    Error::Internal(format!(
                        "{} space not inside {} space",
                        self.kind, outer.kind
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Subspace::span(self.field(), outer.dim(), &cs))
    }
}

fn decode(kind: DerivationKind, f: FieldSpec, n1: usize, n0: usize, v: &[Scalar]) -> Derivation {
    if kind.is_whitehead() {
        Derivation::Whitehead(Matrix::from_vec(f, n1, n0, v.to_vec()))
    } else {
        Derivation::XMod {
            alpha: Matrix::from_vec(f, n1, n1, v[..n1 * n1].to_vec()),
            beta: Matrix::from_vec(f, n0, n0, v[n1 * n1..].to_vec()),
        }
    }
}

fn encode(d: &Derivation) -> Vector {
    match d {
        Derivation::Whitehead(m) => m.flatten(),
        Derivation::XMod { alpha, beta } => {
            let mut v = alpha.flatten();
            v.extend(beta.flatten());
            v
        }
    }
}

fn bracket_of(x: &CrossedModule, kind: DerivationKind, a: &[Scalar], b: &[Scalar]) -> Vector {
    let (n1, n0) = x.dims();
    let f = x.field();
    match (decode(kind, f, n1, n0, a), decode(kind, f, n1, n0, b)) {
        (Derivation::Whitehead(p), Derivation::Whitehead(q)) => {
            let d = x.boundary();
            p.mul(d).mul(&q).sub(&q.mul(d).mul(&p)).flatten()
        }
        (
            Derivation::XMod {
                alpha: a1,
                beta: b1,
            },
            Derivation::XMod {
                alpha: a2,
                beta: b2,
            },
        ) => encode(&Derivation::XMod {
            alpha: a1.commutator(&a2),
            beta: b1.commutator(&b2),
        }),
        _ => unreachable!("kinds agree"),
    }
}

fn space_with_algebra(
    x: &CrossedModule,
    kind: DerivationKind,
    space: Subspace,
) -> Result<DerivationSpace> {
    let algebra = algebra_from_bracket(&space, |a, b| bracket_of(x, kind, a, b)).map_err(|e| {
        Error::Internal(format!(
            "{kind} derivations not closed under the bracket: {e}"
        ))
    })?;
    let (n1, n0) = x.dims();
    Ok(DerivationSpace {
        kind,
        space,
        algebra,
        n1,
        n0,
    })
}

/// Rows of `D[e_a,e_b] - [D e_a, e_b] - [e_a, D e_b] = 0` for a matrix `D`
/// whose entry `(r, c)` is variable `offset + r*n + c`.
fn leibniz_rows(g: &LieAlgebra, offset: usize, width: usize, rows: &mut Vec<Vector>) {
    let n = g.dim();
    let f = g.field();
    let var = |r: usize, c: usize| offset + r * n + c;
    for a in 0..n {
        for b in a + 1..n {
            for k in 0..n {
                let mut row = zero_vector(f, width);
                for (m, c) in g.structure_constants(a, b).iter().enumerate() {
                    row[var(k, m)] = &row[var(k, m)] + c;
                }
                for m in 0..n {
                    row[var(m, a)] = &row[var(m, a)] - &g.structure_constants(m, b)[k];
                    row[var(m, b)] = &row[var(m, b)] - &g.structure_constants(a, m)[k];
                }
                rows.push(row);
            }
        }
    }
}

fn solve_space(f: FieldSpec, width: usize, rows: Vec<Vector>) -> Subspace {
    if rows.is_empty() {
        return Subspace::full(f, width);
    }
    kernel(&Matrix::from_rows(f, width, &rows).expect("row widths agree"))
}

/// `Der(L0, L1)`: maps `∂` with `∂[a,b] = [a, ∂b] - [b, ∂a]`.
pub fn whitehead_derivations(x: &CrossedModule) -> Result<DerivationSpace> {
    let (n1, n0) = x.dims();
    let f = x.field();
    let width = n1 * n0;
    let var = |r: usize, c: usize| r * n0 + c;
    let mut rows = Vec::new();
    for a in 0..n0 {
        for b in a + 1..n0 {
            for k in 0..n1 {
                let mut row = zero_vector(f, width);
                for (m, c) in x.l0().structure_constants(a, b).iter().enumerate() {
                    row[var(k, m)] = &row[var(k, m)] + c;
                }
                for j in 0..n1 {
                    row[var(j, b)] = &row[var(j, b)] - &x.action_constants(a, j)[k];
                    row[var(j, a)] = &row[var(j, a)] + &x.action_constants(b, j)[k];
                }
                rows.push(row);
            }
        }
    }
    space_with_algebra(x, DerivationKind::Whitehead, solve_space(f, width, rows))
}

/// `Der(L)`: pairs `(α, β)` of derivations with `βd = dα` and
/// `α[l0,l1] = [l0, α l1] + [β l0, l1]`.
pub fn xmod_derivations(x: &CrossedModule) -> Result<DerivationSpace> {
    let (n1, n0) = x.dims();
    let f = x.field();
    let width = n1 * n1 + n0 * n0;
    let al = |r: usize, c: usize| r * n1 + c;
    let be = |r: usize, c: usize| n1 * n1 + r * n0 + c;
    let mut rows = Vec::new();
    leibniz_rows(x.l1(), 0, width, &mut rows);
    leibniz_rows(x.l0(), n1 * n1, width, &mut rows);
    let d = x.boundary();
    for r in 0..n0 {
        for c in 0..n1 {
            let mut row = zero_vector(f, width);
            for m in 0..n0 {
                row[be(r, m)] = &row[be(r, m)] + d.get(m, c);
            }
            for m in 0..n1 {
                row[al(m, c)] = &row[al(m, c)] - d.get(r, m);
            }
            rows.push(row);
        }
    }
    for i in 0..n0 {
        for j in 0..n1 {
            for k in 0..n1 {
                let mut row = zero_vector(f, width);
                for (m, a) in x.action_constants(i, j).iter().enumerate() {
                    row[al(k, m)] = &row[al(k, m)] + a;
                }
                for m in 0..n1 {
                    row[al(m, j)] = &row[al(m, j)] - &x.action_constants(i, m)[k];
                }
                for m in 0..n0 {
                    row[be(m, i)] = &row[be(m, i)] - &x.action_constants(m, j)[k];
                }
                rows.push(row);
            }
        }
    }
    space_with_algebra(x, DerivationKind::XMod, solve_space(f, width, rows))
}

/// `δ_y: l0 -> [l0, y]` as an `n1 x n0` matrix.
pub fn inner_whitehead(x: &CrossedModule, y: &[Scalar]) -> Matrix {
    x.coaction_matrix(y)
}

/// `(α, β) = ([l0, -], ad l0)`.
pub fn inner_xmod(x: &CrossedModule, l0: &[Scalar]) -> Derivation {
    Derivation::XMod {
        alpha: x.action_matrix(l0),
        beta: x.l0().ad_of(l0),
    }
}

/// Does `∂` satisfy the Whitehead derivation law on all basis pairs?
pub fn is_whitehead_derivation(x: &CrossedModule, m: &Matrix) -> bool {
    let (n1, n0) = x.dims();
    if (m.rows(), m.cols()) != (n1, n0) {
        return false;
    }
    let f = x.field();
    (0..n0).all(|a| {
        (0..n0).all(|b| {
            let lhs = m.apply(x.l0().structure_constants(a, b));
            let p = x.act(&unit_vector(f, n0, a), &m.column(b));
            let q = x.act(&unit_vector(f, n0, b), &m.column(a));
            lhs == crate::linalg::sub_vectors(&p, &q)
        })
    })
}

/// Does `(α, β)` satisfy every crossed-module derivation condition?
pub fn is_xmod_derivation(x: &CrossedModule, alpha: &Matrix, beta: &Matrix) -> bool {
    let (n1, n0) = x.dims();
    if (alpha.rows(), alpha.cols(), beta.rows(), beta.cols()) != (n1, n1, n0, n0) {
        return false;
    }
    if !x.l1().is_derivation(alpha) || !x.l0().is_derivation(beta) {
        return false;
    }
    if beta.mul(x.boundary()) != x.boundary().mul(alpha) {
        return false;
    }
    let f = x.field();
    (0..n0).all(|i| {
        let e = unit_vector(f, n0, i);
        (0..n1).all(|j| {
            let fj = unit_vector(f, n1, j);
            let lhs = alpha.apply(x.action_constants(i, j));
            let rhs = crate::linalg::add_vectors(
                &x.act(&e, &alpha.column(j)),
                &x.act(&beta.column(i), &fj),
            );
            lhs == rhs
        })
    })
}

/// `Der_C(L0, L1)`: the span of `δ_{f_j}` over the basis of `L1`.
pub fn class_preserving_whitehead(x: &CrossedModule) -> Result<DerivationSpace> {
    let (n1, _) = x.dims();
    let f = x.field();
    let mut gens = Vec::with_capacity(n1);
    for j in 0..n1 {
        let m = inner_whitehead(x, &unit_vector(f, n1, j));
        if !is_whitehead_derivation(x, &m) {
            return Err(Error::Internal(format!("δ_f{j} is not a derivation")));
        }
        gens.push(m.flatten());
    }
    let space = Subspace::span(f, x.l1().dim() * x.l0().dim(), &gens);
    space_with_algebra(x, DerivationKind::WhiteheadClass, space)
}

/// `Der_C(L)`: the span of `([e_i, -], ad e_i)` over the basis of `L0`.
pub fn class_preserving_xmod(x: &CrossedModule) -> Result<DerivationSpace> {
    let (n1, n0) = x.dims();
    let f = x.field();
    let mut gens = Vec::with_capacity(n0);
    for i in 0..n0 {
        let d = inner_xmod(x, &unit_vector(f, n0, i));
        if let Derivation::XMod { alpha, beta } = &d {
            if !is_xmod_derivation(x, alpha, beta) {
                return Err(Error::Internal(format!(
                    "inner pair of e{i} is not a derivation"
                )));
            }
        }
        gens.push(encode(&d));
    }
    let space = Subspace::span(f, n1 * n1 + n0 * n0, &gens);
    space_with_algebra(x, DerivationKind::XModClass, space)
}

/// A derivation-level crossed module together with the spaces it is built on.
#[derive(Clone, Debug)]
pub struct ActorModule {
    pub module: CrossedModule,
    pub whitehead: DerivationSpace,
    pub xmod: DerivationSpace,
}

/// `Δ: W -> X`, `∂ ↦ (∂d, d∂)`, with `X` acting on `W` by `α∂ - ∂β`.
fn assemble(x: &CrossedModule, w: DerivationSpace, xs: DerivationSpace) -> Result<ActorModule> {
    let d = x.boundary();
    let f = x.field();
    let mut cols = Vec::with_capacity(w.dim());
    for (j, del) in w.basis().into_iter().enumerate() {
        let Derivation::Whitehead(m) = del else {
            unreachable!()
        };
        let image = Derivation::XMod {
            alpha: m.mul(d),
            beta: d.mul(&m),
        };
        let c = xs.coordinates(&image).ok_or_else(|| {
            Error::Internal(format!(
                "Δ of {} basis element {j} leaves the {} space",
                w.kind, xs.kind
            ))
        })?;
        cols.push(c);
    }
    let boundary = Matrix::from_columns(f, xs.dim(), &cols);
    let wb = w.basis();
    let mut action = Vec::with_capacity(xs.dim() * w.dim() * w.dim());
    for (i, ab) in xs.basis().into_iter().enumerate() {
        let Derivation::XMod { alpha, beta } = ab else {
            unreachable!()
        };
        for (j, del) in wb.iter().enumerate() {
            let Derivation::Whitehead(m) = del else {
                unreachable!()
            };
            let v = Derivation::Whitehead(alpha.mul(m).sub(&m.mul(&beta)));
            let c = w.coordinates(&v).ok_or_else(|| {
                Error::Internal(format!(
                    "{} element {i} moves {} element {j} out of its space",
                    xs.kind, w.kind
                ))
            })?;
            action.extend(c);
        }
    }
    let module = CrossedModule::from_parts_unchecked(
        w.algebra.clone(),
        xs.algebra.clone(),
        boundary,
        action,
    )?;
    let report = module.validate();
    if !report.is_valid() {
        let v: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
        return Err(Error::Internal(format!(
            "actor fails the crossed-module axioms: {}",
            v.join("; ")
        )));
    }
    Ok(ActorModule {
        module,
        whitehead: w,
        xmod: xs,
    })
}

/// `Act(L) = (Der(L0, L1) --Δ--> Der(L))`.
pub fn actor(x: &CrossedModule) -> Result<ActorModule> {
    assemble(x, whitehead_derivations(x)?, xmod_derivations(x)?)
}

/// `Act_C(L) = (Der_C(L0, L1) --Δ--> Der_C(L))`.
pub fn class_actor(x: &CrossedModule) -> Result<ActorModule> {
    assemble(x, class_preserving_whitehead(x)?, class_preserving_xmod(x)?)
}

/// `InnAct(L) ⊴ Act_C(L) ≤ Act(L)`, all inside actor coordinates.
#[derive(Clone, Debug)]
pub struct InnerActor {
    pub actor: ActorModule,
    pub class: SubXMod,
    pub inner: SubXMod,
}

pub fn inner_actor(x: &CrossedModule) -> Result<InnerActor> {
    let act = actor(x)?;
    let class_act = class_actor(x)?;
    let (n1, n0) = x.dims();
    let f = x.field();
    let inner1: Vec<Vector> = (0..n1)
        .map(|j| {
            act.whitehead
                .coordinates(&Derivation::Whitehead(inner_whitehead(
                    x,
                    &unit_vector(f, n1, j),
                )))
                .ok_or_else(|| Error::Internal(format!("δ_f{j} is not in Der(L0,L1)")))
        })
        .collect::<Result<_>>()?;
    let inner0: Vec<Vector> = (0..n0)
        .map(|i| {
            act.xmod
                .coordinates(&inner_xmod(x, &unit_vector(f, n0, i)))
                .ok_or_else(|| Error::Internal(format!("inner pair of e{i} is not in Der(L)")))
        })
        .collect::<Result<_>>()?;
    let m = &act.module;
    let inner = SubXMod::new(
        m,
        Subspace::span(f, act.whitehead.dim(), &inner1),
        Subspace::span(f, act.xmod.dim(), &inner0),
    )
    .map_err(|e| {
        Error::Internal(format!(
            "inner part is not a subcrossed module of the actor: {e}"
        ))
    })?;
    let class = SubXMod::new(
        m,
        class_act.whitehead.coordinates_in(&act.whitehead)?,
        class_act.xmod.coordinates_in(&act.xmod)?,
    )
    .map_err(|e| {
        Error::Internal(format!(
            "class part is not a subcrossed module of the actor: {e}"
        ))
    })?;
    if !inner.is_contained_in(&class) {
        return Err(Error::Internal(
            "inner actor is not inside the class actor".into(),
        ));
    }
    let class_mod = m.restrict(&class)?;
    let rel = |outer: &Subspace, inner: &Subspace| -> Subspace {
        let cs: Vec<Vector> = inner
            .basis_vectors()
            .iter()
            .map(|v| outer.coordinates(v).expect("contained"))
            .collect();
        Subspace::span(f, outer.dim(), &cs)
    };
    if let Some(why) =
        class_mod.ideal_violation(&rel(&class.s1, &inner.s1), &rel(&class.s0, &inner.s0))
    {
        return Err(Error::Internal(format!(
            "inner actor is not an ideal of the class actor: {why}"
        )));
    }
    Ok(InnerActor {
        actor: act,
        class,
        inner,
    })
}
