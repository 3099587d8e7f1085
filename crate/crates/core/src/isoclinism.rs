//! Commutator pairings on central quotients, isoclinism witnesses and their
//! verification, canonical isoclinisms, and invariant fingerprints.

use std::fmt;

use crate::derivations::{class_actor, class_preserving_whitehead, class_preserving_xmod};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::lie::{
    lie_isoclinism_verify, LieAlgebra, LieCommutatorData, LieIsoclinismWitness, SeriesKind,
};
use crate::linalg::{
    add_vectors, axpy, kernel, sub_vectors, unit_vector, zero_vector, Matrix, Subspace, Vector,
};
use crate::search::{self, SearchOptions, SearchOutcome};
use crate::verdict::Verdict;
use crate::xmod::{CrossedModule, MorphismViolation, Quotient, SubXMod, XModMorphism};

/// `c1: L̄1 × L̄0 -> D_{L0}(L1)` and `c0: L̄0 × L̄0 -> [L0, L0]` in the
/// coordinates of the central quotient and the commutator.
#[derive(Clone, Debug)]
pub struct CommutatorPairing {
    pub center: SubXMod,
    pub quotient: Quotient,
    pub commutator: SubXMod,
    pub commutator_module: CrossedModule,
    c1: Vec<Vector>,
    c0: Vec<Vector>,
}

impl CommutatorPairing {
    pub fn new(x: &CrossedModule) -> Result<Self> {
        let center = x.center()?;
        let quotient = x.quotient(&center)?;
        let commutator = x.commutator()?;
        let commutator_module = x.restrict(&commutator)?;
        let (m1, m0) = quotient.module.dims();
        let mut c1 = Vec::with_capacity(m1 * m0);
        for a in 0..m1 {
            let l1 = quotient.q1.lift.column(a);
            for b in 0..m0 {
                let v = x.act(&quotient.q0.lift.column(b), &l1);
                c1.push(
                    commutator
                        .s1
                        .coordinates(&v)
                        .expect("[l0,l1] lies in the displacement"),
                );
            }
        }
        let mut c0 = Vec::with_capacity(m0 * m0);
        for a in 0..m0 {
            let u = quotient.q0.lift.column(a);
            for b in 0..m0 {
                let v = x.l0().bracket(&u, &quotient.q0.lift.column(b));
                c0.push(
                    commutator
                        .s0
                        .coordinates(&v)
                        .expect("[l0,l0'] lies in [L0,L0]"),
                );
            }
        }
        let p = CommutatorPairing {
            center,
            quotient,
            commutator,
            commutator_module,
            c1,
            c0,
        };
        p.perturbation_check(x)?;
        Ok(p)
    }

    pub fn field(&self) -> FieldSpec {
        self.commutator_module.field()
    }

    /// `(dim L̄1, dim L̄0)`.
    pub fn quotient_dims(&self) -> (usize, usize) {
        self.quotient.module.dims()
    }

    /// `(dim D_{L0}(L1), dim [L0,L0])`.
    pub fn commutator_dims(&self) -> (usize, usize) {
        self.commutator_module.dims()
    }

    pub fn c1_basis(&self, a: usize, b: usize) -> &[Scalar] {
        &self.c1[a * self.quotient_dims().1 + b]
    }

    pub fn c0_basis(&self, a: usize, b: usize) -> &[Scalar] {
        &self.c0[a * self.quotient_dims().1 + b]
    }

    /// `c1(u, v)` for `u` in `L̄1`, `v` in `L̄0`.
    pub fn c1(&self, u: &[Scalar], v: &[Scalar]) -> Vector {
        let mut out = zero_vector(self.field(), self.commutator_dims().0);
        for (a, ua) in u.iter().enumerate().filter(|(_, s)| !s.is_zero()) {
            for (b, vb) in v.iter().enumerate().filter(|(_, s)| !s.is_zero()) {
                axpy(&mut out, &(ua * vb), self.c1_basis(a, b));
            }
        }
        out
    }

    /// `c0(u, v)` for `u, v` in `L̄0`.
    pub fn c0(&self, u: &[Scalar], v: &[Scalar]) -> Vector {
        let mut out = zero_vector(self.field(), self.commutator_dims().1);
        for (a, ua) in u.iter().enumerate().filter(|(_, s)| !s.is_zero()) {
            for (b, vb) in v.iter().enumerate().filter(|(_, s)| !s.is_zero()) {
                axpy(&mut out, &(ua * vb), self.c0_basis(a, b));
            }
        }
        out
    }

    /// Recomputes every pairing value with each lift shifted by each central
    /// basis vector (and by none), and checks nothing changes. Returns the
    /// number of comparisons made.
    pub fn perturbation_check(&self, x: &CrossedModule) -> Result<usize> {
        let (m1, m0) = self.quotient_dims();
        let with_zero = |s: &Subspace| -> Vec<Vector> {
            let mut v = vec![zero_vector(s.field(), s.ambient_dim())];
            v.extend(s.basis_vectors());
            v
        };
        let z1 = with_zero(&self.center.s1);
        let z0 = with_zero(&self.center.s0);
        let mut count = 0;
        for a in 0..m1 {
            let l1 = self.quotient.q1.lift.column(a);
            for b in 0..m0 {
                let l0 = self.quotient.q0.lift.column(b);
                let expected = self.commutator.s1.from_coordinates(self.c1_basis(a, b));
                for p1 in &z1 {
                    for p0 in &z0 {
                        count += 1;
                        if x.act(&add_vectors(&l0, p0), &add_vectors(&l1, p1)) != expected {
                            return Err(Error::Internal(format!(
                                "c1 depends on the representative at ({a},{b})"
                            )));
                        }
                    }
                }
            }
        }
        for a in 0..m0 {
            let u = self.quotient.q0.lift.column(a);
            for b in 0..m0 {
                let v = self.quotient.q0.lift.column(b);
                let expected = self.commutator.s0.from_coordinates(self.c0_basis(a, b));
                for p in &z0 {
                    for q in &z0 {
                        count += 1;
                        if x.l0().bracket(&add_vectors(&u, p), &add_vectors(&v, q)) != expected {
                            return Err(Error::Internal(format!(
                                "c0 depends on the representative at ({a},{b})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(count)
    }
}

/// `(η1, η0): L/Z(L) -> L'/Z(L')` and `(ξ1, ξ0): [L,L] -> [L',L']`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IsoclinismWitness {
    pub eta: XModMorphism,
    pub xi: XModMorphism,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoclinismViolation {
    EtaNotMorphism(MorphismViolation),
    EtaNotBijective,
    XiNotMorphism(MorphismViolation),
    XiNotBijective,
    /// `ξ1(c1(a, b)) != c1'(η1 a, η0 b)`.
    C1Transport {
        a: usize,
        b: usize,
    },
    /// `ξ0(c0(a, b)) != c0'(η0 a, η0 b)`.
    C0Transport {
        a: usize,
        b: usize,
    },
}

impl fmt::Display for IsoclinismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EtaNotMorphism(v) => write!(f, "eta is not a crossed-module morphism: {v}"),
            Self::EtaNotBijective => write!(f, "eta is not bijective"),
            Self::XiNotMorphism(v) => write!(f, "xi is not a crossed-module morphism: {v}"),
            Self::XiNotBijective => write!(f, "xi is not bijective"),
            Self::C1Transport { a, b } => write!(
                f,
                "xi1 c1 != c1' (eta1 x eta0) on quotient basis pair ({a},{b})"
            ),
            Self::C0Transport { a, b } => write!(
                f,
                "xi0 c0 != c0' (eta0 x eta0) on quotient basis pair ({a},{b})"
            ),
        }
    }
}

impl IsoclinismWitness {
    /// Identity maps on the central quotient and commutator of `x`.
    pub fn identity(p: &CommutatorPairing) -> Self {
        IsoclinismWitness {
            eta: XModMorphism::identity(&p.quotient.module),
            xi: XModMorphism::identity(&p.commutator_module),
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        Some(IsoclinismWitness {
            eta: self.eta.inverse()?,
            xi: self.xi.inverse()?,
        })
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &IsoclinismWitness) -> Self {
        IsoclinismWitness {
            eta: self.eta.then(&other.eta),
            xi: self.xi.then(&other.xi),
        }
    }
}

fn check_shape(m: &Matrix, rows: usize, cols: usize, name: &str) -> Result<()> {
    if (m.rows(), m.cols()) != (rows, cols) {
        return Err(Error::Shape(format!(
            "{name} is {}x{}, expected {rows}x{cols}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Checks a candidate witness against precomputed pairings.
pub fn verify_with(
    px: &CommutatorPairing,
    py: &CommutatorPairing,
    w: &IsoclinismWitness,
) -> Result<Verdict<IsoclinismWitness, IsoclinismViolation>> {
    if px.field() != py.field() {
        return Err(Error::FieldMismatch(px.field(), py.field()));
    }
    let (m1, m0) = px.quotient_dims();
    let (n1, n0) = py.quotient_dims();
    let (k1, k0) = px.commutator_dims();
    let (j1, j0) = py.commutator_dims();
    check_shape(&w.eta.alpha, n1, m1, "eta1")?;
    check_shape(&w.eta.beta, n0, m0, "eta0")?;
    check_shape(&w.xi.alpha, j1, k1, "xi1")?;
    check_shape(&w.xi.beta, j0, k0, "xi0")?;
    use IsoclinismViolation as V;
    if let Some(v) = w.eta.violation(&px.quotient.module, &py.quotient.module) {
        return Ok(Verdict::Violated(V::EtaNotMorphism(v)));
    }
    if !w.eta.is_bijective() {
        return Ok(Verdict::Violated(V::EtaNotBijective));
    }
    if let Some(v) = w.xi.violation(&px.commutator_module, &py.commutator_module) {
        return Ok(Verdict::Violated(V::XiNotMorphism(v)));
    }
    if !w.xi.is_bijective() {
        return Ok(Verdict::Violated(V::XiNotBijective));
    }
    for a in 0..m1 {
        let ea = w.eta.alpha.column(a);
        for b in 0..m0 {
            let lhs = w.xi.alpha.apply(px.c1_basis(a, b));
            if lhs != py.c1(&ea, &w.eta.beta.column(b)) {
                return Ok(Verdict::Violated(V::C1Transport { a, b }));
            }
        }
    }
    for a in 0..m0 {
        let ea = w.eta.beta.column(a);
        for b in 0..m0 {
            let lhs = w.xi.beta.apply(px.c0_basis(a, b));
            if lhs != py.c0(&ea, &w.eta.beta.column(b)) {
                return Ok(Verdict::Violated(V::C0Transport { a, b }));
            }
        }
    }
    Ok(Verdict::Verified(w.clone()))
}

/// Is `w` an isoclinism from `x` to `y`?
pub fn isoclinism_verify(
    x: &CrossedModule,
    y: &CrossedModule,
    w: &IsoclinismWitness,
) -> Result<Verdict<IsoclinismWitness, IsoclinismViolation>> {
    if x.field() != y.field() {
        return Err(Error::FieldMismatch(x.field(), y.field()));
    }
    verify_with(&CommutatorPairing::new(x)?, &CommutatorPairing::new(y)?, w)
}

fn require_verified(
    x: &CrossedModule,
    y: &CrossedModule,
    w: &IsoclinismWitness,
    what: &str,
) -> Result<()> {
    match isoclinism_verify(x, y, w)? {
        Verdict::Verified(_) => Ok(()),
        Verdict::Violated(v) => Err(Error::Precondition(format!(
            "{what} is not an isoclinism: {v}"
        ))),
    }
}

fn ensure_verified(
    x: &CrossedModule,
    y: &CrossedModule,
    w: IsoclinismWitness,
    what: &str,
) -> Result<IsoclinismWitness> {
    match isoclinism_verify(x, y, &w)? {
        Verdict::Verified(w) => Ok(w),
        Verdict::Violated(v) => Err(Error::Internal(format!("{what} does not re-verify: {v}"))),
    }
}

pub fn isoclinism_identity(x: &CrossedModule) -> Result<IsoclinismWitness> {
    let w = IsoclinismWitness::identity(&CommutatorPairing::new(x)?);
    ensure_verified(x, x, w, "identity witness")
}

/// `y ~ x` from a verified `x ~ y`.
pub fn isoclinism_invert(
    x: &CrossedModule,
    y: &CrossedModule,
    w: &IsoclinismWitness,
) -> Result<IsoclinismWitness> {
    require_verified(x, y, w, "witness")?;
    let inv = w
        .inverse()
        .ok_or_else(|| Error::Internal("verified witness is not invertible".into()))?;
    ensure_verified(y, x, inv, "inverse witness")
}

/// `x ~ z` from verified `x ~ y` and `y ~ z`.
pub fn isoclinism_compose(
    x: &CrossedModule,
    y: &CrossedModule,
    z: &CrossedModule,
    w1: &IsoclinismWitness,
    w2: &IsoclinismWitness,
) -> Result<IsoclinismWitness> {
    require_verified(x, y, w1, "first witness")?;
    require_verified(y, z, w2, "second witness")?;
    ensure_verified(x, z, w1.then(w2), "composite witness")
}

/// The canonical isoclinism `M ~ L` for a subcrossed module `M` with
/// `M1 + L1^{L0} = L1` and `M0 + (St ∩ Z(L0)) = L0`.
#[derive(Clone, Debug)]
pub struct SplitCenter {
    pub sub: CrossedModule,
    pub witness: IsoclinismWitness,
    /// Whether both sums are direct.
    pub direct: bool,
    /// `M1^{M0} = M1 ∩ L1^{L0}`.
    pub fixed_points_identity: bool,
    /// `St_{M0}(M1) ∩ Z(M0) = M0 ∩ St_{L0}(L1) ∩ Z(L0)`.
    pub stabilizer_identity: bool,
}

pub fn split_center_isoclinism(x: &CrossedModule, m: &SubXMod) -> Result<SplitCenter> {
    if let Some(why) = x.subxmod_violation(&m.s1, &m.s0) {
        return Err(Error::Precondition(format!(
            "not a subcrossed module: {why}"
        )));
    }
    let z = x.center()?;
    if !m.s1.sum(&z.s1)?.is_full() {
        return Err(Error::Precondition(
            "M1 and the fixed points do not span L1".into(),
        ));
    }
    if !m.s0.sum(&z.s0)?.is_full() {
        return Err(Error::Precondition(
            "M0 and St ∩ Z(L0) do not span L0".into(),
        ));
    }
    let direct = m.s1.intersect(&z.s1)?.is_zero() && m.s0.intersect(&z.s0)?.is_zero();
    let sub = x.restrict(m)?;
    let f = x.field();
    let ambient = |s: &Subspace, inner: &Subspace| -> Subspace {
        let vs: Vec<Vector> = inner
            .basis_vectors()
            .iter()
            .map(|v| s.from_coordinates(v))
            .collect();
        Subspace::span(f, s.ambient_dim(), &vs)
    };
    let zm = sub.center()?;
    let fixed_points_identity = ambient(&m.s1, &zm.s1) == m.s1.intersect(&z.s1)?;
    let stabilizer_identity = ambient(&m.s0, &zm.s0) == m.s0.intersect(&z.s0)?;

    let pm = CommutatorPairing::new(&sub)?;
    let pl = CommutatorPairing::new(x)?;
    let induced = |lq: &crate::linalg::QuotientCoords,
                   rq: &crate::linalg::QuotientCoords,
                   s: &Subspace|
     -> Matrix {
        let cols: Vec<Vector> = (0..lq.dim())
            .map(|a| rq.project_vector(&s.from_coordinates(&lq.lift.column(a))))
            .collect();
        Matrix::from_columns(f, rq.dim(), &cols)
    };
    let eta = XModMorphism {
        alpha: induced(&pm.quotient.q1, &pl.quotient.q1, &m.s1),
        beta: induced(&pm.quotient.q0, &pl.quotient.q0, &m.s0),
    };
    let transport = |inner: &Subspace, s: &Subspace, outer: &Subspace| -> Result<Matrix> {
        let cols = inner
            .basis_vectors()
            .iter()
            .map(|v| {
                outer.coordinates(&s.from_coordinates(v)).ok_or_else(|| {
                    Error::Internal("commutator of M is not inside the commutator of L".into())
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_columns(f, outer.dim(), &cols))
    };
    let xi = XModMorphism {
        alpha: transport(&pm.commutator.s1, &m.s1, &pl.commutator.s1)?,
        beta: transport(&pm.commutator.s0, &m.s0, &pl.commutator.s0)?,
    };
    let witness = match verify_with(&pm, &pl, &IsoclinismWitness { eta, xi })? {
        Verdict::Verified(w) => w,
        Verdict::Violated(v) => {
            return Err(Error::Internal(format!("center-split witness fails: {v}")))
        }
    };
    Ok(SplitCenter {
        sub,
        witness,
        direct,
        fixed_points_identity,
        stabilizer_identity,
    })
}

/// Lie-algebra isoclinisms `L1 ~ L1'` and `L0 ~ L0'` induced by a crossed-module
/// isoclinism.
#[derive(Clone, Debug)]
pub struct ComponentIsoclinisms {
    pub l1: LieIsoclinismWitness,
    pub l0: LieIsoclinismWitness,
    /// Both ends simply connected: `l1` is literally `(η1, ξ1)`.
    pub l1_direct: bool,
    /// Both ends aspherical: `l0` is literally `(η0, ξ0)`.
    pub l0_direct: bool,
}

pub fn component_isoclinisms(
    x: &CrossedModule,
    y: &CrossedModule,
    w: &IsoclinismWitness,
) -> Result<ComponentIsoclinisms> {
    let px = CommutatorPairing::new(x)?;
    let py = CommutatorPairing::new(y)?;
    if let Verdict::Violated(v) = verify_with(&px, &py, w)? {
        return Err(Error::Precondition(format!(
            "witness is not an isoclinism: {v}"
        )));
    }
    let f = x.field();
    let induce = |g: &LieAlgebra,
                  h: &LieAlgebra,
                  gq: &crate::linalg::QuotientCoords,
                  hq: &crate::linalg::QuotientCoords,
                  gd: &Subspace,
                  hd: &Subspace,
                  eta: &Matrix,
                  xi: &Matrix|
     -> Result<LieIsoclinismWitness> {
        let dg = LieCommutatorData::new(g)?;
        let dh = LieCommutatorData::new(h)?;
        let eta_cols: Vec<Vector> = (0..dg.coords.dim())
            .map(|a| {
                let v = gq.project_vector(&dg.coords.lift.column(a));
                dh.coords.project_vector(&hq.lift_vector(&eta.apply(&v)))
            })
            .collect();
        let xi_cols = dg
            .derived
            .basis_vectors()
            .iter()
            .map(|v| {
                let c = gd
                    .coordinates(v)
                    .ok_or_else(|| Error::Internal("[L,L] outside the commutator".into()))?;
                dh.derived
                    .coordinates(&hd.from_coordinates(&xi.apply(&c)))
                    .ok_or_else(|| {
                        Error::Internal("xi does not preserve derived subalgebras".into())
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        let lw = LieIsoclinismWitness {
            eta: Matrix::from_columns(f, dh.coords.dim(), &eta_cols),
            xi: Matrix::from_columns(f, dh.derived.dim(), &xi_cols),
        };
        match lie_isoclinism_verify(g, h, &lw.eta, &lw.xi)? {
            Verdict::Verified(w) => Ok(w),
            Verdict::Violated(v) => Err(Error::Internal(format!("induced Lie witness fails: {v}"))),
        }
    };
    let l1 = induce(
        x.l1(),
        y.l1(),
        &px.quotient.q1,
        &py.quotient.q1,
        &px.commutator.s1,
        &py.commutator.s1,
        &w.eta.alpha,
        &w.xi.alpha,
    )?;
    let l0 = induce(
        x.l0(),
        y.l0(),
        &px.quotient.q0,
        &py.quotient.q0,
        &px.commutator.s0,
        &py.commutator.s0,
        &w.eta.beta,
        &w.xi.beta,
    )?;
    let (prx, pry) = (x.predicates()?, y.predicates()?);
    let l1_direct = prx.simply_connected && pry.simply_connected;
    if l1_direct {
        for (name, z) in [("source", x), ("target", y)] {
            let r = z.simply_connected_aspherical_check()?;
            if r.fixed_points_equal_center != Some(true)
                || r.displacement_equals_derived != Some(true)
            {
                return Err(Error::Internal(format!(
                    "{name} is simply connected but its identities fail"
                )));
            }
        }
        if l1.eta != w.eta.alpha || l1.xi != w.xi.alpha {
            return Err(Error::Internal(
                "degree-1 witness differs from (η1, ξ1)".into(),
            ));
        }
    }
    let l0_direct = prx.aspherical && pry.aspherical;
    if l0_direct {
        for (name, z) in [("source", x), ("target", y)] {
            if z.central_stabilizer() != z.l0().center() {
                return Err(Error::Internal(format!(
                    "{name} is aspherical but St ∩ Z(L0) != Z(L0)"
                )));
            }
        }
        if l0.eta != w.eta.beta || l0.xi != w.xi.beta {
            return Err(Error::Internal(
                "degree-0 witness differs from (η0, ξ0)".into(),
            ));
        }
    }
    Ok(ComponentIsoclinisms {
        l1,
        l0,
        l1_direct,
        l0_direct,
    })
}

/// `id(g) ~ id(h)` from a Lie isoclinism `g ~ h`: `((η, η), (ξ, ξ))`.
pub fn lift_lie_isoclinism(
    g: &LieAlgebra,
    h: &LieAlgebra,
    lw: &LieIsoclinismWitness,
) -> Result<IsoclinismWitness> {
    if let Verdict::Violated(v) = lie_isoclinism_verify(g, h, &lw.eta, &lw.xi)? {
        return Err(Error::Precondition(format!("not a Lie isoclinism: {v}")));
    }
    let x = crate::catalog::identity_xmod(g);
    let y = crate::catalog::identity_xmod(h);
    let w = IsoclinismWitness {
        eta: XModMorphism {
            alpha: lw.eta.clone(),
            beta: lw.eta.clone(),
        },
        xi: XModMorphism {
            alpha: lw.xi.clone(),
            beta: lw.xi.clone(),
        },
    };
    ensure_verified(&x, &y, w, "lifted witness")
}

/// The single commutator pairing on `L̄1 ⊕ L̄0` with values in
/// `D_{L0}(L1) ⊕ [L0,L0]`:
/// `((a1,a0),(b1,b0)) ↦ ([a1,b1] + [a0,b1] - [b0,a1], [a0,b0])`.
/// Returns the first quotient basis pair where `ξ ∘ c = c' ∘ (η × η)` fails.
pub fn combined_diagram_violation(
    px: &CommutatorPairing,
    py: &CommutatorPairing,
    w: &IsoclinismWitness,
) -> Option<(usize, usize)> {
    let (m1, m0) = px.quotient_dims();
    let combined = |p: &CommutatorPairing, u: &[Scalar], v: &[Scalar]| -> (Vector, Vector) {
        let (k1, _) = p.quotient_dims();
        let (u1, u0) = u.split_at(k1);
        let (v1, v0) = v.split_at(k1);
        // [a1, b1] = [d a1, b1] by the Peiffer identity.
        let da1 = p.quotient.module.boundary().apply(u1);
        let mut one = p.c1(v1, &da1);
        one = add_vectors(&one, &p.c1(v1, u0));
        one = sub_vectors(&one, &p.c1(u1, v0));
        (one, p.c0(u0, v0))
    };
    let f = px.field();
    let n = m1 + m0;
    let eta = |v: &[Scalar]| -> Vector {
        let mut out = w.eta.alpha.apply(&v[..m1]);
        out.extend(w.eta.beta.apply(&v[m1..]));
        out
    };
    for a in 0..n {
        let u = unit_vector(f, n, a);
        for b in 0..n {
            let v = unit_vector(f, n, b);
            let (l1, l0) = combined(px, &u, &v);
            let (r1, r0) = combined(py, &eta(&u), &eta(&v));
            if w.xi.alpha.apply(&l1) != r1 || w.xi.beta.apply(&l0) != r0 {
                return Some((a, b));
            }
        }
    }
    None
}

/// Dimensions an isoclinism must preserve.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    /// `(dim L̄1, dim L̄0)`.
    pub central_quotient: (usize, usize),
    /// `(dim D_{L0}(L1), dim [L0,L0])`.
    pub commutator: (usize, usize),
    /// `(dim D ∩ L1^{L0}, dim [L0,L0] ∩ St ∩ Z(L0))`.
    pub commutator_center: (usize, usize),
    pub quotient_boundary_rank: usize,
    pub commutator_boundary_rank: usize,
    /// Lower central series from the second term on, up to stabilization.
    pub lower_central: Vec<(usize, usize)>,
    /// Derived series from the first derived term on, up to stabilization.
    pub derived: Vec<(usize, usize)>,
}

impl Fingerprint {
    pub fn to_vec(&self) -> Vec<usize> {
        let mut v = vec![
            self.central_quotient.0,
            self.central_quotient.1,
            self.commutator.0,
            self.commutator.1,
            self.commutator_center.0,
            self.commutator_center.1,
            self.quotient_boundary_rank,
            self.commutator_boundary_rank,
        ];
        for (a, b) in self.lower_central.iter().chain(&self.derived) {
            v.extend([*a, *b]);
        }
        v
    }

    /// First entry where the two fingerprints differ.
    pub fn difference(&self, other: &Fingerprint) -> Option<String> {
        let pairs: [(&str, (usize, usize), (usize, usize)); 3] = [
            (
                "commutator (displacement, [L0,L0]) dims",
                self.commutator,
                other.commutator,
            ),
            (
                "central quotient dims",
                self.central_quotient,
                other.central_quotient,
            ),
            (
                "commutator ∩ center dims",
                self.commutator_center,
                other.commutator_center,
            ),
        ];
        for (name, a, b) in pairs {
            if a != b {
                return Some(format!("{name} {a:?} vs {b:?}"));
            }
        }
        if self.quotient_boundary_rank != other.quotient_boundary_rank {
            return Some(format!(
                "rank of boundary on central quotient {} vs {}",
                self.quotient_boundary_rank, other.quotient_boundary_rank
            ));
        }
        if self.commutator_boundary_rank != other.commutator_boundary_rank {
            return Some(format!(
                "rank of boundary on commutator {} vs {}",
                self.commutator_boundary_rank, other.commutator_boundary_rank
            ));
        }
        if self.lower_central != other.lower_central {
            return Some(format!(
                "lower central profile {:?} vs {:?}",
                self.lower_central, other.lower_central
            ));
        }
        if self.derived != other.derived {
            return Some(format!(
                "derived profile {:?} vs {:?}",
                self.derived, other.derived
            ));
        }
        None
    }
}

/// Dimensions from the second term on, with the repeated stable term dropped
/// so the profile does not depend on where stabilization was detected.
fn profile(dims: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut v = dims[1..].to_vec();
    v.dedup();
    v
}

pub fn fingerprint(x: &CrossedModule) -> Result<Fingerprint> {
    let p = CommutatorPairing::new(x)?;
    let lc = x.series(SeriesKind::LowerCentral)?;
    let de = x.series(SeriesKind::Derived)?;
    Ok(Fingerprint {
        central_quotient: p.quotient_dims(),
        commutator: p.commutator_dims(),
        commutator_center: (
            p.commutator.s1.intersect(&p.center.s1)?.dim(),
            p.commutator.s0.intersect(&p.center.s0)?.dim(),
        ),
        quotient_boundary_rank: p.quotient.module.boundary().rank(),
        commutator_boundary_rank: p.commutator_module.boundary().rank(),
        lower_central: profile(&lc.dims()),
        derived: profile(&de.dims()),
    })
}

/// Outcome of an isoclinism search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoclinismSearch {
    Found(IsoclinismWitness),
    /// The endpoints differ in an invariant.
    FingerprintMismatch(String),
    /// Every candidate was examined.
    Exhausted,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoclinismSearchReport {
    pub outcome: IsoclinismSearch,
    pub nodes: u64,
}

/// Exhaustive search for an isoclinism `x ~ y` over a prime field.
pub fn isoclinism_search(
    x: &CrossedModule,
    y: &CrossedModule,
    opts: &SearchOptions,
) -> Result<IsoclinismSearchReport> {
    if x.field() != y.field() {
        return Err(Error::FieldMismatch(x.field(), y.field()));
    }
    if !x.field().is_finite() {
        return Err(Error::Unsupported(
            "isoclinism search needs a finite field".into(),
        ));
    }
    if let Some(d) = fingerprint(x)?.difference(&fingerprint(y)?) {
        return Ok(IsoclinismSearchReport {
            outcome: IsoclinismSearch::FingerprintMismatch(d),
            nodes: 0,
        });
    }
    let px = CommutatorPairing::new(x)?;
    let py = CommutatorPairing::new(y)?;
    let problem = search::isoclinism_problem(&px, &py);
    let report = search::run(&problem, opts, |eta: &XModMorphism| {
        let xi = xi_from_eta(&px, &py, eta)?;
        verify_with(
            &px,
            &py,
            &IsoclinismWitness {
                eta: eta.clone(),
                xi,
            },
        )
        .ok()?
        .verified()
    });
    let outcome = match report.outcome {
        SearchOutcome::Found(w) => IsoclinismSearch::Found(w),
        SearchOutcome::Exhausted => IsoclinismSearch::Exhausted,
        SearchOutcome::BudgetExhausted => IsoclinismSearch::BudgetExhausted,
    };
    Ok(IsoclinismSearchReport {
        outcome,
        nodes: report.nodes,
    })
}

/// The maps `ξ` forced by the diagrams once `η` is fixed, if they are
/// well defined.
pub fn xi_from_eta(
    px: &CommutatorPairing,
    py: &CommutatorPairing,
    eta: &XModMorphism,
) -> Option<XModMorphism> {
    let (m1, m0) = px.quotient_dims();
    let f = px.field();
    let mut src1 = Vec::new();
    let mut dst1 = Vec::new();
    for a in 0..m1 {
        for b in 0..m0 {
            src1.push(px.c1_basis(a, b).to_vec());
            dst1.push(py.c1(&eta.alpha.column(a), &eta.beta.column(b)));
        }
    }
    let mut src0 = Vec::new();
    let mut dst0 = Vec::new();
    for a in 0..m0 {
        for b in 0..m0 {
            src0.push(px.c0_basis(a, b).to_vec());
            dst0.push(py.c0(&eta.beta.column(a), &eta.beta.column(b)));
        }
    }
    let (k1, k0) = px.commutator_dims();
    let (j1, j0) = py.commutator_dims();
    Some(XModMorphism {
        alpha: linear_extension(f, k1, j1, &src1, &dst1)?,
        beta: linear_extension(f, k0, j0, &src0, &dst0)?,
    })
}

/// The linear map sending each `src[i]` to `dst[i]`, when `src` spans
/// `K^n` and the assignment respects every linear relation.
fn linear_extension(
    f: FieldSpec,
    n: usize,
    m: usize,
    src: &[Vector],
    dst: &[Vector],
) -> Option<Matrix> {
    let s = Matrix::from_columns(f, n, src);
    let t = Matrix::from_columns(f, m, dst);
    let relations = kernel(&s);
    if relations
        .basis_vectors()
        .iter()
        .any(|r| !t.apply(r).iter().all(Scalar::is_zero))
    {
        return None;
    }
    // Pick spanning columns greedily and invert.
    let mut chosen = Vec::new();
    let mut span = Subspace::zero(f, n);
    for (i, v) in src.iter().enumerate() {
        if !span.contains(v) {
            span = span
                .sum(&Subspace::span(f, n, std::slice::from_ref(v)))
                .ok()?;
            chosen.push(i);
        }
    }
    if span.dim() != n {
        return None;
    }
    let sc: Vec<Vector> = chosen.iter().map(|&i| src[i].clone()).collect();
    let tc: Vec<Vector> = chosen.iter().map(|&i| dst[i].clone()).collect();
    let inv = Matrix::from_columns(f, n, &sc).inverse()?;
    Some(Matrix::from_columns(f, m, &tc).mul(&inv))
}

/// Outcome of a Lie or crossed-module isomorphism search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsomorphismSearch<W> {
    Found(W),
    /// An invariant differs, or every candidate was examined.
    NotIsomorphic,
    BudgetExhausted,
}

impl<W> IsomorphismSearch<W> {
    pub fn is_found(&self) -> bool {
        matches!(self, IsomorphismSearch::Found(_))
    }
}

fn isomorphism_invariants(x: &CrossedModule) -> Vec<usize> {
    let (n1, n0) = x.dims();
    let z = x.center().map(|z| z.dims()).unwrap_or_default();
    vec![
        n1,
        n0,
        x.boundary().rank(),
        x.l1().center().dim(),
        x.l0().center().dim(),
        x.l1().derived_subalgebra().dim(),
        x.l0().derived_subalgebra().dim(),
        x.displacement().dim(),
        z.0,
        z.1,
    ]
}

/// Search for a crossed-module isomorphism `x -> y` over a prime field.
pub fn xmod_isomorphism_search(
    x: &CrossedModule,
    y: &CrossedModule,
    opts: &SearchOptions,
) -> Result<IsomorphismSearch<XModMorphism>> {
    if x.field() != y.field() {
        return Err(Error::FieldMismatch(x.field(), y.field()));
    }
    if !x.field().is_finite() {
        return Err(Error::Unsupported(
            "isomorphism search needs a finite field".into(),
        ));
    }
    if isomorphism_invariants(x) != isomorphism_invariants(y) {
        return Ok(IsomorphismSearch::NotIsomorphic);
    }
    let problem = search::isomorphism_problem(x, y);
    let report = search::run(&problem, opts, |m: &XModMorphism| {
        m.is_isomorphism(x, y).then(|| m.clone())
    });
    Ok(match report.outcome {
        SearchOutcome::Found(m) => IsomorphismSearch::Found(m),
        SearchOutcome::Exhausted => IsomorphismSearch::NotIsomorphic,
        SearchOutcome::BudgetExhausted => IsomorphismSearch::BudgetExhausted,
    })
}

/// Search for a Lie-algebra isomorphism `g -> h` over a prime field.
pub fn lie_isomorphism_search(
    g: &LieAlgebra,
    h: &LieAlgebra,
    opts: &SearchOptions,
) -> Result<IsomorphismSearch<Matrix>> {
    let lift = |a: &LieAlgebra| -> Result<CrossedModule> {
        let f = a.field();
        CrossedModule::new(
            LieAlgebra::abelian(f, 0),
            a.clone(),
            Matrix::zeros(f, a.dim(), 0),
            Vec::new(),
        )
    };
    Ok(match xmod_isomorphism_search(&lift(g)?, &lift(h)?, opts)? {
        IsomorphismSearch::Found(m) => IsomorphismSearch::Found(m.beta),
        IsomorphismSearch::NotIsomorphic => IsomorphismSearch::NotIsomorphic,
        IsomorphismSearch::BudgetExhausted => IsomorphismSearch::BudgetExhausted,
    })
}

/// Class-preserving derivation data compared across an isoclinic pair.
#[derive(Clone, Debug)]
pub struct DercTransport {
    /// `(dim Der_C(L0,L1), dim Der_C(K0,K1))`.
    pub whitehead_dims: (usize, usize),
    /// `(dim Der_C(L), dim Der_C(K))`.
    pub xmod_dims: (usize, usize),
    /// Isomorphism searches, run only over finite fields.
    pub whitehead_iso: Option<IsomorphismSearch<Matrix>>,
    pub xmod_iso: Option<IsomorphismSearch<Matrix>>,
    pub actor_iso: Option<IsomorphismSearch<XModMorphism>>,
}

impl DercTransport {
    pub fn dims_match(&self) -> bool {
        self.whitehead_dims.0 == self.whitehead_dims.1 && self.xmod_dims.0 == self.xmod_dims.1
    }

    pub fn isomorphisms_found(&self) -> Option<bool> {
        Some(
            self.whitehead_iso.as_ref()?.is_found()
                && self.xmod_iso.as_ref()?.is_found()
                && self.actor_iso.as_ref()?.is_found(),
        )
    }
}

pub fn derc_dimension_transport_check(
    x: &CrossedModule,
    y: &CrossedModule,
    w: &IsoclinismWitness,
    opts: &SearchOptions,
) -> Result<DercTransport> {
    require_verified(x, y, w, "witness")?;
    let (wx, wy) = (
        class_preserving_whitehead(x)?,
        class_preserving_whitehead(y)?,
    );
    let (xx, xy) = (class_preserving_xmod(x)?, class_preserving_xmod(y)?);
    let mut t = DercTransport {
        whitehead_dims: (wx.dim(), wy.dim()),
        xmod_dims: (xx.dim(), xy.dim()),
        whitehead_iso: None,
        xmod_iso: None,
        actor_iso: None,
    };
    if x.field().is_finite() {
        t.whitehead_iso = Some(lie_isomorphism_search(&wx.algebra, &wy.algebra, opts)?);
        t.xmod_iso = Some(lie_isomorphism_search(&xx.algebra, &xy.algebra, opts)?);
        t.actor_iso = Some(xmod_isomorphism_search(
            &class_actor(x)?.module,
            &class_actor(y)?.module,
            opts,
        )?);
    }
    Ok(t)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotencyTransport {
    pub class: (Option<usize>, Option<usize>),
    pub length: (Option<usize>, Option<usize>),
    pub consistent: bool,
}

/// Nilpotency and solvability agree across an isoclinism, with equal class
/// and derived length when neither end is the zero crossed module.
pub fn nilpotency_transport_check(
    x: &CrossedModule,
    y: &CrossedModule,
    w: &IsoclinismWitness,
) -> Result<NilpotencyTransport> {
    require_verified(x, y, w, "witness")?;
    let cx = x.series(SeriesKind::LowerCentral)?.index;
    let cy = y.series(SeriesKind::LowerCentral)?.index;
    let lx = x.series(SeriesKind::Derived)?.index;
    let ly = y.series(SeriesKind::Derived)?.index;
    let nontrivial = !x.is_zero() && !y.is_zero();
    let agree =
        |a: Option<usize>, b: Option<usize>| a.is_some() == b.is_some() && (!nontrivial || a == b);
    Ok(NilpotencyTransport {
        class: (cx, cy),
        length: (lx, ly),
        consistent: agree(cx, cy) && agree(lx, ly),
    })
}
