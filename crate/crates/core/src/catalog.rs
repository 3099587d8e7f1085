//! Deterministic builders for the standard small algebras and crossed modules.

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::lie::LieAlgebra;
use crate::linalg::{unit_vector, Matrix, Subspace};
use crate::xmod::CrossedModule;

/// The `n`-dimensional abelian Lie algebra.
pub fn abelian(field: FieldSpec, n: usize) -> LieAlgebra {
    LieAlgebra::abelian(field, n)
}

/// The 2-dimensional nonabelian algebra, `[e0, e1] = e1`.
pub fn n2(field: FieldSpec) -> LieAlgebra {
    LieAlgebra::from_integer_brackets(field, 2, &[(0, 1, &[0, 1])]).expect("n2 is a Lie algebra")
}

/// The Heisenberg algebra on `(x, y, z)`, `[x, y] = z`.
pub fn h3(field: FieldSpec) -> LieAlgebra {
    LieAlgebra::from_integer_brackets(field, 3, &[(0, 1, &[0, 0, 1])]).expect("h3 is a Lie algebra")
}

/// `sl2` on `(h, e, f)`: `[h,e] = 2e`, `[h,f] = -2f`, `[e,f] = h`.
/// Refused in characteristic 2 and 3.
pub fn sl2(field: FieldSpec) -> Result<LieAlgebra> {
    if matches!(field.characteristic(), 2 | 3) {
        return Err(Error::Unsupported(format!("sl2 degenerates over {field}")));
    }
    LieAlgebra::from_integer_brackets(
        field,
        3,
        &[(0, 1, &[0, 2, 0]), (0, 2, &[0, 0, -2]), (1, 2, &[1, 0, 0])],
    )
}

/// `g ⊕ a_1`.
pub fn with_abelian_summand(g: &LieAlgebra, n: usize) -> LieAlgebra {
    g.direct_sum(&LieAlgebra::abelian(g.field(), n))
        .expect("same field")
}

/// `g --id--> g` with the adjoint action.
pub fn identity_xmod(g: &LieAlgebra) -> CrossedModule {
    let n = g.dim();
    CrossedModule::new(
        g.clone(),
        g.clone(),
        Matrix::identity(g.field(), n),
        g.tensor().to_vec(),
    )
    .expect("identity crossed module is valid")
}

/// `h --inc--> g` for an ideal `h` of `g`, with the adjoint action.
pub fn inclusion_xmod(g: &LieAlgebra, h: &Subspace) -> Result<CrossedModule> {
    if h.ambient_dim() != g.dim() || !g.is_ideal(h) {
        return Err(Error::Precondition("subspace is not an ideal".into()));
    }
    let l1 = g.restrict(h)?;
    let basis = h.basis_vectors();
    let mut action = Vec::with_capacity(g.dim() * basis.len() * basis.len());
    for i in 0..g.dim() {
        let e = unit_vector(g.field(), g.dim(), i);
        for y in &basis {
            action.extend(h.coordinates(&g.bracket(&e, y)).expect("ideal"));
        }
    }
    CrossedModule::new(l1, g.clone(), h.inclusion(), action)
}

/// `V --0--> g` for a `g`-module `V`; `rho[i]` is the matrix of `e_i` on `V`.
pub fn module_xmod(g: &LieAlgebra, rho: &[Matrix]) -> Result<CrossedModule> {
    let m = rho.first().map_or(0, Matrix::rows);
    let v = LieAlgebra::abelian(g.field(), m);
    CrossedModule::from_action_matrices(v, g.clone(), Matrix::zeros(g.field(), g.dim(), m), rho)
}

/// `g --ad--> Der(g)`, with `Der(g)` acting by evaluation.
pub fn adjoint_actor_xmod(g: &LieAlgebra) -> CrossedModule {
    let der = g.derivation_algebra();
    let cols: Vec<_> = (0..g.dim())
        .map(|j| der.coordinates(&g.ad(j)).expect("ad is a derivation"))
        .collect();
    let boundary = Matrix::from_columns(g.field(), der.dim(), &cols);
    CrossedModule::from_action_matrices(g.clone(), der.algebra.clone(), boundary, &der.basis)
        .expect("adjoint actor crossed module is valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EntryKind {
    Lie,
    XMod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub kind: EntryKind,
    pub description: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatalogValue {
    Lie(LieAlgebra),
    XMod(CrossedModule),
}

const fn lie(name: &'static str, description: &'static str) -> CatalogEntry {
    CatalogEntry {
        name,
        kind: EntryKind::Lie,
        description,
    }
}

const fn xmod(name: &'static str, description: &'static str) -> CatalogEntry {
    CatalogEntry {
        name,
        kind: EntryKind::XMod,
        description,
    }
}

pub const ENTRIES: &[CatalogEntry] = &[
    lie("a1", "abelian, dim 1"),
    lie("a2", "abelian, dim 2"),
    lie("a3", "abelian, dim 3"),
    lie("n2", "[e0,e1] = e1"),
    lie("h3", "Heisenberg, [x,y] = z"),
    lie("h3+a1", "h3 ⊕ a1"),
    lie("sl2", "[h,e] = 2e, [h,f] = -2f, [e,f] = h"),
    xmod("zero", "0 -> 0"),
    xmod("id-a1", "a1 --id--> a1"),
    xmod("id-a3", "a3 --id--> a3"),
    xmod("id-n2", "n2 --id--> n2"),
    xmod("id-h3", "h3 --id--> h3"),
    xmod("id-h3+a1", "h3 ⊕ a1 --id--> h3 ⊕ a1"),
    xmod("id-sl2", "sl2 --id--> sl2"),
    xmod("inc-0-h3", "0 --inc--> h3"),
    xmod("inc-0-n2", "0 --inc--> n2"),
    xmod("inc-z-h3", "span{z} --inc--> h3"),
    xmod("inc-yz-h3", "span{y,z} --inc--> h3"),
    xmod("mod-trivial-a1", "a1 --0--> a1, trivial action"),
    xmod("mod-scale-a1", "a1 --0--> a1, e0 acts by 1"),
    xmod("mod-natural-n2", "K^2 --0--> n2, natural action"),
    xmod("actor-a1", "a1 --ad--> Der(a1)"),
    xmod("actor-n2", "n2 --ad--> Der(n2)"),
    xmod("actor-h3", "h3 --ad--> Der(h3)"),
    xmod("id-h3+trivial", "id(h3) ⊕ (a1 --0--> a1)"),
];

pub fn entry(name: &str) -> Option<&'static CatalogEntry> {
    ENTRIES.iter().find(|e| e.name == name)
}

/// Named algebras: `a<n>`, `n2`, `h3`, `sl2`, and `+`-separated direct sums.
pub fn named_algebra(name: &str, field: FieldSpec) -> Result<LieAlgebra> {
    let mut parts = name.split('+');
    let first = parts.next().unwrap_or_default();
    let mut g = single_algebra(first, field)?;
    for p in parts {
        g = g.direct_sum(&single_algebra(p, field)?)?;
    }
    Ok(g)
}

fn single_algebra(name: &str, field: FieldSpec) -> Result<LieAlgebra> {
    match name {
        "n2" => Ok(n2(field)),
        "h3" => Ok(h3(field)),
        "sl2" => sl2(field),
        _ => match name.strip_prefix('a').map(str::parse::<usize>) {
            Some(Ok(n)) => Ok(abelian(field, n)),
            _ => Err(Error::Parse(format!("unknown algebra {name:?}"))),
        },
    }
}

pub fn build(name: &str, field: FieldSpec) -> Result<CatalogValue> {
    let e = entry(name).ok_or_else(|| Error::Parse(format!("unknown catalog entry {name:?}")))?;
    if e.kind == EntryKind::Lie {
        return named_algebra(name, field).map(CatalogValue::Lie);
    }
    build_xmod(name, field).map(CatalogValue::XMod)
}

pub fn build_xmod(name: &str, field: FieldSpec) -> Result<CrossedModule> {
    let one = |m: usize| Matrix::from_vec(field, m, m, vec![field.one(); m * m]);
    let x = match name {
        "zero" => CrossedModule::zero(field),
        "inc-0-h3" => inclusion_xmod(&h3(field), &Subspace::zero(field, 3))?,
        "inc-0-n2" => inclusion_xmod(&n2(field), &Subspace::zero(field, 2))?,
        "inc-z-h3" => inclusion_xmod(
            &h3(field),
            &Subspace::span(field, 3, &[unit_vector(field, 3, 2)]),
        )?,
        "inc-yz-h3" => inclusion_xmod(
            &h3(field),
            &Subspace::span(
                field,
                3,
                &[unit_vector(field, 3, 1), unit_vector(field, 3, 2)],
            ),
        )?,
        "mod-trivial-a1" => module_xmod(&abelian(field, 1), &[Matrix::zeros(field, 1, 1)])?,
        "mod-scale-a1" => module_xmod(&abelian(field, 1), &[one(1)])?,
        "mod-natural-n2" => module_xmod(
            &n2(field),
            &[
                Matrix::from_i64(field, &[&[1, 0], &[0, 0]]),
                Matrix::from_i64(field, &[&[0, 1], &[0, 0]]),
            ],
        )?,
        "id-h3+trivial" => {
            identity_xmod(&h3(field)).direct_sum(&build_xmod("mod-trivial-a1", field)?)?
        }
        _ => {
            if let Some(g) = name.strip_prefix("id-") {
                identity_xmod(&named_algebra(g, field)?)
            } else if let Some(g) = name.strip_prefix("actor-") {
                adjoint_actor_xmod(&named_algebra(g, field)?)
            } else {
                return Err(Error::Parse(format!("unknown crossed module {name:?}")));
            }
        }
    };
    Ok(x)
}

/// Every crossed-module entry that exists over `field`.
pub fn all_xmods(field: FieldSpec) -> Vec<(&'static str, CrossedModule)> {
    ENTRIES
        .iter()
        .filter(|e| e.kind == EntryKind::XMod)
        .filter_map(|e| build_xmod(e.name, field).ok().map(|x| (e.name, x)))
        .collect()
}
