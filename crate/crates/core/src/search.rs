//! Backtracking search for bijective pairs of maps `(α, β)` between two
//! crossed modules over a prime field.
//!
//! Columns of `β` are assigned first, then columns of `α`. Each column ranges
//! over the target space in lexicographic order and must be independent of
//! the columns already chosen. A constraint is checked as soon as every column
//! it mentions is assigned. Each candidate column counts as one node against
//! the budget.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::field::{FieldSpec, Scalar};
use crate::isoclinism::CommutatorPairing;
use crate::linalg::{kernel, Matrix, Vector};
use crate::xmod::{CrossedModule, XModMorphism};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SearchOptions {
    pub budget: u64,
    pub jobs: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: 1_000_000,
            jobs: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome<W> {
    Found(W),
    Exhausted,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport<W> {
    pub outcome: SearchOutcome<W>,
    pub nodes: u64,
}

type Vec32 = Vec<u32>;

#[derive(Clone, Debug)]
struct Fast {
    n1: usize,
    n0: usize,
    l1: Vec32,
    l0: Vec32,
    /// Row-major `n0 x n1`.
    d: Vec32,
    act: Vec32,
}

fn residues(v: &[Scalar]) -> Vec32 {
    v.iter()
        .map(|s| s.residue().expect("prime field scalar"))
        .collect()
}

impl Fast {
    fn new(x: &CrossedModule) -> Self {
        let (n1, n0) = x.dims();
        Fast {
            n1,
            n0,
            l1: residues(x.l1().tensor()),
            l0: residues(x.l0().tensor()),
            d: residues(x.boundary().data()),
            act: residues(x.action_tensor()),
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Check {
    BetaHom(usize, usize),
    AlphaHom(usize, usize),
    Boundary(usize),
    Action(usize, usize),
    Relation(usize),
}

#[derive(Clone, Debug)]
struct Relation {
    /// Degree-1 relations pair `α` columns with `β` columns; degree-0 ones pair `β` with `β`.
    degree1: bool,
    terms: Vec<(usize, usize, u32)>,
}

/// Target values of the commutator pairings, for relation checks.
#[derive(Clone, Debug)]
struct Pairings {
    m0: usize,
    /// Flattened `c1[a][b]` and `c0[a][b]` value tensors.
    c1: Vec32,
    c0: Vec32,
    k1: usize,
    k0: usize,
}

#[derive(Clone, Debug)]
pub struct Problem {
    field: FieldSpec,
    p: u64,
    src: Fast,
    dst: Fast,
    pairings: Option<Pairings>,
    relations: Vec<Relation>,
    checks_at: Vec<Vec<Check>>,
    feasible: bool,
}

fn fast_relations(p: &CommutatorPairing) -> Vec<Relation> {
    let (m1, m0) = p.quotient_dims();
    let (k1, k0) = p.commutator_dims();
    let f = p.field();
    let mut out = Vec::new();
    let cols1: Vec<Vector> = (0..m1)
        .flat_map(|a| (0..m0).map(move |b| (a, b)))
        .map(|(a, b)| p.c1_basis(a, b).to_vec())
        .collect();
    for r in kernel(&Matrix::from_columns(f, k1, &cols1)).basis_vectors() {
        let terms = r
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i / m0, i % m0, c.residue().expect("prime")))
            .collect();
        out.push(Relation {
            degree1: true,
            terms,
        });
    }
    let cols0: Vec<Vector> = (0..m0)
        .flat_map(|a| (0..m0).map(move |b| (a, b)))
        .map(|(a, b)| p.c0_basis(a, b).to_vec())
        .collect();
    for r in kernel(&Matrix::from_columns(f, k0, &cols0)).basis_vectors() {
        // c0(a,a) = 0 and c0(a,b) = -c0(b,a) hold on every target automatically.
        let nz: Vec<usize> = r
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i)
            .collect();
        let trivial = match nz.as_slice() {
            [i] => i / m0 == i % m0,
            [i, j] => i / m0 == j % m0 && i % m0 == j / m0 && r[*i] == r[*j],
            _ => false,
        };
        if trivial {
            continue;
        }
        let terms = nz
            .iter()
            .map(|&i| (i / m0, i % m0, r[i].residue().expect("prime")))
            .collect();
        out.push(Relation {
            degree1: false,
            terms,
        });
    }
    out
}

impl Problem {
    fn new(
        src: Fast,
        dst: Fast,
        field: FieldSpec,
        pairings: Option<Pairings>,
        relations: Vec<Relation>,
    ) -> Self {
        let p = field.characteristic();
        let feasible = src.n1 == dst.n1 && src.n0 == dst.n0;
        let (n1, n0) = (src.n1, src.n0);
        let mut checks_at: Vec<Vec<Check>> = vec![Vec::new(); n0 + n1];
        if feasible {
            let a = |j: usize| n0 + j;
            let mut add = |positions: Vec<usize>, c: Check| {
                if let Some(&m) = positions.iter().max() {
                    checks_at[m].push(c);
                }
            };
            for i in 0..n0 {
                for j in i + 1..n0 {
                    let s = &src.l0[(i * n0 + j) * n0..(i * n0 + j + 1) * n0];
                    let mut ps = vec![i, j];
                    ps.extend((0..n0).filter(|&m| s[m] != 0));
                    add(ps, Check::BetaHom(i, j));
                }
            }
            for i in 0..n1 {
                for j in i + 1..n1 {
                    let s = &src.l1[(i * n1 + j) * n1..(i * n1 + j + 1) * n1];
                    let mut ps = vec![a(i), a(j)];
                    ps.extend((0..n1).filter(|&m| s[m] != 0).map(a));
                    add(ps, Check::AlphaHom(i, j));
                }
            }
            for j in 0..n1 {
                let mut ps = vec![a(j)];
                ps.extend((0..n0).filter(|&m| src.d[m * n1 + j] != 0));
                add(ps, Check::Boundary(j));
            }
            for i in 0..n0 {
                for j in 0..n1 {
                    let s = &src.act[(i * n1 + j) * n1..(i * n1 + j + 1) * n1];
                    let mut ps = vec![i, a(j)];
                    ps.extend((0..n1).filter(|&m| s[m] != 0).map(a));
                    add(ps, Check::Action(i, j));
                }
            }
            for (r, rel) in relations.iter().enumerate() {
                let ps = rel
                    .terms
                    .iter()
                    .flat_map(|&(x, y, _)| if rel.degree1 { [a(x), y] } else { [x, y] })
                    .collect();
                add(ps, Check::Relation(r));
            }
        }
        Problem {
            field,
            p,
            src,
            dst,
            pairings,
            relations,
            checks_at,
            feasible,
        }
    }

    fn positions(&self) -> usize {
        self.src.n0 + self.src.n1
    }

    fn target_dim(&self, pos: usize) -> usize {
        if pos < self.src.n0 {
            self.dst.n0
        } else {
            self.dst.n1
        }
    }
}

/// Crossed-module isomorphisms `x -> y`.
pub fn isomorphism_problem(x: &CrossedModule, y: &CrossedModule) -> Problem {
    Problem::new(Fast::new(x), Fast::new(y), x.field(), None, Vec::new())
}

/// Isomorphisms of central quotients that keep the commutator pairings
/// consistent.
pub fn isoclinism_problem(px: &CommutatorPairing, py: &CommutatorPairing) -> Problem {
    let (m1, m0) = py.quotient_dims();
    let (k1, k0) = py.commutator_dims();
    let pairings = Pairings {
        m0,
        c1: (0..m1)
            .flat_map(|a| (0..m0).map(move |b| (a, b)))
            .flat_map(|(a, b)| residues(py.c1_basis(a, b)))
            .collect(),
        c0: (0..m0)
            .flat_map(|a| (0..m0).map(move |b| (a, b)))
            .flat_map(|(a, b)| residues(py.c0_basis(a, b)))
            .collect(),
        k1,
        k0,
    };
    Problem::new(
        Fast::new(&px.quotient.module),
        Fast::new(&py.quotient.module),
        px.field(),
        Some(pairings),
        fast_relations(px),
    )
}

struct State {
    beta: Vec<Vec32>,
    alpha: Vec<Vec32>,
    /// Echelon rows `(pivot, row)` spanning the chosen columns of each map.
    ech_beta: Vec<(usize, Vec32)>,
    ech_alpha: Vec<(usize, Vec32)>,
}

struct Arith {
    p: u64,
}

impl Arith {
    fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p) as u32
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p) as u32
    }

    fn inv(&self, a: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64;
        let mut e = self.p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % self.p;
            }
            b = b * b % self.p;
            e >>= 1;
        }
        r as u32
    }

    /// `acc += c * v`.
    fn axpy(&self, acc: &mut [u32], c: u32, v: &[u32]) {
        if c == 0 {
            return;
        }
        for (x, y) in acc.iter_mut().zip(v) {
            *x = self.add(*x, self.mul(c, *y));
        }
    }

    fn combo(&self, coeffs: &[u32], cols: &[Vec32], dim: usize) -> Vec32 {
        let mut out = vec![0; dim];
        for (c, col) in coeffs.iter().zip(cols) {
            self.axpy(&mut out, *c, col);
        }
        out
    }

    fn bilinear(&self, tensor: &[u32], n: usize, out_dim: usize, x: &[u32], y: &[u32]) -> Vec32 {
        let mut out = vec![0; out_dim];
        for (i, &xi) in x.iter().enumerate().filter(|(_, v)| **v != 0) {
            for (j, &yj) in y.iter().enumerate().filter(|(_, v)| **v != 0) {
                let base = (i * n + j) * out_dim;
                self.axpy(&mut out, self.mul(xi, yj), &tensor[base..base + out_dim]);
            }
        }
        out
    }

    /// Reduces `v` against an echelon basis; `None` if it reduces to zero.
    fn reduce(&self, ech: &[(usize, Vec32)], v: &[u32]) -> Option<(usize, Vec32)> {
        let mut w = v.to_vec();
        for (piv, row) in ech {
            let c = w[*piv];
            if c != 0 {
                let neg = (self.p as u32 - c) % self.p as u32;
                self.axpy(&mut w, neg, row);
            }
        }
        let piv = w.iter().position(|&c| c != 0)?;
        let s = self.inv(w[piv]);
        for x in w.iter_mut() {
            *x = self.mul(*x, s);
        }
        Some((piv, w))
    }
}

struct Runner<'a, F> {
    problem: &'a Problem,
    ar: Arith,
    budget: u64,
    nodes: u64,
    finish: &'a F,
}

enum Step<W> {
    Found(W),
    Exhausted,
    OverBudget,
}

impl<'a, W, F> Runner<'a, F>
where
    F: Fn(&XModMorphism) -> Option<W>,
{
    fn check(&self, st: &State, c: Check) -> bool {
        let pr = self.problem;
        let (s, t) = (&pr.src, &pr.dst);
        let ar = &self.ar;
        match c {
            Check::BetaHom(i, j) => {
                let n = s.n0;
                let lhs = ar.combo(&s.l0[(i * n + j) * n..(i * n + j + 1) * n], &st.beta, t.n0);
                lhs == ar.bilinear(&t.l0, t.n0, t.n0, &st.beta[i], &st.beta[j])
            }
            Check::AlphaHom(i, j) => {
                let n = s.n1;
                let lhs = ar.combo(&s.l1[(i * n + j) * n..(i * n + j + 1) * n], &st.alpha, t.n1);
                lhs == ar.bilinear(&t.l1, t.n1, t.n1, &st.alpha[i], &st.alpha[j])
            }
            Check::Boundary(j) => {
                let col: Vec32 = (0..s.n0).map(|m| s.d[m * s.n1 + j]).collect();
                let lhs = ar.combo(&col, &st.beta, t.n0);
                let rhs: Vec32 = (0..t.n0)
                    .map(|r| {
                        let mut acc = 0;
                        for (m, &v) in st.alpha[j].iter().enumerate() {
                            acc = ar.add(acc, ar.mul(t.d[r * t.n1 + m], v));
                        }
                        acc
                    })
                    .collect();
                lhs == rhs
            }
            Check::Action(i, j) => {
                let n = s.n1;
                let lhs = ar.combo(
                    &s.act[(i * n + j) * n..(i * n + j + 1) * n],
                    &st.alpha,
                    t.n1,
                );
                lhs == ar.bilinear(&t.act, t.n1, t.n1, &st.beta[i], &st.alpha[j])
            }
            Check::Relation(r) => {
                let pg = pr.pairings.as_ref().expect("relations come with pairings");
                let rel = &pr.relations[r];
                let dim = if rel.degree1 { pg.k1 } else { pg.k0 };
                let mut acc = vec![0; dim];
                for &(a, b, coeff) in &rel.terms {
                    let v = if rel.degree1 {
                        ar.bilinear(&pg.c1, pg.m0, dim, &st.alpha[a], &st.beta[b])
                    } else {
                        ar.bilinear(&pg.c0, pg.m0, dim, &st.beta[a], &st.beta[b])
                    };
                    ar.axpy(&mut acc, coeff, &v);
                }
                acc.iter().all(|&v| v == 0)
            }
        }
    }

    fn candidate(&self, pos: usize, index: u64) -> Vec32 {
        let dim = self.problem.target_dim(pos);
        let mut v = vec![0u32; dim];
        let mut k = index;
        for slot in v.iter_mut().rev() {
            *slot = (k % self.ar.p) as u32;
            k /= self.ar.p;
        }
        v
    }

    fn count(&self, pos: usize) -> u64 {
        self.ar
            .p
            .saturating_pow(self.problem.target_dim(pos) as u32)
    }

    /// Tries one candidate at `pos`, then recurses.
    fn try_candidate(&mut self, st: &mut State, pos: usize, index: u64) -> Step<W> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Step::OverBudget;
        }
        let n0 = self.problem.src.n0;
        let v = self.candidate(pos, index);
        let ech = if pos < n0 {
            &st.ech_beta
        } else {
            &st.ech_alpha
        };
        let Some(row) = self.ar.reduce(ech, &v) else {
            return Step::Exhausted;
        };
        if pos < n0 {
            st.beta.push(v);
            st.ech_beta.push(row);
        } else {
            st.alpha.push(v);
            st.ech_alpha.push(row);
        }
        let ok = self.problem.checks_at[pos]
            .iter()
            .all(|&c| self.check(st, c));
        let step = if ok {
            self.descend(st, pos + 1)
        } else {
            Step::Exhausted
        };
        if pos < n0 {
            st.beta.pop();
            st.ech_beta.pop();
        } else {
            st.alpha.pop();
            st.ech_alpha.pop();
        }
        step
    }

    fn descend(&mut self, st: &mut State, pos: usize) -> Step<W> {
        if pos == self.problem.positions() {
            let m = to_morphism(self.problem, st);
            return match (self.finish)(&m) {
                Some(w) => Step::Found(w),
                None => Step::Exhausted,
            };
        }
        for index in 0..self.count(pos) {
            match self.try_candidate(st, pos, index) {
                Step::Exhausted => continue,
                other => return other,
            }
        }
        Step::Exhausted
    }
}

fn new_state() -> State {
    State {
        beta: Vec::new(),
        alpha: Vec::new(),
        ech_beta: Vec::new(),
        ech_alpha: Vec::new(),
    }
}

fn to_morphism(pr: &Problem, st: &State) -> XModMorphism {
    let f = pr.field;
    let conv = |cols: &[Vec32], rows: usize| -> Matrix {
        let cs: Vec<Vector> = cols
            .iter()
            .map(|c| c.iter().map(|&v| f.element(v as u64)).collect())
            .collect();
        Matrix::from_columns(f, rows, &cs)
    };
    XModMorphism {
        alpha: conv(&st.alpha, pr.dst.n1),
        beta: conv(&st.beta, pr.dst.n0),
    }
}

enum Branch<W> {
    Found(W, u64),
    Exhausted(u64),
    OverBudget,
}

/// Runs the search. With `jobs > 1` the candidates for the first column are
/// explored by parallel workers; the result and node count are those of the
/// sequential run.
pub fn run<W, F>(problem: &Problem, opts: &SearchOptions, finish: F) -> SearchReport<W>
where
    W: Send,
    F: Fn(&XModMorphism) -> Option<W> + Sync,
{
    let ar = Arith { p: problem.p };
    if !problem.feasible {
        return SearchReport {
            outcome: SearchOutcome::Exhausted,
            nodes: 0,
        };
    }
    let mut runner = Runner {
        problem,
        ar,
        budget: opts.budget,
        nodes: 0,
        finish: &finish,
    };
    if problem.positions() == 0 || opts.jobs <= 1 {
        let mut st = new_state();
        let outcome = match runner.descend(&mut st, 0) {
            Step::Found(w) => SearchOutcome::Found(w),
            Step::Exhausted => SearchOutcome::Exhausted,
            Step::OverBudget => SearchOutcome::BudgetExhausted,
        };
        let nodes = runner.nodes.min(opts.budget);
        return SearchReport { outcome, nodes };
    }
    let branches = runner.count(0) as usize;
    let results: Vec<Mutex<Option<Branch<W>>>> = (0..branches).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let first_found = AtomicUsize::new(usize::MAX);
    std::thread::scope(|scope| {
        for _ in 0..opts.jobs.min(branches) {
            scope.spawn(|| loop {
                let b = next.fetch_add(1, Ordering::SeqCst);
                if b >= branches {
                    break;
                }
                if b > first_found.load(Ordering::SeqCst) {
                    continue;
                }
                let mut r = Runner {
                    problem,
                    ar: Arith { p: problem.p },
                    budget: opts.budget,
                    nodes: 0,
                    finish: &finish,
                };
                let mut st = new_state();
                let res = match r.try_candidate(&mut st, 0, b as u64) {
                    Step::Found(w) => {
                        first_found.fetch_min(b, Ordering::SeqCst);
                        Branch::Found(w, r.nodes)
                    }
                    Step::Exhausted => Branch::Exhausted(r.nodes),
                    Step::OverBudget => Branch::OverBudget,
                };
                *results[b].lock().expect("result slot") = Some(res);
            });
        }
    });
    let mut used = 0u64;
    for slot in results {
        match slot.into_inner().expect("result slot") {
            Some(Branch::Found(w, n)) => {
                return if used + n <= opts.budget {
                    SearchReport {
                        outcome: SearchOutcome::Found(w),
                        nodes: used + n,
                    }
                } else {
                    SearchReport {
                        outcome: SearchOutcome::BudgetExhausted,
                        nodes: opts.budget,
                    }
                };
            }
            Some(Branch::Exhausted(n)) => {
                used += n;
                if used > opts.budget {
                    return SearchReport {
                        outcome: SearchOutcome::BudgetExhausted,
                        nodes: opts.budget,
                    };
                }
            }
            Some(Branch::OverBudget) => {
                return SearchReport {
                    outcome: SearchOutcome::BudgetExhausted,
                    nodes: opts.budget,
                };
            }
            None => unreachable!("branches before the first success are always explored"),
        }
    }
    SearchReport {
        outcome: SearchOutcome::Exhausted,
        nodes: used,
    }
}
