//! Independent brute-force model of crossed modules over F_2: vectors are
//! bitmasks, maps are lists of basis images, nothing is shared with the
//! library beyond reading the structure constants.

use xlie::CrossedModule;

pub struct Tiny {
    pub n1: usize,
    pub n0: usize,
    b1: Vec<u8>,
    b0: Vec<u8>,
    d: Vec<u8>,
    act: Vec<u8>,
}

fn mask(v: &[xlie::Scalar]) -> u8 {
    v.iter()
        .enumerate()
        .fold(0, |m, (k, s)| if s.is_zero() { m } else { m | 1 << k })
}

fn bits(v: u8) -> impl Iterator<Item = usize> {
    (0..8).filter(move |k| v >> k & 1 == 1)
}

fn bil(table: &[u8], n: usize, a: u8, b: u8) -> u8 {
    let mut r = 0;
    for i in bits(a) {
        for j in bits(b) {
            r ^= table[i * n + j];
        }
    }
    r
}

fn lin(images: &[u8], a: u8) -> u8 {
    bits(a).fold(0, |r, k| r ^ images[k])
}

impl Tiny {
    pub fn new(x: &CrossedModule) -> Self {
        let (n1, n0) = x.dims();
        let b1 = (0..n1 * n1)
            .map(|ij| mask(x.l1().structure_constants(ij / n1, ij % n1)))
            .collect();
        let b0 = (0..n0 * n0)
            .map(|ij| mask(x.l0().structure_constants(ij / n0, ij % n0)))
            .collect();
        let d = (0..n1).map(|j| mask(&x.boundary().column(j))).collect();
        let act = (0..n0 * n1)
            .map(|ij| mask(x.action_constants(ij / n1, ij % n1)))
            .collect();
        Tiny {
            n1,
            n0,
            b1,
            b0,
            d,
            act,
        }
    }
    fn br1(&self, a: u8, b: u8) -> u8 {
        bil(&self.b1, self.n1, a, b)
    }
    fn br0(&self, a: u8, b: u8) -> u8 {
        bil(&self.b0, self.n0, a, b)
    }
    fn act(&self, x: u8, y: u8) -> u8 {
        bil(&self.act, self.n1, x, y)
    }
    fn bd(&self, y: u8) -> u8 {
        lin(&self.d, y)
    }
    fn all1(&self) -> std::ops::Range<u8> {
        0..(1u8 << self.n1)
    }
    fn all0(&self) -> std::ops::Range<u8> {
        0..(1u8 << self.n0)
    }
}

/// A subspace given by its element list, with a basis and coordinates.
struct Sub {
    member: Vec<bool>,
    basis: Vec<u8>,
    coord: Vec<Option<u8>>,
}

fn combo(basis: &[u8], c: u8) -> u8 {
    lin(basis, c)
}

fn closure(n: usize, gens: &[u8]) -> Sub {
    let mut basis = Vec::new();
    let mut member = vec![false; 1 << n];
    member[0] = true;
    for &g in gens {
        if member[g as usize] {
            continue;
        }
        basis.push(g);
        let mut m = vec![false; 1 << n];
        for c in 0..(1u16 << basis.len()) {
            m[combo(&basis, c as u8) as usize] = true;
        }
        member = m;
    }
    let mut coord = vec![None; 1 << n];
    for c in 0..(1u16 << basis.len()) {
        coord[combo(&basis, c as u8) as usize] = Some(c as u8);
    }
    Sub {
        member,
        basis,
        coord,
    }
}

/// `V / S` with coset coordinates; basis cosets are represented by unit
/// vectors chosen greedily.
struct Quot {
    basis: Vec<u8>,
    coord: Vec<u8>,
}

fn quotient(n: usize, s: &Sub) -> Quot {
    let mut basis: Vec<u8> = Vec::new();
    let covered = |basis: &[u8], v: u8| {
        (0..(1u16 << basis.len())).any(|c| s.member[(combo(basis, c as u8) ^ v) as usize])
    };
    for i in 0..n {
        if !covered(&basis, 1 << i) {
            basis.push(1 << i);
        }
    }
    let mut coord = vec![0; 1 << n];
    for v in 0..(1u16 << n) {
        coord[v as usize] = (0..(1u16 << basis.len()))
            .find(|&c| s.member[(combo(&basis, c as u8) ^ v as u8) as usize])
            .expect("basis spans the quotient") as u8;
    }
    Quot { basis, coord }
}

struct Side {
    q1: Quot,
    q0: Quot,
    c1: Sub,
    c0: Sub,
}

fn side(x: &Tiny) -> Side {
    let fixed: Vec<u8> = x
        .all1()
        .filter(|&y| x.all0().all(|e| x.act(e, y) == 0))
        .collect();
    let central: Vec<u8> = x
        .all0()
        .filter(|&e| x.all1().all(|y| x.act(e, y) == 0) && x.all0().all(|e2| x.br0(e, e2) == 0))
        .collect();
    let z1 = closure(x.n1, &fixed);
    let z0 = closure(x.n0, &central);
    assert_eq!(
        z1.member.iter().filter(|m| **m).count(),
        fixed.len(),
        "fixed points form a subspace"
    );
    assert_eq!(
        z0.member.iter().filter(|m| **m).count(),
        central.len(),
        "St ∩ Z forms a subspace"
    );
    let mut g1 = Vec::new();
    for e in x.all0() {
        for y in x.all1() {
            g1.push(x.act(e, y));
        }
    }
    let mut g0 = Vec::new();
    for a in x.all0() {
        for b in x.all0() {
            g0.push(x.br0(a, b));
        }
    }
    Side {
        q1: quotient(x.n1, &z1),
        q0: quotient(x.n0, &z0),
        c1: closure(x.n1, &g1),
        c0: closure(x.n0, &g0),
    }
}

/// Every tuple of `k` images drawn from `choices`.
fn tuples(choices: &[u8], k: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                choices.iter().map(move |&c| {
                    let mut t = t.clone();
                    t.push(c);
                    t
                })
            })
            .collect();
    }
    out
}

/// Images in the target span a space of full dimension (coordinates via `coord`).
fn injective(images: &[u8], coord: impl Fn(u8) -> u8) -> bool {
    (1..(1u16 << images.len())).all(|c| coord(lin(images, c as u8)) != 0)
}

/// Number of isoclinisms `x -> y`, enumerating every quadruple of
/// linear maps `(η1, η0, ξ1, ξ0)` in the chosen bases.
pub fn count_isoclinisms(x: &Tiny, y: &Tiny) -> u64 {
    let (sx, sy) = (side(x), side(y));
    let (m1, m0) = (sx.q1.basis.len(), sx.q0.basis.len());
    let (k1, k0) = (sx.c1.basis.len(), sx.c0.basis.len());
    if (m1, m0, k1, k0)
        != (
            sy.q1.basis.len(),
            sy.q0.basis.len(),
            sy.c1.basis.len(),
            sy.c0.basis.len(),
        )
    {
        return 0;
    }
    let reps = |q: &Quot| -> Vec<u8> {
        (0..(1u16 << q.basis.len()))
            .map(|c| combo(&q.basis, c as u8))
            .collect()
    };
    let elems = |s: &Sub| -> Vec<u8> {
        (0..(1u16 << s.basis.len()))
            .map(|c| combo(&s.basis, c as u8))
            .collect()
    };
    let qx1 = |v: u8| sx.q1.coord[v as usize];
    let qx0 = |v: u8| sx.q0.coord[v as usize];
    let qy1 = |v: u8| sy.q1.coord[v as usize];
    let qy0 = |v: u8| sy.q0.coord[v as usize];
    let cx1 = |v: u8| sx.c1.coord[v as usize].expect("value in D");
    let cx0 = |v: u8| sx.c0.coord[v as usize].expect("value in [L0,L0]");
    let cy1 = |v: u8| sy.c1.coord[v as usize].expect("value in D'");
    let cy0 = |v: u8| sy.c0.coord[v as usize].expect("value in [L0',L0']");
    let (bx1, bx0, dx1, dx0) = (&sx.q1.basis, &sx.q0.basis, &sx.c1.basis, &sx.c0.basis);

    let mut count = 0;
    for e1 in tuples(&reps(&sy.q1), m1) {
        if !injective(&e1, qy1) {
            continue;
        }
        // η1 on a vector of L1 through its coset coordinates.
        let eta1 = |v: u8| lin(&e1, qx1(v));
        if !(0..m1)
            .all(|i| (0..m1).all(|j| qy1(y.br1(e1[i], e1[j])) == qy1(eta1(x.br1(bx1[i], bx1[j])))))
        {
            continue;
        }
        for e0 in tuples(&reps(&sy.q0), m0) {
            if !injective(&e0, qy0) {
                continue;
            }
            let eta0 = |v: u8| lin(&e0, qx0(v));
            let hom0 = (0..m0).all(|i| {
                (0..m0).all(|j| qy0(y.br0(e0[i], e0[j])) == qy0(eta0(x.br0(bx0[i], bx0[j]))))
            });
            let bd = (0..m1).all(|i| qy0(y.bd(e1[i])) == qy0(eta0(x.bd(bx1[i]))));
            let equiv = (0..m0).all(|i| {
                (0..m1).all(|j| qy1(y.act(e0[i], e1[j])) == qy1(eta1(x.act(bx0[i], bx1[j]))))
            });
            if !(hom0 && bd && equiv) {
                continue;
            }
            for z1 in tuples(&elems(&sy.c1), k1) {
                if !injective(&z1, cy1) {
                    continue;
                }
                let xi1 = |v: u8| lin(&z1, cx1(v));
                let hom1 = (0..k1)
                    .all(|i| (0..k1).all(|j| y.br1(z1[i], z1[j]) == xi1(x.br1(dx1[i], dx1[j]))));
                let diag1 = (0..m1)
                    .all(|a| (0..m0).all(|b| xi1(x.act(bx0[b], bx1[a])) == y.act(e0[b], e1[a])));
                if !(hom1 && diag1) {
                    continue;
                }
                for z0 in tuples(&elems(&sy.c0), k0) {
                    if !injective(&z0, cy0) {
                        continue;
                    }
                    let xi0 = |v: u8| lin(&z0, cx0(v));
                    let ok = (0..k0).all(|i| {
                        (0..k0).all(|j| y.br0(z0[i], z0[j]) == xi0(x.br0(dx0[i], dx0[j])))
                    }) && (0..k1).all(|i| y.bd(z1[i]) == xi0(x.bd(dx1[i])))
                        && (0..k0).all(|i| {
                            (0..k1).all(|j| y.act(z0[i], z1[j]) == xi1(x.act(dx0[i], dx1[j])))
                        })
                        && (0..m0).all(|a| {
                            (0..m0).all(|b| xi0(x.br0(bx0[a], bx0[b])) == y.br0(e0[a], e0[b]))
                        });
                    if ok {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}
