use super::{BasisAlgebra, SemisimpleAlgebra};
use crate::C64;

/// A separability idempotent `e = sum_l e'_l (x) e''_l` in `B (x) B`, stored
/// as coefficient vectors in the basis of `B`.
///
/// Defining identities: `sum_l e'_l e''_l = 1` and `(b (x) 1) e = e (1 (x) b)`
/// for every `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagonal {
    pairs: Vec<(Vec<C64>, Vec<C64>)>,
}

impl Diagonal {
    pub fn from_pairs(pairs: Vec<(Vec<C64>, Vec<C64>)>) -> Self {
        Diagonal { pairs }
    }

    pub fn pairs(&self) -> &[(Vec<C64>, Vec<C64>)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Matrix blocks of size `n` contribute `((1/n) E_kl, E_lk)` for all
    /// `k, l`; group algebras contribute `((1/|G|) delta_g, delta_{g^-1})`.
    pub fn canonical(alg: &BasisAlgebra) -> Self {
        let c = |t: f64| C64::new(t, 0.0);
        let mut pairs = Vec::new();
        match alg {
            BasisAlgebra::Matrix(a) => {
                for (b, block) in a.blocks().iter().enumerate() {
                    let w = 1.0 / block.n as f64;
                    for k in 0..block.n {
                        for l in 0..block.n {
                            let mut left = alg.basis_vector(a.basis_index(b, k, l));
                            left.iter_mut().for_each(|z| *z *= c(w));
                            pairs.push((left, alg.basis_vector(a.basis_index(b, l, k))));
                        }
                    }
                }
            }
            BasisAlgebra::Group(g) => {
                let group = g.group();
                let w = 1.0 / group.order() as f64;
                for x in group.elements() {
                    let mut left = alg.basis_vector(x);
                    left[x] = c(w);
                    pairs.push((left, alg.basis_vector(group.inv(x))));
                }
            }
        }
        Diagonal { pairs }
    }

    /// `sum_l e'_l e''_l`.
    pub fn multiplication_image(&self, alg: &BasisAlgebra) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); alg.dim()];
        for (l, r) in &self.pairs {
            for (o, z) in out.iter_mut().zip(alg.mul(l, r)) {
                *o += z;
            }
        }
        out
    }

    /// `|sum_l e'_l e''_l - 1|` in the norm of `alg`.
    pub fn multiplication_residual(&self, alg: &BasisAlgebra) -> f64 {
        let diff: Vec<C64> =
            self.multiplication_image(alg).iter().zip(alg.unit()).map(|(a, b)| a - b).collect();
        alg.norm(&diff)
    }

    /// `e` as a dense vector in `B (x) B`, index `i * dim + j`.
    pub fn dense_tensor(&self, alg: &BasisAlgebra) -> Vec<C64> {
        let d = alg.dim();
        let mut t = vec![C64::new(0.0, 0.0); d * d];
        for (l, r) in &self.pairs {
            accumulate_tensor(&mut t, d, l, r);
        }
        t
    }

    /// Largest entry of `(b (x) 1) e - e (1 (x) b)` over basis elements `b`.
    pub fn commutation_residual(&self, alg: &BasisAlgebra) -> f64 {
        let d = alg.dim();
        (0..d)
            .map(|i| {
                let b = alg.basis_vector(i);
                let mut diff = vec![C64::new(0.0, 0.0); d * d];
                for (l, r) in &self.pairs {
                    accumulate_tensor(&mut diff, d, &alg.mul(&b, l), r);
                    let neg_l: Vec<C64> = l.iter().map(|z| -z).collect();
                    accumulate_tensor(&mut diff, d, &neg_l, &alg.mul(r, &b));
                }
                diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// `e* = sum_l e'_l* (x) e''_l*`.
    pub fn adjoint(&self, alg: &BasisAlgebra) -> Diagonal {
        Diagonal {
            pairs: self.pairs.iter().map(|(l, r)| (alg.star(l), alg.star(r))).collect(),
        }
    }

    /// Whether `e* = e` entrywise to within `tol`.
    pub fn is_self_adjoint(&self, alg: &BasisAlgebra, tol: f64) -> bool {
        let a = self.dense_tensor(alg);
        let b = self.adjoint(alg).dense_tensor(alg);
        a.iter().zip(&b).all(|(x, y)| (x - y).norm() <= tol)
    }

    /// `(e + e*) / 2`, again a diagonal.
    pub fn self_adjoint(&self, alg: &BasisAlgebra) -> Diagonal {
        let half = C64::new(0.5, 0.0);
        let scaled = |v: &Vec<C64>| v.iter().map(|z| z * half).collect::<Vec<_>>();
        let mut pairs: Vec<_> = self.pairs.iter().map(|(l, r)| (scaled(l), r.clone())).collect();
        pairs.extend(self.adjoint(alg).pairs.iter().map(|(l, r)| (scaled(l), r.clone())));
        Diagonal { pairs }
    }
}

fn accumulate_tensor(t: &mut [C64], d: usize, l: &[C64], r: &[C64]) {
    for (i, &li) in l.iter().enumerate().filter(|(_, z)| z.norm_sqr() != 0.0) {
        for (j, &rj) in r.iter().enumerate().filter(|(_, z)| z.norm_sqr() != 0.0) {
            t[i * d + j] += li * rj;
        }
    }
}

/// The canonical diagonal of a semisimple algebra.
pub fn diagonal(alg: &SemisimpleAlgebra) -> Diagonal {
    Diagonal::canonical(&BasisAlgebra::Matrix(alg.clone()))
}
