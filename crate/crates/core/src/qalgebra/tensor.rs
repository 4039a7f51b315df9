use super::{Element, UqAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::scalars::{frac, Rational, C64};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

const SHIFT: u32 = 16;
const MASK: u64 = (1 << SHIFT) - 1;

/// Sparse element of `U_a1 (x) ... (x) U_an`, keyed by packed basis indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub degrees: Vec<Rational>,
    pub terms: BTreeMap<u64, C64>,
}

pub fn pack(idx: &[usize]) -> u64 {
    idx.iter().enumerate().fold(0u64, |acc, (f, &i)| acc | ((i as u64) << (SHIFT * f as u32)))
}

pub fn unpack(key: u64, arity: usize) -> Vec<usize> {
    (0..arity).map(|f| ((key >> (SHIFT * f as u32)) & MASK) as usize).collect()
}

impl Tensor {
    pub fn zero(degrees: &[Rational]) -> Self {
        assert!(degrees.len() <= 4, "tensor arity above 4");
        Self { degrees: degrees.iter().map(|d| frac(*d)).collect(), terms: BTreeMap::new() }
    }

    pub fn arity(&self) -> usize {
        self.degrees.len()
    }

    pub fn add_term(&mut self, idx: &[usize], c: C64) {
        if c.is_zero() {
            return;
        }
        *self.terms.entry(pack(idx)).or_insert(C64::zero()) += c;
    }

    pub fn outer(xs: &[&Element]) -> Self {
        let degrees: Vec<Rational> = xs.iter().map(|x| x.degree).collect();
        let mut t = Tensor::zero(&degrees);
        let supports: Vec<Vec<(usize, C64)>> = xs
            .iter()
            .map(|x| x.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(p, c)| (p, *c)).collect())
            .collect();
        let mut idx = vec![0usize; xs.len()];
        fn rec(t: &mut Tensor, s: &[Vec<(usize, C64)>], f: usize, idx: &mut Vec<usize>, c: C64) {
            if f == s.len() {
                t.add_term(idx, c);
                return;
            }
            for &(p, v) in &s[f] {
                idx[f] = p;
                rec(t, s, f + 1, idx, c * v);
            }
        }
        rec(&mut t, &supports, 0, &mut idx, C64::one());
        t
    }

    pub fn one(alg: &UqAlgebra, degrees: &[Rational]) -> Self {
        let ones: Vec<Element> = degrees.iter().map(|d| alg.one(*d)).collect();
        Tensor::outer(&ones.iter().collect::<Vec<_>>())
    }

    pub fn add(&self, o: &Tensor) -> Tensor {
        assert_eq!(self.degrees, o.degrees);
        let mut t = self.clone();
        for (k, v) in &o.terms {
            *t.terms.entry(*k).or_insert(C64::zero()) += v;
        }
        t
    }

    pub fn scale(&self, s: C64) -> Tensor {
        Tensor { degrees: self.degrees.clone(), terms: self.terms.iter().map(|(k, v)| (*k, v * s)).collect() }
    }

    pub fn sub(&self, o: &Tensor) -> Tensor {
        self.add(&o.scale(-C64::one()))
    }

    pub fn norm_inf(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, o: &Tensor) -> f64 {
        self.sub(o).norm_inf()
    }

    /// Drop coefficients below `eps`.
    pub fn pruned(mut self, eps: f64) -> Tensor {
        self.terms.retain(|_, c| c.norm() > eps);
        self
    }

    pub fn mul(&self, alg: &UqAlgebra, o: &Tensor) -> Result<Tensor> {
        if self.degrees != o.degrees {
            return Err(Error::DegreeMismatch("tensor factors differ in degree".into()));
        }
        let n = self.arity();
        let tables: Vec<_> = self.degrees.iter().map(|d| alg.table(*d)).collect();
        let mut acc: BTreeMap<u64, C64> = BTreeMap::new();
        let mut idx = vec![0usize; n];
        for (ka, va) in &self.terms {
            let ia = unpack(*ka, n);
            for (kb, vb) in &o.terms {
                let ib = unpack(*kb, n);
                let lists: Vec<&[(u32, C64)]> =
                    (0..n).map(|f| tables[f].product(ia[f], ib[f])).collect();
                if lists.iter().any(|l| l.is_empty()) {
                    continue;
                }
                let c0 = va * vb;
                product_rec(&lists, 0, &mut idx, c0, &mut acc);
            }
        }
        let mut t = Tensor { degrees: self.degrees.clone(), terms: acc };
        t.terms.retain(|_, c| c.norm() > 1e-300);
        Ok(t)
    }

    /// Reorder factors: factor `f` of the result is factor `perm[f]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Tensor {
        let n = self.arity();
        let degrees: Vec<Rational> = perm.iter().map(|&p| self.degrees[p]).collect();
        let mut t = Tensor::zero(&degrees);
        for (k, v) in &self.terms {
            let i = unpack(*k, n);
            let j: Vec<usize> = perm.iter().map(|&p| i[p]).collect();
            t.add_term(&j, *v);
        }
        t
    }

    /// `tau` on a 2-tensor.
    pub fn flip(&self) -> Tensor {
        self.permute(&[1, 0])
    }

    /// Apply a linear map to factor `f`. `m` has the images of basis vectors as columns.
    pub fn map_factor(&self, f: usize, m: &CMat, new_degree: Rational) -> Tensor {
        let n = self.arity();
        let mut degrees = self.degrees.clone();
        degrees[f] = frac(new_degree);
        let mut t = Tensor::zero(&degrees);
        for (k, v) in &self.terms {
            let mut i = unpack(*k, n);
            let col = i[f];
            for r in 0..m.nrows() {
                let c = m[(r, col)];
                if !c.is_zero() {
                    i[f] = r;
                    t.add_term(&i, v * c);
                }
            }
        }
        t
    }

    /// Apply a linear functional to factor `f`, removing it.
    pub fn contract_factor(&self, f: usize, functional: &[C64]) -> Tensor {
        let n = self.arity();
        let mut degrees = self.degrees.clone();
        degrees.remove(f);
        let mut t = Tensor::zero(&degrees);
        for (k, v) in &self.terms {
            let mut i = unpack(*k, n);
            let c = functional[i[f]];
            if !c.is_zero() {
                i.remove(f);
                t.add_term(&i, v * c);
            }
        }
        t
    }

    /// Insert a factor `x` at position `f`.
    pub fn insert_factor(&self, f: usize, x: &Element) -> Tensor {
        let n = self.arity();
        let mut degrees = self.degrees.clone();
        degrees.insert(f, x.degree);
        let mut t = Tensor::zero(&degrees);
        for (k, v) in &self.terms {
            let base = unpack(*k, n);
            for (p, c) in x.coeffs.iter().enumerate() {
                if !c.is_zero() {
                    let mut i = base.clone();
                    i.insert(f, p);
                    t.add_term(&i, v * c);
                }
            }
        }
        t
    }

    /// Multiply factors `f` and `f + 1` together (they must share a degree).
    pub fn multiply_adjacent(&self, alg: &UqAlgebra, f: usize) -> Result<Tensor> {
        let n = self.arity();
        if self.degrees[f] != self.degrees[f + 1] {
            return Err(Error::DegreeMismatch("adjacent factors differ in degree".into()));
        }
        let table = alg.table(self.degrees[f]);
        let mut degrees = self.degrees.clone();
        degrees.remove(f + 1);
        let mut t = Tensor::zero(&degrees);
        for (k, v) in &self.terms {
            let i = unpack(*k, n);
            for &(r, c) in table.product(i[f], i[f + 1]) {
                let mut j = i.clone();
                j[f] = r as usize;
                j.remove(f + 1);
                t.add_term(&j, v * c);
            }
        }
        Ok(t)
    }

    /// Phase `xi^(sum_f d_f |x_f|)` on each homogeneous term.
    pub fn weight_phase(&self, alg: &UqAlgebra, d: &[Rational]) -> Tensor {
        let n = self.arity();
        let mut t = self.clone();
        for (k, v) in t.terms.iter_mut() {
            let i = unpack(*k, n);
            let e: Rational = i.iter().zip(d).map(|(&p, dd)| *dd * alg.weight(p)).sum();
            *v *= alg.cfg.xi_pow(e);
        }
        t
    }

    /// Collapse a 1-tensor to an element.
    pub fn to_element(&self, alg: &UqAlgebra) -> Element {
        assert_eq!(self.arity(), 1);
        let mut e = alg.zero(self.degrees[0]);
        for (k, v) in &self.terms {
            e.coeffs[*k as usize] += v;
        }
        e
    }

    /// Dense coefficient vector of a 2-tensor, index `p * dim + q`.
    pub fn to_dense2(&self, alg: &UqAlgebra) -> CVec {
        assert_eq!(self.arity(), 2);
        let mut v = CVec::zeros(alg.dim * alg.dim);
        for (k, c) in &self.terms {
            let i = unpack(*k, 2);
            v[i[0] * alg.dim + i[1]] += c;
        }
        v
    }

    pub fn from_dense2(alg: &UqAlgebra, degrees: &[Rational], v: &CVec) -> Tensor {
        let mut t = Tensor::zero(degrees);
        for p in 0..alg.dim {
            for q in 0..alg.dim {
                let c = v[p * alg.dim + q];
                if c.norm() > 1e-300 {
                    t.add_term(&[p, q], c);
                }
            }
        }
        t
    }

    /// Inverse of a 2-tensor by a dense solve in the regular representation of the
    /// tensor square. Feasible for `l = 3` (729 unknowns).
    pub fn inverse2(&self, alg: &UqAlgebra) -> Result<Tensor> {
        assert_eq!(self.arity(), 2);
        let n = alg.dim * alg.dim;
        let mut m = linalg::zeros(n, n);
        let t0 = alg.table(self.degrees[0]);
        let t1 = alg.table(self.degrees[1]);
        for (k, v) in &self.terms {
            let i = unpack(*k, 2);
            for q0 in 0..alg.dim {
                for &(r0, c0) in t0.product(i[0], q0) {
                    for q1 in 0..alg.dim {
                        for &(r1, c1) in t1.product(i[1], q1) {
                            m[(r0 as usize * alg.dim + r1 as usize, q0 * alg.dim + q1)] += v * c0 * c1;
                        }
                    }
                }
            }
        }
        let one = Tensor::one(alg, &self.degrees).to_dense2(alg);
        let x = linalg::solve(&m, &one, alg.cfg.tolerance)?;
        Ok(Tensor::from_dense2(alg, &self.degrees, &x))
    }
}

fn product_rec(lists: &[&[(u32, C64)]], f: usize, idx: &mut Vec<usize>, c: C64, acc: &mut BTreeMap<u64, C64>) {
    if f == lists.len() {
        *acc.entry(pack(idx)).or_insert(C64::zero()) += c;
        return;
    }
    for &(r, v) in lists[f] {
        idx[f] = r as usize;
        product_rec(lists, f + 1, idx, c * v, acc);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat;

    #[test]
    fn pack_roundtrip() {
        let i = [3usize, 0, 124, 77];
        assert_eq!(unpack(pack(&i), 4), i.to_vec());
    }

    #[test]
    fn outer_products_multiply_factorwise() {
        let alg = UqAlgebra::from_ell(3).unwrap();
        let (a, b) = (rat(1, 3), rat(1, 5));
        let x = Tensor::outer(&[&alg.gen_e(a), &alg.k_pow(b, 1)]);
        let y = Tensor::outer(&[&alg.gen_f(a), &alg.gen_e(b)]);
        let xy = x.mul(&alg, &y).unwrap();
        let want = Tensor::outer(&[
            &alg.m(&alg.gen_e(a), &alg.gen_f(a)),
            &alg.m(&alg.k_pow(b, 1), &alg.gen_e(b)),
        ]);
        assert!(xy.max_diff(&want) < 1e-12);
        assert_eq!(xy.flip().degrees, vec![b, a]);
    }

    #[test]
    fn inverse_of_simple_tensor() {
        let alg = UqAlgebra::from_ell(3).unwrap();
        let d = rat(1, 4);
        let x = Tensor::outer(&[&alg.k_pow(d, 1), &alg.k_pow(d, 2)]);
        let xi = x.inverse2(&alg).unwrap();
        let want = Tensor::outer(&[&alg.k_pow(d, -1), &alg.k_pow(d, -2)]);
        assert!(xi.max_diff(&want) < 1e-10);
    }
}
