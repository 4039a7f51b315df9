use super::{pack, unpack, Element, LElement, Tensor, UqAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::scalars::{frac, Rational, C64};
use num_traits::{One, Zero};
use std::sync::Arc;

impl UqAlgebra {
    /// `Delta_{a,b}` on the basis of `U_{a+b}`, cached.
    pub fn coproduct_basis(&self, a: Rational, b: Rational) -> Arc<Vec<Tensor>> {
        let key = (frac(a), frac(b));
        if let Some(t) = self.coproducts.lock().unwrap().get(&key) {
            return t.clone();
        }
        let (a, b) = key;
        let de = Tensor::outer(&[&self.one(a), &self.gen_e(b)])
            .add(&Tensor::outer(&[&self.gen_e(a), &self.k_pow(b, 2)]));
        let df = Tensor::outer(&[&self.k_pow(a, -2), &self.gen_f(b)])
            .add(&Tensor::outer(&[&self.gen_f(a), &self.one(b)]));
        let dk = Tensor::outer(&[&self.k_pow(a, 1), &self.k_pow(b, 1)]);
        let one = Tensor::one(self, &[a, b]);
        let pows = |g: &Tensor, n: usize| {
            let mut v = vec![one.clone()];
            for _ in 1..n {
                let next = v.last().unwrap().mul(self, g).unwrap();
                v.push(next);
            }
            v
        };
        let pe = pows(&de, self.ellp);
        let pf = pows(&df, self.ellp);
        let pk = pows(&dk, self.ell);
        let mut out = Vec::with_capacity(self.dim);
        for p in 0..self.dim {
            let (i, j, k) = self.unindex(p);
            let t = pe[i].mul(self, &pf[j]).unwrap().mul(self, &pk[k]).unwrap();
            out.push(t.pruned(1e-15));
        }
        let out = Arc::new(out);
        self.coproducts.lock().unwrap().entry(key).or_insert(out).clone()
    }

    /// `Delta_{a,b}(x)` for `x` in `U_{a+b}`.
    pub fn coproduct(&self, x: &Element, split: (Rational, Rational)) -> Result<Tensor> {
        let (a, b) = split;
        if frac(a + b) != x.degree {
            return Err(Error::DegreeMismatch(format!(
                "coproduct split ({a}, {b}) of an element of degree {}",
                x.degree
            )));
        }
        let basis = self.coproduct_basis(a, b);
        let mut t = Tensor::zero(&[a, b]);
        for (p, c) in x.coeffs.iter().enumerate() {
            if !c.is_zero() {
                t = t.add(&basis[p].scale(*c));
            }
        }
        Ok(t)
    }

    /// Replace factor `f` of `t` by `Delta_{a,b}` of it.
    pub fn coproduct_factor(&self, t: &Tensor, f: usize, split: (Rational, Rational)) -> Result<Tensor> {
        let (a, b) = split;
        if frac(a + b) != t.degrees[f] {
            return Err(Error::DegreeMismatch("coproduct split does not match factor".into()));
        }
        let basis = self.coproduct_basis(a, b);
        let n = t.arity();
        let mut degrees = t.degrees.clone();
        degrees[f] = frac(a);
        degrees.insert(f + 1, frac(b));
        let mut out = Tensor::zero(&degrees);
        for (k, v) in &t.terms {
            let i = unpack(*k, n);
            for (k2, w) in &basis[i[f]].terms {
                let pq = unpack(*k2, 2);
                let mut j = i.clone();
                j[f] = pq[0];
                j.insert(f + 1, pq[1]);
                *out.terms.entry(pack(&j)).or_insert(C64::zero()) += v * w;
            }
        }
        Ok(out)
    }

    /// Matrix of `S_a : U_a -> U_{-a}`, cached.
    pub fn antipode_matrix(&self, degree: Rational) -> Arc<CMat> {
        let d = frac(degree);
        if let Some(m) = self.antipodes.lock().unwrap().get(&d) {
            return m.clone();
        }
        let nd = frac(-d);
        let se = self.m(&self.gen_e(nd), &self.k_pow(nd, -2)).scale(-C64::one());
        let sf = self.m(&self.k_pow(nd, 2), &self.gen_f(nd)).scale(-C64::one());
        let sk = self.k_pow(nd, -1);
        let mut m = linalg::zeros(self.dim, self.dim);
        let mut pk = vec![self.one(nd)];
        for _ in 1..self.ell {
            let n = self.m(pk.last().unwrap(), &sk);
            pk.push(n);
        }
        let mut pf = vec![self.one(nd)];
        let mut pe = vec![self.one(nd)];
        for _ in 1..self.ellp {
            let n = self.m(pf.last().unwrap(), &sf);
            pf.push(n);
            let n = self.m(pe.last().unwrap(), &se);
            pe.push(n);
        }
        for p in 0..self.dim {
            let (i, j, k) = self.unindex(p);
            let img = self.m(&self.m(&pk[k], &pf[j]), &pe[i]);
            for (r, c) in img.coeffs.iter().enumerate() {
                m[(r, p)] = *c;
            }
        }
        let m = Arc::new(m);
        self.antipodes.lock().unwrap().entry(d).or_insert(m).clone()
    }

    pub fn antipode(&self, x: &Element) -> Element {
        let m = self.antipode_matrix(x.degree);
        let v = m.as_ref() * x.to_vec();
        self.from_vec(-x.degree, &v)
    }

    /// `S^-1(y) = g^-1 S(y) g`.
    pub fn antipode_inv(&self, y: &Element) -> Element {
        let s = self.antipode(y);
        let d = s.degree;
        self.m(&self.m(&self.pivot_inv(d), &s), &self.pivot(d))
    }

    pub fn antipode_matrix_inv(&self, degree: Rational) -> CMat {
        let d = frac(degree);
        let nd = frac(-d);
        let s = self.antipode_matrix(d);
        let gl = self.left_matrix(&self.pivot_inv(nd));
        let gr = self.right_matrix(&self.pivot(nd));
        gl * gr * s.as_ref()
    }

    /// `S(xi^(c H) y) = xi^(-c H) xi^(c |y|) S(y)`.
    pub fn antipode_l(&self, a: &LElement) -> LElement {
        LElement { c: -a.c, x: self.weight_phase(&self.antipode(&a.x), a.c) }
    }

    pub fn antipode_inv_l(&self, a: &LElement) -> LElement {
        LElement { c: -a.c, x: self.weight_phase(&self.antipode_inv(&a.x), a.c) }
    }

    /// Counit on `U_0`.
    pub fn counit(&self, x: &Element) -> Result<C64> {
        if !x.degree.is_zero() {
            return Err(Error::DegreeMismatch("counit is defined on degree 0".into()));
        }
        Ok(self.counit_vector().iter().zip(&x.coeffs).map(|(a, b)| a * b).sum())
    }

    /// `epsilon` as a functional on the basis.
    pub fn counit_vector(&self) -> Vec<C64> {
        (0..self.dim)
            .map(|p| {
                let (i, j, _) = self.unindex(p);
                if i == 0 && j == 0 {
                    C64::one()
                } else {
                    C64::zero()
                }
            })
            .collect()
    }

    /// `g = K^(2 - 2 l')`.
    pub fn pivot(&self, degree: Rational) -> Element {
        self.k_pow(degree, 2 - 2 * self.ellp as i64)
    }

    pub fn pivot_inv(&self, degree: Rational) -> Element {
        self.k_pow(degree, 2 * self.ellp as i64 - 2)
    }

    pub fn pivot_power(&self, degree: Rational, n: i64) -> Element {
        self.k_pow(degree, n * (2 - 2 * self.ellp as i64))
    }
}

/// Largest basis-wise residual of `(Delta_{a,b} (x) id) Delta_{a+b,c} = (id (x) Delta_{b,c}) Delta_{a,b+c}`.
pub fn coassociativity_residual(alg: &UqAlgebra, a: Rational, b: Rational, c: Rational, basis: &[usize]) -> f64 {
    let top = frac(a + b + c);
    let mut worst: f64 = 0.0;
    for &p in basis {
        let x = alg.basis(top, p);
        let l = alg
            .coproduct_factor(&alg.coproduct(&x, (a + b, c)).unwrap(), 0, (a, b))
            .unwrap();
        let r = alg
            .coproduct_factor(&alg.coproduct(&x, (a, b + c)).unwrap(), 1, (b, c))
            .unwrap();
        worst = worst.max(l.max_diff(&r));
    }
    worst
}

/// Residual of both counit laws on the basis of `U_a`.
pub fn counit_residual(alg: &UqAlgebra, a: Rational) -> f64 {
    let eps = alg.counit_vector();
    let mut worst: f64 = 0.0;
    for p in 0..alg.dim {
        let x = alg.basis(a, p);
        let l = alg.coproduct(&x, (Rational::zero(), a)).unwrap().contract_factor(0, &eps).to_element(alg);
        let r = alg.coproduct(&x, (a, Rational::zero())).unwrap().contract_factor(1, &eps).to_element(alg);
        worst = worst.max(l.max_diff(&x)).max(r.max_diff(&x));
    }
    worst
}

/// Residual of `m(S (x) id) Delta_{-a,a} = m(id (x) S) Delta_{a,-a} = epsilon 1` on `U_0`.
pub fn antipode_residual(alg: &UqAlgebra, a: Rational) -> f64 {
    let zero = Rational::zero();
    let eps = alg.counit_vector();
    let s = alg.antipode_matrix(-a);
    let mut worst: f64 = 0.0;
    for p in 0..alg.dim {
        let x = alg.basis(zero, p);
        let want = alg.one(a).scale(eps[p]);
        let l = alg.coproduct(&x, (-a, a)).unwrap().map_factor(0, &s, a);
        let l = l.multiply_adjacent(alg, 0).unwrap().to_element(alg);
        let r = alg.coproduct(&x, (a, -a)).unwrap().map_factor(1, &s, a);
        let r = r.multiply_adjacent(alg, 0).unwrap().to_element(alg);
        worst = worst.max(l.max_diff(&want)).max(r.max_diff(&want));
    }
    worst
}

/// Residual of `S_{-a} S_a (x) = g x g^-1` on the basis of `U_a`.
pub fn pivot_residual(alg: &UqAlgebra, a: Rational) -> f64 {
    let g = alg.pivot(a);
    let gi = alg.pivot_inv(a);
    let mut worst: f64 = 0.0;
    for p in 0..alg.dim {
        let x = alg.basis(a, p);
        let ss = alg.antipode(&alg.antipode(&x));
        let conj = alg.m(&alg.m(&g, &x), &gi);
        worst = worst.max(ss.max_diff(&conj));
    }
    worst
}

/// `S` is an anti-homomorphism: residual of `S(xy) = S(y) S(x)` over sampled basis pairs.
pub fn antipode_anti_residual(alg: &UqAlgebra, a: Rational, stride: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for p in (0..alg.dim).step_by(stride.max(1)) {
        for q in (0..alg.dim).step_by(stride.max(1)) {
            let x = alg.basis(a, p);
            let y = alg.basis(a, q);
            let l = alg.antipode(&alg.m(&x, &y));
            let r = alg.m(&alg.antipode(&y), &alg.antipode(&x));
            worst = worst.max(l.max_diff(&r));
        }
    }
    worst
}

/// `epsilon` is multiplicative on `U_0`.
pub fn counit_multiplicative_residual(alg: &UqAlgebra) -> f64 {
    let zero = Rational::zero();
    let mut worst: f64 = 0.0;
    for p in 0..alg.dim {
        for q in 0..alg.dim {
            let x = alg.basis(zero, p);
            let y = alg.basis(zero, q);
            let l = alg.counit(&alg.m(&x, &y)).unwrap();
            let r = alg.counit(&x).unwrap() * alg.counit(&y).unwrap();
            worst = worst.max((l - r).norm());
        }
    }
    worst
}
