//! The quotient algebras `U_a`: basis `E^i F^j K^k` with `i, j < l'`, `k < l`,
//! relations of quantum sl2 at `q = xi`, and `K^l` acting as `exp(2 pi i a)`.

mod hopf;
mod rmatrix;
mod tensor;

pub use hopf::*;
pub use rmatrix::*;
pub use tensor::*;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::scalars::{format_rational, format_sig, frac, RootOfUnityConfig, Rational, C64};
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

/// Dense element of `U_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub degree: Rational,
    pub coeffs: Vec<C64>,
}

impl Element {
    pub fn add(&self, o: &Element) -> Element {
        assert_eq!(self.degree, o.degree, "adding elements of different degrees");
        Element {
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Element) -> Element {
        self.add(&o.scale(-C64::one()))
    }

    pub fn scale(&self, s: C64) -> Element {
        Element { degree: self.degree, coeffs: self.coeffs.iter().map(|a| a * s).collect() }
    }

    pub fn norm_inf(&self) -> f64 {
        crate::scalars::max_norm(&self.coeffs)
    }

    pub fn max_diff(&self, o: &Element) -> f64 {
        self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn to_vec(&self) -> CVec {
        CVec::from_column_slice(&self.coeffs)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm_inf() <= tol
    }
}

/// Element `xi^(c H) x` of the extension by fractional Cartan powers.
#[derive(Debug, Clone, PartialEq)]
pub struct LElement {
    pub c: Rational,
    pub x: Element,
}

/// Sparse multiplication table: `entries[p * dim + q]` is `e_p e_q`.
#[derive(Debug)]
pub struct StructureTable {
    pub dim: usize,
    pub entries: Vec<Vec<(u32, C64)>>,
}

impl StructureTable {
    pub fn product(&self, p: usize, q: usize) -> &[(u32, C64)] {
        &self.entries[p * self.dim + q]
    }
}

/// Shared context for every `U_a` at a fixed root of unity, with lazily built caches.
#[derive(Debug)]
pub struct UqAlgebra {
    pub cfg: RootOfUnityConfig,
    pub ell: usize,
    pub ellp: usize,
    pub dim: usize,
    xi_pows: Vec<C64>,
    f_a: Vec<C64>,
    f_b: Vec<C64>,
    tables: Mutex<HashMap<Rational, Arc<StructureTable>>>,
    coproducts: Mutex<HashMap<(Rational, Rational), Arc<Vec<Tensor>>>>,
    antipodes: Mutex<HashMap<Rational, Arc<CMat>>>,
}

impl UqAlgebra {
    pub fn new(cfg: RootOfUnityConfig) -> Self {
        let ell = cfg.ell as usize;
        let ellp = cfg.ell_prime as usize;
        let dim = ellp * ellp * ell;
        let xi_pows: Vec<C64> = (0..ell as i64).map(|k| cfg.xi_pow_int(k)).collect();
        let d = cfg.xi_diff();
        let mut f_a = vec![C64::zero(); ellp * ellp];
        let mut f_b = vec![C64::zero(); ellp * ellp];
        for i in 0..ellp {
            for j in 0..ellp {
                let (i_, j_) = (i as i64, j as i64);
                let a: C64 = (0..i_).map(|s| cfg.xi_pow_int(2 * s - 2 * j_)).sum();
                let b: C64 = (0..i_).map(|s| cfg.xi_pow_int(-2 * s + 2 * j_)).sum();
                f_a[i * ellp + j] = a / d;
                f_b[i * ellp + j] = b / d;
            }
        }
        Self {
            cfg,
            ell,
            ellp,
            dim,
            xi_pows,
            f_a,
            f_b,
            tables: Mutex::new(HashMap::new()),
            coproducts: Mutex::new(HashMap::new()),
            antipodes: Mutex::new(HashMap::new()),
        }
    }

    pub fn from_ell(ell: u32) -> Result<Self> {
        Ok(Self::new(RootOfUnityConfig::validated(ell)?))
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.ellp + j) * self.ell + k
    }

    #[inline]
    pub fn unindex(&self, p: usize) -> (usize, usize, usize) {
        let k = p % self.ell;
        let ij = p / self.ell;
        (ij / self.ellp, ij % self.ellp, k)
    }

    /// Weight `|E^i F^j K^k| = i - j`.
    #[inline]
    pub fn weight(&self, p: usize) -> i64 {
        let (i, j, _) = self.unindex(p);
        i as i64 - j as i64
    }

    #[inline]
    fn xi_int(&self, n: i64) -> C64 {
        self.xi_pows[n.rem_euclid(self.ell as i64) as usize]
    }

    /// Value of `K^l` in degree `a`.
    pub fn z(&self, degree: Rational) -> C64 {
        self.cfg.e2pi(degree)
    }

    pub fn zero(&self, degree: Rational) -> Element {
        Element { degree: frac(degree), coeffs: vec![C64::zero(); self.dim] }
    }

    pub fn basis(&self, degree: Rational, p: usize) -> Element {
        let mut e = self.zero(degree);
        e.coeffs[p] = C64::one();
        e
    }

    pub fn one(&self, degree: Rational) -> Element {
        self.basis(degree, 0)
    }

    /// `E^i F^j K^k` for any integer `k`, reduced with `K^l = z`. Zero when `i` or `j >= l'`.
    pub fn monomial(&self, degree: Rational, i: usize, j: usize, k: i64) -> Element {
        let mut e = self.zero(degree);
        if i < self.ellp && j < self.ellp {
            let l = self.ell as i64;
            let wraps = k.div_euclid(l);
            let z = self.z(e.degree);
            e.coeffs[self.index(i, j, k.rem_euclid(l) as usize)] = z.powi(wraps as i32);
        }
        e
    }

    pub fn k_pow(&self, degree: Rational, k: i64) -> Element {
        self.monomial(degree, 0, 0, k)
    }

    pub fn gen_e(&self, degree: Rational) -> Element {
        self.monomial(degree, 1, 0, 0)
    }

    pub fn gen_f(&self, degree: Rational) -> Element {
        self.monomial(degree, 0, 1, 0)
    }

    /// Left multiplication by `K` on a coefficient vector.
    pub fn apply_k(&self, degree: Rational, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::zero(); self.dim];
        let z = self.z(degree);
        for (p, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (i, j, k) = self.unindex(p);
            let ph = self.xi_int(i as i64 - j as i64) * c;
            if k + 1 == self.ell {
                out[self.index(i, j, 0)] += ph * z;
            } else {
                out[p + 1] += ph;
            }
        }
        out
    }

    pub fn apply_e(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::zero(); self.dim];
        for (p, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (i, j, k) = self.unindex(p);
            if i + 1 < self.ellp {
                out[self.index(i + 1, j, k)] += c;
            }
        }
        out
    }

    pub fn apply_f(&self, degree: Rational, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::zero(); self.dim];
        let z = self.z(degree);
        let zi = z.inv();
        let l = self.ell;
        for (p, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (i, j, k) = self.unindex(p);
            if j + 1 < self.ellp {
                out[self.index(i, j + 1, k)] += c;
            }
            if i > 0 {
                let a = self.f_a[i * self.ellp + j];
                let b = self.f_b[i * self.ellp + j];
                let (kp, fp) = if k + 2 >= l { (k + 2 - l, z) } else { (k + 2, C64::one()) };
                out[self.index(i - 1, j, kp)] -= a * fp * c;
                let (km, fm) = if k < 2 { (k + l - 2, zi) } else { (k - 2, C64::one()) };
                out[self.index(i - 1, j, km)] += b * fm * c;
            }
        }
        out
    }

    fn build_table(&self, degree: Rational) -> StructureTable {
        let dim = self.dim;
        let mut entries = vec![Vec::new(); dim * dim];
        for q in 0..dim {
            let mut vk = vec![C64::zero(); dim];
            vk[q] = C64::one();
            for k in 0..self.ell {
                let mut vj = vk.clone();
                for j in 0..self.ellp {
                    let mut vi = vj.clone();
                    for i in 0..self.ellp {
                        let p = self.index(i, j, k);
                        entries[p * dim + q] = vi
                            .iter()
                            .enumerate()
                            .filter(|(_, c)| c.norm() > 1e-15)
                            .map(|(r, c)| (r as u32, *c))
                            .collect();
                        vi = self.apply_e(&vi);
                    }
                    vj = self.apply_f(degree, &vj);
                }
                vk = self.apply_k(degree, &vk);
            }
        }
        StructureTable { dim, entries }
    }

    pub fn table(&self, degree: Rational) -> Arc<StructureTable> {
        let d = frac(degree);
        if let Some(t) = self.tables.lock().unwrap().get(&d) {
            return t.clone();
        }
        let t = Arc::new(self.build_table(d));
        self.tables.lock().unwrap().entry(d).or_insert(t).clone()
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Result<Element> {
        if a.degree != b.degree {
            return Err(Error::DegreeMismatch(format!(
                "product of degrees {} and {}",
                format_rational(a.degree),
                format_rational(b.degree)
            )));
        }
        let t = self.table(a.degree);
        let mut out = self.zero(a.degree);
        for (p, ca) in a.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (q, cb) in b.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let s = ca * cb;
                for &(r, c) in t.product(p, q) {
                    out.coeffs[r as usize] += s * c;
                }
            }
        }
        Ok(out)
    }

    /// Product of elements known to share a degree.
    pub fn m(&self, a: &Element, b: &Element) -> Element {
        self.mul(a, b).expect("degrees agree")
    }

    pub fn mul_all(&self, xs: &[&Element]) -> Result<Element> {
        let mut it = xs.iter();
        let first = it.next().ok_or_else(|| Error::DegreeMismatch("empty product".into()))?;
        let mut acc = (*first).clone();
        for x in it {
            acc = self.mul(&acc, x)?;
        }
        Ok(acc)
    }

    pub fn pow(&self, a: &Element, n: usize) -> Element {
        let mut acc = self.one(a.degree);
        for _ in 0..n {
            acc = self.m(&acc, a);
        }
        acc
    }

    /// Matrix of `y -> a y`.
    pub fn left_matrix(&self, a: &Element) -> CMat {
        let t = self.table(a.degree);
        let mut m = linalg::zeros(self.dim, self.dim);
        for (p, ca) in a.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for q in 0..self.dim {
                for &(r, c) in t.product(p, q) {
                    m[(r as usize, q)] += ca * c;
                }
            }
        }
        m
    }

    /// Matrix of `y -> y a`.
    pub fn right_matrix(&self, a: &Element) -> CMat {
        let t = self.table(a.degree);
        let mut m = linalg::zeros(self.dim, self.dim);
        for (q, ca) in a.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for p in 0..self.dim {
                for &(r, c) in t.product(p, q) {
                    m[(r as usize, p)] += ca * c;
                }
            }
        }
        m
    }

    pub fn from_vec(&self, degree: Rational, v: &CVec) -> Element {
        Element { degree: frac(degree), coeffs: v.iter().copied().collect() }
    }

    /// Two-sided inverse by solving `a x = 1`.
    pub fn inverse(&self, a: &Element) -> Result<Element> {
        let l = self.left_matrix(a);
        let one = self.one(a.degree).to_vec();
        let x = linalg::solve(&l, &one, self.cfg.tolerance)?;
        let inv = self.from_vec(a.degree, &x);
        let r = self.m(&inv, a).max_diff(&self.one(a.degree));
        if r > self.cfg.tolerance * a.norm_inf().max(1.0) * inv.norm_inf().max(1.0) {
            return Err(Error::NotInvertible(format!("left inverse residual {r:e}")));
        }
        Ok(inv)
    }

    /// `sum_w xi^(d w) x_w` over the weight decomposition.
    pub fn weight_phase(&self, x: &Element, d: Rational) -> Element {
        let mut out = x.clone();
        for (p, c) in out.coeffs.iter_mut().enumerate() {
            if !c.is_zero() {
                *c *= self.cfg.xi_pow(d * self.weight(p));
            }
        }
        out
    }

    /// Component of weight `w`.
    pub fn weight_component(&self, x: &Element, w: i64) -> Element {
        let mut out = x.clone();
        for (p, c) in out.coeffs.iter_mut().enumerate() {
            if self.weight(p) != w {
                *c = C64::zero();
            }
        }
        out
    }

    /// Largest `|a b - b a|` coefficient.
    pub fn commutator_norm(&self, a: &Element, b: &Element) -> f64 {
        self.m(a, b).max_diff(&self.m(b, a))
    }

    /// Residual of centrality against `E`, `F`, `K`.
    pub fn centrality_residual(&self, x: &Element) -> f64 {
        let d = x.degree;
        [self.gen_e(d), self.gen_f(d), self.k_pow(d, 1)]
            .iter()
            .map(|g| self.commutator_norm(g, x))
            .fold(0.0, f64::max)
    }

    /// `(xi^(c1 H) x)(xi^(c2 H) y) = xi^((c1+c2) H) (xi^(-c2 |x|) x) y`.
    pub fn lmul(&self, a: &LElement, b: &LElement) -> Result<LElement> {
        let x = self.weight_phase(&a.x, -b.c);
        Ok(LElement { c: a.c + b.c, x: self.mul(&x, &b.x)? })
    }

    /// Turn `xi^(c H) x` into an honest element; fails unless `c` is an integer.
    pub fn lower(&self, a: &LElement) -> Result<Element> {
        if !a.c.is_integer() {
            return Err(Error::FractionalCartan { exponent: a.c });
        }
        Ok(self.m(&self.k_pow(a.x.degree, a.c.to_integer()), &a.x))
    }

    /// Text form: `xi^(c H) E^i F^j K^k * (re+im i)` terms joined by ` + `.
    pub fn format_element(&self, c: Rational, x: &Element) -> String {
        let mut s = String::new();
        for (p, v) in x.coeffs.iter().enumerate() {
            if v.norm() <= self.cfg.tolerance {
                continue;
            }
            let (i, j, k) = self.unindex(p);
            if !s.is_empty() {
                s.push_str(" + ");
            }
            let _ = write!(
                s,
                "xi^({} H) E^{i} F^{j} K^{k} * ({}{:+}i)",
                format_rational(c),
                format_sig(v.re),
                v.im
            );
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}
