//! Power elements `xi^(q + l)` in Cartan variables and the lattice Fourier transform
//! that turns a quadratic power element into a Laurent polynomial in `K`.

use crate::error::{Error, Result};
use crate::scalars::{frac, RootOfUnityConfig, Rational, C64};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

/// Integer quadratic form plus rational linear form plus a constant.
///
/// `quad[a][a]` is the coefficient of `H_a^2`; for `a != b`, `quad[a][b] = quad[b][a]`
/// is the coefficient of the monomial `H_a H_b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentPoly {
    pub quad: Vec<Vec<i64>>,
    pub lin: Vec<Rational>,
    pub const_term: Rational,
}

impl ExponentPoly {
    pub fn zero(n: usize) -> Self {
        Self {
            quad: vec![vec![0; n]; n],
            lin: vec![Rational::zero(); n],
            const_term: Rational::zero(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.lin.len()
    }

    /// `c * H_a * H_b` (or `c * H_a^2` when `a == b`).
    pub fn monomial(n: usize, a: usize, b: usize, c: i64) -> Self {
        let mut p = Self::zero(n);
        p.add_monomial(a, b, c);
        p
    }

    pub fn linear(lin: Vec<Rational>) -> Self {
        let n = lin.len();
        Self { quad: vec![vec![0; n]; n], lin, const_term: Rational::zero() }
    }

    pub fn add_monomial(&mut self, a: usize, b: usize, c: i64) {
        self.quad[a][b] += c;
        if a != b {
            self.quad[b][a] += c;
        }
    }

    pub fn is_quadratic_free(&self) -> bool {
        self.quad.iter().all(|r| r.iter().all(|&c| c == 0))
    }

    pub fn is_zero(&self) -> bool {
        self.is_quadratic_free() && self.lin.iter().all(|c| c.is_zero()) && self.const_term.is_zero()
    }

    pub fn linear_part(&self) -> Self {
        Self::linear(self.lin.clone())
    }

    pub fn quadratic_part(&self) -> Self {
        let mut p = Self::zero(self.num_vars());
        p.quad = self.quad.clone();
        p
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.num_vars(), other.num_vars());
        let n = self.num_vars();
        let mut out = self.clone();
        for a in 0..n {
            for b in 0..n {
                out.quad[a][b] += other.quad[a][b];
            }
            out.lin[a] += other.lin[a];
        }
        out.const_term += other.const_term;
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        out.quad.iter_mut().flatten().for_each(|c| *c = -*c);
        out.lin.iter_mut().for_each(|c| *c = -*c);
        out.const_term = -out.const_term;
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Value at a rational point.
    pub fn evaluate(&self, at: &[Rational]) -> Rational {
        let n = self.num_vars();
        let mut v = self.const_term;
        for a in 0..n {
            v += self.lin[a] * at[a];
            v += Rational::from_integer(self.quad[a][a]) * at[a] * at[a];
            for b in (a + 1)..n {
                v += Rational::from_integer(self.quad[a][b]) * at[a] * at[b];
            }
        }
        v
    }

    /// Value of the quadratic part only.
    pub fn quad_value(&self, at: &[Rational]) -> Rational {
        self.quadratic_part().evaluate(at)
    }

    /// Coefficients of the linear form `h -> q(x + h) - q(x) - q(h)`.
    pub fn polarization_coeffs(&self, x: &[Rational]) -> Vec<Rational> {
        let n = self.num_vars();
        (0..n)
            .map(|b| {
                (0..n)
                    .map(|a| {
                        let c = Rational::from_integer(self.quad[a][b]);
                        if a == b {
                            c * x[a] * 2
                        } else {
                            c * x[a]
                        }
                    })
                    .sum()
            })
            .collect()
    }
}

impl fmt::Display for ExponentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let n = self.num_vars();
        for a in 0..n {
            for b in a..n {
                let c = self.quad[a][b];
                if c != 0 {
                    if a == b {
                        parts.push(format!("{c}*H{}^2", a + 1));
                    } else {
                        parts.push(format!("{c}*H{}H{}", a + 1, b + 1));
                    }
                }
            }
        }
        for a in 0..n {
            if !self.lin[a].is_zero() {
                parts.push(format!("{}*H{}", crate::scalars::format_rational(self.lin[a]), a + 1));
            }
        }
        if !self.const_term.is_zero() || parts.is_empty() {
            parts.push(crate::scalars::format_rational(self.const_term));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// `base + Z^n`, with `base` reduced into `[0,1)^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub base: Vec<Rational>,
}

impl Lattice {
    pub fn new(base: Vec<Rational>) -> Self {
        Self { base: base.into_iter().map(frac).collect() }
    }

    pub fn num_vars(&self) -> usize {
        self.base.len()
    }

    /// The point `base + k`.
    pub fn point(&self, k: &[i64]) -> Vec<Rational> {
        self.base.iter().zip(k).map(|(b, &ki)| *b + Rational::from_integer(ki)).collect()
    }
}

/// Dense table of Fourier coefficients `a_k`, `k in [0, ell)^m`, each a vector of
/// length `width`. `k_0` is the most significant digit of the flat index.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierExpansion {
    pub ell: usize,
    pub m: usize,
    pub width: usize,
    pub coeffs: Vec<C64>,
    /// Largest pointwise reconstruction error found while building the table.
    pub residual: f64,
}

impl FourierExpansion {
    pub fn num_modes(&self) -> usize {
        self.ell.pow(self.m as u32)
    }

    pub fn mode(&self, flat: usize) -> Vec<i64> {
        digits(flat, self.ell, self.m)
    }

    pub fn coeff(&self, flat: usize) -> &[C64] {
        &self.coeffs[flat * self.width..(flat + 1) * self.width]
    }

    /// `sum_k a_k xi^(k . z)`.
    pub fn evaluate(&self, cfg: &RootOfUnityConfig, z: &[Rational]) -> Vec<C64> {
        let mut out = vec![C64::zero(); self.width];
        for flat in 0..self.num_modes() {
            let k = self.mode(flat);
            let e: Rational = k.iter().zip(z).map(|(&ki, zi)| *zi * ki).sum();
            let ph = cfg.xi_pow(e);
            for (o, c) in out.iter_mut().zip(self.coeff(flat)) {
                *o += ph * c;
            }
        }
        out
    }
}

fn digits(mut flat: usize, base: usize, m: usize) -> Vec<i64> {
    let mut d = vec![0i64; m];
    for i in (0..m).rev() {
        d[i] = (flat % base) as i64;
        flat /= base;
    }
    d
}

static MAX_RESIDUAL_BITS: AtomicU64 = AtomicU64::new(0);

/// Largest reconstruction residual seen by any [`dft`] call in this process.
pub fn max_dft_residual() -> f64 {
    f64::from_bits(MAX_RESIDUAL_BITS.load(Ordering::Relaxed))
}

static CALLS: AtomicU64 = AtomicU64::new(0);

/// Number of [`dft`] reconstructions performed in this process.
pub fn dft_calls() -> u64 {
    CALLS.load(Ordering::Relaxed)
}

fn record_residual(r: f64) {
    CALLS.fetch_add(1, Ordering::Relaxed);
    MAX_RESIDUAL_BITS.fetch_max(r.to_bits(), Ordering::Relaxed);
}

/// Fourier coefficients `a_k = ell^-m sum_beta xi^(-k . beta) f(beta)` over the `ell^m`
/// representatives `beta = base + j`, `j in [0, ell)^m`.
///
/// Periodicity of `f` under `beta -> beta + ell e_i` and pointwise reconstruction are both
/// checked on every representative.
pub fn dft<F>(cfg: &RootOfUnityConfig, f: F, lattice: &Lattice) -> Result<FourierExpansion>
where
    F: Fn(&[Rational]) -> Vec<C64>,
{
    let ell = cfg.ell as usize;
    let m = lattice.num_vars();
    let n = ell.pow(m as u32);
    let samples: Vec<(Vec<Rational>, Vec<C64>)> = (0..n)
        .map(|flat| {
            let p = lattice.point(&digits(flat, ell, m));
            let v = f(&p);
            (p, v)
        })
        .collect();
    let width = samples.first().map(|s| s.1.len()).unwrap_or(0);
    let scale = samples
        .iter()
        .flat_map(|s| s.1.iter())
        .map(|c| c.norm())
        .fold(1.0, f64::max);

    let mut period_res: f64 = 0.0;
    for (p, v) in &samples {
        for i in 0..m {
            let mut q = p.clone();
            q[i] += Rational::from_integer(ell as i64);
            let w = f(&q);
            for (a, b) in v.iter().zip(&w) {
                period_res = period_res.max((a - b).norm());
            }
        }
    }
    if period_res > cfg.tolerance * scale {
        return Err(Error::PeriodicityViolation { residual: period_res });
    }

    let inv = 1.0 / n as f64;
    let mut coeffs = vec![C64::zero(); n * width];
    for flat in 0..n {
        let k = digits(flat, ell, m);
        for (p, v) in &samples {
            let e: Rational = k.iter().zip(p).map(|(&ki, pi)| *pi * ki).sum();
            let ph = cfg.xi_pow(-e) * inv;
            for (c, x) in coeffs[flat * width..(flat + 1) * width].iter_mut().zip(v) {
                *c += ph * x;
            }
        }
    }
    let mut fe = FourierExpansion { ell, m, width, coeffs, residual: 0.0 };
    let mut res: f64 = 0.0;
    for (p, v) in &samples {
        let r = fe.evaluate(cfg, p);
        for (a, b) in r.iter().zip(v) {
            res = res.max((a - b).norm());
        }
    }
    fe.residual = res;
    record_residual(res);
    if res > cfg.tolerance * scale {
        return Err(Error::PeriodicityViolation { residual: res });
    }
    Ok(fe)
}

/// Linear form `h -> q~(at, h)`.
pub fn polarize(q: &ExponentPoly, at: &[Rational]) -> ExponentPoly {
    ExponentPoly::linear(q.polarization_coeffs(at))
}

/// Splits `xi^q` on the lattice as `xi^l * sum_k a_k xi^(k . Z)`.
///
/// `l` is the polarization at the base representative minus the constant `q(base)`,
/// so that `xi^(q - l)` is `ell`-periodic. The Fourier table is a scalar (width 1).
pub fn reduce_quadratic(
    cfg: &RootOfUnityConfig,
    q: &ExponentPoly,
    lattice: &Lattice,
) -> Result<(ExponentPoly, FourierExpansion)> {
    let qq = q.quadratic_part();
    let mut l = polarize(&qq, &lattice.base);
    l.const_term = -qq.evaluate(&lattice.base);
    let rest = q.sub(&qq);
    let l_full = l.add(&rest);
    let f = |z: &[Rational]| vec![cfg.xi_pow(qq.evaluate(z) - l.evaluate(z))];
    let fe = dft(cfg, f, lattice)?;
    Ok((l_full, fe))
}

/// Moving `xi^P(H)` to the right of an element of weight `w`: `xi^P x = phase * x xi^P K^induced`,
/// where `phase = xi^(l(w) + q(w))` and `induced = q~(w, .)`.
pub fn commute_past(p: &ExponentPoly, weight: &[i64]) -> (Rational, Vec<i64>) {
    let w: Vec<Rational> = weight.iter().map(|&x| Rational::from_integer(x)).collect();
    let lin: Rational = p.lin.iter().zip(&w).map(|(a, b)| *a * b).sum();
    let quadv = p.quad_value(&w);
    let induced = p
        .polarization_coeffs(&w)
        .into_iter()
        .map(|c| {
            debug_assert!(c.is_integer());
            c.to_integer()
        })
        .collect();
    (lin + quadv, induced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{rat, rat_int};
    use proptest::prelude::*;

    fn cfg(ell: u32) -> RootOfUnityConfig {
        RootOfUnityConfig::new(ell).unwrap()
    }

    #[test]
    fn polarize_examples() {
        let q = ExponentPoly::monomial(2, 0, 1, 1);
        let (a, b) = (rat(1, 3), rat(2, 7));
        let l = polarize(&q, &[a, b]);
        assert_eq!(l.lin, vec![b, a]);
        assert!(polarize(&ExponentPoly::zero(2), &[a, b]).is_zero());
        let q2 = ExponentPoly::monomial(1, 0, 0, 2);
        assert_eq!(polarize(&q2, &[a]).lin, vec![a * 4]);
    }

    #[test]
    fn polarization_of_diagonal_is_twice_value() {
        let mut q = ExponentPoly::monomial(3, 0, 1, 2);
        q.add_monomial(2, 2, -1);
        q.add_monomial(0, 2, 3);
        let x = [rat(1, 2), rat(-3, 5), rat(4, 3)];
        let p = polarize(&q, &x).evaluate(&x);
        assert_eq!(p, q.evaluate(&x) * 2);
    }

    #[test]
    fn dft_constant_and_pure_mode() {
        let c = cfg(5);
        let lat = Lattice::new(vec![rat(1, 3)]);
        let fc = dft(&c, |_| vec![C64::new(2.0, -1.0)], &lat).unwrap();
        assert!((fc.coeff(0)[0] - C64::new(2.0, -1.0)).norm() < 1e-12);
        for k in 1..5 {
            assert!(fc.coeff(k)[0].norm() < 1e-12);
        }
        let fm = dft(&c, |z| vec![c.xi_pow(z[0] * 3)], &lat).unwrap();
        for k in 0..5 {
            let want = if k == 3 { 1.0 } else { 0.0 };
            assert!((fm.coeff(k)[0] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn dft_rejects_non_periodic() {
        let c = cfg(5);
        let lat = Lattice::new(vec![rat(1, 3)]);
        let r = dft(&c, |z| vec![c.xi_pow(z[0] * z[0])], &lat);
        assert!(matches!(r, Err(Error::PeriodicityViolation { .. })));
    }

    #[test]
    fn quadratic_reduction_two_vars() {
        let c = cfg(5);
        let q = ExponentPoly::monomial(2, 0, 1, 2);
        let (a, b) = (rat(2, 7), rat(3, 11));
        let lat = Lattice::new(vec![a, b]);
        let (l, fe) = reduce_quadratic(&c, &q, &lat).unwrap();
        assert_eq!(l.lin, vec![b * 2, a * 2]);
        assert_eq!(l.const_term, -(a * b * 2));
        assert!(fe.residual < 1e-10);
        // the table equals the direct double sum
        for flat in 0..25 {
            let k = fe.mode(flat);
            let mut s = C64::zero();
            for j1 in 0..5 {
                for j2 in 0..5 {
                    let z1 = a + j1;
                    let z2 = b + j2;
                    s += c.xi_pow(-(z1 * k[0] + z2 * k[1])) * c.xi_pow_int(2 * j1 * j2);
                }
            }
            assert!((fe.coeff(flat)[0] - s / 25.0).norm() < 1e-12);
        }
    }

    #[test]
    fn quadratic_reduction_at_zero_is_h0_table() {
        let c = cfg(3);
        let q = ExponentPoly::monomial(2, 0, 1, 2);
        let (l, fe) = reduce_quadratic(&c, &q, &Lattice::new(vec![rat_int(0), rat_int(0)])).unwrap();
        assert!(l.is_zero());
        for flat in 0..9 {
            let k = fe.mode(flat);
            let mut s = C64::zero();
            for j1 in 0..3 {
                for j2 in 0..3 {
                    s += c.xi_pow_int(2 * j1 * j2 - k[0] * j1 - k[1] * j2);
                }
            }
            assert!((fe.coeff(flat)[0] - s / 9.0).norm() < 1e-12);
        }
    }

    #[test]
    fn quadratic_reduction_antidiagonal() {
        // on (-a, a) the linear part is 2a(h1 - h2) up to an integral form
        let c = cfg(5);
        let a = rat(2, 9);
        let q = ExponentPoly::monomial(2, 0, 1, 2);
        let (l, fe) = reduce_quadratic(&c, &q, &Lattice::new(vec![-a, a])).unwrap();
        assert_eq!(l.lin[0], a * 2);
        assert!((l.lin[1] + a * 2).is_integer());
        assert!(fe.residual < 1e-10);
    }

    #[test]
    fn commute_past_examples() {
        let a = rat(1, 5);
        let l = ExponentPoly::linear(vec![a]);
        assert_eq!(commute_past(&l, &[2]), (a * 2, vec![0]));
        let q = ExponentPoly::monomial(1, 0, 0, 2);
        assert_eq!(commute_past(&q, &[1]), (rat_int(2), vec![4]));
        assert_eq!(commute_past(&q.add(&l), &[0]), (rat_int(0), vec![0]));
    }

    fn small_rat() -> impl Strategy<Value = Rational> {
        (-40i64..40, 1i64..13).prop_map(|(n, d)| Rational::new(n, d))
    }

    proptest! {
        #[test]
        fn polarization_is_bilinear(
            c01 in -3i64..4, c00 in -3i64..4, c11 in -3i64..4,
            a in proptest::collection::vec(small_rat(), 2),
            b in proptest::collection::vec(small_rat(), 2),
        ) {
            let mut q = ExponentPoly::monomial(2, 0, 1, c01);
            q.add_monomial(0, 0, c00);
            q.add_monomial(1, 1, c11);
            let ab: Vec<Rational> = a.iter().zip(&b).map(|(x, y)| *x + *y).collect();
            prop_assert_eq!(polarize(&q, &ab), polarize(&q, &a).add(&polarize(&q, &b)));
        }

        #[test]
        fn dft_reconstructs_periodic_functions(
            ell in prop::sample::select(vec![3u32, 4, 5, 6]),
            seed_coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 36),
            base in proptest::collection::vec(small_rat(), 2),
        ) {
            let c = cfg(ell);
            let lat = Lattice::new(base);
            let e = ell as i64;
            let f = |z: &[Rational]| {
                let j0 = (z[0] - lat.base[0]).to_integer().rem_euclid(e) as usize;
                let j1 = (z[1] - lat.base[1]).to_integer().rem_euclid(e) as usize;
                let (re, im) = seed_coeffs[j0 * 6 + j1];
                vec![C64::new(re, im)]
            };
            let fe = dft(&c, f, &lat).unwrap();
            prop_assert!(fe.residual < 1e-10);
        }

        #[test]
        fn reduce_quadratic_is_stable_under_base_shift(
            base in proptest::collection::vec(small_rat(), 2),
            shift in 0usize..2,
            c01 in -2i64..3, c00 in -2i64..3,
        ) {
            let c = cfg(5);
            let mut q = ExponentPoly::monomial(2, 0, 1, c01);
            q.add_monomial(0, 0, c00);
            let lat = Lattice::new(base.clone());
            let (l1, f1) = reduce_quadratic(&c, &q, &lat).unwrap();
            // same class, unreduced representative shifted by e_shift
            let mut shifted = lat.base.clone();
            shifted[shift] += 1;
            let mut l2 = polarize(&q, &shifted);
            l2.const_term = -q.evaluate(&shifted);
            let diff = l2.sub(&l1);
            prop_assert!(diff.lin.iter().all(|x| x.is_integer()));
            for j0 in 0..5i64 {
                for j1 in 0..5i64 {
                    let z = lat.point(&[j0, j1]);
                    let v1 = c.xi_pow(l1.evaluate(&z)) * f1.evaluate(&c, &z)[0];
                    let f2 = c.xi_pow(q.evaluate(&z) - l2.evaluate(&z));
                    let v2 = c.xi_pow(l2.evaluate(&z)) * f2;
                    prop_assert!((v1 - v2).norm() < 1e-9);
                    prop_assert!((v1 - c.xi_pow(q.evaluate(&z))).norm() < 1e-9);
                }
            }
        }
    }
}
