//! Integrals on `U_a`: the symmetrized integral `mu`, the right integral `lambda`, the
//! cointegral, the distinguished grouplike, modified dimensions, the m-trace and the
//! modified integral `mu'`.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::modules_catalog::{simple_decomposition, SimpleDecomposition, WeightModule};
use crate::qalgebra::{q_factorial, Element, LElement, Tensor, UqAlgebra};
use crate::scalars::{frac, Rational, C64};
use num_traits::{One, Zero};

/// `mu_a(E^i F^j K^k) = eta [i = j = l' - 1, k = 0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GIntegral {
    pub eta: C64,
}

/// `-(-1)^l xi / l' (xi - xi^-1)^(2(l' - 1))`.
pub fn normalization_c(alg: &UqAlgebra) -> C64 {
    let cfg = &alg.cfg;
    let sign = if alg.ell.is_multiple_of(2) { -1.0 } else { 1.0 };
    cfg.xi() * sign / alg.ellp as f64 * cfg.xi_diff().powi(2 * (alg.ellp as i32 - 1))
}

/// The same constant read off the quasi R-matrix, `(xi - xi^-1)^(l'-1) / [l'-1; xi^-2]!`.
pub fn normalization_c_from_r(alg: &UqAlgebra) -> C64 {
    let cfg = &alg.cfg;
    let j = alg.ellp - 1;
    cfg.xi_diff().powi(j as i32) / q_factorial(j, cfg.xi_pow_int(-2))
}

impl GIntegral {
    pub fn new(alg: &UqAlgebra) -> Result<Self> {
        let g = alg.cfg.gauss_sum()?;
        let c = normalization_c(alg);
        Ok(Self { eta: alg.cfg.xi() * alg.ell as f64 / (c * g) })
    }

    /// The closed-form `eta` rescaled by `t` with `t^2 = 1 / (delta delta-bar)`, the sign of
    /// `t` chosen to keep `delta` nearest `xi^-1`.
    pub fn hennings(alg: &UqAlgebra) -> Result<Self> {
        let base = Self::new(alg)?;
        let (d, db) = base.deltas(alg)?;
        let p = d * db;
        if p.norm() < 1e-12 {
            return Err(Error::DegenerateRoot { modulus: p.norm() });
        }
        let t = p.inv().sqrt();
        let target = alg.cfg.xi().inv();
        let t = if (t * d - target).norm() <= (-t * d - target).norm() { t } else { -t };
        Ok(Self { eta: base.eta * t })
    }

    pub fn top_index(alg: &UqAlgebra) -> usize {
        alg.index(alg.ellp - 1, alg.ellp - 1, 0)
    }

    /// `mu` as a row vector on the basis.
    pub fn mu_vector(&self, alg: &UqAlgebra) -> Vec<C64> {
        let mut v = vec![C64::zero(); alg.dim];
        v[Self::top_index(alg)] = self.eta;
        v
    }

    pub fn mu(&self, alg: &UqAlgebra, x: &Element) -> C64 {
        x.coeffs[Self::top_index(alg)] * self.eta
    }

    /// `mu` on `xi^(c H) x`; a non-integral `c` is an error.
    pub fn mu_l(&self, alg: &UqAlgebra, x: &LElement) -> Result<C64> {
        Ok(self.mu(alg, &alg.lower(x)?))
    }

    /// `mu(E^(l'-1) F^(l'-1) phi(H)) = (eta / l) sum_k phi(a + k)`.
    pub fn mu_fourier(&self, alg: &UqAlgebra, degree: Rational, phi: &dyn Fn(Rational) -> C64) -> C64 {
        let d = frac(degree);
        let s: C64 = (0..alg.ell as i64).map(|k| phi(d + k)).sum();
        s * self.eta / alg.ell as f64
    }

    /// `lambda_a(x) = mu_a(g^-1 x)`.
    pub fn lambda(&self, alg: &UqAlgebra, x: &Element) -> C64 {
        self.mu(alg, &alg.m(&alg.pivot_inv(x.degree), x))
    }

    /// `lambda` as a row vector on the basis.
    pub fn lambda_vector(&self, alg: &UqAlgebra, degree: Rational) -> Vec<C64> {
        let mu = self.mu_vector(alg);
        let l = alg.left_matrix(&alg.pivot_inv(degree));
        (0..alg.dim).map(|p| (0..alg.dim).map(|r| mu[r] * l[(r, p)]).sum()).collect()
    }

    /// `delta = lambda_0(theta_0)` and `delta-bar = lambda_0(theta_0^-1)`.
    pub fn deltas(&self, alg: &UqAlgebra) -> Result<(C64, C64)> {
        let (t, ti) = alg.twist_zero()?;
        Ok((self.lambda(alg, &t), self.lambda(alg, &ti)))
    }

    /// `gamma_a = g_a^2`.
    pub fn distinguished_grouplike(&self, alg: &UqAlgebra, degree: Rational) -> Element {
        alg.pivot_power(degree, 2)
    }
}

/// Two-sided cointegral of `U_0` from the kernel of `L_x - eps(x)`, `R_x - eps(x)` over
/// generators, normalized by `lambda(Upsilon) = 1`.
pub fn cointegral_solve(alg: &UqAlgebra, gi: &GIntegral) -> Result<Element> {
    let z = Rational::zero();
    let gens = [alg.gen_e(z), alg.gen_f(z), alg.k_pow(z, 1)];
    let n = alg.dim;
    let mut stacked = linalg::zeros(6 * n, n);
    for (g_i, g) in gens.iter().enumerate() {
        let e = alg.counit(g)?;
        let id = CMat::identity(n, n) * e;
        let l = alg.left_matrix(g) - &id;
        let r = alg.right_matrix(g) - &id;
        stacked.view_mut((2 * g_i * n, 0), (n, n)).copy_from(&l);
        stacked.view_mut(((2 * g_i + 1) * n, 0), (n, n)).copy_from(&r);
    }
    let ns = linalg::nullspace(&stacked, 1e-8);
    if ns.len() != 1 {
        return Err(Error::NotUnimodular { dim: ns.len() });
    }
    let u = alg.from_vec(z, &ns[0]);
    let s = gi.lambda(alg, &u);
    if s.norm() < alg.cfg.tolerance {
        return Err(Error::PropertyViolation { property: "lambda(cointegral) != 0".into(), residual: s.norm() });
    }
    Ok(u.scale(s.inv()))
}

/// Right integral on `U_0` as the kernel of `x -> (lambda (x) id) Delta(x) - lambda(x) 1`,
/// normalized on the cointegral.
pub fn right_integral_solve(alg: &UqAlgebra, upsilon: &Element) -> Result<Vec<C64>> {
    let z = Rational::zero();
    let n = alg.dim;
    let basis = alg.coproduct_basis(z, z);
    // unknown lambda_q; equation for each (p, r): sum_q lambda_q Delta(e_p)[q, r] - lambda_p [r = 0] = 0
    let mut m = linalg::zeros(n * n, n);
    for p in 0..n {
        for (key, c) in &basis[p].terms {
            let qr = crate::qalgebra::unpack(*key, 2);
            m[(p * n + qr[1], qr[0])] += c;
        }
        m[(p * n, p)] -= C64::one();
    }
    let ns = linalg::nullspace(&m, 1e-8);
    if ns.len() != 1 {
        return Err(Error::NotUnimodular { dim: ns.len() });
    }
    let v = &ns[0];
    let s: C64 = v.iter().zip(&upsilon.coeffs).map(|(a, b)| a * b).sum();
    Ok(v.iter().map(|x| x / s).collect())
}

/// Residual of `(lambda_a (x) id) Delta_{a,b}(x) = lambda_{a+b}(x) 1` on the basis.
pub fn right_integral_residual(alg: &UqAlgebra, gi: &GIntegral, a: Rational, b: Rational) -> f64 {
    let la = gi.lambda_vector(alg, a);
    let top = frac(a + b);
    let lt = gi.lambda_vector(alg, top);
    let mut worst: f64 = 0.0;
    for p in 0..alg.dim {
        let d = alg.coproduct(&alg.basis(top, p), (a, b)).unwrap();
        let l = d.contract_factor(0, &la).to_element(alg);
        worst = worst.max(l.max_diff(&alg.one(b).scale(lt[p])));
    }
    worst
}

/// Residual of the left integral property of `x -> lambda(gamma x)`:
/// `(id (x) lambda^L_b) Delta_{a,b}(x) = lambda^L_{a+b}(x) 1`.
pub fn left_integral_residual(alg: &UqAlgebra, gi: &GIntegral, a: Rational, b: Rational) -> f64 {
    let left = |d: Rational| -> Vec<C64> {
        let lv = gi.lambda_vector(alg, d);
        let gm = alg.left_matrix(&gi.distinguished_grouplike(alg, d));
        (0..alg.dim).map(|p| (0..alg.dim).map(|r| lv[r] * gm[(r, p)]).sum()).collect()
    };
    let lb = left(b);
    let top = frac(a + b);
    let lt = left(top);
    let mut worst: f64 = 0.0;
    for p in 0..alg.dim {
        let d = alg.coproduct(&alg.basis(top, p), (a, b)).unwrap();
        let l = d.contract_factor(1, &lb).to_element(alg);
        worst = worst.max(l.max_diff(&alg.one(a).scale(lt[p])));
    }
    worst
}

/// Per-degree data for the modified trace and modified integral.
#[derive(Debug, Clone)]
pub struct ModifiedIntegralData {
    pub degree: Rational,
    pub decomposition: SimpleDecomposition,
    pub idempotents: Vec<Element>,
    pub block_dims: Vec<usize>,
    pub modified_dims: Vec<C64>,
    pub z_alpha: Element,
    /// Residual of the least-squares solve for the modified dimensions.
    pub solve_residual: f64,
}

/// `d_i` with `mu_a = sum_i d_i tr rho_i`, by least squares over the basis.
pub fn modified_dimensions(alg: &UqAlgebra, gi: &GIntegral, dec: &SimpleDecomposition) -> Result<(Vec<C64>, f64)> {
    let n = dec.modules.len();
    let mut a = linalg::zeros(alg.dim, n);
    let mut b = CVec::zeros(alg.dim);
    for p in 0..alg.dim {
        let x = alg.basis(dec.degree, p);
        for (i, m) in dec.modules.iter().enumerate() {
            a[(p, i)] = linalg::trace(&m.rho(alg, &x)?);
        }
        b[p] = gi.mu(alg, &x);
    }
    let cond = linalg::condition_number(&a);
    if cond > 1e8 {
        return Err(Error::IllConditioned { cond });
    }
    let (x, r) = linalg::least_squares(&a, &b, 1e-12)?;
    if r > alg.cfg.tolerance * gi.eta.norm().max(1.0) {
        return Err(Error::IllConditioned { cond });
    }
    Ok((x.iter().copied().collect(), r))
}

impl ModifiedIntegralData {
    pub fn compute(alg: &UqAlgebra, gi: &GIntegral, degree: Rational) -> Result<Self> {
        let dec = simple_decomposition(alg, degree)?;
        let dims = dec.block_dims();
        let idempotents: Vec<Element> = (0..dims.len())
            .map(|i| {
                let blocks: Vec<CMat> = dims
                    .iter()
                    .enumerate()
                    .map(|(j, &n)| if i == j { CMat::identity(n, n) } else { linalg::zeros(n, n) })
                    .collect();
                dec.preimage(alg, &blocks)
            })
            .collect();
        let (modified_dims, solve_residual) = modified_dimensions(alg, gi, &dec)?;
        let mut z_alpha = alg.zero(degree);
        for ((z, d), n) in idempotents.iter().zip(&modified_dims).zip(&dims) {
            z_alpha = z_alpha.add(&z.scale(d / *n as f64));
        }
        Ok(Self { degree: frac(degree), decomposition: dec, idempotents, block_dims: dims, modified_dims, z_alpha, solve_residual })
    }

    /// `mu'(z) = mu(z_a z)` without the centrality check.
    pub fn mu_prime_raw(&self, alg: &UqAlgebra, gi: &GIntegral, z: &Element) -> C64 {
        gi.mu(alg, &alg.m(&self.z_alpha, z))
    }

    /// `mu'` as a row vector on the basis.
    pub fn mu_prime_vector(&self, alg: &UqAlgebra, gi: &GIntegral) -> Vec<C64> {
        let mu = gi.mu_vector(alg);
        let l = alg.left_matrix(&self.z_alpha);
        (0..alg.dim).map(|p| (0..alg.dim).map(|r| mu[r] * l[(r, p)]).sum()).collect()
    }

    /// m-trace `t_V(f) = tr(f rho_V(z_a))`; `V` must live in this degree.
    pub fn m_trace(&self, alg: &UqAlgebra, f: &CMat, v: &WeightModule) -> Result<C64> {
        if v.degree != self.degree {
            return Err(Error::NotProjective(v.name.clone()));
        }
        let r = v.intertwiner_residual(f);
        if r > alg.cfg.tolerance * linalg::max_abs(f).max(1.0) * 1e3 {
            return Err(Error::NotIntertwiner { residual: r });
        }
        Ok(linalg::trace(&(f * v.rho(alg, &self.z_alpha)?)))
    }

    /// Modified dimension of a simple module of this degree, found by matching blocks.
    pub fn modified_dim_of(&self, alg: &UqAlgebra, v: &WeightModule) -> Result<C64> {
        if v.degree != self.degree {
            return Err(Error::NotProjective(v.name.clone()));
        }
        for (i, z) in self.idempotents.iter().enumerate() {
            let p = v.rho(alg, z)?;
            if (linalg::trace(&p) - v.dim() as f64).norm() < 1e-6 {
                if v.dim() != self.block_dims[i] {
                    return Err(Error::NotProjective(format!("{} is not simple", v.name)));
                }
                return Ok(self.modified_dims[i]);
            }
        }
        Err(Error::NotProjective(format!("{} is not simple", v.name)))
    }
}

/// `mu'_a(z) = mu_a(z_a z)` for central `z`.
pub fn modified_integral(alg: &UqAlgebra, gi: &GIntegral, data: &ModifiedIntegralData, z: &Element) -> Result<C64> {
    let r = alg.centrality_residual(z);
    if r > alg.cfg.tolerance * z.norm_inf().max(1.0) * 1e2 {
        return Err(Error::NotCentral { residual: r });
    }
    Ok(data.mu_prime_raw(alg, gi, z))
}

/// Basis of the centralizer of `Delta_{a,b}(U_{a+b})` in `U_a (x) U_b`.
pub fn bipartite_center(alg: &UqAlgebra, a: Rational, b: Rational) -> Result<Vec<Tensor>> {
    let (a, b) = (frac(a), frac(b));
    let top = frac(a + b);
    let n2 = alg.dim * alg.dim;
    let gens = [alg.gen_e(top), alg.gen_f(top), alg.k_pow(top, 1)];
    let mut stacked = linalg::zeros(3 * n2, n2);
    for (gi, g) in gens.iter().enumerate() {
        let dg = alg.coproduct(g, (a, b))?;
        for col in 0..n2 {
            let mut e = Tensor::zero(&[a, b]);
            e.add_term(&[col / alg.dim, col % alg.dim], C64::one());
            let c = dg.mul(alg, &e)?.sub(&e.mul(alg, &dg)?);
            for (key, v) in &c.terms {
                let i = crate::qalgebra::unpack(*key, 2);
                stacked[(gi * n2 + i[0] * alg.dim + i[1], col)] = *v;
            }
        }
    }
    let ns = linalg::nullspace(&stacked, 1e-8);
    Ok(ns.iter().map(|v| Tensor::from_dense2(alg, &[a, b], v).pruned(1e-13)).collect())
}

/// The two sides of `(mu_a L_{g^-1} (x) mu'_b)(x) = (mu'_a (x) mu_b L_g)(x)`.
pub fn bipartite_sides(
    alg: &UqAlgebra,
    gi: &GIntegral,
    da: &ModifiedIntegralData,
    db: &ModifiedIntegralData,
    x: &Tensor,
) -> (C64, C64) {
    let (a, b) = (x.degrees[0], x.degrees[1]);
    let left_a = {
        let mu = gi.mu_vector(alg);
        let l = alg.left_matrix(&alg.pivot_inv(a));
        (0..alg.dim).map(|p| (0..alg.dim).map(|r| mu[r] * l[(r, p)]).sum()).collect::<Vec<C64>>()
    };
    let right_b = {
        let mu = gi.mu_vector(alg);
        let l = alg.left_matrix(&alg.pivot(b));
        (0..alg.dim).map(|p| (0..alg.dim).map(|r| mu[r] * l[(r, p)]).sum()).collect::<Vec<C64>>()
    };
    let mpa = da.mu_prime_vector(alg, gi);
    let mpb = db.mu_prime_vector(alg, gi);
    let mut l = C64::zero();
    let mut r = C64::zero();
    for (key, c) in &x.terms {
        let i = crate::qalgebra::unpack(*key, 2);
        l += c * left_a[i[0]] * mpb[i[1]];
        r += c * mpa[i[0]] * right_b[i[1]];
    }
    (l, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modules_catalog::{tensor_module, typical_module};
    use crate::scalars::{rat, rat_int};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(ell: u32) -> (UqAlgebra, GIntegral) {
        let alg = UqAlgebra::from_ell(ell).unwrap();
        let gi = GIntegral::new(&alg).unwrap();
        (alg, gi)
    }

    fn rand_el(alg: &UqAlgebra, d: Rational, rng: &mut ChaCha8Rng) -> Element {
        let mut e = alg.zero(d);
        for c in e.coeffs.iter_mut() {
            *c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
        e
    }

    #[test]
    fn normalization_constant_two_ways() {
        for ell in [3u32, 4, 5, 6, 7] {
            let alg = UqAlgebra::from_ell(ell).unwrap();
            let a = normalization_c(&alg);
            let b = normalization_c_from_r(&alg);
            assert!((a - b).norm() < 1e-10, "ell={ell}: {a} vs {b}");
        }
    }

    #[test]
    fn mu_examples() {
        let (alg, gi) = setup(5);
        let d = rat(1, 3);
        assert!(gi.mu(&alg, &alg.one(d)).norm() < 1e-15);
        let top = alg.monomial(d, 4, 4, 0);
        assert!((gi.mu(&alg, &top) - gi.eta).norm() < 1e-15);
        assert!(gi.mu(&alg, &alg.monomial(d, 4, 4, 1)).norm() < 1e-15);
        let frac_el = LElement { c: rat(1, 2), x: top.clone() };
        assert!(matches!(gi.mu_l(&alg, &frac_el), Err(Error::FractionalCartan { .. })));
    }

    #[test]
    fn mu_fourier_matches_coefficient_extraction() {
        let (alg, gi) = setup(5);
        let d = rat(2, 7);
        let coeffs = [C64::new(0.3, 0.1), C64::new(-1.0, 0.5), C64::new(0.2, 0.0), C64::new(0.0, 0.7), C64::new(1.1, -0.4)];
        let mut x = alg.zero(d);
        for (k, c) in coeffs.iter().enumerate() {
            x = x.add(&alg.monomial(d, 4, 4, k as i64).scale(*c));
        }
        let phi = |lam: Rational| -> C64 {
            coeffs.iter().enumerate().map(|(k, c)| c * alg.cfg.xi_pow(lam * k as i64)).sum()
        };
        assert!((gi.mu_fourier(&alg, d, &phi) - gi.mu(&alg, &x)).norm() < 1e-12);
    }

    #[test]
    fn delta_normalization() {
        for ell in [3u32, 5] {
            let (alg, gi) = setup(ell);
            let (d, db) = gi.deltas(&alg).unwrap();
            assert!((d - alg.cfg.xi().inv()).norm() < 1e-9, "ell={ell} delta={d}");
            let h = GIntegral::hennings(&alg).unwrap();
            let (hd, hdb) = h.deltas(&alg).unwrap();
            assert!((hd * hdb - 1.0).norm() < 1e-9);
            // the ratio does not depend on the scale of lambda
            assert!((hd / hdb - d / db).norm() < 1e-9);
        }
        assert!(matches!(setup_err(8), Err(Error::DegenerateRoot { .. })));
    }

    #[test]
    fn delta_bar_through_drinfeld_element() {
        // theta^-1 = g^-1 u with u = sum S^2(b) S(a); frozen ratio delta / delta-bar
        let frozen = [(3u32, rat(3, 2)), (5, rat_int(2)), (7, rat(1, 2))];
        for (ell, e) in frozen {
            let (alg, gi) = setup(ell);
            let z = rat_int(0);
            let r = alg.r_matrix(z, z).unwrap();
            let mut u = alg.zero(z);
            for (a, b) in &r.terms {
                u = u.add(&alg.m(&alg.antipode(&alg.antipode(b)), &alg.antipode(a)));
            }
            let (_, ti) = alg.twist_zero().unwrap();
            assert!(ti.max_diff(&alg.m(&alg.pivot_inv(z), &u)) < 1e-9);
            let (d, db) = gi.deltas(&alg).unwrap();
            assert!((d / db - alg.cfg.xi_pow(e)).norm() < 1e-9, "ell={ell}");
        }
    }

    fn setup_err(ell: u32) -> Result<UqAlgebra> {
        UqAlgebra::from_ell(ell)
    }

    #[test]
    fn cointegral_and_uniqueness() {
        for ell in [3u32, 5] {
            let (alg, gi) = setup(ell);
            let u = cointegral_solve(&alg, &gi).unwrap();
            assert!((gi.lambda(&alg, &u) - 1.0).norm() < 1e-9);
            for p in 0..alg.dim {
                if alg.weight(p) != 0 {
                    assert!(u.coeffs[p].norm() < 1e-9);
                }
            }
            let lam = right_integral_solve(&alg, &u).unwrap();
            let ours = gi.lambda_vector(&alg, rat_int(0));
            for (a, b) in lam.iter().zip(&ours) {
                assert!((a - b).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn integral_identities() {
        let (alg, gi) = setup(3);
        for (a, b) in [(rat_int(0), rat_int(0)), (rat(1, 3), rat(2, 5)), (rat(3, 4), rat(1, 2))] {
            assert!(right_integral_residual(&alg, &gi, a, b) < 1e-9);
            assert!(left_integral_residual(&alg, &gi, a, b) < 1e-9);
            let g = gi.distinguished_grouplike(&alg, frac(a + b));
            let dg = alg.coproduct(&g, (a, b)).unwrap();
            let want = Tensor::outer(&[&gi.distinguished_grouplike(&alg, a), &gi.distinguished_grouplike(&alg, b)]);
            assert!(dg.max_diff(&want) < 1e-10);
        }
        let g0 = gi.distinguished_grouplike(&alg, rat_int(0));
        assert!(g0.max_diff(&alg.k_pow(rat_int(0), 4 - 4 * alg.ellp as i64)) < 1e-12);
    }

    #[test]
    fn trace_like_properties() {
        let (alg, gi) = setup(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = rat(2, 5);
        for _ in 0..20 {
            let x = rand_el(&alg, d, &mut rng);
            let y = rand_el(&alg, d, &mut rng);
            let s = x.norm_inf() * y.norm_inf();
            assert!((gi.mu(&alg, &alg.m(&x, &y)) - gi.mu(&alg, &alg.m(&y, &x))).norm() < 1e-9 * s.max(1.0));
            assert!((gi.mu(&alg, &alg.antipode(&x)) - gi.mu(&alg, &x)).norm() < 1e-9);
            let l1 = gi.lambda(&alg, &alg.m(&x, &y));
            let l2 = gi.lambda(&alg, &alg.m(&alg.antipode(&alg.antipode(&y)), &x));
            assert!((l1 - l2).norm() < 1e-9 * s.max(1.0));
        }
    }

    #[test]
    fn modified_dimensions_two_ways() {
        let (alg, gi) = setup(3);
        let data = ModifiedIntegralData::compute(&alg, &gi, rat(1, 5)).unwrap();
        assert!(data.solve_residual < 1e-9);
        for (i, z) in data.idempotents.iter().enumerate() {
            let n = data.block_dims[i] as f64;
            assert!((gi.mu(&alg, z) / n - data.modified_dims[i]).norm() < 1e-9);
            let mp = modified_integral(&alg, &gi, &data, z).unwrap();
            assert!((mp - data.modified_dims[i] * data.modified_dims[i]).norm() < 1e-9);
        }
        let sum: Element = data.idempotents.iter().skip(1).fold(data.idempotents[0].clone(), |a, b| a.add(b));
        assert!(sum.max_diff(&alg.one(data.degree)) < 1e-9);
        let z2 = alg.m(&data.z_alpha, &data.z_alpha);
        let tr_reg = linalg::trace(&alg.left_matrix(&z2));
        let mp1 = modified_integral(&alg, &gi, &data, &alg.one(data.degree)).unwrap();
        assert!((tr_reg - mp1).norm() < 1e-9);
        assert!(matches!(
            modified_integral(&alg, &gi, &data, &alg.gen_e(data.degree)),
            Err(Error::NotCentral { .. })
        ));
    }

    #[test]
    fn m_trace_properties() {
        let (alg, gi) = setup(3);
        let a = rat(2, 7);
        let data = ModifiedIntegralData::compute(&alg, &gi, a).unwrap();
        let v = typical_module(&alg.cfg, a + 1).unwrap();
        let id = CMat::identity(3, 3);
        let t = data.m_trace(&alg, &id, &v).unwrap();
        assert!((t - data.modified_dim_of(&alg, &v).unwrap()).norm() < 1e-9);
        assert!(matches!(data.m_trace(&alg, &v.e, &v), Err(Error::NotIntertwiner { .. })));
        let w = typical_module(&alg.cfg, rat(1, 3)).unwrap();
        assert!(matches!(data.m_trace(&alg, &id, &w), Err(Error::NotProjective(_))));
    }

    fn commutant(m: &WeightModule) -> Vec<CMat> {
        let n = m.dim();
        let id = CMat::identity(n, n);
        let mut stacked = linalg::zeros(3 * n * n, n * n);
        for (g, a) in [&m.e, &m.f, &m.k].into_iter().enumerate() {
            // vec(A X - X A) for column-major vec
            let op = linalg::kron(&id, a) - linalg::kron(&a.transpose(), &id);
            stacked.view_mut((g * n * n, 0), (n * n, n * n)).copy_from(&op);
        }
        linalg::nullspace(&stacked, 1e-9)
            .into_iter()
            .map(|v| CMat::from_column_slice(n, n, v.as_slice()))
            .collect()
    }

    #[test]
    fn m_trace_partial_trace_and_cyclicity() {
        let (alg, gi) = setup(3);
        let (a, b) = (rat(1, 5), rat(1, 3));
        let v = typical_module(&alg.cfg, a).unwrap();
        let w = typical_module(&alg.cfg, b).unwrap();
        let vw = tensor_module(&alg.cfg, &v, &w).unwrap();
        let dv = ModifiedIntegralData::compute(&alg, &gi, a).unwrap();
        let dvw = ModifiedIntegralData::compute(&alg, &gi, vw.degree).unwrap();
        let basis = commutant(&vw);
        assert_eq!(basis.len(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut f = linalg::zeros(9, 9);
        let mut g = linalg::zeros(9, 9);
        for x in &basis {
            f += x * C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            g += x * C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
        let tfg = dvw.m_trace(&alg, &(&f * &g), &vw).unwrap();
        let tgf = dvw.m_trace(&alg, &(&g * &f), &vw).unwrap();
        assert!((tfg - tgf).norm() < 1e-9);
        let ptr = crate::modules_catalog::partial_trace_right(&alg.cfg, &f, &v, &w);
        let lhs = dvw.m_trace(&alg, &f, &vw).unwrap();
        let rhs = dv.m_trace(&alg, &ptr, &v).unwrap();
        assert!((lhs - rhs).norm() < 1e-9, "{lhs} vs {rhs}");
    }
}
