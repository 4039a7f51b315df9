use super::{Element, LElement, Tensor, UqAlgebra};
use crate::error::Result;
use crate::exponents::{reduce_quadratic, ExponentPoly, FourierExpansion, Lattice};
use crate::scalars::{frac, Rational, C64};
use num_traits::{One, Zero};

/// `[j; q]! = prod_{s=1..j} (1 - q^s)/(1 - q)`.
pub fn q_factorial(j: usize, q: C64) -> C64 {
    (1..=j).map(|s| (C64::one() - q.powi(s as i32)) / (C64::one() - q)).product()
}

/// `R = xi^(linear) * body`, reduced modulo the ideal of the degree pair `(a, b)`.
#[derive(Debug, Clone)]
pub struct RMatrix {
    pub a: Rational,
    pub b: Rational,
    /// `2b H1 + 2a H2 - 2ab` for the representatives in `[0, 1)`.
    pub linear: ExponentPoly,
    /// Fourier table of the Cartan factor.
    pub cartan: FourierExpansion,
    /// `sum a_k K^k1 (x) K^k2` built from the Fourier table.
    pub cartan_tensor: Tensor,
    /// Cartan tensor times the quasi R-matrix.
    pub body: Tensor,
    /// Low-rank form of the body: `sum_t a_t (x) b_t` with `t = (z, j)`.
    pub terms: Vec<(Element, Element)>,
    /// `xi^(-2ab)`.
    pub const_phase: C64,
}

impl RMatrix {
    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn body_from_terms(&self) -> Tensor {
        let mut t = Tensor::zero(&[self.a, self.b]);
        for (x, y) in &self.terms {
            t = t.add(&Tensor::outer(&[x, y]));
        }
        t
    }

    /// Full factors `(xi^(2b H) xi^(-2ab) a_t, xi^(2a H) b_t)`.
    pub fn lfactors(&self) -> Vec<(LElement, LElement)> {
        self.terms
            .iter()
            .map(|(x, y)| {
                (
                    LElement { c: self.linear.lin[0], x: x.scale(self.const_phase) },
                    LElement { c: self.linear.lin[1], x: y.clone() },
                )
            })
            .collect()
    }
}

impl UqAlgebra {
    /// `c_j = (xi - xi^-1)^j / [j; xi^-2]!`.
    pub fn quasi_r_coeffs(&self) -> Vec<C64> {
        let d = self.cfg.xi_diff();
        let q = self.cfg.xi_pow_int(-2);
        (0..self.ellp).map(|j| d.powi(j as i32) / q_factorial(j, q)).collect()
    }

    pub fn quasi_r_matrix(&self, a: Rational, b: Rational) -> Tensor {
        let mut t = Tensor::zero(&[a, b]);
        for (j, c) in self.quasi_r_coeffs().into_iter().enumerate() {
            t.add_term(&[self.index(j, 0, 0), self.index(0, j, 0)], c);
        }
        t
    }

    /// `e_z = l^-1 sum_k xi^(-k (a + z)) K^k`, the idempotent picking the weight `a + z`.
    pub fn weight_idempotent(&self, a: Rational, z: i64) -> Element {
        let a = frac(a);
        let mut e = self.zero(a);
        let inv = 1.0 / self.ell as f64;
        for k in 0..self.ell {
            let kk = k as i64;
            e.coeffs[self.index(0, 0, k)] = self.cfg.xi_pow(-(a + z) * kk) * inv;
        }
        e
    }

    /// The R-matrix at the degree pair `(a, b)`.
    pub fn r_matrix(&self, a: Rational, b: Rational) -> Result<RMatrix> {
        let (a, b) = (frac(a), frac(b));
        let q = ExponentPoly::monomial(2, 0, 1, 2);
        let (linear, cartan) = reduce_quadratic(&self.cfg, &q, &Lattice::new(vec![a, b]))?;
        let mut cartan_tensor = Tensor::zero(&[a, b]);
        for flat in 0..cartan.num_modes() {
            let k = cartan.mode(flat);
            let c = cartan.coeff(flat)[0];
            cartan_tensor.add_term(&[self.index(0, 0, k[0] as usize), self.index(0, 0, k[1] as usize)], c);
        }
        let cartan_tensor = cartan_tensor.pruned(1e-14);
        let body = cartan_tensor.mul(self, &self.quasi_r_matrix(a, b))?;
        let cj = self.quasi_r_coeffs();
        let mut terms = Vec::with_capacity(self.ell * self.ellp);
        let const_phase = self.cfg.xi_pow(linear.const_term);
        for z in 0..self.ell as i64 {
            let ez = self.weight_idempotent(a, z);
            let kz = self.k_pow(b, 2 * z).scale(self.cfg.xi_pow(-(b * z) * 2));
            for (j, c) in cj.iter().enumerate() {
                let x = self.m(&ez, &self.monomial(a, j, 0, 0)).scale(*c);
                let y = self.m(&kz, &self.monomial(b, 0, j, 0));
                terms.push((x, y));
            }
        }
        Ok(RMatrix { a, b, linear, cartan, cartan_tensor, body, terms, const_phase })
    }

    /// `theta = g^-1 sum S^2(a_t) b_t` in `U_0`.
    pub fn twist_zero(&self) -> Result<(Element, Element)> {
        let z = Rational::zero();
        let r = self.r_matrix(z, z)?;
        let mut acc = self.zero(z);
        for (x, y) in &r.terms {
            let s2 = self.antipode(&self.antipode(x));
            acc = acc.add(&self.m(&s2, y));
        }
        let theta = self.m(&self.pivot_inv(z), &acc);
        let inv = self.inverse(&theta)?;
        Ok((theta, inv))
    }

    /// `sum_t b_t g a_t` at degree 0, the element read off a positive curl.
    pub fn kink_element(&self) -> Result<Element> {
        let z = Rational::zero();
        let r = self.r_matrix(z, z)?;
        let g = self.pivot(z);
        let mut acc = self.zero(z);
        for (x, y) in &r.terms {
            acc = acc.add(&self.m(&self.m(y, &g), x));
        }
        Ok(acc)
    }
}

/// Residual of `B Delta_{a,b}(x) = phi(Delta^op(x)) B` on the basis, where `phi` conjugates by
/// the Cartan prefactor.
pub fn quasi_cocommutativity_residual(alg: &UqAlgebra, a: Rational, b: Rational, stride: usize) -> f64 {
    let r = alg.r_matrix(a, b).unwrap();
    let top = frac(a + b);
    let phase = [-r.linear.lin[0], -r.linear.lin[1]];
    let mut worst: f64 = 0.0;
    for p in (0..alg.dim).step_by(stride.max(1)) {
        let x = alg.basis(top, p);
        let l = r.body.mul(alg, &alg.coproduct(&x, (r.a, r.b)).unwrap()).unwrap();
        let op = alg.coproduct(&x, (r.b, r.a)).unwrap().flip().weight_phase(alg, &phase);
        let rr = op.mul(alg, &r.body).unwrap();
        worst = worst.max(l.max_diff(&rr));
    }
    worst
}

/// Residual of `(Delta_{a,b} (x) id) R_{a+b,c} = R_13 R_23` on reduced bodies.
pub fn r_coproduct_left_residual(alg: &UqAlgebra, a: Rational, b: Rational, c: Rational) -> f64 {
    let (a, b, c) = (frac(a), frac(b), frac(c));
    let s = frac(a + b);
    let n = (a + b - s).to_integer();
    let rs = alg.r_matrix(s, c).unwrap();
    let r13 = alg.r_matrix(a, c).unwrap().body.insert_factor(1, &alg.one(b));
    let r23 = alg.r_matrix(b, c).unwrap().body.insert_factor(0, &alg.one(a));
    let phi13 = r13.weight_phase(alg, &[Rational::zero(), Rational::zero(), -b * 2]);
    let correction = Tensor::outer(&[&alg.one(a), &alg.one(b), &alg.k_pow(c, 2 * n)])
        .scale(alg.cfg.xi_pow(-(c * n) * 2));
    let rhs = correction.mul(alg, &phi13).unwrap().mul(alg, &r23).unwrap();
    let lhs = alg.coproduct_factor(&rs.body, 0, (a, b)).unwrap();
    lhs.max_diff(&rhs)
}

/// Residual of `(id (x) Delta_{b,c}) R_{a,b+c} = R_13 R_12` on reduced bodies.
pub fn r_coproduct_right_residual(alg: &UqAlgebra, a: Rational, b: Rational, c: Rational) -> f64 {
    let (a, b, c) = (frac(a), frac(b), frac(c));
    let s = frac(b + c);
    let n = (b + c - s).to_integer();
    let rs = alg.r_matrix(a, s).unwrap();
    let r13 = alg.r_matrix(a, c).unwrap().body.insert_factor(1, &alg.one(b));
    let r12 = alg.r_matrix(a, b).unwrap().body.insert_factor(2, &alg.one(c));
    let phi13 = r13.weight_phase(alg, &[-b * 2, Rational::zero(), Rational::zero()]);
    let correction = Tensor::outer(&[&alg.k_pow(a, 2 * n), &alg.one(b), &alg.one(c)])
        .scale(alg.cfg.xi_pow(-(a * n) * 2));
    let rhs = correction.mul(alg, &phi13).unwrap().mul(alg, &r12).unwrap();
    let lhs = alg.coproduct_factor(&rs.body, 1, (b, c)).unwrap();
    lhs.max_diff(&rhs)
}

/// Residuals at degree 0 of the counit laws `(eps (x) id) R = 1 = (id (x) eps) R`
/// and of `(S (x) id) R = R^-1`.
pub fn r_zero_residuals(alg: &UqAlgebra) -> (f64, f64) {
    let z = Rational::zero();
    let r = alg.r_matrix(z, z).unwrap();
    let eps = alg.counit_vector();
    let one = alg.one(z);
    let e1 = r.body.contract_factor(0, &eps).to_element(alg).max_diff(&one);
    let e2 = r.body.contract_factor(1, &eps).to_element(alg).max_diff(&one);
    let s = alg.antipode_matrix(z);
    let sr = r.body.map_factor(0, &s, z);
    let one2 = Tensor::one(alg, &[z, z]);
    let inv1 = sr.mul(alg, &r.body).unwrap().max_diff(&one2);
    let inv2 = r.body.mul(alg, &sr).unwrap().max_diff(&one2);
    (e1.max(e2), inv1.max(inv2))
}

/// Residuals for the twist: centrality, `S(theta) = theta`, `eps(theta) = 1`,
/// `Delta(theta) = R_21 R (theta (x) theta)`.
pub fn twist_residuals(alg: &UqAlgebra) -> [f64; 4] {
    let z = Rational::zero();
    let (theta, _) = alg.twist_zero().unwrap();
    let central = alg.centrality_residual(&theta);
    let s = alg.antipode(&theta).max_diff(&theta);
    let e = (alg.counit(&theta).unwrap() - 1.0).norm();
    let r = alg.r_matrix(z, z).unwrap().body;
    let lhs = alg.coproduct(&theta, (z, z)).unwrap();
    let tt = Tensor::outer(&[&theta, &theta]);
    let rhs = r.flip().mul(alg, &r).unwrap().mul(alg, &tt).unwrap();
    [central, s, e, lhs.max_diff(&rhs)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{rat, rat_int};

    #[test]
    fn quasi_r_terms() {
        let alg = UqAlgebra::from_ell(3).unwrap();
        let c = alg.quasi_r_coeffs();
        assert!((c[0] - 1.0).norm() < 1e-15);
        assert!((c[1] - alg.cfg.xi_diff()).norm() < 1e-15);
        assert_eq!(alg.quasi_r_matrix(rat_int(0), rat_int(0)).terms.len(), 3);
    }

    #[test]
    fn low_rank_form_matches_fourier_table() {
        for ell in [3u32, 4, 5] {
            let alg = UqAlgebra::from_ell(ell).unwrap();
            for (a, b) in [(rat_int(0), rat_int(0)), (rat(1, 3), rat(2, 7)), (rat(5, 6), rat(1, 9))] {
                let r = alg.r_matrix(a, b).unwrap();
                assert_eq!(r.rank(), alg.ell * alg.ellp);
                assert!(r.body.max_diff(&r.body_from_terms()) < 1e-10, "ell={ell} a={a} b={b}");
            }
        }
    }

    #[test]
    fn cartan_factor_is_xi_2h1h2_on_weights() {
        let alg = UqAlgebra::from_ell(5).unwrap();
        let (a, b) = (rat(1, 4), rat(2, 3));
        let r = alg.r_matrix(a, b).unwrap();
        for j1 in 0..5i64 {
            for j2 in 0..5i64 {
                let (l1, l2) = (a + j1, b + j2);
                let mut v = C64::zero();
                for (key, c) in &r.cartan_tensor.terms {
                    let i = super::super::unpack(*key, 2);
                    let (_, _, k1) = alg.unindex(i[0]);
                    let (_, _, k2) = alg.unindex(i[1]);
                    v += c * alg.cfg.xi_pow(l1 * k1 as i64 + l2 * k2 as i64);
                }
                let want = alg.cfg.xi_pow(l1 * l2 * 2 - r.linear.evaluate(&[l1, l2]));
                assert!((v - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn r_axioms_at_zero() {
        let alg = UqAlgebra::from_ell(3).unwrap();
        let (e, s) = r_zero_residuals(&alg);
        assert!(e < 1e-9 && s < 1e-9, "{e} {s}");
        let (theta, inv) = alg.twist_zero().unwrap();
        assert!(alg.m(&theta, &inv).max_diff(&alg.one(rat_int(0))) < 1e-9);
        let t = twist_residuals(&alg);
        assert!(t.iter().all(|&x| x < 1e-9), "{t:?}");
        assert!(alg.kink_element().unwrap().max_diff(&theta) < 1e-9);
    }

    #[test]
    fn graded_r_axioms() {
        let alg = UqAlgebra::from_ell(3).unwrap();
        let (a, b, c) = (rat(2, 5), rat(3, 4), rat(1, 3));
        assert!(quasi_cocommutativity_residual(&alg, a, b, 1) < 1e-9);
        assert!(r_coproduct_left_residual(&alg, a, b, c) < 1e-9);
        assert!(r_coproduct_right_residual(&alg, a, b, c) < 1e-9);
    }

    #[test]
    fn r_inverse_by_solve() {
        let alg = UqAlgebra::from_ell(3).unwrap();
        let r = alg.r_matrix(rat(1, 5), rat(3, 7)).unwrap();
        let inv = r.body.inverse2(&alg).unwrap();
        let one = Tensor::one(&alg, &[r.a, r.b]);
        assert!(r.body.mul(&alg, &inv).unwrap().max_diff(&one) < 1e-9);
    }
}
