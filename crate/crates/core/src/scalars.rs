//! Complex scalars, exact rational exponents and the tolerance policy.

use crate::error::{Error, Result};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::f64::consts::PI;
use std::fmt;

pub type C64 = Complex64;
pub type Rational = num_rational::Ratio<i64>;

/// Reduce a rational to its representative in `[0, 1)`.
pub fn frac(q: Rational) -> Rational {
    q - q.floor()
}

/// Returns `true` when `q` is an integer.
pub fn is_integer(q: Rational) -> bool {
    q.is_integer()
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Parse `p/q`, `p` or a decimal with finitely many digits.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().ok()?;
        let q: i64 = q.trim().parse().ok()?;
        if q == 0 {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.len() > 12 || fp.is_empty() {
            return None;
        }
        let neg = ip.starts_with('-');
        let ip_val: i64 = if ip == "-" || ip.is_empty() { 0 } else { ip.parse().ok()? };
        let den = 10i64.pow(fp.len() as u32);
        let fv: i64 = fp.parse().ok()?;
        let num = ip_val.abs() * den + fv;
        return Some(Rational::new(if neg { -num } else { num }, den));
    }
    s.parse::<i64>().ok().map(Rational::from_integer)
}

pub fn format_rational(q: Rational) -> String {
    if q.is_integer() {
        format!("{}", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Format a float with 12 significant digits.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let s = format!("{:.11e}", x);
    let v: f64 = s.parse().unwrap_or(x);
    if v.abs() < 1e-4 || v.abs() >= 1e12 {
        format!("{:e}", v)
    } else {
        format!("{}", v)
    }
}

/// Root of unity data shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOfUnityConfig {
    pub ell: u32,
    pub ell_prime: u32,
    pub tolerance: f64,
}

impl RootOfUnityConfig {
    pub const DEFAULT_TOLERANCE: f64 = 1e-9;

    /// Accepts `ell >= 3`. Multiples of 8 are rejected by [`gauss_sum`](Self::gauss_sum)
    /// callers through [`validated`](Self::validated).
    pub fn new(ell: u32) -> Result<Self> {
        if ell < 3 {
            return Err(Error::InvalidConfig(format!("ell = {ell} must be at least 3")));
        }
        let ell_prime = ell / (ell as u64).gcd(&2) as u32;
        Ok(Self { ell, ell_prime, tolerance: Self::DEFAULT_TOLERANCE })
    }

    /// Like [`new`](Self::new) but also rejects degenerate roots.
    pub fn validated(ell: u32) -> Result<Self> {
        let cfg = Self::new(ell)?;
        cfg.gauss_sum()?;
        Ok(cfg)
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn ell_i(&self) -> i64 {
        self.ell as i64
    }

    pub fn ellp_i(&self) -> i64 {
        self.ell_prime as i64
    }

    /// `exp(2 pi i c / ell)`, with `c` reduced exactly modulo `ell` first.
    pub fn xi_pow(&self, c: Rational) -> C64 {
        let l = Rational::from_integer(self.ell_i());
        let r = c - (c / l).floor() * l;
        let angle = 2.0 * PI * r.to_f64().unwrap_or(0.0) / self.ell as f64;
        C64::new(angle.cos(), angle.sin())
    }

    pub fn xi_pow_int(&self, c: i64) -> C64 {
        self.xi_pow(Rational::from_integer(c))
    }

    pub fn xi(&self) -> C64 {
        self.xi_pow_int(1)
    }

    /// `exp(2 pi i a)`, the scalar by which `K^ell` acts in degree `a`.
    pub fn e2pi(&self, a: Rational) -> C64 {
        let r = frac(a);
        let angle = 2.0 * PI * r.to_f64().unwrap_or(0.0);
        C64::new(angle.cos(), angle.sin())
    }

    /// `sum_{k<ell} xi^(2k^2 - 2k)`.
    pub fn gauss_sum(&self) -> Result<C64> {
        let s: C64 = (0..self.ell_i()).map(|k| self.xi_pow_int(2 * k * k - 2 * k)).sum();
        if s.norm() < self.tolerance {
            return Err(Error::DegenerateRoot { modulus: s.norm() });
        }
        Ok(s)
    }

    pub fn approx_eq(&self, a: C64, b: C64, scale: f64) -> bool {
        (a - b).norm() <= self.tolerance * scale.max(1.0)
    }

    /// `(xi - xi^-1)`.
    pub fn xi_diff(&self) -> C64 {
        self.xi() - self.xi().inv()
    }
}

/// A rational exponent paired with the config, printed as `xi^(c)`.
#[derive(Debug, Clone, Copy)]
pub struct XiPower(pub Rational);

impl fmt::Display for XiPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "xi^({})", format_rational(self.0))
    }
}

pub fn czero() -> C64 {
    C64::zero()
}

pub fn cone() -> C64 {
    C64::one()
}

/// Largest modulus in a slice, used as a tolerance scale.
pub fn max_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn abs_rat(q: Rational) -> Rational {
    q.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xi_pow_basics() {
        let cfg = RootOfUnityConfig::new(5).unwrap();
        assert!(cfg.approx_eq(cfg.xi_pow(rat_int(0)), cone(), 1.0));
        let x = cfg.xi_pow(rat_int(1));
        assert!((x.re - 0.309016994374947).abs() < 1e-12);
        assert!((x.im - 0.951056516295154).abs() < 1e-12);
        let cfg6 = RootOfUnityConfig::new(6).unwrap();
        assert!(cfg6.approx_eq(cfg6.xi_pow(rat_int(3)), C64::new(-1.0, 0.0), 1.0));
    }

    #[test]
    fn ell_prime_values() {
        assert_eq!(RootOfUnityConfig::new(3).unwrap().ell_prime, 3);
        assert_eq!(RootOfUnityConfig::new(4).unwrap().ell_prime, 2);
        assert_eq!(RootOfUnityConfig::new(10).unwrap().ell_prime, 5);
        assert!(RootOfUnityConfig::new(2).is_err());
    }

    #[test]
    fn gauss_sum_small_cases() {
        let cfg = RootOfUnityConfig::new(3).unwrap();
        let g = cfg.gauss_sum().unwrap();
        assert!(cfg.approx_eq(g, C64::new(2.0, 0.0) + cfg.xi(), 1.0));
        for ell in [3u32, 4, 5, 6, 7, 9, 10, 12] {
            assert!(RootOfUnityConfig::new(ell).unwrap().gauss_sum().is_ok(), "ell = {ell}");
        }
        for ell in [8u32, 16] {
            assert!(matches!(
                RootOfUnityConfig::new(ell).unwrap().gauss_sum(),
                Err(Error::DegenerateRoot { .. })
            ));
        }
    }

    #[test]
    fn approx_eq_examples() {
        let cfg = RootOfUnityConfig::new(5).unwrap();
        assert!(cfg.approx_eq(cone(), C64::new(1.0 + 1e-12, 0.0), 1.0));
        assert!(!cfg.approx_eq(czero(), cone(), 1.0));
        assert!(cfg.approx_eq(cfg.xi() * cfg.xi_pow_int(4), cfg.xi_pow_int(5), 1.0));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/4"), Some(rat(3, 4)));
        assert_eq!(parse_rational("-2"), Some(rat_int(-2)));
        assert_eq!(parse_rational("0.25"), Some(rat(1, 4)));
        assert_eq!(parse_rational("-0.5"), Some(rat(-1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(frac(rat(-1, 3)), rat(2, 3));
    }

    #[test]
    fn twelve_digits() {
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(0.1234567890123456), "0.123456789012");
        assert_eq!(format_sig(-1.998401444325282e-15), "-1.99840144433e-15");
        assert_eq!(format_sig(123456789012345.0), "1.23456789012e14");
        assert_eq!(format_sig(-0.0), "0");
    }
}
