//! Complex q-arithmetic and q-shifted factorials with an explicit truncation
//! bound. Also the Joukowski branch `x = (z + 1/z)/2` that every other module
//! lifts through.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// The deformation parameter `q`, `0 < |q| < 1`, together with its principal
/// square root. Every occurrence of `q^{±1/2}` in the crate goes through
/// [`QParam::sqrt_q`] so that signs stay consistent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QParam {
    q: C64,
    sqrt_q: C64,
    abs_q: f64,
}

impl QParam {
    pub fn new(q: C64) -> Result<Self> {
        let abs_q = q.norm();
        if !(abs_q > 0.0 && abs_q < 1.0) || !q.re.is_finite() || !q.im.is_finite() {
            return Err(Error::InvalidParams(format!("need 0 < |q| < 1, got q = {q}")));
        }
        Ok(QParam {
            q,
            sqrt_q: q.sqrt(),
            abs_q,
        })
    }

    pub fn real(q: f64) -> Result<Self> {
        Self::new(C64::new(q, 0.0))
    }

    #[inline]
    pub fn q(&self) -> C64 {
        self.q
    }

    #[inline]
    pub fn sqrt_q(&self) -> C64 {
        self.sqrt_q
    }

    #[inline]
    pub fn abs_q(&self) -> f64 {
        self.abs_q
    }

    /// `q^n` for any integer `n`.
    pub fn pow(&self, n: i64) -> C64 {
        cpowi(self.q, n)
    }

    /// `q^{k/2}` built from the stored square root.
    pub fn half_pow(&self, k: i64) -> C64 {
        cpowi(self.sqrt_q, k)
    }

    /// The parameter `q^2` (the nome used by the theta-function identities).
    pub fn squared(&self) -> QParam {
        QParam {
            q: self.q * self.q,
            sqrt_q: self.q,
            abs_q: self.abs_q * self.abs_q,
        }
    }
}

/// Integer power of a complex number, including negative exponents.
pub fn cpowi(base: C64, n: i64) -> C64 {
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    let mut acc = C64::new(1.0, 0.0);
    let mut b = if n < 0 { base.inv() } else { base };
    let mut e = n.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPolicy {
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            abs_tol: 1e-14,
            max_terms: 1_000_000,
        }
    }
}

impl TruncationPolicy {
    pub fn new(abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || max_terms < 1 {
            return Err(Error::InvalidParams(format!(
                "truncation policy needs abs_tol > 0 and max_terms >= 1 (got {abs_tol}, {max_terms})"
            )));
        }
        Ok(TruncationPolicy { abs_tol, max_terms })
    }
}

/// `(a; q)_n = prod_{k=1}^{n} (1 - a q^{k-1})`.
pub fn qpoch_finite(a: C64, q: &QParam, n: usize) -> C64 {
    qpoch_finite_base(a, q.q(), n)
}

pub fn qpoch_finite_base(a: C64, base: C64, n: usize) -> C64 {
    let mut p = C64::new(1.0, 0.0);
    let mut w = a;
    for _ in 0..n {
        p *= C64::new(1.0, 0.0) - w;
        w *= base;
    }
    p
}

/// `(a; q)_∞` with absolute log-error at most `policy.abs_tol`.
pub fn qpoch_infinite(a: C64, q: &QParam, policy: &TruncationPolicy) -> Result<C64> {
    qpoch_infinite_base(a, q.q(), policy)
}

pub fn qpoch_infinite_base(a: C64, base: C64, policy: &TruncationPolicy) -> Result<C64> {
    Ok(log_qpoch_infinite_base(a, base, policy)?.exp())
}

/// Complex logarithm of `(a; base)_∞`, accumulated factor by factor.
///
/// The real part is `log |(a; base)_∞|`, which stays finite where the product
/// itself would overflow. The imaginary part is an argument, not reduced mod 2π.
/// A vanishing factor yields a real part of `-inf`.
pub fn log_qpoch_infinite_base(a: C64, base: C64, policy: &TruncationPolicy) -> Result<C64> {
    log_qpoch_tracked(a, base, policy).map(|(l, _)| l)
}

/// As [`log_qpoch_infinite_base`], also returning `min_k |1 - a base^k|`.
pub(crate) fn log_qpoch_tracked(a: C64, base: C64, policy: &TruncationPolicy) -> Result<(C64, f64)> {
    let abs_base = base.norm();
    if !(abs_base < 1.0) {
        return Err(Error::InvalidParams(format!("|base| must be < 1, got {abs_base}")));
    }
    let one = C64::new(1.0, 0.0);
    let mut acc = C64::new(0.0, 0.0);
    let mut closest = f64::INFINITY;
    if a == C64::new(0.0, 0.0) {
        return Ok((acc, closest));
    }
    let mut w = a;
    let mut t = a.norm();
    for _ in 0..policy.max_terms {
        if t < 1.0 && tail_bound(t, abs_base) <= policy.abs_tol {
            return Ok((acc, closest));
        }
        let f = one - w;
        closest = closest.min(f.norm());
        acc += f.ln();
        w *= base;
        t *= abs_base;
    }
    if t < 1.0 && tail_bound(t, abs_base) <= policy.abs_tol {
        return Ok((acc, closest));
    }
    Err(Error::TruncationExceeded {
        max_terms: policy.max_terms,
    })
}

/// Bound on `sum_{j>=0} |log(1 - w_j)|` when `|w_j| = t |base|^j`, using
/// `|log(1-w)| <= |w| / (1 - |w|)`.
#[inline]
pub(crate) fn tail_bound(t: f64, abs_base: f64) -> f64 {
    if abs_base == 0.0 {
        t / (1.0 - t)
    } else {
        t / ((1.0 - t) * (1.0 - abs_base))
    }
}

/// A point `x` together with its branch representative `z`, `x = (z + 1/z)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JoukowskiPoint {
    pub x: C64,
    pub z: C64,
}

impl JoukowskiPoint {
    /// Builds the pair from an arbitrary nonzero `z` without re-choosing a branch.
    pub fn from_z(z: C64) -> Self {
        JoukowskiPoint { x: joukowski(z), z }
    }
}

#[inline]
pub fn joukowski(z: C64) -> C64 {
    (z + z.inv()) * 0.5
}

/// The branch `z = x + sqrt(x^2 - 1)` with `|z| >= 1` and `z ~ 2x` at infinity;
/// on the segment `[-1, 1]` the limit from above, `z = x + i sqrt(1 - x^2)`.
pub fn lift_to_z(x: C64) -> JoukowskiPoint {
    if x.im == 0.0 && x.re.abs() <= 1.0 {
        let z = C64::new(x.re, (1.0 - x.re * x.re).max(0.0).sqrt());
        return JoukowskiPoint { x, z };
    }
    let s = (x * x - 1.0).sqrt();
    let zp = x + s;
    let zm = x - s;
    let (np, nm) = (zp.norm(), zm.norm());
    let z = if np > nm {
        zp
    } else if nm > np {
        zm
    } else if zp.im >= zm.im {
        zp
    } else {
        zm
    };
    JoukowskiPoint { x, z }
}

/// `x̂ = (q^{1/2} z + q^{-1/2}/z)/2` and `x̌ = (q^{-1/2} z + q^{1/2}/z)/2`.
pub fn hat_check(p: &JoukowskiPoint, q: &QParam) -> (C64, C64) {
    let s = q.sqrt_q();
    let hat = (s * p.z + (s * p.z).inv()) * 0.5;
    let check = (p.z / s + s / p.z) * 0.5;
    (hat, check)
}

/// `x_n = (a q^n + q^{-n}/a)/2`.
pub fn lattice_point(a: C64, q: &QParam, n: i64) -> Result<C64> {
    lattice_point_base(a, q.q(), n)
}

pub fn lattice_point_base(a: C64, base: C64, n: i64) -> Result<C64> {
    if a == C64::new(0.0, 0.0) {
        return Err(Error::DegenerateGenerator);
    }
    let bn = cpowi(base, n);
    Ok((a * bn + (a * bn).inv()) * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn finite_product_examples() {
        let q = QParam::real(0.5).unwrap();
        assert_eq!(qpoch_finite(c(0.7), &q, 0), c(1.0));
        assert!((qpoch_finite(c(0.5), &q, 2) - c(0.375)).norm() < 1e-15);
        assert_eq!(qpoch_finite(c(1.0), &q, 3), c(0.0));
    }

    #[test]
    fn finite_product_recurrence_is_exact() {
        let q = QParam::new(C64::new(0.3, 0.2)).unwrap();
        let a = C64::new(0.7, -0.4);
        for n in 0..12 {
            let lhs = qpoch_finite(a, &q, n + 1);
            let rhs = qpoch_finite(a, &q, n) * (c(1.0) - a * q.pow(n as i64));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn infinite_product_zero_generator() {
        let q = QParam::real(0.5).unwrap();
        assert_eq!(
            qpoch_infinite(c(0.0), &q, &TruncationPolicy::default()).unwrap(),
            c(1.0)
        );
    }

    #[test]
    fn infinite_product_matches_doubled_partial_product() {
        let q = QParam::real(0.5).unwrap();
        let v = qpoch_infinite(c(0.5), &q, &TruncationPolicy::default()).unwrap();
        // brute force with far more factors than the tail bound needs
        let brute = qpoch_finite(c(0.5), &q, 400);
        assert!((v - brute).norm() < 1e-14);
    }

    #[test]
    fn euler_function_matches_pentagonal_series() {
        for &qq in &[0.5, 0.3, 0.9] {
            let q = QParam::real(qq).unwrap();
            let prod = qpoch_infinite(c(qq), &q, &TruncationPolicy::default()).unwrap();
            let mut series = 1.0;
            for k in 1..200i64 {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let e1 = (k * (3 * k - 1) / 2) as f64;
                let e2 = (k * (3 * k + 1) / 2) as f64;
                series += sign * (qq.powf(e1) + qq.powf(e2));
            }
            assert!((prod - c(series)).norm() < 1e-13, "q={qq}: {prod} vs {series}");
        }
    }

    #[test]
    fn truncation_exceeded_is_reported() {
        let policy = TruncationPolicy {
            abs_tol: 1e-14,
            max_terms: 5,
        };
        let q = QParam::real(0.99).unwrap();
        assert!(matches!(
            qpoch_infinite(c(0.5), &q, &policy),
            Err(Error::TruncationExceeded { max_terms: 5 })
        ));
    }

    #[test]
    fn functional_equation() {
        let q = QParam::new(C64::new(0.4, 0.3)).unwrap();
        let pol = TruncationPolicy::default();
        for a in [C64::new(0.3, 0.1), C64::new(-2.0, 1.5), C64::new(5.0, 0.0)] {
            let lhs = qpoch_infinite(a, &q, &pol).unwrap();
            let rhs = (c(1.0) - a) * qpoch_infinite(a * q.q(), &q, &pol).unwrap();
            assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
        }
    }

    #[test]
    fn lift_examples() {
        assert!((lift_to_z(c(1.25)).z - c(2.0)).norm() < 1e-15);
        assert!((lift_to_z(c(0.0)).z - C64::new(0.0, 1.0)).norm() < 1e-15);
        let z10 = lift_to_z(c(10.0)).z;
        assert!((z10 - c(10.0 + 99f64.sqrt())).norm() < 1e-13);
        assert!(lift_to_z(c(-3.0)).z.norm() >= 1.0);
    }

    #[test]
    fn hat_check_examples() {
        let q = QParam::real(0.25).unwrap();
        let p = lift_to_z(c(1.25));
        let (hat, check) = hat_check(&p, &q);
        assert!((hat - c(1.0)).norm() < 1e-15);
        assert!((check - c(2.125)).norm() < 1e-15);
    }

    #[test]
    fn lattice_examples() {
        let q = QParam::real(0.5).unwrap();
        assert_eq!(lattice_point(c(1.0), &q, 0).unwrap(), c(1.0));
        assert!((lattice_point(c(0.5), &q, 1).unwrap() - c(2.125)).norm() < 1e-15);
        assert_eq!(lattice_point(c(0.0), &q, 1), Err(Error::DegenerateGenerator));
    }

    #[test]
    fn half_lattice_is_odd_interpolation_family() {
        // x_{2n+1} = (a q^{(2n+1)/2} + q^{-(2n+1)/2}/a)/2 with a = 1
        let q = QParam::new(C64::new(0.35, 0.1)).unwrap();
        for n in 0..6 {
            let lp = lattice_point(q.sqrt_q(), &q, n).unwrap();
            let k = 2 * n + 1;
            let interp = (q.half_pow(k) + q.half_pow(-k)) * 0.5;
            assert!((lp - interp).norm() <= 1e-12 * interp.norm());
        }
    }

    #[test]
    fn invalid_q_rejected() {
        assert!(QParam::real(1.0).is_err());
        assert!(QParam::real(0.0).is_err());
        assert!(QParam::new(C64::new(0.8, 0.8)).is_err());
    }
}
