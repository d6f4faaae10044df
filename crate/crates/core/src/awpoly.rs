//! Askey-Wilson polynomials with their weight and second-order difference
//! equation. The Rodrigues formula and Rogers' generating functions are
//! checked numerically.
//!
//! The weight is odd under `z ↔ 1/z` because of its `1/sin θ` factor, so every
//! difference quotient that touches it runs in the `z`-plane through
//! [`aw_diff_z`] instead of re-lifting from `x`.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use serde::Serialize;

use crate::awops::{aw_basis, aw_diff_z};
use crate::error::{Error, Result};
use crate::qcore::{joukowski, lift_to_z, qpoch_finite, qpoch_infinite, QParam, TruncationPolicy, C64};

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AWParams {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
    pub q: QParam,
}

impl AWParams {
    pub fn new(a: C64, b: C64, c: C64, d: C64, q: QParam) -> Self {
        AWParams { a, b, c, d, q }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64, q: f64) -> Result<Self> {
        let r = |v: f64| C64::new(v, 0.0);
        Ok(AWParams::new(r(a), r(b), r(c), r(d), QParam::real(q)?))
    }

    fn list(&self) -> [C64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// All four parameters multiplied by `q^{k/2}`.
    pub fn shifted(&self, k: u32) -> Self {
        let f = self.q.half_pow(k as i64);
        AWParams::new(self.a * f, self.b * f, self.c * f, self.d * f, self.q)
    }

    /// Real or closed under conjugation, with every modulus below 1.
    pub fn admissible(&self) -> bool {
        let ps = self.list();
        let closed = ps
            .iter()
            .all(|p| p.im.abs() < 1e-14 || ps.iter().any(|o| (o - p.conj()).norm() < 1e-12 * p.norm().max(1.0)));
        closed && ps.iter().all(|p| p.norm() < 1.0) && self.q.q().im == 0.0
    }
}

/// `λ_n = 4 q^{1-n} (1 - q^n)(1 - abcd q^{n-1})`.
pub fn eigenvalue(n: u32, p: &AWParams) -> C64 {
    let q = &p.q;
    let n = n as i64;
    q.pow(1 - n) * 4.0 * (ONE - q.pow(n)) * (ONE - p.a * p.b * p.c * p.d * q.pow(n - 1))
}

/// `p_n(x; a, b, c, d | q)` from the terminating `₄φ₃`.
///
/// Term `k` carries `(ab q^k, ac q^k, ad q^k; q)_{n-k}` in place of the quotient
/// `(ab, ac, ad; q)_n / (ab, ac, ad; q)_k`, so no division by a vanishing
/// Pochhammer symbol can occur.
pub fn aw_polynomial(n: u32, p: &AWParams, x: C64) -> Result<C64> {
    aw_polynomial_scaled(n, p, x).map(|(v, _)| v)
}

/// The value together with `Σ |term|`, the natural scale for rounding error.
pub fn aw_polynomial_scaled(n: u32, p: &AWParams, x: C64) -> Result<(C64, f64)> {
    if p.a == ZERO {
        return Err(Error::InvalidParams("parameter a must be nonzero".into()));
    }
    let q = &p.q;
    let n_us = n as usize;
    let abcd = p.a * p.b * p.c * p.d;
    let (ab, ac, ad) = (p.a * p.b, p.a * p.c, p.a * p.d);
    let mut sum = ZERO;
    // running (q^{-n}, abcd q^{n-1}; q)_k q^k / (q; q)_k
    let mut lead = ONE;
    let mut scale = 0.0;
    for k in 0..=n_us {
        let qk = q.pow(k as i64);
        let tail = qpoch_finite(ab * qk, q, n_us - k)
            * qpoch_finite(ac * qk, q, n_us - k)
            * qpoch_finite(ad * qk, q, n_us - k);
        let term = lead * aw_basis(k, p.a, q, x) * tail;
        sum += term;
        scale += term.norm();
        let kk = k as i64;
        lead *= (ONE - q.pow(kk - n as i64)) * (ONE - abcd * q.pow(n as i64 - 1 + kk)) * q.q() / (ONE - q.pow(kk + 1));
    }
    let an = crate::qcore::cpowi(p.a, n as i64);
    Ok((sum / an, scale / an.norm()))
}

/// The weight as a function of `z`:
/// `(z², z⁻²; q)∞ / (Π_p (p z, p/z; q)∞ · sin θ)` with `sin θ = (z - 1/z)/(2i)`.
pub fn aw_weight_z(z: C64, p: &AWParams, shift: u32) -> Result<C64> {
    let sp = p.shifted(shift);
    let pol = TruncationPolicy::default();
    let q = &p.q;
    let sin = (z - z.inv()) / (2.0 * I);
    if sin.norm() < 1e-12 {
        return Err(Error::BranchDegenerate);
    }
    let mut den = sin;
    for a in sp.list() {
        den *= qpoch_infinite(a * z, q, &pol)? * qpoch_infinite(a / z, q, &pol)?;
    }
    if den.norm() < 1e-300 || !den.norm().is_finite() {
        return Err(Error::PoleHit { x: joukowski(z) });
    }
    Ok(qpoch_infinite(z * z, q, &pol)? * qpoch_infinite((z * z).inv(), q, &pol)? / den)
}

/// `ω(x; a q^{k/2}, b q^{k/2}, c q^{k/2}, d q^{k/2} | q)` on the branch `|z| ≥ 1`.
pub fn aw_weight(x: C64, p: &AWParams, shift: u32) -> Result<C64> {
    if (x - 1.0).norm() < 1e-12 || (x + 1.0).norm() < 1e-12 {
        return Err(Error::BranchDegenerate);
    }
    aw_weight_z(lift_to_z(x).z, p, shift)
}

fn relative(d: C64, scale: f64) -> f64 {
    if scale == 0.0 {
        0.0
    } else {
        d.norm() / scale
    }
}

/// Max over the grid of `|(1-q)² D_q[ω̃ D_q p_n] + λ_n ω p_n|`, relative to
/// the sum of the two terms' moduli.
pub fn eigen_residual(n: u32, p: &AWParams, grid: &[C64]) -> Result<f64> {
    let q = &p.q;
    let lambda = eigenvalue(n, p);
    let pn_z = |w: C64| aw_polynomial(n, p, joukowski(w));
    let dpn_z = |w: C64| aw_diff_z(&pn_z, w, q);
    let inner = |w: C64| Ok(aw_weight_z(w, p, 1)? * dpn_z(w)?);
    let one_minus_q = (ONE - q.q()) * (ONE - q.q());
    let res: Vec<f64> = grid
        .par_iter()
        .map(|&x| {
            let z = lift_to_z(x).z;
            let left = one_minus_q * aw_diff_z(&inner, z, q)?;
            let right = lambda * aw_weight_z(z, p, 0)? * pn_z(z)?;
            Ok(relative(left + right, left.norm() + right.norm()))
        })
        .collect::<Result<_>>()?;
    Ok(res.into_iter().fold(0.0, f64::max))
}

fn nested_diff_z(g: &(dyn Fn(C64) -> Result<C64> + Sync), k: u32, z: C64, q: &QParam) -> Result<C64> {
    if k == 0 {
        return g(z);
    }
    let inner = |w: C64| nested_diff_z(g, k - 1, w, q);
    aw_diff_z(&inner, z, q)
}

/// Max over the grid of the relative mismatch in
/// `D_qⁿ[ω(·; a q^{n/2}, …)] = ((q-1)/2)^{-n} q^{-n(n-1)/4} ω p_n`.
pub fn rodrigues_residual(n: u32, p: &AWParams, grid: &[C64]) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParams("Rodrigues formula needs n >= 1".into()));
    }
    let q = &p.q;
    let weight = |w: C64| aw_weight_z(w, p, n);
    let ni = n as i64;
    // q^{-n(n-1)/4} = s^{-n(n-1)/2} with s = q^{1/2}
    let factor = crate::qcore::cpowi((q.q() - 1.0) / 2.0, -ni) * q.half_pow(-ni * (ni - 1) / 2);
    let res: Vec<f64> = grid
        .par_iter()
        .map(|&x| {
            let z = lift_to_z(x).z;
            let left = nested_diff_z(&weight, n, z, q)?;
            let right = factor * aw_weight_z(z, p, 0)? * aw_polynomial(n, p, x)?;
            Ok(relative(left - right, left.norm().max(right.norm())))
        })
        .collect::<Result<_>>()?;
    Ok(res.into_iter().fold(0.0, f64::max))
}

/// `∫_{-1}^{1} p_m p_n ω dx` via `x = cos t`, Gauss-Legendre in `t`.
///
/// The rule is rerun with twice the nodes; disagreement beyond `1e-10`
/// relative raises `QuadratureNonconvergent`.
pub fn orthogonality_check(m: u32, n: u32, p: &AWParams, nodes: usize) -> Result<C64> {
    if !p.admissible() {
        return Err(Error::Precondition(
            "orthogonality needs real q, parameters real or in conjugate pairs, all of modulus < 1".into(),
        ));
    }
    let integral = |k: usize| -> Result<(C64, f64)> {
        let rule = GaussLegendre::new(NonZeroUsize::new(k.max(2)).expect("nonzero"));
        let half = std::f64::consts::FRAC_PI_2;
        let mut acc = ZERO;
        let mut scale = 0.0;
        for &(node, weight) in rule.as_node_weight_pairs() {
            let t = half * (node + 1.0);
            let z = C64::from_polar(1.0, t);
            // ω sin t is smooth on [0, π]
            let v = aw_weight_z(z, p, 0)?
                * t.sin()
                * aw_polynomial(m, p, C64::new(t.cos(), 0.0))?
                * aw_polynomial(n, p, C64::new(t.cos(), 0.0))?;
            acc += v * weight * half;
            scale += v.norm() * weight * half;
        }
        Ok((acc, scale))
    };
    let (coarse, _) = integral(nodes)?;
    let (fine, scale) = integral(2 * nodes)?;
    let difference = (fine - coarse).norm();
    if difference > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::QuadratureNonconvergent { difference });
    }
    Ok(fine)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GeneratingKind {
    QHermite,
    QUltraspherical,
}

/// `|product side - Σ_{k ≤ K} coefficient_k t^k|` for Rogers' generating
/// functions
///
/// ```text
/// 1/(t e^{iθ}, t e^{-iθ}; q)∞          = Σ H_k(x|q) t^k / (q;q)_k
/// (βt e^{iθ}, βt e^{-iθ}; q)∞ / (t e^{iθ}, t e^{-iθ}; q)∞ = Σ C_k(x; β|q) t^k
/// ```
pub fn generating_residual(kind: GeneratingKind, t: C64, beta: C64, x: C64, q: &QParam, k_max: usize) -> Result<f64> {
    if !(t.norm() > 0.0 && t.norm() < 1.0) {
        return Err(Error::InvalidParams(format!("|t| = {} must lie in (0, 1)", t.norm())));
    }
    let pol = TruncationPolicy::default();
    let z = lift_to_z(x).z;
    let denom = qpoch_infinite(t * z, q, &pol)? * qpoch_infinite(t / z, q, &pol)?;
    let lhs = match kind {
        GeneratingKind::QHermite => denom.inv(),
        GeneratingKind::QUltraspherical => {
            qpoch_infinite(beta * t * z, q, &pol)? * qpoch_infinite(beta * t / z, q, &pol)? / denom
        }
    };
    let mut sum = ZERO;
    let mut tk = ONE;
    for n in 0..=k_max {
        let mut coeff = ZERO;
        for k in 0..=n {
            let e = crate::qcore::cpowi(z, n as i64 - 2 * k as i64);
            coeff += e * match kind {
                GeneratingKind::QHermite => (qpoch_finite(q.q(), q, k) * qpoch_finite(q.q(), q, n - k)).inv(),
                GeneratingKind::QUltraspherical => {
                    qpoch_finite(beta, q, k) * qpoch_finite(beta, q, n - k)
                        / (qpoch_finite(q.q(), q, k) * qpoch_finite(q.q(), q, n - k))
                }
            };
        }
        // H_n/(q;q)_n = Σ_k e^{i(n-2k)θ} / ((q;q)_k (q;q)_{n-k})
        sum += coeff * tk;
        tk *= t;
    }
    Ok((lhs - sum).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> AWParams {
        AWParams::real(0.3, 0.2, 0.1, 0.05, 0.5).unwrap()
    }

    fn grid() -> Vec<C64> {
        vec![
            C64::new(0.31, 0.0),
            C64::new(-0.62, 0.0),
            C64::new(0.2, 0.35),
            C64::new(1.3, -0.4),
            C64::new(-0.8, 0.7),
            C64::new(0.05, -0.9),
        ]
    }

    #[test]
    fn polynomial_low_degrees() {
        let p = params();
        let x = C64::new(0.4, 0.0);
        assert_eq!(aw_polynomial(0, &p, x).unwrap(), ONE);
        // n = 1: (1 - ab)(1 - ac)(1 - ad)/a · [1 + (1-q^{-1})(1-abcd)q (1 - 2ax + a²) / ((1-q)(1-ab)(1-ac)(1-ad))]
        let (a, b, c, d, q) = (0.3, 0.2, 0.1, 0.05, 0.5);
        let pre = (1.0 - a * b) * (1.0 - a * c) * (1.0 - a * d) / a;
        let phi = 1.0 - 2.0 * a * 0.4 + a * a;
        let second = (1.0 - 1.0 / q) * (1.0 - a * b * c * d) * q * phi
            / ((1.0 - q) * (1.0 - a * b) * (1.0 - a * c) * (1.0 - a * d));
        let direct = pre * (1.0 + second);
        assert!((aw_polynomial(1, &p, x).unwrap().re - direct).abs() < 1e-14);
    }

    #[test]
    fn polynomial_symmetric_in_bcd() {
        let p = AWParams::new(
            C64::new(0.3, 0.1),
            C64::new(0.2, 0.0),
            C64::new(-0.15, 0.05),
            C64::new(0.05, 0.0),
            QParam::new(C64::new(0.4, 0.2)).unwrap(),
        );
        // measured against the term magnitudes: the sum cancels heavily
        for (p, tol) in [(params(), 1e-12), (p, 1e-12)] {
            let swapped = AWParams::new(p.a, p.d, p.b, p.c, p.q);
            for n in 0..6 {
                for x in grid() {
                    let (u, scale) = aw_polynomial_scaled(n, &p, x).unwrap();
                    let v = aw_polynomial(n, &swapped, x).unwrap();
                    assert!((u - v).norm() < tol * scale.max(1.0), "{n} {x} {u} {v}");
                }
            }
        }
    }

    #[test]
    fn eigenvalues() {
        let p = AWParams::real(0.5, 0.2, 1.0, 1.0, 0.5).unwrap();
        assert!((eigenvalue(1, &p) - 1.8).norm() < 1e-14);
        assert_eq!(eigenvalue(0, &params()), ZERO);
        let ls: Vec<f64> = (0..=10).map(|n| eigenvalue(n, &params()).re).collect();
        assert!(ls.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn weight_basics() {
        let p = params();
        for k in 1..50 {
            let x = -1.0 + 2.0 * k as f64 / 50.0;
            let w = aw_weight(C64::new(x, 0.0), &p, 0).unwrap();
            assert!(w.re > 0.0 && w.im.abs() < 1e-12 * w.re, "{x}: {w}");
        }
        assert_eq!(aw_weight(C64::new(1.0, 0.0), &p, 0), Err(Error::BranchDegenerate));
        let z = C64::new(1.7, 0.4);
        assert!((aw_weight_z(z, &p, 0).unwrap() + aw_weight_z(z.inv(), &p, 0).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn difference_equation() {
        let p = params();
        assert_eq!(eigen_residual(0, &p, &grid()).unwrap(), 0.0);
        for n in 1..=5 {
            let r = eigen_residual(n, &p, &grid()).unwrap();
            assert!(r < 1e-7, "n={n}: {r}");
        }
    }

    #[test]
    fn rodrigues() {
        let p = params();
        let r1 = rodrigues_residual(1, &p, &grid()).unwrap();
        assert!(r1 < 1e-7, "{r1}");
        let r2 = rodrigues_residual(2, &p, &grid()).unwrap();
        assert!(r2 < 1e-6, "{r2}");
    }

    #[test]
    fn orthogonality() {
        let p = params();
        let mut gram = [[0.0; 5]; 5];
        for m in 0..5 {
            for n in 0..5 {
                gram[m][n] = orthogonality_check(m as u32, n as u32, &p, 40).unwrap().norm();
            }
        }
        assert!(gram[0][0] > 0.0);
        for m in 0..5 {
            for n in 0..5 {
                if m != n {
                    assert!(gram[m][n] < 1e-7 * (gram[m][m] * gram[n][n]).sqrt(), "{m},{n}");
                }
            }
        }
        let bad = AWParams::real(1.2, 0.2, 0.1, 0.05, 0.5).unwrap();
        assert!(matches!(
            orthogonality_check(0, 0, &bad, 40),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn generating_functions() {
        let q = QParam::real(0.5).unwrap();
        let t = C64::new(0.3, 0.0);
        let x = C64::new(0.2, 0.0);
        let zero = ZERO;
        assert!(generating_residual(GeneratingKind::QHermite, t, zero, x, &q, 40).unwrap() < 1e-9);
        assert!(generating_residual(GeneratingKind::QUltraspherical, t, q.q(), x, &q, 40).unwrap() < 1e-9);
        let mut last = f64::INFINITY;
        for k in [2, 4, 8, 16] {
            let r = generating_residual(GeneratingKind::QHermite, t, zero, x, &q, k).unwrap();
            assert!(r < last);
            last = r;
        }
        assert!(generating_residual(GeneratingKind::QHermite, C64::new(1.5, 0.0), zero, x, &q, 4).is_err());
    }
}
