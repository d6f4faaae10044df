//! The Askey-Wilson divided difference `D_q` and the averaging operator `A_q`.
//!
//! With `f̆(z) = f((z + 1/z)/2)` and `s = q^{1/2}`,
//!
//! ```text
//! D_q f(x) = (f̆(s z) - f̆(z/s)) / ((s - 1/s)(z - 1/z)/2)
//! A_q f(x) = (f̆(s z) + f̆(z/s)) / 2
//! ```
//!
//! Both are symmetric under `z ↔ 1/z`, so the branch of the lift only matters
//! through the denominator, which vanishes at `x = ±1`.

use crate::error::{Error, Result};
use crate::funcrep::{Evaluate, FnEval};
use crate::qcore::{cpowi, joukowski, lift_to_z, qpoch_finite, QParam, C64};

/// Below this `|z - 1/z|` the divided difference is replaced by its limit.
const BRANCH_EPS: f64 = 1e-6;
/// Relative step of the central difference used at `x = ±1`.
const CENTRAL_STEP: f64 = 1e-6;

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

/// `D_q f(x)`.
pub fn aw_diff<F: Evaluate + ?Sized>(f: &F, x: C64, q: &QParam) -> Result<C64> {
    let z = lift_to_z(x).z;
    let gap = z - z.inv();
    if gap.norm() < BRANCH_EPS {
        return branch_limit(f, z, q);
    }
    let s = q.sqrt_q();
    let up = f.eval(joukowski(s * z))?;
    let down = f.eval(joukowski(z / s))?;
    Ok((up - down) / ((s - s.inv()) * gap * 0.5))
}

/// At `x = ±1` the operator equals `f'(±(s + 1/s)/2)`.
fn branch_limit<F: Evaluate + ?Sized>(f: &F, z: C64, q: &QParam) -> Result<C64> {
    let y = joukowski(q.sqrt_q() * z.re.signum());
    let h = CENTRAL_STEP * y.norm().max(1.0);
    let fp = f.eval(y + h).map_err(|_| Error::BranchDegenerate)?;
    let fm = f.eval(y - h).map_err(|_| Error::BranchDegenerate)?;
    let d = (fp - fm) / (2.0 * h);
    if d.re.is_finite() && d.im.is_finite() {
        Ok(d)
    } else {
        Err(Error::BranchDegenerate)
    }
}

/// `A_q f(x)`.
pub fn aw_avg<F: Evaluate + ?Sized>(f: &F, x: C64, q: &QParam) -> Result<C64> {
    let z = lift_to_z(x).z;
    let s = q.sqrt_q();
    Ok((f.eval(joukowski(s * z))? + f.eval(joukowski(z / s))?) * 0.5)
}

/// `D_q` acting on a function of `z` directly, without passing through `x`.
///
/// Needed for functions that are not symmetric under `z ↔ 1/z` (the
/// Askey-Wilson weight is odd), where re-lifting a shifted point would pick
/// the wrong sheet.
pub fn aw_diff_z<G>(g: &G, z: C64, q: &QParam) -> Result<C64>
where
    G: Fn(C64) -> Result<C64> + ?Sized,
{
    let s = q.sqrt_q();
    let gap = z - z.inv();
    if gap.norm() < BRANCH_EPS {
        return Err(Error::BranchDegenerate);
    }
    Ok((g(s * z)? - g(z / s)?) / ((s - s.inv()) * gap * 0.5))
}

/// `A_q` acting on a function of `z`.
pub fn aw_avg_z<G>(g: &G, z: C64, q: &QParam) -> Result<C64>
where
    G: Fn(C64) -> Result<C64> + ?Sized,
{
    let s = q.sqrt_q();
    Ok((g(s * z)? + g(z / s)?) * 0.5)
}

/// `D_q^k f(x)` by nested application, lifting afresh at every level.
pub fn aw_diff_iterate<F: Evaluate + ?Sized>(f: &F, k: usize, x: C64, q: &QParam) -> Result<C64> {
    if k == 0 {
        return f.eval(x);
    }
    let inner = FnEval(|y: C64| aw_diff_iterate(f, k - 1, y, q));
    aw_diff(&inner, x, q)
}

/// `φ_n(x; a) = (a z, a/z; q)_n = Π_{k<n} (1 - 2 a q^k x + a² q^{2k})`.
pub fn aw_basis(n: usize, a: C64, q: &QParam, x: C64) -> C64 {
    let mut p = ONE;
    let mut w = a;
    for _ in 0..n {
        p *= ONE - w * x * 2.0 + w * w;
        w *= q.q();
    }
    p
}

/// `D_q φ_n(x; a) = scalar · φ_{n-1}(x; shifted_a)`; returns `(scalar, shifted_a)`.
pub fn aw_diff_basis(n: usize, a: C64, q: &QParam) -> Result<(C64, C64)> {
    if n == 0 {
        return Err(Error::InvalidParams("basis derivative needs n >= 1".into()));
    }
    let scalar = -a * 2.0 * (ONE - q.pow(n as i64)) / (ONE - q.q());
    Ok((scalar, a * q.sqrt_q()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChebKind {
    /// `T_n`
    FirstKind,
    /// `U_n`
    SecondKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AwOp {
    Diff,
    Avg,
}

/// A finite Chebyshev series; `coeffs[n]` multiplies `T_n` or `U_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebExpansion {
    pub kind: ChebKind,
    pub coeffs: Vec<C64>,
}

impl ChebExpansion {
    fn trimmed(kind: ChebKind, mut coeffs: Vec<C64>) -> Self {
        while coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        ChebExpansion { kind, coeffs }
    }

    /// Highest degree with a nonzero coefficient, `None` for the zero series.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Clenshaw summation.
    pub fn evaluate(&self, x: C64) -> C64 {
        let (mut b1, mut b2) = (ZERO, ZERO);
        for &c in self.coeffs.iter().rev() {
            let b0 = c + x * b1 * 2.0 - b2;
            b2 = b1;
            b1 = b0;
        }
        match self.kind {
            ChebKind::FirstKind => b1 - x * b2,
            ChebKind::SecondKind => b1,
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `D_q x^k` in the `U_n` basis or `A_q x^k` in the `T_n` basis.
///
/// Coefficients come from expanding `((z + 1/z)/2)^k` binomially and pairing
/// `z^m` with `z^{-m}`; with `m = k - 2j`,
///
/// ```text
/// D_q x^k = 2^{1-k}/(s - 1/s) Σ_{j<k/2} C(k,j) (s^m - s^{-m}) U_{m-1}(x)
/// A_q x^k = 2^{-k-1} Σ_{j≤k} C(k,j) (s^m + s^{-m}) T_{|m|}(x)
/// ```
///
/// The result is compared with the numeric operator before it is returned.
pub fn cheb_expand_operator(op: AwOp, k: usize, q: &QParam) -> Result<ChebExpansion> {
    let s = q.sqrt_q();
    let scale = 0.5f64.powi(k as i32);
    let out = match op {
        AwOp::Diff => {
            let mut c = vec![ZERO; k.max(1)];
            let pre = scale * 2.0 / (s - s.inv());
            for j in 0..k.div_ceil(2) {
                let m = (k - 2 * j) as i64;
                c[(m - 1) as usize] += pre * binomial(k, j) * (cpowi(s, m) - cpowi(s, -m));
            }
            ChebExpansion::trimmed(ChebKind::SecondKind, c)
        }
        AwOp::Avg => {
            let mut c = vec![ZERO; k + 1];
            for j in 0..=k {
                let m = k as i64 - 2 * j as i64;
                c[m.unsigned_abs() as usize] += (cpowi(s, m) + cpowi(s, -m)) * binomial(k, j) * scale * 0.5;
            }
            ChebExpansion::trimmed(ChebKind::FirstKind, c)
        }
    };
    self_check(&out, op, k, q)?;
    Ok(out)
}

fn self_check(e: &ChebExpansion, op: AwOp, k: usize, q: &QParam) -> Result<()> {
    let mono = FnEval(|x: C64| Ok(cpowi(x, k as i64)));
    let samples = [
        C64::new(0.3, 0.0),
        C64::new(-0.45, 0.0),
        C64::new(0.7, 0.2),
        C64::new(1.7, 0.0),
        C64::new(-0.2, -1.1),
    ];
    let mut worst = 0.0f64;
    for x in samples {
        let num = match op {
            AwOp::Diff => aw_diff(&mono, x, q)?,
            AwOp::Avg => aw_avg(&mono, x, q)?,
        };
        let sym = e.evaluate(x);
        worst = worst.max((num - sym).norm() / num.norm().max(1.0));
    }
    if worst > 1e-10 {
        return Err(Error::SelfCheckFailed { residual: worst });
    }
    Ok(())
}

/// Interpolation point `x_k = (a q^{k/2} + q^{-k/2}/a)/2`.
pub fn interpolation_point(a: C64, k: usize, q: &QParam) -> C64 {
    let w = a * q.half_pow(k as i64);
    (w + w.inv()) * 0.5
}

/// Coefficients `f_0..f_K` of the expansion `f = Σ f_k φ_k(x; a)`:
///
/// `f_k = (q-1)^k / ((2a)^k (q;q)_k) · q^{-k(k-1)/4} · (D_q^k f)(x_k)`.
pub fn aw_taylor<F: Evaluate + ?Sized>(f: &F, a: C64, order: usize, q: &QParam) -> Result<Vec<C64>> {
    if a == ZERO {
        return Err(Error::DegenerateGenerator);
    }
    (0..=order)
        .map(|k| {
            let d = aw_diff_iterate(f, k, interpolation_point(a, k, q), q)?;
            let ki = k as i64;
            let pre = cpowi(q.q() - 1.0, ki) / (cpowi(a * 2.0, ki) * qpoch_finite(q.q(), q, k))
                * q.half_pow(-(ki * (ki - 1) / 2));
            Ok(pre * d)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcrep::{FunctionExpr, ProductForm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn q(v: f64) -> QParam {
        QParam::real(v).unwrap()
    }

    fn random_points(n: usize, seed: u64) -> Vec<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-2.0..2.0)))
            .collect()
    }

    #[test]
    fn constants_and_identity() {
        let q = q(0.4);
        let k = FunctionExpr::constant(c(2.5));
        let id = FunctionExpr::polynomial(vec![c(0.0), c(1.0)]);
        for x in [c(0.3), C64::new(2.0, 1.0), c(-4.0)] {
            assert!(aw_diff(&k, x, &q).unwrap().norm() < 1e-14);
            assert!((aw_diff(&id, x, &q).unwrap() - 1.0).norm() < 1e-13);
            assert!((aw_avg(&k, x, &q).unwrap() - 2.5).norm() < 1e-14);
            let expect = (q.sqrt_q() + q.sqrt_q().inv()) * 0.5 * x;
            assert!((aw_avg(&id, x, &q).unwrap() - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn square_maps_to_scaled_identity() {
        let q = q(0.3);
        let sq = FunctionExpr::polynomial(vec![c(0.0), c(0.0), c(1.0)]);
        for x in random_points(10, 1) {
            let expect = (q.sqrt_q() + q.sqrt_q().inv()) * x;
            assert!((aw_diff(&sq, x, &q).unwrap() - expect).norm() < 1e-11 * expect.norm().max(1.0));
        }
    }

    #[test]
    fn branch_points_use_the_derivative_limit() {
        let q = q(0.5);
        let cube = FunctionExpr::polynomial(vec![c(0.0), c(0.0), c(0.0), c(1.0)]);
        let y = (q.sqrt_q() + q.sqrt_q().inv()) * 0.5;
        for sign in [1.0, -1.0] {
            let v = aw_diff(&cube, c(sign), &q).unwrap();
            assert!((v - y * y * 3.0).norm() < 1e-8, "{v}");
            // continuity with the generic formula close to the branch point
            let near = aw_diff(&cube, c(sign * (1.0 - 1e-4)), &q).unwrap();
            assert!((v - near).norm() < 1e-3);
        }
    }

    #[test]
    fn symmetric_under_inversion() {
        let q = q(0.35);
        let f = ProductForm::phi_inf(c(0.6), q.q(), 1).unwrap();
        for z in [C64::new(1.5, 0.5), C64::new(-0.3, 2.0)] {
            let g = |z: C64| f.eval(joukowski(z));
            let direct = aw_diff_z(&g, z, &q).unwrap();
            let flipped = aw_diff_z(&g, z.inv(), &q).unwrap();
            assert!((direct - flipped).norm() < 1e-10 * direct.norm().max(1.0));
            let from_x = aw_diff(&f, joukowski(z), &q).unwrap();
            assert!((direct - from_x).norm() < 1e-10 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn basis_scalar_example() {
        let (scalar, shifted) = aw_diff_basis(1, c(0.4), &q(0.25)).unwrap();
        assert!((scalar - c(-0.8)).norm() < 1e-15);
        assert!((shifted - c(0.2)).norm() < 1e-15);
        assert!(aw_diff_basis(0, c(0.4), &q(0.25)).is_err());
    }

    #[test]
    fn basis_rule_numerically() {
        let q = q(0.5);
        let a = c(0.4);
        let phi2 = FnEval(|x: C64| Ok(aw_basis(2, a, &q, x)));
        let (scalar, shifted) = aw_diff_basis(2, a, &q).unwrap();
        for x in random_points(20, 2) {
            let lhs = aw_diff(&phi2, x, &q).unwrap();
            let rhs = scalar * aw_basis(1, shifted, &q, x);
            assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn infinite_basis_limit() {
        let q = q(0.5);
        let a = c(0.4);
        let f = ProductForm::phi_inf(a, q.q(), 1).unwrap();
        let g = ProductForm::phi_inf(a * q.sqrt_q(), q.q(), 1).unwrap();
        let scalar = -a * 2.0 / (1.0 - q.q());
        for x in random_points(20, 3) {
            let lhs = aw_diff(&f, x, &q).unwrap();
            let rhs = scalar * g.eval(x).unwrap();
            assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn chebyshev_expansions() {
        let q = q(0.5);
        assert_eq!(cheb_expand_operator(AwOp::Diff, 0, &q).unwrap().degree(), None);
        let d1 = cheb_expand_operator(AwOp::Diff, 1, &q).unwrap();
        assert_eq!(d1.coeffs.len(), 1);
        assert!((d1.coeffs[0] - 1.0).norm() < 1e-14);
        let qc = QParam::new(C64::new(0.3, 0.2)).unwrap();
        for k in 0..12 {
            for qq in [&q, &qc] {
                let d = cheb_expand_operator(AwOp::Diff, k, qq).unwrap();
                let a = cheb_expand_operator(AwOp::Avg, k, qq).unwrap();
                assert_eq!(d.degree(), k.checked_sub(1));
                assert_eq!(a.degree(), Some(k));
            }
        }
    }

    #[test]
    fn clenshaw_matches_trig_definition() {
        let t = 0.7f64;
        let x = c(t.cos());
        let e = ChebExpansion {
            kind: ChebKind::FirstKind,
            coeffs: vec![c(0.0), c(0.0), c(0.0), c(1.0)],
        };
        assert!((e.evaluate(x).re - (3.0 * t).cos()).abs() < 1e-14);
        let u = ChebExpansion {
            kind: ChebKind::SecondKind,
            coeffs: vec![c(0.0), c(0.0), c(1.0)],
        };
        assert!((u.evaluate(x).re - (3.0 * t).sin() / t.sin()).abs() < 1e-14);
    }

    #[test]
    fn iterate_and_degree_reduction() {
        let q = q(0.45);
        let p = FunctionExpr::polynomial(vec![c(1.0), c(-2.0), c(0.5), c(3.0)]);
        for x in random_points(5, 4) {
            assert_eq!(aw_diff_iterate(&p, 1, x, &q).unwrap(), aw_diff(&p, x, &q).unwrap());
            assert!(aw_diff_iterate(&p, 4, x, &q).unwrap().norm() < 1e-9);
        }
        let a = c(0.3);
        let phi3 = FnEval(|x: C64| Ok(aw_basis(3, a, &q, x)));
        let v1 = aw_diff_iterate(&phi3, 3, c(0.2), &q).unwrap();
        let v2 = aw_diff_iterate(&phi3, 3, C64::new(2.5, -1.0), &q).unwrap();
        assert!((v1 - v2).norm() < 1e-9 * v1.norm());
    }

    #[test]
    fn taylor_coefficients() {
        let q = q(0.5);
        let a = c(0.7);
        let k = FunctionExpr::constant(c(4.0));
        let co = aw_taylor(&k, a, 3, &q).unwrap();
        assert!((co[0] - 4.0).norm() < 1e-14);
        assert!(co[1..].iter().all(|v| v.norm() < 1e-12));

        let phi2 = FnEval(|x: C64| Ok(aw_basis(2, a, &q, x)));
        let co = aw_taylor(&phi2, a, 4, &q).unwrap();
        for (i, v) in co.iter().enumerate() {
            let expect = if i == 2 { 1.0 } else { 0.0 };
            assert!((v - expect).norm() < 1e-9, "k={i}: {v}");
        }

        let p = FunctionExpr::polynomial(vec![c(0.5), c(-1.0), c(2.0), c(0.25)]);
        let co = aw_taylor(&p, a, 3, &q).unwrap();
        for x in random_points(20, 5) {
            let recon: C64 = co.iter().enumerate().map(|(k, ck)| ck * aw_basis(k, a, &q, x)).sum();
            let direct = p.eval(x).unwrap();
            assert!((recon - direct).norm() < 1e-9 * direct.norm().max(1.0));
        }
        assert_eq!(aw_taylor(&p, c(0.0), 2, &q), Err(Error::DegenerateGenerator));
    }

    #[test]
    fn classical_limit() {
        let eps = 1e-4;
        let q = q(1.0 - eps);
        let cube = FunctionExpr::polynomial(vec![c(0.0), c(0.0), c(0.0), c(1.0)]);
        for x in random_points(10, 6) {
            let v = aw_diff(&cube, x, &q).unwrap();
            let d = x * x * 3.0;
            assert!((v - d).norm() < 10.0 * eps * d.norm().max(1.0));
        }
    }
}
