//! Functions annihilated by `D_q`, the solver for linear combinations of
//! kernel products, and Jacobi theta functions with their classical identities.
//!
//! Write `P_a(x) = φ∞(x; a) φ∞(x; q/a)`. In the `z`-plane `P_a(q z) = P_a(z) / (q z²)`
//! for every `a`, so ratios of equally many `P` factors are `D_q`-constants, and
//! a sum of products of `m` factors each is again determined by its `2m` zeros
//! in a fundamental annulus.

use serde::Serialize;

use crate::awops::aw_diff;
use crate::error::{Error, Result};
use crate::funcrep::{Evaluate, FunctionExpr, ProductFactor, ProductForm, Term};
use crate::nevanlinna::apoints::locate_annulus;
use crate::qcore::{cpowi, joukowski, qpoch_infinite_base, QParam, TruncationPolicy, C64};

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);
/// Verification threshold for [`kernel_solve`].
pub const SOLVE_TOL: f64 = 1e-7;

/// `P_a = φ∞(x; a) φ∞(x; q/a)` as factors.
fn pair_factors(a: C64, q: &QParam) -> Result<[ProductFactor; 2]> {
    if a == ZERO {
        return Err(Error::DegenerateGenerator);
    }
    Ok([
        ProductFactor::new(a, q.q(), 1)?,
        ProductFactor::new(q.q() / a, q.q(), 1)?,
    ])
}

/// `f_{a,b} = P_a / P_b`.
pub fn make_fab(a: C64, b: C64, q: &QParam) -> Result<ProductForm> {
    let mut factors = pair_factors(a, q)?.to_vec();
    factors.extend(pair_factors(b, q)?.into_iter().map(|f| ProductFactor { m: -f.m, ..f }));
    Ok(ProductForm::from_factors(ONE, factors).normalized())
}

/// `max |D_q f(x)| / max(1, |f(x)|)` over the grid.
pub fn kernel_residual<F: Evaluate + ?Sized>(f: &F, grid: &[C64], q: &QParam) -> Result<f64> {
    let mut worst = 0.0f64;
    for &x in grid {
        let d = aw_diff(f, x, q)?;
        worst = worst.max(d.norm() / f.eval(x)?.norm().max(1.0));
    }
    Ok(worst)
}

/// Whether `f` is numerically a `D_q`-constant on the grid.
pub fn kernel_member<F: Evaluate + ?Sized>(f: &F, grid: &[C64], tol: f64, q: &QParam) -> Result<bool> {
    Ok(kernel_residual(f, grid, q)? < tol)
}

/// `coefficient · Π_i P_{a_i}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelTermSpec {
    #[serde(with = "crate::funcrep::cplx")]
    pub coefficient: C64,
    #[serde(with = "crate::funcrep::cplx::vec")]
    pub generators: Vec<C64>,
}

/// `Σ_j C_j Π_i P_{a_ij} = C Π_i P_{c_i}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelSolution {
    #[serde(with = "crate::funcrep::cplx::vec")]
    pub c_generators: Vec<C64>,
    #[serde(rename = "C", with = "crate::funcrep::cplx")]
    pub c: C64,
    pub residual: f64,
}

fn kernel_product(coefficient: C64, generators: &[C64], q: &QParam) -> Result<ProductForm> {
    let mut factors = Vec::with_capacity(2 * generators.len());
    for &a in generators {
        factors.extend(pair_factors(a, q)?);
    }
    Ok(ProductForm::from_factors(coefficient, factors).normalized())
}

/// The left-hand side `Σ_j C_j Π_i P_{a_ij}` as an expression.
pub fn kernel_lhs(terms: &[KernelTermSpec], q: &QParam) -> Result<FunctionExpr> {
    let terms = terms
        .iter()
        .map(|t| {
            Ok(Term {
                coefficient: ONE,
                form: kernel_product(t.coefficient, &t.generators, q)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FunctionExpr { terms })
}

/// Nearest integer `k` with `w ≈ q^k`, if any.
fn q_power(w: C64, q: &QParam) -> Option<i64> {
    let k = (w.norm().ln() / q.abs_q().ln()).round() as i64;
    ((w / cpowi(q.q(), k) - 1.0).norm() < 1e-6).then_some(k)
}

/// Whether `c` and `d` generate the same `P` up to a constant, i.e.
/// `d ∈ c q^ℤ ∪ c^{-1} q^ℤ`.
pub fn same_kernel_class(c: C64, d: C64, q: &QParam) -> bool {
    q_power(d / c, q).is_some() || q_power(d * c, q).is_some()
}

/// Representative of `c q^ℤ` with `|q| < |c| ≤ 1`.
fn reduce(c: C64, q: &QParam) -> C64 {
    let k = (c.norm().ln() / q.abs_q().ln()).floor() as i64;
    let mut r = c / cpowi(q.q(), k);
    if r.norm() <= q.abs_q() {
        r /= q.q();
    }
    r
}

/// Finds `c_1..c_m` and `C` with `Σ_j C_j Π_i P_{a_ij} = C Π_i P_{c_i}`.
///
/// The left side, as a function of `z`, picks up the same factor `(q z²)^{-m}`
/// under `z → q z` as each product, so its zeros fill `2m` classes `c q^ℤ`,
/// closed under `c → 1/c`. They are found once in an annulus `ρ ≤ |z| < ρ/|q|`
/// and paired by `z_i z_j ∈ q^ℤ`.
pub fn kernel_solve(terms: &[KernelTermSpec], q: &QParam) -> Result<KernelSolution> {
    let m = match terms.first() {
        Some(t) => t.generators.len(),
        None => return Err(Error::InvalidParams("kernel_solve needs at least one term".into())),
    };
    if m == 0 || terms.iter().any(|t| t.generators.len() != m) {
        return Err(Error::InvalidParams(
            "all terms need the same positive number of generators".into(),
        ));
    }
    let lhs = kernel_lhs(terms, q)?;
    let in_z = LogZ(&lhs);

    let mut roots = None;
    let mut last_err = Error::RootNotFound("no admissible annulus".into());
    for t in [0.37, 0.13, 0.61, 0.83, 0.05] {
        let rho = q.abs_q().powf(-t);
        match locate_annulus(&in_z, ZERO, rho, rho / q.abs_q(), 64) {
            Ok((count, pts)) if count == 2 * m as i64 => {
                roots = Some(pts);
                break;
            }
            Ok((0, _)) => {
                return Err(Error::InvalidParams(
                    "left-hand side vanishes identically or has no zeros".into(),
                ))
            }
            Ok((count, _)) => {
                last_err = Error::RootNotFound(format!("expected {} zeros in the annulus, found {count}", 2 * m))
            }
            Err(e) => last_err = e,
        }
    }
    let roots = roots.ok_or(last_err)?;
    let mut pool: Vec<C64> = roots
        .iter()
        .flat_map(|p| std::iter::repeat_n(p.x, p.multiplicity.max(0) as usize))
        .collect();
    let mut gens = Vec::with_capacity(m);
    while let Some(z) = pool.pop() {
        let (j, k) = pool
            .iter()
            .enumerate()
            .find_map(|(j, &w)| q_power(z * w, q).map(|k| (j, k)))
            .ok_or_else(|| Error::RootNotFound(format!("zero {z} has no partner in q^Z / z")))?;
        let w = pool.swap_remove(j);
        // z w = q^k exactly; averaging the two estimates sharpens double roots
        let sharp = (z * cpowi(q.q(), k) / w).sqrt();
        let sharp = if (sharp - z).norm() <= (sharp + z).norm() {
            sharp
        } else {
            -sharp
        };
        gens.push(reduce(sharp, q));
    }
    if gens.len() != m {
        return Err(Error::RootNotFound(format!(
            "paired {} classes, expected {m}",
            gens.len()
        )));
    }

    let rhs = kernel_product(ONE, &gens, q)?;
    let probe = C64::from_polar(1.5 * (q.abs_q() + q.abs_q().recip()), 0.3);
    let c = lhs.eval(probe)? / rhs.eval(probe)?;
    let residual = verify(&lhs, terms, &rhs, c, q)?;
    if residual > SOLVE_TOL {
        return Err(Error::VerificationFailed { residual });
    }
    Ok(KernelSolution {
        c_generators: gens,
        c,
        residual,
    })
}

fn verify(lhs: &FunctionExpr, terms: &[KernelTermSpec], rhs: &ProductForm, c: C64, q: &QParam) -> Result<f64> {
    let parts = terms
        .iter()
        .map(|t| kernel_product(t.coefficient, &t.generators, q))
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for k in 0..60 {
        let x = C64::from_polar(0.4 + 0.35 * k as f64, 0.7 + 2.39 * k as f64);
        let scale: f64 = parts.iter().map(|p| p.eval(x).map(|v| v.norm())).sum::<Result<f64>>()?;
        let d = lhs.eval(x)? - c * rhs.eval(x)?;
        worst = worst.max(d.norm() / scale.max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// `z ↦ L((z + 1/z)/2)` through the expression's logarithm.
struct LogZ<'a>(&'a FunctionExpr);

impl Evaluate for LogZ<'_> {
    fn eval(&self, z: C64) -> Result<C64> {
        self.0.eval(joukowski(z))
    }
    fn log_eval(&self, z: C64) -> Result<C64> {
        self.0.log_eval(joukowski(z))
    }
}

// ---------------------------------------------------------------------------
// theta functions

/// Jacobi theta function `ϑ_j(w)` with nome `q` (Whittaker-Watson convention):
///
/// ```text
/// ϑ₁ = 2 q^{1/4} sin w (q²;q²)∞ (q² e^{2iw}, q² e^{-2iw}; q²)∞
/// ϑ₂ = 2 q^{1/4} cos w (q²;q²)∞ (-q² e^{2iw}, -q² e^{-2iw}; q²)∞
/// ϑ₃ = (q²;q²)∞ (-q e^{2iw}, -q e^{-2iw}; q²)∞
/// ϑ₄ = (q²;q²)∞ (q e^{2iw}, q e^{-2iw}; q²)∞
/// ```
pub fn theta(j: u8, w: C64, q: &QParam) -> Result<C64> {
    let pol = TruncationPolicy::default();
    let q2 = q.q() * q.q();
    let z = (C64::new(0.0, 2.0) * w).exp();
    let pair =
        |a: C64| -> Result<C64> { Ok(qpoch_infinite_base(a * z, q2, &pol)? * qpoch_infinite_base(a / z, q2, &pol)?) };
    let euler = qpoch_infinite_base(q2, q2, &pol)?;
    let quarter = q.sqrt_q().sqrt();
    match j {
        1 => Ok(quarter * 2.0 * w.sin() * euler * pair(q2)?),
        2 => Ok(quarter * 2.0 * w.cos() * euler * pair(-q2)?),
        3 => Ok(euler * pair(-q.q())?),
        4 => Ok(euler * pair(q.q())?),
        _ => Err(Error::InvalidParams(format!("theta index must be 1..4, got {j}"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Identity {
    /// `(q;q)∞ (q^{1/2} z, q^{1/2}/z; q)∞ = Σ (-1)^k q^{k²/2} z^k`.
    TripleProduct,
    /// `ϑ₄² ϑ₄²(w) + ϑ₂² ϑ₂²(w) = ϑ₃² ϑ₃²(w)`.
    SquareSum,
    /// `ϑ₃(w+y) ϑ₃(w-y) ϑ₃² = ϑ₃²(y) ϑ₃²(w) + ϑ₁²(y) ϑ₁²(w)`.
    Addition,
}

/// Largest relative residual of the identity over the samples.
///
/// For the triple product the samples are values of `z`; for the theta
/// identities they are arguments `w`, and the addition formula pairs each
/// sample with the next one (cyclically) as `(w, y)`.
pub fn verify_identity(id: Identity, q: &QParam, samples: &[C64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (i, &w) in samples.iter().enumerate() {
        let res = match id {
            Identity::TripleProduct => triple_product_residual(w, q)?,
            Identity::SquareSum => {
                let t = |j: u8, v: C64| theta(j, v, q);
                let z0 = ZERO;
                let a = (t(4, z0)? * t(4, w)?).powi(2);
                let b = (t(2, z0)? * t(2, w)?).powi(2);
                let c = (t(3, z0)? * t(3, w)?).powi(2);
                (a + b - c).norm() / (a.norm() + b.norm() + c.norm())
            }
            Identity::Addition => {
                let y = samples[(i + 1) % samples.len()];
                addition_residual(w, y, 3, q)?
            }
        };
        worst = worst.max(res);
    }
    Ok(worst)
}

/// Residual of `ϑ₃(w+y) ϑ₃(w-y) ϑ_j(0)² = ϑ₃²(y) ϑ₃²(w) + ϑ₁²(y) ϑ₁²(w)`.
/// The identity holds for `j = 3`; `j = 2` gives a visibly nonzero residual.
pub fn addition_residual(w: C64, y: C64, j: u8, q: &QParam) -> Result<f64> {
    let t = |k: u8, v: C64| theta(k, v, q);
    let lhs = t(3, w + y)? * t(3, w - y)? * t(j, ZERO)?.powi(2);
    let a = (t(3, y)? * t(3, w)?).powi(2);
    let b = (t(1, y)? * t(1, w)?).powi(2);
    Ok((lhs - a - b).norm() / (lhs.norm() + a.norm() + b.norm()))
}

fn triple_product_residual(z: C64, q: &QParam) -> Result<f64> {
    let pol = TruncationPolicy::default();
    let s = q.sqrt_q();
    let prod = qpoch_infinite_base(q.q(), q.q(), &pol)?
        * qpoch_infinite_base(s * z, q.q(), &pol)?
        * qpoch_infinite_base(s / z, q.q(), &pol)?;
    let (mut sum, mut scale) = (ZERO, 0.0);
    for k in 0i64.. {
        let mut done = k > 0;
        for kk in if k == 0 { vec![0] } else { vec![k, -k] } {
            let term = cpowi(s, kk * kk) * cpowi(-z, kk);
            sum += term;
            scale += term.norm();
            done &= term.norm() < 1e-18 * scale;
        }
        if done || k > 10_000 {
            break;
        }
    }
    Ok((prod - sum).norm() / scale)
}
