//! Large-`x` behaviour of `log|(a z, a/z; q)∞|` and the proximity of the
//! shifted-weight ratio `ω̃/ω`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcrep::{FunctionExpr, ProductFactor, ProductForm};
use crate::nevanlinna::proximity;
use crate::qcore::{cpowi, lift_to_z, log_qpoch_infinite_base, QParam, TruncationPolicy, C64};

/// `|a z| = |q|^{3/2 - τ - ν}` with `ν ≥ 1` and `τ ∈ [0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NuTau {
    pub nu: i64,
    pub tau: f64,
}

impl NuTau {
    /// `|a z|` rebuilt from `(ν, τ)`.
    pub fn modulus(&self, q: &QParam) -> f64 {
        q.abs_q().powf(1.5 - self.tau - self.nu as f64)
    }
}

pub fn nu_tau(a: C64, z: C64, q: &QParam) -> Result<NuTau> {
    if a == C64::new(0.0, 0.0) {
        return Err(Error::DegenerateGenerator);
    }
    let s = q.abs_q().sqrt();
    let bound = (a.norm() / s).max(s / a.norm());
    if !(z.norm() > bound) {
        return Err(Error::OutOfRange(format!("|z| = {} must exceed {bound}", z.norm())));
    }
    let t = 1.5 - (a * z).norm().ln() / q.abs_q().ln();
    let mut nu = t.floor();
    let mut tau = t - nu;
    // snap rounding noise at lattice moduli onto τ = 0
    if 1.0 - tau < 1e-12 {
        nu += 1.0;
        tau = 0.0;
    }
    if nu < 1.0 {
        return Err(Error::OutOfRange(format!("ν = {nu} is not positive")));
    }
    Ok(NuTau { nu: nu as i64, tau })
}

/// `(log|az|)²/(-2 log|q|) + ½ log|az| + log|1 - a q^{ν-1} z|`.
pub fn asym_log_modulus(a: C64, x: C64, q: &QParam) -> Result<f64> {
    let z = lift_to_z(x).z;
    let nt = nu_tau(a, z, q)?;
    let l = (a * z).norm().ln();
    let near = (C64::new(1.0, 0.0) - a * cpowi(q.q(), nt.nu - 1) * z).norm().ln();
    Ok(l * l / (-2.0 * q.abs_q().ln()) + 0.5 * l + near)
}

/// `3 |q|^{1/2} / ((1 - |q|^{1/2})(1 - |q|))`.
pub fn asym_error_bound(q: &QParam) -> f64 {
    let s = q.abs_q().sqrt();
    3.0 * s / ((1.0 - s) * (1.0 - q.abs_q()))
}

/// `log|(a z, a/z; q)∞|` evaluated directly.
pub fn log_modulus_exact(a: C64, x: C64, q: &QParam) -> Result<f64> {
    let z = lift_to_z(x).z;
    let pol = TruncationPolicy::default();
    Ok(log_qpoch_infinite_base(a * z, q.q(), &pol)?.re + log_qpoch_infinite_base(a / z, q.q(), &pol)?.re)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymRow {
    #[serde(with = "crate::funcrep::cplx")]
    pub x: C64,
    pub exact: f64,
    pub asymptotic: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymReport {
    pub rows: Vec<AsymRow>,
    pub max_error: f64,
    pub bound: f64,
    pub violations: usize,
}

/// `n` deterministic sample points with `10 < |x| < 10⁶`, spread log-uniformly
/// in modulus and uniformly in argument.
pub fn asym_samples(n: usize) -> Vec<C64> {
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let silver = 2f64.sqrt() - 1.0;
    (1..=n)
        .map(|k| {
            let u = (k as f64 * golden).fract();
            let v = (k as f64 * silver).fract();
            C64::from_polar(10f64.powf(1.0 + 5.0 * u), std::f64::consts::TAU * v)
        })
        .collect()
}

/// Compares the exact log-modulus with the asymptotic formula on the samples.
pub fn asym_check(a: C64, q: &QParam, samples: &[C64]) -> Result<AsymReport> {
    let bound = asym_error_bound(q);
    let rows = samples
        .par_iter()
        .map(|&x| {
            let exact = log_modulus_exact(a, x, q)?;
            let asymptotic = asym_log_modulus(a, x, q)?;
            Ok(AsymRow {
                x,
                exact,
                asymptotic,
                error: (exact - asymptotic).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_error = rows.iter().map(|r| r.error).fold(0.0, f64::max);
    let violations = rows.iter().filter(|r| !(r.error <= bound)).count();
    Ok(AsymReport {
        rows,
        max_error,
        bound,
        violations,
    })
}

/// `ω̃/ω` for parameters `(a, b, c, d)`: the four ratios
/// `(p q^{1/2} z, p q^{1/2}/z; q)∞ / (p z, p/z; q)∞`. The `(z², z⁻²; q)∞` and
/// `sin θ` parts cancel and never enter.
pub fn weight_ratio(params: [C64; 4], q: &QParam) -> Result<ProductForm> {
    let mut factors = Vec::with_capacity(8);
    for p in params {
        factors.push(ProductFactor::new(p * q.sqrt_q(), q.q(), 1)?);
        factors.push(ProductFactor::new(p, q.q(), -1)?);
    }
    Ok(ProductForm::from_factors(C64::new(1.0, 0.0), factors).normalized())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightRatioReport {
    pub r: Vec<f64>,
    pub m: Vec<f64>,
    /// Least-squares slope of `m` against `log r` through the origin.
    pub ratio: f64,
}

/// `m(r, ω̃/ω)` over the grid together with its fitted ratio to `log r`.
pub fn weight_ratio_proximity(params: [C64; 4], q: &QParam, r_grid: &[f64], quad: usize) -> Result<WeightRatioReport> {
    let f = FunctionExpr::single(weight_ratio(params, q)?);
    let m = r_grid
        .par_iter()
        .map(|&r| proximity(&f, r, quad))
        .collect::<Result<Vec<_>>>()?;
    let (num, den) = r_grid
        .iter()
        .zip(&m)
        .fold((0.0, 0.0), |(n, d), (&r, &mv)| (n + mv * r.ln(), d + r.ln() * r.ln()));
    Ok(WeightRatioReport {
        r: r_grid.to_vec(),
        m,
        ratio: if den > 0.0 { num / den } else { 0.0 },
    })
}
