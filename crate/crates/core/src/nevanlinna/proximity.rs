use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::funcrep::{Evaluate, FunctionExpr};
use crate::qcore::C64;

/// Relative distance of a known zero or pole below which a circle is rejected.
const CONTOUR_REL_TOL: f64 = 1e-8;
const MAX_DEPTH: u32 = 40;

/// `log(f(x) - a)` without forming `f(x)` when it would overflow.
pub fn log_shifted<F: Evaluate + ?Sized>(f: &F, a: C64, x: C64) -> Result<C64> {
    let l = f.log_eval(x)?;
    if a == C64::new(0.0, 0.0) {
        return Ok(l);
    }
    if l.re - a.norm().ln() > 35.0 {
        return Ok(l + (C64::new(1.0, 0.0) - a * (-l).exp()).ln());
    }
    Ok((l.exp() - a).ln())
}

/// The function `1/(f - c)`, evaluated through logarithms.
pub struct ShiftedReciprocal<'a, F: ?Sized> {
    pub f: &'a F,
    pub c: C64,
}

impl<F: Evaluate + ?Sized> Evaluate for ShiftedReciprocal<'_, F> {
    fn eval(&self, x: C64) -> Result<C64> {
        Ok(crate::funcrep::exp_log(self.log_eval(x)?))
    }
    fn log_eval(&self, x: C64) -> Result<C64> {
        let l = log_shifted(self.f, self.c, x)?;
        if l.re == f64::NEG_INFINITY {
            return Err(Error::PoleHit { x });
        }
        Ok(-l)
    }
}

/// `m(r, f)` for a function with known zero/pole moduli `guard`.
///
/// Adaptive Simpson on `quad` equal panels; panels near a nearly singular
/// point refine locally.
pub fn proximity_of<F: Evaluate + ?Sized>(f: &F, r: f64, quad: usize, guard: &[f64]) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidParams(format!("radius must be positive, got {r}")));
    }
    if let Some(&m) = guard.iter().find(|&&m| (m - r).abs() <= CONTOUR_REL_TOL * r) {
        return Err(Error::ContourTooClose { r, modulus: m });
    }
    let g = |t: f64| -> Result<f64> {
        let l = f.log_eval(C64::from_polar(r, t))?;
        Ok(l.re.max(0.0))
    };
    let panels = quad.max(4);
    let h = 2.0 * PI / panels as f64;
    let mut total = 0.0;
    let mut left = g(0.0)?;
    for k in 0..panels {
        let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
        let right = g(b)?;
        let mid = g(0.5 * (a + b))?;
        let whole = h / 6.0 * (left + 4.0 * mid + right);
        let tol = 1e-11 * left.max(right).max(mid).max(1.0);
        total += simpson(&g, a, b, left, mid, right, whole, tol, MAX_DEPTH)?;
        left = right;
    }
    Ok(total / (2.0 * PI))
}

#[allow(clippy::too_many_arguments)]
fn simpson<G: Fn(f64) -> Result<f64>>(
    g: &G,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (g(lm)?, g(rm)?);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return Ok(left + right + diff / 15.0);
    }
    Ok(simpson(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// `m(r, f)` with the guard taken from the zero/pole ledgers of `f`.
pub fn proximity(f: &FunctionExpr, r: f64, quad: usize) -> Result<f64> {
    proximity_of(f, r, quad, &guard_moduli(f, r))
}

/// Moduli of the known zeros and poles near the circle `|x| = r`.
pub(crate) fn guard_moduli(f: &FunctionExpr, r: f64) -> Vec<f64> {
    let reach = 2.0 * r + 2.0;
    match f.as_product_form() {
        Some(p) => p.zero_pole_ledger(reach).iter().map(|e| e.modulus).collect(),
        None => f.pole_ledger(reach).iter().map(|e| e.modulus).collect(),
    }
}
