use rayon::prelude::*;
use serde::Serialize;

use super::apoints::{a_points, vanishing_order};
use super::proximity::{guard_moduli, proximity};
use super::{ExtValue, Target};
use crate::awops::aw_diff;
use crate::error::{Error, Result};
use crate::funcrep::{FunctionExpr, LatticeEvent, ProductForm};
use crate::qcore::{joukowski, lift_to_z, QParam, C64};

/// Default number of quadrature panels on a circle.
pub(crate) const QUAD: usize = 64;
/// Exponent `σ` of the exceptional-radius margin `|d| / log^σ(|d| + 3)`.
const SIGMA: i32 = 2;
/// Relative tolerance when matching a lattice neighbour in the `z`-plane.
const NEIGHBOUR_TOL: f64 = 1e-9;
/// Below this modulus an event counts as sitting at the origin.
const ORIGIN: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CharRecord {
    pub r: f64,
    pub m: f64,
    pub n_count: i64,
    #[serde(rename = "N")]
    pub big_n: f64,
    #[serde(rename = "T")]
    pub t: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AWCountRecord {
    pub r: f64,
    pub n_aw: i64,
    #[serde(rename = "N_aw")]
    pub big_n_aw: f64,
    pub classical_n: i64,
}

/// One CSV/JSON row: `r, m, n, N, T, n_aw, N_aw`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CharRow {
    pub r: f64,
    pub m: f64,
    pub n: i64,
    #[serde(rename = "N")]
    pub big_n: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub n_aw: Option<i64>,
    #[serde(rename = "N_aw")]
    pub big_n_aw: Option<f64>,
}

impl CharRow {
    pub const CSV_HEADER: &'static str = "r,m,n,N,T,n_aw,N_aw";

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.r,
            self.m,
            self.n,
            self.big_n,
            self.t,
            opt(self.n_aw.map(|v| v.to_string())),
            opt(self.big_n_aw.map(|v| v.to_string()))
        )
    }
}

/// An `a`-point with its multiplicity `h` and its AW-reduced multiplicity
/// `h - min(h, k')`.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueEvent {
    pub x: C64,
    pub modulus: f64,
    pub h: i32,
    pub reduced: i32,
}

/// All `a`-points of a function up to some radius, ready for counting at any
/// smaller radius.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueLedger {
    pub value: ExtValue,
    pub r_max: f64,
    pub events: Vec<ValueEvent>,
}

fn integrate(events: &[ValueEvent], r: f64, weight: impl Fn(&ValueEvent) -> i32) -> (i64, f64) {
    let mut n = 0i64;
    let mut big = 0.0;
    for e in events.iter().filter(|e| e.modulus < r) {
        let w = weight(e);
        n += w as i64;
        if e.modulus <= ORIGIN {
            big += w as f64 * r.ln();
        } else {
            big += w as f64 * (r / e.modulus).ln();
        }
    }
    (n, big)
}

impl ValueLedger {
    /// Classical `(n(r), N(r))`.
    pub fn classical(&self, r: f64) -> (i64, f64) {
        integrate(&self.events, r, |e| e.h)
    }

    /// `(ñ_AW(r), Ñ_AW(r))`.
    pub fn reduced(&self, r: f64) -> (i64, f64) {
        integrate(&self.events, r, |e| e.reduced)
    }

    pub fn record(&self, r: f64) -> AWCountRecord {
        let (classical_n, _) = self.classical(r);
        let (n_aw, big_n_aw) = self.reduced(r);
        AWCountRecord {
            r,
            n_aw,
            big_n_aw,
            classical_n,
        }
    }
}

/// `(n(r), N(r))` for the zeros or poles of a product form.
pub fn counting(f: &ProductForm, r: f64, target: Target) -> (i64, f64) {
    let events = signed_events(&f.zero_pole_ledger(r), target);
    let ve: Vec<ValueEvent> = events
        .into_iter()
        .map(|(x, h)| ValueEvent {
            x,
            modulus: x.norm(),
            h,
            reduced: h,
        })
        .collect();
    integrate(&ve, r, |e| e.h)
}

fn signed_events(ledger: &[LatticeEvent], target: Target) -> Vec<(C64, i32)> {
    ledger
        .iter()
        .filter_map(|e| match target {
            Target::Zero if e.multiplicity > 0 => Some((e.x, e.multiplicity)),
            Target::Pole if e.multiplicity < 0 => Some((e.x, -e.multiplicity)),
            _ => None,
        })
        .collect()
}

/// The lattice rule for `k'`: with `z` on the `|z| ≥ 1` branch, the event at
/// `z` is covered by the event at `q z` up to that event's multiplicity.
fn lattice_reduction(events: &[(C64, i32)], q: &QParam) -> Vec<ValueEvent> {
    let mut by_z: Vec<(C64, i32)> = events.iter().map(|&(x, h)| (lift_to_z(x).z, h)).collect();
    by_z.sort_by(|a, b| a.0.norm().total_cmp(&b.0.norm()));
    let find = |w: C64| -> i32 {
        let tol = NEIGHBOUR_TOL * w.norm().max(1.0);
        let lo = by_z.partition_point(|(z, _)| z.norm() < w.norm() - tol);
        by_z[lo..]
            .iter()
            .take_while(|(z, _)| z.norm() <= w.norm() + tol)
            .find(|(z, _)| (z - w).norm() <= tol)
            .map_or(0, |&(_, h)| h)
    };
    events
        .iter()
        .map(|&(x, h)| {
            let k = find(q.q() * lift_to_z(x).z).max(0);
            ValueEvent {
                x,
                modulus: x.norm(),
                h,
                reduced: h - h.min(k),
            }
        })
        .collect()
}

/// `ñ_AW`, `Ñ_AW` for the zeros or poles of a product form, by the lattice rule.
pub fn aw_counting(f: &ProductForm, r: f64, target: Target, q: &QParam) -> AWCountRecord {
    let reach = 2.0 * r + 2.0;
    let events = lattice_reduction(&signed_events(&f.zero_pole_ledger(reach), target), q);
    let ledger = ValueLedger {
        value: match target {
            Target::Zero => ExtValue::zero(),
            Target::Pole => ExtValue::Infinity,
        },
        r_max: r,
        events,
    };
    ledger.record(r)
}

/// Every `value`-point of `f` with `|x| < r_max`, each carrying its reduced
/// multiplicity.
///
/// Zeros of a product form and poles of any expression come from the exact
/// ledger and use the lattice rule. Other values are located by the argument
/// principle and `k'` is measured numerically as the vanishing order of
/// `x ↦ (D_q f)(x̂)`.
pub fn value_ledger(f: &FunctionExpr, value: ExtValue, r_max: f64, q: &QParam) -> Result<ValueLedger> {
    let reach = 2.0 * r_max + 2.0;
    let exact = match (value, f.as_product_form()) {
        (ExtValue::Infinity, _) => Some(signed_events(&f.pole_ledger(reach), Target::Pole)),
        (ExtValue::Finite(a), Some(p)) if a == C64::new(0.0, 0.0) => {
            Some(signed_events(&p.zero_pole_ledger(reach), Target::Zero))
        }
        _ => None,
    };
    let events = match (exact, value) {
        (Some(ev), _) => lattice_reduction(&ev, q),
        (None, ExtValue::Finite(a)) => {
            let pts = a_points(f, a, r_max)?;
            let hat = |y: C64| -> Result<C64> {
                let z = lift_to_z(y).z;
                aw_diff(f, joukowski(q.sqrt_q() * z), q)
            };
            pts.iter()
                .map(|p| {
                    let k = vanishing_order(&hat, p.x, p.x.norm().max(1.0))?.max(0);
                    Ok(ValueEvent {
                        x: p.x,
                        modulus: p.x.norm(),
                        h: p.multiplicity,
                        reduced: p.multiplicity - p.multiplicity.min(k),
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
        (None, ExtValue::Infinity) => unreachable!(),
    };
    Ok(ValueLedger { value, r_max, events })
}

/// `m(r, f)`, the pole counts, and `T = m + N`.
pub fn characteristic(f: &FunctionExpr, r: f64) -> Result<CharRecord> {
    let m = proximity(f, r, QUAD)?;
    let mut n_count = 0i64;
    let mut big_n = 0.0;
    for e in f.pole_ledger(r) {
        let h = -e.multiplicity as i64;
        n_count += h;
        big_n += h as f64
            * if e.modulus <= ORIGIN {
                r.ln()
            } else {
                (r / e.modulus).ln()
            };
    }
    Ok(CharRecord {
        r,
        m,
        n_count,
        big_n,
        t: m + big_n,
    })
}

/// Characteristic rows over a grid, optionally with AW counts for one value.
pub fn char_table(f: &FunctionExpr, grid: &[f64], aw: Option<(ExtValue, &QParam)>) -> Result<Vec<CharRow>> {
    let r_max = grid.iter().cloned().fold(0.0, f64::max);
    let ledger = match aw {
        Some((v, q)) => Some(value_ledger(f, v, r_max, q)?),
        None => None,
    };
    grid.par_iter()
        .map(|&r| {
            let c = characteristic(f, r)?;
            let (n_aw, big_n_aw) = match &ledger {
                Some(l) => {
                    let (n, big) = l.reduced(r);
                    (Some(n), Some(big))
                }
                None => (None, None),
            };
            Ok(CharRow {
                r,
                m: c.m,
                n: c.n_count,
                big_n: c.big_n,
                t: c.t,
                n_aw,
                big_n_aw,
            })
        })
        .collect()
}

/// Least-squares slope of `log T(r)` against `log log r`.
pub fn log_order(f: &FunctionExpr, r_grid: &[f64]) -> Result<f64> {
    check_grid(r_grid)?;
    let ts = r_grid
        .par_iter()
        .map(|&r| characteristic(f, r).map(|c| (r, c.t)))
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = ts
        .into_iter()
        .filter(|&(_, t)| t > 0.0)
        .map(|(r, t)| (r.ln().ln(), t.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Precondition("characteristic is not positive on the grid".into()));
    }
    Ok(slope(&pts))
}

pub(crate) fn check_grid(r_grid: &[f64]) -> Result<()> {
    let lo = r_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = r_grid.iter().cloned().fold(0.0, f64::max);
    if r_grid.len() < 4 {
        return Err(Error::GridTooSmall(format!("{} radii, need at least 4", r_grid.len())));
    }
    if !(lo > 1.0) {
        return Err(Error::GridTooSmall(format!("radii must exceed 1, smallest is {lo}")));
    }
    if hi / lo < 1e3 {
        return Err(Error::GridTooSmall(format!(
            "grid spans {:.2} decades, need 3",
            (hi / lo).log10()
        )));
    }
    Ok(())
}

pub(crate) fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// `n` radii equally spaced in `log r`.
pub fn geometric_grid(r_min: f64, r_max: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![r_min];
    }
    let (a, b) = (r_min.ln(), r_max.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

/// A geometric grid moved off the exceptional intervals
/// `| r - |d| | < |d| / log^σ(|d| + 3)` around every event modulus `|d|`.
/// Radii that cannot be moved within half a grid step are dropped.
pub fn admissible_grid(moduli: &[f64], r_min: f64, r_max: f64, n: usize) -> Vec<f64> {
    let base = geometric_grid(r_min, r_max, n);
    let ratio = if n > 1 {
        (r_max / r_min).powf(0.5 / (n - 1) as f64)
    } else {
        2.0
    };
    let margin = |d: f64| d / (d + 3.0).ln().powi(SIGMA);
    let excluded = |r: f64| moduli.iter().any(|&d| d > 0.0 && (r - d).abs() < margin(d));
    let mut out: Vec<f64> = Vec::new();
    for r in base {
        let pick = if !excluded(r) {
            Some(r)
        } else {
            let mut cands: Vec<f64> = moduli
                .iter()
                .filter(|&&d| d > 0.0 && d > r / (4.0 * ratio) && d < 4.0 * ratio * r)
                .flat_map(|&d| {
                    let m = margin(d) * (1.0 + 1e-6);
                    [d - m, d + m]
                })
                .filter(|&c| c > 0.0 && !excluded(c) && c / r < ratio && r / c < ratio)
                .collect();
            cands.sort_by(|a, b| (a - r).abs().total_cmp(&(b - r).abs()));
            cands.first().copied()
        };
        if let Some(p) = pick {
            if out.last().is_none_or(|&l| p > l * (1.0 + 1e-12)) {
                out.push(p);
            }
        }
    }
    out
}

/// [`admissible_grid`] around the known zeros and poles of `f`.
pub fn admissible_grid_for(f: &FunctionExpr, r_min: f64, r_max: f64, n: usize) -> Vec<f64> {
    admissible_grid(&guard_moduli(f, r_max), r_min, r_max, n)
}
