use rayon::prelude::*;
use serde::Serialize;

use super::apoints::a_points;
use super::counting::{characteristic, check_grid, slope, value_ledger, QUAD};
use super::proximity::{guard_moduli, proximity_of, ShiftedReciprocal};
use super::ExtValue;
use crate::awops::aw_diff;
use crate::error::{Error, Result};
use crate::funcrep::{Evaluate, FunctionExpr};
use crate::qcore::{QParam, C64};

/// Exponent surplus `ε` in the second-main-theorem slack `(log r)^{1+ε} + log r`.
const SLACK_EPS: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeficiencyReport {
    pub value: ExtValue,
    pub delta: f64,
    pub vartheta_aw: f64,
    pub theta_aw: f64,
    pub r_used: Vec<f64>,
}

fn top_decade(grid: &[f64]) -> Vec<f64> {
    let hi = grid.iter().cloned().fold(0.0, f64::max);
    grid.iter().cloned().filter(|&r| r >= hi / 10.0).collect()
}

fn characteristics(f: &FunctionExpr, grid: &[f64]) -> Result<Vec<f64>> {
    grid.par_iter().map(|&r| characteristic(f, r).map(|c| c.t)).collect()
}

/// `δ(a)`, `ϑ_AW(a)` and `Θ_AW(a)` for each value, with the limits replaced by
/// the extreme ratio over the top decade of the grid. Also returns `Σ Θ_AW`.
pub fn deficiencies(
    f: &FunctionExpr,
    r_grid: &[f64],
    values: &[ExtValue],
    q: &QParam,
) -> Result<(Vec<DeficiencyReport>, f64)> {
    check_grid(r_grid)?;
    let used = top_decade(r_grid);
    let r_max = used.iter().cloned().fold(0.0, f64::max);
    let ts = characteristics(f, &used)?;
    let mut reports = Vec::with_capacity(values.len());
    for &v in values {
        let ledger = value_ledger(f, v, r_max, q)?;
        let (mut sup_n, mut inf_gap, mut sup_aw) = (f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (&r, &t) in used.iter().zip(&ts) {
            let (_, big_n) = ledger.classical(r);
            let (_, big_aw) = ledger.reduced(r);
            sup_n = sup_n.max(big_n / t);
            inf_gap = inf_gap.min((big_n - big_aw) / t);
            sup_aw = sup_aw.max(big_aw / t);
        }
        reports.push(DeficiencyReport {
            value: v,
            delta: (1.0 - sup_n).clamp(0.0, 1.0),
            vartheta_aw: inf_gap.clamp(0.0, 1.0),
            theta_aw: (1.0 - sup_aw).clamp(0.0, 1.0),
            r_used: used.clone(),
        });
    }
    let sum = reports.iter().map(|d| d.theta_aw).sum();
    Ok((reports, sum))
}

/// `T(r, 1/(f - c)) - T(r, f)` over the grid; the first main theorem keeps
/// the spread of these differences below `2 (log⁺|c| + log 2)`.
pub fn first_main_drift(f: &FunctionExpr, c: C64, r_grid: &[f64]) -> Result<Vec<f64>> {
    let r_max = r_grid.iter().cloned().fold(0.0, f64::max);
    let pts = a_points(f, c, r_max)?;
    let mut guard = guard_moduli(f, r_max);
    guard.extend(pts.iter().map(|p| p.x.norm()));
    let inv = ShiftedReciprocal { f, c };
    r_grid
        .par_iter()
        .map(|&r| {
            let base = characteristic(f, r)?;
            let m = proximity_of(&inv, r, QUAD, &guard)?;
            let n: f64 = pts
                .iter()
                .filter(|p| p.x.norm() < r)
                .map(|p| {
                    p.multiplicity as f64
                        * if p.x.norm() == 0.0 {
                            r.ln()
                        } else {
                            (r / p.x.norm()).ln()
                        }
                })
                .sum();
            Ok(m + n - base.t)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SecondMainRow {
    pub r: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    /// `lhs - rhs - slack`; the inequality holds where this is `≤ 0`.
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SecondMainTable {
    pub rows: Vec<SecondMainRow>,
    /// Whether the inequality holds at every radius of the top decade.
    pub holds: bool,
}

/// Fails when `D_q f` vanishes (numerically) on a fixed probe set.
fn require_nonconstant(f: &FunctionExpr, q: &QParam) -> Result<()> {
    let probes = [
        C64::new(0.31, 0.17),
        C64::new(1.7, -0.4),
        C64::new(-2.3, 1.1),
        C64::new(4.9, 3.3),
        C64::new(-0.6, -2.8),
        C64::new(11.3, -6.1),
    ];
    let mut worst = 0.0f64;
    for x in probes {
        let (Ok(d), Ok(v)) = (aw_diff(f, x, q), f.eval(x)) else {
            continue;
        };
        worst = worst.max(d.norm() / v.norm().max(1.0));
    }
    if worst < 1e-9 {
        return Err(Error::Precondition(
            "D_q f vanishes on the probe set (f is in the kernel)".into(),
        ));
    }
    Ok(())
}

/// Tabulates `(p - 1) T(r, f)` against `Ñ_AW(r, f) + Σ Ñ_AW(r, 1/(f - a_ν)) + slack`
/// for the finite values among `values`; the pole term is always included.
pub fn second_main_check(f: &FunctionExpr, values: &[ExtValue], r_grid: &[f64], q: &QParam) -> Result<SecondMainTable> {
    let finite: Vec<C64> = values
        .iter()
        .filter_map(|v| match v {
            ExtValue::Finite(c) => Some(*c),
            ExtValue::Infinity => None,
        })
        .collect();
    for (i, a) in finite.iter().enumerate() {
        if finite[..i].iter().any(|b| b == a) {
            return Err(Error::InvalidParams(format!("value {a} listed twice")));
        }
    }
    if values.len() < 2 || finite.is_empty() {
        return Err(Error::InvalidParams(
            "need at least two distinct values, one finite".into(),
        ));
    }
    require_nonconstant(f, q)?;
    check_grid(r_grid)?;
    let r_max = r_grid.iter().cloned().fold(0.0, f64::max);
    let mut ledgers = vec![value_ledger(f, ExtValue::Infinity, r_max, q)?];
    for &a in &finite {
        ledgers.push(value_ledger(f, ExtValue::Finite(a), r_max, q)?);
    }
    let ts = characteristics(f, r_grid)?;
    let p = finite.len() as f64;
    let rows: Vec<SecondMainRow> = r_grid
        .iter()
        .zip(ts)
        .map(|(&r, t)| {
            let lhs = (p - 1.0) * t;
            let rhs: f64 = ledgers.iter().map(|l| l.reduced(r).1).sum();
            let lr = r.ln();
            let slack = lr.max(0.0).powf(1.0 + SLACK_EPS) + lr;
            SecondMainRow {
                r,
                t,
                lhs,
                rhs,
                slack,
                excess: lhs - rhs - slack,
            }
        })
        .collect();
    let top = r_max / 10.0;
    let holds = rows.iter().filter(|row| row.r >= top).all(|row| row.excess <= 0.0);
    Ok(SecondMainTable { rows, holds })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShareRow {
    pub r: f64,
    pub n_aw_f: f64,
    pub n_aw_g: f64,
    pub diff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShareReport {
    pub rows: Vec<ShareRow>,
    /// Fit `diff / log r ≈ alpha + beta · log r`.
    pub alpha: f64,
    pub beta: f64,
    /// `true` when the fitted growth of `diff / log r` across the grid is at
    /// most 1, i.e. the difference is `O(log r)` on this grid.
    pub shared: bool,
}

/// Compares `Ñ_AW(r, f = a)` with `Ñ_AW(r, g = a)`.
pub fn share_check(f: &FunctionExpr, g: &FunctionExpr, a: ExtValue, r_grid: &[f64], q: &QParam) -> Result<ShareReport> {
    check_grid(r_grid)?;
    let r_max = r_grid.iter().cloned().fold(0.0, f64::max);
    let lf = value_ledger(f, a, r_max, q)?;
    let lg = value_ledger(g, a, r_max, q)?;
    let rows: Vec<ShareRow> = r_grid
        .iter()
        .map(|&r| {
            let (nf, ng) = (lf.reduced(r).1, lg.reduced(r).1);
            ShareRow {
                r,
                n_aw_f: nf,
                n_aw_g: ng,
                diff: nf - ng,
            }
        })
        .collect();
    let pts: Vec<(f64, f64)> = rows.iter().map(|row| (row.r.ln(), row.diff / row.r.ln())).collect();
    let beta = slope(&pts);
    let n = pts.len() as f64;
    let alpha = pts.iter().map(|p| p.1).sum::<f64>() / n - beta * pts.iter().map(|p| p.0).sum::<f64>() / n;
    let span = r_max.ln() - r_grid.iter().cloned().fold(f64::INFINITY, f64::min).ln();
    Ok(ShareReport {
        rows,
        alpha,
        beta,
        shared: beta.abs() * span <= 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::compile;
    use crate::funcrep::{build_named, NamedFunction};
    use crate::nevanlinna::admissible_grid_for;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn q5() -> QParam {
        QParam::real(0.5).unwrap()
    }

    fn theta4(q: &QParam) -> FunctionExpr {
        build_named(&NamedFunction::Theta(4), &QParam::new(q.sqrt_q()).unwrap()).unwrap()
    }

    fn h(q: &QParam) -> FunctionExpr {
        build_named(
            &NamedFunction::QUltraGen {
                beta: c(0.3),
                t: c(0.4),
            },
            q,
        )
        .unwrap()
    }

    fn theta_aw(f: &FunctionExpr, v: ExtValue, q: &QParam) -> f64 {
        let grid = admissible_grid_for(f, 10.0, 1e8, 16);
        deficiencies(f, &grid, &[v], q).unwrap().0[0].theta_aw
    }

    #[test]
    fn deficiency_examples() {
        let q = q5();
        let t = theta_aw(&theta4(&q), ExtValue::zero(), &q);
        assert!((0.9..=1.0).contains(&t), "{t}");
        let f3 = build_named(&NamedFunction::FFraction(3), &q).unwrap();
        let t = theta_aw(&f3, ExtValue::zero(), &q);
        assert!((0.60..=0.73).contains(&t), "{t}");
        for v in [ExtValue::zero(), ExtValue::Infinity] {
            let t = theta_aw(&h(&q), v, &q);
            assert!((0.9..=1.0).contains(&t), "{v}: {t}");
        }
    }

    #[test]
    fn deficiency_report_shape() {
        let q = q5();
        let f = compile("pinf(0.3)", &q).unwrap();
        let grid = admissible_grid_for(&f, 10.0, 1e6, 10);
        let (reps, sum) = deficiencies(&f, &grid, &[ExtValue::zero(), ExtValue::Infinity], &q).unwrap();
        // entire: ∞ is a Picard value in both senses
        assert_eq!(reps[1].delta, 1.0);
        assert_eq!(reps[1].theta_aw, 1.0);
        for r in &reps {
            assert!(r.theta_aw >= r.delta - 1e-12);
            assert!(r.r_used.iter().all(|&x| x >= 1e5 * 0.99));
        }
        assert!((sum - reps.iter().map(|r| r.theta_aw).sum::<f64>()).abs() < 1e-15);
        assert!(matches!(
            deficiencies(&f, &[10.0, 20.0], &[ExtValue::zero()], &q),
            Err(Error::GridTooSmall(_))
        ));
    }

    #[test]
    fn first_main_drift_is_bounded() {
        let q = q5();
        let f = compile("pinf(0.3)", &q).unwrap();
        let grid = admissible_grid_for(&f, 10.0, 1e4, 6);
        for cv in [c(0.5), C64::new(-3.0, 2.0)] {
            let d = first_main_drift(&f, cv, &grid).unwrap();
            let spread = d.iter().cloned().fold(f64::MIN, f64::max) - d.iter().cloned().fold(f64::MAX, f64::min);
            assert!(spread <= 2.0 * (cv.norm().ln().max(0.0) + 2f64.ln()), "{spread}");
        }
    }

    #[test]
    fn second_main_holds_on_battery() {
        let q = q5();
        let fs = [
            compile("pinf(0.3)", &q).unwrap(),
            h(&q),
            build_named(&NamedFunction::FFraction(2), &q).unwrap(),
        ];
        for f in &fs {
            let grid = admissible_grid_for(f, 10.0, 1e6, 10);
            let t = second_main_check(f, &[ExtValue::zero(), ExtValue::Infinity], &grid, &q).unwrap();
            assert!(t.holds, "{:?}", t.rows.last());
        }
    }

    #[test]
    fn second_main_theta4() {
        let q = q5();
        let f = theta4(&q);
        let grid = admissible_grid_for(&f, 10.0, 1e4, 8);
        let t = second_main_check(&f, &[ExtValue::zero(), ExtValue::Finite(c(1.0))], &grid, &q).unwrap();
        assert!(t.holds, "{:?}", t.rows.last());
    }

    #[test]
    fn second_main_guards() {
        let q = q5();
        let grid = crate::nevanlinna::geometric_grid(10.0, 1e5, 6);
        let kernel = build_named(&NamedFunction::KernelExample { phi: 0.7 }, &q).unwrap();
        let vals = [ExtValue::zero(), ExtValue::Infinity];
        assert!(matches!(
            second_main_check(&kernel, &vals, &grid, &q),
            Err(Error::Precondition(_))
        ));
        let f = compile("pinf(0.3)", &q).unwrap();
        assert!(matches!(
            second_main_check(&f, &[ExtValue::zero()], &grid, &q),
            Err(Error::InvalidParams(_))
        ));
        let dup = [ExtValue::zero(), ExtValue::zero()];
        assert!(matches!(
            second_main_check(&f, &dup, &grid, &q),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn share_examples() {
        let q = q5();
        let grid = crate::nevanlinna::geometric_grid(11.3, 1e6, 10);
        let f = compile("pinf(1)", &q).unwrap();
        let same = share_check(&f, &f, ExtValue::zero(), &grid, &q).unwrap();
        assert!(same.shared && same.rows.iter().all(|r| r.diff == 0.0));

        let g = compile("pinf(0.5)", &q).unwrap();
        assert!(share_check(&f, &g, ExtValue::zero(), &grid, &q).unwrap().shared);

        let f3 = build_named(&NamedFunction::FFraction(3), &q).unwrap();
        let rep = share_check(&f3, &f, ExtValue::zero(), &grid, &q).unwrap();
        assert!(!rep.shared, "beta {}", rep.beta);
        // the q⁴ lattice reduces to the same uncovered exponents as f_fraction(3)
        let g4 = compile("pinf(1;0.0625)", &q).unwrap();
        let rep = share_check(&f3, &g4, ExtValue::zero(), &grid, &q).unwrap();
        assert!(rep.shared && rep.rows.iter().all(|r| r.diff.abs() < 1e-9));
    }
}
