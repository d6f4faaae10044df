//! Argument-principle machinery: winding numbers along contours, localisation
//! of `a`-points in polar sectors, and numeric vanishing orders.

use std::f64::consts::{PI, TAU};

use super::proximity::log_shifted;
use crate::error::{Error, Result};
use crate::funcrep::{Evaluate, FunctionExpr};
use crate::qcore::C64;

/// Largest phase step accepted between neighbouring contour samples.
const MAX_DARG: f64 = 0.6;
/// Largest jump of `log|f - a|` accepted between neighbouring samples.
const MAX_DLOG: f64 = 1.5;
const MAX_BISECT: u32 = 40;
/// Relative distance of a known event below which a circle is rejected.
const AP_REL_TOL: f64 = 1e-6;
/// Ratio between consecutive localisation circles.
const SHELL: f64 = 1.5;
/// Relative diameter below which located points are treated as one.
const CLUSTER: f64 = 1e-6;
/// Cap on the initial samples of one contour piece near a known pole.
const MAX_NODES: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct APoint {
    pub x: C64,
    pub multiplicity: i32,
}

fn wrap(d: f64) -> f64 {
    let mut d = d % TAU;
    if d > PI {
        d -= TAU;
    } else if d <= -PI {
        d += TAU;
    }
    d
}

struct Contour<'a, F: ?Sized> {
    f: &'a F,
    a: C64,
    /// Radius reported in errors.
    r: f64,
}

impl<F: Evaluate + ?Sized> Contour<'_, F> {
    fn log_at(&self, x: C64) -> Result<C64> {
        let l = log_shifted(self.f, self.a, x).map_err(|e| match e {
            Error::PoleHit { .. } => Error::ContourTooClose {
                r: self.r,
                modulus: x.norm(),
            },
            other => other,
        })?;
        if !l.re.is_finite() {
            return Err(Error::ContourTooClose {
                r: self.r,
                modulus: x.norm(),
            });
        }
        Ok(l)
    }

    /// Change of `arg(f - a)` along `p(t)`, `t ∈ [0, 1]`.
    fn arg_change(&self, p: &dyn Fn(f64) -> C64, n0: usize) -> Result<f64> {
        let n0 = n0.max(2);
        let mut total = 0.0;
        let mut t_prev = 0.0;
        let mut l_prev = self.log_at(p(0.0))?;
        for k in 1..=n0 {
            let t = k as f64 / n0 as f64;
            let l = self.log_at(p(t))?;
            total += self.segment(p, t_prev, l_prev, t, l, MAX_BISECT)?;
            t_prev = t;
            l_prev = l;
        }
        Ok(total)
    }

    fn segment(&self, p: &dyn Fn(f64) -> C64, t0: f64, l0: C64, t1: f64, l1: C64, depth: u32) -> Result<f64> {
        let d = wrap(l1.im - l0.im);
        let tm = 0.5 * (t0 + t1);
        let lm = self.log_at(p(tm))?;
        if d.abs() <= MAX_DARG && (l1.re - l0.re).abs() <= MAX_DLOG {
            // the midpoint guards against a full turn aliasing to a small step
            let (d0, d1) = (wrap(lm.im - l0.im), wrap(l1.im - lm.im));
            if d0.abs() <= MAX_DARG && d1.abs() <= MAX_DARG && (d0 + d1 - d).abs() < 1e-6 {
                return Ok(d);
            }
        }
        if depth == 0 {
            return Err(Error::PhaseJumpTooLarge { r: self.r });
        }
        Ok(self.segment(p, t0, l0, tm, lm, depth - 1)? + self.segment(p, tm, lm, t1, l1, depth - 1)?)
    }
}

/// Initial samples for a path of length `len` passing `dist` from the nearest
/// known pole. An `a`-point next to a pole makes `f - a` turn by a full `2π`
/// across a short stretch when the path runs between the two, and that turn
/// is only seen when the sample step is below about twice the distance.
fn nodes_near_poles(base: usize, len: f64, dist: f64) -> Option<usize> {
    let need = (len / (2.0 * dist)).ceil();
    if need <= base as f64 {
        Some(base)
    } else if need <= MAX_NODES as f64 {
        Some(need as usize)
    } else {
        None
    }
}

/// Distance from `p` to the arc `|x| = r`, `ta ≤ arg x ≤ tb`.
fn dist_to_arc(p: C64, r: f64, ta: f64, tb: f64) -> f64 {
    let t = ta + wrap(p.arg() - ta).rem_euclid(TAU);
    if t <= tb {
        (p.norm() - r).abs()
    } else {
        (p - C64::from_polar(r, ta))
            .norm()
            .min((p - C64::from_polar(r, tb)).norm())
    }
}

/// Distance from `p` to the segment `arg x = t`, `ra ≤ |x| ≤ rb`.
fn dist_to_ray(p: C64, t: f64, ra: f64, rb: f64) -> f64 {
    let u = p * C64::from_polar(1.0, -t);
    if u.re >= ra && u.re <= rb {
        u.im.abs()
    } else {
        (u - ra).norm().min((u - rb).norm())
    }
}

fn rounded_winding(total: f64, r: f64) -> Result<i64> {
    let w = total / TAU;
    let k = w.round();
    if (w - k).abs() > 0.1 {
        return Err(Error::PhaseJumpTooLarge { r });
    }
    Ok(k as i64)
}

/// Winding number of `f - a` around `0` along `|x - center| = rho`.
pub fn winding_on_circle<F: Evaluate + ?Sized>(f: &F, a: C64, center: C64, rho: f64, nodes: usize) -> Result<i64> {
    let c = Contour { f, a, r: rho };
    let p = move |t: f64| center + C64::from_polar(rho, TAU * t);
    rounded_winding(c.arg_change(&p, nodes)?, rho)
}

/// `#zeros - #poles` of `f - a` inside `|x| < r`.
pub fn argument_principle_count(f: &FunctionExpr, a: C64, r: f64, nodes: usize) -> Result<i64> {
    let mut known: Vec<f64> = f.pole_ledger(2.0 * r + 2.0).iter().map(|e| e.modulus).collect();
    if a == C64::new(0.0, 0.0) {
        if let Some(p) = f.as_product_form() {
            known.extend(p.zeros(2.0 * r + 2.0).iter().map(|e| e.modulus));
        }
    }
    if let Some(&m) = known.iter().find(|&&m| (m - r).abs() <= AP_REL_TOL * r) {
        return Err(Error::ContourTooClose { r, modulus: m });
    }
    winding_on_circle(f, a, C64::new(0.0, 0.0), r, nodes)
}

#[derive(Clone, Copy, Debug)]
struct Sector {
    r0: f64,
    r1: f64,
    t0: f64,
    t1: f64,
}

impl Sector {
    fn center(&self) -> C64 {
        C64::from_polar(0.5 * (self.r0 + self.r1), 0.5 * (self.t0 + self.t1))
    }

    fn size(&self) -> f64 {
        ((self.r1 - self.r0) / self.r1).max(self.t1 - self.t0)
    }

    fn contains(&self, x: C64, slack: f64) -> bool {
        let (r, mut t) = (x.norm(), x.arg());
        while t < self.t0 - slack {
            t += TAU;
        }
        while t >= self.t0 + TAU - slack {
            t -= TAU;
        }
        let dr = slack * (self.r1 - self.r0);
        let dt = slack * (self.t1 - self.t0);
        r >= self.r0 - dr && r < self.r1 + dr && t >= self.t0 - dt && t < self.t1 + dt
    }

    fn winding<F: Evaluate + ?Sized>(&self, f: &F, a: C64, poles: &[(C64, i32)]) -> Result<i64> {
        let c = Contour { f, a, r: self.r1 };
        let Sector { r0, r1, t0, t1 } = *self;
        let nodes = |base: usize, len: f64, dist: &dyn Fn(C64) -> f64| {
            let d = poles.iter().map(|p| dist(p.0)).fold(f64::INFINITY, f64::min);
            nodes_near_poles(base, len, d).ok_or(Error::ContourTooClose { r: r1, modulus: r1 })
        };
        let (arc_out, arc_in, side) = (r1 * (t1 - t0), r0 * (t1 - t0), r1 - r0);
        let n_outer = nodes(16, arc_out, &|p| dist_to_arc(p, r1, t0, t1))?;
        let n_inner = nodes(16, arc_in, &|p| dist_to_arc(p, r0, t0, t1))?;
        let n_down = nodes(8, side, &|p| dist_to_ray(p, t1, r0, r1))?;
        let n_up = nodes(8, side, &|p| dist_to_ray(p, t0, r0, r1))?;
        let outer = move |t: f64| C64::from_polar(r1, t0 + (t1 - t0) * t);
        let down = move |t: f64| C64::from_polar(r1 + (r0 - r1) * t, t1);
        let inner = move |t: f64| C64::from_polar(r0, t1 - (t1 - t0) * t);
        let up = move |t: f64| C64::from_polar(r0 + (r1 - r0) * t, t0);
        let total = c.arg_change(&outer, n_outer)?
            + c.arg_change(&down, n_down)?
            + c.arg_change(&inner, n_inner)?
            + c.arg_change(&up, n_up)?;
        rounded_winding(total, r1)
    }
}

struct Locator<'a, F: ?Sized> {
    f: &'a F,
    a: C64,
    /// Known poles with positive orders.
    poles: Vec<(C64, i32)>,
}

impl<F: Evaluate + ?Sized> Locator<'_, F> {
    fn poles_in_disk(&self, rho: f64) -> i64 {
        self.poles.iter().filter(|p| p.0.norm() < rho).map(|p| p.1 as i64).sum()
    }

    fn poles_in_sector(&self, s: &Sector) -> i64 {
        self.poles
            .iter()
            .filter(|p| s.contains(p.0, 0.0))
            .map(|p| p.1 as i64)
            .sum()
    }

    /// Initial samples for the circle `|x| = rho`, or `None` when a pole is too close.
    fn circle_nodes(&self, rho: f64) -> Option<usize> {
        let d = self
            .poles
            .iter()
            .map(|p| (p.0.norm() - rho).abs())
            .fold(f64::INFINITY, f64::min);
        nodes_near_poles(64, TAU * rho, d)
    }

    /// `#a-points` in `|x| < rho`, nudging the radius off nearby points.
    /// Returns the radius actually used.
    fn disk_count(&self, rho: f64) -> Result<(f64, i64)> {
        let mut last = Error::PhaseJumpTooLarge { r: rho };
        for j in 0..8 {
            let r = rho * (1.0 + 0.0137 * j as f64);
            let Some(nodes) = self.circle_nodes(r) else { continue };
            match winding_on_circle(self.f, self.a, C64::new(0.0, 0.0), r, nodes) {
                Ok(w) => return Ok((r, w + self.poles_in_disk(r))),
                Err(e) => last = e,
            }
        }
        Err(last)
    }

    fn sector_count(&self, s: &Sector) -> Result<i64> {
        Ok(s.winding(self.f, self.a, &self.poles)? + self.poles_in_sector(s))
    }

    fn newton(&self, x0: C64, mult: i32) -> Option<C64> {
        let mut x = x0;
        for _ in 0..100 {
            let h = 1e-7 * x.norm().max(1e-8);
            let l = log_shifted(self.f, self.a, x).ok()?;
            if l.re == f64::NEG_INFINITY {
                return Some(x);
            }
            let lp = log_shifted(self.f, self.a, x + h).ok()?;
            let lm = log_shifted(self.f, self.a, x - h).ok()?;
            let dlog = ((lp - l).exp() - (lm - l).exp()) / (2.0 * h);
            if !(dlog.re.is_finite() && dlog.im.is_finite()) || dlog.norm() == 0.0 {
                return None;
            }
            let step = dlog.inv() * mult as f64;
            x -= step;
            if step.norm() <= 1e-14 * x.norm().max(1e-300) {
                return Some(x);
            }
        }
        None
    }

    fn refine(&self, s: Sector, count: i64, depth: u32, out: &mut Vec<APoint>) -> Result<()> {
        if count == 0 {
            return Ok(());
        }
        if count < 0 {
            return Err(Error::RootNotFound(format!("negative count in sector at r = {}", s.r1)));
        }
        let size = s.size();
        if count == 1 && size < 0.05 {
            if let Some(x) = self.newton(s.center(), 1) {
                if s.contains(x, 0.05) {
                    out.push(APoint { x, multiplicity: 1 });
                    return Ok(());
                }
            }
        }
        if size < 1e-8 {
            let x = self.newton(s.center(), count as i32).filter(|x| s.contains(*x, 1.0));
            out.push(APoint {
                x: x.unwrap_or_else(|| s.center()),
                multiplicity: count as i32,
            });
            return Ok(());
        }
        if depth == 0 {
            return Err(Error::RootNotFound(format!(
                "subdivision exhausted near {}",
                s.center()
            )));
        }
        for frac in [0.5, 0.43, 0.57, 0.37, 0.63, 0.3, 0.7] {
            let rm = s.r0 * (s.r1 / s.r0).powf(frac);
            let tm = s.t0 + (s.t1 - s.t0) * frac;
            let kids = [
                Sector {
                    r0: s.r0,
                    r1: rm,
                    t0: s.t0,
                    t1: tm,
                },
                Sector {
                    r0: rm,
                    r1: s.r1,
                    t0: s.t0,
                    t1: tm,
                },
                Sector {
                    r0: s.r0,
                    r1: rm,
                    t0: tm,
                    t1: s.t1,
                },
                Sector {
                    r0: rm,
                    r1: s.r1,
                    t0: tm,
                    t1: s.t1,
                },
            ];
            let counts: Result<Vec<i64>> = kids.iter().map(|k| self.sector_count(k)).collect();
            if let Ok(cs) = counts {
                if cs.iter().sum::<i64>() == count {
                    for (k, c) in kids.into_iter().zip(cs) {
                        self.refine(k, c, depth - 1, out)?;
                    }
                    return Ok(());
                }
            }
        }
        if count > 1 && size < 1e-4 {
            // a multiple root blurred by rounding: take the cluster as a whole
            let x = self.newton(s.center(), count as i32).filter(|x| s.contains(*x, 1.0));
            out.push(APoint {
                x: x.unwrap_or_else(|| s.center()),
                multiplicity: count as i32,
            });
            return Ok(());
        }
        Err(Error::RootNotFound(format!(
            "inconsistent sector counts near {}",
            s.center()
        )))
    }

    fn annulus(&self, r0: f64, r1: f64, count: i64, sectors: usize, out: &mut Vec<APoint>) -> Result<()> {
        if count == 0 {
            return Ok(());
        }
        let n = sectors;
        let mut last = None;
        for offset in [0.137, 0.0, 0.29, 0.41] {
            let sectors: Vec<Sector> = (0..n)
                .map(|k| {
                    let t0 = TAU * (k as f64 + offset) / n as f64 - PI;
                    Sector {
                        r0,
                        r1,
                        t0,
                        t1: t0 + TAU / n as f64,
                    }
                })
                .collect();
            let counts: Result<Vec<i64>> = sectors.iter().map(|s| self.sector_count(s)).collect();
            if let Ok(cs) = counts {
                if cs.iter().sum::<i64>() == count {
                    let mut found = Vec::new();
                    let done: Result<()> = sectors
                        .into_iter()
                        .zip(cs)
                        .try_for_each(|(s, c)| self.refine(s, c, 90, &mut found));
                    match done {
                        Ok(()) => {
                            out.extend(found);
                            return Ok(());
                        }
                        Err(e) => last = Some(e),
                    }
                }
            }
        }
        Err(last.unwrap_or_else(|| Error::RootNotFound(format!("could not split the annulus {r0} < |x| < {r1}"))))
    }
}

/// All solutions of `f(x) = a` with `|x| < r`, with multiplicities.
///
/// Counts on nested circles isolate annuli that contain solutions; those are
/// split into polar sectors, subdivided by the argument principle until each
/// holds one solution, and polished by Newton's method. Known poles enter the
/// counts through the ledger.
pub fn a_points(f: &FunctionExpr, a: C64, r: f64) -> Result<Vec<APoint>> {
    if !(r > 0.0) {
        return Err(Error::InvalidParams(format!("radius must be positive, got {r}")));
    }
    let loc = Locator {
        f,
        a,
        poles: f
            .pole_ledger(2.0 * r + 2.0)
            .iter()
            .map(|e| (e.x, -e.multiplicity))
            .collect(),
    };
    let outer = 1.05 * r;
    let inner = (1e-3f64).min(0.5 * r);
    let mut radii = vec![outer];
    while radii.last().copied().unwrap_or(0.0) / SHELL > inner {
        let next = radii.last().copied().unwrap_or(0.0) / SHELL;
        radii.push(next);
    }
    radii.reverse();
    let counts: Vec<(f64, i64)> = radii.iter().map(|&rho| loc.disk_count(rho)).collect::<Result<_>>()?;

    let mut out = Vec::new();
    let (rho_in, z_in) = counts[0];
    if z_in > 0 {
        let (tiny, z_tiny) = loc.disk_count(rho_in * 1e-9)?;
        if z_tiny > 0 {
            out.push(APoint {
                x: C64::new(0.0, 0.0),
                multiplicity: z_tiny as i32,
            });
        }
        loc.annulus(tiny, rho_in, z_in - z_tiny, 8, &mut out)?;
    }
    for w in counts.windows(2) {
        let ((r0, c0), (r1, c1)) = (w[0], w[1]);
        loc.annulus(r0, r1, c1 - c0, 8, &mut out)?;
    }
    let mut fused = fuse(out);
    fused.retain(|p| p.x.norm() < r);
    Ok(fused)
}

fn fuse(mut out: Vec<APoint>) -> Vec<APoint> {
    out.sort_by(|a, b| a.x.norm().total_cmp(&b.x.norm()));
    // a multiple root splits into a tiny cluster under rounding; fuse it back
    let mut fused: Vec<APoint> = Vec::with_capacity(out.len());
    for p in out {
        let tol = CLUSTER * p.x.norm().max(1e-300);
        match fused.iter_mut().rev().take(8).find(|o| (o.x - p.x).norm() <= tol) {
            Some(o) => {
                let m = (o.multiplicity + p.multiplicity) as f64;
                o.x = (o.x * o.multiplicity as f64 + p.x * p.multiplicity as f64) / m;
                o.multiplicity += p.multiplicity;
            }
            None => fused.push(p),
        }
    }
    fused
}

/// Zeros of a pole-free `f - a` in `r0 ≤ |x| < r1`, with the total count.
pub(crate) fn locate_annulus<F: Evaluate + ?Sized>(
    f: &F,
    a: C64,
    r0: f64,
    r1: f64,
    sectors: usize,
) -> Result<(i64, Vec<APoint>)> {
    let loc = Locator {
        f,
        a,
        poles: Vec::new(),
    };
    let origin = C64::new(0.0, 0.0);
    let count = winding_on_circle(f, a, origin, r1, 128)? - winding_on_circle(f, a, origin, r0, 128)?;
    let mut out = Vec::new();
    loc.annulus(r0, r1, count, sectors, &mut out)?;
    Ok((count, fuse(out)))
}

/// Order of vanishing of `h` at `x0`, read off the growth of the circular
/// mean of `log|h|` between radii `ρ₁ = 1e-5·scale` and `2ρ₁`.
pub fn vanishing_order<G>(h: &G, x0: C64, scale: f64) -> Result<i32>
where
    G: Fn(C64) -> Result<C64> + ?Sized,
{
    let rho1 = 1e-5 * scale;
    let mean = |rho: f64| -> Result<f64> {
        let mut s = 0.0;
        for k in 0..16 {
            let v = h(x0 + C64::from_polar(rho, TAU * (k as f64 + 0.5) / 16.0))?;
            s += v.norm().max(f64::MIN_POSITIVE).ln();
        }
        Ok(s / 16.0)
    };
    let est = (mean(2.0 * rho1)? - mean(rho1)?) / 2f64.ln();
    let k = est.round();
    if (est - k).abs() > 0.2 {
        return Err(Error::AmbiguousOrder { x: x0, estimate: est });
    }
    Ok(k as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcrep::{build_named, NamedFunction, ProductForm};
    use crate::qcore::QParam;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn identity_winds_once() {
        let f = FunctionExpr::polynomial(vec![c(0.0), c(1.0)]);
        assert_eq!(argument_principle_count(&f, c(0.0), 1.5, 32).unwrap(), 1);
    }

    #[test]
    fn phi_inf_matches_ledger() {
        let q = QParam::real(0.5).unwrap();
        let f = FunctionExpr::single(ProductForm::phi_inf(c(1.0), q.q(), 1).unwrap());
        assert_eq!(argument_principle_count(&f, c(0.0), 3.0, 64).unwrap(), 3);
        assert!(matches!(
            argument_principle_count(&f, c(0.0), 2.125, 64),
            Err(Error::ContourTooClose { .. })
        ));
    }

    #[test]
    fn generating_function_signed_count() {
        let q = QParam::real(0.5).unwrap();
        let h = build_named(
            &NamedFunction::QUltraGen {
                beta: c(0.3),
                t: c(0.4),
            },
            &q,
        )
        .unwrap();
        let p = h.as_product_form().unwrap();
        for r in [5.0, 40.0, 300.0] {
            let signed: i64 = p.zero_pole_ledger(r).iter().map(|e| e.multiplicity as i64).sum();
            assert_eq!(argument_principle_count(&h, c(0.0), r, 64).unwrap(), signed);
        }
    }

    #[test]
    fn locates_polynomial_roots() {
        let f = FunctionExpr::polynomial(vec![c(-2.0), c(0.0), c(1.0)]);
        let pts = a_points(&f, c(0.0), 3.0).unwrap();
        assert_eq!(pts.len(), 2);
        for p in pts {
            assert!((p.x.norm() - 2f64.sqrt()).abs() < 1e-12);
            assert_eq!(p.multiplicity, 1);
        }
        let sq = FunctionExpr::polynomial(vec![c(1.0), c(-2.0), c(1.0)]);
        let pts = a_points(&sq, c(0.0), 3.0).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].multiplicity, 2);
        assert!((pts[0].x - 1.0).norm() < 1e-6);
    }

    #[test]
    fn origin_point() {
        let f = FunctionExpr::polynomial(vec![c(0.0), c(0.0), c(1.0), c(1.0)]);
        let pts = a_points(&f, c(0.0), 2.0).unwrap();
        assert_eq!(
            pts[0],
            APoint {
                x: c(0.0),
                multiplicity: 2
            }
        );
        assert!((pts[1].x + 1.0).norm() < 1e-12);
    }

    #[test]
    fn locates_lattice_and_shifted_values() {
        let q = QParam::real(0.5).unwrap();
        let f = FunctionExpr::single(ProductForm::phi_inf(c(1.0), q.q(), 1).unwrap());
        let pts = a_points(&f, c(0.0), 3.0).unwrap();
        let xs: Vec<f64> = pts.iter().map(|p| p.x.re).collect();
        assert_eq!(xs.len(), 3);
        for (got, want) in xs.iter().zip([1.0, 1.25, 2.125]) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
        let ones = a_points(&f, c(1.0), 50.0).unwrap();
        for p in &ones {
            assert!((f.eval(p.x).unwrap() - 1.0).norm() < 1e-8);
        }
        let signed = argument_principle_count(&f, c(1.0), 50.0, 64).unwrap();
        assert_eq!(ones.iter().map(|p| p.multiplicity as i64).sum::<i64>(), signed);
    }

    #[test]
    fn a_point_hugging_a_pole() {
        // H = 2+i has a solution about 2e-3 from the pole near x = 320
        let q = QParam::real(0.5).unwrap();
        let f = build_named(
            &NamedFunction::QUltraGen {
                beta: c(0.3),
                t: c(0.4),
            },
            &q,
        )
        .unwrap();
        let a = C64::new(2.0, 1.0);
        let pts = a_points(&f, a, 1e4).unwrap();
        let pole = C64::new(320.00078125, 0.0);
        assert!(pts.iter().any(|p| (p.x - pole).norm() < 0.01));
        for p in &pts {
            if p.x.norm() < 3000.0 {
                assert!((f.eval(p.x).unwrap() - a).norm() < 1e-6 * a.norm());
            }
        }
        let inside: i32 = pts.iter().filter(|p| p.x.norm() < 500.0).map(|p| p.multiplicity).sum();
        let poles: i64 = f
            .pole_ledger(500.0)
            .iter()
            .filter(|e| e.modulus < 500.0)
            .map(|e| -e.multiplicity as i64)
            .sum();
        assert_eq!(
            inside as i64 - poles,
            argument_principle_count(&f, a, 500.0, 4096).unwrap()
        );
    }

    #[test]
    fn vanishing_orders() {
        let h = |x: C64| Ok((x - 1.0) * (x - 1.0) * (x + 3.0));
        assert_eq!(vanishing_order(&h, c(1.0), 1.0).unwrap(), 2);
        assert_eq!(vanishing_order(&h, c(0.5), 1.0).unwrap(), 0);
    }
}
