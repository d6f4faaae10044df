//! Meromorphic functions in product form.
//!
//! A [`ProductForm`] is `C · P(x) · Π_j φ∞(x; a_j; base_j)^{m_j}` where
//! `φ∞(x; a; b) = (a z, a/z; b)_∞` and `x = (z + 1/z)/2`. Each factor is linear
//! in `x` factor-by-factor, `(1 - a b^k z)(1 - a b^k / z) = 1 - 2 a b^k x + a² b^{2k}`,
//! so zeros and poles sit exactly on the lattices `x_n = (a b^n + b^{-n}/a)/2`
//! and can be enumerated instead of searched for.
//!
//! A [`FunctionExpr`] is a finite sum of product forms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{cpowi, lattice_point_base, lift_to_z, log_qpoch_tracked, QParam, TruncationPolicy, C64};

/// Relative coincidence tolerance when merging lattice events.
pub const MERGE_TOL: f64 = 1e-10;
/// Relative distance below which an evaluation point counts as a pole.
pub const POLE_TOL: f64 = 1e-13;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Serde adapter writing complex numbers as `{"re": .., "im": ..}`.
pub mod cplx {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct ReIm {
        re: f64,
        #[serde(default)]
        im: f64,
    }

    pub fn serialize<S: Serializer>(v: &C64, s: S) -> Result<S::Ok, S::Error> {
        ReIm { re: v.re, im: v.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let r = ReIm::deserialize(d)?;
        Ok(C64::new(r.re, r.im))
    }

    pub mod vec {
        use super::{ReIm, C64};
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
            v.iter()
                .map(|c| ReIm { re: c.re, im: c.im })
                .collect::<Vec<_>>()
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
            Ok(Vec::<ReIm>::deserialize(d)?
                .into_iter()
                .map(|r| C64::new(r.re, r.im))
                .collect())
        }
    }
}

/// `φ∞(x; a; base)^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductFactor {
    #[serde(with = "cplx")]
    pub a: C64,
    #[serde(with = "cplx")]
    pub base: C64,
    pub m: i32,
}

impl ProductFactor {
    pub fn new(a: C64, base: C64, m: i32) -> Result<Self> {
        if a == ZERO {
            return Err(Error::DegenerateGenerator);
        }
        let b = base.norm();
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::InvalidParams(format!(
                "factor base needs 0 < |base| < 1, got {base}"
            )));
        }
        if m == 0 {
            return Err(Error::InvalidParams("factor exponent must be nonzero".into()));
        }
        Ok(ProductFactor { a, base, m })
    }

    /// Canonical `z`-representative of the `n`-th lattice point, `base^{-n}/a`.
    pub fn canonical_z(&self, n: u64) -> C64 {
        cpowi(self.base, -(n as i64)) / self.a
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductForm {
    #[serde(with = "cplx")]
    pub constant: C64,
    /// Ascending coefficients of a polynomial in `x`; empty means `1`.
    #[serde(with = "cplx::vec", default)]
    pub poly: Vec<C64>,
    #[serde(default)]
    pub factors: Vec<ProductFactor>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    #[serde(with = "cplx")]
    pub coefficient: C64,
    pub form: ProductForm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionExpr {
    pub terms: Vec<Term>,
}

/// One contributor to a merged ledger event.
#[derive(Clone, Debug, PartialEq)]
pub struct EventSource {
    /// Factor index, or `None` for a polynomial root.
    pub generator_index: Option<usize>,
    pub exponent: u64,
    pub multiplicity: i32,
    /// The `z` on the side of the lattice that runs to infinity.
    pub canonical_z: C64,
}

/// A zero (`multiplicity > 0`) or pole (`multiplicity < 0`) of a product form.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeEvent {
    pub x: C64,
    pub modulus: f64,
    /// Index of the first contributing factor (`-1` for a polynomial root).
    pub generator_index: i64,
    pub exponent: u64,
    pub multiplicity: i32,
    pub sources: Vec<EventSource>,
}

impl ProductForm {
    pub fn constant(c: C64) -> Self {
        ProductForm {
            constant: c,
            poly: Vec::new(),
            factors: Vec::new(),
        }
    }

    pub fn from_factors(constant: C64, factors: Vec<ProductFactor>) -> Self {
        ProductForm {
            constant,
            poly: Vec::new(),
            factors,
        }
    }

    /// `φ∞(x; a; base)^m` with unit constant.
    pub fn phi_inf(a: C64, base: C64, m: i32) -> Result<Self> {
        Ok(Self::from_factors(ONE, vec![ProductFactor::new(a, base, m)?]))
    }

    pub fn with_poly(mut self, poly: Vec<C64>) -> Self {
        self.poly = poly;
        self
    }

    pub fn is_constant(&self) -> bool {
        self.factors.is_empty() && self.poly.len() <= 1
    }

    pub fn mul(&self, other: &ProductForm) -> ProductForm {
        let poly = poly_mul(&self.poly, &other.poly);
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        ProductForm {
            constant: self.constant * other.constant,
            poly,
            factors,
        }
        .normalized()
    }

    /// Reciprocal; only defined when the polynomial part is constant.
    pub fn reciprocal(&self) -> Result<ProductForm> {
        let pc = poly_const(&self.poly)
            .ok_or_else(|| Error::UnsupportedShape("reciprocal of a product form with a polynomial factor".into()))?;
        let c = self.constant * pc;
        if c == ZERO {
            return Err(Error::InvalidParams("reciprocal of the zero function".into()));
        }
        let factors = self
            .factors
            .iter()
            .map(|f| ProductFactor {
                a: f.a,
                base: f.base,
                m: -f.m,
            })
            .collect();
        Ok(ProductForm {
            constant: c.inv(),
            poly: Vec::new(),
            factors,
        })
    }

    pub fn powi(&self, e: i32) -> Result<ProductForm> {
        if e == 0 {
            return Ok(ProductForm::constant(ONE));
        }
        if e < 0 {
            return self.reciprocal()?.powi(-e);
        }
        let mut poly: Vec<C64> = Vec::new();
        for _ in 0..e {
            poly = poly_mul(&poly, &self.poly);
        }
        let factors = self
            .factors
            .iter()
            .map(|f| ProductFactor {
                a: f.a,
                base: f.base,
                m: f.m * e,
            })
            .collect();
        Ok(ProductForm {
            constant: cpowi(self.constant, e as i64),
            poly,
            factors,
        }
        .normalized())
    }

    /// Merges identical factors and drops those whose exponents cancel.
    pub fn normalized(mut self) -> ProductForm {
        let mut merged: Vec<ProductFactor> = Vec::new();
        for f in self.factors.drain(..) {
            if let Some(g) = merged.iter_mut().find(|g| g.a == f.a && g.base == f.base) {
                g.m += f.m;
            } else {
                merged.push(f);
            }
        }
        merged.retain(|f| f.m != 0);
        if let Some(pc) = poly_const(&self.poly) {
            self.constant *= pc;
            self.poly.clear();
        }
        self.factors = merged;
        self
    }

    /// Complex logarithm of the form at `x`. The real part is `log|f(x)|`.
    pub fn log_evaluate(&self, x: C64, policy: &TruncationPolicy) -> Result<C64> {
        let mut acc = self.constant.ln();
        if !self.poly.is_empty() {
            acc += poly_eval(&self.poly, x).ln();
        }
        if self.factors.is_empty() {
            return Ok(acc);
        }
        let z = lift_to_z(x).z;
        let zi = z.inv();
        for f in &self.factors {
            let (l1, d1) = log_qpoch_tracked(f.a * z, f.base, policy)?;
            let (l2, d2) = log_qpoch_tracked(f.a * zi, f.base, policy)?;
            if f.m < 0 && d1.min(d2) < POLE_TOL {
                return Err(Error::PoleHit { x });
            }
            acc += (l1 + l2) * f.m as f64;
        }
        Ok(acc)
    }

    pub fn evaluate(&self, x: C64, policy: &TruncationPolicy) -> Result<C64> {
        Ok(exp_log(self.log_evaluate(x, policy)?))
    }

    /// All zeros and poles with `|x| < r`, merged by location and sorted by modulus.
    pub fn zero_pole_ledger(&self, r: f64) -> Vec<LatticeEvent> {
        let mut raw: Vec<(C64, EventSource)> = Vec::new();
        if self.poly.len() > 1 {
            for root in poly_roots(&self.poly) {
                if root.norm() < r {
                    raw.push((
                        root,
                        EventSource {
                            generator_index: None,
                            exponent: 0,
                            multiplicity: 1,
                            canonical_z: lift_to_z(root).z,
                        },
                    ));
                }
            }
        }
        for (j, f) in self.factors.iter().enumerate() {
            let (abs_a, abs_b) = (f.a.norm(), f.base.norm());
            let mut n: u64 = 0;
            loop {
                // |x_n| >= (|a|^{-1}|b|^{-n} - |a||b|^n)/2
                let lower = 0.5 * (1.0 / (abs_a * abs_b.powi(n as i32)) - abs_a * abs_b.powi(n as i32));
                if lower >= r || n > 1_000_000 {
                    break;
                }
                if let Ok(x) = lattice_point_base(f.a, f.base, n as i64) {
                    if x.norm() < r {
                        raw.push((
                            x,
                            EventSource {
                                generator_index: Some(j),
                                exponent: n,
                                multiplicity: f.m,
                                canonical_z: f.canonical_z(n),
                            },
                        ));
                    }
                }
                n += 1;
            }
        }
        merge_events(raw)
    }

    /// Zeros only (positive multiplicities).
    pub fn zeros(&self, r: f64) -> Vec<LatticeEvent> {
        self.zero_pole_ledger(r)
            .into_iter()
            .filter(|e| e.multiplicity > 0)
            .collect()
    }

    /// Poles only (negative multiplicities).
    pub fn poles(&self, r: f64) -> Vec<LatticeEvent> {
        self.zero_pole_ledger(r)
            .into_iter()
            .filter(|e| e.multiplicity < 0)
            .collect()
    }

    pub fn has_poles(&self) -> bool {
        self.factors.iter().any(|f| f.m < 0)
    }
}

pub(crate) fn merge_events(mut raw: Vec<(C64, EventSource)>) -> Vec<LatticeEvent> {
    raw.sort_by(|a, b| a.0.norm().total_cmp(&b.0.norm()));
    let mut out: Vec<LatticeEvent> = Vec::new();
    for (x, src) in raw {
        let tol = MERGE_TOL * x.norm().max(1.0);
        // events are sorted by modulus, so a coincident event is near the tail
        let hit = out
            .iter_mut()
            .rev()
            .take_while(|e| (x.norm() - e.modulus) <= tol)
            .find(|e| (e.x - x).norm() <= tol);
        match hit {
            Some(e) => {
                e.multiplicity += src.multiplicity;
                e.sources.push(src);
            }
            None => out.push(LatticeEvent {
                x,
                modulus: x.norm(),
                generator_index: src.generator_index.map(|i| i as i64).unwrap_or(-1),
                exponent: src.exponent,
                multiplicity: src.multiplicity,
                sources: vec![src],
            }),
        }
    }
    out.retain(|e| e.multiplicity != 0);
    out
}

/// `exp` that maps a `-inf` real part to an exact zero.
#[inline]
pub(crate) fn exp_log(l: C64) -> C64 {
    if l.re == f64::NEG_INFINITY {
        ZERO
    } else {
        l.exp()
    }
}

impl FunctionExpr {
    pub fn single(form: ProductForm) -> Self {
        FunctionExpr {
            terms: vec![Term { coefficient: ONE, form }],
        }
    }

    pub fn constant(c: C64) -> Self {
        Self::single(ProductForm::constant(c))
    }

    /// The polynomial `Σ c_k x^k` as a one-term expression.
    pub fn polynomial(coeffs: Vec<C64>) -> Self {
        Self::single(ProductForm::constant(ONE).with_poly(coeffs))
    }

    /// The product form if this expression has exactly one term.
    pub fn as_product_form(&self) -> Option<ProductForm> {
        match self.terms.as_slice() {
            [t] => {
                let mut f = t.form.clone();
                f.constant *= t.coefficient;
                Some(f)
            }
            _ => None,
        }
    }

    pub fn log_evaluate(&self, x: C64, policy: &TruncationPolicy) -> Result<C64> {
        if self.terms.is_empty() {
            return Ok(C64::new(f64::NEG_INFINITY, 0.0));
        }
        let mut logs = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            logs.push(t.coefficient.ln() + t.form.log_evaluate(x, policy)?);
        }
        if logs.len() == 1 {
            return Ok(logs[0]);
        }
        let peak = logs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
        if peak == f64::NEG_INFINITY {
            return Ok(C64::new(f64::NEG_INFINITY, 0.0));
        }
        let sum: C64 = logs.iter().map(|l| exp_log(*l - peak)).sum();
        Ok(sum.ln() + peak)
    }

    pub fn evaluate(&self, x: C64, policy: &TruncationPolicy) -> Result<C64> {
        Ok(exp_log(self.log_evaluate(x, policy)?))
    }

    /// Poles of the sum: union of the term poles, taking the largest order at
    /// each location.
    pub fn pole_ledger(&self, r: f64) -> Vec<LatticeEvent> {
        if let Some(f) = self.as_product_form() {
            return f.poles(r);
        }
        let mut out: Vec<LatticeEvent> = Vec::new();
        for t in &self.terms {
            for e in t.form.poles(r) {
                let tol = MERGE_TOL * e.x.norm().max(1.0);
                match out.iter_mut().find(|o| (o.x - e.x).norm() <= tol) {
                    Some(o) => o.multiplicity = o.multiplicity.min(e.multiplicity),
                    None => out.push(e),
                }
            }
        }
        out.sort_by(|a, b| a.modulus.total_cmp(&b.modulus));
        out
    }

    pub fn has_poles(&self) -> bool {
        self.terms.iter().any(|t| t.form.has_poles())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("FunctionExpr serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: FunctionExpr = serde_json::from_str(s).map_err(|e| Error::Syntax {
            offset: e.column(),
            message: e.to_string(),
        })?;
        for t in &f.terms {
            for fac in &t.form.factors {
                ProductFactor::new(fac.a, fac.base, fac.m)?;
            }
        }
        Ok(f)
    }
}

/// Anything that can be evaluated pointwise in `x`.
pub trait Evaluate: Sync {
    fn eval(&self, x: C64) -> Result<C64>;

    /// Complex log; overridden by product forms to avoid overflow.
    fn log_eval(&self, x: C64) -> Result<C64> {
        Ok(self.eval(x)?.ln())
    }
}

impl Evaluate for FunctionExpr {
    fn eval(&self, x: C64) -> Result<C64> {
        self.evaluate(x, &TruncationPolicy::default())
    }
    fn log_eval(&self, x: C64) -> Result<C64> {
        self.log_evaluate(x, &TruncationPolicy::default())
    }
}

impl Evaluate for ProductForm {
    fn eval(&self, x: C64) -> Result<C64> {
        self.evaluate(x, &TruncationPolicy::default())
    }
    fn log_eval(&self, x: C64) -> Result<C64> {
        self.log_evaluate(x, &TruncationPolicy::default())
    }
}

/// A [`FunctionExpr`] evaluated with a non-default truncation policy.
pub struct WithPolicy<'a> {
    pub expr: &'a FunctionExpr,
    pub policy: TruncationPolicy,
}

impl Evaluate for WithPolicy<'_> {
    fn eval(&self, x: C64) -> Result<C64> {
        self.expr.evaluate(x, &self.policy)
    }
    fn log_eval(&self, x: C64) -> Result<C64> {
        self.expr.log_evaluate(x, &self.policy)
    }
}

/// Wraps a closure as an [`Evaluate`].
pub struct FnEval<F>(pub F);

impl<F> Evaluate for FnEval<F>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    fn eval(&self, x: C64) -> Result<C64> {
        (self.0)(x)
    }
}

impl<T: Evaluate + ?Sized> Evaluate for &T {
    fn eval(&self, x: C64) -> Result<C64> {
        (**self).eval(x)
    }
    fn log_eval(&self, x: C64) -> Result<C64> {
        (**self).log_eval(x)
    }
}

// ---------------------------------------------------------------------------
// polynomials

pub(crate) fn poly_eval(c: &[C64], x: C64) -> C64 {
    c.iter().rev().fold(ZERO, |acc, &ck| acc * x + ck)
}

fn poly_const(c: &[C64]) -> Option<C64> {
    match c {
        [] => Some(ONE),
        [c0] => Some(*c0),
        _ if c[1..].iter().all(|v| *v == ZERO) => Some(c[0]),
        _ => None,
    }
}

pub(crate) fn poly_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() {
        return b.to_vec();
    }
    if b.is_empty() {
        return a.to_vec();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Roots of an ascending-coefficient polynomial (Aberth–Ehrlich iteration).
pub fn poly_roots(coeffs: &[C64]) -> Vec<C64> {
    let mut c: Vec<C64> = coeffs.to_vec();
    while c.len() > 1 && c.last().is_some_and(|v| v.norm() == 0.0) {
        c.pop();
    }
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let monic: Vec<C64> = c.iter().map(|v| v / lead).collect();
    if deg == 1 {
        return vec![-monic[0]];
    }
    let deriv: Vec<C64> = (1..=deg).map(|k| monic[k] * k as f64).collect();
    let radius = 1.0 + monic[..deg].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut roots: Vec<C64> = (0..deg)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64;
            C64::from_polar(0.5 * radius, t)
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let zi = roots[i];
            let p = poly_eval(&monic, zi);
            if p == ZERO {
                continue;
            }
            let ratio = p / poly_eval(&deriv, zi);
            let s: C64 = (0..deg).filter(|&j| j != i).map(|j| (zi - roots[j]).inv()).sum();
            let step = ratio / (ONE - ratio * s);
            roots[i] = zi - step;
            moved = moved.max(step.norm() / zi.norm().max(1.0));
        }
        if moved < 1e-15 {
            break;
        }
    }
    roots
}

// ---------------------------------------------------------------------------
// named functions

/// The functions the library knows how to build directly.
#[derive(Clone, Debug, PartialEq)]
pub enum NamedFunction {
    /// `(q;q)_∞ (q^{1/2} z, q^{1/2}/z; q)_∞`.
    TripleProduct,
    /// `1/(t z, t/z; q)_∞`, the continuous q-Hermite generating function.
    QHermiteGen { t: C64 },
    /// `(β t z, β t/z; q)_∞ / (t z, t/z; q)_∞`, the q-ultraspherical generating function.
    QUltraGen { beta: C64, t: C64 },
    /// Jacobi theta functions viewed in `x = cos 2w` (nome `q`, lattice base `q²`).
    /// `ϑ₃`, `ϑ₄` are even in `w`; for `ϑ₁`, `ϑ₂` the single-valued companions
    /// `ϑ₁(w)/sin w` and `ϑ₂(w)/cos w` are returned.
    Theta(u8),
    /// `Π_{k<n} (q^k z, q^k/z; q^{n+1})_∞`.
    FFraction(u32),
    /// `Π_{k<n} (q^{2k} z, q^{2k}/z; q^{2n-1})_∞`.
    FOneOver(u32),
    /// The `m/n` deficiency example with base `q^{2n-m}`.
    FRational(u32, u32),
    /// `(cos θ - cos φ) φ∞(x; q e^{iφ}) φ∞(x; q e^{-iφ}) / (φ∞(x; q^{1/2} e^{iφ}) φ∞(x; q^{1/2} e^{-iφ}))`.
    KernelExample { phi: f64 },
}

pub fn build_named(name: &NamedFunction, q: &QParam) -> Result<FunctionExpr> {
    let pol = TruncationPolicy::default();
    let qq = q.q();
    let form = match *name {
        NamedFunction::TripleProduct => {
            let euler = crate::qcore::qpoch_infinite(qq, q, &pol)?;
            ProductForm::from_factors(euler, vec![ProductFactor::new(q.sqrt_q(), qq, 1)?])
        }
        NamedFunction::QHermiteGen { t } => {
            check_t(t)?;
            ProductForm::from_factors(ONE, vec![ProductFactor::new(t, qq, -1)?])
        }
        NamedFunction::QUltraGen { beta, t } => {
            check_t(t)?;
            let mut factors = Vec::new();
            if beta != ZERO {
                factors.push(ProductFactor::new(beta * t, qq, 1)?);
            }
            factors.push(ProductFactor::new(t, qq, -1)?);
            ProductForm::from_factors(ONE, factors).normalized()
        }
        NamedFunction::Theta(j) => theta_in_x(j, q)?,
        NamedFunction::FFraction(n) => {
            if n < 1 {
                return Err(Error::InvalidParams("f_fraction needs n >= 1".into()));
            }
            let base = q.pow(n as i64 + 1);
            let factors = (0..n)
                .map(|k| ProductFactor::new(q.pow(k as i64), base, 1))
                .collect::<Result<Vec<_>>>()?;
            ProductForm::from_factors(ONE, factors)
        }
        NamedFunction::FOneOver(n) => {
            if n < 1 {
                return Err(Error::InvalidParams("f_one_over needs n >= 1".into()));
            }
            let base = q.pow(2 * n as i64 - 1);
            let factors = (0..n)
                .map(|k| ProductFactor::new(q.pow(2 * k as i64), base, 1))
                .collect::<Result<Vec<_>>>()?;
            ProductForm::from_factors(ONE, factors)
        }
        NamedFunction::FRational(m, n) => {
            if !(1 <= m && m < n) {
                return Err(Error::InvalidParams(format!(
                    "f_rational needs 1 <= m < n, got {m}/{n}"
                )));
            }
            let base = q.pow(2 * n as i64 - m as i64);
            let mut factors = Vec::new();
            for k in 0..m {
                factors.push(ProductFactor::new(q.pow(k as i64), base, 1)?);
            }
            for kp in 1..=(n - m) {
                factors.push(ProductFactor::new(q.pow((m + 2 * kp - 1) as i64), base, 1)?);
            }
            ProductForm::from_factors(ONE, factors)
        }
        NamedFunction::KernelExample { phi } => {
            let e = C64::from_polar(1.0, phi);
            let factors = vec![
                ProductFactor::new(qq * e, qq, 1)?,
                ProductFactor::new(qq * e.inv(), qq, 1)?,
                ProductFactor::new(q.sqrt_q() * e, qq, -1)?,
                ProductFactor::new(q.sqrt_q() * e.inv(), qq, -1)?,
            ];
            ProductForm::from_factors(ONE, factors).with_poly(vec![C64::new(-phi.cos(), 0.0), ONE])
        }
    };
    Ok(FunctionExpr::single(form))
}

fn check_t(t: C64) -> Result<()> {
    let a = t.norm();
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidParams(format!(
            "generating functions need 0 < |t| < 1, got {t}"
        )));
    }
    Ok(())
}

pub(crate) fn theta_in_x(j: u8, q: &QParam) -> Result<ProductForm> {
    let pol = TruncationPolicy::default();
    let q2 = q.q() * q.q();
    let c0 = crate::qcore::qpoch_infinite_base(q2, q2, &pol)?;
    let quarter = q.sqrt_q().sqrt();
    let f = match j {
        1 => ProductForm::from_factors(c0 * quarter * 2.0, vec![ProductFactor::new(q2, q2, 1)?]),
        2 => ProductForm::from_factors(c0 * quarter * 2.0, vec![ProductFactor::new(-q2, q2, 1)?]),
        3 => ProductForm::from_factors(c0, vec![ProductFactor::new(-q.q(), q2, 1)?]),
        4 => ProductForm::from_factors(c0, vec![ProductFactor::new(q.q(), q2, 1)?]),
        _ => return Err(Error::InvalidParams(format!("theta index must be 1..4, got {j}"))),
    };
    Ok(f)
}
