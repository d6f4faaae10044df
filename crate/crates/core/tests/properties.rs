use awnev::awops::{aw_basis, aw_diff, aw_diff_basis};
use awnev::expr::{compile, parse, Expr};
use awnev::funcrep::{FnEval, FunctionExpr, ProductFactor, ProductForm};
use awnev::nevanlinna::{aw_counting, characteristic, counting, Target};
use awnev::qcore::{joukowski, lift_to_z, qpoch_finite, qpoch_infinite, TruncationPolicy};
use awnev::{QParam, C64};
use proptest::prelude::*;

fn close(a: C64, b: C64, rel: f64) -> bool {
    (a - b).norm() <= rel * (1.0 + a.norm().max(b.norm()))
}

fn cplx(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(re, im)| C64::new(re, im))
}

fn qparam() -> impl Strategy<Value = QParam> {
    (0.1f64..0.8, -3.1f64..3.1).prop_map(|(m, t)| QParam::new(C64::from_polar(m, t)).unwrap())
}

fn generator() -> impl Strategy<Value = C64> {
    (0.2f64..2.0, -3.1f64..3.1).prop_map(|(m, t)| C64::from_polar(m, t))
}

fn product_form() -> impl Strategy<Value = ProductForm> {
    let factor = (generator(), prop::sample::select(vec![-2, -1, 1, 2]));
    (0.3f64..0.7, prop::collection::vec(factor, 1..4)).prop_map(|(b, fs)| {
        let base = C64::new(b, 0.0);
        let factors = fs
            .into_iter()
            .map(|(a, m)| ProductFactor::new(a, base, m).unwrap())
            .collect();
        ProductForm::from_factors(C64::new(1.0, 0.0), factors)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qpoch_finite_splits(a in cplx(2.0), q in qparam(), m in 0usize..8, n in 0usize..8) {
        let whole = qpoch_finite(a, &q, m + n);
        let split = qpoch_finite(a, &q, m) * qpoch_finite(a * q.pow(m as i64), &q, n);
        prop_assert!(close(whole, split, 1e-12));
    }

    #[test]
    fn qpoch_infinite_shifts(a in cplx(2.0), q in qparam()) {
        let p = TruncationPolicy::default();
        let lhs = qpoch_infinite(a, &q, &p).unwrap();
        let rhs = (C64::new(1.0, 0.0) - a) * qpoch_infinite(a * q.q(), &q, &p).unwrap();
        prop_assert!(close(lhs, rhs, 1e-12));
    }

    #[test]
    fn joukowski_lift_inverts(x in cplx(50.0)) {
        let z = lift_to_z(x).z;
        prop_assert!(z.norm() >= 1.0 - 1e-12);
        prop_assert!(close(joukowski(z), x, 1e-12));
    }

    #[test]
    fn aw_diff_is_linear(q in qparam(), alpha in cplx(2.0), x in cplx(3.0), a in generator(), b in generator()) {
        let f = FunctionExpr::single(ProductForm::phi_inf(a, q.q(), 1).unwrap());
        let g = FunctionExpr::single(ProductForm::phi_inf(b, q.q(), 1).unwrap());
        let p = TruncationPolicy::default();
        let h = FnEval(|y: C64| Ok(alpha * f.evaluate(y, &p)? + g.evaluate(y, &p)?));
        let lhs = aw_diff(&h, x, &q).unwrap();
        let rhs = alpha * aw_diff(&f, x, &q).unwrap() + aw_diff(&g, x, &q).unwrap();
        prop_assert!(close(lhs, rhs, 1e-9));
        let one = FnEval(|_: C64| Ok(C64::new(3.0, -1.0)));
        prop_assert!(aw_diff(&one, x, &q).unwrap().norm() < 1e-12);
    }

    #[test]
    fn aw_diff_basis_rule(q in qparam(), a in generator(), n in 1usize..6, x in cplx(2.0)) {
        let (scalar, shifted) = aw_diff_basis(n, a, &q).unwrap();
        let f = FnEval(|y: C64| Ok(aw_basis(n, a, &q, y)));
        let lhs = aw_diff(&f, x, &q).unwrap();
        let rhs = scalar * aw_basis(n - 1, shifted, &q, x);
        prop_assert!(close(lhs, rhs, 1e-8), "{lhs} vs {rhs}");
    }

    #[test]
    fn characteristic_identities(f in product_form(), r1 in 2.0f64..50.0, k in 1.5f64..20.0) {
        let fe = FunctionExpr::single(f.clone());
        let r2 = r1 * k;
        let (c1, c2) = match (characteristic(&fe, r1), characteristic(&fe, r2)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return Ok(()), // radius on a pole circle
        };
        prop_assert!((c1.t - (c1.m + c1.big_n)).abs() < 1e-9);
        prop_assert!(c1.m >= 0.0 && c1.big_n >= 0.0);
        prop_assert!(c2.big_n >= c1.big_n - 1e-12);
        prop_assert!(c2.n_count >= c1.n_count);
        for target in [Target::Zero, Target::Pole] {
            let rec = aw_counting(&f, r2, target, &QParam::real(f.factors[0].base.re).unwrap());
            let (n, big) = counting(&f, r2, target);
            prop_assert!(rec.n_aw >= 0 && rec.n_aw <= rec.classical_n);
            prop_assert_eq!(rec.classical_n, n);
            prop_assert!(rec.big_n_aw <= big + 1e-9);
        }
    }
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-3.0f64..3.0).prop_map(|v| Expr::Const(C64::new((v * 8.0).round() / 8.0, 0.0))),
        Just(Expr::Var),
        (0.1f64..1.5).prop_map(|v| Expr::PInf {
            a: C64::new((v * 10.0).round() / 10.0 + 0.05, 0.0),
            base: None
        }),
        (1u32..5).prop_map(|n| Expr::PN {
            a: C64::new(0.4, 0.1),
            n
        }),
        (1u8..=4).prop_map(Expr::Theta),
        prop::collection::vec(-2.0f64..2.0, 1..4)
            .prop_map(|cs| Expr::Poly(cs.into_iter().map(|c| C64::new((c * 4.0).round() / 4.0, 0.0)).collect())),
    ]
}

fn ast() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            (inner.clone(), -2i32..4).prop_map(|(a, k)| Expr::Pow(Box::new(a), k)),
            inner.prop_map(|a| Expr::Neg(Box::new(a))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printed_ast_reparses(e in ast()) {
        let text = e.to_string();
        let once = parse(&text).unwrap();
        let again = parse(&once.to_string()).unwrap();
        prop_assert_eq!(&once, &again);

        let q = QParam::real(0.5).unwrap();
        let p = TruncationPolicy::default();
        let x = C64::new(0.37, 0.21);
        match (compile(&text, &q), compile(&once.to_string(), &q)) {
            (Ok(f), Ok(g)) => {
                if let (Ok(a), Ok(b)) = (f.evaluate(x, &p), g.evaluate(x, &p)) {
                    prop_assert!(close(a, b, 1e-9) || !a.is_finite());
                }
            }
            (Err(a), Err(b)) => prop_assert_eq!(a.to_string(), b.to_string()),
            (a, b) => prop_assert!(false, "compile disagreed: {:?} / {:?}", a.is_ok(), b.is_ok()),
        }
    }
}
