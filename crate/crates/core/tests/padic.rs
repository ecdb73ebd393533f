use msi_forge::padic::{hensel_root, PadicError, PadicSeries, TruncatedPadic};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

const PRIMES: [u64; 4] = [2, 3, 5, 7];

#[derive(Clone, Debug)]
enum Expr {
    Leaf(i64, i64, i64),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = (-500i64..500, 1i64..60, 3i64..12).prop_map(|(n, d, m)| Expr::Leaf(n, d, m));
    leaf.prop_recursive(12, 64, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
        ]
    })
}

/// Exact rational value and tracked l-adic value, or None if a division
/// hit a divisor that is zero exactly or at its precision.
fn eval(e: &Expr, l: u64) -> Option<(BigRational, TruncatedPadic)> {
    Some(match e {
        Expr::Leaf(n, d, m) => {
            let (n, d) = (BigInt::from(*n), BigInt::from(*d));
            (
                BigRational::new(n.clone(), d.clone()),
                TruncatedPadic::from_ratio(&n, &d, l, *m),
            )
        }
        Expr::Add(a, b) => {
            let ((x, px), (y, py)) = (eval(a, l)?, eval(b, l)?);
            (x + y, px.add(&py))
        }
        Expr::Sub(a, b) => {
            let ((x, px), (y, py)) = (eval(a, l)?, eval(b, l)?);
            (x - y, px.sub(&py))
        }
        Expr::Mul(a, b) => {
            let ((x, px), (y, py)) = (eval(a, l)?, eval(b, l)?);
            (x * y, px.mul(&py))
        }
        Expr::Div(a, b) => {
            let ((x, px), (y, py)) = (eval(a, l)?, eval(b, l)?);
            if y.is_zero() {
                return None;
            }
            match px.div(&py) {
                Ok(q) => (x / y, q),
                Err(PadicError::DivisionByIndeterminate) => return None,
                Err(e) => panic!("{e}"),
            }
        }
    })
}

fn series(coeffs: &[i64], l: u64, m: i64) -> PadicSeries {
    PadicSeries::from_ints(coeffs, l, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn interval_soundness(e in expr(), li in 0usize..4) {
        let l = PRIMES[li];
        if let Some((exact, tracked)) = eval(&e, l) {
            if tracked.m > -30 {
                let reference = TruncatedPadic::from_ratio(exact.numer(), exact.denom(), l, tracked.m);
                prop_assert!(reference.agrees_with(&tracked), "{exact} vs {tracked}");
                prop_assert!(tracked.m <= reference.m);
            }
        }
    }

    #[test]
    fn integrate_then_differentiate(c in proptest::collection::vec(-1000i64..1000, 1..25), li in 0usize..4, m in 2i64..10) {
        let l = PRIMES[li];
        let s = series(&c, l, m);
        let back = s.integrate().derivative();
        prop_assert_eq!(back.len(), s.len());
        for (a, b) in back.coeffs.iter().zip(&s.coeffs) {
            prop_assert!(a.agrees_with(b));
            prop_assert_eq!(a.m, b.m);
        }
    }

    #[test]
    fn reverse_is_an_involution(c in proptest::collection::vec(-1000i64..1000, 2..16), li in 0usize..4, m in 2i64..10) {
        let l = PRIMES[li];
        let mut coeffs = vec![0i64];
        coeffs.extend(c);
        if coeffs[1] % l as i64 == 0 {
            coeffs[1] += 1;
        }
        let s = series(&coeffs, l, m);
        let r = s.reverse().unwrap();
        let n = s.len();
        let t = PadicSeries::identity(l, m, n);
        let comp = s.compose(&r).unwrap();
        for (a, b) in comp.coeffs.iter().zip(&t.coeffs) {
            prop_assert!(a.agrees_with(b));
        }
        let rr = r.reverse().unwrap();
        for (a, b) in rr.coeffs.iter().zip(&s.coeffs) {
            prop_assert!(a.agrees_with(b));
            prop_assert!(a.m >= 1);
        }
    }

    #[test]
    fn compose_is_associative(a in proptest::collection::vec(-50i64..50, 6), b in proptest::collection::vec(-50i64..50, 5), c in proptest::collection::vec(-50i64..50, 5)) {
        let l = 5;
        let f = series(&a, l, 8);
        let mut gb = vec![0]; gb.extend(b);
        let mut hc = vec![0]; hc.extend(c);
        let (g, h) = (series(&gb, l, 8), series(&hc, l, 8));
        let lhs = f.compose(&g).unwrap().compose(&h).unwrap();
        let rhs = f.compose(&g.compose(&h).unwrap()).unwrap();
        for (x, y) in lhs.coeffs.iter().zip(&rhs.coeffs) {
            prop_assert!(x.agrees_with(y));
        }
    }

    #[test]
    fn hensel_roots_are_roots(c in proptest::collection::vec(-30i64..30, 2..6), li in 1usize..4, m in 1i64..12) {
        let l = PRIMES[li];
        let poly: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
        if let Ok(roots) = hensel_root(&poly, l, m) {
            let modulus = BigInt::from(l).pow(m as u32);
            for r in roots {
                let r = r.to_bigint().unwrap();
                let v = poly.iter().rev().fold(BigInt::zero(), |acc, a| acc * &r + a);
                prop_assert!((v % &modulus).is_zero());
                prop_assert!(!r.is_negative());
            }
        }
    }
}

#[test]
fn reverse_of_t_plus_t_squared() {
    let mut c = vec![0i64, 1, 1];
    c.resize(10, 0);
    let r = series(&c, 3, 10).reverse().unwrap();
    let expected: Vec<i64> = vec![0, 1, -1, 2, -5, 14, -42, 132, -429, 1430];
    assert_eq!(r, series(&expected, 3, 10));
}

#[test]
fn integration_at_l_minus_one_loses_a_digit() {
    let s = series(&[0, 0, 5], 3, 6).integrate();
    assert_eq!(s.coeffs[3].m, 5);
    assert_eq!(s.coeffs[3].mul_int(3), TruncatedPadic::from_int(5, 3, 6));
}
