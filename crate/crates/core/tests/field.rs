use irs_core::field::{GramForm, Mat3, QSqrt2};
use proptest::prelude::*;

fn element() -> impl Strategy<Value = QSqrt2> {
    (-50i64..50, 1i64..20, -50i64..50, 1i64..20).prop_map(|(an, ad, bn, bd)| QSqrt2::from_ratios(an, ad, bn, bd))
}

fn matrix() -> impl Strategy<Value = Mat3> {
    proptest::collection::vec(element(), 9).prop_map(|v| Mat3::from_fn(|i, j| v[3 * i + j].clone()))
}

proptest! {
    #[test]
    fn ring_axioms(x in element(), y in element(), z in element()) {
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&x - &x, QSqrt2::zero());
        prop_assert_eq!(&x * &QSqrt2::one(), x.clone());
    }

    #[test]
    fn nonzero_elements_are_invertible(x in element()) {
        match x.inverse() {
            Ok(inv) => prop_assert!((&x * &inv).is_one()),
            Err(_) => prop_assert!(x.is_zero()),
        }
    }

    #[test]
    fn norm_is_multiplicative(x in element(), y in element()) {
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
    }

    #[test]
    fn exact_order_agrees_with_floats(x in element(), y in element()) {
        let (fx, fy) = (x.to_f64(), y.to_f64());
        if (fx - fy).abs() > 1e-9 {
            prop_assert_eq!(x < y, fx < fy);
        }
        prop_assert_eq!(x.sign() as f64, if fx.abs() < 1e-12 { 0.0 } else { fx.signum() });
    }

    #[test]
    fn text_roundtrip(x in element()) {
        let back: QSqrt2 = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn matrix_inverse_and_determinant(m in matrix(), n in matrix()) {
        prop_assert_eq!(m.mul(&n).determinant(), &m.determinant() * &n.determinant());
        if let Ok(inv) = m.inverse() {
            prop_assert!(m.mul(&inv).is_identity());
        }
    }
}

#[test]
fn gram_form_is_preserved_by_its_reflections() {
    let gram = GramForm::triangle_444();
    for i in 0..3 {
        let r = irs_core::coxeter::reflection_matrix(&gram, i);
        assert!(gram.preserved_by(&r));
    }
}
