use monadforge::{Field, Fp, GaussianRational, Rational};
use proptest::prelude::*;

fn check_axioms<F: Field>(a: F, b: F, c: F) {
    assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
    assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
    assert_eq!(
        (a.clone() + b.clone()) + c.clone(),
        a.clone() + (b.clone() + c.clone())
    );
    assert_eq!(
        (a.clone() * b.clone()) * c.clone(),
        a.clone() * (b.clone() * c.clone())
    );
    assert_eq!(
        a.clone() * (b.clone() + c.clone()),
        a.clone() * b.clone() + a.clone() * c.clone()
    );
    assert_eq!(a.clone() + F::zero(), a);
    assert_eq!(a.clone() * F::one(), a);
    assert_eq!(a.clone() + (-a.clone()), F::zero());
    assert_eq!(a.clone() - b.clone() + b.clone(), a);
    match a.try_inv() {
        Some(inv) => {
            assert_eq!(a.clone() * inv, F::one());
            assert_eq!(b.clone() / a.clone() * a.clone(), b);
        }
        None => assert!(a.is_zero()),
    }
    assert_eq!(F::parse_scalar(&a.to_string()).unwrap(), a);
}

fn rational(n: i64, d: i64) -> Rational {
    Rational::from_i64(n) / Rational::from_i64(d)
}

fn gaussian(re: (i64, i64), im: (i64, i64)) -> GaussianRational {
    let q = |(n, d): (i64, i64)| GaussianRational::from_i64(n) / GaussianRational::from_i64(d);
    q(re) + GaussianRational::i() * q(im)
}

fn frac() -> impl Strategy<Value = (i64, i64)> {
    (-50i64..=50, 1i64..=20)
}

fn gauss() -> impl Strategy<Value = GaussianRational> {
    (frac(), frac()).prop_map(|(r, i)| gaussian(r, i))
}

proptest! {
    #[test]
    fn small_prime(a in 0u64..7, b in 0u64..7, c in 0u64..7) {
        check_axioms(Fp::<7>::new(a), Fp::<7>::new(b), Fp::<7>::new(c));
    }

    #[test]
    fn default_prime(a in 0u64..32003, b in 0u64..32003, c in 0u64..32003) {
        check_axioms(Fp::<32003>::new(a), Fp::<32003>::new(b), Fp::<32003>::new(c));
    }

    #[test]
    fn large_prime(a in 0u64..2147483647, b in 0u64..2147483647, c in 0u64..2147483647) {
        check_axioms(Fp::<2147483647>::new(a), Fp::<2147483647>::new(b), Fp::<2147483647>::new(c));
    }

    #[test]
    fn rationals(a in frac(), b in frac(), c in frac()) {
        check_axioms(rational(a.0, a.1), rational(b.0, b.1), rational(c.0, c.1));
    }

    #[test]
    fn gaussian_rationals(a in gauss(), b in gauss(), c in gauss()) {
        check_axioms(a, b, c);
    }

    #[test]
    fn conjugation_is_an_involutive_automorphism(a in gauss(), b in gauss()) {
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!((a.clone() * b.clone()).conj(), a.conj() * b.conj());
        prop_assert_eq!((a.clone() + b.clone()).conj(), a.conj() + b.conj());
        prop_assert_eq!(GaussianRational::i().conj(), -GaussianRational::i());
    }

    #[test]
    fn fermat(a in 1u64..32003) {
        prop_assert_eq!(Fp::<32003>::new(a).pow(32002), Fp::<32003>::new(1));
    }
}
