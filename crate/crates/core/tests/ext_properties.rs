use monadforge::ext::{build_tower, class_of_f, extend_by_line, stability_check, TowerSpec};
use monadforge::monad::{
    default_d_max, gen_instanton_syzygy, gen_null_correlation, validate_monad, GeneratorOptions,
};
use monadforge::{Field, Gf32003, HomogeneousForm, Monad, TwistTerm};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type F = Gf32003;

fn base(n: usize) -> Monad<F> {
    gen_instanton_syzygy(n, 11, &GeneratorOptions::default()).unwrap()
}

fn random_form(d: i64, rng: &mut ChaCha8Rng) -> HomogeneousForm<F> {
    if d < 0 {
        return HomogeneousForm::zero(d);
    }
    let len = monadforge::graded::basis_dim(d);
    HomogeneousForm::new(d, (0..len).map(|_| F::random(rng)).collect()).unwrap()
}

/// A random row of `O(k)`-extension data over the left term `W ⊗ O(-1)`.
fn random_row(m: &Monad<F>, k: i64, rng: &mut ChaCha8Rng) -> Vec<HomogeneousForm<F>> {
    (0..m.left().mult)
        .map(|_| random_form(k + 1, rng))
        .collect()
}

/// `g·A` for a random `g: middle → O(k)`.
fn random_coboundary(m: &Monad<F>, k: i64, rng: &mut ChaCha8Rng) -> Vec<HomogeneousForm<F>> {
    let g: Vec<HomogeneousForm<F>> = (0..m.middle_dim()).map(|_| random_form(k, rng)).collect();
    (0..m.left().mult)
        .map(|j| {
            (0..m.middle_dim()).fold(HomogeneousForm::zero(k + 1), |acc, i| {
                match m.a().form(i, j) {
                    Some(a) if k >= 0 => acc.add(&g[i].multiply(a)).unwrap(),
                    _ => acc,
                }
            })
        })
        .collect()
}

fn add_rows(f: &[HomogeneousForm<F>], g: &[HomogeneousForm<F>]) -> Vec<HomogeneousForm<F>> {
    f.iter()
        .zip(g)
        .map(|(a, b)| {
            if a.degree() < 0 {
                a.clone()
            } else {
                a.add(b).unwrap()
            }
        })
        .collect()
}

fn chi_line(k: i64, t: i64) -> i64 {
    TwistTerm::line(1, k).chi().eval(t)
}

#[test]
fn class_space_dimension_matches_cohomology() {
    for n in [1, 2] {
        let m = base(n);
        let dual = m.dual().unwrap().cohomology(-1, 3).unwrap();
        for k in -1..=3 {
            let c = class_of_f(&m, k, &vec![HomogeneousForm::zero(k + 1); n]).unwrap();
            assert!(c.is_zero());
            assert_eq!(Some(c.quotient_dim()), dual.h(1, k), "n = {n}, k = {k}");
        }
    }
}

#[test]
fn two_step_tower_is_additive() {
    let m = gen_null_correlation::<F>();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let spec = TowerSpec {
        steps: vec![
            (0, random_row(&m, 0, &mut rng)),
            (-1, random_row(&m, -1, &mut rng)),
        ],
        base: m.clone(),
    };
    let stages = build_tower(&spec).unwrap();
    let top = stages.last().unwrap().cohomology(-3, 3).unwrap();
    let bottom = m.cohomology(-3, 3).unwrap();
    for t in -3..=3 {
        let want = bottom.alternating_sum(t).unwrap() + chi_line(0, t) + chi_line(-1, t);
        assert_eq!(top.alternating_sum(t), Some(want));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn coboundaries_do_not_change_the_class(seed in any::<u64>(), k in -1i64..=2) {
        let m = base(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_row(&m, k, &mut rng);
        let moved = add_rows(&f, &random_coboundary(&m, k, &mut rng));
        prop_assert_eq!(class_of_f(&m, k, &f).unwrap(), class_of_f(&m, k, &moved).unwrap());
        let e = extend_by_line(&m, k, &f).unwrap();
        let e_moved = extend_by_line(&m, k, &moved).unwrap();
        prop_assert_eq!(e.cohomology(-2, 2).unwrap(), e_moved.cohomology(-2, 2).unwrap());
    }

    #[test]
    fn extensions_validate_and_are_additive(seed in any::<u64>(), k in -1i64..=2) {
        let m = base(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = extend_by_line(&m, k, &random_row(&m, k, &mut rng)).unwrap();
        prop_assert!(validate_monad(&e, default_d_max(2), 16, seed).is_valid());
        let te = e.cohomology(-3, 3).unwrap();
        let tf = m.cohomology(-3, 3).unwrap();
        prop_assert!(te.euler_consistent());
        for t in -3..=3 {
            prop_assert_eq!(te.alternating_sum(t).unwrap(), tf.alternating_sum(t).unwrap() + chi_line(k, t));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn stability_routes_agree(seed in any::<u64>(), split in 0u8..4) {
        let m = base(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // one draw in four is the split extension
        let f = if split == 0 { vec![HomogeneousForm::zero(0); 2] } else { random_row(&m, -1, &mut rng) };
        let r = stability_check(&extend_by_line(&m, -1, &f).unwrap()).unwrap();
        prop_assert!(r.routes_agree, "{:?}", r);
        prop_assert_eq!(r.class_nonzero, f.iter().any(|g| !g.is_zero()));
        if !r.class_nonzero {
            prop_assert_eq!(r.h0_edual_minus1, 1);
        }
    }
}
