use monadforge::lines::{
    check_real_triviality, real_line, restrict_monad, sample_gaussian_points, sample_lines,
    scan_lines, sigma, sigma_line, splitting_type, Line, LineSampler,
};
use monadforge::monad::{gen_instanton_syzygy, gen_null_correlation, GeneratorOptions};
use monadforge::Field;
use monadforge::{GaussianRational, Gf32003, Monad, Rational};
use proptest::prelude::*;

fn instanton(n: usize) -> Monad<Gf32003> {
    gen_instanton_syzygy(n, 5, &GeneratorOptions::default()).unwrap()
}

fn gaussian_instanton(n: usize) -> Monad<GaussianRational> {
    gen_instanton_syzygy::<Rational>(n, 5, &GeneratorOptions::default())
        .unwrap()
        .lift()
        .unwrap()
}

#[test]
fn sigma_squares_to_minus_identity() {
    for x in sample_gaussian_points(100, 8) {
        let back = sigma(&sigma(&x));
        assert!(x.iter().zip(&back).all(|(a, b)| *b == -a.clone()));
        assert!(real_line(&x).unwrap().contains(&sigma(&x)));
    }
}

#[test]
fn real_lines_are_trivial_for_real_instantons() {
    // charge two carries large integer coefficients, so fewer lines
    for (n, lines) in [(1, 20), (2, 3)] {
        let r = check_real_triviality(&gaussian_instanton(n), lines, 3).unwrap();
        assert!(r.all_trivial, "n = {n}: {:?}", r.witnesses);
    }
}

#[test]
fn generic_type_is_balanced_and_jumps_recheck() {
    let m = gen_null_correlation::<Gf32003>();
    let scan = scan_lines(&m, 200, 1, LineSampler::default()).unwrap();
    assert_eq!(scan.generic.0, vec![0, 0]);
    for (l, t) in &scan.jumping {
        assert_eq!(t.0, vec![1, -1]);
        assert_eq!(splitting_type(&m, l, 2).unwrap(), *t);
        assert_eq!(
            splitting_type(&m.dual().unwrap(), l, 2).unwrap(),
            t.negated()
        );
    }
}

fn line_from(coords: &[i64]) -> Option<Line<Gf32003>> {
    let pt = |o: usize| [0, 1, 2, 3].map(|i| Gf32003::from_i64(coords[o + i]));
    Line::new(pt(0), pt(4)).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn splitting_types_are_consistent(coords in proptest::collection::vec(-2i64..=2, 8), n in 1usize..=2) {
        let Some(l) = line_from(&coords) else { return Ok(()) };
        let m = instanton(n);
        let t = splitting_type(&m, &l, 4).unwrap();
        prop_assert_eq!(t.0.len() as i64, m.rank());
        prop_assert_eq!(t.sum(), m.c1());
        let rm = restrict_monad(&m, &l).unwrap();
        for s in -1..=4 {
            prop_assert_eq!(t.h0(s), rm.h0(s).unwrap());
        }
        prop_assert_eq!(splitting_type(&m.dual().unwrap(), &l, 4).unwrap(), t.negated());
    }

    #[test]
    fn sigma_preserves_splitting_type(seed in 0u64..10_000) {
        let m = gaussian_instanton(1);
        let l = sample_lines::<GaussianRational>(1, seed, LineSampler::SmallHeight { bound: 1 }).remove(0);
        prop_assert_eq!(splitting_type(&m, &l, 4).unwrap(), splitting_type(&m, &sigma_line(&l), 4).unwrap());
    }
}

#[test]
fn generic_type_over_uniform_lines() {
    let m = instanton(2);
    let scan = scan_lines(&m, 100, 4, LineSampler::Uniform).unwrap();
    assert_eq!(scan.generic.0, vec![0, 0]);
    assert!(scan.histogram[&scan.generic] >= 95);
}
