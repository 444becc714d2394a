//! Restriction of monads to lines, splitting types and jumping-line scans.
//!
//! On a line `L ≅ P¹` the restricted bundle is `⊕ O(aᵢ)`. For `t ≥ 0` the
//! sections of `E|_L(t)` are the kernel of `B` on sections modulo the image of
//! the left term, since `H¹(O_{P¹}(t - 1)) = 0`. At `t = -1` they are the
//! sections of `E|_L` vanishing at the point `(1 : 0)`. Doing the same for the
//! dual monad gives `#{aᵢ ≤ a}` for `a ≥ 0`, and together these pin down the
//! multiset.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Field, GaussianRational};
use crate::graded::{binary_dim, BinaryForm};
use crate::linalg::DenseMatrix;
use crate::monad::{summands, Entry, Monad};

/// The line through two independent points.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Line<F> {
    p: [F; 4],
    q: [F; 4],
}

impl<F: Field> Line<F> {
    pub fn new(p: [F; 4], q: [F; 4]) -> Result<Self> {
        let m = DenseMatrix::from_rows(vec![p.to_vec(), q.to_vec()])?;
        if m.rank() < 2 {
            return Err(Error::DegenerateLine);
        }
        Ok(Line { p, q })
    }

    pub fn p(&self) -> &[F; 4] {
        &self.p
    }

    pub fn q(&self) -> &[F; 4] {
        &self.q
    }

    /// `s·p + t·q`.
    pub fn point(&self, s: &F, t: &F) -> [F; 4] {
        std::array::from_fn(|i| s.clone() * self.p[i].clone() + t.clone() * self.q[i].clone())
    }

    /// Whether `x` lies on the line.
    pub fn contains(&self, x: &[F; 4]) -> bool {
        DenseMatrix::from_rows(vec![self.p.to_vec(), self.q.to_vec(), x.to_vec()])
            .expect("3x4")
            .rank()
            == 2
    }
}

/// The real structure `(z0, z1, z2, z3) ↦ (−z̄1, z̄0, −z̄3, z̄2)`.
pub fn sigma(x: &[GaussianRational; 4]) -> [GaussianRational; 4] {
    [-x[1].conj(), x[0].conj(), -x[3].conj(), x[2].conj()]
}

/// The σ-invariant line through `x` and `σ(x)`.
pub fn real_line(x: &[GaussianRational; 4]) -> Result<Line<GaussianRational>> {
    if x.iter().all(|c| c.is_zero()) {
        return Err(Error::InvalidInput("the zero vector is not a point".into()));
    }
    Line::new(x.clone(), sigma(x))
}

/// Image of a line under σ.
pub fn sigma_line(l: &Line<GaussianRational>) -> Line<GaussianRational> {
    Line::new(sigma(&l.p), sigma(&l.q)).expect("σ is injective on C⁴")
}

/// A monad restricted to a line: terms and maps of binary forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedMonad<F> {
    left: Vec<i64>,
    middle: Vec<i64>,
    right: Vec<i64>,
    /// `A|_L`, rows indexed by middle summands.
    a: Vec<Vec<BinaryForm<F>>>,
    /// `B|_L`, rows indexed by right summands.
    b: Vec<Vec<BinaryForm<F>>>,
}

fn entry_on_line<F: Field>(e: &Entry<F>, degree: i64, l: &Line<F>) -> BinaryForm<F> {
    match e {
        Entry::Form(f) => f.restrict_unchecked(&l.p, &l.q),
        _ => BinaryForm::zero(degree),
    }
}

fn evaluate<F: Field>(m: &[Vec<BinaryForm<F>>], cols: usize, s: &F, t: &F) -> DenseMatrix<F> {
    DenseMatrix::from_fn(m.len(), cols, |i, j| m[i][j].evaluate(s, t))
}

/// Substitute `x ↦ s·p + t·q` in every entry.
pub fn restrict_monad<F: Field>(m: &Monad<F>, l: &Line<F>) -> Result<RestrictedMonad<F>> {
    if m.has_omega() {
        return Err(Error::UnsupportedTerm("restriction of Ω terms".into()));
    }
    let left: Vec<i64> = summands(&[*m.left()]).into_iter().map(|s| s.1).collect();
    let middle: Vec<i64> = m.middle_summands().into_iter().map(|s| s.1).collect();
    let right: Vec<i64> = summands(&[*m.right()]).into_iter().map(|s| s.1).collect();
    let a = (0..middle.len())
        .map(|r| {
            (0..left.len())
                .map(|c| entry_on_line(m.a().get(r, c), middle[r] - left[c], l))
                .collect()
        })
        .collect();
    let b = (0..right.len())
        .map(|r| {
            (0..middle.len())
                .map(|c| entry_on_line(m.b().get(r, c), right[r] - middle[c], l))
                .collect()
        })
        .collect();
    let rm = RestrictedMonad {
        left,
        middle,
        right,
        a,
        b,
    };
    // fiber ranks at a few chart points (s, t) = (1, j) and (0, 1)
    let max_deg = rm
        .middle
        .iter()
        .chain(&rm.right)
        .max()
        .copied()
        .unwrap_or(0)
        - rm.left.iter().chain(&rm.middle).min().copied().unwrap_or(0);
    let samples = 2 * max_deg.max(1) + 2;
    let mut pts = vec![(F::zero(), F::one())];
    pts.extend((0..samples).map(|j| (F::one(), F::from_i64(j))));
    for (s, t) in &pts {
        if evaluate(&rm.a, rm.left.len(), s, t).rank() < rm.left.len() {
            return Err(Error::DegenerateRestriction(format!(
                "A drops rank at (s : t) = ({s} : {t})"
            )));
        }
        if evaluate(&rm.b, rm.middle.len(), s, t).rank() < rm.right.len() {
            return Err(Error::DegenerateRestriction(format!(
                "B drops rank at (s : t) = ({s} : {t})"
            )));
        }
    }
    Ok(rm)
}

impl<F: Field> RestrictedMonad<F> {
    pub fn a(&self) -> &[Vec<BinaryForm<F>>] {
        &self.a
    }

    pub fn b(&self) -> &[Vec<BinaryForm<F>>] {
        &self.b
    }

    pub fn rank(&self) -> i64 {
        self.middle.len() as i64 - self.left.len() as i64 - self.right.len() as i64
    }

    pub fn c1(&self) -> i64 {
        self.middle.iter().sum::<i64>()
            - self.left.iter().sum::<i64>()
            - self.right.iter().sum::<i64>()
    }

    /// `B|_L ∘ A|_L`, entry by entry.
    pub fn composite_is_zero(&self) -> bool {
        (0..self.right.len()).all(|r| {
            (0..self.left.len()).all(|c| {
                let mut acc = BinaryForm::<F>::zero(self.right[r] - self.left[c]);
                for k in 0..self.middle.len() {
                    let p = self.b[r][k].multiply(&self.a[k][c]);
                    if p.degree() == acc.degree() {
                        acc = BinaryForm::new(
                            acc.degree(),
                            acc.coeffs()
                                .iter()
                                .zip(p.coeffs())
                                .map(|(x, y)| x.clone() + y.clone())
                                .collect(),
                        )
                        .expect("same length");
                    }
                }
                acc.is_zero()
            })
        })
    }

    /// Matrix of `B|_L` on sections of twist `t`.
    fn b_sections(&self, t: i64) -> DenseMatrix<F> {
        let rdims: Vec<usize> = self.right.iter().map(|&s| binary_dim(s + t)).collect();
        let cdims: Vec<usize> = self.middle.iter().map(|&s| binary_dim(s + t)).collect();
        let mut m = DenseMatrix::zeros(rdims.iter().sum(), cdims.iter().sum());
        let mut r0 = 0;
        for (r, &rd) in rdims.iter().enumerate() {
            let mut c0 = 0;
            for (c, &cd) in cdims.iter().enumerate() {
                if rd > 0 && cd > 0 && !self.b[r][c].is_zero() {
                    m.set_block(
                        r0,
                        c0,
                        &self.b[r][c].multiplication_matrix(self.middle[c] + t),
                    );
                }
                c0 += cd;
            }
            r0 += rd;
        }
        m
    }

    /// `h⁰(E|_L(t))` for `t ≥ -1`.
    pub fn h0(&self, t: i64) -> Result<usize> {
        if t < -1 {
            return Err(Error::InvalidInput(
                "sections are computed for t >= -1".into(),
            ));
        }
        if t >= 0 {
            let kernel = self.b_sections(t).kernel_basis().cols();
            let left: usize = self.left.iter().map(|&s| binary_dim(s + t)).sum();
            return Ok(kernel - left);
        }
        // sections of E|_L vanishing at (1 : 0)
        let h0 = self.h0(0)?;
        let kernel = self.b_sections(0).kernel_basis();
        let one = F::one();
        let zero = F::zero();
        let a_at = evaluate(&self.a, self.left.len(), &one, &zero);
        let mut evals: Vec<Vec<F>> = Vec::with_capacity(kernel.cols());
        for col in kernel.columns() {
            // coefficient of s^d in each middle block is the value at (1 : 0)
            let mut off = 0;
            let mut v = Vec::with_capacity(self.middle.len());
            for &s in &self.middle {
                let d = binary_dim(s);
                v.push(if d > 0 { col[off].clone() } else { F::zero() });
                off += d;
            }
            evals.push(v);
        }
        let fibers = DenseMatrix::from_columns(self.middle.len(), &evals)?;
        let rank_with = fibers.hstack(&a_at)?.rank();
        Ok(h0 - (rank_with - a_at.rank()))
    }

    /// The restriction of the dual monad.
    pub fn dual(&self) -> Self {
        let neg = |v: &[i64]| v.iter().map(|x| -x).collect::<Vec<_>>();
        let transpose = |m: &[Vec<BinaryForm<F>>], cols: usize| -> Vec<Vec<BinaryForm<F>>> {
            (0..cols)
                .map(|j| m.iter().map(|row| row[j].clone()).collect())
                .collect()
        };
        RestrictedMonad {
            left: neg(&self.right),
            middle: neg(&self.middle),
            right: neg(&self.left),
            a: transpose(&self.b, self.middle.len()),
            b: transpose(&self.a, self.left.len()),
        }
    }
}

/// Degrees `a₁ ≥ … ≥ a_r` with `E|_L ≅ ⊕ O(aᵢ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SplittingType(pub Vec<i64>);

impl SplittingType {
    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }

    /// `h⁰(⊕ O(aᵢ + t))`.
    pub fn h0(&self, t: i64) -> usize {
        self.0.iter().map(|&a| binary_dim(a + t)).sum()
    }

    pub fn negated(&self) -> Self {
        let mut v: Vec<i64> = self.0.iter().map(|a| -a).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        SplittingType(v)
    }
}

/// Largest window tried before giving up.
pub const MAX_WINDOW: i64 = 64;

/// Splitting type of `E|_L`, starting with window `d` and enlarging it until
/// both difference sequences reach the rank.
pub fn splitting_type<F: Field>(m: &Monad<F>, l: &Line<F>, d: i64) -> Result<SplittingType> {
    splitting_type_restricted(&restrict_monad(m, l)?, d)
}

pub fn splitting_type_restricted<F: Field>(
    rm: &RestrictedMonad<F>,
    d: i64,
) -> Result<SplittingType> {
    let r = rm.rank();
    if r < 0 {
        return Err(Error::ShapeError("negative rank".into()));
    }
    let r = r as usize;
    let dual = rm.dual();
    let mut window = d.max(2);
    let mut h = vec![rm.h0(-1)?];
    let mut hd = vec![dual.h0(-1)?];
    loop {
        while (h.len() as i64) < window + 2 {
            let t = h.len() as i64 - 1;
            h.push(rm.h0(t)?);
            hd.push(dual.h0(t)?);
        }
        // #{aᵢ ≥ -t} = h⁰(t) − h⁰(t-1) for t ≥ 0
        let ge = |t: usize| h[t + 1] - h[t];
        let le = |t: usize| hd[t + 1] - hd[t];
        let w = window as usize;
        if ge(w) == r && le(w) == r {
            let mut out = Vec::with_capacity(r);
            for a in 1..=w {
                out.extend(std::iter::repeat_n(a as i64, le(a) - le(a - 1)));
            }
            let m0 = ge(0) + le(0) - r;
            out.extend(std::iter::repeat_n(0, m0));
            for a in 1..=w {
                out.extend(std::iter::repeat_n(-(a as i64), ge(a) - ge(a - 1)));
            }
            out.sort_unstable_by(|a, b| b.cmp(a));
            let st = SplittingType(out);
            debug_assert_eq!(st.0.len(), r);
            debug_assert_eq!(st.sum(), rm.c1());
            return Ok(st);
        }
        if window >= MAX_WINDOW {
            return Err(Error::WindowTooSmall(window));
        }
        window = (2 * window).min(MAX_WINDOW);
    }
}

/// How lines are drawn for a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineSampler {
    /// Points with integer coordinates in `[-bound, bound]`. Small heights
    /// hit special lines with visible frequency.
    SmallHeight { bound: i64 },
    /// Points drawn with [`Field::random`].
    Uniform,
}

impl Default for LineSampler {
    fn default() -> Self {
        LineSampler::SmallHeight { bound: 2 }
    }
}

fn draw_point<F: Field>(sampler: LineSampler, rng: &mut ChaCha8Rng) -> [F; 4] {
    match sampler {
        LineSampler::SmallHeight { bound } => {
            [(); 4].map(|_| F::from_i64(rng.random_range(-bound..=bound)))
        }
        LineSampler::Uniform => [(); 4].map(|_| F::random(rng)),
    }
}

/// `count` lines, drawn deterministically from `seed`.
pub fn sample_lines<F: Field>(count: usize, seed: u64, sampler: LineSampler) -> Vec<Line<F>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = draw_point(sampler, &mut rng);
        let q = draw_point(sampler, &mut rng);
        if let Ok(l) = Line::new(p, q) {
            out.push(l);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport<F> {
    pub seed: u64,
    pub lines_checked: usize,
    /// The most frequent splitting type.
    pub generic: SplittingType,
    /// Number of lines per splitting type.
    pub histogram: BTreeMap<SplittingType, usize>,
    /// Lines whose type differs from the generic one, in sampling order.
    pub jumping: Vec<(Line<F>, SplittingType)>,
}

/// Splitting types on `count` sampled lines; results are merged in sampling order.
pub fn scan_lines<F: Field>(
    m: &Monad<F>,
    count: usize,
    seed: u64,
    sampler: LineSampler,
) -> Result<ScanReport<F>> {
    let lines = sample_lines::<F>(count, seed, sampler);
    let types: Vec<SplittingType> = lines
        .par_iter()
        .map(|l| splitting_type(m, l, 4))
        .collect::<Result<_>>()?;
    let mut histogram: BTreeMap<SplittingType, usize> = BTreeMap::new();
    for t in &types {
        *histogram.entry(t.clone()).or_default() += 1;
    }
    let generic = histogram
        .iter()
        .fold(
            None::<(&SplittingType, usize)>,
            |best, (t, &c)| match best {
                Some((_, bc)) if bc >= c => best,
                _ => Some((t, c)),
            },
        )
        .map(|(t, _)| t.clone())
        .unwrap_or_else(|| SplittingType(Vec::new()));
    let jumping = lines
        .into_iter()
        .zip(types)
        .filter(|(_, t)| *t != generic)
        .collect();
    Ok(ScanReport {
        seed,
        lines_checked: count,
        generic,
        histogram,
        jumping,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealCheck {
    pub all_trivial: bool,
    pub lines_checked: usize,
    pub witnesses: Vec<(Line<GaussianRational>, SplittingType)>,
}

/// Random points with small Gaussian-integer coordinates, not all zero.
pub fn sample_gaussian_points(count: usize, seed: u64) -> Vec<[GaussianRational; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: [GaussianRational; 4] = [(); 4].map(|_| {
            GaussianRational::from_parts(rng.random_range(-3..=3), rng.random_range(-3..=3))
        });
        if x.iter().any(|c| !c.is_zero()) {
            out.push(x);
        }
    }
    out
}

/// Splitting type on `samples` random real lines; all must be trivial.
pub fn check_real_triviality(
    m: &Monad<GaussianRational>,
    samples: usize,
    seed: u64,
) -> Result<RealCheck> {
    let lines: Vec<Line<GaussianRational>> = sample_gaussian_points(samples, seed)
        .iter()
        .map(real_line)
        .collect::<Result<_>>()?;
    let types: Vec<SplittingType> = lines
        .par_iter()
        .map(|l| splitting_type(m, l, 4))
        .collect::<Result<_>>()?;
    let witnesses: Vec<_> = lines
        .into_iter()
        .zip(types)
        .filter(|(_, t)| !t.is_trivial())
        .collect();
    Ok(RealCheck {
        all_trivial: witnesses.is_empty(),
        lines_checked: samples,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;
    use crate::graded::HomogeneousForm;
    use crate::monad::{gen_null_correlation, FormMatrix, TwistTerm};

    type F = Fp<32003>;

    fn e(i: usize) -> [F; 4] {
        std::array::from_fn(|j| if i == j { F::new(1) } else { F::new(0) })
    }

    #[test]
    fn restriction_of_null_correlation() {
        let m = gen_null_correlation::<F>();
        let rm = restrict_monad(&m, &Line::new(e(0), e(1)).unwrap()).unwrap();
        let col: Vec<Vec<F>> = rm.a().iter().map(|r| r[0].coeffs().to_vec()).collect();
        let (one, zero) = (F::new(1), F::new(0));
        assert_eq!(
            col,
            vec![
                vec![one, zero],
                vec![zero, one],
                vec![zero, zero],
                vec![zero, zero]
            ]
        );
        assert!(rm.composite_is_zero());
    }

    #[test]
    fn null_correlation_types() {
        let m = gen_null_correlation::<F>();
        // ω(e0, e2) = 0: a jumping line
        let jump = splitting_type(&m, &Line::new(e(0), e(2)).unwrap(), 2).unwrap();
        assert_eq!(jump, SplittingType(vec![1, -1]));
        let generic = splitting_type(&m, &Line::new(e(0), e(1)).unwrap(), 2).unwrap();
        assert_eq!(generic, SplittingType(vec![0, 0]));
    }

    #[test]
    fn single_line_bundle_type() {
        for a in -3..=3 {
            let m = Monad::<F>::new(
                TwistTerm::line(0, -1),
                vec![TwistTerm::line(1, a)],
                TwistTerm::line(0, 1),
                FormMatrix::zeros(1, 0),
                FormMatrix::zeros(0, 1),
                None,
            )
            .unwrap();
            let st = splitting_type(&m, &Line::new(e(0), e(3)).unwrap(), 2).unwrap();
            assert_eq!(st, SplittingType(vec![a]));
        }
        // large degrees force the window to grow
        let m = Monad::<F>::new(
            TwistTerm::line(0, -1),
            vec![TwistTerm::line(1, 9), TwistTerm::line(1, -7)],
            TwistTerm::line(0, 1),
            FormMatrix::zeros(2, 0),
            FormMatrix::zeros(0, 2),
            None,
        )
        .unwrap();
        assert_eq!(
            splitting_type(&m, &Line::new(e(1), e(2)).unwrap(), 2).unwrap(),
            SplittingType(vec![9, -7])
        );
    }

    #[test]
    fn recovered_type_reproduces_sections() {
        let m = gen_null_correlation::<F>();
        for l in sample_lines::<F>(30, 4, LineSampler::default()) {
            let rm = restrict_monad(&m, &l).unwrap();
            let st = splitting_type_restricted(&rm, 3).unwrap();
            assert_eq!(st.sum(), 0);
            for t in -1..=5 {
                assert_eq!(st.h0(t), rm.h0(t).unwrap());
            }
            assert_eq!(
                splitting_type_restricted(&rm.dual(), 3).unwrap(),
                st.negated()
            );
        }
    }

    #[test]
    fn sigma_examples() {
        let g = |re, im| GaussianRational::from_parts(re, im);
        let x = [g(1, 0), g(0, 0), g(0, 0), g(0, 0)];
        assert_eq!(sigma(&x), [g(0, 0), g(1, 0), g(0, 0), g(0, 0)]);
        for x in sample_gaussian_points(20, 1) {
            let neg = x.clone().map(|c| -c);
            assert_eq!(sigma(&sigma(&x)), neg);
            let l = real_line(&x).unwrap();
            assert!(l.contains(&sigma(l.p())) && l.contains(&sigma(l.q())));
        }
    }

    #[test]
    fn extension_has_type_with_negative_entry() {
        let m = gen_null_correlation::<F>();
        let ext =
            crate::ext::extend_by_line(&m, -1, &[HomogeneousForm::constant(F::new(1))]).unwrap();
        let r = scan_lines(&ext, 40, 2, LineSampler::Uniform).unwrap();
        assert_eq!(r.generic, SplittingType(vec![0, 0, -1]));
    }
}
