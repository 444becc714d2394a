//! Fiberwise rank certificates for the maps of a monad.
//!
//! `A` has constant rank `n` iff its maximal minors have no common projective
//! zero, which holds iff the ideal they generate contains every form of some
//! degree `d`. The graded pieces `I_d` are built incrementally as
//! `I_d = S_1·I_{d-1} + (generators of degree d)`, so the whole check is linear
//! algebra. Before that, a batch of small-height and random points is tried
//! for a cheap refutation.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::field::Field;
use crate::graded::{basis_dim, monomial_index, HomogeneousForm};
use crate::linalg::{DenseMatrix, RowSpace};

use super::{Entry, FormMatrix, Monad, TermKind};

pub const DEFAULT_SAMPLE_POINTS: usize = 16;

/// Outcome of a constant-rank check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RankCertificate<F> {
    /// The minors generate every form of this degree.
    Certified { degree: i64 },
    /// The evaluated matrix drops rank at this point.
    Refuted { point: [F; 4] },
    /// Neither outcome up to this degree.
    Inconclusive { d_max: i64 },
}

impl<F> RankCertificate<F> {
    pub fn is_certified(&self) -> bool {
        matches!(self, RankCertificate::Certified { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, RankCertificate::Refuted { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport<F> {
    pub degree_ok: bool,
    pub complex_ok: bool,
    pub a_injective: RankCertificate<F>,
    pub b_surjective: RankCertificate<F>,
    pub saturation_degree_used: i64,
}

impl<F> ValidationReport<F> {
    /// Everything certified.
    pub fn is_valid(&self) -> bool {
        self.degree_ok
            && self.complex_ok
            && self.a_injective.is_certified()
            && self.b_surjective.is_certified()
    }
}

/// Default saturation bound `4n + 4` for a monad with `dim W = n`.
pub fn default_d_max(n: usize) -> i64 {
    4 * n as i64 + 4
}

/// Check degrees, `B∘A = 0`, and constant rank of the line parts of `A` and `B`.
///
/// Rows of `A` landing in Ω terms are ignored: the line part already being
/// injective forces the whole of `A` to be.
pub fn validate_monad<F: Field>(
    m: &Monad<F>,
    d_max: i64,
    sample_points: usize,
    seed: u64,
) -> ValidationReport<F> {
    let degree_ok = m.check_degrees().is_ok();
    let complex_ok = m.check_complex().is_ok();
    let mids = m.middle_summands();
    let line_rows: Vec<usize> = (0..mids.len())
        .filter(|&i| mids[i].0 == TermKind::Line)
        .collect();
    let n_left = m.left().mult;
    let n_right = m.right().mult;

    let a_entry = |i: usize, j: usize| -> HomogeneousForm<F> {
        let r = line_rows[i];
        form_or_zero(m.a().get(r, j), mids[r].1 - m.left().twist)
    };
    let b_entry = |i: usize, j: usize| -> HomogeneousForm<F> {
        // transposed, so that B's maximal minors are taken over columns
        let c = line_rows[i];
        form_or_zero(m.b().get(j, c), m.right().twist - mids[c].1)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = candidate_points::<F>(sample_points, &mut rng);
    let (a_cert, a_deg) = certify_rank(&a_entry, line_rows.len(), n_left, d_max, &points);
    let (b_cert, b_deg) = certify_rank(&b_entry, line_rows.len(), n_right, d_max, &points);
    ValidationReport {
        degree_ok,
        complex_ok,
        a_injective: a_cert,
        b_surjective: b_cert,
        saturation_degree_used: a_deg.max(b_deg),
    }
}

fn form_or_zero<F: Field>(e: &Entry<F>, degree: i64) -> HomogeneousForm<F> {
    match e {
        Entry::Form(f) => f.clone(),
        _ => HomogeneousForm::zero(degree),
    }
}

impl<F: Field> FormMatrix<F> {
    /// Evaluate every form entry at a point; Ω entries and zeros give 0.
    pub fn evaluate(&self, p: &[F; 4]) -> DenseMatrix<F> {
        DenseMatrix::from_fn(self.rows(), self.cols(), |i, j| {
            self.form(i, j).map_or_else(F::zero, |f| f.evaluate(p))
        })
    }
}

impl<F: Field> Monad<F> {
    /// `rank A(p) < dim W`: re-checks a refutation witness for `A`.
    pub fn a_drops_rank_at(&self, p: &[F; 4]) -> bool {
        self.a().evaluate(p).rank() < self.left().mult
    }

    /// `rank B(p) < dim W*`: re-checks a refutation witness for `B`.
    pub fn b_drops_rank_at(&self, p: &[F; 4]) -> bool {
        self.b().evaluate(p).rank() < self.right().mult
    }
}

/// The 40 points of P³ with coordinates in {-1, 0, 1}, then `extra` random ones.
fn candidate_points<F: Field>(extra: usize, rng: &mut ChaCha8Rng) -> Vec<[F; 4]> {
    let mut pts = Vec::new();
    for code in 0..81u32 {
        let mut c = [0i64; 4];
        let mut v = code;
        for x in &mut c {
            *x = (v % 3) as i64 - 1;
            v /= 3;
        }
        // first nonzero coordinate equal to 1 picks one representative per point
        if c.iter().find(|&&x| x != 0) == Some(&1) {
            pts.push(c.map(F::from_i64));
        }
    }
    for _ in 0..extra {
        pts.push([(); 4].map(|_| F::random(rng)));
    }
    pts
}

/// Constant rank `k` of a tall `rows × k` matrix of forms given entrywise.
fn certify_rank<F: Field>(
    entry: &dyn Fn(usize, usize) -> HomogeneousForm<F>,
    rows: usize,
    k: usize,
    d_max: i64,
    points: &[[F; 4]],
) -> (RankCertificate<F>, i64) {
    if k == 0 {
        return (RankCertificate::Certified { degree: 0 }, 0);
    }
    let eval_rank =
        |p: &[F; 4]| DenseMatrix::from_fn(rows, k, |i, j| entry(i, j).evaluate(p)).rank();
    for p in points {
        if p.iter().any(|x| !x.is_zero()) && eval_rank(p) < k {
            return (RankCertificate::Refuted { point: p.clone() }, 0);
        }
    }
    let minors = maximal_minors(entry, rows, k);
    let mut by_degree: HashMap<i64, Vec<HomogeneousForm<F>>> = HashMap::new();
    for f in minors.into_iter().filter(|f| !f.is_zero()) {
        by_degree.entry(f.degree()).or_default().push(f);
    }
    let Some(&d_min) = by_degree.keys().min() else {
        return (RankCertificate::Inconclusive { d_max }, d_max);
    };
    let mut prev: Option<RowSpace<F>> = None;
    for d in d_min..=d_max {
        let mut space = RowSpace::new(basis_dim(d));
        if let Some(p) = &prev {
            let shifts: Vec<DenseMatrix<F>> = (0..4)
                .map(|i| HomogeneousForm::variable(i).multiplication_matrix(d - 1))
                .collect();
            'outer: for v in p.basis() {
                for s in &shifts {
                    space.insert(&s.mul_vec(v).expect("shape"));
                    if space.is_full() {
                        break 'outer;
                    }
                }
            }
        }
        for g in by_degree.get(&d).into_iter().flatten() {
            if space.is_full() {
                break;
            }
            space.insert(g.coeffs());
        }
        if space.is_full() {
            return (RankCertificate::Certified { degree: d }, d);
        }
        if space.ambient_dim() - space.rank() == 1 {
            if let Some(p) = single_point(&space, d) {
                if eval_rank(&p) < k {
                    return (RankCertificate::Refuted { point: p }, d);
                }
            }
        }
        prev = Some(space);
    }
    (RankCertificate::Inconclusive { d_max }, d_max)
}

/// When `I_d` has codimension one it is the space of forms vanishing at a
/// single point `p`, and its annihilator is evaluation at `p`.
fn single_point<F: Field>(space: &RowSpace<F>, d: i64) -> Option<[F; 4]> {
    if d < 1 {
        return None;
    }
    let ann = space.annihilator();
    let lambda = ann.first()?;
    let pure = |j: usize| {
        let mut e = [0u32; 4];
        e[j] = d as u32;
        lambda[monomial_index(&e)].clone()
    };
    let j = (0..4).find(|&j| !pure(j).is_zero())?;
    let denom = pure(j);
    let mut p = [(); 4].map(|_| F::zero());
    for (i, x) in p.iter_mut().enumerate() {
        let mut e = [0u32; 4];
        e[j] = d as u32 - 1;
        e[i] += 1;
        *x = lambda[monomial_index(&e)].clone() / denom.clone();
    }
    Some(p)
}

/// All `k × k` minors of a `rows × k` matrix of forms, by expansion along
/// rows with memoisation on the set of used columns.
pub(crate) fn maximal_minors<F: Field>(
    entry: &dyn Fn(usize, usize) -> HomogeneousForm<F>,
    rows: usize,
    k: usize,
) -> Vec<HomogeneousForm<F>> {
    let table: Vec<Vec<HomogeneousForm<F>>> = (0..rows)
        .map(|i| (0..k).map(|j| entry(i, j)).collect())
        .collect();
    let mut out = Vec::new();
    let mut subset: Vec<usize> = (0..k).collect();
    if rows < k {
        return out;
    }
    loop {
        out.push(determinant(&table, &subset));
        // next k-subset in lexicographic order
        let mut i = k;
        while i > 0 && subset[i - 1] == rows - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        subset[i - 1] += 1;
        for j in i..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
    out
}

fn determinant<F: Field>(table: &[Vec<HomogeneousForm<F>>], rows: &[usize]) -> HomogeneousForm<F> {
    let k = rows.len();
    // memo[mask] = minor on rows[k - popcount(mask)..] and columns in mask
    let mut memo: HashMap<usize, HomogeneousForm<F>> = HashMap::new();
    fn go<F: Field>(
        table: &[Vec<HomogeneousForm<F>>],
        rows: &[usize],
        mask: usize,
        memo: &mut HashMap<usize, HomogeneousForm<F>>,
    ) -> Option<HomogeneousForm<F>> {
        let k = rows.len();
        let used = mask.count_ones() as usize;
        if used == 0 {
            return None; // empty product, the constant 1
        }
        if let Some(v) = memo.get(&mask) {
            return Some(v.clone());
        }
        let r = rows[k - used];
        let mut acc: Option<HomogeneousForm<F>> = None;
        let mut sign_neg = false;
        for c in 0..table[r].len() {
            if mask & (1 << c) == 0 {
                continue;
            }
            let rest = go(table, rows, mask & !(1 << c), memo);
            let term = match rest {
                None => table[r][c].clone(),
                Some(rest) => table[r][c].multiply(&rest),
            };
            let term = if sign_neg { term.neg() } else { term };
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term).expect("minor terms share a degree"),
            });
            sign_neg = !sign_neg;
        }
        let v = acc.expect("nonempty mask");
        memo.insert(mask, v.clone());
        Some(v)
    }
    go(table, rows, (1 << k) - 1, &mut memo).unwrap_or_else(|| HomogeneousForm::constant(F::one()))
}
