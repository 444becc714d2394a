//! Seeded generators of instanton monads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::graded::HomogeneousForm;
use crate::linalg::DenseMatrix;

use super::validate::{default_d_max, validate_monad, DEFAULT_SAMPLE_POINTS};
use super::{FormMatrix, LineComplex, Monad};

/// The symplectic form pairing coordinates (0, 1) and (2, 3).
pub fn null_correlation_symplectic<F: Field>() -> DenseMatrix<F> {
    let mut j = DenseMatrix::zeros(4, 4);
    j[(0, 1)] = F::one();
    j[(1, 0)] = -F::one();
    j[(2, 3)] = F::one();
    j[(3, 2)] = -F::one();
    j
}

/// The charge-one monad `O(-1) → O⁴ → O(1)` with `A = (x0, x1, x2, x3)ᵗ`
/// and `B = (-x1, x0, -x3, x2)`.
pub fn gen_null_correlation<F: Field>() -> Monad<F> {
    let a = FormMatrix::from_forms((0..4).map(|i| vec![HomogeneousForm::variable(i)]).collect())
        .expect("4x1");
    Monad::barth(a, null_correlation_symplectic()).expect("null correlation monad is valid")
}

#[derive(Debug, Clone, Copy)]
pub struct GeneratorOptions {
    pub max_attempts: usize,
    /// Saturation bound for the validator; `None` means `4n + 4`.
    pub d_max: Option<i64>,
    pub sample_points: usize,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        GeneratorOptions {
            max_attempts: 25,
            d_max: None,
            sample_points: DEFAULT_SAMPLE_POINTS,
        }
    }
}

/// A random charge-`n` instanton monad `W O(-1) → V O → W* O(1)`, `dim V = 2n + 2`.
///
/// `B` is drawn first and `A` is made of `n` random linear syzygies of `B`.
/// For `n ≤ 2` `B` is a uniformly random matrix of linear forms. A random
/// `n × (2n+2)` matrix has only `8 - 2n` independent linear syzygies, too few
/// once `n ≥ 3`, so there `B` is a random point of the orbit of
/// `(x0 P + x1 Q | x2 P + x3 Q)`, `P = [I | 0]`, `Q = [0 | I]`, under coordinate
/// changes and base changes of `V` and `W`. Every candidate has to pass the
/// validator and show `h¹(E(-2)) = 0`, `h⁰(E) = 0`, `h¹(E(-1)) = n`.
pub fn gen_instanton_syzygy<F: Field>(
    n: usize,
    seed: u64,
    opts: &GeneratorOptions,
) -> Result<Monad<F>> {
    if n == 0 {
        return Err(Error::InvalidInput("charge must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d_max = opts.d_max.unwrap_or_else(|| default_d_max(n));
    let mut reasons: Vec<String> = Vec::new();
    for _ in 0..opts.max_attempts {
        let b = if 8 >= 3 * n {
            random_linear_matrix(n, 2 * n + 2, &mut rng)
        } else {
            structured_orbit(n, &mut rng)
        };
        let syz = linear_syzygies(&b)?;
        if syz.len() < n {
            reasons.push(format!("only {} syzygies", syz.len()));
            continue;
        }
        let a = random_combination(&syz, n, &mut rng);
        let monad = match Monad::barth_with_b(a, b) {
            Ok(m) => m,
            Err(e) => {
                reasons.push(e.to_string());
                continue;
            }
        };
        let report = validate_monad(&monad, d_max, opts.sample_points, rng.random());
        if !report.is_valid() {
            reasons.push("not certified".into());
            continue;
        }
        let table = monad.cohomology(-2, 0)?;
        let h = |i, t| table.h(i, t).unwrap_or(usize::MAX);
        if h(1, -2) != 0 || h(0, 0) != 0 || h(1, -1) != n {
            reasons.push("instanton cohomology conditions fail".into());
            continue;
        }
        return Ok(monad);
    }
    reasons.dedup();
    Err(Error::GenerationFailed {
        attempts: opts.max_attempts,
        reason: reasons.join("; "),
    })
}

fn random_linear_form<F: Field, R: Rng>(rng: &mut R) -> HomogeneousForm<F> {
    HomogeneousForm::linear([(); 4].map(|_| F::random(rng)))
}

fn random_linear_matrix<F: Field, R: Rng>(rows: usize, cols: usize, rng: &mut R) -> FormMatrix<F> {
    FormMatrix::from_forms(
        (0..rows)
            .map(|_| (0..cols).map(|_| random_linear_form(rng)).collect())
            .collect(),
    )
    .expect("rectangular")
}

fn random_invertible<F: Field, R: Rng>(n: usize, rng: &mut R) -> DenseMatrix<F> {
    loop {
        let g = DenseMatrix::from_fn(n, n, |_, _| F::random(rng));
        if g.rank() == n {
            return g;
        }
    }
}

/// `g_W · B0(g x) · g_V⁻¹` for random invertible `g`, `g_V`, `g_W`.
fn structured_orbit<F: Field, R: Rng>(n: usize, rng: &mut R) -> FormMatrix<F> {
    let v = 2 * n + 2;
    let x = |i| HomogeneousForm::<F>::variable(i);
    // B0 = (x0 P + x1 Q | x2 P + x3 Q), P = [I | 0], Q = [0 | I], both n × (n+1)
    let mut b0: Vec<Vec<HomogeneousForm<F>>> = vec![vec![HomogeneousForm::zero(1); v]; n];
    for (r, row) in b0.iter_mut().enumerate() {
        for half in 0..2 {
            let off = half * (n + 1);
            let (p_var, q_var) = (x(2 * half), x(2 * half + 1));
            row[off + r] = row[off + r].add(&p_var).expect("linear");
            row[off + r + 1] = row[off + r + 1].add(&q_var).expect("linear");
        }
    }
    let g = random_invertible::<F, _>(4, rng);
    let gv_inv = random_invertible::<F, _>(v, rng);
    let gw = random_invertible::<F, _>(n, rng);
    let sub: Vec<Vec<HomogeneousForm<F>>> = b0
        .iter()
        .map(|r| r.iter().map(|f| f.substitute(&g)).collect())
        .collect();
    let mixed = combine(&combine_left(&gw, &sub), &gv_inv);
    FormMatrix::from_forms(mixed).expect("rectangular")
}

/// `M · C` for a matrix of forms `M` and a scalar matrix `C`.
fn combine<F: Field>(
    m: &[Vec<HomogeneousForm<F>>],
    c: &DenseMatrix<F>,
) -> Vec<Vec<HomogeneousForm<F>>> {
    m.iter()
        .map(|row| {
            (0..c.cols())
                .map(|j| {
                    row.iter()
                        .enumerate()
                        .fold(HomogeneousForm::zero(1), |acc, (k, f)| {
                            acc.add(&f.scale(&c[(k, j)])).expect("linear")
                        })
                })
                .collect()
        })
        .collect()
}

/// `C · M` for a scalar matrix `C` and a matrix of forms `M`.
fn combine_left<F: Field>(
    c: &DenseMatrix<F>,
    m: &[Vec<HomogeneousForm<F>>],
) -> Vec<Vec<HomogeneousForm<F>>> {
    let cols = m.first().map_or(0, Vec::len);
    (0..c.rows())
        .map(|i| {
            (0..cols)
                .map(|j| {
                    (0..c.cols()).fold(HomogeneousForm::zero(1), |acc, k| {
                        acc.add(&m[k][j].scale(&c[(i, k)])).expect("linear")
                    })
                })
                .collect()
        })
        .collect()
}

/// Basis of the columns of linear forms `c` with `B·c = 0`, each of length `4·cols(B)`.
fn linear_syzygies<F: Field>(b: &FormMatrix<F>) -> Result<Vec<Vec<F>>> {
    let complex = LineComplex::new(
        0,
        vec![vec![0; b.cols()], vec![1; b.rows()]],
        vec![b.clone()],
    )?;
    Ok(complex
        .sections_matrix(0, 1)
        .kernel_basis()
        .columns()
        .into_iter()
        .map(scaled)
        .collect())
}

fn scaled<F: Field>(v: Vec<F>) -> Vec<F> {
    let c = F::content_scale(&v);
    v.into_iter().map(|x| x * c.clone()).collect()
}

/// `n` random combinations of syzygy vectors, assembled into a `(2n+2) × n` matrix.
fn random_combination<F: Field, R: Rng>(syz: &[Vec<F>], n: usize, rng: &mut R) -> FormMatrix<F> {
    let v = syz[0].len() / 4;
    let mut cols: Vec<Vec<HomogeneousForm<F>>> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut acc = vec![F::zero(); syz[0].len()];
        for s in syz {
            let c = F::random(rng);
            for (a, x) in acc.iter_mut().zip(s) {
                *a = a.clone() + c.clone() * x.clone();
            }
        }
        let acc = scaled(acc);
        cols.push(
            (0..v)
                .map(|r| HomogeneousForm::new(1, acc[4 * r..4 * r + 4].to_vec()).expect("linear"))
                .collect(),
        );
    }
    FormMatrix::from_forms(
        (0..v)
            .map(|r| cols.iter().map(|c| c[r].clone()).collect())
            .collect(),
    )
    .expect("rectangular")
}
