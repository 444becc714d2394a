//! Hypercohomology of short complexes of sums of line bundles on P³.
//!
//! Only `H⁰` and `H³` of a line bundle can be nonzero, so the hypercohomology
//! spectral sequence of a complex `P•` has two rows. The row `q = 0` is the
//! complex of global sections `Γ(P•(t))`, the row `q = 3` is the complex
//! `H³(P•(t))`, realised through `H³(O(s)) ≅ S_{-s-4}^*` with transposed
//! multiplication matrices. The only differential that could connect the rows
//! is `d₄`, which needs five consecutive terms, so for complexes of length at
//! most four the sequence degenerates and every `h^i` is a sum of two ranks.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::graded::{basis_dim, HomogeneousForm};
use crate::linalg::DenseMatrix;

use super::{Entry, FormMatrix};

/// Maximum number of terms for which the two-row argument applies.
pub const MAX_TERMS: usize = 4;

/// A complex `P_start → P_{start+1} → …` of sums of line bundles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineComplex<F> {
    start: i64,
    terms: Vec<Vec<i64>>,
    maps: Vec<FormMatrix<F>>,
}

impl<F: Field> LineComplex<F> {
    /// `terms[j]` lists the twists of the summands in degree `start + j`;
    /// `maps[j]` goes from `terms[j]` to `terms[j + 1]`.
    pub fn new(start: i64, terms: Vec<Vec<i64>>, maps: Vec<FormMatrix<F>>) -> Result<Self> {
        if terms.is_empty() || maps.len() + 1 != terms.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} terms need {} maps, got {}",
                terms.len(),
                terms.len().saturating_sub(1),
                maps.len()
            )));
        }
        for (j, m) in maps.iter().enumerate() {
            let (src, dst) = (&terms[j], &terms[j + 1]);
            if m.rows() != dst.len() || m.cols() != src.len() {
                return Err(Error::DimensionMismatch(format!(
                    "map {j} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    dst.len(),
                    src.len()
                )));
            }
            for (r, &tr) in dst.iter().enumerate() {
                for (c, &tc) in src.iter().enumerate() {
                    match m.get(r, c) {
                        Entry::Zero => {}
                        Entry::Form(f) => {
                            let want = tr - tc;
                            if f.degree() != want && !(want < 0 && f.degree() < 0) {
                                return Err(Error::DegreeMismatch {
                                    location: format!("map {j} entry ({r}, {c})"),
                                    expected: want,
                                    found: f.degree(),
                                });
                            }
                        }
                        Entry::Omega(_) => {
                            return Err(Error::UnsupportedTerm(
                                "Ω-section inside a line complex".into(),
                            ))
                        }
                    }
                }
            }
        }
        Ok(LineComplex { start, terms, maps })
    }

    /// A single sum of line bundles in degree 0.
    pub fn sum(twists: Vec<i64>) -> Self {
        LineComplex {
            start: 0,
            terms: vec![twists],
            maps: Vec::new(),
        }
    }

    /// Koszul resolution of `Ω^p(k)` placed in degrees `0..=p`:
    /// `[U O(k-1) → O(k)]` for `p = 1`, `[∧²U O(k-2) → U O(k-1) → O(k)]` for `p = 2`.
    pub fn koszul(p: u8, k: i64) -> Self {
        let kappa1 = koszul_kappa1::<F>();
        match p {
            1 => LineComplex {
                start: 0,
                terms: vec![vec![k - 1; 4], vec![k]],
                maps: vec![kappa1],
            },
            2 => LineComplex {
                start: 0,
                terms: vec![vec![k - 2; 6], vec![k - 1; 4], vec![k]],
                maps: vec![koszul_kappa2(), kappa1],
            },
            _ => panic!("Koszul resolutions are provided for p = 1, 2"),
        }
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn terms(&self) -> &[Vec<i64>] {
        &self.terms
    }

    pub fn maps(&self) -> &[FormMatrix<F>] {
        &self.maps
    }

    /// Every composite of consecutive maps vanishes identically.
    pub fn is_complex(&self) -> bool {
        self.maps.windows(2).all(|w| {
            w[1].compose_forms(&w[0], &|_| false)
                .iter()
                .all(|e| e.as_ref().is_none_or(HomogeneousForm::is_zero))
        })
    }

    /// Matrix of `Γ(P_j(t)) → Γ(P_{j+1}(t))`.
    pub fn sections_matrix(&self, j: usize, t: i64) -> DenseMatrix<F> {
        let (src, dst) = (&self.terms[j], &self.terms[j + 1]);
        let row_dims: Vec<usize> = dst.iter().map(|&s| basis_dim(s + t)).collect();
        let col_dims: Vec<usize> = src.iter().map(|&s| basis_dim(s + t)).collect();
        let mut m = DenseMatrix::zeros(row_dims.iter().sum(), col_dims.iter().sum());
        let mut r0 = 0;
        for (r, &rd) in row_dims.iter().enumerate() {
            let mut c0 = 0;
            for (c, &cd) in col_dims.iter().enumerate() {
                if rd > 0 && cd > 0 {
                    if let Some(f) = self.maps[j].form(r, c) {
                        if !f.is_zero() {
                            m.set_block(r0, c0, &f.multiplication_matrix(src[c] + t));
                        }
                    }
                }
                c0 += cd;
            }
            r0 += rd;
        }
        m
    }

    /// Matrix of the Serre-dual map `S_{-s'-t-4}(P_{j+1}) → S_{-s-t-4}(P_j)`, whose
    /// transpose is `H³(P_j(t)) → H³(P_{j+1}(t))`.
    pub fn top_dual_matrix(&self, j: usize, t: i64) -> DenseMatrix<F> {
        let (src, dst) = (&self.terms[j], &self.terms[j + 1]);
        let row_dims: Vec<usize> = src.iter().map(|&s| basis_dim(-s - t - 4)).collect();
        let col_dims: Vec<usize> = dst.iter().map(|&s| basis_dim(-s - t - 4)).collect();
        let mut m = DenseMatrix::zeros(row_dims.iter().sum(), col_dims.iter().sum());
        let mut r0 = 0;
        for (c, &rd) in row_dims.iter().enumerate() {
            let mut c0 = 0;
            for (r, &cd) in col_dims.iter().enumerate() {
                if rd > 0 && cd > 0 {
                    if let Some(f) = self.maps[j].form(r, c) {
                        if !f.is_zero() {
                            m.set_block(r0, c0, &f.multiplication_matrix(-dst[r] - t - 4));
                        }
                    }
                }
                c0 += cd;
            }
            r0 += rd;
        }
        m
    }

    /// `dim ℍ^i(P•(t))` for `i = 0..=3`; any hypercohomology outside these
    /// degrees means the complex does not resolve a sheaf in degree 0.
    pub fn hypercohomology(&self, t: i64) -> Result<[usize; 4]> {
        if self.terms.len() > MAX_TERMS {
            return Err(Error::UnsupportedTerm(format!(
                "complex with {} terms; at most {MAX_TERMS} are supported",
                self.terms.len()
            )));
        }
        let n = self.terms.len();
        let g_rank: Vec<usize> = (0..n - 1)
            .map(|j| self.sections_matrix(j, t).rank())
            .collect();
        let h_rank: Vec<usize> = (0..n - 1)
            .map(|j| self.top_dual_matrix(j, t).rank())
            .collect();
        let mut by_degree: BTreeMap<i64, usize> = BTreeMap::new();
        for j in 0..n {
            let g_dim: usize = self.terms[j].iter().map(|&s| basis_dim(s + t)).sum();
            let h_dim: usize = self.terms[j].iter().map(|&s| basis_dim(-s - t - 4)).sum();
            let into = if j > 0 { g_rank[j - 1] } else { 0 };
            let out = if j + 1 < n { g_rank[j] } else { 0 };
            let e0 = g_dim - into - out;
            let into = if j > 0 { h_rank[j - 1] } else { 0 };
            let out = if j + 1 < n { h_rank[j] } else { 0 };
            let e3 = h_dim - into - out;
            let deg = self.start + j as i64;
            *by_degree.entry(deg).or_default() += e0;
            *by_degree.entry(deg + 3).or_default() += e3;
        }
        let mut h = [0usize; 4];
        for (deg, dim) in by_degree {
            if dim == 0 {
                continue;
            }
            if !(0..=3).contains(&deg) {
                return Err(Error::NotAResolution {
                    degree: deg,
                    twist: t,
                });
            }
            h[deg as usize] += dim;
        }
        Ok(h)
    }

    /// Hypercohomology for every twist in `t_min..=t_max`, computed in parallel.
    pub fn cohomology_range(&self, t_min: i64, t_max: i64) -> Result<BTreeMap<i64, [usize; 4]>> {
        (t_min..=t_max)
            .into_par_iter()
            .map(|t| self.hypercohomology(t).map(|h| (t, h)))
            .collect()
    }

    /// Total complex of `self ⊗ other` with the sign `(-1)^a` on `1 ⊗ d`.
    pub fn tensor(&self, other: &Self) -> Self {
        let (na, nb) = (self.terms.len(), other.terms.len());
        let len = na + nb - 1;
        // summand layout per total index: pairs (a, b) with a ascending, then
        // summand s of P_a major, summand u of Q_b minor
        let mut layout: Vec<Vec<(usize, usize, usize, usize)>> = vec![Vec::new(); len];
        let mut terms: Vec<Vec<i64>> = vec![Vec::new(); len];
        for a in 0..na {
            for b in 0..nb {
                for (i, &s) in self.terms[a].iter().enumerate() {
                    for (k, &u) in other.terms[b].iter().enumerate() {
                        layout[a + b].push((a, b, i, k));
                        terms[a + b].push(s + u);
                    }
                }
            }
        }
        let mut maps = Vec::with_capacity(len - 1);
        for n in 0..len - 1 {
            let mut m = FormMatrix::zeros(terms[n + 1].len(), terms[n].len());
            for (col, &(a, b, i, k)) in layout[n].iter().enumerate() {
                let sign_neg = (self.start + a as i64).rem_euclid(2) == 1;
                for (row, &(a2, b2, i2, k2)) in layout[n + 1].iter().enumerate() {
                    let entry = if a2 == a + 1 && b2 == b && k2 == k {
                        self.maps[a].form(i2, i).cloned()
                    } else if a2 == a && b2 == b + 1 && i2 == i {
                        other.maps[b]
                            .form(k2, k)
                            .map(|f| if sign_neg { f.neg() } else { f.clone() })
                    } else {
                        None
                    };
                    if let Some(f) = entry {
                        m.set(row, col, Entry::Form(f));
                    }
                }
            }
            maps.push(m);
        }
        LineComplex {
            start: self.start + other.start,
            terms,
            maps,
        }
    }
}

/// `κ₁ = (x0, x1, x2, x3)`: `U O(k-1) → O(k)`.
pub(crate) fn koszul_kappa1<F: Field>() -> FormMatrix<F> {
    FormMatrix::from_forms(vec![(0..4).map(HomogeneousForm::variable).collect()]).expect("1x4")
}

/// Pairs `i < j` in the order used for `∧²U`.
pub const WEDGE_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// `κ₂: e_i ∧ e_j ↦ x_i e_j − x_j e_i`, `∧²U O(k-2) → U O(k-1)`.
pub(crate) fn koszul_kappa2<F: Field>() -> FormMatrix<F> {
    let mut m = FormMatrix::zeros(4, 6);
    for (c, &(i, j)) in WEDGE_PAIRS.iter().enumerate() {
        m.set(j, c, Entry::Form(HomogeneousForm::variable(i)));
        m.set(i, c, Entry::Form(HomogeneousForm::<F>::variable(j).neg()));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;

    type F = Fp<32003>;

    fn bott_line(a: i64, t: i64) -> [usize; 4] {
        [basis_dim(a + t), 0, 0, basis_dim(-a - t - 4)]
    }

    #[test]
    fn single_line_bundle_is_bott() {
        for a in -3..=3 {
            let c = LineComplex::<F>::sum(vec![a]);
            for t in -8..=4 {
                assert_eq!(
                    c.hypercohomology(t).unwrap(),
                    bott_line(a, t),
                    "O({a})({t})"
                );
            }
        }
    }

    #[test]
    fn koszul_complexes_are_complexes() {
        assert!(LineComplex::<F>::koszul(1, 0).is_complex());
        assert!(LineComplex::<F>::koszul(2, 0).is_complex());
    }

    #[test]
    fn omega_bott_values() {
        // h^q(Ω^p(k)) on P³
        let o1 = LineComplex::<F>::koszul(1, 0);
        assert_eq!(o1.hypercohomology(0).unwrap(), [0, 1, 0, 0]);
        assert_eq!(o1.hypercohomology(2).unwrap(), [6, 0, 0, 0]);
        assert_eq!(o1.hypercohomology(1).unwrap(), [0, 0, 0, 0]);
        assert_eq!(o1.hypercohomology(-4).unwrap(), [0, 0, 0, 15]);
        let o2 = LineComplex::<F>::koszul(2, 0);
        assert_eq!(o2.hypercohomology(0).unwrap(), [0, 0, 1, 0]);
        assert_eq!(o2.hypercohomology(3).unwrap(), [4, 0, 0, 0]);
        assert_eq!(o2.hypercohomology(2).unwrap(), [0, 0, 0, 0]);
        // Serre dual to h⁰(Ω¹(2))
        assert_eq!(o2.hypercohomology(-2).unwrap(), [0, 0, 0, 6]);
    }

    #[test]
    fn tensor_with_trivial_is_identity() {
        let o1 = LineComplex::<F>::koszul(1, 0);
        let t = o1.tensor(&LineComplex::sum(vec![0]));
        assert!(t.is_complex());
        for tw in -5..=3 {
            assert_eq!(
                t.hypercohomology(tw).unwrap(),
                o1.hypercohomology(tw).unwrap()
            );
        }
    }

    #[test]
    fn omega1_tensor_omega1() {
        // from 0 → Ω¹⊗Ω¹ → Ω¹(-1)⁴ → Ω¹ → 0 the only cohomology is h² = h¹(Ω¹) = 1
        let o1 = LineComplex::<F>::koszul(1, 0);
        let t = o1.tensor(&o1);
        assert!(t.is_complex());
        assert_eq!(t.hypercohomology(0).unwrap(), [0, 0, 1, 0]);
    }

    #[test]
    fn non_resolution_detected() {
        // the zero map O → O leaves sections in degree -1
        let m = FormMatrix::<F>::zeros(1, 1);
        let c = LineComplex::new(-1, vec![vec![0], vec![0]], vec![m]).unwrap();
        assert!(matches!(
            c.hypercohomology(0),
            Err(Error::NotAResolution { degree: -1, .. })
        ));
    }
}
