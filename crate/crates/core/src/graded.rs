//! Homogeneous forms in `x0..x3` and binary forms in `s, t`.
//!
//! The degree-`d` piece `S_d` has the monomial basis ordered lexicographically
//! descending in `e0`, then `e1`, then `e2`: for `d = 2` this is
//! `x0², x0x1, x0x2, x0x3, x1², x1x2, x1x3, x2², x2x3, x3²`. The order is part
//! of the JSON format.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::DenseMatrix;

/// Exponent vector of a monomial in four variables.
pub type Monomial = [u32; 4];

/// `dim S_d = C(d+3, 3)`, zero for negative `d`.
pub fn basis_dim(d: i64) -> usize {
    if d < 0 {
        return 0;
    }
    let d = d as usize;
    (d + 1) * (d + 2) * (d + 3) / 6
}

fn dim3(d: u32) -> usize {
    // monomials of degree d in three variables
    let d = d as usize;
    (d + 1) * (d + 2) / 2
}

/// Monomials of degree `d` in basis order.
pub fn monomials(d: i64) -> Vec<Monomial> {
    let mut out = Vec::with_capacity(basis_dim(d));
    if d < 0 {
        return out;
    }
    let d = d as u32;
    for e0 in (0..=d).rev() {
        for e1 in (0..=d - e0).rev() {
            for e2 in (0..=d - e0 - e1).rev() {
                out.push([e0, e1, e2, d - e0 - e1 - e2]);
            }
        }
    }
    out
}

/// Position of a monomial within the basis of its degree.
pub fn monomial_index(m: &Monomial) -> usize {
    let d: u32 = m.iter().sum();
    let mut idx = 0;
    // monomials with a larger leading exponent come first
    for e0 in m[0] + 1..=d {
        idx += dim3(d - e0);
    }
    let rest = d - m[0];
    for e1 in m[1] + 1..=rest {
        idx += (rest - e1 + 1) as usize;
    }
    idx + (rest - m[1] - m[2]) as usize
}

pub fn monomial_degree(m: &Monomial) -> i64 {
    m.iter().map(|&e| e as i64).sum()
}

/// A degree-`d` form as coefficients over the ordered monomial basis of `S_d`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct HomogeneousForm<F> {
    degree: i64,
    coeffs: Vec<F>,
}

impl<F: Field> HomogeneousForm<F> {
    pub fn new(degree: i64, coeffs: Vec<F>) -> Result<Self> {
        if coeffs.len() != basis_dim(degree) {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a form of degree {degree}",
                coeffs.len()
            )));
        }
        Ok(HomogeneousForm { degree, coeffs })
    }

    pub fn zero(degree: i64) -> Self {
        HomogeneousForm {
            degree,
            coeffs: vec![F::zero(); basis_dim(degree)],
        }
    }

    pub fn constant(c: F) -> Self {
        HomogeneousForm {
            degree: 0,
            coeffs: vec![c],
        }
    }

    pub fn variable(i: usize) -> Self {
        let mut e = [0; 4];
        e[i] = 1;
        Self::monomial(e, F::one())
    }

    pub fn monomial(e: Monomial, c: F) -> Self {
        let mut f = Self::zero(monomial_degree(&e));
        f.coeffs[monomial_index(&e)] = c;
        f
    }

    /// Linear form `Σ cᵢ xᵢ`.
    pub fn linear(c: [F; 4]) -> Self {
        HomogeneousForm {
            degree: 1,
            coeffs: c.to_vec(),
        }
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<F> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(F::is_zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &F)> + '_ {
        monomials(self.degree)
            .into_iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_degree(other)?;
        Ok(HomogeneousForm {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_degree(other)?;
        Ok(HomogeneousForm {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        })
    }

    pub fn scale(&self, c: &F) -> Self {
        HomogeneousForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-F::one())
    }

    fn same_degree(&self, other: &Self) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                location: "form addition".into(),
                expected: self.degree,
                found: other.degree,
            });
        }
        Ok(())
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let degree = self.degree + other.degree;
        let mut out = Self::zero(degree);
        if self.degree < 0 || other.degree < 0 {
            return out;
        }
        let rhs: Vec<(Monomial, F)> = other.terms().map(|(m, c)| (m, c.clone())).collect();
        for (a, ca) in self.terms() {
            for (b, cb) in &rhs {
                let m = [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]];
                let k = monomial_index(&m);
                out.coeffs[k] = out.coeffs[k].clone() + ca.clone() * cb.clone();
            }
        }
        out
    }

    /// Matrix of `g ↦ f·g` from `S_a` to `S_{a + deg f}`.
    pub fn multiplication_matrix(&self, a: i64) -> DenseMatrix<F> {
        let rows = basis_dim(a + self.degree);
        let cols = basis_dim(a);
        let mut m = DenseMatrix::zeros(rows, cols);
        if rows == 0 || cols == 0 {
            return m;
        }
        let terms: Vec<(Monomial, F)> = self.terms().map(|(m, c)| (m, c.clone())).collect();
        for (j, g) in monomials(a).iter().enumerate() {
            for (f, c) in &terms {
                let p = [f[0] + g[0], f[1] + g[1], f[2] + g[2], f[3] + g[3]];
                m[(monomial_index(&p), j)] = c.clone();
            }
        }
        m
    }

    pub fn evaluate(&self, point: &[F; 4]) -> F {
        if self.degree < 0 {
            return F::zero();
        }
        let d = self.degree as usize;
        let powers: Vec<Vec<F>> = point
            .iter()
            .map(|x| {
                let mut p = vec![F::one(); d + 1];
                for k in 1..=d {
                    p[k] = p[k - 1].clone() * x.clone();
                }
                p
            })
            .collect();
        self.terms().fold(F::zero(), |acc, (m, c)| {
            let mut v = c.clone();
            for i in 0..4 {
                v = v * powers[i][m[i] as usize].clone();
            }
            acc + v
        })
    }

    /// Substitute `xᵢ ↦ Σⱼ g[i][j] xⱼ`.
    pub fn substitute(&self, g: &DenseMatrix<F>) -> Self {
        let images: Vec<HomogeneousForm<F>> = (0..4)
            .map(|i| HomogeneousForm::linear([0, 1, 2, 3].map(|j| g[(i, j)].clone())))
            .collect();
        let mut out = Self::zero(self.degree);
        for (m, c) in self.terms() {
            let mut t = HomogeneousForm::constant(c.clone());
            for i in 0..4 {
                for _ in 0..m[i] {
                    t = t.multiply(&images[i]);
                }
            }
            out = out.add(&t).expect("same degree");
        }
        out
    }

    /// Pull back along `x ↦ s·p + t·q`.
    pub fn restrict_to_line(&self, p: &[F; 4], q: &[F; 4]) -> Result<BinaryForm<F>> {
        let pq = DenseMatrix::from_rows(vec![p.to_vec(), q.to_vec()])?;
        if pq.rank() < 2 {
            return Err(Error::DegenerateLine);
        }
        Ok(self.restrict_unchecked(p, q))
    }

    pub(crate) fn restrict_unchecked(&self, p: &[F; 4], q: &[F; 4]) -> BinaryForm<F> {
        if self.degree < 0 {
            return BinaryForm::zero(self.degree);
        }
        let d = self.degree as usize;
        let lines: Vec<BinaryForm<F>> = (0..4)
            .map(|i| BinaryForm {
                degree: 1,
                coeffs: vec![p[i].clone(), q[i].clone()],
            })
            .collect();
        let powers: Vec<Vec<BinaryForm<F>>> = lines
            .iter()
            .map(|l| {
                let mut v = vec![BinaryForm::constant(F::one())];
                for k in 1..=d {
                    let next = v[k - 1].multiply(l);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = BinaryForm::<F>::zero(self.degree);
        for (m, c) in self.terms() {
            let mut t = BinaryForm::constant(c.clone());
            for i in 0..4 {
                if m[i] > 0 {
                    t = t.multiply(&powers[i][m[i] as usize]);
                }
            }
            for (o, v) in out.coeffs.iter_mut().zip(t.coeffs) {
                *o = o.clone() + v;
            }
        }
        out
    }
}

impl<F: Field> fmt::Display for HomogeneousForm<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let vars: Vec<String> = (0..4)
                .filter(|&i| m[i] > 0)
                .map(|i| {
                    if m[i] == 1 {
                        format!("x{i}")
                    } else {
                        format!("x{i}^{}", m[i])
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                f.write_str(&vars.join("*"))?;
            } else {
                write!(f, "({c})*{}", vars.join("*"))?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// A binary form of degree `d` over the basis `s^d, s^{d-1}t, …, t^d`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BinaryForm<F> {
    degree: i64,
    coeffs: Vec<F>,
}

pub fn binary_dim(d: i64) -> usize {
    if d < 0 {
        0
    } else {
        d as usize + 1
    }
}

impl<F: Field> BinaryForm<F> {
    pub fn new(degree: i64, coeffs: Vec<F>) -> Result<Self> {
        if coeffs.len() != binary_dim(degree) {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a binary form of degree {degree}",
                coeffs.len()
            )));
        }
        Ok(BinaryForm { degree, coeffs })
    }

    pub fn zero(degree: i64) -> Self {
        BinaryForm {
            degree,
            coeffs: vec![F::zero(); binary_dim(degree)],
        }
    }

    pub fn constant(c: F) -> Self {
        BinaryForm {
            degree: 0,
            coeffs: vec![c],
        }
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(F::is_zero)
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.degree + other.degree);
        if self.degree < 0 || other.degree < 0 {
            return out;
        }
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out.coeffs[i + j] = out.coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        out
    }

    /// Matrix of `g ↦ f·g` from degree `a` to degree `a + deg f`.
    pub fn multiplication_matrix(&self, a: i64) -> DenseMatrix<F> {
        let rows = binary_dim(a + self.degree);
        let cols = binary_dim(a);
        let mut m = DenseMatrix::zeros(rows, cols);
        if rows == 0 || cols == 0 {
            return m;
        }
        for j in 0..cols {
            for (i, c) in self.coeffs.iter().enumerate() {
                m[(i + j, j)] = c.clone();
            }
        }
        m
    }

    pub fn evaluate(&self, s: &F, t: &F) -> F {
        if self.degree < 0 {
            return F::zero();
        }
        // Horner in t/s, homogenised
        let d = self.degree as usize;
        let mut s_pows = vec![F::one(); d + 1];
        let mut t_pows = vec![F::one(); d + 1];
        for k in 1..=d {
            s_pows[k] = s_pows[k - 1].clone() * s.clone();
            t_pows[k] = t_pows[k - 1].clone() * t.clone();
        }
        self.coeffs
            .iter()
            .enumerate()
            .fold(F::zero(), |acc, (k, c)| {
                acc + c.clone() * s_pows[d - k].clone() * t_pows[k].clone()
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, Rational};
    use proptest::prelude::*;
    use rand::SeedableRng;

    type F = Fp<32003>;

    fn random_form(d: i64, seed: u64) -> HomogeneousForm<F> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        HomogeneousForm::new(d, (0..basis_dim(d)).map(|_| F::random(&mut rng)).collect()).unwrap()
    }

    fn random_point(seed: u64) -> [F; 4] {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        [(); 4].map(|_| F::random(&mut rng))
    }

    #[test]
    fn dimensions() {
        assert_eq!(basis_dim(0), 1);
        assert_eq!(basis_dim(1), 4);
        assert_eq!(basis_dim(-1), 0);
        for d in 0..=12 {
            let n = (d + 1) * (d + 2) * (d + 3) / 6;
            assert_eq!(basis_dim(d), n as usize);
            assert_eq!(monomials(d).len(), n as usize);
        }
    }

    #[test]
    fn monomial_order_is_fixed() {
        let m = monomials(2);
        assert_eq!(m[0], [2, 0, 0, 0]);
        assert_eq!(m[1], [1, 1, 0, 0]);
        assert_eq!(m[3], [1, 0, 0, 1]);
        assert_eq!(m[4], [0, 2, 0, 0]);
        assert_eq!(m[9], [0, 0, 0, 2]);
        for d in 0..8 {
            for (i, mono) in monomials(d).iter().enumerate() {
                assert_eq!(monomial_index(mono), i);
            }
        }
    }

    #[test]
    fn product_examples() {
        let x0 = HomogeneousForm::<Rational>::variable(0);
        let x1 = HomogeneousForm::<Rational>::variable(1);
        let p = x0.multiply(&x1);
        assert_eq!(
            p,
            HomogeneousForm::monomial([1, 1, 0, 0], Rational::from_i64(1))
        );
        assert!(x0.multiply(&HomogeneousForm::zero(3)).is_zero());
        let lhs = x0.add(&x1).unwrap().multiply(&x0.sub(&x1).unwrap());
        let rhs = x0.multiply(&x0).sub(&x1.multiply(&x1)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn multiplication_matrix_examples() {
        let one = HomogeneousForm::<F>::constant(F::new(1));
        assert_eq!(one.multiplication_matrix(2), DenseMatrix::identity(10));
        let m = HomogeneousForm::<F>::variable(0).multiplication_matrix(0);
        assert_eq!((m.rows(), m.cols()), (4, 1));
        assert_eq!(
            m.column(0),
            vec![F::new(1), F::new(0), F::new(0), F::new(0)]
        );
    }

    #[test]
    fn evaluate_examples() {
        let x2 = HomogeneousForm::<F>::variable(2);
        assert_eq!(
            x2.evaluate(&[F::new(0), F::new(0), F::new(5), F::new(1)]),
            F::new(5)
        );
        let origin = [F::new(0); 4];
        assert_eq!(random_form(3, 1).evaluate(&origin), F::new(0));
    }

    #[test]
    fn restriction_examples() {
        let e = |i: usize| {
            let mut v = [F::new(0); 4];
            v[i] = F::new(1);
            v
        };
        let x0 = HomogeneousForm::<F>::variable(0);
        let x1 = HomogeneousForm::<F>::variable(1);
        let s = x0.restrict_to_line(&e(0), &e(1)).unwrap();
        assert_eq!(s.coeffs(), &[F::new(1), F::new(0)]);
        let st = x0.multiply(&x1).restrict_to_line(&e(0), &e(1)).unwrap();
        assert_eq!(st.coeffs(), &[F::new(0), F::new(1), F::new(0)]);
        assert!(matches!(
            x0.restrict_to_line(&e(0), &e(0)),
            Err(Error::DegenerateLine)
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn multiplication_matrix_agrees_with_product(df in 0i64..4, a in 0i64..4, seed: u64) {
            let f = random_form(df, seed);
            let g = random_form(a, seed.wrapping_add(1));
            let via_matrix = f.multiplication_matrix(a).mul_vec(g.coeffs()).unwrap();
            prop_assert_eq!(via_matrix, f.multiply(&g).into_coeffs());
        }

        #[test]
        fn multiplication_matrices_compose(df in 0i64..3, dg in 0i64..3, a in 0i64..3, seed: u64) {
            let f = random_form(df, seed);
            let g = random_form(dg, seed ^ 0x55);
            let lhs = g.multiplication_matrix(a + df).matmul(&f.multiplication_matrix(a)).unwrap();
            prop_assert_eq!(lhs, f.multiply(&g).multiplication_matrix(a));
        }

        #[test]
        fn product_is_commutative(df in 0i64..4, dg in 0i64..4, seed: u64) {
            let f = random_form(df, seed);
            let g = random_form(dg, seed ^ 7);
            prop_assert_eq!(f.multiply(&g), g.multiply(&f));
        }

        #[test]
        fn evaluation_is_a_ring_map(df in 0i64..4, dg in 0i64..4, seed: u64) {
            let f = random_form(df, seed);
            let g = random_form(dg, seed ^ 9);
            let p = random_point(seed ^ 11);
            prop_assert_eq!(f.multiply(&g).evaluate(&p), f.evaluate(&p) * g.evaluate(&p));
        }

        #[test]
        fn restriction_is_a_ring_map(df in 0i64..4, dg in 0i64..4, seed: u64) {
            let f = random_form(df, seed);
            let g = random_form(dg, seed ^ 13);
            let p = random_point(seed ^ 17);
            let q = random_point(seed ^ 19);
            let fg = f.multiply(&g).restrict_to_line(&p, &q).unwrap();
            let prod = f.restrict_to_line(&p, &q).unwrap().multiply(&g.restrict_to_line(&p, &q).unwrap());
            prop_assert_eq!(&fg, &prod);
            // (s, t) = (1, 0) recovers evaluation at p
            prop_assert_eq!(fg.evaluate(&F::new(1), &F::new(0)), f.multiply(&g).evaluate(&p));
        }
    }
}
