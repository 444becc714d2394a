//! Extensions `0 → K → E → F → 0` of a monad bundle `F` by `O(k)`, `Ω¹(k)`
//! or `Ω²(k)`, their classes, and the multiplication map
//! `m: U ⊗ H¹(F(-1)) → H¹(F)`.
//!
//! An extension is realised by adding `K` to the middle of the monad and a
//! row `f` to `A`. Changing the splitting of the new middle by `g: M → K`
//! replaces `f` by `f + g·A`, so the class of `f` lives in the cokernel of
//! `g ↦ g·A`.

mod tower;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::graded::HomogeneousForm;
use crate::linalg::{DenseMatrix, RowSpace};
use crate::monad::{
    default_d_max, summands, validate_monad, CohomologyTable, Entry, FormMatrix, LineComplex,
    Monad, TermKind, TwistTerm, DEFAULT_SAMPLE_POINTS,
};

pub use tower::{build_tower, TowerSpec};

use crate::monad::complex::{koszul_kappa1, koszul_kappa2};
use crate::monad::WEDGE_PAIRS;

/// A section of `Ω^p(d)`, written in the Koszul presentation.
///
/// For `p = 1` the components are `(a0, …, a3)` of degree `d - 1` with
/// `Σ xᵢ aᵢ = 0`. For `p = 2` they are `a_ij`, `i < j` in [`WEDGE_PAIRS`]
/// order, of degree `d - 2`, killed by `e_i ∧ e_j ↦ x_i e_j − x_j e_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaSection<F> {
    p: u8,
    degree: i64,
    comps: Vec<HomogeneousForm<F>>,
}

impl<F: Field> OmegaSection<F> {
    pub fn new(p: u8, degree: i64, comps: Vec<HomogeneousForm<F>>) -> Result<Self> {
        let want = match p {
            1 => 4,
            2 => 6,
            _ => return Err(Error::UnsupportedTerm(format!("Ω^{p}"))),
        };
        if comps.len() != want {
            return Err(Error::DimensionMismatch(format!(
                "Ω^{p} section needs {want} components"
            )));
        }
        for (i, c) in comps.iter().enumerate() {
            let d = degree - p as i64;
            if c.degree() != d && !(d < 0 && c.degree() < 0) {
                return Err(Error::DegreeMismatch {
                    location: format!("Ω^{p} component {i}"),
                    expected: d,
                    found: c.degree(),
                });
            }
        }
        let s = OmegaSection { p, degree, comps };
        if !s.koszul_image().iter().all(HomogeneousForm::is_zero) {
            return Err(Error::InvalidInput(format!(
                "components do not define a section of Ω^{p}"
            )));
        }
        Ok(s)
    }

    pub fn zero(p: u8, degree: i64) -> Self {
        let n = if p == 1 { 4 } else { 6 };
        OmegaSection {
            p,
            degree,
            comps: vec![HomogeneousForm::zero(degree - p as i64); n],
        }
    }

    /// A random element of `H⁰(Ω^p(d))`.
    pub fn random<R: Rng + ?Sized>(p: u8, degree: i64, rng: &mut R) -> Result<Self> {
        if p != 1 && p != 2 {
            return Err(Error::UnsupportedTerm(format!("Ω^{p}")));
        }
        let kernel = LineComplex::<F>::koszul(p, degree)
            .sections_matrix(0, 0)
            .kernel_basis();
        let comp_deg = degree - p as i64;
        let block = crate::graded::basis_dim(comp_deg);
        let n = if p == 1 { 4 } else { 6 };
        let mut v = vec![F::zero(); n * block];
        for col in kernel.columns() {
            let c = F::random(rng);
            for (a, x) in v.iter_mut().zip(col) {
                *a = a.clone() + c.clone() * x;
            }
        }
        let comps = (0..n)
            .map(|i| HomogeneousForm::new(comp_deg, v[i * block..(i + 1) * block].to_vec()))
            .collect::<Result<Vec<_>>>()?;
        OmegaSection::new(p, degree, comps)
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn components(&self) -> &[HomogeneousForm<F>] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(HomogeneousForm::is_zero)
    }

    fn koszul_image(&self) -> Vec<HomogeneousForm<F>> {
        let x = |i| HomogeneousForm::<F>::variable(i);
        match self.p {
            1 => vec![(0..4).fold(HomogeneousForm::zero(self.degree), |acc, i| {
                acc.add(&x(i).multiply(&self.comps[i]))
                    .expect("same degree")
            })],
            _ => {
                let mut out = vec![HomogeneousForm::zero(self.degree - 1); 4];
                for (c, &(i, j)) in WEDGE_PAIRS.iter().enumerate() {
                    out[j] = out[j]
                        .add(&x(i).multiply(&self.comps[c]))
                        .expect("same degree");
                    out[i] = out[i]
                        .sub(&x(j).multiply(&self.comps[c]))
                        .expect("same degree");
                }
                out
            }
        }
    }
}

/// The class of a row `f` modulo the coboundaries `{g·A}`.
#[derive(Debug, Clone)]
pub struct ExtensionClass<F> {
    k: i64,
    representative: Vec<HomogeneousForm<F>>,
    image_basis: Vec<Vec<HomogeneousForm<F>>>,
    ambient_dim: usize,
    normal_form: Vec<F>,
}

impl<F: Field> PartialEq for ExtensionClass<F> {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.normal_form == other.normal_form
    }
}

impl<F: Field> Eq for ExtensionClass<F> {}

impl<F: Field> ExtensionClass<F> {
    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn representative(&self) -> &[HomogeneousForm<F>] {
        &self.representative
    }

    /// Reduced basis of the coboundary space.
    pub fn image_basis(&self) -> &[Vec<HomogeneousForm<F>>] {
        &self.image_basis
    }

    /// The representative reduced against the coboundaries; two rows define
    /// the same class iff their normal forms agree.
    pub fn normal_form(&self) -> &[F] {
        &self.normal_form
    }

    pub fn is_zero(&self) -> bool {
        self.normal_form.iter().all(F::is_zero)
    }

    /// Dimension of the space of classes.
    pub fn quotient_dim(&self) -> usize {
        self.ambient_dim - self.image_basis.len()
    }
}

fn row_coeffs<F: Field>(row: &[HomogeneousForm<F>]) -> Vec<F> {
    row.iter()
        .flat_map(|f| f.coeffs().iter().cloned())
        .collect()
}

fn split_coeffs<F: Field>(v: &[F], degrees: &[i64]) -> Vec<HomogeneousForm<F>> {
    let mut off = 0;
    degrees
        .iter()
        .map(|&d| {
            let len = crate::graded::basis_dim(d);
            let f = HomogeneousForm::new(d, v[off..off + len].to_vec()).expect("length");
            off += len;
            f
        })
        .collect()
}

fn require_line_monad<F: Field>(m: &Monad<F>) -> Result<()> {
    if m.has_omega() {
        return Err(Error::UnsupportedTerm(
            "expected a monad of line bundle sums".into(),
        ));
    }
    Ok(())
}

/// The class of `O(k)`-extension data `f` (one form per summand of the left term).
pub fn class_of_f<F: Field>(
    m: &Monad<F>,
    k: i64,
    f: &[HomogeneousForm<F>],
) -> Result<ExtensionClass<F>> {
    require_line_monad(m)?;
    let left: Vec<i64> = summands(&[*m.left()]).into_iter().map(|s| s.1).collect();
    if f.len() != left.len() {
        return Err(Error::DimensionMismatch(format!(
            "f has {} entries, expected {}",
            f.len(),
            left.len()
        )));
    }
    let degrees: Vec<i64> = left.iter().map(|&l| k - l).collect();
    for (j, (g, &d)) in f.iter().zip(&degrees).enumerate() {
        if g.degree() != d && !(d < 0 && g.degree() < 0) {
            return Err(Error::DegreeMismatch {
                location: format!("f[{j}]"),
                expected: d,
                found: g.degree(),
            });
        }
    }
    // g ↦ g·A, i.e. Aᵀ between the negated twists, at twist k
    let mids: Vec<i64> = m.middle_summands().into_iter().map(|s| -s.1).collect();
    let neg_left: Vec<i64> = left.iter().map(|l| -l).collect();
    let coboundary =
        LineComplex::new(0, vec![mids, neg_left], vec![m.a().transpose()])?.sections_matrix(0, k);
    let mut image = RowSpace::new(coboundary.rows());
    for col in coboundary.columns() {
        image.insert(&col);
    }
    let representative: Vec<HomogeneousForm<F>> = f
        .iter()
        .zip(&degrees)
        .map(|(g, &d)| {
            if d < 0 {
                HomogeneousForm::zero(d)
            } else {
                g.clone()
            }
        })
        .collect();
    let normal_form = image.reduce(&row_coeffs(&representative));
    let image_basis = image
        .basis()
        .iter()
        .map(|v| split_coeffs(v, &degrees))
        .collect();
    Ok(ExtensionClass {
        k,
        representative,
        image_basis,
        ambient_dim: coboundary.rows(),
        normal_form,
    })
}

/// Add `K` to the middle and the row `f` to `A`; `B` gets a zero column.
pub fn extension_monad<F: Field>(
    m: &Monad<F>,
    k_term: TwistTerm,
    f: Vec<Entry<F>>,
) -> Result<Monad<F>> {
    require_line_monad(m)?;
    if k_term.mult != 1 {
        return Err(Error::InvalidInput(
            "extend by one summand at a time".into(),
        ));
    }
    let k = k_term.twist;
    match k_term.kind {
        TermKind::Omega1 if k < 1 => {
            return Err(Error::RangeError {
                k,
                reason: "extensions by Ω¹(k) need k >= 1".into(),
            })
        }
        TermKind::Omega2 if k < 2 => {
            return Err(Error::RangeError {
                k,
                reason: "extensions by Ω²(k) need k >= 2".into(),
            })
        }
        _ => {}
    }
    if f.len() != m.left().mult {
        return Err(Error::DimensionMismatch(format!(
            "f has {} entries, expected {}",
            f.len(),
            m.left().mult
        )));
    }
    let mut middle = m.middle().to_vec();
    middle.push(k_term);
    let a = m.a().stack(&[f])?;
    let b = m.b().pad_columns(1);
    Monad::new(*m.left(), middle, *m.right(), a, b, None)
}

/// Convenience wrapper for `K = O(k)` with a row of forms.
pub fn extend_by_line<F: Field>(
    m: &Monad<F>,
    k: i64,
    f: &[HomogeneousForm<F>],
) -> Result<Monad<F>> {
    extension_monad(
        m,
        TwistTerm::line(1, k),
        f.iter().cloned().map(Entry::Form).collect(),
    )
}

/// The monad as a complex of line-bundle sums, with each `Ω^p(k)` in the
/// middle replaced by its Koszul resolution.
pub fn expanded_complex<F: Field>(m: &Monad<F>) -> Result<LineComplex<F>> {
    let mids = m.middle_summands();
    let left: Vec<i64> = summands(&[*m.left()]).into_iter().map(|s| s.1).collect();
    let right: Vec<i64> = summands(&[*m.right()]).into_iter().map(|s| s.1).collect();
    let mut deg0: Vec<i64> = Vec::new();
    let mut deg1: Vec<i64> = right.clone();
    let mut deg2: Vec<i64> = Vec::new();
    // (offset in deg0, offset in deg1, offset in deg2) per middle summand
    let mut offsets = Vec::with_capacity(mids.len());
    for &(kind, k) in &mids {
        offsets.push((deg0.len(), deg1.len(), deg2.len()));
        match kind {
            TermKind::Line => deg0.push(k),
            TermKind::Omega1 => {
                deg0.extend([k - 1; 4]);
                deg1.push(k);
            }
            TermKind::Omega2 => {
                deg0.extend([k - 2; 6]);
                deg1.extend([k - 1; 4]);
                deg2.push(k);
            }
        }
    }
    let mut d0 = FormMatrix::zeros(deg0.len(), left.len());
    let mut d1 = FormMatrix::zeros(deg1.len(), deg0.len());
    let mut d2 = FormMatrix::zeros(deg2.len(), deg1.len());
    let kappa1 = koszul_kappa1::<F>();
    let kappa2 = koszul_kappa2::<F>();
    for (r, &(kind, _)) in mids.iter().enumerate() {
        let (o0, o1, o2) = offsets[r];
        for c in 0..left.len() {
            match m.a().get(r, c) {
                Entry::Zero => {}
                Entry::Form(f) => d0.set(o0, c, Entry::Form(f.clone())),
                Entry::Omega(s) => {
                    for (i, comp) in s.components().iter().enumerate() {
                        d0.set(o0 + i, c, Entry::Form(comp.clone()));
                    }
                }
            }
        }
        match kind {
            TermKind::Line => {
                for (w, _) in right.iter().enumerate() {
                    if let Some(f) = m.b().form(w, r) {
                        d1.set(w, o0, Entry::Form(f.clone()));
                    }
                }
            }
            TermKind::Omega1 => {
                for i in 0..4 {
                    d1.set(o1, o0 + i, kappa1.get(0, i).clone());
                }
            }
            TermKind::Omega2 => {
                for i in 0..4 {
                    for c in 0..6 {
                        d1.set(o1 + i, o0 + c, kappa2.get(i, c).clone());
                    }
                    d2.set(o2, o1 + i, kappa1.get(0, i).clone());
                }
            }
        }
    }
    if deg2.is_empty() {
        LineComplex::new(-1, vec![left, deg0, deg1], vec![d0, d1])
    } else {
        LineComplex::new(-1, vec![left, deg0, deg1, deg2], vec![d0, d1, d2])
    }
}

/// Cohomology of a monad whose middle may contain `Ω^p(k)` terms.
pub fn cohomology_ext<F: Field>(m: &Monad<F>, t_min: i64, t_max: i64) -> Result<CohomologyTable> {
    let complex = expanded_complex(m)?;
    debug_assert!(complex.is_complex());
    m.table_from(&complex, t_min, t_max)
}

/// `h^i(F ⊗ Ω¹(t))` from the tensor product with the Koszul complex.
pub fn omega1_twisted_cohomology<F: Field>(m: &Monad<F>, t: i64) -> Result<[usize; 4]> {
    require_line_monad(m)?;
    m.to_line_complex()?
        .tensor(&LineComplex::koszul(1, 0))
        .hypercohomology(t)
}

/// The multiplication map at representative level.
#[derive(Debug, Clone)]
pub struct MultiplicationMap<F> {
    /// Columns indexed by `x_i ⊗ w`, `i` major; rows are coordinates on `H¹(F)`.
    pub matrix: DenseMatrix<F>,
    /// `dim H¹(F(-1))` representatives per copy of `U`.
    pub rep_dim: usize,
    /// Dimension of `ker m` on classes.
    pub kernel_dim: usize,
    coboundaries: RowSpace<F>,
}

impl<F: Field> MultiplicationMap<F> {
    /// Basis of `ker m` modulo `U ⊗ (coboundaries)`, as vectors in `U ⊗ Γ(right(-1))`.
    pub fn kernel_classes(&self) -> Vec<Vec<F>> {
        let mut space = self.coboundaries.clone();
        let base = space.rank();
        let mut out = Vec::new();
        for v in self.matrix.kernel_basis().columns() {
            if space.insert(&v) {
                out.push(v);
            }
        }
        debug_assert_eq!(space.rank() - base, out.len());
        out
    }
}

/// Assemble `m: U ⊗ H¹(F(-1)) → H¹(F)`, `x_i ⊗ [w] ↦ [x_i w]`.
///
/// With `h⁰(F) = 0` the Euler sequence gives `dim ker m = h¹(F ⊗ Ω¹)`.
pub fn m_map_euler<F: Field>(m: &Monad<F>) -> Result<MultiplicationMap<F>> {
    require_line_monad(m)?;
    let complex = m.to_line_complex()?;
    let h0 = complex.hypercohomology(0)?[0];
    if h0 != 0 {
        return Err(Error::StabilityViolation(h0));
    }
    let right: Vec<i64> = summands(&[*m.right()]).into_iter().map(|s| s.1).collect();
    let b_minus = complex.sections_matrix(1, -1);
    let b_zero = complex.sections_matrix(1, 0);
    let proj = b_zero.cokernel_projector();
    let rep_dim = b_minus.rows();
    let deg_minus: Vec<i64> = right.iter().map(|s| s - 1).collect();
    let mut columns: Vec<Vec<F>> = Vec::with_capacity(4 * rep_dim);
    for i in 0..4 {
        let x = HomogeneousForm::<F>::variable(i);
        for e in 0..rep_dim {
            let mut w = vec![F::zero(); rep_dim];
            w[e] = F::one();
            let forms = split_coeffs(&w, &deg_minus);
            let product: Vec<F> = forms
                .iter()
                .flat_map(|f| x.multiply(f).into_coeffs())
                .collect();
            columns.push(proj.mul_vec(&product)?);
        }
    }
    let matrix = DenseMatrix::from_columns(proj.rows(), &columns)?;
    let mut coboundaries = RowSpace::new(4 * rep_dim);
    for col in b_minus.columns() {
        for i in 0..4 {
            let mut v = vec![F::zero(); 4 * rep_dim];
            v[i * rep_dim..(i + 1) * rep_dim].clone_from_slice(&col);
            coboundaries.insert(&v);
        }
    }
    let kernel_dim = (4 * rep_dim - matrix.rank()) - coboundaries.rank();
    Ok(MultiplicationMap {
        matrix,
        rep_dim,
        kernel_dim,
        coboundaries,
    })
}

/// Basis of `{(e_i) ∈ U ⊗ H¹(F(-1)) : m((e_i)) = 0}` as representative vectors.
pub fn admissible_quadruples<F: Field>(m: &Monad<F>) -> Result<Vec<Vec<F>>> {
    Ok(m_map_euler(m)?.kernel_classes())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub stable: bool,
    pub h0_e: usize,
    pub h0_edual_minus1: usize,
    pub class_nonzero: bool,
    /// `h⁰(E*(-1)) = 0` exactly when the class is nonzero.
    pub routes_agree: bool,
}

/// Split an `O(-1)`-extension monad into its base monad and the row `f`.
pub fn split_extension<F: Field>(m_e: &Monad<F>) -> Result<(Monad<F>, Vec<HomogeneousForm<F>>)> {
    let shape =
        || Error::ShapeError("expected an extension by O(-1) in the last middle slot".into());
    let last = m_e.middle().last().ok_or_else(shape)?;
    if last.kind != TermKind::Line || last.twist != -1 || last.mult != 1 || m_e.has_omega() {
        return Err(shape());
    }
    if m_e.left().twist != -1 || m_e.middle().len() < 2 {
        return Err(shape());
    }
    let v = m_e.middle_dim() - 1;
    let n = m_e.left().mult;
    let mut a_rows: Vec<Entry<F>> = Vec::new();
    for r in 0..v {
        a_rows.extend(m_e.a().row(r).iter().cloned());
    }
    let a = FormMatrix::new(v, n, a_rows)?;
    let mut b = FormMatrix::zeros(m_e.right().mult, v);
    for r in 0..m_e.right().mult {
        for c in 0..v {
            b.set(r, c, m_e.b().get(r, c).clone());
        }
        if !m_e.b().get(r, v).is_zero() {
            return Err(shape());
        }
    }
    let base = Monad::new(
        *m_e.left(),
        m_e.middle()[..m_e.middle().len() - 1].to_vec(),
        *m_e.right(),
        a,
        b,
        None,
    )?;
    let f = (0..n)
        .map(|c| match m_e.a().get(v, c) {
            Entry::Form(g) => g.clone(),
            _ => HomogeneousForm::zero(0),
        })
        .collect();
    Ok((base, f))
}

/// Stability of an extension `0 → O(-1) → E → F → 0`: `h⁰(E)` directly,
/// `h⁰(E*(-1))` from the dual monad, and the class criterion as a second route.
pub fn stability_check<F: Field>(m_e: &Monad<F>) -> Result<StabilityReport> {
    let (base, f) = split_extension(m_e)?;
    let class_nonzero = !class_of_f(&base, -1, &f)?.is_zero();
    let h0_e = m_e.to_line_complex()?.hypercohomology(0)?[0];
    let h0_edual_minus1 = m_e.dual()?.to_line_complex()?.hypercohomology(-1)?[0];
    Ok(StabilityReport {
        stable: h0_e == 0 && h0_edual_minus1 == 0,
        h0_e,
        h0_edual_minus1,
        class_nonzero,
        routes_agree: (h0_edual_minus1 == 0) == class_nonzero,
    })
}

/// Validate a monad with the default bound for its size.
pub(crate) fn certify<F: Field>(m: &Monad<F>, seed: u64) -> bool {
    validate_monad(m, default_d_max(m.left().mult), DEFAULT_SAMPLE_POINTS, seed).is_valid()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;
    use crate::monad::{gen_instanton_syzygy, gen_null_correlation, GeneratorOptions};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type F = Fp<32003>;

    fn one() -> HomogeneousForm<F> {
        HomogeneousForm::constant(F::new(1))
    }

    #[test]
    fn omega_section_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..4 {
            let s = OmegaSection::<F>::random(1, d, &mut rng).unwrap();
            assert!(s.koszul_image().iter().all(HomogeneousForm::is_zero));
        }
        for d in 2..5 {
            let s = OmegaSection::<F>::random(2, d, &mut rng).unwrap();
            assert!(s.koszul_image().iter().all(HomogeneousForm::is_zero));
        }
        // h⁰(Ω¹(1)) = 0
        assert!(OmegaSection::<F>::random(1, 1, &mut rng).unwrap().is_zero());
        let x = |i| HomogeneousForm::<F>::variable(i);
        let bad = OmegaSection::new(1, 2, vec![x(0), x(1), x(2), x(3)]);
        assert!(bad.is_err());
        let good = OmegaSection::new(
            1,
            2,
            vec![
                x(1),
                x(0).neg(),
                HomogeneousForm::zero(1),
                HomogeneousForm::zero(1),
            ],
        );
        assert!(good.is_ok());
    }

    #[test]
    fn null_correlation_classes() {
        let m = gen_null_correlation::<F>();
        let c = class_of_f(&m, -1, &[one()]).unwrap();
        assert!(!c.is_zero());
        assert_eq!(c.quotient_dim(), 1);
        let c = class_of_f(&m, 0, &[HomogeneousForm::variable(0)]).unwrap();
        assert!(c.is_zero());
        let c = class_of_f(&m, 2, &[HomogeneousForm::zero(3)]).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn class_dimension_matches_dual_cohomology() {
        let m = gen_instanton_syzygy::<F>(2, 3, &GeneratorOptions::default()).unwrap();
        let dual = m.dual().unwrap().cohomology(-1, 3).unwrap();
        for k in -1..=3 {
            let f = vec![HomogeneousForm::zero(k + 1); 2];
            let c = class_of_f(&m, k, &f).unwrap();
            assert_eq!(Some(c.quotient_dim()), dual.h(1, k), "k = {k}");
        }
    }

    #[test]
    fn extension_by_minus_one_is_stable() {
        let m = gen_null_correlation::<F>();
        let e = extend_by_line(&m, -1, &[one()]).unwrap();
        assert_eq!(e.rank(), 3);
        assert!(certify(&e, 0));
        let r = stability_check(&e).unwrap();
        assert!(r.stable && r.class_nonzero && r.routes_agree);
        let split = extend_by_line(&m, -1, &[HomogeneousForm::zero(0)]).unwrap();
        let r = stability_check(&split).unwrap();
        assert_eq!(r.h0_edual_minus1, 1);
        assert!(!r.stable && !r.class_nonzero && r.routes_agree);
    }

    #[test]
    fn omega_range_enforced() {
        let m = gen_null_correlation::<F>();
        let err = extension_monad(
            &m,
            TwistTerm::omega(1, 0),
            vec![Entry::Omega(OmegaSection::zero(1, 1))],
        );
        assert!(matches!(err, Err(Error::RangeError { k: 0, .. })));
        let err = extension_monad(
            &m,
            TwistTerm::omega(2, 1),
            vec![Entry::Omega(OmegaSection::zero(2, 2))],
        );
        assert!(matches!(err, Err(Error::RangeError { k: 1, .. })));
    }

    #[test]
    fn split_omega_extension_adds_bott() {
        let m = gen_null_correlation::<F>();
        let base = m.cohomology(-5, 3).unwrap();
        for (p, k) in [(1u8, 1i64), (2, 2)] {
            let e = extension_monad(
                &m,
                TwistTerm::omega(p, k),
                vec![Entry::Omega(OmegaSection::zero(p, k + 1))],
            )
            .unwrap();
            let t = cohomology_ext(&e, -5, 3).unwrap();
            let bott = LineComplex::<F>::koszul(p, k)
                .cohomology_range(-5, 3)
                .unwrap();
            for tw in -5..=3 {
                let want: Vec<usize> = (0..4)
                    .map(|i| base.h(i, tw).unwrap() + bott[&tw][i])
                    .collect();
                let got: Vec<usize> = (0..4).map(|i| t.h(i, tw).unwrap()).collect();
                assert_eq!(got, want, "Ω^{p}({k}) at t = {tw}");
            }
            assert!(t.euler_consistent());
        }
    }

    #[test]
    fn nonsplit_omega_extension_is_consistent() {
        let m = gen_null_correlation::<F>();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = OmegaSection::random(1, 3, &mut rng).unwrap();
        let e = extension_monad(&m, TwistTerm::omega(1, 2), vec![Entry::Omega(s)]).unwrap();
        assert!(expanded_complex(&e).unwrap().is_complex());
        let t = cohomology_ext(&e, -4, 2).unwrap();
        assert!(t.euler_consistent());
    }

    #[test]
    fn m_map_kernel_is_middle_dimension() {
        let m = gen_null_correlation::<F>();
        let mm = m_map_euler(&m).unwrap();
        assert_eq!(mm.kernel_dim, 4);
        assert_eq!(omega1_twisted_cohomology(&m, 0).unwrap()[1], 4);
        let m2 = gen_instanton_syzygy::<F>(2, 7, &GeneratorOptions::default()).unwrap();
        let mm = m_map_euler(&m2).unwrap();
        assert_eq!(mm.kernel_dim, 6);
        assert_eq!(admissible_quadruples(&m2).unwrap().len(), 6);
        assert_eq!(omega1_twisted_cohomology(&m2, 0).unwrap()[1], 6);
    }

    #[test]
    fn m_map_rejects_sections() {
        // F ⊕ O has a section
        let m = gen_null_correlation::<F>();
        let e = extend_by_line(&m, 0, &[HomogeneousForm::zero(1)]).unwrap();
        assert!(matches!(m_map_euler(&e), Err(Error::StabilityViolation(1))));
    }
}
