//! Monads `0 → L → M → R → 0` of sums of line bundles (and twisted forms in
//! the middle), their validation and their sheaf cohomology.

pub(crate) mod complex;
mod generate;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::OmegaSection;
use crate::field::Field;
use crate::graded::HomogeneousForm;
use crate::linalg::DenseMatrix;

pub use complex::{LineComplex, WEDGE_PAIRS};
pub use generate::{
    gen_instanton_syzygy, gen_null_correlation, null_correlation_symplectic, GeneratorOptions,
};
pub use validate::{
    default_d_max, validate_monad, RankCertificate, ValidationReport, DEFAULT_SAMPLE_POINTS,
};

/// Which bundle a [`TwistTerm`] stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermKind {
    Line,
    Omega1,
    Omega2,
}

impl TermKind {
    pub fn rank(self) -> i64 {
        match self {
            TermKind::Line => 1,
            TermKind::Omega1 | TermKind::Omega2 => 3,
        }
    }

    /// `p` in `Ω^p`, zero for line bundles.
    pub fn form_degree(self) -> u8 {
        match self {
            TermKind::Line => 0,
            TermKind::Omega1 => 1,
            TermKind::Omega2 => 2,
        }
    }
}

/// `O(twist)^mult`, `Ω¹(twist)^mult` or `Ω²(twist)^mult`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwistTerm {
    pub kind: TermKind,
    pub mult: usize,
    pub twist: i64,
}

impl TwistTerm {
    pub fn line(mult: usize, twist: i64) -> Self {
        TwistTerm {
            kind: TermKind::Line,
            mult,
            twist,
        }
    }

    pub fn omega(p: u8, twist: i64) -> Self {
        let kind = match p {
            1 => TermKind::Omega1,
            2 => TermKind::Omega2,
            _ => panic!("only Ω¹ and Ω² are supported"),
        };
        TwistTerm {
            kind,
            mult: 1,
            twist,
        }
    }

    pub fn c1(&self) -> i64 {
        let per = match self.kind {
            TermKind::Line => self.twist,
            TermKind::Omega1 => -4 + 3 * self.twist,
            TermKind::Omega2 => -8 + 3 * self.twist,
        };
        per * self.mult as i64
    }

    pub fn chi(&self) -> ChiPolynomial {
        let s = self.twist;
        let one = match self.kind {
            TermKind::Line => ChiPolynomial::line(s),
            TermKind::Omega1 => ChiPolynomial::line(s - 1)
                .scaled(4)
                .plus(&ChiPolynomial::line(s).scaled(-1)),
            TermKind::Omega2 => ChiPolynomial::line(s - 2)
                .scaled(6)
                .plus(&ChiPolynomial::line(s - 1).scaled(-4))
                .plus(&ChiPolynomial::line(s)),
        };
        one.scaled(self.mult as i64)
    }
}

impl fmt::Display for TwistTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            TermKind::Line => "O",
            TermKind::Omega1 => "Ω¹",
            TermKind::Omega2 => "Ω²",
        };
        write!(f, "{name}({})", self.twist)?;
        if self.mult != 1 {
            write!(f, "^{}", self.mult)?;
        }
        Ok(())
    }
}

/// Expand terms into one `(kind, twist)` per summand.
pub fn summands(terms: &[TwistTerm]) -> Vec<(TermKind, i64)> {
    terms
        .iter()
        .flat_map(|t| std::iter::repeat_n((t.kind, t.twist), t.mult))
        .collect()
}

/// One entry of a map between sums of bundles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entry<F> {
    /// Structurally zero.
    Zero,
    /// A map between line bundles.
    Form(HomogeneousForm<F>),
    /// A map from a line bundle into `Ω^p(k)`.
    Omega(OmegaSection<F>),
}

impl<F: Field> Entry<F> {
    pub fn as_form(&self) -> Option<&HomogeneousForm<F>> {
        match self {
            Entry::Form(f) => Some(f),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Entry::Zero => true,
            Entry::Form(f) => f.is_zero(),
            Entry::Omega(s) => s.is_zero(),
        }
    }
}

/// Block matrix of map entries, row-major, rows indexed by target summands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormMatrix<F> {
    rows: usize,
    cols: usize,
    entries: Vec<Entry<F>>,
}

impl<F: Field> FormMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FormMatrix {
            rows,
            cols,
            entries: vec![Entry::Zero; rows * cols],
        }
    }

    pub fn new(rows: usize, cols: usize, entries: Vec<Entry<F>>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} map",
                entries.len()
            )));
        }
        Ok(FormMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_forms(rows: Vec<Vec<HomogeneousForm<F>>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged form matrix".into()));
        }
        let n = rows.len();
        Ok(FormMatrix {
            rows: n,
            cols,
            entries: rows.into_iter().flatten().map(Entry::Form).collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Entry<F> {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: Entry<F>) {
        self.entries[i * self.cols + j] = e;
    }

    pub fn form(&self, i: usize, j: usize) -> Option<&HomogeneousForm<F>> {
        self.get(i, j).as_form()
    }

    pub fn row(&self, i: usize) -> &[Entry<F>] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = FormMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Stack extra rows below.
    pub fn stack(&self, rows: &[Vec<Entry<F>>]) -> Result<Self> {
        let mut entries = self.entries.clone();
        for r in rows {
            if r.len() != self.cols {
                return Err(Error::DimensionMismatch("stacked row length".into()));
            }
            entries.extend(r.iter().cloned());
        }
        FormMatrix::new(self.rows + rows.len(), self.cols, entries)
    }

    /// Append structurally zero columns.
    pub fn pad_columns(&self, extra: usize) -> Self {
        let cols = self.cols + extra;
        let mut out = FormMatrix::zeros(self.rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn has_omega(&self) -> bool {
        self.entries.iter().any(|e| matches!(e, Entry::Omega(_)))
    }

    /// Entrywise product `self · rhs` for line-bundle maps.
    pub(crate) fn compose_forms(
        &self,
        rhs: &Self,
        skip_inner: &dyn Fn(usize) -> bool,
    ) -> Vec<Option<HomogeneousForm<F>>> {
        let mut out = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc: Option<HomogeneousForm<F>> = None;
                for k in 0..self.cols {
                    if skip_inner(k) {
                        continue;
                    }
                    if let (Some(a), Some(b)) = (self.form(i, k), rhs.form(k, j)) {
                        let p = a.multiply(b);
                        acc = Some(match acc {
                            None => p,
                            Some(s) => s.add(&p).expect("homogeneous composite"),
                        });
                    }
                }
                out.push(acc);
            }
        }
        out
    }
}

/// Euler characteristic `χ(t)` as `(c0 + c1 t + c2 t² + c3 t³) / 6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChiPolynomial {
    /// Numerator coefficients, lowest degree first; the denominator is 6.
    pub numerator: [i64; 4],
}

impl ChiPolynomial {
    /// `χ(O(s + t)) = (t+s+1)(t+s+2)(t+s+3)/6`.
    pub fn line(s: i64) -> Self {
        ChiPolynomial {
            numerator: [
                s * s * s + 6 * s * s + 11 * s + 6,
                3 * s * s + 12 * s + 11,
                3 * s + 6,
                1,
            ],
        }
    }

    pub fn scaled(&self, k: i64) -> Self {
        ChiPolynomial {
            numerator: self.numerator.map(|c| c * k),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut n = self.numerator;
        for (a, b) in n.iter_mut().zip(other.numerator) {
            *a += b;
        }
        ChiPolynomial { numerator: n }
    }

    pub fn eval(&self, t: i64) -> i64 {
        let [c0, c1, c2, c3] = self.numerator;
        let v = c0 + c1 * t + c2 * t * t + c3 * t * t * t;
        debug_assert_eq!(v % 6, 0, "Euler characteristic must be an integer");
        v / 6
    }
}

/// `h^i(E(t))` for a window of twists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyTable {
    pub rank: i64,
    pub c1: i64,
    pub chi: ChiPolynomial,
    pub entries: BTreeMap<i64, [usize; 4]>,
}

impl CohomologyTable {
    pub fn h(&self, i: usize, t: i64) -> Option<usize> {
        self.entries.get(&t).map(|h| h[i])
    }

    pub fn alternating_sum(&self, t: i64) -> Option<i64> {
        self.entries
            .get(&t)
            .map(|h| h[0] as i64 - h[1] as i64 + h[2] as i64 - h[3] as i64)
    }

    /// Every stored twist satisfies `Σ(-1)^i h^i = χ(t)`.
    pub fn euler_consistent(&self) -> bool {
        self.entries
            .keys()
            .all(|&t| self.alternating_sum(t) == Some(self.chi.eval(t)))
    }
}

impl fmt::Display for CohomologyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rank {}, c1 {}", self.rank, self.c1)?;
        writeln!(
            f,
            "{:>5} {:>6} {:>6} {:>6} {:>6} {:>6}",
            "t", "h0", "h1", "h2", "h3", "chi"
        )?;
        for (t, h) in &self.entries {
            writeln!(
                f,
                "{:>5} {:>6} {:>6} {:>6} {:>6} {:>6}",
                t,
                h[0],
                h[1],
                h[2],
                h[3],
                self.chi.eval(*t)
            )?;
        }
        Ok(())
    }
}

/// A monad `0 → left → middle → right → 0` with maps `A`, `B` and an
/// optional symplectic form on the middle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monad<F> {
    left: TwistTerm,
    middle: Vec<TwistTerm>,
    right: TwistTerm,
    a: FormMatrix<F>,
    b: FormMatrix<F>,
    j: Option<DenseMatrix<F>>,
}

impl<F: Field> Monad<F> {
    /// Build and check a monad: shapes, entry degrees, `B∘A = 0` exactly and,
    /// when present, `J` antisymmetric invertible with `B = Aᵀ J`.
    pub fn new(
        left: TwistTerm,
        middle: Vec<TwistTerm>,
        right: TwistTerm,
        a: FormMatrix<F>,
        b: FormMatrix<F>,
        j: Option<DenseMatrix<F>>,
    ) -> Result<Self> {
        let m = Monad {
            left,
            middle,
            right,
            a,
            b,
            j,
        };
        m.check_shape()?;
        m.check_degrees()?;
        m.check_complex()?;
        m.check_symplectic()?;
        Ok(m)
    }

    /// `W O(-1) → V O → W* O(1)` with `B = Aᵀ J`.
    pub fn barth(a: FormMatrix<F>, j: DenseMatrix<F>) -> Result<Self> {
        let n = a.cols();
        let v = a.rows();
        if j.rows() != v || j.cols() != v {
            return Err(Error::DimensionMismatch(format!("J must be {v}x{v}")));
        }
        let mut b = FormMatrix::zeros(n, v);
        for r in 0..n {
            for c in 0..v {
                let mut acc = HomogeneousForm::zero(1);
                for k in 0..v {
                    if let Some(f) = a.form(k, r) {
                        if !j[(k, c)].is_zero() {
                            acc = acc.add(&f.scale(&j[(k, c)]))?;
                        }
                    }
                }
                b.set(r, c, Entry::Form(acc));
            }
        }
        Monad::new(
            TwistTerm::line(n, -1),
            vec![TwistTerm::line(v, 0)],
            TwistTerm::line(n, 1),
            a,
            b,
            Some(j),
        )
    }

    /// `W O(-1) → V O → W* O(1)` with an explicitly given `B`.
    pub fn barth_with_b(a: FormMatrix<F>, b: FormMatrix<F>) -> Result<Self> {
        let n = a.cols();
        let v = a.rows();
        Monad::new(
            TwistTerm::line(n, -1),
            vec![TwistTerm::line(v, 0)],
            TwistTerm::line(b.rows(), 1),
            a,
            b,
            None,
        )
    }

    pub fn left(&self) -> &TwistTerm {
        &self.left
    }

    pub fn middle(&self) -> &[TwistTerm] {
        &self.middle
    }

    pub fn right(&self) -> &TwistTerm {
        &self.right
    }

    pub fn a(&self) -> &FormMatrix<F> {
        &self.a
    }

    pub fn b(&self) -> &FormMatrix<F> {
        &self.b
    }

    pub fn symplectic(&self) -> Option<&DenseMatrix<F>> {
        self.j.as_ref()
    }

    pub fn middle_summands(&self) -> Vec<(TermKind, i64)> {
        summands(&self.middle)
    }

    pub fn middle_dim(&self) -> usize {
        self.middle.iter().map(|t| t.mult).sum()
    }

    pub fn has_omega(&self) -> bool {
        self.middle.iter().any(|t| t.kind != TermKind::Line)
    }

    /// Rank of the cohomology bundle, from the term data.
    pub fn rank(&self) -> i64 {
        self.middle
            .iter()
            .map(|t| t.kind.rank() * t.mult as i64)
            .sum::<i64>()
            - self.left.mult as i64
            - self.right.mult as i64
    }

    pub fn c1(&self) -> i64 {
        self.middle.iter().map(TwistTerm::c1).sum::<i64>() - self.left.c1() - self.right.c1()
    }

    pub fn chi_polynomial(&self) -> ChiPolynomial {
        self.middle
            .iter()
            .fold(ChiPolynomial::default(), |acc, t| acc.plus(&t.chi()))
            .plus(&self.left.chi().scaled(-1))
            .plus(&self.right.chi().scaled(-1))
    }

    pub fn chi(&self, t: i64) -> i64 {
        self.chi_polynomial().eval(t)
    }

    fn check_shape(&self) -> Result<()> {
        if self.left.kind != TermKind::Line || self.right.kind != TermKind::Line {
            return Err(Error::UnsupportedTerm(
                "outer monad terms must be sums of line bundles".into(),
            ));
        }
        if self.middle.iter().any(|t| t.mult == 0) {
            return Err(Error::InvalidInput(
                "middle terms need multiplicity >= 1".into(),
            ));
        }
        let v = self.middle_dim();
        if self.a.rows() != v || self.a.cols() != self.left.mult {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, expected {}x{}",
                self.a.rows(),
                self.a.cols(),
                v,
                self.left.mult
            )));
        }
        if self.b.rows() != self.right.mult || self.b.cols() != v {
            return Err(Error::DimensionMismatch(format!(
                "B is {}x{}, expected {}x{}",
                self.b.rows(),
                self.b.cols(),
                self.right.mult,
                v
            )));
        }
        Ok(())
    }

    pub(crate) fn check_degrees(&self) -> Result<()> {
        let mids = self.middle_summands();
        for (i, &(kind, m)) in mids.iter().enumerate() {
            for c in 0..self.left.mult {
                let expected = m - self.left.twist;
                let loc = || format!("A[{i}][{c}]");
                match (kind, self.a.get(i, c)) {
                    (_, Entry::Zero) => {}
                    (TermKind::Line, Entry::Form(f)) => check_degree(loc(), expected, f.degree())?,
                    (TermKind::Line, Entry::Omega(_)) => {
                        return Err(Error::InvalidInput(format!(
                            "{}: Ω-section into a line term",
                            loc()
                        )))
                    }
                    (k, Entry::Omega(s)) => {
                        if s.p() != k.form_degree() {
                            return Err(Error::InvalidInput(format!(
                                "{}: wrong Ω-section type",
                                loc()
                            )));
                        }
                        check_degree(loc(), expected, s.degree())?;
                    }
                    (_, Entry::Form(_)) => {
                        return Err(Error::InvalidInput(format!(
                            "{}: plain form into an Ω term",
                            loc()
                        )))
                    }
                }
            }
            for r in 0..self.right.mult {
                let loc = || format!("B[{r}][{i}]");
                match (kind, self.b.get(r, i)) {
                    (_, Entry::Zero) => {}
                    (TermKind::Line, Entry::Form(f)) => {
                        check_degree(loc(), self.right.twist - m, f.degree())?
                    }
                    _ => {
                        return Err(Error::InvalidInput(format!(
                            "{}: B must be zero on Ω terms and form-valued on line terms",
                            loc()
                        )))
                    }
                }
            }
        }
        Ok(())
    }

    pub(crate) fn check_complex(&self) -> Result<()> {
        let mids = self.middle_summands();
        let composite = self
            .b
            .compose_forms(&self.a, &|k| mids[k].0 != TermKind::Line);
        for (idx, e) in composite.iter().enumerate() {
            if let Some(f) = e {
                if !f.is_zero() {
                    return Err(Error::ComplexConditionFailed {
                        row: idx / self.a.cols(),
                        col: idx % self.a.cols(),
                        entry: f.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    fn check_symplectic(&self) -> Result<()> {
        let Some(j) = &self.j else { return Ok(()) };
        let v = self.middle_dim();
        if j.rows() != v || j.cols() != v {
            return Err(Error::DimensionMismatch(format!("J must be {v}x{v}")));
        }
        for r in 0..v {
            for c in 0..v {
                if j[(r, c)].clone() + j[(c, r)].clone() != F::zero() {
                    return Err(Error::InvalidInput("J is not antisymmetric".into()));
                }
            }
        }
        if j.rank() != v {
            return Err(Error::InvalidInput("J is singular".into()));
        }
        if self.has_omega() {
            return Err(Error::UnsupportedTerm(
                "symplectic form with Ω terms".into(),
            ));
        }
        // B = Aᵀ J
        for r in 0..self.b.rows() {
            for c in 0..v {
                let mut acc: Option<HomogeneousForm<F>> = None;
                for k in 0..v {
                    if let Some(f) = self.a.form(k, r) {
                        let t = f.scale(&j[(k, c)]);
                        acc = Some(match acc {
                            None => t,
                            Some(s) => s.add(&t)?,
                        });
                    }
                }
                let expected_zero = acc.as_ref().is_none_or(HomogeneousForm::is_zero);
                let ok = match (self.b.get(r, c), &acc) {
                    (Entry::Zero, _) => expected_zero,
                    (Entry::Form(f), Some(g)) => f == g,
                    (Entry::Form(f), None) => f.is_zero(),
                    _ => false,
                };
                if !ok {
                    return Err(Error::InvalidInput(format!(
                        "B[{r}][{c}] differs from (A^T J)[{r}][{c}]"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The underlying complex of line-bundle sums (degrees −1, 0, 1).
    pub fn to_line_complex(&self) -> Result<LineComplex<F>> {
        if self.has_omega() {
            return Err(Error::UnsupportedTerm(
                "Ω terms must go through the Koszul expansion (cohomology_ext)".into(),
            ));
        }
        LineComplex::new(
            -1,
            vec![
                summands(&[self.left]).into_iter().map(|s| s.1).collect(),
                self.middle_summands().into_iter().map(|s| s.1).collect(),
                summands(&[self.right]).into_iter().map(|s| s.1).collect(),
            ],
            vec![self.a.clone(), self.b.clone()],
        )
    }

    /// `h^i(E(t))` for `t` in `t_min..=t_max`.
    pub fn cohomology(&self, t_min: i64, t_max: i64) -> Result<CohomologyTable> {
        let complex = self.to_line_complex()?;
        self.table_from(&complex, t_min, t_max)
    }

    pub(crate) fn table_from(
        &self,
        complex: &LineComplex<F>,
        t_min: i64,
        t_max: i64,
    ) -> Result<CohomologyTable> {
        Ok(CohomologyTable {
            rank: self.rank(),
            c1: self.c1(),
            chi: self.chi_polynomial(),
            entries: complex.cohomology_range(t_min, t_max)?,
        })
    }

    /// The dual monad `R* → M* → L*` with maps `Bᵀ`, `Aᵀ`; its cohomology bundle is `E*`.
    pub fn dual(&self) -> Result<Self> {
        if self.has_omega() {
            return Err(Error::UnsupportedTerm(
                "dual of a monad with Ω terms".into(),
            ));
        }
        let middle = self
            .middle
            .iter()
            .map(|t| TwistTerm::line(t.mult, -t.twist))
            .collect();
        let j = match &self.j {
            // B' = A'ᵀ J' with A' = Bᵀ = -J A forces J' = J⁻¹
            Some(j) => Some(
                j.inverse()
                    .ok_or_else(|| Error::InvalidInput("J is singular".into()))?,
            ),
            None => None,
        };
        Monad::new(
            TwistTerm::line(self.right.mult, -self.right.twist),
            middle,
            TwistTerm::line(self.left.mult, -self.left.twist),
            self.b.transpose(),
            self.a.transpose(),
            j,
        )
    }

    /// Replace the maps, keeping the terms; used by generators and tests.
    pub fn with_maps(&self, a: FormMatrix<F>, b: FormMatrix<F>) -> Result<Self> {
        Monad::new(self.left, self.middle.clone(), self.right, a, b, None)
    }
}

fn check_degree(location: String, expected: i64, found: i64) -> Result<()> {
    if expected == found || (expected < 0 && found < 0) {
        Ok(())
    } else {
        Err(Error::DegreeMismatch {
            location,
            expected,
            found,
        })
    }
}

impl<F: Field> DenseMatrix<F> {
    pub fn inverse(&self) -> Option<Self> {
        let n = self.rows();
        if n != self.cols() {
            return None;
        }
        let (r, pivots) = self.hstack(&DenseMatrix::identity(n)).ok()?.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(DenseMatrix::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }
}
