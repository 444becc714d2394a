//! Numerical gauge fields on the flat chart `R⁴ ⊂ S⁴`.
//!
//! Everything here is floating point and uses central differences. The
//! numeric type is generic over [`RealField`]; [`Real`] is the default.
//!
//! Conventions, fixed once for every residual:
//!
//! * quaternion units `e = (I, -iσ₁, -iσ₂, -iσ₃)` and conjugates `ē = (I, iσ₁, iσ₂, iσ₃)`;
//! * `γ_μ = [[0, ē_μ], [e_μ, 0]]` in chiral blocks, so Clifford multiplication
//!   sends a positive spinor `ψ` to `Σ e_μ ψ_μ`;
//! * orientation `dx⁰∧dx¹∧dx²∧dx³`, so `*F₀₁ = F₂₃`, `*F₀₂ = -F₁₃`, `*F₀₃ = F₁₂`;
//! * curvature `F_μν = ∂_μA_ν - ∂_νA_μ + [A_μ, A_ν]`, gauge action
//!   `A ↦ gAg⁻¹ - (∂g)g⁻¹`.
//!
//! The conformal factor between the chart and the round sphere is ignored;
//! the Dirac kernel is conformally covariant.

mod connection;
mod dirac;
mod expr;

use std::fmt;
use std::sync::Arc;

use nalgebra::{Complex, DMatrix, RealField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use connection::{
    asd_residual, assemble_block_connection, bianchi_residual, block_diagonal, bpst_connection,
    bpst_curvature, commuting_square_residual, conjugate_field, curvature, curvature_richardson,
    gauge_covariance_residual, gauge_transform, hodge_star, instanton_density, sample_gauge, PAIRS,
};
pub use dirac::{
    bpst_zero_mode, check_class_a_conditions, clifford_multiply, covariant_derivative,
    dirac_residual, gamma, ClassAReport,
};
pub use expr::Expr;

pub type Real = f64;
/// A point of the flat chart.
pub type ChartPoint<T = Real> = [T; 4];
pub type CMatrix<T = Real> = DMatrix<Complex<T>>;

/// Default central-difference step.
pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum LabError {
    #[error("non-finite value at {0:?}")]
    NonFinite(Vec<f64>),
    #[error("gauge transformation is singular at {0:?}")]
    SingularGauge(Vec<f64>),
    #[error("rank mismatch: {0}")]
    RankMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type LabResult<T> = std::result::Result<T, LabError>;

pub(crate) fn point_f64<T: RealField + Copy>(x: &ChartPoint<T>) -> Vec<f64> {
    x.iter()
        .map(|c| nalgebra::try_convert::<T, f64>(*c).unwrap_or(f64::NAN))
        .collect()
}

fn to_t<T: RealField + Copy>(v: f64) -> T {
    T::from_f64(v).expect("f64 constant")
}

type Evaluator<T> = Arc<dyn Fn(&ChartPoint<T>) -> LabResult<CMatrix<T>> + Send + Sync>;

/// A complex matrix depending on the chart point.
#[derive(Clone)]
pub struct MatrixField<T: RealField + Copy = Real> {
    rows: usize,
    cols: usize,
    repr: Repr<T>,
}

#[derive(Clone)]
enum Repr<T> {
    /// Row-major entries.
    Closed(Vec<Expr>),
    Derived(Evaluator<T>),
}

impl<T: RealField + Copy> MatrixField<T> {
    /// A field given by closed-form entries, row-major.
    pub fn from_exprs(rows: usize, cols: usize, entries: Vec<Expr>) -> LabResult<Self> {
        if entries.len() != rows * cols {
            return Err(LabError::RankMismatch(format!(
                "{} entries for a {rows}x{cols} field",
                entries.len()
            )));
        }
        Ok(MatrixField {
            rows,
            cols,
            repr: Repr::Closed(entries),
        })
    }

    /// A field computed by `f`; the values must have shape `rows × cols`.
    pub fn from_fn<G>(rows: usize, cols: usize, f: G) -> Self
    where
        G: Fn(&ChartPoint<T>) -> LabResult<CMatrix<T>> + Send + Sync + 'static,
    {
        MatrixField {
            rows,
            cols,
            repr: Repr::Derived(Arc::new(f)),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_exprs(rows, cols, vec![Expr::zero(); rows * cols]).expect("shape")
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n * n)
            .map(|k| {
                if k / n == k % n {
                    Expr::real(1.0)
                } else {
                    Expr::zero()
                }
            })
            .collect();
        Self::from_exprs(n, n, entries).expect("shape")
    }

    /// A constant field.
    pub fn constant(m: &DMatrix<Complex<f64>>) -> Self {
        let entries = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| Expr::complex(m[(i, j)].re, m[(i, j)].im))
            .collect();
        Self::from_exprs(m.nrows(), m.ncols(), entries).expect("shape")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// The expression entries, for closed-form fields.
    pub fn exprs(&self) -> Option<&[Expr]> {
        match &self.repr {
            Repr::Closed(e) => Some(e),
            Repr::Derived(_) => None,
        }
    }

    pub fn eval(&self, x: &ChartPoint<T>) -> LabResult<CMatrix<T>> {
        let m = match &self.repr {
            Repr::Closed(entries) => DMatrix::from_fn(self.rows, self.cols, |i, j| {
                entries[i * self.cols + j].eval(x)
            }),
            Repr::Derived(f) => {
                let m = f(x)?;
                if m.shape() != (self.rows, self.cols) {
                    return Err(LabError::RankMismatch(format!(
                        "field declared {}x{} evaluated to {:?}",
                        self.rows,
                        self.cols,
                        m.shape()
                    )));
                }
                m
            }
        };
        if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(m)
        } else {
            Err(LabError::NonFinite(point_f64(x)))
        }
    }

    /// Central difference `∂_μ` with step `h`.
    pub fn partial(&self, x: &ChartPoint<T>, mu: usize, h: T) -> LabResult<CMatrix<T>> {
        let mut fwd = *x;
        let mut back = *x;
        fwd[mu] += h;
        back[mu] -= h;
        let d = self.eval(&fwd)? - self.eval(&back)?;
        Ok(d / Complex::new(h + h, T::zero()))
    }
}

impl<T: RealField + Copy> fmt::Debug for MatrixField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Closed(e) => {
                let s: Vec<String> = e.iter().map(ToString::to_string).collect();
                write!(f, "MatrixField({}x{}, {:?})", self.rows, self.cols, s)
            }
            Repr::Derived(_) => write!(f, "MatrixField({}x{}, <derived>)", self.rows, self.cols),
        }
    }
}

/// A gauge potential `A = Σ A_μ dx^μ` with `r × r` components.
#[derive(Clone, Debug)]
pub struct ConnectionForm<T: RealField + Copy = Real> {
    rank: usize,
    comps: [MatrixField<T>; 4],
    antihermitian: bool,
}

impl<T: RealField + Copy> ConnectionForm<T> {
    pub fn new(comps: [MatrixField<T>; 4], antihermitian: bool) -> LabResult<Self> {
        let rank = comps[0].rows();
        for (mu, c) in comps.iter().enumerate() {
            if c.rows() != rank || c.cols() != rank {
                return Err(LabError::RankMismatch(format!(
                    "component {mu} is {}x{}, expected {rank}x{rank}",
                    c.rows(),
                    c.cols()
                )));
            }
        }
        Ok(ConnectionForm {
            rank,
            comps,
            antihermitian,
        })
    }

    /// The trivial connection `A = 0`.
    pub fn flat(rank: usize) -> Self {
        let z = MatrixField::zeros(rank, rank);
        ConnectionForm {
            rank,
            comps: [z.clone(), z.clone(), z.clone(), z],
            antihermitian: true,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn component(&self, mu: usize) -> &MatrixField<T> {
        &self.comps[mu]
    }

    pub fn is_flagged_antihermitian(&self) -> bool {
        self.antihermitian
    }

    pub fn eval(&self, x: &ChartPoint<T>) -> LabResult<[CMatrix<T>; 4]> {
        Ok([
            self.comps[0].eval(x)?,
            self.comps[1].eval(x)?,
            self.comps[2].eval(x)?,
            self.comps[3].eval(x)?,
        ])
    }

    /// Largest `‖A_μ† + A_μ‖` over `points`.
    pub fn antihermitian_defect(&self, points: &[ChartPoint<T>]) -> LabResult<T> {
        let mut worst = T::zero();
        for x in points {
            for a in self.eval(x)? {
                let d = (a.adjoint() + &a).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        Ok(worst)
    }
}

/// A section of `S₊ ⊗ F`, valued in `2 × r` matrices (spinor row, gauge column).
#[derive(Clone, Debug)]
pub struct SpinorField<T: RealField + Copy = Real> {
    field: MatrixField<T>,
}

impl<T: RealField + Copy> SpinorField<T> {
    pub fn new(field: MatrixField<T>) -> LabResult<Self> {
        if field.rows() != 2 {
            return Err(LabError::RankMismatch(format!(
                "spinor field has {} rows",
                field.rows()
            )));
        }
        Ok(SpinorField { field })
    }

    pub fn zero(gauge_rank: usize) -> Self {
        SpinorField {
            field: MatrixField::zeros(2, gauge_rank),
        }
    }

    pub fn gauge_rank(&self) -> usize {
        self.field.cols()
    }

    pub fn field(&self) -> &MatrixField<T> {
        &self.field
    }

    pub fn eval(&self, x: &ChartPoint<T>) -> LabResult<CMatrix<T>> {
        self.field.eval(x)
    }
}

/// `count` seeded points with `|x|` uniform in `[r_min, r_max]` and uniform direction.
pub fn sample_points(count: usize, r_min: f64, r_max: f64, seed: u64) -> Vec<ChartPoint<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if n > 1e-3 && n <= 1.0 {
                let r = rng.random_range(r_min..=r_max);
                break v.map(|c| c * r / n);
            }
        })
        .collect()
}

/// The default evaluation set: 20 points with `|x| ∈ [0.5, 3]`.
pub fn standard_points() -> Vec<ChartPoint<f64>> {
    sample_points(20, 0.5, 3.0, 0x5eed)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dirac: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauge: Option<f64>,
}

/// Point set, step and worst residuals of a lab run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabReport {
    pub points: Vec<[f64; 4]>,
    pub h: f64,
    pub residuals: Residuals,
}

/// Largest Frobenius norm among `ms`.
pub(crate) fn max_norm<T: RealField + Copy>(ms: impl IntoIterator<Item = CMatrix<T>>) -> T {
    ms.into_iter()
        .map(|m| m.norm())
        .fold(T::zero(), |a, b| if b > a { b } else { a })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_lie_in_shell() {
        let pts = sample_points(50, 0.5, 3.0, 1);
        for p in &pts {
            let r = p.iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!((0.5 - 1e-12..=3.0 + 1e-12).contains(&r));
        }
        assert_eq!(pts, sample_points(50, 0.5, 3.0, 1));
    }

    #[test]
    fn non_finite_is_reported() {
        let f = MatrixField::<f64>::from_exprs(1, 1, vec![Expr::real(1.0) / Expr::var(0)]).unwrap();
        assert!(matches!(f.eval(&[0.0; 4]), Err(LabError::NonFinite(_))));
        assert!(f.eval(&[2.0, 0.0, 0.0, 0.0]).is_ok());
    }

    #[test]
    fn connection_shape_is_checked() {
        let bad = [
            MatrixField::<f64>::zeros(2, 2),
            MatrixField::zeros(2, 2),
            MatrixField::zeros(2, 3),
            MatrixField::zeros(2, 2),
        ];
        assert!(matches!(
            ConnectionForm::new(bad, false),
            Err(LabError::RankMismatch(_))
        ));
        assert!(SpinorField::new(MatrixField::<f64>::zeros(3, 1)).is_err());
    }

    #[test]
    fn report_json_shape() {
        let r = LabReport {
            points: vec![[1.0, 0.0, 0.0, 0.0]],
            h: 1e-3,
            residuals: Residuals {
                asd: Some(1e-9),
                dirac: None,
                gauge: Some(0.0),
            },
        };
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["h"], 1e-3);
        assert!(v["residuals"].get("dirac").is_none());
        assert_eq!(serde_json::from_value::<LabReport>(v).unwrap(), r);
    }
}
