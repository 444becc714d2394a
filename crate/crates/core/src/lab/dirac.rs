//! Clifford multiplication, the coupled Dirac operator and its zero modes.

#[cfg(test)]
use nalgebra::Complex;
use nalgebra::{DMatrix, RealField};
use rayon::prelude::*;

use super::connection::{assemble_block_connection, unit};
use super::expr::Expr;
use super::{
    CMatrix, ChartPoint, ConnectionForm, LabError, LabReport, LabResult, MatrixField, Residuals,
    SpinorField,
};

/// `γ_μ = [[0, ē_μ], [e_μ, 0]]`, Hermitian with `{γ_μ, γ_ν} = 2δ_μν`.
pub fn gamma<T: RealField + Copy>(mu: usize) -> CMatrix<T> {
    let mut g = DMatrix::zeros(4, 4);
    g.view_mut((0, 2), (2, 2)).copy_from(&unit::<T>(mu, true));
    g.view_mut((2, 0), (2, 2)).copy_from(&unit::<T>(mu, false));
    g
}

/// `Cliff(Θ) = Σ e_μ Θ_μ` for a one-form `Θ` with values in `2 × r` spinor matrices;
/// this is the `S₋` part of `Σ γ_μ Θ_μ`.
pub fn clifford_multiply<T: RealField + Copy>(theta: &[CMatrix<T>; 4]) -> LabResult<CMatrix<T>> {
    let cols = theta[0].ncols();
    if theta.iter().any(|t| t.shape() != (2, cols)) {
        return Err(LabError::RankMismatch(
            "Clifford multiplication needs 2 x r components".into(),
        ));
    }
    Ok((0..4).fold(DMatrix::zeros(2, cols), |acc, mu| {
        acc + unit::<T>(mu, false) * &theta[mu]
    }))
}

/// `∇_μψ = ∂_μψ + S_μψ + ψA_μᵀ`: `S` acts on the spinor index, `A` on the gauge index.
pub fn covariant_derivative<T: RealField + Copy>(
    spin: &ConnectionForm<T>,
    gauge: &ConnectionForm<T>,
    psi: &SpinorField<T>,
    x: &ChartPoint<T>,
    h: T,
) -> LabResult<[CMatrix<T>; 4]> {
    if spin.rank() != 2 || gauge.rank() != psi.gauge_rank() {
        return Err(LabError::RankMismatch(format!(
            "spin rank {}, gauge rank {}, spinor gauge rank {}",
            spin.rank(),
            gauge.rank(),
            psi.gauge_rank()
        )));
    }
    let p = psi.eval(x)?;
    let s = spin.eval(x)?;
    let a = gauge.eval(x)?;
    let mut out: [CMatrix<T>; 4] = std::array::from_fn(|_| DMatrix::zeros(0, 0));
    for mu in 0..4 {
        out[mu] = psi.field().partial(x, mu, h)? + &s[mu] * &p + &p * a[mu].transpose();
    }
    Ok(out)
}

/// `‖Cliff(∇ψ)‖` at `x` with the trivial spin connection.
pub fn dirac_residual<T: RealField + Copy>(
    a: &ConnectionForm<T>,
    psi: &SpinorField<T>,
    x: &ChartPoint<T>,
    h: T,
) -> LabResult<T> {
    let theta = covariant_derivative(&ConnectionForm::flat(2), a, psi, x, h)?;
    Ok(clifford_multiply(&theta)?.norm())
}

/// The normalizable zero mode `(|y|² + ρ²)^{-3/2} ε` of [`super::bpst_connection`],
/// `ε = [[0, 1], [-1, 0]]` pairing the spinor and gauge indices. Defined up to scale.
pub fn bpst_zero_mode<T: RealField + Copy>(center: ChartPoint<f64>, rho: f64) -> SpinorField<T> {
    assert!(rho > 0.0, "scale must be positive");
    let r2 = (0..4).fold(Expr::real(rho * rho), |acc, i| {
        let y = Expr::var(i) - Expr::real(center[i]);
        acc + y.clone() * y
    });
    let f = r2.pow(-1.5);
    let entries = vec![Expr::zero(), f.clone(), -f, Expr::zero()];
    SpinorField::new(MatrixField::from_exprs(2, 2, entries).expect("2x2")).expect("two spinor rows")
}

/// Outcome of the class-𝒜 checks for `(∇̃, ∇₁, ψ₁)`.
#[derive(Debug, Clone)]
pub struct ClassAReport {
    /// `ψ₂ = ψ₁*`, `Θᵢ = ∇ψᵢ`: these hold by construction.
    pub by_construction: bool,
    /// `‖Cliff(Θ₁)‖` at each point.
    pub dirac_residuals: Vec<f64>,
    pub max_dirac: f64,
    /// Caller's record that the quadruple passed the algebraic `m`-condition.
    pub m_condition: bool,
    /// Block connection on `S₊ ⊕ F̃` with off-diagonal data `ψ₁`, `ψ₂`.
    pub assembled: ConnectionForm<f64>,
}

impl ClassAReport {
    pub fn to_lab_report(&self, points: &[ChartPoint<f64>], h: f64) -> LabReport {
        LabReport {
            points: points.to_vec(),
            h,
            residuals: Residuals {
                dirac: Some(self.max_dirac),
                ..Residuals::default()
            },
        }
    }
}

/// Build `ψ₂ = ψ₁*`, measure `Cliff(∇ψ₁)` over `points` and assemble the block connection.
pub fn check_class_a_conditions(
    n_tilde: &ConnectionForm<f64>,
    n1: &ConnectionForm<f64>,
    psi1: &SpinorField<f64>,
    points: &[ChartPoint<f64>],
    h: f64,
    m_condition: bool,
) -> LabResult<ClassAReport> {
    if n1.rank() != 2 || n_tilde.rank() != psi1.gauge_rank() {
        return Err(LabError::RankMismatch(format!(
            "spinor connection rank {}, gauge rank {}, spinor gauge rank {}",
            n1.rank(),
            n_tilde.rank(),
            psi1.gauge_rank()
        )));
    }
    let dirac_residuals: Vec<f64> = points
        .par_iter()
        .map(|x| {
            let theta = covariant_derivative(n1, n_tilde, psi1, x, h)?;
            Ok(clifford_multiply(&theta)?.norm())
        })
        .collect::<LabResult<_>>()?;
    let max_dirac = dirac_residuals.iter().copied().fold(0.0, f64::max);
    let r = psi1.gauge_rank();
    let src = psi1.field().clone();
    let psi2 = MatrixField::from_fn(r, 2, move |x| Ok(src.eval(x)?.adjoint()));
    let assembled = assemble_block_connection(n1, n_tilde, psi1.field(), &psi2, h)?;
    Ok(ClassAReport {
        by_construction: true,
        dirac_residuals,
        max_dirac,
        m_condition,
        assembled,
    })
}
