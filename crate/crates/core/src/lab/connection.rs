//! Curvature, gauge action and the block assembly of connections.

use nalgebra::{Complex, DMatrix, RealField};
use rayon::prelude::*;

use super::expr::Expr;
use super::{
    max_norm, point_f64, to_t, CMatrix, ChartPoint, ConnectionForm, LabError, LabResult,
    MatrixField,
};

/// Index pairs `μ < ν` in the order used for curvature components.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// `(re, im)` entries of `e_μ`, row-major 2×2.
const UNITS: [[(f64, f64); 4]; 4] = [
    [(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)],
    [(0.0, 0.0), (0.0, -1.0), (0.0, -1.0), (0.0, 0.0)],
    [(0.0, 0.0), (-1.0, 0.0), (1.0, 0.0), (0.0, 0.0)],
    [(0.0, -1.0), (0.0, 0.0), (0.0, 0.0), (0.0, 1.0)],
];

/// `e_μ` as a numeric matrix, or `ē_μ` when `bar` is set.
pub(crate) fn unit<T: RealField + Copy>(mu: usize, bar: bool) -> CMatrix<T> {
    // ē_k = -e_k for the imaginary units
    let s = if bar && mu > 0 { -1.0 } else { 1.0 };
    DMatrix::from_fn(2, 2, |i, j| {
        let (re, im) = UNITS[mu][2 * i + j];
        Complex::new(to_t(s * re), to_t(s * im))
    })
}

type ExprMat = [[Expr; 2]; 2];

fn unit_expr(mu: usize, bar: bool) -> ExprMat {
    let u = unit::<f64>(mu, bar);
    std::array::from_fn(|i| std::array::from_fn(|j| Expr::complex(u[(i, j)].re, u[(i, j)].im)))
}

fn emul(a: &ExprMat, b: &ExprMat) -> ExprMat {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone()
        })
    })
}

/// The charge-one potential `A_μ = Im(ȳ e_μ) / (|y|² + ρ²)`, `y = x - center`.
/// It is antihermitian and `su(2)`-valued.
pub fn bpst_connection<T: RealField + Copy>(
    center: ChartPoint<f64>,
    rho: f64,
) -> ConnectionForm<T> {
    assert!(rho > 0.0, "scale must be positive");
    let y: Vec<Expr> = (0..4)
        .map(|i| Expr::var(i) - Expr::real(center[i]))
        .collect();
    let denom = y
        .iter()
        .fold(Expr::real(rho * rho), |acc, c| acc + c.clone() * c.clone());
    let quat = |bar: bool| -> ExprMat {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                (0..4).fold(Expr::zero(), |acc, nu| {
                    acc + y[nu].clone() * unit_expr(nu, bar)[i][j].clone()
                })
            })
        })
    };
    let (yq, ybar) = (quat(false), quat(true));
    let comps = std::array::from_fn(|mu| {
        let left = emul(&ybar, &unit_expr(mu, false));
        let right = emul(&unit_expr(mu, true), &yq);
        let entries = (0..4)
            .map(|k| {
                let (i, j) = (k / 2, k % 2);
                (left[i][j].clone() - right[i][j].clone()) * Expr::real(0.5) / denom.clone()
            })
            .collect();
        MatrixField::from_exprs(2, 2, entries).expect("2x2")
    });
    ConnectionForm::new(comps, true).expect("rank 2")
}

/// Closed-form curvature of [`bpst_connection`]:
/// `F_μν = ρ² (ē_μ e_ν - ē_ν e_μ) / (|y|² + ρ²)²`.
pub fn bpst_curvature<T: RealField + Copy>(
    center: ChartPoint<f64>,
    rho: f64,
    x: &ChartPoint<T>,
) -> [CMatrix<T>; 6] {
    let r2 = (0..4).fold(T::zero(), |acc, i| {
        let d = x[i] - to_t(center[i]);
        acc + d * d
    });
    let rho2: T = to_t(rho * rho);
    let s = rho2 / ((r2 + rho2) * (r2 + rho2));
    PAIRS.map(|(m, n)| {
        (unit::<T>(m, true) * unit::<T>(n, false) - unit::<T>(n, true) * unit::<T>(m, false))
            * Complex::new(s, T::zero())
    })
}

/// `F_μν = ∂_μA_ν - ∂_νA_μ + [A_μ, A_ν]` with central differences of step `h`.
pub fn curvature<T: RealField + Copy>(
    a: &ConnectionForm<T>,
    x: &ChartPoint<T>,
    h: T,
) -> LabResult<[CMatrix<T>; 6]> {
    let at = a.eval(x)?;
    let mut d: Vec<Vec<CMatrix<T>>> = Vec::with_capacity(4);
    for mu in 0..4 {
        d.push(
            (0..4)
                .map(|nu| a.component(nu).partial(x, mu, h))
                .collect::<LabResult<_>>()?,
        );
    }
    Ok(PAIRS.map(|(m, n)| &d[m][n] - &d[n][m] + &at[m] * &at[n] - &at[n] * &at[m]))
}

/// Richardson-extrapolated curvature `(4 F(h/2) - F(h)) / 3`, error `O(h⁴)`.
pub fn curvature_richardson<T: RealField + Copy>(
    a: &ConnectionForm<T>,
    x: &ChartPoint<T>,
    h: T,
) -> LabResult<[CMatrix<T>; 6]> {
    let coarse = curvature(a, x, h)?;
    let fine = curvature(a, x, h / to_t(2.0))?;
    let (four, three) = (
        Complex::new(to_t::<T>(4.0), T::zero()),
        Complex::new(to_t::<T>(3.0), T::zero()),
    );
    Ok(std::array::from_fn(|k| {
        (&fine[k] * four - &coarse[k]) / three
    }))
}

/// Hodge dual of a curvature in [`PAIRS`] order.
pub fn hodge_star<T: RealField + Copy>(f: &[CMatrix<T>; 6]) -> [CMatrix<T>; 6] {
    [
        f[5].clone(),
        -f[4].clone(),
        f[3].clone(),
        f[2].clone(),
        -f[1].clone(),
        f[0].clone(),
    ]
}

/// `max ‖F + *F‖`; zero exactly for anti-self-dual curvature.
pub fn asd_residual<T: RealField + Copy>(f: &[CMatrix<T>; 6]) -> T {
    let star = hodge_star(f);
    max_norm((0..6).map(|k| &f[k] + &star[k]))
}

/// `tr(F₀₁F₂₃ - F₀₂F₁₃ + F₀₃F₁₂)`, proportional to the density of `tr(F∧F)`.
pub fn instanton_density<T: RealField + Copy>(f: &[CMatrix<T>; 6]) -> Complex<T> {
    (&f[0] * &f[5] - &f[1] * &f[4] + &f[2] * &f[3]).trace()
}

/// `A'_μ = g A_μ g⁻¹ - (∂_μ g) g⁻¹`, derivatives of `g` by central differences.
pub fn gauge_transform<T: RealField + Copy>(
    a: &ConnectionForm<T>,
    g: &MatrixField<T>,
    h: T,
) -> LabResult<ConnectionForm<T>> {
    let r = a.rank();
    if g.rows() != r || g.cols() != r {
        return Err(LabError::RankMismatch(format!(
            "gauge {}x{} on a rank {r} connection",
            g.rows(),
            g.cols()
        )));
    }
    let comps = std::array::from_fn(|mu| {
        let (a, g) = (a.clone(), g.clone());
        MatrixField::from_fn(r, r, move |x| {
            let gx = g.eval(x)?;
            let inv = gx
                .clone()
                .try_inverse()
                .ok_or_else(|| LabError::SingularGauge(point_f64(x)))?;
            let am = a.component(mu).eval(x)?;
            Ok(&gx * am * &inv - g.partial(x, mu, h)? * &inv)
        })
    });
    // unitary gauges keep A antihermitian, but that is not checked here
    ConnectionForm::new(comps, false)
}

/// The connection on `F₁ ⊕ F₂` with diagonal blocks `A¹`, `A²` and
/// off-diagonal blocks `∂φ₁ + A¹φ₁ - φ₁A²` and `∂φ₂ + A²φ₂ - φ₂A¹`.
pub fn assemble_block_connection<T: RealField + Copy>(
    n1: &ConnectionForm<T>,
    n2: &ConnectionForm<T>,
    phi1: &MatrixField<T>,
    phi2: &MatrixField<T>,
    h: T,
) -> LabResult<ConnectionForm<T>> {
    let (r1, r2) = (n1.rank(), n2.rank());
    if (phi1.rows(), phi1.cols()) != (r1, r2) || (phi2.rows(), phi2.cols()) != (r2, r1) {
        return Err(LabError::RankMismatch(format!(
            "phi1 is {}x{}, phi2 is {}x{}, ranks are {r1} and {r2}",
            phi1.rows(),
            phi1.cols(),
            phi2.rows(),
            phi2.cols()
        )));
    }
    let comps = std::array::from_fn(|mu| {
        let (n1, n2, phi1, phi2) = (n1.clone(), n2.clone(), phi1.clone(), phi2.clone());
        MatrixField::from_fn(r1 + r2, r1 + r2, move |x| {
            let a1 = n1.component(mu).eval(x)?;
            let a2 = n2.component(mu).eval(x)?;
            let p1 = phi1.eval(x)?;
            let p2 = phi2.eval(x)?;
            let off12 = phi1.partial(x, mu, h)? + &a1 * &p1 - &p1 * &a2;
            let off21 = phi2.partial(x, mu, h)? + &a2 * &p2 - &p2 * &a1;
            let mut m = DMatrix::zeros(r1 + r2, r1 + r2);
            m.view_mut((0, 0), (r1, r1)).copy_from(&a1);
            m.view_mut((r1, r1), (r2, r2)).copy_from(&a2);
            m.view_mut((0, r1), (r1, r2)).copy_from(&off12);
            m.view_mut((r1, 0), (r2, r1)).copy_from(&off21);
            Ok(m)
        })
    });
    // antihermitian only when φ₂ = -φ₁†, which is not assumed
    ConnectionForm::new(comps, false)
}

/// `diag(g₁, g₂)`.
pub fn block_diagonal<T: RealField + Copy>(
    g1: &MatrixField<T>,
    g2: &MatrixField<T>,
) -> MatrixField<T> {
    let (r1, c1, r2, c2) = (g1.rows(), g1.cols(), g2.rows(), g2.cols());
    let (g1, g2) = (g1.clone(), g2.clone());
    MatrixField::from_fn(r1 + r2, c1 + c2, move |x| {
        let mut m = DMatrix::zeros(r1 + r2, c1 + c2);
        m.view_mut((0, 0), (r1, c1)).copy_from(&g1.eval(x)?);
        m.view_mut((r1, c1), (r2, c2)).copy_from(&g2.eval(x)?);
        Ok(m)
    })
}

/// `g₁ φ g₂⁻¹`, the transport of `φ: F₂ → F₁` under a change of both splittings.
pub fn conjugate_field<T: RealField + Copy>(
    g1: &MatrixField<T>,
    phi: &MatrixField<T>,
    g2: &MatrixField<T>,
) -> MatrixField<T> {
    let (g1, phi, g2) = (g1.clone(), phi.clone(), g2.clone());
    MatrixField::from_fn(phi.rows(), phi.cols(), move |x| {
        let inv = g2
            .eval(x)?
            .try_inverse()
            .ok_or_else(|| LabError::SingularGauge(point_f64(x)))?;
        Ok(g1.eval(x)? * phi.eval(x)? * inv)
    })
}

/// Largest curvature difference between assembling after a block-diagonal
/// gauge change and gauge-changing the assembly. `h` is used for derivatives
/// of `g` and `φ`, `h_curv` for the curvature.
#[allow(clippy::too_many_arguments)]
pub fn commuting_square_residual(
    n1: &ConnectionForm<f64>,
    n2: &ConnectionForm<f64>,
    phi1: &MatrixField<f64>,
    phi2: &MatrixField<f64>,
    g1: &MatrixField<f64>,
    g2: &MatrixField<f64>,
    points: &[ChartPoint<f64>],
    h: f64,
    h_curv: f64,
) -> LabResult<f64> {
    let moved_first = assemble_block_connection(
        &gauge_transform(n1, g1, h)?,
        &gauge_transform(n2, g2, h)?,
        &conjugate_field(g1, phi1, g2),
        &conjugate_field(g2, phi2, g1),
        h,
    )?;
    let assembled_first = gauge_transform(
        &assemble_block_connection(n1, n2, phi1, phi2, h)?,
        &block_diagonal(g1, g2),
        h,
    )?;
    let per_point: Vec<f64> = points
        .par_iter()
        .map(|x| -> LabResult<f64> {
            let f1 = curvature(&moved_first, x, h_curv)?;
            let f2 = curvature(&assembled_first, x, h_curv)?;
            Ok(max_norm((0..6).map(|k| &f1[k] - &f2[k])))
        })
        .collect::<LabResult<_>>()?;
    Ok(per_point.into_iter().fold(0.0, f64::max))
}

/// `max ‖D_λF_μν + D_μF_νλ + D_νF_λμ‖` over the four triples, with `D = ∂ + [A, ·]`
/// and curvature itself by central differences. Both layers use step `h`.
pub fn bianchi_residual<T: RealField + Copy>(
    a: &ConnectionForm<T>,
    x: &ChartPoint<T>,
    h: T,
) -> LabResult<T> {
    let at = a.eval(x)?;
    let f_at = curvature(a, x, h)?;
    let comp = |f: &[CMatrix<T>; 6], m: usize, n: usize| -> CMatrix<T> {
        match PAIRS.iter().position(|&p| p == (m.min(n), m.max(n))) {
            Some(k) if m < n => f[k].clone(),
            Some(k) => -f[k].clone(),
            None => DMatrix::zeros(a.rank(), a.rank()),
        }
    };
    // ∂_λ F at x for each λ
    let mut df = Vec::with_capacity(4);
    for l in 0..4 {
        let mut fwd = *x;
        let mut back = *x;
        fwd[l] += h;
        back[l] -= h;
        let (ff, fb) = (curvature(a, &fwd, h)?, curvature(a, &back, h)?);
        let two_h = Complex::new(h + h, T::zero());
        df.push(std::array::from_fn::<_, 6, _>(|k| {
            (&ff[k] - &fb[k]) / two_h
        }));
    }
    let cov = |l: usize, m: usize, n: usize| -> CMatrix<T> {
        let f = comp(&f_at, m, n);
        comp(&df[l], m, n) + &at[l] * &f - &f * &at[l]
    };
    let triples = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)];
    Ok(max_norm(triples.iter().map(|&(l, m, n)| {
        cov(l, m, n) + cov(m, n, l) + cov(n, l, m)
    })))
}

/// The gauge `a + b e₁ + c e₂ + d e₃` with `a = 1 + 0.1|x|²`, `b = 0.3x₁`,
/// `c = -0.2x₀x₂`, `d = 0.5x₃`; its determinant `a² + b² + c² + d²` never vanishes.
pub fn sample_gauge<T: RealField + Copy>() -> MatrixField<T> {
    let x = |i| Expr::var(i);
    let a = Expr::real(1.0) + Expr::real(0.1) * (0..4).fold(Expr::zero(), |s, i| s + x(i) * x(i));
    let (b, c, d) = (
        Expr::real(0.3) * x(1),
        Expr::real(-0.2) * x(0) * x(2),
        Expr::real(0.5) * x(3),
    );
    let q = [a, b, c, d];
    let entries = (0..4)
        .map(|k| {
            (0..4).fold(Expr::zero(), |s, mu| {
                let u = unit::<f64>(mu, false)[(k / 2, k % 2)];
                s + q[mu].clone() * Expr::complex(u.re, u.im)
            })
        })
        .collect();
    MatrixField::from_exprs(2, 2, entries).expect("2x2")
}

/// Largest `‖F(gauge(A)) - g F(A) g⁻¹‖` over `points`, in parallel.
pub fn gauge_covariance_residual(
    a: &ConnectionForm<f64>,
    g: &MatrixField<f64>,
    points: &[ChartPoint<f64>],
    h: f64,
) -> LabResult<f64> {
    let moved = gauge_transform(a, g, h)?;
    let per_point: Vec<f64> = points
        .par_iter()
        .map(|x| -> LabResult<f64> {
            let gx = g.eval(x)?;
            let inv = gx
                .clone()
                .try_inverse()
                .ok_or_else(|| LabError::SingularGauge(point_f64(x)))?;
            let f = curvature(a, x, h)?;
            let f2 = curvature(&moved, x, h)?;
            Ok(max_norm((0..6).map(|k| &f2[k] - &gx * &f[k] * &inv)))
        })
        .collect::<LabResult<_>>()?;
    Ok(per_point.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::standard_points;

    #[test]
    fn quaternion_units() {
        for mu in 0..4 {
            let e = unit::<f64>(mu, false);
            let eb = unit::<f64>(mu, true);
            assert!((e.adjoint() - &eb).norm() < 1e-15);
            assert!((&eb * &e - CMatrix::identity(2, 2)).norm() < 1e-15);
        }
        // e₁e₂ = e₃
        let prod = unit::<f64>(1, false) * unit::<f64>(2, false);
        assert!((prod - unit::<f64>(3, false)).norm() < 1e-15);
    }

    #[test]
    fn flat_and_abelian_curvature() {
        let x = [0.3, -0.2, 0.7, 1.1];
        let f = curvature(&ConnectionForm::<f64>::flat(2), &x, 1e-3).unwrap();
        assert!(f.iter().all(|m| m.norm() == 0.0));
        // A = x2 dx1
        let z = MatrixField::zeros(1, 1);
        let a1 = MatrixField::from_exprs(1, 1, vec![Expr::var(2)]).unwrap();
        let a = ConnectionForm::new([z.clone(), a1, z.clone(), z], false).unwrap();
        let f = curvature(&a, &x, 1e-3).unwrap();
        assert!((f[3][(0, 0)].re + 1.0).abs() < 1e-10);
        for k in [0, 1, 2, 4, 5] {
            assert!(f[k].norm() < 1e-10);
        }
    }

    #[test]
    fn bpst_is_antihermitian_and_matches_closed_form() {
        let pts = standard_points();
        let a = bpst_connection::<f64>([0.0; 4], 1.0);
        assert!(a.antihermitian_defect(&pts).unwrap() < 1e-12);
        for x in &pts {
            let fd = curvature(&a, x, 1e-3).unwrap();
            let exact = bpst_curvature([0.0; 4], 1.0, x);
            assert!(max_norm((0..6).map(|k| &fd[k] - &exact[k])) < 1e-5);
            assert!(asd_residual(&exact) < 1e-12);
        }
    }

    #[test]
    fn shifted_center() {
        let c = [0.5, -1.0, 0.25, 2.0];
        let a = bpst_connection::<f64>(c, 0.7);
        let x = [1.0, 0.2, -0.4, 1.5];
        let fd = curvature(&a, &x, 1e-3).unwrap();
        let exact = bpst_curvature(c, 0.7, &x);
        assert!(max_norm((0..6).map(|k| &fd[k] - &exact[k])) < 1e-5);
    }

    #[test]
    fn curvature_scales_with_rho() {
        let x = [0.1, 0.2, -0.1, 0.05];
        let n = |rho: f64| bpst_curvature([0.0; 4], rho, &x)[0].norm();
        let ratio: f64 = n(100.0) / n(200.0);
        assert!((ratio - 4.0).abs() < 1e-3, "{ratio}");
    }

    #[test]
    fn gauge_identity_and_constant() {
        let a = bpst_connection::<f64>([0.0; 4], 1.0);
        let x = [0.4, 0.1, -0.3, 0.9];
        let same = gauge_transform(&a, &MatrixField::identity(2), 1e-4).unwrap();
        for (p, q) in same
            .eval(&x)
            .unwrap()
            .iter()
            .zip(a.eval(&x).unwrap().iter())
        {
            assert!((p - q).norm() < 1e-14);
        }
        let g = unit::<f64>(2, false) * Complex::new(2.0, 0.0);
        let moved = gauge_transform(&a, &MatrixField::constant(&g), 1e-4).unwrap();
        let inv = g.clone().try_inverse().unwrap();
        for (p, q) in moved
            .eval(&x)
            .unwrap()
            .iter()
            .zip(a.eval(&x).unwrap().iter())
        {
            assert!((p - &g * q * &inv).norm() < 1e-12);
        }
    }

    #[test]
    fn singular_gauge_is_rejected() {
        let a = ConnectionForm::<f64>::flat(1);
        let g = MatrixField::from_exprs(1, 1, vec![Expr::var(0)]).unwrap();
        let moved = gauge_transform(&a, &g, 1e-4).unwrap();
        assert!(matches!(
            moved.eval(&[0.0, 1.0, 0.0, 0.0]),
            Err(LabError::SingularGauge(_))
        ));
    }

    #[test]
    fn curvature_is_gauge_covariant() {
        let a = bpst_connection::<f64>([0.0; 4], 1.0);
        let r = gauge_covariance_residual(&a, &sample_gauge(), &standard_points(), 1e-4).unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn density_is_gauge_invariant() {
        let a = bpst_connection::<f64>([0.0; 4], 1.0);
        let moved = gauge_transform(&a, &sample_gauge(), 1e-4).unwrap();
        for x in standard_points().iter().take(8) {
            let d1 = instanton_density(&curvature_richardson(&a, x, 2e-3).unwrap());
            let d2 = instanton_density(&curvature_richardson(&moved, x, 2e-3).unwrap());
            assert!((d1 - d2).norm() < 1e-8, "{}", (d1 - d2).norm());
        }
    }

    #[test]
    fn zero_phi_gives_block_diagonal() {
        let a = bpst_connection::<f64>([0.0; 4], 1.0);
        let b = ConnectionForm::flat(1);
        let asm = assemble_block_connection(
            &a,
            &b,
            &MatrixField::zeros(2, 1),
            &MatrixField::zeros(1, 2),
            1e-3,
        )
        .unwrap();
        let x = [0.2, 0.5, -0.1, 0.3];
        let f = curvature(&asm, &x, 1e-3).unwrap();
        for m in &f {
            assert!(m.view((0, 2), (2, 1)).norm() == 0.0);
            assert!(m.view((2, 0), (1, 2)).norm() == 0.0);
        }
        // flat blocks and constant φ: off-diagonal blocks vanish
        let c = MatrixField::constant(&DMatrix::from_element(1, 1, Complex::new(2.0, 1.0)));
        let flat = ConnectionForm::flat(1);
        let asm = assemble_block_connection(&flat, &flat, &c, &c, 1e-3).unwrap();
        assert!(asm.eval(&x).unwrap().iter().all(|m| m.norm() < 1e-12));
    }

    #[test]
    fn rank_mismatch_in_assembly() {
        let a = ConnectionForm::<f64>::flat(2);
        let err = assemble_block_connection(
            &a,
            &a,
            &MatrixField::zeros(2, 1),
            &MatrixField::zeros(2, 2),
            1e-3,
        );
        assert!(matches!(err, Err(LabError::RankMismatch(_))));
    }

    #[test]
    fn bianchi_is_second_order() {
        let a = bpst_connection::<f64>([0.0; 4], 1.0);
        let x = [0.3, -0.4, 0.2, 0.6];
        let r1 = bianchi_residual(&a, &x, 2e-2).unwrap();
        let r2 = bianchi_residual(&a, &x, 1e-2).unwrap();
        assert!(r1 < 1e-2 && r2 < r1 / 3.0, "{r1} {r2}");
    }
}
