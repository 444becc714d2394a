use monadforge::lab::{
    assemble_block_connection, bpst_connection, commuting_square_residual, curvature,
    curvature_richardson, gauge_covariance_residual, gauge_transform, instanton_density,
    sample_points, ConnectionForm, Expr, MatrixField,
};
use proptest::prelude::*;

const H: f64 = 1e-4;
const H_CURV: f64 = 1e-3;
const TOL: f64 = 1e-6;

/// `e_μ` entries, row major: `(I, -iσ₁, -iσ₂, -iσ₃)`.
const UNITS: [[(f64, f64); 4]; 4] = [
    [(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)],
    [(0.0, 0.0), (0.0, -1.0), (0.0, -1.0), (0.0, 0.0)],
    [(0.0, 0.0), (-1.0, 0.0), (1.0, 0.0), (0.0, 0.0)],
    [(0.0, -1.0), (0.0, 0.0), (0.0, 0.0), (0.0, 1.0)],
];

fn x(i: usize) -> Expr {
    Expr::var(i)
}

/// `q₀ + q₁e₁ + q₂e₂ + q₃e₃` with `q₀ = 1 + α|x|²` and linear `q₁..q₃`; never singular.
fn quaternion_gauge(alpha: f64, lin: &[f64]) -> MatrixField<f64> {
    let r2 = (0..4).fold(Expr::zero(), |s, i| s + x(i) * x(i));
    let q = [
        Expr::real(1.0) + Expr::real(alpha) * r2,
        Expr::real(lin[0]) * x(1) + Expr::real(lin[1]),
        Expr::real(lin[2]) * x(0) * x(2),
        Expr::real(lin[3]) * x(3),
    ];
    let entries = (0..4)
        .map(|k| {
            (0..4).fold(Expr::zero(), |s, mu| {
                s + q[mu].clone() * Expr::complex(UNITS[mu][k].0, UNITS[mu][k].1)
            })
        })
        .collect();
    MatrixField::from_exprs(2, 2, entries).unwrap()
}

/// `1 + βx₀² + iγx₁`: a nowhere vanishing abelian gauge.
fn abelian_gauge(beta: f64, gamma: f64) -> MatrixField<f64> {
    let e = Expr::real(1.0) + Expr::real(beta) * x(0) * x(0) + Expr::complex(0.0, gamma) * x(1);
    MatrixField::from_exprs(1, 1, vec![e]).unwrap()
}

/// `A_μ = i c_μ·x`, a U(1) connection.
fn abelian_connection(c: &[f64]) -> ConnectionForm<f64> {
    let comps = std::array::from_fn(|mu| {
        let e = (0..4).fold(Expr::zero(), |s, j| {
            s + Expr::complex(0.0, c[4 * mu + j]) * x(j)
        });
        MatrixField::from_exprs(1, 1, vec![e]).unwrap()
    });
    ConnectionForm::new(comps, true).unwrap()
}

/// Entries `c₀ + c₁x₀ + c₂x₁x₂ + c₃x₃²`, one coefficient block per entry.
fn polynomial_field(rows: usize, cols: usize, c: &[f64]) -> MatrixField<f64> {
    let entries = (0..rows * cols)
        .map(|k| {
            let c = &c[4 * k..4 * k + 4];
            Expr::real(c[0])
                + Expr::real(c[1]) * x(0)
                + Expr::real(c[2]) * x(1) * x(2)
                + Expr::real(c[3]) * x(3) * x(3)
        })
        .collect();
    MatrixField::from_exprs(rows, cols, entries).unwrap()
}

fn coeffs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn assembly_commutes_with_block_gauge(
        phi in coeffs(16),
        conn in coeffs(16),
        alpha in 0.0f64..0.3,
        lin in coeffs(4),
        beta in 0.0f64..0.3,
        gamma in -0.5f64..0.5,
        seed in any::<u64>(),
    ) {
        let n1 = bpst_connection::<f64>([0.0; 4], 1.0);
        let n2 = abelian_connection(&conn);
        let phi1 = polynomial_field(2, 1, &phi[..8]);
        let phi2 = polynomial_field(1, 2, &phi[8..]);
        let points = sample_points(4, 0.5, 2.0, seed);
        let r = commuting_square_residual(
            &n1, &n2, &phi1, &phi2, &quaternion_gauge(alpha, &lin), &abelian_gauge(beta, gamma), &points, H, H_CURV,
        ).unwrap();
        prop_assert!(r < TOL, "{r}");
    }

    #[test]
    fn curvature_top_left_block(phi in coeffs(16), conn in coeffs(16), seed in any::<u64>()) {
        let n1 = bpst_connection::<f64>([0.0; 4], 1.0);
        let a = assemble_block_connection(
            &n1, &abelian_connection(&conn), &polynomial_field(2, 1, &phi[..8]), &polynomial_field(1, 2, &phi[8..]), H,
        ).unwrap();
        for p in sample_points(4, 0.5, 2.0, seed) {
            let f = curvature(&a, &p, H_CURV).unwrap();
            let f1 = curvature(&n1, &p, H_CURV).unwrap();
            let comps = a.eval(&p).unwrap();
            let b = |mu: usize| comps[mu].view((0, 2), (2, 1)).into_owned();
            let c = |mu: usize| comps[mu].view((2, 0), (1, 2)).into_owned();
            for (k, (mu, nu)) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)].into_iter().enumerate() {
                let want = &f1[k] + b(mu) * c(nu) - b(nu) * c(mu);
                let got = f[k].view((0, 0), (2, 2)).into_owned();
                prop_assert!((got - want).norm() < TOL);
            }
        }
    }

    #[test]
    fn curvature_is_gauge_covariant(alpha in 0.0f64..0.3, lin in coeffs(4), rho in 0.5f64..2.0, seed in any::<u64>()) {
        let a = bpst_connection::<f64>([0.1, -0.2, 0.0, 0.3], rho);
        let g = quaternion_gauge(alpha, &lin);
        let points = sample_points(4, 0.5, 2.5, seed);
        prop_assert!(gauge_covariance_residual(&a, &g, &points, H).unwrap() < TOL);
        let moved = gauge_transform(&a, &g, H).unwrap();
        for p in &points {
            let before = instanton_density(&curvature_richardson(&a, p, 2e-3).unwrap());
            let after = instanton_density(&curvature_richardson(&moved, p, 2e-3).unwrap());
            prop_assert!((before - after).norm() < 1e-6 * (1.0 + before.norm()));
        }
    }
}
