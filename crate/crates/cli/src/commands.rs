use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use monadforge::ext::{
    build_tower, class_of_f, cohomology_ext, extension_monad, stability_check, OmegaSection,
};
use monadforge::graded::basis_dim;
use monadforge::json::{
    class_to_json, monad_from_json, monad_to_json, peek_field, real_check_to_json, row_degrees,
    row_from_json, scan_to_json, stability_to_json, tower_from_json, validation_to_json,
};
use monadforge::lab::{
    asd_residual, bpst_connection, bpst_zero_mode, curvature_richardson, dirac_residual,
    gauge_covariance_residual, sample_gauge, sample_points, Expr, LabError, LabReport, MatrixField,
    Residuals, SpinorField,
};
use monadforge::lines::{check_real_triviality, scan_lines, LineSampler};
use monadforge::monad::{
    default_d_max, gen_instanton_syzygy, gen_null_correlation, validate_monad, GeneratorOptions,
    RankCertificate,
};
use monadforge::{
    Error, Field, FieldKind, Fp, GaussianRational, HomogeneousForm, Monad, Rational, TwistTerm,
};

use crate::{Cli, Command, ExtKind, GenType, SamplerKind};

/// Primes with a compiled field implementation.
pub const PRIMES: [u64; 10] = [3, 5, 7, 11, 13, 101, 1009, 32003, 65521, 2147483647];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => core_exit_code(e),
            CliError::Lab(LabError::NonFinite(_) | LabError::SingularGauge(_)) => 1,
            CliError::Lab(_) | CliError::Io { .. } | CliError::Usage(_) => 2,
        }
    }
}

/// Mathematical failures exit with 1, malformed input with 2.
fn core_exit_code(e: &Error) -> u8 {
    match e {
        Error::TowerStage { source, .. } => core_exit_code(source),
        Error::ComplexConditionFailed { .. }
        | Error::DegreeMismatch { .. }
        | Error::GenerationFailed { .. }
        | Error::StabilityViolation(_)
        | Error::RangeError { .. }
        | Error::DegenerateRestriction(_)
        | Error::WindowTooSmall(_)
        | Error::NotAResolution { .. }
        | Error::Uncertified(_) => 1,
        _ => 2,
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub struct Outcome {
    pub json: Value,
    pub success: bool,
    pub message: Option<String>,
}

impl Outcome {
    fn ok(json: Value) -> Self {
        Outcome {
            json,
            success: true,
            message: None,
        }
    }
}

/// Run `$body` with `$F` bound to the field type named by `$kind`.
macro_rules! with_field {
    ($kind:expr, $F:ident, $body:block) => {
        match $kind {
            FieldKind::Rational => {
                type $F = Rational;
                $body
            }
            FieldKind::Gaussian => {
                type $F = GaussianRational;
                $body
            }
            FieldKind::Prime { p } => with_field!(@prime p, $F, $body, 3, 5, 7, 11, 13, 101, 1009, 32003, 65521, 2147483647),
        }
    };
    (@prime $p:ident, $F:ident, $body:block, $($q:literal),*) => {
        match $p {
            $($q => {
                type $F = Fp<$q>;
                $body
            })*
            other => Err(CliError::Usage(format!("prime {other} is not supported; use one of {PRIMES:?}"))),
        }
    };
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Core(Error::Json(e)))
}

/// The field of an input document, checked against `--field` when given.
fn input_field(cli: &Cli, doc: &Value) -> Result<FieldKind> {
    let found = peek_field(doc.get("base").unwrap_or(doc))?;
    match cli.field {
        Some(want) if want != found => Err(Error::FieldMismatch {
            expected: want.to_string(),
            found: found.to_string(),
        }
        .into()),
        _ => Ok(found),
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Gen { kind, n } => {
            let field = cli.field.unwrap_or(FieldKind::Prime { p: 32003 });
            with_field!(field, F, { gen::<F>(cli, *kind, *n) })
        }
        Command::Validate { input, samples } => {
            let doc = read_json(input)?;
            with_field!(input_field(cli, &doc)?, F, {
                validate::<F>(cli, &doc, *samples)
            })
        }
        Command::Cohom { input, tmin, tmax } => {
            if tmin > tmax {
                return Err(CliError::Usage("--tmin must not exceed --tmax".into()));
            }
            let doc = read_json(input)?;
            with_field!(input_field(cli, &doc)?, F, {
                let m = monad_from_json::<F>(&doc)?;
                let table = if m.has_omega() {
                    cohomology_ext(&m, *tmin, *tmax)?
                } else {
                    m.cohomology(*tmin, *tmax)?
                };
                Ok(Outcome::ok(
                    serde_json::to_value(&table).map_err(Error::Json)?,
                ))
            })
        }
        Command::Extend { input, k, kind, f } => {
            let doc = read_json(input)?;
            with_field!(input_field(cli, &doc)?, F, {
                extend::<F>(cli, &doc, *k, *kind, f.as_deref())
            })
        }
        Command::Tower { input } => {
            let doc = read_json(input)?;
            with_field!(input_field(cli, &doc)?, F, {
                let spec = tower_from_json::<F>(&doc)?;
                let stages = build_tower(&spec)?;
                Ok(Outcome::ok(
                    json!({"stages": stages.iter().map(monad_to_json).collect::<Vec<_>>()}),
                ))
            })
        }
        Command::Class { input, k, f } => {
            let doc = read_json(input)?;
            with_field!(input_field(cli, &doc)?, F, {
                let m = monad_from_json::<F>(&doc)?;
                let row = row_or_random(&m, *k, f.as_deref(), cli.seed)?;
                Ok(Outcome::ok(class_to_json(&class_of_f(&m, *k, &row)?)))
            })
        }
        Command::Stability { input } => {
            let doc = read_json(input)?;
            with_field!(input_field(cli, &doc)?, F, {
                let report = stability_check(&monad_from_json::<F>(&doc)?)?;
                Ok(Outcome {
                    json: stability_to_json(&report),
                    success: report.stable,
                    message: (!report.stable).then(|| "extension is not stable".to_string()),
                })
            })
        }
        Command::ScanLines {
            input,
            count,
            sampler,
            bound,
        } => {
            let doc = read_json(input)?;
            let sampler = match sampler {
                SamplerKind::SmallHeight => LineSampler::SmallHeight { bound: *bound },
                SamplerKind::Uniform => LineSampler::Uniform,
            };
            with_field!(input_field(cli, &doc)?, F, {
                let m = monad_from_json::<F>(&doc)?;
                Ok(Outcome::ok(scan_to_json(&scan_lines(
                    &m, *count, cli.seed, sampler,
                )?)))
            })
        }
        Command::RealCheck { input, samples } => {
            let doc = read_json(input)?;
            let m: Monad<GaussianRational> = match input_field(cli, &doc)? {
                FieldKind::Gaussian => monad_from_json(&doc)?,
                FieldKind::Rational => monad_from_json::<Rational>(&doc)?.lift()?,
                FieldKind::Prime { .. } => {
                    return Err(CliError::Usage(
                        "real-check needs a rational or gaussian monad".into(),
                    ))
                }
            };
            let report = check_real_triviality(&m, *samples, cli.seed)?;
            Ok(Outcome {
                json: real_check_to_json(&report),
                success: report.all_trivial,
                message: (!report.all_trivial)
                    .then(|| "found a real line with nontrivial splitting".to_string()),
            })
        }
        Command::ConnDemo {
            rho,
            h,
            gauge_h,
            points,
            tol,
        } => conn_demo(cli, *rho, *h, *gauge_h, *points, *tol),
        Command::DiracCheck {
            rho,
            h,
            points,
            tol,
            negative_control,
        } => dirac_check(cli, *rho, *h, *points, *tol, *negative_control),
    }
}

fn gen<F: Field>(cli: &Cli, kind: GenType, n: usize) -> Result<Outcome> {
    let m = match kind {
        GenType::NullCorrelation => gen_null_correlation::<F>(),
        GenType::Instanton => {
            let opts = GeneratorOptions {
                d_max: cli.dmax,
                ..GeneratorOptions::default()
            };
            gen_instanton_syzygy::<F>(n, cli.seed, &opts)?
        }
    };
    Ok(Outcome::ok(monad_to_json(&m)))
}

fn validate<F: Field>(cli: &Cli, doc: &Value, samples: usize) -> Result<Outcome> {
    let m = monad_from_json::<F>(doc)?;
    let d_max = cli.dmax.unwrap_or_else(|| default_d_max(m.left().mult));
    let report = validate_monad(&m, d_max, samples, cli.seed);
    let message = [("A", &report.a_injective), ("B", &report.b_surjective)]
        .iter()
        .find_map(|(name, c)| match c {
            RankCertificate::Refuted { point } => Some(format!(
                "{name} drops rank at ({})",
                point
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(", ")
            )),
            RankCertificate::Inconclusive { d_max } => {
                Some(format!("{name}: inconclusive up to degree {d_max}"))
            }
            RankCertificate::Certified { .. } => None,
        });
    Ok(Outcome {
        json: validation_to_json(&report),
        success: report.is_valid(),
        message,
    })
}

fn random_form<F: Field, R: Rng>(d: i64, rng: &mut R) -> HomogeneousForm<F> {
    if d < 0 {
        return HomogeneousForm::zero(d);
    }
    HomogeneousForm::new(d, (0..basis_dim(d)).map(|_| F::random(rng)).collect()).expect("length")
}

fn row_or_random<F: Field>(
    m: &Monad<F>,
    k: i64,
    f: Option<&str>,
    seed: u64,
) -> Result<Vec<HomogeneousForm<F>>> {
    match f {
        Some(text) => {
            let v: Value = serde_json::from_str(text).map_err(Error::Json)?;
            Ok(row_from_json(m, k, &v)?)
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(row_degrees(m, k)
                .into_iter()
                .map(|d| random_form(d, &mut rng))
                .collect())
        }
    }
}

fn extend<F: Field>(
    cli: &Cli,
    doc: &Value,
    k: i64,
    kind: ExtKind,
    f: Option<&str>,
) -> Result<Outcome> {
    let m = monad_from_json::<F>(doc)?;
    let (term, row) = match kind {
        ExtKind::Line => {
            let row = row_or_random(&m, k, f, cli.seed)?;
            (
                TwistTerm::line(1, k),
                row.into_iter()
                    .map(monadforge::monad::Entry::Form)
                    .collect(),
            )
        }
        ExtKind::Omega1 | ExtKind::Omega2 => {
            if f.is_some() {
                return Err(CliError::Usage(
                    "--f is only accepted for line extensions".into(),
                ));
            }
            let p = if kind == ExtKind::Omega1 { 1 } else { 2 };
            let term = TwistTerm::omega(p, k);
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let row = row_degrees(&m, k)
                .into_iter()
                .map(|d| {
                    if d < p as i64 {
                        Ok(monadforge::monad::Entry::Zero)
                    } else {
                        OmegaSection::random(p, d, &mut rng).map(monadforge::monad::Entry::Omega)
                    }
                })
                .collect::<monadforge::Result<Vec<_>>>()?;
            (term, row)
        }
    };
    let e = extension_monad(&m, term, row)?;
    let d_max = cli.dmax.unwrap_or_else(|| default_d_max(e.left().mult));
    let valid = validate_monad(
        &e,
        d_max,
        monadforge::monad::DEFAULT_SAMPLE_POINTS,
        cli.seed,
    )
    .is_valid();
    Ok(Outcome {
        json: monad_to_json(&e),
        success: valid,
        message: (!valid).then(|| "extension monad is not certified".to_string()),
    })
}

fn chart_points(count: usize, seed: u64) -> Vec<[f64; 4]> {
    sample_points(count, 0.5, 3.0, seed)
}

fn conn_demo(cli: &Cli, rho: f64, h: f64, gauge_h: f64, count: usize, tol: f64) -> Result<Outcome> {
    if rho <= 0.0 || h <= 0.0 || gauge_h <= 0.0 || tol <= 0.0 {
        return Err(CliError::Usage(
            "rho, steps and tolerance must be positive".into(),
        ));
    }
    let points = chart_points(count, cli.seed);
    let a = bpst_connection::<f64>([0.0; 4], rho);
    let mut asd = 0.0f64;
    for x in &points {
        asd = asd.max(asd_residual(&curvature_richardson(&a, x, h)?));
    }
    let gauge = gauge_covariance_residual(&a, &sample_gauge(), &points, gauge_h)?;
    let report = LabReport {
        points,
        h,
        residuals: Residuals {
            asd: Some(asd),
            gauge: Some(gauge),
            dirac: None,
        },
    };
    let success = asd < tol && gauge < tol;
    Ok(Outcome {
        json: serde_json::to_value(&report).map_err(Error::Json)?,
        success,
        message: (!success).then(|| format!("residual above tolerance {tol}")),
    })
}

fn dirac_check(
    cli: &Cli,
    rho: f64,
    h: f64,
    count: usize,
    tol: f64,
    negative_control: bool,
) -> Result<Outcome> {
    if rho <= 0.0 || h <= 0.0 || tol <= 0.0 {
        return Err(CliError::Usage(
            "rho, step and tolerance must be positive".into(),
        ));
    }
    let points = chart_points(count, cli.seed);
    let a = bpst_connection::<f64>([0.0; 4], rho);
    let psi = if negative_control {
        let f = Expr::real(1.0) + Expr::var(0);
        SpinorField::new(MatrixField::from_exprs(
            2,
            2,
            vec![Expr::zero(), f.clone(), -f, Expr::zero()],
        )?)?
    } else {
        bpst_zero_mode([0.0; 4], rho)
    };
    let mut worst = 0.0f64;
    for x in &points {
        worst = worst.max(dirac_residual(&a, &psi, x, h)?);
    }
    let report = LabReport {
        points,
        h,
        residuals: Residuals {
            dirac: Some(worst),
            ..Residuals::default()
        },
    };
    let success = worst < tol;
    Ok(Outcome {
        json: serde_json::to_value(&report).map_err(Error::Json)?,
        success,
        message: (!success).then(|| format!("Dirac residual {worst:e} above tolerance {tol}")),
    })
}
