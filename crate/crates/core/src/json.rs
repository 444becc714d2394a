//! JSON encodings of monads, classes, towers and reports.
//!
//! A form of degree `d` is an array of `C(d+3, 3)` scalar strings in
//! [`crate::graded::monomials`] order. Degrees are never stored: each entry's
//! degree follows from the twists of the terms it connects. Structurally zero
//! entries are `null`, sections of `Ω^p(k)` are `{"omega": p, "forms": [...]}`.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::ext::{ExtensionClass, OmegaSection, StabilityReport, TowerSpec};
use crate::field::{expect_kind, Field, FieldKind};
use crate::graded::{basis_dim, HomogeneousForm};
use crate::linalg::DenseMatrix;
use crate::lines::{Line, RealCheck, ScanReport, SplittingType};
use crate::monad::{
    summands, Entry, FormMatrix, Monad, RankCertificate, TermKind, TwistTerm, ValidationReport,
};

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub fn form_to_json<F: Field>(f: &HomogeneousForm<F>) -> Value {
    Value::Array(
        f.coeffs()
            .iter()
            .map(|c| Value::String(c.to_string()))
            .collect(),
    )
}

fn scalar_from_json<F: Field>(v: &Value) -> Result<F> {
    match v {
        Value::String(s) => F::parse_scalar(s),
        Value::Number(n) => F::parse_scalar(&n.to_string()),
        _ => Err(bad(format!("expected a scalar string, found {v}"))),
    }
}

/// Decode a form whose degree is known from context.
pub fn form_from_json<F: Field>(v: &Value, degree: i64) -> Result<HomogeneousForm<F>> {
    let arr = v
        .as_array()
        .ok_or_else(|| bad(format!("expected a coefficient array, found {v}")))?;
    if degree < 0 {
        if !arr.is_empty() {
            return Err(Error::DegreeMismatch {
                location: "form".into(),
                expected: degree,
                found: -1,
            });
        }
        return Ok(HomogeneousForm::zero(degree));
    }
    if arr.len() != basis_dim(degree) {
        return Err(bad(format!(
            "a degree {degree} form has {} coefficients, found {}",
            basis_dim(degree),
            arr.len()
        )));
    }
    HomogeneousForm::new(
        degree,
        arr.iter().map(scalar_from_json).collect::<Result<_>>()?,
    )
}

fn forms_to_json<F: Field>(fs: &[HomogeneousForm<F>]) -> Value {
    Value::Array(fs.iter().map(form_to_json).collect())
}

fn forms_from_json<F: Field>(v: &Value, degrees: &[i64]) -> Result<Vec<HomogeneousForm<F>>> {
    let arr = v
        .as_array()
        .ok_or_else(|| bad("expected an array of forms"))?;
    if arr.len() != degrees.len() {
        return Err(Error::DimensionMismatch(format!(
            "expected {} forms, found {}",
            degrees.len(),
            arr.len()
        )));
    }
    arr.iter()
        .zip(degrees)
        .map(|(f, &d)| form_from_json(f, d))
        .collect()
}

fn entry_to_json<F: Field>(e: &Entry<F>) -> Value {
    match e {
        Entry::Zero => Value::Null,
        Entry::Form(f) => form_to_json(f),
        Entry::Omega(s) => json!({"omega": s.p(), "forms": forms_to_json(s.components())}),
    }
}

/// `degree` is the degree of the map: target twist minus source twist.
fn entry_from_json<F: Field>(v: &Value, target: TermKind, degree: i64) -> Result<Entry<F>> {
    match v {
        Value::Null => Ok(Entry::Zero),
        Value::Array(_) => Ok(Entry::Form(form_from_json(v, degree)?)),
        Value::Object(o) => {
            let p = o
                .get("omega")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad("Ω entry needs \"omega\": p"))? as u8;
            if p != target.form_degree() {
                return Err(bad(format!("Ω^{p} entry for a {target:?} term")));
            }
            let n = if p == 1 { 4 } else { 6 };
            let comp = degree - p as i64;
            let forms = forms_from_json(o.get("forms").unwrap_or(&Value::Null), &vec![comp; n])?;
            Ok(Entry::Omega(OmegaSection::new(p, degree, forms)?))
        }
        _ => Err(bad(format!("unrecognized matrix entry {v}"))),
    }
}

fn matrix_to_json<F: Field>(m: &FormMatrix<F>) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(entry_to_json).collect()))
            .collect(),
    )
}

fn matrix_from_json<F: Field>(
    v: &Value,
    rows: &[(TermKind, i64)],
    cols: &[(TermKind, i64)],
    name: &str,
) -> Result<FormMatrix<F>> {
    let arr = v
        .as_array()
        .ok_or_else(|| bad(format!("{name} must be an array of rows")))?;
    if arr.len() != rows.len() {
        return Err(Error::DimensionMismatch(format!(
            "{name} has {} rows, expected {}",
            arr.len(),
            rows.len()
        )));
    }
    let mut entries = Vec::with_capacity(rows.len() * cols.len());
    for (i, row) in arr.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| bad(format!("{name}[{i}] must be an array")))?;
        if row.len() != cols.len() {
            return Err(Error::DimensionMismatch(format!(
                "{name}[{i}] has {} entries, expected {}",
                row.len(),
                cols.len()
            )));
        }
        for (j, e) in row.iter().enumerate() {
            entries.push(entry_from_json(e, rows[i].0, rows[i].1 - cols[j].1)?);
        }
    }
    FormMatrix::new(rows.len(), cols.len(), entries)
}

fn dense_to_json<F: Field>(m: &DenseMatrix<F>) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| {
                Value::Array(
                    m.row(i)
                        .iter()
                        .map(|c| Value::String(c.to_string()))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn dense_from_json<F: Field>(v: &Value) -> Result<DenseMatrix<F>> {
    let rows = v
        .as_array()
        .ok_or_else(|| bad("J must be an array of rows"))?;
    let rows = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| bad("J rows must be arrays"))?
                .iter()
                .map(scalar_from_json)
                .collect()
        })
        .collect::<Result<Vec<Vec<F>>>>()?;
    DenseMatrix::from_rows(rows)
}

/// The field tag of a JSON document.
pub fn peek_field(v: &Value) -> Result<FieldKind> {
    let f = v.get("field").ok_or_else(|| bad("missing \"field\""))?;
    Ok(serde_json::from_value(f.clone())?)
}

fn term_from_json(v: Option<&Value>, name: &str) -> Result<TwistTerm> {
    let v = v.ok_or_else(|| bad(format!("missing \"{name}\"")))?;
    Ok(serde_json::from_value(v.clone())?)
}

pub fn monad_to_json<F: Field>(m: &Monad<F>) -> Value {
    let mut o = Map::new();
    o.insert(
        "field".into(),
        serde_json::to_value(F::kind()).expect("field tag"),
    );
    o.insert("left".into(), serde_json::to_value(m.left()).expect("term"));
    o.insert(
        "middle".into(),
        serde_json::to_value(m.middle()).expect("terms"),
    );
    o.insert(
        "right".into(),
        serde_json::to_value(m.right()).expect("term"),
    );
    o.insert("A".into(), matrix_to_json(m.a()));
    o.insert("B".into(), matrix_to_json(m.b()));
    if let Some(j) = m.symplectic() {
        o.insert("J".into(), dense_to_json(j));
    }
    Value::Object(o)
}

fn monad_body<F: Field>(v: &Value) -> Result<Monad<F>> {
    let left = term_from_json(v.get("left"), "left")?;
    let right = term_from_json(v.get("right"), "right")?;
    let middle: Vec<TwistTerm> = serde_json::from_value(
        v.get("middle")
            .cloned()
            .ok_or_else(|| bad("missing \"middle\""))?,
    )?;
    let (ls, ms, rs) = (summands(&[left]), summands(&middle), summands(&[right]));
    let a = matrix_from_json(v.get("A").unwrap_or(&Value::Null), &ms, &ls, "A")?;
    let b = matrix_from_json(v.get("B").unwrap_or(&Value::Null), &rs, &ms, "B")?;
    let j = v
        .get("J")
        .filter(|j| !j.is_null())
        .map(dense_from_json)
        .transpose()?;
    Monad::new(left, middle, right, a, b, j)
}

/// Decode a monad; the stored field must be `F`.
pub fn monad_from_json<F: Field>(v: &Value) -> Result<Monad<F>> {
    expect_kind::<F>(peek_field(v)?)?;
    monad_body(v)
}

impl<F: Field> Monad<F> {
    /// Re-read every coefficient in `G` through its canonical string, e.g. to
    /// view a rational monad over the Gaussian rationals.
    pub fn lift<G: Field>(&self) -> Result<Monad<G>> {
        monad_body(&monad_to_json(self))
    }
}

pub fn class_to_json<F: Field>(c: &ExtensionClass<F>) -> Value {
    json!({
        "field": F::kind(),
        "k": c.k(),
        "representative": forms_to_json(c.representative()),
        "image_basis": c.image_basis().iter().map(|r| forms_to_json(r)).collect::<Vec<_>>(),
        "is_zero": c.is_zero(),
        "quotient_dim": c.quotient_dim(),
    })
}

/// Degrees of an `O(k)` row over the left term of `m`.
pub fn row_degrees<F: Field>(m: &Monad<F>, k: i64) -> Vec<i64> {
    summands(&[*m.left()])
        .into_iter()
        .map(|(_, l)| k - l)
        .collect()
}

/// Decode a row `f` of `O(k)`-extension data for `m`.
pub fn row_from_json<F: Field>(m: &Monad<F>, k: i64, v: &Value) -> Result<Vec<HomogeneousForm<F>>> {
    forms_from_json(v, &row_degrees(m, k))
}

/// `{"base": monad, "steps": [{"k": int, "f": [forms]}]}`.
pub fn tower_to_json<F: Field>(spec: &TowerSpec<F>) -> Value {
    let steps: Vec<Value> = spec
        .steps
        .iter()
        .map(|(k, f)| json!({"k": k, "f": forms_to_json(f)}))
        .collect();
    json!({"base": monad_to_json(&spec.base), "steps": steps})
}

pub fn tower_from_json<F: Field>(v: &Value) -> Result<TowerSpec<F>> {
    let base = monad_from_json::<F>(v.get("base").ok_or_else(|| bad("missing \"base\""))?)?;
    let steps = v
        .get("steps")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing \"steps\""))?;
    let mut out = Vec::with_capacity(steps.len());
    for s in steps {
        let k = s
            .get("k")
            .and_then(Value::as_i64)
            .ok_or_else(|| bad("step needs integer \"k\""))?;
        // every stage shares the left term, so the degrees only depend on k
        let f = row_from_json(&base, k, s.get("f").unwrap_or(&Value::Null))?;
        out.push((k, f));
    }
    Ok(TowerSpec { base, steps: out })
}

fn certificate_to_json<F: Field>(c: &RankCertificate<F>) -> Value {
    match c {
        RankCertificate::Certified { degree } => json!({"status": "certified", "degree": degree}),
        RankCertificate::Refuted { point } => {
            json!({"status": "refuted", "point": point.iter().map(ToString::to_string).collect::<Vec<_>>()})
        }
        RankCertificate::Inconclusive { d_max } => {
            json!({"status": "inconclusive", "d_max": d_max})
        }
    }
}

/// `status` is `valid`, `refuted` when some rank condition has a witness
/// point, and `inconclusive` otherwise.
pub fn validation_to_json<F: Field>(r: &ValidationReport<F>) -> Value {
    let refuted = [&r.a_injective, &r.b_surjective]
        .iter()
        .any(|c| matches!(c, RankCertificate::Refuted { .. }));
    let status = if r.is_valid() {
        "valid"
    } else if refuted || !r.degree_ok || !r.complex_ok {
        "refuted"
    } else {
        "inconclusive"
    };
    json!({
        "status": status,
        "degree_ok": r.degree_ok,
        "complex_ok": r.complex_ok,
        "a_injective": certificate_to_json(&r.a_injective),
        "b_surjective": certificate_to_json(&r.b_surjective),
        "saturation_degree_used": r.saturation_degree_used,
    })
}

fn line_to_json<F: Field>(l: &Line<F>, t: &SplittingType) -> Value {
    let pt = |p: &[F; 4]| p.iter().map(ToString::to_string).collect::<Vec<_>>();
    json!({"p": pt(l.p()), "q": pt(l.q()), "type": t.0})
}

pub fn scan_to_json<F: Field>(r: &ScanReport<F>) -> Value {
    json!({
        "generic": r.generic.0,
        "jumping": r.jumping.iter().map(|(l, t)| line_to_json(l, t)).collect::<Vec<_>>(),
        "seed": r.seed,
        "lines_checked": r.lines_checked,
        "histogram": r.histogram.iter().map(|(t, n)| json!({"type": t.0, "count": n})).collect::<Vec<_>>(),
    })
}

pub fn real_check_to_json(r: &RealCheck) -> Value {
    json!({
        "all_trivial": r.all_trivial,
        "lines_checked": r.lines_checked,
        "witnesses": r.witnesses.iter().map(|(l, t)| line_to_json(l, t)).collect::<Vec<_>>(),
    })
}

pub fn stability_to_json(r: &StabilityReport) -> Value {
    json!({
        "stable": r.stable,
        "h0_e": r.h0_e,
        "h0_edual_minus1": r.h0_edual_minus1,
        "class_nonzero": r.class_nonzero,
        "routes_agree": r.routes_agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::{class_of_f, extension_monad};
    use crate::field::{Fp, GaussianRational, Rational};
    use crate::monad::{gen_instanton_syzygy, gen_null_correlation, GeneratorOptions};

    type F = Fp<32003>;

    #[test]
    fn null_correlation_layout() {
        let v = monad_to_json(&gen_null_correlation::<F>());
        assert_eq!(v["field"], json!({"kind": "prime", "p": 32003}));
        assert_eq!(v["left"], json!({"kind": "line", "mult": 1, "twist": -1}));
        assert_eq!(v["A"][0][0], json!(["1", "0", "0", "0"]));
        assert_eq!(v["B"][0][0], json!(["0", "32002", "0", "0"]));
        assert_eq!(v["J"][0][1], json!("1"));
    }

    #[test]
    fn round_trips() {
        let m = gen_instanton_syzygy::<F>(2, 3, &GeneratorOptions::default()).unwrap();
        let s = serde_json::to_string(&monad_to_json(&m)).unwrap();
        let back: Monad<F> = monad_from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, m);

        let q = gen_null_correlation::<Rational>();
        let ext = crate::ext::extend_by_line(&q, -3, &[HomogeneousForm::zero(-2)]).unwrap();
        assert_eq!(
            monad_from_json::<Rational>(&monad_to_json(&ext)).unwrap(),
            ext
        );
    }

    #[test]
    fn omega_entries_round_trip() {
        let m = gen_null_correlation::<F>();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(4);
        let s = OmegaSection::<F>::random(1, 3, &mut rng).unwrap();
        let e = extension_monad(&m, TwistTerm::omega(1, 2), vec![Entry::Omega(s)]).unwrap();
        let v = monad_to_json(&e);
        assert!(v["A"][4][0]["omega"] == json!(1));
        assert_eq!(monad_from_json::<F>(&v).unwrap(), e);
    }

    #[test]
    fn wrong_field_is_rejected() {
        let v = monad_to_json(&gen_null_correlation::<F>());
        assert!(matches!(
            monad_from_json::<Rational>(&v),
            Err(Error::FieldMismatch { .. })
        ));
        assert!(matches!(
            monad_from_json::<Fp<101>>(&v),
            Err(Error::FieldMismatch { .. })
        ));
    }

    #[test]
    fn malformed_inputs() {
        let mut v = monad_to_json(&gen_null_correlation::<F>());
        v["A"][0][0] = json!(["1", "0"]);
        assert!(monad_from_json::<F>(&v).is_err());
        let mut v = monad_to_json(&gen_null_correlation::<F>());
        v["A"][0][0] = json!(["0", "0", "0", "1"]);
        assert!(matches!(
            monad_from_json::<F>(&v),
            Err(Error::ComplexConditionFailed { .. })
        ));
        assert!(peek_field(&json!({})).is_err());
    }

    #[test]
    fn lift_to_gaussian() {
        let q = gen_null_correlation::<Rational>();
        let g: Monad<GaussianRational> = q.lift().unwrap();
        assert_eq!(g.cohomology(-3, 3).unwrap(), q.cohomology(-3, 3).unwrap());
    }

    #[test]
    fn class_and_tower_encoding() {
        let m = gen_null_correlation::<F>();
        let c = class_of_f(&m, 0, &[HomogeneousForm::variable(0)]).unwrap();
        let v = class_to_json(&c);
        assert_eq!(v["k"], 0);
        assert_eq!(v["representative"][0], json!(["1", "0", "0", "0"]));
        assert_eq!(v["quotient_dim"], json!(c.quotient_dim()));

        let spec = TowerSpec {
            base: m,
            steps: vec![
                (0, vec![HomogeneousForm::variable(1)]),
                (-1, vec![HomogeneousForm::constant(F::new(2))]),
            ],
        };
        let back = tower_from_json::<F>(&tower_to_json(&spec)).unwrap();
        assert_eq!(back.base, spec.base);
        assert_eq!(back.steps, spec.steps);
    }
}
