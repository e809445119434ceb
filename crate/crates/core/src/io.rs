//! JSON encodings: complex numbers as `[re, im]`, series as
//! `{"mu": .., "coeffs": [[re, im], ..]}`, bivariate right-hand sides as
//! row-major `[[[re, im], ..], ..]`, and the problem file schema.

use num_complex::Complex64;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::series::{BivariateSeries, FracPowerSeries, DEFAULT_TRUNC};
use crate::solver::{GrowthEnvelope, ProblemKind, ProblemSpec, DEFAULT_MAX_ITER, DEFAULT_TOL};

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field_err(field: &str, message: impl Into<String>) -> SchemaError {
    SchemaError::Field {
        field: field.to_string(),
        message: message.into(),
    }
}

pub mod complex {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

pub mod complex_vec {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|z| [z.re, z.im]))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl serde::Serialize for BivariateSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(s)
    }
}

pub fn complex_to_json(z: Complex64) -> Value {
    serde_json::json!([z.re, z.im])
}

fn parse_complex(v: &Value, field: &str) -> Result<Complex64, SchemaError> {
    match v {
        Value::Array(xs) if xs.len() == 2 => {
            let re = xs[0]
                .as_f64()
                .ok_or_else(|| field_err(field, "real part is not a number"))?;
            let im = xs[1]
                .as_f64()
                .ok_or_else(|| field_err(field, "imaginary part is not a number"))?;
            Ok(Complex64::new(re, im))
        }
        Value::Number(n) => Ok(Complex64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        _ => Err(field_err(field, "expected a complex number [re, im]")),
    }
}

fn parse_complex_array(v: &Value, field: &str) -> Result<Vec<Complex64>, SchemaError> {
    let xs = v
        .as_array()
        .ok_or_else(|| field_err(field, "expected an array of [re, im] pairs"))?;
    xs.iter()
        .enumerate()
        .map(|(i, x)| parse_complex(x, &format!("{field}[{i}]")))
        .collect()
}

pub fn parse_series(v: &Value, field: &str) -> Result<FracPowerSeries, SchemaError> {
    let obj = v
        .as_object()
        .ok_or_else(|| field_err(field, "expected an object with `mu` and `coeffs`"))?;
    let mu = match obj.get("mu") {
        None => 0.0,
        Some(m) => m
            .as_f64()
            .ok_or_else(|| field_err(&format!("{field}.mu"), "expected a number"))?,
    };
    let coeffs = parse_complex_array(
        obj.get("coeffs")
            .ok_or_else(|| field_err(&format!("{field}.coeffs"), "missing"))?,
        &format!("{field}.coeffs"),
    )?;
    if coeffs.is_empty() {
        return Err(field_err(&format!("{field}.coeffs"), "must not be empty"));
    }
    Ok(FracPowerSeries::new(mu, coeffs))
}

pub fn series_from_json_str(s: &str) -> Result<FracPowerSeries, SchemaError> {
    let v: Value = serde_json::from_str(s)?;
    parse_series(&v, "series")
}

pub fn series_to_json(s: &FracPowerSeries) -> Value {
    serde_json::to_value(s).expect("series serializes")
}

pub fn parse_bivariate(v: &Value, field: &str) -> Result<BivariateSeries, SchemaError> {
    let rows = v
        .as_array()
        .ok_or_else(|| field_err(field, "expected an array of rows"))?;
    if rows.is_empty() {
        return Err(field_err(field, "must contain at least one row"));
    }
    let rows = rows
        .iter()
        .enumerate()
        .map(|(j, r)| parse_complex_array(r, &format!("{field}[{j}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BivariateSeries::new(rows))
}

fn get_f64(obj: &Map<String, Value>, key: &str) -> Result<Option<f64>, SchemaError> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| field_err(key, "expected a number")),
    }
}

fn get_usize(obj: &Map<String, Value>, key: &str) -> Result<Option<usize>, SchemaError> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .map(|n| Some(n as usize))
            .ok_or_else(|| field_err(key, "expected a nonnegative integer")),
    }
}

fn parse_envelope(v: &Value) -> Result<GrowthEnvelope, SchemaError> {
    let obj = v
        .as_object()
        .ok_or_else(|| field_err("envelope", "expected an object"))?;
    let c = get_f64(obj, "c")?.ok_or_else(|| field_err("envelope.c", "missing"))?;
    let n0 = get_usize(obj, "n0")?.ok_or_else(|| field_err("envelope.n0", "missing"))?;
    let g = match obj.get("g") {
        Some(g) => parse_series(g, "envelope.g")?,
        None => FracPowerSeries::zero(0.0),
    };
    let mg = get_f64(obj, "mg")?;
    GrowthEnvelope::new(c, n0, g, mg).map_err(|e| field_err("envelope", e.to_string()))
}

impl ProblemSpec {
    /// Parses the problem file schema:
    ///
    /// ```json
    /// {"kind": "rl", "order": 0.5, "initial": [0, 0],
    ///  "rhs": {"bivariate": [[[0, 0], [0.5, 0]]]},
    ///  "trunc": 64, "tol": 1e-12, "maxIter": 200}
    /// ```
    ///
    /// `seed` (a series) and `envelope` (`{"c", "n0", "g", "mg"}`) are
    /// optional extensions.
    pub fn from_json_str(s: &str) -> Result<Self, SchemaError> {
        let v: Value = serde_json::from_str(s)?;
        Self::from_json_value(&v)
    }

    pub fn from_json_value(v: &Value) -> Result<Self, SchemaError> {
        let obj = v
            .as_object()
            .ok_or_else(|| field_err("<root>", "expected a JSON object"))?;
        let kind = match obj.get("kind").map(|k| k.as_str()) {
            None => return Err(field_err("kind", "missing")),
            Some(None) => return Err(field_err("kind", "expected a string")),
            Some(Some(k)) => ProblemKind::parse(k).ok_or_else(|| {
                field_err(
                    "kind",
                    format!("unknown kind {k:?}; expected rl, regularized, real-rl or real-caputo"),
                )
            })?,
        };
        let order = get_f64(obj, "order")?.ok_or_else(|| field_err("order", "missing"))?;
        if !(order > 0.0 && order < 1.0) {
            return Err(field_err("order", format!("must lie in (0, 1), got {order}")));
        }
        let initial = match obj.get("initial") {
            None => Complex64::new(0.0, 0.0),
            Some(v) => parse_complex(v, "initial")?,
        };
        let rhs_obj = obj
            .get("rhs")
            .ok_or_else(|| field_err("rhs", "missing"))?
            .as_object()
            .ok_or_else(|| field_err("rhs", "expected an object with `bivariate`"))?;
        let rhs = parse_bivariate(
            rhs_obj
                .get("bivariate")
                .ok_or_else(|| field_err("rhs.bivariate", "missing"))?,
            "rhs.bivariate",
        )?;
        let trunc = get_usize(obj, "trunc")?.unwrap_or(DEFAULT_TRUNC);
        if trunc == 0 {
            return Err(field_err("trunc", "must be at least 1"));
        }
        let tol = get_f64(obj, "tol")?.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0) {
            return Err(field_err("tol", "must be positive"));
        }
        let max_iter = get_usize(obj, "maxIter")?.unwrap_or(DEFAULT_MAX_ITER);
        let seed = obj.get("seed").map(|s| parse_series(s, "seed")).transpose()?;
        if let Some(s) = &seed {
            if !s.is_analytic() {
                return Err(field_err("seed.mu", "seed must be analytic (mu = 0)"));
            }
        }
        let envelope = obj.get("envelope").map(parse_envelope).transpose()?;
        Ok(ProblemSpec {
            kind,
            order,
            initial,
            rhs,
            trunc,
            tol,
            max_iter,
            seed,
            envelope,
        })
    }

    pub fn to_json_value(&self) -> Value {
        let mut obj = serde_json::json!({
            "kind": self.kind.as_str(),
            "order": self.order,
            "initial": complex_to_json(self.initial),
            "rhs": {"bivariate": serde_json::to_value(&self.rhs).expect("rhs serializes")},
            "trunc": self.trunc,
            "tol": self.tol,
            "maxIter": self.max_iter,
        });
        if let Some(seed) = &self.seed {
            obj["seed"] = series_to_json(seed);
        }
        if let Some(env) = &self.envelope {
            obj["envelope"] = serde_json::json!({
                "c": env.c, "n0": env.n0, "g": series_to_json(&env.g), "mg": env.mg,
            });
        }
        obj
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_problem() {
        let p = ProblemSpec::from_json_str(
            r#"{"kind": "rl", "order": 0.5, "initial": [0, 0],
                "rhs": {"bivariate": [[[0, 0], [0.5, 0]], [[1, 0]]]}}"#,
        )
        .unwrap();
        assert_eq!(p.kind, ProblemKind::Rl);
        assert_eq!(p.trunc, DEFAULT_TRUNC);
        assert_eq!(p.rhs.coeff(0, 1), Complex64::new(0.5, 0.0));
        assert_eq!(p.rhs.coeff(1, 0), Complex64::new(1.0, 0.0));
        assert_eq!(p.rhs.coeff(1, 1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            (r#"{"order": 0.5, "rhs": {"bivariate": [[[0,0]]]}}"#, "kind"),
            (r#"{"kind": "rl", "rhs": {"bivariate": [[[0,0]]]}}"#, "order"),
            (r#"{"kind": "rl", "order": "x", "rhs": {"bivariate": [[[0,0]]]}}"#, "order"),
            (r#"{"kind": "rl", "order": 0.5, "initial": [0], "rhs": {"bivariate": [[[0,0]]]}}"#, "initial"),
            (r#"{"kind": "rl", "order": 0.5, "rhs": {"bivariate": [[[0,"a"]]]}}"#, "rhs.bivariate[0][0]"),
            (r#"{"kind": "rl", "order": 0.5, "rhs": {}}"#, "rhs.bivariate"),
            (r#"{"kind": "xx", "order": 0.5, "rhs": {"bivariate": [[[0,0]]]}}"#, "kind"),
            (r#"{"kind": "rl", "order": 0.5, "maxIter": -1, "rhs": {"bivariate": [[[0,0]]]}}"#, "maxIter"),
        ];
        for (text, field) in cases {
            let err = ProblemSpec::from_json_str(text).unwrap_err();
            let msg = err.to_string();
            assert!(msg.contains(&format!("`{field}`")), "{msg} should name {field}");
        }
    }

    #[test]
    fn problem_round_trips() {
        let text = r#"{"kind": "real-caputo", "order": 0.25, "initial": [1, 0],
            "rhs": {"bivariate": [[[0, 0]], [[1, 0]]]}, "trunc": 32, "tol": 1e-11, "maxIter": 50,
            "seed": {"mu": 0, "coeffs": [[1, 0], [0.5, 0]]}}"#;
        let p = ProblemSpec::from_json_str(text).unwrap();
        let again = ProblemSpec::from_json_value(&p.to_json_value()).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn series_json() {
        let s = series_from_json_str(r#"{"mu": 0.5, "coeffs": [[1, 2], [3, -4]]}"#).unwrap();
        assert_eq!(s.mu, 0.5);
        assert_eq!(s.coeffs[1], Complex64::new(3.0, -4.0));
        let back = series_from_json_str(&series_to_json(&s).to_string()).unwrap();
        assert_eq!(s, back);
        assert!(series_from_json_str(r#"{"mu": 0}"#).is_err());
    }
}
