//! JSON encodings of states, channels and reports.
//!
//! States are accepted as `{"re": M, "im": M}` with `M` a 4×4 nested array
//! or a flat row-major list of 16 numbers (`im` may be omitted), or as
//! `{"a": [3], "b": [3], "T": [[3×3]]}` (`a`, `b` default to zero). Channels
//! are `{"kraus": [{"re": .., "im": ..}, ..]}` or `{"lambda": [[3×3]], "t": [3]}`.

use nalgebra::{Matrix3, Vector3};
use serde_json::{json, Map, Value};

use crate::channels::{ptm_from_kraus, QubitChannelPTM};
use crate::error::{Error, Result};
use crate::isotropy::IsotropyReport;
use crate::pauli::{compose, decompose, DensityMatrix4, Matrix2c, Matrix4c, PauliForm, C64};

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedInput(msg.into())
}

fn number(v: &Value, what: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| malformed(format!("{what}: expected a number, got {v}")))
}

/// Reads an `n × n` real matrix from nested rows or a flat row-major list.
fn real_square(v: &Value, n: usize, what: &str) -> Result<Vec<f64>> {
    let arr = v.as_array().ok_or_else(|| malformed(format!("{what}: expected an array")))?;
    let flat: Vec<f64> = if arr.len() == n * n && arr.iter().all(Value::is_number) {
        arr.iter().map(|x| number(x, what)).collect::<Result<_>>()?
    } else if arr.len() == n {
        let mut out = Vec::with_capacity(n * n);
        for row in arr {
            let row = row.as_array().ok_or_else(|| malformed(format!("{what}: expected rows")))?;
            if row.len() != n {
                return Err(malformed(format!("{what}: rows must have {n} entries")));
            }
            for x in row {
                out.push(number(x, what)?);
            }
        }
        out
    } else {
        return Err(malformed(format!("{what}: expected {n}x{n} rows or {} numbers", n * n)));
    };
    if flat.iter().any(|x| !x.is_finite()) {
        return Err(malformed(format!("{what}: entries must be finite")));
    }
    Ok(flat)
}

fn vector3(v: Option<&Value>, what: &str) -> Result<Vector3<f64>> {
    match v {
        None => Ok(Vector3::zeros()),
        Some(v) => {
            let arr = v.as_array().ok_or_else(|| malformed(format!("{what}: expected 3 numbers")))?;
            if arr.len() != 3 {
                return Err(malformed(format!("{what}: expected 3 numbers")));
            }
            let x: Vec<f64> = arr.iter().map(|x| number(x, what)).collect::<Result<_>>()?;
            Ok(Vector3::new(x[0], x[1], x[2]))
        }
    }
}

fn matrix3(v: &Value, what: &str) -> Result<Matrix3<f64>> {
    let f = real_square(v, 3, what)?;
    Ok(Matrix3::from_row_slice(&f))
}

fn complex_square<const N: usize>(obj: &Map<String, Value>, what: &str) -> Result<Vec<C64>> {
    let re = obj.get("re").ok_or_else(|| malformed(format!("{what}: missing \"re\"")))?;
    let re = real_square(re, N, &format!("{what}.re"))?;
    let im = match obj.get("im") {
        Some(v) => real_square(v, N, &format!("{what}.im"))?,
        None => vec![0.0; N * N],
    };
    Ok(re.into_iter().zip(im).map(|(r, i)| C64::new(r, i)).collect())
}

/// Parses a state and validates it as a density matrix.
pub fn parse_state(v: &Value) -> Result<PauliForm> {
    let obj = v.as_object().ok_or_else(|| malformed("state must be a JSON object"))?;
    if obj.contains_key("re") {
        let entries = complex_square::<4>(obj, "state")?;
        let m = Matrix4c::from_row_slice(&entries);
        Ok(decompose(&DensityMatrix4::new(m)?))
    } else if let Some(t) = obj.get("T") {
        let pf = PauliForm::new(vector3(obj.get("a"), "a")?, vector3(obj.get("b"), "b")?, matrix3(t, "T")?);
        compose(&pf)?;
        Ok(pf)
    } else {
        Err(malformed("state needs either \"re\"/\"im\" or \"T\""))
    }
}

pub fn parse_state_str(s: &str) -> Result<PauliForm> {
    parse_state(&serde_json::from_str(s)?)
}

fn vec_json(v: &Vector3<f64>) -> Value {
    json!([v[0], v[1], v[2]])
}

fn mat_json(m: &Matrix3<f64>) -> Value {
    json!((0..3).map(|i| vec![m[(i, 0)], m[(i, 1)], m[(i, 2)]]).collect::<Vec<_>>())
}

/// A state in both encodings.
pub fn state_to_json(pf: &PauliForm) -> Value {
    let m = pf.to_matrix();
    let rows = |f: fn(&C64) -> f64| -> Value {
        json!((0..4).map(|i| (0..4).map(|j| f(&m[(i, j)])).collect::<Vec<_>>()).collect::<Vec<_>>())
    };
    json!({
        "a": vec_json(&pf.a),
        "b": vec_json(&pf.b),
        "T": mat_json(&pf.t),
        "re": rows(|z| z.re),
        "im": rows(|z| z.im),
    })
}

/// Parses a channel from Kraus operators or a transfer matrix.
pub fn parse_channel(v: &Value) -> Result<QubitChannelPTM> {
    let obj = v.as_object().ok_or_else(|| malformed("channel must be a JSON object"))?;
    if let Some(k) = obj.get("kraus") {
        let arr = k.as_array().ok_or_else(|| malformed("kraus: expected an array"))?;
        let ops: Vec<Matrix2c> = arr
            .iter()
            .enumerate()
            .map(|(i, op)| {
                let o = op.as_object().ok_or_else(|| malformed(format!("kraus[{i}] must be an object")))?;
                Ok(Matrix2c::from_row_slice(&complex_square::<2>(o, &format!("kraus[{i}]"))?))
            })
            .collect::<Result<_>>()?;
        ptm_from_kraus(&ops)
    } else if let Some(l) = obj.get("lambda") {
        QubitChannelPTM::new(matrix3(l, "lambda")?, vector3(obj.get("t"), "t")?)
    } else {
        Err(malformed("channel needs either \"kraus\" or \"lambda\""))
    }
}

pub fn channel_to_json(ch: &QubitChannelPTM) -> Value {
    json!({ "lambda": mat_json(&ch.lambda), "t": vec_json(&ch.t) })
}

/// Flat report object: class, shape, descriptor and diagnostics.
pub fn report_to_json(r: &IsotropyReport) -> Value {
    json!({
        "class": r.class().name(),
        "shape": r.shape.name(),
        "continuous_dim": r.continuous_dim,
        "descriptor": serde_json::to_value(r.descriptor).expect("descriptor serialises"),
        "pi_axes": r.pi_axes.iter().map(vec_json).collect::<Vec<_>>(),
        "distance": r.distance,
        "residuals": r.residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Bell;

    #[test]
    fn state_encodings_agree() {
        let phi = PauliForm::bell(Bell::PhiPlus);
        let v = state_to_json(&phi);
        let back = parse_state(&v).unwrap();
        assert!(back.max_abs_diff(&phi) < 1e-15);
        let matrix_only = json!({ "re": v["re"], "im": v["im"] });
        assert!(parse_state(&matrix_only).unwrap().max_abs_diff(&phi) < 1e-15);
        let flat: Vec<f64> = (0..16).map(|k| if k % 5 == 0 { 0.25 } else { 0.0 }).collect();
        let mm = parse_state(&json!({ "re": flat })).unwrap();
        assert!(mm.scale() < 1e-16);
        let pauli_only = json!({ "T": [[-1, 0, 0], [0, -1, 0], [0, 0, -1]] });
        assert!(parse_state(&pauli_only).unwrap().max_abs_diff(&PauliForm::bell(Bell::PsiMinus)) < 1e-16);
    }

    #[test]
    fn invalid_states_are_rejected() {
        assert!(matches!(parse_state(&json!({ "T": [[1, 0, 0], [0, 1, 0], [0, 0, 1]] })), Err(Error::NotAState { .. })));
        assert!(matches!(parse_state(&json!({ "re": [1, 2, 3] })), Err(Error::MalformedInput(_))));
        assert!(matches!(parse_state(&json!([1])), Err(Error::MalformedInput(_))));
        assert!(matches!(parse_state_str("{"), Err(Error::MalformedInput(_))));
    }

    #[test]
    fn channel_encodings() {
        let ch = parse_channel(&json!({ "kraus": [{ "re": [[1, 0], [0, 1]] }] })).unwrap();
        assert_eq!(ch, QubitChannelPTM::identity());
        let ch = parse_channel(&json!({ "lambda": [[0.5, 0, 0], [0, 0.5, 0], [0, 0, 1]], "t": [0, 0, 0] })).unwrap();
        assert_eq!(ch.lambda[(0, 0)], 0.5);
        assert!(parse_channel(&json!({ "kraus": [{ "re": [[0.5, 0], [0, 0.5]] }] })).is_err());
    }
}
