//! JSON encoding of complex matrices as nested row-major arrays of
//! [re, im] pairs — the wire format used by spec files and exports.

use crate::matrix::{Complex64, Matrix};
use crate::{Error, Result};
use serde_json::{json, Value};

pub fn complex_to_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn complex_from_json(v: &Value) -> Result<Complex64> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Spec(format!("expected [re, im] pair, got {v}")))?;
    if arr.len() != 2 {
        return Err(Error::Spec(format!("expected [re, im] pair, got {v}")));
    }
    let re = arr[0]
        .as_f64()
        .ok_or_else(|| Error::Spec("non-numeric real part".into()))?;
    let im = arr[1]
        .as_f64()
        .ok_or_else(|| Error::Spec("non-numeric imaginary part".into()))?;
    if !re.is_finite() || !im.is_finite() {
        return Err(Error::Spec("non-finite matrix entry".into()));
    }
    Ok(Complex64::new(re, im))
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| complex_to_json(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn matrix_from_json(v: &Value) -> Result<Matrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Spec("matrix must be an array of rows".into()))?;
    if rows.is_empty() {
        return Err(Error::Spec("empty matrix".into()));
    }
    let ncols = rows[0]
        .as_array()
        .ok_or_else(|| Error::Spec("matrix row must be an array".into()))?
        .len();
    let mut m = Matrix::zeros(rows.len(), ncols);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Spec("matrix row must be an array".into()))?;
        if row.len() != ncols {
            return Err(Error::Spec("ragged matrix rows".into()));
        }
        for (j, entry) in row.iter().enumerate() {
            m[(i, j)] = complex_from_json(entry)?;
        }
    }
    Ok(m)
}
