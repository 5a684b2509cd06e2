//! Reading and writing unitaries as "umat-json":
//! `{"n": <qubits>, "re": [[...]], "im": [[...]]}` with 2^n x 2^n row-major
//! arrays. The writer prints 17 significant digits so values round-trip
//! exactly.

use num_complex::Complex64;
use serde::Deserialize;

use super::{ComplexMatrix, LinalgError};

#[derive(Deserialize)]
struct UmatFile {
    n: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

pub fn write_umat_json(m: &ComplexMatrix) -> Result<String, LinalgError> {
    let n = m.qubit_count()?;
    let dim = m.rows();
    let mut out = String::with_capacity(dim * dim * 48);
    out.push_str(&format!("{{\n  \"n\": {n},\n  \"re\": ["));
    write_component(&mut out, m, dim, |v| v.re);
    out.push_str("],\n  \"im\": [");
    write_component(&mut out, m, dim, |v| v.im);
    out.push_str("]\n}\n");
    Ok(out)
}

fn write_component(out: &mut String, m: &ComplexMatrix, dim: usize, f: impl Fn(Complex64) -> f64) {
    for i in 0..dim {
        if i > 0 {
            out.push(',');
        }
        out.push_str("\n    [");
        for j in 0..dim {
            if j > 0 {
                out.push_str(", ");
            }
            out.push_str(&format!("{:.16e}", f(m.get(i, j))));
        }
        out.push(']');
    }
    out.push_str("\n  ");
}

pub fn read_umat_json(text: &str) -> Result<ComplexMatrix, LinalgError> {
    let file: UmatFile =
        serde_json::from_str(text).map_err(|e| LinalgError::BadUnitaryFile(e.to_string()))?;
    if file.n > 24 {
        return Err(LinalgError::BadUnitaryFile(format!(
            "qubit count {} too large",
            file.n
        )));
    }
    let dim = 1usize << file.n;
    for (name, rows) in [("re", &file.re), ("im", &file.im)] {
        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return Err(LinalgError::BadUnitaryFile(format!(
                "\"{name}\" must be a {dim}x{dim} array"
            )));
        }
    }
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| {
        Complex64::new(file.re[i][j], file.im[i][j])
    }))
}
