//! The on-disk vector format: `{"level": N, "coefficients": [c0, ...]}`.
//!
//! Files are rejected unless the coefficient count is exactly `2^level` and
//! every value is finite. Output renders floats at 17 significant digits so
//! documents are stable byte-for-byte and round-trip exactly.

use cdtwist::oracle::DenseVector;
use serde::Deserialize;
use std::path::Path;

#[derive(Deserialize)]
struct RawVectorFile {
    level: u32,
    coefficients: Vec<f64>,
}

/// Reads and validates a vector file.
pub fn read(path: &Path) -> Result<DenseVector, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| format!("cannot read {}: {err}", path.display()))?;
    let raw: RawVectorFile = serde_json::from_str(&text)
        .map_err(|err| format!("{} is not a valid vector file: {err}", path.display()))?;
    if raw.level > 30 {
        return Err(format!(
            "{}: level {} is beyond anything this tool will allocate",
            path.display(),
            raw.level
        ));
    }
    let expected = 1usize << raw.level;
    if raw.coefficients.len() != expected {
        return Err(format!(
            "{}: level {} needs exactly {expected} coefficients, found {}",
            path.display(),
            raw.level,
            raw.coefficients.len()
        ));
    }
    if let Some(bad) = raw.coefficients.iter().find(|c| !c.is_finite()) {
        return Err(format!(
            "{}: coefficients must be finite, found {bad}",
            path.display()
        ));
    }
    DenseVector::from_coefficients(raw.coefficients)
        .map_err(|err| format!("{}: {err}", path.display()))
}

/// One float at 17 significant digits; parses back to the identical bits.
pub fn format_f64(value: f64) -> String {
    format!("{value:.16e}")
}

/// Serializes a vector as a single-line document with stable formatting.
pub fn render(vector: &DenseVector) -> String {
    let coefficients: Vec<String> = vector.coefficients().iter().copied().map(format_f64).collect();
    format!(
        "{{\"level\":{},\"coefficients\":[{}]}}",
        vector.level(),
        coefficients.join(",")
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendered_documents_parse_back_exactly() {
        let v = DenseVector::from_coefficients(vec![0.5, -1.0, 1.0 / 3.0, 2e-17]).unwrap();
        let text = render(&v);
        let raw: RawVectorFile = serde_json::from_str(&text).unwrap();
        assert_eq!(raw.level, 2);
        assert_eq!(raw.coefficients, v.coefficients());
    }

    #[test]
    fn formatting_is_17_significant_digits() {
        assert_eq!(format_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(format_f64(0.0), "0.0000000000000000e0");
        assert_eq!(format_f64(-3.0), "-3.0000000000000000e0");
    }
}
