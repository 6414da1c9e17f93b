use crate::error::{Error, Result};

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be finite, got {value}")))
    }
}

/// Sum of three values, independent of their order.
pub(crate) fn sum3(values: [f64; 3]) -> f64 {
    let mut v = values;
    v.sort_by(f64::total_cmp);
    (v[0] + v[1]) + v[2]
}

pub(crate) fn mean3(values: [f64; 3]) -> f64 {
    sum3(values) / 3.0
}
