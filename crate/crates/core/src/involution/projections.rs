use super::InvolutionError;

/// Keeps the first `q` components and zeroes the rest.
pub fn projection_begin(x: &[f64], q: usize) -> Result<Vec<f64>, InvolutionError> {
    if q > x.len() {
        return Err(InvolutionError::IndexOutOfRange { q, n: x.len() });
    }
    Ok(x.iter().enumerate().map(|(i, &v)| if i < q { v } else { 0.0 }).collect())
}

/// Keeps the last `n - q` components and zeroes the first `q`.
pub fn projection_end(x: &[f64], q: usize) -> Result<Vec<f64>, InvolutionError> {
    if q > x.len() {
        return Err(InvolutionError::IndexOutOfRange { q, n: x.len() });
    }
    Ok(x.iter().enumerate().map(|(i, &v)| if i < q { 0.0 } else { v }).collect())
}
