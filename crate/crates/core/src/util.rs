use crate::error::{Error, Result};

/// Inverse of a coordinate relabeling `map` (old index -> new index).
pub(crate) fn invert_permutation(map: &[usize], n: usize) -> Result<Vec<usize>> {
    if map.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: map.len() });
    }
    let mut inv = vec![usize::MAX; n];
    for (old, &new) in map.iter().enumerate() {
        if new >= n || inv[new] != usize::MAX {
            return Err(Error::InvalidParameter(format!("{map:?} is not a permutation of 0..{n}")));
        }
        inv[new] = old;
    }
    Ok(inv)
}

pub(crate) fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}
