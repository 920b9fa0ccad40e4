use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::invert_permutation;

/// Dense row-major tensor. Every axis runs over the same coordinate range,
/// so a coordinate renaming acts on all axes at once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn from_fn(shape: &[usize], f: impl Fn(&[usize]) -> f64) -> Self {
        let len = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        let mut ix = vec![0; shape.len()];
        for _ in 0..len {
            data.push(f(&ix));
            for axis in (0..shape.len()).rev() {
                ix[axis] += 1;
                if ix[axis] < shape[axis] {
                    break;
                }
                ix[axis] = 0;
            }
        }
        Self { shape: shape.to_vec(), data }
    }

    pub fn from_parts(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let len: usize = shape.iter().product();
        if len != data.len() {
            return Err(Error::DimensionMismatch { expected: len, got: data.len() });
        }
        Ok(Self { shape, data })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn offset(&self, ix: &[usize]) -> usize {
        debug_assert_eq!(ix.len(), self.shape.len());
        ix.iter().zip(&self.shape).fold(0, |acc, (&i, &d)| acc * d + i)
    }

    pub fn get(&self, ix: &[usize]) -> f64 {
        self.data[self.offset(ix)]
    }

    /// `T'[map[a]][map[b]].. = T[a][b]..`.
    pub fn relabel(&self, map: &[usize]) -> Result<Self> {
        let n = self.shape.first().copied().unwrap_or(0);
        if self.shape.iter().any(|&d| d != n) {
            return Err(Error::InvalidParameter("relabel needs a hypercubic tensor".into()));
        }
        let inv = invert_permutation(map, n)?;
        Ok(Self::from_fn(&self.shape, |ix| {
            let old: Vec<usize> = ix.iter().map(|&i| inv[i]).collect();
            self.get(&old)
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_layout() {
        let t = Tensor::from_fn(&[2, 3], |ix| (10 * ix[0] + ix[1]) as f64);
        assert_eq!(t.data(), &[0.0, 1.0, 2.0, 10.0, 11.0, 12.0]);
        assert_eq!(t.get(&[1, 2]), 12.0);
    }

    #[test]
    fn relabel_round_trip() {
        let t = Tensor::from_fn(&[3, 3, 3], |ix| (9 * ix[0] + 3 * ix[1] + ix[2]) as f64);
        let map = [2, 0, 1];
        let u = t.relabel(&map).unwrap();
        assert_eq!(u.get(&[2, 0, 1]), t.get(&[0, 1, 2]));
        assert_eq!(u.relabel(&invert_permutation(&map, 3).unwrap()).unwrap(), t);
    }

    #[test]
    fn from_parts_checks_length() {
        assert!(Tensor::from_parts(vec![2, 2], vec![0.0; 3]).is_err());
    }
}
