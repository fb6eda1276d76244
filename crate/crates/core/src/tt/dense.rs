use nalgebra::{DMatrix, DVector};

use super::Shape;
use crate::error::{Result, TtError};

/// A tensor in full format, stored in little-endian linear order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Shape,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn new(shape: Shape, data: Vec<f64>) -> Result<Self> {
        if data.len() != shape.size() {
            return Err(TtError::arg(format!(
                "shape {shape} needs {} entries, got {}",
                shape.size(),
                data.len()
            )));
        }
        Ok(DenseTensor { shape, data })
    }

    pub fn zeros(shape: Shape) -> Self {
        let data = vec![0.0; shape.size()];
        DenseTensor { shape, data }
    }

    /// Build entrywise from a zero-based multi-index.
    pub fn from_fn(shape: Shape, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut idx = vec![0usize; shape.order()];
        let mut data = Vec::with_capacity(shape.size());
        for _ in 0..shape.size() {
            data.push(f(&idx));
            for (axis, &n) in shape.dims().iter().enumerate() {
                idx[axis] += 1;
                if idx[axis] < n {
                    break;
                }
                idx[axis] = 0;
            }
        }
        DenseTensor { shape, data }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, multi: &[usize]) -> Result<f64> {
        Ok(self.data[self.shape.linear_index(multi)?])
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Unfolding with rows indexed by modes `1..=l` and columns by the rest.
    /// The little-endian layout makes this a pure reinterpretation.
    pub fn matricize(&self, l: usize) -> Result<DMatrix<f64>> {
        let d = self.shape.order();
        if l == 0 || l >= d {
            return Err(TtError::arg(format!(
                "matricization split {l} outside [1, {}]",
                d.saturating_sub(1)
            )));
        }
        let rows = self.shape.extent(0..l);
        let cols = self.shape.extent(l..d);
        Ok(DMatrix::from_column_slice(rows, cols, &self.data))
    }

    pub fn vectorize(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.data)
    }

    /// Frontal slices `range` along the last mode, as a tensor of the same order.
    pub fn slice_last(&self, range: std::ops::Range<usize>) -> Result<DenseTensor> {
        let d = self.shape.order();
        let last = self.shape.dims()[d - 1];
        if range.start >= range.end || range.end > last {
            return Err(TtError::arg(format!(
                "slice {range:?} outside last mode of extent {last}"
            )));
        }
        let block = self.shape.extent(0..d - 1);
        let mut dims = self.shape.dims().to_vec();
        dims[d - 1] = range.end - range.start;
        let data = self.data[range.start * block..range.end * block].to_vec();
        DenseTensor::new(Shape::new(dims)?, data)
    }

    pub fn sub(&self, other: &DenseTensor) -> Result<DenseTensor> {
        if self.shape != other.shape {
            return Err(TtError::arg("shape mismatch in tensor difference"));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(DenseTensor {
            shape: self.shape.clone(),
            data,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(d: &[usize]) -> Shape {
        Shape::new(d.to_vec()).unwrap()
    }

    #[test]
    fn order_two_matricization_is_identity() {
        let x = DenseTensor::from_fn(shape(&[3, 4]), |i| (i[0] * 10 + i[1]) as f64);
        let m = x.matricize(1).unwrap();
        for i in 0..3 {
            for j in 0..4 {
                assert_eq!(m[(i, j)], (i * 10 + j) as f64);
            }
        }
    }

    #[test]
    fn rank_one_split_two_is_outer_product() {
        let u = [1.0, -2.0];
        let v = [0.5, 3.0, -1.0];
        let w = [2.0, 7.0];
        let x = DenseTensor::from_fn(shape(&[2, 3, 2]), |i| u[i[0]] * v[i[1]] * w[i[2]]);
        let m = x.matricize(2).unwrap();
        let uv = shape(&[2, 3]);
        for a in 0..2 {
            for b in 0..3 {
                for c in 0..2 {
                    let row = uv.linear_index(&[a, b]).unwrap();
                    assert_eq!(m[(row, c)], u[a] * v[b] * w[c]);
                }
            }
        }
    }

    #[test]
    fn matricization_entrywise() {
        let s = shape(&[3, 4, 5]);
        let x = DenseTensor::from_fn(s.clone(), |i| (i[0] + 7 * i[1] + 31 * i[2]) as f64 * 0.1);
        for l in 1..3 {
            let m = x.matricize(l).unwrap();
            let rs = Shape::new(s.dims()[..l].to_vec()).unwrap();
            let cs = Shape::new(s.dims()[l..].to_vec()).unwrap();
            for pos in 0..s.size() {
                let idx = s.multi_index(pos).unwrap();
                let r = rs.linear_index(&idx[..l]).unwrap();
                let c = cs.linear_index(&idx[l..]).unwrap();
                assert_eq!(m[(r, c)], x.get(&idx).unwrap());
            }
        }
    }

    #[test]
    fn bad_split_rejected() {
        let x = DenseTensor::zeros(shape(&[2, 2, 2]));
        assert!(x.matricize(0).is_err());
        assert!(x.matricize(3).is_err());
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(DenseTensor::new(shape(&[2, 2]), vec![1.0; 3]).is_err());
    }
}
