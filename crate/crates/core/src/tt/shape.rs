use crate::error::{Result, TtError};

/// Mode sizes `(n_1, ..., n_d)` of a tensor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(TtError::arg("a shape needs at least one mode"));
        }
        if let Some(axis) = dims.iter().position(|&n| n == 0) {
            return Err(TtError::arg(format!("mode {axis} has extent 0")));
        }
        Ok(Shape { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Total number of entries.
    pub fn size(&self) -> usize {
        self.dims.iter().product()
    }

    /// Product of the extents of modes `range`.
    pub fn extent(&self, range: std::ops::Range<usize>) -> usize {
        self.dims[range].iter().product()
    }

    /// Little-endian linear position of a zero-based multi-index: the first
    /// index varies fastest, `sum_mu i_mu * prod_{nu < mu} n_nu`.
    pub fn linear_index(&self, multi: &[usize]) -> Result<usize> {
        if multi.len() != self.dims.len() {
            return Err(TtError::arg(format!(
                "multi-index has {} components, shape has {}",
                multi.len(),
                self.dims.len()
            )));
        }
        let mut pos = 0;
        let mut stride = 1;
        for (axis, (&i, &n)) in multi.iter().zip(&self.dims).enumerate() {
            if i >= n {
                return Err(TtError::Index {
                    axis,
                    index: i,
                    extent: n,
                });
            }
            pos += i * stride;
            stride *= n;
        }
        Ok(pos)
    }

    /// Inverse of [`Shape::linear_index`].
    pub fn multi_index(&self, mut pos: usize) -> Result<Vec<usize>> {
        if pos >= self.size() {
            return Err(TtError::arg(format!(
                "linear position {pos} outside a tensor of {} entries",
                self.size()
            )));
        }
        Ok(self
            .dims
            .iter()
            .map(|&n| {
                let i = pos % n;
                pos /= n;
                i
            })
            .collect())
    }

    /// Shape with `n` appended as a new trailing mode.
    pub fn with_trailing(&self, n: usize) -> Result<Shape> {
        let mut dims = self.dims.clone();
        dims.push(n);
        Shape::new(dims)
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|n| n.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}
