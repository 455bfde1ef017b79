use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Rectangular grid of equally shaped complex blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    block_rows: usize,
    block_cols: usize,
    inner_rows: usize,
    inner_cols: usize,
    blocks: Vec<ComplexMatrix>,
}

impl BlockMatrix {
    /// Builds from row-major blocks; all blocks must share one shape.
    pub fn new(block_rows: usize, block_cols: usize, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if block_rows == 0 || block_cols == 0 || blocks.len() != block_rows * block_cols {
            return Err(Error::InvalidDimension(format!(
                "{} blocks for a {block_rows}x{block_cols} grid",
                blocks.len()
            )));
        }
        let (inner_rows, inner_cols) = (blocks[0].rows(), blocks[0].cols());
        if blocks
            .iter()
            .any(|b| b.rows() != inner_rows || b.cols() != inner_cols)
        {
            return Err(Error::InvalidDimension("blocks differ in shape".into()));
        }
        Ok(BlockMatrix {
            block_rows,
            block_cols,
            inner_rows,
            inner_cols,
            blocks,
        })
    }

    pub fn from_fn(
        block_rows: usize,
        block_cols: usize,
        mut f: impl FnMut(usize, usize) -> ComplexMatrix,
    ) -> Result<Self> {
        let mut blocks = Vec::with_capacity(block_rows * block_cols);
        for r in 0..block_rows {
            for c in 0..block_cols {
                blocks.push(f(r, c));
            }
        }
        Self::new(block_rows, block_cols, blocks)
    }

    /// Splits a flat matrix into `inner_rows x inner_cols` blocks.
    pub fn from_flat(flat: &ComplexMatrix, inner_rows: usize, inner_cols: usize) -> Result<Self> {
        if inner_rows == 0
            || inner_cols == 0
            || !flat.rows().is_multiple_of(inner_rows)
            || !flat.cols().is_multiple_of(inner_cols)
        {
            return Err(Error::InvalidDimension(format!(
                "{}x{} does not tile into {inner_rows}x{inner_cols} blocks",
                flat.rows(),
                flat.cols()
            )));
        }
        Self::from_fn(
            flat.rows() / inner_rows,
            flat.cols() / inner_cols,
            |br, bc| {
                ComplexMatrix::from_fn(inner_rows, inner_cols, |r, c| {
                    flat[(br * inner_rows + r, bc * inner_cols + c)]
                })
            },
        )
    }

    pub fn block_rows(&self) -> usize {
        self.block_rows
    }

    pub fn block_cols(&self) -> usize {
        self.block_cols
    }

    pub fn inner_shape(&self) -> (usize, usize) {
        (self.inner_rows, self.inner_cols)
    }

    pub fn block(&self, r: usize, c: usize) -> &ComplexMatrix {
        &self.blocks[r * self.block_cols + c]
    }

    pub fn flatten(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(
            self.block_rows * self.inner_rows,
            self.block_cols * self.inner_cols,
            |r, c| {
                self.block(r / self.inner_rows, c / self.inner_cols)
                    [(r % self.inner_rows, c % self.inner_cols)]
            },
        )
    }
}

/// Block-matrix product. `b` may be a block vector (one block column).
pub fn block_matmul(a: &BlockMatrix, b: &BlockMatrix) -> Result<BlockMatrix> {
    if a.block_cols != b.block_rows || a.inner_cols != b.inner_rows {
        return Err(Error::InvalidDimension(format!(
            "cannot multiply ({}x{}){{{}x{}}} by ({}x{}){{{}x{}}}",
            a.block_rows,
            a.block_cols,
            a.inner_rows,
            a.inner_cols,
            b.block_rows,
            b.block_cols,
            b.inner_rows,
            b.inner_cols
        )));
    }
    let mut blocks = Vec::with_capacity(a.block_rows * b.block_cols);
    for r in 0..a.block_rows {
        for c in 0..b.block_cols {
            let mut acc = ComplexMatrix::zeros(a.inner_rows, b.inner_cols);
            for k in 0..a.block_cols {
                acc = acc.add(&a.block(r, k).matmul(b.block(k, c))?)?;
            }
            blocks.push(acc);
        }
    }
    BlockMatrix::new(a.block_rows, b.block_cols, blocks)
}
