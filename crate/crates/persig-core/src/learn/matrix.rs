//! Column-major feature matrix. Coordinate descent walks features, so
//! columns must be contiguous.

use alloc::vec::Vec;

use super::LearnError;

#[derive(Debug, Clone, PartialEq)]
pub struct ColMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl ColMatrix {
    /// Transposes row-major rows into column-major storage. Blocked over
    /// columns to keep the strided writes cache-resident.
    pub fn from_rows<'a, I>(rows: I, n_cols: usize) -> Result<Self, LearnError>
    where
        I: ExactSizeIterator<Item = &'a [f64]> + Clone,
    {
        let n_rows = rows.len();
        let mut data = alloc::vec![0.0; n_rows * n_cols];
        const BLOCK: usize = 64;
        let mut col_start = 0;
        while col_start < n_cols {
            let col_end = (col_start + BLOCK).min(n_cols);
            for (k, row) in rows.clone().enumerate() {
                if row.len() != n_cols {
                    return Err(LearnError::DimError {
                        expected: n_cols,
                        got: row.len(),
                    });
                }
                for j in col_start..col_end {
                    data[j * n_rows + k] = row[j];
                }
            }
            col_start = col_end;
        }
        Ok(ColMatrix {
            n_rows,
            n_cols,
            data,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.n_rows..(j + 1) * self.n_rows]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.n_rows + i]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn transposes_rows_to_columns() {
        let rows = [vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]];
        let m = ColMatrix::from_rows(rows.iter().map(|r| r.as_slice()), 3).unwrap();
        assert_eq!(m.n_rows(), 2);
        assert_eq!(m.col(0), &[1.0, 4.0]);
        assert_eq!(m.col(2), &[3.0, 6.0]);
        assert_eq!(m.get(1, 1), 5.0);
    }

    #[test]
    fn rejects_ragged_rows() {
        let rows = [vec![1.0, 2.0], vec![4.0]];
        let err = ColMatrix::from_rows(rows.iter().map(|r| r.as_slice()), 2).unwrap_err();
        assert_eq!(err, LearnError::DimError { expected: 2, got: 1 });
    }
}
