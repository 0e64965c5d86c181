use std::ops::Range;

use crate::{Error, Result, C64};

/// Band hint for a [`ComplexMatrix`]: entry `(i, j)` may be nonzero only when
/// `j - upper <= i <= j + lower`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Band {
    pub lower: usize,
    pub upper: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    /// Row-major.
    Dense(Vec<C64>),
    /// Column-major band: column `j` holds rows `j - upper ..= j + lower`.
    Banded { band: Band, data: Vec<C64> },
}

/// Complex matrix with optional band structure.
///
/// Banded matrices only store their band, so the finite sections used by the
/// probes stay linear in `N`. Entries outside a declared band are zero and
/// cannot be written.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    storage: Storage,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        check_shape(rows, cols)?;
        Ok(Self {
            rows,
            cols,
            storage: Storage::Dense(vec![C64::new(0.0, 0.0); rows * cols]),
        })
    }

    pub fn banded_zeros(rows: usize, cols: usize, band: Band) -> Result<Self> {
        check_shape(rows, cols)?;
        let width = band.lower + band.upper + 1;
        Ok(Self {
            rows,
            cols,
            storage: Storage::Banded {
                band,
                data: vec![C64::new(0.0, 0.0); width * cols],
            },
        })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        check_shape(n_rows, n_cols)?;
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::InvalidMatrix("ragged rows".into()));
        }
        let data = rows.iter().flatten().copied().collect();
        Ok(Self {
            rows: n_rows,
            cols: n_cols,
            storage: Storage::Dense(data),
        })
    }

    /// Real-valued convenience constructor, mostly for tests.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::banded_zeros(n, n, Band { lower: 0, upper: 0 })?;
        for i in 0..n {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn band(&self) -> Option<Band> {
        match &self.storage {
            Storage::Dense(_) => None,
            Storage::Banded { band, .. } => Some(*band),
        }
    }

    /// Rows of column `j` that may hold nonzeros.
    pub fn col_range(&self, j: usize) -> Range<usize> {
        match &self.storage {
            Storage::Dense(_) => 0..self.rows,
            Storage::Banded { band, .. } => {
                let lo = j.saturating_sub(band.upper);
                let hi = (j + band.lower + 1).min(self.rows);
                lo.min(hi)..hi
            }
        }
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        match &self.storage {
            Storage::Dense(data) => data[i * self.cols + j],
            Storage::Banded { band, data } => match band_slot(*band, i, j) {
                Some(k) => data[j * (band.lower + band.upper + 1) + k],
                None => C64::new(0.0, 0.0),
            },
        }
    }

    /// Panics when writing a nonzero outside the declared band.
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        let cols = self.cols;
        match &mut self.storage {
            Storage::Dense(data) => data[i * cols + j] = value,
            Storage::Banded { band, data } => match band_slot(*band, i, j) {
                Some(k) => data[j * (band.lower + band.upper + 1) + k] = value,
                None => assert!(
                    value == C64::new(0.0, 0.0),
                    "nonzero write at ({i}, {j}) outside band {band:?}"
                ),
            },
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, value: C64) {
        let v = self.get(i, j);
        self.set(i, j, v + value);
    }

    pub fn to_dense_rows(&self) -> Vec<Vec<C64>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// `M x` for a vector of length `cols`.
    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![C64::new(0.0, 0.0); self.rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj == C64::new(0.0, 0.0) {
                continue;
            }
            for i in self.col_range(j) {
                y[i] += self.get(i, j) * xj;
            }
        }
        y
    }

    /// Conjugate transpose, keeping (mirrored) band structure.
    pub fn adjoint(&self) -> ComplexMatrix {
        let mut out = match self.band() {
            Some(b) => ComplexMatrix::banded_zeros(
                self.cols,
                self.rows,
                Band {
                    lower: b.upper,
                    upper: b.lower,
                },
            ),
            None => ComplexMatrix::zeros(self.cols, self.rows),
        }
        .expect("shape already validated");
        for j in 0..self.cols {
            for i in self.col_range(j) {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Number of Gram-matrix super/sub diagonals: columns further apart than
    /// this share no rows.
    pub(crate) fn gram_bandwidth(&self) -> usize {
        match self.band() {
            Some(b) => (b.lower + b.upper).min(self.cols.saturating_sub(1)),
            None => self.cols.saturating_sub(1),
        }
    }
}

fn check_shape(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidMatrix(format!(
            "shape {rows}x{cols}: rows and cols must be >= 1"
        )));
    }
    Ok(())
}

fn band_slot(band: Band, i: usize, j: usize) -> Option<usize> {
    if i + band.upper < j || i > j + band.lower {
        None
    } else {
        Some(i + band.upper - j)
    }
}
