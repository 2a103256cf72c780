use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_PERMANENT_DIM: usize = 12;

/// Matrix permanent by Ryser's formula with Gray-code subset updates.
pub fn permanent(m: &DMatrix<Complex64>) -> Result<Complex64> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::NotSquare {
            rows: n,
            cols: m.ncols(),
        });
    }
    if n > MAX_PERMANENT_DIM {
        return Err(Error::DimensionExceeded {
            dim: n,
            max: MAX_PERMANENT_DIM,
        });
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }

    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut in_set = vec![false; n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut set_size = 0usize;

    for k in 1u32..(1u32 << n) {
        let j = k.trailing_zeros() as usize;
        if in_set[j] {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= m[(i, j)];
            }
            set_size -= 1;
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += m[(i, j)];
            }
            set_size += 1;
        }
        in_set[j] = !in_set[j];

        let prod: Complex64 = row_sums.iter().product();
        if set_size % 2 == n % 2 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    Ok(total)
}
