//! Dense 4×4 complex matrices in the mode basis (c1, c2, m1, m2).

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

pub const DIM: usize = 4;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMatrix4 {
    entries: [[Complex64; DIM]; DIM],
}

impl Default for ComplexMatrix4 {
    fn default() -> Self {
        Self::zeros()
    }
}

impl ComplexMatrix4 {
    pub const fn from_rows(entries: [[Complex64; DIM]; DIM]) -> Self {
        Self { entries }
    }

    pub fn from_real_rows(rows: [[f64; DIM]; DIM]) -> Self {
        let mut m = Self::zeros();
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.entries[i][j] = Complex64::new(v, 0.0);
            }
        }
        m
    }

    pub const fn zeros() -> Self {
        Self {
            entries: [[ZERO; DIM]; DIM],
        }
    }

    pub fn identity() -> Self {
        Self::diagonal([ONE; DIM])
    }

    pub fn diagonal(d: [Complex64; DIM]) -> Self {
        let mut m = Self::zeros();
        for (i, v) in d.into_iter().enumerate() {
            m.entries[i][i] = v;
        }
        m
    }

    /// Permutation matrix whose row `i` is the unit vector `e_{perm[i]}`.
    pub fn permutation(perm: [usize; DIM]) -> Self {
        let mut m = Self::zeros();
        for (i, &j) in perm.iter().enumerate() {
            m.entries[i][j] = ONE;
        }
        m
    }

    pub fn rows(&self) -> &[[Complex64; DIM]; DIM] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> [Complex64; DIM] {
        std::array::from_fn(|i| self.entries[i][j])
    }

    pub fn from_columns(cols: [[Complex64; DIM]; DIM]) -> Self {
        let mut m = Self::zeros();
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m.entries[i][j] = v;
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros();
        for i in 0..DIM {
            for j in 0..DIM {
                t.entries[j][i] = self.entries[i][j];
            }
        }
        t
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut t = Self::zeros();
        for i in 0..DIM {
            for j in 0..DIM {
                t.entries[j][i] = self.entries[i][j].conj();
            }
        }
        t
    }

    pub fn trace(&self) -> Complex64 {
        (0..DIM).map(|i| self.entries[i][i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut m = *self;
        m.entries.iter_mut().flatten().for_each(|z| *z *= s);
        m
    }

    /// `self − s·I`.
    pub fn shifted(&self, s: Complex64) -> Self {
        let mut m = *self;
        for i in 0..DIM {
            m.entries[i][i] -= s;
        }
        m
    }

    pub fn mul_vec(&self, v: &[Complex64; DIM]) -> [Complex64; DIM] {
        std::array::from_fn(|i| (0..DIM).map(|j| self.entries[i][j] * v[j]).sum())
    }

    /// LU factorization with partial pivoting. Returns the packed factors,
    /// the row permutation and the permutation parity.
    fn lu(&self) -> ([[Complex64; DIM]; DIM], [usize; DIM], f64) {
        let mut a = self.entries;
        let mut perm: [usize; DIM] = [0, 1, 2, 3];
        let mut parity = 1.0;
        for k in 0..DIM {
            let pivot = (k..DIM)
                .max_by(|&x, &y| a[x][k].norm().total_cmp(&a[y][k].norm()))
                .unwrap_or(k);
            if pivot != k {
                a.swap(pivot, k);
                perm.swap(pivot, k);
                parity = -parity;
            }
            let d = a[k][k];
            if d == ZERO {
                continue;
            }
            for i in (k + 1)..DIM {
                let f = a[i][k] / d;
                a[i][k] = f;
                for j in (k + 1)..DIM {
                    let t = a[k][j];
                    a[i][j] -= f * t;
                }
            }
        }
        (a, perm, parity)
    }

    pub fn determinant(&self) -> Complex64 {
        let (a, _, parity) = self.lu();
        (0..DIM).map(|i| a[i][i]).product::<Complex64>() * parity
    }

    /// Inverse via LU, or `None` when a pivot vanishes exactly.
    pub fn inverse(&self) -> Option<Self> {
        let (a, perm, _) = self.lu();
        if (0..DIM).any(|i| a[i][i] == ZERO) {
            return None;
        }
        let mut inv = Self::zeros();
        for col in 0..DIM {
            // solve L U x = P e_col
            let mut x: [Complex64; DIM] = std::array::from_fn(|i| if perm[i] == col { ONE } else { ZERO });
            for i in 0..DIM {
                for j in 0..i {
                    let t = a[i][j] * x[j];
                    x[i] -= t;
                }
            }
            for i in (0..DIM).rev() {
                for j in (i + 1)..DIM {
                    let t = a[i][j] * x[j];
                    x[i] -= t;
                }
                x[i] /= a[i][i];
            }
            for i in 0..DIM {
                inv.entries[i][col] = x[i];
            }
        }
        Some(inv)
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for ComplexMatrix4 {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i][j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i][j]
    }
}

impl Mul for ComplexMatrix4 {
    type Output = ComplexMatrix4;

    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..DIM {
            for j in 0..DIM {
                out.entries[i][j] = (0..DIM).map(|k| self.entries[i][k] * rhs.entries[k][j]).sum();
            }
        }
        out
    }
}

impl Add for ComplexMatrix4 {
    type Output = ComplexMatrix4;

    fn add(mut self, rhs: Self) -> Self {
        for i in 0..DIM {
            for j in 0..DIM {
                self.entries[i][j] += rhs.entries[i][j];
            }
        }
        self
    }
}

impl Sub for ComplexMatrix4 {
    type Output = ComplexMatrix4;

    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..DIM {
            for j in 0..DIM {
                self.entries[i][j] -= rhs.entries[i][j];
            }
        }
        self
    }
}
