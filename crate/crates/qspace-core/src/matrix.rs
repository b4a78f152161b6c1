//! Small dense square matrices over [`QScalar`], with zero-skipping products.

use crate::qscalar::QScalar;

/// Dense `n × n` matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    pub n: usize,
    pub a: Vec<QScalar>,
}

impl QMatrix {
    pub fn zeros(n: usize) -> Self {
        QMatrix { n, a: vec![QScalar::zero(); n * n] }
    }
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = QScalar::one();
        }
        m
    }
    pub fn get(&self, r: usize, c: usize) -> &QScalar {
        &self.a[r * self.n + c]
    }
    pub fn set(&mut self, r: usize, c: usize, v: QScalar) {
        self.a[r * self.n + c] = v;
    }
    pub fn add(&self, o: &QMatrix) -> QMatrix {
        QMatrix { n: self.n, a: self.a.iter().zip(&o.a).map(|(x, y)| x + y).collect() }
    }
    pub fn sub(&self, o: &QMatrix) -> QMatrix {
        QMatrix { n: self.n, a: self.a.iter().zip(&o.a).map(|(x, y)| x - y).collect() }
    }
    pub fn scale(&self, s: &QScalar) -> QMatrix {
        QMatrix { n: self.n, a: self.a.iter().map(|x| x * s).collect() }
    }
    /// `self − s·Id`.
    pub fn shift(&self, s: &QScalar) -> QMatrix {
        let mut m = self.clone();
        for i in 0..self.n {
            let v = m.get(i, i) - s;
            m.set(i, i, v);
        }
        m
    }
    pub fn mul(&self, o: &QMatrix) -> QMatrix {
        let n = self.n;
        let mut out = QMatrix::zeros(n);
        // Sparse column lists of the right factor.
        let rows_o: Vec<Vec<(usize, &QScalar)>> =
            (0..n).map(|k| (0..n).filter(|&j| !o.get(k, j).is_zero()).map(|j| (j, o.get(k, j))).collect()).collect();
        for i in 0..n {
            for k in 0..n {
                let x = self.get(i, k);
                if x.is_zero() {
                    continue;
                }
                for &(j, y) in &rows_o[k] {
                    let idx = i * n + j;
                    out.a[idx] = &out.a[idx] + &(x * y);
                }
            }
        }
        out
    }
    /// Kronecker product `self ⊗ o`.
    pub fn kron(&self, o: &QMatrix) -> QMatrix {
        let n = self.n * o.n;
        let mut out = QMatrix::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                let x = self.get(i, j);
                if x.is_zero() {
                    continue;
                }
                for k in 0..o.n {
                    for l in 0..o.n {
                        let y = o.get(k, l);
                        if !y.is_zero() {
                            out.set(i * o.n + k, j * o.n + l, x * y);
                        }
                    }
                }
            }
        }
        out
    }
    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|x| x.is_zero())
    }
    /// Row rank by fraction-free-free Gaussian elimination over the field.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<QScalar>> = (0..self.n).map(|r| self.a[r * self.n..(r + 1) * self.n].to_vec()).collect();
        row_reduce(&mut rows, &(0..self.n).collect::<Vec<_>>()).len()
    }
    /// Inverse by Gauss-Jordan elimination; `None` if singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        let n = self.n;
        let mut aug: Vec<Vec<QScalar>> = (0..n)
            .map(|r| {
                let mut row = self.a[r * n..(r + 1) * n].to_vec();
                row.extend((0..n).map(|c| if c == r { QScalar::one() } else { QScalar::zero() }));
                row
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| !aug[r][col].is_zero())?;
            aug.swap(col, piv);
            let inv = aug[col][col].inv();
            for x in aug[col].iter_mut() {
                *x = &*x * &inv;
            }
            for r in 0..n {
                if r != col && !aug[r][col].is_zero() {
                    let f = aug[r][col].clone();
                    let pivot_row = aug[col].clone();
                    for (x, p) in aug[r].iter_mut().zip(pivot_row.iter()) {
                        if !p.is_zero() {
                            *x = &*x - &(&f * p);
                        }
                    }
                }
            }
        }
        let mut out = QMatrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, aug[r][n + c].clone());
            }
        }
        Some(out)
    }
}

/// Reduced row echelon form of `rows` choosing pivot columns in the order
/// given by `col_pref` (first candidate first).  Returns the list of
/// `(pivot column, normalized row)`; zero rows are dropped.
pub fn row_reduce(rows: &mut Vec<Vec<QScalar>>, col_pref: &[usize]) -> Vec<(usize, Vec<QScalar>)> {
    let mut pivots: Vec<(usize, Vec<QScalar>)> = Vec::new();
    let mut remaining: Vec<Vec<QScalar>> = rows.drain(..).filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    for &col in col_pref {
        let Some(pi) = remaining.iter().position(|r| !r[col].is_zero()) else { continue };
        let mut prow = remaining.swap_remove(pi);
        let inv = prow[col].inv();
        for x in prow.iter_mut() {
            *x = &*x * &inv;
        }
        let elim = |r: &mut Vec<QScalar>| {
            if !r[col].is_zero() {
                let f = r[col].clone();
                for (x, p) in r.iter_mut().zip(prow.iter()) {
                    if !p.is_zero() {
                        *x = &*x - &(&f * p);
                    }
                }
            }
        };
        for r in remaining.iter_mut() {
            elim(r);
        }
        for (_, r) in pivots.iter_mut() {
            elim(r);
        }
        remaining.retain(|r| r.iter().any(|x| !x.is_zero()));
        pivots.push((col, prow));
    }
    pivots
}
