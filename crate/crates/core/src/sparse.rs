//! Minimal compressed-sparse-row matrix over `Complex64`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;

#[derive(Clone, Debug, PartialEq)]
pub struct Csr {
    nrows: usize,
    ncols: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl Csr {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Csr { nrows, ncols, offsets: vec![0; nrows + 1], cols: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Csr {
            nrows: n,
            ncols: n,
            offsets: (0..=n).collect(),
            cols: (0..n).collect(),
            vals: vec![C64::new(1.0, 0.0); n],
        }
    }

    /// Builds from unordered triplets; duplicates are summed, exact zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, mut t: Vec<(usize, usize, C64)>) -> Self {
        t.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut offsets = vec![0usize; nrows + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut vals: Vec<C64> = Vec::with_capacity(t.len());
        let mut rows = Vec::with_capacity(t.len());
        for (i, j, v) in t {
            assert!(i < nrows && j < ncols, "triplet ({i}, {j}) out of bounds");
            if let (Some(&li), Some(&lj)) = (rows.last(), cols.last()) {
                if li == i && lj == j {
                    *vals.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(i);
            cols.push(j);
            vals.push(v);
        }
        // drop entries that cancelled or were zero
        let mut k = 0;
        for p in 0..vals.len() {
            if vals[p] != C64::new(0.0, 0.0) {
                rows[k] = rows[p];
                cols[k] = cols[p];
                vals[k] = vals[p];
                k += 1;
            }
        }
        rows.truncate(k);
        cols.truncate(k);
        vals.truncate(k);
        for &i in &rows {
            offsets[i + 1] += 1;
        }
        for i in 0..nrows {
            offsets[i + 1] += offsets[i];
        }
        Csr { nrows, ncols, offsets, cols, vals }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.cols
    }

    pub fn values(&self) -> &[C64] {
        &self.vals
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.vals
    }

    pub fn triplet_iter(&self) -> impl Iterator<Item = (usize, usize, &C64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            (self.offsets[i]..self.offsets[i + 1]).map(move |p| (i, self.cols[p], &self.vals[p]))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let row = &self.cols[self.offsets[i]..self.offsets[i + 1]];
        match row.binary_search(&j) {
            Ok(p) => self.vals[self.offsets[i] + p],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn transpose(&self) -> Csr {
        let t = self.triplet_iter().map(|(i, j, &v)| (j, i, v)).collect();
        Csr::from_triplets(self.ncols, self.nrows, t)
    }

    fn combine(&self, rhs: &Csr, sign: f64) -> Csr {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols), "shape mismatch");
        let mut t: Vec<_> = self.triplet_iter().map(|(i, j, &v)| (i, j, v)).collect();
        t.extend(rhs.triplet_iter().map(|(i, j, &v)| (i, j, v * sign)));
        Csr::from_triplets(self.nrows, self.ncols, t)
    }
}

impl Add for &Csr {
    type Output = Csr;
    fn add(self, rhs: &Csr) -> Csr {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &Csr {
    type Output = Csr;
    fn sub(self, rhs: &Csr) -> Csr {
        self.combine(rhs, -1.0)
    }
}

impl Mul for &Csr {
    type Output = Csr;
    fn mul(self, rhs: &Csr) -> Csr {
        assert_eq!(self.ncols, rhs.nrows, "shape mismatch");
        let mut t = Vec::new();
        let mut acc = vec![C64::new(0.0, 0.0); rhs.ncols];
        let mut touched = Vec::new();
        let mut seen = vec![false; rhs.ncols];
        for i in 0..self.nrows {
            for p in self.offsets[i]..self.offsets[i + 1] {
                let (k, a) = (self.cols[p], self.vals[p]);
                for q in rhs.offsets[k]..rhs.offsets[k + 1] {
                    let j = rhs.cols[q];
                    if !seen[j] {
                        seen[j] = true;
                        touched.push(j);
                    }
                    acc[j] += a * rhs.vals[q];
                }
            }
            for &j in &touched {
                t.push((i, j, acc[j]));
                acc[j] = C64::new(0.0, 0.0);
                seen[j] = false;
            }
            touched.clear();
        }
        Csr::from_triplets(self.nrows, rhs.ncols, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn duplicates_sum_and_zeros_drop() {
        let m = Csr::from_triplets(2, 2, vec![(0, 1, c(1.0)), (0, 1, c(2.0)), (1, 0, c(1.0)), (1, 0, c(-1.0))]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), c(3.0));
    }

    #[test]
    fn product_matches_dense() {
        let a = Csr::from_triplets(2, 3, vec![(0, 0, c(1.0)), (0, 2, c(2.0)), (1, 1, c(3.0))]);
        let b = Csr::from_triplets(3, 2, vec![(0, 1, c(4.0)), (1, 0, c(5.0)), (2, 1, c(6.0))]);
        let p = &a * &b;
        assert_eq!(p.get(0, 1), c(16.0));
        assert_eq!(p.get(1, 0), c(15.0));
        assert_eq!(p.get(0, 0), c(0.0));
        assert_eq!(p.transpose().get(1, 0), c(16.0));
    }
}
