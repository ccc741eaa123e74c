use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;

/// Distances, 3-D embedding and fit quality reconstructed from correlations.
#[derive(Debug, Clone)]
pub struct Geometry {
    /// Normalization `C₀ = max_{i≠j} |C_ij|`.
    pub c0: f64,
    pub distances: DMatrix<f64>,
    pub embedding: Vec<[f64; 3]>,
    /// Eigenvalues of the double-centred `−½ J D² J`, descending, clamped at 0.
    pub eigenvalues: Vec<f64>,
    /// Kruskal stress of the embedding against `distances`.
    pub stress: f64,
}

fn check_square(c: &DMatrix<f64>) -> Result<usize> {
    if c.nrows() != c.ncols() {
        return Err(Error::DimensionMismatch { expected: c.nrows(), got: c.ncols() });
    }
    let asym = (c - c.transpose()).amax();
    if asym > 1e-12 * c.amax().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(c.nrows())
}

/// Gaussian-decay ansatz `|C_ij| = C₀ e^{−d_ij²}` followed by classical
/// multidimensional scaling into three dimensions. Uncorrelated pairs sit at
/// the largest finite distance the ansatz can represent.
pub fn corr_to_geometry(c: &DMatrix<f64>) -> Result<Geometry> {
    let m = check_square(c)?;
    let mut c0: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            if a != b {
                c0 = c0.max(c[(a, b)].abs());
            }
        }
    }
    if !(c0 > 0.0) {
        return Err(Error::param("C", "off-diagonal correlations all vanish"));
    }
    let distances = DMatrix::from_fn(m, m, |a, b| {
        if a == b {
            0.0
        } else {
            let ratio = (c[(a, b)].abs() / c0).max(f64::MIN_POSITIVE);
            (-ratio.ln()).max(0.0).sqrt()
        }
    });
    let d2 = distances.map(|d| d * d);
    let centre = DMatrix::from_fn(m, m, |a, b| if a == b { 1.0 } else { 0.0 } - 1.0 / m as f64);
    let gram = &centre * d2 * &centre * -0.5;
    let gram = (&gram + gram.transpose()) * 0.5;
    let (vals, vecs) = linalg::symmetric_eigh(&gram);
    let order: Vec<usize> = (0..m).rev().collect();
    let eigenvalues: Vec<f64> = order.iter().map(|&k| vals[k].max(0.0)).collect();
    let embedding: Vec<[f64; 3]> = (0..m)
        .map(|i| {
            let mut p = [0.0; 3];
            for (d, slot) in p.iter_mut().enumerate() {
                if let Some(&k) = order.get(d) {
                    *slot = vecs[(i, k)] * vals[k].max(0.0).sqrt();
                }
            }
            p
        })
        .collect();
    let (mut num, mut den) = (0.0, 0.0);
    for a in 0..m {
        for b in a + 1..m {
            let e: f64 = (0..3).map(|d| (embedding[a][d] - embedding[b][d]).powi(2)).sum::<f64>().sqrt();
            num += (distances[(a, b)] - e).powi(2);
            den += distances[(a, b)].powi(2);
        }
    }
    let stress = if den > 0.0 { (num / den).sqrt() } else { 0.0 };
    Ok(Geometry { c0, distances, embedding, eigenvalues, stress })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Merge {
    /// Cluster ids: leaves are `0..M`, the `k`-th merge creates `M + k`.
    pub left: usize,
    pub right: usize,
    /// Mean `|C|` over cross pairs at the time of merging.
    pub strength: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoarseTree {
    pub n_leaves: usize,
    pub merges: Vec<Merge>,
}

impl CoarseTree {
    fn members(&self, id: usize) -> Vec<usize> {
        if id < self.n_leaves {
            return vec![id];
        }
        let mg = self.merges[id - self.n_leaves];
        let mut out = self.members(mg.left);
        out.extend(self.members(mg.right));
        out
    }

    /// Leaves of cluster `id`.
    pub fn leaves_of(&self, id: usize) -> Vec<usize> {
        let mut v = self.members(id);
        v.sort_unstable();
        v
    }

    /// Depth-first leaf order from the root, visiting the child holding the
    /// lowest site first.
    pub fn leaf_order(&self) -> Vec<usize> {
        if self.merges.is_empty() {
            return (0..self.n_leaves).collect();
        }
        self.members(self.n_leaves + self.merges.len() - 1)
    }

    /// Merges that join two single sites, in merge order.
    pub fn leaf_pairs(&self) -> Vec<(usize, usize)> {
        self.merges
            .iter()
            .filter(|m| m.left < self.n_leaves && m.right < self.n_leaves)
            .map(|m| (m.left, m.right))
            .collect()
    }
}

/// Site order with the bits of each index reversed (`M` a power of two).
pub fn bit_reversed_order(m: usize) -> Option<Vec<usize>> {
    if !m.is_power_of_two() || m < 2 {
        return None;
    }
    let bits = m.trailing_zeros();
    Some((0..m).map(|i| i.reverse_bits() >> (usize::BITS - bits)).collect())
}

/// Greedy agglomeration: repeatedly joins the two clusters with the largest
/// mean cross-pair `|C_ij|`, ties going to the lowest cluster ids.
pub fn coarse_grain_tree(c: &DMatrix<f64>) -> Result<CoarseTree> {
    let m = check_square(c)?;
    if m < 2 {
        return Err(Error::param("C", "need at least two sites"));
    }
    let abs = c.map(f64::abs);
    // live clusters as (id, sorted leaves), ordered by lowest leaf
    let mut live: Vec<(usize, Vec<usize>)> = (0..m).map(|i| (i, vec![i])).collect();
    let mut merges = Vec::with_capacity(m - 1);
    while live.len() > 1 {
        let mut best: Option<(usize, usize, f64)> = None;
        for a in 0..live.len() {
            for b in a + 1..live.len() {
                let (la, lb) = (&live[a].1, &live[b].1);
                let sum: f64 = la.iter().flat_map(|&i| lb.iter().map(move |&j| (i, j))).map(|(i, j)| abs[(i, j)]).sum();
                let mean = sum / (la.len() * lb.len()) as f64;
                if best.is_none_or(|(_, _, s)| mean > s) {
                    best = Some((a, b, mean));
                }
            }
        }
        let (a, b, strength) = best.expect("at least two clusters");
        let (cb, lb) = live.remove(b);
        let (ca, la) = live.remove(a);
        // left child holds the lowest site
        let (left, right) = if la[0] <= lb[0] { (ca, cb) } else { (cb, ca) };
        merges.push(Merge { left, right, strength });
        let mut leaves = la;
        leaves.extend(lb);
        leaves.sort_unstable();
        let id = m + merges.len() - 1;
        let pos = live.iter().position(|(_, l)| l[0] > leaves[0]).unwrap_or(live.len());
        live.insert(pos, (id, leaves));
    }
    Ok(CoarseTree { n_leaves: m, merges })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(m: usize) -> DMatrix<f64> {
        DMatrix::from_fn(m, m, |a, b| (-((a as f64 - b as f64).powi(2))).exp())
    }

    #[test]
    fn gaussian_chain_is_one_dimensional() {
        let g = corr_to_geometry(&chain(10)).unwrap();
        assert!(g.eigenvalues[2] < 1e-6 * g.eigenvalues[0]);
        assert_eq!(g.distances[(3, 4)], 0.0);
        let scaled = corr_to_geometry(&(chain(10) * 7.5)).unwrap();
        assert!((scaled.distances - g.distances).amax() < 1e-14);
    }

    #[test]
    fn zero_correlations_rejected() {
        assert!(corr_to_geometry(&DMatrix::identity(4, 4)).is_err());
    }

    #[test]
    fn block_structure_splits_at_top() {
        let c = DMatrix::from_fn(6, 6, |a, b| {
            if a == b {
                1.0
            } else if (a < 3) == (b < 3) {
                0.8 - 0.01 * (a + b) as f64
            } else {
                0.05
            }
        });
        let tree = coarse_grain_tree(&c).unwrap();
        assert_eq!(tree.merges.len(), 5);
        let root = tree.merges.last().unwrap();
        let mut sides = [tree.leaves_of(root.left), tree.leaves_of(root.right)];
        sides.sort();
        assert_eq!(sides, [vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn two_sites_single_merge() {
        let tree = coarse_grain_tree(&DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 1.0])).unwrap();
        assert_eq!(tree.merges, vec![Merge { left: 0, right: 1, strength: 0.3 }]);
        assert_eq!(tree.leaf_order(), vec![0, 1]);
    }

    #[test]
    fn bit_reversal() {
        assert_eq!(bit_reversed_order(8).unwrap(), vec![0, 4, 2, 6, 1, 5, 3, 7]);
        assert!(bit_reversed_order(6).is_none());
    }
}
