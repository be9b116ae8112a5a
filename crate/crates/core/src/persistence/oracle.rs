//! Brute-force checks that do not go through the persistence reduction.
//!
//! [`betti_oracle`] rebuilds the chain complex of one sublevel set and gets
//! `β_k = dim C_k − rank ∂_k − rank ∂_{k+1}` by Gaussian elimination on
//! bit-packed rows. It is meant for small complexes.

use std::collections::HashMap;

use crate::crvr::Filtration;
use crate::scalar::Scalar;

/// Dense matrix over the two-element field, one bit-packed `Vec<u64>` per row.
#[derive(Debug, Clone)]
struct BitMatrix {
    rows: Vec<Vec<u64>>,
    cols: usize,
}

impl BitMatrix {
    fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        Self {
            rows: vec![vec![0; words]; rows],
            cols,
        }
    }

    fn flip(&mut self, r: usize, c: usize) {
        self.rows[r][c / 64] ^= 1 << (c % 64);
    }

    fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r][c / 64] >> (c % 64) & 1 == 1
    }

    /// Rank by row reduction (consumes the matrix).
    fn rank(mut self) -> usize {
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..self.rows.len()).find(|&r| self.get(r, c)) else {
                continue;
            };
            self.rows.swap(rank, p);
            let pivot = self.rows[rank].clone();
            for r in 0..self.rows.len() {
                if r != rank && self.get(r, c) {
                    for (w, pw) in self.rows[r].iter_mut().zip(&pivot) {
                        *w ^= pw;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Rank of `∂_dim : C_dim → C_{dim−1}` on the given simplex lists.
fn boundary_rank(higher: &[&[usize]], lower: &HashMap<&[usize], usize>) -> usize {
    if higher.is_empty() || lower.is_empty() {
        return 0;
    }
    let mut m = BitMatrix::zeros(higher.len(), lower.len());
    let mut face = Vec::new();
    for (r, s) in higher.iter().enumerate() {
        for skip in 0..s.len() {
            face.clear();
            face.extend(s.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v));
            if let Some(&c) = lower.get(face.as_slice()) {
                m.flip(r, c);
            }
        }
    }
    m.rank()
}

fn index_of<'a>(list: &[&'a [usize]]) -> HashMap<&'a [usize], usize> {
    list.iter().enumerate().map(|(i, s)| (*s, i)).collect()
}

/// `β_k` of the sublevel complex `{σ : value(σ) <= t}`.
///
/// Needs simplices up to dimension `k + 1` in the filtration to be exact.
pub fn betti_oracle<T: Scalar>(filtration: &Filtration<T>, t: T, k: usize) -> usize {
    let by_dim = |d: usize| -> Vec<&[usize]> {
        filtration
            .simplices()
            .iter()
            .filter(|s| s.value <= t && s.vertices.len() == d + 1)
            .map(|s| s.vertices.as_slice())
            .collect()
    };
    let chains_k = by_dim(k);
    let rank_k = if k == 0 {
        0
    } else {
        let lower = by_dim(k - 1);
        boundary_rank(&chains_k, &index_of(&lower))
    };
    let rank_k1 = boundary_rank(&by_dim(k + 1), &index_of(&chains_k));
    chains_k.len() - rank_k - rank_k1
}

/// Whether some vertex is within `epsilon` of every other vertex, reading
/// pairwise distances off the edge values of the filtration. Pairs without
/// an edge count as infinitely far.
pub fn check_dominating_vertex<T: Scalar>(filtration: &Filtration<T>, epsilon: T) -> bool {
    let vertices: Vec<usize> = filtration
        .simplices()
        .iter()
        .filter(|s| s.vertices.len() == 1)
        .map(|s| s.vertices[0])
        .collect();
    let mut close: HashMap<usize, usize> = HashMap::new();
    for s in filtration.simplices() {
        if s.vertices.len() == 2 && s.value <= epsilon {
            *close.entry(s.vertices[0]).or_default() += 1;
            *close.entry(s.vertices[1]).or_default() += 1;
        }
    }
    let others = vertices.len().saturating_sub(1);
    vertices
        .iter()
        .any(|v| close.get(v).copied().unwrap_or(0) == others)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crvr::{build_flag_filtration, DistanceMatrix};

    #[test]
    fn hollow_triangle_has_one_loop() {
        let f = Filtration::<f64>::parse("0 0 0\n0 0 1\n0 0 2\n1 1 0 1\n1 1 0 2\n1 1 1 2\n").unwrap();
        assert_eq!(betti_oracle(&f, 1.0, 1), 1);
        assert_eq!(betti_oracle(&f, 1.0, 0), 1);
        assert_eq!(betti_oracle(&f, 0.5, 0), 3);
        assert_eq!(betti_oracle(&f, 0.5, 1), 0);
    }

    #[test]
    fn tetrahedron_boundary_is_a_sphere() {
        let mut text = String::new();
        for v in 0..4 {
            text.push_str(&format!("0 0 {v}\n"));
        }
        for a in 0..4 {
            for b in a + 1..4 {
                text.push_str(&format!("0 1 {a} {b}\n"));
            }
        }
        for a in 0..4 {
            for b in a + 1..4 {
                for c in b + 1..4 {
                    text.push_str(&format!("0 2 {a} {b} {c}\n"));
                }
            }
        }
        let f = Filtration::<f64>::parse(&text).unwrap();
        assert_eq!(betti_oracle(&f, 0.0, 2), 1);
        assert_eq!(betti_oracle(&f, 0.0, 1), 0);
        assert_eq!(betti_oracle(&f, 0.0, 0), 1);
    }

    fn star(eps_gap: f64) -> Filtration<f64> {
        // vertex 0 at distance 1 from all; others pairwise `eps_gap`
        let n = 5;
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    d[i * n + j] = if i == 0 || j == 0 { 1.0 } else { eps_gap };
                }
            }
        }
        build_flag_filtration(&DistanceMatrix::new(n, d, 0.1).unwrap(), 2).unwrap()
    }

    #[test]
    fn dominating_vertex_detection() {
        assert!(check_dominating_vertex(&star(3.0), 1.0));
        assert!(!check_dominating_vertex(&star(3.0), 0.9));

        // two far clusters {0,1}, {2,3}
        let d = vec![
            0.0, 1.0, 9.0, 9.0, //
            1.0, 0.0, 9.0, 9.0, //
            9.0, 9.0, 0.0, 1.0, //
            9.0, 9.0, 1.0, 0.0,
        ];
        let f = build_flag_filtration(&DistanceMatrix::new(4, d, 0.1).unwrap(), 2).unwrap();
        assert!(!check_dominating_vertex(&f, 5.0));
        assert!(check_dominating_vertex(&f, 9.0));
    }
}
