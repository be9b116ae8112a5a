//! Weighted modularity and the Louvain method.

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::metrics::canonical_labels;
use crate::network::WeightedNetwork;
use crate::scalar::Scalar;
use crate::seed::{self, Stage};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition<T> {
    /// Contiguous community indices `0..communities`.
    pub labels: Vec<usize>,
    pub communities: usize,
    pub modularity: T,
    pub seed: u64,
}

/// `Q = (1/2m) Σ_ij (w_ij − s_i s_j / 2m) δ(c_i, c_j)` with `m` the total weight.
pub fn modularity<T: Scalar>(net: &WeightedNetwork<T>, labels: &[usize]) -> Result<T> {
    let n = net.n();
    if labels.len() != n {
        return Err(invalid(format!("expected {n} labels, got {}", labels.len())));
    }
    let two_m = net.total_weight() * T::of(2.0);
    if !(two_m > T::zero()) {
        return Err(Error::Numeric("modularity is undefined for a network without weight".into()));
    }
    let communities = labels.iter().max().map_or(0, |&m| m + 1);
    let mut internal = vec![T::zero(); communities];
    let mut total = vec![T::zero(); communities];
    for i in 0..n {
        let row = net.row(i);
        total[labels[i]] += row.iter().copied().sum::<T>();
        for j in 0..n {
            if labels[i] == labels[j] {
                internal[labels[i]] += row[j];
            }
        }
    }
    Ok(internal
        .iter()
        .zip(&total)
        .map(|(&inside, &tot)| inside / two_m - (tot / two_m) * (tot / two_m))
        .sum())
}

/// Graph in matrix convention: `adj[i]` lists `(j, A_ij)` for `j != i` and
/// `self_loop[i] = A_ii`, which for an aggregated node is the ordered-pair sum
/// of weights inside it (twice the internal weight).
struct LevelGraph<T> {
    adj: Vec<Vec<(usize, T)>>,
    self_loop: Vec<T>,
    strength: Vec<T>,
    two_m: T,
}

impl<T: Scalar> LevelGraph<T> {
    fn from_network(net: &WeightedNetwork<T>) -> Self {
        let n = net.n();
        let adj: Vec<Vec<(usize, T)>> = (0..n)
            .map(|i| {
                net.row(i)
                    .iter()
                    .enumerate()
                    .filter(|&(j, &w)| j != i && w > T::zero())
                    .map(|(j, &w)| (j, w))
                    .collect()
            })
            .collect();
        Self::new(adj, vec![T::zero(); n])
    }

    fn new(adj: Vec<Vec<(usize, T)>>, self_loop: Vec<T>) -> Self {
        let strength: Vec<T> = adj
            .iter()
            .zip(&self_loop)
            .map(|(row, &s)| s + row.iter().map(|&(_, w)| w).sum::<T>())
            .collect();
        let two_m = strength.iter().copied().sum();
        Self {
            adj,
            self_loop,
            strength,
            two_m,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn modularity(&self, community: &[usize]) -> T {
        let c = community.iter().max().map_or(0, |&m| m + 1);
        let mut inside = vec![T::zero(); c];
        let mut total = vec![T::zero(); c];
        for i in 0..self.len() {
            total[community[i]] += self.strength[i];
            inside[community[i]] += self.self_loop[i];
            for &(j, w) in &self.adj[i] {
                if community[j] == community[i] {
                    inside[community[i]] += w;
                }
            }
        }
        inside
            .iter()
            .zip(&total)
            .map(|(&a, &t)| a / self.two_m - (t / self.two_m) * (t / self.two_m))
            .sum()
    }

    fn aggregate(&self, community: &[usize], count: usize) -> Self {
        let mut dense = vec![T::zero(); count * count];
        let mut self_loop = vec![T::zero(); count];
        for i in 0..self.len() {
            let ci = community[i];
            self_loop[ci] += self.self_loop[i];
            for &(j, w) in &self.adj[i] {
                let cj = community[j];
                if ci == cj {
                    self_loop[ci] += w;
                } else {
                    dense[ci * count + cj] += w;
                }
            }
        }
        let adj = (0..count)
            .map(|a| {
                (0..count)
                    .filter(|&b| b != a && dense[a * count + b] > T::zero())
                    .map(|b| (b, dense[a * count + b]))
                    .collect()
            })
            .collect();
        Self::new(adj, self_loop)
    }
}

/// Local-move phase. Returns whether any vertex moved. `trace`, when given,
/// receives the level modularity after every accepted move.
fn local_moves<T: Scalar>(
    g: &LevelGraph<T>,
    community: &mut [usize],
    order: &[usize],
    mut trace: Option<&mut Vec<T>>,
) -> bool {
    let n = g.len();
    let mut total: Vec<T> = vec![T::zero(); n];
    for i in 0..n {
        total[community[i]] += g.strength[i];
    }
    let mut link = vec![T::zero(); n];
    let mut seen = vec![false; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut moved_any = false;
    loop {
        let mut moved = false;
        for &i in order {
            let ki = g.strength[i];
            let home = community[i];
            for &(j, w) in &g.adj[i] {
                let c = community[j];
                if !seen[c] {
                    seen[c] = true;
                    touched.push(c);
                }
                link[c] += w;
            }
            total[home] -= ki;
            let gain = |c: usize, link: &[T]| link[c] - total[c] * ki / g.two_m;
            let mut best = home;
            let mut best_gain = gain(home, &link);
            let tolerance = T::of(1e-12) * (ki + T::one());
            touched.sort_unstable();
            for &c in &touched {
                if c == home {
                    continue;
                }
                // ascending scan, so equal gains keep the lower index
                let candidate = gain(c, &link);
                if candidate > best_gain + tolerance {
                    best = c;
                    best_gain = candidate;
                }
            }
            total[best] += ki;
            for &c in &touched {
                link[c] = T::zero();
                seen[c] = false;
            }
            touched.clear();
            if best != home {
                community[i] = best;
                moved = true;
                moved_any = true;
                if let Some(t) = trace.as_deref_mut() {
                    t.push(g.modularity(community));
                }
            }
        }
        if !moved {
            return moved_any;
        }
    }
}

fn compact(community: &mut [usize]) -> usize {
    let relabeled = canonical_labels(community);
    let count = relabeled.iter().max().map_or(0, |&m| m + 1);
    community.copy_from_slice(&relabeled);
    count
}

/// Two-phase Louvain: local moves to the best modularity gain (only on
/// strict improvement, ties to the lowest community index), then
/// aggregation, repeated until nothing moves. The visit order of each level
/// is shuffled from `seed`.
pub fn louvain<T: Scalar>(net: &WeightedNetwork<T>, seed: u64) -> Result<Partition<T>> {
    louvain_impl(net, seed, None)
}

/// As [`louvain`], also returning the modularity after each accepted move
/// (measured on the original network's induced partition).
pub fn louvain_traced<T: Scalar>(net: &WeightedNetwork<T>, seed: u64) -> Result<(Partition<T>, Vec<T>)> {
    let mut trace = Vec::new();
    let p = louvain_impl(net, seed, Some(&mut trace))?;
    Ok((p, trace))
}

fn louvain_impl<T: Scalar>(net: &WeightedNetwork<T>, seed: u64, mut trace: Option<&mut Vec<T>>) -> Result<Partition<T>> {
    if !(net.total_weight() > T::zero()) {
        return Err(Error::Numeric("Louvain needs a network with positive total weight".into()));
    }
    let mut rng = seed::stream(seed, Stage::Louvain, 0);
    let mut graph = LevelGraph::from_network(net);
    // membership[v] = node of the current level containing original vertex v
    let mut membership: Vec<usize> = (0..net.n()).collect();
    loop {
        let n = graph.len();
        let mut community: Vec<usize> = (0..n).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        if !local_moves(&graph, &mut community, &order, trace.as_deref_mut()) {
            break;
        }
        let count = compact(&mut community);
        for m in membership.iter_mut() {
            *m = community[*m];
        }
        if count == n {
            break;
        }
        graph = graph.aggregate(&community, count);
    }
    let labels = canonical_labels(&membership);
    let communities = labels.iter().max().map_or(0, |&m| m + 1);
    let modularity = modularity(net, &labels)?;
    Ok(Partition {
        labels,
        communities,
        modularity,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::ari;
    use proptest::prelude::*;

    fn two_cliques(k: usize) -> WeightedNetwork<f64> {
        let mut g = WeightedNetwork::empty(2 * k).unwrap();
        for c in 0..2 {
            for a in 0..k {
                for b in a + 1..k {
                    g.set_weight(c * k + a, c * k + b, 1.0).unwrap();
                }
            }
        }
        g
    }

    #[test]
    fn single_community_is_zero() {
        let g = two_cliques(4);
        assert!(modularity(&g, &[0; 8]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn split_cliques_give_one_half() {
        let g = two_cliques(4);
        let q = modularity(&g, &[0, 0, 0, 0, 1, 1, 1, 1]).unwrap();
        assert!((q - 0.5).abs() < 1e-15);
        for seed in 0..10 {
            let p = louvain(&g, seed).unwrap();
            assert_eq!(p.communities, 2);
            assert!((p.modularity - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn errors_without_weight() {
        let g = WeightedNetwork::<f64>::empty(3).unwrap();
        assert!(modularity(&g, &[0, 1, 2]).is_err());
        assert!(louvain(&g, 1).is_err());
        assert!(modularity(&two_cliques(2), &[0]).is_err());
    }

    #[test]
    fn relabeling_vertices_permutes_communities() {
        let g = two_cliques(5);
        let perm = [7, 2, 9, 0, 4, 1, 8, 3, 6, 5];
        let mut h = WeightedNetwork::empty(10).unwrap();
        for i in 0..10 {
            for j in i + 1..10 {
                h.set_weight(perm[i], perm[j], g.weight(i, j)).unwrap();
            }
        }
        let a = louvain(&g, 3).unwrap();
        let b = louvain(&h, 3).unwrap();
        let b_back: Vec<usize> = (0..10).map(|i| b.labels[perm[i]]).collect();
        assert_eq!(ari(&a.labels, &b_back).unwrap(), 1.0);
    }

    fn random_net(n: usize, ws: &[f64]) -> WeightedNetwork<f64> {
        let mut g = WeightedNetwork::empty(n).unwrap();
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                g.set_weight(i, j, ws[k]).unwrap();
                k += 1;
            }
        }
        g
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn reported_modularity_matches_and_moves_never_decrease(
            n in 2usize..14,
            ws in proptest::collection::vec(prop_oneof![Just(0.0), 0.0f64..10.0], 91),
            seed in any::<u64>(),
        ) {
            let g = random_net(n, &ws);
            prop_assume!(g.total_weight() > 0.0);
            let (p, trace) = louvain_traced(&g, seed).unwrap();
            prop_assert!((p.modularity - modularity(&g, &p.labels).unwrap()).abs() < 1e-12);
            prop_assert!((-0.5..=1.0).contains(&p.modularity));
            let mut previous = modularity(&g, &(0..n).collect::<Vec<_>>()).unwrap();
            // levels restart from singletons of the aggregated graph, whose
            // modularity equals the last value of the previous level
            for q in trace {
                prop_assert!(q >= previous - 1e-12, "{} < {}", q, previous);
                previous = q;
            }
            prop_assert!((previous - p.modularity).abs() < 1e-9);
            let max = p.labels.iter().max().copied().unwrap_or(0);
            prop_assert_eq!(p.communities, max + 1);
        }
    }
}
