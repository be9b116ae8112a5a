//! Persistent homology over the two-element field.
//!
//! The boundary matrix of a filtration is reduced column by column from left
//! to right: while a column's lowest nonzero row ("pivot") is already owned
//! by an earlier reduced column, that column is added to it. A column left
//! non-empty with pivot `i` pairs simplex `i` (creator) with the column's
//! simplex (destroyer). Creators that are never paired give infinite bars.

mod barcode;
pub mod oracle;

pub use barcode::{Barcode, Interval};
pub use oracle::{betti_oracle, check_dominating_vertex};

use crate::crvr::{check_vertex_list, position_index, Filtration, Simplex};
use std::collections::HashMap;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Facets of a simplex, each obtained by deleting one vertex, in the order
/// "delete vertex 0, delete vertex 1, ...".
pub fn boundary(simplex: &[usize]) -> Result<Vec<Vec<usize>>> {
    check_vertex_list(simplex)?;
    if simplex.len() == 1 {
        return Ok(Vec::new());
    }
    Ok((0..simplex.len())
        .map(|skip| {
            simplex
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != skip)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect())
}

/// Position lookup for simplices. Small vertex ids use combinatorial
/// number system keys (`Σ C(v_i, i+1)`), anything else falls back to hashing
/// the vertex lists.
enum FaceIndex {
    Packed {
        // binom[k][v] = C(v, k)
        binom: Vec<Vec<u128>>,
        map: HashMap<(usize, u128), usize>,
    },
    /// Keys are small enough to index one array per simplex size.
    Dense {
        binom: Vec<Vec<u128>>,
        slots: Vec<Vec<u32>>,
    },
    Lists(HashMap<Vec<usize>, usize>),
}

const PACKED_TABLE_LIMIT: usize = 1 << 22;

impl FaceIndex {
    fn new<T>(simplices: &[Simplex<T>]) -> Result<Self> {
        let max_vertex = simplices.iter().flat_map(|s| s.vertices.iter().copied()).max();
        let max_len = simplices.iter().map(|s| s.vertices.len()).max().unwrap_or(0);
        let Some(max_vertex) = max_vertex else {
            return Ok(Self::Lists(position_index(simplices)?));
        };
        let table_size = (max_vertex + 1).saturating_mul(max_len + 1);
        let binom = if table_size <= PACKED_TABLE_LIMIT {
            binomial_table(max_vertex + 1, max_len)
        } else {
            None
        };
        let Some(binom) = binom else {
            return Ok(Self::Lists(position_index(simplices)?));
        };
        // C(max_vertex + 1, k) keys for k-vertex simplices
        let slots_for = |k: usize| binom[k][max_vertex] + binom[k - 1][max_vertex];
        let key_space: u128 = (1..=max_len).map(slots_for).sum();
        if key_space <= 8 * simplices.len() as u128 + 1024 {
            let mut slots: Vec<Vec<u32>> = (0..=max_len)
                .map(|k| vec![u32::MAX; if k == 0 { 0 } else { slots_for(k) as usize }])
                .collect();
            for (pos, s) in simplices.iter().enumerate() {
                check_vertex_list(&s.vertices)?;
                let key = packed_key(&binom, &s.vertices, usize::MAX) as usize;
                let slot = &mut slots[s.vertices.len()][key];
                if *slot != u32::MAX {
                    return Err(Error::Validation(format!(
                        "simplex {:?} appears more than once",
                        s.vertices
                    )));
                }
                *slot = pos as u32;
            }
            return Ok(Self::Dense { binom, slots });
        }
        let mut map = HashMap::with_capacity(simplices.len());
        for (pos, s) in simplices.iter().enumerate() {
            let key = packed_key(&binom, &s.vertices, usize::MAX);
            if map.insert((s.vertices.len(), key), pos).is_some() {
                // either a duplicate or an unsorted list; let the slow path report it
                check_vertex_list(&s.vertices)?;
                return Ok(Self::Lists(position_index(simplices)?));
            }
        }
        Ok(Self::Packed { binom, map })
    }

    /// Position of `vertices` with entry `skip` removed.
    fn facet(&self, vertices: &[usize], skip: usize) -> Option<usize> {
        match self {
            Self::Packed { binom, map } => {
                let key = packed_key(binom, vertices, skip);
                map.get(&(vertices.len() - 1, key)).copied()
            }
            Self::Dense { binom, slots } => {
                let key = packed_key(binom, vertices, skip) as usize;
                match slots[vertices.len() - 1].get(key) {
                    Some(&p) if p != u32::MAX => Some(p as usize),
                    _ => None,
                }
            }
            Self::Lists(map) => {
                let mut face = vertices.to_vec();
                face.remove(skip);
                map.get(&face).copied()
            }
        }
    }
}

/// Combinatorial key of `vertices` without entry `skip` (pass `usize::MAX`
/// to keep all of them).
fn packed_key(binom: &[Vec<u128>], vertices: &[usize], skip: usize) -> u128 {
    vertices
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != skip)
        .map(|(i, &v)| binom[if i < skip { i + 1 } else { i }][v])
        .sum()
}

/// `C(v, k)` for `v < n`, `k <= max_k`, or `None` if the largest entry
/// times `max_k` would overflow (keys are sums of `max_k` entries).
fn binomial_table(n: usize, max_k: usize) -> Option<Vec<Vec<u128>>> {
    let mut table = vec![vec![0u128; n]; max_k + 1];
    table[0].iter_mut().for_each(|x| *x = 1);
    for k in 1..=max_k {
        for v in 1..n {
            table[k][v] = table[k - 1][v - 1].checked_add(table[k][v - 1])?;
        }
    }
    let largest = table.iter().flat_map(|r| r.last().copied()).max().unwrap_or(0);
    largest.checked_mul(max_k as u128 + 1)?;
    Some(table)
}

/// Boundary matrix in filtration coordinates: column `j` lists the positions
/// of the facets of simplex `j`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMatrix {
    columns: Vec<Vec<u32>>,
    dims: Vec<usize>,
}

impl BoundaryMatrix {
    /// Builds the matrix, rejecting filtrations whose order is not a valid
    /// filtration (a facet missing, placed later, or with a larger value, or
    /// values decreasing along the order).
    pub fn from_filtration<T: Scalar>(filtration: &Filtration<T>) -> Result<Self> {
        let simplices = filtration.simplices();
        if simplices.len() > u32::MAX as usize {
            return Err(Error::Resource {
                what: "boundary matrix columns",
                required: simplices.len() as u128,
                limit: u32::MAX as u128,
            });
        }
        let index = FaceIndex::new(simplices)?;
        let mut columns = Vec::with_capacity(simplices.len());
        let mut dims = Vec::with_capacity(simplices.len());
        let mut previous: Option<T> = None;
        for (pos, s) in simplices.iter().enumerate() {
            if let Some(prev) = previous {
                if s.value < prev {
                    return Err(Error::Validation(format!(
                        "simplex {:?} at position {pos} has value {} below the preceding value {prev}",
                        s.vertices, s.value
                    )));
                }
            }
            previous = Some(s.value);
            check_vertex_list(&s.vertices)?;
            let mut col = Vec::with_capacity(s.vertices.len());
            if s.vertices.len() > 1 {
                for skip in 0..s.vertices.len() {
                    let face = || -> Vec<usize> {
                        let mut f = s.vertices.clone();
                        f.remove(skip);
                        f
                    };
                    match index.facet(&s.vertices, skip) {
                        Some(fp) if fp < pos && simplices[fp].value <= s.value => col.push(fp as u32),
                        Some(fp) => {
                            return Err(Error::Validation(format!(
                                "simplex {:?} enters before its face {:?} (position {fp}, value {})",
                                s.vertices,
                                face(),
                                simplices[fp].value
                            )))
                        }
                        None => {
                            return Err(Error::Validation(format!(
                                "simplex {:?} has face {:?} missing from the filtration",
                                s.vertices,
                                face()
                            )))
                        }
                    }
                }
            }
            col.sort_unstable();
            columns.push(col);
            dims.push(s.dim());
        }
        Ok(Self { columns, dims })
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.columns[j]
    }

    pub fn dim(&self, j: usize) -> usize {
        self.dims[j]
    }
}

/// Column reduction strategy. Both give identical pairings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    /// Plain left-to-right reduction.
    #[default]
    Standard,
    /// Reduce high dimensions first and skip columns known to vanish.
    Clearing,
}

/// Persistence pairing in filtration positions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Pairing {
    /// `(creator, destroyer)` position pairs, sorted by destroyer.
    pub pairs: Vec<(usize, usize)>,
    /// Creators never destroyed, ascending.
    pub essential: Vec<usize>,
}

/// `acc ^= other` for sorted GF(2) columns, using `scratch` as the output buffer.
fn add_column(acc: &mut Vec<u32>, other: &[u32], scratch: &mut Vec<u32>) {
    scratch.clear();
    scratch.reserve(acc.len() + other.len());
    let (mut a, mut b) = (0, 0);
    while a < acc.len() && b < other.len() {
        match acc[a].cmp(&other[b]) {
            std::cmp::Ordering::Less => {
                scratch.push(acc[a]);
                a += 1;
            }
            std::cmp::Ordering::Greater => {
                scratch.push(other[b]);
                b += 1;
            }
            std::cmp::Ordering::Equal => {
                a += 1;
                b += 1;
            }
        }
    }
    scratch.extend_from_slice(&acc[a..]);
    scratch.extend_from_slice(&other[b..]);
    std::mem::swap(acc, scratch);
}

/// Reduces the boundary matrix and returns the persistence pairing.
pub fn reduce(matrix: &BoundaryMatrix, strategy: Reduction) -> Pairing {
    reduce_prefix(matrix, strategy, matrix.len())
}

/// Reduces only the first `end` columns. Since faces precede cofaces this is
/// the pairing of the subcomplex made of those simplices.
pub fn reduce_prefix(matrix: &BoundaryMatrix, strategy: Reduction, end: usize) -> Pairing {
    let n = end.min(matrix.len());
    // pivot_owner[row] = column whose reduced pivot is `row`
    let mut pivot_owner: Vec<u32> = vec![u32::MAX; n];
    let mut reduced: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut is_destroyer = vec![false; n];
    let mut is_creator_paired = vec![false; n];
    let mut scratch = Vec::new();

    let mut reduce_column = |j: usize,
                             pivot_owner: &mut Vec<u32>,
                             reduced: &mut Vec<Vec<u32>>|
     -> Option<u32> {
        let mut col = matrix.columns[j].clone();
        while let Some(&low) = col.last() {
            let owner = pivot_owner[low as usize];
            if owner == u32::MAX {
                break;
            }
            add_column(&mut col, &reduced[owner as usize], &mut scratch);
        }
        let low = col.last().copied();
        if let Some(low) = low {
            pivot_owner[low as usize] = j as u32;
            reduced[j] = col;
        }
        low
    };

    match strategy {
        Reduction::Standard => {
            for j in 0..n {
                if let Some(low) = reduce_column(j, &mut pivot_owner, &mut reduced) {
                    is_destroyer[j] = true;
                    is_creator_paired[low as usize] = true;
                }
            }
        }
        Reduction::Clearing => {
            let top = (0..n).map(|j| matrix.dim(j)).max().unwrap_or(0);
            let mut cleared = vec![false; n];
            for d in (1..=top).rev() {
                for j in 0..n {
                    if matrix.dim(j) != d || cleared[j] {
                        continue;
                    }
                    if let Some(low) = reduce_column(j, &mut pivot_owner, &mut reduced) {
                        is_destroyer[j] = true;
                        is_creator_paired[low as usize] = true;
                        cleared[low as usize] = true;
                    }
                }
            }
        }
    }

    let mut pairs: Vec<(usize, usize)> = (0..n)
        .filter(|&j| is_destroyer[j])
        .map(|j| (*reduced[j].last().expect("destroyer has a pivot") as usize, j))
        .collect();
    pairs.sort_by_key(|&(_, j)| j);
    let essential = (0..n)
        .filter(|&i| !is_destroyer[i] && !is_creator_paired[i])
        .collect();
    Pairing { pairs, essential }
}

/// Barcode of a filtration, including zero-length intervals.
///
/// Homology is reported in dimensions below the filtration's `max_dim`;
/// the top dimension is a truncated skeleton and its classes are not final.
pub fn compute_persistence<T: Scalar>(filtration: &Filtration<T>) -> Result<Barcode<T>> {
    compute_persistence_with(filtration, Reduction::Standard)
}

pub fn compute_persistence_with<T: Scalar>(
    filtration: &Filtration<T>,
    strategy: Reduction,
) -> Result<Barcode<T>> {
    let matrix = BoundaryMatrix::from_filtration(filtration)?;
    if let Some(tail) = acyclic_tail(filtration) {
        let pairing = reduce_prefix(&matrix, strategy, tail.start);
        return Ok(barcode_with_acyclic_tail(filtration, &matrix, &pairing, &tail));
    }
    let pairing = reduce(&matrix, strategy);
    Ok(barcode_from_pairing(filtration, &matrix, &pairing))
}

/// Same result as [`compute_persistence_with`] but always reduces every column.
pub fn compute_persistence_exhaustive<T: Scalar>(
    filtration: &Filtration<T>,
    strategy: Reduction,
) -> Result<Barcode<T>> {
    let matrix = BoundaryMatrix::from_filtration(filtration)?;
    let pairing = reduce(&matrix, strategy);
    Ok(barcode_from_pairing(filtration, &matrix, &pairing))
}

/// The block of simplices sharing the last filtration value, when the
/// filtration is a complete skeleton (every vertex subset of size up to
/// `max_dim + 1`). The final complex then has the homology of a point below
/// the top dimension, so every class still alive when the block starts dies
/// in it and the block itself needs no reduction.
#[derive(Debug, Clone, PartialEq)]
struct AcyclicTail {
    start: usize,
    vertices: usize,
}

fn acyclic_tail<T: Scalar>(filtration: &Filtration<T>) -> Option<AcyclicTail> {
    let simplices = filtration.simplices();
    let max_dim = filtration.max_dim();
    let last = simplices.last()?.value;
    if max_dim == 0 {
        return None;
    }
    let mut counts = vec![0u128; max_dim + 1];
    for s in simplices {
        *counts.get_mut(s.dim())? += 1;
    }
    let vertices = counts[0] as usize;
    let mut binom: u128 = 1;
    for (k, &count) in counts.iter().enumerate() {
        // C(vertices, k + 1)
        binom = binom.checked_mul(vertices.checked_sub(k)? as u128)? / (k as u128 + 1);
        if count != binom {
            return None;
        }
    }
    let start = simplices.iter().position(|s| s.value == last)?;
    if simplices[start..].iter().any(|s| s.dim() == 0) {
        return None;
    }
    Some(AcyclicTail { start, vertices })
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

fn barcode_with_acyclic_tail<T: Scalar>(
    filtration: &Filtration<T>,
    matrix: &BoundaryMatrix,
    prefix: &Pairing,
    tail: &AcyclicTail,
) -> Barcode<T> {
    let simplices = filtration.simplices();
    let last = simplices[simplices.len() - 1].value;
    let reported = filtration.max_dim();
    let mut intervals = Vec::new();
    let mut creators = vec![0usize; reported];
    for &(i, j) in &prefix.pairs {
        let dim = matrix.dim(i);
        if dim < reported {
            intervals.push(Interval::new(dim, simplices[i].value, simplices[j].value));
            creators[dim] += 1;
        }
    }
    // essential is ascending, so the first vertex is the oldest component
    let mut oldest_seen = false;
    for &i in &prefix.essential {
        let dim = matrix.dim(i);
        if dim >= reported {
            continue;
        }
        creators[dim] += 1;
        let death = if dim == 0 && !oldest_seen {
            oldest_seen = true;
            T::infinity()
        } else {
            last
        };
        intervals.push(Interval::new(dim, simplices[i].value, death));
    }
    // rank ∂_k of a full simplex is C(v − 1, k), leaving C(v − 1, k + 1)
    // creators in each dimension k >= 1
    for (dim, &seen) in creators.iter().enumerate().skip(1) {
        let total = binomial(tail.vertices - 1, dim + 1) as usize;
        for _ in seen..total {
            intervals.push(Interval::new(dim, last, last));
        }
    }
    Barcode::new(intervals)
}

pub fn barcode_from_pairing<T: Scalar>(
    filtration: &Filtration<T>,
    matrix: &BoundaryMatrix,
    pairing: &Pairing,
) -> Barcode<T> {
    let simplices = filtration.simplices();
    let reported = |dim: usize| dim < filtration.max_dim();
    let mut intervals = Vec::with_capacity(pairing.pairs.len() + pairing.essential.len());
    for &(i, j) in &pairing.pairs {
        let dim = matrix.dim(i);
        if reported(dim) {
            intervals.push(Interval::new(dim, simplices[i].value, simplices[j].value));
        }
    }
    for &i in &pairing.essential {
        let dim = matrix.dim(i);
        if reported(dim) {
            intervals.push(Interval::new(dim, simplices[i].value, T::infinity()));
        }
    }
    Barcode::new(intervals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crvr::{build_flag_filtration, crvr_distance, Simplex};
    use crate::network::WeightedNetwork;
    use proptest::prelude::*;

    fn staged_triangle() -> Filtration<f64> {
        Filtration::parse(
            "# max_dim: 3\n0 0 0\n0 0 1\n0 0 2\n1 1 0 1\n2 1 1 2\n2 1 0 2\n3 2 0 1 2\n",
        )
        .unwrap()
    }

    fn bars(b: &Barcode<f64>) -> Vec<(usize, f64, f64)> {
        b.intervals().iter().map(|iv| (iv.dim, iv.birth, iv.death)).collect()
    }

    #[test]
    fn boundary_examples() {
        assert_eq!(
            boundary(&[0, 1, 2]).unwrap(),
            vec![vec![1, 2], vec![0, 2], vec![0, 1]]
        );
        assert!(boundary(&[0]).unwrap().is_empty());
        assert!(boundary(&[2, 1]).is_err());
        assert!(boundary(&[1, 1]).is_err());
    }

    #[test]
    fn boundary_of_boundary_vanishes() {
        let mut counts = std::collections::HashMap::new();
        for facet in boundary(&[0, 1, 2, 3]).unwrap() {
            for ridge in boundary(&facet).unwrap() {
                *counts.entry(ridge).or_insert(0u32) += 1;
            }
        }
        assert!(counts.values().all(|c| c % 2 == 0));
    }

    #[test]
    fn staged_triangle_barcode() {
        let b = compute_persistence(&staged_triangle()).unwrap();
        assert_eq!(
            bars(&b),
            vec![
                (0, 0.0, 1.0),
                (0, 0.0, 2.0),
                (0, 0.0, f64::INFINITY),
                (1, 2.0, 3.0)
            ]
        );
    }

    #[test]
    fn single_vertex() {
        let f = Filtration::from_simplices(vec![Simplex::new(vec![0], 0.0)], 1).unwrap();
        assert_eq!(bars(&compute_persistence(&f).unwrap()), vec![(0, 0.0, f64::INFINITY)]);
    }

    #[test]
    fn hollow_triangle() {
        let f = Filtration::<f64>::parse("# max_dim: 2\n0 0 0\n0 0 1\n0 0 2\n1 1 0 1\n1 1 0 2\n1 1 1 2\n")
            .unwrap();
        let b = compute_persistence(&f).unwrap();
        assert_eq!(
            bars(&b),
            vec![
                (0, 0.0, 1.0),
                (0, 0.0, 1.0),
                (0, 0.0, f64::INFINITY),
                (1, 1.0, f64::INFINITY)
            ]
        );
    }

    #[test]
    fn order_violations_name_the_simplex() {
        let f = Filtration::<f64>::parse("# max_dim: 2\n0 0 0\n1 1 0 1\n0 0 1\n").unwrap();
        let err = compute_persistence(&f).unwrap_err();
        assert!(matches!(&err, Error::Validation(m) if m.contains("[0, 1]")), "{err}");

        let f = Filtration::<f64>::parse("0 0 0\n0 0 1\n1 1 0 2\n").unwrap();
        let err = compute_persistence(&f).unwrap_err();
        assert!(matches!(&err, Error::Validation(m) if m.contains("missing")), "{err}");

        let f = Filtration::<f64>::parse("0 0 0\n0 0 1\n2 0 2\n1 1 0 1\n").unwrap();
        assert!(compute_persistence(&f).is_err());
    }

    fn random_filtration(n: usize, ws: &[f64], max_dim: usize) -> Filtration<f64> {
        let mut g = WeightedNetwork::empty(n).unwrap();
        let mut b = 0;
        for i in 0..n {
            for j in i + 1..n {
                g.set_weight(i, j, ws[b]).unwrap();
                b += 1;
            }
        }
        build_flag_filtration(&crvr_distance(&g, 0.1).unwrap(), max_dim).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn clearing_matches_standard(
            n in 1usize..10,
            ws in proptest::collection::vec(0.1f64..10.0, 45),
        ) {
            let f = random_filtration(n, &ws, 3);
            let m = BoundaryMatrix::from_filtration(&f).unwrap();
            let a = reduce(&m, Reduction::Standard);
            let b = reduce(&m, Reduction::Clearing);
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(
                compute_persistence_exhaustive(&f, Reduction::Standard).unwrap(),
                compute_persistence_exhaustive(&f, Reduction::Clearing).unwrap()
            );
        }

        #[test]
        fn acyclic_tail_shortcut_is_exact(
            n in 1usize..10,
            levels in proptest::collection::vec(prop_oneof![Just(0.05f64), 0.1f64..10.0, Just(1.0)], 45),
            max_dim in 1usize..4,
        ) {
            let f = random_filtration(n, &levels, max_dim);
            for strategy in [Reduction::Standard, Reduction::Clearing] {
                prop_assert_eq!(
                    compute_persistence_with(&f, strategy).unwrap(),
                    compute_persistence_exhaustive(&f, strategy).unwrap()
                );
            }
        }

        #[test]
        fn pairing_accounts_for_every_column(
            n in 1usize..9,
            ws in proptest::collection::vec(0.1f64..10.0, 36),
        ) {
            let f = random_filtration(n, &ws, 3);
            let m = BoundaryMatrix::from_filtration(&f).unwrap();
            let p = reduce(&m, Reduction::Standard);
            prop_assert_eq!(2 * p.pairs.len() + p.essential.len(), m.len());
            for &(i, j) in &p.pairs {
                prop_assert_eq!(m.dim(i) + 1, m.dim(j));
                prop_assert!(i < j);
            }
            // per dimension: creators = simplices not used as destroyers
            for k in 0..=3 {
                let simplices = (0..m.len()).filter(|&j| m.dim(j) == k).count();
                let destroyers = p.pairs.iter().filter(|&&(_, j)| m.dim(j) == k).count();
                let creators = p.pairs.iter().filter(|&&(i, _)| m.dim(i) == k).count()
                    + p.essential.iter().filter(|&&i| m.dim(i) == k).count();
                prop_assert_eq!(creators + destroyers, simplices);
            }
        }

        #[test]
        fn one_essential_component_when_connected(
            n in 1usize..10,
            ws in proptest::collection::vec(0.0f64..10.0, 45),
        ) {
            let f = random_filtration(n, &ws, 2);
            let b = compute_persistence(&f).unwrap();
            let infinite_h0 = b.in_dim(0).filter(|iv| iv.is_infinite()).count();
            prop_assert_eq!(infinite_h0, 1);
            prop_assert_eq!(b.in_dim(0).count(), n);
        }

        #[test]
        fn equal_value_permutations_leave_barcode_unchanged(
            n in 2usize..8,
            levels in proptest::collection::vec(1u8..4, 28),
            seed in any::<u64>(),
        ) {
            // Few distinct weights force many ties.
            let ws: Vec<f64> = levels.iter().map(|&l| l as f64).collect();
            let f = random_filtration(n, &ws, 3);
            let base = compute_persistence(&f).unwrap();

            // Shuffle within each value class, then restore face order by
            // stable-sorting on (value, dim).
            use rand::{seq::SliceRandom, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut simplices = f.simplices().to_vec();
            simplices.shuffle(&mut rng);
            simplices.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap().then(a.dim().cmp(&b.dim())));
            let shuffled = Filtration::from_simplices(simplices, f.max_dim()).unwrap();
            prop_assert_eq!(compute_persistence(&shuffled).unwrap(), base);
        }
    }
}
