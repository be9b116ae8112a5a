//! Cropped reciprocal distances and flag (Vietoris-Rips) filtrations.
//!
//! A weight `w_ij` becomes the dissimilarity `1 / w_ij` when `w_ij > ζ` and
//! is cropped to `1 / ζ` otherwise, so disconnected pairs sit at the cap.
//! The result is generally not a metric; the flag construction does not need
//! the triangle inequality.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{invalid, parse_err, Error, Result};
use crate::network::WeightedNetwork;
use crate::scalar::{cmp, Scalar};

/// Default cropping parameter; caps distances at 10.
pub const DEFAULT_ZETA: f64 = 0.1;

/// Largest flag filtration [`build_flag_filtration`] will materialize.
pub const DEFAULT_SIMPLEX_LIMIT: u128 = 20_000_000;

const MAX_DIM_DIRECTIVE: &str = "max_dim:";

/// Symmetric dissimilarity matrix with entries in `(0, 1/ζ]` off the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<T> {
    n: usize,
    d: Vec<T>,
    zeta: T,
}

impl<T: Scalar> DistanceMatrix<T> {
    /// Wraps an arbitrary dissimilarity matrix, checking the invariants.
    pub fn new(n: usize, d: Vec<T>, zeta: T) -> Result<Self> {
        if !(zeta > T::zero()) || !zeta.is_finite() {
            return Err(invalid(format!("zeta must be positive, got {zeta}")));
        }
        if n == 0 || d.len() != n * n {
            return Err(invalid(format!(
                "expected a non-empty {n}x{n} matrix, got {} entries",
                d.len()
            )));
        }
        let cap = zeta.recip();
        for i in 0..n {
            if d[i * n + i] != T::zero() {
                return Err(Error::Validation(format!("d({i}, {i}) must be 0")));
            }
            for j in i + 1..n {
                let v = d[i * n + j];
                if v != d[j * n + i] {
                    return Err(Error::Validation(format!("d({i}, {j}) != d({j}, {i})")));
                }
                if !(v > T::zero() && v <= cap) {
                    return Err(Error::Validation(format!(
                        "d({i}, {j}) = {v} outside (0, {cap}]"
                    )));
                }
            }
        }
        Ok(Self { n, d, zeta })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.d[i * self.n + j]
    }

    pub fn zeta(&self) -> T {
        self.zeta
    }

    /// The distance cap `1/ζ`.
    pub fn cap(&self) -> T {
        self.zeta.recip()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.d
    }
}

/// `D_ij = 1/w_ij` if `w_ij > ζ`, else `1/ζ`; `D_ii = 0`.
pub fn crvr_distance<T: Scalar>(net: &WeightedNetwork<T>, zeta: T) -> Result<DistanceMatrix<T>> {
    if !(zeta > T::zero()) || !zeta.is_finite() {
        return Err(invalid(format!("zeta must be positive, got {zeta}")));
    }
    let n = net.n();
    let cap = zeta.recip();
    let mut d = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let w = net.weight(i, j);
                d[i * n + j] = if w > zeta { w.recip() } else { cap };
            }
        }
    }
    Ok(DistanceMatrix { n, d, zeta })
}

/// A simplex given by its ascending vertex list, with its filtration value.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex<T> {
    pub vertices: Vec<usize>,
    pub value: T,
}

impl<T> Simplex<T> {
    pub fn new(vertices: Vec<usize>, value: T) -> Self {
        Self { vertices, value }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// Simplices in filtration order, up to dimension `max_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration<T> {
    simplices: Vec<Simplex<T>>,
    max_dim: usize,
}

impl<T: Scalar> Filtration<T> {
    /// Takes simplices in the given order. Vertex lists must be non-empty,
    /// strictly ascending and of dimension `<= max_dim`; face ordering is
    /// checked later by the persistence computation.
    pub fn from_simplices(simplices: Vec<Simplex<T>>, max_dim: usize) -> Result<Self> {
        for s in &simplices {
            check_vertex_list(&s.vertices)?;
            if s.dim() > max_dim {
                return Err(invalid(format!(
                    "simplex {:?} has dimension {} above max_dim {max_dim}",
                    s.vertices,
                    s.dim()
                )));
            }
            if s.value.is_nan() {
                return Err(invalid(format!("simplex {:?} has a NaN value", s.vertices)));
            }
        }
        Ok(Self { simplices, max_dim })
    }

    pub fn simplices(&self) -> &[Simplex<T>] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    /// Number of distinct vertices referenced.
    pub fn vertex_count(&self) -> usize {
        self.simplices
            .iter()
            .filter(|s| s.vertices.len() == 1)
            .count()
    }

    /// Distinct filtration values in ascending order.
    pub fn values(&self) -> Vec<T> {
        let mut v: Vec<T> = self.simplices.iter().map(|s| s.value).collect();
        v.sort_by(cmp);
        v.dedup();
        v
    }

    /// Text form: a `# max_dim: N` line, then one `value dim v0 v1 ...`
    /// line per simplex, in order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {MAX_DIM_DIRECTIVE} {}", self.max_dim);
        for s in &self.simplices {
            let _ = write!(out, "{} {}", s.value, s.dim());
            for v in &s.vertices {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the text form. Blank lines and `#` comments are skipped. A
    /// `# max_dim: N` comment sets the dimension cap; without it the listed
    /// complex is taken as complete and the cap is one above the largest
    /// dimension present, so every listed dimension gets its homology.
    pub fn parse(text: &str) -> Result<Self> {
        let mut simplices = Vec::new();
        let mut declared = None;
        for (k, raw) in text.lines().enumerate() {
            let lineno = k + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(rest) = comment.trim().strip_prefix(MAX_DIM_DIRECTIVE) {
                    declared = Some(rest.trim().parse::<usize>().map_err(|_| {
                        parse_err(lineno, format!("`{}` is not a dimension", rest.trim()))
                    })?);
                }
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() < 3 {
                return Err(parse_err(lineno, "expected `value dim v0 [v1 ...]`"));
            }
            let value: T = toks[0]
                .parse()
                .map_err(|_| parse_err(lineno, format!("`{}` is not a number", toks[0])))?;
            let dim: usize = toks[1]
                .parse()
                .map_err(|_| parse_err(lineno, format!("`{}` is not a dimension", toks[1])))?;
            let vertices = toks[2..]
                .iter()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| parse_err(lineno, format!("`{t}` is not a vertex index")))
                })
                .collect::<Result<Vec<_>>>()?;
            if vertices.len() != dim + 1 {
                return Err(parse_err(
                    lineno,
                    format!("dimension {dim} needs {} vertices, got {}", dim + 1, vertices.len()),
                ));
            }
            check_vertex_list(&vertices).map_err(|e| parse_err(lineno, e.to_string()))?;
            simplices.push(Simplex::new(vertices, value));
        }
        let max_dim = declared
            .unwrap_or_else(|| simplices.iter().map(Simplex::dim).max().unwrap_or(0) + 1);
        Self::from_simplices(simplices, max_dim)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

pub(crate) fn check_vertex_list(vertices: &[usize]) -> Result<()> {
    if vertices.is_empty() {
        return Err(invalid("a simplex needs at least one vertex"));
    }
    if vertices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid(format!(
            "vertices {vertices:?} must be strictly ascending"
        )));
    }
    Ok(())
}

/// `Σ_{m=0}^{max_dim} C(n, m+1)`, saturating.
pub fn flag_simplex_count(n: usize, max_dim: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1; // C(n, 0)
    for k in 1..=(max_dim + 1).min(n) {
        binom = binom.saturating_mul((n - k + 1) as u128) / k as u128;
        total = total.saturating_add(binom);
    }
    total
}

/// Full flag filtration of `d` up to dimension `max_dim` with the default size limit.
pub fn build_flag_filtration<T: Scalar>(d: &DistanceMatrix<T>, max_dim: usize) -> Result<Filtration<T>> {
    build_flag_filtration_with_limit(d, max_dim, DEFAULT_SIMPLEX_LIMIT)
}

/// Every vertex subset of size `<= max_dim + 1` enters at its diameter
/// (vertices at 0). Order: value, then dimension, then lexicographic vertices.
pub fn build_flag_filtration_with_limit<T: Scalar>(
    d: &DistanceMatrix<T>,
    max_dim: usize,
    limit: u128,
) -> Result<Filtration<T>> {
    let n = d.n();
    let count = flag_simplex_count(n, max_dim);
    if count > limit {
        return Err(Error::Resource {
            what: "flag filtration simplices",
            required: count,
            limit,
        });
    }
    let mut simplices: Vec<Simplex<T>> = Vec::with_capacity(count as usize);
    let mut frontier: Vec<Simplex<T>> = (0..n).map(|v| Simplex::new(vec![v], T::zero())).collect();
    for _ in 0..max_dim {
        let mut next = Vec::new();
        for s in &frontier {
            let last = *s.vertices.last().expect("non-empty");
            for v in last + 1..n {
                let diam = s
                    .vertices
                    .iter()
                    .fold(s.value, |acc, &u| acc.max(d.get(u, v)));
                let mut verts = Vec::with_capacity(s.vertices.len() + 1);
                verts.extend_from_slice(&s.vertices);
                verts.push(v);
                next.push(Simplex::new(verts, diam));
            }
        }
        simplices.append(&mut frontier);
        frontier = next;
    }
    simplices.append(&mut frontier);
    sort_filtration_order(&mut simplices);
    Ok(Filtration { simplices, max_dim })
}

pub(crate) fn sort_filtration_order<T: Scalar>(simplices: &mut [Simplex<T>]) {
    simplices.sort_by(|a, b| {
        cmp(&a.value, &b.value)
            .then(a.vertices.len().cmp(&b.vertices.len()))
            .then_with(|| a.vertices.cmp(&b.vertices))
    });
}

/// Maps each simplex's vertex list to its position in the filtration.
pub(crate) fn position_index<T>(simplices: &[Simplex<T>]) -> Result<HashMap<Vec<usize>, usize>> {
    let mut index = HashMap::with_capacity(simplices.len());
    for (pos, s) in simplices.iter().enumerate() {
        if index.insert(s.vertices.clone(), pos).is_some() {
            return Err(Error::Validation(format!(
                "simplex {:?} appears more than once",
                s.vertices
            )));
        }
    }
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn net_from(n: usize, w: &[(usize, usize, f64)]) -> WeightedNetwork<f64> {
        let mut g = WeightedNetwork::empty(n).unwrap();
        for &(i, j, x) in w {
            g.set_weight(i, j, x).unwrap();
        }
        g
    }

    #[test]
    fn crop_rule() {
        let g = net_from(4, &[(0, 1, 2.0), (0, 2, 0.05), (1, 2, 0.1)]);
        let d = crvr_distance(&g, 0.1).unwrap();
        assert_eq!(d.get(0, 1), 0.5);
        assert_eq!(d.get(0, 2), 10.0);
        // weight exactly ζ is cropped
        assert_eq!(d.get(1, 2), 10.0);
        // disconnected pair
        assert_eq!(d.get(0, 3), 10.0);
        assert_eq!(d.get(3, 3), 0.0);
        assert!(crvr_distance(&g, 0.0).is_err());
        assert!(crvr_distance(&g, -1.0).is_err());
    }

    #[test]
    fn equilateral_triangle() {
        let d = DistanceMatrix::new(3, vec![0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0], 0.5).unwrap();
        let f = build_flag_filtration(&d, 2).unwrap();
        let summary: Vec<(Vec<usize>, f64)> =
            f.simplices().iter().map(|s| (s.vertices.clone(), s.value)).collect();
        assert_eq!(
            summary,
            vec![
                (vec![0], 0.0),
                (vec![1], 0.0),
                (vec![2], 0.0),
                (vec![0, 1], 1.0),
                (vec![0, 2], 1.0),
                (vec![1, 2], 1.0),
                (vec![0, 1, 2], 1.0),
            ]
        );
    }

    #[test]
    fn three_point_distances() {
        let d = DistanceMatrix::new(3, vec![0.0, 1.0, 2.0, 1.0, 0.0, 2.0, 2.0, 2.0, 0.0], 0.5).unwrap();
        let f = build_flag_filtration(&d, 2).unwrap();
        let edge_values: Vec<(Vec<usize>, f64)> = f
            .simplices()
            .iter()
            .filter(|s| s.dim() >= 1)
            .map(|s| (s.vertices.clone(), s.value))
            .collect();
        assert_eq!(
            edge_values,
            vec![
                (vec![0, 1], 1.0),
                (vec![0, 2], 2.0),
                (vec![1, 2], 2.0),
                (vec![0, 1, 2], 2.0)
            ]
        );
    }

    #[test]
    fn binomial_counts() {
        assert_eq!(flag_simplex_count(40, 3), 40 + 780 + 9880 + 91390);
        assert_eq!(flag_simplex_count(3, 5), 7);
        assert_eq!(flag_simplex_count(1, 0), 1);
    }

    #[test]
    fn limit_is_enforced() {
        let g = net_from(12, &[(0, 1, 1.0)]);
        let d = crvr_distance(&g, 0.1).unwrap();
        let err = build_flag_filtration_with_limit(&d, 3, 100).unwrap_err();
        match err {
            Error::Resource { required, .. } => assert_eq!(required, flag_simplex_count(12, 3)),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn text_round_trip() {
        let body = "0 0 0\n0 0 1\n0 0 2\n1 1 0 1\n2 1 1 2\n2 1 0 2\n3 2 0 1 2\n";
        let f = Filtration::<f64>::parse(body).unwrap();
        assert_eq!(f.max_dim(), 3);
        assert_eq!(f.len(), 7);
        let text = f.to_text();
        assert_eq!(text, format!("# max_dim: 3\n{body}"));
        let capped = Filtration::<f64>::parse(&format!("# max_dim: 2\n{body}")).unwrap();
        assert_eq!(capped.max_dim(), 2);
        assert_eq!(Filtration::<f64>::parse(&capped.to_text()).unwrap(), capped);
        assert!(Filtration::<f64>::parse("0 1 0\n").is_err());
        assert!(Filtration::<f64>::parse("0 1 1 0\n").is_err());
        assert!(matches!(
            Filtration::<f64>::parse("0 0 0\nabc 0 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn distance_matrix_validation() {
        assert!(DistanceMatrix::new(2, vec![0.0, 11.0, 11.0, 0.0], 0.1).is_err());
        assert!(DistanceMatrix::new(2, vec![0.0, 1.0, 2.0, 0.0], 0.1).is_err());
        assert!(DistanceMatrix::new(2, vec![0.0, 0.0, 0.0, 0.0], 0.1).is_err());
        assert!(DistanceMatrix::new(2, vec![0.0, 1.0, 1.0, 0.0], 0.0).is_err());
    }

    fn random_net(n: usize, ws: &[f64]) -> WeightedNetwork<f64> {
        let mut g = WeightedNetwork::empty(n).unwrap();
        let mut b = 0;
        for i in 0..n {
            for j in i + 1..n {
                g.set_weight(i, j, ws[b]).unwrap();
                b += 1;
            }
        }
        g
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn faces_precede_cofaces_and_counts_match(
            n in 1usize..9,
            max_dim in 0usize..4,
            ws in proptest::collection::vec(0.0f64..10.0, 28),
        ) {
            let g = random_net(n, &ws);
            let d = crvr_distance(&g, 0.1).unwrap();
            let f = build_flag_filtration(&d, max_dim).unwrap();
            prop_assert_eq!(f.len() as u128, flag_simplex_count(n, max_dim));
            let index = position_index(f.simplices()).unwrap();
            for (pos, s) in f.simplices().iter().enumerate() {
                let mut diam = 0.0f64;
                for (a, &u) in s.vertices.iter().enumerate() {
                    for &v in &s.vertices[a + 1..] {
                        diam = diam.max(d.get(u, v));
                    }
                }
                prop_assert_eq!(s.value, diam);
                if s.vertices.len() > 1 {
                    for skip in 0..s.vertices.len() {
                        let mut face = s.vertices.clone();
                        face.remove(skip);
                        let fp = index[&face];
                        prop_assert!(fp < pos);
                        prop_assert!(f.simplices()[fp].value <= s.value);
                    }
                }
            }
        }

        #[test]
        fn scaling_weights_and_zeta_scales_distances(
            n in 2usize..9,
            ws in proptest::collection::vec(0.0f64..10.0, 28),
            exp in -3i32..4,
        ) {
            // Powers of two keep the comparison exact.
            let c = 2f64.powi(exp);
            let g = random_net(n, &ws);
            let mut scaled = WeightedNetwork::empty(n).unwrap();
            for i in 0..n {
                for j in i + 1..n {
                    scaled.set_weight(i, j, g.weight(i, j) * c).unwrap();
                }
            }
            let d = crvr_distance(&g, 0.1).unwrap();
            let ds = crvr_distance(&scaled, 0.1 * c).unwrap();
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(ds.get(i, j), d.get(i, j) / c);
                }
            }
        }
    }
}
