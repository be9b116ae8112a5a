use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{parse_err, Error, Result};
use crate::scalar::{cmp, Scalar};

/// Half-open persistence interval `[birth, death)`; `death` may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval<T> {
    pub dim: usize,
    pub birth: T,
    pub death: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(dim: usize, birth: T, death: T) -> Self {
        Self { dim, birth, death }
    }

    #[inline]
    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }

    #[inline]
    pub fn is_zero_length(&self) -> bool {
        self.birth == self.death
    }

    pub fn persistence(&self) -> T {
        self.death - self.birth
    }

    /// Whether the class is alive at `t`, i.e. `birth <= t < death`.
    #[inline]
    pub fn alive_at(&self, t: T) -> bool {
        self.birth <= t && t < self.death
    }
}

/// Multiset of intervals kept in `(dim, birth, death)` order.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Barcode<T> {
    intervals: Vec<Interval<T>>,
}

impl<T: Scalar> Barcode<T> {
    pub fn new(mut intervals: Vec<Interval<T>>) -> Self {
        intervals.sort_by(|a, b| {
            a.dim
                .cmp(&b.dim)
                .then(cmp(&a.birth, &b.birth))
                .then(cmp(&a.death, &b.death))
        });
        Self { intervals }
    }

    pub fn intervals(&self) -> &[Interval<T>] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn in_dim(&self, dim: usize) -> impl Iterator<Item = &Interval<T>> + '_ {
        self.intervals.iter().filter(move |iv| iv.dim == dim)
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.intervals.iter().map(|iv| iv.dim).max()
    }

    /// Number of dimension-`dim` classes alive at `t`.
    pub fn betti_at(&self, dim: usize, t: T) -> usize {
        self.in_dim(dim).filter(|iv| iv.alive_at(t)).count()
    }

    /// Drops intervals with `birth == death`.
    pub fn without_zero_length(&self) -> Self {
        Self {
            intervals: self
                .intervals
                .iter()
                .filter(|iv| !iv.is_zero_length())
                .copied()
                .collect(),
        }
    }

    /// Reports deaths at (or beyond) the distance cap as infinite.
    /// Zero-length intervals stay as they are.
    pub fn with_cap_as_infinite(&self, cap: T) -> Self {
        Self::new(
            self.intervals
                .iter()
                .map(|iv| {
                    if iv.death >= cap && !iv.is_zero_length() {
                        Interval::new(iv.dim, iv.birth, T::infinity())
                    } else {
                        *iv
                    }
                })
                .collect(),
        )
    }

    /// Multiplies every endpoint by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self::new(
            self.intervals
                .iter()
                .map(|iv| Interval::new(iv.dim, iv.birth * factor, iv.death * factor))
                .collect(),
        )
    }

    /// CSV with header `dim,birth,death`; infinite deaths are written `inf`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["dim", "birth", "death"])?;
        for iv in &self.intervals {
            w.write_record([iv.dim.to_string(), iv.birth.to_string(), format_death(iv.death)])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }

    /// Reads the CSV form; `#` lines are comments.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(input);
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["dim", "birth", "death"] {
            return Err(parse_err(1, "expected header `dim,birth,death`"));
        }
        let mut intervals = Vec::new();
        for record in r.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let field = |k: usize| record.get(k).ok_or_else(|| parse_err(line, "missing field"));
            let dim: usize = field(0)?
                .parse()
                .map_err(|_| parse_err(line, "bad dimension"))?;
            let birth: T = field(1)?
                .parse()
                .map_err(|_| parse_err(line, "bad birth value"))?;
            let death: T = field(2)?
                .parse()
                .map_err(|_| parse_err(line, "bad death value"))?;
            if !(birth <= death) {
                return Err(Error::Validation(format!(
                    "line {line}: birth {birth} exceeds death {death}"
                )));
            }
            intervals.push(Interval::new(dim, birth, death));
        }
        Ok(Self::new(intervals))
    }
}

fn format_death<T: Scalar>(death: T) -> String {
    if death.is_infinite() {
        "inf".to_owned()
    } else {
        death.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn csv_uses_inf_and_sorted_rows() {
        let b = Barcode::new(vec![
            Interval::new(1, 2.0, 3.0),
            Interval::new(0, 0.0, f64::INFINITY),
            Interval::new(0, 0.0, 1.0),
        ]);
        assert_eq!(b.to_csv_string(), "dim,birth,death\n0,0,1\n0,0,inf\n1,2,3\n");
    }

    #[test]
    fn cap_reclassification_and_zero_length_filter() {
        let b = Barcode::new(vec![
            Interval::new(0, 0.0, 10.0),
            Interval::new(1, 0.5, 0.5),
            Interval::new(1, 2.0, 3.0),
            Interval::new(1, 10.0, 10.0),
        ]);
        let capped = b.with_cap_as_infinite(10.0);
        assert!(capped.intervals()[0].is_infinite());
        assert_eq!(capped.in_dim(1).filter(|iv| iv.is_infinite()).count(), 0);
        assert_eq!(b.without_zero_length().len(), 2);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(Barcode::<f64>::read_csv("dim,birth,death\n0,2,1\n".as_bytes()).is_err());
        assert!(Barcode::<f64>::read_csv("a,b,c\n".as_bytes()).is_err());
        assert!(Barcode::<f64>::read_csv("dim,birth,death\n0,x,1\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip(
            raw in proptest::collection::vec((0usize..3, 0.0f64..10.0, prop_oneof![Just(f64::INFINITY), 0.0f64..10.0]), 0..20)
        ) {
            let b = Barcode::new(
                raw.into_iter()
                    .map(|(d, x, y)| if y.is_infinite() { Interval::new(d, x, y) } else { Interval::new(d, x.min(y), x.max(y)) })
                    .collect(),
            );
            let text = format!("# zeta=0.1, tau=1, seed=3\n{}", b.to_csv_string());
            prop_assert_eq!(Barcode::read_csv(text.as_bytes()).unwrap(), b);
        }
    }
}
