use crate::error::{Error, Result};

/// `N` points in `[0,1)^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map(Vec::len).unwrap_or(0);
        if points.is_empty() || dim == 0 {
            return Err(Error::invalid(
                "point set needs N ≥ 1 points of dimension d ≥ 1",
            ));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::invalid(format!(
                    "point {i} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            if let Some(c) = p.iter().find(|c| !(0.0..1.0).contains(*c)) {
                return Err(Error::invalid(format!(
                    "point {i} has coordinate {c} outside [0,1)"
                )));
            }
            coords.extend_from_slice(p);
        }
        Ok(PointSet { dim, coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks(self.dim)
    }
}

/// Parses `N d` followed by `N` rows of `d` reals. Blank lines are skipped.
pub fn parse_points(text: &str) -> Result<PointSet> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `N d` header"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    let (n, d) = match head.as_slice() {
        [n, d] => (
            n.parse::<usize>()
                .map_err(|_| Error::parse(hline, format!("bad point count `{n}`")))?,
            d.parse::<usize>()
                .map_err(|_| Error::parse(hline, format!("bad dimension `{d}`")))?,
        ),
        _ => return Err(Error::parse(hline, "header must be `N d`")),
    };
    if n == 0 || d == 0 {
        return Err(Error::parse(hline, "N and d must be positive"));
    }
    let mut points = Vec::with_capacity(n);
    let mut last = hline;
    for (lineno, line) in lines {
        last = lineno;
        if points.len() == n {
            return Err(Error::parse(
                lineno,
                format!("more than the declared {n} points"),
            ));
        }
        let row = line
            .split_whitespace()
            .map(|s| {
                s.parse::<f64>()
                    .ok()
                    .filter(|c| (0.0..1.0).contains(c))
                    .ok_or_else(|| Error::parse(lineno, format!("bad coordinate `{s}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != d {
            return Err(Error::parse(
                lineno,
                format!("expected {d} coordinates, found {}", row.len()),
            ));
        }
        points.push(row);
    }
    if points.len() != n {
        return Err(Error::parse(
            last,
            format!("expected {n} points, found {}", points.len()),
        ));
    }
    PointSet::new(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rows() {
        let u = parse_points("2 2\n0.5 0.25\n\n0.25 0.75\n").unwrap();
        assert_eq!(u.len(), 2);
        assert_eq!(u.dim(), 2);
        assert_eq!(u.point(1), &[0.25, 0.75]);
    }

    #[test]
    fn rejects_bad_input() {
        for (text, line) in [
            ("2 2\n0.5 0.25", 2),
            ("1 2\n0.5 1.0", 2),
            ("1 2\n0.5", 2),
            ("1 2\n0.1 0.1\n0.2 0.2", 3),
            ("0 2", 1),
            ("x 2", 1),
        ] {
            match parse_points(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(PointSet::new(vec![vec![0.1], vec![0.1, 0.2]]).is_err());
        assert!(PointSet::new(vec![vec![-0.1]]).is_err());
        assert!(PointSet::new(vec![]).is_err());
    }
}
