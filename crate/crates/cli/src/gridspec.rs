//! `--grid` values: `lo:hi:n` or comma-separated `name=lo:hi:n` axes.

use std::fmt;
use std::str::FromStr;

use selfdual::numcore::{Grid1, Grid2};

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub name: Option<String>,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec(pub Vec<Axis>);

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let axes = s
            .split(',')
            .map(|part| {
                let (name, range) = match part.split_once('=') {
                    Some((n, r)) => (Some(n.trim().to_string()), r),
                    None => (None, part),
                };
                let fields: Vec<&str> = range.split(':').map(str::trim).collect();
                let [lo, hi, n] = fields[..] else {
                    return Err(format!("axis `{part}` is not lo:hi:n"));
                };
                let num = |v: &str| v.parse::<f64>().map_err(|_| format!("`{v}` is not a number"));
                let axis = Axis {
                    name,
                    lo: num(lo)?,
                    hi: num(hi)?,
                    n: n.parse().map_err(|_| format!("`{n}` is not a point count"))?,
                };
                Grid1::new(axis.lo, axis.hi, axis.n).map_err(|e| e.to_string())?;
                Ok(axis)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self(axes))
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if let Some(n) = &a.name {
                write!(f, "{n}=")?;
            }
            write!(f, "{}:{}:{}", a.lo, a.hi, a.n)?;
        }
        Ok(())
    }
}

impl GridSpec {
    pub fn one(name: &str, lo: f64, hi: f64, n: usize) -> Self {
        Self(vec![Axis { name: Some(name.into()), lo, hi, n }])
    }

    pub fn two(names: [&str; 2], first: (f64, f64, usize), second: (f64, f64, usize)) -> Self {
        Self(vec![
            Axis { name: Some(names[0].into()), lo: first.0, hi: first.1, n: first.2 },
            Axis { name: Some(names[1].into()), lo: second.0, hi: second.1, n: second.2 },
        ])
    }

    /// Relabels unnamed axes and rejects names that do not match.
    fn checked(&self, names: &[&str]) -> Result<Vec<Grid1>, String> {
        if self.0.len() != names.len() {
            return Err(format!("grid `{self}` needs {} axes ({})", names.len(), names.join(", ")));
        }
        self.0
            .iter()
            .zip(names)
            .map(|(a, want)| match &a.name {
                Some(n) if n != want => Err(format!("grid axis `{n}` should be `{want}`")),
                _ => Grid1::new(a.lo, a.hi, a.n).map_err(|e| e.to_string()),
            })
            .collect()
    }

    pub fn grid1(&self, name: &str) -> Result<Grid1, String> {
        Ok(self.checked(&[name])?.remove(0))
    }

    pub fn grid2(&self, names: [&str; 2]) -> Result<Grid2, String> {
        let mut g = self.checked(&names)?;
        let second = g.remove(1);
        Ok(Grid2::new(g.remove(0), second))
    }

    /// Canonical description with the given axis names.
    pub fn describe(&self, names: &[&str]) -> String {
        let named = GridSpec(
            self.0
                .iter()
                .zip(names)
                .map(|(a, n)| Axis { name: Some(n.to_string()), ..a.clone() })
                .collect(),
        );
        named.to_string()
    }
}

/// `lo:hi` pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket(pub f64, pub f64);

impl FromStr for Bracket {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("bracket `{s}` is not lo:hi"))?;
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("`{v}` is not a number"));
        let (lo, hi) = (num(a)?, num(b)?);
        if !(lo < hi) {
            return Err(format!("bracket needs lo < hi, got {lo}:{hi}"));
        }
        Ok(Self(lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_named_and_bare_axes() {
        let g: GridSpec = "xi=0.5:5:200".parse().unwrap();
        assert_eq!(g.grid1("xi").unwrap().len(), 200);
        let g: GridSpec = "0:1:5".parse().unwrap();
        assert_eq!(g.describe(&["y"]), "y=0:1:5");
        let g: GridSpec = "y=0:1:5,t=1:2:3".parse().unwrap();
        let g2 = g.grid2(["y", "t"]).unwrap();
        assert_eq!((g2.axis1.len(), g2.axis2.len()), (5, 3));
        assert!(g.grid2(["x", "t"]).is_err());
        assert!(g.grid1("y").is_err());
    }

    #[test]
    fn rejects_bad_axes() {
        assert!("1:0:5".parse::<GridSpec>().is_err());
        assert!("0:1".parse::<GridSpec>().is_err());
        assert!("0:1:1".parse::<GridSpec>().is_err());
        assert!("0:a:3".parse::<GridSpec>().is_err());
    }

    #[test]
    fn brackets() {
        assert_eq!("-1:0.9".parse::<Bracket>().unwrap(), Bracket(-1.0, 0.9));
        assert!("2:1".parse::<Bracket>().is_err());
    }
}
