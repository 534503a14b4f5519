use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Uniform sample points on `[lo, hi]`, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1 {
    lo: f64,
    hi: f64,
    n: usize,
}

impl Grid1 {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::BadGrid(format!("need lo < hi, got [{lo}, {hi}]")));
        }
        if n < 2 {
            return Err(Error::BadGrid(format!("need at least 2 points, got {n}")));
        }
        Ok(Self { lo, hi, n })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }
    pub fn hi(&self) -> f64 {
        self.hi
    }
    pub fn len(&self) -> usize {
        self.n
    }
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }
}

impl fmt::Display for Grid1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.n)
    }
}

/// Parses `lo:hi:n`.
impl FromStr for Grid1 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 3 {
            return Err(Error::BadGrid(format!("expected lo:hi:n, got {s:?}")));
        }
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::BadGrid(format!("bad number {p:?} in {s:?}")))
        };
        let n = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::BadGrid(format!("bad point count in {s:?}")))?;
        Grid1::new(num(parts[0])?, num(parts[1])?, n)
    }
}

/// Tensor grid over two variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2 {
    pub axis1: Grid1,
    pub axis2: Grid1,
}

impl Grid2 {
    pub fn new(axis1: Grid1, axis2: Grid1) -> Self {
        Self { axis1, axis2 }
    }

    pub fn points(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        let a = self.axis1.points();
        let b = self.axis2.points();
        a.into_iter()
            .flat_map(move |u| b.clone().into_iter().map(move |v| [u, v]))
    }
}
