//! Distance landscape between two series and the rotated `(t, x)` frame.
//!
//! Square coordinates `(t1, t2)` index `X(t1)` and `Y(t2)`. The rotated frame
//! uses `t = t1 + t2` (effective time) and `x = t2 - t1` (lag), so a node is
//! valid only when `t + x` is even.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::TimeSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceKind {
    /// `(X(t1) - Y(t2))^2`
    Minus,
    /// `(X(t1) + Y(t2))^2`, for anti-monotonic dependence.
    Plus,
    /// Pointwise minimum of the two.
    #[serde(rename = "min")]
    MinOfBoth,
}

impl DistanceKind {
    #[inline]
    pub fn eval<F: Scalar>(self, x: F, y: F) -> F {
        let minus = (x - y) * (x - y);
        let plus = (x + y) * (x + y);
        match self {
            Self::Minus => minus,
            Self::Plus => plus,
            Self::MinOfBoth => minus.min(plus),
        }
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Minus => "minus",
            Self::Plus => "plus",
            Self::MinOfBoth => "min",
        })
    }
}

impl FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "minus" => Ok(Self::Minus),
            "plus" => Ok(Self::Plus),
            "min" | "min_of_both" | "both" => Ok(Self::MinOfBoth),
            other => Err(Error::InvalidParameter(format!("unknown distance `{other}`"))),
        }
    }
}

/// Dense `N x N` grid of local energies, row `t1`, column `t2`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix<F> {
    n: usize,
    kind: Option<DistanceKind>,
    energies: Vec<F>,
}

impl<F: Scalar> DistanceMatrix<F> {
    pub fn build(x: &TimeSeries<F>, y: &TimeSeries<F>, kind: DistanceKind) -> Result<Self> {
        Self::from_slices(x.values(), y.values(), kind)
    }

    pub fn from_slices(x: &[F], y: &[F], kind: DistanceKind) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        let n = x.len();
        if n == 0 {
            return Err(Error::TooShort {
                required: 1,
                actual: 0,
            });
        }
        let mut energies = Vec::with_capacity(n * n);
        for &xi in x {
            energies.extend(y.iter().map(|&yj| kind.eval(xi, yj)));
        }
        if let Some(index) = energies.iter().position(|e| !e.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            n,
            kind: Some(kind),
            energies,
        })
    }

    /// Wraps an arbitrary landscape (row-major, `n*n` nonnegative entries).
    /// Used for synthetic landscapes and the test oracles.
    pub fn from_raw(n: usize, energies: Vec<F>) -> Result<Self> {
        if n == 0 || energies.len() != n * n {
            return Err(Error::LengthMismatch {
                left: n * n,
                right: energies.len(),
            });
        }
        if let Some(index) = energies.iter().position(|e| !e.is_finite() || *e < F::zero()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            n,
            kind: None,
            energies,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `None` for landscapes supplied directly through [`Self::from_raw`].
    pub fn kind(&self) -> Option<DistanceKind> {
        self.kind
    }

    #[inline]
    pub fn get(&self, t1: usize, t2: usize) -> F {
        self.energies[t1 * self.n + t2]
    }

    /// Energy at a rotated node.
    pub fn at(&self, c: RotatedCoord) -> Result<F> {
        let (t1, t2) = from_rotated(c, self.n)?;
        Ok(self.get(t1, t2))
    }

    pub fn energies(&self) -> &[F] {
        &self.energies
    }

    /// Simultaneous time reversal of both axes: `(t1, t2) -> (N-1-t1, N-1-t2)`.
    pub fn reversed(&self) -> Self {
        let mut energies = self.energies.clone();
        energies.reverse();
        Self {
            n: self.n,
            kind: self.kind,
            energies,
        }
    }

    pub fn transposed(&self) -> Self {
        let n = self.n;
        let mut energies = Vec::with_capacity(n * n);
        for t1 in 0..n {
            for t2 in 0..n {
                energies.push(self.get(t2, t1));
            }
        }
        Self {
            n,
            kind: self.kind,
            energies,
        }
    }

    /// Adds `c` to every entry (kept nonnegative by the caller).
    pub fn shifted(&self, c: F) -> Self {
        Self {
            n: self.n,
            kind: self.kind,
            energies: self.energies.iter().map(|&e| e + c).collect(),
        }
    }

    pub fn scaled(&self, k: F) -> Self {
        Self {
            n: self.n,
            kind: self.kind,
            energies: self.energies.iter().map(|&e| e * k).collect(),
        }
    }

    /// CSV dump, one row per `t1`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for row in self.energies.chunks(self.n) {
            let line: Vec<String> = row.iter().map(|e| format!("{}", e.f64())).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Node of the rotated lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RotatedCoord {
    pub t: usize,
    pub x: isize,
}

impl RotatedCoord {
    pub fn new(t: usize, x: isize) -> Self {
        Self { t, x }
    }

    /// Image under the simultaneous reversal of both axes.
    pub fn reflect(self, n: usize) -> Self {
        Self {
            t: 2 * (n - 1) - self.t,
            x: -self.x,
        }
    }
}

impl fmt::Display for RotatedCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(t={}, x={})", self.t, self.x)
    }
}

pub fn to_rotated(t1: usize, t2: usize, n: usize) -> Result<RotatedCoord> {
    if t1 >= n || t2 >= n {
        return Err(Error::OutOfRange {
            a: t1 as i64,
            b: t2 as i64,
            n,
        });
    }
    Ok(RotatedCoord {
        t: t1 + t2,
        x: t2 as isize - t1 as isize,
    })
}

pub fn from_rotated(c: RotatedCoord, n: usize) -> Result<(usize, usize)> {
    let t = c.t as i64;
    let x = c.x as i64;
    if (t + x).rem_euclid(2) != 0 {
        return Err(Error::ParityViolation { t, x });
    }
    let t1 = (t - x) / 2;
    let t2 = (t + x) / 2;
    if t1 < 0 || t2 < 0 || t1 >= n as i64 || t2 >= n as i64 {
        return Err(Error::OutOfRange { a: t1, b: t2, n });
    }
    Ok((t1 as usize, t2 as usize))
}
