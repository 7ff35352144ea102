use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{DistanceKind, RotatedCoord};
use crate::scalar::Scalar;

use super::field::{check_reachable, intersection, PartitionField};
use super::landscape::Direction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Forward-propagated occupancies only.
    Top,
    /// Average of forward and backward occupancies.
    Tops,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Top => "top",
            Self::Tops => "tops",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "top" => Ok(Self::Top),
            "tops" => Ok(Self::Tops),
            other => Err(Error::InvalidParameter(format!("unknown method `{other}`"))),
        }
    }
}

/// Thermal-average lead-lag trajectory `<x(t)>` between two pinned nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalPath<F> {
    pub temperature: F,
    pub start: RotatedCoord,
    pub end: RotatedCoord,
    /// `<x(t)>` for `t = start.t ..= end.t`.
    pub xs: Vec<F>,
    pub free_energy: F,
    pub method: Method,
    pub distance_kind: Option<DistanceKind>,
    /// Lattice side length `N`.
    pub n: usize,
    /// Number of t-levels averaged into the free energy.
    pub levels: usize,
}

impl<F: Scalar> ThermalPath<F> {
    pub fn x_at(&self, t: usize) -> Option<F> {
        t.checked_sub(self.start.t).and_then(|i| self.xs.get(i)).copied()
    }

    /// `<x(t)>` over every level `0 ..= 2N-2`. Outside its own span the path
    /// runs along the lattice boundary into the corner:
    /// `clamp(start.x, -t, t)` before the start and the mirrored rule after
    /// the end.
    pub fn profile(&self) -> Vec<F> {
        let t_max = 2 * self.n - 2;
        (0..=t_max)
            .map(|t| {
                if t < self.start.t {
                    let r = t as isize;
                    F::of_isize(self.start.x.clamp(-r, r))
                } else if t > self.end.t {
                    let r = (t_max - t) as isize;
                    F::of_isize(self.end.x.clamp(-r, r))
                } else {
                    self.xs[t - self.start.t]
                }
            })
            .collect()
    }
}

/// TOP path: forward occupancies restricted to the nodes that can still reach
/// `end`, renormalized per level.
pub fn top_path<F: Scalar>(fwd: &PartitionField<'_, F>, end: RotatedCoord) -> Result<ThermalPath<F>> {
    if fwd.direction() != Direction::Forward {
        return Err(Error::InvalidParameter("top_path needs a forward field".into()));
    }
    let land = fwd.landscape();
    let start = fwd.origin();
    let (s, e) = check_reachable(land, start, end)?;
    let levels = end.t - start.t + 1;
    let mut xs = Vec::with_capacity(levels);
    let mut sum = F::zero();
    for t in start.t..=end.t {
        let (lo, hi) = intersection(t, s, e);
        let m = fwd.moments(t, lo, hi).expect("cone intersection is never empty");
        xs.push(m.mean_x);
        sum = sum + m.mean_eps;
    }
    Ok(ThermalPath {
        temperature: land.temperature(),
        start,
        end,
        xs,
        free_energy: sum / F::of_usize(levels),
        method: Method::Top,
        distance_kind: land.distance_kind(),
        n: land.n(),
        levels,
    })
}

/// TOPS path: the mean of forward and backward occupancies, each restricted
/// to the cone intersection of `start` and `end` and renormalized per level.
pub fn tops_path<F: Scalar>(
    fwd: &PartitionField<'_, F>,
    bwd: &PartitionField<'_, F>,
    start: RotatedCoord,
    end: RotatedCoord,
) -> Result<ThermalPath<F>> {
    if fwd.direction() != Direction::Forward || bwd.direction() != Direction::Backward {
        return Err(Error::InvalidParameter("tops_path needs a forward and a backward field".into()));
    }
    if fwd.origin() != start || bwd.origin() != end {
        return Err(Error::OriginMismatch);
    }
    let land = fwd.landscape();
    if !std::ptr::eq(land, bwd.landscape()) {
        return Err(Error::InvalidParameter("fields come from different landscapes".into()));
    }
    let (s, e) = check_reachable(land, start, end)?;
    let levels = end.t - start.t + 1;

    let mut fwd_x = Vec::with_capacity(levels);
    let mut fwd_sum = F::zero();
    for t in start.t..=end.t {
        let (lo, hi) = intersection(t, s, e);
        let m = fwd.moments(t, lo, hi).expect("cone intersection is never empty");
        fwd_x.push(m.mean_x);
        fwd_sum = fwd_sum + m.mean_eps;
    }
    // The backward sums run in the backward field's own time order so that
    // reversing the landscape swaps the two accumulations exactly.
    let mut bwd_x = vec![F::zero(); levels];
    let mut bwd_sum = F::zero();
    for t in (start.t..=end.t).rev() {
        let (lo, hi) = intersection(t, s, e);
        let m = bwd.moments(t, lo, hi).expect("cone intersection is never empty");
        bwd_x[t - start.t] = m.mean_x;
        bwd_sum = bwd_sum + m.mean_eps;
    }
    let two = F::of(2.0);
    let xs = fwd_x.iter().zip(&bwd_x).map(|(&a, &b)| (a + b) / two).collect();
    Ok(ThermalPath {
        temperature: land.temperature(),
        start,
        end,
        xs,
        free_energy: (fwd_sum + bwd_sum) / (two * F::of_usize(levels)),
        method: Method::Tops,
        distance_kind: land.distance_kind(),
        n: land.n(),
        levels,
    })
}
