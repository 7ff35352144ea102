//! Boltzmann partition fields over directed lattice paths and the TOP / TOPS
//! thermal-average paths built from them.
//!
//! A directed path moves from `(t1, t2)` to `(t1+1, t2)`, `(t1, t2+1)` or
//! `(t1+1, t2+1)`. In the rotated frame the forward weight obeys
//!
//! ```text
//! G(t, x) = [G(t-1, x-1) + G(t-1, x+1) + G(t-2, x)] * exp(-eps(t, x) / T)
//! ```
//!
//! seeded with `exp(-eps(origin) / T)` at the origin. The backward field is
//! the same recursion run from an end node over the reversed landscape.
//!
//! Occupancies used for a path between `start` and `end` are restricted, at
//! every level, to nodes reachable from `start` and able to reach `end`, then
//! renormalized. This pins the path to both boundary nodes exactly.

mod field;
mod landscape;
mod path;

pub use field::{Level, PartitionField};
pub use landscape::{Direction, Landscape};
pub use path::{top_path, tops_path, Method, ThermalPath};

pub(crate) use field::{check_reachable, interval_floor, Sweep};
pub(crate) use landscape::half_width;

use crate::error::Result;
use crate::lattice::{DistanceMatrix, RotatedCoord};
use crate::scalar::Scalar;

impl<F: Scalar> Landscape<F> {
    /// Sum of Boltzmann factors over all directed paths from `origin`.
    pub fn forward_field(&self, origin: RotatedCoord) -> Result<PartitionField<'_, F>> {
        PartitionField::compute(self, Direction::Forward, origin)
    }

    /// Sum of Boltzmann factors over all directed paths into `origin`
    /// (the path's end node), propagated towards the lattice origin.
    pub fn backward_field(&self, origin: RotatedCoord) -> Result<PartitionField<'_, F>> {
        PartitionField::compute(self, Direction::Backward, origin)
    }

    pub fn top_path(&self, start: RotatedCoord, end: RotatedCoord) -> Result<ThermalPath<F>> {
        check_reachable(self, start, end)?;
        top_path(&self.forward_field(start)?, end)
    }

    pub fn tops_path(&self, start: RotatedCoord, end: RotatedCoord) -> Result<ThermalPath<F>> {
        check_reachable(self, start, end)?;
        let fwd = self.forward_field(start)?;
        let bwd = self.backward_field(end)?;
        tops_path(&fwd, &bwd, start, end)
    }

    pub fn path(&self, method: Method, start: RotatedCoord, end: RotatedCoord) -> Result<ThermalPath<F>> {
        match method {
            Method::Top => self.top_path(start, end),
            Method::Tops => self.tops_path(start, end),
        }
    }
}

/// One-shot helper: builds the landscape at `temperature` and the path.
pub fn thermal_path<F: Scalar>(
    energy: &DistanceMatrix<F>,
    temperature: F,
    method: Method,
    start: RotatedCoord,
    end: RotatedCoord,
) -> Result<ThermalPath<F>> {
    Landscape::new(energy, temperature)?.path(method, start, end)
}
