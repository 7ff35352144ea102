use crate::error::{Error, Result};
use crate::lattice::{DistanceKind, DistanceMatrix, RotatedCoord};
use crate::scalar::Scalar;

/// Which way the recursion runs. A backward sweep is a forward sweep over the
/// doubly reversed landscape, so both share one kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    #[inline]
    pub(crate) fn index(self) -> usize {
        match self {
            Self::Forward => 0,
            Self::Backward => 1,
        }
    }
}

/// Energies and Boltzmann factors laid out level by level in the rotated
/// frame, in both orientations, for one temperature.
///
/// Level `t` holds the nodes `x = -h, -h+2, .., h` with
/// `h = min(t, 2N-2-t)`. The backward orientation stores level `2N-2-t`
/// of the original lattice at position `t`, with `x` negated.
#[derive(Clone, Debug)]
pub struct Landscape<F> {
    n: usize,
    temperature: F,
    inv_t: F,
    kind: Option<DistanceKind>,
    offsets: Vec<usize>,
    eps: [Vec<F>; 2],
    boltz: [Vec<F>; 2],
}

impl<F: Scalar> Landscape<F> {
    pub fn new(energy: &DistanceMatrix<F>, temperature: F) -> Result<Self> {
        if !(temperature > F::zero()) || !temperature.is_finite() {
            return Err(Error::InvalidTemperature(temperature.f64()));
        }
        let n = energy.n();
        let levels = 2 * n - 1;
        let mut offsets = Vec::with_capacity(levels + 1);
        let mut acc = 0;
        for t in 0..levels {
            offsets.push(acc);
            acc += half_width(t, n) + 1;
        }
        offsets.push(acc);

        let mut fwd = Vec::with_capacity(acc);
        for t in 0..levels {
            let h = half_width(t, n) as isize;
            for k in 0..=h {
                let x = 2 * k - h;
                let t1 = ((t as isize - x) / 2) as usize;
                let t2 = ((t as isize + x) / 2) as usize;
                fwd.push(energy.get(t1, t2));
            }
        }
        // Reversed orientation: own level t is original level L-1-t, and own
        // index k maps to original index len-1-k. That is the flat array
        // reversed end to end.
        let mut bwd = fwd.clone();
        bwd.reverse();

        let inv_t = F::one() / temperature;
        // Subnormal factors have lost precision; zero sends the node to the
        // log path, which uses the energy directly.
        let factor = |&e: &F| {
            let b = (-e * inv_t).exp();
            if b.is_normal() {
                b
            } else {
                F::zero()
            }
        };
        let boltz_f = fwd.iter().map(factor).collect();
        let boltz_b = bwd.iter().map(factor).collect();
        Ok(Self {
            n,
            temperature,
            inv_t,
            kind: energy.kind(),
            offsets,
            eps: [fwd, bwd],
            boltz: [boltz_f, boltz_b],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn temperature(&self) -> F {
        self.temperature
    }

    pub(crate) fn inv_t(&self) -> F {
        self.inv_t
    }

    pub fn distance_kind(&self) -> Option<DistanceKind> {
        self.kind
    }

    /// Highest level index, `2N - 2`.
    pub fn t_max(&self) -> usize {
        2 * self.n - 2
    }

    #[inline]
    pub(crate) fn level_eps(&self, dir: Direction, t: usize) -> &[F] {
        &self.eps[dir.index()][self.offsets[t]..self.offsets[t + 1]]
    }

    #[inline]
    pub(crate) fn level_boltz(&self, dir: Direction, t: usize) -> &[F] {
        &self.boltz[dir.index()][self.offsets[t]..self.offsets[t + 1]]
    }

    /// Energy at an own-frame node of the given orientation.
    #[inline]
    pub(crate) fn eps_at(&self, dir: Direction, t: usize, x: isize) -> F {
        let h = half_width(t, self.n) as isize;
        self.level_eps(dir, t)[((x + h) / 2) as usize]
    }

    /// Maps a node between the original frame and an orientation's own frame
    /// (the map is an involution).
    #[inline]
    pub(crate) fn to_own(&self, dir: Direction, c: RotatedCoord) -> RotatedCoord {
        match dir {
            Direction::Forward => c,
            Direction::Backward => c.reflect(self.n),
        }
    }

    /// Checks that `c` is a valid lattice node.
    pub fn check(&self, c: RotatedCoord) -> Result<()> {
        crate::lattice::from_rotated(c, self.n).map(|_| ())
    }
}

#[inline]
pub(crate) fn half_width(t: usize, n: usize) -> usize {
    t.min(2 * n - 2 - t)
}
