//! Boundary-node enumeration and minimum free-energy path selection.
//!
//! Every start node gets one forward sweep and every end node one backward
//! sweep; a pair's free energy is assembled from the per-level energy means
//! those sweeps produce under the pair's cone restriction. That is
//! `2(2m+1)` sweeps for `(2m+1)^2` pairs.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{to_rotated, DistanceMatrix, RotatedCoord};
use crate::scalar::Scalar;
use crate::thermal::{
    check_reachable, half_width, interval_floor, Direction, Landscape, Level, Method, Sweep,
    ThermalPath,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryScheme {
    /// Starts on the `t1 = 0` / `t2 = 0` axes at offsets `0..=m`, ends
    /// mirrored at the far corner: `2m+1` nodes each.
    Axes,
    /// Every node `(i1, i2)` with `0 <= i1, i2 <= m` near each corner:
    /// `(m+1)^2` nodes each.
    CornerGrid,
}

impl fmt::Display for BoundaryScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Axes => "axes",
            Self::CornerGrid => "corner-grid",
        })
    }
}

impl FromStr for BoundaryScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "axes" => Ok(Self::Axes),
            "corner-grid" | "grid" => Ok(Self::CornerGrid),
            other => Err(Error::InvalidParameter(format!("unknown boundary scheme `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundarySpec {
    pub max_offset: usize,
    pub scheme: BoundaryScheme,
}

impl BoundarySpec {
    pub fn axes(max_offset: usize) -> Self {
        Self {
            max_offset,
            scheme: BoundaryScheme::Axes,
        }
    }
}

impl Default for BoundarySpec {
    fn default() -> Self {
        Self::axes(30)
    }
}

/// Start nodes and end nodes, in rotated coordinates.
pub fn enumerate_boundaries(n: usize, spec: BoundarySpec) -> Result<(Vec<RotatedCoord>, Vec<RotatedCoord>)> {
    let m = spec.max_offset;
    if n == 0 || m > n - 1 {
        return Err(Error::OffsetTooLarge {
            offset: m,
            limit: n.saturating_sub(1),
        });
    }
    let mut starts = Vec::new();
    match spec.scheme {
        BoundaryScheme::Axes => {
            starts.push(to_rotated(0, 0, n)?);
            for i in 1..=m {
                starts.push(to_rotated(0, i, n)?);
                starts.push(to_rotated(i, 0, n)?);
            }
        }
        BoundaryScheme::CornerGrid => {
            for i1 in 0..=m {
                for i2 in 0..=m {
                    starts.push(to_rotated(i1, i2, n)?);
                }
            }
        }
    }
    let ends = starts.iter().map(|s| s.reflect(n)).collect();
    Ok((starts, ends))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairEnergy<F> {
    pub start: RotatedCoord,
    pub end: RotatedCoord,
    pub free_energy: F,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSelection<F> {
    pub best: ThermalPath<F>,
    pub scanned: usize,
    /// Start-major, in enumeration order; unreachable pairs are left out.
    pub energies: Vec<PairEnergy<F>>,
}

impl<F: Scalar> PathSelection<F> {
    pub fn min_energy(&self) -> F {
        self.energies
            .iter()
            .map(|e| e.free_energy)
            .fold(F::infinity(), F::min)
    }
}

pub fn select_best<F: Scalar>(
    energy: &DistanceMatrix<F>,
    temperature: F,
    spec: BoundarySpec,
    method: Method,
) -> Result<PathSelection<F>> {
    let land = Landscape::new(energy, temperature)?;
    select_best_in(&land, spec, method)
}

/// Linear weight and weighted energy summed over `enc[a..b]`.
#[inline]
fn block_sum<F: Scalar>(enc: &[F], eps: &[F]) -> (F, F) {
    let mut w = [F::zero(); 4];
    let mut e = [F::zero(); 4];
    let chunks = enc.chunks_exact(4).zip(eps.chunks_exact(4));
    let (rest_v, rest_e) = (enc.chunks_exact(4).remainder(), eps.chunks_exact(4).remainder());
    for (v, x) in chunks {
        for k in 0..4 {
            let p = if v[k] > F::zero() { v[k] } else { F::zero() };
            w[k] = w[k] + p;
            e[k] = e[k] + x[k] * p;
        }
    }
    for (&v, &x) in rest_v.iter().zip(rest_e) {
        let p = if v > F::zero() { v } else { F::zero() };
        w[0] = w[0] + p;
        e[0] = e[0] + x * p;
    }
    ((w[0] + w[1]) + (w[2] + w[3]), (e[0] + e[1]) + (e[2] + e[3]))
}

/// A sweep's view of one target: cone-intersection parameters plus the
/// target's slot in the output row.
#[derive(Clone, Copy)]
struct Target {
    slot: usize,
    t: usize,
    /// Cone intersection at level `t` is
    /// `[max(lo_a - t, t - lo_b), min(t - hi_a, hi_b - t)]`.
    lo_a: isize,
    lo_b: isize,
    hi_a: isize,
    hi_b: isize,
}

impl Target {
    fn new(slot: usize, t: usize, s: (usize, usize), e: (usize, usize)) -> Self {
        Self {
            slot,
            t,
            lo_a: 2 * s.1 as isize,
            lo_b: 2 * e.0 as isize,
            hi_a: 2 * s.0 as isize,
            hi_b: 2 * e.1 as isize,
        }
    }
}

/// Suffix query waiting for the level total.
struct Pending<F> {
    slot: usize,
    i0: usize,
    lo: isize,
    hi: isize,
    w: F,
    e: F,
}

/// Adds each active target's mean energy at `level` into `acc`.
///
/// A single accumulating walk from the low edge serves every interval: one
/// touching the low edge reads the running sums at its upper cut, one
/// touching the high edge is the level total minus the running sums below
/// its lower cut. `by_e2` and `by_e1` order the targets so that both kinds of
/// cut are monotone along the walk.
#[allow(clippy::too_many_arguments)]
fn accumulate_level<F: Scalar>(
    level: &Level<F>,
    eps: &[F],
    h: isize,
    by_e2: &[Target],
    by_e1: &[Target],
    pending: &mut Vec<Pending<F>>,
    direct: &mut Vec<(usize, isize, isize)>,
    acc: &mut [F],
) {
    let t = level.t();
    let (x_lo, x_hi) = (level.x_lo(), level.x_hi());
    let len = level.len();
    let e0 = ((x_lo + h) / 2) as usize;
    let win = &eps[e0..e0 + len];
    let enc = &level.enc[..];
    // One conservative floor for the whole level.
    let floor = interval_floor::<F>(len);
    let exact = |lo: isize, hi: isize| level.moments(eps, h, lo, hi).expect("non-empty interval").mean_eps;
    let t_i = t as isize;
    // Clipped interval, `None` once the target lies behind the sweep.
    let interval = |tg: &Target| {
        if tg.t < t {
            return None;
        }
        let lo = (tg.lo_a - t_i).max(t_i - tg.lo_b).max(x_lo);
        let hi = (t_i - tg.hi_a).min(tg.hi_b - t_i).min(x_hi);
        Some((lo, hi))
    };

    pending.clear();
    direct.clear();
    // Upper cuts of low-edge intervals, ascending.
    let mut lows = by_e2.iter().filter_map(|tg| {
        let (lo, hi) = interval(tg)?;
        (lo == x_lo).then(|| (((hi - x_lo) / 2) as usize, tg.slot, lo, hi))
    });
    // Lower cuts of high-edge intervals, ascending; intervals touching
    // neither edge (corner-grid scheme only) are summed directly.
    let mut highs = by_e1.iter().rev().filter_map(|tg| {
        let (lo, hi) = interval(tg)?;
        if lo == x_lo {
            return None;
        }
        if hi < x_hi {
            direct.push((tg.slot, lo, hi));
            return None;
        }
        Some((((lo - x_lo) / 2) as usize, tg.slot, lo, hi))
    });

    let (mut pos, mut w, mut e) = (0usize, F::zero(), F::zero());
    let mut advance = |to: usize, w: &mut F, e: &mut F| {
        if to > pos {
            let (bw, be) = block_sum(&enc[pos..to], &win[pos..to]);
            *w = *w + bw;
            *e = *e + be;
            pos = to;
        }
    };
    let mut next_low = lows.next();
    let mut next_high = highs.next();
    loop {
        match (next_low, next_high) {
            (Some(l), h2) if h2.is_none_or(|hq| l.0 < hq.0) => {
                let (i1, slot, lo, hi) = l;
                advance(i1 + 1, &mut w, &mut e);
                acc[slot] = acc[slot]
                    + if w >= floor {
                        e / w
                    } else {
                        exact(lo, hi)
                    };
                next_low = lows.next();
            }
            (_, Some((i0, slot, lo, hi))) => {
                advance(i0, &mut w, &mut e);
                pending.push(Pending { slot, i0, lo, hi, w, e });
                next_high = highs.next();
            }
            (None, None) => break,
            (Some(_), None) => unreachable!(),
        }
    }
    if !pending.is_empty() {
        advance(len, &mut w, &mut e);
        let sixteenth = w / F::of(16.0);
        for p in pending.iter() {
            let sw = w - p.w;
            let value = if sw >= sixteenth && sw >= floor {
                (e - p.e) / sw
            } else {
                let (bw, be) = block_sum(&enc[p.i0..], &win[p.i0..]);
                if bw >= floor {
                    be / bw
                } else {
                    exact(p.lo, p.hi)
                }
            };
            acc[p.slot] = acc[p.slot] + value;
        }
    }

    for &(slot, lo, hi) in direct.iter() {
        acc[slot] = acc[slot] + exact(lo, hi);
    }
}

/// Sweeps advanced together level by level, so one level of the landscape
/// is reused from cache across the whole group.
const LOCKSTEP: usize = 16;

struct OriginState<'a, F> {
    sweep: Sweep<'a, F>,
    by_e2: Vec<Target>,
    by_e1: Vec<Target>,
    acc: Vec<F>,
}

/// For every origin in `origins` (swept in `dir`), the per-pair sum over
/// levels of the restricted mean energy against each node of `targets`.
/// Pairs where the target is unreachable get `NaN`.
fn sweep_sums<F: Scalar>(
    land: &Landscape<F>,
    dir: Direction,
    origins: &[RotatedCoord],
    targets: &[RotatedCoord],
) -> Result<Vec<Vec<F>>> {
    let n = land.n();
    let prepare = |origin: RotatedCoord| -> Result<(Option<OriginState<'_, F>>, Vec<F>)> {
        // Everything below runs in the sweep's own frame.
        let o = land.to_own(dir, origin);
        let mut by_e2: Vec<Target> = targets
            .iter()
            .enumerate()
            .filter_map(|(slot, &tg)| {
                let tg = land.to_own(dir, tg);
                check_reachable(land, o, tg).ok().map(|(s, e)| Target::new(slot, tg.t, s, e))
            })
            .collect();
        let mut acc = vec![F::nan(); targets.len()];
        let Some(last_t) = by_e2.iter().map(|tg| tg.t).max() else {
            return Ok((None, acc));
        };
        for tg in &by_e2 {
            acc[tg.slot] = F::zero();
        }
        by_e2.sort_by_key(|tg| (tg.hi_b, tg.slot));
        let mut by_e1 = by_e2.clone();
        by_e1.sort_by_key(|tg| (tg.lo_b, tg.slot));
        let sweep = Sweep::new(land, dir, origin, last_t)?;
        Ok((Some(OriginState { sweep, by_e2, by_e1, acc }), Vec::new()))
    };
    let groups: Vec<Vec<Vec<F>>> = origins
        .par_chunks(LOCKSTEP)
        .map(|chunk| -> Result<Vec<Vec<F>>> {
            let mut out: Vec<Option<Vec<F>>> = Vec::with_capacity(chunk.len());
            let mut states = Vec::new();
            for &origin in chunk {
                let (state, empty) = prepare(origin)?;
                match state {
                    Some(st) => {
                        out.push(None);
                        states.push((out.len() - 1, st));
                    }
                    None => out.push(Some(empty)),
                }
            }
            let (mut pending, mut direct) = (Vec::new(), Vec::new());
            let first = states.iter().map(|(_, st)| st.sweep.origin_t()).min().unwrap_or(0);
            let last = states.iter().map(|(_, st)| st.sweep.last_t()).max().unwrap_or(0);
            for t in first..=last {
                for (_, st) in states.iter_mut() {
                    if st.sweep.next_t() != t || t > st.sweep.last_t() {
                        continue;
                    }
                    let level = st.sweep.advance().expect("level within range");
                    let h = half_width(t, n) as isize;
                    accumulate_level(
                        level,
                        land.level_eps(dir, t),
                        h,
                        &st.by_e2,
                        &st.by_e1,
                        &mut pending,
                        &mut direct,
                        &mut st.acc,
                    );
                }
            }
            for (i, st) in states {
                out[i] = Some(st.acc);
            }
            Ok(out.into_iter().map(|a| a.expect("every origin filled")).collect())
        })
        .collect::<Result<_>>()?;
    Ok(groups.into_iter().flatten().collect())
}

/// Same as [`select_best`] against a prepared landscape.
pub fn select_best_in<F: Scalar>(land: &Landscape<F>, spec: BoundarySpec, method: Method) -> Result<PathSelection<F>> {
    let (starts, ends) = enumerate_boundaries(land.n(), spec)?;
    let fwd = sweep_sums(land, Direction::Forward, &starts, &ends)?;
    let bwd = match method {
        Method::Tops => Some(sweep_sums(land, Direction::Backward, &ends, &starts)?),
        Method::Top => None,
    };
    let energies = tabulate(&starts, &ends, &fwd, bwd.as_deref());
    let best = arg_min(&energies)?;
    let path = land.path(method, best.start, best.end)?;
    Ok(PathSelection {
        best: path,
        scanned: energies.len(),
        energies,
    })
}

/// Minimum free energy over the boundary pairs for both methods, as
/// `(top, tops)`, without reconstructing the winning paths.
pub fn min_free_energies<F: Scalar>(land: &Landscape<F>, spec: BoundarySpec) -> Result<(F, F)> {
    let (starts, ends) = enumerate_boundaries(land.n(), spec)?;
    let fwd = sweep_sums(land, Direction::Forward, &starts, &ends)?;
    let bwd = sweep_sums(land, Direction::Backward, &ends, &starts)?;
    let top = arg_min(&tabulate(&starts, &ends, &fwd, None))?.free_energy;
    let tops = arg_min(&tabulate(&starts, &ends, &fwd, Some(&bwd)))?.free_energy;
    Ok((top, tops))
}

fn tabulate<F: Scalar>(
    starts: &[RotatedCoord],
    ends: &[RotatedCoord],
    fwd: &[Vec<F>],
    bwd: Option<&[Vec<F>]>,
) -> Vec<PairEnergy<F>> {
    let two = F::of(2.0);
    let mut energies = Vec::with_capacity(starts.len() * ends.len());
    for (i, &start) in starts.iter().enumerate() {
        for (j, &end) in ends.iter().enumerate() {
            let f = fwd[i][j];
            if f.is_nan() {
                continue;
            }
            let levels = F::of_usize(end.t - start.t + 1);
            let free_energy = match bwd {
                Some(b) => (f + b[j][i]) / (two * levels),
                None => f / levels,
            };
            energies.push(PairEnergy { start, end, free_energy });
        }
    }
    energies
}

fn arg_min<F: Scalar>(energies: &[PairEnergy<F>]) -> Result<PairEnergy<F>> {
    energies
        .iter()
        .filter(|e| !e.free_energy.is_nan())
        .min_by(|a, b| {
            a.free_energy
                .partial_cmp(&b.free_energy)
                .expect("finite energies")
                .then_with(|| tie_key(a).cmp(&tie_key(b)))
        })
        .copied()
        .ok_or_else(|| Error::InvalidParameter("no reachable boundary pair".into()))
}

/// Least-offset, most symmetric boundary first.
fn tie_key<F>(e: &PairEnergy<F>) -> (usize, usize, isize, isize) {
    (
        e.start.x.unsigned_abs(),
        e.end.x.unsigned_abs(),
        e.start.x,
        e.end.x,
    )
}
