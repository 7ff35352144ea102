//! Level-by-level Boltzmann partition sweeps.
//!
//! Each level keeps a log scale `S(t)` and one encoded value per node:
//! a positive value `v` is the linear weight `G(t,x) = v * exp(S(t))`, and a
//! non-positive value is the log weight relative to the scale,
//! `ln G(t,x) = v + S(t)`. Weights stay linear while they are above
//! [`Scalar::tiny`] relative to the level maximum, so the common case is a
//! plain three-term sum, and anything that would underflow drops to the exact
//! log-sum-exp path instead of being lost.

use crate::error::{Error, Result};
use crate::lattice::{from_rotated, RotatedCoord};
use crate::scalar::{log_sum_exp3, LogAcc, Scalar};

use super::landscape::{half_width, Direction, Landscape};

/// One level of a partition sweep, in the sweep's own frame.
#[derive(Clone, Debug)]
pub struct Level<F> {
    pub(crate) t: usize,
    pub(crate) x_lo: isize,
    pub(crate) scale: F,
    pub(crate) enc: Vec<F>,
    /// Whether any node is in the log encoding.
    pub(crate) deep: bool,
}

#[inline]
fn lin<F: Scalar>(v: F) -> F {
    if v > F::zero() {
        v
    } else {
        F::zero()
    }
}

#[inline]
fn log_rel<F: Scalar>(v: F) -> F {
    if v > F::zero() {
        v.ln()
    } else {
        v
    }
}

#[inline]
fn is_deep<F: Scalar>(v: F) -> bool {
    v <= F::zero() && v != F::neg_infinity()
}

impl<F: Scalar> Level<F> {
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn x_lo(&self) -> isize {
        self.x_lo
    }

    pub fn x_hi(&self) -> isize {
        self.x_lo + 2 * (self.enc.len() as isize - 1)
    }

    pub fn len(&self) -> usize {
        self.enc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.enc.is_empty()
    }

    /// Encoded value at own-frame `x`, `-inf` outside the level.
    #[inline]
    fn get(&self, x: isize) -> F {
        let d = x - self.x_lo;
        if d < 0 {
            return F::neg_infinity();
        }
        let i = (d / 2) as usize;
        if i < self.enc.len() {
            self.enc[i]
        } else {
            F::neg_infinity()
        }
    }

    /// `ln G(t, x)` at own-frame `x`.
    pub fn log_weight(&self, x: isize) -> Option<F> {
        if (x - self.x_lo).rem_euclid(2) != 0 {
            return None;
        }
        let v = self.get(x);
        (v != F::neg_infinity()).then(|| log_rel(v) + self.scale)
    }

    /// `ln G(t) = ln sum_x G(t, x)`.
    pub fn log_norm(&self) -> F {
        let mut acc = LogAcc::new();
        for &v in &self.enc {
            acc.push(log_rel(v));
        }
        self.scale + acc.value()
    }

    /// Weighted moments over own-frame `[lo, hi]` (clipped to the level).
    ///
    /// The mean lag is accumulated as an offset from the first node of the
    /// interval, so a single-node interval returns its `x` exactly.
    pub(crate) fn moments(&self, eps: &[F], h: isize, lo: isize, hi: isize) -> Option<Moments<F>> {
        let lo = lo.max(self.x_lo);
        let hi = hi.min(self.x_hi());
        if lo > hi {
            return None;
        }
        let i0 = ((lo - self.x_lo) / 2) as usize;
        let i1 = ((hi - self.x_lo) / 2) as usize;
        let e0 = ((lo + h) / 2) as usize;
        let (mut w, mut dx, mut de) = (F::zero(), F::zero(), F::zero());
        for (j, &v) in self.enc[i0..=i1].iter().enumerate() {
            let p = lin(v);
            w = w + p;
            dx = dx + F::of_usize(2 * j) * p;
            de = de + eps[e0 + j] * p;
        }
        if !(w >= interval_floor::<F>(i1 - i0 + 1)) {
            // Every node in the interval is far below the level maximum:
            // redo the sums exactly from the log encoding.
            let logs: Vec<F> = self.enc[i0..=i1].iter().map(|&v| log_rel(v)).collect();
            let m = logs.iter().copied().fold(F::neg_infinity(), F::max);
            w = F::zero();
            dx = F::zero();
            de = F::zero();
            for (j, &l) in logs.iter().enumerate() {
                let p = (l - m).exp();
                w = w + p;
                dx = dx + F::of_usize(2 * j) * p;
                de = de + eps[e0 + j] * p;
            }
        }
        Some(Moments {
            mean_x: F::of_isize(lo) + dx / w,
            mean_eps: de / w,
        })
    }
}

/// Sums of linear weights below this are recomputed in the log domain; deep
/// nodes each contribute less than `tiny`, so above the floor their omission
/// is far below rounding.
#[inline]
pub(crate) fn interval_floor<F: Scalar>(width: usize) -> F {
    F::tiny() * F::of_usize(width.max(1)) / F::epsilon()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Moments<F> {
    pub mean_x: F,
    pub mean_eps: F,
}

/// Streaming sweep from an origin over increasing own-frame levels.
pub(crate) struct Sweep<'a, F> {
    land: &'a Landscape<F>,
    dir: Direction,
    /// Origin in own-frame square coordinates.
    s1: usize,
    s2: usize,
    next_t: usize,
    last_t: usize,
    /// Ring of the last three levels: `[t, t-1, t-2]`.
    ring: [Option<Level<F>>; 3],
    buf_lin: Vec<F>,
    buf_slow: Vec<bool>,
}

impl<'a, F: Scalar> Sweep<'a, F> {
    /// Sweep for `dir` starting at `origin` (original frame), computing levels
    /// up to own-frame level `last_t`.
    pub(crate) fn new(land: &'a Landscape<F>, dir: Direction, origin: RotatedCoord, last_t: usize) -> Result<Self> {
        land.check(origin)?;
        let own = land.to_own(dir, origin);
        let (s1, s2) = from_rotated(own, land.n())?;
        Ok(Self {
            land,
            dir,
            s1,
            s2,
            next_t: own.t,
            last_t: last_t.min(land.t_max()),
            ring: [None, None, None],
            buf_lin: Vec::new(),
            buf_slow: Vec::new(),
        })
    }

    pub(crate) fn next_t(&self) -> usize {
        self.next_t
    }

    pub(crate) fn last_t(&self) -> usize {
        self.last_t
    }

    pub(crate) fn origin_t(&self) -> usize {
        self.s1 + self.s2
    }

    /// Own-frame x-range of the origin's cone at level `t`.
    #[inline]
    pub(crate) fn cone(&self, t: usize) -> (isize, isize) {
        let h = half_width(t, self.land.n()) as isize;
        let t = t as isize;
        let lo = (2 * self.s2 as isize - t).max(-h);
        let hi = (t - 2 * self.s1 as isize).min(h);
        (lo, hi)
    }

    /// Advances one level and returns it, or `None` past `last_t`.
    pub(crate) fn advance(&mut self) -> Option<&Level<F>> {
        if self.next_t > self.last_t || self.next_t < self.origin_t() {
            return None;
        }
        let t = self.next_t;
        self.next_t += 1;
        let recycled = self.ring[2].take();
        self.ring.rotate_right(1);
        let level = if t == self.origin_t() {
            let x = self.s2 as isize - self.s1 as isize;
            let eps = self.land.eps_at(self.dir, t, x);
            let mut enc = recycled.map(|l| l.enc).unwrap_or_default();
            enc.clear();
            enc.push(F::one());
            Level {
                t,
                x_lo: x,
                scale: -eps * self.land.inv_t(),
                enc,
                deep: false,
            }
        } else {
            self.compute_level(t, recycled.map(|l| l.enc).unwrap_or_default())
        };
        self.ring[0] = Some(level);
        self.ring[0].as_ref()
    }

    fn compute_level(&mut self, t: usize, enc: Vec<F>) -> Level<F> {
        match self.compute_linear(t, enc) {
            Ok(level) => level,
            Err(enc) => self.compute_general(t, enc),
        }
    }

    /// Plain linear recursion, for levels whose predecessors hold no
    /// log-encoded node. Hands the buffer back when any weight leaves the
    /// linear range.
    fn compute_linear(&mut self, t: usize, mut enc: Vec<F>) -> std::result::Result<Level<F>, Vec<F>> {
        let land = self.land;
        let p1 = self.ring[1].as_ref().expect("previous level");
        let p2 = self.ring[2].as_ref();
        if p1.deep || p2.is_some_and(|l| l.deep) {
            return Err(enc);
        }
        let r = p2.map_or(F::zero(), |l| (l.scale - p1.scale).exp());
        if !r.is_finite() {
            return Err(enc);
        }
        let h = half_width(t, land.n()) as isize;
        let (lo, hi) = self.cone(t);
        let len = ((hi - lo) / 2 + 1) as usize;
        let e0 = ((lo + h) / 2) as usize;
        let boltz = &land.level_boltz(self.dir, t)[e0..e0 + len];
        let tiny = F::tiny();

        let e1 = &p1.enc[..];
        let off1 = (lo - 1 - p1.x_lo) / 2;
        let (e2, off2): (&[F], isize) = match p2 {
            Some(l) => (&l.enc[..], (lo - l.x_lo) / 2),
            None => (&[], 0),
        };
        #[inline(always)]
        fn at<F: Scalar>(e: &[F], i: isize) -> F {
            // Negative indices wrap to huge values and fail the check.
            e.get(i as usize).copied().unwrap_or(F::zero())
        }
        // Nodes whose three predecessors all lie inside the previous levels.
        let mut ka = (-off1).max(0);
        let mut kb = (e1.len() as isize - 1 - off1).min(len as isize);
        if p2.is_some() {
            ka = ka.max(-off2);
            kb = kb.min(e2.len() as isize - off2);
        }
        let (ka, kb) = if ka < kb { (ka as usize, kb as usize) } else { (len, len) };
        let edge = |k: usize| {
            let i = off1 + k as isize;
            (at(e1, i) + at(e1, i + 1) + at(e2, off2 + k as isize) * r) * boltz[k]
        };
        enc.clear();
        enc.reserve(len);
        enc.extend((0..ka).map(edge));
        if ka < kb {
            let i = (off1 + ka as isize) as usize;
            let a = &e1[i..i + (kb - ka)];
            let b = &e1[i + 1..i + 1 + (kb - ka)];
            let bz = &boltz[ka..kb];
            if p2.is_some() {
                let j = (off2 + ka as isize) as usize;
                let c = &e2[j..j + (kb - ka)];
                enc.extend(
                    a.iter()
                        .zip(b)
                        .zip(c)
                        .zip(bz)
                        .map(|(((&a, &b), &c), &z)| (a + b + c * r) * z),
                );
            } else {
                enc.extend(a.iter().zip(b).zip(bz).map(|((&a, &b), &z)| (a + b) * z));
            }
        }
        enc.extend((kb.max(ka)..len).map(edge));
        let (min, max) = min_max(&enc);
        if !(min >= tiny) || !max.is_finite() {
            return Err(enc);
        }
        let band = tiny.sqrt();
        let mut scale = p1.scale;
        if max > F::one() / band || max < band {
            let shrink = F::one() / max;
            if !(min * shrink >= tiny) {
                return Err(enc);
            }
            for v in enc.iter_mut() {
                *v = *v * shrink;
            }
            scale = scale + max.ln();
        }
        Ok(Level {
            t,
            x_lo: lo,
            scale,
            enc,
            deep: false,
        })
    }

    fn compute_general(&mut self, t: usize, mut enc: Vec<F>) -> Level<F> {
        let land = self.land;
        let n = land.n();
        let h = half_width(t, n) as isize;
        let (lo, hi) = self.cone(t);
        let len = ((hi - lo) / 2 + 1) as usize;
        let eps = land.level_eps(self.dir, t);
        let boltz = land.level_boltz(self.dir, t);
        let inv_t = land.inv_t();
        let tiny = F::tiny();

        let p1 = self.ring[1].as_ref().expect("previous level");
        let p2 = self.ring[2].as_ref();
        let base = p1.scale;
        // Diagonal predecessor weight relative to the previous level's scale.
        let (d2, r) = match p2 {
            Some(l) => {
                let d = l.scale - base;
                (d, d.exp())
            }
            None => (F::neg_infinity(), F::zero()),
        };
        let r_ok = r.is_finite();

        let buf_lin = &mut self.buf_lin;
        let buf_slow = &mut self.buf_slow;
        buf_lin.clear();
        buf_slow.clear();
        buf_lin.reserve(len);
        buf_slow.reserve(len);

        let e0 = ((lo + h) / 2) as usize;
        let mut max_lin = F::zero();
        let mut max_log = F::neg_infinity();
        for k in 0..len {
            let x = lo + 2 * k as isize;
            let a = p1.get(x - 1);
            let b = p1.get(x + 1);
            let c = p2.map_or(F::neg_infinity(), |l| l.get(x));
            let bz = boltz[e0 + k];
            let fast = r_ok && !is_deep(a) && !is_deep(b) && !is_deep(c);
            if fast {
                let val = (lin(a) + lin(b) + lin(c) * r) * bz;
                if val >= tiny && val.is_finite() {
                    max_lin = max_lin.max(val);
                    buf_lin.push(val);
                    buf_slow.push(false);
                    continue;
                }
            }
            let l = log_sum_exp3(log_rel(a), log_rel(b), log_rel(c) + d2) - eps[e0 + k] * inv_t;
            max_log = max_log.max(l);
            buf_lin.push(l);
            buf_slow.push(true);
        }

        let m = if max_lin > F::zero() {
            max_lin.ln().max(max_log)
        } else {
            max_log
        };
        let shrink = (-m).exp();
        let shrink_ok = shrink.is_normal();
        let ln_tiny = tiny.ln();
        let mut deep = false;
        enc.clear();
        enc.extend(buf_lin.iter().zip(buf_slow.iter()).map(|(&v, &slow)| {
            if slow {
                let u = v - m;
                if u >= ln_tiny {
                    u.exp()
                } else {
                    deep = true;
                    u
                }
            } else {
                let s = if shrink_ok { v * shrink } else { (v.ln() - m).exp() };
                if s >= tiny {
                    s
                } else {
                    deep = true;
                    v.ln() - m
                }
            }
        }));
        Level {
            t,
            x_lo: lo,
            scale: base + m,
            enc,
            deep,
        }
    }
}

/// Smallest and largest value; a NaN anywhere makes `min` NaN.
#[inline]
fn min_max<F: Scalar>(v: &[F]) -> (F, F) {
    let mut lo = [F::infinity(); 4];
    let mut hi = [F::zero(); 4];
    let mut nan = false;
    let chunks = v.chunks_exact(4);
    let rest = chunks.remainder();
    for c in chunks {
        for k in 0..4 {
            lo[k] = if c[k] < lo[k] { c[k] } else { lo[k] };
            hi[k] = if c[k] > hi[k] { c[k] } else { hi[k] };
            nan |= c[k].is_nan();
        }
    }
    for &x in rest {
        lo[0] = if x < lo[0] { x } else { lo[0] };
        hi[0] = if x > hi[0] { x } else { hi[0] };
        nan |= x.is_nan();
    }
    let min = lo[0].min(lo[1]).min(lo[2].min(lo[3]));
    let max = hi[0].max(hi[1]).max(hi[2].max(hi[3]));
    (if nan { F::nan() } else { min }, max)
}

/// A complete partition field from one origin, every level retained.
///
/// Levels are stored in the field's own frame; accessors take and return
/// original-frame coordinates.
#[derive(Clone, Debug)]
pub struct PartitionField<'a, F> {
    land: &'a Landscape<F>,
    direction: Direction,
    origin: RotatedCoord,
    levels: Vec<Level<F>>,
}

impl<'a, F: Scalar> PartitionField<'a, F> {
    pub(crate) fn compute(land: &'a Landscape<F>, direction: Direction, origin: RotatedCoord) -> Result<Self> {
        let mut sweep = Sweep::new(land, direction, origin, land.t_max())?;
        let mut levels = Vec::with_capacity(land.t_max() + 1 - sweep.origin_t());
        while let Some(level) = sweep.advance() {
            levels.push(level.clone());
        }
        Ok(Self {
            land,
            direction,
            origin,
            levels,
        })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn origin(&self) -> RotatedCoord {
        self.origin
    }

    pub fn landscape(&self) -> &'a Landscape<F> {
        self.land
    }

    /// Own-frame level `t`, if the field reaches it.
    pub(crate) fn own_level(&self, t: usize) -> Option<&Level<F>> {
        let first = self.levels.first()?.t;
        t.checked_sub(first).and_then(|i| self.levels.get(i))
    }

    fn own_t(&self, t: usize) -> Option<usize> {
        match self.direction {
            Direction::Forward => Some(t),
            Direction::Backward => self.land.t_max().checked_sub(t),
        }
    }

    /// `ln G(t, x)`; `None` for nodes outside the origin's cone.
    pub fn log_weight(&self, c: RotatedCoord) -> Option<F> {
        if c.t > self.land.t_max() {
            return None;
        }
        let own = self.land.to_own(self.direction, c);
        self.own_level(own.t)?.log_weight(own.x)
    }

    /// `ln G(t)`; `None` when no node of level `t` is reachable.
    pub fn log_norm(&self, t: usize) -> Option<F> {
        self.own_level(self.own_t(t)?).map(Level::log_norm)
    }

    /// `G(t, x) / G(t)` over the full (unrestricted) level.
    pub fn occupancy(&self, c: RotatedCoord) -> Option<F> {
        let lw = self.log_weight(c)?;
        Some((lw - self.log_norm(c.t)?).exp())
    }

    /// Reachable nodes of level `t` as `(x, ln G)`, in increasing `x`.
    pub fn nodes(&self, t: usize) -> Vec<(isize, F)> {
        let Some(level) = self.own_t(t).and_then(|ot| self.own_level(ot)) else {
            return Vec::new();
        };
        let mut out: Vec<(isize, F)> = level
            .enc
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let x = level.x_lo + 2 * i as isize;
                let x = match self.direction {
                    Direction::Forward => x,
                    Direction::Backward => -x,
                };
                (x, log_rel(v) + level.scale)
            })
            .collect();
        out.sort_by_key(|&(x, _)| x);
        out
    }

    /// Moments at original level `t` restricted to original `[lo, hi]`.
    /// Means are returned in the original frame.
    pub(crate) fn moments(&self, t: usize, lo: isize, hi: isize) -> Option<Moments<F>> {
        let ot = self.own_t(t)?;
        let level = self.own_level(ot)?;
        let h = half_width(ot, self.land.n()) as isize;
        let eps = self.land.level_eps(self.direction, ot);
        match self.direction {
            Direction::Forward => level.moments(eps, h, lo, hi),
            Direction::Backward => level.moments(eps, h, -hi, -lo).map(|m| Moments {
                mean_x: -m.mean_x,
                mean_eps: m.mean_eps,
            }),
        }
    }
}

/// Checks `end` lies in the forward cone of `start`, both valid nodes.
pub(crate) fn check_reachable<F: Scalar>(land: &Landscape<F>, start: RotatedCoord, end: RotatedCoord) -> Result<((usize, usize), (usize, usize))> {
    let s = from_rotated(start, land.n())?;
    let e = from_rotated(end, land.n())?;
    if e.0 < s.0 || e.1 < s.1 {
        return Err(Error::UnreachableEnd {
            start_t: start.t,
            start_x: start.x,
            end_t: end.t,
            end_x: end.x,
        });
    }
    Ok((s, e))
}

/// Original-frame x-interval of the cone intersection at level `t`.
#[inline]
pub(crate) fn intersection(t: usize, s: (usize, usize), e: (usize, usize)) -> (isize, isize) {
    let t = t as isize;
    let lo = (2 * s.1 as isize - t).max(t - 2 * e.0 as isize);
    let hi = (t - 2 * s.0 as isize).min(2 * e.1 as isize - t);
    (lo, hi)
}
