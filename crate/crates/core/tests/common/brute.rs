//! Exhaustive path enumeration on small lattices.
//!
//! Occupancy at a node is the Boltzmann weight of every directed partial path
//! from the start to that node (forward) or from that node to the end
//! (backward), restricted to nodes that lie on some start-to-end path.

use toplag::{DistanceMatrix, Method};

pub struct BrutePath {
    pub xs: Vec<f64>,
    pub free_energy: f64,
}

const MOVES: [(usize, usize); 3] = [(1, 0), (0, 1), (1, 1)];

/// Sum of `exp(-E/T)` over all directed paths from `a` to `b`, both ends
/// included in `E`.
fn weight_between(m: &DistanceMatrix, temp: f64, a: (usize, usize), b: (usize, usize)) -> f64 {
    fn walk(m: &DistanceMatrix, temp: f64, at: (usize, usize), b: (usize, usize), energy: f64, out: &mut f64) {
        let energy = energy + m.get(at.0, at.1);
        if at == b {
            *out += (-energy / temp).exp();
            return;
        }
        for (d1, d2) in MOVES {
            let next = (at.0 + d1, at.1 + d2);
            if next.0 <= b.0 && next.1 <= b.1 {
                walk(m, temp, next, b, energy, out);
            }
        }
    }
    if a.0 > b.0 || a.1 > b.1 {
        return 0.0;
    }
    let mut out = 0.0;
    walk(m, temp, a, b, 0.0, &mut out);
    out
}

pub fn brute_path(m: &DistanceMatrix, temp: f64, method: Method, start: (usize, usize), end: (usize, usize)) -> BrutePath {
    let n = m.n();
    let (ts, te) = (start.0 + start.1, end.0 + end.1);
    let mut fwd_x = Vec::new();
    let mut bwd_x = Vec::new();
    let mut fwd_e = 0.0;
    let mut bwd_e = 0.0;
    for t in ts..=te {
        let nodes: Vec<(usize, usize)> = (0..n)
            .filter_map(|t1| t.checked_sub(t1).filter(|&t2| t2 < n).map(|t2| (t1, t2)))
            .filter(|&(t1, t2)| t1 >= start.0 && t2 >= start.1 && t1 <= end.0 && t2 <= end.1)
            .collect();
        let moments = |w: &dyn Fn((usize, usize)) -> f64| {
            let ws: Vec<f64> = nodes.iter().map(|&c| w(c)).collect();
            let z: f64 = ws.iter().sum();
            let mx = nodes.iter().zip(&ws).map(|(&(a, b), w)| (b as f64 - a as f64) * w).sum::<f64>() / z;
            let me = nodes.iter().zip(&ws).map(|(&(a, b), w)| m.get(a, b) * w).sum::<f64>() / z;
            (mx, me)
        };
        let (fx, fe) = moments(&|c| weight_between(m, temp, start, c));
        fwd_x.push(fx);
        fwd_e += fe;
        let (bx, be) = moments(&|c| weight_between(m, temp, c, end));
        bwd_x.push(bx);
        bwd_e += be;
    }
    let levels = (te - ts + 1) as f64;
    match method {
        Method::Top => BrutePath {
            xs: fwd_x,
            free_energy: fwd_e / levels,
        },
        Method::Tops => BrutePath {
            xs: fwd_x.iter().zip(&bwd_x).map(|(a, b)| (a + b) / 2.0).collect(),
            free_energy: (fwd_e + bwd_e) / (2.0 * levels),
        },
    }
}
