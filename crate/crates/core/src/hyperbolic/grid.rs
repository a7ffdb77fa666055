//! Quasi-hyperbolic distance as a shortest path on an 8-connected grid.
//!
//! Nodes are the lattice points of a bounding box at spacing
//! `cell = base_cell / 2^depth`. An edge of length `L` joins two member nodes
//! when both lie farther than `L/2` from the boundary, so the straight edge
//! stays inside the region; its weight is `L` times the average of `1/dist`
//! at the two endpoints. Endpoints off the lattice are joined to nearby nodes
//! by straight segments weighted the same way.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

type Membership = Arc<dyn Fn(Complex64) -> bool + Send + Sync>;
type BoundaryDistance = Arc<dyn Fn(Complex64) -> f64 + Send + Sync>;

/// A bounded planar region sampled on a refinable grid.
#[derive(Clone)]
pub struct GridRegion {
    min: Complex64,
    max: Complex64,
    base_cell: f64,
    member: Membership,
    dist: BoundaryDistance,
}

impl fmt::Debug for GridRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridRegion")
            .field("min", &self.min)
            .field("max", &self.max)
            .field("base_cell", &self.base_cell)
            .finish_non_exhaustive()
    }
}

impl GridRegion {
    pub fn new<M, D>(min: Complex64, max: Complex64, base_cell: f64, member: M, dist: D) -> Result<Self>
    where
        M: Fn(Complex64) -> bool + Send + Sync + 'static,
        D: Fn(Complex64) -> f64 + Send + Sync + 'static,
    {
        let side = (max.re - min.re).min(max.im - min.im);
        if !(side > 0.0) {
            return Err(Error::BadParameter("empty bounding box".into()));
        }
        if !(base_cell > 0.0 && base_cell < side / 8.0) {
            return Err(Error::BadParameter(format!(
                "cell size {base_cell} must be below a side / 8 = {}",
                side / 8.0
            )));
        }
        Ok(Self {
            min,
            max,
            base_cell,
            member: Arc::new(member),
            dist: Arc::new(dist),
        })
    }

    /// The unit disk with `dist = 1 − |z|`.
    pub fn unit_disk(base_cell: f64) -> Result<Self> {
        Self::new(
            Complex64::new(-1.0, -1.0),
            Complex64::new(1.0, 1.0),
            base_cell,
            |z| z.norm() < 1.0,
            |z| 1.0 - z.norm(),
        )
    }

    pub fn base_cell(&self) -> f64 {
        self.base_cell
    }

    pub fn cell(&self, depth: u32) -> f64 {
        self.base_cell / 2f64.powi(depth as i32)
    }

    pub fn contains(&self, w: Complex64) -> bool {
        w.re >= self.min.re
            && w.re <= self.max.re
            && w.im >= self.min.im
            && w.im <= self.max.im
            && (self.member)(w)
            && (self.dist)(w) > 0.0
    }

    /// Boundary distance, zero outside the region.
    pub fn boundary_distance(&self, w: Complex64) -> f64 {
        if self.contains(w) {
            (self.dist)(w)
        } else {
            0.0
        }
    }
}

/// Grid shortest-path value with the difference to the next coarser depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QhEstimate {
    pub value: f64,
    pub error: f64,
}

const NEIGHBOURS: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

struct Grid {
    min: Complex64,
    cell: f64,
    nx: usize,
    ny: usize,
    // Boundary distance per node; 0 marks a non-member.
    dist: Vec<f64>,
}

impl Grid {
    fn build(region: &GridRegion, depth: u32) -> Self {
        let cell = region.cell(depth);
        let nx = ((region.max.re - region.min.re) / cell).floor() as usize + 1;
        let ny = ((region.max.im - region.min.im) / cell).floor() as usize + 1;
        let min = region.min;
        let dist: Vec<f64> = (0..nx * ny)
            .into_par_iter()
            .map(|k| region.boundary_distance(min + Complex64::new((k % nx) as f64, (k / nx) as f64) * cell))
            .collect();
        Self {
            min,
            cell,
            nx,
            ny,
            dist,
        }
    }

    fn position(&self, k: usize) -> Complex64 {
        self.min + Complex64::new((k % self.nx) as f64, (k / self.nx) as f64) * self.cell
    }

    // Straight-segment cost from an off-lattice point to nearby nodes.
    fn snap(&self, w: Complex64, dw: f64) -> Vec<(usize, f64)> {
        let fx = (w.re - self.min.re) / self.cell;
        let fy = (w.im - self.min.im) / self.cell;
        for reach in 1..=3i64 {
            let mut out = Vec::new();
            let (cx, cy) = (fx.floor() as i64, fy.floor() as i64);
            for i in cx - reach + 1..=cx + reach {
                for j in cy - reach + 1..=cy + reach {
                    if i < 0 || j < 0 || i >= self.nx as i64 || j >= self.ny as i64 {
                        continue;
                    }
                    let k = j as usize * self.nx + i as usize;
                    let dk = self.dist[k];
                    if dk <= 0.0 {
                        continue;
                    }
                    let len = (self.position(k) - w).norm();
                    if len == 0.0 {
                        out.push((k, 0.0));
                    } else if dw > len / 2.0 && dk > len / 2.0 {
                        out.push((k, len * 0.5 * (1.0 / dw + 1.0 / dk)));
                    }
                }
            }
            if !out.is_empty() {
                return out;
            }
        }
        Vec::new()
    }

    // Dijkstra from weighted sources; stops early once every entry of
    // `stop_after` is settled.
    fn shortest(&self, sources: &[(usize, f64)], stop_after: Option<&[usize]>) -> Vec<f64> {
        let n = self.nx * self.ny;
        let mut value = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        for &(k, c) in sources {
            if c < value[k] {
                value[k] = c;
                heap.push(Reverse((c.to_bits(), k)));
            }
        }
        let mut remaining = stop_after.map(|t| t.len()).unwrap_or(usize::MAX);
        let targets: Vec<bool> = match stop_after {
            Some(t) => {
                let mut v = vec![false; n];
                for &k in t {
                    v[k] = true;
                }
                v
            }
            None => Vec::new(),
        };
        let diag = self.cell * std::f64::consts::SQRT_2;
        while let Some(Reverse((bits, k))) = heap.pop() {
            if done[k] {
                continue;
            }
            done[k] = true;
            if !targets.is_empty() && targets[k] {
                remaining -= 1;
                if remaining == 0 {
                    break;
                }
            }
            let vk = f64::from_bits(bits);
            let dk = self.dist[k];
            let (i, j) = ((k % self.nx) as i64, (k / self.nx) as i64);
            for (s, &(di, dj)) in NEIGHBOURS.iter().enumerate() {
                let (a, b) = (i + di, j + dj);
                if a < 0 || b < 0 || a >= self.nx as i64 || b >= self.ny as i64 {
                    continue;
                }
                let m = b as usize * self.nx + a as usize;
                let dm = self.dist[m];
                let len = if s < 4 { self.cell } else { diag };
                if done[m] || dk <= len / 2.0 || dm <= len / 2.0 {
                    continue;
                }
                let cand = vk + len * 0.5 * (1.0 / dk + 1.0 / dm);
                if cand < value[m] {
                    value[m] = cand;
                    heap.push(Reverse((cand.to_bits(), m)));
                }
            }
        }
        value
    }
}

fn distance_at_depth(region: &GridRegion, w1: Complex64, w2: Complex64, depth: u32) -> Result<f64> {
    let grid = Grid::build(region, depth);
    let s = grid.snap(w1, region.boundary_distance(w1));
    let t = grid.snap(w2, region.boundary_distance(w2));
    if s.is_empty() || t.is_empty() {
        return Err(Error::DisconnectedEndpoints);
    }
    let stop: Vec<usize> = t.iter().map(|&(k, _)| k).collect();
    let value = grid.shortest(&s, Some(&stop));
    let best = t
        .iter()
        .map(|&(k, c)| value[k] + c)
        .fold(f64::INFINITY, f64::min);
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::DisconnectedEndpoints)
    }
}

/// Quasi-hyperbolic distance `k(w1, w2)` at cell size `base_cell / 2^depth`;
/// the error is the change from depth − 1.
pub fn quasihyperbolic_distance(region: &GridRegion, w1: Complex64, w2: Complex64, depth: u32) -> Result<QhEstimate> {
    for w in [w1, w2] {
        if !region.contains(w) {
            return Err(Error::NotInRegion(format!("{w}")));
        }
    }
    if w1 == w2 {
        return Ok(QhEstimate { value: 0.0, error: 0.0 });
    }
    let fine = distance_at_depth(region, w1, w2, depth)?;
    let error = if depth == 0 {
        fine
    } else {
        match distance_at_depth(region, w1, w2, depth - 1) {
            Ok(coarse) => (fine - coarse).abs(),
            Err(_) => fine,
        }
    };
    Ok(QhEstimate { value: fine, error })
}

/// Quasi-hyperbolic distances from one source to every grid node.
pub struct QhField {
    grid: Grid,
    value: Vec<f64>,
}

impl fmt::Debug for QhField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QhField")
            .field("cell", &self.grid.cell)
            .field("nodes", &self.value.len())
            .finish()
    }
}

impl QhField {
    pub fn compute(region: &GridRegion, source: Complex64, depth: u32) -> Result<Self> {
        if !region.contains(source) {
            return Err(Error::NotInRegion(format!("{source}")));
        }
        let grid = Grid::build(region, depth);
        let s = grid.snap(source, region.boundary_distance(source));
        if s.is_empty() {
            return Err(Error::DisconnectedEndpoints);
        }
        let value = grid.shortest(&s, None);
        Ok(Self { grid, value })
    }

    pub fn cell(&self) -> f64 {
        self.grid.cell
    }

    /// Reachable member nodes: (position, boundary distance, k).
    pub fn nodes(&self) -> impl Iterator<Item = (Complex64, f64, f64)> + '_ {
        (0..self.value.len()).filter_map(move |k| {
            let v = self.value[k];
            v.is_finite().then(|| (self.grid.position(k), self.grid.dist[k], v))
        })
    }

    /// `k(source, w)` through the nearest reachable nodes.
    pub fn value_at(&self, region: &GridRegion, w: Complex64) -> Result<f64> {
        if !region.contains(w) {
            return Err(Error::NotInRegion(format!("{w}")));
        }
        let best = self
            .grid
            .snap(w, region.boundary_distance(w))
            .iter()
            .map(|&(k, c)| self.value[k] + c)
            .fold(f64::INFINITY, f64::min);
        if best.is_finite() {
            Ok(best)
        } else {
            Err(Error::DisconnectedEndpoints)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_for_equal_points() {
        let disk = GridRegion::unit_disk(0.2).unwrap();
        assert_eq!(quasihyperbolic_distance(&disk, c(0.0, 0.0), c(0.0, 0.0), 3).unwrap().value, 0.0);
    }

    #[test]
    fn radial_oracle() {
        let disk = GridRegion::unit_disk(0.2).unwrap();
        for &x in &[0.5, 0.9] {
            let k = quasihyperbolic_distance(&disk, c(0.0, 0.0), c(x, 0.0), 6).unwrap();
            let exact = (1.0 / (1.0 - x)).ln();
            assert!((k.value - exact).abs() < 0.02 * exact, "x={x}: {} vs {exact}", k.value);
        }
    }

    #[test]
    fn symmetric_and_triangle() {
        let disk = GridRegion::unit_disk(0.2).unwrap();
        let (a, b, m) = (c(0.3, 0.4), c(-0.6, 0.1), c(0.0, -0.5));
        let ab = quasihyperbolic_distance(&disk, a, b, 5).unwrap();
        let ba = quasihyperbolic_distance(&disk, b, a, 5).unwrap();
        assert!((ab.value - ba.value).abs() <= ab.error.max(ba.error) + 1e-12);
        let am = quasihyperbolic_distance(&disk, a, m, 5).unwrap();
        let mb = quasihyperbolic_distance(&disk, m, b, 5).unwrap();
        let slack = 3.0 * (ab.error + am.error + mb.error);
        assert!(ab.value <= am.value + mb.value + slack);
    }

    #[test]
    fn outside_points_are_rejected() {
        let disk = GridRegion::unit_disk(0.2).unwrap();
        assert!(matches!(
            quasihyperbolic_distance(&disk, c(0.0, 0.0), c(1.5, 0.0), 2),
            Err(Error::NotInRegion(_))
        ));
    }

    #[test]
    fn disconnected_components() {
        // two disks joined by nothing
        let region = GridRegion::new(
            c(-2.0, -1.0),
            c(2.0, 1.0),
            0.2,
            |z| (z - 1.0).norm() < 0.9 || (z + 1.0).norm() < 0.9,
            |z| (0.9 - (z - 1.0).norm()).max(0.9 - (z + 1.0).norm()),
        )
        .unwrap();
        assert!(matches!(
            quasihyperbolic_distance(&region, c(1.0, 0.0), c(-1.0, 0.0), 3),
            Err(Error::DisconnectedEndpoints)
        ));
    }

    #[test]
    fn coarse_cells_are_rejected() {
        assert!(GridRegion::unit_disk(0.5).is_err());
    }

    #[test]
    fn field_matches_pairwise() {
        let disk = GridRegion::unit_disk(0.2).unwrap();
        let field = QhField::compute(&disk, c(0.0, 0.0), 5).unwrap();
        let w = c(0.37, -0.21);
        let direct = quasihyperbolic_distance(&disk, c(0.0, 0.0), w, 5).unwrap().value;
        assert!((field.value_at(&disk, w).unwrap() - direct).abs() < 1e-12);
    }
}
