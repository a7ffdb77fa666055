//! Static 3-d tree for nearest-neighbour queries.
//!
//! Boundary nets are queried hundreds of thousands of times per scan, so the
//! spherical nets (points on the unit sphere in R³) and the planar nets
//! (z-coordinate zero) both go through this tree.

#[derive(Debug, Clone)]
pub(crate) struct KdTree {
    // Points permuted into implicit-tree order: the median of every
    // subrange sits at its midpoint.
    points: Vec<[f64; 3]>,
    // Original index of every permuted point.
    index: Vec<usize>,
    // Split axis of the node stored at each midpoint.
    axis: Vec<u8>,
    // Bounding box of the subrange whose midpoint is this slot.
    bbox: Vec<[[f64; 3]; 2]>,
}

impl KdTree {
    pub(crate) fn new(points: &[[f64; 3]]) -> Self {
        let mut items: Vec<(usize, [f64; 3])> = points.iter().copied().enumerate().collect();
        let mut axis = vec![0u8; items.len()];
        let mut bbox = vec![[[0.0; 3]; 2]; items.len()];
        build(&mut items, &mut axis, &mut bbox);
        let (index, points) = items.into_iter().unzip();
        Self {
            points,
            index,
            axis,
            bbox,
        }
    }

    #[cfg(test)]
    pub(crate) fn len(&self) -> usize {
        self.points.len()
    }

    /// Nearest stored point to `q`: (Euclidean distance, original index).
    pub(crate) fn nearest(&self, q: [f64; 3]) -> Option<(f64, usize)> {
        if self.points.is_empty() {
            return None;
        }
        let mut best = (f64::INFINITY, usize::MAX);
        self.search(0, self.points.len(), q, &mut best);
        Some((best.0.sqrt(), self.index[best.1]))
    }

    fn search(&self, lo: usize, hi: usize, q: [f64; 3], best: &mut (f64, usize)) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        if box_dist(&self.bbox[mid], q) > best.0 {
            return;
        }
        let p = self.points[mid];
        let d2 = sq_dist(p, q);
        if d2 < best.0 || (d2 == best.0 && mid < best.1) {
            *best = (d2, mid);
        }
        if hi - lo == 1 {
            return;
        }
        let ax = self.axis[mid] as usize;
        let diff = q[ax] - p[ax];
        let (near, far) = if diff < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(near.0, near.1, q, best);
        if diff * diff <= best.0 {
            self.search(far.0, far.1, q, best);
        }
    }
}

fn sq_dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

fn box_dist(b: &[[f64; 3]; 2], q: [f64; 3]) -> f64 {
    (0..3)
        .map(|d| {
            let e = (b[0][d] - q[d]).max(q[d] - b[1][d]).max(0.0);
            e * e
        })
        .sum()
}

fn build(items: &mut [(usize, [f64; 3])], axis: &mut [u8], bbox: &mut [[[f64; 3]; 2]]) {
    if items.is_empty() {
        return;
    }
    if items.len() == 1 {
        bbox[0] = [items[0].1, items[0].1];
        return;
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for (_, p) in items.iter() {
        for d in 0..3 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let ax = (0..3)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
        .unwrap_or(0);
    let mid = items.len() / 2;
    items.select_nth_unstable_by(mid, |a, b| a.1[ax].total_cmp(&b.1[ax]).then(a.0.cmp(&b.0)));
    axis[mid] = ax as u8;
    bbox[mid] = [lo, hi];
    let (left, right) = items.split_at_mut(mid);
    let (axis_left, axis_right) = axis.split_at_mut(mid);
    let (box_left, box_right) = bbox.split_at_mut(mid);
    build(left, axis_left, box_left);
    build(&mut right[1..], &mut axis_right[1..], &mut box_right[1..]);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<[f64; 3]> = (0..2000)
            .map(|_| [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>() * 0.1])
            .collect();
        let tree = KdTree::new(&pts);
        assert_eq!(tree.len(), 2000);
        for _ in 0..500 {
            let q = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
            let brute = pts
                .iter()
                .map(|&p| sq_dist(p, q).sqrt())
                .fold(f64::INFINITY, f64::min);
            let (d, i) = tree.nearest(q).unwrap();
            assert_eq!(d, brute);
            assert_eq!(sq_dist(pts[i], q).sqrt(), d);
        }
    }

    #[test]
    fn empty_tree_has_no_nearest() {
        assert!(KdTree::new(&[]).nearest([0.0; 3]).is_none());
    }
}
