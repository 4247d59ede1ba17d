//! Bounding-volume tree over axis-aligned boxes (points are degenerate boxes).
//!
//! Supports the three queries the complement representations need: nearest
//! item to a point, distance from a box to the item set, and the items that
//! meet a closed ball.

use super::shapes::{lex_cmp, MAX_DIM};

const LEAF_SIZE: usize = 8;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Aabb {
    pub lo: [f64; MAX_DIM],
    pub hi: [f64; MAX_DIM],
}

impl Aabb {
    pub fn from_corner(lo: &[f64], side: f64) -> Self {
        let mut b = Aabb {
            lo: [0.0; MAX_DIM],
            hi: [0.0; MAX_DIM],
        };
        for (i, l) in lo.iter().enumerate() {
            b.lo[i] = *l;
            b.hi[i] = l + side;
        }
        b
    }

    pub fn point(x: &[f64]) -> Self {
        Self::from_corner(x, 0.0)
    }

    fn empty() -> Self {
        Aabb {
            lo: [f64::INFINITY; MAX_DIM],
            hi: [f64::NEG_INFINITY; MAX_DIM],
        }
    }

    fn grow(&mut self, other: &Aabb, dim: usize) {
        for i in 0..dim {
            self.lo[i] = self.lo[i].min(other.lo[i]);
            self.hi[i] = self.hi[i].max(other.hi[i]);
        }
    }

    pub fn point_dist2(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, xi) in x.iter().enumerate() {
            let d = if *xi < self.lo[i] {
                self.lo[i] - xi
            } else if *xi > self.hi[i] {
                xi - self.hi[i]
            } else {
                0.0
            };
            s += d * d;
        }
        s
    }

    pub fn box_dist2(&self, other: &Aabb, dim: usize) -> f64 {
        let mut s = 0.0;
        for i in 0..dim {
            let d = if other.hi[i] < self.lo[i] {
                self.lo[i] - other.hi[i]
            } else if other.lo[i] > self.hi[i] {
                other.lo[i] - self.hi[i]
            } else {
                0.0
            };
            s += d * d;
        }
        s
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .enumerate()
            .all(|(i, xi)| *xi >= self.lo[i] && *xi <= self.hi[i])
    }

    pub fn clamp(&self, x: &[f64]) -> [f64; MAX_DIM] {
        let mut out = [0.0; MAX_DIM];
        for (i, xi) in x.iter().enumerate() {
            out[i] = xi.clamp(self.lo[i], self.hi[i]);
        }
        out
    }
}

#[derive(Clone, Debug)]
enum Node {
    Leaf { bounds: Aabb, start: usize, end: usize },
    Inner { bounds: Aabb, left: usize, right: usize },
}

impl Node {
    fn bounds(&self) -> &Aabb {
        match self {
            Node::Leaf { bounds, .. } | Node::Inner { bounds, .. } => bounds,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct BoxTree {
    dim: usize,
    boxes: Vec<Aabb>,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl BoxTree {
    pub fn build(dim: usize, boxes: Vec<Aabb>) -> Self {
        let mut tree = BoxTree {
            dim,
            order: (0..boxes.len()).collect(),
            boxes,
            nodes: Vec::new(),
        };
        if !tree.boxes.is_empty() {
            let n = tree.boxes.len();
            tree.build_node(0, n);
        }
        tree
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let mut bounds = Aabb::empty();
        for &i in &self.order[start..end] {
            bounds.grow(&self.boxes[i], self.dim);
        }
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { bounds, start, end });
            return id;
        }
        let axis = (0..self.dim)
            .max_by(|&a, &b| {
                (bounds.hi[a] - bounds.lo[a]).total_cmp(&(bounds.hi[b] - bounds.lo[b]))
            })
            .unwrap_or(0);
        let mid = (start + end) / 2;
        let boxes = &self.boxes;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            let ca = boxes[a].lo[axis] + boxes[a].hi[axis];
            let cb = boxes[b].lo[axis] + boxes[b].hi[axis];
            ca.total_cmp(&cb).then(a.cmp(&b))
        });
        // placeholder, patched after children exist
        self.nodes.push(Node::Leaf { bounds, start, end });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Inner { bounds, left, right };
        id
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    /// Nearest item to `x`: (distance, item index, closest point on the item).
    /// Exact distance ties are broken by the lexicographically smallest closest point.
    pub fn nearest(&self, x: &[f64]) -> Option<(f64, usize, [f64; MAX_DIM])> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best: Option<(f64, usize, [f64; MAX_DIM])> = None;
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            let bd = node.bounds().point_dist2(x);
            if let Some((b, _, _)) = best {
                if bd > b {
                    continue;
                }
            }
            match node {
                Node::Leaf { start, end, .. } => {
                    for &i in &self.order[*start..*end] {
                        let d2 = self.boxes[i].point_dist2(x);
                        let cp = self.boxes[i].clamp(x);
                        let better = match &best {
                            None => true,
                            Some((b, _, bcp)) => {
                                d2 < *b || (d2 == *b && lex_cmp(&cp[..self.dim], &bcp[..self.dim]).is_lt())
                            }
                        };
                        if better {
                            best = Some((d2, i, cp));
                        }
                    }
                }
                Node::Inner { left, right, .. } => {
                    let dl = self.nodes[*left].bounds().point_dist2(x);
                    let dr = self.nodes[*right].bounds().point_dist2(x);
                    if dl <= dr {
                        stack.push(*right);
                        stack.push(*left);
                    } else {
                        stack.push(*left);
                        stack.push(*right);
                    }
                }
            }
        }
        best.map(|(d2, i, cp)| (d2.sqrt(), i, cp))
    }

    /// Minimum distance between the query box and any item.
    pub fn box_distance(&self, query: &Aabb) -> f64 {
        if self.nodes.is_empty() {
            return f64::INFINITY;
        }
        let mut best = f64::INFINITY;
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if node.bounds().box_dist2(query, self.dim) >= best {
                continue;
            }
            match node {
                Node::Leaf { start, end, .. } => {
                    for &i in &self.order[*start..*end] {
                        best = best.min(self.boxes[i].box_dist2(query, self.dim));
                    }
                }
                Node::Inner { left, right, .. } => {
                    stack.push(*left);
                    stack.push(*right);
                }
            }
            if best == 0.0 {
                break;
            }
        }
        best.sqrt()
    }

    /// Indices of items meeting the closed ball, in increasing order.
    pub fn in_ball(&self, center: &[f64], radius: f64) -> Vec<usize> {
        let r2 = radius * radius;
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            return out;
        }
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if node.bounds().point_dist2(center) > r2 {
                continue;
            }
            match node {
                Node::Leaf { start, end, .. } => {
                    for &i in &self.order[*start..*end] {
                        if self.boxes[i].point_dist2(center) <= r2 {
                            out.push(i);
                        }
                    }
                }
                Node::Inner { left, right, .. } => {
                    stack.push(*left);
                    stack.push(*right);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn any_contains(&self, x: &[f64]) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if !node.bounds().contains(x) {
                continue;
            }
            match node {
                Node::Leaf { start, end, .. } => {
                    if self.order[*start..*end]
                        .iter()
                        .any(|&i| self.boxes[i].contains(x))
                    {
                        return true;
                    }
                }
                Node::Inner { left, right, .. } => {
                    stack.push(*left);
                    stack.push(*right);
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn nearest_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let boxes: Vec<Aabb> = (0..500)
            .map(|_| {
                let lo = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
                Aabb::from_corner(&lo, rng.gen_range(0.0..0.3))
            })
            .collect();
        let tree = BoxTree::build(2, boxes.clone());
        for _ in 0..200 {
            let x = [rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0)];
            let brute = boxes
                .iter()
                .map(|b| b.point_dist2(&x))
                .fold(f64::INFINITY, f64::min)
                .sqrt();
            let (d, _, _) = tree.nearest(&x).unwrap();
            assert_eq!(d, brute);
            let r = rng.gen_range(0.1..2.0);
            let brute_ball: Vec<usize> = (0..boxes.len())
                .filter(|&i| boxes[i].point_dist2(&x) <= r * r)
                .collect();
            assert_eq!(tree.in_ball(&x, r), brute_ball);
        }
    }
}
