//! Incremental k-d tree over points owned by the caller.
//!
//! The tree stores indices into an external point array and is never
//! rebalanced; roadmap samples arrive in random order, which keeps the depth
//! logarithmic in expectation. Radius queries are exact.

use crate::space::euclidean;

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Node {
    point: u32,
    axis: u16,
    left: u32,
    right: u32,
}

#[derive(Debug, Clone, Default)]
pub struct KdTree {
    dim: usize,
    nodes: Vec<Node>,
}

impl KdTree {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            nodes: Vec::new(),
        }
    }

    /// Inserts point `id`; `points(i)` must return the coordinates of point `i`.
    pub fn insert<'a, F>(&mut self, id: usize, points: F)
    where
        F: Fn(usize) -> &'a [f64],
    {
        let new_idx = self.nodes.len() as u32;
        if self.nodes.is_empty() {
            self.nodes.push(Node {
                point: id as u32,
                axis: 0,
                left: NIL,
                right: NIL,
            });
            return;
        }
        let p = points(id);
        let mut cur = 0usize;
        loop {
            let node = &self.nodes[cur];
            let axis = node.axis as usize;
            let go_left = p[axis] < points(node.point as usize)[axis];
            let next = if go_left { node.left } else { node.right };
            if next == NIL {
                let child_axis = ((axis + 1) % self.dim) as u16;
                let node = &mut self.nodes[cur];
                if go_left {
                    node.left = new_idx;
                } else {
                    node.right = new_idx;
                }
                self.nodes.push(Node {
                    point: id as u32,
                    axis: child_axis,
                    left: NIL,
                    right: NIL,
                });
                return;
            }
            cur = next as usize;
        }
    }

    /// Every stored id with `|points(id) - query| <= radius`, unordered.
    pub fn within<'a, F>(&self, query: &[f64], radius: f64, points: F, out: &mut Vec<usize>)
    where
        F: Fn(usize) -> &'a [f64],
    {
        out.clear();
        if self.nodes.is_empty() {
            return;
        }
        let mut stack = vec![0u32];
        while let Some(idx) = stack.pop() {
            let node = &self.nodes[idx as usize];
            let p = points(node.point as usize);
            if euclidean(p, query) <= radius {
                out.push(node.point as usize);
            }
            let axis = node.axis as usize;
            let diff = query[axis] - p[axis];
            // left holds coordinates < split, right holds >= split
            if diff < 0.0 {
                if node.left != NIL {
                    stack.push(node.left);
                }
                if node.right != NIL && -diff <= radius {
                    stack.push(node.right);
                }
            } else {
                if node.right != NIL {
                    stack.push(node.right);
                }
                if node.left != NIL && diff <= radius {
                    stack.push(node.left);
                }
            }
        }
    }
}
