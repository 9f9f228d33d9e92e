use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::exact::min_quad_over_simplex_with;
use super::hull::OmegaDescriptor;
use crate::error::Result;
use crate::model::{SimplexPoint, SymMatrix};

/// Bounds on `min t'Dt` over `Omega(V)` from simplicial branch and bound.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaBound {
    pub lb: f64,
    /// Smallest value found at a point of `Omega(V)`; `+inf` if none was found.
    pub ub: f64,
    pub argmin: Option<SimplexPoint>,
    pub nodes: usize,
    /// Whether the search closed the gap instead of stopping early.
    pub complete: bool,
}

/// When to stop: once the lower bound exceeds `above` or a point of the set
/// has value below `below`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub below: f64,
    pub above: f64,
    pub max_nodes: usize,
    /// Gap at which a node counts as solved.
    pub gap: f64,
}

struct Node {
    /// Rows are the vertices.
    verts: Vec<Vec<f64>>,
    lb: f64,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.lb == other.lb
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // Reversed so the heap pops the smallest bound first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.lb.total_cmp(&self.lb)
    }
}

/// Minimizes `t'Dt` over `Omega(V)` by splitting the simplex into
/// sub-simplices `S = conv(v_1..v_p)`.
///
/// On each `S` the exact minimum of `lambda'(V'DV)lambda` over the unit
/// simplex bounds the minimum over `S ∩ Omega` from below; when its minimizer
/// lies in `Omega` the node is solved. Sub-simplices whose vertices all lie in
/// the excluded neighbourhood are dropped, which is valid because the
/// neighbourhood is convex. Unsolved nodes are bisected along the longest edge.
pub fn bound_over_omega(
    d: &SymMatrix,
    omega: &OmegaDescriptor,
    tol_feas: f64,
    p_max: usize,
    stop: StopRule,
) -> Result<OmegaBound> {
    let p = d.dim();
    let mut ub = f64::INFINITY;
    let mut argmin: Option<Vec<f64>> = None;
    let mut heap = BinaryHeap::new();
    let mut nodes = 0;
    let root: Vec<Vec<f64>> = (0..p).map(|k| SimplexPoint::vertex(p, k).coords().to_vec()).collect();
    let mut pending = vec![root];

    loop {
        for verts in pending.drain(..) {
            nodes += 1;
            let mut any_inside = false;
            for v in &verts {
                if omega.contains(v, tol_feas)? {
                    any_inside = true;
                    let q = d.quad(v);
                    if q < ub {
                        ub = q;
                        argmin = Some(v.clone());
                    }
                }
            }
            if !any_inside {
                continue;
            }
            let q = restricted(d, &verts);
            let res = min_quad_over_simplex_with(&q, p_max)?;
            let t = combine(&verts, res.argmin.coords());
            if omega.contains(&t, tol_feas)? {
                if res.value < ub {
                    ub = res.value;
                    argmin = Some(t);
                }
                continue;
            }
            if res.value < ub - stop.gap {
                heap.push(Node { verts, lb: res.value });
            }
        }
        let lb = heap.peek().map_or(ub, |n: &Node| n.lb.min(ub));
        let done = heap.is_empty() || ub - lb <= stop.gap;
        if done || ub < stop.below || lb > stop.above || nodes >= stop.max_nodes {
            return Ok(OmegaBound {
                lb,
                ub,
                argmin: argmin.map(SimplexPoint::normalized).transpose()?,
                nodes,
                complete: done,
            });
        }
        let node = heap.pop().expect("heap is nonempty");
        let (i, j) = longest_edge(&node.verts);
        let mid: Vec<f64> = node.verts[i].iter().zip(&node.verts[j]).map(|(a, b)| 0.5 * (a + b)).collect();
        let mut left = node.verts.clone();
        left[i] = mid.clone();
        let mut right = node.verts;
        right[j] = mid;
        pending.push(left);
        pending.push(right);
    }
}

/// `V'DV` for the vertex rows of `verts`.
fn restricted(d: &SymMatrix, verts: &[Vec<f64>]) -> SymMatrix {
    let dv: Vec<Vec<f64>> = verts.iter().map(|v| d.mul_vec(v)).collect();
    let mut q = SymMatrix::zeros(verts.len());
    for a in 0..verts.len() {
        for b in a..verts.len() {
            q.set(a, b, verts[a].iter().zip(&dv[b]).map(|(x, y)| x * y).sum());
        }
    }
    q
}

fn combine(verts: &[Vec<f64>], lambda: &[f64]) -> Vec<f64> {
    let mut t = vec![0.0; verts[0].len()];
    for (v, &l) in verts.iter().zip(lambda) {
        for (tk, vk) in t.iter_mut().zip(v) {
            *tk += l * vk;
        }
    }
    t
}

fn longest_edge(verts: &[Vec<f64>]) -> (usize, usize) {
    let mut best = (0, 1);
    let mut len = -1.0;
    for a in 0..verts.len() {
        for b in a + 1..verts.len() {
            let l: f64 = verts[a].iter().zip(&verts[b]).map(|(x, y)| (x - y).abs()).sum();
            if l > len {
                len = l;
                best = (a, b);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::eval_constraint;
    use crate::oracle::OmegaGrid;

    fn full(max_nodes: usize) -> StopRule {
        StopRule { below: f64::NEG_INFINITY, above: f64::INFINITY, max_nodes, gap: 1e-9 }
    }

    #[test]
    fn e2_omega_minimum() {
        // On Omega = {t_2 >= 1/2}, 2 t_1 t_2 + t_2^2 = t_2 (2 - t_2) is smallest at t_2 = 1/2.
        let d = eval_constraint(&fixtures::e2(), &[1.0]).unwrap();
        let om = OmegaDescriptor::new(vec![SimplexPoint::vertex(2, 0)], 1e-7).unwrap();
        let b = bound_over_omega(&d, &om, 1e-9, 14, full(10_000)).unwrap();
        assert!(b.complete);
        assert!((b.lb - 0.75).abs() < 1e-6 && (b.ub - 0.75).abs() < 1e-6, "{b:?}");
    }

    #[test]
    fn agrees_with_the_grid_bracket() {
        let d = SymMatrix::from_rows(&[vec![1.0, -0.8, 0.3], vec![-0.8, 0.5, -0.2], vec![0.3, -0.2, 0.1]]).unwrap();
        let om = OmegaDescriptor::new(vec![SimplexPoint::barycenter(3)], 1e-7).unwrap();
        let b = bound_over_omega(&d, &om, 1e-9, 14, full(200_000)).unwrap();
        let crate::oracle::OmegaMin::Min(g) =
            OmegaGrid::build(&om, 1.0 / 256.0, 400_000, 1e-9).unwrap().minimize(&d, 14).unwrap()
        else {
            panic!()
        };
        assert!(b.lb <= g.value + 1e-9 && g.value_lb() <= b.ub + 1e-9, "{b:?} {g:?}");
        assert!(b.ub - b.lb < 1e-6);
    }

    #[test]
    fn stops_early_on_a_negative_point() {
        let d = SymMatrix::from_rows(&[vec![-1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        let om = OmegaDescriptor::new(vec![SimplexPoint::vertex(2, 0)], 1e-7).unwrap();
        let stop = StopRule { below: -1e-6, above: 1e-6, max_nodes: 100, gap: 1e-9 };
        let b = bound_over_omega(&d, &om, 1e-9, 14, stop).unwrap();
        assert!(b.ub < -0.4 && b.nodes == 1);
    }
}
