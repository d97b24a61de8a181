//! Reduction compilers: orthogonal layout of small constraint graphs and
//! the compilers that turn them into puzzle boards built from certified
//! tile assets.

pub mod assets;
pub mod ncl_compile;

use std::collections::BTreeSet;

use thiserror::Error;

/// A coarse grid cell.
pub type Coarse = (i32, i32);

/// Orthogonal embedding of a small graph: vertex cells plus axis-aligned
/// routes. Routes are sequences of coarse cells from one endpoint's cell to
/// the other's, inclusive; interior cells are pairwise disjoint across
/// routes and disjoint from vertex cells.
#[derive(Debug, Clone)]
pub struct OrthogonalLayout {
    pub rows: i32,
    pub cols: i32,
    pub vertices: Vec<Coarse>,
    pub routes: Vec<Vec<Coarse>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayoutError {
    #[error("no orthogonal layout found within the helper's grid budget")]
    LayoutNotFound,
    #[error("layout helper supports at most {0} vertices")]
    TooManyVertices(usize),
}

/// Per-vertex routing constraint: pairs of edges that must leave the
/// vertex on opposite sides (used for AND vertices, whose two red edges
/// must attach on opposite sides of the tile).
#[derive(Debug, Clone, Default)]
pub struct LayoutConstraints {
    pub opposite_pairs: Vec<(usize, usize, usize)>, // (vertex, edge a, edge b)
}

const MAX_LAYOUT_VERTICES: usize = 8;

fn neighbors(c: Coarse) -> [Coarse; 4] {
    [(c.0 - 1, c.1), (c.0 + 1, c.1), (c.0, c.1 - 1), (c.0, c.1 + 1)]
}

fn direction_of(from: Coarse, to: Coarse) -> usize {
    // 0 = north, 1 = south, 2 = west, 3 = east
    if to.0 < from.0 {
        0
    } else if to.0 > from.0 {
        1
    } else if to.1 < from.1 {
        2
    } else {
        3
    }
}

/// Deterministic exhaustive placement with breadth-first edge routing.
/// Fails cleanly when no routing is found at the attempted grid sizes.
pub fn layout_graph(
    num_vertices: usize,
    edges: &[(usize, usize)],
    constraints: &LayoutConstraints,
) -> Result<OrthogonalLayout, LayoutError> {
    if num_vertices > MAX_LAYOUT_VERTICES {
        return Err(LayoutError::TooManyVertices(MAX_LAYOUT_VERTICES));
    }
    if num_vertices == 0 {
        return Ok(OrthogonalLayout { rows: 1, cols: 1, vertices: vec![], routes: vec![] });
    }
    for size in 2..=7i32 {
        let mut placement: Vec<Coarse> = Vec::new();
        if place_and_route(size, num_vertices, edges, constraints, &mut placement) {
            // placement now holds vertices; re-run routing to collect routes.
            let routes = route_all(size, &placement, edges, constraints)
                .expect("routing succeeded during search");
            return Ok(OrthogonalLayout {
                rows: size,
                cols: size,
                vertices: placement,
                routes,
            });
        }
    }
    Err(LayoutError::LayoutNotFound)
}

fn place_and_route(
    size: i32,
    num_vertices: usize,
    edges: &[(usize, usize)],
    constraints: &LayoutConstraints,
    placement: &mut Vec<Coarse>,
) -> bool {
    if placement.len() == num_vertices {
        return route_all(size, placement, edges, constraints).is_some();
    }
    // Symmetry pruning: the first vertex only explores the upper-left
    // quadrant.
    let limit = if placement.is_empty() { (size + 1) / 2 } else { size };
    for r in 0..limit {
        for c in 0..if placement.is_empty() { (size + 1) / 2 } else { size } {
            let cell = (r, c);
            if placement.contains(&cell) {
                continue;
            }
            placement.push(cell);
            if place_and_route(size, num_vertices, edges, constraints, placement) {
                return true;
            }
            placement.pop();
        }
    }
    false
}

/// Route all edges with vertex-disjoint interiors, trying the constrained
/// side assignments. Greedy shortest-first per edge order with backtracking
/// over start/end sides.
fn route_all(
    size: i32,
    placement: &[Coarse],
    edges: &[(usize, usize)],
    constraints: &LayoutConstraints,
) -> Option<Vec<Vec<Coarse>>> {
    let mut used: BTreeSet<Coarse> = placement.iter().copied().collect();
    let mut side_used: Vec<[bool; 4]> = vec![[false; 4]; placement.len()];
    let mut routes: Vec<Vec<Coarse>> = Vec::new();
    if route_rec(size, placement, edges, constraints, 0, &mut used, &mut side_used, &mut routes) {
        Some(routes)
    } else {
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn route_rec(
    size: i32,
    placement: &[Coarse],
    edges: &[(usize, usize)],
    constraints: &LayoutConstraints,
    idx: usize,
    used: &mut BTreeSet<Coarse>,
    side_used: &mut Vec<[bool; 4]>,
    routes: &mut Vec<Vec<Coarse>>,
) -> bool {
    if idx == edges.len() {
        return constraints_ok(edges, constraints, routes, placement);
    }
    let (u, v) = edges[idx];
    // Enumerate side choices for both endpoints.
    for su in 0..4usize {
        if side_used[u][su] {
            continue;
        }
        for sv in 0..4usize {
            if side_used[v][sv] || (u == v && su == sv) {
                continue;
            }
            if let Some(path) = bfs_route(size, placement[u], su, placement[v], sv, used) {
                for cell in &path[1..path.len() - 1] {
                    used.insert(*cell);
                }
                side_used[u][su] = true;
                side_used[v][sv] = true;
                routes.push(path.clone());
                if route_rec(size, placement, edges, constraints, idx + 1, used, side_used, routes)
                {
                    return true;
                }
                routes.pop();
                side_used[u][su] = false;
                side_used[v][sv] = false;
                for cell in &path[1..path.len() - 1] {
                    used.remove(cell);
                }
            }
        }
    }
    false
}

fn constraints_ok(
    edges: &[(usize, usize)],
    constraints: &LayoutConstraints,
    routes: &[Vec<Coarse>],
    placement: &[Coarse],
) -> bool {
    for &(vertex, ea, eb) in &constraints.opposite_pairs {
        let side = |e: usize| -> usize {
            let route = &routes[e];
            let (u, _) = edges[e];
            if placement[vertex] == route[0] && u == vertex {
                direction_of(route[0], route[1])
            } else if placement[vertex] == route[0] {
                direction_of(route[0], route[1])
            } else {
                direction_of(route[route.len() - 1], route[route.len() - 2])
            }
        };
        let (sa, sb) = (side(ea), side(eb));
        let opposite = matches!((sa, sb), (0, 1) | (1, 0) | (2, 3) | (3, 2));
        if !opposite {
            return false;
        }
    }
    true
}

/// Shortest route from `a` leaving on side `sa` to `b` arriving on side
/// `sb`, through free cells only. Returns the full cell path a..=b.
fn bfs_route(
    size: i32,
    a: Coarse,
    sa: usize,
    b: Coarse,
    sb: usize,
    used: &BTreeSet<Coarse>,
) -> Option<Vec<Coarse>> {
    let step = |c: Coarse, side: usize| -> Coarse { neighbors(c)[side] };
    let start = step(a, sa);
    let end = step(b, sb);
    let in_bounds = |c: Coarse| c.0 >= 0 && c.0 < size && c.1 >= 0 && c.1 < size;
    if !in_bounds(start) || !in_bounds(end) || used.contains(&start) || used.contains(&end) {
        return None;
    }
    if start == end {
        return Some(vec![a, start, b]);
    }
    let mut prev: std::collections::BTreeMap<Coarse, Coarse> = std::collections::BTreeMap::new();
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(start);
    prev.insert(start, start);
    while let Some(cur) = queue.pop_front() {
        for next in neighbors(cur) {
            if next == end {
                let mut path = vec![end];
                let mut at = cur;
                loop {
                    path.push(at);
                    if at == start {
                        break;
                    }
                    at = prev[&at];
                }
                path.push(a);
                path.reverse();
                path.push(b);
                return Some(path);
            }
            if !in_bounds(next) || used.contains(&next) || prev.contains_key(&next) {
                continue;
            }
            prev.insert(next, cur);
            queue.push_back(next);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn validate(layout: &OrthogonalLayout, edges: &[(usize, usize)]) {
        // Routes join the right endpoints, are connected, and interiors are
        // pairwise disjoint and avoid vertex cells.
        let mut interiors: BTreeSet<Coarse> = BTreeSet::new();
        for (route, &(u, v)) in layout.routes.iter().zip(edges) {
            assert_eq!(route[0], layout.vertices[u]);
            assert_eq!(*route.last().unwrap(), layout.vertices[v]);
            for w in route.windows(2) {
                let d = (w[0].0 - w[1].0).abs() + (w[0].1 - w[1].1).abs();
                assert_eq!(d, 1, "route must be a lattice path");
            }
            for cell in &route[1..route.len() - 1] {
                assert!(!layout.vertices.contains(cell), "route crosses a vertex");
                assert!(interiors.insert(*cell), "routes overlap at {cell:?}");
            }
        }
    }

    #[test]
    fn single_vertex_no_edges() {
        let l = layout_graph(1, &[], &LayoutConstraints::default()).unwrap();
        assert_eq!(l.vertices.len(), 1);
    }

    #[test]
    fn two_vertices_three_parallel_edges() {
        let edges = [(0, 1), (0, 1), (0, 1)];
        let l = layout_graph(2, &edges, &LayoutConstraints::default()).unwrap();
        validate(&l, &edges);
    }

    #[test]
    fn k4_routes() {
        let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let l = layout_graph(4, &edges, &LayoutConstraints::default()).unwrap();
        validate(&l, &edges);
    }

    #[test]
    fn opposite_side_constraint_honored() {
        let edges = [(0, 1), (0, 1), (0, 1)];
        let constraints = LayoutConstraints {
            opposite_pairs: vec![(0, 0, 1), (1, 0, 1)],
        };
        let l = layout_graph(2, &edges, &constraints).unwrap();
        validate(&l, &edges);
        // Check edge 0 and edge 1 leave vertex 0 on opposite sides.
        let d0 = super::direction_of(l.routes[0][0], l.routes[0][1]);
        let d1 = super::direction_of(l.routes[1][0], l.routes[1][1]);
        assert!(matches!((d0, d1), (0, 1) | (1, 0) | (2, 3) | (3, 2)));
    }
}
