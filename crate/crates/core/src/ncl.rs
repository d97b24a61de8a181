//! Nondeterministic constraint logic: red/blue weighted multigraphs where
//! every vertex must keep in-weight at least 2 and a move reverses one
//! edge. Includes the asynchronous semantics in which an edge passes
//! through an unoriented intermediate state.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    And,
    Or,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeColor {
    Red,
    Blue,
}

impl EdgeColor {
    pub fn weight(&self) -> u32 {
        match self {
            EdgeColor::Red => 1,
            EdgeColor::Blue => 2,
        }
    }
}

/// Edge orientation, or the unoriented intermediate of the asynchronous
/// model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeState {
    TowardU,
    TowardV,
    Unoriented,
}

#[derive(Debug, Clone)]
pub struct NclEdge {
    pub id: String,
    pub u: usize,
    pub v: usize,
    pub color: EdgeColor,
    /// Initial orientation: true when pointing toward `v`.
    pub toward_v: bool,
}

#[derive(Debug, Clone)]
pub struct NclGraph {
    pub vertex_ids: Vec<String>,
    pub kinds: Vec<VertexKind>,
    pub edges: Vec<NclEdge>,
    pub target: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NclError {
    #[error("parse error at line {0}: {1}")]
    Parse(usize, String),
    #[error("vertex {0}: {1} vertices need {2}, found {3}")]
    Arity(String, &'static str, &'static str, String),
    #[error("initial orientation violates the in-weight constraint at vertex {0}")]
    ConstraintViolated(String),
    #[error("edge {0} endpoint {1} is not a declared vertex")]
    DanglingEdge(String, String),
    #[error("no target edge declared")]
    NoTarget,
    #[error("graph too large: {0} edges exceeds the cap of {1}")]
    TooLarge(usize, usize),
}

/// An orientation assignment for all edges.
pub type Orientation = Vec<EdgeState>;

impl NclGraph {
    pub fn initial_orientation(&self) -> Orientation {
        self.edges
            .iter()
            .map(|e| if e.toward_v { EdgeState::TowardV } else { EdgeState::TowardU })
            .collect()
    }

    /// In-weight of every vertex under an orientation; unoriented edges
    /// count for neither endpoint.
    pub fn in_weights(&self, orientation: &Orientation) -> Vec<u32> {
        let mut w = vec![0u32; self.vertex_ids.len()];
        for (e, st) in self.edges.iter().zip(orientation) {
            match st {
                EdgeState::TowardU => w[e.u] += e.color.weight(),
                EdgeState::TowardV => w[e.v] += e.color.weight(),
                EdgeState::Unoriented => {}
            }
        }
        w
    }

    pub fn satisfies_constraint(&self, orientation: &Orientation) -> bool {
        self.in_weights(orientation).iter().all(|&w| w >= 2)
    }

    /// Validate arities, the initial constraint, and size caps.
    pub fn validate(&self) -> Result<(), NclError> {
        for (vi, kind) in self.kinds.iter().enumerate() {
            let mut reds = 0;
            let mut blues = 0;
            for e in &self.edges {
                let mut count = 0;
                if e.u == vi {
                    count += 1;
                }
                if e.v == vi {
                    count += 1;
                }
                match e.color {
                    EdgeColor::Red => reds += count,
                    EdgeColor::Blue => blues += count,
                }
            }
            match kind {
                VertexKind::And => {
                    if reds != 2 || blues != 1 {
                        return Err(NclError::Arity(
                            self.vertex_ids[vi].clone(),
                            "AND",
                            "two red edges and one blue edge",
                            format!("{reds} red, {blues} blue"),
                        ));
                    }
                }
                VertexKind::Or => {
                    if reds != 0 || blues != 3 {
                        return Err(NclError::Arity(
                            self.vertex_ids[vi].clone(),
                            "OR",
                            "three blue edges",
                            format!("{reds} red, {blues} blue"),
                        ));
                    }
                }
                VertexKind::Generic => {}
            }
        }
        let init = self.initial_orientation();
        let weights = self.in_weights(&init);
        for (vi, &w) in weights.iter().enumerate() {
            if w < 2 {
                return Err(NclError::ConstraintViolated(self.vertex_ids[vi].clone()));
            }
        }
        Ok(())
    }
}

/// Parse the NCL text format:
/// `vertex <id> <AND|OR|GEN>` / `edge <id> <u> <v> <red|blue> <u|v>`
/// (last token names the vertex the edge initially points toward) /
/// `target <edge id>`.
pub fn parse_ncl(text: &str) -> Result<NclGraph, NclError> {
    let mut vertex_ids = Vec::new();
    let mut kinds = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<NclEdge> = Vec::new();
    let mut target: Option<usize> = None;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts[0] {
            "vertex" if parts.len() == 3 => {
                let kind = match parts[2] {
                    "AND" => VertexKind::And,
                    "OR" => VertexKind::Or,
                    "GEN" => VertexKind::Generic,
                    other => {
                        return Err(NclError::Parse(lineno, format!("unknown kind '{other}'")))
                    }
                };
                index.insert(parts[1].to_string(), vertex_ids.len());
                vertex_ids.push(parts[1].to_string());
                kinds.push(kind);
            }
            "edge" if parts.len() == 6 => {
                let &u = index.get(parts[2]).ok_or_else(|| {
                    NclError::DanglingEdge(parts[1].to_string(), parts[2].to_string())
                })?;
                let &v = index.get(parts[3]).ok_or_else(|| {
                    NclError::DanglingEdge(parts[1].to_string(), parts[3].to_string())
                })?;
                let color = match parts[4] {
                    "red" => EdgeColor::Red,
                    "blue" => EdgeColor::Blue,
                    other => {
                        return Err(NclError::Parse(lineno, format!("unknown color '{other}'")))
                    }
                };
                let toward_v = if parts[5] == parts[3] {
                    true
                } else if parts[5] == parts[2] {
                    false
                } else {
                    return Err(NclError::Parse(
                        lineno,
                        format!("orientation '{}' names neither endpoint", parts[5]),
                    ));
                };
                edges.push(NclEdge { id: parts[1].to_string(), u, v, color, toward_v });
            }
            "target" if parts.len() == 2 => {
                let idx = edges.iter().position(|e| e.id == parts[1]).ok_or_else(|| {
                    NclError::Parse(lineno, format!("unknown edge '{}'", parts[1]))
                })?;
                target = Some(idx);
            }
            _ => return Err(NclError::Parse(lineno, format!("bad directive '{line}'"))),
        }
    }
    let graph = NclGraph {
        vertex_ids,
        kinds,
        edges,
        target: target.ok_or(NclError::NoTarget)?,
    };
    graph.validate()?;
    Ok(graph)
}

pub fn serialize_ncl(g: &NclGraph) -> String {
    let mut out = String::new();
    for (id, kind) in g.vertex_ids.iter().zip(&g.kinds) {
        let k = match kind {
            VertexKind::And => "AND",
            VertexKind::Or => "OR",
            VertexKind::Generic => "GEN",
        };
        let _ = writeln!(out, "vertex {id} {k}");
    }
    for e in &g.edges {
        let toward = if e.toward_v { &g.vertex_ids[e.v] } else { &g.vertex_ids[e.u] };
        let color = match e.color {
            EdgeColor::Red => "red",
            EdgeColor::Blue => "blue",
        };
        let _ = writeln!(
            out,
            "edge {} {} {} {} {}",
            e.id, g.vertex_ids[e.u], g.vertex_ids[e.v], color, toward
        );
    }
    let _ = writeln!(out, "target {}", g.edges[g.target].id);
    out
}

/// Edges whose full reversal keeps every vertex at in-weight 2 or more.
pub fn legal_flips(graph: &NclGraph, orientation: &Orientation) -> Vec<usize> {
    let mut flips = Vec::new();
    for i in 0..graph.edges.len() {
        let mut next = orientation.clone();
        next[i] = match orientation[i] {
            EdgeState::TowardU => EdgeState::TowardV,
            EdgeState::TowardV => EdgeState::TowardU,
            EdgeState::Unoriented => continue,
        };
        if graph.satisfies_constraint(&next) {
            flips.push(i);
        }
    }
    flips
}

pub const SYNC_EDGE_CAP: usize = 30;
pub const ASYNC_EDGE_CAP: usize = 18;

fn orientation_key(orientation: &Orientation) -> u64 {
    let mut key = 0u64;
    for st in orientation {
        key = key * 3
            + match st {
                EdgeState::TowardU => 0,
                EdgeState::TowardV => 1,
                EdgeState::Unoriented => 2,
            };
    }
    key
}

/// Synchronous solver: breadth-first search over orientations; true iff
/// some reachable orientation has the target edge reversed relative to its
/// initial direction. Returns the witness flip sequence when solvable.
pub fn solve_ncl(graph: &NclGraph) -> Result<(bool, Option<Vec<usize>>), NclError> {
    if graph.edges.len() > SYNC_EDGE_CAP {
        return Err(NclError::TooLarge(graph.edges.len(), SYNC_EDGE_CAP));
    }
    let init = graph.initial_orientation();
    let flipped_target = match init[graph.target] {
        EdgeState::TowardU => EdgeState::TowardV,
        EdgeState::TowardV => EdgeState::TowardU,
        EdgeState::Unoriented => unreachable!("initial orientations are oriented"),
    };
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    seen.insert(orientation_key(&init));
    let mut parents: HashMap<u64, (u64, usize)> = HashMap::new();
    let mut queue = VecDeque::new();
    queue.push_back(init.clone());
    while let Some(cur) = queue.pop_front() {
        for i in legal_flips(graph, &cur) {
            let mut next = cur.clone();
            next[i] = match cur[i] {
                EdgeState::TowardU => EdgeState::TowardV,
                EdgeState::TowardV => EdgeState::TowardU,
                EdgeState::Unoriented => unreachable!(),
            };
            let key = orientation_key(&next);
            if seen.insert(key) {
                parents.insert(key, (orientation_key(&cur), i));
                if next[graph.target] == flipped_target {
                    // Reconstruct the flip sequence.
                    let mut path = vec![i];
                    let mut at = orientation_key(&cur);
                    let init_key = orientation_key(&graph.initial_orientation());
                    while at != init_key {
                        let (prev, flip) = parents[&at];
                        path.push(flip);
                        at = prev;
                    }
                    path.reverse();
                    return Ok((true, Some(path)));
                }
                queue.push_back(next);
            }
        }
    }
    Ok((false, None))
}

/// Asynchronous solver: edges also take an unoriented intermediate state;
/// each move changes one edge one step, subject to the constraint holding
/// afterwards. True iff the target edge becomes fully reversed.
pub fn solve_ncl_async(graph: &NclGraph) -> Result<bool, NclError> {
    if graph.edges.len() > ASYNC_EDGE_CAP {
        return Err(NclError::TooLarge(graph.edges.len(), ASYNC_EDGE_CAP));
    }
    let init = graph.initial_orientation();
    let flipped_target = match init[graph.target] {
        EdgeState::TowardU => EdgeState::TowardV,
        EdgeState::TowardV => EdgeState::TowardU,
        EdgeState::Unoriented => unreachable!(),
    };
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    seen.insert(orientation_key(&init));
    let mut queue = VecDeque::new();
    queue.push_back(init);
    while let Some(cur) = queue.pop_front() {
        if cur[graph.target] == flipped_target {
            return Ok(true);
        }
        for i in 0..graph.edges.len() {
            let steps: &[EdgeState] = match cur[i] {
                EdgeState::Unoriented => &[EdgeState::TowardU, EdgeState::TowardV],
                _ => &[EdgeState::Unoriented],
            };
            for &step in steps {
                let mut next = cur.clone();
                next[i] = step;
                if !graph.satisfies_constraint(&next) {
                    continue;
                }
                let key = orientation_key(&next);
                if seen.insert(key) {
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(false)
}

/// Every valid AND/OR multigraph with at most three vertices, in every
/// constraint-satisfying initial orientation, with every target edge.
/// Since AND and OR vertices both have odd blue degree, the vertex count
/// must be even, so the battery is exactly the two-vertex graphs: AND-AND
/// (two red edges and one blue) and OR-OR (three parallel blue edges).
pub fn small_battery() -> Vec<NclGraph> {
    let mut battery = Vec::new();
    let shapes: [(&str, Vec<EdgeColor>); 2] = [
        ("ANDAND", vec![EdgeColor::Red, EdgeColor::Red, EdgeColor::Blue]),
        ("OROR", vec![EdgeColor::Blue, EdgeColor::Blue, EdgeColor::Blue]),
    ];
    for (name, colors) in shapes {
        let kind = if name == "ANDAND" { VertexKind::And } else { VertexKind::Or };
        for orient_bits in 0..(1u32 << colors.len()) {
            let edges: Vec<NclEdge> = colors
                .iter()
                .enumerate()
                .map(|(i, &color)| NclEdge {
                    id: format!("e{i}"),
                    u: 0,
                    v: 1,
                    color,
                    toward_v: orient_bits & (1 << i) != 0,
                })
                .collect();
            for target in 0..edges.len() {
                let g = NclGraph {
                    vertex_ids: vec!["u".into(), "v".into()],
                    kinds: vec![kind, kind],
                    edges: edges.clone(),
                    target,
                };
                if g.validate().is_ok() {
                    battery.push(g);
                }
            }
        }
    }
    battery
}

/// Seeded random GENERIC graphs with few edges, used as extra oracle
/// instances for the synchronous/asynchronous agreement property.
pub fn random_generic_battery(count: usize, seed: u64) -> Vec<NclGraph> {
    use crate::rng::SplitMix64;
    let mut rng = SplitMix64::new(seed);
    let mut graphs = Vec::new();
    while graphs.len() < count {
        let nv = 2 + rng.below(3);
        let ne = 2 + rng.below(5);
        let mut edges = Vec::new();
        for i in 0..ne {
            let u = rng.below(nv);
            let mut v = rng.below(nv);
            if u == v {
                v = (v + 1) % nv;
            }
            let (u, v) = (u.min(v), u.max(v));
            edges.push(NclEdge {
                id: format!("e{i}"),
                u,
                v,
                color: if rng.chance(1, 2) { EdgeColor::Red } else { EdgeColor::Blue },
                toward_v: rng.chance(1, 2),
            });
        }
        let g = NclGraph {
            vertex_ids: (0..nv).map(|i| format!("v{i}")).collect(),
            kinds: vec![VertexKind::Generic; nv],
            edges,
            target: rng.below(ne),
        };
        if g.validate().is_ok() {
            graphs.push(g);
        }
    }
    graphs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn or_or_triple() -> NclGraph {
        // Two OR vertices joined by three parallel blue edges, two toward u.
        parse_ncl(
            "vertex u OR\n\
             vertex v OR\n\
             edge e1 u v blue u\n\
             edge e2 u v blue u\n\
             edge e3 u v blue v\n\
             target e1\n",
        )
        .unwrap()
    }

    #[test]
    fn parse_valid_or_or() {
        let g = or_or_triple();
        assert_eq!(g.edges.len(), 3);
        assert!(g.satisfies_constraint(&g.initial_orientation()));
    }

    #[test]
    fn and_with_wrong_arity_rejected() {
        let r = parse_ncl(
            "vertex a AND\n\
             vertex b GEN\n\
             edge e1 a b blue a\n\
             edge e2 a b blue a\n\
             target e1\n",
        );
        assert!(matches!(r, Err(NclError::Arity(_, _, _, _))));
    }

    #[test]
    fn initial_constraint_violation_rejected() {
        let r = parse_ncl(
            "vertex a GEN\n\
             vertex b GEN\n\
             edge e1 a b blue a\n\
             edge e2 a b blue a\n\
             target e1\n",
        );
        // b has in-weight 0.
        assert!(matches!(r, Err(NclError::ConstraintViolated(_))));
    }

    #[test]
    fn or_flip_legality() {
        let g = or_or_triple();
        let init = g.initial_orientation();
        // e1,e2 point toward u (weight 4 at u), e3 toward v (weight 2 at v).
        // Flipping e3 away from v would starve v; flipping e1 or e2 leaves
        // u at 2 and raises v.
        let flips = legal_flips(&g, &init);
        assert_eq!(flips, vec![0, 1]);
    }

    #[test]
    fn or_or_triple_solvable_in_one_flip() {
        let g = or_or_triple();
        let (solvable, witness) = solve_ncl(&g).unwrap();
        assert!(solvable);
        assert_eq!(witness.unwrap(), vec![0]);
    }

    #[test]
    fn blue_cyclic_triangle_unsolvable() {
        // Three GEN vertices in a directed blue 3-cycle: every flip starves
        // a vertex, so nothing can ever move.
        let g = parse_ncl(
            "vertex a GEN\n\
             vertex b GEN\n\
             vertex c GEN\n\
             edge e1 a b blue b\n\
             edge e2 b c blue c\n\
             edge e3 c a blue a\n\
             target e1\n",
        )
        .unwrap();
        assert!(legal_flips(&g, &g.initial_orientation()).is_empty());
        let (solvable, _) = solve_ncl(&g).unwrap();
        assert!(!solvable);
        assert!(!solve_ncl_async(&g).unwrap());
    }

    #[test]
    fn flip_reversibility() {
        let g = or_or_triple();
        let init = g.initial_orientation();
        for i in legal_flips(&g, &init) {
            let mut next = init.clone();
            next[i] = match init[i] {
                EdgeState::TowardU => EdgeState::TowardV,
                EdgeState::TowardV => EdgeState::TowardU,
                EdgeState::Unoriented => unreachable!(),
            };
            assert!(legal_flips(&g, &next).contains(&i), "flip {i} must be reversible");
        }
    }

    #[test]
    fn async_agrees_with_sync_on_small_graphs() {
        let g = or_or_triple();
        let (sync, _) = solve_ncl(&g).unwrap();
        assert_eq!(sync, solve_ncl_async(&g).unwrap());
    }

    #[test]
    fn roundtrip() {
        let g = or_or_triple();
        let text = serialize_ncl(&g);
        let g2 = parse_ncl(&text).unwrap();
        assert_eq!(text, serialize_ncl(&g2));
    }
}
