//! Exhaustive reachability over canonical configurations, plus extraction
//! of the boundary behavior of sealed board fragments.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::board::{Board, Cell, Configuration, Move};
use crate::lts::Lts;

pub const DEFAULT_BUDGET: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Solvable,
    Unsolvable,
    /// The node budget was exhausted before the search completed.
    Unknown,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub verdict: Verdict,
    /// Present iff `verdict == Solvable`; replays from the start
    /// configuration to a goal configuration.
    pub witness: Option<Vec<Move>>,
    /// Number of canonical configurations explored.
    pub explored: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("exploration budget of {0} canonical configurations exceeded")]
    BudgetExceeded(usize),
}

/// Breadth-first search from the start configuration. Successors follow the
/// deterministic order of `legal_moves`, so the returned witness is the
/// lexicographically first among minimum-length ones.
pub fn solve_reachability(board: &Board, budget: usize) -> SolveResult {
    let start = canonical(board, &board.start_configuration());
    if board.is_goal(&start) {
        return SolveResult { verdict: Verdict::Solvable, witness: Some(Vec::new()), explored: 1 };
    }
    let mut seen: HashMap<Configuration, (usize, Move)> = HashMap::new();
    let mut ids: Vec<Configuration> = vec![start.clone()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    queue.push_back(0);
    let mut explored = 1usize;
    while let Some(id) = queue.pop_front() {
        let cfg = ids[id].clone();
        for mv in board.legal_moves(&cfg) {
            let next = board.apply_move_unchecked(&cfg, mv);
            if next == start || seen.contains_key(&next) {
                continue;
            }
            if board.is_goal(&next) {
                // Reconstruct the path.
                let mut path = vec![mv];
                let mut cur = id;
                while cur != 0 {
                    let (parent, pmv) = seen[&ids[cur]];
                    path.push(pmv);
                    cur = parent;
                }
                path.reverse();
                return SolveResult {
                    verdict: Verdict::Solvable,
                    witness: Some(path),
                    explored: explored + 1,
                };
            }
            explored += 1;
            if explored > budget {
                return SolveResult { verdict: Verdict::Unknown, witness: None, explored };
            }
            let nid = ids.len();
            ids.push(next.clone());
            seen.insert(next, (id, mv));
            queue.push_back(nid);
        }
    }
    SolveResult { verdict: Verdict::Unsolvable, witness: None, explored }
}

/// The complete reachable set, in deterministic BFS discovery order.
pub fn enumerate_reachable(board: &Board, budget: usize) -> Result<Vec<Configuration>, SolverError> {
    let start = canonical(board, &board.start_configuration());
    let mut seen: BTreeSet<Configuration> = BTreeSet::new();
    seen.insert(start.clone());
    let mut order = vec![start];
    let mut head = 0usize;
    while head < order.len() {
        let cfg = order[head].clone();
        head += 1;
        for mv in board.legal_moves(&cfg) {
            let next = board.apply_move_unchecked(&cfg, mv);
            if seen.insert(next.clone()) {
                if seen.len() > budget {
                    return Err(SolverError::BudgetExceeded(budget));
                }
                order.push(next);
            }
        }
    }
    Ok(order)
}

/// Canonical form of a configuration: gravity-settled. Block sets are
/// already ordered, and the agent cell completes the key.
fn canonical(board: &Board, cfg: &Configuration) -> Configuration {
    if board.rules.gravity {
        board.settle_gravity(cfg)
    } else {
        cfg.clone()
    }
}

/// Replay a move sequence from the start configuration, validating each
/// move. Returns the final configuration.
pub fn replay(board: &Board, moves: &[Move]) -> Result<Configuration, crate::board::BoardError> {
    let mut cfg = board.start_configuration();
    for &mv in moves {
        cfg = board.apply_move(&cfg, mv)?;
    }
    Ok(cfg)
}

/// Extract the boundary LTS of a sealed board fragment.
///
/// `boundary` names the ports: open cells on the fragment through which the
/// agent may enter and leave. A traversal starts with the agent placed on a
/// port; whenever the agent stands on a port cell the traversal is recorded
/// as a transition, and exploration continues past the arrival so that
/// multi-leg behaviors compose. Entries that can never reach a port yield
/// no transitions. States are the settled block placements seen at
/// traversal boundaries, numbered in discovery order with the initial
/// placement as state 0.
pub fn extract_boundary_lts(
    board: &Board,
    boundary: &[(String, Cell)],
    initial_blocks: &BTreeSet<Cell>,
    budget: usize,
) -> Result<Lts, SolverError> {
    let ports: Vec<String> = boundary.iter().map(|(n, _)| n.clone()).collect();
    let cells: Vec<Cell> = boundary.iter().map(|(_, c)| *c).collect();
    let is_port = |c: Cell| cells.iter().position(|&p| p == c);

    let settle = |blocks: &BTreeSet<Cell>| -> BTreeSet<Cell> {
        if board.rules.gravity {
            // Settle with the agent far outside so it does not interfere.
            let cfg = Configuration::new(Cell::new(-1000, -1000), blocks.clone());
            board.settle_gravity(&cfg).blocks
        } else {
            blocks.clone()
        }
    };

    let mut state_ids: HashMap<BTreeSet<Cell>, usize> = HashMap::new();
    let mut states: Vec<BTreeSet<Cell>> = Vec::new();
    let init = settle(initial_blocks);
    state_ids.insert(init.clone(), 0);
    states.push(init);

    let mut transitions: BTreeSet<(usize, usize, usize, usize)> = BTreeSet::new();
    let mut explored_total = 0usize;
    let mut si = 0usize;
    while si < states.len() {
        let blocks = states[si].clone();
        for (pi, &port) in cells.iter().enumerate() {
            if blocks.contains(&port) || board.is_fixed(port) {
                continue;
            }
            let start = Configuration::new(port, blocks.clone());
            let mut seen: BTreeSet<Configuration> = BTreeSet::new();
            seen.insert(start.clone());
            let mut queue: VecDeque<Configuration> = VecDeque::new();
            queue.push_back(start);
            while let Some(cfg) = queue.pop_front() {
                for mv in board.legal_moves(&cfg) {
                    let next = board.apply_move_unchecked(&cfg, mv);
                    if !seen.insert(next.clone()) {
                        continue;
                    }
                    explored_total += 1;
                    if explored_total > budget {
                        return Err(SolverError::BudgetExceeded(budget));
                    }
                    if let Some(qo) = is_port(next.agent) {
                        let final_blocks = settle(&next.blocks);
                        let nid = match state_ids.get(&final_blocks) {
                            Some(&id) => id,
                            None => {
                                let id = states.len();
                                state_ids.insert(final_blocks.clone(), id);
                                states.push(final_blocks);
                                id
                            }
                        };
                        transitions.insert((si, pi, qo, nid));
                    }
                    queue.push_back(next);
                }
            }
        }
        si += 1;
    }

    let mut lts = Lts::new(ports, states.len(), 0);
    for (s, e, x, t) in transitions {
        lts.add(s, e, x, t);
    }
    Ok(lts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::{parse_board, parse_fragment, Direction, VariantRules};

    #[test]
    fn corridor_shortest_path() {
        let text = "pull ? 1 F -\n\
                    +-+-+-+-+-+\n\
                    |A . . . G|\n\
                    +-+-+-+-+-+\n";
        let b = parse_board(text).unwrap();
        let r = solve_reachability(&b, DEFAULT_BUDGET);
        assert_eq!(r.verdict, Verdict::Solvable);
        let w = r.witness.unwrap();
        assert_eq!(w.len(), 4);
        assert!(w.iter().all(|m| m.direction == Direction::Right && m.pull_count == 0));
        let end = replay(&b, &w).unwrap();
        assert!(b.is_goal(&end));
    }

    #[test]
    fn sealed_cell_is_unsolvable() {
        let text = "pull ? 1 F -\n\
                    +-+-+-+\n\
                    |A # G|\n\
                    +-+-+-+\n";
        let b = parse_board(text).unwrap();
        let r = solve_reachability(&b, DEFAULT_BUDGET);
        assert_eq!(r.verdict, Verdict::Unsolvable);
    }

    #[test]
    fn enumerate_agent_only_corridor() {
        let text = "pull ? 1 F -\n\
                    +-+-+-+\n\
                    |. A .|\n\
                    +-+-+-+\n";
        let mut b = parse_fragment(text).unwrap();
        b.goal = Some(Cell::new(0, 0));
        let all = enumerate_reachable(&b, DEFAULT_BUDGET).unwrap();
        assert_eq!(all.len(), 3);
    }

    #[test]
    fn enumerate_matches_dfs_oracle() {
        // 1x4 corridor with one block, optional strength 1. Independent
        // depth-first enumeration oracle over the same move relation.
        let text = "pull ? 1 F -\n\
                    +-+-+-+-+\n\
                    |o . A G|\n\
                    +-+-+-+-+\n";
        let b = parse_board(text).unwrap();

        fn dfs(b: &Board, cfg: &Configuration, seen: &mut BTreeSet<Configuration>) {
            if !seen.insert(cfg.clone()) {
                return;
            }
            for mv in b.legal_moves(cfg) {
                let next = b.apply_move_unchecked(cfg, mv);
                dfs(b, &next, seen);
            }
        }
        let mut oracle = BTreeSet::new();
        dfs(&b, &b.start_configuration(), &mut oracle);

        let bfs = enumerate_reachable(&b, DEFAULT_BUDGET).unwrap();
        let bfs_set: BTreeSet<Configuration> = bfs.into_iter().collect();
        assert_eq!(oracle, bfs_set);
        assert_eq!(oracle.len(), 6);
    }

    #[test]
    fn sealed_single_cell() {
        let text = "pull ? 1 F -\n\
                    +-+\n\
                    |A|\n\
                    +-+\n";
        let mut b = parse_fragment(text).unwrap();
        b.goal = Some(Cell::new(0, 0));
        let all = enumerate_reachable(&b, DEFAULT_BUDGET).unwrap();
        assert_eq!(all.len(), 1);
    }

    #[test]
    fn budget_exhaustion_reports_unknown() {
        let text = "pull ? 1 F -\n\
                    +-+-+-+-+-+\n\
                    |. . . . .|\n\
                    + + + + + +\n\
                    |A . . . .|\n\
                    + + + + + +\n\
                    |. . . o G|\n\
                    +-+-+-+-+-+\n";
        let b = parse_board(text).unwrap();
        let r = solve_reachability(&b, 3);
        assert_eq!(r.verdict, Verdict::Unknown);
    }

    #[test]
    fn extract_free_corridor() {
        let text = "pull ? 1 F -\n\
                    +-+-+-+\n\
                    |. . .|\n\
                    +-+-+-+\n";
        let b = parse_fragment(text).unwrap();
        let lts = extract_boundary_lts(
            &b,
            &[("L".into(), Cell::new(0, 0)), ("R".into(), Cell::new(0, 2))],
            &BTreeSet::new(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        let obs = lts.observable();
        assert_eq!(obs.num_states, 1);
        // free passage both ways
        let l = obs.port_index("L").unwrap();
        let r = obs.port_index("R").unwrap();
        assert!(obs.transitions.contains(&(0, l, r, 0)));
        assert!(obs.transitions.contains(&(0, r, l, 0)));
    }

    #[test]
    fn extract_trap_has_no_transitions() {
        // Entering the fragment drops past a one-way... simplest trap: a
        // port into a dead end pocket where a pull seals the agent in is
        // overkill; a port whose only neighbor cell is the port itself
        // cannot even move, so no transitions at all (not even (p,p)).
        let text = "pull ? 1 F -\n\
                    +-+-+\n\
                    |. #|\n\
                    +-+-+\n";
        let b = parse_fragment(text).unwrap();
        let lts = extract_boundary_lts(
            &b,
            &[("P".into(), Cell::new(0, 0))],
            &BTreeSet::new(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(lts.transitions.is_empty());
    }
}
