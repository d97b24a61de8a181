//! Gadget tile assets: board fragments with named port cells, the rule
//! variants they require, and per-state block placements. Each asset is
//! certified behaviorally against its abstract gadget; the layouts are
//! data, their correctness is established by extraction.

use std::collections::BTreeSet;

use crate::board::{parse_fragment, Board, BoardError, Cell, VariantRules};
use crate::lts::Lts;
use crate::solver::{extract_boundary_lts, SolverError};

/// A named board fragment usable both for certification and as a stamp for
/// the reduction compilers.
#[derive(Debug, Clone)]
pub struct TileAsset {
    pub name: String,
    pub board: Board,
    pub ports: Vec<(String, Cell)>,
    /// Named block placements; the board's own movable set is the default
    /// placement and must appear here under its state name.
    pub states: Vec<(String, BTreeSet<Cell>)>,
}

impl TileAsset {
    pub fn from_text(
        name: &str,
        rules: VariantRules,
        text: &str,
        ports: &[(&str, (i32, i32))],
    ) -> Result<TileAsset, BoardError> {
        let mut board = parse_fragment(&format!("{rules}\n{text}"))?;
        board.rules = rules;
        let ports: Vec<(String, Cell)> = ports
            .iter()
            .map(|&(n, (r, c))| (n.to_string(), Cell::new(r, c)))
            .collect();
        for (pname, cell) in &ports {
            assert!(
                board.in_bounds(*cell) && !board.fixed.contains(cell),
                "port {pname} must be an open in-bounds cell"
            );
        }
        let states = vec![("initial".to_string(), board.movable_start.clone())];
        Ok(TileAsset { name: name.to_string(), board, ports, states })
    }

    /// Register an alternative block placement under a state name.
    pub fn with_state(mut self, name: &str, blocks: &[(i32, i32)]) -> TileAsset {
        let set: BTreeSet<Cell> = blocks.iter().map(|&(r, c)| Cell::new(r, c)).collect();
        self.states.push((name.to_string(), set));
        self
    }

    pub fn state(&self, name: &str) -> &BTreeSet<Cell> {
        &self
            .states
            .iter()
            .find(|(n, _)| n == name)
            .unwrap_or_else(|| panic!("asset {} has no state {name}", self.name))
            .1
    }

    /// Extract the boundary behavior starting from the default placement.
    pub fn extract(&self, budget: usize) -> Result<Lts, SolverError> {
        extract_boundary_lts(&self.board, &self.ports, &self.board.movable_start, budget)
    }

    /// Extract starting from a named placement.
    pub fn extract_from(&self, state: &str, budget: usize) -> Result<Lts, SolverError> {
        extract_boundary_lts(&self.board, &self.ports, self.state(state), budget)
    }
}

/// Build the one-state diode LTS used as a certification target.
pub fn diode_target() -> Lts {
    let mut l = Lts::new(vec!["in".into(), "out".into()], 1, 0);
    l.add_named(0, "in", "out", 0);
    l
}

/// Diode for the forced-pull gravity variants. The door block must be
/// dragged backward twice to open the lane; the forced pulls on the way
/// out drag it back to its home slot, and the raised exit step sheds it
/// there. Entering from the right there is no retreat room, so the block
/// can never be moved from that side.
pub fn forced_gravity_diode() -> TileAsset {
    let text = "\
+-+-+-+-+-+-+-+-+-+-+-+
|. . . . # . . . # . .|
+ + + + + + + + + + + +
|# . . . o . . . o . #|
+-+-+-+-+-+-+-+-+-+-+-+";
    TileAsset::from_text(
        "forced-gravity-diode",
        VariantRules::forced_fg(1),
        text,
        &[("in", (0, 0)), ("out", (0, 10))],
    )
    .expect("asset parses")
}

/// The two-state 1-toggle target: forward then backward, alternating.
pub fn one_toggle_target() -> Lts {
    let mut l = Lts::new(vec!["a".into(), "b".into()], 2, 0);
    l.add_named(0, "a", "b", 1);
    l.add_named(1, "b", "a", 0);
    l
}

/// The two-state single-use one-way target.
pub fn single_use_oneway_target() -> Lts {
    let mut l = Lts::new(vec!["in".into(), "out".into()], 2, 0);
    l.add_named(0, "in", "out", 1);
    l
}

/// Three-port self-closing door for the forced-pull gravity variants.
/// The self-closing tunnel runs from the top port through the diode, then
/// down past the door block; traversing it forcibly drags the block back
/// into the tunnel. The opening port reaches the block from the other side
/// and drags it one cell clear. Entering the closed tunnel from the top
/// leaves the agent trapped between the door block and the wrong end of
/// the diode.
pub fn forced_gravity_scd() -> TileAsset {
    let mut grid = vec![vec!['#'; 24]; 7];
    let carve = |g: &mut Vec<Vec<char>>, r: usize, cs: &[usize], ch: char| {
        for &c in cs {
            g[r][c] = ch;
        }
    };
    // Top port and the entry diode (rows 1-2).
    grid[0][1] = '.';
    carve(&mut grid, 1, &[1, 2, 3, 4, 6, 7, 8], '.');
    carve(&mut grid, 2, &[2, 3, 4, 6, 7, 8, 10], '.');
    grid[2][5] = 'o';
    grid[2][9] = 'o';
    // Shaft down to the door row.
    grid[3][10] = '.';
    // Door row: opener stand, parked slot, door block home, exit stand.
    carve(&mut grid, 4, &[8, 9, 11], '.');
    grid[4][10] = 'o';
    // Opener shaft, exit shed, and the exit diode (rows 5-6).
    carve(&mut grid, 5, &[8, 11, 12, 13, 14, 15, 17, 18, 19, 21, 22, 23], '.');
    grid[5][16] = '#';
    grid[5][20] = '#';
    carve(&mut grid, 6, &[8, 13, 14, 15, 17, 18, 19, 21], '.');
    grid[6][16] = 'o';
    grid[6][20] = 'o';

    let mut text = String::new();
    let width = 24;
    let ring: String = std::iter::once('+')
        .chain((0..width).flat_map(|_| ['-', '+']))
        .collect();
    text.push_str(&ring);
    text.push('\n');
    for (i, row) in grid.iter().enumerate() {
        let mut line = String::from("|");
        for (j, &ch) in row.iter().enumerate() {
            line.push(ch);
            line.push(if j + 1 == width as usize { '|' } else { ' ' });
        }
        text.push_str(&line);
        text.push('\n');
        if i + 1 < grid.len() {
            let mut sep = String::from("+");
            for _ in 0..width {
                sep.push(' ');
                sep.push('+');
            }
            text.push_str(&sep);
            text.push('\n');
        }
    }
    text.push_str(&ring);

    let asset = TileAsset::from_text(
        "forced-gravity-scd",
        VariantRules::forced_fg(1),
        &text,
        &[("t_in", (0, 1)), ("open_port", (6, 8)), ("t_out", (5, 23))],
    )
    .expect("asset parses");
    // The open state parks the door block one cell toward the opener.
    let open_blocks: Vec<(i32, i32)> = vec![(2, 5), (2, 9), (4, 9), (6, 16), (6, 20)];
    asset.with_state("open", &open_blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::check_bisimulation;
    use crate::solver::{solve_reachability, Verdict};

    #[test]
    fn forced_gravity_diode_certifies() {
        let asset = forced_gravity_diode();
        let lts = asset.extract(1 << 22).unwrap();
        let named = lts.rename_ports(
            &[("in".to_string(), "in".to_string()), ("out".to_string(), "out".to_string())]
                .into_iter()
                .collect(),
        );
        assert!(
            check_bisimulation(&named.observable(), &diode_target().observable()),
            "forced gravity diode must quotient to the one-state diode; raw:\n{}",
            lts.export()
        );
        // Reverse entry is unsolvable: goal on the in side, agent at out.
        let mut b = asset.board.clone();
        b.agent_start = Some(Cell::new(0, 10));
        b.goal = Some(Cell::new(0, 0));
        let r = solve_reachability(&b, 1 << 22);
        assert_eq!(r.verdict, Verdict::Unsolvable);
        // Same behavior at unbounded strength.
        let mut u = asset.board.clone();
        u.rules = VariantRules::new(true, crate::board::Strength::Unbounded, false, true);
        let lts_u = crate::solver::extract_boundary_lts(
            &u,
            &asset.ports,
            &u.movable_start.clone(),
            1 << 22,
        )
        .unwrap();
        assert!(check_bisimulation(&lts_u.observable(), &diode_target().observable()));
    }

    #[test]
    fn forced_gravity_scd_certifies() {
        let asset = forced_gravity_scd();
        let lts = asset.extract(1 << 22).unwrap();
        let obs = lts.observable();
        // Abstract three-port self-closing door, closed initial state.
        let scd = crate::gadgets::builtin("self-closing-door-3").unwrap();
        let target = scd.to_lts(0);
        assert!(
            check_bisimulation(&obs, &target.observable()),
            "scd asset must have exactly the two-state door behavior; raw:\n{}\nobs:\n{}",
            lts.export(),
            obs.export()
        );
        assert_eq!(obs.num_states, 2, "exactly two quotient states");
        // Closed-state top entry is a trap: no way to any port.
        let mut b = asset.board.clone();
        b.agent_start = Some(Cell::new(0, 1));
        b.goal = Some(Cell::new(5, 23));
        let r = solve_reachability(&b, 1 << 22);
        assert_eq!(r.verdict, Verdict::Unsolvable, "closed top entry cannot reach t_out");
        let mut b2 = asset.board.clone();
        b2.agent_start = Some(Cell::new(0, 1));
        b2.goal = Some(Cell::new(6, 8));
        assert_eq!(solve_reachability(&b2, 1 << 22).verdict, Verdict::Unsolvable);
        // Unbounded strength behaves identically.
        let mut u = asset.board.clone();
        u.rules = VariantRules::new(true, crate::board::Strength::Unbounded, false, true);
        let lts_u =
            crate::solver::extract_boundary_lts(&u, &asset.ports, &u.movable_start.clone(), 1 << 22)
                .unwrap();
        assert!(check_bisimulation(&lts_u.observable(), &target.observable()));
    }
}
