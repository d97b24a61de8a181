//! Board representation and move semantics for the pulling-block puzzle family.
//!
//! A board is a rectangular grid of cells surrounded by an implicit fixed
//! frame. Cells may hold fixed blocks, movable blocks, the agent, or the
//! goal. Thin walls live on edges between orthogonally adjacent cells and
//! block both agent steps and block movement across that edge.
//!
//! The rule variants are captured by [`VariantRules`]: optional vs forced
//! pulling, pull strength, whether thin walls are allowed, and gravity.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Pull strength: the maximum length of the unbroken block line the agent
/// may pull in one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strength {
    Finite(u32),
    Unbounded,
}

impl Strength {
    pub fn allows(&self, count: u32) -> bool {
        match self {
            Strength::Finite(k) => count <= *k,
            Strength::Unbounded => true,
        }
    }
}

impl fmt::Display for Strength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strength::Finite(k) => write!(f, "{k}"),
            Strength::Unbounded => write!(f, "*"),
        }
    }
}

/// The rule switches selecting one of the puzzle variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VariantRules {
    /// Forced pulling: every step pulls as many blocks as possible.
    pub forced: bool,
    pub strength: Strength,
    /// Thin walls permitted on the board (the W family). When false the
    /// board must carry zero walls.
    pub walls_allowed: bool,
    /// Movable blocks fall downward after each agent move.
    pub gravity: bool,
}

impl VariantRules {
    pub fn new(forced: bool, strength: Strength, walls_allowed: bool, gravity: bool) -> Self {
        VariantRules { forced, strength, walls_allowed, gravity }
    }

    /// Optional-pull, finite strength, fixed blocks only, no gravity.
    pub fn optional_f(k: u32) -> Self {
        VariantRules::new(false, Strength::Finite(k), false, false)
    }

    /// Forced-pull, finite strength, fixed blocks only, no gravity.
    pub fn forced_f(k: u32) -> Self {
        VariantRules::new(true, Strength::Finite(k), false, false)
    }

    /// Optional-pull with gravity and fixed blocks.
    pub fn optional_fg(k: u32) -> Self {
        VariantRules::new(false, Strength::Finite(k), false, true)
    }

    /// Optional-pull with gravity and thin walls.
    pub fn optional_wg(k: u32) -> Self {
        VariantRules::new(false, Strength::Finite(k), true, true)
    }

    /// Forced-pull with gravity and fixed blocks.
    pub fn forced_fg(k: u32) -> Self {
        VariantRules::new(true, Strength::Finite(k), false, true)
    }
}

impl fmt::Display for VariantRules {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pull {} {} {} {}",
            if self.forced { "!" } else { "?" },
            self.strength,
            if self.walls_allowed { "W" } else { "F" },
            if self.gravity { "G" } else { "-" },
        )
    }
}

/// A cell coordinate. Row 0 is the top row; gravity pulls toward larger rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub row: i32,
    pub col: i32,
}

impl Cell {
    pub fn new(row: i32, col: i32) -> Self {
        Cell { row, col }
    }

    pub fn step(&self, dir: Direction) -> Cell {
        let (dr, dc) = dir.delta();
        Cell { row: self.row + dr, col: self.col + dc }
    }

    pub fn back(&self, dir: Direction) -> Cell {
        self.step(dir.opposite())
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

pub const ALL_DIRECTIONS: [Direction; 4] =
    [Direction::Up, Direction::Down, Direction::Left, Direction::Right];

impl Direction {
    pub fn delta(&self) -> (i32, i32) {
        match self {
            Direction::Up => (-1, 0),
            Direction::Down => (1, 0),
            Direction::Left => (0, -1),
            Direction::Right => (0, 1),
        }
    }

    pub fn opposite(&self) -> Direction {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
        }
    }

    pub fn letter(&self) -> char {
        match self {
            Direction::Up => 'U',
            Direction::Down => 'D',
            Direction::Left => 'L',
            Direction::Right => 'R',
        }
    }

    pub fn from_letter(c: char) -> Option<Direction> {
        match c {
            'U' => Some(Direction::Up),
            'D' => Some(Direction::Down),
            'L' => Some(Direction::Left),
            'R' => Some(Direction::Right),
            _ => None,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A thin wall on the edge between two orthogonally adjacent cells.
/// Stored normalized with the lexicographically smaller cell first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Wall {
    a: Cell,
    b: Cell,
}

impl Wall {
    pub fn between(a: Cell, b: Cell) -> Wall {
        assert!(
            (a.row - b.row).abs() + (a.col - b.col).abs() == 1,
            "wall must join orthogonally adjacent cells"
        );
        if a <= b {
            Wall { a, b }
        } else {
            Wall { a: b, b: a }
        }
    }

    pub fn cells(&self) -> (Cell, Cell) {
        (self.a, self.b)
    }
}

/// One agent move: a direction plus how many blocks are pulled along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Move {
    pub direction: Direction,
    pub pull_count: u32,
}

impl Move {
    pub fn new(direction: Direction, pull_count: u32) -> Self {
        Move { direction, pull_count }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.direction.letter(), self.pull_count)
    }
}

/// Agent position plus the set of movable block positions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub agent: Cell,
    pub blocks: BTreeSet<Cell>,
}

impl Configuration {
    pub fn new(agent: Cell, blocks: BTreeSet<Cell>) -> Self {
        Configuration { agent, blocks }
    }
}

/// The playing field: grid dimensions, fixed material, walls, starting
/// block placement, and the rule switches. `agent_start` and `goal` are
/// optional so that gadget fragments (which have neither) share the same
/// machinery; strict puzzle files always carry both.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Board {
    pub height: i32,
    pub width: i32,
    pub fixed: BTreeSet<Cell>,
    pub walls: BTreeSet<Wall>,
    pub movable_start: BTreeSet<Cell>,
    pub agent_start: Option<Cell>,
    pub goal: Option<Cell>,
    pub rules: VariantRules,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoardError {
    #[error("missing or malformed header line")]
    BadHeader,
    #[error("grid line {0} has wrong length")]
    RaggedLine(usize),
    #[error("wrong number of grid lines")]
    BadLineCount,
    #[error("unknown glyph '{0}' at line {1}, column {2}")]
    UnknownGlyph(char, usize, usize),
    #[error("board has no agent")]
    NoAgent,
    #[error("board has multiple agents")]
    MultipleAgents,
    #[error("board has no goal")]
    NoGoal,
    #[error("board has multiple goals")]
    MultipleGoals,
    #[error("thin walls are not allowed in an F-variant board")]
    WallsNotAllowed,
    #[error("gravity board: initial blocks are not settled")]
    NotSettled,
    #[error("illegal move")]
    IllegalMove,
}

impl Board {
    pub fn in_bounds(&self, c: Cell) -> bool {
        c.row >= 0 && c.row < self.height && c.col >= 0 && c.col < self.width
    }

    pub fn is_fixed(&self, c: Cell) -> bool {
        !self.in_bounds(c) || self.fixed.contains(&c)
    }

    pub fn has_wall(&self, a: Cell, b: Cell) -> bool {
        self.walls.contains(&Wall::between(a, b))
    }

    /// True when the agent or a block may cross from `from` to `to`:
    /// `to` is in bounds, not fixed, and no wall separates the two cells.
    pub fn passable(&self, from: Cell, to: Cell) -> bool {
        !self.is_fixed(to) && !self.has_wall(from, to)
    }

    pub fn start_configuration(&self) -> Configuration {
        let agent = self.agent_start.expect("board has no agent start");
        Configuration::new(agent, self.movable_start.clone())
    }

    /// Largest pull count available for a step in `dir`: the agent's
    /// destination must be free, and the line of blocks directly behind the
    /// agent is counted up to strength, a gap, a wall, or fixed material.
    pub fn max_pull(&self, config: &Configuration, dir: Direction) -> u32 {
        let dest = config.agent.step(dir);
        if !self.passable(config.agent, dest) || config.blocks.contains(&dest) {
            return 0;
        }
        let mut count = 0u32;
        let mut front = config.agent; // cell the next pulled block moves into
        let mut cell = config.agent.back(dir);
        while self.rules.strength.allows(count + 1)
            && config.blocks.contains(&cell)
            && !self.has_wall(cell, front)
        {
            count += 1;
            front = cell;
            cell = cell.back(dir);
        }
        count
    }

    /// All legal moves in deterministic order: directions Up, Down, Left,
    /// Right; ascending pull count. Forced variants yield exactly one move
    /// per passable direction, with the maximal pull.
    pub fn legal_moves(&self, config: &Configuration) -> Vec<Move> {
        let mut moves = Vec::new();
        for dir in ALL_DIRECTIONS {
            let dest = config.agent.step(dir);
            if !self.passable(config.agent, dest) || config.blocks.contains(&dest) {
                continue;
            }
            let max = self.max_pull(config, dir);
            if self.rules.forced {
                moves.push(Move::new(dir, max));
            } else {
                for p in 0..=max {
                    moves.push(Move::new(dir, p));
                }
            }
        }
        moves
    }

    /// Apply a move, validating it first.
    pub fn apply_move(&self, config: &Configuration, mv: Move) -> Result<Configuration, BoardError> {
        let max = self.max_pull(config, mv.direction);
        let dest = config.agent.step(mv.direction);
        if !self.passable(config.agent, dest) || config.blocks.contains(&dest) {
            return Err(BoardError::IllegalMove);
        }
        if mv.pull_count > max {
            return Err(BoardError::IllegalMove);
        }
        if self.rules.forced && mv.pull_count != max {
            return Err(BoardError::IllegalMove);
        }
        Ok(self.apply_move_unchecked(config, mv))
    }

    /// Apply a move assumed legal: advance the agent, slide the pulled line
    /// one cell forward, then settle gravity if the variant has it.
    pub fn apply_move_unchecked(&self, config: &Configuration, mv: Move) -> Configuration {
        let mut blocks = config.blocks.clone();
        let agent = config.agent.step(mv.direction);
        // The line behind the agent advances: the block nearest the agent
        // moves into the agent's old cell, and so on down the line.
        let mut into = config.agent;
        let mut from = config.agent.back(mv.direction);
        for _ in 0..mv.pull_count {
            blocks.remove(&from);
            blocks.insert(into);
            into = from;
            from = from.back(mv.direction);
        }
        let mut next = Configuration::new(agent, blocks);
        if self.rules.gravity {
            next = self.settle_gravity(&next);
        }
        next
    }

    /// Let every movable block fall to rest. A block falls one cell while
    /// the cell below is in bounds, not fixed, not another block, not the
    /// agent's cell, and no wall lies on the lower edge. Column-by-column
    /// bottom-up scanning reaches the unique fixpoint.
    pub fn settle_gravity(&self, config: &Configuration) -> Configuration {
        let mut blocks: Vec<Cell> = config.blocks.iter().copied().collect();
        // Process lowest blocks first so support resolves in one pass per
        // column; iterate to fixpoint anyway to be independent of order.
        loop {
            let mut moved = false;
            blocks.sort_by(|a, b| b.row.cmp(&a.row).then(a.col.cmp(&b.col)));
            let occupied: BTreeSet<Cell> = blocks.iter().copied().collect();
            let mut occ = occupied;
            for b in blocks.iter_mut() {
                let mut cur = *b;
                loop {
                    let below = cur.step(Direction::Down);
                    if self.passable(cur, below) && !occ.contains(&below) && below != config.agent {
                        occ.remove(&cur);
                        occ.insert(below);
                        cur = below;
                        moved = true;
                    } else {
                        break;
                    }
                }
                *b = cur;
            }
            if !moved {
                break;
            }
        }
        Configuration::new(config.agent, blocks.into_iter().collect())
    }

    /// True when a configuration is already settled under gravity.
    pub fn is_settled(&self, config: &Configuration) -> bool {
        !self.rules.gravity || &self.settle_gravity(config) == config
    }

    pub fn is_goal(&self, config: &Configuration) -> bool {
        Some(config.agent) == self.goal
    }

    /// Validate the strict puzzle invariants (used after parsing a full
    /// puzzle file, not for gadget fragments).
    pub fn validate(&self) -> Result<(), BoardError> {
        if !self.rules.walls_allowed && !self.walls.is_empty() {
            return Err(BoardError::WallsNotAllowed);
        }
        let agent = self.agent_start.ok_or(BoardError::NoAgent)?;
        let _goal = self.goal.ok_or(BoardError::NoGoal)?;
        if self.rules.gravity {
            let start = Configuration::new(agent, self.movable_start.clone());
            if !self.is_settled(&start) {
                return Err(BoardError::NotSettled);
            }
        }
        Ok(())
    }
}

/// Parse the strict puzzle file format: header plus a doubled-resolution
/// grid. Exactly one agent and one goal are required.
pub fn parse_board(text: &str) -> Result<Board, BoardError> {
    let board = parse_grid(text)?;
    board.validate()?;
    Ok(board)
}

/// Parse a board fragment: same format, but the agent and goal are optional.
/// Used for gadget tile assets, which have neither.
pub fn parse_fragment(text: &str) -> Result<Board, BoardError> {
    let board = parse_grid(text)?;
    if !board.rules.walls_allowed && !board.walls.is_empty() {
        return Err(BoardError::WallsNotAllowed);
    }
    Ok(board)
}

fn parse_header(line: &str) -> Result<VariantRules, BoardError> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != 5 || parts[0] != "pull" {
        return Err(BoardError::BadHeader);
    }
    let forced = match parts[1] {
        "?" => false,
        "!" => true,
        _ => return Err(BoardError::BadHeader),
    };
    let strength = if parts[2] == "*" {
        Strength::Unbounded
    } else {
        let k: u32 = parts[2].parse().map_err(|_| BoardError::BadHeader)?;
        if k == 0 {
            return Err(BoardError::BadHeader);
        }
        Strength::Finite(k)
    };
    let walls_allowed = match parts[3] {
        "F" => false,
        "W" => true,
        _ => return Err(BoardError::BadHeader),
    };
    let gravity = match parts[4] {
        "G" => true,
        "-" => false,
        _ => return Err(BoardError::BadHeader),
    };
    Ok(VariantRules { forced, strength, walls_allowed, gravity })
}

fn parse_grid(text: &str) -> Result<Board, BoardError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(BoardError::BadHeader)?;
    let rules = parse_header(header)?;
    let grid: Vec<Vec<char>> = lines
        .map(|l| l.trim_end_matches(['\r']).chars().collect())
        .collect();
    if grid.len() < 3 || grid.len() % 2 == 0 {
        return Err(BoardError::BadLineCount);
    }
    let rows = grid.len();
    let cols = grid[0].len();
    if cols < 3 || cols % 2 == 0 {
        return Err(BoardError::RaggedLine(1));
    }
    // Trailing spaces may have been trimmed by editors; pad short lines.
    let mut g = grid;
    for (i, line) in g.iter_mut().enumerate() {
        if line.len() > cols {
            return Err(BoardError::RaggedLine(i + 2));
        }
        while line.len() < cols {
            line.push(' ');
        }
    }
    let height = ((rows - 1) / 2) as i32;
    let width = ((cols - 1) / 2) as i32;
    let mut fixed = BTreeSet::new();
    let mut walls = BTreeSet::new();
    let mut movable = BTreeSet::new();
    let mut agent = None;
    let mut goal = None;
    for (r, line) in g.iter().enumerate() {
        for (c, &ch) in line.iter().enumerate() {
            // The outer ring of slots is the implicit frame; ignore it.
            if r == 0 || r == rows - 1 || c == 0 || c == cols - 1 {
                continue;
            }
            let odd_r = r % 2 == 1;
            let odd_c = c % 2 == 1;
            match (odd_r, odd_c) {
                (true, true) => {
                    let cell = Cell::new((r as i32 - 1) / 2, (c as i32 - 1) / 2);
                    match ch {
                        '.' => {}
                        '#' => {
                            fixed.insert(cell);
                        }
                        'o' => {
                            movable.insert(cell);
                        }
                        'A' => {
                            if agent.replace(cell).is_some() {
                                return Err(BoardError::MultipleAgents);
                            }
                        }
                        'G' => {
                            if goal.replace(cell).is_some() {
                                return Err(BoardError::MultipleGoals);
                            }
                        }
                        _ => return Err(BoardError::UnknownGlyph(ch, r + 2, c + 1)),
                    }
                }
                (false, true) => {
                    // Horizontal wall slot between vertical neighbours.
                    let above = Cell::new((r as i32 - 2) / 2, (c as i32 - 1) / 2);
                    let below = Cell::new(r as i32 / 2, (c as i32 - 1) / 2);
                    match ch {
                        '-' => {
                            walls.insert(Wall::between(above, below));
                        }
                        ' ' => {}
                        _ => return Err(BoardError::UnknownGlyph(ch, r + 2, c + 1)),
                    }
                }
                (true, false) => {
                    // Vertical wall slot between horizontal neighbours.
                    let left = Cell::new((r as i32 - 1) / 2, (c as i32 - 2) / 2);
                    let right = Cell::new((r as i32 - 1) / 2, c as i32 / 2);
                    match ch {
                        '|' => {
                            walls.insert(Wall::between(left, right));
                        }
                        ' ' => {}
                        _ => return Err(BoardError::UnknownGlyph(ch, r + 2, c + 1)),
                    }
                }
                (false, false) => {
                    // Corner slot: ignored on parse.
                }
            }
        }
    }
    Ok(Board {
        height,
        width,
        fixed,
        walls,
        movable_start: movable,
        agent_start: agent,
        goal,
        rules,
    })
}

/// Canonical serialization: header, then the doubled-resolution grid with a
/// drawn outer frame and '+' corners.
pub fn serialize_board(board: &Board) -> String {
    let rows = (board.height * 2 + 1) as usize;
    let cols = (board.width * 2 + 1) as usize;
    let mut out = String::new();
    out.push_str(&board.rules.to_string());
    out.push('\n');
    for r in 0..rows {
        let mut line = String::with_capacity(cols);
        for c in 0..cols {
            let on_ring = r == 0 || r == rows - 1 || c == 0 || c == cols - 1;
            let odd_r = r % 2 == 1;
            let odd_c = c % 2 == 1;
            let ch = match (odd_r, odd_c) {
                (true, true) => {
                    let cell = Cell::new((r as i32 - 1) / 2, (c as i32 - 1) / 2);
                    if board.fixed.contains(&cell) {
                        '#'
                    } else if board.movable_start.contains(&cell) {
                        'o'
                    } else if board.agent_start == Some(cell) {
                        'A'
                    } else if board.goal == Some(cell) {
                        'G'
                    } else {
                        '.'
                    }
                }
                (false, true) => {
                    if on_ring {
                        '-'
                    } else {
                        let above = Cell::new((r as i32 - 2) / 2, (c as i32 - 1) / 2);
                        let below = Cell::new(r as i32 / 2, (c as i32 - 1) / 2);
                        if board.has_wall(above, below) {
                            '-'
                        } else {
                            ' '
                        }
                    }
                }
                (true, false) => {
                    if on_ring {
                        '|'
                    } else {
                        let left = Cell::new((r as i32 - 1) / 2, (c as i32 - 2) / 2);
                        let right = Cell::new((r as i32 - 1) / 2, c as i32 / 2);
                        if board.has_wall(left, right) {
                            '|'
                        } else {
                            ' '
                        }
                    }
                }
                (false, false) => '+',
            };
            line.push(ch);
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}
