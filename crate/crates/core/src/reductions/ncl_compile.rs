//! Compiler from constraint graphs to pulling-block boards.
//!
//! Each coarse layout cell becomes a 20 by 20 tile. An edge becomes a
//! five-slot block lane placed on the first route tile out of its first
//! endpoint, with chamber corridors running from both endpoint junction
//! rooms to the lane pockets. Unused tiles are plaza crossings forming the
//! public network, which reaches lane interiors and crosses routes through
//! guarded vertical crossings over the lane's transit slots.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::board::{Board, Cell, VariantRules};
use crate::ncl::{NclGraph, VertexKind};
use crate::reductions::{layout_graph, Coarse, LayoutConstraints, LayoutError, OrthogonalLayout};

pub const TILE: i32 = 20;
/// Layout cells are spread by this factor so that every route has
/// intermediate tiles and every lane tile has plaza on both flanks.
pub const SCALE: i32 = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error("generic vertices cannot be compiled; only AND and OR")]
    GenericVertex,
    #[error("unsupported rule variant for this reduction")]
    UnsupportedVariant,
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

#[derive(Debug, Clone)]
pub struct ManifestEntry {
    pub asset: String,
    pub tile_row: i32,
    pub tile_col: i32,
    pub rotation: u8,
}

#[derive(Debug, Clone)]
pub struct CompiledBoard {
    pub board: Board,
    pub manifest: Vec<ManifestEntry>,
}

pub fn render_manifest(entries: &[ManifestEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        let _ = writeln!(out, "asset {} {} {} {}", e.asset, e.tile_row, e.tile_col, e.rotation);
    }
    out
}

/// A board under construction: everything starts fixed and cells get
/// carved open, with blocks and markers placed afterwards.
pub struct Canvas {
    pub height: i32,
    pub width: i32,
    open: BTreeSet<Cell>,
    blocks: BTreeSet<Cell>,
    goal: Option<Cell>,
    agent: Option<Cell>,
}

impl Canvas {
    pub fn new(height: i32, width: i32) -> Canvas {
        Canvas {
            height,
            width,
            open: BTreeSet::new(),
            blocks: BTreeSet::new(),
            goal: None,
            agent: None,
        }
    }

    pub fn carve(&mut self, cell: Cell) {
        assert!(
            cell.row >= 0 && cell.row < self.height && cell.col >= 0 && cell.col < self.width,
            "carve out of bounds at {cell}"
        );
        self.open.insert(cell);
    }

    pub fn carve_run(&mut self, from: Cell, to: Cell) {
        assert!(from.row == to.row || from.col == to.col, "runs are axis-aligned");
        let dr = (to.row - from.row).signum();
        let dc = (to.col - from.col).signum();
        let mut cur = from;
        loop {
            self.carve(cur);
            if cur == to {
                break;
            }
            cur = Cell::new(cur.row + dr, cur.col + dc);
        }
    }

    pub fn is_open(&self, cell: Cell) -> bool {
        self.open.contains(&cell)
    }

    pub fn place_block(&mut self, cell: Cell) {
        assert!(self.open.contains(&cell), "block on fixed cell {cell}");
        self.blocks.insert(cell);
    }

    pub fn set_goal(&mut self, cell: Cell) {
        assert!(self.open.contains(&cell));
        self.goal = Some(cell);
    }

    pub fn set_agent(&mut self, cell: Cell) {
        assert!(self.open.contains(&cell));
        self.agent = Some(cell);
    }

    pub fn into_board(self, rules: VariantRules) -> Board {
        let mut fixed = BTreeSet::new();
        for r in 0..self.height {
            for c in 0..self.width {
                let cell = Cell::new(r, c);
                if !self.open.contains(&cell) {
                    fixed.insert(cell);
                }
            }
        }
        Board {
            height: self.height,
            width: self.width,
            fixed,
            walls: BTreeSet::new(),
            movable_start: self.blocks,
            agent_start: self.agent,
            goal: self.goal,
            rules,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    North,
    South,
    West,
    East,
}

impl Side {
    fn of_step(from: Coarse, to: Coarse) -> Side {
        if to.0 < from.0 {
            Side::North
        } else if to.0 > from.0 {
            Side::South
        } else if to.1 < from.1 {
            Side::West
        } else {
            Side::East
        }
    }
}

pub const CORRIDOR_OFFSET: i32 = 9;

fn edge_cell(tile: Coarse, side: Side, offset: i32) -> Cell {
    let base_r = tile.0 * TILE;
    let base_c = tile.1 * TILE;
    match side {
        Side::North => Cell::new(base_r, base_c + offset),
        Side::South => Cell::new(base_r + TILE - 1, base_c + offset),
        Side::West => Cell::new(base_r + offset, base_c),
        Side::East => Cell::new(base_r + offset, base_c + TILE - 1),
    }
}

fn center_cell(tile: Coarse) -> Cell {
    Cell::new(tile.0 * TILE + CORRIDOR_OFFSET, tile.1 * TILE + CORRIDOR_OFFSET)
}

/// Carve a corridor through a tile joining its edge points via the center.
fn carve_corridor(canvas: &mut Canvas, tile: Coarse, ends: &[(Side, i32)]) {
    let center = center_cell(tile);
    canvas.carve(center);
    for &(side, offset) in ends {
        let ec = edge_cell(tile, side, offset);
        match side {
            Side::North | Side::South => {
                let corner = Cell::new(center.row, ec.col);
                canvas.carve_run(ec, corner);
                canvas.carve_run(corner, center);
            }
            Side::West | Side::East => {
                let corner = Cell::new(ec.row, center.col);
                canvas.carve_run(ec, corner);
                canvas.carve_run(corner, center);
            }
        }
    }
}

/// Plaza tile: a two-wide open cross joining all four neighbors.
fn carve_plaza(canvas: &mut Canvas, tile: Coarse) {
    let base_r = tile.0 * TILE;
    let base_c = tile.1 * TILE;
    for o in [CORRIDOR_OFFSET, CORRIDOR_OFFSET + 1] {
        canvas.carve_run(Cell::new(base_r + o, base_c), Cell::new(base_r + o, base_c + TILE - 1));
        canvas.carve_run(Cell::new(base_r, base_c + o), Cell::new(base_r + TILE - 1, base_c + o));
    }
}

/// Local frame for lane tiles. The canonical lane runs west to east with
/// its `a` endpoint on the west side; other orientations map through this.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub tile: Coarse,
    pub a_side: Side,
}

impl Frame {
    fn map(&self, lr: i32, lc: i32) -> Cell {
        let (r, c) = match self.a_side {
            Side::West => (lr, lc),
            Side::East => (lr, TILE - 1 - lc),
            Side::North => (lc, lr),
            Side::South => (TILE - 1 - lc, lr),
        };
        Cell::new(self.tile.0 * TILE + r, self.tile.1 * TILE + c)
    }

    fn rotation_code(&self) -> u8 {
        match self.a_side {
            Side::West => 0,
            Side::North => 1,
            Side::East => 2,
            Side::South => 3,
        }
    }
}

/// Which feature a lane end carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndFeature {
    /// Full public crossing over the end's transit slot.
    Public,
    /// Goal pocket over the end's resting slot; no crossing.
    Goal,
    /// No feature.
    Plain,
}

/// Lane geometry, canonical local coordinates: lane row 9, pockets at
/// columns 4 and 10, slots 5..9, blocks resting at slots 5 or 9.
pub struct LaneSpec {
    pub frame: Frame,
    /// Block rests at the `a`-side slot (column 5) when true, else at the
    /// `b`-side slot (column 9).
    pub block_at_a: bool,
    pub a_feature: EndFeature,
    pub b_feature: EndFeature,
}

pub struct LanePorts {
    pub pocket_a: Cell,
    pub pocket_b: Cell,
    pub slots: Vec<Cell>,
    pub goal: Option<Cell>,
}

/// Carve a door-dance guard: a one-way corridor whose traversal drags a
/// door block aside and restores it, used to guard the public crossings
/// through the lane's transit slots. An agent trying to extract a lane
/// block into the guard's exit cell ends up behind the block facing the
/// guard's one-way interior and is trapped. `path(step, lane)` maps guard
/// coordinates to the canvas: `step` runs 0..=6 along the guard from its
/// entry to its exit, `lane` 0 for the walk row and 1 for the block row.
fn carve_guard(canvas: &mut Canvas, at: impl Fn(i32, i32) -> Cell) {
    // Walk level: entry, three climb cells, ceiling (fixed), exit step.
    for step in [0, 1, 2, 3, 5, 6] {
        canvas.carve(at(step, 0));
    }
    // Block level: approach cells, the door block home, shed cell.
    for step in [1, 2, 3, 5] {
        canvas.carve(at(step, 1));
    }
    canvas.carve(at(4, 1));
    canvas.place_block(at(4, 1));
}

/// Carve the lane core plus its chamber stubs and guarded public
/// crossings.
///
/// Pull safety: every cell orthogonally adjacent to a slot either has a
/// fixed continuation (so the pull cannot happen) or is a guard exit whose
/// puller is trapped behind the extracted block.
pub fn carve_lane(canvas: &mut Canvas, spec: &LaneSpec) -> LanePorts {
    let f = &spec.frame;
    for lc in 4..=10 {
        canvas.carve(f.map(9, lc));
    }
    let pocket_a = f.map(9, 4);
    let pocket_b = f.map(9, 10);
    let slots: Vec<Cell> = (5..=9).map(|lc| f.map(9, lc)).collect();

    // Chamber stub a: edge offset 9, approaching the pocket from local
    // south. Chamber stub b mirrored, approaching from local north.
    canvas.carve(f.map(9, 0));
    canvas.carve(f.map(9, 1));
    canvas.carve(f.map(10, 1));
    canvas.carve_run(f.map(10, 2), f.map(10, 4));
    canvas.carve(f.map(9, 19));
    canvas.carve(f.map(9, 18));
    canvas.carve(f.map(8, 18));
    canvas.carve_run(f.map(8, 17), f.map(8, 10));

    let mut goal = None;
    let has_zone = spec.a_feature == EndFeature::Public || spec.b_feature == EndFeature::Public;

    if has_zone {
        // Guarded access zone over the transit slot at local column 6.
        // Both guards point INTO the zone, so an agent trying to pull a
        // mid-shift lane block out of the lane ends up behind the block
        // facing the wrong way through a guard and is trapped. The zone's
        // only onward exits are the lane's own clear sides, which lead to
        // the endpoint chambers exactly when the corresponding constraint
        // edge points at them.
        canvas.carve(f.map(8, 6));
        canvas.carve(f.map(10, 6));
        // North guard: entry at the top (row 1), exit onto (8,6).
        carve_guard(canvas, |step, lane| f.map(1 + step, 6 - lane));
        canvas.carve_run(f.map(0, 6), f.map(0, 9));
        // South guard: entry at the bottom (row 17), exit onto (10,6).
        carve_guard(canvas, |step, lane| f.map(17 - step, 6 - lane));
        canvas.carve_run(f.map(19, 6), f.map(19, 9));
    }

    match spec.a_feature {
        EndFeature::Goal => {
            let g = f.map(8, 5);
            canvas.carve(g);
            goal = Some(g);
        }
        EndFeature::Public | EndFeature::Plain => {}
    }
    match spec.b_feature {
        EndFeature::Goal => {
            let g = f.map(10, 9);
            canvas.carve(g);
            goal = Some(g);
        }
        EndFeature::Public | EndFeature::Plain => {}
    }

    let block = if spec.block_at_a { slots[0] } else { slots[4] };
    canvas.place_block(block);

    LanePorts { pocket_a, pocket_b, slots, goal }
}

/// Compile an AND/OR constraint graph into a pulling-block board. The
/// rules must be a no-gravity variant; both optional and forced pulling
/// are supported at any strength.
pub fn compile_ncl(
    graph: &NclGraph,
    layout: Option<OrthogonalLayout>,
    rules: VariantRules,
) -> Result<CompiledBoard, CompileError> {
    if graph.kinds.iter().any(|k| *k == VertexKind::Generic) {
        return Err(CompileError::GenericVertex);
    }
    if rules.gravity {
        return Err(CompileError::UnsupportedVariant);
    }
    let layout = match layout {
        Some(l) => l,
        None => {
            let edges: Vec<(usize, usize)> = graph.edges.iter().map(|e| (e.u, e.v)).collect();
            let mut constraints = LayoutConstraints::default();
            for (vi, kind) in graph.kinds.iter().enumerate() {
                if *kind == VertexKind::And {
                    let reds: Vec<usize> = graph
                        .edges
                        .iter()
                        .enumerate()
                        .filter(|(_, e)| {
                            e.color == crate::ncl::EdgeColor::Red && (e.u == vi || e.v == vi)
                        })
                        .map(|(i, _)| i)
                        .collect();
                    if reds.len() == 2 {
                        constraints.opposite_pairs.push((vi, reds[0], reds[1]));
                    }
                }
            }
            layout_graph(graph.vertex_ids.len(), &edges, &constraints)?
        }
    };

    let scale = |c: Coarse| -> Coarse { (c.0 * SCALE + 1, c.1 * SCALE + 1) };
    let tile_rows = layout.rows * SCALE + 1;
    let tile_cols = layout.cols * SCALE + 1;
    let mut canvas = Canvas::new(tile_rows * TILE, tile_cols * TILE);

    let mut tile_routes: Vec<Vec<Coarse>> = Vec::new();
    for route in &layout.routes {
        let mut tiles = vec![scale(route[0])];
        for w in route.windows(2) {
            let a = scale(w[0]);
            let b = scale(w[1]);
            let dr = (b.0 - a.0).signum();
            let dc = (b.1 - a.1).signum();
            let mut cur = a;
            while cur != b {
                cur = (cur.0 + dr, cur.1 + dc);
                tiles.push(cur);
            }
        }
        tile_routes.push(tiles);
    }

    let mut manifest: Vec<ManifestEntry> = Vec::new();
    let mut used_tiles: BTreeSet<Coarse> = BTreeSet::new();
    for v in &layout.vertices {
        used_tiles.insert(scale(*v));
    }
    for tr in &tile_routes {
        for t in tr {
            used_tiles.insert(*t);
        }
    }

    // Vertex junction rooms.
    let mut vertex_sides: Vec<Vec<(Side, usize)>> = vec![Vec::new(); layout.vertices.len()];
    for (ei, tr) in tile_routes.iter().enumerate() {
        let (u, v) = (graph.edges[ei].u, graph.edges[ei].v);
        vertex_sides[u].push((Side::of_step(tr[0], tr[1]), ei));
        vertex_sides[v].push((Side::of_step(tr[tr.len() - 1], tr[tr.len() - 2]), ei));
    }
    for (vi, vertex) in layout.vertices.iter().enumerate() {
        let tile = scale(*vertex);
        let ends: Vec<(Side, i32)> =
            vertex_sides[vi].iter().map(|&(s, _)| (s, CORRIDOR_OFFSET)).collect();
        carve_corridor(&mut canvas, tile, &ends);
        manifest.push(ManifestEntry {
            asset: match graph.kinds[vi] {
                VertexKind::And => "and-junction".into(),
                VertexKind::Or => "or-junction".into(),
                VertexKind::Generic => unreachable!(),
            },
            tile_row: tile.0,
            tile_col: tile.1,
            rotation: 0,
        });
    }

    // Lanes and route corridors.
    let mut goal_cell = None;
    for (ei, tr) in tile_routes.iter().enumerate() {
        let edge = &graph.edges[ei];
        let lane_tile = tr[1];
        let a_side = Side::of_step(tr[1], tr[0]);
        let is_target = ei == graph.target;
        // The block opposes the orientation: pointing toward v rests the
        // block at the u-side slot.
        let block_at_a = edge.toward_v;
        let goal_on_a = is_target && block_at_a;
        let goal_on_b = is_target && !block_at_a;
        let spec = LaneSpec {
            frame: Frame { tile: lane_tile, a_side },
            block_at_a,
            a_feature: if goal_on_a { EndFeature::Goal } else { EndFeature::Public },
            b_feature: if goal_on_b { EndFeature::Goal } else { EndFeature::Plain },
        };
        let ports = carve_lane(&mut canvas, &spec);
        if let Some(g) = ports.goal {
            canvas.set_goal(g);
            goal_cell = Some(g);
        }
        manifest.push(ManifestEntry {
            asset: format!(
                "lane{}{}",
                if goal_on_a {
                    "-goal-a"
                } else if goal_on_b {
                    "-goal-b"
                } else {
                    ""
                },
                if block_at_a { "-block-a" } else { "-block-b" }
            ),
            tile_row: lane_tile.0,
            tile_col: lane_tile.1,
            rotation: spec.frame.rotation_code(),
        });
        for (i, t) in tr.iter().enumerate() {
            if i == 0 || i == tr.len() - 1 || *t == lane_tile {
                continue;
            }
            let prev = tr[i - 1];
            let next = tr[i + 1];
            let ends = [
                (Side::of_step(*t, prev), CORRIDOR_OFFSET),
                (Side::of_step(*t, next), CORRIDOR_OFFSET),
            ];
            carve_corridor(&mut canvas, *t, &ends);
            let straight = prev.0 == next.0 || prev.1 == next.1;
            manifest.push(ManifestEntry {
                asset: if straight { "corridor".into() } else { "corner".to_string() },
                tile_row: t.0,
                tile_col: t.1,
                rotation: 0,
            });
        }
    }

    // Plazas everywhere else.
    for tr in 0..tile_rows {
        for tc in 0..tile_cols {
            let t = (tr, tc);
            if !used_tiles.contains(&t) {
                carve_plaza(&mut canvas, t);
            }
        }
    }

    // Agent start: the public plaza cell nearest the goal, row-major
    // tiebreak (the board is sound from any public start).
    let goal = goal_cell.expect("target edge produced a goal cell");
    let mut best: Option<(i32, Cell)> = None;
    for tr in 0..tile_rows {
        for tc in 0..tile_cols {
            let t = (tr, tc);
            if used_tiles.contains(&t) {
                continue;
            }
            let base = Cell::new(tr * TILE, tc * TILE);
            for o in [CORRIDOR_OFFSET, CORRIDOR_OFFSET + 1] {
                for i in 0..TILE {
                    for cell in [
                        Cell::new(base.row + o, base.col + i),
                        Cell::new(base.row + i, base.col + o),
                    ] {
                        if !canvas.is_open(cell) {
                            continue;
                        }
                        let d = (cell.row - goal.row).abs() + (cell.col - goal.col).abs();
                        let better = match best {
                            None => true,
                            Some((bd, bc)) => {
                                d < bd || (d == bd && (cell.row, cell.col) < (bc.row, bc.col))
                            }
                        };
                        if better {
                            best = Some((d, cell));
                        }
                    }
                }
            }
        }
    }
    let agent = best.expect("board has plaza cells").1;
    canvas.set_agent(agent);

    let board = canvas.into_board(rules);
    Ok(CompiledBoard { board, manifest })
}
