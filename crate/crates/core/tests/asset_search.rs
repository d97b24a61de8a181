//! Developer search tool for gadget tile layouts. Ignored by default: run
//! with `cargo test --test asset_search -- --ignored --nocapture` to hunt
//! for fragments whose extracted behavior matches a target gadget.

use std::collections::BTreeSet;

use pullkit::board::{Board, Cell, VariantRules};
use pullkit::lts::{check_bisimulation, Lts};
use pullkit::solver::extract_boundary_lts;

fn diode_target() -> Lts {
    let mut l = Lts::new(vec!["L".into(), "R".into()], 1, 0);
    l.add_named(0, "L", "R", 0);
    l
}

fn toggle_target() -> Lts {
    let mut l = Lts::new(vec!["L".into(), "R".into()], 2, 0);
    l.add_named(0, "L", "R", 1);
    l.add_named(1, "R", "L", 0);
    l
}

fn oneway_target() -> Lts {
    let mut l = Lts::new(vec!["L".into(), "R".into()], 2, 0);
    l.add_named(0, "L", "R", 1);
    l
}

struct SearchSpec {
    height: i32,
    width: i32,
    left: Cell,
    right: Cell,
    rules: VariantRules,
    /// Additional rule variants the found asset must also satisfy.
    extra_rules: Vec<VariantRules>,
    max_blocks: usize,
    target: Lts,
}

fn board_from(spec: &SearchSpec, open_mask: &[Cell], blocks: &BTreeSet<Cell>) -> Board {
    let mut fixed = BTreeSet::new();
    for r in 0..spec.height {
        for c in 0..spec.width {
            let cell = Cell::new(r, c);
            if cell == spec.left || cell == spec.right {
                continue;
            }
            if !open_mask.contains(&cell) {
                fixed.insert(cell);
            }
        }
    }
    Board {
        height: spec.height,
        width: spec.width,
        fixed,
        walls: BTreeSet::new(),
        movable_start: blocks.clone(),
        agent_start: None,
        goal: None,
        rules: spec.rules,
    }
}

fn check(spec: &SearchSpec, board: &Board) -> bool {
    let ports = vec![("L".to_string(), spec.left), ("R".to_string(), spec.right)];
    let mut all_rules = vec![board.rules];
    all_rules.extend(spec.extra_rules.iter().copied());
    for rules in all_rules {
        let mut b = board.clone();
        b.rules = rules;
        let Ok(lts) = extract_boundary_lts(&b, &ports, &b.movable_start, 400_000) else {
            return false;
        };
        // Must actually be traversable from the initial state.
        let l = lts.port_index("L").unwrap();
        let r = lts.port_index("R").unwrap();
        if !lts.transitions.iter().any(|&(s, e, x, _)| s == 0 && e == l && x == r) {
            return false;
        }
        let obs = lts.observable();
        if !check_bisimulation(&obs, &spec.target) {
            return false;
        }
    }
    true
}

fn interior_cells(spec: &SearchSpec) -> Vec<Cell> {
    let mut v = Vec::new();
    for r in 1..spec.height - 1 {
        for c in 1..spec.width - 1 {
            v.push(Cell::new(r, c));
        }
    }
    v
}

/// Exhaustive search over interior open/fixed masks and block placements.
fn exhaustive_search(spec: &SearchSpec, stop_after: usize) -> Vec<Board> {
    let interior = interior_cells(spec);
    let n = interior.len();
    assert!(n <= 20, "interior too large for exhaustive search");
    let mut found = Vec::new();
    for mask in 0u32..(1 << n) {
        let open: Vec<Cell> =
            (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| interior[i]).collect();
        // Block subsets of the open cells, up to max_blocks, at least 1.
        let m = open.len();
        if m == 0 {
            continue;
        }
        let mut choose: Vec<Vec<usize>> = (0..m).map(|i| vec![i]).collect();
        let mut all_subsets: Vec<Vec<usize>> = choose.clone();
        for _ in 1..spec.max_blocks {
            let mut next = Vec::new();
            for c in &choose {
                for j in (c.last().unwrap() + 1)..m {
                    let mut c2 = c.clone();
                    c2.push(j);
                    next.push(c2);
                }
            }
            all_subsets.extend(next.clone());
            choose = next;
        }
        for subset in &all_subsets {
            let blocks: BTreeSet<Cell> = subset.iter().map(|&i| open[i]).collect();
            let board = board_from(spec, &open, &blocks);
            if check(spec, &board) {
                println!("FOUND ({} blocks):", blocks.len());
                println!("{}", pullkit::board::serialize_board(&board));
                found.push(board);
                if found.len() >= stop_after {
                    return found;
                }
            }
        }
    }
    found
}

/// Seeded random sampling for interiors too large to exhaust.
fn random_search(spec: &SearchSpec, samples: u64, seed: u64, stop_after: usize) -> Vec<Board> {
    use pullkit::rng::SplitMix64;
    let interior = interior_cells(spec);
    let n = interior.len();
    let mut rng = SplitMix64::new(seed);
    let mut found = Vec::new();
    for i in 0..samples {
        if i % 2_000_000 == 0 && i > 0 {
            println!("... {i} samples");
        }
        let mut open: Vec<Cell> = Vec::new();
        for &c in &interior {
            if rng.chance(11, 20) {
                open.push(c);
            }
        }
        if open.len() < 3 {
            continue;
        }
        let nb = 1 + rng.below(spec.max_blocks);
        let mut blocks = BTreeSet::new();
        for _ in 0..nb {
            blocks.insert(open[rng.below(open.len())]);
        }
        let board = board_from(spec, &open, &blocks);
        if check(spec, &board) {
            println!("FOUND ({} blocks):", blocks.len());
            println!("{}", pullkit::board::serialize_board(&board));
            found.push(board);
            if found.len() >= stop_after {
                return found;
            }
        }
        let _ = n;
    }
    found
}

#[test]
#[ignore]
fn search_diode_no_gravity() {
    // Several templates, increasing size, mixed port placements. The
    // asset must work under optional and forced pulling at strength 1.
    let base_rules = VariantRules::optional_f(1);
    let extra = vec![VariantRules::forced_f(1)];
    let templates: Vec<(i32, i32, Cell, Cell)> = vec![
        (5, 7, Cell::new(2, 0), Cell::new(2, 6)),
        (5, 7, Cell::new(1, 0), Cell::new(3, 6)),
        (5, 7, Cell::new(3, 0), Cell::new(1, 6)),
        (6, 6, Cell::new(2, 0), Cell::new(3, 5)),
        (6, 6, Cell::new(1, 0), Cell::new(4, 5)),
        (6, 6, Cell::new(4, 0), Cell::new(0, 3)),
        (6, 6, Cell::new(2, 0), Cell::new(0, 3)),
        (6, 6, Cell::new(3, 0), Cell::new(5, 3)),
    ];
    for (height, width, left, right) in templates {
        println!("== exhaustive {height}x{width} L={left} R={right}");
        let spec = SearchSpec {
            height,
            width,
            left,
            right,
            rules: base_rules,
            extra_rules: extra.clone(),
            max_blocks: 2,
            target: diode_target(),
        };
        let found = exhaustive_search(&spec, 3);
        if !found.is_empty() {
            return;
        }
    }
    // Random tier on bigger boards.
    for (height, width, left, right, seed) in [
        (6, 7, Cell::new(2, 0), Cell::new(3, 6), 1u64),
        (6, 7, Cell::new(1, 0), Cell::new(4, 6), 2),
        (7, 7, Cell::new(2, 0), Cell::new(4, 6), 3),
        (6, 8, Cell::new(2, 0), Cell::new(3, 7), 4),
    ] {
        println!("== random {height}x{width} L={left} R={right}");
        let spec = SearchSpec {
            height,
            width,
            left,
            right,
            rules: base_rules,
            extra_rules: extra.clone(),
            max_blocks: 3,
            target: diode_target(),
        };
        let found = random_search(&spec, 30_000_000, seed, 3);
        if !found.is_empty() {
            return;
        }
    }
    panic!("no diode found");
}

/// Ladder template: two horizontal corridors joined by vertical rungs,
/// two blocks anywhere in the corridors. Ports attach perpendicular to the
/// corridor ends so blocks can never be dragged onto an entry cell.
#[test]
#[ignore]
fn search_diode_ladder() {
    use pullkit::board::Strength;
    let extra = vec![
        VariantRules::forced_f(1),
        VariantRules::optional_f(3),
        VariantRules::new(true, Strength::Unbounded, false, false),
    ];
    let mut found_any = 0usize;
    let mut checked = 0u64;
    for width in [7i32, 8, 9, 10] {
        let inner: Vec<i32> = (1..width - 1).collect();
        let nrungs = inner.len();
        // Port columns: L above the west end of the top corridor, R below
        // the east end of the bottom corridor (and the 3 other variants).
        let wl = 1;
        let wr = width - 2;
        for rung_mask in 0u32..(1 << nrungs) {
            let rungs: Vec<i32> =
                (0..nrungs).filter(|&i| rung_mask & (1 << i) != 0).map(|i| inner[i]).collect();
            if rungs.is_empty() || rungs.len() > 3 {
                continue;
            }
            for (lp, rp) in [
                (Cell::new(0, wl), Cell::new(4, wr)),
                (Cell::new(0, wl), Cell::new(0, wr)),
                (Cell::new(4, wl), Cell::new(0, wr)),
            ] {
                // All corridor cells as block spots, two blocks.
                let mut spots: Vec<Cell> = Vec::new();
                for c in &inner {
                    spots.push(Cell::new(1, *c));
                    spots.push(Cell::new(3, *c));
                }
                for i in 0..spots.len() {
                    for j in (i + 1)..spots.len() {
                        let mut open: Vec<Cell> = Vec::new();
                        for c in &inner {
                            open.push(Cell::new(1, *c));
                            open.push(Cell::new(3, *c));
                        }
                        for r in &rungs {
                            open.push(Cell::new(2, *r));
                        }
                        let blocks: BTreeSet<Cell> = [spots[i], spots[j]].into_iter().collect();
                        let spec = SearchSpec {
                            height: 5,
                            width,
                            left: lp,
                            right: rp,
                            rules: VariantRules::optional_f(1),
                            extra_rules: extra.clone(),
                            max_blocks: 2,
                            target: diode_target(),
                        };
                        let board = board_from(&spec, &open, &blocks);
                        checked += 1;
                        if checked % 50_000 == 0 {
                            println!("... {checked} checked");
                        }
                        if check(&spec, &board) {
                            println!("LADDER FOUND w={width}:");
                            println!("{}", pullkit::board::serialize_board(&board));
                            found_any += 1;
                            if found_any >= 4 {
                                return;
                            }
                        }
                    }
                }
            }
        }
    }
    println!("ladder search done, found {found_any} after {checked}");
    assert!(found_any > 0);
}

#[test]
#[ignore]
fn search_oneway_gravity() {
    let spec = SearchSpec {
        height: 5,
        width: 6,
        left: Cell::new(2, 0),
        right: Cell::new(2, 5),
        rules: VariantRules::optional_fg(1),
        extra_rules: vec![],
        max_blocks: 2,
        target: oneway_target(),
    };
    let found = exhaustive_search(&spec, 5);
    println!("total found: {}", found.len());
    assert!(!found.is_empty());
}

#[test]
#[ignore]
fn search_toggle_gravity_k2() {
    let spec = SearchSpec {
        height: 5,
        width: 6,
        left: Cell::new(2, 0),
        right: Cell::new(2, 5),
        rules: VariantRules::optional_fg(2),
        extra_rules: vec![VariantRules::optional_fg(3)],
        max_blocks: 2,
        target: toggle_target(),
    };
    let found = exhaustive_search(&spec, 5);
    println!("total found: {}", found.len());
    assert!(!found.is_empty());
}
