use std::collections::BTreeSet;
use pullkit::board::{Board, Cell, VariantRules};
use pullkit::lts::check_bisimulation;
use pullkit::reductions::assets::diode_target;
use pullkit::solver::extract_boundary_lts;

fn three_level() -> Board {
    // rows 0-2, cols 0-10
    let mut open: BTreeSet<Cell> = BTreeSet::new();
    let mut blocks: BTreeSet<Cell> = BTreeSet::new();
    for (r, c) in [(0,0),(0,1),(0,2),(0,3)] { open.insert(Cell::new(r,c)); }
    for c in [1,2,3,5,6,7,9,10] { open.insert(Cell::new(1,c)); }
    open.insert(Cell::new(1,4)); blocks.insert(Cell::new(1,4));
    for c in [5,6,7,9] { open.insert(Cell::new(2,c)); }
    open.insert(Cell::new(2,8)); blocks.insert(Cell::new(2,8));
    let mut fixed = BTreeSet::new();
    for r in 0..3 { for c in 0..11 {
        let cell = Cell::new(r,c);
        if !open.contains(&cell) { fixed.insert(cell); }
    }}
    Board { height: 3, width: 11, fixed, walls: BTreeSet::new(),
        movable_start: blocks, agent_start: None, goal: None,
        rules: VariantRules::optional_f(1) }
}

#[test]
fn probe_three_level_diode() {
    let board = three_level();
    let ports = vec![("in".to_string(), Cell::new(0,0)), ("out".to_string(), Cell::new(1,10))];
    for rules in [
        VariantRules::optional_f(1),
        VariantRules::forced_f(1),
        VariantRules::optional_f(3),
        VariantRules::new(false, pullkit::board::Strength::Unbounded, false, false),
        VariantRules::forced_f(3),
    ] {
        let mut b = board.clone();
        b.rules = rules;
        let lts = extract_boundary_lts(&b, &ports, &b.movable_start.clone(), 1 << 22).unwrap();
        let l = lts.port_index("in").unwrap();
        let r = lts.port_index("out").unwrap();
        let has_rl = lts.transitions.iter().any(|&(_, e, x, _)| e == r && x == l);
        let s0_lr_self = lts.transitions.iter().any(|&(s, e, x, t)| s == 0 && e == l && x == r && t == 0);
        let obs = lts.observable();
        let bisim = check_bisimulation(&obs, &diode_target().observable());
        println!("rules {rules}: states={} rl={} s0-lr-restoring={} bisim={} obs_states={}",
            lts.num_states, has_rl, s0_lr_self, bisim, obs.num_states);
    }
}

#[test]
fn probe_three_level_leak_witness() {
    use pullkit::solver::{solve_reachability, Verdict};
    let mut board = three_level();
    board.rules = VariantRules::optional_f(1);
    // Reverse solve: start at out, goal at in.
    board.agent_start = Some(Cell::new(1, 10));
    board.goal = Some(Cell::new(0, 0));
    let r = solve_reachability(&board, 1 << 22);
    println!("reverse verdict {:?}", r.verdict);
    if let Some(w) = r.witness {
        let mut cfg = board.start_configuration();
        for mv in w {
            let prev = cfg.agent;
            cfg = board.apply_move(&cfg, mv).unwrap();
            if mv.pull_count > 0 {
                println!("pull at {prev} dir {} -> agent {}", mv.direction, cfg.agent);
            }
        }
    }
}
