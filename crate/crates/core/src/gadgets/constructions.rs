//! Named gadget constructions: networks of catalog gadgets that simulate
//! other gadgets, each with a designated boundary whose port names match
//! the simulated target. Certified by realizability plus harness
//! equivalence (and bisimulation where it holds).

use crate::gadgets::{builtin, Endpoint, GadgetError, GadgetType, System};

/// A wired network with named boundary points and the gadget it simulates.
#[derive(Debug, Clone)]
pub struct Construction {
    pub name: String,
    pub system: System,
    pub boundary: Vec<(String, Endpoint)>,
    pub target: GadgetType,
    pub target_initial: usize,
}

pub const CONSTRUCTION_NAMES: [&str; 10] = [
    "l2t-from-nl2t",
    "l2t-from-leaf-l2t",
    "scd-diode",
    "scd-port-duplicator",
    "scd-port-triplicator",
    "scd-intermediate",
    "scd-directed-crossover",
    "undirected-crossover",
    "scd-door-duplicator",
    "scd-door",
];

/// Target used by the port duplicator: a self-closing door with two
/// equivalent opening ports.
pub fn scd_multi_open_target(opens: usize) -> GadgetType {
    let states = ["closed", "open"];
    let mut locs: Vec<String> = (1..=opens).map(|i| format!("O{i}")).collect();
    locs.push("t_in".into());
    locs.push("t_out".into());
    let loc_refs: Vec<&str> = locs.iter().map(|s| s.as_str()).collect();
    let mut g = GadgetType::new(&format!("scd-{opens}-open"), &states, &loc_refs);
    for s in states {
        for i in 1..=opens {
            let o = format!("O{i}");
            g.add(s, &o, &o, "open");
        }
    }
    g.add("open", "t_in", "t_out", "closed");
    g
}

/// Target used by the intermediate construction: two self-closing doors,
/// E opened from ports 1 and 3, F opened from ports 2 and 4.
pub fn interleaved_doors_target() -> GadgetType {
    let states = ["cc", "oc", "co", "oo"]; // (E, F) open flags
    let locs = ["p1", "p2", "p3", "p4", "E_in", "E_out", "F_in", "F_out"];
    let mut g = GadgetType::new("interleaved-doors", &states, &locs);
    let open_e = |s: &str| -> String {
        format!("o{}", &s[1..2])
    };
    let open_f = |s: &str| -> String {
        format!("{}o", &s[0..1])
    };
    for s in states {
        for p in ["p1", "p3"] {
            g.add(s, p, p, &open_e(s));
        }
        for p in ["p2", "p4"] {
            g.add(s, p, p, &open_f(s));
        }
    }
    for s in ["oc", "oo"] {
        let closed = format!("c{}", &s[1..2]);
        g.add(s, "E_in", "E_out", &closed);
    }
    for s in ["co", "oo"] {
        let closed = format!("{}c", &s[0..1]);
        g.add(s, "F_in", "F_out", &closed);
    }
    g
}

/// Target used by the door duplicator: one opening port controlling two
/// self-closing tunnels; traversing either closes both.
pub fn two_tunnel_door_target() -> GadgetType {
    let states = ["closed", "open"];
    let locs = ["O", "T1_in", "T1_out", "T2_in", "T2_out"];
    let mut g = GadgetType::new("two-tunnel-door", &states, &locs);
    for s in states {
        g.add(s, "O", "O", "open");
    }
    g.add("open", "T1_in", "T1_out", "closed");
    g.add("open", "T2_in", "T2_out", "closed");
    g
}

fn scd(sys: &mut System, id: &str) -> usize {
    sys.add_gadget(id, builtin("self-closing-door-3").unwrap(), 0)
}

/// A gated one-way passage from node `from` to node `to`: a self-closing
/// door whose opening port sits on the entry node. Always traversable by
/// opening first; never traversable backwards.
fn gated_oneway(sys: &mut System, id: &str, from: usize, to: usize) -> usize {
    let d = scd(sys, id);
    sys.connect(sys.port(d, "open_port"), Endpoint::Node(from));
    sys.connect(sys.port(d, "t_in"), Endpoint::Node(from));
    sys.connect(sys.port(d, "t_out"), Endpoint::Node(to));
    d
}

pub fn construction(name: &str) -> Result<Construction, GadgetError> {
    match name {
        "l2t-from-nl2t" => {
            // Two nondeterministic locking 2-toggles sharing a bottom
            // 1-toggle. Entering a top line runs down the inner tunnel,
            // across the shared toggle, and up the outer tunnel; the
            // nondeterministic choices select which tunnels stay usable.
            let mut sys = System::new();
            let nl2t = builtin("nondet-locking-2-toggle")?;
            let top2 = nl2t.state_index("top2").unwrap();
            let nl = sys.add_gadget("nl", nl2t.clone(), top2);
            let nr = sys.add_gadget("nr", nl2t, top2);
            let t = sys.add_gadget("t", builtin("1-toggle")?, 0);
            let x = sys.add_node("x");
            let y = sys.add_node("y");
            sys.connect(sys.port(nl, "2b"), Endpoint::Node(x));
            sys.connect(sys.port(nr, "2b"), Endpoint::Node(x));
            sys.connect(sys.port(t, "a"), Endpoint::Node(x));
            sys.connect(sys.port(nl, "1b"), Endpoint::Node(y));
            sys.connect(sys.port(nr, "1b"), Endpoint::Node(y));
            sys.connect(sys.port(t, "b"), Endpoint::Node(y));
            let boundary = vec![
                ("1a".to_string(), sys.port(nl, "2t")),
                ("1b".to_string(), sys.port(nl, "1t")),
                ("2a".to_string(), sys.port(nr, "2t")),
                ("2b".to_string(), sys.port(nr, "1t")),
            ];
            Ok(Construction {
                name: name.into(),
                system: sys,
                boundary,
                target: builtin("locking-2-toggle")?,
                target_initial: 0,
            })
        }
        "l2t-from-leaf-l2t" => {
            // Same shape built from locking 2-toggles that all start in
            // leaf states; the shared toggle is one tunnel of a leaf l2t.
            let mut sys = System::new();
            let l2t = builtin("locking-2-toggle")?;
            let leaf1 = l2t.state_index("leaf1").unwrap();
            let leaf2 = l2t.state_index("leaf2").unwrap();
            let nl = sys.add_gadget("nl", l2t.clone(), leaf2);
            let nr = sys.add_gadget("nr", l2t.clone(), leaf2);
            let t = sys.add_gadget("t", l2t, leaf1);
            let p = sys.add_node("p");
            let q = sys.add_node("q");
            sys.connect(sys.port(nl, "2a"), Endpoint::Node(p));
            sys.connect(sys.port(nr, "2a"), Endpoint::Node(p));
            sys.connect(sys.port(t, "1b"), Endpoint::Node(p));
            sys.connect(sys.port(nl, "1a"), Endpoint::Node(q));
            sys.connect(sys.port(nr, "1a"), Endpoint::Node(q));
            sys.connect(sys.port(t, "1a"), Endpoint::Node(q));
            let boundary = vec![
                ("1a".to_string(), sys.port(nl, "2b")),
                ("1b".to_string(), sys.port(nl, "1b")),
                ("2a".to_string(), sys.port(nr, "2b")),
                ("2b".to_string(), sys.port(nr, "1b")),
            ];
            Ok(Construction {
                name: name.into(),
                system: sys,
                boundary,
                target: builtin("locking-2-toggle")?,
                target_initial: 0,
            })
        }
        "scd-diode" => {
            // Opening port wired to the tunnel input: always passable
            // forward after a visit, never backward.
            let mut sys = System::new();
            let d = scd(&mut sys, "d");
            let n = sys.add_node("in");
            sys.connect(sys.port(d, "open_port"), Endpoint::Node(n));
            sys.connect(sys.port(d, "t_in"), Endpoint::Node(n));
            let boundary = vec![
                ("in".to_string(), Endpoint::Node(n)),
                ("out".to_string(), sys.port(d, "t_out")),
            ];
            Ok(Construction {
                name: name.into(),
                system: sys,
                boundary,
                target: builtin("diode")?,
                target_initial: 0,
            })
        }
        "scd-port-duplicator" | "scd-port-triplicator" => {
            let opens = if name == "scd-port-duplicator" { 2 } else { 3 };
            let mut sys = System::new();
            let c = scd(&mut sys, "core");
            let w = sys.add_node("w");
            sys.connect(sys.port(c, "open_port"), Endpoint::Node(w));
            let mut boundary = Vec::new();
            for i in 1..=opens {
                let u = sys.add_node(&format!("u{i}"));
                gated_oneway(&mut sys, &format!("in{i}"), u, w);
                gated_oneway(&mut sys, &format!("back{i}"), w, u);
                boundary.push((format!("O{i}"), Endpoint::Node(u)));
            }
            boundary.push(("t_in".to_string(), sys.port(c, "t_in")));
            boundary.push(("t_out".to_string(), sys.port(c, "t_out")));
            Ok(Construction {
                name: name.into(),
                system: sys,
                boundary,
                target: scd_multi_open_target(opens),
                target_initial: 0,
            })
        }
        "scd-intermediate" => {
            // Two port-duplicated doors with interleaved opening lines:
            // ports 1 and 3 open door E, ports 2 and 4 open door F.
            let mut sys = System::new();
            let mut boundary = vec![
                ("p1".to_string(), Endpoint::Node(usize::MAX)),
                ("p2".to_string(), Endpoint::Node(usize::MAX)),
                ("p3".to_string(), Endpoint::Node(usize::MAX)),
                ("p4".to_string(), Endpoint::Node(usize::MAX)),
            ];
            for (door, lines) in [("E", [0usize, 2]), ("F", [1, 3])] {
                let c = scd(&mut sys, &format!("core{door}"));
                let w = sys.add_node(&format!("w{door}"));
                sys.connect(sys.port(c, "open_port"), Endpoint::Node(w));
                for (k, &line) in lines.iter().enumerate() {
                    let u = sys.add_node(&format!("u{door}{k}"));
                    gated_oneway(&mut sys, &format!("in{door}{k}"), u, w);
                    gated_oneway(&mut sys, &format!("back{door}{k}"), w, u);
                    boundary[line].1 = Endpoint::Node(u);
                }
                boundary.push((format!("{door}_in"), sys.port(c, "t_in")));
                boundary.push((format!("{door}_out"), sys.port(c, "t_out")));
            }
            Ok(Construction {
                name: name.into(),
                system: sys,
                boundary,
                target: interleaved_doors_target(),
                target_initial: 0,
            })
        }
        "scd-directed-crossover" => {
            // Two independent gated one-way lines. The planar crossing of
            // the original figure carries no behavioral content here.
            let mut sys = System::new();
            let tl = sys.add_node("tl");
            let br = sys.add_node("br");
            let bl = sys.add_node("bl");
            let tr = sys.add_node("tr");
            gated_oneway(&mut sys, "d1", tl, br);
            gated_oneway(&mut sys, "d2", bl, tr);
            let boundary = vec![
                ("tl".to_string(), Endpoint::Node(tl)),
                ("tr".to_string(), Endpoint::Node(tr)),
                ("bl".to_string(), Endpoint::Node(bl)),
                ("br".to_string(), Endpoint::Node(br)),
            ];
            Ok(Construction {
                name: name.into(),
                system: sys,
                boundary,
                target: builtin("directed-crossover")?,
                target_initial: 0,
            })
        }
        "undirected-crossover" => {
            // Each undirected line becomes two directed lanes; the four
            // lane pairs cross through four directed crossovers.
            let mut sys = System::new();
            let dc = builtin("directed-crossover")?;
            let x1 = sys.add_gadget("x1", dc.clone(), 0);
            let x2 = sys.add_gadget("x2", dc.clone(), 0);
            let x3 = sys.add_gadget("x3", dc.clone(), 0);
            let x4 = sys.add_gadget("x4", dc, 0);
            let na = sys.add_node("a");
            let nb = sys.add_node("b");
            let nc = sys.add_node("c");
            let nd = sys.add_node("d");
            let mab = sys.add_node("mab");
            let mba = sys.add_node("mba");
            let mcd = sys.add_node("mcd");
            let mdc = sys.add_node("mdc");
            // a -> b lane
            sys.connect(sys.port(x1, "tl"), Endpoint::Node(na));
            sys.connect(sys.port(x1, "br"), Endpoint::Node(mab));
            sys.connect(sys.port(x2, "tl"), Endpoint::Node(mab));
            sys.connect(sys.port(x2, "br"), Endpoint::Node(nb));
            // b -> a lane
            sys.connect(sys.port(x3, "tl"), Endpoint::Node(nb));
            sys.connect(sys.port(x3, "br"), Endpoint::Node(mba));
            sys.connect(sys.port(x4, "tl"), Endpoint::Node(mba));
            sys.connect(sys.port(x4, "br"), Endpoint::Node(na));
            // c -> d lane
            sys.connect(sys.port(x1, "bl"), Endpoint::Node(nc));
            sys.connect(sys.port(x1, "tr"), Endpoint::Node(mcd));
            sys.connect(sys.port(x3, "bl"), Endpoint::Node(mcd));
            sys.connect(sys.port(x3, "tr"), Endpoint::Node(nd));
            // d -> c lane
            sys.connect(sys.port(x4, "bl"), Endpoint::Node(nd));
            sys.connect(sys.port(x4, "tr"), Endpoint::Node(mdc));
            sys.connect(sys.port(x2, "bl"), Endpoint::Node(mdc));
            sys.connect(sys.port(x2, "tr"), Endpoint::Node(nc));
            let boundary = vec![
                ("a".to_string(), Endpoint::Node(na)),
                ("b".to_string(), Endpoint::Node(nb)),
                ("c".to_string(), Endpoint::Node(nc)),
                ("d".to_string(), Endpoint::Node(nd)),
            ];
            Ok(Construction {
                name: name.into(),
                system: sys,
                boundary,
                target: builtin("crossover")?,
                target_initial: 0,
            })
        }
        "scd-door-duplicator" => {
            // A shared core door whose tunnel both outer tunnels route
            // through; per-tunnel entry and exit gates keep the routes
            // separate. Opening the core and entry gates hangs off the
            // single opening node; the exit gates open on their own entry
            // segments so a crossing exit is never available.
            let mut sys = System::new();
            let core = scd(&mut sys, "core");
            let n_open = sys.add_node("open");
            let a1 = sys.add_node("a1");
            let b1 = sys.add_node("b1");
            let x = sys.add_node("x");
            let y = sys.add_node("y");
            sys.connect(sys.port(core, "open_port"), Endpoint::Node(n_open));
            sys.connect(sys.port(core, "t_in"), Endpoint::Node(x));
            sys.connect(sys.port(core, "t_out"), Endpoint::Node(y));
            // Entry gates: open from the shared opening node.
            let ga = scd(&mut sys, "ga");
            sys.connect(sys.port(ga, "open_port"), Endpoint::Node(n_open));
            sys.connect(sys.port(ga, "t_in"), Endpoint::Node(a1));
            sys.connect(sys.port(ga, "t_out"), Endpoint::Node(x));
            let gb = scd(&mut sys, "gb");
            sys.connect(sys.port(gb, "open_port"), Endpoint::Node(n_open));
            sys.connect(sys.port(gb, "t_in"), Endpoint::Node(b1));
            sys.connect(sys.port(gb, "t_out"), Endpoint::Node(x));
            // Exit gates: open from the matching entry segment.
            let gxa = scd(&mut sys, "gxa");
            sys.connect(sys.port(gxa, "open_port"), Endpoint::Node(a1));
            sys.connect(sys.port(gxa, "t_in"), Endpoint::Node(y));
            let gxb = scd(&mut sys, "gxb");
            sys.connect(sys.port(gxb, "open_port"), Endpoint::Node(b1));
            sys.connect(sys.port(gxb, "t_in"), Endpoint::Node(y));
            let boundary = vec![
                ("O".to_string(), Endpoint::Node(n_open)),
                ("T1_in".to_string(), Endpoint::Node(a1)),
                ("T1_out".to_string(), sys.port(gxa, "t_out")),
                ("T2_in".to_string(), Endpoint::Node(b1)),
                ("T2_out".to_string(), sys.port(gxb, "t_out")),
            ];
            Ok(Construction {
                name: name.into(),
                system: sys,
                boundary,
                target: two_tunnel_door_target(),
                target_initial: 0,
            })
        }
        "scd-door" => {
            // The door gadget: a core door with a triplicated opening port
            // (one access pair per line that may need to open it), the
            // traverse tunnel re-opening the core on its way out, and the
            // close tunnel leaving it closed.
            let mut sys = System::new();
            let core = scd(&mut sys, "core");
            let w = sys.add_node("w");
            let x = sys.add_node("x");
            let y = sys.add_node("y");
            sys.connect(sys.port(core, "open_port"), Endpoint::Node(w));
            sys.connect(sys.port(core, "t_in"), Endpoint::Node(x));
            sys.connect(sys.port(core, "t_out"), Endpoint::Node(y));
            // Opening access pairs from the three lines that open the core.
            let u1 = sys.add_node("u1"); // the open tunnel's line
            let u2 = sys.add_node("u2"); // the traverse tunnel's exit segment
            let u3 = sys.add_node("u3"); // the close tunnel's entry segment
            for (i, u) in [(1usize, u1), (2, u2), (3, u3)] {
                gated_oneway(&mut sys, &format!("p{i}"), u, w);
                gated_oneway(&mut sys, &format!("q{i}"), w, u);
            }
            // Directed open tunnel: in at u1, out through a gated one-way.
            let o1 = sys.add_node("o1");
            gated_oneway(&mut sys, "oout", u1, o1);
            // Traverse tunnel: entry segment with its own gates, through
            // the core tunnel, out via u2 where the core is re-opened.
            let t0 = sys.add_node("t0");
            let ga = scd(&mut sys, "ga");
            sys.connect(sys.port(ga, "open_port"), Endpoint::Node(t0));
            sys.connect(sys.port(ga, "t_in"), Endpoint::Node(t0));
            sys.connect(sys.port(ga, "t_out"), Endpoint::Node(x));
            let gxa = scd(&mut sys, "gxa");
            sys.connect(sys.port(gxa, "open_port"), Endpoint::Node(t0));
            sys.connect(sys.port(gxa, "t_in"), Endpoint::Node(y));
            sys.connect(sys.port(gxa, "t_out"), Endpoint::Node(u2));
            let t1 = sys.add_node("t1");
            gated_oneway(&mut sys, "tout", u2, t1);
            // Close tunnel: entry at u3 (which can open the core first),
            // through the core, out via an exit gate opened at u3.
            let gb = scd(&mut sys, "gb");
            sys.connect(sys.port(gb, "open_port"), Endpoint::Node(u3));
            sys.connect(sys.port(gb, "t_in"), Endpoint::Node(u3));
            sys.connect(sys.port(gb, "t_out"), Endpoint::Node(x));
            let gxb = scd(&mut sys, "gxb");
            sys.connect(sys.port(gxb, "open_port"), Endpoint::Node(u3));
            sys.connect(sys.port(gxb, "t_in"), Endpoint::Node(y));
            let boundary = vec![
                ("o_in".to_string(), Endpoint::Node(u1)),
                ("o_out".to_string(), Endpoint::Node(o1)),
                ("t_in".to_string(), Endpoint::Node(t0)),
                ("t_out".to_string(), Endpoint::Node(t1)),
                ("c_in".to_string(), Endpoint::Node(u3)),
                ("c_out".to_string(), sys.port(gxb, "t_out")),
            ];
            Ok(Construction {
                name: name.into(),
                system: sys,
                boundary,
                target: builtin("door")?,
                target_initial: builtin("door")?.state_index("closed").unwrap(),
            })
        }
        other => Err(GadgetError::UnknownGadget(other.to_string())),
    }
}
