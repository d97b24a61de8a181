//! Behavioral certification of gadget implementations: realizability (the
//! intended behavior is available) and harness equivalence (no exploitable
//! extra behavior). Together these stand in for informal dominated-move
//! arguments when strict bisimulation does not hold.

use std::collections::{BTreeMap, HashSet};

use crate::gadgets::{Endpoint, GadgetError, GadgetType, System};
use crate::lts::Lts;
use crate::rng::SplitMix64;
use crate::solver::Verdict;

/// True iff there is a function from abstract states to concrete states,
/// seeded at the initial states, under which every abstract transition is
/// realized by some concrete transition with the same (entry, exit) label.
/// `port_map` maps abstract location names to concrete port names.
pub fn check_realizability(
    concrete: &Lts,
    abstract_gadget: &GadgetType,
    abstract_initial: usize,
    port_map: &BTreeMap<String, String>,
) -> bool {
    // Translate abstract locations to concrete port indices.
    let mut loc_map = Vec::with_capacity(abstract_gadget.locations.len());
    for l in &abstract_gadget.locations {
        let name = match port_map.get(l) {
            Some(n) => n.clone(),
            None => l.clone(),
        };
        match concrete.port_index(&name) {
            Some(i) => loc_map.push(i),
            None => return false,
        }
    }
    let trans: Vec<(usize, usize, usize, usize)> =
        abstract_gadget.transitions.iter().copied().collect();

    fn search(
        concrete: &Lts,
        trans: &[(usize, usize, usize, usize)],
        loc_map: &[usize],
        assign: &mut Vec<Option<usize>>,
        seen: &mut HashSet<Vec<Option<usize>>>,
    ) -> bool {
        // Find an abstract transition whose source is assigned but which is
        // not yet realized under the current partial assignment.
        for &(s, e, x, n) in trans {
            let Some(cs) = assign[s] else { continue };
            let ce = loc_map[e];
            let cx = loc_map[x];
            match assign[n] {
                Some(cn) => {
                    if concrete.transitions.contains(&(cs, ce, cx, cn)) {
                        continue;
                    }
                    return false;
                }
                None => {
                    // Try every concrete successor for this label.
                    let candidates: Vec<usize> = concrete
                        .transitions
                        .iter()
                        .filter(|&&(a, b, c, _)| a == cs && b == ce && c == cx)
                        .map(|&(_, _, _, t)| t)
                        .collect();
                    for cn in candidates {
                        assign[n] = Some(cn);
                        if seen.insert(assign.clone())
                            && search(concrete, trans, loc_map, assign, seen)
                        {
                            return true;
                        }
                        assign[n] = None;
                    }
                    return false;
                }
            }
        }
        true
    }

    let mut assign = vec![None; abstract_gadget.states.len()];
    assign[abstract_initial] = Some(concrete.initial);
    let mut seen = HashSet::new();
    search(concrete, &trans, &loc_map, &mut assign, &mut seen)
}

/// The fixed, versioned harness family. The exhaustive tiers enumerate
/// every wiring of the device under test with up to two auxiliary gadgets
/// onto a bounded set of connection nodes; the random tier samples larger
/// harnesses from the given seed.
#[derive(Debug, Clone)]
pub struct HarnessFamily {
    /// Auxiliary gadgets available to harnesses, with initial states.
    pub aux: Vec<(GadgetType, usize)>,
    /// Hard cap on connection nodes in the exhaustive tiers.
    pub node_cap: usize,
    /// Cap on raw wirings per (aux choice, node count) enumeration block;
    /// the node count shrinks until the block fits.
    pub assignment_cap: u64,
    pub random_harnesses: usize,
    pub seed: u64,
    /// Per-harness solver budget.
    pub budget: usize,
}

impl HarnessFamily {
    /// Family v1. The auxiliary catalog mixes plain connectivity, one-way
    /// passages, remotely flippable state (the self-closing door, whose
    /// opening port can be visited far from its tunnel), and locking
    /// tunnels, plus the reference itself in every state. Exhaustive tiers
    /// cover zero, one, and two auxiliary gadgets, with the node count
    /// bounded both by `node_cap` and by the wiring-count cap.
    pub fn v1(reference: &GadgetType) -> Self {
        let mut aux: Vec<(GadgetType, usize)> = Vec::new();
        let toggle = crate::gadgets::builtin("1-toggle").unwrap();
        let diode = crate::gadgets::builtin("diode").unwrap();
        let scd = crate::gadgets::builtin("self-closing-door-3").unwrap();
        let l2t = crate::gadgets::builtin("locking-2-toggle").unwrap();
        aux.push((toggle, 0));
        aux.push((diode, 0));
        aux.push((scd.clone(), 0));
        aux.push((scd, 1));
        aux.push((l2t.clone(), 0));
        aux.push((l2t, 1));
        for s in 0..reference.states.len() {
            if !aux.iter().any(|(g, st)| g.name == reference.name && *st == s) {
                aux.push((reference.clone(), s));
            }
        }
        HarnessFamily {
            aux,
            node_cap: 6,
            assignment_cap: 600_000,
            random_harnesses: 100,
            seed: 0,
            budget: 1 << 22,
        }
    }

    /// Largest node count whose raw wiring count fits the cap, or None
    /// when even two nodes overflow it.
    fn max_nodes(&self, total_ports: usize) -> Option<usize> {
        let mut best = None;
        for n in 2..=self.node_cap {
            let mut count: u64 = 1;
            let mut overflow = false;
            for _ in 0..total_ports {
                count = match count.checked_mul(n as u64) {
                    Some(c) if c <= self.assignment_cap => c,
                    _ => {
                        overflow = true;
                        break;
                    }
                };
            }
            if !overflow {
                best = Some(n);
            }
        }
        best
    }
}

/// Result of a harness run: pass, or the first differing harness in
/// enumeration order.
#[derive(Debug, Clone)]
pub struct HarnessVerdict {
    pub pass: bool,
    pub checked: usize,
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone)]
pub struct Counterexample {
    pub index: usize,
    pub description: String,
    pub with_implementation: Verdict,
    pub with_reference: Verdict,
}

/// A device under test: a behavior (as a gadget type) whose locations are
/// named exactly like the reference's.
pub struct DeviceUnderTest {
    pub gadget: GadgetType,
    pub initial: usize,
}

impl DeviceUnderTest {
    /// Wrap an extracted or flattened LTS whose ports already carry the
    /// reference's location names.
    pub fn from_lts(lts: &Lts) -> DeviceUnderTest {
        let (gadget, initial) = GadgetType::from_lts("dut", lts);
        DeviceUnderTest { gadget, initial }
    }

    pub fn from_gadget(g: &GadgetType, initial: usize) -> DeviceUnderTest {
        DeviceUnderTest { gadget: g.clone(), initial }
    }
}

struct Harness {
    aux_choice: Vec<usize>,
    nodes: usize,
    /// node index per port: DUT ports first, then each aux gadget's ports.
    assignment: Vec<usize>,
}

impl Harness {
    fn describe(&self, family: &HarnessFamily) -> String {
        let aux: Vec<String> = self
            .aux_choice
            .iter()
            .map(|&i| {
                let (g, s) = &family.aux[i];
                format!("{}@{}", g.name, g.states[*s])
            })
            .collect();
        format!(
            "nodes={} start=n0 goal=n1 aux=[{}] wiring={:?}",
            self.nodes,
            aux.join(","),
            self.assignment
        )
    }

    fn build(&self, family: &HarnessFamily, device: &GadgetType, device_init: usize) -> System {
        let mut sys = System::new();
        let d = sys.add_gadget("dut", device.clone(), device_init);
        let mut gadget_ids = vec![d];
        for (i, &a) in self.aux_choice.iter().enumerate() {
            let (g, s) = &family.aux[a];
            gadget_ids.push(sys.add_gadget(&format!("aux{i}"), g.clone(), *s));
        }
        for n in 0..self.nodes {
            sys.add_node(&format!("n{n}"));
        }
        let mut pi = 0usize;
        for &gi in &gadget_ids {
            let nports = sys.gadgets[gi].0.locations.len();
            for p in 0..nports {
                let node = self.assignment[pi];
                sys.connect(Endpoint::Port { gadget: gi, port: p }, Endpoint::Node(node));
                pi += 1;
            }
        }
        sys.start = Some(Endpoint::Node(0));
        sys.goal = Some(Endpoint::Node(1));
        sys
    }
}

/// Canonical key under relabeling of nodes 2.. by first occurrence and
/// sorting of identical auxiliary gadgets.
fn canonical_key(aux_choice: &[usize], nodes: usize, assignment: &[usize], dut_ports: usize, family: &HarnessFamily) -> Vec<usize> {
    // Relabel nodes: 0 and 1 fixed, others by first use.
    let mut relabel: Vec<Option<usize>> = vec![None; nodes];
    relabel[0] = Some(0);
    if nodes > 1 {
        relabel[1] = Some(1);
    }
    let mut next = 2usize;
    let mut canon = Vec::with_capacity(assignment.len());
    for &n in assignment {
        let r = match relabel[n] {
            Some(r) => r,
            None => {
                let r = next;
                relabel[n] = Some(r);
                next += 1;
                r
            }
        };
        canon.push(r);
    }
    // Sort aux blocks that have identical gadget identity.
    let mut blocks: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut at = dut_ports;
    for &a in aux_choice {
        let len = family.aux[a].0.locations.len();
        blocks.push((a, canon[at..at + len].to_vec()));
        at += len;
    }
    blocks.sort();
    let mut key = canon[..dut_ports].to_vec();
    key.push(usize::MAX);
    for (a, block) in blocks {
        key.push(a);
        key.extend(block);
    }
    key
}

/// One side of a harness template: every gadget transition lifted to
/// global port indices (device ports first, then each auxiliary's ports).
struct SideTemplate {
    initial: Vec<u8>,
    /// (slot, state, next state, entry port, exit port)
    trans: Vec<(u8, u8, u8, u16, u16)>,
}

fn side_template(
    device: &GadgetType,
    device_init: usize,
    aux_choice: &[usize],
    family: &HarnessFamily,
) -> SideTemplate {
    let mut initial = vec![device_init as u8];
    let mut trans: Vec<(u8, u8, u8, u16, u16)> = Vec::new();
    for &(s, e, x, n) in &device.transitions {
        trans.push((0, s as u8, n as u8, e as u16, x as u16));
    }
    let mut base = device.locations.len();
    for (slot, &a) in aux_choice.iter().enumerate() {
        let (g, init) = &family.aux[a];
        initial.push(*init as u8);
        for &(s, e, x, n) in &g.transitions {
            trans.push((slot as u8 + 1, s as u8, n as u8, (base + e) as u16, (base + x) as u16));
        }
        base += g.locations.len();
    }
    SideTemplate { initial, trans }
}

/// Reusable scratch space for the per-harness reachability search.
struct FastSolver {
    seen: HashSet<u64>,
    queue: Vec<(u8, u64)>,
}

impl FastSolver {
    fn new() -> Self {
        FastSolver { seen: HashSet::with_capacity(1024), queue: Vec::with_capacity(1024) }
    }

    /// Joint states are packed into a u64: slot i occupies bits 8i..8i+8;
    /// the node index rides in the top byte.
    fn solve(&mut self, side: &SideTemplate, assignment: &[usize]) -> bool {
        let mut init: u64 = 0;
        for (i, &s) in side.initial.iter().enumerate() {
            init |= (s as u64) << (8 * i);
        }
        let pack = |node: usize, joint: u64| -> u64 { joint | ((node as u64) << 56) };
        self.seen.clear();
        self.queue.clear();
        self.seen.insert(pack(0, init));
        self.queue.push((0, init));
        let mut head = 0usize;
        while head < self.queue.len() {
            let (node, joint) = self.queue[head];
            head += 1;
            for &(slot, s, n, e, x) in &side.trans {
                if assignment[e as usize] != node as usize {
                    continue;
                }
                let shift = 8 * slot as u32;
                if (joint >> shift) & 0xFF != s as u64 {
                    continue;
                }
                let nj = (joint & !(0xFFu64 << shift)) | ((n as u64) << shift);
                let to = assignment[x as usize];
                if to == 1 {
                    return true;
                }
                let key = pack(to, nj);
                if self.seen.insert(key) {
                    self.queue.push((to as u8, nj));
                }
            }
        }
        false
    }
}

/// Run the full family: solvability with the implementation substituted for
/// the reference must match on every harness. Start is node 0, goal node 1.
pub fn harness_equivalence(
    implementation: &DeviceUnderTest,
    reference: &GadgetType,
    reference_initial: usize,
    family: &HarnessFamily,
) -> Result<HarnessVerdict, GadgetError> {
    let dut_ports = reference.locations.len();
    assert_eq!(
        implementation.gadget.locations, reference.locations,
        "implementation must expose the reference port set"
    );
    assert!(
        implementation.gadget.states.len() <= 255 && reference.states.len() <= 255,
        "state space too large for packing"
    );
    let mut checked = 0usize;
    let mut seen_keys: HashSet<Vec<usize>> = HashSet::new();
    let mut solver = FastSolver::new();

    let mut run_one = |solver: &mut FastSolver,
                       impl_side: &SideTemplate,
                       ref_side: &SideTemplate,
                       h: &Harness|
     -> Option<Counterexample> {
        checked += 1;
        let vi = solver.solve(impl_side, &h.assignment);
        let vr = solver.solve(ref_side, &h.assignment);
        if vi != vr {
            let replay = h.build(family, reference, reference_initial);
            return Some(Counterexample {
                index: checked,
                description: format!(
                    "{}\nreference-side system:\n{}",
                    h.describe(family),
                    crate::gadgets::serialize_system(&replay)
                ),
                with_implementation: if vi { Verdict::Solvable } else { Verdict::Unsolvable },
                with_reference: if vr { Verdict::Solvable } else { Verdict::Unsolvable },
            });
        }
        None
    };

    // Exhaustive tiers: 0, 1, 2 auxiliary gadgets.
    for aux_count in 0..=2usize {
        // Multisets of auxiliary gadgets.
        let mut choices: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..aux_count {
            let mut next = Vec::new();
            for c in &choices {
                let from = c.last().copied().unwrap_or(0);
                for a in from..family.aux.len() {
                    let mut c2 = c.clone();
                    c2.push(a);
                    next.push(c2);
                }
            }
            choices = next;
        }
        for aux_choice in choices {
            let total_ports: usize = dut_ports
                + aux_choice.iter().map(|&a| family.aux[a].0.locations.len()).sum::<usize>();
            let Some(max_nodes) = family.max_nodes(total_ports) else {
                continue;
            };
            let impl_side =
                side_template(&implementation.gadget, implementation.initial, &aux_choice, family);
            let ref_side = side_template(reference, reference_initial, &aux_choice, family);
            for nodes in 2..=max_nodes {
                // Mixed-radix enumeration of port -> node assignments that
                // actually use node nodes-1 (avoids recounting smaller n).
                let mut assignment = vec![0usize; total_ports];
                loop {
                    if assignment.iter().copied().max().unwrap_or(0) == nodes - 1 {
                        let key =
                            canonical_key(&aux_choice, nodes, &assignment, dut_ports, family);
                        if seen_keys.insert(key) {
                            let h = Harness {
                                aux_choice: aux_choice.clone(),
                                nodes,
                                assignment: assignment.clone(),
                            };
                            if let Some(ce) = run_one(&mut solver, &impl_side, &ref_side, &h) {
                                return Ok(HarnessVerdict {
                                    pass: false,
                                    checked,
                                    counterexample: Some(ce),
                                });
                            }
                        }
                    }
                    // increment
                    let mut i = 0;
                    loop {
                        if i == total_ports {
                            break;
                        }
                        assignment[i] += 1;
                        if assignment[i] < nodes {
                            break;
                        }
                        assignment[i] = 0;
                        i += 1;
                    }
                    if i == total_ports {
                        break;
                    }
                }
            }
        }
    }

    // Seeded random tier: larger harnesses.
    let mut rng = SplitMix64::new(family.seed);
    for _ in 0..family.random_harnesses {
        let aux_count = 2 + rng.below(3); // 2..=4
        let aux_choice: Vec<usize> =
            (0..aux_count).map(|_| rng.below(family.aux.len())).collect();
        let total_ports: usize = dut_ports
            + aux_choice.iter().map(|&a| family.aux[a].0.locations.len()).sum::<usize>();
        let nodes = 2 + rng.below(7); // 2..=8
        let assignment: Vec<usize> = (0..total_ports).map(|_| rng.below(nodes)).collect();
        let impl_side =
            side_template(&implementation.gadget, implementation.initial, &aux_choice, family);
        let ref_side = side_template(reference, reference_initial, &aux_choice, family);
        let h = Harness { aux_choice, nodes, assignment };
        if let Some(ce) = run_one(&mut solver, &impl_side, &ref_side, &h) {
            return Ok(HarnessVerdict { pass: false, checked, counterexample: Some(ce) });
        }
    }

    Ok(HarnessVerdict { pass: true, checked, counterexample: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::builtin;

    #[test]
    fn realizability_identity() {
        let l2t = builtin("locking-2-toggle").unwrap();
        let lts = l2t.to_lts(0);
        assert!(check_realizability(&lts, &l2t, 0, &BTreeMap::new()));
    }

    #[test]
    fn realizability_missing_tunnel_fails() {
        let l2t = builtin("locking-2-toggle").unwrap();
        let mut crippled = l2t.clone();
        crippled.transitions.retain(|&(_, e, _, _)| e != l2t.location_index("2a").unwrap());
        let lts = crippled.to_lts(0);
        assert!(!check_realizability(&lts, &l2t, 0, &BTreeMap::new()));
    }

    #[test]
    fn reference_substituted_for_itself_passes() {
        let toggle = builtin("1-toggle").unwrap();
        let dut = DeviceUnderTest::from_gadget(&toggle, 0);
        let mut family = HarnessFamily::v1(&toggle);
        family.assignment_cap = 5_000;
        family.random_harnesses = 20;
        let verdict = harness_equivalence(&dut, &toggle, 0, &family).unwrap();
        assert!(verdict.pass, "counterexample: {:?}", verdict.counterexample);
    }

    #[test]
    fn diode_substituted_for_toggle_fails() {
        let toggle = builtin("1-toggle").unwrap();
        // A diode with the toggle's port names: re-traversable a -> b.
        let mut fake = GadgetType::new("fake", &["s"], &["a", "b"]);
        fake.add("s", "a", "b", "s");
        let dut = DeviceUnderTest::from_gadget(&fake, 0);
        let family = HarnessFamily::v1(&toggle);
        let verdict = harness_equivalence(&dut, &toggle, 0, &family).unwrap();
        assert!(!verdict.pass, "a diode must not pass for a 1-toggle");
        let ce = verdict.counterexample.unwrap();
        assert_ne!(ce.with_implementation, ce.with_reference);
    }
}
