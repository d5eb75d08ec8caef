//! Gadget library and reduction compiler: monotone rectilinear SAT instances
//! compile to labeled 01-embeddability instances, which in turn compile to
//! bend-budget instances; plus the structural variants and the feasible-flow
//! repair utility.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::decomposition::DecompTree;
use crate::oracle::EdgeConstraint;
use crate::plane_graph::{build_plane_graph, Dart, EdgeId, PlaneGraph, VertexId};
use crate::rep::{FixedAngle, KandinskyRepresentation};
use crate::solver::{solve, Mode, SolveError, SolverConfig};

#[derive(Debug, Error)]
pub enum HardnessError {
    #[error("no interval gadget for [{lo}, {hi}]")]
    UnsupportedInterval { lo: i32, hi: i32 },
    #[error("clause {clause} mixes positive and negative literals")]
    MixedClause { clause: usize },
    #[error("rectilinear structure invalid: {0}")]
    CrossingRepresentation(String),
    #[error("cannot pin angles: {0}")]
    UnfixableAngles(String),
    #[error("flow hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("unreadable instance: {0}")]
    BadFormat(String),
}

/// Plane graph with a 0/1 edge labeling, the angle assignment compiled
/// gadgets rely on, and the designated role edges gluing attaches to.
#[derive(Debug, Clone)]
pub struct Labeled01Graph {
    pub graph: PlaneGraph,
    /// indexed by edge; true marks a 1-edge
    pub one_edge: Vec<bool>,
    pub fixed_angles: Vec<FixedAngle>,
    /// role darts with the gadget interior on their right
    pub inputs: Vec<Dart>,
    /// role darts with the gadget exterior on their right
    pub outputs: Vec<Dart>,
    /// edge order whose every prefix is connected, encloses only complete
    /// faces, and keeps each vertex's present edges rotation-contiguous;
    /// the left comb over it is a valid decomposition tree
    pub glue_order: Vec<EdgeId>,
}

impl Labeled01Graph {
    pub fn zero_edges(&self) -> Vec<EdgeId> {
        self.graph
            .edges()
            .filter(|e| !self.one_edge[e.index()])
            .collect()
    }

    pub fn one_edges(&self) -> Vec<EdgeId> {
        self.graph
            .edges()
            .filter(|e| self.one_edge[e.index()])
            .collect()
    }

    pub fn glue_tree(&self) -> DecompTree {
        comb_tree(&self.glue_order)
    }

    /// Exact-bend embeddability (0-edges straight, 1-edges one bend) decided
    /// by the table solver, so instances far beyond oracle scale work.
    /// Degree-1 vertices are shielded with four-cycles first.
    pub fn decide(&self) -> Result<bool, SolveError> {
        let (g, constraints, angles, order) = self.shielded();
        let cfg = SolverConfig {
            mode: Mode::Optimal,
            rho_cap: None,
            per_edge_bend_cap: None,
            edge_constraints: constraints,
            fixed_angles: angles,
            corner_pins: Vec::new(),
            orthogonal_only: true,
        };
        match solve(&g, &comb_tree(&order), &cfg) {
            Ok((bends, _, _)) => {
                debug_assert_eq!(bends as usize, self.one_edge.iter().filter(|&&b| b).count());
                Ok(true)
            }
            Err(SolveError::Infeasible) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Clone with a four-cycle attached at every degree-1 vertex, edge
    /// constraints and fixed angles carried over, shield edges straight.
    fn shielded(&self) -> (PlaneGraph, Vec<(EdgeId, EdgeConstraint)>, Vec<FixedAngle>, Vec<EdgeId>) {
        let src = &self.graph;
        let pendants: Vec<VertexId> = src.vertices().filter(|&v| src.degree(v) == 1).collect();
        let mut g = src.clone();
        let mut shields: Vec<(VertexId, VertexId)> = Vec::new();
        for &p in &pendants {
            shields.push((p, VertexId(g.vertex_count() as u32)));
            g = g.attach_four_cycle(p).expect("pendant shield");
        }
        // Rows only ever gain appended entries, so dart triples stay stable.
        let map_dart = |d: Dart| -> Dart {
            let (u, v, occ) = src.dart_triple(d);
            g.dart_between(VertexId(u), VertexId(v), occ)
                .expect("dart survives shielding")
        };
        let mut constraints: Vec<(EdgeId, EdgeConstraint)> = Vec::new();
        for e in src.edges() {
            let ne = map_dart(e.even_dart()).edge();
            let bends = if self.one_edge[e.index()] { 1 } else { 0 };
            constraints.push((ne, EdgeConstraint::ExactBends(bends)));
        }
        for e in g.edges() {
            if constraints.iter().all(|&(c, _)| c != e) {
                constraints.push((e, EdgeConstraint::ExactBends(0)));
            }
        }
        let mut angles = Vec::new();
        for fa in &self.fixed_angles {
            let row = src.rotation(fa.vertex);
            let mut faces: Vec<_> = row
                .iter()
                .filter(|&&d| src.face_of(d) == fa.face)
                .map(|&d| g.face_of(map_dart(d)))
                .collect();
            faces.dedup();
            assert_eq!(faces.len(), 1, "shielding split a pinned face");
            angles.push(FixedAngle {
                vertex: fa.vertex,
                face: faces[0],
                rotation_sum: fa.rotation_sum,
            });
        }
        // Shield squares are rigid: one convex corner per vertex keeps their
        // free angles out of the solver's interface tables.
        let mut shield_edges = Vec::new();
        for &(p, a) in &shields {
            let quad = g.face_of(g.dart_between(p, a, 0).expect("shield edge"));
            let cycle = [p, a, VertexId(a.0 + 1), VertexId(a.0 + 2)];
            for (i, &v) in cycle.iter().enumerate() {
                angles.push(FixedAngle { vertex: v, face: quad, rotation_sum: 1 });
                let w = cycle[(i + 1) % 4];
                shield_edges.push(g.dart_between(v, w, 0).expect("shield edge").edge());
            }
        }
        let order = growth_order_eager(&g, &shield_edges);
        (g, constraints, angles, order)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let triple = |d: &Dart| {
            let (u, v, occ) = self.graph.dart_triple(*d);
            serde_json::json!([u, v, occ])
        };
        serde_json::json!({
            "graph": self.graph.to_json(),
            "one_edges": self.one_edges().iter().map(|e| e.index()).collect::<Vec<_>>(),
            "fixed_angles": self.fixed_angles.iter().map(|fa| serde_json::json!({
                "vertex": fa.vertex.0,
                "face": fa.face.0,
                "rotation_sum": fa.rotation_sum,
            })).collect::<Vec<_>>(),
            "inputs": self.inputs.iter().map(triple).collect::<Vec<_>>(),
            "outputs": self.outputs.iter().map(triple).collect::<Vec<_>>(),
            "glue_order": self.glue_order.iter().map(|e| e.index()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Labeled01Graph, HardnessError> {
        let bad = |m: &str| HardnessError::BadFormat(m.into());
        let graph = PlaneGraph::from_json(value.get("graph").ok_or_else(|| bad("missing graph"))?)
            .map_err(|e| HardnessError::BadFormat(format!("graph: {e}")))?;
        let arr = |key: &str| -> Result<Vec<serde_json::Value>, HardnessError> {
            Ok(value
                .get(key)
                .and_then(|v| v.as_array())
                .ok_or_else(|| bad(&format!("missing {key}")))?
                .clone())
        };
        let mut one_edge = vec![false; graph.edge_count()];
        for v in arr("one_edges")? {
            let i = v.as_u64().ok_or_else(|| bad("one edge index"))? as usize;
            *one_edge.get_mut(i).ok_or_else(|| bad("one edge out of range"))? = true;
        }
        let mut fixed_angles = Vec::new();
        for fa in arr("fixed_angles")? {
            let field = |k: &str| fa.get(k).and_then(|x| x.as_i64()).ok_or_else(|| bad(k));
            let face = field("face")? as usize;
            if face >= graph.face_count() {
                return Err(bad("fixed angle face out of range"));
            }
            fixed_angles.push(FixedAngle {
                vertex: VertexId(field("vertex")? as u32),
                face: crate::plane_graph::FaceId(face as u32),
                rotation_sum: field("rotation_sum")? as i32,
            });
        }
        let darts = |key: &str| -> Result<Vec<Dart>, HardnessError> {
            arr(key)?
                .iter()
                .map(|t| {
                    let t = t.as_array().ok_or_else(|| bad("dart triple"))?;
                    let get = |i: usize| t.get(i).and_then(|x| x.as_u64()).ok_or_else(|| bad("dart triple"));
                    graph
                        .dart_between(VertexId(get(0)? as u32), VertexId(get(1)? as u32), get(2)? as usize)
                        .ok_or_else(|| bad("no such dart"))
                })
                .collect()
        };
        let inputs = darts("inputs")?;
        let outputs = darts("outputs")?;
        let glue_order = arr("glue_order")?
            .iter()
            .map(|v| {
                let i = v.as_u64().ok_or_else(|| bad("glue order entry"))? as usize;
                if i >= graph.edge_count() {
                    return Err(bad("glue order out of range"));
                }
                Ok(EdgeId(i as u32))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Labeled01Graph {
            graph,
            one_edge,
            fixed_angles,
            inputs,
            outputs,
            glue_order,
        })
    }
}

/// Left comb over the given edge order.
pub fn comb_tree(order: &[EdgeId]) -> DecompTree {
    let mut it = order.iter();
    let first = *it.next().expect("nonempty order");
    let mut tree = DecompTree::Leaf(first);
    for &e in it {
        tree = DecompTree::Node(Box::new(tree), Box::new(DecompTree::Leaf(e)));
    }
    tree
}

/// All-0-edge fragment whose s-to-t boundary rotation is confined to an
/// interval in every 0-bend orthogonal drawing.
#[derive(Debug, Clone)]
pub struct IntervalGadget {
    pub fragment: Labeled01Graph,
    pub s: VertexId,
    pub t: VertexId,
}

/// Four-cycle (or three-cycle) core with labeled sides and role corners.
#[derive(Debug, Clone)]
pub struct BuildingBlock {
    pub fragment: Labeled01Graph,
    pub s: VertexId,
    pub t: VertexId,
    pub s_prime: Option<VertexId>,
    pub t_prime: Option<VertexId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Box,
    BendableBox,
    BendableBoxMirrored,
    Merger,
    Splitter,
    SplitterMirrored,
}

// ---------------------------------------------------------------------------
// Fragment assembly.
//
// Gadgets are specified by clockwise rotation rows over local vertex ids and
// merged by identifying a 1-edge of one part with a 1-edge of another. The
// identification splices the rows of the coinciding endpoints:
//   row(u) = [v] ++ tail(row(u') @ v') ++ tail(row(u) @ v)
//   row(v) = [u] ++ tail(row(v) @ u) ++ tail(row(v') @ u')
// where tail(r @ x) rotates r to start at x and drops x. Dead vertices are
// tombstoned and compacted at build time.

#[derive(Debug, Clone, Default)]
struct Fragment {
    rows: Vec<Vec<usize>>,
    one_pairs: Vec<(usize, usize)>,
    /// dart (u, v) whose right face must be drawn as a rectangle
    small_darts: Vec<(usize, usize)>,
    inputs: Vec<(usize, usize)>,
    outputs: Vec<(usize, usize)>,
    hint: Option<(usize, usize)>,
    alias: Vec<usize>,
}

fn rot_tail(row: &[usize], at: usize) -> Vec<usize> {
    let pos = row.iter().position(|&w| w == at).expect("neighbor present");
    let mut out = Vec::with_capacity(row.len() - 1);
    for i in 1..row.len() {
        out.push(row[(pos + i) % row.len()]);
    }
    out
}

impl Fragment {
    fn new(rows: Vec<Vec<usize>>) -> Fragment {
        let alias = (0..rows.len()).collect();
        Fragment {
            rows,
            alias,
            ..Default::default()
        }
    }

    fn canon(&self, mut w: usize) -> usize {
        while self.alias[w] != w {
            w = self.alias[w];
        }
        w
    }

    fn canon_dart(&self, d: (usize, usize)) -> (usize, usize) {
        (self.canon(d.0), self.canon(d.1))
    }

    /// Disjoint union; returns the id offset applied to `other`.
    fn merge(&mut self, other: &Fragment) -> usize {
        let off = self.rows.len();
        for row in &other.rows {
            self.rows.push(row.iter().map(|&w| w + off).collect());
        }
        self.alias
            .extend((0..other.rows.len()).map(|w| other.alias[w] + off));
        let shift = |d: &(usize, usize)| (d.0 + off, d.1 + off);
        self.one_pairs.extend(other.one_pairs.iter().map(shift));
        self.small_darts.extend(other.small_darts.iter().map(shift));
        self.inputs.extend(other.inputs.iter().map(shift));
        self.outputs.extend(other.outputs.iter().map(shift));
        off
    }

    /// Identifies the edge under `kill` with the edge under `keep`, dart
    /// directions aligned. Both must be 1-edges of matching orientation.
    fn identify(&mut self, keep: (usize, usize), kill: (usize, usize)) {
        let (u, v) = self.canon_dart(keep);
        let (u2, v2) = self.canon_dart(kill);
        assert!(u != u2 && u != v2 && v != u2 && v != v2, "distinct endpoints");
        let ru = {
            let mut r = vec![v];
            r.extend(rot_tail(&self.rows[u2], v2));
            r.extend(rot_tail(&self.rows[u], v));
            r
        };
        let rv = {
            let mut r = vec![u];
            r.extend(rot_tail(&self.rows[v], u));
            r.extend(rot_tail(&self.rows[v2], u2));
            r
        };
        self.rows[u] = ru;
        self.rows[v] = rv;
        self.rows[u2].clear();
        self.rows[v2].clear();
        self.alias[u2] = u;
        self.alias[v2] = v;
        let fix = |w: usize| if w == u2 { u } else if w == v2 { v } else { w };
        for row in self.rows.iter_mut() {
            for w in row.iter_mut() {
                *w = fix(*w);
            }
        }
        let fix_pair = |d: (usize, usize)| (fix(d.0), fix(d.1));
        let killed = (u, v);
        let mut seen_killed = false;
        self.one_pairs = self
            .one_pairs
            .iter()
            .map(|&p| fix_pair(p))
            .filter(|&(a, b)| {
                let dup = (a, b) == killed || (b, a) == killed;
                if dup && seen_killed {
                    return false;
                }
                if dup {
                    seen_killed = true;
                }
                true
            })
            .collect();
        assert!(seen_killed, "identified edge must be 1-labeled");
        for d in self
            .small_darts
            .iter_mut()
            .chain(self.inputs.iter_mut())
            .chain(self.outputs.iter_mut())
        {
            *d = fix_pair(*d);
        }
        self.inputs.retain(|&d| d != killed && d != (killed.1, killed.0));
        self.outputs.retain(|&d| d != killed && d != (killed.1, killed.0));
        if let Some(h) = self.hint {
            self.hint = Some(fix_pair(h));
        }
    }

    /// Merges `other` in and identifies my output dart with its input dart.
    fn glue(&mut self, out: (usize, usize), other: &Fragment, inp: (usize, usize)) -> usize {
        let off = self.merge(other);
        self.identify(out, (inp.0 + off, inp.1 + off));
        off
    }

    fn build(&self) -> Labeled01Graph {
        let mut map = vec![usize::MAX; self.rows.len()];
        let mut n = 0usize;
        for w in 0..self.rows.len() {
            if self.canon(w) == w {
                assert!(!self.rows[w].is_empty(), "live vertex with empty row");
                map[w] = n;
                n += 1;
            }
        }
        let rows: Vec<Vec<u32>> = (0..self.rows.len())
            .filter(|&w| map[w] != usize::MAX)
            .map(|w| self.rows[w].iter().map(|&x| map[self.canon(x)] as u32).collect())
            .collect();
        let md = |d: (usize, usize)| (map[self.canon(d.0)], map[self.canon(d.1)]);
        let hint = md(self.hint.expect("fragment hint"));
        let graph =
            build_plane_graph(n, &rows, (hint.0 as u32, hint.1 as u32, 0)).expect("planar fragment");
        let dart = |d: (usize, usize)| {
            let (a, b) = md(d);
            graph
                .dart_between(VertexId(a as u32), VertexId(b as u32), 0)
                .expect("role dart")
        };
        let mut one_edge = vec![false; graph.edge_count()];
        for &p in &self.one_pairs {
            one_edge[dart(p).edge().index()] = true;
        }
        let small_faces: BTreeSet<_> = self.small_darts.iter().map(|&d| graph.face_of(dart(d))).collect();
        let fixed_angles = fixed_angles_for(&graph, &one_edge, &small_faces);
        let glue_order = growth_order(&graph);
        Labeled01Graph {
            one_edge,
            fixed_angles,
            inputs: self.inputs.iter().map(|&d| dart(d)).collect(),
            outputs: self.outputs.iter().map(|&d| dart(d)).collect(),
            glue_order,
            graph,
        }
    }
}

/// Angle assignment for every vertex incident to a 1-edge: each corner on a
/// rectangle face is a right angle, and the one remaining face absorbs the
/// rest of the vertex sum.
fn fixed_angles_for(
    graph: &PlaneGraph,
    one_edge: &[bool],
    small_faces: &BTreeSet<crate::plane_graph::FaceId>,
) -> Vec<FixedAngle> {
    let mut out = Vec::new();
    for v in graph.vertices() {
        let row = graph.rotation(v);
        if !row.iter().any(|&d| one_edge[d.edge().index()]) {
            continue;
        }
        let mut pinned = 0i32;
        let mut by_face: BTreeMap<_, i32> = BTreeMap::new();
        let mut free_face = None;
        for &d in row {
            let f = graph.face_of(d);
            if small_faces.contains(&f) {
                *by_face.entry(f).or_insert(0) += 1;
                pinned += 1;
            } else {
                match free_face {
                    None => free_face = Some(f),
                    Some(prev) => assert_eq!(prev, f, "one free face per fixed vertex"),
                }
            }
        }
        for (face, rotation_sum) in by_face {
            out.push(FixedAngle { vertex: v, face, rotation_sum });
        }
        let rest = 2 * row.len() as i32 - 4 - pinned;
        match free_face {
            Some(face) => out.push(FixedAngle { vertex: v, face, rotation_sum: rest }),
            None => assert_eq!(rest, 0, "fully pinned vertex balances"),
        }
    }
    out
}

/// Edge order that grows the graph like a disk: every prefix is connected,
/// keeps the present darts contiguous in each rotation, and leaves all absent
/// edges in a single region. Found in reverse, peeling edges off a growing
/// hole; an edge whose two sides already lie in the same region is a bridge
/// of the remainder and only peels once an endpoint has degree one.
pub fn growth_order(g: &PlaneGraph) -> Vec<EdgeId> {
    growth_order_eager(g, &[])
}

/// `growth_order` with a set of edges peeled as soon as they are peelable,
/// ahead of any boundary-width concern. Decoration cycles hung off the main
/// structure otherwise linger as boundary debt for the whole carve.
fn growth_order_eager(g: &PlaneGraph, eager: &[EdgeId]) -> Vec<EdgeId> {
    let m = g.edge_count();
    if m <= 1 {
        return g.edges().collect();
    }
    let mut hot = vec![false; m];
    for &e in eager {
        hot[e.index()] = true;
    }
    let mut region: Vec<usize> = (0..g.face_count()).collect();
    fn find(region: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while region[root] != root {
            root = region[root];
        }
        let mut w = x;
        while region[w] != root {
            let next = region[w];
            region[w] = root;
            w = next;
        }
        root
    }
    let mut alive = vec![true; m];
    let mut degree: Vec<usize> = (0..g.vertex_count())
        .map(|v| g.degree(VertexId(v as u32)))
        .collect();
    let contiguous_without = |alive: &[bool], v: VertexId, e: EdgeId| -> bool {
        let row = g.rotation(v);
        let present = |d: Dart| alive[d.edge().index()] && d.edge() != e;
        let mut transitions = 0;
        let mut prev = present(*row.last().unwrap());
        for &d in row {
            let cur = present(d);
            if cur != prev {
                transitions += 1;
            }
            prev = cur;
        }
        transitions <= 2
    };
    // Vertices with both peeled and remaining edges are the attachment
    // boundary of every forward prefix; keeping it narrow keeps the solver's
    // interface tables small, so peel the candidate shrinking it most.
    let mut touched = vec![false; g.vertex_count()];
    let mut peeled: Vec<EdgeId> = Vec::with_capacity(m);
    let mut hole: Option<usize> = None;
    let mut last: Option<(VertexId, VertexId)> = None;
    for round in 0..m - 1 {
        let mut best: Option<((i32, i32, i32), EdgeId, usize, usize)> = None;
        for e in g.edges() {
            if !alive[e.index()] {
                continue;
            }
            let d = e.even_dart();
            let fl = g.face_of(d).index();
            let fr = g.face_of(d.twin()).index();
            if let Some(h) = hole {
                let h = find(&mut region, h);
                if find(&mut region, fl) != h && find(&mut region, fr) != h {
                    continue;
                }
            }
            let (u, v) = g.endpoints(e);
            let leaf = degree[u.index()] == 1 || degree[v.index()] == 1;
            if !leaf && find(&mut region, fl) == find(&mut region, fr) {
                continue;
            }
            if !contiguous_without(&alive, u, e) || !contiguous_without(&alive, v, e) {
                continue;
            }
            let width = |w: VertexId| {
                (degree[w.index()] > 1) as i32 - touched[w.index()] as i32
            };
            let delta = width(u) + width(v);
            let local = match last {
                Some((a, b)) => (u != a && u != b && v != a && v != b) as i32,
                None => 0,
            };
            let key = (!hot[e.index()] as i32, delta, local);
            if best.is_none_or(|(b, ..)| key < b) {
                best = Some((key, e, fl, fr));
            }
        }
        let (_, e, fl, fr) = best.unwrap_or_else(|| panic!("no peelable edge in round {round}"));
        let (u, v) = g.endpoints(e);
        alive[e.index()] = false;
        degree[u.index()] -= 1;
        degree[v.index()] -= 1;
        touched[u.index()] = true;
        touched[v.index()] = true;
        peeled.push(e);
        last = Some((u, v));
        let a = find(&mut region, fl);
        let b = find(&mut region, fr);
        region[a] = b;
        hole = Some(b);
    }
    peeled.push(g.edges().find(|e| alive[e.index()]).unwrap());
    peeled.reverse();
    peeled
}

// ---------------------------------------------------------------------------
// Interval gadgets.
//
// A 01-interval between u and v expands to a path through a claw center c
// with row [v, u, pendant]: the face right of u->c->v sees the single center
// corner (values {0,1}) and the other side detours through the pendant
// (values {-1,0}).

fn claw_rows(lo: i32, hi: i32) -> Option<Vec<Vec<usize>>> {
    // s = 0, t = 1 throughout; measured side is the right of the s-to-t walk.
    match (lo, hi) {
        (0, 1) => Some(vec![vec![2], vec![2], vec![1, 0, 3], vec![2]]),
        (1, 1) => Some(vec![vec![2], vec![2], vec![1, 0, 3, 4], vec![2], vec![2]]),
        (-2, 3) => Some(
            // chain s-a1-a2-a3-t with the a2 pendant hanging off the far side
            vec![
                vec![2],
                vec![4],
                vec![3, 0],
                vec![4, 2, 5],
                vec![1, 3],
                vec![3],
            ],
        ),
        _ => None,
    }
}

pub fn interval_gadget(lo: i32, hi: i32) -> Result<IntervalGadget, HardnessError> {
    let rows = claw_rows(lo, hi).ok_or(HardnessError::UnsupportedInterval { lo, hi })?;
    let mut frag = Fragment::new(rows);
    frag.hint = Some((0, 2));
    Ok(IntervalGadget {
        fragment: frag.build(),
        s: VertexId(0),
        t: VertexId(1),
    })
}

/// Darts of the s-to-t measuring path of an interval gadget.
pub fn interval_path(g: &IntervalGadget) -> Vec<Dart> {
    let graph = &g.fragment.graph;
    let mut path = Vec::new();
    let mut prev = g.s;
    let mut here = g.s;
    while here != g.t {
        let next = graph
            .rotation(here)
            .iter()
            .map(|&d| graph.head(d))
            .find(|&w| w != prev && graph.degree(w) > 1 || w == g.t)
            .expect("chain continues");
        path.push(
            graph
                .dart_between(here, next, 0)
                .expect("path dart"),
        );
        prev = here;
        here = next;
    }
    path
}

// ---------------------------------------------------------------------------
// Building blocks.

/// Plain four-cycle; side st and side s't' are the 1-edges.
fn box_fragment() -> Fragment {
    // s = 0, t = 1, s' = 2, t' = 3; inner walk s -> t -> s' -> t'
    let mut f = Fragment::new(vec![vec![1, 3], vec![2, 0], vec![3, 1], vec![0, 2]]);
    f.one_pairs = vec![(0, 1), (2, 3)];
    f.small_darts = vec![(0, 1)];
    f.outputs = vec![(1, 0), (3, 2)];
    f.hint = Some((0, 3));
    f
}

/// Four-cycle with 1-edges left (st) and right (s't') and 01-intervals top
/// and bottom; `mirrored` flips both interval directions.
fn bendable_fragment(mirrored: bool) -> Fragment {
    // s = 0, t' = 1, s' = 2, t = 3, c_top = 4, c_bot = 5, pendants 6, 7
    let (ct, cb) = if mirrored {
        (vec![0, 1, 6], vec![3, 2, 7])
    } else {
        (vec![1, 0, 6], vec![2, 3, 7])
    };
    let mut f = Fragment::new(vec![
        vec![4, 3],
        vec![2, 4],
        vec![1, 5],
        vec![0, 5],
        ct,
        cb,
        vec![4],
        vec![5],
    ]);
    f.one_pairs = vec![(0, 3), (2, 1)];
    f.small_darts = vec![(0, 4)];
    f.inputs = vec![(3, 0)];
    f.outputs = vec![(2, 1)];
    f.hint = Some((0, 3));
    f
}

/// Four-cycle with 1-edge st, 0-edge ts', and 01-intervals on the st' and
/// s't' sides, both directed into t'.
fn merger_fragment() -> Fragment {
    // s = 0, t' = 1, s' = 2, t = 3, c_a = 4, c_b = 5, pendants 6, 7
    let mut f = Fragment::new(vec![
        vec![4, 3],
        vec![5, 4],
        vec![3, 5],
        vec![0, 2],
        vec![1, 0, 6],
        vec![1, 2, 7],
        vec![4],
        vec![5],
    ]);
    f.one_pairs = vec![(0, 3)];
    f.small_darts = vec![(3, 0)];
    f.outputs = vec![(0, 3)];
    f.hint = Some((0, 3));
    f
}

/// Three-cycle with 1-edge ss' and 01-intervals s't and ts, both measuring
/// toward the inner face.
fn splitter_fragment() -> Fragment {
    // s = 0, s' = 1, t = 2, c1 = 3 (on ts), c2 = 4 (on s't), pendants 5, 6
    let mut f = Fragment::new(vec![
        vec![1, 3],
        vec![4, 0],
        vec![3, 4],
        vec![0, 2, 5],
        vec![2, 1, 6],
        vec![3],
        vec![4],
    ]);
    f.one_pairs = vec![(0, 1)];
    f.small_darts = vec![(0, 1)];
    f.inputs = vec![(0, 1)];
    f.hint = Some((1, 0));
    f
}

/// Reflection: all rows reversed, role darts and the outer hint flipped.
fn reflect(f: &Fragment) -> Fragment {
    let mut r = f.clone();
    for row in r.rows.iter_mut() {
        row.reverse();
    }
    let flip = |d: (usize, usize)| (d.1, d.0);
    for d in r
        .small_darts
        .iter_mut()
        .chain(r.inputs.iter_mut())
        .chain(r.outputs.iter_mut())
    {
        *d = flip(*d);
    }
    r.hint = r.hint.map(flip);
    r
}

pub fn building_block(kind: BlockKind) -> BuildingBlock {
    let (frag, s, t, s_prime, t_prime) = match kind {
        BlockKind::Box => (box_fragment(), 0, 1, Some(2), Some(3)),
        BlockKind::BendableBox => (bendable_fragment(false), 0, 3, Some(2), Some(1)),
        BlockKind::BendableBoxMirrored => (bendable_fragment(true), 0, 3, Some(2), Some(1)),
        BlockKind::Merger => (merger_fragment(), 0, 3, Some(2), Some(1)),
        BlockKind::Splitter => (splitter_fragment(), 0, 2, Some(1), None),
        BlockKind::SplitterMirrored => (reflect(&splitter_fragment()), 0, 2, Some(1), None),
    };
    BuildingBlock {
        fragment: frag.build(),
        s: VertexId(s),
        t: VertexId(t),
        s_prime: s_prime.map(VertexId),
        t_prime: t_prime.map(VertexId),
    }
}

// ---------------------------------------------------------------------------
// Composite gadgets.

/// Single box; the positive output is the st side seen from outside, the
/// negative output the s't' side.
pub fn variable_gadget() -> Labeled01Graph {
    box_fragment().build()
}

/// Splitter with a merger glued onto each leg; one input 1-edge, two output
/// 1-edges whose outer rotations both negate the input's.
fn duplicator_fragment() -> Fragment {
    // S = 0, P = 1, T = 2, c1 = 3, c2 = 4, p1 = 5, p2 = 6,
    // sA = 7, tA = 8, c3 = 9, p3 = 10, sB = 11, tB = 12, c4 = 13, p4 = 14
    let mut f = Fragment::new(vec![
        vec![9, 1, 3],
        vec![4, 0, 12],
        vec![8, 3, 4, 13],
        vec![0, 2, 5],
        vec![2, 1, 6],
        vec![3],
        vec![4],
        vec![8, 9],
        vec![7, 2],
        vec![0, 7, 10],
        vec![9],
        vec![13, 12],
        vec![11, 1],
        vec![2, 11, 14],
        vec![13],
    ]);
    f.one_pairs = vec![(0, 1), (7, 8), (11, 12)];
    f.small_darts = vec![(0, 1), (7, 9), (11, 13)];
    f.inputs = vec![(0, 1)];
    f.outputs = vec![(11, 12), (7, 8)];
    f.hint = Some((1, 0));
    f
}

pub fn duplicator() -> Labeled01Graph {
    duplicator_fragment().build()
}

/// Bendable box glued to a mirrored bendable box along the shared 1-edge;
/// west input, east output.
fn zigzag_fragment() -> Fragment {
    // s1 = 0, t1 = 1, t1' = s2 = 2, s1' = t2 = 3, s2' = 4, t2' = 5,
    // ct1 = 6, cb1 = 7, ct2 = 8, cb2 = 9, pendants 10..13
    let mut f = Fragment::new(vec![
        vec![6, 1],
        vec![0, 7],
        vec![8, 3, 6],
        vec![2, 9, 7],
        vec![5, 9],
        vec![4, 8],
        vec![2, 0, 10],
        vec![3, 1, 11],
        vec![2, 5, 12],
        vec![3, 4, 13],
        vec![6],
        vec![7],
        vec![8],
        vec![9],
    ]);
    f.one_pairs = vec![(0, 1), (2, 3), (4, 5)];
    f.small_darts = vec![(1, 0), (3, 2)];
    f.inputs = vec![(1, 0)];
    f.outputs = vec![(4, 5)];
    f.hint = Some((0, 1));
    f
}

pub fn zigzag() -> Labeled01Graph {
    zigzag_fragment().build()
}

/// Chain of k zigzags glued output to input.
pub fn bendable_pipe(k: u32) -> Labeled01Graph {
    assert!(k >= 1, "pipes need at least one zigzag");
    pipe_fragment(k).build()
}

fn pipe_fragment(k: u32) -> Fragment {
    let zig = zigzag_fragment();
    let mut f = zig.clone();
    for _ in 1..k {
        let out = f.outputs.last().copied().expect("pipe output");
        f.glue(out, &zig, (1, 0));
    }
    f
}

/// Four-cycle of three 1-edges closed by the [-2,3] interval; the three
/// 1-edge sides are the clause inputs, innermost first.
fn clause_fragment() -> Fragment {
    // v1 = 0, v2 = 1, v3 = 2, v4 = 3, a1 = 4, a2 = 5, a3 = 6, b = 7
    let mut f = Fragment::new(vec![
        vec![1, 6],
        vec![0, 2],
        vec![3, 1],
        vec![4, 2],
        vec![5, 3],
        vec![6, 4, 7],
        vec![0, 5],
        vec![5],
    ]);
    f.one_pairs = vec![(0, 1), (1, 2), (2, 3)];
    f.small_darts = vec![(0, 1)];
    f.inputs = vec![(2, 3), (1, 2), (0, 1)];
    f.hint = Some((3, 2));
    f
}

pub fn clause_gadget() -> Labeled01Graph {
    clause_fragment().build()
}

/// Pipe length guaranteeing enough slack for any m-edge incidence layout.
pub fn default_pipe_length(m: u32) -> u32 {
    3 * m * m + 4 * m
}

// ---------------------------------------------------------------------------
// Monotone rectilinear satisfiability.
//
// Variables sit left to right on an axis; clauses arc over them (positive
// above, negated below) at nesting levels, three ordered legs each. The
// compiler only accepts layouts whose arcs nest without crossing, which is
// the planar fraction of monotone 3-SAT.

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Literal {
    pub variable: u32,
    pub negated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectClause {
    /// Legs in left-to-right connection order; variables may repeat.
    pub literals: [Literal; 3],
    /// Arc nesting level, innermost arcs lowest, starting at 1.
    pub level: u32,
}

impl RectClause {
    pub fn negated(&self) -> bool {
        self.literals[0].negated
    }

    fn span(&self) -> (u32, u32) {
        (self.literals[0].variable, self.literals[2].variable)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneSatInstance {
    pub num_variables: u32,
    pub clauses: Vec<RectClause>,
}

const POS: usize = 0;

impl MonotoneSatInstance {
    pub fn validate(&self) -> Result<(), HardnessError> {
        use HardnessError::*;
        let n = self.num_variables;
        if n == 0 {
            return Err(BadFormat("instance needs at least one variable".into()));
        }
        if self.clauses.is_empty() {
            return Err(BadFormat("instance needs at least one clause".into()));
        }
        for (ci, c) in self.clauses.iter().enumerate() {
            if c.literals.iter().any(|l| l.variable >= n) {
                return Err(BadFormat(format!("clause {ci} names a variable out of range")));
            }
            if c.literals.iter().any(|l| l.negated != c.negated()) {
                return Err(MixedClause { clause: ci });
            }
            if c.level == 0 {
                return Err(CrossingRepresentation(format!(
                    "clause {ci} level must be at least 1"
                )));
            }
            let vars = c.literals.map(|l| l.variable);
            if vars[0] > vars[1] || vars[1] > vars[2] {
                return Err(CrossingRepresentation(format!(
                    "clause {ci} legs must be ordered left to right"
                )));
            }
        }
        let mut occurs = vec![false; n as usize];
        for c in &self.clauses {
            for l in &c.literals {
                occurs[l.variable as usize] = true;
            }
        }
        if let Some(v) = occurs.iter().position(|&b| !b) {
            return Err(CrossingRepresentation(format!(
                "variable {v} occurs in no clause, leaving its tree unattached"
            )));
        }
        // Arcs touch variables, and a drawing hangs together only if the
        // variable-clause incidence is connected.
        let mut comp: Vec<usize> = (0..n as usize).collect();
        fn root(comp: &mut [usize], mut x: usize) -> usize {
            while comp[x] != x {
                comp[x] = comp[comp[x]];
                x = comp[x];
            }
            x
        }
        for c in &self.clauses {
            let a = root(&mut comp, c.literals[0].variable as usize);
            for l in &c.literals[1..] {
                let b = root(&mut comp, l.variable as usize);
                comp[b] = a;
            }
        }
        let first = root(&mut comp, 0);
        if (0..n as usize).any(|v| root(&mut comp, v) != first) {
            return Err(CrossingRepresentation(
                "variable-clause incidence is disconnected".into(),
            ));
        }
        for side in 0..2 {
            let arcs: Vec<(usize, u32, u32, u32)> = self
                .clauses
                .iter()
                .enumerate()
                .filter(|(_, c)| c.negated() == (side == 1))
                .map(|(ci, c)| {
                    let (lo, hi) = c.span();
                    (ci, lo, hi, c.level)
                })
                .collect();
            for (i, &(ci, lo, hi, level)) in arcs.iter().enumerate() {
                for &(cj, lo2, hi2, level2) in &arcs[i + 1..] {
                    if hi < lo2 || hi2 < lo || hi == lo2 || hi2 == lo {
                        continue;
                    }
                    let i_in_j = lo2 <= lo && hi <= hi2;
                    let j_in_i = lo <= lo2 && hi2 <= hi;
                    if i_in_j && j_in_i {
                        if level == level2 {
                            return Err(CrossingRepresentation(format!(
                                "clauses {ci} and {cj} share a span and a level"
                            )));
                        }
                    } else if i_in_j {
                        if level >= level2 {
                            return Err(CrossingRepresentation(format!(
                                "clause {ci} nests inside {cj} but not below it"
                            )));
                        }
                    } else if j_in_i {
                        if level2 >= level {
                            return Err(CrossingRepresentation(format!(
                                "clause {cj} nests inside {ci} but not below it"
                            )));
                        }
                    } else {
                        return Err(CrossingRepresentation(format!(
                            "clauses {ci} and {cj} cross"
                        )));
                    }
                }
            }
            // The corridor straight above a variable holds one arc at most:
            // a leg dropped mid-span, or a single-variable clause.
            for v in 0..n {
                let users = self
                    .clauses
                    .iter()
                    .filter(|c| c.negated() == (side == 1))
                    .filter(|c| c.literals.iter().any(|l| l.variable == v))
                    .filter(|c| {
                        let (lo, hi) = c.span();
                        (lo < v && v < hi) || lo == hi
                    })
                    .count();
                if users > 1 {
                    return Err(CrossingRepresentation(format!(
                        "two clauses need the corridor above variable {v}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn brute_force_satisfiable(&self) -> bool {
        let n = self.num_variables;
        assert!(n <= 24, "brute force is for small instances");
        (0u64..1 << n).any(|mask| {
            self.clauses.iter().all(|c| {
                c.literals
                    .iter()
                    .any(|l| (mask >> l.variable & 1 == 1) != l.negated)
            })
        })
    }
}

/// Parses the clause list format: a `p monotone <vars> <clauses>` header,
/// one line of three signed 1-based literals closed by 0 per clause, and
/// optional `l <clause> <level>` lines (levels default to 1). Lines starting
/// with `c` are comments.
pub fn parse_sat(text: &str) -> Result<MonotoneSatInstance, HardnessError> {
    let bad = |line: usize, msg: &str| HardnessError::BadFormat(format!("line {line}: {msg}"));
    let mut header: Option<(u32, usize)> = None;
    let mut clauses: Vec<RectClause> = Vec::new();
    let mut levels: Vec<(usize, usize, u32)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p ") {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if header.is_some() {
                return Err(bad(lineno, "duplicate header"));
            }
            match toks.as_slice() {
                ["monotone", n, m] => {
                    let n = n.parse().map_err(|_| bad(lineno, "bad variable count"))?;
                    let m = m.parse().map_err(|_| bad(lineno, "bad clause count"))?;
                    header = Some((n, m));
                }
                _ => return Err(bad(lineno, "header must read 'p monotone <vars> <clauses>'")),
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("l ") {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            let [c, lv] = toks.as_slice() else {
                return Err(bad(lineno, "level lines read 'l <clause> <level>'"));
            };
            let c: usize = c.parse().map_err(|_| bad(lineno, "bad clause index"))?;
            let lv: u32 = lv.parse().map_err(|_| bad(lineno, "bad level"))?;
            if c == 0 {
                return Err(bad(lineno, "clause indices are 1-based"));
            }
            levels.push((lineno, c - 1, lv));
            continue;
        }
        let nums: Vec<i64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(lineno, "expected integers")))
            .collect::<Result<_, _>>()?;
        if nums.len() != 4 || nums[3] != 0 {
            return Err(bad(lineno, "clause lines hold three literals and a closing 0"));
        }
        let mut lits = [Literal { variable: 0, negated: false }; 3];
        for (slot, &x) in lits.iter_mut().zip(&nums[..3]) {
            if x == 0 {
                return Err(bad(lineno, "literals are non-zero"));
            }
            *slot = Literal {
                variable: (x.unsigned_abs() - 1) as u32,
                negated: x < 0,
            };
        }
        clauses.push(RectClause { literals: lits, level: 1 });
    }
    let (n, m) = header.ok_or_else(|| bad(0, "missing 'p monotone' header"))?;
    if clauses.len() != m {
        return Err(HardnessError::BadFormat(format!(
            "header promises {m} clauses, found {}",
            clauses.len()
        )));
    }
    for (lineno, c, lv) in levels {
        if c >= clauses.len() {
            return Err(bad(lineno, "level line names a missing clause"));
        }
        clauses[c].level = lv;
    }
    Ok(MonotoneSatInstance { num_variables: n, clauses })
}

pub fn render_sat(inst: &MonotoneSatInstance) -> String {
    let mut out = format!("p monotone {} {}\n", inst.num_variables, inst.clauses.len());
    for c in &inst.clauses {
        for l in &c.literals {
            let v = (l.variable + 1) as i64;
            out.push_str(&format!("{} ", if l.negated { -v } else { v }));
        }
        out.push_str("0\n");
    }
    for (ci, c) in inst.clauses.iter().enumerate() {
        if c.level != 1 {
            out.push_str(&format!("l {} {}\n", ci + 1, c.level));
        }
    }
    out
}

/// Per side and variable: the legs landing there in left-to-right order.
/// Arcs closing from the left land innermost-first, then the corridor user,
/// then arcs opening to the right outermost-first.
fn leg_lists(inst: &MonotoneSatInstance) -> [Vec<Vec<(usize, usize)>>; 2] {
    let n = inst.num_variables as usize;
    let mut legs: [Vec<Vec<(usize, usize)>>; 2] = [vec![Vec::new(); n], vec![Vec::new(); n]];
    for (ci, c) in inst.clauses.iter().enumerate() {
        let side = c.negated() as usize;
        for (li, l) in c.literals.iter().enumerate() {
            legs[side][l.variable as usize].push((ci, li));
        }
    }
    for side_legs in legs.iter_mut() {
        for (v, at_v) in side_legs.iter_mut().enumerate() {
            let v = v as u32;
            at_v.sort_by_key(|&(ci, li)| {
                let c = &inst.clauses[ci];
                let (lo, hi) = c.span();
                if hi == v && lo < v {
                    (0i64, -(lo as i64), c.level as i64, li)
                } else if lo == v && hi > v {
                    (2, -(hi as i64), -(c.level as i64), li)
                } else {
                    (1, 0, 0, li)
                }
            });
        }
    }
    legs
}

/// Compiles a monotone rectilinear instance into a 01-labeled plane graph
/// that admits an exact-bend orthogonal drawing iff the instance is
/// satisfiable. Each variable becomes a box with duplicator trees feeding
/// one pipe per clause leg; pipes default to `default_pipe_length(3m)`
/// zigzags so every arc has slack to reach its clause.
pub fn compile_01(
    inst: &MonotoneSatInstance,
    pipe_length: Option<u32>,
) -> Result<Labeled01Graph, HardnessError> {
    inst.validate()?;
    let k_pipe = pipe_length.unwrap_or_else(|| default_pipe_length(3 * inst.clauses.len() as u32));
    assert!(k_pipe >= 1, "pipes need at least one zigzag");
    let n = inst.num_variables as usize;
    let legs = leg_lists(inst);

    let boxf = box_fragment();
    let dupf = duplicator_fragment();
    let pipef = pipe_fragment(k_pipe);
    let pipe_east = *pipef.outputs.last().expect("pipe output");
    let clausef = clause_fragment();

    let mut master = Fragment::new(Vec::new());
    let mut pipe_out: Vec<[Vec<(usize, usize)>; 2]> = Vec::with_capacity(n);
    let mut first_box = 0;
    for v in 0..n {
        let b = master.merge(&boxf);
        if v == 0 {
            first_box = b;
        }
        let mut outs_by_side: [Vec<(usize, usize)>; 2] = [Vec::new(), Vec::new()];
        for side in 0..2 {
            let k = legs[side][v].len();
            if k == 0 {
                continue;
            }
            let box_out = if side == POS { (b + 1, b) } else { (b + 3, b + 2) };
            let mut chain = Vec::new();
            for j in 0..k.saturating_sub(1) {
                let feed = if j == 0 {
                    box_out
                } else {
                    (chain[j - 1] + 7, chain[j - 1] + 8)
                };
                chain.push(master.glue(feed, &dupf, (0, 1)));
            }
            // Left-to-right tree outputs: the A leg caps the chain on the
            // right above the axis and on the left below it.
            let outs: Vec<(usize, usize)> = if k == 1 {
                vec![box_out]
            } else {
                let a = (chain[k - 2] + 7, chain[k - 2] + 8);
                let bs = chain.iter().map(|&o| (o + 11, o + 12));
                if side == POS {
                    bs.chain([a]).collect()
                } else {
                    [a].into_iter().chain(bs.rev()).collect()
                }
            };
            for out in outs {
                let off = master.glue(out, &pipef, (1, 0));
                outs_by_side[side].push((pipe_east.0 + off, pipe_east.1 + off));
            }
        }
        pipe_out.push(outs_by_side);
    }
    for (ci, c) in inst.clauses.iter().enumerate() {
        let off = master.merge(&clausef);
        let side = c.negated() as usize;
        for (li, l) in c.literals.iter().enumerate() {
            let v = l.variable as usize;
            let slot = legs[side][v]
                .iter()
                .position(|&x| x == (ci, li))
                .expect("own leg listed");
            // Arcs below the axis are the upper construction turned half
            // around, so their legs connect in reverse.
            let inp = clausef.inputs[if side == POS { li } else { 2 - li }];
            master.identify(pipe_out[v][side][slot], (inp.0 + off, inp.1 + off));
        }
    }
    master.hint = Some((first_box, first_box + 3));
    Ok(master.build())
}

// ---------------------------------------------------------------------------
// Kandinsky reduction gadgets.
//
// A corner blocker is a four-cycle plus an attachment vertex joined to two
// opposite cycle vertices; depth-d nesting stacks d of them on the same
// attachment. Any representation spends 2 bends per level, and 3 per level
// when no box corner of the attachment lies in a pocket face. The one-bend
// gadget is a 2x3 grid with an apex fanned to one column and a pendant on
// the other; with both apex triangles squeezed to 0 degrees it needs exactly
// 3 bends and its bending path turns by exactly one quarter.

/// Nested corner blocker of the given depth with its attachment on the
/// outer face. `pocket_darts` are the incoming darts naming every pocket
/// corner at the attachment; pinning them all to rotation 2 is the
/// no-corner-blocked configuration.
#[derive(Debug, Clone)]
pub struct CornerBlocker {
    pub graph: PlaneGraph,
    pub attachment: VertexId,
    pub pocket_darts: Vec<Dart>,
}

pub fn corner_blocker(depth: usize) -> CornerBlocker {
    assert!(depth >= 1, "blocker depth starts at one");
    let (rows, splice) = blocker_rows(0, depth, &mut (1u32..));
    let mut adjacency = vec![splice];
    adjacency.extend(rows);
    let hint_t = adjacency[0][2 * depth - 1]; // outermost t
    let graph = build_plane_graph(1 + 4 * depth, &adjacency, (0, hint_t, 0))
        .expect("blocker rows are planar");
    let v = VertexId(0);
    let mut pocket_darts = Vec::new();
    for j in 0..depth {
        let t_j = VertexId(adjacency[0][depth + j]);
        pocket_darts.push(graph.dart_between(t_j, v, 0).expect("pocket leg"));
        if j + 1 < depth {
            let s_j = VertexId(adjacency[0][depth - 1 - j]);
            pocket_darts.push(graph.dart_between(s_j, v, 0).expect("pocket leg"));
        }
    }
    CornerBlocker { graph, attachment: v, pocket_darts }
}

/// Rows for the 4d ring vertices of a depth-d blocker on `host`, ids drawn
/// from `fresh`; returns them with the splice the host row gains, ordered
/// outermost-s first then t legs inward-out.
fn blocker_rows(
    host: u32,
    depth: usize,
    fresh: &mut impl Iterator<Item = u32>,
) -> (Vec<Vec<u32>>, Vec<u32>) {
    let mut rows = Vec::with_capacity(4 * depth);
    let mut s_legs = Vec::with_capacity(depth);
    let mut t_legs = Vec::with_capacity(depth);
    for _ in 0..depth {
        let s = fresh.next().unwrap();
        let u = fresh.next().unwrap();
        let t = fresh.next().unwrap();
        let w = fresh.next().unwrap();
        rows.push(vec![host, u, w]); // s
        rows.push(vec![s, t]); // u
        rows.push(vec![host, w, u]); // t
        rows.push(vec![s, t]); // w
        s_legs.push(s);
        t_legs.push(t);
    }
    let mut splice: Vec<u32> = s_legs.iter().rev().copied().collect();
    splice.extend(&t_legs);
    (rows, splice)
}

/// One-bend gadget: 2x3 grid columns u1..u3 and v1..v3, apex `v_end` fanned
/// to the v column, pendant `u_end` on u2. `apex_darts` name the two
/// triangle corners at the apex; `bending_path` runs u, u2, v2, v.
#[derive(Debug, Clone)]
pub struct OneBendGadget {
    pub graph: PlaneGraph,
    pub u_end: VertexId,
    pub v_end: VertexId,
    pub bending_path: Vec<Dart>,
    pub apex_darts: Vec<Dart>,
}

pub fn one_bend_gadget() -> OneBendGadget {
    // ids: u=0, u2=1, u1=2, u3=3, v1=4, v2=5, v3=6, v=7
    let rows: Vec<Vec<u32>> = vec![
        vec![1],
        vec![3, 5, 2, 0],
        vec![1, 4],
        vec![6, 1],
        vec![5, 7, 2],
        vec![6, 7, 4, 1],
        vec![3, 7, 5],
        vec![4, 5, 6],
    ];
    let graph = build_plane_graph(8, &rows, (0, 1, 0)).expect("grid rows are planar");
    let dart = |u: u32, v: u32| graph.dart_between(VertexId(u), VertexId(v), 0).unwrap();
    OneBendGadget {
        u_end: VertexId(0),
        v_end: VertexId(7),
        bending_path: vec![dart(0, 1), dart(1, 5), dart(5, 7)],
        apex_darts: vec![dart(5, 7), dart(6, 7)],
        graph,
    }
}

/// Bend-budgeted Kandinsky instance: the compiled graph meets `budget`
/// exactly when the source admits its 0/1-bend drawing.
#[derive(Debug, Clone)]
pub struct KandinskyInstance {
    pub graph: PlaneGraph,
    pub budget: u32,
    /// bending path darts of the gadget replacing each 1-edge
    pub bending_paths: Vec<Vec<Dart>>,
}

impl KandinskyInstance {
    pub fn optimum(&self) -> Result<(u32, KandinskyRepresentation), SolveError> {
        let order = growth_order(&self.graph);
        let cfg = SolverConfig {
            mode: Mode::Optimal,
            rho_cap: None,
            per_edge_bend_cap: None,
            edge_constraints: Vec::new(),
            fixed_angles: Vec::new(),
            corner_pins: Vec::new(),
            orthogonal_only: false,
        };
        let (bends, rep, _) = solve(&self.graph, &comb_tree(&order), &cfg)?;
        Ok((bends, rep))
    }

    pub fn meets_budget(&self) -> Result<bool, SolveError> {
        Ok(self.optimum()?.0 <= self.budget)
    }
}

/// Bend-minimization form of the exact 0/1 problem: every source vertex is
/// ringed by 16 corner blockers encoding its angle assignment (depth-4 per
/// quarter turn at fixed vertices, evenly padded at free ones) and every
/// 1-edge becomes a one-bend gadget. Budget 32|V| + 3|E1|.
pub fn compile_kandinsky(src: &Labeled01Graph) -> Result<KandinskyInstance, HardnessError> {
    let g = &src.graph;
    let n = g.vertex_count();
    let unfix = |m: String| HardnessError::UnfixableAngles(m);
    let mut pinned: Vec<BTreeMap<usize, i32>> = vec![BTreeMap::new(); n];
    for fa in &src.fixed_angles {
        let prev = pinned[fa.vertex.index()].insert(fa.face.index(), fa.rotation_sum);
        if prev.is_some() {
            return Err(unfix(format!("duplicate pin at vertex {}", fa.vertex.0)));
        }
    }
    for v in g.vertices() {
        if pinned[v.index()].is_empty() {
            continue;
        }
        let faces: BTreeSet<usize> =
            g.rotation(v).iter().map(|&d| g.face_of(d).index()).collect();
        let covered: BTreeSet<usize> = pinned[v.index()].keys().copied().collect();
        if faces != covered {
            return Err(unfix(format!("vertex {} pinned in part only", v.0)));
        }
        let total: i32 = pinned[v.index()].values().sum();
        if total != 2 * g.degree(v) as i32 - 4 {
            return Err(unfix(format!("pins at vertex {} do not close", v.0)));
        }
    }
    for e in g.edges() {
        if !src.one_edge[e.index()] {
            continue;
        }
        let (x, y) = g.endpoints(e);
        if pinned[x.index()].is_empty() || pinned[y.index()].is_empty() {
            return Err(unfix(format!("bend edge {} has a free endpoint", e.index())));
        }
    }

    // Replacement darts per original dart, then blocker splices per corner.
    let mut repl: Vec<Vec<Vec<u32>>> = (0..n)
        .map(|v| {
            g.rotation(VertexId(v as u32))
                .iter()
                .map(|&d| vec![g.head(d).0])
                .collect()
        })
        .collect();
    let mut corner_stacks: Vec<Vec<Vec<usize>>> =
        (0..n).map(|v| vec![Vec::new(); g.degree(VertexId(v as u32))]).collect();
    for v in g.vertices() {
        let deg = g.degree(v);
        if pinned[v.index()].is_empty() {
            assert!(deg <= 4, "free vertex degree exceeds four");
            // 4 per corner, remainder on the last: 16 blockers total
            for c in 0..deg {
                let depth = if c + 1 == deg { 16 - 4 * (deg - 1) } else { 4 };
                corner_stacks[v.index()][c].push(depth);
            }
        } else {
            for (&f, &rs) in &pinned[v.index()] {
                let corners: Vec<usize> = (0..deg)
                    .filter(|&c| g.face_of(g.rotation(v)[c]).index() == f)
                    .collect();
                let count = 2 * corners.len() as i32 - rs;
                assert!(count >= 0, "pin exceeds corner capacity");
                for _ in 0..count {
                    corner_stacks[v.index()][corners[0]].push(4);
                }
            }
        }
    }

    let mut fresh = (n as u32)..u32::MAX;
    let mut extra_rows: Vec<Vec<u32>> = Vec::new();
    let mut gadget_ids: Vec<Option<(u32, u32, u32)>> = vec![None; g.edge_count()]; // (u2, v2, v3)
    for e in g.edges() {
        if !src.one_edge[e.index()] {
            continue;
        }
        let d = e.even_dart();
        let (x, y) = (g.tail(d), g.head(d));
        let u2 = fresh.next().unwrap();
        let u1 = fresh.next().unwrap();
        let u3 = fresh.next().unwrap();
        let v1 = fresh.next().unwrap();
        let v2 = fresh.next().unwrap();
        let v3 = fresh.next().unwrap();
        extra_rows.push(vec![u3, v2, u1, x.0]); // u2
        extra_rows.push(vec![u2, v1]); // u1
        extra_rows.push(vec![v3, u2]); // u3
        extra_rows.push(vec![v2, y.0, u1]); // v1
        extra_rows.push(vec![v3, y.0, v1, u2]); // v2
        extra_rows.push(vec![u3, y.0, v2]); // v3
        let pos_x = g.rotation(x).iter().position(|&dd| dd == d).unwrap();
        repl[x.index()][pos_x] = vec![u2];
        let pos_y = g.rotation(y).iter().position(|&dd| dd == d.twin()).unwrap();
        repl[y.index()][pos_y] = vec![v1, v2, v3];
        gadget_ids[e.index()] = Some((u2, v2, v3));
    }

    let mut adjacency: Vec<Vec<u32>> = Vec::with_capacity(n);
    for v in 0..n {
        let mut row = Vec::new();
        for c in 0..g.degree(VertexId(v as u32)) {
            row.extend(&repl[v][c]);
            for &depth in &corner_stacks[v][c] {
                let (rows, splice) = blocker_rows(v as u32, depth, &mut fresh);
                extra_rows.extend(rows);
                row.extend(splice);
            }
        }
        adjacency.push(row);
    }
    adjacency.extend(extra_rows);

    let hint = hint_after_surgery(src, &gadget_ids);
    let total = adjacency.len();
    let graph = build_plane_graph(total, &adjacency, hint)
        .expect("surgery preserves planarity");

    let mut bending_paths = Vec::new();
    for e in g.edges() {
        if let Some((u2, v2, _)) = gadget_ids[e.index()] {
            let d = e.even_dart();
            let (x, y) = (g.tail(d), g.head(d));
            let dart = |a: u32, b: u32| {
                graph.dart_between(VertexId(a), VertexId(b), 0).expect("gadget dart")
            };
            bending_paths.push(vec![dart(x.0, u2), dart(u2, v2), dart(v2, y.0)]);
        }
    }
    let ones = src.one_edge.iter().filter(|&&b| b).count() as u32;
    Ok(KandinskyInstance {
        graph,
        budget: 32 * n as u32 + 3 * ones,
        bending_paths,
    })
}

/// Outer-face dart surviving the gadget surgery: a 0-edge dart with its
/// occurrence recounted, else the matching boundary dart of the gadget that
/// replaced the first 1-edge of the walk.
fn hint_after_surgery(
    src: &Labeled01Graph,
    gadget_ids: &[Option<(u32, u32, u32)>],
) -> (u32, u32, usize) {
    let g = &src.graph;
    let outer_dart = g.face_walk(g.outer_face()).darts[0];
    for &d in &g.face_walk(g.outer_face()).darts {
        if src.one_edge[d.edge().index()] {
            continue;
        }
        let (t, h) = (g.tail(d), g.head(d));
        let occ = g.rotation(t)[..g.rotation(t).iter().position(|&dd| dd == d).unwrap()]
            .iter()
            .filter(|&&dd| g.head(dd) == h && !src.one_edge[dd.edge().index()])
            .count();
        return (t.0, h.0, occ);
    }
    let d = outer_dart;
    let (u2, _, v3) = gadget_ids[d.edge().index()].expect("all-ones boundary");
    if d.is_even() {
        (g.tail(d).0, u2, 0)
    } else {
        (g.tail(d).0, v3, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::prepare_tree;
    use crate::oracle::{count_right_angled, for_each, min_bends, Census, Probe, SearchConfig};
    use crate::plane_graph::FaceId;

    fn dart(g: &PlaneGraph, u: u32, v: u32) -> Dart {
        g.dart_between(VertexId(u), VertexId(v), 0).expect("dart")
    }

    /// Census of probe values over exact-bend orthogonal representations
    /// honoring the fragment's labels and fixed angles.
    fn fragment_census(frag: &Labeled01Graph, probes: &[Probe]) -> Census {
        let mut cfg = SearchConfig {
            total_bend_budget: frag.one_edge.iter().filter(|&&b| b).count() as u32,
            orthogonal_only: true,
            fixed_angles: frag.fixed_angles.clone(),
            max_edges: Some(frag.graph.edge_count()),
            ..Default::default()
        };
        for e in frag.graph.edges() {
            let bends = if frag.one_edge[e.index()] { 1 } else { 0 };
            cfg.edge_constraints.push((e, EdgeConstraint::ExactBends(bends)));
        }
        let mut census = Census::new();
        for_each(&frag.graph, &cfg, |k| {
            let key: Vec<i32> = probes
                .iter()
                .map(|p| match p {
                    Probe::Side(d) => k.side[d.index()],
                    Probe::Path(darts) => k.rotation_along(&frag.graph, darts),
                })
                .collect();
            *census.entry(key).or_insert(0) += 1;
            true
        })
        .expect("census run");
        census
    }

    fn keys(census: &Census) -> BTreeSet<Vec<i32>> {
        census.keys().cloned().collect()
    }

    #[test]
    fn interval_catalog_rejects_unknown_bounds() {
        assert!(matches!(
            interval_gadget(0, 2),
            Err(HardnessError::UnsupportedInterval { lo: 0, hi: 2 })
        ));
        assert!(matches!(interval_gadget(2, -2), Err(_)));
    }

    fn interval_rotations(lo: i32, hi: i32) -> BTreeSet<i32> {
        let gadget = interval_gadget(lo, hi).unwrap();
        let path = interval_path(&gadget);
        let census = fragment_census(&gadget.fragment, &[Probe::Path(path)]);
        keys(&census).into_iter().map(|k| k[0]).collect()
    }

    #[test]
    fn interval_zero_one_census() {
        let want: BTreeSet<i32> = [0, 1].into_iter().collect();
        assert_eq!(interval_rotations(0, 1), want);
    }

    #[test]
    fn interval_one_one_census() {
        let want: BTreeSet<i32> = [1].into_iter().collect();
        assert_eq!(interval_rotations(1, 1), want);
    }

    #[test]
    fn interval_wide_census() {
        let want: BTreeSet<i32> = (-2..=3).collect();
        assert_eq!(interval_rotations(-2, 3), want);
    }

    #[test]
    fn box_census_exactly_one_side_attains_minimum() {
        let b = building_block(BlockKind::Box);
        let g = &b.fragment.graph;
        let census = count_right_angled(
            g,
            &[dart(g, 1, 2).edge(), dart(g, 3, 0).edge()],
            &[dart(g, 0, 1).edge(), dart(g, 2, 3).edge()],
            &[],
            &[Probe::Side(dart(g, 1, 0)), Probe::Side(dart(g, 3, 2))],
        )
        .unwrap();
        let want: BTreeSet<Vec<i32>> = [vec![1, -1], vec![-1, 1]].into_iter().collect();
        assert_eq!(keys(&census), want);
    }

    fn abstract_square() -> PlaneGraph {
        build_plane_graph(
            4,
            &[vec![1, 3], vec![2, 0], vec![3, 1], vec![0, 2]],
            (0, 3, 0),
        )
        .unwrap()
    }

    #[test]
    fn bendable_box_abstract_census() {
        // 0 = s, 1 = t', 2 = s', 3 = t; 1-edges st and s't', intervals top
        // and bottom
        let g = abstract_square();
        let census = count_right_angled(
            &g,
            &[],
            &[dart(&g, 3, 0).edge(), dart(&g, 2, 1).edge()],
            &[
                (dart(&g, 0, 1).edge(), dart(&g, 0, 1)),
                (dart(&g, 3, 2).edge(), dart(&g, 3, 2)),
            ],
            &[
                Probe::Side(dart(&g, 3, 0)),
                Probe::Side(dart(&g, 0, 1)),
                Probe::Side(dart(&g, 1, 2)),
                Probe::Side(dart(&g, 2, 3)),
            ],
        )
        .unwrap();
        let want: BTreeSet<Vec<i32>> = [
            vec![1, 0, -1, 0],
            vec![1, 1, -1, -1],
            vec![-1, 0, 1, 0],
            vec![-1, 1, 1, -1],
        ]
        .into_iter()
        .collect();
        assert_eq!(keys(&census), want);
    }

    #[test]
    fn merger_abstract_census_couples_both_intervals() {
        // 0 = s, 1 = t', 2 = s', 3 = t; 1-edge st, 0-edge ts', intervals
        // st' and s't' both directed into t'
        let g = abstract_square();
        let census = count_right_angled(
            &g,
            &[dart(&g, 3, 2).edge()],
            &[dart(&g, 3, 0).edge()],
            &[
                (dart(&g, 0, 1).edge(), dart(&g, 0, 1)),
                (dart(&g, 2, 1).edge(), dart(&g, 2, 1)),
            ],
            &[
                Probe::Side(dart(&g, 3, 0)),
                Probe::Side(dart(&g, 0, 1)),
                Probe::Side(dart(&g, 1, 2)),
            ],
        )
        .unwrap();
        let want: BTreeSet<Vec<i32>> = [vec![1, 0, -1], vec![-1, 1, 0]].into_iter().collect();
        assert_eq!(keys(&census), want);
    }

    fn abstract_triangle() -> PlaneGraph {
        build_plane_graph(3, &[vec![1, 2], vec![2, 0], vec![0, 1]], (1, 0, 0)).unwrap()
    }

    #[test]
    fn splitter_abstract_census_forbids_mixed_interval_sum() {
        // 0 = s, 1 = s', 2 = t; 1-edge ss', intervals s't and ts into the
        // inner face
        let g = abstract_triangle();
        let census = count_right_angled(
            &g,
            &[],
            &[dart(&g, 0, 1).edge()],
            &[
                (dart(&g, 1, 2).edge(), dart(&g, 1, 2)),
                (dart(&g, 2, 0).edge(), dart(&g, 2, 0)),
            ],
            &[
                Probe::Side(dart(&g, 0, 1)),
                Probe::Side(dart(&g, 1, 2)),
                Probe::Side(dart(&g, 2, 0)),
            ],
        )
        .unwrap();
        let want: BTreeSet<Vec<i32>> = [vec![1, 0, 0], vec![-1, 1, 1]].into_iter().collect();
        assert_eq!(keys(&census), want);
        for key in keys(&census) {
            assert_ne!(key[1] + key[2], 1);
        }
    }

    /// Corner pins forcing right angles at the listed vertices' corners on
    /// the block's rectangle faces, for concrete-fragment censuses.
    fn rectangle_pins(frag: &Labeled01Graph, vertices: &[u32]) -> Vec<(Dart, i32)> {
        let g = &frag.graph;
        let faces: BTreeSet<FaceId> = frag
            .fixed_angles
            .iter()
            .filter(|fa| fa.rotation_sum == 1)
            .map(|fa| fa.face)
            .collect();
        let mut pins = Vec::new();
        for &v in vertices {
            let v = VertexId(v);
            for &d in g.rotation(v) {
                // corner[d_in] lives in face_of(d_in) at head(d_in)
                let din = d.twin();
                if faces.contains(&g.face_of(din)) {
                    pins.push((din, 1));
                }
            }
        }
        pins
    }

    fn concrete_census(
        frag: &Labeled01Graph,
        pins: Vec<(Dart, i32)>,
        probes: &[Probe],
    ) -> Census {
        let mut cfg = SearchConfig {
            total_bend_budget: frag.one_edge.iter().filter(|&&b| b).count() as u32,
            orthogonal_only: true,
            corner_pins: pins,
            max_edges: Some(frag.graph.edge_count()),
            ..Default::default()
        };
        for e in frag.graph.edges() {
            let bends = if frag.one_edge[e.index()] { 1 } else { 0 };
            cfg.edge_constraints.push((e, EdgeConstraint::ExactBends(bends)));
        }
        let mut census = Census::new();
        for_each(&frag.graph, &cfg, |k| {
            let key: Vec<i32> = probes
                .iter()
                .map(|p| match p {
                    Probe::Side(d) => k.side[d.index()],
                    Probe::Path(darts) => k.rotation_along(&frag.graph, darts),
                })
                .collect();
            *census.entry(key).or_insert(0) += 1;
            true
        })
        .expect("census run");
        census
    }

    #[test]
    fn bendable_box_concrete_matches_abstract() {
        let frag = building_block(BlockKind::BendableBox).fragment;
        let g = &frag.graph;
        let probes = vec![
            Probe::Side(dart(g, 3, 0)),
            Probe::Path(vec![dart(g, 0, 4), dart(g, 4, 1)]),
            Probe::Side(dart(g, 1, 2)),
            Probe::Path(vec![dart(g, 2, 5), dart(g, 5, 3)]),
        ];
        let census = concrete_census(&frag, rectangle_pins(&frag, &[0, 1, 2, 3]), &probes);
        let want: BTreeSet<Vec<i32>> = [
            vec![1, 0, -1, 0],
            vec![1, 1, -1, -1],
            vec![-1, 0, 1, 0],
            vec![-1, 1, 1, -1],
        ]
        .into_iter()
        .collect();
        assert_eq!(keys(&census), want);
    }

    #[test]
    fn bendable_box_mirrored_concrete_census() {
        let frag = building_block(BlockKind::BendableBoxMirrored).fragment;
        let g = &frag.graph;
        let probes = vec![
            Probe::Side(dart(g, 3, 0)),
            Probe::Path(vec![dart(g, 0, 4), dart(g, 4, 1)]),
            Probe::Side(dart(g, 1, 2)),
            Probe::Path(vec![dart(g, 2, 5), dart(g, 5, 3)]),
        ];
        let census = concrete_census(&frag, rectangle_pins(&frag, &[0, 1, 2, 3]), &probes);
        let want: BTreeSet<Vec<i32>> = [
            vec![1, 0, -1, 0],
            vec![1, -1, -1, 1],
            vec![-1, 0, 1, 0],
            vec![-1, -1, 1, 1],
        ]
        .into_iter()
        .collect();
        assert_eq!(keys(&census), want);
    }

    #[test]
    fn merger_concrete_census() {
        let frag = building_block(BlockKind::Merger).fragment;
        let g = &frag.graph;
        let probes = vec![
            Probe::Side(dart(g, 3, 0)),
            Probe::Path(vec![dart(g, 0, 4), dart(g, 4, 1)]),
            Probe::Path(vec![dart(g, 1, 5), dart(g, 5, 2)]),
        ];
        let census = concrete_census(&frag, rectangle_pins(&frag, &[0, 1, 2, 3]), &probes);
        let want: BTreeSet<Vec<i32>> = [vec![1, 0, -1], vec![-1, 1, 0]].into_iter().collect();
        assert_eq!(keys(&census), want);
    }

    #[test]
    fn splitter_concrete_census() {
        let frag = building_block(BlockKind::Splitter).fragment;
        let g = &frag.graph;
        let probes = vec![
            Probe::Side(dart(g, 0, 1)),
            Probe::Path(vec![dart(g, 1, 4), dart(g, 4, 2)]),
            Probe::Path(vec![dart(g, 2, 3), dart(g, 3, 0)]),
        ];
        let census = concrete_census(&frag, rectangle_pins(&frag, &[0, 1, 2]), &probes);
        let want: BTreeSet<Vec<i32>> = [vec![1, 0, 0], vec![-1, 1, 1]].into_iter().collect();
        assert_eq!(keys(&census), want);
    }

    #[test]
    fn splitter_mirrored_census_matches_through_reflected_probes() {
        // reversing every rotation row mirrors the embedding; the census
        // read through the reversed darts is unchanged
        let frag = building_block(BlockKind::SplitterMirrored).fragment;
        let g = &frag.graph;
        let probes = vec![
            Probe::Side(dart(g, 1, 0)),
            Probe::Path(vec![dart(g, 2, 4), dart(g, 4, 1)]),
            Probe::Path(vec![dart(g, 0, 3), dart(g, 3, 2)]),
        ];
        let census = concrete_census(&frag, rectangle_pins(&frag, &[0, 1, 2]), &probes);
        let want: BTreeSet<Vec<i32>> = [vec![1, 0, 0], vec![-1, 1, 1]].into_iter().collect();
        assert_eq!(keys(&census), want);
    }

    #[test]
    fn variable_gadget_has_two_right_angled_classes() {
        let frag = variable_gadget();
        let g = &frag.graph;
        let census = count_right_angled(
            g,
            &[dart(g, 1, 2).edge(), dart(g, 3, 0).edge()],
            &[dart(g, 0, 1).edge(), dart(g, 2, 3).edge()],
            &[],
            &[Probe::Side(dart(g, 1, 0)), Probe::Side(dart(g, 3, 2))],
        )
        .unwrap();
        assert_eq!(census.len(), 2);
        let want: BTreeSet<Vec<i32>> = [vec![1, -1], vec![-1, 1]].into_iter().collect();
        assert_eq!(keys(&census), want);
    }

    #[test]
    fn duplicator_census_negates_input_on_both_outputs() {
        let frag = duplicator();
        let probes = vec![
            Probe::Side(frag.inputs[0].twin()),
            Probe::Side(frag.outputs[0]),
            Probe::Side(frag.outputs[1]),
        ];
        let census = fragment_census(&frag, &probes);
        let want: BTreeSet<Vec<i32>> = [vec![1, -1, -1], vec![-1, 1, 1]].into_iter().collect();
        assert_eq!(keys(&census), want);
    }

    /// Outer-face darts strictly between the twin of the input and the
    /// output, pendant detours dropped.
    fn boundary_probes(frag: &Labeled01Graph) -> (Vec<Dart>, Vec<Dart>) {
        let g = &frag.graph;
        let start = frag.inputs[0].twin();
        let out = frag.outputs[0];
        let mut below = Vec::new();
        let mut above = Vec::new();
        let mut past_output = false;
        let mut d = g.next_in_face(start);
        while d != start {
            if d == out {
                past_output = true;
            } else if g.degree(g.head(d)) == 1 {
                d = g.next_in_face(g.next_in_face(d));
                continue;
            } else if past_output {
                above.push(d);
            } else {
                below.push(d);
            }
            d = g.next_in_face(d);
        }
        (below, above)
    }

    fn pipe_census(k: u32) -> BTreeSet<Vec<i32>> {
        let frag = bendable_pipe(k);
        let (below, above) = boundary_probes(&frag);
        let probes = vec![
            Probe::Side(frag.inputs[0].twin()),
            Probe::Side(frag.outputs[0]),
            Probe::Path(below),
            Probe::Path(above),
        ];
        keys(&fragment_census(&frag, &probes))
    }

    #[test]
    fn zigzag_census_swings_one_step() {
        let mut want = BTreeSet::new();
        for r in [-1, 1] {
            for rho in -1..=1 {
                want.insert(vec![r, -r, rho, -rho]);
            }
        }
        assert_eq!(pipe_census(1), want);
    }

    #[test]
    fn pipe_census_width_grows_with_length() {
        let mut want = BTreeSet::new();
        for r in [-1, 1] {
            for rho in -2..=2 {
                want.insert(vec![r, -r, rho, -rho]);
            }
        }
        assert_eq!(pipe_census(2), want);
    }

    #[test]
    fn clause_census_excludes_all_positive_pattern() {
        let frag = clause_gadget();
        let probes: Vec<Probe> = frag.inputs.iter().map(|&d| Probe::Side(d)).collect();
        let census = fragment_census(&frag, &probes);
        let mut want = BTreeSet::new();
        for a in [-1, 1] {
            for b in [-1, 1] {
                for c in [-1, 1] {
                    if (a, b, c) != (1, 1, 1) {
                        want.insert(vec![a, b, c]);
                    }
                }
            }
        }
        assert_eq!(keys(&census), want);
    }

    #[test]
    fn labeled_graph_json_round_trip() {
        let frag = duplicator();
        let j = frag.to_json();
        let back = Labeled01Graph::from_json(&j).unwrap();
        assert_eq!(back.to_json(), j);
    }

    #[test]
    fn default_pipe_length_for_one_clause() {
        assert_eq!(default_pipe_length(3), 39);
    }

    #[test]
    fn gadget_fragments_respect_degree_bound() {
        for frag in [variable_gadget(), duplicator(), zigzag(), bendable_pipe(3), clause_gadget()] {
            assert!(frag.graph.vertices().all(|v| frag.graph.degree(v) <= 4));
        }
    }

    #[test]
    fn sat_format_round_trip() {
        let text = "c tiny
p monotone 4 3
1 2 4 0
2 3 3 0
-1 -2 -4 0
l 1 2
";
        let inst = parse_sat(text).unwrap();
        assert_eq!(inst.num_variables, 4);
        assert_eq!(inst.clauses.len(), 3);
        assert_eq!(inst.clauses[0].level, 2);
        assert_eq!(inst.clauses[1].level, 1);
        assert!(inst.clauses[2].negated());
        assert_eq!(parse_sat(&render_sat(&inst)).unwrap(), inst);
        inst.validate().unwrap();
    }

    #[test]
    fn sat_format_rejects_garbage() {
        for text in [
            "1 2 3 0\n",
            "p monotone 3\n1 2 3 0\n",
            "p monotone 3 1\n1 2 3\n",
            "p monotone 3 2\n1 2 3 0\n",
            "p monotone 3 1\n1 2 3 0\nl 0 2\n",
            "p monotone 3 1\n1 2 3 0\nl 2 2\n",
        ] {
            assert!(matches!(parse_sat(text), Err(HardnessError::BadFormat(_))), "{text:?}");
        }
    }

    #[test]
    fn validate_flags_bad_layouts() {
        let mixed = parse_sat("p monotone 2 1\n1 -2 2 0\n").unwrap();
        assert!(matches!(mixed.validate(), Err(HardnessError::MixedClause { clause: 0 })));

        let crossing = parse_sat("p monotone 4 2\n1 1 3 0\n2 2 4 0\n").unwrap();
        assert!(matches!(
            crossing.validate(),
            Err(HardnessError::CrossingRepresentation(_))
        ));

        let corridor = parse_sat("p monotone 3 2\n1 2 3 0\n1 2 3 0\nl 1 2\n").unwrap();
        assert!(matches!(
            corridor.validate(),
            Err(HardnessError::CrossingRepresentation(_))
        ));

        let unordered = parse_sat("p monotone 3 1\n2 1 3 0\n").unwrap();
        assert!(matches!(
            unordered.validate(),
            Err(HardnessError::CrossingRepresentation(_))
        ));

        let lonely = parse_sat("p monotone 4 1\n1 2 3 0\n").unwrap();
        assert!(matches!(
            lonely.validate(),
            Err(HardnessError::CrossingRepresentation(_))
        ));
    }

    #[test]
    fn compile_single_clause_structure() {
        let inst = parse_sat("p monotone 3 1\n1 2 3 0\n").unwrap();
        let g = compile_01(&inst, Some(1)).unwrap();
        assert_eq!(g.graph.edge_count(), 59);
        assert!(g.graph.vertices().all(|v| g.graph.degree(v) <= 4));
        assert_eq!(g.glue_order.len(), 59);
        prepare_tree(&g.graph, &g.glue_tree()).expect("compiled comb is valid");
        assert!(g.decide().unwrap());
    }

    #[test]
    fn compile_contradiction_decides_false() {
        let inst = parse_sat("p monotone 1 2\n1 1 1 0\n-1 -1 -1 0\n").unwrap();
        assert!(!inst.brute_force_satisfiable());
        let g = compile_01(&inst, Some(1)).unwrap();
        assert_eq!(g.graph.edge_count(), 162);
        assert!(!g.decide().unwrap());
    }

    #[test]
    fn compile_uses_default_pipe_length() {
        let inst = parse_sat("p monotone 3 1\n1 2 3 0\n").unwrap();
        let g = compile_01(&inst, None).unwrap();
        // three pipes of 39 zigzags, 14k+1 edges each
        assert_eq!(g.graph.edge_count(), 12 + 3 * (14 * 39 + 1) + 8 - 6);
    }

    #[test]
    fn gadget_glue_orders_form_valid_combs() {
        let gadgets = [
            variable_gadget(),
            duplicator(),
            zigzag(),
            bendable_pipe(2),
            clause_gadget(),
            building_block(BlockKind::Box).fragment,
            building_block(BlockKind::BendableBox).fragment,
            building_block(BlockKind::BendableBoxMirrored).fragment,
            building_block(BlockKind::Merger).fragment,
            building_block(BlockKind::Splitter).fragment,
            building_block(BlockKind::SplitterMirrored).fragment,
            interval_gadget(-2, 3).unwrap().fragment,
        ];
        for g in gadgets {
            assert_eq!(g.glue_order.len(), g.graph.edge_count());
            prepare_tree(&g.graph, &g.glue_tree()).expect("glue order is a valid comb");
        }
    }

    fn solver_min(g: &PlaneGraph, pins: Vec<(Dart, i32)>) -> u32 {
        let cfg = SolverConfig {
            mode: Mode::Optimal,
            corner_pins: pins,
            ..Default::default()
        };
        let tree = comb_tree(&growth_order(g));
        solve(g, &tree, &cfg).expect("blocker solves").0
    }

    #[test]
    fn corner_blocker_minima_scale_with_depth() {
        for depth in 1..=2usize {
            let b = corner_blocker(depth);
            assert_eq!(b.graph.vertex_count(), 1 + 4 * depth);
            assert_eq!(b.graph.edge_count(), 6 * depth);
            let pins: Vec<_> = b.pocket_darts.iter().map(|&d| (d, 2)).collect();
            assert_eq!(pins.len(), 2 * depth - 1);
            assert_eq!(solver_min(&b.graph, Vec::new()), 2 * depth as u32);
            assert_eq!(solver_min(&b.graph, pins.clone()), 3 * depth as u32);
            if depth == 1 {
                // exhaustive cross-check at the depth the oracle can afford
                let free = min_bends(&b.graph, &SearchConfig::default()).unwrap();
                assert_eq!(free.0, 2);
                let blocked_cfg = SearchConfig { corner_pins: pins, ..Default::default() };
                let blocked = min_bends(&b.graph, &blocked_cfg).unwrap();
                assert_eq!(blocked.0, 3);
            }
        }
    }

    #[test]
    fn one_bend_gadget_shape() {
        let gadget = one_bend_gadget();
        assert_eq!(gadget.graph.vertex_count(), 8);
        assert_eq!(gadget.graph.edge_count(), 11);
        assert_eq!(gadget.graph.rotation(gadget.u_end).len(), 1);
        assert_eq!(gadget.graph.rotation(gadget.v_end).len(), 3);
        assert_eq!(gadget.bending_path.len(), 3);
        assert_eq!(gadget.graph.tail(gadget.bending_path[0]), gadget.u_end);
        assert_eq!(gadget.graph.head(gadget.bending_path[2]), gadget.v_end);
        for &d in &gadget.apex_darts {
            assert_eq!(gadget.graph.head(d), gadget.v_end);
            assert_eq!(gadget.graph.face_walk(gadget.graph.face_of(d)).darts.len(), 3);
        }
    }

    fn two_vertex_source(one: bool) -> Labeled01Graph {
        let graph = build_plane_graph(2, &[vec![1], vec![0]], (0, 1, 0)).unwrap();
        let fixed_angles = if one {
            let outer = graph.outer_face();
            (0..2)
                .map(|v| FixedAngle { vertex: VertexId(v), face: outer, rotation_sum: -2 })
                .collect()
        } else {
            Vec::new()
        };
        Labeled01Graph {
            one_edge: vec![one],
            fixed_angles,
            inputs: Vec::new(),
            outputs: Vec::new(),
            glue_order: graph.edges().collect(),
            graph,
        }
    }

    #[test]
    fn compile_kandinsky_two_vertex_sizes() {
        let zero = compile_kandinsky(&two_vertex_source(false)).unwrap();
        assert_eq!(zero.graph.vertex_count(), 130);
        assert_eq!(zero.graph.edge_count(), 193);
        assert_eq!(zero.budget, 64);
        assert!(zero.bending_paths.is_empty());

        let one = compile_kandinsky(&two_vertex_source(true)).unwrap();
        assert_eq!(one.graph.vertex_count(), 136);
        assert_eq!(one.graph.edge_count(), 203);
        assert_eq!(one.budget, 67);
        assert_eq!(one.bending_paths.len(), 1);
    }

    #[test]
    fn compile_kandinsky_rejects_loose_pins() {
        let mut src = two_vertex_source(true);
        src.fixed_angles.pop();
        assert!(matches!(
            compile_kandinsky(&src),
            Err(HardnessError::UnfixableAngles(_))
        ));

        let mut half = two_vertex_source(false);
        half.one_edge[0] = true;
        assert!(matches!(
            compile_kandinsky(&half),
            Err(HardnessError::UnfixableAngles(_))
        ));

        let mut open = two_vertex_source(true);
        open.fixed_angles[0].rotation_sum = 0;
        assert!(matches!(
            compile_kandinsky(&open),
            Err(HardnessError::UnfixableAngles(_))
        ));
    }
}
