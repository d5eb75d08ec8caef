//! Exact bend minimization over a decomposition tree.
//!
//! Each tree node's subgraph is summarized by a table mapping interface
//! classes to their cheapest cost. An interface records, around the face of
//! the node's subgraph that holds the rest of the graph: the rotation of
//! each boundary path between consecutive attachment visits, the corner
//! rotation at each attachment, and per attachment two 0-degree flags
//! telling whether the incident edge ends bend toward that face.
//!
//! Merging two child tables walks the merged subgraph's faces once to build
//! a static skeleton: which child boundary paths line each face, where the
//! two children meet at shared vertices (each contributing a pair of corner
//! slots tied by rot_f + rot_f' = rot_1 + rot_2 + 4), and which faces the
//! merge closes (their rotation sums become exact constraints, -4 for the
//! outer face). Right-child entries are bucketed by their shared-vertex
//! components and by the path rotations forced through single-path closed
//! faces, so the join only materializes compatible triples.

use crate::decomposition::{prepare_tree, DecompError, DecompTree};
use crate::oracle::EdgeConstraint;
use crate::plane_graph::{Dart, EdgeId, FaceId, PlaneGraph, VertexId};
use crate::rep::{FixedAngle, KandinskyRepresentation};
use crate::subgraph::{face_regions, induced_plane_subgraph, PlaneSubgraph};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("no representation satisfies the constraints")]
    Infeasible,
    #[error("rotation cap clipped the search; retry with rho >= {suggested_rho}")]
    CapTooSmall { suggested_rho: i32 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("decomposition error: {0}")]
    Decomp(#[from] DecompError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Optimal,
    BBend,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub mode: Mode,
    pub rho_cap: Option<i32>,
    /// required in b-bend mode; the optimal ladder picks its own caps
    pub per_edge_bend_cap: Option<u32>,
    pub edge_constraints: Vec<(EdgeId, EdgeConstraint)>,
    pub fixed_angles: Vec<FixedAngle>,
    /// single-corner pins keyed by the dart whose head owns the corner
    pub corner_pins: Vec<(Dart, i32)>,
    pub orthogonal_only: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: Mode::Optimal,
            rho_cap: None,
            per_edge_bend_cap: None,
            edge_constraints: Vec::new(),
            fixed_angles: Vec::new(),
            corner_pins: Vec::new(),
            orthogonal_only: false,
        }
    }
}

/// Largest boundary-path rotation an optimum within the given mode can
/// need.
pub fn rho_bound(g: &PlaneGraph, mode: Mode, b: u32) -> i32 {
    let m = g.edge_count() as i32;
    let df = g.max_face_degree() as i32;
    match mode {
        Mode::Optimal => m + df - 2,
        Mode::BBend => (b as i32 + 1) * df - b as i32 - 2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AttComp {
    pub rotation: i8,
    pub flag_in: bool,
    pub flag_out: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Interface {
    pub paths: Vec<i32>,
    pub atts: Vec<AttComp>,
}

/// All (rotation, flag, flag) triples an attachment may carry: rotation 2
/// needs a true flag, rotation -2 a false one.
pub fn legal_side_configs() -> Vec<AttComp> {
    let mut out = Vec::new();
    for rotation in -2i8..=2 {
        for flag_in in [false, true] {
            for flag_out in [false, true] {
                if rotation == 2 && !flag_in && !flag_out {
                    continue;
                }
                if rotation == -2 && flag_in && flag_out {
                    continue;
                }
                out.push(AttComp {
                    rotation,
                    flag_in,
                    flag_out,
                });
            }
        }
    }
    out
}

/// Legal (rot_f, rot_f') pairs at a shared vertex given both sides'
/// attachment components; a 0-degree corner on a side needs one of the two
/// edge-end flags adjacent to that side.
pub fn shared_vertex_combinations(
    a: AttComp,
    b: AttComp,
    f_licensed: bool,
    fp_licensed: bool,
) -> Vec<(i32, i32)> {
    let s = a.rotation as i32 + b.rotation as i32 + 4;
    let mut out = Vec::new();
    for cf in -2..=2 {
        let cfp = s - cf;
        if !(-2..=2).contains(&cfp) {
            continue;
        }
        if cf == 2 && !f_licensed {
            continue;
        }
        if cfp == 2 && !fp_licensed {
            continue;
        }
        out.push((cf, cfp));
    }
    out
}

#[derive(Debug, Clone)]
struct Visit {
    vertex: VertexId,
    in_host: Dart,
    out_host: Dart,
    in_sub: Dart,
    out_sub: Dart,
}

/// Interface geometry of one tree node's subgraph relative to the host.
struct NodeShape {
    sub: PlaneSubgraph,
    f_int: Option<FaceId>,
    visits: Vec<Visit>,
    /// per boundary path: host darts from visit i's out to visit i+1's in
    paths_host: Vec<Vec<Dart>>,
    paths_sub: Vec<Vec<Dart>>,
}

fn build_node_shape(g: &PlaneGraph, in_sub: &[bool]) -> Result<NodeShape, SolveError> {
    let sub = induced_plane_subgraph(g, in_sub)
        .map_err(|e| SolveError::InvalidInput(e.to_string()))?;
    if in_sub.iter().all(|&b| b) {
        return Ok(NodeShape {
            sub,
            f_int: None,
            visits: Vec::new(),
            paths_host: Vec::new(),
            paths_sub: Vec::new(),
        });
    }

    // interface face: the subgraph face whose region holds a complement edge
    let (region, _) = face_regions(g, in_sub);
    let comp_edge = (0..g.edge_count()).find(|&e| !in_sub[e]).unwrap();
    let comp_region = region[g.face_of(EdgeId(comp_edge as u32).even_dart()).index()];
    let f_int = sub
        .graph
        .darts()
        .map(|d| (d, sub.host_dart(d)))
        .find(|&(_, hd)| region[g.face_of(hd).index()] == comp_region)
        .map(|(d, _)| sub.graph.face_of(d))
        .ok_or_else(|| SolveError::InvalidInput("interface face not found".into()))?;

    // attachment visits: walk corners whose host sweep crossed the complement
    let walk = sub.graph.face_walk(f_int).darts.clone();
    let len = walk.len();
    let mut raw_visits = Vec::new();
    for j in 0..len {
        let d = walk[j];
        let d_next = walk[(j + 1) % len];
        let hd = sub.host_dart(d);
        let hd_next = sub.host_dart(d_next);
        if g.next_in_face(hd) != hd_next {
            raw_visits.push((j, d, d_next, hd, hd_next));
        }
    }
    if raw_visits.is_empty() {
        return Err(SolveError::InvalidInput(
            "proper subgraph without attachments".into(),
        ));
    }
    let start = (0..raw_visits.len())
        .min_by_key(|&i| {
            let v = g.head(raw_visits[i].3);
            (v, raw_visits[i].3)
        })
        .unwrap();
    let k = raw_visits.len();
    let mut visits = Vec::with_capacity(k);
    let mut paths_sub = Vec::with_capacity(k);
    for i in 0..k {
        let (j, d, d_next, hd, hd_next) = raw_visits[(start + i) % k];
        let _ = d;
        visits.push(Visit {
            vertex: g.head(hd),
            in_host: hd,
            out_host: hd_next,
            in_sub: d,
            out_sub: d_next,
        });
        let (j2, _, _, _, _) = raw_visits[(start + i + 1) % k];
        let mut darts = Vec::new();
        let mut p = (j + 1) % len;
        loop {
            darts.push(walk[p]);
            if p == j2 {
                break;
            }
            p = (p + 1) % len;
        }
        paths_sub.push(darts);
    }
    let paths_host = paths_sub
        .iter()
        .map(|p| p.iter().map(|&d| sub.host_dart(d)).collect())
        .collect();
    Ok(NodeShape {
        sub,
        f_int: Some(f_int),
        visits,
        paths_host,
        paths_sub,
    })
}

/// Interface of a concrete subgraph representation, via the node shape.
fn interface_of(shape: &NodeShape, k: &KandinskyRepresentation) -> Interface {
    let mut paths = Vec::with_capacity(shape.visits.len());
    for p in &shape.paths_sub {
        let mut r: i32 = p.iter().map(|&d| k.side[d.index()]).sum();
        for &d in &p[..p.len() - 1] {
            r += k.corner[d.index()];
        }
        paths.push(r);
    }
    let atts = shape
        .visits
        .iter()
        .map(|v| AttComp {
            rotation: k.corner[v.in_sub.index()] as i8,
            flag_in: k.end_head[v.in_sub.index()] == -1,
            flag_out: k.end_tail[v.out_sub.index()] == -1,
        })
        .collect();
    Interface { paths, atts }
}

#[derive(Debug, Clone)]
enum Back {
    Leaf {
        et: i32,
        c: i32,
        eh: i32,
    },
    Merge {
        left: Interface,
        right: Interface,
        corners: Vec<(Dart, i32)>,
    },
}

#[derive(Debug, Clone)]
struct Entry {
    cost: u32,
    back: Back,
}

type Table = BTreeMap<Interface, Entry>;

#[derive(Debug, Clone, serde::Serialize)]
pub struct NodeStat {
    pub node: usize,
    pub width: usize,
    pub table_len: usize,
    pub entries_examined: u64,
    pub probes: u64,
    pub ceiling: u128,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SolveReport {
    pub optimum: u32,
    pub rho_cap: i32,
    pub node_stats: Vec<NodeStat>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Token {
    Att(usize),
    Piece(u8, usize),
    Slot(usize),
}

#[derive(Debug)]
struct SlotInfo {
    host_in: Dart,
    /// (child, visit index) whose flag_in licenses a 0-degree corner here
    lic_in: (u8, usize),
    lic_out: (u8, usize),
    vertex: VertexId,
}

#[derive(Debug)]
struct SharedVertex {
    l_visit: usize,
    r_visit: usize,
    /// slot ids; one when the vertex stays an attachment of the merge
    slots: Vec<usize>,
    mu_visit: Option<usize>,
}

enum MuAtt {
    Copy(u8, usize),
    SharedOut {
        shared_idx: usize,
        in_ref: (u8, usize),
        out_ref: (u8, usize),
    },
}

struct ClosedFace {
    pieces: Vec<(u8, usize)>,
    slot_ids: Vec<usize>,
    target: i32,
}

struct Skeleton {
    slots: Vec<SlotInfo>,
    shared: Vec<SharedVertex>,
    closed_faces: Vec<ClosedFace>,
    mu_paths: Vec<Vec<Token>>,
    mu_atts: Vec<MuAtt>,
    /// right-child path indices forced by single-right-piece closed faces
    forced_r_paths: Vec<usize>,
    forcing_face: Vec<usize>,
}

enum CornerKind {
    Interior,
    Att(usize),
    Mixed,
}

fn build_skeleton(
    g: &PlaneGraph,
    mu: &NodeShape,
    left: &NodeShape,
    right: &NodeShape,
) -> Result<Skeleton, SolveError> {
    let mut child_of_edge = vec![2u8; g.edge_count()];
    for e in 0..g.edge_count() {
        if left.sub.sub_edge(EdgeId(e as u32)).is_some() {
            child_of_edge[e] = 0;
        } else if right.sub.sub_edge(EdgeId(e as u32)).is_some() {
            child_of_edge[e] = 1;
        }
    }
    let shapes = [left, right];
    let mut path_start: HashMap<Dart, (u8, usize)> = HashMap::new();
    for (side, shape) in shapes.iter().enumerate() {
        for (i, p) in shape.paths_host.iter().enumerate() {
            path_start.insert(p[0], (side as u8, i));
        }
    }
    let mut visit_at: [HashMap<VertexId, usize>; 2] = [HashMap::new(), HashMap::new()];
    for side in 0..2 {
        for (i, v) in shapes[side].visits.iter().enumerate() {
            visit_at[side].insert(v.vertex, i);
        }
    }
    let mu_visit_by_insub: HashMap<Dart, usize> = mu
        .visits
        .iter()
        .enumerate()
        .map(|(i, v)| (v.in_sub, i))
        .collect();

    let classify = |d: Dart, d_next: Dart| -> CornerKind {
        if let Some(&vi) = mu_visit_by_insub.get(&d) {
            return CornerKind::Att(vi);
        }
        let hd = mu.sub.host_dart(d);
        let hd_next = mu.sub.host_dart(d_next);
        let ca = child_of_edge[hd.edge().index()];
        let cb = child_of_edge[hd_next.edge().index()];
        if ca == cb {
            let shape = shapes[ca as usize];
            let cd = shape.sub.sub_dart(hd).unwrap();
            let cd_next = shape.sub.sub_dart(hd_next).unwrap();
            if shape.sub.graph.next_in_face(cd) == cd_next {
                return CornerKind::Interior;
            }
        }
        CornerKind::Mixed
    };

    let mut slots: Vec<SlotInfo> = Vec::new();

    // walks a cyclic face into tokens, starting just past a token corner
    let tokenize =
        |walk: &[Dart], slots: &mut Vec<SlotInfo>| -> Result<Vec<Token>, SolveError> {
            let len = walk.len();
            let boundary = (0..len)
                .find(|&j| {
                    !matches!(classify(walk[j], walk[(j + 1) % len]), CornerKind::Interior)
                })
                .ok_or_else(|| {
                    SolveError::InvalidInput("mixed face with no corner token".into())
                })?;
            let mut tokens = Vec::new();
            let mut run_len = 0usize;
            for step in 0..len {
                let j = (boundary + 1 + step) % len;
                let d = walk[j];
                let d_next = walk[(j + 1) % len];
                run_len += 1;
                let kind = classify(d, d_next);
                if matches!(kind, CornerKind::Interior) {
                    continue;
                }
                let first = walk[(j + len - (run_len - 1)) % len];
                let first_host = mu.sub.host_dart(first);
                let &(side, idx) = path_start.get(&first_host).ok_or_else(|| {
                    SolveError::InvalidInput("piece does not start a child path".into())
                })?;
                if shapes[side as usize].paths_host[idx].len() != run_len {
                    return Err(SolveError::InvalidInput(
                        "piece does not cover a whole child path".into(),
                    ));
                }
                tokens.push(Token::Piece(side, idx));
                run_len = 0;
                match kind {
                    CornerKind::Att(vi) => tokens.push(Token::Att(vi)),
                    CornerKind::Mixed => {
                        let hd = mu.sub.host_dart(d);
                        let hd_next = mu.sub.host_dart(d_next);
                        let ca = child_of_edge[hd.edge().index()];
                        let cb = child_of_edge[hd_next.edge().index()];
                        let v = g.head(hd);
                        let arr_vis = *visit_at[ca as usize].get(&v).ok_or_else(|| {
                            SolveError::InvalidInput("slot vertex missing child visit".into())
                        })?;
                        let lv_vis = *visit_at[cb as usize].get(&v).ok_or_else(|| {
                            SolveError::InvalidInput("slot vertex missing child visit".into())
                        })?;
                        if shapes[ca as usize].visits[arr_vis].in_host != hd
                            || shapes[cb as usize].visits[lv_vis].out_host != hd_next
                        {
                            return Err(SolveError::InvalidInput(
                                "slot darts disagree with child visits".into(),
                            ));
                        }
                        tokens.push(Token::Slot(slots.len()));
                        slots.push(SlotInfo {
                            host_in: hd,
                            lic_in: (ca, arr_vis),
                            lic_out: (cb, lv_vis),
                            vertex: v,
                        });
                    }
                    CornerKind::Interior => unreachable!(),
                }
            }
            Ok(tokens)
        };

    // merged boundary paths from the interface walk
    let mut mu_paths: Vec<Vec<Token>> = Vec::new();
    if let Some(f_int) = mu.f_int {
        let walk = mu.sub.graph.face_walk(f_int).darts.clone();
        let tokens = tokenize(&walk, &mut slots)?;
        // rotate tokens to end at attachment 0, then split at attachments
        let att0 = tokens
            .iter()
            .position(|t| matches!(t, Token::Att(0)))
            .ok_or_else(|| {
                SolveError::InvalidInput("interface walk misses attachment 0".into())
            })?;
        let n = tokens.len();
        let rotated: Vec<Token> = (0..n).map(|i| tokens[(att0 + 1 + i) % n]).collect();
        mu_paths = vec![Vec::new(); mu.visits.len()];
        let mut current: Vec<Token> = Vec::new();
        let mut path_idx = 0usize;
        for t in rotated {
            match t {
                Token::Att(vi) => {
                    if vi != (path_idx + 1) % mu.visits.len() {
                        return Err(SolveError::InvalidInput(
                            "attachment visits out of walk order".into(),
                        ));
                    }
                    mu_paths[path_idx] = std::mem::take(&mut current);
                    path_idx += 1;
                }
                other => current.push(other),
            }
        }
        if path_idx != mu.visits.len() || !current.is_empty() {
            return Err(SolveError::InvalidInput(
                "interface walk did not close at an attachment".into(),
            ));
        }
    }

    // closed faces: mixed faces other than the interface face
    let mut closed_faces = Vec::new();
    for f in mu.sub.graph.face_ids() {
        if Some(f) == mu.f_int {
            continue;
        }
        let walk = mu.sub.graph.face_walk(f).darts.clone();
        let children: Vec<u8> = walk
            .iter()
            .map(|&d| child_of_edge[mu.sub.host_dart(d).edge().index()])
            .collect();
        if children.iter().all(|&c| c == children[0]) {
            // pure child face, enforced inside that child's table
            continue;
        }
        let tokens = tokenize(&walk, &mut slots)?;
        let mut pieces = Vec::new();
        let mut slot_ids = Vec::new();
        for t in tokens {
            match t {
                Token::Piece(s, i) => pieces.push((s, i)),
                Token::Slot(s) => slot_ids.push(s),
                Token::Att(_) => {
                    return Err(SolveError::InvalidInput(
                        "attachment corner on a closed face".into(),
                    ))
                }
            }
        }
        let target = if f == mu.sub.graph.outer_face() { -4 } else { 4 };
        closed_faces.push(ClosedFace {
            pieces,
            slot_ids,
            target,
        });
    }

    // group slots by shared vertex
    let mut shared: Vec<SharedVertex> = Vec::new();
    let mut shared_by_vertex: HashMap<VertexId, usize> = HashMap::new();
    let mut shared_vertices: Vec<VertexId> = visit_at[0]
        .keys()
        .filter(|v| visit_at[1].contains_key(v))
        .copied()
        .collect();
    shared_vertices.sort();
    for v in shared_vertices {
        shared_by_vertex.insert(v, shared.len());
        shared.push(SharedVertex {
            l_visit: visit_at[0][&v],
            r_visit: visit_at[1][&v],
            slots: Vec::new(),
            mu_visit: None,
        });
    }
    for (i, s) in slots.iter().enumerate() {
        let si = *shared_by_vertex.get(&s.vertex).ok_or_else(|| {
            SolveError::InvalidInput("slot at a vertex not shared by the children".into())
        })?;
        shared[si].slots.push(i);
    }

    // merged attachment provenance
    let mut mu_atts = Vec::new();
    for (vi, v) in mu.visits.iter().enumerate() {
        let cin = child_of_edge[v.in_host.edge().index()];
        let cout = child_of_edge[v.out_host.edge().index()];
        if cin == cout {
            let ci = *visit_at[cin as usize].get(&v.vertex).ok_or_else(|| {
                SolveError::InvalidInput("merged attachment missing child visit".into())
            })?;
            if shapes[cin as usize].visits[ci].in_host != v.in_host
                || shapes[cin as usize].visits[ci].out_host != v.out_host
            {
                return Err(SolveError::InvalidInput(
                    "merged attachment darts disagree with the child visit".into(),
                ));
            }
            mu_atts.push(MuAtt::Copy(cin, ci));
        } else {
            let si = *shared_by_vertex.get(&v.vertex).ok_or_else(|| {
                SolveError::InvalidInput("mixed attachment at unshared vertex".into())
            })?;
            shared[si].mu_visit = Some(vi);
            let in_vis = *visit_at[cin as usize].get(&v.vertex).unwrap();
            let out_vis = *visit_at[cout as usize].get(&v.vertex).unwrap();
            mu_atts.push(MuAtt::SharedOut {
                shared_idx: si,
                in_ref: (cin, in_vis),
                out_ref: (cout, out_vis),
            });
        }
    }

    for s in &shared {
        let expected = if s.mu_visit.is_some() { 1 } else { 2 };
        if s.slots.len() != expected {
            return Err(SolveError::InvalidInput(format!(
                "shared vertex carries {} corner slots, expected {}",
                s.slots.len(),
                expected
            )));
        }
    }

    // forced right paths: closed faces with exactly one right piece
    let mut forced_r_paths = Vec::new();
    let mut forcing_face = Vec::new();
    let mut seen = vec![false; right.paths_host.len()];
    for (fi, cf) in closed_faces.iter().enumerate() {
        let rp: Vec<usize> = cf
            .pieces
            .iter()
            .filter(|&&(s, _)| s == 1)
            .map(|&(_, i)| i)
            .collect();
        if rp.len() == 1 && !seen[rp[0]] {
            seen[rp[0]] = true;
            forced_r_paths.push(rp[0]);
            forcing_face.push(fi);
        }
    }

    Ok(Skeleton {
        slots,
        shared,
        closed_faces,
        mu_paths,
        mu_atts,
        forced_r_paths,
        forcing_face,
    })
}

struct RunCtx<'a> {
    g: &'a PlaneGraph,
    shapes: &'a [NodeShape],
    rho_cap: i32,
    per_edge_cap: u32,
    cost_cut: Option<u32>,
    constraints: Vec<EdgeConstraint>,
    orthogonal: bool,
    corner_pin: HashMap<Dart, i32>,
    clipped: bool,
    stats: Vec<NodeStat>,
}

fn leaf_table(ctx: &mut RunCtx, node: usize) -> Table {
    let shape = &ctx.shapes[node];
    let host_even = {
        let e = (0..ctx.g.edge_count())
            .find(|&i| shape.sub.sub_edge(EdgeId(i as u32)).is_some())
            .unwrap();
        EdgeId(e as u32).even_dart()
    };
    let mut table = Table::new();
    let pe = ctx.per_edge_cap as i32;
    let ends: Vec<i32> = if ctx.orthogonal {
        vec![0]
    } else {
        vec![-1, 0, 1]
    };
    let constraint = ctx.constraints[host_even.edge().index()];
    for &et in &ends {
        for &eh in &ends {
            for c in -pe..=pe {
                let cost = (et.abs() + c.abs() + eh.abs()) as u32;
                if cost > ctx.per_edge_cap {
                    continue;
                }
                let side = et + c + eh;
                let ok = match constraint {
                    EdgeConstraint::Free => true,
                    EdgeConstraint::ExactBends(i) => cost == i,
                    EdgeConstraint::ZeroOne(d) => {
                        let s = if d.is_even() { side } else { -side };
                        cost <= 1 && (s == 0 || s == 1)
                    }
                    EdgeConstraint::SideInterval { dart, lo, hi } => {
                        let s = if dart.is_even() { side } else { -side };
                        (lo..=hi).contains(&s)
                    }
                };
                if !ok {
                    continue;
                }
                if let Some(cut) = ctx.cost_cut {
                    if cost >= cut {
                        continue;
                    }
                }
                let mut k = KandinskyRepresentation::zeros(&shape.sub.graph);
                let sd = shape.sub.sub_dart(host_even).unwrap();
                let st = sd.twin();
                k.side[sd.index()] = side;
                k.end_tail[sd.index()] = et;
                k.end_head[sd.index()] = eh;
                k.side[st.index()] = -side;
                k.end_tail[st.index()] = -eh;
                k.end_head[st.index()] = -et;
                k.corner[0] = -2;
                k.corner[1] = -2;
                let key = interface_of(shape, &k);
                if key.paths.iter().any(|&r| r.abs() > ctx.rho_cap) {
                    ctx.clipped = true;
                    continue;
                }
                let entry = Entry {
                    cost,
                    back: Back::Leaf { et, c, eh },
                };
                table
                    .entry(key)
                    .and_modify(|e| {
                        if cost < e.cost {
                            *e = entry.clone();
                        }
                    })
                    .or_insert(entry);
            }
        }
    }
    table
}

fn merge_tables(
    ctx: &mut RunCtx,
    node: usize,
    left_node: usize,
    right_node: usize,
    t_left: &Table,
    t_right: &Table,
) -> Result<Table, SolveError> {
    let (mu, left, right) = (
        &ctx.shapes[node],
        &ctx.shapes[left_node],
        &ctx.shapes[right_node],
    );
    let sk = build_skeleton(ctx.g, mu, left, right)?;

    // bucket right entries by shared attachment components and forced paths
    let shared_r_visits: Vec<usize> = sk.shared.iter().map(|s| s.r_visit).collect();
    let mut buckets: BTreeMap<Vec<i32>, Vec<(&Interface, &Entry)>> = BTreeMap::new();
    let mut shared_combos: Vec<Vec<AttComp>> = Vec::new();
    let mut seen_combos: BTreeSet<Vec<AttComp>> = BTreeSet::new();
    for (key, entry) in t_right {
        let combo: Vec<AttComp> = shared_r_visits.iter().map(|&v| key.atts[v]).collect();
        if seen_combos.insert(combo.clone()) {
            shared_combos.push(combo.clone());
        }
        let mut bk: Vec<i32> = Vec::new();
        for a in &combo {
            bk.push(a.rotation as i32);
            bk.push(a.flag_in as i32);
            bk.push(a.flag_out as i32);
        }
        for &pi in &sk.forced_r_paths {
            bk.push(key.paths[pi]);
        }
        buckets.entry(bk).or_default().push((key, entry));
    }

    let mut entries_examined: u64 = 0;
    let mut probes: u64 = 0;
    let mut out = Table::new();

    for (key_l, ent_l) in t_left {
        let l_atts: Vec<AttComp> = sk.shared.iter().map(|s| key_l.atts[s.l_visit]).collect();
        for combo in &shared_combos {
            // per shared vertex: legal (first slot, second value) pairs,
            // where the second value is either the second slot's corner or
            // the merged attachment rotation
            let mut per_vertex: Vec<Vec<(i32, i32)>> = Vec::with_capacity(sk.shared.len());
            for (si, sv) in sk.shared.iter().enumerate() {
                let a = l_atts[si];
                let b = combo[si];
                let flag_of = |refv: (u8, usize), is_in: bool| -> bool {
                    let comp = if refv.0 == 0 {
                        key_l.atts[refv.1]
                    } else {
                        debug_assert_eq!(refv.1, sv.r_visit);
                        b
                    };
                    if is_in {
                        comp.flag_in
                    } else {
                        comp.flag_out
                    }
                };
                let lic = |slot: &SlotInfo| -> bool {
                    flag_of(slot.lic_in, true) || flag_of(slot.lic_out, false)
                };
                let first = &sk.slots[sv.slots[0]];
                let first_lic = lic(first);
                let first_pin = ctx.corner_pin.get(&first.host_in).copied();
                let second_real = sv.slots.get(1).map(|&sid| &sk.slots[sid]);
                let second_lic = second_real.map(&lic);
                let second_pin = second_real.and_then(|s| ctx.corner_pin.get(&s.host_in).copied());
                let (mu_in_flag, mu_out_flag) = match sv.mu_visit {
                    Some(vi) => match sk.mu_atts[vi] {
                        MuAtt::SharedOut {
                            in_ref, out_ref, ..
                        } => (flag_of(in_ref, true), flag_of(out_ref, false)),
                        _ => unreachable!(),
                    },
                    None => (false, false),
                };
                let s = a.rotation as i32 + b.rotation as i32 + 4;
                let mut pairs = Vec::new();
                for cf in -2..=2 {
                    let cfp = s - cf;
                    if !(-2..=2).contains(&cfp) {
                        continue;
                    }
                    if cf == 2 && (!first_lic || ctx.orthogonal) {
                        continue;
                    }
                    if let Some(pin) = first_pin {
                        if cf != pin {
                            continue;
                        }
                    }
                    if second_real.is_some() {
                        if cfp == 2 && (!second_lic.unwrap() || ctx.orthogonal) {
                            continue;
                        }
                        if let Some(pin) = second_pin {
                            if cfp != pin {
                                continue;
                            }
                        }
                    } else {
                        // merged attachment rotation: interface invariants
                        if cfp == 2 && !mu_in_flag && !mu_out_flag {
                            continue;
                        }
                        if cfp == -2 && mu_in_flag && mu_out_flag {
                            continue;
                        }
                    }
                    pairs.push((cf, cfp));
                }
                per_vertex.push(pairs);
            }
            if per_vertex.iter().any(|p| p.is_empty()) {
                continue;
            }

            let mut pick = vec![0usize; per_vertex.len()];
            'product: loop {
                let slot_value = |slot_id: usize| -> i32 {
                    for (si, sv) in sk.shared.iter().enumerate() {
                        if sv.slots.first() == Some(&slot_id) {
                            return per_vertex[si][pick[si]].0;
                        }
                        if sv.slots.get(1) == Some(&slot_id) {
                            return per_vertex[si][pick[si]].1;
                        }
                    }
                    unreachable!()
                };

                let mut bucket_key: Vec<i32> = Vec::new();
                for a in combo {
                    bucket_key.push(a.rotation as i32);
                    bucket_key.push(a.flag_in as i32);
                    bucket_key.push(a.flag_out as i32);
                }
                let mut feasible = true;
                for fi_idx in 0..sk.forced_r_paths.len() {
                    let cf = &sk.closed_faces[sk.forcing_face[fi_idx]];
                    let mut rest = cf.target;
                    for &(side, idx) in &cf.pieces {
                        if side == 0 {
                            rest -= key_l.paths[idx];
                        }
                    }
                    for &sid in &cf.slot_ids {
                        rest -= slot_value(sid);
                    }
                    // tables hold no paths beyond the cap, so this forced
                    // value cannot match anything
                    if rest.abs() > ctx.rho_cap {
                        feasible = false;
                        break;
                    }
                    bucket_key.push(rest);
                }
                if feasible {
                    probes += 1;
                    if let Some(cands) = buckets.get(&bucket_key) {
                        for (key_r, ent_r) in cands {
                            entries_examined += 1;
                            let cost = ent_l.cost + ent_r.cost;
                            if let Some(cut) = ctx.cost_cut {
                                if cost >= cut {
                                    continue;
                                }
                            }
                            let mut ok = true;
                            for (fi, cf) in sk.closed_faces.iter().enumerate() {
                                if sk.forcing_face.contains(&fi) {
                                    continue;
                                }
                                let mut sum = 0i32;
                                for &(side, idx) in &cf.pieces {
                                    sum += if side == 0 {
                                        key_l.paths[idx]
                                    } else {
                                        key_r.paths[idx]
                                    };
                                }
                                for &sid in &cf.slot_ids {
                                    sum += slot_value(sid);
                                }
                                if sum != cf.target {
                                    ok = false;
                                    break;
                                }
                            }
                            if !ok {
                                continue;
                            }
                            let mut paths = Vec::with_capacity(sk.mu_paths.len());
                            let mut clipped_here = false;
                            for toks in &sk.mu_paths {
                                let mut r = 0i32;
                                for t in toks {
                                    match *t {
                                        Token::Piece(0, idx) => r += key_l.paths[idx],
                                        Token::Piece(_, idx) => r += key_r.paths[idx],
                                        Token::Slot(sid) => r += slot_value(sid),
                                        Token::Att(_) => unreachable!(),
                                    }
                                }
                                if r.abs() > ctx.rho_cap {
                                    clipped_here = true;
                                    break;
                                }
                                paths.push(r);
                            }
                            if clipped_here {
                                ctx.clipped = true;
                                continue;
                            }
                            let mut atts = Vec::with_capacity(sk.mu_atts.len());
                            for ma in &sk.mu_atts {
                                match *ma {
                                    MuAtt::Copy(0, vis) => atts.push(key_l.atts[vis]),
                                    MuAtt::Copy(_, vis) => atts.push(key_r.atts[vis]),
                                    MuAtt::SharedOut {
                                        shared_idx,
                                        in_ref,
                                        out_ref,
                                    } => {
                                        let rot = per_vertex[shared_idx][pick[shared_idx]].1;
                                        let flag_at = |r: (u8, usize), is_in: bool| {
                                            let c = if r.0 == 0 {
                                                key_l.atts[r.1]
                                            } else {
                                                key_r.atts[r.1]
                                            };
                                            if is_in {
                                                c.flag_in
                                            } else {
                                                c.flag_out
                                            }
                                        };
                                        atts.push(AttComp {
                                            rotation: rot as i8,
                                            flag_in: flag_at(in_ref, true),
                                            flag_out: flag_at(out_ref, false),
                                        });
                                    }
                                }
                            }
                            let key = Interface { paths, atts };
                            let corners: Vec<(Dart, i32)> = sk
                                .slots
                                .iter()
                                .enumerate()
                                .map(|(sid, s)| (s.host_in, slot_value(sid)))
                                .collect();
                            let entry = Entry {
                                cost,
                                back: Back::Merge {
                                    left: (*key_l).clone(),
                                    right: (*key_r).clone(),
                                    corners,
                                },
                            };
                            out.entry(key)
                                .and_modify(|e| {
                                    if cost < e.cost {
                                        *e = entry.clone();
                                    }
                                })
                                .or_insert(entry);
                        }
                    }
                }

                let mut i = 0;
                loop {
                    if i == pick.len() {
                        break 'product;
                    }
                    pick[i] += 1;
                    if pick[i] < per_vertex[i].len() {
                        break;
                    }
                    pick[i] = 0;
                    i += 1;
                }
            }
        }
    }

    let k_merge = mu
        .visits
        .len()
        .max(left.visits.len())
        .max(right.visits.len())
        .max(1);
    let rho = ctx.rho_cap.max(0) as u128;
    let exp = ((3 * k_merge) / 2).saturating_sub(1) as u32;
    let ceiling = (2 * rho + 1)
        .saturating_pow(exp)
        .saturating_mul(330u128.saturating_pow(k_merge as u32));
    ctx.stats.push(NodeStat {
        node,
        width: k_merge,
        table_len: out.len(),
        entries_examined,
        probes,
        ceiling,
    });
    Ok(out)
}

struct RunOutcome {
    tables: Vec<Table>,
    root: usize,
    clipped: bool,
    stats: Vec<NodeStat>,
}

fn run_tables(
    g: &PlaneGraph,
    shapes: &[NodeShape],
    children: &[Option<(usize, usize)>],
    root: usize,
    cfg: &SolverConfig,
    rho_cap: i32,
    per_edge_cap: u32,
    cost_cut: Option<u32>,
) -> Result<RunOutcome, SolveError> {
    let mut constraints = vec![EdgeConstraint::Free; g.edge_count()];
    for &(e, c) in &cfg.edge_constraints {
        constraints[e.index()] = c;
    }
    let mut corner_pin = HashMap::new();
    for fa in &cfg.fixed_angles {
        let darts: Vec<Dart> = g
            .corners_at(fa.vertex)
            .filter(|&d| g.face_of(d) == fa.face)
            .collect();
        match darts.len() {
            1 => {
                corner_pin.insert(darts[0], fa.rotation_sum);
            }
            0 => {
                return Err(SolveError::InvalidInput(format!(
                    "fixed angle at {:?} names no corner",
                    fa.vertex
                )))
            }
            _ => {
                return Err(SolveError::InvalidInput(
                    "fixed angle over a multi-visit face is not supported here".into(),
                ))
            }
        }
    }
    for &(d, value) in &cfg.corner_pins {
        if let Some(&old) = corner_pin.get(&d) {
            if old != value {
                return Err(SolveError::InvalidInput(format!(
                    "conflicting pins on corner {d:?}"
                )));
            }
        }
        corner_pin.insert(d, value);
    }
    let mut ctx = RunCtx {
        g,
        shapes,
        rho_cap,
        per_edge_cap,
        cost_cut,
        constraints,
        orthogonal: cfg.orthogonal_only,
        corner_pin,
        clipped: false,
        stats: Vec::new(),
    };
    let mut tables: Vec<Option<Table>> = (0..shapes.len()).map(|_| None).collect();
    for i in 0..shapes.len() {
        let t = match children[i] {
            None => leaf_table(&mut ctx, i),
            Some((l, r)) => {
                let tl = tables[l].take().unwrap();
                let tr = tables[r].take().unwrap();
                let t = merge_tables(&mut ctx, i, l, r, &tl, &tr)?;
                tables[l] = Some(tl);
                tables[r] = Some(tr);
                t
            }
        };
        tables[i] = Some(t);
    }
    Ok(RunOutcome {
        tables: tables.into_iter().map(|t| t.unwrap()).collect(),
        root,
        clipped: ctx.clipped,
        stats: ctx.stats,
    })
}

fn reconstruct(
    g: &PlaneGraph,
    shapes: &[NodeShape],
    children: &[Option<(usize, usize)>],
    tables: &[Table],
    node: usize,
    key: &Interface,
    k: &mut KandinskyRepresentation,
    corner_seen: &mut [bool],
) {
    let entry = &tables[node][key];
    match &entry.back {
        Back::Leaf { et, c, eh } => {
            let shape = &shapes[node];
            let e = (0..g.edge_count())
                .find(|&i| shape.sub.sub_edge(EdgeId(i as u32)).is_some())
                .unwrap();
            let d = EdgeId(e as u32).even_dart();
            let t = d.twin();
            let side = et + c + eh;
            k.side[d.index()] = side;
            k.end_tail[d.index()] = *et;
            k.end_head[d.index()] = *eh;
            k.side[t.index()] = -side;
            k.end_tail[t.index()] = -eh;
            k.end_head[t.index()] = -et;
        }
        Back::Merge {
            left,
            right,
            corners,
        } => {
            let (l, r) = children[node].unwrap();
            for &(d, v) in corners {
                debug_assert!(!corner_seen[d.index()]);
                k.corner[d.index()] = v;
                corner_seen[d.index()] = true;
            }
            reconstruct(g, shapes, children, tables, l, left, k, corner_seen);
            reconstruct(g, shapes, children, tables, r, right, k, corner_seen);
        }
    }
}

pub fn solve(
    g: &PlaneGraph,
    tree: &DecompTree,
    cfg: &SolverConfig,
) -> Result<(u32, KandinskyRepresentation, SolveReport), SolveError> {
    if let Some(v) = g.vertices().find(|&v| g.degree(v) == 1) {
        return Err(SolveError::InvalidInput(format!(
            "degree-1 vertex {:?}; attach a four-cycle first",
            v
        )));
    }
    let prepared = prepare_tree(g, tree)?;
    let mut shapes = Vec::with_capacity(prepared.nodes.len());
    let mut children = Vec::with_capacity(prepared.nodes.len());
    for n in &prepared.nodes {
        shapes.push(build_node_shape(g, &n.in_sub)?);
        children.push(n.children);
    }
    let root = prepared.root;

    let m = g.edge_count() as u32;
    match cfg.mode {
        Mode::BBend => {
            let b = cfg.per_edge_bend_cap.ok_or_else(|| {
                SolveError::InvalidInput("b-bend mode needs a per-edge cap".into())
            })?;
            let bound = rho_bound(g, Mode::BBend, b);
            let rho = cfg.rho_cap.unwrap_or(bound);
            let run = run_tables(g, &shapes, &children, root, cfg, rho, b, None)?;
            finishing(g, &shapes, &children, run, rho, rho < bound, bound)
        }
        Mode::Optimal => {
            let bound = rho_bound(g, Mode::Optimal, 0);
            let rho = cfg.rho_cap.unwrap_or(bound);
            let lossy = rho < bound;
            // ladder: all-straight, then per-edge cap 1, then one
            // certification run below the cap-1 value
            let run0 = run_tables(g, &shapes, &children, root, cfg, rho, 0, None)?;
            if run0.tables[root].contains_key(&Interface::default()) {
                return finishing(g, &shapes, &children, run0, rho, lossy, bound);
            }
            let run1 = run_tables(g, &shapes, &children, root, cfg, rho, 1, None)?;
            let v1 = match run1.tables[root].get(&Interface::default()) {
                Some(e) => e.cost,
                None => return finishing(g, &shapes, &children, run1, rho, lossy, bound),
            };
            if v1 <= 1 {
                return finishing(g, &shapes, &children, run1, rho, lossy, bound);
            }
            let cap = (v1 - 1).min(m);
            let run2 = run_tables(g, &shapes, &children, root, cfg, rho, cap, Some(v1))?;
            if run2.tables[root].contains_key(&Interface::default()) {
                finishing(g, &shapes, &children, run2, rho, lossy, bound)
            } else {
                finishing(g, &shapes, &children, run1, rho, lossy, bound)
            }
        }
    }
}

fn finishing(
    g: &PlaneGraph,
    shapes: &[NodeShape],
    children: &[Option<(usize, usize)>],
    run: RunOutcome,
    rho: i32,
    lossy: bool,
    bound: i32,
) -> Result<(u32, KandinskyRepresentation, SolveReport), SolveError> {
    let root_key = Interface::default();
    let entry = match run.tables[run.root].get(&root_key) {
        Some(e) => e.clone(),
        None => {
            // a cap at the mode's bound is lossless, so clipping there
            // cannot have hidden the optimum
            return if run.clipped && lossy {
                Err(SolveError::CapTooSmall {
                    suggested_rho: bound,
                })
            } else {
                Err(SolveError::Infeasible)
            };
        }
    };
    let mut k = KandinskyRepresentation::zeros(g);
    let mut corner_seen = vec![false; g.dart_count()];
    reconstruct(
        g,
        shapes,
        children,
        &run.tables,
        run.root,
        &root_key,
        &mut k,
        &mut corner_seen,
    );
    debug_assert!(corner_seen.iter().all(|&b| b));
    let report = SolveReport {
        optimum: entry.cost,
        rho_cap: rho,
        node_stats: run.stats,
    };
    let validation = k
        .validate(g)
        .map_err(|e| SolveError::InvalidInput(e.to_string()))?;
    if !validation.is_valid() {
        return Err(SolveError::InvalidInput(format!(
            "witness failed validation: {:?}",
            validation.violations
        )));
    }
    if k.bend_cost(g) != entry.cost {
        return Err(SolveError::InvalidInput(
            "witness cost mismatch against the table optimum".into(),
        ));
    }
    Ok((entry.cost, k, report))
}
