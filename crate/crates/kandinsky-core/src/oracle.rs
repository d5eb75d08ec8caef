//! Exhaustive ground truth for small instances.
//!
//! Depth-first enumeration of all valid representations under a bend budget,
//! edge constraints, and fixed angles. Faces are assigned walk by walk;
//! partial sums are pruned against the face and vertex targets, so the
//! whole subtree below an unreachable target is skipped. Every emitted
//! representation satisfies the validity properties by construction.

use crate::plane_graph::{Dart, EdgeId, FaceId, PlaneGraph};
use crate::rep::{FixedAngle, KandinskyRepresentation};
use std::collections::BTreeMap;
use thiserror::Error;

pub const DEFAULT_EDGE_LIMIT: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance has {0} edges, above the configured limit {1}")]
    InstanceTooLarge(usize, usize),
    #[error("no representation exists under the given constraints")]
    InfeasibleUnderConstraints,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeConstraint {
    Free,
    /// total bends on the edge equal this count
    ExactBends(u32),
    /// at most one bend, rotation 0 or 1 as seen from the dart
    ZeroOne(Dart),
    /// side rotation as seen from the dart lies in [lo, hi]
    SideInterval { dart: Dart, lo: i32, hi: i32 },
}

#[derive(Debug, Clone, Default)]
pub struct SearchConfig {
    pub total_bend_budget: u32,
    /// per-edge cap on the center rotation magnitude; defaults to the budget
    pub per_edge_center_cap: Option<u32>,
    pub fixed_angles: Vec<FixedAngle>,
    pub edge_constraints: Vec<(EdgeId, EdgeConstraint)>,
    /// no 0-degree corners anywhere; end rotations canonically 0
    pub orthogonal_only: bool,
    /// additionally every inner-face corner is a right angle
    pub right_angled: bool,
    pub corner_pins: Vec<(Dart, i32)>,
    pub max_edges: Option<usize>,
}

impl SearchConfig {
    pub fn with_budget(budget: u32) -> Self {
        SearchConfig {
            total_bend_budget: budget,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Probe {
    Side(Dart),
    /// rotation along consecutive darts, merged corners included
    Path(Vec<Dart>),
}

pub type Census = BTreeMap<Vec<i32>, u64>;

enum Item {
    Edge(EdgeId),
    Corner(Dart),
}

struct FaceState {
    target: i32,
    sum: i32,
    rem_lo: i32,
    rem_hi: i32,
    items_left: u32,
}

struct VertexState {
    target: i32,
    sum: i32,
    rem_lo: i32,
    rem_hi: i32,
}

fn cost(v: (i32, i32, i32)) -> u32 {
    (v.0.abs() + v.1.abs() + v.2.abs()) as u32
}

fn side_sum(v: (i32, i32, i32)) -> i32 {
    v.0 + v.1 + v.2
}

struct Engine<'a> {
    g: &'a PlaneGraph,
    budget: u32,
    edge_domain: Vec<Vec<(i32, i32, i32)>>,
    edge_min_cost: Vec<u32>,
    corner_domain: Vec<Vec<i32>>,
    side_static: Vec<(i32, i32)>,
    corner_static: Vec<(i32, i32)>,
    schedule: Vec<Item>,
    face_checks: Vec<Vec<(Vec<Dart>, i32)>>,
    faces: Vec<FaceState>,
    vertices: Vec<VertexState>,
    spent: u32,
    rem_min_cost: u32,
    edge_val: Vec<Option<(i32, i32, i32)>>,
    corner_val: Vec<Option<i32>>,
}

impl<'a> Engine<'a> {
    fn build(g: &'a PlaneGraph, cfg: &SearchConfig) -> Result<Engine<'a>, OracleError> {
        let limit = cfg.max_edges.unwrap_or(DEFAULT_EDGE_LIMIT);
        if g.edge_count() > limit {
            return Err(OracleError::InstanceTooLarge(g.edge_count(), limit));
        }
        let budget = cfg.total_bend_budget;
        let cap = cfg.per_edge_center_cap.unwrap_or(budget).min(budget) as i32;

        let mut constraint = vec![EdgeConstraint::Free; g.edge_count()];
        for &(e, c) in &cfg.edge_constraints {
            constraint[e.index()] = c;
        }

        let mut edge_domain = Vec::with_capacity(g.edge_count());
        for e in g.edges() {
            let mut dom = Vec::new();
            let ends: &[i32] = if cfg.orthogonal_only || cfg.right_angled {
                &[0]
            } else {
                &[-1, 0, 1]
            };
            for &et in ends {
                for &eh in ends {
                    for c in -cap..=cap {
                        let v = (et, c, eh);
                        if cost(v) > budget {
                            continue;
                        }
                        let ok = match constraint[e.index()] {
                            EdgeConstraint::Free => true,
                            EdgeConstraint::ExactBends(i) => cost(v) == i,
                            EdgeConstraint::ZeroOne(d) => {
                                let s = if d.is_even() {
                                    side_sum(v)
                                } else {
                                    -side_sum(v)
                                };
                                cost(v) <= 1 && (s == 0 || s == 1)
                            }
                            EdgeConstraint::SideInterval { dart, lo, hi } => {
                                let s = if dart.is_even() {
                                    side_sum(v)
                                } else {
                                    -side_sum(v)
                                };
                                (lo..=hi).contains(&s)
                            }
                        };
                        if ok {
                            dom.push(v);
                        }
                    }
                }
            }
            dom.sort_by_key(|&v| (cost(v), v));
            edge_domain.push(dom);
        }

        let mut corner_domain = Vec::with_capacity(g.dart_count());
        for d in g.darts() {
            let hi = if cfg.orthogonal_only || cfg.right_angled {
                1
            } else {
                2
            };
            let mut dom: Vec<i32> = (-2..=hi).collect();
            if cfg.right_angled && !g.is_outer(g.face_of(d)) {
                dom.retain(|&c| c == 1);
            }
            corner_domain.push(dom);
        }
        for &(d, v) in &cfg.corner_pins {
            corner_domain[d.index()].retain(|&c| c == v);
        }

        // fixed angles hitting a single corner pin it; multi-visit sums are
        // checked when their face completes
        let mut face_checks: Vec<Vec<(Vec<Dart>, i32)>> = vec![Vec::new(); g.face_count()];
        for fa in &cfg.fixed_angles {
            let darts: Vec<Dart> = g
                .corners_at(fa.vertex)
                .filter(|&d| g.face_of(d) == fa.face)
                .collect();
            match darts.len() {
                0 => face_checks[0].push((Vec::new(), 1)),
                1 => corner_domain[darts[0].index()].retain(|&c| c == fa.rotation_sum),
                _ => face_checks[fa.face.index()].push((darts, fa.rotation_sum)),
            }
        }

        let mut schedule = Vec::new();
        let mut edge_seen = vec![false; g.edge_count()];
        for f in g.face_ids() {
            for &d in &g.face_walk(f).darts {
                if !edge_seen[d.edge().index()] {
                    edge_seen[d.edge().index()] = true;
                    schedule.push(Item::Edge(d.edge()));
                }
                schedule.push(Item::Corner(d));
            }
        }

        let side_static: Vec<(i32, i32)> = edge_domain
            .iter()
            .map(|dom| {
                let lo = dom.iter().map(|&v| side_sum(v)).min().unwrap_or(0);
                let hi = dom.iter().map(|&v| side_sum(v)).max().unwrap_or(0);
                (lo, hi)
            })
            .collect();
        let corner_static: Vec<(i32, i32)> = corner_domain
            .iter()
            .map(|dom| {
                (
                    *dom.first().unwrap_or(&0),
                    *dom.last().unwrap_or(&0),
                )
            })
            .collect();

        let dart_side_bounds = |d: Dart| -> (i32, i32) {
            let (lo, hi) = side_static[d.edge().index()];
            if d.is_even() {
                (lo, hi)
            } else {
                (-hi, -lo)
            }
        };

        let mut faces: Vec<FaceState> = g
            .face_ids()
            .map(|f| FaceState {
                target: if g.is_outer(f) { -4 } else { 4 },
                sum: 0,
                rem_lo: 0,
                rem_hi: 0,
                items_left: 0,
            })
            .collect();
        for f in g.face_ids() {
            for &d in &g.face_walk(f).darts {
                let (slo, shi) = dart_side_bounds(d);
                let (clo, chi) = corner_static[d.index()];
                let fs = &mut faces[f.index()];
                fs.rem_lo += slo + clo;
                fs.rem_hi += shi + chi;
                fs.items_left += 2;
            }
        }

        let mut vertices: Vec<VertexState> = g
            .vertices()
            .map(|v| VertexState {
                target: 2 * g.degree(v) as i32 - 4,
                sum: 0,
                rem_lo: 0,
                rem_hi: 0,
            })
            .collect();
        for d in g.darts() {
            let v = g.head(d);
            let (clo, chi) = corner_static[d.index()];
            vertices[v.index()].rem_lo += clo;
            vertices[v.index()].rem_hi += chi;
        }

        let edge_min_cost: Vec<u32> = edge_domain
            .iter()
            .map(|dom| dom.iter().map(|&v| cost(v)).min().unwrap_or(0))
            .collect();
        let rem_min_cost = edge_min_cost.iter().sum();

        Ok(Engine {
            g,
            budget,
            edge_domain,
            edge_min_cost,
            corner_domain,
            side_static,
            corner_static,
            schedule,
            face_checks,
            faces,
            vertices,
            spent: 0,
            rem_min_cost,
            edge_val: vec![None; g.edge_count()],
            corner_val: vec![None; g.dart_count()],
        })
    }

    fn face_ok(&self, f: usize) -> bool {
        let fs = &self.faces[f];
        fs.target >= fs.sum + fs.rem_lo && fs.target <= fs.sum + fs.rem_hi
    }

    fn vertex_ok(&self, v: usize) -> bool {
        let vs = &self.vertices[v];
        vs.target >= vs.sum + vs.rem_lo && vs.target <= vs.sum + vs.rem_hi
    }

    fn run<F: FnMut(&KandinskyRepresentation) -> bool>(&mut self, visit: &mut F) {
        if self.edge_domain.iter().any(|d| d.is_empty())
            || self.corner_domain.iter().any(|d| d.is_empty())
        {
            return;
        }
        self.dfs(0, visit);
    }

    /// returns false when the visitor asked to stop
    fn dfs<F: FnMut(&KandinskyRepresentation) -> bool>(
        &mut self,
        idx: usize,
        visit: &mut F,
    ) -> bool {
        if idx == self.schedule.len() {
            let k = self.materialize();
            debug_assert!(k.validate(self.g).map(|r| r.is_valid()).unwrap_or(false));
            return visit(&k);
        }
        match self.schedule[idx] {
            Item::Edge(e) => {
                let dom = std::mem::take(&mut self.edge_domain[e.index()]);
                let mut keep_going = true;
                for &val in &dom {
                    if self.assign_edge(e, val) && !self.dfs(idx + 1, visit) {
                        self.undo_edge(e, val);
                        keep_going = false;
                        break;
                    }
                    if keep_going {
                        self.undo_edge(e, val);
                    }
                }
                self.edge_domain[e.index()] = dom;
                keep_going
            }
            Item::Corner(d) => {
                let dom = std::mem::take(&mut self.corner_domain[d.index()]);
                let mut keep_going = true;
                for &val in &dom {
                    if self.assign_corner(d, val) && !self.dfs(idx + 1, visit) {
                        self.undo_corner(d, val);
                        keep_going = false;
                        break;
                    }
                    if keep_going {
                        self.undo_corner(d, val);
                    }
                }
                self.corner_domain[d.index()] = dom;
                keep_going
            }
        }
    }

    fn assign_edge(&mut self, e: EdgeId, val: (i32, i32, i32)) -> bool {
        self.spent += cost(val);
        self.rem_min_cost -= self.edge_min_cost[e.index()];
        self.edge_val[e.index()] = Some(val);
        let (lo_e, hi_e) = self.side_static[e.index()];
        let s = side_sum(val);
        for (d, side, blo, bhi) in [
            (e.even_dart(), s, lo_e, hi_e),
            (e.odd_dart(), -s, -hi_e, -lo_e),
        ] {
            let f = self.g.face_of(d).index();
            let fs = &mut self.faces[f];
            fs.sum += side;
            fs.rem_lo -= blo;
            fs.rem_hi -= bhi;
            fs.items_left -= 1;
        }
        self.spent + self.rem_min_cost <= self.budget
            && self.face_ok(self.g.face_of(e.even_dart()).index())
            && self.face_ok(self.g.face_of(e.odd_dart()).index())
    }

    fn undo_edge(&mut self, e: EdgeId, val: (i32, i32, i32)) {
        self.spent -= cost(val);
        self.rem_min_cost += self.edge_min_cost[e.index()];
        self.edge_val[e.index()] = None;
        let (lo_e, hi_e) = self.side_static[e.index()];
        let s = side_sum(val);
        for (d, side, blo, bhi) in [
            (e.even_dart(), s, lo_e, hi_e),
            (e.odd_dart(), -s, -hi_e, -lo_e),
        ] {
            let f = self.g.face_of(d).index();
            let fs = &mut self.faces[f];
            fs.sum -= side;
            fs.rem_lo += blo;
            fs.rem_hi += bhi;
            fs.items_left += 1;
        }
    }

    fn assign_corner(&mut self, d: Dart, val: i32) -> bool {
        self.corner_val[d.index()] = Some(val);
        let (clo, chi) = self.corner_static[d.index()];
        let f = self.g.face_of(d).index();
        {
            let fs = &mut self.faces[f];
            fs.sum += val;
            fs.rem_lo -= clo;
            fs.rem_hi -= chi;
            fs.items_left -= 1;
        }
        let v = self.g.head(d).index();
        {
            let vs = &mut self.vertices[v];
            vs.sum += val;
            vs.rem_lo -= clo;
            vs.rem_hi -= chi;
        }
        if !self.face_ok(f) || !self.vertex_ok(v) {
            return false;
        }
        if self.faces[f].items_left == 0 && !self.face_complete_checks(f) {
            return false;
        }
        true
    }

    fn undo_corner(&mut self, d: Dart, val: i32) {
        self.corner_val[d.index()] = None;
        let (clo, chi) = self.corner_static[d.index()];
        let f = self.g.face_of(d).index();
        {
            let fs = &mut self.faces[f];
            fs.sum -= val;
            fs.rem_lo += clo;
            fs.rem_hi += chi;
            fs.items_left += 1;
        }
        let v = self.g.head(d).index();
        {
            let vs = &mut self.vertices[v];
            vs.sum -= val;
            vs.rem_lo += clo;
            vs.rem_hi += chi;
        }
    }

    /// fixed-angle sums and bend-or-end licensing, checkable once every
    /// item of the face is assigned
    fn face_complete_checks(&self, f: usize) -> bool {
        for (darts, want) in &self.face_checks[f] {
            if darts.is_empty() {
                return false;
            }
            let sum: i32 = darts
                .iter()
                .map(|d| self.corner_val[d.index()].unwrap())
                .sum();
            if sum != *want {
                return false;
            }
        }
        for &d in &self.g.face_walk(FaceId(f as u32)).darts {
            if self.corner_val[d.index()] == Some(2) {
                let eh = self.end_head_of(d);
                let nt = self.end_tail_of(self.g.next_in_face(d));
                if eh != -1 && nt != -1 {
                    return false;
                }
            }
        }
        true
    }

    fn end_tail_of(&self, d: Dart) -> i32 {
        let (et, _, eh) = self.edge_val[d.edge().index()].unwrap();
        if d.is_even() {
            et
        } else {
            -eh
        }
    }

    fn end_head_of(&self, d: Dart) -> i32 {
        let (et, _, eh) = self.edge_val[d.edge().index()].unwrap();
        if d.is_even() {
            eh
        } else {
            -et
        }
    }

    fn materialize(&self) -> KandinskyRepresentation {
        let mut k = KandinskyRepresentation::zeros(self.g);
        for e in self.g.edges() {
            let (et, c, eh) = self.edge_val[e.index()].unwrap();
            let d = e.even_dart();
            let t = e.odd_dart();
            k.side[d.index()] = et + c + eh;
            k.end_tail[d.index()] = et;
            k.end_head[d.index()] = eh;
            k.side[t.index()] = -(et + c + eh);
            k.end_tail[t.index()] = -eh;
            k.end_head[t.index()] = -et;
        }
        for d in self.g.darts() {
            k.corner[d.index()] = self.corner_val[d.index()].unwrap();
        }
        k
    }
}

/// Visits every representation matching cfg; the visitor returns false to
/// stop early.
pub fn for_each<F: FnMut(&KandinskyRepresentation) -> bool>(
    g: &PlaneGraph,
    cfg: &SearchConfig,
    mut visit: F,
) -> Result<(), OracleError> {
    let mut engine = Engine::build(g, cfg)?;
    engine.run(&mut visit);
    Ok(())
}

/// All valid representations under cfg, complete and duplicate-free.
pub fn enumerate(
    g: &PlaneGraph,
    cfg: &SearchConfig,
) -> Result<Vec<KandinskyRepresentation>, OracleError> {
    let mut out = Vec::new();
    for_each(g, cfg, |k| {
        out.push(k.clone());
        true
    })?;
    Ok(out)
}

/// First representation found, if any.
pub fn exists(
    g: &PlaneGraph,
    cfg: &SearchConfig,
) -> Result<Option<KandinskyRepresentation>, OracleError> {
    let mut found = None;
    for_each(g, cfg, |k| {
        found = Some(k.clone());
        false
    })?;
    Ok(found)
}

fn canonical_key(k: &KandinskyRepresentation) -> Vec<i32> {
    let mut key = Vec::with_capacity(4 * k.side.len());
    for i in 0..k.side.len() {
        key.push(k.side[i]);
        key.push(k.end_tail[i]);
        key.push(k.end_head[i]);
        key.push(k.corner[i]);
    }
    key
}

/// Smallest budget with a nonempty enumeration, plus the lexicographically
/// smallest witness at that budget. The config's own budget field is
/// ignored; deepening stops at the edge count when unconstrained, or at a
/// generous multiple when constraints could push the optimum higher.
pub fn min_bends(
    g: &PlaneGraph,
    cfg: &SearchConfig,
) -> Result<(u32, KandinskyRepresentation), OracleError> {
    let unconstrained =
        cfg.edge_constraints.is_empty() && !cfg.orthogonal_only && !cfg.right_angled;
    let m = g.edge_count() as u32;
    let ladder_top = if unconstrained { m } else { 3 * m + 4 };
    for b in 0..=ladder_top {
        let mut level = cfg.clone();
        level.total_bend_budget = b;
        let mut best: Option<(Vec<i32>, KandinskyRepresentation)> = None;
        for_each(g, &level, |k| {
            if k.bend_cost(g) == b {
                let key = canonical_key(k);
                if best.as_ref().map(|(bk, _)| key < *bk).unwrap_or(true) {
                    best = Some((key, k.clone()));
                }
            }
            true
        })?;
        if let Some((_, w)) = best {
            return Ok((b, w));
        }
    }
    Err(OracleError::InfeasibleUnderConstraints)
}

/// Orthogonal embeddability with exact bend counts: every zero edge drawn
/// straight, every one edge with exactly one bend.
pub fn decide_01(
    g: &PlaneGraph,
    zero_edges: &[EdgeId],
    one_edges: &[EdgeId],
    fixed_angles: &[FixedAngle],
) -> Result<Option<KandinskyRepresentation>, OracleError> {
    let mut cfg = SearchConfig {
        total_bend_budget: one_edges.len() as u32,
        orthogonal_only: true,
        fixed_angles: fixed_angles.to_vec(),
        ..Default::default()
    };
    for &e in zero_edges {
        cfg.edge_constraints.push((e, EdgeConstraint::ExactBends(0)));
    }
    for &e in one_edges {
        cfg.edge_constraints.push((e, EdgeConstraint::ExactBends(1)));
    }
    exists(g, &cfg)
}

/// Census of probe-value tuples over right-angled representations: every
/// inner corner 90 degrees, zero/one edges exact, each oi edge free to
/// stay straight or take one bend of nonnegative rotation on its dart.
pub fn count_right_angled(
    g: &PlaneGraph,
    zero_edges: &[EdgeId],
    one_edges: &[EdgeId],
    oi_edges: &[(EdgeId, Dart)],
    probes: &[Probe],
) -> Result<Census, OracleError> {
    let mut cfg = SearchConfig {
        total_bend_budget: (one_edges.len() + oi_edges.len()) as u32,
        orthogonal_only: true,
        right_angled: true,
        ..Default::default()
    };
    for &e in zero_edges {
        cfg.edge_constraints.push((e, EdgeConstraint::ExactBends(0)));
    }
    for &e in one_edges {
        cfg.edge_constraints.push((e, EdgeConstraint::ExactBends(1)));
    }
    for &(e, d) in oi_edges {
        cfg.edge_constraints.push((e, EdgeConstraint::ZeroOne(d)));
    }
    let mut census = Census::new();
    for_each(g, &cfg, |k| {
        let key: Vec<i32> = probes
            .iter()
            .map(|p| match p {
                Probe::Side(d) => k.side[d.index()],
                Probe::Path(darts) => k.rotation_along(g, darts),
            })
            .collect();
        *census.entry(key).or_insert(0) += 1;
        true
    })?;
    Ok(census)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane_graph::{build_plane_graph, VertexId};

    fn cycle(n: u32) -> PlaneGraph {
        let adj: Vec<Vec<u32>> = (0..n)
            .map(|i| vec![(i + n - 1) % n, (i + 1) % n])
            .collect();
        build_plane_graph(n as usize, &adj, (0, 1, 0)).unwrap()
    }

    #[test]
    fn square_budget_zero_unique() {
        let g = cycle(4);
        let reps = enumerate(&g, &SearchConfig::with_budget(0)).unwrap();
        assert_eq!(reps.len(), 1);
        let k = &reps[0];
        assert!(k.validate(&g).unwrap().is_valid());
        assert_eq!(k.bend_cost(&g), 0);
        assert!(k.is_orthogonal());
    }

    #[test]
    fn triangle_budget_zero_empty() {
        let g = cycle(3);
        let reps = enumerate(&g, &SearchConfig::with_budget(0)).unwrap();
        assert!(reps.is_empty());
    }

    #[test]
    fn single_edge_budget_zero_unique() {
        let g = build_plane_graph(2, &[vec![1], vec![0]], (0, 1, 0)).unwrap();
        let reps = enumerate(&g, &SearchConfig::with_budget(0)).unwrap();
        assert_eq!(reps.len(), 1);
        assert_eq!(reps[0].side[0], 0);
        assert_eq!(reps[0].corner, vec![-2, -2]);
    }

    #[test]
    fn triangle_min_bends_one() {
        let g = cycle(3);
        let (b, w) = min_bends(&g, &SearchConfig::default()).unwrap();
        assert_eq!(b, 1);
        assert!(w.validate(&g).unwrap().is_valid());
        assert_eq!(w.bend_cost(&g), 1);
    }

    #[test]
    fn square_min_bends_zero() {
        let g = cycle(4);
        let (b, _) = min_bends(&g, &SearchConfig::default()).unwrap();
        assert_eq!(b, 0);
    }

    #[test]
    fn budget_monotonicity() {
        let g = cycle(3);
        let r1 = enumerate(&g, &SearchConfig::with_budget(1)).unwrap();
        let r2 = enumerate(&g, &SearchConfig::with_budget(2)).unwrap();
        assert!(!r1.is_empty());
        assert!(r2.len() >= r1.len());
        for k in &r1 {
            assert!(r2.contains(k));
        }
    }

    #[test]
    fn enumeration_matches_validate_filter() {
        // cross-check the engine against a naive generate-and-filter pass
        let g = cycle(3);
        let budget = 2;
        let fast = enumerate(&g, &SearchConfig::with_budget(budget)).unwrap();
        let mut slow = 0usize;
        // brute force: all corner values plus per-edge (et, c, eh)
        let m = g.edge_count();
        let dn = g.dart_count();
        let mut edge_opts = Vec::new();
        for et in -1i32..=1 {
            for c in -(budget as i32)..=budget as i32 {
                for eh in -1i32..=1 {
                    if et.abs() + c.abs() + eh.abs() <= budget as i32 {
                        edge_opts.push((et, c, eh));
                    }
                }
            }
        }
        let mut edge_pick = vec![0usize; m];
        let mut corner_pick = vec![0usize; dn];
        let corner_vals = [-2, -1, 0, 1, 2];
        'outer: loop {
            let mut k = KandinskyRepresentation::zeros(&g);
            for e in 0..m {
                let (et, c, eh) = edge_opts[edge_pick[e]];
                let d = EdgeId(e as u32).even_dart();
                let t = EdgeId(e as u32).odd_dart();
                k.side[d.index()] = et + c + eh;
                k.end_tail[d.index()] = et;
                k.end_head[d.index()] = eh;
                k.side[t.index()] = -(et + c + eh);
                k.end_tail[t.index()] = -eh;
                k.end_head[t.index()] = -et;
            }
            for d in 0..dn {
                k.corner[d] = corner_vals[corner_pick[d]];
            }
            if k.bend_cost(&g) <= budget && k.validate(&g).unwrap().is_valid() {
                slow += 1;
                assert!(fast.contains(&k));
            }
            // odometer
            let mut i = 0;
            loop {
                if i < dn {
                    corner_pick[i] += 1;
                    if corner_pick[i] < corner_vals.len() {
                        break;
                    }
                    corner_pick[i] = 0;
                    i += 1;
                } else if i < dn + m {
                    let e = i - dn;
                    edge_pick[e] += 1;
                    if edge_pick[e] < edge_opts.len() {
                        break;
                    }
                    edge_pick[e] = 0;
                    i += 1;
                } else {
                    break 'outer;
                }
            }
        }
        assert_eq!(fast.len(), slow);
    }

    #[test]
    fn too_large_rejected() {
        let g = cycle(4);
        let cfg = SearchConfig {
            max_edges: Some(3),
            ..Default::default()
        };
        assert!(matches!(
            enumerate(&g, &cfg),
            Err(OracleError::InstanceTooLarge(4, 3))
        ));
    }

    #[test]
    fn orthogonal_mode_excludes_zero_degree_corners() {
        let g = cycle(4);
        let cfg = SearchConfig {
            total_bend_budget: 2,
            orthogonal_only: true,
            ..Default::default()
        };
        let reps = enumerate(&g, &cfg).unwrap();
        assert!(!reps.is_empty());
        for k in &reps {
            assert!(k.is_orthogonal());
            for d in g.darts() {
                assert_eq!(k.end_tail[d.index()], 0);
                assert_eq!(k.end_head[d.index()], 0);
            }
        }
    }

    #[test]
    fn fixed_angle_pins_corner() {
        let g = cycle(4);
        let inner = g.face_ids().find(|&f| !g.is_outer(f)).unwrap();
        let cfg = SearchConfig {
            total_bend_budget: 2,
            fixed_angles: vec![FixedAngle {
                vertex: VertexId(0),
                face: inner,
                rotation_sum: 0,
            }],
            ..Default::default()
        };
        let reps = enumerate(&g, &cfg).unwrap();
        assert!(!reps.is_empty());
        let d = g
            .corners_at(VertexId(0))
            .find(|&d| g.face_of(d) == inner)
            .unwrap();
        for k in &reps {
            assert_eq!(k.corner[d.index()], 0);
        }
    }

    #[test]
    fn exact_bend_constraints() {
        let g = cycle(4);
        let cfg = SearchConfig {
            total_bend_budget: 1,
            edge_constraints: vec![(EdgeId(0), EdgeConstraint::ExactBends(1))],
            ..Default::default()
        };
        let reps = enumerate(&g, &cfg).unwrap();
        assert!(!reps.is_empty());
        for k in &reps {
            assert_eq!(k.edge_bends(EdgeId(0)), 1);
        }
    }

    #[test]
    fn zero_one_constraint_limits_side() {
        let g = cycle(4);
        let d = EdgeId(0).even_dart();
        let cfg = SearchConfig {
            total_bend_budget: 1,
            edge_constraints: vec![(EdgeId(0), EdgeConstraint::ZeroOne(d))],
            ..Default::default()
        };
        let reps = enumerate(&g, &cfg).unwrap();
        assert!(!reps.is_empty());
        for k in &reps {
            assert!(k.side[d.index()] == 0 || k.side[d.index()] == 1);
            assert!(k.edge_bends(EdgeId(0)) <= 1);
        }
    }

    #[test]
    fn decide_01_square_all_zero() {
        let g = cycle(4);
        let zeros: Vec<EdgeId> = g.edges().collect();
        let w = decide_01(&g, &zeros, &[], &[]).unwrap();
        assert!(w.is_some());
    }

    #[test]
    fn decide_01_triangle_all_zero_infeasible() {
        let g = cycle(3);
        let zeros: Vec<EdgeId> = g.edges().collect();
        let w = decide_01(&g, &zeros, &[], &[]).unwrap();
        assert!(w.is_none());
    }

    #[test]
    fn right_angled_square_census() {
        let g = cycle(4);
        let zeros: Vec<EdgeId> = g.edges().collect();
        let probes: Vec<Probe> = g
            .face_walk(g.face_ids().find(|&f| !g.is_outer(f)).unwrap())
            .darts
            .iter()
            .map(|&d| Probe::Side(d))
            .collect();
        let census = count_right_angled(&g, &zeros, &[], &[], &probes).unwrap();
        assert_eq!(census.len(), 1);
        assert_eq!(census[&vec![0, 0, 0, 0]], 1);
    }

    #[test]
    fn min_bends_respects_orthogonal_constraint() {
        // triangle in orthogonal mode still needs one bend, and the witness
        // has no 0-degree corner
        let g = cycle(3);
        let cfg = SearchConfig {
            orthogonal_only: true,
            ..Default::default()
        };
        let (b, w) = min_bends(&g, &cfg).unwrap();
        assert_eq!(b, 1);
        assert!(w.is_orthogonal());
    }
}
