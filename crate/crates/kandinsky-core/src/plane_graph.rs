//! Plane multigraphs given by rotation systems.
//!
//! A graph is stored as a half-edge (dart) structure: edge `e` owns darts
//! `2e` and `2e+1`, which are twins of each other. Every vertex carries the
//! clockwise cyclic order of its outgoing darts as drawn in the plane.
//! Faces are traced from the rotation system; the face of a dart lies to
//! the dart's right, so inner face walks run clockwise and the outer face
//! walk runs counter-clockwise.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FaceId(pub u32);

/// Directed edge side. Dart `2e` runs from the lower-indexed endpoint row in
/// the adjacency scan; its twin is `2e+1`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Dart(pub u32);

impl Dart {
    pub fn twin(self) -> Dart {
        Dart(self.0 ^ 1)
    }
    pub fn edge(self) -> EdgeId {
        EdgeId(self.0 >> 1)
    }
    pub fn is_even(self) -> bool {
        self.0 & 1 == 0
    }
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn even_dart(self) -> Dart {
        Dart(self.0 << 1)
    }
    pub fn odd_dart(self) -> Dart {
        Dart(self.0 << 1 | 1)
    }
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl FaceId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}
impl fmt::Debug for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}
impl fmt::Debug for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.0)
    }
}
impl fmt::Debug for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("inconsistent adjacency: {0}")]
    InconsistentAdjacency(String),
    #[error("rotation system is not planar: n-m+f = {0}, expected 2")]
    NonPlanarRotationSystem(i64),
    #[error("vertex {0:?} does not lie on face {1:?}")]
    VertexNotOnFace(VertexId, FaceId),
    #[error("vertex {0:?} does not have degree 1")]
    NotDegreeOne(VertexId),
}

/// Cyclic dart sequence bounding one face. Bridges contribute both darts to
/// the same walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceWalk {
    pub face: FaceId,
    pub darts: Vec<Dart>,
}

impl FaceWalk {
    pub fn len(&self) -> usize {
        self.darts.len()
    }
    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }
}

/// Dart walk along one face from a start vertex to an end vertex, in the
/// face's own traversal direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryPath {
    pub face: FaceId,
    pub darts: Vec<Dart>,
}

#[derive(Clone)]
pub struct PlaneGraph {
    rotation: Vec<Vec<Dart>>,
    tail: Vec<VertexId>,
    // position of each dart in its tail's rotation list
    rot_pos: Vec<u32>,
    face_of: Vec<FaceId>,
    faces: Vec<FaceWalk>,
    // position of each dart in its face walk
    face_pos: Vec<u32>,
    outer: FaceId,
    // adjacency lists exactly as given at build time, for serialization
    adjacency: Vec<Vec<u32>>,
}

impl fmt::Debug for PlaneGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlaneGraph")
            .field("n", &self.vertex_count())
            .field("m", &self.edge_count())
            .field("faces", &self.face_count())
            .field("outer", &self.outer)
            .finish()
    }
}

/// Builds a plane graph from clockwise adjacency lists.
///
/// Parallel edges are paired by reversed occurrence: the k-th entry `v` in
/// `adjacency[u]` and the k-th-from-last entry `u` in `adjacency[v]` form one
/// edge, so nested parallel arcs written in the same order at both endpoints
/// stay planar. `outer_face_hint` is `(u, v, occurrence)` naming the dart u→v
/// of that edge; the face to the right of this dart becomes the outer face.
pub fn build_plane_graph(
    vertex_count: usize,
    adjacency: &[Vec<u32>],
    outer_face_hint: (u32, u32, usize),
) -> Result<PlaneGraph, GraphError> {
    if vertex_count == 0 {
        return Err(GraphError::InconsistentAdjacency(
            "graph has no vertices".into(),
        ));
    }
    if adjacency.len() != vertex_count {
        return Err(GraphError::InconsistentAdjacency(format!(
            "{} adjacency rows for {} vertices",
            adjacency.len(),
            vertex_count
        )));
    }
    for (u, row) in adjacency.iter().enumerate() {
        for &v in row {
            if v as usize >= vertex_count {
                return Err(GraphError::InconsistentAdjacency(format!(
                    "vertex {} lists neighbor {} out of range",
                    u, v
                )));
            }
            if v as usize == u {
                return Err(GraphError::InconsistentAdjacency(format!(
                    "loop at vertex {}",
                    u
                )));
            }
        }
    }

    // Pair occurrences into edges. seen[(u,v)] counts u→v occurrences handled.
    let mut occ_count = vec![std::collections::HashMap::<u32, u32>::new(); vertex_count];
    for (u, row) in adjacency.iter().enumerate() {
        for &v in row {
            *occ_count[u].entry(v).or_insert(0) += 1;
        }
    }
    for (u, row) in occ_count.iter().enumerate() {
        for (&v, &c) in row {
            let back = occ_count[v as usize].get(&(u as u32)).copied().unwrap_or(0);
            if back != c {
                return Err(GraphError::InconsistentAdjacency(format!(
                    "edge ({},{}) listed {} times at {} but {} times at {}",
                    u, v, c, u, back, v
                )));
            }
        }
    }

    let m: usize = adjacency.iter().map(|r| r.len()).sum::<usize>() / 2;
    if m == 0 {
        return Err(GraphError::InconsistentAdjacency("graph has no edges".into()));
    }

    // Assign edge ids scanning rows in order; darts fill rotation lists.
    let mut rotation: Vec<Vec<Dart>> = vec![Vec::new(); vertex_count];
    let mut tail: Vec<VertexId> = vec![VertexId(0); 2 * m];
    let mut next_edge = 0u32;
    // pending[v][u] = stack of dart ids; popping newest-first reverses
    // occurrence order across the two endpoints
    let mut pending: Vec<std::collections::HashMap<u32, std::collections::VecDeque<Dart>>> =
        vec![std::collections::HashMap::new(); vertex_count];
    for (u, row) in adjacency.iter().enumerate() {
        for &v in row {
            let d = if let Some(q) = pending[u].get_mut(&v) {
                if let Some(d) = q.pop_back() {
                    d
                } else {
                    let e = EdgeId(next_edge);
                    next_edge += 1;
                    pending[v as usize].entry(u as u32).or_default().push_back(e.odd_dart());
                    e.even_dart()
                }
            } else {
                let e = EdgeId(next_edge);
                next_edge += 1;
                pending[v as usize].entry(u as u32).or_default().push_back(e.odd_dart());
                e.even_dart()
            };
            tail[d.index()] = VertexId(u as u32);
            rotation[u].push(d);
        }
    }
    debug_assert_eq!(next_edge as usize, m);

    let mut rot_pos = vec![0u32; 2 * m];
    for (_, row) in rotation.iter().enumerate() {
        for (i, &d) in row.iter().enumerate() {
            rot_pos[d.index()] = i as u32;
        }
    }

    // Connectivity over vertices through edges.
    {
        let mut seen = vec![false; vertex_count];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &d in &rotation[u] {
                let h = tail[d.twin().index()].index();
                if !seen[h] {
                    seen[h] = true;
                    stack.push(h);
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(GraphError::InconsistentAdjacency(
                "graph is not connected".into(),
            ));
        }
    }

    // Face tracing: next(d) = clockwise predecessor of twin(d) at head(d).
    let mut face_of = vec![FaceId(u32::MAX); 2 * m];
    let mut face_pos = vec![0u32; 2 * m];
    let mut faces: Vec<FaceWalk> = Vec::new();
    for start in 0..2 * m {
        if face_of[start] != FaceId(u32::MAX) {
            continue;
        }
        let fid = FaceId(faces.len() as u32);
        let mut walk = Vec::new();
        let mut d = Dart(start as u32);
        loop {
            face_of[d.index()] = fid;
            face_pos[d.index()] = walk.len() as u32;
            walk.push(d);
            let t = d.twin();
            let head = tail[t.index()];
            let row = &rotation[head.index()];
            let p = rot_pos[t.index()] as usize;
            d = row[(p + row.len() - 1) % row.len()];
            if d.index() == start {
                break;
            }
        }
        faces.push(FaceWalk { face: fid, darts: walk });
    }

    let euler = vertex_count as i64 - m as i64 + faces.len() as i64;
    if euler != 2 {
        return Err(GraphError::NonPlanarRotationSystem(euler));
    }

    // Resolve the outer face hint.
    let (hu, hv, hocc) = outer_face_hint;
    let outer_dart = dart_by_occurrence(&rotation, &tail, hu, hv, hocc).ok_or_else(|| {
        GraphError::InconsistentAdjacency(format!(
            "outer face hint ({},{},{}) names no dart",
            hu, hv, hocc
        ))
    })?;
    let outer = face_of[outer_dart.index()];

    Ok(PlaneGraph {
        rotation,
        tail,
        rot_pos,
        face_of,
        faces,
        face_pos,
        outer,
        adjacency: adjacency.to_vec(),
    })
}

fn dart_by_occurrence(
    rotation: &[Vec<Dart>],
    tail: &[VertexId],
    u: u32,
    v: u32,
    occurrence: usize,
) -> Option<Dart> {
    let row = rotation.get(u as usize)?;
    let mut k = 0usize;
    for &d in row {
        if tail[d.twin().index()].0 == v {
            if k == occurrence {
                return Some(d);
            }
            k += 1;
        }
    }
    None
}

impl PlaneGraph {
    pub fn vertex_count(&self) -> usize {
        self.rotation.len()
    }
    pub fn edge_count(&self) -> usize {
        self.tail.len() / 2
    }
    pub fn dart_count(&self) -> usize {
        self.tail.len()
    }
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.rotation.len() as u32).map(VertexId)
    }
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edge_count() as u32).map(EdgeId)
    }
    pub fn darts(&self) -> impl Iterator<Item = Dart> {
        (0..self.tail.len() as u32).map(Dart)
    }
    pub fn face_ids(&self) -> impl Iterator<Item = FaceId> {
        (0..self.faces.len() as u32).map(FaceId)
    }

    pub fn tail(&self, d: Dart) -> VertexId {
        self.tail[d.index()]
    }
    pub fn head(&self, d: Dart) -> VertexId {
        self.tail[d.twin().index()]
    }
    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        (self.tail(e.even_dart()), self.tail(e.odd_dart()))
    }

    pub fn rotation(&self, v: VertexId) -> &[Dart] {
        &self.rotation[v.index()]
    }
    pub fn degree(&self, v: VertexId) -> usize {
        self.rotation[v.index()].len()
    }

    /// Next outgoing dart clockwise around tail(d).
    pub fn cw_next(&self, d: Dart) -> Dart {
        let row = &self.rotation[self.tail(d).index()];
        let p = self.rot_pos[d.index()] as usize;
        row[(p + 1) % row.len()]
    }
    /// Previous outgoing dart clockwise around tail(d).
    pub fn cw_prev(&self, d: Dart) -> Dart {
        let row = &self.rotation[self.tail(d).index()];
        let p = self.rot_pos[d.index()] as usize;
        row[(p + row.len() - 1) % row.len()]
    }

    /// Successor along the face to the right of d.
    pub fn next_in_face(&self, d: Dart) -> Dart {
        self.cw_prev(d.twin())
    }
    /// Predecessor along the face to the right of d.
    pub fn prev_in_face(&self, d: Dart) -> Dart {
        self.cw_next(d).twin()
    }

    pub fn face_of(&self, d: Dart) -> FaceId {
        self.face_of[d.index()]
    }
    pub fn face_walk(&self, f: FaceId) -> &FaceWalk {
        &self.faces[f.index()]
    }
    pub fn face_walks(&self) -> &[FaceWalk] {
        &self.faces
    }
    pub fn position_in_face(&self, d: Dart) -> usize {
        self.face_pos[d.index()] as usize
    }
    pub fn outer_face(&self) -> FaceId {
        self.outer
    }
    pub fn is_outer(&self, f: FaceId) -> bool {
        f == self.outer
    }
    /// Face degree counted with dart multiplicity.
    pub fn face_degree(&self, f: FaceId) -> usize {
        self.faces[f.index()].darts.len()
    }
    pub fn max_face_degree(&self) -> usize {
        self.faces.iter().map(|w| w.darts.len()).max().unwrap_or(0)
    }

    /// The k-th dart u→v in u's rotation order, counting parallel edges.
    pub fn dart_between(&self, u: VertexId, v: VertexId, occurrence: usize) -> Option<Dart> {
        dart_by_occurrence(&self.rotation, &self.tail, u.0, v.0, occurrence)
    }

    /// Occurrence index of d among the parallel darts tail(d)→head(d).
    pub fn occurrence_of(&self, d: Dart) -> usize {
        let (u, v) = (self.tail(d), self.head(d));
        let mut k = 0usize;
        for &x in &self.rotation[u.index()] {
            if x == d {
                return k;
            }
            if self.head(x) == v {
                k += 1;
            }
        }
        unreachable!("dart not present in its tail rotation");
    }

    /// Dart triple (tail, head, occurrence) used as the stable external address.
    pub fn dart_triple(&self, d: Dart) -> (u32, u32, usize) {
        (self.tail(d).0, self.head(d).0, self.occurrence_of(d))
    }

    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adjacency
    }

    /// Incoming darts at v, one per corner at v; order follows the rotation
    /// list of outgoing darts (corner of incoming dart d sits between edge(d)
    /// and the next edge clockwise).
    pub fn corners_at(&self, v: VertexId) -> impl Iterator<Item = Dart> + '_ {
        self.rotation[v.index()].iter().map(|d| d.twin())
    }

    /// Walk of face f from u to v in face direction, starting at the first
    /// walk dart with tail u. With u == v the full face walk is returned.
    pub fn boundary_path(
        &self,
        f: FaceId,
        u: VertexId,
        v: VertexId,
    ) -> Result<BoundaryPath, GraphError> {
        let walk = &self.faces[f.index()];
        let start = walk
            .darts
            .iter()
            .position(|&d| self.tail(d) == u)
            .ok_or(GraphError::VertexNotOnFace(u, f))?;
        self.boundary_path_from(walk.darts[start], v)
    }

    /// Walk of face_of(start) beginning exactly at `start` and ending when the
    /// walk first reaches v. With v == tail(start) the full face walk is returned.
    pub fn boundary_path_from(&self, start: Dart, v: VertexId) -> Result<BoundaryPath, GraphError> {
        let f = self.face_of(start);
        let walk = &self.faces[f.index()];
        let n = walk.darts.len();
        let s = self.position_in_face(start);
        let mut darts = Vec::new();
        let mut found = false;
        for i in 0..n {
            let d = walk.darts[(s + i) % n];
            darts.push(d);
            if self.head(d) == v {
                found = true;
                break;
            }
        }
        if !found {
            return Err(GraphError::VertexNotOnFace(v, f));
        }
        Ok(BoundaryPath { face: f, darts })
    }

    /// Appends a 4-cycle to a degree-1 vertex, inside its unique incident
    /// face. New vertices take the next three ids.
    pub fn attach_four_cycle(&self, v: VertexId) -> Result<PlaneGraph, GraphError> {
        if self.degree(v) != 1 {
            return Err(GraphError::NotDegreeOne(v));
        }
        let n = self.vertex_count() as u32;
        let (a, b, c) = (n, n + 1, n + 2);
        let mut adjacency = self.adjacency.clone();
        adjacency[v.index()].push(a);
        adjacency[v.index()].push(c);
        adjacency.push(vec![v.0, b]); // a
        adjacency.push(vec![a, c]); // b
        adjacency.push(vec![b, v.0]); // c
        let outer_dart = self.faces[self.outer.index()].darts[0];
        let hint = self.dart_triple(outer_dart);
        build_plane_graph(self.vertex_count() + 3, &adjacency, hint)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let outer_dart = self.faces[self.outer.index()].darts[0];
        let (u, v, occ) = self.dart_triple(outer_dart);
        serde_json::json!({
            "vertices": self.vertex_count(),
            "adjacency": self.adjacency,
            "outer_face_dart": [u, v, occ],
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<PlaneGraph, GraphError> {
        let parsed: GraphJson = serde_json::from_value(value.clone())
            .map_err(|e| GraphError::InconsistentAdjacency(format!("bad graph JSON: {e}")))?;
        build_plane_graph(
            parsed.vertices,
            &parsed.adjacency,
            (
                parsed.outer_face_dart.0,
                parsed.outer_face_dart.1,
                parsed.outer_face_dart.2,
            ),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: usize,
    adjacency: Vec<Vec<u32>>,
    outer_face_dart: (u32, u32, usize),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> PlaneGraph {
        // v0 bottom-left, v1 bottom-right, v2 top; inner face traced clockwise.
        build_plane_graph(
            3,
            &[vec![2, 1], vec![0, 2], vec![1, 0]],
            (0, 1, 0),
        )
        .unwrap()
    }

    #[test]
    fn triangle_counts() {
        let g = triangle();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.face_count(), 2);
    }

    #[test]
    fn triangle_face_orientations() {
        let g = triangle();
        let outer = g.outer_face();
        let outer_walk: Vec<_> = g
            .face_walk(outer)
            .darts
            .iter()
            .map(|&d| (g.tail(d).0, g.head(d).0))
            .collect();
        assert!(outer_walk.contains(&(0, 1)));
        let inner = g.face_ids().find(|&f| f != outer).unwrap();
        let inner_walk: Vec<_> = g
            .face_walk(inner)
            .darts
            .iter()
            .map(|&d| (g.tail(d).0, g.head(d).0))
            .collect();
        // clockwise inner walk of the chosen drawing
        assert!(inner_walk.contains(&(0, 2)));
        assert!(inner_walk.contains(&(2, 1)));
        assert!(inner_walk.contains(&(1, 0)));
    }

    #[test]
    fn k4_has_four_faces() {
        // planar K4: v3 in the center of triangle v0 v1 v2
        let g = build_plane_graph(
            4,
            &[
                vec![2, 3, 1],
                vec![0, 3, 2],
                vec![1, 3, 0],
            ],
            (0, 1, 0),
        );
        // rows above miss vertex 3's list
        assert!(g.is_err());
        let g = build_plane_graph(
            4,
            &[
                vec![2, 3, 1],
                vec![0, 3, 2],
                vec![1, 3, 0],
                vec![0, 2, 1],
            ],
            (0, 1, 0),
        )
        .unwrap();
        assert_eq!(g.face_count(), 4);
    }

    #[test]
    fn nonplanar_rotation_rejected() {
        // K4 with vertex 3's rotation flipped: genus 1 rotation system
        let err = build_plane_graph(
            4,
            &[
                vec![2, 3, 1],
                vec![0, 3, 2],
                vec![1, 3, 0],
                vec![0, 1, 2],
            ],
            (0, 1, 0),
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::NonPlanarRotationSystem(_)));
    }

    #[test]
    fn one_sided_edge_rejected() {
        let err = build_plane_graph(2, &[vec![1], vec![]], (0, 1, 0)).unwrap_err();
        assert!(matches!(err, GraphError::InconsistentAdjacency(_)));
    }

    #[test]
    fn loops_rejected() {
        let err = build_plane_graph(2, &[vec![0, 0, 1], vec![0]], (0, 1, 0)).unwrap_err();
        assert!(matches!(err, GraphError::InconsistentAdjacency(_)));
    }

    #[test]
    fn digon_faces() {
        let g = build_plane_graph(2, &[vec![1, 1], vec![0, 0]], (0, 1, 0)).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.face_count(), 2);
        // each face walk has two darts, one per edge
        for w in g.face_walks() {
            assert_eq!(w.darts.len(), 2);
            assert_ne!(w.darts[0].edge(), w.darts[1].edge());
        }
    }

    #[test]
    fn bridge_darts_share_face() {
        let g = build_plane_graph(2, &[vec![1], vec![0]], (0, 1, 0)).unwrap();
        assert_eq!(g.face_count(), 1);
        assert_eq!(g.face_walk(FaceId(0)).darts.len(), 2);
    }

    #[test]
    fn face_walk_total_length_is_2m() {
        let g = triangle();
        let total: usize = g.face_walks().iter().map(|w| w.darts.len()).sum();
        assert_eq!(total, 2 * g.edge_count());
    }

    #[test]
    fn boundary_path_square() {
        // square u=0, a=1, v=2, b=3 in a 4-cycle
        let g = build_plane_graph(
            4,
            &[vec![3, 1], vec![0, 2], vec![1, 3], vec![2, 0]],
            (0, 1, 0),
        )
        .unwrap();
        let outer = g.outer_face();
        let inner = g.face_ids().find(|&f| f != outer).unwrap();
        let p = g.boundary_path(inner, VertexId(0), VertexId(2)).unwrap();
        let q = g.boundary_path(outer, VertexId(0), VertexId(2)).unwrap();
        assert_eq!(p.darts.len(), 2);
        assert_eq!(q.darts.len(), 2);
        // the two paths leave u along different edges
        assert_ne!(p.darts[0].edge(), q.darts[0].edge());
    }

    #[test]
    fn boundary_path_same_vertex_full_walk() {
        let g = triangle();
        let f = g.outer_face();
        let p = g.boundary_path(f, VertexId(0), VertexId(0)).unwrap();
        assert_eq!(p.darts.len(), g.face_walk(f).darts.len());
    }

    #[test]
    fn boundary_path_split_covers_walk() {
        let g = triangle();
        let f = g.outer_face();
        let p = g.boundary_path(f, VertexId(0), VertexId(2)).unwrap();
        let q = g.boundary_path(f, VertexId(2), VertexId(0)).unwrap();
        assert_eq!(p.darts.len() + q.darts.len(), g.face_walk(f).darts.len());
    }

    #[test]
    fn vertex_not_on_face() {
        let g = build_plane_graph(
            4,
            &[
                vec![2, 3, 1],
                vec![0, 3, 2],
                vec![1, 3, 0],
                vec![0, 2, 1],
            ],
            (0, 1, 0),
        )
        .unwrap();
        // vertex 3 is interior; it does not lie on the outer face
        let err = g.boundary_path(g.outer_face(), VertexId(3), VertexId(0)).unwrap_err();
        assert!(matches!(err, GraphError::VertexNotOnFace(..)));
    }

    #[test]
    fn attach_four_cycle_on_edge() {
        let g = build_plane_graph(2, &[vec![1], vec![0]], (0, 1, 0)).unwrap();
        let g2 = g.attach_four_cycle(VertexId(1)).unwrap();
        assert_eq!(g2.vertex_count(), 5);
        assert_eq!(g2.edge_count(), 5);
        assert_eq!(g2.face_count(), 2);
        assert_eq!(g2.degree(VertexId(1)), 3);
    }

    #[test]
    fn attach_four_cycle_all_star_leaves() {
        let g = build_plane_graph(4, &[vec![1, 2, 3], vec![0], vec![0], vec![0]], (0, 1, 0))
            .unwrap();
        let mut h = g;
        for v in [1u32, 2, 3] {
            h = h.attach_four_cycle(VertexId(v)).unwrap();
        }
        assert!(h.vertices().all(|v| h.degree(v) != 1));
    }

    #[test]
    fn attach_four_cycle_needs_degree_one() {
        let g = triangle();
        let err = g.attach_four_cycle(VertexId(0)).unwrap_err();
        assert!(matches!(err, GraphError::NotDegreeOne(_)));
    }

    #[test]
    fn json_round_trip_is_identity() {
        let g = build_plane_graph(
            4,
            &[
                vec![2, 3, 1],
                vec![0, 3, 2],
                vec![1, 3, 0],
                vec![0, 2, 1],
            ],
            (1, 3, 0),
        )
        .unwrap();
        let j = g.to_json();
        let h = PlaneGraph::from_json(&j).unwrap();
        assert_eq!(h.to_json(), j);
        assert_eq!(h.adjacency(), g.adjacency());
        assert_eq!(h.outer_face(), g.outer_face());
    }

    #[test]
    fn dart_triples_round_trip() {
        let g = build_plane_graph(2, &[vec![1, 1], vec![0, 0]], (0, 1, 1)).unwrap();
        for d in g.darts() {
            let (u, v, occ) = g.dart_triple(d);
            assert_eq!(g.dart_between(VertexId(u), VertexId(v), occ), Some(d));
        }
    }

    #[test]
    fn next_prev_in_face_inverse() {
        let g = triangle();
        for d in g.darts() {
            assert_eq!(g.prev_in_face(g.next_in_face(d)), d);
            assert_eq!(g.face_of(g.next_in_face(d)), g.face_of(d));
        }
    }
}
