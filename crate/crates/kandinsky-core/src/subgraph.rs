//! Induced plane subgraphs and face regions.
//!
//! A nonempty edge subset of a plane graph induces a plane subgraph on the
//! incident vertices; its rotation lists are the filtered host rotations.
//! Deleting the other edges merges host faces into regions, which are the
//! faces of the subgraph.

use crate::plane_graph::{build_plane_graph, Dart, EdgeId, FaceId, GraphError, PlaneGraph, VertexId};
use std::collections::HashMap;

/// Induced plane subgraph with host addressing maps.
#[derive(Debug, Clone)]
pub struct PlaneSubgraph {
    pub graph: PlaneGraph,
    /// sub vertex -> host vertex
    pub host_vertex: Vec<VertexId>,
    /// sub edge -> host edge
    pub host_edge: Vec<EdgeId>,
    /// sub dart -> host dart (orientation preserving)
    pub host_dart: Vec<Dart>,
    vertex_back: HashMap<VertexId, VertexId>,
    edge_back: HashMap<EdgeId, EdgeId>,
}

impl PlaneSubgraph {
    pub fn sub_vertex(&self, host: VertexId) -> Option<VertexId> {
        self.vertex_back.get(&host).copied()
    }
    pub fn sub_edge(&self, host: EdgeId) -> Option<EdgeId> {
        self.edge_back.get(&host).copied()
    }
    pub fn sub_dart(&self, host: Dart) -> Option<Dart> {
        let se = self.sub_edge(host.edge())?;
        let even = se.even_dart();
        if self.host_dart[even.index()] == host {
            Some(even)
        } else {
            Some(even.twin())
        }
    }
    pub fn host_dart(&self, sub: Dart) -> Dart {
        self.host_dart[sub.index()]
    }
}

/// Merges host faces across the edges NOT in `in_sub`; returns per-face
/// region ids and the region count. Regions are the faces of the subgraph.
pub fn face_regions(g: &PlaneGraph, in_sub: &[bool]) -> (Vec<u32>, u32) {
    let mut region = vec![u32::MAX; g.face_count()];
    let mut next = 0u32;
    for f0 in 0..g.face_count() {
        if region[f0] != u32::MAX {
            continue;
        }
        let id = next;
        next += 1;
        let mut stack = vec![f0];
        region[f0] = id;
        while let Some(f) = stack.pop() {
            for &d in &g.face_walk(FaceId(f as u32)).darts {
                if in_sub[d.edge().index()] {
                    continue;
                }
                let f2 = g.face_of(d.twin()).index();
                if region[f2] == u32::MAX {
                    region[f2] = id;
                    stack.push(f2);
                }
            }
        }
    }
    (region, next)
}

/// Builds the plane subgraph induced by an edge subset. The subset must be
/// nonempty and induce a connected subgraph. The subgraph's outer face is
/// the region containing the host's outer face.
pub fn induced_plane_subgraph(
    g: &PlaneGraph,
    in_sub: &[bool],
) -> Result<PlaneSubgraph, GraphError> {
    assert_eq!(in_sub.len(), g.edge_count());
    if !in_sub.iter().any(|&b| b) {
        return Err(GraphError::InconsistentAdjacency("empty edge subset".into()));
    }

    let mut host_vertex = Vec::new();
    let mut vertex_back = HashMap::new();
    for v in g.vertices() {
        if g.rotation(v).iter().any(|d| in_sub[d.edge().index()]) {
            vertex_back.insert(v, VertexId(host_vertex.len() as u32));
            host_vertex.push(v);
        }
    }

    // Filtered clockwise adjacency plus the host dart at each position.
    let mut adjacency: Vec<Vec<u32>> = Vec::with_capacity(host_vertex.len());
    let mut position_host_dart: Vec<Vec<Dart>> = Vec::with_capacity(host_vertex.len());
    for &hv in &host_vertex {
        let mut row = Vec::new();
        let mut pos = Vec::new();
        for &d in g.rotation(hv) {
            if in_sub[d.edge().index()] {
                row.push(vertex_back[&g.head(d)].0);
                pos.push(d);
            }
        }
        adjacency.push(row);
        position_host_dart.push(pos);
    }

    let provisional_hint = {
        let d0 = position_host_dart[0][0];
        let u = vertex_back[&g.tail(d0)];
        (u.0, vertex_back[&g.head(d0)].0, 0usize)
    };
    // The provisional hint may name a different parallel edge than d0, but any
    // valid dart works: the outer face is fixed afterwards from the regions.
    let sub = build_plane_graph(host_vertex.len(), &adjacency, provisional_hint)?;

    let mut host_dart = vec![Dart(u32::MAX); sub.dart_count()];
    let mut host_edge = vec![EdgeId(u32::MAX); sub.edge_count()];
    let mut edge_back = HashMap::new();
    for (si, _) in host_vertex.iter().enumerate() {
        let sv = VertexId(si as u32);
        for (i, &sd) in sub.rotation(sv).iter().enumerate() {
            let hd = position_host_dart[si][i];
            host_dart[sd.index()] = hd;
            host_edge[sd.edge().index()] = hd.edge();
            edge_back.insert(hd.edge(), sd.edge());
        }
    }
    debug_assert!(host_dart.iter().all(|d| d.0 != u32::MAX));
    for e in sub.edges() {
        debug_assert_eq!(
            host_dart[e.even_dart().index()].twin(),
            host_dart[e.odd_dart().index()]
        );
    }

    // Outer face: the sub face whose region contains the host outer face.
    let (region, _) = face_regions(g, in_sub);
    let outer_region = region[g.outer_face().index()];
    let outer_sub_dart = sub
        .darts()
        .find(|&sd| region[g.face_of(host_dart[sd.index()]).index()] == outer_region);
    let sub = match outer_sub_dart {
        Some(sd) => sub.with_outer_face(sub.face_of(sd)),
        // Subset boundary does not touch the outer region: every host-outer
        // dart belongs to the complement, so the subgraph sits inside one
        // region and its outer face is the region around it.
        None => {
            let hd = g.face_walk(g.outer_face()).darts[0];
            let sd = slide_to_subset_dart(g, in_sub, hd);
            let sd_sub = {
                let se = edge_back[&sd.edge()];
                if host_dart[se.even_dart().index()] == sd {
                    se.even_dart()
                } else {
                    se.odd_dart()
                }
            };
            sub.with_outer_face(sub.face_of(sd_sub))
        }
    };

    Ok(PlaneSubgraph {
        graph: sub,
        host_vertex,
        host_edge,
        host_dart,
        vertex_back,
        edge_back,
    })
}

/// From a host dart in the complement, finds a subset dart bounding the same
/// region, with the region on its right.
fn slide_to_subset_dart(g: &PlaneGraph, in_sub: &[bool], start: Dart) -> Dart {
    // BFS over host faces of the region, looking for a subset dart.
    let mut seen = vec![false; g.face_count()];
    let mut queue = std::collections::VecDeque::new();
    let f0 = g.face_of(start);
    seen[f0.index()] = true;
    queue.push_back(f0);
    while let Some(f) = queue.pop_front() {
        for &d in &g.face_walk(f).darts {
            if in_sub[d.edge().index()] {
                return d;
            }
            let f2 = g.face_of(d.twin());
            if !seen[f2.index()] {
                seen[f2.index()] = true;
                queue.push_back(f2);
            }
        }
    }
    unreachable!("region has no subset dart on its boundary");
}

impl PlaneGraph {
    /// Same graph with a different designated outer face.
    pub fn with_outer_face(&self, f: FaceId) -> PlaneGraph {
        let hint_dart = self.face_walk(f).darts[0];
        let (u, v, occ) = self.dart_triple(hint_dart);
        build_plane_graph(self.vertex_count(), self.adjacency(), (u, v, occ as usize))
            .expect("rebuilding an already valid graph")
    }
}
