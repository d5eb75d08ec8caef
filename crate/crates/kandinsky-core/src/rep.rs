//! Kandinsky bend representations.
//!
//! A representation stores, per dart, the rotation of the edge as seen from
//! the face right of the dart (`side`), the rotations of the bends nearest
//! the tail and head on that side (`end_tail`, `end_head`), and the corner
//! rotation at the dart's head between this edge and the next edge of the
//! face (`corner`). Both sides of an edge are stored independently, so the
//! opposite-side identities are checked rather than assumed; corrupt inputs
//! stay detectable. The center rotation is derived.
//!
//! Validity is the conjunction of: face sums 4 (inner) and -4 (outer),
//! opposite-side antisymmetry, vertex corner sums 2·deg - 4, corners in
//! [-2, 2], ends in [-1, 1], and every 0-degree corner licensed by a bend
//! on one of its two framing edge ends.

use crate::decomposition::{validate_glueable, DecompError};
use crate::plane_graph::{BoundaryPath, Dart, EdgeId, FaceId, PlaneGraph, VertexId};
use crate::subgraph::PlaneSubgraph;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("representation does not address this graph: {0}")]
    AddressMismatch(String),
    #[error("subset is not glueable: {0}")]
    NotGlueable(DecompError),
    #[error("path does not lie on the given face")]
    PathNotOnFace,
    #[error("angle {0} is not a multiple of 90 in 0..=360")]
    InvalidAngle(i64),
}

/// rotation = 2 - angle/90 for angles in {0, 90, 180, 270, 360}
pub fn angle_to_rotation(angle_degrees: i64) -> Result<i32, RepError> {
    if angle_degrees % 90 != 0 || !(0..=360).contains(&angle_degrees) {
        return Err(RepError::InvalidAngle(angle_degrees));
    }
    Ok(2 - (angle_degrees / 90) as i32)
}

/// Pins the total corner rotation of a vertex inside a face. Faces visiting
/// the vertex more than once constrain the sum over all visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedAngle {
    pub vertex: VertexId,
    pub face: FaceId,
    pub rotation_sum: i32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    FaceSum { face: FaceId, sum: i32, expected: i32 },
    OppositeSide { edge: EdgeId },
    OppositeEnd { edge: EdgeId },
    VertexSum { vertex: VertexId, sum: i32, expected: i32 },
    CornerRange { dart: Dart, value: i32 },
    EndRange { dart: Dart, value: i32 },
    BendOrEnd { dart: Dart },
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KandinskyRepresentation {
    pub side: Vec<i32>,
    pub end_tail: Vec<i32>,
    pub end_head: Vec<i32>,
    pub corner: Vec<i32>,
}

impl KandinskyRepresentation {
    pub fn zeros(g: &PlaneGraph) -> Self {
        let n = g.dart_count();
        KandinskyRepresentation {
            side: vec![0; n],
            end_tail: vec![0; n],
            end_head: vec![0; n],
            corner: vec![0; n],
        }
    }

    pub fn check_shape(&self, g: &PlaneGraph) -> Result<(), RepError> {
        let n = g.dart_count();
        if self.side.len() != n
            || self.end_tail.len() != n
            || self.end_head.len() != n
            || self.corner.len() != n
        {
            return Err(RepError::AddressMismatch(format!(
                "expected {} darts, got {}",
                n,
                self.side.len()
            )));
        }
        Ok(())
    }

    pub fn center(&self, d: Dart) -> i32 {
        self.side[d.index()] - self.end_tail[d.index()] - self.end_head[d.index()]
    }

    /// Bends on one edge, counted on its even-dart side.
    pub fn edge_bends(&self, e: EdgeId) -> u32 {
        let d = e.even_dart();
        (self.end_tail[d.index()].abs() + self.center(d).abs() + self.end_head[d.index()].abs())
            as u32
    }

    pub fn bend_cost(&self, g: &PlaneGraph) -> u32 {
        g.edges().map(|e| self.edge_bends(e)).sum()
    }

    pub fn is_orthogonal(&self) -> bool {
        self.corner.iter().all(|&c| c != 2)
    }

    pub fn validate(&self, g: &PlaneGraph) -> Result<ValidationReport, RepError> {
        self.check_shape(g)?;
        let mut v = Vec::new();

        for d in g.darts() {
            let c = self.corner[d.index()];
            if !(-2..=2).contains(&c) {
                v.push(Violation::CornerRange { dart: d, value: c });
            }
            for end in [self.end_tail[d.index()], self.end_head[d.index()]] {
                if !(-1..=1).contains(&end) {
                    v.push(Violation::EndRange { dart: d, value: end });
                }
            }
            if c == 2 {
                let licensed = self.end_head[d.index()] == -1
                    || self.end_tail[g.next_in_face(d).index()] == -1;
                if !licensed {
                    v.push(Violation::BendOrEnd { dart: d });
                }
            }
        }

        for e in g.edges() {
            let d = e.even_dart();
            let t = d.twin();
            if self.side[d.index()] + self.side[t.index()] != 0 {
                v.push(Violation::OppositeSide { edge: e });
            }
            if self.end_tail[d.index()] + self.end_head[t.index()] != 0
                || self.end_head[d.index()] + self.end_tail[t.index()] != 0
            {
                v.push(Violation::OppositeEnd { edge: e });
            }
        }

        for f in g.face_ids() {
            let expected = if g.is_outer(f) { -4 } else { 4 };
            let sum: i32 = g
                .face_walk(f)
                .darts
                .iter()
                .map(|&d| self.side[d.index()] + self.corner[d.index()])
                .sum();
            if sum != expected {
                v.push(Violation::FaceSum {
                    face: f,
                    sum,
                    expected,
                });
            }
        }

        for vx in g.vertices() {
            let expected = 2 * g.degree(vx) as i32 - 4;
            let sum: i32 = g.corners_at(vx).map(|d| self.corner[d.index()]).sum();
            if sum != expected {
                v.push(Violation::VertexSum {
                    vertex: vx,
                    sum,
                    expected,
                });
            }
        }

        Ok(ValidationReport { violations: v })
    }

    /// Rotation of the corner swept at head(d_in) from d_in around to d_out,
    /// merging every corner in between. With d_out the face successor of
    /// d_in this is exactly corner[d_in].
    pub fn turn(&self, g: &PlaneGraph, d_in: Dart, d_out: Dart) -> i32 {
        debug_assert_eq!(g.head(d_in), g.tail(d_out));
        let mut t = 0i32;
        let mut sum = 0i32;
        let mut x = d_in;
        loop {
            t += 1;
            sum += self.corner[x.index()];
            let nxt = g.next_in_face(x);
            if nxt == d_out {
                break;
            }
            x = nxt.twin();
            debug_assert!(t <= g.degree(g.tail(d_out)) as i32);
        }
        2 - 2 * t + sum
    }

    /// Rotation of a boundary path on one face: all sides plus every corner
    /// except the one following the last dart.
    pub fn path_rotation(
        &self,
        g: &PlaneGraph,
        f: FaceId,
        p: &BoundaryPath,
    ) -> Result<i32, RepError> {
        if p.face != f || p.darts.is_empty() {
            return Err(RepError::PathNotOnFace);
        }
        for &d in &p.darts {
            if g.face_of(d) != f {
                return Err(RepError::PathNotOnFace);
            }
        }
        let mut r: i32 = p.darts.iter().map(|&d| self.side[d.index()]).sum();
        for &d in &p.darts[..p.darts.len() - 1] {
            r += self.corner[d.index()];
        }
        Ok(r)
    }

    /// Rotation along consecutive darts that may cross several faces,
    /// sweeping merged corners at the intermediate vertices.
    pub fn rotation_along(&self, g: &PlaneGraph, darts: &[Dart]) -> i32 {
        let mut r: i32 = darts.iter().map(|&d| self.side[d.index()]).sum();
        for w in darts.windows(2) {
            r += self.turn(g, w[0], w[1]);
        }
        r
    }

    /// Rotation of a closed walk: rotation_along plus the turn closing the
    /// cycle.
    pub fn closed_rotation(&self, g: &PlaneGraph, darts: &[Dart]) -> i32 {
        self.rotation_along(g, darts) + self.turn(g, darts[darts.len() - 1], darts[0])
    }

    /// Restriction to a glueable subset: sides and ends copy over, corners
    /// at attachments merge the swept complement sectors.
    pub fn restrict(
        &self,
        g: &PlaneGraph,
        sub: &[EdgeId],
    ) -> Result<(PlaneSubgraph, KandinskyRepresentation), RepError> {
        self.check_shape(g)?;
        let cert = validate_glueable(g, sub).map_err(RepError::NotGlueable)?;
        let s = cert.subset;
        let mut k = KandinskyRepresentation::zeros(&s.graph);
        for d in s.graph.darts() {
            let hd = s.host_dart(d);
            k.side[d.index()] = self.side[hd.index()];
            k.end_tail[d.index()] = self.end_tail[hd.index()];
            k.end_head[d.index()] = self.end_head[hd.index()];
        }
        for d in s.graph.darts() {
            let hd = s.host_dart(d);
            let h_out = s.host_dart(s.graph.next_in_face(d));
            k.corner[d.index()] = self.turn(g, hd, h_out);
        }
        Ok((s, k))
    }

    /// Substitutes a subgraph representation back into the host: subset
    /// sides, ends, and the corners lying purely inside the subset come from
    /// k1; everything else keeps this representation's values. The result is
    /// not guaranteed valid.
    pub fn replace(
        &self,
        g: &PlaneGraph,
        s: &PlaneSubgraph,
        k1: &KandinskyRepresentation,
    ) -> Result<KandinskyRepresentation, RepError> {
        self.check_shape(g)?;
        k1.check_shape(&s.graph)?;
        let mut out = self.clone();
        for d in s.graph.darts() {
            let hd = s.host_dart(d);
            out.side[hd.index()] = k1.side[d.index()];
            out.end_tail[hd.index()] = k1.end_tail[d.index()];
            out.end_head[hd.index()] = k1.end_head[d.index()];
            let nxt = s.graph.next_in_face(d);
            if g.next_in_face(hd) == s.host_dart(nxt) {
                out.corner[hd.index()] = k1.corner[d.index()];
            }
        }
        Ok(out)
    }

    /// Same as replace but recomputes the subgraph from the edge subset.
    pub fn replace_edges(
        &self,
        g: &PlaneGraph,
        sub: &[EdgeId],
        k1: &KandinskyRepresentation,
    ) -> Result<KandinskyRepresentation, RepError> {
        let cert = validate_glueable(g, sub).map_err(RepError::NotGlueable)?;
        self.replace(g, &cert.subset, k1)
    }

    pub fn to_json(&self, g: &PlaneGraph) -> serde_json::Value {
        let rj = RepJson {
            side: g
                .darts()
                .map(|d| (g.dart_triple(d), self.side[d.index()]))
                .collect(),
            ends: g
                .darts()
                .map(|d| {
                    (
                        g.dart_triple(d),
                        self.end_tail[d.index()],
                        self.end_head[d.index()],
                    )
                })
                .collect(),
            corners: g
                .darts()
                .map(|d| (g.dart_triple(d), self.corner[d.index()]))
                .collect(),
        };
        serde_json::to_value(rj).unwrap()
    }

    pub fn from_json(g: &PlaneGraph, value: &serde_json::Value) -> Result<Self, RepError> {
        let rj: RepJson = serde_json::from_value(value.clone())
            .map_err(|e| RepError::AddressMismatch(format!("bad representation JSON: {e}")))?;
        let n = g.dart_count();
        if rj.side.len() != n || rj.ends.len() != n || rj.corners.len() != n {
            return Err(RepError::AddressMismatch(
                "entry counts must equal the dart count".into(),
            ));
        }
        let mut k = KandinskyRepresentation::zeros(g);
        let mut seen = vec![false; n];
        let resolve = |(u, v, occ): (u32, u32, usize)| {
            g.dart_between(VertexId(u), VertexId(v), occ)
                .ok_or_else(|| RepError::AddressMismatch(format!("no dart ({u},{v},{occ})")))
        };
        for &(t, s) in &rj.side {
            let d = resolve(t)?;
            if seen[d.index()] {
                return Err(RepError::AddressMismatch(format!("duplicate dart {:?}", d)));
            }
            seen[d.index()] = true;
            k.side[d.index()] = s;
        }
        for &(t, et, eh) in &rj.ends {
            let d = resolve(t)?;
            k.end_tail[d.index()] = et;
            k.end_head[d.index()] = eh;
        }
        for &(t, c) in &rj.corners {
            let d = resolve(t)?;
            k.corner[d.index()] = c;
        }
        Ok(k)
    }
}

#[derive(Serialize, Deserialize)]
struct RepJson {
    side: Vec<((u32, u32, usize), i32)>,
    ends: Vec<((u32, u32, usize), i32, i32)>,
    corners: Vec<((u32, u32, usize), i32)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane_graph::build_plane_graph;

    fn square() -> PlaneGraph {
        build_plane_graph(
            4,
            &[vec![3, 1], vec![0, 2], vec![1, 3], vec![2, 0]],
            (0, 1, 0),
        )
        .unwrap()
    }

    /// right-angle representation of a cycle: inner corners 1, outer -1
    fn rectangular(g: &PlaneGraph) -> KandinskyRepresentation {
        let mut k = KandinskyRepresentation::zeros(g);
        for f in g.face_ids() {
            let c = if g.is_outer(f) { -1 } else { 1 };
            for &d in &g.face_walk(f).darts {
                k.corner[d.index()] = c;
            }
        }
        k
    }

    #[test]
    fn rectangle_is_valid_and_flat() {
        let g = square();
        let k = rectangular(&g);
        let r = k.validate(&g).unwrap();
        assert!(r.is_valid(), "{:?}", r.violations);
        assert_eq!(k.bend_cost(&g), 0);
        assert!(k.is_orthogonal());
    }

    #[test]
    fn triangle_needs_one_bend() {
        let g = build_plane_graph(3, &[vec![2, 1], vec![0, 2], vec![1, 0]], (0, 1, 0)).unwrap();
        let mut k = rectangular(&g);
        // give one edge a center bend toward the outer face
        let inner = g.face_ids().find(|&f| !g.is_outer(f)).unwrap();
        let d = g.face_walk(inner).darts[0];
        k.side[d.index()] = 1;
        k.side[d.twin().index()] = -1;
        let r = k.validate(&g).unwrap();
        assert!(r.is_valid(), "{:?}", r.violations);
        assert_eq!(k.bend_cost(&g), 1);
    }

    #[test]
    fn corrupted_side_reports_opposite_and_face() {
        let g = square();
        let mut k = rectangular(&g);
        k.side[0] = 1;
        let r = k.validate(&g).unwrap();
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::OppositeSide { .. })));
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::FaceSum { .. })));
    }

    #[test]
    fn unlicensed_zero_degree_corner_flagged() {
        let g = square();
        let mut k = rectangular(&g);
        let inner = g.face_ids().find(|&f| !g.is_outer(f)).unwrap();
        let walk = g.face_walk(inner).darts.clone();
        // force a 0-degree corner and repair the sums crudely elsewhere
        k.corner[walk[0].index()] = 2;
        k.corner[walk[1].index()] = 0;
        let r = k.validate(&g).unwrap();
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::BendOrEnd { .. })));
        // licensing via the head end clears it
        k.end_head[walk[0].index()] = -1;
        k.end_tail[walk[0].twin().index()] = 1;
        let r2 = k.validate(&g).unwrap();
        assert!(!r2
            .violations
            .iter()
            .any(|v| matches!(v, Violation::BendOrEnd { .. })));
    }

    #[test]
    fn range_violations() {
        let g = square();
        let mut k = rectangular(&g);
        k.corner[0] = 3;
        k.end_tail[2] = 2;
        let r = k.validate(&g).unwrap();
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::CornerRange { value: 3, .. })));
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::EndRange { value: 2, .. })));
    }

    #[test]
    fn path_rotation_square_quarter() {
        let g = square();
        let k = rectangular(&g);
        let inner = g.face_ids().find(|&f| !g.is_outer(f)).unwrap();
        let outer = g.outer_face();
        let p_in = g.boundary_path(inner, VertexId(0), VertexId(2)).unwrap();
        let p_out = g.boundary_path(outer, VertexId(0), VertexId(2)).unwrap();
        assert_eq!(k.path_rotation(&g, inner, &p_in).unwrap(), 1);
        assert_eq!(k.path_rotation(&g, outer, &p_out).unwrap(), -1);
        assert_eq!(
            k.path_rotation(&g, outer, &p_in).unwrap_err(),
            RepError::PathNotOnFace
        );
    }

    #[test]
    fn full_face_walk_rotation() {
        let g = square();
        let k = rectangular(&g);
        let inner = g.face_ids().find(|&f| !g.is_outer(f)).unwrap();
        let p = g.boundary_path(inner, VertexId(1), VertexId(1)).unwrap();
        assert_eq!(p.darts.len(), 4);
        // face sum 4 minus the final corner
        assert_eq!(k.path_rotation(&g, inner, &p).unwrap(), 3);
    }

    #[test]
    fn restriction_of_valid_is_valid() {
        let g = square();
        let k = rectangular(&g);
        let sub: Vec<EdgeId> = g
            .edges()
            .filter(|&e| {
                let (u, v) = g.endpoints(e);
                (u.0, v.0) != (2, 3) && (u.0, v.0) != (3, 2)
            })
            .take(2)
            .collect();
        // the path 0-1-2
        let (s, k1) = k.restrict(&g, &sub).unwrap();
        let r = k1.validate(&s.graph).unwrap();
        assert!(r.is_valid(), "{:?}", r.violations);
        assert_eq!(k1.bend_cost(&s.graph), 0);
    }

    #[test]
    fn restrict_then_replace_round_trips() {
        let g = square();
        let k = rectangular(&g);
        let sub: Vec<EdgeId> = vec![EdgeId(0), EdgeId(1)];
        let (s, k1) = k.restrict(&g, &sub).unwrap();
        let back = k.replace(&g, &s, &k1).unwrap();
        assert_eq!(back, k);
    }

    #[test]
    fn replace_shape_mismatch() {
        let g = square();
        let k = rectangular(&g);
        let sub: Vec<EdgeId> = vec![EdgeId(0), EdgeId(1)];
        let (s, _) = k.restrict(&g, &sub).unwrap();
        let wrong = KandinskyRepresentation::zeros(&g);
        assert!(matches!(
            k.replace(&g, &s, &wrong),
            Err(RepError::AddressMismatch(_))
        ));
    }

    #[test]
    fn angle_mapping() {
        assert_eq!(angle_to_rotation(90).unwrap(), 1);
        assert_eq!(angle_to_rotation(180).unwrap(), 0);
        assert_eq!(angle_to_rotation(270).unwrap(), -1);
        assert_eq!(angle_to_rotation(360).unwrap(), -2);
        assert_eq!(angle_to_rotation(0).unwrap(), 2);
        assert!(matches!(
            angle_to_rotation(45),
            Err(RepError::InvalidAngle(45))
        ));
        assert!(matches!(
            angle_to_rotation(450),
            Err(RepError::InvalidAngle(450))
        ));
    }

    #[test]
    fn json_round_trip_bit_exact() {
        let g = square();
        let mut k = rectangular(&g);
        k.side[0] = 1;
        k.side[1] = -1;
        k.end_tail[0] = 1;
        k.end_head[1] = -1;
        let j = k.to_json(&g);
        let k2 = KandinskyRepresentation::from_json(&g, &j).unwrap();
        assert_eq!(k, k2);
        assert_eq!(
            serde_json::to_string(&j).unwrap(),
            serde_json::to_string(&k2.to_json(&g)).unwrap()
        );
    }

    #[test]
    fn turn_sweep_matches_single_corner() {
        let g = square();
        let k = rectangular(&g);
        for d in g.darts() {
            let nxt = g.next_in_face(d);
            assert_eq!(k.turn(&g, d, nxt), k.corner[d.index()]);
        }
    }

    #[test]
    fn closed_rotation_of_inner_cycle_is_four() {
        let g = square();
        let k = rectangular(&g);
        let inner = g.face_ids().find(|&f| !g.is_outer(f)).unwrap();
        let darts = g.face_walk(inner).darts.clone();
        assert_eq!(k.closed_rotation(&g, &darts), 4);
        let outer_darts = g.face_walk(g.outer_face()).darts.clone();
        assert_eq!(k.closed_rotation(&g, &outer_darts), -4);
    }
}
