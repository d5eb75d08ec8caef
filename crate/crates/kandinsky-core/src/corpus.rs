//! Instance generation for the cross-validation suites: exhaustive
//! enumeration of small plane graphs and seeded random series-parallel
//! graphs.

use crate::plane_graph::{build_plane_graph, PlaneGraph};
use rand::Rng;
use std::collections::BTreeSet;

/// Canonical form of an embedded instance: the lexicographically smallest
/// dart-numbering trace over all start darts. Orientation-preserving
/// isomorphic instances (outer face included) agree; mirror images differ.
fn canonical_key(g: &PlaneGraph) -> Vec<(u32, u32, bool)> {
    let n_darts = g.dart_count();
    let mut best: Option<Vec<(u32, u32, bool)>> = None;
    for start in g.darts() {
        let mut num = vec![u32::MAX; n_darts];
        let mut order = Vec::with_capacity(n_darts);
        num[start.index()] = 0;
        order.push(start);
        let mut head = 0;
        while head < order.len() {
            let d = order[head];
            head += 1;
            for s in [g.cw_next(d), d.twin()] {
                if num[s.index()] == u32::MAX {
                    num[s.index()] = order.len() as u32;
                    order.push(s);
                }
            }
        }
        let trace: Vec<(u32, u32, bool)> = order
            .iter()
            .map(|&d| {
                (
                    num[g.cw_next(d).index()],
                    num[d.twin().index()],
                    g.is_outer(g.face_of(d)),
                )
            })
            .collect();
        if best.as_ref().map(|b| trace < *b).unwrap_or(true) {
            best = Some(trace);
        }
    }
    best.unwrap()
}

fn distinct_permutations(row: &[u32]) -> Vec<Vec<u32>> {
    let mut sorted = row.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(row.len());
    let mut used = vec![false; row.len()];
    fn rec(
        sorted: &[u32],
        used: &mut [bool],
        current: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if current.len() == sorted.len() {
            out.push(current.clone());
            return;
        }
        let mut last: Option<u32> = None;
        for i in 0..sorted.len() {
            if used[i] || last == Some(sorted[i]) {
                continue;
            }
            last = Some(sorted[i]);
            used[i] = true;
            current.push(sorted[i]);
            rec(sorted, used, current, out);
            current.pop();
            used[i] = false;
        }
    }
    rec(&sorted, &mut used, &mut current, &mut out);
    out
}

/// All connected loop-free plane multigraphs with at most `max_edges`
/// edges, over every rotation system and every choice of outer face, up
/// to orientation-preserving isomorphism. Intended for small bounds.
pub fn enumerate_plane_graphs(max_edges: usize) -> Vec<PlaneGraph> {
    let mut seen: BTreeSet<Vec<(u32, u32, bool)>> = BTreeSet::new();
    let mut out = Vec::new();
    for m in 1..=max_edges {
        for n in 2..=m + 1 {
            let pairs: Vec<(u32, u32)> = (0..n as u32)
                .flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)))
                .collect();
            let mut multiset = vec![0usize; m];
            enumerate_multisets(&pairs, &mut multiset, 0, 0, &mut |edges| {
                collect_rotation_systems(n, edges, &mut seen, &mut out);
            });
        }
    }
    out
}

fn enumerate_multisets(
    pairs: &[(u32, u32)],
    choice: &mut Vec<usize>,
    pos: usize,
    min_idx: usize,
    f: &mut impl FnMut(&[(u32, u32)]),
) {
    if pos == choice.len() {
        let edges: Vec<(u32, u32)> = choice.iter().map(|&i| pairs[i]).collect();
        f(&edges);
        return;
    }
    for i in min_idx..pairs.len() {
        choice[pos] = i;
        enumerate_multisets(pairs, choice, pos + 1, i, f);
    }
}

fn collect_rotation_systems(
    n: usize,
    edges: &[(u32, u32)],
    seen: &mut BTreeSet<Vec<(u32, u32, bool)>>,
    out: &mut Vec<PlaneGraph>,
) {
    // every vertex covered, edge set connected
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        if parent[x] != x {
            parent[x] = find(parent, parent[x]);
        }
        parent[x]
    }
    let mut covered = vec![false; n];
    for &(u, v) in edges {
        covered[u as usize] = true;
        covered[v as usize] = true;
        let (ru, rv) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
        parent[ru] = rv;
    }
    if !covered.iter().all(|&c| c) {
        return;
    }
    let root = find(&mut parent, 0);
    if (0..n).any(|v| find(&mut parent, v) != root) {
        return;
    }

    let mut rows: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &(u, v) in edges {
        rows[u as usize].push(v);
        rows[v as usize].push(u);
    }
    let row_perms: Vec<Vec<Vec<u32>>> = rows.iter().map(|r| distinct_permutations(r)).collect();

    let mut pick = vec![0usize; n];
    'product: loop {
        let adjacency: Vec<Vec<u32>> = (0..n).map(|v| row_perms[v][pick[v]].clone()).collect();
        if let Ok(g) = build_plane_graph(n, &adjacency, (0, adjacency[0][0], 0)) {
            for f in g.face_ids() {
                let hint_dart = g.face_walk(f).darts[0];
                let hint = g.dart_triple(hint_dart);
                let inst = build_plane_graph(n, &adjacency, hint).unwrap();
                debug_assert_eq!(inst.face_of(hint_dart), inst.outer_face());
                if seen.insert(canonical_key(&inst)) {
                    out.push(inst);
                }
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                break 'product;
            }
            pick[i] += 1;
            if pick[i] < row_perms[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

enum Comp {
    Edge,
    Series(Box<Comp>, Box<Comp>),
    Parallel(Box<Comp>, Box<Comp>),
}

fn random_comp(edges: usize, rng: &mut impl Rng) -> Comp {
    if edges == 1 {
        return Comp::Edge;
    }
    let m1 = rng.gen_range(1..edges);
    let a = Box::new(random_comp(m1, rng));
    let b = Box::new(random_comp(edges - m1, rng));
    if rng.gen_bool(0.5) {
        Comp::Series(a, b)
    } else {
        Comp::Parallel(a, b)
    }
}

/// Returns the clockwise entry lists at the two terminals; internal
/// vertices get their rows written directly. Parallel branches stack, so
/// the second branch's block comes last at s and first at t.
fn materialize(c: &Comp, s: usize, t: usize, rows: &mut Vec<Vec<u32>>) -> (Vec<u32>, Vec<u32>) {
    match c {
        Comp::Edge => (vec![t as u32], vec![s as u32]),
        Comp::Series(a, b) => {
            rows.push(Vec::new());
            let v = rows.len() - 1;
            let (a_s, a_t) = materialize(a, s, v, rows);
            let (b_s, b_t) = materialize(b, v, t, rows);
            rows[v] = a_t.into_iter().chain(b_s).collect();
            (a_s, b_t)
        }
        Comp::Parallel(a, b) => {
            let (a_s, a_t) = materialize(a, s, t, rows);
            let (mut b_s, b_t) = materialize(b, s, t, rows);
            let mut s_entries = a_s;
            s_entries.append(&mut b_s);
            let mut t_entries = b_t;
            t_entries.extend(a_t);
            (s_entries, t_entries)
        }
    }
}

/// Random two-terminal series-parallel plane graph with exactly `edges`
/// edges (at least 2). The top composition is parallel, so every vertex
/// has degree at least 2.
pub fn random_sp_graph(edges: usize, rng: &mut impl Rng) -> PlaneGraph {
    assert!(edges >= 2, "need at least 2 edges for minimum degree 2");
    let m1 = rng.gen_range(1..edges);
    let comp = Comp::Parallel(
        Box::new(random_comp(m1, rng)),
        Box::new(random_comp(edges - m1, rng)),
    );
    let mut rows: Vec<Vec<u32>> = vec![Vec::new(), Vec::new()];
    let (s_entries, t_entries) = materialize(&comp, 0, 1, &mut rows);
    rows[0] = s_entries;
    rows[1] = t_entries;
    let n = rows.len();
    let hint = (0u32, rows[0][0], 0usize);
    build_plane_graph(n, &rows, hint)
        .unwrap_or_else(|e| panic!("composition not planar ({e}); rows {rows:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{sp_decomposition, width};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn canonical_key_invariant_under_relabeling() {
        // the same square presented with two labelings
        let a = build_plane_graph(
            4,
            &[vec![1, 3], vec![0, 2], vec![1, 3], vec![2, 0]],
            (0, 1, 0),
        )
        .unwrap();
        let b = build_plane_graph(
            4,
            &[vec![2, 3], vec![2, 3], vec![0, 1], vec![1, 0]],
            (0, 2, 0),
        )
        .unwrap();
        assert_eq!(canonical_key(&a), canonical_key(&b));
    }

    #[test]
    fn cycle_outer_choices_coincide() {
        // degree-2 rotations cannot see orientation, so the two outer
        // choices of a triangle are isomorphic
        let adj = vec![vec![2, 1], vec![0, 2], vec![1, 0]];
        let inner = build_plane_graph(3, &adj, (0, 1, 0)).unwrap();
        let other = build_plane_graph(3, &adj, (1, 0, 0)).unwrap();
        assert_eq!(canonical_key(&inner), canonical_key(&other));
    }

    #[test]
    fn canonical_key_separates_outer_faces() {
        // double edge with a pendant: the bigon face and the pendant face
        // give structurally different instances
        let adj = vec![vec![1, 1], vec![0, 0, 2], vec![1]];
        let g = build_plane_graph(3, &adj, (0, 1, 0)).unwrap();
        assert_eq!(g.face_count(), 2);
        let keys: Vec<_> = g
            .face_ids()
            .map(|f| {
                let hint = g.dart_triple(g.face_walk(f).darts[0]);
                canonical_key(&build_plane_graph(3, &adj, hint).unwrap())
            })
            .collect();
        assert_ne!(keys[0], keys[1]);
    }

    #[test]
    fn enumeration_counts_small() {
        // m=1: K2. m=2 adds the path and the double edge. m=3 adds the
        // 3-path, the claw, the triangle, the triple edge, and the
        // pendant double edge with either face outside.
        assert_eq!(enumerate_plane_graphs(1).len(), 1);
        assert_eq!(enumerate_plane_graphs(2).len(), 3);
        assert_eq!(enumerate_plane_graphs(3).len(), 9);
    }

    #[test]
    fn enumeration_instances_are_within_bounds() {
        for g in enumerate_plane_graphs(4) {
            assert!(g.edge_count() <= 4);
            assert!(g.vertex_count() >= 2);
        }
    }

    #[test]
    fn sp_graphs_build_and_decompose() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let m = rng.gen_range(2..=30);
            let g = random_sp_graph(m, &mut rng);
            assert_eq!(g.edge_count(), m);
            assert!(g.vertices().all(|v| g.degree(v) >= 2));
            let tree = sp_decomposition(&g).expect("generated graph is series-parallel");
            assert!(width(&g, &tree).unwrap() <= 2);
        }
    }
}
