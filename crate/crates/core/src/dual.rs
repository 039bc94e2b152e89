//! The dual multigraph `G*` and the edge bijection `*`.
//!
//! One dual vertex per face orbit, one dual edge per primal edge joining the
//! faces on its two sides. A bridge has the same face on both sides and
//! becomes a loop; two faces sharing several edges get parallel dual edges.
//!
//! Cut-sets here are cut-sets *of a vertex*: after deleting them the vertex
//! must sit in a finite component, one that avoids the truncation boundary.
//! This is the notion under which minimal cut-sets correspond to simple dual
//! cycles. The weaker "bond" notion, where no side has to be finite, behaves
//! differently. A tree has a single face, so its dual is a bouquet of loops:
//! every edge of a line is a bond, while a minimal cut-set of an interior
//! vertex is a pair of edges whose dual image is two loops at one vertex, a
//! closed path that is not simple.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::embedding::{EdgeId, FaceId, Truncation, VertexId};
use crate::error::{Error, Result};
use crate::region::{component_without, Region};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGraph {
    face_count: usize,
    outer: FaceId,
    /// Endpoints of each dual edge. Equal entries mean a loop.
    edges: Vec<[FaceId; 2]>,
    /// Primal edge id -> dual edge id.
    star: Vec<EdgeId>,
    /// Dual edge id -> primal edge id.
    star_inv: Vec<EdgeId>,
    /// Per face, the crossings `(neighbor face, dual edge)` in boundary-walk order.
    rotation: Vec<Vec<(FaceId, EdgeId)>>,
    interior: Vec<FaceId>,
}

/// Builds `G*` for a connected truncation, using its designated outer face.
pub fn dualize(trunc: &Truncation) -> Result<DualGraph> {
    let emb = &trunc.emb;
    let (_, components) = emb.components();
    if components > 1 {
        return Err(Error::Disconnected { components });
    }
    let faces = &trunc.faces;
    let m = emb.edge_count();
    // dual edge i is the image of primal edge i
    let star: Vec<EdgeId> = (0..m).collect();
    let star_inv = star.clone();
    let edges = (0..m)
        .map(|e| {
            let [d, t] = emb.edge_darts(e);
            [faces.face_of[d], faces.face_of[t]]
        })
        .collect();
    let rotation = faces
        .orbits
        .iter()
        .map(|orbit| {
            orbit
                .iter()
                .map(|&d| (faces.face_of[emb.twin(d)], star[emb.edge_of(d)]))
                .collect()
        })
        .collect();
    Ok(DualGraph {
        face_count: faces.count(),
        outer: trunc.outer,
        edges,
        star,
        star_inv,
        rotation,
        interior: trunc.interior_faces(),
    })
}

impl DualGraph {
    pub fn vertex_count(&self) -> usize {
        self.face_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn outer(&self) -> FaceId {
        self.outer
    }

    pub fn endpoints(&self, e: EdgeId) -> [FaceId; 2] {
        self.edges[e]
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        let [a, b] = self.edges[e];
        a == b
    }

    /// Dual image `e*` of primal edge `e`.
    pub fn star(&self, e: EdgeId) -> EdgeId {
        self.star[e]
    }

    /// Primal preimage of dual edge `e*`.
    pub fn unstar(&self, e: EdgeId) -> EdgeId {
        self.star_inv[e]
    }

    /// Crossings around face `f` in boundary-walk order.
    pub fn rotation(&self, f: FaceId) -> &[(FaceId, EdgeId)] {
        &self.rotation[f]
    }

    /// Faces none of whose vertices lie on the truncation boundary.
    pub fn interior_faces(&self) -> &[FaceId] {
        &self.interior
    }

    pub fn degree(&self, f: FaceId) -> usize {
        self.rotation[f].len()
    }

    pub fn check_face(&self, f: FaceId) -> Result<()> {
        if f < self.face_count {
            Ok(())
        } else {
            Err(Error::FaceOutOfRange(f))
        }
    }

    /// Incidence lists built from the edge list alone (loops listed once per end).
    pub fn incidence(&self) -> Vec<Vec<(FaceId, EdgeId)>> {
        let mut inc = vec![Vec::new(); self.face_count];
        for (e, &[a, b]) in self.edges.iter().enumerate() {
            inc[a].push((b, e));
            inc[b].push((a, e));
        }
        inc
    }

    /// Number of dual edges joining `a` and `b`.
    pub fn multiplicity(&self, a: FaceId, b: FaceId) -> usize {
        self.edges
            .iter()
            .filter(|&&[x, y]| (x == a && y == b) || (x == b && y == a))
            .count()
    }

    pub fn to_file(&self) -> DualFile {
        DualFile {
            version: 1,
            vertices: self.face_count,
            rotation: self
                .rotation
                .iter()
                .map(|r| r.iter().map(|&(f, _)| f).collect())
                .collect(),
            rotation_edges: self
                .rotation
                .iter()
                .map(|r| r.iter().map(|&(_, e)| e).collect())
                .collect(),
            edges: self.edges.clone(),
            star: self.star.clone(),
            outer: self.outer,
            interior: self.interior.clone(),
            manifest: None,
        }
    }

    pub fn from_file(file: DualFile) -> Result<Self> {
        if file.version != 1 {
            return Err(Error::Version(file.version));
        }
        let n = file.vertices;
        let m = file.edges.len();
        if file.rotation.len() != n || file.rotation_edges.len() != n {
            return Err(Error::Malformed("rotation length differs from vertex count".into()));
        }
        if file.star.len() != m {
            return Err(Error::Malformed("star must map every primal edge".into()));
        }
        if file.outer >= n {
            return Err(Error::FaceOutOfRange(file.outer));
        }
        if file.edges.iter().flatten().any(|&f| f >= n) {
            return Err(Error::Malformed("dual edge endpoint out of range".into()));
        }
        let mut star_inv = vec![usize::MAX; m];
        for (e, &s) in file.star.iter().enumerate() {
            if s >= m || star_inv[s] != usize::MAX {
                return Err(Error::Malformed("star is not a bijection".into()));
            }
            star_inv[s] = e;
        }
        let mut rotation = Vec::with_capacity(n);
        let mut uses = vec![0usize; m];
        for (f, (nbrs, es)) in file.rotation.iter().zip(&file.rotation_edges).enumerate() {
            if nbrs.len() != es.len() {
                return Err(Error::Malformed(format!("rotation lists of face {f} differ in length")));
            }
            let mut r = Vec::with_capacity(nbrs.len());
            for (&g, &e) in nbrs.iter().zip(es) {
                if e >= m {
                    return Err(Error::Malformed(format!("dual edge {e} out of range")));
                }
                let [a, b] = file.edges[e];
                if !((a == f && b == g) || (a == g && b == f)) {
                    return Err(Error::Malformed(format!(
                        "rotation entry ({g}, {e}) of face {f} disagrees with the edge list"
                    )));
                }
                uses[e] += 1;
                r.push((g, e));
            }
            rotation.push(r);
        }
        if uses.iter().any(|&u| u != 2) {
            return Err(Error::Malformed("every dual edge must appear twice in the rotation".into()));
        }
        if file.interior.iter().any(|&f| f >= n) {
            return Err(Error::Malformed("interior face out of range".into()));
        }
        Ok(Self {
            face_count: n,
            outer: file.outer,
            edges: file.edges,
            star: file.star,
            star_inv,
            rotation,
            interior: file.interior,
        })
    }

    pub fn save<W: Write>(&self, writer: W) -> Result<()> {
        self.to_file().write(writer)
    }

    pub fn load<R: Read>(reader: R) -> Result<Self> {
        Self::from_file(DualFile::read(reader)?)
    }
}

/// On-disk dual schema: the graph schema plus edge list, star map and face roles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualFile {
    pub version: u32,
    pub vertices: usize,
    pub rotation: Vec<Vec<FaceId>>,
    /// Dual edge ids parallel to `rotation`; disambiguates loops and parallel edges.
    pub rotation_edges: Vec<Vec<EdgeId>>,
    pub edges: Vec<[FaceId; 2]>,
    pub star: Vec<EdgeId>,
    pub outer: FaceId,
    pub interior: Vec<FaceId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<serde_json::Value>,
}

impl DualFile {
    pub fn write<W: Write>(&self, mut writer: W) -> Result<()> {
        serde_json::to_writer(&mut writer, self)?;
        writer.write_all(b"\n")?;
        Ok(())
    }

    pub fn read<R: Read>(reader: R) -> Result<Self> {
        Ok(serde_json::from_reader(reader)?)
    }
}

/// A simple closed path in `G*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCycle {
    /// Dual edges in traversal order.
    pub edges: Vec<EdgeId>,
    /// Dual vertices in traversal order; `vertices[i]` is the start of `edges[i]`.
    pub vertices: Vec<FaceId>,
}

impl DualCycle {
    /// Validates an ordered edge sequence as a simple cycle.
    pub fn new(dual: &DualGraph, edges: Vec<EdgeId>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::NotSimpleCycle("empty edge sequence".into()));
        }
        if let Some(&e) = edges.iter().find(|&&e| e >= dual.edge_count()) {
            return Err(Error::EdgeOutOfRange(e));
        }
        let mut sorted = edges.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::NotSimpleCycle("repeated edge".into()));
        }
        for start in dual.endpoints(edges[0]) {
            if let Some(vertices) = walk(dual, &edges, start) {
                let mut seen = vertices.clone();
                seen.sort_unstable();
                if seen.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::NotSimpleCycle("repeated vertex".into()));
                }
                return Ok(Self { edges, vertices });
            }
        }
        Err(Error::NotSimpleCycle("edges do not form a closed path".into()))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

fn walk(dual: &DualGraph, edges: &[EdgeId], start: FaceId) -> Option<Vec<FaceId>> {
    let mut cur = start;
    let mut vertices = Vec::with_capacity(edges.len());
    for &e in edges {
        let [a, b] = dual.endpoints(e);
        vertices.push(cur);
        cur = if a == cur {
            b
        } else if b == cur {
            a
        } else {
            return None;
        };
    }
    (cur == start).then_some(vertices)
}

/// Image of a primal edge set under `*`, sorted.
pub fn cutset_to_dual(dual: &DualGraph, cut: &[EdgeId]) -> Result<Vec<EdgeId>> {
    let mut out = Vec::with_capacity(cut.len());
    for &e in cut {
        if e >= dual.edge_count() {
            return Err(Error::EdgeOutOfRange(e));
        }
        out.push(dual.star(e));
    }
    out.sort_unstable();
    Ok(out)
}

/// Maps a simple dual cycle back to the finite region `Q` it encloses.
///
/// The result satisfies `∂Q = *⁻¹(cycle)`; anything else is reported as an
/// inconsistency. Cycles through the outer face have no finite side and are
/// rejected.
pub fn dual_cycle_to_cutset(trunc: &Truncation, dual: &DualGraph, cycle: &DualCycle) -> Result<Region> {
    if cycle.vertices.iter().any(|&f| trunc.face_at_infinity(f)) {
        return Err(Error::InvalidParameter(
            "cycle passes through a face at infinity and encloses no finite region".into(),
        ));
    }
    let emb = &trunc.emb;
    let mut cut: Vec<EdgeId> = cycle.edges.iter().map(|&e| dual.unstar(e)).collect();
    cut.sort_unstable();
    let mut removed = vec![false; emb.edge_count()];
    for &e in &cut {
        removed[e] = true;
    }
    let mut inside = Vec::new();
    let mut assigned = vec![false; emb.vertex_count()];
    for v in 0..emb.vertex_count() {
        if assigned[v] {
            continue;
        }
        let comp = component_without(emb, v, &removed);
        let finite = comp.iter().all(|&u| !trunc.is_boundary(u));
        for &u in &comp {
            assigned[u] = true;
        }
        if finite {
            inside.extend(comp);
        }
    }
    if inside.is_empty() {
        return Err(Error::InvalidParameter("dual cycle encloses no finite region".into()));
    }
    let region = Region::new(emb, inside);
    if region.boundary != cut {
        return Err(Error::Inconsistent(format!(
            "boundary of enclosed region ({} edges) differs from the cycle preimage ({} edges)",
            region.boundary.len(),
            cut.len()
        )));
    }
    Ok(region)
}

/// Whether deleting `cut` leaves `v` in a finite component.
pub fn is_cutset(trunc: &Truncation, v: VertexId, cut: &[EdgeId]) -> Result<bool> {
    let emb = &trunc.emb;
    emb.check_vertex(v)?;
    let mut removed = vec![false; emb.edge_count()];
    for &e in cut {
        emb.check_edge(e)?;
        removed[e] = true;
    }
    Ok(component_without(emb, v, &removed)
        .iter()
        .all(|&u| !trunc.is_boundary(u)))
}

/// Whether `cut` is a cut-set of `v` no proper subset of which is one.
///
/// Supersets of cut-sets are cut-sets, so it suffices to drop one edge at a time.
pub fn is_minimal_cutset(trunc: &Truncation, v: VertexId, cut: &[EdgeId]) -> Result<bool> {
    let mut cut = cut.to_vec();
    cut.sort_unstable();
    cut.dedup();
    if !is_cutset(trunc, v, &cut)? {
        return Ok(false);
    }
    for i in 0..cut.len() {
        let mut smaller = cut.clone();
        smaller.remove(i);
        if is_cutset(trunc, v, &smaller)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{cycle, grid_box, path};

    fn box3() -> (Truncation, DualGraph) {
        let t = Truncation::new(grid_box(3).unwrap());
        let d = dualize(&t).unwrap();
        (t, d)
    }

    #[test]
    fn c4_dual_is_four_parallel_edges() {
        let t = Truncation::new(cycle(4).unwrap());
        let d = dualize(&t).unwrap();
        assert_eq!(d.vertex_count(), 2);
        assert_eq!(d.edge_count(), 4);
        assert_eq!(d.multiplicity(0, 1), 4);
    }

    #[test]
    fn tree_dual_is_a_bouquet_of_loops() {
        let t = Truncation::new(path(5).unwrap());
        let d = dualize(&t).unwrap();
        assert_eq!(d.vertex_count(), 1);
        assert_eq!(d.edge_count(), 4);
        assert!((0..4).all(|e| d.is_loop(e)));
    }

    #[test]
    fn box3_dual_counts() {
        let (t, d) = box3();
        assert_eq!((t.emb.vertex_count(), t.emb.edge_count()), (9, 12));
        assert_eq!(d.vertex_count(), 5);
        assert_eq!(d.edge_count(), 12);
        let degree_sum: usize = (0..5).map(|f| d.degree(f)).sum();
        assert_eq!(degree_sum, 24);
    }

    #[test]
    fn disconnected_input_is_rejected() {
        let emb = crate::PlanarEmbedding::from_rotation(vec![vec![1], vec![0], vec![3], vec![2]]).unwrap();
        let t = Truncation::new(emb);
        assert_eq!(dualize(&t), Err(Error::Disconnected { components: 2 }));
    }

    #[test]
    fn center_star_maps_to_inner_four_cycle() {
        let (t, d) = box3();
        let center = 4;
        let cut: Vec<_> = t.emb.darts_of(center).map(|x| t.emb.edge_of(x)).collect();
        let image = cutset_to_dual(&d, &cut).unwrap();
        // the four inner faces, each visited by exactly two image edges
        let mut hits = vec![0; d.vertex_count()];
        for &e in &image {
            for f in d.endpoints(e) {
                hits[f] += 1;
            }
        }
        assert_eq!(hits[d.outer()], 0);
        assert_eq!(hits.iter().filter(|&&h| h == 2).count(), 4);

        // order the image into a cycle and map it back
        let mut ordered = vec![image[0]];
        let mut rest: Vec<_> = image[1..].to_vec();
        let mut cur = d.endpoints(image[0])[1];
        while !rest.is_empty() {
            let i = rest.iter().position(|&e| d.endpoints(e).contains(&cur)).unwrap();
            let e = rest.remove(i);
            let [a, b] = d.endpoints(e);
            cur = if a == cur { b } else { a };
            ordered.push(e);
        }
        let cyc = DualCycle::new(&d, ordered).unwrap();
        let q = dual_cycle_to_cutset(&t, &d, &cyc).unwrap();
        assert_eq!(q.members, vec![center]);
        assert_eq!(q.boundary_len(), 4);
    }

    #[test]
    fn c4_two_edges_form_a_two_cycle() {
        let t = Truncation::new(cycle(4).unwrap());
        let d = dualize(&t).unwrap();
        let image = cutset_to_dual(&d, &[0, 2]).unwrap();
        let cyc = DualCycle::new(&d, image).unwrap();
        assert_eq!(cyc.len(), 2);
        assert_ne!(cyc.vertices[0], cyc.vertices[1]);
    }

    #[test]
    fn non_simple_sequences_are_rejected() {
        let (_, d) = box3();
        assert!(matches!(DualCycle::new(&d, vec![0, 0]), Err(Error::NotSimpleCycle(_))));
        assert!(DualCycle::new(&d, vec![]).is_err());
        assert!(DualCycle::new(&d, vec![0, 1]).is_err() || d.multiplicity(d.endpoints(0)[0], d.endpoints(0)[1]) > 1);
    }

    #[test]
    fn minimality_of_center_star() {
        let (t, _) = box3();
        let star: Vec<_> = t.emb.darts_of(4).map(|x| t.emb.edge_of(x)).collect();
        assert!(is_minimal_cutset(&t, 4, &star).unwrap());
        let extra = (0..12).find(|e| !star.contains(e)).unwrap();
        let mut bigger = star.clone();
        bigger.push(extra);
        assert!(!is_minimal_cutset(&t, 4, &bigger).unwrap());
        assert!(!is_minimal_cutset(&t, 4, &star[..3]).unwrap());
    }

    #[test]
    fn path_cut_is_a_dual_two_cycle_not_a_loop_pair() {
        // On a line the minimal cut-sets of a vertex are the two edges flanking
        // an interval; each single edge is a bond but not a cut-set.
        let t = Truncation::new(path(7).unwrap()).with_boundary(&[0, 6]).unwrap();
        let d = dualize(&t).unwrap();
        assert!(!is_cutset(&t, 3, &[2]).unwrap());
        assert!(is_minimal_cutset(&t, 3, &[2, 3]).unwrap());
        // both edges are loops at the single face: the pair revisits a vertex
        assert!(DualCycle::new(&d, vec![2, 3]).is_err());
    }

    #[test]
    fn dual_file_round_trip() {
        let (_, d) = box3();
        let mut buf = Vec::new();
        d.save(&mut buf).unwrap();
        let back = DualGraph::load(buf.as_slice()).unwrap();
        assert_eq!(back, d);
        let mut bad = d.to_file();
        bad.star[0] = bad.star[1];
        assert!(DualGraph::from_file(bad).is_err());
    }
}
