//! Combinatorial plane embeddings stored as rotation systems.
//!
//! Every undirected edge `{u, v}` is split into two darts `u -> v` and
//! `v -> u`. The rotation at a vertex is the cyclic order of its outgoing
//! darts. Faces are the orbits of the face permutation
//! `d -> rot_next(twin(d))`, so the plane structure never needs coordinates.
//!
//! Finite embeddings stand in for infinite graphs. A [`Truncation`] pairs an
//! embedding with its designated outer face (the unbounded one) and a set of
//! boundary vertices that play the role of "infinity" for every finite-side
//! test in the crate.

use std::collections::{HashMap, VecDeque};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type DartId = usize;
pub type EdgeId = usize;
pub type FaceId = usize;

/// Sentinel distance for unreachable vertices.
pub const UNREACHABLE: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarEmbedding {
    /// Darts leaving `v` are `offsets[v]..offsets[v + 1]`, in rotation order.
    offsets: Vec<usize>,
    origin: Vec<VertexId>,
    head: Vec<VertexId>,
    twin: Vec<DartId>,
    dart_edge: Vec<EdgeId>,
    /// `edges[e] = [d, twin(d)]` with `d < twin(d)`.
    edges: Vec<[DartId; 2]>,
}

impl PlanarEmbedding {
    /// Builds an embedding from per-vertex neighbor lists in cyclic order.
    ///
    /// Twins are inferred by matching `u -> v` with `v -> u`. Self-loops,
    /// repeated darts and darts without a reverse partner are rejected.
    pub fn from_rotation(rotation: Vec<Vec<VertexId>>) -> Result<Self> {
        let n = rotation.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut origin = Vec::new();
        let mut head = Vec::new();
        offsets.push(0);
        for (u, nbrs) in rotation.iter().enumerate() {
            for &w in nbrs {
                if w >= n {
                    return Err(Error::Malformed(format!(
                        "dangling dart {u} -> {w}: vertex {w} does not exist"
                    )));
                }
                if w == u {
                    return Err(Error::Malformed(format!("self-loop at vertex {u}")));
                }
                origin.push(u);
                head.push(w);
            }
            offsets.push(origin.len());
        }

        let mut by_pair: HashMap<(VertexId, VertexId), DartId> = HashMap::with_capacity(head.len());
        for d in 0..head.len() {
            if by_pair.insert((origin[d], head[d]), d).is_some() {
                return Err(Error::Malformed(format!(
                    "duplicate dart {} -> {}",
                    origin[d], head[d]
                )));
            }
        }

        let mut twin = vec![usize::MAX; head.len()];
        for d in 0..head.len() {
            match by_pair.get(&(head[d], origin[d])) {
                Some(&t) => twin[d] = t,
                None => {
                    return Err(Error::Malformed(format!(
                        "dart {} -> {} has no reverse dart",
                        origin[d], head[d]
                    )))
                }
            }
        }

        let mut dart_edge = vec![usize::MAX; head.len()];
        let mut edges = Vec::with_capacity(head.len() / 2);
        for d in 0..head.len() {
            let t = twin[d];
            if twin[t] != d {
                return Err(Error::Malformed(format!("twin of dart {d} is not involutive")));
            }
            if d < t {
                dart_edge[d] = edges.len();
                dart_edge[t] = edges.len();
                edges.push([d, t]);
            }
        }

        Ok(Self {
            offsets,
            origin,
            head,
            twin,
            dart_edge,
            edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn dart_count(&self) -> usize {
        self.head.len()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn darts_of(&self, v: VertexId) -> std::ops::Range<DartId> {
        self.offsets[v]..self.offsets[v + 1]
    }

    /// Neighbors of `v` in rotation order.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.darts_of(v).map(move |d| self.head[d])
    }

    pub fn origin(&self, d: DartId) -> VertexId {
        self.origin[d]
    }

    pub fn head(&self, d: DartId) -> VertexId {
        self.head[d]
    }

    pub fn twin(&self, d: DartId) -> DartId {
        self.twin[d]
    }

    pub fn edge_of(&self, d: DartId) -> EdgeId {
        self.dart_edge[d]
    }

    /// The two darts of edge `e`.
    pub fn edge_darts(&self, e: EdgeId) -> [DartId; 2] {
        self.edges[e]
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        let d = self.edges[e][0];
        (self.origin[d], self.head[d])
    }

    /// Successor of `d` in the rotation at its origin.
    pub fn rot_next(&self, d: DartId) -> DartId {
        let v = self.origin[d];
        if d + 1 == self.offsets[v + 1] {
            self.offsets[v]
        } else {
            d + 1
        }
    }

    /// The dart following `d` along the boundary of the face to which `d` belongs.
    pub fn face_next(&self, d: DartId) -> DartId {
        self.rot_next(self.twin[d])
    }

    /// Rotation lists as neighbor ids, the inverse of [`Self::from_rotation`].
    pub fn rotation(&self) -> Vec<Vec<VertexId>> {
        (0..self.vertex_count())
            .map(|v| self.neighbors(v).collect())
            .collect()
    }

    /// Face orbits of the embedding.
    pub fn faces(&self) -> Faces {
        let mut face_of = vec![usize::MAX; self.dart_count()];
        let mut orbits = Vec::new();
        for start in 0..self.dart_count() {
            if face_of[start] != usize::MAX {
                continue;
            }
            let f = orbits.len();
            let mut orbit = Vec::new();
            let mut d = start;
            loop {
                face_of[d] = f;
                orbit.push(d);
                d = self.face_next(d);
                if d == start {
                    break;
                }
            }
            orbits.push(orbit);
        }
        Faces { orbits, face_of }
    }

    /// Connected components, as a component label per vertex and the count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.vertex_count();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for w in self.neighbors(u) {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1 <= 1
    }

    /// Breadth-first graph distances from `v`; unreachable vertices get [`UNREACHABLE`].
    pub fn distances(&self, v: VertexId) -> Vec<usize> {
        self.multi_source_distances(std::iter::once(v))
    }

    pub fn multi_source_distances(&self, sources: impl IntoIterator<Item = VertexId>) -> Vec<usize> {
        let mut dist = vec![UNREACHABLE; self.vertex_count()];
        let mut queue = VecDeque::new();
        for s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for w in self.neighbors(u) {
                if dist[w] == UNREACHABLE {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange(v))
        }
    }

    pub fn check_edge(&self, e: EdgeId) -> Result<()> {
        if e < self.edge_count() {
            Ok(())
        } else {
            Err(Error::EdgeOutOfRange(e))
        }
    }

    /// The closed ball `{u : dist(v, u) <= r}`.
    pub fn ball(&self, v: VertexId, r: usize) -> Result<Ball> {
        self.check_vertex(v)?;
        let dist = self.distances(v);
        let members = (0..self.vertex_count()).filter(|&u| dist[u] <= r).collect();
        Ok(Ball {
            center: v,
            radius: r,
            members,
        })
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            version: 1,
            vertices: self.vertex_count(),
            rotation: self.rotation(),
            boundary: None,
            manifest: None,
        }
    }

    pub fn from_file(file: GraphFile) -> Result<Self> {
        if file.version != 1 {
            return Err(Error::Version(file.version));
        }
        if file.rotation.len() != file.vertices {
            return Err(Error::Malformed(format!(
                "header declares {} vertices but {} rotation lists are present",
                file.vertices,
                file.rotation.len()
            )));
        }
        Self::from_rotation(file.rotation)
    }

    pub fn save<W: Write>(&self, writer: W) -> Result<()> {
        self.to_file().write(writer)
    }

    pub fn load<R: Read>(reader: R) -> Result<Self> {
        Self::from_file(GraphFile::read(reader)?)
    }
}

/// Face orbits together with the dart-to-face map.
#[derive(Debug, Clone)]
pub struct Faces {
    pub orbits: Vec<Vec<DartId>>,
    pub face_of: Vec<FaceId>,
}

impl Faces {
    pub fn count(&self) -> usize {
        self.orbits.len()
    }

    /// Length of the boundary walk of face `f` (bridges count twice).
    pub fn boundary_len(&self, f: FaceId) -> usize {
        self.orbits[f].len()
    }

    /// Default outer face: longest boundary walk, lowest index on ties.
    pub fn default_outer(&self) -> FaceId {
        let mut best = 0;
        for f in 1..self.count() {
            if self.orbits[f].len() > self.orbits[best].len() {
                best = f;
            }
        }
        best
    }

    /// Vertices incident to face `f`, as a membership mask.
    pub fn vertex_mask(&self, emb: &PlanarEmbedding, f: FaceId) -> Vec<bool> {
        let mut mask = vec![false; emb.vertex_count()];
        for &d in &self.orbits[f] {
            mask[emb.origin(d)] = true;
        }
        mask
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub center: VertexId,
    pub radius: usize,
    pub members: Vec<VertexId>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// A finite embedding with its designated outer face and truncation boundary.
///
/// Boundary vertices stand in for the rest of the infinite graph: a vertex
/// set is "finite" exactly when it avoids them. By default the boundary is
/// the set of vertices on the outer face. Trees have every vertex on their
/// only face, so they carry an explicit boundary instead (the two ends of a
/// path).
#[derive(Debug, Clone)]
pub struct Truncation {
    pub emb: PlanarEmbedding,
    pub faces: Faces,
    pub outer: FaceId,
    boundary: Vec<bool>,
}

impl Truncation {
    pub fn new(emb: PlanarEmbedding) -> Self {
        let faces = emb.faces();
        let outer = faces.default_outer();
        Self::assemble(emb, faces, outer)
    }

    pub fn with_outer_face(emb: PlanarEmbedding, outer: FaceId) -> Result<Self> {
        let faces = emb.faces();
        if outer >= faces.count() {
            return Err(Error::FaceOutOfRange(outer));
        }
        Ok(Self::assemble(emb, faces, outer))
    }

    fn assemble(emb: PlanarEmbedding, faces: Faces, outer: FaceId) -> Self {
        let boundary = if faces.count() == 0 {
            vec![false; emb.vertex_count()]
        } else {
            faces.vertex_mask(&emb, outer)
        };
        Self {
            emb,
            faces,
            outer,
            boundary,
        }
    }

    /// Replaces the default boundary with an explicit vertex set.
    pub fn with_boundary(mut self, vertices: &[VertexId]) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidParameter("truncation boundary must be nonempty".into()));
        }
        let mut mask = vec![false; self.emb.vertex_count()];
        for &v in vertices {
            self.emb.check_vertex(v)?;
            mask[v] = true;
        }
        self.boundary = mask;
        Ok(self)
    }

    /// Whether `v` belongs to the truncation boundary.
    pub fn is_boundary(&self, v: VertexId) -> bool {
        self.boundary[v]
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    pub fn boundary_vertices(&self) -> Vec<VertexId> {
        (0..self.emb.vertex_count()).filter(|&v| self.boundary[v]).collect()
    }

    fn has_default_boundary(&self) -> bool {
        self.faces.count() > 0 && self.boundary == self.faces.vertex_mask(&self.emb, self.outer)
    }

    /// Distance from every vertex to the boundary.
    pub fn depth(&self) -> Vec<usize> {
        self.emb.multi_source_distances(self.boundary_vertices())
    }

    /// Distance from `v` to the boundary.
    pub fn margin(&self, v: VertexId) -> usize {
        self.depth()[v]
    }

    /// The deepest vertex (largest distance to the boundary), lowest id on ties.
    pub fn center(&self) -> VertexId {
        let depth: Vec<usize> = self
            .depth()
            .into_iter()
            .map(|d| if d == UNREACHABLE { 0 } else { d })
            .collect();
        let mut best = 0;
        for v in 1..depth.len() {
            if depth[v] > depth[best] {
                best = v;
            }
        }
        best
    }

    /// Faces other than the outer one none of whose vertices are on the boundary.
    pub fn interior_faces(&self) -> Vec<FaceId> {
        (0..self.faces.count())
            .filter(|&f| f != self.outer && !self.touches_boundary(f))
            .collect()
    }

    /// Whether some vertex of face `f` is on the boundary.
    pub fn touches_boundary(&self, f: FaceId) -> bool {
        self.faces.orbits[f]
            .iter()
            .any(|&d| self.boundary[self.emb.origin(d)])
    }

    /// Whether every vertex of face `f` is on the boundary. Such faces lie
    /// "at infinity": no dual cycle through them can enclose a finite region.
    pub fn face_at_infinity(&self, f: FaceId) -> bool {
        self.faces.orbits[f]
            .iter()
            .all(|&d| self.boundary[self.emb.origin(d)])
    }

    pub fn to_file(&self) -> GraphFile {
        let mut file = self.emb.to_file();
        if !self.has_default_boundary() {
            file.boundary = Some(self.boundary_vertices());
        }
        file
    }

    pub fn from_file(mut file: GraphFile) -> Result<Self> {
        let boundary = file.boundary.take();
        let trunc = Self::new(PlanarEmbedding::from_file(file)?);
        match boundary {
            Some(b) => trunc.with_boundary(&b),
            None => Ok(trunc),
        }
    }

    pub fn save<W: Write>(&self, writer: W) -> Result<()> {
        self.to_file().write(writer)
    }

    pub fn load<R: Read>(reader: R) -> Result<Self> {
        Self::from_file(GraphFile::read(reader)?)
    }
}

/// On-disk graph schema: `{"version":1,"vertices":V,"rotation":[[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub version: u32,
    pub vertices: usize,
    pub rotation: Vec<Vec<VertexId>>,
    /// Explicit truncation boundary; absent means "vertices of the outer face".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Vec<VertexId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<serde_json::Value>,
}

impl GraphFile {
    pub fn write<W: Write>(&self, mut writer: W) -> Result<()> {
        serde_json::to_writer(&mut writer, self)?;
        writer.write_all(b"\n")?;
        Ok(())
    }

    pub fn read<R: Read>(reader: R) -> Result<Self> {
        Ok(serde_json::from_reader(reader)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> PlanarEmbedding {
        PlanarEmbedding::from_rotation(vec![vec![1, 3], vec![2, 0], vec![3, 1], vec![0, 2]]).unwrap()
    }

    #[test]
    fn twins_are_involutive() {
        let emb = c4();
        for d in 0..emb.dart_count() {
            assert_eq!(emb.twin(emb.twin(d)), d);
            assert_ne!(emb.origin(emb.twin(d)), emb.origin(d));
        }
    }

    #[test]
    fn c4_has_two_faces_of_length_four() {
        let faces = c4().faces();
        assert_eq!(faces.count(), 2);
        assert!(faces.orbits.iter().all(|o| o.len() == 4));
    }

    #[test]
    fn rejects_dangling_and_duplicate_darts() {
        let missing = PlanarEmbedding::from_rotation(vec![vec![1], vec![]]);
        assert!(matches!(missing, Err(Error::Malformed(_))));
        let out_of_range = PlanarEmbedding::from_rotation(vec![vec![5]]);
        assert!(matches!(out_of_range, Err(Error::Malformed(_))));
        let dup = PlanarEmbedding::from_rotation(vec![vec![1, 1], vec![0, 0]]);
        assert!(matches!(dup, Err(Error::Malformed(_))));
        let looped = PlanarEmbedding::from_rotation(vec![vec![0]]);
        assert!(matches!(looped, Err(Error::Malformed(_))));
    }

    #[test]
    fn load_rejects_vertex_count_mismatch() {
        let json = r#"{"version":1,"vertices":3,"rotation":[[1],[0]]}"#;
        assert!(PlanarEmbedding::load(json.as_bytes()).is_err());
        let json = r#"{"version":2,"vertices":2,"rotation":[[1],[0]]}"#;
        assert_eq!(PlanarEmbedding::load(json.as_bytes()), Err(Error::Version(2)));
    }

    #[test]
    fn save_load_save_is_byte_identical() {
        let emb = c4();
        let mut first = Vec::new();
        emb.save(&mut first).unwrap();
        let back = PlanarEmbedding::load(first.as_slice()).unwrap();
        assert_eq!(back, emb);
        let mut second = Vec::new();
        back.save(&mut second).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn ball_of_radius_zero_is_the_center() {
        let emb = c4();
        let b = emb.ball(2, 0).unwrap();
        assert_eq!(b.members, vec![2]);
        assert!(emb.ball(9, 0).is_err());
    }
}
