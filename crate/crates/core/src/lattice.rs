//! Generators for finite windows of standard planar lattices.
//!
//! Every generator lays the vertices out on straight-line lattice
//! coordinates and derives the rotation by sorting neighbors clockwise
//! starting from north (so square-lattice vertices read N, E, S, W).
//! Ball generators place the origin at vertex 0 and number the rest in
//! breadth-first order.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::embedding::{PlanarEmbedding, Truncation};
use crate::error::{Error, Result};

type Cell = (i64, i64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// L1 ball of the square lattice.
    Grid,
    /// Square box of side `2r + 1` centered at the origin.
    Box,
    Triangular,
    Hex,
    Path,
}

impl Family {
    /// Generates the family member of the given size parameter.
    ///
    /// For `Path` the radius `r` gives a path on `2r + 1` vertices.
    pub fn generate(self, radius: usize) -> Result<PlanarEmbedding> {
        match self {
            Family::Grid => grid_ball(radius),
            Family::Box => grid_box(2 * radius + 1),
            Family::Triangular => triangular_ball(radius),
            Family::Hex => hex_ball(radius),
            Family::Path => path(2 * radius + 1),
        }
    }

    /// Generates the family member together with its truncation boundary.
    ///
    /// Paths are bounded by their two end vertices; every other family uses
    /// the outer face.
    pub fn truncation(self, radius: usize) -> Result<Truncation> {
        let emb = self.generate(radius)?;
        match self {
            Family::Path => {
                let last = emb.vertex_count() - 1;
                Truncation::new(emb).with_boundary(&[0, last])
            }
            _ => Ok(Truncation::new(emb)),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Grid => "grid",
            Family::Box => "box",
            Family::Triangular => "triangular",
            Family::Hex => "hex",
            Family::Path => "path",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" | "square" => Ok(Family::Grid),
            "box" => Ok(Family::Box),
            "triangular" | "tri" => Ok(Family::Triangular),
            "hex" | "honeycomb" => Ok(Family::Hex),
            "path" | "line" => Ok(Family::Path),
            other => Err(Error::InvalidParameter(format!("unknown family `{other}`"))),
        }
    }
}

fn require_positive(name: &str, value: usize, min: usize) -> Result<()> {
    if value < min {
        return Err(Error::InvalidParameter(format!(
            "{name} must be at least {min}, got {value}"
        )));
    }
    Ok(())
}

/// Builds an embedding from positioned vertices and an undirected edge list.
fn from_geometry(points: &[(f64, f64)], edges: &[(usize, usize)]) -> Result<PlanarEmbedding> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    for (u, nbrs) in adj.iter_mut().enumerate() {
        let (ux, uy) = points[u];
        let bearing = |w: usize| {
            let (wx, wy) = points[w];
            let a = (wx - ux).atan2(wy - uy);
            if a < 0.0 {
                a + 2.0 * PI
            } else {
                a
            }
        };
        nbrs.sort_by(|&a, &b| bearing(a).total_cmp(&bearing(b)));
    }
    PlanarEmbedding::from_rotation(adj)
}

/// Breadth-first ball of radius `r` around the origin of an infinite lattice,
/// returned as cells in discovery order plus the induced edge list.
fn lattice_ball<F>(r: usize, neighbors: F) -> (Vec<Cell>, Vec<(usize, usize)>)
where
    F: Fn(Cell) -> Vec<Cell>,
{
    let mut index: HashMap<Cell, usize> = HashMap::new();
    let mut cells = vec![(0, 0)];
    let mut dist = vec![0usize];
    index.insert((0, 0), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if dist[i] == r {
            continue;
        }
        for c in neighbors(cells[i]) {
            if let Entry::Vacant(slot) = index.entry(c) {
                slot.insert(cells.len());
                cells.push(c);
                dist.push(dist[i] + 1);
                queue.push_back(cells.len() - 1);
            }
        }
    }
    let mut edges = Vec::new();
    for (i, &c) in cells.iter().enumerate() {
        for nb in neighbors(c) {
            if let Some(&j) = index.get(&nb) {
                if i < j {
                    edges.push((i, j));
                }
            }
        }
    }
    (cells, edges)
}

fn square_neighbors((x, y): Cell) -> Vec<Cell> {
    vec![(x, y + 1), (x + 1, y), (x, y - 1), (x - 1, y)]
}

/// Subgraph of Z² induced on `{|x| + |y| <= radius}`.
pub fn grid_ball(radius: usize) -> Result<PlanarEmbedding> {
    require_positive("radius", radius, 1)?;
    let (cells, edges) = lattice_ball(radius, square_neighbors);
    let points: Vec<_> = cells.iter().map(|&(x, y)| (x as f64, y as f64)).collect();
    from_geometry(&points, &edges)
}

/// The `side × side` grid graph, vertices numbered row-major.
pub fn grid_box(side: usize) -> Result<PlanarEmbedding> {
    require_positive("side", side, 2)?;
    let id = |x: usize, y: usize| y * side + x;
    let mut points = Vec::with_capacity(side * side);
    let mut edges = Vec::new();
    for y in 0..side {
        for x in 0..side {
            points.push((x as f64, y as f64));
            if x + 1 < side {
                edges.push((id(x, y), id(x + 1, y)));
            }
            if y + 1 < side {
                edges.push((id(x, y), id(x, y + 1)));
            }
        }
    }
    from_geometry(&points, &edges)
}

/// Graph-metric ball of the triangular lattice (a hexagon of side `radius`).
pub fn triangular_ball(radius: usize) -> Result<PlanarEmbedding> {
    require_positive("radius", radius, 1)?;
    // axial coordinates
    let nbrs = |(q, r): Cell| {
        vec![
            (q + 1, r),
            (q - 1, r),
            (q, r + 1),
            (q, r - 1),
            (q + 1, r - 1),
            (q - 1, r + 1),
        ]
    };
    let (cells, edges) = lattice_ball(radius, nbrs);
    let h = 3f64.sqrt() / 2.0;
    let points: Vec<_> = cells
        .iter()
        .map(|&(q, r)| (q as f64 + r as f64 / 2.0, r as f64 * h))
        .collect();
    from_geometry(&points, &edges)
}

/// Graph-metric ball of the honeycomb lattice, drawn as a brick wall.
pub fn hex_ball(radius: usize) -> Result<PlanarEmbedding> {
    require_positive("radius", radius, 1)?;
    let nbrs = |(x, y): Cell| {
        let vertical = if (x + y).rem_euclid(2) == 0 { y + 1 } else { y - 1 };
        vec![(x + 1, y), (x - 1, y), (x, vertical)]
    };
    let (cells, edges) = lattice_ball(radius, nbrs);
    let points: Vec<_> = cells.iter().map(|&(x, y)| (x as f64, y as f64)).collect();
    from_geometry(&points, &edges)
}

/// Path on `n` vertices, numbered left to right.
pub fn path(n: usize) -> Result<PlanarEmbedding> {
    require_positive("n", n, 2)?;
    let rotation = (0..n)
        .map(|i| {
            let mut r = Vec::with_capacity(2);
            if i > 0 {
                r.push(i - 1);
            }
            if i + 1 < n {
                r.push(i + 1);
            }
            r
        })
        .collect();
    PlanarEmbedding::from_rotation(rotation)
}

/// Cycle on `n` vertices.
pub fn cycle(n: usize) -> Result<PlanarEmbedding> {
    require_positive("n", n, 3)?;
    let rotation = (0..n).map(|i| vec![(i + 1) % n, (i + n - 1) % n]).collect();
    PlanarEmbedding::from_rotation(rotation)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_ball_radius_one_is_a_plus_sign() {
        let g = grid_ball(1).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (5, 4));
        assert_eq!(g.faces().count(), 1);
        // origin sees N, E, S, W in that order
        let pos: Vec<_> = g.neighbors(0).collect();
        assert_eq!(pos, vec![1, 2, 3, 4]);
    }

    #[test]
    fn grid_ball_counts_lattice_points() {
        for r in 1..=6 {
            assert_eq!(grid_ball(r).unwrap().vertex_count(), 2 * r * r + 2 * r + 1);
        }
    }

    #[test]
    fn triangular_radius_one() {
        let t = triangular_ball(1).unwrap();
        assert_eq!((t.vertex_count(), t.edge_count()), (7, 12));
        assert_eq!(t.faces().count(), 7);
    }

    #[test]
    fn hex_is_cubic() {
        let h = hex_ball(1).unwrap();
        assert_eq!(h.max_degree(), 3);
        let h = hex_ball(6).unwrap();
        assert_eq!(h.max_degree(), 3);
    }

    #[test]
    fn path_shapes() {
        let p = path(5).unwrap();
        assert_eq!((p.vertex_count(), p.edge_count()), (5, 4));
        assert!((1..4).all(|v| p.degree(v) == 2));
        let e = path(2).unwrap();
        assert_eq!(e.edge_count(), 1);
        assert!(path(1).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for f in [Family::Grid, Family::Box, Family::Triangular, Family::Hex, Family::Path] {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert!("moebius".parse::<Family>().is_err());
    }
}
