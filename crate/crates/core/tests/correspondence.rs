use proptest::prelude::*;

use perimetry::cutsets::{enumerate_cutsets_direct, enumerate_cutsets_via_dual, CutsetCensus};
use perimetry::dual::{cutset_to_dual, is_minimal_cutset};
use perimetry::embedding::Truncation;
use perimetry::lattice::{grid_box, hex_ball, triangular_ball, Family};
use perimetry::{dualize, DualGraph, EdgeId};

fn censuses(t: &Truncation, v: usize, n: usize) -> (CutsetCensus, CutsetCensus) {
    let d = dualize(t).unwrap();
    (
        enumerate_cutsets_direct(t, v, n).unwrap(),
        enumerate_cutsets_via_dual(t, &d, v, n).unwrap(),
    )
}

/// Whether the dual edges form one closed walk visiting each vertex once.
fn is_simple_cycle(d: &DualGraph, edges: &[EdgeId]) -> bool {
    let mut degree = vec![0usize; d.vertex_count()];
    for &e in edges {
        let [a, b] = d.endpoints(e);
        if a == b {
            return edges.len() == 1;
        }
        degree[a] += 1;
        degree[b] += 1;
    }
    if degree.iter().any(|&k| k != 0 && k != 2) {
        return false;
    }
    // connected: walk from the first edge
    let mut used = vec![false; edges.len()];
    let mut cur = d.endpoints(edges[0])[0];
    for _ in 0..edges.len() {
        match (0..edges.len()).find(|&i| !used[i] && d.endpoints(edges[i]).contains(&cur)) {
            Some(i) => {
                used[i] = true;
                let [a, b] = d.endpoints(edges[i]);
                cur = if a == cur { b } else { a };
            }
            None => return false,
        }
    }
    used.iter().all(|&u| u)
}

#[test]
fn boxes_and_triangular_agree_up_to_eight() {
    for t in [
        Truncation::new(grid_box(5).unwrap()),
        Truncation::new(grid_box(7).unwrap()),
        Truncation::new(triangular_ball(2).unwrap()),
    ] {
        let v = t.center();
        let (a, b) = censuses(&t, v, 8);
        assert!(a.agrees_with(&b), "{:?} vs {:?}", a.counts, b.counts);
        assert!(a.total() > 0);
    }
}

#[test]
fn every_cut_is_minimal_and_a_dual_cycle() {
    let t = Truncation::new(grid_box(7).unwrap());
    let d = dualize(&t).unwrap();
    let v = t.center();
    let census = enumerate_cutsets_direct(&t, v, 10).unwrap();
    for c in &census.cuts {
        assert!(is_minimal_cutset(&t, v, &c.edges).unwrap());
        assert!(is_simple_cycle(&d, &cutset_to_dual(&d, &c.edges).unwrap()));
    }
}

#[test]
fn no_cut_is_smaller_than_the_degree_on_lattices() {
    for t in [
        Truncation::new(grid_box(7).unwrap()),
        Truncation::new(triangular_ball(3).unwrap()),
        Truncation::new(hex_ball(5).unwrap()),
    ] {
        let v = t.center();
        let census = enumerate_cutsets_direct(&t, v, 8).unwrap();
        let deg = t.emb.degree(v);
        assert!(census.counts[..deg].iter().all(|&c| c == 0));
        assert_eq!(census.count(deg), 1);
    }
}

#[test]
fn hex_counts_agree() {
    let t = Truncation::new(hex_ball(5).unwrap());
    let (a, b) = censuses(&t, t.center(), 10);
    assert!(a.agrees_with(&b));
}

#[test]
fn line_has_cuts_but_no_dual_cycles() {
    let t = Family::Path.truncation(4).unwrap();
    let (a, b) = censuses(&t, 4, 2);
    assert_eq!(a.count(2), 16);
    assert_eq!(b.total(), 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn methods_agree_at_random_interior_vertices(fam in 0usize..3, r in 2usize..4, pick in 0usize..1000, n in 3usize..9) {
        let t = match fam {
            0 => Family::Box.truncation(r).unwrap(),
            1 => Family::Triangular.truncation(r).unwrap(),
            _ => Family::Hex.truncation(r + 1).unwrap(),
        };
        let interior: Vec<usize> = (0..t.emb.vertex_count()).filter(|&u| !t.is_boundary(u)).collect();
        prop_assume!(!interior.is_empty());
        let v = interior[pick % interior.len()];
        let (a, b) = censuses(&t, v, n);
        prop_assert!(a.agrees_with(&b));
    }
}
