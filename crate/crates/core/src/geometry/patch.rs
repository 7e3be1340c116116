use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::mesh::{Point3, TriMesh};
use crate::error::{ensure, Error, Result};

/// Minimum vertex count for a stable sphere fit.
pub const MIN_PATCH_VERTICES: usize = 10;

/// Vertices within an approximate geodesic ball around a seed vertex.
#[derive(Debug, Clone)]
pub struct SurfacePatch<'a> {
    pub mesh: &'a TriMesh,
    /// Sorted ascending; always contains `seed`.
    pub vertex_ids: Vec<usize>,
    pub seed: usize,
    pub radius_hint: f64,
}

impl SurfacePatch<'_> {
    pub fn points(&self) -> impl Iterator<Item = &Point3> + '_ {
        self.vertex_ids.iter().map(|&i| &self.mesh.vertices[i])
    }

    pub fn len(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_ids.is_empty()
    }
}

#[derive(PartialEq)]
struct Frontier {
    dist: f64,
    vertex: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Edge-length weighted graph distances from `seed`, truncated at `limit`.
pub fn graph_distances(mesh: &TriMesh, seed: usize, limit: f64) -> Vec<Option<f64>> {
    let adj = mesh.adjacency();
    let mut dist: Vec<Option<f64>> = vec![None; mesh.vertex_count()];
    let mut heap = BinaryHeap::new();
    dist[seed] = Some(0.0);
    heap.push(Frontier {
        dist: 0.0,
        vertex: seed,
    });
    while let Some(Frontier { dist: d, vertex }) = heap.pop() {
        if dist[vertex].is_some_and(|best| d > best) {
            continue;
        }
        for &(next, len) in &adj[vertex] {
            let nd = d + len;
            if nd > limit {
                continue;
            }
            if dist[next].is_none_or(|best| nd < best) {
                dist[next] = Some(nd);
                heap.push(Frontier {
                    dist: nd,
                    vertex: next,
                });
            }
        }
    }
    dist
}

/// Selects every vertex whose graph distance from `seed` is at most `radius_hint`.
pub fn select_patch(mesh: &TriMesh, seed: usize, radius_hint: f64) -> Result<SurfacePatch<'_>> {
    if seed >= mesh.vertex_count() {
        return Err(Error::Index(format!(
            "seed vertex {seed} out of range for {} vertices",
            mesh.vertex_count()
        )));
    }
    ensure(radius_hint.is_finite() && radius_hint > 0.0, || {
        format!("patch radius must be positive, got {radius_hint}")
    })?;
    let vertex_ids: Vec<usize> = graph_distances(mesh, seed, radius_hint)
        .iter()
        .enumerate()
        .filter_map(|(i, d)| d.map(|_| i))
        .collect();
    if vertex_ids.len() < MIN_PATCH_VERTICES {
        return Err(Error::InsufficientPatch {
            found: vertex_ids.len(),
            required: MIN_PATCH_VERTICES,
        });
    }
    Ok(SurfacePatch {
        mesh,
        vertex_ids,
        seed,
        radius_hint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn icosphere_cap() {
        let m = TriMesh::icosphere(1.0, 3);
        let p = select_patch(&m, 0, 0.5).unwrap();
        assert!(p.len() >= MIN_PATCH_VERTICES);
        assert!(p.vertex_ids.contains(&0));
        // Graph distance overestimates the geodesic, so everything lies inside the chord bound.
        for q in p.points() {
            assert!((q - m.vertices[0]).norm() <= 0.5 + 1e-12);
        }
    }

    #[test]
    fn tiny_radius_selects_only_seed() {
        let m = TriMesh::icosphere(1.0, 3);
        match select_patch(&m, 5, 1e-4).unwrap_err() {
            Error::InsufficientPatch { found, .. } => assert_eq!(found, 1),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn seed_out_of_range() {
        let m = TriMesh::icosphere(1.0, 1);
        assert!(matches!(select_patch(&m, 42, 0.5), Err(Error::Index(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn patch_grows_with_radius(seed in 0usize..642, r1 in 0.2f64..0.8, extra in 0.0f64..0.5) {
            let m = TriMesh::icosphere(1.0, 3);
            // Small radii around a valence-5 vertex can fall below the minimum patch.
            let small = select_patch(&m, seed, r1);
            prop_assume!(!matches!(small, Err(Error::InsufficientPatch { .. })));
            let small = small.unwrap();
            let large = select_patch(&m, seed, r1 + extra).unwrap();
            for v in &small.vertex_ids {
                prop_assert!(large.vertex_ids.binary_search(v).is_ok());
            }
        }
    }
}
