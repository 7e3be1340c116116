use super::mesh::TriMesh;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnclosedVolume {
    /// Absolute enclosed volume in cubic meters.
    pub volume: f64,
    /// Signed divergence-theorem sum; negative when faces point inward.
    pub signed_volume: f64,
}

impl EnclosedVolume {
    pub fn outward_oriented(&self) -> bool {
        self.signed_volume >= 0.0
    }
}

/// Signed volume `sum det(v0, v1, v2) / 6` without any topology check.
pub fn signed_volume(mesh: &TriMesh) -> f64 {
    mesh.faces
        .iter()
        .map(|&[a, b, c]| {
            let (p, q, r) = (&mesh.vertices[a], &mesh.vertices[b], &mesh.vertices[c]);
            p.dot(&q.cross(r))
        })
        .sum::<f64>()
        / 6.0
}

/// Volume enclosed by a closed, consistently oriented mesh.
pub fn enclosed_volume(mesh: &TriMesh) -> Result<EnclosedVolume> {
    mesh.ensure_watertight()?;
    let signed_volume = signed_volume(mesh);
    if signed_volume < 0.0 {
        log::warn!("mesh faces are oriented inward (signed volume {signed_volume:.6e})");
    }
    Ok(EnclosedVolume {
        volume: signed_volume.abs(),
        signed_volume,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::geometry::mesh::Point3;
    use proptest::prelude::*;

    #[test]
    fn unit_cube_is_exact() {
        let v = enclosed_volume(&TriMesh::unit_cube()).unwrap();
        assert!((v.volume - 1.0).abs() < 1e-12);
        assert!(v.outward_oriented());
    }

    #[test]
    fn icosphere_volume_within_one_percent() {
        let exact = 4.0 / 3.0 * std::f64::consts::PI;
        let v = enclosed_volume(&TriMesh::icosphere(1.0, 4)).unwrap().volume;
        assert!((v - exact).abs() / exact < 0.01, "{v}");
    }

    #[test]
    fn open_mesh_is_a_topology_error() {
        let mut m = TriMesh::icosphere(1.0, 2);
        m.faces.remove(7);
        match enclosed_volume(&m).unwrap_err() {
            Error::Topology { boundary_edges } => assert_eq!(boundary_edges.len(), 3),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn inverted_mesh_reports_sign() {
        let mut m = TriMesh::unit_cube();
        for f in m.faces.iter_mut() {
            f.swap(1, 2);
        }
        let v = enclosed_volume(&m).unwrap();
        assert!(!v.outward_oriented());
        assert!((v.volume - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn translation_invariant(x in -50.0f64..50.0, y in -50.0f64..50.0, z in -50.0f64..50.0) {
            let m = TriMesh::icosphere(1.0, 2);
            let v0 = enclosed_volume(&m).unwrap().volume;
            let v1 = enclosed_volume(&m.translated(Point3::new(x, y, z))).unwrap().volume;
            prop_assert!((v1 - v0).abs() / v0 < 1e-10);
        }
    }
}
