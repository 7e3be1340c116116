use serde::Serialize;

use super::scenario::Plane;
use super::state::SimState;
use crate::error::{Error, Result};
use crate::geometry::Point3;

/// Vertices closer than this to the ground count as touching it, m.
pub const CONTACT_TOLERANCE: f64 = 1e-4;

/// Shape measures of a ball pressed onto a ground plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Deformation {
    /// Extent along the ground normal.
    pub height: f64,
    /// Diameter of the ring bounding the sunken region at the top.
    pub upper_diameter: f64,
    /// Diameter of the contact patch.
    pub contact_diameter: f64,
    /// Rim height minus apex height.
    pub sunken_depth: f64,
}

struct Frame {
    heights: Vec<f64>,
    radial: Vec<f64>,
}

fn frame(state: &SimState, ground: &Plane) -> Frame {
    let n = ground.unit_normal();
    let c = state.mesh.centroid();
    let heights = state
        .mesh
        .vertices
        .iter()
        .map(|x| ground.height(x))
        .collect();
    let radial = state
        .mesh
        .vertices
        .iter()
        .map(|x| {
            let d = x - c;
            (d - n * d.dot(&n)).norm()
        })
        .collect();
    Frame { heights, radial }
}

pub fn height(state: &SimState, ground: &Plane) -> f64 {
    let h = frame(state, ground).heights;
    let (lo, hi) = h
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    hi - lo
}

/// Diameter of the set of vertices touching `ground`.
pub fn contact_diameter(state: &SimState, ground: &Plane) -> Result<f64> {
    let n = ground.unit_normal();
    let touching: Vec<Point3> = state
        .mesh
        .vertices
        .iter()
        .filter(|x| ground.height(x) <= CONTACT_TOLERANCE)
        .map(|x| x - n * x.dot(&n))
        .collect();
    if touching.is_empty() {
        return Err(Error::EmptyContact);
    }
    let mut best: f64 = 0.0;
    for i in 0..touching.len() {
        for j in i + 1..touching.len() {
            best = best.max((touching[i] - touching[j]).norm());
        }
    }
    Ok(best)
}

/// Measures `H`, `D_u`, `D_l` and `d` about the vertical axis through the
/// centroid. The apex is the upper vertex nearest the axis and the rim the
/// highest upper vertex.
pub fn measure_deformation(state: &SimState, ground: &Plane) -> Result<Deformation> {
    let f = frame(state, ground);
    let centroid_height = ground.height(&state.mesh.centroid());
    let upper: Vec<usize> = (0..f.heights.len())
        .filter(|&i| f.heights[i] > centroid_height)
        .collect();
    let apex = upper
        .iter()
        .copied()
        .min_by(|&a, &b| f.radial[a].total_cmp(&f.radial[b]))
        .ok_or_else(|| Error::Validation("no vertices above the centroid".into()))?;
    let rim = upper
        .iter()
        .copied()
        .max_by(|&a, &b| f.heights[a].total_cmp(&f.heights[b]))
        .expect("non-empty");
    Ok(Deformation {
        height: height(state, ground),
        upper_diameter: 2.0 * f.radial[rim],
        contact_diameter: contact_diameter(state, ground)?,
        sunken_depth: (f.heights[rim] - f.heights[apex]).max(0.0),
    })
}
