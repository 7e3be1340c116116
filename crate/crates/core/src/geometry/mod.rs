//! Triangle meshes recovered by photogrammetry and the local geometric
//! quantities the estimators need: curvature radius of a convex patch and
//! enclosed volume.

mod fit;
mod mesh;
mod patch;
mod volume;

pub use fit::{fit_curvature, fit_sphere, CurvatureFit, NON_UNIFORM_RATIO};
pub use mesh::{load_mesh, parse_obj, Point3, TriMesh};
pub use patch::{graph_distances, select_patch, SurfacePatch, MIN_PATCH_VERTICES};
pub use volume::{enclosed_volume, signed_volume, EnclosedVolume};
