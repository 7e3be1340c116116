use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub type Point3 = Vector3<f64>;

/// Indexed triangle surface. Faces are counter-clockwise seen from outside.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Point3>,
    pub faces: Vec<[usize; 3]>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Point3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let n = vertices.len();
        for (fi, f) in faces.iter().enumerate() {
            if let Some(&bad) = f.iter().find(|&&i| i >= n) {
                return Err(Error::Index(format!(
                    "face {fi} references vertex {bad}, mesh has {n}"
                )));
            }
        }
        if let Some(i) = vertices
            .iter()
            .position(|v| !v.iter().all(|c| c.is_finite()))
        {
            return Err(Error::Validation(format!("vertex {i} is not finite")));
        }
        Ok(Self { vertices, faces })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn face_points(&self, f: usize) -> [Point3; 3] {
        let [a, b, c] = self.faces[f];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Area-weighted normal (half the edge cross product).
    pub fn face_area_vector(&self, f: usize) -> Point3 {
        let [a, b, c] = self.face_points(f);
        0.5 * (b - a).cross(&(c - a))
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.faces.len())
            .map(|f| self.face_area_vector(f).norm())
            .sum()
    }

    pub fn centroid(&self) -> Point3 {
        let sum = self.vertices.iter().fold(Point3::zeros(), |acc, v| acc + v);
        sum / self.vertices.len().max(1) as f64
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounds(&self) -> (Point3, Point3) {
        bounds_of(self.vertices.iter())
    }

    /// Unique undirected edges as `(lo, hi)` pairs, in first-seen order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut seen = HashMap::new();
        let mut out = Vec::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                if seen.insert(key, ()).is_none() {
                    out.push(key);
                }
            }
        }
        out
    }

    pub fn mean_edge_length(&self) -> f64 {
        let edges = self.edges();
        if edges.is_empty() {
            return 0.0;
        }
        edges
            .iter()
            .map(|&(a, b)| (self.vertices[a] - self.vertices[b]).norm())
            .sum::<f64>()
            / edges.len() as f64
    }

    /// Per-vertex neighbour lists with edge lengths.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.vertices.len()];
        for (a, b) in self.edges() {
            let len = (self.vertices[a] - self.vertices[b]).norm();
            adj[a].push((b, len));
            adj[b].push((a, len));
        }
        adj
    }

    /// Directed edges without a matching opposite edge, plus directed edges
    /// used more than once. Empty for a closed, consistently oriented
    /// 2-manifold.
    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &self.faces {
            for k in 0..3 {
                *count.entry((f[k], f[(k + 1) % 3])).or_default() += 1;
            }
        }
        let mut bad: Vec<(usize, usize)> = count
            .iter()
            .filter(|(&(a, b), &n)| n != 1 || count.get(&(b, a)).copied() != Some(1))
            .map(|(&e, _)| e)
            .collect();
        bad.sort_unstable();
        bad
    }

    pub fn is_watertight(&self) -> bool {
        !self.faces.is_empty() && self.boundary_edges().is_empty()
    }

    pub fn ensure_watertight(&self) -> Result<()> {
        let boundary_edges = self.boundary_edges();
        if boundary_edges.is_empty() && !self.faces.is_empty() {
            Ok(())
        } else {
            Err(Error::Topology { boundary_edges })
        }
    }

    pub fn translated(&self, t: Point3) -> Self {
        self.map_vertices(|v| v + t)
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map_vertices(|v| v * s)
    }

    pub fn map_vertices(&self, f: impl Fn(&Point3) -> Point3) -> Self {
        Self {
            vertices: self.vertices.iter().map(f).collect(),
            faces: self.faces.clone(),
        }
    }

    pub fn to_obj_string(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            writeln!(s, "v {} {} {}", v.x, v.y, v.z).unwrap();
        }
        for f in &self.faces {
            writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1).unwrap();
        }
        s
    }

    pub fn save_obj(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_obj_string()).map_err(|e| Error::io(path, e))
    }

    /// Geodesic sphere built by repeated midpoint subdivision of an
    /// icosahedron that has vertices on both poles of the z axis.
    pub fn icosphere(radius: f64, subdivisions: u32) -> Self {
        let z = 1.0 / 5f64.sqrt();
        let r = 2.0 * z;
        let mut verts = vec![Point3::new(0.0, 0.0, 1.0)];
        for k in 0..5 {
            let a = std::f64::consts::TAU * k as f64 / 5.0;
            verts.push(Point3::new(r * a.cos(), r * a.sin(), z));
        }
        for k in 0..5 {
            let a = std::f64::consts::TAU * (k as f64 + 0.5) / 5.0;
            verts.push(Point3::new(r * a.cos(), r * a.sin(), -z));
        }
        verts.push(Point3::new(0.0, 0.0, -1.0));
        let mut faces = Vec::with_capacity(20);
        for k in 0..5 {
            let (u0, u1) = (1 + k, 1 + (k + 1) % 5);
            let (l0, l1) = (6 + k, 6 + (k + 1) % 5);
            faces.push([0, u0, u1]);
            faces.push([u0, l0, u1]);
            faces.push([u1, l0, l1]);
            faces.push([11, l1, l0]);
        }
        let mut mesh = Self {
            vertices: verts,
            faces,
        };
        mesh.orient_outward_about(Point3::zeros());
        for _ in 0..subdivisions {
            mesh = mesh.subdivided_on_unit_sphere();
        }
        mesh.scaled(radius)
    }

    /// Axis-aligned unit cube `[0,1]^3` with 12 outward triangles.
    pub fn unit_cube() -> Self {
        let mut vertices = Vec::with_capacity(8);
        for i in 0..8 {
            vertices.push(Point3::new(
                (i & 1) as f64,
                ((i >> 1) & 1) as f64,
                ((i >> 2) & 1) as f64,
            ));
        }
        let quads = [
            [0, 2, 3, 1],
            [4, 5, 7, 6],
            [0, 1, 5, 4],
            [2, 6, 7, 3],
            [0, 4, 6, 2],
            [1, 3, 7, 5],
        ];
        let faces = quads
            .iter()
            .flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]])
            .collect();
        let mut mesh = Self { vertices, faces };
        mesh.orient_outward_about(Point3::new(0.5, 0.5, 0.5));
        mesh
    }

    /// Flips faces so their normals point away from `center`. Only valid
    /// for surfaces star-shaped about `center`.
    fn orient_outward_about(&mut self, center: Point3) {
        for f in self.faces.iter_mut() {
            let [a, b, c] = [
                self.vertices[f[0]],
                self.vertices[f[1]],
                self.vertices[f[2]],
            ];
            let n = (b - a).cross(&(c - a));
            if n.dot(&((a + b + c) / 3.0 - center)) < 0.0 {
                f.swap(1, 2);
            }
        }
    }

    fn subdivided_on_unit_sphere(&self) -> Self {
        let mut verts = self.vertices.clone();
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Point3>| -> usize {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                verts.push(((verts[a] + verts[b]) * 0.5).normalize());
                verts.len() - 1
            })
        };
        let mut faces = Vec::with_capacity(self.faces.len() * 4);
        for &[a, b, c] in &self.faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            faces.push([a, ab, ca]);
            faces.push([b, bc, ab]);
            faces.push([c, ca, bc]);
            faces.push([ab, bc, ca]);
        }
        Self {
            vertices: verts,
            faces,
        }
    }
}

pub(crate) fn bounds_of<'a>(points: impl Iterator<Item = &'a Point3>) -> (Point3, Point3) {
    let mut lo = Point3::repeat(f64::INFINITY);
    let mut hi = Point3::repeat(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

/// Reads the geometric subset of Wavefront OBJ: `v` and `f` records.
/// Polygons are fan-triangulated; texture/normal indices are ignored.
pub fn parse_obj(reader: impl Read) -> Result<TriMesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let line = line.trim();
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords: Vec<f64> = tokens
                    .take(3)
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::Parse {
                        line: lineno,
                        message: format!("bad vertex coordinate: {e}"),
                    })?;
                if coords.len() != 3 {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "vertex needs 3 coordinates".into(),
                    });
                }
                vertices.push(Point3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let mut poly = Vec::new();
                for t in tokens {
                    let head = t.split('/').next().unwrap_or("");
                    let raw: i64 = head.parse().map_err(|_| Error::Parse {
                        line: lineno,
                        message: format!("bad face index `{t}`"),
                    })?;
                    let n = vertices.len() as i64;
                    let resolved = match raw {
                        0 => {
                            return Err(Error::Index(format!(
                                "line {lineno}: face index 0 is invalid (OBJ indices are 1-based)"
                            )))
                        }
                        i if i > 0 => i - 1,
                        i => n + i,
                    };
                    if resolved < 0 || resolved >= n {
                        return Err(Error::Index(format!(
                            "line {lineno}: face index {raw} out of range for {n} vertices"
                        )));
                    }
                    poly.push(resolved as usize);
                }
                if poly.len() < 3 {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!(
                            "face with {} vertices cannot be triangulated",
                            poly.len()
                        ),
                    });
                }
                for k in 1..poly.len() - 1 {
                    faces.push([poly[0], poly[k], poly[k + 1]]);
                }
            }
            _ => {}
        }
    }
    TriMesh::new(vertices, faces)
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriMesh> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_obj(file)
}
