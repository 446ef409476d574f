//! Quadrilateral meshes, regular refinement, and global DOF numbering.
//!
//! Every mesh edge gets a global direction from its lower to its higher vertex
//! id. The element adjacent to an edge that is listed first owns the edge's
//! DOFs with sign +1; the other element's local modes receive the sign that
//! makes both traces agree. Signs are found by sampling the traces, so no
//! per-family parity table is needed.
//!
//! Text format:
//!
//! ```text
//! quadmesh v1
//! vertices <count>
//! x y
//! ...
//! elements <count>
//! v1 v2 v3 v4
//! ...
//! ```

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::geometry::{EdgeId, Point, Quadrilateral};
use crate::refbasis::{
    edge_trace, enumerate_modes, enumerate_scalar_modes, eval_scalar_mode, Entity, Mode, ScalarEntity, ScalarMode,
    SpectralOrder,
};

#[derive(Clone, Debug, PartialEq)]
pub struct MeshEdge {
    /// Lower and higher global vertex id; the global direction runs from the first to the second.
    pub vertices: [usize; 2],
    /// Adjacent elements with the local edge they see.
    pub elements: Vec<(usize, EdgeId)>,
}

impl MeshEdge {
    pub fn is_boundary(&self) -> bool {
        self.elements.len() == 1
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<Point>,
    elements: Vec<[usize; 4]>,
    quads: Vec<Quadrilateral>,
    edges: Vec<MeshEdge>,
    element_edges: Vec<[usize; 4]>,
}

impl PartialEq for Mesh {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.elements == other.elements
    }
}

impl Mesh {
    /// Builds connectivity and validates convexity and conformity.
    pub fn new(vertices: Vec<Point>, elements: Vec<[usize; 4]>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidMesh("mesh has no elements".into()));
        }
        let mut quads = Vec::with_capacity(elements.len());
        for (e, el) in elements.iter().enumerate() {
            if el.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidMesh(format!("element {e} references a missing vertex")));
            }
            let q = Quadrilateral::new(el.map(|v| vertices[v]))
                .map_err(|err| Error::InvalidMesh(format!("element {e}: {err}")))?;
            quads.push(q);
        }

        let mut lookup: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges: Vec<MeshEdge> = Vec::new();
        let mut directed: HashMap<[usize; 2], usize> = HashMap::new();
        let mut element_edges = Vec::with_capacity(elements.len());
        for (e, el) in elements.iter().enumerate() {
            let mut local = [0; 4];
            for edge in EdgeId::ALL {
                let [a, b] = edge.endpoints().map(|i| el[i]);
                if a == b {
                    return Err(Error::InvalidMesh(format!("element {e} repeats vertex {a}")));
                }
                // counterclockwise traversal of each edge must be unique
                let ccw = if edge.s_is_ccw() { [a, b] } else { [b, a] };
                if directed.insert(ccw, e).is_some() {
                    return Err(Error::InvalidMesh(format!(
                        "edge {ccw:?} traversed twice in the same direction (overlap or inverted element)"
                    )));
                }
                let key = [a.min(b), a.max(b)];
                let id = *lookup.entry(key).or_insert_with(|| {
                    edges.push(MeshEdge { vertices: key, elements: Vec::new() });
                    edges.len() - 1
                });
                edges[id].elements.push((e, edge));
                if edges[id].elements.len() > 2 {
                    return Err(Error::InvalidMesh(format!("edge {key:?} shared by more than two elements")));
                }
                local[edge.index()] = id;
            }
            element_edges.push(local);
        }

        // A conforming mesh of a domain with a manifold boundary has exactly two
        // boundary edges at every boundary vertex; hanging nodes break this.
        let mut boundary_degree = vec![0usize; vertices.len()];
        for edge in edges.iter().filter(|e| e.is_boundary()) {
            boundary_degree[edge.vertices[0]] += 1;
            boundary_degree[edge.vertices[1]] += 1;
        }
        if let Some(v) = boundary_degree.iter().position(|&d| d != 0 && d != 2) {
            return Err(Error::InvalidMesh(format!(
                "vertex {v} touches {} boundary edges: mesh is not conforming",
                boundary_degree[v]
            )));
        }
        Ok(Self { vertices, elements, quads, edges, element_edges })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn elements(&self) -> &[[usize; 4]] {
        &self.elements
    }

    pub fn quads(&self) -> &[Quadrilateral] {
        &self.quads
    }

    pub fn edges(&self) -> &[MeshEdge] {
        &self.edges
    }

    /// Global edge id of each local edge, indexed by [`EdgeId`].
    pub fn element_edges(&self, element: usize) -> [usize; 4] {
        self.element_edges[element]
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut out = vec![false; self.vertices.len()];
        for e in self.edges.iter().filter(|e| e.is_boundary()) {
            out[e.vertices[0]] = true;
            out[e.vertices[1]] = true;
        }
        out
    }

    /// Whether increasing s on the element's local edge follows the global edge direction.
    pub fn edge_aligned(&self, element: usize, edge: EdgeId) -> bool {
        let [a, b] = edge.endpoints().map(|i| self.elements[element][i]);
        a < b
    }

    /// Largest element diameter.
    pub fn max_diameter(&self) -> f64 {
        self.quads
            .iter()
            .map(|q| {
                let v = q.vertices();
                let d = |a: Point, b: Point| (a[0] - b[0]).hypot(a[1] - b[1]);
                d(v[0], v[2]).max(d(v[1], v[3]))
            })
            .fold(0.0, f64::max)
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "quadmesh v1")?;
        writeln!(w, "vertices {}", self.vertices.len())?;
        for p in &self.vertices {
            writeln!(w, "{:.16e} {:.16e}", p[0], p[1])?;
        }
        writeln!(w, "elements {}", self.elements.len())?;
        for e in &self.elements {
            writeln!(w, "{} {} {} {}", e[0], e[1], e[2], e[3])?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate().filter_map(|(i, l)| match l {
            Ok(s) if s.trim().is_empty() => None,
            other => Some((i + 1, other)),
        });
        let mut next = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((i, Ok(s))) => Ok((i, s)),
                Some((_, Err(e))) => Err(e.into()),
                None => Err(Error::Parse { line: 0, msg: format!("unexpected end of input, expected {what}") }),
            }
        };
        let (line, header) = next("header")?;
        if header.trim() != "quadmesh v1" {
            return Err(Error::Parse { line, msg: format!("bad header {header:?}") });
        }
        let count = |line: usize, s: &str, key: &str| -> Result<usize> {
            let mut it = s.split_whitespace();
            match (it.next(), it.next().map(str::parse::<usize>), it.next()) {
                (Some(k), Some(Ok(n)), None) if k == key => Ok(n),
                _ => Err(Error::Parse { line, msg: format!("expected `{key} <count>`") }),
            }
        };
        let (line, s) = next("vertex count")?;
        let nv = count(line, &s, "vertices")?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (line, s) = next("vertex")?;
            let v: Vec<f64> = s
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse { line, msg: format!("{e}") })?;
            if v.len() != 2 {
                return Err(Error::Parse { line, msg: "expected two coordinates".into() });
            }
            vertices.push([v[0], v[1]]);
        }
        let (line, s) = next("element count")?;
        let ne = count(line, &s, "elements")?;
        let mut elements = Vec::with_capacity(ne);
        for _ in 0..ne {
            let (line, s) = next("element")?;
            let v: Vec<usize> = s
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse { line, msg: format!("{e}") })?;
            if v.len() != 4 {
                return Err(Error::Parse { line, msg: "expected four vertex ids".into() });
            }
            elements.push([v[0], v[1], v[2], v[3]]);
        }
        Mesh::new(vertices, elements)
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn from_text(s: &str) -> Result<Self> {
        Self::read_text(s.as_bytes())
    }
}

fn grid(n: usize) -> (Vec<Point>, Vec<[usize; 4]>) {
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let h = 1.0 / n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 * h, j as f64 * h]);
        }
    }
    let mut elements = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            elements.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    (vertices, elements)
}

/// Uniform n×n mesh of the unit square; vertices row-major from the origin.
pub fn structured_square_mesh(n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidParameter("mesh needs n >= 1".into()));
    }
    let (v, e) = grid(n);
    Mesh::new(v, e)
}

/// SplitMix64: `state += 0x9E3779B97F4A7C15; z = state;
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9; z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
/// return z ^ (z >> 31)` with wrapping arithmetic.
#[derive(Clone, Debug)]
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Uniform mesh with interior vertices moved by up to `magnitude·h` per coordinate.
///
/// Offsets are `(2u − 1)·magnitude·h` with `u` from [`SplitMix64`] seeded by
/// `seed`, drawn x then y for each interior vertex in vertex order.
pub fn perturbed_quad_mesh(n: usize, magnitude: f64, seed: u64) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidParameter("mesh needs n >= 1".into()));
    }
    if !(0.0..0.25).contains(&magnitude) {
        return Err(Error::InvalidParameter(format!("perturbation magnitude {magnitude} not in [0, 0.25)")));
    }
    let (mut v, e) = grid(n);
    let h = 1.0 / n as f64;
    let mut rng = SplitMix64(seed);
    for j in 1..n {
        for i in 1..n {
            let p = &mut v[j * (n + 1) + i];
            p[0] += (2.0 * rng.next_f64() - 1.0) * magnitude * h;
            p[1] += (2.0 * rng.next_f64() - 1.0) * magnitude * h;
        }
    }
    Mesh::new(v, e)
}

/// Uniform mesh of (0,1)² without the quadrant [1/2,1)×[1/2,1).
pub fn lshape_mesh(n: usize) -> Result<Mesh> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::InvalidParameter(format!("L-shape mesh needs an even n >= 2, got {n}")));
    }
    let (v, e) = grid(n);
    let half = n / 2;
    let kept: Vec<[usize; 4]> =
        e.into_iter().enumerate().filter(|(k, _)| !(k % n >= half && k / n >= half)).map(|(_, el)| el).collect();
    let mut renumber = vec![usize::MAX; v.len()];
    let mut used = vec![false; v.len()];
    kept.iter().flatten().for_each(|&i| used[i] = true);
    let mut vertices = Vec::new();
    for (i, p) in v.into_iter().enumerate() {
        if used[i] {
            renumber[i] = vertices.len();
            vertices.push(p);
        }
    }
    Mesh::new(vertices, kept.into_iter().map(|el| el.map(|i| renumber[i])).collect())
}

/// Splits every element into four through its edge midpoints and mapped center.
///
/// Parent vertices keep their ids; midpoints follow in edge order, then centers.
pub fn refine(mesh: &Mesh) -> Result<Mesh> {
    let mut vertices = mesh.vertices.clone();
    let base = vertices.len();
    for e in &mesh.edges {
        let (a, b) = (mesh.vertices[e.vertices[0]], mesh.vertices[e.vertices[1]]);
        vertices.push([(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0]);
    }
    let centers = vertices.len();
    vertices.extend(mesh.quads.iter().map(|q| q.map_to_physical([0.0, 0.0])));
    let mut elements = Vec::with_capacity(4 * mesh.elements.len());
    for (k, el) in mesh.elements.iter().enumerate() {
        let ed = mesh.element_edges[k];
        let mid = |edge: EdgeId| base + ed[edge.index()];
        let (m12, m23, m34, m41) = (mid(EdgeId::G2), mid(EdgeId::G3), mid(EdgeId::G4), mid(EdgeId::G1));
        let c = centers + k;
        elements.push([el[0], m12, c, m41]);
        elements.push([m12, el[1], m23, c]);
        elements.push([c, m23, el[2], m34]);
        elements.push([m41, c, m34, el[3]]);
    }
    Mesh::new(vertices, elements)
}

/// Global numbering of vector (u) and scalar (p) DOFs.
#[derive(Clone, Debug, PartialEq)]
pub struct DofMap {
    pub order: SpectralOrder,
    pub modes: Vec<Mode>,
    pub scalar_modes: Vec<ScalarMode>,
    u_dofs: Vec<usize>,
    u_signs: Vec<f64>,
    p_dofs: Vec<usize>,
    p_signs: Vec<f64>,
    u_boundary: Vec<bool>,
    p_boundary: Vec<bool>,
    u_free: Vec<Option<usize>>,
    p_free: Vec<Option<usize>>,
    n_u_free: usize,
    n_p_free: usize,
}

/// Samples used to match edge traces between neighbours.
const SIGN_SAMPLES: [f64; 4] = [-0.71, -0.23, 0.37, 0.83];

/// Physical traces of a local vector mode on an element edge, as functions of the
/// global edge parameter t: (tangential along the global direction, curl).
pub fn global_edge_trace(mesh: &Mesh, element: usize, edge: EdgeId, mode: Mode, t: f64) -> (f64, f64) {
    let aligned = mesh.edge_aligned(element, edge);
    let s = if aligned { t } else { -t };
    let (tan, curl) = edge_trace(mode, &mesh.quads[element], edge, s).expect("enumerated modes are valid");
    let dir = if aligned == edge.s_is_ccw() { 1.0 } else { -1.0 };
    (dir * tan, curl)
}

fn scalar_edge_value(mesh: &Mesh, element: usize, edge: EdgeId, mode: ScalarMode, t: f64) -> f64 {
    let s = if mesh.edge_aligned(element, edge) { t } else { -t };
    let (m, n) = mode.indices();
    eval_scalar_mode(m, n, edge.ref_point(s)).expect("enumerated modes are valid").0
}

fn ratio_sign(owner: &[f64], other: &[f64]) -> Result<f64> {
    let num: f64 = owner.iter().zip(other).map(|(a, b)| a * b).sum();
    let den: f64 = owner.iter().map(|a| a * a).sum();
    let r = num / den;
    if (r.abs() - 1.0).abs() > 1e-8 || !r.is_finite() {
        return Err(Error::InvalidMesh(format!("edge traces do not match up to sign (ratio {r})")));
    }
    Ok(r.signum())
}

impl DofMap {
    pub fn n_u(&self) -> usize {
        self.n_u_free
    }

    pub fn n_p(&self) -> usize {
        self.n_p_free
    }

    pub fn n_u_total(&self) -> usize {
        self.u_boundary.len()
    }

    pub fn n_p_total(&self) -> usize {
        self.p_boundary.len()
    }

    pub fn u_boundary(&self) -> &[bool] {
        &self.u_boundary
    }

    pub fn p_boundary(&self) -> &[bool] {
        &self.p_boundary
    }

    /// Global u DOFs and signs of an element's local modes, in [`Self::modes`] order.
    pub fn element_u(&self, element: usize) -> (&[usize], &[f64]) {
        let k = self.modes.len();
        (&self.u_dofs[element * k..(element + 1) * k], &self.u_signs[element * k..(element + 1) * k])
    }

    pub fn element_p(&self, element: usize) -> (&[usize], &[f64]) {
        let k = self.scalar_modes.len();
        (&self.p_dofs[element * k..(element + 1) * k], &self.p_signs[element * k..(element + 1) * k])
    }

    /// Position of a global u DOF among the free unknowns.
    pub fn free_u(&self, global: usize) -> Option<usize> {
        self.u_free[global]
    }

    pub fn free_p(&self, global: usize) -> Option<usize> {
        self.p_free[global]
    }

    /// Local coefficients of an element from free-unknown values (boundary DOFs are zero).
    pub fn gather_u(&self, element: usize, free_values: &[f64]) -> Vec<f64> {
        let (dofs, signs) = self.element_u(element);
        dofs.iter().zip(signs).map(|(&g, &s)| self.u_free[g].map_or(0.0, |i| s * free_values[i])).collect()
    }
}

/// Numbers DOFs on `mesh` for `order`. With `homogeneous`, DOFs on the boundary
/// are masked out of the free set.
pub fn build_dof_map(mesh: &Mesh, order: SpectralOrder, homogeneous: bool) -> Result<DofMap> {
    let order = SpectralOrder::new(order.l, order.m, order.n)?;
    let modes = enumerate_modes(order);
    let scalar_modes = enumerate_scalar_modes(order);
    let nv = mesh.vertices.len();
    let boundary_vertex = mesh.boundary_vertices();

    // Vector DOFs: one per vertex, then edge slots in local enumeration order, then interiors.
    let edge_slots: Vec<_> = modes
        .iter()
        .filter_map(|m| match m.entity() {
            Entity::Edge(EdgeId::G1, slot) => Some(slot),
            _ => None,
        })
        .collect();
    let interior_u = modes.iter().filter(|m| m.entity() == Entity::Interior).count();
    let mut u_boundary = boundary_vertex.clone();
    let edge_u_base = nv;
    for e in &mesh.edges {
        u_boundary.extend(std::iter::repeat(e.is_boundary()).take(edge_slots.len()));
    }
    let interior_u_base = u_boundary.len();
    u_boundary.extend(std::iter::repeat(false).take(interior_u * mesh.num_elements()));

    let scalar_edge_slots: Vec<usize> = scalar_modes
        .iter()
        .filter_map(|m| match m.entity() {
            ScalarEntity::Edge(EdgeId::G1, k) => Some(k),
            _ => None,
        })
        .collect();
    let interior_p = scalar_modes.iter().filter(|m| m.entity() == ScalarEntity::Interior).count();
    let mut p_boundary = boundary_vertex;
    let edge_p_base = nv;
    for e in &mesh.edges {
        p_boundary.extend(std::iter::repeat(e.is_boundary()).take(scalar_edge_slots.len()));
    }
    let interior_p_base = p_boundary.len();
    p_boundary.extend(std::iter::repeat(false).take(interior_p * mesh.num_elements()));

    // Signs of non-owning elements, per (edge, slot).
    let mut u_edge_sign: HashMap<(usize, usize), f64> = HashMap::new();
    let mut p_edge_sign: HashMap<(usize, usize), f64> = HashMap::new();
    let local_u: HashMap<Entity, usize> = modes.iter().enumerate().map(|(i, m)| (m.entity(), i)).collect();
    let local_p: HashMap<ScalarEntity, usize> = scalar_modes.iter().enumerate().map(|(i, m)| (m.entity(), i)).collect();
    for (id, edge) in mesh.edges.iter().enumerate() {
        if let [(e0, l0), (e1, l1)] = edge.elements[..] {
            for (k, slot) in edge_slots.iter().enumerate() {
                let m0 = modes[local_u[&Entity::Edge(l0, *slot)]];
                let m1 = modes[local_u[&Entity::Edge(l1, *slot)]];
                let sample = |e, l, m| -> Vec<f64> {
                    SIGN_SAMPLES
                        .iter()
                        .flat_map(|&t| {
                            let (a, b) = global_edge_trace(mesh, e, l, m, t);
                            [a, b]
                        })
                        .collect()
                };
                u_edge_sign.insert((id, k), ratio_sign(&sample(e0, l0, m0), &sample(e1, l1, m1))?);
            }
            for (k, &slot) in scalar_edge_slots.iter().enumerate() {
                let m0 = scalar_modes[local_p[&ScalarEntity::Edge(l0, slot)]];
                let m1 = scalar_modes[local_p[&ScalarEntity::Edge(l1, slot)]];
                let a: Vec<f64> = SIGN_SAMPLES.iter().map(|&t| scalar_edge_value(mesh, e0, l0, m0, t)).collect();
                let b: Vec<f64> = SIGN_SAMPLES.iter().map(|&t| scalar_edge_value(mesh, e1, l1, m1, t)).collect();
                p_edge_sign.insert((id, k), ratio_sign(&a, &b)?);
            }
        }
    }

    let ne = mesh.num_elements();
    let mut u_dofs = Vec::with_capacity(ne * modes.len());
    let mut u_signs = Vec::with_capacity(ne * modes.len());
    let mut p_dofs = Vec::with_capacity(ne * scalar_modes.len());
    let mut p_signs = Vec::with_capacity(ne * scalar_modes.len());
    for e in 0..ne {
        let el = mesh.elements[e];
        let ed = mesh.element_edges[e];
        let owner_of = |edge: EdgeId| mesh.edges[ed[edge.index()]].elements[0].0 == e;
        let mut interior = 0;
        for m in &modes {
            let (dof, sign) = match m.entity() {
                Entity::Vertex(c) => (el[c.index()], 1.0),
                Entity::Edge(edge, slot) => {
                    let k = edge_slots.iter().position(|s| *s == slot).expect("slot listed");
                    let id = ed[edge.index()];
                    let sign = if owner_of(edge) { 1.0 } else { u_edge_sign[&(id, k)] };
                    (edge_u_base + id * edge_slots.len() + k, sign)
                }
                Entity::Interior => {
                    interior += 1;
                    (interior_u_base + e * interior_u + interior - 1, 1.0)
                }
            };
            u_dofs.push(dof);
            u_signs.push(sign);
        }
        let mut interior = 0;
        for m in &scalar_modes {
            let (dof, sign) = match m.entity() {
                ScalarEntity::Vertex(c) => (el[c.index()], 1.0),
                ScalarEntity::Edge(edge, slot) => {
                    let k = scalar_edge_slots.iter().position(|s| *s == slot).expect("slot listed");
                    let id = ed[edge.index()];
                    let sign = if owner_of(edge) { 1.0 } else { p_edge_sign[&(id, k)] };
                    (edge_p_base + id * scalar_edge_slots.len() + k, sign)
                }
                ScalarEntity::Interior => {
                    interior += 1;
                    (interior_p_base + e * interior_p + interior - 1, 1.0)
                }
            };
            p_dofs.push(dof);
            p_signs.push(sign);
        }
    }

    let number = |mask: &[bool]| -> (Vec<Option<usize>>, usize) {
        let mut next = 0;
        let map = mask
            .iter()
            .map(|&b| {
                if b && homogeneous {
                    None
                } else {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect();
        (map, next)
    };
    let (u_free, n_u_free) = number(&u_boundary);
    let (p_free, n_p_free) = number(&p_boundary);
    Ok(DofMap {
        order,
        modes,
        scalar_modes,
        u_dofs,
        u_signs,
        p_dofs,
        p_signs,
        u_boundary,
        p_boundary,
        u_free,
        p_free,
        n_u_free,
        n_p_free,
    })
}

/// Largest disagreement between the traces of any global vector basis function
/// seen from the two sides of an interior edge, over `samples` points per edge.
pub fn conformity_defect(mesh: &Mesh, dofmap: &DofMap, samples: usize) -> f64 {
    let mut worst: f64 = 0.0;
    let ts: Vec<f64> = (0..samples).map(|i| -1.0 + 2.0 * (i as f64 + 0.5) / samples as f64).collect();
    for edge in mesh.edges.iter().filter(|e| !e.is_boundary()) {
        let sides = [edge.elements[0], edge.elements[1]];
        let mut traces: HashMap<usize, [Vec<[f64; 2]>; 2]> = HashMap::new();
        for (side, &(e, local)) in sides.iter().enumerate() {
            let (dofs, signs) = dofmap.element_u(e);
            for (i, mode) in dofmap.modes.iter().enumerate() {
                let entry = traces.entry(dofs[i]).or_insert_with(|| [vec![[0.0; 2]; samples], vec![[0.0; 2]; samples]]);
                for (j, &t) in ts.iter().enumerate() {
                    let (a, b) = global_edge_trace(mesh, e, local, *mode, t);
                    entry[side][j][0] += signs[i] * a;
                    entry[side][j][1] += signs[i] * b;
                }
            }
        }
        for [left, right] in traces.values() {
            for (a, b) in left.iter().zip(right) {
                worst = worst.max((a[0] - b[0]).abs()).max((a[1] - b[1]).abs());
            }
        }
    }
    worst
}
