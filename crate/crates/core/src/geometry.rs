//! Convex quadrilaterals, the bilinear reference map and the contravariant
//! transforms for values, curls and curl-curls.
//!
//! Reference square [−1,1]² with corners P1=(−1,−1), P2=(1,−1), P3=(1,1),
//! P4=(−1,1). Edges follow the labeling used by the mode formulas:
//!
//! ```text
//!            G4 (ŷ = 1)
//!      P4 ------------- P3
//!       |               |
//!  G1   |               |  G3
//! (x̂=-1)|               | (x̂ = 1)
//!       |               |
//!      P1 ------------- P2
//!            G2 (ŷ = -1)
//! ```
//!
//! Edge lengths are indexed by edge: `lengths[0] = |P1P4|`, `lengths[1] = |P1P2|`,
//! `lengths[2] = |P2P3|`, `lengths[3] = |P3P4|`. Sines are indexed by corner.

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeId {
    G1,
    G2,
    G3,
    G4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Corner {
    P1,
    P2,
    P3,
    P4,
}

impl EdgeId {
    pub const ALL: [EdgeId; 4] = [EdgeId::G1, EdgeId::G2, EdgeId::G3, EdgeId::G4];

    pub fn index(self) -> usize {
        self as usize
    }

    /// 1-based edge label.
    pub fn from_label(label: usize) -> Result<EdgeId> {
        match label {
            1..=4 => Ok(Self::ALL[label - 1]),
            _ => Err(Error::InvalidParameter(format!("edge label {label} not in 1..=4"))),
        }
    }

    /// Reference point at coordinate `s` along the edge (`s` is ŷ on G1/G3 and x̂ on G2/G4).
    pub fn ref_point(self, s: f64) -> Point {
        match self {
            EdgeId::G1 => [-1.0, s],
            EdgeId::G2 => [s, -1.0],
            EdgeId::G3 => [1.0, s],
            EdgeId::G4 => [s, 1.0],
        }
    }

    /// Counterclockwise unit tangent on the reference square.
    pub fn ref_tangent(self) -> Point {
        match self {
            EdgeId::G1 => [0.0, -1.0],
            EdgeId::G2 => [1.0, 0.0],
            EdgeId::G3 => [0.0, 1.0],
            EdgeId::G4 => [-1.0, 0.0],
        }
    }

    /// Local vertices at s = −1 and s = +1.
    pub fn endpoints(self) -> [usize; 2] {
        match self {
            EdgeId::G1 => [0, 3],
            EdgeId::G2 => [0, 1],
            EdgeId::G3 => [1, 2],
            EdgeId::G4 => [3, 2],
        }
    }

    /// Whether increasing s runs counterclockwise around the element.
    pub fn s_is_ccw(self) -> bool {
        matches!(self, EdgeId::G2 | EdgeId::G3)
    }
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::P1, Corner::P2, Corner::P3, Corner::P4];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_label(label: usize) -> Result<Corner> {
        match label {
            1..=4 => Ok(Self::ALL[label - 1]),
            _ => Err(Error::InvalidParameter(format!("corner label {label} not in 1..=4"))),
        }
    }

    pub fn ref_point(self) -> Point {
        [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]][self.index()]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobianData {
    /// `b[i][j] = ∂x_i/∂x̂_j`.
    pub b: [[f64; 2]; 2],
    pub det: f64,
    pub b_inv_t: [[f64; 2]; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Quadrilateral {
    vertices: [Point; 4],
    lengths: [f64; 4],
    sines: [f64; 4],
}

#[inline]
fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

impl Quadrilateral {
    /// Validates counterclockwise order and strict convexity.
    pub fn new(vertices: [Point; 4]) -> Result<Self> {
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::NonConvex(format!("non-finite vertex in {vertices:?}")));
        }
        let sides: Vec<Point> = (0..4).map(|i| sub(vertices[(i + 1) % 4], vertices[i])).collect();
        let scale = sides.iter().map(|s| norm(*s)).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(Error::NonConvex("degenerate quadrilateral".into()));
        }
        for i in 0..4 {
            let c = cross(sides[i], sides[(i + 1) % 4]);
            if c < 1e-12 * scale * scale {
                return Err(Error::NonConvex(format!(
                    "turn at vertex {} has cross product {c:e}: {vertices:?}",
                    (i + 1) % 4 + 1
                )));
            }
        }
        let lengths = [norm(sub(vertices[3], vertices[0])), norm(sides[0]), norm(sides[1]), norm(sides[2])];
        let mut sines = [0.0; 4];
        for (i, s) in sines.iter_mut().enumerate() {
            let a = sub(vertices[(i + 1) % 4], vertices[i]);
            let b = sub(vertices[(i + 3) % 4], vertices[i]);
            *s = cross(a, b) / (norm(a) * norm(b));
        }
        Ok(Self { vertices, lengths, sines })
    }

    pub fn vertices(&self) -> &[Point; 4] {
        &self.vertices
    }

    /// Edge lengths indexed by [`EdgeId`] and corner sines indexed by [`Corner`].
    pub fn edge_geometry(&self) -> ([f64; 4], [f64; 4]) {
        (self.lengths, self.sines)
    }

    pub fn lengths(&self) -> &[f64; 4] {
        &self.lengths
    }

    pub fn sines(&self) -> &[f64; 4] {
        &self.sines
    }

    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        0.5 * cross(sub(v[2], v[0]), sub(v[3], v[1]))
    }

    pub fn map_to_physical(&self, r: Point) -> Point {
        let [x, y] = r;
        let s = [
            (1.0 - x) * (1.0 - y) / 4.0,
            (1.0 + x) * (1.0 - y) / 4.0,
            (1.0 + x) * (1.0 + y) / 4.0,
            (1.0 - x) * (1.0 + y) / 4.0,
        ];
        let v = &self.vertices;
        [
            s[0] * v[0][0] + s[1] * v[1][0] + s[2] * v[2][0] + s[3] * v[3][0],
            s[0] * v[0][1] + s[1] * v[1][1] + s[2] * v[2][1] + s[3] * v[3][1],
        ]
    }

    fn b_matrix(&self, r: Point) -> [[f64; 2]; 2] {
        let [x, y] = r;
        let v = &self.vertices;
        let col = |c: usize| {
            let d21 = v[1][c] - v[0][c];
            let d34 = v[2][c] - v[3][c];
            let d41 = v[3][c] - v[0][c];
            let d32 = v[2][c] - v[1][c];
            [
                d21 / 2.0 * (1.0 - y) / 2.0 + d34 / 2.0 * (1.0 + y) / 2.0,
                d41 / 2.0 * (1.0 - x) / 2.0 + d32 / 2.0 * (1.0 + x) / 2.0,
            ]
        };
        [col(0), col(1)]
    }

    pub fn jacobian(&self, r: Point) -> JacobianData {
        let b = self.b_matrix(r);
        let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
        let b_inv_t = [[b[1][1] / det, -b[1][0] / det], [-b[0][1] / det, b[0][0] / det]];
        JacobianData { b, det, b_inv_t }
    }

    /// detJ from the corner-weighted closed form.
    pub fn det_from_corners(&self, r: Point) -> f64 {
        let [x, y] = r;
        let l = &self.lengths;
        let s = &self.sines;
        let sig = [
            (1.0 - x) * (1.0 - y) / 4.0,
            (1.0 + x) * (1.0 - y) / 4.0,
            (1.0 + x) * (1.0 + y) / 4.0,
            (1.0 - x) * (1.0 + y) / 4.0,
        ];
        (l[1] * l[0] * s[0] * sig[0]
            + l[2] * l[1] * s[1] * sig[1]
            + l[3] * l[2] * s[2] * sig[2]
            + l[0] * l[3] * s[3] * sig[3])
            / 4.0
    }

    /// (x₁₂+x₃₄)/4 and (y₁₂+y₃₄)/4; both vanish on parallelograms.
    fn twist(&self) -> [f64; 2] {
        let v = &self.vertices;
        [(v[0][0] - v[1][0] + v[2][0] - v[3][0]) / 4.0, (v[0][1] - v[1][1] + v[2][1] - v[3][1]) / 4.0]
    }

    /// The geometric correction vector of the curl-curl transform, equal to (∂ŷJ, −∂x̂J).
    pub fn curl_curl_correction(&self, jac: &JacobianData) -> Point {
        let [a, c] = self.twist();
        let b = &jac.b;
        [a * b[1][1] - c * b[0][1], -c * b[0][0] + a * b[1][0]]
    }

    /// (∂x̂J, ∂ŷJ). J has no x̂ŷ term, so these are all the nonzero derivatives.
    pub fn det_gradient(&self, r: Point) -> Point {
        let jac = self.jacobian(r);
        let w = self.curl_curl_correction(&jac);
        [-w[1], w[0]]
    }

    pub fn push_forward(&self, r: Point, vhat: Point, curlhat: f64) -> (Point, f64) {
        let jac = self.jacobian(r);
        (apply(&jac.b_inv_t, vhat), curlhat / jac.det)
    }

    pub fn curl_curl_push_forward(&self, r: Point, curlhat: f64, grad_curlhat: Point) -> Point {
        let jac = self.jacobian(r);
        let w = self.curl_curl_correction(&jac);
        curl_curl_with(&jac, w, curlhat, grad_curlhat)
    }

    /// Physical tangential component along the counterclockwise tangent of `edge`,
    /// for a reference field value `vhat` at a point on that edge.
    pub fn tangential_trace(&self, edge: EdgeId, vhat: Point) -> f64 {
        let t = edge.ref_tangent();
        (vhat[0] * t[0] + vhat[1] * t[1]) / (self.lengths[edge.index()] / 2.0)
    }
}

#[inline]
pub(crate) fn apply(m: &[[f64; 2]; 2], v: Point) -> Point {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

#[inline]
pub(crate) fn curl_curl_with(jac: &JacobianData, w: Point, curlhat: f64, g: Point) -> Point {
    let inv = 1.0 / jac.det;
    let r = [(g[1] - curlhat * inv * w[0]) * inv * inv, (-g[0] - curlhat * inv * w[1]) * inv * inv];
    apply(&jac.b, r)
}

/// Small deterministic generator for sampled quads.
pub(crate) struct Lcg(pub u64);
impl Lcg {
    pub(crate) fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Seeded random convex quads obtained by jittering a rotated, scaled square.
pub fn random_convex_quads(count: usize, seed: u64) -> Vec<Quadrilateral> {
    let mut rng = Lcg(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let scale = 0.2 + 2.0 * rng.next();
        let theta = 6.0 * rng.next();
        let base = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
        let mut v = [[0.0; 2]; 4];
        for i in 0..4 {
            let px = base[i][0] + 0.7 * (rng.next() - 0.5);
            let py = base[i][1] + 0.7 * (rng.next() - 0.5);
            v[i] = [
                scale * (theta.cos() * px - theta.sin() * py) + rng.next(),
                scale * (theta.sin() * px + theta.cos() * py),
            ];
        }
        if let Ok(q) = Quadrilateral::new(v) {
            out.push(q);
        }
    }
    out
}
