//! Vector modes of the H(curl²)-conforming element and the companion scalar
//! modes, evaluated on the reference square.
//!
//! Vector modes are built from the generalized Jacobi families:
//!
//! * interior gradients `∇̂[K11_m(x̂) K11_n(ŷ)]` and interior solenoidal-type modes
//!   `(K22_m'(x̂) K22_n(ŷ), 0)` or `(0, K22_m(x̂) K22_2'(ŷ))`;
//! * function-edge modes, gradients carrying a tangential trace on one edge,
//!   plus one low-order non-gradient mode per edge;
//! * curl-edge modes, `J(x̂,ŷ)` times a reference field whose curl trace lives on one edge;
//! * one vertex mode per corner whose curl trace is the hat function of that corner.
//!
//! Curl-edge and vertex modes depend on the element geometry, so evaluation
//! always takes the [`Quadrilateral`].

use crate::error::{Error, Result};
pub use crate::geometry::{Corner, EdgeId};
use crate::geometry::{Point, Quadrilateral};
use crate::orthopoly::{k11_jet, k22_jet, Jet, MAX_INDEX};

/// Polynomial orders (L, M, N) of the interior gradient, function-edge and curl parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpectralOrder {
    pub l: usize,
    pub m: usize,
    pub n: usize,
}

impl SpectralOrder {
    pub fn new(l: usize, m: usize, n: usize) -> Result<Self> {
        let ok =
            (l >= 3 && m >= 3 && n >= 3 && l.max(m).max(n) <= MAX_INDEX) || (l == m && m == n && (l == 1 || l == 2));
        if !ok {
            return Err(Error::InvalidOrder { l, m, n });
        }
        Ok(Self { l, m, n })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(n, n, n)
    }

    /// The two reduced spaces with eight and thirteen modes.
    pub fn is_lowest(&self) -> bool {
        self.n <= 2
    }

    /// Largest 1D polynomial index touched by the modes of this order.
    pub fn max_index(&self) -> usize {
        self.l.max(self.m).max(self.n).max(3)
    }

    /// Number of function-edge slots per edge, the low mode included.
    pub fn function_edge_count(&self) -> usize {
        self.m
    }

    /// Curl-edge indices per edge: 2 and 4..=N.
    pub fn curl_edge_indices(&self) -> Vec<usize> {
        if self.is_lowest() {
            Vec::new()
        } else {
            std::iter::once(2).chain(4..=self.n).collect()
        }
    }

    pub fn interior_count(&self) -> usize {
        match self.n {
            1 => 0,
            2 => 1,
            n => (self.l - 1).pow(2) + (n - 1) * (n - 3),
        }
    }
}

impl std::fmt::Display for SpectralOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.l, self.m, self.n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    InteriorPhi {
        m: usize,
        n: usize,
    },
    InteriorPsi {
        m: usize,
        n: usize,
    },
    /// Gradient function-edge mode of index k ≥ 2.
    FunctionEdge {
        edge: EdgeId,
        k: usize,
    },
    FunctionEdgeLow {
        edge: EdgeId,
    },
    TildeFunctionEdgeLow {
        edge: EdgeId,
    },
    /// Curl-edge mode of index k ∈ {2, 4, 5, ...}.
    CurlEdge {
        edge: EdgeId,
        k: usize,
    },
    Vertex {
        corner: Corner,
    },
    TildeVertex {
        corner: Corner,
    },
}

/// Where a mode's global degree of freedom lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Entity {
    Interior,
    Edge(EdgeId, EdgeSlot),
    Vertex(Corner),
}

/// Identifies a mode within the set attached to one edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeSlot {
    /// Function-edge index; 1 is the low-order mode.
    Function(usize),
    Curl(usize),
}

impl Mode {
    /// The (m, n) index pair of the tensor-product labeling.
    pub fn indices(&self) -> (usize, usize) {
        use EdgeId::*;
        match *self {
            Mode::InteriorPhi { m, n } | Mode::InteriorPsi { m, n } => (m, n),
            Mode::FunctionEdge { edge, k } => match edge {
                G1 => (0, k),
                G2 => (k, 0),
                G3 => (1, k),
                G4 => (k, 1),
            },
            Mode::FunctionEdgeLow { edge } | Mode::TildeFunctionEdgeLow { edge } => match edge {
                G1 => (0, 0),
                G2 => (1, 0),
                G3 => (1, 1),
                G4 => (0, 1),
            },
            Mode::CurlEdge { edge, k } => match edge {
                G1 => (1, k),
                G2 => (k, 1),
                G3 => (3, k),
                G4 => (k, 3),
            },
            Mode::Vertex { corner } | Mode::TildeVertex { corner } => match corner {
                Corner::P1 => (0, 0),
                Corner::P2 => (0, 1),
                Corner::P3 => (1, 1),
                Corner::P4 => (1, 0),
            },
        }
    }

    pub fn entity(&self) -> Entity {
        match *self {
            Mode::InteriorPhi { .. } | Mode::InteriorPsi { .. } => Entity::Interior,
            Mode::FunctionEdge { edge, k } => Entity::Edge(edge, EdgeSlot::Function(k)),
            Mode::FunctionEdgeLow { edge } | Mode::TildeFunctionEdgeLow { edge } => {
                Entity::Edge(edge, EdgeSlot::Function(1))
            }
            Mode::CurlEdge { edge, k } => Entity::Edge(edge, EdgeSlot::Curl(k)),
            Mode::Vertex { corner } | Mode::TildeVertex { corner } => Entity::Vertex(corner),
        }
    }

    /// Modes that are reference gradients, hence curl-free after the transform.
    pub fn is_gradient(&self) -> bool {
        matches!(self, Mode::InteriorPhi { .. } | Mode::FunctionEdge { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidMode(msg));
        let cap = |v: usize| v <= MAX_INDEX;
        match *self {
            Mode::InteriorPhi { m, n } if !(m >= 2 && n >= 2 && cap(m) && cap(n)) => bad(format!("{self:?}")),
            Mode::InteriorPsi { m, n } => {
                let ok = ((m == 2 || m >= 4) && n >= 4) || (m >= 4 && n == 2);
                if ok && cap(m) && cap(n) {
                    Ok(())
                } else {
                    bad(format!("{self:?}"))
                }
            }
            Mode::FunctionEdge { k, .. } if !(k >= 2 && cap(k)) => bad(format!("{self:?}")),
            Mode::CurlEdge { k, .. } if !((k == 2 || k >= 4) && cap(k)) => bad(format!("{self:?}")),
            _ => Ok(()),
        }
    }

    fn max_index(&self) -> usize {
        let (m, n) = self.indices();
        m.max(n).max(3)
    }
}

/// Modes of the local space in the canonical order: interior, then edges G1..G4
/// (function modes then curl modes), then vertices.
pub fn enumerate_modes(order: SpectralOrder) -> Vec<Mode> {
    let SpectralOrder { l, m, n } = SpectralOrder::new(order.l, order.m, order.n).expect("validated order");
    let mut out = Vec::new();
    if order.is_lowest() {
        if n == 2 {
            out.push(Mode::InteriorPhi { m: 2, n: 2 });
        }
        for edge in EdgeId::ALL {
            out.push(Mode::FunctionEdgeLow { edge });
            if n == 2 {
                out.push(Mode::FunctionEdge { edge, k: 2 });
            }
        }
        out.extend(Corner::ALL.map(|corner| Mode::TildeVertex { corner }));
        return out;
    }
    for a in 2..=l {
        for b in 2..=l {
            out.push(Mode::InteriorPhi { m: a, n: b });
        }
    }
    for a in 2..=n {
        if a == 3 {
            continue;
        }
        if a >= 4 {
            out.push(Mode::InteriorPsi { m: a, n: 2 });
        }
        for b in 4..=n {
            out.push(Mode::InteriorPsi { m: a, n: b });
        }
    }
    let curl = order.curl_edge_indices();
    for edge in EdgeId::ALL {
        out.push(Mode::FunctionEdgeLow { edge });
        out.extend((2..=m).map(|k| Mode::FunctionEdge { edge, k }));
        out.extend(curl.iter().map(|&k| Mode::CurlEdge { edge, k }));
    }
    out.extend(Corner::ALL.map(|corner| Mode::Vertex { corner }));
    out
}

/// Reference value, curl and curl gradient of a vector mode.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ModeEval {
    pub value: Point,
    pub curl: f64,
    pub curl_grad: Point,
}

/// Value, Jacobian, curl and curl gradient of a reference field.
#[derive(Clone, Copy, Debug, Default)]
struct Acc {
    v: [f64; 2],
    dv: [[f64; 2]; 2],
    curl: f64,
    cg: [f64; 2],
}

impl Acc {
    /// Adds c·a(x̂)b(ŷ) to component `comp`.
    #[inline]
    fn term(&mut self, comp: usize, c: f64, a: &Jet, b: &Jet) {
        let (a0, a1, a2) = (a.d(0), a.d(1), a.d(2));
        let (b0, b1, b2) = (b.d(0), b.d(1), b.d(2));
        self.v[comp] += c * a0 * b0;
        self.dv[comp][0] += c * a1 * b0;
        self.dv[comp][1] += c * a0 * b1;
        if comp == 0 {
            self.curl -= c * a0 * b1;
            self.cg[0] -= c * a1 * b1;
            self.cg[1] -= c * a0 * b2;
        } else {
            self.curl += c * a1 * b0;
            self.cg[0] += c * a2 * b0;
            self.cg[1] += c * a1 * b1;
        }
    }

    /// Adds c·∇̂[a(x̂)b(ŷ)].
    #[inline]
    fn grad(&mut self, c: f64, a: &Jet, b: &Jet) {
        self.term(0, c, &a.shift(), b);
        self.term(1, c, a, &b.shift());
    }

    fn eval(&self) -> ModeEval {
        ModeEval { value: self.v, curl: self.curl, curl_grad: self.cg }
    }
}

/// 1D jets of both generalized families in x̂ and ŷ at one reference point.
#[derive(Clone, Debug)]
pub struct PointJets {
    pub point: Point,
    pub k11: [Vec<Jet>; 2],
    pub k22: [Vec<Jet>; 2],
}

impl PointJets {
    pub fn new(point: Point, max_index: usize) -> Self {
        let max_index = max_index.max(3);
        let fam = |f: fn(usize, f64) -> Jet, z: f64| (0..=max_index).map(|k| f(k, z)).collect::<Vec<_>>();
        Self {
            point,
            k11: [fam(k11_jet, point[0]), fam(k11_jet, point[1])],
            k22: [fam(k22_jet, point[0]), fam(k22_jet, point[1])],
        }
    }
}

// t(t² − 1) and (3t² − 5)/32, the building blocks of the low-order edge modes.
const CUBIC_ODD: [f64; 4] = [0.0, -1.0, 0.0, 1.0];
const LOW_QUAD: [f64; 3] = [-5.0 / 32.0, 0.0, 3.0 / 32.0];

/// Geometry-dependent coefficients of the vertex modes and their tilde corrections.
#[derive(Clone, Debug)]
pub struct ElementBasis<'a> {
    quad: &'a Quadrilateral,
    /// Per corner: first component = py(ŷ)·qx(x̂), second = qy(ŷ)·px(x̂).
    vertex: [VertexPoly; 4],
    /// Per corner: coefficients of ∇̂[K11_2 K11_3] and ∇̂[K11_3 K11_2] in the tilde mode.
    tilde: [[f64; 2]; 4],
}

#[derive(Clone, Copy, Debug)]
struct VertexPoly {
    first_y: [f64; 4],
    first_x: [f64; 3],
    second_x: [f64; 4],
    second_y: [f64; 3],
}

/// Coefficients of (t + r)(a t + b).
fn linear_product(r: f64, a: f64, b: f64) -> [f64; 3] {
    [b * r, b + a * r, a]
}

impl<'a> ElementBasis<'a> {
    pub fn new(quad: &'a Quadrilateral) -> Self {
        let ([l1, l2, l3, l4], [s1, s2, s3, s4]) = quad.edge_geometry();
        let c = 1.0 / 128.0;
        let low_bump = [1.0, -1.0, -1.0, 1.0]; // (t−1)²(t+1)
        let high_bump = [1.0, 1.0, -1.0, -1.0]; // (t+1)²(1−t)
        let neg = |p: [f64; 4]| p.map(|v| -v);
        let vertex = [
            VertexPoly {
                first_y: low_bump,
                first_x: linear_product(
                    -1.0,
                    c * l2 * (l1 * s1 + 2.0 * l3 * s2),
                    c * l2 * (3.0 * l1 * s1 + 2.0 * l3 * s2),
                ),
                second_x: neg(low_bump),
                second_y: linear_product(
                    -1.0,
                    c * l1 * (l2 * s1 + 2.0 * l4 * s4),
                    c * l1 * (3.0 * l2 * s1 + 2.0 * l4 * s4),
                ),
            },
            VertexPoly {
                first_y: low_bump,
                first_x: linear_product(
                    1.0,
                    c * l2 * (2.0 * l1 * s1 + l3 * s2),
                    -c * l2 * (2.0 * l1 * s1 + 3.0 * l3 * s2),
                ),
                second_x: high_bump,
                second_y: linear_product(
                    -1.0,
                    c * l3 * (l2 * s2 + 2.0 * l4 * s3),
                    c * l3 * (3.0 * l2 * s2 + 2.0 * l4 * s3),
                ),
            },
            VertexPoly {
                first_y: high_bump,
                first_x: linear_product(
                    1.0,
                    -c * l4 * (2.0 * l1 * s4 + l3 * s3),
                    c * l4 * (2.0 * l1 * s4 + 3.0 * l3 * s3),
                ),
                second_x: high_bump,
                second_y: linear_product(
                    1.0,
                    c * l3 * (2.0 * l2 * s2 + l4 * s3),
                    -c * l3 * (2.0 * l2 * s2 + 3.0 * l4 * s3),
                ),
            },
            VertexPoly {
                first_y: high_bump,
                first_x: linear_product(
                    -1.0,
                    -c * l4 * (l1 * s4 + 2.0 * l3 * s3),
                    -c * l4 * (3.0 * l1 * s4 + 2.0 * l3 * s3),
                ),
                second_x: low_bump,
                second_y: linear_product(
                    1.0,
                    -c * l1 * (2.0 * l2 * s1 + l4 * s4),
                    c * l1 * (2.0 * l2 * s1 + 3.0 * l4 * s4),
                ),
            },
        ];
        let (a1, a2, a3, a4) = (s1 * l1 * l2, s2 * l2 * l3, s3 * l3 * l4, s4 * l4 * l1);
        let tilde = [
            [-(2.0 * a1 + a4) / 48.0, (2.0 * a1 + a2) / 48.0],
            [(2.0 * a2 + a3) / 48.0, (2.0 * a2 + a1) / 48.0],
            [(2.0 * a3 + a2) / 48.0, -(2.0 * a3 + a4) / 48.0],
            [-(2.0 * a4 + a1) / 48.0, -(2.0 * a4 + a3) / 48.0],
        ];
        Self { quad, vertex, tilde }
    }

    pub fn quad(&self) -> &Quadrilateral {
        self.quad
    }

    /// Evaluates a mode from precomputed jets. The mode must be valid and its
    /// indices must not exceed the jets' range.
    pub fn eval(&self, mode: &Mode, jets: &PointJets) -> ModeEval {
        let [x, y] = jets.point;
        let (k11x, k11y) = (&jets.k11[0], &jets.k11[1]);
        let (k22x, k22y) = (&jets.k22[0], &jets.k22[1]);
        let mut acc = Acc::default();
        match *mode {
            Mode::InteriorPhi { .. } | Mode::FunctionEdge { .. } => {
                let (m, n) = mode.indices();
                acc.grad(1.0, &k11x[m], &k11y[n]);
                acc.curl = 0.0;
                acc.cg = [0.0, 0.0];
            }
            Mode::InteriorPsi { m, n } => {
                if n == 2 {
                    acc.term(1, 1.0, &k22x[m], &k22y[2].shift());
                } else {
                    acc.term(0, 1.0, &k22x[m].shift(), &k22y[n]);
                }
            }
            Mode::FunctionEdgeLow { edge } => low_edge(&mut acc, edge, x, y),
            Mode::TildeFunctionEdgeLow { edge } => tilde_low_edge(&mut acc, edge, x, y),
            Mode::CurlEdge { edge, k } => {
                let mut g = Acc::default();
                match edge {
                    EdgeId::G1 => g.term(1, 1.0, &k22x[1], &k22y[k].shift()),
                    EdgeId::G2 => g.term(0, 1.0, &k22x[k].shift(), &k22y[1]),
                    EdgeId::G3 => g.term(1, 1.0, &k22x[3], &k22y[k].shift()),
                    EdgeId::G4 => g.term(0, 1.0, &k22x[k].shift(), &k22y[3]),
                }
                let jac = self.quad.jacobian(jets.point);
                let [jx, jy] = self.quad.det_gradient(jets.point);
                let j = jac.det;
                acc.v = [j * g.v[0], j * g.v[1]];
                acc.curl = j * g.curl + jx * g.v[1] - jy * g.v[0];
                acc.cg = [
                    jx * g.curl + j * g.cg[0] + jx * g.dv[1][0] - jy * g.dv[0][0],
                    jy * g.curl + j * g.cg[1] + jx * g.dv[1][1] - jy * g.dv[0][1],
                ];
            }
            Mode::Vertex { corner } => self.vertex_mode(&mut acc, corner, x, y),
            Mode::TildeVertex { corner } => {
                self.vertex_mode(&mut acc, corner, x, y);
                let [c23, c32] = self.tilde[corner.index()];
                let mut g = Acc::default();
                g.grad(c23, &k11x[2], &k11y[3]);
                g.grad(c32, &k11x[3], &k11y[2]);
                acc.v[0] += g.v[0];
                acc.v[1] += g.v[1];
            }
        }
        acc.eval()
    }

    fn vertex_mode(&self, acc: &mut Acc, corner: Corner, x: f64, y: f64) {
        let p = &self.vertex[corner.index()];
        acc.term(0, 1.0, &Jet::poly(&p.first_x, x), &Jet::poly(&p.first_y, y));
        acc.term(1, 1.0, &Jet::poly(&p.second_x, x), &Jet::poly(&p.second_y, y));
    }
}

fn low_edge(acc: &mut Acc, edge: EdgeId, x: f64, y: f64) {
    let ax = Jet::poly(&CUBIC_ODD, x);
    let ay = Jet::poly(&CUBIC_ODD, y);
    let bx = Jet::poly(&LOW_QUAD, x);
    let by = Jet::poly(&LOW_QUAD, y);
    let one = Jet::ONE;
    // (±A(ŷ)B(x̂), ∓A(x̂)B(ŷ)) plus a linear correction
    match edge {
        EdgeId::G1 => {
            acc.term(0, 1.0, &bx, &ay);
            acc.term(1, -1.0, &ax, &by);
            acc.term(1, -0.25, &Jet::poly(&[-1.0, 1.0], x), &one);
        }
        EdgeId::G2 => {
            acc.term(0, -1.0, &bx, &ay);
            acc.term(0, -0.25, &one, &Jet::poly(&[-1.0, 1.0], y));
            acc.term(1, 1.0, &ax, &by);
        }
        EdgeId::G3 => {
            acc.term(0, -1.0, &bx, &ay);
            acc.term(1, 1.0, &ax, &by);
            acc.term(1, 0.25, &Jet::poly(&[1.0, 1.0], x), &one);
        }
        EdgeId::G4 => {
            acc.term(0, 1.0, &bx, &ay);
            acc.term(0, 0.25, &one, &Jet::poly(&[1.0, 1.0], y));
            acc.term(1, -1.0, &ax, &by);
        }
    }
}

fn tilde_low_edge(acc: &mut Acc, edge: EdgeId, x: f64, y: f64) {
    let one = Jet::ONE;
    let cubic = |t: f64| Jet::poly(&CUBIC_ODD, t);
    let sq = |t: f64| Jet::poly(&[-1.0, 0.0, 1.0], t);
    let up = [2.0, -3.0, 0.0, 1.0]; // (t+2)(t−1)²
    let down = [-2.0, -3.0, 0.0, 1.0]; // (t−2)(t+1)²
    match edge {
        EdgeId::G1 => {
            acc.term(0, 3.0 / 16.0, &sq(x), &cubic(y));
            acc.term(1, 1.0 / 8.0, &Jet::poly(&up, x), &one);
        }
        EdgeId::G2 => {
            acc.term(0, 1.0 / 8.0, &one, &Jet::poly(&up, y));
            acc.term(1, 3.0 / 16.0, &cubic(x), &sq(y));
        }
        EdgeId::G3 => {
            acc.term(0, -3.0 / 16.0, &sq(x), &cubic(y));
            acc.term(1, -1.0 / 8.0, &Jet::poly(&down, x), &one);
        }
        EdgeId::G4 => {
            acc.term(0, -1.0 / 8.0, &one, &Jet::poly(&down, y));
            acc.term(1, -3.0 / 16.0, &cubic(x), &sq(y));
        }
    }
}

/// Evaluates one vector mode at a reference point.
pub fn eval_mode(mode: Mode, quad: &Quadrilateral, refpt: Point) -> Result<ModeEval> {
    mode.validate()?;
    let jets = PointJets::new(refpt, mode.max_index());
    Ok(ElementBasis::new(quad).eval(&mode, &jets))
}

/// Alternative vertex mode: the vertex mode plus interior gradient corrections.
pub fn tilde_vertex_mode(corner: Corner, quad: &Quadrilateral, refpt: Point) -> ModeEval {
    let jets = PointJets::new(refpt, 3);
    ElementBasis::new(quad).eval(&Mode::TildeVertex { corner }, &jets)
}

/// Physical tangential trace (along the counterclockwise tangent) and physical
/// curl of a mode on `edge` at reference coordinate `s` (ŷ on G1/G3, x̂ on G2/G4).
pub fn edge_trace(mode: Mode, quad: &Quadrilateral, edge: EdgeId, s: f64) -> Result<(f64, f64)> {
    let r = edge.ref_point(s);
    let ev = eval_mode(mode, quad, r)?;
    Ok((quad.tangential_trace(edge, ev.value), ev.curl / quad.jacobian(r).det))
}

/// Scalar tensor-product mode K11_m(x̂) K11_n(ŷ): value and reference gradient.
pub fn eval_scalar_mode(m: usize, n: usize, refpt: Point) -> Result<(f64, Point)> {
    if m > MAX_INDEX || n > MAX_INDEX {
        return Err(Error::InvalidMode(format!("scalar mode ({m},{n}) beyond index cap")));
    }
    let a = k11_jet(m, refpt[0]);
    let b = k11_jet(n, refpt[1]);
    Ok((a.value() * b.value(), [a.d(1) * b.value(), a.value() * b.d(1)]))
}

/// Scalar modes of the multiplier space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScalarMode {
    Interior { m: usize, n: usize },
    Edge { edge: EdgeId, k: usize },
    Vertex { corner: Corner },
}

/// Where a scalar mode's degree of freedom lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScalarEntity {
    Interior,
    Edge(EdgeId, usize),
    Vertex(Corner),
}

impl ScalarMode {
    pub fn indices(&self) -> (usize, usize) {
        match *self {
            ScalarMode::Interior { m, n } => (m, n),
            ScalarMode::Edge { edge, k } => match edge {
                EdgeId::G1 => (0, k),
                EdgeId::G2 => (k, 0),
                EdgeId::G3 => (1, k),
                EdgeId::G4 => (k, 1),
            },
            ScalarMode::Vertex { corner } => match corner {
                Corner::P1 => (0, 0),
                Corner::P2 => (1, 0),
                Corner::P3 => (1, 1),
                Corner::P4 => (0, 1),
            },
        }
    }

    pub fn entity(&self) -> ScalarEntity {
        match *self {
            ScalarMode::Interior { .. } => ScalarEntity::Interior,
            ScalarMode::Edge { edge, k } => ScalarEntity::Edge(edge, k),
            ScalarMode::Vertex { corner } => ScalarEntity::Vertex(corner),
        }
    }

    /// Expansion of the reference gradient in vector modes.
    pub fn gradient_expansion(&self) -> Vec<(Mode, f64)> {
        use EdgeId::*;
        let low = |edge| Mode::FunctionEdgeLow { edge };
        match *self {
            ScalarMode::Interior { m, n } => vec![(Mode::InteriorPhi { m, n }, 1.0)],
            ScalarMode::Edge { edge, k } => vec![(Mode::FunctionEdge { edge, k }, 1.0)],
            ScalarMode::Vertex { corner } => match corner {
                Corner::P1 => vec![(low(G1), -1.0), (low(G2), -1.0)],
                Corner::P2 => vec![(low(G2), 1.0), (low(G3), -1.0)],
                Corner::P3 => vec![(low(G3), 1.0), (low(G4), 1.0)],
                Corner::P4 => vec![(low(G1), 1.0), (low(G4), -1.0)],
            },
        }
    }
}

/// Scalar modes of order (L, M): interior, then edges G1..G4, then vertices.
pub fn enumerate_scalar_modes(order: SpectralOrder) -> Vec<ScalarMode> {
    let (l, m) = (order.l, order.m);
    let mut out = Vec::new();
    for a in 2..=l {
        for b in 2..=l {
            out.push(ScalarMode::Interior { m: a, n: b });
        }
    }
    for edge in EdgeId::ALL {
        out.extend((2..=m).map(|k| ScalarMode::Edge { edge, k }));
    }
    out.extend(Corner::ALL.map(|corner| ScalarMode::Vertex { corner }));
    out
}
