//! Element matrices for a(u,v) = ((∇×)²u, (∇×)²v), b(v,p) = (v, ∇p) and the
//! mass form (u, v), and their global assembly into a saddle system.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{apply, curl_curl_with, Point, Quadrilateral};
use crate::meshing::{DofMap, Mesh};
use crate::orthopoly::gauss_legendre_rule;
use crate::refbasis::{enumerate_modes, enumerate_scalar_modes, ElementBasis, PointJets, SpectralOrder};
use crate::sparse::CsrMatrix;

/// Quadrature points per direction used for assembly unless overridden.
pub fn default_quadrature(order: SpectralOrder) -> usize {
    order.max_index() + 4
}

/// Dense element blocks, row-major. `b` has one row per vector mode and one
/// column per scalar mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementMatrices {
    pub n_modes: usize,
    pub n_scalar: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub mass: Vec<f64>,
}

impl ElementMatrices {
    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n_modes + j]
    }

    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.mass[i * self.n_modes + j]
    }

    pub fn b(&self, i: usize, k: usize) -> f64 {
        self.b[i * self.n_scalar + k]
    }
}

/// Physical quantities of every vector mode at one quadrature point.
pub struct PhysicalModes {
    pub point: Point,
    pub weight: f64,
    pub value: Vec<Point>,
    pub curl: Vec<f64>,
    pub curl_curl: Vec<Point>,
}

/// Evaluates all modes of `order` at the tensor Gauss points of `quad`.
pub fn physical_modes(quad: &Quadrilateral, order: SpectralOrder, q: usize) -> Result<Vec<PhysicalModes>> {
    let rule = gauss_legendre_rule(q)?;
    let modes = enumerate_modes(order);
    let basis = ElementBasis::new(quad);
    let mut out = Vec::with_capacity(q * q);
    for (i, &x) in rule.nodes.iter().enumerate() {
        for (j, &y) in rule.nodes.iter().enumerate() {
            let r = [x, y];
            let jets = PointJets::new(r, order.max_index());
            let jac = quad.jacobian(r);
            let w = quad.curl_curl_correction(&jac);
            let mut pm = PhysicalModes {
                point: quad.map_to_physical(r),
                weight: rule.weights[i] * rule.weights[j] * jac.det,
                value: Vec::with_capacity(modes.len()),
                curl: Vec::with_capacity(modes.len()),
                curl_curl: Vec::with_capacity(modes.len()),
            };
            for mode in &modes {
                let ev = basis.eval(mode, &jets);
                pm.value.push(apply(&jac.b_inv_t, ev.value));
                pm.curl.push(ev.curl / jac.det);
                pm.curl_curl.push(curl_curl_with(&jac, w, ev.curl, ev.curl_grad));
            }
            out.push(pm);
        }
    }
    Ok(out)
}

fn symmetrize(m: &mut [f64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            let s = 0.5 * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = s;
            m[j * n + i] = s;
        }
    }
}

/// Element blocks by q×q Gauss–Legendre quadrature.
pub fn element_matrices(quad: &Quadrilateral, order: SpectralOrder, q: usize) -> Result<ElementMatrices> {
    let order = SpectralOrder::new(order.l, order.m, order.n)?;
    let points = physical_modes(quad, order, q)?;
    let scalar = enumerate_scalar_modes(order);
    let rule = gauss_legendre_rule(q)?;
    let nm = points[0].value.len();
    let ns = scalar.len();
    let mut a = vec![0.0; nm * nm];
    let mut mass = vec![0.0; nm * nm];
    let mut b = vec![0.0; nm * ns];
    for (idx, pm) in points.iter().enumerate() {
        let r = [rule.nodes[idx / q], rule.nodes[idx % q]];
        let jac = quad.jacobian(r);
        let grads: Vec<Point> = scalar
            .iter()
            .map(|s| {
                let (m, n) = s.indices();
                let (_, g) = crate::refbasis::eval_scalar_mode(m, n, r).expect("enumerated scalar mode");
                apply(&jac.b_inv_t, g)
            })
            .collect();
        let w = pm.weight;
        for i in 0..nm {
            let (ci, vi) = (pm.curl_curl[i], pm.value[i]);
            let (wc, wv) = ([w * ci[0], w * ci[1]], [w * vi[0], w * vi[1]]);
            for j in 0..nm {
                let cj = pm.curl_curl[j];
                let vj = pm.value[j];
                a[i * nm + j] += wc[0] * cj[0] + wc[1] * cj[1];
                mass[i * nm + j] += wv[0] * vj[0] + wv[1] * vj[1];
            }
            for (k, g) in grads.iter().enumerate() {
                b[i * ns + k] += wv[0] * g[0] + wv[1] * g[1];
            }
        }
    }
    symmetrize(&mut a, nm);
    symmetrize(&mut mass, nm);
    Ok(ElementMatrices { n_modes: nm, n_scalar: ns, a, b, mass })
}

/// ∫_K f · v for every vector mode v.
pub fn element_load<F>(quad: &Quadrilateral, order: SpectralOrder, f: F, q: usize) -> Result<Vec<f64>>
where
    F: Fn(Point) -> Point,
{
    let order = SpectralOrder::new(order.l, order.m, order.n)?;
    let points = physical_modes(quad, order, q)?;
    let mut load = vec![0.0; points[0].value.len()];
    for pm in &points {
        let fv = f(pm.point);
        for (l, v) in load.iter_mut().zip(&pm.value) {
            *l += pm.weight * (fv[0] * v[0] + fv[1] * v[1]);
        }
    }
    Ok(load)
}

/// The block system [A B; Bᵀ 0] over free DOFs, with the mass matrix for eigenproblems.
#[derive(Clone, Debug)]
pub struct SaddleSystem {
    pub a: CsrMatrix,
    pub b: CsrMatrix,
    pub mass: CsrMatrix,
    pub f: Vec<f64>,
    pub n_u: usize,
    pub n_p: usize,
}

impl SaddleSystem {
    /// Block matrix [A − σM, B; Bᵀ, 0].
    pub fn shifted_block(&self, shift: f64) -> CsrMatrix {
        let mut t: Vec<(usize, usize, f64)> = self.a.triplets().collect();
        if shift != 0.0 {
            t.extend(self.mass.triplets().map(|(r, c, v)| (r, c, -shift * v)));
        }
        for (r, c, v) in self.b.triplets() {
            t.push((r, self.n_u + c, v));
            t.push((self.n_u + c, r, v));
        }
        CsrMatrix::from_triplets(self.n_u + self.n_p, self.n_u + self.n_p, &t)
    }

    pub fn block(&self) -> CsrMatrix {
        self.shifted_block(0.0)
    }

    /// Right-hand side [f; 0].
    pub fn rhs(&self) -> Vec<f64> {
        let mut r = self.f.clone();
        r.resize(self.n_u + self.n_p, 0.0);
        r
    }
}

/// Assembles A, B, M and the load for `f` over the free DOFs of `dofmap`.
pub fn assemble<F>(mesh: &Mesh, dofmap: &DofMap, order: SpectralOrder, f: F, q: usize) -> Result<SaddleSystem>
where
    F: Fn(Point) -> Point + Sync,
{
    if order != dofmap.order {
        return Err(Error::DimensionMismatch(format!(
            "DOF map built for order {} but assembly requested {order}",
            dofmap.order
        )));
    }
    let blocks: Vec<(ElementMatrices, Vec<f64>)> = mesh
        .quads()
        .par_iter()
        .map(|quad| Ok((element_matrices(quad, order, q)?, element_load(quad, order, &f, q)?)))
        .collect::<Result<_>>()?;

    let mut ta = Vec::new();
    let mut tm = Vec::new();
    let mut tb = Vec::new();
    let mut load = vec![0.0; dofmap.n_u()];
    for (e, (em, fl)) in blocks.iter().enumerate() {
        let (udofs, usigns) = dofmap.element_u(e);
        let (pdofs, psigns) = dofmap.element_p(e);
        if udofs.len() != em.n_modes || pdofs.len() != em.n_scalar {
            return Err(Error::DimensionMismatch(format!("element {e} block size differs from DOF map")));
        }
        let free_u: Vec<Option<usize>> = udofs.iter().map(|&g| dofmap.free_u(g)).collect();
        let free_p: Vec<Option<usize>> = pdofs.iter().map(|&g| dofmap.free_p(g)).collect();
        for i in 0..em.n_modes {
            let Some(gi) = free_u[i] else { continue };
            load[gi] += usigns[i] * fl[i];
            for j in 0..em.n_modes {
                let Some(gj) = free_u[j] else { continue };
                let s = usigns[i] * usigns[j];
                ta.push((gi, gj, s * em.a(i, j)));
                tm.push((gi, gj, s * em.mass(i, j)));
            }
            for k in 0..em.n_scalar {
                let Some(gk) = free_p[k] else { continue };
                tb.push((gi, gk, usigns[i] * psigns[k] * em.b(i, k)));
            }
        }
    }
    let (n_u, n_p) = (dofmap.n_u(), dofmap.n_p());
    Ok(SaddleSystem {
        a: CsrMatrix::from_triplets(n_u, n_u, &ta),
        b: CsrMatrix::from_triplets(n_u, n_p, &tb),
        mass: CsrMatrix::from_triplets(n_u, n_u, &tm),
        f: load,
        n_u,
        n_p,
    })
}

/// Assembly without a load, for eigenproblems.
pub fn assemble_operators(mesh: &Mesh, dofmap: &DofMap, q: usize) -> Result<SaddleSystem> {
    assemble(mesh, dofmap, dofmap.order, |_| [0.0, 0.0], q)
}
