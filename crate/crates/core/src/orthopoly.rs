//! Jacobi polynomials, the generalized families K⁻¹'⁻¹ and K⁻²'⁻², and
//! Gauss–Legendre quadrature.
//!
//! Jacobi polynomials use the unnormalized convention Jₙ^{α,β}(1) = C(n+α, n).
//! The generalized families are
//!
//! ```text
//! K11_0 = (1-ζ)/2              K22_0 = (1-ζ)²(2+ζ)/4
//! K11_1 = (1+ζ)/2              K22_1 = (1-ζ)²(1+ζ)/4
//! K11_n = (ζ²-1)/4 · J_{n-2}^{1,1}    K22_2 = (1+ζ)²(2-ζ)/4
//!                              K22_3 = (1+ζ)²(ζ-1)/4
//!                              K22_n = ((ζ²-1)/4)² · J_{n-4}^{2,2}
//! ```

use crate::error::{Error, Result};

/// Largest polynomial index accepted by the public evaluators.
pub const MAX_INDEX: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolynomialValue {
    pub value: f64,
    pub derivative: f64,
}

/// Value and first three derivatives of a univariate function at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet(pub [f64; 4]);

impl Jet {
    pub const ZERO: Jet = Jet([0.0; 4]);
    pub const ONE: Jet = Jet([1.0, 0.0, 0.0, 0.0]);

    #[inline]
    pub fn value(&self) -> f64 {
        self.0[0]
    }

    #[inline]
    pub fn d(&self, k: usize) -> f64 {
        self.0[k]
    }

    /// The jet of the derivative; the third derivative of the result is unknown and set to 0.
    #[inline]
    pub fn shift(&self) -> Jet {
        Jet([self.0[1], self.0[2], self.0[3], 0.0])
    }

    #[inline]
    pub fn scale(&self, c: f64) -> Jet {
        Jet([c * self.0[0], c * self.0[1], c * self.0[2], c * self.0[3]])
    }

    /// Leibniz product.
    #[inline]
    pub fn mul(&self, o: &Jet) -> Jet {
        let (f, g) = (&self.0, &o.0);
        Jet([
            f[0] * g[0],
            f[1] * g[0] + f[0] * g[1],
            f[2] * g[0] + 2.0 * f[1] * g[1] + f[0] * g[2],
            f[3] * g[0] + 3.0 * f[2] * g[1] + 3.0 * f[1] * g[2] + f[0] * g[3],
        ])
    }

    /// Jet of a polynomial given by ascending coefficients.
    pub fn poly(coeffs: &[f64], x: f64) -> Jet {
        let mut j = [0.0; 4];
        for &c in coeffs.iter().rev() {
            j[3] = j[3] * x + 3.0 * j[2];
            j[2] = j[2] * x + 2.0 * j[1];
            j[1] = j[1] * x + j[0];
            j[0] = j[0] * x + c;
        }
        Jet(j)
    }

    pub fn to_value(&self) -> PolynomialValue {
        PolynomialValue { value: self.0[0], derivative: self.0[1] }
    }
}

fn jacobi_raw(n: usize, a: f64, b: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=n {
        let k = k as f64;
        let s = 2.0 * k + a + b;
        let c0 = 2.0 * k * (k + a + b) * (s - 2.0);
        let c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let c2 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
        let p2 = (c1 * p1 - c2 * p0) / c0;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Jₙ^{α,β} and its first three derivatives, without argument validation.
pub fn jacobi_jet(n: usize, a: f64, b: f64, x: f64) -> Jet {
    let mut out = [0.0; 4];
    let mut factor = 1.0;
    for (k, slot) in out.iter_mut().enumerate() {
        if k > n {
            break;
        }
        if k > 0 {
            factor *= (n as f64 + a + b + k as f64) / 2.0;
        }
        *slot = factor * jacobi_raw(n - k, a + k as f64, b + k as f64, x);
    }
    Jet(out)
}

/// K⁻¹'⁻¹ₙ and its first three derivatives.
pub fn k11_jet(n: usize, x: f64) -> Jet {
    match n {
        0 => Jet([(1.0 - x) / 2.0, -0.5, 0.0, 0.0]),
        1 => Jet([(1.0 + x) / 2.0, 0.5, 0.0, 0.0]),
        _ => bubble(x).mul(&jacobi_jet(n - 2, 1.0, 1.0, x)),
    }
}

/// K⁻²'⁻²ₙ and its first three derivatives.
pub fn k22_jet(n: usize, x: f64) -> Jet {
    match n {
        0 => Jet::poly(&[0.5, -0.75, 0.0, 0.25], x),
        1 => Jet::poly(&[0.25, -0.25, -0.25, 0.25], x),
        2 => Jet::poly(&[0.5, 0.75, 0.0, -0.25], x),
        3 => Jet::poly(&[-0.25, -0.25, 0.25, 0.25], x),
        _ => {
            let q = bubble(x);
            q.mul(&q).mul(&jacobi_jet(n - 4, 2.0, 2.0, x))
        }
    }
}

/// (ζ² − 1)/4 as a jet.
#[inline]
fn bubble(x: f64) -> Jet {
    Jet([(x * x - 1.0) / 4.0, x / 2.0, 0.5, 0.0])
}

fn check_index(n: usize) -> Result<()> {
    if n > MAX_INDEX {
        return Err(Error::InvalidParameter(format!("polynomial index {n} exceeds cap {MAX_INDEX}")));
    }
    Ok(())
}

/// Jₙ^{α,β}(ζ) and its derivative.
pub fn jacobi_eval(n: usize, alpha: f64, beta: f64, zeta: f64) -> Result<PolynomialValue> {
    if alpha.is_nan() || beta.is_nan() || alpha <= -1.0 || beta <= -1.0 {
        return Err(Error::InvalidParameter(format!("Jacobi parameters must exceed -1, got ({alpha}, {beta})")));
    }
    check_index(n)?;
    Ok(jacobi_jet(n, alpha, beta, zeta).to_value())
}

pub fn k11_eval(n: usize, zeta: f64) -> Result<PolynomialValue> {
    check_index(n)?;
    Ok(k11_jet(n, zeta).to_value())
}

pub fn k22_eval(n: usize, zeta: f64) -> Result<PolynomialValue> {
    check_index(n)?;
    Ok(k22_jet(n, zeta).to_value())
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }
}

/// Legendre Pₙ and Pₙ' at x.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// q-point Gauss–Legendre rule on [−1, 1], nodes ascending.
pub fn gauss_legendre_rule(q: usize) -> Result<QuadratureRule> {
    if q == 0 {
        return Err(Error::InvalidParameter("quadrature needs at least one node".into()));
    }
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    let half = q.div_ceil(2);
    for i in 0..half {
        // i-th largest root
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(q, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(q, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[q - 1 - i] = x;
        weights[q - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if q % 2 == 1 {
        // exact zero for the middle node of odd rules
        nodes[q / 2] = 0.0;
        let (_, d) = legendre_with_derivative(q, 0.0);
        weights[q / 2] = 2.0 / (d * d);
    }
    Ok(QuadratureRule { nodes, weights })
}
