//! Double-precision evaluation of `F_C`: the truncated series, the torus
//! integral for integral `c`, and `2F1`.

use std::f64::consts::PI;

pub use num_complex::Complex64 as Complex;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{CycNum, ParameterSet};
use crate::matrix::ExactMatrix;
use crate::monodromy::MonodromySystem;

/// Real parameters `a`, `b`, `c_1..c_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct FcParams {
    pub a: f64,
    pub b: f64,
    pub c: Vec<f64>,
}

impl FcParams {
    pub fn new(a: f64, b: f64, c: Vec<f64>) -> Self {
        FcParams { a, b, c }
    }
}

impl From<&ParameterSet> for FcParams {
    fn from(p: &ParameterSet) -> Self {
        let f = |q: &num_rational::BigRational| q.to_f64().unwrap_or(f64::NAN);
        FcParams { a: f(&p.a), b: f(&p.b), c: p.c.iter().map(f).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesConfig {
    pub max_total_degree: usize,
    pub rel_tol: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig { max_total_degree: 2000, rel_tol: 1e-15 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    pub re: f64,
    pub im: f64,
    /// Size of the last series term or the change under halving the quadrature grid.
    pub error_estimate: f64,
    /// Total degree reached, or quadrature points per circle.
    pub size: usize,
}

impl Evaluation {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

/// `F_C(a, b, c; x)` summed by total degree until two consecutive degrees change the sum by less than `rel_tol`.
pub fn fc_series(p: &FcParams, x: &[Complex64], cfg: &SeriesConfig) -> Result<Evaluation> {
    if x.len() != p.c.len() {
        return Err(Error::DimensionMismatch(format!("{} variables for n = {}", x.len(), p.c.len())));
    }
    if let Some(c) = p.c.iter().find(|&&c| is_nonpositive_integer(c)) {
        return Err(Error::InvalidParameter(format!("c_k = {c} is a nonpositive integer")));
    }
    let radius: f64 = x.iter().map(|z| z.norm().sqrt()).sum();
    if radius >= 1.0 {
        return Err(Error::Domain(format!("sum of sqrt|x_k| = {radius} is not below 1")));
    }
    let d_max = cfg.max_total_degree;
    // u_k[m] = x_k^m / ((c_k)_m m!)
    let factors: Vec<Vec<Complex64>> = p
        .c
        .iter()
        .zip(x)
        .map(|(&c, &xk)| {
            let mut u = Vec::with_capacity(d_max + 1);
            u.push(Complex64::new(1.0, 0.0));
            for m in 0..d_max {
                let next = u[m] * xk / ((c + m as f64) * (m as f64 + 1.0));
                u.push(next);
            }
            u
        })
        .collect();
    // degree-D part of the product of the u_k, one degree at a time
    let mut sum = Complex64::new(0.0, 0.0);
    let mut ab = 1.0;
    let mut quiet = 0;
    for d in 0..=d_max {
        let mut inner = Complex64::new(0.0, 0.0);
        for_each_composition(p.c.len(), d, &mut |m| {
            inner += m.iter().enumerate().map(|(k, &mk)| factors[k][mk]).product::<Complex64>();
        });
        let term = inner * ab;
        sum += term;
        ab *= (p.a + d as f64) * (p.b + d as f64);
        if term.norm() <= cfg.rel_tol * sum.norm() {
            quiet += 1;
            if quiet == 2 {
                return Ok(Evaluation { re: sum.re, im: sum.im, error_estimate: term.norm(), size: d });
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NoConvergence { max_degree: d_max })
}

fn for_each_composition(parts: usize, total: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(buf: &mut Vec<usize>, parts: usize, left: usize, f: &mut impl FnMut(&[usize])) {
        if buf.len() + 1 == parts {
            buf.push(left);
            f(buf);
            buf.pop();
            return;
        }
        for m in 0..=left {
            buf.push(m);
            rec(buf, parts, left - m, f);
            buf.pop();
        }
    }
    if parts == 0 {
        if total == 0 {
            f(&[]);
        }
        return;
    }
    rec(&mut Vec::with_capacity(parts), parts, total, f);
}

/// `2F1(a, b; c; x)` by its power series.
pub fn gauss_2f1(a: f64, b: f64, c: f64, x: Complex64, cfg: &SeriesConfig) -> Result<Evaluation> {
    if is_nonpositive_integer(c) {
        return Err(Error::InvalidParameter(format!("c = {c} is a nonpositive integer")));
    }
    if x.norm() >= 1.0 {
        return Err(Error::Domain(format!("|x| = {} is not below 1", x.norm())));
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut quiet = 0;
    for m in 0..cfg.max_total_degree {
        let m = m as f64;
        term *= x * ((a + m) * (b + m) / ((c + m) * (m + 1.0)));
        sum += term;
        if term.norm() <= cfg.rel_tol * sum.norm() {
            quiet += 1;
            if quiet == 2 {
                return Ok(Evaluation { re: sum.re, im: sum.im, error_estimate: term.norm(), size: m as usize + 1 });
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NoConvergence { max_degree: cfg.max_total_degree })
}

/// `Gamma(z)` for real `z` off the poles.
pub fn gamma_value(z: f64) -> Result<f64> {
    if is_nonpositive_integer(z) {
        return Err(Error::GammaPole(z));
    }
    Ok(statrs::function::gamma::gamma(z))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusQuadrature {
    pub epsilon: f64,
    pub points_per_circle: usize,
}

impl Default for TorusQuadrature {
    fn default() -> Self {
        TorusQuadrature { epsilon: 0.2, points_per_circle: 64 }
    }
}

/// `∫ f(t) dt_1 ∧ ... ∧ dt_n` over `|t_1| = ... = |t_n| = epsilon` by the product trapezoid rule.
pub fn torus_trapezoid(n: usize, epsilon: f64, m: usize, f: impl Fn(&[Complex64]) -> Complex64) -> Complex64 {
    let nodes: Vec<Complex64> = (0..m).map(|j| Complex64::from_polar(epsilon, 2.0 * PI * j as f64 / m as f64)).collect();
    // dt = i t dtheta, dtheta = 2 pi / m
    let weight = Complex64::new(0.0, 2.0 * PI / m as f64);
    let total = m.pow(n as u32);
    let mut t = vec![Complex64::new(0.0, 0.0); n];
    let mut acc = Complex64::new(0.0, 0.0);
    for idx in 0..total {
        let mut r = idx;
        let mut jac = Complex64::new(1.0, 0.0);
        for tk in t.iter_mut() {
            *tk = nodes[r % m];
            jac *= weight * *tk;
            r /= m;
        }
        acc += f(&t) * jac;
    }
    acc
}

/// `(-1)^{n + sum c} / (2 pi i)^n * Gamma(1 - a) prod Gamma(c_k) / Gamma(1 - a - n + sum c_k)`.
pub fn contour_prefactor(p: &FcParams) -> Result<Complex64> {
    let n = p.c.len() as i32;
    let c_sum: f64 = p.c.iter().sum();
    let mut g = gamma_value(1.0 - p.a)? / gamma_value(1.0 - p.a - n as f64 + c_sum)?;
    for &c in &p.c {
        g *= gamma_value(c)?;
    }
    let sign = if (n + c_sum.round() as i32) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(Complex64::new(sign * g, 0.0) / Complex64::new(0.0, 2.0 * PI).powi(n))
}

fn contour_value(p: &FcParams, x: &[f64], quad: &TorusQuadrature, m: usize) -> Result<Complex64> {
    let n = p.c.len();
    let c_sum: f64 = p.c.iter().sum();
    let e1 = c_sum - p.a - n as f64;
    let integral = torus_trapezoid(n, quad.epsilon, m, |t| {
        let s: Complex64 = t.iter().sum();
        let q: Complex64 = x.iter().zip(t).map(|(&xk, &tk)| xk / tk).sum();
        let mono: Complex64 = t.iter().zip(&p.c).map(|(&tk, &ck)| tk.powi(-(ck as i32))).product();
        mono * (Complex64::new(1.0, 0.0) - s).powf(e1) * (Complex64::new(1.0, 0.0) - q).powf(-p.b)
    });
    Ok(contour_prefactor(p)? * integral)
}

/// `F_C` for positive integral `c` as a torus integral.
pub fn fc_contour(p: &FcParams, x: &[f64], quad: &TorusQuadrature) -> Result<Evaluation> {
    let n = p.c.len();
    if x.len() != n {
        return Err(Error::DimensionMismatch(format!("{} variables for n = {}", x.len(), n)));
    }
    if let Some(c) = p.c.iter().find(|&&c| c < 1.0 || c.fract() != 0.0) {
        return Err(Error::Precondition(format!("c_k = {c} is not a positive integer")));
    }
    let eps = quad.epsilon;
    if !(eps > 0.0 && eps < 1.0 / (n as f64 + 1.0)) {
        return Err(Error::Precondition(format!("0 < epsilon < 1/(n+1) fails for epsilon = {eps}")));
    }
    if let Some(xk) = x.iter().find(|&&xk| !(xk > 0.0 && xk < eps * eps / n as f64)) {
        return Err(Error::Precondition(format!("0 < x_k < epsilon^2/n fails for x_k = {xk}")));
    }
    if quad.points_per_circle < 8 {
        return Err(Error::Precondition(format!("points_per_circle = {} is below 8", quad.points_per_circle)));
    }
    let m = quad.points_per_circle;
    let value = contour_value(p, x, quad, m)?;
    let coarse = contour_value(p, x, quad, m / 2)?;
    Ok(Evaluation { re: value.re, im: value.im, error_estimate: (value - coarse).norm(), size: m })
}

pub fn numeric_embed(x: &CycNum) -> Complex64 {
    x.to_complex()
}

pub fn embed_matrix(m: &ExactMatrix) -> Vec<Vec<Complex64>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| numeric_embed(m.get(i, j))).collect()).collect()
}

/// Largest entry of `|tM H conj(M) - H|` over all generators, in floating point.
pub fn float_isometry_residual(sys: &MonodromySystem) -> Result<f64> {
    let h = embed_matrix(sys.h()?);
    let size = h.len();
    let mut worst: f64 = 0.0;
    for g in &sys.generators {
        let m = embed_matrix(g);
        for i in 0..size {
            for j in 0..size {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..size {
                    for l in 0..size {
                        acc += m[k][i] * h[k][l] * m[l][j].conj();
                    }
                }
                worst = worst.max((acc - h[i][j]).norm());
            }
        }
    }
    Ok(worst)
}
