//! Floating-point callable fields with the same operators, evaluated by
//! central finite differences. Intended for run-time sanity checks on
//! systems given as closures; exact identities use the polynomial types.

use std::sync::Arc;

pub const STEP: f64 = 1e-5;
pub const REL_TOL: f64 = 1e-6;

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync>;

fn shifted(x: &[f64], i: usize, h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[i] += h;
    y
}

/// `df` at `x`.
pub fn exterior_d(f: &ScalarFn, x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|i| (f(&shifted(x, i, STEP)) - f(&shifted(x, i, -STEP))) / (2.0 * STEP))
        .collect()
}

/// Directional derivative of a vector-valued map along `v` at `x`.
fn directional(f: &VectorFn, x: &[f64], v: &[f64]) -> Vec<f64> {
    let plus: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + STEP * b).collect();
    let minus: Vec<f64> = x.iter().zip(v).map(|(a, b)| a - STEP * b).collect();
    f(&plus)
        .iter()
        .zip(f(&minus))
        .map(|(a, b)| (a - b) / (2.0 * STEP))
        .collect()
}

/// `[X, Y]` at `x`.
pub fn lie_bracket(xf: &VectorFn, yf: &VectorFn, x: &[f64]) -> Vec<f64> {
    let xv = xf(x);
    let yv = yf(x);
    directional(yf, x, &xv)
        .iter()
        .zip(directional(xf, x, &yv))
        .map(|(a, b)| a - b)
        .collect()
}

/// `(L_X a)_i = X^j d_j a_i + a_j d_i X^j` at `x`.
pub fn lie_derivative_form(xf: &VectorFn, a: &VectorFn, x: &[f64]) -> Vec<f64> {
    let xv = xf(x);
    let av = a(x);
    let transport = directional(a, x, &xv);
    (0..x.len())
        .map(|i| {
            let mut e = vec![0.0; x.len()];
            e[i] = 1.0;
            let dx = directional(xf, x, &e);
            transport[i] + av.iter().zip(&dx).map(|(p, q)| p * q).sum::<f64>()
        })
        .collect()
}

/// `(#_P a)^j = a_i P^{ij}` at `x`.
pub fn sharp(p: &MatrixFn, a: &[f64], x: &[f64]) -> Vec<f64> {
    let m = p(x);
    (0..a.len())
        .map(|j| (0..a.len()).map(|i| a[i] * m[i][j]).sum())
        .collect()
}

/// Componentwise comparison with relative tolerance `REL_TOL`.
pub fn approx_eq(a: &[f64], b: &[f64]) -> bool {
    let scale = a.iter().chain(b).fold(1.0f64, |s, v| s.max(v.abs()));
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= REL_TOL * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::tensor::{self, OneForm, VectorField};

    fn as_fn(v: VectorField) -> VectorFn {
        Arc::new(move |x: &[f64]| v.eval_f64(x))
    }

    #[test]
    fn matches_polynomial_operators() {
        let x = VectorField::parse(&["x2^2", "x1*x2 - 1"]).unwrap();
        let y = VectorField::parse(&["x1^3", "x2"]).unwrap();
        let a = OneForm::parse(&["x1*x2", "x1^2"]).unwrap();
        let pt = [0.3, -0.7];
        let exact = tensor::lie_bracket(&x, &y).eval_f64(&pt);
        assert!(approx_eq(&lie_bracket(&as_fn(x.clone()), &as_fn(y), &pt), &exact));
        let exact = tensor::lie_derivative_form(&x, &a).eval_f64(&pt);
        let af: VectorFn = {
            let a = a.clone();
            Arc::new(move |p: &[f64]| a.eval_f64(p))
        };
        assert!(approx_eq(&lie_derivative_form(&as_fn(x), &af, &pt), &exact));
        let f = Poly::parse("x1^2*x2", 2, None).unwrap();
        let ff: ScalarFn = {
            let f = f.clone();
            Arc::new(move |p: &[f64]| f.eval_f64(p))
        };
        assert!(approx_eq(&exterior_d(&ff, &pt), &tensor::exterior_d(&f).eval_f64(&pt)));
    }
}
