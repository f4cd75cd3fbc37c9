//! Fixed-step classical Runge-Kutta.

use crate::error::Result;

/// One RK4 step of `x' = rhs(t, x)`.
pub fn rk4_step<F>(rhs: &mut F, t: f64, x: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
{
    let shift = |x: &[f64], k: &[f64], c: f64| -> Vec<f64> { x.iter().zip(k).map(|(a, b)| a + c * b).collect() };
    let k1 = rhs(t, x)?;
    let k2 = rhs(t + h / 2.0, &shift(x, &k1, h / 2.0))?;
    let k3 = rhs(t + h / 2.0, &shift(x, &k2, h / 2.0))?;
    let k4 = rhs(t + h, &shift(x, &k3, h))?;
    Ok((0..x.len())
        .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// Number of steps covering `[t0, t1]` with step `h`.
pub fn step_count(t0: f64, t1: f64, h: f64) -> usize {
    ((t1 - t0) / h).round().max(0.0) as usize
}

/// Integrates from `x0` over `[t0, t1]`, returning the states at every step.
pub fn rk4<F>(mut rhs: F, x0: &[f64], t0: f64, t1: f64, h: f64) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
{
    let n = step_count(t0, t1, h);
    let mut out = Vec::with_capacity(n + 1);
    out.push(x0.to_vec());
    for i in 0..n {
        let t = t0 + i as f64 * h;
        let next = rk4_step(&mut rhs, t, &out[i], h)?;
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_is_fourth_order() {
        let err = |h: f64| {
            let xs = rk4(|_, x| Ok(vec![-x[0]]), &[1.0], 0.0, 1.0, h).unwrap();
            (xs.last().unwrap()[0] - (-1.0f64).exp()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }
}
