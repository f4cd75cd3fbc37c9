//! Port-controlled Hamiltonian systems
//!
//! ```text
//! x' = J(x) dH/dx + g(x) f (+ b(x) lambda),   e = g(x)^T dH/dx,   0 = b(x)^T dH/dx
//! ```
//!
//! simulated with RK4, interconnections `Delta(x)` in flow/effort space, the
//! induced structure `D = {(#J a + g f, a) : (f, g^T a) in Delta}` and the
//! extended bivector `J + G` on `R^{n+p}`.
//!
//! A matrix `J` acts on covectors as `#J a = J a`, i.e. it is identified with
//! the bivector whose components are `J^{ij}_biv = J_{ji}`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use serde::Serialize;

use crate::bigvec::{self, IsotropicSubspace};
use crate::error::{check_dim, Error, Result};
use crate::integrate;
use crate::linalg::{self, float, Subspace, Vector};
use crate::poly::{CompiledPoly, Poly};
use crate::rational::{self, Rational};
use crate::sampling::Sampler;
use crate::span;
use crate::structure::{BigIsoStructure, Check};
use crate::tensor::{numeric, Bivector, OneForm, VectorField};

pub type MatFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
pub type FeedbackFn = Arc<dyn Fn(&[f64], f64) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub enum MatrixField {
    Poly(Vec<Vec<Poly>>),
    Callable { rows: usize, cols: usize, f: MatFn },
}

impl fmt::Debug for MatrixField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixField::Poly(m) => f.debug_tuple("Poly").field(m).finish(),
            MatrixField::Callable { rows, cols, .. } => write!(f, "Callable({rows}x{cols})"),
        }
    }
}

impl MatrixField {
    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        MatrixField::Poly(vec![vec![Poly::zero(nvars); cols]; rows])
    }

    pub fn constant(rows: &[Vec<Rational>], nvars: usize) -> Self {
        MatrixField::Poly(
            rows.iter()
                .map(|r| r.iter().map(|c| Poly::constant(nvars, c.clone())).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        match self {
            MatrixField::Poly(m) => m.len(),
            MatrixField::Callable { rows, .. } => *rows,
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            MatrixField::Poly(m) => m.first().map_or(0, Vec::len),
            MatrixField::Callable { cols, .. } => *cols,
        }
    }

    pub fn as_poly(&self) -> Option<&Vec<Vec<Poly>>> {
        match self {
            MatrixField::Poly(m) => Some(m),
            MatrixField::Callable { .. } => None,
        }
    }

    pub fn eval(&self, x: &[Rational]) -> Option<Vec<Vector>> {
        self.as_poly()
            .map(|m| m.iter().map(|r| r.iter().map(|p| p.eval(x)).collect()).collect())
    }

    fn compile(&self, cols_hint: usize) -> CompiledMatrix {
        match self {
            MatrixField::Poly(m) => CompiledMatrix::Poly {
                rows: m.len(),
                cols: m.first().map_or(cols_hint, Vec::len),
                entries: m.iter().map(|r| r.iter().map(Poly::compile).collect()).collect(),
            },
            MatrixField::Callable { f, .. } => CompiledMatrix::Callable(f.clone()),
        }
    }
}

enum CompiledMatrix {
    Poly {
        rows: usize,
        cols: usize,
        entries: Vec<Vec<CompiledPoly>>,
    },
    Callable(MatFn),
}

impl CompiledMatrix {
    fn eval(&self, x: &[f64]) -> DMatrix<f64> {
        match self {
            CompiledMatrix::Poly { rows, cols, entries } => DMatrix::from_fn(*rows, *cols, |i, j| entries[i][j].eval(x)),
            CompiledMatrix::Callable(f) => f(x),
        }
    }
}

#[derive(Clone)]
pub enum ScalarField {
    Poly(Poly),
    /// A callable energy; the gradient falls back to central differences.
    Callable {
        value: numeric::ScalarFn,
        gradient: Option<numeric::VectorFn>,
    },
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Poly(p) => write!(f, "Poly({p})"),
            ScalarField::Callable { .. } => f.write_str("Callable"),
        }
    }
}

impl ScalarField {
    pub fn as_poly(&self) -> Option<&Poly> {
        match self {
            ScalarField::Poly(p) => Some(p),
            ScalarField::Callable { .. } => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PortHamSystem {
    pub n: usize,
    pub p: usize,
    pub k: usize,
    pub j: MatrixField,
    pub g: MatrixField,
    pub b: MatrixField,
    pub h: ScalarField,
}

fn check_shape(name: &str, m: &MatrixField, rows: usize, cols: usize, nvars: usize) -> Result<()> {
    if m.rows() != rows || (rows > 0 && m.cols() != cols) {
        return Err(Error::Invalid(format!(
            "{name} must be {rows}x{cols}, found {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if let Some(rows) = m.as_poly() {
        for r in rows {
            for p in r {
                check_dim(nvars, p.nvars())?;
            }
        }
    }
    Ok(())
}

impl PortHamSystem {
    pub fn new(j: MatrixField, g: MatrixField, b: MatrixField, h: ScalarField) -> Result<Self> {
        let n = j.rows();
        let p = if g.rows() == 0 { 0 } else { g.cols() };
        let k = if b.rows() == 0 { 0 } else { b.cols() };
        check_shape("J", &j, n, n, n)?;
        check_shape("g", &g, n, p, n)?;
        check_shape("b", &b, n, k, n)?;
        if let ScalarField::Poly(hp) = &h {
            check_dim(n, hp.nvars())?;
        }
        if let Some(jm) = j.as_poly() {
            for a in 0..n {
                for c in 0..n {
                    if !(&jm[a][c] + &jm[c][a]).is_zero() {
                        return Err(Error::Invalid(format!("J is not skew at ({a},{c})")));
                    }
                }
            }
        }
        Ok(Self { n, p, k, j, g, b, h })
    }

    /// Unconstrained polynomial system.
    pub fn polynomial(j: Vec<Vec<Poly>>, g: Vec<Vec<Poly>>, h: Poly) -> Result<Self> {
        let n = j.len();
        let g = if g.is_empty() { vec![Vec::new(); n] } else { g };
        Self::new(
            MatrixField::Poly(j),
            MatrixField::Poly(g),
            MatrixField::Poly(vec![Vec::new(); n]),
            ScalarField::Poly(h),
        )
    }

    pub fn with_constraints(mut self, b: Vec<Vec<Poly>>) -> Result<Self> {
        let k = b.first().map_or(0, Vec::len);
        let b = MatrixField::Poly(b);
        check_shape("b", &b, self.n, k, self.n)?;
        self.b = b;
        self.k = k;
        Ok(self)
    }

    /// `J` as a bivector: `#J a = J a`.
    pub fn j_bivector(&self) -> Option<Bivector> {
        self.j.as_poly().map(|j| j_bivector(j).expect("skew checked"))
    }

    /// The polynomial constraint functions `b^T dH/dx`.
    pub fn constraint_functions(&self) -> Option<Vec<Poly>> {
        let b = self.b.as_poly()?;
        let h = self.h.as_poly()?;
        let grad = h.gradient();
        Some(
            (0..self.k)
                .map(|c| crate::span::contract(self.n, &b.iter().map(|r| r[c].clone()).collect::<Vec<_>>(), &grad))
                .collect(),
        )
    }
}

/// The bivector of a skew matrix under `#J a = J a`.
pub fn j_bivector(j: &[Vec<Poly>]) -> Result<Bivector> {
    let n = j.len();
    let nv = j.first().and_then(|r| r.first()).map_or(n, Poly::nvars);
    let mut b = Bivector::zero(nv.max(n));
    if nv != n {
        return Err(Error::DimensionMismatch { expected: n, found: nv });
    }
    for a in 0..n {
        for c in a + 1..n {
            if !(&j[a][c] + &j[c][a]).is_zero() {
                return Err(Error::Invalid(format!("J is not skew at ({a},{c})")));
            }
            b.set(a, c, j[c][a].clone())?;
        }
    }
    Ok(b)
}

/// A state-dependent subspace `Delta(x)` of flow/effort space `R^p + R^p*`,
/// spanned by columns `(f_1..f_p, e_1..e_p)` polynomial in the state.
#[derive(Debug, Clone, PartialEq)]
pub struct Interconnection {
    pub p: usize,
    pub nvars: usize,
    pub basis: Vec<Vec<Poly>>,
}

impl Interconnection {
    pub fn new(p: usize, nvars: usize, basis: Vec<Vec<Poly>>) -> Result<Self> {
        for v in &basis {
            check_dim(2 * p, v.len())?;
            for c in v {
                check_dim(nvars, c.nvars())?;
            }
        }
        Ok(Self { p, nvars, basis })
    }

    pub fn constant(p: usize, nvars: usize, basis: &[Vector]) -> Result<Self> {
        Self::new(
            p,
            nvars,
            basis
                .iter()
                .map(|v| v.iter().map(|c| Poly::constant(nvars, c.clone())).collect())
                .collect(),
        )
    }

    /// `Delta = {(A e, e)}`.
    pub fn graph(a: &[Vector], nvars: usize) -> Result<Self> {
        let p = a.len();
        let basis: Vec<Vector> = (0..p)
            .map(|k| {
                let e = linalg::unit(p, k);
                linalg::mat_vec(a, &e).into_iter().chain(e).collect()
            })
            .collect();
        Self::constant(p, nvars, &basis)
    }

    pub fn at(&self, x: &[Rational]) -> Subspace {
        Subspace::span(2 * self.p, self.basis.iter().map(|v| v.iter().map(|c| c.eval(x)).collect())).expect("length")
    }

    /// `(F, E)` with columns the flow and effort parts of the basis.
    fn eval_f64(&self, x: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
        let d = self.basis.len();
        let f = DMatrix::from_fn(self.p, d, |i, c| self.basis[c][i].eval_f64(x));
        let e = DMatrix::from_fn(self.p, d, |i, c| self.basis[c][self.p + i].eval_f64(x));
        (f, e)
    }
}

#[derive(Clone)]
pub enum Flow {
    Zero,
    Constant(Vec<f64>),
    /// `f = f(x, t)`
    Feedback(FeedbackFn),
    /// `(f, e) in Delta(x)` solved jointly with `e = g^T dH/dx`.
    Interconnection(Interconnection),
}

impl fmt::Debug for Flow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flow::Zero => f.write_str("Zero"),
            Flow::Constant(v) => write!(f, "Constant({v:?})"),
            Flow::Feedback(_) => f.write_str("Feedback"),
            Flow::Interconnection(d) => write!(f, "Interconnection({d:?})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub t0: f64,
    pub t1: f64,
    pub step: f64,
    /// Project back onto the constraint set after every step.
    pub project: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            t0: 0.0,
            t1: 10.0,
            step: 1e-3,
            project: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub energy: Vec<f64>,
    pub efforts: Vec<Vec<f64>>,
    pub flows: Vec<Vec<f64>>,
    pub power: Vec<f64>,
    pub constraint_res: Vec<f64>,
    /// `int_0^t e.f dt`, integrated alongside the state.
    pub work: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_energy_drift(&self) -> f64 {
        let h0 = self.energy.first().copied().unwrap_or(0.0);
        self.energy.iter().map(|h| (h - h0).abs()).fold(0.0, f64::max)
    }

    /// `max_t |H(t) - H(0) - int_0^t e.f|`.
    pub fn power_balance_residual(&self) -> f64 {
        let h0 = self.energy.first().copied().unwrap_or(0.0);
        self.energy
            .iter()
            .zip(&self.work)
            .map(|(h, w)| (h - h0 - w).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_constraint_residual(&self) -> f64 {
        self.constraint_res.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    /// CSV with header `t,x1..xn,H,e1..ep,f1..fp,power,constraint_res`.
    pub fn csv(&self) -> String {
        let n = self.states.first().map_or(0, Vec::len);
        let p = self.efforts.first().map_or(0, Vec::len);
        let mut head = vec!["t".to_string()];
        head.extend((1..=n).map(|i| format!("x{i}")));
        head.push("H".into());
        head.extend((1..=p).map(|i| format!("e{i}")));
        head.extend((1..=p).map(|i| format!("f{i}")));
        head.push("power".into());
        head.push("constraint_res".into());
        let mut out = head.join(",");
        out.push('\n');
        let fmt = |v: f64| format!("{v:.16e}");
        for r in 0..self.len() {
            let mut row = vec![fmt(self.times[r])];
            row.extend(self.states[r].iter().map(|&v| fmt(v)));
            row.push(fmt(self.energy[r]));
            row.extend(self.efforts[r].iter().map(|&v| fmt(v)));
            row.extend(self.flows[r].iter().map(|&v| fmt(v)));
            row.push(fmt(self.power[r]));
            row.push(fmt(self.constraint_res[r]));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

struct Compiled {
    p: usize,
    k: usize,
    j: CompiledMatrix,
    g: CompiledMatrix,
    b: CompiledMatrix,
    h: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    grad: Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
    /// Jacobian of the constraint functions, `k x n`.
    cjac: Box<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>,
    cval: Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
}

impl Compiled {
    fn new(sys: &PortHamSystem) -> Self {
        let (h, grad): (Box<dyn Fn(&[f64]) -> f64 + Send + Sync>, Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>) = match &sys.h {
            ScalarField::Poly(p) => {
                let hc = p.compile();
                let gc: Vec<CompiledPoly> = p.gradient().iter().map(Poly::compile).collect();
                (Box::new(move |x| hc.eval(x)), Box::new(move |x| gc.iter().map(|g| g.eval(x)).collect()))
            }
            ScalarField::Callable { value, gradient } => {
                let v = value.clone();
                let v2 = value.clone();
                let gr: Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync> = match gradient {
                    Some(g) => {
                        let g = g.clone();
                        Box::new(move |x| g(x))
                    }
                    None => Box::new(move |x| numeric::exterior_d(&v2, x)),
                };
                (Box::new(move |x| v(x)), gr)
            }
        };
        let (cval, cjac): (Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>, Box<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>) =
            match sys.constraint_functions() {
                Some(cs) => {
                    let vals: Vec<CompiledPoly> = cs.iter().map(Poly::compile).collect();
                    let jac: Vec<Vec<CompiledPoly>> = cs.iter().map(|c| c.gradient().iter().map(Poly::compile).collect()).collect();
                    let (k, n) = (sys.k, sys.n);
                    (
                        Box::new(move |x| vals.iter().map(|v| v.eval(x)).collect()),
                        Box::new(move |x| DMatrix::from_fn(k, n, |i, c| jac[i][c].eval(x))),
                    )
                }
                None => {
                    let b = sys.b.compile(sys.k);
                    let h = sys.h.clone();
                    let grad_h: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync> = match &h {
                        ScalarField::Poly(p) => {
                            let gc: Vec<CompiledPoly> = p.gradient().iter().map(Poly::compile).collect();
                            Arc::new(move |x| gc.iter().map(|g| g.eval(x)).collect())
                        }
                        ScalarField::Callable { gradient: Some(g), .. } => g.clone(),
                        ScalarField::Callable { value, .. } => {
                            let v = value.clone();
                            Arc::new(move |x| numeric::exterior_d(&v, x))
                        }
                    };
                    let c: numeric::VectorFn = Arc::new(move |x: &[f64]| {
                        let bm = b.eval(x);
                        let gh = DVector::from_vec(grad_h(x));
                        (bm.transpose() * gh).iter().copied().collect()
                    });
                    let c2 = c.clone();
                    let (k, n) = (sys.k, sys.n);
                    (
                        Box::new(move |x| c(x)),
                        Box::new(move |x| {
                            let mut m = DMatrix::zeros(k, n);
                            for col in 0..n {
                                let mut e = vec![0.0; n];
                                e[col] = 1.0;
                                let d = finite_directional(&c2, x, &e);
                                for r in 0..k {
                                    m[(r, col)] = d[r];
                                }
                            }
                            m
                        }),
                    )
                }
            };
        Self {
            p: sys.p,
            k: sys.k,
            j: sys.j.compile(sys.n),
            g: sys.g.compile(sys.p),
            b: sys.b.compile(sys.k),
            h,
            grad,
            cjac,
            cval,
        }
    }

    fn efforts(&self, x: &[f64]) -> (DVector<f64>, DVector<f64>) {
        let grad = DVector::from_vec((self.grad)(x));
        let e = if self.p == 0 {
            DVector::zeros(0)
        } else {
            self.g.eval(x).transpose() * &grad
        };
        (grad, e)
    }

    fn flows(&self, flow: &Flow, x: &[f64], t: f64, e: &DVector<f64>) -> Result<DVector<f64>> {
        let f = match flow {
            Flow::Zero => DVector::zeros(self.p),
            Flow::Constant(v) => DVector::from_vec(v.clone()),
            Flow::Feedback(f) => DVector::from_vec(f(x, t)),
            Flow::Interconnection(d) => {
                let (fm, em) = d.eval_f64(x);
                if em.nrows() != em.ncols() {
                    return Err(Error::UnsolvableInterconnection { time: t });
                }
                let c = float::solve(em, e.clone()).ok_or(Error::UnsolvableInterconnection { time: t })?;
                fm * c
            }
        };
        if f.len() != self.p {
            return Err(Error::PortCountMismatch {
                expected: self.p,
                found: f.len(),
            });
        }
        Ok(f)
    }

    /// `(x', e, f)` at `(t, x)`.
    fn rhs(&self, flow: &Flow, t: f64, x: &[f64]) -> Result<(DVector<f64>, DVector<f64>, DVector<f64>)> {
        self.rhs_full(flow, t, x).map(|(xdot, e, f, _)| (xdot, e, f))
    }

    /// `(x', e, f, lambda)` at `(t, x)`.
    fn rhs_full(&self, flow: &Flow, t: f64, x: &[f64]) -> Result<(DVector<f64>, DVector<f64>, DVector<f64>, DVector<f64>)> {
        let (grad, e) = self.efforts(x);
        let f = self.flows(flow, x, t, &e)?;
        let mut xdot = self.j.eval(x) * &grad;
        if self.p > 0 {
            xdot += self.g.eval(x) * &f;
        }
        let mut lambda = DVector::zeros(self.k);
        if self.k > 0 {
            let b = self.b.eval(x);
            let dc = (self.cjac)(x);
            let a = &dc * &b;
            let rhs = -(&dc * &xdot);
            lambda = float::solve(a, rhs).ok_or(Error::DegenerateConstraint { time: t })?;
            xdot += b * &lambda;
        }
        Ok((xdot, e, f, lambda))
    }

    fn constraint_residual(&self, x: &[f64]) -> f64 {
        if self.k == 0 {
            0.0
        } else {
            (self.cval)(x).iter().map(|c| c.abs()).fold(0.0, f64::max)
        }
    }

    fn project(&self, x: &mut [f64]) {
        for _ in 0..3 {
            let c = DVector::from_vec((self.cval)(x));
            if c.amax() < 1e-15 {
                return;
            }
            let dc = (self.cjac)(x);
            let gram = &dc * dc.transpose();
            let Some(y) = float::solve(gram, c) else { return };
            let dx = dc.transpose() * y;
            for (xi, d) in x.iter_mut().zip(dx.iter()) {
                *xi -= d;
            }
        }
    }
}

fn finite_directional(f: &numeric::VectorFn, x: &[f64], v: &[f64]) -> Vec<f64> {
    let h = numeric::STEP;
    let plus: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + h * b).collect();
    let minus: Vec<f64> = x.iter().zip(v).map(|(a, b)| a - h * b).collect();
    f(&plus).iter().zip(f(&minus)).map(|(a, b)| (a - b) / (2.0 * h)).collect()
}

fn finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// The right-hand side `x'` and the multipliers `lambda` at `(t, x)`.
pub fn vector_field_at(sys: &PortHamSystem, flow: &Flow, t: f64, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    check_dim(sys.n, x.len())?;
    let (xdot, _, _, lambda) = Compiled::new(sys).rhs_full(flow, t, x)?;
    Ok((xdot.iter().copied().collect(), lambda.iter().copied().collect()))
}

/// Integrates and returns whatever trajectory was computed, plus the error
/// that stopped the integration, if any.
pub fn simulate_partial(sys: &PortHamSystem, flow: &Flow, x0: &[f64], opts: &SimOptions) -> (Trajectory, Option<Error>) {
    let mut traj = Trajectory::default();
    if x0.len() != sys.n {
        return (traj, Some(Error::DimensionMismatch { expected: sys.n, found: x0.len() }));
    }
    if !(opts.step > 0.0) {
        return (traj, Some(Error::Invalid("step must be positive".into())));
    }
    let c = Compiled::new(sys);
    let res0 = c.constraint_residual(x0);
    if res0 > 1e-10 {
        return (traj, Some(Error::InitialConstraintViolation { residual: res0 }));
    }
    let record = |traj: &mut Trajectory, t: f64, x: &[f64], w: f64| -> Result<()> {
        let (_, e, f) = c.rhs(flow, t, x)?;
        traj.times.push(t);
        traj.states.push(x.to_vec());
        traj.energy.push((c.h)(x));
        traj.power.push(e.dot(&f));
        traj.efforts.push(e.iter().copied().collect());
        traj.flows.push(f.iter().copied().collect());
        traj.constraint_res.push(c.constraint_residual(x));
        traj.work.push(w);
        Ok(())
    };
    if let Err(e) = record(&mut traj, opts.t0, x0, 0.0) {
        return (traj, Some(e));
    }
    let n = sys.n;
    let mut rhs = |t: f64, y: &[f64]| -> Result<Vec<f64>> {
        let (xdot, e, f) = c.rhs(flow, t, &y[..n])?;
        let mut out: Vec<f64> = xdot.iter().copied().collect();
        out.push(e.dot(&f));
        Ok(out)
    };
    let mut y: Vec<f64> = x0.iter().copied().chain([0.0]).collect();
    let steps = integrate::step_count(opts.t0, opts.t1, opts.step);
    for i in 0..steps {
        let t = opts.t0 + i as f64 * opts.step;
        let t_next = opts.t0 + (i + 1) as f64 * opts.step;
        let next = match integrate::rk4_step(&mut rhs, t, &y, opts.step) {
            Ok(v) => v,
            Err(e) => return (traj, Some(e)),
        };
        if !finite(&next) {
            return (
                traj,
                Some(Error::IntegrationBlowup {
                    time: t_next,
                    last_valid_time: t,
                }),
            );
        }
        y = next;
        if opts.project && c.k > 0 {
            c.project(&mut y[..n]);
        }
        if let Err(e) = record(&mut traj, t_next, &y[..n], y[n]) {
            return (traj, Some(e));
        }
    }
    (traj, None)
}

/// RK4 integration of `x' = J dH + g f` with efforts recorded at every step.
pub fn simulate(sys: &PortHamSystem, flow: &Flow, x0: &[f64], opts: &SimOptions) -> Result<Trajectory> {
    if sys.k > 0 {
        return Err(Error::Invalid("system has constraints; use simulate_constrained".into()));
    }
    match simulate_partial(sys, flow, x0, opts) {
        (t, None) => Ok(t),
        (_, Some(e)) => Err(e),
    }
}

/// As [`simulate`] with multipliers `lambda` from the hidden constraint
/// `d/dt (b^T dH/dx) = 0`, optionally projecting after each step.
pub fn simulate_constrained(sys: &PortHamSystem, flow: &Flow, x0: &[f64], opts: &SimOptions) -> Result<Trajectory> {
    match simulate_partial(sys, flow, x0, opts) {
        (t, None) => Ok(t),
        (_, Some(e)) => Err(e),
    }
}

fn check_maximal_isotropic(delta: &Subspace, p: usize) -> Result<()> {
    check_dim(2 * p, delta.ambient_dim())?;
    if delta.dim() != p {
        return Err(Error::NotMaximalIsotropic(format!("dim Delta = {}, expected {p}", delta.dim())));
    }
    if !bigvec::is_isotropic(delta) {
        return Err(Error::NotMaximalIsotropic("e(f) does not vanish on Delta".into()));
    }
    Ok(())
}

/// `D = {(J a + g f, a) : (f, g^T a) in Delta}` at a point.
pub fn dirac_from_interconnection(j: &[Vector], g: &[Vector], delta: &Subspace) -> Result<IsotropicSubspace> {
    let n = j.len();
    let p = delta.ambient_dim() / 2;
    check_dim(n, g.len())?;
    for r in g {
        check_dim(p, r.len())?;
    }
    check_maximal_isotropic(delta, p)?;
    let d = delta.basis();
    // unknowns (a in Q^n, c in Q^dim Delta) with g^T a - E c = 0
    let rows: Vec<Vector> = (0..p)
        .map(|r| {
            (0..n)
                .map(|i| g[i][r].clone())
                .chain(d.iter().map(|v| -v[p + r].clone()))
                .collect()
        })
        .collect();
    let kernel = linalg::kernel(&rows, n + d.len());
    let elements = kernel.into_iter().map(|sol| {
        let a = &sol[..n];
        let c = &sol[n..];
        let f: Vector = (0..p).map(|r| d.iter().zip(c).map(|(v, ci)| &v[r] * ci).sum()).collect();
        let x: Vector = (0..n)
            .map(|i| linalg::dot(&j[i], a) + linalg::dot(&g[i], &f))
            .collect();
        x.into_iter().chain(a.iter().cloned()).collect::<Vector>()
    });
    IsotropicSubspace::from_subspace(Subspace::span(2 * n, elements)?)
}

/// `J + G` on `R^{n+p}` with `G^{i, n+a} = g_{ia}`, so that the
/// `R^p` coordinates of `#_{J+G} dH` are the efforts.
pub fn extended_bivector(j: &[Vec<Poly>], g: &[Vec<Poly>]) -> Result<Bivector> {
    let n = j.len();
    check_dim(n, g.len())?;
    let p = g.first().map_or(0, Vec::len);
    let total = n + p;
    let jb = j_bivector(j)?.embed(total, 0);
    let mut out = jb;
    for (i, row) in g.iter().enumerate() {
        check_dim(p, row.len())?;
        for (a, c) in row.iter().enumerate() {
            out.set(i, n + a, c.embed(total, 0))?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyCheck {
    pub pass: bool,
    pub maximal: bool,
    pub isotropic: bool,
    /// `(point, (f, e), e(f))` where the pairing fails.
    pub witness: Option<(Vec<String>, Vec<String>, String)>,
}

/// Checks at every sample point that `Delta(x)` has dimension `p` and that
/// `e(f) = 0` on it.
pub fn check_energy_preserving(delta: &Interconnection, sampler: &Sampler) -> EnergyCheck {
    let p = delta.p;
    let mut out = EnergyCheck {
        pass: true,
        maximal: true,
        isotropic: true,
        witness: None,
    };
    for x in sampler.points(delta.nvars) {
        let s = delta.at(&x);
        if s.dim() != p {
            out.maximal = false;
        }
        for v in s.basis() {
            let ef = linalg::dot(&v[..p], &v[p..]);
            if !ef.is_zero() && out.witness.is_none() {
                out.isotropic = false;
                out.witness = Some((rational::format_point(&x), rational::format_point(v), rational::format(&ef)));
            }
        }
        // symmetric cross terms
        let b = s.basis();
        for a in 0..b.len() {
            for c in a + 1..b.len() {
                if !bigvec::g_stacked(&b[a], &b[c]).is_zero() {
                    out.isotropic = false;
                    if out.witness.is_none() {
                        let sum: Vector = b[a].iter().zip(&b[c]).map(|(u, w)| u + w).collect();
                        let ef = linalg::dot(&sum[..p], &sum[p..]);
                        out.witness = Some((rational::format_point(&x), rational::format_point(&sum), rational::format(&ef)));
                    }
                }
            }
        }
        if !out.maximal {
            break;
        }
    }
    out.pass = out.maximal && out.isotropic;
    out
}

/// Direct sum of polynomial components on the product state space, with the
/// interconnection over the concatenated ports as flow rule.
pub fn compose_network(components: &[PortHamSystem], delta: &Interconnection) -> Result<(PortHamSystem, Flow)> {
    let n: usize = components.iter().map(|c| c.n).sum();
    let p: usize = components.iter().map(|c| c.p).sum();
    if delta.p != p {
        return Err(Error::PortCountMismatch { expected: p, found: delta.p });
    }
    check_dim(n, delta.nvars)?;
    let mut j = vec![vec![Poly::zero(n); n]; n];
    let mut g = vec![vec![Poly::zero(n); p]; n];
    let mut h = Poly::zero(n);
    let (mut off_x, mut off_p) = (0, 0);
    for c in components {
        if c.k > 0 {
            return Err(Error::Invalid("constrained components are not supported in networks".into()));
        }
        let (Some(cj), Some(cg), Some(ch)) = (c.j.as_poly(), c.g.as_poly(), c.h.as_poly()) else {
            return Err(Error::Invalid("network components must be polynomial".into()));
        };
        for a in 0..c.n {
            for b in 0..c.n {
                j[off_x + a][off_x + b] = cj[a][b].embed(n, off_x);
            }
            for b in 0..c.p {
                g[off_x + a][off_p + b] = cg[a][b].embed(n, off_x);
            }
        }
        h = h + ch.embed(n, off_x);
        off_x += c.n;
        off_p += c.p;
    }
    Ok((PortHamSystem::polynomial(j, g, h)?, Flow::Interconnection(delta.clone())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankProfile {
    pub constant: bool,
    pub rank: usize,
    /// `(rank, point)` pairs at a rank jump.
    pub jump: Option<((usize, Vec<String>), (usize, Vec<String>))>,
    pub image_involutive: Option<Check>,
    pub annihilator_closed: Option<Check>,
    pub schouten_vanishes: Option<Check>,
}

/// Samples `rank g`; when constant, checks integrability of
/// `D = {(#J a + Z, a) : a in ann im g, Z in im g}`.
pub fn rank_profile(j: &[Vec<Poly>], g: &[Vec<Poly>], sampler: &Sampler) -> Result<RankProfile> {
    let n = j.len();
    check_dim(n, g.len())?;
    let p = g.first().map_or(0, Vec::len);
    let cols: Vec<Vec<Poly>> = (0..p).map(|a| g.iter().map(|r| r[a].clone()).collect()).collect();
    let points = sampler.points(n);
    if let Some(((ra, pa), (rb, pb))) = span::rank_jump(n, n, &cols, &points) {
        return Ok(RankProfile {
            constant: false,
            rank: ra,
            jump: Some(((ra, rational::format_point(&pa)), (rb, rational::format_point(&pb)))),
            image_involutive: None,
            annihilator_closed: None,
            schouten_vanishes: None,
        });
    }
    let img = span::PolySpan::new(n, n, cols.clone(), *sampler);
    let sigma: Vec<OneForm> = img.annihilators().iter().map(|a| OneForm::new(a.clone())).collect::<Result<_>>()?;
    let sprime: Vec<VectorField> = cols.into_iter().map(VectorField::new).collect::<Result<_>>()?;
    let s = BigIsoStructure::with_sampler(n, sigma, sprime, j_bivector(j)?, *sampler)?;
    let r = s.check_integrability();
    let mut ann = r.condition2_sigma_closed.clone();
    ann.name = "ann im g closed under the J-bracket".into();
    let mut img_check = r.condition1_sprime_involutive.clone();
    img_check.name = "im g involutive".into();
    let mut sch = r.condition3_schouten.clone();
    sch.name = "[J,J] vanishes on ann im g".into();
    Ok(RankProfile {
        constant: true,
        rank: img.generic_rank(),
        jump: None,
        image_involutive: Some(img_check),
        annihilator_closed: Some(ann),
        schouten_vanishes: Some(sch),
    })
}
