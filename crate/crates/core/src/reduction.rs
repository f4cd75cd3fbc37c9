//! Infinitesimal symmetries, Noether's correspondence, momentum maps and
//! reduction of weak-Hamiltonian systems along an invariant submanifold.
//!
//! Submanifolds and quotients come from user-supplied polynomial charts:
//! `iota : R^d -> R^m` parametrizes `N`, `pi : R^d -> R^q` is the quotient
//! map in chart coordinates and `s : R^q -> R^d` a section of it. Nothing is
//! constructed automatically; every hypothesis is verified symbolically where
//! the data allows and by exact sampling otherwise.

use serde::Serialize;

use crate::bigvec::{self, IsotropicSubspace};
use crate::error::{check_dim, Error, Result};
use crate::integrate;
use crate::linalg::{self, Subspace, Vector};
use crate::mechanics::{self, ConstrainedSystem};
use crate::poly::Poly;
use crate::rational::{self, Rational};
use crate::sampling::Sampler;
use crate::span::{Membership, PolySpan};
use crate::structure::{nonzero_point, BigIsoStructure, Check, Failure};
use crate::tensor::{self, BigVectorField, OneForm, VectorField};

/// Infinitesimal generators `xi_i` of a Lie algebra action with
/// `[xi_i, xi_j] = sum_k c[i][j][k] xi_k` (brackets of vector fields).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupAction {
    m: usize,
    generators: Vec<VectorField>,
    constants: Vec<Vec<Vector>>,
}

impl GroupAction {
    pub fn new(m: usize, generators: Vec<VectorField>, constants: Vec<Vec<Vector>>) -> Result<Self> {
        let r = generators.len();
        for g in &generators {
            check_dim(m, g.dim())?;
        }
        check_dim(r, constants.len())?;
        for row in &constants {
            check_dim(r, row.len())?;
            for c in row {
                check_dim(r, c.len())?;
            }
        }
        for i in 0..r {
            for j in 0..r {
                let mut res = tensor::lie_bracket(&generators[i], &generators[j]);
                for (k, g) in generators.iter().enumerate() {
                    res = res.sub(&g.scale(&constants[i][j][k]));
                }
                if !res.is_zero() {
                    return Err(Error::Invalid(format!(
                        "[xi_{i}, xi_{j}] does not match the structure constants; residual {res}"
                    )));
                }
            }
        }
        Ok(Self { m, generators, constants })
    }

    pub fn abelian(m: usize, generators: Vec<VectorField>) -> Result<Self> {
        let r = generators.len();
        Self::new(m, generators, vec![vec![linalg::zeros(r); r]; r])
    }

    pub fn trivial(m: usize) -> Self {
        Self {
            m,
            generators: Vec::new(),
            constants: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[VectorField] {
        &self.generators
    }

    pub fn constants(&self) -> &[Vec<Vector>] {
        &self.constants
    }
}

/// Components `xi_i o J` of a momentum map.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumMap {
    pub components: Vec<Poly>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quotient {
    /// `pi`, `q` polynomials in the `d` chart variables
    pub map: Vec<Poly>,
    /// `s` with `pi o s = id`, `d` polynomials in `q` variables
    pub section: Vec<Poly>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubmanifoldChart {
    m: usize,
    d: usize,
    embedding: Vec<Poly>,
    quotient: Option<Quotient>,
    level_set: Vec<Poly>,
    retraction: Option<Vec<Poly>>,
}

fn compose_all(polys: &[Poly], subs: &[Poly]) -> Vec<Poly> {
    polys.iter().map(|p| p.compose(subs)).collect()
}

fn is_identity(polys: &[Poly]) -> bool {
    let n = polys.len();
    polys.iter().enumerate().all(|(i, p)| *p == Poly::var(n, i))
}

/// Rows `d p_i / d x_j` at `x`.
pub fn jacobian(polys: &[Poly], x: &[Rational]) -> Vec<Vector> {
    polys
        .iter()
        .map(|p| (0..p.nvars()).map(|j| p.partial(j).eval(x)).collect())
        .collect()
}

fn jacobian_f64(polys: &[Poly], x: &[f64]) -> Vec<Vec<f64>> {
    polys
        .iter()
        .map(|p| (0..p.nvars()).map(|j| p.partial(j).eval_f64(x)).collect())
        .collect()
}

impl SubmanifoldChart {
    pub fn new(m: usize, embedding: Vec<Poly>) -> Result<Self> {
        check_dim(m, embedding.len())?;
        let d = embedding.first().map_or(0, Poly::nvars);
        if embedding.iter().any(|p| p.nvars() != d) {
            return Err(Error::InvalidChart("embedding components use different variable counts".into()));
        }
        for u in Sampler::default().points(d) {
            let r = linalg::rank(&jacobian(&embedding, &u), d);
            if r != d {
                return Err(Error::InvalidChart(format!(
                    "embedding Jacobian has rank {r} < {d} at {:?}",
                    rational::format_point(&u)
                )));
            }
        }
        Ok(Self {
            m,
            d,
            embedding,
            quotient: None,
            level_set: Vec::new(),
            retraction: None,
        })
    }

    pub fn identity(m: usize) -> Self {
        Self::new(m, (0..m).map(|i| Poly::var(m, i)).collect()).expect("identity chart")
    }

    pub fn with_quotient(mut self, map: Vec<Poly>, section: Vec<Poly>) -> Result<Self> {
        let q = map.len();
        for p in &map {
            check_dim(self.d, p.nvars())?;
        }
        check_dim(self.d, section.len())?;
        for p in &section {
            check_dim(q, p.nvars())?;
        }
        if !is_identity(&compose_all(&map, &section)) {
            return Err(Error::InvalidChart("pi o s is not the identity".into()));
        }
        self.quotient = Some(Quotient { map, section });
        Ok(self)
    }

    /// Identity quotient `Q = N`.
    pub fn with_identity_quotient(self) -> Self {
        let d = self.d;
        let id: Vec<Poly> = (0..d).map(|i| Poly::var(d, i)).collect();
        self.with_quotient(id.clone(), id).expect("identity")
    }

    /// Functions on `M` vanishing on `N`.
    pub fn with_level_set(mut self, fns: Vec<Poly>) -> Result<Self> {
        for f in &fns {
            check_dim(self.m, f.nvars())?;
            let r = f.compose(&self.embedding);
            if !r.is_zero() {
                return Err(Error::InvalidChart(format!("level-set function {f} does not vanish on N")));
            }
        }
        self.level_set = fns;
        Ok(self)
    }

    /// `rho : R^m -> R^d` with `rho o iota = id`.
    pub fn with_retraction(mut self, rho: Vec<Poly>) -> Result<Self> {
        check_dim(self.d, rho.len())?;
        for p in &rho {
            check_dim(self.m, p.nvars())?;
        }
        if !is_identity(&compose_all(&rho, &self.embedding)) {
            return Err(Error::InvalidChart("rho o iota is not the identity".into()));
        }
        self.retraction = Some(rho);
        Ok(self)
    }

    pub fn ambient_dim(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn embedding(&self) -> &[Poly] {
        &self.embedding
    }

    pub fn quotient(&self) -> Option<&Quotient> {
        self.quotient.as_ref()
    }

    pub fn level_set(&self) -> &[Poly] {
        &self.level_set
    }

    pub fn retraction(&self) -> Option<&[Poly]> {
        self.retraction.as_deref()
    }

    pub fn point(&self, u: &[Rational]) -> Vector {
        self.embedding.iter().map(|p| p.eval(u)).collect()
    }

    /// Chart vector `v` with `D iota v = x`, if `x` is tangent to `N`.
    pub fn tangent_preimage(&self, u: &[Rational], x: &[Rational]) -> Option<Vector> {
        linalg::solve(&jacobian(&self.embedding, u), x, self.d)
    }
}

fn failure(left: String, right: String, detail: String, point: Option<Vec<Rational>>) -> Failure {
    Failure {
        left,
        right,
        detail,
        point: point.map(|x| rational::format_point(&x)),
    }
}

fn record(check: &mut Check, left: String, right: String, m: Membership, detail: String) {
    if let Membership::NotMember { residual, point } = m {
        check.pass = false;
        check.failures.push(failure(left, right, format!("{detail}; residual {residual}"), point));
    }
}

fn record_zero(check: &mut Check, sampler: &Sampler, left: String, right: String, r: &Poly, detail: String) {
    if !r.is_zero() {
        check.pass = false;
        let point = nonzero_point(sampler, r);
        check.failures.push(failure(left, right, format!("{detail} = {r}"), point));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub pass: bool,
    pub sprime_invariant: Check,
    pub sigma_invariant: Check,
    pub pi_invariant: Check,
}

/// `[Y, S'] in S'`, `L_Y Sigma in Sigma` and `(L_Y Pi)(Sigma, Sigma') = 0` on
/// spanning sections.
pub fn is_infinitesimal_symmetry(y: &VectorField, s: &BigIsoStructure) -> SymmetryReport {
    let mut c1 = Check::new("[Y, S'] in S'");
    let mut c2 = Check::new("L_Y Sigma in Sigma");
    let mut c3 = Check::new("(L_Y Pi)(Sigma, Sigma') = 0");
    for (k, z) in s.sprime().iter().enumerate() {
        let b = tensor::lie_bracket(y, z);
        record(&mut c1, "Y".into(), format!("Z[{k}]"), s.sprime_contains(&b), format!("[Y, Z[{k}]] = {b} not in S'"));
    }
    for (i, a) in s.sigma().iter().enumerate() {
        let l = tensor::lie_derivative_form(y, a);
        record(&mut c2, "Y".into(), format!("sigma[{i}]"), s.sigma_contains(&l), format!("L_Y sigma[{i}] = {l} not in Sigma"));
    }
    let lp = tensor::lie_derivative_bivector(y, s.pi());
    if !lp.is_zero() {
        for (i, a) in s.sigma().iter().enumerate() {
            for (t, b) in s.sigma_prime_sections().iter().enumerate() {
                let r = lp.eval_forms(a, b);
                record_zero(&mut c3, s.sampler(), format!("sigma[{i}]"), format!("beta[{t}]"), &r, format!("(L_Y Pi)(sigma[{i}], beta[{t}])"));
            }
        }
    }
    SymmetryReport {
        pass: c1.pass && c2.pass && c3.pass,
        sprime_invariant: c1,
        sigma_invariant: c2,
        pi_invariant: c3,
    }
}

/// `Z{f,h} - {Zf,h} - {f,Zh}` for `f` Hamiltonian and `h` weak-Hamiltonian.
pub fn symmetry_is_derivation_check(z: &VectorField, s: &BigIsoStructure, f: &Poly, h: &Poly) -> Result<Poly> {
    let fh = s.poisson_bracket(f, h)?;
    let zfh = s.poisson_bracket(&z.apply(f), h)?;
    let fzh = s.poisson_bracket(f, &z.apply(h))?;
    Ok(z.apply(&fh) - zfh - fzh)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoetherReport {
    pub integrable: bool,
    pub warning: Option<String>,
    /// `{f, H} = X_f H`
    pub bracket: String,
    /// `X_H f + {f, H}`, zero by orthogonality of `(X_f, df)` and `(X_H, dH)`
    pub orthogonality_residual: String,
    pub orthogonality_holds: bool,
    pub first_integral: bool,
    /// `max |f(t) - f(0)|` along the RK4 flow of `X_H`
    pub drift: Option<f64>,
    /// `max |df/dt + {f, H}|` with `df/dt` measured along the flow
    pub rate_residual: Option<f64>,
    /// `max |df/dt - {f, H}|`, reported for comparison with the opposite
    /// bracket ordering
    pub rate_residual_opposite: Option<f64>,
}

/// Measured `d/dt f(phi_t(x))` at `t = 0` by a five-point stencil of RK4
/// sub-steps of size `delta`.
fn measured_rate(field: &VectorField, f: &Poly, x: &[f64], delta: f64) -> Result<f64> {
    let mut rhs = |_: f64, y: &[f64]| Ok(field.eval_f64(y));
    let fwd1 = integrate::rk4_step(&mut rhs, 0.0, x, delta)?;
    let fwd2 = integrate::rk4_step(&mut rhs, 0.0, &fwd1, delta)?;
    let bwd1 = integrate::rk4_step(&mut rhs, 0.0, x, -delta)?;
    let bwd2 = integrate::rk4_step(&mut rhs, 0.0, &bwd1, -delta)?;
    let v = |y: &[f64]| f.eval_f64(y);
    Ok((-v(&fwd2) + 8.0 * v(&fwd1) - 8.0 * v(&bwd1) + v(&bwd2)) / (12.0 * delta))
}

/// Symbolic Noether correspondence; with `x0`, also conservation of `f` and
/// the rate identity along the RK4 flow of `X_H = #Pi dH`.
pub fn noether_check(s: &BigIsoStructure, f: &Poly, h: &Poly, x0: Option<&[f64]>, t1: f64, step: f64) -> Result<NoetherReport> {
    let integrable = s.check_integrability().overall;
    let bracket = s.poisson_bracket(f, h)?;
    let xh = s.weak_hamiltonian_field(h, None)?.vector;
    let ortho = xh.apply(f) + bracket.clone();
    let mut report = NoetherReport {
        integrable,
        warning: (!integrable).then(|| "structure is not integrable; first-integral properties need not hold".to_string()),
        bracket: bracket.to_string(),
        orthogonality_residual: ortho.to_string(),
        orthogonality_holds: ortho.is_zero(),
        first_integral: bracket.is_zero(),
        drift: None,
        rate_residual: None,
        rate_residual_opposite: None,
    };
    if let Some(x0) = x0 {
        check_dim(s.dim(), x0.len())?;
        let path = integrate::rk4(|_, y: &[f64]| Ok(xh.eval_f64(y)), x0, 0.0, t1, step)?;
        let f0 = f.eval_f64(x0);
        let mut drift: f64 = 0.0;
        let (mut rate, mut opposite): (f64, f64) = (0.0, 0.0);
        for x in &path {
            if !x.iter().all(|v| v.is_finite()) {
                return Err(Error::IntegrationBlowup { time: f64::NAN, last_valid_time: f64::NAN });
            }
            drift = drift.max((f.eval_f64(x) - f0).abs());
            let measured = measured_rate(&xh, f, x, 1e-3)?;
            let b = bracket.eval_f64(x);
            rate = rate.max((measured + b).abs());
            opposite = opposite.max((measured - b).abs());
        }
        report.drift = Some(drift);
        report.rate_residual = Some(rate);
        report.rate_residual_opposite = Some(opposite);
    }
    Ok(report)
}

/// `iota^* V = {(v, D iota^T a) : (D iota v, a) in V}` for `V` in `R^m + R^m*`.
pub fn pullback_subspace(v: &Subspace, d_iota: &[Vector], d: usize) -> Subspace {
    let m = d_iota.len();
    let basis = v.basis();
    // unknowns (v in R^d, c): D iota v - sum c_k X_k = 0
    let rows: Vec<Vector> = (0..m)
        .map(|i| d_iota[i].iter().cloned().chain(basis.iter().map(|e| -e[i].clone())).collect())
        .collect();
    let sols = linalg::kernel(&rows, d + basis.len());
    let out = sols.into_iter().map(|sol| {
        let c = &sol[d..];
        let a: Vector = (0..m).map(|i| basis.iter().zip(c).map(|(e, ck)| &e[m + i] * ck).sum()).collect();
        let form: Vector = (0..d).map(|j| (0..m).map(|i| &d_iota[i][j] * &a[i]).sum()).collect();
        sol[..d].iter().cloned().chain(form).collect::<Vector>()
    });
    Subspace::span(2 * d, out).expect("length")
}

/// `pi_* W = {(D pi v, a) : (v, D pi^T a) in W}` for `W` in `R^d + R^d*`.
pub fn pushforward_subspace(w: &Subspace, d_pi: &[Vector], d: usize) -> Subspace {
    let q = d_pi.len();
    let basis = w.basis();
    // unknowns (c, a in R^q): sum c_k b_k - D pi^T a = 0
    let rows: Vec<Vector> = (0..d)
        .map(|j| {
            basis
                .iter()
                .map(|e| e[d + j].clone())
                .chain((0..q).map(|i| -d_pi[i][j].clone()))
                .collect()
        })
        .collect();
    let sols = linalg::kernel(&rows, basis.len() + q);
    let out = sols.into_iter().map(|sol| {
        let c = &sol[..basis.len()];
        let v: Vector = (0..d).map(|j| basis.iter().zip(c).map(|(e, ck)| &e[j] * ck).sum()).collect();
        let x: Vector = (0..q).map(|i| linalg::dot(&d_pi[i], &v)).collect();
        x.into_iter().chain(sol[basis.len()..].iter().cloned()).collect::<Vector>()
    });
    Subspace::span(2 * q, out).expect("length")
}

/// `iota^* E` at the chart point `u`.
pub fn pullback_at(s: &BigIsoStructure, chart: &SubmanifoldChart, u: &[Rational]) -> Subspace {
    pullback_subspace(&s.e_at(&chart.point(u)), &jacobian(&chart.embedding, u), chart.d)
}

/// `iota^* E'` at the chart point `u`.
pub fn pullback_prime_at(s: &BigIsoStructure, chart: &SubmanifoldChart, u: &[Rational]) -> Subspace {
    pullback_subspace(&s.e_prime_at(&chart.point(u)), &jacobian(&chart.embedding, u), chart.d)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulledStructure {
    pub dim: usize,
    pub isotropic: bool,
    pub samples: usize,
}

/// Samples `iota^* E`; `N` is E-proper when the dimension is constant.
pub fn pullback_structure(s: &BigIsoStructure, chart: &SubmanifoldChart) -> Result<PulledStructure> {
    check_dim(s.dim(), chart.m)?;
    let points = s.sampler().points(chart.d);
    let mut first: Option<(usize, Vec<Rational>)> = None;
    let mut isotropic = true;
    for u in &points {
        let p = pullback_at(s, chart, u);
        isotropic &= bigvec::is_isotropic(&p);
        match &first {
            None => first = Some((p.dim(), u.clone())),
            Some((d0, u0)) if *d0 != p.dim() => {
                return Err(Error::NotProper {
                    rank_a: *d0,
                    point_a: rational::format_point(u0),
                    rank_b: p.dim(),
                    point_b: rational::format_point(u),
                })
            }
            _ => {}
        }
    }
    Ok(PulledStructure {
        dim: first.map_or(0, |f| f.0),
        isotropic,
        samples: points.len(),
    })
}

/// One solution `X` of `(X, d(h o iota)) in iota^* E'` at `u`: the
/// weak-Hamiltonian field of the constrained system `(N, iota^* E, h)`.
pub fn restricted_weak_hamiltonian_at(s: &BigIsoStructure, chart: &SubmanifoldChart, h: &Poly, u: &[Rational]) -> Result<Vector> {
    check_dim(chart.m, h.nvars())?;
    let d = chart.d;
    let hr = h.compose(&chart.embedding);
    let dh: Vector = (0..d).map(|j| hr.partial(j).eval(u)).collect();
    let w = pullback_prime_at(s, chart, u);
    let cols = linalg::transpose(w.basis(), 2 * d);
    let c = linalg::solve(&cols[d..], &dh, w.dim()).ok_or_else(|| Error::InfeasibleHamiltonian {
        reason: "d(h o iota) is not in the covector projection of iota^* E'".into(),
        point: Some(rational::format_point(u)),
    })?;
    Ok((0..d).map(|j| linalg::dot(&cols[j], &c)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentumReport {
    pub pass: bool,
    pub membership: Check,
    pub equivariance: Check,
    /// Equivariance is checked infinitesimally: `xi_i(J_j) = sum_k c_ij^k J_k`.
    pub equivariance_note: String,
}

pub const EQUIVARIANCE_NOTE: &str =
    "global equivariance replaced by infinitesimal bracket compatibility xi_i(J_j) = sum_k c_ij^k J_k";

/// `(xi_M, d(xi o J)) in Gamma E` for every generator, plus infinitesimal
/// equivariance.
pub fn momentum_map_check(action: &GroupAction, j: &MomentumMap, s: &BigIsoStructure) -> Result<MomentumReport> {
    check_dim(action.dim(), j.components.len())?;
    let mut mem = Check::new("(xi_M, d(xi o J)) in E");
    let mut eqv = Check::new("J equivariant");
    for (i, (g, ji)) in action.generators.iter().zip(&j.components).enumerate() {
        check_dim(s.dim(), ji.nvars())?;
        let u = BigVectorField { vector: g.clone(), form: tensor::exterior_d(ji) };
        record(&mut mem, format!("xi[{i}]"), format!("J[{i}]"), s.contains_e(&u), format!("(xi[{i}], dJ[{i}]) not in E"));
    }
    let r = action.dim();
    for a in 0..r {
        for b in 0..r {
            let mut res = action.generators[a].apply(&j.components[b]);
            for k in 0..r {
                res = res - j.components[k].scale(&action.constants[a][b][k]);
            }
            record_zero(&mut eqv, s.sampler(), format!("xi[{a}]"), format!("J[{b}]"), &res, format!("xi[{a}](J[{b}]) - c J"));
        }
    }
    Ok(MomentumReport {
        pass: mem.pass && eqv.pass,
        membership: mem,
        equivariance: eqv,
        equivariance_note: EQUIVARIANCE_NOTE.into(),
    })
}

/// Cotangent lift of an action on `Q = R^n` to `T*Q = R^{2n}` and its
/// momentum map `(xi o J)(q, p) = p(xi_Q(q))`. The returned residuals are
/// `xi_{T*Q} - #P d(xi o J)` with the lift from the coordinate formula
/// `xi^j d/dq_j - p_j (d xi^j / d q_i) d/dp_i`.
pub fn cotangent_momentum_map(action: &GroupAction) -> Result<(GroupAction, MomentumMap, Vec<VectorField>)> {
    let n = action.m;
    let m = 2 * n;
    let p = mechanics::canonical_bivector(n);
    let mut lifts = Vec::new();
    let mut comps = Vec::new();
    let mut residuals = Vec::new();
    for g in &action.generators {
        let xi: Vec<Poly> = g.comps().iter().map(|c| c.embed(m, 0)).collect();
        let j = crate::poly::sum(m, xi.iter().enumerate().map(|(a, c)| c * &Poly::var(m, n + a)));
        let mut lift: Vec<Poly> = xi.clone();
        for i in 0..n {
            lift.push(-crate::poly::sum(m, xi.iter().enumerate().map(|(a, c)| &Poly::var(m, n + a) * &c.partial(i))));
        }
        let lift = VectorField::new(lift)?;
        residuals.push(lift.sub(&p.sharp(&tensor::exterior_d(&j))));
        lifts.push(lift);
        comps.push(j);
    }
    let lifted = GroupAction::new(m, lifts, action.constants.clone())?;
    Ok((lifted, MomentumMap { components: comps }, residuals))
}

/// Conditions a) `[xi_Q, L] in L` and b) `xi_Q in L` for an action on `Q`.
pub fn strong_invariance(sys: &ConstrainedSystem, action: &GroupAction) -> (Check, Check) {
    let n = sys.q_dim();
    let span = PolySpan::new(n, n, sys.l_basis().iter().map(|x| x.comps().to_vec()).collect(), Sampler::default());
    let mut a = Check::new("action preserves L");
    let mut b = Check::new("orbits tangent to L");
    for (i, g) in action.generators.iter().enumerate() {
        for (k, x) in sys.l_basis().iter().enumerate() {
            let br = tensor::lie_bracket(g, x);
            record(&mut a, format!("xi[{i}]"), format!("L[{k}]"), span.contains(br.comps()), format!("[xi[{i}], L[{k}]] = {br} not in L"));
        }
        record(&mut b, format!("xi[{i}]"), String::new(), span.contains(g.comps()), format!("xi[{i}] = {g} not in L"));
    }
    (a, b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub witness: Option<Vec<String>>,
}

impl Hypothesis {
    fn ok(name: &str, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass: true,
            detail: detail.into(),
            witness: None,
        }
    }

    fn fail(name: &str, detail: impl Into<String>, witness: Option<Vec<String>>) -> Self {
        Self {
            name: name.into(),
            pass: false,
            detail: detail.into(),
            witness,
        }
    }

    fn from_check(name: &str, c: &Check) -> Self {
        match c.failures.first() {
            None => Self::ok(name, c.name.clone()),
            Some(f) => Self::fail(name, format!("{}: {}", c.name, f.detail), f.point.clone()),
        }
    }
}

pub mod names {
    pub const SYMMETRY: &str = "action preserves E";
    pub const MOMENTUM: &str = "momentum map";
    pub const EQUIVARIANCE: &str = "momentum map equivariance";
    pub const LEVEL: &str = "N in J^-1(0)";
    pub const REGULAR: &str = "0 regular value of J";
    pub const FREE: &str = "action free on N";
    pub const TANGENT_ACTION: &str = "action tangent to N";
    pub const FIBERS: &str = "orbits are quotient fibers";
    pub const CONDITION_R: &str = "condition R";
    pub const R1: &str = "R1";
    pub const R2: &str = "R2";
    pub const WEAK_HAM: &str = "H weak-Hamiltonian";
    pub const H_INVARIANCE: &str = "H invariance";
    pub const TANGENT: &str = "X_H tangent to N";
    pub const PROJECTABLE: &str = "X_H projectable";
    pub const DESCENDS: &str = "H descends to Q";
    pub const FIBER_CONSISTENT: &str = "E^red fiber consistency";
    pub const ISOTROPIC: &str = "E^red isotropic";
    pub const REDUCED_PAIR: &str = "reduced pair in (E^red)'";
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub hypotheses: Vec<Hypothesis>,
    pub h_red: Option<Poly>,
    /// `E^red` when it is the same subspace at every sample
    pub e_red: Option<IsotropicSubspace>,
    /// Courant closure of the materialized `E^red`
    pub e_red_integrable: Option<bool>,
    pub x_h: VectorField,
    s: BigIsoStructure,
    chart: SubmanifoldChart,
}

impl Reduction {
    pub fn passed(&self) -> bool {
        self.hypotheses.iter().all(|h| h.pass)
    }

    pub fn first_failure(&self) -> Option<&Hypothesis> {
        self.hypotheses.iter().find(|h| !h.pass)
    }

    pub fn hypothesis(&self, name: &str) -> Option<&Hypothesis> {
        self.hypotheses.iter().find(|h| h.name == name)
    }

    fn quotient(&self) -> &Quotient {
        self.chart.quotient.as_ref().expect("checked")
    }

    pub fn reduced_dim(&self) -> usize {
        self.quotient().map.len()
    }

    /// `E^red` at `y`, computed at the chart point `s(y)`.
    pub fn e_red_at(&self, y: &[Rational]) -> Subspace {
        let u: Vector = self.quotient().section.iter().map(|p| p.eval(y)).collect();
        let pulled = pullback_at(&self.s, &self.chart, &u);
        pushforward_subspace(&pulled, &jacobian(&self.quotient().map, &u), self.chart.d)
    }

    /// `pi_*(X_H)` at `y`, exact.
    pub fn reduced_field_at(&self, y: &[Rational]) -> Result<Vector> {
        let u: Vector = self.quotient().section.iter().map(|p| p.eval(y)).collect();
        let x = self.chart.point(&u);
        let v = self
            .chart
            .tangent_preimage(&u, &self.x_h.eval(&x))
            .ok_or_else(|| Error::ReducibilityFailure {
                condition: names::TANGENT.into(),
                witness: format!("{:?}", rational::format_point(&x)),
            })?;
        Ok(linalg::mat_vec(&jacobian(&self.quotient().map, &u), &v))
    }

    /// `pi_*(X_H)` at `y` in floating point.
    pub fn reduced_field_f64(&self, y: &[f64]) -> Vec<f64> {
        let q = self.quotient();
        let u: Vec<f64> = q.section.iter().map(|p| p.eval_f64(y)).collect();
        let x: Vec<f64> = self.chart.embedding.iter().map(|p| p.eval_f64(&u)).collect();
        let xh = self.x_h.eval_f64(&x);
        let jac = jacobian_f64(&self.chart.embedding, &u);
        let di = nalgebra::DMatrix::from_fn(self.chart.m, self.chart.d, |i, j| jac[i][j]);
        let rhs = di.transpose() * nalgebra::DVector::from_vec(xh);
        let v = linalg::float::solve(di.transpose() * &di, rhs).unwrap_or_else(|| nalgebra::DVector::zeros(self.chart.d));
        let dp = jacobian_f64(&q.map, &u);
        dp.iter().map(|row| row.iter().zip(v.iter()).map(|(a, b)| a * b).sum()).collect()
    }

    /// Integrates the full system from `iota(s(y0))` and the reduced one from
    /// `y0`; returns `max_t |pi(rho(x(t))) - y(t)|`.
    pub fn compare_trajectories(&self, y0: &[f64], t1: f64, step: f64) -> Result<f64> {
        let rho = self
            .chart
            .retraction
            .as_ref()
            .ok_or_else(|| Error::InvalidChart("trajectory comparison needs a retraction".into()))?;
        let q = self.quotient();
        let u0: Vec<f64> = q.section.iter().map(|p| p.eval_f64(y0)).collect();
        let x0: Vec<f64> = self.chart.embedding.iter().map(|p| p.eval_f64(&u0)).collect();
        let full = integrate::rk4(|_, x: &[f64]| Ok(self.x_h.eval_f64(x)), &x0, 0.0, t1, step)?;
        let red = integrate::rk4(|_, y: &[f64]| Ok(self.reduced_field_f64(y)), y0, 0.0, t1, step)?;
        let mut worst: f64 = 0.0;
        for (x, y) in full.iter().zip(&red) {
            let u: Vec<f64> = rho.iter().map(|p| p.eval_f64(x)).collect();
            let proj: Vec<f64> = q.map.iter().map(|p| p.eval_f64(&u)).collect();
            for (a, b) in proj.iter().zip(y) {
                worst = worst.max((a - b).abs());
            }
        }
        Ok(worst)
    }
}

/// Evaluates every reduction hypothesis and, where possible, the reduced data.
pub fn check_reduction(
    s: &BigIsoStructure,
    action: &GroupAction,
    j: &MomentumMap,
    h: &Poly,
    chart: &SubmanifoldChart,
) -> Result<Reduction> {
    let m = s.dim();
    check_dim(m, action.m)?;
    check_dim(m, chart.m)?;
    check_dim(m, h.nvars())?;
    let quotient = chart
        .quotient
        .as_ref()
        .ok_or_else(|| Error::InvalidChart("reduction needs a quotient map".into()))?;
    let sampler = *s.sampler();
    let d = chart.d;
    let r = action.dim();
    let chart_points = sampler.points(d);
    let mut hyps = Vec::new();

    // the action
    let mut sym = Check::new("generators are infinitesimal symmetries");
    for (i, g) in action.generators.iter().enumerate() {
        let rep = is_infinitesimal_symmetry(g, s);
        for c in [rep.sprime_invariant, rep.sigma_invariant, rep.pi_invariant] {
            for f in c.failures {
                sym.pass = false;
                sym.failures.push(Failure { left: format!("xi[{i}]"), ..f });
            }
        }
    }
    hyps.push(Hypothesis::from_check(names::SYMMETRY, &sym));
    let mom = momentum_map_check(action, j, s)?;
    hyps.push(Hypothesis::from_check(names::MOMENTUM, &mom.membership));
    let mut eq = Hypothesis::from_check(names::EQUIVARIANCE, &mom.equivariance);
    eq.detail = format!("{} ({})", eq.detail, EQUIVARIANCE_NOTE);
    hyps.push(eq);

    // N
    let on_level: Vec<(usize, Poly)> = j
        .components
        .iter()
        .map(|c| c.compose(&chart.embedding))
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .collect();
    hyps.push(match on_level.first() {
        None => Hypothesis::ok(names::LEVEL, "J o iota = 0"),
        Some((i, c)) => Hypothesis::fail(
            names::LEVEL,
            format!("J[{i}] o iota = {c}"),
            nonzero_point(&sampler, c).map(|x| rational::format_point(&x)),
        ),
    });
    let grads: Vec<OneForm> = j.components.iter().map(tensor::exterior_d).collect();
    let mut regular = Hypothesis::ok(names::REGULAR, format!("rank dJ = {r} on N"));
    let mut free = Hypothesis::ok(names::FREE, format!("generators independent on N (rank {r})"));
    let mut tangent_action = Hypothesis::ok(names::TANGENT_ACTION, "generators tangent to N");
    let mut fibers = Hypothesis::ok(names::FIBERS, "chart lifts of the generators span ker D pi");
    let mut cond_r = Hypothesis::ok(names::CONDITION_R, "(xi|N, a) in E with a in ann TN");
    let mut r1 = Hypothesis::ok(names::R1, "ker D pi + 0 inside iota^* E");
    for u in &chart_points {
        let x = chart.point(u);
        let di = jacobian(&chart.embedding, u);
        let dp = jacobian(&quotient.map, u);
        let wit = || Some(rational::format_point(u));
        if regular.pass {
            let rows: Vec<Vector> = grads.iter().map(|g| g.eval(&x)).collect();
            let rk = linalg::rank(&rows, m);
            if rk != r {
                regular = Hypothesis::fail(names::REGULAR, format!("rank dJ = {rk} < {r}"), wit());
            }
        }
        let gens: Vec<Vector> = action.generators.iter().map(|g| g.eval(&x)).collect();
        if free.pass {
            let rk = linalg::rank(&gens, m);
            if rk != r {
                free = Hypothesis::fail(names::FREE, format!("generators have rank {rk} < {r}"), wit());
            }
        }
        let mut lifts = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            match chart.tangent_preimage(u, g) {
                Some(v) => lifts.push(v),
                None if tangent_action.pass => {
                    tangent_action = Hypothesis::fail(names::TANGENT_ACTION, format!("xi[{i}] not tangent to N"), wit())
                }
                None => {}
            }
        }
        let kernel = Subspace::span(d, linalg::kernel(&dp, d)).expect("length");
        if fibers.pass && lifts.len() == r {
            let orbit = Subspace::span(d, lifts.clone()).expect("length");
            if orbit != kernel {
                fibers = Hypothesis::fail(
                    names::FIBERS,
                    format!("orbit directions have dim {}, ker D pi has dim {}", orbit.dim(), kernel.dim()),
                    wit(),
                );
            }
        }
        let e = s.e_at(&x);
        if cond_r.pass {
            // (xi, a) in E_x with D iota^T a = 0
            let ann_tn = Subspace::span(m, linalg::kernel(&linalg::transpose(&di, d), m)).expect("length");
            let target = bigvec::direct_sum(&Subspace::full(m), &ann_tn).intersection(&e);
            for (i, g) in gens.iter().enumerate() {
                let xs = bigvec::project_vector(&target);
                if !xs.contains(g) {
                    cond_r = Hypothesis::fail(names::CONDITION_R, format!("no a in ann TN with (xi[{i}], a) in E"), wit());
                    break;
                }
            }
        }
        if r1.pass {
            let pulled = pullback_subspace(&e, &di, d);
            for w in kernel.basis() {
                let v: Vector = w.iter().cloned().chain(linalg::zeros(d)).collect();
                if !pulled.contains(&v) {
                    r1 = Hypothesis::fail(
                        names::R1,
                        format!("({:?}, 0) not in iota^* E", rational::format_point(w)),
                        wit(),
                    );
                    break;
                }
            }
        }
    }
    let r2 = if sym.pass && tangent_action.pass && fibers.pass {
        Hypothesis::ok(names::R2, "vertical fields are spanned by generators that are symmetries of E tangent to N")
    } else {
        Hypothesis::fail(
            names::R2,
            "not established: needs generators that are symmetries of E, tangent to N, spanning the fibers",
            None,
        )
    };
    hyps.extend([regular, free, tangent_action, fibers, cond_r, r1, r2]);

    // H
    let weak = s.weak_hamiltonian_field(h, None);
    hyps.push(match &weak {
        Ok(_) => Hypothesis::ok(names::WEAK_HAM, "dH in Sigma'"),
        Err(e) => Hypothesis::fail(names::WEAK_HAM, e.to_string(), None),
    });
    let x_h = weak.map(|w| w.vector).unwrap_or_else(|_| VectorField::zero(m));
    let mut inv = Check::new("xi_M H = 0");
    for (i, g) in action.generators.iter().enumerate() {
        record_zero(&mut inv, &sampler, format!("xi[{i}]"), "H".into(), &g.apply(h), format!("xi[{i}](H)"));
    }
    hyps.push(Hypothesis::from_check(names::H_INVARIANCE, &inv));
    let mut tan = Check::new("X_H f = 0 on N for the functions cutting out N");
    for (i, f) in j.components.iter().chain(&chart.level_set).enumerate() {
        let rr = x_h.apply(f).compose(&chart.embedding);
        record_zero(&mut tan, &sampler, "X_H".into(), format!("f[{i}]"), &rr, format!("X_H(f[{i}]) o iota"));
    }
    for u in &chart_points {
        if chart.tangent_preimage(u, &x_h.eval(&chart.point(u))).is_none() {
            tan.pass = false;
            tan.failures.push(failure("X_H".into(), "TN".into(), "X_H not tangent to N".into(), Some(u.clone())));
            break;
        }
    }
    hyps.push(Hypothesis::from_check(names::TANGENT, &tan));
    // route i: [xi, X_H] = 0; route ii: iota^* E' meets TN + 0 exactly in T F
    let invariant_field = action.generators.iter().all(|g| tensor::lie_bracket(g, &x_h).is_zero());
    let projectable = if invariant_field {
        Hypothesis::ok(names::PROJECTABLE, "X_H is G-invariant")
    } else {
        let mut bad = None;
        for u in &chart_points {
            let dp = jacobian(&quotient.map, u);
            let kernel = Subspace::span(d, linalg::kernel(&dp, d)).expect("length");
            let pulled = pullback_prime_at(s, chart, u);
            let vert = bigvec::project_vector(&pulled.intersection(&bigvec::direct_sum(&Subspace::full(d), &Subspace::zero(d))));
            if vert != kernel {
                bad = Some(u.clone());
                break;
            }
        }
        match bad {
            None => Hypothesis::ok(names::PROJECTABLE, "iota^* E' meets TN + 0 in T F"),
            Some(u) => Hypothesis::fail(
                names::PROJECTABLE,
                "X_H is not G-invariant and iota^* E' meets TN + 0 in more than T F",
                Some(rational::format_point(&u)),
            ),
        }
    };
    hyps.push(projectable);
    let hn = h.compose(&chart.embedding);
    let h_red = hn.compose(&quotient.section);
    let lifted = h_red.compose(&quotient.map);
    let diff = &hn - &lifted;
    hyps.push(if diff.is_zero() {
        Hypothesis::ok(names::DESCENDS, "H o iota = H^red o pi")
    } else {
        Hypothesis::fail(
            names::DESCENDS,
            format!("H o iota - H^red o pi = {diff}"),
            nonzero_point(&sampler, &diff).map(|x| rational::format_point(&x)),
        )
    });

    let mut red = Reduction {
        hypotheses: hyps,
        h_red: diff.is_zero().then_some(h_red.clone()),
        e_red: None,
        e_red_integrable: None,
        x_h,
        s: s.clone(),
        chart: chart.clone(),
    };

    // E^red
    let q = quotient.map.len();
    let mut consistent = Hypothesis::ok(names::FIBER_CONSISTENT, "E^red agrees at sampled points of a fiber");
    let mut isotropic = Hypothesis::ok(names::ISOTROPIC, "E^red isotropic at samples");
    let mut constant: Option<Subspace> = None;
    let mut varies = false;
    let half = rational::frac(1, 2);
    for u in &chart_points {
        let dp = jacobian(&quotient.map, u);
        let here = pushforward_subspace(&pullback_at(s, chart, u), &dp, d);
        if !bigvec::is_isotropic(&here) && isotropic.pass {
            isotropic = Hypothesis::fail(names::ISOTROPIC, "E^red not isotropic", Some(rational::format_point(u)));
        }
        match &constant {
            None => constant = Some(here.clone()),
            Some(c) if *c != here => varies = true,
            _ => {}
        }
        if !consistent.pass {
            continue;
        }
        let y: Vector = quotient.map.iter().map(|p| p.eval(u)).collect();
        for w in linalg::kernel(&dp, d) {
            let u2: Vector = u.iter().zip(&w).map(|(a, b)| a + &half * b).collect();
            let y2: Vector = quotient.map.iter().map(|p| p.eval(&u2)).collect();
            if y2 != y {
                continue;
            }
            let there = pushforward_subspace(&pullback_at(s, chart, &u2), &jacobian(&quotient.map, &u2), d);
            if there != here {
                consistent = Hypothesis::fail(
                    names::FIBER_CONSISTENT,
                    format!("E^red differs at {:?}", rational::format_point(&u2)),
                    Some(rational::format_point(u)),
                );
                break;
            }
        }
    }
    red.hypotheses.extend([consistent, isotropic]);
    if !varies {
        if let Some(c) = constant {
            if let Ok(iso) = IsotropicSubspace::from_subspace(c) {
                red.e_red_integrable = BigIsoStructure::from_constant_subspace(&iso).ok().map(|st| st.courant_closure_test().pass);
                red.e_red = Some(iso);
            }
        }
    }

    // (X^red, dH^red) in (E^red)'
    let ready = red.hypotheses.iter().all(|hy| hy.pass);
    let pair = if !ready {
        Hypothesis::fail(names::REDUCED_PAIR, "not evaluated: an earlier hypothesis failed", None)
    } else {
        let mut bad = None;
        for y in sampler.points(q) {
            let x = red.reduced_field_at(&y)?;
            let dh: Vector = (0..q).map(|i| h_red.partial(i).eval(&y)).collect();
            let v: Vector = x.into_iter().chain(dh).collect();
            if !bigvec::orthogonal(&red.e_red_at(&y)).contains(&v) {
                bad = Some(y);
                break;
            }
        }
        match bad {
            None => Hypothesis::ok(names::REDUCED_PAIR, "(X^red, dH^red) in (E^red)' at samples"),
            Some(y) => Hypothesis::fail(names::REDUCED_PAIR, "(X^red, dH^red) not in (E^red)'", Some(rational::format_point(&y))),
        }
    };
    red.hypotheses.push(pair);
    Ok(red)
}

/// As [`check_reduction`], failing with the first violated hypothesis.
pub fn reduce_system(
    s: &BigIsoStructure,
    action: &GroupAction,
    j: &MomentumMap,
    h: &Poly,
    chart: &SubmanifoldChart,
) -> Result<Reduction> {
    let red = check_reduction(s, action, j, h, chart)?;
    match red.first_failure() {
        None => Ok(red),
        Some(f) => Err(Error::ReducibilityFailure {
            condition: f.name.clone(),
            witness: match &f.witness {
                Some(w) => format!("{} at {w:?}", f.detail),
                None => f.detail.clone(),
            },
        }),
    }
}

#[derive(Debug, Clone)]
pub struct ConstrainedReduction {
    pub strongly_invariant: (Check, Check),
    pub momentum_residuals_zero: bool,
    pub reduction: Reduction,
}

/// Reduction of a constrained mechanical system by a strongly invariant
/// action on `Q`, through the cotangent momentum map and `E_L`.
pub fn reduce_constrained(sys: &ConstrainedSystem, action_q: &GroupAction, chart: &SubmanifoldChart) -> Result<ConstrainedReduction> {
    let (a, b) = strong_invariance(sys, action_q);
    for c in [&a, &b] {
        if let Some(f) = c.failures.first() {
            return Err(Error::ReducibilityFailure {
                condition: format!("strong invariance: {}", c.name),
                witness: f.detail.clone(),
            });
        }
    }
    let (lifted, j, residuals) = cotangent_momentum_map(action_q)?;
    let e_l = sys.e_l()?;
    let reduction = reduce_system(&e_l, &lifted, &j, sys.hamiltonian(), chart)?;
    Ok(ConstrainedReduction {
        strongly_invariant: (a, b),
        momentum_residuals_zero: residuals.iter().all(VectorField::is_zero),
        reduction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanics::canonical_bivector;
    use crate::rational::int;

    fn p(s: &str, n: usize) -> Poly {
        Poly::parse(s, n, None).unwrap()
    }
    fn field(s: &[&str]) -> VectorField {
        VectorField::parse(s).unwrap()
    }
    fn canonical(n: usize) -> BigIsoStructure {
        let m = 2 * n;
        BigIsoStructure::new(m, (0..m).map(|i| OneForm::coordinate(m, i)).collect(), vec![], canonical_bivector(n)).unwrap()
    }
    fn q(rows: &[&[i64]]) -> Vec<Vector> {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn symmetry_examples() {
        let s = canonical(1);
        assert!(is_infinitesimal_symmetry(&VectorField::zero(2), &s).pass);
        for f in ["x1^3 - x1*x2", "x1^2/2 + x2^2/2", "x2^4 + 3*x1"] {
            let xf = s.hamiltonian_field(&p(f, 2), None).unwrap().vector;
            assert!(is_infinitesimal_symmetry(&xf, &s).pass, "{f}");
        }
        let scaling = field(&["x1", "0"]);
        let r = is_infinitesimal_symmetry(&scaling, &s);
        assert!(!r.pass && !r.pi_invariant.pass);
        assert!(r.pi_invariant.failures[0].point.is_some());
    }

    #[test]
    fn derivation_examples() {
        let s = canonical(1);
        let (f, h) = (p("x1^2", 2), p("x1*x2", 2));
        assert!(symmetry_is_derivation_check(&VectorField::zero(2), &s, &f, &h).unwrap().is_zero());
        let rot = s.hamiltonian_field(&p("x1^2/2 + x2^2/2", 2), None).unwrap().vector;
        assert!(symmetry_is_derivation_check(&rot, &s, &f, &h).unwrap().is_zero());
        let scaling = field(&["x1", "0"]);
        let r = symmetry_is_derivation_check(&scaling, &s, &p("x1", 2), &p("x2", 2)).unwrap();
        assert_eq!(r, Poly::one(2));
    }

    #[test]
    fn noether_examples() {
        let s = canonical(2);
        let h = p("x1^2/2 + x2^2/2 + x3^2/2 + x4^2/2", 4);
        let r = noether_check(&s, &h, &h, None, 0.0, 1e-3).unwrap();
        assert!(r.first_integral && r.orthogonality_holds);
        let ang = p("x1*x4 - x2*x3", 4);
        let r = noether_check(&s, &ang, &h, Some(&[1.0, 0.5, -0.3, 0.8]), 10.0, 1e-3).unwrap();
        assert!(r.first_integral);
        assert!(r.drift.unwrap() <= 1e-8, "{:?}", r.drift);
        let r = noether_check(&s, &p("x1*x3", 4), &h, Some(&[1.0, 0.5, -0.3, 0.8]), 10.0, 1e-3).unwrap();
        assert!(!r.first_integral);
        assert!(r.rate_residual.unwrap() <= 1e-8, "{:?}", r.rate_residual);
        assert!(r.rate_residual_opposite.unwrap() > 1e-2);
    }

    #[test]
    fn pullback_examples() {
        let s = canonical(2);
        let id = SubmanifoldChart::identity(4);
        assert_eq!(pullback_structure(&s, &id).unwrap().dim, 4);
        for u in Sampler::default().points(4).iter().take(10) {
            assert_eq!(pullback_at(&s, &id, u), s.e_at(u));
        }
        // N = {p1 = 0}
        let chart = SubmanifoldChart::new(4, vec![p("x1", 3), p("x2", 3), p("0", 3), p("x3", 3)]).unwrap();
        let r = pullback_structure(&s, &chart).unwrap();
        assert_eq!(r.dim, 3);
        assert!(r.isotropic);
        let expected = Subspace::span(6, q(&[&[1, 0, 0, 0, 0, 0], &[0, 1, 0, 0, 0, 1], &[0, 0, -1, 0, 1, 0]])).unwrap();
        for u in [q(&[&[0, 0, 0]]), q(&[&[1, -2, 3]]), q(&[&[5, 7, -1]])] {
            assert_eq!(pullback_at(&s, &chart, &u[0]), expected);
        }
        // E = span{(d/dx, 0)} pulled back to the parabola y = x^2
        let e = BigIsoStructure::new(2, vec![], vec![field(&["1", "0"])], tensor::Bivector::zero(2)).unwrap();
        let para = SubmanifoldChart::new(2, vec![p("x1", 1), p("x1^2", 1)]).unwrap();
        assert!(matches!(pullback_structure(&e, &para), Err(Error::NotProper { .. })));
    }

    #[test]
    fn restricted_field_on_a_constraint() {
        let s = canonical(1);
        let id = SubmanifoldChart::identity(2);
        let x = restricted_weak_hamiltonian_at(&s, &id, &p("x1^2/2 + x2^2/2", 2), &q(&[&[1, 2]])[0]).unwrap();
        assert_eq!(x, q(&[&[2, -1]])[0]);
    }

    #[test]
    fn momentum_map_examples() {
        let s = canonical(2);
        assert!(momentum_map_check(&GroupAction::trivial(4), &MomentumMap { components: vec![] }, &s).unwrap().pass);
        let rot_q = GroupAction::abelian(2, vec![field(&["-x2", "x1"])]).unwrap();
        let (lifted, j, res) = cotangent_momentum_map(&rot_q).unwrap();
        assert_eq!(j.components[0], p("x1*x4 - x2*x3", 4));
        assert!(res.iter().all(VectorField::is_zero));
        assert!(momentum_map_check(&lifted, &j, &s).unwrap().pass);
        let wrong = MomentumMap { components: vec![-j.components[0].clone()] };
        let r = momentum_map_check(&lifted, &wrong, &s).unwrap();
        assert!(!r.pass && !r.membership.pass);
        let trans = GroupAction::abelian(2, vec![field(&["1", "0"])]).unwrap();
        let (_, j, res) = cotangent_momentum_map(&trans).unwrap();
        assert_eq!(j.components[0], p("x3", 4));
        assert!(res[0].is_zero());
    }

    #[test]
    fn nonabelian_equivariance() {
        // translations and rotation of the plane
        let mut c = vec![vec![linalg::zeros(3); 3]; 3];
        c[2][0][1] = int(-1);
        c[0][2][1] = int(1);
        c[2][1][0] = int(1);
        c[1][2][0] = int(-1);
        let act = GroupAction::new(2, vec![field(&["1", "0"]), field(&["0", "1"]), field(&["-x2", "x1"])], c).unwrap();
        let (lifted, j, _) = cotangent_momentum_map(&act).unwrap();
        let r = momentum_map_check(&lifted, &j, &canonical(2)).unwrap();
        assert!(r.equivariance.pass && r.pass);
    }

    fn translation_chart() -> SubmanifoldChart {
        // N = {p_x = 0} with chart (x, y, p_y); Q = (y, p_y)
        SubmanifoldChart::new(4, vec![p("x1", 3), p("x2", 3), p("0", 3), p("x3", 3)])
            .unwrap()
            .with_quotient(vec![p("x2", 3), p("x3", 3)], vec![p("0", 2), p("x1", 2), p("x2", 2)])
            .unwrap()
            .with_level_set(vec![p("x3", 4)])
            .unwrap()
            .with_retraction(vec![p("x1", 4), p("x2", 4), p("x4", 4)])
            .unwrap()
    }

    #[test]
    fn translation_reduction() {
        let s = canonical(2);
        let (act, j, _) = cotangent_momentum_map(&GroupAction::abelian(2, vec![field(&["1", "0"])]).unwrap()).unwrap();
        let h = p("x3^2/2 + x4^2/2 + x2^2/2 + x2^4/4", 4);
        let red = reduce_system(&s, &act, &j, &h, &translation_chart()).unwrap();
        assert_eq!(red.h_red.clone().unwrap(), p("x2^2/2 + x1^2/2 + x1^4/4", 2));
        // direct construction: canonical structure on T*R
        let direct = canonical(1);
        for y in Sampler::default().points(2).iter().take(20) {
            assert_eq!(red.e_red_at(y), direct.e_at(y));
        }
        assert_eq!(red.e_red_integrable, Some(true));
        assert!(red.compare_trajectories(&[0.4, -0.2], 10.0, 1e-3).unwrap() <= 1e-8);

        let bad = h + p("x1", 4);
        match reduce_system(&s, &act, &j, &bad, &translation_chart()) {
            Err(Error::ReducibilityFailure { condition, .. }) => assert_eq!(condition, names::H_INVARIANCE),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn trivial_group_keeps_everything() {
        let s = canonical(1);
        let chart = SubmanifoldChart::identity(2)
            .with_identity_quotient()
            .with_retraction(vec![p("x1", 2), p("x2", 2)])
            .unwrap();
        let h = p("x1^2/2 + x2^2/2", 2);
        let red = reduce_system(&s, &GroupAction::trivial(2), &MomentumMap { components: vec![] }, &h, &chart).unwrap();
        assert_eq!(red.h_red.clone().unwrap(), h);
        for y in Sampler::default().points(2) {
            assert_eq!(red.e_red_at(&y), s.e_at(&y));
            assert_eq!(red.reduced_field_at(&y).unwrap(), red.x_h.eval(&y));
        }
    }

    #[test]
    fn r1_violation_is_reported() {
        let s = canonical(2);
        // fibers along y instead of x
        let chart = SubmanifoldChart::new(4, vec![p("x1", 3), p("x2", 3), p("0", 3), p("x3", 3)])
            .unwrap()
            .with_quotient(vec![p("x1", 3), p("x3", 3)], vec![p("x1", 2), p("0", 2), p("x2", 2)])
            .unwrap();
        let red = check_reduction(&s, &GroupAction::trivial(4), &MomentumMap { components: vec![] }, &p("x4^2", 4), &chart).unwrap();
        let r1 = red.hypothesis(names::R1).unwrap();
        assert!(!r1.pass);
        assert!(r1.detail.contains("[\"0\", \"1\", \"0\"]"));
    }

    #[test]
    fn constrained_reduction() {
        let sys = ConstrainedSystem::new(vec![field(&["1", "0"])], p("x3^2/2 + x4^2/2", 4)).unwrap();
        let act = GroupAction::abelian(2, vec![field(&["1", "0"])]).unwrap();
        let out = reduce_constrained(&sys, &act, &translation_chart()).unwrap();
        assert!(out.momentum_residuals_zero);
        assert!(out.reduction.passed());
        // rotation is not tangent to L
        let rot = GroupAction::abelian(2, vec![field(&["-x2", "x1"])]).unwrap();
        assert!(matches!(reduce_constrained(&sys, &rot, &translation_chart()), Err(Error::ReducibilityFailure { .. })));
    }
}
