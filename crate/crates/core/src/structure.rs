//! *-regular big-isotropic structures on `R^m`, given by a spanning family of
//! `Sigma` (1-forms), a spanning family of `S'` (vector fields) and a bivector
//! `Pi`:
//!
//! ```text
//! E  = {(#Pi a + Z, a) : a in Sigma,  Z in S'}
//! E' = {(#Pi b + W, b) : b in Sigma', W in S}
//! ```
//!
//! with `Sigma' = ann S'` and `S = ann Sigma`. Hamiltonian fields, the Poisson
//! bracket, the integrability conditions and a Courant-closure cross check.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::Serialize;

use crate::bigvec::{self, IsotropicSubspace};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, Subspace, Vector};
use crate::poly::{self, Poly};
use crate::rational::{self, Rational};
use crate::sampling::Sampler;
use crate::span::{self, Membership, PolySpan};
use crate::tensor::{self, BigVectorField, Bivector, OneForm, VectorField};

#[derive(Debug, Clone)]
pub struct BigIsoStructure {
    m: usize,
    sigma: Vec<OneForm>,
    sprime: Vec<VectorField>,
    pi: Bivector,
    sampler: Sampler,
    sigma_span: PolySpan,
    sprime_span: PolySpan,
    sigma_prime_sections: Vec<OneForm>,
    s_sections: Vec<VectorField>,
}

fn columns<T: AsRef<[Poly]>>(items: &[T]) -> Vec<Vec<Poly>> {
    items.iter().map(|c| c.as_ref().to_vec()).collect()
}

impl AsRef<[Poly]> for OneForm {
    fn as_ref(&self) -> &[Poly] {
        self.comps()
    }
}

impl AsRef<[Poly]> for VectorField {
    fn as_ref(&self) -> &[Poly] {
        self.comps()
    }
}

fn regularity_error(what: &str, jump: ((usize, Vec<Rational>), (usize, Vec<Rational>))) -> Error {
    let ((ra, pa), (rb, pb)) = jump;
    Error::RegularityViolation {
        what: what.into(),
        rank_a: ra,
        point_a: rational::format_point(&pa),
        rank_b: rb,
        point_b: rational::format_point(&pb),
    }
}

/// First sample point where `p` does not vanish.
pub fn nonzero_point(sampler: &Sampler, p: &Poly) -> Option<Vec<Rational>> {
    sampler.witness_points(p.nvars()).find(|x| !p.eval(x).is_zero())
}

impl BigIsoStructure {
    pub fn new(m: usize, sigma: Vec<OneForm>, sprime: Vec<VectorField>, pi: Bivector) -> Result<Self> {
        Self::with_sampler(m, sigma, sprime, pi, Sampler::default())
    }

    pub fn with_sampler(
        m: usize,
        sigma: Vec<OneForm>,
        sprime: Vec<VectorField>,
        pi: Bivector,
        sampler: Sampler,
    ) -> Result<Self> {
        check_dim(m, pi.dim())?;
        for a in &sigma {
            check_dim(m, a.dim())?;
        }
        for z in &sprime {
            check_dim(m, z.dim())?;
        }
        let points = sampler.points(m);
        let sigma_cols = columns(&sigma);
        let sprime_cols = columns(&sprime);
        if let Some(j) = span::rank_jump(m, m, &sigma_cols, &points) {
            return Err(regularity_error("Sigma", j));
        }
        if let Some(j) = span::rank_jump(m, m, &sprime_cols, &points) {
            return Err(regularity_error("S'", j));
        }
        // E is isotropic iff a(Z) = 0 for a in Sigma, Z in S'
        for (i, a) in sigma.iter().enumerate() {
            for (k, z) in sprime.iter().enumerate() {
                let r = a.contract(z);
                if !r.is_zero() {
                    let pt = nonzero_point(&sampler, &r).map(|x| rational::format_point(&x));
                    return Err(Error::Invalid(format!(
                        "S' is not contained in ann Sigma: sigma[{i}](Z[{k}]) = {r} (nonzero at {pt:?})"
                    )));
                }
            }
        }
        let sigma_span = PolySpan::new(m, m, sigma_cols, sampler);
        let sprime_span = PolySpan::new(m, m, sprime_cols, sampler);
        let sigma_prime_sections = sprime_span
            .annihilators()
            .iter()
            .map(|a| OneForm::new(a.clone()).expect("length m"))
            .collect();
        let s_sections = sigma_span
            .annihilators()
            .iter()
            .map(|a| VectorField::new(a.clone()).expect("length m"))
            .collect();
        Ok(Self {
            m,
            sigma,
            sprime,
            pi,
            sampler,
            sigma_span,
            sprime_span,
            sigma_prime_sections,
            s_sections,
        })
    }

    /// The structure with constant fibers equal to the given isotropic subspace.
    pub fn from_constant_subspace(e: &IsotropicSubspace) -> Result<Self> {
        let m = e.ambient_dim();
        let sigma_sp = bigvec::project_covector(e.subspace());
        let sprime_sp = e
            .subspace()
            .intersection(&bigvec::direct_sum(&Subspace::full(m), &Subspace::zero(m)));
        let sprime_sp = bigvec::project_vector(&sprime_sp);
        let sigma_prime_sp = sprime_sp.annihilator();
        // P(a, b) = b(X) for (X, a) in E, b in Sigma'
        let sigma_b = sigma_sp.basis().to_vec();
        let mut q1: Vec<Vector> = Vec::new();
        let mut cur = sigma_sp.clone();
        for b in sigma_prime_sp.basis() {
            if !cur.contains(b) {
                cur = cur.sum(&Subspace::span(m, [b.clone()])?);
                q1.push(b.clone());
            }
        }
        let q2 = cur.complement_units();
        let cols = linalg::transpose(e.subspace().basis(), 2 * m);
        let table: Vec<Vec<Poly>> = sigma_b
            .iter()
            .map(|a| {
                let coeffs = linalg::solve(&cols[m..], a, e.rank()).expect("a lies in pr E");
                let x: Vector = (0..m).map(|i| linalg::dot(&cols[i], &coeffs)).collect();
                sigma_b
                    .iter()
                    .chain(&q1)
                    .map(|b| Poly::constant(m, linalg::dot(b, &x)))
                    .collect()
            })
            .collect();
        let konst = |v: &Vector| OneForm::constant(v);
        let pi = extend_to_pi(
            &sigma_b.iter().map(konst).collect::<Vec<_>>(),
            &q1.iter().map(konst).collect::<Vec<_>>(),
            &q2.iter().map(konst).collect::<Vec<_>>(),
            &table,
        )?;
        Self::new(
            m,
            sigma_b.iter().map(konst).collect(),
            sprime_sp.basis().iter().map(|v| VectorField::constant(v)).collect(),
            pi,
        )
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn sigma(&self) -> &[OneForm] {
        &self.sigma
    }

    pub fn sprime(&self) -> &[VectorField] {
        &self.sprime
    }

    pub fn pi(&self) -> &Bivector {
        &self.pi
    }

    pub fn sampler(&self) -> &Sampler {
        &self.sampler
    }

    /// Polynomial 1-forms spanning `Sigma' = ann S'` wherever `S'` has its rank.
    pub fn sigma_prime_sections(&self) -> &[OneForm] {
        &self.sigma_prime_sections
    }

    /// Polynomial vector fields spanning `S = ann Sigma`.
    pub fn s_sections(&self) -> &[VectorField] {
        &self.s_sections
    }

    pub fn rank_sigma(&self) -> usize {
        self.sigma_span.generic_rank()
    }

    pub fn rank_sprime(&self) -> usize {
        self.sprime_span.generic_rank()
    }

    /// The rank of `E`: `dim Sigma + dim S'`.
    pub fn rank(&self) -> usize {
        self.rank_sigma() + self.rank_sprime()
    }

    /// Whether constant rank is proven exactly (a maximal minor is a nonzero
    /// constant) rather than only observed at sample points.
    pub fn regularity_certified(&self) -> bool {
        self.sigma_span.rank_certified() && self.sprime_span.rank_certified()
    }

    pub fn sigma_at(&self, x: &[Rational]) -> Subspace {
        self.sigma_span.subspace_at(x)
    }

    pub fn sprime_at(&self, x: &[Rational]) -> Subspace {
        self.sprime_span.subspace_at(x)
    }

    /// `Sigma'_x = ann S'_x`, checking the rank at `x`.
    pub fn sigma_prime_at(&self, x: &[Rational]) -> Result<Subspace> {
        let s = self.sprime_at(x);
        if s.dim() != self.rank_sprime() {
            let g = self.sampler.generic_points(self.m).remove(0);
            return Err(regularity_error("S'", ((self.rank_sprime(), g), (s.dim(), x.to_vec()))));
        }
        Ok(s.annihilator())
    }

    /// `E_x` as a subspace of `Q^{2m}`.
    pub fn e_at(&self, x: &[Rational]) -> Subspace {
        let m = self.m;
        let zero = linalg::zeros(m);
        let rows = self
            .sigma_at(x)
            .basis()
            .iter()
            .map(|a| self.pi.sharp_at(x, a).into_iter().chain(a.iter().cloned()).collect::<Vector>())
            .chain(self.sprime_at(x).basis().iter().map(|z| z.iter().chain(&zero).cloned().collect()))
            .collect::<Vec<_>>();
        Subspace::span(2 * m, rows).expect("length")
    }

    /// `E'_x` from the second formula, independently of `E_x`.
    pub fn e_prime_at(&self, x: &[Rational]) -> Subspace {
        let m = self.m;
        let zero = linalg::zeros(m);
        let rows = self
            .sprime_at(x)
            .annihilator()
            .basis()
            .iter()
            .map(|b| self.pi.sharp_at(x, b).into_iter().chain(b.iter().cloned()).collect::<Vector>())
            .chain(self.sigma_at(x).annihilator().basis().iter().map(|w| w.iter().chain(&zero).cloned().collect()))
            .collect::<Vec<_>>();
        Subspace::span(2 * m, rows).expect("length")
    }

    /// Spanning sections `(#Pi sigma_i, sigma_i)` and `(Z_k, 0)` of `E`, labelled.
    pub fn e_sections(&self) -> Vec<(String, BigVectorField)> {
        let m = self.m;
        let mut out: Vec<(String, BigVectorField)> = self
            .sigma
            .iter()
            .enumerate()
            .map(|(i, a)| (format!("sigma[{i}]"), BigVectorField { vector: self.pi.sharp(a), form: a.clone() }))
            .collect();
        out.extend(self.sprime.iter().enumerate().map(|(k, z)| {
            (format!("Z[{k}]"), BigVectorField { vector: z.clone(), form: OneForm::zero(m) })
        }));
        out
    }

    /// Spanning sections `(#Pi b_T, b_T)` and `(W_U, 0)` of `E'`, labelled.
    pub fn e_prime_sections(&self) -> Vec<(String, BigVectorField)> {
        let m = self.m;
        let mut out: Vec<(String, BigVectorField)> = self
            .sigma_prime_sections
            .iter()
            .enumerate()
            .map(|(t, b)| (format!("beta[{t}]"), BigVectorField { vector: self.pi.sharp(b), form: b.clone() }))
            .collect();
        out.extend(self.s_sections.iter().enumerate().map(|(u, w)| {
            (format!("W[{u}]"), BigVectorField { vector: w.clone(), form: OneForm::zero(m) })
        }));
        out
    }

    fn membership_from(&self, residual: Poly) -> Membership {
        if residual.is_zero() {
            Membership::Member
        } else {
            let point = nonzero_point(&self.sampler, &residual);
            Membership::NotMember { residual, point }
        }
    }

    /// Exact membership of a 1-form in `Gamma Sigma`.
    pub fn sigma_contains(&self, a: &OneForm) -> Membership {
        self.sigma_span.contains(a.comps())
    }

    /// Exact membership of a vector field in `Gamma S'`.
    pub fn sprime_contains(&self, z: &VectorField) -> Membership {
        self.sprime_span.contains(z.comps())
    }

    /// Exact membership of `(X, a)` in `Gamma E`.
    pub fn contains_e(&self, u: &BigVectorField) -> Membership {
        let m = self.sigma_span.contains(u.form.comps());
        if !m.is_member() {
            return m;
        }
        let rest = u.vector.sub(&self.pi.sharp(&u.form));
        self.sprime_span.contains(rest.comps())
    }

    /// Exact membership of `(Y, b)` in `Gamma E'`: `b(Z_k) = 0` and
    /// `sigma_i(Y - #Pi b) = 0`.
    pub fn contains_e_prime(&self, u: &BigVectorField) -> Membership {
        for z in &self.sprime {
            let r = u.form.contract(z);
            if !r.is_zero() {
                return self.membership_from(r);
            }
        }
        let rest = u.vector.sub(&self.pi.sharp(&u.form));
        for a in &self.sigma {
            let r = a.contract(&rest);
            if !r.is_zero() {
                return self.membership_from(r);
            }
        }
        Membership::Member
    }

    /// Exact test of `dH in Sigma'` (every `dH(Z_k)` vanishes identically).
    pub fn is_weak_hamiltonian(&self, h: &Poly) -> Result<()> {
        let dh = tensor::exterior_d(h);
        for (k, z) in self.sprime.iter().enumerate() {
            let r = dh.contract(z);
            if !r.is_zero() {
                let point = nonzero_point(&self.sampler, &r).map(|x| rational::format_point(&x));
                return Err(Error::InfeasibleHamiltonian {
                    reason: format!("dH is not in Sigma': dH(Z[{k}]) = {r}"),
                    point,
                });
            }
        }
        Ok(())
    }

    /// Exact test of `dH in Sigma`.
    pub fn is_hamiltonian(&self, h: &Poly) -> Result<()> {
        let dh = tensor::exterior_d(h);
        match self.sigma_span.contains(dh.comps()) {
            Membership::Member => Ok(()),
            Membership::NotMember { residual, point } => Err(Error::InfeasibleHamiltonian {
                reason: format!("dH is not in Sigma (annihilator residual {residual})"),
                point: point.map(|x| rational::format_point(&x)),
            }),
        }
    }

    /// `X_H = #Pi dH + W` with `W in S` (default `W = 0`); `(X_H, dH) in E'`.
    pub fn weak_hamiltonian_field(&self, h: &Poly, w: Option<&VectorField>) -> Result<BigVectorField> {
        check_dim(self.m, h.nvars())?;
        self.is_weak_hamiltonian(h)?;
        let dh = tensor::exterior_d(h);
        let mut x = self.pi.sharp(&dh);
        if let Some(w) = w {
            check_dim(self.m, w.dim())?;
            for (i, a) in self.sigma.iter().enumerate() {
                if !a.contract(w).is_zero() {
                    return Err(Error::Invalid(format!("W is not in S: sigma[{i}](W) != 0")));
                }
            }
            x = x.add(w);
        }
        Ok(BigVectorField { vector: x, form: dh })
    }

    /// `X_H = #Pi dH + Z` with `Z in S'` (default `Z = 0`); `(X_H, dH) in E`.
    pub fn hamiltonian_field(&self, h: &Poly, z: Option<&VectorField>) -> Result<BigVectorField> {
        check_dim(self.m, h.nvars())?;
        self.is_hamiltonian(h)?;
        let dh = tensor::exterior_d(h);
        let mut x = self.pi.sharp(&dh);
        if let Some(z) = z {
            check_dim(self.m, z.dim())?;
            if !self.sprime_span.contains(z.comps()).is_member() {
                return Err(Error::Invalid("Z is not in S'".into()));
            }
            x = x.add(z);
        }
        Ok(BigVectorField { vector: x, form: dh })
    }

    /// `{f, h} = X_f h = Pi(df, dh)` for `f` Hamiltonian and `h` weak-Hamiltonian.
    pub fn poisson_bracket(&self, f: &Poly, h: &Poly) -> Result<Poly> {
        let xf = self.hamiltonian_field(f, None)?;
        self.is_weak_hamiltonian(h)?;
        Ok(xf.vector.apply(h))
    }

    fn record(&self, check: &mut Check, left: String, right: String, m: Membership, detail: String) {
        if let Membership::NotMember { residual, point } = m {
            check.pass = false;
            check.failures.push(Failure {
                left,
                right,
                detail: format!("{detail}; residual {residual}"),
                point: point.map(|x| rational::format_point(&x)),
            });
        }
    }

    /// The three integrability conditions, checked on spanning sections.
    pub fn check_integrability(&self) -> IntegrabilityReport {
        let mut c1a = Check::new("S' involutive");
        let mut c1b = Check::new("S projectable along S'");
        let mut c2a = Check::new("Sigma closed under Pi-bracket");
        let mut c2b = Check::new("{Sigma, Sigma'} in Sigma'");
        let mut c3 = Check::new("[Pi,Pi](Sigma, Sigma, Sigma') = 0");

        for i in 0..self.sprime.len() {
            for j in i + 1..self.sprime.len() {
                let b = tensor::lie_bracket(&self.sprime[i], &self.sprime[j]);
                let m = self.sprime_span.contains(b.comps());
                self.record(&mut c1a, format!("Z[{i}]"), format!("Z[{j}]"), m, format!("[Z[{i}], Z[{j}]] = {b} not in S'"));
            }
        }
        for (k, z) in self.sprime.iter().enumerate() {
            for (i, a) in self.sigma.iter().enumerate() {
                for (u, w) in self.s_sections.iter().enumerate() {
                    let b = tensor::lie_bracket(z, w);
                    let r = a.contract(&b);
                    if !r.is_zero() {
                        let m = self.membership_from(r);
                        self.record(&mut c1b, format!("sigma[{i}]"), format!("Z[{k}]"), m, format!("sigma[{i}]([Z[{k}], W[{u}]]) != 0, W[{u}] = {w}"));
                    }
                }
            }
        }
        let pp = tensor::schouten_pp(&self.pi);
        for i in 0..self.sigma.len() {
            for j in i + 1..self.sigma.len() {
                let b = tensor::one_form_bracket(&self.pi, &self.sigma[i], &self.sigma[j]);
                let m = self.sigma_span.contains(b.comps());
                self.record(&mut c2a, format!("sigma[{i}]"), format!("sigma[{j}]"), m, format!("{{sigma[{i}], sigma[{j}]}} = {b} not in Sigma"));
                if !pp.is_zero() {
                    for (t, beta) in self.sigma_prime_sections.iter().enumerate() {
                        let r = pp.eval_forms(&self.sigma[i], &self.sigma[j], beta);
                        if !r.is_zero() {
                            let m = self.membership_from(r);
                            self.record(&mut c3, format!("sigma[{i}]"), format!("sigma[{j}]"), m, format!("[Pi,Pi](sigma[{i}], sigma[{j}], beta[{t}]) != 0, beta[{t}] = {beta}"));
                        }
                    }
                }
            }
        }
        for (i, a) in self.sigma.iter().enumerate() {
            for (t, beta) in self.sigma_prime_sections.iter().enumerate() {
                let b = tensor::one_form_bracket(&self.pi, a, beta);
                for (k, z) in self.sprime.iter().enumerate() {
                    let r = b.contract(z);
                    if !r.is_zero() {
                        let m = self.membership_from(r);
                        self.record(&mut c2b, format!("sigma[{i}]"), format!("Z[{k}]"), m, format!("{{sigma[{i}], beta[{t}]}}(Z[{k}]) != 0, beta[{t}] = {beta}"));
                    }
                }
            }
        }
        for c in [&mut c1a, &mut c1b, &mut c2a, &mut c2b, &mut c3] {
            c.dedup();
        }
        let overall = c1a.pass && c1b.pass && c2a.pass && c2b.pass && c3.pass;
        IntegrabilityReport {
            condition1_sprime_involutive: c1a,
            condition1_s_projectable: c1b,
            condition2_sigma_closed: c2a,
            condition2_mixed_bracket: c2b,
            condition3_schouten: c3,
            overall,
            regularity_certified: self.regularity_certified(),
        }
    }

    /// Courant brackets of spanning sections: `[E, E] in E` and `[E, E'] in E'`.
    pub fn courant_closure_test(&self) -> CourantReport {
        let e = self.e_sections();
        let ep = self.e_prime_sections();
        let mut failures = Vec::new();
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                let b = tensor::courant_bracket(&e[i].1, &e[j].1);
                if let Membership::NotMember { residual, point } = self.contains_e(&b) {
                    failures.push(CourantFailure {
                        kind: CourantCase::classify(&e[i].0, &e[j].0),
                        left: e[i].0.clone(),
                        right: e[j].0.clone(),
                        detail: format!("bracket not in E; residual {residual}"),
                        point: point.map(|x| rational::format_point(&x)),
                    });
                }
            }
        }
        let e_closed = failures.is_empty();
        for (lu, u) in &e {
            for (lw, w) in &ep {
                let b = tensor::courant_bracket(u, w);
                if let Membership::NotMember { residual, point } = self.contains_e_prime(&b) {
                    failures.push(CourantFailure {
                        kind: CourantCase::EPrime,
                        left: lu.clone(),
                        right: lw.clone(),
                        detail: format!("bracket not in E'; residual {residual}"),
                        point: point.map(|x| rational::format_point(&x)),
                    });
                }
            }
        }
        let e_prime_closed = failures.len() == failures.iter().filter(|f| f.kind != CourantCase::EPrime).count();
        CourantReport {
            pass: e_closed && e_prime_closed,
            e_closed,
            e_prime_closed,
            failures,
        }
    }
}

/// Extends `P : Sigma x Sigma' -> R` to a bivector through the decomposition
/// `T*M = Sigma + Q1 + Q2` with `Sigma' = Sigma + Q1`:
/// `Pi(l, m) = P(l', m') + P(l', m'') - P(m', l'')`, `'` the `Sigma` part and
/// `''` the `Q1` part.
///
/// `table[i][j] = P(sigma_i, tau_j)` with `tau = (sigma.., q1..)`. The frame
/// `(sigma, q1, q2)` must have constant nonzero determinant, so that `Pi` is
/// polynomial.
pub fn extend_to_pi(sigma: &[OneForm], q1: &[OneForm], q2: &[OneForm], table: &[Vec<Poly>]) -> Result<Bivector> {
    let frame: Vec<&OneForm> = sigma.iter().chain(q1).chain(q2).collect();
    let m = frame.first().map(|f| f.dim()).unwrap_or(0);
    if frame.len() != m || m == 0 {
        return Err(Error::NotTransverse(format!(
            "Sigma + Q1 + Q2 has {} elements, expected {m}",
            frame.len()
        )));
    }
    let (s, k) = (sigma.len(), q1.len());
    if table.len() != s || table.iter().any(|r| r.len() != s + k) {
        return Err(Error::Invalid(format!("P table must be {s} x {}", s + k)));
    }
    for i in 0..s {
        for j in i..s {
            if !(&table[i][j] + &table[j][i]).is_zero() {
                return Err(Error::Invalid(format!("P is not skew on Sigma x Sigma at ({i},{j})")));
            }
        }
    }
    let f: Vec<Vec<Poly>> = frame.iter().map(|a| a.comps().to_vec()).collect();
    let det = poly::det(&f, m);
    let d = match det.as_constant() {
        Some(d) if !d.is_zero() => d,
        _ => {
            return Err(Error::NotTransverse(format!(
                "frame determinant {det} is not a nonzero constant"
            )))
        }
    };
    // coefficient matrix C_ab = Pi(f_a, f_b)
    let zero = Poly::zero(m);
    let c = |a: usize, b: usize| -> Poly {
        match (a < s, b < s) {
            (true, _) if b < s + k => table[a][b].clone(),
            (false, true) if a < s + k => -table[b][a].clone(),
            _ => zero.clone(),
        }
    };
    // Pi = F^{-1} C F^{-T}, F^{-1} = adj(F) / det
    let adj = adjugate(&f, m);
    let inv_d = d.recip();
    let mut pi = Bivector::zero(m);
    for i in 0..m {
        for j in i + 1..m {
            let mut acc = Poly::zero(m);
            for a in 0..m {
                if adj[i][a].is_zero() {
                    continue;
                }
                for b in 0..m {
                    let cab = c(a, b);
                    if cab.is_zero() || adj[j][b].is_zero() {
                        continue;
                    }
                    acc = acc + &(&adj[i][a] * &cab) * &adj[j][b];
                }
            }
            pi.set(i, j, acc.scale(&(&inv_d * &inv_d)))?;
        }
    }
    Ok(pi)
}

fn adjugate(f: &[Vec<Poly>], m: usize) -> Vec<Vec<Poly>> {
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    // adj[i][j] = (-1)^{i+j} det(F without row j, column i)
                    let minor: Vec<Vec<Poly>> = (0..m)
                        .filter(|&r| r != j)
                        .map(|r| (0..m).filter(|&c| c != i).map(|c| f[r][c].clone()).collect())
                        .collect();
                    let d = poly::det(&minor, m);
                    if (i + j) % 2 == 0 {
                        d
                    } else {
                        -d
                    }
                })
                .collect()
        })
        .collect()
}

/// Chooses complements: `Q1` from the given `Sigma'` spanning family and `Q2`
/// from coordinate covectors, greedily at a generic point.
pub fn canonical_complements(sigma: &[OneForm], sigma_prime: &[OneForm], sampler: &Sampler) -> (Vec<OneForm>, Vec<OneForm>) {
    let m = sigma.first().or(sigma_prime.first()).map(|a| a.dim()).unwrap_or(0);
    let x = sampler.generic_points(m).remove(0);
    let mut cur = Subspace::span(m, sigma.iter().map(|a| a.eval(&x))).expect("length");
    let mut q1 = Vec::new();
    for b in sigma_prime {
        let v = b.eval(&x);
        if !cur.contains(&v) {
            cur = cur.sum(&Subspace::span(m, [v]).expect("length"));
            q1.push(b.clone());
        }
    }
    let q2 = cur
        .complement_units()
        .iter()
        .map(|v| OneForm::constant(v))
        .collect();
    (q1, q2)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Failure {
    pub left: String,
    pub right: String,
    pub detail: String,
    pub point: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub failures: Vec<Failure>,
}

impl Check {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            pass: true,
            failures: Vec::new(),
        }
    }

    /// Keeps one failure per generator pair.
    fn dedup(&mut self) {
        let mut seen = BTreeSet::new();
        self.failures.retain(|f| seen.insert((f.left.clone(), f.right.clone())));
    }

    pub fn pairs(&self) -> BTreeSet<(String, String)> {
        self.failures.iter().map(|f| (f.left.clone(), f.right.clone())).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrabilityReport {
    pub condition1_sprime_involutive: Check,
    pub condition1_s_projectable: Check,
    pub condition2_sigma_closed: Check,
    pub condition2_mixed_bracket: Check,
    pub condition3_schouten: Check,
    pub overall: bool,
    pub regularity_certified: bool,
}

impl IntegrabilityReport {
    pub fn checks(&self) -> [&Check; 5] {
        [
            &self.condition1_sprime_involutive,
            &self.condition1_s_projectable,
            &self.condition2_sigma_closed,
            &self.condition2_mixed_bracket,
            &self.condition3_schouten,
        ]
    }

    /// The failing `E x E` generator pairs these conditions predict for the
    /// Courant closure test: `(Z, Z)` from the involutivity condition,
    /// `(sigma, sigma)` from the Pi-bracket and Schouten conditions,
    /// `(sigma, Z)` from projectability and the mixed bracket condition.
    pub fn predicted_courant_failures(&self) -> BTreeSet<(String, String)> {
        let mut out = self.condition1_sprime_involutive.pairs();
        out.extend(self.condition2_sigma_closed.pairs());
        out.extend(self.condition3_schouten.pairs());
        out.extend(self.condition1_s_projectable.pairs());
        out.extend(self.condition2_mixed_bracket.pairs());
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CourantCase {
    /// two sections `(Z, 0)`
    VectorVector,
    /// two sections `(#sigma, sigma)`
    FormForm,
    /// one of each
    Mixed,
    /// a section of `E` with a section of `E'`
    EPrime,
}

impl CourantCase {
    fn classify(a: &str, b: &str) -> Self {
        match (a.starts_with('Z'), b.starts_with('Z')) {
            (true, true) => CourantCase::VectorVector,
            (false, false) => CourantCase::FormForm,
            _ => CourantCase::Mixed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CourantFailure {
    pub kind: CourantCase,
    pub left: String,
    pub right: String,
    pub detail: String,
    pub point: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CourantReport {
    pub pass: bool,
    pub e_closed: bool,
    pub e_prime_closed: bool,
    pub failures: Vec<CourantFailure>,
}

impl CourantReport {
    /// Failing `E x E` pairs, normalized as `(sigma.., Z..)` for mixed pairs.
    pub fn e_failure_pairs(&self) -> BTreeSet<(String, String)> {
        self.failures
            .iter()
            .filter(|f| f.kind != CourantCase::EPrime)
            .map(|f| {
                if f.left.starts_with('Z') && !f.right.starts_with('Z') {
                    (f.right.clone(), f.left.clone())
                } else {
                    (f.left.clone(), f.right.clone())
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn p(s: &str, m: usize) -> Poly {
        Poly::parse(s, m, None).unwrap()
    }
    fn of(s: &[&str]) -> OneForm {
        OneForm::parse(s).unwrap()
    }
    fn vf(s: &[&str]) -> VectorField {
        VectorField::parse(s).unwrap()
    }
    fn coframe(m: usize) -> Vec<OneForm> {
        (0..m).map(|i| OneForm::coordinate(m, i)).collect()
    }
    // the mechanics convention on T*R = (x, p): Pi(dx, dp) = -1
    fn canonical2() -> Bivector {
        Bivector::zero(2).with(0, 1, Poly::int(2, -1)).unwrap()
    }

    #[test]
    fn sigma_prime_examples() {
        let s = BigIsoStructure::new(3, coframe(3)[..2].to_vec(), vec![], Bivector::zero(3)).unwrap();
        let x = vec![int(0); 3];
        assert_eq!(s.sigma_prime_at(&x).unwrap(), Subspace::full(3));
        let s = BigIsoStructure::new(3, coframe(3)[..2].to_vec(), vec![vf(&["0", "0", "1"])], Bivector::zero(3)).unwrap();
        assert_eq!(
            s.sigma_prime_at(&x).unwrap(),
            Subspace::span(3, [linalg::unit(3, 0), linalg::unit(3, 1)]).unwrap()
        );
    }

    #[test]
    fn regularity_violation_detected() {
        let err = BigIsoStructure::new(2, vec![of(&["x1", "0"])], vec![], Bivector::zero(2)).unwrap_err();
        assert!(matches!(err, Error::RegularityViolation { .. }));
    }

    #[test]
    fn e_and_e_prime_are_orthogonal_pointwise() {
        let pi = Bivector::zero(3)
            .with(0, 1, p("x3", 3))
            .unwrap()
            .with(0, 2, Poly::one(3))
            .unwrap();
        let s = BigIsoStructure::new(3, vec![of(&["1", "x2", "0"])], vec![vf(&["0", "0", "1"])], pi).unwrap();
        for x in s.sampler().points(3) {
            let e = s.e_at(&x);
            assert!(bigvec::is_isotropic(&e));
            assert_eq!(bigvec::orthogonal(&e), s.e_prime_at(&x));
        }
    }

    #[test]
    fn hamiltonian_fields_on_canonical_plane() {
        let s = BigIsoStructure::new(2, coframe(2), vec![], canonical2()).unwrap();
        let h = p("x1^2/2 + x2^2/2", 2);
        let xh = s.weak_hamiltonian_field(&h, None).unwrap();
        assert_eq!(xh.vector, vf(&["x2", "-x1"]));
        let xc = s.hamiltonian_field(&Poly::int(2, 4), None).unwrap();
        assert!(xc.vector.is_zero());
        let xx = s.hamiltonian_field(&p("x1", 2), None).unwrap();
        assert_eq!(xx.vector, s.pi().sharp(&of(&["1", "0"])));
        assert!(s.contains_e(&xx).is_member());
        assert_eq!(s.poisson_bracket(&p("x1", 2), &p("x2", 2)).unwrap(), Poly::int(2, -1));
        assert_eq!(s.poisson_bracket(&p("x2", 2), &p("x1", 2)).unwrap(), Poly::one(2));
    }

    #[test]
    fn infeasible_hamiltonian_has_witness() {
        let s = BigIsoStructure::new(2, vec![of(&["1", "0"])], vec![vf(&["0", "1"])], Bivector::zero(2)).unwrap();
        match s.weak_hamiltonian_field(&p("x2^2", 2), None) {
            Err(Error::InfeasibleHamiltonian { point: Some(pt), .. }) => assert_ne!(pt[1], "0"),
            other => panic!("expected infeasible, got {other:?}"),
        }
        assert!(s.weak_hamiltonian_field(&p("x1^3", 2), None).is_ok());
        assert!(s.hamiltonian_field(&p("x1 * x2", 2), None).is_err());
    }

    #[test]
    fn canonical_dirac_graph_is_integrable() {
        let s = BigIsoStructure::new(2, coframe(2), vec![], canonical2()).unwrap();
        let r = s.check_integrability();
        assert!(r.overall);
        assert!(r.regularity_certified);
        assert!(s.courant_closure_test().pass);
    }

    #[test]
    fn heisenberg_sprime_fails_condition_one() {
        let s = BigIsoStructure::new(
            3,
            vec![],
            vec![vf(&["1", "0", "0"]), vf(&["0", "1", "x1"])],
            Bivector::zero(3),
        )
        .unwrap();
        let r = s.check_integrability();
        assert!(!r.condition1_sprime_involutive.pass);
        assert!(r.condition1_sprime_involutive.failures[0].detail.contains("(0, 0, 1)"));
        let c = s.courant_closure_test();
        assert!(!c.pass);
        assert_eq!(c.e_failure_pairs(), r.predicted_courant_failures());
    }

    #[test]
    fn non_poisson_bivector_fails_condition_three() {
        let pi = Bivector::zero(3)
            .with(0, 1, Poly::one(3))
            .unwrap()
            .with(1, 2, p("x2", 3))
            .unwrap();
        let s = BigIsoStructure::new(3, coframe(3), vec![], pi).unwrap();
        let r = s.check_integrability();
        assert!(!r.overall);
        assert!(!r.condition3_schouten.pass);
        let c = s.courant_closure_test();
        assert_eq!(c.e_failure_pairs(), r.predicted_courant_failures());
    }

    #[test]
    fn cotangent_structure_closes_trivially() {
        let s = BigIsoStructure::new(3, coframe(3), vec![], Bivector::zero(3)).unwrap();
        assert!(s.check_integrability().overall);
        assert!(s.courant_closure_test().pass);
    }

    #[test]
    fn extend_to_pi_examples() {
        // Sigma = <dx> in Sigma' = <dx, dy> in T*R^3, P(dx, dy) = 1
        let sigma = vec![OneForm::coordinate(3, 0)];
        let q1 = vec![OneForm::coordinate(3, 1)];
        let q2 = vec![OneForm::coordinate(3, 2)];
        let table = vec![vec![Poly::zero(3), Poly::one(3)]];
        let pi = extend_to_pi(&sigma, &q1, &q2, &table).unwrap();
        assert_eq!(pi, Bivector::zero(3).with(0, 1, Poly::one(3)).unwrap());
        // another complement choice restricts identically to Sigma x Sigma'
        let q1b = vec![of(&["1", "1", "0"])];
        let q2b = vec![of(&["0", "1", "1"])];
        let table_b = vec![vec![Poly::zero(3), Poly::one(3)]];
        let pi_b = extend_to_pi(&sigma, &q1b, &q2b, &table_b).unwrap();
        for b in [&sigma[0], &q1[0]] {
            assert_eq!(pi.eval_forms(&sigma[0], b), pi_b.eval_forms(&sigma[0], b));
        }
        assert_ne!(pi, pi_b);
        // full Sigma: Pi = P
        let full = extend_to_pi(&coframe(2), &[], &[], &[vec![Poly::zero(2), p("x1", 2)], vec![p("-x1", 2), Poly::zero(2)]]).unwrap();
        assert_eq!(full.get(0, 1), p("x1", 2));
        // dependent frame
        assert!(matches!(
            extend_to_pi(&sigma, &sigma, &q2, &[vec![Poly::zero(3), Poly::zero(3)]]),
            Err(Error::NotTransverse(_))
        ));
    }

    #[test]
    fn constant_subspace_structure_reproduces_fibers() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for m in 1..5 {
            for k in 0..=m {
                let e = bigvec::random::isotropic(m, k, &mut rng);
                let s = BigIsoStructure::from_constant_subspace(&e).unwrap();
                let x = vec![int(0); m];
                assert_eq!(&s.e_at(&x), e.subspace());
                assert_eq!(s.e_prime_at(&x), bigvec::orthogonal_complement(&e));
            }
        }
    }

    #[test]
    fn bracket_choice_independence() {
        // Sigma = <dx1, dx2>, S' = <d/dx3>, Pi canonical on (x1, x2)
        let pi = Bivector::zero(3).with(0, 1, Poly::one(3)).unwrap();
        let s = BigIsoStructure::new(3, coframe(3)[..2].to_vec(), vec![vf(&["0", "0", "1"])], pi).unwrap();
        let f = p("x1^2 + x2", 3);
        let h = p("x1*x2^2 + x3", 3);
        let base = s.poisson_bracket(&f, &p("x1*x2^2", 3)).unwrap();
        let xf = s.hamiltonian_field(&f, Some(&vf(&["0", "0", "x1"]))).unwrap();
        // dh has a dx3 part so h is not weak-Hamiltonian
        assert!(s.poisson_bracket(&f, &h).is_err());
        assert_eq!(xf.vector.apply(&p("x1*x2^2", 3)), base);
    }
}
