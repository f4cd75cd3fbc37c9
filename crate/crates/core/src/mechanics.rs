//! Constrained Hamiltonian mechanics on `T*Q = R^{2n}` with coordinates
//! `(q_1..q_n, p_1..p_n)`.
//!
//! The canonical bivector `P` has `P(dq_i, dp_i) = -1`, so that `#P dH` is the
//! usual Hamiltonian vector field `H_p d/dq - H_q d/dp`. A velocity
//! distribution `L` on `Q` gives
//!
//! ```text
//! S_L     = {#P (pi* a) : a in ann L}          (vertical, components in ann L)
//! S_L^w   = {X : pi_* X in L}
//! E_L     = graph(#P restricted to ann S_L)
//! ```
//!
//! and motion `X = #P dH + #P (pi* a)` with `a in ann L` chosen so that the
//! velocity `H_p` stays in `L`.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::integrate;
use crate::linalg::{self, Subspace, Vector};
use crate::poly::Poly;
use crate::port_ham::{self, Flow, MatrixField, PortHamSystem, ScalarField, SimOptions, Trajectory};
use crate::rational::{self, int, Rational};
use crate::sampling::Sampler;
use crate::span::{self, Membership, PolySpan};
use crate::structure::BigIsoStructure;
use crate::tensor::{self, Bivector, OneForm, VectorField};

/// `P` on `R^{2n}` with `P^{p_i q_i} = 1`.
pub fn canonical_bivector(n: usize) -> Bivector {
    let mut p = Bivector::zero(2 * n);
    for i in 0..n {
        p.set(n + i, i, Poly::one(2 * n)).expect("in range");
    }
    p
}

/// Matrix of `w = sum dp_i ^ dq_i`, `w[a][b] = w(e_a, e_b)`.
pub fn canonical_form(n: usize) -> Vec<Vector> {
    let mut w = vec![linalg::zeros(2 * n); 2 * n];
    for i in 0..n {
        w[n + i][i] = int(1);
        w[i][n + i] = int(-1);
    }
    w
}

/// `flat_w X = w(X, .)`.
pub fn flat(w: &[Vector], x: &[Rational]) -> Vector {
    let m = w.len();
    (0..m).map(|b| (0..m).map(|a| &x[a] * &w[a][b]).sum()).collect()
}

/// `pi* a` for a 1-form `a` on `Q`.
pub fn lift_form(a: &OneForm) -> OneForm {
    let n = a.dim();
    let comps = a
        .comps()
        .iter()
        .map(|c| c.embed(2 * n, 0))
        .chain((0..n).map(|_| Poly::zero(2 * n)))
        .collect();
    OneForm::new(comps).expect("length 2n")
}

/// `(X, 0)` on `T*Q` for a vector field `X` on `Q`.
pub fn lift_field(x: &VectorField) -> VectorField {
    let n = x.dim();
    let comps = x
        .comps()
        .iter()
        .map(|c| c.embed(2 * n, 0))
        .chain((0..n).map(|_| Poly::zero(2 * n)))
        .collect();
    VectorField::new(comps).expect("length 2n")
}

#[derive(Debug, Clone)]
pub struct ConstrainedSystem {
    n: usize,
    l_basis: Vec<VectorField>,
    h: Poly,
    sampler: Sampler,
    l_span: PolySpan,
    /// independent sections of `ann L`
    ann_l: Vec<OneForm>,
}

impl ConstrainedSystem {
    pub fn new(l_basis: Vec<VectorField>, h: Poly) -> Result<Self> {
        Self::with_sampler(l_basis, h, Sampler::default())
    }

    pub fn with_sampler(l_basis: Vec<VectorField>, h: Poly, sampler: Sampler) -> Result<Self> {
        let n = h.nvars() / 2;
        if n == 0 || h.nvars() != 2 * n {
            return Err(Error::Invalid(format!("H must live on 2n variables, found {}", h.nvars())));
        }
        for x in &l_basis {
            check_dim(n, x.dim())?;
        }
        let k = l_basis.len();
        if k > n {
            return Err(Error::Invalid(format!("{k} fields cannot be independent on R^{n}")));
        }
        let cols: Vec<Vec<Poly>> = l_basis.iter().map(|x| x.comps().to_vec()).collect();
        let points = sampler.points(n);
        if let Some(((ra, pa), (rb, pb))) = span::rank_jump(n, n, &cols, &points) {
            return Err(Error::RegularityViolation {
                what: "L".into(),
                rank_a: ra,
                point_a: rational::format_point(&pa),
                rank_b: rb,
                point_b: rational::format_point(&pb),
            });
        }
        let l_span = PolySpan::new(n, n, cols, sampler);
        if l_span.generic_rank() != k {
            return Err(Error::Invalid(format!("L basis has rank {} < {k}", l_span.generic_rank())));
        }
        let ann_cols = l_span.annihilators().to_vec();
        let ann_span = PolySpan::new(n, n, ann_cols.clone(), sampler);
        let ann_l = ann_span
            .independent()
            .iter()
            .map(|&i| OneForm::new(ann_cols[i].clone()).expect("length n"))
            .collect();
        Ok(Self {
            n,
            l_basis,
            h,
            sampler,
            l_span,
            ann_l,
        })
    }

    pub fn q_dim(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.l_basis.len()
    }

    pub fn l_basis(&self) -> &[VectorField] {
        &self.l_basis
    }

    pub fn hamiltonian(&self) -> &Poly {
        &self.h
    }

    /// Independent sections of `ann L`.
    pub fn ann_l(&self) -> &[OneForm] {
        &self.ann_l
    }

    /// Velocity constraints `a(H_p)` for `a` in `ann L`.
    pub fn constraint_functions(&self) -> Vec<Poly> {
        let n = self.n;
        let hp: Vec<Poly> = (0..n).map(|j| self.h.partial(n + j)).collect();
        self.ann_l
            .iter()
            .map(|a| span::contract(2 * n, &lift_form(a).comps()[..n], &hp))
            .collect()
    }

    /// Generators of `S_L` and of its `w`-orthogonal.
    pub fn build_sl(&self) -> SlFields {
        let n = self.n;
        let p = canonical_bivector(n);
        let sl = self.ann_l.iter().map(|a| p.sharp(&lift_form(a))).collect();
        let mut perp: Vec<VectorField> = self.l_basis.iter().map(lift_field).collect();
        perp.extend((0..n).map(|j| VectorField::coordinate(2 * n, n + j)));
        SlFields { n, sl, sl_perp: perp }
    }

    /// `E_L` with `Sigma = ann S_L = {dq_i} + {sum_j X^j dp_j : X in L}`,
    /// `S' = 0` and `Pi = P`.
    pub fn e_l(&self) -> Result<BigIsoStructure> {
        let n = self.n;
        let mut sigma: Vec<OneForm> = (0..n).map(|i| OneForm::coordinate(2 * n, i)).collect();
        for x in &self.l_basis {
            let comps = (0..n)
                .map(|_| Poly::zero(2 * n))
                .chain(x.comps().iter().map(|c| c.embed(2 * n, 0)))
                .collect();
            sigma.push(OneForm::new(comps)?);
        }
        BigIsoStructure::with_sampler(2 * n, sigma, Vec::new(), canonical_bivector(n), self.sampler)
    }

    /// The equivalent port system `x' = J dH + b lambda`, `b^T dH = 0`, with
    /// `J a = #P a` and the columns of `b` spanning `S_L`.
    pub fn port_system(&self) -> Result<PortHamSystem> {
        let m = 2 * self.n;
        let p = canonical_bivector(self.n);
        let j: Vec<Vec<Poly>> = (0..m).map(|a| (0..m).map(|c| p.get(c, a)).collect()).collect();
        let sl = self.build_sl().sl;
        let b: Vec<Vec<Poly>> = (0..m).map(|r| sl.iter().map(|v| v.comp(r).clone()).collect()).collect();
        PortHamSystem::new(
            MatrixField::Poly(j),
            MatrixField::zeros(m, 0, m),
            MatrixField::Poly(b),
            ScalarField::Poly(self.h.clone()),
        )
    }

    /// `X` and the multipliers at a state.
    pub fn constrained_field_at(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        port_ham::vector_field_at(&self.port_system()?, &Flow::Zero, 0.0, x)
    }

    /// RK4 along the constrained field; `constraint_res` records the velocity
    /// defect `max |a(H_p)|`.
    pub fn simulate(&self, x0: &[f64], opts: &SimOptions) -> Result<Trajectory> {
        port_ham::simulate_constrained(&self.port_system()?, &Flow::Zero, x0, opts)
    }

    /// Frobenius test of `L`, cross-checked against integrability of `E_L`.
    pub fn holonomy_test(&self) -> Result<HolonomyReport> {
        let mut witness = None;
        'outer: for i in 0..self.l_basis.len() {
            for j in i + 1..self.l_basis.len() {
                let b = tensor::lie_bracket(&self.l_basis[i], &self.l_basis[j]);
                if let Membership::NotMember { point, .. } = self.l_span.contains(b.comps()) {
                    witness = Some(HolonomyWitness {
                        left: i,
                        right: j,
                        bracket: b.to_string(),
                        point: point.map(|x| rational::format_point(&x)),
                    });
                    break 'outer;
                }
            }
        }
        let holonomic = witness.is_none();
        let e_l_integrable = self.e_l()?.check_integrability().overall;
        Ok(HolonomyReport {
            holonomic,
            witness,
            e_l_integrable,
            agree: holonomic == e_l_integrable,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SlFields {
    n: usize,
    pub sl: Vec<VectorField>,
    pub sl_perp: Vec<VectorField>,
}

impl SlFields {
    fn at(&self, fields: &[VectorField], x: &[Rational]) -> Subspace {
        Subspace::span(2 * self.n, fields.iter().map(|f| f.eval(x))).expect("length")
    }

    pub fn sl_at(&self, x: &[Rational]) -> Subspace {
        self.at(&self.sl, x)
    }

    pub fn sl_perp_at(&self, x: &[Rational]) -> Subspace {
        self.at(&self.sl_perp, x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolonomyWitness {
    pub left: usize,
    pub right: usize,
    pub bracket: String,
    pub point: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolonomyReport {
    pub holonomic: bool,
    pub witness: Option<HolonomyWitness>,
    pub e_l_integrable: bool,
    pub agree: bool,
}

/// Distance from `x0` after flowing along `X_i`, `X_j`, `-X_i`, `-X_j` for
/// time `t` each. Zero for commuting fields; about `t^2 |[X_i, X_j]|` otherwise.
pub fn loop_defect(fields: &[VectorField], i: usize, j: usize, x0: &[f64], t: f64, step: f64) -> Result<f64> {
    let legs = [(i, 1.0), (j, 1.0), (i, -1.0), (j, -1.0)];
    let mut x = x0.to_vec();
    for (k, sign) in legs {
        let f = fields[k].clone();
        let path = integrate::rk4(
            |_, y: &[f64]| Ok(f.eval_f64(y).into_iter().map(|v| sign * v).collect()),
            &x,
            0.0,
            t,
            step,
        )?;
        x = path.last().cloned().unwrap_or(x);
    }
    Ok(x.iter().zip(x0).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
}

/// `true` when `w(u, v) = 0` for all `u, v` in the span.
pub fn is_w_isotropic(w: &[Vector], s: &Subspace) -> bool {
    let b = s.basis();
    b.iter().all(|u| b.iter().all(|v| linalg::dot(&flat(w, u), v).is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigvec::sharp_matrix;

    fn p(s: &str, n: usize) -> Poly {
        Poly::parse(s, n, None).unwrap()
    }
    fn field(s: &[&str]) -> VectorField {
        VectorField::parse(s).unwrap()
    }
    fn kinetic(n: usize) -> Poly {
        let src = (1..=n).map(|i| format!("x{}^2/2", n + i)).collect::<Vec<_>>().join(" + ");
        p(&src, 2 * n)
    }

    #[test]
    fn sharp_flat_is_minus_identity() {
        for n in 1..=3 {
            let pm = canonical_bivector(n).matrix_at(&linalg::zeros(2 * n));
            let w = canonical_form(n);
            for a in 0..2 * n {
                let e = linalg::unit(2 * n, a);
                let back = sharp_matrix(&pm, &flat(&w, &e));
                let minus: Vector = e.iter().map(|c| -c).collect();
                assert_eq!(back, minus);
            }
            assert!(tensor::schouten_pp(&canonical_bivector(n)).is_zero());
        }
        // q_dim = 1: P(dq, dp) = -1
        assert_eq!(canonical_bivector(1).get(0, 1), -Poly::one(2));
    }

    #[test]
    fn sl_dimensions_and_isotropy() {
        let full = ConstrainedSystem::new(vec![field(&["1", "0"]), field(&["0", "1"])], kinetic(2)).unwrap();
        let f = full.build_sl();
        let x0 = linalg::zeros(4);
        assert_eq!(f.sl_at(&x0).dim(), 0);
        assert_eq!(f.sl_perp_at(&x0).dim(), 4);

        let plane = ConstrainedSystem::new(vec![field(&["1", "0", "0"]), field(&["0", "1", "0"])], kinetic(3)).unwrap();
        let f = plane.build_sl();
        let w = canonical_form(3);
        for x in Sampler::default().points(6).iter().take(40) {
            let sl = f.sl_at(x);
            assert_eq!(sl.dim(), 1);
            assert_eq!(sl, Subspace::span(6, [linalg::unit(6, 5)]).unwrap());
            assert_eq!(f.sl_perp_at(x).dim(), 5);
            assert!(is_w_isotropic(&w, &sl));
        }
        let heis = ConstrainedSystem::new(vec![field(&["1", "0", "0"]), field(&["0", "1", "x1"])], kinetic(3)).unwrap();
        let f = heis.build_sl();
        for x in Sampler::default().points(6).iter().take(40) {
            let sl = f.sl_at(x);
            assert!(is_w_isotropic(&w, &sl));
            assert_eq!(sl.dim() + f.sl_perp_at(x).dim(), 6);
            // S_L^w is the w-orthogonal of S_L
            let perp = f.sl_perp_at(x);
            for u in sl.basis() {
                for v in perp.basis() {
                    assert!(linalg::dot(&flat(&w, u), v).is_zero());
                }
            }
        }
    }

    #[test]
    fn unconstrained_field_is_hamilton() {
        let sys = ConstrainedSystem::new(vec![field(&["1"])], p("x2^2/2 + x1^2/2", 2)).unwrap();
        let (xdot, lambda) = sys.constrained_field_at(&[0.5, 2.0]).unwrap();
        assert!(lambda.is_empty());
        assert_eq!(xdot, vec![2.0, -0.5]);
    }

    #[test]
    fn free_particle_on_a_line() {
        let sys = ConstrainedSystem::new(vec![field(&["1", "0"])], kinetic(2)).unwrap();
        let t = sys.simulate(&[0.0, 0.3, 1.0, 0.0], &SimOptions::default()).unwrap();
        assert!(t.max_constraint_residual() <= 1e-8);
        assert!(t.states.iter().all(|x| (x[1] - 0.3).abs() <= 1e-8));
        assert!(t.max_energy_drift() <= 1e-8);
    }

    #[test]
    fn heisenberg_particle() {
        let l = vec![field(&["1", "0", "0"]), field(&["0", "1", "x1"])];
        let mut h = kinetic(3);
        // a potential in x keeps the motion from being a straight line
        h = h + p("x1^2/2", 6);
        let sys = ConstrainedSystem::new(l.clone(), h).unwrap();
        let t = sys.simulate(&[0.0, 0.0, 0.0, 1.0, 1.0, 0.0], &SimOptions::default()).unwrap();
        assert!(t.max_constraint_residual() <= 1e-8);
        assert!(t.max_energy_drift() <= 1e-8);
        assert!(loop_defect(&l, 0, 1, &[0.0, 0.0, 0.0], 0.5, 1e-3).unwrap() > 0.01);
        let plane = vec![field(&["1", "0", "0"]), field(&["0", "1", "0"])];
        assert!(loop_defect(&plane, 0, 1, &[0.0, 0.0, 0.0], 0.5, 1e-3).unwrap() < 1e-12);
    }

    #[test]
    fn holonomy_examples() {
        let plane = ConstrainedSystem::new(vec![field(&["1", "0", "0"]), field(&["0", "1", "0"])], kinetic(3)).unwrap();
        let r = plane.holonomy_test().unwrap();
        assert!(r.holonomic && r.agree);
        let heis = ConstrainedSystem::new(vec![field(&["1", "0", "0"]), field(&["0", "1", "x1"])], kinetic(3)).unwrap();
        let r = heis.holonomy_test().unwrap();
        assert!(!r.holonomic && r.agree);
        assert_eq!(r.witness.unwrap().bracket, "(0, 0, 1)");
    }

    #[test]
    fn rank_drop_is_rejected() {
        assert!(matches!(
            ConstrainedSystem::new(vec![field(&["x1", "0"])], kinetic(2)),
            Err(Error::RegularityViolation { .. })
        ));
    }
}
