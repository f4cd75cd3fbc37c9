//! Polynomial tensor fields on R^m and the operators of big-tangent geometry:
//! exterior derivative, Lie bracket and derivatives, the Schouten bracket
//! `[P, P]`, the bracket of 1-forms `{a, b}_P` and the Courant bracket.
//!
//! Conventions: `(#_P a)(b) = P(a, b)`, so `(#_P a)^j = a_i P^{ij}`.
//! `[P, P]` is normalized so that
//! `P({a1, a2}_P, b) = b([#a1, #a2]) + 1/2 [P, P](a1, a2, b)`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::Vector;
use crate::poly::{self, Poly};
use crate::rational::{self, Rational};

pub mod numeric;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorField {
    comps: Vec<Poly>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OneForm {
    comps: Vec<Poly>,
}

fn check_ring(m: usize, comps: &[Poly]) -> Result<()> {
    check_dim(m, comps.len())?;
    for c in comps {
        check_dim(m, c.nvars())?;
    }
    Ok(())
}

macro_rules! component_field {
    ($t:ident) => {
        impl $t {
            pub fn new(comps: Vec<Poly>) -> Result<Self> {
                check_ring(comps.len(), &comps)?;
                Ok(Self { comps })
            }

            pub fn zero(m: usize) -> Self {
                Self {
                    comps: vec![Poly::zero(m); m],
                }
            }

            /// Constant field with the given components.
            pub fn constant(c: &[Rational]) -> Self {
                let m = c.len();
                Self {
                    comps: c.iter().map(|x| Poly::constant(m, x.clone())).collect(),
                }
            }

            /// The i-th coordinate basis element.
            pub fn coordinate(m: usize, i: usize) -> Self {
                let mut f = Self::zero(m);
                f.comps[i] = Poly::one(m);
                f
            }

            pub fn parse(exprs: &[&str]) -> Result<Self> {
                let m = exprs.len();
                Self::new(
                    exprs
                        .iter()
                        .map(|s| Poly::parse(s, m, None))
                        .collect::<Result<_>>()?,
                )
            }

            pub fn dim(&self) -> usize {
                self.comps.len()
            }

            pub fn comps(&self) -> &[Poly] {
                &self.comps
            }

            pub fn into_comps(self) -> Vec<Poly> {
                self.comps
            }

            pub fn comp(&self, i: usize) -> &Poly {
                &self.comps[i]
            }

            pub fn is_zero(&self) -> bool {
                self.comps.iter().all(Poly::is_zero)
            }

            pub fn degree(&self) -> u32 {
                self.comps.iter().map(Poly::degree).max().unwrap_or(0)
            }

            pub fn eval(&self, x: &[Rational]) -> Vector {
                self.comps.iter().map(|p| p.eval(x)).collect()
            }

            pub fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
                self.comps.iter().map(|p| p.eval_f64(x)).collect()
            }

            pub fn add(&self, o: &Self) -> Self {
                Self {
                    comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a + b).collect(),
                }
            }

            pub fn sub(&self, o: &Self) -> Self {
                Self {
                    comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a - b).collect(),
                }
            }

            pub fn neg(&self) -> Self {
                Self {
                    comps: self.comps.iter().map(|a| -a).collect(),
                }
            }

            /// Multiplication by a function.
            pub fn mul(&self, f: &Poly) -> Self {
                Self {
                    comps: self.comps.iter().map(|a| a * f).collect(),
                }
            }

            pub fn scale(&self, c: &Rational) -> Self {
                Self {
                    comps: self.comps.iter().map(|a| a.scale(c)).collect(),
                }
            }

            /// Pulls the components back along a polynomial substitution.
            pub fn compose(&self, subs: &[Poly]) -> Vec<Poly> {
                self.comps.iter().map(|p| p.compose(subs)).collect()
            }
        }
    };
}

component_field!(VectorField);
component_field!(OneForm);

macro_rules! component_display {
    ($t:ident) => {
        impl std::fmt::Display for $t {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                let parts: Vec<String> = self.comps.iter().map(|c| c.to_string()).collect();
                write!(f, "({})", parts.join(", "))
            }
        }
    };
}

component_display!(VectorField);
component_display!(OneForm);

impl VectorField {
    /// `X(f)`.
    pub fn apply(&self, f: &Poly) -> Poly {
        let m = self.dim();
        poly::sum(
            m,
            self.comps
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, c)| c * &f.partial(j)),
        )
    }
}

impl OneForm {
    /// `a(X)`.
    pub fn contract(&self, x: &VectorField) -> Poly {
        crate::span::contract(self.dim(), &self.comps, &x.comps)
    }
}

/// A bivector field, stored by its components `P^{ij}` for `i < j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bivector {
    dim: usize,
    upper: BTreeMap<(usize, usize), Poly>,
}

impl Bivector {
    pub fn zero(m: usize) -> Self {
        Self {
            dim: m,
            upper: BTreeMap::new(),
        }
    }

    /// Sets `P^{ij} = c` (and `P^{ji} = -c`).
    pub fn set(&mut self, i: usize, j: usize, c: Poly) -> Result<()> {
        check_dim(self.dim, c.nvars())?;
        if i == j {
            if c.is_zero() {
                return Ok(());
            }
            return Err(Error::Invalid(format!("bivector diagonal entry ({i},{i}) must vanish")));
        }
        if i >= self.dim || j >= self.dim {
            return Err(Error::Invalid(format!("index ({i},{j}) out of range for dimension {}", self.dim)));
        }
        let (key, val) = if i < j { ((i, j), c) } else { ((j, i), -c) };
        if val.is_zero() {
            self.upper.remove(&key);
        } else {
            self.upper.insert(key, val);
        }
        Ok(())
    }

    pub fn with(mut self, i: usize, j: usize, c: Poly) -> Result<Self> {
        self.set(i, j, c)?;
        Ok(self)
    }

    /// From a full matrix of components, which must be skew.
    pub fn from_matrix(m: &[Vec<Poly>]) -> Result<Self> {
        let n = m.len();
        let mut b = Self::zero(n);
        for i in 0..n {
            check_dim(n, m[i].len())?;
            if !m[i][i].is_zero() {
                return Err(Error::Invalid(format!("bivector matrix has nonzero diagonal at {i}")));
            }
            for j in i + 1..n {
                if !(&m[i][j] + &m[j][i]).is_zero() {
                    return Err(Error::Invalid(format!("bivector matrix not skew at ({i},{j})")));
                }
                b.set(i, j, m[i][j].clone())?;
            }
        }
        Ok(b)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Poly {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.upper.get(&(i, j)).cloned().unwrap_or_else(|| Poly::zero(self.dim)),
            std::cmp::Ordering::Greater => -self.get(j, i),
            std::cmp::Ordering::Equal => Poly::zero(self.dim),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Poly)> {
        self.upper.iter().map(|(&(i, j), p)| (i, j, p))
    }

    pub fn is_zero(&self) -> bool {
        self.upper.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.upper.values().map(Poly::degree).max().unwrap_or(0)
    }

    pub fn matrix(&self) -> Vec<Vec<Poly>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn matrix_at(&self, x: &[Rational]) -> Vec<Vector> {
        let mut m = vec![vec![Rational::zero(); self.dim]; self.dim];
        for (&(i, j), p) in &self.upper {
            let v = p.eval(x);
            m[j][i] = -v.clone();
            m[i][j] = v;
        }
        m
    }

    pub fn matrix_f64(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.dim]; self.dim];
        for (&(i, j), p) in &self.upper {
            let v = p.eval_f64(x);
            m[i][j] = v;
            m[j][i] = -v;
        }
        m
    }

    /// `P(a, b) = a_i b_j P^{ij}`.
    pub fn eval_forms(&self, a: &OneForm, b: &OneForm) -> Poly {
        poly::sum(
            self.dim,
            self.upper.iter().map(|(&(i, j), p)| {
                let t = &(a.comp(i) * b.comp(j)) - &(a.comp(j) * b.comp(i));
                &t * p
            }),
        )
    }

    /// `#_P a`, with `(#_P a)(b) = P(a, b)`.
    pub fn sharp(&self, a: &OneForm) -> VectorField {
        let mut comps = vec![Poly::zero(self.dim); self.dim];
        for (&(i, j), p) in &self.upper {
            // a_i P^{ij} e_j + a_j P^{ji} e_i
            comps[j] = &comps[j] + &(a.comp(i) * p);
            comps[i] = &comps[i] - &(a.comp(j) * p);
        }
        VectorField { comps }
    }

    /// Pointwise `#_P` on a constant covector.
    pub fn sharp_at(&self, x: &[Rational], a: &[Rational]) -> Vector {
        let m = self.matrix_at(x);
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| &a[i] * &m[i][j]).sum())
            .collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), p) in &o.upper {
            let v = &out.get(i, j) + p;
            out.set(i, j, v).expect("same dimension");
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.dim);
        for (&(i, j), p) in &self.upper {
            out.set(i, j, p.scale(c)).expect("same dimension");
        }
        out
    }

    /// Re-embeds into `m` coordinates with index `i` sent to `offset + i`.
    pub fn embed(&self, m: usize, offset: usize) -> Self {
        let mut out = Self::zero(m);
        for (&(i, j), p) in &self.upper {
            out.set(offset + i, offset + j, p.embed(m, offset)).expect("in range");
        }
        out
    }
}

/// A trivector field, stored by components `T^{ijk}` for `i < j < k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trivector {
    dim: usize,
    upper: BTreeMap<(usize, usize, usize), Poly>,
}

impl Trivector {
    pub fn zero(m: usize) -> Self {
        Self {
            dim: m,
            upper: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.upper.is_empty()
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Poly {
        let mut idx = [i, j, k];
        if i == j || j == k || i == k {
            return Poly::zero(self.dim);
        }
        // sort and track parity
        let mut sign = 1;
        for a in 0..3 {
            for b in 0..2 - a {
                if idx[b] > idx[b + 1] {
                    idx.swap(b, b + 1);
                    sign = -sign;
                }
            }
        }
        let v = self
            .upper
            .get(&(idx[0], idx[1], idx[2]))
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.dim));
        if sign > 0 {
            v
        } else {
            -v
        }
    }

    fn set_sorted(&mut self, i: usize, j: usize, k: usize, c: Poly) {
        if c.is_zero() {
            self.upper.remove(&(i, j, k));
        } else {
            self.upper.insert((i, j, k), c);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize, usize), &Poly)> {
        self.upper.iter().map(|(k, v)| (*k, v))
    }

    /// `T(a, b, c) = a_i b_j c_k T^{ijk}`.
    pub fn eval_forms(&self, a: &OneForm, b: &OneForm, c: &OneForm) -> Poly {
        let m = self.dim;
        let mut acc = Poly::zero(m);
        for (&(i, j, k), t) in &self.upper {
            let perms = [
                ((i, j, k), 1),
                ((j, k, i), 1),
                ((k, i, j), 1),
                ((j, i, k), -1),
                ((i, k, j), -1),
                ((k, j, i), -1),
            ];
            let mut s = Poly::zero(m);
            for ((x, y, z), sg) in perms {
                let prod = &(a.comp(x) * b.comp(y)) * c.comp(z);
                s = if sg > 0 { s + prod } else { s - prod };
            }
            acc = acc + &s * t;
        }
        acc
    }

    /// The vector field `V` with `c(V) = T(a, b, c)` for every `c`.
    pub fn contract_two(&self, a: &OneForm, b: &OneForm) -> VectorField {
        let m = self.dim;
        let comps = (0..m)
            .map(|k| {
                let ek = OneForm::coordinate(m, k);
                self.eval_forms(a, b, &ek)
            })
            .collect();
        VectorField { comps }
    }
}

/// A section `(X, a)` of the big tangent bundle.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BigVectorField {
    pub vector: VectorField,
    pub form: OneForm,
}

impl BigVectorField {
    pub fn new(vector: VectorField, form: OneForm) -> Result<Self> {
        check_dim(vector.dim(), form.dim())?;
        Ok(Self { vector, form })
    }

    pub fn zero(m: usize) -> Self {
        Self {
            vector: VectorField::zero(m),
            form: OneForm::zero(m),
        }
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.vector.is_zero() && self.form.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            vector: self.vector.add(&o.vector),
            form: self.form.add(&o.form),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            vector: self.vector.sub(&o.vector),
            form: self.form.sub(&o.form),
        }
    }

    pub fn mul(&self, f: &Poly) -> Self {
        Self {
            vector: self.vector.mul(f),
            form: self.form.mul(f),
        }
    }

    /// Components `(X^1..X^m, a_1..a_m)`.
    pub fn stacked(&self) -> Vec<Poly> {
        self.vector.comps().iter().chain(self.form.comps()).cloned().collect()
    }

    pub fn eval(&self, x: &[Rational]) -> Vector {
        self.stacked().iter().map(|p| p.eval(x)).collect()
    }
}

pub fn exterior_d(f: &Poly) -> OneForm {
    OneForm { comps: f.gradient() }
}

/// `[X, Y]^i = X^j d_j Y^i - Y^j d_j X^i`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> VectorField {
    let comps = (0..x.dim())
        .map(|i| &x.apply(y.comp(i)) - &y.apply(x.comp(i)))
        .collect();
    VectorField { comps }
}

/// `(L_X a)_i = X^j d_j a_i + a_j d_i X^j`.
pub fn lie_derivative_form(x: &VectorField, a: &OneForm) -> OneForm {
    let m = x.dim();
    let comps = (0..m)
        .map(|i| {
            let transport = x.apply(a.comp(i));
            let stretch = poly::sum(
                m,
                (0..m)
                    .filter(|&j| !a.comp(j).is_zero())
                    .map(|j| a.comp(j) * &x.comp(j).partial(i)),
            );
            transport + stretch
        })
        .collect();
    OneForm { comps }
}

/// `(L_X P)^{ij} = X^k d_k P^{ij} - P^{kj} d_k X^i - P^{ik} d_k X^j`.
pub fn lie_derivative_bivector(x: &VectorField, p: &Bivector) -> Bivector {
    let m = x.dim();
    let mut out = Bivector::zero(m);
    let full = p.matrix();
    let dx: Vec<Vec<Poly>> = (0..m).map(|i| x.comp(i).gradient()).collect();
    for i in 0..m {
        for j in i + 1..m {
            let mut v = x.apply(&full[i][j]);
            for k in 0..m {
                if !full[k][j].is_zero() && !dx[i][k].is_zero() {
                    v = v - &full[k][j] * &dx[i][k];
                }
                if !full[i][k].is_zero() && !dx[j][k].is_zero() {
                    v = v - &full[i][k] * &dx[j][k];
                }
            }
            out.set(i, j, v).expect("in range");
        }
    }
    out
}

/// `[P, P]^{abc} = -2 sum_cyclic P^{al} d_l P^{bc}`.
pub fn schouten_pp(p: &Bivector) -> Trivector {
    let m = p.dim();
    let full = p.matrix();
    let cyc = |a: usize, b: usize, c: usize| -> Poly {
        poly::sum(
            m,
            (0..m)
                .filter(|&l| !full[a][l].is_zero())
                .map(|l| &full[a][l] * &full[b][c].partial(l)),
        )
    };
    let mut t = Trivector::zero(m);
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                let s = cyc(a, b, c) + cyc(b, c, a) + cyc(c, a, b);
                t.set_sorted(a, b, c, s.scale(&rational::int(-2)));
            }
        }
    }
    t
}

/// `{a, b}_P = L_{#a} b - L_{#b} a - d(P(a, b))`.
pub fn one_form_bracket(p: &Bivector, a: &OneForm, b: &OneForm) -> OneForm {
    let sa = p.sharp(a);
    let sb = p.sharp(b);
    lie_derivative_form(&sa, b)
        .sub(&lie_derivative_form(&sb, a))
        .sub(&exterior_d(&p.eval_forms(a, b)))
}

/// `[(X,a),(Y,b)] = ([X,Y], L_X b - L_Y a + 1/2 d(a(Y) - b(X)))`.
pub fn courant_bracket(u: &BigVectorField, v: &BigVectorField) -> BigVectorField {
    let half = rational::frac(1, 2);
    let skew = &u.form.contract(&v.vector) - &v.form.contract(&u.vector);
    BigVectorField {
        vector: lie_bracket(&u.vector, &v.vector),
        form: lie_derivative_form(&u.vector, &v.form)
            .sub(&lie_derivative_form(&v.vector, &u.form))
            .add(&exterior_d(&skew).scale(&half)),
    }
}

/// `g(u, v) = 1/2 (a(Y) + b(X))` for fields.
pub fn pairing_g(u: &BigVectorField, v: &BigVectorField) -> Poly {
    (&u.form.contract(&v.vector) + &v.form.contract(&u.vector)).scale(&rational::frac(1, 2))
}

/// `g([u, w], v) + g(w, [u, v])`, which vanishes when `u, v` are sections of
/// an isotropic `E` and `w` a section of its orthogonal.
pub fn axiom_v_residual(u: &BigVectorField, w: &BigVectorField, v: &BigVectorField) -> Poly {
    &pairing_g(&courant_bracket(u, w), v) + &pairing_g(w, &courant_bracket(u, v))
}

/// Serialized form of one polynomial: `(exponents, numerator, denominator)` triples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTerms(pub Vec<(Vec<u32>, String, String)>);

impl PolyTerms {
    pub fn from_poly(p: &Poly) -> Self {
        PolyTerms(
            p.terms()
                .map(|(e, c)| (e.clone(), c.numer().to_string(), c.denom().to_string()))
                .collect(),
        )
    }

    pub fn to_poly(&self, nvars: usize) -> Result<Poly> {
        Poly::from_terms(
            nvars,
            self.0
                .iter()
                .map(|(e, n, d)| Ok((e.clone(), rational::parse(&format!("{n}/{d}"))?)))
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn vf(s: &[&str]) -> VectorField {
        VectorField::parse(s).unwrap()
    }
    fn of(s: &[&str]) -> OneForm {
        OneForm::parse(s).unwrap()
    }

    #[test]
    fn coordinate_fields_commute() {
        assert!(lie_bracket(&vf(&["1", "0"]), &vf(&["0", "1"])).is_zero());
    }

    #[test]
    fn bracket_dx_with_x_dy() {
        assert_eq!(lie_bracket(&vf(&["1", "0"]), &vf(&["0", "x1"])), vf(&["0", "1"]));
    }

    #[test]
    fn lie_derivative_of_x_dy() {
        assert_eq!(lie_derivative_form(&vf(&["1", "0"]), &of(&["0", "x1"])), of(&["0", "1"]));
    }

    #[test]
    fn sharp_convention() {
        // P(dx, dy) = 1: #dx = d/dy, #dy = -d/dx
        let p = Bivector::zero(2).with(0, 1, Poly::one(2)).unwrap();
        assert_eq!(p.sharp(&of(&["1", "0"])), vf(&["0", "1"]));
        assert_eq!(p.sharp(&of(&["0", "1"])), vf(&["-1", "0"]));
        assert_eq!(p.eval_forms(&of(&["1", "0"]), &of(&["0", "1"])), Poly::one(2));
    }

    #[test]
    fn schouten_vanishes_in_dim_two_and_for_constants() {
        let p = Bivector::zero(2).with(0, 1, Poly::parse("x1^2*x2 + 3", 2, None).unwrap()).unwrap();
        assert!(schouten_pp(&p).is_zero());
        let q = Bivector::zero(4)
            .with(0, 2, Poly::int(4, 2))
            .unwrap()
            .with(1, 3, Poly::int(4, -1))
            .unwrap();
        assert!(schouten_pp(&q).is_zero());
    }

    #[test]
    fn trivector_antisymmetry() {
        let p = Bivector::zero(3)
            .with(0, 1, Poly::one(3))
            .unwrap()
            .with(1, 2, Poly::var(3, 1))
            .unwrap();
        let t = schouten_pp(&p);
        assert_eq!(t.get(0, 1, 2), Poly::int(3, -2));
        assert_eq!(t.get(1, 0, 2), Poly::int(3, 2));
        assert_eq!(t.get(2, 0, 1), Poly::int(3, -2));
        assert!(t.get(0, 0, 1).is_zero());
    }

    #[test]
    fn courant_examples() {
        let x = BigVectorField::new(vf(&["1", "0"]), OneForm::zero(2)).unwrap();
        let y = BigVectorField::new(VectorField::zero(2), of(&["0", "x1"])).unwrap();
        let b = courant_bracket(&x, &y);
        assert!(b.vector.is_zero());
        assert_eq!(b.form, of(&["0", "1"]));
        let a = BigVectorField::new(VectorField::zero(2), of(&["x2", "1"])).unwrap();
        assert!(courant_bracket(&a, &y).is_zero());
    }

    #[test]
    fn one_form_bracket_constant_case() {
        let p = Bivector::zero(2).with(0, 1, Poly::int(2, 5)).unwrap();
        assert!(one_form_bracket(&p, &of(&["1", "2"]), &of(&["3", "-1"])).is_zero());
    }

    #[test]
    fn axiom_v_example() {
        let u = BigVectorField::new(vf(&["1", "0"]), OneForm::zero(2)).unwrap();
        let w = BigVectorField::new(VectorField::zero(2), of(&["0", "1"])).unwrap();
        assert!(axiom_v_residual(&u, &w, &u).is_zero());
        let z = BigVectorField::zero(2);
        assert!(axiom_v_residual(&z, &z, &z).is_zero());
    }

    #[test]
    fn lie_derivative_bivector_scaling() {
        // L_{x d/dx} (d/dx ^ d/dp) = -(d/dx ^ d/dp)
        let p = Bivector::zero(2).with(0, 1, Poly::one(2)).unwrap();
        let z = vf(&["x1", "0"]);
        assert_eq!(lie_derivative_bivector(&z, &p), p.scale(&int(-1)));
    }

    #[test]
    fn poly_terms_roundtrip() {
        let p = Poly::parse("x1^2/3 - 7*x2", 2, None).unwrap();
        assert_eq!(PolyTerms::from_poly(&p).to_poly(2).unwrap(), p);
    }
}
