//! Pointwise linear algebra in `V + V*`, `V = Q^m`: the split-signature metric
//! `g`, the 2-form `omega`, isotropic subspaces and their orthogonals, and the
//! description of an isotropic subspace by `(U_E, U_E', varpi)`.
//!
//! A big vector `(X, a)` is stored stacked as `(X^1..X^m, a_1..a_m)` when it
//! lives inside a [`Subspace`] of `Q^{2m}`.

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, Subspace, Vector};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BigVector {
    #[serde(with = "crate::linalg::serde_vec")]
    pub vector: Vector,
    #[serde(with = "crate::linalg::serde_vec")]
    pub covector: Vector,
}

impl BigVector {
    pub fn new(vector: Vector, covector: Vector) -> Result<Self> {
        check_dim(vector.len(), covector.len())?;
        if vector.is_empty() {
            return Err(Error::Invalid("ambient dimension must be at least 1".into()));
        }
        Ok(Self { vector, covector })
    }

    pub fn from_stacked(v: &[Rational]) -> Self {
        let m = v.len() / 2;
        Self {
            vector: v[..m].to_vec(),
            covector: v[m..].to_vec(),
        }
    }

    pub fn stacked(&self) -> Vector {
        self.vector.iter().chain(&self.covector).cloned().collect()
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }
}

/// `g(u, v) = 1/2 (a(Y) + b(X))`.
pub fn pairing_g(u: &BigVector, v: &BigVector) -> Result<Rational> {
    check_dim(u.dim(), v.dim())?;
    Ok(g_stacked(&u.stacked(), &v.stacked()))
}

/// `omega(u, v) = 1/2 (a(Y) - b(X))`.
pub fn pairing_omega(u: &BigVector, v: &BigVector) -> Result<Rational> {
    check_dim(u.dim(), v.dim())?;
    let half = rational::frac(1, 2);
    Ok(half * (linalg::dot(&u.covector, &v.vector) - linalg::dot(&v.covector, &u.vector)))
}

/// `g` on stacked vectors of length `2m`.
pub fn g_stacked(u: &[Rational], v: &[Rational]) -> Rational {
    let m = u.len() / 2;
    let half = rational::frac(1, 2);
    half * (linalg::dot(&u[m..], &v[..m]) + linalg::dot(&v[m..], &u[..m]))
}

/// The row `w -> g(u, w)` as a covector on `Q^{2m}`, scaled by 2.
fn g_row(u: &[Rational]) -> Vector {
    let m = u.len() / 2;
    u[m..].iter().chain(&u[..m]).cloned().collect()
}

/// `{w : g(w, u) = 0 for all u in s}` for any subspace `s` of `Q^{2m}`.
pub fn orthogonal(s: &Subspace) -> Subspace {
    let n = s.ambient_dim();
    let rows: Vec<Vector> = s.basis().iter().map(|u| g_row(u)).collect();
    Subspace::span(n, linalg::kernel(&rows, n)).expect("kernel length")
}

pub fn is_isotropic(s: &Subspace) -> bool {
    let b = s.basis();
    (0..b.len()).all(|i| (i..b.len()).all(|j| g_stacked(&b[i], &b[j]).is_zero()))
}

/// Projection to `V` of a subspace of `V + V*`.
pub fn project_vector(s: &Subspace) -> Subspace {
    let m = s.ambient_dim() / 2;
    Subspace::span(m, s.basis().iter().map(|v| v[..m].to_vec())).expect("length")
}

/// Projection to `V*` of a subspace of `V + V*`.
pub fn project_covector(s: &Subspace) -> Subspace {
    let m = s.ambient_dim() / 2;
    Subspace::span(m, s.basis().iter().map(|v| v[m..].to_vec())).expect("length")
}

/// Embeds vector subspaces `A` of `V` and `B` of `V*` as `A + B` in `V + V*`.
pub fn direct_sum(vectors: &Subspace, covectors: &Subspace) -> Subspace {
    let m = vectors.ambient_dim();
    let zero = linalg::zeros(m);
    let rows = vectors
        .basis()
        .iter()
        .map(|v| v.iter().chain(&zero).cloned().collect())
        .chain(covectors.basis().iter().map(|a| zero.iter().chain(a).cloned().collect()));
    Subspace::span(2 * m, rows).expect("length")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IsotropicSubspace {
    ambient: usize,
    space: Subspace,
}

impl IsotropicSubspace {
    /// From a linearly independent, mutually `g`-orthogonal basis.
    pub fn new(m: usize, basis: &[BigVector]) -> Result<Self> {
        for b in basis {
            check_dim(m, b.dim())?;
        }
        for i in 0..basis.len() {
            for j in i..basis.len() {
                if !pairing_g(&basis[i], &basis[j])?.is_zero() {
                    return Err(Error::NotIsotropic(i, j));
                }
            }
        }
        let space = Subspace::span(2 * m, basis.iter().map(BigVector::stacked))?;
        if space.dim() != basis.len() {
            return Err(Error::LinearlyDependent);
        }
        Ok(Self { ambient: m, space })
    }

    /// From any spanning set of an isotropic subspace (dependence allowed).
    pub fn from_subspace(space: Subspace) -> Result<Self> {
        if space.ambient_dim() % 2 != 0 {
            return Err(Error::Invalid("big vector space has odd dimension".into()));
        }
        let b = space.basis();
        for i in 0..b.len() {
            for j in i..b.len() {
                if !g_stacked(&b[i], &b[j]).is_zero() {
                    return Err(Error::NotIsotropic(i, j));
                }
            }
        }
        Ok(Self {
            ambient: space.ambient_dim() / 2,
            space,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.space.dim()
    }

    pub fn subspace(&self) -> &Subspace {
        &self.space
    }

    pub fn basis(&self) -> Vec<BigVector> {
        self.space.basis().iter().map(|v| BigVector::from_stacked(v)).collect()
    }

    pub fn contains(&self, u: &BigVector) -> bool {
        u.dim() == self.ambient && self.space.contains(&u.stacked())
    }
}

/// `E' = {w : g(w, u) = 0 for all u in E}`.
pub fn orthogonal_complement(e: &IsotropicSubspace) -> Subspace {
    orthogonal(&e.space)
}

/// `U_E`, `U_E'` and `varpi` as a table `varpi[i][j] = varpi(u_i, w_j)` on the
/// stored (reduced echelon) bases `u_i` of `U_E` and `w_j` of `U_E'`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingData {
    pub u_e: Subspace,
    pub u_e_prime: Subspace,
    #[serde(with = "crate::linalg::serde_rows")]
    pub varpi: Vec<Vector>,
}

impl PairingData {
    pub fn ambient_dim(&self) -> usize {
        self.u_e.ambient_dim()
    }

    /// `varpi(v1, v2)` for `v1 in U_E`, `v2 in U_E'`.
    pub fn eval(&self, v1: &[Rational], v2: &[Rational]) -> Result<Rational> {
        let c1 = self
            .u_e
            .coordinates(v1)
            .ok_or_else(|| Error::InvalidPairing("first argument not in U_E".into()))?;
        let c2 = self
            .u_e_prime
            .coordinates(v2)
            .ok_or_else(|| Error::InvalidPairing("second argument not in U_E'".into()))?;
        Ok(c1
            .iter()
            .zip(&self.varpi)
            .map(|(a, row)| a * linalg::dot(row, &c2))
            .sum())
    }

    fn validate(&self) -> Result<()> {
        let m = self.u_e.ambient_dim();
        check_dim(m, self.u_e_prime.ambient_dim())?;
        if !self.u_e_prime.contains_subspace(&self.u_e) {
            return Err(Error::InvalidPairing("U_E is not contained in U_E'".into()));
        }
        if self.varpi.len() != self.u_e.dim() || self.varpi.iter().any(|r| r.len() != self.u_e_prime.dim()) {
            return Err(Error::InvalidPairing(format!(
                "table must be {} x {}",
                self.u_e.dim(),
                self.u_e_prime.dim()
            )));
        }
        let b = self.u_e.basis();
        for i in 0..b.len() {
            for j in i..b.len() {
                let s = self.eval(&b[i], &b[j])? + self.eval(&b[j], &b[i])?;
                if !s.is_zero() {
                    return Err(Error::InvalidPairing(format!(
                        "restriction to U_E x U_E is not skew at basis pair ({i},{j})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Some covector `a` with `a(w) = target(w)` on a basis `ws` of a subspace.
fn covector_with_values(m: usize, ws: &[Vector], values: &[Rational]) -> Vector {
    linalg::solve(ws, values, m).expect("independent basis admits any values")
}

pub fn extract_pairing(e: &IsotropicSubspace) -> PairingData {
    let m = e.ambient;
    let u_e = project_vector(&e.space);
    let u_e_prime = project_vector(&orthogonal(&e.space));
    // lift each basis vector of U_E to an element of E
    let cols = linalg::transpose(e.space.basis(), 2 * m);
    let vector_rows = &cols[..m];
    let varpi = u_e
        .basis()
        .iter()
        .map(|u| {
            let coeffs = linalg::solve(vector_rows, u, e.rank()).expect("u lies in pr_V E");
            let lift: Vector = (0..m)
                .map(|i| linalg::dot(&cols[m + i], &coeffs))
                .collect();
            u_e_prime.basis().iter().map(|w| linalg::dot(&lift, w)).collect()
        })
        .collect();
    PairingData { u_e, u_e_prime, varpi }
}

/// The unique isotropic `E` with the given data, and its orthogonal `E'`.
pub fn reconstruct(data: &PairingData) -> Result<(IsotropicSubspace, Subspace)> {
    data.validate()?;
    let m = data.ambient_dim();
    let zero = linalg::zeros(m);
    let ws = data.u_e_prime.basis();
    let us = data.u_e.basis();
    let mut e_rows: Vec<Vector> = Vec::new();
    for (u, row) in us.iter().zip(&data.varpi) {
        let a = covector_with_values(m, ws, row);
        e_rows.push(u.iter().chain(&a).cloned().collect());
    }
    for b in data.u_e_prime.annihilator().basis() {
        e_rows.push(zero.iter().chain(b).cloned().collect());
    }
    let mut ep_rows: Vec<Vector> = Vec::new();
    for (j, w) in ws.iter().enumerate() {
        let values: Vector = data.varpi.iter().map(|r| -r[j].clone()).collect();
        let b = covector_with_values(m, us, &values);
        ep_rows.push(w.iter().chain(&b).cloned().collect());
    }
    for c in data.u_e.annihilator().basis() {
        ep_rows.push(zero.iter().chain(c).cloned().collect());
    }
    let e = IsotropicSubspace::from_subspace(Subspace::span(2 * m, e_rows)?)?;
    Ok((e, Subspace::span(2 * m, ep_rows)?))
}

/// `#_P a` for a constant skew matrix `P`: `(#_P a)^j = a_i P^{ij}`.
pub fn sharp_matrix(p: &[Vector], a: &[Rational]) -> Vector {
    let m = a.len();
    (0..m).map(|j| (0..m).map(|i| &a[i] * &p[i][j]).sum()).collect()
}

fn check_skew(p: &[Vector]) -> Result<()> {
    let m = p.len();
    for (i, row) in p.iter().enumerate() {
        check_dim(m, row.len())?;
        for j in 0..m {
            if !(&row[j] + &p[j][i]).is_zero() {
                return Err(Error::Invalid(format!("bivector matrix not skew at ({i},{j})")));
            }
        }
    }
    Ok(())
}

/// `E_P = {(#_P s, s) : s in Sigma}` and
/// `E'_P = {(#_P b + Y, b) : b in V*, Y in ann Sigma}`.
pub fn graph_structure(p: &[Vector], sigma: &Subspace) -> Result<(IsotropicSubspace, Subspace)> {
    check_skew(p)?;
    let m = p.len();
    check_dim(m, sigma.ambient_dim())?;
    let zero = linalg::zeros(m);
    let e_rows = sigma
        .basis()
        .iter()
        .map(|s| sharp_matrix(p, s).into_iter().chain(s.iter().cloned()).collect::<Vector>());
    let e = IsotropicSubspace::from_subspace(Subspace::span(2 * m, e_rows)?)?;
    let mut ep_rows: Vec<Vector> = (0..m)
        .map(|i| {
            let b = linalg::unit(m, i);
            sharp_matrix(p, &b).into_iter().chain(b).collect()
        })
        .collect();
    for y in sigma.annihilator().basis() {
        ep_rows.push(y.iter().chain(&zero).cloned().collect());
    }
    Ok((e, Subspace::span(2 * m, ep_rows)?))
}

/// Random isotropic subspaces built without reference to the pairing data:
/// a random maximal isotropic subspace is obtained from `V + 0` by a chain of
/// metric-preserving maps (B- and beta-transforms, `GL(V)`, and swaps
/// `e_i <-> e_i*`), then a random subspace of it is taken.
pub mod random {
    use super::*;

    fn small<R: Rng>(rng: &mut R) -> Rational {
        rational::int(rng.gen_range(-2..=2))
    }

    fn random_skew<R: Rng>(m: usize, rng: &mut R) -> Vec<Vector> {
        let mut p = vec![linalg::zeros(m); m];
        for i in 0..m {
            for j in i + 1..m {
                let v = small(rng);
                p[j][i] = -v.clone();
                p[i][j] = v;
            }
        }
        p
    }

    /// Unit lower-triangular times a permutation: invertible with small entries.
    fn random_invertible<R: Rng>(m: usize, rng: &mut R) -> (Vec<Vector>, Vec<Vector>) {
        let mut a: Vec<Vector> = (0..m).map(|i| linalg::unit(m, i)).collect();
        for i in 0..m {
            for j in 0..i {
                a[i][j] = small(rng);
            }
        }
        let mut perm: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let a: Vec<Vector> = perm.iter().map(|&i| a[i].clone()).collect();
        // inverse by solving against unit vectors
        let inv_cols: Vec<Vector> = (0..m)
            .map(|k| linalg::solve(&a, &linalg::unit(m, k), m).expect("invertible"))
            .collect();
        (a, linalg::transpose(&inv_cols, m))
    }

    /// A random maximal isotropic subspace of `Q^m + Q^m*` (dimension `m`).
    pub fn maximal_isotropic<R: Rng>(m: usize, rng: &mut R) -> Subspace {
        let mut rows: Vec<Vector> = (0..m)
            .map(|i| {
                let mut v = linalg::zeros(2 * m);
                v[i] = rational::one();
                v
            })
            .collect();
        for _ in 0..3 {
            match rng.gen_range(0..4) {
                0 => {
                    // (X, a) -> (X, a + B X)
                    let b = random_skew(m, rng);
                    for r in &mut rows {
                        let bx = sharp_matrix(&b, &r[..m].to_vec());
                        for i in 0..m {
                            r[m + i] = &r[m + i] + &bx[i];
                        }
                    }
                }
                1 => {
                    // (X, a) -> (X + #_P a, a)
                    let p = random_skew(m, rng);
                    for r in &mut rows {
                        let pa = sharp_matrix(&p, &r[m..].to_vec());
                        for i in 0..m {
                            r[i] = &r[i] + &pa[i];
                        }
                    }
                }
                2 => {
                    // (X, a) -> (A X, A^{-T} a)
                    let (a, ainv) = random_invertible(m, rng);
                    let ainv_t = linalg::transpose(&ainv, m);
                    for r in &mut rows {
                        let x = linalg::mat_vec(&a, &r[..m]);
                        let al = linalg::mat_vec(&ainv_t, &r[m..]);
                        r.splice(.., x.into_iter().chain(al));
                    }
                }
                _ => {
                    for i in 0..m {
                        if rng.gen_bool(0.5) {
                            for r in &mut rows {
                                r.swap(i, m + i);
                            }
                        }
                    }
                }
            }
        }
        Subspace::span(2 * m, rows).expect("length")
    }

    /// A random isotropic subspace of dimension `k <= m`.
    pub fn isotropic<R: Rng>(m: usize, k: usize, rng: &mut R) -> IsotropicSubspace {
        let l = maximal_isotropic(m, rng);
        loop {
            let rows: Vec<Vector> = (0..k)
                .map(|_| {
                    let mut v = linalg::zeros(2 * m);
                    for b in l.basis() {
                        linalg::axpy(&small(rng), b, &mut v);
                    }
                    v
                })
                .collect();
            let s = Subspace::span(2 * m, rows).expect("length");
            if s.dim() == k {
                return IsotropicSubspace::from_subspace(s).expect("subspace of an isotropic space");
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(xs: &[i64]) -> Vector {
        xs.iter().map(|&x| int(x)).collect()
    }
    fn bv(x: &[i64], a: &[i64]) -> BigVector {
        BigVector::new(v(x), v(a)).unwrap()
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(pairing_g(&bv(&[1, 0], &[0, 0]), &bv(&[0, 0], &[1, 0])).unwrap(), frac(1, 2));
        assert_eq!(pairing_g(&bv(&[1, 0], &[1, 0]), &bv(&[1, 0], &[1, 0])).unwrap(), int(1));
        // 1/2 (a(Y) - b(X)) with a = 0, b(X) = 1
        assert_eq!(pairing_omega(&bv(&[1, 0], &[0, 0]), &bv(&[0, 0], &[1, 0])).unwrap(), frac(-1, 2));
        assert_eq!(pairing_omega(&bv(&[0, 0], &[1, 0]), &bv(&[1, 0], &[0, 0])).unwrap(), frac(1, 2));
        assert!(pairing_g(&bv(&[1], &[0]), &bv(&[1, 0], &[0, 0])).is_err());
    }

    #[test]
    fn complement_of_tangent_part() {
        let e = IsotropicSubspace::new(2, &[bv(&[1, 0], &[0, 0]), bv(&[0, 1], &[0, 0])]).unwrap();
        assert_eq!(orthogonal_complement(&e), *e.subspace());
        let e1 = IsotropicSubspace::new(2, &[bv(&[1, 0], &[0, 0])]).unwrap();
        let c = orthogonal_complement(&e1);
        assert_eq!(c.dim(), 3);
        assert!(!c.contains(&v(&[0, 0, 1, 0])));
        assert!(c.contains(&v(&[5, 7, 0, 3])));
    }

    #[test]
    fn rejects_non_isotropic_and_dependent() {
        assert_eq!(
            IsotropicSubspace::new(1, &[bv(&[1], &[1])]).unwrap_err(),
            Error::NotIsotropic(0, 0)
        );
        assert_eq!(
            IsotropicSubspace::new(2, &[bv(&[1, 0], &[0, 0]), bv(&[2, 0], &[0, 0])]).unwrap_err(),
            Error::LinearlyDependent
        );
    }

    #[test]
    fn pairing_of_cotangent_and_graph() {
        let e = IsotropicSubspace::new(2, &[bv(&[0, 0], &[1, 0]), bv(&[0, 0], &[0, 1])]).unwrap();
        let d = extract_pairing(&e);
        assert_eq!(d.u_e.dim(), 0);
        assert_eq!(d.u_e_prime.dim(), 0);
        assert!(d.varpi.is_empty());
        // graph of v -> sigma(v, .) with sigma = 3 e1* ^ e2*
        let sigma = [v(&[0, 3]), v(&[-3, 0])];
        let basis: Vec<BigVector> = (0..2)
            .map(|i| BigVector::new(linalg::unit(2, i), sigma[i].clone()).unwrap())
            .collect();
        let e = IsotropicSubspace::new(2, &basis).unwrap();
        let d = extract_pairing(&e);
        assert_eq!(d.u_e.dim(), 2);
        assert_eq!(d.varpi, sigma.to_vec());
    }

    #[test]
    fn reconstruct_vacuous_and_full() {
        let d = PairingData {
            u_e: Subspace::zero(3),
            u_e_prime: Subspace::zero(3),
            varpi: vec![],
        };
        let (e, ep) = reconstruct(&d).unwrap();
        assert_eq!(e.rank(), 3);
        assert_eq!(*e.subspace(), ep);
        let d = PairingData {
            u_e: Subspace::full(2),
            u_e_prime: Subspace::full(2),
            varpi: vec![v(&[0, 1]), v(&[-1, 0])],
        };
        let (e, _) = reconstruct(&d).unwrap();
        assert!(e.contains(&bv(&[1, 0], &[0, 1])));
        assert!(e.contains(&bv(&[0, 1], &[-1, 0])));
    }

    #[test]
    fn reconstruct_rejects_bad_data() {
        let not_skew = PairingData {
            u_e: Subspace::full(2),
            u_e_prime: Subspace::full(2),
            varpi: vec![v(&[1, 0]), v(&[0, 0])],
        };
        assert!(matches!(reconstruct(&not_skew), Err(Error::InvalidPairing(_))));
        let not_nested = PairingData {
            u_e: Subspace::span(2, [v(&[1, 0])]).unwrap(),
            u_e_prime: Subspace::span(2, [v(&[0, 1])]).unwrap(),
            varpi: vec![v(&[0])],
        };
        assert!(matches!(reconstruct(&not_nested), Err(Error::InvalidPairing(_))));
    }

    #[test]
    fn graph_of_canonical_bivector() {
        let p = vec![v(&[0, 1]), v(&[-1, 0])];
        let sigma = Subspace::span(2, [v(&[1, 0])]).unwrap();
        let (e, ep) = graph_structure(&p, &sigma).unwrap();
        // #dx = d/dp under (#a)(b) = P(a, b)
        assert!(e.contains(&bv(&[0, 1], &[1, 0])));
        assert_eq!(ep, orthogonal_complement(&e));
        let (e0, ep0) = graph_structure(&[v(&[0, 0]), v(&[0, 0])], &Subspace::full(2)).unwrap();
        assert_eq!(*e0.subspace(), direct_sum(&Subspace::zero(2), &Subspace::full(2)));
        assert_eq!(ep0, orthogonal_complement(&e0));
    }

    #[test]
    fn lift_independence_of_varpi() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let m = rng.gen_range(2..=5);
            let k = rng.gen_range(0..=m);
            let e = random::isotropic(m, k, &mut rng);
            let d = extract_pairing(&e);
            // alternative lifts differ by elements of ann U_E' (the part 0 + V* of E)
            let ann = d.u_e_prime.annihilator();
            for (u, row) in d.u_e.basis().iter().zip(&d.varpi) {
                for c in ann.basis() {
                    let lift_shift: Vector = c.clone();
                    let alt: Vector = d.u_e_prime.basis().iter().map(|w| linalg::dot(&lift_shift, w)).collect();
                    assert!(linalg::is_zero_vec(&alt));
                }
                for (w, val) in d.u_e_prime.basis().iter().zip(row) {
                    assert_eq!(&d.eval(u, w).unwrap(), val);
                }
            }
        }
    }

    #[test]
    fn gram_matrix_has_split_signature() {
        // g(e_i + e_i*, same) = 1, g(e_i - e_i*, same) = -1, and these are orthogonal
        for m in 1..5 {
            for i in 0..m {
                let mut plus = linalg::zeros(2 * m);
                plus[i] = int(1);
                plus[m + i] = int(1);
                let mut minus = plus.clone();
                minus[m + i] = int(-1);
                assert_eq!(g_stacked(&plus, &plus), int(1));
                assert_eq!(g_stacked(&minus, &minus), int(-1));
                assert!(g_stacked(&plus, &minus).is_zero());
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn g_symmetric_and_omega_antisymmetric(xs in proptest::collection::vec(-5i64..5, 16)) {
            let u = bv(&xs[0..4], &xs[4..8]);
            let w = bv(&xs[8..12], &xs[12..16]);
            prop_assert_eq!(pairing_g(&u, &w).unwrap(), pairing_g(&w, &u).unwrap());
            prop_assert_eq!(pairing_omega(&u, &w).unwrap(), -pairing_omega(&w, &u).unwrap());
            prop_assert!(pairing_omega(&u, &u).unwrap().is_zero());
            let oracle = frac(1, 2) * int(
                (0..4).map(|i| xs[4 + i] * xs[8 + i] + xs[12 + i] * xs[i]).sum::<i64>(),
            );
            prop_assert_eq!(pairing_g(&u, &w).unwrap(), oracle);
        }

        #[test]
        fn isotropic_roundtrip(seed in any::<u64>(), m in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = rng.gen_range(0..=m);
            let e = random::isotropic(m, k, &mut rng);
            let ep = orthogonal_complement(&e);
            prop_assert!(ep.contains_subspace(e.subspace()));
            prop_assert_eq!(ep.dim(), 2 * m - e.rank());
            let d = extract_pairing(&e);
            prop_assert_eq!(e.rank(), d.u_e.dim() + d.u_e_prime.annihilator().dim());
            prop_assert_eq!(ep.dim(), d.u_e_prime.dim() + d.u_e.annihilator().dim());
            let (e2, ep2) = reconstruct(&d).unwrap();
            prop_assert_eq!(&e2, &e);
            prop_assert_eq!(&ep2, &ep);
            prop_assert_eq!(extract_pairing(&e2), d);
        }

        #[test]
        fn graph_complement_matches(seed in any::<u64>(), m in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = {
                let mut p = vec![linalg::zeros(m); m];
                for i in 0..m { for j in i + 1..m {
                    let x = int(rng.gen_range(-3..=3));
                    p[j][i] = -x.clone();
                    p[i][j] = x;
                }}
                p
            };
            let k = rng.gen_range(0..=m);
            let sigma = Subspace::span(m, (0..k).map(|_| (0..m).map(|_| int(rng.gen_range(-2..=2))).collect())).unwrap();
            let (e, ep) = graph_structure(&p, &sigma).unwrap();
            prop_assert_eq!(ep, orthogonal_complement(&e));
        }
    }
}
