//! Exact linear algebra over the rationals: row reduction, kernels and
//! subspaces kept in reduced row-echelon form.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};
use crate::rational::{self, Rational};

pub type Vector = Vec<Rational>;

pub fn zeros(n: usize) -> Vector {
    vec![Rational::zero(); n]
}

pub fn unit(n: usize, i: usize) -> Vector {
    let mut v = zeros(n);
    v[i] = Rational::one();
    v
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn axpy(alpha: &Rational, x: &[Rational], y: &mut [Rational]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Row-reduces `rows` in place to reduced row-echelon form and returns the
/// pivot columns. Zero rows are dropped.
pub fn rref(rows: &mut Vec<Vector>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = -row[c].clone();
                axpy(&f, &pivot_row, row);
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank(rows: &[Vector], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{x : A x = 0}` for `A` given by rows.
pub fn kernel(rows: &[Vector], ncols: usize) -> Vec<Vector> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = zeros(ncols);
            x[f] = Rational::one();
            for (row, &pc) in m.iter().zip(&pivots) {
                x[pc] = -row[f].clone();
            }
            x
        })
        .collect()
}

/// One solution of `A x = b`, if any.
pub fn solve(rows: &[Vector], b: &[Rational], ncols: usize) -> Option<Vector> {
    let mut aug: Vec<Vector> = rows
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut r = r.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = zeros(ncols);
    for (row, &pc) in aug.iter().zip(&pivots) {
        x[pc] = row[ncols].clone();
    }
    Some(x)
}

/// `rows` as a matrix times `v`.
pub fn mat_vec(rows: &[Vector], v: &[Rational]) -> Vector {
    rows.iter().map(|r| dot(r, v)).collect()
}

pub fn transpose(rows: &[Vector], ncols: usize) -> Vec<Vector> {
    (0..ncols)
        .map(|c| rows.iter().map(|r| r[c].clone()).collect())
        .collect()
}

/// A linear subspace of Q^n, stored as a basis in reduced row-echelon form,
/// so two subspaces are equal iff their stored bases are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    ambient: usize,
    #[serde(with = "serde_rows")]
    basis: Vec<Vector>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            ambient,
            basis: (0..ambient).map(|i| unit(ambient, i)).collect(),
        }
    }

    pub fn span(ambient: usize, vectors: impl IntoIterator<Item = Vector>) -> Result<Self> {
        let mut rows = Vec::new();
        for v in vectors {
            check_dim(ambient, v.len())?;
            rows.push(v);
        }
        rref(&mut rows, ambient);
        Ok(Self {
            ambient,
            basis: rows,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        rref(&mut rows, self.ambient).len() == self.dim()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        rref(&mut rows, self.ambient);
        Subspace {
            ambient: self.ambient,
            basis: rows,
        }
    }

    /// Vectors `a` of the dual space with `a . v = 0` for all `v` in `self`.
    pub fn annihilator(&self) -> Subspace {
        let k = kernel(&self.basis, self.ambient);
        Subspace::span(self.ambient, k).expect("kernel vectors have ambient length")
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        // (A ∩ B) = ann(ann A + ann B)
        self.annihilator().sum(&other.annihilator()).annihilator()
    }

    /// Coordinates of `v` in the stored basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vector> {
        let cols = transpose(&self.basis, self.ambient);
        solve(&cols, v, self.dim())
    }

    /// Extends the stored basis to a basis of the whole space by unit vectors.
    pub fn complement_units(&self) -> Vec<Vector> {
        let mut cur = self.clone();
        let mut out = Vec::new();
        for i in 0..self.ambient {
            let e = unit(self.ambient, i);
            if !cur.contains(&e) {
                cur = cur.sum(&Subspace::span(self.ambient, [e.clone()]).unwrap());
                out.push(e);
            }
        }
        out
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.basis
            .iter()
            .map(|v| v.iter().map(rational::format).collect())
            .collect()
    }
}

pub(crate) mod serde_rows {
    use super::Vector;
    use crate::rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(rows: &[Vector], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<Vec<String>> = rows
            .iter()
            .map(|r| r.iter().map(rational::format).collect())
            .collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vector>, D::Error> {
        let strs: Vec<Vec<String>> = Vec::deserialize(d)?;
        strs.iter()
            .map(|r| {
                r.iter()
                    .map(|s| rational::parse(s).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

pub(crate) mod serde_vec {
    use super::Vector;
    use crate::rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[crate::rational::Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(rational::format).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vector, D::Error> {
        let strs: Vec<String> = Vec::deserialize(d)?;
        strs.iter()
            .map(|s| rational::parse(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Dense f64 helpers used by the integrators.
pub mod float {
    use nalgebra::{DMatrix, DVector};

    /// Solves the square system, or `None` if it is numerically singular.
    pub fn solve(a: DMatrix<f64>, b: DVector<f64>) -> Option<DVector<f64>> {
        if a.nrows() == 0 {
            return Some(DVector::zeros(0));
        }
        let scale = a.amax().max(1.0);
        let lu = a.lu();
        let u = lu.u();
        let min_pivot = (0..u.nrows()).map(|i| u[(i, i)].abs()).fold(f64::INFINITY, f64::min);
        if !(min_pivot > 1e-12 * scale) {
            return None;
        }
        lu.solve(&b)
    }

    /// Indices of a maximal linearly independent subset of `rows`, chosen
    /// greedily by modified Gram-Schmidt.
    pub fn independent_rows(rows: &[Vec<f64>], tol: f64) -> Vec<usize> {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut chosen = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            let norm0 = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm0 <= tol {
                continue;
            }
            let mut v = r.clone();
            for b in &basis {
                let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= d * bi;
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > tol * norm0.max(1.0) {
                v.iter_mut().for_each(|x| *x /= norm);
                basis.push(v);
                chosen.push(i);
            }
        }
        chosen
    }
}
