//! Pointwise spans of polynomial column fields.
//!
//! A family of polynomial columns `a_1(x), ..., a_k(x)` of generic rank `r`
//! spans a subspace at every point. With `K` a set of `r` generically
//! independent columns, the bordered minors
//!
//! ```text
//! ann_T = sum_{t in T} (-1)^pos(t) det A[T \ t, K] e^t,   |T| = r + 1
//! ```
//!
//! annihilate every column and span the annihilator wherever the rank is `r`.
//! Membership of a polynomial field `v` is then the exact polynomial identity
//! `ann_T . v == 0` for every `T`, valid everywhere the rank is constant.

use std::collections::HashMap;

use num_traits::Zero;

use crate::linalg;
use crate::poly::{self, Poly};
use crate::rational::{self, Rational};
use crate::sampling::Sampler;

#[derive(Debug, Clone, PartialEq)]
pub enum Membership {
    Member,
    /// `residual` is a nonzero bordered minor; `point` is a sample where the
    /// field leaves the span (exact pointwise check), if one was found.
    NotMember {
        residual: Poly,
        point: Option<Vec<Rational>>,
    },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member)
    }
}

#[derive(Debug, Clone)]
pub struct PolySpan {
    nvars: usize,
    rows: usize,
    generators: Vec<Vec<Poly>>,
    rank: usize,
    independent: Vec<usize>,
    annihilators: Vec<Vec<Poly>>,
    sampler: Sampler,
}

impl PolySpan {
    /// `generators` are columns of length `rows` over `nvars` variables.
    pub fn new(nvars: usize, rows: usize, generators: Vec<Vec<Poly>>, sampler: Sampler) -> Self {
        for g in &generators {
            assert_eq!(g.len(), rows, "generator length");
        }
        let (rank, independent) = generic_rank(nvars, rows, &generators, &sampler);
        let annihilators = bordered_annihilators(nvars, rows, &generators, &independent);
        Self {
            nvars,
            rows,
            generators,
            rank,
            independent,
            annihilators,
            sampler,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[Vec<Poly>] {
        &self.generators
    }

    pub fn generic_rank(&self) -> usize {
        self.rank
    }

    /// Indices of generically independent generators.
    pub fn independent(&self) -> &[usize] {
        &self.independent
    }

    /// Polynomial sections spanning the annihilator wherever the rank is generic.
    pub fn annihilators(&self) -> &[Vec<Poly>] {
        &self.annihilators
    }

    /// True when some maximal minor of the independent generators is a nonzero
    /// constant, which proves the rank is the generic rank everywhere.
    pub fn rank_certified(&self) -> bool {
        let r = self.rank;
        subsets(self.rows, r).into_iter().any(|rows| {
            let m: Vec<Vec<Poly>> = rows
                .iter()
                .map(|&i| self.independent.iter().map(|&j| self.generators[j][i].clone()).collect())
                .collect();
            poly::det(&m, self.nvars).as_constant().is_some_and(|c| !c.is_zero())
        })
    }

    pub fn eval_at(&self, x: &[Rational]) -> Vec<linalg::Vector> {
        self.generators
            .iter()
            .map(|g| g.iter().map(|p| p.eval(x)).collect())
            .collect()
    }

    pub fn subspace_at(&self, x: &[Rational]) -> linalg::Subspace {
        linalg::Subspace::span(self.rows, self.eval_at(x)).expect("generator length")
    }

    pub fn rank_at(&self, x: &[Rational]) -> usize {
        linalg::rank(&self.eval_at(x), self.rows)
    }

    pub fn contains_at(&self, x: &[Rational], v: &[Poly]) -> bool {
        let vx: Vec<Rational> = v.iter().map(|p| p.eval(x)).collect();
        self.subspace_at(x).contains(&vx)
    }

    /// Exact membership of the polynomial field `v` in the span.
    pub fn contains(&self, v: &[Poly]) -> Membership {
        assert_eq!(v.len(), self.rows, "field length");
        for a in &self.annihilators {
            let r = contract(self.nvars, a, v);
            if !r.is_zero() {
                let point = self.find_witness(&r, v);
                return Membership::NotMember { residual: r, point };
            }
        }
        Membership::Member
    }

    fn find_witness(&self, residual: &Poly, v: &[Poly]) -> Option<Vec<Rational>> {
        self.sampler
            .witness_points(self.nvars)
            .find(|x| !residual.eval(x).is_zero() && self.rank_at(x) == self.rank && !self.contains_at(x, v))
    }
}

/// `sum_i a_i b_i` as a polynomial.
pub fn contract(nvars: usize, a: &[Poly], b: &[Poly]) -> Poly {
    poly::sum(
        nvars,
        a.iter()
            .zip(b)
            .filter(|(x, y)| !x.is_zero() && !y.is_zero())
            .map(|(x, y)| x * y),
    )
}

fn generic_rank(nvars: usize, rows: usize, gens: &[Vec<Poly>], sampler: &Sampler) -> (usize, Vec<usize>) {
    let mut best: (usize, Vec<usize>) = (0, Vec::new());
    for x in sampler.generic_points(nvars) {
        // pivots of the transposed evaluation pick independent generators
        let cols: Vec<linalg::Vector> = gens
            .iter()
            .map(|g| g.iter().map(|p| p.eval(&x)).collect())
            .collect();
        let mut m = linalg::transpose(&cols, rows);
        let pivots = linalg::rref(&mut m, gens.len());
        if pivots.len() > best.0 {
            best = (pivots.len(), pivots);
        }
    }
    best
}

fn bordered_annihilators(nvars: usize, rows: usize, gens: &[Vec<Poly>], k: &[usize]) -> Vec<Vec<Poly>> {
    let r = k.len();
    if r == rows {
        return Vec::new();
    }
    let mut minors: HashMap<Vec<usize>, Poly> = HashMap::new();
    let mut out = Vec::new();
    for t in subsets(rows, r + 1) {
        let mut a = vec![Poly::zero(nvars); rows];
        for (pos, &row) in t.iter().enumerate() {
            let rest: Vec<usize> = t.iter().copied().filter(|&x| x != row).collect();
            let d = minors
                .entry(rest.clone())
                .or_insert_with(|| {
                    let m: Vec<Vec<Poly>> = rest
                        .iter()
                        .map(|&i| k.iter().map(|&j| gens[j][i].clone()).collect())
                        .collect();
                    poly::det(&m, nvars)
                })
                .clone();
            a[row] = if pos % 2 == 0 { d } else { -d };
        }
        if a.iter().any(|p| !p.is_zero()) {
            out.push(a);
        }
    }
    out
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Samples the rank of a polynomial column family and reports the first
/// pair of points with different ranks.
pub fn rank_jump(
    nvars: usize,
    rows: usize,
    gens: &[Vec<Poly>],
    points: &[Vec<Rational>],
) -> Option<((usize, Vec<Rational>), (usize, Vec<Rational>))> {
    let mut first: Option<(usize, Vec<Rational>)> = None;
    let _ = nvars;
    for x in points {
        let cols: Vec<linalg::Vector> = gens
            .iter()
            .map(|g| g.iter().map(|p| p.eval(x)).collect())
            .collect();
        let r = linalg::rank(&cols, rows);
        match &first {
            None => first = Some((r, x.clone())),
            Some((r0, _)) if *r0 != r => return Some((first.unwrap(), (r, x.clone()))),
            _ => {}
        }
    }
    None
}

pub fn format_point(x: &[Rational]) -> Vec<String> {
    rational::format_point(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> Poly {
        Poly::parse(s, n, None).unwrap()
    }

    #[test]
    fn heisenberg_bracket_not_in_span() {
        // columns d/dx and d/dy + x d/dz on R^3
        let gens = vec![
            vec![p("1", 3), p("0", 3), p("0", 3)],
            vec![p("0", 3), p("1", 3), p("x1", 3)],
        ];
        let span = PolySpan::new(3, 3, gens, Sampler::default());
        assert_eq!(span.generic_rank(), 2);
        assert_eq!(span.annihilators().len(), 1);
        let dz = vec![p("0", 3), p("0", 3), p("1", 3)];
        match span.contains(&dz) {
            Membership::NotMember { point, .. } => assert!(point.is_some()),
            Membership::Member => panic!("d/dz is not in the span"),
        }
        let inside = vec![p("x2", 3), p("1", 3), p("x1", 3)];
        assert!(span.contains(&inside).is_member());
    }

    #[test]
    fn rational_function_multiples_are_members() {
        // span{(x, 1)} contains (x^2 + 1, x + 1/x * ...) only pointwise: take (x^2, x)
        let gens = vec![vec![p("x1", 1), p("1", 1)]];
        let span = PolySpan::new(1, 2, gens, Sampler::default());
        assert!(span.contains(&[p("x1^2", 1), p("x1", 1)]).is_member());
        assert!(!span.contains(&[p("1", 1), p("x1", 1)]).is_member());
    }

    #[test]
    fn zero_span_and_full_span() {
        let zero = PolySpan::new(2, 2, vec![], Sampler::default());
        assert!(zero.contains(&[p("0", 2), p("0", 2)]).is_member());
        assert!(!zero.contains(&[p("x1", 2), p("0", 2)]).is_member());
        let full = PolySpan::new(2, 2, vec![vec![p("1", 2), p("0", 2)], vec![p("0", 2), p("1", 2)]], Sampler::default());
        assert!(full.annihilators().is_empty());
    }

    #[test]
    fn subsets_count() {
        assert_eq!(subsets(5, 2).len(), 10);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
        assert!(subsets(2, 3).is_empty());
    }
}
