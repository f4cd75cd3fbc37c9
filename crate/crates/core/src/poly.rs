//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub type Exponents = Vec<u32>;

/// A polynomial in `nvars` variables. Terms with zero coefficient are never
/// stored, so structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, rational::int(c))
    }

    /// The coordinate function `x_i` (0-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, Rational::one())
    }

    pub fn monomial(nvars: usize, exps: Exponents, c: Rational) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Self { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, Rational)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// The value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Partial derivative with respect to `x_i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, c * rational::int(e[i] as i64));
            }
        }
        out
    }

    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.nvars).map(|i| self.partial(i)).collect()
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.nvars, "evaluation point dimension");
        let mut pows: Vec<Vec<Rational>> = vec![vec![Rational::one()]; self.nvars];
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let k = k as usize;
                while pows[i].len() <= k {
                    let next = pows[i].last().unwrap() * &x[i];
                    pows[i].push(next);
                }
                t *= &pows[i][k];
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = rational::to_f64(c);
                for (xi, &k) in x.iter().zip(e) {
                    if k > 0 {
                        t *= xi.powi(k as i32);
                    }
                }
                t
            })
            .sum()
    }

    /// Substitutes `subs[i]` for `x_i`; the result lives in the variables of the substitutes.
    pub fn compose(&self, subs: &[Poly]) -> Self {
        assert_eq!(subs.len(), self.nvars, "one substitute per variable");
        let target = subs.first().map_or(0, |p| p.nvars);
        let mut pows: Vec<Vec<Poly>> = subs.iter().map(|s| vec![Poly::one(s.nvars)]).collect();
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                let k = k as usize;
                while pows[i].len() <= k {
                    let next = pows[i].last().unwrap() * &subs[i];
                    pows[i].push(next);
                }
                if k > 0 {
                    t = &t * &pows[i][k];
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Re-embeds into `nvars` variables with variable `i` mapped to `offset + i`.
    pub fn embed(&self, nvars: usize, offset: usize) -> Self {
        assert!(offset + self.nvars <= nvars);
        let mut out = Poly::zero(nvars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; nvars];
            e2[offset..offset + self.nvars].copy_from_slice(e);
            out.add_term(e2, c.clone());
        }
        out
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let idx: Vec<(usize, i32)> = e
                        .iter()
                        .enumerate()
                        .filter(|(_, &k)| k > 0)
                        .map(|(i, &k)| (i, k as i32))
                        .collect();
                    (idx, rational::to_f64(c))
                })
                .collect(),
        }
    }

    /// Parses an expression such as `"x1^2/2 - 3*x1*x2 + 1/4"`. Variables are
    /// `x1..xn` unless `names` is given.
    pub fn parse(src: &str, nvars: usize, names: Option<&[String]>) -> Result<Self> {
        let default: Vec<String> = (1..=nvars).map(|i| format!("x{i}")).collect();
        let names = names.unwrap_or(&default);
        if names.len() != nvars {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                found: names.len(),
            });
        }
        let mut p = Parser {
            src: src.as_bytes(),
            pos: 0,
            nvars,
            names,
        };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(out)
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        // highest degree first
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then(b.0.cmp(a.0))
        });
        for (k, (e, c)) in terms.into_iter().enumerate() {
            let neg = c < &Rational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| {
                    if p == 1 {
                        names[i].clone()
                    } else {
                        format!("{}^{}", names[i], p)
                    }
                })
                .collect();
            if vars.is_empty() {
                s.push_str(&rational::format(&mag));
            } else {
                if !mag.is_one() {
                    s.push_str(&rational::format(&mag));
                    s.push('*');
                }
                s.push_str(&vars.join("*"));
            }
        }
        s
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        f.write_str(&self.display_with(&names))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "polynomial ring mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "polynomial ring mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "polynomial ring mismatch");
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl std::iter::Sum for Poly {
    fn sum<I: Iterator<Item = Poly>>(iter: I) -> Poly {
        let mut it = iter.peekable();
        let n = it.peek().map_or(0, |p| p.nvars);
        it.fold(Poly::zero(n), |a, b| a + b)
    }
}

/// Sum of polynomials with an explicit ring size (works for empty input).
pub fn sum(nvars: usize, items: impl IntoIterator<Item = Poly>) -> Poly {
    items.into_iter().fold(Poly::zero(nvars), |a, b| a + b)
}

/// A polynomial with f64 coefficients for fast evaluation during integration.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(Vec<(usize, i32)>, f64)>,
}

impl CompiledPoly {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(idx, c)| idx.iter().fold(*c, |t, &(i, k)| t * x[i].powi(k)))
            .sum()
    }
}

/// Determinant of a square polynomial matrix by expansion over column subsets
/// (no division, so it stays exact in the polynomial ring).
pub fn det(m: &[Vec<Poly>], nvars: usize) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one(nvars);
    }
    assert!(n <= 20, "determinant too large for subset expansion");
    let mut table: Vec<Option<Poly>> = vec![None; 1 << n];
    table[0] = Some(Poly::one(nvars));
    for mask in 1usize..(1 << n) {
        let k = mask.count_ones() as usize;
        let row = &m[k - 1];
        let mut acc = Poly::zero(nvars);
        for j in 0..n {
            if mask & (1 << j) == 0 || row[j].is_zero() {
                continue;
            }
            let sub = table[mask & !(1 << j)].as_ref().unwrap();
            if sub.is_zero() {
                continue;
            }
            let greater = (mask >> (j + 1)).count_ones();
            let t = &row[j] * sub;
            acc = if greater % 2 == 0 { acc + t } else { acc - t };
        }
        table[mask] = Some(acc);
    }
    table.pop().flatten().unwrap()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!(
            "{msg} at column {} in {:?}",
            self.pos + 1,
            String::from_utf8_lossy(self.src)
        ))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc * self.power()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    let d = d
                        .as_constant()
                        .filter(|c| !c.is_zero())
                        .ok_or_else(|| self.error("division only by nonzero constants"))?;
                    acc = acc.scale(&d.recip());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let k: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| self.error("expected a nonnegative integer exponent"))?;
            let mut out = Poly::one(self.nvars);
            for _ in 0..k {
                out = out * &base;
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.power()?)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
                {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let r = rational::parse(s).map_err(|_| self.error("bad number"))?;
                Ok(Poly::constant(self.nvars, r))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let i = self
                    .names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| {
                        self.pos = start;
                        self.error(&format!("unknown variable {name:?}"))
                    })?;
                Ok(Poly::var(self.nvars, i))
            }
            _ => Err(self.error("expected a number, variable or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn parse_and_display_roundtrip() {
        let p = Poly::parse("x1^2/2 - 3*x1*x2 + 1/4", 2, None).unwrap();
        let q = Poly::parse(&p.to_string(), 2, None).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.eval(&[int(1), int(1)]), frac(-9, 4));
    }

    #[test]
    fn parse_reports_column() {
        let err = Poly::parse("x1 + y", 1, None).unwrap_err();
        assert!(err.to_string().contains("column 6"), "{err}");
    }

    #[test]
    fn partials_and_products() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = &(&x * &x) * &y;
        assert_eq!(p.partial(0), (&x * &y).scale(&int(2)));
        assert_eq!(p.partial(1), &x * &x);
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn compose_substitutes() {
        let p = Poly::parse("x1*x2 + x1", 2, None).unwrap();
        let t = Poly::var(1, 0);
        let r = p.compose(&[t.clone(), Poly::int(1, 2)]);
        assert_eq!(r, t.scale(&int(3)));
    }

    #[test]
    fn det_matches_hand_expansion() {
        let x = Poly::var(1, 0);
        let one = Poly::one(1);
        let z = Poly::zero(1);
        // [[x, 1, 0], [1, x, 1], [0, 1, x]] -> x^3 - 2x
        let m = vec![
            vec![x.clone(), one.clone(), z.clone()],
            vec![one.clone(), x.clone(), one.clone()],
            vec![z, one, x.clone()],
        ];
        let d = det(&m, 1);
        assert_eq!(d, Poly::parse("x1^3 - 2*x1", 1, None).unwrap());
    }

    #[test]
    fn compiled_matches_exact() {
        let p = Poly::parse("x1^3 - 2*x1*x2 + 7/3", 2, None).unwrap();
        let c = p.compile();
        let v = c.eval(&[0.5, -1.5]);
        assert!((v - rational::to_f64(&p.eval(&[frac(1, 2), frac(-3, 2)]))).abs() < 1e-14);
    }
}
