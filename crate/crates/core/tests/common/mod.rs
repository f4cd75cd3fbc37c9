#![allow(dead_code)]

use bigiso::mechanics::{canonical_bivector, ConstrainedSystem};
use bigiso::rational::int;
use bigiso::tensor::{Bivector, OneForm, VectorField};
use bigiso::{Poly, Rational};
use rand::Rng;

pub fn p(s: &str, m: usize) -> Poly {
    Poly::parse(s, m, None).unwrap()
}

pub fn form(s: &[&str]) -> OneForm {
    OneForm::parse(s).unwrap()
}

pub fn field(s: &[&str]) -> VectorField {
    VectorField::parse(s).unwrap()
}

pub fn coframe(m: usize) -> Vec<OneForm> {
    (0..m).map(|i| OneForm::coordinate(m, i)).collect()
}

pub fn bivector(m: usize, entries: &[(usize, usize, &str)]) -> Bivector {
    let mut b = Bivector::zero(m);
    for &(i, j, s) in entries {
        b.set(i, j, p(s, m)).unwrap();
    }
    b
}

/// Polynomial with up to `terms` monomials of total degree `<= deg` and
/// small integer coefficients.
pub fn random_poly<R: Rng>(m: usize, deg: u32, terms: usize, rng: &mut R) -> Poly {
    let mut out = Poly::zero(m);
    for _ in 0..rng.gen_range(0..=terms) {
        let mut exps = vec![0u32; m];
        for _ in 0..rng.gen_range(0..=deg) {
            exps[rng.gen_range(0..m)] += 1;
        }
        let c: i64 = rng.gen_range(-3..=3);
        out = out + Poly::monomial(m, exps, int(c));
    }
    out
}

pub fn random_form<R: Rng>(m: usize, deg: u32, rng: &mut R) -> OneForm {
    OneForm::new((0..m).map(|_| random_poly(m, deg, 3, rng)).collect()).unwrap()
}

pub fn random_bivector<R: Rng>(m: usize, deg: u32, rng: &mut R) -> Bivector {
    let mut b = Bivector::zero(m);
    for i in 0..m {
        for j in i + 1..m {
            b.set(i, j, random_poly(m, deg, 3, rng)).unwrap();
        }
    }
    b
}

pub fn small<R: Rng>(rng: &mut R) -> Rational {
    Rational::new(rng.gen_range(-4..=4).into(), rng.gen_range(1..=3).into())
}

/// A structure of the integrability corpus together with Hamiltonian test
/// functions and known infinitesimal symmetries.
pub struct Case {
    pub name: &'static str,
    pub m: usize,
    pub sigma: Vec<OneForm>,
    pub sprime: Vec<VectorField>,
    pub pi: Bivector,
    pub integrable: bool,
    pub functions: Vec<Poly>,
    pub symmetries: Vec<VectorField>,
}

impl Case {
    pub fn structure(&self) -> bigiso::structure::BigIsoStructure {
        bigiso::structure::BigIsoStructure::new(self.m, self.sigma.clone(), self.sprime.clone(), self.pi.clone()).unwrap()
    }
}

pub fn integrability_corpus() -> Vec<Case> {
    vec![
        Case {
            name: "canonical plane",
            m: 2,
            sigma: coframe(2),
            sprime: vec![],
            pi: canonical_bivector(1),
            integrable: true,
            functions: vec![p("x1^2*x2 - x2", 2), p("x1^3 + 2*x2^2", 2), p("x1*x2", 2)],
            symmetries: vec![field(&["1", "0"]), field(&["x1", "-x2"])],
        },
        Case {
            name: "cotangent R3",
            m: 3,
            sigma: coframe(3),
            sprime: vec![],
            pi: Bivector::zero(3),
            integrable: true,
            functions: vec![p("x1*x2", 3), p("x3^2 - x1", 3), p("x2^3", 3)],
            symmetries: vec![field(&["x2", "x3^2", "1"])],
        },
        Case {
            name: "rigid body",
            m: 3,
            sigma: coframe(3),
            sprime: vec![],
            pi: bivector(3, &[(0, 1, "x3"), (1, 2, "x1"), (2, 0, "x2")]),
            integrable: true,
            functions: vec![p("x1^2 + 2*x2^2 + 3*x3^2", 3), p("x1*x2 - x3", 3), p("x1^2 + x2^2 + x3^2", 3)],
            symmetries: vec![field(&["-x2", "x1", "0"])],
        },
        Case {
            name: "planes with vertical kernel",
            m: 3,
            sigma: coframe(3)[..2].to_vec(),
            sprime: vec![field(&["0", "0", "1"])],
            pi: canonical_bivector(1).embed(3, 0),
            integrable: true,
            functions: vec![p("x1^2*x2", 3), p("x1 + x2^3", 3), p("x1*x2 - x2", 3)],
            symmetries: vec![field(&["0", "0", "x3"]), field(&["1", "0", "x1"])],
        },
        Case {
            name: "flat leaves z = xy + c",
            m: 3,
            sigma: vec![form(&["-x2", "-x1", "1"])],
            sprime: vec![field(&["1", "0", "x2"]), field(&["0", "1", "x1"])],
            pi: Bivector::zero(3),
            integrable: true,
            functions: vec![p("x3 - x1*x2", 3), p("(x3 - x1*x2)^2", 3), p("0", 3)],
            symmetries: vec![field(&["1", "0", "x2"])],
        },
        Case {
            name: "Heisenberg distribution",
            m: 3,
            sigma: vec![form(&["0", "-x1", "1"])],
            sprime: vec![field(&["1", "0", "0"]), field(&["0", "1", "x1"])],
            pi: Bivector::zero(3),
            integrable: false,
            functions: vec![],
            symmetries: vec![],
        },
        Case {
            name: "non-Poisson bivector",
            m: 3,
            sigma: coframe(3),
            sprime: vec![],
            pi: bivector(3, &[(0, 1, "x3"), (0, 2, "x1")]),
            integrable: false,
            functions: vec![],
            symmetries: vec![],
        },
        Case {
            name: "codistribution not closed",
            m: 3,
            sigma: coframe(3)[..2].to_vec(),
            sprime: vec![],
            pi: bivector(3, &[(0, 1, "x3")]),
            integrable: false,
            functions: vec![],
            symmetries: vec![],
        },
        Case {
            name: "kernel does not preserve codistribution",
            m: 3,
            sigma: vec![form(&["-x2", "0", "1"])],
            sprime: vec![field(&["0", "1", "0"])],
            pi: Bivector::zero(3),
            integrable: false,
            functions: vec![],
            symmetries: vec![],
        },
        Case {
            name: "Engel-type distribution",
            m: 4,
            sigma: vec![form(&["0", "-x1", "1", "0"]), form(&["0", "-x1^2", "0", "1"])],
            sprime: vec![field(&["1", "0", "0", "0"]), field(&["0", "1", "x1", "x1^2"])],
            pi: Bivector::zero(4),
            integrable: false,
            functions: vec![],
            symmetries: vec![],
        },
    ]
}

/// Velocity distributions on `Q` with their expected holonomy.
pub fn holonomy_corpus() -> Vec<(&'static str, ConstrainedSystem, bool)> {
    let sys = |n: usize, l: Vec<VectorField>| {
        let h = bigiso::poly::sum(2 * n, (n..2 * n).map(|i| Poly::var(2 * n, i) * Poly::var(2 * n, i)));
        ConstrainedSystem::new(l, h).unwrap()
    };
    vec![
        ("coordinate plane in R3", sys(3, vec![field(&["1", "0", "0"]), field(&["0", "1", "0"])]), true),
        ("line in R2", sys(2, vec![field(&["1", "0"])]), true),
        ("graph planes z = xy + c", sys(3, vec![field(&["1", "0", "x2"]), field(&["0", "1", "x1"])]), true),
        ("Heisenberg", sys(3, vec![field(&["1", "0", "0"]), field(&["0", "1", "x1"])]), false),
        ("twisted Heisenberg", sys(3, vec![field(&["0", "1", "0"]), field(&["1", "0", "x2"])]), false),
        ("Engel-type in R4", sys(4, vec![field(&["1", "0", "0", "0"]), field(&["0", "1", "x1", "x1^2"])]), false),
    ]
}
