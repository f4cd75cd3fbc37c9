mod common;

use bigiso::bigvec::{self, random};
use bigiso::linalg::{self, Vector};
use bigiso::port_ham;
use bigiso::reduction::{self, SubmanifoldChart};
use bigiso::span::Membership;
use bigiso::tensor::{self, BigVectorField, VectorField};
use bigiso::{Poly, Rational};
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_field<R: Rng>(m: usize, deg: u32, rng: &mut R) -> VectorField {
    VectorField::new((0..m).map(|_| random_poly(m, deg, 3, rng)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lie_bracket_jacobi(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [x, y, z] = [0, 1, 2].map(|_| random_field(3, 2, &mut rng));
        let b = tensor::lie_bracket;
        let res = b(&x, &b(&y, &z)).add(&b(&y, &b(&z, &x))).add(&b(&z, &b(&x, &y)));
        prop_assert!(res.is_zero(), "{}", res);
    }

    #[test]
    fn lie_derivative_commutes_with_d(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_field(3, 2, &mut rng);
        let f = random_poly(3, 3, 4, &mut rng);
        prop_assert_eq!(tensor::lie_derivative_form(&x, &tensor::exterior_d(&f)), tensor::exterior_d(&x.apply(&f)));
    }

    #[test]
    fn gelfand_dorfman_random(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(2..=4);
        let pi = random_bivector(m, 2, &mut rng);
        let [a1, a2, b] = [0, 1, 2].map(|_| random_form(m, 2, &mut rng));
        let lhs = pi.eval_forms(&tensor::one_form_bracket(&pi, &a1, &a2), &b);
        let rhs = b.contract(&tensor::lie_bracket(&pi.sharp(&a1), &pi.sharp(&a2)))
            + tensor::schouten_pp(&pi).eval_forms(&a1, &a2, &b).scale(&bigiso::rational::frac(1, 2));
        prop_assert!((lhs - rhs).is_zero());
    }

    #[test]
    fn one_form_bracket_is_antisymmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pi = random_bivector(3, 2, &mut rng);
        let [a, b] = [0, 1].map(|_| random_form(3, 2, &mut rng));
        prop_assert_eq!(tensor::one_form_bracket(&pi, &a, &b), tensor::one_form_bracket(&pi, &b, &a).neg());
    }

    #[test]
    fn dirac_dimension(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=5);
        let p = rng.gen_range(1..=3);
        let mut j = vec![linalg::zeros(n); n];
        for a in 0..n {
            for b in a + 1..n {
                let x = small(&mut rng);
                j[b][a] = -x.clone();
                j[a][b] = x;
            }
        }
        let g: Vec<Vector> = (0..n).map(|_| (0..p).map(|_| small(&mut rng)).collect()).collect();
        let d = port_ham::dirac_from_interconnection(&j, &g, &random::maximal_isotropic(p, &mut rng)).unwrap();
        prop_assert_eq!(d.rank(), n);
    }

    #[test]
    fn pullback_to_coordinate_subspace_is_isotropic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(2..=4);
        let k = rng.gen_range(0..=m);
        let e = random::isotropic(m, k, &mut rng);
        let d = rng.gen_range(1..=m);
        let chart = SubmanifoldChart::new(m, (0..m).map(|i| if i < d { Poly::var(d, i) } else { Poly::zero(d) }).collect()).unwrap();
        let u: Vec<Rational> = (0..d).map(|_| small(&mut rng)).collect();
        let s = bigiso::structure::BigIsoStructure::from_constant_subspace(&e).unwrap();
        let pulled = reduction::pullback_at(&s, &chart, &u);
        prop_assert!(bigvec::is_isotropic(&pulled));
    }
}

#[test]
fn corpus_fibers_are_isotropic_with_matching_complement() {
    for case in integrability_corpus() {
        let s = case.structure();
        for x in s.sampler().points(case.m).iter().step_by(7) {
            let e = s.e_at(x);
            assert!(bigvec::is_isotropic(&e), "{}", case.name);
            assert_eq!(s.e_prime_at(x), bigvec::orthogonal(&e), "{}", case.name);
        }
    }
}

#[test]
fn bracket_of_hamiltonian_fields_is_weak_hamiltonian() {
    for case in integrability_corpus().into_iter().filter(|c| c.integrable) {
        let s = case.structure();
        let f = &case.functions;
        for (a, b) in [(&f[0], &f[1]), (&f[1], &f[2])] {
            let xa = s.hamiltonian_field(a, None).unwrap().vector;
            let xb = s.hamiltonian_field(b, None).unwrap().vector;
            let pair = BigVectorField::new(tensor::lie_bracket(&xa, &xb), tensor::exterior_d(&s.poisson_bracket(a, b).unwrap())).unwrap();
            assert_eq!(s.contains_e_prime(&pair), Membership::Member, "{}", case.name);
        }
    }
}

#[test]
fn courant_bracket_is_compatible_with_pairing_on_integrable_corpus() {
    for case in integrability_corpus().into_iter().filter(|c| c.integrable) {
        let s = case.structure();
        let e = s.e_sections();
        let ep = s.e_prime_sections();
        for (_, u) in &e {
            for (_, v) in &e {
                for (_, w) in &ep {
                    assert!(tensor::axiom_v_residual(u, w, v).is_zero(), "{}", case.name);
                }
            }
        }
    }
}

#[test]
fn hamiltonian_fields_are_symmetries_of_integrable_structures() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in integrability_corpus().into_iter().filter(|c| c.integrable && c.m == 3 && c.sigma.len() == 3) {
        let s = case.structure();
        for _ in 0..5 {
            let f = random_poly(3, 3, 4, &mut rng);
            let xf = s.hamiltonian_field(&f, None).unwrap().vector;
            assert!(reduction::is_infinitesimal_symmetry(&xf, &s).pass, "{} {f}", case.name);
        }
    }
}
