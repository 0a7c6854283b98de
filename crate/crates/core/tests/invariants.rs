use proptest::prelude::*;

use qmodular::exact::{rational_roots, Rational, SymCoeff};
use qmodular::laplacian::*;
use qmodular::nhform::NHForm;
use qmodular::rankincohen::{self, RCParams};
use qmodular::vvops::{self, TripleParams};
use qmodular::{q, random};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(p, d)| Rational::new(p, d))
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn delta_power_closed_form(seed in any::<u64>(), m in small_rational(), s in 0usize..6) {
        let mut rng = random::rng(seed);
        let phi = NHForm::holomorphic(m.clone(), random::sym_coeff(&mut rng, true));
        prop_assert_eq!(phi.delta_power_closed(&m, s), phi.delta_power(&m, s));
    }

    #[test]
    fn bol_identity(n in 0usize..5) {
        let m = Rational::from(-(n as i64));
        let phi = NHForm::holomorphic(m.clone(), SymCoeff::generator(0, m.clone()));
        let mut der = phi.clone();
        for _ in 0..=n {
            der = der.derive();
        }
        let dp = phi.delta_power(&m, n + 1);
        prop_assert_eq!(dp.with_weight(der.weight().clone()), der);
    }

    #[test]
    fn tuple_roundtrip(seed in any::<u64>(), k in small_rational(), depth in 0usize..5) {
        let mut rng = random::rng(seed);
        let f = random::qmform(&mut rng, &k, depth, true);
        prop_assert_eq!(f.to_tuple().to_qm(), f.clone());
        let t = random::tuple(&mut rng, &k, depth + 1, true);
        prop_assert_eq!(t.to_qm().to_tuple(), t);
    }

    #[test]
    fn derivative_is_tilde_delta_zero(seed in any::<u64>(), k in small_rational(), depth in 0usize..4) {
        let mut rng = random::rng(seed);
        let f = random::qmform(&mut rng, &k, depth, true);
        prop_assert_eq!(f.derive().to_tuple(), vvops::vv_tilde_delta(&f.to_tuple(), &q!(0)));
    }

    #[test]
    fn laplacian_closed_equals_composed(seed in any::<u64>(), len in 1usize..5) {
        let mut rng = random::rng(seed);
        let p = random::triple(&mut rng);
        let k = random::rational(&mut rng);
        let t = random::tuple(&mut rng, &k, len, true);
        prop_assert_eq!(lap_closed(&t, &p), lap_composed(&t, &p));
    }

    #[test]
    fn weight_brackets(seed in any::<u64>(), len in 1usize..4) {
        let mut rng = random::rng(seed);
        let p = random::triple(&mut rng);
        let k = random::rational(&mut rng);
        let t = random::tuple(&mut rng, &k, len, true);
        let we = vvops::vv_weight(&vvops::sl2_e(&t, &p)).sub(&vvops::sl2_e(&vvops::vv_weight(&t), &p));
        prop_assert_eq!(we, vvops::sl2_e(&t, &p).scale_q(&q!(2)));
        let wf = vvops::vv_weight(&vvops::sl2_f(&t, &p)).sub(&vvops::sl2_f(&vvops::vv_weight(&t), &p));
        prop_assert_eq!(wf, vvops::sl2_f(&t, &p).scale_q(&q!(-2)));
    }

    #[test]
    fn rc_bracket_respects_depth(
        seed in any::<u64>(),
        n in 0usize..4,
        d in 0usize..3,
        e in 0usize..3,
        k in small_rational(),
        l in small_rational(),
    ) {
        let p = RCParams::new(n, k.clone(), d, l.clone(), e);
        let co = rankincohen::rc_solve(&p).unwrap();
        prop_assert_eq!(co.kernel_dim, if rankincohen::rc_is_excluded(&p) { 2 } else { 1 });
        let mut rng = random::rng(seed);
        let f = random::qmform(&mut rng, &k, d, false);
        let g = random::qmform(&mut rng, &l, e, false);
        for which in 0..co.basis.len() {
            prop_assert!(rankincohen::rc_holomorphy_certificate(&p, &co, which).passed);
            let br = rankincohen::rc_apply(&p, &f, &g, &co, which).unwrap();
            prop_assert!(br.depth() <= d + e);
        }
    }

    #[test]
    fn lifts_are_eigenforms(seed in any::<u64>(), d in 0usize..4) {
        let mut rng = random::rng(seed);
        let p = random::triple(&mut rng);
        let k = random::non_integer(&mut rng);
        let prob = LiftProblem::new(p.clone(), k.clone(), d);
        let w = prob.phi_weight();
        let phi = NHForm::holomorphic(w.clone(), SymCoeff::generator(0, w));
        let top = &enumerate_eigenvalues(&p, &k, d).unwrap()[d];
        for lam in rational_roots(&top.poly).unwrap().values() {
            if let Ok(t) = build_lift(&prob, &lam, &phi) {
                prop_assert!(verify_eigen(&t, &p, &lam));
                prop_assert!(ladder_holds(&t, d));
            }
        }
        for lam in top.liftable() {
            prop_assert!(build_lift(&prob, &lam, &phi).is_ok());
        }
    }
}

#[test]
fn classical_triples_close_up() {
    for p in [TripleParams::shimura_maass(), TripleParams::holomorphic()] {
        assert!(vvops::check_sl2(&p, 3, 8, 9).iter().all(|r| r.passed()));
    }
}
