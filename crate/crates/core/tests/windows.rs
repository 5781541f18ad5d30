use frames_core::base_rings::*;
use frames_core::frames::*;
use frames_core::matrix::{self, Matrix};
use frames_core::ring::Ring;
use frames_core::windows::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn desc() -> RingDesc {
    RingDesc::eisenstein(3, 6, 1, 3, &[(vec![1], 1)])
}

fn breuil() -> BreuilFrame {
    BreuilFrame::new(&desc(), 3).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_windows_satisfy_axioms(seed in any::<u64>(), rk_l in 0usize..3, rk_t in 0usize..3) {
        let f = breuil();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_window(&f, rk_l, rk_t, &mut rng);
        let rep = validate_window(&f, &w, &mut rng, 5);
        prop_assert!(rep.all_pass(), "{:?}", rep.failures());
        let inv = matrix::inverse(f.ring(), &w.psi).unwrap();
        prop_assert!(matrix::equal(f.ring(), &matrix::mul(f.ring(), &inv, &w.psi), &matrix::identity(f.ring(), w.rank())));
    }

    #[test]
    fn dual_is_an_involution_and_respects_the_pairing(seed in any::<u64>(), rk_l in 0usize..3, rk_t in 0usize..3) {
        let f = breuil();
        let s = f.ring();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_window(&f, rk_l, rk_t, &mut rng);
        let d = dual(&f, &w).unwrap();
        prop_assert_eq!((d.rk_l, d.rk_t), (rk_t, rk_l));
        prop_assert_eq!(dual(&f, &d).unwrap(), w.clone());
        // <F_1'(x'), F_1(x)> = sigma_1(<x', x>) for x in Q, x' in Q'
        let q = random_q(&f, &w, &mut rng);
        let qd = random_q(&f, &d, &mut rng);
        let fx = eval_f1(&f, &w, &q);
        let fxd = eval_f1(&f, &d, &qd);
        // dual coordinates are ordered (T^v, L^v)
        let fxd_lt: Vec<Series> = fxd[rk_t..].iter().chain(&fxd[..rk_t]).cloned().collect();
        let lhs = fx.iter().zip(&fxd_lt).fold(s.zero(), |acc, (a, b)| s.add(&acc, &s.mul(a, b)));
        // <x', x> = sum_j b_j t*_j + sum_i a_i l*_i, an element of I
        let mut pair = f.ideal_zero();
        for j in 0..rk_t {
            pair = f.ideal_add(&pair, &f.ideal_scale(&qd.l[j], &q.t[j]));
        }
        for i in 0..rk_l {
            pair = f.ideal_add(&pair, &f.ideal_scale(&q.l[i], &qd.t[i]));
        }
        prop_assert_eq!(lhs, f.sigma1(&pair));
    }

    #[test]
    fn isomorphisms_compose_and_invert(seed in any::<u64>(), rk_l in 0usize..3, rk_t in 0usize..3) {
        let f = breuil();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_window(&f, rk_l, rk_t, &mut rng);
        let g = random_iso(&f, rk_l, rk_t, &mut rng);
        let w2 = transport(&f, &w, &g).unwrap();
        prop_assert!(validate_window(&f, &w2, &mut rng, 3).all_pass());
        prop_assert!(validate_window_hom(&f, &w, &w2, &g, true).all_pass());
        let gi = invert_hom(&f, &g, rk_l).unwrap();
        prop_assert!(validate_window_hom(&f, &w2, &w, &gi, true).all_pass());
        let h = random_iso(&f, rk_l, rk_t, &mut rng);
        let w3 = transport(&f, &w2, &h).unwrap();
        let hg = compose(&f, &g, &h, rk_l);
        prop_assert!(validate_window_hom(&f, &w, &w3, &hg, true).all_pass());
        let id = compose(&f, &g, &gi, rk_l);
        prop_assert!(matrix::equal(f.ring(), &id.g, &matrix::identity(f.ring(), w.rank())));
    }
}

#[test]
fn window_validation_examples() {
    let f = breuil();
    let s = f.ring();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert!(validate_window(&f, &identity_window(&f, 1, 1), &mut rng, 5).all_pass());
    let bad = Window { rk_l: 1, rk_t: 1, psi: matrix::diagonal(s, &[s.one(), s.from_u64(3)]) };
    assert!(!validate_window(&f, &bad, &mut rng, 5).get("window-generation").unwrap().pass);
}

#[test]
fn evaluation_examples() {
    let f = breuil();
    let s = f.ring();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let w = random_window(&f, 1, 2, &mut rng);
    for j in 0..3 {
        let mut e = vec![s.zero(); 3];
        e[j] = s.one();
        let fe = eval_f(&f, &w, &e);
        if j >= 1 {
            assert_eq!(fe, w.psi.column(j));
            // F_1(E t_j) = sigma_1(E) F(t_j) = F(t_j)
            let mut t = vec![f.ideal_zero(); 2];
            t[j - 1] = s.one();
            let q = QVec { l: vec![s.zero()], t };
            assert_eq!(eval_f1(&f, &w, &q), fe);
        } else {
            let theta = f.theta();
            assert_eq!(fe, w.psi.column(0).iter().map(|x| s.mul(&theta, x)).collect::<Vec<_>>());
        }
    }
}

#[test]
fn hom_failures_are_detected() {
    let f = breuil();
    let s = f.ring();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let w = random_window(&f, 1, 1, &mut rng);
    let g = random_iso(&f, 1, 1, &mut rng);
    let w2 = transport(&f, &w, &g).unwrap();
    let mut bad = g.clone();
    bad.g.set(0, 0, s.add(bad.g.get(0, 0), &s.monomial(&[1])));
    assert!(!validate_window_hom(&f, &w, &w2, &bad, true).get("hom-f1").unwrap().pass);
    let mut bad = g.clone();
    bad.g.set(1, 0, s.add(bad.g.get(1, 0), &s.one()));
    assert!(!validate_window_hom(&f, &w, &w2, &bad, true).get("hom-q").unwrap().pass);
    assert!(hom_from_matrix(&f, bad.g.clone(), 1, 1).is_err());
}

#[test]
fn base_change_is_functorial() {
    let d = desc();
    let f3 = breuil();
    let f2 = BreuilFrame::new(&d, 2).unwrap();
    let f1 = BreuilFrame::new(&d, 1).unwrap();
    let a = BreuilProjection { src: &f3, dst: &f2 };
    let b = BreuilProjection { src: &f2, dst: &f1 };
    let ba = Composite { first: &a, second: &b };
    let id = BreuilProjection { src: &f3, dst: &f3 };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let w = random_window(&f3, 1, 1, &mut rng);
        assert_eq!(base_change(&id, &w), w);
        assert_eq!(base_change(&a, &w).psi, w.psi.map(|x| f3.series().transfer(x, f2.series())));
        assert_eq!(base_change(&ba, &w), base_change(&b, &base_change(&a, &w)));
        let w2 = base_change(&a, &w);
        assert!(validate_window(&f2, &w2, &mut rng, 3).all_pass());
        // base change carries isomorphisms to isomorphisms
        let g = random_iso(&f3, 1, 1, &mut rng);
        let wg = transport(&f3, &w, &g).unwrap();
        let bg = base_change_hom(&a, &g);
        assert!(validate_window_hom(&f2, &w2, &base_change(&a, &wg), &bg, true).all_pass());
    }
}

#[test]
fn base_change_along_a_twist_scales_l_columns() {
    let f = breuil();
    let s = f.ring();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = s.add(&s.one(), &s.monomial(&[1]));
    let tw = TwistedFrame::new(&f, u.clone()).unwrap();
    let omega = TwistHom { twisted: &tw };
    let w = random_window(&tw, 1, 1, &mut rng);
    assert!(validate_window(&tw, &w, &mut rng, 3).all_pass());
    let w2 = base_change(&omega, &w);
    assert!(validate_window(&f, &w2, &mut rng, 3).all_pass());
    assert_eq!(w2.psi.column(0), w.psi.column(0).iter().map(|x| s.mul(x, &u)).collect::<Vec<_>>());
    assert_eq!(w2.psi.column(1), w.psi.column(1));
}

#[test]
fn v_sharp_identities() {
    let f = breuil();
    let s = f.ring();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    assert_eq!(v_sharp(&f, &identity_window(&f, 2, 0)).unwrap(), matrix::identity(s, 2));
    let th = f.theta();
    assert_eq!(v_sharp(&f, &identity_window(&f, 0, 2)).unwrap(), matrix::diagonal(s, &[th.clone(), th.clone()]));
    for _ in 0..20 {
        let w = random_window(&f, 1, 2, &mut rng);
        let v = v_sharp(&f, &w).unwrap();
        let q = random_q(&f, &w, &mut rng);
        let image = matrix::mul_vec(s, &v, &eval_f1(&f, &w, &q));
        // 1 (x) x in P^(sigma)
        let expect: Vec<Series> = q.l.iter().map(|x| f.sigma(x)).chain(q.t.iter().map(|a| f.sigma(&f.embed(a)))).collect();
        assert_eq!(image, expect);
    }
}

/// Least k with the twisted power (V^#)^(k) zero mod m, by direct powering in S.
fn brute_nil_degree(f: &BreuilFrame, v: &Matrix<Series>) -> Option<usize> {
    (0..=v.rows).find(|&k| twisted_power(f, v, k).data.iter().all(|x| f.residue(x) == 0))
}

#[test]
fn nilpotence_examples_and_criteria_agree() {
    let f = breuil();
    let s = f.ring();
    assert!(nilpotence(&f, &identity_window(&f, 0, 2)).unwrap().nilpotent);
    assert!(!nilpotence(&f, &identity_window(&f, 2, 0)).unwrap().nilpotent);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut seen = [false; 2];
    for i in 0..50 {
        let mut w = random_window(&f, 1 + i % 2, 1, &mut rng);
        if i % 3 == 0 {
            // make lambda nilpotent by pushing the L -> L block of Psi^-1 into m
            let mut inv = matrix::inverse(s, &w.psi).unwrap();
            for r in 0..w.rk_l {
                for c in 0..w.rk_l {
                    let x = inv.get(r, c).clone();
                    inv.set(r, c, s.sub(&x, &s.from_u64(f.residue(&x))));
                }
            }
            if w.rk_l == 2 {
                inv.set(0, 0, s.from_u64(0));
                inv.set(0, 1, s.from_u64(1));
                inv.set(1, 0, s.from_u64(0));
                inv.set(1, 1, s.from_u64(0));
            }
            match matrix::inverse(s, &inv) {
                Some(psi) => w.psi = psi,
                None => continue,
            }
        }
        let n = nilpotence(&f, &w).unwrap();
        assert_eq!(n.nilpotent, n.lambda_nilpotent);
        let v = v_sharp(&f, &w).unwrap();
        assert_eq!(n.degree, brute_nil_degree(&f, &v));
        seen[n.nilpotent as usize] = true;
    }
    assert!(seen[0] && seen[1]);
}

#[test]
fn hodge_filtration_is_the_l_block() {
    let f = breuil();
    let q = f.quotient.clone().unwrap();
    let w = identity_window(&f, 1, 1);
    let h = hodge(&f, &w, |x| q.reduce(f.series(), x));
    assert_eq!((h.rows, h.cols), (2, 1));
    assert_eq!(h.get(0, 0), &q.one());
    assert!(hodge(&f, &identity_window(&f, 0, 2), |x| x.clone()).data.is_empty());
}

#[test]
fn windows_over_witt_frames() {
    let d = RingDesc::eisenstein(3, 7, 1, 2, &[(vec![1], 1)]);
    let f = WittFrame::new(&d, 2, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let w = random_window(&f, 1, 1, &mut rng);
    assert!(validate_window(&f, &w, &mut rng, 3).all_pass());
    let g = random_iso(&f, 1, 1, &mut rng);
    let w2 = transport(&f, &w, &g).unwrap();
    assert!(validate_window_hom(&f, &w, &w2, &g, true).all_pass());
    let dd = dual(&f, &dual(&f, &w).unwrap()).unwrap();
    assert!(matrix::equal(f.ring(), &dd.psi, &w.psi));
    let n = nilpotence(&f, &w).unwrap();
    assert_eq!(n.nilpotent, n.lambda_nilpotent);
}
