use frames_core::base_rings::*;
use frames_core::breuil::*;
use frames_core::frames::*;
use frames_core::matrix::{self, Matrix};
use frames_core::ring::Ring;
use frames_core::windows::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn frame() -> BreuilFrame {
    BreuilFrame::new(&RingDesc::eisenstein(3, 4, 1, 3, &[(vec![1], 1)]), 3).unwrap()
}

fn frame_p5() -> BreuilFrame {
    BreuilFrame::new(&RingDesc::eisenstein(5, 3, 2, 2, &[(vec![1, 0], 1), (vec![0, 1], 1)]), 2).unwrap()
}

fn diag(f: &BreuilFrame, xs: &[Series]) -> Matrix<Series> {
    matrix::diagonal(f.series(), xs)
}

fn e(f: &BreuilFrame) -> Series {
    f.level.e.clone()
}

fn one(f: &BreuilFrame) -> Series {
    f.series().one()
}

/// Counts v in F_p^h with phi_k^h v = 0 by enumeration.
fn brute_force_nil_rank(f: &BreuilFrame, b: &BreuilWindow) -> usize {
    let p = f.series().prime() as usize;
    let h = b.rank;
    let m = b.phi.map(|x| f.residue(x));
    let mut count = 0usize;
    for code in 0..p.pow(h as u32) {
        let mut v: Vec<u64> = (0..h).map(|i| ((code / p.pow(i as u32)) % p) as u64).collect();
        for _ in 0..h {
            v = (0..h).map(|i| (0..h).map(|j| m.get(i, j) * v[j]).sum::<u64>() % p as u64).collect();
        }
        count += usize::from(v.iter().all(|x| *x == 0));
    }
    let mut k = 0;
    while p.pow(k) < count {
        k += 1;
    }
    assert_eq!(p.pow(k), count, "kernel size is a power of p");
    k as usize
}

#[test]
fn psi_from_phi_examples() {
    let f = frame();
    let s = f.series();
    assert_eq!(psi_from_phi(&f, &diag(&f, &[e(&f), e(&f)])).unwrap(), matrix::identity(s, 2));
    assert_eq!(psi_from_phi(&f, &matrix::identity(s, 2)).unwrap(), diag(&f, &[e(&f), e(&f)]));
    assert_eq!(psi_from_phi(&f, &diag(&f, &[one(&f), e(&f)])).unwrap(), diag(&f, &[e(&f), one(&f)]));
    let bad = diag(&f, &[one(&f), s.from_u64(9)]);
    assert!(matches!(psi_from_phi(&f, &bad), Err(frames_core::Error::NoSolution(_))));
}

#[test]
fn to_window_examples() {
    let f = frame();
    let s = f.series();
    let w = to_window(&f, &BreuilWindow::from_phi(&f, matrix::identity(s, 2)).unwrap()).unwrap().window;
    assert_eq!((w.rk_l, w.rk_t), (2, 0));
    let w = to_window(&f, &BreuilWindow::from_phi(&f, diag(&f, &[e(&f), e(&f)])).unwrap()).unwrap().window;
    assert_eq!((w.rk_l, w.rk_t), (0, 2));
}

#[test]
fn dual_examples() {
    let f = frame();
    let b = BreuilWindow::from_phi(&f, diag(&f, &[e(&f)])).unwrap();
    assert_eq!(dual_breuil(&b).phi, diag(&f, &[one(&f)]));
}

#[test]
fn nil_etale_rank_examples() {
    let f = frame();
    let s = f.series();
    let cases = [
        (diag(&f, &[e(&f), e(&f)]), (2, 0)),
        (matrix::identity(s, 2), (0, 2)),
        (diag(&f, &[one(&f), e(&f)]), (1, 1)),
    ];
    for (phi, ranks) in cases {
        let b = BreuilWindow::from_phi(&f, phi).unwrap();
        assert_eq!(nil_etale_ranks(&f, &b), ranks);
    }
    assert!(is_nilpotent_breuil(&f, &BreuilWindow::from_phi(&f, diag(&f, &[e(&f)])).unwrap()));
    assert!(!is_nilpotent_breuil(&f, &BreuilWindow::from_phi(&f, diag(&f, &[one(&f)])).unwrap()));
}

#[test]
fn cokernel_examples() {
    let f = frame();
    let s = f.series();
    let b = BreuilWindow::from_phi(&f, matrix::identity(s, 1)).unwrap();
    let p = diag(&f, &[s.from_u64(3)]);
    let i = Isogeny::new(&f, b.clone(), b.clone(), p.clone()).unwrap();
    let m = cokernel_module(&f, &i).unwrap();
    assert_eq!(i.exponent, 1);
    assert_eq!(m.raw(), RawModule { relations: p, phi: matrix::identity(s, 1), psi: diag(&f, &[e(&f)]) });
    assert!(!m.is_zero(&f));
    let id = Isogeny::new(&f, b.clone(), b, matrix::identity(s, 1)).unwrap();
    assert!(cokernel_module(&f, &id).unwrap().is_zero(&f));
}

#[test]
fn non_isogenies_are_rejected() {
    let f = frame();
    let s = f.series();
    let b = BreuilWindow::from_phi(&f, matrix::identity(s, 1)).unwrap();
    let x = diag(&f, &[s.var(0)]);
    assert!(Isogeny::new(&f, b.clone(), b.clone(), x).is_err());
    let be = BreuilWindow::from_phi(&f, diag(&f, &[e(&f)])).unwrap();
    assert!(Isogeny::new(&f, b, be, matrix::identity(s, 1)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn window_round_trip_is_a_basis_change(seed in any::<u64>(), l in 0usize..3, t in 0usize..3) {
        for f in [frame(), frame_p5()] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let base = random_breuil_window(&f, l, t, &mut rng);
            let b = base.change_basis(&f, &matrix::random_invertible(f.series(), l + t, &mut rng)).unwrap();
            prop_assert!(b.validate(&f).all_pass());
            let wb = to_window(&f, &b).unwrap();
            prop_assert_eq!((wb.window.rk_l, wb.window.rk_t), (l, t));
            prop_assert!(validate_window(&f, &wb.window, &mut rng, 3).all_pass());
            let back = from_window(&f, &wb.window).unwrap();
            prop_assert_eq!(back, b.change_basis(&f, &wb.u).unwrap());
        }
    }

    #[test]
    fn dual_breuil_matches_the_window_dual(seed in any::<u64>(), l in 0usize..3, t in 0usize..3) {
        let f = frame();
        let s = f.series();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_breuil_window(&f, l, t, &mut rng)
            .change_basis(&f, &matrix::random_invertible(s, l + t, &mut rng)).unwrap();
        let d = dual_breuil(&b);
        prop_assert!(d.validate(&f).all_pass());
        prop_assert_eq!(dual_breuil(&d), b.clone());
        let wb = to_window(&f, &b).unwrap();
        let wd = to_window(&f, &d).unwrap();
        let lhs = dual(&f, &wb.window).unwrap();
        // P-coordinates of the dual window come from V^-T with the blocks
        // reordered (T^v, L^v)
        let h = l + t;
        let perm: Vec<usize> = (l..h).chain(0..l).collect();
        let vt = matrix::try_inverse(s, &wb.v).unwrap().transpose();
        let v2 = Matrix::from_fn(h, h, |i, j| vt.get(i, perm[j]).clone());
        let g = matrix::mul(s, &matrix::try_inverse(s, &wd.v).unwrap(), &v2);
        // on Q the same identification is U'^-1 U^-T in the L + E T
        // coordinates, whose T' <- L block is the ideal cofactor of g
        let ut = matrix::try_inverse(s, &wb.u).unwrap().transpose();
        let u2 = Matrix::from_fn(h, h, |i, j| ut.get(i, perm[j]).clone());
        let q = matrix::mul(s, &matrix::try_inverse(s, &wd.u).unwrap(), &u2);
        let hom = WindowHom { c: q.block(wd.window.rk_l, h, 0, lhs.rk_l), g };
        let rep = validate_window_hom(&f, &lhs, &wd.window, &hom, true);
        prop_assert!(rep.all_pass(), "{:?}", rep.failures());
    }

    #[test]
    fn nil_etale_ranks_match_brute_force(seed in any::<u64>(), l in 0usize..3, t in 0usize..3) {
        let f = frame();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_breuil_window(&f, l, t, &mut rng)
            .change_basis(&f, &matrix::random_invertible(f.series(), l + t, &mut rng)).unwrap();
        let (nil, et) = nil_etale_ranks(&f, &b);
        prop_assert_eq!(nil + et, l + t);
        prop_assert_eq!(nil, brute_force_nil_rank(&f, &b));
        let w = to_window(&f, &b).unwrap().window;
        prop_assert_eq!(is_nilpotent_breuil(&f, &b), nilpotence(&f, &w).unwrap().nilpotent);
    }

    #[test]
    fn random_isogenies_give_breuil_modules(seed in any::<u64>(), h in 1usize..3) {
        let f = frame();
        let s = f.series();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = random_isogeny(&f, h, 3, &mut rng).unwrap();
        let m = cokernel_module(&f, &i).unwrap();
        prop_assert!(m.validate(&f).all_pass());
        let raw = m.raw();
        let ee = matrix::scale(s, &e(&f), &matrix::identity(s, h));
        prop_assert!(matrix::equal(s, &matrix::mul(s, &raw.phi, &raw.psi), &ee));
        prop_assert!(matrix::equal(s, &matrix::mul(s, &raw.psi, &raw.phi), &ee));
        let (i2, ident) = module_to_isogeny(&f, &raw).unwrap();
        prop_assert_eq!(ident, matrix::identity(s, h));
        prop_assert_eq!(cokernel_module(&f, &i2).unwrap().raw(), raw);
        let d = dual_module(&f, &m).unwrap();
        prop_assert!(d.validate(&f).all_pass());
        prop_assert_eq!(dual_module(&f, &d).unwrap(), m.clone());
        prop_assert_eq!(is_nilpotent_module(&f, &m), is_nilpotent_module(&f, &cokernel_module(&f, &i2).unwrap()));
    }
}
