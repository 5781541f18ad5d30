use frames_core::base_rings::*;
use frames_core::frames::Frame;
use frames_core::kappa::*;
use frames_core::ring::Ring;
use frames_core::windows::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn d3() -> RingDesc {
    RingDesc::eisenstein(3, 7, 1, 3, &[(vec![1], 1)])
}

fn d5() -> RingDesc {
    RingDesc::eisenstein(5, 5, 2, 2, &[(vec![1, 0], 1), (vec![0, 1], 1)])
}

fn perturbed() -> RingDesc {
    d3().with_sigma(SigmaSpec::General(vec![vec![(vec![3], 1), (vec![2], 3)]]))
}

fn random_nilpotent_window<F: Frame>(f: &F, l: usize, t: usize, rng: &mut ChaCha8Rng) -> Window<frames_core::frames::El<F>> {
    loop {
        let w = random_window(f, l, t, rng);
        if nilpotence(f, &w).unwrap().nilpotent {
            return w;
        }
    }
}

fn round_trips(pl: &Pipeline, a: usize, w: &Window<Series>) -> bool {
    let rec = pl.recover(a, &pl.push(a, w)).expect("recover verifies its own output");
    pl.lift_hom(a, &rec.window, w, &rec.iso, pl.a_max() as u32).is_ok()
}

#[test]
fn recover_push_round_trip_below_top_level() {
    for (desc, a_max, n) in [(d3(), 3, 4), (d5(), 2, 3), (perturbed(), 3, 4)] {
        let pl = Pipeline::new_unchecked(&desc, a_max, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for a in 1..=a_max.min(2) {
            for (l, t) in [(1, 1), (0, 1), (1, 0), (2, 1)] {
                let w = random_window(&pl.kappa(a).src, l, t, &mut rng);
                assert!(round_trips(&pl, a, &w), "a = {a} ({l},{t})");
            }
        }
    }
}

#[test]
fn recover_push_round_trip_for_nilpotent_windows() {
    let pl = Pipeline::new(&d3(), 3, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (l, t) in [(1, 1), (0, 1), (2, 1), (1, 2)] {
        let w = random_nilpotent_window(&pl.kappa(3).src, l, t, &mut rng);
        assert!(round_trips(&pl, 3, &w), "({l},{t})");
    }
}

// At Witt length 4 the push of a non-nilpotent window over B_3 does not pin
// down its Hodge filtration: recover returns a window whose push is
// isomorphic to the input display but which is not isomorphic to the source.
#[test]
fn truncated_push_is_not_faithful_for_non_nilpotent_windows() {
    let pl = Pipeline::new(&d3(), 3, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut gap = 0;
    for _ in 0..6 {
        let w = random_window(&pl.kappa(3).src, 1, 1, &mut rng);
        let nil = nilpotence(&pl.kappa(3).src, &w).unwrap();
        let ok = round_trips(&pl, 3, &w);
        assert!(ok || !nil.nilpotent);
        gap += usize::from(!ok);
    }
    assert!(gap > 0);
}

#[test]
fn push_recover_is_isomorphic_to_random_displays() {
    let pl = Pipeline::new(&d3(), 3, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for a in 1..=3 {
        for (l, t) in [(1, 1), (2, 1)] {
            let d = random_window(&pl.kappa(a).dst, l, t, &mut rng);
            let rec = pl.recover(a, &d).unwrap();
            let rep = validate_window_hom(&pl.kappa(a).dst, &pl.push(a, &rec.window), &d, &rec.iso, true);
            assert!(rep.all_pass(), "a = {a}: {:?}", rep.failures());
        }
    }
}

#[test]
fn dual_commutes_with_push() {
    let pl = Pipeline::new(&d3(), 3, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for a in 1..=3 {
        for (l, t) in [(1, 1), (2, 1)] {
            let w = random_window(&pl.kappa(a).src, l, t, &mut rng);
            let dc = pl.dual_compat(a, &w).unwrap();
            assert!(pl.kappa(a).dst.witt.is_unit(&dc.c));
        }
    }
}

#[test]
fn diagrams_commute() {
    for (desc, a_max, n) in [(d3(), 3, 4), (d5(), 2, 3)] {
        let pl = Pipeline::new(&desc, a_max, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rep = pl.diagram_checks(&mut rng, 4);
        assert!(rep.all_pass(), "{:?}", rep.failures());
    }
}
