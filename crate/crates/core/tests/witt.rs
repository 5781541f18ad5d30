use frames_core::base_rings::*;
use frames_core::ring::{Ring, Zpn};
use frames_core::witt::{WittPolyTable, WittRing, WittVec};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Witt coordinates from ghost components, computed in a ring with `pad`
/// extra p-adic digits by exact division. Independent of the universal
/// polynomials.
fn from_ghost(lift: &Level, ghosts: &[Series]) -> Vec<Series> {
    let r = &lift.ring;
    let p = lift.p();
    let mut z: Vec<Series> = Vec::new();
    for m in 0..ghosts.len() {
        let mut num = ghosts[m].clone();
        for (i, zi) in z.iter().enumerate() {
            let t = r.scalar_mul(p.pow(i as u32), &r.pow(zi, p.pow((m - i) as u32)));
            num = r.sub(&num, &t);
        }
        z.push(r.div_p_power(&num, m as u32).expect("ghost division"));
    }
    z
}

fn ghost_of(lift: &Level, x: &[Series]) -> Vec<Series> {
    let r = &lift.ring;
    let p = lift.p();
    (0..x.len())
        .map(|m| {
            let mut acc = r.zero();
            for i in 0..=m {
                acc = r.add(&acc, &r.scalar_mul(p.pow(i as u32), &r.pow(&x[i], p.pow((m - i) as u32))));
            }
            acc
        })
        .collect()
}

enum Op {
    Add,
    Mul,
}

fn oracle(base: &Level, n: usize, a: &WittVec<Series>, b: &WittVec<Series>, op: Op) -> WittVec<Series> {
    let lift = base.at_precision(base.precision() + n as u32).unwrap();
    let la: Vec<Series> = a.0.iter().map(|x| base.ring.transfer(x, &lift.ring)).collect();
    let lb: Vec<Series> = b.0.iter().map(|x| base.ring.transfer(x, &lift.ring)).collect();
    let (ga, gb) = (ghost_of(&lift, &la), ghost_of(&lift, &lb));
    let g: Vec<Series> = ga
        .iter()
        .zip(&gb)
        .map(|(x, y)| match op {
            Op::Add => lift.ring.add(x, y),
            Op::Mul => lift.ring.mul(x, y),
        })
        .collect();
    WittVec(from_ghost(&lift, &g).iter().map(|z| lift.ring.transfer(z, &base.ring)).collect())
}

fn configs() -> Vec<(RingDesc, usize)> {
    vec![
        (RingDesc::eisenstein(2, 4, 1, 3, &[(vec![1], 1)]), 4),
        (RingDesc::eisenstein(3, 3, 1, 3, &[(vec![1], 1)]), 4),
        (RingDesc::eisenstein(3, 3, 2, 2, &[(vec![1, 0], 1)]), 3),
        (RingDesc::eisenstein(5, 2, 1, 2, &[(vec![1], 1)]), 3),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn arithmetic_matches_ghost_lift_oracle(seed in any::<u64>(), idx in 0usize..4) {
        let (d, n) = &configs()[idx];
        let base = Level::new(d, d.a, d.n).unwrap();
        let w = WittRing::new(base.ring.clone(), *n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (w.random(&mut rng), w.random(&mut rng));
        prop_assert_eq!(w.add(&a, &b), oracle(&base, *n, &a, &b, Op::Add));
        prop_assert_eq!(w.mul(&a, &b), oracle(&base, *n, &a, &b, Op::Mul));
    }

    #[test]
    fn frobenius_verschiebung_identities(seed in any::<u64>(), idx in 0usize..4) {
        let (d, n) = &configs()[idx];
        let base = Level::new(d, d.a, d.n).unwrap();
        let br = &base.ring;
        let w = WittRing::new(br.clone(), *n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (w.random(&mut rng), w.random(&mut rng));
        let gx = w.ghost(&x);
        let gf = w.ghost(&w.frobenius(&x));
        for m in 0..n - 1 {
            prop_assert_eq!(&gf[m], &gx[m + 1]);
        }
        let gv = w.ghost(&w.verschiebung(&x));
        prop_assert!(br.is_zero(&gv[0]));
        for m in 1..*n {
            prop_assert_eq!(gv[m].clone(), br.scalar_mul(d.p, &gx[m - 1]));
        }
        // F is a ring map and F V = p
        prop_assert!(w.eq(&w.frobenius(&w.mul(&x, &y)), &w.mul(&w.frobenius(&x), &w.frobenius(&y))));
        prop_assert!(w.eq(&w.frobenius(&w.add(&x, &y)), &w.add(&w.frobenius(&x), &w.frobenius(&y))));
        let short = w.truncate(&x, n - 1);
        prop_assert!(w.eq(&w.frobenius(&w.verschiebung(&short)), &w.mul(&w.int(d.p as i64), &short)));
        // V(x F(y)) = V(x) y
        let lhs = w.verschiebung(&w.mul(&short, &w.frobenius(&y)));
        prop_assert!(w.eq(&lhs, &w.mul(&w.verschiebung(&short), &y)));
        // Teichmuller is multiplicative and F[c] = [c^p]
        let (c, e) = (br.random(&mut rng), br.random(&mut rng));
        prop_assert!(w.eq(&w.teichmuller(&br.mul(&c, &e)), &w.mul(&w.teichmuller(&c), &w.teichmuller(&e))));
        prop_assert!(w.eq(&w.frobenius(&w.teichmuller(&c)), &w.teichmuller(&br.pow(&c, d.p))));
        // inverses
        if w.is_unit(&x) {
            prop_assert!(w.eq(&w.mul(&x, &w.inv(&x).unwrap()), &w.one()));
        }
        prop_assert!(w.eq(&w.add(&x, &w.neg(&x)), &w.zero()));
    }
}

#[test]
fn p2_first_sum_polynomial_is_explicit() {
    let t = WittPolyTable::generate(2, 2).unwrap();
    // S_1 = a_1 + b_1 - a_0 b_0 in variables (a_0, a_1, b_0, b_1)
    let expected: Vec<(Vec<u16>, BigInt)> = vec![
        (vec![0, 0, 0, 1], BigInt::from(1)),
        (vec![0, 1, 0, 0], BigInt::from(1)),
        (vec![1, 0, 1, 0], BigInt::from(-1)),
    ];
    assert_eq!(t.sum[1].terms, expected);
}

/// Over the integers the universal polynomials reproduce ghost arithmetic.
#[test]
fn polynomials_agree_with_rational_ghost_solution() {
    for (p, n) in [(2u64, 4usize), (3, 3), (5, 3)] {
        let t = WittPolyTable::generate(p, n).unwrap();
        let eval = |poly: &frames_core::witt::IntPoly, vars: &[BigInt]| -> BigInt {
            poly.terms.iter().fold(BigInt::from(0), |acc, (e, c)| {
                acc + e.iter().zip(vars).fold(c.clone(), |m, (k, v)| m * v.pow(*k as u32))
            })
        };
        let ghost = |x: &[BigInt], m: usize| -> BigInt {
            (0..=m).fold(BigInt::from(0), |acc, i| acc + BigInt::from(p).pow(i as u32) * x[i].pow(p.pow((m - i) as u32) as u32))
        };
        let samples: Vec<Vec<i64>> = vec![vec![1, -1, 2, 0, 3, 1, -2, 1], vec![2, 2, 2, 2, 1, 1, 1, 1], vec![0, 1, 0, 1, 1, 0, 1, 0]];
        for s in samples {
            let a: Vec<BigInt> = s[..n].iter().map(|v| BigInt::from(*v)).collect();
            let b: Vec<BigInt> = s[4..4 + n].iter().map(|v| BigInt::from(*v)).collect();
            let vars: Vec<BigInt> = a.iter().chain(&b).cloned().collect();
            let sum: Vec<BigInt> = t.sum.iter().map(|q| eval(q, &vars)).collect();
            let prod: Vec<BigInt> = t.prod.iter().map(|q| eval(q, &vars)).collect();
            for m in 0..n {
                assert_eq!(ghost(&sum, m), ghost(&a, m) + ghost(&b, m));
                assert_eq!(ghost(&prod, m), ghost(&a, m) * ghost(&b, m));
            }
            let frob: Vec<BigInt> = t.frob.iter().map(|q| eval(q, &a)).collect();
            for m in 0..n - 1 {
                assert_eq!(ghost(&frob, m), ghost(&a, m + 1));
            }
        }
    }
}

#[test]
fn table_json_round_trip() {
    let t = WittPolyTable::generate(3, 3).unwrap();
    let back = WittPolyTable::from_json(&t.to_json().unwrap()).unwrap();
    assert_eq!(t, back);
}

#[test]
fn p_times_one_in_length_two() {
    for p in [3u64, 5] {
        let z = Zpn::new(p, 2).unwrap();
        let w = WittRing::new(z.clone(), 2).unwrap();
        let pv = w.int(p as i64);
        let expected = (1i64 - (p as i64).pow(p as u32 - 1)).rem_euclid((p * p) as i64) as u64;
        assert_eq!(pv.0, vec![p, expected]);
        assert!(z.is_unit(&pv.0[1]));
    }
}

#[test]
fn unit_criterion_on_zeroth_coordinate() {
    let d = RingDesc::eisenstein(3, 3, 1, 3, &[(vec![1], 1)]);
    let q = QuotientRing::new(&d, 3).unwrap();
    let w = WittRing::new(q.clone(), 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let x = w.random(&mut rng);
        assert_eq!(w.is_unit(&x), q.is_unit(&x.0[0]));
        if let Some(y) = w.inv(&x) {
            assert!(w.eq(&w.mul(&x, &y), &w.one()));
        }
    }
}

mod square_zero {
    use frames_core::base_rings::{QElem, QuotientRing, RingDesc};
    use frames_core::ring::Ring;
    use frames_core::witt::square_zero::{dieudonne_decomposition, LogVec, SquareZero};
    use frames_core::witt::{WittRing, WittVec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (QuotientRing, WittRing<QuotientRing>) {
        let d = RingDesc::eisenstein(3, 7, 1, 4, &[(vec![1], 1)]);
        let q = QuotientRing::new(&d, 4).unwrap();
        let w = WittRing::new(q.clone(), 3).unwrap();
        (q, w)
    }

    fn in_b(q: &QuotientRing) -> impl Fn(&QElem) -> bool + '_ {
        move |x| q.in_degree_at_least(x, 2)
    }

    fn random_b(q: &QuotientRing, rng: &mut ChaCha8Rng) -> QElem {
        let x = q.random(rng);
        QElem(x.0.iter().zip(&q.basis().degrees).map(|(c, d)| if *d >= 2 { *c } else { 0 }).collect())
    }

    fn random_log(q: &QuotientRing, rng: &mut ChaCha8Rng) -> LogVec<QElem> {
        LogVec((0..3).map(|_| random_b(q, rng)).collect())
    }

    #[test]
    fn log_is_additive_and_matches_teichmuller() {
        let (q, w) = setup();
        let gens: Vec<QElem> = (2..4).map(|k| q.pow(&q.var(0), k)).collect();
        let b = SquareZero::new(&w, &gens, in_b(&q)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let (l1, l2) = (random_log(&q, &mut rng), random_log(&q, &mut rng));
            let (x1, x2) = (b.exp(&l1).unwrap(), b.exp(&l2).unwrap());
            // the Witt sum of two vectors in W(b) is coordinatewise
            let sum = LogVec(l1.0.iter().zip(&l2.0).map(|(a, c)| q.add(a, c)).collect());
            assert_eq!(b.log(&w.add(&x1, &x2)).unwrap(), sum);
            let c = random_b(&q, &mut rng);
            assert_eq!(b.log(&w.teichmuller(&c)).unwrap(), LogVec(vec![c, q.zero(), q.zero()]));
            // V shifts the log coordinates
            let v = w.verschiebung(&w.truncate(&x1, 2));
            assert_eq!(b.log(&v).unwrap().0, vec![q.zero(), l1.0[0].clone(), l1.0[1].clone()]);
        }
        assert_eq!(b.log(&w.zero()).unwrap(), LogVec(vec![q.zero(); 3]));
    }

    #[test]
    fn witt_action_through_ghost_components() {
        let (q, w) = setup();
        let gens: Vec<QElem> = (2..4).map(|k| q.pow(&q.var(0), k)).collect();
        let b = SquareZero::new(&w, &gens, in_b(&q)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let x = w.random(&mut rng);
            let l = random_log(&q, &mut rng);
            let prod = w.mul(&x, &b.exp(&l).unwrap());
            assert_eq!(b.log(&prod).unwrap(), b.action(&x, &l));
        }
    }

    #[test]
    fn f1_tilde_formulas() {
        let (q, w) = setup();
        let gens: Vec<QElem> = (2..4).map(|k| q.pow(&q.var(0), k)).collect();
        let b = SquareZero::new(&w, &gens, in_b(&q)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let zero_log = LogVec(vec![q.zero(); 3]);
        for _ in 0..30 {
            let l = random_log(&q, &mut rng);
            assert_eq!(b.f1_tilde(&w.zero(), &l).unwrap(), WittVec(vec![l.0[1].clone(), l.0[2].clone()]));
            let c = w.verschiebung(&w.random_len(2, &mut rng));
            assert_eq!(b.f1_tilde(&c, &zero_log).unwrap(), w.f1(&c).unwrap());
            let t = w.teichmuller(&random_b(&q, &mut rng));
            assert!(w.is_zero(&b.f1_tilde_of(&t).unwrap()));
            // overlap: an element of I_R meet W(b) gives the same value both ways
            let both = WittVec(vec![q.zero(), l.0[1].clone(), l.0[2].clone()]);
            let via_log = LogVec(both.0.clone());
            assert_eq!(b.f1_tilde(&both, &zero_log).unwrap(), b.f1_tilde(&w.zero(), &via_log).unwrap());
            // sigma-linearity: f~_1(x z) = F(x) f~_1(z)
            let x = w.random(&mut rng);
            let z = w.add(&c, &b.exp(&l).unwrap());
            let lhs = b.f1_tilde_of(&w.mul(&x, &z)).unwrap();
            let rhs = w.mul(&w.frobenius(&x), &b.f1_tilde_of(&z).unwrap());
            assert!(w.eq(&lhs, &rhs));
        }
        let bad = WittVec(vec![q.one(), q.zero(), q.zero()]);
        assert!(b.f1_tilde(&bad, &zero_log).is_err());
    }

    #[test]
    fn square_zero_is_enforced() {
        let (q, w) = setup();
        let gens = vec![q.var(0)];
        assert!(SquareZero::new(&w, &gens, |x: &QElem| q.in_degree_at_least(x, 1)).is_err());
    }

    #[test]
    fn dieudonne_ring_is_everything_at_finite_length() {
        let (q, w) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..100 {
            let x = w.random(&mut rng);
            let (z, y) = dieudonne_decomposition(&w, &x, |c| q.residue(c));
            assert!(y.0.iter().all(|c| q.residue(c) == 0));
            assert_eq!(w.add(&w.int(z as i64), &y), x);
        }
    }
}
