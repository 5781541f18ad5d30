use frames_core::base_rings::*;
use frames_core::frames::*;
use frames_core::ring::Ring;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn perturbed(p: u64, n: u32, a: usize) -> RingDesc {
    RingDesc::eisenstein(p, n, 1, a, &[(vec![1], 1)])
        .with_sigma(SigmaSpec::General(vec![vec![(vec![p as u32], 1), (vec![2], p as i64)]]))
}

fn descs() -> Vec<RingDesc> {
    vec![
        RingDesc::eisenstein(3, 7, 1, 3, &[(vec![1], 1)]),
        RingDesc::eisenstein(5, 5, 2, 2, &[(vec![1, 0], 1), (vec![0, 1], 3)]),
        RingDesc::eisenstein(3, 4, 1, 3, &[]),
        RingDesc::eisenstein(3, 5, 1, 3, &[(vec![1], 3)]),
        perturbed(3, 6, 3),
    ]
}

fn assert_passes(rep: &frames_core::report::Report, what: &str) {
    assert!(rep.all_pass(), "{what}: {:?}", rep.failures());
}

#[test]
fn breuil_frames_pass_all_axioms() {
    for d in descs() {
        for a in 1..=d.a {
            let f = BreuilFrame::new(&d, a).unwrap();
            let rep = validate_frame(&f, &mut rng(a as u64), 30);
            assert_passes(&rep, &f.name());
            assert_eq!(f.theta(), f.level.sigma(&f.level.e));
            assert_eq!(f.compute_theta().unwrap(), f.theta());
        }
    }
}

#[test]
fn witt_frames_pass_with_theta_p() {
    let d = RingDesc::eisenstein(3, 7, 1, 3, &[(vec![1], 1)]);
    for (a, n) in [(1, 2), (2, 3), (3, 4)] {
        let f = WittFrame::new(&d, a, n).unwrap();
        let rep = validate_frame(&f, &mut rng(7), 12);
        assert_passes(&rep, &f.name());
        assert_eq!(f.theta(), f.witt.int(3));
        assert!(f.witt.eq(&f.compute_theta().unwrap(), &f.witt.int(3)));
    }
    let d = RingDesc::eisenstein(5, 5, 2, 2, &[(vec![1, 0], 1)]);
    let f = WittFrame::new(&d, 2, 3).unwrap();
    assert_passes(&validate_frame(&f, &mut rng(8), 8), &f.name());
}

#[test]
fn relative_frames_pass() {
    for d in descs() {
        for a1 in 2..=d.a {
            let f = RelativeBreuilFrame::new(&d, a1).unwrap();
            assert_passes(&validate_frame(&f, &mut rng(3), 30), &f.name());
            assert!(f.well_definedness().pass);
            for c in 1..d.n {
                let q = f.with_top_precision(c).unwrap();
                assert_passes(&validate_frame(&q, &mut rng(c as u64), 20), &q.name());
            }
        }
    }
    let d = RingDesc::eisenstein(3, 7, 1, 3, &[(vec![1], 1)]);
    let f = RelativeWittFrame::new(&d, 3, 3).unwrap();
    assert_passes(&validate_frame(&f, &mut rng(4), 10), &f.name());
}

#[test]
fn relative_sigma1_on_the_square_zero_part() {
    // standard sigma: sigma~_1 vanishes on J^a / J^(a+1)
    let d = RingDesc::eisenstein(3, 6, 1, 3, &[(vec![1], 1)]);
    let f = RelativeBreuilFrame::new(&d, 3).unwrap();
    let r = f.series();
    let z = r.monomial(&[2]);
    assert_eq!(f.sigma1(&RelIdeal { y: r.zero(), z }), r.zero());
    // sigma(x) = x^3 + 3x^2: sigma(x^2)/3 = 2x^5 + 3x^4 + ... truncates to 0 at
    // degree < 3, but sigma(x)/3 on J^1 / J^2 at level 2 is x^2 mod J^2 = 0
    let d = perturbed(3, 6, 2);
    let f = RelativeBreuilFrame::new(&d, 2).unwrap();
    let r = f.series();
    let x = r.var(0);
    assert_eq!(f.sigma1(&RelIdeal { y: r.zero(), z: x }), r.zero());
    // sigma(x) = x^3 + 3x: sigma~_1(x) = x is the tau-value
    let d = RingDesc::eisenstein(3, 6, 1, 2, &[(vec![1], 1)])
        .with_sigma(SigmaSpec::General(vec![vec![(vec![3], 1), (vec![1], 3)]]));
    let f = RelativeBreuilFrame::new(&d, 2).unwrap();
    let r = f.series();
    let x = r.var(0);
    let ideal = RelIdeal { y: r.zero(), z: x.clone() };
    assert_eq!(f.sigma1(&ideal), x);
    assert_eq!(f.sigma1(&ideal), f.level.tau(&r.var(0)).unwrap());
}

struct CorruptFrame(BreuilFrame);

impl Frame for CorruptFrame {
    type R = SeriesRing;
    type Ideal = Series;
    fn ring(&self) -> &SeriesRing {
        self.0.ring()
    }
    fn name(&self) -> String {
        "corrupt".into()
    }
    fn sigma(&self, x: &Series) -> Series {
        self.0.sigma(x)
    }
    fn sigma1(&self, y: &Series) -> Series {
        // sigma_1(E) := x instead of 1
        let r = self.0.series();
        r.mul(&self.0.sigma(y), &r.var(0))
    }
    fn embed(&self, y: &Series) -> Series {
        self.0.embed(y)
    }
    fn theta(&self) -> Series {
        self.0.theta()
    }
    fn ideal_zero(&self) -> Series {
        self.0.ideal_zero()
    }
    fn ideal_add(&self, a: &Series, b: &Series) -> Series {
        self.0.ideal_add(a, b)
    }
    fn ideal_neg(&self, a: &Series) -> Series {
        self.0.ideal_neg(a)
    }
    fn ideal_scale(&self, s: &Series, a: &Series) -> Series {
        self.0.ideal_scale(s, a)
    }
    fn to_ideal(&self, x: &Series) -> Option<Series> {
        self.0.to_ideal(x)
    }
    fn unit_witness(&self) -> Vec<(Series, Series)> {
        self.0.unit_witness()
    }
    fn residue(&self, x: &Series) -> u64 {
        self.0.residue(x)
    }
    fn random_ideal(&self, rng: &mut dyn RngCore) -> Series {
        self.0.random_ideal(rng)
    }
    fn frobenius_defects(&self, rng: &mut dyn RngCore) -> Vec<(Series, Series)> {
        self.0.frobenius_defects(rng)
    }
}

#[test]
fn corrupted_sigma1_fails_theta_relation() {
    let d = RingDesc::eisenstein(3, 7, 1, 3, &[(vec![1], 1)]);
    let f = CorruptFrame(BreuilFrame::new(&d, 3).unwrap());
    let rep = validate_frame(&f, &mut rng(1), 10);
    assert!(!rep.get("theta-relation").unwrap().pass);
    assert!(!rep.get("sigma1-generates").unwrap().pass);
    assert!(rep.get("sigma-ring-hom").unwrap().pass);
}

#[test]
fn theta_from_two_witnesses_agrees() {
    let d = RingDesc::eisenstein(3, 7, 1, 3, &[(vec![1], 1)]);
    let f = BreuilFrame::new(&d, 3).unwrap();
    let r = f.series();
    let mut g = rng(5);
    for _ in 0..20 {
        let s = r.random(&mut g);
        let Some(si) = r.inv(&s) else { continue };
        // (sigma(s), E s^-1) is another witness: sigma(s) sigma_1(E s^-1) = 1
        let w = [(f.sigma(&s), si.clone())];
        let one = r.mul(&w[0].0, &f.sigma1(&w[0].1));
        assert_eq!(one, r.one());
        let theta = r.mul(&w[0].0, &f.sigma(&f.embed(&w[0].1)));
        assert_eq!(theta, f.theta());
    }
}

#[test]
fn generalised_frame_skips_generation() {
    let d = RingDesc::eisenstein(3, 6, 1, 2, &[]);
    let f = BreuilFrame::new(&d, 2).unwrap();
    let r = f.series();
    // E = p: sigma_1 scaled by p, theta' = 1
    let g = GeneralisedFrame::new(&f, r.from_u64(3), r.one()).unwrap();
    let rep = validate_frame(&g, &mut rng(2), 20);
    assert_passes(&rep, "generalised");
    assert!(rep.get("sigma1-generates").is_none());
    assert!(GeneralisedFrame::new(&f, r.from_u64(3), r.from_u64(2)).is_err());
}

#[test]
fn kappa_frame_condition() {
    for p in [3u64, 5] {
        let es: Vec<Vec<(Vec<u32>, i64)>> = vec![
            vec![],
            vec![(vec![1], 1)],
            vec![(vec![2], 1)],
            vec![(vec![1], p as i64)],
        ];
        for e0 in es {
            let d = RingDesc::eisenstein(p, 5, 1, 3, &e0);
            let f = BreuilFrame::new(&d, 3).unwrap();
            let c = validate_kappa_frame(&f.level, &f.theta()).unwrap();
            assert!(c.pass, "E0 = {e0:?}, p = {p}");
        }
        let d = RingDesc::eisenstein(p, 5, 1, 3, &[(vec![1], 1)]);
        let f = BreuilFrame::principal_p_power(&d, 3, 2).unwrap();
        assert_passes(&validate_frame(&f, &mut rng(p), 10), "p^2 frame");
        assert!(!validate_kappa_frame(&f.level, &f.theta()).unwrap().pass);
    }
}

#[test]
fn tau_of_p_is_one_minus_p_power() {
    let d = RingDesc::eisenstein(3, 5, 1, 3, &[]);
    let f = BreuilFrame::new(&d, 3).unwrap();
    let t = f.level.tau(&f.theta()).unwrap();
    assert_eq!(t, f.series().from_i64(1 - 9));
}

#[test]
fn projections_and_inclusions_are_strict() {
    for d in descs() {
        for a in 1..d.a {
            let hi = BreuilFrame::new(&d, a + 1).unwrap();
            let lo = BreuilFrame::new(&d, a).unwrap();
            let rel = RelativeBreuilFrame::new(&d, a + 1).unwrap();
            let h = BreuilProjection { src: &hi, dst: &lo };
            assert_passes(&validate_hom(&h, &mut rng(1), 20), "projection");
            let i = RelativeInclusion { src: &hi, dst: &rel };
            assert_passes(&validate_hom(&i, &mut rng(2), 20), "inclusion");
            let pr = RelativeProjection { src: &rel, dst: &lo };
            assert_passes(&validate_hom(&pr, &mut rng(3), 20), "relative projection");
            let c = Composite { first: &i, second: &pr };
            assert_passes(&validate_hom(&c, &mut rng(4), 20), "composite");
        }
    }
    let d = RingDesc::eisenstein(3, 7, 1, 3, &[(vec![1], 1)]);
    let hi = WittFrame::new(&d, 3, 3).unwrap();
    let lo = WittFrame::new(&d, 2, 3).unwrap();
    let h = WittProjection { src: &hi, src_quotient: &hi.quotient, dst: &lo };
    assert_passes(&validate_hom(&h, &mut rng(5), 8), "witt projection");
    let rel = RelativeWittFrame::new(&d, 3, 3).unwrap();
    let h = WittProjection { src: &rel, src_quotient: &rel.quotient, dst: &lo };
    assert_passes(&validate_hom(&h, &mut rng(6), 8), "relative witt projection");
}

struct NotIdealPreserving<'a> {
    src: &'a BreuilFrame,
    dst: &'a BreuilFrame,
}

impl FrameHom for NotIdealPreserving<'_> {
    type Src = BreuilFrame;
    type Dst = BreuilFrame;
    fn source(&self) -> &BreuilFrame {
        self.src
    }
    fn target(&self) -> &BreuilFrame {
        self.dst
    }
    fn map(&self, x: &Series) -> Series {
        x.clone()
    }
    fn map_ideal(&self, y: &Series) -> Series {
        y.clone()
    }
    fn unit(&self) -> Series {
        self.dst.series().one()
    }
}

#[test]
fn hom_violating_ideal_containment_fails() {
    let d = RingDesc::eisenstein(3, 6, 1, 3, &[(vec![1], 1)]);
    let src = BreuilFrame::new(&d, 3).unwrap();
    let dst = BreuilFrame::principal_p_power(&d, 3, 1).unwrap();
    let rep = validate_hom(&NotIdealPreserving { src: &src, dst: &dst }, &mut rng(1), 10);
    assert!(!rep.get("hom-ideal").unwrap().pass);
}

/// The identity of S_a as a u-homomorphism B_a -> twisted B_a, for units u.
struct ScaledIdentity<'a> {
    base: &'a BreuilFrame,
    twisted: &'a TwistedFrame<'a, BreuilFrame>,
}

impl<'a> FrameHom for ScaledIdentity<'a> {
    type Src = TwistedFrame<'a, BreuilFrame>;
    type Dst = BreuilFrame;
    fn source(&self) -> &Self::Src {
        self.twisted
    }
    fn target(&self) -> &BreuilFrame {
        self.base
    }
    fn map(&self, x: &Series) -> Series {
        x.clone()
    }
    fn map_ideal(&self, y: &Series) -> Series {
        y.clone()
    }
    fn unit(&self) -> Series {
        self.twisted.u.clone()
    }
}

#[test]
fn units_compose_and_factorisation_round_trips() {
    let d = RingDesc::eisenstein(3, 6, 1, 3, &[(vec![1], 1)]);
    let f = BreuilFrame::new(&d, 3).unwrap();
    let r = f.series();
    let mut g = rng(9);
    let u1 = loop {
        let u = r.random(&mut g);
        if r.is_unit(&u) {
            break u;
        }
    };
    let u2 = loop {
        let u = r.random(&mut g);
        if r.is_unit(&u) {
            break u;
        }
    };
    // F --(u1)--> F and F --(u2)--> F realized through twisted sources
    let t1 = TwistedFrame::new(&f, u1.clone()).unwrap();
    let h1 = ScaledIdentity { base: &f, twisted: &t1 };
    assert_passes(&validate_frame(&t1, &mut rng(1), 10), "twisted");
    assert_passes(&validate_hom(&h1, &mut rng(2), 10), "u-hom");

    // factor h1 = omega alpha' with alpha' strict
    let tw = TwistedFrame::new(&f, h1.unit()).unwrap();
    let strict = StrictPart { hom: &h1, twisted: &tw };
    let omega = TwistHom { twisted: &tw };
    let rep = validate_hom(&strict, &mut rng(3), 10);
    assert_passes(&rep, "strict part");
    assert_eq!(strict.unit(), r.one());
    assert_passes(&validate_hom(&omega, &mut rng(4), 10), "twist");
    let comp = Composite { first: &strict, second: &omega };
    assert_eq!(comp.unit(), h1.unit());
    for _ in 0..10 {
        let x = r.random(&mut g);
        assert_eq!(comp.map(&x), h1.map(&x));
    }

    // u_(beta alpha) = beta(u_alpha) u_beta
    let proj_lo = BreuilFrame::new(&d, 2).unwrap();
    let beta = BreuilProjection { src: &f, dst: &proj_lo };
    let c = Composite { first: &h1, second: &beta };
    assert_eq!(c.unit(), proj_lo.series().mul(&beta.map(&u1), &beta.unit()));
    let _ = u2;
}
