//! Frames (S, I, R, sigma, sigma_1) with theta, the concrete frames over the
//! base tower and over Witt vectors, and frame homomorphisms.

use std::fmt::Debug;

use rand::RngCore;

use crate::base_rings::{Level, QElem, QuotientRing, RingDesc, Series, SeriesRing};
use crate::error::{Error, Result};
use crate::report::{Check, Report};
use crate::ring::Ring;
use crate::witt::{WittRing, WittVec};

pub type El<F> = <<F as Frame>::R as Ring>::Elem;

pub trait Frame {
    type R: Ring;
    type Ideal: Clone + Debug + PartialEq;

    fn ring(&self) -> &Self::R;
    fn name(&self) -> String;
    fn sigma(&self, x: &El<Self>) -> El<Self>;
    fn sigma1(&self, a: &Self::Ideal) -> El<Self>;
    fn embed(&self, a: &Self::Ideal) -> El<Self>;
    fn theta(&self) -> El<Self>;
    fn ideal_zero(&self) -> Self::Ideal;
    fn ideal_add(&self, a: &Self::Ideal, b: &Self::Ideal) -> Self::Ideal;
    fn ideal_neg(&self, a: &Self::Ideal) -> Self::Ideal;
    fn ideal_scale(&self, s: &El<Self>, a: &Self::Ideal) -> Self::Ideal;
    /// Membership test returning a representative.
    fn to_ideal(&self, x: &El<Self>) -> Option<Self::Ideal>;
    /// Pairs (s_i, a_i) with sum s_i sigma_1(a_i) = 1.
    fn unit_witness(&self) -> Vec<(El<Self>, Self::Ideal)>;
    /// The map S -> S/m = F_p for the maximal ideal m (the ideal of
    /// definition used for nilpotence).
    fn residue(&self, x: &El<Self>) -> u64;
    fn random_ideal(&self, rng: &mut dyn RngCore) -> Self::Ideal;
    /// Pairs (x, h) with the claim sigma(x) - x^p = p h, on a set of additive
    /// generators of S (the defect is additive mod p).
    fn frobenius_defects(&self, rng: &mut dyn RngCore) -> Vec<(El<Self>, El<Self>)>;
    /// Generalised frames drop the requirement that sigma_1(I) generates S.
    fn generalised(&self) -> bool {
        false
    }

    fn ideal_sub(&self, a: &Self::Ideal, b: &Self::Ideal) -> Self::Ideal {
        self.ideal_add(a, &self.ideal_neg(b))
    }

    /// theta = sum s_i sigma(a_i) from the unit witness.
    fn compute_theta(&self) -> Result<El<Self>> {
        let w = self.unit_witness();
        if w.is_empty() {
            return Err(Error::InvalidDesc(format!("{} has no unit witness", self.name())));
        }
        let r = self.ring();
        Ok(w.iter().fold(r.zero(), |acc, (s, a)| r.add(&acc, &r.mul(s, &self.sigma(&self.embed(a))))))
    }
}

pub fn validate_frame<F: Frame>(f: &F, rng: &mut dyn RngCore, samples: usize) -> Report {
    let s = f.ring();
    let mut rep = Report::default();
    let p = f.ring().from_u64(f.ring().prime());

    let ideals: Vec<F::Ideal> = (0..samples).map(|_| f.random_ideal(rng)).collect();
    let elems: Vec<El<F>> = (0..samples).map(|_| s.random(rng)).collect();

    let rad = f.residue(&p) == 0 && ideals.iter().all(|a| f.residue(&f.embed(a)) == 0);
    rep.push(Check::new("radical", "I + pS lies in the Jacobson radical of S", rad));

    let mut hom = s.eq(&f.sigma(&s.one()), &s.one());
    for w in elems.windows(2) {
        hom &= s.eq(&f.sigma(&s.mul(&w[0], &w[1])), &s.mul(&f.sigma(&w[0]), &f.sigma(&w[1])));
        hom &= s.eq(&f.sigma(&s.add(&w[0], &w[1])), &s.add(&f.sigma(&w[0]), &f.sigma(&w[1])));
    }
    rep.push(Check::new("sigma-ring-hom", "sigma is a ring endomorphism", hom));

    let defects = f.frobenius_defects(rng);
    let p_elem = s.from_u64(s.prime());
    let lift = defects.iter().all(|(x, h)| {
        s.eq(&s.sub(&f.sigma(x), &s.pow(x, s.prime())), &s.mul(&p_elem, h))
    });
    rep.push(
        Check::new("sigma-frobenius-lift", "sigma(x) = x^p mod pS on additive generators", lift)
            .with_witness(format!("{} generators", defects.len())),
    );

    if !f.generalised() {
        let w = f.unit_witness();
        let total = w.iter().fold(s.zero(), |acc, (c, a)| s.add(&acc, &s.mul(c, &f.sigma1(a))));
        rep.push(
            Check::new("sigma1-generates", "sigma_1(I) generates S as an S-module", s.eq(&total, &s.one()))
                .with_witness(format!("{} term(s)", w.len())),
        );
    }

    let theta = f.theta();
    if !f.generalised() {
        let ok = f.compute_theta().map(|t| s.eq(&t, &theta)).unwrap_or(false);
        rep.push(Check::new("theta-witness", "theta = sum s_i sigma(a_i) for the unit witness", ok));
    }
    // J = maximal ideal: sigma(J) + I + theta S lies in J. A generalised
    // frame may have a unit theta and then has no ideal of definition.
    if !f.generalised() {
        let def = f.residue(&theta) == 0
            && elems.iter().all(|x| f.residue(&f.sigma(x)) == f.residue(x));
        rep.push(Check::new("ideal-of-definition", "sigma(J) + I + theta S lies in J for J maximal", def));
    }
    let rel = ideals.iter().all(|a| s.eq(&f.sigma(&f.embed(a)), &s.mul(&theta, &f.sigma1(a))));
    rep.push(Check::new("theta-relation", "sigma(a) = theta sigma_1(a) for a in I", rel));

    let mut lin = true;
    for (a, (b, c)) in ideals.iter().zip(ideals.iter().skip(1).zip(&elems)) {
        lin &= s.eq(&f.sigma1(&f.ideal_scale(c, a)), &s.mul(&f.sigma(c), &f.sigma1(a)));
        lin &= s.eq(&f.sigma1(&f.ideal_add(a, b)), &s.add(&f.sigma1(a), &f.sigma1(b)));
    }
    rep.push(Check::new("sigma1-semilinear", "sigma_1(s a) = sigma(s) sigma_1(a), sigma_1 additive", lin));
    rep
}

/// Whether tau(theta) is a unit, the condition for the canonical map into
/// the Witt frame to exist.
pub fn validate_kappa_frame(level: &Level, theta: &Series) -> Result<Check> {
    let t = level.tau(theta)?;
    let ok = level.ring.is_unit(&t);
    Ok(Check::new("tau-theta-unit", "tau(theta) is a unit of S", ok)
        .with_witness(format!("tau(theta) constant term {}", t.0[0])))
}

fn sigma_over_p(level: &Level, padded: &Level, z: &Series) -> Series {
    let zl = level.ring.transfer(z, &padded.ring);
    let s = padded.sigma(&zl);
    let q = padded.ring.div_p_power(&s, 1).expect("sigma of the kernel is divisible by p");
    padded.ring.transfer(&q, &level.ring)
}

/// Generator of a principal frame ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Generator {
    E,
    PPower(u32),
}

/// The frame (S_a, E S_a, R_a, sigma, sigma_1) with sigma_1(E y) = sigma(y)
/// and theta = sigma(E). Ideal elements are carried by their cofactor y.
#[derive(Clone, Debug)]
pub struct BreuilFrame {
    pub level: Level,
    padded: Level,
    pub quotient: Option<QuotientRing>,
    generator: Generator,
}

impl BreuilFrame {
    pub fn new(desc: &RingDesc, a: usize) -> Result<Self> {
        desc.validate()?;
        let level = Level::new(desc, a, desc.n)?;
        let padded = level.at_precision(desc.n + 1)?;
        Ok(BreuilFrame { level, padded, quotient: Some(QuotientRing::new(desc, a)?), generator: Generator::E })
    }

    /// The frame with ideal p^k S, sigma_1(p^k y) = sigma(y), theta = p^k.
    pub fn principal_p_power(desc: &RingDesc, a: usize, k: u32) -> Result<Self> {
        let level = Level::new(desc, a, desc.n)?;
        let padded = level.at_precision(desc.n + 1)?;
        Ok(BreuilFrame { level, padded, quotient: None, generator: Generator::PPower(k) })
    }

    pub fn a(&self) -> usize {
        self.level.a()
    }

    pub fn series(&self) -> &SeriesRing {
        &self.level.ring
    }

    pub fn generator(&self) -> Series {
        match self.generator {
            Generator::E => self.level.e.clone(),
            Generator::PPower(k) => self.level.ring.from_u64(self.level.p().pow(k)),
        }
    }

    pub fn padded(&self) -> &Level {
        &self.padded
    }
}

impl Frame for BreuilFrame {
    type R = SeriesRing;
    type Ideal = Series;

    fn ring(&self) -> &SeriesRing {
        &self.level.ring
    }
    fn name(&self) -> String {
        format!("B_{}", self.a())
    }
    fn sigma(&self, x: &Series) -> Series {
        self.level.sigma(x)
    }
    fn sigma1(&self, y: &Series) -> Series {
        self.level.sigma(y)
    }
    fn embed(&self, y: &Series) -> Series {
        self.level.ring.mul(&self.generator(), y)
    }
    fn theta(&self) -> Series {
        self.level.sigma(&self.generator())
    }
    fn ideal_zero(&self) -> Series {
        self.level.ring.zero()
    }
    fn ideal_add(&self, a: &Series, b: &Series) -> Series {
        self.level.ring.add(a, b)
    }
    fn ideal_neg(&self, a: &Series) -> Series {
        self.level.ring.neg(a)
    }
    fn ideal_scale(&self, s: &Series, a: &Series) -> Series {
        self.level.ring.mul(s, a)
    }
    fn to_ideal(&self, x: &Series) -> Option<Series> {
        match self.generator {
            Generator::E => self.level.exact_div_e(x).ok(),
            Generator::PPower(k) => self.level.ring.div_p_power(x, k).ok(),
        }
    }
    fn unit_witness(&self) -> Vec<(Series, Series)> {
        vec![(self.level.ring.one(), self.level.ring.one())]
    }
    fn residue(&self, x: &Series) -> u64 {
        x.0[0] % self.level.p()
    }
    fn random_ideal(&self, rng: &mut dyn RngCore) -> Series {
        self.level.ring.random(rng)
    }
    fn frobenius_defects(&self, rng: &mut dyn RngCore) -> Vec<(Series, Series)> {
        let r = &self.level.ring;
        let mut gens: Vec<Series> = (0..r.dim()).map(|i| r.basis_element(i)).collect();
        gens.extend((0..4).map(|_| r.random(rng)));
        gens.into_iter()
            .map(|x| {
                let h = self.level.tau(&x).expect("tau on the base ring");
                (x, h)
            })
            .collect()
    }
}

/// An element of the ideal of the relative frame on S_{a+1} over R_a:
/// E y + z with z in J^a.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelIdeal {
    pub y: Series,
    pub z: Series,
}

/// The relative frame (S_{a+1}, I~, R_a, sigma, sigma~_1) where I~ is the
/// kernel of S_{a+1} -> R_a and sigma~_1(E y + z) = sigma(y) + sigma(z)/p.
/// With `with_top_precision` the ring becomes S_{a+1} / p^c J^a.
#[derive(Clone, Debug)]
pub struct RelativeBreuilFrame {
    pub level: Level,
    padded: Level,
    pub quotient_low: QuotientRing,
    pub quotient_high: QuotientRing,
    top_precision: Option<u32>,
}

impl RelativeBreuilFrame {
    /// The relative frame on S_{a+1} over R_a; `a_plus_1` is the level of S.
    pub fn new(desc: &RingDesc, a_plus_1: usize) -> Result<Self> {
        desc.validate()?;
        if a_plus_1 < 2 {
            return Err(Error::InvalidDesc("relative frame needs level >= 2".into()));
        }
        let level = Level::new(desc, a_plus_1, desc.n)?;
        let padded = level.at_precision(desc.n + 1)?;
        Ok(RelativeBreuilFrame {
            level,
            padded,
            quotient_low: QuotientRing::new(desc, a_plus_1 - 1)?,
            quotient_high: QuotientRing::new(desc, a_plus_1)?,
            top_precision: None,
        })
    }

    /// The quotient frame on S_{a+1} / p^c J^a.
    pub fn with_top_precision(&self, c: u32) -> Result<Self> {
        let ring = self.level.ring.with_top_precision(c)?;
        let level = Level::with_ring(&self.level.desc, ring)?;
        let pring = self.padded.ring.with_top_precision(c + 1)?;
        let padded = Level::with_ring(&self.level.desc, pring)?;
        Ok(RelativeBreuilFrame { level, padded, top_precision: Some(c), ..self.clone() })
    }

    pub fn top_precision(&self) -> Option<u32> {
        self.top_precision
    }

    pub fn a(&self) -> usize {
        self.level.a() - 1
    }

    pub fn series(&self) -> &SeriesRing {
        &self.level.ring
    }

    pub fn sigma_over_p(&self, z: &Series) -> Series {
        sigma_over_p(&self.level, &self.padded, z)
    }

    pub fn in_kernel(&self, z: &Series) -> bool {
        self.level.ring.in_j_power(z, self.a() as u32)
    }

    /// On each monomial m of degree a, E m = p m lies in J^a and both
    /// representations (m, 0) and (0, p m) give the same sigma~_1.
    pub fn well_definedness(&self) -> Check {
        let r = &self.level.ring;
        let top = self.a() as u32;
        let mut ok = true;
        let mut count = 0;
        for (i, d) in r.basis().degrees.iter().enumerate() {
            if *d != top {
                continue;
            }
            count += 1;
            let m = r.basis_element(i);
            let pm = r.scalar_mul(self.level.p(), &m);
            let em = r.mul(&self.level.e, &m);
            let lifted = r.transfer(&m, &self.padded.ring);
            ok &= r.eq(&em, &pm)
                && self.padded.ring.divisible_by_p_power(&self.padded.sigma(&lifted), 1)
                && r.eq(&self.level.sigma(&m), &self.sigma_over_p(&pm));
        }
        Check::new("relative-well-defined", "sigma~_1 agrees on E S meet J^a = E J^a", ok)
            .with_witness(format!("{count} monomial generator(s)"))
    }
}

impl Frame for RelativeBreuilFrame {
    type R = SeriesRing;
    type Ideal = RelIdeal;

    fn ring(&self) -> &SeriesRing {
        &self.level.ring
    }
    fn name(&self) -> String {
        format!("B~_{}", self.level.a())
    }
    fn sigma(&self, x: &Series) -> Series {
        self.level.sigma(x)
    }
    fn sigma1(&self, i: &RelIdeal) -> Series {
        self.level.ring.add(&self.level.sigma(&i.y), &self.sigma_over_p(&i.z))
    }
    fn embed(&self, i: &RelIdeal) -> Series {
        self.level.ring.add(&self.level.ring.mul(&self.level.e, &i.y), &i.z)
    }
    fn theta(&self) -> Series {
        self.level.theta()
    }
    fn ideal_zero(&self) -> RelIdeal {
        RelIdeal { y: self.level.ring.zero(), z: self.level.ring.zero() }
    }
    fn ideal_add(&self, a: &RelIdeal, b: &RelIdeal) -> RelIdeal {
        let r = &self.level.ring;
        RelIdeal { y: r.add(&a.y, &b.y), z: r.add(&a.z, &b.z) }
    }
    fn ideal_neg(&self, a: &RelIdeal) -> RelIdeal {
        let r = &self.level.ring;
        RelIdeal { y: r.neg(&a.y), z: r.neg(&a.z) }
    }
    fn ideal_scale(&self, s: &Series, a: &RelIdeal) -> RelIdeal {
        let r = &self.level.ring;
        RelIdeal { y: r.mul(s, &a.y), z: r.mul(s, &a.z) }
    }
    fn to_ideal(&self, x: &Series) -> Option<RelIdeal> {
        let (nf, y) = self.level.divide_by_e(x);
        self.in_kernel(&nf).then_some(RelIdeal { y, z: nf })
    }
    fn unit_witness(&self) -> Vec<(Series, RelIdeal)> {
        let r = &self.level.ring;
        vec![(r.one(), RelIdeal { y: r.one(), z: r.zero() })]
    }
    fn residue(&self, x: &Series) -> u64 {
        x.0[0] % self.level.p()
    }
    fn random_ideal(&self, rng: &mut dyn RngCore) -> RelIdeal {
        let r = &self.level.ring;
        let z = r.random(rng);
        let top = self.a() as u32;
        let z = Series(
            z.0.iter().zip(&r.basis().degrees).map(|(c, d)| if *d >= top { *c } else { 0 }).collect(),
        );
        RelIdeal { y: r.random(rng), z }
    }
    fn frobenius_defects(&self, rng: &mut dyn RngCore) -> Vec<(Series, Series)> {
        let r = &self.level.ring;
        let mut gens: Vec<Series> = (0..r.dim()).map(|i| r.basis_element(i)).collect();
        gens.extend((0..4).map(|_| r.random(rng)));
        gens.into_iter()
            .map(|x| {
                let xp = r.transfer(&x, &self.padded.ring);
                let h = self.padded.tau_k(&xp, 1).expect("tau on the base ring");
                (x, self.padded.ring.transfer(&h, r))
            })
            .collect()
    }
}

/// The truncated Witt frame (W_n(R), I_R, R, F, f_1) with theta = p.
#[derive(Clone, Debug)]
pub struct WittFrame {
    pub quotient: QuotientRing,
    pub witt: WittRing<QuotientRing>,
}

pub type WittElem = WittVec<QElem>;

impl WittFrame {
    pub fn new(desc: &RingDesc, a: usize, n: usize) -> Result<Self> {
        let quotient = QuotientRing::new(desc, a)?;
        let witt = WittRing::new(quotient.clone(), n)?;
        Ok(WittFrame { quotient, witt })
    }

    pub fn a(&self) -> usize {
        self.quotient.a()
    }

    pub fn n(&self) -> usize {
        self.witt.length()
    }

    pub fn v_one(&self) -> WittElem {
        let w = &self.witt;
        w.verschiebung(&w.truncate(&w.one(), w.length() - 1))
    }
}

fn witt_defects(w: &WittRing<QuotientRing>, rng: &mut dyn RngCore) -> Vec<(WittElem, WittElem)> {
    let q = w.base();
    let p = q.prime();
    let n = w.length();
    let mut out = Vec::new();
    for _ in 0..4 {
        let c = q.random(rng);
        out.push((w.teichmuller(&c), w.zero()));
        if n >= 2 {
            // F(V y) - (V y)^p = p (y - p^(p-2) V(y^p))
            let y = w.random_len(n - 1, rng);
            let vy = w.verschiebung(&y);
            let corr = w.mul(&w.int(p.pow(p as u32 - 2) as i64), &w.verschiebung(&w.truncate(&w.pow(&y, p), n - 1)));
            out.push((vy, w.sub(&y, &corr)));
        }
    }
    out
}

impl Frame for WittFrame {
    type R = WittRing<QuotientRing>;
    type Ideal = WittElem;

    fn ring(&self) -> &Self::R {
        &self.witt
    }
    fn name(&self) -> String {
        format!("D_(R_{},{})", self.a(), self.n())
    }
    fn sigma(&self, x: &WittElem) -> WittElem {
        self.witt.frobenius(x)
    }
    fn sigma1(&self, a: &WittElem) -> WittElem {
        self.witt.f1(a).expect("ideal elements have vanishing 0th coordinate")
    }
    fn embed(&self, a: &WittElem) -> WittElem {
        a.clone()
    }
    fn theta(&self) -> WittElem {
        self.witt.int(self.witt.prime() as i64)
    }
    fn ideal_zero(&self) -> WittElem {
        self.witt.zero()
    }
    fn ideal_add(&self, a: &WittElem, b: &WittElem) -> WittElem {
        self.witt.add(a, b)
    }
    fn ideal_neg(&self, a: &WittElem) -> WittElem {
        self.witt.neg(a)
    }
    fn ideal_scale(&self, s: &WittElem, a: &WittElem) -> WittElem {
        self.witt.mul(s, a)
    }
    fn to_ideal(&self, x: &WittElem) -> Option<WittElem> {
        self.witt.in_ideal(x).then(|| x.clone())
    }
    fn unit_witness(&self) -> Vec<(WittElem, WittElem)> {
        vec![(self.witt.one(), self.v_one())]
    }
    fn residue(&self, x: &WittElem) -> u64 {
        self.quotient.residue(&x.0[0])
    }
    fn random_ideal(&self, rng: &mut dyn RngCore) -> WittElem {
        let w = &self.witt;
        w.verschiebung(&w.random_len(w.length() - 1, rng))
    }
    fn frobenius_defects(&self, rng: &mut dyn RngCore) -> Vec<(WittElem, WittElem)> {
        witt_defects(&self.witt, rng)
    }
}

/// The relative Witt frame (W_n(R), I~, R', F, f~_1) for R = R_{a+1} over
/// R' = R_a, with kernel b = m^a (square-zero, p b = 0). Ideal elements are
/// Witt vectors whose 0th coordinate lies in b, and f~_1(c) = f_1(c - [c_0]).
#[derive(Clone, Debug)]
pub struct RelativeWittFrame {
    pub quotient: QuotientRing,
    pub quotient_low: QuotientRing,
    pub witt: WittRing<QuotientRing>,
}

impl RelativeWittFrame {
    pub fn new(desc: &RingDesc, a_plus_1: usize, n: usize) -> Result<Self> {
        if a_plus_1 < 2 {
            return Err(Error::InvalidDesc("relative frame needs level >= 2".into()));
        }
        let quotient = QuotientRing::new(desc, a_plus_1)?;
        let witt = WittRing::new(quotient.clone(), n)?;
        Ok(RelativeWittFrame { quotient, quotient_low: QuotientRing::new(desc, a_plus_1 - 1)?, witt })
    }

    pub fn n(&self) -> usize {
        self.witt.length()
    }

    /// Membership in the square-zero ideal b = m^a of R_{a+1}.
    pub fn in_b(&self, x: &QElem) -> bool {
        self.quotient.in_degree_at_least(x, self.quotient_low.a() as u32)
    }

    pub fn in_kernel(&self, x: &WittElem) -> bool {
        x.0.iter().all(|c| self.in_b(c))
    }

    pub fn v_one(&self) -> WittElem {
        let w = &self.witt;
        w.verschiebung(&w.truncate(&w.one(), w.length() - 1))
    }

    pub fn random_kernel(&self, rng: &mut dyn RngCore) -> WittElem {
        let k = self.quotient_low.a() as u32;
        WittVec(
            (0..self.n())
                .map(|_| {
                    let c = self.quotient.random(rng);
                    QElem(
                        c.0.iter()
                            .zip(&self.quotient.basis().degrees)
                            .map(|(v, d)| if *d >= k { *v } else { 0 })
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}

impl Frame for RelativeWittFrame {
    type R = WittRing<QuotientRing>;
    type Ideal = WittElem;

    fn ring(&self) -> &Self::R {
        &self.witt
    }
    fn name(&self) -> String {
        format!("D_(R_{}/R_{},{})", self.quotient.a(), self.quotient_low.a(), self.n())
    }
    fn sigma(&self, x: &WittElem) -> WittElem {
        self.witt.frobenius(x)
    }
    fn sigma1(&self, c: &WittElem) -> WittElem {
        let w = &self.witt;
        let t = w.teichmuller_len(&c.0[0], c.len());
        w.f1(&w.sub(c, &t)).expect("c - [c_0] lies in I_R")
    }
    fn embed(&self, a: &WittElem) -> WittElem {
        a.clone()
    }
    fn theta(&self) -> WittElem {
        self.witt.int(self.witt.prime() as i64)
    }
    fn ideal_zero(&self) -> WittElem {
        self.witt.zero()
    }
    fn ideal_add(&self, a: &WittElem, b: &WittElem) -> WittElem {
        self.witt.add(a, b)
    }
    fn ideal_neg(&self, a: &WittElem) -> WittElem {
        self.witt.neg(a)
    }
    fn ideal_scale(&self, s: &WittElem, a: &WittElem) -> WittElem {
        self.witt.mul(s, a)
    }
    fn to_ideal(&self, x: &WittElem) -> Option<WittElem> {
        x.0.first().map_or(true, |c| self.in_b(c)).then(|| x.clone())
    }
    fn unit_witness(&self) -> Vec<(WittElem, WittElem)> {
        vec![(self.witt.one(), self.v_one())]
    }
    fn residue(&self, x: &WittElem) -> u64 {
        self.quotient.residue(&x.0[0])
    }
    fn random_ideal(&self, rng: &mut dyn RngCore) -> WittElem {
        let w = &self.witt;
        let base = w.verschiebung(&w.random_len(w.length() - 1, rng));
        w.add(&base, &self.random_kernel(rng))
    }
    fn frobenius_defects(&self, rng: &mut dyn RngCore) -> Vec<(WittElem, WittElem)> {
        witt_defects(&self.witt, rng)
    }
}

/// A homomorphism of frames alpha: F -> F' with unit u, so that
/// sigma'_1(alpha(a)) = u alpha(sigma_1(a)) and alpha(theta) = u theta'.
pub trait FrameHom {
    type Src: Frame;
    type Dst: Frame;

    fn source(&self) -> &Self::Src;
    fn target(&self) -> &Self::Dst;
    fn map(&self, x: &El<Self::Src>) -> El<Self::Dst>;
    fn map_ideal(&self, a: &<Self::Src as Frame>::Ideal) -> <Self::Dst as Frame>::Ideal;
    fn unit(&self) -> El<Self::Dst>;
}

pub fn validate_hom<H: FrameHom>(h: &H, rng: &mut dyn RngCore, samples: usize) -> Report {
    let (f, g) = (h.source(), h.target());
    let (s, t) = (f.ring(), g.ring());
    let mut rep = Report::default();
    let u = h.unit();
    let elems: Vec<El<H::Src>> = (0..samples).map(|_| s.random(rng)).collect();
    let ideals: Vec<<H::Src as Frame>::Ideal> = (0..samples).map(|_| f.random_ideal(rng)).collect();

    let mut ring_hom = t.eq(&h.map(&s.one()), &t.one());
    for w in elems.windows(2) {
        ring_hom &= t.eq(&h.map(&s.mul(&w[0], &w[1])), &t.mul(&h.map(&w[0]), &h.map(&w[1])));
        ring_hom &= t.eq(&h.map(&s.add(&w[0], &w[1])), &t.add(&h.map(&w[0]), &h.map(&w[1])));
    }
    rep.push(Check::new("hom-ring-map", "alpha is a ring homomorphism", ring_hom));

    let sig = elems.iter().all(|x| t.eq(&g.sigma(&h.map(x)), &h.map(&f.sigma(x))));
    rep.push(Check::new("hom-sigma", "sigma' alpha = alpha sigma", sig));

    let ideal = ideals.iter().all(|a| t.eq(&g.embed(&h.map_ideal(a)), &h.map(&f.embed(a))));
    rep.push(Check::new("hom-ideal", "alpha(I) lies in I'", ideal));

    let s1 = ideals
        .iter()
        .all(|a| t.eq(&g.sigma1(&h.map_ideal(a)), &t.mul(&u, &h.map(&f.sigma1(a)))));
    rep.push(Check::new("hom-sigma1", "sigma'_1 alpha = u alpha sigma_1 on I", s1));

    let th = t.eq(&h.map(&f.theta()), &t.mul(&u, &g.theta()));
    rep.push(Check::new("hom-theta", "alpha(theta) = u theta'", th));
    rep.push(Check::new("hom-unit", "u is a unit", t.is_unit(&u)));
    rep
}

/// The composite beta alpha, with unit beta(u_alpha) u_beta.
pub struct Composite<'a, A: FrameHom, B: FrameHom<Src = A::Dst>> {
    pub first: &'a A,
    pub second: &'a B,
}

impl<A: FrameHom, B: FrameHom<Src = A::Dst>> FrameHom for Composite<'_, A, B> {
    type Src = A::Src;
    type Dst = B::Dst;
    fn source(&self) -> &A::Src {
        self.first.source()
    }
    fn target(&self) -> &B::Dst {
        self.second.target()
    }
    fn map(&self, x: &El<A::Src>) -> El<B::Dst> {
        self.second.map(&self.first.map(x))
    }
    fn map_ideal(&self, a: &<A::Src as Frame>::Ideal) -> <B::Dst as Frame>::Ideal {
        self.second.map_ideal(&self.first.map_ideal(a))
    }
    fn unit(&self) -> El<B::Dst> {
        let t = self.second.target().ring();
        t.mul(&self.second.map(&self.first.unit()), &self.second.unit())
    }
}

/// The strict part alpha': F -> F'' of a u-homomorphism, F'' the twisted target.
pub struct StrictPart<'a, H: FrameHom> {
    pub hom: &'a H,
    pub twisted: &'a TwistedFrame<'a, H::Dst>,
}

impl<'a, H: FrameHom> FrameHom for StrictPart<'a, H> {
    type Src = H::Src;
    type Dst = TwistedFrame<'a, H::Dst>;
    fn source(&self) -> &H::Src {
        self.hom.source()
    }
    fn target(&self) -> &TwistedFrame<'a, H::Dst> {
        self.twisted
    }
    fn map(&self, x: &El<H::Src>) -> El<H::Dst> {
        self.hom.map(x)
    }
    fn map_ideal(&self, a: &<H::Src as Frame>::Ideal) -> <H::Dst as Frame>::Ideal {
        self.hom.map_ideal(a)
    }
    fn unit(&self) -> El<H::Dst> {
        self.hom.target().ring().one()
    }
}

/// The identity of S' viewed as a u-homomorphism F'' -> F'.
pub struct TwistHom<'a, F: Frame> {
    pub twisted: &'a TwistedFrame<'a, F>,
}

impl<'a, F: Frame> FrameHom for TwistHom<'a, F> {
    type Src = TwistedFrame<'a, F>;
    type Dst = F;
    fn source(&self) -> &TwistedFrame<'a, F> {
        self.twisted
    }
    fn target(&self) -> &F {
        self.twisted.base
    }
    fn map(&self, x: &El<F>) -> El<F> {
        x.clone()
    }
    fn map_ideal(&self, a: &F::Ideal) -> F::Ideal {
        a.clone()
    }
    fn unit(&self) -> El<F> {
        self.twisted.u.clone()
    }
}

/// S_{a+1}-level frame B_{a+1} -> B_a (reduction mod J^a).
pub struct BreuilProjection<'a> {
    pub src: &'a BreuilFrame,
    pub dst: &'a BreuilFrame,
}

impl FrameHom for BreuilProjection<'_> {
    type Src = BreuilFrame;
    type Dst = BreuilFrame;
    fn source(&self) -> &BreuilFrame {
        self.src
    }
    fn target(&self) -> &BreuilFrame {
        self.dst
    }
    fn map(&self, x: &Series) -> Series {
        self.src.series().transfer(x, self.dst.series())
    }
    fn map_ideal(&self, y: &Series) -> Series {
        self.map(y)
    }
    fn unit(&self) -> Series {
        self.dst.series().one()
    }
}

/// B_{a+1} -> B~_{a+1}: identity on S_{a+1}, E y -> (y, 0).
pub struct RelativeInclusion<'a> {
    pub src: &'a BreuilFrame,
    pub dst: &'a RelativeBreuilFrame,
}

impl FrameHom for RelativeInclusion<'_> {
    type Src = BreuilFrame;
    type Dst = RelativeBreuilFrame;
    fn source(&self) -> &BreuilFrame {
        self.src
    }
    fn target(&self) -> &RelativeBreuilFrame {
        self.dst
    }
    fn map(&self, x: &Series) -> Series {
        self.src.series().transfer(x, self.dst.series())
    }
    fn map_ideal(&self, y: &Series) -> RelIdeal {
        RelIdeal { y: self.map(y), z: self.dst.series().zero() }
    }
    fn unit(&self) -> Series {
        self.dst.series().one()
    }
}

/// B~_{a+1} -> B_a: reduction mod J^a, killing the J^a part of the ideal.
pub struct RelativeProjection<'a> {
    pub src: &'a RelativeBreuilFrame,
    pub dst: &'a BreuilFrame,
}

impl FrameHom for RelativeProjection<'_> {
    type Src = RelativeBreuilFrame;
    type Dst = BreuilFrame;
    fn source(&self) -> &RelativeBreuilFrame {
        self.src
    }
    fn target(&self) -> &BreuilFrame {
        self.dst
    }
    fn map(&self, x: &Series) -> Series {
        self.src.series().transfer(x, self.dst.series())
    }
    fn map_ideal(&self, i: &RelIdeal) -> Series {
        self.map(&i.y)
    }
    fn unit(&self) -> Series {
        self.dst.series().one()
    }
}

/// W_n(R_{a+1}) -> W_n(R_a) coordinatewise, as a map of (relative) Witt frames.
pub struct WittProjection<'a, F: Frame<R = WittRing<QuotientRing>, Ideal = WittElem>> {
    pub src: &'a F,
    pub src_quotient: &'a QuotientRing,
    pub dst: &'a WittFrame,
}

impl<F: Frame<R = WittRing<QuotientRing>, Ideal = WittElem>> FrameHom for WittProjection<'_, F> {
    type Src = F;
    type Dst = WittFrame;
    fn source(&self) -> &F {
        self.src
    }
    fn target(&self) -> &WittFrame {
        self.dst
    }
    fn map(&self, x: &WittElem) -> WittElem {
        WittVec(x.0.iter().map(|c| self.src_quotient.project(c, &self.dst.quotient)).collect())
    }
    fn map_ideal(&self, x: &WittElem) -> WittElem {
        self.map(x)
    }
    fn unit(&self) -> WittElem {
        self.dst.witt.one()
    }
}

/// The frame F'' = (S', I', R', sigma', u^(-1) sigma'_1) through which a
/// u-homomorphism factors as a strict map followed by the identity of S'.
pub struct TwistedFrame<'a, F: Frame> {
    pub base: &'a F,
    pub u: El<F>,
    pub u_inv: El<F>,
}

impl<'a, F: Frame> TwistedFrame<'a, F> {
    pub fn new(base: &'a F, u: El<F>) -> Result<Self> {
        let u_inv = base.ring().try_inv(&u)?;
        Ok(TwistedFrame { base, u, u_inv })
    }
}

impl<F: Frame> Frame for TwistedFrame<'_, F> {
    type R = F::R;
    type Ideal = F::Ideal;
    fn ring(&self) -> &F::R {
        self.base.ring()
    }
    fn name(&self) -> String {
        format!("{}(twisted)", self.base.name())
    }
    fn sigma(&self, x: &El<F>) -> El<F> {
        self.base.sigma(x)
    }
    fn sigma1(&self, a: &F::Ideal) -> El<F> {
        self.base.ring().mul(&self.u_inv, &self.base.sigma1(a))
    }
    fn embed(&self, a: &F::Ideal) -> El<F> {
        self.base.embed(a)
    }
    fn theta(&self) -> El<F> {
        self.base.ring().mul(&self.u, &self.base.theta())
    }
    fn ideal_zero(&self) -> F::Ideal {
        self.base.ideal_zero()
    }
    fn ideal_add(&self, a: &F::Ideal, b: &F::Ideal) -> F::Ideal {
        self.base.ideal_add(a, b)
    }
    fn ideal_neg(&self, a: &F::Ideal) -> F::Ideal {
        self.base.ideal_neg(a)
    }
    fn ideal_scale(&self, s: &El<F>, a: &F::Ideal) -> F::Ideal {
        self.base.ideal_scale(s, a)
    }
    fn to_ideal(&self, x: &El<F>) -> Option<F::Ideal> {
        self.base.to_ideal(x)
    }
    fn unit_witness(&self) -> Vec<(El<F>, F::Ideal)> {
        let r = self.base.ring();
        self.base.unit_witness().into_iter().map(|(s, a)| (r.mul(&s, &self.u), a)).collect()
    }
    fn residue(&self, x: &El<F>) -> u64 {
        self.base.residue(x)
    }
    fn random_ideal(&self, rng: &mut dyn RngCore) -> F::Ideal {
        self.base.random_ideal(rng)
    }
    fn frobenius_defects(&self, rng: &mut dyn RngCore) -> Vec<(El<F>, El<F>)> {
        self.base.frobenius_defects(rng)
    }
}

/// A generalised frame: the base frame with sigma_1 scaled by a non-unit s
/// and theta replaced by theta' with theta = theta' s. sigma_1(I) then need
/// not generate S.
pub struct GeneralisedFrame<'a, F: Frame> {
    pub base: &'a F,
    pub scale: El<F>,
    pub theta: El<F>,
}

impl<'a, F: Frame> GeneralisedFrame<'a, F> {
    pub fn new(base: &'a F, scale: El<F>, theta: El<F>) -> Result<Self> {
        let r = base.ring();
        if !r.eq(&r.mul(&theta, &scale), &base.theta()) {
            return Err(Error::InvalidDesc("theta' s must equal theta".into()));
        }
        Ok(GeneralisedFrame { base, scale, theta })
    }
}

impl<F: Frame> Frame for GeneralisedFrame<'_, F> {
    type R = F::R;
    type Ideal = F::Ideal;
    fn ring(&self) -> &F::R {
        self.base.ring()
    }
    fn name(&self) -> String {
        format!("{}(generalised)", self.base.name())
    }
    fn sigma(&self, x: &El<F>) -> El<F> {
        self.base.sigma(x)
    }
    fn sigma1(&self, a: &F::Ideal) -> El<F> {
        self.base.ring().mul(&self.scale, &self.base.sigma1(a))
    }
    fn embed(&self, a: &F::Ideal) -> El<F> {
        self.base.embed(a)
    }
    fn theta(&self) -> El<F> {
        self.theta.clone()
    }
    fn ideal_zero(&self) -> F::Ideal {
        self.base.ideal_zero()
    }
    fn ideal_add(&self, a: &F::Ideal, b: &F::Ideal) -> F::Ideal {
        self.base.ideal_add(a, b)
    }
    fn ideal_neg(&self, a: &F::Ideal) -> F::Ideal {
        self.base.ideal_neg(a)
    }
    fn ideal_scale(&self, s: &El<F>, a: &F::Ideal) -> F::Ideal {
        self.base.ideal_scale(s, a)
    }
    fn to_ideal(&self, x: &El<F>) -> Option<F::Ideal> {
        self.base.to_ideal(x)
    }
    fn unit_witness(&self) -> Vec<(El<F>, F::Ideal)> {
        Vec::new()
    }
    fn residue(&self, x: &El<F>) -> u64 {
        self.base.residue(x)
    }
    fn random_ideal(&self, rng: &mut dyn RngCore) -> F::Ideal {
        self.base.random_ideal(rng)
    }
    fn frobenius_defects(&self, rng: &mut dyn RngCore) -> Vec<(El<F>, El<F>)> {
        self.base.frobenius_defects(rng)
    }
    fn generalised(&self) -> bool {
        true
    }
}
