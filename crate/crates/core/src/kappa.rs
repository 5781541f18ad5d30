//! The homomorphism kappa: S -> W(S) -> W(R) built from delta, with
//! w_m(delta(x)) = sigma^m(x), its unit u with p u = kappa(theta), and the
//! criterion on sigma/p deciding when kappa lands in the Dieudonne ring.

use serde::{Deserialize, Serialize};

use rand::SeedableRng;

use crate::base_rings::{Level, QElem, QuotientRing, RingDesc, Series};
use crate::error::{Error, Result};
use crate::frames::{
    validate_hom, BreuilFrame, BreuilProjection, Frame, FrameHom, RelIdeal, RelativeBreuilFrame, RelativeWittFrame,
    WittElem, WittFrame, WittProjection,
};
use crate::lifting::{deform, lift_hom_guess, lift_iso, lift_window, BreuilKernel, Kernel, LiftOptions, WittKernel};
use crate::matrix::{self, Matrix};
use crate::report::{Check, Report};
use crate::ring::Ring;
use crate::windows::{
    base_change, base_change_hom, compose, dual, fp_nilpotency, hom_from_matrix, identity_hom, ideal_matrix_zero,
    validate_window, validate_window_hom, FpMatrix, Window, WindowHom,
};
use crate::witt::{WittRing, WittVec};

/// delta(x) = (y_0, y_1, ...) with y_0 = x and
/// y_m = tau_m(y_0) + tau_(m-1)(y_1) + ... + tau_1(y_(m-1)),
/// computed on the canonical lift of x through a ring with `len` extra
/// p-adic digits. Coordinate m is exact modulo p^(prec + len - m).
pub fn delta(level: &Level, x: &Series, len: usize) -> Result<Vec<Series>> {
    let work = level.at_precision(level.precision() + len as u32)?;
    let mut ys = vec![level.ring.transfer(x, &work.ring)];
    for m in 1..len {
        let mut acc = work.ring.zero();
        for (i, y) in ys.iter().enumerate() {
            let t = work.tau_k(y, (m - i) as u32)?;
            acc = work.ring.add(&acc, &t);
        }
        ys.push(acc);
    }
    Ok(ys.into_iter().map(|y| work.ring.transfer(&y, &level.ring)).collect())
}

/// kappa at a level with a coefficient ring of precision N into W_len(R_a).
/// Needs N >= a + len - 1 so that every reduced coordinate is exact.
#[derive(Clone, Debug)]
pub struct Kappa {
    pub level: Level,
    pub quotient: QuotientRing,
}

impl Kappa {
    pub fn new(level: &Level, quotient: &QuotientRing) -> Self {
        Kappa { level: level.clone(), quotient: quotient.clone() }
    }

    pub fn check_precision(&self, len: usize) -> Result<()> {
        let need = self.quotient.a() + len - 1;
        if (self.level.precision() as usize) < need {
            return Err(Error::Precision(format!(
                "kappa into W_{len}(R_{}) needs N >= {need}, have {}",
                self.quotient.a(),
                self.level.precision()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, x: &Series, len: usize) -> WittVec<QElem> {
        let ys = delta(&self.level, x, len).expect("sigma is a Frobenius lift");
        WittVec(ys.iter().map(|y| self.quotient.reduce(&self.level.ring, y)).collect())
    }
}

/// u = f_1 kappa(E), computed from the integer data of E so that only the
/// level and the Witt length matter.
pub fn compute_u(desc: &RingDesc, a: usize, n: usize) -> Result<WittVec<QElem>> {
    let prec = (desc.n as usize).max(a + n) as u32;
    let level = Level::new(desc, a, prec)?;
    let q = QuotientRing::new(desc, a)?;
    let k = Kappa::new(&level, &q);
    let long = k.apply(&level.e, n + 1);
    if q.residue(&long.0[0]) != 0 || !q.is_zero(&long.0[0]) {
        return Err(Error::Verification("kappa(E) is not in I_R".into()));
    }
    Ok(WittVec(long.0[1..].to_vec()))
}

/// Unit test on a Witt vector: with p^r u = (a_0, a_1, ...), u is a unit iff a_r is.
pub fn witt_unit_test<R: Ring + Clone>(w: &WittRing<R>, u: &WittVec<R::Elem>, r: usize) -> Result<bool> {
    if r >= u.len() {
        return Err(Error::Precision(format!("coordinate {r} of p^{r} u is beyond length {}", u.len())));
    }
    let pr = w.mul(&w.int(w.prime().pow(r as u32) as i64), u);
    Ok(w.base().is_unit(&pr.0[r]))
}

/// kappa_a: B_a -> D_(R_a, n), a u-homomorphism.
pub struct KappaHom {
    pub src: BreuilFrame,
    pub dst: WittFrame,
    pub kappa: Kappa,
    pub u: WittElem,
}

/// Refuses descriptions whose sigma fails the sigma/p criterion: kappa then
/// does not land in the Dieudonne ring.
pub fn require_criterion(desc: &RingDesc) -> Result<()> {
    if desc.is_standard() {
        return Ok(());
    }
    if !sigma_over_p_criterion(desc)?.nilpotent {
        return Err(Error::Refused("sigma/p is not nilpotent on J/J^2 mod p".into()));
    }
    Ok(())
}

impl KappaHom {
    pub fn new(desc: &RingDesc, a: usize, n: usize) -> Result<Self> {
        require_criterion(desc)?;
        Self::new_unchecked(desc, a, n)
    }

    /// Builds kappa without the sigma/p criterion.
    pub fn new_unchecked(desc: &RingDesc, a: usize, n: usize) -> Result<Self> {
        let src = BreuilFrame::new(desc, a)?;
        let dst = WittFrame::new(desc, a, n)?;
        let kappa = Kappa::new(&src.level, &dst.quotient);
        kappa.check_precision(n)?;
        let u = compute_u(desc, a, n)?;
        Ok(KappaHom { src, dst, kappa, u })
    }

    pub fn n(&self) -> usize {
        self.dst.n()
    }
}

impl FrameHom for KappaHom {
    type Src = BreuilFrame;
    type Dst = WittFrame;
    fn source(&self) -> &BreuilFrame {
        &self.src
    }
    fn target(&self) -> &WittFrame {
        &self.dst
    }
    fn map(&self, x: &Series) -> WittElem {
        self.kappa.apply(x, self.n())
    }
    fn map_ideal(&self, y: &Series) -> WittElem {
        self.map(&self.src.embed(y))
    }
    fn unit(&self) -> WittElem {
        self.u.clone()
    }
}

/// kappa~_(a+1): B~_(a+1) -> D_(R_(a+1)/R_a, n).
pub struct KappaRel {
    pub src: RelativeBreuilFrame,
    pub dst: RelativeWittFrame,
    pub kappa: Kappa,
    pub u: WittElem,
}

impl KappaRel {
    pub fn new(desc: &RingDesc, a_plus_1: usize, n: usize) -> Result<Self> {
        require_criterion(desc)?;
        Self::new_unchecked(desc, a_plus_1, n)
    }

    pub fn new_unchecked(desc: &RingDesc, a_plus_1: usize, n: usize) -> Result<Self> {
        let src = RelativeBreuilFrame::new(desc, a_plus_1)?;
        let dst = RelativeWittFrame::new(desc, a_plus_1, n)?;
        let kappa = Kappa::new(&src.level, &dst.quotient);
        kappa.check_precision(n)?;
        let u = compute_u(desc, a_plus_1, n)?;
        Ok(KappaRel { src, dst, kappa, u })
    }

    pub fn n(&self) -> usize {
        self.dst.n()
    }
}

impl FrameHom for KappaRel {
    type Src = RelativeBreuilFrame;
    type Dst = RelativeWittFrame;
    fn source(&self) -> &RelativeBreuilFrame {
        &self.src
    }
    fn target(&self) -> &RelativeWittFrame {
        &self.dst
    }
    fn map(&self, x: &Series) -> WittElem {
        self.kappa.apply(x, self.n())
    }
    fn map_ideal(&self, i: &RelIdeal) -> WittElem {
        self.map(&self.src.embed(i))
    }
    fn unit(&self) -> WittElem {
        self.u.clone()
    }
}

/// The matrix of sigma/p on J/J^2 mod p and whether it is nilpotent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Criterion {
    /// column i: coefficients of sigma(x_i)/p on x_1..x_r, mod p
    pub matrix: Vec<Vec<u64>>,
    pub nilpotent: bool,
}

pub fn sigma_over_p_criterion(desc: &RingDesc) -> Result<Criterion> {
    desc.validate()?;
    let level = Level::new(desc, 2, desc.n.max(2))?;
    let matrix = level.criterion_matrix()?;
    let r = desc.r;
    let m = FpMatrix::from_fn(r, r, |i, j| matrix[i][j]);
    let nilpotent = fp_nilpotency(desc.p, &m).is_some();
    Ok(Criterion { matrix, nilpotent })
}

/// The checks that kappa_a is a u-homomorphism, in the form used by the
/// acceptance suite: kappa is a ring map, commutes with Frobenius,
/// f_1 kappa(E y) = u kappa(sigma(y)), p u = kappa(sigma(E)) and kappa on
/// monomials is Teichmuller.
pub fn kappa_identities(k: &KappaHom, rng: &mut dyn rand::RngCore, pairs: usize, cofactors: usize) -> Report {
    let s = k.src.series();
    let w = &k.dst.witt;
    let mut rep = Report::default();
    let mut ring_hom = w.eq(&k.map(&s.one()), &w.one());
    let mut frob = true;
    for _ in 0..pairs {
        let (x, y) = (s.random(rng), s.random(rng));
        let (kx, ky) = (k.map(&x), k.map(&y));
        ring_hom &= w.eq(&k.map(&s.mul(&x, &y)), &w.mul(&kx, &ky));
        ring_hom &= w.eq(&k.map(&s.add(&x, &y)), &w.add(&kx, &ky));
        frob &= w.eq(&w.frobenius(&kx), &k.map(&k.src.sigma(&x)));
    }
    rep.push(Check::new("kappa-ring-hom", "kappa(xy) = kappa(x) kappa(y), kappa(x + y) = kappa(x) + kappa(y)", ring_hom)
        .with_witness(format!("{pairs} pairs")));
    rep.push(Check::new("kappa-frobenius", "f kappa = kappa sigma", frob));
    let mut lin = true;
    for _ in 0..cofactors {
        let y = s.random(rng);
        let lhs = w.f1(&k.map_ideal(&y)).expect("kappa(E y) in I_R");
        let rhs = w.mul(&k.u, &k.map(&k.src.sigma1(&y)));
        lin &= w.eq(&lhs, &rhs);
    }
    rep.push(Check::new("kappa-sigma1", "f_1 kappa(E y) = u kappa(sigma(y))", lin)
        .with_witness(format!("{cofactors} cofactors")));
    let pu = w.mul(&w.int(w.prime() as i64), &k.u);
    rep.push(Check::new("kappa-theta", "p u = kappa(sigma(E))", w.eq(&pu, &k.map(&k.src.theta()))));
    if k.src.level.desc.is_standard() {
        let mut teich = true;
        for i in 0..s.dim() {
            let m = s.basis_element(i);
            teich &= w.eq(&k.map(&m), &w.teichmuller(&k.dst.quotient.reduce(s, &m)));
        }
        // monomials of degree >= a: kappa_(a+1)(x^e) maps to zero in W(R_a)
        let a = k.src.a() as u32;
        if let Ok(up) = Level::new(&k.src.level.desc, k.src.a() + 1, k.src.level.precision()) {
            let k_up = Kappa::new(&up, &k.dst.quotient);
            for (i, d) in up.ring.basis().degrees.iter().enumerate() {
                if *d >= a {
                    teich &= w.is_zero(&k_up.apply(&up.ring.basis_element(i), k.n()));
                }
            }
        }
        rep.push(Check::new("kappa-teichmuller", "kappa(x^e) = [x^e], and 0 for |e| >= a", teich));
    }
    rep.push(Check::new("kappa-unit", "u is a unit of W(R)", w.is_unit(&k.u)));
    rep
}

/// The kappa_a for a = 1..a_max and kappa~_a for a = 2..a_max at one Witt
/// length, with push, recover and the comparisons built on them.
pub struct Pipeline {
    pub desc: RingDesc,
    pub n: usize,
    homs: Vec<KappaHom>,
    rels: Vec<KappaRel>,
}

/// A window over B_a with an isomorphism kappa_* w -> d.
pub struct Recovered {
    pub window: Window<Series>,
    pub iso: WindowHom<WittElem, WittElem>,
    /// a matrix h over S_a with iso = kappa(h) + remainder, the remainder
    /// having coordinates only where kappa~ of the next level cannot reach
    pub breuil: Matrix<Series>,
    pub remainder: Matrix<WittElem>,
    /// Neumann iterations of each lifting step, from a = 2 up
    pub iterations: Vec<usize>,
}

/// An isomorphism of windows over B_a computed at coefficient precision `precision`.
pub struct HomLift {
    pub frame: BreuilFrame,
    pub source: Window<Series>,
    pub target: Window<Series>,
    pub hom: WindowHom<Series, Series>,
    pub precision: u32,
}

/// (kappa_* w)^t -> kappa_*(w^t) as c Id with c = u f(c).
pub struct DualCompat {
    pub c: WittElem,
    pub iterations: usize,
    pub hom: WindowHom<WittElem, WittElem>,
}

impl Pipeline {
    pub fn new(desc: &RingDesc, a_max: usize, n: usize) -> Result<Self> {
        require_criterion(desc)?;
        Self::new_unchecked(desc, a_max, n)
    }

    pub fn new_unchecked(desc: &RingDesc, a_max: usize, n: usize) -> Result<Self> {
        if a_max == 0 || n < 2 {
            return Err(Error::InvalidDesc("need a_max >= 1 and n >= 2".into()));
        }
        let homs = (1..=a_max).map(|a| KappaHom::new_unchecked(desc, a, n)).collect::<Result<Vec<_>>>()?;
        let rels = (2..=a_max).map(|a| KappaRel::new_unchecked(desc, a, n)).collect::<Result<Vec<_>>>()?;
        Ok(Pipeline { desc: desc.clone(), n, homs, rels })
    }

    pub fn a_max(&self) -> usize {
        self.homs.len()
    }

    pub fn kappa(&self, a: usize) -> &KappaHom {
        &self.homs[a - 1]
    }

    pub fn rel(&self, a_plus_1: usize) -> &KappaRel {
        &self.rels[a_plus_1 - 2]
    }

    pub fn push(&self, a: usize, w: &Window<Series>) -> Window<WittElem> {
        base_change(self.kappa(a), w)
    }

    fn witt_projection(&self, a_plus_1: usize) -> WittProjection<'_, WittFrame> {
        let hi = self.kappa(a_plus_1);
        WittProjection { src: &hi.dst, src_quotient: &hi.dst.quotient, dst: &self.kappa(a_plus_1 - 1).dst }
    }

    /// kappa_1: Z/p^N -> W_n(F_p) = Z/p^n inverted digit by digit; the
    /// result is the representative in [0, p^n).
    pub fn kappa1_inverse(&self, t: &WittElem) -> Result<Series> {
        let k = self.kappa(1);
        let s = k.src.series();
        let w = &k.dst.witt;
        let p = self.desc.p;
        let len = t.len().min(self.n);
        let mut c = 0u64;
        for i in 0..len {
            let pi = p.pow(i as u32);
            let digit = (0..p)
                .find(|d| {
                    let img = k.map(&s.from_u64(c + d * pi));
                    w.eq(&w.truncate(&img, i + 1), &w.truncate(t, i + 1))
                })
                .ok_or_else(|| Error::NoSolution("Witt vector outside the image of kappa_1".into()))?;
            c += digit * pi;
        }
        Ok(s.from_u64(c))
    }

    /// A window w over B_a with kappa_* w isomorphic to d, built up the
    /// levels by lifting along B~_(a+1) -> B_a, transporting the Hodge
    /// filtration of d and deforming.
    pub fn recover(&self, a: usize, d: &Window<WittElem>) -> Result<Recovered> {
        let k = self.kappa(a);
        let wr = &k.dst.witt;
        if a == 1 {
            let u_inv = wr.inv(&k.u).ok_or_else(|| Error::NotUnit("u".into()))?;
            let target = Matrix::from_fn(d.rank(), d.rank(), |i, j| {
                if j < d.rk_l {
                    wr.mul(d.psi.get(i, j), &u_inv)
                } else {
                    d.psi.get(i, j).clone()
                }
            });
            let psi = target.try_map(|x| self.kappa1_inverse(x))?;
            let window = Window { rk_l: d.rk_l, rk_t: d.rk_t, psi };
            let iso = identity_hom(&k.dst, d.rk_l, d.rk_t);
            self.verify_recovered(a, &window, d, &iso)?;
            let h = d.rank();
            let breuil = matrix::identity(k.src.series(), h);
            let remainder = matrix::zero(wr, h, h);
            return Ok(Recovered { window, iso, breuil, remainder, iterations: Vec::new() });
        }
        let lo = self.kappa(a - 1);
        let rel = self.rel(a);
        let prev = self.recover(a - 1, &base_change(&self.witt_projection(a), d))?;
        let (s_lo, s_hi) = (lo.src.series(), rel.src.series());
        let lifted_w = lift_window(&prev.window, |x| s_lo.transfer(x, s_hi));
        let e = base_change(rel, &lifted_w);
        let (q_lo, q_hi) = (&lo.dst.quotient, &rel.dst.quotient);
        // guess kappa~(lift of h) + section(remainder): the correction the
        // solver then finds is kappa~ of a matrix over J^(a-1), which lives in
        // the 0th coordinate, so the zero top coordinate loses nothing
        let wr_hi = &rel.dst.witt;
        let sec = |x: &WittElem| WittVec(x.0.iter().map(|c| q_lo.section(c, q_hi)).collect());
        let h_lift = prev.breuil.map(|x| s_lo.transfer(x, s_hi));
        let g_guess = matrix::add(wr_hi, &h_lift.map(|x| rel.map(x)), &prev.remainder.map(sec));
        let l = d.rk_l;
        let guess = WindowHom { c: g_guess.block(l, d.rank(), 0, l), g: g_guess };
        let lifted = lift_iso(&WittKernel { frame: &rel.dst }, &e, d, &guess, &LiftOptions::default())?;
        // the Hodge filtration of d pulled back along the lifted iso, as a
        // graph L -> b T over L
        let h = d.rank();
        let g0 = lifted.hom.g.map(|x| x.0[0].clone());
        let hinv = matrix::try_inverse(q_hi, &g0)?;
        let hll = matrix::try_inverse(q_hi, &hinv.block(0, l, 0, l))?;
        let u_r = matrix::mul(q_hi, &hinv.block(l, h, 0, l), &hll);
        let top = (a - 1) as u32;
        if !u_r.data.iter().all(|x| q_hi.in_degree_at_least(x, top)) {
            return Err(Error::Verification("transported Hodge filtration does not lift the one over R_(a-1)".into()));
        }
        let kernel = BreuilKernel::new(&rel.src);
        let u = u_r.map(|x| kernel.to_ideal(&q_hi.lift(x, s_hi)));
        let (window, m) = deform(&rel.src, &lifted_w, &u)?;
        let g = compose(&rel.dst, &base_change_hom(rel, &m), &lifted.hom, l);
        let iso = WindowHom { c: g.c.try_map(|x| {
            k.dst.to_ideal(x).ok_or_else(|| Error::Verification("isomorphism does not preserve Q over R_a".into()))
        })?, g: g.g };
        self.verify_recovered(a, &window, d, &iso)?;
        // h_new = (lift(h) + omega) M with omega the lift of the 0th
        // coordinates of the correction
        let omega = matrix::sub(wr_hi, &lifted.hom.g, &guess.g).map(|x| q_hi.lift(&x.0[0], s_hi));
        let breuil = matrix::mul(s_hi, &matrix::add(s_hi, &h_lift, &omega), &m.g);
        let remainder = matrix::sub(wr_hi, &iso.g, &breuil.map(|x| rel.map(x)));
        let mut iterations = prev.iterations;
        iterations.push(lifted.transcript.iterations);
        Ok(Recovered { window, iso, breuil, remainder, iterations })
    }

    fn verify_recovered(&self, a: usize, w: &Window<Series>, d: &Window<WittElem>, iso: &WindowHom<WittElem, WittElem>) -> Result<()> {
        let k = self.kappa(a);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a as u64);
        let rep = validate_window(&k.src, w, &mut rng, 3);
        let rep2 = validate_window_hom(&k.dst, &self.push(a, w), d, iso, true);
        if !rep.all_pass() || !rep2.all_pass() {
            return Err(Error::Verification(format!(
                "recovered window at level {a} fails {:?} {:?}",
                rep.failures(),
                rep2.failures()
            )));
        }
        Ok(())
    }

    /// An isomorphism w -> w2 over B_a lifting g: kappa_* w -> kappa_* w2,
    /// at coefficient precision `precision` <= n - 1 where the base case
    /// kappa_1 is injective on the part g determines.
    pub fn lift_hom(
        &self,
        a: usize,
        w: &Window<Series>,
        w2: &Window<Series>,
        g: &WindowHom<WittElem, WittElem>,
        precision: u32,
    ) -> Result<HomLift> {
        if precision as usize >= self.n || (precision as usize) < self.a_max() {
            return Err(Error::Precision(format!(
                "hom lifting precision {precision} must lie in [a_max, n - 1] = [{}, {}]",
                self.a_max(),
                self.n - 1
            )));
        }
        let desc = self.desc.with_precision(precision);
        let frame = BreuilFrame::new(&desc, a)?;
        let k = self.kappa(a);
        let (sf, sm) = (k.src.series(), frame.series());
        let reduce = |w: &Window<Series>| lift_window(w, |x| sf.transfer(x, sm));
        let (source, target) = (reduce(w), reduce(w2));
        let hom = if a == 1 {
            let gm = g.g.try_map(|x| Ok(sf.transfer(&self.kappa1_inverse(x)?, sm)))?;
            hom_from_matrix(&frame, gm, w.rk_l, w2.rk_l)?
        } else {
            let lo = self.kappa(a - 1);
            let proj = BreuilProjection { src: &k.src, dst: &lo.src };
            let prev = self.lift_hom(
                a - 1,
                &base_change(&proj, w),
                &base_change(&proj, w2),
                &base_change_hom(&self.witt_projection(a), g),
                precision,
            )?;
            let rel = RelativeBreuilFrame::new(&desc, a)?;
            let (sl, sr) = (prev.frame.series(), rel.series());
            let l = w.rk_l;
            let mut guess = lift_hom_guess(&prev.hom, |x| sl.transfer(x, sr), |y| RelIdeal { y: sl.transfer(y, sr), z: sr.zero() });
            for i in 0..guess.c.rows {
                for j in 0..l {
                    guess.g.set(l + i, j, rel.embed(guess.c.get(i, j)));
                }
            }
            let lifted = lift_iso(&BreuilKernel::new(&rel), &source, &target, &guess, &LiftOptions::default())?;
            let c = lifted.hom.c.try_map(|i| {
                frame
                    .to_ideal(&rel.embed(i))
                    .ok_or_else(|| Error::Verification("lifted isomorphism does not respect the Hodge filtrations".into()))
            })?;
            WindowHom { g: lifted.hom.g, c }
        };
        let rep = validate_window_hom(&frame, &source, &target, &hom, true);
        if !rep.all_pass() {
            return Err(Error::Verification(format!("lifted hom at level {a} fails {:?}", rep.failures())));
        }
        Ok(HomLift { frame, source, target, hom, precision })
    }

    /// The scalar isomorphism (kappa_* w)^t -> kappa_*(w^t). The two differ by
    /// Psi_B = u Psi_A, so c Id is an isomorphism iff c = u f(c).
    pub fn dual_compat(&self, a: usize, w: &Window<Series>) -> Result<DualCompat> {
        let k = self.kappa(a);
        let f = &k.dst;
        let wr = &f.witt;
        let lhs = dual(f, &self.push(a, w))?;
        let rhs = self.push(a, &dual(&k.src, w)?);
        let cap = 4 * self.n * f.quotient.dim() + 4;
        let mut c = wr.one();
        let mut iterations = 0;
        loop {
            let next = wr.extend_zero(&wr.mul(&k.u, &wr.frobenius(&c)), self.n);
            iterations += 1;
            if wr.eq(&next, &c) {
                break;
            }
            if iterations >= cap {
                return Err(Error::Solver(format!("c = u f(c) did not stabilise within {cap} steps")));
            }
            c = next;
        }
        let h = w.rank();
        let g = Matrix::from_fn(h, h, |i, j| if i == j { c.clone() } else { wr.zero() });
        let hom = WindowHom { g, c: ideal_matrix_zero(f, lhs.rk_t, lhs.rk_l) };
        let rep = validate_window_hom(f, &lhs, &rhs, &hom, true);
        if !rep.all_pass() {
            return Err(Error::Verification(format!("dual compatibility fails {:?}", rep.failures())));
        }
        Ok(DualCompat { c, iterations, hom })
    }

    /// kappa_a and kappa~_a are frame homs, their units are units, and the
    /// squares with the projections and the inclusions commute.
    pub fn diagram_checks(&self, rng: &mut dyn rand::RngCore, samples: usize) -> Report {
        let mut rep = Report::default();
        for a in 1..=self.a_max() {
            let k = self.kappa(a);
            let hom = validate_hom(k, rng, samples);
            rep.push(Check::new(format!("kappa_{a}-frame-hom"), "kappa_a is a u-homomorphism of frames", hom.all_pass())
                .with_witness(format!("{:?}", hom.failures().iter().map(|c| &c.name).collect::<Vec<_>>())));
            let ids = kappa_identities(k, rng, samples, samples);
            rep.push(Check::new(format!("kappa_{a}-identities"), "ring map, f kappa = kappa sigma, sigma_1 and theta relations", ids.all_pass()));
            rep.push(Check::new(format!("kappa_{a}-unit"), "u_a is a unit", k.dst.witt.is_unit(&k.u)));
            if a == 1 {
                continue;
            }
            let rel = self.rel(a);
            let lo = self.kappa(a - 1);
            let relh = validate_hom(rel, rng, samples);
            rep.push(Check::new(format!("kappa~_{a}-frame-hom"), "kappa~_a is a u-homomorphism of relative frames", relh.all_pass()));
            let wr = &k.dst.witt;
            let wl = &lo.dst.witt;
            let proj = self.witt_projection(a);
            let (s_hi, s_lo) = (k.src.series(), lo.src.series());
            let mut square_proj = wl.eq(&proj.map(&k.u), &lo.u);
            let mut square_incl = wr.eq(&rel.u, &k.u);
            for _ in 0..samples {
                let x = s_hi.random(rng);
                square_proj &= wl.eq(&proj.map(&rel.map(&x)), &lo.map(&s_hi.transfer(&x, s_lo)));
                square_incl &= wr.eq(&rel.map(&x), &k.map(&x));
                let y = k.src.random_ideal(rng);
                square_incl &= wr.eq(&rel.map_ideal(&RelIdeal { y: y.clone(), z: s_hi.zero() }), &k.map_ideal(&y));
            }
            rep.push(Check::new(format!("diagram_{a}-projection"), "W(R_a) -> W(R_(a-1)) after kappa~_a equals kappa_(a-1) after S_a -> S_(a-1)", square_proj));
            rep.push(Check::new(format!("diagram_{a}-inclusion"), "kappa~_a restricted along B_a -> B~_a equals kappa_a", square_incl));
        }
        rep
    }
}
