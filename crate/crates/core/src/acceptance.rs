//! The acceptance suite: nine criteria, each a report of exact checks with a
//! pinned time budget.

use std::time::{Duration, Instant};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::base_rings::{Level, RingDesc, Series, SigmaSpec};
use crate::breuil::*;
use crate::frames::{validate_frame, validate_hom, validate_kappa_frame, BreuilFrame, Frame, RelativeBreuilFrame, WittFrame};
use crate::kappa::{kappa_identities, sigma_over_p_criterion, KappaHom, Pipeline};
use crate::lifting::{unique_iso, BreuilKernel, LiftOptions};
use crate::matrix::{self, Matrix};
use crate::oracles;
use crate::report::{Check, Report};
use crate::ring::Ring;
use crate::windows::{dual, nilpotence, random_window, sigma_matrix, validate_window_hom, Window};
use crate::witt::{WittPolyTable, WittRing};
use crate::Result;

pub const CRITERIA: [(u8, &str, Option<u64>); 9] = [
    (1, "Witt foundation", Some(30)),
    (2, "frame validation", Some(10)),
    (3, "kappa identities", Some(60)),
    (4, "solver oracle", Some(120)),
    (5, "equivalence round trips", Some(300)),
    (6, "duality", None),
    (7, "nilpotence", Some(30)),
    (8, "Frobenius-lift criterion", Some(60)),
    (9, "Breuil-module relations", Some(60)),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptanceOptions {
    pub seed: u64,
    /// Whether exceeding a time budget fails the criterion.
    pub timing: bool,
}

impl Default for AcceptanceOptions {
    fn default() -> Self {
        AcceptanceOptions { seed: 0, timing: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: String,
    pub pass: bool,
    pub report: Report,
    pub elapsed_secs: f64,
    pub budget_secs: Option<u64>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let budget = self.budget_secs.map_or("exact".to_string(), |b| format!("< {b} s"));
        let failed = self.report.failures().len();
        format!(
            "criterion {}: {} [{}] ({} checks, {} failed, {:.2} s, budget {})",
            self.id,
            self.title,
            if self.pass { "PASS" } else { "FAIL" },
            self.report.checks.len(),
            failed,
            self.elapsed_secs,
            budget
        )
    }
}

fn rng_for(opts: &AcceptanceOptions, id: u8) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(opts.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(id as u64))
}

pub fn run_criterion(id: u8, opts: &AcceptanceOptions) -> Result<CriterionResult> {
    let &(_, title, budget) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| crate::Error::InvalidDesc(format!("no acceptance criterion {id}")))?;
    let mut rng = rng_for(opts, id);
    let start = Instant::now();
    let mut report = match id {
        1 => witt_foundation(&mut rng)?,
        2 => frame_validation(&mut rng)?,
        3 => kappa_criterion(&mut rng)?,
        4 => solver_oracle(&mut rng)?,
        5 => round_trips(&mut rng)?,
        6 => duality(&mut rng)?,
        7 => nilpotence_criterion(&mut rng)?,
        8 => frobenius_lift(&mut rng)?,
        _ => module_relations(&mut rng)?,
    };
    let elapsed = start.elapsed();
    if let (Some(b), true) = (budget, opts.timing) {
        report.push(
            Check::new("time-budget", format!("runtime < {b} s"), elapsed < Duration::from_secs(b))
                .with_witness(format!("{:.2} s", elapsed.as_secs_f64())),
        );
    }
    Ok(CriterionResult {
        id,
        title: title.to_string(),
        pass: report.all_pass(),
        report,
        elapsed_secs: elapsed.as_secs_f64(),
        budget_secs: budget,
    })
}

pub fn run_all(opts: &AcceptanceOptions) -> Result<Vec<CriterionResult>> {
    CRITERIA.iter().map(|c| run_criterion(c.0, opts)).collect()
}

fn d3() -> RingDesc {
    RingDesc::eisenstein(3, 7, 1, 3, &[(vec![1], 1)])
}

fn d5() -> RingDesc {
    RingDesc::eisenstein(5, 5, 2, 2, &[(vec![1, 0], 1), (vec![0, 1], 1)])
}

/// sigma(x) = x^3 + 3 x^2, which passes the sigma/p criterion.
fn perturbed() -> RingDesc {
    d3().with_sigma(SigmaSpec::General(vec![vec![(vec![3], 1), (vec![2], 3)]]))
}

/// Tallies a predicate over samples, keeping the first counterexample.
struct Tally {
    count: usize,
    first_failure: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { count: 0, first_failure: None }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.count += 1;
        if !ok && self.first_failure.is_none() {
            self.first_failure = Some(what());
        }
    }

    fn check(self, name: &str, reference: &str) -> Check {
        let witness = match &self.first_failure {
            Some(w) => format!("{} samples, first failure: {w}", self.count),
            None => format!("{} samples", self.count),
        };
        Check::new(name, reference, self.first_failure.is_none()).with_witness(witness)
    }
}

fn witt_foundation(rng: &mut ChaCha8Rng) -> Result<Report> {
    let mut rep = Report::default();
    for p in [2u64, 3, 5] {
        for n in 1..=4 {
            let t = WittPolyTable::generate(p, n);
            let name = format!("witt-polys p={p} n={n}");
            match t {
                Err(e) => rep.push(Check::new(name, "universal polynomials have integer coefficients", false).with_witness(e.to_string())),
                Ok(t) => {
                    let mut samples: Vec<(Vec<i64>, Vec<i64>)> = vec![
                        (vec![1, -1, 2, 0], vec![3, 1, -2, 1]),
                        (vec![2, 2, 2, 2], vec![1, 1, 1, 1]),
                        (vec![0, 1, 0, 1], vec![1, 0, 1, 0]),
                    ];
                    for _ in 0..3 {
                        samples.push(((0..4).map(|_| rng.gen_range(-3..=3)).collect(), (0..4).map(|_| rng.gen_range(-3..=3)).collect()));
                    }
                    let res = oracles::table_is_ghost_compatible(&t, &samples);
                    let c = Check::new(name, "integral polynomials reproduce ghost sum, product and shift", res.is_ok());
                    rep.push(match res {
                        Ok(()) => c.with_witness(format!("{} integer samples", samples.len())),
                        Err(w) => c.with_witness(w),
                    });
                }
            }
        }
    }
    // length 4 at p = 5 costs seconds per product; the tables above cover it
    let configs = [
        (RingDesc::eisenstein(2, 4, 1, 3, &[(vec![1], 1)]), 4),
        (RingDesc::eisenstein(3, 3, 1, 3, &[(vec![1], 1)]), 4),
        (RingDesc::eisenstein(5, 2, 1, 2, &[(vec![1], 1)]), 3),
    ];
    let (triples, samples) = (170, 70);
    let mut axioms = Tally::new();
    let mut fv = Tally::new();
    let mut vxy = Tally::new();
    let mut teich = Tally::new();
    let mut f1 = Tally::new();
    for (d, n) in &configs {
        let n = *n;
        let base = Level::new(d, d.a, d.n)?;
        let br = &base.ring;
        let w = WittRing::new(br.clone(), n)?;
        let p = d.p;
        for _ in 0..triples {
            let (x, y, z) = (w.random(rng), w.random(rng), w.random(rng));
            let ok = w.eq(&w.add(&w.add(&x, &y), &z), &w.add(&x, &w.add(&y, &z)))
                && w.eq(&w.mul(&w.mul(&x, &y), &z), &w.mul(&x, &w.mul(&y, &z)))
                && w.eq(&w.add(&x, &y), &w.add(&y, &x))
                && w.eq(&w.mul(&x, &y), &w.mul(&y, &x))
                && w.eq(&w.mul(&x, &w.add(&y, &z)), &w.add(&w.mul(&x, &y), &w.mul(&x, &z)))
                && w.eq(&w.mul(&x, &w.one()), &x)
                && w.eq(&w.add(&x, &w.zero()), &x)
                && w.eq(&w.add(&x, &w.neg(&x)), &w.zero());
            axioms.record(ok, || format!("p={p}: {x:?}, {y:?}, {z:?}"));
        }
        for _ in 0..samples {
            let (x, y) = (w.random(rng), w.random(rng));
            let short = w.truncate(&x, n - 1);
            fv.record(w.eq(&w.frobenius(&w.verschiebung(&short)), &w.mul(&w.int(p as i64), &short)), || format!("p={p}: {short:?}"));
            let lhs = w.mul(&w.verschiebung(&short), &y);
            let rhs = w.verschiebung(&w.mul(&short, &w.frobenius(&y)));
            vxy.record(w.eq(&lhs, &rhs), || format!("p={p}: {short:?}, {y:?}"));
            let c = br.random(rng);
            teich.record(w.eq(&w.frobenius(&w.teichmuller(&c)), &w.teichmuller(&br.pow(&c, p))), || format!("p={p}: {c:?}"));
            let v = w.verschiebung(&short);
            let ok = match w.f1(&v) {
                Ok(g) => w.eq(&w.mul(&w.int(p as i64), &g), &w.frobenius(&v)),
                Err(_) => false,
            };
            f1.record(ok, || format!("p={p}: {v:?}"));
        }
    }
    rep.push(axioms.check("witt-ring-axioms", "associativity, commutativity, distributivity, 0, 1 and negatives"));
    rep.push(fv.check("witt-fv", "f v = p"));
    rep.push(vxy.check("witt-v-linear", "v(x) y = v(x f(y))"));
    rep.push(teich.check("witt-f-teichmuller", "f([c]) = [c^p]"));
    rep.push(f1.check("witt-f1", "p f_1 = f on I_R"));
    Ok(rep)
}

fn frame_validation(rng: &mut ChaCha8Rng) -> Result<Report> {
    let mut rep = Report::default();
    for p in [3u64, 5] {
        let es: Vec<(&str, Vec<(Vec<u32>, i64)>)> = vec![
            ("p", vec![]),
            ("p+x", vec![(vec![1], 1)]),
            ("p+x^2", vec![(vec![2], 1)]),
            ("p(1+x)", vec![(vec![1], p as i64)]),
        ];
        for (label, e0) in es {
            let d = RingDesc::eisenstein(p, 5, 1, 3, &e0);
            for a in 1..=3 {
                let f = BreuilFrame::new(&d, a)?;
                let r = validate_frame(&f, rng, 8);
                rep.push(Check::new(format!("breuil-frame p={p} E={label} a={a}"), "frame axioms", r.all_pass())
                    .with_witness(format!("{:?}", r.failures().iter().map(|c| &c.name).collect::<Vec<_>>())));
            }
            let f = BreuilFrame::new(&d, 3)?;
            let mut c = validate_kappa_frame(&f.level, &f.theta())?;
            c.name = format!("tau-theta p={p} E={label}");
            rep.push(c);
            // W_4 at p = 5 takes seconds per frame; length 3 is checked there
            let top = if p == 5 { 3 } else { 4 };
            for (a, n) in [(2, 3), (3, top)] {
                let f = WittFrame::new(&d, a, n)?;
                let r = validate_frame(&f, rng, 6);
                rep.push(Check::new(format!("witt-frame p={p} E={label} a={a} n={n}"), "frame axioms", r.all_pass())
                    .with_witness(format!("{:?}", r.failures().iter().map(|c| &c.name).collect::<Vec<_>>())));
            }
        }
    }
    Ok(rep)
}

fn kappa_criterion(rng: &mut ChaCha8Rng) -> Result<Report> {
    let mut rep = Report::default();
    for (label, d, a, n) in [("(3,1,3,4,7)", d3(), 3, 4), ("(5,2,2,3,5)", d5(), 2, 3)] {
        let k = KappaHom::new(&d, a, n)?;
        for mut c in kappa_identities(&k, rng, 200, 100).checks {
            c.name = format!("{} {label}", c.name);
            rep.push(c);
        }
        let h = validate_hom(&k, rng, 20);
        rep.push(Check::new(format!("kappa-frame-hom {label}"), "kappa is a u-homomorphism of frames", h.all_pass())
            .with_witness(format!("{:?}", h.failures().iter().map(|c| &c.name).collect::<Vec<_>>())));
    }
    Ok(rep)
}

fn desc_p2_r1() -> RingDesc {
    RingDesc::eisenstein(2, 3, 1, 2, &[(vec![1], 1)])
}

/// sigma(x1) = x1^2 + 2 x2, sigma(x2) = x2^2.
fn desc_p2_r2() -> RingDesc {
    RingDesc::eisenstein(2, 3, 2, 2, &[(vec![1, 0], 1), (vec![0, 1], 1)]).with_sigma(SigmaSpec::General(vec![
        vec![(vec![2, 0], 1), (vec![0, 1], 2)],
        vec![(vec![0, 2], 1)],
    ]))
}

fn solver_oracle(rng: &mut ChaCha8Rng) -> Result<Report> {
    let mut rep = Report::default();
    let shapes = [(1, 0), (0, 1), (1, 1), (2, 0), (0, 2)];
    let mut unique = Tally::new();
    let mut agree = Tally::new();
    let mut largest = 0u128;
    for desc in [desc_p2_r1(), desc_p2_r2()] {
        let f = RelativeBreuilFrame::new(&desc, 2)?;
        let k = BreuilKernel::new(&f);
        let s = f.series();
        let fits: Vec<(usize, usize)> = shapes.iter().copied().filter(|&(l, t)| oracles::search_space(&f, l + t) <= 1 << 12).collect();
        for &(l, t) in fits.iter().cycle().take(12) {
            let space = oracles::search_space(&f, l + t);
            largest = largest.max(space);
            let (w1, w2, omega0) = oracles::congruent_pair(&f, l, t, rng)?;
            let sols = oracles::brute_force_solutions(&k, &w1, &w2);
            unique.record(sols.len() == 1 && sols[0] == omega0, || format!("r={} ({l},{t}): {} solutions", desc.r, sols.len()));
            let ok = match unique_iso(&k, &w1, &w2, &LiftOptions::default()) {
                Ok(lifted) => sols.len() == 1 && matrix::sub(s, &lifted.hom.g, &matrix::identity(s, l + t)) == sols[0],
                Err(_) => false,
            };
            agree.record(ok, || format!("r={} ({l},{t})", desc.r));
        }
    }
    rep.push(Check::new("oracle-instances", "at least 20 instances with |aP| <= 2^12", unique.count >= 20)
        .with_witness(format!("{} instances, largest search space {largest}", unique.count)));
    rep.push(unique.check("oracle-unique", "the brute-force solution set is a single matrix"));
    rep.push(agree.check("oracle-agrees", "unique_iso equals the brute-force solution"));
    Ok(rep)
}

/// A round-trip sample: a Breuil window over S_a, its window over B_a.
pub struct Sample {
    pub a: usize,
    pub breuil: BreuilWindow,
    pub window: Window<Series>,
}

const SHAPES: [(usize, usize); 5] = [(1, 0), (0, 1), (1, 1), (2, 0), (0, 2)];

fn round_trip_samples(pl: &Pipeline, rng: &mut dyn RngCore) -> Result<Vec<Sample>> {
    (0..25)
        .map(|i| {
            let a = 1 + i % pl.a_max();
            let (l, t) = SHAPES[(i / pl.a_max()) % SHAPES.len()];
            let f = &pl.kappa(a).src;
            let b = random_breuil_window(f, l, t, rng).change_basis(f, &matrix::random_invertible(f.series(), l + t, rng))?;
            let window = to_window(f, &b)?.window;
            Ok(Sample { a, breuil: b, window })
        })
        .collect()
}

fn recover_push(pl: &Pipeline, a: usize, w: &Window<Series>) -> std::result::Result<(), String> {
    let rec = pl.recover(a, &pl.push(a, w)).map_err(|e| e.to_string())?;
    let lift = pl.lift_hom(a, &rec.window, w, &rec.iso, pl.a_max() as u32).map_err(|e| e.to_string())?;
    let rep = validate_window_hom(&lift.frame, &lift.source, &lift.target, &lift.hom, true);
    if rep.all_pass() {
        Ok(())
    } else {
        Err(format!("{:?}", rep.failures()))
    }
}

fn push_recover(pl: &Pipeline, a: usize, d: &Window<crate::frames::WittElem>) -> std::result::Result<(), String> {
    let rec = pl.recover(a, d).map_err(|e| e.to_string())?;
    let rep = validate_window_hom(&pl.kappa(a).dst, &pl.push(a, &rec.window), d, &rec.iso, true);
    if rep.all_pass() {
        Ok(())
    } else {
        Err(format!("{:?}", rep.failures()))
    }
}

fn default_pipeline() -> Result<Pipeline> {
    Pipeline::new(&d3(), 3, 4)
}

fn round_trips(rng: &mut ChaCha8Rng) -> Result<Report> {
    let pl = default_pipeline()?;
    let mut rep = Report::default();
    let samples = round_trip_samples(&pl, rng)?;
    let mut confined = true;
    for (i, s) in samples.iter().enumerate() {
        let nil = nilpotence(&pl.kappa(s.a).src, &s.window)?.nilpotent;
        let res = recover_push(&pl, s.a, &s.window);
        let (l, t) = (s.window.rk_l, s.window.rk_t);
        // the one failure mode analysed so far: a non-nilpotent window of
        // mixed type at the top level
        confined &= res.is_ok() || (s.a == pl.a_max() && !nil && l > 0 && t > 0);
        let c = Check::new(format!("recover-push #{i}"), "recover(push(w)) is isomorphic to w by a verified window isomorphism", res.is_ok());
        let witness = format!("a={} ({l},{t}) nilpotent={nil}", s.a);
        rep.push(c.with_witness(match res {
            Ok(()) => witness,
            Err(e) => format!("{witness}: {e}"),
        }));
    }
    rep.push(Check::new("round-trip-gap-confined", "every recover(push(w)) failure is a non-nilpotent window of mixed type at the top level", confined));
    for i in 0..25 {
        let a = 1 + i % pl.a_max();
        let (l, t) = SHAPES[(i / pl.a_max()) % SHAPES.len()];
        let d = random_window(&pl.kappa(a).dst, l, t, rng);
        let res = push_recover(&pl, a, &d);
        let witness = format!("a={a} ({l},{t})");
        rep.push(Check::new(format!("push-recover #{i}"), "push(recover(d)) is isomorphic to d by the produced isomorphism", res.is_ok())
            .with_witness(match res {
                Ok(()) => witness,
                Err(e) => format!("{witness}: {e}"),
            }));
    }
    Ok(rep)
}

fn duality(rng: &mut ChaCha8Rng) -> Result<Report> {
    let pl = default_pipeline()?;
    let samples = round_trip_samples(&pl, &mut rng_for(&AcceptanceOptions { seed: rng.gen(), timing: false }, 5))?;
    let mut rep = Report::default();
    let mut ww = Tally::new();
    let mut compat = Tally::new();
    let mut bb = Tally::new();
    let mut mm = Tally::new();
    for (i, s) in samples.iter().enumerate() {
        let f = &pl.kappa(s.a).src;
        let tt = dual(f, &s.window).and_then(|d| dual(f, &d));
        ww.record(tt.as_ref().map_or(false, |x| *x == s.window), || format!("sample {i}"));
        compat.record(pl.dual_compat(s.a, &s.window).is_ok(), || format!("sample {i}"));
        let db = dual_breuil(&s.breuil);
        bb.record(db.validate(f).all_pass() && dual_breuil(&db) == s.breuil, || format!("sample {i}"));
        let sr = f.series();
        let p = matrix::scale(sr, &sr.from_u64(sr.prime()), &matrix::identity(sr, s.breuil.rank));
        let ok = Isogeny::new(f, s.breuil.clone(), s.breuil.clone(), p)
            .and_then(|iso| cokernel_module(f, &iso))
            .and_then(|m| {
                let d = dual_module(f, &m)?;
                Ok(d.validate(f).all_pass() && dual_module(f, &d)? == m)
            })
            .unwrap_or(false);
        mm.record(ok, || format!("sample {i}"));
    }
    for (i, a) in (1..=pl.a_max()).cycle().take(9).enumerate() {
        let f = &pl.kappa(a).src;
        let h = 1 + i % 2;
        let ok = random_isogeny(f, h, 2, rng)
            .and_then(|iso| cokernel_module(f, &iso))
            .and_then(|m| {
                let d = dual_module(f, &m)?;
                Ok(d.validate(f).all_pass() && dual_module(f, &d)? == m)
            })
            .unwrap_or(false);
        mm.record(ok, || format!("isogeny {i} at a={a}"));
    }
    rep.push(ww.check("window-double-dual", "w^tt = w"));
    rep.push(compat.check("dual-push", "(kappa_* w)^t is isomorphic to kappa_*(w^t) by c Id with c = u f(c)"));
    rep.push(bb.check("breuil-dual-involution", "the dual Breuil window is a Breuil window and dualising twice is the identity"));
    rep.push(mm.check("module-dual-involution", "the dual module is a Breuil module and dualising twice restores the presentation"));
    Ok(rep)
}

fn nilpotence_criterion(rng: &mut ChaCha8Rng) -> Result<Report> {
    let mut rep = Report::default();
    let f = BreuilFrame::new(&d3(), 3)?;
    let s = f.series();
    let e = BreuilWindow::from_phi(&f, matrix::diagonal(s, &[f.level.e.clone()]))?;
    let one = BreuilWindow::from_phi(&f, matrix::identity(s, 1))?;
    let verdict = |b: &BreuilWindow| -> Result<(bool, bool)> { Ok((is_nilpotent_breuil(&f, b), nilpotence(&f, &to_window(&f, b)?.window)?.nilpotent)) };
    rep.push(Check::new("phi=E-nilpotent", "phi = E is nilpotent", verdict(&e)? == (true, true)));
    rep.push(Check::new("phi=1-not-nilpotent", "phi = 1 is not nilpotent", verdict(&one)? == (false, false)));
    let mut crit = Tally::new();
    for i in 0..50 {
        let (l, t) = [(1, 1), (2, 1), (1, 2), (2, 2), (3, 0), (0, 3)][i % 6];
        let w = random_window(&f, l, t, rng);
        let n = nilpotence(&f, &w)?;
        crit.record(n.nilpotent == n.lambda_nilpotent, || format!("({l},{t}): {n:?}"));
    }
    rep.push(crit.check("v-sharp-vs-lambda", "V^# is nilpotent mod m iff lambda is"));
    let mut ranks = Tally::new();
    let mut agree = Tally::new();
    for i in 0..50 {
        let (l, t) = [(1, 1), (2, 1), (1, 2), (2, 0), (0, 2), (3, 1)][i % 6];
        let b = random_breuil_window(&f, l, t, rng).change_basis(&f, &matrix::random_invertible(s, l + t, rng))?;
        let (nil, et) = nil_etale_ranks(&f, &b);
        let brute = oracles::brute_force_nil_rank(s.prime(), &b.phi.map(|x| f.residue(x)));
        ranks.record(nil + et == l + t && nil == brute, || format!("({l},{t}): ({nil},{et}) vs brute force {brute}"));
        let w = to_window(&f, &b)?.window;
        agree.record(is_nilpotent_breuil(&f, &b) == nilpotence(&f, &w)?.nilpotent, || format!("({l},{t})"));
    }
    rep.push(ranks.check("nil-etale-ranks", "nil_rank + etale_rank = rank, nil_rank equals the brute-force stable kernel"));
    rep.push(agree.check("breuil-window-nilpotence", "Breuil and window nilpotence verdicts agree"));
    Ok(rep)
}

fn frobenius_lift(rng: &mut ChaCha8Rng) -> Result<Report> {
    let mut rep = Report::default();
    let x_p = sigma_over_p_criterion(&d3())?;
    rep.push(Check::new("sigma=x^p", "x^p passes", x_p.nilpotent).with_witness(format!("{:?}", x_p.matrix)));
    let bad = d3().with_sigma(SigmaSpec::General(vec![vec![(vec![3], 1), (vec![1], 3)]]));
    let c = sigma_over_p_criterion(&bad)?;
    let refused = matches!(KappaHom::new(&bad, 2, 3), Err(crate::Error::Refused(_)));
    rep.push(Check::new("sigma=x^p+px", "x^p + p x fails and kappa is refused", !c.nilpotent && refused).with_witness(format!("{:?}", c.matrix)));
    let tri = RingDesc::eisenstein(3, 6, 2, 2, &[(vec![1, 0], 1)]).with_sigma(SigmaSpec::General(vec![
        vec![(vec![3, 0], 1), (vec![0, 1], 3)],
        vec![(vec![0, 3], 1)],
    ]));
    let c = sigma_over_p_criterion(&tri)?;
    rep.push(Check::new("sigma-upper-triangular", "the strictly upper triangular r = 2 example passes", c.nilpotent).with_witness(format!("{:?}", c.matrix)));
    let pert = perturbed();
    let c = sigma_over_p_criterion(&pert)?;
    rep.push(Check::new("sigma=x^3+3x^2", "the perturbed lift passes", c.nilpotent).with_witness(format!("{:?}", c.matrix)));
    let pl = Pipeline::new(&pert, 3, 4)?;
    let mut rp = Tally::new();
    let mut pr = Tally::new();
    for i in 0..10 {
        let a = 1 + i % 2;
        let (l, t) = SHAPES[(i / 2) % SHAPES.len()];
        let w = random_window(&pl.kappa(a).src, l, t, rng);
        let res = recover_push(&pl, a, &w);
        rp.record(res.is_ok(), || format!("a={a} ({l},{t}): {res:?}"));
        let d = random_window(&pl.kappa(a).dst, l, t, rng);
        let res = push_recover(&pl, a, &d);
        pr.record(res.is_ok(), || format!("a={a} ({l},{t}): {res:?}"));
    }
    rep.push(rp.check("perturbed-recover-push", "recover(push(w)) is isomorphic to w for a <= 2"));
    rep.push(pr.check("perturbed-push-recover", "push(recover(d)) is isomorphic to d for a <= 2"));
    Ok(rep)
}

fn module_relations(rng: &mut ChaCha8Rng) -> Result<Report> {
    let mut rep = Report::default();
    let f = BreuilFrame::new(&RingDesc::eisenstein(3, 4, 1, 3, &[(vec![1], 1)]), 3)?;
    let s = f.series();
    let mut rel = Tally::new();
    let mut back = Tally::new();
    for i in 0..50 {
        let h = 1 + i % 2;
        let iso = random_isogeny(&f, h, 3, rng)?;
        let m = cokernel_module(&f, &iso)?;
        let raw = m.raw();
        let ee = matrix::scale(s, &f.level.e, &matrix::identity(s, h));
        let ok = m.validate(&f).all_pass()
            && matrix::equal(s, &matrix::mul(s, &raw.phi, &raw.psi), &ee)
            && matrix::equal(s, &matrix::mul(s, &raw.psi, &raw.phi), &ee);
        rel.record(ok, || format!("isogeny {i}, rank {h}, exponent {}", iso.exponent));
        let ok = module_to_isogeny(&f, &raw)
            .and_then(|(i2, ident)| Ok((cokernel_module(&f, &i2)?.raw(), ident)))
            .map(|(raw2, ident)| identified(&f, &raw, &raw2, &ident))
            .unwrap_or(false);
        back.record(ok, || format!("isogeny {i}, rank {h}"));
    }
    rep.push(rel.check("module-relations", "phi psi = E = psi phi and both descend to the cokernel"));
    rep.push(back.check("module-round-trip", "cokernel_module(module_to_isogeny(M)) reproduces M up to the produced identification"));
    Ok(rep)
}

/// Whether `b` is `a` read in the basis `ident` of the free cover:
/// relations ident^-1 g, phi sigma(ident)^-1 phi ident and psi
/// ident^-1 psi sigma(ident).
fn identified(f: &BreuilFrame, a: &RawModule, b: &RawModule, ident: &Matrix<Series>) -> bool {
    let s = f.series();
    let (Some(inv), Some(sinv)) = (matrix::inverse(s, ident), matrix::inverse(s, &sigma_matrix(f, ident))) else {
        return false;
    };
    let si = sigma_matrix(f, ident);
    matrix::equal(s, &b.relations, &matrix::mul(s, &inv, &a.relations))
        && matrix::equal(s, &b.phi, &matrix::mul(s, &matrix::mul(s, &sinv, &a.phi), ident))
        && matrix::equal(s, &b.psi, &matrix::mul(s, &matrix::mul(s, &inv, &a.psi), &si))
}
