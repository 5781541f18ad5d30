//! Lifting windows and their isomorphisms along a strict surjection of
//! frames S -> S' with kernel a inside I.
//!
//! For windows w1, w2 over S and a guess G: P1 -> P2 that is an isomorphism
//! modulo a, the isomorphism g = G + Omega with Omega in M(a) solves
//! Psi2 g~ = g Psi1. With X = Omega Psi1 and D = Psi2 G~ - G Psi1 this reads
//! X = D + T(X), T(X) = Psi2 (X Psi1^-1)~, where ~ applies sigma to the
//! L -> L', T -> T' and L' <- T blocks (the last scaled by theta) and
//! sigma_1 to the T' <- L block. T is additive and nilpotent on M(a) when
//! sigma(a_i) lies in a_(i+1) and sigma_1 is nilpotent on the layers (or the
//! windows are nilpotent and a is killed by a power of J), so the Neumann
//! iteration from X = 0 reaches the unique fixed point.

use serde::{Deserialize, Serialize};

use crate::base_rings::Series;
use crate::error::{Error, Result};
use crate::frames::{El, Frame, RelIdeal, RelativeBreuilFrame, RelativeWittFrame, WittElem};
use crate::matrix::{self, Matrix};
use crate::ring::Ring;
use crate::windows::{
    ideal_matrix_add, nilpotence, twist, validate_window_hom, Window, WindowHom,
};

/// The kernel a of S -> S', with sigma_1 on it through ideal representatives.
pub trait Kernel<F: Frame> {
    fn frame(&self) -> &F;
    fn contains(&self, x: &El<F>) -> bool;
    fn to_ideal(&self, x: &El<F>) -> F::Ideal;
    /// Restores coordinates lost by sigma, for rings where sigma shortens
    /// (zero-extension on W(b)); the identity elsewhere.
    fn extend(&self, x: &El<F>) -> El<F> {
        x.clone()
    }
    /// Length of a as an abelian p-group.
    fn length(&self) -> usize;
    /// Whether J^k a = 0 for the maximal ideal J, on generators.
    fn killed_by_j_power(&self, k: usize) -> bool;
}

/// J^a inside S_(a+1) (or S_(a+1) / p^c J^a) for the relative frame.
pub struct BreuilKernel<'a> {
    pub frame: &'a RelativeBreuilFrame,
    /// when set, the kernel is p^c J^a (one layer of the p-adic filtration)
    pub p_power: u32,
}

impl<'a> BreuilKernel<'a> {
    pub fn new(frame: &'a RelativeBreuilFrame) -> Self {
        BreuilKernel { frame, p_power: 0 }
    }
}

impl Kernel<RelativeBreuilFrame> for BreuilKernel<'_> {
    fn frame(&self) -> &RelativeBreuilFrame {
        self.frame
    }
    fn contains(&self, x: &Series) -> bool {
        self.frame.in_kernel(x) && self.frame.series().divisible_by_p_power(x, self.p_power)
    }
    fn to_ideal(&self, x: &Series) -> RelIdeal {
        RelIdeal { y: self.frame.series().zero(), z: x.clone() }
    }
    fn length(&self) -> usize {
        let r = self.frame.series();
        let top = self.frame.a() as u32;
        (0..r.dim())
            .filter(|&i| r.basis().degrees[i] == top)
            .map(|i| r.precision_at(i).saturating_sub(self.p_power) as usize)
            .sum()
    }
    fn killed_by_j_power(&self, k: usize) -> bool {
        // J a lies in J^(a+1) = 0, and p a = p^(c+1) J^a needs the p-part
        let r = self.frame.series();
        let top = self.frame.a() as u32;
        let p_kills = (0..r.dim())
            .filter(|&i| r.basis().degrees[i] == top)
            .all(|i| r.precision_at(i) <= self.p_power + k as u32);
        k >= 1 && p_kills
    }
}

/// W(b) inside W_n(R_(a+1)) for b = m^a.
pub struct WittKernel<'a> {
    pub frame: &'a RelativeWittFrame,
}

impl Kernel<RelativeWittFrame> for WittKernel<'_> {
    fn frame(&self) -> &RelativeWittFrame {
        self.frame
    }
    fn contains(&self, x: &WittElem) -> bool {
        self.frame.in_kernel(x)
    }
    fn to_ideal(&self, x: &WittElem) -> WittElem {
        x.clone()
    }
    fn extend(&self, x: &WittElem) -> WittElem {
        self.frame.witt.extend_zero(x, self.frame.n())
    }
    fn length(&self) -> usize {
        let q = &self.frame.quotient;
        let top = self.frame.quotient_low.a() as u32;
        self.frame.n() * q.basis().degrees.iter().filter(|d| **d == top).count()
    }
    fn killed_by_j_power(&self, k: usize) -> bool {
        // m b = 0, and p acts on W(b) through the shifts, nilpotent in n steps
        k >= self.frame.n()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftOptions {
    /// Iteration cap; defaults to the length of Hom(P, a P) plus one.
    pub cap: Option<usize>,
    /// Nil mode: J^k a = 0 for the supplied k, and the windows must be nilpotent.
    pub nil_bound: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftTranscript {
    pub iterations: usize,
    pub cap: usize,
    pub checks: Vec<String>,
}

pub struct LiftedIso<E, I> {
    pub hom: WindowHom<E, I>,
    pub transcript: LiftTranscript,
}

/// The twist of a kernel-valued matrix, with sigma_1 taken through the
/// kernel's ideal representatives.
fn kernel_twist<F: Frame, K: Kernel<F>>(k: &K, omega: &Matrix<El<F>>, rk_l_src: usize, rk_l_dst: usize) -> Matrix<El<F>> {
    let f = k.frame();
    let c = Matrix::from_fn(omega.rows - rk_l_dst, rk_l_src, |i, j| k.to_ideal(omega.get(rk_l_dst + i, j)));
    twist(f, &WindowHom { g: omega.clone(), c }, rk_l_src, rk_l_dst)
}

/// The unique isomorphism g: w1 -> w2 with g = guess modulo a.
pub fn lift_iso<F: Frame, K: Kernel<F>>(
    k: &K,
    w1: &Window<El<F>>,
    w2: &Window<El<F>>,
    guess: &WindowHom<El<F>, F::Ideal>,
    opts: &LiftOptions,
) -> Result<LiftedIso<El<F>, F::Ideal>> {
    let f = k.frame();
    let s = f.ring();
    let h = w1.rank();
    if w2.rank() != h || w2.rk_l != w1.rk_l {
        return Err(Error::Dimension("windows of different shape".into()));
    }
    let mut checks = Vec::new();
    if let Some(bound) = opts.nil_bound {
        if !k.killed_by_j_power(bound) {
            return Err(Error::Refused(format!("J^{bound} does not kill the kernel")));
        }
        let nil = nilpotence(f, w1)?;
        if !nil.nilpotent {
            return Err(Error::Refused("nil mode needs nilpotent windows".into()));
        }
        checks.push(format!("nil mode: J^{bound} a = 0, V# nilpotent of degree {:?}", nil.degree));
    }
    let gt = twist(f, guess, w1.rk_l, w2.rk_l);
    let delta = matrix::sub(s, &matrix::mul(s, &w2.psi, &gt), &matrix::mul(s, &guess.g, &w1.psi));
    if !delta.data.iter().all(|x| k.contains(x)) {
        return Err(Error::Solver("windows are not congruent modulo the kernel along the guess".into()));
    }
    let psi1_inv = matrix::try_inverse(s, &w1.psi)?;
    let cap = opts.cap.unwrap_or(h * h * k.length() + 1);
    let omega_of = |x: &Matrix<El<F>>| matrix::mul(s, x, &psi1_inv).map(|e| k.extend(e));
    let mut x = matrix::zero(s, h, h);
    let mut iterations = 0;
    loop {
        let omega = omega_of(&x);
        let next = matrix::add(s, &delta, &matrix::mul(s, &w2.psi, &kernel_twist(k, &omega, w1.rk_l, w2.rk_l)));
        iterations += 1;
        if matrix::equal(s, &next, &x) {
            break;
        }
        if iterations >= cap {
            return Err(Error::Solver(format!(
                "Neumann iteration did not terminate within {cap} steps (nilpotence hypothesis violated)"
            )));
        }
        x = next;
    }
    let omega = omega_of(&x);
    checks.push(format!("fixed point after {iterations} iteration(s), cap {cap}"));
    let c_omega = Matrix::from_fn(w2.rk_t, w1.rk_l, |i, j| k.to_ideal(omega.get(w2.rk_l + i, j)));
    let hom = WindowHom { g: matrix::add(s, &guess.g, &omega), c: ideal_matrix_add(f, &guess.c, &c_omega) };
    let rep = validate_window_hom(f, w1, w2, &hom, true);
    if !rep.all_pass() {
        return Err(Error::Verification(format!("lifted isomorphism fails {:?}", rep.failures())));
    }
    checks.extend(rep.checks.iter().map(|c| format!("{}: {}", c.name, c.pass)));
    Ok(LiftedIso { hom, transcript: LiftTranscript { iterations, cap, checks } })
}

/// lift_iso with the identity as guess.
pub fn unique_iso<F: Frame, K: Kernel<F>>(
    k: &K,
    w1: &Window<El<F>>,
    w2: &Window<El<F>>,
    opts: &LiftOptions,
) -> Result<LiftedIso<El<F>, F::Ideal>> {
    let f = k.frame();
    let guess = crate::windows::identity_hom(f, w1.rk_l, w1.rk_t);
    lift_iso(k, w1, w2, &guess, opts)
}

/// Lift a window along S -> S' with a coefficientwise section.
pub fn lift_window<E: Clone, E2: Clone>(w: &Window<E>, section: impl Fn(&E) -> E2) -> Window<E2> {
    Window { rk_l: w.rk_l, rk_t: w.rk_t, psi: w.psi.map(section) }
}

pub fn lift_hom_guess<E: Clone, I: Clone, E2: Clone, I2: Clone>(
    g: &WindowHom<E, I>,
    section: impl Fn(&E) -> E2,
    section_ideal: impl Fn(&I) -> I2,
) -> WindowHom<E2, I2> {
    WindowHom { g: g.g.map(section), c: g.c.map(section_ideal) }
}

/// Deformation along a strict map F -> F' with S = S' and
/// I inside I': given a window w' over F' and u: L -> I' T (ideal
/// representatives of F'), return the window over F with decomposition
/// L_u = (1 + u) L and T, i.e. Psi = M^-1 Psi' [[1, 0], [sigma'_1(u), 1]] for
/// M = [[1, 0], [u, 1]], together with the isomorphism M from it (viewed
/// over F') to w'.
pub fn deform<F: Frame>(
    f2: &F,
    w: &Window<El<F>>,
    u: &Matrix<F::Ideal>,
) -> Result<(Window<El<F>>, WindowHom<El<F>, F::Ideal>)> {
    let s = f2.ring();
    let (l, t) = (w.rk_l, w.rk_t);
    if u.rows != t || u.cols != l {
        return Err(Error::Dimension("Hodge lift must map L to T".into()));
    }
    let h = l + t;
    let block = |m: &Matrix<El<F>>| {
        Matrix::from_fn(h, h, |i, j| {
            if i == j {
                s.one()
            } else if i >= l && j < l {
                m.get(i - l, j).clone()
            } else {
                s.zero()
            }
        })
    };
    let um = u.map(|a| f2.embed(a));
    let m = block(&um);
    let m_inv = block(&um.map(|x| s.neg(x)));
    let s1 = block(&u.map(|a| f2.sigma1(a)));
    let psi = matrix::mul(s, &matrix::mul(s, &m_inv, &w.psi), &s1);
    let nw = Window { rk_l: l, rk_t: t, psi };
    Ok((nw, WindowHom { g: m, c: u.clone() }))
}

fn transfer_window(w: &Window<Series>, from: &crate::base_rings::SeriesRing, to: &crate::base_rings::SeriesRing) -> Window<Series> {
    lift_window(w, |x| from.transfer(x, to))
}

/// Coefficientwise transfer of a hom, with the L -> T block recomputed from
/// the transferred ideal representatives (lifting coefficients is not a ring
/// map, so the two would drift apart).
fn transfer_hom(
    g: &WindowHom<Series, RelIdeal>,
    from: &crate::base_rings::SeriesRing,
    to: &RelativeBreuilFrame,
    rk_l: usize,
) -> WindowHom<Series, RelIdeal> {
    let rt = to.series();
    let mut out = lift_hom_guess(g, |x| from.transfer(x, rt), |i| RelIdeal { y: from.transfer(&i.y, rt), z: from.transfer(&i.z, rt) });
    let rk_t = out.c.rows;
    for i in 0..rk_t {
        for j in 0..rk_l {
            out.g.set(out.g.rows - rk_t + i, j, to.embed(out.c.get(i, j)));
        }
    }
    out
}

/// The same lift computed through the tower S_(a+1) / p^c J^a, c = 1..N,
/// each step a lift along a kernel p^(c-1) J^a on which sigma vanishes.
pub fn tower_lift_iso(
    frame: &RelativeBreuilFrame,
    w1: &Window<Series>,
    w2: &Window<Series>,
    guess: &WindowHom<Series, RelIdeal>,
) -> Result<LiftedIso<Series, RelIdeal>> {
    let full = frame.series();
    let mut current = guess.clone();
    let mut current_ring = full.clone();
    let mut iterations = 0;
    let mut cap = 0;
    let mut checks = Vec::new();
    for c in 1..=full.precision() {
        let fc = frame.with_top_precision(c)?;
        let rc = fc.series();
        let kernel = BreuilKernel { frame: &fc, p_power: c - 1 };
        let g = transfer_hom(&current, &current_ring, &fc, w1.rk_l);
        let lifted = lift_iso(&kernel, &transfer_window(w1, full, rc), &transfer_window(w2, full, rc), &g, &LiftOptions::default())?;
        iterations += lifted.transcript.iterations;
        cap += lifted.transcript.cap;
        checks.push(format!("layer p^{} J^a: {} iteration(s)", c - 1, lifted.transcript.iterations));
        current = lifted.hom;
        current_ring = rc.clone();
    }
    let hom = transfer_hom(&current, &current_ring, frame, w1.rk_l);
    let rep = validate_window_hom(frame, w1, w2, &hom, true);
    if !rep.all_pass() {
        return Err(Error::Verification(format!("tower lift fails {:?}", rep.failures())));
    }
    Ok(LiftedIso { hom, transcript: LiftTranscript { iterations, cap, checks } })
}
