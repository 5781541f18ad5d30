//! Windows over a frame in normal representation (L, T, Psi), with P = L + T
//! and Q = L + I T. Psi is the linearisation of the sigma-linear isomorphism
//! given by F_1 on L and F on T, so F_1(l + a t) = Psi(sigma(l)) +
//! sigma_1(a) Psi(t) and F(l + t) = theta Psi(sigma(l)) + Psi(sigma(t)).

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{El, Frame, FrameHom};
use crate::matrix::{self, Matrix};
use crate::report::{Check, Report};
use crate::ring::Ring;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window<E> {
    pub rk_l: usize,
    pub rk_t: usize,
    pub psi: Matrix<E>,
}

impl<E: Clone> Window<E> {
    pub fn rank(&self) -> usize {
        self.rk_l + self.rk_t
    }
}

/// An element l + sum a_j t_j of Q, with the I T part carried by ideal
/// representatives.
#[derive(Clone, Debug, PartialEq)]
pub struct QVec<E, I> {
    pub l: Vec<E>,
    pub t: Vec<I>,
}

/// A homomorphism g: P -> P' mapping Q into Q'. The block of g from L to T'
/// has entries in I and `c` carries their ideal representatives.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowHom<E, I> {
    pub g: Matrix<E>,
    pub c: Matrix<I>,
}

pub fn sigma_matrix<F: Frame>(f: &F, m: &Matrix<El<F>>) -> Matrix<El<F>> {
    m.map(|x| f.sigma(x))
}

pub fn embed_matrix<F: Frame>(f: &F, c: &Matrix<F::Ideal>) -> Matrix<El<F>> {
    c.map(|a| f.embed(a))
}

pub fn sigma1_matrix<F: Frame>(f: &F, c: &Matrix<F::Ideal>) -> Matrix<El<F>> {
    c.map(|a| f.sigma1(a))
}

/// m * c for a ring matrix m and an ideal matrix c.
pub fn ideal_mul_left<F: Frame>(f: &F, m: &Matrix<El<F>>, c: &Matrix<F::Ideal>) -> Matrix<F::Ideal> {
    assert_eq!(m.cols, c.rows, "ideal matrix shape");
    Matrix::from_fn(m.rows, c.cols, |i, j| {
        (0..m.cols).fold(f.ideal_zero(), |acc, k| f.ideal_add(&acc, &f.ideal_scale(m.get(i, k), c.get(k, j))))
    })
}

/// c * m for an ideal matrix c and a ring matrix m.
pub fn ideal_mul_right<F: Frame>(f: &F, c: &Matrix<F::Ideal>, m: &Matrix<El<F>>) -> Matrix<F::Ideal> {
    assert_eq!(c.cols, m.rows, "ideal matrix shape");
    Matrix::from_fn(c.rows, m.cols, |i, j| {
        (0..c.cols).fold(f.ideal_zero(), |acc, k| f.ideal_add(&acc, &f.ideal_scale(m.get(k, j), c.get(i, k))))
    })
}

pub fn ideal_matrix_add<F: Frame>(f: &F, a: &Matrix<F::Ideal>, b: &Matrix<F::Ideal>) -> Matrix<F::Ideal> {
    Matrix::from_fn(a.rows, a.cols, |i, j| f.ideal_add(a.get(i, j), b.get(i, j)))
}

pub fn ideal_matrix_zero<F: Frame>(f: &F, rows: usize, cols: usize) -> Matrix<F::Ideal> {
    Matrix::from_fn(rows, cols, |_, _| f.ideal_zero())
}

/// Ideal representatives for a matrix with entries in I, if they exist.
pub fn to_ideal_matrix<F: Frame>(f: &F, m: &Matrix<El<F>>) -> Option<Matrix<F::Ideal>> {
    let data = m.data.iter().map(|x| f.to_ideal(x)).collect::<Option<Vec<_>>>()?;
    Some(Matrix { rows: m.rows, cols: m.cols, data })
}

/// diag(theta 1_L, 1_T).
pub fn theta_diag<F: Frame>(f: &F, rk_l: usize, rk_t: usize) -> Matrix<El<F>> {
    let s = f.ring();
    let d: Vec<El<F>> = (0..rk_l).map(|_| f.theta()).chain((0..rk_t).map(|_| s.one())).collect();
    matrix::diagonal(s, &d)
}

pub fn eval_f<F: Frame>(f: &F, w: &Window<El<F>>, x: &[El<F>]) -> Vec<El<F>> {
    let s = f.ring();
    let theta = f.theta();
    let v: Vec<El<F>> = x
        .iter()
        .enumerate()
        .map(|(i, xi)| if i < w.rk_l { s.mul(&theta, &f.sigma(xi)) } else { f.sigma(xi) })
        .collect();
    matrix::mul_vec(s, &w.psi, &v)
}

pub fn eval_f1<F: Frame>(f: &F, w: &Window<El<F>>, q: &QVec<El<F>, F::Ideal>) -> Vec<El<F>> {
    let v: Vec<El<F>> = q.l.iter().map(|x| f.sigma(x)).chain(q.t.iter().map(|a| f.sigma1(a))).collect();
    matrix::mul_vec(f.ring(), &w.psi, &v)
}

/// The element of P underlying q.
pub fn q_to_p<F: Frame>(f: &F, q: &QVec<El<F>, F::Ideal>) -> Vec<El<F>> {
    q.l.iter().cloned().chain(q.t.iter().map(|a| f.embed(a))).collect()
}

/// a x for a in I and x in P, as an element of Q.
pub fn ideal_times<F: Frame>(f: &F, w: &Window<El<F>>, a: &F::Ideal, x: &[El<F>]) -> QVec<El<F>, F::Ideal> {
    let e = f.embed(a);
    QVec {
        l: x[..w.rk_l].iter().map(|xi| f.ring().mul(&e, xi)).collect(),
        t: x[w.rk_l..].iter().map(|xi| f.ideal_scale(xi, a)).collect(),
    }
}

pub fn random_q<F: Frame>(f: &F, w: &Window<El<F>>, rng: &mut dyn RngCore) -> QVec<El<F>, F::Ideal> {
    QVec {
        l: (0..w.rk_l).map(|_| f.ring().random(rng)).collect(),
        t: (0..w.rk_t).map(|_| f.random_ideal(rng)).collect(),
    }
}

pub fn random_window<F: Frame>(f: &F, rk_l: usize, rk_t: usize, rng: &mut dyn RngCore) -> Window<El<F>> {
    Window { rk_l, rk_t, psi: matrix::random_invertible(f.ring(), rk_l + rk_t, rng) }
}

pub fn identity_window<F: Frame>(f: &F, rk_l: usize, rk_t: usize) -> Window<El<F>> {
    Window { rk_l, rk_t, psi: matrix::identity(f.ring(), rk_l + rk_t) }
}

/// Window axioms: Psi invertible (equivalently F_1(Q) generates P, and in
/// generalised frames F_1(Q) + F(P) generates P), plus sigma-linearity of F
/// and F_1 and F = theta F_1 on Q on random elements.
pub fn validate_window<F: Frame>(f: &F, w: &Window<El<F>>, rng: &mut dyn RngCore, samples: usize) -> Report {
    let s = f.ring();
    let mut rep = Report::default();
    let h = w.rank();
    let shape = w.psi.rows == h && w.psi.cols == h;
    rep.push(Check::new("window-shape", "Psi is square of size rk L + rk T", shape));
    if !shape {
        return rep;
    }
    let det = matrix::det(s, &w.psi);
    let inv = s.is_unit(&det);
    let what = if f.generalised() {
        "F_1(Q) + F(P) generates P (Psi invertible)"
    } else {
        "F_1(Q) generates P (Psi invertible)"
    };
    rep.push(Check::new("window-generation", what, inv));

    let mut lin = true;
    let mut f1_lin = true;
    let mut rel = true;
    for _ in 0..samples {
        let x: Vec<El<F>> = (0..h).map(|_| s.random(rng)).collect();
        let c = s.random(rng);
        let cx: Vec<El<F>> = x.iter().map(|xi| s.mul(&c, xi)).collect();
        let lhs = eval_f(f, w, &cx);
        let rhs: Vec<El<F>> = eval_f(f, w, &x).iter().map(|y| s.mul(&f.sigma(&c), y)).collect();
        lin &= lhs.iter().zip(&rhs).all(|(a, b)| s.eq(a, b));

        let a = f.random_ideal(rng);
        let ax = ideal_times(f, w, &a, &x);
        let lhs = eval_f1(f, w, &ax);
        let s1 = f.sigma1(&a);
        let rhs: Vec<El<F>> = eval_f(f, w, &x).iter().map(|y| s.mul(&s1, y)).collect();
        f1_lin &= lhs.iter().zip(&rhs).all(|(a, b)| s.eq(a, b));

        let q = random_q(f, w, rng);
        let fq = eval_f(f, w, &q_to_p(f, &q));
        let theta = f.theta();
        let tf1: Vec<El<F>> = eval_f1(f, w, &q).iter().map(|y| s.mul(&theta, y)).collect();
        rel &= fq.iter().zip(&tf1).all(|(a, b)| s.eq(a, b));
    }
    rep.push(Check::new("window-f-semilinear", "F(s x) = sigma(s) F(x)", lin));
    rep.push(Check::new("window-f1-ideal", "F_1(a x) = sigma_1(a) F(x) for a in I", f1_lin));
    rep.push(Check::new("window-f-theta", "F(x) = theta F_1(x) on Q", rel));
    rep
}

/// The matrix [[sigma A, theta sigma B], [sigma_1 C, sigma D]] with which
/// F_1' g = g F_1 becomes Psi' g~ = g Psi.
pub fn twist<F: Frame>(
    f: &F,
    hom: &WindowHom<El<F>, F::Ideal>,
    rk_l_src: usize,
    rk_l_dst: usize,
) -> Matrix<El<F>> {
    let s = f.ring();
    let theta = f.theta();
    let g = &hom.g;
    Matrix::from_fn(g.rows, g.cols, |i, j| match (i < rk_l_dst, j < rk_l_src) {
        (true, true) | (false, false) => f.sigma(g.get(i, j)),
        (true, false) => s.mul(&theta, &f.sigma(g.get(i, j))),
        (false, true) => f.sigma1(hom.c.get(i - rk_l_dst, j)),
    })
}

pub fn identity_hom<F: Frame>(f: &F, rk_l: usize, rk_t: usize) -> WindowHom<El<F>, F::Ideal> {
    WindowHom { g: matrix::identity(f.ring(), rk_l + rk_t), c: ideal_matrix_zero(f, rk_t, rk_l) }
}

/// A hom from a ring matrix whose lower-left block lies in I.
pub fn hom_from_matrix<F: Frame>(f: &F, g: Matrix<El<F>>, rk_l_src: usize, rk_l_dst: usize) -> Result<WindowHom<El<F>, F::Ideal>> {
    let block = g.block(rk_l_dst, g.rows, 0, rk_l_src);
    let c = to_ideal_matrix(f, &block)
        .ok_or_else(|| Error::NotInIdeal("block L -> T' of g is not in I".into()))?;
    Ok(WindowHom { g, c })
}

/// Checks that `hom` is a homomorphism w -> w2 (and an isomorphism when
/// `iso` is set).
pub fn validate_window_hom<F: Frame>(
    f: &F,
    w: &Window<El<F>>,
    w2: &Window<El<F>>,
    hom: &WindowHom<El<F>, F::Ideal>,
    iso: bool,
) -> Report {
    let s = f.ring();
    let mut rep = Report::default();
    let g = &hom.g;
    let shape = g.rows == w2.rank() && g.cols == w.rank() && hom.c.rows == w2.rk_t && hom.c.cols == w.rk_l;
    rep.push(Check::new("hom-shape", "g maps L + T to L' + T'", shape));
    if !shape {
        return rep;
    }
    let block = g.block(w2.rk_l, g.rows, 0, w.rk_l);
    let q = matrix::equal(s, &block, &embed_matrix(f, &hom.c));
    rep.push(Check::new("hom-q", "g(Q) lies in Q'", q));
    let gt = twist(f, hom, w.rk_l, w2.rk_l);
    let f1 = matrix::equal(s, &matrix::mul(s, &w2.psi, &gt), &matrix::mul(s, g, &w.psi));
    rep.push(Check::new("hom-f1", "F_1' g = g F_1", f1));
    let lhs = matrix::mul(s, &matrix::mul(s, &w2.psi, &theta_diag(f, w2.rk_l, w2.rk_t)), &sigma_matrix(f, g));
    let rhs = matrix::mul(s, &matrix::mul(s, g, &w.psi), &theta_diag(f, w.rk_l, w.rk_t));
    rep.push(Check::new("hom-f", "F' g = g F", matrix::equal(s, &lhs, &rhs)));
    if iso {
        let ok = g.is_square() && s.is_unit(&matrix::det(s, g));
        rep.push(Check::new("hom-invertible", "g is invertible", ok));
    }
    rep
}

/// h g for g: w -> w2 and h: w2 -> w3.
pub fn compose<F: Frame>(
    f: &F,
    g: &WindowHom<El<F>, F::Ideal>,
    h: &WindowHom<El<F>, F::Ideal>,
    rk_l_mid: usize,
) -> WindowHom<El<F>, F::Ideal> {
    let s = f.ring();
    let gm = matrix::mul(s, &h.g, &g.g);
    // (h g)_{T''L} = C_h A_g + D_h C_g
    let a_g = g.g.block(0, rk_l_mid, 0, g.c.cols);
    let d_h = h.g.block(h.g.rows - h.c.rows, h.g.rows, rk_l_mid, h.g.cols);
    let c = ideal_matrix_add(f, &ideal_mul_right(f, &h.c, &a_g), &ideal_mul_left(f, &d_h, &g.c));
    WindowHom { g: gm, c }
}

/// The inverse of an isomorphism of windows with rk L on both sides.
pub fn invert_hom<F: Frame>(f: &F, g: &WindowHom<El<F>, F::Ideal>, rk_l: usize) -> Result<WindowHom<El<F>, F::Ideal>> {
    let s = f.ring();
    let h = g.g.rows;
    let inv = matrix::try_inverse(s, &g.g)?;
    // (g^-1)_{TL} = -S^-1 C A^-1 with S = D - C A^-1 B the Schur complement
    let a = g.g.block(0, rk_l, 0, rk_l);
    let ai = matrix::try_inverse(s, &a)?;
    let schur_inv = inv.block(rk_l, h, rk_l, h);
    let neg = matrix::neg(s, &schur_inv);
    let c = ideal_mul_right(f, &ideal_mul_left(f, &neg, &g.c), &ai);
    Ok(WindowHom { g: inv, c })
}

/// Base change along a u-homomorphism of frames: Psi' = alpha(Psi) diag(u, 1).
pub fn base_change<H: FrameHom>(h: &H, w: &Window<El<H::Src>>) -> Window<El<H::Dst>> {
    let t = h.target().ring();
    let u = h.unit();
    let a = w.psi.map(|x| h.map(x));
    let psi = Matrix::from_fn(a.rows, a.cols, |i, j| {
        if j < w.rk_l {
            t.mul(a.get(i, j), &u)
        } else {
            a.get(i, j).clone()
        }
    });
    Window { rk_l: w.rk_l, rk_t: w.rk_t, psi }
}

pub fn base_change_hom<H: FrameHom>(
    h: &H,
    g: &WindowHom<El<H::Src>, <H::Src as Frame>::Ideal>,
) -> WindowHom<El<H::Dst>, <H::Dst as Frame>::Ideal> {
    WindowHom { g: g.g.map(|x| h.map(x)), c: g.c.map(|a| h.map_ideal(a)) }
}

/// The permutation taking the basis (T, L) to (L, T) for the given ranks,
/// as a permutation of indices: position k of (T, L) order comes from
/// `perm[k]` in (L, T) order.
fn block_swap(rk_first: usize, rk_second: usize) -> Vec<usize> {
    (rk_first..rk_first + rk_second).chain(0..rk_first).collect()
}

/// The dual window in the dual basis reordered as (T^v, L^v):
/// Psi' = Pi (Psi^-1)^T Pi^T, so L' = T^v and T' = L^v.
pub fn dual<F: Frame>(f: &F, w: &Window<El<F>>) -> Result<Window<El<F>>> {
    let inv = matrix::try_inverse(f.ring(), &w.psi)?.transpose();
    let perm = block_swap(w.rk_l, w.rk_t);
    let psi = Matrix::from_fn(w.rank(), w.rank(), |i, j| inv.get(perm[i], perm[j]).clone());
    Ok(Window { rk_l: w.rk_t, rk_t: w.rk_l, psi })
}

/// The Hodge filtration Q / I P inside P / I P: the span of the L basis.
/// Returned as the columns of a basis, reduced by `reduce` to R = S/I.
pub fn hodge<F: Frame, E: Clone>(f: &F, w: &Window<El<F>>, reduce: impl Fn(&El<F>) -> E) -> Matrix<E> {
    let id = matrix::identity(f.ring(), w.rank());
    id.block(0, w.rank(), 0, w.rk_l).map(reduce)
}

/// V^# = diag(1, theta) Psi^-1, satisfying V^# F_1^# = the inclusion of Q^(sigma).
pub fn v_sharp<F: Frame>(f: &F, w: &Window<El<F>>) -> Result<Matrix<El<F>>> {
    let s = f.ring();
    let inv = matrix::try_inverse(s, &w.psi)?;
    let d: Vec<El<F>> = (0..w.rk_l).map(|_| s.one()).chain((0..w.rk_t).map(|_| f.theta())).collect();
    Ok(matrix::mul(s, &matrix::diagonal(s, &d), &inv))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nilpotence {
    pub nilpotent: bool,
    /// least k with (V^#)^(k) = 0 modulo the maximal ideal
    pub degree: Option<usize>,
    pub lambda_nilpotent: bool,
    pub lambda_degree: Option<usize>,
}

/// Matrix over F_p.
pub type FpMatrix = Matrix<u64>;

pub fn fp_mul(p: u64, a: &FpMatrix, b: &FpMatrix) -> FpMatrix {
    Matrix::from_fn(a.rows, b.cols, |i, j| (0..a.cols).map(|k| a.get(i, k) * b.get(k, j)).sum::<u64>() % p)
}

/// Least k <= rows with m^k = 0, if any.
pub fn fp_nilpotency(p: u64, m: &FpMatrix) -> Option<usize> {
    let n = m.rows;
    if n == 0 {
        return Some(0);
    }
    let mut pow = m.clone();
    for k in 1..=n {
        if pow.data.iter().all(|x| *x == 0) {
            return Some(k);
        }
        pow = fp_mul(p, &pow, m);
    }
    None
}

/// Nilpotence modulo the maximal ideal m of S. The twisted powers
/// V^(sigma^(k-1)) ... V^(sigma) V reduce mod m to plain powers, since sigma
/// induces the identity on S/m = F_p. Both the V^# criterion and the
/// criterion on lambda = the L -> L block of Psi^-1 are computed.
pub fn nilpotence<F: Frame>(f: &F, w: &Window<El<F>>) -> Result<Nilpotence> {
    let p = f.ring().prime();
    let v = v_sharp(f, w)?;
    let vbar = v.map(|x| f.residue(x));
    let degree = fp_nilpotency(p, &vbar);
    let lambda = vbar.block(0, w.rk_l, 0, w.rk_l);
    let lambda_degree = fp_nilpotency(p, &lambda);
    Ok(Nilpotence { nilpotent: degree.is_some(), degree, lambda_nilpotent: lambda_degree.is_some(), lambda_degree })
}

/// The twisted power V^(sigma^(k-1)) ... V^(sigma) V computed in S.
pub fn twisted_power<F: Frame>(f: &F, m: &Matrix<El<F>>, k: usize) -> Matrix<El<F>> {
    let s = f.ring();
    let mut acc = matrix::identity(s, m.rows);
    let mut cur = m.clone();
    for _ in 0..k {
        acc = matrix::mul(s, &cur, &acc);
        cur = sigma_matrix(f, &cur);
    }
    acc
}

/// A random automorphism of L + T preserving Q.
pub fn random_iso<F: Frame>(f: &F, rk_l: usize, rk_t: usize, rng: &mut dyn RngCore) -> WindowHom<El<F>, F::Ideal> {
    let s = f.ring();
    let h = rk_l + rk_t;
    loop {
        let mut g = matrix::random(s, h, h, rng);
        let c = Matrix::from_fn(rk_t, rk_l, |_, _| f.random_ideal(rng));
        for i in 0..rk_t {
            for j in 0..rk_l {
                g.set(rk_l + i, j, f.embed(c.get(i, j)));
            }
        }
        if s.is_unit(&matrix::det(s, &g)) {
            return WindowHom { g, c };
        }
    }
}

/// The window w' = g_* w with Psi' = g Psi g~^-1, so that g: w -> w' is an
/// isomorphism.
pub fn transport<F: Frame>(f: &F, w: &Window<El<F>>, hom: &WindowHom<El<F>, F::Ideal>) -> Result<Window<El<F>>> {
    let s = f.ring();
    let gt = twist(f, hom, w.rk_l, w.rk_l);
    let gti = matrix::try_inverse(s, &gt)?;
    let psi = matrix::mul(s, &matrix::mul(s, &hom.g, &w.psi), &gti);
    Ok(Window { rk_l: w.rk_l, rk_t: w.rk_t, psi })
}
