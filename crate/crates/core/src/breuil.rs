//! Breuil windows (Q, phi, psi) over S_a and Breuil modules carried as
//! isogeny presentations.
//!
//! phi: Q -> Q^(sigma) and psi: Q^(sigma) -> Q are matrices in a fixed basis
//! of Q and the induced basis of Q^(sigma). A change of basis U of Q acts by
//! phi -> sigma(U)^-1 phi U and psi -> U^-1 psi sigma(U).

use serde::{Deserialize, Serialize};

use crate::base_rings::{Series, SeriesRing};
use crate::error::{Error, Result};
use crate::frames::{BreuilFrame, Frame};
use crate::linear::solve_linear_map;
use crate::matrix::{self, Matrix};
use crate::report::{Check, Report};
use crate::ring::Ring;
use crate::windows::{fp_mul, sigma_matrix, FpMatrix, Window};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BreuilWindow {
    pub rank: usize,
    pub phi: Matrix<Series>,
    pub psi: Matrix<Series>,
}

/// A window together with the bases it was read off in: phi U = V diag(1, E).
#[derive(Clone, Debug)]
pub struct WindowBases {
    pub window: Window<Series>,
    pub u: Matrix<Series>,
    pub v: Matrix<Series>,
}

fn e_diag(f: &BreuilFrame, ones: usize, es: usize) -> Matrix<Series> {
    let s = f.series();
    let d: Vec<Series> = (0..ones).map(|_| s.one()).chain((0..es).map(|_| f.level.e.clone())).collect();
    matrix::diagonal(s, &d)
}

fn square(h: usize, x: &[Series]) -> Matrix<Series> {
    Matrix { rows: h, cols: h, data: x.to_vec() }
}

fn scaled_identity(s: &SeriesRing, c: &Series, n: usize) -> Matrix<Series> {
    matrix::scale(s, c, &matrix::identity(s, n))
}

impl BreuilWindow {
    /// Checks psi phi = E = phi psi.
    pub fn validate(&self, f: &BreuilFrame) -> Report {
        let s = f.series();
        let e = scaled_identity(s, &f.level.e, self.rank);
        let mut rep = Report::default();
        rep.push(Check::new("breuil-psi-phi", "psi phi = E", matrix::equal(s, &matrix::mul(s, &self.psi, &self.phi), &e)));
        rep.push(Check::new("breuil-phi-psi", "phi psi = E", matrix::equal(s, &matrix::mul(s, &self.phi, &self.psi), &e)));
        rep
    }

    pub fn from_phi(f: &BreuilFrame, phi: Matrix<Series>) -> Result<Self> {
        let psi = psi_from_phi(f, &phi)?;
        Ok(BreuilWindow { rank: phi.rows, phi, psi })
    }

    pub fn change_basis(&self, f: &BreuilFrame, u: &Matrix<Series>) -> Result<Self> {
        let s = f.series();
        let su = sigma_matrix(f, u);
        let (ui, sui) = (matrix::try_inverse(s, u)?, matrix::try_inverse(s, &su)?);
        Ok(BreuilWindow {
            rank: self.rank,
            phi: matrix::mul(s, &sui, &matrix::mul(s, &self.phi, u)),
            psi: matrix::mul(s, &ui, &matrix::mul(s, &self.psi, &su)),
        })
    }
}

/// The unique-at-this-precision psi with psi phi = E, checked against
/// phi psi = E as well.
pub fn psi_from_phi(f: &BreuilFrame, phi: &Matrix<Series>) -> Result<Matrix<Series>> {
    let s = f.series();
    let h = phi.rows;
    if !phi.is_square() {
        return Err(Error::Dimension("phi must be square".into()));
    }
    let apply = |x: &[Series]| {
        let m = Matrix { rows: h, cols: h, data: x.to_vec() };
        matrix::mul(s, &m, phi).data
    };
    let rhs = scaled_identity(s, &f.level.e, h).data;
    let sol = solve_linear_map(s, h * h, apply, &rhs)?
        .ok_or_else(|| Error::NoSolution("no psi with psi phi = E: coker phi is not killed by E".into()))?;
    let psi = Matrix { rows: h, cols: h, data: sol };
    if !matrix::equal(s, &matrix::mul(s, phi, &psi), &scaled_identity(s, &f.level.e, h)) {
        return Err(Error::NoSolution("psi phi = E has a solution but phi psi != E".into()));
    }
    Ok(psi)
}

/// The B_a-window P = Q^(sigma), Q -> P via phi, F_1(x) = 1 (x) x. A normal
/// decomposition comes from reducing phi to diag(1, E) by unit-pivot row and
/// column operations.
pub fn to_window(f: &BreuilFrame, b: &BreuilWindow) -> Result<WindowBases> {
    let s = f.series();
    let h = b.rank;
    let mut m = b.phi.clone();
    // m = vinv phi u throughout
    let mut u = matrix::identity(s, h);
    let mut vinv = matrix::identity(s, h);
    let mut l = 0;
    while let Some((i, j)) = (l..h).flat_map(|i| (l..h).map(move |j| (i, j))).find(|&(i, j)| s.is_unit(m.get(i, j))) {
        swap_cols(&mut m, l, j);
        swap_cols(&mut u, l, j);
        m.swap_rows(l, i);
        vinv.swap_rows(l, i);
        let inv = s.inv(m.get(l, l)).expect("pivot is a unit");
        scale_row(s, &mut m, l, &inv);
        scale_row(s, &mut vinv, l, &inv);
        for r in 0..h {
            if r != l {
                let c = m.get(r, l).clone();
                add_row_multiple(s, &mut m, r, l, &c);
                add_row_multiple(s, &mut vinv, r, l, &c);
            }
        }
        for c in l + 1..h {
            let x = m.get(l, c).clone();
            add_col_multiple(s, &mut m, c, l, &x);
            add_col_multiple(s, &mut u, c, l, &x);
        }
        l += 1;
    }
    let t = h - l;
    let rest = m.block(l, h, l, h);
    let k = rest.try_map(|x| f.level.exact_div_e(x)).map_err(|_| {
        Error::InconsistentDecomposition("coker phi is not a free R-module: the non-unit block is not E times a matrix".into())
    })?;
    let kinv = matrix::inverse(s, &k).ok_or_else(|| {
        Error::InconsistentDecomposition("coker phi is not a free R-module: the non-unit block is not E times a unit".into())
    })?;
    let fix = Matrix::from_blocks(&matrix::identity(s, l), &matrix::zero(s, l, t), &matrix::zero(s, t, l), &kinv);
    let v = matrix::try_inverse(s, &vinv)?;
    // the T columns of U are only fixed up to ker phi; psi V_T is the choice
    // that keeps psi, so that from_window inverts this exactly
    let mut u = matrix::mul(s, &u, &fix);
    let psi_v = matrix::mul(s, &b.psi, &v);
    for i in 0..h {
        for j in l..h {
            u.set(i, j, psi_v.get(i, j).clone());
        }
    }
    if matrix::inverse(s, &u).is_none() {
        return Err(Error::InconsistentDecomposition("psi V_T does not complete a basis of Q".into()));
    }
    if !matrix::equal(s, &matrix::mul(s, &b.phi, &u), &matrix::mul(s, &v, &e_diag(f, l, t))) {
        return Err(Error::Verification("normal decomposition of phi does not reproduce phi".into()));
    }
    let psi = matrix::mul(s, &vinv, &sigma_matrix(f, &u));
    Ok(WindowBases { window: Window { rk_l: l, rk_t: t, psi }, u, v })
}

/// phi = Psi^-1 diag(1, E), psi = diag(E, 1) Psi.
pub fn from_window(f: &BreuilFrame, w: &Window<Series>) -> Result<BreuilWindow> {
    let s = f.series();
    let inv = matrix::try_inverse(s, &w.psi)?;
    let phi = matrix::mul(s, &inv, &e_diag(f, w.rk_l, w.rk_t));
    let d2: Vec<Series> = (0..w.rk_l).map(|_| f.level.e.clone()).chain((0..w.rk_t).map(|_| s.one())).collect();
    let psi = matrix::mul(s, &matrix::diagonal(s, &d2), &w.psi);
    let b = BreuilWindow { rank: w.rank(), phi, psi };
    let rep = b.validate(f);
    if !rep.all_pass() {
        return Err(Error::Verification(format!("window gives no Breuil window: {:?}", rep.failures())));
    }
    Ok(b)
}

/// (Q^v, psi^T): the roles of phi and psi swap under transpose.
pub fn dual_breuil(b: &BreuilWindow) -> BreuilWindow {
    BreuilWindow { rank: b.rank, phi: b.psi.transpose(), psi: b.phi.transpose() }
}

fn swap_cols(m: &mut Matrix<Series>, a: usize, b: usize) {
    if a != b {
        for r in 0..m.rows {
            m.data.swap(r * m.cols + a, r * m.cols + b);
        }
    }
}

fn scale_row(s: &SeriesRing, m: &mut Matrix<Series>, r: usize, c: &Series) {
    for j in 0..m.cols {
        let x = s.mul(c, m.get(r, j));
        m.set(r, j, x);
    }
}

/// row r -= c row k
fn add_row_multiple(s: &SeriesRing, m: &mut Matrix<Series>, r: usize, k: usize, c: &Series) {
    for j in 0..m.cols {
        let x = s.sub(m.get(r, j), &s.mul(c, m.get(k, j)));
        m.set(r, j, x);
    }
}

/// col c -= x col k
fn add_col_multiple(s: &SeriesRing, m: &mut Matrix<Series>, c: usize, k: usize, x: &Series) {
    for i in 0..m.rows {
        let y = s.sub(m.get(i, c), &s.mul(x, m.get(i, k)));
        m.set(i, c, y);
    }
}

/// A homomorphism g: (Q', phi', psi') -> (Q, phi, psi) with a witness h and
/// k <= N - 1 such that g h = p^k = h g.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Isogeny {
    pub source: BreuilWindow,
    pub target: BreuilWindow,
    pub map: Matrix<Series>,
    pub exponent: u32,
    pub inverse: Matrix<Series>,
}

impl Isogeny {
    /// Finds the least exponent k with p^k a multiple of det g and checks
    /// compatibility with phi and psi.
    pub fn new(f: &BreuilFrame, source: BreuilWindow, target: BreuilWindow, map: Matrix<Series>) -> Result<Self> {
        let s = f.series();
        let h = map.rows;
        if source.rank != h || target.rank != h || !map.is_square() {
            return Err(Error::Dimension("isogeny between windows of different rank".into()));
        }
        let mut found = None;
        for k in 0..s.precision() {
            let pk = scaled_identity(s, &s.from_u64(s.prime().pow(k)), h);
            let both = |x: &[Series]| {
                let m = square(h, x);
                matrix::mul(s, &map, &m).data.into_iter().chain(matrix::mul(s, &m, &map).data).collect()
            };
            let rhs: Vec<Series> = pk.data.iter().chain(&pk.data).cloned().collect();
            if let Some(x) = solve_linear_map(s, h * h, both, &rhs)? {
                found = Some((k, square(h, &x)));
                break;
            }
        }
        let (exponent, inverse) = found.ok_or_else(|| {
            Error::Precision(format!("no p^k with k <= {} factors through g: not an isogeny at this precision", s.precision() - 1))
        })?;
        let iso = Isogeny { source, target, map, exponent, inverse };
        let rep = iso.validate(f);
        if !rep.all_pass() {
            return Err(Error::Verification(format!("not an isogeny: {:?}", rep.failures())));
        }
        Ok(iso)
    }

    pub fn validate(&self, f: &BreuilFrame) -> Report {
        let s = f.series();
        let sg = sigma_matrix(f, &self.map);
        let pk = scaled_identity(s, &s.from_u64(s.prime().pow(self.exponent)), self.map.rows);
        let mut rep = Report::default();
        rep.extend(self.source.validate(f));
        rep.extend(self.target.validate(f));
        rep.push(Check::new(
            "isogeny-phi",
            "sigma(g) phi' = phi g",
            matrix::equal(s, &matrix::mul(s, &sg, &self.source.phi), &matrix::mul(s, &self.target.phi, &self.map)),
        ));
        rep.push(Check::new(
            "isogeny-psi",
            "psi sigma(g) = g psi'",
            matrix::equal(s, &matrix::mul(s, &self.target.psi, &sg), &matrix::mul(s, &self.map, &self.source.psi)),
        ));
        rep.push(Check::new("isogeny-p-power", "g h = p^k = h g", {
            matrix::equal(s, &matrix::mul(s, &self.map, &self.inverse), &pk) && matrix::equal(s, &matrix::mul(s, &self.inverse, &self.map), &pk)
        }));
        rep
    }
}

/// The raw triple of a Breuil module: M = coker(relations), with phi and psi
/// given as lifts to the free cover Q.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawModule {
    pub relations: Matrix<Series>,
    pub phi: Matrix<Series>,
    pub psi: Matrix<Series>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BreuilModule {
    pub presentation: Isogeny,
}

impl BreuilModule {
    pub fn raw(&self) -> RawModule {
        let t = &self.presentation.target;
        RawModule { relations: self.presentation.map.clone(), phi: t.phi.clone(), psi: t.psi.clone() }
    }

    /// phi and psi descend to M = coker g and M^(sigma) = coker sigma(g), both
    /// composites are E, and p^k kills M.
    pub fn validate(&self, f: &BreuilFrame) -> Report {
        let s = f.series();
        let i = &self.presentation;
        let mut rep = i.validate(f);
        let raw = self.raw();
        let e = scaled_identity(s, &f.level.e, i.map.rows);
        let sg = sigma_matrix(f, &raw.relations);
        let ok_phi = image_contains(f, &sg, &matrix::mul(s, &raw.phi, &raw.relations));
        let ok_psi = image_contains(f, &raw.relations, &matrix::mul(s, &raw.psi, &sg));
        rep.push(Check::new("module-phi-descends", "phi maps im g into im sigma(g)", ok_phi));
        rep.push(Check::new("module-psi-descends", "psi maps im sigma(g) into im g", ok_psi));
        let d1 = matrix::sub(s, &matrix::mul(s, &raw.phi, &raw.psi), &e);
        let d2 = matrix::sub(s, &matrix::mul(s, &raw.psi, &raw.phi), &e);
        rep.push(Check::new("module-phi-psi", "phi_M psi_M = E on M^(sigma)", image_contains(f, &sg, &d1)));
        rep.push(Check::new("module-psi-phi", "psi_M phi_M = E on M", image_contains(f, &raw.relations, &d2)));
        rep
    }

    pub fn is_zero(&self, f: &BreuilFrame) -> bool {
        matrix::inverse(f.series(), &self.presentation.map).is_some()
    }
}

/// Whether every column of `b` lies in the column span of `a`.
fn image_contains(f: &BreuilFrame, a: &Matrix<Series>, b: &Matrix<Series>) -> bool {
    let s = f.series();
    let k = a.cols;
    (0..b.cols).all(|j| {
        let rhs = b.column(j);
        matches!(solve_linear_map(s, k, |x| matrix::mul_vec(s, a, x), &rhs), Ok(Some(_)))
    })
}

/// The cokernel of an isogeny, with phi and psi induced by the target.
pub fn cokernel_module(f: &BreuilFrame, i: &Isogeny) -> Result<BreuilModule> {
    let m = BreuilModule { presentation: i.clone() };
    let rep = m.validate(f);
    if !rep.all_pass() {
        return Err(Error::Verification(format!("cokernel is not a Breuil module: {:?}", rep.failures())));
    }
    Ok(m)
}

/// An isogeny presenting a raw triple: the target is (Q, phi, psi) and the
/// map is the relation matrix. On the source, phi' and psi' are pinned by
/// sigma(g) phi' = phi g and g psi' = psi sigma(g) only up to the kernels of
/// sigma(g) and g. Within those kernels, psi' phi' = E = phi' psi' is reached
/// by Newton steps. Each step multiplies the defect by an element of
/// ker(g) ker(sigma(g)), so it converges when the kernels lie in a high power
/// of p. The returned identification of cokernels is the identity of Q.
pub fn module_to_isogeny(f: &BreuilFrame, raw: &RawModule) -> Result<(Isogeny, Matrix<Series>)> {
    let s = f.series();
    let h = raw.relations.rows;
    let target = BreuilWindow { rank: h, phi: raw.phi.clone(), psi: raw.psi.clone() };
    if !target.validate(f).all_pass() {
        return Err(Error::Precision(
            "lifts of phi_M and psi_M do not compose to E on the free cover; raise N or pass exact lifts".into(),
        ));
    }
    let g = &raw.relations;
    let sg = sigma_matrix(f, g);
    let obstruction = |what: &str| Error::Precision(format!("lifting obstruction for {what} at this precision; raise N"));
    let mut x = solve_linear_map(s, h * h, |x| matrix::mul(s, &sg, &square(h, x)).data, &matrix::mul(s, &raw.phi, g).data)?
        .map(|x| square(h, &x))
        .ok_or_else(|| obstruction("phi'"))?;
    let mut y = solve_linear_map(s, h * h, |y| matrix::mul(s, g, &square(h, y)).data, &matrix::mul(s, &raw.psi, &sg).data)?
        .map(|y| square(h, &y))
        .ok_or_else(|| obstruction("psi'"))?;
    let e = scaled_identity(s, &f.level.e, h);
    let zero = matrix::zero(s, h, h);
    for _ in 0..=s.precision() {
        let d1 = matrix::sub(s, &e, &matrix::mul(s, &y, &x));
        let d2 = matrix::sub(s, &e, &matrix::mul(s, &x, &y));
        if matrix::is_zero(s, &d1) && matrix::is_zero(s, &d2) {
            break;
        }
        // unknowns (dx, dy): sigma(g) dx = 0, g dy = 0, y dx + dy x = d1,
        // x dy + dx y = d2
        let lin = |v: &[Series]| {
            let (dx, dy) = (square(h, &v[..h * h]), square(h, &v[h * h..]));
            let mut out = matrix::mul(s, &sg, &dx).data;
            out.extend(matrix::mul(s, g, &dy).data);
            out.extend(matrix::add(s, &matrix::mul(s, &y, &dx), &matrix::mul(s, &dy, &x)).data);
            out.extend(matrix::add(s, &matrix::mul(s, &x, &dy), &matrix::mul(s, &dx, &y)).data);
            out
        };
        let rhs: Vec<Series> = zero.data.iter().chain(&zero.data).chain(&d1.data).chain(&d2.data).cloned().collect();
        let step = solve_linear_map(s, 2 * h * h, lin, &rhs)?.ok_or_else(|| obstruction("the source window"))?;
        x = matrix::add(s, &x, &square(h, &step[..h * h]));
        y = matrix::add(s, &y, &square(h, &step[h * h..]));
    }
    let source = BreuilWindow { rank: h, phi: x, psi: y };
    if !source.validate(f).all_pass() {
        return Err(obstruction("the source window"));
    }
    let iso = Isogeny::new(f, source, target, g.clone())?;
    Ok((iso, matrix::identity(s, h)))
}

/// Ext^1(M, S) = coker(g^T) for the transposed isogeny between dual windows.
pub fn dual_module(f: &BreuilFrame, m: &BreuilModule) -> Result<BreuilModule> {
    let i = &m.presentation;
    let d = Isogeny {
        source: dual_breuil(&i.target),
        target: dual_breuil(&i.source),
        map: i.map.transpose(),
        exponent: i.exponent,
        inverse: i.inverse.transpose(),
    };
    cokernel_module(f, &d)
}

fn residue_matrix(f: &BreuilFrame, m: &Matrix<Series>) -> FpMatrix {
    m.map(|x| f.residue(x))
}

/// Rank over F_p by Gaussian elimination.
pub fn fp_rank(p: u64, m: &FpMatrix) -> usize {
    let mut a = m.clone();
    let mut rank = 0;
    for c in 0..a.cols {
        let Some(r) = (rank..a.rows).find(|&r| *a.get(r, c) != 0) else { continue };
        a.swap_rows(rank, r);
        let inv = crate::ring::invmod(*a.get(rank, c), p).expect("nonzero mod p is a unit");
        for j in 0..a.cols {
            a.set(rank, j, a.get(rank, j) * inv % p);
        }
        for i in 0..a.rows {
            if i != rank {
                let x = *a.get(i, c);
                for j in 0..a.cols {
                    a.set(i, j, (a.get(i, j) + (p - x) * a.get(rank, j)) % p);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn fp_power(p: u64, m: &FpMatrix, k: usize) -> FpMatrix {
    let mut acc = Matrix::from_fn(m.rows, m.cols, |i, j| u64::from(i == j));
    for _ in 0..k {
        acc = fp_mul(p, &acc, m);
    }
    acc
}

/// (dim ker phi_k^h, rank - that) for phi_k = phi mod m over F_p; sigma is
/// the identity on S/m, so the twisted powers are plain powers.
pub fn nil_etale_ranks(f: &BreuilFrame, b: &BreuilWindow) -> (usize, usize) {
    let p = f.series().prime();
    let stable = fp_power(p, &residue_matrix(f, &b.phi), b.rank);
    let etale = fp_rank(p, &stable);
    (b.rank - etale, etale)
}

pub fn is_nilpotent_breuil(f: &BreuilFrame, b: &BreuilWindow) -> bool {
    nil_etale_ranks(f, b).1 == 0
}

/// phi_M is nilpotent on M / m M = coker(g mod m).
pub fn is_nilpotent_module(f: &BreuilFrame, m: &BreuilModule) -> bool {
    let p = f.series().prime();
    let raw = m.raw();
    let g = residue_matrix(f, &raw.relations);
    let stable = fp_power(p, &residue_matrix(f, &raw.phi), raw.relations.rows);
    let joined = Matrix::from_fn(g.rows, g.cols + stable.cols, |i, j| {
        if j < g.cols {
            *g.get(i, j)
        } else {
            *stable.get(i, j - g.cols)
        }
    });
    fp_rank(p, &joined) == fp_rank(p, &g)
}

/// from_window of a random window of the given shape.
pub fn random_breuil_window(f: &BreuilFrame, rk_l: usize, rk_t: usize, rng: &mut dyn rand::RngCore) -> BreuilWindow {
    let w = crate::windows::random_window(f, rk_l, rk_t, rng);
    from_window(f, &w).expect("every window gives a Breuil window")
}

/// U diag(p^k_i) W between base changes of a diagonal window
/// phi = diag(e_i), e_i in {1, E}; exponents are drawn below `max_exponent`.
pub fn random_isogeny(f: &BreuilFrame, rank: usize, max_exponent: u32, rng: &mut dyn rand::RngCore) -> Result<Isogeny> {
    use rand::Rng;
    let s = f.series();
    let e = f.level.e.clone();
    let ones: Vec<bool> = (0..rank).map(|_| rng.gen_bool(0.5)).collect();
    let phi0 = matrix::diagonal(s, &ones.iter().map(|&o| if o { s.one() } else { e.clone() }).collect::<Vec<_>>());
    let psi0 = matrix::diagonal(s, &ones.iter().map(|&o| if o { e.clone() } else { s.one() }).collect::<Vec<_>>());
    let base = BreuilWindow { rank, phi: phi0, psi: psi0 };
    let g0 = matrix::diagonal(
        s,
        &(0..rank).map(|_| s.from_u64(s.prime().pow(rng.gen_range(0..max_exponent.max(1))))).collect::<Vec<_>>(),
    );
    let u = matrix::random_invertible(s, rank, rng);
    let w = matrix::random_invertible(s, rank, rng);
    let target = base.change_basis(f, &matrix::try_inverse(s, &u)?)?;
    let source = base.change_basis(f, &w)?;
    let map = matrix::mul(s, &u, &matrix::mul(s, &g0, &w));
    Isogeny::new(f, source, target, map)
}
