//! Truncated power-series rings `(Z/p^N)[x_1..x_r]/J^a`, the Frobenius lift on
//! them, the operator tau, and the quotient `R_a = S_a / E` in normal form.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{self, addmod, checked_modulus, invmod, mulmod, submod, Ring};

/// Integer polynomial in sparse form: (exponent vector, coefficient).
pub type SparsePoly = Vec<(Vec<u32>, i64)>;

/// Monomials of total degree < a in r variables, in graded order, with a
/// precomputed product table.
#[derive(Debug)]
pub struct MonomialBasis {
    pub r: usize,
    pub a: usize,
    pub exps: Vec<Vec<u32>>,
    pub degrees: Vec<u32>,
    index: HashMap<Vec<u32>, usize>,
    mul: Vec<u32>,
}

const VANISH: u32 = u32::MAX;

impl MonomialBasis {
    pub fn new(r: usize, a: usize) -> Arc<Self> {
        let mut exps = Vec::new();
        for d in 0..a as u32 {
            let mut cur = vec![0u32; r];
            push_degree(&mut exps, &mut cur, 0, d);
        }
        let degrees: Vec<u32> = exps.iter().map(|e| e.iter().sum()).collect();
        let index: HashMap<Vec<u32>, usize> =
            exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let m = exps.len();
        let mut mul = vec![VANISH; m * m];
        for i in 0..m {
            for j in 0..m {
                if degrees[i] + degrees[j] < a as u32 {
                    let e: Vec<u32> = exps[i].iter().zip(&exps[j]).map(|(x, y)| x + y).collect();
                    mul[i * m + j] = index[&e] as u32;
                }
            }
        }
        Arc::new(MonomialBasis { r, a, exps, degrees, index, mul })
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn index_of(&self, e: &[u32]) -> Option<usize> {
        self.index.get(e).copied()
    }

    #[inline]
    pub fn product(&self, i: usize, j: usize) -> Option<usize> {
        let k = self.mul[i * self.exps.len() + j];
        (k != VANISH).then_some(k as usize)
    }

    pub fn variable(&self, i: usize) -> Option<usize> {
        let mut e = vec![0; self.r];
        e[i] = 1;
        self.index_of(&e)
    }
}

fn push_degree(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, var: usize, remaining: u32) {
    if var + 1 == cur.len() {
        cur[var] = remaining;
        out.push(cur.clone());
        cur[var] = 0;
        return;
    }
    if cur.is_empty() {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for k in (0..=remaining).rev() {
        cur[var] = k;
        push_degree(out, cur, var + 1, remaining - k);
    }
    cur[var] = 0;
}

/// An element of a truncated series ring: one coefficient per basis monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Series(pub Vec<u64>);

/// `(Z/p^N)[x]/J^a`, optionally with a smaller modulus on selected monomials
/// (used for the quotients by `p^c J^{a-1}`).
#[derive(Clone, Debug)]
pub struct SeriesRing {
    p: u64,
    prec: u32,
    basis: Arc<MonomialBasis>,
    moduli: Vec<u64>,
    prec_by_index: Vec<u32>,
}

impl SeriesRing {
    pub fn new(p: u64, prec: u32, basis: Arc<MonomialBasis>) -> Result<Self> {
        let m = checked_modulus(p, prec)?;
        let len = basis.len();
        Ok(SeriesRing { p, prec, basis, moduli: vec![m; len], prec_by_index: vec![prec; len] })
    }

    /// Same ring with the coefficients of top-degree monomials taken mod p^c.
    pub fn with_top_precision(&self, c: u32) -> Result<Self> {
        let mut out = self.clone();
        let top = self.basis.a as u32 - 1;
        for i in 0..self.basis.len() {
            if self.basis.degrees[i] == top {
                out.moduli[i] = checked_modulus(self.p, c.min(self.prec))?;
                out.prec_by_index[i] = c.min(self.prec);
            }
        }
        Ok(out)
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }
    pub fn precision(&self) -> u32 {
        self.prec
    }
    pub fn modulus_at(&self, i: usize) -> u64 {
        self.moduli[i]
    }
    pub fn precision_at(&self, i: usize) -> u32 {
        self.prec_by_index[i]
    }
    pub fn a(&self) -> usize {
        self.basis.a
    }
    pub fn r(&self) -> usize {
        self.basis.r
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn monomial(&self, e: &[u32]) -> Series {
        let mut c = vec![0; self.dim()];
        if let Some(i) = self.basis.index_of(e) {
            c[i] = 1 % self.moduli[i];
        }
        Series(c)
    }

    pub fn basis_element(&self, i: usize) -> Series {
        let mut c = vec![0; self.dim()];
        c[i] = 1 % self.moduli[i];
        Series(c)
    }

    pub fn var(&self, i: usize) -> Series {
        let mut e = vec![0; self.r()];
        e[i] = 1;
        self.monomial(&e)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Series {
        Series(coeffs.iter().zip(&self.moduli).map(|(c, m)| c % m).collect())
    }

    pub fn from_sparse(&self, poly: &SparsePoly) -> Result<Series> {
        let mut c = vec![0u64; self.dim()];
        for (e, coeff) in poly {
            if e.len() != self.r() {
                return Err(Error::InvalidDesc(format!("exponent {e:?} has wrong arity")));
            }
            if let Some(i) = self.basis.index_of(e) {
                c[i] = addmod(c[i], ring::reduce_i64(*coeff, self.moduli[i]), self.moduli[i]);
            }
        }
        Ok(Series(c))
    }

    pub fn to_sparse(&self, x: &Series) -> SparsePoly {
        x.0.iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(i, c)| (self.basis.exps[i].clone(), *c as i64))
            .collect()
    }

    pub fn coeff(&self, x: &Series, e: &[u32]) -> u64 {
        self.basis.index_of(e).map_or(0, |i| x.0[i])
    }

    pub fn constant(&self, x: &Series) -> u64 {
        x.0[0]
    }

    /// Transfer coefficients by exponent into another series ring, dropping
    /// monomials that vanish there and reducing modulo its precision.
    pub fn transfer(&self, x: &Series, target: &SeriesRing) -> Series {
        let mut c = vec![0u64; target.dim()];
        if Arc::ptr_eq(&self.basis, &target.basis) {
            for i in 0..c.len() {
                c[i] = x.0[i] % target.moduli[i];
            }
        } else {
            for (i, e) in self.basis.exps.iter().enumerate() {
                if let Some(j) = target.basis.index_of(e) {
                    c[j] = x.0[i] % target.moduli[j];
                }
            }
        }
        Series(c)
    }

    /// Whether x lies in J^k.
    pub fn in_j_power(&self, x: &Series, k: u32) -> bool {
        x.0.iter().zip(&self.basis.degrees).all(|(c, d)| *d >= k || *c == 0)
    }

    /// The part of x of total degree exactly d.
    pub fn homogeneous_part(&self, x: &Series, d: u32) -> Series {
        Series(
            x.0.iter()
                .zip(&self.basis.degrees)
                .map(|(c, deg)| if *deg == d { *c } else { 0 })
                .collect(),
        )
    }

    pub fn divisible_by_p_power(&self, x: &Series, k: u32) -> bool {
        let pk = self.p.pow(k);
        x.0.iter().enumerate().all(|(i, c)| k >= self.prec_by_index[i] || c % pk == 0)
    }

    /// Divide the canonical representative by p^k. The result is the
    /// canonical lift of the quotient, which is determined mod p^(N-k).
    pub fn div_p_power(&self, x: &Series, k: u32) -> Result<Series> {
        let pk = self.p.pow(k);
        let mut out = Vec::with_capacity(x.0.len());
        for (i, c) in x.0.iter().enumerate() {
            if c % pk != 0 {
                return Err(Error::Divisibility(format!(
                    "coefficient {c} at {:?} not divisible by {}^{k}",
                    self.basis.exps[i], self.p
                )));
            }
            out.push(c / pk);
        }
        Ok(Series(out))
    }

    pub fn scalar_mul(&self, c: u64, x: &Series) -> Series {
        Series(x.0.iter().zip(&self.moduli).map(|(v, m)| mulmod(*v, c % m, *m)).collect())
    }

    /// x * x^e for a basis monomial index.
    pub fn mul_monomial(&self, x: &Series, idx: usize) -> Series {
        let mut out = vec![0u64; self.dim()];
        for (i, c) in x.0.iter().enumerate() {
            if *c != 0 {
                if let Some(k) = self.basis.product(i, idx) {
                    out[k] = addmod(out[k], c % self.moduli[k], self.moduli[k]);
                }
            }
        }
        Series(out)
    }
}

impl Ring for SeriesRing {
    type Elem = Series;

    fn prime(&self) -> u64 {
        self.p
    }
    fn p_precision(&self) -> u32 {
        self.prec
    }
    fn zero(&self) -> Series {
        Series(vec![0; self.dim()])
    }
    fn one(&self) -> Series {
        self.basis_element(0)
    }
    fn from_u64(&self, c: u64) -> Series {
        let mut v = vec![0; self.dim()];
        v[0] = c % self.moduli[0];
        Series(v)
    }
    fn add(&self, a: &Series, b: &Series) -> Series {
        Series(
            a.0.iter().zip(&b.0).zip(&self.moduli).map(|((x, y), m)| addmod(*x, *y, *m)).collect(),
        )
    }
    fn sub(&self, a: &Series, b: &Series) -> Series {
        Series(
            a.0.iter().zip(&b.0).zip(&self.moduli).map(|((x, y), m)| submod(*x, *y, *m)).collect(),
        )
    }
    fn neg(&self, a: &Series) -> Series {
        Series(a.0.iter().zip(&self.moduli).map(|(x, m)| submod(0, *x, *m)).collect())
    }
    fn mul(&self, a: &Series, b: &Series) -> Series {
        let n = self.dim();
        let mut acc = vec![0u128; n];
        for i in 0..n {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..n {
                if b.0[j] == 0 {
                    continue;
                }
                if let Some(k) = self.basis.product(i, j) {
                    let m = self.moduli[k] as u128;
                    acc[k] = (acc[k] + a.0[i] as u128 * b.0[j] as u128) % m;
                }
            }
        }
        Series(acc.into_iter().map(|v| v as u64).collect())
    }
    fn eq(&self, a: &Series, b: &Series) -> bool {
        a == b
    }
    fn is_zero(&self, a: &Series) -> bool {
        a.0.iter().all(|c| *c == 0)
    }
    fn is_unit(&self, a: &Series) -> bool {
        a.0[0] % self.p != 0
    }
    fn inv(&self, a: &Series) -> Option<Series> {
        let c0 = invmod(a.0[0], self.moduli[0])?;
        // Newton iteration y <- y (2 - a y) doubles the (p, J)-adic precision.
        let mut y = self.from_u64(c0);
        let two = self.from_u64(2);
        for _ in 0..64 {
            let ay = self.mul(a, &y);
            if ay == self.one() {
                return Some(y);
            }
            y = self.mul(&y, &self.sub(&two, &ay));
        }
        None
    }
    fn random(&self, rng: &mut dyn rand::RngCore) -> Series {
        Series(self.moduli.iter().map(|m| rng.gen_range(0..*m)).collect())
    }
}

/// The Frobenius lift sigma on the base ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaSpec {
    /// x_i -> x_i^p
    Standard,
    /// explicit images of the variables, integer data
    General(Vec<SparsePoly>),
}

/// Complete description of the base ring `S_{a,N}` with its Frobenius lift.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingDesc {
    pub p: u64,
    #[serde(rename = "N")]
    pub n: u32,
    pub r: usize,
    pub a: usize,
    #[serde(rename = "E")]
    pub e: SparsePoly,
    pub sigma: SigmaSpec,
}

impl RingDesc {
    /// E = p + sum of the given terms; sigma standard.
    pub fn eisenstein(p: u64, n: u32, r: usize, a: usize, e0_terms: &[(Vec<u32>, i64)]) -> Self {
        let mut e = vec![(vec![0; r], p as i64)];
        e.extend(e0_terms.iter().cloned());
        RingDesc { p, n, r, a, e, sigma: SigmaSpec::Standard }
    }

    pub fn with_sigma(mut self, sigma: SigmaSpec) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_precision(&self, n: u32) -> Self {
        let mut d = self.clone();
        d.n = n;
        d
    }

    pub fn with_level(&self, a: usize) -> Self {
        let mut d = self.clone();
        d.a = a;
        d
    }

    pub fn is_standard(&self) -> bool {
        self.sigma == SigmaSpec::Standard
    }

    pub fn validate(&self) -> Result<()> {
        if !ring::is_prime(self.p) {
            return Err(Error::InvalidDesc(format!("p = {} is not prime", self.p)));
        }
        if self.n == 0 || self.a == 0 || self.r == 0 {
            return Err(Error::InvalidDesc("N, a and r must be positive".into()));
        }
        if (self.n as usize) < self.a {
            return Err(Error::InvalidDesc(format!(
                "N = {} < a = {}: p^a must vanish in the base ring for R_a to be a quotient of it",
                self.n, self.a
            )));
        }
        checked_modulus(self.p, self.n)?;
        let zero = vec![0; self.r];
        let mut constant = 0i64;
        for (e, c) in &self.e {
            if e.len() != self.r {
                return Err(Error::InvalidDesc(format!("exponent {e:?} in E has wrong arity")));
            }
            if *e == zero {
                constant += c;
            }
        }
        if constant != self.p as i64 {
            return Err(Error::InvalidDesc(format!(
                "constant term of E is {constant}, expected p = {}",
                self.p
            )));
        }
        if let SigmaSpec::General(images) = &self.sigma {
            if images.len() != self.r {
                return Err(Error::InvalidDesc(format!(
                    "{} sigma images for {} variables",
                    images.len(),
                    self.r
                )));
            }
            let ring = SeriesRing::new(self.p, self.n, MonomialBasis::new(self.r, self.a))?;
            for (i, img) in images.iter().enumerate() {
                let s = ring.from_sparse(img)?;
                if s.0[0] != 0 {
                    return Err(Error::InvalidDesc(format!("sigma(x_{}) has a constant term", i + 1)));
                }
                let xp = ring.pow(&ring.var(i), self.p);
                if !ring.divisible_by_p_power(&ring.sub(&s, &xp), 1) {
                    return Err(Error::InvalidDesc(format!(
                        "sigma(x_{}) is not congruent to x_{}^p mod p",
                        i + 1,
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One level `S_{a,prec}` of the base tower with E, theta and sigma
/// materialized. The same description can be instantiated at any precision,
/// which is how padded intermediate computations are done.
#[derive(Clone, Debug)]
pub struct Level {
    pub desc: RingDesc,
    pub ring: SeriesRing,
    pub e: Series,
    pub e0: Series,
    sigma_mono: Vec<Series>,
}

impl Level {
    pub fn new(desc: &RingDesc, a: usize, prec: u32) -> Result<Self> {
        let basis = MonomialBasis::new(desc.r, a);
        Self::with_basis(desc, basis, prec)
    }

    pub fn with_basis(desc: &RingDesc, basis: Arc<MonomialBasis>, prec: u32) -> Result<Self> {
        let ring = SeriesRing::new(desc.p, prec, basis)?;
        Self::with_ring(desc, ring)
    }

    pub fn with_ring(desc: &RingDesc, ring: SeriesRing) -> Result<Self> {
        let e = ring.from_sparse(&desc.e)?;
        let e0 = ring.sub(&e, &ring.from_u64(desc.p));
        let images: Vec<Series> = match &desc.sigma {
            SigmaSpec::Standard => (0..desc.r).map(|i| ring.pow(&ring.var(i), desc.p)).collect(),
            SigmaSpec::General(imgs) => imgs.iter().map(|g| ring.from_sparse(g)).collect::<Result<_>>()?,
        };
        let basis = ring.basis().clone();
        let mut sigma_mono = Vec::with_capacity(basis.len());
        for e in &basis.exps {
            let mut acc = ring.one();
            for (i, k) in e.iter().enumerate() {
                if *k > 0 {
                    acc = ring.mul(&acc, &ring.pow(&images[i], *k as u64));
                }
            }
            sigma_mono.push(acc);
        }
        Ok(Level { desc: desc.clone(), ring, e, e0, sigma_mono })
    }

    pub fn p(&self) -> u64 {
        self.desc.p
    }
    pub fn a(&self) -> usize {
        self.ring.a()
    }
    pub fn precision(&self) -> u32 {
        self.ring.precision()
    }

    pub fn at_precision(&self, prec: u32) -> Result<Level> {
        Level::with_basis(&self.desc, self.ring.basis().clone(), prec)
    }

    pub fn sigma(&self, x: &Series) -> Series {
        let r = &self.ring;
        let mut acc = r.zero();
        for (i, c) in x.0.iter().enumerate() {
            if *c != 0 {
                acc = r.add(&acc, &r.scalar_mul(*c, &self.sigma_mono[i]));
            }
        }
        acc
    }

    pub fn sigma_pow(&self, x: &Series, k: usize) -> Series {
        (0..k).fold(x.clone(), |y, _| self.sigma(&y))
    }

    pub fn theta(&self) -> Series {
        self.sigma(&self.e)
    }

    /// tau_k(y) = (sigma(y)^(p^(k-1)) - y^(p^k)) / p^k, computed on the
    /// canonical representative in this ring. The result is determined modulo
    /// p^(prec - k).
    pub fn tau_k(&self, y: &Series, k: u32) -> Result<Series> {
        assert!(k >= 1);
        let r = &self.ring;
        let p = self.p();
        let lhs = r.pow(&self.sigma(y), p.pow(k - 1));
        let rhs = r.pow(y, p.pow(k));
        r.div_p_power(&r.sub(&lhs, &rhs), k)
    }

    /// tau_k on an element of this level computed through a ring with `pad`
    /// extra digits, returned at this level's precision. This is tau_k of the
    /// canonical lift.
    pub fn tau_k_canonical(&self, x: &Series, k: u32) -> Result<Series> {
        let padded = self.at_precision(self.precision() + k)?;
        let lifted = self.ring.transfer(x, &padded.ring);
        let t = padded.tau_k(&lifted, k)?;
        Ok(padded.ring.transfer(&t, &self.ring))
    }

    pub fn tau(&self, x: &Series) -> Result<Series> {
        self.tau_k_canonical(x, 1)
    }

    /// Decompose x = E y + nf with nf in normal form (coefficients in [0, p),
    /// degree < a). Exact in this ring.
    pub fn divide_by_e(&self, x: &Series) -> (Series, Series) {
        reduce_with_cofactor(&self.ring, &self.e0, x)
    }

    /// y with E y = x, if x lies in E S.
    pub fn exact_div_e(&self, x: &Series) -> Result<Series> {
        let (nf, y) = self.divide_by_e(x);
        if self.ring.is_zero(&nf) {
            Ok(y)
        } else {
            Err(Error::NotInIdeal(format!("{x:?} is not a multiple of E")))
        }
    }

    /// Linear coefficients of sigma(x_i), divided by p, reduced mod p:
    /// column i holds the coefficients of sigma(x_i)/p on x_1..x_r.
    pub fn criterion_matrix(&self) -> Result<Vec<Vec<u64>>> {
        let p = self.p();
        let r = self.desc.r;
        if self.a() < 2 {
            return Err(Error::InvalidDesc("criterion matrix needs a >= 2".into()));
        }
        let mut m = vec![vec![0u64; r]; r];
        for i in 0..r {
            let img = self.sigma(&self.ring.var(i));
            for j in 0..r {
                let c = self.ring.coeff(&img, &unit_exp(r, j));
                if c % p != 0 {
                    return Err(Error::InvalidDesc("sigma(x_i) has a linear term not divisible by p".into()));
                }
                m[j][i] = (c / p) % p;
            }
        }
        Ok(m)
    }
}

pub fn unit_exp(r: usize, j: usize) -> Vec<u32> {
    let mut e = vec![0; r];
    e[j] = 1;
    e
}

/// Rewrite p x^e -> -E0 x^e by increasing degree. Returns (nf, y) with
/// x = (p + E0) y + nf exactly and nf having coefficients in [0, p).
pub fn reduce_with_cofactor(ring: &SeriesRing, e0: &Series, x: &Series) -> (Series, Series) {
    let p = ring.prime();
    let mut cur = x.clone();
    let mut y = ring.zero();
    for i in 0..ring.dim() {
        let c = cur.0[i];
        if c < p {
            continue;
        }
        let q = c / p;
        cur.0[i] = c % p;
        y.0[i] = addmod(y.0[i], q % ring.modulus_at(i), ring.modulus_at(i));
        let shifted = ring.mul_monomial(e0, i);
        cur = ring.sub(&cur, &ring.scalar_mul(q, &shifted));
    }
    (cur, y)
}

/// An element of `R_a` in normal form. The coefficient vector is indexed by
/// the monomial basis of degree < a and coefficients lie in [0, p).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QElem(pub Vec<u64>);

/// The quotient `R_a = S_a / E`. Arithmetic lifts to `(Z/p^a)[x]/J^a`
/// (which surjects onto `R_a` since p^a lies in (E) + J^a) and reduces.
#[derive(Clone, Debug)]
pub struct QuotientRing {
    p: u64,
    work: SeriesRing,
    e0: Series,
}

impl QuotientRing {
    pub fn new(desc: &RingDesc, a: usize) -> Result<Self> {
        let lvl = Level::new(desc, a, a as u32)?;
        Ok(QuotientRing { p: desc.p, work: lvl.ring.clone(), e0: lvl.e0.clone() })
    }

    pub fn a(&self) -> usize {
        self.work.a()
    }
    pub fn dim(&self) -> usize {
        self.work.dim()
    }
    pub fn basis(&self) -> &Arc<MonomialBasis> {
        self.work.basis()
    }

    /// Reduction from any series ring on the same variables whose precision is
    /// at least a.
    pub fn reduce(&self, from: &SeriesRing, x: &Series) -> QElem {
        debug_assert!(from.precision() >= self.a() as u32);
        let lifted = from.transfer(x, &self.work);
        self.normalize(&lifted)
    }

    fn normalize(&self, x: &Series) -> QElem {
        QElem(reduce_with_cofactor(&self.work, &self.e0, x).0 .0)
    }

    /// Representative in a series ring (coefficients in [0, p)).
    pub fn lift(&self, x: &QElem, to: &SeriesRing) -> Series {
        let mut c = vec![0u64; to.dim()];
        for (i, v) in x.0.iter().enumerate() {
            if let Some(j) = to.basis().index_of(&self.basis().exps[i]) {
                c[j] = v % to.modulus_at(j);
            }
        }
        Series(c)
    }

    /// The natural projection R_{a} -> R_{a'} for a' <= a: truncate the normal form.
    pub fn project(&self, x: &QElem, target: &QuotientRing) -> QElem {
        let mut c = vec![0u64; target.dim()];
        for (i, v) in x.0.iter().enumerate() {
            if let Some(j) = target.basis().index_of(&self.basis().exps[i]) {
                c[j] = *v;
            }
        }
        QElem(c)
    }

    /// Normal form of x viewed in a larger quotient ring (the section used for
    /// lifting). Not a ring map.
    pub fn section(&self, x: &QElem, target: &QuotientRing) -> QElem {
        target.project_from(self, x)
    }

    fn project_from(&self, src: &QuotientRing, x: &QElem) -> QElem {
        let mut c = vec![0u64; self.dim()];
        for (i, v) in x.0.iter().enumerate() {
            if let Some(j) = self.basis().index_of(&src.basis().exps[i]) {
                c[j] = *v;
            }
        }
        QElem(c)
    }

    /// Whether x lies in m^k, i.e. is supported in degrees >= k of the normal form.
    /// For the ideal b = m^(a-1) of R_a this is the membership test.
    pub fn in_degree_at_least(&self, x: &QElem, k: u32) -> bool {
        x.0.iter().zip(&self.basis().degrees).all(|(c, d)| *d >= k || *c == 0)
    }

    pub fn residue(&self, x: &QElem) -> u64 {
        x.0[0]
    }

    pub fn var(&self, i: usize) -> QElem {
        self.normalize(&self.work.var(i))
    }

    pub fn from_series_coeffs(&self, coeffs: &[u64]) -> QElem {
        self.normalize(&self.work.from_coeffs(coeffs))
    }

    pub fn to_sparse(&self, x: &QElem) -> SparsePoly {
        self.work.to_sparse(&Series(x.0.clone()))
    }

    pub fn from_sparse(&self, poly: &SparsePoly) -> Result<QElem> {
        Ok(self.normalize(&self.work.from_sparse(poly)?))
    }
}

impl Ring for QuotientRing {
    type Elem = QElem;

    fn prime(&self) -> u64 {
        self.p
    }
    fn p_precision(&self) -> u32 {
        self.a() as u32
    }
    fn zero(&self) -> QElem {
        QElem(vec![0; self.dim()])
    }
    fn one(&self) -> QElem {
        self.normalize(&self.work.one())
    }
    fn from_u64(&self, c: u64) -> QElem {
        self.normalize(&self.work.from_u64(c))
    }
    fn add(&self, a: &QElem, b: &QElem) -> QElem {
        let s = self.work.add(&Series(a.0.clone()), &Series(b.0.clone()));
        self.normalize(&s)
    }
    fn sub(&self, a: &QElem, b: &QElem) -> QElem {
        let s = self.work.sub(&Series(a.0.clone()), &Series(b.0.clone()));
        self.normalize(&s)
    }
    fn neg(&self, a: &QElem) -> QElem {
        self.normalize(&self.work.neg(&Series(a.0.clone())))
    }
    fn mul(&self, a: &QElem, b: &QElem) -> QElem {
        let s = self.work.mul(&Series(a.0.clone()), &Series(b.0.clone()));
        self.normalize(&s)
    }
    fn eq(&self, a: &QElem, b: &QElem) -> bool {
        a == b
    }
    fn is_zero(&self, a: &QElem) -> bool {
        a.0.iter().all(|c| *c == 0)
    }
    fn is_unit(&self, a: &QElem) -> bool {
        a.0[0] != 0
    }
    fn inv(&self, a: &QElem) -> Option<QElem> {
        if !self.is_unit(a) {
            return None;
        }
        let y = self.work.inv(&Series(a.0.clone()))?;
        Some(self.normalize(&y))
    }
    fn random(&self, rng: &mut dyn rand::RngCore) -> QElem {
        QElem((0..self.dim()).map(|_| rng.gen_range(0..self.p)).collect())
    }
}
