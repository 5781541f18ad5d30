//! p-typical Witt vectors of finite length over any coefficient `Ring`.
//!
//! Arithmetic evaluates the universal polynomials reduced into the
//! coefficient ring. Vectors of different lengths combine at the shorter
//! length, which is how the Frobenius F: W_n -> W_{n-1} and f_1 interact with
//! the rest of the arithmetic.

pub mod polys;
pub mod square_zero;

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::Ring;
pub use polys::{IntPoly, WittPolyTable};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WittVec<E>(pub Vec<E>);

impl<E> WittVec<E> {
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A universal polynomial with coefficients reduced into a fixed ring.
#[derive(Clone, Debug)]
struct Compiled<E> {
    nvars: usize,
    /// (exponent vector, per-variable index into `used`, coefficient)
    terms: Vec<(Vec<u16>, Vec<u16>, E)>,
    used: Vec<Vec<u16>>,
}

impl<E: Clone> Compiled<E> {
    fn new<R: Ring<Elem = E>>(ring: &R, poly: &IntPoly) -> Self {
        let modulus = BigInt::from(ring.prime()).pow(ring.p_precision());
        let nvars = poly.nvars;
        let mut used: Vec<Vec<u16>> = vec![Vec::new(); nvars];
        let mut kept = Vec::new();
        for (e, c) in &poly.terms {
            let r = ((c % &modulus) + &modulus) % &modulus;
            let r = r.to_u64().expect("reduced coefficient fits u64");
            if r == 0 {
                continue;
            }
            for v in 0..nvars {
                if e[v] > 0 {
                    used[v].push(e[v]);
                }
            }
            kept.push((e.clone(), ring.from_u64(r)));
        }
        for u in used.iter_mut() {
            u.sort_unstable();
            u.dedup();
        }
        let terms = kept
            .into_iter()
            .map(|(e, c)| {
                let idx = (0..nvars)
                    .map(|v| if e[v] == 0 { 0 } else { used[v].binary_search(&e[v]).unwrap() as u16 })
                    .collect();
                (e, idx, c)
            })
            .collect();
        Compiled { nvars, terms, used }
    }

    /// Evaluate, sharing partial products between lexicographically adjacent terms.
    fn eval<R: Ring<Elem = E>>(&self, ring: &R, vars: &[E]) -> E {
        let nv = self.nvars;
        let zero_var: Vec<bool> = vars.iter().map(|x| ring.is_zero(x)).collect();
        let mut pows: Vec<Vec<E>> = Vec::with_capacity(nv);
        for v in 0..nv {
            let mut row = Vec::with_capacity(self.used[v].len());
            if !zero_var[v] {
                let mut prev_e = 0u16;
                let mut cur = ring.one();
                for &e in &self.used[v] {
                    let step = ring.pow(&vars[v], (e - prev_e) as u64);
                    cur = ring.mul(&cur, &step);
                    row.push(cur.clone());
                    prev_e = e;
                }
            }
            pows.push(row);
        }
        let mut prefix: Vec<Option<E>> = vec![None; nv + 1];
        prefix[0] = Some(ring.one());
        let mut acc = ring.zero();
        let mut prev: Option<&Vec<u16>> = None;
        for (e, idx, c) in &self.terms {
            let start = match prev {
                None => 0,
                Some(pe) => (0..nv).find(|&v| pe[v] != e[v]).unwrap_or(nv),
            };
            for v in start..nv {
                prefix[v + 1] = match &prefix[v] {
                    None => None,
                    Some(x) if e[v] == 0 => Some(x.clone()),
                    Some(_) if zero_var[v] => None,
                    Some(x) => Some(ring.mul(x, &pows[v][idx[v] as usize])),
                };
            }
            if let Some(m) = &prefix[nv] {
                acc = ring.add(&acc, &ring.mul(c, m));
            }
            prev = Some(e);
        }
        acc
    }
}

/// `W_n(A)` for a coefficient ring A.
#[derive(Clone, Debug)]
pub struct WittRing<R: Ring> {
    base: R,
    n: usize,
    sum: Vec<Compiled<R::Elem>>,
    prod: Vec<Compiled<R::Elem>>,
    frob: Vec<Compiled<R::Elem>>,
    table: Arc<WittPolyTable>,
}

impl<R: Ring + Clone> WittRing<R> {
    pub fn new(base: R, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDesc("Witt length must be positive".into()));
        }
        let table = WittPolyTable::cached(base.prime(), n)?;
        Ok(Self::from_table(base, table))
    }

    pub fn from_table(base: R, table: Arc<WittPolyTable>) -> Self {
        let n = table.n;
        let sum = table.sum.iter().map(|q| Compiled::new(&base, q)).collect();
        let prod = table.prod.iter().map(|q| Compiled::new(&base, q)).collect();
        let frob = table.frob.iter().map(|q| Compiled::new(&base, q)).collect();
        WittRing { base, n, sum, prod, frob, table }
    }

    pub fn base(&self) -> &R {
        &self.base
    }

    pub fn length(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &Arc<WittPolyTable> {
        &self.table
    }

    fn padded_vars(&self, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
        let mut v = Vec::with_capacity(2 * self.n);
        for i in 0..self.n {
            v.push(a.get(i).cloned().unwrap_or_else(|| self.base.zero()));
        }
        for i in 0..self.n {
            v.push(b.get(i).cloned().unwrap_or_else(|| self.base.zero()));
        }
        v
    }

    pub fn from_coords(&self, coords: Vec<R::Elem>) -> WittVec<R::Elem> {
        assert!(coords.len() <= self.n, "Witt vector longer than the ring");
        WittVec(coords)
    }

    pub fn truncate(&self, x: &WittVec<R::Elem>, len: usize) -> WittVec<R::Elem> {
        WittVec(x.0[..len.min(x.len())].to_vec())
    }

    /// Extend by zero coordinates. Only meaningful where the caller knows the
    /// missing coordinates vanish, e.g. on W(b) for a square-zero ideal b.
    pub fn extend_zero(&self, x: &WittVec<R::Elem>, len: usize) -> WittVec<R::Elem> {
        let mut c = x.0.clone();
        while c.len() < len.min(self.n) {
            c.push(self.base.zero());
        }
        WittVec(c)
    }

    pub fn teichmuller(&self, c: &R::Elem) -> WittVec<R::Elem> {
        let mut v = vec![self.base.zero(); self.n];
        v[0] = c.clone();
        WittVec(v)
    }

    pub fn teichmuller_len(&self, c: &R::Elem, len: usize) -> WittVec<R::Elem> {
        let mut v = vec![self.base.zero(); len.min(self.n)];
        v[0] = c.clone();
        WittVec(v)
    }

    /// V(x_0, x_1, ...) = (0, x_0, x_1, ...), capped at the ring length.
    pub fn verschiebung(&self, x: &WittVec<R::Elem>) -> WittVec<R::Elem> {
        let mut v = Vec::with_capacity(x.len() + 1);
        v.push(self.base.zero());
        v.extend(x.0.iter().cloned());
        v.truncate(self.n);
        WittVec(v)
    }

    /// F: W_len -> W_{len-1}.
    pub fn frobenius(&self, x: &WittVec<R::Elem>) -> WittVec<R::Elem> {
        let len = x.len().saturating_sub(1);
        let mut vars: Vec<R::Elem> = x.0.clone();
        vars.resize(self.n, self.base.zero());
        WittVec((0..len).map(|m| self.frob[m].eval(&self.base, &vars)).collect())
    }

    /// The inverse of V on V(W): (0, x_1, x_2, ...) -> (x_1, x_2, ...).
    pub fn f1(&self, x: &WittVec<R::Elem>) -> Result<WittVec<R::Elem>> {
        if x.is_empty() {
            return Ok(WittVec(Vec::new()));
        }
        if !self.base.is_zero(&x.0[0]) {
            return Err(Error::NotInIdeal("f1 needs a vanishing 0th Witt coordinate".into()));
        }
        Ok(WittVec(x.0[1..].to_vec()))
    }

    pub fn in_ideal(&self, x: &WittVec<R::Elem>) -> bool {
        x.0.first().map_or(true, |c| self.base.is_zero(c))
    }

    pub fn ghost_component(&self, x: &WittVec<R::Elem>, m: usize) -> R::Elem {
        let p = self.base.prime();
        let mut acc = self.base.zero();
        for i in 0..=m.min(x.len().saturating_sub(1)) {
            let term = self.base.pow(&x.0[i], p.pow((m - i) as u32));
            let scaled = self.base.mul(&self.base.from_u64(p.pow(i as u32)), &term);
            acc = self.base.add(&acc, &scaled);
        }
        acc
    }

    pub fn ghost(&self, x: &WittVec<R::Elem>) -> Vec<R::Elem> {
        (0..x.len()).map(|m| self.ghost_component(x, m)).collect()
    }

    /// Apply a coefficient map coordinatewise (functoriality of W).
    pub fn map_coeffs<E2>(&self, x: &WittVec<R::Elem>, f: impl Fn(&R::Elem) -> E2) -> WittVec<E2> {
        WittVec(x.0.iter().map(f).collect())
    }

    pub fn random_len(&self, len: usize, rng: &mut dyn rand::RngCore) -> WittVec<R::Elem> {
        WittVec((0..len.min(self.n)).map(|_| self.base.random(rng)).collect())
    }

    pub fn int(&self, c: i64) -> WittVec<R::Elem> {
        self.from_i64(c)
    }

    /// Whether the vector lies in W(m) and is thus topologically nilpotent,
    /// given a residue map to the residue field.
    pub fn residue_coords(&self, x: &WittVec<R::Elem>, residue: impl Fn(&R::Elem) -> u64) -> Vec<u64> {
        x.0.iter().map(residue).collect()
    }
}

impl<R: Ring + Clone> Ring for WittRing<R> {
    type Elem = WittVec<R::Elem>;

    fn prime(&self) -> u64 {
        self.base.prime()
    }
    fn p_precision(&self) -> u32 {
        self.base.p_precision() + self.n as u32 - 1
    }
    fn zero(&self) -> Self::Elem {
        WittVec(vec![self.base.zero(); self.n])
    }
    fn one(&self) -> Self::Elem {
        self.teichmuller(&self.base.one())
    }
    fn from_u64(&self, c: u64) -> Self::Elem {
        let mut acc = self.zero();
        let mut base = self.one();
        let mut c = c;
        while c > 0 {
            if c & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            c >>= 1;
            if c > 0 {
                base = self.add(&base, &base);
            }
        }
        acc
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let len = a.len().min(b.len());
        let vars = self.padded_vars(&a.0[..len], &b.0[..len]);
        WittVec((0..len).map(|m| self.sum[m].eval(&self.base, &vars)).collect())
    }
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        if self.base.prime() != 2 {
            return WittVec(a.0.iter().map(|c| self.base.neg(c)).collect());
        }
        // For p = 2 the additive inverse is not coordinatewise: solve a + y = 0.
        let len = a.len();
        let mut y: Vec<R::Elem> = Vec::with_capacity(len);
        for m in 0..len {
            let mut trial = y.clone();
            trial.push(self.base.zero());
            let vars = self.padded_vars(&a.0[..m + 1], &trial);
            let rest = self.sum[m].eval(&self.base, &vars);
            // S_m is linear in b_m with coefficient 1.
            y.push(self.base.neg(&rest));
        }
        WittVec(y)
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let len = a.len().min(b.len());
        let vars = self.padded_vars(&a.0[..len], &b.0[..len]);
        WittVec((0..len).map(|m| self.prod[m].eval(&self.base, &vars)).collect())
    }
    fn eq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        let len = a.len().min(b.len());
        (0..len).all(|i| self.base.eq(&a.0[i], &b.0[i]))
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.0.iter().all(|c| self.base.is_zero(c))
    }
    fn is_unit(&self, a: &Self::Elem) -> bool {
        a.0.first().map_or(false, |c| self.base.is_unit(c))
    }
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        let len = a.len();
        let y0 = self.base.inv(a.0.first()?)?;
        let mut y = vec![y0];
        for m in 1..len {
            let mut trial = y.clone();
            trial.push(self.base.zero());
            let vars = self.padded_vars(&a.0[..m + 1], &trial);
            let rest = self.prod[m].eval(&self.base, &vars);
            // P_m = w_m(a) b_m + (terms free of b_m), and w_m(a) is a unit.
            let wm = self.ghost_component(&WittVec(a.0[..m + 1].to_vec()), m);
            let ym = self.base.neg(&self.base.mul(&rest, &self.base.inv(&wm)?));
            y.push(ym);
        }
        Some(WittVec(y))
    }
    fn random(&self, rng: &mut dyn rand::RngCore) -> Self::Elem {
        self.random_len(self.n, rng)
    }
}
