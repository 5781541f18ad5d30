//! Witt vectors with coordinates in a square-zero ideal b carrying the
//! trivial divided powers. There the logarithmic coordinates agree with the
//! Witt coordinates, W(R) acts on them through the ghost components, and
//! f~_1 shifts them to the left.

use serde::{Deserialize, Serialize};

use super::{WittRing, WittVec};
use crate::error::{Error, Result};
use crate::ring::Ring;

/// Logarithmic coordinates <b_0, b_1, ...> of an element of W(b).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogVec<E>(pub Vec<E>);

/// A square-zero ideal b of the coefficient ring, given by additive
/// generators and a membership test.
pub struct SquareZero<'a, R: Ring + Clone> {
    pub witt: &'a WittRing<R>,
    member: Box<dyn Fn(&R::Elem) -> bool + 'a>,
}

impl<'a, R: Ring + Clone> SquareZero<'a, R> {
    /// Checks b^2 = 0 on the supplied generators.
    pub fn new(
        witt: &'a WittRing<R>,
        generators: &[R::Elem],
        member: impl Fn(&R::Elem) -> bool + 'a,
    ) -> Result<Self> {
        let base = witt.base();
        for (i, x) in generators.iter().enumerate() {
            if !member(x) {
                return Err(Error::NotInIdeal(format!("generator {i} is not in b")));
            }
            for y in &generators[i..] {
                if !base.is_zero(&base.mul(x, y)) {
                    return Err(Error::NotSquareZero(format!("generator {i} times another is nonzero")));
                }
            }
        }
        Ok(SquareZero { witt, member: Box::new(member) })
    }

    pub fn contains(&self, x: &R::Elem) -> bool {
        (self.member)(x)
    }

    pub fn in_witt(&self, x: &WittVec<R::Elem>) -> bool {
        x.0.iter().all(|c| self.contains(c))
    }

    pub fn log(&self, x: &WittVec<R::Elem>) -> Result<LogVec<R::Elem>> {
        if !self.in_witt(x) {
            return Err(Error::NotInIdeal("log needs coordinates in b".into()));
        }
        Ok(LogVec(x.0.clone()))
    }

    pub fn exp(&self, l: &LogVec<R::Elem>) -> Result<WittVec<R::Elem>> {
        if !l.0.iter().all(|c| self.contains(c)) {
            return Err(Error::NotInIdeal("exp needs coordinates in b".into()));
        }
        Ok(WittVec(l.0.clone()))
    }

    /// x . <b_0, b_1, ...> = <w_0(x) b_0, w_1(x) b_1, ...>.
    pub fn action(&self, x: &WittVec<R::Elem>, l: &LogVec<R::Elem>) -> LogVec<R::Elem> {
        let base = self.witt.base();
        let len = l.0.len().min(x.len());
        LogVec((0..len).map(|i| base.mul(&self.witt.ghost_component(x, i), &l.0[i])).collect())
    }

    /// f~_1 on I_R + W(b), given a decomposition z = c + exp(l) with c in I_R:
    /// f_1(c) + <b_1, b_2, ...>.
    pub fn f1_tilde(&self, c: &WittVec<R::Elem>, l: &LogVec<R::Elem>) -> Result<WittVec<R::Elem>> {
        if !self.witt.in_ideal(c) {
            return Err(Error::InconsistentDecomposition("ideal part has a nonzero 0th coordinate".into()));
        }
        if !l.0.iter().all(|b| self.contains(b)) {
            return Err(Error::InconsistentDecomposition("log part is not in b".into()));
        }
        let shifted = WittVec(l.0.iter().skip(1).cloned().collect());
        Ok(self.witt.add(&self.witt.f1(c)?, &shifted))
    }

    /// f~_1 of an element whose 0th coordinate lies in b, decomposing it as
    /// (z - [z_0]) + [z_0].
    pub fn f1_tilde_of(&self, z: &WittVec<R::Elem>) -> Result<WittVec<R::Elem>> {
        let z0 = z.0.first().cloned().unwrap_or_else(|| self.witt.base().zero());
        let t = self.witt.teichmuller_len(&z0, z.len());
        let mut l = vec![self.witt.base().zero(); z.len()];
        if !l.is_empty() {
            l[0] = z0;
        }
        self.f1_tilde(&self.witt.sub(z, &t), &LogVec(l))
    }
}

/// Writes x in W_n(R) as z.1 + y with z an integer mod p^n and y in W_n(m),
/// given the residue map R -> F_p. Shows W_n(R) = Z_p.1 + W_n(m) at finite
/// length, so the truncated Dieudonne ring is all of W_n(R).
pub fn dieudonne_decomposition<R: Ring + Clone>(
    witt: &WittRing<R>,
    x: &WittVec<R::Elem>,
    residue: impl Fn(&R::Elem) -> u64,
) -> (u64, WittVec<R::Elem>) {
    let p = witt.prime();
    let n = x.len();
    let in_m = |v: &WittVec<R::Elem>, k: usize| v.0.iter().take(k).all(|c| residue(c) == 0);
    let mut z = 0u64;
    for k in 0..n {
        let step = p.pow(k as u32);
        let t = (0..p)
            .find(|t| {
                let cand = z + t * step;
                in_m(&witt.sub(x, &witt.int(cand as i64)), k + 1)
            })
            .expect("residue of W_n(F_p) is Z/p^n");
        z += t * step;
    }
    let y = witt.sub(x, &witt.int(z as i64));
    (z, y)
}
