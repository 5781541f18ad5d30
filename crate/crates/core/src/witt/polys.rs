//! Universal Witt polynomials S_m, P_m, F_m with integer coefficients,
//! generated from the ghost recursion and checked for integrality.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_VARS: usize = 16;
type Key = [u16; MAX_VARS];

/// A polynomial in variables indexed 0..nvars. For S_m and P_m variables
/// 0..n are a_0..a_{n-1} and n..2n are b_0..b_{n-1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntPoly {
    pub nvars: usize,
    /// Sorted lexicographically by exponent vector.
    #[serde(with = "terms_serde")]
    pub terms: Vec<(Vec<u16>, BigInt)>,
}

mod terms_serde {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(t: &[(Vec<u16>, BigInt)], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<(&Vec<u16>, String)> = t.iter().map(|(e, c)| (e, c.to_string())).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(Vec<u16>, BigInt)>, D::Error> {
        let v: Vec<(Vec<u16>, String)> = Vec::deserialize(d)?;
        v.into_iter()
            .map(|(e, c)| c.parse::<BigInt>().map(|c| (e, c)).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl IntPoly {
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[derive(Clone, Debug, Default)]
struct Work {
    t: HashMap<Key, BigInt>,
}

impl Work {
    fn var(i: usize) -> Self {
        let mut k = [0u16; MAX_VARS];
        k[i] = 1;
        let mut t = HashMap::new();
        t.insert(k, BigInt::one());
        Work { t }
    }

    fn add_scaled(&mut self, other: &Work, c: &BigInt) {
        for (k, v) in &other.t {
            let e = self.t.entry(*k).or_insert_with(BigInt::zero);
            *e += v * c;
            if e.is_zero() {
                self.t.remove(k);
            }
        }
    }

    fn mul(&self, other: &Work) -> Result<Work> {
        let mut t: HashMap<Key, BigInt> = HashMap::with_capacity(self.t.len() * 2);
        for (k1, v1) in &self.t {
            for (k2, v2) in &other.t {
                let mut k = [0u16; MAX_VARS];
                for i in 0..MAX_VARS {
                    k[i] = k1[i]
                        .checked_add(k2[i])
                        .ok_or_else(|| Error::Precision("Witt polynomial exponent overflow".into()))?;
                }
                *t.entry(k).or_insert_with(BigInt::zero) += v1 * v2;
            }
        }
        t.retain(|_, v| !v.is_zero());
        Ok(Work { t })
    }

    fn pow(&self, e: u64) -> Result<Work> {
        let mut acc: Option<Work> = None;
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base)?,
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc.unwrap_or_else(|| {
            let mut t = HashMap::new();
            t.insert([0u16; MAX_VARS], BigInt::one());
            Work { t }
        }))
    }

    fn exact_div(&self, d: &BigInt, what: &str) -> Result<Work> {
        let mut t = HashMap::with_capacity(self.t.len());
        for (k, v) in &self.t {
            let (q, r) = v.div_rem(d);
            if !r.is_zero() {
                return Err(Error::Divisibility(format!("{what} is not integral")));
            }
            t.insert(*k, q);
        }
        Ok(Work { t })
    }

    fn into_poly(self, nvars: usize) -> IntPoly {
        let mut terms: Vec<(Vec<u16>, BigInt)> =
            self.t.into_iter().map(|(k, v)| (k[..nvars].to_vec(), v)).collect();
        terms.sort_by(|x, y| x.0.cmp(&y.0));
        IntPoly { nvars, terms }
    }
}

/// Ghost component w_m over variables offset..offset+m.
fn ghost(p: u64, m: usize, offset: usize) -> Result<Work> {
    let mut acc = Work::default();
    for i in 0..=m {
        let term = Work::var(offset + i).pow(p.pow((m - i) as u32))?;
        acc.add_scaled(&term, &BigInt::from(p).pow(i as u32));
    }
    Ok(acc)
}

/// Powers X^(p^k) of already generated polynomials, extended on demand.
struct PowerLadder {
    p: u64,
    ladders: Vec<Vec<Work>>,
}

impl PowerLadder {
    fn push(&mut self, w: Work) {
        self.ladders.push(vec![w]);
    }

    fn get(&mut self, i: usize, k: usize) -> Result<&Work> {
        while self.ladders[i].len() <= k {
            let next = self.ladders[i].last().unwrap().pow(self.p)?;
            self.ladders[i].push(next);
        }
        Ok(&self.ladders[i][k])
    }
}

/// Solve sum_{i<=m} p^i X_i^(p^(m-i)) = target_m for m < count.
fn ghost_solve(p: u64, count: usize, mut target: impl FnMut(usize) -> Result<Work>, what: &str) -> Result<Vec<Work>> {
    let mut ladder = PowerLadder { p, ladders: Vec::new() };
    let mut out = Vec::new();
    for m in 0..count {
        let mut num = target(m)?;
        for i in 0..m {
            let pw = ladder.get(i, m - i)?.clone();
            num.add_scaled(&pw, &(-BigInt::from(p).pow(i as u32)));
        }
        let x = num.exact_div(&BigInt::from(p).pow(m as u32), what)?;
        ladder.push(x.clone());
        out.push(x);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WittPolyTable {
    pub p: u64,
    pub n: usize,
    pub sum: Vec<IntPoly>,
    pub prod: Vec<IntPoly>,
    /// F_0..F_{n-2}, in variables x_0..x_{n-1}.
    pub frob: Vec<IntPoly>,
}

impl WittPolyTable {
    pub fn generate(p: u64, n: usize) -> Result<Self> {
        if 2 * n > MAX_VARS {
            return Err(Error::Precision(format!("Witt length {n} exceeds the supported {}", MAX_VARS / 2)));
        }
        if (p as f64).powi(n as i32 - 1) > u16::MAX as f64 / 2.0 {
            return Err(Error::Precision(format!("exponents p^{} overflow the table format", n - 1)));
        }
        let sum = ghost_solve(
            p,
            n,
            |m| {
                let mut t = ghost(p, m, 0)?;
                t.add_scaled(&ghost(p, m, n)?, &BigInt::one());
                Ok(t)
            },
            "sum polynomial",
        )?;
        let prod = ghost_solve(p, n, |m| ghost(p, m, 0)?.mul(&ghost(p, m, n)?), "product polynomial")?;
        let frob = ghost_solve(p, n.saturating_sub(1), |m| ghost(p, m + 1, 0), "Frobenius polynomial")?;
        Ok(WittPolyTable {
            p,
            n,
            sum: sum.into_iter().map(|w| w.into_poly(2 * n)).collect(),
            prod: prod.into_iter().map(|w| w.into_poly(2 * n)).collect(),
            frob: frob.into_iter().map(|w| w.into_poly(n)).collect(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let t: WittPolyTable = serde_json::from_str(s)?;
        if t.sum.len() != t.n || t.prod.len() != t.n || t.frob.len() != t.n.saturating_sub(1) {
            return Err(Error::Serde("inconsistent Witt polynomial table".into()));
        }
        Ok(t)
    }

    /// Process-wide cache; a table generated for a longer length serves any
    /// shorter one after reindexing.
    pub fn cached(p: u64, n: usize) -> Result<Arc<WittPolyTable>> {
        static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<WittPolyTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(t) = cache.lock().unwrap().get(&(p, n)) {
            return Ok(t.clone());
        }
        let t = Arc::new(WittPolyTable::generate(p, n)?);
        cache.lock().unwrap().insert((p, n), t.clone());
        Ok(t)
    }
}
