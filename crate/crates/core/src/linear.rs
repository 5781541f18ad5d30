//! Exact linear algebra over `Z/p^N`, and through it over the truncated
//! series rings (which are free `Z/p^N`-modules).

use crate::base_rings::{Series, SeriesRing};
use crate::error::{Error, Result};
use crate::ring::{invmod, mulmod, submod, valuation, Ring};

/// Solve `a x = b` over Z/p^n by diagonalizing with row and column
/// operations. Returns one solution if any exists.
pub fn solve_zpn(p: u64, n: u32, a: &[Vec<u64>], b: &[u64]) -> Option<Vec<u64>> {
    let m = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let modulus = p.pow(n);
    let mut a: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|x| x % modulus).collect()).collect();
    let mut b: Vec<u64> = b.iter().map(|x| x % modulus).collect();
    // c tracks the column operations: x = c y.
    let mut c: Vec<Vec<u64>> = (0..cols).map(|i| (0..cols).map(|j| (i == j) as u64).collect()).collect();
    let mut vals = Vec::new();
    let mut k = 0;
    while k < m.min(cols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in k..m {
            for j in k..cols {
                let v = valuation(a[i][j], p, n);
                if v < n && best.map_or(true, |(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        a.swap(k, pi);
        b.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        for row in c.iter_mut() {
            row.swap(k, pj);
        }
        let pv = p.pow(v);
        let unit = invmod(a[k][k] / pv, modulus).expect("pivot unit part");
        for j in 0..cols {
            a[k][j] = mulmod(a[k][j], unit, modulus);
        }
        b[k] = mulmod(b[k], unit, modulus);
        for i in 0..m {
            if i == k || a[i][k] == 0 {
                continue;
            }
            let f = a[i][k] / pv;
            for j in 0..cols {
                a[i][j] = submod(a[i][j], mulmod(f, a[k][j], modulus), modulus);
            }
            b[i] = submod(b[i], mulmod(f, b[k], modulus), modulus);
        }
        for j in 0..cols {
            if j == k || a[k][j] == 0 {
                continue;
            }
            let g = a[k][j] / pv;
            for row in a.iter_mut() {
                row[j] = submod(row[j], mulmod(g, row[k], modulus), modulus);
            }
            for row in c.iter_mut() {
                row[j] = submod(row[j], mulmod(g, row[k], modulus), modulus);
            }
        }
        vals.push(v);
        k += 1;
    }
    let mut y = vec![0u64; cols];
    for i in 0..m {
        if i < k {
            let pv = p.pow(vals[i]);
            if b[i] % pv != 0 {
                return None;
            }
            y[i] = b[i] / pv;
        } else if b[i] != 0 {
            return None;
        }
    }
    Some(
        (0..cols)
            .map(|i| (0..cols).fold(0u64, |acc, j| (acc + mulmod(c[i][j], y[j], modulus)) % modulus))
            .collect(),
    )
}

fn require_uniform(ring: &SeriesRing) -> Result<()> {
    let m = ring.modulus_at(0);
    if (0..ring.dim()).any(|i| ring.modulus_at(i) != m) {
        return Err(Error::InvalidDesc("linear solve needs a uniform coefficient modulus".into()));
    }
    Ok(())
}

/// Solve f(x) = rhs for x in S^k, where f: S^k -> S^l is Z/p^N-linear.
/// The map is probed on the Z/p^N-basis, so it must really be linear.
pub fn solve_linear_map<F>(ring: &SeriesRing, k: usize, f: F, rhs: &[Series]) -> Result<Option<Vec<Series>>>
where
    F: Fn(&[Series]) -> Vec<Series>,
{
    require_uniform(ring)?;
    let dim = ring.dim();
    let unknowns = k * dim;
    let eqs = rhs.len() * dim;
    let mut a = vec![vec![0u64; unknowns]; eqs];
    for u in 0..unknowns {
        let mut x = vec![ring.zero(); k];
        x[u / dim] = ring.basis_element(u % dim);
        let img = f(&x);
        if img.len() != rhs.len() {
            return Err(Error::Dimension("linear map output length".into()));
        }
        for (q, s) in img.iter().enumerate() {
            for (t, c) in s.0.iter().enumerate() {
                a[q * dim + t][u] = *c;
            }
        }
    }
    let b: Vec<u64> = rhs.iter().flat_map(|s| s.0.iter().copied()).collect();
    let sol = solve_zpn(ring.prime(), ring.precision(), &a, &b);
    Ok(sol.map(|v| (0..k).map(|i| Series(v[i * dim..(i + 1) * dim].to_vec())).collect()))
}

/// Whether `target` lies in the S-submodule of S generated by `gens`.
pub fn in_ideal(ring: &SeriesRing, gens: &[Series], target: &Series) -> Result<bool> {
    let f = |x: &[Series]| {
        let mut acc = ring.zero();
        for (g, c) in gens.iter().zip(x) {
            acc = ring.add(&acc, &ring.mul(g, c));
        }
        vec![acc]
    };
    Ok(solve_linear_map(ring, gens.len(), f, std::slice::from_ref(target))?.is_some())
}
