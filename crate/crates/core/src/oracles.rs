//! Brute-force and exact-integer oracles, independent of the solvers they
//! check. Shared by the acceptance suite and the CLI selftest.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;

use crate::base_rings::Series;
use crate::frames::{Frame, RelIdeal, RelativeBreuilFrame};
use crate::lifting::{BreuilKernel, Kernel};
use crate::matrix::{self, Matrix};
use crate::ring::Ring;
use crate::windows::{random_window, transport, twist, FpMatrix, Window, WindowHom};
use crate::witt::{IntPoly, WittPolyTable};

/// Value of an integer polynomial at integer arguments.
pub fn eval_int_poly(poly: &IntPoly, vars: &[BigInt]) -> BigInt {
    poly.terms.iter().fold(BigInt::zero(), |acc, (e, c)| {
        acc + e.iter().zip(vars).fold(c.clone(), |m, (k, v)| m * v.pow(*k as u32))
    })
}

/// Ghost component w_m = sum p^i x_i^(p^(m-i)) over the integers.
pub fn int_ghost(p: u64, x: &[BigInt], m: usize) -> BigInt {
    (0..=m).fold(BigInt::zero(), |acc, i| acc + BigInt::from(p).pow(i as u32) * x[i].pow(p.pow((m - i) as u32) as u32))
}

/// Checks on integer samples that the sum, product and Frobenius polynomials
/// reproduce ghost addition, multiplication and the ghost shift. Returns the
/// first failing (sample, component) on failure.
pub fn table_is_ghost_compatible(t: &WittPolyTable, samples: &[(Vec<i64>, Vec<i64>)]) -> Result<(), String> {
    let p = t.p;
    let n = t.n;
    for (si, (xa, xb)) in samples.iter().enumerate() {
        let a: Vec<BigInt> = xa[..n].iter().map(|v| BigInt::from(*v)).collect();
        let b: Vec<BigInt> = xb[..n].iter().map(|v| BigInt::from(*v)).collect();
        let vars: Vec<BigInt> = a.iter().chain(&b).cloned().collect();
        let sum: Vec<BigInt> = t.sum.iter().map(|q| eval_int_poly(q, &vars)).collect();
        let prod: Vec<BigInt> = t.prod.iter().map(|q| eval_int_poly(q, &vars)).collect();
        let frob: Vec<BigInt> = t.frob.iter().map(|q| eval_int_poly(q, &a)).collect();
        for m in 0..n {
            let (ga, gb) = (int_ghost(p, &a, m), int_ghost(p, &b, m));
            if int_ghost(p, &sum, m) != &ga + &gb {
                return Err(format!("sum, sample {si}, ghost {m}"));
            }
            if int_ghost(p, &prod, m) != &ga * &gb {
                return Err(format!("product, sample {si}, ghost {m}"));
            }
            if m + 1 < n && int_ghost(p, &frob, m) != int_ghost(p, &a, m + 1) {
                return Err(format!("frobenius, sample {si}, ghost {m}"));
            }
        }
    }
    Ok(())
}

/// Every element of the kernel J^a of S_(a+1), by enumeration.
pub fn kernel_elements(f: &RelativeBreuilFrame) -> Vec<Series> {
    let r = f.series();
    let top = f.a() as u32;
    let idx: Vec<usize> = (0..r.dim()).filter(|&i| r.basis().degrees[i] == top).collect();
    let mut out = vec![r.zero()];
    for &i in &idx {
        let m = r.modulus_at(i);
        out = out
            .into_iter()
            .flat_map(|x| {
                (0..m).map(move |c| {
                    let mut y = x.clone();
                    y.0[i] = c;
                    y
                })
            })
            .collect();
    }
    out
}

fn kernel_hom(k: &BreuilKernel, g: &Matrix<Series>, rk_l_src: usize, rk_l_dst: usize) -> WindowHom<Series, RelIdeal> {
    let c = Matrix::from_fn(g.rows - rk_l_dst, rk_l_src, |i, j| k.to_ideal(g.get(rk_l_dst + i, j)));
    WindowHom { g: g.clone(), c }
}

/// Whether g with its ideal block read through the kernel is an isomorphism
/// w1 -> w2: Psi_2 g^twist = g Psi_1.
pub fn is_iso_matrix(k: &BreuilKernel, w1: &Window<Series>, w2: &Window<Series>, g: &Matrix<Series>) -> bool {
    let f = k.frame;
    let s = f.ring();
    let gt = twist(f, &kernel_hom(k, g, w1.rk_l, w2.rk_l), w1.rk_l, w2.rk_l);
    matrix::equal(s, &matrix::mul(s, &w2.psi, &gt), &matrix::mul(s, g, &w1.psi))
}

/// Size of the search space Hom(P, aP) for rank h.
pub fn search_space(f: &RelativeBreuilFrame, h: usize) -> u128 {
    (kernel_elements(f).len() as u128).pow((h * h) as u32)
}

/// All Omega with entries in the kernel and 1 + Omega an isomorphism w1 -> w2.
pub fn brute_force_solutions(k: &BreuilKernel, w1: &Window<Series>, w2: &Window<Series>) -> Vec<Matrix<Series>> {
    let s = k.frame.ring();
    let elems = kernel_elements(k.frame);
    let h = w1.rank();
    let total = elems.len().pow((h * h) as u32);
    let mut sols = Vec::new();
    for mut code in 0..total {
        let omega = Matrix::from_fn(h, h, |_, _| {
            let e = elems[code % elems.len()].clone();
            code /= elems.len();
            e
        });
        let g = matrix::add(s, &matrix::identity(s, h), &omega);
        if is_iso_matrix(k, w1, w2, &g) {
            sols.push(omega);
        }
    }
    sols
}

pub fn random_kernel_matrix(f: &RelativeBreuilFrame, h: usize, rng: &mut dyn rand::RngCore) -> Matrix<Series> {
    let elems = kernel_elements(f);
    Matrix::from_fn(h, h, |_, _| elems[rng.gen_range(0..elems.len())].clone())
}

/// Windows w1, w2 congruent modulo the kernel and the Omega0 with
/// 1 + Omega0: w1 -> w2.
pub fn congruent_pair(
    f: &RelativeBreuilFrame,
    rk_l: usize,
    rk_t: usize,
    rng: &mut dyn rand::RngCore,
) -> crate::Result<(Window<Series>, Window<Series>, Matrix<Series>)> {
    let s = f.ring();
    let k = BreuilKernel::new(f);
    let w1 = random_window(f, rk_l, rk_t, rng);
    let omega0 = random_kernel_matrix(f, rk_l + rk_t, rng);
    let g = matrix::add(s, &matrix::identity(s, rk_l + rk_t), &omega0);
    let w2 = transport(f, &w1, &kernel_hom(&k, &g, rk_l, rk_l))?;
    Ok((w1, w2, omega0))
}

/// Dimension over F_p of the stable kernel of m, by counting the vectors
/// killed by m^h.
pub fn brute_force_nil_rank(p: u64, m: &FpMatrix) -> usize {
    let h = m.rows;
    let total = p.pow(h as u32);
    let mut count = 0u64;
    for code in 0..total {
        let mut v: Vec<u64> = (0..h).map(|i| (code / p.pow(i as u32)) % p).collect();
        for _ in 0..h {
            v = (0..h).map(|i| (0..h).map(|j| m.get(i, j) * v[j]).sum::<u64>() % p).collect();
        }
        count += u64::from(v.iter().all(|x| *x == 0));
    }
    let mut k = 0;
    while p.pow(k) < count {
        k += 1;
    }
    k as usize
}
