//! Random generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use bcov_core::exactalg::{int, rat, Rational, RationalMatrix, RotationNumber};
use bcov_core::hodgemetrics::TorusDescriptor;
use bcov_core::lmhs::{DegreeData, HodgeDeligneTable, LimitingMHS};
use bcov_core::monodromy::{TwistedFrame, TwistedFrameSection};
use bcov_core::strata::IntersectionTensor;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sign(e: usize) -> i64 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn random_int_matrix(rng: &mut impl Rng, rows: usize, cols: usize, bound: i64) -> RationalMatrix {
    let data = (0..rows * cols).map(|_| int(rng.gen_range(-bound..=bound))).collect();
    RationalMatrix::new(rows, cols, data).unwrap()
}

pub fn random_invertible(rng: &mut impl Rng, n: usize, bound: i64) -> RationalMatrix {
    loop {
        let m = random_int_matrix(rng, n, n, bound);
        if !m.det().unwrap().is_zero() {
            return m;
        }
    }
}

// ---------------------------------------------------------------------------
// Twisted frames and the determinantal-divisor oracle

pub struct FrameCase {
    pub frame: TwistedFrame,
    /// sections[i].coefficients()[j] = f_{ji}, a series in t.
    pub sections: Vec<TwistedFrameSection>,
}

pub fn random_frame_case(rng: &mut impl Rng) -> FrameCase {
    let ell = rng.gen_range(1..=12u64);
    let r = rng.gen_range(1..=6usize);
    let labels: Vec<u64> = (0..r).map(|_| rng.gen_range(0..ell)).collect();
    let frame = TwistedFrame::new(ell, labels, None).unwrap();
    let d = (ell as usize).max(r + 1);
    let f0 = random_invertible(rng, r, 2);
    let sections = (0..r)
        .map(|i| {
            let coefficients = (0..r)
                .map(|j| {
                    let mut f = vec![f0.get(j, i).clone()];
                    f.extend((1..d).map(|_| int(rng.gen_range(-2..=2))));
                    f
                })
                .collect();
            TwistedFrameSection::new(coefficients, d).unwrap()
        })
        .collect();
    FrameCase { frame, sections }
}

/// Truncated power series in q: coefficients below the known precision.
type Series = Vec<Rational>;

fn series_valuation(s: &Series) -> Option<usize> {
    s.iter().position(|c| !c.is_zero())
}

fn series_mul(a: &Series, b: &Series, prec: usize) -> Series {
    let mut out = vec![Rational::zero(); prec];
    for (i, x) in a.iter().enumerate().take(prec) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(prec - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn series_inverse(u: &Series, prec: usize) -> Series {
    let mut inv = vec![Rational::zero(); prec];
    inv[0] = Rational::one() / &u[0];
    for m in 1..prec {
        let s: Rational = (1..=m).filter(|&i| i < u.len()).map(|i| &u[i] * &inv[m - i]).sum();
        inv[m] = -s * &inv[0];
    }
    inv
}

/// Exponents of the span of `sections` from a Smith-style elimination over
/// Q[[q]] on the matrix with entries q^{k_j}·f_{ji}(q^ℓ): pivot on an entry
/// of least valuation, clear its column, drop its row and column. The pivot
/// valuations are the elementary divisors.
pub fn smith_exponents(frame: &TwistedFrame, sections: &[TwistedFrameSection]) -> Vec<RotationNumber> {
    let r = frame.rank();
    let h = sections.len();
    let ell = frame.ell() as usize;
    // every elementary divisor is below ℓ, so ℓ(r+1) terms are enough
    let mut prec = ell * (r + 1);
    let mut m: Vec<Vec<Series>> = (0..r)
        .map(|j| {
            (0..h)
                .map(|i| {
                    let mut s = vec![Rational::zero(); prec];
                    for (t, c) in sections[i].coefficients()[j].iter().enumerate() {
                        let e = frame.labels()[j] as usize + ell * t;
                        if e < prec {
                            s[e] = c.clone();
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();
    let mut rows: Vec<usize> = (0..r).collect();
    let mut cols: Vec<usize> = (0..h).collect();
    let mut out = Vec::with_capacity(h);
    for _ in 0..h {
        let (a, b, v) = rows
            .iter()
            .flat_map(|&a| cols.iter().map(move |&b| (a, b)))
            .filter_map(|(a, b)| series_valuation(&m[a][b]).map(|v| (a, b, v)))
            .min_by_key(|t| t.2)
            .expect("sections of full rank");
        assert!(v < ell && prec > v + ell, "precision exhausted");
        let rest = prec - v;
        let unit: Series = m[a][b][v..].to_vec();
        let inv = series_inverse(&unit, rest);
        for &i in rows.iter().filter(|&&i| i != a) {
            let factor = series_mul(&m[i][b][v..].to_vec(), &inv, rest);
            for &c in &cols {
                let delta = series_mul(&factor, &m[a][c], rest);
                for (x, d) in m[i][c].iter_mut().zip(delta) {
                    *x -= d;
                }
                m[i][c].truncate(rest);
            }
        }
        prec = rest;
        for row in m.iter_mut() {
            for s in row.iter_mut() {
                s.truncate(prec);
            }
        }
        rows.retain(|&x| x != a);
        cols.retain(|&x| x != b);
        out.push(RotationNumber::new(rat(v as i64, ell as i64)).unwrap());
    }
    out.sort();
    out
}

/// Multiset difference a − b, both sorted.
pub fn multiset_minus(a: &[RotationNumber], b: &[RotationNumber]) -> Option<Vec<RotationNumber>> {
    let mut rest = a.to_vec();
    for x in b {
        let pos = rest.iter().position(|y| y == x)?;
        rest.remove(pos);
    }
    Some(rest)
}

// ---------------------------------------------------------------------------
// Hodge–Deligne tables built from N-strings

/// A table that is valid by construction: each N-string has top weight k + r
/// and top type (p, k + r − p), and comes with its conjugate.
pub fn random_deligne_entries(rng: &mut impl Rng, k: usize, n: usize) -> BTreeMap<(usize, usize), u64> {
    let mut d: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let rmax = k.min(2 * n - k);
    let strings = rng.gen_range(0..=4);
    for _ in 0..strings {
        let r = rng.gen_range(0..=rmax);
        let w = k + r;
        // need r ≤ p ≤ k and w − p ≤ n, p ≤ n
        let lo = r.max(w.saturating_sub(n));
        let hi = k.min(n);
        if lo > hi {
            continue;
        }
        let p = rng.gen_range(lo..=hi);
        let mult = rng.gen_range(1..=3u64);
        let conj = w - p;
        for top in if conj == p { vec![p] } else { vec![p, conj] } {
            for i in 0..=r {
                *d.entry((top - i, w - 2 * i)).or_default() += mult;
            }
        }
    }
    d
}

pub fn random_deligne_table(rng: &mut impl Rng, k: usize, n: usize) -> HodgeDeligneTable {
    let d = random_deligne_entries(rng, k, n);
    HodgeDeligneTable::new(k, n, d.into_iter().map(|((p, w), m)| (p, w, m))).unwrap()
}

/// Random rotations with denominators dividing `m`, one multiset per level.
pub fn random_rotations(rng: &mut impl Rng, table: &HodgeDeligneTable, m: u64) -> BTreeMap<usize, Vec<RotationNumber>> {
    let mut out = BTreeMap::new();
    for p in 0..=table.fiber_dimension() {
        let dim = table.level_dim(p) as usize;
        if dim > 0 {
            let rots = (0..dim)
                .map(|_| RotationNumber::from_ratio(rng.gen_range(0..m as i64), m as i64))
                .collect();
            out.insert(p, rots);
        }
    }
    out
}

/// Limiting MHS carrying a random table in degree n (rotations of order
/// dividing `m`) and pure trivial data elsewhere.
pub fn random_mhs(rng: &mut impl Rng, n: usize, m: u64) -> LimitingMHS {
    let table = random_deligne_table(rng, n, n);
    let rotations = random_rotations(rng, &table, m);
    let mut degrees: BTreeMap<usize, DegreeData> = (0..=2 * n).map(|k| (k, DegreeData::PureTrivial)).collect();
    degrees.insert(n, DegreeData::explicit(table, rotations).unwrap());
    LimitingMHS::new(n, degrees).unwrap()
}

// ---------------------------------------------------------------------------
// Tori

/// A torus with a random hermitian metric in a random lattice basis.
pub fn random_torus(rng: &mut impl Rng, n: usize) -> TorusDescriptor {
    // H = C*C + I with C = X + iY, so A = XᵀX + YᵀY + I and B = XᵀY − YᵀX
    let x = random_int_matrix(rng, n, n, 2);
    let y = random_int_matrix(rng, n, n, 2);
    let a = &(&(&x.transpose() * &x) + &(&y.transpose() * &y)) + &RationalMatrix::identity(n);
    let b = &(&x.transpose() * &y) - &(&y.transpose() * &x);
    let dim = 2 * n;
    let mut g0 = RationalMatrix::zeros(dim, dim);
    let mut j0 = RationalMatrix::zeros(dim, dim);
    for i in 0..n {
        j0.set(i, n + i, int(-1));
        j0.set(n + i, i, int(1));
        for j in 0..n {
            g0.set(i, j, a.get(i, j).clone());
            g0.set(n + i, n + j, a.get(i, j).clone());
            g0.set(i, n + j, -b.get(i, j).clone());
            g0.set(n + i, j, b.get(i, j).clone());
        }
    }
    let omega0 = -&(&g0 * &j0);
    let scale = rat(rng.gen_range(1..=5), rng.gen_range(1..=5));
    let p = random_invertible(rng, dim, 1);
    let j = &(&p.inverse().unwrap() * &j0) * &p;
    let omega = (&(&p.transpose() * &omega0) * &p).scale(&scale);
    TorusDescriptor::new(n, j, omega).expect("construction yields a valid torus")
}

// ---------------------------------------------------------------------------
// Intersection tensors with Σᵢ[Dᵢ] = 0

/// T_{ijkl} = A(vᵢ, vⱼ, v_k, v_l) with vᵢ = eᵢ (i < r−1), v_{r−1} = −Σeᵢ, and
/// A a random symmetric 4-tensor on Q^{r−1} written as a sum of fourth powers.
pub fn random_liu_xia_tensor(rng: &mut impl Rng, r: usize) -> IntersectionTensor {
    let m = r - 1;
    let terms: Vec<(Rational, Vec<i64>)> = (0..rng.gen_range(1..=4))
        .map(|_| (int(rng.gen_range(-3..=3)), (0..m).map(|_| rng.gen_range(-2..=2)).collect()))
        .collect();
    // ⟨u, v_i⟩
    let pair = |u: &[i64], i: usize| -> i64 {
        if i < m {
            u[i]
        } else {
            -u.iter().sum::<i64>()
        }
    };
    IntersectionTensor::from_fn(r, |i, j, k, l| {
        terms
            .iter()
            .map(|(c, u)| c * int(pair(u, i) * pair(u, j) * pair(u, k) * pair(u, l)))
            .sum()
    })
}

// ---------------------------------------------------------------------------
// Hodge Euler characteristics consistent with Serre duality and Riemann–Roch

/// Serre-symmetric χ(Ω^j), j = 0…d, from free values on the lower half.
pub fn serre_symmetric(free: &[i64], d: usize) -> Vec<i64> {
    let mut x = vec![0i64; d + 1];
    for j in 0..=d / 2 {
        x[j] = free[j];
        x[d - j] = sign(d) * free[j];
    }
    x
}

pub fn alternating(x: &[i64]) -> i64 {
    x.iter().enumerate().map(|(j, v)| sign(j) * v).sum()
}

/// Σ(−1)^j (j²+j)/2 χ(Ω^j).
pub fn rr_lhs(x: &[i64]) -> Rational {
    x.iter().enumerate().map(|(j, v)| int(sign(j) * (j * j + j) as i64 / 2 * v)).sum()
}

/// The ∫c₁c_{d−1} that Riemann–Roch assigns to χ(Ω^j) data on a d-fold.
pub fn chern_from_hodge(x: &[i64]) -> Rational {
    let d = (x.len() - 1) as i64;
    let chi = alternating(x);
    (rr_lhs(x) - rat(d * (3 * d + 7) * chi, 24)) * int(12 * sign(d as usize))
}

/// Random χ(Ω^j) on a d-fold with an integral Chern number.
pub fn random_stratum_hodge(rng: &mut impl Rng, d: usize) -> Vec<i64> {
    let free: Vec<i64> = (0..=d / 2).map(|_| 2 * rng.gen_range(-10..=10)).collect();
    serre_symmetric(&free, d)
}

/// Random χ(Ω^j) on an n-fold with c₁ = 0, scaled to integers.
pub fn random_fiber_hodge(rng: &mut impl Rng, n: usize) -> Vec<i64> {
    loop {
        let free: Vec<i64> = (0..=n / 2).map(|_| rng.gen_range(-10..=10)).collect();
        // the constraint rr_lhs − n(3n+7)/24·χ = 0 is linear in the free values
        let residual = |f: &[i64]| {
            let x = serre_symmetric(f, n);
            rr_lhs(&x) - rat((n * (3 * n + 7)) as i64 * alternating(&x), 24)
        };
        let base = residual(&free);
        let pivot = (0..free.len()).rev().find(|&j| {
            let mut e = vec![0; free.len()];
            e[j] = 1;
            !residual(&e).is_zero()
        });
        let Some(j) = pivot else {
            if base.is_zero() {
                return serre_symmetric(&free, n);
            }
            continue;
        };
        let mut e = vec![0; free.len()];
        e[j] = 1;
        let coeff = residual(&e);
        // free[j] += t with base + t·coeff = 0
        let t = -&base / &coeff;
        let mut sol: Vec<Rational> = free.iter().map(|&v| int(v)).collect();
        sol[j] += t;
        let denom = sol.iter().fold(num_bigint::BigInt::from(1), |acc, v| {
            num_integer::Integer::lcm(&acc, v.denom())
        });
        let scaled: Vec<i64> = sol
            .iter()
            .map(|v| {
                let s = v * Rational::from_integer(denom.clone());
                i64::try_from(s.to_integer()).unwrap()
            })
            .collect();
        if scaled.iter().any(|v| v.abs() > 1_000_000) {
            continue;
        }
        let x = serre_symmetric(&scaled, n);
        debug_assert!(chern_from_hodge(&x).is_zero());
        return x;
    }
}
