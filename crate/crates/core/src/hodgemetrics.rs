//! L² covolumes of integral cohomology on flat complex tori with a rational
//! Kähler class, and the resulting B-factor.
//!
//! Everything is squared so that it stays rational. The Kähler form is used
//! as given; any 1/2π normalization must be applied by the caller.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{format_rational, rational_sqrt, Rational, RationalMatrix};

/// Flat torus C^n/Λ with Λ = Z^{2n}: complex structure J and Kähler form ω,
/// both written in a lattice basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusDescriptor {
    n: usize,
    j: RationalMatrix,
    omega: RationalMatrix,
}

impl TorusDescriptor {
    /// Requires J² = −I, ω alternating and J-invariant, and g(x, y) = ω(x, Jy)
    /// positive definite.
    pub fn new(n: usize, j: RationalMatrix, omega: RationalMatrix) -> Result<Self> {
        let dim = 2 * n;
        if n == 0 {
            return Err(Error::validation("n", "must be positive"));
        }
        for (name, m) in [("J", &j), ("omega", &omega)] {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::validation(name, format!("expected a {dim}x{dim} matrix")));
            }
        }
        if !(&(&j * &j) + &RationalMatrix::identity(dim)).is_zero() {
            return Err(Error::validation("J", "J^2 != -I"));
        }
        if !(&omega + &omega.transpose()).is_zero() {
            return Err(Error::validation("omega", "not alternating"));
        }
        if &(&j.transpose() * &omega) * &j != omega {
            return Err(Error::validation("omega", "not invariant under J"));
        }
        let g = &omega * &j;
        if g.transpose() != g {
            return Err(Error::validation("omega", "omega(x, Jy) is not symmetric"));
        }
        for m in 1..=dim {
            let idx: Vec<usize> = (0..m).collect();
            if !g.select(&idx, &idx).det()?.is_positive() {
                return Err(Error::validation("omega", "omega(x, Jy) is not positive definite"));
            }
        }
        Ok(TorusDescriptor { n, j, omega })
    }

    /// C/Z[i] with ω = dx∧dy.
    pub fn square_elliptic() -> Self {
        Self::new(
            1,
            RationalMatrix::from_i64(&[&[0, -1], &[1, 0]]),
            RationalMatrix::from_i64(&[&[0, 1], &[-1, 0]]),
        )
        .expect("standard torus")
    }

    /// Product torus, coordinates concatenated.
    pub fn product(factors: &[TorusDescriptor]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::validation("factors", "empty product"));
        }
        let n: usize = factors.iter().map(|t| t.n).sum();
        let dim = 2 * n;
        let mut j = RationalMatrix::zeros(dim, dim);
        let mut omega = RationalMatrix::zeros(dim, dim);
        let mut off = 0;
        for t in factors {
            for a in 0..2 * t.n {
                for b in 0..2 * t.n {
                    j.set(off + a, off + b, t.j.get(a, b).clone());
                    omega.set(off + a, off + b, t.omega.get(a, b).clone());
                }
            }
            off += 2 * t.n;
        }
        Self::new(n, j, omega)
    }

    /// Same complex structure with ω multiplied by c > 0.
    pub fn rescaled(&self, c: &Rational) -> Result<Self> {
        Self::new(self.n, self.j.clone(), self.omega.scale(c))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn complex_structure(&self) -> &RationalMatrix {
        &self.j
    }

    pub fn kahler_form(&self) -> &RationalMatrix {
        &self.omega
    }

    /// g = ωJ.
    pub fn metric(&self) -> RationalMatrix {
        &self.omega * &self.j
    }

    /// ∫ ω^n/n! over a fundamental domain, i.e. |Pf ω|.
    pub fn volume(&self) -> Rational {
        pfaffian(&self.omega).expect("validated").abs()
    }
}

/// Pfaffian of an alternating matrix, by skew-symmetric Gaussian elimination.
pub fn pfaffian(a: &RationalMatrix) -> Result<Rational> {
    a.require_square("Pfaffian")?;
    if !(a + &a.transpose()).is_zero() {
        return Err(Error::validation("matrix", "not alternating"));
    }
    let n = a.rows();
    if n % 2 == 1 {
        return Ok(Rational::zero());
    }
    let mut m = a.to_rows();
    let mut pf = Rational::one();
    let swap = |m: &mut Vec<Vec<Rational>>, x: usize, y: usize| {
        m.swap(x, y);
        for row in m.iter_mut() {
            row.swap(x, y);
        }
    };
    for k in (0..n).step_by(2) {
        let Some(p) = (k + 1..n).find(|&c| !m[k][c].is_zero()) else {
            return Ok(Rational::zero());
        };
        if p != k + 1 {
            swap(&mut m, k + 1, p);
            pf = -pf;
        }
        let pivot = m[k][k + 1].clone();
        pf *= &pivot;
        for i in k + 2..n {
            let f = &m[k][i] / &pivot;
            if f.is_zero() {
                continue;
            }
            // row_i −= f·row_{k+1}, then the same on columns keeps the matrix alternating
            for c in 0..n {
                let v = &f * &m[k + 1][c];
                m[i][c] -= v;
            }
            for r in 0..n {
                let v = &f * &m[r][k + 1];
                m[r][i] -= v;
            }
        }
    }
    Ok(pf)
}

/// k-subsets of 0..m in lexicographic order.
pub fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// k-th compound matrix: the action of A on Λ^k in the basis e_I, I ordered lexicographically.
pub fn exterior_power(a: &RationalMatrix, k: usize) -> Result<RationalMatrix> {
    let rows = subsets(a.rows(), k);
    let cols = subsets(a.cols(), k);
    let mut out = RationalMatrix::zeros(rows.len(), cols.len());
    for (r, ri) in rows.iter().enumerate() {
        for (c, ci) in cols.iter().enumerate() {
            out.set(r, c, a.select(ri, ci).det()?);
        }
    }
    Ok(out)
}

/// Gram matrix of the integral k-covectors e^I under vol·⟨·,·⟩_g.
pub fn l2_gram(torus: &TorusDescriptor, k: usize) -> Result<RationalMatrix> {
    let dim = 2 * torus.n;
    if k > dim {
        return Err(Error::validation("k", format!("degree must lie in 0..={dim}")));
    }
    let g_inv = torus.metric().inverse()?;
    Ok(exterior_power(&g_inv, k)?.scale(&torus.volume()))
}

/// Squared covolume of H^k(X, Z): det of the Gram matrix.
pub fn covol_sq(torus: &TorusDescriptor, k: usize) -> Result<Rational> {
    l2_gram(torus, k)?.det()
}

/// B⁴ = Π_{k=1}^{2n} covol²(k)^{(−1)^{k+1} k}.
pub fn b_factor_fourth(torus: &TorusDescriptor) -> Result<Rational> {
    let mut b4 = Rational::one();
    for k in 1..=2 * torus.n {
        let c = covol_sq(torus, k)?;
        let e = k as i32;
        b4 *= if k % 2 == 1 { c.pow(e) } else { c.pow(-e) };
    }
    Ok(b4)
}

/// B², the exact square root of B⁴ (a square by Poincaré duality).
pub fn b_factor_sq(torus: &TorusDescriptor) -> Result<Rational> {
    let b4 = b_factor_fourth(torus)?;
    rational_sqrt(&b4).ok_or_else(|| Error::Inconsistency {
        what: "B^4 is not a rational square".into(),
        left: format_rational(&b4),
        right: "a square".into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CovolumeReport {
    pub n: usize,
    /// covol²(k) for k = 0…2n.
    pub covol_sq: Vec<Rational>,
    pub b_squared: Rational,
}

pub fn covolume_report(torus: &TorusDescriptor) -> Result<CovolumeReport> {
    let covol_sq = (0..=2 * torus.n).map(|k| covol_sq(torus, k)).collect::<Result<Vec<_>>>()?;
    for k in 0..=torus.n {
        let prod = &covol_sq[k] * &covol_sq[2 * torus.n - k];
        if !prod.is_one() {
            return Err(Error::Inconsistency {
                what: format!("covol^2({k}) * covol^2({})", 2 * torus.n - k),
                left: format_rational(&prod),
                right: "1/1".into(),
            });
        }
    }
    Ok(CovolumeReport {
        n: torus.n,
        covol_sq,
        b_squared: b_factor_sq(torus)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{int, rat};

    #[test]
    fn square_elliptic_curve() {
        let t = TorusDescriptor::square_elliptic();
        assert_eq!(l2_gram(&t, 1).unwrap(), RationalMatrix::identity(2));
        assert_eq!(covol_sq(&t, 1).unwrap(), int(1));
        assert_eq!(b_factor_sq(&t).unwrap(), int(1));
    }

    #[test]
    fn extreme_degrees() {
        let t = TorusDescriptor::square_elliptic().rescaled(&int(3)).unwrap();
        assert_eq!(l2_gram(&t, 0).unwrap(), RationalMatrix::diagonal(&[int(3)]));
        assert_eq!(covol_sq(&t, 2).unwrap(), rat(1, 3));
        let r = covolume_report(&t).unwrap();
        assert_eq!(r.covol_sq, vec![int(3), int(1), rat(1, 3)]);
        // B⁴ = covol²(1)·covol²(2)^{−2} = 9
        assert_eq!(r.b_squared, int(3));
    }

    #[test]
    fn products_of_square_curves() {
        for n in 1..=3 {
            let t = TorusDescriptor::product(&vec![TorusDescriptor::square_elliptic(); n]).unwrap();
            for k in 0..=2 * n {
                assert_eq!(l2_gram(&t, k).unwrap(), RationalMatrix::identity(subsets(2 * n, k).len()));
            }
            assert_eq!(b_factor_sq(&t).unwrap(), int(1));
        }
    }

    #[test]
    fn pfaffians() {
        let a = RationalMatrix::from_i64(&[&[0, 1, 2, 3], &[-1, 0, 4, 5], &[-2, -4, 0, 6], &[-3, -5, -6, 0]]);
        // a01 a23 − a02 a13 + a03 a12
        assert_eq!(pfaffian(&a).unwrap(), int(6 - 10 + 12));
        assert_eq!(pfaffian(&a).unwrap().pow(2), a.det().unwrap());
        let b = RationalMatrix::from_i64(&[&[0, 0, 1, 0], &[0, 0, 0, 1], &[-1, 0, 0, 0], &[0, -1, 0, 0]]);
        assert_eq!(pfaffian(&b).unwrap(), int(-1));
    }

    #[test]
    fn invalid_tori() {
        let j = RationalMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        assert!(TorusDescriptor::new(1, j.clone(), RationalMatrix::from_i64(&[&[0, -1], &[1, 0]])).is_err());
        assert!(TorusDescriptor::new(1, RationalMatrix::identity(2), RationalMatrix::from_i64(&[&[0, 1], &[-1, 0]])).is_err());
        assert!(TorusDescriptor::new(1, j, RationalMatrix::from_i64(&[&[1, 1], &[-1, 0]])).is_err());
    }
}
