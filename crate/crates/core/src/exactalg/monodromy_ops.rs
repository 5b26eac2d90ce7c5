use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use num_integer::Integer;
use num_traits::{One, Zero};

use super::matrix::{column_space, intersect_subspaces, RationalMatrix};
use super::poly::{cyclotomic, euler_phi, PolynomialQ};
use super::rational::{Rational, RotationNumber};
use crate::error::{Error, Result};

/// Monic characteristic polynomial det(xI − M), by Faddeev–LeVerrier.
pub fn char_poly(m: &RationalMatrix) -> Result<PolynomialQ> {
    m.require_square("characteristic polynomial")?;
    let n = m.rows();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut mk = RationalMatrix::zeros(n, n);
    for k in 1..=n {
        let shifted = &mk + &RationalMatrix::identity(n).scale(&coeffs[n - k + 1]);
        mk = m * &shifted;
        coeffs[n - k] = -mk.trace() / Rational::from_integer((k as i64).into());
    }
    Ok(PolynomialQ::new(coeffs))
}

fn cached_cyclotomic(d: u64) -> PolynomialQ {
    static CACHE: OnceLock<Mutex<HashMap<u64, PolynomialQ>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&d) {
        return p.clone();
    }
    let p = cyclotomic(d);
    cache.lock().unwrap().insert(d, p.clone());
    p
}

/// Writes a monic polynomial as Π Φ_d^{m_d}. Returns the pairs (d, m_d) in
/// increasing d, or the cofactor that is not a product of cyclotomics.
pub fn cyclotomic_factorization(p: &PolynomialQ) -> std::result::Result<Vec<(u64, usize)>, PolynomialQ> {
    let mut rem = p.monic();
    let mut factors = Vec::new();
    let deg = rem.degree().unwrap_or(0) as u64;
    // φ(d) ≥ sqrt(d/2), so every d with φ(d) ≤ deg satisfies d ≤ 2·deg².
    let bound = 2 * deg * deg + 2;
    let mut d = 1;
    while d <= bound && rem.degree().unwrap_or(0) > 0 {
        let phi = euler_phi(d);
        if phi <= rem.degree().unwrap_or(0) as u64 {
            let c = cached_cyclotomic(d);
            let mut mult = 0;
            loop {
                let (q, r) = rem.div_rem(&c);
                if !r.is_zero() {
                    break;
                }
                rem = q;
                mult += 1;
            }
            if mult > 0 {
                factors.push((d, mult));
            }
        }
        d += 1;
    }
    if rem.degree() == Some(0) {
        Ok(factors)
    } else {
        Err(rem)
    }
}

fn checked_factorization(m: &RationalMatrix) -> Result<Vec<(u64, usize)>> {
    m.require_square("quasi-unipotence test")?;
    if m.det()?.is_zero() {
        return Err(Error::InvalidMonodromy {
            reason: "matrix is singular".into(),
            factor: None,
        });
    }
    let cp = char_poly(m)?;
    cyclotomic_factorization(&cp).map_err(|rest| Error::InvalidMonodromy {
        reason: format!("characteristic polynomial has the non-cyclotomic factor {rest}"),
        factor: Some(rest.to_string()),
    })
}

/// Smallest ℓ ≥ 1 with M^ℓ unipotent.
pub fn quasi_unipotence_order(m: &RationalMatrix) -> Result<u64> {
    let factors = checked_factorization(m)?;
    Ok(factors.iter().fold(1u64, |acc, &(d, _)| acc.lcm(&d)))
}

pub fn is_unipotent(u: &RationalMatrix) -> bool {
    u.is_square() && (u - &RationalMatrix::identity(u.rows())).pow(u.rows() as u32).is_zero()
}

/// Multiplicative Jordan–Chevalley decomposition M = T_s·T_u.
///
/// T_s is found by Newton iteration on the squarefree part g of the
/// characteristic polynomial, S ← S − g(S)·g'(S)⁻¹, which stays inside
/// ℚ[M] and converges in O(log n) steps.
pub fn chevalley_decompose(m: &RationalMatrix) -> Result<(RationalMatrix, RationalMatrix)> {
    checked_factorization(m)?;
    let g = char_poly(m)?.squarefree_part();
    let dg = g.derivative();
    let mut s = m.clone();
    for _ in 0..64 {
        let gs = g.eval_matrix(&s);
        if gs.is_zero() {
            let u = &s.inverse()? * m;
            return Ok((s, u));
        }
        let step = &gs * &dg.eval_matrix(&s).inverse()?;
        s = &s - &step;
    }
    Err(Error::Numeric("Newton iteration for the semisimple part did not converge".into()))
}

/// L = log U = Σ_{m≥1} (−1)^{m+1} (U − I)^m / m for unipotent U.
pub fn nilpotent_log(u: &RationalMatrix) -> Result<RationalMatrix> {
    u.require_square("logarithm")?;
    if !is_unipotent(u) {
        return Err(Error::InvalidMonodromy {
            reason: "logarithm requested for a non-unipotent matrix".into(),
            factor: None,
        });
    }
    let n = u.rows();
    let x = u - &RationalMatrix::identity(n);
    let mut power = x.clone();
    let mut log = RationalMatrix::zeros(n, n);
    let mut m = 1i64;
    while !power.is_zero() {
        let c = Rational::new(if m % 2 == 1 { 1.into() } else { (-1).into() }, m.into());
        log = &log + &power.scale(&c);
        power = &power * &x;
        m += 1;
    }
    Ok(log)
}

/// exp L = Σ L^k / k! for nilpotent L.
pub fn nilpotent_exp(l: &RationalMatrix) -> Result<RationalMatrix> {
    l.require_square("exponential")?;
    let n = l.rows();
    if !l.pow(n as u32).is_zero() {
        return Err(Error::Precondition("exponential requested for a non-nilpotent matrix".into()));
    }
    let mut term = RationalMatrix::identity(n);
    let mut sum = term.clone();
    let mut k = 1i64;
    loop {
        term = (&term * l).scale(&Rational::new(1.into(), k.into()));
        if term.is_zero() {
            return Ok(sum);
        }
        sum = &sum + &term;
        k += 1;
    }
}

/// Monodromy weight filtration of a nilpotent endomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightFiltration {
    pub center: i64,
    /// Nonzero graded dimensions dim Gr^W_w.
    pub graded: BTreeMap<i64, usize>,
    /// Bases of the subspaces W_w, for every w where W_w is neither 0 nor everything below.
    pub subspaces: BTreeMap<i64, Vec<Vec<Rational>>>,
}

impl WeightFiltration {
    pub fn dim(&self, w: i64) -> usize {
        self.graded.get(&w).copied().unwrap_or(0)
    }
}

/// Weight filtration of `l` centered at `center`, using
/// W_{k+j} = Σ_{i ≥ max(0,−j)} ker L^{i+j+1} ∩ im L^i.
pub fn weight_filtration(l: &RationalMatrix, center: i64) -> Result<WeightFiltration> {
    l.require_square("weight filtration")?;
    let n = l.rows();
    if !l.pow(n as u32).is_zero() {
        return Err(Error::Precondition("weight filtration requires a nilpotent operator".into()));
    }
    let mut filtration = WeightFiltration {
        center,
        graded: BTreeMap::new(),
        subspaces: BTreeMap::new(),
    };
    if n == 0 {
        return Ok(filtration);
    }
    let mut powers = vec![RationalMatrix::identity(n)];
    while !powers.last().unwrap().is_zero() {
        let next = &powers[powers.len() - 1] * l;
        powers.push(next);
    }
    let m = (powers.len() - 1) as i64; // L^m = 0, L^{m-1} ≠ 0
    let power = |a: i64| -> &RationalMatrix { &powers[(a.min(m)) as usize] };
    let mut previous = 0usize;
    for j in -(m - 1)..=(m - 1) {
        let mut span: Vec<Vec<Rational>> = Vec::new();
        for i in 0.max(-j)..=m {
            let kernel = power(i + j + 1).kernel();
            let image = power(i).image();
            span.extend(intersect_subspaces(n, &kernel, &image));
        }
        let basis = column_space(n, &span);
        let dim = basis.len();
        if dim > previous {
            filtration.graded.insert(center + j, dim - previous);
        }
        previous = dim;
        filtration.subspaces.insert(center + j, basis);
    }
    debug_assert_eq!(previous, n);
    Ok(filtration)
}

/// Rotation multiset of a finite-order matrix, read off the cyclotomic
/// factorization of its characteristic polynomial: Φ_d contributes every
/// a/d with gcd(a, d) = 1. Sorted ascending.
pub fn eigen_rotations(ts: &RationalMatrix) -> Result<Vec<RotationNumber>> {
    let factors = checked_factorization(ts)?;
    let mut out = Vec::new();
    for (d, mult) in factors {
        for a in (0..d).filter(|a| a.gcd(&d) == 1) {
            for _ in 0..mult {
                out.push(RotationNumber::from_ratio(a as i64, d as i64));
            }
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{int, rat};

    #[test]
    fn char_poly_examples() {
        assert_eq!(char_poly(&RationalMatrix::identity(2)).unwrap(), PolynomialQ::from_i64(&[1, -2, 1]));
        let rot = RationalMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        assert_eq!(char_poly(&rot).unwrap(), PolynomialQ::from_i64(&[1, 0, 1]));
        let j = RationalMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert_eq!(char_poly(&j).unwrap(), PolynomialQ::from_i64(&[1, -2, 1]));
        assert!(char_poly(&RationalMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn quasi_unipotence_examples() {
        assert_eq!(quasi_unipotence_order(&RationalMatrix::from_i64(&[&[1, 1], &[0, 1]])).unwrap(), 1);
        assert_eq!(quasi_unipotence_order(&RationalMatrix::from_i64(&[&[0, -1], &[1, 0]])).unwrap(), 4);
        let err = quasi_unipotence_order(&RationalMatrix::from_i64(&[&[2, 0], &[0, 1]])).unwrap_err();
        assert!(matches!(err, Error::InvalidMonodromy { factor: Some(ref f), .. } if f == "x - 2"));
        assert!(quasi_unipotence_order(&RationalMatrix::from_i64(&[&[0, 0], &[0, 1]])).is_err());
    }

    #[test]
    fn chevalley_examples() {
        let j = RationalMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let (s, u) = chevalley_decompose(&j).unwrap();
        assert!(s.is_identity());
        assert_eq!(u, j);

        let rot = RationalMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        let (s, u) = chevalley_decompose(&rot).unwrap();
        assert_eq!(s, rot);
        assert!(u.is_identity());

        let m = RationalMatrix::from_i64(&[&[-1, 0, 0], &[0, 1, 1], &[0, 0, 1]]);
        let (s, u) = chevalley_decompose(&m).unwrap();
        assert_eq!(s, RationalMatrix::from_i64(&[&[-1, 0, 0], &[0, 1, 0], &[0, 0, 1]]));
        assert_eq!(u, RationalMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]]));
    }

    #[test]
    fn log_examples() {
        assert!(nilpotent_log(&RationalMatrix::identity(3)).unwrap().is_zero());
        let j2 = RationalMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert_eq!(nilpotent_log(&j2).unwrap(), RationalMatrix::from_i64(&[&[0, 1], &[0, 0]]));
        let j3 = RationalMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
        let expected = RationalMatrix::from_rows(vec![
            vec![int(0), int(1), rat(-1, 2)],
            vec![int(0), int(0), int(1)],
            vec![int(0), int(0), int(0)],
        ])
        .unwrap();
        assert_eq!(nilpotent_log(&j3).unwrap(), expected);
        assert_eq!(nilpotent_exp(&expected).unwrap(), j3);
        assert!(nilpotent_log(&RationalMatrix::from_i64(&[&[0, -1], &[1, 0]])).is_err());
    }

    #[test]
    fn weight_examples() {
        let w = weight_filtration(&RationalMatrix::zeros(3, 3), 2).unwrap();
        assert_eq!(w.graded, BTreeMap::from([(2, 3)]));
        let w = weight_filtration(&RationalMatrix::from_i64(&[&[0, 1], &[0, 0]]), 1).unwrap();
        assert_eq!(w.graded, BTreeMap::from([(0, 1), (2, 1)]));
        let n3 = RationalMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        let w = weight_filtration(&n3, 2).unwrap();
        assert_eq!(w.graded, BTreeMap::from([(0, 1), (2, 1), (4, 1)]));
        assert!(weight_filtration(&RationalMatrix::identity(2), 0).is_err());
    }

    #[test]
    fn rotation_examples() {
        let zero = RotationNumber::zero();
        assert_eq!(eigen_rotations(&RationalMatrix::identity(2)).unwrap(), vec![zero.clone(), zero.clone()]);
        let rot = RationalMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        assert_eq!(
            eigen_rotations(&rot).unwrap(),
            vec![RotationNumber::from_ratio(1, 4), RotationNumber::from_ratio(3, 4)]
        );
        let d = RationalMatrix::from_i64(&[&[-1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(
            eigen_rotations(&d).unwrap(),
            vec![zero.clone(), zero, RotationNumber::from_ratio(1, 2)]
        );
    }
}
