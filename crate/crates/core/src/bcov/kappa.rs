use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactalg::{format_rational, int, rat, Rational};
use crate::lmhs::{alpha, beta, LimitingMHS};
use crate::monodromy::BranchOfLog;
use crate::strata::{chi_special_fiber, derive_chern_kulikov, GeneralFiberData, SpecialFiberModel};

use super::sign;

/// μ_p, the defect between the Kähler and logarithmic extensions of λ(Ω^p).
pub fn mu_p(model: &SpecialFiberModel, fiber: &GeneralFiberData, p: usize) -> Result<i64> {
    check_dims(model, fiber)?;
    if p == 0 {
        return Ok(0);
    }
    let fiber_chi = |j: usize| -> Result<i64> {
        fiber
            .hodge_chis
            .as_ref()
            .map(|h| h[j])
            .or(if j == 0 { fiber.chi_struct } else { None })
            .ok_or_else(|| Error::Missing(format!("chi(Omega^{j}) of the general fiber")))
    };
    let truncated = |chis: &dyn Fn(usize) -> Result<i64>, m: usize| -> Result<i64> {
        (0..=m).map(|j| Ok(sign(j) * chis(j)?)).sum()
    };
    let mut mu = sign(p - 1) * truncated(&fiber_chi, p - 1)?;
    for k in 1..=p {
        let stratum_chi = |j: usize| -> Result<i64> {
            model
                .hodge_chi(k, j)
                .ok_or_else(|| Error::Missing(format!("chi(Omega^{j}) of stratum D({k})")))
        };
        mu -= sign(p - k) * truncated(&stratum_chi, p - k)?;
    }
    Ok(mu)
}

fn check_dims(model: &SpecialFiberModel, fiber: &GeneralFiberData) -> Result<()> {
    if model.n() != fiber.n {
        return Err(Error::Dimension(format!(
            "special fiber n = {}, general fiber n = {}",
            model.n(),
            fiber.n
        )));
    }
    Ok(())
}

/// Chern integrals ∫_{D(k)} c₁c_{n−k} for k = 1…n, derived for semistable
/// Kulikov models when absent.
fn chern_integrals(model: &SpecialFiberModel) -> Result<Vec<Rational>> {
    let n = model.n();
    let direct: Option<Vec<Rational>> = (1..=n).map(|k| model.chern(k)).collect();
    if let Some(c) = direct {
        return Ok(c);
    }
    if model.is_semistable() && model.is_kulikov() {
        let derived = derive_chern_kulikov(model)?;
        return Ok((1..=n).map(|k| derived.chern(k).expect("derived")).collect());
    }
    let k = (1..=n).find(|&k| model.chern(k).is_none()).unwrap();
    Err(Error::Missing(format!("chern_c1cd of stratum D({k})")))
}

/// μ_BCOV = Σ_p p(−1)^p μ_p, in closed form through χ and Chern numbers.
pub fn mu_bcov(model: &SpecialFiberModel, fiber: &GeneralFiberData) -> Result<Rational> {
    check_dims(model, fiber)?;
    let n = model.n() as i64;
    let chern = chern_integrals(model)?;
    let mut mu = -rat((9 * n + 5) * n * fiber.chi_top, 24);
    for k in 1..=n {
        let d = n - k + 1;
        mu -= rat(sign(k as usize) * (9 * n + 3 * k + 2) * d * model.chi(k as usize), 24);
    }
    let total: Rational = chern.iter().sum();
    mu -= total * rat(sign(n as usize), 12);
    Ok(mu)
}

/// Which reading of the T_s exponents each α-term uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KappaBranches {
    /// For α on Gr^n_F H^n.
    pub top: BranchOfLog,
    /// For the α^{p,q}.
    pub hodge: BranchOfLog,
}

impl KappaBranches {
    /// Upper for α, lower for the α^{p,q}, as in the general κ formula.
    pub const STANDARD: KappaBranches = KappaBranches {
        top: BranchOfLog::Upper,
        hodge: BranchOfLog::Lower,
    };
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaBreakdown {
    pub euler_term: Rational,
    pub strata_term: Rational,
    pub b_term: Rational,
    pub chern_term: Rational,
    pub alpha_top_term: Rational,
    pub alpha_hodge_term: Rational,
    pub total: Rational,
}

impl KappaBreakdown {
    pub fn terms(&self) -> [(&'static str, &Rational); 6] {
        [
            ("euler_term", &self.euler_term),
            ("strata_term", &self.strata_term),
            ("B_term", &self.b_term),
            ("chern_term", &self.chern_term),
            ("alpha_top_term", &self.alpha_top_term),
            ("alpha_hodge_term", &self.alpha_hodge_term),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BcovAsymptotics {
    pub kappa: Rational,
    pub rho: Rational,
}

/// −Σ_{p,q} (−1)^{p+q} p·x^{p,q}, skipping degrees the structure does not record.
fn hodge_weighted_sum(mhs: &LimitingMHS, f: impl Fn(usize, usize) -> Result<Rational>) -> Result<Rational> {
    let n = mhs.fiber_dimension();
    let mut total = Rational::zero();
    for &k in mhs.degrees().keys() {
        for p in k.saturating_sub(n)..=k.min(n) {
            if p == 0 {
                continue;
            }
            total -= f(p, k - p)? * int(sign(k) * p as i64);
        }
    }
    Ok(total)
}

fn require_degree_n(mhs: &LimitingMHS) -> Result<()> {
    let n = mhs.fiber_dimension();
    if mhs.degree(n).is_none() {
        return Err(Error::Missing(format!("limiting MHS data for degree {n}")));
    }
    Ok(())
}

/// κ_f for a normal crossings model, term by term.
///
/// Rotation denominators must divide lcm(mᵢ); with that, 12·lcm(mᵢ)·κ_f is
/// an integer, which is verified before returning.
pub fn kappa_general(
    model: &SpecialFiberModel,
    fiber: &GeneralFiberData,
    mhs: &LimitingMHS,
    branches: KappaBranches,
) -> Result<KappaBreakdown> {
    check_dims(model, fiber)?;
    if mhs.fiber_dimension() != model.n() {
        return Err(Error::Dimension(format!(
            "limiting MHS has n = {}, model has n = {}",
            mhs.fiber_dimension(),
            model.n()
        )));
    }
    require_degree_n(mhs)?;
    let m = BigInt::from(model.multiplicity_lcm());
    let order = mhs.common_denominator();
    if !m.is_multiple_of(&order) {
        return Err(Error::Inconsistency {
            what: "order of T_s against lcm of multiplicities".into(),
            left: order.to_string(),
            right: m.to_string(),
        });
    }

    let n = model.n();
    let ni = n as i64;
    let chi_inf = fiber.chi_top;
    let chi_0 = chi_special_fiber(model);
    let euler_term = rat((3 * ni + 1) * (chi_inf - chi_0), 12);
    let strata_term: Rational = (1..=n + 1)
        .map(|k| {
            let k = k as i64;
            rat(sign(k as usize) * (k - 1) * (3 * k + 6 * ni + 2) * model.chi(k as usize), 24)
        })
        .sum();
    let b = model
        .b_integral()
        .cloned()
        .ok_or_else(|| Error::Missing("B_integral (integral of c_n over B)".into()))?;
    let b_term = -b * rat(sign(n), 12);
    let chern_total: Rational = chern_integrals(model)?.iter().sum();
    let chern_term = -chern_total * rat(sign(n), 12);
    let a = alpha(mhs, n, 0, branches.top)?;
    let alpha_top_term = -a * rat(chi_inf, 12);
    let alpha_hodge_term = hodge_weighted_sum(mhs, |p, q| alpha(mhs, p, q, branches.hodge))?;

    let total = &euler_term + &strata_term + &b_term + &chern_term + &alpha_top_term + &alpha_hodge_term;
    let scaled = &total * Rational::from_integer(m * 12);
    if !scaled.is_integer() {
        return Err(Error::Inconsistency {
            what: "rationality certificate 12·lcm(m)·kappa".into(),
            left: format_rational(&scaled),
            right: "an integer".into(),
        });
    }
    Ok(KappaBreakdown {
        euler_term,
        strata_term,
        b_term,
        chern_term,
        alpha_top_term,
        alpha_hodge_term,
        total,
    })
}

/// ϱ_f = χ(X_∞)/12·β^{n,0} − Σ_{p,q} (−1)^{p+q} p·β^{p,q}.
pub fn rho(fiber: &GeneralFiberData, mhs: &LimitingMHS) -> Result<Rational> {
    let n = mhs.fiber_dimension();
    if fiber.n != n {
        return Err(Error::Dimension(format!("fiber n = {}, limiting MHS n = {n}", fiber.n)));
    }
    require_degree_n(mhs)?;
    let top = beta(mhs, n, 0)? * rat(fiber.chi_top, 12);
    Ok(top + hodge_weighted_sum(mhs, |p, q| beta(mhs, p, q))?)
}

/// κ_f = Σ_k (−1)^k k(k−1)/24·χ(D(k)) for semistable Kulikov models.
pub fn kappa_kulikov(model: &SpecialFiberModel) -> Result<Rational> {
    if !(model.is_semistable() && model.is_kulikov()) {
        return Err(Error::NotApplicable("the Kulikov formula needs a semistable Kulikov model".into()));
    }
    Ok((1..=model.n() + 1)
        .map(|k| rat(sign(k) * (k * (k - 1)) as i64 * model.chi(k), 24))
        .sum())
}
