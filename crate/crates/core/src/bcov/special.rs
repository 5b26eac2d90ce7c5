//! Specializations of κ_f: strict Calabi–Yau threefolds and fourfolds with a
//! special fiber that need not have normal crossings, the quadruple point
//! formula for semistable Kulikov threefolds, and Serre duality defects.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactalg::{format_rational, int, rat, Rational};
use crate::lmhs::{alpha, LimitingMHS};
use crate::monodromy::BranchOfLog;
use crate::strata::{chi_special_fiber, vanishing_defect, CyType, GeneralFiberData, SpecialFiberModel};

use super::kappa::kappa_kulikov;
use super::sign;

/// A possibly non normal crossings special fiber, described by what the
/// dimension 3 and 4 formulas consume.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularFiber {
    pub n: usize,
    /// χ(X₀).
    pub chi: i64,
    /// ∫_B c_n(Ω_X); zero for normal special fibers.
    pub b_integral: Rational,
    /// χ(O) of a desingularization of each component.
    pub desing_chi_struct: Vec<i64>,
}

impl SingularFiber {
    /// Reads χ(X₀) and B from a strata model.
    pub fn from_model(model: &SpecialFiberModel, desing_chi_struct: Vec<i64>) -> Result<Self> {
        if desing_chi_struct.len() != model.components().len() {
            return Err(Error::validation(
                "desing_chi_struct",
                format!("expected one value per component ({})", model.components().len()),
            ));
        }
        Ok(SingularFiber {
            n: model.n(),
            chi: chi_special_fiber(model),
            b_integral: model
                .b_integral()
                .cloned()
                .ok_or_else(|| Error::Missing("B_integral (integral of c_n over B)".into()))?,
            desing_chi_struct,
        })
    }

    fn desing_total(&self) -> i64 {
        self.desing_chi_struct.iter().sum()
    }
}

fn require(n: usize, sf: &SingularFiber, fiber: &GeneralFiberData) -> Result<()> {
    if sf.n != n || fiber.n != n {
        return Err(Error::NotApplicable(format!("formula is for n = {n}, got n = {}", sf.n)));
    }
    if !matches!(fiber.cy_type, CyType::Strict | CyType::General) {
        return Err(Error::NotApplicable(format!("formula is for strict Calabi–Yau fibers, got {:?}", fiber.cy_type)));
    }
    if sf.desing_chi_struct.is_empty() {
        return Err(Error::Missing("desing_chi_struct".into()));
    }
    Ok(())
}

fn require_mhs(n: usize, mhs: &LimitingMHS) -> Result<()> {
    if mhs.fiber_dimension() != n {
        return Err(Error::NotApplicable(format!("limiting MHS has n = {}", mhs.fiber_dimension())));
    }
    Ok(())
}

fn a(mhs: &LimitingMHS, p: usize, q: usize) -> Result<Rational> {
    alpha(mhs, p, q, BranchOfLog::Lower)
}

/// Upper-branch α on Gr^n_F H^n.
fn alpha_top(mhs: &LimitingMHS) -> Result<Rational> {
    let n = mhs.fiber_dimension();
    alpha(mhs, n, 0, BranchOfLog::Upper)
}

fn delta_chi(sf: &SingularFiber, fiber: &GeneralFiberData) -> i64 {
    fiber.chi_top - sf.chi
}

/// κ_f for strict Calabi–Yau threefolds:
/// −Δχ/6 − (χ_∞/12 + 3)α + α^{1,1} − α^{1,2} − Σχ(O_{D̃ᵢ}) + ∫_B c₃/12.
pub fn kappa_dim3(sf: &SingularFiber, fiber: &GeneralFiberData, mhs: &LimitingMHS) -> Result<Rational> {
    require(3, sf, fiber)?;
    require_mhs(3, mhs)?;
    Ok(rat(-delta_chi(sf, fiber), 6) - (rat(fiber.chi_top, 12) + int(3)) * alpha_top(mhs)? + a(mhs, 1, 1)?
        - a(mhs, 1, 2)?
        - int(sf.desing_total())
        + &sf.b_integral * rat(1, 12))
}

/// Unipotent monodromy variant: −Δχ/6 + χ(O_{X_∞}) − Σχ(O_{D̃ᵢ}) + ∫_B c₃/12.
pub fn kappa_dim3_unipotent(sf: &SingularFiber, fiber: &GeneralFiberData) -> Result<Rational> {
    require(3, sf, fiber)?;
    let chi_o = fiber
        .chi_o()
        .ok_or_else(|| Error::Missing("chi(O) of the general fiber".into()))?;
    Ok(rat(-delta_chi(sf, fiber), 6) + int(chi_o - sf.desing_total()) + &sf.b_integral * rat(1, 12))
}

/// Rational singularities: −Δχ/6 − α^{1,2}.
pub fn kappa_dim3_rational(chi_inf: i64, chi_special: i64, mhs: &LimitingMHS) -> Result<Rational> {
    require_mhs(3, mhs)?;
    Ok(rat(chi_special - chi_inf, 6) - a(mhs, 1, 2)?)
}

/// Isolated rational singularities: μ_f/6 − α^{1,2}.
pub fn kappa_dim3_isolated(milnor: i64, mhs: &LimitingMHS) -> Result<Rational> {
    require_mhs(3, mhs)?;
    Ok(rat(milnor, 6) - a(mhs, 1, 2)?)
}

/// κ_f for strict Calabi–Yau fourfolds:
/// −Δχ/12 + (4 − χ_∞/12)α + 2α^{1,1} − 2α^{1,2} + 2α^{1,3} + 2(2 − Σχ(O_{D̃ᵢ})) − ∫_B c₄/12.
pub fn kappa_dim4(sf: &SingularFiber, fiber: &GeneralFiberData, mhs: &LimitingMHS) -> Result<Rational> {
    require(4, sf, fiber)?;
    require_mhs(4, mhs)?;
    Ok(rat(-delta_chi(sf, fiber), 12) + (int(4) - rat(fiber.chi_top, 12)) * alpha_top(mhs)?
        + int(2) * (a(mhs, 1, 1)? - a(mhs, 1, 2)? + a(mhs, 1, 3)?)
        + int(2 * (2 - sf.desing_total()))
        - &sf.b_integral * rat(1, 12))
}

/// Rational singularities: −Δχ/12 − 2α^{1,2} + 2α^{1,3}.
pub fn kappa_dim4_rational(chi_inf: i64, chi_special: i64, mhs: &LimitingMHS) -> Result<Rational> {
    require_mhs(4, mhs)?;
    Ok(rat(chi_special - chi_inf, 12) + int(2) * (a(mhs, 1, 3)? - a(mhs, 1, 2)?))
}

/// Isolated rational singularities: −μ_f/12 + 2α^{1,3}.
pub fn kappa_dim4_isolated(milnor: i64, mhs: &LimitingMHS) -> Result<Rational> {
    require_mhs(4, mhs)?;
    Ok(rat(-milnor, 12) + int(2) * a(mhs, 1, 3)?)
}

/// For isolated singularities μ_f is the degree (−1)^n(χ_∞ − χ₀) of the
/// localized top Chern class; a supplied Milnor number must match it.
pub fn check_milnor(milnor: i64, n: usize, chi_inf: i64, chi_special: i64) -> Result<()> {
    let c = sign(n) * (chi_inf - chi_special);
    if c != milnor {
        return Err(Error::Inconsistency {
            what: "Milnor number against the Euler characteristic defect".into(),
            left: milnor.to_string(),
            right: c.to_string(),
        });
    }
    Ok(())
}

/// 12κ_f = χ(D(2)) − 6Q for semistable Kulikov threefolds with χ(D(3)) = 4Q,
/// cross-checked against the Kulikov closed form.
pub fn kappa_liuxia_special(model: &SpecialFiberModel) -> Result<Rational> {
    let q = liuxia_preconditions(model)?;
    let kappa = rat(model.chi(2) - 6 * q, 12);
    let kulikov = kappa_kulikov(model)?;
    if kulikov != kappa {
        return Err(Error::Inconsistency {
            what: "quadruple point formula against the Kulikov formula".into(),
            left: format_rational(&kappa),
            right: format_rational(&kulikov),
        });
    }
    Ok(kappa)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntroFormValue {
    pub value: Rational,
    pub note: String,
}

/// (χ(D(2)) − 4Q)/12, a variant of the quadruple point formula that appears
/// in some statements of the result. It disagrees with the Kulikov formula
/// whenever Q ≠ 0; the returned note says by how much.
pub fn kappa_liuxia_intro_form(model: &SpecialFiberModel) -> Result<IntroFormValue> {
    let q = liuxia_preconditions(model)?;
    let value = rat(model.chi(2) - 4 * q, 12);
    let body = rat(model.chi(2) - 6 * q, 12);
    let gap = &value - &body;
    let note = if gap.is_zero() {
        "agrees with (chi(D(2)) - 6Q)/12 since Q = 0".to_string()
    } else {
        format!(
            "differs from the value (chi(D(2)) - 6Q)/12 = {} implied by the Kulikov formula by {}",
            format_rational(&body),
            format_rational(&gap)
        )
    };
    Ok(IntroFormValue { value, note })
}

fn liuxia_preconditions(model: &SpecialFiberModel) -> Result<i64> {
    if model.n() != 3 || !model.is_semistable() || !model.is_kulikov() {
        return Err(Error::NotApplicable(
            "the quadruple point formula needs a semistable Kulikov threefold model".into(),
        ));
    }
    let q = model.quadruple_count().unwrap_or_else(|| model.chi(4));
    if model.chi(3) != 4 * q {
        return Err(Error::Inconsistency {
            what: "chi(D(3)) against 4Q".into(),
            left: model.chi(3).to_string(),
            right: (4 * q).to_string(),
        });
    }
    Ok(q)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SerreDefect {
    /// c = (−1)^n (χ_∞ − χ₀).
    pub localized_class: Rational,
    /// (−1)^{n+1−p}·c.
    pub coefficient: Rational,
    /// For n = 2m and p = m: the coefficient (−1)^{m+1}c of 2λ(Ω^m).
    pub two_lambda: Option<Rational>,
}

pub fn serre_defect(model: &SpecialFiberModel, fiber: &GeneralFiberData, p: usize) -> Result<SerreDefect> {
    let n = model.n();
    if p > n {
        return Err(Error::validation("p", format!("must lie in 0..={n}")));
    }
    let c = vanishing_defect(model, fiber)?;
    let coefficient = &c * int(sign(n + 1 - p));
    let two_lambda = (n % 2 == 0 && p == n / 2).then(|| &c * int(sign(n / 2 + 1)));
    Ok(SerreDefect {
        localized_class: c,
        coefficient,
        two_lambda,
    })
}
