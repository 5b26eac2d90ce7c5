//! Ordinary double points: the closed forms for (κ, ϱ), and the normal
//! crossings model obtained by blowing up the nodes, on which the general
//! formula can be evaluated.
//!
//! After blowing up s nodes the special fiber is Z + 2E, where Z is the strict
//! transform, E is s disjoint copies of P^n and W = Z ∩ E is s smooth quadrics.

use crate::error::{Error, Result};
use crate::exactalg::{int, rat, Rational};
use crate::lmhs::{preset, LimitingMHS, Preset};
use crate::strata::{Component, GeneralFiberData, SpecialFiberInput, SpecialFiberModel, StratumRecord};

use super::kappa::BcovAsymptotics;
use super::sign;

/// κ = (n+1)s/24, ϱ = s for n odd; κ = −(n−2)s/24, ϱ = 0 for n even.
pub fn kappa_rho_odp(n: usize, nodes: u64) -> Result<BcovAsymptotics> {
    if n < 2 {
        return Err(Error::validation("n", "the node formula needs n ≥ 2"));
    }
    if nodes == 0 {
        return Err(Error::validation("nodes", "at least one node is required"));
    }
    let (n, s) = (n as i64, nodes as i64);
    Ok(if n % 2 == 1 {
        BcovAsymptotics {
            kappa: rat((n + 1) * s, 24),
            rho: int(s),
        }
    } else {
        BcovAsymptotics {
            kappa: rat(-(n - 2) * s, 24),
            rho: int(0),
        }
    })
}

/// χ of a smooth quadric in P^n.
pub fn quadric_euler(n: usize) -> i64 {
    n as i64 + (1 - sign(n)) / 2
}

/// Numerical data of the blow-up model, totals over all nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OdpBlowupNumbers {
    pub chi_z: i64,
    pub chi_e: i64,
    pub chi_w: i64,
    /// ∫_Z c₁c_{n−1}(Ω_Z).
    pub c1c_z: Rational,
    /// ∫_E c₁c_{n−1}(Ω_E).
    pub c1c_e: Rational,
    /// ∫_W c₁c_{n−2}(Ω_W).
    pub c1c_w: Rational,
    /// ∫_{nE} c_n(Ω_X̃).
    pub b_integral: Rational,
}

pub fn odp_blowup_numbers(n: usize, nodes: u64, chi_inf: i64) -> OdpBlowupNumbers {
    let s = nodes as i64;
    let ni = n as i64;
    let chi_q = quadric_euler(n);
    let chi_e = s * (ni + 1);
    let chi_w = s * chi_q;
    // χ(X̃_∞) = 2χ(E) + χ(Z) − 3χ(W)
    let chi_z = chi_inf - 2 * chi_e + 3 * chi_w;
    // c(Ω_E) = (1−h)^{n+1}
    let c1c_e = rat(sign(n) * ni * (ni + 1) * (ni + 1) * s, 2);
    // ∫_W c₁(O(1))c_{n−2}(Ω_W) for a quadric, and K_W = O(1−n)
    let hyperplane = rat(sign(n - 1) * chi_q + sign(n) * ni * (ni + 1), 2);
    let c1c_w = hyperplane * int(-(ni - 1) * s);
    let c1c_z = rat(
        (sign(n - 1) * 3 * (ni - 2) * chi_q + sign(n) * (ni - 2) * ni * (ni + 1)) * s,
        2,
    );
    // conormal sequence of E ⊂ X̃: c(Ω_X̃|_E) = (1+h)(1−h)^{n+1}
    let b_integral = rat(sign(n) * s * ni * (ni + 1) * (2 - ni), 2);
    OdpBlowupNumbers {
        chi_z,
        chi_e,
        chi_w,
        c1c_z,
        c1c_e,
        c1c_w,
        b_integral,
    }
}

/// Normal crossings model of the blow-up together with the node preset LMHS.
pub fn odp_blowup_model(n: usize, nodes: u64, fiber: &GeneralFiberData) -> Result<(SpecialFiberModel, LimitingMHS)> {
    if n < 2 || nodes == 0 {
        return Err(Error::validation("odp_blowup", "needs n ≥ 2 and at least one node"));
    }
    if fiber.n != n {
        return Err(Error::Dimension(format!("fiber n = {}, model n = {n}", fiber.n)));
    }
    let num = odp_blowup_numbers(n, nodes, fiber.chi_top);
    let mut components = vec![Component::new("Z", 1)];
    components.extend((1..=nodes).map(|i| Component::new(format!("E{i}"), 2)));
    let model = SpecialFiberModel::new(SpecialFiberInput {
        n,
        components,
        strata: vec![
            StratumRecord::new(1, num.chi_z + num.chi_e).with_chern(&num.c1c_z + &num.c1c_e),
            StratumRecord::new(2, num.chi_w).with_chern(num.c1c_w.clone()),
        ],
        b_integral: Some(num.b_integral),
        quadruple_count: None,
        semistable: false,
        kulikov: false,
    })?;
    let mhs = preset(&Preset::Odp {
        n,
        count: nodes,
        hodge: None,
    })?;
    Ok((model, mhs))
}
