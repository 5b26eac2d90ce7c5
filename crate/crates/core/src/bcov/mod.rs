//! Asymptotics of the BCOV invariant: κ_f (coefficient of log|t|²) and ϱ_f
//! (coefficient of log log|t|⁻¹), with the specializations and lints built on them.

mod chow;
mod kappa;
mod lints;
mod odp;
mod special;

pub use chow::{chow_pn, ChowClass, ChowSpace};
pub use kappa::{
    kappa_general, kappa_kulikov, mu_bcov, mu_p, rho, BcovAsymptotics, KappaBranches, KappaBreakdown,
};
pub use lints::{lints, odd_node_bound, FamilyContext, Lint, LintInput, SpecializationReport};
pub use odp::{kappa_rho_odp, odp_blowup_model, odp_blowup_numbers, quadric_euler, OdpBlowupNumbers};
pub use special::{
    check_milnor, kappa_dim3, kappa_dim3_isolated, kappa_dim3_rational, kappa_dim3_unipotent, kappa_dim4,
    kappa_dim4_isolated, kappa_dim4_rational, kappa_liuxia_intro_form, kappa_liuxia_special, serre_defect,
    IntroFormValue, SerreDefect, SingularFiber,
};

/// (−1)^e.
pub(crate) fn sign(e: usize) -> i64 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}
