//! Advisory checks on a family: parity of node counts, rationality
//! certificates, lower bounds on node counts and impossible degenerations.

use num_bigint::BigInt;

use crate::exactalg::{rat, Rational};
use crate::strata::CyType;

/// Global information about the family the local data belongs to.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FamilyContext {
    pub base_compact: bool,
    pub primitive: bool,
    pub non_isotrivial: bool,
    /// Every singular fiber has only ordinary double points.
    pub odp_only: bool,
    /// Total number of nodes over the base, when known.
    pub total_nodes: Option<u64>,
}

/// Data the lints read. Everything is optional; lints without their inputs are skipped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LintInput {
    pub n: usize,
    pub chi_inf: Option<i64>,
    pub cy_type: CyType,
    pub kappa: Option<Rational>,
    /// lcm of the component multiplicities.
    pub multiplicity_lcm: u64,
    pub unipotent: bool,
    pub context: FamilyContext,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lint {
    /// Even relative dimension over a compact base forces an even node count.
    NodeParity { total_nodes: u64, violated: bool },
    /// 12·M·κ ∈ ℤ, with the integer.
    Rationality { factor: BigInt, value: Option<BigInt> },
    /// Lower bound on the total node count; `satisfied` is `None` when the count is unknown.
    NodeBound { bound: i64, satisfied: Option<bool> },
    /// Abelian (dim ≥ 2) or hyperkähler (dim ≥ 4) fibers cannot acquire only nodes.
    ImpossibleDegeneration { cy_type: CyType },
}

impl Lint {
    pub fn is_violation(&self) -> bool {
        match self {
            Lint::NodeParity { violated, .. } => *violated,
            Lint::Rationality { value, .. } => value.is_none(),
            Lint::NodeBound { satisfied, .. } => *satisfied == Some(false),
            Lint::ImpossibleDegeneration { .. } => true,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Lint::NodeParity { .. } => "node_parity",
            Lint::Rationality { .. } => "rationality",
            Lint::NodeBound { .. } => "node_bound",
            Lint::ImpossibleDegeneration { .. } => "impossible_degeneration",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpecializationReport {
    /// Formulas that could be evaluated, with their values.
    pub values: Vec<(String, Rational)>,
    pub lints: Vec<Lint>,
}

impl SpecializationReport {
    pub fn violations(&self) -> impl Iterator<Item = &Lint> {
        self.lints.iter().filter(|l| l.is_violation())
    }
}

fn integer_multiple(x: &Rational, factor: &BigInt) -> Option<BigInt> {
    let y = x * Rational::from_integer(factor.clone());
    y.is_integer().then(|| y.to_integer())
}

/// ⌈a/b⌉ for b > 0.
fn ceil_div(a: i64, b: i64) -> i64 {
    -(-a).div_euclid(b)
}

pub fn lints(input: &LintInput) -> Vec<Lint> {
    let n = input.n;
    let ctx = &input.context;
    let mut out = Vec::new();

    if n % 2 == 0 && ctx.base_compact && ctx.odp_only {
        if let Some(total) = ctx.total_nodes {
            out.push(Lint::NodeParity {
                total_nodes: total,
                violated: total % 2 == 1,
            });
        }
    }

    if let Some(kappa) = &input.kappa {
        let factor = BigInt::from(12u64 * input.multiplicity_lcm);
        out.push(Lint::Rationality {
            value: integer_multiple(kappa, &factor),
            factor,
        });
        if input.unipotent {
            let twelve = BigInt::from(12);
            out.push(Lint::Rationality {
                value: integer_multiple(kappa, &twelve),
                factor: twelve,
            });
        }
    }

    if let Some(chi) = input.chi_inf {
        let global = ctx.base_compact && ctx.primitive && ctx.non_isotrivial && ctx.odp_only;
        let bound = if !global {
            None
        } else if n % 2 == 1 && chi > -24 {
            Some(ceil_div(48 + 2 * chi, n as i64 + 1))
        } else if n % 2 == 0 && n >= 4 && chi < 24 {
            let b = ceil_div(48 - 2 * chi, n as i64 - 2);
            Some(b + b.rem_euclid(2))
        } else {
            None
        };
        if let Some(bound) = bound {
            out.push(Lint::NodeBound {
                bound,
                satisfied: ctx.total_nodes.map(|t| t as i64 >= bound),
            });
        }
    }

    let impossible = match input.cy_type {
        CyType::Abelian => n >= 2,
        CyType::HyperKahler => n >= 4,
        _ => false,
    };
    if impossible && ctx.odp_only && ctx.total_nodes.is_some_and(|t| t > 0) {
        out.push(Lint::ImpossibleDegeneration { cy_type: input.cy_type });
    }
    out
}

/// (48 + 2χ)/(n+1) as an exact rational, the odd-dimensional bound before rounding.
pub fn odd_node_bound(n: usize, chi: i64) -> Rational {
    rat(48 + 2 * chi, n as i64 + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::int;

    fn input(n: usize, chi: i64, nodes: u64) -> LintInput {
        LintInput {
            n,
            chi_inf: Some(chi),
            cy_type: CyType::Strict,
            kappa: None,
            multiplicity_lcm: 1,
            unipotent: true,
            context: FamilyContext {
                base_compact: true,
                primitive: true,
                non_isotrivial: true,
                odp_only: true,
                total_nodes: Some(nodes),
            },
        }
    }

    #[test]
    fn parity() {
        let l = lints(&input(4, 30, 3));
        assert!(l.contains(&Lint::NodeParity {
            total_nodes: 3,
            violated: true
        }));
        assert!(!lints(&input(4, 30, 4)).iter().any(Lint::is_violation));
    }

    #[test]
    fn fang_lu_bounds() {
        assert!(lints(&input(3, -200, 1)).iter().all(|l| !matches!(l, Lint::NodeBound { .. })));
        let l = lints(&input(3, -20, 1));
        assert!(l.contains(&Lint::NodeBound {
            bound: 2,
            satisfied: Some(false)
        }));
        assert_eq!(odd_node_bound(3, -20), int(2));
        // (48 − 2·10)/2 = 14, already even
        assert!(lints(&input(4, 10, 14)).contains(&Lint::NodeBound {
            bound: 14,
            satisfied: Some(true)
        }));
        // (48 − 2·11)/4 = 6.5 → 8
        assert!(lints(&input(6, 11, 8)).contains(&Lint::NodeBound {
            bound: 8,
            satisfied: Some(true)
        }));
    }

    #[test]
    fn rationality_certificates() {
        let mut i = input(3, -200, 1);
        i.kappa = Some(rat(1, 6));
        let l = lints(&i);
        assert!(l.contains(&Lint::Rationality {
            factor: BigInt::from(12),
            value: Some(BigInt::from(2))
        }));
        i.kappa = Some(rat(1, 48));
        assert!(lints(&i).iter().any(Lint::is_violation));
    }

    #[test]
    fn abelian_and_hyperkahler() {
        let mut i = input(2, 0, 1);
        i.cy_type = CyType::Abelian;
        assert!(lints(&i).iter().any(|l| matches!(l, Lint::ImpossibleDegeneration { .. })));
        let mut i = input(2, 24, 2);
        i.cy_type = CyType::HyperKahler;
        assert!(!lints(&i).iter().any(|l| matches!(l, Lint::ImpossibleDegeneration { .. })));
    }
}
