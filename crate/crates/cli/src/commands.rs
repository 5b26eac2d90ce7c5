//! Thin wrappers over the library for the `monodromy`, `exponents`, `fit`
//! and `torus` subcommands.

use std::collections::BTreeMap;

use bcov_core::exactalg::RotationNumber;
use bcov_core::hodgemetrics::{covolume_report, TorusDescriptor};
use bcov_core::monodromy::{adapt_basis, residue_rotations, BranchOfLog, MonodromyOperator, TwistedFrame, TwistedFrameSection};
use bcov_core::periods::{fit_asymptotics, NormSample};
use serde::{Deserialize, Serialize};

use crate::dto::{from_json, from_matrix, to_matrix, BranchDto, ExponentsInput, MatrixDto, MonodromyInput, Rat, TorusInput};
use crate::error::{CliError, CliResult};

fn rotations(rs: &[RotationNumber]) -> Vec<Rat> {
    rs.iter().map(|r| Rat(r.value().clone())).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclotomicFactor {
    pub order: u64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightReport {
    pub center: i64,
    /// Weight ↦ dim Gr^W, nonzero entries only.
    pub graded: BTreeMap<i64, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonodromyReport {
    pub dimension: usize,
    pub ell: u64,
    pub unipotent: bool,
    pub cyclotomic_factors: Vec<CyclotomicFactor>,
    pub semisimple: MatrixDto,
    pub unipotent_part: MatrixDto,
    pub log_unipotent: MatrixDto,
    /// Branch name ↦ rotation multiset, sorted.
    pub rotations: BTreeMap<&'static str, Vec<Rat>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_filtration: Option<WeightReport>,
}

/// `center` overrides the one in the file. Without any, no weight filtration is reported.
pub fn monodromy(text: &str, branch: Option<BranchDto>, center: Option<i64>) -> CliResult<MonodromyReport> {
    let input: MonodromyInput = if text.trim_start().starts_with('[') {
        MonodromyInput {
            matrix: from_json(text)?,
            center: None,
        }
    } else {
        from_json(text)?
    };
    let op = MonodromyOperator::new(to_matrix(&input.matrix, "matrix")?)?;
    let branches: Vec<(&'static str, BranchOfLog)> = match branch {
        None => vec![("lower", BranchOfLog::Lower), ("upper", BranchOfLog::Upper)],
        Some(BranchDto::Lower) => vec![("lower", BranchOfLog::Lower)],
        Some(BranchDto::Upper) => vec![("upper", BranchOfLog::Upper)],
    };
    let weight_filtration = match center.or(input.center) {
        Some(c) => Some(WeightReport {
            center: c,
            graded: op.weight_filtration(c)?.graded,
        }),
        None => None,
    };
    Ok(MonodromyReport {
        dimension: op.matrix().rows(),
        ell: op.ell(),
        unipotent: op.is_unipotent(),
        cyclotomic_factors: op
            .cyclotomic_factors()
            .iter()
            .map(|&(order, multiplicity)| CyclotomicFactor { order, multiplicity })
            .collect(),
        semisimple: from_matrix(op.semisimple()),
        unipotent_part: from_matrix(op.unipotent()),
        log_unipotent: from_matrix(op.log_unipotent()),
        rotations: branches
            .into_iter()
            .map(|(name, b)| (name, rotations(&residue_rotations(&op, b))))
            .collect(),
        weight_filtration,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdaptedReport {
    pub label: u64,
    pub exponent: Rat,
    pub coefficients: Vec<Vec<Rat>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExponentsReport {
    pub rank: usize,
    pub ell: u64,
    /// Sorted multiset of elementary exponents.
    pub exponents: Vec<Rat>,
    /// Rotations of T_s read off the frame labels.
    pub frame_rotations: Vec<Rat>,
    pub adapted: Vec<AdaptedReport>,
}

pub fn exponents(text: &str) -> CliResult<ExponentsReport> {
    let input: ExponentsInput = from_json(text)?;
    let nilpotent = input.nilpotent.as_ref().map(|m| to_matrix(m, "nilpotent")).transpose()?;
    let frame = TwistedFrame::new(input.ell, input.labels.clone(), nilpotent)?;
    let sections = input
        .sections
        .iter()
        .enumerate()
        .map(|(i, s)| {
            TwistedFrameSection::new(s.iter().map(|f| f.iter().map(|x| x.0.clone()).collect()).collect(), input.truncation)
                .map_err(|e| CliError::from(e).within(&format!("sections[{i}]")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let report = adapt_basis(&sections, &frame)?;
    let mut frame_rotations = frame.rotations();
    frame_rotations.sort();
    Ok(ExponentsReport {
        rank: frame.rank(),
        ell: frame.ell(),
        exponents: rotations(&report.exponents),
        frame_rotations: rotations(&frame_rotations),
        adapted: report
            .adapted
            .iter()
            .map(|a| AdaptedReport {
                label: a.label,
                exponent: Rat(a.exponent.value().clone()),
                coefficients: a.section.coefficients().iter().map(|f| f.iter().map(Rat::from).collect()).collect(),
            })
            .collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitModel {
    /// `value` is log‖·‖² of a Hodge bundle section: coefficients α, β.
    Hodge,
    /// `value` is log τ_BCOV: coefficients κ, ϱ.
    Bcov,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub model: FitModel,
    pub samples: usize,
    /// Coefficient of log|t|², of log log|t|⁻¹, and the constant term.
    pub coefficients: BTreeMap<&'static str, f64>,
    /// Root mean square residual.
    pub residual: f64,
}

#[derive(Deserialize)]
struct Row {
    t: f64,
    value: f64,
}

pub fn fit(text: &str, model: FitModel) -> CliResult<FitReport> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut samples = Vec::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let field = format!("row[{}]", i + 1);
        let row = row.map_err(|e| CliError::validation(&field, e.to_string()))?;
        samples.push(NormSample::new(row.t, row.value).map_err(|e| CliError::from(e).within(&field))?);
    }
    let r = fit_asymptotics(&samples)?;
    let (a, b) = match model {
        FitModel::Hodge => ("alpha", "beta"),
        FitModel::Bcov => ("kappa", "rho"),
    };
    Ok(FitReport {
        model,
        samples: samples.len(),
        coefficients: [(a, r.alpha_hat), (b, r.beta_hat), ("constant", r.const_hat)].into_iter().collect(),
        residual: r.residual,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorusReport {
    pub n: usize,
    pub volume: Rat,
    /// covol² of H^k for k = 0…2n.
    pub covol_sq: Vec<Rat>,
    pub b_squared: Rat,
}

pub fn torus(text: &str) -> CliResult<TorusReport> {
    let input: TorusInput = from_json(text)?;
    let t = TorusDescriptor::new(input.n, to_matrix(&input.j, "J")?, to_matrix(&input.omega, "omega")?)?;
    let report = covolume_report(&t)?;
    Ok(TorusReport {
        n: report.n,
        volume: Rat(t.volume()),
        covol_sq: report.covol_sq.iter().map(Rat::from).collect(),
        b_squared: Rat(report.b_squared),
    })
}
