//! The `analyze` pipeline: descriptor → models → every applicable κ formula,
//! cross-checked against the general one.

use std::collections::BTreeMap;
use std::path::Path;

use bcov_core::bcov::{
    check_milnor, kappa_dim3, kappa_dim3_isolated, kappa_dim3_rational, kappa_dim3_unipotent, kappa_dim4,
    kappa_dim4_isolated, kappa_dim4_rational, kappa_general, kappa_kulikov, kappa_liuxia_intro_form,
    kappa_liuxia_special, kappa_rho_odp, lints, odp_blowup_model, rho, FamilyContext, KappaBranches, Lint, LintInput,
    SingularFiber,
};
use bcov_core::exactalg::{format_rational, Rational, RotationNumber};
use bcov_core::lmhs::{preset, DegreeData, HodgeDeligneTable, LimitingMHS, Preset};
use bcov_core::strata::{
    chi_generic_semistable, chi_special_fiber, Component, CyType, GeneralFiberData, SpecialFiberInput,
    SpecialFiberModel, StratumRecord,
};
use serde::Serialize;

use crate::dto::{
    from_json, BranchesDto, CyTypeDto, DegreeDto, Descriptor, FiberDto, MhsDto, PresetDto, PresetFile, Rat,
    SingularFiberDto, SpecialFiberDto, VERSION,
};
use crate::error::{exit, CliError, CliResult};

/// Names accepted in `options.specializations`, in evaluation order.
pub const SPECIALIZATIONS: [&str; 7] = [
    "kulikov",
    "quadruple_points",
    "odp",
    "isolated",
    "singular_fiber",
    "singular_fiber_unipotent",
    "rational_singularities",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub version: &'static str,
    pub n: usize,
    pub branches: BranchesDto,
    pub kappa: Rat,
    pub rho: Rat,
    pub kappa_breakdown: KappaTerms,
    pub chi: ChiReport,
    pub monodromy: MonodromySummary,
    pub specializations: Vec<SpecializationValue>,
    pub unavailable: Vec<Unavailable>,
    pub lints: Vec<LintReport>,
    pub cross_checks: Vec<CrossCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// The terms of the general formula; they sum to `kappa`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KappaTerms {
    pub euler: Rat,
    pub strata: Rat,
    pub b_integral: Rat,
    pub chern: Rat,
    pub alpha_top: Rat,
    pub alpha_hodge: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChiReport {
    pub general_fiber: i64,
    pub special_fiber: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonodromySummary {
    pub unipotent: bool,
    /// Order of T_s, read off the rotation denominators.
    pub semisimple_order: String,
    pub multiplicity_lcm: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecializationValue {
    pub name: &'static str,
    pub kappa: Rat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Unavailable {
    pub name: &'static str,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LintReport {
    pub name: &'static str,
    pub violated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_nodes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub satisfied: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cy_type: Option<CyTypeDto>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub name: String,
    pub pass: bool,
    pub left: String,
    pub right: String,
}

impl AnalysisReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &CrossCheck> {
        self.cross_checks.iter().filter(|c| !c.pass)
    }

    pub fn violated_lints(&self) -> impl Iterator<Item = &LintReport> {
        self.lints.iter().filter(|l| l.violated)
    }

    /// The error a finished analysis still has to report, if any: failed
    /// cross-checks first, then (under `strict`) lint violations.
    pub fn verdict(&self, strict: bool) -> Option<CliError> {
        if let Some(c) = self.failed_checks().next() {
            return Some(CliError::Inconsistency {
                what: c.name.clone(),
                left: c.left.clone(),
                right: c.right.clone(),
            });
        }
        if strict {
            let names: Vec<&str> = self.violated_lints().map(|l| l.name).collect();
            if !names.is_empty() {
                return Some(CliError::validation("lints", format!("violated under --strict: {}", names.join(", "))));
            }
        }
        None
    }

    pub fn exit_code(&self, strict: bool) -> i32 {
        self.verdict(strict).map_or(exit::OK, |e| e.exit_code())
    }
}

pub fn analyze_text(text: &str, presets_dir: &Path) -> CliResult<AnalysisReport> {
    let desc: Descriptor = from_json(text)?;
    analyze(&desc, presets_dir)
}

/// Everything the specializations read.
struct Inputs<'a> {
    n: usize,
    model: &'a SpecialFiberModel,
    fiber: &'a GeneralFiberData,
    mhs: &'a LimitingMHS,
    odp_nodes: Option<u64>,
    singular: Option<&'a SingularFiberDto>,
}

pub fn analyze(desc: &Descriptor, presets_dir: &Path) -> CliResult<AnalysisReport> {
    if desc.version != VERSION {
        return Err(CliError::validation(
            "version",
            format!("unsupported descriptor version {:?}, expected {VERSION:?}", desc.version),
        ));
    }
    let n = desc.fiber.n;
    if n == 0 {
        return Err(CliError::validation("fiber.n", "must be positive"));
    }
    let mut cross_checks = Vec::new();

    let (model, odp_mhs, odp_nodes) = match (&desc.special_fiber, &desc.odp_blowup) {
        (Some(sf), None) => (special_fiber_model(n, sf).map_err(|e| e.within("special_fiber"))?, None, None),
        (None, Some(odp)) => {
            let chi = desc
                .fiber
                .chi_top
                .ok_or_else(|| CliError::validation("fiber.chi_top", "required for an odp_blowup descriptor"))?;
            let fiber = general_fiber(&desc.fiber, chi);
            let (model, mhs) = odp_blowup_model(n, odp.nodes, &fiber).map_err(|e| CliError::from(e).within("odp_blowup"))?;
            (model, Some(mhs), Some(odp.nodes))
        }
        _ => {
            return Err(CliError::validation(
                "$",
                "exactly one of special_fiber and odp_blowup is required",
            ))
        }
    };

    let chi_inf = match (desc.fiber.chi_top, model.is_semistable()) {
        (Some(chi), true) => {
            let derived = chi_generic_semistable(&model)?;
            cross_checks.push(check("fiber.chi_top vs semistable strata", &chi.to_string(), &derived.to_string()));
            chi
        }
        (Some(chi), false) => chi,
        (None, true) => chi_generic_semistable(&model)?,
        (None, false) => {
            return Err(CliError::validation("fiber.chi_top", "required unless the model is semistable"));
        }
    };
    let fiber = general_fiber(&desc.fiber, chi_inf);
    fiber.validate()?;

    let mhs = match (&desc.mhs, odp_mhs) {
        (Some(m), _) => resolve_mhs(m, n, presets_dir).map_err(|e| e.within("mhs"))?,
        (None, Some(m)) => m,
        (None, None) => return Err(CliError::validation("mhs", "missing")),
    };

    let branches = desc
        .options
        .as_ref()
        .and_then(|o| o.branches.clone())
        .unwrap_or(BranchesDto::STANDARD);
    let breakdown = kappa_general(
        &model,
        &fiber,
        &mhs,
        KappaBranches {
            top: branches.top.into(),
            hodge: branches.hodge.into(),
        },
    )?;
    let rho_value = rho(&fiber, &mhs)?;
    let kappa = breakdown.total.clone();

    let requested = requested_specializations(desc)?;
    let inputs = Inputs {
        n,
        model: &model,
        fiber: &fiber,
        mhs: &mhs,
        odp_nodes,
        singular: desc.singular_fiber.as_ref(),
    };
    let mut specializations = Vec::new();
    let mut unavailable = Vec::new();
    let mut notes = Vec::new();
    for name in SPECIALIZATIONS {
        if requested.as_ref().is_some_and(|r| !r.contains(&name)) {
            continue;
        }
        match evaluate(name, &inputs, &mut notes)? {
            Ok((k, r)) => {
                cross_checks.push(check(
                    &format!("kappa_general vs {name}"),
                    &format_rational(&kappa),
                    &format_rational(&k),
                ));
                if let Some(r) = &r {
                    cross_checks.push(check(
                        &format!("rho vs {name}"),
                        &format_rational(&rho_value),
                        &format_rational(r),
                    ));
                }
                specializations.push(SpecializationValue {
                    name,
                    kappa: Rat(k),
                    rho: r.map(Rat),
                });
            }
            Err(reason) => unavailable.push(Unavailable { name, reason }),
        }
    }

    let family = desc.family.clone().unwrap_or_default();
    let lint_input = LintInput {
        n,
        chi_inf: Some(chi_inf),
        cy_type: fiber.cy_type,
        kappa: Some(kappa.clone()),
        multiplicity_lcm: model.multiplicity_lcm(),
        unipotent: mhs.is_unipotent(),
        context: FamilyContext {
            base_compact: family.base_compact,
            primitive: family.primitive,
            non_isotrivial: family.non_isotrivial,
            odp_only: family.odp_only.unwrap_or(odp_nodes.is_some()),
            total_nodes: family.total_nodes,
        },
    };

    Ok(AnalysisReport {
        version: VERSION,
        n,
        branches,
        kappa: Rat(kappa),
        rho: Rat(rho_value),
        kappa_breakdown: KappaTerms {
            euler: Rat::from(&breakdown.euler_term),
            strata: Rat::from(&breakdown.strata_term),
            b_integral: Rat::from(&breakdown.b_term),
            chern: Rat::from(&breakdown.chern_term),
            alpha_top: Rat::from(&breakdown.alpha_top_term),
            alpha_hodge: Rat::from(&breakdown.alpha_hodge_term),
        },
        chi: ChiReport {
            general_fiber: chi_inf,
            special_fiber: chi_special_fiber(&model),
        },
        monodromy: MonodromySummary {
            unipotent: mhs.is_unipotent(),
            semisimple_order: mhs.common_denominator().to_string(),
            multiplicity_lcm: model.multiplicity_lcm(),
        },
        specializations,
        unavailable,
        lints: lints(&lint_input).iter().map(lint_report).collect(),
        cross_checks,
        notes,
    })
}

fn check(name: &str, left: &str, right: &str) -> CrossCheck {
    CrossCheck {
        name: name.to_string(),
        pass: left == right,
        left: left.to_string(),
        right: right.to_string(),
    }
}

fn general_fiber(dto: &FiberDto, chi_top: i64) -> GeneralFiberData {
    let mut fiber = GeneralFiberData::new(dto.n, chi_top);
    fiber.chi_struct = dto.chi_struct;
    fiber.hodge_chis = dto.hodge_chis.clone();
    fiber.betti = dto.betti.clone();
    fiber.cy_type = dto.cy_type.map_or(CyType::General, Into::into);
    fiber
}

fn special_fiber_model(n: usize, sf: &SpecialFiberDto) -> CliResult<SpecialFiberModel> {
    let strata = sf
        .strata
        .iter()
        .map(|s| StratumRecord {
            codim: s.codim,
            chi_top: s.chi_top,
            chi_struct: s.chi_struct,
            hodge_chis: s.hodge_chis.clone(),
            chern_c1cd: s.chern_c1cd.as_ref().map(|c| c.0.clone()),
        })
        .collect();
    Ok(SpecialFiberModel::new(SpecialFiberInput {
        n,
        components: sf.components.iter().map(|c| Component::new(&c.name, c.multiplicity)).collect(),
        strata,
        b_integral: sf.b_integral.as_ref().map(|b| b.0.clone()),
        quadruple_count: sf.quadruple_count,
        semistable: sf.semistable,
        kulikov: sf.kulikov,
    })?)
}

/// Loads the limiting MHS from whichever source the descriptor names.
pub fn resolve_mhs(dto: &MhsDto, n: usize, presets_dir: &Path) -> CliResult<LimitingMHS> {
    let sources = [dto.preset.is_some(), dto.preset_file.is_some(), dto.degrees.is_some()];
    if sources.iter().filter(|&&s| s).count() != 1 {
        return Err(CliError::validation("", "exactly one of preset, preset_file and degrees is required"));
    }
    if let Some(p) = &dto.preset {
        let which = match p {
            PresetDto::Trivial => return Ok(LimitingMHS::pure_trivial(n)),
            PresetDto::NodalElliptic if n != 1 => {
                return Err(CliError::validation("preset", format!("nodal_elliptic needs n = 1, got {n}")));
            }
            PresetDto::NodalElliptic => Preset::NodalElliptic,
            PresetDto::Odp { count, hodge } => Preset::Odp {
                n,
                count: *count,
                hodge: hodge.clone(),
            },
            PresetDto::Pure { k, .. } if *k != n => {
                return Err(CliError::validation("preset.pure.k", format!("must equal the fiber dimension {n}")));
            }
            PresetDto::Pure { k, hodge } => Preset::Pure {
                k: *k,
                hodge: hodge.clone(),
            },
        };
        return preset(&which).map_err(|e| CliError::from(e).within("preset"));
    }
    if let Some(name) = &dto.preset_file {
        return load_preset_file(name, n, presets_dir).map_err(|e| e.within("preset_file"));
    }
    build_mhs(n, dto.degrees.as_deref().unwrap_or_default()).map_err(|e| e.within("degrees"))
}

fn load_preset_file(name: &str, n: usize, presets_dir: &Path) -> CliResult<LimitingMHS> {
    if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
        return Err(CliError::validation("", format!("{name:?} is not a preset name")));
    }
    let path = presets_dir.join(format!("{name}.json"));
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::validation("", format!("preset {name:?} not found at {}: {e}", path.display())))?;
    let file: PresetFile = from_json(&text).map_err(|e| e.within(name))?;
    if file.version != VERSION {
        return Err(CliError::validation(format!("{name}.version"), format!("expected {VERSION:?}")));
    }
    if file.n != n {
        return Err(CliError::validation(
            format!("{name}.n"),
            format!("preset is for n = {}, descriptor has n = {n}", file.n),
        ));
    }
    build_mhs(n, &file.degrees).map_err(|e| e.within(&format!("{name}.degrees")))
}

pub fn build_mhs(n: usize, degrees: &[DegreeDto]) -> CliResult<LimitingMHS> {
    let mut map = BTreeMap::new();
    for (i, d) in degrees.iter().enumerate() {
        let data = degree_data(n, d).map_err(|e| e.within(&format!("[{i}]")))?;
        if map.insert(d.k, data).is_some() {
            return Err(CliError::validation(format!("[{i}].k"), format!("degree {} given twice", d.k)));
        }
    }
    Ok(LimitingMHS::new(n, map)?)
}

fn degree_data(n: usize, d: &DegreeDto) -> CliResult<DegreeData> {
    let Some(rows) = &d.table else {
        if !d.rotations.is_empty() {
            return Err(CliError::validation("rotations", "a degree without a table has trivial monodromy"));
        }
        return Ok(DegreeData::PureTrivial);
    };
    let entries: Vec<(usize, usize, u64)> = rows.iter().map(|[p, w, dim]| (*p as usize, *w as usize, *dim)).collect();
    let table = HodgeDeligneTable::new(d.k, n, entries).map_err(|e| CliError::from(e).within("table"))?;
    let mut rotations = BTreeMap::new();
    for (&p, rots) in &d.rotations {
        let parsed = rots
            .iter()
            .enumerate()
            .map(|(j, r)| RotationNumber::new(r.0.clone()).map_err(|e| CliError::from(e).within(&format!("rotations.{p}[{j}]"))))
            .collect::<CliResult<Vec<_>>>()?;
        rotations.insert(p, parsed);
    }
    Ok(DegreeData::explicit(table, rotations)?)
}

fn requested_specializations(desc: &Descriptor) -> CliResult<Option<Vec<&'static str>>> {
    let Some(list) = desc.options.as_ref().and_then(|o| o.specializations.as_ref()) else {
        return Ok(None);
    };
    list.iter()
        .enumerate()
        .map(|(i, s)| {
            SPECIALIZATIONS.iter().copied().find(|k| k == s).ok_or_else(|| {
                CliError::validation(
                    format!("options.specializations[{i}]"),
                    format!("unknown specialization {s:?}; known: {}", SPECIALIZATIONS.join(", ")),
                )
            })
        })
        .collect::<CliResult<Vec<_>>>()
        .map(Some)
}

type Evaluated = (Rational, Option<Rational>);

/// Inconsistencies are fatal; anything else just makes the formula unavailable.
fn soft<T>(r: bcov_core::Result<T>) -> CliResult<Result<T, String>> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(e @ bcov_core::Error::Inconsistency { .. }) => Err(e.into()),
        Err(e) => Ok(Err(e.to_string())),
    }
}

fn unavailable<T>(reason: &str) -> CliResult<Result<T, String>> {
    Ok(Err(reason.to_string()))
}

fn evaluate(name: &str, inp: &Inputs, notes: &mut Vec<String>) -> CliResult<Result<Evaluated, String>> {
    let model = inp.model;
    let kulikov = model.is_semistable() && model.is_kulikov();
    let dim34 = inp.n == 3 || inp.n == 4;
    match name {
        "kulikov" => {
            if !kulikov {
                return unavailable("needs a semistable Kulikov model");
            }
            Ok(soft(kappa_kulikov(model))?.map(|k| (k, None)))
        }
        "quadruple_points" => {
            if !(kulikov && inp.n == 3 && model.quadruple_count().is_some()) {
                return unavailable("needs a semistable Kulikov threefold model with quadruple_count");
            }
            let value = soft(kappa_liuxia_special(model))?;
            if let Ok(intro) = kappa_liuxia_intro_form(model) {
                notes.push(format!(
                    "(chi(D(2)) - 4Q)/12 = {}: {}",
                    format_rational(&intro.value),
                    intro.note
                ));
            }
            Ok(value.map(|k| (k, None)))
        }
        "odp" => match inp.odp_nodes {
            None => unavailable("needs an odp_blowup descriptor"),
            Some(s) => Ok(soft(kappa_rho_odp(inp.n, s))?.map(|a| (a.kappa, Some(a.rho)))),
        },
        "isolated" => {
            if !dim34 {
                return unavailable("needs n = 3 or n = 4");
            }
            let milnor = match (inp.singular, inp.odp_nodes) {
                (Some(sf), _) if sf.milnor.is_some() => {
                    if !sf.rational_singularities {
                        return unavailable("needs singular_fiber.rational_singularities");
                    }
                    let m = sf.milnor.unwrap();
                    check_milnor(m, inp.n, inp.fiber.chi_top, sf.chi)?;
                    m
                }
                (_, Some(s)) => s as i64,
                _ => return unavailable("needs singular_fiber.milnor or an odp_blowup descriptor"),
            };
            let value = if inp.n == 3 {
                kappa_dim3_isolated(milnor, inp.mhs)
            } else {
                kappa_dim4_isolated(milnor, inp.mhs)
            };
            Ok(soft(value)?.map(|k| (k, None)))
        }
        "singular_fiber" | "singular_fiber_unipotent" => {
            if !dim34 {
                return unavailable("needs n = 3 or n = 4");
            }
            let sf = match singular_fiber(inp) {
                Ok(sf) => sf,
                Err(reason) => return Ok(Err(reason)),
            };
            let value = match (name, inp.n) {
                ("singular_fiber", 3) => kappa_dim3(&sf, inp.fiber, inp.mhs),
                ("singular_fiber", _) => kappa_dim4(&sf, inp.fiber, inp.mhs),
                (_, 3) if inp.mhs.is_unipotent() => kappa_dim3_unipotent(&sf, inp.fiber),
                (_, 3) => return unavailable("needs unipotent monodromy"),
                _ => return unavailable("needs n = 3"),
            };
            Ok(soft(value)?.map(|k| (k, None)))
        }
        "rational_singularities" => {
            let Some(sf) = inp.singular.filter(|sf| sf.rational_singularities) else {
                return unavailable("needs singular_fiber with rational_singularities");
            };
            let value = match inp.n {
                3 => kappa_dim3_rational(inp.fiber.chi_top, sf.chi, inp.mhs),
                4 => kappa_dim4_rational(inp.fiber.chi_top, sf.chi, inp.mhs),
                _ => return unavailable("needs n = 3 or n = 4"),
            };
            Ok(soft(value)?.map(|k| (k, None)))
        }
        _ => unreachable!("names come from SPECIALIZATIONS"),
    }
}

fn singular_fiber(inp: &Inputs) -> Result<SingularFiber, String> {
    let sf = inp.singular.ok_or("needs singular_fiber")?;
    let desing = sf.desing_chi_struct.clone().ok_or("needs singular_fiber.desing_chi_struct")?;
    let b = sf.b_integral.clone().ok_or("needs singular_fiber.b_integral")?;
    Ok(SingularFiber {
        n: inp.n,
        chi: sf.chi,
        b_integral: b.0,
        desing_chi_struct: desing,
    })
}

fn lint_report(lint: &Lint) -> LintReport {
    let mut r = LintReport {
        name: lint.name(),
        violated: lint.is_violation(),
        total_nodes: None,
        factor: None,
        value: None,
        bound: None,
        satisfied: None,
        cy_type: None,
    };
    match lint {
        Lint::NodeParity { total_nodes, .. } => r.total_nodes = Some(*total_nodes),
        Lint::Rationality { factor, value } => {
            r.factor = Some(factor.to_string());
            r.value = value.as_ref().map(ToString::to_string);
        }
        Lint::NodeBound { bound, satisfied } => {
            r.bound = Some(*bound);
            r.satisfied = *satisfied;
        }
        Lint::ImpossibleDegeneration { cy_type } => {
            r.cy_type = Some(match cy_type {
                CyType::Strict => CyTypeDto::Strict,
                CyType::Abelian => CyTypeDto::Abelian,
                CyType::HyperKahler => CyTypeDto::Hyperkahler,
                CyType::General => CyTypeDto::General,
            })
        }
    }
    r
}
