//! JSON input types. Exact numbers travel as `"p/q"` strings; bare JSON
//! integers are accepted on input and written back as strings.

use std::collections::BTreeMap;
use std::fmt;

use bcov_core::exactalg::{format_rational, int, parse_rational, Rational, RationalMatrix};
use serde::de::{self, DeserializeOwned, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CliError, CliResult};

/// The only descriptor version this build reads.
pub const VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rat(pub Rational);

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Rat;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational as a \"p/q\" string or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rat, E> {
                parse_rational(v).map(Rat).map_err(|_| E::custom(format!("cannot parse {v:?} as a rational")))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rat, E> {
                Ok(Rat(int(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rat, E> {
                Ok(Rat(Rational::from_integer(v.into())))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rat, E> {
                Err(E::custom(format!("floating point value {v} where an exact rational is required")))
            }
        }
        d.deserialize_any(V)
    }
}

impl From<&Rational> for Rat {
    fn from(r: &Rational) -> Self {
        Rat(r.clone())
    }
}

/// A rational matrix as a list of rows.
pub type MatrixDto = Vec<Vec<Rat>>;

pub fn to_matrix(rows: &MatrixDto, field: &str) -> CliResult<RationalMatrix> {
    if rows.is_empty() {
        return Err(CliError::validation(field, "matrix is empty"));
    }
    let width = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != width) {
        return Err(CliError::validation(format!("{field}[{i}]"), format!("expected {width} entries")));
    }
    RationalMatrix::from_rows(rows.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect())
        .map_err(|e| CliError::from(e).within(field))
}

pub fn from_matrix(m: &RationalMatrix) -> MatrixDto {
    m.to_rows().iter().map(|r| r.iter().map(Rat::from).collect()).collect()
}

/// Parses JSON, reporting schema violations with the path of the offending field.
pub fn from_json<T: DeserializeOwned>(text: &str) -> CliResult<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let path = if path == "." { "$".to_string() } else { path };
        CliError::validation(path, inner.to_string())
    })?;
    de.end().map_err(|e| CliError::validation("$", e.to_string()))?;
    Ok(value)
}

/// Pretty JSON with a trailing newline. Field order follows the type definitions.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Descriptor {
    pub version: String,
    pub fiber: FiberDto,
    /// A normal crossings model given by its strata.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub special_fiber: Option<SpecialFiberDto>,
    /// Alternatively, the blow-up model of a fiber with ordinary double points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub odp_blowup: Option<OdpBlowupDto>,
    /// Required unless `odp_blowup` is given, which brings its own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mhs: Option<MhsDto>,
    /// The singular fiber itself, for the dimension 3 and 4 formulas.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub singular_fiber: Option<SingularFiberDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<OptionsDto>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CyTypeDto {
    Strict,
    Abelian,
    Hyperkahler,
    General,
}

impl From<CyTypeDto> for bcov_core::strata::CyType {
    fn from(c: CyTypeDto) -> Self {
        use bcov_core::strata::CyType;
        match c {
            CyTypeDto::Strict => CyType::Strict,
            CyTypeDto::Abelian => CyType::Abelian,
            CyTypeDto::Hyperkahler => CyType::HyperKahler,
            CyTypeDto::General => CyType::General,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberDto {
    pub n: usize,
    /// χ(X_∞). May be omitted for semistable models, where it is derived.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_top: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_struct: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hodge_chis: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub betti: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cy_type: Option<CyTypeDto>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDto {
    pub name: String,
    pub multiplicity: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumDto {
    pub codim: usize,
    pub chi_top: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_struct: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hodge_chis: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chern_c1cd: Option<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecialFiberDto {
    pub components: Vec<ComponentDto>,
    pub strata: Vec<StratumDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_integral: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadruple_count: Option<i64>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub semistable: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub kulikov: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdpBlowupDto {
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularFiberDto {
    /// χ(X₀).
    pub chi: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_integral: Option<Rat>,
    /// χ(O) of a desingularization of each component.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub desing_chi_struct: Option<Vec<i64>>,
    /// Total Milnor number, when every singularity is isolated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub milnor: Option<i64>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub rational_singularities: bool,
}

/// Exactly one of the three sources must be present.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MhsDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<PresetDto>,
    /// Name of a file `<name>.json` in the presets directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<DegreeDto>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PresetDto {
    /// Every degree pure with trivial monodromy.
    Trivial,
    NodalElliptic,
    Odp {
        count: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hodge: Option<Vec<u64>>,
    },
    Pure {
        k: usize,
        hodge: Vec<u64>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeDto {
    pub k: usize,
    /// Rows `[p, w, dim]`. Without a table the degree is pure with trivial monodromy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<[u64; 3]>>,
    /// Level p to the rotation numbers of T_s on Gr^p_F, lower convention.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub rotations: BTreeMap<usize, Vec<Rat>>,
}

/// A preset file: a limiting MHS given by its degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetFile {
    pub version: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub degrees: Vec<DegreeDto>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDto {
    #[serde(default, skip_serializing_if = "is_false")]
    pub base_compact: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub primitive: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub non_isotrivial: bool,
    /// Defaults to true exactly when the descriptor is an `odp_blowup`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub odp_only: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_nodes: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchDto {
    Upper,
    Lower,
}

impl From<BranchDto> for bcov_core::monodromy::BranchOfLog {
    fn from(b: BranchDto) -> Self {
        match b {
            BranchDto::Upper => Self::Upper,
            BranchDto::Lower => Self::Lower,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchesDto {
    /// Branch for α on Gr^n_F H^n.
    pub top: BranchDto,
    /// Branch for the α^{p,q} sum.
    pub hodge: BranchDto,
}

impl BranchesDto {
    pub const STANDARD: BranchesDto = BranchesDto {
        top: BranchDto::Upper,
        hodge: BranchDto::Lower,
    };
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branches: Option<BranchesDto>,
    /// Specializations to evaluate. All applicable ones when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub specializations: Option<Vec<String>>,
}

/// Matrix input of the `monodromy` subcommand. A bare list of rows is accepted too.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonodromyInput {
    pub matrix: MatrixDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentsInput {
    pub ell: u64,
    pub labels: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nilpotent: Option<MatrixDto>,
    /// Truncation degree D of the section coefficients.
    pub truncation: usize,
    /// `sections[i][j]` lists the power series coefficients of f_j, constant term first.
    pub sections: Vec<Vec<Vec<Rat>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusInput {
    pub n: usize,
    #[serde(rename = "J")]
    pub j: MatrixDto,
    pub omega: MatrixDto,
}
