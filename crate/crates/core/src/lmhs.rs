//! Limiting mixed Hodge structures as Hodge–Deligne tables plus T_s
//! rotation data, and the invariants α^{p,q}, β^{p,q} read off them.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{int, Rational, RotationNumber};
use crate::monodromy::BranchOfLog;

/// dim Gr^p_{F∞} Gr^W_w H^k(X_∞), stored sparsely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeDeligneTable {
    k: usize,
    n: usize,
    dims: BTreeMap<(usize, usize), u64>,
}

impl HodgeDeligneTable {
    /// Entries are `(p, w, dim)`. Checks the index ranges, Hodge symmetry
    /// d[p][w] = d[w−p][w] and the symmetry d[p][k+r] = d[p−r][k−r] forced by N^r.
    pub fn new(k: usize, n: usize, entries: impl IntoIterator<Item = (usize, usize, u64)>) -> Result<Self> {
        let table = Self::unvalidated(k, n, entries)?;
        table.validate()?;
        Ok(table)
    }

    /// Builds a table without the symmetry checks. Duplicate entries are still rejected.
    pub fn unvalidated(k: usize, n: usize, entries: impl IntoIterator<Item = (usize, usize, u64)>) -> Result<Self> {
        let mut dims = BTreeMap::new();
        for (p, w, d) in entries {
            if dims.insert((p, w), d).is_some() {
                return Err(Error::validation(format!("table[{p}][{w}]"), "duplicate entry"));
            }
        }
        dims.retain(|_, d| *d > 0);
        Ok(HodgeDeligneTable { k, n, dims })
    }

    fn validate(&self) -> Result<()> {
        let (k, n) = (self.k, self.n);
        if k > 2 * n {
            return Err(Error::validation("degree", format!("k = {k} exceeds 2n = {}", 2 * n)));
        }
        for &(p, w) in self.dims.keys() {
            if p > n || w < p || w - p > n || w > 2 * k {
                return Err(Error::validation(
                    format!("table[{p}][{w}]"),
                    format!("index outside the range allowed for degree {k}, dimension {n}"),
                ));
            }
        }
        for &(p, w) in self.dims.keys() {
            if self.dim(p, w) != self.dim(w - p, w) {
                return Err(Error::validation(
                    format!("table[{p}][{w}]"),
                    format!("Hodge symmetry fails against table[{}][{w}]", w - p),
                ));
            }
            if w > k {
                let r = w - k;
                let mirror = if p >= r && k >= r { self.dim(p - r, k - r) } else { 0 };
                if self.dim(p, w) != mirror {
                    return Err(Error::validation(
                        format!("table[{p}][{w}]"),
                        format!("N^{r} symmetry fails against weight {}", k as i64 - r as i64),
                    ));
                }
            }
        }
        for &(p, w) in self.dims.keys() {
            if w < k {
                let r = k - w;
                if self.dim(p + r, k + r) != self.dim(p, w) {
                    return Err(Error::validation(
                        format!("table[{p}][{w}]"),
                        format!("N^{r} symmetry fails against weight {}", k + r),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn fiber_dimension(&self) -> usize {
        self.n
    }

    pub fn dim(&self, p: usize, w: usize) -> u64 {
        self.dims.get(&(p, w)).copied().unwrap_or(0)
    }

    /// Σ_w d[p][w] = dim Gr^p_F H^k.
    pub fn level_dim(&self, p: usize) -> u64 {
        self.dims.iter().filter(|((q, _), _)| *q == p).map(|(_, d)| d).sum()
    }

    pub fn betti(&self) -> u64 {
        self.dims.values().sum()
    }

    /// Nonzero entries as `(p, w, dim)`, ordered by (p, w).
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.dims.iter().map(|(&(p, w), &d)| (p, w, d))
    }

    fn levels(&self) -> Vec<usize> {
        let mut ps: Vec<usize> = self.dims.keys().map(|&(p, _)| p).collect();
        ps.dedup();
        ps
    }
}

/// Data attached to one cohomological degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DegreeData {
    Explicit {
        table: HodgeDeligneTable,
        /// Level p ↦ rotations of T_s on Gr^p_F H^k (lower convention).
        rotations: BTreeMap<usize, Vec<RotationNumber>>,
    },
    /// Pure with trivial monodromy: contributes 0 to every α and β.
    PureTrivial,
}

impl DegreeData {
    /// Levels absent from `rotations` get trivial rotations. A level whose
    /// multiset size differs from Σ_w d[p][w] is rejected.
    pub fn explicit(table: HodgeDeligneTable, rotations: BTreeMap<usize, Vec<RotationNumber>>) -> Result<Self> {
        let mut full = BTreeMap::new();
        for (&p, rots) in &rotations {
            let expected = table.level_dim(p);
            if rots.len() as u64 != expected {
                return Err(Error::validation(
                    format!("rotations[{p}]"),
                    format!("{} rotations for a level of dimension {expected}", rots.len()),
                ));
            }
        }
        for p in table.levels() {
            let rots = rotations
                .get(&p)
                .cloned()
                .unwrap_or_else(|| vec![RotationNumber::zero(); table.level_dim(p) as usize]);
            let mut rots = rots;
            rots.sort();
            full.insert(p, rots);
        }
        Ok(DegreeData::Explicit { table, rotations: full })
    }

    pub fn trivial(table: HodgeDeligneTable) -> Self {
        Self::explicit(table, BTreeMap::new()).expect("trivial rotations always fit")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitingMHS {
    n: usize,
    degrees: BTreeMap<usize, DegreeData>,
}

impl LimitingMHS {
    pub fn new(n: usize, degrees: BTreeMap<usize, DegreeData>) -> Result<Self> {
        for (&k, data) in &degrees {
            if k > 2 * n {
                return Err(Error::validation(format!("degrees[{k}]"), format!("degree exceeds 2n = {}", 2 * n)));
            }
            if let DegreeData::Explicit { table, .. } = data {
                if table.degree() != k || table.fiber_dimension() != n {
                    return Err(Error::validation(
                        format!("degrees[{k}]"),
                        "table degree or dimension disagrees with its slot",
                    ));
                }
            }
        }
        Ok(LimitingMHS { n, degrees })
    }

    /// Every degree 0…2n pure with trivial monodromy.
    pub fn pure_trivial(n: usize) -> Self {
        LimitingMHS {
            n,
            degrees: (0..=2 * n).map(|k| (k, DegreeData::PureTrivial)).collect(),
        }
    }

    pub fn fiber_dimension(&self) -> usize {
        self.n
    }

    pub fn degree(&self, k: usize) -> Option<&DegreeData> {
        self.degrees.get(&k)
    }

    pub fn degrees(&self) -> &BTreeMap<usize, DegreeData> {
        &self.degrees
    }

    /// True when every stored rotation is 0.
    pub fn is_unipotent(&self) -> bool {
        self.all_rotations().all(RotationNumber::is_zero)
    }

    /// lcm of the orders of all stored rotations.
    pub fn common_denominator(&self) -> BigInt {
        self.all_rotations().fold(BigInt::one(), |acc, r| acc.lcm(&r.order()))
    }

    fn all_rotations(&self) -> impl Iterator<Item = &RotationNumber> {
        self.degrees.values().flat_map(|d| match d {
            DegreeData::Explicit { rotations, .. } => rotations.values().flatten().collect::<Vec<_>>(),
            DegreeData::PureTrivial => Vec::new(),
        })
    }

    fn degree_for(&self, p: usize, q: usize) -> Result<&DegreeData> {
        self.degrees
            .get(&(p + q))
            .ok_or_else(|| Error::Missing(format!("limiting MHS data for degree {}", p + q)))
    }
}

/// α^{p,q}: sum of the exponents of T_s on Gr^p_F H^{p+q} for `branch`.
pub fn alpha(mhs: &LimitingMHS, p: usize, q: usize, branch: BranchOfLog) -> Result<Rational> {
    Ok(match mhs.degree_for(p, q)? {
        DegreeData::PureTrivial => Rational::zero(),
        DegreeData::Explicit { rotations, .. } => rotations
            .get(&p)
            .map(|rs| rs.iter().map(|r| branch.view(r).value().clone()).sum())
            .unwrap_or_else(Rational::zero),
    })
}

/// β^{p,q} = Σ_r r·d[p][k+r] with k = p + q.
pub fn beta(mhs: &LimitingMHS, p: usize, q: usize) -> Result<Rational> {
    let k = (p + q) as i64;
    Ok(match mhs.degree_for(p, q)? {
        DegreeData::PureTrivial => Rational::zero(),
        DegreeData::Explicit { table, .. } => table
            .entries()
            .filter(|&(pp, _, _)| pp == p)
            .map(|(_, w, d)| int((w as i64 - k) * d as i64))
            .sum(),
    })
}

/// Coefficients of log|t|² and log log|t|⁻¹ in log h_{L²}(σ, σ) for the
/// determinant of R^q f_* Ω^p(log).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsymptoticExpansion {
    pub log_coeff: Rational,
    pub loglog_coeff: Rational,
}

pub fn hodge_expansion(mhs: &LimitingMHS, p: usize, q: usize) -> Result<AsymptoticExpansion> {
    Ok(AsymptoticExpansion {
        log_coeff: alpha(mhs, p, q, BranchOfLog::Lower)?,
        loglog_coeff: beta(mhs, p, q)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BetaSymmetryReport {
    /// β^{p,q} = −β^{q,p} in every present degree.
    pub antisymmetry: bool,
    /// β^{p,q} = β^{n−q,n−p} whenever degrees k and 2n−k are both present.
    pub duality: bool,
    pub failures: Vec<String>,
}

pub fn beta_symmetry_check(mhs: &LimitingMHS) -> BetaSymmetryReport {
    let n = mhs.fiber_dimension();
    let mut report = BetaSymmetryReport {
        antisymmetry: true,
        duality: true,
        failures: Vec::new(),
    };
    for &k in mhs.degrees().keys() {
        for p in k.saturating_sub(n)..=k.min(n) {
            let q = k - p;
            let b = beta(mhs, p, q).expect("degree present");
            let b_swap = beta(mhs, q, p).expect("degree present");
            if b != -b_swap.clone() {
                report.antisymmetry = false;
                report.failures.push(format!("beta({p},{q}) = {b} but beta({q},{p}) = {b_swap}"));
            }
            if mhs.degree(2 * n - k).is_some() {
                let b_dual = beta(mhs, n - q, n - p).expect("degree present");
                if b != b_dual {
                    report.duality = false;
                    report
                        .failures
                        .push(format!("beta({p},{q}) = {b} but beta({},{}) = {b_dual}", n - q, n - p));
                }
            }
        }
    }
    report
}

/// Built-in limiting MHS presets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Degree 1 of a nodal degeneration of elliptic curves.
    NodalElliptic,
    /// `count` ordinary double points on an n-dimensional fiber. `hodge`
    /// lists h^{p,n−p} of the smooth fiber, p = 0…n; without it only the
    /// part touched by the vanishing cycles is recorded.
    Odp {
        n: usize,
        count: u64,
        hodge: Option<Vec<u64>>,
    },
    /// A pure degree k structure with trivial monodromy, hodge[p] = h^{p,k−p}.
    Pure { k: usize, hodge: Vec<u64> },
}

pub fn preset(which: &Preset) -> Result<LimitingMHS> {
    match which {
        Preset::NodalElliptic => preset(&Preset::Odp {
            n: 1,
            count: 1,
            hodge: None,
        }),
        Preset::Odp { n, count, hodge } => odp_preset(*n, *count, hodge.as_deref()),
        Preset::Pure { k, hodge } => {
            check_symmetric(hodge, *k)?;
            let table = HodgeDeligneTable::new(*k, *k, hodge.iter().enumerate().map(|(p, &h)| (p, *k, h)))?;
            let mut mhs = LimitingMHS::pure_trivial(*k);
            mhs.degrees.insert(*k, DegreeData::trivial(table));
            Ok(mhs)
        }
    }
}

fn check_symmetric(hodge: &[u64], k: usize) -> Result<()> {
    if hodge.len() != k + 1 {
        return Err(Error::validation("hodge", format!("expected {} Hodge numbers, got {}", k + 1, hodge.len())));
    }
    if (0..=k).any(|p| hodge[p] != hodge[k - p]) {
        return Err(Error::validation("hodge", "Hodge numbers are not symmetric"));
    }
    Ok(())
}

// Picard–Lefschetz: for n odd each vanishing cycle δ spans a weight n+1 class
// at level (n+1)/2 whose image under N sits in weight n−1 at level (n−1)/2,
// with trivial T_s. For n even N = 0 on H^n, and T_s acts by −1 on the
// vanishing classes, which live at level n/2.
fn odp_preset(n: usize, count: u64, hodge: Option<&[u64]>) -> Result<LimitingMHS> {
    if n == 0 {
        return Err(Error::validation("n", "must be positive"));
    }
    let pure = match hodge {
        Some(h) => {
            check_symmetric(h, n)?;
            h.to_vec()
        }
        None => vec![0; n + 1],
    };
    let mut entries = Vec::new();
    let mut rotations = BTreeMap::new();
    if n % 2 == 1 {
        let (hi, lo) = ((n + 1) / 2, (n - 1) / 2);
        for p in 0..=n {
            let mut d = pure[p];
            if hodge.is_some() && (p == hi || p == lo) {
                d = d.checked_sub(count).ok_or_else(|| {
                    Error::validation("hodge", format!("h^{{{p},{}}} is smaller than the node count", n - p))
                })?;
            }
            entries.push((p, n, d));
        }
        entries.push((hi, n + 1, count));
        entries.push((lo, n - 1, count));
    } else {
        let mid = n / 2;
        for (p, &h) in pure.iter().enumerate() {
            let d = if p == mid {
                if hodge.is_some() {
                    if h < count {
                        return Err(Error::validation(
                            "hodge",
                            format!("h^{{{mid},{mid}}} is smaller than the node count"),
                        ));
                    }
                    h
                } else {
                    count
                }
            } else {
                h
            };
            entries.push((p, n, d));
        }
        let total = entries.iter().find(|e| e.0 == mid).map_or(0, |e| e.2);
        let mut rots = vec![RotationNumber::from_ratio(1, 2); count as usize];
        rots.extend(std::iter::repeat(RotationNumber::zero()).take((total - count) as usize));
        rotations.insert(mid, rots);
    }
    let table = HodgeDeligneTable::new(n, n, entries)?;
    let mut mhs = LimitingMHS::pure_trivial(n);
    if table.betti() > 0 {
        mhs.degrees.insert(n, DegreeData::explicit(table, rotations)?);
    }
    Ok(mhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    #[test]
    fn nodal_elliptic_beta() {
        let mhs = preset(&Preset::NodalElliptic).unwrap();
        assert_eq!(beta(&mhs, 1, 0).unwrap(), int(1));
        assert_eq!(beta(&mhs, 0, 1).unwrap(), int(-1));
        assert_eq!(
            hodge_expansion(&mhs, 1, 0).unwrap(),
            AsymptoticExpansion {
                log_coeff: int(0),
                loglog_coeff: int(1)
            }
        );
        let report = beta_symmetry_check(&mhs);
        assert!(report.antisymmetry && report.duality, "{:?}", report.failures);
    }

    #[test]
    fn alpha_examples() {
        let table = HodgeDeligneTable::new(2, 2, [(1, 2, 2)]).unwrap();
        let rots = BTreeMap::from([(1, vec![RotationNumber::from_ratio(1, 3), RotationNumber::zero()])]);
        let mut degrees = BTreeMap::new();
        degrees.insert(2, DegreeData::explicit(table, rots).unwrap());
        let mhs = LimitingMHS::new(2, degrees).unwrap();
        assert_eq!(alpha(&mhs, 1, 1, BranchOfLog::Lower).unwrap(), rat(1, 3));
        assert_eq!(alpha(&mhs, 1, 1, BranchOfLog::Upper).unwrap(), rat(2, 3));
        assert!(alpha(&mhs, 2, 0, BranchOfLog::Lower).unwrap().is_zero());
        assert!(matches!(alpha(&mhs, 1, 0, BranchOfLog::Lower), Err(Error::Missing(_))));
        assert!(beta(&mhs, 1, 2).is_err());
    }

    #[test]
    fn odp_presets() {
        for n in [3usize, 5] {
            let mhs = preset(&Preset::Odp { n, count: 4, hodge: None }).unwrap();
            assert_eq!(beta(&mhs, (n + 1) / 2, (n - 1) / 2).unwrap(), int(4));
            assert_eq!(beta(&mhs, (n - 1) / 2, (n + 1) / 2).unwrap(), int(-4));
            assert!(mhs.is_unipotent());
        }
        let mhs = preset(&Preset::Odp { n: 4, count: 1, hodge: None }).unwrap();
        assert_eq!(alpha(&mhs, 2, 2, BranchOfLog::Lower).unwrap(), rat(1, 2));
        assert_eq!(
            hodge_expansion(&mhs, 2, 2).unwrap(),
            AsymptoticExpansion {
                log_coeff: rat(1, 2),
                loglog_coeff: int(0)
            }
        );
        let quintic = preset(&Preset::Odp {
            n: 3,
            count: 1,
            hodge: Some(vec![1, 101, 101, 1]),
        })
        .unwrap();
        let DegreeData::Explicit { table, .. } = quintic.degree(3).unwrap() else { panic!() };
        assert_eq!(table.betti(), 204);
        assert_eq!(table.dim(2, 3), 100);
        assert!(preset(&Preset::Odp {
            n: 3,
            count: 2,
            hodge: Some(vec![1, 1, 1, 1])
        })
        .is_err());
        assert_eq!(
            preset(&Preset::Odp { n: 1, count: 1, hodge: None }).unwrap(),
            preset(&Preset::NodalElliptic).unwrap()
        );
    }

    #[test]
    fn pure_presets() {
        let mhs = preset(&Preset::Pure { k: 2, hodge: vec![1, 20, 1] }).unwrap();
        for p in 0..=2 {
            assert!(beta(&mhs, p, 2 - p).unwrap().is_zero());
            assert!(alpha(&mhs, p, 2 - p, BranchOfLog::Lower).unwrap().is_zero());
        }
        assert!(preset(&Preset::Pure { k: 2, hodge: vec![1, 20, 2] }).is_err());
    }

    #[test]
    fn table_validation() {
        assert!(HodgeDeligneTable::new(1, 1, [(1, 2, 1)]).is_err());
        assert!(HodgeDeligneTable::new(1, 1, [(1, 2, 1), (0, 0, 1)]).is_ok());
        assert!(HodgeDeligneTable::new(1, 1, [(0, 1, 1)]).is_err());
        assert!(HodgeDeligneTable::new(1, 1, [(0, 1, 1), (0, 1, 1)]).is_err());
        let table = HodgeDeligneTable::new(1, 1, [(1, 1, 1), (0, 1, 1)]).unwrap();
        let bad = DegreeData::explicit(table, BTreeMap::from([(1, vec![])]));
        assert!(bad.is_err());
    }

    #[test]
    fn broken_nilpotent_symmetry_is_reported() {
        let table = HodgeDeligneTable::unvalidated(1, 1, [(1, 2, 1)]).unwrap();
        let mut degrees = BTreeMap::new();
        degrees.insert(1, DegreeData::trivial(table));
        let mhs = LimitingMHS::new(1, degrees).unwrap();
        let report = beta_symmetry_check(&mhs);
        assert!(!report.antisymmetry);
    }
}
