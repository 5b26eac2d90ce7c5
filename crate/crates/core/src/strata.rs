//! Numerical model of a normal crossings special fiber X₀ = Σ mᵢDᵢ, recorded
//! per codimension: D(k) is the disjoint union of the k-fold intersections.
//!
//! Absent strata count as empty (χ = 0, Chern integrals 0).

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactalg::{format_rational, int, rat, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumRecord {
    pub codim: usize,
    /// Topological Euler characteristic of D(k).
    pub chi_top: i64,
    /// χ(O_{D(k)}).
    pub chi_struct: Option<i64>,
    /// χ(Ω^j_{D(k)}) for j = 0…n−k+1.
    pub hodge_chis: Option<Vec<i64>>,
    /// ∫_{D(k)} c₁(Ω)·c_{n−k}(Ω).
    pub chern_c1cd: Option<Rational>,
}

impl StratumRecord {
    pub fn new(codim: usize, chi_top: i64) -> Self {
        StratumRecord {
            codim,
            chi_top,
            chi_struct: None,
            hodge_chis: None,
            chern_c1cd: None,
        }
    }

    pub fn with_chern(mut self, value: Rational) -> Self {
        self.chern_c1cd = Some(value);
        self
    }

    pub fn with_hodge_chis(mut self, chis: Vec<i64>) -> Self {
        self.hodge_chis = Some(chis);
        self
    }

    pub fn with_chi_struct(mut self, chi: i64) -> Self {
        self.chi_struct = Some(chi);
        self
    }

    /// Structure sheaf Euler characteristic, from either field.
    pub fn chi_o(&self) -> Option<i64> {
        self.chi_struct.or_else(|| self.hodge_chis.as_ref().map(|h| h[0]))
    }

    fn merge(self, other: StratumRecord) -> StratumRecord {
        fn both<T, F: FnOnce(T, T) -> T>(a: Option<T>, b: Option<T>, f: F) -> Option<T> {
            Some(f(a?, b?))
        }
        StratumRecord {
            codim: self.codim,
            chi_top: self.chi_top + other.chi_top,
            chi_struct: both(self.chi_struct, other.chi_struct, |a, b| a + b),
            hodge_chis: both(self.hodge_chis, other.hodge_chis, |a, b| {
                a.iter().zip(&b).map(|(x, y)| x + y).collect()
            }),
            chern_c1cd: both(self.chern_c1cd, other.chern_c1cd, |a, b| a + b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    pub multiplicity: u64,
}

impl Component {
    pub fn new(name: impl Into<String>, multiplicity: u64) -> Self {
        Component {
            name: name.into(),
            multiplicity,
        }
    }
}

/// Raw special fiber data before validation. Several records with the same
/// codimension (e.g. one per component) are summed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpecialFiberInput {
    pub n: usize,
    pub components: Vec<Component>,
    pub strata: Vec<StratumRecord>,
    /// ∫_B c_n(Ω_X).
    pub b_integral: Option<Rational>,
    /// Number of quadruple points, n = 3 only.
    pub quadruple_count: Option<i64>,
    pub semistable: bool,
    pub kulikov: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialFiberModel {
    n: usize,
    components: Vec<Component>,
    strata: BTreeMap<usize, StratumRecord>,
    b_integral: Option<Rational>,
    quadruple_count: Option<i64>,
    semistable: bool,
    kulikov: bool,
}

fn d_of(n: usize, k: usize) -> usize {
    n + 1 - k
}

/// Σ_j (−1)^j χ(Ω^j).
fn alternating(chis: &[i64]) -> i64 {
    chis.iter().enumerate().map(|(j, c)| if j % 2 == 0 { *c } else { -c }).sum()
}

fn sign(e: usize) -> i64 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Checks Serre duality χ(Ω^{d−j}) = (−1)^d χ(Ω^j) and, when `chern` is
/// given, the Hirzebruch–Riemann–Roch relation
/// Σ_j (−1)^j (j²+j)/2 χ(Ω^j) = d(3d+7)/24 χ + (−1)^d/12 ∫c₁c_{d−1}.
fn check_hodge_chis(field: &str, chis: &[i64], chi_top: i64, chern: Option<&Rational>) -> Result<()> {
    let d = chis.len() - 1;
    for j in 0..=d {
        if chis[d - j] != sign(d) * chis[j] {
            return Err(Error::validation(field, format!("Serre duality fails at j = {j}")));
        }
    }
    if alternating(chis) != chi_top {
        return Err(Error::validation(
            field,
            format!("alternating sum {} differs from chi_top {chi_top}", alternating(chis)),
        ));
    }
    if let Some(c) = chern {
        let lhs: Rational = chis
            .iter()
            .enumerate()
            .map(|(j, x)| int(sign(j) * (j * j + j) as i64 / 2 * x))
            .sum();
        let d = d as i64;
        let rhs = rat(d * (3 * d + 7) * chi_top, 24) + c * rat(sign(d as usize), 12);
        if lhs != rhs {
            return Err(Error::validation(
                field,
                format!(
                    "Riemann–Roch relation with chern_c1cd fails: {} != {}",
                    format_rational(&lhs),
                    format_rational(&rhs)
                ),
            ));
        }
    }
    Ok(())
}

impl SpecialFiberModel {
    pub fn new(input: SpecialFiberInput) -> Result<Self> {
        let n = input.n;
        if n == 0 {
            return Err(Error::validation("n", "relative dimension must be positive"));
        }
        if input.components.is_empty() {
            return Err(Error::validation("components", "at least one component is required"));
        }
        let mut names = BTreeSet::new();
        for (i, c) in input.components.iter().enumerate() {
            if c.multiplicity == 0 {
                return Err(Error::validation(format!("components[{i}].multiplicity"), "must be at least 1"));
            }
            if !names.insert(c.name.as_str()) {
                return Err(Error::validation(format!("components[{i}].name"), format!("duplicate {:?}", c.name)));
            }
            if input.semistable && c.multiplicity != 1 {
                return Err(Error::validation(
                    format!("components[{i}].multiplicity"),
                    "a semistable fiber is reduced",
                ));
            }
        }

        let mut strata: BTreeMap<usize, StratumRecord> = BTreeMap::new();
        for (i, rec) in input.strata.into_iter().enumerate() {
            let field = format!("strata[{i}]");
            let k = rec.codim;
            if k == 0 || k > n + 1 {
                return Err(Error::validation(format!("{field}.codim"), format!("must lie in 1..={}", n + 1)));
            }
            if let Some(h) = &rec.hodge_chis {
                if h.len() != d_of(n, k) + 1 {
                    return Err(Error::validation(
                        format!("{field}.hodge_chis"),
                        format!("expected {} entries for codimension {k}", d_of(n, k) + 1),
                    ));
                }
            }
            if let Some(c) = &rec.chern_c1cd {
                if k == n + 1 {
                    return Err(Error::validation(format!("{field}.chern_c1cd"), "points carry no Chern data"));
                }
                if !c.is_integer() {
                    return Err(Error::validation(
                        format!("{field}.chern_c1cd"),
                        "an intersection number must be an integer",
                    ));
                }
            }
            let merged = match strata.remove(&k) {
                Some(prev) => prev.merge(rec),
                None => rec,
            };
            strata.insert(k, merged);
        }

        for (&k, rec) in &strata {
            let field = format!("strata[codim={k}]");
            let nonempty = rec.chi_top != 0
                || rec.chi_o().is_some_and(|c| c != 0)
                || rec.chern_c1cd.as_ref().is_some_and(|c| !c.is_zero());
            if nonempty && input.components.len() < k {
                return Err(Error::validation(
                    field,
                    format!("a nonempty {k}-fold intersection needs at least {k} components"),
                ));
            }
            if let (Some(s), Some(h)) = (rec.chi_struct, &rec.hodge_chis) {
                if s != h[0] {
                    return Err(Error::validation(format!("{field}.chi_struct"), "disagrees with hodge_chis[0]"));
                }
            }
            if let Some(h) = &rec.hodge_chis {
                check_hodge_chis(&format!("{field}.hodge_chis"), h, rec.chi_top, rec.chern_c1cd.as_ref())?;
            }
        }
        if !strata.contains_key(&1) {
            return Err(Error::validation("strata", "the codimension 1 stratum is required"));
        }

        let mut b_integral = input.b_integral;
        if let Some(b) = &b_integral {
            if !b.is_integer() {
                return Err(Error::validation("B_integral", "an intersection number must be an integer"));
            }
        }
        if input.kulikov {
            match &b_integral {
                Some(b) if !b.is_zero() => {
                    return Err(Error::validation("B_integral", "a Kulikov model has B = 0"));
                }
                _ => b_integral = Some(Rational::zero()),
            }
        }

        if let Some(q) = input.quadruple_count {
            if n != 3 {
                return Err(Error::validation("quadruple_count", "only meaningful for n = 3"));
            }
            if q < 0 {
                return Err(Error::validation("quadruple_count", "cannot be negative"));
            }
            match strata.get(&4) {
                Some(rec) if rec.chi_top != q => {
                    return Err(Error::validation(
                        "quadruple_count",
                        format!("differs from chi(D(4)) = {}", rec.chi_top),
                    ));
                }
                Some(_) => {}
                None if q > 0 => {
                    if input.components.len() < 4 {
                        return Err(Error::validation("quadruple_count", "quadruple points need four components"));
                    }
                    strata.insert(4, StratumRecord::new(4, q).with_chi_struct(q).with_hodge_chis(vec![q]));
                }
                None => {}
            }
        }

        Ok(SpecialFiberModel {
            n,
            components: input.components,
            strata,
            b_integral,
            quadruple_count: input.quadruple_count,
            semistable: input.semistable,
            kulikov: input.kulikov,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn stratum(&self, k: usize) -> Option<&StratumRecord> {
        self.strata.get(&k)
    }

    /// χ(D(k)), zero for absent strata.
    pub fn chi(&self, k: usize) -> i64 {
        self.strata.get(&k).map_or(0, |r| r.chi_top)
    }

    /// ∫_{D(k)} c₁c_{n−k}; zero for absent strata, `None` when a present stratum lacks it.
    pub fn chern(&self, k: usize) -> Option<Rational> {
        match self.strata.get(&k) {
            None => Some(Rational::zero()),
            Some(r) => r.chern_c1cd.clone(),
        }
    }

    /// χ(Ω^j_{D(k)}); zero for absent strata.
    pub fn hodge_chi(&self, k: usize, j: usize) -> Option<i64> {
        match self.strata.get(&k) {
            None => Some(0),
            Some(r) => match (&r.hodge_chis, j) {
                (Some(h), _) => h.get(j).copied(),
                (None, 0) => r.chi_struct,
                _ => None,
            },
        }
    }

    pub fn b_integral(&self) -> Option<&Rational> {
        self.b_integral.as_ref()
    }

    pub fn quadruple_count(&self) -> Option<i64> {
        self.quadruple_count
    }

    pub fn is_semistable(&self) -> bool {
        self.semistable
    }

    pub fn is_kulikov(&self) -> bool {
        self.kulikov
    }

    /// lcm of the component multiplicities.
    pub fn multiplicity_lcm(&self) -> u64 {
        use num_integer::Integer;
        self.components.iter().fold(1, |acc, c| acc.lcm(&c.multiplicity))
    }

    /// True when X₀ is a single reduced smooth component.
    pub fn is_smooth(&self) -> bool {
        self.components.len() == 1
            && self.components[0].multiplicity == 1
            && (2..=self.n + 1).all(|k| self.chi(k) == 0)
    }

    pub fn strata(&self) -> impl Iterator<Item = &StratumRecord> {
        self.strata.values()
    }
}

/// Calabi–Yau flavor of the smooth fibers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CyType {
    /// h^{p,0} = 0 for 0 < p < n.
    Strict,
    Abelian,
    HyperKahler,
    #[default]
    General,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralFiberData {
    pub n: usize,
    pub chi_top: i64,
    pub chi_struct: Option<i64>,
    pub hodge_chis: Option<Vec<i64>>,
    pub betti: Option<Vec<u64>>,
    pub cy_type: CyType,
}

impl GeneralFiberData {
    pub fn new(n: usize, chi_top: i64) -> Self {
        GeneralFiberData {
            n,
            chi_top,
            chi_struct: None,
            hodge_chis: None,
            betti: None,
            cy_type: CyType::General,
        }
    }

    pub fn with_cy_type(mut self, cy: CyType) -> Self {
        self.cy_type = cy;
        self
    }

    pub fn with_hodge_chis(mut self, chis: Vec<i64>) -> Self {
        self.hodge_chis = Some(chis);
        self
    }

    pub fn chi_o(&self) -> Option<i64> {
        self.chi_struct.or_else(|| self.hodge_chis.as_ref().map(|h| h[0]))
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::validation("fiber.n", "must be positive"));
        }
        if let Some(h) = &self.hodge_chis {
            if h.len() != n + 1 {
                return Err(Error::validation("fiber.hodge_chis", format!("expected {} entries", n + 1)));
            }
            // c₁ = 0 on a Calabi–Yau fiber
            check_hodge_chis("fiber.hodge_chis", h, self.chi_top, Some(&Rational::zero()))?;
            if let Some(s) = self.chi_struct {
                if s != h[0] {
                    return Err(Error::validation("fiber.chi_struct", "disagrees with hodge_chis[0]"));
                }
            }
        }
        if let Some(b) = &self.betti {
            if b.len() != 2 * n + 1 {
                return Err(Error::validation("fiber.betti", format!("expected {} entries", 2 * n + 1)));
            }
            let e: i64 = b.iter().enumerate().map(|(k, &x)| sign(k) * x as i64).sum();
            if e != self.chi_top {
                return Err(Error::validation("fiber.betti", format!("alternating sum {e} differs from chi_top")));
            }
            if (0..=n).any(|k| b[k] != b[2 * n - k]) {
                return Err(Error::validation("fiber.betti", "Poincaré duality fails"));
            }
        }
        let expected_chi_o = match self.cy_type {
            CyType::Strict => Some(1 + sign(n)),
            CyType::Abelian => Some(0),
            CyType::HyperKahler => {
                if n % 2 == 1 {
                    return Err(Error::validation("fiber.cy_type", "hyperkähler fibers have even dimension"));
                }
                Some(n as i64 / 2 + 1)
            }
            CyType::General => None,
        };
        if let (Some(e), Some(c)) = (expected_chi_o, self.chi_o()) {
            if e != c {
                return Err(Error::validation(
                    "fiber.chi_struct",
                    format!("{:?} fibers have chi(O) = {e}, got {c}", self.cy_type),
                ));
            }
        }
        if self.cy_type == CyType::Abelian && self.chi_top != 0 {
            return Err(Error::validation("fiber.chi_top", "abelian fibers have chi = 0"));
        }
        Ok(())
    }
}

/// χ(X₀) = −Σ_k (−1)^k χ(D(k)).
pub fn chi_special_fiber(model: &SpecialFiberModel) -> i64 {
    -(1..=model.n + 1).map(|k| sign(k) * model.chi(k)).sum::<i64>()
}

/// χ(X_∞) = Σ_k (−1)^{k+1} k·χ(D(k)) for a semistable fiber.
pub fn chi_generic_semistable(model: &SpecialFiberModel) -> Result<i64> {
    if !model.semistable {
        return Err(Error::NotApplicable("the generic fiber formula needs a semistable model".into()));
    }
    Ok((1..=model.n + 1).map(|k| -sign(k) * k as i64 * model.chi(k)).sum())
}

/// Degree of the localized top Chern class: (−1)^n (χ(X_∞) − χ(X₀)).
pub fn vanishing_defect(model: &SpecialFiberModel, fiber: &GeneralFiberData) -> Result<Rational> {
    if model.n != fiber.n {
        return Err(Error::Dimension(format!("special fiber n = {}, general fiber n = {}", model.n, fiber.n)));
    }
    Ok(int(sign(model.n) * (fiber.chi_top - chi_special_fiber(model))))
}

/// Fills ∫_{D(k)} c₁c_{n−k} for k = 1…n from the log Calabi–Yau recursion
/// C(k) = (−1)^{n−k+1}(k+1)χ(D(k+1)) + C(k+1), C(n+1) = 0.
/// Supplied values must agree with the derived ones.
pub fn derive_chern_kulikov(model: &SpecialFiberModel) -> Result<SpecialFiberModel> {
    if !(model.semistable && model.kulikov) {
        return Err(Error::NotApplicable("Chern derivation needs a semistable Kulikov model".into()));
    }
    let n = model.n;
    let mut out = model.clone();
    let mut c = Rational::zero();
    for k in (1..=n).rev() {
        c += int(sign(n - k + 1) * (k as i64 + 1) * model.chi(k + 1));
        let rec = out.strata.entry(k).or_insert_with(|| StratumRecord::new(k, 0));
        match &rec.chern_c1cd {
            Some(given) if *given != c => {
                return Err(Error::Inconsistency {
                    what: format!("chern_c1cd of D({k})"),
                    left: format_rational(given),
                    right: format_rational(&c),
                });
            }
            _ => rec.chern_c1cd = Some(c.clone()),
        }
    }
    Ok(out)
}

/// Symmetric table of degrees [Dᵢ·Dⱼ·D_k·D_l] for r components of a threefold fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionTensor {
    r: usize,
    values: Vec<Rational>,
}

impl IntersectionTensor {
    pub fn from_fn(r: usize, mut f: impl FnMut(usize, usize, usize, usize) -> Rational) -> Self {
        let mut values = Vec::with_capacity(r.pow(4));
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    for l in 0..r {
                        values.push(f(i, j, k, l));
                    }
                }
            }
        }
        IntersectionTensor { r, values }
    }

    pub fn components(&self) -> usize {
        self.r
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> &Rational {
        let r = self.r;
        &self.values[((i * r + j) * r + k) * r + l]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiuXiaReport {
    pub quadruple_points: Rational,
    /// Σ_{i<j} Σ_{k∉{i,j}} [D_k² D_{ij}].
    pub self_intersection_sum: Rational,
    /// Σ_{i<j} c₁(K_{D_ij})²[D_ij], only computed for Kulikov data.
    pub canonical_sum: Option<Rational>,
    pub holds: bool,
}

/// Checks Σ[D_k²D_ij] = −4Q and, for Kulikov data, Σc₁(K_{D_ij})² = 8Q, where
/// K_{D_ij} = −Σ_{l≠i,j} D_l. The input must satisfy Σᵢ[Dᵢ] = 0.
pub fn liu_xia_identity_check(t: &IntersectionTensor, kulikov: bool) -> Result<LiuXiaReport> {
    let r = t.r;
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                for l in 0..r {
                    let v = t.get(i, j, k, l);
                    if v != t.get(j, i, k, l) || v != t.get(i, k, j, l) || v != t.get(i, j, l, k) {
                        return Err(Error::validation("intersections", format!("not symmetric at ({i},{j},{k},{l})")));
                    }
                }
            }
        }
    }
    for j in 0..r {
        for k in 0..r {
            for l in 0..r {
                let s: Rational = (0..r).map(|i| t.get(i, j, k, l)).sum();
                if !s.is_zero() {
                    return Err(Error::validation(
                        "intersections",
                        format!("relation sum_i [D_i] = 0 fails at ({j},{k},{l})"),
                    ));
                }
            }
        }
    }
    let mut q = Rational::zero();
    for i in 0..r {
        for j in i + 1..r {
            for k in j + 1..r {
                for l in k + 1..r {
                    q += t.get(i, j, k, l);
                }
            }
        }
    }
    let mut self_sum = Rational::zero();
    let mut canonical = Rational::zero();
    for i in 0..r {
        for j in i + 1..r {
            let others: Vec<usize> = (0..r).filter(|&x| x != i && x != j).collect();
            for &k in &others {
                self_sum += t.get(k, k, i, j);
                for &l in &others {
                    canonical += t.get(k, l, i, j);
                }
            }
        }
    }
    let mut holds = self_sum == &q * int(-4);
    let canonical_sum = if kulikov {
        holds &= canonical == &q * int(8);
        Some(canonical)
    } else {
        None
    };
    Ok(LiuXiaReport {
        quadruple_points: q,
        self_intersection_sum: self_sum,
        canonical_sum,
        holds,
    })
}

/// Convenience for tests and presets: a semistable model with the given
/// χ(D(1)), …, χ(D(n+1)) and as many components as the deepest nonempty stratum needs.
pub fn semistable_from_chis(n: usize, chis: &[i64], kulikov: bool) -> Result<SpecialFiberModel> {
    if chis.len() != n + 1 {
        return Err(Error::Dimension(format!("expected {} strata Euler characteristics", n + 1)));
    }
    let deepest = chis.iter().rposition(|&c| c != 0).map_or(1, |k| k + 1);
    SpecialFiberModel::new(SpecialFiberInput {
        n,
        components: (0..deepest).map(|i| Component::new(format!("D{}", i + 1), 1)).collect(),
        strata: chis
            .iter()
            .enumerate()
            .filter(|&(k, &c)| c != 0 || k == 0)
            .map(|(k, &c)| StratumRecord::new(k + 1, c))
            .collect(),
        b_integral: None,
        quadruple_count: None,
        semistable: true,
        kulikov,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn kulikov_vector() -> SpecialFiberModel {
        semistable_from_chis(3, &[10, 24, 8, 2], true).unwrap()
    }

    #[test]
    fn euler_characteristics() {
        let m = kulikov_vector();
        assert_eq!(chi_special_fiber(&m), -8);
        assert_eq!(chi_generic_semistable(&m).unwrap(), -22);
        let fiber = GeneralFiberData::new(3, -22);
        assert_eq!(vanishing_defect(&m, &fiber).unwrap(), int(14));

        let smooth = semistable_from_chis(3, &[-200, 0, 0, 0], false).unwrap();
        assert!(smooth.is_smooth());
        assert_eq!(chi_special_fiber(&smooth), -200);
        assert_eq!(chi_generic_semistable(&smooth).unwrap(), -200);
        assert!(vanishing_defect(&smooth, &GeneralFiberData::new(3, -200)).unwrap().is_zero());
    }

    #[test]
    fn two_components_meeting_in_a_k3() {
        let m = semistable_from_chis(3, &[2 * 7, 24, 0, 0], false).unwrap();
        assert_eq!(chi_generic_semistable(&m).unwrap(), 2 * 7 - 48);
    }

    #[test]
    fn non_semistable_is_rejected() {
        let m = SpecialFiberModel::new(SpecialFiberInput {
            n: 2,
            components: vec![Component::new("Z", 1), Component::new("E", 2)],
            strata: vec![StratumRecord::new(1, 5)],
            ..Default::default()
        })
        .unwrap();
        assert!(matches!(chi_generic_semistable(&m), Err(Error::NotApplicable(_))));
        assert!(matches!(derive_chern_kulikov(&m), Err(Error::NotApplicable(_))));
        assert_eq!(m.multiplicity_lcm(), 2);
    }

    #[test]
    fn kulikov_chern_recursion() {
        let m = derive_chern_kulikov(&kulikov_vector()).unwrap();
        assert_eq!(m.chern(3).unwrap(), int(-8));
        assert_eq!(m.chern(2).unwrap(), int(16));
        assert_eq!(m.chern(1).unwrap(), int(-32));

        let smooth = semistable_from_chis(3, &[0, 0, 0, 0], true).unwrap();
        let d = derive_chern_kulikov(&smooth).unwrap();
        assert!((1..=3).all(|k| d.chern(k).unwrap().is_zero()));
    }

    #[test]
    fn conflicting_chern_is_reported() {
        let mut input = SpecialFiberInput {
            n: 3,
            components: (0..4).map(|i| Component::new(format!("D{i}"), 1)).collect(),
            strata: vec![
                StratumRecord::new(1, 10),
                StratumRecord::new(2, 24),
                StratumRecord::new(3, 8).with_chern(int(8)),
                StratumRecord::new(4, 2),
            ],
            semistable: true,
            kulikov: true,
            ..Default::default()
        };
        let m = SpecialFiberModel::new(input.clone()).unwrap();
        assert!(matches!(derive_chern_kulikov(&m), Err(Error::Inconsistency { .. })));
        input.strata[2].chern_c1cd = Some(rat(1, 2));
        assert!(SpecialFiberModel::new(input).is_err());
    }

    #[test]
    fn validation_rules() {
        let base = SpecialFiberInput {
            n: 3,
            components: vec![Component::new("A", 1), Component::new("B", 1)],
            strata: vec![StratumRecord::new(1, 4), StratumRecord::new(2, 0)],
            ..Default::default()
        };
        assert!(SpecialFiberModel::new(base.clone()).is_ok());

        let mut bad = base.clone();
        bad.components[1].multiplicity = 2;
        bad.semistable = true;
        assert!(SpecialFiberModel::new(bad).is_err());

        let mut bad = base.clone();
        bad.kulikov = true;
        bad.b_integral = Some(int(3));
        assert!(SpecialFiberModel::new(bad).is_err());

        let mut bad = base.clone();
        bad.strata.push(StratumRecord::new(4, -1));
        assert!(SpecialFiberModel::new(bad).is_err());

        let mut bad = base.clone();
        bad.strata.push(StratumRecord::new(3, 5));
        assert!(SpecialFiberModel::new(bad).is_err(), "triple points need three components");

        let mut bad = base.clone();
        bad.strata = vec![StratumRecord::new(2, 0)];
        assert!(SpecialFiberModel::new(bad).is_err());

        let mut bad = base.clone();
        bad.strata.push(StratumRecord::new(4, 0).with_chern(int(0)));
        assert!(SpecialFiberModel::new(bad).is_err());
    }

    #[test]
    fn per_component_records_are_summed() {
        let m = SpecialFiberModel::new(SpecialFiberInput {
            n: 2,
            components: vec![Component::new("A", 1), Component::new("B", 1)],
            strata: vec![
                StratumRecord::new(1, 3).with_chi_struct(1),
                StratumRecord::new(1, 4).with_chi_struct(1),
                StratumRecord::new(2, 2),
            ],
            ..Default::default()
        })
        .unwrap();
        assert_eq!(m.chi(1), 7);
        assert_eq!(m.stratum(1).unwrap().chi_struct, Some(2));
    }

    #[test]
    fn quadruple_count_fills_points() {
        let mut input = SpecialFiberInput {
            n: 3,
            components: (0..4).map(|i| Component::new(format!("D{i}"), 1)).collect(),
            strata: vec![StratumRecord::new(1, 10), StratumRecord::new(2, 24), StratumRecord::new(3, 8)],
            quadruple_count: Some(2),
            semistable: true,
            kulikov: true,
            ..Default::default()
        };
        let m = SpecialFiberModel::new(input.clone()).unwrap();
        assert_eq!(m.chi(4), 2);
        input.strata.push(StratumRecord::new(4, 3));
        assert!(SpecialFiberModel::new(input).is_err());
    }

    #[test]
    fn fiber_validation() {
        let quintic = GeneralFiberData::new(3, -200)
            .with_cy_type(CyType::Strict)
            .with_hodge_chis(vec![0, 100, -100, 0]);
        quintic.validate().unwrap();
        let k3 = GeneralFiberData::new(2, 24).with_cy_type(CyType::Strict).with_hodge_chis(vec![2, -20, 2]);
        k3.validate().unwrap();
        let wrong = GeneralFiberData::new(3, -200).with_hodge_chis(vec![1, 100, -100, -1]);
        assert!(wrong.validate().is_err());
        let abelian = GeneralFiberData::new(2, 4).with_cy_type(CyType::Abelian);
        assert!(abelian.validate().is_err());
    }

    #[test]
    fn liu_xia_trivial_and_violation() {
        let zero = IntersectionTensor::from_fn(4, |_, _, _, _| Rational::zero());
        let rep = liu_xia_identity_check(&zero, true).unwrap();
        assert!(rep.holds && rep.quadruple_points.is_zero());
        let bad = IntersectionTensor::from_fn(3, |_, _, _, _| Rational::one());
        assert!(liu_xia_identity_check(&bad, false).is_err());
    }
}
