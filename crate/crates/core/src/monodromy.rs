//! Deligne extensions on the punctured disc in the frame model, and the
//! elementary exponent algorithm.
//!
//! A [`TwistedFrame`] is a basis ẽ_1…ẽ_r of the lower Deligne extension
//! made of T_s-eigenvectors; ẽ_j carries the label k_j ∈ [0, ℓ), meaning
//! T_s ẽ_j = exp(−2πi k_j/ℓ) ẽ_j. After the base change t ↦ t^ℓ = q, the
//! pullback of ẽ_j is t^{k_j} times a frame element of the unipotent
//! extension, so a section σ = Σ f_j(q) ẽ_j pulls back to
//! Σ t^{k_j} f_j(t^ℓ) (frame of the unipotent extension).

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactalg::{
    chevalley_decompose, cyclotomic_factorization, char_poly, eigen_rotations, nilpotent_log,
    quasi_unipotence_order, span_dim, weight_filtration, Rational, RationalMatrix, RotationNumber,
    WeightFiltration,
};

/// Branch of the logarithm used to build a Deligne extension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BranchOfLog {
    /// exp(2πiu), u ∈ [0, 1), has exponent u.
    Upper,
    /// exp(−2πia), a ∈ [0, 1), has exponent a.
    Lower,
}

impl BranchOfLog {
    /// Exponent of the root of unity stored (lower convention) in `r`.
    pub fn view(self, r: &RotationNumber) -> RotationNumber {
        match self {
            BranchOfLog::Lower => r.clone(),
            BranchOfLog::Upper => r.conjugate(),
        }
    }
}

impl fmt::Display for BranchOfLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BranchOfLog::Upper => "upper",
            BranchOfLog::Lower => "lower",
        })
    }
}

impl FromStr for BranchOfLog {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upper" => Ok(BranchOfLog::Upper),
            "lower" => Ok(BranchOfLog::Lower),
            other => Err(Error::validation("branch", format!("expected upper or lower, got {other:?}"))),
        }
    }
}

/// A quasi-unipotent monodromy matrix together with its Chevalley
/// decomposition and the logarithm of the unipotent part.
#[derive(Clone, Debug)]
pub struct MonodromyOperator {
    matrix: RationalMatrix,
    ell: u64,
    semisimple: RationalMatrix,
    unipotent: RationalMatrix,
    log_unipotent: RationalMatrix,
    factors: Vec<(u64, usize)>,
}

impl MonodromyOperator {
    pub fn new(matrix: RationalMatrix) -> Result<Self> {
        let ell = quasi_unipotence_order(&matrix)?;
        let (semisimple, unipotent) = chevalley_decompose(&matrix)?;
        let log_unipotent = nilpotent_log(&unipotent)?;
        let factors = cyclotomic_factorization(&char_poly(&matrix)?).expect("checked above");
        Ok(MonodromyOperator {
            matrix,
            ell,
            semisimple,
            unipotent,
            log_unipotent,
            factors,
        })
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.matrix
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn semisimple(&self) -> &RationalMatrix {
        &self.semisimple
    }

    pub fn unipotent(&self) -> &RationalMatrix {
        &self.unipotent
    }

    /// log T_u. The nilpotent N of the literature is this divided by 2πi.
    pub fn log_unipotent(&self) -> &RationalMatrix {
        &self.log_unipotent
    }

    /// Characteristic polynomial as Π Φ_d^{m_d}: pairs (d, m_d).
    pub fn cyclotomic_factors(&self) -> &[(u64, usize)] {
        &self.factors
    }

    pub fn is_unipotent(&self) -> bool {
        self.ell == 1
    }

    pub fn weight_filtration(&self, center: i64) -> Result<WeightFiltration> {
        weight_filtration(&self.log_unipotent, center)
    }
}

/// Residue rotation multiset of the Deligne extension for `branch`, sorted.
pub fn residue_rotations(t: &MonodromyOperator, branch: BranchOfLog) -> Vec<RotationNumber> {
    let mut out: Vec<RotationNumber> = eigen_rotations(&t.semisimple)
        .expect("semisimple part of a quasi-unipotent operator has finite order")
        .iter()
        .map(|r| branch.view(r))
        .collect();
    out.sort();
    out
}

/// Exponent-labelled frame of the lower Deligne extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedFrame {
    ell: u64,
    labels: Vec<u64>,
    nilpotent: RationalMatrix,
}

impl TwistedFrame {
    /// `labels[j] = k_j` with 0 ≤ k_j < ℓ. A missing nilpotent part means log T_u = 0.
    pub fn new(ell: u64, labels: Vec<u64>, nilpotent: Option<RationalMatrix>) -> Result<Self> {
        if ell == 0 {
            return Err(Error::validation("ell", "must be positive"));
        }
        if let Some(k) = labels.iter().find(|&&k| k >= ell) {
            return Err(Error::validation("labels", format!("label {k} is not below ell = {ell}")));
        }
        let r = labels.len();
        let nilpotent = nilpotent.unwrap_or_else(|| RationalMatrix::zeros(r, r));
        if nilpotent.rows() != r || nilpotent.cols() != r {
            return Err(Error::Dimension(format!("nilpotent part must be {r}x{r}")));
        }
        if !nilpotent.pow(r as u32).is_zero() {
            return Err(Error::validation("nilpotent", "frame nilpotent part is not nilpotent"));
        }
        Ok(TwistedFrame { ell, labels, nilpotent })
    }

    /// Builds the frame from a monodromy operator whose semisimple part has
    /// eigenvalues ±1, so that its eigenvectors are rational. Returns the
    /// frame and the matrix whose columns are the frame vectors.
    pub fn from_monodromy(op: &MonodromyOperator) -> Result<(Self, RationalMatrix)> {
        let rotations = eigen_rotations(op.semisimple())?;
        if rotations.iter().any(|r| r.order() > 2.into()) {
            return Err(Error::NotApplicable(
                "semisimple part has eigenvalues other than ±1; supply the frame directly".into(),
            ));
        }
        let n = op.matrix().rows();
        let id = RationalMatrix::identity(n);
        let plus = (op.semisimple() - &id).kernel();
        let minus = (op.semisimple() + &id).kernel();
        let ell = if minus.is_empty() { 1 } else { 2 };
        let mut labels = vec![0; plus.len()];
        labels.extend(std::iter::repeat(1).take(minus.len()));
        let mut columns = plus;
        columns.extend(minus);
        let basis = RationalMatrix::from_columns(n, &columns);
        let nilpotent = &(&basis.inverse()? * op.log_unipotent()) * &basis;
        Ok((TwistedFrame::new(ell, labels, Some(nilpotent))?, basis))
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn nilpotent(&self) -> &RationalMatrix {
        &self.nilpotent
    }

    /// k_j/ℓ as a rotation number.
    pub fn label_rotation(&self, j: usize) -> RotationNumber {
        RotationNumber::from_ratio(self.labels[j] as i64, self.ell as i64)
    }

    /// Rotation multiset of T_s on the whole frame.
    pub fn rotations(&self) -> Vec<RotationNumber> {
        let mut out: Vec<_> = (0..self.rank()).map(|j| self.label_rotation(j)).collect();
        out.sort();
        out
    }
}

/// σ = Σ_j f_j(q) ẽ_j with every f_j known modulo q^D.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedFrameSection {
    coefficients: Vec<Vec<Rational>>,
    truncation: usize,
}

impl TwistedFrameSection {
    /// `coefficients[j]` lists f_j from the constant term up; shorter lists are
    /// padded with zeros up to the truncation degree D.
    pub fn new(coefficients: Vec<Vec<Rational>>, truncation: usize) -> Result<Self> {
        if truncation == 0 {
            return Err(Error::validation("truncation", "must be positive"));
        }
        let mut coefficients = coefficients;
        for (j, f) in coefficients.iter_mut().enumerate() {
            if f.len() > truncation {
                return Err(Error::validation(
                    format!("coefficients[{j}]"),
                    format!("{} terms exceed the truncation degree {truncation}", f.len()),
                ));
            }
            f.resize(truncation, Rational::zero());
        }
        Ok(TwistedFrameSection { coefficients, truncation })
    }

    /// The frame element ẽ_j of a rank `r` frame.
    pub fn frame_element(r: usize, j: usize, truncation: usize) -> Self {
        let mut coefficients = vec![Vec::new(); r];
        coefficients[j] = vec![Rational::from_integer(1.into())];
        Self::new(coefficients, truncation).expect("valid frame element")
    }

    /// A section with constant coefficients.
    pub fn constant(values: &[Rational], truncation: usize) -> Self {
        Self::new(values.iter().map(|v| vec![v.clone()]).collect(), truncation).expect("valid constant section")
    }

    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn coefficients(&self) -> &[Vec<Rational>] {
        &self.coefficients
    }

    /// σ(0) in the frame basis.
    pub fn value_at_zero(&self) -> Vec<Rational> {
        self.coefficients.iter().map(|f| f[0].clone()).collect()
    }

    /// σ − μ·τ.
    pub fn sub_scaled(&self, other: &Self, mu: &Rational) -> Self {
        let coefficients = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(f, g)| f.iter().zip(g).map(|(a, b)| a - mu * b).collect())
            .collect();
        TwistedFrameSection {
            coefficients,
            truncation: self.truncation,
        }
    }

    /// u(q)·σ modulo q^D for a power series u.
    pub fn mul_series(&self, u: &[Rational]) -> Self {
        let d = self.truncation;
        let coefficients = self
            .coefficients
            .iter()
            .map(|f| {
                (0..d)
                    .map(|m| (0..=m).filter(|&i| i < u.len()).map(|i| &u[i] * &f[m - i]).sum())
                    .collect()
            })
            .collect();
        TwistedFrameSection {
            coefficients,
            truncation: d,
        }
    }

    /// All coefficients in one vector, frame index major.
    pub fn flatten(&self) -> Vec<Rational> {
        self.coefficients.iter().flatten().cloned().collect()
    }
}

fn check_section(sigma: &TwistedFrameSection, frame: &TwistedFrame) -> Result<()> {
    if sigma.rank() != frame.rank() {
        return Err(Error::Dimension(format!(
            "section has {} coefficients but the frame has rank {}",
            sigma.rank(),
            frame.rank()
        )));
    }
    if (sigma.truncation() as u64) < frame.ell() {
        return Err(Error::InsufficientPrecision(format!(
            "truncation degree {} is below ell = {}",
            sigma.truncation(),
            frame.ell()
        )));
    }
    Ok(())
}

/// Smallest label k_j among the frame indices with f_j(0) ≠ 0.
fn leading_label(sigma: &TwistedFrameSection, frame: &TwistedFrame) -> Option<u64> {
    sigma
        .coefficients
        .iter()
        .zip(&frame.labels)
        .filter(|(f, _)| !f[0].is_zero())
        .map(|(_, &k)| k)
        .min()
}

/// κ(σ) = min{k_j : f_j(0) ≠ 0}/ℓ, the largest exponent with t^{−k}ρ*σ regular.
pub fn elementary_exponent(sigma: &TwistedFrameSection, frame: &TwistedFrame) -> Result<RotationNumber> {
    check_section(sigma, frame)?;
    let k = leading_label(sigma, frame)
        .ok_or_else(|| Error::Precondition("section vanishes at the origin".into()))?;
    Ok(RotationNumber::from_ratio(k as i64, frame.ell() as i64))
}

/// An element θ_j of an adapted basis with its exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedSection {
    pub section: TwistedFrameSection,
    /// Integer label a_j; the exponent is a_j/ℓ.
    pub label: u64,
    pub exponent: RotationNumber,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentReport {
    /// Sorted exponent multiset.
    pub exponents: Vec<RotationNumber>,
    /// θ_1…θ_h in input order.
    pub adapted: Vec<AdaptedSection>,
}

impl ExponentReport {
    /// Exponents of θ_{h+1}, θ_{h+2}, …: the graded piece when the first `h`
    /// inputs span the smaller step of a flag.
    pub fn graded_exponents(&self, h: usize) -> Vec<RotationNumber> {
        let mut out: Vec<_> = self.adapted[h.min(self.adapted.len())..]
            .iter()
            .map(|a| a.exponent.clone())
            .collect();
        out.sort();
        out
    }
}

/// Leading vector of ρ*σ restricted to the frame indices with label `a`.
fn leading_block(sigma: &TwistedFrameSection, frame: &TwistedFrame, a: u64) -> Vec<Rational> {
    frame
        .labels
        .iter()
        .enumerate()
        .filter(|(_, &k)| k == a)
        .map(|(j, _)| sigma.coefficients[j][0].clone())
        .collect()
}

/// Coefficients μ with Σ μ_i b_i = v, if v lies in the span of the b_i
/// (assumed independent).
fn solve_in_span(dim: usize, basis: &[Vec<Rational>], v: &[Rational]) -> Option<Vec<Rational>> {
    if v.iter().all(Zero::is_zero) {
        return Some(vec![Rational::zero(); basis.len()]);
    }
    if basis.is_empty() {
        return None;
    }
    let mut cols = basis.to_vec();
    cols.push(v.to_vec());
    let m = RationalMatrix::from_columns(dim, &cols);
    let last = basis.len();
    m.kernel().into_iter().find(|x| !x[last].is_zero()).map(|x| {
        let s = x[last].clone();
        x[..last].iter().map(|c| -c / &s).collect()
    })
}

/// Adapted basis θ_1…θ_h of the span of σ_1…σ_h: each σ is corrected by
/// σ ← σ − Σ_{j∈J} μ_j θ_j while its leading vector lies in the span of the
/// leading vectors of earlier θ_j with the same exponent. Each correction
/// strictly raises the exponent, so the loop ends after fewer than ℓ rounds.
pub fn adapt_basis(sections: &[TwistedFrameSection], frame: &TwistedFrame) -> Result<ExponentReport> {
    for s in sections {
        check_section(s, frame)?;
    }
    let r = frame.rank();
    let values: Vec<Vec<Rational>> = sections.iter().map(TwistedFrameSection::value_at_zero).collect();
    if span_dim(r, &values) != sections.len() {
        return Err(Error::Precondition("initial values of the sections are linearly dependent".into()));
    }
    let mut adapted: Vec<AdaptedSection> = Vec::with_capacity(sections.len());
    for sigma in sections {
        let mut s = sigma.clone();
        let mut rounds = 0;
        loop {
            let a = leading_label(&s, frame)
                .ok_or_else(|| Error::Precondition("corrected section vanishes at the origin".into()))?;
            let lead = leading_block(&s, frame, a);
            let peers: Vec<usize> = (0..adapted.len()).filter(|&i| adapted[i].label == a).collect();
            let basis: Vec<Vec<Rational>> = peers
                .iter()
                .map(|&i| leading_block(&adapted[i].section, frame, a))
                .collect();
            match solve_in_span(lead.len(), &basis, &lead) {
                None => {
                    adapted.push(AdaptedSection {
                        section: s,
                        label: a,
                        exponent: RotationNumber::from_ratio(a as i64, frame.ell() as i64),
                    });
                    break;
                }
                Some(mu) => {
                    for (&i, m) in peers.iter().zip(&mu) {
                        if !m.is_zero() {
                            s = s.sub_scaled(&adapted[i].section, m);
                        }
                    }
                }
            }
            rounds += 1;
            if rounds > frame.ell() {
                return Err(Error::InsufficientPrecision(
                    "exponent correction did not terminate within ell rounds".into(),
                ));
            }
        }
    }
    let mut exponents: Vec<_> = adapted.iter().map(|a| a.exponent.clone()).collect();
    exponents.sort();
    Ok(ExponentReport { exponents, adapted })
}

/// Compares an exponent multiset with a T_s rotation multiset.
pub fn exponents_vs_eigenvalues_check(exponents: &[RotationNumber], rotations: &[RotationNumber]) -> Result<bool> {
    if exponents.len() != rotations.len() {
        return Err(Error::Dimension(format!(
            "{} exponents against {} rotations",
            exponents.len(),
            rotations.len()
        )));
    }
    let mut a = exponents.to_vec();
    let mut b = rotations.to_vec();
    a.sort();
    b.sort();
    Ok(a == b)
}

/// Exponents of the upper extension on the top Hodge piece: each root of
/// unity exp(2πi·u) contributes u. Input rotations use the stored (lower)
/// convention.
pub fn upper_extension_exponents(rotations: &[RotationNumber]) -> Vec<RotationNumber> {
    let mut out: Vec<_> = rotations.iter().map(|r| BranchOfLog::Upper.view(r)).collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::int;

    fn sec(rows: &[&[i64]], d: usize) -> TwistedFrameSection {
        TwistedFrameSection::new(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect(), d).unwrap()
    }

    fn rot(a: i64, b: i64) -> RotationNumber {
        RotationNumber::from_ratio(a, b)
    }

    #[test]
    fn residue_examples() {
        let u = MonodromyOperator::new(RationalMatrix::from_i64(&[&[1, 1], &[0, 1]])).unwrap();
        assert_eq!(residue_rotations(&u, BranchOfLog::Lower), vec![RotationNumber::zero(); 2]);
        let t = MonodromyOperator::new(RationalMatrix::from_i64(&[&[0, -1], &[1, 0]])).unwrap();
        assert_eq!(residue_rotations(&t, BranchOfLog::Lower), vec![rot(1, 4), rot(3, 4)]);
        assert_eq!(residue_rotations(&t, BranchOfLog::Upper), vec![rot(1, 4), rot(3, 4)]);
        assert_eq!(BranchOfLog::Upper.view(&rot(3, 4)), rot(1, 4));
    }

    #[test]
    fn exponent_examples() {
        let frame = TwistedFrame::new(2, vec![0, 1], None).unwrap();
        assert_eq!(elementary_exponent(&sec(&[&[1], &[1]], 2), &frame).unwrap(), rot(0, 1));
        assert_eq!(elementary_exponent(&sec(&[&[0, 1], &[1]], 2), &frame).unwrap(), rot(1, 2));
        assert_eq!(elementary_exponent(&TwistedFrameSection::frame_element(2, 1, 2), &frame).unwrap(), rot(1, 2));
        assert!(elementary_exponent(&sec(&[&[0, 1], &[0]], 2), &frame).is_err());
        let short = sec(&[&[1], &[1]], 1);
        assert!(matches!(elementary_exponent(&short, &frame), Err(Error::InsufficientPrecision(_))));
    }

    #[test]
    fn adapt_examples() {
        let frame = TwistedFrame::new(2, vec![0, 1], None).unwrap();
        let report = adapt_basis(&[sec(&[&[1], &[1]], 4), sec(&[&[1], &[-1]], 4)], &frame).unwrap();
        assert_eq!(report.exponents, vec![rot(0, 1), rot(1, 2)]);
        assert_eq!(report.adapted[1].section, sec(&[&[0], &[-2]], 4));

        let frame3 = TwistedFrame::new(2, vec![0, 0, 1], None).unwrap();
        let report = adapt_basis(&[sec(&[&[1], &[0], &[0]], 2), sec(&[&[0], &[1], &[1]], 2)], &frame3).unwrap();
        assert_eq!(report.exponents, vec![rot(0, 1), rot(0, 1)]);

        let id: Vec<_> = (0..3).map(|j| TwistedFrameSection::frame_element(3, j, 2)).collect();
        let report = adapt_basis(&id, &frame3).unwrap();
        assert_eq!(report.exponents, frame3.rotations());
        assert_eq!(report.adapted.iter().map(|a| a.section.clone()).collect::<Vec<_>>(), id);

        let dependent = [sec(&[&[1], &[1]], 2), sec(&[&[2], &[2]], 2)];
        assert!(adapt_basis(&dependent, &frame).is_err());
    }

    #[test]
    fn eigenvalue_check_examples() {
        assert!(exponents_vs_eigenvalues_check(&[rot(0, 1), rot(1, 2)], &[rot(1, 2), rot(0, 1)]).unwrap());
        assert!(exponents_vs_eigenvalues_check(&[rot(0, 1)], &[rot(0, 1)]).unwrap());
        assert!(!exponents_vs_eigenvalues_check(&[rot(1, 4)], &[rot(1, 2)]).unwrap());
        assert!(exponents_vs_eigenvalues_check(&[rot(1, 4)], &[]).is_err());
    }

    #[test]
    fn upper_examples() {
        assert_eq!(upper_extension_exponents(&[RotationNumber::zero()]), vec![RotationNumber::zero()]);
        // exp(2πi/3) is stored as 2/3 in the lower convention.
        assert_eq!(upper_extension_exponents(&[rot(2, 3)]), vec![rot(1, 3)]);
        assert_eq!(upper_extension_exponents(&[rot(1, 2)]), vec![rot(1, 2)]);
    }

    #[test]
    fn frame_from_involution() {
        let t = RationalMatrix::from_i64(&[&[-1, 0, 0], &[0, 1, 1], &[0, 0, 1]]);
        let op = MonodromyOperator::new(t).unwrap();
        let (frame, basis) = TwistedFrame::from_monodromy(&op).unwrap();
        assert_eq!(frame.ell(), 2);
        assert_eq!(frame.rotations(), vec![rot(0, 1), rot(0, 1), rot(1, 2)]);
        let back = &(&basis * frame.nilpotent()) * &basis.inverse().unwrap();
        assert_eq!(&back, op.log_unipotent());
        let order4 = MonodromyOperator::new(RationalMatrix::from_i64(&[&[0, -1], &[1, 0]])).unwrap();
        assert!(TwistedFrame::from_monodromy(&order4).is_err());
    }
}
