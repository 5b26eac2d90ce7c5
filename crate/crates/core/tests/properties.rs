mod common;

use bcov_core::exactalg::{
    chevalley_decompose, cyclotomic, format_rational, int, is_unipotent, nilpotent_exp, nilpotent_log, parse_rational,
    rat, weight_filtration, PolynomialQ, RationalMatrix, RotationNumber,
};
use bcov_core::hodgemetrics::{exterior_power, l2_gram};
use bcov_core::lmhs::{beta, beta_symmetry_check, DegreeData, LimitingMHS};
use bcov_core::monodromy::{
    adapt_basis, elementary_exponent, residue_rotations, BranchOfLog, MonodromyOperator, TwistedFrameSection,
};
use bcov_core::strata::liu_xia_identity_check;
use proptest::prelude::*;
use rand::Rng;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        ..ProptestConfig::default()
    }
}

fn companion(p: &PolynomialQ) -> RationalMatrix {
    let d = p.degree().unwrap();
    let mut m = RationalMatrix::zeros(d, d);
    for i in 1..d {
        m.set(i, i - 1, int(1));
    }
    for i in 0..d {
        m.set(i, d - 1, -p.coeff(i));
    }
    m
}

/// P·(S ⊗ [[1,1],[0,1]])·P⁻¹ with S a companion of Φ_d, doubled when `jordan`.
fn quasi_unipotent(rng: &mut impl Rng, d: u64, jordan: bool) -> RationalMatrix {
    let c = companion(&cyclotomic(d));
    let k = c.rows();
    let m = if jordan {
        let mut m = RationalMatrix::zeros(2 * k, 2 * k);
        for i in 0..k {
            for j in 0..k {
                m.set(i, j, c.get(i, j).clone());
                m.set(i, k + j, c.get(i, j).clone());
                m.set(k + i, k + j, c.get(i, j).clone());
            }
        }
        m
    } else {
        c
    };
    let p = common::random_invertible(rng, m.rows(), 1);
    &(&p * &m) * &p.inverse().unwrap()
}

proptest! {
    #![proptest_config(cases(48))]

    #[test]
    fn chevalley_parts_commute_and_multiply_back(seed in any::<u64>(), d in 1u64..=6, jordan in any::<bool>()) {
        let mut rng = common::rng(seed);
        let m = quasi_unipotent(&mut rng, d, jordan);
        let (s, u) = chevalley_decompose(&m).unwrap();
        prop_assert_eq!(&s * &u, m.clone());
        prop_assert_eq!(&s * &u, &u * &s);
        prop_assert!(is_unipotent(&u));
        prop_assert_eq!(u.is_identity(), !jordan);
        // S has finite order d
        prop_assert!(s.pow(d as u32).is_identity());
    }

    #[test]
    fn exp_inverts_log(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = common::rng(seed);
        let mut strict = common::random_int_matrix(&mut rng, n, n, 3);
        for i in 0..n {
            for j in 0..=i {
                strict.set(i, j, int(0));
            }
        }
        let p = common::random_invertible(&mut rng, n, 1);
        let u = &(&p * &(&RationalMatrix::identity(n) + &strict)) * &p.inverse().unwrap();
        let l = nilpotent_log(&u).unwrap();
        prop_assert_eq!(nilpotent_exp(&l).unwrap(), u);
        prop_assert_eq!(nilpotent_log(&nilpotent_exp(&l).unwrap()).unwrap(), l);
    }

    #[test]
    fn weight_filtration_is_symmetric_and_lowered_by_n(seed in any::<u64>(), n in 1usize..=5, center in -2i64..=4) {
        let mut rng = common::rng(seed);
        let mut strict = common::random_int_matrix(&mut rng, n, n, 2);
        for i in 0..n {
            for j in 0..=i {
                strict.set(i, j, int(0));
            }
        }
        let w = weight_filtration(&strict, center).unwrap();
        prop_assert_eq!(w.graded.values().sum::<usize>(), n);
        for (&k, &dim) in &w.graded {
            prop_assert_eq!(w.dim(2 * center - k), dim);
        }
        // N·W_k ⊂ W_{k−2}
        for (&k, basis) in &w.subspaces {
            let below = w.subspaces.get(&(k - 2)).cloned().unwrap_or_default();
            for v in basis {
                let image = strict.mul_vec(v);
                let mut cols = below.clone();
                let before = bcov_core::exactalg::span_dim(n, &cols);
                cols.push(image);
                prop_assert_eq!(bcov_core::exactalg::span_dim(n, &cols), before);
            }
        }
    }

    #[test]
    fn rotation_conjugation_is_an_involution(num in -50i64..50, den in 1i64..30) {
        let r = RotationNumber::from_ratio(num, den);
        prop_assert_eq!(r.conjugate().conjugate(), r.clone());
        prop_assert_eq!(BranchOfLog::Upper.view(&r), r.conjugate());
        prop_assert_eq!(BranchOfLog::Lower.view(&r), r.clone());
        let sum = r.value() + r.conjugate().value();
        prop_assert!(sum == int(0) || sum == int(1));
    }

    #[test]
    fn rationals_round_trip_through_text(num in any::<i64>(), den in 1i64..=i64::MAX) {
        let r = rat(num, den);
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn beta_is_antisymmetric(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = common::rng(seed);
        let k = rng.gen_range(0..=2 * n);
        let table = common::random_deligne_table(&mut rng, k, n);
        let mut degrees = std::collections::BTreeMap::new();
        degrees.insert(k, DegreeData::trivial(table));
        let mhs = LimitingMHS::new(n, degrees).unwrap();
        for p in k.saturating_sub(n)..=k.min(n) {
            prop_assert_eq!(beta(&mhs, p, k - p).unwrap(), -beta(&mhs, k - p, p).unwrap());
        }
        prop_assert!(beta_symmetry_check(&mhs).antisymmetry);
    }

    #[test]
    fn exponents_are_unchanged_by_units(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let c = common::random_frame_case(&mut rng);
        let d = c.sections[0].truncation();
        let mut unit: Vec<_> = (0..d).map(|_| int(rng.gen_range(-3..=3))).collect();
        unit[0] = int(rng.gen_range(1..=4));
        for s in &c.sections {
            let e = elementary_exponent(s, &c.frame).unwrap();
            prop_assert_eq!(elementary_exponent(&s.mul_series(&unit), &c.frame).unwrap(), e.clone());
            prop_assert!(*e.value() < int(1));
        }
        // reordering the sections permutes nothing in the multiset
        let mut reversed = c.sections.clone();
        reversed.reverse();
        prop_assert_eq!(
            adapt_basis(&reversed, &c.frame).unwrap().exponents,
            adapt_basis(&c.sections, &c.frame).unwrap().exponents
        );
    }

    #[test]
    fn frame_elements_carry_their_labels(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let c = common::random_frame_case(&mut rng);
        for j in 0..c.frame.rank() {
            let e = TwistedFrameSection::frame_element(c.frame.rank(), j, c.frame.ell() as usize);
            prop_assert_eq!(elementary_exponent(&e, &c.frame).unwrap(), c.frame.label_rotation(j));
        }
    }

    #[test]
    fn residue_rotations_are_galois_closed(seed in any::<u64>(), d in 1u64..=8) {
        let mut rng = common::rng(seed);
        let m = quasi_unipotent(&mut rng, d, false);
        let op = MonodromyOperator::new(m).unwrap();
        let lower = residue_rotations(&op, BranchOfLog::Lower);
        let upper = residue_rotations(&op, BranchOfLog::Upper);
        prop_assert_eq!(lower, upper);
    }

    #[test]
    fn liu_xia_identities_hold(seed in any::<u64>(), r in 3usize..=6) {
        let mut rng = common::rng(seed);
        let t = common::random_liu_xia_tensor(&mut rng, r);
        let report = liu_xia_identity_check(&t, true).unwrap();
        prop_assert!(report.holds, "{:?}", report);
    }
}

proptest! {
    #![proptest_config(cases(12))]

    #[test]
    fn compound_matrices_are_multiplicative(seed in any::<u64>(), n in 1usize..=4, k in 0usize..=4) {
        prop_assume!(k <= n);
        let mut rng = common::rng(seed);
        let a = common::random_int_matrix(&mut rng, n, n, 3);
        let b = common::random_int_matrix(&mut rng, n, n, 3);
        prop_assert_eq!(
            exterior_power(&(&a * &b), k).unwrap(),
            &exterior_power(&a, k).unwrap() * &exterior_power(&b, k).unwrap()
        );
    }

    #[test]
    fn complex_structure_is_an_isometry(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = common::rng(seed);
        let t = common::random_torus(&mut rng, n);
        for k in 0..=2 * n {
            let g = l2_gram(&t, k).unwrap();
            let jk = exterior_power(t.complex_structure(), k).unwrap();
            prop_assert_eq!(&(&jk * &g) * &jk.transpose(), g);
        }
    }
}
