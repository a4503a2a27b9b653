use proptest::prelude::*;

use quadrom_core::algebra::{format_rat, parse_rat, rat, rat_int, BivarPoly, CRat, Laurent, LaurentPoly, TrigLaurent};
use quadrom_core::moments::{moment_exact, poisson_bracket};
use quadrom_core::operators::intertwiner::{power_x_intertwiner, DihedralIntertwiner};
use quadrom_core::ConformalMap;

fn small_rat() -> impl Strategy<Value = quadrom_core::Rat> {
    (-20i64..=20, 1i64..=9).prop_map(|(n, d)| rat(n, d))
}

fn crat() -> impl Strategy<Value = CRat> {
    (small_rat(), small_rat()).prop_map(|(re, im)| CRat::new(re, im))
}

fn poly(max_deg: u32) -> impl Strategy<Value = BivarPoly> {
    prop::collection::vec((0..=max_deg, 0..=max_deg, crat()), 0..6).prop_map(BivarPoly::from_terms)
}

fn homogeneous(d: u32) -> impl Strategy<Value = BivarPoly> {
    prop::collection::vec((0..=d, crat()), 1..4).prop_map(move |t| BivarPoly::from_terms(t.into_iter().map(|(a, c)| (a, d - a, c))))
}

fn laurent() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((-4i64..=4, crat()), 0..5).prop_map(Laurent::from_terms)
}

fn map() -> impl Strategy<Value = ConformalMap> {
    (crat(), 1i64..=8, prop::collection::vec(crat(), 0..3)).prop_map(|(z1, r, u)| {
        let u = u.into_iter().map(|c| c.scale(&rat(1, 40))).collect();
        ConformalMap::new(z1.scale(&rat(1, 10)), rat(r, 4), u).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_text_round_trip(r in small_rat()) {
        prop_assert_eq!(parse_rat(&format_rat(&r)).unwrap(), r);
    }

    #[test]
    fn conjugation_is_an_involution(p in poly(4), q in poly(3)) {
        prop_assert_eq!(p.conj().conj(), p.clone());
        prop_assert_eq!((&p * &q).conj(), &p.conj() * &q.conj());
    }

    #[test]
    fn zbar_antiderivative_inverts_derivative(p in poly(5)) {
        prop_assert_eq!(p.antiderivative_zbar().d_zbar(), p);
    }

    #[test]
    fn recentering_preserves_values(p in poly(4), c in crat(), z in crat()) {
        let shifted = p.recentered(&c);
        prop_assert_eq!(shifted.eval_at(&(&z - &c)), p.eval_at(&z));
    }

    #[test]
    fn residue_of_derivative_vanishes(f in laurent()) {
        prop_assert!(f.derivative().residue().is_zero());
    }

    #[test]
    fn laurent_product_degree_adds(f in laurent(), g in laurent()) {
        prop_assume!(!f.is_zero() && !g.is_zero());
        let h = &f * &g;
        prop_assert_eq!(h.max_power(), Some(f.max_power().unwrap() + g.max_power().unwrap()));
        prop_assert_eq!(h.min_power(), Some(f.min_power().unwrap() + g.min_power().unwrap()));
    }

    #[test]
    fn trig_form_round_trip((d, p) in (0u32..6).prop_flat_map(|d| (Just(d), homogeneous(d))), unit in 1u32..4) {
        let p = BivarPoly::from_terms(
            p.terms().filter(|(m, _)| (m.a as i64 - m.b as i64) % unit as i64 == 0).map(|(m, c)| (m.a, m.b, c.clone())),
        );
        let t = TrigLaurent::from_homogeneous(&p, d, unit).unwrap();
        prop_assert_eq!(t.to_bivar().unwrap(), p);
    }

    #[test]
    fn operator_conjugation_commutes(n in 1u32..=3, x1 in small_rat(), p in poly(3)) {
        let t = power_x_intertwiner(n, &x1).unwrap();
        prop_assert_eq!(t.apply(&p).conj(), t.conj().apply(&p.conj()));
    }

    #[test]
    fn dihedral_images_are_homogeneous(n in 1u32..=3, l in 0u32..=2, m in 1u32..=3, p in 0u32..4) {
        prop_assume!(n > l);
        let t = DihedralIntertwiner::assemble(n, l, m).unwrap();
        let image = t.apply_power(p).unwrap();
        prop_assert!(image.is_homogeneous(m * (n + l) + p), "{}", image);
    }

    #[test]
    fn moments_are_linear(m in map(), p in poly(3), q in poly(3), c in crat()) {
        let eta = BivarPoly::one();
        let lhs = moment_exact(&m, &eta, &(&p.scale(&c) + &q));
        let rhs = &(&moment_exact(&m, &eta, &p) * &c) + &moment_exact(&m, &eta, &q);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn quadratic_map_area(r in 1i64..=8, u in crat()) {
        let (r, u) = (rat(r, 4), u.scale(&rat(1, 40)));
        let m = ConformalMap::new(CRat::zero(), r.clone(), vec![u.clone()]).unwrap();
        let area = moment_exact(&m, &BivarPoly::one(), &BivarPoly::one());
        prop_assert_eq!(area, CRat::real(&r * &r + u.norm_sqr() * rat_int(2)));
    }

    #[test]
    fn bracket_is_hermitian(m in map(), rdot in small_rat(), udot in prop::collection::vec(crat(), 2)) {
        let z = m.laurent();
        let mut coeffs = vec![CRat::real(rdot)];
        coeffs.extend(udot.into_iter().take(m.degree() - 1));
        let z_dot = Laurent::from_terms(coeffs.into_iter().enumerate().map(|(k, c)| (k as i64 + 1, c)));
        let b = poisson_bracket(&z, &z_dot, &z.reflect(), &z_dot.reflect());
        prop_assert_eq!(b.reflect(), b);
    }
}
