use proptest::prelude::*;

use super::*;
use crate::chow::{degree_functional, dp_degree, dp_ring, fy_ring, DegreeFunctional};
use crate::fan::bergman_fan;
use crate::linalg::ratio;
use crate::polytope::nestohedron_support;

fn building(table: &[u32]) -> BuildingSet {
    BuildingSet::maximal(&Polymatroid::new(table.to_vec()).unwrap())
}

fn fixtures() -> Vec<BuildingSet> {
    [
        vec![0, 2],
        vec![0, 1, 2, 2],
        vec![0, 2, 2, 3],
        vec![0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 3],
        vec![0, 2, 2, 4],
    ]
    .iter()
    .map(|t| building(t))
    .collect()
}

struct Setup {
    fy: GradedRing,
    deg: DegreeFunctional,
    ell: PlFunction,
    class: IntPoly,
}

fn setup(g: &BuildingSet) -> Setup {
    let fy = fy_ring(g).unwrap();
    let deg = degree_functional(&fy, &bergman_fan(g).unwrap()).unwrap();
    assert!(deg.consistent);
    let ell = nestohedron_class(g).unwrap();
    let class = ell.class(&fy).unwrap();
    Setup { fy, deg, ell, class }
}

#[test]
fn boolean_closure_adds_singletons_and_unions() {
    let c = boolean_closure(4, &[0b0011, 0b0110, 0b1111]);
    assert_eq!(c, vec![0b0001, 0b0010, 0b0100, 0b1000, 0b0011, 0b0110, 0b0111, 0b1111]);
}

#[test]
fn projective_line() {
    let g = building(&[0, 2]);
    let s = setup(&g);
    assert_eq!(s.ell.value_on(0b01), Some(&rat(1)));
    assert_eq!(s.ell.value_on(0b10), Some(&rat(1)));
    let y_top = s.fy.var(s.fy.var_of(0b11).unwrap());
    assert_eq!(s.class, s.fy.normal_form(&y_top.scale(&BigInt::from(-2))));
    assert_eq!(s.deg.degree(&s.fy, &s.class), rat(2));
    let hl = hard_lefschetz_check(&s.fy, &s.class, 0).unwrap();
    assert!(hl.ok && hl.dim == 1);
    let deg = |f: &IntPoly| s.deg.degree(&s.fy, f);
    let hr = hodge_riemann_check(&s.fy, &deg, &s.class, 0).unwrap();
    assert_eq!(hr.minors, ["2"]);
    assert!(hr.ok);
}

#[test]
fn wall_test_rejects_linear_and_concave() {
    for g in fixtures() {
        let ell = nestohedron_class(&g).unwrap();
        let zero = vec![rat(0); ell.values.len()];
        assert!(!is_strictly_convex(&ell.fan, &zero).unwrap());
        let neg: Vec<Rational> = ell.values.iter().map(|v| -v).collect();
        assert!(!is_strictly_convex(&ell.fan, &neg).unwrap());
        assert!(ell.is_validated());
    }
}

#[test]
fn incomplete_fan_is_rejected() {
    let g = building(&[0, 2, 2, 3]);
    let fan = bergman_fan(&g).unwrap();
    let values = vec![rat(1); fan.rays().len()];
    assert!(matches!(is_strictly_convex(&fan, &values), Err(Error::NotComplete)));
}

#[test]
fn support_function_is_linear_on_ambient_cones() {
    for g in fixtures() {
        let (fan, closure) = ambient_fan(&g).unwrap();
        let m = fan.ambient_dim() + 1;
        let lifted = |s: Subset| -> Vec<Rational> {
            let shift = i64::from(subset::contains(s, m - 1));
            (0..m).map(|i| rat(i64::from(subset::contains(s, i)) - shift)).collect()
        };
        for cone in fan.maximal_cones() {
            let mut w = vec![rat(0); m];
            let mut expected = rat(0);
            for (k, &r) in cone.iter().enumerate() {
                let lam = rat(k as i64 + 1);
                let v = lifted(fan.ray_subsets()[r]);
                expected += &lam * nestohedron_support(&closure, &v);
                for i in 0..m {
                    w[i] += &lam * &v[i];
                }
            }
            assert_eq!(nestohedron_support(&closure, &w), expected);
        }
    }
}

#[test]
fn bergman_fan_is_a_subfan_of_the_ambient_fan() {
    for g in fixtures() {
        let (ambient, _) = ambient_fan(&g).unwrap();
        assert!(ambient.report().ok());
        assert!(bergman_fan(&g).unwrap().cone_set().is_subset(&ambient.cone_set()));
    }
}

#[test]
fn kahler_package_on_fixtures() {
    for g in fixtures() {
        let s = setup(&g);
        let deg = |f: &IntPoly| s.deg.degree(&s.fy, f);
        let report = kahler_report(&s.fy, &deg, &s.class, s.ell.is_validated()).unwrap();
        assert!(report.ok(), "{report:?}");

        // the same class pulled back to the x presentation
        let dp = dp_ring(&g).unwrap();
        let phi = phi_map(&dp, &s.fy).unwrap();
        let pulled = pull_back_degree_one(&dp, &s.fy, &s.class).unwrap();
        assert_eq!(transport(&dp, &s.fy, &pulled).unwrap(), s.class);
        let dp_deg = dp_degree(&dp, &s.fy, &phi, &s.deg);
        let report = kahler_report(&dp, &dp_deg, &pulled, true).unwrap();
        assert!(report.ok(), "{report:?}");
    }
}

#[test]
fn rank_four_middle_degree() {
    let g = building(&[0, 2, 2, 4]);
    let s = setup(&g);
    assert_eq!(s.fy.top_degree(), 3);
    let hl = hard_lefschetz_check(&s.fy, &s.class, 1).unwrap();
    assert!(hl.ok && hl.dim == s.fy.basis()[1].len());
}

#[test]
fn primitive_part_in_degree_one() {
    let g = building(&[0, 2, 2, 3]);
    let s = setup(&g);
    let deg = |f: &IntPoly| s.deg.degree(&s.fy, f);
    let a = hodge_riemann_with(&s.fy, &deg, &s.class, 1, Pivoting::FirstNonzero).unwrap();
    let b = hodge_riemann_with(&s.fy, &deg, &s.class, 1, Pivoting::SmallestMagnitude).unwrap();
    assert_eq!(a.primitive_dim, 2);
    assert!(a.ok && b.ok);
}

#[test]
fn lefschetz_image_has_opposite_sign() {
    for g in fixtures() {
        let s = setup(&g);
        let r = s.fy.top_degree() + 1;
        if r < 3 {
            continue;
        }
        let deg = |f: &IntPoly| s.deg.degree(&s.fy, f);
        // ℓ·PP^0 sits in degree 1, where the twisted form must be negative definite
        let image: Vec<Vec<Rational>> = primitive_basis(&s.fy, &s.class, 0, Pivoting::FirstNonzero)
            .iter()
            .map(|p| {
                let mut unit = IntPoly::zero(s.fy.nvars());
                for (m, c) in s.fy.basis()[0].iter().zip(p) {
                    unit.add_scaled(&s.fy.monomial(m), &c.to_integer());
                }
                let img = s.fy.product(&unit, &s.class);
                s.fy.coordinates(&img, 1).into_iter().map(Rational::from_integer).collect()
            })
            .collect();
        let gram = twisted_gram(&s.fy, &deg, &s.class, 1, r - 3, -1, &image);
        let negated = gram.map(|x| -x);
        assert!(linalg::is_positive_definite(&negated).unwrap());
    }
}

#[test]
fn sigma_cone_classes() {
    let g = building(&[0, 2]);
    let dp = dp_ring(&g).unwrap();
    let s = setup(&g);
    let sigma = sigma_cone_class(&dp, 0b1).unwrap();
    assert_eq!(dp.render(&sigma), "-x{0}");
    let image = transport(&dp, &s.fy, &sigma).unwrap();
    assert_eq!(image.scale(&BigInt::from(2)), s.class);

    let g = building(&[0, 1, 2, 2]);
    let dp = dp_ring(&g).unwrap();
    let sigma = sigma_cone_class(&dp, 0b01).unwrap();
    assert_eq!(dp.render(&sigma), "-x{0} - x{0,1}");
    assert!(matches!(sigma_cone_class(&dp, 0b10), Err(Error::NotAMember(_))));
}

#[test]
fn beta_on_a_matroid() {
    let g = building(&[0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 3]);
    let dp = dp_ring(&g).unwrap();
    let beta = beta_class(&dp, 0).unwrap();
    // flats avoiding 0: three atoms and three rank-2 flats
    assert_eq!(beta.len(), 6);
    assert!(beta_class(&dp_ring(&building(&[0, 2])).unwrap(), 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn perturbed_classes(fixture in 0usize..5, scale in 1i64..4, noise in proptest::collection::vec(-2i64..=2, 64)) {
        let g = &fixtures()[fixture];
        let base = nestohedron_class(g).unwrap();
        let values: Vec<Rational> = base
            .values
            .iter()
            .zip(noise.iter().cycle())
            .map(|(v, d)| v * rat(scale) + ratio(*d, 7))
            .collect();
        let mut ell = PlFunction::new(base.fan.clone(), values).unwrap();
        if ell.validate().unwrap() {
            let s = setup(g);
            let class = ell.class(&s.fy).unwrap();
            let deg = |f: &IntPoly| s.deg.degree(&s.fy, f);
            let report = kahler_report(&s.fy, &deg, &class, true).unwrap();
            prop_assert!(report.ok(), "{:?}", report);
        }
    }
}
