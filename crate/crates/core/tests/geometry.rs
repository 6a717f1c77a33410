use proptest::prelude::*;
use satcov::{cap_area, limited_visibility, partial_cap_area, NetworkConfig};

proptest! {
    #[test]
    fn cap_area_matches_zone_formula(h in 100.0f64..5000.0, re in 6000.0f64..6500.0) {
        let c = NetworkConfig::with_altitude(h).with_earth_radius(re);
        let rs = re + h;
        let a = cap_area(&c).unwrap();
        prop_assert!((a - 2.0 * std::f64::consts::PI * (rs - re) * rs).abs() <= 1e-12 * a);
        let cap = c.cap().unwrap();
        prop_assert!((cap.r_max - (rs * rs - re * re).sqrt()).abs() < 1e-9 * cap.r_max);
    }

    #[test]
    fn partial_area_is_linear_in_squared_distance(h in 200.0f64..2000.0, t in 0.0f64..1.0, psi_deg in 0.0f64..60.0) {
        let c = NetworkConfig::with_altitude(h).with_min_elevation(psi_deg.to_radians());
        let cap = c.cap().unwrap();
        let r = cap.r_min + t * (cap.r_max - cap.r_min);
        let a = partial_cap_area(r, &c).unwrap();
        let expect = c.area_per_squared_distance() * (r * r - cap.r_min * cap.r_min);
        prop_assert!((a - expect).abs() <= 1e-9 * cap.area);
        prop_assert!(a <= cap.area * (1.0 + 1e-12));
    }

    #[test]
    fn elevation_mask_shrinks_the_cap(h in 200.0f64..2000.0, lo in 0.0f64..40.0, step in 0.5f64..40.0) {
        let c = NetworkConfig::with_altitude(h);
        let a = limited_visibility(&c, lo.to_radians()).unwrap();
        let b = limited_visibility(&c, (lo + step).to_radians()).unwrap();
        prop_assert!(b.r_max < a.r_max && b.area < a.area);
        prop_assert_eq!(a.r_min, b.r_min);
    }
}
