use lhsphere::rays::{focusing_metric, refract, trace_fan, Refraction, SignedIndex, Vec2};
use lhsphere::Medium;
use proptest::prelude::*;

fn index() -> impl Strategy<Value = f64> {
    prop_oneof![0.3f64..4.0, -4.0f64..-0.3]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn snell_and_reversibility(theta in -1.5f64..1.5, phi in 0.0f64..std::f64::consts::TAU, a in index(), b in index()) {
        let normal = Vec2::new(phi.cos(), phi.sin());
        // Incident direction makes angle theta with -normal.
        let (s, c) = theta.sin_cos();
        let dir = Vec2::new(-normal.x * c - normal.y * s, -normal.y * c + normal.x * s);
        let (na, nb) = (SignedIndex::new(a).unwrap(), SignedIndex::new(b).unwrap());
        match refract(dir, normal, na, nb).unwrap() {
            Refraction::Transmitted(out) => {
                prop_assert!((out.norm() - 1.0).abs() < 1e-12);
                let residual = a * normal.cross(dir) - b * normal.cross(out);
                prop_assert!(residual.abs() < 1e-10, "{}", residual);
                // Sending the ray back through the interface recovers the original.
                match refract(-out, -normal, nb, na).unwrap() {
                    Refraction::Transmitted(back) => prop_assert!((back + dir).norm() < 1e-10),
                    Refraction::TotalInternalReflection => prop_assert!(false, "reverse ray reflected"),
                }
            }
            Refraction::TotalInternalReflection => {
                prop_assert!((a / b * s).abs() > 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn paths_depend_only_on_signed_index(eps in 0.5f64..6.0, mu in 0.5f64..3.0, k in 0.2f64..5.0, lh in any::<bool>()) {
        let sign = if lh { -1.0 } else { 1.0 };
        let a = Medium::real(sign * eps, sign * mu).unwrap();
        let b = Medium::real(sign * eps * k, sign * mu / k).unwrap();
        let pa = trace_fan(Vec2::new(1.7, 0.2), &a, &Medium::vacuum(), 9, 6).unwrap();
        let pb = trace_fan(Vec2::new(1.7, 0.2), &b, &Medium::vacuum(), 9, 6).unwrap();
        for (x, y) in pa.iter().zip(&pb) {
            prop_assert_eq!(x.termination, y.termination);
            for (p, q) in x.points.iter().zip(&y.points) {
                prop_assert!((*p - *q).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn interface_vertices_lie_on_the_sphere() {
    for interior in [
        Medium::real(4.0, 1.05).unwrap(),
        Medium::real(-4.0, -1.05).unwrap(),
        Medium::real(-9.0, -1.0).unwrap(),
    ] {
        for path in trace_fan(Vec2::new(1.5, 0.0), &interior, &Medium::vacuum(), 61, 8).unwrap() {
            for e in &path.events {
                assert!((e.point.norm() - 1.0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn lh_fan_focuses_and_rh_fan_spreads() {
    let source = Vec2::new(1.5, 0.0);
    let rh = trace_fan(source, &Medium::real(4.0, 1.05).unwrap(), &Medium::vacuum(), 61, 8).unwrap();
    let lh = trace_fan(source, &Medium::real(-4.0, -1.05).unwrap(), &Medium::vacuum(), 61, 8).unwrap();
    let (m_rh, m_lh) = (focusing_metric(&rh).unwrap(), focusing_metric(&lh).unwrap());
    assert!(m_lh < 0.25 * m_rh, "LH {m_lh} vs RH {m_rh}");
}
