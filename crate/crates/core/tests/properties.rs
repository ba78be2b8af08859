use std::f64::consts::TAU;

use lagflow::cauchy::cauchy_invariant;
use lagflow::field::*;
use lagflow::flow_map::{flow_map, inverse_map};
use lagflow::geometry::{circulation, MaterialLoop};
use lagflow::numerics::quadrature::corrected_trapezoid_weights;
use lagflow::{Domain, FlowField, IntegratorConfig, Vec3};
use proptest::prelude::*;

fn rk4() -> IntegratorConfig {
    IntegratorConfig::rk4(1e-2).unwrap()
}

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn corrected_trapezoid_is_exact_for_cubics(
        n in 14usize..80,
        c in prop::array::uniform4(-3.0f64..3.0),
        a in -2.0f64..0.0,
        len in 0.5f64..4.0,
    ) {
        let b = a + len;
        let h = len / (n - 1) as f64;
        let p = |x: f64| c[0] + x * (c[1] + x * (c[2] + x * c[3]));
        let prim = |x: f64| x * (c[0] + x * (c[1] / 2.0 + x * (c[2] / 3.0 + x * c[3] / 4.0)));
        let q: f64 = corrected_trapezoid_weights(n, h)
            .iter()
            .enumerate()
            .map(|(j, w)| w * p(a + j as f64 * h))
            .sum();
        let exact = prim(b) - prim(a);
        prop_assert!((q - exact).abs() <= 1e-10 * (1.0 + exact.abs()));
    }

    #[test]
    fn periodic_wrap_lands_in_cell(x in vec3(100.0)) {
        let d = Domain::STANDARD_BOX;
        let w = d.wrap(&x);
        for i in 0..3 {
            prop_assert!((0.0..TAU).contains(&w[i]));
            let k = (x[i] - w[i]) / TAU;
            prop_assert!((k - k.round()).abs() < 1e-9);
        }
        prop_assert_eq!(Domain::Unbounded.wrap(&x), x);
    }

    #[test]
    fn rigid_rotation_is_an_isometry(a in vec3(3.0), b in vec3(3.0), t in 0.0f64..3.0, om in 0.1f64..2.0) {
        let f = make_rigid_rotation(om).unwrap();
        let xa = flow_map(&f, &a, t, &rk4()).unwrap();
        let xb = flow_map(&f, &b, t, &rk4()).unwrap();
        prop_assert!(((xa.position - xb.position).norm() - (a - b).norm()).abs() < 1e-8);
        prop_assert!((xa.position[2] - a[2]).abs() < 1e-12);
        prop_assert!((xa.det_jacobian() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn abc_flow_preserves_volume_and_inverts(
        abc in prop::array::uniform3(0.2f64..1.5),
        a in vec3(TAU),
        t in 0.0f64..1.0,
    ) {
        let f = make_abc(abc[0], abc[1], abc[2]).unwrap();
        let s = flow_map(&f, &a, t, &rk4()).unwrap();
        prop_assert!((s.det_jacobian() - 1.0).abs() < 1e-7);
        let back = inverse_map(&f, &s.position, t, &rk4()).unwrap();
        prop_assert!((back - a).norm() < 1e-7);
    }

    #[test]
    fn cauchy_invariant_is_initial_vorticity(
        abc in prop::array::uniform3(0.2f64..1.5),
        a in vec3(TAU),
        t in 0.0f64..1.0,
    ) {
        let f = make_abc(abc[0], abc[1], abc[2]).unwrap();
        let r = cauchy_invariant(&f, &a, t, &rk4()).unwrap();
        prop_assert!(r.drift < 1e-6 * (1.0 + r.omega0.norm()));
        prop_assert!((r.omega0 - f.vorticity(&a, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn strain_circulation_vanishes(c in vec3(2.0), r in 0.1f64..2.0, n in vec3(1.0)) {
        prop_assume!(n.norm() > 0.1);
        let f = make_linear_strain(1.0, 1.0, -2.0).unwrap();
        let lp = MaterialLoop::circle(&c, r, &n, 64).unwrap();
        prop_assert!(circulation(&lp, &f).unwrap().abs() < 1e-10);
    }
}
