use proptest::prelude::*;
use radiance_core::kinematics::{
    momentum, quasimomentum, rest_frame_pminus, trajectory, FieldConfig, Handedness, ParticleParams, Worldline,
};

fn circular(xi: f64, right: bool) -> FieldConfig {
    FieldConfig::circular(xi, if right { Handedness::Right } else { Handedness::Left }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn momentum_stays_on_shell(
        xi in 0.0f64..5.0, pm in 0.05f64..20.0, kx in -3.0f64..3.0, ky in -3.0f64..3.0,
        phi in -100.0f64..100.0, right in any::<bool>(),
    ) {
        let f = circular(xi, right);
        let p = ParticleParams::with_kappa(pm, [kx, ky]).unwrap();
        let m = momentum(&f, &p, phi).unwrap();
        prop_assert!((m.square() - 1.0).abs() <= 1e-12 * m.p0 * m.p0);
        prop_assert!((m.minus() - pm).abs() <= 1e-12 * m.p0);
        let q = quasimomentum(&p).unwrap();
        prop_assert!((q.square() - 1.0).abs() <= 1e-12 * q.q0 * q.q0);
    }

    #[test]
    fn linear_momentum_on_shell(xi in 0.0f64..5.0, pm in 0.05f64..20.0, phi in -100.0f64..100.0) {
        let f = FieldConfig::linear(xi).unwrap();
        let p = ParticleParams::new(pm).unwrap();
        let m = momentum(&f, &p, phi).unwrap();
        prop_assert!((m.square() - 1.0).abs() <= 1e-12 * m.p0 * m.p0);
        prop_assert!((m.minus() - pm).abs() <= 1e-12 * m.p0);
    }

    /// `dx^μ/dφ = P^μ/p_-` for the closed-form trajectory.
    #[test]
    fn trajectory_velocity_is_momentum(xi in 0.0f64..3.0, pm in 0.2f64..5.0, phi in -20.0f64..20.0, lin in any::<bool>()) {
        let f = if lin { FieldConfig::linear(xi).unwrap() } else { circular(xi, true) };
        let p = ParticleParams::new(pm).unwrap();
        let h = 1e-5;
        let a = trajectory(&f, &p, phi - h).unwrap();
        let b = trajectory(&f, &p, phi + h).unwrap();
        let m = momentum(&f, &p, phi).unwrap();
        let d = |u: f64, v: f64| (v - u) / (2.0 * h);
        let s = 1e-7 * (1.0 + m.p0 / pm);
        prop_assert!((d(a.ct, b.ct) - m.p0 / pm).abs() < s);
        prop_assert!((d(a.x, b.x) - m.px / pm).abs() < s);
        prop_assert!((d(a.y, b.y) - m.py / pm).abs() < s);
        prop_assert!((d(a.z, b.z) - m.pz / pm).abs() < s);
    }

    /// The general worldline has `t - z = φ` along the whole orbit.
    #[test]
    fn worldline_light_front_time(xi in 0.0f64..3.0, pm in 0.2f64..5.0, kx in -1.0f64..1.0, phi in -30.0f64..30.0) {
        let f = circular(xi, false);
        let p = ParticleParams::with_kappa(pm, [kx, 0.3]).unwrap();
        let w = Worldline::new(f, p).unwrap();
        let x = w.position(phi);
        prop_assert!((x.ct - x.z - phi).abs() < 1e-12 * (1.0 + phi.abs()));
    }
}

/// In the average rest frame the drift along the wave vanishes.
#[test]
fn rest_frame_has_no_drift() {
    for xi in [0.1, 1.0, 4.0] {
        for f in [circular(xi, true), FieldConfig::linear(xi).unwrap()] {
            let p = ParticleParams::new(rest_frame_pminus(&f)).unwrap();
            let period = 2.0 * std::f64::consts::PI;
            let z = trajectory(&f, &p, period).unwrap().z - trajectory(&f, &p, 0.0).unwrap().z;
            assert!(z.abs() < 1e-13, "xi={xi}: {z}");
        }
    }
}
