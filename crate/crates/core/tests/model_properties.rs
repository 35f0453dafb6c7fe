use proptest::prelude::*;
use rocketbvp::model::{
    air_density, alpha_beta_at, chord_shift, full_rhs, nonlinearity, tsiolkovsky_velocity,
};
use rocketbvp::{ExhaustProfile, MassProfile, ScenarioConfig};

fn scenario() -> impl Strategy<Value = ScenarioConfig> {
    (
        500.0f64..5000.0,   // dry mass
        0.0f64..20_000.0,   // propellant
        0.0f64..200.0,      // burn rate
        -4500.0f64..-2500.0, // exhaust velocity
        0.0f64..3.0,        // area
        10.0f64..120.0,     // duration
        1.0f64..20_000.0,   // climb
        0.0f64..1000.0,     // launch altitude
    )
        .prop_map(|(dry, prop, rate, c, area, dur, climb, x0)| {
            let burnout = if rate > 0.0 { (prop / rate).min(dur * 2.0) } else { 0.0 };
            let mass = MassProfile::linear_burn(dry, prop, rate, 0.0, Some(burnout)).unwrap();
            let exhaust = ExhaustProfile::constant(c).unwrap();
            ScenarioConfig::new(0.0, dur, x0, x0 + climb, mass, exhaust).with_drag(area, 0.75)
        })
}

proptest! {
    #[test]
    fn shifted_and_original_dynamics_agree(
        cfg in scenario(),
        u in 0.0f64..1.0,
        z in -500.0f64..500.0,
        p in -300.0f64..300.0,
    ) {
        let t = cfg.t0 + u * cfg.duration();
        let shift = chord_shift(&cfg).unwrap();
        let (alpha, beta) = alpha_beta_at(&cfg, t);
        let lhs = full_rhs(t, z + shift.at(t), p + shift.slope, &cfg);
        let rhs = nonlinearity(alpha, shift.slope, cfg.scale_height, z, p) + beta;
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn alpha_is_non_positive_and_mass_monotone(cfg in scenario(), u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let (ta, tb) = {
            let (a, b) = (u.min(v), u.max(v));
            (cfg.t0 + a * cfg.duration(), cfg.t0 + b * cfg.duration())
        };
        let (alpha, _) = alpha_beta_at(&cfg, ta);
        prop_assert!(alpha <= 0.0);
        prop_assert_eq!(alpha == 0.0, cfg.drag_factor() == 0.0);
        let (ma, mdot) = cfg.mass.eval(ta);
        let (mb, _) = cfg.mass.eval(tb);
        prop_assert!(mb <= ma);
        prop_assert!(mb >= cfg.mass.m_dry());
        prop_assert!(mdot <= 0.0);
    }

    #[test]
    fn gravity_shifts_tsiolkovsky_by_g_dt(
        v0 in -100.0f64..100.0,
        c in -4500.0f64..-2500.0,
        m0 in 100.0f64..1e4,
        frac in 0.05f64..1.0,
        g in 0.0f64..20.0,
        dt in 0.0f64..100.0,
    ) {
        let m = m0 * frac;
        let free = tsiolkovsky_velocity(v0, c, m0, m, 0.0, dt).unwrap();
        let grav = tsiolkovsky_velocity(v0, c, m0, m, g, dt).unwrap();
        prop_assert!(((free - grav) - g * dt).abs() <= 1e-12 * (1.0 + free.abs()));
    }

    #[test]
    fn density_positive_and_decreasing(cfg in scenario(), x in -1000.0f64..50_000.0, dx in 1.0f64..1000.0) {
        prop_assume!(cfg.rho0 > 0.0);
        let lo = air_density(&cfg, x);
        let hi = air_density(&cfg, x + dx);
        prop_assert!(lo > 0.0 && hi > 0.0);
        prop_assert!(hi < lo);
    }
}
