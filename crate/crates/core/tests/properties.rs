//! Property tests for the model invariants.

use std::f64::consts::PI;

use nalgebra::Vector3;
use proptest::prelude::*;

use pipediff::geometry::{locate, module_path_radius, total_length, Bend, PipeNetwork, PipeSpec, Segment};
use pipediff::kinematics::{slip_and_ape, theoretical_speeds, SpeedSource, TrackSpeeds};
use pipediff::robot::{compression_in_bend, compression_in_straight, RobotConfig};
use pipediff::scenario::parse_scenario;
use pipediff::transmission::{
    constraint_residual, ring_speed, solve_output_speeds, GearTrainConfig, Load, LoadState,
};

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

fn load() -> impl Strategy<Value = Load> {
    prop_oneof![
        Just(Load::Free),
        (-100.0..100.0f64).prop_map(Load::ImposedSpeed),
        (-50.0..50.0f64).prop_map(Load::ImposedTorque),
    ]
}

fn loads() -> impl Strategy<Value = [Load; 3]> {
    [load(), load(), load()].prop_filter("at most two imposed speeds", |l| {
        l.iter().filter(|x| matches!(x, Load::ImposedSpeed(_))).count() <= 2
    })
}

fn bend(radius: f64) -> Bend {
    Bend {
        radius,
        sweep_deg: 90.0,
        normal: Vector3::y(),
    }
}

proptest! {
    #[test]
    fn sum_is_conserved(n in 0.1..5.0f64, w in -50.0..50.0f64, l in loads()) {
        let cfg = GearTrainConfig::new(n).unwrap();
        let sol = solve_output_speeds(&cfg, w, &LoadState::new(l).unwrap()).unwrap();
        let target = 3.0 * n * w;
        prop_assert!(sol.residual <= 1e-9 * target.abs().max(1.0));
        prop_assert_eq!(sol.residual, constraint_residual(&cfg, w, sol.speeds));
        for (i, li) in l.iter().enumerate() {
            if let Load::ImposedSpeed(v) = li {
                prop_assert_eq!(sol.speeds[i], *v);
            }
        }
    }

    #[test]
    fn solution_is_permutation_equivariant(n in 0.1..5.0f64, w in -50.0..50.0f64, l in loads()) {
        let cfg = GearTrainConfig::new(n).unwrap();
        let base = solve_output_speeds(&cfg, w, &LoadState::new(l).unwrap()).unwrap();
        for p in PERMUTATIONS {
            let permuted = [l[p[0]], l[p[1]], l[p[2]]];
            let sol = solve_output_speeds(&cfg, w, &LoadState::new(permuted).unwrap()).unwrap();
            for k in 0..3 {
                prop_assert_eq!(sol.speeds[k], base.speeds[p[k]]);
            }
        }
    }

    #[test]
    fn equal_loads_give_nominal_speed(n in 0.1..5.0f64, w in -50.0..50.0f64, t in -50.0..50.0f64) {
        let cfg = GearTrainConfig::new(n).unwrap();
        for l in [[Load::Free; 3], [Load::ImposedTorque(t); 3]] {
            let sol = solve_output_speeds(&cfg, w, &LoadState::new(l).unwrap()).unwrap();
            prop_assert_eq!(sol.speeds, [n * w; 3]);
        }
    }

    #[test]
    fn two_equal_loads_share_speed(w in -50.0..50.0f64, v in -100.0..100.0f64, t in -50.0..50.0f64, at in 0usize..3) {
        let cfg = GearTrainConfig::default();
        let mut l = [Load::ImposedTorque(t); 3];
        l[at] = Load::ImposedSpeed(v);
        let sol = solve_output_speeds(&cfg, w, &LoadState::new(l).unwrap()).unwrap();
        let others: Vec<f64> = (0..3).filter(|&i| i != at).map(|i| sol.speeds[i]).collect();
        prop_assert_eq!(others[0], others[1]);
    }

    #[test]
    fn ring_speed_is_linear(a in -1e3..1e3f64, b in -1e3..1e3f64, c in -1e3..1e3f64, d in -1e3..1e3f64) {
        let lhs = ring_speed(a + c, b + d).unwrap();
        let rhs = ring_speed(a, b).unwrap() + ring_speed(c, d).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (a.abs() + b.abs() + c.abs() + d.abs()).max(1.0));
        prop_assert_eq!(ring_speed(a, b).unwrap(), (a + b) / 2.0);
    }

    #[test]
    fn path_radii_average_to_bend_radius(theta in -10.0..10.0f64, radius in 1.0..5000.0f64, frac in 0.0..0.999f64) {
        let rc = radius * frac;
        let b = bend(radius);
        let sum: f64 = (0..3).map(|i| module_path_radius(&b, theta, i, rc).unwrap()).sum();
        prop_assert!((sum - 3.0 * radius).abs() <= 1e-12 * radius);
    }

    #[test]
    fn orientation_sweep_bounds(theta in 0.0..(2.0 * PI), radius in 100.0..1000.0f64, frac in 0.0..0.99f64, v in 1.0..100.0f64) {
        let rc = radius * frac;
        let seg = Segment::Bend(bend(radius));
        let speeds = theoretical_speeds(&seg, theta, v, rc).unwrap();
        let (lo, hi) = (v * (radius - rc) / radius, v * (radius + rc) / radius);
        for s in speeds.speeds {
            prop_assert!(s >= lo - 1e-9 && s <= hi + 1e-9);
        }
        prop_assert!((speeds.mean() - v).abs() <= 1e-12 * v);
        // Period 2π in the roll angle.
        let shifted = theoretical_speeds(&seg, theta + 2.0 * PI, v, rc).unwrap();
        for i in 0..3 {
            prop_assert!((shifted.speeds[i] - speeds.speeds[i]).abs() <= 1e-9 * v);
        }
    }

    #[test]
    fn ape_is_scale_invariant(r in prop::array::uniform3(1.0..100.0f64), t in prop::array::uniform3(1.0..100.0f64), c in 0.01..100.0f64) {
        let res = TrackSpeeds { speeds: r, source: SpeedSource::Resolved };
        let theo = TrackSpeeds { speeds: t, source: SpeedSource::Theoretical };
        let base = slip_and_ape(&res, &theo);
        let scaled = slip_and_ape(
            &TrackSpeeds { speeds: r.map(|x| x * c), ..res },
            &TrackSpeeds { speeds: t.map(|x| x * c), ..theo },
        );
        for i in 0..3 {
            let (a, b) = (base.ape[i].unwrap(), scaled.ape[i].unwrap());
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
            prop_assert!(base.slip[i] >= 0.0);
        }
    }

    #[test]
    fn locate_is_monotone(lengths in prop::collection::vec(1.0..500.0f64, 1..6), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let segments: Vec<Segment> = lengths.iter().map(|&l| Segment::straight(l, Vector3::z())).collect();
        let net = PipeNetwork::new(PipeSpec { inner_radius: 10.0, standard_label: String::new() }, segments);
        let total = total_length(&net);
        prop_assert!((total - lengths.iter().sum::<f64>()).abs() < 1e-9);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let la = locate(&net, lo * total).unwrap();
        let lb = locate(&net, hi * total).unwrap();
        prop_assert!(la.segment < lb.segment || (la.segment == lb.segment && la.offset <= lb.offset));
    }

    #[test]
    fn bend_compression_is_bounded_and_continuous(radius in 100.0..1e7f64, theta in 0.0..(2.0 * PI)) {
        let cfg = RobotConfig {
            sprocket_radius: 25.0,
            length: 82.0,
            spring_stiffness: 2.0,
            preload_compression: 5.0,
            max_compression: 16.0,
            max_tilt_deg: 10.0,
            nominal_body_radius: 60.0,
        };
        let spec = PipeSpec { inner_radius: 60.0, standard_label: String::new() };
        let straight = compression_in_straight(&cfg, &spec).unwrap();
        let bent = compression_in_bend(&cfg, &spec, &bend(radius), theta).unwrap();
        for i in 0..3 {
            prop_assert!(bent[i] >= straight[i]);
            prop_assert!(bent[i] <= 16.0);
            prop_assert!((bent[i] - straight[i] - 82.0 * 82.0 / (8.0 * radius)).abs() < 1e-9);
        }
    }

    #[test]
    fn scenario_round_trips(
        r in 10.0..300.0f64,
        len in 1.0..2000.0f64,
        bend_factor in 1.01..5.0f64,
        sweep in 1.0..=180.0f64,
        speed in 0.01..20.0f64,
        theta in -360.0..360.0f64,
        seed in any::<u64>(),
        amp in 0.0..0.1f64,
    ) {
        let text = format!(
            "[pipe]\ninner_radius = {r}\nstandard = x\n\
             [segment]\ntype = straight\nlength = {len}\naxis = 0 0 1\nlabel = up\n\
             [segment]\ntype = bend\nradius = {}\nsweep = {sweep}\n\
             [robot]\nsprocket_radius = 20\nlength = 80\nnominal_body_radius = {r}\npreload_compression = 3\n\
             [sim]\ninput_speed = {speed}\ntheta = {theta}\nseed = {seed}\ndisturbance_amplitude = {amp}\n",
            r * bend_factor
        );
        let sc = parse_scenario(&text).unwrap();
        let again = parse_scenario(&sc.to_text()).unwrap();
        prop_assert_eq!(sc, again);
    }
}
