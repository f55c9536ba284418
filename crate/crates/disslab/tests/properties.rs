//! Property tests across modules.

use std::sync::OnceLock;

use disslab::algebra::ToralAutomorphism;
use disslab::bounds::{h1_power_closed, weyl_constant, BoundProfile, Which};
use disslab::dissipation::{tau_d_exact, trivial_bound};
use disslab::koopman::{dissipation_functional, KoopmanAction};
use disslab::mixing::{
    correlation, strong_envelope, transfer_exponents, transfer_rate, weak_cesaro, MixingEnvelope, MixingMode,
    RateFunction, RateKind, DEFAULT_EPS,
};
use disslab::pulsed::{evolve, step, PulsedSystem};
use disslab::shear::{transport_gap_cts, CtsGrid, CtsState, ShearFlow};
use disslab::{Mode, Scaling, SpectralConvention, SpectralField};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lattice() -> SpectralConvention {
    SpectralConvention::lattice(2)
}

fn cat() -> ToralAutomorphism {
    ToralAutomorphism::cat_map()
}

fn field(seed: u64, modes: usize, radius: i64) -> SpectralField {
    SpectralField::random(lattice(), modes, radius, false, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

const N_ENV: usize = 8;

fn envelope(alpha: f64, beta: f64) -> &'static MixingEnvelope {
    static E11: OnceLock<MixingEnvelope> = OnceLock::new();
    static E21: OnceLock<MixingEnvelope> = OnceLock::new();
    let cell = if alpha == 1.0 { &E11 } else { &E21 };
    cell.get_or_init(|| strong_envelope(&cat(), alpha, beta, N_ENV, DEFAULT_EPS, lattice()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn energy_identity_and_monotone_decay(seed in any::<u64>(), modes in 1usize..8, x in -6.0f64..-1.0) {
        let nu = 10f64.powf(x);
        let sys = PulsedSystem::automorphism(cat(), nu, lattice()).unwrap();
        let theta = field(seed, modes, 5);
        let next = step(&theta, &sys).unwrap();
        let e = dissipation_functional(&theta, &cat(), nu).unwrap();
        let lhs = next.norm_sq();
        let rhs = theta.norm_sq() - nu * e;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * theta.norm_sq());
        let traj = evolve(&theta, &sys, 12).unwrap();
        prop_assert!(traj.energies_monotone());
    }

    #[test]
    fn mixing_inequality_holds(seed in any::<u64>(), mf in 1usize..6, mg in 1usize..6, n in 0usize..=N_ENV, a2 in any::<bool>()) {
        let (alpha, beta) = if a2 { (2.0, 1.0) } else { (1.0, 1.0) };
        let env = envelope(alpha, beta);
        let f = field(seed, mf, 4);
        let g = field(seed ^ 0x9e37_79b9, mg, 4);
        let mut pushed = f.clone();
        for _ in 0..n {
            pushed = cat().push(&pushed).unwrap();
        }
        let direct = pushed.inner(&g);
        // the pull-back route must agree with the push-forward route
        let via_pull = correlation(&cat(), &f, &g, n + 1).unwrap()[n];
        prop_assert!((direct - via_pull).norm() <= 1e-12 * (1.0 + direct.norm()));
        let rhs = env.value(n).unwrap() * f.sobolev_sq(alpha).sqrt() * g.sobolev_sq(beta).sqrt();
        prop_assert!(direct.norm() <= rhs * (1.0 + 1e-12), "n {}: {} > {}", n, direct.norm(), rhs);
    }

    #[test]
    fn cesaro_floor_and_monotone_sum(seed in any::<u64>(), modes in 1usize..6, n in 1usize..300) {
        let f = field(seed, modes, 4);
        let c = weak_cesaro(&cat(), &f, &f, n).unwrap();
        prop_assert!(c >= f.norm_sq() / (n as f64).sqrt() * (1.0 - 1e-12));
        let c2 = weak_cesaro(&cat(), &f, &f, n + 1).unwrap();
        // n·C(n)² is a partial sum of nonnegative terms
        prop_assert!((n + 1) as f64 * c2 * c2 >= n as f64 * c * c * (1.0 - 1e-12));
    }

    #[test]
    fn single_mode_cesaro_is_inverse_root(k1 in -30i64..30, k2 in -30i64..30, n in 1usize..3000) {
        prop_assume!(k1 != 0 || k2 != 0);
        let f = SpectralField::single(lattice(), Mode::new(&[k1, k2]), Complex64::new(1.0, 0.0)).unwrap();
        let c = weak_cesaro(&cat(), &f, &f, n).unwrap();
        prop_assert!((c - 1.0 / (n as f64).sqrt()).abs() <= 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn exact_tau_within_trivial_bound_and_monotone(x in -8.0f64..-1.0) {
        let nu = 10f64.powf(x);
        let t = tau_d_exact(&cat(), nu, lattice()).unwrap();
        prop_assert!(t >= 1 && t <= trivial_bound(nu, lattice()));
        let t_smaller = tau_d_exact(&cat(), nu / 3.0, lattice()).unwrap();
        prop_assert!(t_smaller >= t);
    }

    #[test]
    fn h1_power_bisection_matches_closed_form(
        c in 0.2f64..3.0, p in 0.3f64..3.0, alpha in 0.3f64..2.5, beta in 0.3f64..2.5, x in -10.0f64..-2.0
    ) {
        let nu = 10f64.powf(x);
        let closed = h1_power_closed(c, p, alpha, beta, nu);
        prop_assume!(closed > 1.0 + 1e-6);
        let rate = RateFunction::power(c, p, alpha, beta, MixingMode::Strong).unwrap();
        let prof = BoundProfile::new(Which::H1, rate, lattice(), None, None).unwrap();
        let h = prof.eval(nu).unwrap();
        prop_assert!(!h.degenerate);
        prop_assert!((h.h - closed).abs() <= 1e-6 * closed, "{} vs {}", h.h, closed);
    }

    #[test]
    fn h_grows_as_nu_falls(which in 0usize..4, c2 in 0.3f64..2.0, x in -9.0f64..-2.0) {
        let which = [Which::H1, Which::H2, Which::H3, Which::H4][which];
        let rate = RateFunction::exponential(3.0, c2, 1.0, 1.0, MixingMode::Strong).unwrap();
        let weyl = weyl_constant(2, 1.0, 0.1, Scaling::Lattice);
        let prof = BoundProfile::new(which, rate, lattice(), Some(2.0), Some(weyl)).unwrap();
        let nu = 10f64.powf(x);
        let a = prof.eval(nu).unwrap();
        let b = prof.eval(nu / 10.0).unwrap();
        prop_assert!(b.h >= a.h * (1.0 - 1e-9));
        prop_assert!(a.h >= lattice().lambda1());
        let universal = if matches!(which, Which::H1 | Which::H2) { 34.0 } else { 18.0 };
        prop_assert!((a.bound * nu * a.h - universal).abs() < 1e-9 * universal);
    }

    #[test]
    fn transfer_properties(a in 0.2f64..3.0, b in 0.2f64..3.0, a2 in 0.2f64..3.0, b2 in 0.2f64..3.0, c2 in 0.1f64..2.0) {
        let (g0, d0) = transfer_exponents(a, b, a, b);
        prop_assert!(g0.abs() < 1e-15 && (d0 - 1.0).abs() < 1e-15);
        let (g, d) = transfer_exponents(a, b, a2, b2);
        prop_assert!(g >= 0.0 && d > 0.0 && d <= 1.0 + 1e-15);
        let rate = RateFunction::exponential(2.0, c2, a, b, MixingMode::Strong).unwrap();
        let moved = transfer_rate(&rate, a2, b2, lattice()).unwrap();
        match moved.rate.kind {
            RateKind::Exponential { c2: c, .. } => prop_assert!((c - d * c2).abs() <= 1e-12 * c2),
            _ => prop_assert!(false, "kind changed"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn shear_transport_gap_holds(a1 in -1.0f64..1.0, b1 in -1.0f64..1.0, b2 in -0.5f64..0.5, t in 0.1f64..1.5) {
        prop_assume!(a1.abs() + b1.abs() > 0.1);
        let flow = ShearFlow::new(0.0, vec![(a1, b1), (0.0, b2)]).unwrap();
        let grid = CtsGrid::new(3, 32).unwrap();
        let mut theta = CtsState::zeros(grid);
        theta.set_band(1, |y| Complex64::new((2.0 * std::f64::consts::PI * y).cos(), 0.3)).unwrap();
        let g = transport_gap_cts(&theta, &flow, 1e-3, t, 1e-2, SpectralConvention::geometric(2)).unwrap();
        prop_assert!(g.holds, "{} > {}", g.gap_sq, g.bound);
    }
}

#[test]
fn strong_envelopes_are_nonincreasing() {
    for (alpha, beta) in [(1.0, 1.0), (2.0, 1.0)] {
        let env = envelope(alpha, beta);
        assert_eq!(env.points.len(), N_ENV + 1);
        for w in env.points.windows(2) {
            assert!(w[1].value <= w[0].value, "{alpha},{beta}: {} then {}", w[0].value, w[1].value);
        }
    }
}
