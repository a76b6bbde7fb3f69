use coinwalk_core::analysis::{project_coin, trace_out_coin, CoinOutcome, PositionDistribution};
use coinwalk_core::evolution::{closed_form_z_walk, evolve_density, evolve_pure};
use coinwalk_core::noise::dephasing_channel;
use coinwalk_core::{CoinState, JointDensityMatrix, JointPureState, PositionWavefunction, C64};
use proptest::prelude::*;

fn position() -> impl Strategy<Value = PositionWavefunction> {
    (-4i64..=4, prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=6)).prop_filter_map(
        "zero vector",
        |(first, amps)| {
            PositionWavefunction::new(first, amps.into_iter().map(|(re, im)| C64::new(re, im)).collect()).ok()
        },
    )
}

fn coin() -> impl Strategy<Value = CoinState> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter_map("zero coin", |(a, b, c, d)| CoinState::new(C64::new(a, b), C64::new(c, d)).ok())
}

fn state(steps: usize) -> impl Strategy<Value = JointPureState> {
    (position(), coin())
        .prop_map(move |(p, c)| JointPureState::custom(p.first_site(), p.amplitudes().to_vec(), c, steps).unwrap())
}

fn theta() -> impl Strategy<Value = f64> {
    0.0f64..std::f64::consts::FRAC_PI_2
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evolution_preserves_norm((psi, th) in (state(40), theta())) {
        let out = evolve_pure(&psi, th, 40).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn even_steps_keep_parity(th in theta(), half in 1usize..=25) {
        let steps = 2 * half;
        let d = PositionDistribution::from_pure(&evolve_pure(&JointPureState::localized(steps), th, steps).unwrap());
        prop_assert!(d.iter().filter(|(n, _)| n % 2 != 0).all(|(_, p)| p == 0.0));
    }

    #[test]
    fn origin_walk_is_reflection_symmetric(th in theta(), steps in 1usize..=40) {
        let d = PositionDistribution::from_pure(&evolve_pure(&JointPureState::localized(steps), th, steps).unwrap());
        let s = steps as i64;
        for n in 1..=s {
            prop_assert!((d.at(n) - d.at(-n)).abs() < 1e-12);
        }
    }

    #[test]
    fn density_evolution_matches_pure((psi, th) in (state(12), theta())) {
        let via_pure = JointDensityMatrix::from_pure(&evolve_pure(&psi, th, 12).unwrap());
        let via_density = evolve_density(&JointDensityMatrix::from_pure(&psi), th, 12).unwrap();
        prop_assert!(via_pure.max_abs_diff(&via_density) < 1e-12);
    }

    #[test]
    fn z_walk_matches_closed_form(p in position(), t in 1usize..=30) {
        let psi = JointPureState::product(&p, CoinState::phi(), coinwalk_core::LatticeSpec::for_walk(t, p.support_radius())).unwrap();
        let sim = evolve_pure(&psi, 0.0, t).unwrap();
        prop_assert!(sim.max_abs_diff(&closed_form_z_walk(&p, t)) < 1e-12);
    }

    #[test]
    fn dephasing_keeps_a_valid_state((psi, th) in (state(6), theta()), beta in 0.0f64..=1.0) {
        let rho = evolve_density(&JointDensityMatrix::from_pure(&psi), th, 6).unwrap();
        let out = dephasing_channel(&rho, beta).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(out.hermiticity_defect() < 1e-12);
        let d = trace_out_coin(&out);
        prop_assert!(d.lattice().sites().all(|n| d.element(n, n).re >= 0.0));
        prop_assert!(out.purity() <= rho.purity() + 1e-12);
    }

    #[test]
    fn postselection_decomposes_the_walker_state((psi, th) in (state(8), theta())) {
        let rho = evolve_density(&JointDensityMatrix::from_pure(&psi), th, 8).unwrap();
        let traced = trace_out_coin(&rho);
        let parts: Vec<_> = [CoinOutcome::Phi, CoinOutcome::PhiPerp]
            .into_iter()
            .filter_map(|o| project_coin(&rho, o).ok())
            .collect();
        let total: f64 = parts.iter().map(|c| c.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        let recomposed = parts.iter().fold(traced.matrix().mapv(|_| C64::default()), |acc, c| {
            acc + c.state.matrix().mapv(|x| x * c.probability)
        });
        let diff = (&recomposed - traced.matrix()).iter().map(|x| x.norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-10);
    }
}
