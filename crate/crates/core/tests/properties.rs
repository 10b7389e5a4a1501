use num_complex::Complex64;
use proptest::prelude::*;

use zeno_core::grid::{CounterRegion, GridSpec};
use zeno_core::measuror::Measuror;
use zeno_core::propagator::{compress_hamiltonian, Dispersion, HamiltonianRep, Propagator};
use zeno_core::state::{fidelity, inner, StateVector};
use zeno_core::zeno::{zeno_trajectory, STEP_SLACK};

const N: usize = 32;

fn grid() -> GridSpec {
    GridSpec::periodic(-1.0, 2.0, N).unwrap()
}

fn state() -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), N).prop_map(|v| {
        StateVector::new(
            grid(),
            v.into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect(),
        )
        .unwrap()
    })
}

fn scalar() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn hamiltonian() -> impl Strategy<Value = HamiltonianRep> {
    prop_oneof![
        Just(HamiltonianRep::free(&grid(), Dispersion::Continuum).unwrap()),
        Just(HamiltonianRep::free(&grid(), Dispersion::Discrete).unwrap()),
        Just(
            HamiltonianRep::dirichlet(
                &grid(),
                &CounterRegion::unit(&grid()).unwrap(),
                Dispersion::Continuum
            )
            .unwrap()
        ),
        Just(
            compress_hamiltonian(
                &HamiltonianRep::free(&grid(), Dispersion::Discrete).unwrap(),
                &Measuror::sharp(&grid(), &CounterRegion::unit(&grid()).unwrap()),
                4096
            )
            .map(|hc| HamiltonianRep::dense(&grid(), hc.entries().to_vec()).unwrap())
            .unwrap()
        ),
    ]
}

fn close(a: &StateVector, b: &StateVector, tol: f64) -> bool {
    a.distance(b).unwrap() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cauchy_schwarz(a in state(), b in state()) {
        let ip = inner(&a, &b).unwrap().norm();
        prop_assert!(ip <= a.norm() * b.norm() * (1.0 + 1e-12));
        let f = fidelity(&a, &b).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
    }

    #[test]
    fn measuror_is_a_contraction(psi in state(), w in prop::collection::vec(0.0..=1.0f64, N)) {
        let m = Measuror::custom(&grid(), w).unwrap();
        prop_assert!(m.apply(&psi).unwrap().norm() <= psi.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn propagator_is_linear(h in hamiltonian(), a in state(), b in state(), alpha in scalar(), beta in scalar(), t in -1.0..1.0f64) {
        let u = Propagator::new(&h, t).unwrap();
        let lhs = u.evolve(&a.combine(alpha, &b, beta).unwrap()).unwrap();
        let rhs = u.evolve(&a).unwrap().combine(alpha, &u.evolve(&b).unwrap(), beta).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn free_propagator_is_unitary(psi in state(), t in -1.0..1.0f64, discrete in any::<bool>()) {
        let d = if discrete { Dispersion::Discrete } else { Dispersion::Continuum };
        let h = HamiltonianRep::free(&grid(), d).unwrap();
        let out = Propagator::new(&h, t).unwrap().evolve(&psi).unwrap();
        prop_assert!((out.norm() - psi.norm()).abs() <= 1e-12 * psi.norm().max(1.0));
    }

    #[test]
    fn group_law(h in hamiltonian(), psi in state(), s in -0.5..0.5f64, t in -0.5..0.5f64) {
        let two = Propagator::new(&h, s).unwrap().evolve(&Propagator::new(&h, t).unwrap().evolve(&psi).unwrap()).unwrap();
        let one = Propagator::new(&h, s + t).unwrap().evolve(&psi).unwrap();
        prop_assert!(close(&two, &one, 1e-10));
    }

    #[test]
    fn time_reversal(h in hamiltonian(), psi in state(), t in 0.0..1.0f64) {
        let there = Propagator::new(&h, t).unwrap().evolve(&psi).unwrap();
        let back = Propagator::new(&h, -t).unwrap().evolve(&there).unwrap();
        prop_assert!(close(&back, &psi, 1e-10));
    }

    #[test]
    fn survival_is_bounded_and_non_increasing(psi in state(), n in 1usize..40, t in 0.0..0.5f64) {
        let g = grid();
        let r = CounterRegion::unit(&g).unwrap();
        let e = Measuror::sharp(&g, &r);
        let h = HamiltonianRep::free(&g, Dispersion::Discrete).unwrap();
        let ceiling = e.apply(&psi).unwrap().norm_sqr();
        let traj = zeno_trajectory(&psi, &h, &e, t, n).unwrap();
        prop_assert!(traj.survival.iter().all(|&s| s <= ceiling + 1e-10));
        prop_assert!(traj.survival.windows(2).all(|w| w[1] <= w[0] + STEP_SLACK));
    }
}

#[test]
fn compressed_hamiltonian_is_exactly_symmetric() {
    let g = grid();
    let r = CounterRegion::unit(&g).unwrap();
    for d in [Dispersion::Continuum, Dispersion::Discrete] {
        let h = HamiltonianRep::free(&g, d).unwrap();
        let hc = compress_hamiltonian(&h, &Measuror::sharp(&g, &r), 4096).unwrap();
        assert_eq!(hc.hermiticity_defect(), 0.0);
    }
}
