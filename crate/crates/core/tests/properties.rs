use destiny_core::engine::{
    initialize, mean_direction, mean_iterate, mean_tracker, pca_oracle, principal_angles, run, tracking_residual,
    Destiny, RunConfig, StepsizeRule,
};
use destiny_core::network::{erdos_renyi, metropolis_weights, mix_stack, verify_assumption2, Graph, MixingMatrix};
use destiny_core::penalty::{
    b_value, direction_g, direction_h, grad_h, h_value, in_region_r, local_direction, orth_residual, sym,
};
use destiny_core::problems::{
    fd_gradient, gaussian_matrix, generate_synthetic_olsr, generate_synthetic_pca, generate_synthetic_sdl,
    partition_columns, Averaged, FnObjective, LocalObjective, LocalProblem, OlsrLocal, PcaLocal, SdlLocal,
    SyntheticSpec,
};
use destiny_core::stiefel::{orthonormalize, polar_projection};
use destiny_core::{Error, Matrix, Mixing, Problem};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pca_parts(a: &Matrix, d: usize, p: usize) -> Vec<Problem> {
    partition_columns(a, d)
        .unwrap()
        .into_iter()
        .map(|b| LocalProblem::Pca(PcaLocal::new(b, p).unwrap()))
        .collect()
}

fn family(kind: u8, n: usize, p: usize, seed: u64) -> Problem {
    let mut r = rng(seed);
    match kind % 3 {
        0 => LocalProblem::Pca(PcaLocal::new(gaussian_matrix(n, 3 * n, &mut r), p).unwrap()),
        1 => {
            let (c, d) = generate_synthetic_olsr(n, 3 * n, p, seed).unwrap();
            LocalProblem::Olsr(OlsrLocal::new(c, d).unwrap())
        }
        _ => LocalProblem::Sdl(SdlLocal::new(generate_synthetic_sdl(n, 3 * n, seed).unwrap(), p).unwrap()),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sym_is_linear_and_idempotent(seed in any::<u64>(), p in 1usize..6, s in -3.0f64..3.0) {
        let mut r = rng(seed);
        let a: Matrix = gaussian_matrix(p, p, &mut r);
        let b: Matrix = gaussian_matrix(p, p, &mut r);
        let lin = sym(&(&a * s + &b)).unwrap() - (sym(&a).unwrap() * s + sym(&b).unwrap());
        prop_assert!(lin.amax() <= 1e-14 * (1.0 + a.amax() * s.abs() + b.amax()));
        let once = sym(&a).unwrap();
        prop_assert_eq!(sym(&once).unwrap(), once.clone());
        prop_assert_eq!(once.transpose(), once);
    }

    #[test]
    fn metropolis_on_random_graphs(d in 1usize..=16, prob in 0.05f64..=1.0, seed in any::<u64>()) {
        let g = match erdos_renyi(d, prob, seed) {
            Ok(g) => g,
            // Very sparse draws may never connect; that must be reported, not returned.
            Err(Error::Disconnected(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(g.is_connected());
        let w: Mixing = metropolis_weights(&g).unwrap();
        let rep = verify_assumption2(w.weights(), &g);
        prop_assert!(rep.all_passed(), "{}", rep);
        prop_assert!(rep.worst_violation() <= 1e-12);
        prop_assert!(w.lambda() < 1.0);
    }

    #[test]
    fn mixing_preserves_the_mean(d in 1usize..=12, prob in 0.4f64..=1.0, seed in any::<u64>()) {
        let g = erdos_renyi(d, prob, seed).unwrap();
        let w: Mixing = metropolis_weights(&g).unwrap();
        let mut r = rng(seed ^ 0x5eed);
        let blocks: Vec<Matrix> = (0..d).map(|_| gaussian_matrix(7, 3, &mut r)).collect();
        let mixed = mix_stack(w.weights(), &blocks).unwrap();
        let mean = |bs: &[Matrix]| bs.iter().fold(Matrix::zeros(7, 3), |acc, b| acc + b) / d as f64;
        let scale = 1.0 + blocks.iter().map(|b| b.norm()).sum::<f64>();
        prop_assert!((mean(&mixed) - mean(&blocks)).norm() <= 1e-12 * scale);
    }

    #[test]
    fn grad_h_matches_finite_differences(kind in 0u8..3, seed in any::<u64>(), beta in 0.0f64..5.0) {
        let (n, p) = (7, 2);
        let f = family(kind, n, p, seed);
        let x = gaussian_matrix(n, p, &mut rng(seed.wrapping_add(1))) / (n as f64).sqrt();
        let gx = f.euclidean_grad(&x).unwrap();
        let gc = f.euclidean_grad(&(&x * x.tr_mul(&x))).unwrap();
        let exact = grad_h(&x, &gx, &gc, beta).unwrap();
        let h = FnObjective::new((n, p), |y: &Matrix| h_value(y, &f, beta).unwrap());
        let fd = fd_gradient(&h, &x).unwrap();
        prop_assert!((&exact - &fd).norm() <= 1e-5 * exact.norm().max(1e-8));
    }

    #[test]
    fn h_direction_dominates_in_region(seed in any::<u64>(), t in 0.0f64..0.15) {
        let (n, p) = (8, 3);
        let mut r = rng(seed);
        let f = PcaLocal::new(gaussian_matrix(n, 16, &mut r), p).unwrap();
        let q = orthonormalize(&gaussian_matrix(n, p, &mut r)).unwrap().into_matrix();
        let x = q + gaussian_matrix(n, p, &mut r) * (t / ((n * p) as f64).sqrt());
        prop_assume!(in_region_r(&x).unwrap());
        let gc = f.euclidean_grad(&(&x * x.tr_mul(&x))).unwrap();
        let beta = (6.0 + 21.0 * gc.norm()) / 5.0;
        let res = orth_residual(&x).unwrap().norm_squared();
        let lhs = direction_h(&x, &gc, beta).unwrap().norm_squared();
        let rhs = direction_g(&x, &gc).unwrap().norm_squared() + beta * res;
        prop_assert!(lhs >= rhs - 1e-10 * (1.0 + lhs), "{} < {}", lhs, rhs);
    }

    #[test]
    fn pooled_objective_matches_global(kind in 0u8..3, d in 1usize..=6, seed in any::<u64>()) {
        let (n, m, p) = (6, 30, 2);
        let mut r = rng(seed);
        let x = orthonormalize(&gaussian_matrix(n, p, &mut r)).unwrap().into_matrix();
        let (global, parts): (Problem, Vec<Problem>) = match kind {
            0 => {
                let a: Matrix = gaussian_matrix(n, m, &mut r);
                (LocalProblem::Pca(PcaLocal::new(a.clone(), p).unwrap()), pca_parts(&a, d, p))
            }
            1 => {
                let (c, l) = generate_synthetic_olsr(n, m, p, seed).unwrap();
                let parts = partition_columns(&c, d).unwrap().into_iter()
                    .zip(partition_columns(&l, d).unwrap())
                    .map(|(c, l)| LocalProblem::Olsr(OlsrLocal::new(c, l).unwrap()))
                    .collect();
                (LocalProblem::Olsr(OlsrLocal::new(c, l).unwrap()), parts)
            }
            _ => {
                let b: Matrix = generate_synthetic_sdl(n, m, seed).unwrap();
                let parts = partition_columns(&b, d).unwrap().into_iter()
                    .map(|b| LocalProblem::Sdl(SdlLocal::new(b, p).unwrap()))
                    .collect();
                (LocalProblem::Sdl(SdlLocal::new(b, p).unwrap()), parts)
            }
        };
        let pooled = Averaged::new(&parts);
        let scale = d as f64;
        let fv = global.value(&x).unwrap();
        prop_assert!((pooled.value(&x).unwrap() * scale - fv).abs() <= 1e-10 * (1.0 + fv.abs()));
        let gg = global.euclidean_grad(&x).unwrap();
        prop_assert!((pooled.euclidean_grad(&x).unwrap() * scale - &gg).norm() <= 1e-10 * (1.0 + gg.norm()));
    }

    #[test]
    fn stiefel_projections_are_feasible(seed in any::<u64>(), n in 2usize..10, p in 1usize..4) {
        prop_assume!(p <= n);
        let g: Matrix = gaussian_matrix(n, p, &mut rng(seed));
        for q in [orthonormalize(&g).unwrap(), polar_projection(&g).unwrap()] {
            prop_assert!(b_value(q.as_matrix()).unwrap() <= 1e-28);
        }
    }
}

#[test]
fn synthetic_pca_is_deterministic_and_has_prescribed_spectrum() {
    let spec = SyntheticSpec { n: 10, m: 20, p: 3, xi: 0.9, seed: 7 };
    let a: Matrix = generate_synthetic_pca(&spec).unwrap();
    assert_eq!(a, generate_synthetic_pca(&spec).unwrap());
    assert_ne!(a, generate_synthetic_pca(&SyntheticSpec { seed: 8, ..spec }).unwrap());
    let sv = a.clone().svd(false, false).singular_values;
    let mut sv: Vec<f64> = sv.iter().cloned().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    for (i, s) in sv.iter().enumerate() {
        assert!((s - 0.9f64.powf((i + 1) as f64 / 2.0)).abs() <= 1e-10, "sigma_{i} = {s}");
    }
}

#[test]
fn initial_trackers_average_to_pooled_direction() {
    let a: Matrix = generate_synthetic_pca(&SyntheticSpec { n: 12, m: 40, p: 3, xi: 0.8, seed: 3 }).unwrap();
    let parts = pca_parts(&a, 4, 3);
    let x0 = orthonormalize(&gaussian_matrix(12, 3, &mut rng(4))).unwrap();
    let states = initialize(&x0, &parts, 1.5).unwrap();
    let pooled = local_direction(x0.as_matrix(), &Averaged::new(&parts), 1.5).unwrap();
    assert!((mean_tracker(&states) - &pooled).norm() <= 1e-12 * (1.0 + pooled.norm()));
}

fn tracking_drift(w: MixingMatrix<f64>, rounds: usize) -> f64 {
    let a: Matrix = generate_synthetic_pca(&SyntheticSpec { n: 20, m: 120, p: 3, xi: 0.9, seed: 11 }).unwrap();
    let parts = pca_parts(&a, w.d(), 3);
    let x0 = orthonormalize(&gaussian_matrix(20, 3, &mut rng(12))).unwrap();
    let mut sim = Destiny::new(&w, &parts, &x0, 1.0, StepsizeRule::default()).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..rounds {
        sim.step().unwrap();
        let hbar = mean_direction(sim.states());
        worst = worst.max(tracking_residual(sim.states()) / (1.0 + hbar.norm()));
    }
    worst
}

#[test]
fn tracker_mean_follows_direction_mean() {
    let g = erdos_renyi(6, 0.5, 13).unwrap();
    assert!(tracking_drift(metropolis_weights(&g).unwrap(), 200) <= 1e-10);
}

#[test]
fn tracking_breaks_without_double_stochasticity() {
    let g = Graph::ring(6).unwrap();
    let mut w = metropolis_weights::<f64>(&g).unwrap().weights().clone();
    // Column sums no longer equal one.
    w[(0, 1)] += 0.2;
    w[(0, 0)] -= 0.2;
    w[(1, 0)] -= 0.1;
    w[(1, 1)] += 0.1;
    assert!(tracking_drift(MixingMatrix::from_weights_unchecked(w), 200) > 1e-6);
}

#[test]
fn relabelling_agents_permutes_the_states() {
    let d = 5;
    let g = erdos_renyi(d, 0.6, 21).unwrap();
    let w: Mixing = metropolis_weights(&g).unwrap();
    let perm = [3usize, 0, 4, 1, 2];
    let pw = DMatrix::from_fn(d, d, |i, j| w.weights()[(perm[i], perm[j])]);
    let a: Matrix = generate_synthetic_pca(&SyntheticSpec { n: 10, m: 50, p: 2, xi: 0.9, seed: 22 }).unwrap();
    let parts = pca_parts(&a, d, 2);
    let permuted: Vec<Problem> = perm.iter().map(|&k| parts[k].clone()).collect();
    let x0 = orthonormalize(&gaussian_matrix(10, 2, &mut rng(23))).unwrap();
    let rule = StepsizeRule::default();
    let pwm = MixingMatrix::from_weights_unchecked(pw);
    let mut s1 = Destiny::new(&w, &parts, &x0, 1.0, rule).unwrap();
    let mut s2 = Destiny::new(&pwm, &permuted, &x0, 1.0, rule).unwrap();
    for _ in 0..50 {
        s1.step().unwrap();
        s2.step().unwrap();
    }
    for (i, &k) in perm.iter().enumerate() {
        let diff = (&s2.states()[i].x - &s1.states()[k].x).norm();
        assert!(diff <= 1e-10, "agent {i}: {diff}");
    }
}

#[test]
fn traces_do_not_depend_on_thread_count() {
    let a: Matrix = generate_synthetic_pca(&SyntheticSpec { n: 20, m: 160, p: 3, xi: 0.9, seed: 31 }).unwrap();
    let parts = pca_parts(&a, 8, 3);
    let w: Mixing = metropolis_weights(&erdos_renyi(8, 0.5, 32).unwrap()).unwrap();
    let x0 = orthonormalize(&gaussian_matrix(20, 3, &mut rng(33))).unwrap();
    let cfg = RunConfig::new(1.0, 150, 1e-12).unwrap();
    let in_pool = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run(&cfg, &w, &parts, &x0).unwrap())
    };
    let one = in_pool(1);
    let four = in_pool(4);
    assert_eq!(one.trace, four.trace);
    assert_eq!(one.states, four.states);
}

#[test]
fn single_agent_recovers_leading_subspace() {
    let a: Matrix = generate_synthetic_pca(&SyntheticSpec { n: 20, m: 60, p: 2, xi: 0.7, seed: 41 }).unwrap();
    let parts = pca_parts(&a, 1, 2);
    let w = MixingMatrix::from_weights_unchecked(DMatrix::from_element(1, 1, 1.0));
    let x0 = orthonormalize(&gaussian_matrix(20, 2, &mut rng(42))).unwrap();
    let out = run(&RunConfig::new(1.0, 5000, 1e-8).unwrap(), &w, &parts, &x0).unwrap();
    let x = polar_projection(&mean_iterate(&out.states)).unwrap();
    let angles = principal_angles(&x, &pca_oracle(&a, 2).unwrap()).unwrap();
    assert!(angles.iter().all(|t| *t <= 1e-4), "{angles:?} after {} rounds", out.trace.len());
}
