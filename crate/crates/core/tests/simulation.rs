use rand::Rng;
use reldiff_core::phase_space::norm;
use reldiff_core::rng::substream;
use reldiff_core::stats::mean_and_stderr;
use reldiff_core::*;

fn cfg(dt: f64, t_end: f64, n_paths: usize, checkpoints: Vec<f64>, seed: u64) -> SimConfig {
    SimConfig {
        dt,
        t_end,
        seed,
        n_paths,
        checkpoint_times: checkpoints,
        record_positions: false,
    }
}

#[test]
fn noise_moments() {
    let mut rng = substream(5, 0);
    let n = 100_000;
    let dt = 0.01f64;
    let mut noise = NoiseIncrement::zero(3);
    let (mut m, mut v, mut c) = (0.0, 0.0, 0.0);
    for _ in 0..n {
        NoiseIncrement::draw_into(&mut rng, dt.sqrt(), false, &mut noise);
        m += noise.dw_vec[1];
        v += noise.dw_vec[1] * noise.dw_vec[1];
        c += noise.dw * noise.dw_vec[0];
    }
    let nf = n as f64;
    let se = dt / nf.sqrt();
    assert!((m / nf).abs() < 3.0 * dt.sqrt() / nf.sqrt());
    assert!((v / nf - dt).abs() < 3.0 * se * 2f64.sqrt());
    assert!((c / nf).abs() < 3.0 * se);
}

#[test]
fn one_step_variance_matches_coefficient() {
    // Var p^i after one step from p = (0.5, 0, 0) is sigma² dt / beta
    let m = builtin_model("roup", 3, 2.0).unwrap();
    let dt = 0.01f64;
    let state = PhasePoint::at_rest_origin(vec![0.5, 0.0, 0.0]).unwrap();
    let mut rng = substream(9, 0);
    let mut noise = NoiseIncrement::zero(3);
    let xs: Vec<f64> = (0..100_000)
        .map(|_| {
            NoiseIncrement::draw_into(&mut rng, dt.sqrt(), true, &mut noise);
            em_step(&state, &m, dt, &noise).unwrap().p[1]
        })
        .collect();
    let (mean, _) = mean_and_stderr(&xs);
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    let want = 2.0 * dt / 2.0;
    // standard error of the sample variance of a Gaussian: want * sqrt(2/(n-1))
    let se = want * (2.0 / (xs.len() - 1) as f64).sqrt();
    assert!((var - want).abs() < 3.0 * se, "{var} vs {want}");
}

#[test]
fn ou_mean_decays_exponentially() {
    let m = classical_ou(2, 1.0, 1.0, 2f64.sqrt()).unwrap();
    let p0 = vec![2.0, -1.0];
    let init = PhasePoint::at_rest_origin(p0.clone()).unwrap();
    let times = vec![0.5, 1.0, 2.0];
    let ens = simulate_ensemble(&[init], &m, &cfg(1e-3, 2.0, 10_000, times.clone(), 17)).unwrap();
    assert!(ens.failed.is_empty());
    for (snap, t) in ens.snapshots.iter().zip(&times) {
        for i in 0..2 {
            let xs: Vec<f64> = snap.momenta.iter().map(|p| p[i]).collect();
            let (mean, se) = mean_and_stderr(&xs);
            let want = p0[i] * (-t).exp();
            assert!((mean - want).abs() < 3.0 * se, "t = {t}, i = {i}: {mean} vs {want} ± {se}");
        }
    }
}

#[test]
fn ou_stationary_variance() {
    // sigma²/(2 b beta) = 2/(2 * 2 * 1) = 0.5
    let m = classical_ou(1, 1.0, 2.0, 2f64.sqrt()).unwrap();
    let init = PhasePoint::at_rest_origin(vec![0.0]).unwrap();
    let ens = simulate_ensemble(&[init], &m, &cfg(1e-3, 4.0, 20_000, vec![4.0], 3)).unwrap();
    let xs: Vec<f64> = ens.snapshots[0].momenta.iter().map(|p| p[0]).collect();
    let (mean, _) = mean_and_stderr(&xs);
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    let se = 0.5 * (2.0 / (xs.len() - 1) as f64).sqrt();
    assert!((var - 0.5).abs() < 3.0 * se + 2e-3, "{var}");
}

#[test]
fn strong_error_shrinks_with_dt() {
    // endpoint error of dt and dt/2 against a dt/4 reference on the same Brownian path
    let m = classical_ou(1, 1.0, 1.0, 2f64.sqrt()).unwrap();
    let (dt, t_end, paths) = (0.02f64, 1.0f64, 2000);
    let fine_steps = (4.0 * t_end / dt).round() as usize;
    let sq = (dt / 4.0).sqrt();
    let mut err = [0.0f64; 2];
    for k in 0..paths {
        let mut rng = substream(123, k as u64);
        let incs: Vec<f64> = (0..fine_steps).map(|_| sq * rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
        let run = |group: usize| {
            let mut st = PhasePoint::at_rest_origin(vec![1.0]).unwrap();
            let h = dt / 4.0 * group as f64;
            for chunk in incs.chunks(group) {
                let noise = NoiseIncrement {
                    dw_vec: vec![chunk.iter().sum()],
                    dw: 0.0,
                };
                st = em_step(&st, &m, h, &noise).unwrap();
            }
            st.p[0]
        };
        let reference = run(1);
        err[0] += (run(4) - reference).abs();
        err[1] += (run(2) - reference).abs();
    }
    let ratio = err[0] / err[1];
    assert!(ratio > 1.2, "ratio {ratio}");
}

#[test]
fn mass_shell_and_proper_time_on_snapshots() {
    let m = builtin_model("dunkel_hanggi", 3, 1.0).unwrap();
    let init = PhasePoint::at_rest_origin(vec![0.0; 3]).unwrap();
    let times: Vec<f64> = (1..=5).map(|k| k as f64).collect();
    let ens = simulate_ensemble(&[init.clone()], &m, &cfg(1e-3, 5.0, 200, times.clone(), 8)).unwrap();
    for snap in &ens.snapshots {
        for (p, &p0) in snap.momenta.iter().zip(&snap.energies) {
            let r = norm(p);
            assert!(((p0 - r) * (p0 + r) - 1.0).abs() < 1e-10);
        }
    }
    let mut c = cfg(1e-3, 5.0, 1, times, 8);
    c.record_positions = true;
    let traj = simulate_trajectory(&init, &m, &c).unwrap();
    let last = traj.points.last().unwrap();
    assert!(last.s < last.t);
}

#[test]
fn sampled_equilibrium_stays_put() {
    let m = builtin_model("roup", 3, 1.0).unwrap();
    let nu = build_measure(&m, &RadialGrid::new(50.0, 4096).unwrap()).unwrap();
    let n = 10_000;
    let inits: Vec<PhasePoint> = sample_equilibrium(&nu, n, 77)
        .unwrap()
        .into_iter()
        .map(|p| PhasePoint::at_rest_origin(p).unwrap())
        .collect();
    let ens = simulate_ensemble(&inits, &m, &cfg(1e-3, 4.0, n, vec![0.0, 2.0, 4.0], 12)).unwrap();
    let want = nu.radial_moment(1);
    for snap in &ens.snapshots {
        let radii: Vec<f64> = snap.momenta.iter().map(|p| norm(p)).collect();
        let (mean, se) = mean_and_stderr(&radii);
        assert!((mean - want).abs() < 3.0 * se, "t = {}: {mean} vs {want}", snap.time);
    }
}

#[test]
fn permuted_inits_with_their_streams_permute_outputs() {
    let m = builtin_model("roup", 2, 1.0).unwrap();
    let inits: Vec<PhasePoint> = (0..6)
        .map(|k| PhasePoint::at_rest_origin(vec![k as f64 * 0.3, 1.0 - k as f64 * 0.1]).unwrap())
        .collect();
    let c = cfg(1e-2, 1.0, 6, vec![1.0], 4);
    let streams: Vec<u64> = (0..6).collect();
    let perm = [3usize, 0, 5, 1, 4, 2];
    let a = simulate_ensemble_on_streams(&inits, &streams, &m, &c).unwrap();
    let p_inits: Vec<PhasePoint> = perm.iter().map(|&k| inits[k].clone()).collect();
    let p_streams: Vec<u64> = perm.iter().map(|&k| streams[k]).collect();
    let b = simulate_ensemble_on_streams(&p_inits, &p_streams, &m, &c).unwrap();
    for (j, &k) in perm.iter().enumerate() {
        assert_eq!(b.snapshots[0].momenta[j], a.snapshots[0].momenta[k]);
    }
}

#[test]
fn failed_paths_are_flagged_not_dropped() {
    let mut m = classical_ou(1, 1.0, 1.0, 1.0).unwrap();
    // explosive drift: p grows geometrically by 1e100 per step
    m.b = RadialFn::Const(-1e102);
    let init = PhasePoint::at_rest_origin(vec![1.0]).unwrap();
    let ens = simulate_ensemble(&[init], &m, &cfg(0.01, 1.0, 3, vec![0.5, 1.0], 1)).unwrap();
    assert_eq!(ens.failed.len(), 3);
    assert_eq!(ens.snapshots[1].momenta.len(), 3);
    assert!(ens.snapshots[1].momenta.iter().all(|p| p[0].is_nan()));
}
