use reldiff_core::quadrature::trapezoid_uniform;
use reldiff_core::stats::{ks_critical_value, ks_statistic};
use reldiff_core::*;

// Jüttner normalizers |p| -> r^{d-1} exp(-beta sqrt(1+r²)):
// d = 1: ∫_0^∞ exp(-beta cosh u) cosh u du = K_1(beta)
// d = 3: ∫_0^∞ r² exp(-beta sqrt(1+r²)) dr = K_2(beta) / beta
const K1_AT_1: f64 = 0.6019072301972346;
const K2_AT_1: f64 = 1.6248388986351774;
const K2_AT_2: f64 = 0.2537597545660559;

fn juttner_pdf(d: usize, beta: f64, r: f64) -> f64 {
    let z = match (d, beta) {
        (1, b) if b == 1.0 => K1_AT_1,
        (3, b) if b == 1.0 => K2_AT_1,
        (3, b) if b == 2.0 => K2_AT_2 / 2.0,
        _ => unreachable!(),
    };
    r.powi(d as i32 - 1) * (-beta * (1.0 + r * r).sqrt()).exp() / z
}

fn grid() -> RadialGrid {
    RadialGrid::new(50.0, 4096).unwrap()
}

#[test]
fn juttner_radial_density() {
    for name in ["roup", "dunkel_hanggi"] {
        for (d, beta) in [(1, 1.0), (3, 1.0), (3, 2.0)] {
            let m = builtin_model(name, d, beta).unwrap();
            let nu = build_measure(&m, &grid()).unwrap();
            let mut sup = 0.0f64;
            for (r, p) in nu.r.iter().zip(&nu.radial_pdf) {
                let want = juttner_pdf(d, beta, *r);
                if want > 1e-300 {
                    sup = sup.max((p / want - 1.0).abs());
                }
            }
            assert!(sup < 1e-8, "{name} d={d} beta={beta}: {sup:e}");
        }
    }
}

#[test]
fn roup_and_dunkel_hanggi_share_their_equilibrium() {
    let a = build_measure(&builtin_model("roup", 3, 1.0).unwrap(), &grid()).unwrap();
    let b = build_measure(&builtin_model("dunkel_hanggi", 3, 1.0).unwrap(), &grid()).unwrap();
    for (x, y) in a.radial_pdf.iter().zip(&b.radial_pdf) {
        if *x > 1e-300 {
            assert!((x / y - 1.0).abs() < 1e-8);
        }
    }
}

#[test]
fn normalization_on_the_grid() {
    for (name, d) in [("roup", 3), ("dunkel_hanggi", 1), ("classical_ou", 3)] {
        let m = builtin_model(name, d, 1.0).unwrap();
        let nu = build_measure(&m, &grid()).unwrap();
        let total = trapezoid_uniform(&nu.radial_pdf, nu.grid.step());
        assert!((total - 1.0).abs() < 1e-8, "{name}: {total}");
    }
}

#[test]
fn normalizing_constant_includes_the_sphere() {
    // Z = ∫_{R^3} exp(-sqrt(1+|p|²)) / sigma² dp = 4 pi K_2(1) / 2 for ROUP
    // (sigma² = 2, G = sqrt(1+r²) - 1 contributes exp(beta))
    let m = builtin_model("roup", 3, 1.0).unwrap();
    let nu = build_measure(&m, &grid()).unwrap();
    let want = 4.0 * std::f64::consts::PI * K2_AT_1 / 2.0 * 1f64.exp();
    assert!((nu.z / want - 1.0).abs() < 1e-9, "{} vs {want}", nu.z);
}

#[test]
fn stationarity_at_two_resolutions() {
    for name in ["roup", "dunkel_hanggi"] {
        let m = builtin_model(name, 3, 1.0).unwrap();
        for nodes in [2048, 4096] {
            let nu = build_measure(&m, &RadialGrid::new(50.0, nodes).unwrap()).unwrap();
            let fns = [
                TestFn::cartesian(|p| p[0]),
                TestFn::radial(|r| r * r),
                TestFn::radial(|r| (-r * r).exp()),
            ];
            for f in &fns {
                let res = stationarity_residual(&nu, f).unwrap();
                assert!(res.value.abs() < 1e-6, "{name} at {nodes}: {res:?}");
            }
        }
    }
}

#[test]
fn analytic_derivatives_agree_with_differences() {
    let m = builtin_model("dunkel_hanggi", 3, 1.0).unwrap();
    let nu = build_measure(&m, &grid()).unwrap();
    let exact = TestFn::Radial {
        value: Box::new(|r| (-r * r).exp()),
        d1: Some(Box::new(|r| -2.0 * r * (-r * r).exp())),
        d2: Some(Box::new(|r| (4.0 * r * r - 2.0) * (-r * r).exp())),
    };
    let a = stationarity_residual(&nu, &exact).unwrap();
    let b = stationarity_residual(&nu, &TestFn::radial(|r| (-r * r).exp())).unwrap();
    assert!(a.value.abs() < 1e-8, "{a:?}");
    assert!((a.value - b.value).abs() < 1e-6);
    let cart = TestFn::Cartesian {
        value: Box::new(|p| p[0] * p[0]),
        grad: Some(Box::new(|p, g| {
            g.fill(0.0);
            g[0] = 2.0 * p[0];
        })),
        laplacian: Some(Box::new(|_| 2.0)),
    };
    assert!(stationarity_residual(&nu, &cart).unwrap().value.abs() < 1e-8);
}

#[test]
fn g_eventually_dominates_a_linear_rate() {
    // G(r) >= eps r / 2 for large r; for ROUP already from the tail start
    let m = builtin_model("roup", 3, 1.0).unwrap();
    let nu = build_measure(&m, &grid()).unwrap();
    for (r, g) in nu.r.iter().zip(&nu.g_int) {
        if *r >= 5.0 {
            assert!(*g >= m.epsilon * r / 2.0);
        }
    }
    let m = builtin_model("dunkel_hanggi", 3, 1.0).unwrap();
    let nu = build_measure(&m, &grid()).unwrap();
    let below: Vec<f64> = nu
        .r
        .iter()
        .zip(&nu.g_int)
        .filter(|(r, g)| **g < m.epsilon * **r / 2.0)
        .map(|(r, _)| *r)
        .collect();
    let last = below.last().copied().unwrap_or(0.0);
    assert!(last < 25.0, "G(r) < eps r / 2 up to r = {last}");
}

#[test]
fn sampler_ks_for_dunkel_hanggi_in_one_dimension() {
    let m = builtin_model("dunkel_hanggi", 1, 2.0).unwrap();
    let nu = build_measure(&m, &grid()).unwrap();
    let n = 50_000;
    let xs = sample_equilibrium(&nu, n, 2024).unwrap();
    let neg = xs.iter().filter(|p| p[0] < 0.0).count() as f64 / n as f64;
    assert!((neg - 0.5).abs() < 3.0 * 0.5 / (n as f64).sqrt());
    let radii: Vec<f64> = xs.iter().map(|p| p[0].abs()).collect();
    assert!(ks_statistic(&radii, |r| nu.radial_cdf_at(r)) < ks_critical_value(n, 0.01));
}
