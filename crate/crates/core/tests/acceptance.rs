//! End-to-end acceptance checks. Runs without the test harness so every
//! check prints its `PASS`/`FAIL` line; the process fails if any check does.

use std::time::Instant;

use blocksvd::sim::{concentration_diag, log_grid, monte_carlo, rate_slope, ExperimentConfig, ProblemSpec, SampleSize};
use blocksvd::sphere::{
    analyze, convolve_blocks, harmonics_at, mat_vec, so3_transform, synthesize, wigner_d_block, RotationZYZ,
    So3Quadrature, SpherePoint, SphereQuadrature, SphericalCoeffs,
};
use blocksvd::{estimate, gaussian_bump_coeffs, power_law_operator, power_law_signal, squared_error, tail_energy};
use blocksvd::{DenseMatrix, EstimatorConfig};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: u32, name: &str, pass: bool, detail: String, started: Instant) -> bool {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("criterion {id} [{status}] {name}: {detail} ({:.1}s)", started.elapsed().as_secs_f64());
    pass
}

fn circular(nu: f64) -> ExperimentConfig {
    ExperimentConfig {
        problem: ProblemSpec::CircularPowerLaw { s_exponent: 5.0, nu, k_max: 1000 },
        delta_grid: log_grid(1e-4, 1e-2, 6),
        n: SampleSize::INFINITE,
        replicates: 200,
        lambda0: 1.0,
        mu0: 0.0,
        l_override: None,
        noise: Default::default(),
        master_seed: 20_240_601,
    }
}

/// Fitted slope, mean risks and the largest share of risk due to truncation.
fn slope_of(cfg: &ExperimentConfig) -> (f64, Vec<f64>, f64) {
    let summary = monte_carlo::<f64>(cfg, None).unwrap();
    let slope = rate_slope(&summary.rate_points().unwrap()).unwrap();
    (slope, summary.rows.iter().map(|r| r.mean).collect(), summary.max_bias_fraction())
}

fn criterion_1_exact_recovery() -> bool {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for nu in [1.0, 2.0] {
        let k = power_law_operator(nu, 100).unwrap();
        let f = power_law_signal(5.0, 100).unwrap().into_coeffs();
        let z = k.apply(&f).unwrap();
        for l in [1, 2, 7, 50, 101] {
            let cfg = EstimatorConfig::new(0.0, f64::INFINITY, nu, 1.0).unwrap().with_override(Some(l)).unwrap();
            let report = estimate(&z, &k, &cfg).unwrap();
            let err = squared_error(&report.f_hat, &f).unwrap();
            // tail bias summed directly from the power law
            let tail: f64 = (l..=100).map(|j| 2.0 * (j as f64).powi(-10)).sum();
            worst = worst.max((err - tail).abs()).max((err - tail_energy(&f, l)).abs());
        }
    }
    verdict(1, "exact recovery", worst <= 1e-10, format!("max |error - tail| = {worst:e}"), t)
}

fn criterion_2_dominant_slope() -> bool {
    let t = Instant::now();
    let (s1, _, b1) = slope_of(&circular(1.0));
    let (s4, _, b4) = slope_of(&circular(4.0));
    let ok = [s1, s4].iter().all(|s| (1.8..=2.2).contains(s));
    let detail = format!("slopes {s1:.4}, {s4:.4}; truncation share of risk at most {:.2e}", b1.max(b4));
    verdict(2, "slope near 2 for nu = 1, 4", ok, detail, t)
}

fn criterion_3_slope_ordering() -> bool {
    let t = Instant::now();
    let (s1, r1, _) = slope_of(&circular(1.0));
    let (s8, r8, b8) = slope_of(&circular(8.0));
    let above = r8.iter().zip(&r1).all(|(a, b)| a > b);
    let ok = s8 <= s1 - 0.4 && above;
    verdict(
        3,
        "nu = 8 flatter and above nu = 1",
        ok,
        format!("slopes {s8:.4} vs {s1:.4}, curve above: {above}, nu = 8 truncation share up to {b8:.2}"),
        t,
    )
}

fn criterion_4_sphere_table_ratios() -> bool {
    let t = Instant::now();
    let cfg = ExperimentConfig {
        problem: ProblemSpec::SphericalLaplace { l_max: 30 },
        delta_grid: vec![0.0, 1e-3, 3e-3, 5e-3, 1e-2],
        n: SampleSize(1e8),
        replicates: 300,
        lambda0: 1.0,
        mu0: 1.0,
        l_override: None,
        noise: Default::default(),
        master_seed: 4_101,
    };
    let summary = monte_carlo::<f64>(&cfg, None).unwrap();
    let base = summary.rows[0].mean;
    let ratios: Vec<f64> = summary.rows[1..].iter().map(|r| r.mean / base).collect();
    let monotone = ratios.windows(2).all(|w| w[1] > w[0]);
    let ok = monotone && (2.5..=5.5).contains(&ratios[1]);
    let means: Vec<String> = summary.rows.iter().map(|r| format!("{:.4e}", r.mean)).collect();
    verdict(4, "sphere table ratios", ok, format!("means [{}], ratios {ratios:.3?}", means.join(", ")), t)
}

fn test_function(p: &SpherePoint<f64>) -> f64 {
    let [x, y, z] = p.to_cartesian();
    0.4 + x + 2.0 * y * z + x * x - 0.5 * z * z * z + 0.3 * x * y * z - y * y * y * y
}

fn criterion_5_convolution_oracle() -> bool {
    let t = Instant::now();
    let l_max = 4;
    let zonal = |r: &RotationZYZ<f64>| (1.5 * r.theta.cos()).exp() + 0.2 * (2.0 * r.theta).sin().powi(2);
    let sphere_quad = SphereQuadrature::for_degree(l_max);
    let f = analyze(test_function, l_max, &sphere_quad).unwrap();
    let op = so3_transform(|r| Complex::new(zonal(r), 0.0), l_max, &So3Quadrature::new(24, 24)).unwrap();
    let blocks = convolve_blocks(&op, &f).unwrap().coeffs().flatten();

    // (g * f)(ω) = ∫ g(r) f(r⁻¹ω) dr on a product grid, then projected
    let nodes = So3Quadrature::new(30, 30).nodes::<f64>();
    let mats: Vec<_> = nodes.iter().map(|(r, w)| (r.inverse().matrix(), zonal(r) * w)).collect();
    let conv = |p: &SpherePoint<f64>| {
        let v = p.to_cartesian();
        mats.iter().map(|(m, w)| w * test_function(&SpherePoint::from_cartesian(mat_vec(m, &v)))).sum::<f64>()
    };
    let direct = analyze(conv, l_max, &sphere_quad).unwrap().coeffs().flatten();
    let err = blocks.iter().zip(&direct).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    verdict(5, "block convolution vs double quadrature", err <= 1e-6, format!("sup error {err:e}"), t)
}

fn random_rotation(rng: &mut ChaCha8Rng) -> RotationZYZ<f64> {
    let tau = std::f64::consts::TAU;
    RotationZYZ::new(rng.random::<f64>() * tau, (2.0 * rng.random::<f64>() - 1.0).acos(), rng.random::<f64>() * tau)
        .unwrap()
}

fn random_real_coeffs(l_max: usize, rng: &mut ChaCha8Rng) -> SphericalCoeffs<f64> {
    let mut flat = vec![Complex::new(0.0, 0.0); (l_max + 1) * (l_max + 1)];
    for l in 0..=l_max as i64 {
        let base = (l * l + l) as usize;
        flat[base] = Complex::new(rng.random::<f64>() - 0.5, 0.0);
        for m in 1..=l {
            let c = Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            flat[base + m as usize] = c;
            flat[base - m as usize] = c.conj() * if m % 2 == 0 { 1.0 } else { -1.0 };
        }
    }
    SphericalCoeffs::from_flat(l_max, &flat, true).unwrap()
}

fn criterion_6_harmonic_invariants() -> bool {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut unitary, mut compose) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let (a, b) = (random_rotation(&mut rng), random_rotation(&mut rng));
        for l in 0..=10 {
            let d = wigner_d_block(l, &a);
            let gram = d.matmul(&d.adjoint()).unwrap();
            unitary = unitary.max(gram.add_scaled(&DenseMatrix::identity(2 * l + 1), -1.0).unwrap().max_abs());
            let lhs = wigner_d_block(l, &a.compose(&b));
            let rhs = d.matmul(&wigner_d_block(l, &b)).unwrap();
            compose = compose.max(lhs.add_scaled(&rhs, -1.0).unwrap().max_abs());
        }
    }

    let l_max = 12;
    let quad = SphereQuadrature::<f64>::for_degree(2 * l_max);
    let size = (l_max + 1) * (l_max + 1);
    let mut gram = vec![Complex::new(0.0, 0.0); size * size];
    for (p, w) in quad.nodes() {
        let y = harmonics_at(l_max, &p);
        for i in 0..size {
            for j in 0..size {
                gram[i * size + j] += y[i] * y[j].conj() * w;
            }
        }
    }
    let ortho = (0..size * size)
        .map(|k| (gram[k] - Complex::new(if k / size == k % size { 1.0 } else { 0.0 }, 0.0)).norm())
        .fold(0.0, f64::max);

    let f = random_real_coeffs(l_max, &mut rng);
    let grid: Vec<SpherePoint<f64>> = quad.nodes().map(|(p, _)| p).collect();
    let values = synthesize(&f, &grid).unwrap();
    let back = analyze(|p| values[grid.iter().position(|q| q == p).unwrap()], l_max, &quad).unwrap();
    let roundtrip =
        f.coeffs().flatten().iter().zip(back.coeffs().flatten()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);

    let ok = unitary <= 1e-8 && compose <= 1e-8 && ortho <= 1e-10 && roundtrip <= 1e-8;
    verdict(
        6,
        "harmonic invariants",
        ok,
        format!("unitarity {unitary:e}, composition {compose:e}, orthonormality {ortho:e}, roundtrip {roundtrip:e}"),
        t,
    )
}

fn criterion_7_concentration() -> bool {
    let t = Instant::now();
    let s = concentration_diag(64, 100_000, 7).unwrap();
    let beta4 = s.tail_estimates.iter().find(|e| e.beta == 4.0).unwrap();
    let bound = (-4.0f64).exp();
    let ok = (1.7..=2.3).contains(&s.mean_op_norm_scaled)
        && (0.97..=1.03).contains(&s.mean_vec_norm_scaled)
        && beta4.vec_norm < bound
        && beta4.op_norm < bound;
    let detail = format!(
        "op {:.4}, vec {:.5}, exceedance at 4: op {}, vec {}",
        s.mean_op_norm_scaled, s.mean_vec_norm_scaled, beta4.op_norm, beta4.vec_norm
    );
    verdict(7, "concentration diagnostics", ok, detail, t)
}

fn criterion_8_bump_norm() -> bool {
    let t = Instant::now();
    let norm = gaussian_bump_coeffs::<f64>(30).unwrap().norm();
    // ‖f‖² = ½ ∫_{-1}^{1} C² e^{-16(1-t)} dt by composite Simpson
    let c = blocksvd::sphere::BUMP_NORMALIZER;
    let m = 200_000;
    let h = 2.0 / m as f64;
    let g = |t: f64| 0.5 * c * c * (-16.0 * (1.0 - t)).exp();
    let simpson: f64 = (0..=m)
        .map(|i| {
            let w = if i == 0 || i == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * g(-1.0 + i as f64 * h)
        })
        .sum::<f64>()
        * h
        / 3.0;
    let oracle = simpson.sqrt();
    let diff = (norm - oracle).abs();
    println!("criterion 8 note: reported reference value 0.7469 vs computed {norm:.4} (flagged, not asserted)");
    verdict(8, "bump norm", diff <= 1e-4, format!("coefficient norm {norm:.10}, oracle {oracle:.10}"), t)
}

fn criterion_9_determinism() -> bool {
    let t = Instant::now();
    let mut cfg = circular(2.0);
    cfg.n = SampleSize(1e6);
    cfg.mu0 = 1.0;
    cfg.replicates = 64;
    let csv: Vec<String> = [1, 2, 8].iter().map(|&k| monte_carlo::<f64>(&cfg, Some(k)).unwrap().to_csv()).collect();
    let ok = csv.windows(2).all(|w| w[0] == w[1]);
    verdict(9, "determinism across 1, 2, 8 threads", ok, format!("{} CSV bytes each", csv[0].len()), t)
}

fn main() {
    let checks: [fn() -> bool; 9] = [
        criterion_1_exact_recovery,
        criterion_2_dominant_slope,
        criterion_3_slope_ordering,
        criterion_4_sphere_table_ratios,
        criterion_5_convolution_oracle,
        criterion_6_harmonic_invariants,
        criterion_7_concentration,
        criterion_8_bump_norm,
        criterion_9_determinism,
    ];
    let failed = checks.iter().filter(|check| !check()).count();
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
