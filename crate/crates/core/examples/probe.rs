use extra_newton::constraints::FeasibleSet;
use extra_newton::diagnostics::estimate_rate_slope;
use extra_newton::extra_newton::{ExtraNewton, Init, SolverOptions};
use extra_newton::oracles::{OracleConfig, OracleMode};
use extra_newton::problems::{logistic_regression, reference_optimum, synthetic_quadratic, Objective};
use extra_newton::data_io::{parse_libsvm_path, LibsvmOptions};
use extra_newton::Vector;
use std::time::Instant;

fn main() {
    // --- criterion 4 probe: quadratic degeneracy ---
    let t0 = Instant::now();
    let (quad, x_star) = synthetic_quadratic(20, 100.0, 7).unwrap();
    println!("|x*| = {}", x_star.norm());
    let set = FeasibleSet::ball(Vector::zeros(20), 2.0).unwrap();
    let out = ExtraNewton::new(&quad, &set, OracleConfig::deterministic(), SolverOptions::default(), Init::Auto)
        .unwrap().run(200, None).unwrap();
    let f_star = quad.value(&x_star);
    let min_gap = out.trace.records.iter().map(|r| r.f_at_xbar - f_star).fold(f64::INFINITY, f64::min);
    let max_resid = out.trace.records.iter().map(|r| r.residual).fold(0.0f64, f64::max);
    let g0 = out.trace.records[0].gamma;
    let gvar = out.trace.records.iter().map(|r| (r.gamma - g0).abs()).fold(0.0f64, f64::max);
    println!("[c4] min gap {:.3e}, max residual {:.3e}, gamma span {:.3e}, {:?}", min_gap, max_resid, gvar, t0.elapsed());

    // --- criterion 5 probe: deterministic logistic slope ---
    let t0 = Instant::now();
    let ds = parse_libsvm_path("data/a1a_synth.libsvm".as_ref(), &LibsvmOptions::default()).unwrap().take(500).unwrap();
    let obj = logistic_regression(ds, 0.0).unwrap();
    let set = FeasibleSet::ball(Vector::zeros(123), 10.0).unwrap();
    let (x_ref, f_ref) = reference_optimum(&obj, &set, 1e-10).unwrap();
    println!("f* = {:.15}, |x*| = {:.4}, grad at x* = {:.3e}, {:?}", f_ref, x_ref.norm(), obj.gradient(&x_ref).norm(), t0.elapsed());
    let t0 = Instant::now();
    let out = ExtraNewton::new(&obj, &set, OracleConfig::deterministic(), SolverOptions::default(), Init::Auto)
        .unwrap().run(1024, None).unwrap();
    let gaps = out.trace.gaps(f_ref);
    for &t in &[64u64, 128, 256, 512, 1024] {
        let g = gaps.iter().find(|(tt, _)| *tt == t).unwrap().1;
        println!("  T={t:5} gap={g:.6e} gamma={:.4}", out.trace.records[(t-1) as usize].gamma);
    }
    let slope = estimate_rate_slope(&gaps, (64, 1024));
    println!("[c5] slope {:?}, det wall {:?}", slope, t0.elapsed());
    let det_gammas = out.trace.gamma_series();

    // --- criterion 6 probe: stochastic slope (3 seeds for speed) ---
    let t0 = Instant::now();
    let horizon = 4096u64;
    let seeds = 3u64;
    let mut mean_gaps = vec![0.0f64; horizon as usize];
    let mut sto_gammas = vec![0.0f64; horizon as usize];
    for s in 0..seeds {
        let cfg = OracleConfig { mode: OracleMode::AdditiveNoise { sigma_g: 1.0, sigma_h: 0.1 }, psd_repair: true, seed: 100 + s };
        let out = ExtraNewton::new(&obj, &set, cfg, SolverOptions::default(), Init::Auto)
            .unwrap().run(horizon, None).unwrap();
        for (k, r) in out.trace.records.iter().enumerate() {
            mean_gaps[k] += (r.f_at_xbar - f_ref) / seeds as f64;
            if s == 0 { sto_gammas[k] = r.gamma; }
        }
    }
    let series: Vec<(u64, f64)> = (1..=horizon).map(|t| (t, mean_gaps[(t-1) as usize])).collect();
    for &t in &[256u64, 512, 1024, 2048, 4096] {
        println!("  T={t:5} mean gap={:.6e} gamma={:.5}", series[(t-1) as usize].1, sto_gammas[(t-1) as usize]);
    }
    println!("[c6] slope {:?}, wall {:?} ({} seeds)", estimate_rate_slope(&series, (256, 4096)), t0.elapsed(), seeds);

    // --- criterion 7 probe: noise adaptivity ratios at T=4096 ---
    let t0 = Instant::now();
    let out_det = ExtraNewton::new(&obj, &set, OracleConfig::deterministic(), SolverOptions::default(), Init::Auto)
        .unwrap().run(horizon, None).unwrap();
    let dg = out_det.trace.gamma_series();
    println!("[c7] det gamma(T)={:.4} gamma(T/2)={:.4} ratio={:.4}", dg[4095], dg[2047], dg[4095]/dg[2047]);
    println!("[c7] sto gamma(T)={:.5} gamma(T/2)={:.5} ratio={:.4}", sto_gammas[4095], sto_gammas[2047], sto_gammas[4095]/sto_gammas[2047]);
    println!("[c7] det>=sto: {}, det wall(4096) {:?}", dg[4095] >= sto_gammas[4095], t0.elapsed());
    let _ = det_gammas;
}
