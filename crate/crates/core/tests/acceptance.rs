//! Acceptance suite. Runs every criterion in order, prints one PASS/FAIL line
//! each and exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;

use coag::kernels::{burgers_constant, EtaDensity, KernelSpec, Normalization};
use coag::lattice::{entropy_gap, nwave_error, riemann_front_speed, LatticeIntegrator, LatticeState};
use coag::quadrature::{integrate, QuadParams};
use coag::reference::{additive_g1, additive_g_rho, oscillation_count};
use coag::spectral::{
    dominant_root, m_alpha_closed, m_quadrature, near_diagonal_m, near_diagonal_w, oscillation_threshold,
    stability_scan, stability_threshold, RootSearch, Verdict, K1,
};
use coag::wavesim::{
    back_region, front_position, simulate, traveling_wave_residual, FieldState, InitialCondition, SamplingRule,
    SimConfig, SimOutput,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: coag::Error) -> String {
    format!("error: {e}")
}

fn normalization_identities() -> Outcome {
    let quad = QuadParams::new(1e-12, 1e-12);
    let mut worst_a: f64 = 0.0;
    for alpha in [2.0, 8.0, 35.0] {
        let k = KernelSpec::alpha(alpha, Normalization::AUnit).map_err(err)?;
        let a = burgers_constant(&k, &quad).map_err(err)?.value().ok_or("divergent")?;
        worst_a = worst_a.max((a - 1.0).abs());
    }
    let mut worst_s: f64 = 0.0;
    for alpha in [0.6, 2.0, 8.0] {
        let k = KernelSpec::alpha(alpha, Normalization::SimplexUnit).map_err(err)?;
        let v = integrate(|x| k.eval(x, 1.0 - x).unwrap(), 0.0, 1.0, &quad).map_err(err)?.value;
        worst_s = worst_s.max((v - 1.0).abs());
    }
    check(
        worst_a <= 1e-6 && worst_s <= 1e-8,
        format!("max |A-1| = {worst_a:.1e}, max |simplex integral - 1| = {worst_s:.1e}"),
    )
}

fn spectral_cross_validation() -> Outcome {
    let quad = QuadParams::new(1e-12, 1e-10);
    let ks: Vec<f64> = (0..50).map(|i| -20.0 + 40.0 * (i as f64 + 0.5) / 50.0).collect();
    let mut worst: f64 = 0.0;
    for alpha in [2.0, 8.0, 35.0] {
        let kernel = KernelSpec::alpha(alpha, Normalization::AUnit).map_err(err)?;
        for &k in &ks {
            let closed = m_alpha_closed(alpha, Complex64::new(k, 0.0)).map_err(err)?;
            let q = m_quadrature(&kernel, k, &quad).map_err(err)?.m;
            worst = worst.max((q - closed).norm() / closed.norm());
        }
    }
    check(worst <= 1e-6, format!("max relative deviation {worst:.2e} over 150 points"))
}

fn stability_threshold_check() -> Outcome {
    let mut verdicts = Vec::new();
    for (alpha, want) in [
        (3.0, Verdict::Stable),
        (30.0, Verdict::Stable),
        (40.0, Verdict::Unstable),
        (60.0, Verdict::Unstable),
    ] {
        let scan = stability_scan(alpha, 40.0, 0.01).map_err(err)?;
        verdicts.push((alpha, scan.verdict, scan.verdict == want));
    }
    let crit = stability_threshold(30.0, 40.0, 40.0, 0.01, 1e-3).map_err(err)?;
    let ok = verdicts.iter().all(|v| v.2) && (crit - 35.0).abs() <= 1.0;
    let desc: Vec<String> = verdicts.iter().map(|v| format!("{}:{:?}", v.0, v.1)).collect();
    check(ok, format!("{}; threshold {crit:.3}", desc.join(" ")))
}

fn oscillation_threshold_check() -> Outcome {
    let search = RootSearch::default();
    let r15 = dominant_root(15.0, &search).map_err(err)?;
    let r25 = dominant_root(25.0, &search).map_err(err)?;
    let star = oscillation_threshold(15.0, 25.0, &search, 1e-3).map_err(err)?;
    let ok = r15.k.re.abs() >= 1e-6 && r25.k.re.abs() < 1e-6 && (star - 20.1).abs() <= 0.5;
    check(
        ok,
        format!(
            "alpha 15: {:.4}{:+.4}i, alpha 25: {:.1e}{:+.4}i, threshold {star:.3}",
            r15.k.re, r15.k.im, r25.k.re, r25.k.im
        ),
    )
}

fn near_diagonal_instability() -> Outcome {
    let quad = QuadParams::new(1e-12, 1e-10);
    let m = near_diagonal_m(K1, 0.05, &EtaDensity::Uniform, &quad).map_err(err)?;
    let s = 0.005;
    let w = near_diagonal_w(K1, s).map_err(err)?;
    let lead = -32.0 * (K1 * s).powi(2);
    let rel = (w.re / lead - 1.0).abs();
    check(
        m.re > 0.0 && rel <= 0.05,
        format!("Re M(k1) = {:.3e}, Re W / leading term - 1 = {rel:.2e}", m.re),
    )
}

fn lattice_nwave() -> Outcome {
    let s0 = LatticeState::box_data(1.0, 1).map_err(err)?;
    let (mass0, w0) = (s0.mass(), s0.max_upward_jump());
    let mut integ = LatticeIntegrator::new(s0, 1e-10).map_err(err)?;
    let (mut gap, mut drift): (f64, f64) = (f64::NEG_INFINITY, 0.0);
    let mut errs = Vec::new();
    for i in 1..=400 {
        let t = i as f64;
        integ.advance_to(t).map_err(err)?;
        gap = gap.max(entropy_gap(&integ.state, w0));
        drift = drift.max((integ.state.mass() - mass0).abs());
        if [25, 100, 400].contains(&i) {
            errs.push(nwave_error(&integ.state, 1.0));
        }
    }
    check(
        errs[2] < errs[1] && errs[1] < errs[0] && gap <= 1e-6 && drift <= 1e-8,
        format!(
            "N-wave error {:.4} > {:.4} > {:.4} (t=25,100,400), max entropy gap {gap:.1e}, mass drift {drift:.1e}",
            errs[0], errs[1], errs[2]
        ),
    )
}

fn lattice_front_speed() -> Outcome {
    let v = riemann_front_speed(1.0, 20.0, 40.0, 1e-10).map_err(err)?;
    check((v - 1.0).abs() <= 0.05, format!("speed {v:.5}"))
}

fn riemann_config(alpha: f64) -> Result<SimConfig, String> {
    Ok(SimConfig {
        kernel: KernelSpec::alpha(alpha, Normalization::SimplexUnit).map_err(err)?,
        eps: 0.05,
        l: 40.0,
        r: 25.0,
        tau: None,
        t_end: 2.5,
        snapshot: 0.0,
        init: InitialCondition::Riemann {
            c_minus: 1.0,
            x0: 1.0,
            smooth: true,
        },
        rule: SamplingRule::Gregory,
    })
}

fn back_oscillations(s: &FieldState) -> Result<(usize, f64), String> {
    let front = front_position(s, 0.5).map_err(err)?;
    Ok((oscillation_count(&back_region(s, front, 15.0, 2.0), 1.0, 1e-4), front))
}

fn morphology(run25: &SimOutput, run3: &SimOutput) -> Outcome {
    let (n25, f25) = back_oscillations(run25.last())?;
    let (n3, f3) = back_oscillations(run3.last())?;
    check(
        n25 == 0 && n3 >= 2,
        format!("alpha 25: {n25} sign changes (front {f25:.2}); alpha 3: {n3} sign changes (front {f3:.2})"),
    )
}

fn linear_fit_r2(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    sxy * sxy / (sxx * syy)
}

struct NwaveShape {
    r2: f64,
    front_width: f64,
    support: f64,
}

fn nwave_shape(s: &FieldState) -> Result<NwaveShape, String> {
    let top = s.max();
    let peak = s.u.iter().position(|&v| v == top).unwrap();
    let left = s.u.iter().position(|&v| v > 0.05 * top).unwrap();
    let (xa, xb) = (s.x(left), s.x(peak) - 2.0);
    let xa = xa + 0.1 * (xb - xa);
    let pts: Vec<(f64, f64)> = (0..s.u.len())
        .filter(|&i| s.x(i) >= xa && s.x(i) <= xb)
        .map(|i| (s.x(i), s.u[i]))
        .collect();
    let f9 = front_position(s, 0.9 * top).map_err(err)?;
    let f1 = front_position(s, 0.1 * top).map_err(err)?;
    Ok(NwaveShape {
        r2: linear_fit_r2(&pts),
        front_width: f1 - f9,
        support: f1 - s.x(left),
    })
}

fn nwave_emergence() -> Outcome {
    let cfg = SimConfig {
        kernel: KernelSpec::alpha(8.0, Normalization::SimplexUnit).map_err(err)?,
        eps: 0.05,
        l: 40.0,
        r: 25.0,
        tau: None,
        t_end: 12.0,
        snapshot: 4.0,
        init: InitialCondition::Bump {
            center: 4.0,
            width: 0.8,
            height: 0.5,
        },
        rule: SamplingRule::Gregory,
    };
    let out = simulate(&cfg).map_err(err)?;
    let mid = out.snapshots.iter().find(|s| (s.t - 4.0).abs() < 1e-9).ok_or("missing T=4 snapshot")?;
    let (a, b) = (nwave_shape(mid)?, nwave_shape(out.last())?);
    check(
        b.r2 > 0.99 && b.front_width <= 3.0 && b.front_width <= 1.2 * a.front_width && b.support >= 1.5 * a.support,
        format!(
            "R² {:.5}; front width {:.2} -> {:.2}, support {:.2} -> {:.2} (T=4 -> 12)",
            b.r2, a.front_width, b.front_width, a.support, b.support
        ),
    )
}

fn oracle_residuals() -> Outcome {
    let quad = QuadParams::new(1e-10, 1e-10);
    let xs = [-3.0, -1.0, 0.0, 1.0, 2.0];
    let g1 = traveling_wave_residual(additive_g1, &KernelSpec::additive(), 2.0, &xs, 60.0, &quad).map_err(err)?;
    let k8 = KernelSpec::alpha(8.0, Normalization::AUnit).map_err(err)?;
    let c = traveling_wave_residual(|_| 1.0, &k8, 1.0, &xs, 60.0, &quad).map_err(err)?;
    check(
        g1 <= 1e-4 && c <= 1e-8,
        format!("G1 residual {g1:.2e}, constant-profile residual {c:.2e}"),
    )
}

fn g_rho_left_slope() -> Outcome {
    let mut worst: f64 = 0.0;
    for rho in [0.3, 0.5, 0.8] {
        let beta = rho / (1.0 + rho);
        let h = 1e-3;
        for x in [-20.0, -40.0] {
            let g = |x: f64| additive_g_rho(x, rho, 60).map(|s| s.value);
            let slope = (g(x + h).map_err(err)?.ln() - g(x - h).map_err(err)?.ln()) / (2.0 * h);
            worst = worst.max((slope / beta - 1.0).abs());
        }
    }
    check(worst <= 0.02, format!("max relative slope deviation {worst:.2e}"))
}

fn l1_change(fine: &FieldState, coarse: &FieldState) -> f64 {
    let r = (coarse.eps / fine.eps).round() as usize;
    coarse.eps * (0..coarse.u.len()).map(|i| (fine.u[i * r] - coarse.u[i]).abs()).sum::<f64>()
}

fn refinement(run25: &SimOutput) -> Outcome {
    let base = riemann_config(25.0)?;
    let tau0 = run25.plan.tau;
    let mut finals = vec![run25.last().clone()];
    for m in [2.0, 4.0] {
        let mut cfg = base.clone();
        cfg.eps = base.eps / m;
        cfg.tau = Some(tau0 / m);
        finals.push(simulate(&cfg).map_err(err)?.last().clone());
    }
    let d1 = l1_change(&finals[1], &finals[0]);
    let d2 = l1_change(&finals[2], &finals[1]);
    check(
        d1 / d2 >= 1.5,
        format!("L1 change {d1:.4e} -> {d2:.4e}, ratio {:.3}", d1 / d2),
    )
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("acceptance {n:>2} {tag} {name}: {detail} [{:.1}s]", start.elapsed().as_secs_f64());
    };

    report(1, "normalization identities", &mut normalization_identities);
    report(2, "spectral cross-validation", &mut spectral_cross_validation);
    report(3, "stability threshold", &mut stability_threshold_check);
    report(4, "oscillation threshold", &mut oscillation_threshold_check);
    report(5, "near-diagonal instability", &mut near_diagonal_instability);
    report(6, "lattice N-wave convergence", &mut lattice_nwave);
    report(7, "lattice Riemann front speed", &mut lattice_front_speed);

    let mut runs: Option<(SimOutput, SimOutput)> = None;
    report(8, "traveling-wave morphology", &mut || {
        let a = simulate(&riemann_config(25.0)?).map_err(err)?;
        let b = simulate(&riemann_config(3.0)?).map_err(err)?;
        let res = morphology(&a, &b);
        runs = Some((a, b));
        res
    });
    report(9, "N-wave emergence", &mut nwave_emergence);
    report(10, "oracle residuals", &mut oracle_residuals);
    report(11, "reference left asymptotics", &mut g_rho_left_slope);
    report(12, "scheme refinement", &mut || {
        let (a, _) = runs.as_ref().ok_or("the alpha = 25 run failed")?;
        refinement(a)
    });

    if failed == 0 {
        println!("acceptance: all 12 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 12 criteria failed");
        ExitCode::FAILURE
    }
}
