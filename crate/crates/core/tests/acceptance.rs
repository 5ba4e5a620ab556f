//! Acceptance gate: one test per release criterion, each printing a single
//! [PASS]/[FAIL] line. Criteria that the implementation demonstrably cannot
//! meet (because the underlying claim does not hold numerically) still run
//! faithfully and are allowed to stay red; the detail lines show the measured
//! values.
//!
//! Run with `cargo test --test acceptance -- --nocapture --test-threads 1`
//! to see the lines in order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use opdeloc::battery::{charging_power, perturbative_power, PowerSeries};
use opdeloc::couplings::CouplingMatrix;
use opdeloc::ensemble::{
    accumulate_rows, battery_ensemble, ck_curve_ensemble_with, ratio_ensemble_with,
    run_ensemble, GraphFamily,
};
use opdeloc::graph::Graph;
use opdeloc::krylov::{evolve_amplitudes, lanczos, time_grid};
use opdeloc::opspace::{
    apply_liouvillian, sector_dim, sector_unrank, BatteryAxis, MajoranaString,
    SectorVector,
};
use opdeloc::oracle;
use opdeloc::star;

fn report(name: &str, pass: bool, detail: &str) -> bool {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

/// Weighted least squares line `y = a + b x`; returns `(b, sigma_b)`.
fn wls_slope(x: &[f64], y: &[f64], sigma: &[f64]) -> (f64, f64) {
    let w: Vec<f64> = sigma.iter().map(|s| 1.0 / (s * s).max(1e-300)).collect();
    let sw: f64 = w.iter().sum();
    let swx: f64 = w.iter().zip(x).map(|(w, x)| w * x).sum();
    let swy: f64 = w.iter().zip(y).map(|(w, y)| w * y).sum();
    let swxx: f64 = w.iter().zip(x).map(|(w, x)| w * x * x).sum();
    let swxy: f64 = w.iter().zip(x).zip(y).map(|((w, x), y)| w * x * y).sum();
    let d = sw * swxx - swx * swx;
    ((sw * swxy - swx * swy) / d, (sw / d).sqrt())
}

#[test]
fn acceptance_1_star_closed_forms_exact() {
    let times = time_grid(10.0, 0.05);
    let mut pass = true;
    let mut worst_b = 0.0f64;
    let mut worst_phi = 0.0f64;
    for l in [4usize, 8, 12] {
        let g = Graph::star(l).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(100 + l as u64);
        let j = CouplingMatrix::sample_with_variance(&g, 0.5, &mut rng);
        let couplings: Vec<f64> = j.triplets().iter().map(|t| t.2).collect();
        for s in 1..l {
            let v0 = SectorVector::basis_state(l, MajoranaString::first(s)).unwrap();
            let ld = lanczos(&j, &v0, 50, None).unwrap();
            // K = 3 generically; s = L-1 exhausts the second hop (b2 = 0).
            let k_expect = if s <= l - 2 { 3 } else { 2 };
            pass &= ld.krylov_dim() == k_expect;
            let b1 = couplings[..s].iter().map(|x| x * x).sum::<f64>().sqrt();
            let b2 = couplings[s..].iter().map(|x| x * x).sum::<f64>().sqrt();
            worst_b = worst_b.max((ld.b[0] - b1).abs());
            if k_expect == 3 {
                worst_b = worst_b.max((ld.b[1] - b2).abs());
            }
            let amps = evolve_amplitudes(&ld, &times).unwrap();
            for (i, &t) in times.iter().enumerate() {
                let w = star::star_lanczos_wavefunctions(&couplings, s, t).unwrap();
                for n in 0..ld.krylov_dim() {
                    worst_phi = worst_phi.max((amps.phi[i][n] - w.phi[n]).abs());
                }
            }
        }
    }
    pass &= worst_b < 1e-10 && worst_phi < 1e-8;
    let ok = report(
        "star closed forms (exact)",
        pass,
        &format!("max |db| = {worst_b:.2e}, max |dphi| = {worst_phi:.2e}"),
    );
    assert!(ok);
}

#[test]
fn acceptance_2_star_ensemble_statistics() {
    const REALS: usize = 10_000;
    let probe = [0.7f64, 2.0, 5.0];
    let bat_times = time_grid(6.0, 0.05);
    let nb = bat_times.len();
    let mut stats_ok = true;
    let mut z_quoted_ok = true;
    let mut details = String::new();
    for l in [4usize, 8, 12] {
        let s = l / 2;
        let rows = run_ensemble(REALS, 200 + l as u64, |_, rng| {
            let g = Graph::star(l)?;
            let j = CouplingMatrix::sample(&g, rng).rescale_to_unit_bandwidth()?;
            let v0 = SectorVector::basis_state(l, MajoranaString::first(s))?;
            let ld = lanczos(&j, &v0, 10, None)?;
            let b1sq = ld.b[0] * ld.b[0];
            let amps = evolve_amplitudes(&ld, &probe)?;
            let mut row = vec![b1sq, b1sq * b1sq];
            for p in &amps.phi {
                row.push(p[0]);
            }
            for p in &amps.phi {
                row.push(p.iter().enumerate().map(|(n, x)| n as f64 * x * x).sum());
            }
            row.extend(charging_power(&j, BatteryAxis::X, &bat_times)?.power);
            row.extend(charging_power(&j, BatteryAxis::Z, &bat_times)?.power);
            Ok(row)
        })
        .unwrap();
        let st = accumulate_rows(&rows);
        let within = |mean: f64, se: f64, target: f64| (mean - target).abs() <= 3.0 * se;

        stats_ok &= within(st.mean[0], st.stderr[0], star::star_moment(1, s, l).unwrap());
        stats_ok &= within(st.mean[1], st.stderr[1], star::star_moment(2, s, l).unwrap());
        for (i, &t) in probe.iter().enumerate() {
            stats_ok &= within(
                st.mean[2 + i],
                st.stderr[2 + i],
                star::phi0_bar(s, l, t).unwrap(),
            );
            stats_ok &= within(
                st.mean[5 + i],
                st.stderr[5 + i],
                star::ck_bar(s, l, t).unwrap(),
            );
        }
        // x battery: averaged power curve and its maximum.
        let x0 = 8;
        for t in [1.0f64, 2.3, 4.0] {
            let i = x0 + (t / 0.05).round() as usize;
            stats_ok &= within(
                st.mean[i],
                st.stderr[i],
                star::power_avg(BatteryAxis::X, l, t).unwrap(),
            );
        }
        let x_series = PowerSeries::new(
            bat_times.clone(),
            vec![0.0; nb],
            st.mean[x0..x0 + nb].to_vec(),
        );
        let ix = (x_series.t_star / 0.05).round() as usize;
        stats_ok &= within(
            x_series.p_max,
            st.stderr[x0 + ix],
            star::power_max(BatteryAxis::X, l).unwrap(),
        );
        // z battery against the quoted hub-channel maximum. The simulated
        // curve comes out a factor 2 above it (it matches power_max(Z, L),
        // which counts every cell channel); this line stays red.
        let z0 = x0 + nb;
        let z_series = PowerSeries::new(
            bat_times.clone(),
            vec![0.0; nb],
            st.mean[z0..z0 + nb].to_vec(),
        );
        let iz = (z_series.t_star / 0.05).round() as usize;
        let quoted = star::power_max_z_hub_channel(l).unwrap();
        z_quoted_ok &= within(z_series.p_max, st.stderr[z0 + iz], quoted);
        let full_ok = within(
            z_series.p_max,
            st.stderr[z0 + iz],
            star::power_max(BatteryAxis::Z, l).unwrap(),
        );
        details.push_str(&format!(
            "L={l}: z p_max = {:.4} vs quoted {:.4} (all-channel {:.4}, matches: {}); ",
            z_series.p_max,
            quoted,
            star::power_max(BatteryAxis::Z, l).unwrap(),
            full_ok
        ));
    }
    let ok = report(
        "star ensemble statistics (3 sigma, 1e4 realizations)",
        stats_ok && z_quoted_ok,
        &format!("moments/phi0/C_K/x-battery all within 3 sigma: {stats_ok}; z-battery vs quoted maximum: {details}"),
    );
    assert!(ok);
}

#[test]
fn acceptance_3_oracle_equivalence() {
    let mut worst_sign = 0.0f64;
    let mut worst_bw = 0.0f64;
    let mut worst_det = 0.0f64;
    for l in [4usize, 6, 8] {
        let g = Graph::complete(l).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(300 + l as u64);
        let j = CouplingMatrix::sample(&g, &mut rng);
        for s in 1..=l {
            let dense = oracle::dense_superoperator_sector(&j, s).unwrap();
            let dim = sector_dim(l, s);
            for col in 0..dim {
                let v = SectorVector::basis_state(l, sector_unrank(col, l, s)).unwrap();
                let tv = apply_liouvillian(&j, &v).unwrap();
                for row in 0..dim {
                    worst_sign = worst_sign.max((dense[(row, col)] - tv.amp[row]).abs());
                }
            }
        }
        worst_bw = worst_bw.max((oracle::dense_bandwidth(&j).unwrap() - j.bandwidth()).abs());
        let times = time_grid(6.0, 0.5);
        for s in 1..=l.min(4) {
            let mask = MajoranaString::first(s);
            let v0 = SectorVector::basis_state(l, mask).unwrap();
            let ld = lanczos(&j, &v0, 200, None).unwrap();
            let amps = evolve_amplitudes(&ld, &times).unwrap();
            for (i, &t) in times.iter().enumerate() {
                let det = opdeloc::opspace::free_autocorrelation(&j, mask, t);
                worst_det = worst_det.max((det - amps.phi[i][0]).abs());
            }
        }
    }
    let pass = worst_sign < 1e-10 && worst_bw < 1e-10 && worst_det < 1e-8;
    let ok = report(
        "oracle equivalence",
        pass,
        &format!(
            "sign rule {worst_sign:.2e}, bandwidth {worst_bw:.2e}, determinant {worst_det:.2e}"
        ),
    );
    assert!(ok);
}

#[test]
fn acceptance_4_bridge_identity() {
    const REALS: usize = 2000;
    let grid = [0.5f64, 1.0, 2.0, 3.5];
    let mut pass = true;
    let mut worst_pull = 0.0f64;
    for l in [6usize, 8] {
        for (axis, seed) in [(BatteryAxis::X, 400 + l as u64), (BatteryAxis::Z, 410 + l as u64)]
        {
            let rows = run_ensemble(REALS, seed, |_, rng| {
                let g = Graph::complete(l)?;
                let j = CouplingMatrix::sample(&g, rng);
                let direct = oracle::dense_evolution_power(&j, axis, &grid)?;
                let bridge =
                    charging_power(&j.rescale_to_unit_bandwidth()?, axis, &grid)?;
                let mut row = direct.power;
                row.extend(bridge.power);
                Ok(row)
            })
            .unwrap();
            let st = accumulate_rows(&rows);
            for i in 0..grid.len() {
                let (d, b) = (st.mean[i], st.mean[grid.len() + i]);
                let err = st.stderr[i].hypot(st.stderr[grid.len() + i]).max(1e-12);
                let pull = (d - b).abs() / err;
                worst_pull = worst_pull.max(pull);
                pass &= pull < 3.0;
            }
        }
    }
    let ok = report(
        "bridge identity (3 sigma, 2000 realizations)",
        pass,
        &format!("worst pull {worst_pull:.2} sigma"),
    );
    assert!(ok);
}

#[test]
fn acceptance_5_perturbative_power() {
    const REALS: usize = 2000;
    let t_star = star::POWER_PROFILE_ARGMAX;
    let mut grid: Vec<f64> = (1..=9).map(|i| 0.25 * i as f64).collect();
    grid.push(t_star);
    // The series carries the bandwidth of the unrescaled Hamiltonian; it is
    // estimated, as in the reference computation, by a linear fit of the
    // ensemble-mean bandwidth in L.
    let samples: Vec<(usize, f64)> = [4usize, 6, 8, 10, 12, 16, 20]
        .iter()
        .map(|&l| {
            let vals = run_ensemble(500, 900 + l as u64, |_, rng| {
                let g = Graph::complete(l)?;
                Ok(CouplingMatrix::sample(&g, rng).bandwidth())
            })
            .unwrap();
            (l, opdeloc::ensemble::scalar_stats(&vals).0)
        })
        .collect();
    let fit = opdeloc::battery::bandwidth_fit(&samples).unwrap();
    let mut pass = true;
    let mut worst_rel = 0.0f64;
    for l in [8usize, 10] {
        let rows = run_ensemble(REALS, 500 + l as u64, |_, rng| {
            let g = Graph::complete(l)?;
            let j = CouplingMatrix::sample(&g, rng);
            Ok(oracle::dense_evolution_power(&j, BatteryAxis::X, &grid)?.power)
        })
        .unwrap();
        let st = accumulate_rows(&rows);
        let series = perturbative_power(l, fit.predict(l), &grid).unwrap();
        for i in 0..grid.len() {
            let rel = (st.mean[i] - series.power[i]).abs() / series.power[i].abs();
            worst_rel = worst_rel.max(rel);
            pass &= rel <= 0.05;
        }
    }
    let ok = report(
        "perturbative power series (<= 5% to t_star)",
        pass,
        &format!("worst relative deviation {:.3}%", 100.0 * worst_rel),
    );
    assert!(ok);
}

#[test]
fn acceptance_6_figure_trends() {
    let times = time_grid(2.0, 0.05);
    let window = (0.5f64, 2.0f64);
    let in_window: Vec<usize> = times
        .iter()
        .enumerate()
        .filter(|(_, &t)| t >= window.0 && t <= window.1)
        .map(|(i, _)| i)
        .collect();

    // (a) size-1 curves across models: relative spread of the ensemble means.
    // Measured spread is ~55% and does not shrink with L (the p=0.9 models sit
    // well above the complete graph after unit-bandwidth rescaling), so the
    // 20% bound stays red; the detail line records the measured value.
    let models = [
        GraphFamily::Complete,
        GraphFamily::WattsStrogatz { k: 1, p: 0.1 },
        GraphFamily::WattsStrogatz { k: 1, p: 0.9 },
        GraphFamily::WattsStrogatz { k: 2, p: 0.1 },
        GraphFamily::WattsStrogatz { k: 2, p: 0.9 },
    ];
    let curves: Vec<_> = models
        .iter()
        .map(|&m| ck_curve_ensemble_with(m, 24, 1, &times, 1000, 610, 60).unwrap())
        .collect();
    let mut max_spread = 0.0f64;
    for i in 1..times.len() {
        let vals: Vec<f64> = curves.iter().map(|c| c.mean[i]).collect();
        let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
        let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
        let avg = vals.iter().sum::<f64>() / vals.len() as f64;
        max_spread = max_spread.max((hi - lo) / avg);
    }
    let pass_a = report(
        "trend (a): size-1 curves model-independent within 20%",
        max_spread <= 0.20,
        &format!("max spread {:.1}% across 5 models at L=24", 100.0 * max_spread),
    );

    // (b) size-L/2 ordering p=0.9 >= p=0.1 on the window.
    let mut pass_b = true;
    let mut b_detail = String::new();
    for l in [12usize, 14, 16] {
        let hi = ck_curve_ensemble_with(
            GraphFamily::WattsStrogatz { k: 1, p: 0.9 },
            l,
            l / 2,
            &times,
            200,
            620,
            40,
        )
        .unwrap();
        let lo = ck_curve_ensemble_with(
            GraphFamily::WattsStrogatz { k: 1, p: 0.1 },
            l,
            l / 2,
            &times,
            200,
            620,
            40,
        )
        .unwrap();
        let good = in_window
            .iter()
            .filter(|&&i| hi.mean[i] >= lo.mean[i])
            .count();
        let frac = good as f64 / in_window.len() as f64;
        b_detail.push_str(&format!("L={l}: {:.0}% ", 100.0 * frac));
        pass_b &= frac >= 0.95;
    }
    let pass_b = report(
        "trend (b): C_K ordering p=0.9 >= p=0.1 pointwise",
        pass_b,
        b_detail.trim(),
    );

    // (c) R(L) slopes.
    let ls = [8usize, 10, 12, 14, 16];
    let xs: Vec<f64> = ls.iter().map(|&l| l as f64).collect();
    let mut slopes = Vec::new();
    for fam in [
        GraphFamily::Complete,
        GraphFamily::WattsStrogatz { k: 1, p: 0.9 },
        GraphFamily::WattsStrogatz { k: 1, p: 0.1 },
    ] {
        let mut rs = Vec::new();
        let mut sig = Vec::new();
        for &l in &ls {
            let st = ratio_ensemble_with(fam, l, &times, window, 200, 630, 40).unwrap();
            rs.push(st.r_mean);
            sig.push(st.r_stderr.max(1e-6));
        }
        let (b, sb) = wls_slope(&xs, &rs, &sig);
        slopes.push((fam.label(), b, sb));
    }
    let pass_c = slopes[0].1 > 2.0 * slopes[0].2
        && slopes[1].1 > 2.0 * slopes[1].2
        && slopes[2].1.abs() < 2.0 * slopes[2].2;
    let pass_c = report(
        "trend (c): R(L) growth full/p=0.9, flat p=0.1",
        pass_c,
        &slopes
            .iter()
            .map(|(n, b, s)| format!("{n}: {b:.3} +- {s:.3}"))
            .collect::<Vec<_>>()
            .join(", "),
    );

    // (d) battery maximum power scaling. The x-battery maximum on the
    // complete and p=0.9 graphs grows like sqrt(L) (the optimal charging
    // time drifts as t* ~ 1.55 sqrt(L)), so the measured log-log slope sits
    // near 0.45 and the > 0.5 bound stays red. The star x-battery, run as a
    // cross-check, is genuinely extensive (slope ~ 1, t* pinned at 2.33),
    // which confirms the pipeline can detect extensive scaling.
    let bat_times = time_grid(40.0, 0.1);
    let bls = [24usize, 32, 48, 64];
    let lx: Vec<f64> = bls.iter().map(|&l| (l as f64).ln()).collect();
    let mut x_ok = true;
    let mut d_detail = String::new();
    for fam in [GraphFamily::Complete, GraphFamily::WattsStrogatz { k: 1, p: 0.9 }] {
        let mut ln_p = Vec::new();
        let mut sig = Vec::new();
        for &l in &bls {
            let be =
                battery_ensemble(fam, l, BatteryAxis::X, &bat_times, 200, 640).unwrap();
            ln_p.push(be.p_max.ln());
            sig.push((be.p_max_stderr / be.p_max).max(1e-6));
        }
        let (b, sb) = wls_slope(&lx, &ln_p, &sig);
        d_detail.push_str(&format!("{} x: {b:.3} +- {sb:.3}; ", fam.label()));
        x_ok &= b > 0.5;
    }
    let mut ln_p = Vec::new();
    let mut sig = Vec::new();
    for &l in &bls {
        let be = battery_ensemble(GraphFamily::Complete, l, BatteryAxis::Z, &bat_times, 200, 641)
            .unwrap();
        ln_p.push(be.p_max.ln());
        sig.push((be.p_max_stderr / be.p_max).max(1e-6));
    }
    let (zb, zsb) = wls_slope(&lx, &ln_p, &sig);
    let z_ok = zb.abs() < 2.0 * zsb;
    d_detail.push_str(&format!("full z: {zb:.3} +- {zsb:.3}; "));
    let mut ln_p = Vec::new();
    let mut sig = Vec::new();
    for &l in &bls {
        let be = battery_ensemble(GraphFamily::Star, l, BatteryAxis::X, &bat_times, 100, 642)
            .unwrap();
        ln_p.push(be.p_max.ln());
        sig.push((be.p_max_stderr / be.p_max).max(1e-6));
    }
    let (sb_, ssb) = wls_slope(&lx, &ln_p, &sig);
    d_detail.push_str(&format!("star x control: {sb_:.3} +- {ssb:.3}"));
    let pass_d = report(
        "trend (d): P_max slopes (x > 0.5, z flat)",
        x_ok && z_ok,
        &d_detail,
    );

    let ok = report(
        "figure trends at desk scale",
        pass_a && pass_b && pass_c && pass_d,
        &format!("a={pass_a} b={pass_b} c={pass_c} d={pass_d}"),
    );
    assert!(ok);
}

#[test]
fn acceptance_7_structural_invariants() {
    let mut pass = true;
    // Normalization, C_K(0) = 0, Gram defect.
    let times = time_grid(8.0, 0.25);
    for (l, s, seed) in [(8usize, 4usize, 1u64), (10, 5, 2), (10, 3, 3)] {
        let g = Graph::complete(l).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(700 + seed);
        let j = CouplingMatrix::sample(&g, &mut rng)
            .rescale_to_unit_bandwidth()
            .unwrap();
        let v0 = SectorVector::basis_state(l, MajoranaString::first(s)).unwrap();
        let ld = lanczos(&j, &v0, 200, None).unwrap();
        pass &= ld.gram_defect() < 1e-10;
        let amps = evolve_amplitudes(&ld, &times).unwrap();
        for row in &amps.phi {
            let norm: f64 = row.iter().map(|p| p * p).sum();
            pass &= (norm - 1.0).abs() < 1e-8;
        }
        let ck0: f64 = amps.phi[0]
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p * p)
            .sum();
        // t = 0 amplitudes are delta_{n0} up to eigensolver rounding (~1e-16
        // per entry, squared in C_K).
        pass &= ck0.abs() < 1e-16;
        // Size conservation is exact: the generator maps the sector to itself.
        let tv = apply_liouvillian(&j, &v0).unwrap();
        pass &= tv.s == s && tv.l == l;
        for (i, &a) in tv.amp.iter().enumerate() {
            if a != 0.0 {
                pass &= sector_unrank(i, l, s).size() == s;
            }
        }
    }
    // Byte-identical ensemble output across thread counts.
    let grid = time_grid(2.0, 0.25);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let ck = ck_curve_ensemble_with(
                GraphFamily::WattsStrogatz { k: 1, p: 0.5 },
                8,
                4,
                &grid,
                24,
                710,
                40,
            )
            .unwrap();
            let bat =
                battery_ensemble(GraphFamily::Complete, 8, BatteryAxis::X, &grid, 24, 711)
                    .unwrap();
            (ck.mean, ck.stderr, bat.power.mean, bat.p_max)
        })
    };
    let a = run(1);
    let b = run(4);
    pass &= a == b;
    let ok = report(
        "structural invariants",
        pass,
        "normalization, C_K(0), Gram defect, size conservation, determinism",
    );
    assert!(ok);
}
