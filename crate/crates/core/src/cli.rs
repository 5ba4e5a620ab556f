//! Experiment driver: config parsing and the command implementations behind
//! the `opdeloc` binary. Commands return their CSV/report payloads as
//! strings; the binary persists them. Given (config, master_seed) every
//! command is deterministic and reruns are byte-identical.

use serde::Deserialize;

use crate::battery::{bandwidth_fit, perturbative_power};
use crate::couplings::CouplingMatrix;
use crate::ensemble::{
    battery_ensemble, ck_curve_ensemble, ratio_ensemble, run_ensemble, scalar_stats,
    GraphFamily,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::krylov::{lanczos, time_grid, DEFAULT_N_MAX};
use crate::opspace::{BatteryAxis, MajoranaString, SectorVector};
use crate::{oracle, star};

fn default_models() -> Vec<GraphFamily> {
    vec![
        GraphFamily::Complete,
        GraphFamily::WattsStrogatz { k: 1, p: 0.1 },
        GraphFamily::WattsStrogatz { k: 1, p: 0.9 },
        GraphFamily::WattsStrogatz { k: 2, p: 0.1 },
        GraphFamily::WattsStrogatz { k: 2, p: 0.9 },
    ]
}

fn d_seed() -> u64 {
    1
}
fn d_realizations() -> usize {
    1000
}
fn d_tmax() -> f64 {
    10.0
}
fn d_dt() -> f64 {
    0.05
}
fn d_ck_l() -> usize {
    12
}
fn d_ratio_ls() -> Vec<usize> {
    vec![8, 10, 12, 14, 16]
}
fn d_window() -> (f64, f64) {
    (0.5, 2.0)
}
fn d_battery_ls() -> Vec<usize> {
    vec![8, 12, 16, 20]
}
fn d_axes() -> Vec<BatteryAxis> {
    vec![BatteryAxis::X, BatteryAxis::Z]
}
fn d_battery_tmax() -> f64 {
    6.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "d_seed")]
    pub master_seed: u64,
    #[serde(default = "d_realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub ck_curves: CkCurvesConfig,
    #[serde(default)]
    pub ratio_scaling: RatioConfig,
    #[serde(default)]
    pub battery: BatteryConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CkCurvesConfig {
    #[serde(default = "d_ck_l")]
    pub l: usize,
    /// Empty means the default pair {1, L/2}.
    #[serde(default)]
    pub sizes: Vec<usize>,
    #[serde(default = "d_tmax")]
    pub t_max: f64,
    #[serde(default = "d_dt")]
    pub dt: f64,
    #[serde(default = "default_models")]
    pub models: Vec<GraphFamily>,
}

impl Default for CkCurvesConfig {
    fn default() -> Self {
        Self {
            l: d_ck_l(),
            sizes: Vec::new(),
            t_max: d_tmax(),
            dt: d_dt(),
            models: default_models(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioConfig {
    #[serde(default = "d_ratio_ls")]
    pub ls: Vec<usize>,
    #[serde(default = "d_window")]
    pub window: (f64, f64),
    #[serde(default = "d_tmax")]
    pub t_max: f64,
    #[serde(default = "d_dt")]
    pub dt: f64,
    #[serde(default = "default_models")]
    pub models: Vec<GraphFamily>,
}

impl Default for RatioConfig {
    fn default() -> Self {
        Self {
            ls: d_ratio_ls(),
            window: d_window(),
            t_max: d_tmax(),
            dt: d_dt(),
            models: default_models(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryConfig {
    #[serde(default = "d_battery_ls")]
    pub ls: Vec<usize>,
    #[serde(default = "d_axes")]
    pub axes: Vec<BatteryAxis>,
    #[serde(default = "d_battery_tmax")]
    pub t_max: f64,
    #[serde(default = "d_dt")]
    pub dt: f64,
    #[serde(default = "default_models")]
    pub models: Vec<GraphFamily>,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self {
            ls: d_battery_ls(),
            axes: d_axes(),
            t_max: d_battery_tmax(),
            dt: d_dt(),
            models: default_models(),
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config {
            location: e
                .span()
                .map(|s| format!("offset {}", s.start))
                .unwrap_or_else(|| "config".into()),
            message: e.message().to_string(),
        })
    }
}

impl Default for Config {
    fn default() -> Self {
        Self::parse("").expect("empty config is valid")
    }
}

fn header(cmd: &str, cfg: &Config) -> String {
    format!(
        "# command = {cmd}\n# master_seed = {}\n# realizations = {}\n",
        cfg.master_seed, cfg.realizations
    )
}

/// Ensemble-averaged K-complexity curves for every (model, size) pair.
pub fn cmd_ck_curves(cfg: &Config) -> Result<String> {
    let c = &cfg.ck_curves;
    let sizes = if c.sizes.is_empty() {
        vec![1, c.l / 2]
    } else {
        c.sizes.clone()
    };
    let times = time_grid(c.t_max, c.dt);
    let mut out = header("ck-curves", cfg);
    out.push_str(&format!(
        "# L = {}, t_max = {}, dt = {}\n", c.l, c.t_max, c.dt
    ));
    out.push_str("model,k,p,L,size,t,ck_mean,ck_stderr\n");
    for model in &c.models {
        let (k, p) = model.params();
        for &size in &sizes {
            let st = ck_curve_ensemble(
                *model,
                c.l,
                size,
                &times,
                cfg.realizations,
                cfg.master_seed,
            )?;
            for (i, &t) in times.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{},{:.6},{:.12e},{:.12e}\n",
                    model.label(),
                    k,
                    p,
                    c.l,
                    size,
                    t,
                    st.mean[i],
                    st.stderr[i]
                ));
            }
        }
    }
    Ok(out)
}

/// Delocalization ratio `R(L)` per model.
pub fn cmd_ratio_scaling(cfg: &Config) -> Result<String> {
    let c = &cfg.ratio_scaling;
    let times = time_grid(c.t_max, c.dt);
    let mut out = header("ratio-scaling", cfg);
    out.push_str(&format!(
        "# window = [{}, {}], t_max = {}, dt = {}\n",
        c.window.0, c.window.1, c.t_max, c.dt
    ));
    out.push_str("model,k,p,L,R,flatness,stderr\n");
    for model in &c.models {
        let (k, p) = model.params();
        for &l in &c.ls {
            let rs = ratio_ensemble(
                *model,
                l,
                &times,
                c.window,
                cfg.realizations,
                cfg.master_seed,
            )?;
            out.push_str(&format!(
                "{},{},{},{},{:.12e},{:.12e},{:.12e}\n",
                model.label(),
                k,
                p,
                l,
                rs.r_mean,
                rs.flatness_mean,
                rs.r_stderr
            ));
        }
    }
    Ok(out)
}

/// Maximum charging power per (model, axis, L), plus a perturbative-series
/// cross-check on the complete graph at the smallest requested L.
pub fn cmd_battery(cfg: &Config) -> Result<String> {
    let c = &cfg.battery;
    let times = time_grid(c.t_max, c.dt);
    let mut out = header("battery", cfg);
    out.push_str(&format!("# t_max = {}, dt = {}\n", c.t_max, c.dt));
    out.push_str("model,k,p,axis,L,p_max,t_star,p_max_stderr\n");
    for model in &c.models {
        let (k, p) = model.params();
        for &axis in &c.axes {
            for &l in &c.ls {
                let be = battery_ensemble(
                    *model,
                    l,
                    axis,
                    &times,
                    cfg.realizations,
                    cfg.master_seed,
                )?;
                out.push_str(&format!(
                    "{},{},{},{},{},{:.12e},{:.6},{:.12e}\n",
                    model.label(),
                    k,
                    p,
                    axis,
                    l,
                    be.p_max,
                    be.t_star,
                    be.p_max_stderr
                ));
            }
        }
    }

    // Perturbative comparison against the dense oracle on the complete graph.
    if let Some(&l) = c.ls.iter().filter(|&&l| l <= 10).max() {
        let grid: Vec<f64> = times
            .iter()
            .copied()
            .filter(|&t| t > 0.0 && t <= star::POWER_PROFILE_ARGMAX)
            .collect();
        if !grid.is_empty() {
            let reals = cfg.realizations.min(400);
            let rows = run_ensemble(reals, cfg.master_seed, |_, rng| {
                let g = Graph::complete(l)?;
                let j = CouplingMatrix::sample(&g, rng);
                Ok(oracle::dense_evolution_power(&j, BatteryAxis::X, &grid)?.power)
            })?;
            let dense = crate::ensemble::accumulate_rows(&rows);
            // The series carries the unrescaled bandwidth, estimated by a
            // linear fit of the ensemble mean in L.
            let samples: Vec<(usize, f64)> = [4usize, 6, 8, 10, 12, 16, 20]
                .iter()
                .map(|&lf| {
                    let vals = run_ensemble(200, cfg.master_seed ^ 0xb4, |_, rng| {
                        let g = Graph::complete(lf)?;
                        Ok(CouplingMatrix::sample(&g, rng).bandwidth())
                    })?;
                    Ok((lf, scalar_stats(&vals).0))
                })
                .collect::<Result<_>>()?;
            let pert = perturbative_power(l, bandwidth_fit(&samples)?.predict(l), &grid)?;
            let max_rel = grid
                .iter()
                .enumerate()
                .map(|(i, _)| {
                    ((pert.power[i] - dense.mean[i]) / dense.mean[i]).abs()
                })
                .fold(0.0f64, f64::max);
            out.push_str(&format!(
                "# perturbative check: L = {l}, realizations = {reals}, max relative deviation up to t_star = {max_rel:.4}\n"
            ));
        }
    }
    Ok(out)
}

/// Which validation suite [`cmd_validate`] runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationSuite {
    Star,
    Oracle,
}

impl std::str::FromStr for ValidationSuite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "star" => Ok(ValidationSuite::Star),
            "oracle" => Ok(ValidationSuite::Oracle),
            other => Err(Error::InvalidParameter(format!(
                "unknown validation suite '{other}' (expected star|oracle)"
            ))),
        }
    }
}

/// Runs a validation suite; returns the textual report and whether every
/// check passed.
pub fn cmd_validate(suite: ValidationSuite, cfg: &Config) -> Result<(String, bool)> {
    let mut report = String::new();
    let mut all_pass = true;
    let mut check = |name: &str, pass: bool, detail: String| {
        all_pass &= pass;
        report.push_str(&format!(
            "[{}] {name}: {detail}\n",
            if pass { "PASS" } else { "FAIL" }
        ));
    };

    match suite {
        ValidationSuite::Star => {
            // Pipeline vs closed forms on one seeded realization per L.
            for l in [4usize, 8, 12] {
                let mut rng = crate::ensemble::stream_rng(cfg.master_seed, l as u64);
                let g = Graph::star(l)?;
                let j = CouplingMatrix::sample_with_variance(&g, 0.5, &mut rng);
                let couplings: Vec<f64> = j.triplets().iter().map(|&(_, _, v)| v).collect();
                let mut worst_b = 0.0f64;
                let mut worst_k = 0usize;
                for s in 1..l {
                    let v0 = SectorVector::basis_state(l, MajoranaString::first(s))?;
                    let ld = lanczos(&j, &v0, DEFAULT_N_MAX, None)?;
                    worst_k = worst_k.max(ld.krylov_dim());
                    let w = star::star_lanczos_wavefunctions(&couplings, s, 0.0)?;
                    if !ld.b.is_empty() {
                        worst_b = worst_b.max((ld.b[0] - w.b1).abs());
                    }
                    if ld.b.len() > 1 {
                        worst_b = worst_b.max((ld.b[1] - w.b2).abs());
                    }
                }
                check(
                    &format!("star L={l} krylov dimension"),
                    worst_k == 3,
                    format!("max K = {worst_k}"),
                );
                check(
                    &format!("star L={l} lanczos coefficients"),
                    worst_b < 1e-10,
                    format!("max |b - closed form| = {worst_b:.2e}"),
                );
            }

            // Statistical checks at reduced realization count.
            let reals = cfg.realizations.max(2000);
            for l in [4usize, 8] {
                let vals = run_ensemble(reals, cfg.master_seed, |_, rng| {
                    let g = Graph::star(l)?;
                    let j = CouplingMatrix::sample_with_variance(&g, 0.5, rng);
                    let musq: f64 =
                        j.triplets().iter().map(|&(_, _, v)| v * v).sum();
                    let b2 = j.triplets()[..1]
                        .iter()
                        .map(|&(_, _, v)| v * v)
                        .sum::<f64>()
                        / musq;
                    Ok(b2)
                })?;
                let (mean, err) = scalar_stats(&vals);
                let target = star::star_moment(1, 1, l)?;
                check(
                    &format!("star L={l} mean(b^2) s=1"),
                    (mean - target).abs() < 3.0 * err,
                    format!("{mean:.5} vs {target:.5} (stderr {err:.1e})"),
                );
            }
        }
        ValidationSuite::Oracle => {
            for l in [4usize, 6] {
                let mut rng = crate::ensemble::stream_rng(cfg.master_seed, 100 + l as u64);
                let g = Graph::complete(l)?;
                let j = CouplingMatrix::sample(&g, &mut rng);
                let dense = oracle::dense_bandwidth(&j)?;
                let diff = (dense - j.bandwidth()).abs();
                check(
                    &format!("bandwidth L={l}"),
                    diff < 1e-10,
                    format!("|dense - paired singular values| = {diff:.2e}"),
                );

                let mut worst = 0.0f64;
                for s in 1..=l {
                    let t = oracle::dense_superoperator_sector(&j, s)?;
                    let dim = crate::opspace::sector_dim(l, s);
                    for col in 0..dim {
                        let mask = crate::opspace::sector_unrank(col, l, s);
                        let v = SectorVector::basis_state(l, mask)?;
                        let tv = crate::opspace::apply_liouvillian(&j, &v)?;
                        for row in 0..dim {
                            worst = worst.max((t[(row, col)] - tv.amp[row]).abs());
                        }
                    }
                }
                check(
                    &format!("sign rule L={l}"),
                    worst < 1e-10,
                    format!("max |dense - matrix-free| = {worst:.2e}"),
                );
            }

            // Bridge identity at L=6, small ensemble.
            let l = 6usize;
            let grid: Vec<f64> = vec![0.5, 1.0, 2.0, 3.0];
            let reals = 400usize;
            let rows = run_ensemble(reals, cfg.master_seed, |_, rng| {
                let g = Graph::complete(l)?;
                let j = CouplingMatrix::sample(&g, rng);
                let direct = oracle::dense_evolution_power(&j, BatteryAxis::X, &grid)?;
                let bridge = crate::battery::charging_power(
                    &j.rescale_to_unit_bandwidth()?,
                    BatteryAxis::X,
                    &grid,
                )?;
                let mut row = direct.power;
                row.extend(bridge.power);
                Ok(row)
            })?;
            let st = crate::ensemble::accumulate_rows(&rows);
            let mut ok = true;
            let mut worst = 0.0f64;
            for i in 0..grid.len() {
                let (d, b) = (st.mean[i], st.mean[grid.len() + i]);
                let err = st.stderr[i].hypot(st.stderr[grid.len() + i]);
                worst = worst.max((d - b).abs() / err.max(1e-12));
                ok &= (d - b).abs() < 3.0 * err;
            }
            check(
                "bridge identity L=6",
                ok,
                format!("max deviation = {worst:.2} stderr"),
            );

            // Bandwidth fit plumbing sanity.
            let fit = bandwidth_fit(&[(8, 3.1), (12, 4.9), (16, 6.6)])?;
            check(
                "bandwidth fit",
                fit.slope > 0.0,
                format!("slope = {:.3}", fit.slope),
            );
        }
    }
    Ok((report, all_pass))
}
