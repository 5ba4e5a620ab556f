//! Disorder- and graph-ensemble orchestration.
//!
//! Every realization draws from its own counter-derived random stream, so the
//! result for realization `r` depends only on `(master_seed, r)`: adding
//! realizations, reordering execution, or changing the rayon worker count
//! never perturbs existing draws. Reduction folds per-realization rows in
//! index order, which keeps floating-point output byte-identical across
//! thread counts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::battery::{charging_power, max_power};
use crate::couplings::CouplingMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::krylov::{
    ck_for_initial_string, delocalization_ratio, CkMeta, ComplexitySeries, DEFAULT_N_MAX,
};
use crate::opspace::{BatteryAxis, MajoranaString, SectorVector};

/// Maximum tolerated fraction of failed realizations before the run aborts.
const FAILURE_BUDGET: f64 = 0.01;

/// Interaction-graph family of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GraphFamily {
    Complete,
    Star,
    WattsStrogatz { k: usize, p: f64 },
}

impl GraphFamily {
    /// Draws the graph for one realization. Complete and star graphs are
    /// deterministic; Watts-Strogatz graphs are redrawn per realization.
    pub fn realize(&self, l: usize, rng: &mut impl rand::Rng) -> Result<Graph> {
        match *self {
            GraphFamily::Complete => Graph::complete(l),
            GraphFamily::Star => Graph::star(l),
            GraphFamily::WattsStrogatz { k, p } => Graph::watts_strogatz(l, k, p, rng),
        }
    }

    /// Short label used in CSV output.
    pub fn label(&self) -> String {
        match *self {
            GraphFamily::Complete => "full".into(),
            GraphFamily::Star => "star".into(),
            GraphFamily::WattsStrogatz { k, p } => format!("ws(k={k},p={p})"),
        }
    }

    /// `(k, p)` columns for CSV rows; empty for non-WS families.
    pub fn params(&self) -> (String, String) {
        match *self {
            GraphFamily::WattsStrogatz { k, p } => (k.to_string(), format!("{p}")),
            _ => (String::new(), String::new()),
        }
    }
}

/// Independent random stream for realization `index` of a run.
///
/// splitmix64 finalization over the (seed, index) pair; consecutive indices
/// land in unrelated parts of the ChaCha key space.
pub fn stream_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    let mixed = splitmix(master_seed ^ splitmix(index.wrapping_add(1)));
    ChaCha8Rng::seed_from_u64(mixed)
}

/// Parallel map over realizations with deterministic per-index streams.
///
/// Results come back in index order. Aborts with the first error when more
/// than 1% of realizations fail.
pub fn run_ensemble<T, F>(realizations: usize, master_seed: u64, task: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> Result<T> + Sync,
{
    if realizations == 0 {
        return Err(Error::InvalidParameter("realizations must be >= 1".into()));
    }
    let raw: Vec<Result<T>> = (0..realizations)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(master_seed, r as u64);
            task(r, &mut rng)
        })
        .collect();

    let failed = raw.iter().filter(|r| r.is_err()).count();
    if failed > 0 && failed as f64 > FAILURE_BUDGET * realizations as f64 {
        let first = raw
            .iter()
            .find_map(|r| r.as_ref().err().map(|e| e.to_string()))
            .unwrap_or_default();
        return Err(Error::EnsembleFailures {
            failed,
            total: realizations,
            first,
        });
    }
    Ok(raw.into_iter().filter_map(|r| r.ok()).collect())
}

/// Per-column mean and standard error over realization rows.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleStats {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub realizations: usize,
}

/// Folds rows in index order (reproducibility contract: the fold order is
/// part of the output format).
pub fn accumulate_rows(rows: &[Vec<f64>]) -> EnsembleStats {
    let n = rows.len();
    assert!(n >= 1, "no rows to accumulate");
    let cols = rows[0].len();
    let mut sum = vec![0.0; cols];
    let mut sumsq = vec![0.0; cols];
    for row in rows {
        assert_eq!(row.len(), cols);
        for (c, &v) in row.iter().enumerate() {
            sum[c] += v;
            sumsq[c] += v * v;
        }
    }
    let nf = n as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / nf).collect();
    let stderr: Vec<f64> = if n < 2 {
        vec![0.0; cols]
    } else {
        mean.iter()
            .zip(&sumsq)
            .map(|(&m, &sq)| {
                let var = (sq / nf - m * m).max(0.0) * nf / (nf - 1.0);
                (var / nf).sqrt()
            })
            .collect()
    };
    EnsembleStats {
        mean,
        stderr,
        realizations: n,
    }
}

/// Scalar convenience view of a one-column [`EnsembleStats`].
pub fn scalar_stats(values: &[f64]) -> (f64, f64) {
    let rows: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
    let st = accumulate_rows(&rows);
    (st.mean[0], st.stderr[0])
}

/// Ensemble-averaged K-complexity curve for the initial string
/// `2^{s/2} g^1 .. g^s`.
pub fn ck_curve_ensemble(
    family: GraphFamily,
    l: usize,
    size: usize,
    times: &[f64],
    realizations: usize,
    master_seed: u64,
) -> Result<EnsembleStats> {
    ck_curve_ensemble_with(family, l, size, times, realizations, master_seed, DEFAULT_N_MAX)
}

/// [`ck_curve_ensemble`] with an explicit Lanczos cap. Short time windows
/// tolerate aggressive caps (the amplitude wavefront reaches step `n` only
/// after `t ~ n / max b`), which matters for large half-filled sectors.
pub fn ck_curve_ensemble_with(
    family: GraphFamily,
    l: usize,
    size: usize,
    times: &[f64],
    realizations: usize,
    master_seed: u64,
    n_max: usize,
) -> Result<EnsembleStats> {
    let rows = run_ensemble(realizations, master_seed, |r, rng| {
        let g = family.realize(l, rng)?;
        let j = CouplingMatrix::sample(&g, rng).rescale_to_unit_bandwidth()?;
        let v0 = SectorVector::basis_state(l, MajoranaString::first(size))?;
        let meta = CkMeta {
            l,
            size,
            seed: master_seed.wrapping_add(r as u64),
            params: family.label(),
        };
        Ok(ck_for_initial_string(&j, &v0, times, n_max, meta)?.ck)
    })?;
    Ok(accumulate_rows(&rows))
}

/// Delocalization ratio statistics: `R` between the ensemble-averaged
/// size-`L/2` and size-1 curves. The per-realization ratio is heavy-tailed on
/// sparse graphs (occasional near-localized draws make the size-1 curve tiny),
/// so the ratio of averaged curves is the stable estimator; its uncertainty
/// comes from batch means.
#[derive(Debug, Clone, Serialize)]
pub struct RatioStats {
    pub r_mean: f64,
    pub r_stderr: f64,
    /// Coefficient of variation of the pointwise mean-curve ratio over the
    /// window (time-independence diagnostic).
    pub flatness_mean: f64,
    pub realizations: usize,
}

pub fn ratio_ensemble(
    family: GraphFamily,
    l: usize,
    times: &[f64],
    window: (f64, f64),
    realizations: usize,
    master_seed: u64,
) -> Result<RatioStats> {
    ratio_ensemble_with(
        family,
        l,
        times,
        window,
        realizations,
        master_seed,
        DEFAULT_N_MAX,
    )
}

/// [`ratio_ensemble`] with an explicit Lanczos cap (see
/// [`ck_curve_ensemble_with`]).
pub fn ratio_ensemble_with(
    family: GraphFamily,
    l: usize,
    times: &[f64],
    window: (f64, f64),
    realizations: usize,
    master_seed: u64,
    n_max: usize,
) -> Result<RatioStats> {
    let rows = run_ensemble(realizations, master_seed, |r, rng| {
        let g = family.realize(l, rng)?;
        let j = CouplingMatrix::sample(&g, rng).rescale_to_unit_bandwidth()?;
        let meta = |size| CkMeta {
            l,
            size,
            seed: master_seed.wrapping_add(r as u64),
            params: family.label(),
        };
        let small = {
            let v0 = SectorVector::basis_state(l, MajoranaString::first(1))?;
            ck_for_initial_string(&j, &v0, times, n_max, meta(1))?
        };
        let large = {
            let v0 = SectorVector::basis_state(l, MajoranaString::first(l / 2))?;
            ck_for_initial_string(&j, &v0, times, n_max, meta(l / 2))?
        };
        let mut row = small.ck;
        row.extend(large.ck);
        Ok(row)
    })?;
    let ratio_of_means = |subset: &[Vec<f64>]| -> Result<(f64, f64)> {
        let st = accumulate_rows(subset);
        let small = ComplexitySeries {
            times: times.to_vec(),
            ck: st.mean[..times.len()].to_vec(),
            meta: CkMeta::default(),
        };
        let large = ComplexitySeries {
            times: times.to_vec(),
            ck: st.mean[times.len()..].to_vec(),
            meta: CkMeta::default(),
        };
        delocalization_ratio(&large, &small, window)
    };
    let (r_mean, flatness) = ratio_of_means(&rows)?;

    // Batch-means standard error of R; contiguous batches keep the estimate
    // deterministic under the indexed-stream contract.
    let batches = rows.len().min(10);
    let mut r_stderr = 0.0;
    if batches >= 2 {
        let chunk = rows.len().div_ceil(batches);
        let rs: Vec<f64> = rows
            .chunks(chunk)
            .map(|c| ratio_of_means(c).map(|(r, _)| r))
            .collect::<Result<_>>()?;
        let (_, se) = scalar_stats(&rs);
        r_stderr = se;
    }
    Ok(RatioStats {
        r_mean,
        r_stderr,
        flatness_mean: flatness,
        realizations: rows.len(),
    })
}

/// Ensemble battery summary: averaged power curve plus the maximum of the
/// averaged curve.
#[derive(Debug, Clone, Serialize)]
pub struct BatteryEnsemble {
    pub times: Vec<f64>,
    pub power: EnsembleStats,
    pub energy: EnsembleStats,
    /// Maximum of the mean power curve, refined off-grid.
    pub p_max: f64,
    pub t_star: f64,
    /// Standard error of the mean power at the grid point nearest `t_star`.
    pub p_max_stderr: f64,
}

pub fn battery_ensemble(
    family: GraphFamily,
    l: usize,
    axis: BatteryAxis,
    times: &[f64],
    realizations: usize,
    master_seed: u64,
) -> Result<BatteryEnsemble> {
    let rows = run_ensemble(realizations, master_seed, |_, rng| {
        let g = family.realize(l, rng)?;
        let j = CouplingMatrix::sample(&g, rng).rescale_to_unit_bandwidth()?;
        let ps = charging_power(&j, axis, times)?;
        let mut row = ps.power;
        row.extend(ps.energy);
        Ok(row)
    })?;
    let cols = times.len();
    let power_rows: Vec<Vec<f64>> = rows.iter().map(|r| r[..cols].to_vec()).collect();
    let energy_rows: Vec<Vec<f64>> = rows.iter().map(|r| r[cols..].to_vec()).collect();
    let power = accumulate_rows(&power_rows);
    let energy = accumulate_rows(&energy_rows);

    let mean_series = crate::battery::PowerSeries::new(
        times.to_vec(),
        energy.mean.clone(),
        power.mean.clone(),
    );
    let (p_max, t_star) = max_power(&mean_series)?;
    let nearest = times
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (*a - t_star).abs().partial_cmp(&(*b - t_star).abs()).unwrap()
        })
        .map(|(i, _)| i)
        .unwrap();
    Ok(BatteryEnsemble {
        times: times.to_vec(),
        power: power.clone(),
        energy,
        p_max,
        t_star,
        p_max_stderr: power.stderr[nearest],
    })
}
