//! Quantum-battery charging observables.
//!
//! The battery starts in the ground state of the static Hamiltonian
//! `H_0 = sum_i sigma^a_i` (h = 1) and is charged by quenching to the
//! bandwidth-rescaled quadratic Hamiltonian. On coupling average the stored
//! energy is controlled by the return amplitude of the normalized `H_0`
//! string expansion: `P_av(t) = (phi_0(t) - 1)/t * <0|H_0|0>` with
//! `<0|H_0|0> = -L/2`.

use serde::Serialize;

use crate::couplings::{CouplingMatrix, Propagator};
use crate::error::{Error, Result};
use crate::krylov::{evolve_amplitudes, lanczos, DEFAULT_N_MAX};
use crate::opspace::{battery_operator, free_overlap, BatteryAxis, SectorVector};

/// Stored energy and average power on a time grid.
#[derive(Debug, Clone, Serialize)]
pub struct PowerSeries {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub power: Vec<f64>,
    pub p_max: f64,
    pub t_star: f64,
}

impl PowerSeries {
    /// Bundles a grid with its maximum-power summary.
    pub fn new(times: Vec<f64>, energy: Vec<f64>, power: Vec<f64>) -> Self {
        assert_eq!(times.len(), energy.len());
        assert_eq!(times.len(), power.len());
        let (p_max, t_star) = grid_max(&times, &power);
        Self {
            times,
            energy,
            power,
            p_max,
            t_star,
        }
    }

    /// CSV with a `# p_max, t_star` header line.
    pub fn csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# p_max = {:.12e}, t_star = {:.12e}\n",
            self.p_max, self.t_star
        ));
        out.push_str("t,E,P\n");
        for i in 0..self.times.len() {
            out.push_str(&format!(
                "{:.6},{:.12e},{:.12e}\n",
                self.times[i], self.energy[i], self.power[i]
            ));
        }
        out
    }
}

/// How `phi_0` is evaluated in [`charging_power_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerMethod {
    /// Free-fermion determinant minors of `exp(J t)` (fast path).
    Determinant,
    /// Per-sector Lanczos evolution (reference path).
    Krylov,
}

fn check_unit_bandwidth(j: &CouplingMatrix) -> Result<()> {
    let mu = j.bandwidth();
    if (mu - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnitBandwidth(mu));
    }
    Ok(())
}

/// Return amplitude `phi_0(t) = (H_0 | H_0(t)) / (H_0 | H_0)` of the battery
/// operator on the given time grid.
///
/// The x expansion has one string per odd size, so sectors decouple and the
/// amplitude is a weighted sum of principal minors. The z expansion lives
/// entirely in the size-2 sector and needs the full cross-minor sum.
pub fn battery_autocorrelation(
    j: &CouplingMatrix,
    axis: BatteryAxis,
    times: &[f64],
    method: PowerMethod,
) -> Result<Vec<f64>> {
    if times.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let op = battery_operator(axis, j.mode_count())?;
    let w2 = op.weight * op.weight;
    match method {
        PowerMethod::Determinant => {
            let prop = Propagator::new(j);
            let mut phi0 = vec![0.0; times.len()];
            for (i, &t) in times.iter().enumerate() {
                let u = prop.at(t);
                let mut acc = 0.0;
                match axis {
                    BatteryAxis::X => {
                        for &(mask, _) in &op.terms {
                            acc += free_overlap(&u, mask, mask);
                        }
                    }
                    BatteryAxis::Z => {
                        // Common -i phases cancel in every cross term.
                        for &(onto, _) in &op.terms {
                            for &(from, _) in &op.terms {
                                acc += free_overlap(&u, onto, from);
                            }
                        }
                    }
                }
                phi0[i] = w2 * acc;
            }
            Ok(phi0)
        }
        PowerMethod::Krylov => {
            let l = j.mode_count();
            let mut phi0 = vec![0.0; times.len()];
            match axis {
                BatteryAxis::X => {
                    for &(mask, _) in &op.terms {
                        let v0 = SectorVector::basis_state(l, mask)?;
                        let ld = lanczos(j, &v0, DEFAULT_N_MAX, None)?;
                        let amps = evolve_amplitudes(&ld, times)?;
                        for (i, row) in amps.phi.iter().enumerate() {
                            phi0[i] += w2 * row[0];
                        }
                    }
                }
                BatteryAxis::Z => {
                    let mut v0 = SectorVector::zeros(l, 2);
                    for &(mask, _) in &op.terms {
                        let unit = SectorVector::basis_state(l, mask)?;
                        v0.axpy(op.weight, &unit);
                    }
                    let ld = lanczos(j, &v0, DEFAULT_N_MAX, None)?;
                    let amps = evolve_amplitudes(&ld, times)?;
                    for (i, row) in amps.phi.iter().enumerate() {
                        phi0[i] = row[0];
                    }
                }
            }
            Ok(phi0)
        }
    }
}

/// Single-realization charging curve from the Krylov bridge,
/// `E(t) = (1 - phi_0(t)) L/2`. Requires `J` rescaled to unit bandwidth.
pub fn charging_power_with(
    j: &CouplingMatrix,
    axis: BatteryAxis,
    times: &[f64],
    method: PowerMethod,
) -> Result<PowerSeries> {
    check_unit_bandwidth(j)?;
    let phi0 = battery_autocorrelation(j, axis, times, method)?;
    let half_l = j.mode_count() as f64 / 2.0;
    let energy: Vec<f64> = phi0.iter().map(|p| (1.0 - p) * half_l).collect();
    let power: Vec<f64> = times
        .iter()
        .zip(&energy)
        .map(|(&t, &e)| if t > 0.0 { e / t } else { 0.0 })
        .collect();
    Ok(PowerSeries::new(times.to_vec(), energy, power))
}

/// [`charging_power_with`] on the determinant fast path.
pub fn charging_power(
    j: &CouplingMatrix,
    axis: BatteryAxis,
    times: &[f64],
) -> Result<PowerSeries> {
    charging_power_with(j, axis, times, PowerMethod::Determinant)
}

/// Grid argmax with parabolic vertex refinement through the neighbours.
/// `t = 0` is excluded (power is defined as a limit there).
fn grid_max(times: &[f64], power: &[f64]) -> (f64, f64) {
    let mut best = None;
    for i in 0..times.len() {
        if times[i] <= 0.0 {
            continue;
        }
        match best {
            None => best = Some(i),
            Some(b) if power[i] > power[b] => best = Some(i),
            _ => {}
        }
    }
    let Some(i) = best else {
        return (0.0, 0.0);
    };
    if i == 0 || i + 1 == times.len() || times[i - 1] <= 0.0 {
        return (power[i], times[i]);
    }
    // Quadratic through the three bracketing samples; fall back to the grid
    // point when they are collinear.
    let (x0, x1, x2) = (times[i - 1], times[i], times[i + 1]);
    let (y0, y1, y2) = (power[i - 1], power[i], power[i + 1]);
    let d0 = (y1 - y0) / (x1 - x0);
    let d1 = (y2 - y1) / (x2 - x1);
    let curv = (d1 - d0) / (x2 - x0);
    if curv >= -1e-300 {
        return (power[i], times[i]);
    }
    let xv = (0.5 * (x0 + x1) - d0 / (2.0 * curv)).clamp(x0, x2);
    // Parabola in Newton form, evaluated at its vertex.
    let yv = y0 + d0 * (xv - x0) + curv * (xv - x0) * (xv - x1);
    (yv.max(y1), xv)
}

/// Maximum average power and its time, refined off-grid.
pub fn max_power(ps: &PowerSeries) -> Result<(f64, f64)> {
    if ps.times.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(grid_max(&ps.times, &ps.power))
}

/// Golden-section maximization of a unimodal function on `[a, b]`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Coupling-averaged perturbative power series for the complete-graph
/// x-battery, orders `t, t^3, t^5, t^7`, with bandwidth `mu`.
pub fn perturbative_power(l: usize, mu: f64, times: &[f64]) -> Result<PowerSeries> {
    if l < 4 || l % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "perturbative series needs even L >= 4, got {l}"
        )));
    }
    if mu <= 0.0 {
        return Err(Error::InvalidParameter(format!("mu must be > 0, got {mu}")));
    }
    if times.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let lf = l as f64;
    let (mut s1, mut s3, mut s5, mut s7) = (0.0, 0.0, 0.0, 0.0);
    for k in 1..=l / 2 {
        let q = (2 * k - 1) as f64; // operator size of the k-th H_0 string
        let r = lf - q; // -2k + L + 1 = L - (2k - 1)
        s1 += q * r;
        s3 += q * r * ((6.0 * k as f64 - 4.0) * lf - 3.0 * q * q + 2.0);
        let half = lf / 2.0 - 1.0;
        s5 += 5.0 * q * r * (-6.0 * q * half * r + 3.0 * q * q * r * r + 4.0 * half * half);
        s7 += 7.0
            * q
            * r
            * (-4.0 * q * (6.25 * lf * lf - 25.5 * lf + 32.0) * (-r)
                - 15.0 * q.powi(3) * r.powi(3)
                - 60.0 * q * q * half * r * r
                - 8.0 * lf.powi(3)
                + 49.0 * lf * lf
                - 118.0 * lf
                + 80.0);
    }
    let mu2 = mu * mu;
    let c1 = s1 / (2.0 * lf * mu2);
    let c3 = -s3 / (24.0 * lf * lf * mu2 * mu2);
    let c5 = s5 / (720.0 * lf.powi(3) * mu2.powi(3));
    let c7 = -s7 / (40_320.0 * lf.powi(4) * mu2.powi(4));

    let power: Vec<f64> = times
        .iter()
        .map(|&t| {
            let t2 = t * t;
            t * (c1 + t2 * (c3 + t2 * (c5 + t2 * c7)))
        })
        .collect();
    let energy: Vec<f64> = times.iter().zip(&power).map(|(&t, &p)| p * t).collect();
    Ok(PowerSeries::new(times.to_vec(), energy, power))
}

/// Least-squares line through bandwidth samples `(L, mu)`.
#[derive(Debug, Clone, Serialize)]
pub struct BandwidthFit {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
}

impl BandwidthFit {
    pub fn predict(&self, l: usize) -> f64 {
        self.slope * l as f64 + self.intercept
    }
}

/// Fits `mu(L) = slope * L + intercept`; needs at least two distinct `L`.
pub fn bandwidth_fit(samples: &[(usize, f64)]) -> Result<BandwidthFit> {
    let n = samples.len() as f64;
    let distinct = {
        let mut ls: Vec<usize> = samples.iter().map(|&(l, _)| l).collect();
        ls.sort_unstable();
        ls.dedup();
        ls.len()
    };
    if distinct < 2 {
        return Err(Error::DegenerateFit);
    }
    let sx: f64 = samples.iter().map(|&(l, _)| l as f64).sum();
    let sy: f64 = samples.iter().map(|&(_, m)| m).sum();
    let sxx: f64 = samples.iter().map(|&(l, _)| (l as f64).powi(2)).sum();
    let sxy: f64 = samples.iter().map(|&(l, m)| l as f64 * m).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Err(Error::DegenerateFit);
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let residuals = samples
        .iter()
        .map(|&(l, m)| m - (slope * l as f64 + intercept))
        .collect();
    Ok(BandwidthFit {
        slope,
        intercept,
        residuals,
    })
}
