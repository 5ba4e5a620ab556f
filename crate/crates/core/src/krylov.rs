//! Lanczos tridiagonalization of the Liouvillian, Krylov amplitude
//! evolution, K-complexity, and the delocalization ratio diagnostic.

use nalgebra::DMatrix;

use crate::couplings::CouplingMatrix;
use crate::error::{Error, Result};
use crate::opspace::{apply_liouvillian, SectorVector};

/// Default step cap for large sectors.
pub const DEFAULT_N_MAX: usize = 200;

/// Lanczos coefficients `b_1..b_{K-1}` and the stored Krylov basis.
#[derive(Debug, Clone)]
pub struct LanczosData {
    pub b: Vec<f64>,
    /// True when the recursion hit the step cap before exhausting the space.
    pub truncated: bool,
    pub basis: Vec<SectorVector>,
}

impl LanczosData {
    /// Krylov dimension `K`.
    pub fn krylov_dim(&self) -> usize {
        self.b.len() + 1
    }

    /// Maximum off-diagonal Gram defect of the stored basis.
    pub fn gram_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, u) in self.basis.iter().enumerate() {
            for (jj, v) in self.basis.iter().enumerate() {
                let target = if i == jj { 1.0 } else { 0.0 };
                worst = worst.max((u.dot(v) - target).abs());
            }
        }
        worst
    }
}

/// Real Krylov amplitudes `phi_n(t_i)` on a time grid; rows are times.
#[derive(Debug, Clone)]
pub struct KrylovAmplitudes {
    pub times: Vec<f64>,
    pub phi: Vec<Vec<f64>>,
}

/// `C_K(t)` with run metadata carried along for serialization.
#[derive(Debug, Clone, Default)]
pub struct CkMeta {
    pub l: usize,
    pub size: usize,
    pub seed: u64,
    pub params: String,
}

#[derive(Debug, Clone)]
pub struct ComplexitySeries {
    pub times: Vec<f64>,
    pub ck: Vec<f64>,
    pub meta: CkMeta,
}

/// Lanczos recursion on the antisymmetric sector generator, with full
/// reorthogonalization against all previous basis vectors.
///
/// Terminates when the next coefficient falls below `tol` (Krylov space
/// exhausted) or after `n_max` steps (`truncated` is then set). When `tol`
/// is `None` it defaults to `1e-10` times the bandwidth of `j`.
pub fn lanczos(
    j: &CouplingMatrix,
    v0: &SectorVector,
    n_max: usize,
    tol: Option<f64>,
) -> Result<LanczosData> {
    if n_max < 1 {
        return Err(Error::InvalidParameter("n_max must be >= 1".into()));
    }
    let norm = v0.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(norm));
    }
    let tol = tol.unwrap_or_else(|| 1e-10 * j.bandwidth().max(f64::EPSILON));

    let mut basis = vec![v0.clone()];
    let mut b = Vec::new();
    let mut truncated = false;
    for n in 0..n_max {
        let mut w = apply_liouvillian(j, &basis[n])?;
        // Two rounds of classical Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for u in &basis {
                let c = u.dot(&w);
                w.axpy(-c, u);
            }
        }
        let bn = w.norm();
        if bn < tol {
            return Ok(LanczosData {
                b,
                truncated,
                basis,
            });
        }
        w.scale(1.0 / bn);
        b.push(bn);
        basis.push(w);
        if n + 1 == n_max {
            truncated = true;
        }
    }
    Ok(LanczosData {
        b,
        truncated,
        basis,
    })
}

/// Solves `phi_n' = b_n phi_{n-1} - b_{n+1} phi_{n+1}`, `phi_n(0) = d_{n0}`,
/// through the eigendecomposition of the symmetric tridiagonal matrix with
/// off-diagonals `b_n`; the amplitudes are the first column of its unitary
/// exponential with the alternating `i^n` phases stripped off.
pub fn evolve_amplitudes(ld: &LanczosData, times: &[f64]) -> Result<KrylovAmplitudes> {
    if times.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let k = ld.krylov_dim();
    let mut m = DMatrix::<f64>::zeros(k, k);
    for (n, &bn) in ld.b.iter().enumerate() {
        m[(n, n + 1)] = bn;
        m[(n + 1, n)] = bn;
    }
    let eig = m.symmetric_eigen();
    let lam = &eig.eigenvalues;
    let v = &eig.eigenvectors;

    let mut phi = Vec::with_capacity(times.len());
    for &t in times {
        let mut row = vec![0.0; k];
        let cos: Vec<f64> = lam.iter().map(|&x| (x * t).cos()).collect();
        let sin: Vec<f64> = lam.iter().map(|&x| (x * t).sin()).collect();
        for (n, slot) in row.iter_mut().enumerate() {
            let mut c = 0.0;
            let mut s = 0.0;
            for q in 0..k {
                let w = v[(n, q)] * v[(0, q)];
                c += w * cos[q];
                s += w * sin[q];
            }
            // phi_n = Re[i^{-n} (exp(i M t))_{n 0}]
            *slot = match n % 4 {
                0 => c,
                1 => s,
                2 => -c,
                _ => -s,
            };
        }
        phi.push(row);
    }
    Ok(KrylovAmplitudes {
        times: times.to_vec(),
        phi,
    })
}

/// `C_K(t) = sum_n n phi_n(t)^2`.
pub fn k_complexity(amps: &KrylovAmplitudes, meta: CkMeta) -> ComplexitySeries {
    let ck = amps
        .phi
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(n, p)| n as f64 * p * p)
                .sum::<f64>()
        })
        .collect();
    ComplexitySeries {
        times: amps.times.clone(),
        ck,
        meta,
    }
}

/// Full sector pipeline: Lanczos, amplitude evolution, K-complexity.
pub fn ck_for_initial_string(
    j: &CouplingMatrix,
    v0: &SectorVector,
    times: &[f64],
    n_max: usize,
    meta: CkMeta,
) -> Result<ComplexitySeries> {
    let ld = lanczos(j, v0, n_max, None)?;
    let amps = evolve_amplitudes(&ld, times)?;
    Ok(k_complexity(&amps, meta))
}

/// Window-averaged ratio of two complexity curves plus its flatness.
///
/// `R` is the mean of the pointwise ratio over `[t_lo, t_hi]`; `flatness` is
/// the coefficient of variation (std / mean) of that pointwise ratio, so
/// time-independence can be checked rather than assumed.
pub fn delocalization_ratio(
    large: &ComplexitySeries,
    small: &ComplexitySeries,
    window: (f64, f64),
) -> Result<(f64, f64)> {
    if large.times != small.times {
        return Err(Error::InvalidParameter(
            "complexity series must share a time grid".into(),
        ));
    }
    let mut ratios = Vec::new();
    for ((&t, &cl), &cs) in large
        .times
        .iter()
        .zip(&large.ck)
        .zip(&small.ck)
    {
        if t < window.0 || t > window.1 {
            continue;
        }
        if cs.abs() < 1e-12 {
            return Err(Error::DegenerateRatioWindow);
        }
        ratios.push(cl / cs);
    }
    if ratios.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let n = ratios.len() as f64;
    let mean = ratios.iter().sum::<f64>() / n;
    let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    Ok((mean, var.sqrt() / mean.abs().max(f64::EPSILON)))
}

/// Uniform grid `0, dt, ..., t_max` (inclusive within rounding).
pub fn time_grid(t_max: f64, dt: f64) -> Vec<f64> {
    let n = (t_max / dt).round() as usize;
    (0..=n).map(|i| i as f64 * dt).collect()
}

/// CSV serialization for a complexity series, `#`-prefixed metadata first.
pub fn complexity_csv(series: &ComplexitySeries) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# L={} size={} seed={} {}\n",
        series.meta.l, series.meta.size, series.meta.seed, series.meta.params
    ));
    out.push_str("t,ck\n");
    for (t, c) in series.times.iter().zip(&series.ck) {
        out.push_str(&format!("{t:.6},{c:.12e}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::graph::Graph;
    use crate::opspace::{MajoranaString, SectorVector};

    fn star_sampled(l: usize, seed: u64) -> CouplingMatrix {
        let g = Graph::star(l).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CouplingMatrix::sample_with_variance(&g, 0.5, &mut rng)
    }

    #[test]
    fn star_krylov_dimension_three() {
        for (l, s) in [(6usize, 1usize), (6, 3), (8, 4), (8, 6)] {
            let j = star_sampled(l, 13 + s as u64);
            let v0 =
                SectorVector::basis_state(l, MajoranaString::first(s)).unwrap();
            let ld = lanczos(&j, &v0, 50, None).unwrap();
            assert_eq!(ld.krylov_dim(), 3, "L={l} s={s}");
            let sum: f64 = j.triplets().iter().map(|t| t.2 * t.2).sum();
            let b1_expect: f64 = j.triplets()[..s].iter().map(|t| t.2 * t.2).sum::<f64>();
            assert_abs_diff_eq!(ld.b[0], b1_expect.sqrt(), epsilon = 1e-10);
            assert_abs_diff_eq!(ld.b[1], (sum - b1_expect).sqrt(), epsilon = 1e-10);
            assert!(ld.gram_defect() < 1e-10);
        }
        // s = L - 1 exhausts the second hop: b2 = 0 and the space collapses.
        let j = star_sampled(8, 2);
        let v0 = SectorVector::basis_state(8, MajoranaString::first(7)).unwrap();
        let ld = lanczos(&j, &v0, 50, None).unwrap();
        assert_eq!(ld.krylov_dim(), 2);
    }

    #[test]
    fn krylov_dim_bounded_by_sector() {
        let g = Graph::complete(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let j = CouplingMatrix::sample(&g, &mut rng);
        let v0 = SectorVector::basis_state(6, MajoranaString::first(1)).unwrap();
        let ld = lanczos(&j, &v0, 100, None).unwrap();
        assert!(ld.krylov_dim() <= 6);
        assert!(!ld.truncated);
    }

    #[test]
    fn lanczos_rejects_unnormalized() {
        let j = star_sampled(4, 0);
        let mut v0 = SectorVector::basis_state(4, MajoranaString::first(1)).unwrap();
        v0.amp[0] = 0.5;
        assert!(matches!(
            lanczos(&j, &v0, 10, None),
            Err(Error::NotNormalized(_))
        ));
        let v0 = SectorVector::basis_state(4, MajoranaString::first(1)).unwrap();
        assert!(lanczos(&j, &v0, 0, None).is_err());
    }

    #[test]
    fn two_level_closed_form() {
        let ld = LanczosData {
            b: vec![0.8],
            truncated: false,
            basis: vec![],
        };
        let times = time_grid(5.0, 0.25);
        let amps = evolve_amplitudes(&ld, &times).unwrap();
        for (i, &t) in times.iter().enumerate() {
            assert_abs_diff_eq!(amps.phi[i][0], (0.8 * t).cos(), epsilon = 1e-12);
            assert_abs_diff_eq!(amps.phi[i][1], (0.8 * t).sin(), epsilon = 1e-12);
        }
        let ck = k_complexity(&amps, CkMeta::default());
        assert_abs_diff_eq!(ck.ck[0], 0.0, epsilon = 1e-15);
        for (i, &t) in times.iter().enumerate() {
            assert_abs_diff_eq!(ck.ck[i], (0.8 * t).sin().powi(2), epsilon = 1e-12);
        }
    }

    #[test]
    fn amplitudes_start_at_delta_and_stay_normalized() {
        let j = star_sampled(8, 4);
        let v0 = SectorVector::basis_state(8, MajoranaString::first(4)).unwrap();
        let ld = lanczos(&j, &v0, 50, None).unwrap();
        let times = time_grid(10.0, 0.05);
        let amps = evolve_amplitudes(&ld, &times).unwrap();
        assert_abs_diff_eq!(amps.phi[0][0], 1.0, epsilon = 1e-12);
        for row in &amps.phi {
            let norm: f64 = row.iter().map(|p| p * p).sum();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-8);
        }
        assert!(evolve_amplitudes(&ld, &[]).is_err());
    }

    #[test]
    fn ratio_of_identical_curves() {
        let series = ComplexitySeries {
            times: time_grid(3.0, 0.1),
            ck: time_grid(3.0, 0.1).iter().map(|t| t.sin().powi(2) + 0.1).collect(),
            meta: CkMeta::default(),
        };
        let (r, flat) = delocalization_ratio(&series, &series, (0.5, 2.0)).unwrap();
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(flat, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn ratio_guards_vanishing_denominator() {
        let times = time_grid(3.0, 0.1);
        let zero = ComplexitySeries {
            times: times.clone(),
            ck: vec![0.0; times.len()],
            meta: CkMeta::default(),
        };
        let one = ComplexitySeries {
            times,
            ck: vec![1.0; 31],
            meta: CkMeta::default(),
        };
        assert!(matches!(
            delocalization_ratio(&one, &zero, (0.5, 2.0)),
            Err(Error::DegenerateRatioWindow)
        ));
    }

    #[test]
    fn truncation_robustness_early_window() {
        let g = Graph::complete(10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let j = CouplingMatrix::sample(&g, &mut rng)
            .rescale_to_unit_bandwidth()
            .unwrap();
        let v0 = SectorVector::basis_state(10, MajoranaString::first(5)).unwrap();
        let times = time_grid(2.0, 0.1);
        let a = ck_for_initial_string(&j, &v0, &times, 30, CkMeta::default()).unwrap();
        let b = ck_for_initial_string(&j, &v0, &times, 60, CkMeta::default()).unwrap();
        for (x, y) in a.ck.iter().zip(&b.ck).skip(1) {
            assert!(
                (x - y).abs() / y.abs().max(1e-30) < 1e-6,
                "early-time C_K sensitive to n_max: {x} vs {y}"
            );
        }
    }
}
