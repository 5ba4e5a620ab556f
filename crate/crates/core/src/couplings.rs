//! Gaussian disorder on graph edges, single-particle spectra, bandwidth
//! rescaling, and the orthogonal single-particle propagator.
//!
//! Conventions: Majorana modes satisfy `{g^i, g^j} = delta_ij` (so each
//! squares to 1/2). With `H = i * sum_{a<b} J_ab g^a g^b` the many-body
//! levels are `sum_k (+-) eps_k / 2`, where `eps_k` are the paired singular
//! values of the antisymmetric matrix `J`; the bandwidth is `mu = sum_k eps_k`.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

type C64 = Complex<f64>;

/// Real antisymmetric coupling matrix supported on graph edges.
///
/// Only the upper triangle is stored; antisymmetry is exact by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix {
    #[serde(rename = "L")]
    l: usize,
    /// `(a, b, J_ab)` with `1 <= a < b <= L`.
    triplets: Vec<(u16, u16, f64)>,
}

/// Paired singular values of `J`, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleParticleSpectrum {
    pub eps: Vec<f64>,
}

impl SingleParticleSpectrum {
    /// Many-body bandwidth `mu = sum_k eps_k`.
    pub fn bandwidth(&self) -> f64 {
        self.eps.iter().sum()
    }
}

impl CouplingMatrix {
    /// Builds from explicit `(a, b, value)` triplets, validating `a < b`.
    pub fn from_triplets(l: usize, triplets: Vec<(u16, u16, f64)>) -> Result<Self> {
        for &(a, b, _) in &triplets {
            if a >= b || a < 1 || b as usize > l {
                return Err(Error::InvalidParameter(format!(
                    "triplet ({a},{b}) must satisfy 1 <= a < b <= {l}"
                )));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(a, b, _) in &triplets {
            if !seen.insert((a, b)) {
                return Err(Error::InvalidParameter(format!("duplicate entry ({a},{b})")));
            }
        }
        Ok(Self { l, triplets })
    }

    /// Samples `J_ab ~ N(0, (L-1)/(2 n_E))` on every edge of `g`.
    pub fn sample(g: &Graph, rng: &mut impl Rng) -> Self {
        let variance = (g.vertex_count() as f64 - 1.0) / (2.0 * g.edge_count() as f64);
        Self::sample_with_variance(g, variance, rng)
    }

    /// Samples with an explicit variance (the star-graph closed forms use 1/2).
    pub fn sample_with_variance(g: &Graph, variance: f64, rng: &mut impl Rng) -> Self {
        let normal = Normal::new(0.0, variance.sqrt()).expect("variance must be finite");
        let triplets = g
            .edges()
            .iter()
            .map(|&(a, b)| (a, b, normal.sample(rng)))
            .collect();
        Self {
            l: g.vertex_count(),
            triplets,
        }
    }

    pub fn mode_count(&self) -> usize {
        self.l
    }

    pub fn triplets(&self) -> &[(u16, u16, f64)] {
        &self.triplets
    }

    /// Dense antisymmetric `L x L` matrix.
    pub fn dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.l, self.l);
        for &(a, b, v) in &self.triplets {
            m[(a as usize - 1, b as usize - 1)] = v;
            m[(b as usize - 1, a as usize - 1)] = -v;
        }
        m
    }

    /// Paired singular values `eps_k` of `J` (L/2 values, descending).
    pub fn spectrum(&self) -> SingleParticleSpectrum {
        let svd = self.dense().svd(false, false);
        let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        sv.sort_by(|x, y| y.total_cmp(x));
        // Singular values of a real antisymmetric matrix come in equal pairs;
        // average each pair to shed rounding asymmetry.
        let eps = sv.chunks(2).map(|c| c.iter().sum::<f64>() / 2.0).collect();
        SingleParticleSpectrum { eps }
    }

    /// Many-body bandwidth `mu`.
    pub fn bandwidth(&self) -> f64 {
        self.spectrum().bandwidth()
    }

    /// Returns `J / mu`, so the result has unit bandwidth.
    pub fn rescale_to_unit_bandwidth(&self) -> Result<Self> {
        let mu = self.bandwidth();
        if mu <= f64::EPSILON {
            return Err(Error::ZeroBandwidth);
        }
        let triplets = self
            .triplets
            .iter()
            .map(|&(a, b, v)| (a, b, v / mu))
            .collect();
        Ok(Self { l: self.l, triplets })
    }

    /// `U(t) = exp(J t)`, the orthogonal single-particle propagator.
    pub fn propagator(&self, t: f64) -> DMatrix<f64> {
        Propagator::new(self).at(t)
    }
}

/// Cached eigendecomposition of `i J` for repeated propagator evaluations.
pub struct Propagator {
    evals: Vec<f64>,
    evecs: DMatrix<C64>,
}

impl Propagator {
    pub fn new(j: &CouplingMatrix) -> Self {
        let l = j.mode_count();
        let mut h = DMatrix::<C64>::zeros(l, l);
        for &(a, b, v) in j.triplets() {
            // H = i J is Hermitian.
            h[(a as usize - 1, b as usize - 1)] = C64::new(0.0, v);
            h[(b as usize - 1, a as usize - 1)] = C64::new(0.0, -v);
        }
        let eig = h.symmetric_eigen();
        Self {
            evals: eig.eigenvalues.iter().copied().collect(),
            evecs: eig.eigenvectors,
        }
    }

    /// `exp(J t) = V exp(-i diag(lambda) t) V^H`, real up to rounding.
    pub fn at(&self, t: f64) -> DMatrix<f64> {
        let l = self.evals.len();
        let phases: Vec<C64> = self
            .evals
            .iter()
            .map(|&lam| C64::new(0.0, -lam * t).exp())
            .collect();
        let mut u = DMatrix::<f64>::zeros(l, l);
        for r in 0..l {
            for c in 0..l {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..l {
                    acc += self.evecs[(r, k)] * phases[k] * self.evecs[(c, k)].conj();
                }
                u[(r, c)] = acc.re;
            }
        }
        u
    }
}
