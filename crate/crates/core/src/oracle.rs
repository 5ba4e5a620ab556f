//! Brute-force Hilbert-space oracle for small systems.
//!
//! Explicit gamma matrices on `2^{L/2}` dimensions, dense Hamiltonians,
//! exact state evolution, and the dense sector superoperator. This module
//! gates correctness of the sector pipeline; it is deliberately capped and
//! not meant for production runs.

use nalgebra::{Complex, DMatrix, DVector};

use crate::battery::PowerSeries;
use crate::couplings::CouplingMatrix;
use crate::error::{Error, Result};
use crate::opspace::{sector_dim, sector_unrank, BatteryAxis, MajoranaString};

type C64 = Complex<f64>;

const GAMMA_CAP: usize = 12;
const EVOLUTION_CAP: usize = 10;
const SUPEROP_CAP: usize = 8;

fn check_cap(l: usize, cap: usize) -> Result<()> {
    if l < 2 || l % 2 != 0 {
        return Err(Error::InvalidParameter(format!("L must be even >= 2, got {l}")));
    }
    if l > cap {
        return Err(Error::OracleCapExceeded { l, cap });
    }
    Ok(())
}

fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

fn pauli(which: char) -> DMatrix<C64> {
    let i = C64::new(0.0, 1.0);
    let o = C64::new(1.0, 0.0);
    let z = C64::new(0.0, 0.0);
    match which {
        'x' => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        'y' => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        'z' => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
    }
}

/// Jordan-Wigner gamma matrices: `g^{2j-1} = (prod sz) sx_j / sqrt2`,
/// `g^{2j} = (prod sz) sy_j / sqrt2`, so `{g^i, g^j} = delta_ij`.
pub fn dense_gammas(l: usize) -> Result<Vec<DMatrix<C64>>> {
    check_cap(l, GAMMA_CAP)?;
    let n = l / 2;
    let inv_sqrt2 = C64::new(1.0 / 2.0f64.sqrt(), 0.0);
    let mut out = Vec::with_capacity(l);
    for j in 1..=n {
        for axis in ['x', 'y'] {
            let mut m = DMatrix::<C64>::identity(1, 1);
            for site in 1..=n {
                let factor = if site < j {
                    pauli('z')
                } else if site == j {
                    pauli(axis)
                } else {
                    pauli('1')
                };
                m = kron(&m, &factor);
            }
            out.push(m * inv_sqrt2);
        }
    }
    Ok(out)
}

/// `H = i sum_{a<b} J_ab g^a g^b` on the full Hilbert space.
pub fn dense_hamiltonian(j: &CouplingMatrix) -> Result<DMatrix<C64>> {
    let l = j.mode_count();
    let g = dense_gammas(l)?;
    let dim = 1usize << (l / 2);
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    let i = C64::new(0.0, 1.0);
    for &(a, b, v) in j.triplets() {
        h += (&g[a as usize - 1] * &g[b as usize - 1]) * (i * C64::new(v, 0.0));
    }
    Ok(h)
}

/// Static battery Hamiltonian `sum_i sigma^a_i` on `L/2` qubits.
pub fn dense_battery_hamiltonian(axis: BatteryAxis, l: usize) -> Result<DMatrix<C64>> {
    check_cap(l, GAMMA_CAP)?;
    let n = l / 2;
    let which = match axis {
        BatteryAxis::X => 'x',
        BatteryAxis::Z => 'z',
    };
    let dim = 1usize << n;
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for site in 1..=n {
        let mut m = DMatrix::<C64>::identity(1, 1);
        for s in 1..=n {
            let f = if s == site { pauli(which) } else { pauli('1') };
            m = kron(&m, &f);
        }
        h += m;
    }
    Ok(h)
}

/// Many-body bandwidth: largest minus smallest eigenvalue of the dense `H`.
pub fn dense_bandwidth(j: &CouplingMatrix) -> Result<f64> {
    let h = dense_hamiltonian(j)?;
    let eig = h.symmetric_eigen();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &e in eig.eigenvalues.iter() {
        lo = lo.min(e);
        hi = hi.max(e);
    }
    Ok(hi - lo)
}

/// Direct quench simulation: ground state of the battery Hamiltonian evolved
/// with the bandwidth-rescaled quadratic Hamiltonian; exact `E(t)`, `P(t)`.
pub fn dense_evolution_power(
    j: &CouplingMatrix,
    axis: BatteryAxis,
    times: &[f64],
) -> Result<PowerSeries> {
    check_cap(j.mode_count(), EVOLUTION_CAP)?;
    if times.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let l = j.mode_count();
    let h0 = dense_battery_hamiltonian(axis, l)?;
    let h0_eig = h0.clone().symmetric_eigen();
    let (mut e0, mut idx) = (f64::INFINITY, 0);
    for (q, &e) in h0_eig.eigenvalues.iter().enumerate() {
        if e < e0 {
            e0 = e;
            idx = q;
        }
    }
    let psi0: DVector<C64> = h0_eig.eigenvectors.column(idx).into();

    let h1 = dense_hamiltonian(j)?;
    let eig = h1.symmetric_eigen();
    let span = {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &e in eig.eigenvalues.iter() {
            lo = lo.min(e);
            hi = hi.max(e);
        }
        hi - lo
    };
    if span <= f64::EPSILON {
        return Err(Error::ZeroBandwidth);
    }
    let coeff = eig.eigenvectors.adjoint() * &psi0;

    let mut energy = Vec::with_capacity(times.len());
    let mut power = Vec::with_capacity(times.len());
    for &t in times {
        let mut evolved = coeff.clone();
        for (q, c) in evolved.iter_mut().enumerate() {
            let phase = C64::new(0.0, -eig.eigenvalues[q] / span * t).exp();
            *c *= phase;
        }
        let psi_t = &eig.eigenvectors * evolved;
        let norm = psi_t.norm_squared();
        debug_assert!((norm - 1.0).abs() < 1e-10, "norm drift {norm}");
        let e_t = (psi_t.adjoint() * &h0 * &psi_t)[(0, 0)].re - e0;
        energy.push(e_t);
        power.push(if t > 0.0 { e_t / t } else { 0.0 });
    }
    Ok(PowerSeries::new(times.to_vec(), energy, power))
}

/// Dense sector superoperator: `M[S'][S] = (O_{S'} | [H, O_S]) / i` over the
/// size-`s` string basis. Must be real antisymmetric and must match the
/// matrix-free sign rule element by element.
pub fn dense_superoperator_sector(j: &CouplingMatrix, s: usize) -> Result<DMatrix<f64>> {
    let l = j.mode_count();
    check_cap(l, SUPEROP_CAP)?;
    if s == 0 || s > l {
        return Err(Error::InvalidParameter(format!("sector {s} outside 1..={l}")));
    }
    let g = dense_gammas(l)?;
    let hilbert = 1usize << (l / 2);
    let h = dense_hamiltonian(j)?;
    let dim = sector_dim(l, s);

    let basis_op = |mask: MajoranaString| -> DMatrix<C64> {
        let mut m = DMatrix::<C64>::identity(hilbert, hilbert);
        for i in mask.modes() {
            m = m * &g[i as usize - 1];
        }
        m * C64::new(2.0f64.powf(s as f64 / 2.0), 0.0)
    };

    let ops: Vec<DMatrix<C64>> = (0..dim)
        .map(|r| basis_op(sector_unrank(r, l, s)))
        .collect();
    let d = hilbert as f64;
    let mut t = DMatrix::<f64>::zeros(dim, dim);
    let mut max_imag: f64 = 0.0;
    for (col, op) in ops.iter().enumerate() {
        let comm = &h * op - op * &h;
        for (row, proj) in ops.iter().enumerate() {
            // (A|B) = Tr[A^dag B]/D; divide out the i carried by the phases.
            let overlap = (proj.adjoint() * &comm).trace() / C64::new(0.0, d);
            t[(row, col)] = overlap.re;
            max_imag = max_imag.max(overlap.im.abs());
        }
    }
    debug_assert!(max_imag < 1e-12, "superoperator not real: {max_imag}");
    Ok(t)
}

/// Dense Frobenius autocorrelation of an arbitrary string operator under `H`
/// (used to cross-check the determinant fast path).
pub fn dense_string_autocorrelation(
    j: &CouplingMatrix,
    mask: MajoranaString,
    times: &[f64],
) -> Result<Vec<f64>> {
    let l = j.mode_count();
    check_cap(l, EVOLUTION_CAP)?;
    let g = dense_gammas(l)?;
    let hilbert = 1usize << (l / 2);
    let s = mask.size();
    let mut op = DMatrix::<C64>::identity(hilbert, hilbert);
    for i in mask.modes() {
        op = op * &g[i as usize - 1];
    }
    op *= C64::new(2.0f64.powf(s as f64 / 2.0), 0.0);

    let h = dense_hamiltonian(j)?;
    let eig = h.symmetric_eigen();
    let v = &eig.eigenvectors;
    let op_eig = v.adjoint() * &op * v;
    let d = hilbert as f64;

    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..hilbert {
            for c in 0..hilbert {
                let phase = C64::new(0.0, (eig.eigenvalues[r] - eig.eigenvalues[c]) * t).exp();
                acc += op_eig[(r, c)].conj() * phase * op_eig[(r, c)];
            }
        }
        out.push((acc / C64::new(d, 0.0)).re);
    }
    Ok(out)
}
