//! Operator space: normalized Majorana strings, fixed-size sectors with
//! combinatorial ranking, the matrix-free Liouvillian, Jordan-Wigner battery
//! operators, and the free-fermion determinant autocorrelation fast path.
//!
//! A string `S` (subset of modes) stands for the normalized operator
//! `2^{s/2} g^{i_1} ... g^{i_s}` with ascending indices; these form an
//! orthonormal basis under the Frobenius product. The commutator with a
//! quadratic Hamiltonian never changes the string size, so each sector is a
//! closed real vector space of dimension `C(L, s)`.

use nalgebra::{Complex, DMatrix};

use crate::couplings::{CouplingMatrix, Propagator};
use crate::error::{Error, Result};

type C64 = Complex<f64>;

/// `C(n, k)` for `n <= 64`, exact in u64.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// A subset of modes `{1..L}` as a bitset; bit `i-1` set means `g^i` present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MajoranaString(pub u64);

impl MajoranaString {
    /// The string `{1, ..., s}`.
    pub fn first(s: usize) -> Self {
        debug_assert!(s <= 64);
        if s == 64 {
            Self(u64::MAX)
        } else {
            Self((1u64 << s) - 1)
        }
    }

    pub fn from_modes(modes: &[u16]) -> Self {
        Self(modes.iter().fold(0u64, |m, &i| m | 1u64 << (i - 1)))
    }

    pub fn size(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Modes present, ascending, 1-based.
    pub fn modes(self) -> Vec<u16> {
        let mut v = Vec::with_capacity(self.size());
        let mut m = self.0;
        while m != 0 {
            v.push(m.trailing_zeros() as u16 + 1);
            m &= m - 1;
        }
        v
    }
}

/// Colexicographic rank of a size-`s` string among all size-`s` strings.
///
/// Colex rank order coincides with numeric order of the bitmasks, and
/// `rank(first(s)) = 0`.
pub fn sector_rank(mask: MajoranaString) -> usize {
    let mut rank = 0u64;
    let mut m = mask.0;
    let mut i = 1;
    while m != 0 {
        let p = m.trailing_zeros() as usize;
        rank += binomial(p, i);
        i += 1;
        m &= m - 1;
    }
    rank as usize
}

/// Inverse of [`sector_rank`] for strings of size `s` on `l` modes.
pub fn sector_unrank(rank: usize, l: usize, s: usize) -> MajoranaString {
    debug_assert!(rank < binomial(l, s) as usize);
    let mut rank = rank as u64;
    let mut mask = 0u64;
    for i in (1..=s).rev() {
        // Largest p with C(p, i) <= rank.
        let mut p = i - 1;
        while binomial(p + 1, i) <= rank {
            p += 1;
        }
        rank -= binomial(p, i);
        mask |= 1u64 << p;
    }
    MajoranaString(mask)
}

/// Dimension of the size-`s` sector.
pub fn sector_dim(l: usize, s: usize) -> usize {
    binomial(l, s) as usize
}

/// Dense real coefficient vector over all strings of a fixed size.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorVector {
    pub l: usize,
    pub s: usize,
    pub amp: Vec<f64>,
}

impl SectorVector {
    pub fn zeros(l: usize, s: usize) -> Self {
        Self {
            l,
            s,
            amp: vec![0.0; sector_dim(l, s)],
        }
    }

    /// Unit vector on a single basis string.
    pub fn basis_state(l: usize, mask: MajoranaString) -> Result<Self> {
        let s = mask.size();
        if s == 0 || s > l {
            return Err(Error::InvalidParameter(format!(
                "string size {s} outside 1..={l}"
            )));
        }
        let mut v = Self::zeros(l, s);
        v.amp[sector_rank(mask)] = 1.0;
        Ok(v)
    }

    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.amp.iter().zip(&other.amp).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&mut self, c: f64) {
        for x in &mut self.amp {
            *x *= c;
        }
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: f64, other: &Self) {
        for (x, y) in self.amp.iter_mut().zip(&other.amp) {
            *x += c * y;
        }
    }
}

/// Applies the size-conserving Liouvillian generator `T` to a sector vector.
///
/// With `[H, O_S] = i sum_{S'} T_{S'S} O_{S'}`, an edge `(a, b)` with exactly
/// one endpoint in `S` maps `S` to `S xor {a, b}` with amplitude
/// `J_ab * sigma`, where `sigma = -(-1)^m` if `a` is in `S` and `+(-1)^m` if
/// `b` is, and `m` counts members of `S` strictly between `a` and `b`.
/// `T` is real antisymmetric; the sign rule is gated by the dense-oracle
/// equivalence test and must not be altered without it.
pub fn apply_liouvillian(j: &CouplingMatrix, v: &SectorVector) -> Result<SectorVector> {
    if j.mode_count() != v.l {
        return Err(Error::InvalidParameter(format!(
            "coupling matrix on {} modes, vector on {}",
            j.mode_count(),
            v.l
        )));
    }
    let (l, s) = (v.l, v.s);
    let dim = sector_dim(l, s);
    debug_assert_eq!(v.amp.len(), dim);

    // Precompute per-edge masks.
    struct Edge {
        flip: u64,
        bit_a: u64,
        between: u64,
        val: f64,
    }
    let edges: Vec<Edge> = j
        .triplets()
        .iter()
        .map(|&(a, b, val)| {
            let (pa, pb) = (a as u64 - 1, b as u64 - 1);
            let between = if pb > pa + 1 {
                ((1u64 << pb) - 1) & !((1u64 << (pa + 1)) - 1)
            } else {
                0
            };
            Edge {
                flip: (1u64 << pa) | (1u64 << pb),
                bit_a: 1u64 << pa,
                between,
                val,
            }
        })
        .collect();

    // Pascal table so target ranking is pure lookups in the hot loop.
    let cols = s + 1;
    let mut choose = vec![0u64; 64 * cols];
    for p in 0..64 {
        for i in 0..=s.min(p) {
            choose[p * cols + i] = binomial(p, i);
        }
    }
    let rank_of = |m: u64| -> usize {
        let mut r = 0u64;
        let mut mm = m;
        let mut i = 1usize;
        while mm != 0 {
            let p = mm.trailing_zeros() as usize;
            r += choose[p * cols + i];
            i += 1;
            mm &= mm - 1;
        }
        r as usize
    };

    let mut out = SectorVector::zeros(l, s);
    // Gosper's hack walks size-s masks in increasing numeric order, which is
    // exactly colex rank order.
    let mut mask = MajoranaString::first(s).0;
    for idx in 0..dim {
        let amp = v.amp[idx];
        if amp != 0.0 {
            for e in &edges {
                let hit = mask & e.flip;
                if hit != 0 && hit != e.flip {
                    let target = mask ^ e.flip;
                    let m = (mask & e.between).count_ones();
                    let a_in = hit & e.bit_a != 0;
                    let mut sigma = if m % 2 == 0 { 1.0 } else { -1.0 };
                    if a_in {
                        sigma = -sigma;
                    }
                    out.amp[rank_of(target)] += e.val * sigma * amp;
                }
            }
        }
        if idx + 1 < dim {
            // Gosper: next mask with the same popcount.
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BatteryAxis {
    X,
    Z,
}

impl std::fmt::Display for BatteryAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BatteryAxis::X => write!(f, "x"),
            BatteryAxis::Z => write!(f, "z"),
        }
    }
}

impl std::str::FromStr for BatteryAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(BatteryAxis::X),
            "z" | "Z" => Ok(BatteryAxis::Z),
            other => Err(Error::InvalidParameter(format!("unknown axis '{other}'"))),
        }
    }
}

/// The static battery Hamiltonian, Frobenius-normalized, expanded over
/// Majorana strings through the Jordan-Wigner map.
///
/// `x` axis: one term per odd size `2j - 1` (mask `{1..2j-1}`, phase
/// `(-i)^{j-1}`); `z` axis: `L/2` size-2 terms (mask `{2j-1, 2j}`, phase
/// `-i`). The overall weight `sqrt(2/L)` makes the Frobenius norm 1.
#[derive(Debug, Clone)]
pub struct BatteryOperator {
    pub axis: BatteryAxis,
    pub l: usize,
    pub terms: Vec<(MajoranaString, C64)>,
    pub weight: f64,
}

pub fn battery_operator(axis: BatteryAxis, l: usize) -> Result<BatteryOperator> {
    if l < 2 || l % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "battery operator needs even L >= 2, got {l}"
        )));
    }
    let minus_i = C64::new(0.0, -1.0);
    let terms = (1..=l / 2)
        .map(|jj| match axis {
            BatteryAxis::X => (
                MajoranaString::first(2 * jj - 1),
                minus_i.powu(jj as u32 - 1),
            ),
            BatteryAxis::Z => (
                MajoranaString(0b11u64 << (2 * jj - 2)),
                minus_i,
            ),
        })
        .collect();
    Ok(BatteryOperator {
        axis,
        l,
        terms,
        weight: (2.0 / l as f64).sqrt(),
    })
}

impl BatteryOperator {
    pub fn frobenius_norm(&self) -> f64 {
        self.weight * (self.terms.len() as f64).sqrt()
    }
}

/// Determinant of the sub-block `U[rows, cols]` (0-based mode indices).
pub fn minor_det(u: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    debug_assert_eq!(rows.len(), cols.len());
    let n = rows.len();
    match n {
        0 => 1.0,
        1 => u[(rows[0], cols[0])],
        2 => {
            u[(rows[0], cols[0])] * u[(rows[1], cols[1])]
                - u[(rows[0], cols[1])] * u[(rows[1], cols[0])]
        }
        _ => {
            let sub = DMatrix::from_fn(n, n, |r, c| u[(rows[r], cols[c])]);
            sub.lu().determinant()
        }
    }
}

/// Free-fermion overlap `(O_S | O_{S'}(t)) = det U(t)[S', S]`.
///
/// Rows are indexed by the evolved string `from`, columns by `onto`; both
/// must have the same size.
pub fn free_overlap(u: &DMatrix<f64>, onto: MajoranaString, from: MajoranaString) -> f64 {
    let rows: Vec<usize> = from.modes().iter().map(|&i| i as usize - 1).collect();
    let cols: Vec<usize> = onto.modes().iter().map(|&i| i as usize - 1).collect();
    minor_det(u, &rows, &cols)
}

/// Autocorrelation `(O_S | O_S(t))` via the principal minor of `exp(J t)`.
pub fn free_autocorrelation(j: &CouplingMatrix, s: MajoranaString, t: f64) -> f64 {
    let u = j.propagator(t);
    free_overlap(&u, s, s)
}

/// Same, reusing a cached [`Propagator`].
pub fn free_autocorrelation_with(p: &Propagator, s: MajoranaString, t: f64) -> f64 {
    free_overlap(&p.at(t), s, s)
}
