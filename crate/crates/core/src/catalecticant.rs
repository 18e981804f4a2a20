//! Catalecticant (Hankel) matrices, rank profiles, border rank and the
//! sampled dimension of secant varieties.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{arg, Error, Result};
use crate::exec::{map_range, Execution};
use crate::linalg::{float_rank, matrix_rank, Mat, RankMode};
use crate::scalar::{Field, Mode};
use crate::states::SymState;

/// `C_j(φ)`: the `(N-j+1) × (j+1)` Hankel matrix with entry `(r, c) = c_{r+c}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalecticant<F> {
    j: usize,
    matrix: Mat<F>,
}

impl<F: Field> Catalecticant<F> {
    pub fn j(&self) -> usize {
        self.j
    }

    pub fn matrix(&self) -> &Mat<F> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat<F> {
        self.matrix
    }
}

pub fn catalecticant<F: Field>(s: &SymState<F>, j: usize) -> Result<Catalecticant<F>> {
    s.require_qubits("catalecticant")?;
    let n = s.parties();
    if j < 1 || j + 1 > n {
        return arg(format!("catalecticant index j = {j} outside 1..={}", n.saturating_sub(1)));
    }
    Ok(hankel(s, j))
}

/// Hankel matrix for any `0 ≤ j ≤ N` (no range check; qubits assumed).
pub(crate) fn hankel<F: Field>(s: &SymState<F>, j: usize) -> Catalecticant<F> {
    let n = s.parties();
    let c = s.coeffs();
    Catalecticant { j, matrix: Mat::from_fn(n - j + 1, j + 1, |r, col| c[r + col].clone()) }
}

/// Ranks of `C_1 … C_{N-1}` and the symmetric tensor border rank.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankProfile {
    /// `ranks[j-1] = rank C_j`.
    pub ranks: Vec<usize>,
    pub border_rank: usize,
    pub mode: Mode,
    pub tol: Option<f64>,
    /// Indices `j` whose float rank was decided near the threshold.
    pub unstable: Vec<usize>,
}

impl RankProfile {
    pub fn rank(&self, j: usize) -> usize {
        self.ranks[j - 1]
    }

    pub fn is_unstable(&self) -> bool {
        !self.unstable.is_empty()
    }
}

pub fn rank_profile<F: Field>(s: &SymState<F>, mode: RankMode) -> Result<RankProfile> {
    s.require_qubits("rank profile")?;
    let n = s.parties();
    if n < 2 {
        return arg("rank profile needs N ≥ 2");
    }
    let mut ranks = Vec::with_capacity(n - 1);
    let mut unstable = Vec::new();
    for j in 1..n {
        let d = matrix_rank(hankel(s, j).matrix(), mode)?;
        if d.unstable {
            unstable.push(j);
        }
        ranks.push(d.rank);
    }
    let border_rank = ranks[..n / 2].iter().copied().max().unwrap_or(1);
    Ok(RankProfile { ranks, border_rank, mode: mode.mode(), tol: mode.tol(), unstable })
}

/// Secant family index: the least `k` with `φ ∈ σ_k`, i.e. the border rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SecantFamily {
    pub k: usize,
    pub unstable: bool,
}

pub fn secant_family<F: Field>(s: &SymState<F>, mode: RankMode) -> Result<SecantFamily> {
    let p = rank_profile(s, mode)?;
    Ok(SecantFamily { k: p.border_rank, unstable: p.is_unstable() })
}

/// Border ranks of many states.
pub fn border_ranks<F: Field>(states: &[SymState<F>], mode: RankMode, exec: Execution) -> Result<Vec<usize>> {
    crate::exec::map_slice(exec, states, |s| rank_profile(s, mode).map(|p| p.border_rank)).into_iter().collect()
}

/// Outcome of [`secant_dim_estimate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimEstimate {
    pub n: usize,
    pub k: usize,
    /// Projective dimension from the largest Jacobian rank seen.
    pub estimated: usize,
    /// `min(2k-1, N)`.
    pub predicted: usize,
    pub samples: usize,
    /// Fraction of samples attaining the maximum rank.
    pub attained: f64,
    /// Set when fewer than 90% of samples attain the maximum.
    pub warning: bool,
}

impl DimEstimate {
    pub fn matches(&self) -> bool {
        self.estimated == self.predicted
    }
}

const FD_STEP: f64 = 1e-6;
const JACOBIAN_TOL: f64 = 1e-7;
const MIN_SEPARATION: f64 = 0.1;
const MAX_RESAMPLES: usize = 100;

/// Estimate `dim σ_k(V^{N,1})` from the rank of the Jacobian of
/// `(z_r, λ_r) ↦ Σ_r λ_r (1, z_r, …, z_r^N)` at random parameters, using
/// central differences on real and imaginary parts separately.
pub fn secant_dim_estimate(n: usize, k: usize, samples: usize, seed: u64, exec: Execution) -> Result<DimEstimate> {
    if n < 1 || k < 1 || k > n / 2 + 1 {
        return arg(format!("secant dimension needs 1 ≤ k ≤ ⌊N/2⌋+1, got N={n}, k={k}"));
    }
    if samples == 0 {
        return arg("at least one sample is required");
    }
    let ranks: Vec<Result<usize>> = map_range(exec, samples, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let params = sample_parameters(&mut rng, k)?;
        Ok(jacobian_real_rank(n, &params))
    });
    let ranks: Vec<usize> = ranks.into_iter().collect::<Result<_>>()?;
    let best = *ranks.iter().max().expect("samples > 0");
    let hits = ranks.iter().filter(|&&r| r == best).count();
    let attained = hits as f64 / samples as f64;
    Ok(DimEstimate {
        n,
        k,
        estimated: (best / 2).saturating_sub(1),
        predicted: (2 * k - 1).min(n),
        samples,
        attained,
        warning: attained < 0.9,
    })
}

fn sample_parameters(rng: &mut ChaCha8Rng, k: usize) -> Result<Vec<(Complex64, Complex64)>> {
    for _ in 0..MAX_RESAMPLES {
        let zs: Vec<Complex64> = (0..k)
            .map(|_| Complex64::from_polar(rng.gen_range(0.7..1.3), rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        let separated = (0..k).all(|a| (a + 1..k).all(|b| (zs[a] - zs[b]).norm() > MIN_SEPARATION));
        if !separated {
            continue;
        }
        return Ok(zs
            .into_iter()
            .map(|z| (z, Complex64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..std::f64::consts::TAU))))
            .collect());
    }
    Err(Error::Numerical("could not draw separated secant parameters".into()))
}

fn coefficient_map(n: usize, params: &[(Complex64, Complex64)]) -> Vec<f64> {
    let mut out = vec![0.0; 2 * (n + 1)];
    for &(z, lambda) in params {
        let mut pw = lambda;
        for m in 0..=n {
            out[2 * m] += pw.re;
            out[2 * m + 1] += pw.im;
            pw *= z;
        }
    }
    out
}

fn jacobian_real_rank(n: usize, params: &[(Complex64, Complex64)]) -> usize {
    let cols = 4 * params.len();
    let mut jac = DMatrix::<Complex64>::zeros(2 * (n + 1), cols);
    for col in 0..cols {
        let (r, slot) = (col / 4, col % 4);
        let shift = |h: f64| {
            let mut p = params.to_vec();
            let (z, l) = &mut p[r];
            match slot {
                0 => z.re += h,
                1 => z.im += h,
                2 => l.re += h,
                _ => l.im += h,
            }
            coefficient_map(n, &p)
        };
        let plus = shift(FD_STEP);
        let minus = shift(-FD_STEP);
        for row in 0..2 * (n + 1) {
            jac[(row, col)] = Complex64::new((plus[row] - minus[row]) / (2.0 * FD_STEP), 0.0);
        }
    }
    float_rank(&jac, JACOBIAN_TOL).rank
}
