//! Reduced density matrices of symmetric states, their ranks, the minimal
//! interaction length, and frustration-free parent Hamiltonians.
//!
//! For `j = N - m`, the marginal on `m` parties in the orthonormal Dicke
//! basis is `ρ ∝ Ψ Ψ†` with `Ψ = D C_j W^{1/2}`, `D = diag √C(m, r)` and
//! `W = diag C(j, l)`. Hence `rank ρ^{(m)} = rank C_j`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::catalecticant::hankel;
use crate::error::{arg, Error, Result};
use crate::linalg::{exact_kernel, float_kernel, float_rank, hermitian_eigen, matrix_rank, Mat, RankMode};
use crate::scalar::{binomial, same_type, Field, GaussianRational, Mode};
use crate::states::{to_full_tensor_capped, SymState, FULL_TENSOR_CAP};

/// Largest `N` for which the full spectrum of `H` is computed densely.
pub const DENSE_SPECTRUM_MAX_PARTIES: usize = 10;
/// Verification threshold for `‖Hψ‖ / (‖H‖‖ψ‖)` and `λ_min(H)`.
pub const VERIFY_TOL: f64 = 1e-10;
/// Ground-space clustering threshold, relative to `‖H‖`.
pub const GROUND_GAP: f64 = 1e-8;

/// `ρ^{(m)}` in the orthonormal Dicke basis of `m` qubits, trace one.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensity {
    pub n: usize,
    pub m: usize,
    pub matrix: DMatrix<Complex64>,
}

impl ReducedDensity {
    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).0
    }

    pub fn hermitian_defect(&self) -> f64 {
        crate::linalg::hermitian_defect(&self.matrix)
    }
}

/// `Ψ = D C_j W^{1/2}`, an `(m+1) × (j+1)` factor of `ρ^{(m)}`.
fn psi_factor<F: Field>(s: &SymState<F>, m: usize) -> DMatrix<Complex64> {
    let n = s.parties();
    let j = n - m;
    let c = hankel(s, j);
    DMatrix::from_fn(m + 1, j + 1, |r, l| {
        let scale = ((binomial(m, r) as f64) * (binomial(j, l) as f64)).sqrt();
        c.matrix()[(r, l)].to_c64() * scale
    })
}

/// Marginal on `m` of the `N` parties, `1 ≤ m ≤ N − 1`.
pub fn reduced_density<F: Field>(s: &SymState<F>, m: usize) -> Result<ReducedDensity> {
    s.require_qubits("reduced density")?;
    if m < 1 || m + 1 > s.parties() {
        return arg(format!("subsystem size m = {m} outside 1..={}", s.parties().saturating_sub(1)));
    }
    Ok(reduced_density_unchecked(s, m))
}

fn reduced_density_unchecked<F: Field>(s: &SymState<F>, m: usize) -> ReducedDensity {
    let psi = psi_factor(s, m);
    let mut rho = &psi * psi.adjoint();
    let tr: f64 = rho.diagonal().iter().map(|z| z.re).sum();
    rho /= Complex64::new(tr, 0.0);
    ReducedDensity { n: s.parties(), m, matrix: rho }
}

/// Rank of `ρ^{(m)}`: exact via the congruent matrix `C_j W C_j†`, float
/// via the singular values of `Ψ` (so the tolerance applies to `√λ`).
fn rdm_rank<F: Field>(s: &SymState<F>, m: usize, mode: RankMode) -> Result<(usize, bool)> {
    let j = s.parties() - m;
    match mode {
        RankMode::Exact => {
            if F::MODE != Mode::Exact {
                return Err(Error::Mode("exact rank of float data".into()));
            }
            let c = hankel(s, j).into_matrix();
            let w = Mat::from_fn(j + 1, j + 1, |a, b| if a == b { F::from_u128(binomial(j, a)) } else { F::zero() });
            let g = c.mul_mat(&w).mul_mat(&c.adjoint());
            Ok((matrix_rank(&g, RankMode::Exact)?.rank, false))
        }
        RankMode::Float { tol } => {
            let d = float_rank(&psi_factor(s, m), tol);
            Ok((d.rank, d.unstable))
        }
    }
}

/// Ranks of `ρ^{(m)}` for `m = 1 … N−1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RdmProfile {
    /// `ranks[m-1] = rank ρ^{(m)}`.
    pub ranks: Vec<usize>,
    pub unstable: Vec<usize>,
}

/// RDM rank profile; fails if the symmetry `m ↔ N−m` or the equality with
/// catalecticant ranks is violated.
pub fn rdm_rank_profile<F: Field>(s: &SymState<F>, mode: RankMode) -> Result<RdmProfile> {
    s.require_qubits("RDM rank profile")?;
    let n = s.parties();
    if n < 2 {
        return arg("RDM rank profile needs N ≥ 2");
    }
    let mut ranks = Vec::with_capacity(n - 1);
    let mut unstable = Vec::new();
    for m in 1..n {
        let (r, u) = rdm_rank(s, m, mode)?;
        if u {
            unstable.push(m);
        }
        ranks.push(r);
    }
    for m in 1..n {
        if ranks[m - 1] != ranks[n - m - 1] {
            return Err(Error::Numerical(format!("rank ρ^({m}) ≠ rank ρ^({}) ", n - m)));
        }
        let cat = matrix_rank(hankel(s, m).matrix(), mode)?.rank;
        if cat != ranks[m - 1] {
            return Err(Error::Numerical(format!("rank ρ^({m}) = {} but rank C_{m} = {cat}", ranks[m - 1])));
        }
    }
    Ok(RdmProfile { ranks, unstable })
}

/// Least `j` with `rank ρ^{(j)} < j + 1` (natural rank mode).
pub fn interaction_length<F: Field>(s: &SymState<F>) -> Result<usize> {
    interaction_length_with(s, RankMode::natural::<F>()).map(|(j, _)| j)
}

/// As [`interaction_length`], with an explicit rank mode and an
/// instability flag. `j = N` always qualifies (`ρ^{(N)}` is pure).
pub fn interaction_length_with<F: Field>(s: &SymState<F>, mode: RankMode) -> Result<(usize, bool)> {
    s.require_qubits("interaction length")?;
    let n = s.parties();
    let mut unstable = false;
    for j in 1..=n {
        let (r, u) = rdm_rank(s, j, mode)?;
        unstable |= u;
        if r < j + 1 {
            return Ok((j, unstable));
        }
    }
    unreachable!("ρ^(N) has rank one")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianOptions {
    pub rank_mode: RankMode,
    /// Largest full-space dimension `2^N` accepted.
    pub cap: usize,
}

impl HamiltonianOptions {
    pub fn natural<F: Field>() -> Self {
        Self { rank_mode: RankMode::natural::<F>(), cap: FULL_TENSOR_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verification {
    /// `‖Hψ‖`.
    pub residual: f64,
    /// `‖Hψ‖ / (‖H‖ ‖ψ‖)`.
    pub relative_residual: f64,
    /// `‖H‖`: largest eigenvalue when dense, else the bound `N − j + 1`.
    pub h_norm: f64,
    /// Smallest eigenvalue; above the dense limit this is the lower bound
    /// `(N − j + 1) · λ_min(P_j)`.
    pub min_eigenvalue: f64,
    /// Number of eigenvalues within `1e-8 ‖H‖` of zero (dense only).
    pub ground_dimension: Option<usize>,
    /// `"dense"` or `"bound"`.
    pub spectrum: &'static str,
    pub projector_idempotence: f64,
    pub projector_hermiticity: f64,
    pub passed: bool,
}

/// `H = Σ_{i=1}^{N-j+1} 1^{⊗(i-1)} ⊗ P_j ⊗ 1^{⊗(N-i-j+1)}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParentHamiltonian {
    pub n: usize,
    pub j: usize,
    /// Orthogonal projector on `(C²)^{⊗j}` onto the symmetric kernel of
    /// `ρ^{(j)}`, row-major.
    pub projector: Vec<Vec<Complex64>>,
    pub kernel_dimension: usize,
    /// One-based first party of each term.
    pub terms: Vec<usize>,
    pub verification: Verification,
}

/// Entry `(row, col, value)` of the full `2^N × 2^N` operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Triplet {
    pub row: usize,
    pub col: usize,
    pub value: Complex64,
}

impl ParentHamiltonian {
    fn projector_matrix(&self) -> DMatrix<Complex64> {
        let d = self.projector.len();
        DMatrix::from_fn(d, d, |r, c| self.projector[r][c])
    }

    /// Nonzero entries of `H`, sorted by `(row, col)`. Only for `N ≤ 14`.
    pub fn sparse_triplets(&self) -> Result<Vec<Triplet>> {
        if self.n > 14 {
            return Err(Error::Resource("sparse export is limited to N ≤ 14".into()));
        }
        let p = self.projector_matrix();
        let mut acc: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        let (n, j) = (self.n, self.j);
        let dj = 1usize << j;
        for &pos in &self.terms {
            let shift = n - (pos - 1) - j;
            let low = 1usize << shift;
            for hi in 0..1usize << (pos - 1) {
                for lo in 0..low {
                    for a in 0..dj {
                        for b in 0..dj {
                            let v = p[(a, b)];
                            if v.norm() == 0.0 {
                                continue;
                            }
                            let row = (hi << (shift + j)) | (a << shift) | lo;
                            let col = (hi << (shift + j)) | (b << shift) | lo;
                            *acc.entry((row, col)).or_default() += v;
                        }
                    }
                }
            }
        }
        Ok(acc
            .into_iter()
            .filter(|(_, v)| v.norm() > 1e-15)
            .map(|((row, col), value)| Triplet { row, col, value })
            .collect())
    }
}

/// Kernel of `ρ^{(j)}` embedded in `(C²)^{⊗j}`: the vector for the apolar
/// form `g` puts `conj(g_r) / C(j, r)` on every bitstring of weight `r`.
fn kernel_vectors<F: Field>(s: &SymState<F>, j: usize, mode: RankMode) -> Result<(Vec<Vec<Complex64>>, bool)> {
    let c = hankel(s, j);
    let (forms, unstable): (Vec<Vec<Complex64>>, bool) = match mode {
        RankMode::Exact => {
            if F::MODE != Mode::Exact {
                return Err(Error::Mode("exact kernel of float data".into()));
            }
            let m: Mat<GaussianRational> = same_type(c.into_matrix());
            (exact_kernel(&m).into_iter().map(|v| v.iter().map(Field::to_c64).collect()).collect(), false)
        }
        RankMode::Float { tol } => float_kernel(&c.matrix().to_c64(), tol),
    };
    let embedded = forms
        .into_iter()
        .map(|g| {
            (0..1usize << j)
                .map(|b| {
                    let r = (b as u64).count_ones() as usize;
                    g[r].conj() / binomial(j, r) as f64
                })
                .collect()
        })
        .collect();
    Ok((embedded, unstable))
}

/// Apply `Σ_i h_i` to a full-space vector.
fn apply_h(p: &DMatrix<Complex64>, n: usize, j: usize, psi: &[Complex64]) -> Vec<Complex64> {
    let dj = 1usize << j;
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for pos in 1..=n - j + 1 {
        let shift = n - (pos - 1) - j;
        let mask = (dj - 1) << shift;
        for (x, o) in out.iter_mut().enumerate() {
            let a = (x & mask) >> shift;
            let rest = x & !mask;
            for b in 0..dj {
                *o += p[(a, b)] * psi[rest | (b << shift)];
            }
        }
    }
    out
}

fn dense_h(p: &DMatrix<Complex64>, n: usize, j: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n;
    let mut h = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut e = vec![Complex64::new(0.0, 0.0); dim];
        e[col] = Complex64::new(1.0, 0.0);
        for (row, v) in apply_h(p, n, j, &e).into_iter().enumerate() {
            h[(row, col)] = v;
        }
    }
    h
}

/// Parent Hamiltonian with interaction length `j` (natural rank mode).
pub fn parent_hamiltonian<F: Field>(s: &SymState<F>, j: usize) -> Result<ParentHamiltonian> {
    parent_hamiltonian_with(s, j, HamiltonianOptions::natural::<F>())
}

pub fn parent_hamiltonian_with<F: Field>(s: &SymState<F>, j: usize, opts: HamiltonianOptions) -> Result<ParentHamiltonian> {
    s.require_qubits("parent Hamiltonian")?;
    let n = s.parties();
    if j < 1 || j > n {
        return arg(format!("interaction length j = {j} outside 1..={n}"));
    }
    let psi = to_full_tensor_capped(s, opts.cap)?;
    let (vecs, _) = kernel_vectors(s, j, opts.rank_mode)?;
    if vecs.is_empty() {
        return Err(Error::Domain(format!("ρ^({j}) has full rank {} on the symmetric space; no kernel", j + 1)));
    }
    let dj = 1usize << j;
    let basis = DMatrix::from_fn(dj, vecs.len(), |r, c| vecs[c][r]);
    let q = basis.col_piv_qr().q();
    let q = q.columns(0, vecs.len()).into_owned();
    let p = &q * q.adjoint();
    let idem = (&p * &p - &p).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let herm = crate::linalg::hermitian_defect(&p);

    let psi: Vec<Complex64> = psi.iter().map(Field::to_c64).collect();
    let psi_norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let hpsi = apply_h(&p, n, j, &psi);
    let residual = hpsi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let terms: Vec<usize> = (1..=n - j + 1).collect();

    let (h_norm, min_eigenvalue, ground_dimension, spectrum) = if n <= DENSE_SPECTRUM_MAX_PARTIES {
        let (vals, _) = hermitian_eigen(&dense_h(&p, n, j));
        let top = vals.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
        let ground = vals.iter().filter(|v| v.abs() <= GROUND_GAP * top).count();
        (top, vals[0], Some(ground), "dense")
    } else {
        let pmin = hermitian_eigen(&p).0[0];
        (terms.len() as f64, terms.len() as f64 * pmin.min(0.0), None, "bound")
    };
    let relative_residual = residual / (h_norm * psi_norm);
    let passed = relative_residual <= VERIFY_TOL && min_eigenvalue >= -VERIFY_TOL && idem <= 1e-12 && herm <= 1e-12;
    Ok(ParentHamiltonian {
        n,
        j,
        projector: (0..dj).map(|r| (0..dj).map(|c| p[(r, c)]).collect()).collect(),
        kernel_dimension: vecs.len(),
        terms,
        verification: Verification {
            residual,
            relative_residual,
            h_norm,
            min_eigenvalue,
            ground_dimension,
            spectrum,
            projector_idempotence: idem,
            projector_hermiticity: herm,
            passed,
        },
    })
}

/// Result of [`minimality_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalityReport {
    pub n: usize,
    pub interaction_length: usize,
    /// `⌊N/2⌋ + 1`.
    pub generic_bound: usize,
    /// Every `j` below the interaction length was rejected for lack of kernel.
    pub below_rejected: bool,
    /// Construction at the interaction length verified.
    pub construction_verified: bool,
    pub hamiltonian: ParentHamiltonian,
}

impl MinimalityReport {
    pub fn confirmed(&self) -> bool {
        self.below_rejected && self.construction_verified
    }
}

pub fn minimality_check<F: Field>(s: &SymState<F>) -> Result<MinimalityReport> {
    minimality_check_with(s, HamiltonianOptions::natural::<F>())
}

pub fn minimality_check_with<F: Field>(s: &SymState<F>, opts: HamiltonianOptions) -> Result<MinimalityReport> {
    let (len, _) = interaction_length_with(s, opts.rank_mode)?;
    let mut below_rejected = true;
    for j in 1..len {
        match parent_hamiltonian_with(s, j, opts) {
            Err(Error::Domain(_)) => {}
            Err(e) => return Err(e),
            Ok(_) => below_rejected = false,
        }
    }
    let hamiltonian = parent_hamiltonian_with(s, len, opts)?;
    Ok(MinimalityReport {
        n: s.parties(),
        interaction_length: len,
        generic_bound: s.parties() / 2 + 1,
        below_rejected,
        construction_verified: hamiltonian.verification.passed,
        hamiltonian,
    })
}
