//! Symmetric states in the induced basis.
//!
//! Coefficients of a state on `N` parties of local dimension `d` are stored
//! in the canonical order of multi-indices `[n_0, …, n_{d-1}]`, descending
//! lexicographically: `[N,0,…]`, `[N-1,1,0,…]`, `[N-1,0,1,…]`, …, `[0,…,N]`.
//! For qubits this is `c_0 … c_N` with `c_k` multiplying `|[N-k, k]⟩`.
//!
//! Basis convention: `|0⟩ = e_0 = (1, 0)ᵀ` everywhere.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{arg, Error, Result};
use crate::scalar::{binomial, Field, GaussianRational};

/// Largest full tensor-space dimension materialized by default.
pub const FULL_TENSOR_CAP: usize = 1 << 14;

/// Occupation numbers `[n_0, …, n_{d-1}]` of an induced basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn parties(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn local_dim(&self) -> usize {
        self.0.len()
    }

    /// `N! / (n_0! ⋯ n_{d-1}!)`: the number of basis strings in the class,
    /// equal to the squared norm of the induced basis vector.
    pub fn multiplicity(&self) -> u128 {
        let mut remaining = self.parties();
        let mut acc = 1u128;
        for &k in &self.0 {
            acc *= binomial(remaining, k);
            remaining -= k;
        }
        acc
    }
}

/// All multi-indices of `n` parties over `d` levels in canonical order.
pub fn multi_indices(n: usize, d: usize) -> Vec<MultiIndex> {
    fn rec(level: usize, d: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if level == d - 1 {
            cur.push(left);
            out.push(MultiIndex(cur.clone()));
            cur.pop();
            return;
        }
        for k in (0..=left).rev() {
            cur.push(k);
            rec(level + 1, d, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, n, &mut Vec::with_capacity(d), &mut out);
    out
}

/// Dimension of the symmetric subspace, `C(N+d-1, N)`.
pub fn induced_dim(n: usize, d: usize) -> Result<usize> {
    if n < 1 || d < 2 {
        return arg(format!("induced_dim needs N ≥ 1 and d ≥ 2, got N={n}, d={d}"));
    }
    usize::try_from(binomial(n + d - 1, n)).map_err(|_| Error::Resource("symmetric dimension overflows".into()))
}

/// Factor `(N!/∏n_j!)^{-1/2}` turning `|[n…]⟩` into the normalized Dicke state.
pub fn dicke_normalizer(idx: &MultiIndex) -> f64 {
    (idx.multiplicity() as f64).sqrt().recip()
}

/// Single-party vector `Σ x_j e_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalVector<F>(pub Vec<F>);

impl<F: Field> LocalVector<F> {
    pub fn new(components: Vec<F>) -> Result<Self> {
        if components.len() < 2 {
            return arg("local vectors need at least two components");
        }
        if components.iter().all(Field::is_zero) {
            return arg("local vector is zero");
        }
        Ok(Self(components))
    }

    pub fn qubit(x0: F, x1: F) -> Result<Self> {
        Self::new(vec![x0, x1])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn to_c64(&self) -> LocalVector<Complex64> {
        LocalVector(self.0.iter().map(Field::to_c64).collect())
    }

    /// Projective equality on `P^{d-1}`: exact for exact fields, chordal
    /// distance below `tol` otherwise.
    pub fn projectively_equal(&self, other: &Self, tol: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        match F::MODE {
            crate::scalar::Mode::Exact => {
                for i in 0..self.dim() {
                    for j in i + 1..self.dim() {
                        let minor = self.0[i].clone() * other.0[j].clone() - self.0[j].clone() * other.0[i].clone();
                        if !minor.is_zero() {
                            return false;
                        }
                    }
                }
                true
            }
            crate::scalar::Mode::Float => local_chordal(&self.to_c64().0, &other.to_c64().0) < tol,
        }
    }
}

/// Chordal distance between two points of `P^{d-1}` (sine of the angle).
pub fn local_chordal(a: &[Complex64], b: &[Complex64]) -> f64 {
    chordal_weighted(a, b, |_| 1.0)
}

fn chordal_weighted(a: &[Complex64], b: &[Complex64], weight: impl Fn(usize) -> f64) -> f64 {
    let na: f64 = a.iter().enumerate().map(|(i, z)| weight(i) * z.norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().enumerate().map(|(i, z)| weight(i) * z.norm_sqr()).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    let overlap: Complex64 =
        a.iter().zip(b).enumerate().map(|(i, (x, y))| x.conj() * y * weight(i)).sum::<Complex64>() / (na * nb);
    // component of b̂ orthogonal to â
    let resid: f64 = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (x, y))| (y / nb - overlap * x / na).norm_sqr() * weight(i))
        .sum::<f64>()
        .sqrt();
    resid.min(1.0)
}

/// A vector of the symmetric subspace, with projective semantics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymState<F> {
    n: usize,
    d: usize,
    coeffs: Vec<F>,
}

impl<F: Field> SymState<F> {
    pub fn new(n: usize, d: usize, coeffs: Vec<F>) -> Result<Self> {
        let dim = induced_dim(n, d)?;
        if coeffs.len() != dim {
            return arg(format!("expected {dim} coefficients for N={n}, d={d}, got {}", coeffs.len()));
        }
        if coeffs.iter().all(Field::is_zero) {
            return arg("state has no nonzero coefficient");
        }
        Ok(Self { n, d, coeffs })
    }

    /// Qubit state `[c_0 : … : c_N]`.
    pub fn qubits(coeffs: Vec<F>) -> Result<Self> {
        if coeffs.len() < 2 {
            return arg("a qubit state needs at least two coefficients");
        }
        Self::new(coeffs.len() - 1, 2, coeffs)
    }

    pub fn parties(&self) -> usize {
        self.n
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &F {
        &self.coeffs[k]
    }

    pub fn indices(&self) -> Vec<MultiIndex> {
        multi_indices(self.n, self.d)
    }

    pub(crate) fn require_qubits(&self, what: &str) -> Result<()> {
        if self.d != 2 {
            return arg(format!("{what} is defined for qubits only (d = 2), got d = {}", self.d));
        }
        Ok(())
    }

    pub fn scale(&self, s: &F) -> Result<Self> {
        Self::new(self.n, self.d, self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn to_c64(&self) -> SymState<Complex64> {
        SymState { n: self.n, d: self.d, coeffs: self.coeffs.iter().map(Field::to_c64).collect() }
    }

    /// Squared norm of the vector `Σ c_I |[I]⟩`.
    pub fn norm_sqr(&self) -> f64 {
        self.indices().iter().zip(&self.coeffs).map(|(i, c)| c.abs_sq() * i.multiplicity() as f64).sum()
    }

    /// Inner product `⟨self|other⟩` in the full tensor space.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.indices()
            .iter()
            .zip(self.coeffs.iter().zip(&other.coeffs))
            .map(|(i, (a, b))| a.to_c64().conj() * b.to_c64() * i.multiplicity() as f64)
            .sum()
    }

    /// Unit-norm floating representative.
    pub fn normalized(&self) -> SymState<Complex64> {
        let nrm = self.norm_sqr().sqrt();
        SymState { n: self.n, d: self.d, coeffs: self.coeffs.iter().map(|c| c.to_c64() / nrm).collect() }
    }

    /// Coefficients in the orthonormal Dicke basis.
    pub fn dicke_coeffs(&self) -> Vec<Complex64> {
        self.indices().iter().zip(&self.coeffs).map(|(i, c)| c.to_c64() * (i.multiplicity() as f64).sqrt()).collect()
    }
}

/// Separable state `x^{⊗N}`: coefficient `∏ x_j^{n_j}` at `[n_0, …]`.
pub fn veronese_map<F: Field>(x: &LocalVector<F>, n: usize) -> Result<SymState<F>> {
    if x.0.iter().all(Field::is_zero) {
        return arg("Veronese map of the zero vector");
    }
    let coeffs = multi_indices(n, x.dim())
        .iter()
        .map(|idx| idx.0.iter().zip(&x.0).fold(F::one(), |acc, (&e, xj)| acc * xj.powi(e)))
        .collect();
    SymState::new(n, x.dim(), coeffs)
}

/// Quadratic-relation separability test `z_I z_J = z_K z_L` whenever
/// `I + J = K + L`. Exact states ignore `tol`.
pub fn is_separable<F: Field>(s: &SymState<F>, tol: f64) -> bool {
    let idx = s.indices();
    let scale = s.coeffs.iter().map(Field::abs_sq).fold(0.0, f64::max);
    let mut first: HashMap<Vec<usize>, F> = HashMap::new();
    for a in 0..idx.len() {
        for b in a..idx.len() {
            let key: Vec<usize> = idx[a].0.iter().zip(&idx[b].0).map(|(x, y)| x + y).collect();
            let prod = s.coeffs[a].clone() * s.coeffs[b].clone();
            match first.get(&key) {
                None => {
                    first.insert(key, prod);
                }
                Some(p) => {
                    let diff = p.clone() - prod;
                    let ok = match F::MODE {
                        crate::scalar::Mode::Exact => diff.is_zero(),
                        crate::scalar::Mode::Float => diff.to_c64().norm() <= tol * scale,
                    };
                    if !ok {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// One term `λ · v^{⊗N}` of a symmetric decomposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term<F> {
    pub weight: F,
    pub vector: LocalVector<F>,
}

/// Explicit Waring decomposition `Σ_r λ_r v_r^{⊗N}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecomposedState<F> {
    n: usize,
    terms: Vec<Term<F>>,
}

/// Chordal threshold below which float local vectors count as coincident.
pub const COINCIDENT_TOL: f64 = 1e-12;

impl<F: Field> DecomposedState<F> {
    pub fn new(n: usize, terms: Vec<Term<F>>) -> Result<Self> {
        if n < 1 {
            return arg("decomposition needs N ≥ 1");
        }
        if terms.is_empty() {
            return arg("decomposition has no terms");
        }
        let d = terms[0].vector.dim();
        for (i, t) in terms.iter().enumerate() {
            if t.weight.is_zero() {
                return arg(format!("term {i} has zero weight"));
            }
            if t.vector.dim() != d {
                return arg("terms mix local dimensions");
            }
            for u in &terms[..i] {
                if u.vector.projectively_equal(&t.vector, COINCIDENT_TOL) {
                    return arg(format!("term {i} repeats an earlier point"));
                }
            }
        }
        Ok(Self { n, terms })
    }

    pub fn parties(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term<F>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn local_dim(&self) -> usize {
        self.terms[0].vector.dim()
    }

    pub(crate) fn with_parties(&self, n: usize) -> Self {
        Self { n, terms: self.terms.clone() }
    }
}

/// `Σ_r λ_r ν_N(v_r)`, coefficient-wise.
pub fn expand_decomposition<F: Field>(dec: &DecomposedState<F>) -> Result<SymState<F>> {
    let n = dec.parties();
    let dim = induced_dim(n, dec.local_dim())?;
    let mut acc = vec![F::zero(); dim];
    for t in dec.terms() {
        let v = veronese_map(&t.vector, n)?;
        for (a, c) in acc.iter_mut().zip(v.coeffs()) {
            *a = a.clone() + t.weight.clone() * c.clone();
        }
    }
    if acc.iter().all(Field::is_zero) {
        return Err(Error::Domain("decomposition cancels to the zero vector".into()));
    }
    SymState::new(n, dec.local_dim(), acc)
}

/// Named standard states.
#[derive(Debug, Clone, PartialEq)]
pub enum StandardState<F> {
    Ghz,
    W,
    /// `X_N = [0 : 1 : 0 : … : 0 : w]`.
    X { w: F },
    Dicke(MultiIndex),
}

/// Induced-basis representative of a named state. GHZ and W are returned
/// with unit coefficients (`[1:0:…:0:1]`, `[0:1:0:…:0]`); Dicke states as
/// the bare induced basis vector.
pub fn standard_state<F: Field>(kind: &StandardState<F>, n: usize) -> Result<SymState<F>> {
    if n < 2 {
        return arg("standard states need N ≥ 2");
    }
    let mut c = vec![F::zero(); n + 1];
    match kind {
        StandardState::Ghz => {
            c[0] = F::one();
            c[n] = F::one();
        }
        StandardState::W => c[1] = F::one(),
        StandardState::X { w } => {
            if n < 4 {
                return arg("X_N is defined for N ≥ 4");
            }
            c[1] = F::one();
            c[n] = w.clone();
        }
        StandardState::Dicke(idx) => {
            if idx.parties() != n {
                return arg(format!("Dicke index {:?} does not sum to N = {n}", idx.0));
            }
            let idxs = multi_indices(n, idx.local_dim());
            let pos = idxs.iter().position(|i| i == idx).expect("index enumerated");
            let mut coeffs = vec![F::zero(); idxs.len()];
            coeffs[pos] = F::one();
            return SymState::new(n, idx.local_dim(), coeffs);
        }
    }
    SymState::new(n, 2, c)
}

/// `w` parameter of `X_N(z) = (N-1)(|1⟩^{⊗N} + z^{N-1}√N|W_N⟩)`, i.e.
/// `X_N(z) ≅ [0 : 1 : 0 : … : 0 : z^{-(N-1)}]`.
pub fn x_parameter_from_z<F: Field>(z: &F, n: usize) -> Result<F> {
    if z.is_zero() {
        return arg("X_N(z) needs z ≠ 0");
    }
    Ok(F::one() / z.powi(n - 1))
}

pub fn ghz<F: Field>(n: usize) -> SymState<F> {
    standard_state(&StandardState::Ghz, n).expect("N ≥ 2")
}

pub fn w_state<F: Field>(n: usize) -> SymState<F> {
    standard_state(&StandardState::W, n).expect("N ≥ 2")
}

pub fn x_state(n: usize, w: GaussianRational) -> Result<SymState<GaussianRational>> {
    standard_state(&StandardState::X { w }, n)
}

/// Embed into the full `d^N` tensor space (first party most significant).
pub fn to_full_tensor<F: Field>(s: &SymState<F>) -> Result<Vec<F>> {
    to_full_tensor_capped(s, FULL_TENSOR_CAP)
}

pub fn to_full_tensor_capped<F: Field>(s: &SymState<F>, cap: usize) -> Result<Vec<F>> {
    let total = full_dim(s.parties(), s.local_dim(), cap)?;
    let idxs = s.indices();
    let lookup: HashMap<&[usize], usize> = idxs.iter().enumerate().map(|(k, i)| (i.0.as_slice(), k)).collect();
    let mut counts = vec![0usize; s.local_dim()];
    Ok((0..total)
        .map(|x| {
            occupation(x, s.parties(), s.local_dim(), &mut counts);
            s.coeffs[lookup[counts.as_slice()]].clone()
        })
        .collect())
}

/// Project a full tensor vector onto the induced basis:
/// `c_I = ⟨[I]|v⟩ / ⟨[I]|[I]⟩`.
pub fn from_full_tensor<F: Field>(v: &[F], n: usize, d: usize) -> Result<SymState<F>> {
    let total = full_dim(n, d, usize::MAX)?;
    if v.len() != total {
        return arg(format!("expected a vector of length {total}"));
    }
    let idxs = multi_indices(n, d);
    let lookup: HashMap<Vec<usize>, usize> = idxs.iter().enumerate().map(|(k, i)| (i.0.clone(), k)).collect();
    let mut sums = vec![F::zero(); idxs.len()];
    let mut counts = vec![0usize; d];
    for (x, val) in v.iter().enumerate() {
        occupation(x, n, d, &mut counts);
        let k = lookup[&counts];
        sums[k] = sums[k].clone() + val.clone();
    }
    let coeffs = sums.into_iter().zip(&idxs).map(|(s, i)| s / F::from_u128(i.multiplicity())).collect();
    SymState::new(n, d, coeffs)
}

fn full_dim(n: usize, d: usize, cap: usize) -> Result<usize> {
    let total = (d as u128).checked_pow(n as u32).filter(|&t| t <= cap as u128);
    match total {
        Some(t) => Ok(t as usize),
        None => Err(Error::Resource(format!("full tensor space {d}^{n} exceeds the cap of {cap}"))),
    }
}

fn occupation(mut x: usize, n: usize, d: usize, counts: &mut [usize]) {
    counts.iter_mut().for_each(|c| *c = 0);
    for _ in 0..n {
        counts[x % d] += 1;
        x /= d;
    }
}

/// True iff `a = μ b` for a nonzero `μ`. Exact states compare exactly;
/// float states compare the sine of the angle between them against `tol`.
pub fn projective_equal<F: Field>(a: &SymState<F>, b: &SymState<F>, tol: f64) -> Result<bool> {
    if a.parties() != b.parties() || a.local_dim() != b.local_dim() {
        return arg("projective comparison of states on different spaces");
    }
    Ok(match F::MODE {
        crate::scalar::Mode::Exact => {
            let pivot = b.coeffs.iter().position(|c| !c.is_zero()).expect("nonzero state");
            if a.coeffs[pivot].is_zero() {
                return Ok(false);
            }
            let mu = a.coeffs[pivot].clone() / b.coeffs[pivot].clone();
            a.coeffs.iter().zip(&b.coeffs).all(|(x, y)| *x == mu.clone() * y.clone())
        }
        crate::scalar::Mode::Float => chordal_distance(a, b)? < tol,
    })
}

/// Chordal (Fubini–Study) distance `sin θ` between the projective points,
/// with inner product of the full tensor space.
pub fn chordal_distance<F: Field>(a: &SymState<F>, b: &SymState<F>) -> Result<f64> {
    if a.parties() != b.parties() || a.local_dim() != b.local_dim() {
        return arg("distance between states on different spaces");
    }
    let w: Vec<f64> = a.indices().iter().map(|i| i.multiplicity() as f64).collect();
    let ac: Vec<Complex64> = a.coeffs.iter().map(Field::to_c64).collect();
    let bc: Vec<Complex64> = b.coeffs.iter().map(Field::to_c64).collect();
    Ok(chordal_weighted(&ac, &bc, |i| w[i]))
}

/// Fidelity `|⟨a|b⟩|² / (‖a‖²‖b‖²)`.
pub fn fidelity<F: Field>(a: &SymState<F>, b: &SymState<F>) -> f64 {
    a.inner(b).norm_sqr() / (a.norm_sqr() * b.norm_sqr())
}
