//! Local invertible operations `A^{⊗N}` on symmetric states, their
//! two-outcome stochastic implementation, and the asymptotic GHZ₃ → W₃
//! conversion.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{arg, Error, Result};
use crate::exec::{map_slice, Execution};
use crate::linalg::Mat;
use crate::scalar::{binomial, Field, Mode};
use crate::states::{chordal_distance, fidelity, ghz, w_state, SymState};

/// An invertible single-party operator (`d × d`).
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator<F> {
    matrix: Mat<F>,
}

impl<F: Field> LocalOperator<F> {
    /// Qubit operator `[[a00, a01], [a10, a11]]` acting on column vectors.
    pub fn new(a00: F, a01: F, a10: F, a11: F) -> Result<Self> {
        Self::from_matrix(Mat::from_rows(vec![vec![a00, a01], vec![a10, a11]]))
    }

    pub fn from_matrix(matrix: Mat<F>) -> Result<Self> {
        if matrix.rows() != matrix.cols() || matrix.rows() < 2 {
            return arg("local operators are square with d ≥ 2");
        }
        if matrix.rows() == 2 && !is_invertible(&matrix) {
            return arg("local operator is singular");
        }
        Ok(Self { matrix })
    }

    pub fn identity() -> Self {
        Self { matrix: Mat::identity(2) }
    }

    pub fn matrix(&self) -> &Mat<F> {
        &self.matrix
    }

    pub fn entry(&self, r: usize, c: usize) -> &F {
        &self.matrix[(r, c)]
    }

    pub fn det(&self) -> F {
        let m = &self.matrix;
        m[(0, 0)].clone() * m[(1, 1)].clone() - m[(0, 1)].clone() * m[(1, 0)].clone()
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        Self { matrix: self.matrix.mul_mat(&rhs.matrix) }
    }

    pub fn to_c64(&self) -> LocalOperator<Complex64> {
        LocalOperator { matrix: Mat::from_fn(2, 2, |r, c| self.matrix[(r, c)].to_c64()) }
    }

    fn require_qubit(&self) -> Result<()> {
        if self.matrix.rows() != 2 {
            return arg("operation is defined for qubit operators only");
        }
        Ok(())
    }
}

fn is_invertible<F: Field>(m: &Mat<F>) -> bool {
    let det = m[(0, 0)].clone() * m[(1, 1)].clone() - m[(0, 1)].clone() * m[(1, 0)].clone();
    match F::MODE {
        Mode::Exact => !det.is_zero(),
        Mode::Float => {
            let norm_sq: f64 = (0..2).flat_map(|r| (0..2).map(move |c| (r, c))).map(|(r, c)| m[(r, c)].abs_sq()).sum();
            det.to_c64().norm() > 1e-12 * norm_sq
        }
    }
}

/// Matrix of `A^{⊗N}` on induced-basis coefficients: `(M c)_l` is the
/// coefficient of `|[N-l, l]⟩` in `A^{⊗N} Σ_k c_k |[N-k, k]⟩`.
///
/// Entry `M_{l,k}` is the coefficient of `x_0^{N-k} x_1^k` in
/// `(A00 x0 + A01 x1)^{N-l} (A10 x0 + A11 x1)^l`.
pub fn sym_power_operator<F: Field>(a: &LocalOperator<F>, n: usize) -> Result<Mat<F>> {
    a.require_qubit()?;
    let (a00, a01, a10, a11) = (a.entry(0, 0), a.entry(0, 1), a.entry(1, 0), a.entry(1, 1));
    let pow = |x: &F, e: usize| x.powi(e);
    Ok(Mat::from_fn(n + 1, n + 1, |l, k| {
        let mut acc = F::zero();
        // s = power of x1 taken from the first factor
        for s in 0..=k.min(n - l) {
            let t = k - s;
            if t > l {
                continue;
            }
            let coeff = F::from_u128(binomial(n - l, s) * binomial(l, t));
            acc = acc + coeff * pow(a01, s) * pow(a00, n - l - s) * pow(a11, t) * pow(a10, l - t);
        }
        acc
    }))
}

/// `A^{⊗N} s` for invertible `A`.
pub fn slocc_apply<F: Field>(s: &SymState<F>, a: &LocalOperator<F>) -> Result<SymState<F>> {
    s.require_qubits("SLOCC action")?;
    if !is_invertible(a.matrix()) {
        return arg("SLOCC operators must be invertible; singular limits go through asymptotic_sweep");
    }
    let m = sym_power_operator(a, s.parties())?;
    SymState::new(s.parties(), 2, m.mul_vec(s.coeffs()))
}

/// Two-outcome measurement `{E, Ē}` with `E†E + Ē†Ē = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementPair {
    pub e: [[Complex64; 2]; 2],
    pub e_bar: [[Complex64; 2]; 2],
    /// Eigen-decomposition of `E†E`: eigenvalues (descending) and the
    /// unitary whose columns are the eigenvectors.
    pub spectrum: [f64; 2],
    pub eigenvectors: [[Complex64; 2]; 2],
}

impl MeasurementPair {
    /// `‖E†E + Ē†Ē − 1‖_max`.
    pub fn completeness_defect(&self) -> f64 {
        let ede = gram(&self.e);
        let bdb = gram(&self.e_bar);
        let mut worst = 0.0_f64;
        for r in 0..2 {
            for c in 0..2 {
                let id = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((ede[r][c] + bdb[r][c] - id).norm());
            }
        }
        worst
    }
}

fn gram(m: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = (0..2).map(|k| m[k][r].conj() * m[k][c]).sum();
        }
    }
    out
}

/// Eigen-decomposition of the Hermitian `A†A` in closed form. The smaller
/// eigenvalue is `|det A|² / λ_max`, which avoids cancellation.
fn gram_eigen(a: &[[Complex64; 2]; 2]) -> ([f64; 2], [[Complex64; 2]; 2]) {
    let g = gram(a);
    let (p, d, b) = (g[0][0].re, g[1][1].re, g[0][1]);
    let half_gap = 0.5 * (p - d);
    let lmax = 0.5 * (p + d) + (half_gap * half_gap + b.norm_sqr()).sqrt();
    let det_a = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let lmin = if lmax > 0.0 { det_a.norm_sqr() / lmax } else { 0.0 };
    let v = if b.norm() == 0.0 {
        if p >= d {
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
        } else {
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
        }
    } else {
        let c1 = [b, Complex64::new(lmax - p, 0.0)];
        let c2 = [Complex64::new(lmax - d, 0.0), b.conj()];
        let n1 = c1[0].norm_sqr() + c1[1].norm_sqr();
        let n2 = c2[0].norm_sqr() + c2[1].norm_sqr();
        let (c, nn) = if n1 >= n2 { (c1, n1) } else { (c2, n2) };
        let nn = nn.sqrt();
        [c[0] / nn, c[1] / nn]
    };
    let u = [[v[0], -v[1].conj()], [v[1], v[0].conj()]];
    ([lmax, lmin], u)
}

fn to_array<F: Field>(a: &LocalOperator<F>) -> [[Complex64; 2]; 2] {
    [[a.entry(0, 0).to_c64(), a.entry(0, 1).to_c64()], [a.entry(1, 0).to_c64(), a.entry(1, 1).to_c64()]]
}

/// `E = A/√‖A†A‖`, `Ē = √(1 − E†E)`.
pub fn povm_from_operator<F: Field>(a: &LocalOperator<F>) -> Result<MeasurementPair> {
    a.require_qubit()?;
    let arr = to_array(a);
    let ([lmax, lmin], u) = gram_eigen(&arr);
    if lmax == 0.0 {
        return Err(Error::Argument("zero operator has no measurement".into()));
    }
    let scale = lmax.sqrt().recip();
    let e = arr.map(|row| row.map(|z| z * scale));
    let spectrum = [1.0, lmin / lmax];
    // Ē = U diag(√(1−d_i)) U†
    let roots = spectrum.map(|d| (1.0 - d).max(0.0).sqrt());
    let mut e_bar = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            e_bar[r][c] = (0..2).map(|k| u[r][k] * roots[k] * u[c][k].conj()).sum();
        }
    }
    Ok(MeasurementPair { e, e_bar, spectrum, eigenvectors: u })
}

/// Probability `⟨ψ|(E†E)^{⊗N}|ψ⟩ / ⟨ψ|ψ⟩` that every party obtains the
/// outcome implementing `A`.
pub fn success_probability<F: Field>(s: &SymState<F>, a: &LocalOperator<F>) -> Result<f64> {
    s.require_qubits("success probability")?;
    let pair = povm_from_operator(a)?;
    let n = s.parties();
    let u = pair.eigenvectors;
    let u_dag = LocalOperator {
        matrix: Mat::from_fn(2, 2, |r, c| u[c][r].conj()),
    };
    let rotated = sym_power_operator(&u_dag, n)?.mul_vec(&s.to_c64().coeffs().to_vec());
    let [d0, d1] = pair.spectrum;
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..=n {
        let w = binomial(n, k) as f64;
        num += rotated[k].norm_sqr() * w * d0.powi((n - k) as i32) * d1.powi(k as i32);
        den += s.coeff(k).abs_sq() * w;
    }
    Ok((num / den).clamp(0.0, 1.0))
}

/// Operator `[[1, 1/3], [0, λ]]` taking `W₃` to the tangent point
/// `[1 : λ : 0 : 0]`. In the swapped basis `|0⟩ = (0,1)ᵀ` it reads
/// `[[λ, 0], [1/3, 1]]`.
pub fn w3_to_tangent_operator<F: Field>(lambda: F) -> Result<LocalOperator<F>> {
    if lambda.is_zero() {
        return arg("λ = 0 gives a singular operator");
    }
    LocalOperator::new(F::one(), F::one() / F::from_i64(3), F::zero(), lambda)
}

/// The operator `A_ε` carrying GHZ₃ to W₃ as `ε → 0`, in the internal
/// convention `|0⟩ = (1,0)ᵀ`. The common form `ε^{-1/3}[[0, ε], [-1, 1]]`
/// uses `|0⟩ = (0,1)ᵀ`; conjugating by the swap gives
/// `ε^{-1/3}[[1, -1], [ε, 0]]`.
pub fn ghz_to_w_operator(eps: f64) -> Result<LocalOperator<Complex64>> {
    let raw = ghz_to_w_operator_swapped_basis(eps)?;
    let m = raw.matrix();
    let swapped = Mat::from_fn(2, 2, |r, c| m[(1 - r, 1 - c)]);
    LocalOperator::from_matrix(swapped)
}

/// `A_ε` in the swapped basis `|0⟩ = (0,1)ᵀ`.
pub fn ghz_to_w_operator_swapped_basis(eps: f64) -> Result<LocalOperator<Complex64>> {
    if !(eps > 0.0) || !eps.is_finite() {
        return arg(format!("ε must be positive, got {eps}"));
    }
    let s = eps.powf(-1.0 / 3.0);
    let c = |x: f64| Complex64::new(x * s, 0.0);
    LocalOperator::new(c(0.0), c(eps), c(-1.0), c(1.0))
}

/// Closed-form success probability of `A_ε^{⊗3}` on GHZ₃:
/// `4ε²(3 + 3ε² + ε⁴) / (2 + ε² + √(4 + ε⁴))³`.
pub fn ghz_to_w_closed_form(eps: f64) -> f64 {
    let e2 = eps * eps;
    let e4 = e2 * e2;
    4.0 * e2 * (3.0 + 3.0 * e2 + e4) / (2.0 + e2 + (4.0 + e4).sqrt()).powi(3)
}

/// One row of the GHZ₃ → W₃ sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub chordal_distance: f64,
    pub fidelity: f64,
    pub p: f64,
    pub p_over_eps2: f64,
}

/// Apply `A_ε^{⊗3}` to GHZ₃ for each `ε` and compare against W₃.
/// Rows come back in input order.
pub fn asymptotic_sweep(eps: &[f64], exec: Execution) -> Result<Vec<SweepRow>> {
    if eps.is_empty() {
        return arg("empty ε grid");
    }
    if let Some(bad) = eps.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return arg(format!("ε must be positive, got {bad}"));
    }
    let ghz3 = ghz::<Complex64>(3).normalized();
    let w3 = w_state::<Complex64>(3);
    map_slice(exec, eps, |&e| {
        let a = ghz_to_w_operator(e)?;
        let image = slocc_apply(&ghz3, &a)?;
        let p = success_probability(&ghz3, &a)?;
        Ok(SweepRow {
            epsilon: e,
            chordal_distance: chordal_distance(&image, &w3)?,
            fidelity: fidelity(&w3, &image),
            p,
            p_over_eps2: p / (e * e),
        })
    })
    .into_iter()
    .collect()
}

pub const SWEEP_CSV_HEADER: &str = "epsilon,chordal_distance,fidelity,p,p_over_eps2";

/// CSV rendering with the fixed column order of [`SWEEP_CSV_HEADER`].
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{:e},{:e},{:e},{:e},{:e}\n", r.epsilon, r.chordal_distance, r.fidelity, r.p, r.p_over_eps2));
    }
    out
}
