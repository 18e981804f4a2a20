//! Dense matrices over a [`Field`], exact rank/kernel routines and the
//! floating SVD/eigen wrappers.

use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Field, GaussianRational, Mode};

/// Default relative singular-value threshold for float ranks.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Mat<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Mat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn mul_mat(&self, rhs: &Mat<F>) -> Mat<F> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        Self::from_fn(self.rows, rhs.cols, |r, c| {
            (0..self.cols).fold(F::zero(), |acc, k| acc + self[(r, k)].clone() * rhs[(k, c)].clone())
        })
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Field::is_zero)
    }

    pub fn to_c64(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self[(r, c)].to_c64())
    }
}

impl<F> std::ops::Index<(usize, usize)> for Mat<F> {
    type Output = F;
    fn index(&self, (r, c): (usize, usize)) -> &F {
        &self.data[r * self.cols + c]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for Mat<F> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut F {
        &mut self.data[r * self.cols + c]
    }
}

impl<F: fmt::Debug> fmt::Debug for Mat<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for r in 0..self.rows {
            list.entry(&&self.data[r * self.cols..(r + 1) * self.cols]);
        }
        list.finish()
    }
}

/// How matrix ranks are decided.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum RankMode {
    /// Fraction-free elimination over `Q(i)`; requires exact data.
    Exact,
    /// Count singular values above `tol · σ_max`.
    Float { tol: f64 },
}

impl RankMode {
    pub fn float() -> Self {
        RankMode::Float { tol: DEFAULT_RANK_TOL }
    }

    /// Exact for exact fields, default-tolerance float otherwise.
    pub fn natural<F: Field>() -> Self {
        match F::MODE {
            Mode::Exact => RankMode::Exact,
            Mode::Float => Self::float(),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            RankMode::Exact => Mode::Exact,
            RankMode::Float { .. } => Mode::Float,
        }
    }

    pub fn tol(&self) -> Option<f64> {
        match self {
            RankMode::Exact => None,
            RankMode::Float { tol } => Some(*tol),
        }
    }
}

/// A rank together with its stability flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankDecision {
    pub rank: usize,
    /// Set when a singular value lies within a factor 10 of the threshold.
    pub unstable: bool,
}

pub fn matrix_rank<F: Field>(m: &Mat<F>, mode: RankMode) -> Result<RankDecision> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::Argument("rank of an empty matrix".into()));
    }
    match mode {
        RankMode::Exact => {
            if F::MODE != Mode::Exact {
                return Err(Error::Mode("exact rank requested on floating-point data".into()));
            }
            let exact = Mat::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)].to_exact().expect("exact field"));
            Ok(RankDecision { rank: bareiss_rank(&exact), unstable: false })
        }
        RankMode::Float { tol } => Ok(float_rank(&m.to_c64(), tol)),
    }
}

/// Rank from singular values of a complex matrix.
pub fn float_rank(m: &DMatrix<Complex64>, tol: f64) -> RankDecision {
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    if smax == 0.0 {
        return RankDecision { rank: 0, unstable: false };
    }
    let mut rank = 0;
    let mut unstable = false;
    for &s in sv.iter() {
        let rel = s / smax;
        if rel > tol {
            rank += 1;
        }
        if rel > tol / 10.0 && rel < tol * 10.0 {
            unstable = true;
        }
    }
    RankDecision { rank, unstable }
}

#[derive(Clone, PartialEq)]
struct GaussInt {
    re: BigInt,
    im: BigInt,
}

impl GaussInt {
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn mul(&self, o: &GaussInt) -> GaussInt {
        GaussInt { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }

    fn sub(&self, o: &GaussInt) -> GaussInt {
        GaussInt { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    /// Division known to be exact in `Z[i]`.
    fn div_exact(&self, o: &GaussInt) -> GaussInt {
        let n = &o.re * &o.re + &o.im * &o.im;
        let num = self.mul(&GaussInt { re: o.re.clone(), im: -o.im.clone() });
        let (qr, rr) = num.re.div_rem(&n);
        let (qi, ri) = num.im.div_rem(&n);
        debug_assert!(rr.is_zero() && ri.is_zero(), "inexact Bareiss division");
        GaussInt { re: qr, im: qi }
    }
}

/// Rank by fraction-free (Bareiss) elimination. Rows are first scaled to
/// Gaussian integers by the lcm of their denominators, which preserves rank.
pub fn bareiss_rank(m: &Mat<GaussianRational>) -> usize {
    let rows = m.rows();
    let cols = m.cols();
    let mut a: Vec<Vec<GaussInt>> = (0..rows)
        .map(|r| {
            let l = m.row(r).iter().fold(BigInt::from(1), |acc, x| acc.lcm(&x.denom_lcm()));
            m.row(r)
                .iter()
                .map(|x| {
                    let re = &x.re * &l;
                    let im = &x.im * &l;
                    GaussInt { re: re.to_integer(), im: im.to_integer() }
                })
                .collect()
        })
        .collect();
    let mut prev = GaussInt { re: BigInt::from(1), im: BigInt::zero() };
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let t = a[rank][c].mul(&a[i][j]).sub(&a[i][c].mul(&a[rank][j]));
                a[i][j] = t.div_exact(&prev);
            }
            a[i][c] = GaussInt { re: BigInt::zero(), im: BigInt::zero() };
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}

/// Reduced row echelon form over `Q(i)`; returns pivot columns.
pub fn rref(m: &mut Mat<GaussianRational>) -> Vec<usize> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
        if p != r {
            for j in 0..cols {
                let tmp = m[(r, j)].clone();
                m[(r, j)] = m[(p, j)].clone();
                m[(p, j)] = tmp;
            }
        }
        let inv = &GaussianRational::from_i64(1) / &m[(r, c)];
        for j in c..cols {
            m[(r, j)] = &m[(r, j)] * &inv;
        }
        for i in 0..rows {
            if i == r || m[(i, c)].is_zero() {
                continue;
            }
            let f = m[(i, c)].clone();
            for j in c..cols {
                let t = &m[(i, j)] - &(&f * &m[(r, j)]);
                m[(i, j)] = t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Exact null-space basis, one vector per free column.
pub fn exact_kernel(m: &Mat<GaussianRational>) -> Vec<Vec<GaussianRational>> {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let cols = m.cols();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![GaussianRational::from_i64(0); cols];
            v[f] = GaussianRational::from_i64(1);
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[(r, f)].clone();
            }
            v
        })
        .collect()
}

/// Solve a square system exactly; `None` when singular.
pub fn exact_solve(m: &Mat<GaussianRational>, b: &[GaussianRational]) -> Option<Vec<GaussianRational>> {
    let n = m.rows();
    assert_eq!(n, m.cols());
    let mut aug = Mat::from_fn(n, n + 1, |r, c| if c < n { m[(r, c)].clone() } else { b[r].clone() });
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some((0..n).map(|r| aug[(r, n)].clone()).collect())
}

/// Unique exact solution of an overdetermined system `m x = b`; `None` when
/// inconsistent or underdetermined.
pub fn exact_solve_rect(m: &Mat<GaussianRational>, b: &[GaussianRational]) -> Option<Vec<GaussianRational>> {
    let (rows, n) = (m.rows(), m.cols());
    assert_eq!(rows, b.len());
    let mut aug = Mat::from_fn(rows, n + 1, |r, c| if c < n { m[(r, c)].clone() } else { b[r].clone() });
    let pivots = rref(&mut aug);
    if pivots.len() != n || pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some((0..n).map(|r| aug[(r, n)].clone()).collect())
}

/// Float null-space basis: right singular vectors with σ ≤ tol·σ_max.
pub fn float_kernel(m: &DMatrix<Complex64>, tol: f64) -> (Vec<Vec<Complex64>>, bool) {
    let (rows, cols) = m.shape();
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let mut kernel = Vec::new();
    let mut unstable = false;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        let rel = if smax == 0.0 { 0.0 } else { s / smax };
        if rel > tol / 10.0 && rel < tol * 10.0 {
            unstable = true;
        }
        if rel <= tol {
            kernel.push(v_t.row(i).iter().map(|z| z.conj()).collect());
        }
    }
    (kernel, unstable)
}

/// Hermitian eigen-decomposition with eigenvalues sorted ascending.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Largest absolute entry-wise deviation from Hermitian symmetry.
pub fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0_f64;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> GaussianRational {
        GaussianRational::from_i64(v)
    }

    #[test]
    fn zero_matrix_rank_zero() {
        let m = Mat::<GaussianRational>::zeros(3, 2);
        assert_eq!(matrix_rank(&m, RankMode::Exact).unwrap().rank, 0);
        assert_eq!(matrix_rank(&m, RankMode::float()).unwrap().rank, 0);
    }

    #[test]
    fn outer_product_rank_one() {
        let u = [q(1), q(2), GaussianRational::gaussian(0, 3)];
        let v = [q(4), GaussianRational::from_ratio(1, 5)];
        let m = Mat::from_fn(3, 2, |r, c| &u[r] * &v[c]);
        assert_eq!(matrix_rank(&m, RankMode::Exact).unwrap().rank, 1);
        assert_eq!(matrix_rank(&m, RankMode::float()).unwrap().rank, 1);
    }

    #[test]
    fn x4_middle_catalecticant_full_rank() {
        let w = GaussianRational::from_ratio(7, 3);
        let m = Mat::from_rows(vec![vec![q(0), q(1), q(0)], vec![q(1), q(0), q(0)], vec![q(0), q(0), w]]);
        assert_eq!(matrix_rank(&m, RankMode::Exact).unwrap().rank, 3);
    }

    #[test]
    fn exact_rank_on_float_data_is_mode_error() {
        let m = Mat::<Complex64>::identity(2);
        assert!(matches!(matrix_rank(&m, RankMode::Exact), Err(Error::Mode(_))));
    }

    #[test]
    fn kernel_and_solve() {
        let m = Mat::from_rows(vec![vec![q(1), q(0), q(0)], vec![q(0), q(0), q(1)]]);
        let k = exact_kernel(&m);
        assert_eq!(k, vec![vec![q(0), q(1), q(0)]]);
        let a = Mat::from_rows(vec![vec![q(2), q(1)], vec![q(1), q(3)]]);
        let x = exact_solve(&a, &[q(3), q(4)]).unwrap();
        assert_eq!(x, vec![q(1), q(1)]);
        let singular = Mat::from_rows(vec![vec![q(1), q(2)], vec![q(2), q(4)]]);
        assert!(exact_solve(&singular, &[q(1), q(0)]).is_none());
    }

    #[test]
    fn float_kernel_wide_matrix() {
        let m = Mat::<Complex64>::from_rows(vec![vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]]);
        let (k, unstable) = float_kernel(&m.to_c64(), 1e-9);
        assert_eq!(k.len(), 2);
        assert!(!unstable);
        for v in k {
            assert!(v[0].norm() < 1e-12);
        }
    }

    proptest::proptest! {
        #[test]
        fn bareiss_matches_rref(entries in proptest::collection::vec((-3i64..=3, -2i64..=2), 12)) {
            let m = Mat::from_fn(3, 4, |r, c| {
                let (a, b) = entries[r * 4 + c];
                GaussianRational::gaussian(a, b)
            });
            let mut reduced = m.clone();
            let pivots = rref(&mut reduced);
            proptest::prop_assert_eq!(bareiss_rank(&m), pivots.len());
        }
    }
}
