//! Apolarity: kernels of catalecticants as binary forms, symmetric rank,
//! the proper-secant / tangent split, Waring decompositions, and explicit
//! secant and tangent points.
//!
//! A form `g = Σ g_i x0^{k-i} x1^i` annihilates `φ` when `C_k g = 0`. If `g`
//! has `k` distinct projective roots `[a_r : b_r]`, then `φ` is a
//! combination of the `(a_r, b_r)^{⊗N}`. In exact mode the roots are kept
//! algebraic: weights and points live in `Q(i)[t]/(p)` and every identity
//! is checked with traces, so no root is ever rounded.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalecticant::{hankel, rank_profile, RankProfile};
use crate::error::{arg, Error, Result};
use crate::exec::{map_slice, Execution};
use crate::linalg::{exact_kernel, exact_solve_rect, float_kernel, matrix_rank, Mat, RankMode, DEFAULT_RANK_TOL};
use crate::poly::{complex_roots, Poly};
use crate::scalar::{binomial, same_type, Field, GaussianRational as Q, Mode};
use crate::states::{
    chordal_distance, expand_decomposition, local_chordal, veronese_map, DecomposedState, LocalVector, SymState,
    Term,
};

/// Float roots closer than this (chordal) count as repeated.
pub const ROOT_SEPARATION_TOL: f64 = 1e-7;
/// Accepted roots closer than this are flagged as near the repeated-root boundary.
const ROOT_SEPARATION_WARN: f64 = 1e-5;
/// Largest chordal residual accepted for a float decomposition.
pub const FIT_TOL: f64 = 1e-8;
const DETERMINISTIC_CANDIDATES: i64 = 32;
const RANDOM_CANDIDATES: usize = 4096;
const FLOAT_CANDIDATES: usize = 24;

/// Binary form `Σ_i g_i x0^{k-i} x1^i` of degree `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryForm<F> {
    coeffs: Vec<F>,
}

impl<F: Field> BinaryForm<F> {
    pub fn new(coeffs: Vec<F>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().all(Field::is_zero) {
            return arg("binary form has no nonzero coefficient");
        }
        Ok(Self { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn eval(&self, x0: &F, x1: &F) -> F {
        let k = self.degree();
        self.coeffs
            .iter()
            .enumerate()
            .fold(F::zero(), |acc, (i, g)| acc + g.clone() * x0.powi(k - i) * x1.powi(i))
    }

    /// `g(1, t)`.
    pub fn dehomogenize(&self) -> Poly<F> {
        Poly::new(self.coeffs.clone())
    }

    /// Multiplicity of the root `[0 : 1]`, i.e. the power of `x0` dividing `g`.
    pub fn infinity_multiplicity(&self) -> usize {
        self.coeffs.iter().rev().take_while(|c| c.is_zero()).count()
    }

    pub fn to_c64(&self) -> BinaryForm<Complex64> {
        BinaryForm { coeffs: self.coeffs.iter().map(Field::to_c64).collect() }
    }

    fn from_poly(p: &Poly<F>, k: usize) -> Self {
        let mut coeffs = p.coeffs().to_vec();
        coeffs.resize(k + 1, F::zero());
        Self { coeffs }
    }

    fn combine(forms: &[Self], weights: &[F]) -> Option<Self> {
        let mut coeffs = vec![F::zero(); forms[0].coeffs.len()];
        for (f, w) in forms.iter().zip(weights) {
            for (a, c) in coeffs.iter_mut().zip(&f.coeffs) {
                *a = a.clone() + w.clone() * c.clone();
            }
        }
        Self::new(coeffs).ok()
    }
}

impl BinaryForm<Q> {
    /// No repeated projective root, counting `[0 : 1]`.
    pub fn is_squarefree(&self) -> bool {
        if self.infinity_multiplicity() > 1 {
            return false;
        }
        let p = self.dehomogenize();
        p.degree().unwrap_or(0) == 0 || p.gcd(&p.derivative()).degree() == Some(0)
    }

    /// Greatest common divisor of a family of forms.
    pub fn gcd_of(forms: &[Self]) -> Self {
        let inf = forms.iter().map(Self::infinity_multiplicity).min().unwrap_or(0);
        let g = forms.iter().fold(Poly::zero(), |acc, f| acc.gcd(&f.dehomogenize()));
        let deg = g.degree().unwrap_or(0);
        Self::from_poly(&g, deg + inf)
    }

    /// Projective roots with multiplicities (square-free factorization,
    /// then numerical roots of each factor).
    pub fn projective_roots(&self) -> Vec<ProjectiveRoot> {
        let mut out = Vec::new();
        for (factor, mult) in squarefree_factors(&self.dehomogenize()) {
            for t in complex_roots(&factor.to_c64()) {
                out.push(ProjectiveRoot::new([Complex64::new(1.0, 0.0), t], mult));
            }
        }
        let inf = self.infinity_multiplicity();
        if inf > 0 {
            out.push(ProjectiveRoot::new([Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)], inf));
        }
        out
    }
}

impl BinaryForm<Complex64> {
    /// Numerical projective roots, grouping roots closer than `tol`.
    pub fn projective_roots_clustered(&self, tol: f64) -> Vec<ProjectiveRoot> {
        let mut out: Vec<ProjectiveRoot> = Vec::new();
        for p in float_roots(self) {
            match out.iter_mut().find(|r| local_chordal(&r.point, &p) < tol) {
                Some(r) => r.multiplicity += 1,
                None => out.push(ProjectiveRoot::new(p, 1)),
            }
        }
        out
    }
}

/// Yun's square-free factorization of a polynomial over `Q(i)`.
fn squarefree_factors(p: &Poly<Q>) -> Vec<(Poly<Q>, usize)> {
    let f = p.monic();
    if f.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let fp = f.derivative();
    let a0 = f.gcd(&fp);
    let mut b = f.div_rem(&a0).0;
    let mut d = fp.div_rem(&a0).0.sub(&b.derivative());
    let mut out = Vec::new();
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        let next = b.div_rem(&a).0;
        d = d.div_rem(&a).0.sub(&next.derivative());
        if a.degree().unwrap_or(0) > 0 {
            out.push((a, i));
        }
        b = next;
        i += 1;
    }
    out
}

/// A point `[x0 : x1]` of the projective line (unit representative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectiveRoot {
    pub point: [Complex64; 2],
    pub multiplicity: usize,
}

impl ProjectiveRoot {
    fn new(p: [Complex64; 2], multiplicity: usize) -> Self {
        let n = (p[0].norm_sqr() + p[1].norm_sqr()).sqrt();
        Self { point: [p[0] / n, p[1] / n], multiplicity }
    }
}

/// Roots of a float form. The variables are first rotated by a fixed
/// generic unitary so that no root sits at the chart's infinity.
fn float_roots(g: &BinaryForm<Complex64>) -> Vec<[Complex64; 2]> {
    let (c, s) = (0.8_f64, 0.6_f64);
    let phase = Complex64::from_polar(1.0, 0.7);
    let u = [[Complex64::new(c, 0.0), -s * phase.conj()], [s * phase, Complex64::new(c, 0.0)]];
    let k = g.degree();
    let x0 = Poly::new(vec![u[0][0], u[0][1]]);
    let x1 = Poly::new(vec![u[1][0], u[1][1]]);
    let mut h = Poly::zero();
    for (i, gi) in g.coeffs.iter().enumerate() {
        h = h.add(&x0.pow(k - i).mul(&x1.pow(i)).scale(gi));
    }
    let scale = h.coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut coeffs = h.coeffs().to_vec();
    while coeffs.last().is_some_and(|z| z.norm() <= 1e-13 * scale) {
        coeffs.pop();
    }
    let h = Poly::new(coeffs);
    let finite = complex_roots(&h);
    let at_infinity = k - finite.len();
    finite
        .into_iter()
        .map(|t| [u[0][0] + u[0][1] * t, u[1][0] + u[1][1] * t])
        .chain(std::iter::repeat_n([u[0][1], u[1][1]], at_infinity))
        .collect()
}

fn min_separation(points: &[[Complex64; 2]]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[..i] {
            best = best.min(local_chordal(a, b));
        }
    }
    best
}

/// Basis of the null space of `C_k` as binary forms of degree `k`, using
/// the natural rank mode of the field.
pub fn apolar_kernel<F: Field>(s: &SymState<F>, k: usize) -> Result<Vec<BinaryForm<F>>> {
    apolar_kernel_with(s, k, RankMode::natural::<F>()).map(|(forms, _)| forms)
}

/// As [`apolar_kernel`], also reporting whether a float singular value sat
/// near the threshold. `1 ≤ k ≤ N`; `k = N` gives the single-row case.
pub fn apolar_kernel_with<F: Field>(s: &SymState<F>, k: usize, mode: RankMode) -> Result<(Vec<BinaryForm<F>>, bool)> {
    s.require_qubits("apolar kernel")?;
    if k < 1 || k > s.parties() {
        return arg(format!("apolar kernel degree k = {k} outside 1..={}", s.parties()));
    }
    let c = hankel(s, k);
    match (F::MODE, mode) {
        (Mode::Exact, RankMode::Exact) => {
            let m: Mat<Q> = same_type(c.into_matrix());
            let forms = exact_kernel(&m).into_iter().map(|v| BinaryForm { coeffs: v }).collect::<Vec<_>>();
            Ok((same_type(forms), false))
        }
        (Mode::Float, RankMode::Exact) => Err(Error::Mode("exact kernel requested for float data".into())),
        (_, RankMode::Float { tol }) => {
            if F::MODE == Mode::Exact {
                return Err(Error::Mode("float kernel of exact data; convert the state first".into()));
            }
            let (vs, unstable) = float_kernel(&c.matrix().to_c64(), tol);
            let forms = vs.into_iter().map(|v| BinaryForm { coeffs: v }).collect::<Vec<_>>();
            Ok((same_type(forms), unstable))
        }
    }
}

/// Outcome of the square-free search over a linear family of forms.
#[derive(Debug, Clone, PartialEq)]
pub struct SquarefreeSearch<F> {
    pub member: Option<BinaryForm<F>>,
    /// Exact mode, no member: the common factor of the family, which has a
    /// repeated root.
    pub common_factor: Option<BinaryForm<F>>,
    /// Float mode: smallest root separation of the best candidate.
    pub separation: Option<f64>,
    /// Float mode: the decision was taken close to [`ROOT_SEPARATION_TOL`].
    pub unstable: bool,
}

/// A square-free member of the span of `forms`, if one exists.
pub fn squarefree_member<F: Field>(forms: &[BinaryForm<F>]) -> Result<Option<BinaryForm<F>>> {
    squarefree_search(forms, 0).map(|s| s.member)
}

/// Exact mode decides existence by the gcd of the family (a general member
/// is square-free iff the gcd is), then tests small-integer combinations
/// along the moment curve and finally seeded random ones. Float mode keeps
/// the candidate with the best-separated roots.
pub fn squarefree_search<F: Field>(forms: &[BinaryForm<F>], seed: u64) -> Result<SquarefreeSearch<F>> {
    if forms.is_empty() {
        return arg("square-free search over an empty family");
    }
    if forms.iter().any(|f| f.degree() != forms[0].degree()) {
        return arg("forms of different degrees");
    }
    match F::MODE {
        Mode::Exact => {
            let qs: Vec<BinaryForm<Q>> = same_type(forms.to_vec());
            Ok(same_type(exact_search(&qs, seed)?))
        }
        Mode::Float => {
            let cs: Vec<BinaryForm<Complex64>> = same_type(forms.to_vec());
            Ok(same_type(float_search(&cs, seed)))
        }
    }
}

fn exact_search(forms: &[BinaryForm<Q>], seed: u64) -> Result<SquarefreeSearch<Q>> {
    let found = |g: BinaryForm<Q>| SquarefreeSearch { member: Some(g), common_factor: None, separation: None, unstable: false };
    let common = BinaryForm::gcd_of(forms);
    if !common.is_squarefree() {
        return Ok(SquarefreeSearch { member: None, common_factor: Some(common), separation: None, unstable: false });
    }
    if let Some(g) = forms.iter().find(|f| f.is_squarefree()) {
        return Ok(found(g.clone()));
    }
    for t in 1..=DETERMINISTIC_CANDIDATES {
        let w: Vec<Q> = (0..forms.len()).map(|j| Q::from_i64(t.pow(j as u32))).collect();
        if let Some(g) = BinaryForm::combine(forms, &w).filter(BinaryForm::is_squarefree) {
            return Ok(found(g));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_CANDIDATES {
        let w: Vec<Q> = (0..forms.len()).map(|_| Q::from_i64(rng.gen_range(-1000..=1000))).collect();
        if let Some(g) = BinaryForm::combine(forms, &w).filter(BinaryForm::is_squarefree) {
            return Ok(found(g));
        }
    }
    Err(Error::Numerical("square-free search exhausted although the family admits one".into()))
}

fn float_search(forms: &[BinaryForm<Complex64>], seed: u64) -> SquarefreeSearch<Complex64> {
    let normalized: Vec<BinaryForm<Complex64>> = forms
        .iter()
        .map(|f| {
            let n = f.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            BinaryForm { coeffs: f.coeffs.iter().map(|z| z / n).collect() }
        })
        .collect();
    let mut candidates = normalized.clone();
    if normalized.len() > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..FLOAT_CANDIDATES {
            let w: Vec<Complex64> =
                (0..normalized.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            candidates.extend(BinaryForm::combine(&normalized, &w));
        }
    }
    let (best, sep) = candidates
        .into_iter()
        .map(|g| {
            let sep = min_separation(&float_roots(&g));
            (g, sep)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one candidate");
    let accepted = sep >= ROOT_SEPARATION_TOL;
    SquarefreeSearch {
        member: accepted.then_some(best),
        common_factor: None,
        separation: Some(sep),
        unstable: accepted && sep < ROOT_SEPARATION_WARN,
    }
}

/// Exact Waring decomposition with algebraic points: the `r` roots of the
/// monic square-free `p(t)` give terms `L(t) · (x0(t), x1(t))^{⊗N}`, where
/// `L`, `x0`, `x1` are polynomials reduced mod `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicDecomposition {
    n: usize,
    minpoly: Poly<Q>,
    weight: Poly<Q>,
    x0: Poly<Q>,
    x1: Poly<Q>,
}

impl AlgebraicDecomposition {
    /// Number of terms.
    pub fn rank(&self) -> usize {
        self.minpoly.degree().unwrap_or(0)
    }

    pub fn parties(&self) -> usize {
        self.n
    }

    pub fn minimal_polynomial(&self) -> &Poly<Q> {
        &self.minpoly
    }

    pub fn weight(&self) -> &Poly<Q> {
        &self.weight
    }

    /// `(x0(t), x1(t))`.
    pub fn point(&self) -> (&Poly<Q>, &Poly<Q>) {
        (&self.x0, &self.x1)
    }

    /// Power sums `Σ_roots t^j` for `j ≤ 2r − 2`, by Newton's identities.
    fn power_sums(&self) -> Vec<Q> {
        let r = self.rank();
        let q = self.minpoly.coeffs();
        let len = (2 * r).saturating_sub(1).max(1);
        let mut s: Vec<Q> = Vec::with_capacity(len);
        s.push(Q::from_i64(r as i64));
        for j in 1..len {
            let mut acc = if j <= r { -(Q::from_i64(j as i64) * q[r - j].clone()) } else { Q::zero() };
            for i in 1..j.min(r + 1) {
                acc = acc - q[r - i].clone() * s[j - i].clone();
            }
            s.push(acc);
        }
        s
    }

    /// `Tr h(t)`; products of two reduced polynomials need no reduction.
    fn trace(&self, h: &Poly<Q>, sums: &[Q]) -> Q {
        let dot = |c: &[Q]| c.iter().zip(sums).fold(Q::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
        if h.coeffs().len() <= sums.len() {
            dot(h.coeffs())
        } else {
            dot(h.rem(&self.minpoly).coeffs())
        }
    }

    /// `x0^{N-m} x1^m mod p` for `m = 0..=N`.
    fn monomials(&self) -> Vec<Poly<Q>> {
        let p = &self.minpoly;
        let powers = |x: &Poly<Q>| {
            let mut v = vec![Poly::constant(Q::one())];
            for _ in 0..self.n {
                let next = v.last().expect("seeded").mul(x).rem(p);
                v.push(next);
            }
            v
        };
        let (p0, p1) = (powers(&self.x0), powers(&self.x1));
        (0..=self.n).map(|m| p0[self.n - m].mul(&p1[m]).rem(p)).collect()
    }

    /// Exact coefficients `c_m = Tr(L · x0^{N-m} x1^m)`.
    pub fn expand(&self) -> Result<SymState<Q>> {
        let sums = self.power_sums();
        let coeffs = self.monomials().iter().map(|mono| self.trace(&self.weight.mul(mono), &sums)).collect();
        SymState::qubits(coeffs)
    }

    /// Same points and weights on `N + 1` parties.
    pub fn nest(&self) -> Self {
        Self { n: self.n + 1, ..self.clone() }
    }

    /// Terms at numerically located roots of `p`.
    pub fn numeric_terms(&self) -> Result<DecomposedState<Complex64>> {
        let terms = complex_roots(&self.minpoly.to_c64())
            .into_iter()
            .map(|t| {
                let (w, v) = (self.weight.to_c64().eval(&t), [self.x0.to_c64().eval(&t), self.x1.to_c64().eval(&t)]);
                float_term(w, v, self.n)
            })
            .collect::<Result<Vec<_>>>()?;
        DecomposedState::new(self.n, terms)
    }

    /// Exact terms when every root of `p` lies in `Q(i)`.
    pub fn rational_terms(&self) -> Option<DecomposedState<Q>> {
        let mut roots: Vec<Q> = Vec::new();
        for z in complex_roots(&self.minpoly.to_c64()) {
            let q = Q::approximate(z, 1 << 20)?;
            if !self.minpoly.eval(&q).is_zero() || roots.contains(&q) {
                return None;
            }
            roots.push(q);
        }
        let terms = roots
            .iter()
            .map(|t| {
                let (w, a, b) = (self.weight.eval(t), self.x0.eval(t), self.x1.eval(t));
                // first nonzero component becomes 1
                let lead = if a.is_zero() { b.clone() } else { a.clone() };
                let inv = Q::one() / lead.clone();
                Term { weight: w * lead.powi(self.n), vector: LocalVector(vec![a * inv.clone(), b * inv]) }
            })
            .collect();
        DecomposedState::new(self.n, terms).ok()
    }

    /// Solve for `L` given a square-free kernel form `g` of degree `r`.
    /// Returns `None` unless the exact system is consistent with a unique
    /// solution and no weight vanishes.
    fn solve(s: &SymState<Q>, g: &BinaryForm<Q>) -> Option<Self> {
        let r = g.degree();
        // shear x = (1 + a t, t) so that no root is at t = ∞
        let a = (0..)
            .map(|i: i64| if i % 2 == 1 { (i + 1) / 2 } else { -(i / 2) })
            .find(|&a| !g.eval(&Q::from_i64(a), &Q::one()).is_zero())?;
        let x0 = Poly::new(vec![Q::one(), Q::from_i64(a)]);
        let x1 = Poly::x();
        let mut h = Poly::zero();
        for (i, gi) in g.coeffs().iter().enumerate() {
            h = h.add(&x0.pow(r - i).mul(&x1.pow(i)).scale(gi));
        }
        let mut dec =
            Self { n: s.parties(), minpoly: h.monic(), weight: Poly::zero(), x0: x0.clone(), x1: x1.clone() };
        if dec.rank() != r {
            return None;
        }
        let sums = dec.power_sums();
        let monos = dec.monomials();
        let basis: Vec<Poly<Q>> = (0..r).map(|j| Poly::x().pow(j)).collect();
        let m = Mat::from_fn(s.parties() + 1, r, |row, j| dec.trace(&basis[j].mul(&monos[row]), &sums));
        let l = exact_solve_rect(&m, s.coeffs())?;
        dec.weight = Poly::new(l);
        if dec.weight.gcd(&dec.minpoly).degree() != Some(0) {
            return None;
        }
        // row `m` of the consistent system is exactly Tr(L · x0^{N-m} x1^m) = c_m
        Some(dec)
    }
}

fn float_term(w: Complex64, v: [Complex64; 2], n: usize) -> Result<Term<Complex64>> {
    let lead = if v[0].norm() >= v[1].norm() { v[0] } else { v[1] };
    if lead.norm() == 0.0 {
        return Err(Error::Numerical("decomposition point vanished".into()));
    }
    Ok(Term { weight: w * lead.powi(n as i32), vector: LocalVector(vec![v[0] / lead, v[1] / lead]) })
}

/// Least-squares weights for given points, in the Hilbert-space metric.
fn float_fit(s: &SymState<Complex64>, points: &[[Complex64; 2]]) -> Option<(DecomposedState<Complex64>, f64)> {
    let n = s.parties();
    let sqrt_binom: Vec<f64> = (0..=n).map(|m| (binomial(n, m) as f64).sqrt()).collect();
    let a = DMatrix::from_fn(n + 1, points.len(), |m, j| {
        points[j][0].powi((n - m) as i32) * points[j][1].powi(m as i32) * sqrt_binom[m]
    });
    let b = DVector::from_iterator(n + 1, s.coeffs().iter().enumerate().map(|(m, c)| c * sqrt_binom[m]));
    let w = a.svd(true, true).solve(&b, 1e-14).ok()?;
    let wmax = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if wmax == 0.0 || w.iter().any(|z| z.norm() <= 1e-12 * wmax) {
        return None;
    }
    let terms = points.iter().zip(w.iter()).map(|(p, wj)| float_term(*wj, *p, n)).collect::<Result<Vec<_>>>().ok()?;
    let dec = DecomposedState::new(n, terms).ok()?;
    let resid = chordal_distance(&expand_decomposition(&dec).ok()?, s).ok()?;
    Some((dec, resid))
}

/// A certified decomposition with as many terms as the symmetric rank.
#[derive(Debug, Clone, PartialEq)]
pub struct WaringDecomposition<F> {
    n: usize,
    form: BinaryForm<F>,
    algebraic: Option<AlgebraicDecomposition>,
    explicit: Option<DecomposedState<F>>,
    numeric: DecomposedState<Complex64>,
    residual: f64,
}

impl<F: Field> WaringDecomposition<F> {
    pub fn rank(&self) -> usize {
        self.form.degree()
    }

    pub fn parties(&self) -> usize {
        self.n
    }

    /// Square-free kernel form whose roots are the decomposition points.
    pub fn form(&self) -> &BinaryForm<F> {
        &self.form
    }

    /// Exact mode: the algebraic decomposition.
    pub fn algebraic(&self) -> Option<&AlgebraicDecomposition> {
        self.algebraic.as_ref()
    }

    /// Explicit terms over the field: always in float mode, in exact mode
    /// when all points are `Q(i)`-rational.
    pub fn explicit(&self) -> Option<&DecomposedState<F>> {
        self.explicit.as_ref()
    }

    pub fn numeric(&self) -> &DecomposedState<Complex64> {
        &self.numeric
    }

    /// Chordal distance between re-expansion and input (zero in exact mode).
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Re-expansion; exact in exact mode.
    pub fn expand(&self) -> Result<SymState<F>> {
        match &self.algebraic {
            Some(alg) => Ok(same_type(alg.expand()?)),
            None => Ok(same_type(expand_decomposition(&self.numeric)?)),
        }
    }

    /// The same decomposition on `N + 1` parties.
    pub fn nest(&self) -> Result<Self> {
        Ok(Self {
            n: self.n + 1,
            form: self.form.clone(),
            algebraic: self.algebraic.as_ref().map(AlgebraicDecomposition::nest),
            explicit: self.explicit.as_ref().map(nest),
            numeric: nest(&self.numeric),
            residual: self.residual,
        })
    }
}

/// Tangent certificate: at `k = border rank` the kernel of `C_k` has no
/// square-free member.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentCertificate<F> {
    pub k: usize,
    pub kernel: Vec<BinaryForm<F>>,
    /// Exact mode: gcd of the kernel family, with a repeated root.
    pub common_factor: Option<BinaryForm<F>>,
    /// Repeated roots shared by the family (multiplicity ≥ 2).
    pub repeated_roots: Vec<ProjectiveRoot>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Separable,
    ProperSecant(usize),
    Tangent(usize),
}

impl Label {
    /// Neutral name, e.g. `proper-secant(2)`.
    pub fn name(&self) -> String {
        match self {
            Label::Separable => "separable".into(),
            Label::ProperSecant(k) => format!("proper-secant({k})"),
            Label::Tangent(k) => format!("tangent({k})"),
        }
    }

    /// Variety name: `V^{N,1}`, `σ_k*` or `τ_k`.
    pub fn taxonomy(&self, n: usize) -> String {
        match self {
            Label::Separable => format!("V^{{{n},1}}"),
            Label::ProperSecant(k) => format!("σ_{k}*"),
            Label::Tangent(k) => format!("τ_{k}"),
        }
    }

    pub fn border_rank(&self) -> usize {
        match *self {
            Label::Separable => 1,
            Label::ProperSecant(k) | Label::Tangent(k) => k,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness<F> {
    /// Proper (or separable): a decomposition with border-rank many terms.
    Decomposition(WaringDecomposition<F>),
    /// Tangent: the repeated-root certificate, plus the minimal
    /// decomposition with symmetric-rank many terms.
    Tangent { certificate: TangentCertificate<F>, minimal: WaringDecomposition<F> },
}

impl<F: Field> Witness<F> {
    /// Decomposition with symmetric-rank many terms.
    pub fn decomposition(&self) -> &WaringDecomposition<F> {
        match self {
            Witness::Decomposition(d) => d,
            Witness::Tangent { minimal, .. } => minimal,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport<F> {
    pub n: usize,
    pub border_rank: usize,
    pub symmetric_rank: usize,
    pub label: Label,
    pub rank_profile: RankProfile,
    pub witness: Witness<F>,
    /// Human-readable notes on numerically delicate decisions.
    pub flags: Vec<String>,
    /// Set when a float decision was taken near its threshold.
    pub unstable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub rank_mode: RankMode,
    pub seed: u64,
}

impl ClassifyOptions {
    pub fn natural<F: Field>() -> Self {
        Self { rank_mode: RankMode::natural::<F>(), seed: 0 }
    }
}

/// Classify with the field's natural rank mode and seed 0.
pub fn classify<F: Field>(s: &SymState<F>) -> Result<ClassificationReport<F>> {
    classify_with(s, ClassifyOptions::natural::<F>())
}

pub fn classify_with<F: Field>(s: &SymState<F>, opts: ClassifyOptions) -> Result<ClassificationReport<F>> {
    let profile = rank_profile(s, opts.rank_mode)?;
    let border = profile.border_rank;
    let mut flags = Vec::new();
    if profile.is_unstable() {
        flags.push(format!("catalecticant ranks near the tolerance at j = {:?}", profile.unstable));
    }
    let search = match F::MODE {
        Mode::Exact => {
            let q: SymState<Q> = same_type(s.clone());
            same_type(exact_rank_search(&q, border, opts.seed)?)
        }
        Mode::Float => {
            let c: SymState<Complex64> = same_type(s.clone());
            let tol = opts.rank_mode.tol().unwrap_or(DEFAULT_RANK_TOL);
            same_type(float_rank_search(&c, border, tol, opts.seed)?)
        }
    };
    let RankSearch { decomposition, certificate, notes, unstable } = search;
    flags.extend(notes);
    let rank = decomposition.rank();
    let (label, witness) = match (border, certificate) {
        (1, _) if rank == 1 => (Label::Separable, Witness::Decomposition(decomposition)),
        (k, _) if rank == k => (Label::ProperSecant(k), Witness::Decomposition(decomposition)),
        (k, Some(certificate)) => (Label::Tangent(k), Witness::Tangent { certificate, minimal: decomposition }),
        (k, None) => {
            return Err(Error::Numerical(format!(
                "symmetric rank {rank} exceeds border rank {k} without a repeated-root certificate"
            )))
        }
    };
    Ok(ClassificationReport {
        n: s.parties(),
        border_rank: border,
        symmetric_rank: rank,
        label,
        rank_profile: profile.clone(),
        witness,
        flags,
        unstable: unstable || profile.is_unstable(),
    })
}

struct RankSearch<F> {
    decomposition: WaringDecomposition<F>,
    certificate: Option<TangentCertificate<F>>,
    notes: Vec<String>,
    unstable: bool,
}

fn exact_rank_search(s: &SymState<Q>, border: usize, seed: u64) -> Result<RankSearch<Q>> {
    let n = s.parties();
    let mut certificate = None;
    for k in border.max(1)..=n {
        let (kernel, _) = apolar_kernel_with(s, k, RankMode::Exact)?;
        if kernel.is_empty() {
            continue;
        }
        let search = exact_search(&kernel, seed.wrapping_add(k as u64))?;
        if let Some(g) = search.member {
            if let Some(alg) = AlgebraicDecomposition::solve(s, &g) {
                let numeric = alg.numeric_terms()?;
                let explicit = alg.rational_terms();
                let decomposition =
                    WaringDecomposition { n, form: g, algebraic: Some(alg), explicit, numeric, residual: 0.0 };
                return Ok(RankSearch { decomposition, certificate, notes: Vec::new(), unstable: false });
            }
        }
        if k == border {
            let repeated_roots = search
                .common_factor
                .as_ref()
                .map(|c| c.projective_roots().into_iter().filter(|r| r.multiplicity > 1).collect())
                .unwrap_or_default();
            certificate = Some(TangentCertificate { k, kernel, common_factor: search.common_factor, repeated_roots });
        }
    }
    Err(Error::Numerical(format!("no certified decomposition with at most N = {n} terms")))
}

fn float_rank_search(s: &SymState<Complex64>, border: usize, tol: f64, seed: u64) -> Result<RankSearch<Complex64>> {
    let n = s.parties();
    let mut certificate = None;
    let mut notes = Vec::new();
    let mut unstable = false;
    for k in border.max(1)..=n {
        let (kernel, kernel_unstable) = apolar_kernel_with(s, k, RankMode::Float { tol })?;
        if kernel.is_empty() {
            continue;
        }
        let search = float_search(&kernel, seed.wrapping_add(k as u64));
        let sep = search.separation.unwrap_or(f64::INFINITY);
        if let Some(g) = &search.member {
            if let Some((dec, resid)) = float_fit(s, &float_roots(g)) {
                if resid <= FIT_TOL {
                    if search.unstable {
                        notes.push(format!("k = {k}: accepted roots only {sep:.1e} apart; exact mode recommended"));
                    }
                    if kernel_unstable {
                        notes.push(format!("k = {k}: kernel dimension decided near the tolerance"));
                    }
                    unstable |= search.unstable || kernel_unstable;
                    let decomposition = WaringDecomposition {
                        n,
                        form: g.clone(),
                        algebraic: None,
                        explicit: Some(dec.clone()),
                        numeric: dec,
                        residual: resid,
                    };
                    return Ok(RankSearch { decomposition, certificate, notes, unstable });
                }
            }
        }
        if k == border {
            if sep < ROOT_SEPARATION_TOL {
                notes.push(format!("k = {k}: kernel roots repeat within {sep:.1e}; exact mode recommended"));
            }
            let probe = search.member.clone().unwrap_or_else(|| kernel[0].clone());
            let repeated_roots =
                probe.projective_roots_clustered(ROOT_SEPARATION_WARN).into_iter().filter(|r| r.multiplicity > 1).collect();
            certificate = Some(TangentCertificate { k, kernel, common_factor: None, repeated_roots });
        }
    }
    Err(Error::Numerical(format!("no decomposition within {FIT_TOL:e} using at most N = {n} terms")))
}

/// Symmetric tensor rank (least number of terms of an exact decomposition).
pub fn symmetric_rank<F: Field>(s: &SymState<F>) -> Result<usize> {
    classify(s).map(|r| r.symmetric_rank)
}

/// Waring decomposition with border-rank many terms; tangent states have
/// none.
pub fn waring_decomposition<F: Field>(s: &SymState<F>) -> Result<WaringDecomposition<F>> {
    let report = classify(s)?;
    match report.witness {
        Witness::Decomposition(d) => Ok(d),
        Witness::Tangent { .. } => Err(Error::Domain(format!(
            "no finite symmetric decomposition of size border_rank = {} ({})",
            report.border_rank, report.label
        ))),
    }
}

/// Classify many states; results in input order.
pub fn classify_batch<F: Field>(
    states: &[SymState<F>],
    opts: ClassifyOptions,
    exec: Execution,
) -> Vec<Result<ClassificationReport<F>>> {
    map_slice(exec, states, |s| classify_with(s, opts))
}

fn distinct_points<F: Field>(points: &[LocalVector<F>]) -> Result<()> {
    for (i, p) in points.iter().enumerate() {
        if p.dim() != 2 {
            return arg("secant constructions use qubit points");
        }
        if points[..i].iter().any(|q| q.projectively_equal(p, crate::states::COINCIDENT_TOL)) {
            return arg(format!("point {i} coincides with an earlier point"));
        }
    }
    Ok(())
}

/// `Σ_r λ_r ν_N(p_r)` for pairwise distinct points.
pub fn secant_combination<F: Field>(points: &[LocalVector<F>], weights: &[F], n: usize) -> Result<SymState<F>> {
    if points.len() != weights.len() || points.is_empty() {
        return arg("one weight per point is required");
    }
    distinct_points(points)?;
    let terms: Vec<Term<F>> = points
        .iter()
        .zip(weights)
        .filter(|(_, w)| !w.is_zero())
        .map(|(p, w)| Term { weight: w.clone(), vector: p.clone() })
        .collect();
    if terms.is_empty() {
        return Err(Error::Domain("all weights vanish".into()));
    }
    expand_decomposition(&DecomposedState::new(n, terms)?)
}

/// Affine point `p_0 + Σ_r λ_r (p_r − p_0)` with `p_r = ν_N(points[r])`.
pub fn secant_point<F: Field>(points: &[LocalVector<F>], affine: &[F], n: usize) -> Result<SymState<F>> {
    if points.len() != affine.len() + 1 {
        return arg("k points need k − 1 affine parameters");
    }
    let rest = affine.iter().fold(F::one(), |acc, l| acc - l.clone());
    let weights: Vec<F> = std::iter::once(rest).chain(affine.iter().cloned()).collect();
    secant_combination(points, &weights, n)
}

fn affine_chart<F: Field>(p0: &LocalVector<F>) -> Result<F> {
    if p0.dim() != 2 {
        return arg("tangent constructions use qubit points");
    }
    if p0.0[0].is_zero() {
        return arg("tangent point needs x0 ≠ 0; rotate p0 with an SLOCC operator first");
    }
    Ok(p0.0[1].clone() / p0.0[0].clone())
}

/// `p^t(p_0; λ)`: `c_m = z0^m + m λ z0^{m-1}` for `p_0 = [1 : z0]`.
pub fn tangent_point<F: Field>(p0: &LocalVector<F>, lambda: &F, n: usize) -> Result<SymState<F>> {
    let z0 = affine_chart(p0)?;
    let coeffs = (0..=n)
        .map(|m| {
            let tail = if m == 0 { F::zero() } else { F::from_u128(m as u128) * lambda.clone() * z0.powi(m - 1) };
            z0.powi(m) + tail
        })
        .collect();
    SymState::qubits(coeffs)
}

/// `p̃^t(p_0)`: `c_m = m z0^{m-1}`.
pub fn tangent_point_tilde<F: Field>(p0: &LocalVector<F>, n: usize) -> Result<SymState<F>> {
    let z0 = affine_chart(p0)?;
    let coeffs =
        (0..=n).map(|m| if m == 0 { F::zero() } else { F::from_u128(m as u128) * z0.powi(m - 1) }).collect();
    SymState::qubits(coeffs)
}

/// Type-1 tangent-plane point `p^t(p_0; λ) + μ (ν_N(p_2) − ν_N(p_0))`, with
/// `p_0` taken in the chart `[1 : z0]`.
pub fn tangent_plane_point<F: Field>(
    p0: &LocalVector<F>,
    p2: &LocalVector<F>,
    lambda: &F,
    mu: &F,
    n: usize,
) -> Result<SymState<F>> {
    let z0 = affine_chart(p0)?;
    distinct_points(&[p0.clone(), p2.clone()])?;
    let base = tangent_point(p0, lambda, n)?;
    let v0 = veronese_map(&LocalVector(vec![F::one(), z0]), n)?;
    let v2 = veronese_map(p2, n)?;
    let coeffs = (0..=n).map(|m| base.coeff(m).clone() + mu.clone() * (v2.coeff(m).clone() - v0.coeff(m).clone())).collect();
    SymState::qubits(coeffs)
}

/// Lift `Σ λ_r v_r^{⊗N}` to `Σ λ_r v_r^{⊗(N+1)}`.
pub fn nest<F: Field>(dec: &DecomposedState<F>) -> DecomposedState<F> {
    dec.with_parties(dec.parties() + 1)
}

/// Whether the power vectors `v_r^{⊗N}` of a decomposition are linearly
/// independent.
pub fn powers_independent<F: Field>(dec: &DecomposedState<F>) -> Result<bool> {
    let cols = dec.terms().iter().map(|t| veronese_map(&t.vector, dec.parties())).collect::<Result<Vec<_>>>()?;
    let rows = cols[0].coeffs().len();
    let m = Mat::from_fn(rows, cols.len(), |r, c| cols[c].coeff(r).clone());
    Ok(matrix_rank(&m, RankMode::natural::<F>())?.rank == cols.len())
}
