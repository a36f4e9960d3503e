//! Truncated bosonic Hilbert-space linear algebra.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! * the vibrational mode lives on the first `n` Fock states `|0⟩ … |n−1⟩`;
//! * the atom basis is ordered `{|g⟩, |e⟩}`, so `σ̂_z = diag(−1, +1)`;
//! * composite operators are `atom ⊗ vibration` with the atom as the slow
//!   index: composite index `= a·n + m` for atom level `a` and Fock level `m`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::{tol, Error, Result};

/// Which Hilbert space a matrix or vector lives on.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Space {
    /// Truncated vibrational mode with `n` Fock levels.
    Vibrational(usize),
    /// The two-level atom, basis `{|g⟩, |e⟩}`.
    Atom,
    /// `atom ⊗ vibration`, total dimension `2n`.
    Composite(usize),
}

impl Space {
    pub fn dim(self) -> usize {
        match self {
            Space::Vibrational(n) => n,
            Space::Atom => 2,
            Space::Composite(n) => 2 * n,
        }
    }

    /// Number of Fock levels carried by this space (`None` for the bare atom).
    pub fn vib_dim(self) -> Option<usize> {
        match self {
            Space::Vibrational(n) | Space::Composite(n) => Some(n),
            Space::Atom => None,
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Vibrational(n) => write!(f, "vibrational({n})"),
            Space::Atom => write!(f, "atom(2)"),
            Space::Composite(n) => write!(f, "composite(2×{n})"),
        }
    }
}

fn check_vib_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    Ok(())
}

/// Dense complex operator tagged with its space and structural flags.
///
/// The flags are assertions: a Hermitian-flagged operator satisfies
/// `M = M†` entrywise within [`tol::HERMITIAN_ATOL`], a unitary-flagged one
/// satisfies `‖U†U − I‖_max ≤` [`tol::UNITARY_TOL`]. Constructors that set a
/// flag either validate it or build the matrix so the property holds exactly.
#[derive(Clone, Debug)]
pub struct Operator {
    space: Space,
    mat: DMatrix<C64>,
    hermitian: bool,
    unitary: bool,
}

impl Operator {
    /// Wrap a matrix with no structural claims.
    pub fn new(space: Space, mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != space.dim() || mat.ncols() != space.dim() {
            return Err(Error::DimensionMismatch(mat.nrows(), space.dim()));
        }
        Ok(Self { space, mat, hermitian: false, unitary: false })
    }

    /// Wrap a matrix and validate Hermiticity before flagging it.
    pub fn hermitian(space: Space, mat: DMatrix<C64>) -> Result<Self> {
        let mut op = Self::new(space, mat)?;
        let dev = op.hermitian_deviation();
        if dev > tol::HERMITIAN_ATOL {
            return Err(Error::NotHermitian(dev));
        }
        op.hermitian = true;
        Ok(op)
    }

    /// Wrap a matrix and validate unitarity before flagging it.
    pub fn unitary(space: Space, mat: DMatrix<C64>) -> Result<Self> {
        let mut op = Self::new(space, mat)?;
        let dev = op.unitary_deviation();
        if dev > tol::UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        op.unitary = true;
        Ok(op)
    }

    /// Internal constructor for matrices whose flags hold by construction.
    pub(crate) fn flagged(space: Space, mat: DMatrix<C64>, hermitian: bool, unitary: bool) -> Self {
        debug_assert_eq!(mat.nrows(), space.dim());
        debug_assert_eq!(mat.ncols(), space.dim());
        Self { space, mat, hermitian, unitary }
    }

    pub fn identity(space: Space) -> Self {
        Self::flagged(space, DMatrix::identity(space.dim(), space.dim()), true, true)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn is_hermitian_flagged(&self) -> bool {
        self.hermitian
    }

    pub fn is_unitary_flagged(&self) -> bool {
        self.unitary
    }

    /// Conjugate transpose, with flags carried over.
    pub fn dagger(&self) -> Operator {
        Self::flagged(self.space, self.mat.adjoint(), self.hermitian, self.unitary)
    }

    /// Max entrywise deviation from `M = M†`.
    pub fn hermitian_deviation(&self) -> f64 {
        let adj = self.mat.adjoint();
        (&self.mat - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max entrywise deviation of `U†U` from the identity.
    pub fn unitary_deviation(&self) -> f64 {
        let n = self.dim();
        let prod = self.mat.adjoint() * &self.mat;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                dev = dev.max((prod[(i, j)] - expect).norm());
            }
        }
        dev
    }
}

/// Max entrywise modulus of the difference of two same-space operators.
pub fn max_norm_diff(a: &Operator, b: &Operator) -> Result<f64> {
    if a.space() != b.space() {
        return Err(Error::SpaceMismatch { expected: a.space(), got: b.space() });
    }
    Ok((a.matrix() - b.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

// ---------------------------------------------------------------------------
// ladder operators and friends
// ---------------------------------------------------------------------------

/// Annihilation operator `â` with `⟨m|â|n⟩ = √n δ_{m,n−1}`.
pub fn annihilation(n: usize) -> Result<Operator> {
    check_vib_dim(n)?;
    let mut m = DMatrix::<C64>::zeros(n, n);
    for k in 1..n {
        m[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    Ok(Operator::flagged(Space::Vibrational(n), m, false, false))
}

/// Creation operator `â† = â^T` (real matrix, so transpose = adjoint).
pub fn creation(n: usize) -> Result<Operator> {
    Ok(annihilation(n)?.dagger())
}

/// Number operator `n̂ = â†â`, diagonal.
pub fn number(n: usize) -> Result<Operator> {
    check_vib_dim(n)?;
    let mut m = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = C64::new(k as f64, 0.0);
    }
    Ok(Operator::flagged(Space::Vibrational(n), m, true, false))
}

/// Rotated quadrature `X̂_θ = â e^{−iθ} + â† e^{iθ}`; Hermitian by symmetry.
pub fn quadrature(n: usize, theta: f64) -> Result<Operator> {
    check_vib_dim(n)?;
    let phase = C64::from_polar(1.0, theta);
    let mut m = DMatrix::<C64>::zeros(n, n);
    for k in 1..n {
        let s = (k as f64).sqrt();
        m[(k - 1, k)] = phase.conj() * s;
        m[(k, k - 1)] = phase * s;
    }
    Ok(Operator::flagged(Space::Vibrational(n), m, true, false))
}

/// Position operator `X̂ = â + â†` (the θ = 0 quadrature).
pub fn position(n: usize) -> Result<Operator> {
    quadrature(n, 0.0)
}

/// Displacement operator `D(α) = exp(α â† − α* â)`.
///
/// The anti-Hermitian generator is exponentiated through [`herm_exp`]:
/// `exp(G) = exp(i·(−iG))` with `−iG` Hermitian, so the result is unitary on
/// the truncated space to eigensolver accuracy. Matrix elements differ from
/// their infinite-dimensional values near the truncation edge once
/// `|α|² + |α|√n` approaches `n`; callers watch that through
/// [`TruncationReport`]s on the states they produce.
pub fn displacement(n: usize, alpha: C64) -> Result<Operator> {
    check_vib_dim(n)?;
    // −i(α â† − α* â), Hermitian by construction.
    let mut m = DMatrix::<C64>::zeros(n, n);
    let i = C64::i();
    for k in 1..n {
        let s = (k as f64).sqrt();
        m[(k, k - 1)] = -i * alpha * s;
        m[(k - 1, k)] = i * alpha.conj() * s;
    }
    let gen = Operator::flagged(Space::Vibrational(n), m, true, false);
    herm_exp(&gen, C64::i())
}

/// Matrix exponential `exp(sM)` of a Hermitian-flagged `M` through its
/// eigendecomposition (tridiagonalization + QL-type iteration).
///
/// For purely imaginary `s` the result is unitary-flagged; for purely real
/// `s` it is Hermitian-flagged.
pub fn herm_exp(m: &Operator, s: C64) -> Result<Operator> {
    if !m.is_hermitian_flagged() {
        return Err(Error::NotHermitian(m.hermitian_deviation()));
    }
    let eig = m.matrix().clone().symmetric_eigen();
    let n = m.dim();
    // V · diag(e^{sλ}) · V†
    let mut scaled = eig.eigenvectors.clone();
    for (j, lam) in eig.eigenvalues.iter().enumerate() {
        let f = (s * *lam).exp();
        for i in 0..n {
            scaled[(i, j)] *= f;
        }
    }
    let out = scaled * eig.eigenvectors.adjoint();
    let hermitian = s.im == 0.0;
    let unitary = s.re == 0.0;
    Ok(Operator::flagged(m.space(), out, hermitian, unitary))
}

/// Kronecker product `atom ⊗ vibration` (atom as the slow index).
pub fn tensor(a: &Operator, v: &Operator) -> Result<Operator> {
    if a.space() != Space::Atom {
        return Err(Error::SpaceMismatch { expected: Space::Atom, got: a.space() });
    }
    let n = match v.space() {
        Space::Vibrational(n) => n,
        other => {
            return Err(Error::SpaceMismatch { expected: Space::Vibrational(0), got: other })
        }
    };
    let mat = a.matrix().kronecker(v.matrix());
    Ok(Operator::flagged(
        Space::Composite(n),
        mat,
        a.is_hermitian_flagged() && v.is_hermitian_flagged(),
        a.is_unitary_flagged() && v.is_unitary_flagged(),
    ))
}

// ---------------------------------------------------------------------------
// atom operators, basis {|g⟩, |e⟩}
// ---------------------------------------------------------------------------

pub fn atom_identity() -> Operator {
    Operator::identity(Space::Atom)
}

/// `σ̂_z = |e⟩⟨e| − |g⟩⟨g| = diag(−1, +1)`.
pub fn sigma_z() -> Operator {
    let mut m = DMatrix::<C64>::zeros(2, 2);
    m[(0, 0)] = C64::new(-1.0, 0.0);
    m[(1, 1)] = C64::new(1.0, 0.0);
    Operator::flagged(Space::Atom, m, true, true)
}

/// `σ̂_x = σ̂_+ + σ̂_−`.
pub fn sigma_x() -> Operator {
    let mut m = DMatrix::<C64>::zeros(2, 2);
    m[(0, 1)] = C64::new(1.0, 0.0);
    m[(1, 0)] = C64::new(1.0, 0.0);
    Operator::flagged(Space::Atom, m, true, true)
}

/// Raising operator `σ̂_+ = |e⟩⟨g|`.
pub fn sigma_plus() -> Operator {
    let mut m = DMatrix::<C64>::zeros(2, 2);
    m[(1, 0)] = C64::new(1.0, 0.0);
    Operator::flagged(Space::Atom, m, false, false)
}

/// Lowering operator `σ̂_− = |g⟩⟨e|`.
pub fn sigma_minus() -> Operator {
    let mut m = DMatrix::<C64>::zeros(2, 2);
    m[(0, 1)] = C64::new(1.0, 0.0);
    Operator::flagged(Space::Atom, m, false, false)
}

// ---------------------------------------------------------------------------
// states
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub enum StateData {
    Pure(DVector<C64>),
    Density(DMatrix<C64>),
}

/// Pure state vector or density matrix on one of the three spaces.
#[derive(Clone, Debug)]
pub struct IonState {
    space: Space,
    data: StateData,
}

impl IonState {
    /// Wrap an already-normalized state vector (`‖ψ‖ = 1` within
    /// [`tol::STATE_NORM_TOL`]).
    pub fn pure(space: Space, v: DVector<C64>) -> Result<Self> {
        if v.len() != space.dim() {
            return Err(Error::DimensionMismatch(v.len(), space.dim()));
        }
        let norm = v.norm();
        if (norm - 1.0).abs() > tol::STATE_NORM_TOL {
            return Err(Error::InvalidState(format!("pure state has norm {norm}")));
        }
        Ok(Self { space, data: StateData::Pure(v) })
    }

    /// Normalize a nonzero vector and wrap it.
    pub fn pure_normalized(space: Space, mut v: DVector<C64>) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("cannot normalize the zero vector".into()));
        }
        v /= C64::new(norm, 0.0);
        Self::pure(space, v)
    }

    /// Wrap a density matrix, validating Hermiticity, unit trace and
    /// positivity (eigenvalues ≥ [`tol::EIG_FLOOR`]).
    pub fn density(space: Space, m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != space.dim() || m.ncols() != space.dim() {
            return Err(Error::DimensionMismatch(m.nrows(), space.dim()));
        }
        let herm_dev =
            (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_dev > tol::HERMITIAN_ATOL {
            return Err(Error::InvalidState(format!(
                "density matrix not Hermitian: deviation {herm_dev:.3e}"
            )));
        }
        let trace = m.trace();
        if (trace.re - 1.0).abs() > tol::TRACE_TOL || trace.im.abs() > tol::TRACE_TOL {
            return Err(Error::InvalidState(format!("density matrix has trace {trace}")));
        }
        let min_eig = m
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < tol::EIG_FLOOR {
            return Err(Error::InvalidState(format!(
                "density matrix has eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { space, data: StateData::Density(m) })
    }

    /// Wrap a density matrix whose invariants are guaranteed by the caller.
    pub(crate) fn density_unchecked(space: Space, m: DMatrix<C64>) -> Self {
        Self { space, data: StateData::Density(m) }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    pub fn data(&self) -> &StateData {
        &self.data
    }

    pub fn pure_vector(&self) -> Option<&DVector<C64>> {
        match &self.data {
            StateData::Pure(v) => Some(v),
            StateData::Density(_) => None,
        }
    }

    /// Density-matrix form (`|ψ⟩⟨ψ|` for pure inputs).
    pub fn to_density(&self) -> DMatrix<C64> {
        match &self.data {
            StateData::Pure(v) => v * v.adjoint(),
            StateData::Density(m) => m.clone(),
        }
    }

    /// `⟨O⟩ = Tr(Oρ)` (or `⟨ψ|O|ψ⟩`).
    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        if op.space() != self.space {
            return Err(Error::SpaceMismatch { expected: self.space, got: op.space() });
        }
        Ok(match &self.data {
            StateData::Pure(v) => v.dotc(&(op.matrix() * v)),
            StateData::Density(m) => trace_product(op.matrix(), m),
        })
    }

    /// Populations of the Fock levels; on the composite space the atom is
    /// summed over.
    pub fn fock_populations(&self) -> Vec<f64> {
        let diag: Vec<f64> = match &self.data {
            StateData::Pure(v) => v.iter().map(|z| z.norm_sqr()).collect(),
            StateData::Density(m) => (0..m.nrows()).map(|i| m[(i, i)].re).collect(),
        };
        match self.space {
            Space::Vibrational(_) | Space::Atom => diag,
            Space::Composite(n) => (0..n).map(|m| diag[m] + diag[n + m]).collect(),
        }
    }

    /// Truncation diagnostics with the given leakage tolerance.
    pub fn truncation_report(&self, tolerance: f64) -> TruncationReport {
        TruncationReport::evaluate(self, tolerance)
    }
}

/// `Tr(AB)` without forming the product matrix.
pub(crate) fn trace_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Fock number state `|k⟩` on an `n`-level space.
pub fn fock_state(n: usize, k: usize) -> Result<IonState> {
    check_vib_dim(n)?;
    if k >= n {
        return Err(Error::InvalidDimension(k));
    }
    let mut v = DVector::<C64>::zeros(n);
    v[k] = C64::new(1.0, 0.0);
    IonState::pure(Space::Vibrational(n), v)
}

/// Vacuum state `|0⟩`.
pub fn vacuum_state(n: usize) -> Result<IonState> {
    fock_state(n, 0)
}

/// Truncated coherent state with amplitudes `c_k = e^{−|α|²/2} α^k/√k!`,
/// renormalized after truncation. The report carries the pre-normalization
/// truncation diagnostics so the cut is observable.
pub fn coherent_state(n: usize, alpha: C64) -> Result<(IonState, TruncationReport)> {
    check_vib_dim(n)?;
    let mut v = DVector::<C64>::zeros(n);
    v[0] = C64::new(1.0, 0.0);
    for k in 1..n {
        v[k] = v[k - 1] * alpha / C64::new((k as f64).sqrt(), 0.0);
    }
    v *= C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    let top = v[n - 1].norm_sqr() + v[n - 2].norm_sqr();
    let report = TruncationReport::new(n, top, tol::LEAKAGE_TOL);
    let state = IonState::pure_normalized(Space::Vibrational(n), v)?;
    Ok((state, report))
}

/// Trace out the two-level atom from a composite state.
///
/// Pure inputs are promoted to density matrices first. With the fixed
/// ordering the reduced matrix is `ρ_v[m,n] = ρ[m,n] + ρ[N+m, N+n]`.
pub fn partial_trace_atom(state: &IonState) -> Result<IonState> {
    let n = match state.space() {
        Space::Composite(n) => n,
        other => return Err(Error::SpaceMismatch { expected: Space::Composite(0), got: other }),
    };
    let rho = state.to_density();
    let mut out = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = rho[(i, j)] + rho[(n + i, n + j)];
        }
    }
    IonState::density(Space::Vibrational(n), out)
}

/// Truncation diagnostics: population sitting in the two highest Fock levels.
#[derive(Copy, Clone, Debug)]
pub struct TruncationReport {
    pub dim_used: usize,
    pub top_level_population: f64,
    pub leakage_flag: bool,
}

impl TruncationReport {
    pub fn new(dim_used: usize, top_level_population: f64, tolerance: f64) -> Self {
        Self { dim_used, top_level_population, leakage_flag: top_level_population > tolerance }
    }

    pub fn evaluate(state: &IonState, tolerance: f64) -> Self {
        let pops = state.fock_populations();
        let n = pops.len();
        let top = if n >= 2 { pops[n - 1] + pops[n - 2] } else { pops.iter().sum() };
        Self::new(n, top, tolerance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annihilation_small_matrices() {
        let a = annihilation(2).unwrap();
        assert_eq!(a.matrix()[(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(a.matrix()[(0, 0)], C64::new(0.0, 0.0));
        assert_eq!(a.matrix()[(1, 0)], C64::new(0.0, 0.0));
        assert_eq!(a.matrix()[(1, 1)], C64::new(0.0, 0.0));

        let a3 = annihilation(3).unwrap();
        assert!((a3.matrix()[(1, 2)].re - 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dimension_guard() {
        assert!(matches!(annihilation(1), Err(Error::InvalidDimension(1))));
        assert!(matches!(quadrature(0, 0.3), Err(Error::InvalidDimension(0))));
    }

    #[test]
    fn herm_exp_rejects_unflagged() {
        let a = annihilation(4).unwrap();
        assert!(matches!(herm_exp(&a, C64::i()), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn herm_exp_zero_scalar_is_identity() {
        let m = number(5).unwrap();
        let e = herm_exp(&m, C64::new(0.0, 0.0)).unwrap();
        let dev = max_norm_diff(&e, &Operator::identity(Space::Vibrational(5))).unwrap();
        assert!(dev < 1e-14);
    }

    #[test]
    fn herm_exp_diagonal_example() {
        // diag(1, −1) with s = iπ gives diag(e^{iπ}, e^{−iπ}) = −I.
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 0)] = C64::new(1.0, 0.0);
        m[(1, 1)] = C64::new(-1.0, 0.0);
        let op = Operator::hermitian(Space::Atom, m).unwrap();
        let e = herm_exp(&op, C64::new(0.0, std::f64::consts::PI)).unwrap();
        assert!((e.matrix()[(0, 0)] + C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((e.matrix()[(1, 1)] + C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(e.is_unitary_flagged());
    }

    #[test]
    fn tensor_space_checks() {
        let n = number(4).unwrap();
        assert!(tensor(&n, &n).is_err());
        let t = tensor(&sigma_z(), &n).unwrap();
        assert_eq!(t.space(), Space::Composite(4));
        // σ_z ⊗ n̂: g-block is −n̂, e-block +n̂.
        assert_eq!(t.matrix()[(2, 2)], C64::new(-2.0, 0.0));
        assert_eq!(t.matrix()[(6, 6)], C64::new(2.0, 0.0));
    }

    #[test]
    fn coherent_vacuum_limit() {
        let (s, rep) = coherent_state(8, C64::new(0.0, 0.0)).unwrap();
        let v = s.pure_vector().unwrap();
        assert!((v[0].re - 1.0).abs() < 1e-15);
        assert!(!rep.leakage_flag);
    }

    #[test]
    fn partial_trace_space_guard() {
        let s = fock_state(4, 1).unwrap();
        assert!(partial_trace_atom(&s).is_err());
    }

    #[test]
    fn fock_population_sums() {
        let (s, _) = coherent_state(32, C64::new(0.8, 0.2)).unwrap();
        let total: f64 = s.fock_populations().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
