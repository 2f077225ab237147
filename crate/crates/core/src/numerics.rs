//! Small dense complex linear algebra: states, Born probabilities, the
//! largest eigenpair of a Hermitian operator and orthonormal completion.
//!
//! Everything here targets dimensions up to 8, so plain `Vec`s and
//! O(n^3) sweeps are fine.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used when checking that constructed vectors are orthogonal.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;
/// Tolerance on `|<a|b>|` for vectors that come from rounded, printed data.
pub const PRINTED_ORTHOGONALITY_TOL: f64 = 1e-2;
/// A vector counts as normalized if its norm is within this of 1.
pub const NORM_TOL: f64 = 1e-9;
/// Hermiticity tolerance, entrywise.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("operator is not Hermitian (deviation {0:e} at ({1},{2}))")]
    NotHermitian(f64, usize, usize),
    #[error("vectors {0} and {1} are not orthogonal (|<a|b>| = {2:e})")]
    NotOrthogonal(usize, usize, f64),
    #[error("cannot normalize a zero vector")]
    ZeroVector,
    #[error("non-finite amplitude")]
    NonFinite,
    #[error("dimension must be positive and at most {max}, got {got}")]
    BadDimension { got: usize, max: usize },
    #[error("{0} vectors already fill dimension {1}")]
    NothingToComplete(usize, usize),
}

/// A pure state (or rank-1 event direction) as a list of complex amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wraps the amplitudes as given, without normalizing.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, NumericsError> {
        if amps.is_empty() {
            return Err(NumericsError::BadDimension {
                got: 0,
                max: usize::MAX,
            });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(NumericsError::NonFinite);
        }
        Ok(Self { amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self, NumericsError> {
        Self::from_amplitudes(amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Builds the vector and rescales it to unit norm.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self, NumericsError> {
        Self::from_amplitudes(amps)?.normalize()
    }

    /// The standard basis vector `|index>` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(
            index < dim,
            "basis index {index} out of range for dim {dim}"
        );
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(self) -> Result<Self, NumericsError> {
        let n = self.norm();
        if n == 0.0 {
            return Err(NumericsError::ZeroVector);
        }
        Ok(Self {
            amps: self.amps.into_iter().map(|a| a / n).collect(),
        })
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOL
    }

    /// Tensor product `self ⊗ other`, first factor most significant.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        StateVector { amps }
    }

    pub fn scale(&self, factor: Complex64) -> StateVector {
        StateVector {
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    fn check_unit(&self) -> Result<(), NumericsError> {
        let n = self.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(NumericsError::NotNormalized(n));
        }
        Ok(())
    }
}

/// `<a|b>`, conjugate-linear in `a`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64, NumericsError> {
    if a.dim() != b.dim() {
        return Err(NumericsError::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// Born probability `|<event|state>|^2`.
pub fn probability(state: &StateVector, event: &StateVector) -> Result<f64, NumericsError> {
    if state.dim() != event.dim() {
        return Err(NumericsError::DimensionMismatch(state.dim(), event.dim()));
    }
    state.check_unit()?;
    event.check_unit()?;
    Ok(inner_product(event, state)?.norm_sqr())
}

/// Fidelity between pure states, `|<a|b>|^2`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64, NumericsError> {
    Ok(inner_product(a, b)?.norm_sqr())
}

/// Dense Hermitian operator stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianOperator {
    /// Largest dimension `max_eigenpair` accepts.
    pub const MAX_DIM: usize = 8;

    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self, NumericsError> {
        if dim == 0 {
            return Err(NumericsError::BadDimension {
                got: dim,
                max: Self::MAX_DIM,
            });
        }
        if entries.len() != dim * dim {
            return Err(NumericsError::DimensionMismatch(entries.len(), dim * dim));
        }
        if entries
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(NumericsError::NonFinite);
        }
        for i in 0..dim {
            for j in i..dim {
                let dev = (entries[i * dim + j] - entries[j * dim + i].conj()).norm();
                if dev > HERMITIAN_TOL {
                    return Err(NumericsError::NotHermitian(dev, i, j));
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, entries }
    }

    /// `Σ |v><v|` over the given vectors.
    pub fn sum_of_projectors<'a, I>(dim: usize, vectors: I) -> Result<Self, NumericsError>
    where
        I: IntoIterator<Item = &'a StateVector>,
    {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for v in vectors {
            if v.dim() != dim {
                return Err(NumericsError::DimensionMismatch(v.dim(), dim));
            }
            for i in 0..dim {
                for j in 0..dim {
                    entries[i * dim + j] += v.amps[i] * v.amps[j].conj();
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector, NumericsError> {
        if v.dim() != self.dim {
            return Err(NumericsError::DimensionMismatch(v.dim(), self.dim));
        }
        let amps = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.entry(i, j) * v.amps[j]).sum())
            .collect();
        Ok(StateVector { amps })
    }

    /// `<v|op|v>`; real for Hermitian operators.
    pub fn expectation(&self, v: &StateVector) -> Result<f64, NumericsError> {
        Ok(inner_product(v, &self.apply(v)?)?.re)
    }
}

/// Largest eigenvalue and a unit eigenvector of a Hermitian operator.
///
/// The operator `A + iB` is embedded as the real symmetric matrix
/// `[[A, -B], [B, A]]`, whose spectrum is that of the original with every
/// eigenvalue doubled. A cyclic Jacobi sweep diagonalizes the embedding; an
/// eigenvector `(x, y)` maps back to `x + iy`.
pub fn max_eigenpair(op: &HermitianOperator) -> Result<(f64, StateVector), NumericsError> {
    let n = op.dim;
    if n > HermitianOperator::MAX_DIM {
        return Err(NumericsError::BadDimension {
            got: n,
            max: HermitianOperator::MAX_DIM,
        });
    }
    for i in 0..n {
        for j in i..n {
            let dev = (op.entry(i, j) - op.entry(j, i).conj()).norm();
            if dev > HERMITIAN_TOL {
                return Err(NumericsError::NotHermitian(dev, i, j));
            }
        }
    }

    let m = 2 * n;
    let mut a = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = op.entry(i, j);
            a[i * m + j] = z.re;
            a[(i + n) * m + (j + n)] = z.re;
            a[i * m + (j + n)] = -z.im;
            a[(i + n) * m + j] = z.im;
        }
    }
    let (eigenvalues, eigenvectors) = jacobi_symmetric(a, m);

    let top = (0..m)
        .max_by(|&p, &q| eigenvalues[p].total_cmp(&eigenvalues[q]))
        .expect("non-empty spectrum");
    let amps: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(eigenvectors[i * m + top], eigenvectors[(i + n) * m + top]))
        .collect();
    let mut v = StateVector::normalized(amps)?;

    // Fix the global phase so the largest-magnitude amplitude is real positive.
    let pivot = v
        .amps
        .iter()
        .copied()
        .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
        .expect("non-empty");
    v = v.scale(pivot.conj() / pivot.norm());

    Ok((eigenvalues[top], v))
}

/// Cyclic Jacobi eigenvalue iteration for a real symmetric `m x m` matrix.
/// Returns the eigenvalues and the eigenvector matrix (columns, row-major).
fn jacobi_symmetric(mut a: Vec<f64>, m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; m * m];
    for i in 0..m {
        v[i * m + i] = 1.0;
    }
    let scale: f64 = a
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * m + j] * a[i * m + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
                for k in 0..m {
                    let vkp = v[k * m + p];
                    let vkq = v[k * m + q];
                    v[k * m + p] = c * vkp - s * vkq;
                    v[k * m + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let eigenvalues = (0..m).map(|i| a[i * m + i]).collect();
    (eigenvalues, v)
}

/// Completes a set of pairwise orthogonal unit vectors to an orthonormal
/// basis.
///
/// Standard basis vectors are tried in index order; each one is
/// orthogonalized (two Gram-Schmidt passes) against everything kept so far
/// and kept if a non-negligible residual remains.
pub fn orthonormal_complement(vectors: &[StateVector]) -> Result<Vec<StateVector>, NumericsError> {
    let Some(first) = vectors.first() else {
        return Err(NumericsError::BadDimension {
            got: 0,
            max: HermitianOperator::MAX_DIM,
        });
    };
    let dim = first.dim();
    for v in vectors {
        if v.dim() != dim {
            return Err(NumericsError::DimensionMismatch(v.dim(), dim));
        }
        v.check_unit()?;
    }
    if vectors.len() >= dim {
        return Err(NumericsError::NothingToComplete(vectors.len(), dim));
    }
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate().skip(i + 1) {
            let overlap = inner_product(a, b)?.norm();
            if overlap > ORTHOGONALITY_TOL {
                return Err(NumericsError::NotOrthogonal(i, j, overlap));
            }
        }
    }

    let mut kept: Vec<StateVector> = vectors.to_vec();
    let mut added = Vec::with_capacity(dim - vectors.len());
    for k in 0..dim {
        if kept.len() == dim {
            break;
        }
        let mut r = StateVector::basis(dim, k);
        for _ in 0..2 {
            for q in &kept {
                let c = inner_product(q, &r)?;
                for (ri, qi) in r.amps.iter_mut().zip(&q.amps) {
                    *ri -= c * qi;
                }
            }
        }
        // Residuals of the standard basis against a proper subspace are
        // either ~0 (inside the span) or bounded well away from it.
        if r.norm() > 1e-6 {
            let r = r.normalize()?;
            kept.push(r.clone());
            added.push(r);
        }
    }
    Ok(added)
}

/// `max_{i,j} |<b_i|b_j> - δ_ij|` over a list of vectors.
pub fn gram_deviation(vectors: &[StateVector]) -> Result<f64, NumericsError> {
    let mut worst: f64 = 0.0;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((inner_product(a, b)? - Complex64::new(target, 0.0)).norm());
        }
    }
    Ok(worst)
}
