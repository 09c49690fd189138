use super::{eigendecompose, HermitianMatrix};
use crate::error::{Error, Result};
use crate::functions::FunctionDescriptor;

/// Eigenvalues this close (relative to `‖A‖_F`) to a closed domain endpoint
/// are snapped onto it before the function is evaluated.
pub const DOMAIN_CLAMP_TOL: f64 = 1e-12;

/// Continuous functional calculus `f(A) = V · diag(f(λ)) · V*`.
///
/// Every eigenvalue must lie in the declared domain of `f`, up to the
/// boundary clamp described by [`DOMAIN_CLAMP_TOL`].
pub fn apply_scalar_function(a: &HermitianMatrix, f: &FunctionDescriptor) -> Result<HermitianMatrix> {
    let eig = eigendecompose(a)?;
    let slack = DOMAIN_CLAMP_TOL * a.frobenius_norm();
    let mut values = Vec::with_capacity(eig.eigenvalues.len());
    for &lambda in &eig.eigenvalues {
        let admitted = f.domain().admit(lambda, slack).ok_or_else(|| Error::DomainViolation {
            function: f.id().to_string(),
            value: lambda,
            domain: f.domain().to_string(),
        })?;
        let value = f.eval(admitted);
        if !value.is_finite() {
            return Err(Error::DomainViolation {
                function: f.id().to_string(),
                value: lambda,
                domain: f.domain().to_string(),
            });
        }
        values.push(value);
    }
    Ok(HermitianMatrix::from_spectral(&values, &eig.vectors))
}

/// Functional calculus for an arbitrary closure, without domain checks.
pub fn apply_fn(a: &HermitianMatrix, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    let eig = eigendecompose(a)?;
    let values: Vec<f64> = eig.eigenvalues.iter().map(|&l| f(l)).collect();
    Ok(HermitianMatrix::from_spectral(&values, &eig.vectors))
}

/// `t ↦ max(t, 0)` applied by functional calculus.
pub fn positive_part(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    apply_fn(a, |t| t.max(0.0))
}

/// `(λ_min, λ_max)`.
pub fn spectral_bounds(a: &HermitianMatrix) -> Result<(f64, f64)> {
    let eig = eigendecompose(a)?;
    Ok((eig.min(), eig.max()))
}
