use crate::exterior::{AlmostComplex, ExteriorError};
use crate::fields::ScalarField;

/// Frobenius norm of N^k_ij = J^l_i ∂_l J^k_j − J^l_j ∂_l J^k_i − J^k_l (∂_i J^l_j − ∂_j J^l_i),
/// with J^a_b the matrix acting on vectors.
pub fn nijenhuis_norm_at(j: &AlmostComplex, x: &[f64]) -> Result<f64, ExteriorError> {
    j.check_at(x)?;
    let m = j.eval_at(x, 1)?;
    let n = m.n;
    let jv = |a: usize, b: usize| m.get(a, b).value;
    let dj = |l: usize, a: usize, b: usize| m.get(a, b).d(l);
    let mut sum = 0.0;
    for k in 0..n {
        for i in 0..n {
            for jj in (i + 1)..n {
                let mut v = 0.0;
                for l in 0..n {
                    v += jv(l, i) * dj(l, k, jj) - jv(l, jj) * dj(l, k, i);
                    v -= jv(k, l) * (dj(i, l, jj) - dj(jj, l, i));
                }
                sum += 2.0 * v * v;
            }
        }
    }
    Ok(sum.sqrt())
}

/// Pointwise Nijenhuis norm as a scalar field (value only).
pub fn nijenhuis_residual(j: &AlmostComplex) -> ScalarField {
    let j = j.clone();
    ScalarField::custom(&j.chart().clone(), move |x, _| {
        nijenhuis_norm_at(&j, x)
            .map(crate::fields::Jet2::constant)
            .map_err(|e| crate::fields::FieldError::Other(e.to_string()))
    })
}
