//! Extreme eigenvalues of Hermitian matrices: a dense solver for moderate
//! sizes and Lanczos with full reorthogonalization for large ones.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fixed seed for Lanczos and power-iteration start vectors, so repeated runs
/// are bitwise reproducible.
pub const START_VECTOR_SEED: u64 = 0x5eed_1a2c;

pub fn random_unit_vector(n: usize, seed: u64) -> DVector<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = DVector::from_fn(n, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// (min, max) eigenvalue of the Hermitian part `(T + T*)/2`.
pub fn dense_extreme_eigenvalues(t: &DMatrix<Complex64>) -> (f64, f64) {
    let h = hermitian_part(t);
    let ev = h.symmetric_eigenvalues();
    let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

pub fn hermitian_part(t: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = t.nrows();
    DMatrix::from_fn(n, n, |i, j| (t[(i, j)] + t[(j, i)].conj()) * 0.5)
}

/// Outcome of a Lanczos run: extreme Ritz values and their residual norms.
#[derive(Clone, Copy, Debug)]
pub struct LanczosEdges {
    pub min: f64,
    pub max: f64,
    pub residual_min: f64,
    pub residual_max: f64,
    pub iterations: usize,
}

/// Lanczos with full reorthogonalization for the extreme eigenvalues of a
/// Hermitian operator given by its action `apply`. Stops when both extreme
/// Ritz pairs have residual `‖Tv − λv‖ ≤ rel_tol · max|λ|`.
pub fn lanczos_extremes(
    n: usize,
    apply: impl Fn(&DVector<Complex64>) -> DVector<Complex64>,
    rel_tol: f64,
    max_iter: usize,
) -> LanczosEdges {
    let max_iter = max_iter.min(n).max(1);
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(max_iter);
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut q = random_unit_vector(n, START_VECTOR_SEED);
    let mut restart_seed = START_VECTOR_SEED;
    let mut last = LanczosEdges { min: 0.0, max: 0.0, residual_min: f64::INFINITY, residual_max: f64::INFINITY, iterations: 0 };
    for it in 0..max_iter {
        basis.push(q.clone());
        let mut w = apply(&q);
        let a = q.dotc(&w).re;
        alpha.push(a);
        // full reorthogonalization, twice for stability
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&w);
                w -= b * c;
            }
        }
        let bnorm = w.norm();
        let m = alpha.len();
        if m.is_multiple_of(5) || m == max_iter || bnorm == 0.0 {
            last = ritz_extremes(&alpha, &beta, bnorm);
            last.iterations = it + 1;
            let scale = last.min.abs().max(last.max.abs()).max(f64::MIN_POSITIVE);
            if last.residual_min <= rel_tol * scale && last.residual_max <= rel_tol * scale {
                return last;
            }
        }
        if it + 1 == max_iter {
            break;
        }
        if bnorm <= 1e-14 * alpha.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1e-300) {
            // invariant subspace: continue with a fresh direction orthogonal to the basis
            restart_seed = restart_seed.wrapping_add(1);
            let mut r = random_unit_vector(n, restart_seed);
            for _ in 0..2 {
                for b in &basis {
                    let c = b.dotc(&r);
                    r -= b * c;
                }
            }
            let rn = r.norm();
            if rn == 0.0 {
                break;
            }
            beta.push(0.0);
            q = r / Complex64::new(rn, 0.0);
        } else {
            beta.push(bnorm);
            q = w / Complex64::new(bnorm, 0.0);
        }
    }
    if last.iterations == 0 {
        last = ritz_extremes(&alpha, &beta, 0.0);
        last.iterations = alpha.len();
    }
    last
}

fn ritz_extremes(alpha: &[f64], beta: &[f64], next_beta: f64) -> LanczosEdges {
    let m = alpha.len();
    let tri = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(tri);
    let (mut imin, mut imax) = (0, 0);
    for i in 0..m {
        if eig.eigenvalues[i] < eig.eigenvalues[imin] {
            imin = i;
        }
        if eig.eigenvalues[i] > eig.eigenvalues[imax] {
            imax = i;
        }
    }
    LanczosEdges {
        min: eig.eigenvalues[imin],
        max: eig.eigenvalues[imax],
        residual_min: (next_beta * eig.eigenvectors[(m - 1, imin)]).abs(),
        residual_max: (next_beta * eig.eigenvectors[(m - 1, imax)]).abs(),
        iterations: m,
    }
}

/// Random Hermitian matrix with entries of unit scale.
pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let m = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0));
    hermitian_part(&m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lanczos_matches_dense_on_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_hermitian(120, &mut rng);
        let (lo, hi) = dense_extreme_eigenvalues(&a);
        let r = lanczos_extremes(120, |v| &a * v, 1e-10, 120);
        assert!((r.min - lo).abs() < 1e-8 * hi.abs(), "{} vs {}", r.min, lo);
        assert!((r.max - hi).abs() < 1e-8 * hi.abs());
    }

    #[test]
    fn lanczos_handles_invariant_start() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(
            (0..30).map(|i| Complex64::new(i as f64, 0.0)).collect(),
        ));
        let r = lanczos_extremes(30, |v| &a * v, 1e-12, 30);
        assert!((r.min - 0.0).abs() < 1e-9 && (r.max - 29.0).abs() < 1e-9);
    }
}
