//! Dense solvers for the small fixed-size systems used by the dispersion
//! analysis: Cholesky factorization with a typed non-SPD error, a cyclic
//! Jacobi eigensolver for complex Hermitian matrices, and the reduction of
//! the Hermitian pencil `B + iC - lambda*A` to a standard Hermitian problem.
//!
//! Everything here is written for matrices of order <= 16; no blocking, no
//! pivot growth heuristics, just numerically careful straight-line code.

use nalgebra::SMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMatrix<const N: usize> = SMatrix<Complex64, N, N>;
pub type RMatrix<const N: usize> = SMatrix<f64, N, N>;

/// Lower-triangular Cholesky factor of a symmetric matrix.
///
/// Fails with [`Error::NotPositiveDefinite`] carrying the index of the first
/// non-positive pivot. No tolerance is applied: positive definiteness is
/// exactly "every pivot > 0 in floating point", which is the hypothesis the
/// dispersion theory needs.
pub fn cholesky<const N: usize>(a: &RMatrix<N>) -> Result<RMatrix<N>> {
    let mut l = RMatrix::<N>::zeros();
    for j in 0..N {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        let dj = d.sqrt();
        l[(j, j)] = dj;
        for i in (j + 1)..N {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / dj;
        }
    }
    Ok(l)
}

/// Solve `L x = b` (forward substitution) for complex right-hand sides with
/// a real lower-triangular `L`.
fn forward_solve<const N: usize>(l: &RMatrix<N>, b: &mut [Complex64; N]) {
    for i in 0..N {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * b[k];
        }
        b[i] = s / l[(i, i)];
    }
}

/// Solve `L^T x = b` (back substitution).
fn backward_solve<const N: usize>(l: &RMatrix<N>, b: &mut [Complex64; N]) {
    for i in (0..N).rev() {
        let mut s = b[i];
        for k in (i + 1)..N {
            s -= l[(k, i)] * b[k];
        }
        b[i] = s / l[(i, i)];
    }
}

/// Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi
/// rotations. Returns the (exactly real) eigenvalues and the unitary matrix
/// of column eigenvectors, unsorted.
pub fn hermitian_eig<const N: usize>(h: &CMatrix<N>) -> Result<(Vec<f64>, CMatrix<N>)> {
    let mut a = *h;
    // Work on the exact Hermitian part so roundoff in the input cannot leak
    // into asymmetric updates.
    for p in 0..N {
        a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
        for q in (p + 1)..N {
            let m = 0.5 * (a[(p, q)] + a[(q, p)].conj());
            a[(p, q)] = m;
            a[(q, p)] = m.conj();
        }
    }
    let mut v = CMatrix::<N>::identity();
    let fro = a
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);

    for _sweep in 0..60 {
        let off: f64 = (0..N)
            .flat_map(|p| ((p + 1)..N).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 5e-15 * fro {
            let lambdas = (0..N).map(|i| a[(i, i)].re).collect();
            return Ok((lambdas, v));
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let h_pq = a[(p, q)];
                let habs = h_pq.norm();
                if habs <= 1e-300 {
                    continue;
                }
                let alpha = a[(p, p)].re;
                let beta = a[(q, q)].re;
                // Unitary 2x2 rotation U = [[c, -conj(s)], [s, c]] with
                // s = t*c*exp(-i*phi), phi = arg(h_pq), chosen to zero the
                // (p,q) entry; t is the small root of t^2 - 2*tau*t - 1 = 0.
                let tau = (beta - alpha) / (2.0 * habs);
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let phase = h_pq / habs;
                let s = phase.conj() * (t * c);

                // A <- U^H A U, applied as column then row updates.
                for i in 0..N {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = c * aip + s * aiq;
                    a[(i, q)] = -s.conj() * aip + c * aiq;
                }
                for i in 0..N {
                    let api = a[(p, i)];
                    let aqi = a[(q, i)];
                    a[(p, i)] = c * api + s.conj() * aqi;
                    a[(q, i)] = -s * api + c * aqi;
                }
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);

                for i in 0..N {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip + s * viq;
                    v[(i, q)] = -s.conj() * vip + c * viq;
                }
            }
        }
    }
    Err(Error::EigenFailure("Jacobi sweeps did not converge"))
}

/// One eigenpair of the Hermitian pencil, plus its scaled residual.
#[derive(Debug, Clone)]
pub struct PencilMode<const N: usize> {
    pub lambda: f64,
    pub vector: [Complex64; N],
    /// `norm((B + iC - lambda*A) x) / (norm(x) * scale)` with
    /// `scale = fro(B + iC) + |lambda| * fro(A)`, floored at `fro(A)`.
    pub residual: f64,
}

/// Solution of `(B + iC) x = lambda A x` with `A` SPD, `B` symmetric and `C`
/// antisymmetric: all eigenvalues are real by construction.
#[derive(Debug, Clone)]
pub struct PencilEigs<const N: usize> {
    pub modes: Vec<PencilMode<N>>,
    /// Worst imaginary part of the Rayleigh quotients `x^H (B+iC) x / x^H A x`
    /// over the computed modes; a diagnostic of residual non-Hermiticity.
    pub max_imag: f64,
}

/// Solve the Hermitian generalized eigenproblem by Cholesky reduction:
/// `A = L L^T`, then a Jacobi eigensolve of `L^-1 (B + iC) L^-T`.
///
/// `A` not positive definite is a typed error (with the failing pivot),
/// which is exactly the loss-of-convexity signal the callers key on.
pub fn hermitian_pencil_eigs<const N: usize>(
    b: &RMatrix<N>,
    c: &RMatrix<N>,
    a: &RMatrix<N>,
) -> Result<PencilEigs<N>> {
    // Diagonal congruence scaling D A D with D = diag(1/sqrt(a_ii)) keeps the
    // reduction well conditioned when A has widely spread diagonal entries
    // (the 1/c capillarity block can be huge). Eigenvalues are unchanged.
    let mut d = [0.0_f64; N];
    for i in 0..N {
        let aii = a[(i, i)];
        if !(aii > 0.0) || !aii.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: i });
        }
        d[i] = 1.0 / aii.sqrt();
    }
    let scale2 = |m: &RMatrix<N>| {
        let mut out = *m;
        for i in 0..N {
            for j in 0..N {
                out[(i, j)] *= d[i] * d[j];
            }
        }
        out
    };
    let a_s = scale2(a);
    let b_s = scale2(b);
    let c_s = scale2(c);

    let l = cholesky(&a_s)?;
    let k = CMatrix::<N>::from_fn(|i, j| Complex64::new(b_s[(i, j)], c_s[(i, j)]));

    // W = L^-1 K L^-T
    let mut w = CMatrix::<N>::zeros();
    for j in 0..N {
        let mut col = [Complex64::new(0.0, 0.0); N];
        for i in 0..N {
            col[i] = k[(i, j)];
        }
        forward_solve(&l, &mut col);
        for i in 0..N {
            w[(i, j)] = col[i];
        }
    }
    for i in 0..N {
        let mut row = [Complex64::new(0.0, 0.0); N];
        for j in 0..N {
            row[j] = w[(i, j)];
        }
        forward_solve(&l, &mut row); // (L^-T on the right) == forward solve on the row
        for j in 0..N {
            w[(i, j)] = row[j];
        }
    }

    let (lambdas, y) = hermitian_eig(&w)?;

    let fro = |m: &RMatrix<N>| m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let fro_a = fro(a);
    let fro_k = (fro(b).powi(2) + fro(c).powi(2)).sqrt();

    let mut modes: Vec<PencilMode<N>> = Vec::with_capacity(N);
    let mut max_imag = 0.0_f64;
    for m in 0..N {
        let mut x = [Complex64::new(0.0, 0.0); N];
        for i in 0..N {
            x[i] = y[(i, m)];
        }
        backward_solve(&l, &mut x);
        // Undo the diagonal congruence and fix the phase: first component
        // above threshold is made real positive.
        for i in 0..N {
            x[i] *= d[i];
        }
        let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in x.iter_mut() {
            *z /= nrm;
        }
        let lead = x
            .iter()
            .find(|z| z.norm() > 1e-12)
            .copied()
            .unwrap_or(Complex64::new(1.0, 0.0));
        let phase = lead / lead.norm();
        for z in x.iter_mut() {
            *z *= phase.conj();
        }

        let lambda = lambdas[m];
        // Residual and Rayleigh quotient against the unscaled pencil.
        let mut rnum = Complex64::new(0.0, 0.0);
        let mut rden = Complex64::new(0.0, 0.0);
        let mut rvec = 0.0_f64;
        for i in 0..N {
            let mut kx = Complex64::new(0.0, 0.0);
            let mut ax = Complex64::new(0.0, 0.0);
            for j in 0..N {
                kx += Complex64::new(b[(i, j)], c[(i, j)]) * x[j];
                ax += a[(i, j)] * x[j];
            }
            rnum += x[i].conj() * kx;
            rden += x[i].conj() * ax;
            rvec += (kx - lambda * ax).norm_sqr();
        }
        let scale = (fro_k + lambda.abs() * fro_a).max(fro_a);
        let residual = rvec.sqrt() / scale;
        let rayleigh = rnum / rden;
        max_imag = max_imag.max(rayleigh.im.abs() / scale.max(1.0));
        modes.push(PencilMode {
            lambda,
            vector: x,
            residual,
        });
    }
    modes.sort_by(|p, q| {
        p.lambda
            .partial_cmp(&q.lambda)
            .unwrap()
            .then(p.residual.partial_cmp(&q.residual).unwrap())
    });
    Ok(PencilEigs { modes, max_imag })
}

/// Max-abs-entry norm, the matrix norm used by the structural checks.
pub fn norm_inf<const N: usize>(m: &RMatrix<N>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian<const N: usize>(rng: &mut impl Rng) -> CMatrix<N> {
        let mut h = CMatrix::<N>::zeros();
        for i in 0..N {
            h[(i, i)] = Complex64::new(rng.random_range(-2.0..2.0), 0.0);
            for j in (i + 1)..N {
                let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        h
    }

    #[test]
    fn cholesky_roundtrip_and_pivot_error() {
        let a = RMatrix::<3>::new(4.0, 2.0, 0.4, 2.0, 5.0, 1.0, 0.4, 1.0, 3.0);
        let l = cholesky(&a).unwrap();
        let back = l * l.transpose();
        assert!(norm_inf(&(back - a)) < 1e-14);

        let bad = RMatrix::<3>::new(1.0, 0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0, 1.0);
        match cholesky(&bad) {
            Err(Error::NotPositiveDefinite { pivot }) => assert_eq!(pivot, 1),
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn jacobi_diagonalizes_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let h = random_hermitian::<8>(&mut rng);
            let (lambdas, v) = hermitian_eig(&h).unwrap();
            // Unitarity
            let vhv = v.adjoint() * v;
            for i in 0..8 {
                for j in 0..8 {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((vhv[(i, j)] - Complex64::new(expect, 0.0)).norm() < 1e-12);
                }
            }
            // H V = V diag(lambda)
            let hv = h * v;
            for j in 0..8 {
                for i in 0..8 {
                    let diff = hv[(i, j)] - v[(i, j)] * lambdas[j];
                    assert!(diff.norm() < 1e-11, "residual {}", diff.norm());
                }
            }
        }
    }

    #[test]
    fn pencil_matches_dense_reference_on_diagonal_case() {
        // B = diag(2, -1), C = 0, A = diag(1, 4): lambdas 2 and -0.25.
        let b = RMatrix::<2>::new(2.0, 0.0, 0.0, -1.0);
        let c = RMatrix::<2>::zeros();
        let a = RMatrix::<2>::new(1.0, 0.0, 0.0, 4.0);
        let eigs = hermitian_pencil_eigs(&b, &c, &a).unwrap();
        assert_relative_eq!(eigs.modes[0].lambda, -0.25, max_relative = 1e-14);
        assert_relative_eq!(eigs.modes[1].lambda, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn pencil_residuals_small_for_random_spd() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let g = RMatrix::<8>::from_fn(|_, _| rng.random_range(-1.0..1.0));
            let a = g * g.transpose() + RMatrix::<8>::identity() * 0.5;
            let bs = RMatrix::<8>::from_fn(|_, _| rng.random_range(-1.0..1.0));
            let b = (bs + bs.transpose()) * 0.5;
            let cs = RMatrix::<8>::from_fn(|_, _| rng.random_range(-1.0..1.0));
            let c = (cs - cs.transpose()) * 0.5;
            let eigs = hermitian_pencil_eigs(&b, &c, &a).unwrap();
            for m in &eigs.modes {
                assert!(m.residual < 1e-12, "residual {}", m.residual);
                assert!(m.lambda.is_finite());
            }
            assert!(eigs.max_imag < 1e-13);
            // Ascending order
            for w in eigs.modes.windows(2) {
                assert!(w[0].lambda <= w[1].lambda);
            }
        }
    }

    #[test]
    fn pencil_handles_wildly_scaled_blocks() {
        // Mimic the 1/c block at c = 1e-12.
        let mut a = RMatrix::<4>::identity();
        a[(3, 3)] = 1e12;
        let mut b = RMatrix::<4>::zeros();
        b[(0, 1)] = 1.0;
        b[(1, 0)] = 1.0;
        let mut c = RMatrix::<4>::zeros();
        c[(2, 3)] = -1.0;
        c[(3, 2)] = 1.0;
        let eigs = hermitian_pencil_eigs(&b, &c, &a).unwrap();
        for m in &eigs.modes {
            assert!(m.residual < 1e-12);
        }
        // The (0,1) block gives +-1 regardless of the stiff corner.
        assert_relative_eq!(eigs.modes[0].lambda, -1.0, max_relative = 1e-12);
        assert_relative_eq!(eigs.modes[3].lambda, 1.0, max_relative = 1e-12);
    }
}
