//! Independent dispersion oracle.
//!
//! Linearizes the primitive-variable system (density, entropy density,
//! momentum, density gradient) about a constant state, substitutes plane
//! waves, and takes the eigenvalues of the resulting 8x8 complex matrix
//! `M(k)` with `lambda y = M y`. Nothing here touches the conjugate
//! transform or the symmetric assembly: agreement with
//! [`super::dispersion_eigs`] is evidence, not tautology.
//!
//! The eigenvalues are extracted by realifying `M` into the 16x16 real
//! matrix `[[Re M, -Im M], [Im M, Re M]]`, whose spectrum is that of `M`
//! together with its conjugate. A Schur decomposition of the real matrix
//! yields the combined multiset; conjugate classes are then attributed back
//! to `M` by comparing `|det(M - z I)|` against `|det(M - conj(z) I)|` with
//! a complex LU factorization, splitting a class evenly when both shifts are
//! singular (a genuinely complex pair, as at a spinodal state).

use nalgebra::{DMatrix, SMatrix, Vector3};
use num_complex::Complex64;

use crate::conjugate::PhysicalState;
use crate::conjugate::DIM;
use crate::thermo::{self, EosModel};
use crate::Result;

use super::WaveVector;

type CMat = SMatrix<Complex64, DIM, DIM>;

/// Build the plane-wave matrix `M(k)` of the linearized primitive system at
/// a constant state with arbitrary velocity and zero density gradient.
fn plane_wave_matrix(eq: &PhysicalState, k: &WaveVector, eos: &EosModel) -> Result<CMat> {
    let ev = thermo::evaluate(eos, eq.thermo())?;
    let (p_rho, p_eta) = ev.mechanical_pressure_grad();
    let rho = eq.rho;
    let s_e = eq.eta / rho;
    let u_e: Vector3<f64> = eq.momentum / rho;
    let c = eq.capillarity;
    let kv = k.0;
    let ku = kv.dot(&u_e);

    let re = |x: f64| Complex64::new(x, 0.0);
    let im = |x: f64| Complex64::new(0.0, x);

    let mut m = CMat::zeros();
    // Mass: lambda rho^ = k . j^
    for j in 0..3 {
        m[(0, 2 + j)] = re(kv[j]);
    }
    // Entropy: lambda eta^ = s_e k . j^ + (k.u_e)(eta^ - s_e rho^)
    m[(1, 0)] = re(-s_e * ku);
    m[(1, 1)] = re(ku);
    for j in 0..3 {
        m[(1, 2 + j)] = re(s_e * kv[j]);
    }
    // Momentum: lambda j^_i = (k.j^) u_e,i + (k.u_e) j^_i - (k.u_e) u_e,i rho^
    //                        + k_i (P_rho rho^ + P_eta eta^) - i c rho k_i (k.w^)
    for i in 0..3 {
        m[(2 + i, 0)] = re(-ku * u_e[i] + kv[i] * p_rho);
        m[(2 + i, 1)] = re(kv[i] * p_eta);
        for j in 0..3 {
            m[(2 + i, 2 + j)] = re(u_e[i] * kv[j] + if i == j { ku } else { 0.0 });
            m[(2 + i, 5 + j)] = im(-c * rho * kv[i] * kv[j]);
        }
    }
    // Gradient: lambda w^_i = i k_i (k . j^)
    for i in 0..3 {
        for j in 0..3 {
            m[(5 + i, 2 + j)] = im(kv[i] * kv[j]);
        }
    }
    Ok(m)
}

/// `log|det(M - z I)|` via complex LU with partial pivoting. Only relative
/// comparisons between shifts are needed, so the log scale is enough.
fn log_abs_det_shifted(m: &CMat, z: Complex64) -> f64 {
    let mut a = *m;
    for i in 0..DIM {
        a[(i, i)] -= z;
    }
    let mut log_det = 0.0_f64;
    for col in 0..DIM {
        let mut piv = col;
        let mut best = a[(col, col)].norm();
        for r in (col + 1)..DIM {
            let n = a[(r, col)].norm();
            if n > best {
                best = n;
                piv = r;
            }
        }
        if best == 0.0 {
            return f64::NEG_INFINITY;
        }
        if piv != col {
            for j in 0..DIM {
                a.swap((col, j), (piv, j));
            }
        }
        log_det += a[(col, col)].norm().ln();
        for r in (col + 1)..DIM {
            let f = a[(r, col)] / a[(col, col)];
            for j in col..DIM {
                let v = a[(col, j)];
                a[(r, j)] -= f * v;
            }
        }
    }
    log_det
}

/// The eight plane-wave frequencies of the linearized primitive system.
///
/// The equilibrium must be a constant solution: any velocity, zero density
/// gradient. Frequencies are returned sorted by real part (ties by
/// imaginary part).
pub fn oracle_dispersion(
    equilibrium: &PhysicalState,
    k: &WaveVector,
    eos: &EosModel,
) -> Result<Vec<Complex64>> {
    let m = plane_wave_matrix(equilibrium, k, eos)?;

    // Realify: spectrum(J) = spectrum(M) united with its conjugate.
    let mut j = DMatrix::<f64>::zeros(2 * DIM, 2 * DIM);
    for r in 0..DIM {
        for c in 0..DIM {
            j[(r, c)] = m[(r, c)].re;
            j[(r, c + DIM)] = -m[(r, c)].im;
            j[(r + DIM, c)] = m[(r, c)].im;
            j[(r + DIM, c + DIM)] = m[(r, c)].re;
        }
    }
    let scale = j.amax().max(1.0);
    let schur = nalgebra::Schur::try_new(j / scale, 1e-14, 100_000).ok_or(
        crate::Error::EigenFailure("Schur iteration did not converge"),
    )?;
    let pool: Vec<Complex64> = schur
        .complex_eigenvalues()
        .iter()
        .map(|z| Complex64::new(z.re, z.im) * scale)
        .collect();

    let mag = pool.iter().fold(1.0_f64, |acc, z| acc.max(z.norm()));
    let real_tol = 1e-9 * mag;

    // Near-real values pair with their own duplicates: sort and average
    // adjacent pairs. Complex values cluster into conjugate classes.
    let mut reals: Vec<f64> = pool
        .iter()
        .filter(|z| z.im.abs() <= real_tol)
        .map(|z| z.re)
        .collect();
    reals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<Complex64> = reals
        .chunks(2)
        .map(|pair| {
            Complex64::new(
                0.5 * (pair[0] + pair.get(1).copied().unwrap_or(pair[0])),
                0.0,
            )
        })
        .collect();

    // Upper-half-plane representatives with multiplicities.
    let mut ups: Vec<Complex64> = pool.iter().filter(|z| z.im > real_tol).copied().collect();
    ups.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let mut idx = 0;
    while idx < ups.len() {
        let z = ups[idx];
        let mut count = 1;
        while idx + count < ups.len() && (ups[idx + count] - z).norm() <= 1e-6 * mag {
            count += 1;
        }
        idx += count;
        // The class {z, conj z} holds `count` eigenvalues of M. Decide the
        // split by probing the characteristic determinant at both shifts:
        // within a million-fold margin both are singular and the class
        // splits evenly; otherwise the singular shift takes everything.
        let ld_up = log_abs_det_shifted(&m, z);
        let ld_dn = log_abs_det_shifted(&m, z.conj());
        let margin = (1e6_f64).ln();
        let (n_up, n_dn) = if (ld_up - ld_dn).abs() <= margin {
            (count - count / 2, count / 2)
        } else if ld_up < ld_dn {
            (count, 0)
        } else {
            (0, count)
        };
        for _ in 0..n_up {
            out.push(z);
        }
        for _ in 0..n_dn {
            out.push(z.conj());
        }
    }

    debug_assert_eq!(out.len(), DIM);
    out.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const EOS: EosModel = EosModel::Polytropic { k: 1.0, gamma: 2.0 };

    #[test]
    fn zero_wave_vector_zero_spectrum() {
        let eq = PhysicalState::rest(1.0, 0.0, 0.1);
        let out = oracle_dispersion(&eq, &WaveVector::new(0.0, 0.0, 0.0), &EOS).unwrap();
        for z in out {
            assert!(z.norm() < 1e-12);
        }
    }

    #[test]
    fn acoustic_limit_without_capillarity() {
        // c -> 0 at rest: nonzero frequencies are +-a|k|, everything else 0.
        let eq = PhysicalState::rest(1.0, 0.0, 1e-14);
        let kmag = 1.3_f64;
        let out = oracle_dispersion(&eq, &WaveVector::new(kmag, 0.0, 0.0), &EOS).unwrap();
        let a = 2.0_f64.sqrt();
        assert_relative_eq!(out[0].re, -a * kmag, max_relative = 1e-8);
        assert_relative_eq!(out[7].re, a * kmag, max_relative = 1e-8);
        for z in &out[1..7] {
            assert!(z.re.abs() < 1e-7);
        }
        for z in &out {
            assert!(z.im.abs() < 1e-8);
        }
    }

    #[test]
    fn capillary_branch_from_hand_linearization() {
        // lambda^2 = a^2 k^2 + c rho k^4 for the extreme branch at rest.
        let eq = PhysicalState::rest(1.0, 0.0, 0.1);
        for kmag in [0.5_f64, 1.0, 2.0, 4.0] {
            let out = oracle_dispersion(&eq, &WaveVector::new(kmag, 0.0, 0.0), &EOS).unwrap();
            let expect = (2.0 * kmag * kmag + 0.1 * kmag.powi(4)).sqrt();
            assert_relative_eq!(out[7].re, expect, max_relative = 1e-9);
            assert_relative_eq!(out[0].re, -expect, max_relative = 1e-9);
        }
    }

    #[test]
    fn spinodal_state_has_genuinely_complex_pair() {
        let vdw = EosModel::VanDerWaals {
            a: 1.0,
            b: 1.0 / 3.0,
            r: 1.0,
            cv: 1.5,
        };
        let eta = thermo::eta_for_temperature(&vdw, 1.0, 0.4).unwrap();
        let eq = PhysicalState::rest(1.0, eta, 0.01);
        let out = oracle_dispersion(&eq, &WaveVector::new(1.0, 0.0, 0.0), &vdw).unwrap();
        let max_im = out.iter().fold(0.0_f64, |m, z| m.max(z.im.abs()));
        assert!(max_im > 1e-4, "expected unstable pair, max |Im| = {max_im}");
        // Both the growing and the decaying mode are genuine eigenvalues at a
        // reflection-symmetric rest state, so both signs must be reported.
        let max_pos = out.iter().fold(0.0_f64, |m, z| m.max(z.im));
        let min_neg = out.iter().fold(0.0_f64, |m, z| m.min(z.im));
        assert!(max_pos > 1e-4 && min_neg < -1e-4);
    }
}
