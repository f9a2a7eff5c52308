//! Approximate dense routines at the working precision: Hermitian
//! eigendecomposition, positive square roots, kernels of positive
//! semidefinite matrices, minimum-norm least squares and random unitaries.

use rand::Rng;
use rand_distr::StandardNormal;

use super::Mat;
use crate::error::{Error, Result};
use crate::qnum::approx::{epsilon, precision};
use crate::qnum::{Cplx, Real};

const MAX_SWEEPS: usize = 60;

/// Eigenvalues (ascending) and unitary eigenvectors (columns) of a Hermitian
/// matrix, by cyclic complex Jacobi rotations.
pub fn hermitian_eigen(a: &Mat<Cplx>) -> Result<(Vec<Real>, Mat<Cplx>)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("eigen of a non-square matrix".into()));
    }
    let n = a.rows();
    let mut m = a.clone();
    // Symmetrize away rounding in the input.
    for i in 0..n {
        m[(i, i)] = Cplx::from_real(m[(i, i)].re.clone());
        for j in i + 1..n {
            let avg = (&m[(i, j)] + &m[(j, i)].conj()).scale(&Real::from_f64(0.5));
            m[(j, i)] = avg.conj();
            m[(i, j)] = avg;
        }
    }
    let mut v = Mat::<Cplx>::identity(n);
    let scale = m.frobenius().to_f64().max(f64::MIN_POSITIVE);
    let target = epsilon() * scale;
    for _ in 0..MAX_SWEEPS {
        let mut off = Real::zero();
        for i in 0..n {
            for j in i + 1..n {
                off += &m[(i, j)].norm_sqr();
            }
        }
        if off.sqrt().to_f64() <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q, target);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(x, x)].re.total_cmp(&m[(y, y)].re));
    let vals = order.iter().map(|&i| m[(i, i)].re.clone()).collect();
    let vecs = Mat::from_fn(n, n, |r, c| v[(r, order[c])].clone());
    Ok((vals, vecs))
}

fn rotate(m: &mut Mat<Cplx>, v: &mut Mat<Cplx>, p: usize, q: usize, target: f64) {
    let n = m.rows();
    let apq = m[(p, q)].clone();
    let mag = apq.abs();
    if mag.to_f64() <= target * 1e-3 {
        return;
    }
    // Phase making the (p, q) entry real, then a real Jacobi rotation.
    let phase = Cplx::new(&apq.re / &mag, -(&apq.im / &mag));
    let two = Real::from_i64(2);
    let theta = &(&m[(q, q)].re - &m[(p, p)].re) / &(&two * &mag);
    let t = {
        let denom = &theta.abs() + &(&theta.square() + &Real::one()).sqrt();
        let t = denom.recip();
        if theta.is_sign_negative() {
            -t
        } else {
            t
        }
    };
    let c = (&t.square() + &Real::one()).sqrt().recip();
    let s = &t * &c;
    // J = [[c, s], [-s * phase, c * phase]] on (p, q).
    let jpp = Cplx::from_real(c.clone());
    let jpq = Cplx::from_real(s.clone());
    let jqp = phase.scale(&(-&s));
    let jqq = phase.scale(&c);
    for k in 0..n {
        let (akp, akq) = (m[(k, p)].clone(), m[(k, q)].clone());
        let mut np = &akp * &jpp;
        np.add_mul_assign(&akq, &jqp);
        let mut nq = &akp * &jpq;
        nq.add_mul_assign(&akq, &jqq);
        m[(k, p)] = np;
        m[(k, q)] = nq;
        let (vkp, vkq) = (v[(k, p)].clone(), v[(k, q)].clone());
        let mut np = &vkp * &jpp;
        np.add_mul_assign(&vkq, &jqp);
        let mut nq = &vkp * &jpq;
        nq.add_mul_assign(&vkq, &jqq);
        v[(k, p)] = np;
        v[(k, q)] = nq;
    }
    let (cpp, cpq, cqp, cqq) = (jpp.conj(), jpq.conj(), jqp.conj(), jqq.conj());
    for k in 0..n {
        let (apk, aqk) = (m[(p, k)].clone(), m[(q, k)].clone());
        let mut np = &cpp * &apk;
        np.add_mul_assign(&cqp, &aqk);
        let mut nq = &cpq * &apk;
        nq.add_mul_assign(&cqq, &aqk);
        m[(p, k)] = np;
        m[(q, k)] = nq;
    }
    m[(p, q)] = Cplx::zero();
    m[(q, p)] = Cplx::zero();
    m[(p, p)] = Cplx::from_real(m[(p, p)].re.clone());
    m[(q, q)] = Cplx::from_real(m[(q, q)].re.clone());
}

/// `V diag(f(λ)) V†` for a Hermitian matrix.
pub fn hermitian_apply(a: &Mat<Cplx>, f: impl Fn(&Real) -> Real) -> Result<Mat<Cplx>> {
    let (vals, vecs) = hermitian_eigen(a)?;
    let d = Mat::diag(vals.iter().map(|x| Cplx::from_real(f(x))).collect());
    Ok(vecs.matmul(&d).matmul(&vecs.adjoint()))
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Eigenvalues below `-tol * ‖a‖` are rejected.
pub fn psd_sqrt(a: &Mat<Cplx>, tol: f64) -> Result<Mat<Cplx>> {
    let (vals, vecs) = hermitian_eigen(a)?;
    let scale = a.frobenius().to_f64();
    if let Some(bad) = vals.iter().find(|x| x.to_f64() < -tol * scale) {
        return Err(Error::PositivityViolation(format!(
            "matrix has negative eigenvalue {:e}",
            bad.to_f64()
        )));
    }
    let d = Mat::diag(
        vals.iter()
            .map(|x| {
                if x.is_sign_negative() {
                    Cplx::zero()
                } else {
                    Cplx::from_real(x.sqrt())
                }
            })
            .collect(),
    );
    Ok(vecs.matmul(&d).matmul(&vecs.adjoint()))
}

/// Relative rank threshold used by [`psd_kernel`]: the square root of the
/// unit roundoff.
pub fn rank_rtol() -> f64 {
    2f64.powi(-(precision() as i32) / 2)
}

/// Kernel basis of a positive semidefinite Hermitian matrix by Cholesky
/// factorization with diagonal pivoting. Pivots below `rtol` times the
/// largest initial diagonal entry are treated as zero.
pub fn psd_kernel(a: &Mat<Cplx>, rtol: f64) -> Result<Vec<Vec<Cplx>>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("kernel of a non-square matrix".into()));
    }
    let n = a.rows();
    // Only entries (r, c) with r >= c are kept up to date.
    let mut w = a.clone();
    let get = |w: &Mat<Cplx>, r: usize, c: usize| if r >= c { w[(r, c)].clone() } else { w[(c, r)].conj() };
    let max_diag = (0..n).map(|i| w[(i, i)].re.to_f64()).fold(0.0, f64::max);
    let cutoff = rtol * max_diag;
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut diag: Vec<Real> = Vec::new();
    // cols[t][i]: entry of the t-th Cholesky column at original index i.
    let mut cols: Vec<Vec<Cplx>> = Vec::new();
    while !remaining.is_empty() {
        let (pos, val) = remaining
            .iter()
            .enumerate()
            .map(|(pos, &i)| (pos, w[(i, i)].re.to_f64()))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= cutoff {
            break;
        }
        let piv = remaining.remove(pos);
        let d = w[(piv, piv)].re.sqrt();
        let dinv = d.recip();
        let mut col = vec![Cplx::zero(); n];
        for &i in &remaining {
            col[i] = get(&w, i, piv).scale(&dinv);
        }
        for &j in &remaining {
            let neg = -&col[j].conj();
            if neg.is_zero() {
                continue;
            }
            for &i in &remaining {
                if i >= j {
                    w[(i, j)].add_mul_assign(&col[i], &neg);
                }
            }
        }
        pivots.push(piv);
        diag.push(d);
        cols.push(col);
    }
    let rank = pivots.len();
    // Kernel of [L11ᴴ L21ᴴ] in pivot order: L11ᴴ x1 = -L21ᴴ e_f for each free f.
    let mut basis = Vec::new();
    for &free in &remaining {
        let mut x = vec![Cplx::zero(); rank];
        for t in (0..rank).rev() {
            let mut acc = -&cols[t][free].conj();
            for s in t + 1..rank {
                let lst = cols[t][pivots[s]].conj();
                acc -= &(&lst * &x[s]);
            }
            x[t] = acc.scale(&diag[t].recip());
        }
        let mut v = vec![Cplx::zero(); n];
        v[free] = Cplx::one();
        for (t, xt) in x.into_iter().enumerate() {
            v[pivots[t]] = xt;
        }
        basis.push(v);
    }
    Ok(basis)
}

/// Minimum-norm least-squares solution of `a x = b` via the eigensystem of
/// `a† a`; eigenvalues below `rtol` times the largest are dropped.
pub fn min_norm_lstsq(a: &Mat<Cplx>, b: &Mat<Cplx>, rtol: f64) -> Result<Mat<Cplx>> {
    let ah = a.adjoint();
    let (vals, vecs) = hermitian_eigen(&ah.matmul(a))?;
    let top = vals.last().map_or(0.0, Real::to_f64).max(0.0);
    let d = Mat::diag(
        vals.iter()
            .map(|x| {
                if x.to_f64() > rtol * top && top > 0.0 {
                    Cplx::from_real(x.recip())
                } else {
                    Cplx::zero()
                }
            })
            .collect(),
    );
    Ok(vecs.matmul(&d).matmul(&vecs.adjoint()).matmul(&ah).matmul(b))
}

/// A random complex matrix with standard normal entries.
pub fn random_gaussian<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Mat<Cplx> {
    Mat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Cplx::from_f64(re, im)
    })
}

/// A random unitary: Gram-Schmidt (applied twice) on a Gaussian matrix.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> Mat<Cplx> {
    let g = random_gaussian(n, n, rng);
    let mut cols: Vec<Vec<Cplx>> = (0..n).map(|j| g.col(j)).collect();
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let mut dot = Cplx::zero();
                for i in 0..n {
                    dot.add_mul_assign(&cols[k][i].conj(), &cols[j][i]);
                }
                let neg = -&dot;
                for i in 0..n {
                    let cki = cols[k][i].clone();
                    cols[j][i].add_mul_assign(&neg, &cki);
                }
            }
        }
        let mut norm = Real::zero();
        for x in &cols[j] {
            norm += &x.norm_sqr();
        }
        let inv = norm.sqrt().recip();
        for x in &mut cols[j] {
            *x = x.scale(&inv);
        }
    }
    Mat::from_fn(n, n, |i, j| cols[j][i].clone())
}

/// A random matrix of the given Frobenius norm.
pub fn random_noise<R: Rng>(rows: usize, cols: usize, norm: f64, rng: &mut R) -> Mat<Cplx> {
    let g = random_gaussian(rows, cols, rng);
    let s = Real::from_f64(norm) / g.frobenius();
    g.map(|x| x.scale(&s))
}

/// Hermitian part `(a + a†) / 2`.
pub fn hermitian_part(a: &Mat<Cplx>) -> Mat<Cplx> {
    let half = Cplx::from_f64(0.5, 0.0);
    (a + &a.adjoint()).scale(&half)
}

/// Whether every eigenvalue of the Hermitian part is strictly positive.
pub fn is_positive_definite(a: &Mat<Cplx>) -> Result<bool> {
    let (vals, _) = hermitian_eigen(&hermitian_part(a))?;
    Ok(vals.iter().all(Real::is_sign_positive))
}
