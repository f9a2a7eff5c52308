//! Clebsch-Gordan decomposition of `V_a ⊗ V_b` for `U_q(su(2))`, twist
//! blocks `F: V_a ⊗ V_b → V_a ⊗ V_b` intertwining the classical and quantum
//! coproducts, and associators on triple tensor products.
//!
//! Spins are labelled by the integer `n = 2j`; `V_n` is [`irrep_su2`] in its
//! weight basis. Classical data are the `q = 1` specialisation of the same
//! formulas.
//!
//! [`irrep_su2`]: crate::repcore::irrep_su2

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{mat_serde, Mat, Residual};
use crate::qnum::approx::REPORT_TOL;
use crate::qnum::{q_int_unchecked, require_generic, require_positive, Cplx, QScalar, Real};
use crate::repcore::{irrep_su2_any, tensor, Generator, Rep};

/// Gauge rule applied to every twist block.
pub const GAUGE_RULE: &str =
    "per component, the overlap of the quantum and classical unit highest-weight vectors is real and nonnegative";

/// One summand `V_c ⊂ V_a ⊗ V_b`.
#[derive(Debug, Clone)]
pub struct CgComponent {
    pub c: u32,
    /// Exact intertwiner `V_c → V_a ⊗ V_b` with columns `w_0..w_c`,
    /// `w_{m+1} = Δ(F) w_m / [m+1]`.
    pub embedding: Mat<QScalar>,
    /// `μ` with `ιᵀ G_ab ι = μ G_c`.
    pub norm: QScalar,
}

#[derive(Debug, Clone)]
pub struct CgDecomposition {
    pub a: u32,
    pub b: u32,
    pub q: QScalar,
    pub components: Vec<CgComponent>,
    /// `Σ_c ι_c (μ_c G_c)⁻¹ ι_cᵀ G_ab - I`, exact.
    pub completeness: Residual,
    /// `Δ(x) ι_c - ι_c x_c` over generators and components, exact.
    pub intertwining: Residual,
    /// `ι_cᵀ G_ab ι_d - δ_cd μ_c G_c`, exact.
    pub orthogonality: Residual,
    product: Rep,
}

impl CgDecomposition {
    pub fn labels(&self) -> Vec<u32> {
        self.components.iter().map(|c| c.c).collect()
    }

    /// Embedding of `V_c` as an isometry between orthonormal bases:
    /// `D_ab ι D_c⁻¹ / √μ` with `D = diag(√g)`.
    pub fn orthonormal_embedding(&self, idx: usize) -> Mat<Cplx> {
        let comp = &self.components[idx];
        let dab = sqrt_diag(&self.product.gram);
        let gc = irrep_su2_any(comp.c, &self.q).gram;
        let inv_mu = Real::from_q(&comp.norm).sqrt().recip();
        let dc_inv: Vec<Real> = (0..gc.rows())
            .map(|m| Real::from_q(&gc[(m, m)]).sqrt().recip())
            .collect();
        let iota = &comp.embedding;
        Mat::from_fn(iota.rows(), iota.cols(), |r, m| {
            let x = &(&Real::from_q(&iota[(r, m)]) * &dab[r]) * &dc_inv[m];
            Cplx::from_real(&x * &inv_mu)
        })
    }

    /// The tensor product representation `V_a ⊗ V_b`.
    pub fn product(&self) -> &Rep {
        &self.product
    }
}

fn sqrt_diag(g: &Mat<QScalar>) -> Vec<Real> {
    (0..g.rows()).map(|i| Real::from_q(&g[(i, i)]).sqrt()).collect()
}

/// Decomposes `V_a ⊗ V_b` into `V_c`, `c = |a-b|, |a-b|+2, .., a+b`.
///
/// Highest-weight vectors are the kernel of `Δ(E)` on each weight space;
/// each is completed downward by `Δ(F)`. `q = 1` gives the classical
/// decomposition.
pub fn cg_decompose(a: u32, b: u32, q: &QScalar) -> Result<CgDecomposition> {
    require_positive(q)?;
    let va = irrep_su2_any(a, q);
    let vb = irrep_su2_any(b, q);
    let product = tensor(&va, &vb)?;
    let (da, db) = (a as usize + 1, b as usize + 1);
    let (de, df) = (&product.e[0], &product.f[0]);
    let weight_space = |s: usize| -> Vec<usize> {
        (0..da)
            .filter(|&i| s >= i && s - i < db)
            .map(|i| i * db + (s - i))
            .collect()
    };
    let lo = a.abs_diff(b);
    let mut components = Vec::new();
    for c in (lo..=a + b).step_by(2) {
        let s = ((a + b - c) / 2) as usize;
        let cols = weight_space(s);
        let rows = if s == 0 { Vec::new() } else { weight_space(s - 1) };
        let sub = Mat::from_fn(rows.len(), cols.len(), |r, k| de[(rows[r], cols[k])].clone());
        let kernel = if rows.is_empty() {
            vec![vec![QScalar::one()]]
        } else {
            sub.nullspace()
        };
        if kernel.len() != 1 {
            return Err(Error::Internal(format!(
                "highest-weight space of V_{c} in V_{a} ⊗ V_{b} has dimension {}",
                kernel.len()
            )));
        }
        let mut hw = kernel.into_iter().next().expect("one vector");
        let lead = hw
            .iter()
            .find(|x| !x.is_zero())
            .cloned()
            .ok_or_else(|| Error::Internal("zero highest-weight vector".into()))?
            .recip()
            .expect("nonzero");
        for x in &mut hw {
            *x = &*x * &lead;
        }
        let mut u = vec![QScalar::zero(); da * db];
        for (k, &idx) in cols.iter().enumerate() {
            u[idx] = hw[k].clone();
        }
        let mut columns = vec![Mat::column(u)];
        for m in 0..c as usize {
            let next = df.matmul(&columns[m]);
            let inv = q_int_unchecked(m as i64 + 1, q).recip().expect("nonzero q-integer");
            columns.push(next.scale(&inv));
        }
        let embedding = Mat::hstack(&columns);
        let u0 = embedding.block(0, 0, da * db, 1);
        let norm = u0.transpose().matmul(&product.gram).matmul(&u0)[(0, 0)].clone();
        components.push(CgComponent { c, embedding, norm });
    }
    let n = da * db;
    let mut completeness = Mat::<QScalar>::zeros(n, n);
    let mut intertwining = Residual::Exact(QScalar::zero());
    let mut orthogonality = Residual::Exact(QScalar::zero());
    for (ci, comp) in components.iter().enumerate() {
        let vc = irrep_su2_any(comp.c, q);
        let inv_g = Mat::diag(
            (0..vc.dim)
                .map(|m| (&comp.norm * &vc.gram[(m, m)]).recip().expect("positive"))
                .collect(),
        );
        let iota = &comp.embedding;
        completeness.add_assign(&iota.matmul(&inv_g).matmul(&iota.transpose()).matmul(&product.gram));
        for x in Generator::ALL {
            let d = &product.generator(x, 0).matmul(iota) - &iota.matmul(vc.generator(x, 0));
            intertwining = intertwining.max(d.residual());
        }
        for other in &components[ci..] {
            let mut g = iota.transpose().matmul(&product.gram).matmul(&other.embedding);
            if other.c == comp.c {
                g.sub_assign(&vc.gram.scale(&comp.norm));
            }
            orthogonality = orthogonality.max(g.residual());
        }
    }
    completeness.sub_assign(&Mat::identity(n));
    Ok(CgDecomposition {
        a,
        b,
        q: q.clone(),
        components,
        completeness: completeness.residual(),
        intertwining,
        orthogonality,
        product,
    })
}

/// The twist restricted to `End(V_a ⊗ V_b)`, in orthonormal bases.
#[derive(Debug, Clone, Serialize)]
pub struct TwistBlock {
    pub a: u32,
    pub b: u32,
    pub q: QScalar,
    #[serde(rename = "F", with = "mat_serde")]
    pub f: Mat<Cplx>,
    /// `‖F F† - I‖`.
    pub unitarity_residual: f64,
    /// `max_x ‖Δ_q(x) - F Δ_1(φ(x)) F⁻¹‖`, `x ∈ {E, F, K}`.
    pub intertwine_residual: f64,
    pub gauge: &'static str,
    /// Sign applied to each component, in label order.
    pub signs: Vec<i8>,
}

/// Orthonormal-basis matrices of `x` on `V_n` at parameter `q`.
fn orthonormal_generator(n: u32, q: &QScalar, x: Generator) -> Mat<Cplx> {
    let r = irrep_su2_any(n, q);
    let d = sqrt_diag(&r.gram);
    let m = r.generator(x, 0);
    Mat::from_fn(r.dim, r.dim, |i, j| {
        Cplx::from_real(&(&Real::from_q(&m[(i, j)]) * &d[i]) / &d[j])
    })
}

/// Orthonormal-basis image of `x` on `V_a ⊗ V_b` under the `q`-coproduct.
fn orthonormal_coproduct(cg: &CgDecomposition, x: Generator) -> Mat<Cplx> {
    let p = cg.product();
    let d = sqrt_diag(&p.gram);
    let m = p.generator(x, 0);
    Mat::from_fn(p.dim, p.dim, |i, j| {
        Cplx::from_real(&(&Real::from_q(&m[(i, j)]) * &d[i]) / &d[j])
    })
}

/// Builds `F = Σ_c σ_c Ô^q_c (Ô^1_c)ᵀ` and checks it. Fails with an internal
/// error when the intertwining residual exceeds `tol`.
pub fn solve_twist_block_tol(a: u32, b: u32, q: &QScalar, tol: f64) -> Result<TwistBlock> {
    require_generic(q)?;
    let quantum = cg_decompose(a, b, q)?;
    let classical = cg_decompose(a, b, &QScalar::one())?;
    let n = (a as usize + 1) * (b as usize + 1);
    let mut f = Mat::<Cplx>::zeros(n, n);
    let mut signs = Vec::with_capacity(quantum.components.len());
    let mut classical_isos = Vec::with_capacity(quantum.components.len());
    for idx in 0..quantum.components.len() {
        let oq = quantum.orthonormal_embedding(idx);
        let o1 = classical.orthonormal_embedding(idx);
        let mut overlap = Real::zero();
        for r in 0..n {
            overlap += &(&oq[(r, 0)].re * &o1[(r, 0)].re);
        }
        let sign: i8 = if overlap.is_sign_negative() { -1 } else { 1 };
        let s = Cplx::from_real(Real::from_i64(sign.into()));
        f.add_assign(&oq.matmul(&o1.transpose()).scale(&s));
        signs.push(sign);
        classical_isos.push(o1);
    }
    let mut intertwine = 0.0f64;
    let fdag = f.adjoint();
    for x in Generator::ALL {
        let target = orthonormal_coproduct(&quantum, x);
        let mut classical_image = Mat::<Cplx>::zeros(n, n);
        for (idx, comp) in quantum.components.iter().enumerate() {
            let xc = orthonormal_generator(comp.c, q, x);
            let o1 = &classical_isos[idx];
            classical_image.add_assign(&o1.matmul(&xc).matmul(&o1.transpose()));
        }
        intertwine = intertwine.max(f.matmul(&classical_image).matmul(&fdag).dist(&target));
    }
    if intertwine > tol {
        return Err(Error::Internal(format!(
            "twist block ({a}, {b}) intertwining residual {intertwine:e} exceeds {tol:e}"
        )));
    }
    Ok(TwistBlock {
        a,
        b,
        q: q.clone(),
        unitarity_residual: f.unitarity_defect(),
        f,
        intertwine_residual: intertwine,
        gauge: GAUGE_RULE,
        signs,
    })
}

/// [`solve_twist_block_tol`] at the default report tolerance.
pub fn solve_twist_block(a: u32, b: u32, q: &QScalar) -> Result<TwistBlock> {
    solve_twist_block_tol(a, b, q, REPORT_TOL)
}

/// The associator `Φ = (id⊗Δ)(F)† F_23† F_12 (Δ⊗id)(F)` on `V_a ⊗ V_b ⊗ V_c`.
#[derive(Debug, Clone, Serialize)]
pub struct AssociatorBlock {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub q: QScalar,
    #[serde(rename = "Phi", with = "mat_serde")]
    pub phi: Mat<Cplx>,
    /// `max_x ‖[Φ, Δ^{(2)}(x)]‖` over the classical `E`, `F` and `K = q^H`.
    pub commutation_residual: f64,
    pub unitarity_residual: f64,
    /// `‖Φ - I‖`.
    pub identity_residual: f64,
}

/// Classical `Δ^{(2)}(x)` on `V_a ⊗ V_b ⊗ V_c` in orthonormal bases, with
/// `K` acting as `q^H`.
pub fn classical_triple_coproduct(a: u32, b: u32, c: u32, q: &QScalar, x: Generator) -> Mat<Cplx> {
    let dims = [a as usize + 1, b as usize + 1, c as usize + 1];
    match x {
        Generator::K => {
            let mut diag = Vec::with_capacity(dims.iter().product());
            for i in 0..dims[0] {
                for j in 0..dims[1] {
                    for k in 0..dims[2] {
                        let h = (a as i64 - 2 * i as i64) + (b as i64 - 2 * j as i64) + (c as i64 - 2 * k as i64);
                        diag.push(Cplx::from_q(&q.pow(h)));
                    }
                }
            }
            Mat::diag(diag)
        }
        _ => {
            let one = QScalar::one();
            let gens = [
                orthonormal_generator(a, &one, x),
                orthonormal_generator(b, &one, x),
                orthonormal_generator(c, &one, x),
            ];
            let id = |n: usize| Mat::<Cplx>::identity(n);
            let t1 = gens[0].kron(&id(dims[1])).kron(&id(dims[2]));
            let t2 = id(dims[0]).kron(&gens[1]).kron(&id(dims[2]));
            let t3 = id(dims[0]).kron(&id(dims[1])).kron(&gens[2]);
            &(&t1 + &t2) + &t3
        }
    }
}

/// `(Δ⊗id)(F)` on `V_a ⊗ V_b ⊗ V_c`: `Σ_d (Ô_d ⊗ 1) F^{(d,c)} (Ô_d ⊗ 1)ᵀ`
/// over the classical decomposition of `V_a ⊗ V_b`.
fn coproduct_left(a: u32, b: u32, c: u32, q: &QScalar, tol: f64) -> Result<Mat<Cplx>> {
    let cl = cg_decompose(a, b, &QScalar::one())?;
    let idc = Mat::<Cplx>::identity(c as usize + 1);
    let n = (a as usize + 1) * (b as usize + 1) * (c as usize + 1);
    let mut out = Mat::zeros(n, n);
    for (idx, comp) in cl.components.iter().enumerate() {
        let o = cl.orthonormal_embedding(idx).kron(&idc);
        let f = solve_twist_block_tol(comp.c, c, q, tol)?.f;
        out.add_assign(&o.matmul(&f).matmul(&o.transpose()));
    }
    Ok(out)
}

/// `(id⊗Δ)(F)`: `Σ_d (1 ⊗ Ô_d) F^{(a,d)} (1 ⊗ Ô_d)ᵀ` over `V_b ⊗ V_c`.
fn coproduct_right(a: u32, b: u32, c: u32, q: &QScalar, tol: f64) -> Result<Mat<Cplx>> {
    let cl = cg_decompose(b, c, &QScalar::one())?;
    let ida = Mat::<Cplx>::identity(a as usize + 1);
    let n = (a as usize + 1) * (b as usize + 1) * (c as usize + 1);
    let mut out = Mat::zeros(n, n);
    for (idx, comp) in cl.components.iter().enumerate() {
        let o = ida.kron(&cl.orthonormal_embedding(idx));
        let f = solve_twist_block_tol(a, comp.c, q, tol)?.f;
        out.add_assign(&o.matmul(&f).matmul(&o.transpose()));
    }
    Ok(out)
}

fn assemble_associator(
    a: u32,
    b: u32,
    c: u32,
    q: &QScalar,
    f12_block: &Mat<Cplx>,
    tol: f64,
) -> Result<AssociatorBlock> {
    require_generic(q)?;
    let (da, db, dc) = (a as usize + 1, b as usize + 1, c as usize + 1);
    if f12_block.rows() != da * db || f12_block.cols() != da * db {
        return Err(Error::DimensionMismatch(format!("F_12 must be {n}x{n}", n = da * db)));
    }
    let f23 = Mat::<Cplx>::identity(da).kron(&solve_twist_block_tol(b, c, q, tol)?.f);
    let f12 = f12_block.kron(&Mat::identity(dc));
    let left = coproduct_left(a, b, c, q, tol)?;
    let right = coproduct_right(a, b, c, q, tol)?;
    let phi = right.adjoint().matmul(&f23.adjoint()).matmul(&f12).matmul(&left);
    let mut commutation = 0.0f64;
    for x in Generator::ALL {
        let d = classical_triple_coproduct(a, b, c, q, x);
        commutation = commutation.max(phi.commutator(&d).frobenius().to_f64());
    }
    let n = da * db * dc;
    Ok(AssociatorBlock {
        a,
        b,
        c,
        q: q.clone(),
        commutation_residual: commutation,
        unitarity_residual: phi.unitarity_defect(),
        identity_residual: phi.dist(&Mat::identity(n)),
        phi,
    })
}

/// Associator block for the triple `(a, b, c)`.
pub fn associator_block(a: u32, b: u32, c: u32, q: &QScalar) -> Result<AssociatorBlock> {
    let f12 = solve_twist_block(a, b, q)?.f;
    assemble_associator(a, b, c, q, &f12, REPORT_TOL)
}

/// Associator block with `F_12` replaced by an arbitrary matrix on
/// `V_a ⊗ V_b` (used for negative controls).
pub fn associator_block_with_f12(a: u32, b: u32, c: u32, q: &QScalar, f12: &Mat<Cplx>) -> Result<AssociatorBlock> {
    assemble_associator(a, b, c, q, f12, REPORT_TOL)
}
