//! Finite-dimensional representations of `U_q(g)`: construction, tensor
//! products through the coproduct, and relation checking.
//!
//! One Hopf convention is used throughout:
//!
//! ```text
//! Δ(K) = K⊗K     Δ(E) = E⊗K + 1⊗E     Δ(F) = F⊗1 + K⁻¹⊗F
//! ε(E) = ε(F) = 0, ε(K) = 1
//! S(K) = K⁻¹     S(E) = -E K⁻¹        S(F) = -K F
//! ```
//!
//! The `*`-structure is `E* = K F`, `F* = E K⁻¹`, `K* = K`, with adjoints
//! taken relative to each representation's Gram matrix:
//! `X† = G⁻¹ Xᴴ G`.

use serde::{Deserialize, Serialize};

use crate::cartan::{q_node, CartanDatum, WeightLabel};
use crate::error::{Error, Result};
use crate::linalg::dense::psd_sqrt;
use crate::linalg::{mat_list_serde, mat_serde, Mat, Residual, Scalar};
use crate::qnum::approx::INTERNAL_TOL;
use crate::qnum::{q_binomial, q_int_unchecked, require_generic, require_positive, Cplx, QScalar};

/// Simple generators of `U_q(g)` at one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    E,
    F,
    K,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::E, Generator::F, Generator::K];
}

/// The fixed Hopf structure, as formulas and as operations on
/// representation matrices.
#[derive(Debug, Clone, Copy, Default)]
pub struct HopfConvention;

impl HopfConvention {
    pub const COPRODUCT_K: &'static str = "Δ(K_i) = K_i ⊗ K_i";
    pub const COPRODUCT_E: &'static str = "Δ(E_i) = E_i ⊗ K_i + 1 ⊗ E_i";
    pub const COPRODUCT_F: &'static str = "Δ(F_i) = F_i ⊗ 1 + K_i⁻¹ ⊗ F_i";
    pub const COUNIT: &'static str = "ε(E_i) = ε(F_i) = 0, ε(K_i) = 1";
    pub const ANTIPODE: &'static str = "S(K_i) = K_i⁻¹, S(E_i) = -E_i K_i⁻¹, S(F_i) = -K_i F_i";

    /// `(π1 ⊗ π2) Δ(x_i)` for 1-based node `i`.
    pub fn coproduct<S: Scalar>(x: Generator, i: usize, r1: &Rep<S>, r2: &Rep<S>) -> Result<Mat<S>> {
        r1.cartan.check_node(i)?;
        r2.cartan.check_node(i)?;
        let i = i - 1;
        let id1 = Mat::identity(r1.dim);
        let id2 = Mat::identity(r2.dim);
        Ok(match x {
            Generator::K => r1.k[i].kron(&r2.k[i]),
            Generator::E => &r1.e[i].kron(&r2.k[i]) + &id1.kron(&r2.e[i]),
            Generator::F => &r1.f[i].kron(&id2) + &r1.k[i].inverse()?.kron(&r2.f[i]),
        })
    }

    /// `π(S(x_i))` for 1-based node `i`.
    pub fn antipode<S: Scalar>(x: Generator, i: usize, r: &Rep<S>) -> Result<Mat<S>> {
        r.cartan.check_node(i)?;
        let i = i - 1;
        let kinv = r.k[i].inverse()?;
        Ok(match x {
            Generator::K => kinv,
            Generator::E => -&r.e[i].matmul(&kinv),
            Generator::F => -&r.k[i].matmul(&r.f[i]),
        })
    }

    pub fn counit(x: Generator) -> QScalar {
        match x {
            Generator::K => QScalar::one(),
            Generator::E | Generator::F => QScalar::zero(),
        }
    }

    /// `m ∘ (S ⊗ id) ∘ Δ(x_i)` evaluated in `r`; equals `ε(x) 1`.
    pub fn antipode_axiom<S: Scalar>(x: Generator, i: usize, r: &Rep<S>) -> Result<Mat<S>> {
        // S(K⁻¹) = K, so the F term is S(F)·1 + K·F.
        let s = Self::antipode(x, i, r)?;
        let i = i - 1;
        Ok(match x {
            Generator::K => s.matmul(&r.k[i]),
            Generator::E => &s.matmul(&r.k[i]) + &r.e[i],
            Generator::F => &s + &r.k[i].matmul(&r.f[i]),
        })
    }
}

/// A representation: images of `E_i, F_i, K_i` and the Gram matrix of the
/// inner product.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct Rep<S: Scalar = QScalar> {
    pub cartan: CartanDatum,
    pub q: QScalar,
    pub dim: usize,
    #[serde(rename = "E", with = "mat_list_serde")]
    pub e: Vec<Mat<S>>,
    #[serde(rename = "F", with = "mat_list_serde")]
    pub f: Vec<Mat<S>>,
    #[serde(rename = "K", with = "mat_list_serde")]
    pub k: Vec<Mat<S>>,
    #[serde(with = "mat_serde")]
    pub gram: Mat<S>,
}

impl<S: Scalar> Rep<S> {
    /// Checks that every matrix is `dim x dim` and there is one of each
    /// generator per node.
    pub fn check_shapes(&self) -> Result<()> {
        let rank = self.cartan.rank();
        for (name, list) in [("E", &self.e), ("F", &self.f), ("K", &self.k)] {
            if list.len() != rank {
                return Err(Error::DimensionMismatch(format!(
                    "{name} has {} matrices, rank is {rank}",
                    list.len()
                )));
            }
            for (i, m) in list.iter().enumerate() {
                if m.rows() != self.dim || m.cols() != self.dim {
                    return Err(Error::DimensionMismatch(format!(
                        "{name}_{} is {}x{}, expected {d}x{d}",
                        i + 1,
                        m.rows(),
                        m.cols(),
                        d = self.dim
                    )));
                }
            }
        }
        if self.gram.rows() != self.dim || self.gram.cols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "gram is {}x{}, expected {d}x{d}",
                self.gram.rows(),
                self.gram.cols(),
                d = self.dim
            )));
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: Rep<S> = serde_json::from_str(s)?;
        r.check_shapes()?;
        Ok(r)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Image of a generator at 0-based node `i`.
    pub fn generator(&self, x: Generator, i: usize) -> &Mat<S> {
        match x {
            Generator::E => &self.e[i],
            Generator::F => &self.f[i],
            Generator::K => &self.k[i],
        }
    }

    /// Gram adjoint `G⁻¹ Xᴴ G`.
    pub fn dagger(&self, x: &Mat<S>) -> Result<Mat<S>> {
        Ok(self.gram.inverse()?.matmul(&x.adjoint()).matmul(&self.gram))
    }

    /// Change of basis `X ↦ T X T⁻¹` with `G ↦ T⁻ᴴ G T⁻¹`.
    pub fn similarity(&self, t: &Mat<S>) -> Result<Rep<S>> {
        if t.rows() != self.dim || t.cols() != self.dim {
            return Err(Error::DimensionMismatch("similarity matrix has the wrong size".into()));
        }
        let tinv = t.inverse()?;
        let conj = |m: &Mat<S>| t.matmul(m).matmul(&tinv);
        Ok(Rep {
            cartan: self.cartan.clone(),
            q: self.q.clone(),
            dim: self.dim,
            e: self.e.iter().map(conj).collect(),
            f: self.f.iter().map(conj).collect(),
            k: self.k.iter().map(conj).collect(),
            gram: tinv.adjoint().matmul(&self.gram).matmul(&tinv),
        })
    }

    /// The same representation over approximate scalars in an orthonormal
    /// basis (`T = G^{1/2}`, gram becomes the identity).
    pub fn to_orthonormal(&self) -> Result<Rep<Cplx>> {
        let g = self.gram.to_cplx();
        let t = if g.is_diagonal() {
            let mut entries = Vec::with_capacity(self.dim);
            for i in 0..self.dim {
                let x = &g[(i, i)];
                if !x.is_positive_real() {
                    return Err(Error::PositivityViolation("gram is not positive definite".into()));
                }
                entries.push(Cplx::from_real(x.re.sqrt()));
            }
            Mat::diag(entries)
        } else {
            psd_sqrt(&g, INTERNAL_TOL)?
        };
        let lifted = Rep {
            cartan: self.cartan.clone(),
            q: self.q.clone(),
            dim: self.dim,
            e: self.e.iter().map(Mat::to_cplx).collect(),
            f: self.f.iter().map(Mat::to_cplx).collect(),
            k: self.k.iter().map(Mat::to_cplx).collect(),
            gram: g,
        };
        let mut out = lifted.similarity(&t)?;
        out.gram = Mat::identity(self.dim);
        Ok(out)
    }

    /// Exponents `m` with `K_i = q_i^m` on each basis vector, when every
    /// `K_i` is diagonal with exact `q_i`-power entries.
    pub fn weights(&self) -> Option<Vec<WeightLabel>> {
        let rank = self.cartan.rank();
        let mut coords = vec![Vec::with_capacity(rank); self.dim];
        for i in 0..rank {
            if !self.k[i].is_diagonal() {
                return None;
            }
            let qi = q_node(&self.cartan, &self.q, i);
            for (v, c) in coords.iter_mut().enumerate() {
                c.push(power_exponent(&self.k[i][(v, v)], &qi)?);
            }
        }
        Some(coords.into_iter().map(WeightLabel::new).collect())
    }
}

/// The `m` with `x = q^m` exactly (exact scalars) or within the internal
/// tolerance (approximate scalars).
fn power_exponent<S: Scalar>(x: &S, q: &QScalar) -> Option<i64> {
    let c = x.to_cplx();
    if !c.is_positive_real() || q.is_one() {
        return None;
    }
    let m = (c.re.ln().to_f64() / q.to_f64().ln()).round() as i64;
    let diff = x.minus(&S::from_q(&q.pow(m)));
    if diff.is_negligible() {
        Some(m)
    } else {
        None
    }
}

fn base_rep<S: Scalar>(
    cartan: CartanDatum,
    q: QScalar,
    e: Vec<Mat<S>>,
    f: Vec<Mat<S>>,
    k: Vec<Mat<S>>,
    gram: Mat<S>,
) -> Rep<S> {
    Rep {
        dim: gram.rows(),
        cartan,
        q,
        e,
        f,
        k,
        gram,
    }
}

/// The one-dimensional counit representation `E = F = 0`, `K = 1`.
pub fn trivial_rep(cartan: &CartanDatum, q: &QScalar) -> Result<Rep> {
    require_positive(q)?;
    let rank = cartan.rank();
    Ok(base_rep(
        cartan.clone(),
        q.clone(),
        vec![Mat::zeros(1, 1); rank],
        vec![Mat::zeros(1, 1); rank],
        vec![Mat::identity(1); rank],
        Mat::identity(1),
    ))
}

/// The `(n+1)`-dimensional irreducible representation of `U_q(su(2))`.
///
/// Weight basis `v_0..v_n` with `K v_m = q^{n-2m} v_m`,
/// `F v_m = [m+1] v_{m+1}`, `E v_m = [n-m+1] v_{m-1}`, and the diagonal
/// Gram matrix with `g_0 = 1` making `E† = K F`.
pub fn irrep_su2(n: u32, q: &QScalar) -> Result<Rep> {
    require_generic(q)?;
    Ok(irrep_su2_any(n, q))
}

/// [`irrep_su2`] without the `q != 1` restriction; at `q = 1` this is the
/// classical module with Gram entries `C(n, m)`.
pub(crate) fn irrep_su2_any(n: u32, q: &QScalar) -> Rep {
    let n = n as usize;
    let d = n + 1;
    let ni = n as i64;
    let qint = |m: i64| q_int_unchecked(m, q);
    let mut e = Mat::zeros(d, d);
    let mut f = Mat::zeros(d, d);
    let mut grams = Vec::with_capacity(d);
    let mut g = QScalar::one();
    for m in 0..d {
        let mi = m as i64;
        grams.push(g.clone());
        if m + 1 < d {
            f[(m + 1, m)] = qint(mi + 1);
            g = &(&g * &qint(ni - mi)) / &(&qint(mi + 1) * &q.pow(ni - 2 * mi - 2));
        }
        if m >= 1 {
            e[(m - 1, m)] = qint(ni - mi + 1);
        }
    }
    let k = Mat::diag((0..d).map(|m| q.pow(ni - 2 * m as i64)).collect());
    base_rep(
        CartanDatum::type_a(1).expect("rank one"),
        q.clone(),
        vec![e],
        vec![f],
        vec![k],
        Mat::diag(grams),
    )
}

/// The `n`-dimensional vector representation of `U_q(sl_n)`.
pub fn vector_rep_sln(n: usize, q: &QScalar) -> Result<Rep> {
    require_generic(q)?;
    if n < 2 {
        return Err(Error::InvalidParameter(format!("vector_rep_sln needs n >= 2, got {n}")));
    }
    let cartan = CartanDatum::type_a(n - 1)?;
    let qinv = q.recip().expect("q > 0");
    let mut e = Vec::with_capacity(n - 1);
    let mut f = Vec::with_capacity(n - 1);
    let mut k = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        e.push(Mat::unit(n, i, i + 1));
        f.push(Mat::unit(n, i + 1, i));
        let mut ki = Mat::identity(n);
        ki[(i, i)] = q.clone();
        ki[(i + 1, i + 1)] = qinv.clone();
        k.push(ki);
    }
    let gram = Mat::diag((0..n).map(|i| q.pow(i as i64)).collect());
    Ok(base_rep(cartan, q.clone(), e, f, k, gram))
}

fn require_compatible<S: Scalar>(r1: &Rep<S>, r2: &Rep<S>) -> Result<()> {
    if r1.cartan != r2.cartan {
        return Err(Error::Incompatible(format!(
            "Cartan data differ ({} vs {})",
            r1.cartan.label, r2.cartan.label
        )));
    }
    if r1.q != r2.q {
        return Err(Error::Incompatible(format!(
            "q differs ({} vs {})",
            r1.q.pretty(),
            r2.q.pretty()
        )));
    }
    Ok(())
}

/// Tensor product through the coproduct; basis `v_a ⊗ w_b` at index
/// `a * dim2 + b`, Gram `G1 ⊗ G2`.
pub fn tensor<S: Scalar>(r1: &Rep<S>, r2: &Rep<S>) -> Result<Rep<S>> {
    require_compatible(r1, r2)?;
    r1.check_shapes()?;
    r2.check_shapes()?;
    let rank = r1.cartan.rank();
    let map = |x| -> Result<Vec<Mat<S>>> { (0..rank).map(|i| HopfConvention::coproduct(x, i + 1, r1, r2)).collect() };
    Ok(base_rep(
        r1.cartan.clone(),
        r1.q.clone(),
        map(Generator::E)?,
        map(Generator::F)?,
        map(Generator::K)?,
        r1.gram.kron(&r2.gram),
    ))
}

/// Block-diagonal direct sum.
pub fn direct_sum<S: Scalar>(reps: &[Rep<S>]) -> Result<Rep<S>> {
    let first = reps
        .first()
        .ok_or_else(|| Error::InvalidParameter("direct sum of no representations".into()))?;
    for r in reps {
        require_compatible(first, r)?;
        r.check_shapes()?;
    }
    let rank = first.cartan.rank();
    let sum = |pick: &dyn Fn(&Rep<S>) -> &Vec<Mat<S>>| -> Vec<Mat<S>> {
        (0..rank)
            .map(|i| Mat::block_diag(&reps.iter().map(|r| pick(r)[i].clone()).collect::<Vec<_>>()))
            .collect()
    };
    Ok(base_rep(
        first.cartan.clone(),
        first.q.clone(),
        sum(&|r| &r.e),
        sum(&|r| &r.f),
        sum(&|r| &r.k),
        Mat::block_diag(&reps.iter().map(|r| r.gram.clone()).collect::<Vec<_>>()),
    ))
}

/// The same module over `1/q`, through the Hopf `*`-isomorphism
/// `U_q ≅ U_{1/q}` fixing `K_i`:
/// `E_i' = q_i E_i† = q_i K_i F_i`, `F_i' = q_i⁻¹ F_i† = q_i⁻¹ E_i K_i⁻¹`.
pub fn invert_q<S: Scalar>(r: &Rep<S>) -> Result<Rep<S>> {
    require_positive(&r.q)?;
    r.check_shapes()?;
    let rank = r.cartan.rank();
    let mut e = Vec::with_capacity(rank);
    let mut f = Vec::with_capacity(rank);
    for i in 0..rank {
        let qi = S::from_q(&q_node(&r.cartan, &r.q, i));
        let qi_inv = qi.inverse().expect("q > 0");
        e.push(r.dagger(&r.e[i])?.scale(&qi));
        f.push(r.dagger(&r.f[i])?.scale(&qi_inv));
    }
    Ok(base_rep(
        r.cartan.clone(),
        r.q.recip().expect("q > 0"),
        e,
        f,
        r.k.clone(),
        r.gram.clone(),
    ))
}

/// One checked relation instance. Node indices are 1-based.
#[derive(Debug, Clone, Serialize)]
pub struct RelationEntry {
    pub relation: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    pub residual: Residual,
}

/// Residuals of every defining relation in a representation.
#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct RelationReport {
    pub entries: Vec<RelationEntry>,
}

impl RelationReport {
    /// Exact entries pass only at zero; approximate ones at `<= tol`.
    pub fn passes(&self, tol: f64) -> bool {
        self.entries.iter().all(|e| e.residual.passes(tol))
    }

    pub fn failing(&self, tol: f64) -> impl Iterator<Item = &RelationEntry> {
        self.entries.iter().filter(move |e| !e.residual.passes(tol))
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual.to_f64()).fold(0.0, f64::max)
    }

    pub fn get(&self, relation: &str, i: Option<usize>, j: Option<usize>) -> Option<&RelationEntry> {
        self.entries
            .iter()
            .find(|e| e.relation == relation && e.i == i && e.j == j)
    }
}

/// Quantum Serre sum `Σ_k (-1)^k C(1-a, k)_{q_i} X_i^{1-a-k} X_j X_i^k`.
pub fn serre_sum<S: Scalar>(xi: &Mat<S>, xj: &Mat<S>, a_ij: i64, qi: &QScalar) -> Result<Mat<S>> {
    let top = 1 - a_ij;
    let mut acc = Mat::zeros(xi.rows(), xi.cols());
    for k in 0..=top {
        let mut c = q_binomial(top, k, qi)?;
        if k % 2 == 1 {
            c = -c;
        }
        let term = xi.pow((top - k) as u32).matmul(xj).matmul(&xi.pow(k as u32));
        acc.add_scaled_assign(&S::from_q(&c), &term);
    }
    Ok(acc)
}

fn weight_module_residual<S: Scalar>(k: &Mat<S>, kinv: &Mat<S>, qi: &QScalar) -> Residual {
    let n = k.rows();
    if k.is_diagonal() {
        let mut worst = Mat::zeros(n, 1);
        let lnq = qi.to_f64().ln();
        for v in 0..n {
            let x = &k[(v, v)];
            let c = x.to_cplx();
            if !c.is_positive_real() {
                return Residual::flag(S::EXACT, false);
            }
            let m = (c.re.ln().to_f64() / lnq).round() as i64;
            worst[(v, 0)] = x.minus(&S::from_q(&qi.pow(m)));
        }
        return worst.residual();
    }
    // Diagonalizable with spectrum in q_i^Z ⟺ Π_m (K - q_i^m) = 0 over a
    // window containing every eigenvalue.
    let bound = k
        .to_cplx()
        .frobenius()
        .to_f64()
        .max(kinv.to_cplx().frobenius().to_f64());
    let window = (bound.ln() / qi.to_f64().ln().abs()).ceil() as i64 + 1;
    let window = window.clamp(1, 4096);
    let mut prod = Mat::identity(n);
    let bound_q = QScalar::from_integer(bound.ceil() as i64 + 1);
    for m in -window..=window {
        let qm = qi.pow(m);
        let mut factor = k.clone();
        for v in 0..n {
            factor[(v, v)] = factor[(v, v)].minus(&S::from_q(&qm));
        }
        let norm = (&bound_q + &qm).recip().expect("positive");
        prod = prod.matmul(&factor).scale(&S::from_q(&norm));
    }
    prod.residual()
}

fn gram_residual<S: Scalar>(g: &Mat<S>) -> Residual {
    let herm = (g - &g.adjoint()).residual();
    // Symmetric elimination without pivoting: positive definite iff every
    // pivot is a positive real.
    let n = g.rows();
    let mut a = g.clone();
    let mut ok = true;
    for k in 0..n {
        let p = a[(k, k)].clone();
        if !p.is_positive_real() {
            ok = false;
            break;
        }
        let pinv = p.inverse().expect("positive pivot");
        for i in k + 1..n {
            let factor = a[(i, k)].times(&pinv).negated();
            if factor.is_zero() {
                continue;
            }
            for j in k..n {
                let akj = a[(k, j)].clone();
                a[(i, j)].add_mul_assign(&factor, &akj);
            }
        }
    }
    herm.max(Residual::flag(S::EXACT, ok))
}

/// Relations of `U_q(g)` among the given operators: invertibility and
/// commutation of the `K_i`, the `K`-scalings, `[E_i, F_j]` and the quantum
/// Serre relations. Returns the entries and, when every `K_i` is invertible,
/// the inverses.
pub(crate) fn algebra_relations<S: Scalar>(
    cartan: &CartanDatum,
    q: &QScalar,
    e: &[Mat<S>],
    f: &[Mat<S>],
    k: &[Mat<S>],
) -> Result<(Vec<RelationEntry>, Option<Vec<Mat<S>>>)> {
    require_generic(q)?;
    let rank = cartan.rank();
    let mut entries = Vec::new();
    let mut push = |relation, i: Option<usize>, j: Option<usize>, residual| {
        entries.push(RelationEntry {
            relation,
            i: i.map(|x| x + 1),
            j: j.map(|x| x + 1),
            residual,
        })
    };

    let mut kinv = Vec::with_capacity(rank);
    for i in 0..rank {
        match k[i].inverse() {
            Ok(inv) => {
                push("k_invertible", Some(i), None, Residual::flag(S::EXACT, true));
                kinv.push(inv);
            }
            Err(_) => {
                push("k_invertible", Some(i), None, Residual::flag(S::EXACT, false));
                return Ok((entries, None));
            }
        }
    }
    let qis: Vec<QScalar> = (0..rank).map(|i| q_node(cartan, q, i)).collect();

    for i in 0..rank {
        for j in i + 1..rank {
            push("k_commute", Some(i), Some(j), k[i].commutator(&k[j]).residual());
        }
    }
    for i in 0..rank {
        let qi = &qis[i];
        for j in 0..rank {
            let a = cartan.entry(i, j);
            let conj = |x: &Mat<S>| k[i].matmul(x).matmul(&kinv[i]);
            let ke = &conj(&e[j]) - &e[j].scale(&S::from_q(&qi.pow(a)));
            push("ke", Some(i), Some(j), ke.residual());
            let kf = &conj(&f[j]) - &f[j].scale(&S::from_q(&qi.pow(-a)));
            push("kf", Some(i), Some(j), kf.residual());
            let mut ef = e[i].commutator(&f[j]);
            if i == j {
                let denom = qi - &qi.recip().expect("q > 0");
                let c = S::from_q(&denom.recip().expect("q != 1"));
                ef.sub_assign(&(&k[i] - &kinv[i]).scale(&c));
            }
            push("ef", Some(i), Some(j), ef.residual());
        }
    }
    for i in 0..rank {
        for j in 0..rank {
            if i == j {
                continue;
            }
            let a = cartan.entry(i, j);
            push(
                "serre_e",
                Some(i),
                Some(j),
                serre_sum(&e[i], &e[j], a, &qis[i])?.residual(),
            );
            push(
                "serre_f",
                Some(i),
                Some(j),
                serre_sum(&f[i], &f[j], a, &qis[i])?.residual(),
            );
        }
    }
    Ok((entries, Some(kinv)))
}

/// Checks relations `K_iK_j = K_jK_i`, `K_i E_j K_i⁻¹ = q_i^{a_ij} E_j`,
/// `K_i F_j K_i⁻¹ = q_i^{-a_ij} F_j`, `[E_i, F_j] = δ_ij (K_i - K_i⁻¹)/(q_i - q_i⁻¹)`,
/// the quantum Serre relations, the `*`-structure, the antipode axiom, the
/// weight-module property and positivity of the Gram matrix.
///
/// Failing relations are report entries. Shape errors and `q = 1` are
/// errors.
pub fn verify_relations<S: Scalar>(r: &Rep<S>) -> Result<RelationReport> {
    r.check_shapes()?;
    let (mut entries, kinv) = algebra_relations(&r.cartan, &r.q, &r.e, &r.f, &r.k)?;
    let Some(kinv) = kinv else {
        return Ok(RelationReport { entries });
    };
    let rank = r.cartan.rank();
    let mut push = |relation, i: Option<usize>, j: Option<usize>, residual| {
        entries.push(RelationEntry {
            relation,
            i: i.map(|x| x + 1),
            j: j.map(|x| x + 1),
            residual,
        })
    };
    let gram_inv = r.gram.inverse().ok();
    let dag = |x: &Mat<S>| gram_inv.as_ref().map(|gi| gi.matmul(&x.adjoint()).matmul(&r.gram));
    let qis: Vec<QScalar> = (0..rank).map(|i| q_node(&r.cartan, &r.q, i)).collect();

    for i in 0..rank {
        let star = |x: &Mat<S>, target: Mat<S>| match dag(x) {
            Some(d) => (&d - &target).residual(),
            None => Residual::flag(S::EXACT, false),
        };
        push("star_e", Some(i), None, star(&r.e[i], r.k[i].matmul(&r.f[i])));
        push("star_f", Some(i), None, star(&r.f[i], r.e[i].matmul(&kinv[i])));
        push("star_k", Some(i), None, star(&r.k[i], r.k[i].clone()));
    }
    for i in 0..rank {
        for (x, name) in [
            (Generator::E, "antipode_e"),
            (Generator::F, "antipode_f"),
            (Generator::K, "antipode_k"),
        ] {
            let mut lhs = HopfConvention::antipode_axiom(x, i + 1, r)?;
            let eps = S::from_q(&HopfConvention::counit(x));
            lhs.sub_assign(&Mat::identity(r.dim).scale(&eps));
            push(name, Some(i), None, lhs.residual());
        }
    }
    for i in 0..rank {
        push(
            "weight_module",
            Some(i),
            None,
            weight_module_residual(&r.k[i], &kinv[i], &qis[i]),
        );
    }
    push("gram_positive", None, None, gram_residual(&r.gram));
    Ok(RelationReport { entries })
}
