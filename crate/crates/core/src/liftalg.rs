//! Lifting `*`-actions of `U_q(g)` on `A = ⊕_j M_{n_j}` to
//! `*`-representations on `H = ⊕_j ℂ^{n_j}`.
//!
//! Elements of `A` are vectorized block by block, each block row-major, so a
//! linear map on `A` is a `D x D` matrix with `D = Σ n_j²`; the matrix unit
//! `E_pq` of block `j` sits at index `offset_j + p n_j + q`. Node indices in
//! the public API are 1-based.
//!
//! Per node the lift finds `k` with `K(a) = k a k⁻¹`, then `e` and `f` with
//! `E(a) = e a k⁻¹ - a e k⁻¹` and `F(a) = f a - k⁻¹ a k f`, and finally
//! rescales `e` and `k` per block so that `[e, f] = (k - k⁻¹)/(q - q⁻¹)`.
//! For `q > 1` the action is first transported to `1/q`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cartan::{q_node, CartanDatum};
use crate::error::{Error, LiftStage, Result};
use crate::linalg::dense::{hermitian_eigen, psd_kernel, psd_sqrt, random_unitary, rank_rtol};
use crate::linalg::{mat_list_serde, mat_serde, Mat, Residual, Scalar};
use crate::qnum::approx::{INTERNAL_TOL, REPORT_TOL};
use crate::qnum::{require_generic, Cplx, QScalar, Real};
use crate::repcore::{
    algebra_relations, direct_sum, irrep_su2, serre_sum, Generator, RelationEntry, RelationReport, Rep,
};

/// Names of the residuals recorded by [`lift_action`].
pub const RESIDUAL_NAMES: [&str; 10] = [
    "k_implements",
    "e_coboundary",
    "f_coboundary",
    "kek_scaling",
    "kfk_scaling",
    "ef_commutator",
    "star_identity",
    "serre_x",
    "serre_y",
    "module_compat",
];

/// Index bookkeeping for `A = ⊕ M_{n_j}`.
#[derive(Debug, Clone)]
struct Layout {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    dim: usize,
}

impl Layout {
    fn new(sizes: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut dim = 0;
        for &n in sizes {
            offsets.push(dim);
            dim += n * n;
        }
        Layout {
            sizes: sizes.to_vec(),
            offsets,
            dim,
        }
    }

    fn index(&self, j: usize, p: usize, q: usize) -> usize {
        self.offsets[j] + p * self.sizes[j] + q
    }

    /// `(block, p, q, index)` for every matrix unit.
    fn units(&self) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
        self.sizes
            .iter()
            .enumerate()
            .flat_map(move |(j, &n)| (0..n * n).map(move |t| (j, t / n, t % n, self.offsets[j] + t)))
    }

    fn locate(&self, idx: usize) -> (usize, usize, usize) {
        let j = self.offsets.partition_point(|&o| o <= idx) - 1;
        let t = idx - self.offsets[j];
        (j, t / self.sizes[j], t % self.sizes[j])
    }

    fn split<S: Scalar>(&self, get: impl Fn(usize) -> S) -> Vec<Mat<S>> {
        self.sizes
            .iter()
            .zip(&self.offsets)
            .map(|(&n, &off)| Mat::from_fn(n, n, |p, q| get(off + p * n + q)))
            .collect()
    }

    fn column<S: Scalar>(&self, m: &Mat<S>, c: usize) -> Vec<Mat<S>> {
        self.split(|r| m[(r, c)].clone())
    }

    fn row<S: Scalar>(&self, m: &Mat<S>, r: usize) -> Vec<Mat<S>> {
        self.split(|c| m[(r, c)].clone())
    }

    fn flatten<S: Scalar>(&self, a: &[Mat<S>]) -> Vec<S> {
        a.iter().flat_map(|b| b.data().iter().cloned()).collect()
    }

    fn unit<S: Scalar>(&self, idx: usize) -> Vec<Mat<S>> {
        let (j, p, q) = self.locate(idx);
        let mut out: Vec<Mat<S>> = self.sizes.iter().map(|&n| Mat::zeros(n, n)).collect();
        out[j][(p, q)] = S::one();
        out
    }

    /// Index of the product of two matrix units, if nonzero.
    fn product(&self, u: usize, v: usize) -> Option<usize> {
        let (j, p, q) = self.locate(u);
        let (l, r, s) = self.locate(v);
        (j == l && q == r).then(|| self.index(j, p, s))
    }

    /// Frobenius norm of the entries of `m` linking different blocks.
    fn leak(&self, m: &Mat<Cplx>) -> f64 {
        let mut acc = Real::zero();
        for c in 0..self.dim {
            let (jc, _, _) = self.locate(c);
            for r in 0..self.dim {
                if self.locate(r).0 != jc {
                    acc += &m[(r, c)].norm_sqr();
                }
            }
        }
        acc.sqrt().to_f64()
    }
}

fn elem_mul<S: Scalar>(a: &[Mat<S>], b: &[Mat<S>]) -> Vec<Mat<S>> {
    a.iter().zip(b).map(|(x, y)| x.matmul(y)).collect()
}

fn elem_add<S: Scalar>(a: &[Mat<S>], b: &[Mat<S>]) -> Vec<Mat<S>> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn elem_sub<S: Scalar>(a: &[Mat<S>], b: &[Mat<S>]) -> Vec<Mat<S>> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn elem_residual<S: Scalar>(a: &[Mat<S>]) -> Residual {
    a.iter()
        .fold(Mat::<S>::zeros(1, 1).residual(), |acc, b| acc.max(b.residual()))
}

fn apply_map<S: Scalar>(layout: &Layout, map: &Mat<S>, a: &[Mat<S>]) -> Vec<Mat<S>> {
    let v = Mat::column(layout.flatten(a));
    let img = map.matmul(&v);
    layout.split(|r| img[(r, 0)].clone())
}

/// `(a ↦ l_j a r_j) ∘ X`.
fn left_compose<S: Scalar>(layout: &Layout, l: &[Mat<S>], r: &[Mat<S>], x: &Mat<S>) -> Mat<S> {
    let mut out = Mat::zeros(layout.dim, layout.dim);
    for c in 0..layout.dim {
        let col = layout.column(x, c);
        let img: Vec<Mat<S>> = col
            .iter()
            .enumerate()
            .map(|(j, a)| l[j].matmul(a).matmul(&r[j]))
            .collect();
        for (row, v) in layout.flatten(&img).into_iter().enumerate() {
            out[(row, c)] = v;
        }
    }
    out
}

/// `X ∘ (a ↦ l_j a r_j)`. Row `r` of `X`, reshaped to `R`, becomes
/// `l_jᵀ R r_jᵀ`.
fn right_compose<S: Scalar>(layout: &Layout, x: &Mat<S>, l: &[Mat<S>], r: &[Mat<S>]) -> Mat<S> {
    let lt: Vec<Mat<S>> = l.iter().map(Mat::transpose).collect();
    let rt: Vec<Mat<S>> = r.iter().map(Mat::transpose).collect();
    let mut out = Mat::zeros(layout.dim, layout.dim);
    for row in 0..layout.dim {
        let rr = layout.row(x, row);
        let img: Vec<Mat<S>> = rr
            .iter()
            .enumerate()
            .map(|(j, a)| lt[j].matmul(a).matmul(&rt[j]))
            .collect();
        for (c, v) in layout.flatten(&img).into_iter().enumerate() {
            out[(row, c)] = v;
        }
    }
    out
}

/// Rank-one matrix `x yᵀ`.
fn outer<S: Scalar>(x: &[S], y: &[S]) -> Mat<S> {
    Mat::from_fn(x.len(), y.len(), |r, s| {
        if x[r].is_zero() {
            S::zero()
        } else {
            x[r].times(&y[s])
        }
    })
}

fn row_of<S: Scalar>(m: &Mat<S>, r: usize) -> Vec<S> {
    (0..m.cols()).map(|c| m[(r, c)].clone()).collect()
}

/// Matrix whose only nonzero row is `r`, equal to `v`.
fn row_placed<S: Scalar>(n: usize, r: usize, v: &[S]) -> Mat<S> {
    let mut m = Mat::zeros(n, v.len());
    for (c, x) in v.iter().enumerate() {
        m[(r, c)] = x.clone();
    }
    m
}

/// Matrix whose only nonzero column is `c`, equal to `v`.
fn col_placed<S: Scalar>(n: usize, c: usize, v: &[S]) -> Mat<S> {
    let mut m = Mat::zeros(v.len(), n);
    for (r, x) in v.iter().enumerate() {
        m[(r, c)] = x.clone();
    }
    m
}

mod opt_mat_list {
    use super::*;
    use serde::de::Error as _;

    pub fn serialize<S: Scalar, Ser: Serializer>(m: &Option<Vec<Mat<S>>>, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        match m {
            Some(list) => mat_list_serde::serialize(list, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, S: Scalar, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Mat<S>>>, D::Error> {
        let raw: Option<Vec<serde_json::Value>> = Option::deserialize(d)?;
        raw.map(|list| {
            list.iter()
                .map(|m| mat_serde::from_json(m).map_err(D::Error::custom))
                .collect()
        })
        .transpose()
    }
}

/// A `*`-action of `U_q(g)` on `A = ⊕ M_{n_j}`: one `D x D` matrix per node
/// and generator.
///
/// The involution on block `j` is `a* = G_j⁻¹ aᴴ G_j` when `gram` is given,
/// and `aᴴ` otherwise.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct ModuleAlgebraAction<S: Scalar = QScalar> {
    pub cartan: CartanDatum,
    pub q: QScalar,
    pub blocks: Vec<usize>,
    #[serde(rename = "E", with = "mat_list_serde")]
    pub e: Vec<Mat<S>>,
    #[serde(rename = "F", with = "mat_list_serde")]
    pub f: Vec<Mat<S>>,
    #[serde(rename = "K", with = "mat_list_serde")]
    pub k: Vec<Mat<S>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_mat_list")]
    pub gram: Option<Vec<Mat<S>>>,
}

impl<S: Scalar> ModuleAlgebraAction<S> {
    /// `D = Σ n_j²`.
    pub fn algebra_dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    /// `Σ n_j`.
    pub fn hilbert_dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    fn layout(&self) -> Layout {
        Layout::new(&self.blocks)
    }

    pub fn check_shapes(&self) -> Result<()> {
        if self.blocks.is_empty() || self.blocks.contains(&0) {
            return Err(Error::DimensionMismatch("block sizes must be positive".into()));
        }
        let d = self.algebra_dim();
        let rank = self.cartan.rank();
        for (name, list) in [("E", &self.e), ("F", &self.f), ("K", &self.k)] {
            if list.len() != rank {
                return Err(Error::DimensionMismatch(format!(
                    "{name} has {} maps, rank is {rank}",
                    list.len()
                )));
            }
            if let Some(m) = list.iter().find(|m| m.rows() != d || m.cols() != d) {
                return Err(Error::DimensionMismatch(format!(
                    "{name} map is {}x{}, expected {d}x{d}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        if let Some(g) = &self.gram {
            let ok = g.len() == self.blocks.len()
                && g.iter().zip(&self.blocks).all(|(m, &n)| m.rows() == n && m.cols() == n);
            if !ok {
                return Err(Error::DimensionMismatch(
                    "gram must have one n_j x n_j matrix per block".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let a: Self = serde_json::from_str(s)?;
        a.check_shapes()?;
        Ok(a)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// The map of generator `x` at 1-based node `i`.
    pub fn map(&self, x: Generator, i: usize) -> Result<&Mat<S>> {
        self.cartan.check_node(i)?;
        Ok(match x {
            Generator::E => &self.e[i - 1],
            Generator::F => &self.f[i - 1],
            Generator::K => &self.k[i - 1],
        })
    }

    /// Applies the map of `x` at 1-based node `i` to a block element.
    pub fn apply(&self, x: Generator, i: usize, a: &[Mat<S>]) -> Result<Vec<Mat<S>>> {
        let m = self.map(x, i)?;
        Ok(apply_map(&self.layout(), m, a))
    }

    pub fn involution(&self, a: &[Mat<S>]) -> Result<Vec<Mat<S>>> {
        match &self.gram {
            None => Ok(a.iter().map(Mat::adjoint).collect()),
            Some(g) => a
                .iter()
                .zip(g)
                .map(|(b, gj)| Ok(gj.inverse()?.matmul(&b.adjoint()).matmul(gj)))
                .collect(),
        }
    }

    /// Checks every module-algebra axiom over the matrix-unit basis: `K_i`
    /// fixes each block and is multiplicative, the twisted Leibniz rules
    /// `E(ab) = E(a)K(b) + aE(b)` and `F(ab) = F(a)b + K⁻¹(a)F(b)`, the
    /// `*`-compatibility `(E(a))* = -F(a*)`, `(F(a))* = -E(a*)`,
    /// `(K(a))* = K⁻¹(a*)`, and the defining relations of `U_q(g)` among the
    /// maps themselves. Cost grows like `D²`; intended for small algebras.
    pub fn verify(&self) -> Result<RelationReport> {
        self.check_shapes()?;
        let (mut entries, kinv) = algebra_relations(&self.cartan, &self.q, &self.e, &self.f, &self.k)?;
        let Some(kinv) = kinv else {
            return Ok(RelationReport { entries });
        };
        let layout = self.layout();
        let d = layout.dim;
        let zero = Mat::<S>::zeros(1, 1).residual();
        let zero_elem: Vec<Mat<S>> = self.blocks.iter().map(|&n| Mat::zeros(n, n)).collect();
        let units: Vec<Vec<Mat<S>>> = (0..d).map(|u| layout.unit(u)).collect();
        let stars: Vec<Vec<Mat<S>>> = units.iter().map(|u| self.involution(u)).collect::<Result<_>>()?;
        for i in 0..self.cartan.rank() {
            let images = |m: &Mat<S>| -> Vec<Vec<Mat<S>>> { (0..d).map(|c| layout.column(m, c)).collect() };
            let (ei, fi, ki, kii) = (
                images(&self.e[i]),
                images(&self.f[i]),
                images(&self.k[i]),
                images(&kinv[i]),
            );
            let mut fixes = zero.clone();
            for c in 0..d {
                let (jc, _, _) = layout.locate(c);
                for (j, b) in ki[c].iter().enumerate() {
                    if j != jc {
                        fixes = fixes.max(b.residual());
                    }
                }
            }
            let (mut auto, mut leib_e, mut leib_f) = (zero.clone(), zero.clone(), zero.clone());
            for u in 0..d {
                for v in 0..d {
                    let uv = layout.product(u, v);
                    let at = |img: &Vec<Vec<Mat<S>>>| uv.map_or(&zero_elem, |w| &img[w]).clone();
                    auto = auto.max(elem_residual(&elem_sub(&at(&ki), &elem_mul(&ki[u], &ki[v]))));
                    let rhs = elem_add(&elem_mul(&ei[u], &ki[v]), &elem_mul(&units[u], &ei[v]));
                    leib_e = leib_e.max(elem_residual(&elem_sub(&at(&ei), &rhs)));
                    let rhs = elem_add(&elem_mul(&fi[u], &units[v]), &elem_mul(&kii[u], &fi[v]));
                    leib_f = leib_f.max(elem_residual(&elem_sub(&at(&fi), &rhs)));
                }
            }
            let (mut star_e, mut star_f, mut star_k) = (zero.clone(), zero.clone(), zero.clone());
            for u in 0..d {
                let f_star = apply_map(&layout, &self.f[i], &stars[u]);
                star_e = star_e.max(elem_residual(&elem_add(&self.involution(&ei[u])?, &f_star)));
                let e_star = apply_map(&layout, &self.e[i], &stars[u]);
                star_f = star_f.max(elem_residual(&elem_add(&self.involution(&fi[u])?, &e_star)));
                let kinv_star = apply_map(&layout, &kinv[i], &stars[u]);
                star_k = star_k.max(elem_residual(&elem_sub(&self.involution(&ki[u])?, &kinv_star)));
            }
            for (relation, residual) in [
                ("k_fixes_blocks", fixes),
                ("k_automorphism", auto),
                ("leibniz_e", leib_e),
                ("leibniz_f", leib_f),
                ("star_e", star_e),
                ("star_f", star_f),
                ("star_k", star_k),
            ] {
                entries.push(RelationEntry {
                    relation,
                    i: Some(i + 1),
                    j: None,
                    residual,
                });
            }
        }
        Ok(RelationReport { entries })
    }

    pub fn to_cplx(&self) -> ModuleAlgebraAction<Cplx> {
        let conv = |l: &Vec<Mat<S>>| l.iter().map(Mat::to_cplx).collect();
        ModuleAlgebraAction {
            cartan: self.cartan.clone(),
            q: self.q.clone(),
            blocks: self.blocks.clone(),
            e: conv(&self.e),
            f: conv(&self.f),
            k: conv(&self.k),
            gram: self.gram.as_ref().map(conv),
        }
    }

    /// The isomorphic action for the standard involution `a* = aᴴ`, obtained
    /// by transporting along `a ↦ G^{1/2} a G^{-1/2}`.
    pub fn to_standard(&self) -> Result<ModuleAlgebraAction<Cplx>> {
        self.check_shapes()?;
        let mut out = self.to_cplx();
        let Some(gram) = out.gram.take() else {
            return Ok(out);
        };
        let mut t = Vec::with_capacity(gram.len());
        let mut tinv = Vec::with_capacity(gram.len());
        for g in &gram {
            let root = if g.is_diagonal() {
                let mut d = Vec::with_capacity(g.rows());
                for i in 0..g.rows() {
                    if !g[(i, i)].is_positive_real() {
                        return Err(Error::PositivityViolation("gram is not positive definite".into()));
                    }
                    d.push(Cplx::from_real(g[(i, i)].re.sqrt()));
                }
                Mat::diag(d)
            } else {
                psd_sqrt(g, INTERNAL_TOL)?
            };
            tinv.push(root.inverse()?);
            t.push(root);
        }
        let layout = out.layout();
        let transport = |x: &Mat<Cplx>| left_compose(&layout, &t, &tinv, &right_compose(&layout, x, &tinv, &t));
        out.e = out.e.iter().map(transport).collect();
        out.f = out.f.iter().map(transport).collect();
        out.k = out.k.iter().map(transport).collect();
        Ok(out)
    }
}

impl ModuleAlgebraAction<Cplx> {
    /// Transports the action along the inner automorphism `a ↦ u a u†` for
    /// unitaries `u = ⊕ u_j`.
    pub fn conjugate(&self, u: &[Mat<Cplx>]) -> Result<Self> {
        self.check_shapes()?;
        if u.len() != self.blocks.len() || u.iter().zip(&self.blocks).any(|(m, &n)| m.rows() != n || m.cols() != n) {
            return Err(Error::DimensionMismatch(
                "one n_j x n_j unitary per block is required".into(),
            ));
        }
        let layout = self.layout();
        let ud: Vec<Mat<Cplx>> = u.iter().map(Mat::adjoint).collect();
        let transport = |x: &Mat<Cplx>| left_compose(&layout, u, &ud, &right_compose(&layout, x, &ud, u));
        Ok(ModuleAlgebraAction {
            cartan: self.cartan.clone(),
            q: self.q.clone(),
            blocks: self.blocks.clone(),
            e: self.e.iter().map(transport).collect(),
            f: self.f.iter().map(transport).collect(),
            k: self.k.iter().map(transport).collect(),
            gram: self.gram.as_ref().map(|g| {
                g.iter()
                    .zip(u)
                    .map(|(gj, uj)| uj.matmul(gj).matmul(&uj.adjoint()))
                    .collect()
            }),
        })
    }
}

/// The adjoint action of `r` on the block-diagonal subalgebra
/// `⊕ M_{n_j} ⊂ End(V)`: `K.a = K a K⁻¹`, `E.a = E a K⁻¹ - a E K⁻¹`,
/// `F.a = F a - K⁻¹ a K F`.
///
/// Every generator and the Gram matrix of `r` must be block diagonal for
/// the partition. The involution on `A` is the Gram adjoint of `r`.
pub fn induce_action<S: Scalar>(r: &Rep<S>, blocks: &[usize]) -> Result<ModuleAlgebraAction<S>> {
    r.check_shapes()?;
    if blocks.is_empty() || blocks.contains(&0) || blocks.iter().sum::<usize>() != r.dim {
        return Err(Error::IncompatiblePartition(format!(
            "blocks {blocks:?} do not partition dimension {}",
            r.dim
        )));
    }
    let mut starts = Vec::with_capacity(blocks.len());
    let mut acc = 0;
    for &n in blocks {
        starts.push(acc);
        acc += n;
    }
    let block_of = |v: usize| starts.partition_point(|&s| s <= v) - 1;
    let off_block =
        |m: &Mat<S>| (0..r.dim).any(|a| (0..r.dim).any(|b| block_of(a) != block_of(b) && !m[(a, b)].is_negligible()));
    let all = r.e.iter().chain(&r.f).chain(&r.k).chain(std::iter::once(&r.gram));
    if all.into_iter().any(off_block) {
        return Err(Error::IncompatiblePartition(format!(
            "the representation is not block diagonal for blocks {blocks:?}"
        )));
    }
    let layout = Layout::new(blocks);
    let d = layout.dim;
    let piece = |m: &Mat<S>, j: usize| m.block(starts[j], starts[j], blocks[j], blocks[j]);
    let (mut e_maps, mut f_maps, mut k_maps) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..r.cartan.rank() {
        let (mut em, mut fm, mut km) = (Mat::zeros(d, d), Mat::zeros(d, d), Mat::zeros(d, d));
        for (j, &n) in blocks.iter().enumerate() {
            let (e, f, k) = (piece(&r.e[i], j), piece(&r.f[i], j), piece(&r.k[i], j));
            let kinv = k.inverse()?;
            let kf = k.matmul(&f);
            let ekinv = e.matmul(&kinv);
            for p in 0..n {
                let (e_p, f_p, k_p, kinv_p) = (e.col(p), f.col(p), k.col(p), kinv.col(p));
                for q in 0..n {
                    let kinv_q = row_of(&kinv, q);
                    let ea = &outer(&e_p, &kinv_q) - &row_placed(n, p, &row_of(&ekinv, q));
                    let fa = &col_placed(n, q, &f_p) - &outer(&kinv_p, &row_of(&kf, q));
                    let ka = outer(&k_p, &kinv_q);
                    let c = layout.index(j, p, q);
                    for (img, target) in [(ea, &mut em), (fa, &mut fm), (ka, &mut km)] {
                        for (t, v) in img.into_data().into_iter().enumerate() {
                            target[(layout.offsets[j] + t, c)] = v;
                        }
                    }
                }
            }
        }
        e_maps.push(em);
        f_maps.push(fm);
        k_maps.push(km);
    }
    let grams: Vec<Mat<S>> = (0..blocks.len()).map(|j| piece(&r.gram, j)).collect();
    let standard = grams.iter().all(|g| (g - &Mat::identity(g.rows())).is_zero());
    Ok(ModuleAlgebraAction {
        cartan: r.cartan.clone(),
        q: r.q.clone(),
        blocks: blocks.to_vec(),
        e: e_maps,
        f: f_maps,
        k: k_maps,
        gram: (!standard).then_some(grams),
    })
}

/// The action of `U_{1/q}` obtained by composing with the `*`-isomorphism
/// `E'_i = q_i K_i F_i`, `F'_i = q_i⁻¹ E_i K_i⁻¹`, `K'_i = K_i`.
pub fn invert_q_action<S: Scalar>(action: &ModuleAlgebraAction<S>) -> Result<ModuleAlgebraAction<S>> {
    action.check_shapes()?;
    require_generic(&action.q)?;
    let mut e = Vec::new();
    let mut f = Vec::new();
    for i in 0..action.cartan.rank() {
        let qi = q_node(&action.cartan, &action.q, i);
        let qinv = qi.recip().expect("q > 0");
        e.push(action.k[i].matmul(&action.f[i]).scale(&S::from_q(&qi)));
        f.push(action.e[i].matmul(&action.k[i].inverse()?).scale(&S::from_q(&qinv)));
    }
    Ok(ModuleAlgebraAction {
        cartan: action.cartan.clone(),
        q: action.q.recip().expect("q > 0"),
        blocks: action.blocks.clone(),
        e,
        f,
        k: action.k.clone(),
        gram: action.gram.clone(),
    })
}

/// Per-block matrices on `H = ⊕ ℂ^{n_j}`.
pub type BlockMats = Vec<Mat<Cplx>>;

fn block_inverses(m: &[Mat<Cplx>]) -> Result<BlockMats> {
    m.iter().map(Mat::inverse).collect()
}

/// `sqrt(Σ_a ‖X(a) - pred(a)‖²)` over the matrix units `a`, where `pred`
/// lives in the block of `a`.
fn map_residual(layout: &Layout, map: &Mat<Cplx>, mut pred: impl FnMut(usize, usize, usize) -> Mat<Cplx>) -> f64 {
    let mut acc = Real::zero();
    for (j, p, q, c) in layout.units() {
        let expected = pred(j, p, q);
        let (off, n) = (layout.offsets[j], layout.sizes[j]);
        for r in 0..layout.dim {
            let x = &map[(r, c)];
            if r >= off && r < off + n * n {
                let t = r - off;
                acc += &(x - &expected[(t / n, t % n)]).norm_sqr();
            } else {
                acc += &x.norm_sqr();
            }
        }
    }
    acc.sqrt().to_f64()
}

fn k_residual(layout: &Layout, kmap: &Mat<Cplx>, k: &[Mat<Cplx>], kinv: &[Mat<Cplx>]) -> f64 {
    map_residual(layout, kmap, |j, p, q| outer(&k[j].col(p), &row_of(&kinv[j], q)))
}

fn e_residual(layout: &Layout, emap: &Mat<Cplx>, e: &[Mat<Cplx>], kinv: &[Mat<Cplx>]) -> f64 {
    let ekinv: BlockMats = e.iter().zip(kinv).map(|(x, y)| x.matmul(y)).collect();
    map_residual(layout, emap, |j, p, q| {
        &outer(&e[j].col(p), &row_of(&kinv[j], q)) - &row_placed(layout.sizes[j], p, &row_of(&ekinv[j], q))
    })
}

fn f_residual(layout: &Layout, fmap: &Mat<Cplx>, f: &[Mat<Cplx>], k: &[Mat<Cplx>], kinv: &[Mat<Cplx>]) -> f64 {
    let kf: BlockMats = k.iter().zip(f).map(|(x, y)| x.matmul(y)).collect();
    map_residual(layout, fmap, |j, p, q| {
        &col_placed(layout.sizes[j], q, &f[j].col(p)) - &outer(&kinv[j].col(p), &row_of(&kf[j], q))
    })
}

fn implement_k_raw(layout: &Layout, kmap: &Mat<Cplx>, tol: f64) -> Result<(BlockMats, BlockMats)> {
    let leak = layout.leak(kmap);
    if leak > tol {
        return Err(Error::DegenerateInput(format!(
            "K moves elements between blocks (leak {leak:e})"
        )));
    }
    let mut ks = Vec::with_capacity(layout.sizes.len());
    let mut kinvs = Vec::with_capacity(layout.sizes.len());
    for (j, &n) in layout.sizes.iter().enumerate() {
        // Normal operator of s ↦ (K(E_pq) s - s E_pq)_{pq} on row-major vec(s).
        let images: Vec<Mat<Cplx>> = (0..n * n)
            .map(|t| layout.column(kmap, layout.offsets[j] + t).swap_remove(j))
            .collect();
        let mut gram_sum = Mat::<Cplx>::zeros(n, n);
        for img in &images {
            gram_sum.add_assign(&img.adjoint().matmul(img));
        }
        let m = n * n;
        let mut normal = Mat::<Cplx>::zeros(m, m);
        for a in 0..n {
            for c in 0..n {
                for b in 0..n {
                    normal[(a * n + b, c * n + b)] = gram_sum[(a, c)].clone();
                }
            }
        }
        for (t, img) in images.iter().enumerate() {
            let (p, q) = (t / n, t % n);
            for a in 0..n {
                for c in 0..n {
                    // -K_pqᴴ ⊗ E_qp - K_pq ⊗ E_pq
                    normal[(a * n + q, c * n + p)] -= &img[(c, a)].conj();
                    normal[(a * n + p, c * n + q)] -= &img[(a, c)];
                }
            }
        }
        let nn = Cplx::from_i64(n as i64);
        for t in 0..m {
            normal[(t, t)] += &nn;
        }
        let kernel = psd_kernel(&normal, rank_rtol())?;
        if kernel.len() != 1 {
            return Err(Error::DegenerateInput(format!(
                "intertwiner space of block {} has dimension {}",
                j + 1,
                kernel.len()
            )));
        }
        let s = Mat::from_fn(n, n, |a, b| kernel[0][a * n + b].clone());
        let (vals, vecs) = hermitian_eigen(&s.matmul(&s.adjoint()))?;
        let top = vals.last().map_or(0.0, Real::to_f64);
        if vals.iter().any(|v| v.to_f64() <= top * rank_rtol()) {
            return Err(Error::Internal(format!(
                "k is not positive definite on block {}",
                j + 1
            )));
        }
        let sigma: Vec<Real> = vals.iter().map(Real::sqrt).collect();
        let mut det = Real::one();
        for x in &sigma {
            det = &det * x;
        }
        let scale = det.root(n as u32).recip();
        let k = vecs
            .matmul(&Mat::diag(sigma.iter().map(|x| Cplx::from_real(x * &scale)).collect()))
            .matmul(&vecs.adjoint());
        let kinv = vecs
            .matmul(&Mat::diag(
                sigma.iter().map(|x| Cplx::from_real((x * &scale).recip())).collect(),
            ))
            .matmul(&vecs.adjoint());
        ks.push(k);
        kinvs.push(kinv);
    }
    let res = k_residual(layout, kmap, &ks, &kinvs);
    if res > tol {
        return Err(Error::DegenerateInput(format!(
            "K is not inner: implementation residual {res:e} exceeds {tol:e}"
        )));
    }
    Ok((ks, kinvs))
}

/// Minimum-norm solution of `[x, E_pq] = R_pq` over all units of block `j`:
/// `x = (1/2n) Σ_pq [R_pq, E_qp]`.
fn min_norm_derivation(n: usize, rhs: impl Fn(usize, usize) -> Mat<Cplx>) -> Mat<Cplx> {
    let mut acc = Mat::<Cplx>::zeros(n, n);
    for p in 0..n {
        for q in 0..n {
            let r = rhs(p, q);
            for t in 0..n {
                acc[(t, p)] += &r[(t, q)];
                acc[(q, t)] -= &r[(p, t)];
            }
        }
    }
    acc.scale(&Cplx::from_real(Real::from_i64(2 * n as i64).recip()))
}

/// Projects `c` to its scalar part, failing if the rest exceeds `tol`.
fn central_part(c: &Mat<Cplx>, tol: f64, what: &str) -> Result<Cplx> {
    let n = c.rows();
    let zeta = &c.trace() / &Cplx::from_i64(n as i64);
    let dev = c.dist(&Mat::identity(n).scale(&zeta));
    if dev > tol {
        return Err(Error::InconsistentAction(format!(
            "{what} is not central (deviation {dev:e})"
        )));
    }
    Ok(zeta)
}

fn coboundary_e_raw(
    layout: &Layout,
    emap: &Mat<Cplx>,
    k: &[Mat<Cplx>],
    kinv: &[Mat<Cplx>],
    qi: &QScalar,
    tol: f64,
) -> Result<BlockMats> {
    let mut e: BlockMats = layout
        .sizes
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            min_norm_derivation(n, |p, q| {
                layout.column(emap, layout.index(j, p, q)).swap_remove(j).matmul(&k[j])
            })
        })
        .collect();
    let residual = e_residual(layout, emap, &e, kinv);
    if residual > tol {
        return Err(Error::NotAModuleAction { residual, tol });
    }
    let q2 = Cplx::from_q(&qi.pow(2));
    let denom = (&Cplx::one() - &q2).recip();
    for j in 0..e.len() {
        let c = &k[j].matmul(&e[j]).matmul(&kinv[j]) - &e[j].scale(&q2);
        let zeta = central_part(&c, tol, "k e k⁻¹ - q² e")?;
        let n = e[j].rows();
        e[j].sub_assign(&Mat::identity(n).scale(&(&zeta * &denom)));
    }
    Ok(e)
}

fn coboundary_f_raw(
    layout: &Layout,
    fmap: &Mat<Cplx>,
    k: &[Mat<Cplx>],
    kinv: &[Mat<Cplx>],
    qi: &QScalar,
    tol: f64,
) -> Result<BlockMats> {
    // g = k f solves [g, a] = k F(a).
    let mut g: BlockMats = layout
        .sizes
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            min_norm_derivation(n, |p, q| {
                k[j].matmul(&layout.column(fmap, layout.index(j, p, q)).swap_remove(j))
            })
        })
        .collect();
    let f: BlockMats = kinv.iter().zip(&g).map(|(a, b)| a.matmul(b)).collect();
    let residual = f_residual(layout, fmap, &f, k, kinv);
    if residual > tol {
        return Err(Error::NotAModuleAction { residual, tol });
    }
    let qm2 = Cplx::from_q(&qi.pow(-2));
    let denom = (&Cplx::one() - &qm2).recip();
    for j in 0..g.len() {
        let c = &k[j].matmul(&g[j]).matmul(&kinv[j]) - &g[j].scale(&qm2);
        let zeta = central_part(&c, tol, "k g k⁻¹ - q⁻² g")?;
        let n = g[j].rows();
        g[j].sub_assign(&Mat::identity(n).scale(&(&zeta * &denom)));
    }
    Ok(kinv.iter().zip(&g).map(|(a, b)| a.matmul(b)).collect())
}

fn normalize_raw(
    e: &[Mat<Cplx>],
    f: &[Mat<Cplx>],
    k: &[Mat<Cplx>],
    kinv: &[Mat<Cplx>],
    qi: &QScalar,
    tol: f64,
) -> Result<(BlockMats, BlockMats, BlockMats)> {
    if *qi >= QScalar::one() {
        return Err(Error::InvalidParameter(format!(
            "commutator normalization needs 0 < q < 1, got {}",
            qi.pretty()
        )));
    }
    let d = Real::from_q(&(qi - &qi.recip().expect("q > 0")));
    let dinv = Cplx::from_real(d.recip());
    let (mut e2, mut k2, mut kinv2) = (Vec::new(), Vec::new(), Vec::new());
    for j in 0..e.len() {
        let mut c = e[j].commutator(&f[j]);
        c.sub_assign(&k[j].scale(&dinv));
        let c = c.matmul(&k[j]);
        let zeta = central_part(&c, tol, "c'")?;
        if zeta.im.abs().to_f64() > tol {
            return Err(Error::InconsistentAction(format!(
                "c' is not self-adjoint on block {}",
                j + 1
            )));
        }
        let val = -&(&zeta.re * &d);
        if !val.is_sign_positive() || val.is_zero() {
            return Err(Error::PositivityViolation(format!(
                "-c'(q - q⁻¹) = {:e} is not positive on block {}",
                val.to_f64(),
                j + 1
            )));
        }
        let lambda = val.sqrt().recip();
        let l = Cplx::from_real(lambda.clone());
        let linv = Cplx::from_real(lambda.recip());
        e2.push(e[j].scale(&l));
        k2.push(k[j].scale(&l));
        kinv2.push(kinv[j].scale(&linv));
    }
    Ok((e2, k2, kinv2))
}

fn check_node<S: Scalar>(action: &ModuleAlgebraAction<S>, node: usize) -> Result<usize> {
    action.check_shapes()?;
    action.cartan.check_node(node)?;
    Ok(node - 1)
}

/// The positive, determinant-one (per block) `k` with `K(a) = k a k⁻¹` at a
/// 1-based node. Fails with a degenerate-input error unless the
/// intertwiner space `{s : K(a) s = s a}` is one-dimensional on every block.
pub fn implement_k(action: &ModuleAlgebraAction<Cplx>, node: usize, tol: f64) -> Result<BlockMats> {
    let i = check_node(action, node)?;
    Ok(implement_k_raw(&action.layout(), &action.k[i], tol)?.0)
}

/// The `e` with `E(a) = e a k⁻¹ - a e k⁻¹` and `k e k⁻¹ = q_i² e`.
pub fn solve_coboundary_e(
    action: &ModuleAlgebraAction<Cplx>,
    node: usize,
    k: &[Mat<Cplx>],
    tol: f64,
) -> Result<BlockMats> {
    let i = check_node(action, node)?;
    require_generic(&action.q)?;
    let qi = q_node(&action.cartan, &action.q, i);
    coboundary_e_raw(&action.layout(), &action.e[i], k, &block_inverses(k)?, &qi, tol)
}

/// The `f` with `F(a) = f a - k⁻¹ a k f` and `k f k⁻¹ = q_i⁻² f`.
pub fn solve_coboundary_f(
    action: &ModuleAlgebraAction<Cplx>,
    node: usize,
    k: &[Mat<Cplx>],
    tol: f64,
) -> Result<BlockMats> {
    let i = check_node(action, node)?;
    require_generic(&action.q)?;
    let qi = q_node(&action.cartan, &action.q, i);
    coboundary_f_raw(&action.layout(), &action.f[i], k, &block_inverses(k)?, &qi, tol)
}

/// Rescales `e` and `k` by `λ_j = (-ζ_j (q - q⁻¹))^{-1/2}` per block, where
/// `ζ_j` is the scalar `(ef - fe - k/(q - q⁻¹)) k` on block `j`, so that
/// `[e', f] = (k' - k'⁻¹)/(q - q⁻¹)`. Requires `0 < q < 1`.
pub fn normalize_commutator(
    e: &[Mat<Cplx>],
    f: &[Mat<Cplx>],
    k: &[Mat<Cplx>],
    q: &QScalar,
    tol: f64,
) -> Result<(BlockMats, BlockMats)> {
    if e.len() != k.len() || f.len() != k.len() {
        return Err(Error::DimensionMismatch("e, f and k need the same blocks".into()));
    }
    let (e2, k2, _) = normalize_raw(e, f, k, &block_inverses(k)?, q, tol)?;
    Ok((e2, k2))
}

#[derive(Debug, Clone, Copy)]
pub struct LiftConfig {
    /// Stage thresholds and the pass threshold for reported residuals.
    pub tol: f64,
}

impl Default for LiftConfig {
    fn default() -> Self {
        LiftConfig { tol: REPORT_TOL }
    }
}

/// A `*`-representation on `H = ⊕ ℂ^{n_j}` implementing an action.
#[derive(Debug, Clone, Serialize)]
pub struct LiftResult {
    pub cartan: CartanDatum,
    pub q: QScalar,
    pub blocks: Vec<usize>,
    #[serde(with = "mat_list_serde")]
    pub e: Vec<Mat<Cplx>>,
    #[serde(with = "mat_list_serde")]
    pub f: Vec<Mat<Cplx>>,
    #[serde(with = "mat_list_serde")]
    pub k: Vec<Mat<Cplx>>,
    pub residuals: BTreeMap<&'static str, f64>,
    pub tol: f64,
    /// Whether the action was lifted at `1/q` and transported back.
    pub inverted: bool,
}

impl LiftResult {
    pub fn passes(&self) -> bool {
        self.residuals.values().all(|r| *r <= self.tol)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.residuals
            .iter()
            .filter(|(_, r)| !(**r <= self.tol))
            .map(|(n, _)| *n)
            .collect()
    }

    /// Ascending eigenvalues of `k` at a 1-based node on one block.
    pub fn k_spectrum(&self, node: usize, block: usize) -> Result<Vec<f64>> {
        self.cartan.check_node(node)?;
        if block >= self.blocks.len() {
            return Err(Error::InvalidParameter(format!("no block {block}")));
        }
        let start: usize = self.blocks[..block].iter().sum();
        let n = self.blocks[block];
        let (vals, _) = hermitian_eigen(&self.k[node - 1].block(start, start, n, n))?;
        Ok(vals.iter().map(Real::to_f64).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

fn elem_times(a: &Mat<Cplx>, b: &Mat<Cplx>) -> Mat<Cplx> {
    a.matmul(b)
}

/// Residuals of `ea = E(a)k + ae`, `fa = F(a) + K⁻¹(a)f`, `ka = K(a)k` over
/// the matrix units, with `K⁻¹(a) = k⁻¹ a k`.
fn module_compat(
    layout: &Layout,
    maps: [&Mat<Cplx>; 3],
    e: &[Mat<Cplx>],
    f: &[Mat<Cplx>],
    k: &[Mat<Cplx>],
    kinv: &[Mat<Cplx>],
) -> f64 {
    let mut worst = 0.0f64;
    for (which, map) in maps.into_iter().enumerate() {
        let mut acc = Real::zero();
        for (j, p, q, c) in layout.units() {
            let n = layout.sizes[j];
            let img = layout.column(map, c);
            let lhs = match which {
                0 => &col_placed(n, q, &e[j].col(p)) - &row_placed(n, p, &row_of(&e[j], q)),
                1 => col_placed(n, q, &f[j].col(p)),
                _ => col_placed(n, q, &k[j].col(p)),
            };
            for (l, b) in img.iter().enumerate() {
                let mut d = match which {
                    0 => elem_times(b, &k[l]),
                    1 => b.clone(),
                    _ => elem_times(b, &k[l]),
                };
                if l == j {
                    if which == 1 {
                        d.add_assign(&outer(&kinv[j].col(p), &row_of(&k[j], q)).matmul(&f[j]));
                    }
                    d.sub_assign(&lhs);
                }
                acc += &d.frobenius().square();
            }
        }
        worst = worst.max(acc.sqrt().to_f64());
    }
    worst
}

/// Lifts a `*`-action to a `*`-representation on `⊕ ℂ^{n_j}`.
///
/// Stage failures are returned as [`Error::Stage`] with the 1-based node.
/// The result records every residual; [`LiftResult::passes`] compares them
/// with `cfg.tol`. `q = 1` is rejected.
pub fn lift_action<S: Scalar>(action: &ModuleAlgebraAction<S>, cfg: &LiftConfig) -> Result<LiftResult> {
    action.check_shapes()?;
    require_generic(&action.q)?;
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    let tol = cfg.tol;
    let std = action.to_standard()?;
    let layout = std.layout();
    let rank = std.cartan.rank();
    let inverted = std.q > QScalar::one();
    let mut es = Vec::with_capacity(rank);
    let mut fs = Vec::with_capacity(rank);
    let mut ks = Vec::with_capacity(rank);
    let mut kinvs = Vec::with_capacity(rank);
    for i in 0..rank {
        let node = i + 1;
        let qi = q_node(&std.cartan, &std.q, i);
        let (k, kinv) = implement_k_raw(&layout, &std.k[i], tol).map_err(|e| e.at(LiftStage::ImplementK, node))?;
        let (e, f, k, kinv) = if !inverted {
            let e = coboundary_e_raw(&layout, &std.e[i], &k, &kinv, &qi, tol)
                .map_err(|e| e.at(LiftStage::CoboundaryE, node))?;
            let f = coboundary_f_raw(&layout, &std.f[i], &k, &kinv, &qi, tol)
                .map_err(|e| e.at(LiftStage::CoboundaryF, node))?;
            let (e, k, kinv) =
                normalize_raw(&e, &f, &k, &kinv, &qi, tol).map_err(|e| e.at(LiftStage::NormalizeCommutator, node))?;
            (e, f, k, kinv)
        } else {
            let qr = qi.recip().expect("q > 0");
            let qc = Cplx::from_q(&qi);
            let qrc = Cplx::from_q(&qr);
            // E'(a) = q k F(a) k⁻¹, F'(a) = q⁻¹ E(k⁻¹ a k).
            let e_red = left_compose(&layout, &k, &kinv, &std.f[i]).scale(&qc);
            let f_red = right_compose(&layout, &std.e[i], &kinv, &k).scale(&qrc);
            let e1 = coboundary_e_raw(&layout, &e_red, &k, &kinv, &qr, tol)
                .map_err(|e| e.at(LiftStage::QReduction, node))?;
            let f1 = coboundary_f_raw(&layout, &f_red, &k, &kinv, &qr, tol)
                .map_err(|e| e.at(LiftStage::QReduction, node))?;
            let (e1, k, kinv) =
                normalize_raw(&e1, &f1, &k, &kinv, &qr, tol).map_err(|e| e.at(LiftStage::NormalizeCommutator, node))?;
            let e: BlockMats = f1.iter().zip(&k).map(|(a, b)| a.matmul(b).scale(&qc)).collect();
            let f: BlockMats = kinv.iter().zip(&e1).map(|(a, b)| a.matmul(b).scale(&qrc)).collect();
            (e, f, k, kinv)
        };
        es.push(e);
        fs.push(f);
        ks.push(k);
        kinvs.push(kinv);
    }

    let mut res: BTreeMap<&'static str, f64> = RESIDUAL_NAMES.iter().map(|n| (*n, 0.0)).collect();
    let mut bump = |name: &'static str, x: f64| {
        let slot = res.get_mut(name).expect("known residual");
        if x.is_nan() || x > *slot {
            *slot = x;
        }
    };
    for i in 0..rank {
        bump("k_implements", k_residual(&layout, &std.k[i], &ks[i], &kinvs[i]));
        bump("e_coboundary", e_residual(&layout, &std.e[i], &es[i], &kinvs[i]));
        bump(
            "f_coboundary",
            f_residual(&layout, &std.f[i], &fs[i], &ks[i], &kinvs[i]),
        );
        bump(
            "module_compat",
            module_compat(
                &layout,
                [&std.e[i], &std.f[i], &std.k[i]],
                &es[i],
                &fs[i],
                &ks[i],
                &kinvs[i],
            ),
        );
    }
    let dense = |b: &BlockMats| Mat::block_diag(b);
    let e: Vec<Mat<Cplx>> = es.iter().map(dense).collect();
    let f: Vec<Mat<Cplx>> = fs.iter().map(dense).collect();
    let k: Vec<Mat<Cplx>> = ks.iter().map(dense).collect();
    let kinv: Vec<Mat<Cplx>> = kinvs.iter().map(dense).collect();
    let qis: Vec<QScalar> = (0..rank).map(|i| q_node(&std.cartan, &std.q, i)).collect();
    for i in 0..rank {
        let qi = &qis[i];
        for j in 0..rank {
            let a = std.cartan.entry(i, j);
            let commute = k[i].commutator(&k[j]).frobenius().to_f64();
            let conj = |x: &Mat<Cplx>| k[i].matmul(x).matmul(&kinv[i]);
            let ke = conj(&e[j]).dist(&e[j].scale(&Cplx::from_q(&qi.pow(a))));
            let kf = conj(&f[j]).dist(&f[j].scale(&Cplx::from_q(&qi.pow(-a))));
            bump("kek_scaling", ke.max(commute));
            bump("kfk_scaling", kf.max(commute));
            let mut ef = e[i].commutator(&f[j]);
            if i == j {
                let c = Cplx::from_q(&(qi - &qi.recip().expect("q > 0")).recip().expect("q != 1"));
                ef.sub_assign(&(&k[i] - &kinv[i]).scale(&c));
            }
            bump("ef_commutator", ef.frobenius().to_f64());
            if i != j {
                bump("serre_x", serre_sum(&e[i], &e[j], a, qi)?.frobenius().to_f64());
                bump("serre_y", serre_sum(&f[i], &f[j], a, qi)?.frobenius().to_f64());
            }
        }
        let star = e[i].adjoint().dist(&k[i].matmul(&f[i])) + k[i].dist(&k[i].adjoint());
        bump("star_identity", star);
    }
    Ok(LiftResult {
        cartan: std.cartan.clone(),
        q: std.q.clone(),
        blocks: std.blocks.clone(),
        e,
        f,
        k,
        residuals: res,
        tol,
        inverted,
    })
}

/// A randomized round-trip input: a direct sum of irreducibles in an
/// orthonormal basis, conjugated by a random block-diagonal unitary, and the
/// action it induces.
#[derive(Debug, Clone)]
pub struct RoundTrip {
    pub spins: Vec<u32>,
    pub blocks: Vec<usize>,
    pub rep: Rep<Cplx>,
    pub action: ModuleAlgebraAction<Cplx>,
}

/// Random spins: between 1 and `max_summands` values in `0..=max_spin`.
pub fn random_spins<R: Rng>(max_summands: usize, max_spin: u32, rng: &mut R) -> Vec<u32> {
    let count = rng.random_range(1..=max_summands.max(1));
    (0..count).map(|_| rng.random_range(0..=max_spin)).collect()
}

/// Builds `⊕ V_{n}` for the given spins, groups consecutive summands into
/// blocks at random, conjugates by a random unitary per block and induces.
pub fn roundtrip_instance<R: Rng>(spins: &[u32], q: &QScalar, rng: &mut R) -> Result<RoundTrip> {
    if spins.is_empty() {
        return Err(Error::InvalidParameter("at least one summand is required".into()));
    }
    let irreps = spins.iter().map(|&n| irrep_su2(n, q)).collect::<Result<Vec<_>>>()?;
    let sum = direct_sum(&irreps)?.to_orthonormal()?;
    let mut blocks = Vec::new();
    let mut current = 0;
    for (idx, &n) in spins.iter().enumerate() {
        current += n as usize + 1;
        if idx + 1 == spins.len() || rng.random_bool(0.5) {
            blocks.push(current);
            current = 0;
        }
    }
    let unitaries: Vec<Mat<Cplx>> = blocks.iter().map(|&n| random_unitary(n, rng)).collect();
    let u = Mat::block_diag(&unitaries);
    let mut rep = sum.similarity(&u)?;
    rep.gram = Mat::identity(rep.dim);
    let action = induce_action(&rep, &blocks)?;
    Ok(RoundTrip {
        spins: spins.to_vec(),
        blocks,
        rep,
        action,
    })
}
