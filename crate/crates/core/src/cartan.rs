//! Cartan matrices, symmetrizers and weight labels.
//!
//! Convention: row `i` indexes the simple root `α_i` and
//! `a_ij = ⟨α_j, α_i^∨⟩`. For `B2` this makes `α_1` the long root, so
//! `a = [[2, -1], [-2, 2]]` with symmetrizers `d = [2, 1]`.

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::qnum::{require_positive, QScalar};

pub const SUPPORTED_TYPES: [&str; 6] = ["A1", "A2", "A3", "A4", "B2", "G2"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CartanDatum {
    pub label: String,
    pub a: Vec<Vec<i64>>,
    pub d: Vec<i64>,
}

#[derive(Deserialize)]
struct RawCartan {
    label: String,
    a: Vec<Vec<i64>>,
    d: Vec<i64>,
}

impl<'de> Deserialize<'de> for CartanDatum {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawCartan::deserialize(deserializer)?;
        CartanDatum::new(raw.label, raw.a, raw.d).map_err(serde::de::Error::custom)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl CartanDatum {
    /// Build a datum, checking every invariant.
    pub fn new(label: impl Into<String>, a: Vec<Vec<i64>>, d: Vec<i64>) -> Result<Self> {
        let datum = CartanDatum {
            label: label.into(),
            a,
            d,
        };
        datum.validate()?;
        Ok(datum)
    }

    /// Type `A_rank` (the Cartan matrix of `sl_{rank+1}`).
    pub fn type_a(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidCartan("rank must be positive".into()));
        }
        let a = (0..rank)
            .map(|i| {
                (0..rank)
                    .map(|j| match i.abs_diff(j) {
                        0 => 2,
                        1 => -1,
                        _ => 0,
                    })
                    .collect()
            })
            .collect();
        CartanDatum::new(format!("A{rank}"), a, vec![1; rank])
    }

    pub fn rank(&self) -> usize {
        self.d.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.d.len();
        let bad = |m: String| Err(Error::InvalidCartan(m));
        if n == 0 {
            return bad("rank must be positive".into());
        }
        if self.a.len() != n || self.a.iter().any(|row| row.len() != n) {
            return bad(format!("matrix must be {n}x{n} to match {n} symmetrizers"));
        }
        if self.d.iter().any(|&d| d <= 0) {
            return bad("symmetrizers must be positive".into());
        }
        if self.d.iter().fold(0, |g, &d| gcd(g, d)) != 1 {
            return bad("symmetrizers must be coprime".into());
        }
        for i in 0..n {
            if self.a[i][i] != 2 {
                return bad(format!("a_{i}{i} must be 2"));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                if self.a[i][j] > 0 {
                    return bad(format!("off-diagonal a_{i}{j} must be <= 0"));
                }
                if (self.a[i][j] == 0) != (self.a[j][i] == 0) {
                    return bad(format!("a_{i}{j} and a_{j}{i} must vanish together"));
                }
                if self.d[i] * self.a[i][j] != self.d[j] * self.a[j][i] {
                    return bad("matrix (d_i a_ij) is not symmetric".into());
                }
            }
        }
        Ok(())
    }

    /// Checks a 1-based node index.
    pub fn check_node(&self, i: usize) -> Result<()> {
        if (1..=self.rank()).contains(&i) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "node {i} out of range 1..={}",
                self.rank()
            )))
        }
    }

    /// `a_ij` for 0-based indices.
    pub(crate) fn entry(&self, i: usize, j: usize) -> i64 {
        self.a[i][j]
    }
}

/// Standard Cartan datum for one of [`SUPPORTED_TYPES`].
pub fn builtin_cartan(label: &str) -> Result<CartanDatum> {
    match label {
        "A1" | "A2" | "A3" | "A4" => CartanDatum::type_a(label[1..].parse().unwrap()),
        "B2" => CartanDatum::new("B2", vec![vec![2, -1], vec![-2, 2]], vec![2, 1]),
        "G2" => CartanDatum::new("G2", vec![vec![2, -1], vec![-3, 2]], vec![3, 1]),
        _ => Err(Error::UnknownCartanType {
            label: label.to_string(),
            supported: SUPPORTED_TYPES.to_vec(),
        }),
    }
}

/// `q_i = q^{d_i}` for the node `1 <= i <= rank`.
pub fn q_i(cartan: &CartanDatum, q: &QScalar, i: usize) -> Result<QScalar> {
    require_positive(q)?;
    cartan.check_node(i)?;
    Ok(q.pow(cartan.d[i - 1]))
}

/// `q^{d_i}` for a 0-based node index; callers guarantee the index.
pub(crate) fn q_node(cartan: &CartanDatum, q: &QScalar, i: usize) -> QScalar {
    q.pow(cartan.d[i])
}

/// A weight in coroot coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeightLabel {
    coordinates: Vec<i64>,
}

impl WeightLabel {
    pub fn new(coordinates: Vec<i64>) -> Self {
        WeightLabel { coordinates }
    }

    pub fn coordinates(&self) -> &[i64] {
        &self.coordinates
    }

    pub fn dominant(&self) -> bool {
        self.coordinates.iter().all(|&c| c >= 0)
    }
}
