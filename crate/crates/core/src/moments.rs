//! Moment matrices for Schmüdgen-type densities on the box.
//!
//! For a subset `I ⊆ {1..n}` and degree `r`, the pencil `(A^I, B^I)` is
//! indexed by `Λ^I_r = {β : |β| <= ⌊(r - 2|I|)/2⌋}` with
//!
//! ```text
//! A^I[β,γ] = ⟨f,   T_β T_γ Π_{i∈I} (1 - x_i²)⟩
//! B^I[β,γ] = ⟨T_0, T_β T_γ Π_{i∈I} (1 - x_i²)⟩
//! ```
//!
//! Each entry factors over coordinates into univariate integrals of
//! `T_a T_b T_c`, with or without the weight `1 - x²`, which have closed forms
//! in terms of Kronecker deltas.

use std::fmt;

use nalgebra::DMatrix;

use crate::chebyshev::{multi_indices_up_to, ChebPoly, MultiIndex};
use crate::error::{BoundError, Result};

/// A subset of coordinates `I ⊆ {0..n}`, stored as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    /// Panics if an index is 32 or larger.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Subset(indices.into_iter().fold(0, |m, i| {
            assert!(i < 32);
            m | (1 << i)
        }))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 32 && self.0 & (1 << i) != 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }

    /// All subsets of `{0..n}` in ascending bitmask order.
    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        assert!(n < 32);
        (0..1u32 << n).map(Subset)
    }
}

/// Displayed with 1-based coordinates, e.g. `{1,2}`.
impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

/// The multi-index set `Λ^I_r`.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexSet {
    pub subset: Subset,
    pub r: u32,
    pub members: Vec<MultiIndex>,
}

impl IndexSet {
    pub fn new(n: usize, subset: Subset, r: u32) -> Self {
        let members = match half_degree(subset, r) {
            Some(k) => multi_indices_up_to(n, k),
            None => Vec::new(),
        };
        IndexSet { subset, r, members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// `⌊(r - 2|I|) / 2⌋`, or `None` when `r < 2|I|`.
fn half_degree(subset: Subset, r: u32) -> Option<u32> {
    let need = 2 * subset.len() as u32;
    (r >= need).then(|| (r - need) / 2)
}

fn delta0(m: i64) -> f64 {
    if m == 0 {
        1.0
    } else {
        0.0
    }
}

/// `∫ T_a T_b T_c dμ`.
pub fn triple_product_mu(a: u32, b: u32, c: u32) -> f64 {
    let (a, b, c) = (a as i64, b as i64, c as i64);
    let d = (a - b).abs();
    0.25 * (delta0(a + b + c) + delta0(a + b - c) + delta0(d + c) + delta0(d - c))
}

/// `∫ T_a T_b T_c (1 - x²) dμ`.
pub fn triple_product_mu_weighted(a: u32, b: u32, c: u32) -> f64 {
    let (a, b, c) = (a as i64, b as i64, c as i64);
    let d = (a - b).abs();
    0.125 * (delta0(a + b + c) + delta0(a + b - c) + delta0(d + c) + delta0(d - c))
        - 0.0625
            * (delta0(a + b + c - 2) + delta0((a + b - c).abs() - 2) + delta0(d + c - 2) + delta0((d - c).abs() - 2))
}

/// `∫_{-1}^{1} T_a(x) dx`.
pub fn lebesgue_moment(a: u32) -> f64 {
    if a % 2 == 1 {
        0.0
    } else {
        let a = a as f64;
        2.0 / (1.0 - a * a)
    }
}

/// `∫_{-1}^{1} T_a T_b T_c dx`, linearizing the triple product.
pub fn lebesgue_triple(a: u32, b: u32, c: u32) -> f64 {
    let d = a.abs_diff(b);
    0.25 * (lebesgue_moment(a + b + c)
        + lebesgue_moment((a + b).abs_diff(c))
        + lebesgue_moment(d + c)
        + lebesgue_moment(d.abs_diff(c)))
}

/// `∫_{[-1,1]^n} f dx` for a Chebyshev-basis polynomial.
pub fn integrate_lebesgue(f: &ChebPoly) -> f64 {
    f.terms()
        .map(|(alpha, c)| alpha.entries().iter().fold(c, |acc, &a| acc * lebesgue_moment(a)))
        .sum()
}

/// Symmetric pencil `(A, B)` for one subset, indexed by `indices.members`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentPencil {
    pub subset: Subset,
    pub indices: IndexSet,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

impl MomentPencil {
    pub fn order(&self) -> usize {
        self.indices.len()
    }
}

/// Dense lookup of a univariate triple integral for `a <= amax`, `b, c <= kmax`.
struct TripleTable {
    kmax: usize,
    data: Vec<f64>,
}

impl TripleTable {
    fn new(amax: u32, kmax: u32, integral: impl Fn(u32, u32, u32) -> f64) -> Self {
        let (na, nk) = (amax as usize + 1, kmax as usize + 1);
        let mut data = Vec::with_capacity(na * nk * nk);
        for a in 0..=amax {
            for b in 0..=kmax {
                for c in 0..=kmax {
                    data.push(integral(a, b, c));
                }
            }
        }
        TripleTable {
            kmax: kmax as usize,
            data,
        }
    }

    #[inline]
    fn get(&self, a: u32, b: u32, c: u32) -> f64 {
        let nk = self.kmax + 1;
        self.data[(a as usize * nk + b as usize) * nk + c as usize]
    }
}

/// Fills the symmetric matrix `M[β,γ] = Σ_α f_α Π_i table_i(α_i, β_i, γ_i)`.
fn gram_matrix(f: &ChebPoly, members: &[MultiIndex], tables: &[&TripleTable]) -> DMatrix<f64> {
    let m = members.len();
    let terms: Vec<(&MultiIndex, f64)> = f.terms().collect();
    let mut out = DMatrix::zeros(m, m);
    for p in 0..m {
        let beta = members[p].entries();
        for q in p..m {
            let gamma = members[q].entries();
            let mut s = 0.0;
            for &(alpha, c) in &terms {
                let mut prod = c;
                for (i, &a) in alpha.entries().iter().enumerate() {
                    prod *= tables[i].get(a, beta[i], gamma[i]);
                    if prod == 0.0 {
                        break;
                    }
                }
                s += prod;
            }
            out[(p, q)] = s;
            out[(q, p)] = s;
        }
    }
    out
}

/// Assembles `(A^I, B^I)` under `dμ`; `Ok(None)` when `r < 2|I|`.
pub fn assemble_pencil(f: &ChebPoly, subset: Subset, r: u32) -> Result<Option<MomentPencil>> {
    let n = f.dimension();
    if n >= 32 || subset.bits() >> n != 0 {
        return Err(BoundError::InvalidArgument(format!(
            "subset {subset} is not contained in {{1..{n}}}"
        )));
    }
    let Some(k) = half_degree(subset, r) else {
        return Ok(None);
    };
    let indices = IndexSet::new(n, subset, r);
    let amax = f.max_coordinate_degree();
    let plain = TripleTable::new(amax, k, triple_product_mu);
    let weighted = TripleTable::new(amax, k, triple_product_mu_weighted);
    let tables: Vec<&TripleTable> = (0..n)
        .map(|i| if subset.contains(i) { &weighted } else { &plain })
        .collect();
    let a = gram_matrix(f, &indices.members, &tables);
    let b = gram_matrix(&ChebPoly::constant(n, 1.0), &indices.members, &tables);
    Ok(Some(MomentPencil { subset, indices, a, b }))
}

/// Single pencil for SOS densities against Lebesgue measure on `[-1, 1]^n`.
pub fn assemble_pencil_lebesgue(f: &ChebPoly, r: u32) -> MomentPencil {
    let n = f.dimension();
    let indices = IndexSet::new(n, Subset::EMPTY, r);
    let table = TripleTable::new(f.max_coordinate_degree(), r / 2, lebesgue_triple);
    let tables = vec![&table; n];
    let a = gram_matrix(f, &indices.members, &tables);
    let b = gram_matrix(&ChebPoly::constant(n, 1.0), &indices.members, &tables);
    MomentPencil {
        subset: Subset::EMPTY,
        indices,
        a,
        b,
    }
}
