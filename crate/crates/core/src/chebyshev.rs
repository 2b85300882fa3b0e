//! Sparse multivariate polynomials in the tensor Chebyshev basis.
//!
//! A [`ChebPoly`] stores the coefficients `f_α` of `f = Σ f_α T_α` where
//! `T_α(x) = Π_i T_{α_i}(x_i)`. Terms are kept in a `BTreeMap` keyed by
//! [`MultiIndex`] in graded lexicographic order, so iteration (and every
//! matrix assembled from it) is deterministic.
//!
//! The inner product is the one of the product Chebyshev probability measure
//! `dμ = Π_i (π √(1 - x_i²))⁻¹ dx_i` on `[-1, 1]^n`, under which the `T_α`
//! are orthogonal with `⟨T_α, T_α⟩ = 2^{-|supp α|}`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{BoundError, Result};

/// Coefficients smaller than this in absolute value are dropped on canonicalization.
pub const DROP_TOLERANCE: f64 = 1e-14;

/// Exponent (or Chebyshev degree) vector `α ∈ ℕ^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    /// Panics if `entries` is empty: the ambient dimension is at least one.
    pub fn new(entries: Vec<u32>) -> Self {
        assert!(!entries.is_empty(), "multi-index needs dimension >= 1");
        MultiIndex(entries)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex::new(vec![0; n])
    }

    /// The index with `k` in coordinate `i` and zeros elsewhere.
    pub fn unit(n: usize, i: usize, k: u32) -> Self {
        let mut e = vec![0; n];
        e[i] = k;
        MultiIndex::new(e)
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn max_entry(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Coordinates with a nonzero entry.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &a)| a != 0).map(|(i, _)| i)
    }

    pub fn support_size(&self) -> usize {
        self.0.iter().filter(|&&a| a != 0).count()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex::new(v)
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex {
    fn from(v: [u32; N]) -> Self {
        MultiIndex::new(v.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices of dimension `n` with total degree at most `max_degree`,
/// in graded lexicographic order.
pub fn multi_indices_up_to(n: usize, max_degree: u32) -> Vec<MultiIndex> {
    fn fill(n: usize, pos: usize, remaining: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if pos + 1 == n {
            cur[pos] = remaining;
            out.push(MultiIndex::new(cur.clone()));
            return;
        }
        for a in 0..=remaining {
            cur[pos] = a;
            fill(n, pos + 1, remaining - a, cur, out);
        }
    }
    assert!(n >= 1);
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    for degree in 0..=max_degree {
        fill(n, 0, degree, &mut cur, &mut out);
    }
    out
}

/// `T_k(x)` by the three-term recurrence.
pub fn cheb_eval_1d(k: u32, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 1..k {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `U_k(x)` for `k >= -1`, with `U_{-1} = 0` and `U_0 = 1`.
pub fn chebu_eval_1d(k: i64, x: f64) -> f64 {
    assert!(k >= -1, "U_k is defined for k >= -1");
    if k == -1 {
        return 0.0;
    }
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 0..k {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `[T_0(x), ..., T_kmax(x)]`.
pub fn cheb_values(x: f64, kmax: u32) -> Vec<f64> {
    let mut t = Vec::with_capacity(kmax as usize + 1);
    t.push(1.0);
    if kmax >= 1 {
        t.push(x);
    }
    for k in 2..=kmax as usize {
        let next = 2.0 * x * t[k - 1] - t[k - 2];
        t.push(next);
    }
    t
}

fn canonicalize(terms: &mut BTreeMap<MultiIndex, f64>) {
    terms.retain(|_, c| c.abs() >= DROP_TOLERANCE);
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(BoundError::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Polynomial `Σ f_α T_α` with canonical sparse storage.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebPoly {
    dim: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

impl ChebPoly {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        ChebPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = ChebPoly::zero(dim);
        p.terms.insert(MultiIndex::zero(dim), c);
        canonicalize(&mut p.terms);
        p
    }

    /// The single basis polynomial `T_α`.
    pub fn basis(alpha: MultiIndex) -> Self {
        let mut p = ChebPoly::zero(alpha.dimension());
        p.terms.insert(alpha, 1.0);
        p
    }

    /// Builds a polynomial from `(α, f_α)` pairs; repeated indices are summed.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, f64)>,
    {
        let mut p = ChebPoly::zero(dim);
        for (alpha, c) in terms {
            check_dims(dim, alpha.dimension())?;
            *p.terms.entry(alpha).or_insert(0.0) += c;
        }
        canonicalize(&mut p.terms);
        Ok(p)
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> + '_ {
        self.terms.iter().map(|(a, &c)| (a, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> f64 {
        self.terms.get(alpha).copied().unwrap_or(0.0)
    }

    /// Coefficient of `T_0`, which is also `∫ f dμ`.
    pub fn constant_term(&self) -> f64 {
        self.coeff(&MultiIndex::zero(self.dim))
    }

    /// Maximum total degree over stored terms (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::total_degree).max().unwrap_or(0)
    }

    /// Maximum degree in any single coordinate.
    pub fn max_coordinate_degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::max_entry).max().unwrap_or(0)
    }

    /// `Σ_α |f_α|`.
    pub fn coefficient_l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dims(self.dim, x.len())?;
        let kmax = self.max_coordinate_degree();
        let tables: Vec<Vec<f64>> = x.iter().map(|&xi| cheb_values(xi, kmax)).collect();
        Ok(self
            .terms
            .iter()
            .map(|(alpha, c)| {
                alpha
                    .entries()
                    .iter()
                    .zip(&tables)
                    .fold(*c, |acc, (&a, t)| acc * t[a as usize])
            })
            .sum())
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut terms: BTreeMap<_, _> = self.terms.iter().map(|(a, c)| (a.clone(), c * s)).collect();
        canonicalize(&mut terms);
        ChebPoly { dim: self.dim, terms }
    }

    pub fn add(&self, other: &ChebPoly) -> Result<Self> {
        check_dims(self.dim, other.dim)?;
        let mut terms = self.terms.clone();
        for (a, c) in &other.terms {
            *terms.entry(a.clone()).or_insert(0.0) += c;
        }
        canonicalize(&mut terms);
        Ok(ChebPoly { dim: self.dim, terms })
    }

    pub fn sub(&self, other: &ChebPoly) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Product, linearized with `T_a T_b = ½ (T_{a+b} + T_{|a-b|})` per coordinate.
    pub fn mul(&self, other: &ChebPoly) -> Result<Self> {
        check_dims(self.dim, other.dim)?;
        let mut terms = BTreeMap::new();
        let mut partial: Vec<(Vec<u32>, f64)> = Vec::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                partial.clear();
                partial.push((Vec::with_capacity(self.dim), ca * cb));
                for i in 0..self.dim {
                    let (ai, bi) = (a.get(i), b.get(i));
                    if ai == 0 || bi == 0 {
                        for (e, _) in partial.iter_mut() {
                            e.push(ai + bi);
                        }
                    } else {
                        let mut next = Vec::with_capacity(partial.len() * 2);
                        for (e, c) in partial.drain(..) {
                            let mut hi = e.clone();
                            hi.push(ai + bi);
                            let mut lo = e;
                            lo.push(ai.abs_diff(bi));
                            next.push((hi, 0.5 * c));
                            next.push((lo, 0.5 * c));
                        }
                        partial = next;
                    }
                }
                for (e, c) in partial.drain(..) {
                    *terms.entry(MultiIndex(e)).or_insert(0.0) += c;
                }
            }
        }
        canonicalize(&mut terms);
        Ok(ChebPoly { dim: self.dim, terms })
    }

    /// `(1 - x_i²) · self`, using `1 - x² = ½ (T_0 - T_2)`.
    pub fn times_box_constraint(&self, i: usize) -> Self {
        assert!(i < self.dim);
        let g = ChebPoly::from_terms(
            self.dim,
            [
                (MultiIndex::zero(self.dim), 0.5),
                (MultiIndex::unit(self.dim, i, 2), -0.5),
            ],
        )
        .expect("dimensions agree");
        self.mul(&g).expect("dimensions agree")
    }
}

impl fmt::Display for ChebPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (a, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·T{a}")?;
        }
        Ok(())
    }
}

/// Polynomial in the standard monomial basis, `Σ p_α x^α`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialPoly {
    dim: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

impl MonomialPoly {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        MonomialPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, f64)>,
    {
        let mut p = MonomialPoly::zero(dim);
        for (alpha, c) in terms {
            check_dims(dim, alpha.dimension())?;
            *p.terms.entry(alpha).or_insert(0.0) += c;
        }
        canonicalize(&mut p.terms);
        Ok(p)
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> + '_ {
        self.terms.iter().map(|(a, &c)| (a, c))
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::total_degree).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dims(self.dim, x.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(alpha, c)| {
                alpha
                    .entries()
                    .iter()
                    .zip(x)
                    .fold(*c, |acc, (&a, &xi)| acc * xi.powi(a as i32))
            })
            .sum())
    }

    pub fn to_cheb(&self) -> ChebPoly {
        monomial_to_cheb(self)
    }
}

/// Chebyshev coefficients of `x^j` for `j = 0..=max_power`.
fn power_expansions(max_power: u32) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![vec![1.0]];
    for j in 0..max_power as usize {
        let prev = &out[j];
        let mut next = vec![0.0; prev.len() + 1];
        // x T_k = ½ (T_{k+1} + T_{|k-1|})
        for (k, &c) in prev.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if k == 0 {
                next[1] += c;
            } else {
                next[k + 1] += 0.5 * c;
                next[k - 1] += 0.5 * c;
            }
        }
        out.push(next);
    }
    out
}

/// Exact change of basis from monomials to tensor Chebyshev polynomials.
pub fn monomial_to_cheb(p: &MonomialPoly) -> ChebPoly {
    let n = p.dim;
    let max_power = p.terms.keys().map(MultiIndex::max_entry).max().unwrap_or(0);
    let powers = power_expansions(max_power);
    let mut terms: BTreeMap<MultiIndex, f64> = BTreeMap::new();
    for (alpha, c) in &p.terms {
        // tensor product of the per-coordinate expansions
        let mut partial: Vec<(Vec<u32>, f64)> = vec![(Vec::with_capacity(n), *c)];
        for &a in alpha.entries() {
            let exp = &powers[a as usize];
            let mut next = Vec::with_capacity(partial.len() * exp.len());
            for (e, pc) in &partial {
                for (k, &ck) in exp.iter().enumerate() {
                    if ck != 0.0 {
                        let mut e2 = e.clone();
                        e2.push(k as u32);
                        next.push((e2, pc * ck));
                    }
                }
            }
            partial = next;
        }
        for (e, v) in partial {
            *terms.entry(MultiIndex(e)).or_insert(0.0) += v;
        }
    }
    canonicalize(&mut terms);
    ChebPoly { dim: n, terms }
}

/// `⟨f, g⟩ = ∫ f g dμ`, computed from orthogonality.
pub fn inner_product_mu(f: &ChebPoly, g: &ChebPoly) -> Result<f64> {
    check_dims(f.dim, g.dim)?;
    let (small, large) = if f.terms.len() <= g.terms.len() { (f, g) } else { (g, f) };
    Ok(small
        .terms
        .iter()
        .filter_map(|(a, c)| large.terms.get(a).map(|d| c * d * 0.5f64.powi(a.support_size() as i32)))
        .sum())
}

/// Gauss–Chebyshev nodes `cos((2j-1)π / 2N)`, `j = 1..=N`.
pub fn gauss_chebyshev_nodes(nodes: usize) -> Vec<f64> {
    (1..=nodes)
        .map(|j| ((2 * j - 1) as f64 * PI / (2 * nodes) as f64).cos())
        .collect()
}

/// Tensor Gauss–Chebyshev approximation of `∫ f dμ` over `[-1, 1]^n`.
///
/// Exact for polynomials of degree `< 2N` in each coordinate.
pub fn quadrature_mu<F>(f: F, n: usize, nodes: usize) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    assert!(n >= 1 && nodes >= 1);
    let xs = gauss_chebyshev_nodes(nodes);
    let total = nodes.pow(n as u32);
    let mut point = vec![xs[0]; n];
    let mut idx = vec![0usize; n];
    let mut sum = 0.0;
    for _ in 0..total {
        sum += f(&point);
        // odometer increment
        for d in 0..n {
            idx[d] += 1;
            if idx[d] < nodes {
                point[d] = xs[idx[d]];
                break;
            }
            idx[d] = 0;
            point[d] = xs[0];
        }
    }
    sum / total as f64
}

/// [`quadrature_mu`] applied to a polynomial with enough nodes to be exact.
pub fn quadrature_mu_poly(f: &ChebPoly) -> f64 {
    let nodes = f.max_coordinate_degree() as usize + 1;
    quadrature_mu(|x| f.eval(x).expect("dimension fixed"), f.dim, nodes)
}
