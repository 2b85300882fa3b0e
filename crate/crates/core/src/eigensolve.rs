//! Smallest generalized eigenvalues of the moment pencils, and the bounds built on them.
//!
//! For each subset `I`, `λ^(I) = max {λ : A^I - λ B^I ⪰ 0}` is the smallest
//! eigenvalue of the symmetric-definite pencil `(A^I, B^I)`; the bound is
//! `f^(r) = min_I λ^(I)`. The eigenvector `x` of the winning pencil gives the
//! optimal density `(Σ_β x_β T_β)² Π_{i∈I} (1 - x_i²)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::chebyshev::ChebPoly;
use crate::error::{BoundError, Result};
use crate::moments::{assemble_pencil, assemble_pencil_lebesgue, integrate_lebesgue, IndexSet, MomentPencil, Subset};

/// Pivots below this fraction of the largest diagonal entry are rejected.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// Subsets whose eigenvalues differ by less than this are considered tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Lower Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky(b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let m = b.nrows();
    let max_diag = (0..m).map(|i| b[(i, i)]).fold(0.0, f64::max);
    let mut l = DMatrix::zeros(m, m);
    for j in 0..m {
        let mut d = b[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d.is_nan() || d <= PIVOT_TOLERANCE * max_diag {
            return Err(BoundError::NotPositiveDefinite {
                pivot: j,
                value: d,
                subset: None,
            });
        }
        let ljj = d.sqrt();
        l[(j, j)] = ljj;
        for i in j + 1..m {
            let mut s = b[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Smallest eigenvalue `λ` of `A x = λ B x` and its eigenvector, normalized to `xᵀ B x = 1`.
///
/// Reduces to the standard problem for `L⁻¹ A L⁻ᵀ` with `B = L Lᵀ`. The sign
/// of `x` is fixed so that its largest-magnitude entry is positive.
pub fn min_generalized_eigenvalue(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    let m = a.nrows();
    if m == 0 || !a.is_square() || b.shape() != a.shape() {
        return Err(BoundError::InvalidArgument(format!(
            "pencil needs two square matrices of the same positive order, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let l = cholesky(b)?;
    let la = l
        .solve_lower_triangular(a)
        .expect("Cholesky factor has a positive diagonal");
    let c = l
        .solve_lower_triangular(&la.transpose())
        .expect("Cholesky factor has a positive diagonal");
    let c = (&c + c.transpose()) * 0.5;

    let eig = SymmetricEigen::new(c);
    let imin = eig.eigenvalues.imin();
    let lambda = eig.eigenvalues[imin];
    let y = eig.eigenvectors.column(imin).into_owned();
    let mut x = l
        .tr_solve_lower_triangular(&y)
        .expect("Cholesky factor has a positive diagonal");
    let pivot = x.iamax();
    if x[pivot] < 0.0 {
        x.neg_mut();
    }
    Ok((lambda, x))
}

/// `‖A x - λ B x‖∞ / ((‖A‖∞ + |λ| ‖B‖∞) ‖x‖∞)`.
pub fn relative_residual(a: &DMatrix<f64>, b: &DMatrix<f64>, lambda: f64, x: &DVector<f64>) -> f64 {
    let r = a * x - (b * x) * lambda;
    let row_norm = |m: &DMatrix<f64>| {
        m.row_iter()
            .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let scale = (row_norm(a) + lambda.abs() * row_norm(b)) * x.amax();
    if scale == 0.0 {
        r.amax()
    } else {
        r.amax() / scale
    }
}

/// Reference measure the density is normalized against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    /// Product Chebyshev measure `dμ`.
    Chebyshev,
    /// Lebesgue measure `dx` on the box.
    Lebesgue,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubsetBound {
    pub subset: Subset,
    pub order: usize,
    pub lambda: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundResult {
    pub r: u32,
    pub measure: Measure,
    /// One entry per subset with a nonempty index set, in bitmask order.
    pub per_subset: Vec<SubsetBound>,
    pub value: f64,
    pub winner: Subset,
    pub indices: IndexSet,
    pub eigvec: DVector<f64>,
    /// Optimal density, integrating to one against `measure`.
    pub density: ChebPoly,
}

impl BoundResult {
    pub fn max_residual(&self) -> f64 {
        self.per_subset.iter().map(|s| s.residual).fold(0.0, f64::max)
    }
}

fn check_bound_input(f: &ChebPoly, r: u32) -> Result<()> {
    if r < 2 {
        return Err(BoundError::Precondition(format!(
            "hierarchy degree r = {r} must be at least 2"
        )));
    }
    if f.degree() == 0 {
        return Err(BoundError::Degenerate("the objective is constant".into()));
    }
    Ok(())
}

/// `(Σ_β x_β T_β)² Π_{i∈I} (1 - x_i²)`.
fn extract_density(n: usize, indices: &IndexSet, x: &DVector<f64>) -> ChebPoly {
    let p = ChebPoly::from_terms(n, indices.members.iter().cloned().zip(x.iter().copied()))
        .expect("index set has the polynomial's dimension");
    let mut h = p.mul(&p).expect("same dimension");
    for i in indices.subset.indices() {
        h = h.times_box_constraint(i);
    }
    h
}

struct Solved {
    pencil: MomentPencil,
    lambda: f64,
    x: DVector<f64>,
    residual: f64,
}

fn solve(pencil: MomentPencil) -> Result<Solved> {
    let subset = pencil.subset;
    let (lambda, x) = min_generalized_eigenvalue(&pencil.a, &pencil.b).map_err(|e| e.with_subset(subset))?;
    let residual = relative_residual(&pencil.a, &pencil.b, lambda, &x);
    Ok(Solved {
        pencil,
        lambda,
        x,
        residual,
    })
}

/// `f^(r) = min_I λ^(I)` over Schmüdgen-type densities of degree `r` against `dμ`.
pub fn schmudgen_bound(f: &ChebPoly, r: u32) -> Result<BoundResult> {
    check_bound_input(f, r)?;
    let n = f.dimension();
    let mut per_subset = Vec::new();
    let mut best: Option<Solved> = None;
    for subset in Subset::all(n) {
        let Some(pencil) = assemble_pencil(f, subset, r)? else {
            continue;
        };
        let s = solve(pencil)?;
        per_subset.push(SubsetBound {
            subset,
            order: s.pencil.order(),
            lambda: s.lambda,
            residual: s.residual,
        });
        // ascending bitmask order: a later subset wins only if strictly lower
        if best.as_ref().map_or(true, |b| s.lambda < b.lambda - TIE_TOLERANCE) {
            best = Some(s);
        }
    }
    let best = best.expect("the empty subset always has a nonempty index set");
    let value = per_subset.iter().map(|s| s.lambda).fold(f64::INFINITY, f64::min);
    let density = extract_density(n, &best.pencil.indices, &best.x);
    let mass = density.constant_term();
    Ok(BoundResult {
        r,
        measure: Measure::Chebyshev,
        per_subset,
        value,
        winner: best.pencil.subset,
        indices: best.pencil.indices,
        eigvec: best.x,
        density: density.scale(1.0 / mass),
    })
}

/// Comparison bound over plain SOS densities of degree `r` against Lebesgue measure.
pub fn sos_lebesgue_bound(f: &ChebPoly, r: u32) -> Result<BoundResult> {
    check_bound_input(f, r)?;
    let n = f.dimension();
    let s = solve(assemble_pencil_lebesgue(f, r))?;
    let density = extract_density(n, &s.pencil.indices, &s.x);
    let mass = integrate_lebesgue(&density);
    Ok(BoundResult {
        r,
        measure: Measure::Lebesgue,
        per_subset: vec![SubsetBound {
            subset: Subset::EMPTY,
            order: s.pencil.order(),
            lambda: s.lambda,
            residual: s.residual,
        }],
        value: s.lambda,
        winner: Subset::EMPTY,
        indices: s.pencil.indices,
        eigvec: s.x,
        density: density.scale(1.0 / mass),
    })
}

/// Evaluates the optimal density on the uniform lattice with `points_per_dim`
/// points per coordinate (endpoints included); the last coordinate varies fastest.
pub fn density_eval_grid(result: &BoundResult, points_per_dim: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    if points_per_dim < 2 {
        return Err(BoundError::InvalidArgument(
            "grid needs at least 2 points per dimension".into(),
        ));
    }
    let n = result.density.dimension();
    let axis: Vec<f64> = (0..points_per_dim)
        .map(|i| -1.0 + 2.0 * i as f64 / (points_per_dim - 1) as f64)
        .collect();
    let total = points_per_dim.pow(n as u32);
    let mut idx = vec![0usize; n];
    let mut out = Vec::with_capacity(total);
    for _ in 0..total {
        let x: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
        let v = result.density.eval(&x)?;
        out.push((x, v));
        for d in (0..n).rev() {
            idx[d] += 1;
            if idx[d] < points_per_dim {
                break;
            }
            idx[d] = 0;
        }
    }
    Ok(out)
}

/// The polynomial `Σ_β x_β T_β` whose square forms the density.
pub fn eigvec_polynomial(result: &BoundResult) -> ChebPoly {
    let n = result.density.dimension();
    ChebPoly::from_terms(
        n,
        result
            .indices
            .members
            .iter()
            .cloned()
            .zip(result.eigvec.iter().copied()),
    )
    .unwrap_or_else(|_| ChebPoly::zero(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::{quadrature_mu_poly, MultiIndex};
    use nalgebra::dmatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn det_lu(mut m: DMatrix<f64>) -> f64 {
        let n = m.nrows();
        let mut det = 1.0;
        for j in 0..n {
            let p = (j..n)
                .max_by(|&a, &b| m[(a, j)].abs().total_cmp(&m[(b, j)].abs()))
                .unwrap();
            if m[(p, j)] == 0.0 {
                return 0.0;
            }
            if p != j {
                m.swap_rows(p, j);
                det = -det;
            }
            det *= m[(j, j)];
            for i in j + 1..n {
                let factor = m[(i, j)] / m[(j, j)];
                for k in j..n {
                    m[(i, k)] -= factor * m[(j, k)];
                }
            }
        }
        det
    }

    /// Smallest root of `det(A - λB)` by sign scanning and bisection.
    fn char_poly_min_root(a: &DMatrix<f64>, b: &DMatrix<f64>, bound: f64) -> f64 {
        let m = a.nrows();
        let p = |l: f64| det_lu(a - b * l);
        let mut steps = 4096;
        loop {
            let h = 2.0 * bound / steps as f64;
            let mut brackets = Vec::new();
            let mut prev = p(-bound);
            for s in 1..=steps {
                let l = -bound + s as f64 * h;
                let cur = p(l);
                if prev.signum() != cur.signum() {
                    brackets.push((l - h, l));
                }
                prev = cur;
            }
            if brackets.len() == m {
                let (mut lo, mut hi) = brackets[0];
                let flo = p(lo).signum();
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if p(mid).signum() == flo {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return 0.5 * (lo + hi);
            }
            steps *= 2;
            assert!(steps < 1 << 24, "could not separate the roots");
        }
    }

    #[test]
    fn trivial_pencils() {
        let b = dmatrix![2.0, 0.5; 0.5, 1.0];
        let (l, x) = min_generalized_eigenvalue(&b, &b).unwrap();
        assert!((l - 1.0).abs() < 1e-14);
        assert!(((x.transpose() * &b * &x)[0] - 1.0).abs() < 1e-14);

        let (l, x) = min_generalized_eigenvalue(&dmatrix![3.0, 0.0; 0.0, 1.0], &DMatrix::identity(2, 2)).unwrap();
        assert!((l - 1.0).abs() < 1e-15);
        assert!(x[0].abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);

        let (l, _) = min_generalized_eigenvalue(&dmatrix![2.0, 1.0; 1.0, 2.0], &dmatrix![2.0, 0.0; 0.0, 1.0]).unwrap();
        assert!((l - (3.0 - 3f64.sqrt()) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn indefinite_b_reports_pivot() {
        let a = DMatrix::identity(3, 3);
        let b = dmatrix![1.0, 0.0, 0.0; 0.0, 1.0, 1.0; 0.0, 1.0, 1.0];
        match min_generalized_eigenvalue(&a, &b) {
            Err(BoundError::NotPositiveDefinite { pivot, .. }) => assert_eq!(pivot, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(min_generalized_eigenvalue(&a, &DMatrix::identity(2, 2)).is_err());
        let e = cholesky(&b).unwrap_err().with_subset(Subset::from_bits(1));
        assert!(e.to_string().contains("{1}"));
        assert!(e.is_numeric());
    }

    #[test]
    fn agrees_with_characteristic_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..100 {
            let m = rng.random_range(1..=6);
            let a = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0));
            let a = (&a + a.transpose()) * 0.5;
            let c = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0));
            let b = c.transpose() * &c + DMatrix::identity(m, m);
            let (l, x) = min_generalized_eigenvalue(&a, &b).unwrap();
            let oracle = char_poly_min_root(&a, &b, a.norm() + 1.0);
            assert!((l - oracle).abs() <= 1e-10, "{l} vs {oracle}");
            assert!(relative_residual(&a, &b, l, &x) <= 1e-8);
        }
    }

    #[test]
    fn bound_preconditions() {
        let f = ChebPoly::basis(MultiIndex::new(vec![2, 0]));
        assert!(matches!(schmudgen_bound(&f, 0), Err(BoundError::Precondition(_))));
        assert!(matches!(
            schmudgen_bound(&ChebPoly::constant(2, 4.0), 4),
            Err(BoundError::Degenerate(_))
        ));
        assert!(sos_lebesgue_bound(&f, 1).is_err());
    }

    #[test]
    fn univariate_linear_lebesgue() {
        // f = 1 + x, minimum 0 at x = -1
        let f = ChebPoly::from_terms(1, [(MultiIndex::new(vec![0]), 1.0), (MultiIndex::new(vec![1]), 1.0)]).unwrap();
        let res = sos_lebesgue_bound(&f, 2).unwrap();
        assert!(res.value >= 0.0 && res.value <= 1.0);
        // brute force over h = (a + b x)², normalized, on a fine angle grid
        let mut best = f64::INFINITY;
        for i in 0..200_000 {
            let t = std::f64::consts::PI * i as f64 / 200_000.0;
            let (a, b) = (t.cos(), t.sin());
            // ∫(a+bx)² dx = 2a² + 2b²/3, ∫(1+x)(a+bx)² dx = 2a² + 2b²/3 + 4ab/3
            let mass = 2.0 * a * a + 2.0 * b * b / 3.0;
            let val = (mass + 4.0 * a * b / 3.0) / mass;
            best = best.min(val);
        }
        assert!((res.value - best).abs() < 1e-8, "{} vs {best}", res.value);
        assert!((integrate_lebesgue(&res.density) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_normalized_and_consistent() {
        let f = ChebPoly::from_terms(
            2,
            [
                (MultiIndex::new(vec![2, 0]), 13.0),
                (MultiIndex::new(vec![0, 2]), 13.0),
                (MultiIndex::new(vec![1, 1]), -48.0),
                (MultiIndex::new(vec![0, 0]), 26.0),
            ],
        )
        .unwrap();
        let res = schmudgen_bound(&f, 6).unwrap();
        assert!((res.value - 4.1844).abs() < 5e-4);
        assert!((quadrature_mu_poly(&res.density) - 1.0).abs() < 1e-8);
        let fh = f.mul(&res.density).unwrap();
        assert!((quadrature_mu_poly(&fh) - res.value).abs() < 1e-8);
        assert!(res.max_residual() < 1e-8);
        let grid = density_eval_grid(&res, 21).unwrap();
        assert_eq!(grid.len(), 441);
        assert_eq!(grid[1].0, vec![-1.0, -0.9]);
        assert!(grid.iter().all(|(_, v)| *v >= -1e-8));
        assert!(density_eval_grid(&res, 1).is_err());
    }
}
