//! Jackson kernel coefficients and the polynomial delta approximants built from them.
//!
//! The univariate density `h_r(x) = 1 + 2 Σ_{k=1}^r g_k^r T_k(x) T_k(x*)` is
//! nonnegative on `[-1, 1]` and integrates to one against `dμ`; the tensor
//! product `H_r̲(x) = Π_i h_{r_i}(x_i)` carries both properties to the box.
//! Because the `T_α` are orthogonal, `∫ f H_r̲ dμ` has the closed form
//! `Σ_α f_α T_α(x*) Π_i g^{r_i}_{α_i}`, which is what [`jackson_bound`] returns.

use std::f64::consts::PI;

use crate::chebyshev::{cheb_eval_1d, cheb_values, chebu_eval_1d, ChebPoly, MultiIndex};
use crate::error::{BoundError, Result};

/// `g_0^r, ..., g_r^r` for a fixed degree `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct JacksonCoefficients {
    r: u32,
    g: Vec<f64>,
    theta: f64,
}

impl JacksonCoefficients {
    pub fn degree(&self) -> u32 {
        self.r
    }

    /// `θ_r = π / (r + 2)`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.g
    }

    /// `g_k^r`; panics for `k > r`.
    pub fn get(&self, k: u32) -> f64 {
        self.g[k as usize]
    }
}

/// Jackson damping factors, via the polynomial form
/// `g_k = ((r+2-k) T_k(cos θ) + U_{k-1}(cos θ) cos θ) / (r+2)`
/// which has no `sin θ` denominator.
pub fn jackson_coefficients(r: u32) -> JacksonCoefficients {
    let theta = PI / (r as f64 + 2.0);
    let c = theta.cos();
    let rp2 = r as f64 + 2.0;
    let g = (0..=r)
        .map(|k| ((rp2 - k as f64) * cheb_eval_1d(k, c) + chebu_eval_1d(k as i64 - 1, c) * c) / rp2)
        .collect();
    JacksonCoefficients { r, g, theta }
}

/// A Jackson delta approximant centered at `center`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaDensity {
    pub center: Vec<f64>,
    pub degrees: Vec<u32>,
    pub poly: ChebPoly,
}

fn check_in_box(x: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(BoundError::OutsideBox { value: x });
    }
    Ok(())
}

/// Chebyshev coefficients of `h_r` centered at `x_star`, indexed by `k = 0..=r`.
fn delta_coefficients_1d(x_star: f64, r: u32) -> Vec<f64> {
    let g = jackson_coefficients(r);
    let t = cheb_values(x_star, r);
    (0..=r as usize)
        .map(|k| if k == 0 { 1.0 } else { 2.0 * g.g[k] * t[k] })
        .collect()
}

/// Univariate density `h_r` peaked at `x_star`.
pub fn delta_density_1d(x_star: f64, r: u32) -> Result<DeltaDensity> {
    delta_density_nd(&[x_star], &[r])
}

/// Tensor-product density `H_r̲(x) = Π_i h_{r_i}(x_i)`.
pub fn delta_density_nd(x_star: &[f64], degrees: &[u32]) -> Result<DeltaDensity> {
    if x_star.len() != degrees.len() {
        return Err(BoundError::DimensionMismatch {
            expected: x_star.len(),
            found: degrees.len(),
        });
    }
    if x_star.is_empty() {
        return Err(BoundError::InvalidArgument("empty center point".into()));
    }
    for &x in x_star {
        check_in_box(x)?;
    }
    let factors: Vec<Vec<f64>> = x_star
        .iter()
        .zip(degrees)
        .map(|(&x, &r)| delta_coefficients_1d(x, r))
        .collect();

    let mut terms: Vec<(Vec<u32>, f64)> = vec![(Vec::new(), 1.0)];
    for coeffs in &factors {
        let mut next = Vec::with_capacity(terms.len() * coeffs.len());
        for (e, c) in &terms {
            for (k, &ck) in coeffs.iter().enumerate() {
                if ck != 0.0 {
                    let mut e2 = e.clone();
                    e2.push(k as u32);
                    next.push((e2, c * ck));
                }
            }
        }
        terms = next;
    }
    let poly = ChebPoly::from_terms(x_star.len(), terms.into_iter().map(|(e, c)| (MultiIndex::new(e), c)))?;
    Ok(DeltaDensity {
        center: x_star.to_vec(),
        degrees: degrees.to_vec(),
        poly,
    })
}

/// Splits `r - n` as evenly as possible over `n` coordinates, larger parts first.
pub fn degree_split(r: u32, n: usize) -> Result<Vec<u32>> {
    if n == 0 {
        return Err(BoundError::InvalidArgument("dimension must be at least 1".into()));
    }
    if (r as usize) < n {
        return Err(BoundError::InvalidArgument(format!(
            "total degree r = {r} is smaller than the dimension n = {n}"
        )));
    }
    let rest = r as usize - n;
    let (s, n0) = (rest / n, rest % n);
    Ok((0..n).map(|i| (if i < n0 { s + 1 } else { s }) as u32).collect())
}

/// `∫ f H_r̲ dμ` for the density centered at `x_star`, in closed form.
///
/// Requires every `r_i >= deg f`.
pub fn jackson_bound(f: &ChebPoly, x_star: &[f64], degrees: &[u32]) -> Result<f64> {
    let n = f.dimension();
    for len in [x_star.len(), degrees.len()] {
        if len != n {
            return Err(BoundError::DimensionMismatch {
                expected: n,
                found: len,
            });
        }
    }
    for &x in x_star {
        check_in_box(x)?;
    }
    let d = f.degree();
    if let Some(&ri) = degrees.iter().find(|&&ri| ri < d) {
        return Err(BoundError::Precondition(format!(
            "Jackson degree r_i = {ri} is below the polynomial degree {d}"
        )));
    }
    let g: Vec<JacksonCoefficients> = degrees.iter().map(|&ri| jackson_coefficients(ri)).collect();
    let t: Vec<Vec<f64>> = x_star.iter().map(|&x| cheb_values(x, d)).collect();
    Ok(f.terms()
        .map(|(alpha, c)| {
            alpha
                .entries()
                .iter()
                .enumerate()
                .fold(c, |acc, (i, &a)| acc * t[i][a as usize] * g[i].get(a))
        })
        .sum())
}

/// Index of the largest monomial coefficient of `T_k`: 0 for `k <= 4`,
/// otherwise `⌈(4k - 5 - √(8k² - 7)) / 8⌉`.
pub fn psi(k: u32) -> u32 {
    if k <= 4 {
        return 0;
    }
    let k = k as f64;
    ((4.0 * k - 5.0 - (8.0 * k * k - 7.0).sqrt()) / 8.0).ceil() as u32
}

fn ln_factorial(m: u32) -> f64 {
    (2..=m).map(|i| (i as f64).ln()).sum()
}

fn factorial_u128(m: u32) -> u128 {
    (1..=m as u128).product()
}

/// `max_i |t_i^{(k)}|` where `T_k(x) = Σ t_i x^i`:
/// `2^{k-1-2ψ} k (k-ψ-1)! / (ψ! (k-2ψ)!)` with `ψ = psi(k)`.
pub fn max_cheb_coeff(k: u32) -> f64 {
    assert!(k >= 2, "the coefficient bound is stated for k >= 2");
    let p = psi(k);
    if k <= 20 {
        let num = (1u128 << (k - 1 - 2 * p)) * k as u128 * factorial_u128(k - p - 1);
        let den = factorial_u128(p) * factorial_u128(k - 2 * p);
        (num / den) as f64
    } else {
        let ln = (k - 1 - 2 * p) as f64 * std::f64::consts::LN_2 + (k as f64).ln() + ln_factorial(k - p - 1)
            - ln_factorial(p)
            - ln_factorial(k - 2 * p);
        ln.exp()
    }
}

/// Constants of the `O(1/r²)` error analysis for one polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorConstants {
    /// Largest Chebyshev index appearing in any single coordinate of `f`.
    pub d: u32,
    pub total_degree: u32,
    pub psi_d: u32,
    pub c_d: f64,
    /// `C_d = d² (1 + 2 c_d)`.
    pub big_c_d: f64,
    /// `C_f = (Σ |f_α|) C_d π² / 2`.
    pub c_f: f64,
}

/// `C_d`-style constants for degree `d`; `c_1 = 1`.
fn degree_constants(d: u32) -> (u32, f64, f64) {
    let (psi_d, c_d) = if d == 1 { (0, 1.0) } else { (psi(d), max_cheb_coeff(d)) };
    let big_c_d = (d as f64).powi(2) * (1.0 + 2.0 * c_d);
    (psi_d, c_d, big_c_d)
}

/// `C_d` alone, for `d >= 1`.
pub fn coefficient_decay_constant(d: u32) -> f64 {
    assert!(d >= 1);
    degree_constants(d).2
}

/// Error constants of a nonconstant polynomial, summing `|f_α|` over all terms.
///
/// Only `g^{r_i}_{α_i}` with `α_i <= max_coordinate_degree` enter the
/// closed-form bound, so `d` is the per-coordinate degree rather than the
/// total degree.
pub fn error_constants(f: &ChebPoly) -> Result<ErrorConstants> {
    let d = f.max_coordinate_degree();
    if d == 0 {
        return Err(BoundError::Degenerate(
            "error constants need a nonconstant polynomial".into(),
        ));
    }
    let (psi_d, c_d, big_c_d) = degree_constants(d);
    Ok(ErrorConstants {
        d,
        total_degree: f.degree(),
        psi_d,
        c_d,
        big_c_d,
        c_f: f.coefficient_l1_norm() * big_c_d * PI * PI / 2.0,
    })
}

/// Univariate variant: the constant term is excluded from the coefficient sum.
pub fn univariate_error_constants(f: &ChebPoly) -> Result<ErrorConstants> {
    if f.dimension() != 1 {
        return Err(BoundError::DimensionMismatch {
            expected: 1,
            found: f.dimension(),
        });
    }
    let mut ec = error_constants(f)?;
    let l1 = f.coefficient_l1_norm() - f.constant_term().abs();
    ec.c_f = l1 * ec.big_c_d * PI * PI / 2.0;
    Ok(ec)
}

/// Variance of the Gaussian that `δ_KPM^{(r)}(· - x*)` resembles.
pub fn gaussian_sigma2(x_star: f64, r: u32) -> f64 {
    let rp1 = r as f64 + 1.0;
    (PI / rp1).powi(2) * (1.0 - x_star * x_star + (3.0 * x_star * x_star - 2.0) / rp1)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlayRow {
    pub x: f64,
    pub delta_kpm: f64,
    pub gaussian: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Overlay {
    pub x_star: f64,
    pub r: u32,
    pub sigma2: f64,
    pub rows: Vec<OverlayRow>,
    /// Grid points dropped because the Chebyshev weight is singular there.
    pub excluded: Vec<f64>,
}

/// Kernel delta approximant `h_r(x) / (π √(1 - x²))` next to its Gaussian fit.
pub fn gaussian_overlay(x_star: f64, r: u32, grid: &[f64]) -> Result<Overlay> {
    let h = delta_density_1d(x_star, r)?;
    let sigma2 = gaussian_sigma2(x_star, r);
    let norm = 1.0 / (2.0 * PI * sigma2).sqrt();
    let mut rows = Vec::with_capacity(grid.len());
    let mut excluded = Vec::new();
    for &x in grid {
        if x.abs() >= 1.0 {
            excluded.push(x);
            continue;
        }
        let hx = h.poly.eval(&[x])?;
        rows.push(OverlayRow {
            x,
            delta_kpm: hx / (PI * (1.0 - x * x).sqrt()),
            gaussian: norm * (-(x - x_star).powi(2) / (2.0 * sigma2)).exp(),
        });
    }
    Ok(Overlay {
        x_star,
        r,
        sigma2,
        rows,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::{inner_product_mu, quadrature_mu, quadrature_mu_poly};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    /// First (trigonometric) form of the coefficients; singular only at θ = 0.
    fn jackson_trig(r: u32, k: u32) -> f64 {
        let th = PI / (r as f64 + 2.0);
        let k = k as f64;
        ((r as f64 + 2.0 - k) * (k * th).cos() + (k * th).sin() / th.sin() * th.cos()) / (r as f64 + 2.0)
    }

    /// Monomial coefficients of T_k by the recurrence on coefficient vectors.
    fn t_monomial(k: usize) -> Vec<f64> {
        let mut prev = vec![1.0];
        let mut cur = vec![0.0, 1.0];
        if k == 0 {
            return prev;
        }
        for _ in 1..k {
            let mut next = vec![0.0; cur.len() + 1];
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] += 2.0 * c;
            }
            for (i, c) in prev.iter().enumerate() {
                next[i] -= c;
            }
            prev = cur;
            cur = next;
        }
        cur
    }

    #[test]
    fn coefficient_examples() {
        for r in 0..40 {
            let g = jackson_coefficients(r);
            assert_eq!(g.get(0), 1.0);
            assert!(g.as_slice().iter().all(|v| v.abs() <= 1.0 + 1e-15));
            if r >= 1 {
                assert!((g.get(1) - (PI / (r as f64 + 2.0)).cos()).abs() < 1e-14);
            }
        }
        let g6 = jackson_coefficients(6);
        assert!((g6.get(1) - 0.923_879_532_511_286_7).abs() < 1e-12);
        for k in 0..=6 {
            assert!((g6.get(k) - jackson_trig(6, k)).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn coefficient_decay_bound() {
        for d in 1..=10u32 {
            let cd = coefficient_decay_constant(d);
            for r in d..=200 {
                let g = jackson_coefficients(r);
                let worst = (0..=d).map(|k| (1.0 - g.get(k)).abs()).fold(0.0, f64::max);
                let bound = cd * PI * PI / (2.0 * (r as f64 + 2.0).powi(2));
                assert!(worst <= bound, "d = {d}, r = {r}: {worst} > {bound}");
            }
        }
    }

    #[test]
    fn delta_1d_examples() {
        let h = delta_density_1d(0.0, 1).unwrap();
        assert_eq!(h.poly, ChebPoly::constant(1, 1.0));

        let h = delta_density_1d(0.0, 2).unwrap();
        let g2 = jackson_coefficients(2).get(2);
        assert!((h.poly.coeff(&mi(&[2])) + 2.0 * g2).abs() < 1e-15);

        let h = delta_density_1d(0.5, 8).unwrap();
        assert!((quadrature_mu_poly(&h.poly) - 1.0).abs() < 1e-12);
        let min = (0..2001)
            .map(|i| h.poly.eval(&[-1.0 + i as f64 / 1000.0]).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(min >= -1e-10, "min = {min}");

        assert!(matches!(delta_density_1d(1.5, 3), Err(BoundError::OutsideBox { .. })));
    }

    #[test]
    fn delta_1d_nonnegative_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x_star: f64 = rng.random_range(-1.0..=1.0);
            let r: u32 = rng.random_range(0..=20);
            let h = delta_density_1d(x_star, r).unwrap();
            let min = (0..2001)
                .map(|i| h.poly.eval(&[-1.0 + i as f64 / 1000.0]).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert!(min >= -1e-9, "x* = {x_star}, r = {r}, min = {min}");
            assert!(h.poly.degree() <= r);
        }
    }

    #[test]
    fn delta_nd_examples() {
        let h = delta_density_nd(&[0.0, 0.0], &[0, 0]).unwrap();
        assert_eq!(h.poly, ChebPoly::constant(2, 1.0));

        let h = delta_density_nd(&[0.5, 0.5], &[6, 6]).unwrap();
        let one = ChebPoly::constant(2, 1.0);
        assert!((inner_product_mu(&h.poly, &one).unwrap() - 1.0).abs() < 1e-12);

        let h = delta_density_nd(&[0.5, -0.5], &[4, 6]).unwrap();
        assert!((quadrature_mu_poly(&h.poly) - 1.0).abs() < 1e-10);
        assert!(h.poly.degree() <= 10);

        assert!(delta_density_nd(&[0.5], &[4, 6]).is_err());
        assert!(delta_density_nd(&[0.5, -1.01], &[4, 6]).is_err());
    }

    #[test]
    fn delta_nd_nonnegative_on_grid() {
        let h = delta_density_nd(&[0.3, -0.8], &[5, 7]).unwrap();
        for i in 0..=80 {
            for j in 0..=80 {
                let x = [-1.0 + i as f64 / 40.0, -1.0 + j as f64 / 40.0];
                assert!(h.poly.eval(&x).unwrap() >= -1e-9);
            }
        }
    }

    #[test]
    fn degree_split_examples() {
        assert_eq!(degree_split(10, 2).unwrap(), vec![4, 4]);
        assert_eq!(degree_split(11, 2).unwrap(), vec![5, 4]);
        assert_eq!(degree_split(7, 3).unwrap(), vec![2, 1, 1]);
        assert!(degree_split(2, 3).is_err());
        for r in 3..40 {
            let s = degree_split(r, 3).unwrap();
            assert_eq!(s.iter().sum::<u32>(), r - 3);
        }
    }

    #[test]
    fn jackson_bound_examples() {
        let c = ChebPoly::constant(2, 3.5);
        assert_eq!(jackson_bound(&c, &[0.1, -0.4], &[3, 5]).unwrap(), 3.5);

        let t1 = ChebPoly::basis(mi(&[1]));
        let v = jackson_bound(&t1, &[-1.0], &[8]).unwrap();
        assert!((v + (PI / 10.0).cos()).abs() < 1e-14);

        let f = ChebPoly::basis(mi(&[3, 0]));
        assert!(matches!(
            jackson_bound(&f, &[0.0, 0.0], &[2, 5]),
            Err(BoundError::Precondition(_))
        ));
        assert!(jackson_bound(&f, &[0.0], &[5]).is_err());
    }

    #[test]
    fn psi_and_coefficient_bound() {
        assert_eq!(psi(3), 0);
        assert_eq!(psi(4), 0);
        assert_eq!(psi(6), 1);
        assert_eq!(max_cheb_coeff(2), 2.0);
        assert_eq!(max_cheb_coeff(6), 48.0);
        assert!(max_cheb_coeff(5) <= max_cheb_coeff(6));
        for k in 2..80 {
            assert!(max_cheb_coeff(k) <= max_cheb_coeff(k + 1), "k = {k}");
        }
    }

    #[test]
    fn coefficient_bound_matches_expansion() {
        for k in 2..=30usize {
            let coeffs = t_monomial(k);
            let max = coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
            let got = max_cheb_coeff(k as u32);
            assert!((got - max).abs() <= 1e-12 * max, "k = {k}: {got} vs {max}");
        }
        // both branches agree at the switch point
        let p = psi(20);
        let ln = (19 - 2 * p) as f64 * std::f64::consts::LN_2 + 20f64.ln() + ln_factorial(20 - p - 1)
            - ln_factorial(p)
            - ln_factorial(20 - 2 * p);
        assert!((ln.exp() - max_cheb_coeff(20)).abs() <= 1e-9 * max_cheb_coeff(20));
    }

    #[test]
    fn error_constant_small_cases() {
        let matyas = ChebPoly::from_terms(
            2,
            [
                (mi(&[2, 0]), 13.0),
                (mi(&[0, 2]), 13.0),
                (mi(&[1, 1]), -48.0),
                (mi(&[0, 0]), 26.0),
            ],
        )
        .unwrap();
        let ec = error_constants(&matyas).unwrap();
        assert_eq!(ec.d, 2);
        assert_eq!(ec.c_d, 2.0);
        assert_eq!(ec.big_c_d, 20.0);
        assert!((ec.c_f - 100.0 * 20.0 * PI * PI / 2.0).abs() < 1e-9);

        let lin = ChebPoly::from_terms(1, [(mi(&[1]), 2.0), (mi(&[0]), 5.0)]).unwrap();
        let ec = error_constants(&lin).unwrap();
        assert_eq!((ec.d, ec.c_d, ec.big_c_d), (1, 1.0, 3.0));
        let uni = univariate_error_constants(&lin).unwrap();
        assert!((uni.c_f - 2.0 * 3.0 * PI * PI / 2.0).abs() < 1e-12);

        assert!(matches!(
            error_constants(&ChebPoly::constant(2, 1.0)),
            Err(BoundError::Degenerate(_))
        ));
    }

    #[test]
    fn overlay_examples() {
        let grid = [-1.0, -0.5, 0.0, 0.5, 1.0];
        let o = gaussian_overlay(0.0, 8, &grid).unwrap();
        assert_eq!(o.excluded, vec![-1.0, 1.0]);
        assert_eq!(o.rows.len(), 3);
        let h8 = delta_density_1d(0.0, 8).unwrap().poly.eval(&[0.0]).unwrap();
        assert!((o.rows[1].delta_kpm - h8 / PI).abs() < 1e-14);
        let s2 = (PI / 9.0).powi(2) * (1.0 - 2.0 / 9.0);
        assert!((o.sigma2 - s2).abs() < 1e-15);

        let o = gaussian_overlay(0.0, 64, &[0.0]).unwrap();
        let row = o.rows[0];
        assert!((row.delta_kpm - row.gaussian).abs() <= 0.15 * row.gaussian);
    }

    fn arb_poly(n: usize) -> impl Strategy<Value = ChebPoly> {
        prop::collection::vec((prop::collection::vec(0u32..=4, n), -2.0f64..2.0), 1..6)
            .prop_map(move |t| ChebPoly::from_terms(n, t.into_iter().map(|(e, c)| (MultiIndex::new(e), c))).unwrap())
            .prop_filter("degree <= 4", |p| p.degree() <= 4)
    }

    proptest! {
        #[test]
        fn normalization(x in prop::collection::vec(-1.0f64..=1.0, 1..4), rs in prop::collection::vec(0u32..12, 3)) {
            let n = x.len();
            let h = delta_density_nd(&x, &rs[..n]).unwrap();
            prop_assert!((h.poly.constant_term() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn closed_form_matches_quadrature(
            (f, x, rs) in (1usize..=2).prop_flat_map(|n| (
                arb_poly(n),
                prop::collection::vec(-1.0f64..=1.0, n),
                prop::collection::vec(4u32..=10, n),
            )),
        ) {
            let closed = jackson_bound(&f, &x, &rs).unwrap();
            let h = delta_density_nd(&x, &rs).unwrap();
            let nodes = (f.max_coordinate_degree() + h.poly.max_coordinate_degree()) as usize + 1;
            let quad = quadrature_mu(|p| f.eval(p).unwrap() * h.poly.eval(p).unwrap(), x.len(), nodes);
            prop_assert!((closed - quad).abs() <= 1e-9 * (1.0 + quad.abs()));
        }
    }
}
