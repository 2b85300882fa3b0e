//! Benchmark functions rescaled to the box `[-1, 1]^n`, each stored in the
//! Chebyshev basis together with its monomial form.

use crate::chebyshev::{ChebPoly, MonomialPoly, MultiIndex};
use crate::error::{BoundError, Result};

#[derive(Clone, Debug)]
pub struct TestFunction {
    pub name: &'static str,
    pub n: usize,
    pub cheb: ChebPoly,
    pub monomial: MonomialPoly,
    pub f_min: f64,
    pub minimizers: Vec<Vec<f64>>,
    /// Approximate range of the function over the box.
    pub range_hint: (f64, f64),
}

impl TestFunction {
    /// `name` for the bivariate functions, `name-n` otherwise.
    pub fn label(&self) -> String {
        match self.name {
            "styblinski-tang" | "rosenbrock" => format!("{}-{}", self.name, self.n),
            _ => self.name.to_string(),
        }
    }
}

fn cheb(n: usize, terms: &[(&[u32], f64)]) -> ChebPoly {
    ChebPoly::from_terms(n, terms.iter().map(|(a, c)| (MultiIndex::new(a.to_vec()), *c)))
        .expect("catalog terms have the declared dimension")
}

fn mono(n: usize, terms: &[(&[u32], f64)]) -> MonomialPoly {
    MonomialPoly::from_terms(n, terms.iter().map(|(a, c)| (MultiIndex::new(a.to_vec()), *c)))
        .expect("catalog terms have the declared dimension")
}

/// Places a univariate exponent pattern on coordinates `j` (and `j+1`).
fn at(n: usize, pairs: &[(usize, u32)]) -> Vec<u32> {
    let mut e = vec![0; n];
    for &(i, k) in pairs {
        e[i] += k;
    }
    e
}

fn collect(n: usize, terms: Vec<(Vec<u32>, f64)>) -> Vec<(MultiIndex, f64)> {
    terms
        .into_iter()
        .map(|(e, c)| {
            debug_assert_eq!(e.len(), n);
            (MultiIndex::new(e), c)
        })
        .collect()
}

fn booth() -> TestFunction {
    TestFunction {
        name: "booth",
        n: 2,
        cheb: cheb(
            2,
            &[
                (&[2, 0], 250.0),
                (&[0, 2], 250.0),
                (&[1, 1], 800.0),
                (&[1, 0], -340.0),
                (&[0, 1], -380.0),
                (&[0, 0], 574.0),
            ],
        ),
        // (10x+20y-7)² + (20x+10y-5)²
        monomial: mono(
            2,
            &[
                (&[2, 0], 500.0),
                (&[0, 2], 500.0),
                (&[1, 1], 800.0),
                (&[1, 0], -340.0),
                (&[0, 1], -380.0),
                (&[0, 0], 74.0),
            ],
        ),
        f_min: 0.0,
        minimizers: vec![vec![0.1, 0.3]],
        range_hint: (0.0, 2500.0),
    }
}

fn matyas() -> TestFunction {
    TestFunction {
        name: "matyas",
        n: 2,
        cheb: cheb(
            2,
            &[(&[2, 0], 13.0), (&[0, 2], 13.0), (&[1, 1], -48.0), (&[0, 0], 26.0)],
        ),
        monomial: mono(2, &[(&[2, 0], 26.0), (&[0, 2], 26.0), (&[1, 1], -48.0)]),
        f_min: 0.0,
        minimizers: vec![vec![0.0, 0.0]],
        range_hint: (0.0, 100.0),
    }
}

fn motzkin() -> TestFunction {
    TestFunction {
        name: "motzkin",
        n: 2,
        cheb: cheb(
            2,
            &[
                (&[4, 0], 4.0),
                (&[4, 2], 4.0),
                (&[2, 4], 4.0),
                (&[0, 4], 4.0),
                (&[2, 2], 20.0),
                (&[2, 0], 16.0),
                (&[0, 2], 16.0),
                (&[0, 0], 13.0),
            ],
        ),
        monomial: mono(2, &[(&[4, 2], 64.0), (&[2, 4], 64.0), (&[2, 2], -48.0), (&[0, 0], 1.0)]),
        f_min: 0.0,
        minimizers: vec![vec![0.5, 0.5], vec![0.5, -0.5], vec![-0.5, 0.5], vec![-0.5, -0.5]],
        range_hint: (0.0, 80.0),
    }
}

fn three_hump() -> TestFunction {
    let p6 = 5f64.powi(6);
    TestFunction {
        name: "three-hump",
        n: 2,
        cheb: cheb(
            2,
            &[
                (&[6, 0], p6 / 192.0),
                (&[4, 0], 1625.0 / 4.0),
                (&[2, 0], 58725.0 / 64.0),
                (&[1, 1], 25.0),
                (&[0, 2], 12.5),
                (&[0, 0], 14525.0 / 24.0),
            ],
        ),
        monomial: mono(
            2,
            &[
                (&[6, 0], p6 / 6.0),
                (&[4, 0], -625.0 * 1.05),
                (&[2, 0], 50.0),
                (&[1, 1], 25.0),
                (&[0, 2], 25.0),
            ],
        ),
        f_min: 0.0,
        minimizers: vec![vec![0.0, 0.0]],
        range_hint: (0.0, 2000.0),
    }
}

fn styblinski_tang_1d(y: f64) -> f64 {
    312.5 * y.powi(4) - 200.0 * y * y + 12.5 * y
}

/// Global minimizer of `312.5y⁴ - 200y² + 12.5y` on `[-1, 1]`, by Newton's method.
fn styblinski_tang_minimizer() -> f64 {
    let mut y: f64 = -0.58;
    for _ in 0..50 {
        let d1 = 1250.0 * y * y * y - 400.0 * y + 12.5;
        let d2 = 3750.0 * y * y - 400.0;
        let step = d1 / d2;
        y -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    y
}

fn styblinski_tang(n: usize) -> TestFunction {
    let mut c = vec![(vec![0; n], 275.0 / 16.0 * n as f64)];
    let mut m = Vec::new();
    for j in 0..n {
        c.push((at(n, &[(j, 4)]), 625.0 / 16.0));
        c.push((at(n, &[(j, 2)]), 225.0 / 4.0));
        c.push((at(n, &[(j, 1)]), 12.5));
        m.push((at(n, &[(j, 4)]), 312.5));
        m.push((at(n, &[(j, 2)]), -200.0));
        m.push((at(n, &[(j, 1)]), 12.5));
    }
    let y = styblinski_tang_minimizer();
    TestFunction {
        name: "styblinski-tang",
        n,
        cheb: ChebPoly::from_terms(n, collect(n, c)).expect("dimension"),
        monomial: MonomialPoly::from_terms(n, collect(n, m)).expect("dimension"),
        f_min: n as f64 * styblinski_tang_1d(y),
        minimizers: vec![vec![y; n]],
        range_hint: (-39.17 * n as f64, 125.0 * n as f64),
    }
}

fn rosenbrock(n: usize) -> TestFunction {
    let s = 2.048f64;
    let (s2, s3, s4) = (s * s, s.powi(3), s.powi(4));
    let mut c = Vec::new();
    let mut m = Vec::new();
    for j in 0..n - 1 {
        let k = j + 1;
        c.push((at(n, &[(j, 4)]), 12.5 * s4));
        c.push((at(n, &[(j, 2), (k, 1)]), -100.0 * s3));
        c.push((at(n, &[(j, 2)]), (0.5 + 50.0 * s2) * s2));
        c.push((at(n, &[(k, 2)]), 50.0 * s2));
        c.push((at(n, &[(j, 1)]), -4.096));
        c.push((at(n, &[(k, 1)]), -100.0 * s3));
        c.push((vec![0; n], 1.0 + s2 * (37.5 * s2 + 50.5)));
        // 100(s y - s² x²)² + (s x - 1)²
        m.push((at(n, &[(k, 2)]), 100.0 * s2));
        m.push((at(n, &[(j, 2), (k, 1)]), -200.0 * s3));
        m.push((at(n, &[(j, 4)]), 100.0 * s4));
        m.push((at(n, &[(j, 2)]), s2));
        m.push((at(n, &[(j, 1)]), -2.0 * s));
        m.push((vec![0; n], 1.0));
    }
    TestFunction {
        name: "rosenbrock",
        n,
        cheb: ChebPoly::from_terms(n, collect(n, c)).expect("dimension"),
        monomial: MonomialPoly::from_terms(n, collect(n, m)).expect("dimension"),
        f_min: 0.0,
        minimizers: vec![vec![1.0 / s; n]],
        range_hint: (0.0, 4000.0 * (n - 1) as f64),
    }
}

/// Every benchmark function, in a fixed order.
pub fn catalog() -> Vec<TestFunction> {
    vec![
        booth(),
        matyas(),
        motzkin(),
        three_hump(),
        styblinski_tang(2),
        styblinski_tang(3),
        rosenbrock(2),
        rosenbrock(3),
    ]
}

pub fn lookup(name: &str, n: usize) -> Result<TestFunction> {
    let all = catalog();
    let key = name.to_ascii_lowercase();
    let valid = all
        .iter()
        .map(|t| format!("{} (n={})", t.name, t.n))
        .collect::<Vec<_>>()
        .join(", ");
    all.into_iter()
        .find(|t| t.name == key && t.n == n)
        .ok_or(BoundError::NotFound {
            name: name.to_string(),
            n,
            valid,
        })
}
