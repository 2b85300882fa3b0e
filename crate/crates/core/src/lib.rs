//! Upper bounds for the minimum of a polynomial over the box `[-1, 1]^n`,
//! obtained by minimizing `∫ f h dμ` over polynomial densities `h` of bounded
//! degree, together with the Jackson-kernel machinery that controls their error.

pub mod chebyshev;
pub mod eigensolve;
pub mod error;
pub mod jackson;
pub mod moments;
pub mod testfns;

pub use chebyshev::{
    cheb_eval_1d, chebu_eval_1d, inner_product_mu, monomial_to_cheb, quadrature_mu, quadrature_mu_poly, ChebPoly,
    MonomialPoly, MultiIndex,
};
pub use eigensolve::{
    density_eval_grid, min_generalized_eigenvalue, schmudgen_bound, sos_lebesgue_bound, BoundResult, Measure,
    SubsetBound,
};
pub use error::{BoundError, Result};
pub use jackson::{
    degree_split, delta_density_1d, delta_density_nd, error_constants, gaussian_overlay, jackson_bound,
    jackson_coefficients, max_cheb_coeff, psi, DeltaDensity, ErrorConstants, JacksonCoefficients, Overlay, OverlayRow,
};
pub use moments::{assemble_pencil, assemble_pencil_lebesgue, IndexSet, MomentPencil, Subset};
pub use testfns::{catalog, lookup, TestFunction};
