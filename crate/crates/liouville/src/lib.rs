//! Exact symbolic search for integrating factors of first-order ODEs
//! `dy/dx = M(x,y)/N(x,y)` with polynomial `M`, `N`.
//!
//! The solver looks for multipliers of the shape
//! `R = exp(r0) * p1^c1 * ... * pk^ck`, where the `p_i` are Darboux
//! polynomials of the flow operator `D = N ∂x + M ∂y` and `r0` is a
//! rational function restricted to `r0(x)`, `r0(y)` or `r(x) + s(y)`.
//! The classic all-polynomial multiplier search is the special case
//! `r0 = 0`. Every candidate is checked against the exact identity
//! `D[r0] + Σ c_i g_i + N_x + M_y = 0` before it is returned, so all
//! results are sound regardless of how they were found.
//!
//! All arithmetic is exact: arbitrary-precision rationals, optionally
//! extended by a single named parameter (coefficients then live in the
//! rational-function field over that parameter).

pub mod budget;
pub mod coef;
pub mod corpus;
pub mod darboux;
pub mod field;
pub mod hermite;
pub mod linear;
pub mod npoly;
pub mod ode;
pub mod parse;
pub mod poly;
pub mod quadrature;
pub mod rat;
pub mod solver;
pub mod system;
pub mod ratfunc;
pub mod render;
pub mod upoly;

pub use budget::Budget;
pub use coef::Coef;
pub use corpus::{run_corpus, CorpusEntry, CorpusOverrides, CorpusSummary};
pub use darboux::{find_darboux, DarbouxError, DarbouxFinder, DarbouxPair};
pub use hermite::{hermite_reduce, hermite_split, integrate_rational_part, rationality_constraints, HermiteResult, NotRational, ParamRat, Split};
pub use linear::{intersect_constraints, solve_parametric, AffineSolutionSpace};
pub use npoly::NPoly;
pub use system::{solve_system, BranchValue, CoeffSystem, SolutionBranch, SystemError};
pub use ode::{d_operator, divergence_source, Foode};
pub use parse::{parse_expr, parse_foode, parse_integrating_factor, ParseError};
pub use poly::{MPoly, Mono};
pub use quadrature::{first_integral, ClosedForm, FirstIntegral, OneForm};
pub use rat::Rat;
pub use solver::{
    classic_ps, equivalent_along_flow, liouvillian_case_x, liouvillian_case_xy,
    liouvillian_case_y, same_factor_up_to_const, solve, verify_integrating_factor, CaseOutcome,
    CaseSelect, IntegratingFactor, Method, SolveConfig, SolveReport, Status,
};
pub use ratfunc::RatFunc;
pub use render::Style;
pub use upoly::{UniPoly, URat};
