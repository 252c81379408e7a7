//! Qualitative trend models.
//!
//! A trend model describes variables only by the signs of their values and
//! of their first and second time derivatives. This crate enumerates every
//! scenario consistent with a model, links scenarios by the permitted
//! one-step transitions, translates polynomial ODE systems into trend
//! equations, and turns correlation matrices into models, dropping weak
//! coefficients until the model has a non-trivial solution.
//!
//! ```
//! use trendsolve::{dsl::parse_model, scenario::Mode, solver::solve};
//!
//! let model = parse_model("var A\nvar B\nrel SUP A B\nrel RED A B").unwrap();
//! let scenarios = solve(&model, Mode::Full).unwrap();
//! assert_eq!(scenarios.len(), 1);
//! assert!(scenarios.scenarios[0].is_steady_state());
//! ```

pub mod algebra;
pub mod check;
pub mod constraint;
pub mod correlation;
pub mod dsl;
pub mod fixture;
pub mod graph;
mod lexer;
pub mod model;
pub mod ode;
pub mod repair;
pub mod scenario;
pub mod solver;

pub use algebra::{Sign, SignSet, Triplet, TripletPattern};
pub use model::TrendModel;
pub use scenario::{Mode, Scenario, ScenarioSet};
