//! Hypergraph optimization modeling.
//!
//! Nodes own variables, constraints and objective terms; hyperedges own
//! linking constraints; graphs nest. A graph flattens into one MILP solved
//! by the bundled simplex / branch-and-bound solver. The [`power`] module
//! builds a tri-level unit commitment and dispatch hierarchy on top of
//! this, and [`drivers`] solves it either stage by stage or as one model.
//!
//! ```
//! use optigraph::solver::solve_milp;
//! use optigraph::{LinExpr, LinearConstraint, OptiGraph, SolveOptions, VariableDef};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let mut g = OptiGraph::new("plant");
//! let a = g.add_node("a")?;
//! let b = g.add_node("b")?;
//!
//! let node = g.node_mut(a).unwrap();
//! let x = node.add_variable(VariableDef::continuous("x", 0.0, 10.0))?;
//! let on = node.add_variable(VariableDef::binary("on"))?;
//! node.add_constraint(LinearConstraint::le(LinExpr::var(x) - LinExpr::term(on, 10.0), 0.0))?;
//! node.add_objective(LinExpr::term(x, 2.0) + LinExpr::term(on, 5.0))?;
//!
//! let node = g.node_mut(b).unwrap();
//! let y = node.add_variable(VariableDef::continuous("y", 0.0, 4.0))?;
//! node.add_objective(LinExpr::term(y, 3.0))?;
//!
//! // hyperedge: together they cover a demand of 7
//! g.add_link_constraint(LinearConstraint::ge(LinExpr::var(x) + LinExpr::var(y), 7.0))?;
//!
//! let sol = solve_milp(&g.flatten()?.model, &SolveOptions::with_gap(0.0))?;
//! assert_eq!(sol.objective, 19.0); // x = 7 with the unit on
//! # Ok(())
//! # }
//! ```

pub mod drivers;
pub mod export;
pub mod expr;
pub mod graph;
pub mod par;
pub mod power;
pub mod solver;

pub use expr::{LinExpr, LinearConstraint, Sense};
pub use graph::{Domain, GraphError, GraphId, NodeId, OptiGraph, VariableDef, VariableRef};
pub use solver::{MilpModel, Solution, SolveOptions, Status};
