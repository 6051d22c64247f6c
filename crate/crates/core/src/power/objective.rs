//! Layer cost functions as expressions over time-point variables.
//!
//! Builders place the same terms on bus-node objectives; these functions
//! rebuild them independently for reporting and cross-checks.

use crate::expr::LinExpr;
use crate::graph::VariableRef;

use super::data::{Category, NetworkData};
use super::timepoint::PointVars;

/// Commitment cost: startups plus no-load cost over `delta_h`-hour steps,
/// for units committed at these points.
pub fn f_u(net: &NetworkData, points: &[PointVars], delta_h: f64) -> LinExpr<VariableRef> {
    let mut e = LinExpr::new();
    for p in points {
        for (g, u) in net.generators.iter().enumerate() {
            if let Some(c) = p.commit(g) {
                e.add_term(c.s, u.phi_s);
                e.add_term(c.x, u.phi_f * delta_h);
            }
        }
    }
    e
}

/// Dispatch cost rate ($/h) summed over points: variable cost, shed,
/// overgeneration and curtailment. Multiply by the step to get dollars.
pub fn f_e(net: &NetworkData, points: &[PointVars]) -> LinExpr<VariableRef> {
    let mut e = LinExpr::new();
    for p in points {
        for (b, bv) in p.buses.iter().enumerate() {
            e.add_term(bv.shed, net.buses[b].unmet_cost);
        }
        for (g, u) in net.generators.iter().enumerate() {
            let Some(v) = p.gen(g) else { continue };
            match u.category {
                Category::Renewable => e.add_term(v.minus, u.phi_c),
                _ => {
                    e.add_term(v.plus, u.phi_v);
                    e.add_term(v.minus, u.phi_o);
                }
            }
        }
    }
    e
}
