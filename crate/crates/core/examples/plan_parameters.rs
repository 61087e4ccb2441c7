//! Longest gateway sleep for a few delay budgets.
//!
//! ```text
//! cargo run --example plan_parameters
//! ```

use tpms_delay::planner::{self, Candidates, Objective, PlanRequest};

fn show(label: &str, request: &PlanRequest) -> tpms_delay::Result<()> {
    let r = planner::plan(request)?;
    if r.feasible {
        println!(
            "{label:<34} C_L={:<3} S={:<3} delay={:>7.1}  saving={:.1}%",
            r.c_l, r.s, r.achieved_delay, r.power_saving_ratio
        );
    } else {
        println!("{label:<34} infeasible (S=0 already needs {:.1} slots)", r.achieved_delay);
    }
    Ok(())
}

fn main() -> tpms_delay::Result<()> {
    for budget in [20, 94, 150, 500, 1000] {
        show(&format!("budget {budget}, C_L 32"), &PlanRequest::fixed(budget, 32, Objective::BoundWorstDelay))?;
    }
    let mut expected = PlanRequest::fixed(500, 32, Objective::BoundExpectedDelay);
    expected.n_sensors = 16;
    show("budget 500, C_L 32, 16 sensors", &expected)?;

    let range = PlanRequest {
        delay_budget: 300,
        n_sensors: 1,
        candidates: Candidates::Range { min: 16, max: 64 },
        objective: Objective::BoundWorstDelay,
        prefer_smaller_cl: false,
    };
    show("budget 300, C_L in 16..=64", &range)?;
    show("  same, preferring short cycles", &PlanRequest { prefer_smaller_cl: true, ..range })?;
    Ok(())
}
