//! Fixture systems with a known null-condition verdict, derived by hand.
//!
//! Ground truth follows from the definition: a same-speed product into a
//! component of that speed must vanish on the cone `X0^2 = c^2 |X'|^2`.
//! `Q0` and `Q_ab` do; `(d_t u)^2` and `(d_1 u)^2` do not. Pairs with
//! different speeds, and equal-speed pairs feeding a component of a
//! different speed, are unconstrained.

use crate::model::{NonlinearitySpec, NullTerm, QuadTerm, WaveSystem};

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub system: WaveSystem,
    /// Analytic verdict.
    pub null: bool,
}

fn fixture(name: impl Into<String>, speeds: Vec<f64>, null_terms: Vec<NullTerm>, quadratic: Vec<QuadTerm>, null: bool) -> Fixture {
    Fixture {
        name: name.into(),
        system: WaveSystem::new(
            speeds,
            NonlinearitySpec {
                null_terms,
                general_quadratic: quadratic,
                ..Default::default()
            },
        ),
        null,
    }
}

pub fn fixture_catalog() -> Vec<Fixture> {
    let mut out = Vec::new();
    for c in [1.0, 0.5, 2.0, 3.25] {
        out.push(fixture(format!("Q0 c={c}"), vec![c], vec![NullTerm::q0(0, 0, 0, 1.0)], vec![], true));
    }
    for a in 0..4 {
        for b in a + 1..4 {
            out.push(fixture(format!("Q{a}{b}"), vec![1.0], vec![NullTerm::qab(0, 0, 0, a, b, 1.0)], vec![], true));
        }
    }
    for c in [1.0, 2.0] {
        out.push(fixture(format!("(d_t u)^2 c={c}"), vec![c], vec![], vec![QuadTerm::new(0, 0, 0, 0, 0, 1.0)], false));
        out.push(fixture(format!("(d_1 u)^2 c={c}"), vec![c], vec![], vec![QuadTerm::new(0, 0, 0, 1, 1, 1.0)], false));
    }
    out.push(fixture("d_t u d_3 u", vec![1.0], vec![], vec![QuadTerm::new(0, 0, 0, 0, 3, 1.0)], false));
    // Q0 written out by hand at speed 2
    let c = 2.0;
    let mut written = vec![QuadTerm::new(0, 0, 0, 0, 0, 1.0)];
    written.extend((1..4).map(|a| QuadTerm::new(0, 0, 0, a, a, -c * c)));
    out.push(fixture("Q0 written out c=2", vec![c], vec![], written, true));
    out.push(fixture("R_I d_t u0 d_t u1", vec![1.0, 2.0], vec![], vec![QuadTerm::new(0, 0, 1, 0, 0, 1.0)], true));
    out.push(fixture("R_I d_1 u1 d_2 u0", vec![1.0, 2.0], vec![], vec![QuadTerm::new(1, 1, 0, 1, 2, 1.0)], true));
    out.push(fixture("R_II (d_t u1)^2 into u0", vec![1.0, 2.0], vec![], vec![QuadTerm::new(0, 1, 1, 0, 0, 1.0)], true));
    out.push(fixture("R_II (d_1 u0)^2 into u1", vec![1.0, 2.0], vec![], vec![QuadTerm::new(1, 0, 0, 1, 1, 1.0)], true));
    out.push(fixture("same speed d_t u0 d_t u1", vec![1.0, 1.0], vec![], vec![QuadTerm::new(0, 0, 1, 0, 0, 1.0)], false));
    out.push(fixture(
        "mixed Q0 + Q12 + R_I + R_II",
        vec![1.0, 2.0],
        vec![NullTerm::q0(0, 0, 0, 1.0), NullTerm::qab(0, 0, 0, 1, 2, -0.5), NullTerm::q0(1, 1, 1, 3.0)],
        vec![QuadTerm::new(0, 0, 1, 0, 2, 0.7), QuadTerm::new(0, 1, 1, 1, 1, 1.1)],
        true,
    ));
    out.push(fixture(
        "mixed Q0 + (d_t u)^2",
        vec![1.0],
        vec![NullTerm::q0(0, 0, 0, 1.0)],
        vec![QuadTerm::new(0, 0, 0, 0, 0, 0.25)],
        false,
    ));
    out.push(fixture(
        "mixed R_I + non-null second component",
        vec![1.0, 2.0],
        vec![NullTerm::q0(0, 0, 0, 1.0)],
        vec![QuadTerm::new(0, 0, 1, 0, 0, 1.0), QuadTerm::new(1, 1, 1, 2, 2, 1.0)],
        false,
    ));
    out
}
