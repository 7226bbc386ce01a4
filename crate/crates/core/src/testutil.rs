//! Small hand-made instances shared by unit tests.

use crate::instance::*;

/// One facility, one office, one user reachable on fiber only.
pub fn single_path() -> Instance {
    Instance {
        meta: Meta { name: "single".into(), ..Meta::default() },
        users: vec![User { id: 0, weight: 1.0, position: Position::new(0.0, 0.0) }],
        facilities: vec![Facility {
            id: 0,
            position: Position::new(1.0, 0.0),
            open_cost: [5.0, 3.0, 2.0],
        }],
        central_offices: vec![CentralOffice { id: 0, position: Position::new(2.0, 0.0), open_cost: 7.0 }],
        steiner_nodes: vec![],
        core_arcs: vec![CoreArc {
            tail: CoreNode::CentralOffice(0),
            head: CoreNode::Facility(0),
            cost: 4.0,
        }],
        assignment_arcs: AssignmentArcs {
            fiber: vec![AssignmentArc { facility: 0, user: 0, cost: 1.5 }],
            ..AssignmentArcs::default()
        },
        coverage_thresholds: [1.0, 1.0, 0.0],
        wireless: Some(Wireless {
            p_min: 0.1,
            p_max: 1.0,
            delta: 2.0,
            noise: 0.05,
            fading: vec![vec![0.5]],
        }),
    }
}
