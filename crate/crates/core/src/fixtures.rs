//! The six-node example network and its published minimum-cost designs.
//!
//! Node ids: `s = 0`, internal nodes `1..=4` keep their labels, `t = 5`.
//! Arc ids are the 0-based positions of the 15 candidate arcs, so the
//! table's edge `#k` is arc `k - 1`.

use crate::model::NetworkInstance;

pub const TABLE1_JSON: &str = include_str!("../fixtures/table1.json");

/// The bundled six-node instance (demand 230, independent capacities).
pub fn table1() -> NetworkInstance {
    NetworkInstance::from_json(TABLE1_JSON).expect("bundled fixture is valid")
}

/// A published design: service level, risk level and the selected arcs.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceDesign {
    pub service_level: f64,
    pub epsilon: f64,
    /// 0-based arc ids.
    pub arcs: &'static [usize],
    pub cost: f64,
}

/// Minimum-cost configurations for service levels 50, 70, 80, 97.5, 99 and 99.9%.
pub const REFERENCE_DESIGNS: [ReferenceDesign; 6] = [
    // s2 s4 st 2t 4t
    ReferenceDesign { service_level: 0.5, epsilon: 0.5, arcs: &[1, 3, 4, 11, 14], cost: 307.0 },
    // s1 s2 s4 1t 2t 4t
    ReferenceDesign { service_level: 0.7, epsilon: 0.3, arcs: &[0, 1, 3, 8, 11, 14], cost: 319.0 },
    // s1 s2 s4 st 13 2t 3t 4t
    ReferenceDesign { service_level: 0.8, epsilon: 0.2, arcs: &[0, 1, 3, 4, 6, 11, 13, 14], cost: 389.0 },
    // s1 s2 s4 st 1t 2t 4t
    ReferenceDesign { service_level: 0.975, epsilon: 0.025, arcs: &[0, 1, 3, 4, 8, 11, 14], cost: 414.0 },
    // s1 s2 s3 s4 st 1t 2t 34 4t
    ReferenceDesign { service_level: 0.99, epsilon: 0.01, arcs: &[0, 1, 2, 3, 4, 8, 11, 12, 14], cost: 544.0 },
    // s1 s2 s3 s4 st 1t 2t 3t 4t
    ReferenceDesign { service_level: 0.999, epsilon: 0.001, arcs: &[0, 1, 2, 3, 4, 8, 11, 13, 14], cost: 570.0 },
];

impl ReferenceDesign {
    pub fn indicator(&self, num_arcs: usize) -> Vec<bool> {
        let mut x = vec![false; num_arcs];
        for &a in self.arcs {
            x[a] = true;
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_shape() {
        let inst = table1();
        assert_eq!(inst.num_arcs(), 15);
        assert_eq!(inst.demand, 230.0);
        assert!(inst.is_diagonal());
        assert_eq!(inst.sigma()[1], 26.0);
    }

    #[test]
    fn reference_costs_match_arc_costs() {
        let inst = table1();
        for d in &REFERENCE_DESIGNS {
            assert_eq!(inst.design_cost(&d.indicator(15)), d.cost);
        }
    }
}
