use crate::error::{Error, Result};

use super::NetworkInstance;

/// An s-t cut given by its source side.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cut {
    /// `source_side[v]` is true for nodes on the source side.
    pub source_side: Vec<bool>,
    /// Arcs leaving the source side, in instance order.
    pub arc_ids: Vec<usize>,
}

impl Cut {
    pub fn from_source_side(inst: &NetworkInstance, source_side: Vec<bool>) -> Result<Self> {
        if source_side.len() != inst.nodes {
            return Err(Error::domain("source side has wrong length"));
        }
        if !source_side[inst.source] || source_side[inst.sink] {
            return Err(Error::domain("source side must contain s and exclude t"));
        }
        let arc_ids = crossing_arcs(inst, &source_side);
        Ok(Cut {
            source_side,
            arc_ids,
        })
    }

    /// Cut from a bitmask over [`internal_nodes`]; bit `k` set puts the
    /// `k`-th internal node on the source side.
    pub fn from_mask(inst: &NetworkInstance, internal: &[usize], mask: u64) -> Self {
        let mut side = vec![false; inst.nodes];
        side[inst.source] = true;
        for (k, &v) in internal.iter().enumerate() {
            if mask >> k & 1 == 1 {
                side[v] = true;
            }
        }
        let arc_ids = crossing_arcs(inst, &side);
        Cut {
            source_side: side,
            arc_ids,
        }
    }

    /// Bitmask over [`internal_nodes`].
    pub fn mask(&self, internal: &[usize]) -> u64 {
        internal
            .iter()
            .enumerate()
            .filter(|(_, &v)| self.source_side[v])
            .fold(0u64, |m, (k, _)| m | 1 << k)
    }

    pub fn source_nodes(&self) -> Vec<usize> {
        (0..self.source_side.len())
            .filter(|&v| self.source_side[v])
            .collect()
    }

    /// Indicator over all arcs.
    pub fn arc_indicator(&self, num_arcs: usize) -> Vec<bool> {
        let mut z = vec![false; num_arcs];
        for &a in &self.arc_ids {
            z[a] = true;
        }
        z
    }

    /// Sum of `values` over the cut arcs.
    pub fn sum(&self, values: &[f64]) -> f64 {
        self.arc_ids.iter().map(|&a| values[a]).sum()
    }
}

fn crossing_arcs(inst: &NetworkInstance, side: &[bool]) -> Vec<usize> {
    inst.arcs
        .iter()
        .enumerate()
        .filter(|(_, a)| side[a.tail] && !side[a.head])
        .map(|(k, _)| k)
        .collect()
}

/// Nodes other than source and sink, in increasing id order.
pub fn internal_nodes(inst: &NetworkInstance) -> Vec<usize> {
    (0..inst.nodes)
        .filter(|&v| v != inst.source && v != inst.sink)
        .collect()
}

/// All `2^(|V|-2)` s-t cuts, internal-node subsets in binary counter order.
pub fn enumerate_cuts(inst: &NetworkInstance, limit: usize) -> Result<Vec<Cut>> {
    let internal = internal_nodes(inst);
    if internal.len() > limit || internal.len() >= 63 {
        return Err(Error::Size {
            what: "internal node count for cut enumeration (use a separation strategy)",
            size: internal.len(),
            limit,
        });
    }
    Ok((0..1u64 << internal.len())
        .map(|mask| Cut::from_mask(inst, &internal, mask))
        .collect())
}
