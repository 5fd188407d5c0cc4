use std::collections::VecDeque;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::SYMMETRY_TOL;
use crate::error::{Error, Result};
use crate::linalg::{cholesky, SymMatrix};

/// A candidate arc. Its identity is its position in the instance arc list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub cost: f64,
    pub mu: f64,
}

/// Covariance as it appears in instance files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CovarianceSpec {
    Diag { diag: Vec<f64> },
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

/// On-disk instance schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub nodes: usize,
    pub source: usize,
    pub sink: usize,
    pub demand: f64,
    pub arcs: Vec<Arc>,
    pub cov: CovarianceSpec,
}

/// Validated network with probabilistic arc capacities.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkInstance {
    pub id: Option<String>,
    /// Demand fraction used by the generator, when known.
    pub beta: Option<f64>,
    pub nodes: usize,
    pub source: usize,
    pub sink: usize,
    pub demand: f64,
    pub arcs: Vec<Arc>,
    cov: SymMatrix,
    sigma: Vec<f64>,
}

impl NetworkInstance {
    pub fn new(
        nodes: usize,
        source: usize,
        sink: usize,
        demand: f64,
        arcs: Vec<Arc>,
        cov: SymMatrix,
    ) -> Result<Self> {
        let sigma = cov.diag().iter().map(|v| v.max(0.0).sqrt()).collect();
        let inst = NetworkInstance {
            id: None,
            beta: None,
            nodes,
            source,
            sink,
            demand,
            arcs,
            cov,
            sigma,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }

    pub fn from_file(file: InstanceFile) -> Result<Self> {
        let m = file.arcs.len();
        let cov = match file.cov {
            CovarianceSpec::Diag { diag } => {
                if diag.len() != m {
                    return Err(Error::instance(format!(
                        "cov.diag has {} entries for {m} arcs",
                        diag.len()
                    )));
                }
                SymMatrix::from_diag(&diag)
            }
            CovarianceSpec::Rows(rows) => SymMatrix::from_rows(&rows)?,
            CovarianceSpec::Flat(flat) => SymMatrix::from_flat(m, flat)?,
        };
        let mut inst = Self::new(file.nodes, file.source, file.sink, file.demand, file.arcs, cov)?;
        inst.id = file.id;
        inst.beta = file.beta;
        Ok(inst)
    }

    pub fn to_file(&self) -> InstanceFile {
        let cov = if self.cov.is_diagonal() {
            CovarianceSpec::Diag {
                diag: self.cov.diag(),
            }
        } else {
            CovarianceSpec::Rows(self.cov.rows())
        };
        InstanceFile {
            id: self.id.clone(),
            beta: self.beta,
            nodes: self.nodes,
            source: self.source,
            sink: self.sink,
            demand: self.demand,
            arcs: self.arcs.clone(),
            cov,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    #[inline]
    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn cov(&self) -> &SymMatrix {
        &self.cov
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn mu(&self) -> Vec<f64> {
        self.arcs.iter().map(|a| a.mu).collect()
    }

    pub fn costs(&self) -> Vec<f64> {
        self.arcs.iter().map(|a| a.cost).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.cov.is_diagonal()
    }

    /// Same network with a different demand.
    pub fn with_demand(&self, demand: f64) -> Self {
        let mut out = self.clone();
        out.demand = demand;
        out
    }

    fn validate(&self) -> Result<()> {
        let m = self.arcs.len();
        if self.nodes < 2 {
            return Err(Error::instance("need at least two nodes"));
        }
        if self.source >= self.nodes || self.sink >= self.nodes {
            return Err(Error::instance("source or sink out of range"));
        }
        if self.source == self.sink {
            return Err(Error::instance("source and sink coincide"));
        }
        if !self.demand.is_finite() {
            return Err(Error::instance("demand must be finite"));
        }
        for (k, a) in self.arcs.iter().enumerate() {
            if a.tail >= self.nodes || a.head >= self.nodes {
                return Err(Error::instance(format!("arc {k}: endpoint out of range")));
            }
            if a.tail == a.head {
                return Err(Error::instance(format!("arc {k}: self loop")));
            }
            if !(a.cost >= 0.0 && a.cost.is_finite()) {
                return Err(Error::instance(format!("arc {k}: cost must be finite and >= 0")));
            }
            if !a.mu.is_finite() {
                return Err(Error::instance(format!("arc {k}: mu must be finite")));
            }
        }
        if self.cov.dim() != m {
            return Err(Error::instance(format!(
                "covariance is {0}x{0} for {m} arcs",
                self.cov.dim()
            )));
        }
        let asym = self.cov.max_asymmetry();
        if asym > SYMMETRY_TOL {
            return Err(Error::instance(format!(
                "covariance not symmetric (max deviation {asym:.3e})"
            )));
        }
        for i in 0..m {
            if self.cov.get(i, i) < 0.0 {
                return Err(Error::instance(format!("arc {i}: negative variance")));
            }
            for j in i + 1..m {
                if self.cov.get(i, j).abs() > self.sigma[i] * self.sigma[j] + SYMMETRY_TOL {
                    return Err(Error::instance(format!(
                        "|cov({i},{j})| exceeds sigma_i * sigma_j"
                    )));
                }
            }
        }
        cholesky(&self.cov).map_err(|e| Error::instance(format!("covariance: {e}")))?;
        if !self.has_path(&vec![true; m]) {
            return Err(Error::instance("no directed source-sink path"));
        }
        Ok(())
    }

    /// Whether the arcs selected by `design` contain a directed s-t path.
    pub fn has_path(&self, design: &[bool]) -> bool {
        let mut adj = vec![Vec::new(); self.nodes];
        for (k, a) in self.arcs.iter().enumerate() {
            if design[k] {
                adj[a.tail].push(a.head);
            }
        }
        let mut seen = vec![false; self.nodes];
        let mut queue = VecDeque::from([self.source]);
        seen[self.source] = true;
        while let Some(u) = queue.pop_front() {
            if u == self.sink {
                return true;
            }
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        false
    }

    pub fn design_cost(&self, design: &[bool]) -> f64 {
        self.arcs
            .iter()
            .zip(design)
            .filter(|(_, &on)| on)
            .map(|(a, _)| a.cost)
            .sum()
    }
}
