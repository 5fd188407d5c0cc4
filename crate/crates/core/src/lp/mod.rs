//! Bounded-variable linear programming.
//!
//! [`Simplex`] is a dual simplex over an explicit dense basis inverse. Every
//! structural column must be boxed (infinite bounds are replaced by a large
//! artificial box, and a solution resting on it is reported as unbounded),
//! which makes the all-slack basis dual feasible. That in turn gives cheap
//! warm starts for the operations branch-and-cut needs: adding rows, adding
//! columns and changing bounds all preserve dual feasibility.

mod simplex;

pub use simplex::Simplex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coefs: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

impl Row {
    pub fn new(coefs: Vec<(usize, f64)>, sense: RowSense, rhs: f64) -> Self {
        Row { coefs, sense, rhs }
    }

    pub fn le(coefs: Vec<(usize, f64)>, rhs: f64) -> Self {
        Self::new(coefs, RowSense::Le, rhs)
    }

    pub fn ge(coefs: Vec<(usize, f64)>, rhs: f64) -> Self {
        Self::new(coefs, RowSense::Ge, rhs)
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coefs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates the row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let act = self.activity(x);
        match self.sense {
            RowSense::Le => (act - self.rhs).max(0.0),
            RowSense::Ge => (self.rhs - act).max(0.0),
            RowSense::Eq => (act - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub maximize: bool,
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<Row>,
}

impl LinearProgram {
    /// Minimization over the box `[lower, upper]` with no rows yet.
    pub fn minimize(objective: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        LinearProgram {
            maximize: false,
            objective,
            lower,
            upper,
            rows: Vec::new(),
        }
    }

    pub fn num_cols(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, row: Row) {
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    /// One multiplier per row, in the sign convention of the user objective.
    pub duals: Vec<f64>,
    /// Reduced costs of the structural columns.
    pub reduced_costs: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Solves `lp` from the slack basis.
pub fn solve(lp: &LinearProgram) -> LpSolution {
    Simplex::new(lp).solve()
}

/// Warm re-solve after appending `rows` to a solved model.
pub fn resolve_with_new_rows(solver: &mut Simplex, rows: &[Row]) -> LpSolution {
    solver.add_rows(rows);
    solver.solve()
}

pub const PIVOT_TOL: f64 = 1e-9;
pub const PRIMAL_FEAS_TOL: f64 = 1e-7;
pub const DUAL_FEAS_TOL: f64 = 1e-9;
/// Replacement for infinite structural bounds.
pub const INFINITE_BOX: f64 = 1e9;
pub const REFACTOR_INTERVAL: usize = 100;
pub const BLAND_AFTER_DEGENERATE: usize = 1000;
