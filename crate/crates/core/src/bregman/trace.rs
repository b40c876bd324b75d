use std::fmt;
use std::str::FromStr;

/// One row of a convergence trace. Row 0 describes the starting point.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// F(x) at this iterate.
    pub objective: f64,
    /// Cumulative wall time in seconds spent in gradient and subproblem work.
    pub elapsed_secs: f64,
    /// Relative squared error to a reference point, when one was supplied.
    pub rse: Option<f64>,
    /// D_{h_{x⁽ˡ⁾}}(x⁽ˡ⁾, x⁽ˡ⁺¹⁾) for the step that produced this iterate
    /// (Bregman solvers only).
    pub step_divergence: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TerminationStatus {
    Converged,
    MaxIterations,
    /// The objective increased beyond the guard slack.
    GuardViolation,
    /// No further progress is representable in floating point before the
    /// gradient tolerance was met.
    Stalled,
}

impl TerminationStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminationStatus::Converged => "converged",
            TerminationStatus::MaxIterations => "max-iterations",
            TerminationStatus::GuardViolation => "guard-violation",
            TerminationStatus::Stalled => "stalled",
        }
    }
}

impl fmt::Display for TerminationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TerminationStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "converged" => Ok(TerminationStatus::Converged),
            "max-iterations" => Ok(TerminationStatus::MaxIterations),
            "guard-violation" => Ok(TerminationStatus::GuardViolation),
            "stalled" => Ok(TerminationStatus::Stalled),
            other => Err(format!("unknown termination status '{other}'")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceTrace {
    pub records: Vec<IterationRecord>,
    pub status: TerminationStatus,
    /// Every iterate, starting with x⁽⁰⁾, when requested.
    pub iterates: Option<Vec<Vec<f64>>>,
}

impl ConvergenceTrace {
    pub fn new(record_iterates: bool) -> Self {
        Self {
            records: Vec::new(),
            status: TerminationStatus::MaxIterations,
            iterates: record_iterates.then(Vec::new),
        }
    }

    pub fn push(&mut self, record: IterationRecord, x: &[f64]) {
        self.records.push(record);
        if let Some(it) = self.iterates.as_mut() {
            it.push(x.to_vec());
        }
    }

    /// Number of completed iterations (excluding the starting row).
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn objectives(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.objective)
    }

    pub fn final_objective(&self) -> Option<f64> {
        self.records.last().map(|r| r.objective)
    }

    /// First iteration whose RSE is at or below `target`.
    pub fn iterations_to_rse(&self, target: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.rse.is_some_and(|e| e <= target))
            .map(|r| r.iteration)
    }
}

/// ‖x − r‖² / ‖r‖².
pub fn relative_squared_error(x: &[f64], reference: &[f64]) -> f64 {
    let num: f64 = x
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let den: f64 = reference.iter().map(|b| b * b).sum();
    num / den
}
