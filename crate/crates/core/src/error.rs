use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error(
        "eigensolver did not converge after {iterations} iterations (best residual {residual:e}, estimate {lambda})"
    )]
    EigenNoConvergence {
        iterations: usize,
        residual: f64,
        lambda: f64,
    },

    #[error("integration unstable at t = {t}: state violates invariants by {violation:e}; retry with a smaller dt")]
    IntegrationUnstable { t: f64, violation: f64 },

    #[error("equilibrium residual is singular at node {node} (p = 1)")]
    SingularEquilibrium { node: usize },

    #[error("degenerate awareness range at node {node}: kappa_lower = kappa_upper = {kappa}")]
    DegenerateRange { node: usize, kappa: f64 },

    #[error("kappa = {kappa} outside [{lower}, {upper}]")]
    OutOfDomain { kappa: f64, lower: f64, upper: f64 },

    #[error("target y = {y} unattainable; attainable range is [{lower}, {upper})")]
    InfeasibleTarget { y: f64, lower: f64, upper: f64 },

    #[error("singular Charnes-Cooper transform: w = {w} must be positive")]
    SingularTransform { w: f64 },

    #[error("solver stopped after {iterations} iterations without converging (certified margin {margin:e})")]
    SolverIterationCap {
        iterations: usize,
        margin: f64,
        best: Box<crate::allocation::AllocationResult>,
    },

    #[error("linear program is {0}")]
    Lp(&'static str),

    #[error("oracle limited to {max} nodes, got {n}")]
    OracleTooLarge { max: usize, n: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
