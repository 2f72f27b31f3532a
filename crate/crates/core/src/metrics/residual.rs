use crate::block::{check_len, dist};
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

/// Natural-map residual `‖x − P_X(x − F(x))‖`. It vanishes exactly on
/// `SOL(X, F)` and needs no boundedness of X.
pub fn natural_residual(problem: &ProblemSpec, x: &[f64]) -> Result<f64> {
    check_len(problem.dim(), x.len())?;
    let fx = problem.eval_map(x);
    let trial: Vec<f64> = x.iter().zip(&fx).map(|(a, b)| a - b).collect();
    let mut proj = vec![0.0; x.len()];
    problem.project_into(&trial, &mut proj);
    Ok(dist(x, &proj))
}

/// `f(x) − f*` using the problem's stored optimal value.
pub fn suboptimality(problem: &ProblemSpec, x: &[f64]) -> Result<f64> {
    check_len(problem.dim(), x.len())?;
    let fstar = problem.optimal_value().ok_or_else(|| {
        Error::MissingReference(format!("problem '{}' has no optimal value", problem.name()))
    })?;
    Ok(problem.objective_value(x) - fstar)
}
