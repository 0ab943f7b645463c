use std::path::Path;

use super::{make_lasso, make_pl_nonconvex, make_quadratic, make_self_concordant, ObjectiveError, Problem};
use crate::Matrix;

/// Objective id forms accepted by [`resolve`].
pub const OBJECTIVE_IDS: [&str; 4] = [
    "quadratic:<path-to-matrix-csv>",
    "pl_nonconvex",
    "self_concordant:<d>",
    "lasso:<lambda>",
];

/// Parses a dense matrix, one row per line, comma- or whitespace-separated.
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_matrix_csv(text: &str) -> Result<Matrix, ObjectiveError> {
    let bad = |reason: String| ObjectiveError::BadParameter {
        id: "quadratic".into(),
        reason,
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| bad(format!("line {}: `{s}`: {e}", lineno + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(bad("empty matrix".into()));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(ObjectiveError::NotSquare { rows: n, cols: r.len() });
    }
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(Matrix::from_row_slice(n, n, &flat))
}

/// Resolves an objective id. Relative matrix paths are taken relative to
/// `base_dir` when given.
pub fn resolve(id: &str, base_dir: Option<&Path>) -> Result<Problem, ObjectiveError> {
    let (head, arg) = match id.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (id, None),
    };
    let missing = || ObjectiveError::BadParameter {
        id: id.to_string(),
        reason: "missing parameter after `:`".into(),
    };
    match (head, arg) {
        ("quadratic", Some(path)) if !path.is_empty() => {
            let p = Path::new(path);
            let full = match base_dir {
                Some(base) if p.is_relative() => base.join(p),
                _ => p.to_path_buf(),
            };
            let text = std::fs::read_to_string(&full).map_err(|source| ObjectiveError::Io {
                path: full.display().to_string(),
                source,
            })?;
            Ok(Problem::smooth(make_quadratic(parse_matrix_csv(&text)?)?))
        }
        ("quadratic", _) => Err(missing()),
        ("pl_nonconvex", None) => Ok(Problem::smooth(make_pl_nonconvex())),
        ("self_concordant", Some(d)) => {
            let d: usize = d.parse().map_err(|e| ObjectiveError::BadParameter {
                id: id.to_string(),
                reason: format!("dimension: {e}"),
            })?;
            Ok(Problem::smooth(make_self_concordant(d)?))
        }
        ("self_concordant", None) => Err(missing()),
        ("lasso", Some(lambda)) => {
            let lambda: f64 = lambda.parse().map_err(|e| ObjectiveError::BadParameter {
                id: id.to_string(),
                reason: format!("lambda: {e}"),
            })?;
            Ok(Problem::composite(make_lasso(lambda)?))
        }
        ("lasso", None) => Err(missing()),
        _ => Err(ObjectiveError::UnknownId(id.to_string())),
    }
}
