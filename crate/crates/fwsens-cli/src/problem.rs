//! Problem file schema: strict JSON with explicit rejection of anything
//! that could silently change the optimization being run.

use std::path::Path;

use fwsens::{Matrix, Polytope, QuadraticObjective, SmoothObjective};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveSpec {
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
    pub c: Vec<f64>,
    pub r: f64,
}

/// `{ "name"?, "A", "b", "objective": {"Q", "c", "r"}, "x0"? }`.
///
/// Unknown keys are rejected so a typo like `"b_prime"` cannot be silently
/// ignored; all numbers must be finite.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub objective: ObjectiveSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
}

/// Validated problem ready to hand to the solver.
pub struct Problem {
    pub name: Option<String>,
    pub p: Polytope<f64>,
    pub f: QuadraticObjective<f64>,
    pub x0: Option<Vec<f64>>,
}

pub fn load(path: &Path) -> Result<Problem, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let file: ProblemFile = serde_json::from_str(&text)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    file.into_problem()
        .map_err(|e| format!("{}: {e}", path.display()))
}

impl ProblemFile {
    pub fn into_problem(self) -> Result<Problem, String> {
        check_finite_matrix("A", &self.a)?;
        check_finite_vec("b", &self.b)?;
        check_finite_matrix("objective.Q", &self.objective.q)?;
        check_finite_vec("objective.c", &self.objective.c)?;
        if !self.objective.r.is_finite() {
            return Err("objective.r: value is not finite".into());
        }
        if let Some(x0) = &self.x0 {
            check_finite_vec("x0", x0)?;
        }

        let p = Polytope::from_rows(self.a, self.b).map_err(|e| format!("A/b: {e}"))?;
        let q = Matrix::from_rows(self.objective.q).map_err(|e| format!("objective.Q: {e}"))?;
        let f = QuadraticObjective::new(q, self.objective.c, self.objective.r)
            .map_err(|e| format!("objective: {e}"))?;
        if f.dim() != p.dim() {
            return Err(format!(
                "objective dimension {} does not match the {} polytope columns",
                f.dim(),
                p.dim()
            ));
        }
        if let Some(x0) = &self.x0 {
            if x0.len() != p.dim() {
                return Err(format!(
                    "x0 has {} entries, expected {}",
                    x0.len(),
                    p.dim()
                ));
            }
        }
        Ok(Problem {
            name: self.name,
            p,
            f,
            x0: self.x0,
        })
    }
}

fn check_finite_vec(field: &str, v: &[f64]) -> Result<(), String> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(format!("{field}[{i}]: value is not finite")),
        None => Ok(()),
    }
}

fn check_finite_matrix(field: &str, m: &[Vec<f64>]) -> Result<(), String> {
    for (i, row) in m.iter().enumerate() {
        if let Some(j) = row.iter().position(|x| !x.is_finite()) {
            return Err(format!("{field}[{i}][{j}]: value is not finite"));
        }
    }
    Ok(())
}

/// Parses a vector argument that is either inline JSON (`"[1, 2]"`) or a
/// path to a file containing one.
pub fn vector_arg(field: &str, raw: &str) -> Result<Vec<f64>, String> {
    let text = if raw.trim_start().starts_with('[') {
        raw.to_string()
    } else {
        std::fs::read_to_string(raw).map_err(|e| format!("{field}: {raw}: {e}"))?
    };
    let v: Vec<f64> =
        serde_json::from_str(&text).map_err(|e| format!("{field}: {e}"))?;
    check_finite_vec(field, &v)?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED: &str = r#"{
        "name": "square",
        "A": [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]],
        "b": [1.0, 1.0, 0.0, 0.0],
        "objective": {"Q": [[1.0, 0.0], [0.0, 1.0]], "c": [-2.0, -0.5], "r": 2.125},
        "x0": [0.0, 0.0]
    }"#;

    #[test]
    fn worked_fixture_loads() {
        let file: ProblemFile = serde_json::from_str(WORKED).unwrap();
        let problem = file.into_problem().unwrap();
        assert_eq!(problem.p.dim(), 2);
        assert_eq!(problem.p.num_constraints(), 4);
        assert_eq!(problem.name.as_deref(), Some("square"));
    }

    #[test]
    fn parse_serialize_parse_is_identity() {
        let file: ProblemFile = serde_json::from_str(WORKED).unwrap();
        let text = serde_json::to_string(&file).unwrap();
        let again: ProblemFile = serde_json::from_str(&text).unwrap();
        assert_eq!(file, again);
    }

    #[test]
    fn unknown_keys_are_named_in_the_error() {
        let bad = WORKED.replace("\"x0\"", "\"x_start\"");
        let err = serde_json::from_str::<ProblemFile>(&bad).unwrap_err();
        assert!(err.to_string().contains("x_start"), "{err}");
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let bad = WORKED.replace("\"c\": [-2.0, -0.5]", "\"c\": [-2.0]");
        let file: ProblemFile = serde_json::from_str(&bad).unwrap();
        assert!(file.into_problem().is_err());
    }

    #[test]
    fn inline_and_malformed_vector_args() {
        assert_eq!(vector_arg("b", "[1.0, 2]").unwrap(), vec![1.0, 2.0]);
        assert!(vector_arg("b", "[1.0,").is_err());
        assert!(vector_arg("b", "/nonexistent/path.json").is_err());
    }
}
