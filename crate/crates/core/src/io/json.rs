//! JSON documents: instances and solutions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{InstanceError, ReportError};
use crate::formulation::ConflModel;
use crate::heuristic::TraceEntry;
use crate::instance::Instance;

/// Pretty-printed JSON; floats keep full precision.
pub fn write_instance(instance: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(instance).expect("instances always serialize");
    s.push('\n');
    s
}

/// Parses and validates an instance document. Errors name the offending
/// field path.
pub fn read_instance(text: &str) -> Result<Instance, InstanceError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let inst: Instance = serde_path_to_error::deserialize(de).map_err(|e| InstanceError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    inst.validate()?;
    Ok(inst)
}

/// SHA-256 of the compact serialization, as lowercase hex.
pub fn instance_hash(instance: &Instance) -> String {
    let bytes = serde_json::to_vec(instance).expect("instances always serialize");
    hex::encode(Sha256::digest(bytes))
}

/// Result file written by `solve` and `exact`, read back by `report`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDoc {
    /// "heuristic" or "exact".
    pub method: String,
    pub instance: String,
    pub instance_hash: String,
    pub status: String,
    pub objective: Option<f64>,
    /// Absent when no finite bound is known.
    pub lower_bound: Option<f64>,
    /// Relative gap in [0, 1].
    pub gap: Option<f64>,
    /// Variable name to value, nonzero entries only.
    pub assignment: BTreeMap<String, f64>,
    #[serde(default)]
    pub trace: Vec<serde_json::Value>,
}

impl SolutionDoc {
    pub fn new(method: &str, instance: &Instance, status: &str) -> Self {
        SolutionDoc {
            method: method.into(),
            instance: instance.meta.name.clone(),
            instance_hash: instance_hash(instance),
            status: status.into(),
            objective: None,
            lower_bound: None,
            gap: None,
            assignment: BTreeMap::new(),
            trace: Vec::new(),
        }
    }

    pub fn set_assignment(&mut self, confl: &ConflModel, x: &confl_milp::Assignment) {
        self.assignment = confl
            .model
            .variables()
            .iter()
            .zip(x.values())
            .filter(|(_, &v)| v != 0.0)
            .map(|(var, &v)| (var.name.clone(), v))
            .collect();
    }

    pub fn set_trace(&mut self, trace: &[TraceEntry]) {
        self.trace = trace
            .iter()
            .map(|e| serde_json::to_value(e).expect("trace entries serialize"))
            .collect();
    }

    /// Dense assignment for `confl`; absent names read as zero.
    pub fn to_assignment(&self, confl: &ConflModel) -> Result<confl_milp::Assignment, ReportError> {
        let mut x = confl_milp::Assignment::zeros(confl.model.num_variables());
        for (name, &v) in &self.assignment {
            let id = confl.model.var_by_name(name).ok_or_else(|| ReportError::Schema {
                path: format!("assignment.{name}"),
                message: "unknown variable".into(),
            })?;
            x.set(id, v);
        }
        Ok(x)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("solutions always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| ReportError::Schema {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }
}
