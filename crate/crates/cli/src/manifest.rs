use markov_stability::GridSpec;
use serde::Serialize;

use crate::files::Input;

/// Everything needed to repeat a run: the command line, a digest of the
/// input and the effective settings after defaults were applied.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub args: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<InputDigest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimiser: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridManifest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub msgso_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prune_leaves: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refine: Option<RefineManifest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Thresholds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<serde_json::Value>,
    pub scalar: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GridManifest {
    Single { t: f64 },
    Spec { spec: GridSpec, points: usize },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RefineManifest {
    pub enabled: bool,
    pub passes: usize,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Thresholds {
    pub nmi: f64,
    pub min_points: usize,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            args: std::env::args().skip(1).collect(),
            scalar: "f64",
            ..Default::default()
        }
    }

    pub fn with_input(mut self, input: &Input) -> Self {
        self.input = Some(InputDigest {
            path: input.path.display().to_string(),
            sha256: input.sha256.clone(),
        });
        self
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("manifest serialises")
    }
}
