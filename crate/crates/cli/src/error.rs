use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed flags or configuration.
    #[error("{message}")]
    Usage {
        key: Option<String>,
        message: String,
    },

    /// A module precondition failed.
    #[error("{origin}: {source}")]
    Domain {
        origin: &'static str,
        #[source]
        source: oscres_core::Error,
    },

    #[error("{origin}: series did not converge (value {value:e}, tail bound {tail_bound:e}, {terms_used} terms)")]
    NotConverged {
        origin: &'static str,
        value: f64,
        tail_bound: f64,
        terms_used: usize,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage {
            key: None,
            message: message.into(),
        }
    }

    /// Builds a usage error from a serde diagnostic, pulling out the first
    /// backquoted field name when serde reports one.
    pub fn from_serde(context: &str, err: serde_json::Error) -> Self {
        let message = err.to_string();
        let key = message.find("field `").and_then(|start| {
            let rest = &message[start + 7..];
            rest.find('`').map(|end| rest[..end].to_string())
        });
        CliError::Usage {
            key,
            message: format!("{context}: {message}"),
        }
    }

    pub fn domain(origin: &'static str) -> impl FnOnce(oscres_core::Error) -> Self {
        move |source| CliError::Domain { origin, source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => 2,
            CliError::Domain { .. } => 3,
            CliError::NotConverged { .. } => 4,
            CliError::Io { .. } => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage { .. } => "usage",
            CliError::Domain { .. } => "domain",
            CliError::NotConverged { .. } => "non_convergence",
            CliError::Io { .. } => "io",
        }
    }

    /// Machine-readable error object written to stderr on failure.
    pub fn to_json(&self) -> serde_json::Value {
        let mut body = json!({
            "kind": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        match self {
            CliError::Usage { key: Some(key), .. } => {
                body["key"] = json!(key);
            }
            CliError::Domain { origin, .. } => {
                body["origin"] = json!(origin);
            }
            CliError::NotConverged {
                origin,
                value,
                tail_bound,
                terms_used,
            } => {
                body["origin"] = json!(origin);
                body["value"] = json!(value);
                body["tail_bound"] = json!(tail_bound);
                body["terms_used"] = json!(terms_used);
            }
            _ => {}
        }
        json!({ "error": body })
    }
}
