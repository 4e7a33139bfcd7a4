use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config { .. } => 2,
            CliError::Io { .. } => 3,
        }
    }
}

/// Maps a core error to the config key that caused it.
pub fn from_core(section: &str, err: cvleak_core::Error) -> CliError {
    use cvleak_core::Error;
    let key = match &err {
        Error::Domain { name, .. } => match *name {
            "eta" | "epsilon" => format!("channel.{name}"),
            "distance" => "channel.distance_km".to_string(),
            "attenuation" => "channel.attenuation_db_per_km".to_string(),
            "beta" => "protocol.beta".to_string(),
            "v_s" | "v_m" | "k" | "v_l" | "eta_e" | "v_es" => format!("scenario.{name}"),
            _ => section.to_string(),
        },
        _ => section.to_string(),
    };
    CliError::config(key, err.to_string())
}

pub type Result<T> = std::result::Result<T, CliError>;
