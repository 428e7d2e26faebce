//! Error records and the exit codes they map to.

use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_CERTIFICATION: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Validation,
    Certification,
    Numerical,
    Io,
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub kind: Kind,
    /// Offending config field, or the failed check for certification failures.
    pub field: String,
    pub message: String,
}

impl Failure {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { kind: Kind::Validation, field: field.into(), message: message.into() }
    }

    pub fn certification(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { kind: Kind::Certification, field: field.into(), message: message.into() }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        Self { kind: Kind::Io, field: path.display().to_string(), message: e.to_string() }
    }

    /// Library errors: parameter errors are validation failures under
    /// `section`, everything else is numerical.
    pub fn from_lib(section: &str, e: darksqueeze::Error) -> Self {
        match &e {
            darksqueeze::Error::Invalid { field, .. } => Self {
                kind: Kind::Validation,
                field: format!("{section}.{field}"),
                message: e.to_string(),
            },
            darksqueeze::Error::Grid(_) | darksqueeze::Error::StepSize(_) => {
                Self { kind: Kind::Validation, field: section.to_string(), message: e.to_string() }
            }
            _ => Self { kind: Kind::Numerical, field: section.to_string(), message: e.to_string() },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            Kind::Validation => EXIT_VALIDATION,
            Kind::Certification | Kind::Numerical => EXIT_CERTIFICATION,
            Kind::Io => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?} failure in `{}`: {}", self.kind, self.field, self.message)
    }
}
