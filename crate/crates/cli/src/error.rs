use std::fmt;

use accelerograph::Error;

/// Process exit statuses, stable for scripting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Code {
    Io = 1,
    Usage = 2,
    Segmentation = 3,
    Training = 4,
    Classification = 5,
}

impl Code {
    pub fn as_u8(self) -> u8 {
        self as u8
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: Code,
    pub message: String,
}

impl CliError {
    pub fn new(code: Code, message: impl fmt::Display) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }

    pub fn usage(message: impl fmt::Display) -> Self {
        Self::new(Code::Usage, message)
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        Self::new(Code::Io, format!("{}: {e}", path.display()))
    }

    /// Prefixes the message, keeping the code.
    pub fn context(mut self, what: impl fmt::Display) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

/// Default classification of library errors into exit codes.
pub fn code_of(e: &Error) -> Code {
    match e {
        Error::Config(_) | Error::UnknownLetter(_) | Error::EmptyExperiment => Code::Usage,
        Error::NoJerksDetected
        | Error::TooShort { .. }
        | Error::DegenerateInput(_)
        | Error::SegmentationMismatch { .. } => Code::Segmentation,
        Error::Version { .. } | Error::CorruptSet(_) => Code::Training,
        Error::NoTemplatesForAxis(_)
        | Error::DegenerateSegment(_)
        | Error::TooFewPoints(_)
        | Error::DegenerateFit(_)
        | Error::Shape(..) => Code::Classification,
        Error::Format(_) | Error::Io { .. } | Error::Json(_) => Code::Io,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::new(code_of(&e), e)
    }
}
