pub mod demo;
pub mod inspect;
pub mod keys;
pub mod simcmd;

/// Command error carrying the process exit code; the demo uses distinct
/// codes per failed step.
#[derive(Debug)]
pub struct CmdError {
    pub error: anyhow::Error,
    pub code: i32,
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        self.code
    }
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

impl<E: Into<anyhow::Error>> From<E> for CmdError {
    fn from(error: E) -> Self {
        CmdError { error: error.into(), code: 1 }
    }
}

pub type CmdResult = Result<(), CmdError>;

pub fn fail_at(step: &str, code: i32, error: anyhow::Error) -> CmdError {
    CmdError { error: error.context(format!("failed at step {step}")), code }
}
