use std::fmt::Display;
use std::process::ExitCode;

/// Exit codes: 0 success, 1 domain failure, 2 usage, 3 backend or I/O.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Domain = 1,
    Usage = 2,
    Io = 3,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        ExitCode::from(s as u8)
    }
}

/// A failure with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

pub type CmdResult = Result<Status, Failure>;

pub fn domain(m: impl Display) -> Failure {
    Failure {
        status: Status::Domain,
        message: m.to_string(),
    }
}

pub fn usage(m: impl Display) -> Failure {
    Failure {
        status: Status::Usage,
        message: m.to_string(),
    }
}

pub fn io(m: impl Display) -> Failure {
    Failure {
        status: Status::Io,
        message: m.to_string(),
    }
}

pub fn read(path: &std::path::Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(|e| io(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| io(format!("{}: {e}", path.display())))
}

pub fn write(path: &std::path::Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| io(format!("{}: {e}", path.display())))
}
