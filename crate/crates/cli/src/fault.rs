use std::fmt;
use std::path::PathBuf;

/// File-system failures, kept apart so they map to their own exit codes.
#[derive(Debug)]
pub enum Fault {
    MissingOutDir(PathBuf),
    Read(PathBuf, std::io::Error),
    Write(PathBuf, std::io::Error),
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fault::MissingOutDir(p) => write!(f, "output directory {} does not exist", p.display()),
            Fault::Read(p, e) => write!(f, "cannot read {}: {e}", p.display()),
            Fault::Write(p, e) => write!(f, "cannot write {}: {e}", p.display()),
        }
    }
}

impl std::error::Error for Fault {}
