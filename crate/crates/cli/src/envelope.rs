use hypercube_spectra::BooleanFunction;
use serde::Serialize;
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Violation,
    Error,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Violation => 2,
            Status::Error => 1,
        }
    }

    pub fn from_ok(ok: bool) -> Status {
        if ok {
            Status::Ok
        } else {
            Status::Violation
        }
    }
}

/// Identifies the function a report is about.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fingerprint {
    pub n: usize,
    /// SHA-256 of the lowercase hex table.
    pub table_sha256: Option<String>,
}

impl Fingerprint {
    pub fn of(f: &BooleanFunction) -> Fingerprint {
        let digest = Sha256::digest(f.to_hex().as_bytes());
        Fingerprint { n: f.n(), table_sha256: Some(digest.iter().map(|b| format!("{b:02x}")).collect()) }
    }

    pub fn dimension(n: usize) -> Fingerprint {
        Fingerprint { n, table_sha256: None }
    }
}

#[derive(Debug, Serialize)]
pub struct ReportEnvelope<'a> {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: &'a [String],
    pub input: Option<&'a Fingerprint>,
    pub status: Status,
    pub payload: &'a RawValue,
}
