//! Structured run summary. Fields are written in a fixed order so reports
//! of identical runs differ only in `wall_time`.

use std::fmt;
use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

impl Answer {
    pub fn exit_code(self) -> i32 {
        match self {
            Answer::Yes => 0,
            Answer::No => 1,
            Answer::Unknown => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Answer::Yes => "yes",
            Answer::No => "no",
            Answer::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    Realization(Vec<Vec<f64>>),
    FailingClique(Vec<usize>),
    Refutation,
    None,
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Realization(_) => "realization",
            Certificate::FailingClique(_) => "failing-clique",
            Certificate::Refutation => "refutation",
            Certificate::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub instance: String,
    pub command: String,
    pub answer: Answer,
    pub certificate: Certificate,
    pub wall_time: Duration,
    /// `key=value` pairs in insertion order.
    pub parameters: Vec<(String, String)>,
    /// Removed indices (0-based) in deletion order.
    pub removed: Vec<usize>,
    pub note: Option<String>,
}

impl RunReport {
    pub fn new(instance: impl Into<String>, command: impl Into<String>) -> Self {
        RunReport {
            instance: instance.into(),
            command: command.into(),
            answer: Answer::Unknown,
            certificate: Certificate::None,
            wall_time: Duration::ZERO,
            parameters: Vec::new(),
            removed: Vec::new(),
            note: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.push((key.to_string(), value.to_string()));
    }
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[report]")?;
        writeln!(f, "instance: {}", self.instance)?;
        writeln!(f, "command: {}", self.command)?;
        writeln!(f, "answer: {}", self.answer.as_str())?;
        writeln!(f, "certificate: {}", self.certificate.kind())?;
        match &self.certificate {
            Certificate::FailingClique(c) => {
                writeln!(f, "clique: {}", join(c.iter().map(|v| v + 1)))?
            }
            Certificate::Realization(p) => writeln!(f, "points: {}", p.len())?,
            _ => {}
        }
        writeln!(f, "wall_time: {:.3}s", self.wall_time.as_secs_f64())?;
        writeln!(
            f,
            "parameters: {}",
            join(self.parameters.iter().map(|(k, v)| format!("{k}={v}")))
        )?;
        writeln!(f, "removed: {}", join(self.removed.iter().map(|v| v + 1)))?;
        if let Some(n) = &self.note {
            writeln!(f, "note: {n}")?;
        }
        write!(f, "[end]")
    }
}
