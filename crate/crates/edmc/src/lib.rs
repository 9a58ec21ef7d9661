//! Instance files, generators, the numerical oracle and the `edmc` command
//! line, built on `edmc-core`.

pub mod cli;
pub mod format;
pub mod generate;
pub mod oracle;
pub mod report;
pub mod saxe;
