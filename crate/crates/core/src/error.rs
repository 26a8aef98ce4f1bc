// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors produced by model assembly, propagation and optimization.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("time {t} ns outside [0, {duration}] ns")]
    OutOfRange { t: f64, duration: f64 },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("objective is not finite at the starting point")]
    InvalidStart,

    #[error("unknown case `{name}`; valid names are: {valid}")]
    NotFound { name: String, valid: String },

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
