// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

//! Amplitude-bounded, minimal-duration control pulses for gates on coupled qudits.

pub mod cases;
pub mod check;
pub mod cli;
pub mod config;
pub mod controls;
pub mod error;
pub mod model;
pub mod objective;
pub mod optimizer;
pub mod propagator;
pub mod report;
pub mod sweep;
pub mod timescale;

pub use error::{Error, Result};
