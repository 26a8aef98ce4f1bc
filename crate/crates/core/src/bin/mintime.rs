// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

fn main() {
    std::process::exit(qudit_mintime::cli::run(std::env::args_os()));
}
