// Copyright 2026 qnmq Contributors
// SPDX-License-Identifier: Apache-2.0

fn main() {
    eprintln!("qnmq: command-line interface not wired up yet");
    std::process::exit(2);
}
