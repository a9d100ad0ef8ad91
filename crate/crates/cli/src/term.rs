// SPDX-License-Identifier: Apache-2.0

//! Diagnostics on stderr. ANSI colour only on a terminal and only when
//! `CAVENT_NO_COLOR` is unset.

use std::io::IsTerminal;

fn colour_enabled() -> bool {
    std::env::var_os("CAVENT_NO_COLOR").is_none() && std::io::stderr().is_terminal()
}

fn paint(code: &str, text: &str) -> String {
    if colour_enabled() {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

pub fn info(msg: &str) {
    eprintln!("{msg}");
}

pub fn warn(msg: &str) {
    eprintln!("{}: {msg}", paint("33", "warning"));
}

pub fn error(kind: &str, msg: &str) {
    eprintln!("{}: {msg}", paint("31;1", kind));
}

pub fn status(passed: bool, msg: &str) {
    let tag = if passed { paint("32", "PASS") } else { paint("31;1", "FAIL") };
    eprintln!("{tag} {msg}");
}
