// SPDX-License-Identifier: Apache-2.0

use std::io::Write;

fn main() {
    let result = rfs_core::cli::execute(std::env::args_os().skip(1));
    print!("{}", result.stdout);
    eprint!("{}", result.stderr);
    let _ = std::io::stdout().flush();
    std::process::exit(result.exit_code);
}
