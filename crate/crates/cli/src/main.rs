use std::io::Write;
use std::process;

fn main() {
    let inv = fkglab_cli::run(std::env::args_os());
    print!("{}", inv.stdout);
    eprint!("{}", inv.stderr);
    let _ = std::io::stdout().flush();
    process::exit(inv.exit_code);
}
