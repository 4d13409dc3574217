use std::io::Write;

fn main() {
    let out = fqlct_cli::run(std::env::args_os());
    eprint!("{}", out.stderr);
    print!("{}", out.stdout);
    let _ = std::io::stdout().flush();
    std::process::exit(out.code);
}
