use std::io::{self, Write};

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = f3n::run(&argv, &mut out, &mut io::stderr());
    let _ = out.flush();
    drop(out);
    std::process::exit(code);
}
