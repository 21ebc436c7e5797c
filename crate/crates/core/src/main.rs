fn main() {
    let mut out = std::io::stdout().lock();
    let code = eds_core::cli::run(std::env::args_os(), &mut out);
    drop(out);
    std::process::exit(code);
}
