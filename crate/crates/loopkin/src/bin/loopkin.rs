fn main() {
    let code = loopkin::cli::main_with(std::env::args(), &mut std::io::stdout().lock(), &mut std::io::stderr());
    std::process::exit(code);
}
