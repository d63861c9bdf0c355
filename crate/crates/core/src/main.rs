fn main() {
    let code = rulegame::cli::run(std::env::args_os());
    std::process::exit(code);
}
