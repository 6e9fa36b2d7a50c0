fn main() {
    let code = picard_bvp::cli::main(std::env::args_os());
    std::process::exit(code);
}
