fn main() {
    std::process::exit(gpr_clutter::cli::run(std::env::args_os()));
}
