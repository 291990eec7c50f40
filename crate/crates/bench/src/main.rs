fn main() {
    std::process::exit(axang_bench::cli::main_with_args(std::env::args_os()));
}
