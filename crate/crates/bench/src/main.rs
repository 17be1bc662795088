fn main() {
    std::process::exit(ist_bench::cli::main_with_args(std::env::args_os()));
}
