fn main() {
    std::process::exit(convqa::cli::dispatch(std::env::args_os()));
}
