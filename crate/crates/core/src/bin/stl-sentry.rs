fn main() {
    std::process::exit(stl_sentry::cli::main_with_env());
}
