fn main() {
    std::process::exit(hyperhelfrich::cli::dispatch(std::env::args_os()));
}
