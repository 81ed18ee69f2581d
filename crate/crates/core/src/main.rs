fn main() {
    std::process::exit(ta_urgency::cli::run(std::env::args_os()));
}
