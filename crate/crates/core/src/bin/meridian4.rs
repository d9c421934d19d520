fn main() {
    meridian4::cli::init_logging();
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    std::process::exit(meridian4::cli::run(std::env::args_os(), &mut out, &mut err));
}
