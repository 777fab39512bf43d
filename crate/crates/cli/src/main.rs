fn main() { std::process::exit(qhl_cli::run(std::env::args().collect())); }
