fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(indoor_mmwave::cli::run(&args));
}
