fn main() {
    std::process::exit(topicfuse::cli::run(std::env::args_os()));
}
