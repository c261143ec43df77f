fn main() {
    std::process::exit(vkf::cli_io::run(std::env::args_os()));
}
