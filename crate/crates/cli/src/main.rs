fn main() {
    std::process::exit(stlscond::run(std::env::args_os()));
}
