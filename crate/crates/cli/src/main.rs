fn main() {
    let (code, output) = cubiclab_cli::run(std::env::args().skip(1));
    if code == 0 {
        print!("{output}");
    } else {
        eprint!("{output}");
    }
    std::process::exit(code);
}
