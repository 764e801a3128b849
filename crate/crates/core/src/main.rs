use clap::Parser;

fn main() {
    let code = linfty::cli::run(linfty::cli::Cli::parse());
    std::process::exit(code);
}
