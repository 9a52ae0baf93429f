use clap::Parser;
use specshape::app::{configure_threads, run, Cli};
use specshape::{EXIT_CONFIG, EXIT_OK};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = configure_threads().and_then(|()| run(cli)) {
        eprintln!("specshape: {e}");
        std::process::exit(e.exit_code());
    }
}
