use clap::Parser;

use fakeboost::cli::{error_line, run, thread_count_from_env, Cli};

fn main() {
    let cli = Cli::parse();
    let result = thread_count_from_env().and_then(|threads| {
        if let Some(n) = threads {
            // only fails if a pool already exists, which cannot happen here
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        run(cli)
    });
    if let Err(e) = result {
        eprintln!("{}", error_line(&e));
        std::process::exit(1);
    }
}
