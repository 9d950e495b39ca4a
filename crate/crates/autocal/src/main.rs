use clap::Parser;

use autocal::cli::{self, Cli};

fn main() {
    let args = Cli::parse();
    if let Err(e) = cli::init_threads(args.global.threads) {
        fail(&args, &e);
    }
    let quiet = args.global.out.is_some();
    match cli::run(&args) {
        Ok(report) => {
            if !quiet {
                println!("{:#}", report);
            }
        }
        Err(e) => fail(&args, &e),
    }
}

fn fail(args: &Cli, e: &autocal::Error) -> ! {
    if args.global.error_json {
        let payload = serde_json::json!({
            "error": e.to_string(),
            "kind": e.kind(),
            "exit_code": e.exit_code(),
        });
        println!("{:#}", payload);
    } else {
        eprintln!("error: {e}");
    }
    std::process::exit(e.exit_code());
}
