use clap::Parser;
use oscres_cli::{execute, job_from_cli, Cli, CliError};

fn fail(err: &CliError) -> ! {
    eprintln!("{}", err.to_json());
    std::process::exit(err.exit_code());
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            std::process::exit(0);
        }
        Err(e) => fail(&CliError::usage(e.render().to_string().trim_end())),
    };
    let job = job_from_cli(cli).unwrap_or_else(|e| fail(&e));
    if let Err(e) = execute(&job) {
        fail(&e);
    }
}
