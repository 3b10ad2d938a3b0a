use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = tia_cli::Cli::parse();
    match tia_cli::run(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
        }
        Err(e) => {
            eprintln!("tia: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
