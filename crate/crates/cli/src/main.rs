use clap::Parser;
use mcpp_cli::{run_and_emit, RunConfig};

fn main() {
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // help and version are not errors
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let code = match std::panic::catch_unwind(|| run_and_emit(&config)) {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("mcpp-ode: {e}");
            e.exit_code()
        }
        Err(_) => 2,
    };
    std::process::exit(code);
}
