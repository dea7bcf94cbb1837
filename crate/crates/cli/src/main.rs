use std::io;

fn main() {
    if let Ok(threads) = std::env::var("CHOIFORGE_THREADS") {
        match threads.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                let msg = format!("CHOIFORGE_THREADS must be a positive integer, got {threads:?}");
                eprintln!(
                    "{}",
                    serde_json::json!({"error": "config", "exit_code": 5, "message": msg})
                );
                std::process::exit(choiforge_cli::EXIT_CONFIG);
            }
        }
    }
    let code = choiforge_cli::run(
        std::env::args_os(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
