use std::io::Write;

fn main() {
    if let Some(threads) = std::env::var("NCG_THREADS").ok().and_then(|t| t.parse::<usize>().ok()) {
        // ignore failure: the pool may already be initialised
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    let code = ncg::cli::run(std::env::args_os(), &mut out, &mut err);
    let _ = out.flush();
    std::process::exit(code);
}
