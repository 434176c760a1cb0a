use std::process::ExitCode;

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes (`towns table | head`);
    // the default Rust behavior would panic mid-print instead.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    towns::cli::run()
}
