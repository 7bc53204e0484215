use std::io::Write;

fn main() {
    let cap = std::env::var(qavail_cli::JOINT_CAP_ENV).ok();
    let out = qavail_cli::run(std::env::args_os(), cap.as_deref());
    std::io::stdout().write_all(out.stdout.as_bytes()).ok();
    std::io::stderr().write_all(out.stderr.as_bytes()).ok();
    std::process::exit(out.code);
}
