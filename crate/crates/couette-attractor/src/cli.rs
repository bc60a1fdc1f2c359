//! Command-line entry point (wired up at the bottom of the build).

pub fn run() -> i32 {
    eprintln!("couette: commands not wired yet");
    2
}
