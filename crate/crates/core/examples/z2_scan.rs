//! Eigenvalue of the Z² Weitz branching matrix (relative ordering) as the
//! memory grows. Usage: `z2_scan [max_memory]`.
use sawcount::connconst::{z2_branching_matrix, Ordering, Pruning, DEFAULT_STATE_CAP};
use std::time::Instant;

fn main() {
    let max: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(12);
    for l in (2..=max).step_by(2) {
        let t = Instant::now();
        match z2_branching_matrix(l, Ordering::Relative, Pruning::Weitz, DEFAULT_STATE_CAP) {
            Ok(b) => {
                let s = b.spectral(1e-12).unwrap();
                println!(
                    "L={l:2} states={:9} lumped={:8} eigenvalue={:.9} ({:.2?})",
                    b.raw_states,
                    b.k,
                    s.eigenvalue,
                    t.elapsed()
                );
            }
            Err(e) => {
                println!("L={l:2} {e}");
                break;
            }
        }
    }
}
