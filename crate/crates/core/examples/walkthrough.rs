//! Prints the scripted backoff walkthrough trace.

use bansim_core::csma::trace::render;
use bansim_core::sim::replay::backoff_walkthrough_trace;

fn main() {
    let trace = backoff_walkthrough_trace().expect("scenario runs");
    print!("{}", render(&trace));
}
