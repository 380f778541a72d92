//! Run every built-in example against its expected invariants.
//!
//! cargo run --release --example catalog_regression [name ...]

use chaincalc::catalog::{self, Params};
use chaincalc::cosets::Caps;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let names: Vec<&str> = if args.is_empty() {
        catalog::names()
    } else {
        args.iter().map(String::as_str).collect()
    };
    let mut failed = false;
    for name in names {
        let start = std::time::Instant::now();
        match catalog::run_regression(name, &Params::new(), None, &Caps::from_env()) {
            Ok(r) => {
                print!("{}", r.to_human());
                failed |= !r.passed();
            }
            Err(e) => {
                println!("{name}: {e}");
                failed = true;
            }
        }
        println!("({:.2?})\n", start.elapsed());
    }
    std::process::exit(i32::from(failed));
}
