//! Parse a chain specification, apply a parameter override and analyze it.
//!
//! cargo run --example spec_files [path] [name=value ...]

use chaincalc::catalog::Params;
use chaincalc::spec::{parse_spec, Overrides};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../specs/heis-main6.toml").to_string());
    let mut set = Params::new();
    for a in args {
        if let Some((k, v)) = a.split_once('=') {
            set.insert(k.to_string(), v.parse().expect("integer value"));
        }
    }
    let text = std::fs::read_to_string(&path).expect("readable spec");
    let doc = match parse_spec(&text) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("{path}: {e}");
            std::process::exit(1);
        }
    };
    println!("canonical form:\n{}", doc.to_toml());
    let result = doc.with_params(&set).and_then(|d| d.analyze(&Overrides::default()));
    match result {
        Ok((_, report)) => print!("{}", report.to_human()),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    }
}
