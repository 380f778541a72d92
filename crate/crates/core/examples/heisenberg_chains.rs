//! Two chains in the discrete Heisenberg group: one with a finite
//! discriminant and one whose stable images grow like `p^n`.
//!
//! cargo run --release --example heisenberg_chains

use chaincalc::catalog::{instantiate, kernel_generators, resolve_params, Params};
use chaincalc::chains::{analyze, AnalysisOptions};
use chaincalc::{GroupContext, GroupElement};

fn main() -> chaincalc::Result<()> {
    let ctx = GroupContext::heisenberg();
    let x = GroupElement::heisenberg(1, 0, 0);
    let y = GroupElement::heisenberg(0, 1, 0);
    let xy = ctx.multiply(&x, &y)?;
    let yx = ctx.multiply(&y, &x)?;
    println!("xy = {xy}, yx = {yx}, [x, y] = {}", ctx.multiply(&xy, &ctx.inverse(&yx)?)?);

    for name in ["heis-wr", "heis-main6"] {
        let params = resolve_params(name, &Params::new())?;
        let depth = 3;
        let mut opts = AnalysisOptions::new(depth);
        let chain = instantiate(name, &params, opts.regularity_depth)?;
        let kernel = kernel_generators(&chain, name, &params);
        if !kernel.is_empty() {
            opts.kernel_generators = Some(kernel);
        }
        let (report, _, _) = analyze(&chain, &opts)?;
        println!("\n== {name} ==");
        for (i, h) in chain.levels().iter().take(depth).enumerate() {
            println!(
                "G_{} = {}  (row condition holds: {})",
                i + 1,
                h.describe(chain.context()),
                h.heisenberg_row_condition().unwrap_or(false)
            );
        }
        print!("{}", report.to_human());
    }
    Ok(())
}
