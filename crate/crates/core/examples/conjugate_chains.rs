//! Move the basepoint: conjugating the dihedral chain by `a` gives a chain
//! with kernel `<a^2 b>` that is not equivalent to the original, while
//! conjugating by an element of the kernel changes nothing.
//!
//! cargo run --example conjugate_chains

use chaincalc::catalog::{instantiate, Params};
use chaincalc::chains::{chains_equivalent, kernel_probe};
use chaincalc::GroupElement;

fn main() -> chaincalc::Result<()> {
    let depth = 6;
    let chain = instantiate("dihedral", &Params::new(), depth)?;
    let ctx = chain.context();
    let a = GroupElement::lattice(&[1], 0);
    let b = GroupElement::lattice(&[0], 1);

    for (label, g) in [("a", &a), ("b", &b)] {
        let conj = chain.conjugate(&vec![g.clone(); depth])?;
        let kernel = ctx.conjugate(g, &b);
        println!("conjugate by {label}:");
        println!("  kernel generator {kernel}: {:?}", kernel_probe(&conj, &kernel, depth)?);
        println!("  b in every level: {:?}", kernel_probe(&conj, &b, depth)?);
        println!("  equivalence: {:?}", chains_equivalent(&chain, &conj, depth)?);
    }
    Ok(())
}
