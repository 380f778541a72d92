//! The infinite dihedral group `Z ⋊ Z2` with `G_i = <a^(2^i), b>`: per-level
//! discriminants `D_i = G_i / C_i`, their stable images and the verdict.
//!
//! cargo run --example dihedral_discriminant [depth]

use chaincalc::catalog::{instantiate, Params};
use chaincalc::chains::{build_levels, DEFAULT_WINDOW};
use chaincalc::cosets::Caps;

fn main() -> chaincalc::Result<()> {
    let depth: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(6);
    let chain = instantiate("dihedral", &Params::new(), depth)?;
    let ctx = chain.context();
    let levels = build_levels(&chain, depth, &Caps::default())?;
    let stable = levels.stable_images(depth, DEFAULT_WINDOW);

    println!("level  |G:G_i|  |G/C_i|  |D_i|  |S_i|");
    for lvl in levels.iter() {
        let i = lvl.level;
        println!(
            "{i:>5}  {:>7}  {:>7}  {:>5}  {:>5}",
            chain.level(i).index(ctx),
            lvl.quotient.len(),
            lvl.discriminant().len(),
            stable.size(i)
        );
    }
    // b fixes the basepoint and acts nontrivially from level 2 on
    let b = chaincalc::GroupElement::lattice(&[0], 1);
    for lvl in levels.iter().skip(1) {
        let image = lvl.element_of(&b).expect("b is in the group");
        println!("level {}: b acts as {}", lvl.level, lvl.quotient.perm(image).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
    }
    println!("verdict: {}", levels.discriminant_verdict(&stable));
    Ok(())
}
