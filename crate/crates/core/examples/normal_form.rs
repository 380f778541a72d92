//! Replace each level by the preimage of its stable image. The padded
//! dihedral chain `<a^4, b> ⊃ <a^8> ⊃ <a^16> ⊃ ...` is not in normal form at
//! level 1; the transformed chain is, and it is equivalent to the original.
//!
//! cargo run --example normal_form

use chaincalc::catalog::dihedral_context;
use chaincalc::chains::{build_levels, chains_equivalent, normal_form_transform, GroupChain, Provenance, DEFAULT_WINDOW};
use chaincalc::cosets::Caps;
use chaincalc::groups::Lattice;
use chaincalc::SubgroupData;
use num_bigint::BigInt;

fn main() -> chaincalc::Result<()> {
    let ctx = dihedral_context();
    let lattice = |k: i64| Lattice::from_generators(1, &[vec![BigInt::from(k)]]);
    let zero = || vec![BigInt::from(0)];
    let mut levels = vec![SubgroupData::lattice(&ctx, lattice(4)?, vec![0, 1], vec![zero(), zero()])?];
    for k in [8, 16, 32] {
        levels.push(SubgroupData::lattice(&ctx, lattice(k)?, vec![0], vec![zero()])?);
    }
    let chain = GroupChain::new(&ctx, levels, Provenance::Explicit)?;
    let caps = Caps::default();

    let built = build_levels(&chain, chain.depth(), &caps)?;
    let stable = built.stable_images(chain.depth(), DEFAULT_WINDOW);
    println!("normal form per level: {:?}", built.normal_form_flags(&stable));
    println!("verdict: {}", built.discriminant_verdict(&stable));

    let nf = normal_form_transform(&built, &stable)?;
    for (i, h) in nf.levels().iter().enumerate() {
        println!("G'_{} = {}", i + 1, h.describe(&ctx));
    }
    println!("equivalent to the original: {}", chains_equivalent(&chain, &nf, nf.depth())?.is_equivalent());

    let again = build_levels(&nf, nf.depth(), &caps)?;
    let s = again.stable_images(nf.depth(), DEFAULT_WINDOW);
    println!("after the transform: {:?}, verdict {}", again.normal_form_flags(&s), again.discriminant_verdict(&s));
    Ok(())
}
