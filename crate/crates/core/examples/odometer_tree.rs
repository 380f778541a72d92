//! The coset tree of a chain as a coordinate system: points, the action of
//! group elements on them, and a line-format export.
//!
//! cargo run --example odometer_tree [depth]

use chaincalc::catalog::{instantiate, sample_elements, Params};
use chaincalc::cosets::Caps;
use chaincalc::odometer::{CosetTree, TreeDocument, TreePoint};
use chaincalc::GroupElement;

fn main() -> chaincalc::Result<()> {
    let depth: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let chain = instantiate("dihedral", &Params::new(), depth)?;
    let tree = CosetTree::from_chain(&chain, depth, &Caps::default())?;
    let a = GroupElement::lattice(&[1], 0);

    let mut p = TreePoint::basepoint(depth);
    for k in 0..4 {
        println!("a^{k} . x = {:?}", p.path);
        p = tree.act(&a, &p)?;
    }
    let x = TreePoint::basepoint(depth);
    let samples = sample_elements(chain.context(), 12);
    println!("stabilizer of x among samples: {:?}", tree.point_stabilizer_probe(&x, &samples)?);
    println!("level-{depth} coding: {:?}", tree.orbit_coding(&x, &samples[..6], depth)?.codes);

    let doc = tree.export_tree(depth);
    let text = doc.to_text();
    print!("{text}");
    assert_eq!(TreeDocument::parse_text(&text)?, doc);
    Ok(())
}
