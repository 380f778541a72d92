//! Left coset tables, the permutation action on them, normal cores and the
//! finite quotient `G / C_i` for the product example `A5 × Z`, `G_1 = A4 × 3Z`.
//!
//! cargo run --example coset_tables

use chaincalc::catalog::{instantiate, Params};
use chaincalc::cosets::{core_membership, Caps, CosetTable, FiniteQuotient};
use chaincalc::GroupElement;

fn main() -> chaincalc::Result<()> {
    let chain = instantiate("product", &Params::new(), 1)?;
    let ctx = chain.context();
    let caps = Caps::default();
    let table = CosetTable::enumerate(ctx, chain.level(1), &caps)?;
    println!("|G : G_1| = {}", table.len());
    for c in 0..table.len().min(6) {
        println!("  coset {c}: {}", ctx.render_word(&table.rep_word(c)));
    }
    for (name, g) in ctx.generator_names().iter().zip(ctx.generators()) {
        let act: Vec<String> = (0..table.len()).map(|c| table.act(g, c).unwrap().to_string()).collect();
        println!("{name} permutes cosets as [{}]", act.join(" "));
    }
    let schreier = table.schreier_generators();
    println!("{} Schreier generators of G_1", schreier.len());

    let quotient = FiniteQuotient::from_table(&table, &caps)?;
    println!("|G / C_1| = {}, |D_1| = {}", quotient.len(), quotient.stabilizer().len());
    let t3 = GroupElement::lattice(&[3], 0);
    let t1 = GroupElement::lattice(&[1], 0);
    println!("(3; e) in C_1: {}, (1; e) in C_1: {}", core_membership(&table, &t3), core_membership(&table, &t1));
    Ok(())
}
