mod common;

use chaincalc::catalog;
use chaincalc::cosets::{Caps, CosetTable, FiniteQuotient};
use chaincalc::groups::{FiniteGroupTable, IntMatrix};
use chaincalc::{GroupContext, GroupElement, SubgroupData};
use common::*;
use proptest::prelude::*;

fn contexts() -> Vec<GroupContext> {
    vec![
        dihedral_ctx(),
        swap_ctx(),
        product_ctx(),
        GroupContext::heisenberg(),
        GroupContext::permutation_semidirect(FiniteGroupTable::symmetric(3).unwrap()).unwrap(),
    ]
}

fn ctx_and_elements(n: usize) -> impl Strategy<Value = (GroupContext, Vec<GroupElement>)> {
    (0..contexts().len()).prop_flat_map(move |k| {
        let ctx = contexts()[k].clone();
        prop::collection::vec(element_in(&ctx), n).prop_map(move |els| (ctx.clone(), els))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn group_axioms((ctx, els) in ctx_and_elements(3)) {
        let (g, h, k) = (&els[0], &els[1], &els[2]);
        let e = ctx.identity();
        prop_assert_eq!(mul(&ctx, &mul(&ctx, g, h), k), mul(&ctx, g, &mul(&ctx, h, k)));
        prop_assert_eq!(&mul(&ctx, g, &e), g);
        prop_assert_eq!(&mul(&ctx, &e, g), g);
        prop_assert!(ctx.is_identity(&mul(&ctx, g, &inv(&ctx, g))));
        prop_assert!(ctx.is_identity(&mul(&ctx, &inv(&ctx, g), g)));
        prop_assert_eq!(ctx.conjugate(g, h), mul(&ctx, &mul(&ctx, g, h), &inv(&ctx, g)));
    }

    #[test]
    fn powers_agree_with_repeated_products((ctx, els) in ctx_and_elements(1), n in -7i64..=7) {
        let g = &els[0];
        let base = if n < 0 { inv(&ctx, g) } else { g.clone() };
        let slow = (0..n.abs()).fold(ctx.identity(), |acc, _| mul(&ctx, &acc, &base));
        prop_assert_eq!(ctx.power(g, &big(n)), slow);
    }

    /// `h ∈ H` iff `g h g^-1 ∈ g H g^-1`.
    #[test]
    fn conjugate_subgroups_contain_conjugates(
        chain in dihedral_chain(3),
        g in element_in(&dihedral_ctx()),
        h in element_in(&dihedral_ctx()),
    ) {
        let ctx = chain.context();
        for sub in chain.levels() {
            let conj = sub.conjugate(ctx, &g).unwrap();
            prop_assert_eq!(conj.contains(ctx, &ctx.conjugate(&g, &h)), sub.contains(ctx, &h));
            prop_assert_eq!(conj.index(ctx), sub.index(ctx));
        }
    }

    #[test]
    fn heisenberg_conjugates(
        chain in heisenberg_chain(2),
        g in element_in(&GroupContext::heisenberg()),
        h in element_in(&GroupContext::heisenberg()),
    ) {
        let ctx = chain.context();
        for sub in chain.levels() {
            let conj = sub.conjugate(ctx, &g).unwrap();
            prop_assert_eq!(conj.contains(ctx, &ctx.conjugate(&g, &h)), sub.contains(ctx, &h));
        }
    }

    /// `MZ^2 × mZ` is accepted exactly when products of its elements stay inside.
    #[test]
    fn heisenberg_validity_matches_closure(
        rows in prop::collection::vec(prop::collection::vec(-12i64..=12, 2), 2),
        m in 1i64..=12,
    ) {
        let det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0];
        prop_assume!(det != 0);
        let ctx = GroupContext::heisenberg();
        let matrix = IntMatrix::from_rows(&rows).unwrap();
        let cols = [[rows[0][0], rows[1][0]], [rows[0][1], rows[1][1]]];
        let point = |a: i64, b: i64| [a * cols[0][0] + b * cols[1][0], a * cols[0][1] + b * cols[1][1]];
        let mut closed = true;
        for a in -2..=2 {
            for b in -2..=2 {
                for c in -2..=2 {
                    for d in -2..=2 {
                        let (u, v) = (point(a, b), point(c, d));
                        // (u, 0)(v, 0) = (u + v, u_x v_y)
                        closed &= (u[0] * v[1]) % m == 0;
                    }
                }
            }
        }
        let built = SubgroupData::heisenberg(&ctx, &matrix, m);
        prop_assert_eq!(built.is_ok(), closed);
        if let Ok(sub) = built {
            for a in -2..=2 {
                for b in -2..=2 {
                    let u = point(a, b);
                    prop_assert!(sub.contains(&ctx, &GroupElement::heisenberg(u[0], u[1], 3 * m)));
                    prop_assert!(!sub.contains(&ctx, &GroupElement::heisenberg(u[0], u[1], 3 * m + 1)) || m == 1);
                }
            }
            prop_assert_eq!(sub.index(&ctx), big(det.abs() * m));
        }
    }

    /// `π(0) = 0` iff the witness word of `π` lies in the subgroup.
    #[test]
    fn stabilizer_is_the_image_of_the_subgroup(chain in product_chain(2)) {
        let ctx = chain.context();
        for sub in chain.levels() {
            let table = CosetTable::enumerate(ctx, sub, &Caps::default()).unwrap();
            let q = FiniteQuotient::from_table(&table, &Caps::default()).unwrap();
            for e in 0..q.len() {
                let g = table.eval_word(&q.witness(e));
                prop_assert_eq!(table.theta(&g).unwrap(), q.perm(e).to_vec());
                prop_assert_eq!(q.perm(e)[0] == 0, sub.contains(ctx, &g));
                prop_assert_eq!(q.stabilizer().contains(&(e as u32)), sub.contains(ctx, &g));
            }
        }
    }
}

#[test]
fn catalog_indices_equal_table_sizes() {
    for name in catalog::names() {
        let depth = if name == "gen-dihedral" { 1 } else { 3 };
        let chain = catalog::instantiate(name, &Default::default(), depth).unwrap();
        let ctx = chain.context();
        for (i, sub) in chain.levels().iter().enumerate() {
            let table = CosetTable::enumerate(ctx, sub, &Caps::default()).unwrap();
            assert_eq!(sub.index(ctx), big(table.len() as i64), "{name} level {}", i + 1);
            if table.len() <= 200 {
                assert_eq!(BruteCosets::new(ctx, sub).len(), table.len(), "{name} level {}", i + 1);
            }
        }
    }
}

#[test]
fn coset_cap_is_a_resource_error() {
    let chain = catalog::instantiate("dihedral", &Default::default(), 4).unwrap();
    let caps = Caps { cosets: 5, perms: 1000 };
    let err = CosetTable::enumerate(chain.context(), chain.level(4), &caps).unwrap_err();
    assert!(matches!(err, chaincalc::ChainError::Resource { cap: 5, .. }), "{err:?}");
}
