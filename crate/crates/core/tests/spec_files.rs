use std::path::PathBuf;

use chaincalc::catalog::{self, Params};
use chaincalc::chains::GroupChain;
use chaincalc::spec::{parse_spec, ChainSpecDocument, Overrides};

fn specs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn load(name: &str) -> ChainSpecDocument {
    let text = std::fs::read_to_string(specs_dir().join(format!("{name}.toml"))).unwrap();
    parse_spec(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn all_spec_names() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(specs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .map(|p| p.file_stem().unwrap().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

fn same_levels(a: &GroupChain, b: &GroupChain) -> bool {
    let ctx = a.context();
    a.depth() == b.depth()
        && a.levels()
            .iter()
            .zip(b.levels())
            .all(|(x, y)| x.is_subgroup_of(ctx, y) && y.is_subgroup_of(ctx, x))
}

#[test]
fn every_spec_parses_and_round_trips() {
    let names = all_spec_names();
    assert!(names.len() >= 7, "{names:?}");
    for name in names {
        let doc = load(&name);
        let canonical = doc.to_toml();
        let again = parse_spec(&canonical).unwrap_or_else(|e| panic!("{name} canonical form: {e}\n{canonical}"));
        assert_eq!(again.to_toml(), canonical, "{name}");
        let depth = doc.max_depth().unwrap_or(3).min(3).min(doc.depth());
        assert!(same_levels(&doc.build_chain(depth).unwrap(), &again.build_chain(depth).unwrap()), "{name}");
    }
}

#[test]
fn specs_match_catalog_entries() {
    for name in catalog::names() {
        let doc = load(name);
        let depth = if name == "gen-dihedral" { 1 } else { 3 };
        let from_spec = doc.build_chain(depth).unwrap();
        let from_catalog = catalog::instantiate(name, &Params::new(), depth).unwrap();
        assert_eq!(from_spec.context(), from_catalog.context(), "{name}");
        assert!(same_levels(&from_spec, &from_catalog), "{name}");
    }
}

#[test]
fn parameter_overrides_follow_the_catalog() {
    let doc = load("heis-wr");
    let params = Params::from([("p".to_string(), 3), ("q".to_string(), 5)]);
    let from_spec = doc.with_params(&params).unwrap().build_chain(2).unwrap();
    let from_catalog = catalog::instantiate("heis-wr", &params, 2).unwrap();
    assert!(same_levels(&from_spec, &from_catalog));
    assert!(doc.with_params(&Params::from([("nope".to_string(), 3)])).is_err());
    let equal = Params::from([("p".to_string(), 3), ("q".to_string(), 3)]);
    assert!(doc.with_params(&equal).is_err());
}

#[test]
fn analysis_is_deterministic() {
    for name in ["dihedral", "heis-wr", "dihedral-explicit"] {
        let doc = load(name);
        let (_, first) = doc.analyze(&Overrides::default()).unwrap();
        let (_, second) = load(name).analyze(&Overrides::default()).unwrap();
        assert_eq!(first.to_json(), second.to_json(), "{name}");
        assert_eq!(first.to_human(), second.to_human(), "{name}");
    }
}

#[test]
fn explicit_chain_deeper_than_declared_is_rejected() {
    let doc = load("dihedral-explicit");
    let o = Overrides {
        depth: Some(5),
        ..Default::default()
    };
    assert!(doc.analyze(&o).is_err());
}
