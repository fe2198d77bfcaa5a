mod common;

use sha2::{Digest, Sha256};

#[test]
fn fixtures_match_checksums() {
    let sums = common::read("SHA256SUMS");
    let mut n = 0;
    for line in sums.lines() {
        let (hash, name) = line.split_once("  ").unwrap();
        let bytes = std::fs::read(common::fixture(name)).unwrap();
        let got: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(got, hash, "{name}");
        n += 1;
    }
    assert_eq!(n, std::fs::read_dir(common::fixture("")).unwrap().count() - 1);
}

#[test]
fn fixture_shapes() {
    assert_eq!(common::sum("m4_relation.txt").len(), 33);
    assert_eq!(common::sum("m5ct_conjecture.txt").len(), 19);
    assert_eq!(common::sum("m21_relation.txt").len(), 3);
    let classes = common::named_graphs("ct31_classes.txt");
    assert_eq!(classes.len(), 10);
    assert!(classes.iter().all(|(_, g)| g.space() == (3, 1) && g.codim() == 2));
    let t = common::table("ct31_table.csv");
    assert_eq!((t.rows.len(), t.cols.len()), (7, 10));
    assert!(t.entries.iter().all(|r| r.len() == 10));
    for (_, rel) in common::named_relations("ct31_relations.txt", &classes) {
        assert_eq!(rel.homogeneous_codim(), Some(2));
    }
}
