mod common;

use common::{arb_case, kill_set};
use mbfl_core::io::{self, MatrixFormat};
use mbfl_core::{Error, KillMatrix};
use proptest::prelude::*;

fn roundtrip(m: &KillMatrix, format: MatrixFormat) -> KillMatrix {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(match format {
        MatrixFormat::Csv => "m.csv",
        MatrixFormat::Json => "m.json",
    });
    io::save_matrix(m, &path, format).unwrap();
    io::load_matrix(&path, MatrixFormat::from_path(&path)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn kill_sets_are_subsets_of_tests((m, _) in arb_case(8, 30, 5)) {
        for (i, rec) in m.mutants().iter().enumerate() {
            let ks = m.kill_set(&rec.id).unwrap();
            prop_assert!(ks.iter().all(|t| m.test_index(t.as_str()).is_some()));
            let names: std::collections::BTreeSet<String> = ks.iter().map(|t| t.as_str().to_owned()).collect();
            prop_assert_eq!(names, kill_set(&m, i));
        }
    }

    #[test]
    fn fail_given_mutated_is_the_kill_fraction((m, _) in arb_case(8, 30, 5)) {
        for e in m.methods() {
            let ids: Vec<usize> = (0..m.num_mutants()).filter(|&i| m.mutants()[i].method == e).collect();
            for (j, t) in m.tests().iter().enumerate() {
                let killed = ids.iter().filter(|&&i| m.row(i)[j]).count();
                let p = m.fail_given_mutated(e.as_str(), t.as_str()).unwrap();
                prop_assert_eq!(p, killed as f64 / ids.len() as f64);
                prop_assert!((0.0..=1.0).contains(&p));
            }
        }
    }

    #[test]
    fn save_then_load_is_identity((m, _) in arb_case(8, 30, 5)) {
        prop_assert_eq!(&roundtrip(&m, MatrixFormat::Csv), &m);
        prop_assert_eq!(&roundtrip(&m, MatrixFormat::Json), &m);
        let bytes = io::to_csv_bytes(&m).unwrap();
        prop_assert_eq!(io::read_csv(bytes.as_slice()).unwrap(), m.clone());
        prop_assert_eq!(io::from_json_str(&io::to_json_string(&m).unwrap()).unwrap(), m);
    }

    #[test]
    fn restrict_composes((m, _) in arb_case(8, 30, 5), picks in proptest::collection::vec(any::<bool>(), 8), more in proptest::collection::vec(any::<bool>(), 8)) {
        let names: Vec<&str> = m.tests().iter().map(|t| t.as_str()).collect();
        let outer: Vec<&str> = names.iter().zip(&picks).filter(|(_, &p)| p).map(|(n, _)| *n).collect();
        let inner: Vec<&str> = outer.iter().zip(&more).filter(|(_, &p)| p).map(|(n, _)| *n).collect();
        prop_assume!(!inner.is_empty());
        let twice = m.restrict(&outer).unwrap().restrict(&inner).unwrap();
        prop_assert_eq!(twice, m.restrict(&inner).unwrap());
    }

    #[test]
    fn restricted_cells_match_source((m, _) in arb_case(8, 30, 5)) {
        let mut names: Vec<&str> = m.tests().iter().map(|t| t.as_str()).collect();
        names.reverse();
        let r = m.restrict(&names).unwrap();
        for i in 0..m.num_mutants() {
            for (j, t) in r.tests().iter().enumerate() {
                prop_assert_eq!(r.row(i)[j], m.row(i)[m.test_index(t.as_str()).unwrap()]);
            }
        }
    }
}

#[test]
fn malformed_csv_reports_line() {
    let text = "mutant_id,method,operator,description,t:a,t:b\nm1,f,AOR,x,0,1\nm2,f,AOR,y,0,2\n";
    match io::read_csv(text.as_bytes()).unwrap_err() {
        Error::Format { line, .. } => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
}

#[test]
fn duplicate_test_column_is_rejected() {
    let text = "mutant_id,method,operator,description,t:a,t:a\nm1,f,AOR,x,0,1\n";
    assert!(io::read_csv(text.as_bytes()).is_err());
}

#[test]
fn restrict_to_unknown_test_fails() {
    let m = mbfl_core::fixtures::example_matrix();
    assert!(matches!(m.restrict(&["t9"]), Err(Error::NotFound(_))));
}
