use num_bigint::BigInt;

use qhl_core::local::Verdict;
use qhl_core::witness::{self, Corpus, WitnessReport};
use qhl_core::Exec;

#[test]
fn pipeline_for_h_one_is_complete_and_reproducible() {
    let h = BigInt::from(1);
    let report = witness::verify_theorem(&h, 300, 0, Exec::default()).unwrap();
    assert!(report.passed);
    assert_eq!(report.spec.primes, [5, 7, 11]);
    assert_eq!(report.member_local.len(), 64);
    assert!(report
        .member_local
        .iter()
        .all(|r| r.locally_soluble_everywhere == Verdict::Soluble));
    assert!(report.flagged_members.len() as i64 >= report.required_flagged);
    assert_eq!(report.recheck().unwrap(), Vec::<String>::new());

    let text = serde_json::to_string(&report).unwrap();
    let back: WitnessReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
    assert_eq!(back.recheck().unwrap(), Vec::<String>::new());

    let again = witness::verify_theorem(&h, 300, 0, Exec::Sequential).unwrap();
    assert_eq!(serde_json::to_string(&again).unwrap(), text);
}

#[test]
fn tampered_report_fails_recheck() {
    let h = BigInt::from(-3);
    let mut report = witness::verify_theorem(&h, 50, 1, Exec::default()).unwrap();
    assert!(report.passed);
    assert!(report.form.a(0) < &BigInt::from(0));
    report.count_bound += 1;
    report.member_local[5].form = report.member_local[6].form.clone();
    let bad = report.recheck().unwrap();
    assert!(bad.iter().any(|b| b == "count bound"));
    assert!(bad.iter().any(|b| b.starts_with("local certificates")));
}

#[test]
fn corpus_is_keyed_by_h_and_seed() {
    let dir = std::env::temp_dir().join(format!("qhl-corpus-{}", std::process::id()));
    let corpus = Corpus::open(&dir).unwrap();
    let h = BigInt::from(7);
    let report = witness::verify_theorem(&h, 40, 2, Exec::default()).unwrap();
    assert_eq!(report.spec.primes, [5, 11, 13]);
    corpus.store(&report).unwrap();
    assert_eq!(corpus.keys().unwrap(), vec![(h.clone(), 2)]);
    assert_eq!(corpus.load(&h, 2).unwrap(), Some(report));
    assert_eq!(corpus.load(&h, 3).unwrap(), None);
    std::fs::remove_dir_all(dir).unwrap();
}
