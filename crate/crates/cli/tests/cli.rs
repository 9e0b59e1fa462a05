use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pfl_core::contact::{generate_kumpera_ruiz, kr_family, remix, ClassificationStatus, LetterKind, ProlongationWord};
use pfl_core::exterior::{Distribution, JetSpec};
use pfl_core::format::Document;
use pfl_core::sample::random_admissible_remix;

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn pfl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfl")).args(args).env_remove("PFL_THREADS").output().unwrap()
}

fn pfl_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfl")).args(args).env("PFL_THREADS", threads).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(name: &str) -> String {
    std::fs::read_to_string(golden(name)).unwrap()
}

fn write_distribution(dir: &Path, name: &str, d: Distribution) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, Document::Distribution { distribution: d, word: None }.to_json().unwrap()).unwrap();
    p
}

fn parse_word(o: &Output) -> ProlongationWord {
    match Document::from_json(&stdout(o)).unwrap() {
        Document::Word { word, .. } => word,
        other => panic!("expected a word, got {:?}", other.kind()),
    }
}

#[test]
fn generate_matches_golden() {
    let cases: [(&[&str], &str); 4] = [
        (&["generate", "--spec", "2,2"], "canonical_2_2.json"),
        (&["generate", "--word", "S(0,0)"], "s00.json"),
        (&["generate", "--word", "R(0),S(0)"], "r0_s0.json"),
        (&["generate", "--spec", "1,1"], "darboux.json"),
    ];
    for (args, file) in cases {
        let o = pfl(args);
        assert_eq!(code(&o), 0, "{file}: {}", stderr(&o));
        assert_eq!(stdout(&o), read(file), "{file}");
    }
}

#[test]
fn generate_is_byte_identical_across_runs() {
    let a = pfl(&["generate", "--word", "R(1,2),S(3,0)"]);
    let b = pfl(&["generate", "--word", "R(1,2),S(3,0)"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn generated_document_round_trips() {
    let o = pfl(&["generate", "--word", "R(1,2),S(3,0)"]);
    let w = ProlongationWord::parse("R(1,2),S(3,0)", 2).unwrap();
    match Document::from_json(&stdout(&o)).unwrap() {
        Document::Distribution { distribution, word } => {
            assert_eq!(distribution.generators(), generate_kumpera_ruiz(&w).unwrap().generators());
            assert_eq!(word, Some(w));
        }
        other => panic!("unexpected {:?}", other.kind()),
    }
}

#[test]
fn generate_rejects_bad_input() {
    for args in [
        &["generate", "--word", "S(0,1)"][..],
        &["generate", "--spec", "2"],
        &["generate", "--spec", "1,2", "--word", "S(0,0)"],
        &["generate"],
    ] {
        let o = pfl(args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(o.stdout.is_empty());
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn corpus_reclassifies_to_recorded_verdicts() {
    for (name, expect) in [("canonical_2_2", 0), ("s00", 10), ("r0_s0", 10), ("darboux", 0), ("flat_rejected", 20)] {
        let o = pfl(&["classify", path(&golden(&format!("{name}.json")))]);
        assert_eq!(code(&o), expect, "{name}: {}", stderr(&o));
        assert_eq!(stdout(&o), read(&format!("verdict_{name}.json")), "{name}");
        assert!(o.stderr.is_empty());
    }
}

#[test]
fn unfactorable_dimension_exits_with_input_error() {
    let o = pfl(&["classify", path(&golden("rank3_dim6.json"))]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
    assert!(stderr(&o).contains("dimension 6"), "{}", stderr(&o));
}

#[test]
fn missing_and_malformed_files_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{\"format_version\": \"7\"}").unwrap();
    for p in [dir.path().join("absent.json"), junk] {
        let o = pfl(&["classify", path(&p)]);
        assert_eq!(code(&o), 2);
        assert!(o.stdout.is_empty());
    }
    let o = pfl(&["classify", path(&golden("s00.json")), "--at", "1,2"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn classify_writes_file_and_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    let o = pfl(&["classify", path(&golden("s00.json")), "--out", path(&out)]);
    assert_eq!(code(&o), 10);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), stdout(&o));
}

#[test]
fn witnesses_and_stats_are_opt_in() {
    let plain = stdout(&pfl(&["classify", path(&golden("s00.json"))]));
    assert!(!plain.contains("generators") && !plain.contains("elapsed_ms"));
    let full = pfl(&["classify", path(&golden("s00.json")), "--witnesses", "--stats"]);
    assert_eq!(code(&full), 10);
    let text = stdout(&full);
    assert!(text.contains("\"generators\"") && text.contains("elapsed_ms"));
    match Document::from_json(&text).unwrap() {
        Document::Verdict { report, .. } => {
            assert_eq!(report.verdict.status, ClassificationStatus::ExtendedKr);
            assert!(report.witnesses.iter().all(|w| w.generators.is_some()));
        }
        other => panic!("unexpected {:?}", other.kind()),
    }
}

#[test]
fn output_is_independent_of_thread_count() {
    let input = golden("s00.json");
    let args = ["classify", path(&input), "--witnesses"];
    let reference = pfl(&args);
    for t in ["1", "2", "8"] {
        let o = pfl_threads(&args, t);
        assert_eq!(o.stdout, reference.stdout, "PFL_THREADS={t}");
        assert_eq!(code(&o), code(&reference));
    }
}

#[test]
fn invalid_thread_count_is_rejected() {
    for t in ["0", "-3", "many"] {
        let o = pfl_threads(&["classify", path(&golden("s00.json"))], t);
        assert_eq!(code(&o), 2, "{t}");
        assert!(o.stdout.is_empty());
        assert!(stderr(&o).contains("PFL_THREADS"));
    }
}

#[test]
fn pfaffian_and_bryant_modes() {
    let o = pfl(&["classify", path(&golden("darboux.json")), "--mode", "pfaffian"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = pfl(&["classify", path(&golden("canonical_2_2.json")), "--mode", "bryant"]);
    assert_eq!(code(&o), 0);
    let o = pfl(&["bryant", path(&golden("s00.json")), "--witnesses"]);
    assert_eq!(code(&o), 0);
    match Document::from_json(&stdout(&o)).unwrap() {
        Document::CorankOne { report, .. } => {
            assert!(report.summary.exists);
            assert!(report.witnesses.iter().any(|w| w.role == "l" && w.generators.is_some()));
        }
        other => panic!("unexpected {:?}", other.kind()),
    }
}

#[test]
fn flags_report_ranks() {
    let o = pfl(&["flags", path(&golden("s00.json"))]);
    assert_eq!(code(&o), 0);
    match Document::from_json(&stdout(&o)).unwrap() {
        Document::FlagReport { reports, .. } => {
            assert_eq!(reports.len(), 2);
            assert_eq!(reports[0].ranks_at_base(), vec![3, 5, 7]);
            assert_eq!(&reports[1].ranks_at_base()[..3], &[3, 5, 6]);
        }
        other => panic!("unexpected {:?}", other.kind()),
    }
}

#[test]
fn pushforward_by_identity_keeps_generators() {
    let o = pfl(&["pushforward", path(&golden("darboux.json")), "--diffeo", path(&golden("identity_3.json"))]);
    assert_eq!(code(&o), 0);
    let (Document::Distribution { distribution: a, .. }, Document::Distribution { distribution: b, .. }) =
        (Document::from_json(&stdout(&o)).unwrap(), Document::from_json(&read("darboux.json")).unwrap())
    else {
        panic!("expected distributions");
    };
    assert_eq!(a.generators(), b.generators());
}

#[test]
fn volume_preserving_change_keeps_darboux_canonical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pushed.json");
    let o = pfl(&[
        "pushforward",
        path(&golden("darboux.json")),
        "--diffeo",
        path(&golden("shear_3.json")),
        "--out",
        path(&out),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let o = pfl(&["classify", path(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn broken_pair_names_the_component() {
    let o = pfl(&["pushforward", path(&golden("darboux.json")), "--diffeo", path(&golden("broken_3.json"))]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
    assert!(stderr(&o).contains("component 2"), "{}", stderr(&o));
}

#[test]
fn reduce_recovers_remixed_words() {
    let dir = tempfile::tempdir().unwrap();
    let w = ProlongationWord::parse("R(1,2),S(3,0)", 2).unwrap();
    let fam = kr_family(&w).unwrap();
    for seed in 0..3 {
        let lambda = random_admissible_remix(&mut ChaCha8Rng::seed_from_u64(seed), 2, 4);
        let mixed = remix(&fam.ordered(), &lambda).unwrap();
        let d = Distribution::new(fam.chart().clone(), mixed).unwrap();
        let p = write_distribution(dir.path(), &format!("mixed{seed}.json"), d);
        let o = pfl(&["reduce", path(&p)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        assert_eq!(parse_word(&o), w);
        let Document::Word { trace: Some(trace), .. } = Document::from_json(&stdout(&o)).unwrap() else { panic!() };
        assert_eq!(trace.len(), 4);
        let letters: Vec<_> = trace.iter().filter_map(|t| t.letter.clone()).collect();
        assert_eq!(letters, w.letters);
        assert_eq!(trace[3].branch.as_deref(), Some("singular"));
        assert_eq!(w.letters[1].kind, LetterKind::S);
    }
}

#[test]
fn reduce_canonical_gives_regular_zero_word() {
    let o = pfl(&["reduce", path(&golden("canonical_2_2.json"))]);
    assert_eq!(code(&o), 0);
    assert_eq!(parse_word(&o), ProlongationWord::canonical(JetSpec::new(2, 2).unwrap()));
}

#[test]
fn reduce_names_the_malformed_generators() {
    let o = pfl(&["reduce", path(&golden("not_weber.json"))]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
    let err = stderr(&o);
    assert!(err.contains("level 2") && err.contains("generators 0 and 1"), "{err}");
}
