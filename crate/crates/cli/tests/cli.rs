use serde_json::Value;
use std::io::Write;
use tplab_cli::run;

fn tplab(args: &str) -> tplab_cli::RunOutput {
    run(std::iter::once("tplab").chain(args.split_whitespace()))
}

fn json(args: &str) -> (Value, i32) {
    let out = tplab(args);
    let v = serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{args}: {e}\n{}{}", out.stdout, out.stderr));
    (v, out.code)
}

#[test]
fn reports_carry_config_subject_results_and_verdict() {
    let (v, code) = json("--digits 20 --seed 3 tp --subject gaussian --max-order 3 --trials 10");
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "holds");
    assert_eq!(v["config"]["command"], "tp");
    assert_eq!(v["config"]["seed"], 3);
    assert_eq!(v["config"]["digits"], 20);
    assert_eq!(v["config"]["hash"].as_str().unwrap().len(), 64);
    assert!(v["subject"].as_str().unwrap().starts_with("gaussian"));
    assert!(v["results"].is_object());
}

#[test]
fn exit_codes() {
    assert_eq!(tplab("--digits 20 catalog").code, 0);
    assert_eq!(tplab("--digits 20 --seed 7 tp --subject indicator --max-order 3 --trials 200 --strategy edges").code, 1);
    assert_eq!(tplab("--digits 20 tp --subject nonexistent").code, 3);
    assert_eq!(tplab("--digits 20 --output csv vd --subject gaussian --trials 5").code, 3);
    assert_eq!(tplab("--digits 20 laplace --subject logistic --s 2").code, 3);
    assert_eq!(tplab("--digits 2 catalog").code, 3);
    assert_eq!(tplab("tp").code, 3);
    assert_eq!(tplab("--help").code, 0);
}

#[test]
fn hash_tracks_parameters_not_threads() {
    let h = |args: &str| json(args).0["config"]["hash"].as_str().unwrap().to_string();
    let a = h("--digits 20 --seed 1 vd --subject logistic --trials 10");
    assert_eq!(a, h("--digits 20 --seed 1 --threads 2 vd --subject logistic --trials 10"));
    assert_ne!(a, h("--digits 20 --seed 2 vd --subject logistic --trials 10"));
    assert_ne!(a, h("--digits 20 --seed 1 vd --subject logistic --trials 11"));
}

#[test]
fn output_is_independent_of_thread_count() {
    for args in [
        "--digits 20 --seed 9 tp --subject logistic --max-order 4 --trials 30",
        "--digits 20 --seed 9 vd --subject gumbel --trials 30",
        "--digits 20 --seed 9 bochner --n 4 --trials 20",
    ] {
        let one = tplab(&format!("--threads 1 {args}"));
        let many = tplab(&format!("--threads 8 {args}"));
        assert_eq!(one.code, many.code);
        assert_eq!(one.stdout, many.stdout, "{args}");
    }
}

#[test]
fn config_file_supplies_missing_flags() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# pipeline run\ndigits = 25\nsubject = one_sided_exp\nnmax = 4").unwrap();
    let path = f.path().display().to_string();
    let (v, code) = json(&format!("pipeline --config {path}"));
    assert_eq!(code, 0);
    assert_eq!(v["config"]["digits"], 25);
    assert_eq!(v["results"]["jensen"].as_array().unwrap().len(), 4);
    // flags win over the file
    let (v, _) = json(&format!("pipeline --config {path} --nmax 3"));
    assert_eq!(v["results"]["jensen"].as_array().unwrap().len(), 3);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "subject = gaussian\nno_such_option = 1").unwrap();
    assert_eq!(tplab(&format!("pipeline --config {}", bad.path().display())).code, 3);
}

#[test]
fn lambda_csv_has_header_and_rows() {
    let out = tplab("--digits 20 --output csv lambda --xmin 0 --xmax 1 --step 0.5");
    assert_eq!(out.code, 0, "{}", out.stderr);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with('x'));
}

#[test]
fn lp_on_xi1_reports_capped_hankel_size() {
    let (v, code) = json("--digits 40 lp --series xi1 --n 8");
    assert_eq!(code, 0);
    assert_eq!(v["results"]["hankel_max_order"], 7);
    assert_eq!(v["results"]["turan"].as_array().unwrap().len(), 8);
    assert_eq!(v["results"]["jensen"].as_array().unwrap().len(), 8);
}
