use super::*;
use crate::corpus;
use crate::episode::run_script;
use crate::logic::{flatten, Universe, DEFAULT_CAP};
use crate::syntax::Literal;
use proptest::prelude::*;

fn lit(s: &str, negated: bool) -> Literal {
    Literal { formula: s.parse().unwrap(), negated }
}

fn facts(lines: &[&str]) -> FactSet {
    lines.iter().map(|l| l.parse().unwrap()).collect()
}

#[test]
fn success_score_is_best_option_fraction() {
    let opts = GoalOptions {
        options: vec![
            vec![
                lit("(sliced a_1)", false),
                lit("(cooked a_1)", false),
                lit("(frozen a_1)", true),
                lit("(burnt a_1)", false),
            ],
            vec![lit("(dusty b_1)", false), lit("(open b_1)", false)],
        ],
        truncated: false,
    };
    // option 1: sliced + not frozen; option 2: nothing
    assert_eq!(success_score(&opts, &facts(&["(sliced a_1)"])).unwrap(), 0.5);
    assert_eq!(success_score(&opts, &facts(&["(dusty b_1)", "(open b_1)"])).unwrap(), 1.0);
    let none = GoalOptions { options: vec![], truncated: false };
    assert_eq!(success_score(&none, &FactSet::new()), Err(ScoreError::NoOptions));
}

#[test]
fn serving_example_scores_best_of_two_options() {
    let def = corpus::activity("serving_hors_doeuvres").unwrap();
    let u = Universe::new(&def.objects, &corpus::taxonomy()).unwrap();
    let opts = flatten(def.goal.as_ref().unwrap(), &u, DEFAULT_CAP).unwrap();
    // satisfy the first 5 literals of option one and violate the other 3;
    // option two uses the same atoms with flipped signs, so it gets 3 of 8
    let f: FactSet = opts.options[0]
        .iter()
        .enumerate()
        .filter(|(i, l)| (*i < 5) != l.negated)
        .map(|(_, l)| l.formula.clone())
        .collect();
    let second = opts.options[1].iter().filter(|l| f.contains(&l.formula) != l.negated).count();
    assert_eq!(second, 3);
    let q = success_score(&opts, &f).unwrap();
    assert!((q - 0.625).abs() < 1e-12, "{q}");
}

fn demo_log() -> (crate::syntax::ActivityDefinition, GoalOptions, TrajectoryLog) {
    let def = corpus::activity("packing_lunches").unwrap();
    let tax = corpus::taxonomy();
    let log = run_script(
        &def,
        &corpus::kitchen_scene(),
        &tax,
        &corpus::domain(),
        0,
        corpus::PACKING_LUNCHES_SCRIPT,
    )
    .unwrap();
    let u = Universe::new(&def.objects, &tax).unwrap();
    let opts = flatten(def.goal.as_ref().unwrap(), &u, DEFAULT_CAP).unwrap();
    (def, opts, log)
}

#[test]
fn demo_script_reaches_the_goal_and_cached_facts_match() {
    let (def, opts, log) = demo_log();
    let (tax, dom) = (corpus::taxonomy(), corpus::domain());
    let mut ctx = ScoringContext { def: &def, options: &opts, taxonomy: &tax, domain: &dom, mode: FactMode::PreferCached };
    let cached = score_trajectory(&log, &ctx).unwrap();
    assert_eq!(cached.q_final, 1.0);
    ctx.mode = FactMode::Recompute;
    let fresh = score_trajectory(&log, &ctx).unwrap();
    assert_eq!(cached, fresh);
    assert!(cached.t_sim > 0.0 && cached.l_body > 0.0 && cached.l_left > 0.0);

    let text = log.to_jsonl();
    assert!(text.lines().next().unwrap().contains("\"log_version\":1"));
    let back = TrajectoryLog::from_jsonl(&text).unwrap();
    assert_eq!(back, log);
    let streamed = LogReader::new(text.as_bytes()).unwrap();
    let header = streamed.header.clone();
    assert_eq!(score_stream(&header, streamed, &ctx).unwrap(), fresh);
}

#[test]
fn malformed_logs_name_the_offending_line_or_record() {
    let (def, opts, log) = demo_log();
    let (tax, dom) = (corpus::taxonomy(), corpus::domain());
    let ctx = ScoringContext { def: &def, options: &opts, taxonomy: &tax, domain: &dom, mode: FactMode::PreferCached };
    let text = log.to_jsonl();
    let mut lines: Vec<&str> = text.lines().collect();
    lines[3] = "{not json";
    let err = TrajectoryLog::from_jsonl(&lines.join("\n")).unwrap_err();
    assert!(matches!(err, ScoreError::Format { line: 4, .. }), "{err:?}");

    let bumped = text.replacen("\"log_version\":1", "\"log_version\":9", 1);
    assert_eq!(TrajectoryLog::from_jsonl(&bumped), Err(ScoreError::UnsupportedVersion(9)));
    assert_eq!(TrajectoryLog::from_jsonl(""), Err(ScoreError::EmptyLog));

    let mut swapped = log.clone();
    swapped.records.swap(1, 2);
    assert_eq!(score_trajectory(&swapped, &ctx), Err(ScoreError::StepOrder { record: 1 }));

    let mut missing = log.clone();
    let gone = missing.records[2].objects.keys().next().unwrap().clone();
    missing.records[2].objects.remove(&gone);
    assert_eq!(
        score_trajectory(&missing, &ctx),
        Err(ScoreError::MissingObject { record: 2, object: gone })
    );

    let empty = TrajectoryLog { header: log.header.clone(), records: vec![] };
    assert_eq!(score_trajectory(&empty, &ctx), Err(ScoreError::NoRecords));
}

fn report(t: f64, l_body: f64, q: f64) -> MetricsReport {
    MetricsReport {
        q_final: q,
        q_series: vec![q],
        t_sim: t,
        d_k_accumulated: 1.0,
        d_k_differential: 0.0,
        d_l_accumulated: 2.0,
        d_l_differential: 0.0,
        l_body,
        l_left: 0.0,
        l_right: 3.0,
        normalized: None,
    }
}

#[test]
fn normalization_uses_the_best_successful_human() {
    let agent = report(200.0, 10.0, 0.5);
    let humans = [report(100.0, 40.0, 1.0), report(150.0, 25.0, 1.0), report(1.0, 1.0, 0.9)];
    let cfg = NormalizeConfig::default();
    let r = normalize_to_human(&agent, &humans, &cfg).unwrap();
    assert_eq!(r["t_sim"], 0.5);
    assert_eq!(r["l_body"], 2.5);
    assert_eq!(r["d_k_accumulated"], 1.0);
    // both zero is parity
    assert_eq!(r["d_k_differential"], 1.0);
    assert_eq!(r["l_left"], 1.0);

    let mut zero = agent.clone();
    zero.l_right = 0.0;
    assert_eq!(normalize_to_human(&zero, &humans, &cfg).unwrap()["l_right"], cfg.max_ratio);

    let mean = NormalizeConfig { reference: Reference::Mean, ..cfg };
    assert_eq!(normalize_to_human(&agent, &humans, &mean).unwrap()["t_sim"], 0.625);

    let mut reversed = humans.to_vec();
    reversed.reverse();
    assert_eq!(normalize_to_human(&agent, &reversed, &cfg).unwrap(), r);
    assert_eq!(
        normalize_to_human(&agent, &humans[2..], &cfg),
        Err(ScoreError::NoSuccessfulBaseline)
    );
}

#[test]
fn report_table_is_flat_key_value() {
    let mut r = report(2.0, 1.5, 1.0);
    r.normalized = Some([("t_sim".to_string(), 0.5)].into());
    let table = r.to_table();
    assert!(table.starts_with("q_final=1\nq_series=1\nt_sim=2\n"));
    assert!(table.contains("l_body=1.5\n"));
    assert!(table.ends_with("normalized.t_sim=0.5\n"));
    let back: MetricsReport = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(back, r);
}

proptest! {
    #[test]
    fn q_is_a_fraction_and_extra_satisfied_options_never_lower_it(
        picks in proptest::collection::vec(proptest::collection::vec((0usize..6, any::<bool>()), 1..5), 1..4),
        truth in proptest::collection::vec(any::<bool>(), 6),
    ) {
        let atoms: Vec<String> = (0..6).map(|i| format!("(sliced a_{i})")).collect();
        let opts = GoalOptions {
            options: picks.iter().map(|o| o.iter().map(|(i, n)| lit(&atoms[*i], *n)).collect()).collect(),
            truncated: false,
        };
        let f: FactSet = (0..6).filter(|i| truth[*i]).map(|i| atoms[i].parse().unwrap()).collect();
        let q = success_score(&opts, &f).unwrap();
        prop_assert!((0.0..=1.0).contains(&q));
        let mut more = opts.clone();
        more.options.push((0..6).map(|i| lit(&atoms[i], !truth[i])).collect());
        prop_assert_eq!(success_score(&more, &f).unwrap(), 1.0);
        prop_assert!(success_score(&more, &f).unwrap() >= q);
    }
}
