//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use bddl::corpus;
use bddl::episode::run_script;
use bddl::logic::{activity_volume, evaluate, flatten, Binding, GoalOptions, Universe, DEFAULT_CAP};
use bddl::sampler::instantiate;
use bddl::scoring::{
    score_trajectory, success_score, FactMode, LogHeader, LogRecord, ObjectInfo, ObjectSnapshot,
    ScoringContext, TrajectoryLog, LOG_VERSION,
};
use bddl::syntax::{parse_problem, print_canonical, ActivityDefinition, Expr, Literal};
use bddl::world::{
    distance, eval_atomic, logical_snapshot, AgentState, ExtendedState, FactSet, ObjectId,
    ObjectInstance, Placement, Pose, SceneState, WorldConfig,
};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn golden_corpus() -> Outcome {
    let domain = corpus::domain();
    let mut counts = Vec::new();
    for (text, expected) in [(corpus::PACKING_LUNCHES, 7), (corpus::SERVING_HORS_DOEUVRES, 9)] {
        let def = parse_problem(text, &domain).map_err(|e| e.to_string())?;
        ensure(def.objects.len() == expected, format!("{} constants, expected {expected}", def.objects.len()))?;
        let printed = print_canonical(&def);
        let again = parse_problem(&printed, &domain).map_err(|e| e.to_string())?;
        ensure(again == def, format!("{}: reprinted AST differs", def.problem_name))?;
        ensure(print_canonical(&again) == printed, "canonical form is not a fixpoint")?;
        counts.push(def.objects.len());
    }
    Ok(format!("constants {counts:?}, canonical round-trip identical"))
}

fn activity_volume_matches_oracle() -> Outcome {
    let tax = corpus::taxonomy();
    let mut detail = Vec::new();
    for (name, volume, options) in [("packing_lunches", 4, 1), ("serving_hors_doeuvres", 8, 2)] {
        let def = corpus::activity(name).unwrap();
        let goal = def.goal.as_ref().unwrap();
        let (size, count) = minimum_implicants(goal, &def.objects, &tax).ok_or("unsatisfiable goal")?;
        ensure((size, count) == (volume, options), format!("{name}: oracle gives {size}/{count}"))?;
        let u = Universe::new(&def.objects, &tax).map_err(|e| e.to_string())?;
        let opts = flatten(goal, &u, DEFAULT_CAP).map_err(|e| e.to_string())?;
        let v = activity_volume(&opts).map_err(|e| e.to_string())?;
        let shortest = opts.options.iter().filter(|o| o.len() == v).count();
        ensure(
            v == size && shortest == count && !opts.truncated,
            format!("{name}: flatten gives volume {v} with {shortest} shortest options"),
        )?;
        detail.push(format!("{name} volume {v} ({} options)", opts.options.len()));
    }
    Ok(detail.join(", "))
}

fn fruit_vocabulary(rng: &mut impl Rng) -> Objects {
    objects(&[
        ("apple.n.01", rng.random_range(0..=3)),
        ("peach.n.03", rng.random_range(0..=2)),
        ("plate.n.04", rng.random_range(0..=5)),
    ])
}

fn generator(objs: &Objects) -> ExprGen<'_> {
    ExprGen {
        objs,
        categories: ["apple.n.01", "peach.n.03", "edible_fruit.n.01", "plate.n.04"].map(cat).to_vec(),
        unary: vec!["sliced", "cooked"],
        binary: vec!["ontop", "nextto"],
        max_depth: 4,
    }
}

fn quantifier_oracle() -> Outcome {
    let tax = corpus::taxonomy();
    let mut rng = ChaCha8Rng::seed_from_u64(0xB00D);
    let mut checks = 0;
    for i in 0..500 {
        let mut objs = fruit_vocabulary(&mut rng);
        if objs.is_empty() {
            objs = objects(&[("apple.n.01", 1)]);
        }
        let expr = generator(&objs).expr(&mut rng, 0, &mut Vec::new());
        let universe = Universe::new(&objs, &tax).map_err(|e| e.to_string())?;
        let atoms = all_atoms(&objs, &["sliced", "cooked"], &["ontop", "nextto"]);
        for _ in 0..4 {
            let density = rng.random_range(0.1..0.9);
            let facts = random_facts(&mut rng, &atoms, density);
            let got = evaluate(&expr, &facts, &Binding::new(), &universe).map_err(|e| e.to_string())?;
            let want = naive_eval(&expr, &facts, &mut Env::new(), &objs, &tax);
            ensure(got == want, format!("expression {i} disagrees: {}", bddl::syntax::print_expr(&expr)))?;
            checks += 1;
        }
    }
    Ok(format!("500 expressions, {checks} evaluations, 0 disagreements"))
}

fn q_iff_goal() -> Outcome {
    let tax = corpus::taxonomy();
    let objs = objects(&[("apple.n.01", 2), ("plate.n.04", 2)]);
    let universe = Universe::new(&objs, &tax).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x51DE);
    let mut gen = generator(&objs);
    gen.categories = vec![cat("apple.n.01"), cat("plate.n.04")];
    gen.unary = vec!["sliced"];
    gen.binary = vec!["ontop"];
    let (mut goals, mut states, mut attempts, mut nontrivial) = (0, 0, 0, 0);
    while goals < 20 {
        attempts += 1;
        ensure(attempts < 10_000, "could not generate 20 suitable goals")?;
        let goal = gen.expr(&mut rng, 0, &mut Vec::new());
        let atoms: Vec<_> = ground_atoms(&goal, &objs, &tax).into_iter().collect();
        if atoms.len() > 10 {
            continue;
        }
        let opts = flatten(&goal, &universe, DEFAULT_CAP).map_err(|e| e.to_string())?;
        if opts.truncated || opts.options.is_empty() {
            continue;
        }
        let mut seen = [false; 2];
        for bits in 0..1u32 << atoms.len() {
            let facts: FactSet = (0..atoms.len()).filter(|i| bits >> i & 1 == 1).map(|i| atoms[i].clone()).collect();
            let q = success_score(&opts, &facts).map_err(|e| e.to_string())?;
            let truth = evaluate(&goal, &facts, &Binding::new(), &universe).map_err(|e| e.to_string())?;
            ensure(
                (q == 1.0) == truth,
                format!("Q = {q} but goal is {truth} for {}", bddl::syntax::print_expr(&goal)),
            )?;
            seen[truth as usize] = true;
            states += 1;
        }
        nontrivial += (seen == [true, true]) as usize;
        goals += 1;
    }
    Ok(format!("20 goals ({nontrivial} non-constant), {states} states checked"))
}

fn log_header(objects: &[ObjectId], step_duration: f64) -> LogHeader {
    LogHeader {
        log_version: LOG_VERSION,
        activity: "synthetic".into(),
        scene: "synthetic".into(),
        seed: None,
        step_duration,
        rooms: BTreeMap::new(),
        objects: objects
            .iter()
            .map(|id| (id.clone(), ObjectInfo { category: cat("apple.n.01"), radius: 0.1, fixed: false }))
            .collect(),
        aliases: BTreeMap::new(),
        config: WorldConfig::default(),
    }
}

fn record(step: u64, positions: &[(ObjectId, [f64; 3])], agent: AgentState, facts: FactSet) -> LogRecord {
    LogRecord {
        step,
        clock: step as f64,
        agent,
        objects: positions
            .iter()
            .map(|(id, p)| {
                let snap = ObjectSnapshot { pose: Pose::at(*p), ext: ExtendedState::at_temperature(22.0), placement: Placement::Free };
                (id.clone(), snap)
            })
            .collect(),
        facts: Some(facts),
    }
}

fn metric_properties() -> Outcome {
    let tax = corpus::taxonomy();
    let domain = corpus::domain();
    let objs = objects(&[("apple.n.01", 3)]);
    let def = ActivityDefinition {
        problem_name: "synthetic".into(),
        domain_name: "igibson".into(),
        objects: objs.clone(),
        init: vec![],
        goal: None,
    };
    let atoms = all_atoms(&objs, &["sliced"], &["ontop"]);
    let mut rng = ChaCha8Rng::seed_from_u64(0xD1FF);
    let jitter = |rng: &mut ChaCha8Rng| [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(0.0..2.0)];
    for i in 0..1000 {
        let ids: Vec<ObjectId> = (0..rng.random_range(1..=4)).map(|k| ObjectId::new(format!("o{k}"))).collect();
        let options = GoalOptions {
            options: vec![(0..3).map(|_| Literal { formula: atoms[rng.random_range(0..atoms.len())].clone(), negated: rng.random_bool(0.3) }).collect()],
            truncated: false,
        };
        let ctx = ScoringContext { def: &def, options: &options, taxonomy: &tax, domain: &domain, mode: FactMode::PreferCached };
        let mut step = 0;
        let records: Vec<LogRecord> = (0..rng.random_range(1..25))
            .map(|_| {
                step += rng.random_range(1..3);
                let pos: Vec<_> = ids.iter().map(|id| (id.clone(), jitter(&mut rng))).collect();
                let mut agent = AgentState::standing_at(Pose::at(jitter(&mut rng)));
                agent.left_contact = rng.random_bool(0.5).then(|| ids[0].clone());
                record(step, &pos, agent, random_facts(&mut rng, &atoms, 0.4))
            })
            .collect();
        let log = TrajectoryLog { header: log_header(&ids, 0.5), records };
        let r = score_trajectory(&log, &ctx).map_err(|e| format!("log {i}: {e}"))?;
        ensure(r.d_k_differential <= r.d_k_accumulated + 1e-9, format!("log {i}: D_K differential exceeds accumulated"))?;
        ensure(r.d_l_differential <= r.d_l_accumulated, format!("log {i}: D_L differential exceeds accumulated"))?;

        // independent recomputation of the accumulated sums
        let recs = &log.records;
        let dk: f64 = recs.windows(2).map(|w| w[1].objects.iter().map(|(id, o)| distance(w[0].objects[id].pose.position, o.pose.position)).sum::<f64>()).sum();
        let flips: usize = recs.windows(2).map(|w| atoms.iter().filter(|a| w[0].facts.as_ref().unwrap().contains(*a) != w[1].facts.as_ref().unwrap().contains(*a)).count()).sum();
        ensure((r.d_k_accumulated - dk).abs() <= 1e-9 * dk.max(1.0), format!("log {i}: D_K accumulated {} vs oracle {dk}", r.d_k_accumulated))?;
        ensure(r.d_l_accumulated == flips as f64, format!("log {i}: D_L accumulated {} vs {flips} flips", r.d_l_accumulated))?;
        ensure(r.q_series.iter().all(|q| (0.0..=1.0).contains(q)), format!("log {i}: Q outside [0, 1]"))?;
    }

    // one object carried 1 m out and back
    let id = ObjectId::new("o0");
    let still = AgentState::default();
    let log = TrajectoryLog {
        header: log_header(std::slice::from_ref(&id), 1.0),
        records: [0.0, 1.0, 0.0]
            .iter()
            .enumerate()
            .map(|(k, x)| record(k as u64, &[(id.clone(), [*x, 0.0, 0.0])], still.clone(), FactSet::new()))
            .collect(),
    };
    let options = GoalOptions::trivial();
    let ctx = ScoringContext { def: &def, options: &options, taxonomy: &tax, domain: &domain, mode: FactMode::PreferCached };
    let r = score_trajectory(&log, &ctx).map_err(|e| e.to_string())?;
    ensure((r.d_k_accumulated - 2.0).abs() <= 1e-9, format!("D_K accumulated {}", r.d_k_accumulated))?;
    ensure(r.d_k_differential.abs() <= 1e-9, format!("D_K differential {}", r.d_k_differential))?;
    Ok(format!(
        "1000 random logs satisfy differential <= accumulated; out-and-back D_K = {} / {}",
        r.d_k_accumulated, r.d_k_differential
    ))
}

fn end_to_end() -> Outcome {
    let (tax, domain, scene) = (corpus::taxonomy(), corpus::domain(), corpus::kitchen_scene());
    let def = corpus::activity("packing_lunches").unwrap();
    let log = run_script(&def, &scene, &tax, &domain, 0, corpus::PACKING_LUNCHES_SCRIPT).map_err(|e| e.to_string())?;
    let u = Universe::new(&def.objects, &tax).map_err(|e| e.to_string())?;
    let options = flatten(def.goal.as_ref().unwrap(), &u, DEFAULT_CAP).map_err(|e| e.to_string())?;
    ensure(options.options.len() == 1 && options.options[0].len() == 4, "expected a single 4-literal option")?;
    let ctx = ScoringContext { def: &def, options: &options, taxonomy: &tax, domain: &domain, mode: FactMode::Recompute };
    let r = score_trajectory(&log, &ctx).map_err(|e| e.to_string())?;
    let q = &r.q_series;
    ensure(q.contains(&0.0), format!("Q never reaches 0: {q:?}"))?;
    ensure(r.q_final == 1.0, format!("final Q {}", r.q_final))?;

    let actions: Vec<&str> = corpus::PACKING_LUNCHES_SCRIPT
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let mut rises = 0;
    for (k, action) in actions.iter().enumerate() {
        let delta = q[k + 1] - q[k];
        if action.starts_with("place_") {
            ensure((delta - 0.25).abs() < 1e-12, format!("`{action}` changed Q by {delta}"))?;
            rises += 1;
        } else {
            ensure(delta <= 0.0, format!("`{action}` raised Q by {delta}"))?;
        }
    }
    let first_zero = q.iter().position(|x| *x == 0.0).unwrap();
    Ok(format!(
        "Q {:?} from step {first_zero}, {rises} placement steps each +0.25, final 1.0",
        &q[first_zero..]
    ))
}

fn synthetic_scene(n: usize) -> (SceneState, ActivityDefinition, GoalOptions) {
    let tax = corpus::taxonomy();
    let config = WorldConfig::default();
    let mut state = SceneState::empty(config.clone());
    let kinds = ["apple.n.01", "plate.n.04", "basket.n.01", "hamburger.n.01", "peach.n.03"];
    let tables = n / 10;
    let mut objs: Vec<(bddl::syntax::ConstantName, bddl::syntax::CategoryName)> = Vec::new();
    let mut counters: BTreeMap<&str, usize> = BTreeMap::new();
    for i in 0..n {
        let kind = if i < tables { "table.n.02" } else { kinds[i % kinds.len()] };
        let k = counters.entry(kind).or_default();
        *k += 1;
        let c = constant(&format!("{kind}_{k}"));
        let x = (i % 20) as f64 * 1.5;
        let y = (i / 20) as f64 * 1.5;
        let mut o = ObjectInstance::new(ObjectId::from(&c), cat(kind), [x, y, 0.0], &tax, &config).unwrap();
        if i < tables {
            o.fixed = true;
            o.bounding_radius = 0.6;
            state.on_floor.insert(o.id.clone());
        } else {
            let table = &objs[i % tables].0;
            let t = ObjectId::from(table);
            o.pose.position = state.objects[&t].pose.position;
            o.pose.position[2] += 0.7;
            state.support.insert(o.id.clone(), t);
        }
        state.objects.insert(o.id.clone(), o);
        objs.push((c, cat(kind)));
    }
    let def = ActivityDefinition {
        problem_name: "synthetic".into(),
        domain_name: "igibson".into(),
        objects: objs,
        init: vec![],
        goal: None,
    };
    let goal: Expr = parse_problem(
        "(define (problem g) (:domain igibson) (:objects table.n.02_1 - table.n.02 apple.n.01_1 - apple.n.01) (:init) \
         (:goal (exists (?table.n.02 - table.n.02) (forall (?apple.n.01 - apple.n.01) (ontop ?apple.n.01 ?table.n.02)))))",
        &corpus::domain(),
    )
    .unwrap()
    .goal
    .unwrap();
    let u = Universe::new(&def.objects, &tax).unwrap();
    let options = flatten(&goal, &u, DEFAULT_CAP).unwrap();
    (state, def, options)
}

fn performance() -> Outcome {
    let (tax, domain) = (corpus::taxonomy(), corpus::domain());
    let (state, def, options) = synthetic_scene(200);
    ensure(state.objects.len() == 200, "scene size")?;
    let facts = logical_snapshot(&state, &def, &tax, &domain).map_err(|e| e.to_string())?;
    let runs = 50;
    let mut worst: f64 = 0.0;
    let start = Instant::now();
    for _ in 0..runs {
        let t = Instant::now();
        let f = logical_snapshot(&state, &def, &tax, &domain).map_err(|e| e.to_string())?;
        let q = success_score(&options, &f).map_err(|e| e.to_string())?;
        std::hint::black_box(q);
        worst = worst.max(t.elapsed().as_secs_f64() * 1e3);
    }
    let mean = start.elapsed().as_secs_f64() * 1e3 / runs as f64;
    ensure(mean <= 5.0, format!("mean {mean:.3} ms per step"))?;
    Ok(format!(
        "200 objects, {} facts, {} options: mean {mean:.3} ms, worst {worst:.3} ms per step",
        facts.len(),
        options.options.len()
    ))
}

fn sampler_round_trip() -> Outcome {
    let (tax, domain, scene) = (corpus::taxonomy(), corpus::domain(), corpus::kitchen_scene());
    let mut literals = 0;
    for (name, _) in corpus::ACTIVITIES {
        let def = corpus::activity(name).unwrap();
        for seed in 0..100 {
            let r = instantiate(&def, &scene, &tax, &domain, seed).map_err(|e| format!("{name} seed {seed}: {e}"))?;
            for lit in &def.init {
                let holds = eval_atomic(&r.state, &lit.formula, &tax, &domain).map_err(|e| format!("{name} seed {seed}: {e}"))?;
                ensure(holds != lit.negated, format!("{name} seed {seed}: {lit} is false"))?;
                literals += 1;
            }
            let again = instantiate(&def, &scene, &tax, &domain, seed).map_err(|e| e.to_string())?;
            let (a, b) = (serde_json::to_string(&r).unwrap(), serde_json::to_string(&again).unwrap());
            ensure(a == b, format!("{name} seed {seed}: output differs between runs"))?;
        }
    }
    Ok(format!("{} activities x 100 seeds, {literals} init literals true, deterministic", corpus::ACTIVITIES.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("golden corpus parsing", golden_corpus),
        ("activity volume", activity_volume_matches_oracle),
        ("quantifier oracle equivalence", quantifier_oracle),
        ("Q = 1 iff goal holds", q_iff_goal),
        ("metric properties", metric_properties),
        ("end-to-end scripted episode", end_to_end),
        ("condition checking performance", performance),
        ("sampler round-trip", sampler_round_trip),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panicked".into())));
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
