//! Activity instantiation: binding constants to scene objects, spawning the
//! rest, realizing initial literals, and checking goal feasibility.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::logic::{flatten, GoalOptions, GroundLiteral, LogicError, Universe};
use crate::syntax::{
    ActivityDefinition, AtomicFormula, CategoryName, ConstantName, DomainDefinition, Literal,
    RoomName, Term,
};
use crate::taxonomy::Taxonomy;
use crate::world::{
    eval_atomic, Aabb, ObjectId, ObjectInstance, SceneManifest, SceneState, Vec3, WorldError,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SampleError {
    #[error("no eligible scene object for `{constant}` in room `{room}`")]
    NoEligibleObject { constant: ConstantName, room: RoomName },
    #[error("init refers to unknown room `{0}`")]
    UnknownRoom(RoomName),
    #[error("init contains both {0} and its negation")]
    Contradiction(Literal),
    #[error("placement literals form a cycle through `{0}`")]
    CyclicPlacement(ConstantName),
    #[error("`{0}` has conflicting placement literals")]
    ConflictingPlacement(ConstantName),
    #[error("`{constant}` is bound to fixed scene object `{object}` and cannot be moved")]
    FixedObjectPlacement { constant: ConstantName, object: ObjectId },
    #[error("object id `{0}` already exists in the scene")]
    DuplicateObject(ObjectId),
    #[error("init literal {0} could not be realized")]
    Unrealizable(Literal),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstantiationResult {
    pub state: SceneState,
    pub binding: BTreeMap<ConstantName, ObjectId>,
    /// Objects spawned for constants with no scene counterpart, in declaration order.
    pub created: Vec<ObjectId>,
}

/// How an initial literal pins down where an object is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Anchor {
    OnTop,
    Inside,
    Under,
    NextTo,
}

/// Builds a concrete scene satisfying every initial literal of `def`.
///
/// All randomness (which eligible scene object a room-constrained constant
/// binds to, where spawned objects land) comes from `seed`.
pub fn instantiate(
    def: &ActivityDefinition,
    manifest: &SceneManifest,
    taxonomy: &Taxonomy,
    domain: &DomainDefinition,
    seed: u64,
) -> Result<InstantiationResult, SampleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = SceneState::from_manifest(manifest, taxonomy)?;
    check_contradictions(&def.init)?;

    let binding = bind_room_constrained(def, &state, taxonomy, &mut rng)?;
    let mut created = Vec::new();
    let mut full = BTreeMap::new();
    for (c, cat) in &def.objects {
        let id = match binding.get(c) {
            Some(id) => id.clone(),
            None => {
                let id = ObjectId::from(c);
                if state.objects.contains_key(&id) {
                    return Err(SampleError::DuplicateObject(id));
                }
                let o = ObjectInstance::new(id.clone(), cat.clone(), [0.0; 3], taxonomy, &state.config)?;
                state.objects.insert(id.clone(), o);
                created.push(id.clone());
                id
            }
        };
        full.insert(c.clone(), id);
    }
    state.aliases = full.clone();

    place_objects(def, manifest, &mut state, &full, &created, &mut rng)?;
    for lit in &def.init {
        realize_unary(&mut state, &full, lit);
    }

    for lit in &def.init {
        if eval_atomic(&state, &lit.formula, taxonomy, domain)? == lit.negated {
            return Err(SampleError::Unrealizable(lit.clone()));
        }
    }
    Ok(InstantiationResult {
        state,
        binding: full,
        created,
    })
}

fn check_contradictions(init: &[Literal]) -> Result<(), SampleError> {
    let mut seen: BTreeMap<&AtomicFormula, bool> = BTreeMap::new();
    for lit in init {
        if let Some(prev) = seen.insert(&lit.formula, lit.negated) {
            if prev != lit.negated {
                return Err(SampleError::Contradiction(lit.clone()));
            }
        }
    }
    Ok(())
}

/// Backtracking assignment of `inroom`-constrained constants to distinct
/// fixed objects of a matching category located in every required room.
fn bind_room_constrained(
    def: &ActivityDefinition,
    state: &SceneState,
    taxonomy: &Taxonomy,
    rng: &mut ChaCha8Rng,
) -> Result<BTreeMap<ConstantName, ObjectId>, SampleError> {
    let mut rooms: BTreeMap<&ConstantName, Vec<&RoomName>> = BTreeMap::new();
    for lit in def.init.iter().filter(|l| !l.negated && l.formula.predicate.as_str() == "inroom") {
        if let [Term::Constant(c), Term::Room(r)] = lit.formula.args.as_slice() {
            if !state.rooms.contains_key(r) {
                return Err(SampleError::UnknownRoom(r.clone()));
            }
            rooms.entry(c).or_default().push(r);
        }
    }
    let mut slots = Vec::new();
    for (c, cat) in &def.objects {
        let Some(required) = rooms.get(c) else { continue };
        let mut candidates = Vec::new();
        for (id, o) in &state.objects {
            let inside_all = required.iter().all(|r| state.rooms[*r].contains(o.position()));
            if o.fixed && inside_all && taxonomy.is_a(&o.category, cat).map_err(WorldError::from)? {
                candidates.push(id.clone());
            }
        }
        if candidates.is_empty() {
            return Err(SampleError::NoEligibleObject {
                constant: c.clone(),
                room: required[0].clone(),
            });
        }
        candidates.shuffle(rng);
        slots.push((c, required[0], candidates));
    }

    fn assign<'a>(
        slots: &'a [(&ConstantName, &RoomName, Vec<ObjectId>)],
        i: usize,
        used: &mut BTreeSet<&'a ObjectId>,
        out: &mut Vec<&'a ObjectId>,
    ) -> bool {
        let Some((_, _, candidates)) = slots.get(i) else {
            return true;
        };
        for id in candidates {
            if used.insert(id) {
                out.push(id);
                if assign(slots, i + 1, used, out) {
                    return true;
                }
                out.pop();
                used.remove(id);
            }
        }
        false
    }

    let mut chosen = Vec::new();
    if !assign(&slots, 0, &mut BTreeSet::new(), &mut chosen) {
        let (c, r, _) = &slots[chosen.len()];
        return Err(SampleError::NoEligibleObject {
            constant: (*c).clone(),
            room: (*r).clone(),
        });
    }
    Ok(slots
        .iter()
        .zip(chosen)
        .map(|((c, _, _), id)| ((*c).clone(), id.clone()))
        .collect())
}

/// Realizes kinematic literals in dependency order; everything else that was
/// spawned lands on the floor in a free-space region.
fn place_objects(
    def: &ActivityDefinition,
    manifest: &SceneManifest,
    state: &mut SceneState,
    ids: &BTreeMap<ConstantName, ObjectId>,
    created: &[ObjectId],
    rng: &mut ChaCha8Rng,
) -> Result<(), SampleError> {
    let positive = |pred: &'static str| {
        def.init
            .iter()
            .filter(move |l| !l.negated && l.formula.predicate.as_str() == pred)
            .filter_map(|l| match l.formula.args.as_slice() {
                [a, b] => Some((a.as_constant()?, b.as_constant()?)),
                _ => None,
            })
    };

    // Nested `inside` literals are fine as long as the targets form a chain;
    // the object goes into the innermost one.
    let inside_edges: BTreeSet<(&ConstantName, &ConstantName)> = positive("inside").collect();
    let encloses = |outer: &ConstantName, inner: &ConstantName| {
        let mut frontier = vec![inner];
        let mut seen = BTreeSet::new();
        while let Some(x) = frontier.pop() {
            for (a, b) in &inside_edges {
                if *a == x && seen.insert(*b) {
                    if *b == outer {
                        return true;
                    }
                    frontier.push(b);
                }
            }
        }
        false
    };

    let mut anchors: BTreeMap<&ConstantName, (Anchor, &ConstantName)> = BTreeMap::new();
    for (a, b) in positive("ontop") {
        if anchors.insert(a, (Anchor::OnTop, b)).is_some_and(|(_, prev)| prev != b) {
            return Err(SampleError::ConflictingPlacement(a.clone()));
        }
    }
    for (a, b) in positive("inside") {
        match anchors.get(a) {
            None => {
                anchors.insert(a, (Anchor::Inside, b));
            }
            Some((Anchor::Inside, prev)) if encloses(b, prev) => {}
            Some((Anchor::Inside, prev)) if encloses(prev, b) => {
                anchors.insert(a, (Anchor::Inside, b));
            }
            Some((Anchor::Inside, prev)) if *prev == b => {}
            Some(_) => return Err(SampleError::ConflictingPlacement(a.clone())),
        }
    }
    let mut on_floor: BTreeSet<&ConstantName> = BTreeSet::new();
    for lit in def.init.iter().filter(|l| !l.negated && l.formula.predicate.as_str() == "onfloor") {
        if let Some(a) = lit.formula.args.first().and_then(Term::as_constant) {
            if anchors.contains_key(a) {
                return Err(SampleError::ConflictingPlacement(a.clone()));
            }
            on_floor.insert(a);
        }
    }
    for (pred, kind) in [("under", Anchor::Under), ("nextto", Anchor::NextTo)] {
        for (a, b) in positive(pred) {
            if !on_floor.contains(a) {
                anchors.entry(a).or_insert((kind, b));
            }
        }
    }
    let off_floor: BTreeSet<&ConstantName> = def
        .init
        .iter()
        .filter(|l| l.negated && l.formula.predicate.as_str() == "onfloor")
        .filter_map(|l| l.formula.args.first().and_then(Term::as_constant))
        .collect();
    let mut excluded_rooms: BTreeMap<&ConstantName, BTreeSet<&RoomName>> = BTreeMap::new();
    for lit in def.init.iter().filter(|l| l.negated && l.formula.predicate.as_str() == "inroom") {
        if let [Term::Constant(c), Term::Room(r)] = lit.formula.args.as_slice() {
            excluded_rooms.entry(c).or_default().insert(r);
        }
    }

    // Kahn's algorithm over "object depends on its anchor", ties by declaration order.
    let order: Vec<&ConstantName> = def.objects.iter().map(|(c, _)| c).collect();
    let mut done: BTreeSet<&ConstantName> = BTreeSet::new();
    let mut sequence = Vec::new();
    while sequence.len() < order.len() {
        let next = order.iter().find(|c| {
            !done.contains(**c) && anchors.get(**c).is_none_or(|(_, target)| done.contains(target))
        });
        let Some(next) = next else {
            let stuck = order.iter().find(|c| !done.contains(**c)).expect("some pending");
            return Err(SampleError::CyclicPlacement((*stuck).clone()));
        };
        done.insert(next);
        sequence.push(*next);
    }

    let spawned: BTreeSet<&ObjectId> = created.iter().collect();
    for c in sequence {
        let id = ids[c].clone();
        let anchor = anchors.get(c);
        if !spawned.contains(&id) {
            match anchor {
                None => continue,
                Some(_) => {
                    return Err(SampleError::FixedObjectPlacement {
                        constant: c.clone(),
                        object: id,
                    })
                }
            }
        }
        let radius = state.objects[&id].bounding_radius;
        match anchor {
            Some((kind, target)) => {
                let t = &state.objects[&ids[*target]];
                let (base, rt) = (t.position(), t.bounding_radius);
                let angle = rng.random_range(0.0..std::f64::consts::TAU);
                let (dx, dy) = (angle.cos(), angle.sin());
                let pos = match kind {
                    Anchor::OnTop => {
                        let r = rng.random_range(0.0..=0.4 * rt);
                        [base[0] + r * dx, base[1] + r * dy, base[2] + rt + radius]
                    }
                    Anchor::Inside => {
                        let r = rng.random_range(0.0..=0.3 * rt);
                        [base[0] + r * dx, base[1] + r * dy, base[2]]
                    }
                    Anchor::Under => {
                        let r = rng.random_range(0.0..=0.5 * rt);
                        [base[0] + r * dx, base[1] + r * dy, 0.0]
                    }
                    Anchor::NextTo => {
                        let r = rt + radius;
                        [base[0] + r * dx, base[1] + r * dy, 0.0]
                    }
                };
                state.objects.get_mut(&id).expect("spawned").pose.position = pos;
                let target = ids[*target].clone();
                match kind {
                    Anchor::OnTop => {
                        state.support.insert(id, target);
                    }
                    Anchor::Inside => {
                        state.containment.insert(id, target);
                    }
                    Anchor::Under | Anchor::NextTo => {
                        state.on_floor.insert(id);
                    }
                }
            }
            None => {
                let excluded = excluded_rooms.get(c);
                let regions: Vec<Aabb> = manifest
                    .room
                    .iter()
                    .filter(|r| excluded.is_none_or(|ex| !ex.contains(&r.name)))
                    .flat_map(|r| r.free_space.iter().copied())
                    .collect();
                let mut pos = match regions.as_slice() {
                    [] => state.agent.body.position,
                    _ => sample_in(&regions[rng.random_range(0..regions.len())], rng),
                };
                if off_floor.contains(c) {
                    pos[2] += 0.5;
                } else {
                    state.on_floor.insert(id.clone());
                }
                state.objects.get_mut(&id).expect("spawned").pose.position = pos;
            }
        }
    }
    Ok(())
}

fn sample_in(region: &Aabb, rng: &mut ChaCha8Rng) -> Vec3 {
    std::array::from_fn(|i| {
        if region.min[i] < region.max[i] {
            rng.random_range(region.min[i]..=region.max[i])
        } else {
            region.min[i]
        }
    })
}

/// Sets extended state so that a unary literal holds.
fn realize_unary(state: &mut SceneState, ids: &BTreeMap<ConstantName, ObjectId>, lit: &Literal) {
    let [Term::Constant(c)] = lit.formula.args.as_slice() else {
        return;
    };
    let Some(id) = ids.get(c) else { return };
    let cfg = state.config.clone();
    let Some(o) = state.objects.get_mut(id) else { return };
    let e = &mut o.ext;
    let on = !lit.negated;
    let level = if on { 1.0 } else { 0.0 };
    match lit.formula.predicate.as_str() {
        "cooked" | "burnt" => {
            let threshold = if lit.formula.predicate.as_str() == "cooked" {
                o.thresholds.cook
            } else {
                o.thresholds.burn
            };
            if on {
                e.temperature_max = e.temperature_max.max(threshold + cfg.realization_margin);
            } else if e.temperature_max >= threshold {
                e.temperature = e.temperature.min(cfg.ambient_temperature);
                e.temperature_max = cfg.ambient_temperature.max(e.temperature);
            }
        }
        "frozen" => {
            if on {
                let t = o.thresholds.freeze - cfg.realization_margin;
                e.temperature = t;
                e.temperature_min = e.temperature_min.min(t);
            } else if e.temperature <= o.thresholds.freeze {
                e.set_temperature(cfg.ambient_temperature);
            }
        }
        "sliced" => e.sliced = on,
        "open" => e.open = on,
        "toggled_on" => e.toggled_on = on,
        "soaked" => e.wetness = level,
        "dusty" => e.dust_level = level,
        "stained" => e.stain_level = level,
        _ => {}
    }
}

/// Why a flattened goal option cannot be reached.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// The option asserts a literal and its negation.
    Contradiction { literal: GroundLiteral },
    /// A predicate is applied to an object lacking the required property.
    Inapplicable { literal: GroundLiteral },
    /// One object is placed directly on or in two unrelated targets.
    Exclusive { object: ConstantName, first: String, second: String },
    /// Support or containment would loop back to the object.
    PlacementCycle { object: ConstantName },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectedOption {
    pub index: usize,
    pub violation: Violation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub options: usize,
    pub consistent: usize,
    pub truncated: bool,
    pub rejected: Vec<RejectedOption>,
}

/// Flattens the goal and checks each option for internal consistency.
pub fn check_goal_feasibility(
    def: &ActivityDefinition,
    universe: &Universe,
    taxonomy: &Taxonomy,
    domain: &DomainDefinition,
    cap: usize,
) -> Result<FeasibilityReport, LogicError> {
    let opts = match &def.goal {
        Some(goal) => flatten(goal, universe, cap)?,
        None => GoalOptions::trivial(),
    };
    let categories: BTreeMap<&ConstantName, &CategoryName> =
        def.objects.iter().map(|(c, cat)| (c, cat)).collect();
    let mut rejected = Vec::new();
    for (index, option) in opts.options.iter().enumerate() {
        if let Some(violation) = option_violation(option, &categories, taxonomy, domain)? {
            rejected.push(RejectedOption { index, violation });
        }
    }
    let consistent = opts.options.len() - rejected.len();
    Ok(FeasibilityReport {
        feasible: consistent > 0,
        options: opts.options.len(),
        consistent,
        truncated: opts.truncated,
        rejected,
    })
}

fn option_violation(
    option: &[GroundLiteral],
    categories: &BTreeMap<&ConstantName, &CategoryName>,
    taxonomy: &Taxonomy,
    domain: &DomainDefinition,
) -> Result<Option<Violation>, LogicError> {
    let mut polarity: BTreeMap<&AtomicFormula, bool> = BTreeMap::new();
    for lit in option {
        if polarity.insert(&lit.formula, lit.negated).is_some_and(|p| p != lit.negated) {
            return Ok(Some(Violation::Contradiction { literal: lit.clone() }));
        }
    }
    for lit in option {
        let Some(sig) = domain.predicate(lit.formula.predicate.as_str()) else {
            return Ok(Some(Violation::Inapplicable { literal: lit.clone() }));
        };
        let cats: Vec<Option<&CategoryName>> = lit
            .formula
            .args
            .iter()
            .map(|t| t.as_constant().and_then(|c| categories.get(c).copied()))
            .collect();
        if !taxonomy.applicable_to_args(sig, &cats)? {
            return Ok(Some(Violation::Inapplicable { literal: lit.clone() }));
        }
    }

    let pairs = |pred: &'static str| {
        option
            .iter()
            .filter(move |l| !l.negated && l.formula.predicate.as_str() == pred)
            .filter_map(|l| match l.formula.args.as_slice() {
                [a, b] => Some((a.as_constant()?, b.as_constant()?)),
                _ => None,
            })
    };
    let inside: Vec<(&ConstantName, &ConstantName)> = pairs("inside").collect();
    let reaches = |from: &ConstantName, to: &ConstantName| {
        let mut frontier = vec![from];
        let mut seen = BTreeSet::new();
        while let Some(x) = frontier.pop() {
            for (a, b) in &inside {
                if *a == x && seen.insert(*b) {
                    if *b == to {
                        return true;
                    }
                    frontier.push(b);
                }
            }
        }
        false
    };

    let denied = |x: &ConstantName, y: &ConstantName| {
        !reaches(x, y)
            && option.iter().any(|l| {
                l.negated
                    && l.formula.predicate.as_str() == "inside"
                    && matches!(l.formula.args.as_slice(), [p, q] if p.as_constant() == Some(x) && q.as_constant() == Some(y))
            })
    };

    let mut placed: BTreeMap<&ConstantName, (&'static str, &ConstantName)> = BTreeMap::new();
    let floor: BTreeSet<&ConstantName> = option
        .iter()
        .filter(|l| !l.negated && l.formula.predicate.as_str() == "onfloor")
        .filter_map(|l| l.formula.args.first()?.as_constant())
        .collect();
    for pred in ["ontop", "inside"] {
        for (a, b) in pairs(pred) {
            let exclusive = |first: String| Violation::Exclusive {
                object: a.clone(),
                first,
                second: format!("({pred} {a} {b})"),
            };
            if floor.contains(a) {
                return Ok(Some(exclusive(format!("(onfloor {a})"))));
            }
            if let Some((p, prev)) = placed.get(a) {
                // containment is transitive, so two containers are fine
                // unless the option forbids stacking them either way
                let nested = *p == "inside" && pred == "inside" && !(denied(prev, b) && denied(b, prev));
                if prev != &b && !nested || *p != pred {
                    return Ok(Some(exclusive(format!("({p} {a} {prev})"))));
                }
                continue;
            }
            placed.insert(a, (pred, b));
        }
    }
    // Every asserted support/containment edge must eventually reach ground.
    for start in placed.keys() {
        let mut cur = *start;
        let mut steps = 0;
        while let Some((_, next)) = placed.get(cur) {
            steps += 1;
            if *next == *start || steps > placed.len() {
                return Ok(Some(Violation::PlacementCycle { object: (*start).clone() }));
            }
            cur = next;
        }
    }
    for (a, b) in &inside {
        if a == b || reaches(b, a) {
            return Ok(Some(Violation::PlacementCycle { object: (*a).clone() }));
        }
    }
    Ok(None)
}
