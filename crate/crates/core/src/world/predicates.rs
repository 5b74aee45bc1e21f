//! Grounding of domain predicates in the symbolic world state.

use std::collections::{BTreeSet, HashMap};

use super::state::{horizontal_distance, ObjectId, ObjectInstance, SceneState};
use super::WorldError;
use crate::syntax::{
    ActivityDefinition, AtomicFormula, CategoryName, ConstantName, DomainDefinition, ParamKind,
    PredicateSignature, Term,
};
use crate::taxonomy::Taxonomy;

/// A set of true ground atomic formulas.
pub type FactSet = BTreeSet<AtomicFormula>;

/// Predicates with a built-in grounding rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Grounded {
    Cooked,
    Burnt,
    Frozen,
    Sliced,
    Open,
    ToggledOn,
    Soaked,
    Dusty,
    Stained,
    OnFloor,
    InRoom,
    OnTop,
    Inside,
    Under,
    NextTo,
}

impl Grounded {
    fn lookup(symbol: &str) -> Option<Self> {
        use Grounded::*;
        Some(match symbol {
            "cooked" => Cooked,
            "burnt" => Burnt,
            "frozen" => Frozen,
            "sliced" => Sliced,
            "open" => Open,
            "toggled_on" => ToggledOn,
            "soaked" => Soaked,
            "dusty" => Dusty,
            "stained" => Stained,
            "onfloor" => OnFloor,
            "inroom" => InRoom,
            "ontop" => OnTop,
            "inside" => Inside,
            "under" => Under,
            "nextto" => NextTo,
            _ => return None,
        })
    }

    fn unary(self, state: &SceneState, o: &ObjectInstance) -> bool {
        let c = &state.config;
        let e = &o.ext;
        match self {
            Grounded::Cooked => e.temperature_max >= o.thresholds.cook,
            Grounded::Burnt => e.temperature_max >= o.thresholds.burn,
            Grounded::Frozen => e.temperature <= o.thresholds.freeze,
            Grounded::Sliced => e.sliced,
            Grounded::Open => e.open,
            Grounded::ToggledOn => e.toggled_on,
            Grounded::Soaked => e.wetness >= c.soaked_cutoff,
            Grounded::Dusty => e.dust_level >= c.dusty_cutoff,
            Grounded::Stained => e.stain_level >= c.stained_cutoff,
            Grounded::OnFloor => state.on_floor.contains(&o.id),
            _ => unreachable!("binary predicate evaluated as unary"),
        }
    }

    fn binary(self, state: &SceneState, a: &ObjectInstance, b: &ObjectInstance) -> bool {
        match self {
            Grounded::OnTop => state.support.get(&a.id) == Some(&b.id),
            Grounded::Inside => state.containers(&a.id).any(|c| *c == b.id),
            Grounded::Under => under(state, a, b),
            Grounded::NextTo => nextto(state, a, b),
            _ => unreachable!("unary predicate evaluated as binary"),
        }
    }
}

/// `a` lies below `b`'s footprint and is not resting on `b`.
fn under(state: &SceneState, a: &ObjectInstance, b: &ObjectInstance) -> bool {
    a.id != b.id
        && horizontal_distance(a.position(), b.position()) <= b.bounding_radius
        && a.position()[2] < b.position()[2]
        && !state.ancestors(&a.id).any(|p| *p == b.id)
}

fn nextto(state: &SceneState, a: &ObjectInstance, b: &ObjectInstance) -> bool {
    let scale = state.config.nextto_scale;
    a.id != b.id
        && horizontal_distance(a.position(), b.position())
            <= scale * a.bounding_radius + scale * b.bounding_radius
}

fn signature<'d>(
    domain: &'d DomainDefinition,
    formula: &AtomicFormula,
) -> Result<(&'d PredicateSignature, Grounded), WorldError> {
    let sig = domain
        .predicate(formula.predicate.as_str())
        .ok_or_else(|| WorldError::UnknownPredicate(formula.predicate.to_string()))?;
    let grounded = Grounded::lookup(sig.symbol.as_str())
        .ok_or_else(|| WorldError::NoGrounding(sig.symbol.to_string()))?;
    if formula.args.len() != sig.arity() {
        return Err(WorldError::ArityMismatch(formula.to_string()));
    }
    Ok((sig, grounded))
}

/// Truth value of a ground atomic formula in `state`.
///
/// Applying a predicate to an object whose category lacks the required
/// property is an error, not `false`.
pub fn eval_atomic(
    state: &SceneState,
    formula: &AtomicFormula,
    taxonomy: &Taxonomy,
    domain: &DomainDefinition,
) -> Result<bool, WorldError> {
    let (sig, grounded) = signature(domain, formula)?;
    let mut objects = Vec::with_capacity(2);
    let mut room = None;
    for (arg, kind) in formula.args.iter().zip(&sig.params) {
        match (arg, kind) {
            (Term::Constant(c), ParamKind::Object(_)) => {
                let id = state.resolve_constant(c)?;
                objects.push(state.object(id)?);
            }
            (Term::Room(r), ParamKind::Room) => room = Some(r),
            (Term::Variable(_), _) => return Err(WorldError::NotGround(formula.to_string())),
            _ => return Err(WorldError::ArityMismatch(formula.to_string())),
        }
    }
    let cats: Vec<Option<&CategoryName>> = sig
        .params
        .iter()
        .scan(objects.iter(), |objs, kind| {
            Some(match kind {
                ParamKind::Object(_) => objs.next().map(|o| &o.category),
                ParamKind::Room => None,
            })
        })
        .collect();
    if !taxonomy.applicable_to_args(sig, &cats)? {
        return Err(WorldError::Inapplicable {
            predicate: sig.symbol.to_string(),
            formula: formula.to_string(),
        });
    }
    Ok(match (grounded, objects.as_slice(), room) {
        (Grounded::InRoom, [o], Some(r)) => state
            .rooms
            .get(r)
            .ok_or_else(|| WorldError::UnknownRoom(r.to_string()))?
            .contains(o.position()),
        (g, [o], None) => g.unary(state, o),
        (g, [a, b], None) => g.binary(state, a, b),
        _ => return Err(WorldError::ArityMismatch(formula.to_string())),
    })
}

/// All true ground facts over the activity's constants and applicable predicates.
pub fn logical_snapshot(
    state: &SceneState,
    def: &ActivityDefinition,
    taxonomy: &Taxonomy,
    domain: &DomainDefinition,
) -> Result<FactSet, WorldError> {
    snapshot_over(state, &def.objects, taxonomy, domain)
}

/// [`logical_snapshot`] over an explicit constant universe.
///
/// Binary relations are enumerated from the placement graphs rather than by
/// testing every argument pair, which keeps large scenes cheap.
pub fn snapshot_over(
    state: &SceneState,
    universe: &[(ConstantName, CategoryName)],
    taxonomy: &Taxonomy,
    domain: &DomainDefinition,
) -> Result<FactSet, WorldError> {
    let mut objs: Vec<(&ConstantName, &ObjectInstance)> = Vec::with_capacity(universe.len());
    for (c, _) in universe {
        let id = state.resolve_constant(c)?;
        objs.push((c, state.object(id)?));
    }
    let mut index: HashMap<&ObjectId, Vec<usize>> = HashMap::new();
    for (i, (_, o)) in objs.iter().enumerate() {
        index.entry(&o.id).or_default().push(i);
    }
    let props: Vec<_> = objs
        .iter()
        .map(|(_, o)| taxonomy.properties(&o.category))
        .collect::<Result<_, _>>()?;
    let gate_ok = |kind: &ParamKind, i: usize| match kind {
        ParamKind::Object(Some(p)) => props[i].contains(p),
        _ => true,
    };
    let term = |i: usize| Term::Constant(objs[i].0.clone());

    let mut facts = FactSet::new();
    for sig in &domain.predicates {
        let grounded = Grounded::lookup(sig.symbol.as_str())
            .ok_or_else(|| WorldError::NoGrounding(sig.symbol.to_string()))?;
        let name = sig.symbol.as_str();
        let mut push = |args: Vec<Term>| {
            facts.insert(AtomicFormula::new(name, args));
        };
        match (grounded, sig.params.as_slice()) {
            (Grounded::InRoom, [k, ParamKind::Room]) => {
                for (room, region) in &state.rooms {
                    for (i, (_, o)) in objs.iter().enumerate() {
                        if gate_ok(k, i) && region.contains(o.position()) {
                            push(vec![term(i), Term::Room(room.clone())]);
                        }
                    }
                }
            }
            (_, [k]) => {
                for (i, (_, o)) in objs.iter().enumerate() {
                    if gate_ok(k, i) && grounded.unary(state, o) {
                        push(vec![term(i)]);
                    }
                }
            }
            (Grounded::OnTop, [ka, kb]) => {
                for (i, (_, o)) in objs.iter().enumerate() {
                    let Some(js) = state.support.get(&o.id).and_then(|s| index.get(s)) else {
                        continue;
                    };
                    for &j in js {
                        if gate_ok(ka, i) && gate_ok(kb, j) {
                            push(vec![term(i), term(j)]);
                        }
                    }
                }
            }
            (Grounded::Inside, [ka, kb]) => {
                for (i, (_, o)) in objs.iter().enumerate() {
                    for container in state.containers(&o.id) {
                        for &j in index.get(container).into_iter().flatten() {
                            if gate_ok(ka, i) && gate_ok(kb, j) {
                                push(vec![term(i), term(j)]);
                            }
                        }
                    }
                }
            }
            (Grounded::Under | Grounded::NextTo, [ka, kb]) => {
                for (i, (_, a)) in objs.iter().enumerate() {
                    for (j, (_, b)) in objs.iter().enumerate() {
                        if i != j && gate_ok(ka, i) && gate_ok(kb, j) && grounded.binary(state, a, b) {
                            push(vec![term(i), term(j)]);
                        }
                    }
                }
            }
            _ => return Err(WorldError::NoGrounding(sig.symbol.to_string())),
        }
    }
    Ok(facts)
}
