//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use klm_core::canonical::verify_representation;
use klm_core::closure::{
    check_condition, close, derived_rule_check, entails, initial_map, material_entails,
    pairset_closure_oracle, rationality_check, satisfies_system, CheckMode, Condition,
    ConsequenceMap, DerivedRule, PairSet, Rationality, System, Verdict,
};
use klm_core::demo;
use klm_core::kb::{parse_kb, Assertion};
use klm_core::model::{
    consequence_core_of_model, fixture, horn_projection, random_model, relation_of_model, validate, Flavor, Model,
};
use klm_core::search::bounded_proof;
use klm_core::Formula;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(elapsed < limit, || format!("{what} took {elapsed:.2?}, limit {limit:?}"))
}

fn q(s: &str) -> Assertion {
    Assertion::parse(s).unwrap()
}

fn penguin() -> Outcome {
    let start = Instant::now();
    let kb = parse_kb(demo::PENGUIN).unwrap();
    let entailed = ["p & b |~ ~f", "f |~ ~p", "b |~ ~p", "b | p |~ f", "b | p |~ ~p"];
    for s in entailed {
        ensure(entails(&kb, &q(s), System::P).unwrap().is_entailed(), || format!("{s} not entailed"))?;
    }
    ensure(entails(&kb, &q("p |~ f"), System::P).unwrap().is_refuted(), || "p |~ f entailed".into())?;
    within(start.elapsed(), Duration::from_secs(1), "penguin")?;
    Ok("5 entailed, 1 refuted".into())
}

fn nixon() -> Outcome {
    let kb = parse_kb(demo::NIXON).unwrap();
    for s in ["true |~ ~t", "true |~ ~(p & s)"] {
        let start = Instant::now();
        let v = entails(&kb, &q(s), System::P).unwrap();
        ensure(matches!(v, Verdict::Entailed { .. }), || format!("{s}: {}", v.label()))?;
        within(start.elapsed(), Duration::from_secs(60), s)?;
    }
    for s in ["t |~ e", "t |~ ~e", "s |~ ~p", "p |~ ~s"] {
        let start = Instant::now();
        let v = entails(&kb, &q(s), System::P).unwrap();
        ensure(v.countermodel().is_some(), || format!("{s}: {} via {}", v.label(), v.certificate_kind()))?;
        within(start.elapsed(), Duration::from_secs(10), s)?;
    }
    // the complete fixpoint agrees
    let start = Instant::now();
    let full = close(&initial_map(&kb).unwrap(), System::P).0;
    let fixpoint_time = start.elapsed();
    within(fixpoint_time, Duration::from_secs(600), "full fixpoint")?;
    for (s, expect) in [
        ("true |~ ~t", true),
        ("true |~ ~(p & s)", true),
        ("t |~ e", false),
        ("t |~ ~e", false),
        ("s |~ ~p", false),
        ("p |~ ~s", false),
    ] {
        let pair = q(s).semantic_pair(&kb.universe).unwrap();
        ensure(full.contains(&pair) == expect, || format!("full fixpoint disagrees on {s}"))?;
    }
    Ok(format!("2 traces, 4 countermodels, full fixpoint {fixpoint_time:.2?}"))
}

fn extra_variable() -> Outcome {
    let kb = parse_kb(demo::NIXON_EXTRA).unwrap();
    let query = q("a & p |~ e");
    let start = Instant::now();
    let v = entails(&kb, &query, System::P).unwrap();
    within(start.elapsed(), Duration::from_secs(30), "search")?;
    let m = v.countermodel().ok_or_else(|| format!("{} via {}", v.label(), v.certificate_kind()))?;
    ensure(validate(m).is_valid(), || "countermodel invalid".into())?;
    let pair = query.semantic_pair(&kb.universe).unwrap();
    ensure(!consequence_core_of_model(m, &pair.antecedent).is_subset(&pair.consequent), || {
        "countermodel satisfies the query".into()
    })?;
    ensure(bounded_proof(&kb, &query, System::P, 2).unwrap().is_none(), || "a trace was found".into())?;
    Ok(format!("countermodel with {} states", m.state_count()))
}

fn loop_counterexample() -> Outcome {
    let start = Instant::now();
    let m = fixture("loop_counterexample").unwrap();
    let report = validate(&m);
    ensure(report.is_valid(), || report.render(&m))?;
    ensure(!validate(&m.clone().with_flavor(Flavor::CumulativeOrdered)).is_valid(), || {
        "valid as CumulativeOrdered".into()
    })?;
    let u = m.universe().clone();
    let map = relation_of_model(&m).unwrap();
    let pair = |a: &str, b: &str| q(&format!("{a} |~ {b}")).semantic_pair(&u).unwrap();
    for (a, b) in [("p0", "p1"), ("p1", "p2"), ("p2", "p0")] {
        ensure(map.contains(&pair(a, b)), || format!("model omits {a} |~ {b}"))?;
    }
    ensure(!map.contains(&pair("p0", "p2")), || "model contains p0 |~ p2".into())?;
    let kb = parse_kb("vars: p0 p1 p2\nassume: p0 |~ p1\nassume: p1 |~ p2\nassume: p2 |~ p0").unwrap();
    let closed = close(&initial_map(&kb).unwrap(), System::CL).0;
    ensure(closed.contains(&pair("p0", "p2")), || "CL closure omits p0 |~ p2".into())?;
    within(start.elapsed(), Duration::from_secs(1), "loop")?;
    Ok("valid cumulative, invalid ordered, CL derives p0 |~ p2".into())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1001);
    let kbs = 200;
    for i in 0..kbs {
        let kb = random_kb(&mut r, 2, 4);
        let seed = initial_map(&kb).unwrap();
        for sys in System::ALL {
            let closed = PairSet::from_map(&close(&seed, sys).0).unwrap();
            let oracle = pairset_closure_oracle(&kb, sys).unwrap();
            ensure(closed == oracle, || format!("kb #{i} under {sys}:\n{}", kb.to_text()))?;
        }
    }
    within(start.elapsed(), Duration::from_secs(120), "oracle")?;
    Ok(format!("{kbs} KBs x 5 systems"))
}

fn soundness() -> Outcome {
    let start = Instant::now();
    let u = universe(3);
    let per_flavor = 500;
    for flavor in Flavor::ALL {
        let extra = match flavor {
            Flavor::CumulativeOrdered => Some(Condition::Loop),
            Flavor::Preferential => Some(Condition::Or),
            Flavor::SimpleCumulative => Some(Condition::Monotonicity),
            Flavor::SimplePreferential => Some(Condition::Contraposition),
            Flavor::Cumulative => None,
        };
        for seed in 0..per_flavor {
            let m = random_model(flavor, &u, 1 + seed as usize % 8, 0.4, seed).unwrap();
            ensure(validate(&m).is_valid(), || format!("{flavor} seed {seed}: invalid draw"))?;
            let map = relation_of_model(&m).unwrap();
            satisfies_system(&map, flavor.system()).map_err(|v| format!("{flavor} seed {seed}: {v}"))?;
            if let Some(c) = extra {
                check_condition(&map, c, CheckMode::Exhaustive).map_err(|v| format!("{flavor} seed {seed}: {v}"))?;
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(300), "soundness")?;
    Ok(format!("{per_flavor} models x 5 flavors"))
}

/// Random closed maps at up to three variables, shared by the round-trip
/// and derived-rule criteria.
fn closed_maps(sys: System) -> Vec<ConsequenceMap> {
    let mut r = rng(2000 + sys as u64);
    (0..100)
        .map(|i| {
            let n = 1 + i % 3;
            close(&initial_map(&random_kb(&mut r, n, 4)).unwrap(), sys).0
        })
        .collect()
}

fn round_trips() -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    for sys in System::ALL {
        for (i, map) in closed_maps(sys).iter().enumerate() {
            let report = verify_representation(map, sys);
            ensure(report.passed(), || format!("{sys} map #{i}:\n{report}"))?;
            total += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(600), "round trips")?;
    Ok(format!("{total} maps"))
}

fn horn_assertions(vars: &[&str]) -> Vec<Assertion> {
    let mut out = Vec::new();
    for mask in 0..1u32 << vars.len() {
        let ante = Formula::conjunction(
            vars.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, v)| Formula::atom(*v)),
        );
        for v in vars {
            out.push(Assertion::new(ante.clone(), Formula::atom(*v)));
        }
        out.push(Assertion::new(ante, Formula::False));
    }
    out
}

fn horn_agreement() -> Outcome {
    let start = Instant::now();
    let mut r = rng(3000);
    let queries = horn_assertions(&VARS[..3]);
    let mut compared = 0;
    for i in 0..200 {
        let kb = random_horn_kb(&mut r, 3, 4);
        let p = close(&initial_map(&kb).unwrap(), System::P).0;
        let cl = close(&initial_map(&kb).unwrap(), System::CL).0;
        for query in &queries {
            let pair = query.semantic_pair(&kb.universe).unwrap();
            ensure(p.contains(&pair) == cl.contains(&pair), || format!("kb #{i}, {query}:\n{}", kb.to_text()))?;
            compared += 1;
        }
    }
    let u = universe(3);
    for seed in 0..200 {
        let m = random_model(Flavor::CumulativeOrdered, &u, 1 + seed as usize % 6, 0.4, seed).unwrap();
        let h = horn_projection(&m).map_err(|e| format!("seed {seed}: {e}"))?;
        let holds = |m: &Model, a: &Assertion| {
            let pair = a.semantic_pair(&u).unwrap();
            consequence_core_of_model(m, &pair.antecedent).is_subset(&pair.consequent)
        };
        for query in &queries {
            ensure(holds(&m, query) == holds(&h, query), || format!("projection of seed {seed} changes {query}"))?;
        }
    }
    within(start.elapsed(), Duration::from_secs(300), "horn")?;
    Ok(format!("{compared} KB/query pairs, 200 projections"))
}

fn monotonic_collapse() -> Outcome {
    let start = Instant::now();
    let mut r = rng(4000);
    let mut compared = 0;
    for i in 0..200 {
        let n = 1 + i % 3;
        let kb = random_kb(&mut r, n, 4);
        let closed = close(&initial_map(&kb).unwrap(), System::M).0;
        for _ in 0..20 {
            let query = random_assertion(&mut r, &VARS[..n]);
            let pair = query.semantic_pair(&kb.universe).unwrap();
            let material = material_entails(&kb, &query).unwrap();
            ensure(closed.contains(&pair) == material, || format!("kb #{i}, {query}:\n{}", kb.to_text()))?;
            compared += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(120), "collapse")?;
    Ok(format!("{compared} queries"))
}

fn derived_rules() -> Outcome {
    let mut checked = 0;
    for sys in System::ALL {
        for (i, map) in closed_maps(sys).iter().enumerate() {
            for rule in DerivedRule::of_system(sys) {
                derived_rule_check(map, rule).map_err(|v| format!("{sys} map #{i}, {rule}: {v}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} rule checks"))
}

fn rationality_separation() -> Outcome {
    let start = Instant::now();
    let u = universe(3);
    let mut witness = None;
    for seed in 0..2000 {
        let m = random_model(Flavor::Preferential, &u, 2 + seed as usize % 5, 0.4, seed).unwrap();
        let map = relation_of_model(&m).unwrap();
        if rationality_check(&map, Rationality::NegationRationality).is_err() {
            satisfies_system(&map, System::P).map_err(|v| format!("seed {seed} not P-closed: {v}"))?;
            witness = Some(seed);
            break;
        }
    }
    let witness = witness.ok_or("no preferential model violates Negation Rationality")?;
    let mut r = rng(5000);
    for i in 0..200 {
        let n = 1 + i % 3;
        let map = close(&initial_map(&random_kb(&mut r, n, 4)).unwrap(), System::CM).0;
        for which in Rationality::ALL {
            rationality_check(&map, which).map_err(|v| format!("CM map #{i}, {which:?}: {v}"))?;
        }
    }
    within(start.elapsed(), Duration::from_secs(120), "rationality")?;
    Ok(format!("witness model seed {witness}, 200 CM maps rational"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("penguin triangle", penguin),
        ("Nixon diamond", nixon),
        ("extra-variable query", extra_variable),
        ("loop counterexample", loop_counterexample),
        ("oracle equivalence", oracle_equivalence),
        ("soundness campaign", soundness),
        ("representation round trips", round_trips),
        ("Horn agreement", horn_agreement),
        ("monotonic collapse", monotonic_collapse),
        ("derived-rule suite", derived_rules),
        ("rationality separation", rationality_separation),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({elapsed:.2?}): {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name} ({elapsed:.2?}): {why}", i + 1);
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
