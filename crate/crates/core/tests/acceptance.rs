//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{
    brute_force_collection, fixture, fixtures_dir, graph_from, normalized_set, poly, polys,
    random_two_factor, CHAIN3_P8_HEXADS, CHAIN3_P8_MONOMIALS, CHAIN3_P8_TETRADS, CHAIN3_QUARTIC,
    CHAIN4_QUINTIC, HEXADS_P7, OVERLAP3_QUINTIC,
};
use fct_core::algebra::is_groebner_basis;
use fct_core::dimension::{
    bounds_report, max_valid_collection, max_zuta_collection, model_dimension, upper_bound,
    zero_pattern_bound, LowerStatus,
};
use fct_core::invariants::{
    chain_generators, glued_hypergraph, initial_ideal_check, one_factor_groebner,
    one_factor_groebner_with, toric_generators, two_factor_groebner, two_factor_split,
    GeneratorSet, OneFactorSplit,
};
use fct_core::oracle::{
    in_span, reduction_evidence, vanishing_basis_detailed, verify_vanishes, VanishingBasisRequest,
};
use fct_core::{FactorGraph, Polynomial, TieBreak, Variable, ZutaLabeling};
use rand::{Rng, SeedableRng};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn labeling(order: &[usize], witness: &[usize]) -> ZutaLabeling {
    ZutaLabeling {
        latent_order: order.iter().map(|h| h - 1).collect(),
        witness: witness.iter().map(|v| v - 1).collect(),
    }
}

fn generator_polys(gens: &[fct_core::invariants::Generator]) -> Vec<Polynomial> {
    gens.iter().map(|g| g.poly.clone()).collect()
}

fn same_set(got: &[Polynomial], want: &[&str]) -> bool {
    normalized_set(got) == normalized_set(&polys(want))
}

/// Covariances that are not structurally zero.
fn nonzero_support(g: &FactorGraph) -> Vec<Variable> {
    g.all_pairs()
        .into_iter()
        .filter(|&(u, v)| !g.joint_parents(u, v).is_empty())
        .map(|(u, v)| Variable::sigma(u, v))
        .collect()
}

fn all_fixtures() -> Vec<(String, FactorGraph)> {
    let mut names: Vec<String> = std::fs::read_dir(fixtures_dir())
        .expect("fixtures directory")
        .filter_map(|e| {
            e.ok()?
                .file_name()
                .to_str()?
                .strip_suffix(".json")
                .map(str::to_owned)
        })
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|n| (n.clone(), fixture(&n)))
        .collect()
}

/// Shared-children count for two-latent fixtures.
fn overlap(g: &FactorGraph) -> Option<usize> {
    two_factor_split(g).ok().map(|(_, _, j)| j.len())
}

fn dimensions() -> Outcome {
    let start = Instant::now();
    for (name, want) in [
        ("la_districts", 12),
        ("two_factor_p7", 16),
        ("three_factor_p5", 12),
        ("three_factor_p6", 15),
        ("three_factor_p6_defective", 17),
        ("two_factor_p4", 9),
        ("five_factor_p9", 35),
    ] {
        let got = model_dimension(&fixture(name), 3, 0);
        ensure!(got == want, "{name}: dimension {got}, want {want}");
    }
    ensure!(
        start.elapsed() < Duration::from_secs(5),
        "took {:?}",
        start.elapsed()
    );
    Ok(())
}

fn bounds() -> Outcome {
    let g = fixture("three_factor_p6");
    let (c, sum) = max_valid_collection(&g);
    c.check(&g)?;
    ensure!(
        sum == 9 && upper_bound(&g) == 15,
        "three_factor_p6: sum {sum}, upper {}",
        upper_bound(&g)
    );
    let z = zero_pattern_bound(&fixture("three_factor_p5"));
    ensure!(z == 12, "three_factor_p5 zero-pattern bound {z}");

    let f = fixture("five_factor_p9");
    let (_, displayed) = max_zuta_collection(&f, &labeling(&[1, 2, 3, 4, 5], &[1, 2, 3, 4, 5]))
        .map_err(|e| e.to_string())?;
    ensure!(displayed <= 23, "displayed labeling gives {displayed}");
    let (_, moved) = max_zuta_collection(&f, &labeling(&[1, 2, 3, 4, 5], &[1, 2, 3, 4, 7]))
        .map_err(|e| e.to_string())?;
    ensure!(moved == 24, "relabeled witness gives {moved}");
    let r = bounds_report(&f, 10_000);
    let exact = model_dimension(&f, 3, 0);
    ensure!(
        r.lower == Some(33) && r.lower_status == LowerStatus::Exhaustive,
        "lower {:?} {:?}",
        r.lower,
        r.lower_status
    );
    ensure!(33 < exact, "exact {exact}");
    Ok(())
}

fn generators() -> Outcome {
    let la = two_factor_groebner(&fixture("la_districts")).map_err(|e| e.to_string())?;
    let want =
        r#"{"monomials":["s_1_2","s_2_3"],"tetrads":["s_1_5*s_3_4 - s_1_4*s_3_5"],"hexads":[]}"#;
    ensure!(la.to_json() == want, "la_districts: {}", la.to_json());

    let p7 = two_factor_groebner(&fixture("two_factor_p7")).map_err(|e| e.to_string())?;
    let mono = ["s_1_6", "s_1_7", "s_2_6", "s_2_7", "s_3_6", "s_3_7"];
    ensure!(
        same_set(&generator_polys(&p7.monomials), &mono),
        "two_factor_p7 monomials differ"
    );
    ensure!(
        same_set(&generator_polys(&p7.hexads), &HEXADS_P7),
        "two_factor_p7 hexads differ"
    );

    let one = one_factor_groebner(
        &OneFactorSplit::new(&[0, 1, 2, 3, 4], &[5, 6]).map_err(|e| e.to_string())?,
    );
    ensure!(
        (one.monomials.len(), one.tetrads.len()) == (11, 10),
        "one-factor counts {} {}",
        one.monomials.len(),
        one.tetrads.len()
    );

    let chain = chain_generators(&fixture("chain3_p8")).map_err(|e| e.to_string())?;
    ensure!(
        same_set(&generator_polys(&chain.monomials), &CHAIN3_P8_MONOMIALS),
        "chain monomials differ"
    );
    ensure!(
        same_set(&generator_polys(&chain.tetrads), &CHAIN3_P8_TETRADS),
        "chain tetrads differ"
    );
    ensure!(
        same_set(&generator_polys(&chain.hexads), &CHAIN3_P8_HEXADS),
        "chain hexads differ"
    );
    Ok(())
}

fn is_gb(set: &GeneratorSet) -> bool {
    is_groebner_basis(&set.polynomials(), &set.order)
}

fn groebner() -> Outcome {
    let start = Instant::now();
    for p in 1..=7usize {
        for mask in 1u32..1 << p {
            let a: Vec<usize> = (0..p).filter(|&i| mask >> i & 1 == 1).collect();
            if a.len() > 6 {
                continue;
            }
            let split = OneFactorSplit::complement_of(&a, p).map_err(|e| e.to_string())?;
            for tie in [TieBreak::Natural, TieBreak::Reversed] {
                ensure!(
                    is_gb(&one_factor_groebner_with(&split, tie)),
                    "one-factor A={a:?} p={p} {tie:?}"
                );
            }
        }
    }
    for name in ["la_districts", "two_factor_p7"] {
        ensure!(
            is_gb(&two_factor_groebner(&fixture(name)).map_err(|e| e.to_string())?),
            "{name}"
        );
    }
    for seed in 0..50u64 {
        let p = 4 + (seed as usize % 4);
        let g = random_two_factor(p, 2, seed);
        ensure!(
            is_gb(&two_factor_groebner(&g).map_err(|e| e.to_string())?),
            "random seed {seed}: {}",
            g.to_json()
        );
    }
    ensure!(
        start.elapsed() < Duration::from_secs(60),
        "took {:?}",
        start.elapsed()
    );
    Ok(())
}

fn initial_ideals() -> Outcome {
    let mut checked = 0;
    for (name, g) in all_fixtures() {
        if overlap(&g) != Some(2) {
            continue;
        }
        let set = two_factor_groebner(&g).map_err(|e| e.to_string())?;
        let h = glued_hypergraph(&g).map_err(|e| e.to_string())?;
        ensure!(
            initial_ideal_check(&set, &h, &set.order).map_err(|e| e.to_string())?,
            "{name}"
        );
        checked += 1;
    }
    ensure!(checked >= 4, "only {checked} overlap-two fixtures");
    let h = glued_hypergraph(&fixture("two_factor_p7")).map_err(|e| e.to_string())?;
    ensure!(
        h.edges3.len() == 3 && h.isolated.len() == 6,
        "{} size-3 edges, {} isolated",
        h.edges3.len(),
        h.isolated.len()
    );
    ensure!(
        !h.vertices.contains(&(3, 5)) && !h.vertices.contains(&(4, 6)),
        "46 or 57 is a vertex"
    );
    Ok(())
}

fn printed_polynomials() -> Outcome {
    for (text, name) in [
        (OVERLAP3_QUINTIC, "two_factor_p7_overlap456"),
        (CHAIN3_QUARTIC, "chain3_p9"),
        (CHAIN4_QUINTIC, "chain4_p12"),
    ] {
        ensure!(
            verify_vanishes(&poly(text), &fixture(name)).map_err(|e| e.to_string())?,
            "{name}: {text}"
        );
    }
    Ok(())
}

fn oracle_equivalence() -> Outcome {
    let mut checked = 0;
    for (name, g) in all_fixtures() {
        if !matches!(overlap(&g), Some(k) if k <= 2) || g.p() > 6 {
            continue;
        }
        let set = two_factor_groebner(&g).map_err(|e| e.to_string())?;
        let r = reduction_evidence(&set, &VanishingBasisRequest::new(&g, 3))
            .map_err(|e| e.to_string())?;
        ensure!(r.certified > 0 && r.all_reduce(), "{name}: {r:?}");
        checked += 1;
    }
    ensure!(checked >= 3, "only {checked} small fixtures");

    let stated = fixture("two_factor_p7_overlap3");
    let req = VanishingBasisRequest::new(&stated, 5)
        .homogeneous_only(true)
        .support(nonzero_support(&stated));
    let r = reduction_evidence(&toric_generators(&stated), &req).map_err(|e| e.to_string())?;
    ensure!(
        r.reduced_to_zero < r.certified,
        "two_factor_p7_overlap3: {r:?}"
    );

    let g = fixture("two_factor_p7_overlap456");
    let f = poly(OVERLAP3_QUINTIC);
    let req = VanishingBasisRequest::new(&g, 5)
        .homogeneous_only(true)
        .support(f.variables().into_iter().collect());
    let r = reduction_evidence(&toric_generators(&g), &req).map_err(|e| e.to_string())?;
    ensure!(
        r.reduced_to_zero < r.certified,
        "two_factor_p7_overlap456: {r:?}"
    );
    Ok(())
}

fn flow_vs_brute_force() -> Outcome {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    for i in 0..500 {
        let p = rng.random_range(1..=5usize);
        let m = rng.random_range(1..=3usize);
        let inc: Vec<Vec<bool>> = (0..m)
            .map(|_| (0..p).map(|_| rng.random_bool(0.5)).collect())
            .collect();
        let g = graph_from(p, &inc);
        let (flow, brute) = (max_valid_collection(&g).1, brute_force_collection(&g));
        ensure!(
            flow == brute,
            "instance {i}: flow {flow}, brute force {brute}: {}",
            g.to_json()
        );
    }
    Ok(())
}

fn pentads() -> Outcome {
    let g = fixture("full_two_factor_p5");
    let b = vanishing_basis_detailed(&VanishingBasisRequest::new(&g, 5).homogeneous_only(true))
        .map_err(|e| e.to_string())?;
    ensure!(
        !b.polynomials.is_empty() && b.certified == b.polynomials.len(),
        "full_two_factor_p5: {} found, {} certified",
        b.found,
        b.certified
    );

    let g = fixture("two_factor_p7_overlap456");
    let f = poly(OVERLAP3_QUINTIC);
    let req = VanishingBasisRequest::new(&g, 5)
        .homogeneous_only(true)
        .support(f.variables().into_iter().collect());
    let b = vanishing_basis_detailed(&req).map_err(|e| e.to_string())?;
    ensure!(
        in_span(&f, &b.polynomials),
        "quintic outside the certified degree-five space"
    );
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("dimension exactness", dimensions),
        ("bound reproduction", bounds),
        ("generator reproduction", generators),
        ("groebner certification", groebner),
        ("initial-ideal correspondence", initial_ideals),
        ("printed polynomials vanish", printed_polynomials),
        ("oracle equivalence", oracle_equivalence),
        ("flow vs brute force", flow_vs_brute_force),
        ("pentad discovery", pentads),
    ];
    let mut failed = 0;
    for (i, (desc, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {} PASS {desc} [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {desc} [{secs:.2}s]: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
