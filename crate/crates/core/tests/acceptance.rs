use std::process::ExitCode;
use std::time::{Duration, Instant};

use dyadic_walsh::counterexample::{verify_counterexample, GrowthSchedule, IndexSequence, VerifyConfig};
use dyadic_walsh::dyadic::{DyadicElement, DyadicPoint, Tail};
use dyadic_walsh::harness::{
    corollary_equivalence, kernel_equivalence, lemma1_grid, lemma4_grid, plane_inclusions, quasimeasure_suite,
    recursion_check, tk_grid, uset_falsify, vanishing_check, Constraints, IdentityReport, Lemma1Grid, TkGrid,
};
use dyadic_walsh::partition::Partition;
use dyadic_walsh::rational::int;
use dyadic_walsh::sets::{coset, rasterize, IndexRule, Membership, SetSpec, Slice};
use sha2::{Digest, Sha256};

type Outcome = Result<Vec<String>, String>;

fn report(r: IdentityReport) -> Outcome {
    let line = format!("{} checks, {} mismatches", r.total_checks, r.total_mismatches);
    if r.passed {
        Ok(vec![line])
    } else {
        Err(format!("{line}; first: {:?}", r.first_mismatch()))
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<T: std::fmt::Debug>(x: T) -> String {
    format!("{x:?}")
}

fn ac1() -> Outcome {
    report(kernel_equivalence(256, 8).map_err(e)?)
}

fn ac2() -> Outcome {
    report(recursion_check(6, 7).map_err(e)?)
}

fn ac3() -> Outcome {
    let r = vanishing_check(128, 8).map_err(e)?;
    let note = r.notes.join("; ");
    let mut out = report(r)?;
    out.push(note);
    Ok(out)
}

fn ac4() -> Outcome {
    report(quasimeasure_suite(100, 2, 6, 4, 0).map_err(e)?)
}

fn ac5() -> Outcome {
    report(lemma1_grid(&Lemma1Grid::default()).map_err(e)?)
}

fn ac6() -> Outcome {
    let r = tk_grid(&TkGrid::default()).map_err(e)?;
    let notes = r.notes.join("; ");
    let mut out = report(r)?;
    if !notes.is_empty() {
        out.push(notes);
    }
    Ok(out)
}

fn ac7() -> Outcome {
    report(lemma4_grid(100, 0).map_err(e)?)
}

fn ac8() -> Outcome {
    let idx = IndexSequence::default_instance(4).map_err(e)?;
    let sched = GrowthSchedule::default_schedule(4);
    let r = verify_counterexample(&idx, &sched, &VerifyConfig::default()).map_err(e)?;
    ensure(r.rank == 10 && r.n_max == 256 && r.origin_rank == 8, "configuration")?;
    ensure(r.windows.iter().all(|w| w.origin_zero), "origin identity failed")?;
    ensure(r.windows.iter().all(|w| w.formula_matches), "window formula failed")?;
    let onset = r.stabilization.e0_measured_onset;
    ensure(onset > 3, format!("onset for e_0 at {onset}"))?;
    let ratios: Vec<_> = r.growth.iter().map(|g| g.ratio.clone()).collect();
    ensure(ratios == vec![int(1), int(2), int(3), int(4)], format!("growth {ratios:?}"))?;
    ensure(r.passed, "report failed")?;
    Ok(vec![format!("onset for e_0 at N = {onset}; growth 1, 2, 3, 4")])
}

fn ac9() -> Outcome {
    let mut out = report(plane_inclusions(3, 4, 16, 100_000, 0).map_err(e)?)?;
    out.extend(report(corollary_equivalence(&[1, 2, 3], 8).map_err(e)?)?);
    Ok(out)
}

fn ac10() -> Outcome {
    let none = Constraints::default();
    let mut out = Vec::new();
    for k in 1..=5 {
        let p = uset_falsify(&SetSpec::empty(2), k, &none).map_err(e)?;
        ensure(p.dimension == 0, format!("empty set at K = {k}: {}", p.dimension))?;
        let p = uset_falsify(&SetSpec::whole(2), k, &none).map_err(e)?;
        ensure(p.dimension == 1 << (2 * k), format!("whole group at K = {k}: {}", p.dimension))?;
        let failures = p.verify_basis().map_err(e)?;
        ensure(failures.is_empty(), failures.join("; "))?;
    }
    let sets = [
        ("D_0", SetSpec::diagonal(Partition::full(2))),
        ("anti-diagonal", SetSpec::anti_diagonal()),
        (
            "WD(2^i 1)",
            SetSpec::dirichlet(2, IndexRule::DiagonalPowers { first: 0 }, 5).map_err(e)?,
        ),
        ("whole", SetSpec::whole(2)),
    ];
    for (name, set) in &sets {
        for k in 1..=5u32 {
            let mut chain = vec![Constraints { support: false, ..none.clone() }, none.clone()];
            for top in 0..k {
                chain.push(Constraints {
                    rademacher_up_to: Some(top),
                    ..none.clone()
                });
            }
            let last = chain.last().expect("nonempty").clone();
            chain.push(Constraints {
                walsh: [1u64, 2, 3].into_iter().filter(|n| 64 - n.leading_zeros() <= k).collect(),
                walsh_cube_rank: 1,
                ..last
            });
            let mut dims = Vec::new();
            for c in &chain {
                let p = uset_falsify(set, k, c).map_err(e)?;
                let failures = p.verify_basis().map_err(e)?;
                ensure(failures.is_empty(), format!("{name}, K = {k}: {}", failures.join("; ")))?;
                dims.push(p.dimension);
            }
            ensure(
                dims.windows(2).all(|w| w[1] <= w[0]),
                format!("{name}, K = {k}: dimensions {dims:?}"),
            )?;
            if k == 5 {
                out.push(format!("{name} at K = 5: dimensions {dims:?}"));
            }
        }
    }
    Ok(out)
}

fn half() -> DyadicElement {
    DyadicElement::from_interval(1, 1, Tail::Zeros)
}

const GOLDEN: [(&str, &str); 4] = [
    ("D_0", "7b0630eab6a4c8a26986ad9e61be432063e6c5e6548a13108367398828b84104"),
    ("anti-diagonal", "a7b9b68b6beae8e1806236cdada48e97b9cd0c98f287e6dc6afab85ec51b4cd0"),
    ("Q_{0,(0,1)}", "b1225d64c7369df25623cef15ce493327c685ba77c1538d19fa8ee25e0377745"),
    ("P_1 coset", "2cf4f68833810a10cc6a9ccf2eeb636bdc970b1a1b82568149dce7269a496f82"),
];

fn figures() -> Result<Vec<(SetSpec, usize)>, String> {
    let p1 = coset(
        &SetSpec::coordinate_plane(Partition::new(2, &[1]).map_err(e)?),
        &DyadicPoint::new(vec![half(), DyadicElement::zero(1)]).map_err(e)?,
    )
    .map_err(e)?;
    Ok(vec![
        (SetSpec::diagonal(Partition::full(2)), 64),
        (SetSpec::anti_diagonal(), 64),
        (SetSpec::shifted_diagonal(Partition::full(2), vec![0, 1]).map_err(e)?, 128),
        (p1, 64),
    ])
}

fn hashes(threads: usize) -> Result<Vec<String>, String> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(e)?;
    pool.install(|| {
        let mut out = Vec::new();
        for (i, (set, cells)) in figures()?.into_iter().enumerate() {
            let bm = rasterize(&set, 6, &Slice::default_for(2)).map_err(e)?;
            ensure(
                bm.count(Membership::In) == cells,
                format!("{}: {} cells", GOLDEN[i].0, bm.count(Membership::In)),
            )?;
            out.push(format!("{:x}", Sha256::digest(bm.to_pgm(1))));
        }
        Ok(out)
    })
}

fn ac11() -> Outcome {
    let base = hashes(1)?;
    for t in [2, 4, 8] {
        ensure(hashes(t)? == base, format!("hashes differ with {t} threads"))?;
    }
    ensure(hashes(1)? == base, "hashes differ between runs")?;
    let wrong: Vec<String> = GOLDEN
        .iter()
        .zip(&base)
        .filter(|((_, want), got)| want != got)
        .map(|((name, want), got)| format!("{name}: golden {want}, got {got}"))
        .collect();
    ensure(wrong.is_empty(), wrong.join("; "))?;
    Ok(GOLDEN.iter().zip(&base).map(|((name, _), got)| format!("{name} {got}")).collect())
}

type Criterion = (&'static str, &'static str, u64, fn() -> Outcome);

const CRITERIA: [Criterion; 11] = [
    ("AC1", "kernel equivalence, N <= 256, rank 8", 10, ac1),
    ("AC2", "Dirichlet recursion, k <= 6, rank 7", 10, ac2),
    ("AC3", "vanishing region, N <= 128, rank 8", 10, ac3),
    ("AC4", "quasimeasure additivity and round trip", 30, ac4),
    ("AC5", "shifted-sum identity, full grid", 60, ac5),
    ("AC6", "T_k decomposition, full grid", 60, ac6),
    ("AC7", "Walsh integrals on Dirichlet supports, 100 instances", 30, ac7),
    ("AC8", "counterexample series, default instance", 60, ac8),
    ("AC9", "plane inclusions and shifted Dirichlet sets", 30, ac9),
    ("AC10", "falsifier sanity, d = 2, K <= 5", 60, ac10),
    ("AC11", "rendering determinism", 60, ac11),
];

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, name, limit, run) in CRITERIA {
        if !filter.is_empty() && !filter.iter().any(|f| id == f || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let slow = took > Duration::from_secs(limit);
        let (verdict, lines) = match (&result, slow) {
            (Ok(lines), false) => ("PASS", lines.clone()),
            (Ok(lines), true) => {
                let mut l = lines.clone();
                l.push(format!("over the {limit} s limit"));
                ("FAIL", l)
            }
            (Err(msg), _) => ("FAIL", vec![msg.clone()]),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("{verdict} {id} {name} ({:.2} s)", took.as_secs_f64());
        for l in lines {
            println!("    {l}");
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
