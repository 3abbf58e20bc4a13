//! Acceptance suite: one pass/fail line per criterion, with time limits.
//! Runs as a plain binary (`harness = false`); exits nonzero on failure.

use std::collections::{BTreeSet, HashMap};
use std::panic;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use quivermps::localization::{
    chi_trees, dd1_brute_force, dd1_family, glue, spanning_trees, Datum,
};
use quivermps::motive::{
    dual_mps_check, motivic_mps_check, poincare, poincare_with, satisfies_poincare_duality,
    HnSolver,
};
use quivermps::quiver::{DimVector, Quiver, Refinement, Stability};
use quivermps::report::{bipartite_report, Method};
use quivermps::symfunc::{e_to_p, p_to_e, q_series_identity, Basis, SymPoly};
use quivermps::tropical::{
    bipartite_setup, refinements, PieceCounting, TropicalCountKey, TropicalCounter,
};
use quivermps::vertex::{apply_product, extract_n_trop, factorize, ks_operators, TruncatedElement};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn compositions(n: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Coprime pairs of compositions with total size at most `max`.
fn coprime_cases(max: u32) -> Vec<(Vec<u32>, Vec<u32>)> {
    let mut out = Vec::new();
    for a in 1..max {
        for b in 1..=(max - a) {
            if a.gcd(&b) != 1 {
                continue;
            }
            for p1 in compositions(a) {
                for p2 in compositions(b) {
                    out.push((p1.clone(), p2));
                }
            }
        }
    }
    out
}

fn ones(n: usize) -> Vec<u32> {
    vec![1; n]
}

fn closed_form_family() -> Outcome {
    let expected = [1, 7, 38, 187];
    let mut lines = Vec::new();
    for (n, &chi) in (1..=4).zip(&expected) {
        let p2 = ones(2 * n + 1);
        let report = bipartite_report(&[2], &p2, &Method::ALL).map_err(|e| e.to_string())?;
        for m in Method::ALL {
            let v = report.value(m);
            ensure(v == Some(&BigInt::from(chi)), || {
                format!("n={n}: {m} gave {v:?}, expected {chi}")
            })?;
        }
        lines.push(chi.to_string());
    }
    Ok(format!(
        "chi = {} by hn, mps, tropical, vertex",
        lines.join(", ")
    ))
}

fn eulgw() -> Outcome {
    let mut trees: HashMap<TropicalCountKey, u64> = HashMap::new();
    let mut counter = TropicalCounter::new();
    let mut checked = 0usize;
    for (p1, p2) in coprime_cases(9) {
        for r in refinements(&p1, &p2).map_err(|e| e.to_string())? {
            let key = TropicalCountKey::of_refinement(&r).map_err(|e| e.to_string())?;
            let t = match trees.get(&key) {
                Some(&t) => t,
                None => {
                    let t = chi_trees(&r).map_err(|e| e.to_string())?;
                    trees.insert(key.clone(), t);
                    t
                }
            };
            let n = counter.count(&key);
            ensure(n == BigInt::from(t), || {
                format!("{r}: n_trop {n} vs trees {t}")
            })?;
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} refinements ({} weight-vector pairs) agree",
        trees.len()
    ))
}

fn worked_multiplicities() -> Outcome {
    let r = Refinement::parse("1+1;1,1,1").map_err(|e| e.to_string())?;
    let key = TropicalCountKey::of_refinement(&r).map_err(|e| e.to_string())?;
    let terms = TropicalCounter::new().breakdown(&key, PieceCounting::Normalized);
    let find = |pieces: &[(u32, u32)]| {
        terms
            .iter()
            .find(|t| t.pieces == pieces)
            .map(|t| t.value.clone())
            .unwrap_or_default()
    };
    let big = find(&[(2, 2)]);
    let small = find(&[(1, 1), (1, 1)]);
    let total: BigInt = terms.iter().map(|t| t.value.clone()).sum();
    ensure(
        big == BigInt::from(4) && small == BigInt::from(2) && total == BigInt::from(6),
        || format!("breakdown {big} + {small} = {total}"),
    )?;
    let all = spanning_trees(&r).map_err(|e| e.to_string())?.len();
    let stable = chi_trees(&r).map_err(|e| e.to_string())?;
    ensure(all == 12 && stable == 6, || {
        format!("{stable} of {all} trees stable")
    })?;
    Ok(format!(
        "{big} (from (2,2)) + {small} (from (1,1),(1,1)) = {total}; {stable} of {all} trees stable"
    ))
}

fn mps_cases() -> Outcome {
    let mut cases: Vec<(String, Quiver, Stability, DimVector, String)> = Vec::new();
    let k1 = Quiver::kronecker(1);
    let k3 = Quiver::kronecker(3);
    let s2 = Stability::new(vec![1, 0], false);
    cases.push((
        "1-Kronecker (2,1) at 1".into(),
        k1,
        s2.clone(),
        DimVector::new(vec![2, 1]),
        "1".into(),
    ));
    for v in ["1", "2"] {
        cases.push((
            format!("3-Kronecker (2,3) at {v}"),
            k3.clone(),
            s2.clone(),
            DimVector::new(vec![2, 3]),
            v.into(),
        ));
    }
    let k23 = Quiver::complete_bipartite(2, 3);
    let s23 = Stability::new(vec![1, 1, 0, 0, 0], false);
    for v in 0..k23.vertex_count() {
        let id = k23.id(v).to_string();
        cases.push((
            format!("K(2,3) ones at {id}"),
            k23.clone(),
            s23.clone(),
            DimVector::ones(5),
            id,
        ));
    }
    let mut slowest = Duration::ZERO;
    for (name, q, s, d, v) in &cases {
        let start = Instant::now();
        let i = v.as_str().into();
        let ok = motivic_mps_check(q, s, &i, d).map_err(|e| format!("{name}: {e}"))?
            && dual_mps_check(q, s, &i, d).map_err(|e| format!("{name}: {e}"))?;
        let took = start.elapsed();
        ensure(ok, || format!("{name}: identity fails"))?;
        ensure(took < Duration::from_secs(30), || {
            format!("{name}: {took:?} exceeds 30 s")
        })?;
        slowest = slowest.max(took);
    }
    Ok(format!(
        "{} cases, both identities, slowest {:.2?}",
        cases.len(),
        slowest
    ))
}

fn symmetric_functions() -> Outcome {
    for n in 1..=8 {
        let (l, r) = q_series_identity(n).map_err(|e| e.to_string())?;
        ensure(l == r, || format!("q-identity fails at n={n}"))?;
    }
    for n in 1..=10 {
        let p = SymPoly::generator(Basis::PowerSum, n);
        let e = SymPoly::generator(Basis::Elementary, n);
        let back_p = p_to_e(n)
            .and_then(|x| x.to_power_sums())
            .map_err(|e| e.to_string())?;
        let back_e = e_to_p(n)
            .and_then(|x| x.to_elementary())
            .map_err(|e| e.to_string())?;
        ensure(back_p == p && back_e == e, || {
            format!("base changes not inverse at n={n}")
        })?;
    }
    Ok("q-identity for n <= 8; e/p base changes inverse for n <= 10".into())
}

fn vertex_oracle() -> Outcome {
    // Pentagon.
    let r = Refinement::parse("1;1").map_err(|e| e.to_string())?;
    let ops = ks_operators(&r).map_err(|e| e.to_string())?;
    let fact = factorize(&ops).map_err(|e| e.to_string())?;
    let dirs: Vec<(i64, i64)> = fact.walls.iter().map(|w| w.direction()).collect();
    let middle = fact.wall((1, 1)).map(|w| w.function().to_string());
    ensure(
        dirs == [(0, 1), (1, 1), (1, 0)]
            && middle.as_deref() == Some("1 + 1·u[j1[1:1]]·v[i1[1:1]]·x^1·y^1"),
        || format!("pentagon walls {dirs:?}, middle {middle:?}"),
    )?;
    let mut done: BTreeSet<TropicalCountKey> = BTreeSet::new();
    let mut counter = TropicalCounter::new();
    let mut walls = 0usize;
    for (p1, p2) in coprime_cases(8) {
        for r in refinements(&p1, &p2).map_err(|e| e.to_string())? {
            let key = TropicalCountKey::of_refinement(&r).map_err(|e| e.to_string())?;
            if !done.insert(key.clone()) {
                continue;
            }
            let ops = ks_operators(&r).map_err(|e| e.to_string())?;
            let fact = factorize(&ops).map_err(|e| format!("{r}: {e}"))?;
            let alg = ops[0].function().algebra().clone();
            for e in [TruncatedElement::x(&alg), TruncatedElement::y(&alg)] {
                let lhs = fact.recompose(&e).map_err(|e| e.to_string())?;
                let rhs = apply_product(&ops, &e).map_err(|e| e.to_string())?;
                ensure(lhs == rhs, || format!("{r}: recomposition differs"))?;
            }
            let n = extract_n_trop(&fact, &r).map_err(|e| format!("{r}: {e}"))?;
            let expected = counter.count(&key);
            ensure(n == expected, || {
                format!("{r}: vertex {n} vs n_trop {expected}")
            })?;
            walls += fact.walls.len();
        }
    }
    Ok(format!(
        "pentagon ok; {} weight-vector pairs recompose exactly and match n_trop ({walls} walls)",
        done.len()
    ))
}

fn dd1_family_check() -> Outcome {
    let mut summary = Vec::new();
    for d in 1..=3usize {
        let fam = dd1_family(d).map_err(|e| e.to_string())?;
        let brute = dd1_brute_force(d).map_err(|e| e.to_string())?;
        let mut union = BTreeSet::new();
        let mut total = 0usize;
        for dec in &fam {
            let factor = dec.block_factor();
            for group in &dec.groups {
                ensure(group.len() == factor, || {
                    format!("d={d}: group of {} data, expected {factor}", group.len())
                })?;
                for datum in group {
                    ensure(is_glue_subdatum(datum), || {
                        format!("d={d}: datum not inside its glueing")
                    })?;
                    union.insert(datum.arrow_ids());
                }
                total += group.len();
            }
        }
        ensure(union == brute, || {
            format!(
                "d={d}: construction gives {} data, brute force {}",
                union.len(),
                brute.len()
            )
        })?;
        ensure(total == union.len(), || {
            format!("d={d}: {total} data with repeats")
        })?;
        summary.push(format!("d={d}: {}", union.len()));
    }
    Ok(format!(
        "construction = stable trees ({})",
        summary.join(", ")
    ))
}

/// Deleting the glueing sink splits the datum into components; glueing
/// them back (ordered by slope) must contain every arrow of the datum.
fn is_glue_subdatum(datum: &Datum) -> bool {
    let records = datum.vertex_records();
    let sink = records.iter().rev().find(|r| !r.2).map(|r| r.0.clone());
    let Some(sink) = sink else { return false };
    let arrows: Vec<_> = datum
        .arrow_ids()
        .into_iter()
        .filter(|(_, b)| *b != sink)
        .collect();
    // Connected components of the remaining vertices.
    let others: Vec<_> = records.iter().filter(|r| r.0 != sink).cloned().collect();
    let mut comp: Vec<usize> = (0..others.len()).collect();
    let pos =
        |id: &quivermps::quiver::VertexId| others.iter().position(|r| &r.0 == id).expect("vertex");
    for (a, b) in &arrows {
        let (ca, cb) = (comp[pos(a)], comp[pos(b)]);
        for c in comp.iter_mut() {
            if *c == cb {
                *c = ca;
            }
        }
    }
    let labels: BTreeSet<usize> = comp.iter().copied().collect();
    let mut components = Vec::new();
    for l in labels {
        let verts: Vec<_> = others
            .iter()
            .zip(&comp)
            .filter(|(_, &c)| c == l)
            .map(|(r, _)| r.clone())
            .collect();
        let ids: BTreeSet<_> = verts.iter().map(|r| r.0.clone()).collect();
        let arr: Vec<_> = arrows
            .iter()
            .filter(|(a, _)| ids.contains(a))
            .cloned()
            .collect();
        match Datum::from_ids(&verts, &arr) {
            Ok(c) => components.push(c),
            Err(_) => return false,
        }
    }
    components.sort_by(|a, b| {
        let (da, ea) = a.dim_type();
        let (db, eb) = b.dim_type();
        (ea as u64 * db as u64).cmp(&(eb as u64 * da as u64))
    });
    match glue(&components, sink, 1) {
        Ok(g) => {
            let glued: BTreeSet<_> = g.glued.arrow_ids().into_iter().collect();
            datum.arrow_ids().iter().all(|a| glued.contains(a))
        }
        Err(_) => false,
    }
}

fn poincare_checks() -> Outcome {
    let k3 = Quiver::kronecker(3);
    let s = Stability::new(vec![1, 0], false);
    let p = poincare(&k3, &s, &DimVector::new(vec![1, 1])).map_err(|e| e.to_string())?;
    let expected = vec![1, 0, 1, 0, 1];
    ensure(p.to_i64_vec() == Some(expected.clone()), || {
        format!("3-Kronecker (1,1): {p:?}")
    })?;
    let mut cases = coprime_cases(9);
    for n in 1..=4 {
        cases.push((vec![2], ones(2 * n + 1)));
    }
    let mut solvers: HashMap<(usize, usize), (Quiver, Stability)> = HashMap::new();
    let mut checked = 0;
    for (p1, p2) in &cases {
        let (q, s, _) = bipartite_setup(p1, p2);
        solvers.entry((p1.len(), p2.len())).or_insert((q, s));
    }
    let mut by_shape: HashMap<(usize, usize), Vec<(Vec<u32>, Vec<u32>)>> = HashMap::new();
    for (p1, p2) in cases {
        by_shape
            .entry((p1.len(), p2.len()))
            .or_default()
            .push((p1, p2));
    }
    let mut shapes: Vec<_> = by_shape.keys().copied().collect();
    shapes.sort();
    for shape in shapes {
        let (q, s) = &solvers[&shape];
        let mut solver = HnSolver::new(q, s).map_err(|e| e.to_string())?;
        for (p1, p2) in &by_shape[&shape] {
            let (_, _, d) = bipartite_setup(p1, p2);
            let p = poincare_with(&mut solver, &d).map_err(|e| format!("{p1:?} {p2:?}: {e}"))?;
            ensure(satisfies_poincare_duality(q, &p, &d), || {
                format!("{p1:?} {p2:?}: duality fails")
            })?;
            checked += 1;
        }
    }
    Ok(format!(
        "3-Kronecker (1,1) = 1 + t^2 + t^4; duality on {checked} cases"
    ))
}

fn negative_control() -> Outcome {
    let key = TropicalCountKey::of_refinement(
        &Refinement::parse("1+1;1,1,1").map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let mut c = TropicalCounter::new();
    let mut sum = |mode| -> BigInt { c.breakdown(&key, mode).into_iter().map(|t| t.value).sum() };
    let ordered = sum(PieceCounting::Ordered);
    let normalized = sum(PieceCounting::Normalized);
    ensure(
        ordered == BigInt::from(8) && normalized == BigInt::from(6),
        || format!("ordered {ordered}, normalized {normalized}"),
    )?;
    Ok(format!(
        "without repeated-piece normalization ((1,1),(1,1,1)) = {ordered} != {normalized}"
    ))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "closed-form family chi(2,1^(2n+1))",
            limit: Some(Duration::from_secs(60)),
            run: closed_form_family,
        },
        Criterion {
            id: 2,
            name: "tropical counts = stable tree counts, |P| <= 9",
            limit: Some(Duration::from_secs(120)),
            run: eulgw,
        },
        Criterion {
            id: 3,
            name: "worked multiplicities ((1,1),(1,1,1))",
            limit: None,
            run: worked_multiplicities,
        },
        Criterion {
            id: 4,
            name: "multiple-cover and dual identities",
            limit: None,
            run: mps_cases,
        },
        Criterion {
            id: 5,
            name: "symmetric function identities",
            limit: None,
            run: symmetric_functions,
        },
        Criterion {
            id: 6,
            name: "vertex group factorization oracle, |P| <= 8",
            limit: None,
            run: vertex_oracle,
        },
        Criterion {
            id: 7,
            name: "(d,d+1) construction vs brute force, d <= 3",
            limit: None,
            run: dd1_family_check,
        },
        Criterion {
            id: 8,
            name: "Poincare polynomial and duality",
            limit: None,
            run: poincare_checks,
        },
        Criterion {
            id: 9,
            name: "negative control: unnormalized recursion",
            limit: None,
            run: negative_control,
        },
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(c.run).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let result = match (result, c.limit) {
            (Ok(_), Some(limit)) if took > limit => {
                Err(format!("took {took:.2?}, limit {limit:?}"))
            }
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("[PASS] {}. {}: {} ({:.2?})", c.id, c.name, detail, took),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {}. {}: {} ({:.2?})", c.id, c.name, why, took);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
