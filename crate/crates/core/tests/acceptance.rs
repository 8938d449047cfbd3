//! Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use cforge_core::algebra::{
    centralizer_orbit_count, counting_identity_checks, is_single_class_product, product_support,
    structure_constants_row,
};
use cforge_core::arith::{gcd, is_power_of, p_part};
use cforge_core::cache::Store;
use cforge_core::chartab::CharTable;
use cforge_core::classes::ClassTable;
use cforge_core::ffmat::Field;
use cforge_core::verify::{self, Verdict, WitnessKind};
use cforge_core::zoo::{self, make_group, special_element, GroupMeta, GroupSpec};

type Outcome = Result<String, String>;

fn spec(s: &str) -> GroupSpec {
    GroupSpec::parse(s).expect("valid spec")
}

fn group(s: &str) -> Result<GroupMeta, String> {
    make_group(&spec(s)).map_err(|e| format!("{s}: {e}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(ctx: &str) -> impl FnOnce(E) -> String + '_ {
    move |err| format!("{ctx}: {err}")
}

fn sym(n: usize) -> String {
    format!(r#"{{"family":"Sym","n":{n}}}"#)
}
fn alt(n: usize) -> String {
    format!(r#"{{"family":"Alt","n":{n}}}"#)
}
fn lie(family: &str, d: usize, q: u32) -> String {
    format!(r#"{{"family":"{family}","d":{d},"q":{q}}}"#)
}

const M11: &str = r#"{"family":"Explicit","name":"M11"}"#;
const M12: &str = r#"{"family":"Explicit","name":"M12"}"#;

fn character_tables(store: &Store) -> Outcome {
    let mut specs: Vec<String> = (3..=7).map(sym).chain((4..=7).map(alt)).collect();
    for (f, d, q) in [("PSL", 2, 7), ("PSL", 2, 8), ("PSL", 2, 11), ("PSL", 3, 3), ("PSU", 3, 3), ("PSp", 4, 3)] {
        specs.push(lie(f, d, q));
    }
    specs.push(M11.into());
    for s in &specs {
        let meta = group(s)?;
        let ct = store.chartab(&meta).map_err(e(s))?;
        ct.validate().map_err(e(s))?;
        let order = meta.order();
        let sum: u128 = ct.degrees().iter().map(|&d| (d as u128).pow(2)).sum();
        ensure(sum == order, || format!("{s}: sum of squared degrees {sum} != {order}"))?;
        ensure(ct.degrees().iter().all(|&d| order % d as u128 == 0), || format!("{s}: degree does not divide |G|"))?;
        ensure(ct.len() == ct.classes().len(), || format!("{s}: table is not square"))?;
    }
    Ok(format!("{} groups, both orthogonality relations modulo two primes", specs.len()))
}

fn arad_herzog(store: &Store) -> Outcome {
    let mut specs: Vec<String> = (5..=8).map(alt).collect();
    for q in [7, 8, 11, 13] {
        specs.push(lie("PSL", 2, q));
    }
    specs.extend([lie("PSL", 3, 3), lie("PSU", 3, 3), lie("PSp", 4, 3), M11.into()]);
    let mut pairs = 0;
    for s in &specs {
        let meta = group(s)?;
        let r = verify::verify_arad_herzog(&meta, store).map_err(e(s))?;
        ensure(r.verdict == Verdict::Holds, || format!("{s}: {:?}", r.witnesses))?;
        ensure(r.summary["min_support"].as_u64() >= Some(2), || format!("{s}: min support below 2"))?;
        // a single-class product would give a factorization, so the
        // centralizer check must hold as well
        let sz = verify::verify_szep(&meta, store).map_err(e(s))?;
        ensure(sz.verdict == Verdict::Holds, || format!("{s}: centralizer factorization found"))?;
        pairs += r.cases.len();
    }
    Ok(format!("{} groups, {pairs} class pairs, all supports >= 2", specs.len()))
}

fn counterexamples(store: &Store) -> Outcome {
    // A4: two classes of 3-elements with a single-class product
    let a4 = group(&alt(4))?;
    let r = verify::verify_arad_herzog(&a4, store).map_err(e("A4"))?;
    let t = store.classes(&a4).map_err(e("A4"))?;
    ensure(r.verdict == Verdict::Fails, || "A4 did not fail".into())?;
    let w = r
        .witnesses
        .iter()
        .find(|w| w.classes[..2].iter().all(|&c| t.element_order(c) == 3))
        .ok_or("A4: no witness made of 3-element classes")?;
    ensure(w.reverify(&a4).map_err(e("A4"))?, || "A4 witness does not re-verify".into())?;

    // A5 wr C2: a factorization G = C(a)C(b) with a^G b^G = (ab)^G
    let wr = group(r#"{"family":"Wreath","inner":{"family":"Alt","n":5},"m":2}"#)?;
    let r = verify::verify_szep(&wr, store).map_err(e("wreath"))?;
    ensure(r.verdict == Verdict::Fails, || "wreath product has no factorization".into())?;
    let w = &r.witnesses[0];
    ensure(w.kind == WitnessKind::Factorization && w.reverify(&wr).map_err(e("wreath"))?, || {
        "wreath factorization witness does not re-verify".into()
    })?;
    let tw = store.classes(&wr).map_err(e("wreath"))?;
    let (single, _) = is_single_class_product(&tw, w.classes[0], w.classes[1]).map_err(e("wreath"))?;
    ensure(single, || "factorizing pair does not multiply to one class".into())?;

    // GL_2(4) with the graph automorphism τ: G = C(τ)C(x), x = diag(ω, 1)
    let gl = group(r#"{"family":"AutExt","base":{"family":"GL","d":2,"q":4},"aut":"graph"}"#)?;
    let tau = special_element(&gl, "graph-involution-class-rep").map_err(e("graph"))?;
    let x = special_element(&gl, "pseudoreflection-image").map_err(e("graph"))?;
    let f = cforge_core::algebra::szep_factorization(&gl.group, &tau, &x).map_err(e("graph"))?;
    ensure(f.factors, || format!("|C(τ)C(x)| = {} != {}", f.product_size, gl.order()))?;
    let tg = store.classes(&gl).map_err(e("graph"))?;
    let (it, ix) = (tg.identify_class(&tau).unwrap(), tg.identify_class(&x).unwrap());
    let s = product_support(&tg, it, ix).map_err(e("graph"))?;
    ensure(s.len() == 1 && s.entries[0].0 == tg.identify_class(&(&tau * &x)).unwrap(), || {
        "τ^G x^G is not (τx)^G".into()
    })?;
    let r = verify::verify_szep(&gl, store).map_err(e("graph"))?;
    ensure(r.verdict == Verdict::Fails && r.reverify_witnesses(&gl).map_err(e("graph"))?, || {
        "graph extension factorization not reported".into()
    })?;
    Ok("A4, A5 wr C2 and GL_2(4)<τ> reproduce with re-verified witnesses".into())
}

fn fixed_points(store: &Store, pairs: &[(String, String)]) -> Outcome {
    let mut n = 0;
    for (g, h) in pairs {
        let gm = group(g)?;
        let hm = group(h)?;
        let r = verify::verify_fixed_point_nonconstancy(&gm, &hm, store).map_err(e(g))?;
        ensure(r.verdict == Verdict::Holds, || format!("{h} in {g}: {:?}", r.witnesses))?;
        n += r.cases.len();
    }
    Ok(format!("{} groups, {n} class pairs", pairs.len()))
}

fn trace_sets() -> Outcome {
    let mut checked = 0;
    for (p, k) in [(5, 1), (7, 1), (3, 2)] {
        let f = Field::new(p, k).map_err(e("field"))?;
        let q = f.order() as usize;
        let noncentral: Vec<u32> = f.elements().filter(|&x| x != 0 && f.mul(x, x) != 1).collect();
        for &x in &noncentral {
            for &y in &noncentral {
                let n = zoo::sl2_trace_set(&f, x, y).map_err(e("traces"))?.len();
                ensure(n == q, || format!("SL_2({q}), diag({x}), diag({y}): {n} traces"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("q = 5, 7, 9: {checked} split semisimple pairs, each with q traces"))
}

fn steinberg(store: &Store) -> Outcome {
    for s in [lie("PSL", 2, 7), lie("PSL", 2, 11), lie("PSL", 3, 3), lie("PSp", 4, 3)] {
        let meta = group(&s)?;
        let p = meta.characteristic as u64;
        let r = verify::verify_steinberg_nonconstancy(&meta, store).map_err(e(&s))?;
        ensure(r.verdict == Verdict::Holds, || format!("{s}: {:?}", r.witnesses))?;
        // the value pattern, recomputed here independently
        let ct = store.chartab(&meta).map_err(e(&s))?;
        let t = ct.classes();
        let st = ct.steinberg_character(p).map_err(e(&s))?;
        let ev = ct.evaluator();
        for i in 0..t.len() {
            let v = ev.to_integer(ev.num(ct.value(st, i))).map_err(e(&s))?;
            let ok = if t.element_order(i) % p == 0 {
                v == 0
            } else {
                v.unsigned_abs() == p_part(t.centralizer_order(i), p as u128)
            };
            ensure(ok, || format!("{s}: St = {v} on class {i}"))?;
        }
    }
    Ok("PSL_2(7), PSL_2(11), PSL_3(3), PSp_4(3)".into())
}

fn simple_lie_zoo() -> Vec<String> {
    let mut v: Vec<String> = [(2, 7), (2, 8), (2, 11), (2, 13), (3, 2), (3, 3), (4, 2)]
        .iter()
        .map(|&(d, q)| lie("PSL", d, q))
        .collect();
    v.extend([
        lie("PSU", 3, 3),
        lie("PSp", 4, 3),
        r#"{"family":"Derived","inner":{"family":"Sp","d":4,"q":2}}"#.into(),
    ]);
    v
}

fn unipotent(store: &Store) -> Outcome {
    let sp = group(&lie("Sp", 4, 2))?;
    let t = store.classes(&sp).map_err(e("Sp4(2)"))?;
    let i = t.identify_class(&special_element(&sp, "transvection").unwrap()).unwrap();
    let j = t.identify_class(&special_element(&sp, "a2-involution").unwrap()).unwrap();
    let s = product_support(&t, i, j).map_err(e("Sp4(2)"))?;
    let orders: BTreeSet<u64> = s.classes().iter().map(|&k| t.element_order(k)).collect();
    ensure(orders.iter().all(|&o| is_power_of(o as u128, 2)), || format!("orders {orders:?}"))?;
    ensure(orders.contains(&2) && orders.contains(&4), || format!("orders {orders:?}"))?;
    ensure(s.len() >= 2, || "single class".into())?;
    let r = verify::verify_unipotent_products(&sp, store).map_err(e("Sp4(2)"))?;
    ensure(r.verdict == Verdict::ExceptionCase && r.summary["exceptions"] == 1, || {
        format!("Sp4(2) verdict {:?}", r.verdict)
    })?;
    ensure(r.reverify_witnesses(&sp).map_err(e("Sp4(2)"))?, || "exception witness".into())?;
    let zoo = simple_lie_zoo();
    for s in &zoo {
        let meta = group(s)?;
        let r = verify::verify_unipotent_products(&meta, store).map_err(e(s))?;
        ensure(r.verdict == Verdict::Holds, || format!("{s}: {:?}", r.verdict))?;
    }
    Ok(format!("support orders {orders:?}; {} simple groups without all-unipotent products", zoo.len()))
}

fn orbit_count() -> Outcome {
    let sp = group(&lie("Sp", 4, 3))?;
    let a = special_element(&sp, "transvection").map_err(e("Sp4(3)"))?;
    let b = special_element(&sp, "hyperbolic-involution").map_err(e("Sp4(3)"))?;
    let dc = centralizer_orbit_count(&sp.group, &a, &b).map_err(e("Sp4(3)"))?;
    ensure(dc.count == 3, || format!("{} orbits", dc.count))?;
    Ok(format!("3 orbits of sizes {:?}", dc.orbit_sizes))
}

fn structure_constants(store: &Store) -> Outcome {
    let mut triples = 0;
    for s in [sym(5), alt(6), lie("PSL", 2, 7)] {
        let meta = group(&s)?;
        let ct: Arc<CharTable> = store.chartab(&meta).map_err(e(&s))?;
        let t: &ClassTable = ct.classes();
        for i in 0..t.len() {
            for j in 0..t.len() {
                let row = structure_constants_row(t, i, j).map_err(e(&s))?;
                for (k, &a) in row.iter().enumerate() {
                    let b = ct.structure_constant(i, j, k).map_err(e(&s))?;
                    ensure(a == b, || format!("{s}: a({i},{j},{k}) counting {a}, characters {b}"))?;
                    triples += 1;
                }
            }
        }
    }
    let checks = counting_identity_checks();
    ensure(checks > 0, || "no counting identity checks recorded".into())?;
    Ok(format!("{triples} triples agree; counting identity held on all {checks} supports computed"))
}

fn bs_curated() -> Vec<String> {
    let mut v: Vec<String> = (4..=8).map(alt).chain((4..=7).map(sym)).collect();
    for (f, d, q) in [
        ("PSL", 2, 7),
        ("PSL", 2, 8),
        ("PSL", 2, 11),
        ("PSL", 2, 13),
        ("PSL", 3, 2),
        ("PSL", 3, 3),
        ("PSL", 4, 2),
        ("PSU", 3, 3),
        ("PSp", 4, 3),
        ("Sp", 4, 2),
        ("PGL", 2, 11),
    ] {
        v.push(lie(f, d, q));
    }
    v.extend([M11.to_string(), M12.to_string()]);
    v.push(r#"{"family":"Wreath","inner":{"family":"Alt","n":5},"m":2}"#.into());
    v.push(r#"{"family":"Wreath","inner":{"family":"PSL","d":2,"q":7},"m":2}"#.into());
    v.push(r#"{"family":"Direct","factors":[{"family":"Alt","n":5},{"family":"Cyclic","n":5}]}"#.into());
    v.push(r#"{"family":"Direct","factors":[{"family":"Alt","n":5},{"family":"Alt","n":5}]}"#.into());
    v.push(r#"{"family":"Direct","factors":[{"family":"PSL","d":2,"q":7},{"family":"Cyclic","n":7}]}"#.into());
    v
}

fn baer_suzuki(store: &Store) -> Outcome {
    let (mut consistent, mut classical) = (0u64, 0u64);
    let list = bs_curated();
    for s in &list {
        let meta = group(s)?;
        ensure(meta.order() <= 100_000, || format!("{s} exceeds the size bound"))?;
        for p in [5, 7] {
            let r = verify::verify_bs_theorem(&meta, store, p).map_err(e(s))?;
            ensure(r.verdict == Verdict::Holds, || format!("{s}, p = {p}: {:?}", r.witnesses))?;
            classical += r.summary["same_class_cases"].as_u64().unwrap_or(0);
            consistent += r.cases.iter().filter(|c| c["status"] == "consistent").count() as u64;
        }
    }
    // dropping the equal-closure hypothesis: A5 wr C2, p = 2
    let wr = group(r#"{"family":"Wreath","inner":{"family":"Alt","n":5},"m":2}"#)?;
    let t = store.classes(&wr).map_err(e("wreath"))?;
    let c = t.identify_class(&special_element(&wr, "wreath-coordinate-involution").unwrap()).unwrap();
    let d = t.identify_class(&special_element(&wr, "wreath-shift").unwrap()).unwrap();
    let scan = verify::bs_pair_scan(&wr.group, &t, &[c], &[d], 2).map_err(e("wreath"))?;
    let hc = wr.group.normal_closure(&[t.rep(c).clone()]).map_err(e("wreath"))?;
    let hd = wr.group.normal_closure(&[t.rep(d).clone()]).map_err(e("wreath"))?;
    ensure(scan.all_p, || "pair condition fails in the wreath product".into())?;
    ensure(hc.order() != hd.order(), || "closures coincide".into())?;
    ensure(!is_power_of(hc.order(), 2), || "closure is a 2-group".into())?;
    Ok(format!(
        "{} groups x p in {{5,7}}: {consistent} closure-equal pairs ({classical} with C = D), no violation; \
         wreath demo closures {} and {}",
        list.len(),
        hc.order(),
        hd.order()
    ))
}

fn bsas(store: &Store) -> Outcome {
    let runs: Vec<(String, Option<u64>)> = vec![
        (sym(5), None),
        (sym(7), None),
        (lie("PGL", 2, 11), None),
        (M11.into(), None),
        (r#"{"family":"AutExt","base":{"family":"PSL","d":2,"q":32},"aut":"field"}"#.into(), Some(5)),
    ];
    let mut pairs = 0;
    for (s, p) in &runs {
        let meta = group(s)?;
        let r = verify::verify_bsas(&meta, store, *p).map_err(e(s))?;
        ensure(r.verdict == Verdict::Holds, || format!("{s}: missing witnesses"))?;
        ensure(!r.cases.is_empty(), || format!("{s}: no order-p classes"))?;
        ensure(r.reverify_witnesses(&meta).map_err(e(s))?, || format!("{s}: witness fails"))?;
        pairs += r.cases.len();
    }
    // the field automorphism itself is among the probed pairs
    let pgl = group(&runs[4].0)?;
    let phi = special_element(&pgl, "field-automorphism").map_err(e("field"))?;
    let pr = verify::bsas_probe(&pgl.group, &phi, &phi, 5).map_err(e("field"))?;
    ensure(pr.nonsolvable.is_some() && pr.non_p_product.is_some(), || "field automorphism pair".into())?;
    Ok(format!("{pairs} class pairs with both witnesses"))
}

/// Least primitive prime divisor by stripping every factor shared with a
/// smaller `q^m - 1` and trial-dividing what is left.
fn zsigmondy_oracle(q: u64, n: u32) -> Option<u64> {
    let q = q as u128;
    let mut rest = q.pow(n) - 1;
    for m in 1..n {
        let old = q.pow(m) - 1;
        loop {
            let g = gcd(rest, old);
            if g == 1 {
                break;
            }
            rest /= g;
        }
    }
    if rest == 1 {
        return None;
    }
    let mut l = 2u128;
    while l * l <= rest {
        if rest % l == 0 {
            return Some(l as u64);
        }
        l += 1;
    }
    Some(rest as u64)
}

fn zsigmondy() -> Outcome {
    let mut absent = Vec::new();
    for q in 2..=16u64 {
        for n in 2..=12u32 {
            let (a, b) = (zoo::zsigmondy(q, n), zsigmondy_oracle(q, n));
            ensure(a == b, || format!("q = {q}, n = {n}: {a:?} vs oracle {b:?}"))?;
            if a.is_none() {
                absent.push((q, n));
            }
        }
    }
    let expected: Vec<(u64, u32)> = std::iter::once((2, 6))
        .chain((2..=16u64).filter(|q| (q + 1).is_power_of_two()).map(|q| (q, 2)))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    ensure(absent == expected, || format!("absent cases {absent:?}"))?;
    Ok(format!("165 cases agree; absent exactly at {absent:?}"))
}

fn main() -> ExitCode {
    let store = Store::memory();
    let s = &store;
    let fix_alt: Vec<(String, String)> = (5..=9).map(|n| (sym(n), alt(n))).collect();
    let fix_lin: Vec<(String, String)> = [(3, 2), (3, 3), (4, 2)]
        .iter()
        .map(|&(d, q)| (lie("PGL", d, q), lie("PSL", d, q)))
        .collect();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("character tables are exact", Box::new(|| character_tables(s))),
        ("no single-class products in simple groups", Box::new(|| arad_herzog(s))),
        ("counterexamples reproduce", Box::new(|| counterexamples(s))),
        ("fixed points vary on products in A_n, n = 5..9", Box::new(|| fixed_points(s, &fix_alt))),
        ("fixed 1-spaces vary on products in PSL_3(2), PSL_3(3), PSL_4(2)", Box::new(|| fixed_points(s, &fix_lin))),
        ("SL_2 trace sets have q elements", Box::new(trace_sets)),
        ("Steinberg pattern and non-constancy", Box::new(|| steinberg(s))),
        ("symplectic unipotent exception", Box::new(|| unipotent(s))),
        ("Sp_4(3) orbit count", Box::new(orbit_count)),
        ("structure constants by counting and by characters", Box::new(|| structure_constants(s))),
        ("Baer-Suzuki pair conditions", Box::new(|| baer_suzuki(s))),
        ("nonsolvable and non-p-product conjugates", Box::new(|| bsas(s))),
        ("Zsigmondy primes", Box::new(zsigmondy)),
    ];
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = f();
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1}s)", n + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} ({secs:.1}s)", n + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
