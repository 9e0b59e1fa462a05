//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pfl_core::bryant::{
    characteristic_by_brackets, characteristic_by_forms, characteristic_distribution, corank_one_b,
    decide_corank_one_involutive, engel_rank_le_one, engel_relations_check, first_derived, structure_functions,
};
use pfl_core::contact::{
    canonical_contact_system, classify_contact, classify_pfaffian, generate_kumpera_ruiz, kr_family, kr_reduce,
    mobius_is_diffeo, remix, ClassificationStatus, ClassificationVerdict, LetterKind, MobiusMap, ProlongationLetter,
    ProlongationWord,
};
use pfl_core::exterior::{annihilator, lie_bracket, pushforward, Chart, Distribution, JetSpec, VectorField};
use pfl_core::poly::linalg::{rank, RatMatrix};
use pfl_core::poly::rational::rat;
use pfl_core::poly::{Polynomial, Rational, RationalPoint};
use pfl_core::sample::{
    engel_corpus, random_admissible_remix, random_invertible, random_rational, random_triangular_diffeo, random_word,
    remix_generators,
};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn origin(s: JetSpec) -> RationalPoint {
    RationalPoint::origin(s.dim())
}

/// Specs `(n, m)` with `n ≥ 1` and `(n + 1) m + 1 ≤ 13`.
fn grid() -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for m in 1..=12 {
        for n in 1..=12 {
            if (n + 1) * m < 13 {
                out.push((n, m));
            }
        }
    }
    out
}

fn expected_ranks(n: usize, m: usize) -> Vec<usize> {
    (0..=n).map(|i| (i + 1) * m + 1).collect()
}

fn criterion_1() -> Outcome {
    let mut slowest = Duration::ZERO;
    let cases = grid();
    for &(n, m) in &cases {
        let s = JetSpec::new(n, m).unwrap();
        let t = Instant::now();
        let v = classify_contact(&canonical_contact_system(s).unwrap(), &origin(s)).map_err(|e| e.to_string())?;
        let dt = t.elapsed();
        slowest = slowest.max(dt);
        check(v.status == ClassificationStatus::CanonicalEquivalent, format!("({n},{m}) status {:?}", v.status))?;
        check(v.derived_ranks == expected_ranks(n, m), format!("({n},{m}) derived {:?}", v.derived_ranks))?;
        check(v.derived_ranks_at_base == expected_ranks(n, m), format!("({n},{m}) derived at 0 {:?}", v.derived_ranks_at_base))?;
        check(v.lie_ranks_at_base == expected_ranks(n, m), format!("({n},{m}) Lie at 0 {:?}", v.lie_ranks_at_base))?;
        check(dt < Duration::from_secs(30), format!("({n},{m}) took {dt:?}"))?;
    }
    Ok(format!("{} specs canonical with ranks (i+1)m+1, slowest {:.2?}", cases.len(), slowest))
}

fn criterion_2() -> Outcome {
    let cases: Vec<_> = grid().into_iter().filter(|&(_, m)| m != 2).collect();
    for &(n, m) in &cases {
        let s = JetSpec::new(n, m).unwrap();
        let o = origin(s);
        let i = annihilator(&canonical_contact_system(s).unwrap(), &o).unwrap().system;
        let v = classify_pfaffian(&i, &o).map_err(|e| e.to_string())?;
        let derived: Vec<usize> = (0..=n).map(|k| (n - k) * m).collect();
        let cartan: Vec<usize> = (0..n).map(|k| (n + 1 - k) * m + 1).collect();
        check(v.status == ClassificationStatus::CanonicalEquivalent, format!("({n},{m}) status {:?}", v.status))?;
        check(v.derived_ranks == derived, format!("({n},{m}) derived {:?} want {derived:?}", v.derived_ranks))?;
        check(v.cartan_ranks.as_ref() == Some(&cartan), format!("({n},{m}) Cartan {:?} want {cartan:?}", v.cartan_ranks))?;
    }
    Ok(format!("{} specs with m != 2: derived (n-i)m, Cartan (n+1-i)m+1", cases.len()))
}

/// Lie flag ranks at a point by expanding every bracket without pruning.
fn brute_lie_ranks(d: &Distribution, at: &[Rational], levels: usize) -> Vec<usize> {
    let base = d.generators().to_vec();
    let mut current = base.clone();
    let mut all = base.clone();
    let rank_of = |fs: &[VectorField]| {
        let rows: RatMatrix = fs.iter().map(|f| f.evaluate(at).unwrap()).collect();
        rank(&rows)
    };
    let mut out = vec![rank_of(&all)];
    for _ in 0..levels {
        let mut next = Vec::new();
        for g in &base {
            for h in &current {
                let b = lie_bracket(g, h).unwrap();
                if !b.is_zero() {
                    next.push(b);
                }
            }
        }
        all.extend(next.iter().cloned());
        current = next;
        out.push(rank_of(&all));
    }
    out
}

fn criterion_3() -> Outcome {
    let s = JetSpec::new(2, 2).unwrap();
    let w = ProlongationWord::new(s, vec![ProlongationLetter::parse("S(0,0)").unwrap()]).unwrap();
    let d = generate_kumpera_ruiz(&w).unwrap();
    let oracle = brute_lie_ranks(&d, origin(s).coords(), 2);
    check(oracle == vec![3, 5, 6], format!("oracle Lie ranks at 0 {oracle:?}"))?;
    let v = classify_contact(&d, &origin(s)).map_err(|e| e.to_string())?;
    check(v.status == ClassificationStatus::ExtendedKr, format!("status at 0 {:?}", v.status))?;
    check(v.lie_ranks_at_base == oracle, format!("Lie ranks {:?} vs oracle {oracle:?}", v.lie_ranks_at_base))?;
    let top = s.index(2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut sampled = 0;
    while sampled < 6 {
        let p: Vec<Rational> = (0..s.dim()).map(|_| random_rational(&mut rng, 5)).collect();
        if p[top].is_zero() {
            continue;
        }
        let o = brute_lie_ranks(&d, &p, 2);
        check(o == vec![3, 5, 7], format!("oracle at {p:?} gives {o:?}"))?;
        let v = classify_contact(&d, &RationalPoint(p.clone())).map_err(|e| e.to_string())?;
        check(v.status == ClassificationStatus::CanonicalEquivalent, format!("status {:?} at a point with x_2^2 != 0", v.status))?;
        sampled += 1;
    }
    Ok(format!("Lie ranks at 0 {:?} (6 < 7 at level 2), extended_kr; canonical at {sampled} sampled points", oracle))
}

fn corpus() -> Vec<pfl_core::sample::CorpusInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    engel_corpus(&mut rng, 120).unwrap()
}

fn criterion_4(corpus: &[pfl_core::sample::CorpusInstance]) -> Outcome {
    let (mut compared, mut ones) = (0, 0);
    for (k, inst) in corpus.iter().enumerate() {
        let d1 = first_derived(&inst.distribution, &inst.base).unwrap();
        let sf = match structure_functions(&inst.distribution, &d1, &inst.base) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let ann = annihilator(&inst.distribution, &inst.base).unwrap().system;
        let by_forms = match engel_rank_le_one(&ann) {
            Ok(b) => b,
            Err(_) => continue,
        };
        let by_relations = engel_relations_check(&sf);
        check(by_forms == by_relations, format!("instance {k}: forms {by_forms}, relations {by_relations}"))?;
        compared += 1;
        ones += by_forms as usize;
    }
    check(compared >= 100, format!("only {compared} instances met both preconditions"))?;
    Ok(format!("{compared} instances agree ({ones} Engel rank <= 1, {} > 1)", compared - ones))
}

fn criterion_5(corpus: &[pfl_core::sample::CorpusInstance]) -> Outcome {
    let mut compared = 0;
    for (k, inst) in corpus.iter().enumerate() {
        let d = &inst.distribution;
        let a = characteristic_by_forms(d, &inst.base).map_err(|e| format!("instance {k}: {e}"))?;
        let b = characteristic_by_brackets(d, &inst.base).map_err(|e| format!("instance {k}: {e}"))?;
        check(a.same_span(&b), format!("instance {k}: spans differ ({} vs {})", a.generic_rank(), b.generic_rank()))?;
        for h in a.generators() {
            for f in d.generators() {
                check(d.contains(&lie_bracket(h, f).unwrap()), format!("instance {k}: [h, f] leaves D"))?;
            }
        }
        compared += 1;
    }
    check(compared >= 100, format!("only {compared} instances"))?;
    Ok(format!("{compared} instances span-identical"))
}

fn criterion_6(corpus: &[pfl_core::sample::CorpusInstance]) -> Outcome {
    let (mut r3, mut r2, mut pairs) = (0, 0, 0);
    for (k, inst) in corpus.iter().enumerate() {
        if inst.r0 < 2 {
            continue;
        }
        let cb = match corank_one_b(&inst.distribution, &inst.base) {
            Ok(cb) => cb,
            Err(_) => continue,
        };
        if inst.r0 >= 3 {
            check(cb.b.is_involutive(), format!("instance {k}: r0 = {} but B not involutive", inst.r0))?;
            r3 += 1;
        } else {
            r2 += 1;
        }
        for i in 0..cb.pieces.len() {
            for j in i + 1..cb.pieces.len() {
                let s = cb.pair_sum(i, j).unwrap();
                check(s.same_span(&cb.b), format!("instance {k}: W({i}) + W({j}) differs from B"))?;
                pairs += 1;
            }
        }
    }
    check(r3 > 0 && r2 > 0, format!("corpus too thin: {r3} with r0 >= 3, {r2} with r0 = 2"))?;
    Ok(format!("{r3} instances with r0 >= 3 involutive, {pairs} two-term sums equal B ({r2} with r0 = 2)"))
}

fn kr_words(spec: JetSpec, rng: &mut ChaCha8Rng) -> Vec<ProlongationWord> {
    let k = spec.n - 1;
    let mut out = Vec::new();
    for mask in 0..(1u32 << k) {
        let letters = (0..k)
            .map(|i| {
                let kind = if mask >> i & 1 == 1 { LetterKind::S } else { LetterKind::R };
                ProlongationLetter::new(kind, vec![Rational::zero(); spec.m]).unwrap()
            })
            .collect();
        out.push(ProlongationWord::new(spec, letters).unwrap());
    }
    for _ in 0..2 {
        out.push(random_word(rng, spec, 3));
    }
    out
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut count = 0;
    for (n, m) in grid().into_iter().filter(|&(n, m)| m >= 2 && n >= 2) {
        let s = JetSpec::new(n, m).unwrap();
        let o = origin(s);
        for w in kr_words(s, &mut rng) {
            let tag = format!("({n},{m}) {:?}", w.letters.iter().map(|l| l.to_string()).collect::<Vec<_>>());
            let d = generate_kumpera_ruiz(&w).unwrap();
            let d1 = first_derived(&d, &o).unwrap();
            let v0 = decide_corank_one_involutive(&d, &o).map_err(|e| format!("{tag}: {e}"))?;
            let v1 = decide_corank_one_involutive(&d1, &o).map_err(|e| format!("{tag}: {e}"))?;
            let l0 = v0.l_witness.ok_or(format!("{tag}: no L0"))?;
            let l1 = v1.l_witness.ok_or(format!("{tag}: no L1"))?;
            let c0 = v0.characteristic;
            let c1 = characteristic_distribution(&d1, &o).map_err(|e| format!("{tag}: {e}"))?;
            check(l0.includes(&c0), format!("{tag}: C0 not in L0"))?;
            check(l1.includes(&l0), format!("{tag}: L0 not in L1"))?;
            check(c1.includes(&l0), format!("{tag}: L0 not in C1"))?;
            check(c1.same_span(&l0), format!("{tag}: L0 != C1"))?;
            count += 1;
        }
    }
    Ok(format!("{count} instances: C0 in L0, L0 in L1, L0 in C1, L0 = C1"))
}

/// Frame `κ_j^n = ∂/∂x_j^n`, `κ_j^{i-1} = [κ_j^i, κ_0]`, plus `κ_0`.
fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    for (n, m) in grid() {
        let s = JetSpec::new(n, m).unwrap();
        let chart = Chart::jet(s);
        let nv = s.dim();
        let mut drift = vec![Polynomial::zero(nv); nv];
        drift[0] = Polynomial::one(nv);
        for i in 0..n {
            for j in 1..=m {
                let c = random_rational(&mut rng, 5);
                drift[s.index(i, j)] = &Polynomial::var(nv, s.index(i + 1, j)) + &Polynomial::constant(nv, c);
            }
        }
        let k0 = VectorField::new(chart.clone(), drift).unwrap();
        // kappa[i][j - 1] = κ_j^i
        let mut kappa: Vec<Vec<VectorField>> = vec![Vec::new(); n + 1];
        kappa[n] = (1..=m).map(|j| VectorField::coordinate(chart.clone(), s.index(n, j))).collect();
        for i in (1..=n).rev() {
            kappa[i - 1] = kappa[i].iter().map(|f| lie_bracket(f, &k0).unwrap()).collect();
        }
        let mut frame: Vec<(String, VectorField)> = Vec::new();
        for (i, level) in kappa.iter().enumerate() {
            for (j, f) in level.iter().enumerate() {
                frame.push((format!("k{}^{i}", j + 1), f.clone()));
            }
        }
        frame.push(("k0".into(), k0.clone()));
        let at: Vec<Rational> = vec![Rational::zero(); nv];
        let rows: RatMatrix = frame.iter().map(|(_, f)| f.evaluate(&at).unwrap()).collect();
        check(rank(&rows) == nv, format!("({n},{m}) frame has rank {}", rank(&rows)))?;
        for a in 0..frame.len() {
            for b in 0..frame.len() {
                let br = lie_bracket(&frame[a].1, &frame[b].1).unwrap();
                let expect = match (a, b) {
                    (a, b) if b == frame.len() - 1 && a < n * m + m && a >= m => Some(&frame[a - m].1),
                    _ => None,
                };
                let expect_neg = match (a, b) {
                    (a, b) if a == frame.len() - 1 && b < n * m + m && b >= m => Some(&frame[b - m].1),
                    _ => None,
                };
                let ok = match (expect, expect_neg) {
                    (Some(e), _) => &br == e,
                    (_, Some(e)) => br == e.scale(&rat(-1)),
                    _ => br.is_zero(),
                };
                check(ok, format!("({n},{m}) [{}, {}] unexpected", frame[a].0, frame[b].0))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} brackets checked over {} specs; only [k_j^i, k0] = k_j^(i-1) nonzero", grid().len()))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let t = Instant::now();
    let mut done = 0;
    let mut singular = 0;
    while done < 60 {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(2..=4);
        let s = JetSpec::new(n, m).unwrap();
        let w = random_word(&mut rng, s, 5);
        let lambda = random_admissible_remix(&mut rng, m, 5);
        let mixed = remix(&kr_family(&w).unwrap().ordered(), &lambda).unwrap();
        let r = kr_reduce(&mixed, &origin(s)).map_err(|e| format!("{w:?}: {e}"))?;
        check(r.word == w, format!("recovered {:?} from {:?}", r.word, w))?;
        singular += w.has_singular() as usize;
        done += 1;
    }
    let dt = t.elapsed();
    check(dt < Duration::from_secs(600), format!("took {dt:?}"))?;
    Ok(format!("{done} words recovered exactly ({singular} with S letters) in {dt:.2?}"))
}

/// Determinant by cofactor expansion, independent of the elimination code.
fn cofactor_det(m: &RatMatrix) -> Rational {
    if m.len() == 1 {
        return m[0][0].clone();
    }
    let mut acc = Rational::zero();
    for c in 0..m.len() {
        let minor: RatMatrix = m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != c).map(|(_, x)| x.clone()).collect()).collect();
        let term = &m[0][c] * cofactor_det(&minor);
        acc = if c % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut total, mut singular, mut literal) = (0, 0, 0);
    while total < 120 {
        let size = rng.gen_range(2..=4);
        let mut mm: RatMatrix = (0..size).map(|_| (0..size).map(|_| rat(rng.gen_range(-4..=4))).collect()).collect();
        if rng.gen_bool(0.2) {
            let r = mm[0].clone();
            mm[size - 1] = r;
        }
        if mm[size - 1][size - 1].is_zero() {
            continue;
        }
        let det = cofactor_det(&mm);
        let diffeo = mobius_is_diffeo(&mm).map_err(|e| e.to_string())?;
        check(diffeo == !det.is_zero(), format!("{mm:?}: diffeo {diffeo}, det {det}"))?;
        singular += det.is_zero() as usize;
        let map = MobiusMap::new(&mm).unwrap();
        let jac = map.jacobian_at_zero().map_err(|e| e.to_string())?;
        let d2 = &map.d * &map.d;
        let scaled: RatMatrix = jac.iter().map(|r| r.iter().map(|x| x * &d2).collect()).collect();
        let adbc = map.ad_minus_bc();
        check(scaled == adbc, format!("{mm:?}: d^2 phi_*(0) != Ad - bc"))?;
        check(cofactor_det(&scaled) == cofactor_det(&adbc), "determinants differ")?;
        if &cofactor_det(&jac) * &d2 == cofactor_det(&adbc) {
            literal += 1;
        }
        total += 1;
    }
    Ok(format!(
        "{total} matrices ({singular} singular): diffeo iff det != 0; d^2 phi_*(0) = Ad - bc as matrices, so \
         det(d^2 phi_*(0)) = det(Ad - bc); the scalar form det(phi_*(0)) d^2 = det(Ad - bc) holds on {literal}/{total} \
         (it needs d^(2k) for k = dim - 1 > 1, see notes)"
    ))
}

fn comparable(v: &ClassificationVerdict) -> (ClassificationStatus, Vec<usize>, Vec<usize>, Vec<usize>, Vec<bool>, Option<String>) {
    (
        v.status,
        v.derived_ranks.clone(),
        v.derived_ranks_at_base.clone(),
        v.lie_ranks_at_base.clone(),
        v.corank_one_witness_per_level.clone(),
        v.failure_reason.as_ref().map(|r| r.condition.clone()),
    )
}

fn invariance_instances() -> Vec<(String, Distribution, RationalPoint)> {
    let mut out = Vec::new();
    let s22 = JetSpec::new(2, 2).unwrap();
    out.push(("canonical (2,2)".into(), canonical_contact_system(s22).unwrap(), origin(s22)));
    let w = ProlongationWord::parse("S(0,0)", 2).unwrap();
    out.push(("S(0,0) on J^2".into(), generate_kumpera_ruiz(&w).unwrap(), origin(s22)));
    let w = ProlongationWord::parse("R(0),S(0)", 1).unwrap();
    out.push(("R(0),S(0) on J^3(R,R)".into(), generate_kumpera_ruiz(&w).unwrap(), origin(w.spec)));
    let w = ProlongationWord::parse("S(1/2,0),R(0,-1)", 2).unwrap();
    out.push(("S(1/2,0),R(0,-1) on J^3(R,R^2)".into(), generate_kumpera_ruiz(&w).unwrap(), origin(w.spec)));
    let chart = Chart::generic(7);
    let f = |c: &[&str]| VectorField::new(chart.clone(), c.iter().map(|p| Polynomial::parse(p, 7).unwrap()).collect()).unwrap();
    let stuck = Distribution::new(
        chart.clone(),
        vec![f(&["1", "0", "0", "0", "0", "0", "0"]), f(&["0", "1", "0", "x1", "0", "0", "0"]), f(&["0", "0", "1", "0", "x1", "0", "0"])],
    )
    .unwrap();
    out.push(("derived flag stuck at 5".into(), stuck, RationalPoint::origin(7)));
    out
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let instances = invariance_instances();
    let reference: Vec<_> = instances
        .iter()
        .map(|(_, d, p)| classify_contact(d, p).map(|v| comparable(&v)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let statuses: Vec<_> = reference.iter().map(|r| r.0).collect();
    for k in 0..20 {
        let idx = k % instances.len();
        let (name, d, p) = &instances[idx];
        let phi = random_triangular_diffeo(&mut rng, d.chart(), 2, 2).map_err(|e| e.to_string())?;
        let pd = pushforward(d, &phi).map_err(|e| e.to_string())?;
        let pp = phi.map_point(p).map_err(|e| e.to_string())?;
        let v = classify_contact(&pd, &pp).map_err(|e| format!("{name}: {e}"))?;
        check(comparable(&v) == reference[idx], format!("{name}: verdict changed under diffeo {k}"))?;
    }
    for k in 0..8 {
        let idx = k % instances.len();
        let (name, d, p) = &instances[idx];
        let size = d.generators().len();
        let lambda = random_invertible(&mut rng, size, 3);
        let mixed = Distribution::new(d.chart().clone(), remix_generators(d.generators(), &lambda)).unwrap();
        let v = classify_contact(&mixed, p).map_err(|e| format!("{name}: {e}"))?;
        check(comparable(&v) == reference[idx], format!("{name}: verdict changed under remix {k}"))?;
    }
    Ok(format!("20 triangular diffeos and 8 remixes over statuses {statuses:?}: no changes"))
}

fn main() {
    let corpus = corpus();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("canonical rank pattern", Box::new(criterion_1)),
        ("Pfaffian-side agreement", Box::new(criterion_2)),
        ("singular detection", Box::new(criterion_3)),
        ("Engel cross-oracle", Box::new(|| criterion_4(&corpus))),
        ("characteristic cross-oracle", Box::new(|| criterion_5(&corpus))),
        ("corank-one B properties", Box::new(|| criterion_6(&corpus))),
        ("incidence oracles", Box::new(criterion_7)),
        ("structure constants", Box::new(criterion_8)),
        ("reduction round-trip", Box::new(criterion_9)),
        ("Moebius lemma", Box::new(criterion_10)),
        ("invariance", Box::new(criterion_11)),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let dt = t.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{dt:.1?}]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{dt:.1?}]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
