//! Acceptance criteria 1-9. Each prints one PASS/FAIL line.
//!
//! Criterion 3 contains a part that cannot hold (see `criterion_3`); that
//! part prints FAIL with the computed facts, and the test asserts those facts
//! instead of the unattainable values.

use std::collections::{HashSet, VecDeque};
use std::io::Write;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use transvect::cayley::{bfs_explore, transvection_length_profile};
use transvect::classify::{
    build_monomial_group, build_symmetric_rep, certify, classical_transvections, classify, classify_section,
    conjugacy_closure, order_formula, verify_certificate, ClassicalKind, ClassifyOptions, GroupTypeTag,
};
use transvect::forms::{detect_invariant_form, recover_quadratic, FormDetection, QuadraticForm, QuadraticOutcome, Twist, WittType};
use transvect::gf::{Elem, Field};
use transvect::group::closure;
use transvect::linalg::{projective_points, Matrix, Subspace, Vector};
use transvect::tgraph::{connect_up, densify, winkle, TransvectionGraph};
use transvect::transvection::Transvection;
use transvect::word::evaluate;

type Outcome = Result<String, String>;

fn gf(p: u64, f: u32) -> Field {
    Field::new(p, f).unwrap()
}

fn random_vector(rng: &mut ChaCha8Rng, f: &Field, n: usize) -> Vector {
    loop {
        let raw: Vec<u32> = (0..n).map(|_| rng.gen_range(0..f.order())).collect();
        let v = Vector::from_raw(f, &raw);
        if !v.is_zero() {
            return v;
        }
    }
}

fn random_transvection(rng: &mut ChaCha8Rng, f: &Field, n: usize) -> Transvection {
    let v = random_vector(rng, f, n);
    loop {
        let phi = random_vector(rng, f, n).to_covector();
        if phi.eval(&v).is_zero() {
            return Transvection::new(v, phi).unwrap();
        }
    }
}

fn random_set(rng: &mut ChaCha8Rng, f: &Field, n: usize, k: usize) -> Vec<Transvection> {
    (0..k).map(|_| random_transvection(rng, f, n)).collect()
}

fn random_invertible(rng: &mut ChaCha8Rng, f: &Field, n: usize) -> Matrix {
    loop {
        let data: Vec<Elem> = (0..n * n).map(|_| Elem(rng.gen_range(0..f.order()))).collect();
        let m = Matrix::from_data(f, n, n, data);
        if !m.det().unwrap().is_zero() {
            return m;
        }
    }
}

/// Exhaustive oracle: some nonzero v generates a proper invariant subspace.
fn reducible_by_search(t: &[Transvection]) -> bool {
    let f = t[0].field().clone();
    let n = t[0].dim();
    projective_points(&f, n).into_iter().any(|v| {
        let mut w = Subspace::span(&f, n, &[v]);
        loop {
            let mut grew = false;
            for b in w.basis() {
                for s in t {
                    let x = s.apply(&b);
                    if !w.contains(&x).unwrap() {
                        w = w.sum(&Subspace::span(&f, n, &[x])).unwrap();
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        !w.is_full()
    })
}

/// Linear-system oracle: dimension of the space of F with tᵀFθ(t) = F for all
/// t (and F alternating when θ = 1).
fn invariant_form_space(t: &[Transvection], twist: Twist) -> usize {
    let f = t[0].field().clone();
    let n = t[0].dim();
    let th = |x: Elem| match twist {
        Twist::Identity => x,
        Twist::Theta => f.involution(x).unwrap(),
    };
    let mut rows: Vec<Vec<Elem>> = Vec::new();
    for s in t {
        let m = s.matrix();
        for i in 0..n {
            for j in 0..n {
                let mut row = vec![Elem::ZERO; n * n];
                for k in 0..n {
                    for l in 0..n {
                        row[k * n + l] = f.mul(m.get(k, i), th(m.get(l, j)));
                    }
                }
                row[i * n + j] = f.sub(row[i * n + j], Elem::ONE);
                rows.push(row);
            }
        }
    }
    if twist == Twist::Identity {
        for k in 0..n {
            let mut row = vec![Elem::ZERO; n * n];
            row[k * n + k] = Elem::ONE;
            rows.push(row);
            for l in k + 1..n {
                let mut row = vec![Elem::ZERO; n * n];
                row[k * n + l] = Elem::ONE;
                row[l * n + k] = Elem::ONE;
                rows.push(row);
            }
        }
    }
    let data: Vec<Elem> = rows.iter().flatten().copied().collect();
    Matrix::from_data(&f, rows.len(), n * n, data).kernel().len()
}

fn order_of(t: &[Transvection], cap: usize) -> usize {
    let mats: Vec<Matrix> = t.iter().map(|x| x.matrix()).collect();
    closure(t[0].field(), t[0].dim(), &mats, cap).unwrap().order()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let configs = [(2, 2, 1), (2, 3, 1), (2, 2, 2), (3, 2, 1), (3, 3, 1), (3, 2, 2), (4, 2, 1)];
    let total = 10_500;
    let mut irreducible = 0;
    for i in 0..total {
        let (n, p, e) = configs[i % configs.len()];
        let f = gf(p, e);
        let k = rng.gen_range(1..=n + 2);
        let t = random_set(&mut rng, &f, n, k);
        let got = TransvectionGraph::new(t.clone()).unwrap().is_irreducible();
        let want = !reducible_by_search(&t);
        if got != want {
            return Err(format!("disagreement on {t:?}: graph says {got}, search says {want}"));
        }
        irreducible += got as usize;
    }
    Ok(format!("{total} random sets agree ({irreducible} irreducible)"))
}

fn criterion_2() -> Outcome {
    let named = [
        ("Sp4(2)", ClassicalKind::Symplectic, gf(2, 1), 4, Twist::Identity),
        ("Sp6(2)", ClassicalKind::Symplectic, gf(2, 1), 6, Twist::Identity),
        ("SU3(3)", ClassicalKind::Unitary, gf(3, 2), 3, Twist::Theta),
        ("SU4(2)", ClassicalKind::Unitary, gf(2, 2), 4, Twist::Theta),
    ];
    for (name, kind, f, n, twist) in named {
        let t = classical_transvections(kind, &f, n).unwrap();
        let g = TransvectionGraph::new(t.clone()).unwrap();
        match detect_invariant_form(&g, twist).unwrap() {
            FormDetection::Form(form) => {
                if !t.iter().all(|x| form.is_preserved_by(&x.matrix())) {
                    return Err(format!("{name}: form not preserved"));
                }
            }
            FormDetection::Obstruction(o) => return Err(format!("{name}: obstruction {o:?}")),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let fields = [gf(2, 1), gf(3, 1), gf(2, 2), gf(5, 1), gf(7, 1), gf(2, 3), gf(3, 2)];
    let mut pools: Vec<Vec<Transvection>> = Vec::new();
    for f in &fields {
        for n in [2, 4] {
            if (f.order() as u64).pow(n as u32) <= 6561 {
                pools.push(classical_transvections(ClassicalKind::Symplectic, f, n).unwrap());
            }
        }
        if f.has_involution() {
            for n in [3, 4] {
                pools.push(classical_transvections(ClassicalKind::Unitary, f, n).unwrap());
            }
        }
    }
    let (mut checked, mut with_form) = (0, 0);
    let mut attempts = 0;
    while checked < 1200 {
        attempts += 1;
        let t = if attempts % 2 == 0 {
            let pool = pools.choose(&mut rng).unwrap();
            let k = rng.gen_range(2..=5);
            let g = random_invertible(&mut rng, pool[0].field(), pool[0].dim());
            pool.choose_multiple(&mut rng, k).map(|x| x.conjugate(&g).unwrap()).collect::<Vec<_>>()
        } else {
            let f = fields.choose(&mut rng).unwrap();
            let n = rng.gen_range(2..=4);
            let k = rng.gen_range(n..=n + 2);
            random_set(&mut rng, f, n, k)
        };
        let g = TransvectionGraph::new(t.clone()).unwrap();
        if !g.is_irreducible() {
            continue;
        }
        checked += 1;
        let mut twists = vec![Twist::Identity];
        if g.field().has_involution() {
            twists.push(Twist::Theta);
        }
        for tw in twists {
            let found = detect_invariant_form(&g, tw).unwrap();
            let oracle = invariant_form_space(&t, tw);
            if found.form().is_some() != (oracle > 0) {
                return Err(format!("{tw:?} on {t:?}: detection {} vs oracle dim {oracle}", found.form().is_some()));
            }
            if let Some(form) = found.form() {
                with_form += 1;
                if !t.iter().all(|x| form.is_preserved_by(&x.matrix())) {
                    return Err(format!("{tw:?} form not preserved on {t:?}"));
                }
            }
        }
    }
    Ok(format!("4 named groups; {checked} random irreducible sets agree with the oracle ({with_form} forms)"))
}

fn reflections(q: &QuadraticForm) -> Vec<Transvection> {
    projective_points(q.field(), q.dim())
        .into_iter()
        .filter(|v| q.eval(v) == Elem::ONE)
        .map(|v| {
            let phi = q.polar().dual(&v);
            Transvection::new(v, phi).unwrap()
        })
        .collect()
}

/// Number of 4×4 matrices over GF(2) preserving Q (brute force over 2^16).
fn brute_isometries(q: &QuadraticForm) -> usize {
    let f = q.field().clone();
    let pts: Vec<Vector> = Subspace::full(&f, 4).elements();
    (0u32..1 << 16)
        .filter(|bits| {
            let data: Vec<Elem> = (0..16).map(|i| Elem((bits >> i) & 1)).collect();
            let m = Matrix::from_data(&f, 4, 4, data);
            !m.det().unwrap().is_zero() && pts.iter().all(|v| q.eval(&m.mul_vec(v)) == q.eval(v))
        })
        .count()
}

fn criterion_3() -> Outcome {
    let f2 = gf(2, 1);
    let mut detail = Vec::new();
    for (n, ty, brute) in [(4, WittType::Minus, true), (6, WittType::Plus, false)] {
        let q0 = QuadraticForm::standard(&f2, n, ty).unwrap();
        let t = reflections(&q0);
        let g = TransvectionGraph::new(t.clone()).unwrap();
        let form = detect_invariant_form(&g, Twist::Identity).unwrap();
        let Some(s) = form.form() else {
            return Err(format!("O{n}{ty:?}(2): no symplectic form"));
        };
        let QuadraticOutcome::Form { form: q, .. } = recover_quadratic(&g, s).unwrap() else {
            return Err(format!("O{n}{ty:?}(2): recovery failed"));
        };
        if q.witt_type() != ty {
            return Err(format!("O{n}(2): recovered type {:?}", q.witt_type()));
        }
        let all = reflections(&q);
        let order = order_of(&all, 1 << 20) as u128;
        let tag = if ty == WittType::Plus { GroupTypeTag::OrthogonalPlus } else { GroupTypeTag::OrthogonalMinus };
        let formula = order_formula(&tag, n, 2).unwrap();
        let mats: Vec<Matrix> = all.iter().map(|x| x.matrix()).collect();
        let bfs = bfs_explore(&f2, n, &mats, 1 << 20, None).unwrap().order() as u128;
        if order != formula || bfs != order {
            return Err(format!("O{n}{ty:?}(2): closure {order}, BFS {bfs}, formula {formula}"));
        }
        if brute {
            let b = brute_isometries(&q) as u128;
            if b != order {
                return Err(format!("O{n}{ty:?}(2): brute-force isometries {b} vs {order}"));
            }
        }
        detail.push(format!("O{n}{}(2) = {order}", if ty == WittType::Plus { "+" } else { "-" }));
    }
    let sp4 = classical_transvections(ClassicalKind::Symplectic, &f2, 4).unwrap();
    let g = TransvectionGraph::new(sp4).unwrap();
    let s = detect_invariant_form(&g, Twist::Identity).unwrap();
    match recover_quadratic(&g, s.form().unwrap()).unwrap() {
        QuadraticOutcome::Violating(_) => detail.push("Sp4(2) obstructed".into()),
        QuadraticOutcome::Form { .. } => return Err("Sp4(2) produced a quadratic form".into()),
    }

    // O4+(2): the Q-preserving transvections generate S3 x S3, not O4+(2).
    let qp = QuadraticForm::standard(&f2, 4, WittType::Plus).unwrap();
    let t = reflections(&qp);
    let g = TransvectionGraph::new(t.clone()).unwrap();
    assert_eq!(t.len(), 6);
    assert!(!g.is_irreducible());
    assert!(reducible_by_search(&t));
    assert_eq!(g.scc().len(), 2);
    assert_eq!(order_of(&t, 1000), 36);
    assert_eq!(brute_isometries(&qp), 72);
    assert_eq!(order_formula(&GroupTypeTag::OrthogonalPlus, 4, 2).unwrap(), 72);
    Err(format!(
        "{}; O4+(2) part unattainable: its 6 transvections generate a reducible group of order 36 \
         (two components), so recover_quadratic cannot run and the transvection group is not the \
         order-72 isometry group (72 confirmed by brute force over all 4x4 matrices)",
        detail.join(", ")
    ))
}

struct Instance {
    name: String,
    set: Vec<Transvection>,
    tag: GroupTypeTag,
}

fn grid() -> Vec<Instance> {
    let mut out = Vec::new();
    for (p, e) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
        let f = gf(p, e);
        out.push(Instance {
            name: format!("SL2({})", f.order()),
            set: classical_transvections(ClassicalKind::Linear, &f, 2).unwrap(),
            tag: GroupTypeTag::Linear,
        });
    }
    for p in [2, 3] {
        out.push(Instance {
            name: format!("SL3({p})"),
            set: classical_transvections(ClassicalKind::Linear, &gf(p, 1), 3).unwrap(),
            tag: GroupTypeTag::Linear,
        });
    }
    for n in [4, 6] {
        out.push(Instance {
            name: format!("Sp{n}(2)"),
            set: classical_transvections(ClassicalKind::Symplectic, &gf(2, 1), n).unwrap(),
            tag: GroupTypeTag::Symplectic,
        });
    }
    for n in [3, 4] {
        for (a, e) in [(3, 2), (7, 3), (5, 4)] {
            out.push(Instance {
                name: format!("M{n}({a}) over GF({})", 1 << e),
                set: build_monomial_group(n, a, &gf(2, e)).unwrap(),
                tag: GroupTypeTag::Monomial(a),
            });
        }
    }
    for m in 5..=9 {
        out.push(Instance {
            name: format!("S{m}"),
            set: build_symmetric_rep(m).unwrap(),
            tag: if m % 2 == 1 { GroupTypeTag::SymmetricOdd } else { GroupTypeTag::SymmetricEven },
        });
    }
    out
}

fn criterion_4() -> Outcome {
    let opts = ClassifyOptions::default();
    let mut lines = Vec::new();
    for inst in grid() {
        let r = classify(&inst.set, &opts).map_err(|e| format!("{}: {e}", inst.name))?;
        let fq = inst.set[0].field().order() as u64;
        let n = inst.set[0].dim();
        let want = order_formula(&inst.tag, n, fq).unwrap();
        if !r.has_tag(&inst.tag) || r.order_enumerated != Some(want) || r.field_degree != inst.set[0].field().degree() {
            return Err(format!(
                "{}: got {} (also {:?}), order {:?}, field degree {}; expected {} of order {want}",
                inst.name, r.tag, r.coincident_tags, r.order_enumerated, r.field_degree, inst.tag
            ));
        }
        if inst.name == "Sp4(2)" && (r.order_enumerated != Some(720) || !r.has_tag(&GroupTypeTag::SymmetricEven)) {
            return Err("Sp4(2) is not recognized as S6".into());
        }
        let also = if r.coincident_tags.is_empty() {
            String::new()
        } else {
            format!(" = {}", r.coincident_tags.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" = "))
        };
        lines.push(format!("{} {}{also} |G|={want}", inst.name, r.tag));
    }
    Ok(lines.join("; "))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let fields = [gf(2, 1), gf(3, 1), gf(2, 2)];
    let (mut done, mut longest) = (0, 0);
    while done < 1000 {
        let f = fields.choose(&mut rng).unwrap();
        let n = rng.gen_range(2..=4);
        let k = rng.gen_range(n..=n + 3);
        let t = random_set(&mut rng, f, n, k);
        if !TransvectionGraph::new(t.clone()).unwrap().is_irreducible() {
            continue;
        }
        done += 1;
        let d = densify(&t, 1 << 20).map_err(|e| format!("densify failed on {t:?}: {e}"))?;
        let gd = TransvectionGraph::new(d.set.clone()).unwrap();
        if !gd.is_dense(1 << 20).unwrap().dense {
            return Err(format!("output not dense for {t:?}"));
        }
        let gens: Vec<Matrix> = t.iter().map(|x| x.matrix()).collect();
        let invs: Vec<Matrix> = t.iter().map(|x| x.inverse().matrix()).collect();
        for (x, w) in d.set.iter().zip(&d.words) {
            if w.len() > 2 * n - 1 {
                return Err(format!("word of length {} > {} for {t:?}", w.len(), 2 * n - 1));
            }
            if evaluate(f, n, &gens, &invs, w) != x.matrix() {
                return Err(format!("word does not evaluate for {t:?}"));
            }
            longest = longest.max(w.len());
        }
    }
    Ok(format!("{done} random irreducible sets densified; longest witness word {longest}"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut pools: Vec<(Vec<Transvection>, bool)> = Vec::new();
    for (p, e, n) in [(2, 1, 4), (3, 1, 4), (2, 2, 4), (2, 1, 6)] {
        let f = gf(p, e);
        pools.push((classical_transvections(ClassicalKind::Symplectic, &f, n).unwrap(), true));
    }
    for (p, e, n) in [(2, 1, 3), (3, 1, 3), (2, 2, 3), (2, 1, 4)] {
        let f = gf(p, e);
        loop {
            let t = random_set(&mut rng, &f, n, n + 2);
            let g = TransvectionGraph::new(t.clone()).unwrap();
            if g.is_irreducible() && detect_invariant_form(&g, Twist::Identity).unwrap().form().is_none() {
                pools.push((densify(&t, 1 << 20).unwrap().set, false));
                break;
            }
        }
    }
    let (mut trials, mut multi) = (0, 0);
    while trials < 1200 {
        let (dense, form) = pools.choose(&mut rng).unwrap();
        let k = rng.gen_range(1..=6.min(dense.len()));
        let t0: Vec<Transvection> = dense.choose_multiple(&mut rng, k).cloned().collect();
        let comps = TransvectionGraph::new(t0.clone()).unwrap().scc().len();
        trials += 1;
        multi += (comps > 1) as usize;
        let cu = connect_up(dense, &t0, *form).map_err(|e| format!("connect_up: {e}"))?;
        let bound = t0.len() + if *form { comps - 1 } else { comps };
        let g1 = TransvectionGraph::new(cu.set.clone()).unwrap();
        if cu.set.len() > bound || !g1.is_strongly_connected() {
            return Err(format!("connect_up gave {} > {bound} or not connected ({comps} components)", cu.set.len()));
        }
        let delta = g1.defect();
        let wk = winkle(dense, &cu.set).map_err(|e| format!("winkle: {e}"))?;
        let g2 = TransvectionGraph::new(wk.set.clone()).unwrap();
        if wk.set.len() > cu.set.len() + delta || g2.defect() != 0 || !g2.is_strongly_connected() {
            return Err(format!("winkle added {} with defect {delta}", wk.set.len() - cu.set.len()));
        }
    }
    Ok(format!("{trials} trials ({multi} with several components) within budget"))
}

fn criterion_7() -> Outcome {
    let opts = ClassifyOptions::default();
    let section_opts = ClassifyOptions {
        element_cap: 100_000,
        ..ClassifyOptions::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut lines = Vec::new();
    let mut skipped = Vec::new();
    for inst in grid() {
        let report = classify(&inst.set, &opts).unwrap();
        if !report.tag.is_classical() {
            skipped.push(inst.name);
            continue;
        }
        let cert = certify(&inst.set, &opts).map_err(|e| format!("{}: certify: {e}", inst.name))?;
        let fails = verify_certificate(&inst.set, &cert, &opts).unwrap();
        if !fails.is_empty() {
            return Err(format!("{}: certificate does not verify: {fails:?}", inst.name));
        }
        let field = inst.set[0].field().clone();
        let t0 = cert.transvections(&field).unwrap();
        let want = classify(&inst.set, &section_opts).unwrap();
        let pool = conjugacy_closure(&inst.set, 1 << 20).unwrap();
        let mut accepted = 0;
        let mut attempts = 0;
        while accepted < 100 {
            attempts += 1;
            if attempts > 100_000 {
                return Err(format!("{}: could not draw strongly connected supersets", inst.name));
            }
            let extra = rng.gen_range(0..=2 * t0[0].dim());
            let mut t1 = t0.clone();
            for x in pool.choose_multiple(&mut rng, extra) {
                if !t1.contains(x) {
                    t1.push(x.clone());
                }
            }
            if !TransvectionGraph::new(t1.clone()).unwrap().is_strongly_connected() {
                continue;
            }
            accepted += 1;
            let r = classify_section(&t1, &section_opts).map_err(|e| format!("{}: section: {e}", inst.name))?;
            if r.tag != want.tag || r.field_degree != want.field_degree {
                return Err(format!(
                    "{}: section classified {} over degree {}, expected {} over degree {}",
                    inst.name, r.tag, r.field_degree, want.tag, want.field_degree
                ));
            }
        }
        lines.push(format!("{} |T0|={} max word {}", inst.name, t0.len(), cert.max_word_length));
    }
    Ok(format!(
        "100 supersets each: {}; skipped (tag not classical, certify undefined): {}",
        lines.join(", "),
        skipped.join(", ")
    ))
}

/// Independent oracle: BFS over permutations of {0..m-1} with adjacent transpositions.
fn permutation_diameter(m: usize) -> usize {
    let start: Vec<u8> = (0..m as u8).collect();
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, 0usize)]);
    let mut diam = 0;
    while let Some((p, d)) = queue.pop_front() {
        diam = diam.max(d);
        for i in 0..m - 1 {
            let mut q = p.clone();
            q.swap(i, i + 1);
            if seen.insert(q.clone()) {
                queue.push_back((q, d + 1));
            }
        }
    }
    diam
}

fn criterion_8() -> Outcome {
    let f2 = gf(2, 1);
    let a = Matrix::from_raw_rows(&f2, &[vec![1, 1], vec![0, 1]]).unwrap();
    let b = Matrix::from_raw_rows(&f2, &[vec![1, 0], vec![1, 1]]).unwrap();
    let d2 = bfs_explore(&f2, 2, &[a, b], 100, None).unwrap().diameter;
    if d2 != 3 {
        return Err(format!("SL2(2) diameter {d2}"));
    }
    let s6: Vec<Matrix> = build_symmetric_rep(6).unwrap().iter().map(|t| t.matrix()).collect();
    let ex = bfs_explore(&f2, 4, &s6, 1000, None).unwrap();
    let oracle = permutation_diameter(6);
    if ex.order() != 720 || ex.diameter != oracle {
        return Err(format!("S6 in Sp4(2): order {}, diameter {} vs oracle {oracle}", ex.order(), ex.diameter));
    }
    let mut prof = Vec::new();
    for (name, kind, n) in [("SL3(2)", ClassicalKind::Linear, 3), ("Sp4(2)", ClassicalKind::Symplectic, 4)] {
        let t = classical_transvections(kind, &f2, n).unwrap();
        let p = transvection_length_profile(&t, 1 << 20).unwrap();
        if p.max > 4 * n {
            return Err(format!("{name}: max transvection length {} > {}", p.max, 4 * n));
        }
        prof.push(format!("{name} max {} over {} transvections", p.max, p.transvections));
    }
    Ok(format!("SL2(2) 3; S6 {} = oracle {oracle}; {}", ex.diameter, prof.join(", ")))
}

fn criterion_9() -> Outcome {
    // Asymptotic bounds are not asserted; record observed word lengths instead.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut observed = Vec::new();
    for (p, e, n) in [(2, 1, 4), (3, 1, 3), (2, 2, 3)] {
        let f = gf(p, e);
        let t = loop {
            let t = random_set(&mut rng, &f, n, n + 1);
            if TransvectionGraph::new(t.clone()).unwrap().is_irreducible() {
                break t;
            }
        };
        let d = densify(&t, 1 << 20).unwrap();
        let longest = d.words.iter().map(|w| w.len()).max().unwrap();
        observed.push(format!("GF({})^{n}: dense set {} longest word {longest}", f.order(), d.set.len()));
    }
    Ok(format!("asymptotic exponents not asserted; observed {}", observed.join(", ")))
}

#[test]
fn acceptance() {
    let criteria: [(usize, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    // criterion 3 contains the unattainable O4+(2) part; its true values are asserted inside
    let expected_fail = [3];
    let mut unexpected = Vec::new();
    for (i, run) in criteria {
        let start = Instant::now();
        let out = run();
        let secs = start.elapsed().as_secs_f64();
        let line = match &out {
            Ok(msg) => format!("criterion {i}: PASS ({secs:.1}s) {msg}"),
            Err(msg) => format!("criterion {i}: FAIL ({secs:.1}s) {msg}"),
        };
        // straight to the handle so the lines survive output capture
        let mut so = std::io::stdout().lock();
        writeln!(so, "{line}").unwrap();
        so.flush().unwrap();
        if out.is_err() != expected_fail.contains(&i) {
            unexpected.push(i);
        }
    }
    assert!(unexpected.is_empty(), "unexpected outcome for criteria {unexpected:?}");
}
