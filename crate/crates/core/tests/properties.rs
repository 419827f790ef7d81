use proptest::prelude::*;

use grigorchuk_core::branch::{self, Factor, KMembership, Sign, TWord};
use grigorchuk_core::certificate::{self, Certificate, CertificateBody};
use grigorchuk_core::decision::{self, OrderResult};
use grigorchuk_core::engel::{self, Probe};
use grigorchuk_core::tree::{self, Vertex};
use grigorchuk_core::words::{commutator, reduce, Letter, ReducedWord};
use grigorchuk_core::Config;

fn raw_word(max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(0..4usize, 0..=max_len)
        .prop_map(|v| v.into_iter().map(|i| Letter::ALL[i]).collect())
}

fn word(max_len: usize) -> impl Strategy<Value = ReducedWord> {
    raw_word(max_len).prop_map(|w| reduce(&w))
}

fn a() -> ReducedWord {
    ReducedWord::letter(Letter::A)
}

fn even_word(max_len: usize) -> impl Strategy<Value = ReducedWord> {
    word(max_len).prop_map(|w| if w.is_odd() { a().multiply(&w) } else { w })
}

fn odd_word(max_len: usize) -> impl Strategy<Value = ReducedWord> {
    even_word(max_len).prop_map(|w| a().multiply(&w))
}

fn tword(max_factors: usize, max_conj: usize) -> impl Strategy<Value = TWord> {
    prop::collection::vec((word(max_conj), any::<bool>()), 0..=max_factors).prop_map(|fs| {
        TWord::from_factors(
            fs.into_iter()
                .map(|(w, s)| Factor::new(w, if s { Sign::Plus } else { Sign::Minus }))
                .collect(),
        )
    })
}

fn swap(d: &tree::Decomposition) -> tree::Decomposition {
    tree::Decomposition {
        active: d.active,
        left: d.right.clone(),
        right: d.left.clone(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn reduce_is_idempotent_and_shortening(w in raw_word(64)) {
        let r = reduce(&w);
        prop_assert_eq!(reduce(r.letters()), r.clone());
        prop_assert!(r.len() <= w.len());
        for pair in r.letters().windows(2) {
            prop_assert!(pair[0] != pair[1]);
            prop_assert!(pair[0].is_rooted() || pair[1].is_rooted());
        }
    }

    #[test]
    fn reduction_preserves_the_action(w in raw_word(40)) {
        // Level 8 determines every shallower level.
        prop_assert_eq!(
            tree::letters_level_perm(&w, 8),
            tree::level_perm(&reduce(&w), 8)
        );
    }

    #[test]
    fn group_laws(x in word(20), y in word(20), z in word(20)) {
        prop_assert!(decision::are_equal(&x.multiply(&y).multiply(&z), &x.multiply(&y.multiply(&z))));
        prop_assert!(decision::are_equal(&x.multiply(&ReducedWord::identity()), &x));
        prop_assert!(decision::is_trivial(&x.multiply(&x.invert())));
        prop_assert_eq!(x.invert().invert(), x);
    }

    #[test]
    fn wreath_recursion_is_a_homomorphism(x in even_word(30), y in even_word(30)) {
        let (dx, dy, dxy) = (tree::decompose(&x), tree::decompose(&y), tree::decompose(&x.multiply(&y)));
        prop_assert!(!dxy.active);
        prop_assert!(decision::are_equal(&dxy.left, &dx.left.multiply(&dy.left)));
        prop_assert!(decision::are_equal(&dxy.right, &dx.right.multiply(&dy.right)));
    }

    #[test]
    fn conjugation_by_a_swaps_sections(g in even_word(30)) {
        let d = tree::decompose(&g);
        let da = tree::decompose(&g.conjugate(&a()));
        prop_assert_eq!(&da, &swap(&d));
    }

    #[test]
    fn action_matches_sections(g in word(30), n in 0usize..=8) {
        let (perm, _) = tree::sections_at(&g, n);
        for v in 0..1usize << n {
            let image = tree::act(&g, &Vertex::from_index(v, n));
            prop_assert_eq!(image.index(), perm.apply(v));
        }
    }

    #[test]
    fn act_is_prefix_compatible(g in word(30), bits in prop::collection::vec(0u8..2, 0..20), cut in 0usize..20) {
        let v = Vertex::from_bits(bits.clone());
        let u = Vertex::from_bits(bits[..cut.min(bits.len())].to_vec());
        prop_assert!(tree::act(&g, &u).is_prefix_of(&tree::act(&g, &v)));
    }

    #[test]
    fn first_level_stabilizer_is_even_parity(g in word(40)) {
        prop_assert_eq!(tree::in_level_stabilizer(&g, 1), !g.is_odd());
    }

    #[test]
    fn stabilizer_agrees_with_level_permutation(g in word(30), n in 0usize..=8) {
        prop_assert_eq!(tree::in_level_stabilizer(&g, n), tree::level_perm(&g, n).is_identity());
    }

    #[test]
    fn word_problem_agrees_with_oracle(w in raw_word(40)) {
        let g = reduce(&w);
        prop_assert_eq!(decision::is_trivial(&g), decision::witness_vertex(&g, 12).is_none());
    }

    #[test]
    fn conjugated_relators_are_trivial(u in word(20), v in word(20), which in 0usize..4) {
        let relator = match which {
            0 => ReducedWord::parse("ad").unwrap().pow(4),
            1 => ReducedWord::parse("ac").unwrap().pow(8),
            2 => ReducedWord::parse("ab").unwrap().pow(16),
            _ => commutator(&ReducedWord::parse("d").unwrap(), &ReducedWord::parse("ada").unwrap()),
        };
        let g = relator.conjugate(&u).multiply(&v).multiply(&v.invert());
        prop_assert!(decision::is_trivial(&g));
        prop_assert_eq!(decision::witness_vertex(&g, 12), None);
        // A nontrivial perturbation is caught by both.
        let h = g.multiply(&ReducedWord::parse("b").unwrap().conjugate(&u));
        prop_assert!(!decision::is_trivial(&h));
        prop_assert!(decision::witness_vertex(&h, 12).is_some());
    }

    #[test]
    fn triviality_ignores_inserted_relations(w in raw_word(30), pos in 0usize..31, rel in 0usize..5) {
        let inserted: &[Letter] = match rel {
            0 => &[Letter::A, Letter::A],
            1 => &[Letter::B, Letter::C, Letter::D],
            2 => &[Letter::D, Letter::D],
            3 => &[Letter::C, Letter::B, Letter::D],
            _ => &[Letter::A, Letter::D, Letter::A, Letter::D, Letter::A, Letter::D, Letter::A, Letter::D],
        };
        let mut longer = w.clone();
        let at = pos.min(w.len());
        longer.splice(at..at, inserted.iter().copied());
        let base = reduce(&w);
        let other = reduce(&longer);
        prop_assert_eq!(decision::is_trivial(&base), decision::is_trivial(&other));
        prop_assert!(decision::are_equal(&base, &other));
    }

    #[test]
    fn moved_vertex_matches_oracle(g in word(30)) {
        let exact = decision::moved_vertex(&g);
        let bounded = decision::witness_vertex(&g, 12);
        match (&exact, &bounded) {
            (Some(v), Some(u)) => prop_assert_eq!(v, u),
            (None, None) => {}
            (Some(v), None) => prop_assert!(v.depth() > 12),
            (None, Some(_)) => prop_assert!(false, "oracle moved a vertex of a trivial element"),
        }
        if let Some(v) = exact {
            prop_assert_ne!(tree::act(&g, &v), v);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn order_is_exact(g in word(16)) {
        if let OrderResult::Exact(o) = decision::order(&g, 12) {
            prop_assert!(o.is_power_of_two());
            prop_assert!(decision::is_trivial(&g.pow(o as i64)));
            if o >= 2 {
                prop_assert!(!decision::is_trivial(&g.pow(o as i64 / 2)));
            }
            // The level action can only see a divisor of the order.
            prop_assert_eq!(o % decision::level_order(&g, 6), 0);
        }
    }

    #[test]
    fn order_is_conjugation_invariant(g in word(12), h in word(12)) {
        prop_assert_eq!(decision::order(&g, 12), decision::order(&g.conjugate(&h), 12));
    }

    #[test]
    fn lifts_hit_the_requested_section(g in word(30)) {
        let s = branch::lift_first(&g);
        prop_assert!(!s.is_odd());
        prop_assert!(decision::are_equal(&tree::decompose(&s).left, &g));
        let s = branch::lift_second(&g);
        prop_assert!(!s.is_odd());
        prop_assert!(decision::are_equal(&tree::decompose(&s).right, &g));
    }

    #[test]
    fn emb_pair_realizes_the_pair(k1 in tword(3, 10), k2 in tword(3, 10)) {
        let y = branch::emb_pair(&k1, &k2);
        let d = tree::decompose(&y);
        prop_assert!(!d.active);
        prop_assert!(decision::are_equal(&d.left, &k1.flatten()));
        prop_assert!(decision::are_equal(&d.right, &k2.flatten()));
        let inside = matches!(branch::membership_in_k(&y), KMembership::Inside { .. });
        prop_assert!(inside, "emb_pair output not in K");
        let inside = matches!(branch::membership_in_k(&k1.flatten()), KMembership::Inside { .. });
        prop_assert!(inside, "flattened TWord not in K");
    }

    #[test]
    fn flatten_is_a_homomorphism(k1 in tword(3, 10), k2 in tword(3, 10), g in word(10)) {
        prop_assert!(decision::are_equal(&k1.multiply(&k2).flatten(), &k1.flatten().multiply(&k2.flatten())));
        prop_assert!(decision::are_equal(&k1.invert().flatten(), &k1.flatten().invert()));
        prop_assert!(decision::are_equal(&k1.conjugate(&g).flatten(), &k1.flatten().conjugate(&g)));
        prop_assert!(decision::are_equal(
            &k1.commutator(&k2).flatten(),
            &commutator(&k1.flatten(), &k2.flatten())
        ));
    }

    #[test]
    fn tword_literal_round_trip(k in tword(4, 10)) {
        let back: TWord = k.to_string().parse().unwrap();
        prop_assert_eq!(back, k);
    }

    #[test]
    fn tower_recurrence(x in word(8), g in word(6), n in 1usize..=6) {
        let lhs = engel::iterated_commutator(&x, &g, n);
        let rhs = commutator(&engel::iterated_commutator(&x, &g, n - 1), &g);
        prop_assert!(decision::are_equal(&lhs, &rhs));
    }

    #[test]
    fn lemma2_on_random_inputs(x in odd_word(12), k1 in tword(2, 8), k2 in tword(2, 8), m in 1usize..=3) {
        let y = branch::emb_pair(&k1, &k2);
        let r = engel::lemma2_check(&x, &y, m, &Config::default()).unwrap();
        prop_assert!(r.holds);
    }

    #[test]
    fn probe_certificates_replay(g in word(10), x in word(10)) {
        let cfg = Config::default();
        if let Ok(p) = engel::left_engel_probe(&g, &x, 8, &cfg) {
            let body = match p {
                Probe::Sink(s) => CertificateBody::EngelSink(s),
                Probe::NoSinkUpTo(w) => CertificateBody::NonEngelWitness(w),
            };
            let cert = Certificate::from_json(&Certificate::new(body).to_json()).unwrap();
            prop_assert!(certificate::verify(&cert, &cfg).is_ok());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// For `y = emb_pair(k, 1)` the tower `[y,_m a]` first vanishes at
    /// `m = log2(order(k)) + 1`.
    #[test]
    fn sink_threshold_law(k in tword(3, 8).prop_filter("nonempty", |k| !k.is_empty())) {
        let kw = k.flatten();
        let OrderResult::Exact(o) = decision::order(&kw, 12) else { return Ok(()) };
        let e = o.trailing_zeros() as usize;
        let y = branch::emb_pair(&k, &TWord::empty());
        let towers = engel::tower(&y, &a(), e + 1, 1 << 20).unwrap();
        let first = towers.iter().position(decision::is_trivial).map(|i| i + 1);
        prop_assert_eq!(first, Some(e + 1));
    }
}

#[test]
fn spherically_transitive_through_level_8() {
    for n in 1..=8 {
        let gens: Vec<_> = Letter::ALL.iter().map(|&x| tree::generator_level_perm(x, n)).collect();
        let mut seen = vec![false; 1 << n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for g in &gens {
                let w = g.apply(v);
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        assert!(seen.iter().all(|&s| s), "level {n} not transitive");
    }
}

#[test]
fn k_index_is_monotone_and_divides() {
    let mut prev = None;
    for n in 1..=branch::MAX_QUOTIENT_LEVEL {
        let q = branch::level_quotient(n).unwrap();
        let index = q.k_image_index();
        assert_eq!(q.group_order() % &index, 0u32.into());
        if let Some(p) = prev {
            assert!(p <= index, "index dropped at level {n}");
        }
        prev = Some(index);
    }
}

#[test]
fn membership_is_consistent_across_plateau_levels() {
    let p = branch::plateau().expect("plateau");
    let mut rng = grigorchuk_core::sample::rng(11);
    for _ in 0..200 {
        let g = grigorchuk_core::sample::random_even_word(&mut rng, 30);
        let verdicts: Vec<bool> = (p.level..p.level + branch::PLATEAU_WIDTH)
            .map(|n| branch::level_quotient(n).unwrap().contains_in_k(&g))
            .collect();
        assert!(verdicts.iter().all(|&v| v == verdicts[0]), "{g}: {verdicts:?}");
    }
}

#[test]
fn pinned_search_fixtures() {
    let cfg = Config::default();
    let (h, y1) = engel::search_nonengel_pair(5, &cfg).unwrap().expect("pair within budget");
    assert_eq!((h.to_string().as_str(), y1.to_string().as_str()), ("badaca^-1;badadacacada^-1", "dadad^-1"));
    let towers = engel::tower(&h.flatten(), &y1.flatten(), 5, cfg.tower_cap).unwrap();
    assert!(towers.iter().all(|c| !decision::is_trivial(c)));

    let (k, order) = branch::search_high_order(8, cfg.budget, cfg.seed).unwrap();
    assert_eq!((k, order), (TWord::t(), 8));
    assert!(branch::search_high_order(24, cfg.budget, cfg.seed).is_err());
}
