use num_bigint::BigInt;
use proptest::prelude::*;
use welschinger::combin::binom_conv;
use welschinger::engine::{
    classify_quadric, genus_decreasing, truncation_bound, Classification, Incidence, Mode, TangencyVector,
};
use welschinger::fixtures;
use welschinger::realmodel::{surgery_check, ComponentTopology};
use welschinger::store::{AccessLog, InvariantKey, InvariantTable};
use welschinger::{HClass, LatticeKind, SurfaceModel};

fn blowup_class(n: usize) -> impl Strategy<Value = HClass> {
    prop::collection::vec(-40i64..40, n + 1)
        .prop_map(move |c| HClass::from_i64s(LatticeKind::BlowupPlane(n), &c).unwrap())
}

fn quadric_class() -> impl Strategy<Value = HClass> {
    (-40i64..40, -40i64..40).prop_map(|(p, q)| HClass::from_i64s(LatticeKind::Quadric, &[p, q]).unwrap())
}

fn triple(n: usize) -> impl Strategy<Value = (HClass, HClass, HClass)> {
    (blowup_class(n), blowup_class(n), blowup_class(n))
}

proptest! {
    #[test]
    fn pairing_is_symmetric_and_bilinear((a, b, c) in (0usize..9).prop_flat_map(triple), k in -9i64..9) {
        prop_assert_eq!(a.pair(&b).unwrap(), b.pair(&a).unwrap());
        let sum = a.add(&b).unwrap();
        prop_assert_eq!(sum.pair(&c).unwrap(), a.pair(&c).unwrap() + b.pair(&c).unwrap());
        let scaled = a.scale(&BigInt::from(k));
        prop_assert_eq!(scaled.pair(&c).unwrap(), BigInt::from(k) * a.pair(&c).unwrap());
    }

    #[test]
    fn quadric_pairing_is_hyperbolic(a in quadric_class(), b in quadric_class()) {
        let (p, q) = (&a.coeffs()[0], &a.coeffs()[1]);
        let (r, s) = (&b.coeffs()[0], &b.coeffs()[1]);
        prop_assert_eq!(a.pair(&b).unwrap(), p * s + q * r);
    }

    #[test]
    fn genus_matches_raw_coefficient_sums(d in (0usize..9).prop_flat_map(blowup_class)) {
        let n = d.coeffs().len() - 1;
        let x = SurfaceModel::standard("X", LatticeKind::BlowupPlane(n));
        let c: Vec<i64> = d.coeffs().iter().map(|v| i64::try_from(v).unwrap()).collect();
        let square = c[0] * c[0] - c[1..].iter().map(|b| b * b).sum::<i64>();
        let c1d = 3 * c[0] + c[1..].iter().sum::<i64>();
        let numerator = square - c1d;
        prop_assert!(numerator % 2 == 0);
        prop_assert_eq!(x.arithmetic_genus(&d).unwrap(), BigInt::from(numerator / 2 + 1));
    }

    #[test]
    fn class_text_round_trips(d in (0usize..9).prop_flat_map(blowup_class), q in quadric_class()) {
        for c in [d, q] {
            let text = c.to_string();
            prop_assert_eq!(HClass::parse(&text, c.lattice()).unwrap(), c.clone());
            prop_assert_eq!(HClass::parse_inferred(&text).unwrap().to_string(), text);
        }
    }

    #[test]
    fn lsq_depends_only_on_parity(d in blowup_class(7), e in blowup_class(7)) {
        let models = fixtures::models();
        let shifted = d.add(&e.scale(&BigInt::from(2))).unwrap();
        for id in ["X2", "Y2", "Z2"] {
            let m = models.get(id).unwrap();
            for c in &m.components {
                prop_assert_eq!(m.lsq(&c.name, &d).unwrap(), m.lsq(&c.name, &shifted).unwrap());
            }
        }
    }

    #[test]
    fn pascal_rule(n in 1i64..120, k in 1i64..130) {
        prop_assert_eq!(
            binom_conv(n, k).unwrap(),
            binom_conv(n - 1, k).unwrap() + binom_conv(n - 1, k - 1).unwrap()
        );
    }

    #[test]
    fn quadric_swap_symmetry(p in 0i64..4, q in 0i64..4, split in 0u32..8, ai in 0usize..8, bi in 0usize..8, off in 0u32..2) {
        let n = (p + q) as u32;
        prop_assume!(n > 0 && split <= n);
        let alphas = TangencyVector::all_of_weight(split);
        let betas = TangencyVector::all_of_weight(n - split);
        let alpha = &alphas[ai % alphas.len()];
        let beta = &betas[bi % betas.len()];
        let d = HClass::from_i64s(LatticeKind::Quadric, &[p, q]).unwrap();
        let swapped = HClass::from_i64s(LatticeKind::Quadric, &[q, p]).unwrap();
        match (classify_quadric(&d, alpha, beta, off), classify_quadric(&swapped, alpha, beta, off)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.swapped(), b),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a.map(|c| c.to_string()), b.map(|c| c.to_string())),
        }
    }

    #[test]
    fn quadric_unique_embeddings_have_small_degree(p in 0i64..5, q in 0i64..5, split in 0u32..9, off in 0u32..2) {
        let n = (p + q) as u32;
        prop_assume!(n > 0 && split <= n && !((p >= 2 && q == 0) || (q >= 2 && p == 0)));
        let d = HClass::from_i64s(LatticeKind::Quadric, &[p, q]).unwrap();
        for alpha in TangencyVector::all_of_weight(split) {
            for beta in TangencyVector::all_of_weight(n - split) {
                if let Classification::UniqueEmbedding(_) = classify_quadric(&d, &alpha, &beta, off).unwrap() {
                    prop_assert!(n <= 2);
                }
            }
        }
    }

    /// Random partial tables on the first example's surfaces.
    #[test]
    fn relation_value_is_recomputable(values in prop::collection::vec(prop::option::of(-1000i64..1000), 2), strict in any::<bool>()) {
        let models = fixtures::models();
        let y = models.get("Y1").unwrap();
        let (x, s) = models.surgery_target("Y1").unwrap();
        let d = y.surface.parse_class(fixtures::EXAMPLE1.d).unwrap();
        let mut table = InvariantTable::new();
        for (k, v) in values.iter().enumerate() {
            if let Some(v) = v {
                let key = InvariantKey::absolute("X1", d.minus_multiple(k as u64 + 1, s).unwrap(), vec!["RP2".into()], vec![5], "0");
                table.insert(key, BigInt::from(*v), "").unwrap();
            }
        }
        let mode = if strict { Mode::Strict } else { Mode::Lenient };
        let log = AccessLog::new(&table);
        let inc = Incidence::new(vec!["RP2".into(), "S".into()], vec![5, 1], "0");
        let res = genus_decreasing(&log, y, x, &d, s, &inc, mode).unwrap();
        let bound = truncation_bound(&x.surface, &d, s, 1, 0).unwrap().unwrap();
        prop_assert_eq!(res.terms.len() as u64, bound);
        prop_assert_eq!(log.consulted().len() as u64, bound);
        let any_missing = values.iter().any(Option::is_none);
        if strict && any_missing {
            prop_assert!(res.value.is_none());
        } else {
            prop_assert_eq!(res.value.clone(), Some(res.recompute()));
            let manual: i64 = values.iter().enumerate().map(|(k, v)| {
                let k = k as i64 + 1;
                let sign = if k % 2 == 1 { 1 } else { -1 };
                sign * k * k * v.unwrap_or(0)
            }).sum();
            prop_assert_eq!(res.recompute(), BigInt::from(manual));
        }
    }

    #[test]
    fn table_round_trips(rows in prop::collection::btree_map((0i64..6, 0u32..4, 0usize..3), (-10_000i64..10_000, "[a-z0-9 ,._]{0,12}"), 0..12)) {
        let comps = ["A", "B", "C"];
        let mut t = InvariantTable::new();
        for ((a, r, c), (v, prov)) in &rows {
            let d = HClass::from_i64s(LatticeKind::BlowupPlane(1), &[*a, -1]).unwrap();
            let key = InvariantKey::absolute("P", d, vec![comps[*c].into()], vec![*r], "0");
            t.insert(key, BigInt::from(*v), prov.trim()).unwrap();
        }
        let text = t.to_canonical_string();
        let back = InvariantTable::parse(&text).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(back.to_canonical_string(), text);
        for (k, e) in t.iter() {
            prop_assert_eq!(&back.lookup_entry(k).provenance, &e.provenance);
        }
        // merge is commutative and idempotent
        prop_assert_eq!(t.merge(&back).unwrap(), back.merge(&t).unwrap());
        prop_assert_eq!(t.merge(&InvariantTable::new()).unwrap(), t.clone());
    }

    #[test]
    fn duplicate_detection_ignores_order(lines in prop::collection::vec(0i64..5, 2..8), rot in 0usize..8) {
        let mut records: Vec<String> = lines.iter().map(|a| format!("W P d=({a};-1) L=(A) F=0 r=(1) g=0 = 1")).collect();
        let has_dup = {
            let mut s = lines.clone();
            s.sort();
            s.windows(2).any(|w| w[0] == w[1])
        };
        let n = records.len();
        records.rotate_left(rot % n);
        let text = format!("surface P lattice=blowup:1\n{}\n", records.join("\n"));
        prop_assert_eq!(InvariantTable::parse(&text).is_err(), has_dup);
    }
}

trait EntryLookup {
    fn lookup_entry(&self, key: &InvariantKey) -> &welschinger::store::Entry;
}

impl EntryLookup for InvariantTable {
    fn lookup_entry(&self, key: &InvariantKey) -> &welschinger::store::Entry {
        use welschinger::store::InvariantLookup;
        self.lookup(key).expect("present")
    }
}

#[test]
fn surgery_check_detects_single_component_mutations() {
    let models = fixtures::models();
    for (y, x, s) in models.surgeries() {
        assert!(surgery_check(x, y, s).unwrap().passed());
        for i in 0..y.components.len() {
            for topology in [
                ComponentTopology::Sphere,
                ComponentTopology::RP2,
                ComponentTopology::Torus,
                ComponentTopology::KleinLike(2),
                ComponentTopology::KleinLike(3),
            ] {
                if topology == y.components[i].topology {
                    continue;
                }
                let mut mutated = y.clone();
                mutated.components[i].topology = topology;
                assert!(!surgery_check(x, &mutated, s).unwrap().passed(), "{} component {i} -> {topology}", y.id());
            }
            // the new sphere may carry any name; shared components may not
            if x.component(&y.components[i].name).is_some() {
                let mut renamed = y.clone();
                renamed.components[i].name.push('x');
                assert!(!surgery_check(x, &renamed, s).unwrap().passed());
            }
            let mut dropped = y.clone();
            dropped.components.remove(i);
            assert!(!surgery_check(x, &dropped, s).unwrap().passed());
        }
        let mut extra = y.clone();
        extra.components.push(y.components.last().unwrap().clone());
        extra.components.last_mut().unwrap().name = "S9".into();
        assert!(!surgery_check(x, &extra, s).unwrap().passed());
    }
}
