use std::sync::Arc;

use proptest::prelude::*;

use growthlab_core::assess::{
    hat_schedule, Assessor, CertaintyEquivalent, Entropic, NegAvar, SharedAssessor, UtilitySpec,
};
use growthlab_core::growth::{index_at, rsc_at};
use growthlab_core::lab::InstanceGen;
use growthlab_core::{ExtReal, FilteredSpace, RandomVariable};

fn space_and_x(seed: u64, raw: &[f64]) -> (Arc<FilteredSpace>, RandomVariable) {
    let gen = InstanceGen::with_seed(seed);
    let space = gen.space(&mut gen.rng(0));
    let x = RandomVariable::from_f64s(&raw[..space.atom_count()]);
    (space, x)
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, 81)
}

fn close(a: ExtReal, b: ExtReal, tol: f64) -> bool {
    a.distance(b) <= tol * (1.0 + a.get().abs().max(b.get().abs()))
}

fn built_ins() -> Vec<SharedAssessor> {
    vec![
        Arc::new(Entropic::new(-1.3).unwrap()),
        Arc::new(Entropic::new(0.0).unwrap()),
        Arc::new(Entropic::new(0.7).unwrap()),
        Arc::new(NegAvar::new(0.3).unwrap()),
        Arc::new(NegAvar::new(1.0).unwrap()),
        Arc::new(CertaintyEquivalent::new(UtilitySpec::power(0.5).unwrap())),
        Arc::new(CertaintyEquivalent::new(UtilitySpec::wavy(0.5).unwrap())),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conditional_expectation_laws(seed in 0u64..1000, a in values(), b in values(), c1 in -3.0..3.0f64, c2 in -3.0..3.0f64, t in 0usize..5, s in 0usize..5) {
        let (space, x) = space_and_x(seed, &a);
        let y = RandomVariable::from_f64s(&b[..space.atom_count()]);
        let (t, s) = (t.min(s), t.max(s));
        let ex = space.cond_expect(&x, t);
        prop_assert!(space.is_measurable(&ex, t));
        let tower = space.cond_expect(&space.cond_expect(&x, s), t);
        for a in 0..x.len() {
            prop_assert!(close(tower[a], ex[a], 1e-12));
        }
        let lin = space.cond_expect(&x.scale(c1).add(&y.scale(c2)), t);
        let sep = ex.scale(c1).add(&space.cond_expect(&y, t).scale(c2));
        for a in 0..x.len() {
            prop_assert!(lin[a].distance(sep[a]) <= 1e-12 * 40.0);
        }
        let hi = x.zip_map(&y, ExtReal::max);
        prop_assert!(ex.le(&space.cond_expect(&hi, t)));
    }

    #[test]
    fn built_ins_are_local_and_monotone(seed in 0u64..1000, a in values(), b in values(), bump in values(), t in 0usize..5, pick in 0usize..16) {
        let (space, x) = space_and_x(seed, &a);
        let t = t.min(space.depth());
        let cell = pick % space.cell_count(t);
        let inside = space.partition(t).cell(cell).to_vec();
        let y: RandomVariable = (0..x.len()).map(|i| if inside.contains(&i) { x[i] } else { ExtReal::new(b[i]) }).collect();
        let up = x.add(&RandomVariable::from_f64s(&bump[..x.len()]).map(|v| v.pos_part()));
        for mu in built_ins() {
            let fx = mu.evaluate(&space, t, &x).unwrap();
            let fy = mu.evaluate(&space, t, &y).unwrap();
            for &i in &inside {
                prop_assert_eq!(fx[i], fy[i], "{} not local", mu.label());
            }
            let fu = mu.evaluate(&space, t, &up).unwrap();
            prop_assert!(fx.le(&fu), "{} not monotone", mu.label());
        }
    }

    #[test]
    fn cash_additivity(seed in 0u64..1000, a in values(), m in values(), t in 0usize..5) {
        let (space, x) = space_and_x(seed, &a);
        let t = t.min(space.depth());
        let m = space.broadcast(t, &space.cell_representatives(t, &RandomVariable::from_f64s(&m[..x.len()])));
        let cash: Vec<SharedAssessor> = vec![
            Arc::new(Entropic::new(-1.3).unwrap()),
            Arc::new(Entropic::new(0.7).unwrap()),
            Arc::new(NegAvar::new(0.3).unwrap()),
        ];
        for mu in cash {
            let lhs = mu.evaluate(&space, t, &x.add(&m)).unwrap();
            let rhs = mu.evaluate(&space, t, &x).unwrap().add(&m);
            for i in 0..x.len() {
                prop_assert!(lhs[i].distance(rhs[i]) <= 1e-12, "{}: {} vs {}", mu.label(), lhs[i], rhs[i]);
            }
        }
    }

    #[test]
    fn entropic_family_laws(seed in 0u64..1000, a in values(), g1 in -3.0..3.0f64, g2 in -3.0..3.0f64, t in 0usize..5, s in 0usize..5) {
        let (space, x) = space_and_x(seed, &a);
        let (t, s) = (t.min(s).min(space.depth()), t.max(s).min(space.depth()));
        let (lo, hi) = (Entropic::new(g1.min(g2)).unwrap(), Entropic::new(g1.max(g2)).unwrap());
        let (f_lo, f_hi) = (lo.evaluate(&space, t, &x).unwrap(), hi.evaluate(&space, t, &x).unwrap());
        for i in 0..x.len() {
            prop_assert!(f_lo[i].get() <= f_hi[i].get() + 1e-12);
        }
        for mu in [lo, hi] {
            let f_t = mu.evaluate(&space, t, &x).unwrap();
            let f_s = mu.evaluate(&space, s, &x).unwrap();
            let nested = mu.evaluate(&space, t, &f_s).unwrap();
            let e_fs = space.cond_expect(&f_s, t);
            for i in 0..x.len() {
                prop_assert!(nested[i].distance(f_t[i]) <= 1e-12, "recursion at gamma {}", mu.gamma());
                if mu.gamma() >= 0.0 {
                    prop_assert!(e_fs[i].get() <= f_t[i].get() + 1e-12);
                }
                if mu.gamma() <= 0.0 {
                    prop_assert!(e_fs[i].get() >= f_t[i].get() - 1e-12);
                }
            }
        }
    }

    #[test]
    fn truncation_limit_is_the_identity_on_bounded_inputs(seed in 0u64..1000, a in values(), t in 0usize..5) {
        let (space, x) = space_and_x(seed, &a);
        let t = t.min(space.depth());
        for mu in built_ins() {
            let hat = hat_schedule(mu.as_ref(), &space, t, &x).unwrap();
            prop_assert_eq!(hat.value, mu.evaluate(&space, t, &x).unwrap());
        }
    }

    #[test]
    fn index_identities(seed in 0u64..1000, gamma in -3.0..3.0f64, beta in 0.05..20.0f64, t in 0usize..6, big in 1usize..200) {
        let gen = InstanceGen::with_seed(seed);
        let inst = gen.instance(&mut gen.rng(1));
        let t = t.min(inst.listed);
        let big_t = t + big;
        let scaled = inst.v.scale_at(t, &RandomVariable::constant(inst.space.atom_count(), ExtReal::new(beta))).unwrap();
        let fast = rsc_at(&inst.v, t, gamma, big_t).unwrap();
        prop_assert_eq!(&fast, &rsc_at(&scaled, t, gamma, big_t).unwrap());
        let generic = index_at(&inst.v, t, &Entropic::new(gamma).unwrap(), big_t, true).unwrap();
        for (f, g) in fast.iter().zip(&generic) {
            prop_assert!(f.distance(*g) <= 1e-12);
        }
        let up = rsc_at(&inst.v, t, gamma + 0.25, big_t).unwrap();
        for (f, u) in fast.iter().zip(&up) {
            prop_assert!(f <= u, "gamma order broken at T = {}: {} > {}", big_t, f, u);
        }
    }
}
