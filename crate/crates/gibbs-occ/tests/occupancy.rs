mod common;

use common::*;
use gibbs_occ::occupancy::enumerate_oracle;
use gibbs_occ::{Error, Exact, LogF64, Occupancy, OccupancySample, Param, Scalar, WeightSequence};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn exact(w: &WeightSequence, theta: Exact, n: u64, k: usize) -> Occupancy<Exact> {
    Occupancy::new(w, theta, n, k).unwrap()
}

fn families() -> Vec<WeightSequence> {
    vec![
        WeightSequence::log_series(),
        WeightSequence::cayley(),
        WeightSequence::neg_bin(Param::ratio(3, 2)).unwrap(),
        WeightSequence::engen(Param::ratio(1, 2)).unwrap(),
        WeightSequence::new_engen(Param::ratio(1, 3)).unwrap(),
        WeightSequence::gen_binomial_tree(Param::int(2), Param::int(1)).unwrap(),
        WeightSequence::bell(),
        WeightSequence::linear(),
    ]
}

fn multinomial_mass(counts: &[u64], n: u64) -> Exact {
    let k: u64 = counts.iter().sum();
    let mut v = fact(k) / pow(&int(n as i64), k);
    for &c in counts {
        v = v / fact(c);
    }
    v
}

#[test]
fn sample_statistics() {
    let s = OccupancySample::new(vec![2, 0, 1, 2]);
    assert_eq!((s.n(), s.k(), s.p()), (4, 5, 3));
    assert_eq!(s.aff(), vec![1, 2, 0, 0, 0]);
}

#[test]
fn joint_law_examples() {
    let lin = WeightSequence::linear();
    let occ = exact(&lin, q(4, 7), 3, 4);
    for counts in compositions(4, 3, 0) {
        assert_eq!(occ.joint_pmf(&counts).unwrap(), multinomial_mass(&counts, 3));
    }
    let one = exact(&WeightSequence::cayley(), q(2, 3), 1, 5);
    assert_eq!(one.joint_pmf(&[5]).unwrap(), Exact::one());

    // Dirichlet-multinomial: k!/(nθ)_k Π (θ)_{k_m}/k_m!.
    let theta = q(3, 2);
    let occ = exact(&WeightSequence::log_series(), theta.clone(), 3, 5);
    for counts in compositions(5, 3, 0) {
        let mut want = fact(5) / rising(&(int(3) * &theta), 5);
        for &c in &counts {
            want = want * rising(&theta, c) / fact(c);
        }
        assert_eq!(occ.joint_pmf(&counts).unwrap(), want);
    }
    // Missing trailing boxes are empty.
    assert_eq!(occ.joint_pmf(&[5]).unwrap(), occ.joint_pmf(&[5, 0, 0]).unwrap());
}

#[test]
fn joint_law_contract() {
    let occ = exact(&WeightSequence::log_series(), int(1), 2, 3);
    assert!(matches!(occ.joint_pmf(&[1, 1]), Err(Error::Contract(_))));
    assert!(matches!(occ.joint_pmf(&[1, 1, 1]), Err(Error::Contract(_))));
    assert!(Occupancy::<Exact>::new(&WeightSequence::log_series(), int(1), 0, 3).is_err());
}

#[test]
fn component_examples() {
    let occ = exact(&WeightSequence::log_series(), int(1), 2, 2);
    assert_eq!(occ.component_pmf(), vec![q(1, 3); 3]);
    let occ = exact(&WeightSequence::linear(), q(9, 4), 4, 6);
    let comp = occ.component_pmf();
    for (l, p) in comp.iter().enumerate() {
        let want = binom(6, l as u64) * pow(&q(1, 4), l as u64) * pow(&q(3, 4), 6 - l as u64);
        assert_eq!(*p, want);
    }
    let occ = exact(&WeightSequence::cayley(), int(2), 1, 3);
    assert_eq!(occ.component_pmf(), vec![int(0), int(0), int(0), int(1)]);
}

#[test]
fn partial_sum_examples() {
    let occ = exact(&WeightSequence::engen(Param::ratio(1, 2)).unwrap(), q(2, 3), 5, 6);
    assert_eq!(occ.partialsum_pmf(1).unwrap(), occ.component_pmf());
    assert!(matches!(occ.partialsum_pmf(5), Err(Error::Domain(_))));
    assert!(matches!(occ.partialsum_pmf(0), Err(Error::Domain(_))));
    let lin = exact(&WeightSequence::linear(), int(1), 5, 6);
    let part = lin.partialsum_pmf(2).unwrap();
    for (l, p) in part.iter().enumerate() {
        let want = binom(6, l as u64) * pow(&q(2, 5), l as u64) * pow(&q(3, 5), 6 - l as u64);
        assert_eq!(*p, want);
    }
}

#[test]
fn distinct_count_examples() {
    let w = WeightSequence::cayley();
    let occ = exact(&w, q(1, 2), 4, 5);
    let pmf = occ.pnk_pmf();
    assert_eq!(pmf.len(), 5);
    assert_eq!(pmf[0], Exact::zero());
    let s1 = occ.sigma_one().get(5).clone();
    let sn = occ.sigma_all().get(5).clone();
    assert_eq!(pmf[1], int(4) * s1 / sn);

    let lin = exact(&WeightSequence::linear(), int(3), 2, 2);
    assert_eq!(lin.pnk_pmf(), vec![int(0), q(1, 2), q(1, 2)]);
    assert_eq!(lin.pnk_mean_var(), (1.5, 0.25));

    let single = exact(&WeightSequence::log_series(), int(1), 1, 4);
    assert_eq!(single.pnk_mean_var(), (1.0, 0.0));
    let empty = exact(&WeightSequence::log_series(), int(1), 3, 0);
    assert_eq!(empty.pnk_pmf(), vec![int(1)]);

    // LogSeries θ=1, n=k=3 against the 10-composition enumeration.
    let law = BruteLaw::new(&phi_exact(&WeightSequence::log_series(), 3), &int(1), 3, 3);
    assert_eq!(law.entries.len(), 10);
    assert_eq!(exact(&WeightSequence::log_series(), int(1), 3, 3).pnk_pmf(), law.distinct());
    assert_eq!(law.distinct(), vec![int(0), q(3, 10), q(3, 5), q(1, 10)]);
}

#[test]
fn frequency_examples() {
    let occ = exact(&WeightSequence::log_series(), int(1), 2, 2);
    assert_eq!(occ.aff_pmf(&[2, 0]).unwrap(), q(1, 3));
    assert_eq!(occ.aff_pmf(&[0, 1]).unwrap(), q(2, 3));
    assert!(matches!(occ.aff_pmf(&[1, 1]), Err(Error::Contract(_))));

    let occ = exact(&WeightSequence::cayley(), q(5, 2), 3, 6);
    let mut single = vec![0u64; 6];
    single[5] = 1;
    assert_eq!(occ.aff_pmf(&single).unwrap(), occ.pnk_pmf()[1]);
    // Six singletons cannot fit into three boxes.
    assert_eq!(occ.aff_pmf(&[6, 0, 0, 0, 0, 0]).unwrap(), Exact::zero());
}

#[test]
fn frequency_law_normalizes() {
    for w in families() {
        for n in 1..=8u64 {
            for k in 1..=8u64 {
                let occ = exact(&w, q(3, 5), n, k as usize);
                let total: Exact = partitions_aff(k).iter().map(|a| occ.aff_pmf(a).unwrap()).sum();
                assert_eq!(total, Exact::one(), "{w} n={n} k={k}");
            }
        }
    }
}

#[test]
fn frequency_moments() {
    let w = WeightSequence::new_engen(Param::ratio(1, 2)).unwrap();
    let occ = exact(&w, q(4, 3), 5, 7);
    let comp = occ.component_pmf();
    let mut total = Exact::zero();
    for i in 1..=7 {
        let mut r = vec![0u64; 7];
        r[i - 1] = 1;
        let m = occ.aff_factorial_moments(&r).unwrap();
        assert_eq!(m, int(5) * &comp[i]);
        total += int(i as i64) * m;
    }
    assert_eq!(total, int(7));
    assert_eq!(occ.aff_factorial_moments(&[0; 7]).unwrap(), Exact::one());
    assert_eq!(occ.aff_factorial_moments(&[6, 0, 0, 0, 0, 0, 0]).unwrap(), Exact::zero());
    assert_eq!(occ.aff_factorial_moments(&[0, 4, 0, 0, 0, 0, 0]).unwrap(), Exact::zero());

    // n = k = 3 with all boxes occupied or two occupied: {n}_p = n!.
    let occ = exact(&WeightSequence::log_series(), int(1), 3, 3);
    assert_eq!(occ.aff_factorial_moments(&[3, 0, 0]).unwrap(), int(6) * occ.joint_pmf(&[1, 1, 1]).unwrap());
    assert_eq!(occ.aff_factorial_moments(&[1, 1, 0]).unwrap(), int(6) * occ.joint_pmf(&[2, 1, 0]).unwrap());
    // One occupied box: {3}_1 = 3.
    assert_eq!(occ.aff_factorial_moments(&[0, 0, 1]).unwrap(), int(3) * occ.joint_pmf(&[3, 0, 0]).unwrap());
}

#[test]
fn occupancy_factorial_moments() {
    let ls = WeightSequence::log_series();
    let occ = exact(&ls, int(1), 2, 3);
    let law = BruteLaw::new(&phi_exact(&ls, 3), &int(1), 2, 3);
    let want = law.expect(|c| int((c[0] * c[1]) as i64));
    assert_eq!(occ.k_factorial_moments(&[1, 1]).unwrap(), want);
    assert_eq!(occ.k_factorial_moments(&[]).unwrap(), Exact::one());
    assert_eq!(occ.k_factorial_moments(&[0, 0]).unwrap(), Exact::one());
    assert_eq!(occ.k_factorial_moments(&[3, 0]).unwrap(), fact(3) * &occ.component_pmf()[3]);
    assert_eq!(occ.k_factorial_moments(&[2, 2]).unwrap(), Exact::zero());
    assert!(matches!(occ.k_factorial_moments(&[1, 1, 1]), Err(Error::Contract(_))));
}

#[test]
fn brute_force_oracle() {
    let ls = WeightSequence::log_series();
    let law = enumerate_oracle::<Exact>(&ls, int(1), 3, 4).unwrap();
    let total: Exact = law.iter().map(|e| e.1.clone()).sum();
    assert_eq!(total, Exact::one());
    let mut comp = vec![Exact::zero(); 5];
    for (c, p) in &law {
        comp[c[0] as usize] += p;
    }
    assert_eq!(comp, exact(&ls, int(1), 3, 4).component_pmf());

    let cy = WeightSequence::cayley();
    let law = enumerate_oracle::<Exact>(&cy, int(2), 3, 5).unwrap();
    let mut distinct = vec![Exact::zero(); 4];
    for (c, p) in &law {
        distinct[c.iter().filter(|&&x| x > 0).count()] += p;
    }
    assert_eq!(distinct, exact(&cy, int(2), 3, 5).pnk_pmf());

    assert!(matches!(enumerate_oracle::<f64>(&ls, 1.0, 30, 30), Err(Error::TooLarge(_))));
}

#[test]
fn alternating_form_agrees() {
    for w in [WeightSequence::log_series(), WeightSequence::cayley(), WeightSequence::engen(Param::ratio(1, 3)).unwrap()] {
        for n in 1..=10u64 {
            for k in 0..=10usize {
                let occ = exact(&w, q(5, 4), n, k);
                assert_eq!(occ.pnk_pmf(), occ.pnk_pmf_alternating(), "{w} n={n} k={k}");
            }
        }
    }
}

#[test]
fn law_of_succession() {
    // P(P_{n,k+1}=p) = ((n−p+1)θ/(nθ+k)) P(P_{n,k}=p−1) + ((pθ+k)/(nθ+k)) P(P_{n,k}=p).
    let ls = WeightSequence::log_series();
    let theta = q(2, 3);
    for n in 1..=12u64 {
        for k in 0..12usize {
            let now = exact(&ls, theta.clone(), n, k).pnk_pmf();
            let next = exact(&ls, theta.clone(), n, k + 1).pnk_pmf();
            let at = |v: &Vec<Exact>, p: usize| v.get(p).cloned().unwrap_or_else(Exact::zero);
            let den = int(n as i64) * &theta + int(k as i64);
            for p in 1..next.len() {
                let want = int(n as i64 - p as i64 + 1) * &theta / &den * at(&now, p - 1)
                    + (int(p as i64) * &theta + int(k as i64)) / &den * at(&now, p);
                assert_eq!(next[p], want, "n={n} k={k} p={p}");
            }
        }
    }
}

#[test]
fn normalization_identity() {
    // Σ_a k!/(n−Σa)! Π (σ_i/i!)^{a_i}/a_i! = σ_k(nθ)/n!.
    for w in families() {
        let theta = q(7, 5);
        for n in 1..=8u64 {
            for k in 1..=8u64 {
                let occ = exact(&w, theta.clone(), n, k as usize);
                let mut total = Exact::zero();
                for aff in partitions_aff(k) {
                    let p: u64 = aff.iter().sum();
                    if p > n {
                        continue;
                    }
                    let mut term = fact(k) / fact(n - p);
                    for (idx, &ai) in aff.iter().enumerate() {
                        let i = idx as u64 + 1;
                        term = term * pow(&(occ.sigma_one().get(i as usize) / fact(i)), ai) / fact(ai);
                    }
                    total += term;
                }
                assert_eq!(total, occ.sigma_all().get(k as usize) / fact(n), "{w} n={n} k={k}");
            }
        }
    }
}

#[test]
fn log_space_handles_large_instances() {
    let occ = Occupancy::<LogF64>::new(&WeightSequence::cayley(), LogF64::new(0.7), 5000, 400).unwrap();
    let pmf = occ.pnk_pmf();
    let total: f64 = pmf.iter().map(Scalar::to_f64).sum();
    assert!((total - 1.0).abs() < 1e-10, "{total}");
    let (mean, var) = occ.pnk_mean_var();
    let m: f64 = pmf.iter().enumerate().map(|(p, x)| p as f64 * x.to_f64()).sum();
    assert!((mean - m).abs() < 1e-8 * m);
    assert!(var > 0.0);
}

fn family_index() -> impl Strategy<Value = usize> {
    0usize..8
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exchangeable(fam in family_index(), n in 1usize..6, k in 0usize..9, tn in 1i64..12, seed in any::<u64>()) {
        let w = &families()[fam];
        let occ = exact(w, q(tn, 3), n as u64, k);
        let comps = compositions(k as u64, n, 0);
        let counts = &comps[(seed as usize) % comps.len()];
        let mut perm = counts.clone();
        let mut s = seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(occ.joint_pmf(counts).unwrap(), occ.joint_pmf(&perm).unwrap());
    }

    #[test]
    fn laws_normalize(fam in family_index(), n in 1u64..40, k in 0usize..40, theta in 0.05f64..8.0) {
        let w = &families()[fam];
        let occ = Occupancy::<LogF64>::new(w, LogF64::new(theta), n, k).unwrap();
        let sum = |v: Vec<LogF64>| v.iter().map(Scalar::to_f64).sum::<f64>();
        prop_assert!((sum(occ.pnk_pmf()) - 1.0).abs() < 1e-12);
        prop_assert!((sum(occ.component_pmf()) - 1.0).abs() < 1e-12);
        if n > 1 {
            prop_assert!((sum(occ.partialsum_pmf(n / 2).unwrap()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_and_variance_match_pmf(fam in family_index(), n in 2u64..30, k in 1usize..30, theta in 0.05f64..8.0) {
        let w = &families()[fam];
        let occ = Occupancy::<f64>::new(w, theta, n, k).unwrap();
        let pmf = occ.pnk_pmf();
        let m1: f64 = pmf.iter().enumerate().map(|(p, x)| p as f64 * x).sum();
        let m2: f64 = pmf.iter().enumerate().map(|(p, x)| (p * p) as f64 * x).sum();
        let (mean, var) = occ.pnk_mean_var();
        prop_assert!((mean - m1).abs() <= 1e-10 * m1);
        // The closed-form variance subtracts nearly equal terms; compare on the scale of E[P²].
        prop_assert!((var - (m2 - m1 * m1)).abs() <= 1e-10 * m2);
    }

    #[test]
    fn partial_sum_symmetry(fam in family_index(), n in 2u64..9, k in 0usize..12, tn in 1i64..10) {
        let w = &families()[fam];
        let occ = exact(w, q(tn, 4), n, k);
        for m in 1..n {
            let a = occ.partialsum_pmf(m).unwrap();
            let b = occ.partialsum_pmf(n - m).unwrap();
            for l in 0..=k {
                prop_assert_eq!(&a[l], &b[k - l]);
            }
        }
    }

    #[test]
    fn generating_function(fam in family_index(), n in 1u64..12, k in 0usize..15, theta in 0.1f64..5.0) {
        let w = &families()[fam];
        let occ = Occupancy::<f64>::new(w, theta, n, k).unwrap();
        let pmf = occ.pnk_pmf();
        for u in [0.3f64, 0.7, 1.0] {
            let direct: f64 = pmf.iter().enumerate().map(|(p, x)| u.powi(p as i32) * x).sum();
            prop_assert!((direct - occ.pnk_pgf(&u)).abs() < 1e-10, "u={}", u);
        }
    }

    #[test]
    fn factorial_moments_match_enumeration(fam in 0usize..4, n in 1usize..5, k in 0usize..7, l0 in 0u64..4, l1 in 0u64..4) {
        let (name, w) = &oracle_families()[fam];
        let theta = q(3, 2);
        let law = BruteLaw::new(&phi_exact(w, k), &theta, n, k);
        let occ = exact(w, theta, n as u64, k);
        let l: Vec<u64> = [l0, l1].into_iter().take(n).collect();
        let want = law.expect(|c| {
            l.iter().zip(c).map(|(&lm, &cm)| falling(&int(cm as i64), lm)).product()
        });
        prop_assert_eq!(occ.k_factorial_moments(&l).unwrap(), want, "{} l={:?}", name, l);
    }
}
