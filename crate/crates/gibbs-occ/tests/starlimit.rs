mod common;

use common::*;
use gibbs_occ::stats::tv_distance;
use gibbs_occ::{BellTriangle, Error, Exact, LogF64, Occupancy, Param, Scalar, StarModel, WeightSequence};
use num_traits::{One, Zero};

fn model(w: &WeightSequence, gamma: Exact, k_max: usize) -> StarModel<Exact> {
    StarModel::new(w, gamma, k_max).unwrap()
}

fn families() -> Vec<WeightSequence> {
    vec![
        WeightSequence::log_series(),
        WeightSequence::cayley(),
        WeightSequence::neg_bin(Param::ratio(1, 2)).unwrap(),
        WeightSequence::engen(Param::ratio(1, 2)).unwrap(),
        WeightSequence::new_engen(Param::ratio(1, 2)).unwrap(),
    ]
}

#[test]
fn joint_law_examples() {
    for w in families() {
        let phi = phi_exact(&w, 8);
        let gamma = q(3, 2);
        let m = model(&w, gamma.clone(), 8);
        for k in 1..=8usize {
            let sigma = sigma_brute(&phi, &gamma, k);
            assert_eq!(m.star_joint_pmf(&[k as u64]).unwrap(), &gamma * &phi[k] / &sigma, "{w} k={k}");
            let mut total = Exact::zero();
            for p in 1..=k {
                for comp in compositions(k as u64, p, 1) {
                    total += m.star_joint_pmf(&comp).unwrap();
                }
            }
            assert_eq!(total, Exact::one(), "{w} k={k}");
        }
    }
    let m = model(&WeightSequence::cayley(), int(1), 4);
    assert!(matches!(m.star_joint_pmf(&[2, 0, 1]), Err(Error::Contract(_))));
    assert!(matches!(m.star_joint_pmf(&[3, 3]), Err(Error::Contract(_))));
}

#[test]
fn conditionals_do_not_depend_on_gamma() {
    for w in families() {
        let a = model(&w, q(1, 2), 9);
        let b = model(&w, int(3), 9);
        for k in 1..=9usize {
            let (pa, pb) = (a.star_pnk_pmf(k).unwrap(), b.star_pnk_pmf(k).unwrap());
            for p in 1..=k {
                for comp in compositions(k as u64, p, 1) {
                    let ca = a.star_joint_pmf(&comp).unwrap() / &pa[p];
                    let cb = b.star_joint_pmf(&comp).unwrap() / &pb[p];
                    assert_eq!(ca, cb, "{w} counts {comp:?}");
                }
            }
            for aff in partitions_aff(k as u64) {
                let p = aff.iter().sum::<u64>() as usize;
                let ca = a.star_aff_pmf(&aff).unwrap() / &pa[p];
                let cb = b.star_aff_pmf(&aff).unwrap() / &pb[p];
                assert_eq!(ca, cb, "{w} aff {aff:?}");
            }
        }
    }
}

#[test]
fn ewens_microcanonical_law() {
    // Conditionally on p species: k!/(p!·s_{k,p}) Π 1/k_q.
    let ls = WeightSequence::log_series();
    let s1 = stirling1(10);
    let m = model(&ls, q(7, 4), 10);
    for k in 1..=10usize {
        let pmf = m.star_pnk_pmf(k).unwrap();
        for p in 1..=k {
            for comp in compositions(k as u64, p, 1) {
                let mut want = fact(k as u64) / (fact(p as u64) * &s1[k][p]);
                for &c in &comp {
                    want = want / int(c as i64);
                }
                assert_eq!(m.star_joint_pmf(&comp).unwrap() / &pmf[p], want);
            }
        }
    }
}

#[test]
fn pitman_microcanonical_law() {
    // Engen weights give, conditionally on p, mass ∝ k!/Π(i!^{a_i} a_i!) Π ((1−α)_{i−1})^{a_i}.
    let alpha = q(1, 3);
    let w = WeightSequence::engen(Param::ratio(1, 3)).unwrap();
    let m = model(&w, q(5, 2), 9);
    for k in 1..=9u64 {
        let pmf = m.star_pnk_pmf(k as usize).unwrap();
        let parts = partitions_aff(k);
        let weight = |aff: &[u64]| -> Exact {
            let mut v = fact(k);
            for (idx, &a) in aff.iter().enumerate() {
                let i = idx as u64 + 1;
                v = v * pow(&(rising(&(int(1) - &alpha), i - 1) / fact(i)), a) / fact(a);
            }
            v
        };
        for p in 1..=k {
            let same_p: Vec<&Vec<u64>> = parts.iter().filter(|a| a.iter().sum::<u64>() == p).collect();
            let norm: Exact = same_p.iter().map(|a| weight(a)).sum();
            for aff in same_p {
                let cond = m.star_aff_pmf(aff).unwrap() / &pmf[p as usize];
                assert_eq!(cond, weight(aff) / &norm, "k={k} aff={aff:?}");
            }
        }
    }
}

#[test]
fn distinct_count_law() {
    for w in families() {
        let phi = phi_exact(&w, 12);
        let gamma = q(2, 3);
        let m = model(&w, gamma.clone(), 12);
        let bt = BellTriangle::<Exact>::of_phi(&w, 12).unwrap();
        for k in 1..=12usize {
            let pmf = m.star_pnk_pmf(k).unwrap();
            assert_eq!(pmf.len(), k + 1);
            assert_eq!(pmf.iter().cloned().sum::<Exact>(), Exact::one());
            let sigma = sigma_brute(&phi, &gamma, k.min(8));
            if k <= 8 {
                assert_eq!(pmf[k], pow(&(&gamma * &phi[1]), k as u64) / &sigma);
            }
            // PGF: E*(u^P) = σ_k(γu)/σ_k(γ).
            for u in [q(3, 10), q(7, 10), int(1)] {
                let lhs: Exact = pmf.iter().enumerate().map(|(p, x)| pow(&u, p as u64) * x).sum();
                assert_eq!(lhs, bt.sigma_at(k, &(&gamma * &u)) / bt.sigma_at(k, &gamma));
            }
            let mean: Exact = pmf.iter().enumerate().map(|(p, x)| int(p as i64) * x).sum();
            assert_eq!(mean, m.star_pnk_mean(k).unwrap());
        }
        assert_eq!(m.star_pnk_pmf(1).unwrap(), vec![int(0), int(1)]);
        assert!(m.star_pnk_pmf(13).is_err());
    }
}

#[test]
fn frequency_law() {
    let w = WeightSequence::cayley();
    let phi = phi_exact(&w, 10);
    let gamma = q(5, 3);
    let m = model(&w, gamma.clone(), 10);
    let s2 = &gamma * &phi[2] + &gamma * &gamma * &phi[1] * &phi[1];
    assert_eq!(m.star_aff_pmf(&[2, 0]).unwrap(), &gamma * &gamma * &phi[1] * &phi[1] / &s2);
    assert_eq!(m.star_aff_pmf(&[0, 1]).unwrap(), &gamma * &phi[2] / &s2);
    let bt = BellTriangle::<Exact>::of_phi(&w, 10).unwrap();
    for k in 1..=10u64 {
        let parts = partitions_aff(k);
        let total: Exact = parts.iter().map(|a| m.star_aff_pmf(a).unwrap()).sum();
        assert_eq!(total, Exact::one());
        let two: Exact =
            parts.iter().filter(|a| a.iter().sum::<u64>() == 2).map(|a| m.star_aff_pmf(a).unwrap()).sum();
        assert_eq!(two, &gamma * &gamma * bt.get(k as usize, 2) / bt.sigma_at(k as usize, &gamma));
    }
}

#[test]
fn frequency_moments() {
    for w in families() {
        let gamma = q(4, 3);
        let m = model(&w, gamma.clone(), 8);
        for k in 1..=8u64 {
            let parts = partitions_aff(k);
            let pmf = m.star_pnk_pmf(k as usize).unwrap();
            // Prefixes of partitions give orders r with κ ≤ k; compare with the enumeration.
            for r in parts.iter().flat_map(|a| {
                let a = a.clone();
                (0..=a.len()).map(move |cut| a.iter().take(cut).cloned().collect::<Vec<u64>>())
            }) {
                let want: Exact = parts
                    .iter()
                    .map(|a| {
                        let f: Exact =
                            r.iter().zip(a).map(|(&ri, &ai)| falling(&int(ai as i64), ri)).product();
                        f * m.star_aff_pmf(a).unwrap()
                    })
                    .sum();
                assert_eq!(m.star_aff_moments(k as usize, &r).unwrap(), want, "{w} k={k} r={r:?}");
            }
            let mut top = vec![0u64; k as usize];
            top[k as usize - 1] = 1;
            assert_eq!(m.star_aff_moments(k as usize, &top).unwrap(), pmf[1]);
            assert_eq!(m.star_aff_moments(k as usize, &[]).unwrap(), Exact::one());
            let mut over = vec![0u64; k as usize];
            over[0] = k + 1;
            assert_eq!(m.star_aff_moments(k as usize, &over).unwrap(), Exact::zero());
        }
    }
}

#[test]
fn watterson_form() {
    let gamma = q(9, 4);
    let m = model(&WeightSequence::log_series(), gamma.clone(), 10);
    for k in 1..=10u64 {
        for i in 1..=k {
            let mut r = vec![0u64; i as usize];
            r[i as usize - 1] = 1;
            let want = &gamma / int(i as i64) * falling(&int(k as i64), i) * rising(&gamma, k - i) / rising(&gamma, k);
            assert_eq!(m.star_aff_moments(k as usize, &r).unwrap(), want);
        }
    }
}

#[test]
fn family_recursions() {
    // NegBin: P*(P_{k+1}=p) = (σ_k/σ_{k+1})(αγ P*(P_k=p−1) + (k+pα) P*(P_k=p)); Engen with k−pα.
    for (alpha, sign) in [(q(1, 2), 1i64), (q(5, 2), 1), (q(1, 2), -1), (q(1, 3), -1)] {
        let w = if sign > 0 {
            WeightSequence::neg_bin(Param::exact(alpha.clone())).unwrap()
        } else {
            WeightSequence::engen(Param::exact(alpha.clone())).unwrap()
        };
        let gamma = q(7, 3);
        let m = model(&w, gamma.clone(), 16);
        for k in 1..=15usize {
            let now = m.star_pnk_pmf(k).unwrap();
            let next = m.star_pnk_pmf(k + 1).unwrap();
            let ratio = m.sigma().get(k) / m.sigma().get(k + 1);
            for p in 1..=k + 1 {
                let prev = if p >= 2 { now[p - 1].clone() } else { Exact::zero() };
                let same = now.get(p).cloned().unwrap_or_else(Exact::zero);
                let coeff = int(k as i64) + int(sign * p as i64) * &alpha;
                let want = &ratio * (&alpha * &gamma * prev + coeff * same);
                assert_eq!(next[p], want, "{w} k={k} p={p}");
            }
        }
    }
}

#[test]
fn small_diversity_concentrates_on_one_species() {
    let gamma = 1e-4;
    for w in families() {
        let m = StarModel::<f64>::new(&w, gamma, 10).unwrap();
        let bt = BellTriangle::<f64>::of_phi(&w, 10).unwrap();
        for k in 2..=10 {
            let p1 = m.star_pnk_pmf(k).unwrap()[1];
            let bound = 2.0 * gamma * bt.get(k, 2) / bt.get(k, 1);
            assert!(1.0 - p1 <= bound, "{w} k={k}: {p1}");
        }
    }
}

#[test]
fn finite_laws_converge_to_the_limit() {
    let gamma = 1.0;
    for w in families() {
        for k in [2usize, 5, 10] {
            let star = StarModel::<LogF64>::new(&w, LogF64::new(gamma), k).unwrap();
            let limit: Vec<f64> = star.star_pnk_pmf(k).unwrap().iter().map(Scalar::to_f64).collect();
            let mut last = f64::INFINITY;
            for n in [100u64, 1_000, 10_000] {
                let occ = Occupancy::<LogF64>::new(&w, LogF64::new(gamma / n as f64), n, k).unwrap();
                let finite: Vec<f64> = occ.pnk_pmf().iter().map(Scalar::to_f64).collect();
                let tv = tv_distance(&finite, &limit);
                assert!(tv < last, "{w} k={k} n={n}: {tv} not below {last}");
                last = tv;
            }
            assert!(last < 2e-3, "{w} k={k}: {last}");
        }
    }
}

#[test]
fn exact_and_log_models_agree() {
    for w in families() {
        let e = model(&w, q(5, 2), 20);
        let l = StarModel::<LogF64>::new(&w, LogF64::new(2.5), 20).unwrap();
        let pe = e.star_pnk_pmf(20).unwrap();
        let pl = l.star_pnk_pmf(20).unwrap();
        for (a, b) in pe.iter().zip(&pl) {
            let a = gibbs_occ::scalar::rational_to_f64(a);
            assert!((a - b.to_f64()).abs() <= 1e-12 * a.max(1e-300), "{w}");
        }
        assert_eq!(*l.gamma(), LogF64::new(2.5));
        assert_eq!(l.k_max(), 20);
    }
}
