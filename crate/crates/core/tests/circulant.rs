use itertools::Itertools;
use nonloc_core::circulant::{CirculantSpec, Permutation};
use nonloc_core::numerics::ComplexMatrix;
use nonloc_core::XState;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn perms_fixing_zero(m: usize) -> impl Iterator<Item = Permutation> {
    (1..m)
        .permutations(m - 1)
        .map(|tail| Permutation::new(std::iter::once(0).chain(tail).collect()).unwrap())
}

#[test]
fn direct_sum_for_every_permutation() {
    let mut count = 0;
    for m in 2..=4 {
        for pi in perms_fixing_zero(m) {
            let spec = CirculantSpec::zeros(m, pi).unwrap();
            assert!(spec.verify_direct_sum(), "m = {m}, pi = {:?}", spec.permutation());
            count += 1;
        }
    }
    assert_eq!(count, 1 + 2 + 6);
}

#[test]
fn xstate_pattern() {
    let x = XState::new(
        0.4,
        0.1,
        0.2,
        0.3,
        Complex64::new(0.1, 0.05),
        Complex64::new(-0.05, 0.1),
    )
    .unwrap();
    let op = CirculantSpec::from_xstate(&x).build_operator();
    assert_eq!(op.max_abs_diff(&x.to_matrix()), Some(0.0));
    for (i, j) in (0..4).cartesian_product(0..4) {
        if i != j && i + j != 3 {
            assert_eq!(op[(i, j)], Complex64::new(0.0, 0.0));
        }
    }
}

#[test]
fn blocks_live_on_their_subspaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for pi in perms_fixing_zero(3) {
        let coeffs = (0..3)
            .map(|_| {
                let data = (0..9).map(|_| Complex64::new(rng.random(), rng.random())).collect();
                ComplexMatrix::new(3, 3, data).unwrap()
            })
            .collect();
        let spec = CirculantSpec::new(3, 3, pi, coeffs).unwrap();
        for alpha in 0..3 {
            let block = spec.block_operator(alpha).unwrap();
            let support = spec.subspace_indices(alpha).unwrap();
            for (r, c) in (0..9).cartesian_product(0..9) {
                if !(support.contains(&r) && support.contains(&c)) {
                    assert_eq!(block[(r, c)], Complex64::new(0.0, 0.0));
                }
            }
        }
    }
}

/// Random X-state parameters, roughly half of them positive.
fn random_xstate(rng: &mut ChaCha8Rng) -> XState {
    let mut pops: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
    let total: f64 = pops.iter().sum();
    pops.iter_mut().for_each(|p| *p /= total);
    let [a, b, c, d] = pops;
    let mut coherence = |bound: f64| {
        let r = bound * rng.random_range(0.0..1.4);
        Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
    };
    let w = coherence((a * d).sqrt());
    let z = coherence((b * c).sqrt());
    XState { a, b, c, d, w, z }
}

#[test]
fn circulant_state_matches_xstate_inequalities() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut valid = 0;
    for _ in 0..1000 {
        let x = random_xstate(&mut rng);
        let spec = CirculantSpec::from_xstate(&x);
        let closed_form = x.a * x.d >= x.w.norm_sqr() && x.b * x.c >= x.z.norm_sqr();
        assert_eq!(spec.is_circulant_state(), closed_form, "{x:?}");
        valid += closed_form as usize;
    }
    assert!((200..800).contains(&valid), "{valid}");
}

#[test]
fn rejects_non_square_and_bad_permutations() {
    assert!(Permutation::new(vec![1, 0]).is_err());
    assert!(Permutation::new(vec![0, 0]).is_err());
    let pi = Permutation::identity(2);
    assert!(CirculantSpec::new(3, 2, pi, vec![ComplexMatrix::zeros(2, 2); 2]).is_err());
}
