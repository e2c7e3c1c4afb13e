use qp_core::appendix::{
    appendix_system, check_basis, check_completion_fixpoint, check_exactness, check_overlaps, check_recursion, e_dim,
    graded_dims, AppendixQuiver,
};
use qp_core::jacobi::enumerate_paths;

#[test]
fn quiver_shape() {
    for n in 1..=4 {
        let aq = AppendixQuiver::new(n).unwrap();
        let nv = n + 1;
        assert_eq!(aq.quiver.vertices, nv);
        assert_eq!(aq.quiver.arrows.len(), 2 * nv + nv * nv);
        let loops = aq.quiver.arrows.iter().filter(|a| a.tail == a.head && a.weight == 2).count();
        assert_eq!(loops, nv * nv);
        assert_eq!(aq.relations(10).len(), nv * (2 * nv + 2 + nv * (nv - 1) / 2));
    }
}

#[test]
fn e_dimensions() {
    assert_eq!((0..6).map(|d| e_dim(1, d)).collect::<Vec<_>>(), vec![1, 0, 0, 0, 0, 0]);
    assert_eq!((0..6).map(|d| e_dim(2, d)).collect::<Vec<_>>(), vec![1, 0, 1, 0, 1, 0]);
    assert_eq!((0..8).map(|d| e_dim(3, d)).collect::<Vec<_>>(), vec![1, 0, 2, 0, 3, 0, 4, 0]);
    assert_eq!(e_dim(4, 4), 6);
    assert_eq!(e_dim(3, -2), 0);
}

#[test]
fn irreducible_counts_match_brute_force() {
    let (aq, sys) = appendix_system(2, 9).unwrap();
    let leads: Vec<Vec<u8>> = sys.rules.iter().map(|r| r.lead.word.to_vec()).collect();
    let mut brute = vec![0u64; 9];
    for p in enumerate_paths(&aq.quiver, 9, usize::MAX).unwrap() {
        if p.head == 0 && !leads.iter().any(|l| p.word.windows(l.len()).any(|w| w == l.as_slice())) {
            brute[p.wt as usize] += 1;
        }
    }
    assert_eq!(graded_dims(&sys, 0), brute);
}

#[test]
fn head_zero_paths_are_abl() {
    let (aq, sys) = appendix_system(3, 9).unwrap();
    for p in sys.irreducible_paths() {
        assert!(aq.in_abl(&p), "{}", p.display(&aq.quiver));
    }
}

#[test]
fn checks_pass_for_small_n() {
    for n in 1..=3 {
        for r in [
            check_overlaps(n, 10).unwrap(),
            check_basis(n, 9).unwrap(),
            check_recursion(n, 10).unwrap(),
            check_exactness(n, 10).unwrap(),
            check_completion_fixpoint(n, 10).unwrap(),
        ] {
            assert!(r.pass, "{} n={n}: {:?}", r.check, r.witnesses);
        }
    }
}

#[test]
fn exactness_at_n2_d8() {
    let r = check_exactness(2, 8).unwrap();
    assert!(r.pass);
    assert_eq!((r.n, r.d, r.check.as_str()), (2, 8, "exactness"));
}
