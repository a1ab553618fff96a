//! Tree of shapes against a brute-force level-set enumeration.

mod oracles;

use dtsynth::tos::flst;
use oracles::tos::{assert_matches_oracle, brute_force_tree, check_structure, tree_relation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn all_3x3_images_over_three_levels() {
    let values = [0u8, 128, 255];
    let mut img = [0u8; 9];
    for code in 0..3usize.pow(9) {
        let mut c = code;
        for px in img.iter_mut() {
            *px = values[c % 3];
            c /= 3;
        }
        let t = flst(&img, 3, 3);
        let got = tree_relation(&t);
        let want = brute_force_tree(&img, 3, 3);
        assert_eq!(got, want, "image {img:?}\n{}", t.dump());
    }
}

#[test]
fn random_small_images() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        let h = rng.gen_range(1..8);
        let w = rng.gen_range(1..8);
        let levels = rng.gen_range(2..6);
        let img: Vec<u8> = (0..h * w).map(|_| (rng.gen_range(0..levels) * 50) as u8).collect();
        assert_matches_oracle(&img, h, w);
    }
}

#[test]
fn flst_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let img: Vec<u8> = (0..32 * 32).map(|_| rng.gen()).collect();
    let a = flst(&img, 32, 32);
    let b = flst(&img, 32, 32);
    assert_eq!(a, b);
    check_structure(&a, &img);
}

#[test]
fn nesting_is_strict_along_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let img: Vec<u8> = (0..24 * 24).map(|_| rng.gen_range(0..8) * 30).collect();
    let t = flst(&img, 24, 24);
    for i in 0..t.len() {
        let mut area = t.shape(i).area;
        for a in t.ancestors(i) {
            assert!(t.shape(a).area > area);
            area = t.shape(a).area;
        }
    }
}
