/// Hubert-Arabie ARI from explicit pair counting over all C(n, 2) pairs.
pub fn brute_force_ari(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    let (mut both, mut only_a, mut only_b, mut pairs) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let sa = a[i] == a[j];
            let sb = b[i] == b[j];
            pairs += 1;
            match (sa, sb) {
                (true, true) => both += 1,
                (true, false) => only_a += 1,
                (false, true) => only_b += 1,
                _ => {}
            }
        }
    }
    let same_a = both + only_a;
    let same_b = both + only_b;
    // (N*both - A*B) / (N*(A+B)/2 - A*B), doubled to stay in integers.
    let num = 2 * (pairs * both - same_a * same_b);
    let den = pairs * (same_a + same_b) - 2 * same_a * same_b;
    if den == 0 {
        return if same_pairs(a, b) { 1.0 } else { 0.0 };
    }
    num as f64 / den as f64
}

fn same_pairs(a: &[usize], b: &[usize]) -> bool {
    (0..a.len()).all(|i| (0..a.len()).all(|j| (a[i] == a[j]) == (b[i] == b[j])))
}
