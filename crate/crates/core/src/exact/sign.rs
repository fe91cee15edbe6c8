use num_traits::Signed;

/// Number of sign changes between consecutive entries once zeros are removed.
pub fn sign_variation<T: Signed>(seq: &[T]) -> usize {
    let mut last: Option<bool> = None;
    let mut changes = 0;
    for x in seq.iter().filter(|x| !x.is_zero()) {
        let positive = x.is_positive();
        if last.is_some_and(|l| l != positive) {
            changes += 1;
        }
        last = Some(positive);
    }
    changes
}

/// Minimum over `q` of `1 + sgnvar` of the sequence with entry `q` deleted and
/// every entry before it negated. Equals `sign_variation(seq)` whenever that is
/// nonzero. `None` for an empty sequence.
pub fn sign_variation_by_deletion<T: Signed + Clone>(seq: &[T]) -> Option<usize> {
    (0..seq.len())
        .map(|q| {
            let rest: Vec<T> = seq[..q]
                .iter()
                .map(|x| -x.clone())
                .chain(seq[q + 1..].iter().cloned())
                .collect();
            1 + sign_variation(&rest)
        })
        .min()
}
