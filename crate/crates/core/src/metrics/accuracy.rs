/// `|R@K ∩ T| / |T|` for one user; zero when `T` is empty.
pub fn user_recall(recommended: &[usize], positives: &[usize], k: usize) -> f64 {
    if positives.is_empty() {
        return 0.0;
    }
    let hits = recommended.iter().take(k).filter(|v| positives.contains(v)).count();
    hits as f64 / positives.len() as f64
}

/// Binary-relevance NDCG@K for one user; zero when `T` is empty.
pub fn user_ndcg(recommended: &[usize], positives: &[usize], k: usize) -> f64 {
    if positives.is_empty() {
        return 0.0;
    }
    let discount = |i: usize| 1.0 / ((i + 2) as f64).log2();
    let dcg: f64 = recommended
        .iter()
        .take(k)
        .enumerate()
        .filter(|(_, v)| positives.contains(v))
        .map(|(i, _)| discount(i))
        .sum();
    let ideal: f64 = (0..positives.len().min(k)).map(discount).sum();
    dcg / ideal
}

/// Mean of [`user_recall`] over all users, including those without positives.
pub fn recall_at_k(recommended: &[Vec<usize>], positives: &[Vec<usize>], k: usize) -> f64 {
    mean_over_users(recommended, positives, k, user_recall)
}

/// Mean of [`user_ndcg`] over all users, including those without positives.
pub fn ndcg_at_k(recommended: &[Vec<usize>], positives: &[Vec<usize>], k: usize) -> f64 {
    mean_over_users(recommended, positives, k, user_ndcg)
}

fn mean_over_users(
    recommended: &[Vec<usize>],
    positives: &[Vec<usize>],
    k: usize,
    per_user: fn(&[usize], &[usize], usize) -> f64,
) -> f64 {
    assert_eq!(recommended.len(), positives.len(), "one list per user");
    if positives.is_empty() {
        return 0.0;
    }
    let total: f64 = recommended.iter().zip(positives).map(|(r, t)| per_user(r, t, k)).sum();
    total / positives.len() as f64
}
