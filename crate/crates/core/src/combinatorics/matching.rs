/// Maximum bipartite matching by augmenting paths.
///
/// `adj[l]` lists the right vertices adjacent to left vertex `l`; lower
/// indices are tried first. Returns the matched right vertex per left vertex.
pub fn bipartite_matching(adj: &[Vec<usize>], right: usize) -> Vec<Option<usize>> {
    let mut match_right: Vec<Option<usize>> = vec![None; right];
    for l in 0..adj.len() {
        let mut seen = vec![false; right];
        augment(l, adj, &mut match_right, &mut seen);
    }
    let mut match_left = vec![None; adj.len()];
    for (r, l) in match_right.iter().enumerate() {
        if let Some(l) = *l {
            match_left[l] = Some(r);
        }
    }
    match_left
}

fn augment(l: usize, adj: &[Vec<usize>], match_right: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &r in &adj[l] {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        if match_right[r].is_none_or(|other| augment(other, adj, match_right, seen)) {
            match_right[r] = Some(l);
            return true;
        }
    }
    false
}
