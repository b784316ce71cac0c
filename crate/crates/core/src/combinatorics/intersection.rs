//! Maximum-cardinality matroid intersection by shortest augmenting paths in
//! the exchange graph.

use std::collections::VecDeque;

use super::matroid::IndependenceOracle;
use super::CombinatoricsError;

/// Returns a maximum common independent set, sorted ascending.
///
/// Each round builds the exchange graph of the current set `I`: an arc
/// `y -> x` when `I - y + x` is independent in `first`, an arc `x -> y` when
/// it is independent in `second`. A shortest path from an element addable in
/// `first` to one addable in `second` is augmented. Search order always
/// prefers lower element indices.
pub fn matroid_intersection_max<A, B>(first: &A, second: &B) -> Result<Vec<usize>, CombinatoricsError>
where
    A: IndependenceOracle + ?Sized,
    B: IndependenceOracle + ?Sized,
{
    let n = first.ground_size();
    if second.ground_size() != n {
        return Err(CombinatoricsError::GroundMismatch {
            first: n,
            second: second.ground_size(),
        });
    }
    if !first.is_independent(&[]) || !second.is_independent(&[]) {
        return Err(CombinatoricsError::OracleInconsistent("empty set is dependent".into()));
    }

    let mut member = vec![false; n];
    let mut current: Vec<usize> = Vec::new();

    // Cheap start: add everything independent in both.
    for x in 0..n {
        current.push(x);
        if first.is_independent(&current) && second.is_independent(&current) {
            member[x] = true;
        } else {
            current.pop();
        }
    }

    check_hereditary(first, second, &current)?;

    loop {
        let outside: Vec<usize> = (0..n).filter(|&x| !member[x]).collect();
        if outside.is_empty() {
            break;
        }
        let mut with = current.clone();
        let mut is_source = vec![false; n];
        let mut is_sink = vec![false; n];
        for &x in &outside {
            with.push(x);
            is_source[x] = first.is_independent(&with);
            is_sink[x] = second.is_independent(&with);
            with.pop();
        }

        // Adjacency: out[v] lists heads of arcs leaving v.
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (pos, &y) in current.iter().enumerate() {
            let mut swapped = current.clone();
            for &x in &outside {
                swapped[pos] = x;
                if first.is_independent(&swapped) {
                    out[y].push(x);
                }
                if second.is_independent(&swapped) {
                    out[x].push(y);
                }
            }
        }
        for list in &mut out {
            list.sort_unstable();
        }

        let Some(path) = shortest_path(&outside, &is_source, &is_sink, &out, n) else {
            break;
        };
        for v in path {
            member[v] = !member[v];
        }
        current = (0..n).filter(|&v| member[v]).collect();
        if !first.is_independent(&current) || !second.is_independent(&current) {
            return Err(CombinatoricsError::OracleInconsistent(format!(
                "augmented set {current:?} is not common independent"
            )));
        }
        check_hereditary(first, second, &current)?;
    }
    Ok(current)
}

/// Every one-element deletion of a common independent set must stay
/// independent in both oracles.
fn check_hereditary<A, B>(first: &A, second: &B, set: &[usize]) -> Result<(), CombinatoricsError>
where
    A: IndependenceOracle + ?Sized,
    B: IndependenceOracle + ?Sized,
{
    for pos in 0..set.len() {
        let mut sub = set.to_vec();
        sub.remove(pos);
        if !first.is_independent(&sub) || !second.is_independent(&sub) {
            return Err(CombinatoricsError::OracleInconsistent(format!(
                "{sub:?} is dependent although {set:?} is independent"
            )));
        }
    }
    Ok(())
}

fn shortest_path(
    outside: &[usize],
    is_source: &[bool],
    is_sink: &[bool],
    out: &[Vec<usize>],
    n: usize,
) -> Option<Vec<usize>> {
    let mut prev = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &x in outside.iter().filter(|&&x| is_source[x]) {
        seen[x] = true;
        queue.push_back(x);
    }
    while let Some(v) = queue.pop_front() {
        if is_sink[v] {
            let mut path = vec![v];
            let mut cur = v;
            while prev[cur] != usize::MAX {
                cur = prev[cur];
                path.push(cur);
            }
            return Some(path);
        }
        for &w in &out[v] {
            if !seen[w] {
                seen[w] = true;
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}
