use std::collections::VecDeque;

use nalgebra_sparse::CsrMatrix;

/// Reverse Cuthill–McKee ordering; `perm[new] = old`. Each connected
/// component starts from a pseudo-peripheral vertex of minimum degree.
pub fn reverse_cuthill_mckee(a: &CsrMatrix<f64>) -> Vec<usize> {
    let n = a.nrows();
    let (offsets, cols) = (a.row_offsets(), a.col_indices());
    let adj = |i: usize| cols[offsets[i]..offsets[i + 1]].iter().copied().filter(move |&j| j != i);
    let degree: Vec<usize> = (0..n).map(|i| adj(i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));

    // breadth-first levels from `root`, restricted to unvisited vertices
    let bfs = |root: usize, visited: &[bool]| -> (Vec<usize>, usize) {
        let mut level = vec![usize::MAX; n];
        let mut queue = VecDeque::from([root]);
        level[root] = 0;
        let mut last = vec![root];
        let mut depth = 0;
        while let Some(i) = queue.pop_front() {
            for j in adj(i) {
                if !visited[j] && level[j] == usize::MAX {
                    level[j] = level[i] + 1;
                    if level[j] > depth {
                        depth = level[j];
                        last.clear();
                    }
                    if level[j] == depth {
                        last.push(j);
                    }
                    queue.push_back(j);
                }
            }
        }
        (last, depth)
    };

    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        let mut root = seed;
        let (mut last, mut depth) = bfs(root, &visited);
        for _ in 0..8 {
            let cand = *last.iter().min_by_key(|&&j| (degree[j], j)).unwrap();
            let (l2, d2) = bfs(cand, &visited);
            if d2 <= depth {
                break;
            }
            root = cand;
            last = l2;
            depth = d2;
        }
        let start = order.len();
        visited[root] = true;
        order.push(root);
        let mut head = start;
        let mut nbrs = Vec::new();
        while head < order.len() {
            let i = order[head];
            head += 1;
            nbrs.clear();
            nbrs.extend(adj(i).filter(|&j| !visited[j]));
            nbrs.sort_by_key(|&j| (degree[j], j));
            for &j in &nbrs {
                visited[j] = true;
                order.push(j);
            }
        }
    }
    order.reverse();
    order
}

/// `P a P^T` with `perm[new] = old`.
pub fn permute_symmetric(a: &CsrMatrix<f64>, perm: &[usize]) -> CsrMatrix<f64> {
    let n = a.nrows();
    let mut inv = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let (mut r, mut c, mut v) = (Vec::with_capacity(a.nnz()), Vec::with_capacity(a.nnz()), Vec::with_capacity(a.nnz()));
    for (i, j, x) in a.triplet_iter() {
        r.push(inv[i]);
        c.push(inv[j]);
        v.push(*x);
    }
    super::from_triplets(n, &r, &c, &v)
}

/// `max |i - j|` over the stored entries.
pub fn bandwidth(a: &CsrMatrix<f64>) -> usize {
    a.triplet_iter().map(|(i, j, _)| i.abs_diff(j)).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::super::from_triplets;
    use super::*;

    /// 2D grid Laplacian numbered in a scrambled order.
    fn scrambled_grid(m: usize) -> CsrMatrix<f64> {
        let n = m * m;
        let scramble = |i: usize| (i * 7919) % n;
        let (mut r, mut c, mut v) = (vec![], vec![], vec![]);
        for y in 0..m {
            for x in 0..m {
                let i = scramble(y * m + x);
                r.push(i);
                c.push(i);
                v.push(4.0);
                for (dx, dy) in [(1, 0), (0, 1)] {
                    if x + dx < m && y + dy < m {
                        let j = scramble((y + dy) * m + x + dx);
                        r.extend([i, j]);
                        c.extend([j, i]);
                        v.extend([-1.0, -1.0]);
                    }
                }
            }
        }
        from_triplets(n, &r, &c, &v)
    }

    #[test]
    fn rcm_is_a_permutation_and_narrows_the_band() {
        let a = scrambled_grid(20);
        let p = reverse_cuthill_mckee(&a);
        let mut sorted = p.clone();
        sorted.sort();
        assert_eq!(sorted, (0..400).collect::<Vec<_>>());
        let b = permute_symmetric(&a, &p);
        assert!(bandwidth(&b) <= 40, "{}", bandwidth(&b));
        assert!(bandwidth(&a) > 300);
    }
}
