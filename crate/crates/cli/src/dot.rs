use petgraph::dot::{Config, Dot};
use petgraph::graph::DiGraph;

/// Covering pairs `(a, b)` of a finite partial order given by `leq`, with
/// `a < b`.
pub fn covering_pairs(n: usize, leq: impl Fn(usize, usize) -> bool) -> Vec<(usize, usize)> {
    let lt = |a: usize, b: usize| a != b && leq(a, b);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if lt(a, b) && !(0..n).any(|c| lt(a, c) && lt(c, b)) {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// A Hasse diagram in DOT, edges pointing from smaller to larger.
pub fn hasse(labels: &[String], edges: &[(usize, usize)]) -> String {
    let mut g = DiGraph::<&str, &str>::new();
    let nodes: Vec<_> = labels.iter().map(|l| g.add_node(l.as_str())).collect();
    for &(a, b) in edges {
        g.add_edge(nodes[a], nodes[b], "");
    }
    format!("{}", Dot::with_config(&g, &[Config::EdgeNoLabel]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_of_three() {
        let edges = covering_pairs(3, |a, b| a <= b);
        assert_eq!(edges, vec![(0, 1), (1, 2)]);
        let dot = hasse(&["a".into(), "b".into(), "c".into()], &edges);
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.matches("->").count(), 2);
    }
}
