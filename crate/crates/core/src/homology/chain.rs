use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use super::matrix::{gcd, smith_normal_form, IntMatrix, Smith};
use super::HomologyError;
use crate::surface::{EdgeId, SurfaceComplex, VertexId};

/// An integral 1-chain: coefficient per edge.
pub type Chain = BTreeMap<EdgeId, i64>;

/// First homology of one surface component.
///
/// Cycles are coordinatized by their coefficients on the edges outside a
/// spanning tree. A spanning tree of the dual graph, built from those edges,
/// gives one face per dual-tree edge with a unit coefficient there; these
/// faces are used to eliminate the dual-tree edges. What is left is a
/// presentation on the remaining `2g` edges with a single relation (the root
/// face), which Smith normal form then diagonalizes.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentHomology {
    pub label: String,
    pub genus: i64,
    edges: BTreeSet<EdgeId>,
    cotree: BTreeSet<EdgeId>,
    /// Dual-tree edge, its sign in the face, and the face boundary, in
    /// elimination order.
    pivots: Vec<(EdgeId, i64, Chain)>,
    generators: Vec<EdgeId>,
    relations: IntMatrix,
    smith: Smith,
}

impl ComponentHomology {
    pub fn build(cx: &SurfaceComplex, label: &str) -> Result<ComponentHomology, HomologyError> {
        let vertices: BTreeSet<VertexId> = cx
            .vertices
            .iter()
            .filter(|(_, v)| v.component == label)
            .map(|(id, _)| *id)
            .collect();
        let edges: BTreeSet<EdgeId> = cx
            .edges
            .iter()
            .filter(|(_, e)| e.component == label)
            .map(|(id, _)| *id)
            .collect();
        let mut adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> = BTreeMap::new();
        for e in &edges {
            let edge = cx.edge(*e);
            adj.entry(edge.tail).or_default().push((*e, edge.head));
            adj.entry(edge.head).or_default().push((*e, edge.tail));
        }
        let mut tree = BTreeSet::new();
        let mut reached = BTreeSet::new();
        if let Some(&root) = vertices.first() {
            let mut queue = VecDeque::from([root]);
            reached.insert(root);
            while let Some(v) = queue.pop_front() {
                for (e, w) in adj.get(&v).into_iter().flatten() {
                    if reached.insert(*w) {
                        tree.insert(*e);
                        queue.push_back(*w);
                    }
                }
            }
        }
        if reached.len() != vertices.len() {
            return Err(HomologyError::Disconnected(label.to_string()));
        }
        let cotree: BTreeSet<EdgeId> = edges.difference(&tree).copied().collect();

        // Face boundaries restricted to the cotree, and the faces on each
        // side of every cotree edge.
        let faces: Vec<Chain> = cx
            .faces
            .values()
            .filter(|f| f.component == label)
            .map(|f| {
                let mut row = Chain::new();
                for st in &f.boundary {
                    if cotree.contains(&st.edge) {
                        *row.entry(st.edge).or_default() += i64::from(st.sign);
                    }
                }
                row.retain(|_, c| *c != 0);
                row
            })
            .collect();
        let mut sides: BTreeMap<EdgeId, Vec<usize>> = BTreeMap::new();
        for (j, row) in faces.iter().enumerate() {
            for e in row.keys() {
                sides.entry(*e).or_default().push(j);
            }
        }

        let mut pivots = Vec::new();
        let mut dual_tree = BTreeSet::new();
        if !faces.is_empty() {
            let mut seen = vec![false; faces.len()];
            seen[0] = true;
            let mut queue = VecDeque::from([0usize]);
            while let Some(j) = queue.pop_front() {
                for e in faces[j].keys() {
                    for &k in &sides[e] {
                        if !seen[k] {
                            seen[k] = true;
                            dual_tree.insert(*e);
                            pivots.push((*e, faces[k][e], faces[k].clone()));
                            queue.push_back(k);
                        }
                    }
                }
            }
            if seen.iter().any(|s| !s) {
                return Err(HomologyError::Disconnected(label.to_string()));
            }
        }
        let generators: Vec<EdgeId> = cotree.difference(&dual_tree).copied().collect();

        let mut h = ComponentHomology {
            label: label.to_string(),
            genus: 0,
            edges,
            cotree,
            pivots,
            generators,
            relations: IntMatrix::zeros(0, 0),
            smith: smith_normal_form(&IntMatrix::zeros(0, 0))?,
        };
        let root = faces.first().cloned().unwrap_or_default();
        let rest = h.reduce(&root)?;
        let mut relations = IntMatrix::zeros(h.generators.len(), 1);
        for (i, c) in rest.iter().enumerate() {
            relations[(i, 0)] = *c;
        }
        let smith = smith_normal_form(&relations)?;
        if smith.invariant_factors().iter().any(|&d| d != 1) {
            return Err(HomologyError::Torsion(label.to_string()));
        }
        let betti = h.generators.len() - smith.rank;
        if !betti.is_multiple_of(2) {
            return Err(HomologyError::OddRank(label.to_string(), betti));
        }
        h.genus = (betti / 2) as i64;
        h.relations = relations;
        h.smith = smith;
        Ok(h)
    }

    pub fn rank(&self) -> usize {
        self.generators.len() - self.smith.rank
    }

    /// Edges whose coefficients coordinatize the reduced presentation.
    pub fn generators(&self) -> &[EdgeId] {
        &self.generators
    }

    /// Reduced relation matrix: one column per remaining relation.
    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn smith(&self) -> &Smith {
        &self.smith
    }

    /// Coordinates of the class of `z` in a basis of H1 of this component.
    /// Fails if `z` is not a cycle supported on the component.
    pub fn class_of_cycle(&self, z: &Chain) -> Result<Vec<i64>, HomologyError> {
        self.check_cycle(z)?;
        let w = self.reduce(z)?;
        let uw = self.smith.u.mul_vec(&w)?;
        Ok(uw[self.smith.rank..].to_vec())
    }

    /// Rewrites `z` modulo face boundaries onto the generator edges.
    fn reduce(&self, z: &Chain) -> Result<Vec<i64>, HomologyError> {
        let mut w: Chain = z
            .iter()
            .filter(|(e, c)| **c != 0 && self.cotree.contains(e))
            .map(|(e, c)| (*e, *c))
            .collect();
        for (e, sign, row) in &self.pivots {
            let Some(&c) = w.get(e) else { continue };
            let k = c.checked_mul(*sign).ok_or(HomologyError::Overflow)?;
            for (f, r) in row {
                let entry = w.entry(*f).or_default();
                *entry = k
                    .checked_mul(*r)
                    .and_then(|t| entry.checked_sub(t))
                    .ok_or(HomologyError::Overflow)?;
            }
            w.retain(|_, c| *c != 0);
        }
        Ok(self
            .generators
            .iter()
            .map(|e| w.get(e).copied().unwrap_or(0))
            .collect())
    }

    fn check_cycle(&self, z: &Chain) -> Result<(), HomologyError> {
        for (e, c) in z {
            if *c != 0 && !self.edges.contains(e) {
                return Err(HomologyError::OffComponent(*e, self.label.clone()));
            }
        }
        Ok(())
    }
}

/// Boundary of a 1-chain, as vertex multiplicities.
pub fn boundary(cx: &SurfaceComplex, z: &Chain) -> Result<BTreeMap<VertexId, i64>, HomologyError> {
    let mut out: BTreeMap<VertexId, i64> = BTreeMap::new();
    for (e, c) in z {
        let edge = cx.edges.get(e).ok_or(HomologyError::UnknownEdge(*e))?;
        *out.entry(edge.head).or_default() += c;
        *out.entry(edge.tail).or_default() -= c;
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

/// Greatest common divisor of the coordinates; zero for the zero class.
pub fn divisibility(class: &[i64]) -> i64 {
    class.iter().fold(0, |g, &x| gcd(g, x))
}

/// Homology of every labelled component of a complex.
#[derive(Debug, Clone, Serialize)]
pub struct Homology {
    pub components: Vec<ComponentHomology>,
}

impl Homology {
    pub fn of(cx: &SurfaceComplex) -> Result<Homology, HomologyError> {
        let components = cx
            .components
            .iter()
            .map(|c| ComponentHomology::build(cx, &c.label))
            .collect::<Result<_, _>>()?;
        Ok(Homology { components })
    }

    pub fn component(&self, label: &str) -> Option<&ComponentHomology> {
        self.components.iter().find(|c| c.label == label)
    }

    /// Splits a cycle into components and returns each component's class.
    pub fn classes(
        &self,
        cx: &SurfaceComplex,
        z: &Chain,
    ) -> Result<Vec<(String, Vec<i64>)>, HomologyError> {
        if !boundary(cx, z)?.is_empty() {
            return Err(HomologyError::NotACycle);
        }
        self.components
            .iter()
            .map(|h| {
                let part: Chain = z
                    .iter()
                    .filter(|(e, _)| h.edges.contains(e))
                    .map(|(e, c)| (*e, *c))
                    .collect();
                Ok((h.label.clone(), h.class_of_cycle(&part)?))
            })
            .collect()
    }
}
