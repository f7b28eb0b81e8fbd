use serde::Serialize;

use super::field::ScalarField2D;
use crate::error::{Error, Result};

/// A single bar of a persistence diagram; `death` may be `+inf`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PersistencePair {
    pub dim: u8,
    pub birth: f64,
    pub death: f64,
}

impl PersistencePair {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    /// Whether the class is alive at level `r` (`birth <= r < death`).
    pub fn alive_at(&self, r: f64) -> bool {
        self.birth <= r && r < self.death
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PersistenceDiagram {
    pairs: Vec<PersistencePair>,
}

impl PersistenceDiagram {
    pub fn new(pairs: Vec<PersistencePair>) -> Result<Self> {
        for p in &pairs {
            if p.dim > 1 {
                return Err(Error::InvalidParameter(format!(
                    "unsupported dimension {}",
                    p.dim
                )));
            }
            if p.birth.is_nan() || p.death.is_nan() || p.birth > p.death || p.birth.is_infinite() {
                return Err(Error::InvalidParameter(format!(
                    "invalid bar ({}, {})",
                    p.birth, p.death
                )));
            }
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[PersistencePair] {
        &self.pairs
    }

    pub fn in_dim(&self, dim: u8) -> impl Iterator<Item = &PersistencePair> + '_ {
        self.pairs.iter().filter(move |p| p.dim == dim)
    }

    /// Persistences of the bars in `dim`, largest first.
    pub fn persistences(&self, dim: u8) -> Vec<f64> {
        let mut v: Vec<f64> = self.in_dim(dim).map(|p| p.persistence()).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// Number of classes in `dim` alive at level `r`.
    pub fn betti(&self, r: f64, dim: u8) -> usize {
        self.in_dim(dim).filter(|p| p.alive_at(r)).count()
    }

    /// Bars in `dim` born by `a` and still alive after `b`.
    pub fn persistent_betti(&self, a: f64, b: f64, dim: u8) -> Result<usize> {
        if a.is_nan() || b.is_nan() || a >= b {
            return Err(Error::InvalidParameter(format!(
                "persistent Betti needs a < b, got a={a}, b={b}"
            )));
        }
        Ok(self
            .in_dim(dim)
            .filter(|p| p.birth <= a && p.death > b)
            .count())
    }
}

/// Union-find whose roots carry the filtration rank and value at which their
/// component was born; the older root always absorbs the younger.
struct Components {
    parent: Vec<usize>,
    birth_rank: Vec<usize>,
    birth_value: Vec<f64>,
}

impl Components {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            birth_rank: vec![usize::MAX; n],
            birth_value: vec![f64::NAN; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Adds vertex `v` (rank `rank`, value `value`) adjacent to the already
    /// present `neighbors`; returns the birth values of components that die.
    fn insert(
        &mut self,
        v: usize,
        rank: usize,
        value: f64,
        neighbors: &[usize],
        dead: &mut Vec<f64>,
    ) {
        let mut roots: Vec<usize> = neighbors.iter().map(|&u| self.find(u)).collect();
        roots.sort_unstable();
        roots.dedup();
        let Some(&oldest) = roots.iter().min_by_key(|&&r| self.birth_rank[r]) else {
            self.birth_rank[v] = rank;
            self.birth_value[v] = value;
            return;
        };
        for &r in &roots {
            if r != oldest {
                dead.push(self.birth_value[r]);
                self.parent[r] = oldest;
            }
        }
        self.parent[v] = oldest;
    }
}

/// Cells sorted by `(value, row-major index)`.
fn filtration_order(field: &ScalarField2D) -> Vec<usize> {
    let v = field.values();
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b)));
    order
}

const N4: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];
const N8: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

fn neighbors<'a>(
    field: &'a ScalarField2D,
    cell: usize,
    offsets: &'a [(isize, isize)],
) -> impl Iterator<Item = usize> + 'a {
    let (nx, ny) = (field.nx() as isize, field.ny() as isize);
    let (i, j) = ((cell % field.nx()) as isize, (cell / field.nx()) as isize);
    offsets.iter().filter_map(move |&(di, dj)| {
        let (a, b) = (i + di, j + dj);
        (a >= 0 && a < nx && b >= 0 && b < ny).then_some((b * nx + a) as usize)
    })
}

fn on_boundary(field: &ScalarField2D, cell: usize) -> bool {
    let (i, j) = (cell % field.nx(), cell / field.nx());
    i == 0 || j == 0 || i + 1 == field.nx() || j + 1 == field.ny()
}

/// Sublevel-set persistence of the cell values.
///
/// Dimension 0 runs union-find over 4-connected cells in increasing order.
/// Dimension 1 uses Alexander duality: union-find over 8-connected cells in
/// decreasing order with a virtual node outside the grid; a background
/// component born at `b'` that merges at `d'` is a hole alive on `[d', b')`.
/// Zero-length bars are dropped.
pub fn sublevel_persistence(field: &ScalarField2D) -> PersistenceDiagram {
    let values = field.values();
    let n = values.len();
    let order = filtration_order(field);
    let mut pairs = Vec::new();
    let mut dead = Vec::new();
    let mut nbrs = Vec::with_capacity(9);

    let mut present = vec![false; n];
    let mut uf = Components::new(n);
    for (rank, &c) in order.iter().enumerate() {
        nbrs.clear();
        nbrs.extend(neighbors(field, c, &N4).filter(|&u| present[u]));
        dead.clear();
        uf.insert(c, rank, values[c], &nbrs, &mut dead);
        present[c] = true;
        for &birth in &dead {
            if values[c] > birth {
                pairs.push(PersistencePair {
                    dim: 0,
                    birth,
                    death: values[c],
                });
            }
        }
    }
    let mut roots: Vec<usize> = (0..n).map(|c| uf.find(c)).collect();
    roots.sort_unstable();
    roots.dedup();
    for r in roots {
        pairs.push(PersistencePair {
            dim: 0,
            birth: uf.birth_value[r],
            death: f64::INFINITY,
        });
    }

    let outside = n;
    let mut present = vec![false; n + 1];
    present[outside] = true;
    let mut uf = Components::new(n + 1);
    uf.birth_rank[outside] = 0;
    uf.birth_value[outside] = f64::INFINITY;
    for (step, &c) in order.iter().rev().enumerate() {
        nbrs.clear();
        nbrs.extend(neighbors(field, c, &N8).filter(|&u| present[u]));
        if on_boundary(field, c) {
            nbrs.push(outside);
        }
        dead.clear();
        uf.insert(c, step + 1, values[c], &nbrs, &mut dead);
        present[c] = true;
        for &top in &dead {
            if top > values[c] {
                pairs.push(PersistencePair {
                    dim: 1,
                    birth: values[c],
                    death: top,
                });
            }
        }
    }
    PersistenceDiagram { pairs }
}

fn label_components(
    field: &ScalarField2D,
    member: &[bool],
    offsets: &[(isize, isize)],
) -> Vec<Vec<usize>> {
    let mut seen = vec![false; member.len()];
    let mut comps = Vec::new();
    let mut stack = Vec::new();
    for s in 0..member.len() {
        if !member[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        stack.push(s);
        let mut comp = Vec::new();
        while let Some(c) = stack.pop() {
            comp.push(c);
            for u in neighbors(field, c, offsets) {
                if member[u] && !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        comps.push(comp);
    }
    comps
}

/// `(beta0, beta1)` of the cells with value `<= r`: 4-connected foreground
/// components, and 8-connected background components away from the grid edge.
pub fn betti_at_level(field: &ScalarField2D, r: f64) -> (usize, usize) {
    let fg: Vec<bool> = field.values().iter().map(|&v| v <= r).collect();
    let bg: Vec<bool> = fg.iter().map(|&f| !f).collect();
    let beta0 = label_components(field, &fg, &N4).len();
    let beta1 = label_components(field, &bg, &N8)
        .iter()
        .filter(|comp| !comp.iter().any(|&c| on_boundary(field, c)))
        .count();
    (beta0, beta1)
}

/// `V - E + F` of the cubical complex on the cells with value `<= r`:
/// vertices are cells, edges join 4-adjacent cells, squares fill 2x2 blocks.
pub fn euler_characteristic(field: &ScalarField2D, r: f64) -> i64 {
    let (nx, ny) = (field.nx(), field.ny());
    let fg = |i: usize, j: usize| field.value(i, j) <= r;
    let (mut v, mut e, mut f) = (0i64, 0i64, 0i64);
    for j in 0..ny {
        for i in 0..nx {
            if !fg(i, j) {
                continue;
            }
            v += 1;
            let right = i + 1 < nx && fg(i + 1, j);
            let up = j + 1 < ny && fg(i, j + 1);
            e += right as i64 + up as i64;
            if right && up && fg(i + 1, j + 1) {
                f += 1;
            }
        }
    }
    v - e + f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::field::BoundingBox;

    fn grid(nx: usize, ny: usize, values: &[f64]) -> ScalarField2D {
        let b = BoundingBox::new(0.0, nx as f64, 0.0, ny as f64).unwrap();
        ScalarField2D::new(b, nx, ny, values.to_vec()).unwrap()
    }

    #[test]
    fn persistent_betti_examples() {
        let empty = PersistenceDiagram::default();
        assert_eq!(empty.persistent_betti(0.0, 1.0, 1).unwrap(), 0);
        let one = PersistenceDiagram::new(vec![PersistencePair {
            dim: 0,
            birth: 0.0,
            death: f64::INFINITY,
        }])
        .unwrap();
        assert_eq!(one.persistent_betti(1.0, 100.0, 0).unwrap(), 1);
        assert!(one.persistent_betti(2.0, 2.0, 0).is_err());
        assert!(one.persistent_betti(3.0, 2.0, 0).is_err());
    }

    #[test]
    fn rejects_invalid_bars() {
        let bad = PersistencePair {
            dim: 0,
            birth: 2.0,
            death: 1.0,
        };
        assert!(PersistenceDiagram::new(vec![bad]).is_err());
    }

    #[test]
    fn ring_of_cells() {
        // 0 on the border of a 5x5 grid, a 1 ring inside, 2 at the center.
        #[rustfmt::skip]
        let v = [
            0.0, 0.0, 0.0, 0.0, 0.0,
            0.0, 1.0, 1.0, 1.0, 0.0,
            0.0, 1.0, 2.0, 1.0, 0.0,
            0.0, 1.0, 1.0, 1.0, 0.0,
            0.0, 0.0, 0.0, 0.0, 0.0,
        ];
        let f = grid(5, 5, &v);
        let d = sublevel_persistence(&f);
        let h1: Vec<_> = d.in_dim(1).collect();
        assert_eq!(h1.len(), 1);
        assert_eq!((h1[0].birth, h1[0].death), (0.0, 2.0));
        assert_eq!(betti_at_level(&f, 0.0), (1, 1));
        assert_eq!(betti_at_level(&f, 1.0), (1, 1));
        assert_eq!(betti_at_level(&f, 2.0), (1, 0));
        assert_eq!(euler_characteristic(&f, 0.0), 0);
    }

    #[test]
    fn diagonal_background_is_one_hole() {
        #[rustfmt::skip]
        let v = [
            0.0, 0.0, 0.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, 0.0,
        ];
        let f = grid(4, 4, &v);
        assert_eq!(betti_at_level(&f, 0.5), (1, 1));
        assert_eq!(euler_characteristic(&f, 0.5), 0);
    }

    #[test]
    fn diagonal_foreground_is_two_components() {
        #[rustfmt::skip]
        let v = [
            0.0, 1.0,
            1.0, 0.0,
        ];
        let f = grid(2, 2, &v);
        assert_eq!(betti_at_level(&f, 0.5), (2, 0));
        let d = sublevel_persistence(&f);
        assert_eq!(d.betti(0.5, 0), 2);
        assert_eq!(d.in_dim(0).filter(|p| p.death.is_infinite()).count(), 1);
    }
}
