use serde::{Deserialize, Serialize};

/// Axis-aligned simulation box; periodic axes wrap positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub periodic: [bool; 2],
    /// Positions above `hi[1]` still count as inside (open tank).
    #[serde(default)]
    pub open_top: bool,
}

impl Domain {
    pub fn periodic_box(lo: [f64; 2], hi: [f64; 2]) -> Self {
        Domain { lo, hi, periodic: [true, true], open_top: false }
    }

    pub fn closed_box(lo: [f64; 2], hi: [f64; 2]) -> Self {
        Domain { lo, hi, periodic: [false, false], open_top: false }
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    /// `a - b` under the minimum-image convention on periodic axes.
    pub fn separation(&self, a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
        let mut d = [a[0] - b[0], a[1] - b[1]];
        for (k, dk) in d.iter_mut().enumerate() {
            if self.periodic[k] {
                let l = self.extent(k);
                *dk -= l * (*dk / l).round();
            }
        }
        d
    }

    pub fn wrap(&self, p: [f64; 2]) -> [f64; 2] {
        let mut out = p;
        for (k, v) in out.iter_mut().enumerate() {
            if self.periodic[k] {
                let l = self.extent(k);
                *v = self.lo[k] + (*v - self.lo[k]).rem_euclid(l);
                if *v >= self.hi[k] {
                    *v = self.lo[k];
                }
            }
        }
        out
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        (0..2).all(|k| p[k] >= self.lo[k] && (p[k] <= self.hi[k] || (k == 1 && self.open_top)))
    }
}

/// One neighbour entry: index plus `x_i - x_j` and its length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair {
    pub j: usize,
    pub rij: [f64; 2],
    pub r: f64,
}

/// Fixed-radius neighbour lists in compressed rows, each row sorted by index.
#[derive(Debug, Clone, Default)]
pub struct NeighborTable {
    start: Vec<usize>,
    pairs: Vec<Pair>,
}

impl NeighborTable {
    pub fn len(&self) -> usize {
        self.start.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn of(&self, i: usize) -> &[Pair] {
        &self.pairs[self.start[i]..self.start[i + 1]]
    }

    pub fn indices(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.of(i).iter().map(|p| p.j)
    }

    pub fn total_pairs(&self) -> usize {
        self.pairs.len()
    }
}

struct Grid {
    n: [usize; 2],
    size: [f64; 2],
}

impl Grid {
    fn new(domain: &Domain, cutoff: f64) -> Self {
        let mut n = [1; 2];
        let mut size = [1.0; 2];
        for k in 0..2 {
            let l = domain.extent(k);
            n[k] = ((l / cutoff).floor() as usize).max(1);
            size[k] = l / n[k] as f64;
        }
        Grid { n, size }
    }

    fn cell_of(&self, domain: &Domain, p: [f64; 2]) -> [usize; 2] {
        let mut c = [0; 2];
        for k in 0..2 {
            let t = ((p[k] - domain.lo[k]) / self.size[k]).floor();
            c[k] = if t.is_finite() { t.clamp(0.0, (self.n[k] - 1) as f64) as usize } else { 0 };
        }
        c
    }

    fn around(&self, domain: &Domain, axis: usize, c: usize) -> Vec<usize> {
        let n = self.n[axis] as isize;
        let mut out: Vec<usize> = (-1..=1)
            .filter_map(|d| {
                let v = c as isize + d;
                if domain.periodic[axis] {
                    Some(v.rem_euclid(n) as usize)
                } else if (0..n).contains(&v) {
                    Some(v as usize)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Cell-list search for all pairs closer than `cutoff` (self excluded).
pub fn build_neighbors(positions: &[[f64; 2]], cutoff: f64, domain: &Domain) -> NeighborTable {
    let grid = Grid::new(domain, cutoff);
    let ncell = grid.n[0] * grid.n[1];
    let cells: Vec<[usize; 2]> = positions.iter().map(|&p| grid.cell_of(domain, p)).collect();
    let mut head = vec![0usize; ncell + 1];
    for c in &cells {
        head[c[1] * grid.n[0] + c[0] + 1] += 1;
    }
    for k in 0..ncell {
        head[k + 1] += head[k];
    }
    let mut fill = head.clone();
    let mut members = vec![0usize; positions.len()];
    for (i, c) in cells.iter().enumerate() {
        let id = c[1] * grid.n[0] + c[0];
        members[fill[id]] = i;
        fill[id] += 1;
    }

    let cut2 = cutoff * cutoff;
    let mut start = Vec::with_capacity(positions.len() + 1);
    let mut pairs = Vec::new();
    start.push(0);
    let mut row = Vec::new();
    for (i, &p) in positions.iter().enumerate() {
        row.clear();
        let c = cells[i];
        for cy in grid.around(domain, 1, c[1]) {
            for cx in grid.around(domain, 0, c[0]) {
                let id = cy * grid.n[0] + cx;
                for &j in &members[head[id]..head[id + 1]] {
                    if j == i {
                        continue;
                    }
                    let rij = domain.separation(p, positions[j]);
                    let r2 = rij[0] * rij[0] + rij[1] * rij[1];
                    if r2 < cut2 {
                        row.push(Pair { j, rij, r: r2.sqrt() });
                    }
                }
            }
        }
        row.sort_unstable_by_key(|q| q.j);
        pairs.extend_from_slice(&row);
        start.push(pairs.len());
    }
    NeighborTable { start, pairs }
}
