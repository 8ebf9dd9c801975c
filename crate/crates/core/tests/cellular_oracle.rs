//! Independent check of the genus-3 curve coordinates shipped in `mcg`.
//!
//! The surface is the double of an 11x5 grid with three unit holes, each
//! square cut into four triangles around its centre. Cohomology classes are
//! edge cocycles, the pairing is the cup product against the fundamental
//! class, and curve classes are read off by solving against the pairing and
//! checking that the residual is a coboundary.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use bundlesec_core::mcg::{build_double_model, hyperelliptic, lantern_check, mirror, RANK};
use num_traits::ToPrimitive;

const W: i64 = 11;
const H: i64 = 5;
/// Lower-left corners of the hole squares, in order b1, b2, b3.
const HOLES: [(i64, i64); 3] = [(2, 2), (5, 2), (8, 2)];

/// Points are in doubled coordinates so square centres are integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Point {
    x: i64,
    y: i64,
}

fn is_hole(sx: i64, sy: i64) -> bool {
    HOLES.contains(&(sx, sy))
}

fn on_hole_boundary(p: Point, hole: usize) -> bool {
    let (hx, hy) = HOLES[hole];
    p.x % 2 == 0 && p.y % 2 == 0 && (2 * hx..=2 * hx + 2).contains(&p.x) && (2 * hy..=2 * hy + 2).contains(&p.y)
}

fn on_outer_boundary(p: Point) -> bool {
    p.x % 2 == 0 && p.y % 2 == 0 && (p.x == 0 || p.y == 0 || p.x == 2 * W || p.y == 2 * H)
}

fn on_boundary(p: Point) -> bool {
    on_outer_boundary(p) || (0..3).any(|h| on_hole_boundary(p, h))
}

struct Surface {
    /// (point, sheet); boundary points carry sheet 0 and are shared.
    vertices: Vec<(Point, u8)>,
    index: HashMap<(Point, u8), usize>,
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    /// Oriented triangles (cyclic order gives the fundamental class).
    triangles: Vec<[usize; 3]>,
}

impl Surface {
    fn vertex(&self, p: Point, sheet: u8) -> usize {
        let key = if on_boundary(p) { (p, 0) } else { (p, sheet) };
        self.index[&key]
    }

    fn build() -> Surface {
        let mut s = Surface {
            vertices: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            edge_index: HashMap::new(),
            triangles: Vec::new(),
        };
        let add = |s: &mut Surface, p: Point, sheet: u8| {
            let key = if on_boundary(p) { (p, 0) } else { (p, sheet) };
            if !s.index.contains_key(&key) {
                s.index.insert(key, s.vertices.len());
                s.vertices.push(key);
            }
        };
        for sheet in 0..2u8 {
            for sx in 0..W {
                for sy in 0..H {
                    if is_hole(sx, sy) {
                        continue;
                    }
                    let corners = [(0, 0), (2, 0), (2, 2), (0, 2)].map(|(dx, dy)| Point { x: 2 * sx + dx, y: 2 * sy + dy });
                    let centre = Point { x: 2 * sx + 1, y: 2 * sy + 1 };
                    for c in corners {
                        add(&mut s, c, sheet);
                    }
                    add(&mut s, centre, sheet);
                    let c = s.vertex(centre, sheet);
                    for k in 0..4 {
                        let p = s.vertex(corners[k], sheet);
                        let q = s.vertex(corners[(k + 1) % 4], sheet);
                        // counter-clockwise in sheet 0, clockwise in sheet 1
                        let t = if sheet == 0 { [p, q, c] } else { [q, p, c] };
                        s.triangles.push(t);
                    }
                }
            }
        }
        for t in s.triangles.clone() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                if !s.edge_index.contains_key(&key) {
                    s.edge_index.insert(key, s.edges.len());
                    s.edges.push(key);
                }
            }
        }
        s
    }

    /// Coefficient of each edge in the boundary of an oriented triangle.
    fn boundary(&self, t: [usize; 3]) -> [(usize, i64); 3] {
        [0, 1, 2].map(|k| {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let e = self.edge_index[&(a.min(b), a.max(b))];
            (e, if a < b { 1 } else { -1 })
        })
    }

    fn is_cocycle(&self, alpha: &[i64]) -> bool {
        self.triangles
            .iter()
            .all(|&t| self.boundary(t).iter().map(|&(e, c)| c * alpha[e]).sum::<i64>() == 0)
    }

    /// Value on a directed edge.
    fn eval(&self, alpha: &[i64], a: usize, b: usize) -> i64 {
        let e = self.edge_index[&(a.min(b), a.max(b))];
        if a < b {
            alpha[e]
        } else {
            -alpha[e]
        }
    }

    /// `∫ α ∪ β` with the ordered-simplex cup product.
    fn pairing(&self, alpha: &[i64], beta: &[i64]) -> i64 {
        let mut total = 0;
        for &t in &self.triangles {
            let mut sorted = t;
            sorted.sort();
            let sign = permutation_sign(t, sorted);
            total += sign * self.eval(alpha, sorted[0], sorted[1]) * self.eval(beta, sorted[1], sorted[2]);
        }
        total
    }

    /// Solves `δf = α` by potentials along a spanning tree and checks every edge.
    fn is_coboundary(&self, alpha: &[i64]) -> bool {
        let n = self.vertices.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut pot = vec![None; n];
        pot[0] = Some(0i64);
        let mut queue = VecDeque::from([0]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if pot[v].is_none() {
                    pot[v] = Some(pot[u].unwrap() + self.eval(alpha, u, v));
                    queue.push_back(v);
                }
            }
        }
        self.edges
            .iter()
            .enumerate()
            .all(|(e, &(a, b))| pot[b].unwrap() - pot[a].unwrap() == alpha[e])
    }

    /// `δ 1_A` on edges with an endpoint interior to `sheet`, zero elsewhere.
    fn region(&self, sheet: u8, inside: impl Fn(Point) -> bool) -> Vec<i64> {
        let member = |v: usize| inside(self.vertices[v].0) as i64;
        self.edges
            .iter()
            .map(|&(a, b)| {
                let touches = [a, b].iter().any(|&v| !on_boundary(self.vertices[v].0) && self.vertices[v].1 == sheet);
                if touches {
                    member(b) - member(a)
                } else {
                    0
                }
            })
            .collect()
    }

    /// Poincaré dual of a closed path of triangles, each consecutive pair
    /// sharing an edge.
    fn dual_path(&self, path: &[[usize; 3]]) -> Vec<i64> {
        let mut alpha = vec![0; self.edges.len()];
        for k in 0..path.len() {
            let (t, u) = (path[k], path[(k + 1) % path.len()]);
            let shared: Vec<usize> = t.iter().copied().filter(|v| u.contains(v)).collect();
            assert_eq!(shared.len(), 2, "consecutive triangles must share an edge");
            let (e, c) = self
                .boundary(t)
                .into_iter()
                .find(|&(e, _)| {
                    let (a, b) = self.edges[e];
                    shared.contains(&a) && shared.contains(&b)
                })
                .unwrap();
            alpha[e] += c;
        }
        alpha
    }

    fn triangle(&self, sx: i64, sy: i64, side: usize, sheet: u8) -> [usize; 3] {
        // side: 0 bottom, 1 right, 2 top, 3 left
        let corners = [(0, 0), (2, 0), (2, 2), (0, 2)].map(|(dx, dy)| Point { x: 2 * sx + dx, y: 2 * sy + dy });
        let c = self.vertex(Point { x: 2 * sx + 1, y: 2 * sy + 1 }, sheet);
        let p = self.vertex(corners[side], sheet);
        let q = self.vertex(corners[(side + 1) % 4], sheet);
        if sheet == 0 {
            [p, q, c]
        } else {
            [q, p, c]
        }
    }

    /// Simplicial map on vertices; returns the induced pullback on cochains
    /// and the degree.
    fn pullback(&self, map: &dyn Fn((Point, u8)) -> (Point, u8), alpha: &[i64]) -> Vec<i64> {
        let image = |v: usize| self.vertex_of(map(self.vertices[v]));
        self.edges.iter().map(|&(a, b)| self.eval(alpha, image(a), image(b))).collect()
    }

    fn degree(&self, map: &dyn Fn((Point, u8)) -> (Point, u8)) -> i64 {
        let oriented: BTreeSet<[usize; 3]> = self.triangles.iter().map(|&t| rotate_min(t)).collect();
        let image = |v: usize| self.vertex_of(map(self.vertices[v]));
        let signs: BTreeSet<i64> = self
            .triangles
            .iter()
            .map(|&t| {
                let m = rotate_min(t.map(image));
                if oriented.contains(&m) {
                    1
                } else {
                    assert!(oriented.contains(&rotate_min([m[0], m[2], m[1]])), "not a simplicial map");
                    -1
                }
            })
            .collect();
        assert_eq!(signs.len(), 1, "map must be orientation-preserving or reversing");
        *signs.iter().next().unwrap()
    }

    fn vertex_of(&self, (p, sheet): (Point, u8)) -> usize {
        self.vertex(p, sheet)
    }
}

fn rotate_min(t: [usize; 3]) -> [usize; 3] {
    let k = (0..3).min_by_key(|&k| t[k]).unwrap();
    [t[k], t[(k + 1) % 3], t[(k + 2) % 3]]
}

fn permutation_sign(t: [usize; 3], sorted: [usize; 3]) -> i64 {
    if rotate_min(t) == sorted {
        1
    } else {
        -1
    }
}

fn rank_mod_p(rows: Vec<Vec<i64>>) -> usize {
    const P: i64 = 1_000_000_007;
    let mut m: Vec<Vec<i64>> = rows.into_iter().map(|r| r.into_iter().map(|x| x.rem_euclid(P)).collect()).collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else { continue };
        m.swap(rank, piv);
        let inv = pow_mod(m[rank][col], P - 2, P);
        for x in &mut m[rank][col..] {
            *x = *x * inv % P;
        }
        let pivot = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let f = row[col];
                for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *x = (*x - f * p).rem_euclid(P);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: i64, mut e: i64, p: i64) -> i64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

struct Oracle {
    s: Surface,
    basis: Vec<Vec<i64>>,
    classes: BTreeMap<String, Vec<i64>>,
}

impl Oracle {
    fn build() -> Oracle {
        let s = Surface::build();
        let hole = |h: usize| move |p: Point| on_hole_boundary(p, h);
        let mut classes = BTreeMap::new();
        for h in 0..3 {
            let b = s.region(0, hole(h));
            classes.insert(format!("b{}", h + 1), b.clone());
            classes.insert(format!("d{}0", h + 1), b);
            // parallel copy on the other side of the boundary circle
            let d1: Vec<i64> = s.region(1, hole(h)).iter().map(|x| -x).collect();
            classes.insert(format!("d{}1", h + 1), d1);
        }
        classes.insert("b4".into(), s.region(0, on_outer_boundary));
        classes.insert("d40".into(), s.region(0, on_outer_boundary));
        classes.insert("d41".into(), s.region(1, on_outer_boundary).iter().map(|x| -x).collect());

        // regions in real coordinates: 1 <= x <= 7 etc., doubled
        let x_region = |p: Point| (2..=14).contains(&p.x) && (2..=8).contains(&p.y);
        let y_region = |p: Point| (8..=20).contains(&p.x) && (2..=8).contains(&p.y);
        let z_region = |p: Point| {
            (2..=20).contains(&p.x) && (2..=8).contains(&p.y) && !((8..=14).contains(&p.x) && p.y >= 4)
        };
        let reflect = |f: &dyn Fn(Point) -> bool, p: Point| f(Point { x: p.x, y: 2 * H - p.y });
        classes.insert("x0".into(), s.region(0, x_region));
        classes.insert("y0".into(), s.region(0, y_region));
        classes.insert("z0".into(), s.region(0, z_region));
        classes.insert("x1".into(), s.region(1, |p| reflect(&x_region, p)));
        classes.insert("y1".into(), s.region(1, |p| reflect(&y_region, p)));
        classes.insert("z1".into(), s.region(1, |p| reflect(&z_region, p)));

        for h in 0..3 {
            let (hx, hy) = HOLES[h];
            let mut path = Vec::new();
            for sy in hy + 1..H {
                for side in [0, 1, 2] {
                    path.push(s.triangle(hx, sy, side, 0));
                }
            }
            for sy in (hy + 1..H).rev() {
                for side in [2, 1, 0] {
                    path.push(s.triangle(hx, sy, side, 1));
                }
            }
            let a = s.dual_path(&path);
            // orient so that the pairing with b_i is +1
            let sign = s.pairing(&a, &classes[&format!("b{}", h + 1)]).signum();
            classes.insert(format!("a{}", h + 1), a.iter().map(|x| sign * x).collect());
        }

        let basis = ["a1", "a2", "a3", "b1", "b2", "b3"].iter().map(|n| classes[*n].clone()).collect();
        Oracle { s, basis, classes }
    }

    fn gram(&self) -> Vec<Vec<i64>> {
        self.basis.iter().map(|u| self.basis.iter().map(|v| self.s.pairing(u, v)).collect()).collect()
    }

    /// Coordinates in the basis, from pairings; asserts the residual is exact.
    fn coordinates(&self, alpha: &[i64]) -> Vec<i64> {
        // Gram = J, J^-1 = -J
        let p: Vec<i64> = self.basis.iter().map(|e| self.s.pairing(e, alpha)).collect();
        let mut v = vec![0; RANK];
        for i in 0..3 {
            v[i] = -p[i + 3];
            v[i + 3] = p[i];
        }
        let mut residual = alpha.to_vec();
        for (c, e) in v.iter().zip(&self.basis) {
            for (r, x) in residual.iter_mut().zip(e) {
                *r -= c * x;
            }
        }
        assert!(self.s.is_coboundary(&residual), "class is not in the span of the basis");
        v
    }

    /// Matrix of the pushforward `φ_* = deg(φ) · (φ^-1)^*` for an involution.
    fn pushforward(&self, map: &dyn Fn((Point, u8)) -> (Point, u8)) -> Vec<Vec<i64>> {
        let deg = self.s.degree(map);
        let mut cols = Vec::new();
        for e in &self.basis {
            let pulled: Vec<i64> = self.s.pullback(map, e).iter().map(|x| deg * x).collect();
            assert!(self.s.is_cocycle(&pulled));
            cols.push(self.coordinates(&pulled));
        }
        (0..RANK).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
    }
}

fn swap_sheets((p, sheet): (Point, u8)) -> (Point, u8) {
    (p, 1 - sheet)
}

fn hyperelliptic_map((p, sheet): (Point, u8)) -> (Point, u8) {
    (Point { x: p.x, y: 2 * H - p.y }, 1 - sheet)
}

fn to_i64(v: &[num_bigint::BigInt]) -> Vec<i64> {
    v.iter().map(|x| x.to_i64().unwrap()).collect()
}

fn matrix_i64(m: &bundlesec_core::IntMatrix) -> Vec<Vec<i64>> {
    (0..m.rows()).map(|i| to_i64(&m.row(i))).collect()
}

#[test]
fn complex_is_a_closed_genus_three_surface() {
    let s = Surface::build();
    let (v, e, f) = (s.vertices.len() as i64, s.edges.len() as i64, s.triangles.len() as i64);
    assert_eq!(v - e + f, -4);
    // every edge lies on two triangles which induce opposite orientations
    let mut incidence = vec![Vec::new(); s.edges.len()];
    for &t in &s.triangles {
        for (e, c) in s.boundary(t) {
            incidence[e].push(c);
        }
    }
    assert!(incidence.iter().all(|cs| cs.len() == 2 && cs[0] + cs[1] == 0));
    // no repeated triangles
    let distinct: BTreeSet<[usize; 3]> = s.triangles.iter().map(|t| {
        let mut t = *t;
        t.sort();
        t
    }).collect();
    assert_eq!(distinct.len(), s.triangles.len());

    let d0: Vec<Vec<i64>> = s
        .edges
        .iter()
        .map(|&(a, b)| (0..s.vertices.len()).map(|x| (x == b) as i64 - (x == a) as i64).collect())
        .collect();
    let d1: Vec<Vec<i64>> = s
        .triangles
        .iter()
        .map(|&t| {
            let mut row = vec![0; s.edges.len()];
            for (e, c) in s.boundary(t) {
                row[e] += c;
            }
            row
        })
        .collect();
    let h1 = s.edges.len() - rank_mod_p(d0) - rank_mod_p(d1);
    assert_eq!(h1, 6);
}

#[test]
fn basis_is_symplectic() {
    let o = Oracle::build();
    for c in o.classes.values() {
        assert!(o.s.is_cocycle(c));
    }
    let model = build_double_model();
    assert_eq!(o.gram(), matrix_i64(&model.space.pairing));
}

#[test]
fn curve_coordinates_match_model() {
    let o = Oracle::build();
    let model = build_double_model();
    assert_eq!(o.classes.len(), model.curves.len());
    for c in &model.curves {
        let derived = o.coordinates(&o.classes[&c.name]);
        assert_eq!(derived, to_i64(&c.vector), "curve {}", c.name);
    }
}

#[test]
fn involutions_match_model() {
    let o = Oracle::build();
    assert_eq!(o.s.degree(&hyperelliptic_map), 1);
    assert_eq!(o.s.degree(&swap_sheets), -1);
    assert_eq!(o.pushforward(&hyperelliptic_map), matrix_i64(&hyperelliptic().matrix));
    assert_eq!(o.pushforward(&swap_sheets), matrix_i64(&mirror().matrix));
    // f carries x0, y0 to the mirror curves
    for (src, dst) in [("x0", "x1"), ("y0", "y1"), ("z0", "z1")] {
        let pushed: Vec<i64> = o.s.pullback(&hyperelliptic_map, &o.classes[src]);
        assert_eq!(o.coordinates(&pushed), o.coordinates(&o.classes[dst]));
    }
}

#[test]
fn lantern_from_derived_vectors() {
    let o = Oracle::build();
    let gram = o.gram();
    let twist = |name: &str| -> Vec<Vec<i64>> {
        let c = o.coordinates(&o.classes[name]);
        // column j: e_j + ⟨e_j, c⟩ c
        (0..RANK)
            .map(|i| {
                (0..RANK)
                    .map(|j| {
                        let p: i64 = (0..RANK).map(|k| gram[j][k] * c[k]).sum();
                        (i == j) as i64 + p * c[i]
                    })
                    .collect()
            })
            .collect()
    };
    let mul = |a: &Vec<Vec<i64>>, b: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
        (0..RANK).map(|i| (0..RANK).map(|j| (0..RANK).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
    };
    let lhs = mul(&mul(&twist("x0"), &twist("y0")), &twist("z0"));
    let rhs = mul(&mul(&mul(&twist("d10"), &twist("d20")), &twist("d30")), &twist("d40"));
    assert_eq!(lhs, rhs);
    assert!(lantern_check(&build_double_model()).unwrap());
}
