//! Greedy upper-bound search: nearest-neighbour transport between cells of
//! opposite sign, then between diffcells, one order at a time.

use std::collections::{BTreeMap, HashMap};

use super::diff::{DiffCell, DiffChain};
use super::Decomposition;
use crate::chains::{Cell, CellKey, PolyChain, Term};
use crate::error::Result;
use crate::geom;
use crate::scalar::{order_key, Scalar};

/// Only translations shorter than this make a pair cheaper than two order-0
/// terms.
const MAX_PAIR_DIST: f64 = 2.0;

/// Alignment refinement goes at most this many levels past the finest level.
const MAX_ALIGN_EXTRA: i32 = 3;

/// Translation-invariant description of a cell; cells with equal keys are
/// translates of one another.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum ShapeKey {
    Dyadic { axes: Vec<usize>, level: i32 },
    Cube { edge: u64, frame: Vec<u64> },
    Simplex(Vec<u64>),
}

/// `(shape, anchor point)`; translating by the anchor difference maps one
/// cell of a shape onto another.
fn shape<S: Scalar>(cell: &Cell<S>) -> (ShapeKey, Vec<S>) {
    match cell {
        Cell::Cube(c) => match c.dyadic() {
            Some(d) => (
                ShapeKey::Dyadic { axes: d.axes.clone(), level: d.level },
                d.center.iter().map(|x| x.to_scalar()).collect(),
            ),
            None => (
                ShapeKey::Cube { edge: order_key(c.edge()), frame: c.frame().iter().flatten().map(|&x| order_key(x)).collect() },
                c.center().to_vec(),
            ),
        },
        Cell::Simplex(s) => {
            let v0 = &s.vertices()[0];
            let offsets = s.vertices()[1..].iter().flat_map(|p| geom::sub(p, v0)).map(order_key).collect();
            (ShapeKey::Simplex(offsets), v0.clone())
        }
    }
}

fn vector_keys<S: Scalar>(vs: &[Vec<S>]) -> Vec<u64> {
    vs.iter().flatten().map(|&x| order_key(x)).collect()
}

/// Refines dyadic cubes, grouped by axes, to a common level: the level at
/// which overlapping cubes share subcells when that is at most
/// [`MAX_ALIGN_EXTRA`] finer than the finest level present, otherwise the
/// finest level. Groups whose refinement would exceed `budget` cells are left
/// alone.
fn align<S: Scalar>(p: &PolyChain<S>, budget: usize) -> Result<PolyChain<S>> {
    let n = p.ambient();
    let k = p.grade();
    let mut groups: BTreeMap<Vec<usize>, Vec<&Term<S>>> = BTreeMap::new();
    let mut out = PolyChain::zero(n, k)?;
    for t in p.terms() {
        match &t.cell {
            Cell::Cube(c) if c.dyadic().is_some() => groups.entry(c.dyadic().unwrap().axes.clone()).or_default().push(t),
            _ => out.push(t.coeff, t.cell.clone())?,
        }
    }
    for (axes, terms) in groups {
        let dy: Vec<_> = terms
            .iter()
            .map(|t| match &t.cell {
                Cell::Cube(c) => c.dyadic().unwrap(),
                Cell::Simplex(_) => unreachable!(),
            })
            .collect();
        let finest = dy.iter().map(|d| d.level).max().unwrap();
        let corner = |d: &crate::chains::DyadicCube, a: usize| d.center[a].checked_sub(d.half_edge());
        let mut aligned = finest;
        'outer: for d in &dy[1..] {
            for &a in &axes {
                match (corner(d, a), corner(dy[0], a)) {
                    (Some(x), Some(y)) => match x.checked_sub(y) {
                        Some(diff) if diff.mantissa() != 0 => aligned = aligned.max(diff.exponent()),
                        Some(_) => {}
                        None => {
                            aligned = i32::MAX;
                            break 'outer;
                        }
                    },
                    _ => {
                        aligned = i32::MAX;
                        break 'outer;
                    }
                }
            }
        }
        let cells_at = |level: i32| -> usize {
            dy.iter()
                .map(|d| {
                    let shift = ((level - d.level) as usize).saturating_mul(axes.len());
                    if shift >= 40 {
                        usize::MAX / 4
                    } else {
                        1usize << shift
                    }
                })
                .fold(0usize, |a, b| a.saturating_add(b))
        };
        let level = if aligned <= finest + MAX_ALIGN_EXTRA && cells_at(aligned) <= budget {
            Some(aligned)
        } else if cells_at(finest) <= budget {
            Some(finest)
        } else {
            None
        };
        let group = PolyChain::from_terms(n, k, terms.into_iter().cloned().collect())?;
        let group = match level {
            Some(l) => group.refine_to_level(l)?,
            None => group,
        };
        for t in group.terms() {
            out.push(t.coeff, t.cell.clone())?;
        }
    }
    Ok(out.canonicalize())
}

/// Bucket grid over anchor points for nearest-neighbour queries among the
/// items that still carry coefficient.
struct Grid {
    h: f64,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
}

impl Grid {
    fn new(points: &[Vec<f64>], h: f64) -> Grid {
        let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets.entry(Grid::bucket_of(p, h)).or_default().push(i);
        }
        Grid { h, buckets }
    }

    fn bucket_of(p: &[f64], h: f64) -> Vec<i64> {
        p.iter().map(|&x| (x / h).floor() as i64).collect()
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Offsets with Chebyshev norm exactly `rho`.
fn ring(n: usize, rho: i64) -> Vec<Vec<i64>> {
    let side = 2 * rho + 1;
    let total = (side as usize).pow(n as u32);
    let mut out = Vec::new();
    for mut idx in 0..total {
        let mut o = Vec::with_capacity(n);
        for _ in 0..n {
            o.push((idx % side as usize) as i64 - rho);
            idx /= side as usize;
        }
        if o.iter().any(|x| x.abs() == rho) {
            out.push(o);
        }
    }
    out
}

/// Nearest live target strictly closer than [`MAX_PAIR_DIST`]; ties go to the
/// lower index.
fn nearest<S: Scalar>(q: &[f64], grid: &Grid, targets: &[Vec<f64>], remaining: &[S], live: &[usize]) -> Option<usize> {
    let n = q.len();
    let mut best: Option<(f64, usize)> = None;
    let consider = |j: usize, best: &mut Option<(f64, usize)>| {
        if remaining[j] <= S::zero() {
            return;
        }
        let d = dist(q, &targets[j]);
        if d >= MAX_PAIR_DIST {
            return;
        }
        match best {
            Some((bd, bj)) if (d, j) >= (*bd, *bj) => {}
            _ => *best = Some((d, j)),
        }
    };
    let b = Grid::bucket_of(q, grid.h);
    let mut rho = 0i64;
    loop {
        if let Some((bd, _)) = best {
            if bd <= (rho - 1) as f64 * grid.h {
                break;
            }
        }
        if (rho - 1) as f64 * grid.h >= MAX_PAIR_DIST {
            break;
        }
        let side = (2 * rho + 1) as f64;
        if side.powi(n as i32) > (4 * live.len() + 64) as f64 {
            for &j in live {
                consider(j, &mut best);
            }
            break;
        }
        for o in ring(n, rho) {
            let key: Vec<i64> = b.iter().zip(&o).map(|(x, y)| x + y).collect();
            if let Some(list) = grid.buckets.get(&key) {
                for &j in list {
                    consider(j, &mut best);
                }
            }
        }
        rho += 1;
    }
    best.map(|(_, j)| j)
}

/// Greedy transport: every source, in order, repeatedly takes coefficient
/// from its nearest live target. Returns `(source, target, amount)` and
/// leaves the unmatched amounts in the two slices.
fn transport<S: Scalar>(
    src: &[Vec<f64>],
    src_amount: &mut [S],
    dst: &[Vec<f64>],
    dst_amount: &mut [S],
    h: f64,
) -> Vec<(usize, usize, S)> {
    let mut pairs = Vec::new();
    if src.is_empty() || dst.is_empty() {
        return pairs;
    }
    let grid = Grid::new(dst, h);
    let mut live: Vec<usize> = (0..dst.len()).filter(|&j| dst_amount[j] > S::zero()).collect();
    let mut alive = live.len();
    for i in 0..src.len() {
        while src_amount[i] > S::zero() && alive > 0 {
            if live.len() > 2 * alive + 16 {
                live.retain(|&j| dst_amount[j] > S::zero());
            }
            let Some(j) = nearest(&src[i], &grid, dst, dst_amount, &live) else { break };
            let t = src_amount[i].min(dst_amount[j]);
            src_amount[i] = src_amount[i] - t;
            dst_amount[j] = dst_amount[j] - t;
            if dst_amount[j] <= S::zero() {
                dst_amount[j] = S::zero();
                alive -= 1;
            }
            if src_amount[i] <= S::zero() {
                src_amount[i] = S::zero();
            }
            pairs.push((i, j, t));
        }
    }
    pairs
}

struct Item<S> {
    coeff: S,
    cell: DiffCell<S>,
    anchor: Vec<S>,
}

/// One round of pairing among items sharing a group key. Paired items come
/// back one order higher; the rest keep their order.
fn pair_round<S: Scalar, K: Ord>(items: Vec<(K, Item<S>)>, size: impl Fn(&DiffCell<S>) -> f64) -> Result<(Vec<(S, DiffCell<S>)>, Vec<(S, DiffCell<S>)>)> {
    let mut groups: BTreeMap<K, Vec<Item<S>>> = BTreeMap::new();
    for (key, item) in items {
        groups.entry(key).or_default().push(item);
    }
    let mut raised = Vec::new();
    let mut kept = Vec::new();
    for (_, group) in groups {
        let h = group.iter().map(|it| size(&it.cell)).fold(0.0, f64::max).max(1e-9);
        let (pos, neg): (Vec<&Item<S>>, Vec<&Item<S>>) = group.iter().partition(|it| it.coeff > S::zero());
        let anchors = |v: &[&Item<S>]| -> Vec<Vec<f64>> { v.iter().map(|it| it.anchor.iter().map(|x| x.as_f64()).collect()).collect() };
        let (pa, na) = (anchors(&pos), anchors(&neg));
        let mut pr: Vec<S> = pos.iter().map(|it| it.coeff).collect();
        let mut nr: Vec<S> = neg.iter().map(|it| -it.coeff).collect();
        for (i, j, t) in transport(&pa, &mut pr, &na, &mut nr, h) {
            let v = geom::sub(&neg[j].anchor, &pos[i].anchor);
            raised.push((t, pos[i].cell.raise(v)?));
        }
        for (it, &rest) in pos.iter().zip(&pr) {
            if rest > S::zero() {
                kept.push((rest, it.cell.clone()));
            }
        }
        for (it, &rest) in neg.iter().zip(&nr) {
            if rest > S::zero() {
                kept.push((-rest, it.cell.clone()));
            }
        }
    }
    Ok((raised, kept))
}

fn cell_size<S: Scalar>(c: &Cell<S>) -> f64 {
    match c {
        Cell::Cube(cube) => cube.edge().as_f64(),
        Cell::Simplex(s) => s.diameter().as_f64(),
    }
}

/// Merges diffcells with identical base and vectors.
fn merge<S: Scalar>(terms: Vec<(S, DiffCell<S>)>) -> Vec<(S, DiffCell<S>)> {
    let mut map: BTreeMap<(CellKey, Vec<u64>), (S, DiffCell<S>)> = BTreeMap::new();
    for (a, c) in terms {
        let key = (c.base().key(), vector_keys(c.vectors()));
        map.entry(key).and_modify(|e| e.0 = e.0 + a).or_insert((a, c));
    }
    map.into_values().filter(|(a, _)| *a != S::zero()).collect()
}

/// Decomposition of `p` using diffcells of order at most `r`.
pub(crate) fn search<S: Scalar>(p: &PolyChain<S>, r: usize, budget: usize) -> Result<Decomposition<S>> {
    let n = p.ambient();
    let k = p.grade();
    let canon = p.canonicalize();
    if r == 0 || canon.is_empty() {
        return Decomposition::trivial(&canon, r);
    }
    let aligned = align(&canon, budget)?;
    let mut levels: Vec<Vec<(S, DiffCell<S>)>> = vec![
        aligned.terms().iter().map(|t| Ok((t.coeff, DiffCell::new(t.cell.clone(), Vec::new())?))).collect::<Result<_>>()?,
    ];
    for order in 0..r.min(super::DEFAULT_R_MAX) {
        let current = merge(std::mem::take(&mut levels[order]));
        let items = current
            .into_iter()
            .map(|(coeff, cell)| {
                let (key, anchor) = shape(cell.base());
                ((key, vector_keys(cell.vectors())), Item { coeff, cell, anchor })
            })
            .collect();
        let (raised, kept) = pair_round(items, |c| cell_size(c.base()))?;
        levels[order] = kept;
        levels.push(raised);
    }
    let mut d = Vec::with_capacity(levels.len());
    for (order, terms) in levels.into_iter().enumerate() {
        let mut chain = DiffChain::zero(n, k, order)?;
        for (a, c) in terms {
            chain.push(a, c)?;
        }
        d.push(chain);
    }
    while d.len() < r + 1 {
        d.push(DiffChain::zero(n, k, d.len())?);
    }
    Ok(Decomposition { r, d, c: None, c_certificate: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::Cube;

    fn unit_cube(axes: &[usize], level: i32, center: Vec<f64>) -> Cube<f64> {
        Cube::axis(center, axes, 2f64.powi(-level), 1).unwrap()
    }

    #[test]
    fn ring_sizes() {
        assert_eq!(ring(2, 0).len(), 1);
        assert_eq!(ring(2, 1).len(), 8);
        assert_eq!(ring(3, 2).len(), 125 - 27);
    }

    #[test]
    fn transport_prefers_nearest() {
        let src = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        let dst = vec![vec![1.1, 0.0], vec![0.1, 0.0], vec![5.0, 0.0]];
        let mut sa = vec![1.0, 2.0];
        let mut da = vec![1.0, 1.0, 1.0];
        let pairs = transport(&src, &mut sa, &dst, &mut da, 0.5);
        assert_eq!(pairs, vec![(0, 1, 1.0), (1, 0, 1.0)]);
        assert_eq!(sa, vec![0.0, 1.0]);
        assert_eq!(da, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn overlapping_cubes_align() {
        let a = unit_cube(&[0, 1], 1, vec![0.25, 0.25]);
        let b = unit_cube(&[0, 1], 1, vec![0.5, 0.25]);
        let mut p = PolyChain::zero(2, 2).unwrap();
        p.push(1.0, a).unwrap();
        p.push(-1.0, b).unwrap();
        let al = align(&p, 1 << 20).unwrap();
        // Level 2: each cube is four cells, two of which cancel.
        assert_eq!(al.len(), 4);
        assert!((al.mass() - 0.25).abs() < 1e-15);
    }
}
