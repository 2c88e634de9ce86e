//! Stabilization of four marked points on a nodal genus-0 fiber to a point of M̄₀,₄ ≅ P¹.

use super::fiber::{split_fiber, FiberPoint, SplitFiber};
use super::{CurveError, ModuliPoint};
use crate::projective::{cube_roots_of_unity, sphere_distance, Mobius, ProjPoint};
use crate::scalar::Scalar;

/// Node edge through which the branch of `from` containing `to` leaves `from`.
fn branch_edge<T: Scalar>(s: &SplitFiber<T>, from: usize, to: usize) -> Option<usize> {
    if from == to {
        return None;
    }
    let parent = |c: usize| s.nodes.iter().find(|n| n.lower == c);
    let mut cur = to;
    while let Some(n) = parent(cur) {
        if n.upper == from {
            return Some(n.edge);
        }
        cur = n.upper;
    }
    parent(from).map(|n| n.edge)
}

fn below<T: Scalar>(s: &SplitFiber<T>, comp: usize, edge: usize) -> bool {
    let mut cur = comp;
    loop {
        match s.nodes.iter().find(|n| n.lower == cur) {
            None => return false,
            Some(n) if n.edge == edge => return true,
            Some(n) => cur = n.upper,
        }
    }
}

/// Cross-ratio coordinate of four distinct smooth points of the fiber over `p`.
///
/// On a smooth fiber the Möbius map sending the first three points to the reference values is
/// applied to the fourth. On a nodal fiber the points are pushed to the stable model: a 2+2
/// separation by a node yields the boundary value where the fourth point meets its partner,
/// otherwise the points are read off on the unique component separating all four.
pub fn stabilize_4pt<T: Scalar>(p: &ModuliPoint<T>, points: [&FiberPoint<T>; 4]) -> Result<ProjPoint<T>, CurveError> {
    let s = split_fiber(p)?;
    let mut comps = [0usize; 4];
    for (i, q) in points.iter().enumerate() {
        let found = s.locate(p, q);
        match found.as_slice() {
            [c] => comps[i] = *c,
            [] => return Err(CurveError::NotSmooth(i)),
            _ => return Err(CurveError::NotSmooth(i)),
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if comps[i] == comps[j] && points[i].distance(points[j]) <= T::loose() {
                return Err(CurveError::Collision(i, j));
            }
        }
    }
    let refs = cube_roots_of_unity::<T>();
    for n in &s.nodes {
        let side: Vec<bool> = comps.iter().map(|&c| below(&s, c, n.edge)).collect();
        if side.iter().filter(|&&b| b).count() == 2 {
            let partner = (0..3).find(|&j| side[j] == side[3]).expect("two on each side");
            return Ok(refs[partner]);
        }
    }
    for centre in 0..s.components.len() {
        let mut branches = Vec::with_capacity(4);
        for &c in &comps {
            branches.push(branch_edge(&s, centre, c));
        }
        let distinct = (0..4).all(|i| (i + 1..4).all(|j| branches[i].is_none() || branches[i] != branches[j]));
        if !distinct {
            continue;
        }
        let top = s.components[centre].top();
        let mut pos = Vec::with_capacity(4);
        for (i, b) in branches.iter().enumerate() {
            pos.push(match b {
                None => points[i].coords[top],
                Some(e) => s.node(*e).expect("node edge").point.coords[top],
            });
        }
        for i in 0..4 {
            for j in i + 1..4 {
                if sphere_distance(&pos[i], &pos[j]) <= T::loose() {
                    return Err(CurveError::Collision(i, j));
                }
            }
        }
        let m = Mobius::three_point([&pos[0], &pos[1], &pos[2]], [&refs[0], &refs[1], &refs[2]])
            .ok_or(CurveError::Collision(0, 1))?;
        return Ok(m.apply(&pos[3]));
    }
    Err(CurveError::Collision(0, 1))
}
