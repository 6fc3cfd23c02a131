//! Broadphase candidate search for beam contact.
//!
//! Each element gets an axis-aligned box that provably contains its
//! surface: the cubic centerline lies in the convex hull of its four
//! Bézier control points, and inflating the hull box by the cross-section
//! radius plus half the search margin guarantees that two elements whose
//! surfaces come within `margin` of each other have overlapping boxes.
//! Candidate pairs are collected on a uniform spatial hash whose cell size
//! equals the largest box extent, so every overlapping pair shares at
//! least one cell; the result is deduplicated and sorted, hence
//! deterministic regardless of hash iteration order.

use crate::geometry::CurveRef;
use fibril_core::Vec3;
use std::collections::HashMap;

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    /// Smallest box containing a set of points.
    pub fn around(points: &[Vec3]) -> Self {
        assert!(!points.is_empty(), "bounding box of no points");
        let mut min = points[0];
        let mut max = points[0];
        for p in &points[1..] {
            min = min.inf(p);
            max = max.sup(p);
        }
        Aabb { min, max }
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: self.min.inf(&other.min),
            max: self.max.sup(&other.max),
        }
    }

    /// Grow the box by `amount` on every face.
    pub fn inflate(&self, amount: f64) -> Aabb {
        let d = Vec3::new(amount, amount, amount);
        Aabb {
            min: self.min - d,
            max: self.max + d,
        }
    }

    pub fn overlaps(&self, other: &Aabb) -> bool {
        (0..3).all(|a| self.min[a] <= other.max[a] && other.min[a] <= self.max[a])
    }

    /// Longest edge of the box.
    pub fn max_extent(&self) -> f64 {
        (self.max - self.min).max()
    }
}

/// Conservative bounding box of an element's *surface* in the current
/// configuration, inflated by half the search margin.
///
/// The centerline over ξ ∈ [−1, 1] is the cubic Bézier curve with control
/// points d₁, d₁ + (l/3)t₁, d₂ − (l/3)t₂, d₂: over the unit Bézier
/// parameter the endpoint derivatives are 2·(l/2)·tᵢ = l·tᵢ, a third of
/// which separates the inner control points from the ends.  A Bézier
/// curve never leaves the convex hull of its control points.
pub fn element_aabb(curve: &CurveRef, radius: f64, margin: f64) -> Aabb {
    let d = curve.dofs;
    let third = curve.geo.length() / 3.0;
    Aabb::around(&[
        d.d1,
        d.d1 + third * d.t1,
        d.d2 - third * d.t2,
        d.d2,
    ])
    .inflate(radius + 0.5 * margin)
}

/// One element registered for the broadphase.
#[derive(Debug, Clone, Copy)]
pub struct BroadItem {
    /// Global element id (reported in candidate pairs).
    pub id: usize,
    /// Physical fiber (beam) the element belongs to.
    pub fiber: usize,
    /// Position along that fiber, for the neighbor exclusion.
    pub element_in_fiber: usize,
    pub aabb: Aabb,
}

/// All pairs of items whose boxes overlap, excluding an element against
/// itself and against its immediate neighbors on the same fiber (they
/// share a node, so their surfaces always touch).  Pairs come out sorted
/// as (smaller id, larger id).
pub fn broadphase_search(items: &[BroadItem]) -> Vec<(usize, usize)> {
    if items.len() < 2 {
        return Vec::new();
    }
    let cell = items
        .iter()
        .map(|it| it.aabb.max_extent())
        .fold(0.0_f64, f64::max)
        .max(1e-12);
    let coord = |x: f64| (x / cell).floor() as i64;
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (idx, it) in items.iter().enumerate() {
        let lo = [
            coord(it.aabb.min.x),
            coord(it.aabb.min.y),
            coord(it.aabb.min.z),
        ];
        let hi = [
            coord(it.aabb.max.x),
            coord(it.aabb.max.y),
            coord(it.aabb.max.z),
        ];
        for cx in lo[0]..=hi[0] {
            for cy in lo[1]..=hi[1] {
                for cz in lo[2]..=hi[2] {
                    grid.entry((cx, cy, cz)).or_default().push(idx);
                }
            }
        }
    }
    let mut pairs = Vec::new();
    for bucket in grid.values() {
        for (a, &i) in bucket.iter().enumerate() {
            for &j in &bucket[a + 1..] {
                let (p, q) = (&items[i], &items[j]);
                if p.id == q.id {
                    continue;
                }
                if p.fiber == q.fiber && p.element_in_fiber.abs_diff(q.element_in_fiber) <= 1 {
                    continue;
                }
                if p.aabb.overlaps(&q.aabb) {
                    pairs.push((p.id.min(q.id), p.id.max(q.id)));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use fibril_core::hermite::{CenterlineDofs, RefGeometry};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn bezier_hull_box_contains_the_sampled_curve_surface() {
        let dofs = CenterlineDofs::new(
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 1.2, 0.0).normalize(),
            Vec3::new(1.0, 0.0, 0.4),
            Vec3::new(1.0, -1.5, 0.3).normalize(),
        );
        let geo = RefGeometry::new(dofs, None).unwrap();
        let curve = CurveRef::new(&geo, &dofs);
        let radius = 0.07;
        let aabb = element_aabb(&curve, radius, 0.0);
        for k in 0..=200 {
            let xi = -1.0 + k as f64 / 100.0;
            let p = curve.eval_xi(xi, 0);
            for a in 0..3 {
                assert!(
                    p[a] - radius >= aabb.min[a] - 1e-12
                        && p[a] + radius <= aabb.max[a] + 1e-12,
                    "surface ball at xi={xi} escapes the box along axis {a}"
                );
            }
        }
    }

    #[test]
    fn margin_inflation_makes_nearby_elements_overlap() {
        // Two straight separated elements: surfaces 0.1 apart.
        let mk = |z: f64| {
            CenterlineDofs::new(
                Vec3::new(-1.0, 0.0, z),
                Vec3::x(),
                Vec3::new(1.0, 0.0, z),
                Vec3::x(),
            )
        };
        let (d1, d2) = (mk(0.0), mk(0.2));
        let (g1, g2) = (
            RefGeometry::new(d1, None).unwrap(),
            RefGeometry::new(d2, None).unwrap(),
        );
        let r = 0.05;
        let gap = 0.2 - 2.0 * r; // 0.1 between surfaces
        let tight = |m| {
            (
                element_aabb(&CurveRef::new(&g1, &d1), r, m),
                element_aabb(&CurveRef::new(&g2, &d2), r, m),
            )
        };
        let (a, b) = tight(gap * 0.99);
        assert!(!a.overlaps(&b), "margin below the gap must not connect them");
        let (a, b) = tight(gap * 1.01);
        assert!(a.overlaps(&b), "margin above the gap must connect them");
    }

    #[test]
    fn neighbor_exclusion_drops_adjacent_elements_only() {
        // Three consecutive elements of one fiber along x, plus one
        // element of another fiber crossing all of them.  The search
        // margin is large enough that even the second-neighbor boxes
        // (elements 0 and 2) overlap.
        let seg = |x0: f64, x1: f64| {
            let d = CenterlineDofs::new(
                Vec3::new(x0, 0.0, 0.0),
                Vec3::x(),
                Vec3::new(x1, 0.0, 0.0),
                Vec3::x(),
            );
            let g = RefGeometry::new(d, None).unwrap();
            element_aabb(&CurveRef::new(&g, &d), 0.05, 2.0)
        };
        let items = vec![
            BroadItem {
                id: 0,
                fiber: 0,
                element_in_fiber: 0,
                aabb: seg(0.0, 1.0),
            },
            BroadItem {
                id: 1,
                fiber: 0,
                element_in_fiber: 1,
                aabb: seg(1.0, 2.0),
            },
            BroadItem {
                id: 2,
                fiber: 0,
                element_in_fiber: 2,
                aabb: seg(2.0, 3.0),
            },
            BroadItem {
                id: 3,
                fiber: 1,
                element_in_fiber: 0,
                aabb: seg(0.0, 3.0),
            },
        ];
        let pairs = broadphase_search(&items);
        // 0–1 and 1–2 are neighbors (excluded); 0–2 are second neighbors
        // (no shared node) and stay in.  The crossing fiber sees everyone.
        assert_eq!(pairs, vec![(0, 2), (0, 3), (1, 3), (2, 3)]);
    }

    #[test]
    fn spatial_hash_agrees_with_quadratic_reference() {
        let mut rng = ChaCha12Rng::seed_from_u64(987);
        let mut items = Vec::new();
        for id in 0..50 {
            let base = Vec3::new(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            );
            let dir = Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            )
            .normalize();
            let len = rng.random_range(0.4..1.2);
            let dofs = CenterlineDofs::new(base, dir, base + len * dir, dir);
            let geo = RefGeometry::new(dofs, None).unwrap();
            items.push(BroadItem {
                id,
                fiber: id / 5,
                element_in_fiber: id % 5,
                aabb: element_aabb(&CurveRef::new(&geo, &dofs), 0.05, 0.1),
            });
        }
        let fast = broadphase_search(&items);
        let mut slow = Vec::new();
        for i in 0..items.len() {
            for j in (i + 1)..items.len() {
                let (p, q) = (&items[i], &items[j]);
                let neighbors =
                    p.fiber == q.fiber && p.element_in_fiber.abs_diff(q.element_in_fiber) <= 1;
                if !neighbors && p.aabb.overlaps(&q.aabb) {
                    slow.push((p.id.min(q.id), p.id.max(q.id)));
                }
            }
        }
        slow.sort_unstable();
        assert_eq!(fast, slow, "hash search must match the exhaustive check");
        assert!(!fast.is_empty(), "fixture should produce some candidates");
    }
}
