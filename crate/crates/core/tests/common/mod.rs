//! Shared environments and helpers for integration tests.
#![allow(dead_code)]

use squadplan_core::geom::{pt, Point, PolygonalEnvironment};

pub fn room(side: f64) -> PolygonalEnvironment {
    PolygonalEnvironment::new(
        vec![pt(0.0, 0.0), pt(side, 0.0), pt(side, side), pt(0.0, side)],
        vec![],
    )
    .unwrap()
    .with_name("room")
}

pub fn room_with_hole() -> PolygonalEnvironment {
    PolygonalEnvironment::new(
        vec![pt(0.0, 0.0), pt(16.0, 0.0), pt(16.0, 16.0), pt(0.0, 16.0)],
        vec![vec![pt(7.0, 7.0), pt(9.0, 7.0), pt(9.0, 9.0), pt(7.0, 9.0)]],
    )
    .unwrap()
    .with_name("hole")
}

pub fn l_shape() -> PolygonalEnvironment {
    PolygonalEnvironment::new(
        vec![
            pt(0.0, 0.0),
            pt(20.0, 0.0),
            pt(20.0, 6.0),
            pt(8.0, 6.0),
            pt(8.0, 14.0),
            pt(0.0, 14.0),
        ],
        vec![],
    )
    .unwrap()
    .with_name("l-shape")
}

/// Two rooms joined by a straight passage: `gap` is the workspace passage
/// width (free-space corridor width = gap − 2), `len` its workspace length
/// (free-space corridor depth = len + 2).
pub fn dumbbell(gap: f64, len: f64) -> PolygonalEnvironment {
    let h = 10.0 + gap;
    let y0 = (h - gap) / 2.0;
    let y1 = y0 + gap;
    PolygonalEnvironment::new(
        vec![
            pt(0.0, 0.0),
            pt(10.0, 0.0),
            pt(10.0, y0),
            pt(10.0 + len, y0),
            pt(10.0 + len, 0.0),
            pt(20.0 + len, 0.0),
            pt(20.0 + len, h),
            pt(10.0 + len, h),
            pt(10.0 + len, y1),
            pt(10.0, y1),
            pt(10.0, h),
            pt(0.0, h),
        ],
        vec![],
    )
    .unwrap()
    .with_name("dumbbell")
}

/// A comb: a long base with teeth cut in from the top.
pub fn comb() -> PolygonalEnvironment {
    let mut outer = vec![pt(0.0, 0.0), pt(30.0, 0.0), pt(30.0, 12.0)];
    // teeth: slots of width 2.5 cut down to y = 5
    let mut x = 26.0;
    while x > 3.0 {
        outer.push(pt(x, 12.0));
        outer.push(pt(x, 5.0));
        outer.push(pt(x - 2.5, 5.0));
        outer.push(pt(x - 2.5, 12.0));
        x -= 5.5;
    }
    outer.push(pt(0.0, 12.0));
    PolygonalEnvironment::new(outer, vec![]).unwrap().with_name("comb")
}

/// Deterministic splitmix64-based generator for test sampling.
pub struct TestRng(pub u64);

impl TestRng {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z = z ^ (z >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn index(&mut self, n: usize) -> usize {
        (self.next_f64() * n as f64) as usize % n.max(1)
    }

    pub fn point(&mut self, lo: Point, hi: Point) -> Point {
        pt(self.in_range(lo.x, hi.x), self.in_range(lo.y, hi.y))
    }
}
