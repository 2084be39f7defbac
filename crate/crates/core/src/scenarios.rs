//! Bundled benchmark scenarios.
//!
//! `corridor-swap`: three discs cross a barrier through a single gap.
//! `ring-exchange`: four discs swap diametrically around a central pillar.
//! `grid-cubicles`: five discs weave between a 3x3 grid of boxes.
//! `rooms-rotate`: four discs in four rooms each move to the next room
//! clockwise through narrow doors.

use crate::geometry::{Point2, Polygon2};
use crate::scenario::{RobotSpec, Scenario};

fn robot(radius: f64, start: (f64, f64), target: (f64, f64)) -> RobotSpec {
    RobotSpec {
        radius,
        start: Point2::new(start.0, start.1),
        target: Point2::new(target.0, target.1),
    }
}

pub fn corridor_swap() -> Scenario {
    Scenario {
        name: "corridor-swap".into(),
        workspace: Polygon2::rect(0.0, 0.0, 10.0, 6.0),
        obstacles: vec![Polygon2::rect(4.5, 0.0, 5.5, 2.2), Polygon2::rect(4.5, 3.8, 5.5, 6.0)],
        robots: vec![
            robot(0.4, (1.5, 1.5), (8.5, 4.5)),
            robot(0.4, (8.5, 4.5), (1.5, 1.5)),
            robot(0.4, (1.5, 4.5), (8.5, 1.5)),
        ],
    }
}

pub fn ring_exchange() -> Scenario {
    let (cx, cy, r) = (5.0, 5.0, 3.5);
    let at = |k: usize| {
        let a = std::f64::consts::FRAC_PI_4 + k as f64 * std::f64::consts::FRAC_PI_2;
        let round = |v: f64| (v * 1e6).round() / 1e6;
        (round(cx + r * a.cos()), round(cy + r * a.sin()))
    };
    Scenario {
        name: "ring-exchange".into(),
        workspace: Polygon2::rect(0.0, 0.0, 10.0, 10.0),
        obstacles: vec![Polygon2::rect(4.0, 4.0, 6.0, 6.0)],
        robots: (0..4).map(|k| robot(0.5, at(k), at((k + 2) % 4))).collect(),
    }
}

pub fn grid_cubicles() -> Scenario {
    let mut obstacles = Vec::new();
    for cx in [3.0, 6.0, 9.0] {
        for cy in [3.0, 6.0, 9.0] {
            obstacles.push(Polygon2::rect(cx - 0.8, cy - 0.8, cx + 0.8, cy + 0.8));
        }
    }
    Scenario {
        name: "grid-cubicles".into(),
        workspace: Polygon2::rect(0.0, 0.0, 12.0, 12.0),
        obstacles,
        robots: vec![
            robot(0.35, (1.0, 1.0), (11.0, 11.0)),
            robot(0.35, (11.0, 11.0), (1.0, 1.0)),
            robot(0.35, (11.0, 1.0), (1.0, 11.0)),
            robot(0.35, (1.0, 11.0), (11.0, 1.0)),
            robot(0.35, (4.5, 4.5), (7.5, 7.5)),
        ],
    }
}

pub fn rooms_rotate() -> Scenario {
    Scenario {
        name: "rooms-rotate".into(),
        workspace: Polygon2::rect(0.0, 0.0, 10.0, 10.0),
        obstacles: vec![
            Polygon2::rect(4.8, 3.0, 5.2, 7.0),
            Polygon2::rect(3.0, 4.8, 7.0, 5.2),
            Polygon2::rect(4.8, 0.0, 5.2, 1.6),
            Polygon2::rect(4.8, 8.4, 5.2, 10.0),
            Polygon2::rect(0.0, 4.8, 1.6, 5.2),
            Polygon2::rect(8.4, 4.8, 10.0, 5.2),
        ],
        // top-left -> top-right -> bottom-right -> bottom-left -> top-left
        robots: vec![
            robot(0.4, (2.5, 7.5), (7.5, 7.5)),
            robot(0.4, (7.5, 7.5), (7.5, 2.5)),
            robot(0.4, (7.5, 2.5), (2.5, 2.5)),
            robot(0.4, (2.5, 2.5), (2.5, 7.5)),
        ],
    }
}

/// All bundled scenarios in a fixed order.
pub fn bundled() -> Vec<Scenario> {
    vec![corridor_swap(), ring_exchange(), grid_cubicles(), rooms_rotate()]
}

pub fn by_name(name: &str) -> Option<Scenario> {
    bundled().into_iter().find(|s| s.name == name)
}
