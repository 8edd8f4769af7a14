use std::f64::consts::{SQRT_2, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, PointPattern, Window};
use crate::rng::RngStream;

/// Tiling with `k * k` square tiles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingConfig {
    pub k: usize,
}

/// Where one tile's content came from: points within the disc of radius
/// `sqrt(2) l / 2k` around `source` are rotated by `theta` and placed at
/// `target`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileDraw {
    pub target: Point,
    pub source: Point,
    pub theta: f64,
}

#[derive(Clone, Debug)]
pub struct TilingOutput {
    pub pattern: PointPattern,
    pub draws: Vec<TileDraw>,
}

/// Tile geometry for a square window.
#[derive(Clone, Debug)]
pub struct TileLayout {
    window: Window,
    k: usize,
    half: f64,
    radius: f64,
    targets: Vec<Point>,
    candidates: Vec<Point>,
}

impl TileLayout {
    pub fn new(window: &Window, cfg: TilingConfig) -> Result<Self> {
        if !window.is_square() {
            return Err(Error::InvalidWindow(format!(
                "tiling needs a square window, got {} x {}",
                window.width(),
                window.height()
            )));
        }
        if cfg.k < 2 {
            return Err(Error::InvalidArgument(format!(
                "tiling needs k >= 2 for a non-empty source region, got {}",
                cfg.k
            )));
        }
        let k = cfg.k;
        let l = window.width();
        let c = window.center();
        let cell = l / k as f64;
        let half = cell / 2.0;
        let radius = SQRT_2 * half;

        let offsets: Vec<f64> = (0..k).map(|i| -l / 2.0 + (i as f64 + 0.5) * cell).collect();
        let reach = l / 2.0 - radius;
        let spots: Vec<f64> = (0..k)
            .map(|i| -reach + 2.0 * reach * i as f64 / (k - 1) as f64)
            .collect();
        let grid = |v: &[f64]| -> Vec<Point> {
            v.iter()
                .flat_map(|&y| v.iter().map(move |&x| Point::new(c.x + x, c.y + y)))
                .collect()
        };
        Ok(Self {
            window: *window,
            k,
            half,
            radius,
            targets: grid(&offsets),
            candidates: grid(&spots),
        })
    }

    pub fn targets(&self) -> &[Point] {
        &self.targets
    }

    /// Source-centre candidates, all inside `W ⊖ b(o, sqrt(2) l / 2k)`.
    pub fn candidates(&self) -> &[Point] {
        &self.candidates
    }

    /// Half side of a tile.
    pub fn half_side(&self) -> f64 {
        self.half
    }

    /// Points of one tile given its draw, in input order.
    pub fn place(&self, points: &[Point], draw: &TileDraw) -> Vec<Point> {
        let r2 = self.radius * self.radius;
        points
            .iter()
            .filter(|p| p.dist_sq(draw.source) <= r2)
            .filter_map(|&p| {
                let y = (p - draw.source).rotate(draw.theta);
                (y.x.abs() <= self.half && y.y.abs() <= self.half).then(|| self.window.clamp(draw.target + y))
            })
            .collect()
    }

    pub fn replicate(&self, pat: &PointPattern, rng: &mut RngStream) -> TilingOutput {
        let mut points = Vec::new();
        let mut draws = Vec::with_capacity(self.targets.len());
        for &target in &self.targets {
            let source = self.candidates[rng.random_range(0..self.candidates.len())];
            let theta = rng.random_range(0.0..TAU);
            let draw = TileDraw { target, source, theta };
            points.extend(self.place(pat.points(), &draw));
            draws.push(draw);
        }
        TilingOutput {
            pattern: PointPattern::clipped(points, self.window),
            draws,
        }
    }

    /// Debug reconstruction with every tile taken from its own location and
    /// no rotation; each point is assigned to exactly one tile and copied
    /// unchanged, so the output holds exactly the input points (tile by
    /// tile).
    pub fn identity(&self, pat: &PointPattern) -> TilingOutput {
        let cell = self.window.width() / self.k as f64;
        let index = |v: f64, lo: f64| (((v - lo) / cell).floor().max(0.0) as usize).min(self.k - 1);
        let mut by_tile: Vec<Vec<Point>> = vec![Vec::new(); self.targets.len()];
        for &p in pat.points() {
            let t = index(p.y, self.window.ymin) * self.k + index(p.x, self.window.xmin);
            by_tile[t].push(p);
        }
        let draws = self
            .targets
            .iter()
            .map(|&t| TileDraw {
                target: t,
                source: t,
                theta: 0.0,
            })
            .collect();
        TilingOutput {
            pattern: PointPattern::clipped(by_tile.into_iter().flatten(), self.window),
            draws,
        }
    }
}

/// One tiling replicate.
pub fn tile_replicate(pat: &PointPattern, cfg: TilingConfig, rng: &mut RngStream) -> Result<PointPattern> {
    Ok(TileLayout::new(pat.window(), cfg)?.replicate(pat, rng).pattern)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Window {
        Window::centered_square(1.0).unwrap()
    }

    #[test]
    fn k2_geometry() {
        let layout = TileLayout::new(&unit(), TilingConfig { k: 2 }).unwrap();
        let mut targets: Vec<(f64, f64)> = layout.targets().iter().map(|p| (p.x, p.y)).collect();
        targets.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(targets, vec![(-0.25, -0.25), (-0.25, 0.25), (0.25, -0.25), (0.25, 0.25)]);
        let bound = 0.5 - SQRT_2 / 4.0;
        for c in layout.candidates() {
            assert!(c.x.abs() <= bound + 1e-15 && c.y.abs() <= bound + 1e-15);
        }
        assert!((bound - 0.1464466).abs() < 1e-7);
    }

    #[test]
    fn guards() {
        let rect = Window::new(0.0, 2.0, 0.0, 1.0).unwrap();
        assert!(TileLayout::new(&rect, TilingConfig { k: 2 }).is_err());
        assert!(TileLayout::new(&unit(), TilingConfig { k: 1 }).is_err());
    }

    #[test]
    fn empty_in_empty_out() {
        let pat = PointPattern::empty(unit());
        let out = tile_replicate(&pat, TilingConfig { k: 3 }, &mut RngStream::from_seed(1)).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn single_centre_point() {
        let pat = PointPattern::new(vec![Point::new(0.0, 0.0)], unit()).unwrap();
        let layout = TileLayout::new(&unit(), TilingConfig { k: 2 }).unwrap();
        let mut rng = RngStream::from_seed(4);
        for _ in 0..200 {
            let out = layout.replicate(&pat, &mut rng);
            assert!(out.pattern.len() <= 4);
            for p in out.pattern.points() {
                let inside_some = out
                    .draws
                    .iter()
                    .any(|d| (p.x - d.target.x).abs() <= 0.25 + 1e-12 && (p.y - d.target.y).abs() <= 0.25 + 1e-12);
                assert!(inside_some);
            }
        }
    }
}
