use crate::geometry::{Point, Window};

/// Visit every unordered pair `i < j` with `|p_j - p_i| <= radius`.
///
/// Uses a uniform cell list when the radius is small relative to the
/// window; falls back to the full double loop otherwise. The visiting order
/// depends only on the order of `points`.
pub(crate) fn for_each_close_pair<F>(points: &[Point], window: &Window, radius: f64, mut f: F)
where
    F: FnMut(usize, usize, Point),
{
    let n = points.len();
    let r2 = radius * radius;
    let cols = cells_along(window.width(), radius);
    let rows = cells_along(window.height(), radius);
    if cols < 4 || rows < 4 || n < 64 {
        for i in 0..n {
            for j in (i + 1)..n {
                let d = points[j] - points[i];
                if d.norm_sq() <= r2 {
                    f(i, j, d);
                }
            }
        }
        return;
    }

    let cw = window.width() / cols as f64;
    let ch = window.height() / rows as f64;
    let cell_of = |p: Point| {
        let cx = (((p.x - window.xmin) / cw) as usize).min(cols - 1);
        let cy = (((p.y - window.ymin) / ch) as usize).min(rows - 1);
        (cx, cy)
    };

    // counting sort of point indices into cells
    let mut start = vec![0usize; cols * rows + 1];
    let cells: Vec<(usize, usize)> = points.iter().map(|&p| cell_of(p)).collect();
    for &(cx, cy) in &cells {
        start[cy * cols + cx + 1] += 1;
    }
    for k in 0..cols * rows {
        start[k + 1] += start[k];
    }
    let mut fill = start.clone();
    let mut members = vec![0usize; n];
    for (i, &(cx, cy)) in cells.iter().enumerate() {
        let slot = &mut fill[cy * cols + cx];
        members[*slot] = i;
        *slot += 1;
    }

    for i in 0..n {
        let (cx, cy) = cells[i];
        for ny in cy.saturating_sub(1)..=(cy + 1).min(rows - 1) {
            for nx in cx.saturating_sub(1)..=(cx + 1).min(cols - 1) {
                let k = ny * cols + nx;
                for &j in &members[start[k]..start[k + 1]] {
                    if j <= i {
                        continue;
                    }
                    let d = points[j] - points[i];
                    if d.norm_sq() <= r2 {
                        f(i, j, d);
                    }
                }
            }
        }
    }
}

fn cells_along(extent: f64, radius: f64) -> usize {
    if !(radius > 0.0) || !radius.is_finite() {
        return 1;
    }
    ((extent / radius).floor() as usize).clamp(1, 512)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use rand::Rng;

    #[test]
    fn matches_double_loop() {
        let w = Window::unit_square();
        let mut rng = RngStream::from_seed(3);
        let pts: Vec<Point> = (0..300)
            .map(|_| Point::new(rng.random(), rng.random()))
            .collect();
        for radius in [0.01, 0.05, 0.2, 2.0] {
            let mut fast = Vec::new();
            for_each_close_pair(&pts, &w, radius, |i, j, _| fast.push((i, j)));
            fast.sort_unstable();
            let mut slow = Vec::new();
            for i in 0..pts.len() {
                for j in (i + 1)..pts.len() {
                    if pts[i].dist_sq(pts[j]) <= radius * radius {
                        slow.push((i, j));
                    }
                }
            }
            assert_eq!(fast, slow, "radius {radius}");
        }
    }
}
