//! Marching-squares level-set extraction over a masked scalar field on a
//! rectilinear grid.
//!
//! Masked nodes (`None`) never participate in interpolation: any square
//! touching one is skipped, so no spurious contours appear along masked
//! regions such as an extinction boundary.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

/// Node-centred scalar values on the grid spanned by `xs` x `ys`,
/// stored row-major by y: `values[iy * xs.len() + ix]`.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<Option<f64>>,
}

impl ScalarField {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, values: Vec<Option<f64>>) -> Self {
        assert_eq!(values.len(), xs.len() * ys.len());
        ScalarField { xs, ys, values }
    }

    pub fn get(&self, ix: usize, iy: usize) -> Option<f64> {
        self.values[iy * self.xs.len() + ix]
    }

    /// Bilinear interpolation at (x, y); `None` outside the grid or when any
    /// corner of the containing cell is masked.
    pub fn bilinear(&self, x: f64, y: f64) -> Option<f64> {
        let ix = cell_index(&self.xs, x)?;
        let iy = cell_index(&self.ys, y)?;
        let (x0, x1) = (self.xs[ix], self.xs[ix + 1]);
        let (y0, y1) = (self.ys[iy], self.ys[iy + 1]);
        let tx = (x - x0) / (x1 - x0);
        let ty = (y - y0) / (y1 - y0);
        let v00 = self.get(ix, iy)?;
        let v10 = self.get(ix + 1, iy)?;
        let v01 = self.get(ix, iy + 1)?;
        let v11 = self.get(ix + 1, iy + 1)?;
        Some(
            v00 * (1.0 - tx) * (1.0 - ty)
                + v10 * tx * (1.0 - ty)
                + v01 * (1.0 - tx) * ty
                + v11 * tx * ty,
        )
    }
}

fn cell_index(coords: &[f64], v: f64) -> Option<usize> {
    if coords.len() < 2 || v < coords[0] || v > coords[coords.len() - 1] {
        return None;
    }
    let mut i = match coords.binary_search_by(|c| c.partial_cmp(&v).unwrap()) {
        Ok(i) => i,
        Err(i) => i.saturating_sub(1),
    };
    if i >= coords.len() - 1 {
        i = coords.len() - 2;
    }
    Some(i)
}

/// An open or closed chain of contour points.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<(f64, f64)>,
}

// A lattice edge: horizontal (axis 0) from node (ix, iy) to (ix+1, iy), or
// vertical (axis 1) from (ix, iy) to (ix, iy+1). Keying crossings by edge
// identity makes segment chaining exact.
type EdgeId = (u8, usize, usize);

/// Extracts the level set of `field` at `level` as polylines.
pub fn extract_level(field: &ScalarField, level: f64) -> Vec<Polyline> {
    let nx = field.xs.len();
    let ny = field.ys.len();
    if nx < 2 || ny < 2 {
        return Vec::new();
    }

    let mut point_ids: BTreeMap<EdgeId, usize> = BTreeMap::new();
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut segments: Vec<(usize, usize)> = Vec::new();

    let crossing = |field: &ScalarField,
                        points: &mut Vec<(f64, f64)>,
                        point_ids: &mut BTreeMap<EdgeId, usize>,
                        edge: EdgeId|
     -> usize {
        *point_ids.entry(edge).or_insert_with(|| {
            let (axis, ix, iy) = edge;
            let (a, b) = if axis == 0 {
                (field.get(ix, iy).unwrap(), field.get(ix + 1, iy).unwrap())
            } else {
                (field.get(ix, iy).unwrap(), field.get(ix, iy + 1).unwrap())
            };
            let t = if a == b { 0.5 } else { (level - a) / (b - a) };
            let t = t.clamp(0.0, 1.0);
            let p = if axis == 0 {
                (
                    field.xs[ix] + t * (field.xs[ix + 1] - field.xs[ix]),
                    field.ys[iy],
                )
            } else {
                (
                    field.xs[ix],
                    field.ys[iy] + t * (field.ys[iy + 1] - field.ys[iy]),
                )
            };
            points.push(p);
            points.len() - 1
        })
    };

    for iy in 0..ny - 1 {
        for ix in 0..nx - 1 {
            let corners = [
                field.get(ix, iy),
                field.get(ix + 1, iy),
                field.get(ix + 1, iy + 1),
                field.get(ix, iy + 1),
            ];
            let Some(vals) = corners
                .iter()
                .copied()
                .collect::<Option<Vec<f64>>>()
            else {
                continue;
            };
            let mut case = 0u8;
            for (bit, v) in vals.iter().enumerate() {
                if *v >= level {
                    case |= 1 << bit;
                }
            }
            let bottom: EdgeId = (0, ix, iy);
            let top: EdgeId = (0, ix, iy + 1);
            let left: EdgeId = (1, ix, iy);
            let right: EdgeId = (1, ix + 1, iy);
            let pairs: &[(EdgeId, EdgeId)] = match case {
                0 | 15 => &[],
                1 | 14 => &[(left, bottom)],
                2 | 13 => &[(bottom, right)],
                3 | 12 => &[(left, right)],
                4 | 11 => &[(top, right)],
                6 | 9 => &[(bottom, top)],
                7 | 8 => &[(left, top)],
                5 => {
                    // Saddle: disambiguate with the cell-centre mean.
                    let centre = vals.iter().sum::<f64>() / 4.0;
                    if centre >= level {
                        &[(bottom, right), (left, top)]
                    } else {
                        &[(left, bottom), (top, right)]
                    }
                }
                10 => {
                    let centre = vals.iter().sum::<f64>() / 4.0;
                    if centre >= level {
                        &[(left, bottom), (top, right)]
                    } else {
                        &[(bottom, right), (left, top)]
                    }
                }
                _ => unreachable!(),
            };
            for &(ea, eb) in pairs {
                let pa = crossing(field, &mut points, &mut point_ids, ea);
                let pb = crossing(field, &mut points, &mut point_ids, eb);
                if pa != pb {
                    segments.push((pa, pb));
                }
            }
        }
    }

    chain_segments(&points, &segments)
}

/// Extracts contours for several levels; levels with no crossing yield an
/// empty polyline list.
pub fn extract_contours(field: &ScalarField, levels: &[f64]) -> Vec<(f64, Vec<Polyline>)> {
    levels
        .iter()
        .map(|&level| (level, extract_level(field, level)))
        .collect()
}

fn chain_segments(points: &[(f64, f64)], segments: &[(usize, usize)]) -> Vec<Polyline> {
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); points.len()];
    for (si, &(a, b)) in segments.iter().enumerate() {
        adjacency[a].push((si, b));
        adjacency[b].push((si, a));
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();

    let walk = |start: usize, used: &mut Vec<bool>| -> Option<Vec<(f64, f64)>> {
        let (first_seg, mut cur) = adjacency[start]
            .iter()
            .find(|&&(si, _)| !used[si])
            .copied()?;
        used[first_seg] = true;
        let mut chain = vec![points[start], points[cur]];
        while let Some((si, nxt)) = adjacency[cur].iter().find(|&&(si, _)| !used[si]).copied() {
            used[si] = true;
            cur = nxt;
            chain.push(points[cur]);
        }
        Some(chain)
    };

    // Open chains first (endpoints of odd degree), then leftover loops.
    for start in 0..points.len() {
        if adjacency[start].len() == 1 {
            if let Some(chain) = walk(start, &mut used) {
                polylines.push(Polyline { points: chain });
            }
        }
    }
    for start in 0..points.len() {
        while adjacency[start].iter().any(|&(si, _)| !used[si]) {
            if let Some(chain) = walk(start, &mut used) {
                polylines.push(Polyline { points: chain });
            }
        }
    }
    polylines
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(xs: Vec<f64>, ys: Vec<f64>, vals: Vec<f64>) -> ScalarField {
        let values = vals.into_iter().map(Some).collect();
        ScalarField::new(xs, ys, values)
    }

    #[test]
    fn constant_field_has_no_contours() {
        let f = field(
            vec![0.0, 1.0, 2.0],
            vec![0.0, 1.0],
            vec![3.0; 6],
        );
        for level in [0.0, 1.0, 2.9, 3.1, 10.0] {
            assert!(extract_level(&f, level).is_empty(), "level {level}");
        }
    }

    #[test]
    fn two_by_two_midheight_segment() {
        // Rows (0,0) then (1,1): level 0.5 crosses both vertical edges at
        // mid-height, giving one horizontal segment.
        let f = field(vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 0.0, 1.0, 1.0]);
        let lines = extract_level(&f, 0.5);
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].points, vec![(0.0, 0.5), (1.0, 0.5)]);
    }

    #[test]
    fn masked_squares_are_skipped() {
        let values = vec![
            Some(0.0),
            Some(0.0),
            None,
            Some(1.0),
            Some(1.0),
            Some(1.0),
        ];
        let f = ScalarField::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0], values);
        let lines = extract_level(&f, 0.5);
        // Only the left square contributes.
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].points, vec![(0.0, 0.5), (1.0, 0.5)]);
    }

    #[test]
    fn vertices_lie_on_the_level_under_bilinear_interpolation() {
        // Smooth-ish field with a diagonal trend.
        let xs: Vec<f64> = (0..7).map(|i| i as f64).collect();
        let ys: Vec<f64> = (0..5).map(|i| 10.0 + i as f64).collect();
        let mut vals = Vec::new();
        for y in &ys {
            for x in &xs {
                vals.push(0.3 * x + 0.7 * (y - 10.0) + 0.05 * x * (y - 10.0));
            }
        }
        let f = field(xs, ys, vals);
        for level in [0.7, 1.3, 2.9] {
            for line in extract_level(&f, level) {
                for &(x, y) in &line.points {
                    let v = f.bilinear(x, y).unwrap();
                    assert!((v - level).abs() < 1e-9, "({x},{y}) -> {v} vs {level}");
                }
            }
        }
    }

    #[test]
    fn closed_loop_is_chained() {
        // A single interior peak produces a closed loop around the centre.
        let xs: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let ys = xs.clone();
        let mut vals = Vec::new();
        for y in 0..5 {
            for x in 0..5 {
                let dx = x as f64 - 2.0;
                let dy = y as f64 - 2.0;
                vals.push(4.0 - dx * dx - dy * dy);
            }
        }
        let f = field(xs, ys, vals);
        let lines = extract_level(&f, 2.0);
        assert_eq!(lines.len(), 1);
        let pts = &lines[0].points;
        assert!(pts.len() > 4);
        assert_eq!(pts.first(), pts.last());
    }
}
