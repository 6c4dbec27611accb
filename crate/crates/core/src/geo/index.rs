use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::Scalar;

use super::{point_in_region, BBox, GeoError, GeoPoint, RegionBoundary};

pub const DEFAULT_CELL_DEG: f64 = 0.25;

const MAX_CELLS: usize = 1 << 24;

/// Uniform lon/lat grid mapping each cell to the regions whose bounding box
/// overlaps it. Candidate lists are ordered by `region_id`, so the first
/// containing candidate is the lexicographically smallest one.
#[derive(Debug, Clone)]
pub struct SpatialIndex<T = f64> {
    origin_lon: T,
    origin_lat: T,
    cell: T,
    cols: usize,
    rows: usize,
    cells: Vec<Vec<u32>>,
}

impl<T: Scalar> SpatialIndex<T> {
    pub fn build(regions: &[RegionBoundary<T>], cell_size: T) -> Result<Self, GeoError> {
        if !(cell_size > T::zero() && cell_size.is_finite()) {
            return Err(GeoError::BadCellSize(cell_size.as_f64()));
        }
        let Some(extent) = regions.iter().map(|r| r.bbox()).reduce(|a, b| a.union(&b)) else {
            return Ok(Self {
                origin_lon: T::zero(),
                origin_lat: T::zero(),
                cell: cell_size,
                cols: 0,
                rows: 0,
                cells: Vec::new(),
            });
        };
        let span = |lo: T, hi: T| ((hi - lo) / cell_size).floor().to_usize().unwrap_or(usize::MAX).saturating_add(1);
        let cols = span(extent.min_lon, extent.max_lon);
        let rows = span(extent.min_lat, extent.max_lat);
        let total = cols.saturating_mul(rows);
        if total > MAX_CELLS {
            return Err(GeoError::IndexTooLarge(total));
        }
        let mut index = Self {
            origin_lon: extent.min_lon,
            origin_lat: extent.min_lat,
            cell: cell_size,
            cols,
            rows,
            cells: vec![Vec::new(); total],
        };
        let mut order: Vec<usize> = (0..regions.len()).collect();
        order.sort_by(|&a, &b| regions[a].region_id.cmp(&regions[b].region_id).then(a.cmp(&b)));
        for i in order {
            let BBox { min_lon, min_lat, max_lon, max_lat } = regions[i].bbox();
            let (c0, r0) = (index.col(min_lon), index.row(min_lat));
            let (c1, r1) = (index.col(max_lon), index.row(max_lat));
            for r in r0..=r1 {
                for c in c0..=c1 {
                    index.cells[r * cols + c].push(i as u32);
                }
            }
        }
        Ok(index)
    }

    fn col(&self, lon: T) -> usize {
        ((lon - self.origin_lon) / self.cell).floor().to_usize().unwrap_or(0).min(self.cols - 1)
    }

    fn row(&self, lat: T) -> usize {
        ((lat - self.origin_lat) / self.cell).floor().to_usize().unwrap_or(0).min(self.rows - 1)
    }

    /// Region indices whose bounding box overlaps the cell containing `p`.
    pub fn candidates(&self, p: GeoPoint<T>) -> &[u32] {
        if self.cells.is_empty() {
            return &[];
        }
        let fx = (p.lon - self.origin_lon) / self.cell;
        let fy = (p.lat - self.origin_lat) / self.cell;
        if fx < T::zero() || fy < T::zero() {
            return &[];
        }
        let (c, r) = (fx.floor().to_usize().unwrap_or(usize::MAX), fy.floor().to_usize().unwrap_or(usize::MAX));
        if c >= self.cols || r >= self.rows {
            return &[];
        }
        &self.cells[r * self.cols + c]
    }

    pub fn cell_size(&self) -> T {
        self.cell
    }

    /// Position in `regions` of the region containing `p`, ties broken by
    /// smallest `region_id`.
    pub fn locate(&self, p: GeoPoint<T>, regions: &[RegionBoundary<T>]) -> Option<usize> {
        self.candidates(p)
            .iter()
            .map(|&i| i as usize)
            .find(|&i| point_in_region(p, &regions[i]))
    }
}

/// Assigns every point to the region containing it (or none).
///
/// `index` must have been built over `regions`. Points are processed in
/// parallel; the result does not depend on the partitioning.
pub fn spatial_join<K, T>(
    points: &[(K, GeoPoint<T>)],
    regions: &[RegionBoundary<T>],
    index: &SpatialIndex<T>,
) -> BTreeMap<K, Option<String>>
where
    K: Ord + Clone + Send + Sync,
    T: Scalar,
{
    let hits: Vec<Option<usize>> = points.par_iter().map(|(_, p)| index.locate(*p, regions)).collect();
    points
        .iter()
        .zip(hits)
        .map(|((k, _), hit)| (k.clone(), hit.map(|i| regions[i].region_id.clone())))
        .collect()
}

/// Index-free reference join: tests every region for every point.
pub fn spatial_join_brute<K, T>(points: &[(K, GeoPoint<T>)], regions: &[RegionBoundary<T>]) -> BTreeMap<K, Option<String>>
where
    K: Ord + Clone,
    T: Scalar,
{
    points
        .iter()
        .map(|(k, p)| {
            let hit = regions
                .iter()
                .filter(|r| point_in_region(*p, r))
                .map(|r| r.region_id.as_str())
                .min()
                .map(str::to_owned);
            (k.clone(), hit)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::RegionLevel;
    use proptest::prelude::*;

    fn rect(id: &str, min: [f64; 2], max: [f64; 2]) -> RegionBoundary {
        RegionBoundary::rectangle(id, RegionLevel::Zcta, min, max)
    }

    fn pt(lon: f64, lat: f64) -> GeoPoint {
        GeoPoint { lat, lon }
    }

    #[test]
    fn single_point_single_region() {
        let regions = vec![rect("r1", [0.0, 0.0], [1.0, 1.0])];
        let idx = SpatialIndex::build(&regions, 0.25).unwrap();
        let out = spatial_join(&[("a", pt(0.5, 0.5)), ("b", pt(3.0, 3.0))], &regions, &idx);
        assert_eq!(out["a"].as_deref(), Some("r1"));
        assert_eq!(out["b"], None);
    }

    #[test]
    fn overlap_prefers_smallest_id() {
        let regions = vec![rect("zz", [0.0, 0.0], [2.0, 2.0]), rect("aa", [1.0, 1.0], [3.0, 3.0])];
        let idx = SpatialIndex::build(&regions, 0.5).unwrap();
        let out = spatial_join(&[(0, pt(1.5, 1.5)), (1, pt(0.5, 0.5))], &regions, &idx);
        assert_eq!(out[&0].as_deref(), Some("aa"));
        assert_eq!(out[&1].as_deref(), Some("zz"));
    }

    #[test]
    fn max_edge_points_found() {
        let regions = vec![rect("r", [0.0, 0.0], [1.0, 1.0])];
        let idx = SpatialIndex::build(&regions, 0.3).unwrap();
        assert_eq!(idx.locate(pt(1.0, 1.0), &regions), Some(0));
        assert_eq!(idx.locate(pt(0.0, 0.0), &regions), Some(0));
    }

    #[test]
    fn bad_cell_sizes() {
        let regions = vec![rect("r", [0.0, 0.0], [1.0, 1.0])];
        assert!(matches!(SpatialIndex::build(&regions, 0.0), Err(GeoError::BadCellSize(_))));
        assert!(matches!(SpatialIndex::build(&regions, f64::NAN), Err(GeoError::BadCellSize(_))));
        let wide = vec![rect("w", [-170.0, -80.0], [170.0, 80.0])];
        assert!(matches!(SpatialIndex::build(&wide, 1e-3), Err(GeoError::IndexTooLarge(_))));
    }

    #[test]
    fn empty_regions() {
        let idx = SpatialIndex::<f64>::build(&[], 1.0).unwrap();
        assert!(idx.candidates(pt(0.0, 0.0)).is_empty());
    }

    proptest! {
        #[test]
        fn index_matches_brute_force(
            boxes in prop::collection::vec((0.0f64..9.0, 0.0f64..9.0, 0.05f64..2.0, 0.05f64..2.0), 1..12),
            points in prop::collection::vec((-1.0f64..12.0, -1.0f64..12.0), 1..60),
            cell in 0.05f64..3.0,
        ) {
            let regions: Vec<_> = boxes
                .iter()
                .enumerate()
                .map(|(i, &(x, y, w, h))| rect(&format!("r{:02}", (i * 7) % 13), [x, y], [x + w, y + h]))
                .collect();
            let pts: Vec<_> = points.iter().enumerate().map(|(i, &(x, y))| (i, pt(x, y))).collect();
            let idx = SpatialIndex::build(&regions, cell).unwrap();
            prop_assert_eq!(spatial_join(&pts, &regions, &idx), spatial_join_brute(&pts, &regions));
        }
    }
}
