//! Scene floor plans: the sampled scene box populated with category-tagged
//! object boxes. Large boxes rest on the floor and never overlap each other
//! in XY; small boxes sit on the ground or atop a large box; on-roof and
//! on-wall boxes keep ceiling/wall contact; wireframes, sticks and
//! axis-aligned slabs fill the remaining space.

use crate::config::GenConfig;
use crate::math::{Aabb, Vec3};
use crate::rng::RandomStream;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WallId {
    NegX,
    PosX,
    NegY,
    PosY,
}

pub const WALLS: [WallId; 4] = [WallId::NegX, WallId::PosX, WallId::NegY, WallId::PosY];

impl WallId {
    /// Normal pointing out of the room.
    pub fn outward_normal(self) -> Vec3 {
        match self {
            WallId::NegX => Vec3::new(-1.0, 0.0, 0.0),
            WallId::PosX => Vec3::new(1.0, 0.0, 0.0),
            WallId::NegY => Vec3::new(0.0, -1.0, 0.0),
            WallId::PosY => Vec3::new(0.0, 1.0, 0.0),
        }
    }

    /// 0 for x-walls, 1 for y-walls.
    pub fn normal_axis(self) -> usize {
        match self {
            WallId::NegX | WallId::PosX => 0,
            WallId::NegY | WallId::PosY => 1,
        }
    }

    /// The horizontal axis running along the wall face.
    pub fn along_axis(self) -> usize {
        1 - self.normal_axis()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneBox {
    pub half_extent_x: f64,
    pub half_extent_y: f64,
    pub height: f64,
    pub wall_thickness: f64,
}

impl SceneBox {
    pub fn size_x(&self) -> f64 {
        2.0 * self.half_extent_x
    }

    pub fn size_y(&self) -> f64 {
        2.0 * self.half_extent_y
    }

    /// The inhabited volume: floor at z = 0, ceiling at z = height.
    pub fn interior(&self) -> Aabb {
        Aabb::new(
            Vec3::new(-self.half_extent_x, -self.half_extent_y, 0.0),
            Vec3::new(self.half_extent_x, self.half_extent_y, self.height),
        )
    }

    pub fn center(&self) -> Vec3 {
        Vec3::new(0.0, 0.0, self.height * 0.5)
    }

    /// Interior-face plane coordinate of a wall along its normal axis.
    pub fn wall_plane(&self, wall: WallId) -> f64 {
        match wall {
            WallId::NegX => -self.half_extent_x,
            WallId::PosX => self.half_extent_x,
            WallId::NegY => -self.half_extent_y,
            WallId::PosY => self.half_extent_y,
        }
    }

    pub fn half_extent(&self, axis: usize) -> f64 {
        match axis {
            0 => self.half_extent_x,
            1 => self.half_extent_y,
            _ => self.height * 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoxCategory {
    LargeObject,
    SmallOnGround,
    SmallAtopLarge,
    OnRoofThin,
    OnRoofThick,
    OnWallThin,
    OnWallThick,
    Wireframe,
    ThinStickOnWall,
    ThinStickInSpace,
    AxisAligned,
}

impl BoxCategory {
    pub fn is_stick(self) -> bool {
        matches!(self, BoxCategory::ThinStickOnWall | BoxCategory::ThinStickInSpace)
    }

    /// Slots eligible to be turned into emissive lights.
    pub fn is_luminous_candidate(self) -> bool {
        self.is_stick() || self == BoxCategory::AxisAligned
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectBox {
    pub category: BoxCategory,
    pub min_corner: Vec3,
    pub max_corner: Vec3,
    /// Index of the supporting LargeObject for SmallAtopLarge.
    pub parent: Option<u32>,
    /// Wall this box is flush against, for on-wall placements.
    pub wall: Option<WallId>,
}

impl ObjectBox {
    pub fn aabb(&self) -> Aabb {
        Aabb::new(self.min_corner, self.max_corner)
    }

    pub fn size(&self) -> Vec3 {
        self.max_corner - self.min_corner
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorPlan {
    pub scene_box: SceneBox,
    pub boxes: Vec<ObjectBox>,
}

pub fn sample_scene_box(stream: &mut RandomStream, cfg: &GenConfig) -> SceneBox {
    // XY sizes drawn independently; this is what randomizes the aspect
    // ratio.
    let size_x = stream.uniform(cfg.scene.size_range);
    let size_y = stream.uniform(cfg.scene.size_range);
    let height = stream.uniform(cfg.scene.height_range);
    SceneBox {
        half_extent_x: size_x * 0.5,
        half_extent_y: size_y * 0.5,
        height,
        wall_thickness: cfg.scene.wall_thickness,
    }
}

const LARGE_ATTEMPTS: u32 = 100;
const FREE_ATTEMPTS: u32 = 20;

fn overlaps_any(candidate: &Aabb, existing: &[ObjectBox]) -> bool {
    existing.iter().any(|b| candidate.overlaps(&b.aabb()))
}

/// Uniform position for a box of `size` fully inside the interior, with the
/// supplied z. Returns None when the box cannot fit.
fn sample_xy(stream: &mut RandomStream, scene: &SceneBox, size: Vec3) -> Option<(f64, f64)> {
    let fx = scene.half_extent_x - size.x * 0.5;
    let fy = scene.half_extent_y - size.y * 0.5;
    if fx < 0.0 || fy < 0.0 {
        return None;
    }
    Some((stream.uniform_in(-fx, fx), stream.uniform_in(-fy, fy)))
}

fn boxed(category: BoxCategory, center_x: f64, center_y: f64, min_z: f64, size: Vec3) -> ObjectBox {
    ObjectBox {
        category,
        min_corner: Vec3::new(center_x - size.x * 0.5, center_y - size.y * 0.5, min_z),
        max_corner: Vec3::new(center_x + size.x * 0.5, center_y + size.y * 0.5, min_z + size.z),
        parent: None,
        wall: None,
    }
}

/// Place one box of the given category. `size` is world-aligned except for
/// on-wall categories, where it reads `(along-wall, depth, vertical)`.
/// Placement retries a category-specific budget; large boxes reject XY
/// overlap with other large boxes, everything else accepts overlap once the
/// budget runs out. Returns None only when no legal pose exists at all.
pub fn place_box(
    stream: &mut RandomStream,
    category: BoxCategory,
    size: Vec3,
    scene: &SceneBox,
    existing: &[ObjectBox],
) -> Option<ObjectBox> {
    match category {
        BoxCategory::LargeObject => {
            for _ in 0..LARGE_ATTEMPTS {
                let (cx, cy) = sample_xy(stream, scene, size)?;
                let candidate = boxed(category, cx, cy, 0.0, size);
                let clash = existing.iter().any(|b| {
                    b.category == BoxCategory::LargeObject
                        && candidate.aabb().overlaps_xy(&b.aabb())
                });
                if !clash {
                    return Some(candidate);
                }
            }
            None
        }
        BoxCategory::SmallOnGround => {
            place_free(stream, category, size, scene, existing, Some(0.0))
        }
        BoxCategory::SmallAtopLarge => {
            let parents: Vec<(u32, &ObjectBox)> = existing
                .iter()
                .enumerate()
                .filter(|(_, b)| {
                    b.category == BoxCategory::LargeObject
                        && b.size().x >= size.x
                        && b.size().y >= size.y
                        && b.max_corner.z + size.z <= scene.height
                })
                .map(|(i, b)| (i as u32, b))
                .collect();
            if parents.is_empty() {
                return None;
            }
            let (parent_idx, parent) = parents[stream.uniform_index(parents.len())];
            let fx = (parent.size().x - size.x) * 0.5;
            let fy = (parent.size().y - size.y) * 0.5;
            let pc = parent.aabb().center();
            let cx = pc.x + stream.uniform_in(-fx, fx);
            let cy = pc.y + stream.uniform_in(-fy, fy);
            let mut b = boxed(category, cx, cy, parent.max_corner.z, size);
            b.parent = Some(parent_idx);
            Some(b)
        }
        BoxCategory::OnRoofThin | BoxCategory::OnRoofThick => {
            place_free(stream, category, size, scene, existing, Some(scene.height - size.z))
        }
        BoxCategory::OnWallThin | BoxCategory::OnWallThick | BoxCategory::ThinStickOnWall => {
            place_on_wall(stream, category, size, scene, existing)
        }
        BoxCategory::Wireframe | BoxCategory::ThinStickInSpace | BoxCategory::AxisAligned => {
            place_free(stream, category, size, scene, existing, None)
        }
    }
}

/// Free (or fixed-z) placement with a small non-overlap budget; overlap is
/// permitted once the budget is spent.
fn place_free(
    stream: &mut RandomStream,
    category: BoxCategory,
    size: Vec3,
    scene: &SceneBox,
    existing: &[ObjectBox],
    fixed_min_z: Option<f64>,
) -> Option<ObjectBox> {
    let mut last = None;
    for _ in 0..FREE_ATTEMPTS {
        let (cx, cy) = sample_xy(stream, scene, size)?;
        let min_z = match fixed_min_z {
            Some(z) => z,
            None => {
                let span = scene.height - size.z;
                if span < 0.0 {
                    return None;
                }
                stream.uniform_in(0.0, span)
            }
        };
        let candidate = boxed(category, cx, cy, min_z, size);
        if !overlaps_any(&candidate.aabb(), existing) {
            return Some(candidate);
        }
        last = Some(candidate);
    }
    last
}

/// Wall-flush placement. `size` is wall-local: (along, depth, vertical).
fn place_on_wall(
    stream: &mut RandomStream,
    category: BoxCategory,
    size: Vec3,
    scene: &SceneBox,
    existing: &[ObjectBox],
) -> Option<ObjectBox> {
    let mut last = None;
    for _ in 0..FREE_ATTEMPTS {
        let wall = WALLS[stream.uniform_index(4)];
        let along_axis = wall.along_axis();
        let along_half = scene.half_extent(along_axis);
        let along = size.x.min(2.0 * along_half);
        let depth = size.y;
        let vertical = size.z.min(scene.height);

        let world_size = if wall.normal_axis() == 0 {
            Vec3::new(depth, along, vertical)
        } else {
            Vec3::new(along, depth, vertical)
        };
        let fa = along_half - along * 0.5;
        let along_center = stream.uniform_in(-fa, fa);
        let min_z = stream.uniform_in(0.0, (scene.height - vertical).max(0.0));
        let plane = scene.wall_plane(wall);
        // Flush: one face exactly on the interior wall plane.
        let normal_min = match wall {
            WallId::NegX | WallId::NegY => plane,
            WallId::PosX | WallId::PosY => plane - depth,
        };
        let (min_x, min_y) = if wall.normal_axis() == 0 {
            (normal_min, along_center - along * 0.5)
        } else {
            (along_center - along * 0.5, normal_min)
        };
        let candidate = ObjectBox {
            category,
            min_corner: Vec3::new(min_x, min_y, min_z),
            max_corner: Vec3::new(min_x + world_size.x, min_y + world_size.y, min_z + vertical),
            parent: None,
            wall: Some(wall),
        };
        if !overlaps_any(&candidate.aabb(), existing) {
            return Some(candidate);
        }
        last = Some(candidate);
    }
    last
}

/// Sample the full set of object boxes for a scene.
pub fn sample_object_boxes(
    stream: &mut RandomStream,
    scene: &SceneBox,
    cfg: &GenConfig,
) -> Vec<ObjectBox> {
    let b = &cfg.boxes;
    let mut boxes: Vec<ObjectBox> = Vec::new();
    let push = |bx: Option<ObjectBox>, boxes: &mut Vec<ObjectBox>| {
        if let Some(bx) = bx {
            boxes.push(bx);
        }
    };

    // Large objects first; everything else may lean on them.
    let n_large = stream.uniform_count(b.large.count);
    for _ in 0..n_large {
        let size = Vec3::new(
            stream.uniform(b.large.size_range),
            stream.uniform(b.large.size_range),
            stream.uniform(b.large.size_range),
        );
        let placed = place_box(stream, BoxCategory::LargeObject, size, scene, &boxes);
        push(placed, &mut boxes);
    }

    let n_small = stream.uniform_count(b.small.count);
    for _ in 0..n_small {
        let footprint = Vec3::new(
            stream.uniform(b.small.size_range),
            stream.uniform(b.small.size_range),
            0.0,
        );
        let atop = stream.bernoulli(1.0 - b.small.on_ground_prob);
        let placed = if atop {
            let size = Vec3::new(footprint.x, footprint.y, stream.uniform(b.small.atop_height));
            place_box(stream, BoxCategory::SmallAtopLarge, size, scene, &boxes)
        } else {
            None
        };
        // No fitting parent: fall back to the ground subtype.
        let placed = placed.or_else(|| {
            let size = Vec3::new(
                footprint.x,
                footprint.y,
                stream.uniform(b.small.on_ground_height),
            );
            place_box(stream, BoxCategory::SmallOnGround, size, scene, &boxes)
        });
        push(placed, &mut boxes);
    }

    let n_roof = stream.uniform_count(b.on_roof.count);
    for _ in 0..n_roof {
        let thin = stream.bernoulli(b.on_roof.thin_prob);
        let (cat, h) = if thin {
            (BoxCategory::OnRoofThin, stream.uniform(b.on_roof.thin_height))
        } else {
            (BoxCategory::OnRoofThick, stream.uniform(b.on_roof.thick_height))
        };
        let size = Vec3::new(
            stream.uniform(b.on_roof.size_range),
            stream.uniform(b.on_roof.size_range),
            h,
        );
        push(place_box(stream, cat, size, scene, &boxes), &mut boxes);
    }

    let n_wall = stream.uniform_count(b.on_wall.count);
    for _ in 0..n_wall {
        let thin = stream.bernoulli(b.on_wall.thin_prob);
        let (cat, depth) = if thin {
            (BoxCategory::OnWallThin, stream.uniform(b.on_wall.thin_depth))
        } else {
            (BoxCategory::OnWallThick, stream.uniform(b.on_wall.thick_depth))
        };
        let size = Vec3::new(
            stream.uniform(b.on_wall.size_range),
            depth,
            stream.uniform(b.on_wall.size_range),
        );
        push(place_box(stream, cat, size, scene, &boxes), &mut boxes);
    }

    if stream.bernoulli(b.wireframe.presence_prob) {
        let n = stream.uniform_count(b.wireframe.count);
        for _ in 0..n {
            let size = Vec3::new(
                stream.uniform(b.wireframe.size_range),
                stream.uniform(b.wireframe.size_range),
                stream.uniform(b.wireframe.height_range),
            );
            push(
                place_box(stream, BoxCategory::Wireframe, size, scene, &boxes),
                &mut boxes,
            );
        }
    }

    let n_wall_sticks = stream.uniform_count(b.sticks.on_wall_count);
    for _ in 0..n_wall_sticks {
        let cross = stream.uniform(b.sticks.on_wall_size);
        let length = stream.uniform(b.sticks.length_range);
        let horizontal = stream.bernoulli(0.5);
        // Wall-local (along, depth, vertical); place_box clamps to the span.
        let size = if horizontal {
            Vec3::new(length, cross, cross)
        } else {
            Vec3::new(cross, cross, length)
        };
        push(
            place_box(stream, BoxCategory::ThinStickOnWall, size, scene, &boxes),
            &mut boxes,
        );
    }

    if stream.bernoulli(b.sticks.in_space_prob) {
        let n = stream.uniform_count(b.sticks.in_space_count);
        for _ in 0..n {
            let cross = stream.uniform(b.sticks.in_space_size);
            let axis = stream.uniform_index(3);
            let span = 2.0 * scene.half_extent(axis);
            let length = stream.uniform(b.sticks.length_range.clamped_hi(span));
            let mut size = Vec3::splat(cross);
            size.set(axis, length);
            push(
                place_box(stream, BoxCategory::ThinStickInSpace, size, scene, &boxes),
                &mut boxes,
            );
        }
    }

    if stream.bernoulli(b.axis_aligned.presence_prob) {
        let n = stream.uniform_count(b.axis_aligned.count);
        for _ in 0..n {
            let size = Vec3::new(
                stream.uniform(b.axis_aligned.size_range),
                stream.uniform(b.axis_aligned.size_range),
                stream.uniform(b.axis_aligned.height_range),
            );
            push(
                place_box(stream, BoxCategory::AxisAligned, size, scene, &boxes),
                &mut boxes,
            );
        }
    }

    boxes
}

pub fn sample_floor_plan(stream: &mut RandomStream, cfg: &GenConfig) -> FloorPlan {
    let scene_box = sample_scene_box(stream, cfg);
    let boxes = sample_object_boxes(stream, &scene_box, cfg);
    FloorPlan { scene_box, boxes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_stream, Seed};

    fn plan(seed: u64) -> FloorPlan {
        let cfg = GenConfig::default();
        let mut stream = derive_stream(Seed::new(seed, 0), "floorplan");
        sample_floor_plan(&mut stream, &cfg)
    }

    #[test]
    fn scene_box_within_ranges() {
        let cfg = GenConfig::default();
        let mut stream = derive_stream(Seed::new(2, 0), "floorplan");
        let mut min_sx = f64::INFINITY;
        let mut max_sx = f64::NEG_INFINITY;
        for _ in 0..1000 {
            let sb = sample_scene_box(&mut stream, &cfg);
            assert!((17.0..=30.0).contains(&sb.size_x()));
            assert!((17.0..=30.0).contains(&sb.size_y()));
            assert!((10.0..=15.0).contains(&sb.height));
            min_sx = min_sx.min(sb.size_x());
            max_sx = max_sx.max(sb.size_x());
        }
        assert!(max_sx - min_sx > 10.0, "spread {}", max_sx - min_sx);
    }

    #[test]
    fn degenerate_ranges_give_exact_box() {
        let mut cfg = GenConfig::default();
        cfg.scene.size_range = crate::config::Range { lo: 20.0, hi: 20.0 };
        cfg.scene.height_range = crate::config::Range { lo: 12.0, hi: 12.0 };
        let mut stream = derive_stream(Seed::new(2, 1), "floorplan");
        let sb = sample_scene_box(&mut stream, &cfg);
        assert_eq!(sb.size_x(), 20.0);
        assert_eq!(sb.size_y(), 20.0);
        assert_eq!(sb.height, 12.0);
    }

    #[test]
    fn all_boxes_contained_in_interior() {
        for seed in 0..100 {
            let p = plan(seed);
            let interior = p.scene_box.interior();
            for b in &p.boxes {
                assert!(
                    interior.contains_box(&b.aabb(), 1e-9),
                    "{:?} escapes interior",
                    b.category
                );
                assert!(b.min_corner.x < b.max_corner.x);
                assert!(b.min_corner.y < b.max_corner.y);
                assert!(b.min_corner.z < b.max_corner.z);
            }
        }
    }

    #[test]
    fn large_boxes_never_overlap_in_xy() {
        for seed in 0..100 {
            let p = plan(seed);
            let larges: Vec<&ObjectBox> = p
                .boxes
                .iter()
                .filter(|b| b.category == BoxCategory::LargeObject)
                .collect();
            for i in 0..larges.len() {
                for j in i + 1..larges.len() {
                    assert!(
                        !larges[i].aabb().overlaps_xy(&larges[j].aabb()),
                        "seed {seed}: large boxes {i} and {j} overlap"
                    );
                }
            }
        }
    }

    #[test]
    fn contact_constraints_hold_exactly() {
        for seed in 0..200 {
            let p = plan(seed);
            let h = p.scene_box.height;
            for b in &p.boxes {
                match b.category {
                    BoxCategory::LargeObject | BoxCategory::SmallOnGround => {
                        assert!(b.min_corner.z.abs() < 1e-9)
                    }
                    BoxCategory::SmallAtopLarge => {
                        let parent = &p.boxes[b.parent.unwrap() as usize];
                        assert!((b.min_corner.z - parent.max_corner.z).abs() < 1e-9);
                        // Footprint inside the parent's top face.
                        assert!(b.min_corner.x >= parent.min_corner.x - 1e-9);
                        assert!(b.max_corner.x <= parent.max_corner.x + 1e-9);
                        assert!(b.min_corner.y >= parent.min_corner.y - 1e-9);
                        assert!(b.max_corner.y <= parent.max_corner.y + 1e-9);
                    }
                    BoxCategory::OnRoofThin | BoxCategory::OnRoofThick => {
                        assert!((b.max_corner.z - h).abs() < 1e-9)
                    }
                    BoxCategory::OnWallThin
                    | BoxCategory::OnWallThick
                    | BoxCategory::ThinStickOnWall => {
                        let wall = b.wall.unwrap();
                        let plane = p.scene_box.wall_plane(wall);
                        let coord = match wall {
                            WallId::NegX => b.min_corner.x,
                            WallId::PosX => b.max_corner.x,
                            WallId::NegY => b.min_corner.y,
                            WallId::PosY => b.max_corner.y,
                        };
                        assert!((coord - plane).abs() < 1e-9, "flush violated");
                    }
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn counts_and_sizes_in_table_ranges() {
        let cfg = GenConfig::default();
        for seed in 0..300 {
            let p = plan(seed);
            let count = |cat: BoxCategory| p.boxes.iter().filter(|b| b.category == cat).count() as u32;
            let larges = count(BoxCategory::LargeObject);
            assert!(cfg.boxes.large.count.contains(larges), "large count {larges}");
            let smalls = count(BoxCategory::SmallOnGround) + count(BoxCategory::SmallAtopLarge);
            assert!(cfg.boxes.small.count.contains(smalls));
            let roof = count(BoxCategory::OnRoofThin) + count(BoxCategory::OnRoofThick);
            assert!(cfg.boxes.on_roof.count.contains(roof));
            let wall = count(BoxCategory::OnWallThin) + count(BoxCategory::OnWallThick);
            assert!(cfg.boxes.on_wall.count.contains(wall));
            for b in &p.boxes {
                let s = b.size();
                match b.category {
                    BoxCategory::LargeObject => {
                        for c in [s.x, s.y, s.z] {
                            assert!(cfg.boxes.large.size_range.contains(c));
                        }
                    }
                    BoxCategory::SmallOnGround => {
                        assert!(cfg.boxes.small.size_range.contains(s.x));
                        assert!(cfg.boxes.small.size_range.contains(s.y));
                        assert!(cfg.boxes.small.on_ground_height.contains(s.z));
                    }
                    BoxCategory::SmallAtopLarge => {
                        assert!(cfg.boxes.small.atop_height.contains(s.z));
                    }
                    BoxCategory::OnRoofThin => {
                        assert!(cfg.boxes.on_roof.thin_height.contains(s.z))
                    }
                    BoxCategory::OnRoofThick => {
                        assert!(cfg.boxes.on_roof.thick_height.contains(s.z))
                    }
                    BoxCategory::ThinStickOnWall | BoxCategory::ThinStickInSpace => {
                        let len = s.x.max(s.y).max(s.z);
                        let cross_range = if b.category == BoxCategory::ThinStickOnWall {
                            cfg.boxes.sticks.on_wall_size
                        } else {
                            cfg.boxes.sticks.in_space_size
                        };
                        assert!(cfg.boxes.sticks.length_range.contains(len), "length {len}");
                        for c in [s.x, s.y, s.z] {
                            if c != len {
                                assert!(cross_range.contains(c), "cross {c}");
                            }
                        }
                    }
                    BoxCategory::AxisAligned => {
                        assert!(cfg.boxes.axis_aligned.size_range.contains(s.x));
                        assert!(cfg.boxes.axis_aligned.size_range.contains(s.y));
                        assert!(cfg.boxes.axis_aligned.height_range.contains(s.z));
                    }
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn zero_counts_give_empty_plan() {
        let mut cfg = GenConfig::default();
        cfg.boxes.large.count = crate::config::CountRange::new(0, 0);
        cfg.boxes.small.count = crate::config::CountRange::new(0, 0);
        cfg.boxes.on_roof.count = crate::config::CountRange::new(0, 0);
        cfg.boxes.on_wall.count = crate::config::CountRange::new(0, 0);
        cfg.boxes.wireframe.presence_prob = 0.0;
        cfg.boxes.sticks.on_wall_count = crate::config::CountRange::new(0, 0);
        cfg.boxes.sticks.in_space_prob = 0.0;
        cfg.boxes.axis_aligned.presence_prob = 0.0;
        let mut stream = derive_stream(Seed::new(4, 0), "floorplan");
        let p = sample_floor_plan(&mut stream, &cfg);
        assert!(p.boxes.is_empty());
    }

    #[test]
    fn presence_probabilities_match_tables() {
        let n = 1000;
        let mut wf = 0;
        let mut sticks_space = 0;
        let mut aa = 0;
        let mut small_ground = 0usize;
        let mut small_total = 0usize;
        for seed in 0..n {
            let p = plan(seed as u64 + 10_000);
            let has = |cat: BoxCategory| p.boxes.iter().any(|b| b.category == cat);
            if has(BoxCategory::Wireframe) {
                wf += 1;
            }
            if has(BoxCategory::ThinStickInSpace) {
                sticks_space += 1;
            }
            if has(BoxCategory::AxisAligned) {
                aa += 1;
            }
            if p.boxes.iter().any(|b| b.category == BoxCategory::LargeObject) {
                small_ground += p
                    .boxes
                    .iter()
                    .filter(|b| b.category == BoxCategory::SmallOnGround)
                    .count();
                small_total += p
                    .boxes
                    .iter()
                    .filter(|b| {
                        b.category == BoxCategory::SmallOnGround
                            || b.category == BoxCategory::SmallAtopLarge
                    })
                    .count();
            }
        }
        let frac = |c: usize| c as f64 / n as f64;
        assert!((frac(wf) - 0.8).abs() < 0.05, "wireframe presence {}", frac(wf));
        assert!(
            (frac(sticks_space) - 0.5).abs() < 0.05,
            "in-space stick presence {}",
            frac(sticks_space)
        );
        assert!((frac(aa) - 0.7).abs() < 0.05, "axis-aligned presence {}", frac(aa));
        let ground_frac = small_ground as f64 / small_total as f64;
        assert!(
            (ground_frac - 0.5).abs() < 0.05,
            "ground/atop split {ground_frac}"
        );
    }
}
