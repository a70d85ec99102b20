//! Bounding-volume hierarchy over the segments of a boundary polyline.
//!
//! Nodes cover contiguous index ranges of the curve, so the tree doubles as a
//! segment tree in curve order; queries are nearest-distance only.

use super::Point2;

#[derive(Debug, Clone, Copy)]
pub struct Aabb {
    pub lo: Point2,
    pub hi: Point2,
}

impl Aabb {
    fn empty() -> Self {
        Aabb {
            lo: Point2::new(f64::INFINITY, f64::INFINITY),
            hi: Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn grow(&mut self, p: Point2) {
        self.lo.x = self.lo.x.min(p.x);
        self.lo.y = self.lo.y.min(p.y);
        self.hi.x = self.hi.x.max(p.x);
        self.hi.y = self.hi.y.max(p.y);
    }

    fn merge(a: Aabb, b: Aabb) -> Aabb {
        Aabb {
            lo: Point2::new(a.lo.x.min(b.lo.x), a.lo.y.min(b.lo.y)),
            hi: Point2::new(a.hi.x.max(b.hi.x), a.hi.y.max(b.hi.y)),
        }
    }

    fn dist(&self, p: Point2) -> f64 {
        let dx = (self.lo.x - p.x).max(0.0).max(p.x - self.hi.x);
        let dy = (self.lo.y - p.y).max(0.0).max(p.y - self.hi.y);
        (dx * dx + dy * dy).sqrt()
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { first: u32, count: u32, bbox: Aabb },
    Inner { left: u32, right: u32, bbox: Aabb },
}

impl Node {
    fn bbox(&self) -> Aabb {
        match self {
            Node::Leaf { bbox, .. } | Node::Inner { bbox, .. } => *bbox,
        }
    }
}

/// Distance index over a fixed list of segments.
#[derive(Debug, Clone)]
pub struct SegmentBvh {
    segs: Vec<(Point2, Point2)>,
    nodes: Vec<Node>,
    root: u32,
}

const LEAF_SIZE: u32 = 8;

pub fn seg_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    let q = Point2::new(a.x + t * ab.x, a.y + t * ab.y);
    (p - q).norm()
}

impl SegmentBvh {
    pub fn build(segs: Vec<(Point2, Point2)>) -> Self {
        assert!(!segs.is_empty(), "bvh needs at least one segment");
        let mut bvh = SegmentBvh { segs, nodes: Vec::new(), root: 0 };
        bvh.root = bvh.build_range(0, bvh.segs.len() as u32);
        bvh
    }

    fn build_range(&mut self, first: u32, count: u32) -> u32 {
        if count <= LEAF_SIZE {
            let mut bbox = Aabb::empty();
            for i in first..first + count {
                let (a, b) = self.segs[i as usize];
                bbox.grow(a);
                bbox.grow(b);
            }
            self.nodes.push(Node::Leaf { first, count, bbox });
        } else {
            let half = count / 2;
            let left = self.build_range(first, half);
            let right = self.build_range(first + half, count - half);
            let bbox = Aabb::merge(self.nodes[left as usize].bbox(), self.nodes[right as usize].bbox());
            self.nodes.push(Node::Inner { left, right, bbox });
        }
        (self.nodes.len() - 1) as u32
    }

    /// Distance from `p` to the nearest segment.
    pub fn distance(&self, p: Point2) -> f64 {
        let mut best = f64::INFINITY;
        let mut stack: Vec<u32> = vec![self.root];
        while let Some(id) = stack.pop() {
            match &self.nodes[id as usize] {
                Node::Leaf { first, count, bbox } => {
                    if bbox.dist(p) >= best {
                        continue;
                    }
                    for i in *first..*first + *count {
                        let (a, b) = self.segs[i as usize];
                        let d = seg_distance(p, a, b);
                        if d < best {
                            best = d;
                        }
                    }
                }
                Node::Inner { left, right, bbox } => {
                    if bbox.dist(p) >= best {
                        continue;
                    }
                    let dl = self.nodes[*left as usize].bbox().dist(p);
                    let dr = self.nodes[*right as usize].bbox().dist(p);
                    // Visit the closer child first for tighter pruning.
                    if dl <= dr {
                        stack.push(*right);
                        stack.push(*left);
                    } else {
                        stack.push(*left);
                        stack.push(*right);
                    }
                }
            }
        }
        best
    }

    pub fn segment_count(&self) -> usize {
        self.segs.len()
    }
}
