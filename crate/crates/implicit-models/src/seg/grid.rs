//! The 8-connected pixel graph and its edge-type partition.

/// Orientation class of a grid edge. Pairwise parameters are tied per type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeType {
    Horizontal,
    Vertical,
    /// Diagonal running down-right.
    DiagDown,
    /// Diagonal running up-right.
    DiagUp,
}

pub const EDGE_TYPES: usize = 4;

impl EdgeType {
    pub fn index(self) -> usize {
        match self {
            EdgeType::Horizontal => 0,
            EdgeType::Vertical => 1,
            EdgeType::DiagDown => 2,
            EdgeType::DiagUp => 3,
        }
    }

    pub fn from_index(i: usize) -> Self {
        match i {
            0 => EdgeType::Horizontal,
            1 => EdgeType::Vertical,
            2 => EdgeType::DiagDown,
            3 => EdgeType::DiagUp,
            _ => panic!("edge type index {i} out of range"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Edge {
    pub i: u32,
    pub j: u32,
    pub ty: EdgeType,
}

/// Pixel lattice with 8-neighborhood edges, each edge listed once.
#[derive(Debug, Clone)]
pub struct GridGraph {
    width: usize,
    height: usize,
    edges: Vec<Edge>,
    // Incident edges per pixel: (neighbor, type).
    neighbors: Vec<Vec<(u32, EdgeType)>>,
}

impl GridGraph {
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0);
        let idx = |r: usize, c: usize| (r * width + c) as u32;
        let mut edges = Vec::new();
        for r in 0..height {
            for c in 0..width {
                if c + 1 < width {
                    edges.push(Edge {
                        i: idx(r, c),
                        j: idx(r, c + 1),
                        ty: EdgeType::Horizontal,
                    });
                }
                if r + 1 < height {
                    edges.push(Edge {
                        i: idx(r, c),
                        j: idx(r + 1, c),
                        ty: EdgeType::Vertical,
                    });
                }
                if r + 1 < height && c + 1 < width {
                    edges.push(Edge {
                        i: idx(r, c),
                        j: idx(r + 1, c + 1),
                        ty: EdgeType::DiagDown,
                    });
                }
                if r + 1 < height && c > 0 {
                    edges.push(Edge {
                        i: idx(r, c),
                        j: idx(r + 1, c - 1),
                        ty: EdgeType::DiagUp,
                    });
                }
            }
        }
        let mut neighbors = vec![Vec::new(); width * height];
        for e in &edges {
            neighbors[e.i as usize].push((e.j, e.ty));
            neighbors[e.j as usize].push((e.i, e.ty));
        }
        Self {
            width,
            height,
            edges,
            neighbors,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn num_pixels(&self) -> usize {
        self.width * self.height
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, pixel: usize) -> &[(u32, EdgeType)] {
        &self.neighbors[pixel]
    }
}
