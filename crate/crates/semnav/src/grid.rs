//! A small row-major 2D grid.
//!
//! Cell `(x, y)` covers the world rectangle `[x, x+1) x [y, y+1)` in cell
//! units; callers scale by the plan's cell size. The y axis points "north":
//! headings use the usual right-handed convention (theta 0 along +x,
//! positive rotation toward +y).

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid2<T> {
    width: usize,
    height: usize,
    cells: Vec<T>,
}

impl<T: Clone> Grid2<T> {
    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Grid2 {
            width,
            height,
            cells: vec![value; width * height],
        }
    }
}

impl<T> Grid2<T> {
    pub fn from_vec(width: usize, height: usize, cells: Vec<T>) -> Self {
        assert_eq!(cells.len(), width * height);
        Grid2 {
            width,
            height,
            cells,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn in_bounds(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    pub fn get(&self, x: usize, y: usize) -> &T {
        debug_assert!(x < self.width && y < self.height);
        &self.cells[y * self.width + x]
    }

    pub fn get_mut(&mut self, x: usize, y: usize) -> &mut T {
        debug_assert!(x < self.width && y < self.height);
        &mut self.cells[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: T) {
        *self.get_mut(x, y) = value;
    }

    /// Iterate `(x, y, &cell)` in row-major order.
    pub fn iter_cells(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        let w = self.width;
        self.cells
            .iter()
            .enumerate()
            .map(move |(i, c)| (i % w, i / w, c))
    }

    pub fn cells(&self) -> &[T] {
        &self.cells
    }
}

/// 4-connected neighbor offsets.
pub const CARDINALS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_is_row_major() {
        let mut g = Grid2::filled(3, 2, 0u8);
        g.set(2, 1, 9);
        assert_eq!(g.cells()[5], 9);
        assert_eq!(*g.get(2, 1), 9);
        assert!(g.in_bounds(2, 1));
        assert!(!g.in_bounds(3, 0));
        assert!(!g.in_bounds(-1, 0));
    }
}
