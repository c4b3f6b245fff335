use super::WorldError;
use crate::geometry::Cell;

/// Default gray level below which a PGM pixel is treated as occupied.
pub const DEFAULT_OCCUPIED_THRESHOLD: u8 = 128;

/// Discretized static world: row-major occupancy flags plus the cell edge length.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OccupancyGrid {
    width: u32,
    height: u32,
    cell_width_mm: i64,
    cells: Vec<bool>,
}

impl OccupancyGrid {
    pub fn new(width: u32, height: u32, cell_width_mm: i64, cells: Vec<bool>) -> Result<Self, WorldError> {
        if width == 0 || height == 0 {
            return Err(WorldError::InvalidGrid("grid dimensions must be positive".into()));
        }
        if cell_width_mm <= 0 {
            return Err(WorldError::InvalidGrid("cell width must be positive".into()));
        }
        if cells.len() != width as usize * height as usize {
            return Err(WorldError::InvalidGrid(format!("{} cells for a {width}x{height} grid", cells.len())));
        }
        Ok(OccupancyGrid { width, height, cell_width_mm, cells })
    }

    /// All-free grid.
    pub fn empty(width: u32, height: u32, cell_width_mm: i64) -> Result<Self, WorldError> {
        Self::new(width, height, cell_width_mm, vec![false; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn cell_width_mm(&self) -> i64 {
        self.cell_width_mm
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn width_mm(&self) -> i64 {
        self.width as i64 * self.cell_width_mm
    }

    pub fn height_mm(&self) -> i64 {
        self.height as i64 * self.cell_width_mm
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.x >= 0 && c.y >= 0 && (c.x as u32) < self.width && (c.y as u32) < self.height
    }

    pub fn index(&self, c: Cell) -> Option<usize> {
        self.in_bounds(c).then(|| c.y as usize * self.width as usize + c.x as usize)
    }

    /// Occupancy of an in-bounds cell; out-of-bounds cells read as occupied.
    pub fn is_occupied(&self, c: Cell) -> bool {
        self.index(c).is_none_or(|i| self.cells[i])
    }

    pub fn is_free(&self, c: Cell) -> bool {
        !self.is_occupied(c)
    }

    pub fn set(&mut self, c: Cell, occupied: bool) {
        let i = self.index(c).expect("cell out of bounds");
        self.cells[i] = occupied;
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&o| o).count()
    }

    pub fn iter_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.height as i32).flat_map(move |y| (0..self.width as i32).map(move |x| Cell::new(x, y)))
    }

    /// `'0'`/`'1'` rows, newline-terminated.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity((self.width as usize + 1) * self.height as usize);
        for row in self.cells.chunks(self.width as usize) {
            s.extend(row.iter().map(|&o| if o { '1' } else { '0' }));
            s.push('\n');
        }
        s
    }

    /// Binary PGM (P5), occupied cells black and free cells white.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.cells.iter().map(|&o| if o { 0u8 } else { 255u8 }));
        out
    }
}

/// Parses a P2 (ASCII) or P5 (binary) portable graymap. One pixel becomes one
/// cell; gray values below `occupied_threshold` are occupied. Images whose
/// maxval is not 255 are rescaled to 0..=255 before thresholding.
pub fn parse_pgm(bytes: &[u8], cell_width_mm: i64, occupied_threshold: u8) -> Result<OccupancyGrid, WorldError> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(WorldError::Parse("missing PGM magic number".into()));
    }
    let binary = match bytes[1] {
        b'2' => false,
        b'5' => true,
        other => {
            return Err(WorldError::UnsupportedFormat(format!("magic number P{}", other as char)));
        }
    };
    let mut pos = 2;
    let mut header = [0u32; 3];
    for slot in header.iter_mut() {
        *slot = next_number(bytes, &mut pos)?;
    }
    let [width, height, maxval] = header;
    if width == 0 || height == 0 {
        return Err(WorldError::Parse("zero image dimension".into()));
    }
    if maxval == 0 || maxval > 255 {
        return Err(WorldError::Parse(format!("unsupported maxval {maxval}")));
    }
    let n = width as usize * height as usize;
    let mut gray = Vec::with_capacity(n);
    if binary {
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err(WorldError::Parse("missing whitespace after maxval".into()));
        }
        pos += 1;
        let data = bytes.get(pos..pos + n).ok_or_else(|| WorldError::Parse("truncated raster".into()))?;
        gray.extend(data.iter().map(|&b| b as u32));
    } else {
        for _ in 0..n {
            gray.push(next_number(bytes, &mut pos)?);
        }
    }
    let mut cells = Vec::with_capacity(n);
    for g in gray {
        if g > maxval {
            return Err(WorldError::Parse(format!("pixel value {g} exceeds maxval {maxval}")));
        }
        let scaled = if maxval == 255 { g } else { (g * 255 + maxval / 2) / maxval };
        cells.push(scaled < occupied_threshold as u32);
    }
    OccupancyGrid::new(width, height, cell_width_mm, cells)
}

fn next_number(bytes: &[u8], pos: &mut usize) -> Result<u32, WorldError> {
    loop {
        match bytes.get(*pos) {
            None => return Err(WorldError::Parse("unexpected end of PGM data".into())),
            Some(b'#') => {
                while let Some(&b) = bytes.get(*pos) {
                    *pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(|b| b.is_ascii_digit()) {
        *pos += 1;
    }
    if start == *pos {
        return Err(WorldError::Parse(format!("expected a number at byte {start}")));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| WorldError::Parse(format!("number out of range at byte {start}")))
}

/// Parses a rectangular block of `'0'` (free) and `'1'` (occupied) rows.
pub fn parse_text_grid(text: &str, cell_width_mm: i64) -> Result<OccupancyGrid, WorldError> {
    let mut rows: Vec<&str> = text.split('\n').map(|r| r.strip_suffix('\r').unwrap_or(r)).collect();
    while rows.last().is_some_and(|r| r.is_empty()) {
        rows.pop();
    }
    let Some(first) = rows.first() else {
        return Err(WorldError::Parse("empty grid text".into()));
    };
    let width = first.chars().count();
    if width == 0 {
        return Err(WorldError::Parse("empty first row".into()));
    }
    let mut cells = Vec::with_capacity(width * rows.len());
    for (y, row) in rows.iter().enumerate() {
        let before = cells.len();
        for (x, ch) in row.chars().enumerate() {
            match ch {
                '0' => cells.push(false),
                '1' => cells.push(true),
                other => {
                    return Err(WorldError::Parse(format!("unexpected symbol {other:?} at row {y}, column {x}")));
                }
            }
        }
        if cells.len() - before != width {
            return Err(WorldError::Parse(format!("row {y} has {} symbols, expected {width}", cells.len() - before)));
        }
    }
    OccupancyGrid::new(width as u32, rows.len() as u32, cell_width_mm, cells)
}
