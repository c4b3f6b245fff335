use fleetmc::actors::{Model, World};
use fleetmc::geometry::{check_collision, Cell, DiscretePose};
use fleetmc::planner::plan_route;

/// Pixels per cell side in PGM frames.
const PGM_SCALE: usize = 8;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    Free,
    Occupied,
    Route,
    Goal,
    Robot(u16),
    Collision,
}

impl Mark {
    fn glyph(self) -> char {
        match self {
            Mark::Free => '.',
            Mark::Occupied => '#',
            Mark::Route => '+',
            Mark::Goal => '*',
            Mark::Robot(id) => char::from_digit(u32::from(id % 10), 10).unwrap_or('?'),
            Mark::Collision => 'X',
        }
    }

    fn gray(self) -> u8 {
        match self {
            Mark::Free => 255,
            Mark::Occupied => 0,
            Mark::Route => 210,
            Mark::Goal => 160,
            Mark::Robot(_) => 90,
            Mark::Collision => 40,
        }
    }
}

/// One rendered state. Later layers win: routes, goals, robots, collisions.
pub struct Frame {
    width: usize,
    height: usize,
    marks: Vec<Mark>,
}

impl Frame {
    pub fn new(model: &Model, world: &World, routes: bool) -> Self {
        let grid = model.grid();
        let (width, height) = (grid.width() as usize, grid.height() as usize);
        let marks = grid.cells().iter().map(|&occ| if occ { Mark::Occupied } else { Mark::Free }).collect();
        let mut f = Frame { width, height, marks };
        if routes {
            for (slot, cfg) in model.robots().iter().enumerate() {
                if let Ok(path) = plan_route(model.inflated(slot), cfg.start, cfg.goal) {
                    for c in fleetmc::planner::expand_path(cfg.start, &path) {
                        f.put(c, Mark::Route);
                    }
                }
            }
        }
        for cfg in model.robots() {
            f.put(cfg.goal, Mark::Goal);
        }
        for r in &world.robots {
            f.put(r.pose.cell(), Mark::Robot(r.id));
        }
        for slot in colliding(model, world) {
            f.put(world.robots[slot].pose.cell(), Mark::Collision);
        }
        f
    }

    fn put(&mut self, c: Cell, m: Mark) {
        if c.x >= 0 && c.y >= 0 && (c.x as usize) < self.width && (c.y as usize) < self.height {
            self.marks[c.y as usize * self.width + c.x as usize] = m;
        }
    }

    pub fn to_ascii(&self) -> String {
        let mut s = String::with_capacity((self.width + 1) * self.height);
        for row in self.marks.chunks(self.width) {
            s.extend(row.iter().map(|m| m.glyph()));
            s.push('\n');
        }
        s
    }

    pub fn to_pgm(&self) -> Vec<u8> {
        let (w, h) = (self.width * PGM_SCALE, self.height * PGM_SCALE);
        let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
        for y in 0..h {
            let row = &self.marks[(y / PGM_SCALE) * self.width..][..self.width];
            out.extend((0..w).map(|x| row[x / PGM_SCALE].gray()));
        }
        out
    }
}

/// Robots whose shadows overlap another robot's, either at their own poses
/// or at the poses last reported to the map server.
fn colliding(model: &Model, world: &World) -> Vec<usize> {
    let grid = model.grid();
    let n = world.robots.len();
    let own: Vec<DiscretePose> = world.robots.iter().map(|r| r.pose).collect();
    let mut hit = vec![false; n];
    for poses in [&own, &world.map.poses] {
        for i in 0..n {
            for j in i + 1..n {
                let (fi, fj) = (&model.config(i).params.footprint, &model.config(j).params.footprint);
                if check_collision(poses[i], fi, poses[j], fj, grid) {
                    hit[i] = true;
                    hit[j] = true;
                }
            }
        }
    }
    (0..n).filter(|&i| hit[i]).collect()
}
