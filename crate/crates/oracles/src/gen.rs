use fleetmc::actors::{Model, World};
use fleetmc::checker::{classify, successors, StateClass};
use fleetmc::geometry::{Cell, Dir};
use fleetmc::scenario::{RobotConfig, RobotParams, Scenario};
use fleetmc::worldmodel::OccupancyGrid;
use rand::Rng;

/// Grid whose cells are independently occupied with probability `density`.
pub fn random_grid(rng: &mut impl Rng, width: u32, height: u32, density: f64, cell_width_mm: i64) -> OccupancyGrid {
    let cells = (0..width * height).map(|_| rng.gen_bool(density)).collect();
    OccupancyGrid::new(width, height, cell_width_mm, cells).expect("valid dimensions")
}

/// Small valid scenario with one to three robots and mixed parameters.
pub fn random_scenario(rng: &mut impl Rng) -> Scenario {
    loop {
        let (w, h) = (rng.gen_range(6..=10), rng.gen_range(6..=10));
        let grid = random_grid(rng, w, h, 0.04, 255);
        let n = rng.gen_range(1..=3u16);
        let robots = (1..=n)
            .map(|id| {
                let mut params = RobotParams::defaults(255);
                params.speed_mm_s = rng.gen_range(400..=1200);
                params.stop_zone_mm = rng.gen_range(300..=650);
                params.max_wait_ms = rng.gen_range(2..=8) * 100;
                params.max_reroutes = rng.gen_range(1..=4);
                let cell = |rng: &mut _| Cell::new(Rng::gen_range(rng, 0..w as i32), Rng::gen_range(rng, 0..h as i32));
                RobotConfig {
                    id,
                    start: cell(rng),
                    start_dir: Dir::wrapping(rng.gen_range(0..8)),
                    goal: cell(rng),
                    params,
                }
            })
            .collect();
        if let Ok(s) = Scenario::new(grid.clone(), robots, rng.gen_range(0..=20)) {
            return s;
        }
    }
}

/// Model of a random scenario and a state reached from its initial state
/// by up to `max_steps` random transitions.
pub fn random_world(rng: &mut impl Rng, max_steps: usize) -> (Model, World) {
    let model = Model::new(random_scenario(rng));
    let mut w = model.initial_world();
    for _ in 0..rng.gen_range(0..=max_steps) {
        if classify(&w) != StateClass::Open {
            break;
        }
        let mut next = successors(&model, &w).expect("model step");
        let k = rng.gen_range(0..next.len());
        w = next.swap_remove(k).1;
    }
    (model, w)
}
