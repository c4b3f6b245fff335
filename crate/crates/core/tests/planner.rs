use fleetmc::geometry::{Cell, Dir};
use fleetmc::planner::{
    consolidate_waypoints, eliminate_zigzag, expand_path, generate_path, is_walkable, path_cost, plan_route, PlanError,
};
use fleetmc_oracles::{dijkstra_cost, random_grid};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn free_cell(rng: &mut impl Rng, g: &fleetmc::worldmodel::OccupancyGrid) -> Cell {
    loop {
        let c = Cell::new(rng.gen_range(0..g.width() as i32), rng.gen_range(0..g.height() as i32));
        if g.is_free(c) {
            return c;
        }
    }
}

#[test]
fn astar_cost_equals_dijkstra_on_random_grids() {
    let (mut solved, mut unsolvable) = (0, 0);
    for seed in 0..150u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_grid(&mut rng, 15, 15, 0.2, 255);
        let (s, t) = (free_cell(&mut rng, &g), free_cell(&mut rng, &g));
        match (generate_path(&g, s, t), dijkstra_cost(&g, s, t)) {
            (Ok(p), Some(cost)) => {
                assert_eq!(path_cost(s, &p), cost, "seed {seed}");
                assert!(is_walkable(s, &p, &g), "seed {seed}");
                let route = plan_route(&g, s, t).unwrap();
                assert_eq!(path_cost(s, &route), cost, "seed {seed} optimized");
                assert!(is_walkable(s, &route, &g), "seed {seed} optimized");
                solved += 1;
            }
            (Err(PlanError::NoPath { .. }), None) => unsolvable += 1,
            other => panic!("seed {seed}: {other:?}"),
        }
    }
    assert!(solved >= 100, "{solved} solved, {unsolvable} unsolvable");
}

fn walk(start: Cell, dirs: &[u8]) -> Vec<Cell> {
    let mut at = start;
    dirs.iter()
        .map(|&d| {
            at = at.step(Dir::new(d).unwrap());
            at
        })
        .collect()
}

proptest! {
    #[test]
    fn consolidation_is_idempotent_and_keeps_the_walk(dirs in prop::collection::vec(0u8..8, 0..40)) {
        let start = Cell::new(0, 0);
        let path = walk(start, &dirs);
        let once = consolidate_waypoints(start, &path);
        prop_assert_eq!(&consolidate_waypoints(start, &once), &once);
        prop_assert_eq!(expand_path(start, &once), path.clone());
        prop_assert_eq!(once.last(), path.last());
    }

    #[test]
    fn zigzag_elimination_never_costs_more(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_grid(&mut rng, 12, 12, 0.15, 255);
        let (s, t) = (free_cell(&mut rng, &g), free_cell(&mut rng, &g));
        if let Ok(p) = generate_path(&g, s, t) {
            let z = eliminate_zigzag(s, &p, &g);
            prop_assert!(is_walkable(s, &z, &g));
            prop_assert!(path_cost(s, &z) <= path_cost(s, &p));
            prop_assert_eq!(z.last(), p.last());
        }
    }
}
