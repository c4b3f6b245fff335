use super::kernel::Ctx;
use super::{Args, Message, ModelError, Server, World};
use crate::geometry::check_collision;
use std::sync::Arc;

pub(super) fn handle(ctx: &mut Ctx<'_>, world: &mut World, msg: &Message) -> Result<(), ModelError> {
    let model = ctx.model;
    let latency = model.latency();
    let slot_of = |robot| model.slot_of(robot).ok_or(ModelError::UnknownActor(robot));
    match (msg.server, &msg.args) {
        (Server::ScanObstacles, &Args::Robot { robot }) => {
            let slot = slot_of(robot)?;
            let others = model.shadows_except(&world.map.poses, slot);
            let params = model.config(slot).params.scan_params();
            let matrix = model
                .rays()
                .scan(world.map.poses[slot], &others, &params, ctx.now)
                .map_err(|_| ModelError::BadArgs { server: msg.server })?;
            ctx.send(robot, Server::OnLaserScan, Args::Scan { matrix: Arc::new(matrix) }, latency, None);
        }
        (Server::GeneratePath, &Args::PathRequest { robot, from, goal }) => {
            let slot = slot_of(robot)?;
            let path = model.route(slot, from, goal);
            ctx.send(robot, Server::OnNewPath, Args::NewPath { path }, latency, None);
        }
        (Server::UpdateRobotLocation, &Args::Location { robot, pose }) => {
            let slot = slot_of(robot)?;
            world.map.poses[slot] = pose;
            let fp = &model.config(slot).params.footprint;
            for (other, &p) in world.map.poses.iter().enumerate() {
                if other != slot && check_collision(pose, fp, p, &model.config(other).params.footprint, model.grid()) {
                    world.map.collision_flag = true;
                }
            }
        }
        (Server::ScanObstacles | Server::GeneratePath | Server::UpdateRobotLocation, _) => {
            return Err(ModelError::BadArgs { server: msg.server });
        }
        (server, _) => return Err(ModelError::UnknownServer { target: msg.target, server }),
    }
    Ok(())
}
