//! Planning for the action languages B and B^MV by compilation to
//! finite-domain constraints.

pub mod fd;
pub mod b;
pub mod bench;
pub mod bmv;
pub mod frontend;
pub mod model;
pub mod planner;
pub mod traj;
