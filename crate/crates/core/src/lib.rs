pub mod anticanon;
pub mod arrangement;
pub mod classifier;
pub mod coxdata;
pub mod exactmath;
pub mod io;
pub mod par;
pub mod polyhedra;
pub mod report;
pub mod tropical;
pub mod variety;
