pub mod exactlin;
pub mod kspec;
pub mod lift;
pub mod model;
pub mod moment;
pub mod orbits;
pub mod pairs;
