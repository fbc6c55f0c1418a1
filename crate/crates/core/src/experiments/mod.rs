pub mod metrics;
pub mod noise;
pub mod pnm;
pub mod images;
pub mod config;
pub mod report;
pub mod runner;
