//! GPC-based compressor tree synthesis for FPGA logic cell profiles.

pub mod bitheap;
pub mod gpclib;
pub mod benchgen;
pub mod ilp;
pub mod solver;
pub mod verify;
pub mod report;
