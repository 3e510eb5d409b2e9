//! Approximation algorithms for maximum coverage and multiple knapsack
//! problems with cluster constraints, over exact rationals.

pub mod lp;
pub mod mcpc;
pub mod mkpc;
pub mod model;
pub mod pipage;
pub mod rational;
pub mod oracle;
pub mod par;
pub mod solve;
pub mod experiment;
