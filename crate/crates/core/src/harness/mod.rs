//! Verification experiments, domain generators and convergence reporting.

mod generators;
mod report;
mod verify;

pub use generators::{
    gen_cube_sequence, gen_disk, gen_koch, gen_weierstrass_subgraph, weierstrass, Koch, WeierstrassSubgraph, MAX_KOCH_LEVEL,
    MAX_WEIERSTRASS_TERMS,
};
pub use report::{convergence_rate, ExperimentReport, LevelRow, Rate, Verdict, EXACT_FLOOR};
pub use verify::{
    alt_gauss_sign, gauss_sign, star_sign, verify_distribution, verify_gauss, verify_green, verify_laplace, verify_pushforward, verify_star,
    verify_stokes, verify_stokes_seq, QUAD_TOL,
};
