//! Every numeric default used by the library and the `walklab` runner.
//!
//! | constant | value | used by |
//! |---|---|---|
//! | [`RADIUS_POLYNOMIAL`] | 20 | BFS radius for lattice, Heisenberg |
//! | [`RADIUS_EXPONENTIAL`] | 12 | BFS radius for lamplighter, sol, free |
//! | [`BFS_ELEMENT_CAP`] | 2 000 000 | stop BFS before the cache exceeds this |
//! | [`BALL_ELEMENT_CAP`] | 20 000 000 | memory guard for explicit balls |
//! | [`QUOTIENT_SIZE_CAP`] | 10 000 | largest finite quotient |
//! | [`SUPPORT_CAP`] | 50 000 000 | largest support a convolution may produce |
//! | [`DROP_EPSILON`] | 1e-14 | atom drop threshold in convolution powers |
//! | [`DENSE_FILL_RATIO`] | 0.05 | bounding-box fill above which lattice measures go dense |
//! | [`RATIONAL_SUPPORT_CAP`] | 1000 | exact rational convolution |
//! | [`STABLE_CUTOFF`] | 100 000 | default cutoff of stable-like laws on `Z` |
//! | [`STABLE_SUPPORT`] | 1 000 000 | default support size of stable-like laws on `Z^d`, `d ≥ 2` |
//! | [`MIXTURE_LEVELS`] | 5 | default number of ball-mixture levels |
//! | [`SUBORDINATION_TAIL`] | 1e-6 | target for the discarded subordination tail |
//! | [`SUBORDINATION_EXPLICIT_CAP`] | 100 000 | most powers summed term by term |
//! | [`QUADRATURE_REL_TOL`] | 1e-6 | contract tolerance for integrals |
//! | [`SCALE_GRID_POINTS`] | 1000 | monotonicity grid for scales, kernels, symbols |
//! | [`ADMISSIBILITY_T_MAX`] | 1e4 | right end of the admissibility grid `[1, t_max]` |
//! | [`SYMBOL_TOL`] | 1e-12 | `psi(0)=0, psi(1)=1` checks |
//! | [`SPECTRAL_TOL`] | 1e-10 | eigenvalue certification |
//! | [`JACKKNIFE_BLOCKS`] | 20 | blocks for Monte Carlo standard errors |
//! | [`SAMPLING_DEFICIT_MAX`] | 1e-3 | largest deficit a sampled measure may carry |
//! | [`FIT_MAX_BRACKET`] | 0.1 | widest relative bracket accepted by fits |
//! | [`FINITE_SIZE_FLOOR`] | 10 | fits drop points below `floor / |G|` |
//! | [`RATIONAL_AUTO_N_MAX`] | 64 | largest `n` for which `walk` picks exact rationals by itself |
//! | [`MC_SAMPLES`] | 20 000 | Monte Carlo samples when a config gives none |
//! | [`SANDWICH_N_MAX`] | 200 | horizon of the spectral sandwich check |
//! | [`COMPARISON_N_MAX`] | 100 | horizon of the comparison frontier |
//! | [`INTERPOLATION_TRIALS`] | 100 | random functions per interpolation check |
//! | [`RANGE_WALKS`] | 10 000 | walks per range profile |
//! | [`VERIFY_SEED`] | 20 240 601 | seed of the verification suites |
//! | [`CACHE_DIR`] | `.walklab-cache` | cache root when a config gives none |

pub const RADIUS_POLYNOMIAL: u32 = 20;
pub const RADIUS_EXPONENTIAL: u32 = 12;
pub const BFS_ELEMENT_CAP: usize = 2_000_000;
pub const BALL_ELEMENT_CAP: usize = 20_000_000;
pub const QUOTIENT_SIZE_CAP: usize = 10_000;
pub const SUPPORT_CAP: usize = 50_000_000;
pub const DROP_EPSILON: f64 = 1e-14;
pub const DENSE_FILL_RATIO: f64 = 0.05;
pub const RATIONAL_SUPPORT_CAP: usize = 1000;
pub const STABLE_CUTOFF: u64 = 100_000;
pub const STABLE_SUPPORT: u64 = 1_000_000;
pub const MIXTURE_LEVELS: usize = 5;
pub const SUBORDINATION_TAIL: f64 = 1e-6;
pub const SUBORDINATION_EXPLICIT_CAP: u64 = 100_000;
pub const QUADRATURE_REL_TOL: f64 = 1e-6;
pub const SCALE_GRID_POINTS: usize = 1000;
pub const ADMISSIBILITY_T_MAX: f64 = 1e4;
pub const SYMBOL_TOL: f64 = 1e-12;
pub const SPECTRAL_TOL: f64 = 1e-10;
pub const JACKKNIFE_BLOCKS: usize = 20;
pub const SAMPLING_DEFICIT_MAX: f64 = 1e-3;
pub const FIT_MAX_BRACKET: f64 = 0.1;
pub const FINITE_SIZE_FLOOR: f64 = 10.0;
pub const RATIONAL_AUTO_N_MAX: u64 = 64;
pub const MC_SAMPLES: usize = 20_000;
pub const SANDWICH_N_MAX: u32 = 200;
pub const COMPARISON_N_MAX: u32 = 100;
pub const INTERPOLATION_TRIALS: usize = 100;
pub const RANGE_WALKS: usize = 10_000;
pub const VERIFY_SEED: u64 = 20_240_601;
pub const CACHE_DIR: &str = ".walklab-cache";
