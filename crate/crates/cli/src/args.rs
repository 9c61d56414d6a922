use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "tat", version, about = "Thermoacoustic tomography: phantoms, forward data, reconstruction and auditing")]
pub struct Cli {
    /// Worker threads (1 gives the reference, fully reproducible ordering)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// File of `key = value` lines used as defaults for the flags of the subcommand
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// More log output (repeat for more)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Rasterize a phantom description onto a regular grid
    Phantom(PhantomArgs),
    /// Spherical means or integrals (or 3D pressure) on a detector set
    Forward(ForwardArgs),
    /// Boundary pressure from a finite-difference wave simulation
    WaveForward(WaveForwardArgs),
    /// Reconstruct the initial pressure from a data file
    Recon(ReconArgs),
    /// Audit circular mean data against the range conditions (CSV report)
    RangeCheck(RangeCheckArgs),
    /// Predict which interfaces a detector set can see (CSV)
    Visibility(VisibilityArgs),
    /// Compare a reconstruction with a reference field (CSV)
    Metrics(MetricsArgs),
    /// Write a field (or a 3D slice) as an ASCII PGM with a scale sidecar
    ExportPgm(ExportPgmArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeomKind {
    Circle,
    Arc,
    Sphere,
    Square,
    Cube,
    Line,
}

#[derive(Args, Debug, Clone)]
pub struct GeometryArgs {
    /// Detector surface
    #[arg(long, value_enum, default_value = "circle")]
    pub geometry: GeomKind,
    /// Centre of the detector surface, comma separated [default: origin]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub center: Option<Vec<f64>>,
    /// Radius (circle, arc, sphere) or half side (square, cube)
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Detector count (circle, arc, line), latitudes (sphere) or detectors per side (square, cube)
    #[arg(long, default_value_t = 256)]
    pub detectors: usize,
    /// First arc angle in radians
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub arc_start: f64,
    /// Arc span in radians
    #[arg(long, default_value_t = std::f64::consts::PI)]
    pub arc_span: f64,
    /// Segment end points x0,y0,x1,y1
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub segment: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Grid nodes per axis
    #[arg(long, default_value_t = 128)]
    pub grid: usize,
    /// Side length of the grid box [default: 2 for phantoms; 1.4 R inside the detector surface]
    #[arg(long)]
    pub extent: Option<f64>,
    /// Centre of the grid box, comma separated [default: origin or the detector centre]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub grid_center: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
pub struct PhantomArgs {
    /// Phantom description (`disk cx cy r amp`, `bump ...`, `rect ...`, ...)
    #[arg(long)]
    pub spec: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Dimension for an empty description
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Output field
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum KindArg {
    Mean,
    Integral,
    Pressure,
}

#[derive(Args, Debug)]
pub struct ForwardArgs {
    /// Analytic phantom description
    #[arg(long, conflicts_with = "field", required_unless_present = "field")]
    pub spec: Option<PathBuf>,
    /// Sampled field, multilinearly interpolated (0 outside its grid)
    #[arg(long)]
    pub field: Option<PathBuf>,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// Radial samples per detector, including r = 0
    #[arg(long, default_value_t = 512)]
    pub samples: usize,
    /// Largest radius [default: 2R for round surfaces, the diameter otherwise]
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, value_enum, default_value = "integral")]
    pub kind: KindArg,
    /// Angular points per circle (2D)
    #[arg(long, default_value_t = 512)]
    pub quad_circle: usize,
    /// Gauss-Legendre latitudes per sphere (3D)
    #[arg(long, default_value_t = 64)]
    pub quad_lat: usize,
    /// Longitudes per sphere (3D)
    #[arg(long, default_value_t = 128)]
    pub quad_lon: usize,
    /// Exact radial integration for 3D balls and bumps instead of quadrature
    #[arg(long)]
    pub exact: bool,
    /// Relative L2 level of additive Gaussian noise
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Seed of the noise generator
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output data file
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SpeedArgs {
    /// Sound speed field on the simulation grid
    #[arg(long)]
    pub speed: Option<PathBuf>,
    /// Constant sound speed used when no field is given
    #[arg(long, default_value_t = 1.0)]
    pub speed_const: f64,
    /// CFL number [default: 0.5 in 2D, 0.4 in 3D]
    #[arg(long)]
    pub cfl: Option<f64>,
}

#[derive(Args, Debug)]
pub struct WaveForwardArgs {
    /// Initial pressure field
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    pub field: Option<PathBuf>,
    /// Phantom description, rasterized on the detector-conforming grid (square/cube only)
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[command(flatten)]
    pub speed: SpeedArgs,
    /// Final time
    #[arg(long)]
    pub t_final: f64,
    /// Padding cells on every side [default: ceil(c_max T / h)]
    #[arg(long)]
    pub padding: Option<usize>,
    /// Output data file
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ReconArgs {
    /// fpr3d_laplacian, fpr3d_d2t, fpr3d_ddt_chain, finch2d_laplacian, finch2d_filtered,
    /// kunyansky_general, kunyansky_2d, kunyansky_3d, norton2d, cubic_series,
    /// square_series_2d, eigen_expand, time_reversal [default: kunyansky_2d or fpr3d_d2t]
    #[arg(long)]
    pub method: Option<String>,
    /// Data file
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Reconstructed field
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Refinement factor of the λ-mesh (kunyansky_general)
    #[arg(long, default_value_t = 1)]
    pub lambda_refine: usize,
    /// Truncation of λ integrals [default: π/Δt]
    #[arg(long)]
    pub lambda_max: Option<f64>,
    /// Use the ε-regularised log kernel (Finch) instead of exact product integration
    #[arg(long)]
    pub log_eps: Option<f64>,
    /// Zero-fill arc data to a full circle before filtered backprojection
    #[arg(long)]
    pub zero_fill: bool,
    /// Highest angular order (norton2d) or modes per axis (series) [default: from the data]
    #[arg(long)]
    pub m_max: Option<usize>,
    /// Divide by J_m instead of the Hankel function (norton2d)
    #[arg(long)]
    pub no_hankel: bool,
    /// Relative |J_m| level treated as a zero (norton2d with --no-hankel)
    #[arg(long, default_value_t = 0.05)]
    pub mask: f64,
    /// Lagrange interpolation order in λ (series)
    #[arg(long, default_value_t = 8)]
    pub interp_order: usize,
    /// Eigenpairs used by eigen_expand
    #[arg(long, default_value_t = 600)]
    pub k_max: usize,
    #[command(flatten)]
    pub speed: SpeedArgs,
}

#[derive(Args, Debug)]
pub struct RangeCheckArgs {
    /// Data file (circle geometry)
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Highest moment order
    #[arg(long, default_value_t = 3)]
    pub k_max: usize,
    /// Highest angular order of the orthogonality test
    #[arg(long, default_value_t = 16)]
    pub m_max: usize,
    /// Bessel zeros per order
    #[arg(long, default_value_t = 10)]
    pub q_max: usize,
    /// Residual accepted as consistent
    #[arg(long, default_value_t = 1e-2)]
    pub tolerance: f64,
    #[arg(long)]
    pub skip_moment: bool,
    #[arg(long)]
    pub skip_orthogonality: bool,
    /// CSV report [default: standard output]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VisibilityArgs {
    /// Phantom description
    #[arg(long)]
    pub spec: PathBuf,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// CSV output [default: standard output]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MetricsArgs {
    /// Reference field
    #[arg(long)]
    pub reference: PathBuf,
    /// Reconstruction on the same grid
    #[arg(long)]
    pub rec: PathBuf,
    /// Boundary segment `label:x0,y0[,z0]:x1,y1[,z1]` for edge sharpness (repeatable)
    #[arg(long, allow_hyphen_values = true)]
    pub edge: Vec<String>,
    /// CSV output [default: standard output]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExportPgmArgs {
    /// Field file
    #[arg(long = "in")]
    pub input: PathBuf,
    /// PGM image; the scale goes to `<stem>.scale.csv`
    #[arg(long)]
    pub out: PathBuf,
    /// Index along the first axis for 3D fields [default: middle]
    #[arg(long)]
    pub slice: Option<usize>,
}
