//! Sparse spectral image segmentation with Normalized Cuts on a
//! grid-plus-color-nodes graph.
//!
//! Every pixel is a node of a 4-connected grid whose edges carry weight `mu`.
//! On top of the grid, one extra node is added per quantized color (or feature
//! cluster) and every pixel is tied to its color node by a unit edge. The graph
//! therefore has `O(n)` edges, and the Normalized Cut energy of a bipartition
//! factors into a color-mismatch count plus `mu` times the number of cut grid
//! edges.
//!
//! The pipeline is:
//!
//! | Stage | Module |
//! |-------|--------|
//! | feature maps, PCA, upsampling, mini-batch K-means | [`features`] |
//! | graph assembly, Laplacian products | [`graph`] |
//! | Fiedler vector of `L x = λ D x` | [`eigen`] |
//! | threshold sweep, discrete energies | [`cut`] |
//! | bisection and recursive segmentation | [`segmenter`] |
//! | synthetic noisy square patterns | [`synth`] |
//! | IoU, one-to-one matching, mIoU | [`eval`] |
//! | brute-force references for tiny graphs | [`oracle`] |
//! | FMAP / PGM / PNG files | [`io`] |
//!
//! ```
//! use xncut::{features::QuantizedImage, segmenter::{bisect, SegmenterConfig}};
//!
//! // Two columns of different colors.
//! let qi = QuantizedImage::from_labels(2, 2, vec![0, 1, 0, 1]).unwrap();
//! let cfg = SegmenterConfig { mu: 0.5, ..SegmenterConfig::default() };
//! let (seg, cut) = bisect(&qi, &cfg).unwrap();
//! assert_eq!(seg.n_segments, 2);
//! assert!((cut.ncut - 1.0 / 3.0).abs() < 1e-12);
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cut;
pub mod eigen;
mod error;
pub mod eval;
pub mod features;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod segmenter;
pub mod synth;

pub use cut::CutResult;
pub use eigen::EigenResult;
pub use error::{Error, Result};
pub use eval::MatchReport;
pub use features::{FeatureMap, QuantizedImage};
pub use graph::SparseGraph;
pub use segmenter::{Segmentation, SegmenterConfig, StopRule};
pub use synth::{GroundTruth, Noise, Pattern, SyntheticSpec};
