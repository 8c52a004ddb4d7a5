//! Filtering, windowing and feature normalization.

pub mod filter;
mod normalize;
mod window;

pub use filter::{apply_filters, FilterSpec};
pub use normalize::{normalize_features, MinMax};
pub use window::{discard_leading, segment, window_len, Window, WindowMeta};
