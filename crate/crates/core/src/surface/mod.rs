//! Cell-complex reconstruction of the surface swept out by a movie.

mod build;
mod complex;

pub use build::build_surface;
pub use complex::{
    ComponentInfo, ComponentSummary, DeckerTag, Edge, EdgeId, Face, FaceId, FrameKey, Step,
    SurfaceComplex, Vertex, VertexId,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SurfaceError {
    #[error("movie contains a triple point (r3 event); only p-movies have a surface model here")]
    NotPMovie,
    #[error("component `{0}` is not connected")]
    DisconnectedLabel(String),
    #[error("malformed surface complex: {0}")]
    Malformed(String),
    #[error("internal surface construction error: {0}")]
    Internal(String),
}
