pub mod lp;
pub mod qn;
pub mod sdp;
