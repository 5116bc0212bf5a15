pub mod division;
pub mod exact;
pub mod lie;
pub mod curvature;
pub mod mechanics;
pub mod stackel;
pub mod verify;
