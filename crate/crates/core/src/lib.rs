pub mod bench;
pub mod contact;
pub mod control;
pub mod estimation;
pub mod geom;
pub mod objects;
pub mod sim;
