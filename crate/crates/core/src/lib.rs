pub mod cli;
pub mod cvt;
pub mod geom2d;
pub mod maps;
pub mod optim;
pub mod pipeline;
