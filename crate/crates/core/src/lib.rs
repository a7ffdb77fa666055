pub mod catalog;
pub mod config;
pub mod disk;
pub mod error;
pub mod fit;
pub mod hardy;
pub mod holder;
pub mod hyperbolic;
mod kdtree;
pub mod quadrature;
pub mod reduction;
pub mod report;
pub mod riemann_sphere;
pub mod verify;

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/sphere.md")]
    pub struct Sphere;
    #[doc = include_str!("../../../book/src/hyperbolic.md")]
    pub struct Hyperbolic;
    #[doc = include_str!("../../../book/src/catalog.md")]
    pub struct Catalog;
    #[doc = include_str!("../../../book/src/holder.md")]
    pub struct Holder;
    #[doc = include_str!("../../../book/src/hardy.md")]
    pub struct Hardy;
    #[doc = include_str!("../../../book/src/reduction.md")]
    pub struct Reduction;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
