//! Exact combinatorics of the tropical bilinear map
//!
//!   g(a, A, b, B)_ij = min(a_i + b_j, A_i + B_j),
//!
//! where a, A have length m and b, B have length n.  The image of g is the
//! set of m x n matrices expressible as the entrywise minimum of two
//! additively-rank-one matrices.  Which of the two minimands wins at entry
//! (i, j) depends only on the sign of x_i - y_j, where x_i = a_i - A_i and
//! y_j = B_j - b_j, so the combinatorial type of a parameter point is a
//! region (or face) of the arrangement of hyperplanes x_i = y_j in
//! R^m x R^n.
//!
//! The crate provides, with exact rational arithmetic throughout:
//!
//! * [`arrangement`]: region and face labels of the arrangement, point
//!   location, enumeration, and the bijection with acyclic orientations of
//!   the complete bipartite graph K_{m,n}.
//! * [`diagram`]: the black/white diagram of a region, its lattice path,
//!   rectangle inequalities satisfied by the image, dimension and size
//!   classification of image cells.
//! * [`morphism`]: evaluation, exact preimage construction within a region,
//!   gauge normalization, and generic fiber descriptions.
//! * [`cells`]: image cells as polyhedra, membership, cell location,
//!   parent/child subdivision constructions, region recovery from a span,
//!   a decision procedure for "is G an entrywise minimum of two rank-one
//!   matrices", and subdivision verification.
//! * [`counts`]: exponential generating functions and closed formulas for
//!   the number of faces, regions, and maximal cells, cross-checked against
//!   enumeration.
//! * [`ratcore`]: the exact-arithmetic substrate (rationals, matrices,
//!   linear systems with strict inequalities, truncated trivariate series).
//!
//! The `tropbip` binary exposes all of this on the command line; see the
//! [`cli`] module or `tropbip --help`.

pub mod arrangement;
pub mod cells;
pub mod cli;
pub mod counts;
pub mod diagram;
pub mod json;
pub mod morphism;
pub mod ratcore;
