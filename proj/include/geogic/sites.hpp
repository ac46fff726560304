#pragma once

#include <Eigen/Dense>
#include <optional>

namespace geogic {

using Eigen::Index;

/// Ordered sampling locations in one or two dimensions.
///
/// Generated 1D sets follow s_i = i * n^{-(1-delta)}, i = 1..n, so the domain
/// is [0, n^delta]. Generated 2D sets are full m x m lattices with spacing
/// m^{-(1-delta)}, listed with the first coordinate varying fastest
/// (k = i + (j-1) m). Sets read from files carry no delta and no lattice.
struct SiteSet {
  int dim = 1;
  Eigen::MatrixXd coords;          // n x dim
  std::optional<double> delta;     // domain-growth exponent, if generated
  std::optional<Index> side;       // m for a full 2D lattice

  Index size() const { return coords.rows(); }
  bool is_lattice() const { return dim == 2 && side.has_value(); }
  double coord(Index i, int axis = 0) const { return coords(i, axis); }

  // Lattice spacing m^{-(1-delta)}; only meaningful for lattices.
  double lattice_spacing() const;
};

SiteSet sites_1d(Index n, double delta);
SiteSet sites_2d(Index n, double delta);

// Wraps user coordinates (n x 1 or n x 2). No ordering is imposed.
SiteSet sites_from_coords(Eigen::MatrixXd coords);

}  // namespace geogic
