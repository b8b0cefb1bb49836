#pragma once

#include "sheat/fields.hpp"
#include "sheat/geometry.hpp"
#include "sheat/stochastic.hpp"

namespace sheat {

/// v1(t_m) = heat flow of the extended initial datum for time t_m.
SpaceTimeField compute_v1(const Field& u0_ext, const TimeGrid& time);

/// Duhamel sum v2(t_m) = sum_{l<m} S(t_m - t_l - dt/2) f(t_l) dt.
/// Evaluated as a spectral recursion, so each step costs two FFTs.
SpaceTimeField compute_v2(const SpaceTimeField& f_ext, const TimeGrid& time);

/// Stochastic convolution v3(t_m) = sum_{l<m} S(t_m - t_l) g(t_l) dw_{l+1}.
/// Throws ValidationError if the driver and g live on different time grids.
SpaceTimeField compute_v3(const SpaceTimeField& g_ext, const BrownianDriver& driver);

/// u = v1 + v2 + v3 + h on nodes of the closed domain, zero elsewhere.
SpaceTimeField assemble_u(const SpaceTimeField& v1, const SpaceTimeField& v2,
                          const SpaceTimeField& v3, const SpaceTimeField& h,
                          const PolygonDomain& domain);

/// Nodes of the grid in the closure of the domain.
Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> closure_mask(const SpaceGrid& grid,
                                                               const PolygonDomain& domain);

}  // namespace sheat
