// LATIN local stage: pointwise constitutive integration over the time axis.
#pragma once

#include "latinpgd/field.hpp"
#include "latinpgd/material.hpp"

#include <vector>

namespace latinpgd {

struct LocalFields {
  FieldST sigma;  // 6 n_gauss x n_time
  Eigen::MatrixXd d, dbar, y, z, zz;  // n_gauss x n_time
};

/// Integrates the damage law at every spatial Gauss point along the temporal
/// samples `times` (starting from a virgin state at t = 0). The hat strain is
/// the input strain. `order`, when given, is the processing order of spatial
/// points (results do not depend on it).
LocalFields local_stage(const FieldST& eps, const Eigen::VectorXd& times, const MaterialParams& p,
                        const std::vector<int>* order = nullptr);

}  // namespace latinpgd
