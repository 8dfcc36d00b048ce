// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#include "cevnorm/quadrature.hpp"

#include "cevnorm/error.hpp"

namespace cevnorm {

void QuadOptions::validate() const {
  if (!(abs_tol > 0.0) || !std::isfinite(abs_tol)) throw DomainError("QuadOptions.abs_tol must be positive");
  if (max_depth < 1) throw DomainError("QuadOptions.max_depth must be >= 1");
  if (base_nodes < 1) throw DomainError("QuadOptions.base_nodes must be >= 1");
}

}  // namespace cevnorm
