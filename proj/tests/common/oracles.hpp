// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations used by the tests.
#pragma once

#include <boost/multiprecision/cpp_dec_float.hpp>

namespace atsss::oracle {

using Big = boost::multiprecision::cpp_dec_float_50;

/// log(1 + w x) / log(1 + w x_max) in 50-digit decimal arithmetic, with the
/// clamps at 0 and x_max.
inline double utility(double x, double w, double x_max) {
  if (x <= 0.0) return 0.0;
  if (x >= x_max) return 1.0;
  const Big bx(x), bw(w), bm(x_max);
  const Big num = boost::multiprecision::log(Big(1) + bw * bx);
  const Big den = boost::multiprecision::log(Big(1) + bw * bm);
  return static_cast<double>(num / den);
}

}  // namespace atsss::oracle
