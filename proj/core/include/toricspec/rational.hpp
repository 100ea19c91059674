/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/rational.hpp>

namespace toricspec {

using Integer = std::int64_t;
using Rational = boost::rational<Integer>;
using IntVector = std::vector<Integer>;
using RationalVector = std::vector<Rational>;

inline double to_double(const Rational& q) {
  return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

inline Eigen::VectorXd to_eigen(const RationalVector& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = to_double(v[i]);
  return out;
}

inline Eigen::VectorXd to_eigen(const IntVector& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = static_cast<double>(v[i]);
  return out;
}

inline Rational dot(const IntVector& a, const RationalVector& b) {
  Rational acc(0);
  for (std::size_t i = 0; i < a.size(); ++i) acc += Rational(a[i]) * b[i];
  return acc;
}

inline Integer lcm_of_denominators(const RationalVector& v) {
  Integer l = 1;
  for (const auto& q : v) l = boost::integer::lcm(l, q.denominator());
  return l;
}

// "3", "-1/2"
std::string to_string(const Rational& q);
Rational parse_rational(const std::string& text);

}  // namespace toricspec
