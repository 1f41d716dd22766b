#pragma once

#include <vector>

#include "csflow/poly.hpp"

namespace csflow {

// c_0..c_K from 1/n! = sum_k c_k / (n-k+1)!
std::vector<Rational> c_coeffs(int K);
// d_0..d_K from 1/(n+2)! = sum_k d_k / (n-k+1)!
std::vector<Rational> d_coeffs(int K);
// B_k = (-1)^(k-1) (2k)! c_{2k}, k >= 1
Rational bernoulli_from_c(int k);

Rational factorial(int n);

} // namespace csflow
