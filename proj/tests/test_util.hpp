// Copyright 2026 The kapitza-floq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <random>

#include "kapitza/linalg.hpp"

namespace kapitza::testing {

inline CMatrix random_matrix(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

inline CMatrix random_hermitian(int n, std::mt19937_64& rng) {
    CMatrix m = random_matrix(n, rng);
    return (m + m.adjoint()) / 2.0;
}

inline CMatrix random_unitary(int n, std::mt19937_64& rng) {
    Eigen::HouseholderQR<CMatrix> qr(random_matrix(n, rng));
    return qr.householderQ() * CMatrix::Identity(n, n);
}

// exp(-i H t) by scaling and squaring of a truncated Taylor series.
inline CMatrix taylor_expm(const CMatrix& h, double t) {
    int n = static_cast<int>(h.rows());
    int squarings = 12;
    CMatrix a = (-kI * t / static_cast<double>(1 << squarings)) * h;
    CMatrix sum = CMatrix::Identity(n, n);
    CMatrix term = CMatrix::Identity(n, n);
    for (int k = 1; k < 30; ++k) {
        term = term * a / static_cast<double>(k);
        sum += term;
    }
    for (int k = 0; k < squarings; ++k) sum = sum * sum;
    return sum;
}

inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace kapitza::testing
