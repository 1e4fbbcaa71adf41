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

#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kapitza {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Time-dependent operator, t in ns, entries in rad/ns.
using TimeOperator = std::function<CMatrix(double)>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

// Ordinary frequency (GHz) to angular frequency (rad/ns).
inline double angular(double ghz) { return kTwoPi * ghz; }
inline double ordinary(double rad_per_ns) { return rad_per_ns / kTwoPi; }

class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// exp(-i H t) for Hermitian H.
CMatrix expm_hermitian(const CMatrix& h, double t);

// ||U^dag U - 1|| (max abs entry).
double unitarity_error(const CMatrix& u);

// ||H - H^dag|| / max(||H||, tiny), Frobenius.
double hermiticity_error(const CMatrix& h);

CMatrix kron(const CMatrix& a, const CMatrix& b);

// Smallest eigenvalue of the Hermitian part of rho.
double min_eigenvalue(const CMatrix& rho);

// Eigen-decomposition of a unitary (or normal) matrix with orthonormal vectors.
struct UnitaryEigen {
    CVector values;
    CMatrix vectors;
};
UnitaryEigen unitary_eigen(const CMatrix& u);

// Runs body(i) for i in [0, n) on up to n_threads worker threads; the first
// exception thrown by any call is rethrown after all workers finish.
void parallel_for(int n, int n_threads, const std::function<void(int)>& body);

}  // namespace kapitza
