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

#include "kapitza/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <Eigen/Eigenvalues>

namespace kapitza {

CMatrix expm_hermitian(const CMatrix& h, double t) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    CVector phases = (-kI * t * es.eigenvalues().cast<cplx>()).array().exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double unitarity_error(const CMatrix& u) {
    CMatrix d = u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols());
    return d.cwiseAbs().maxCoeff();
}

double hermiticity_error(const CMatrix& h) {
    double norm = h.norm();
    if (norm == 0.0) return 0.0;
    return (h - h.adjoint()).norm() / norm;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

double min_eigenvalue(const CMatrix& rho) {
    CMatrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

UnitaryEigen unitary_eigen(const CMatrix& u) {
    // The Schur form of a normal matrix is diagonal, so the Schur vectors are
    // an orthonormal eigenbasis even inside near-degenerate clusters.
    Eigen::ComplexSchur<CMatrix> schur(u);
    if (schur.info() != Eigen::Success) throw Error("Schur decomposition failed");
    UnitaryEigen out;
    out.values = schur.matrixT().diagonal();
    out.vectors = schur.matrixU();
    return out;
}

void parallel_for(int n, int n_threads, const std::function<void(int)>& body) {
    n_threads = std::max(1, std::min(n_threads, n));
    if (n_threads == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mutex;
    for (int w = 0; w < n_threads; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace kapitza
