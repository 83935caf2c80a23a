#pragma once

#include <gtest/gtest.h>

#include "otfs_sbl/otfs_sbl.hpp"

namespace otfs::test {

inline ComplexMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    ComplexMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) m.col(j) = complex_normal_vector(rng, rows);
    return m;
}

inline ComplexMatrix random_hpd(Eigen::Index n, Rng& rng) {
    const ComplexMatrix m = random_matrix(n, n, rng);
    ComplexMatrix a = m.adjoint() * m;
    a.diagonal().array() += 1.0;
    return 0.5 * (a + a.adjoint());
}

inline double rel_err(const ComplexMatrix& a, const ComplexMatrix& b) {
    const double ref = std::max(b.norm(), 1e-300);
    return (a - b).norm() / ref;
}

}  // namespace otfs::test
