#pragma once

// Brute-force references used by the unit tests. Deliberately naive.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// All integer vectors k with |M k + c| <= R, found by scanning a box
// large enough to contain the ellipsoid.
inline std::vector<Eigen::VectorXd> lattice_ball(const Eigen::MatrixXd& M, const Eigen::VectorXd& c, double R)
{
    const int n = static_cast<int>(M.cols());
    const Eigen::MatrixXd inv = M.inverse();
    std::vector<std::int64_t> lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
        const double reach = R * inv.row(i).norm();
        const double mid = -(inv.row(i) * c)(0);
        lo[i] = static_cast<std::int64_t>(std::floor(mid - reach)) - 1;
        hi[i] = static_cast<std::int64_t>(std::ceil(mid + reach)) + 1;
    }
    std::vector<Eigen::VectorXd> out;
    std::vector<std::int64_t> k(lo);
    while (true) {
        Eigen::VectorXd v = c;
        for (int i = 0; i < n; ++i) v += M.col(i) * static_cast<double>(k[i]);
        if (v.norm() <= R) out.push_back(v);
        int i = 0;
        while (i < n && ++k[i] > hi[i]) {
            k[i] = lo[i];
            ++i;
        }
        if (i == n) break;
    }
    return out;
}

inline Eigen::MatrixXd random_basis(std::mt19937_64& rng, int n)
{
    std::uniform_real_distribution<double> U(-0.3, 0.3), S(0.7, 1.4);
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n);
    for (int c = 0; c < n; ++c) {
        for (int r = 0; r < n; ++r) B(r, c) += U(rng);
        B.col(c) *= S(rng);
    }
    return B;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double scale = 1.0)
{
    std::uniform_real_distribution<double> U(-scale, scale);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = U(rng);
    return v;
}

inline Eigen::VectorXd random_unit(std::mt19937_64& rng, int dim)
{
    std::normal_distribution<double> N(0.0, 1.0);
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = N(rng);
    return v / v.norm();
}

} // namespace oracle
