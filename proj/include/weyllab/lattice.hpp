#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace weyllab {

// Enumerates every k in Z^n with |M k + c| <= radius (Fincke-Pohst). M holds the
// lattice generators as columns. visit(k, |Mk+c|^2) is called once per vector in
// lexicographic order of (k_{n-1}, ..., k_0).
class LatticeEnumerator {
public:
    explicit LatticeEnumerator(const Eigen::MatrixXd& basis) : n_(static_cast<int>(basis.cols()))
    {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
        q_ = qr.householderQ() * Eigen::MatrixXd::Identity(basis.rows(), basis.cols());
        r_ = qr.matrixQR().topRows(n_).template triangularView<Eigen::Upper>();
    }

    template <class Visit>
    std::uint64_t enumerate(const Eigen::VectorXd& center, double radius, Visit&& visit,
                            std::uint64_t cap = UINT64_MAX) const
    {
        const Eigen::VectorXd d = q_.transpose() * center;
        std::vector<std::int64_t> k(static_cast<std::size_t>(n_), 0);
        const double r2 = radius * radius;
        std::uint64_t count = 0;
        // Rows of R are processed from the bottom; partial[i] is the squared
        // contribution of rows i..n-1 fixed so far.
        std::vector<double> partial(static_cast<std::size_t>(n_) + 1, 0.0);
        std::function<void(int)> rec = [&](int i) {
            double shift = d(i);
            for (int j = i + 1; j < n_; ++j) shift += r_(i, j) * static_cast<double>(k[static_cast<std::size_t>(j)]);
            const double rem = r2 - partial[static_cast<std::size_t>(i) + 1];
            if (rem < 0.0) return;
            const double rii = r_(i, i);
            const double span = std::sqrt(rem) / std::abs(rii);
            const double mid = -shift / rii;
            // Small widening so that boundary vectors are not lost to rounding;
            // the exact test below decides membership.
            const auto lo = static_cast<std::int64_t>(std::ceil(mid - span - 1e-9 * (1.0 + span)));
            const auto hi = static_cast<std::int64_t>(std::floor(mid + span + 1e-9 * (1.0 + span)));
            for (std::int64_t v = lo; v <= hi; ++v) {
                const double e = rii * static_cast<double>(v) + shift;
                const double p = partial[static_cast<std::size_t>(i) + 1] + e * e;
                if (p > r2 * (1.0 + 1e-14) + 1e-300) continue;
                k[static_cast<std::size_t>(i)] = v;
                partial[static_cast<std::size_t>(i)] = p;
                if (i == 0) {
                    if (++count > cap) throw ResourceError("lattice enumeration exceeded cap of " + std::to_string(cap) + " vectors");
                    visit(k, p);
                } else {
                    rec(i - 1);
                }
            }
        };
        rec(n_ - 1);
        return count;
    }

    int dimension() const { return n_; }

private:
    int n_;
    Eigen::MatrixXd q_;
    Eigen::MatrixXd r_;
};

} // namespace weyllab
