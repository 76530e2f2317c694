#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace weyllab {

// Truncated Taylor series sum_k c[k] (t - t0)^k, all arithmetic modulo the order.
class Jet {
public:
    explicit Jet(std::size_t order, double value = 0.0) : c_(order + 1, 0.0) { c_[0] = value; }

    static Jet variable(std::size_t order, double t0)
    {
        Jet j(order, t0);
        if (order >= 1) j.c_[1] = 1.0;
        return j;
    }

    std::size_t order() const { return c_.size() - 1; }
    double operator[](std::size_t k) const { return c_[k]; }
    double& operator[](std::size_t k) { return c_[k]; }
    double value() const { return c_[0]; }

    Jet& operator+=(const Jet& o)
    {
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    Jet& operator*=(double a)
    {
        for (double& v : c_) v *= a;
        return *this;
    }
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator-(const Jet& a) { return a * -1.0; }
    friend Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }
    friend Jet operator+(Jet a, double s)
    {
        a.c_[0] += s;
        return a;
    }
    friend Jet operator-(double s, const Jet& a) { return (-a) + s; }

    friend Jet operator*(const Jet& a, const Jet& b)
    {
        Jet r(a.order());
        for (std::size_t k = 0; k <= a.order(); ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j <= k; ++j) s += a.c_[j] * b.c_[k - j];
            r.c_[k] = s;
        }
        return r;
    }

    Jet reciprocal() const
    {
        Jet r(order());
        r.c_[0] = 1.0 / c_[0];
        for (std::size_t k = 1; k <= order(); ++k) {
            double s = 0.0;
            for (std::size_t j = 1; j <= k; ++j) s += c_[j] * r.c_[k - j];
            r.c_[k] = -s * r.c_[0];
        }
        return r;
    }

    Jet exp() const
    {
        Jet r(order());
        r.c_[0] = std::exp(c_[0]);
        for (std::size_t k = 1; k <= order(); ++k) {
            double s = 0.0;
            for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * c_[j] * r.c_[k - j];
            r.c_[k] = s / static_cast<double>(k);
        }
        return r;
    }

    // cos and sin of the series, via s' = c u', c' = -s u'.
    void cos_sin(Jet& cs, Jet& sn) const
    {
        cs = Jet(order());
        sn = Jet(order());
        cs.c_[0] = std::cos(c_[0]);
        sn.c_[0] = std::sin(c_[0]);
        for (std::size_t k = 1; k <= order(); ++k) {
            double a = 0.0, b = 0.0;
            for (std::size_t j = 1; j <= k; ++j) {
                a += static_cast<double>(j) * c_[j] * cs.c_[k - j];
                b += static_cast<double>(j) * c_[j] * sn.c_[k - j];
            }
            sn.c_[k] = a / static_cast<double>(k);
            cs.c_[k] = -b / static_cast<double>(k);
        }
    }

    // d/dt, losing one order.
    Jet derivative() const
    {
        Jet r(order() == 0 ? 0 : order() - 1);
        for (std::size_t k = 0; k + 1 <= order(); ++k) r.c_[k] = static_cast<double>(k + 1) * c_[k + 1];
        return r;
    }

    Jet truncated(std::size_t order) const
    {
        Jet r(order);
        for (std::size_t k = 0; k <= order && k < c_.size(); ++k) r.c_[k] = c_[k];
        return r;
    }

private:
    std::vector<double> c_;
};

} // namespace weyllab
