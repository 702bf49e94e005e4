#pragma once

#include <array>
#include <cmath>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gk {

/// Rectangular coordinate chart: ordered coordinate names plus finite
/// per-coordinate bounds.  Points are validated against the bounds;
/// evaluation outside the domain is an error, not an extrapolation.
class Chart {
public:
    Chart() = default;

    Chart(std::vector<std::string> names, std::vector<std::array<double, 2>> bounds)
        : names_(std::move(names)), bounds_(std::move(bounds)) {
        if (names_.empty()) throw std::invalid_argument("chart: needs at least one coordinate");
        if (names_.size() != bounds_.size())
            throw std::invalid_argument("chart: names/bounds size mismatch");
        for (size_t i = 0; i < names_.size(); ++i) {
            for (size_t j = i + 1; j < names_.size(); ++j)
                if (names_[i] == names_[j])
                    throw std::invalid_argument("chart: duplicate coordinate name '" + names_[i] + "'");
            if (!(bounds_[i][0] < bounds_[i][1]))
                throw std::invalid_argument("chart: empty bound interval for '" + names_[i] + "'");
            if (!std::isfinite(bounds_[i][0]) || !std::isfinite(bounds_[i][1]))
                throw std::invalid_argument("chart: bounds must be finite for '" + names_[i] + "'");
        }
    }

    int dim() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<std::array<double, 2>>& bounds() const { return bounds_; }

    /// Index of a coordinate name, -1 if absent.
    int find(const std::string& name) const {
        for (size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name) return static_cast<int>(i);
        return -1;
    }

    int index_of(const std::string& name) const {
        int i = find(name);
        if (i < 0) throw std::invalid_argument("chart: unknown coordinate '" + name + "'");
        return i;
    }

    bool contains(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dim()) return false;
        for (int i = 0; i < dim(); ++i)
            if (!(x[i] >= bounds_[i][0] && x[i] <= bounds_[i][1])) return false;
        return true;
    }

    void require_inside(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dim())
            throw std::invalid_argument("chart: point dimension mismatch");
        for (int i = 0; i < dim(); ++i)
            if (!(x[i] >= bounds_[i][0] && x[i] <= bounds_[i][1])) {
                std::ostringstream os;
                os << "chart: coordinate " << names_[i] << "=" << x[i] << " outside ["
                   << bounds_[i][0] << ", " << bounds_[i][1] << "]";
                throw std::domain_error(os.str());
            }
    }

    friend bool operator==(const Chart& a, const Chart& b) {
        return a.names_ == b.names_ && a.bounds_ == b.bounds_;
    }

private:
    std::vector<std::string> names_;
    std::vector<std::array<double, 2>> bounds_;
};

}  // namespace gk
