#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace gencourant {

struct Interval {
    double lo = -1.0;
    double hi = 1.0;
};

// A coordinate patch with a seeded set of sample points.
class Chart {
public:
    explicit Chart(std::vector<std::string> names, std::vector<Interval> domain = {},
                   std::uint64_t seed = 0, int num_points = 16);

    int dim() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<Interval>& domain() const { return domain_; }
    std::uint64_t seed() const { return seed_; }
    int num_points() const { return num_points_; }

    // Throws UnknownSymbol.
    int index_of(const std::string& name) const;
    bool has(const std::string& name) const;

    // Uniform draws from the domain box, coordinate by coordinate.
    const std::vector<std::vector<double>>& sample_points() const { return points_; }

private:
    std::vector<std::string> names_;
    std::vector<Interval> domain_;
    std::uint64_t seed_;
    int num_points_;
    std::vector<std::vector<double>> points_;
};

using ChartPtr = std::shared_ptr<const Chart>;

ChartPtr make_chart(std::vector<std::string> names, std::vector<Interval> domain = {},
                    std::uint64_t seed = 0, int num_points = 16);

// Chart with coordinates x1..xn on [-1,1]^n.
ChartPtr make_chart(int dim, std::uint64_t seed = 0, int num_points = 16);

bool is_identifier(const std::string& s);

}  // namespace gencourant
