#include "gencourant/chart.hpp"

#include <set>

#include "gencourant/errors.hpp"
#include "gencourant/rng.hpp"

namespace gencourant {

namespace {

bool is_reserved(const std::string& s) {
    return s == "sin" || s == "cos" || s == "exp" || s == "ln" || s == "sqrt";
}

}  // namespace

bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(s[0])) return false;
    for (char c : s)
        if (!alpha(c) && !digit(c)) return false;
    return true;
}

Chart::Chart(std::vector<std::string> names, std::vector<Interval> domain, std::uint64_t seed,
             int num_points)
    : names_(std::move(names)), domain_(std::move(domain)), seed_(seed), num_points_(num_points) {
    if (names_.empty()) throw ValidationError("chart dimension must be positive");
    if (names_.size() > 32) throw ValidationError("chart dimension too large");
    std::set<std::string> seen;
    for (const auto& n : names_) {
        if (!is_identifier(n) || is_reserved(n))
            throw ValidationError("invalid coordinate name '" + n + "'");
        if (!seen.insert(n).second) throw ValidationError("duplicate coordinate name '" + n + "'");
    }
    if (domain_.empty()) domain_.assign(names_.size(), Interval{});
    if (domain_.size() != names_.size())
        throw ValidationError("domain has " + std::to_string(domain_.size()) +
                              " intervals for a chart of dimension " +
                              std::to_string(names_.size()));
    for (const auto& iv : domain_)
        if (!(iv.lo <= iv.hi)) throw ValidationError("empty coordinate interval");
    if (num_points_ < 1) throw ValidationError("number of sample points must be positive");

    Rng rng(seed_);
    points_.resize(static_cast<std::size_t>(num_points_));
    for (auto& p : points_) {
        p.resize(names_.size());
        for (std::size_t i = 0; i < names_.size(); ++i) p[i] = rng.uniform(domain_[i].lo, domain_[i].hi);
    }
}

int Chart::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<int>(i);
    throw UnknownSymbol(name);
}

bool Chart::has(const std::string& name) const {
    for (const auto& n : names_)
        if (n == name) return true;
    return false;
}

ChartPtr make_chart(std::vector<std::string> names, std::vector<Interval> domain, std::uint64_t seed,
                    int num_points) {
    return std::make_shared<const Chart>(std::move(names), std::move(domain), seed, num_points);
}

ChartPtr make_chart(int dim, std::uint64_t seed, int num_points) {
    std::vector<std::string> names;
    for (int i = 1; i <= dim; ++i) names.push_back("x" + std::to_string(i));
    return make_chart(std::move(names), {}, seed, num_points);
}

}  // namespace gencourant
