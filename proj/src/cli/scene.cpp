#include <fstream>
#include <sstream>

#include "gencourant/cli.hpp"
#include "gencourant/errors.hpp"

namespace gencourant {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

// "x,y" -> coordinate indices.
std::vector<int> parse_key(const std::string& key, const Chart& chart, const std::string& where) {
    std::vector<int> idx;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, ',')) {
        auto name = trim(part);
        if (!chart.has(name)) throw ValidationError(where + ": unknown coordinate '" + name + "' in key '" + key + "'");
        idx.push_back(chart.index_of(name));
    }
    return idx;
}

Expr parse_value(const json& v, const Chart& chart, const std::string& where) {
    if (v.is_number()) return Expr(v.get<double>());
    if (!v.is_string()) throw ParseError(where + ": expected an expression string");
    try {
        return parse_expr(v.get<std::string>(), chart);
    } catch (const SyntaxError& e) {
        throw ParseError(where + ": " + e.what());
    } catch (const UnknownSymbol& e) {
        throw ParseError(where + ": " + e.what());
    }
}

const json* member(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

// Entries keyed by coordinate tuples; `accept` decides which index orders
// may be given, `place` writes the completed components.
template <typename Accept, typename Place>
void read_entries(const json& obj, const Chart& chart, const std::string& where, std::size_t rank, Accept accept,
                  Place place) {
    if (!obj.is_object()) throw ValidationError(where + ": expected an object of components");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        std::string w = where + "[" + it.key() + "]";
        auto idx = parse_key(it.key(), chart, w);
        if (idx.size() != rank)
            throw ValidationError(w + ": expected " + std::to_string(rank) + " indices, got " +
                                  std::to_string(idx.size()));
        if (!accept(idx)) throw ValidationError(w + ": index order not allowed here");
        place(idx, parse_value(it.value(), chart, w));
    }
}

TensorField read_metric(const json& obj, const ChartPtr& chart) {
    auto g = TensorField::uniform(chart, 2, Variance::Down);
    read_entries(
        obj, *chart, "background.g", 2, [](const std::vector<int>& i) { return i[0] <= i[1]; },
        [&](const std::vector<int>& i, const Expr& e) {
            g(i[0], i[1]) = e;
            g(i[1], i[0]) = e;
        });
    return g;
}

TensorField read_two_form(const json& obj, const ChartPtr& chart, const std::string& where) {
    auto B = TensorField::uniform(chart, 2, Variance::Down);
    read_entries(
        obj, *chart, where, 2, [](const std::vector<int>& i) { return i[0] < i[1]; },
        [&](const std::vector<int>& i, const Expr& e) {
            B(i[0], i[1]) = e;
            B(i[1], i[0]) = -e;
        });
    return B;
}

TensorField read_three_form(const json& obj, const ChartPtr& chart, const std::string& where) {
    auto H = TensorField::uniform(chart, 3, Variance::Down);
    read_entries(
        obj, *chart, where, 3, [](const std::vector<int>& i) { return i[0] < i[1] && i[1] < i[2]; },
        [&](const std::vector<int>& i, const Expr& e) {
            int p[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
            for (int k = 0; k < 6; ++k) H(i[p[k][0]], i[p[k][1]], i[p[k][2]]) = k < 3 ? e : -e;
        });
    return H;
}

// Skew in the last two slots; entries with i[1] < i[2].
TensorField read_param(const json& obj, const ChartPtr& chart, const std::string& where, Variance v) {
    auto T = TensorField::uniform(chart, 3, v);
    read_entries(
        obj, *chart, where, 3, [](const std::vector<int>& i) { return i[1] < i[2]; },
        [&](const std::vector<int>& i, const Expr& e) {
            T(i[0], i[1], i[2]) = e;
            T(i[0], i[2], i[1]) = -e;
        });
    return T;
}

ChartPtr read_chart(const json& c, const SceneOverrides& o) {
    if (!c.is_object()) throw ValidationError("chart: expected an object");
    auto dim_j = member(c, "dim");
    if (!dim_j || !dim_j->is_number_integer()) throw ValidationError("chart.dim: expected an integer");
    int dim = dim_j->get<int>();
    if (dim < 1 || dim > 6) throw ValidationError("chart.dim: must be between 1 and 6");

    std::vector<std::string> names;
    if (auto cj = member(c, "coords")) {
        names = cj->get<std::vector<std::string>>();
        if (static_cast<int>(names.size()) != dim)
            throw ValidationError("chart.coords: " + std::to_string(names.size()) + " names for dim " +
                                  std::to_string(dim));
    } else {
        for (int i = 1; i <= dim; ++i) names.push_back("x" + std::to_string(i));
    }
    for (const auto& n : names)
        if (!is_identifier(n)) throw ValidationError("chart.coords: '" + n + "' is not an identifier");

    std::vector<Interval> domain(static_cast<std::size_t>(dim));
    if (auto dj = member(c, "domain")) {
        if (!dj->is_array() || static_cast<int>(dj->size()) != dim)
            throw ValidationError("chart.domain: expected " + std::to_string(dim) + " intervals");
        for (int i = 0; i < dim; ++i) {
            const auto& iv = (*dj)[static_cast<std::size_t>(i)];
            if (!iv.is_array() || iv.size() != 2) throw ValidationError("chart.domain: intervals are [lo, hi]");
            Interval in{iv[0].get<double>(), iv[1].get<double>()};
            if (!(in.lo < in.hi)) throw ValidationError("chart.domain: empty interval");
            domain[static_cast<std::size_t>(i)] = in;
        }
    }

    std::uint64_t seed = 0;
    if (auto sj = member(c, "seed")) seed = sj->get<std::uint64_t>();
    int points = 16;
    if (auto pj = member(c, "points")) points = pj->get<int>();
    if (o.seed) seed = *o.seed;
    if (o.points) points = *o.points;
    if (points < 1) throw ValidationError("chart.points: must be positive");
    return make_chart(std::move(names), std::move(domain), seed, points);
}

}  // namespace

ParamPolicy parse_policy(const std::string& s) {
    if (s == "reject") return ParamPolicy::Reject;
    if (s == "project") return ParamPolicy::Project;
    throw ValidationError("policy must be 'reject' or 'project', got '" + s + "'");
}

Scene parse_scene(const json& doc, const std::string& source, const SceneOverrides& o) {
    if (!doc.is_object()) throw ValidationError("scene: expected a JSON object");
    auto ver = member(doc, "schema_version");
    if (!ver || !ver->is_number_integer() || ver->get<int>() != kSceneSchemaVersion)
        throw ValidationError("scene: schema_version must be " + std::to_string(kSceneSchemaVersion));
    auto cj = member(doc, "chart");
    if (!cj) throw ValidationError("scene: missing chart");
    auto bj = member(doc, "background");
    if (!bj || !bj->is_object()) throw ValidationError("scene: missing background");

    Scene s;
    s.source = source;
    s.chart = read_chart(*cj, o);
    const auto& chart = s.chart;

    if (auto opt = member(doc, "options")) {
        if (auto p = member(*opt, "policy")) s.policy = parse_policy(p->get<std::string>());
        if (auto t = member(*opt, "tolerances")) {
            if (auto v = member(*t, "sym")) s.tol.sym = v->get<double>();
            if (auto v = member(*t, "fd")) s.tol.fd = v->get<double>();
        }
    }
    if (o.policy) s.policy = *o.policy;
    if (o.tol_sym) s.tol.sym = *o.tol_sym;
    if (o.tol_fd) s.tol.fd = *o.tol_fd;

    auto gj = member(*bj, "g");
    if (!gj) throw ValidationError("background.g: missing");
    auto g = read_metric(*gj, chart);
    auto B = TensorField::uniform(chart, 2, Variance::Down);
    if (auto j = member(*bj, "B")) B = read_two_form(*j, chart, "background.B");
    Expr phi(0.0);
    if (auto j = member(*bj, "phi")) phi = parse_value(*j, *chart, "background.phi");
    auto hj = member(*bj, "H");
    auto b0j = member(*bj, "B0");
    if (hj && b0j) throw ValidationError("background: give either H or B0, not both");

    try {
        if (b0j)
            s.background = Background::with_potential(g, B, phi, read_two_form(*b0j, chart, "background.B0"));
        else
            s.background = Background::with_h(
                g, B, phi, hj ? read_three_form(*hj, chart, "background.H") : TensorField::uniform(chart, 3, Variance::Down));
    } catch (const NotPositiveDefinite& e) {
        throw ValidationError(std::string("NotPositiveDefinite: ") + e.what());
    } catch (const SingularMetric& e) {
        throw ValidationError(std::string("SingularMetric: ") + e.what());
    } catch (const NotClosed& e) {
        throw ValidationError(std::string("NotClosed: ") + e.what());
    } catch (const DomainError& e) {
        throw ValidationError(std::string("DomainError: ") + e.what());
    }

    auto J = TensorField::uniform(chart, 3, Variance::Up);
    auto W = TensorField::uniform(chart, 3, Variance::Down);
    if (auto j = member(*bj, "J")) J = read_param(*j, chart, "background.J", Variance::Up);
    if (auto j = member(*bj, "W")) W = read_param(*j, chart, "background.W", Variance::Down);
    try {
        s.params = validate_params(J, W, s.policy, s.tol.sym);
    } catch (const CyclicConstraintViolated& e) {
        throw ValidationError(std::string("CyclicConstraintViolated: ") + e.what());
    }
    return s;
}

Scene load_scene(const std::string& path, const SceneOverrides& o) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read scene file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    try {
        return parse_scene(doc, path, o);
    } catch (const json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

}  // namespace gencourant
