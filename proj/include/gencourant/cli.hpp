#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gencourant/gconn.hpp"
#include "gencourant/streff.hpp"

namespace gencourant {

inline constexpr int kSceneSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

struct Tolerances {
    double sym = 1e-9;  // symbolic against symbolic
    double fd = 1e-6;   // anything against a finite difference
};

// Command-line values that take precedence over the scene file.
struct SceneOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> points;
    std::optional<double> tol_sym;
    std::optional<double> tol_fd;
    std::optional<ParamPolicy> policy;
};

struct Scene {
    std::string source;
    ChartPtr chart;
    Background background;
    ConnParams params;  // validated under `policy`; zero when absent
    ParamPolicy policy = ParamPolicy::Project;
    Tolerances tol;
};

// Throws ParseError (file, JSON or expression; the message carries the
// location) or ValidationError.
Scene load_scene(const std::string& path, const SceneOverrides& o = {});
Scene parse_scene(const nlohmann::json& doc, const std::string& source, const SceneOverrides& o = {});

struct CheckRecord {
    std::string name;
    std::string anchor;
    double max_abs = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::vector<double> point;  // sample point of the max residual
};

struct Report {
    std::string command;
    std::vector<CheckRecord> checks;  // sorted by name
    nlohmann::json info = nlohmann::json::object();
    double timing_ms = 0.0;
    bool pass() const;
};

const std::vector<std::string>& command_names();
// Throws CommandError for unknown commands or a scene the command cannot use.
Report run_command(const std::string& cmd, const Scene& scene);
nlohmann::json to_json(const Report& r, const Scene& scene);

ParamPolicy parse_policy(const std::string& s);

}  // namespace gencourant
