// gencourant <command> <scene.json> [options]
//
// Exit codes: 0 every check passed, 1 some check failed, 2 input error,
// 3 internal error.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gencourant/cli.hpp"
#include "gencourant/errors.hpp"

using namespace gencourant;

namespace {

enum Exit { kPass = 0, kFail = 1, kInput = 2, kInternal = 3 };

bool is_input_error(const Error& e) {
    return dynamic_cast<const SlotError*>(&e) == nullptr && dynamic_cast<const ChartMismatch*>(&e) == nullptr &&
           dynamic_cast<const DegreeMismatch*>(&e) == nullptr;
}

void print_summary(const Report& r, std::ostream& os) {
    for (const auto& c : r.checks) {
        char line[256];
        std::snprintf(line, sizeof line, "%s  %-34s %.3e (tol %.1e)", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                      c.max_abs, c.tolerance);
        os << line << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized geometry identity checks on a background scene"};
    std::string command, scene_path, out_path, policy;
    SceneOverrides o;
    std::uint64_t seed = 0;
    int points = 0;
    double tol_sym = 0, tol_fd = 0;

    app.add_option("command", command, "axioms | torsion | curvature | beta | central | symplectic | equivalence | all")
        ->required()
        ->check(CLI::IsMember(command_names()));
    app.add_option("scene", scene_path, "scene JSON file")->required();
    auto* seed_opt = app.add_option("--seed", seed, "override the chart seed");
    auto* points_opt = app.add_option("--points", points, "override the number of sample points");
    auto* sym_opt = app.add_option("--tol-sym", tol_sym, "tolerance for symbolic identities");
    auto* fd_opt = app.add_option("--tol-fd", tol_fd, "tolerance for finite-difference checks");
    auto* policy_opt =
        app.add_option("--policy", policy, "parameter policy")->check(CLI::IsMember({"reject", "project"}));
    app.add_option("--out", out_path, "write the JSON report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kPass : kInput;
    }
    if (*seed_opt) o.seed = seed;
    if (*points_opt) o.points = points;
    if (*sym_opt) o.tol_sym = tol_sym;
    if (*fd_opt) o.tol_fd = tol_fd;

    try {
        if (*policy_opt) o.policy = parse_policy(policy);
        auto scene = load_scene(scene_path, o);
        auto report = run_command(command, scene);
        auto doc = to_json(report, scene);
        if (out_path.empty()) {
            std::cout << doc.dump(2) << "\n";
        } else {
            std::ofstream out(out_path);
            if (!out) {
                std::cerr << "error: cannot write '" << out_path << "'\n";
                return kInput;
            }
            out << doc.dump(2) << "\n";
            print_summary(report, std::cout);
        }
        return report.pass() ? kPass : kFail;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_input_error(e) ? kInput : kInternal;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}
