#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "dislocore/dynamics.hpp"

namespace dislocore {

inline constexpr const char* kToolVersion = "0.1.0";

/// Validated scenario configuration (versioned JSON schema, one scenario per
/// file). Unknown keys are rejected; serialization is canonical so configs
/// round-trip identically and hash deterministically.
class Scenario {
public:
    static Scenario from_file(const std::string& path);
    static Scenario from_json(const nlohmann::json& j);

    const nlohmann::json& config() const { return j_; }
    nlohmann::json to_json() const { return j_; }
    std::string mode() const { return j_.at("mode").get<std::string>(); }
    std::uint64_t seed() const { return j_.at("seed").get<std::uint64_t>(); }
    std::string output_prefix() const;
    std::string hash() const; // FNV-1a 64 over the canonical dump

    Domain make_domain() const;
    GreenEngine make_engine(const Domain& domain) const;

private:
    explicit Scenario(nlohmann::json j) : j_(std::move(j)) {}
    nlohmann::json j_;
};

struct RunResult {
    int exit_code = 0; // 0 pass, 2 bound violation, 1 error
    std::string summary;
};

/// Executes the scenario mode, writes its artifacts under out_dir, prints the
/// one-line summary to stdout (unless quiet), and returns the exit code.
RunResult run_scenario(const Scenario& scenario, const std::string& out_dir,
                       bool quiet = false);

// Trajectory export (formats documented in the README).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::string& meta_line);
void write_events_jsonl(std::ostream& os, const Trajectory& traj,
                        const nlohmann::json& meta);

} // namespace dislocore
