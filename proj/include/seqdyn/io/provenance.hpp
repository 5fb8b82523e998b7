#pragma once

#include <string>

#include "seqdyn/io/json.hpp"

#ifndef SEQDYN_BUILD_STAMP
#define SEQDYN_BUILD_STAMP "unknown"
#endif

namespace seqdyn::io {

/// git-describe output captured when the build was configured.
inline std::string build_stamp() { return SEQDYN_BUILD_STAMP; }

/**
 * Parameters of one invocation: the subcommand, its resolved parameters and the
 * global flags. Serialized verbatim into every artifact the invocation writes.
 */
struct RunConfig {
    std::string command;
    std::uint64_t seed = 1;
    std::string out = "out";
    int threads = 1;
    bool plots = false;
    std::string profile = "desk";
    json params = json::object();

    json to_json() const
    {
        return {{"command", command}, {"seed", seed},       {"out", out},
                {"threads", threads}, {"plots", plots},     {"profile", profile},
                {"params", params}};
    }
};

/// Adds the run_config and build fields to an artifact object.
inline json stamped(json artifact, const RunConfig& cfg)
{
    artifact["run_config"] = cfg.to_json();
    artifact["build"] = build_stamp();
    return artifact;
}

} // namespace seqdyn::io
