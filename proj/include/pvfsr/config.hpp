#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pvfsr/simgen.hpp"

namespace pvfsr {

/// One scenario x method cell of a simulation study.
struct SimRun {
    Scenario scenario;
    SimMethod method = SimMethod::pseudo2;
    int b_replicates = 20;
    bool use_permutation = true;
};

struct SimConfig {
    std::vector<SimRun> runs;
    unsigned threads = 1;
};

// Format: `key = value` lines, `#` comments, optional `[name]` sections.
// Keys before the first section are defaults for every section. A value in
// brackets is a list; each section expands to the cartesian product of its
// lists; defaults come first and the last
// list varies fastest. With no sections the defaults form the
// single group. Keys:
//   family n p rho amplitude s alpha c beta_draws datasets seed method B
//   permutation threads
SimConfig parse_sim_config(std::istream& in);
SimConfig parse_sim_config_string(const std::string& text);
SimConfig read_sim_config(const std::string& path);

}  // namespace pvfsr
